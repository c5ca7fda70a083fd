"""Dense engine: kernels, pass algebra, layout, and resource limits."""

import numpy as np
import pytest

from implicants import (
    MERGE,
    REDUCE,
    DenseState,
    ResourceLimitError,
    TruthTable,
    dense_prime_ranks,
    extract_ranks,
    find_primes_dense,
    index_to_rank,
    merge_triple,
    random_function,
    rank,
    reduce_triple,
    state_bytes,
)
from implicants.dense import block_bits_for, extract_strings, load
from tests.conftest import naive_primes


def set_rank_bit(state: DenseState, r: int) -> None:
    """Poke one ternary string's bit directly into the state."""
    used = 3**state.h
    block, bit = divmod(r, used)
    flat = block * state.block_bits + bit
    state.words[flat // 64] |= np.uint64(1) << np.uint64(flat % 64)


def get_rank_bit(state: DenseState, r: int) -> bool:
    used = 3**state.h
    block, bit = divmod(r, used)
    flat = block * state.block_bits + bit
    return bool((state.words[flat // 64] >> np.uint64(flat % 64)) & np.uint64(1))


class TestTriples:
    def test_merge_triple_scalar(self):
        s, t, u = merge_triple(0b1100, 0b1010, 0b0001)
        assert (s, t, u) == (0b1100, 0b1010, 0b1001)

    def test_reduce_triple_scalar(self):
        s, t, u = reduce_triple(0b1111, 0b0110, 0b1010)
        assert (s, t, u) == (0b0101, 0b0100, 0b1010)

    def test_merge_example_strings(self):
        # 0011* and 0111* sit in the digit-0 and digit-1 slots of the
        # position-2 triple whose wildcard slot is 0*11*; one merge step
        # must light that slot.
        lane = 1  # any bit position stands for the shared remainder
        s, t, u = merge_triple(lane, lane, 0)
        assert u == lane
        # and reduce then clears both children
        s, t, u = reduce_triple(s, t, u)
        assert s == 0 and t == 0 and u == lane

    def test_triples_on_arrays(self):
        s = np.array([3, 5], dtype=np.uint64)
        t = np.array([6, 4], dtype=np.uint64)
        u = np.array([0, 8], dtype=np.uint64)
        _, _, u2 = merge_triple(s, t, u)
        assert u2.tolist() == [2, 12]
        s2, t2, _ = reduce_triple(s, t, u)
        assert s2.tolist() == [3, 5 & ~8]
        assert t2.tolist() == [6, 4 & ~8]


class TestLayout:
    def test_block_bits(self):
        assert block_bits_for(1) == 64
        assert block_bits_for(3) == 64
        assert block_bits_for(4) == 128
        assert block_bits_for(5) == 256

    def test_state_bytes(self):
        assert state_bytes(3, 1) == 9 * 8
        assert state_bytes(20, 5) == 3**15 * 32

    def test_load_places_rank_bits(self):
        # point 7 of n=3 is string 111, rank 13 = block 4, bit 1 at h=1
        tt = TruthTable.from_indices(3, [7])
        state = load(tt, h=1)
        assert state.words[4] == 2
        assert sum(int(w) for w in state.words) == 2

    def test_load_extract_roundtrip(self):
        tt = random_function(8, 0.43, 9)
        for h in (1, 3, 5, 8):
            state = load(tt, h=h)
            got = extract_ranks(state)
            expected = np.sort(index_to_rank(tt.support_indices(), 8).astype(np.int64))
            assert np.array_equal(got, expected)
            assert state.padding_bits_zero()

    def test_h_validation(self):
        tt = TruthTable.empty(3)
        with pytest.raises(ValueError):
            load(tt, h=0)
        with pytest.raises(ValueError):
            load(tt, h=4)

    def test_mem_cap(self):
        tt = TruthTable.empty(12)
        need = state_bytes(12, 5)
        with pytest.raises(ResourceLimitError) as exc:
            load(tt, h=5, mem_cap=need - 1)
        assert str(need) in str(exc.value)
        load(tt, h=5, mem_cap=need)  # exactly at the cap is fine


class TestPasses:
    def test_merge_example_in_state(self):
        # golden merge: 0011* + 0111* -> 0*11* along position 2
        state = load(TruthTable.empty(5), h=2)
        set_rank_bit(state, rank("0011*"))
        set_rank_bit(state, rank("0111*"))
        state.run_pass(MERGE, dims=[2])
        assert get_rank_bit(state, rank("0*11*"))
        # the two children survive MERGE and die in REDUCE
        state.run_pass(REDUCE, dims=[2])
        assert not get_rank_bit(state, rank("0011*"))
        assert not get_rank_bit(state, rank("0111*"))
        assert get_rank_bit(state, rank("0*11*"))

    @pytest.mark.parametrize("optimized", [True, False])
    def test_merge_idempotent(self, optimized):
        tt = random_function(7, 0.5, 3)
        state = load(tt, h=3, optimized=optimized)
        state.run_pass(MERGE)
        before = state.words.copy()
        state.run_pass(MERGE)
        assert np.array_equal(state.words, before)

    @pytest.mark.parametrize("optimized", [True, False])
    def test_reduce_idempotent_after_merge(self, optimized):
        tt = random_function(7, 0.5, 4)
        state = load(tt, h=4, optimized=optimized)
        state.run_pass(MERGE)
        state.run_pass(REDUCE)
        before = state.words.copy()
        state.run_pass(REDUCE)
        assert np.array_equal(state.words, before)

    def test_dimension_order_invariance(self):
        rng = np.random.default_rng(11)
        tt = random_function(7, 0.4, 8)
        base = dense_prime_ranks(tt, h=3)
        for _ in range(10):
            dims = rng.permutation(np.arange(1, 8)).tolist()
            state = load(tt, h=3)
            state.run_pass(MERGE, dims=dims)
            state.run_pass(REDUCE, dims=rng.permutation(np.arange(1, 8)).tolist())
            assert np.array_equal(extract_ranks(state), base)

    def test_padding_stays_zero_through_subpasses(self):
        tt = random_function(6, 0.6, 2)
        for h in (2, 4):
            state = load(tt, h=h)
            for op in (MERGE, REDUCE):
                for dim in range(1, 7):
                    state.run_pass(op, dims=[dim])
                    assert state.padding_bits_zero(), (op, dim)

    def test_top_layer_triple_counts(self):
        for n in range(4, 9):
            for h in range(1, n):
                tt = random_function(n, 0.5, 1)
                state = load(tt, h=h)
                counts = state.run_pass(MERGE)
                assert set(counts) == set(range(h + 1, n + 1))
                for dim, count in counts.items():
                    assert count == 3 ** (n - h - 1), (n, h, dim)

    def test_invalid_op_and_dims(self):
        state = load(TruthTable.empty(4), h=2)
        with pytest.raises(ValueError):
            state.run_pass("expand")
        with pytest.raises(ValueError):
            state.run_pass(MERGE, dims=[5])


class TestEndToEnd:
    def test_maj3(self, maj3):
        assert find_primes_dense(maj3) == {"*11", "1*1", "11*"}
        assert dense_prime_ranks(maj3).tolist() == [14, 16, 22]

    def test_constant_one(self):
        for n in (1, 4, 9):
            assert find_primes_dense(TruthTable.full(n)) == {"*" * n}

    def test_empty_function(self):
        assert find_primes_dense(TruthTable.empty(5)) == set()

    def test_single_point(self):
        tt = TruthTable.from_indices(6, [0b101001])
        assert find_primes_dense(tt) == {"100101"}

    def test_two_point_single_merge(self):
        # points (x1..x5) = 00110 and 01110 differ only in variable 2
        tt = TruthTable.from_indices(5, [0b01100, 0b01110])
        assert find_primes_dense(tt) == {"0*110"}

    def test_extract_before_merge_is_starless_support(self):
        tt = TruthTable.from_indices(4, [0, 5, 9, 14])
        assert extract_strings(load(tt)) == {"0000", "1010", "1001", "0111"}

    def test_matches_naive_reference(self):
        for n in range(1, 7):
            for seed in range(4):
                for density in (0.2, 0.5, 0.8):
                    tt = random_function(n, density, seed)
                    assert find_primes_dense(tt) == naive_primes(tt), (n, seed, density)

    def test_split_invariance(self):
        tt = random_function(9, 0.5, 21)
        base = dense_prime_ranks(tt, h=5)
        for h in range(1, 10):
            assert np.array_equal(dense_prime_ranks(tt, h=h), base), h

    @pytest.mark.parametrize("n", [3, 6, 8, 10])
    def test_optimized_equals_reference(self, n):
        tt = random_function(n, 0.5, n)
        fast = dense_prime_ranks(tt, optimized=True)
        plain = dense_prime_ranks(tt, optimized=False)
        assert np.array_equal(fast, plain)

    def test_fused_equals_sequential_passes(self):
        tt = random_function(8, 0.35, 5)
        fused = load(tt, h=4)
        fused.run_merge_reduce()
        seq = load(tt, h=4)
        seq.run_pass(MERGE)
        seq.run_pass(REDUCE)
        assert fused.equal_state(seq)

    def test_states_equal_across_paths(self):
        tt = random_function(7, 0.5, 12)
        a = load(tt, h=3, optimized=True)
        a.run_pass(MERGE)
        b = load(tt, h=3, optimized=False)
        b.run_pass(MERGE)
        assert a.equal_state(b)
        a.run_pass(REDUCE)
        b.run_pass(REDUCE)
        assert a.equal_state(b)
