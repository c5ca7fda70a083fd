"""Command-line interface: subcommands, exit codes, output contracts."""

import json
import subprocess
import sys

import pytest

from implicants import random_function, write_table
from implicants.cli import main


def run_cli(argv, capsys):
    """Invoke main() in-process; returns (exit_code, stdout, stderr)."""
    try:
        code = main(argv)
    except SystemExit as exc:  # argparse usage errors
        code = exc.code
    out, err = capsys.readouterr()
    return code, out, err


class TestPrimes:
    def test_generated_input(self, capsys):
        code, out, _ = run_cli(["primes", "--n", "3", "--density", "1", "--seed", "0"], capsys)
        assert code == 0
        assert out == "***\n"

    def test_ordering_weight_then_rank(self, capsys, tmp_path):
        path = tmp_path / "t.bits"
        path.write_text("0001100010101011")
        code, out, _ = run_cli(["primes", "--input", str(path)], capsys)
        assert code == 0
        # wildcard count descending, then rank ascending
        assert out.splitlines() == ["0**1", "*111", "001*", "1100"]

    def test_majority_of_three_from_file(self, capsys, tmp_path):
        path = tmp_path / "maj3.bits"
        path.write_text("00010111")
        code, out, _ = run_cli(["primes", "--algo", "dense", "--input", str(path)], capsys)
        assert code == 0
        assert out.splitlines() == ["*11", "1*1", "11*"]

    def test_engines_byte_identical(self, capsys):
        base = ["--n", "9", "--density", "0.5", "--seed", "6"]
        outs = {}
        for algo in ("dense", "sparse", "oracle"):
            code, out, _ = run_cli(["primes", "--algo", algo, *base], capsys)
            assert code == 0
            outs[algo] = out
        assert outs["dense"] == outs["sparse"] == outs["oracle"]

    def test_unroll_off_identical(self, capsys):
        base = ["primes", "--n", "8", "--density", "0.4", "--seed", "2"]
        _, fast, _ = run_cli(base, capsys)
        code, plain, _ = run_cli([*base, "--unroll", "off"], capsys)
        assert code == 0 and plain == fast

    def test_split_override_identical(self, capsys):
        base = ["primes", "--n", "8", "--density", "0.4", "--seed", "2"]
        _, default, _ = run_cli(base, capsys)
        for h in ("1", "3", "8"):
            code, out, _ = run_cli([*base, "--h", h], capsys)
            assert code == 0 and out == default

    def test_wildcard_char(self, capsys):
        code, out, _ = run_cli(
            ["primes", "--n", "3", "--density", "1", "--wildcard-char", "-"], capsys
        )
        assert code == 0 and out == "---\n"

    def test_output_file(self, capsys, tmp_path):
        dest = tmp_path / "primes.txt"
        code, out, _ = run_cli(
            ["primes", "--n", "4", "--density", "0.5", "--output", str(dest)], capsys
        )
        assert code == 0 and out == ""
        assert dest.read_text().endswith("\n")

    def test_stdin_input(self, capsys, monkeypatch):
        import io

        monkeypatch.setattr(sys, "stdin", io.StringIO("0110"))
        code, out, _ = run_cli(["primes", "--input", "-", "--format", "bits"], capsys)
        assert code == 0
        assert out.splitlines() == ["10", "01"]

    def test_stdin_needs_format(self, capsys, monkeypatch):
        import io

        monkeypatch.setattr(sys, "stdin", io.StringIO("0110"))
        code, _, err = run_cli(["primes", "--input", "-"], capsys)
        assert code == 1 and "--format" in err


class TestExitCodes:
    def test_parse_error_is_1(self, capsys, tmp_path):
        bad = tmp_path / "bad.bits"
        bad.write_text("01x1")
        code, _, err = run_cli(["primes", "--input", str(bad)], capsys)
        assert code == 1 and "line 1" in err

    def test_missing_file_is_1(self, capsys):
        code, _, _ = run_cli(["primes", "--input", "/nonexistent.bits"], capsys)
        assert code == 1

    def test_usage_error_is_1(self, capsys):
        code, _, _ = run_cli(["primes", "--algo", "quantum", "--n", "3", "--density", "1"], capsys)
        assert code == 1
        code, _, _ = run_cli(["unknown-subcommand"], capsys)
        assert code == 1

    def test_missing_input_spec_is_1(self, capsys):
        code, _, err = run_cli(["primes"], capsys)
        assert code == 1 and "--input" in err

    def test_resource_limit_is_2(self, capsys):
        code, _, err = run_cli(
            ["primes", "--n", "14", "--density", "0.5", "--mem-cap", "1000"], capsys
        )
        assert code == 2 and "bytes" in err

    def test_oracle_guard_is_1(self, capsys):
        code, _, _ = run_cli(
            ["primes", "--algo", "oracle", "--n", "13", "--density", "0.5"], capsys
        )
        assert code == 1


class TestVerify:
    def test_agreement_exit_0(self, capsys):
        code, out, _ = run_cli(
            ["verify", "--n", "8", "--density", "0.5", "--seed", "3",
             "--algo", "dense,sparse,oracle"],
            capsys,
        )
        assert code == 0
        assert out.startswith("OK:") and "agree" in out

    def test_default_engine_pair(self, capsys):
        code, out, _ = run_cli(["verify", "--n", "10", "--density", "0.3"], capsys)
        assert code == 0 and "dense, sparse" in out

    def test_corruption_hook_exit_3(self, capsys, monkeypatch):
        monkeypatch.setenv("IMPLICANTS_VERIFY_CORRUPT", "sparse")
        code, _, err = run_cli(["verify", "--n", "6", "--density", "0.5"], capsys)
        assert code == 3
        assert "MISMATCH" in err and "only in" in err

    def test_single_engine_rejected(self, capsys):
        code, _, _ = run_cli(["verify", "--n", "4", "--density", "0.5", "--algo", "dense"], capsys)
        assert code == 1

    def test_fifty_random_tables_agree(self, capsys):
        densities = ["0.05", "0.2", "0.35", "0.5", "0.6"]
        for i in range(50):
            code, out, err = run_cli(
                ["verify", "--n", str(4 + i % 11), "--density", densities[i % 5],
                 "--seed", str(i), "--algo", "dense,sparse"],
                capsys,
            )
            assert code == 0, f"iteration {i}: {err}"
            assert out.startswith("OK:")


class TestBench:
    def test_jsonl_output(self, capsys, tmp_path):
        dest = tmp_path / "runs.jsonl"
        code, out, _ = run_cli(
            ["bench", "--algo", "dense,sparse", "--n", "6..8", "--density",
             "0.25,0.75", "--seed", "1", "--reps", "2", "--output", str(dest)],
            capsys,
        )
        assert code == 0
        rows = [json.loads(line) for line in dest.read_text().splitlines()]
        assert len(rows) == 2 * 3 * 2
        assert {r["engine"] for r in rows} == {"dense", "sparse"}
        assert {r["n"] for r in rows} == {6, 7, 8}
        # dense and sparse must report identical prime counts per input
        by_key = {}
        for r in rows:
            by_key.setdefault((r["n"], r["density"]), set()).add(r["prime_count"])
        assert all(len(v) == 1 for v in by_key.values())
        # human table on stdout
        assert "engine" in out and "seconds" in out

    def test_stdout_jsonl(self, capsys):
        code, out, _ = run_cli(
            ["bench", "--n", "5", "--density", "0.5", "--output", "-"], capsys
        )
        assert code == 0
        row = json.loads(out.splitlines()[0])
        assert row["engine"] == "dense" and row["n"] == 5

    def test_failure_rows_exit_2(self, capsys):
        code, out, _ = run_cli(
            ["bench", "--n", "12,14", "--density", "0.5", "--mem-cap", "1000",
             "--output", "-"],
            capsys,
        )
        assert code == 2
        rows = [json.loads(line) for line in out.splitlines() if line.startswith("{")]
        assert all("error" in r for r in rows)

    def test_bad_sweep_exit_1(self, capsys):
        code, _, _ = run_cli(["bench", "--n", "8..x"], capsys)
        assert code == 1
        code, _, _ = run_cli(["bench", "--n", "9..7"], capsys)
        assert code == 1


class TestGen:
    def test_roundtrip_through_primes(self, capsys, tmp_path):
        path = tmp_path / "f.pla"
        code, _, _ = run_cli(
            ["gen", "--n", "7", "--density", "0.5", "--seed", "11", "--output", str(path)],
            capsys,
        )
        assert code == 0
        code, from_file, _ = run_cli(["primes", "--input", str(path)], capsys)
        assert code == 0
        code, generated, _ = run_cli(
            ["primes", "--n", "7", "--density", "0.5", "--seed", "11"], capsys
        )
        assert code == 0 and from_file == generated

    def test_stdout_default_bits(self, capsys):
        code, out, _ = run_cli(["gen", "--n", "4", "--density", "0.5", "--seed", "1"], capsys)
        assert code == 0
        assert set(out.strip()) <= {"0", "1"}
        assert len("".join(out.split())) == 16

    def test_matches_library(self, capsys):
        code, out, _ = run_cli(
            ["gen", "--n", "6", "--density", "0.3", "--seed", "9", "--format", "hex"], capsys
        )
        assert code == 0
        assert out == write_table(random_function(6, 0.3, 9), "hex")

    def test_exact_flag(self, capsys):
        code, out, _ = run_cli(
            ["gen", "--n", "6", "--density", "0.5", "--exact"], capsys
        )
        assert code == 0
        assert "".join(out.split()).count("1") == 32

    def test_full_density_all_ones(self, capsys, tmp_path):
        path = tmp_path / "const1.bits"
        code, _, _ = run_cli(
            ["gen", "--n", "4", "--density", "1.0", "--output", str(path)], capsys
        )
        assert code == 0
        assert path.read_text() == "1" * 16 + "\n"


class TestConsoleScript:
    def test_installed_entry_point(self):
        proc = subprocess.run(
            ["implicants", "primes", "--n", "3", "--density", "1"],
            capture_output=True, text=True,
        )
        assert proc.returncode == 0
        assert proc.stdout == "***\n"

    def test_help_exits_zero(self):
        proc = subprocess.run(
            ["implicants", "--help"], capture_output=True, text=True
        )
        assert proc.returncode == 0
        for sub in ("primes", "verify", "bench", "gen"):
            assert sub in proc.stdout
