import csv
import json
import subprocess
import sys

import pytest

from wronski_jdt.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--json")
    return code, json.loads(out)


class TestFiber:
    def test_two_rows(self, capsys):
        code, out, _ = run(capsys, "fiber", "--d", "2", "--n", "4", "--beta", "1e3")
        assert code == 0
        assert sum(line.strip().startswith("P") for line in out.splitlines()) == 2

    def test_five_rows(self, capsys):
        code, data = run_json(capsys, "fiber", "--d", "2", "--n", "5", "--beta", "1e3")
        assert code == 0 and data["count"] == 5 and data["schema"] == "wm/1"
        assert len({p["label"] for p in data["points"]}) == 5

    def test_explicit_roots(self, capsys):
        code, data = run_json(capsys, "fiber", "--roots", "1,2j,-3,inf")
        assert code == 0 and data["count"] == 2
        assert all(p["label"] is None for p in data["points"])

    @pytest.mark.parametrize("argv", [["--d", "4", "--n", "4"], ["--d", "0", "--n", "3"], ["--roots", "1,2"]])
    def test_usage_errors(self, capsys, argv):
        assert run(capsys, "fiber", *argv)[0] == 2

    def test_deterministic_json(self, capsys):
        a = run(capsys, "fiber", "--d", "2", "--n", "5", "--json")[1]
        b = run(capsys, "fiber", "--d", "2", "--n", "5", "--json")[1]
        assert a == b


class TestMonodromy:
    def test_skl_swap(self, capsys):
        code, out, _ = run(capsys, "monodromy", "--d", "2", "--n", "4", "--skl", "2", "2")
        assert code == 0 and "(T1 T2)" in out and "MATCH" in out

    def test_skl_identity(self, capsys):
        code, out, _ = run(capsys, "monodromy", "--d", "2", "--n", "4", "--skl", "1", "2")
        assert code == 0 and "id" in out and "MATCH" in out

    def test_rotate(self, capsys):
        code, data = run_json(capsys, "monodromy", "--d", "2", "--n", "5", "--rotate")
        assert code == 0 and data["verdict"] == "MATCH"

    def test_loop_file_with_trace(self, capsys, tmp_path):
        loop = [
            {"t0": 0, "t1": 0.5, "roots": [1e3, 1e6, 1e9, 1e12], "roots_end": [2e3, 5e5, 3e9, 1e12]},
            {"t0": 0.5, "t1": 1, "roots": [2e3, 5e5, 3e9, 1e12], "roots_end": [1e3, 1e6, 1e9, 1e12]},
        ]
        f = tmp_path / "loop.json"
        f.write_text(json.dumps(loop))
        trace = tmp_path / "trace.csv"
        code, out, _ = run(capsys, "monodromy", "--path", str(f), "--trace", str(trace))
        assert code == 0 and "id" in out and "MATCH" in out
        with open(trace) as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["t", "point_label", "chart_id", "residual", "step"]
        assert len(rows) > 2

    def test_missing_file(self, capsys, tmp_path):
        assert run(capsys, "monodromy", "--path", str(tmp_path / "nope.json"))[0] == 2

    def test_bad_k(self, capsys):
        assert run(capsys, "monodromy", "--skl", "9", "2")[0] == 2


class TestLR:
    def test_row(self, capsys):
        code, data = run_json(capsys, "lr", "--d", "2", "--n", "4", "--lam", "2,1", "--mu", "1", "--nu", "2")
        assert code == 0 and data["methods"] == [1, 1, 1]

    def test_size_mismatch(self, capsys):
        code, data = run_json(capsys, "lr", "--lam", "2,1", "--mu", "1", "--nu", "1")
        assert code == 0 and data["methods"] == [0, 0, 0]

    def test_three_by_three(self, capsys):
        code, out, _ = run(capsys, "lr", "--d", "3", "--n", "6", "--lam", "2,2,1", "--mu", "1,1", "--nu", "2,1")
        assert code == 0 and "c = 1" in out

    def test_out_of_bound(self, capsys):
        assert run(capsys, "lr", "--lam", "5", "--mu", "1", "--nu", "2")[0] == 2


class TestVerify:
    def test_worked_example_suite(self, capsys):
        code, data = run_json(capsys, "verify", "paper-example")
        assert code == 0 and data["passed"]
        suite = data["suites"][0]
        assert suite["summary"] == "omega = (6, 1/3, 1)" and all(suite["details"][0].values())

    def test_distance_identity_suite(self, capsys):
        code, out, _ = run(capsys, "verify", "distance-lemma")
        assert code == 0 and out.startswith("PASS")

    def test_geomslide_small(self, capsys):
        code, data = run_json(capsys, "verify", "geomslide", "--d", "2", "--n", "5", "--trials", "3")
        assert code == 0 and data["passed"]

    def test_unknown_suite(self, capsys):
        assert run(capsys, "verify", "nope")[0] == 2

    def test_deterministic(self, capsys):
        a = run(capsys, "verify", "two-roots", "--trials", "50", "--json")[1]
        b = run(capsys, "verify", "two-roots", "--trials", "50", "--json")[1]
        assert a == b


def test_module_entry_point():
    p = subprocess.run([sys.executable, "-m", "wronski_jdt", "lr", "--lam", "2,1", "--mu", "1", "--nu", "1,1"], capture_output=True, text=True)
    assert p.returncode == 0 and "c = 1" in p.stdout


def test_no_command(capsys):
    assert run(capsys)[0] == 2
