import csv
import io
import json
from fractions import Fraction as F

import pytest

from littlestone.cli import main
from littlestone.classes import universal_class
from littlestone.experts import capacity_D


def write_class_file(tmp_path, w, name="class.json"):
    doc = {
        "domain": list(w.domain.points),
        "hypotheses": [
            {"name": m.name, "labels": list(m.labels), "budget": m.budget}
            for m in w.members
        ],
    }
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


@pytest.fixture
def u2k2_file(tmp_path):
    return write_class_file(tmp_path, universal_class(2, 2))


class TestDim:
    def test_randomized(self, u2k2_file, capsys):
        assert main(["dim", u2k2_file, "--mode", "rand"]) == 0
        out = capsys.readouterr().out
        assert "47/16 (2.9375)" in out
        assert "states visited" in out

    def test_deterministic(self, u2k2_file, capsys):
        assert main(["dim", u2k2_file, "--mode", "det"]) == 0
        assert "L = 5" in capsys.readouterr().out

    def test_empty_class(self, tmp_path, capsys):
        path = tmp_path / "empty.json"
        path.write_text('{"domain": ["x"], "hypotheses": []}')
        assert main(["dim", str(path)]) == 0
        assert "EMPTY (-1)" in capsys.readouterr().out

    def test_bounded(self, tmp_path, capsys):
        path = write_class_file(tmp_path, universal_class(2, 3))
        assert main(["dim", path, "--horizon", "4"]) == 0
        assert "2 (2)" in capsys.readouterr().out

    def test_json_record(self, u2k2_file, capsys):
        assert main(["dim", u2k2_file, "--json"]) == 0
        record = json.loads(capsys.readouterr().out)
        assert record["value"] == "47/16"
        assert record["decimal"] == 2.9375
        assert record["states_visited"] > 0

    def test_missing_file_is_precondition_error(self, capsys):
        assert main(["dim", "/nonexistent/f.json"]) == 2

    def test_malformed_file(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        path.write_text('{"domain": ["x"]}')
        assert main(["dim", str(path)]) == 2
        assert "hypotheses" in capsys.readouterr().err

    def test_budget_exhaustion_exit_code(self, tmp_path):
        path = write_class_file(tmp_path, universal_class(3, 2))
        assert main(["--budget-states", "2", "dim", path]) == 3


class TestExperts:
    def test_dim_closed_form(self, capsys):
        assert main(["experts", "--n", "2", "--k", "3", "--what", "dim"]) == 0
        assert "131/32 (4.09375)" in capsys.readouterr().out

    def test_single_expert(self, capsys):
        assert main(["experts", "--n", "1", "--k", "7", "--what", "dim"]) == 0
        assert capsys.readouterr().out.startswith("7 ")

    def test_capacity(self, capsys):
        assert main(["experts", "--n", "4", "--k", "0", "--what", "D"]) == 0
        assert capsys.readouterr().out.strip() == "2"

    def test_dstar_rejects_zero_mistakes(self, capsys):
        assert main(["experts", "--n", "4", "--k", "0", "--what", "dstar"]) == 2

    def test_up_with_beta(self, capsys):
        assert main(["experts", "--n", "2", "--k", "0", "--what", "up", "--beta", "1/2"]) == 0
        assert capsys.readouterr().out.startswith("2.40942")

    def test_bounded_dim(self, capsys):
        assert main(["experts", "--n", "2", "--k", "3", "--what", "dim", "--horizon", "4"]) == 0
        assert capsys.readouterr().out.startswith("2 ")


class TestTables:
    def test_proper(self, capsys):
        assert main(["tables", "--kind", "proper", "--max-n", "4"]) == 0
        rows = list(csv.reader(io.StringIO(capsys.readouterr().out)))
        assert rows[0] == ["n", "exact", "decimal"]
        assert [r[1] for r in rows[1:]] == ["1/2", "5/6", "13/12"]

    def test_mstar2(self, capsys):
        assert main(["tables", "--kind", "mstar2", "--max-k", "2"]) == 0
        rows = list(csv.reader(io.StringIO(capsys.readouterr().out)))
        assert [r[1] for r in rows[1:]] == ["1/2", "7/4", "47/16"]

    def test_dnk_capacity_column_agrees_with_direct(self, capsys):
        assert main(["tables", "--kind", "dnk", "--n-list", "2,4", "--max-k", "2"]) == 0
        rows = list(csv.reader(io.StringIO(capsys.readouterr().out)))
        header = rows[0]
        assert header == [
            "n", "k", "D", "L_k", "RL_k_num", "RL_k_den", "mstar2", "d_star", "up_min",
        ]
        for row in rows[1:]:
            n, k = int(row[0]), int(row[1])
            assert int(row[2]) == capacity_D(n, k)
        two = {int(r[1]): r for r in rows[1:] if r[0] == "2"}
        assert F(int(two[2][4]), int(two[2][5])) == F(47, 16)
        assert two[2][6] == "47/16"

    def test_out_file(self, tmp_path):
        out = tmp_path / "t.csv"
        assert main(["--out", str(out), "tables", "--kind", "proper", "--max-n", "3"]) == 0
        assert "5/6" in out.read_text()


class TestPlay:
    def test_randsoa_threshold(self, capsys):
        rc = main(
            ["play", "--n", "2", "--k", "0", "--learner", "randsoa",
             "--adversary", "threshold"]
        )
        assert rc == 0
        assert "total = 1/2 (0.5)" in capsys.readouterr().out

    def test_ftl_proper(self, capsys):
        rc = main(["play", "--n", "3", "--learner", "ftl", "--adversary", "proper"])
        assert rc == 0
        assert "5/6" in capsys.readouterr().out

    def test_branch_trials_mean(self, capsys):
        # slack 1/64 keeps the adversary tree within 1/64 of the dimension,
        # leaving room for sampling noise inside the 0.05 window
        rc = main(
            ["play", "--n", "2", "--k", "1", "--learner", "constant:1/2",
             "--adversary", "branch", "--trials", "10000", "--slack", "1/64"]
        )
        assert rc == 0
        out = capsys.readouterr().out
        mean_line = next(line for line in out.splitlines() if line.startswith("mean"))
        value = float(mean_line.split("(")[1].rstrip(")"))
        assert abs(value - 1.75) < 0.05

    def test_transcripts_written(self, tmp_path, capsys):
        out = tmp_path / "games.jsonl"
        rc = main(
            ["--out", str(out), "play", "--n", "2", "--k", "0", "--learner",
             "constant:0", "--adversary", "threshold"]
        )
        assert rc == 0
        lines = out.read_text().strip().splitlines()
        assert json.loads(lines[0])["round"] == 1
        assert "summary" in json.loads(lines[-1])

    def test_incompatible_selection(self, capsys):
        assert main(["play", "--n", "2", "--learner", "constant:0", "--adversary", "proper"]) == 2


class TestTree:
    def test_extract_then_analyze(self, tmp_path, u2k2_file, capsys):
        out = tmp_path / "tree.json"
        rc = main(["--out", str(out), "tree", "extract", u2k2_file, "--horizon", "4"])
        assert rc == 0
        rc = main(["tree", "analyze", str(out), "--class-file", u2k2_file])
        assert rc == 0
        report = capsys.readouterr().out
        assert "monotone           = True" in report
        assert "quasi-balanced     = True" in report
        assert "shattered by class = True" in report

    def test_analyze_reports_violation(self, tmp_path, capsys):
        from littlestone.trees import LEAF, complete_tree, node, tree_to_json

        lopsided = node("r", complete_tree(4, "a"), LEAF)
        path = tmp_path / "lop.json"
        path.write_text(tree_to_json(lopsided))
        assert main(["tree", "analyze", str(path)]) == 0
        out = capsys.readouterr().out
        assert "monotone           = False" in out
        assert "violation at node ''" in out


class TestCheck:
    def test_concentration_small(self, capsys):
        rc = main(
            ["check", "concentration", "--n", "2", "--k", "1", "--slack", "1/16",
             "--samples", "4000", "--eps", "0.2,0.3"]
        )
        assert rc == 0
        out = capsys.readouterr().out
        assert "PASS" in out and "FAIL" not in out


def test_exact_rendering_round_trips(capsys):
    main(["experts", "--n", "2", "--k", "4", "--what", "dim"])
    token = capsys.readouterr().out.split()[0]
    from littlestone.dimension import Solver
    from littlestone.classes import expert_class

    assert F(token) == Solver().randomized_littlestone(expert_class(2, 4))
