import json

import pytest

from tgraphs.cli import main
from tgraphs.graph import cycle_graph, format_graph_text, path_graph, star_graph
from tgraphs.harness import random_relabel, random_t_graph
from tgraphs.selftest import ANALYZE_FIXTURE, run_selftest


def write_graph(tmp_path, name, g):
    p = tmp_path / name
    p.write_text(format_graph_text(g))
    return str(p)


class TestIso:
    def test_identical_files(self, tmp_path, capsys):
        p = write_graph(tmp_path, "g.graph", star_graph(3))
        assert main(["iso", p, p, "--d-max", "3"]) == 0

    def test_non_chordal_is_status_2(self, tmp_path):
        p1 = write_graph(tmp_path, "p4.graph", path_graph(4))
        p2 = write_graph(tmp_path, "c4.graph", cycle_graph(4))
        assert main(["iso", p1, p2, "--d-max", "3"]) == 2

    def test_not_isomorphic_is_status_1(self, tmp_path):
        p1 = write_graph(tmp_path, "p4.graph", path_graph(4))
        p2 = write_graph(tmp_path, "claw.graph", star_graph(3))
        assert main(["iso", p1, p2, "--d-max", "3"]) == 1

    def test_relabeled_pair_with_witness_json(self, tmp_path, capsys):
        g, _ = random_t_graph(3, 8, 5)
        h, _ = random_relabel(g, 5)
        p1 = write_graph(tmp_path, "a.graph", g)
        p2 = write_graph(tmp_path, "b.graph", h)
        assert main(["iso", p1, p2, "--d-max", "3", "--json"]) == 0
        data = json.loads(capsys.readouterr().out)
        assert data["verdict"] == "isomorphic"
        witness = data["witness"]
        for u, v in g.edges:
            assert h.has_edge(witness[u], witness[v])

    def test_missing_file_is_status_3(self, tmp_path):
        p1 = write_graph(tmp_path, "a.graph", path_graph(3))
        assert main(["iso", p1, str(tmp_path / "missing.graph"), "--d-max", "2"]) == 3

    def test_bad_format_is_status_3(self, tmp_path):
        bad = tmp_path / "bad.graph"
        bad.write_text("not a graph\n")
        p1 = write_graph(tmp_path, "a.graph", path_graph(3))
        assert main(["iso", str(bad), p1, "--d-max", "2"]) == 3


class TestDecompose:
    def test_interval_single_level(self, tmp_path, capsys):
        p = write_graph(tmp_path, "p6.graph", path_graph(6))
        assert main(["decompose", p, "--d", "2"]) == 0
        data = json.loads(capsys.readouterr().out)
        assert len(data["levels"]) == 1

    def test_subdivided_claw_two_levels(self, tmp_path, capsys):
        from tgraphs.graph import Graph

        g = Graph(7, [(0, 1), (1, 2), (0, 3), (3, 4), (0, 5), (5, 6)])
        p = write_graph(tmp_path, "sc.graph", g)
        assert main(["decompose", p, "--d", "3"]) == 0
        data = json.loads(capsys.readouterr().out)
        assert len(data["levels"]) == 2

    def test_non_chordal_reported(self, tmp_path, capsys):
        p = write_graph(tmp_path, "c4.graph", cycle_graph(4))
        assert main(["decompose", p, "--d", "3"]) == 2
        data = json.loads(capsys.readouterr().out)
        assert data["error"] == "not_chordal"


class TestGen:
    def test_deterministic_and_verified(self, tmp_path, capsys):
        out1 = str(tmp_path / "one")
        out2 = str(tmp_path / "two")
        assert main(["gen", "--d", "3", "--n", "9", "--seed", "4", "--out", out1]) == 0
        capsys.readouterr()
        assert main(["gen", "--d", "3", "--n", "9", "--seed", "4", "--out", out2]) == 0
        capsys.readouterr()
        assert (tmp_path / "one.graph").read_text() == (tmp_path / "two.graph").read_text()
        assert (tmp_path / "one.rep.json").read_text() == (tmp_path / "two.rep.json").read_text()

    def test_generated_certificate_verifies(self, tmp_path, capsys):
        from tgraphs.graph import parse_graph_text
        from tgraphs.harness import TRepresentation, verify_t_representation

        out = str(tmp_path / "g")
        assert main(["gen", "--d", "3", "--n", "8", "--seed", "1", "--out", out]) == 0
        capsys.readouterr()
        g = parse_graph_text((tmp_path / "g.graph").read_text())
        rep = TRepresentation.from_json_dict(json.loads((tmp_path / "g.rep.json").read_text()))
        assert verify_t_representation(g, rep)


class TestAnalyze:
    def test_p4_report(self, tmp_path, capsys):
        p = write_graph(tmp_path, "p4.graph", path_graph(4))
        assert main(["analyze", p, "--json"]) == 0
        data = json.loads(capsys.readouterr().out)
        assert data["chordal"] is True
        assert len(data["leaf_cliques"]) == 2

    def test_k4_report(self, tmp_path, capsys):
        from tgraphs.graph import complete_graph

        p = write_graph(tmp_path, "k4.graph", complete_graph(4))
        assert main(["analyze", p, "--json"]) == 0
        data = json.loads(capsys.readouterr().out)
        assert len(data["maximal_cliques"]) == 1
        assert data["minimal_separators"] == []

    def test_matches_library(self, tmp_path, capsys):
        from tgraphs.chordal import maximal_cliques
        from tgraphs.graph import parse_graph_text

        g, _ = random_t_graph(3, 9, 17)
        if not g.is_connected():
            pytest.skip("connected instance expected")
        p = write_graph(tmp_path, "r.graph", g)
        assert main(["analyze", p, "--json"]) == 0
        data = json.loads(capsys.readouterr().out)
        assert data["maximal_cliques"] == [list(c) for c in maximal_cliques(g)]


class TestSelftest:
    def test_quick_profile_passes(self, capsys):
        assert main(["selftest", "--profile", "quick", "--json"]) == 0
        data = json.loads(capsys.readouterr().out)
        assert data["failed"] == 0
        assert {c["name"] for c in data["checks"]} >= {
            "fixture-analysis",
            "oracle-agreement",
            "canonicity",
            "projection-equivalence",
        }

    def test_injected_fault_fails(self):
        text, expected = ANALYZE_FIXTURE
        # rewire one edge: the subdivided claw becomes a path, which has a
        # different separator count, so the recomputed summary disagrees
        corrupted = (text.replace("0 5", "4 5"), expected)
        results = run_selftest("quick", fixtures=corrupted)
        by_name = {r.name: r for r in results}
        assert not by_name["fixture-analysis"].ok

    def test_summary_schema_stable(self, capsys):
        assert main(["selftest", "--profile", "quick", "--json"]) == 0
        data = json.loads(capsys.readouterr().out)
        assert set(data) == {"profile", "passed", "failed", "checks"}
        for check in data["checks"]:
            assert set(check) == {"name", "ok", "detail"}
