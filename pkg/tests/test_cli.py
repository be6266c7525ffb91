"""Command-line interface, run in-process through main(argv)."""

import json

import pytest

from fptopos.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def run_json(capsys, *argv):
    code, out = run(capsys, *argv, "--format", "json")
    return code, json.loads(out)


def test_catalog(capsys):
    code, rep = run_json(capsys, "catalog")
    assert code == 0
    assert "refgraph" in rep["details"]["catalog"]
    assert len(rep["details"]["catalog"]) == 5


def test_subc_counts_terminal_of_two_discrete(capsys):
    code, rep = run_json(capsys, "subc", "--base", "two-discrete",
                         "--object", "builtin:1")
    assert code == 0
    assert rep["details"]["count"] == 4


def test_check_ns_refgraph_holds(capsys):
    code, rep = run_json(capsys, "check-ns", "--base", "refgraph")
    assert code == 0 and rep["verdict"] == "holds"


def test_check_ns_graph_fails_with_edge_representable(capsys):
    code, rep = run_json(capsys, "check-ns", "--base", "graph")
    assert code == 1 and rep["verdict"] == "fails"
    assert "y(E)" in rep["witnesses"][0]["all_failing"]


def test_pi_and_connected_on_builtin(capsys):
    code, rep = run_json(capsys, "pi", "--object", "P2")
    assert code == 0
    q = rep["details"]["quotient"]
    assert {c: len(v) for c, v in q["sets"].items()} == {"V": 1, "E": 1}
    code, rep = run_json(capsys, "connected", "--object", "P2")
    assert code == 0 and rep["verdict"] == "connected"
    code, rep = run_json(capsys, "connected", "--object", "2")
    assert code == 1 and rep["verdict"] == "not-connected"


def test_decidable_subcommand(capsys):
    code, _ = run_json(capsys, "decidable", "--object", "D2")
    assert code == 0
    code, _ = run_json(capsys, "decidable", "--object", "P2")
    assert code == 1


def test_pneumo_both_maps(capsys):
    for mp in ("pi", "separated"):
        code, rep = run_json(capsys, "pneumo", "--object", "L",
                             "--map", mp)
        assert code == 0 and rep["verdict"] == "pneumoconnected-fibers"


def test_check_dqo_object_and_bound(capsys):
    code, rep = run_json(capsys, "check-dqo", "--base", "graph",
                         "--object", "A1")
    assert code == 1 and rep["verdict"] == "fails"
    code, rep = run_json(capsys, "check-dqo", "--base", "refgraph",
                         "--bound", "V=1,E=2")
    assert code == 0 and rep["verdict"] == "holds-at-bound"


def test_check_dso_bound(capsys):
    code, rep = run_json(capsys, "check-dso", "--base", "two-discrete",
                         "--bound", "1")
    assert code == 1 and rep["verdict"] == "fails"


def test_dec_topos_agreement_reported(capsys):
    code, rep = run_json(capsys, "dec-topos", "--base", "sierpinski",
                         "--bound", "2")
    assert code == 0  # the two sides agree (both false)
    assert rep["verdict"] == "agree"
    assert rep["details"]["monos_complemented"] is False
    assert rep["details"]["pi_epic_on_dense"] is False
    assert rep["witnesses"]


def test_precohesion_refgraph(capsys):
    code, rep = run_json(capsys, "precohesion", "--bound", "V=1,E=2")
    assert code == 0 and rep["verdict"] == "precohesive"
    for k in ("fully_faithful", "products_preserved", "counit_monic",
              "nullstellensatz"):
        assert rep["details"][k] is True


def test_verify_lemma_and_props(capsys):
    code, _rep = run_json(capsys, "verify", "lemma", "--bound", "V=1,E=2")
    assert code == 0
    code, rep = run_json(capsys, "verify", "props", "--bound", "V=1,E=2",
                         "--props", "pi-structure,connected-iff-pi-one")
    assert code == 0
    assert len(rep["details"]["properties"]) == 2


def test_verify_theorem_c(capsys):
    code, rep = run_json(capsys, "verify", "C", "--bound", "V=1,E=2")
    assert code == 0 and rep["verdict"] == "holds"
    assert rep["details"]["axioms_hold"] and rep["details"]["precohesive"]
    assert rep["details"]["checks"]["dso_part_nn_dense"] is True


def test_verify_theorem_c_prerequisite_failure(capsys):
    code, rep = run_json(capsys, "verify", "C", "--base", "graph",
                         "--bound", "2")
    assert code == 1 and rep["verdict"] == "prerequisite-failed"
    assert "NS" in rep["details"]["failed_prereq"]


def test_search_counterexample_exit_codes(capsys):
    code, rep = run_json(capsys, "search-counterexample", "--base",
                         "graph", "--bound", "V=2,E=1",
                         "--property", "dqo-uniqueness")
    assert code == 1 and rep["verdict"] == "witness" and rep["witnesses"]
    code, rep = run_json(capsys, "search-counterexample",
                         "--bound", "V=1,E=2",
                         "--property", "dqo-uniqueness")
    assert code == 0 and rep["verdict"] == "none"


def test_enumerate(capsys):
    code, rep = run_json(capsys, "enumerate", "--bound", "V=1,E=2")
    assert code == 0 and rep["details"]["count"] == 3
    code, rep = run_json(capsys, "enumerate", "--bound", "V=1,E=2",
                         "--list")
    assert len(rep["details"]["presheaves"]) == 3


def test_force_formula(capsys):
    code, rep = run_json(capsys, "force",
                         "--formula", "all x : P2 . x = x",
                         "--let", "P2=P2")
    assert code == 0 and rep["verdict"] == "valid"
    code, rep = run_json(capsys, "force",
                         "--formula",
                         "all x : L . all y : L . x = y or not x = y",
                         "--let", "L=L")
    # the stage-minimal countermodel already appears at V, where the
    # quantifier reaches the loop "e" along sigma
    assert code == 1 and rep["witnesses"][0]["stage"] in ("V", "E")


def test_file_inputs(capsys, tmp_path):
    code, rep = run_json(capsys, "pi", "--base", "samples/refgraph.cat",
                         "--object", "samples/p2.psh")
    assert code == 0
    q = rep["details"]["quotient"]
    assert {c: len(v) for c, v in q["sets"].items()} == {"V": 1, "E": 1}


def test_errors_exit_two(capsys):
    assert main(["pi", "--object", "no-such-file.psh"]) == 2
    _ = capsys.readouterr()
    assert main(["check-dqo", "--bound", "wat"]) == 2
    _ = capsys.readouterr()
    assert main(["pi", "--object", "builtin:nope"]) == 2


def test_json_reports_are_parallelism_invariant(capsys):
    outs = []
    for jobs in ("1", "4"):
        code, out = run(capsys, "verify", "props", "--bound", "V=1,E=2",
                        "--jobs", jobs, "--format", "json")
        assert code == 0
        outs.append(out)
    assert outs[0] == outs[1]


def test_text_format_has_one_verdict_line(capsys):
    code, out = run(capsys, "check-ns", "--base", "refgraph")
    assert code == 0
    assert any(line.startswith("verdict") for line in out.splitlines())
