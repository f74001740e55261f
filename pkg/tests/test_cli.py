import json
from pathlib import Path

import jsonschema
import pytest

from sos_lab.cli import SCHEMA_DIR, run, schemas

ROOT = Path(__file__).resolve().parents[1]
DATA = ROOT / "data"

SCHEMA_FOR = {"cayley-bacharach": "cayley_bacharach", "hilbert-case": "hilbert_case"}


def invoke(capsys, *argv):
    code = run([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def validated(out):
    doc = json.loads(out)
    name = SCHEMA_FOR.get(doc["command"], doc["command"])
    jsonschema.validate(doc, schemas()[name])
    return doc


CASES = [
    (["certify", "forms://motzkin"], 2),
    (["certify", "forms://clr"], 2),
    (["certify", DATA / "quartic-demo.json", "--no-prune", "--objective", "max_trace"], 0),
    (["certify", DATA / "ex11-1.json"], 0),
    (["certify", DATA / "c4-infeasible.json"], 2),
    (["complete", DATA / "ex11-1.json", "--strategy", "chordal"], 0),
    (["complete", DATA / "ex11-2.json"], 2),
    (["complete", DATA / "c4-infeasible.json", "--strategy", "sdp"], 2),
    (["chordal", DATA / "ex12-graph.json"], 0),
    (["chordal", DATA / "c5-graph.json"], 0),
    (["newton", "forms://motzkin"], 0),
    (["hankel", "1", "2", "4", "8", "16"], 0),
    (["hankel", "1", "0", "1", "0", "1"], 0),
    (["cayley-bacharach", "--seed", "4"], 0),
    (["qp", "--n", "2", "--d", "3"], 0),
    (["hilbert-case", "--n", "3", "--degree", "6"], 0),
    (["forms"], 0),
]


@pytest.mark.parametrize("argv,code", CASES, ids=[" ".join(str(a).split("/")[-1] for a in c[0]) for c in CASES])
def test_commands_validate(capsys, argv, code):
    got, out, err = invoke(capsys, *argv, "--compact")
    assert got == code, err
    validated(out)


def test_reference_results_through_cli(capsys):
    _, out, _ = invoke(capsys, "qp", "--n", "2", "--d", "3")
    assert json.loads(out)["result"]["qp"] == 6
    _, out, _ = invoke(capsys, "complete", DATA / "ex11-1.json", "--strategy", "chordal")
    res = json.loads(out)["result"]
    assert res["status"] == "Completed" and res["rank"] <= 3
    _, out, _ = invoke(capsys, "certify", "forms://motzkin")
    res = json.loads(out)["result"]
    assert res["status"] == "NotSOS" and res["ell_p"] < -1e-6


def test_mod_graph_flag(tmp_path, capsys):
    # x0^2 + x1^2 + 2 x0 x1 on a single edge: (x0 + x1)^2
    poly = {"nvars": 2, "terms": [{"exps": [2, 0], "num": 1}, {"exps": [0, 2], "num": 1}, {"exps": [1, 1], "num": 2}]}
    (tmp_path / "q.json").write_text(json.dumps(poly))
    (tmp_path / "g.json").write_text(json.dumps({"n": 2, "edges": [[0, 1]]}))
    code, out, _ = invoke(capsys, "certify", tmp_path / "q.json", "--mod-graph", tmp_path / "g.json")
    assert code == 0 and validated(out)["result"]["rank"] == 1


def test_sdp_command(tmp_path, capsys):
    prob = {"n": 1, "mode": "feasibility", "constraints": [{"A": [[1.0]], "b": -1.0}]}
    jsonschema.validate(prob, schemas()["sdp_problem"])
    (tmp_path / "p.json").write_text(json.dumps(prob))
    code, out, _ = invoke(capsys, "sdp", tmp_path / "p.json")
    assert code == 2 and validated(out)["result"]["status"] == "Infeasible"


def test_deterministic_output(capsys):
    for argv in (["cayley-bacharach", "--seed", "11"], ["certify", "forms://clr"], ["qp", "--n", "2", "--d", "2", "--seed", "5"]):
        _, a, _ = invoke(capsys, *argv)
        _, b, _ = invoke(capsys, *argv)
        assert a == b


def test_errors_are_structured(capsys):
    for argv in (["certify", "missing.json"], ["certify", "forms://nope"], ["frobnicate"],
                 ["complete", DATA / "c4-infeasible.json", "--strategy", "chordal"], ["hilbert-case", "--n", "3", "--degree", "5"]):
        code, out, err = invoke(capsys, *argv)
        assert code == 1 and out == ""
        jsonschema.validate(json.loads(err), schemas()["error"])


def test_meta_flags(capsys):
    code, out, _ = invoke(capsys, "--version")
    assert code == 0
    jsonschema.validate(json.loads(out), schemas()["version"])
    code, out, _ = invoke(capsys, "--schemas")
    assert code == 0 and set(json.loads(out)) == set(schemas())


def test_output_file(tmp_path, capsys):
    target = tmp_path / "out.json"
    code, out, _ = invoke(capsys, "forms", "--output", target)
    assert code == 0 and out == "" and json.loads(target.read_text())["command"] == "forms"


def test_input_documents_validate():
    for path, name in [("ex11-1.json", "partial_matrix"), ("ex11-2.json", "partial_matrix"),
                       ("c4-infeasible.json", "partial_matrix"), ("ex12-graph.json", "graph"),
                       ("c5-graph.json", "graph"), ("quartic-demo.json", "polynomial")]:
        jsonschema.validate(json.loads((DATA / path).read_text()), schemas()[name])


def test_docs_schemas_match_package():
    docs = ROOT / "docs" / "schemas"
    shipped = sorted(p.name for p in SCHEMA_DIR.glob("*.json"))
    assert shipped == sorted(p.name for p in docs.glob("*.json"))
    for name in shipped:
        assert json.loads((docs / name).read_text()) == json.loads((SCHEMA_DIR / name).read_text())
    for sch in schemas().values():
        jsonschema.Draft202012Validator.check_schema(sch)
