import json
from importlib import resources

import pytest

from torusint import cli
from torusint.catalog import EQ1, POTENTIALS


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr().out
    return code, out


def structured(capsys, *argv):
    code, out = run(capsys, *argv, "--format", "structured")
    return code, json.loads(out)


@pytest.mark.parametrize("name", cli.BUNDLED)
def test_bundled_documents_round_trip(name, tmp_path):
    text = resources.files("torusint").joinpath(f"data/{name}.json").read_text()
    V = cli.read_document(text)
    assert cli.write_document(V) == text
    assert V == (EQ1 if name == "EQ1" else POTENTIALS[name])
    path = tmp_path / "copy.json"
    path.write_text(text)
    assert cli.load_potential(str(path)) == V


def test_screen_exit_codes(capsys):
    code, doc = structured(capsys, "screen", "H1")
    assert code == 0 and doc["passed"] and doc["failed_conditions"] == []
    assert set(doc["verdicts"]) == {"1", "2", "3", "4", "5"}
    assert all(e["angle"] == "2pi/3" for e in doc["edges"])
    code, doc = structured(capsys, "screen", "EQ1")
    assert code == 2 and doc["failed_conditions"] == [4]
    assert doc["witnesses"] and all(w["condition"] == 4 for w in doc["witnesses"])


def test_human_output(capsys):
    code, out = run(capsys, "screen", "H8")
    assert code == 0 and out.strip()


def test_missing_and_malformed_files(capsys, tmp_path):
    assert run(capsys, "screen", str(tmp_path / "nope.json"))[0] == 1
    bad = tmp_path / "bad.json"
    for text in ["{", '{"dimension": 2}', '{"dimension": 2, "radicand": 3, "parameters": [], "terms": [{"frequency": [[1, 1, 0, 1]], "coefficient": "1"}]}']:
        bad.write_text(text)
        assert run(capsys, "screen", str(bad))[0] == 1


def test_bad_arguments(capsys):
    assert cli.main(["screen"]) == 1
    assert cli.main(["frobnicate"]) == 1


def test_limit(capsys, tmp_path):
    code, doc = structured(capsys, "limit", "H1", "1,0")
    assert code == 0
    assert doc["dimension"] == 2 and len(doc["terms"]) == 1
    assert cli.document_to_potential(doc).support() == {k for k in POTENTIALS["H1"].support() if k[0].sign() > 0}
    assert run(capsys, "limit", "H1", "0,0")[0] == 1
    assert run(capsys, "limit", "H1", "1,2,3")[0] == 1


def test_verify(capsys):
    code, doc = structured(capsys, "verify", "H6", "--seed", "3")
    assert code == 0 and doc["passed"] and doc["ranks"] == [3, 3, 3] and doc["seed"] == 3
    assert run(capsys, "verify", "H99")[0] == 1


def test_search(capsys, tmp_path):
    from torusint.potential import Potential

    path = tmp_path / "exp.json"
    path.write_text(cli.write_document(Potential(2, {(2, 0): 1})))
    code, doc = structured(capsys, "search", str(path), "--degree", "1")
    assert code == 0 and doc["dimension"] == 2
    assert sorted(doc["basis"]) == ["1", "p2"]


def test_tessellate(capsys):
    code, doc = structured(capsys, "tessellate", "2")
    assert code == 0 and len(doc["coverings"]) == 6
    code, doc = structured(capsys, "tessellate", "3")
    assert code == 0
    assert len(doc["candidates"]) == 9 and len(doc["tessellations"]) == 7
    assert sorted(doc["rejected"]) == ["[P1,P1,P1,P1,P5,P5]", "[P1,P1,P1,P3,P3,P5]"]
    assert run(capsys, "tessellate", "4")[0] == 1


def _expint_file(tmp_path, **kw):
    doc = {"variables": ["X"], "rates": ["1"], "P": "2*X**2", "factors": [["X**2 + 1", "-2"]]}
    doc.update(kw)
    path = tmp_path / "f.json"
    path.write_text(json.dumps(doc))
    return str(path)


def test_expint(capsys, tmp_path):
    code, doc = structured(capsys, "expint", _expint_file(tmp_path))
    assert code == 0 and doc["result"] == "integral" and doc["integral"] == "-1/(X**2 + 1)"
    code, doc = structured(capsys, "expint", _expint_file(tmp_path, factors=[["X + 1", "-1"]]))
    assert code == 2 and doc["result"] == "none" and doc["certified"]
    code, doc = structured(capsys, "expint", _expint_file(tmp_path, P="1", factors=[["X + 1", "-2"]]))
    assert code == 2 and doc["result"] == "inconclusive"
    code, doc = structured(capsys, "expint", _expint_file(tmp_path, P="1", factors=[], betas=["gamma"], assumptions={"gamma": [1]}))
    assert code == 0 and doc["integral"] == "X**gamma/gamma"
    assert run(capsys, "expint", _expint_file(tmp_path, variables=[]))[0] == 1


def test_simulate(capsys, tmp_path):
    traj = tmp_path / "t.jsonl"
    code, doc = structured(
        capsys, "simulate", "H7", "--param", "alpha=1", "--p", "0.3,-0.2,0.1", "--duration", "1", "--sample-every", "100",
        "--trajectory", str(traj),
    )
    assert code == 0 and doc["passed"] and doc["catalog_id"] == "H7"
    assert len(doc["drift"]) == 3 and max(doc["drift"]) < 1e-6
    lines = traj.read_text().splitlines()
    assert len(lines) == doc["samples"] == 11
    assert json.loads(lines[-1])["t"] == pytest.approx(1.0)
    assert run(capsys, "simulate", "H7")[0] == 1  # alpha missing
    assert run(capsys, "simulate", "H6", "--p", "1,2")[0] == 1
