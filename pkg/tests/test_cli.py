import csv
import io
import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from strategies import prony_materials

from viscolevy import compose, kelvin_voigt, maxwell, series, spring, stable_material
from viscolevy.cli import main
from viscolevy.specs import SpecError, material_to_spec, parse_document, parse_material


@pytest.fixture
def spec(tmp_path):
    def write(doc, name="m.json"):
        path = tmp_path / name
        text = doc if isinstance(doc, str) else json.dumps({"version": 1, **doc}, indent=2)
        path.write_text(text)
        return str(path)

    return write


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.reader(io.StringIO(text)))


class TestSpecExamples:
    def test_conjugate_maxwell(self, capsys, spec):
        code, out, _ = run(capsys, "conjugate", "--material", spec({"kind": "maxwell", "G": 2, "eta": 4}))
        assert code == 0
        assert json.loads(out) == {"version": 1, "kind": "kelvin_voigt", "a": 0.25, "b": 0.5}

    def test_verify(self, capsys, spec):
        code, out, _ = run(
            capsys, "verify", "--material", spec({"kind": "kelvin_voigt", "a": 1, "b": 1}), "--grid", "0:0.001:5000"
        )
        report = json.loads(out)
        assert code == 0
        assert report["op"] == "verify_conjugation"
        assert report["pass"] is True
        assert report["residual"] <= report["tolerance"]

    def test_eval_spring(self, capsys, spec):
        code, out, _ = run(capsys, "eval", "--material", spec({"kind": "spring", "a": 4}), "--grid", "0:1:4")
        assert code == 0
        r = rows(out)
        assert r[0] == ["t", "value"]
        assert [float(x[0]) for x in r[1:]] == [0, 1, 2, 3]
        assert all(float(x[1]) == 0.25 for x in r[1:])
        assert "\r" not in out


class TestRoundTrip:
    @given(prony_materials())
    def test_prony(self, m):
        doc = material_to_spec(m)
        assert parse_material(parse_document(json.dumps(doc))) == m

    @pytest.mark.parametrize(
        "m",
        [
            spring(3),
            maxwell(2, 5),
            kelvin_voigt(2, 3),
            stable_material(0.3, 2.0),
            series(stable_material(0.3), stable_material(0.6)),
            compose(stable_material(0.5), kelvin_voigt(1, 1)),
        ],
    )
    def test_named_and_nested(self, m):
        doc = material_to_spec(m)
        again = parse_material(parse_document(json.dumps(doc)))
        assert again == m
        assert material_to_spec(again) == doc

    @given(
        st.recursive(
            st.one_of(
                st.builds(lambda a: {"kind": "spring", "a": a}, st.floats(0.1, 10)),
                st.builds(lambda a: {"kind": "dashpot", "a": a}, st.floats(0.1, 10)),
                st.builds(lambda a, b: {"kind": "kelvin_voigt", "a": a, "b": b}, st.floats(0.1, 10), st.floats(0.1, 10)),
                st.builds(lambda al, c: {"kind": "stable", "alpha": al, "c": c}, st.floats(0.05, 0.95), st.floats(0.1, 5)),
            ),
            lambda kids: st.one_of(
                st.builds(lambda a, b: {"kind": "compose", "children": [a, b]}, kids, kids),
                st.builds(lambda cs: {"kind": "series", "children": cs}, st.lists(kids, min_size=2, max_size=3)),
            ),
            max_leaves=5,
        )
    )
    def test_documents(self, doc):
        m = parse_material(parse_document(json.dumps({"version": 1, **doc})))
        text = json.dumps(material_to_spec(m))
        assert parse_material(parse_document(text)) == m


class TestDiagnostics:
    def test_schema_error_names_field_and_line(self, capsys, spec):
        text = '{\n  "version": 1,\n  "kind": "series",\n  "children": [\n    {"kind": "spring", "a": 1},\n    {"kind": "kelvin_voigt",\n     "a": 1,\n     "b": -1}\n  ]\n}\n'
        code, _, err = run(capsys, "conjugate", "--material", spec(text))
        assert code == 1
        assert "children/1/b" in err
        assert "m.json:8" in err

    def test_bad_json(self, capsys, spec):
        code, _, err = run(capsys, "eval", "--material", spec('{"kind": '), "--grid", "0:1:3")
        assert code == 1
        assert "m.json:1" in err

    def test_missing_version(self):
        with pytest.raises(SpecError, match="version"):
            parse_document('{"kind": "spring", "a": 1}')

    def test_unknown_kind(self):
        with pytest.raises(SpecError, match="unknown kind"):
            parse_document('{"version": 1, "kind": "rubber"}')

    def test_wrong_document_family(self, capsys, spec):
        code, _, err = run(capsys, "eval", "--material", spec({"kind": "load", "steps": [[0, 1]]}), "--grid", "0:1:3")
        assert code == 1
        assert "expected a material" in err

    def test_numeric_error_named(self, capsys, spec):
        code, _, err = run(capsys, "conjugate", "--material", spec({"kind": "prony", "L": 1, "stable": {"alpha": 0.5, "scale": 1}}))
        assert code == 1
        assert err.startswith("UnsupportedRepresentationError")

    def test_bad_grid(self, capsys, spec):
        code, _, err = run(capsys, "eval", "--material", spec({"kind": "spring", "a": 1}), "--grid", "0:-1:3")
        assert code == 1
        assert "--grid" in err

    def test_verification_failure_exit(self, capsys, spec):
        a = spec({"kind": "spring", "a": 1}, "a.json")
        b = spec({"kind": "spring", "a": 1}, "b.json")
        code, out, _ = run(capsys, "verify", "--material", a, "--material", b, "--grid", "0:0.01:100")
        assert code == 2
        assert json.loads(out)["pass"] is False


class TestCommands:
    def test_relax_json(self, capsys, spec):
        code, out, _ = run(
            capsys, "relax", "--material", spec({"kind": "maxwell", "G": 1, "eta": 1}), "--grid", "0:0.5:3", "--format", "json"
        )
        doc = json.loads(out)
        assert code == 0
        np.testing.assert_allclose(doc["value"], np.exp(-np.array([0, 0.5, 1.0])))
        assert doc["beta"] == 0

    def test_relax_numeric_for_composed(self, capsys, spec):
        m = spec({"kind": "compose", "children": [{"kind": "maxwell", "G": 1, "eta": 2}, {"kind": "kelvin_voigt", "a": 1, "b": 1}]})
        code, out, _ = run(capsys, "relax", "--material", m, "--grid", "0.5:0.5:3")
        assert code == 0
        assert len(rows(out)) == 4

    def test_series_and_parallel(self, capsys, spec):
        a = spec({"kind": "spring", "a": 2}, "a.json")
        b = spec({"kind": "dashpot", "viscosity": 4}, "b.json")
        _, out, _ = run(capsys, "series", "--material", a, "--material", b)
        assert json.loads(out) == {"version": 1, "kind": "maxwell", "G": 2.0, "eta": 4.0}
        _, out, _ = run(capsys, "parallel", "--material", a, "--material", b)
        assert json.loads(out) == {"version": 1, "kind": "kelvin_voigt", "a": 2.0, "b": 4.0}

    def test_compose_order(self, capsys, spec):
        a = spec({"kind": "dashpot", "a": 1}, "a.json")
        b = spec({"kind": "spring", "a": 2}, "b.json")
        _, out, _ = run(capsys, "compose", "--material", a, "--material", b)
        doc = json.loads(out)
        assert doc["children"][0]["kind"] == "dashpot"

    def test_respond_relaxation_reports_impulses(self, capsys, spec):
        m = spec({"kind": "dashpot", "a": 2}, "m.json")
        load = spec({"kind": "load", "steps": [[0, 1]], "ramps": [[0, 10, 3]]}, "l.json")
        code, out, _ = run(
            capsys, "respond", "--material", m, "--load", load, "--mode", "relaxation", "--grid", "0:0.5:4", "--format", "json"
        )
        doc = json.loads(out)
        assert code == 0
        assert doc["impulses"] == [[0.0, 0.5]]
        np.testing.assert_allclose(doc["value"], 1.5)

    def test_network_csv(self, capsys, spec):
        net = spec({"kind": "network", "A": [[1, 0], [0, 4]], "B": [[2, 0], [0, 1]]})
        code, out, _ = run(capsys, "network", "--network", net, "--grid", "0:1:3")
        r = rows(out)
        assert code == 0
        assert r[0] == ["t", "f_11", "f_12", "f_22"]
        assert float(r[2][1]) == pytest.approx(1 - math.exp(-0.5))
        assert float(r[2][2]) == 0

    def test_network_atoms(self, capsys, spec):
        net = spec({"kind": "network", "A": [[2.0]], "B": [[3.0]]})
        _, out, _ = run(capsys, "network", "--network", net, "--grid", "0:1:2", "--format", "json", "--atoms")
        doc = json.loads(out)
        assert doc["spectral_atoms"][0]["rate"] == pytest.approx(2 / 3)

    def test_simulate(self, capsys, spec):
        m = spec({"kind": "kelvin_voigt", "a": 1, "b": 1})
        code, out, _ = run(capsys, "simulate", "--material", m, "--horizon", "5", "--seed", "3")
        r = rows(out)
        assert code == 0
        assert r[0] == ["time", "value", "is_jump"]
        jumps = [x for x in r[1:] if x[2] == "1"]
        assert float(r[-1][1]) == len(jumps)
        _, again, _ = run(capsys, "simulate", "--material", m, "--horizon", "5", "--seed", "3")
        assert again == out

    def test_simulate_process(self, capsys, spec):
        proc = spec({"kind": "pais", "start": [0, 1], "sigma": [[1, 0], [0, 1]], "jumps": [{"point": [1, 0], "intensity": 2}]})
        code, out, _ = run(capsys, "simulate", "--process", proc, "--steps", "4")
        assert code == 0
        assert rows(out)[0] == ["time", "value_1", "value_2", "is_jump"]

    def test_simulate_needs_one_source(self, capsys, spec):
        code, _, _ = run(capsys, "simulate")
        assert code == 1

    def test_mc_check(self, capsys, spec):
        m = spec({"kind": "kelvin_voigt", "a": 1, "b": 1})
        code, out, _ = run(capsys, "mc-check", "--material", m, "--paths", "2000", "--seed", "1", "--workers", "2")
        doc = json.loads(out)
        assert code == 0
        assert doc["op"] == "mc_laplace_check"
        assert doc["analytic"] == pytest.approx(math.exp(-(1 - math.exp(-1))))

    def test_estimate(self, capsys, spec):
        proc = spec({"kind": "pais", "start": [1.0], "sigma": [[0.5]]})
        code, out, _ = run(capsys, "estimate", "--process", proc, "--paths", "200", "--grid", "0.5:0.5:2", "--format", "json")
        doc = json.loads(out)
        assert code == 0
        np.testing.assert_allclose(doc["value"], doc["closed_form"])

    def test_verify_network(self, capsys, spec):
        net = spec({"kind": "network", "A": [[2.0]], "B": [[3.0]]}, "n.json")
        load = spec({"kind": "load", "steps": [[0, 1]]}, "l.json")
        code, out, _ = run(capsys, "verify", "--network", net, "--load", load, "--grid", "0:0.0001:20001")
        assert code == 0
        assert json.loads(out)["op"] == "verify_evolution"

    def test_verify_bernstein(self, capsys, spec):
        m = spec({"kind": "stable", "alpha": 0.5})
        code, out, _ = run(capsys, "verify", "--material", m, "--bernstein", "--grid", "0:0.01:1001")
        assert code == 0
        assert json.loads(out)["pass"] is True

    def test_out_file(self, capsys, spec, tmp_path):
        target = tmp_path / "curve.csv"
        code, out, _ = run(capsys, "eval", "--material", spec({"kind": "spring", "a": 1}), "--grid", "0:1:2", "--out", str(target))
        assert code == 0 and out == ""
        assert target.read_text() == "t,value\n0.0,1.0\n1.0,1.0\n"
