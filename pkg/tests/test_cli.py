import json
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from curvelab.cli import main
from curvelab.errors import SpecParseError
from curvelab.exactalg import BivarPoly
from curvelab.specfile import format_polynomial, parse_polynomial, parse_spec

SPECS = Path(__file__).resolve().parent.parent / "specs"
X, Y = BivarPoly.x(), BivarPoly.y()


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


class TestPolynomialParser:
    def test_precedence(self):
        assert parse_polynomial("y^2 - x^3 + 2*x*y") == Y ** 2 - X ** 3 + 2 * X * Y

    def test_rationals_and_parentheses(self):
        f = parse_polynomial("(3*x^6 - 3/2*x^7)*y^2")
        assert f == (3 * X ** 6 - Fraction(3, 2) * X ** 7) * Y ** 2

    def test_unary_minus_and_power_of_group(self):
        assert parse_polynomial("-(y - x)^2") == -((Y - X) ** 2)

    def test_error_position(self):
        with pytest.raises(SpecParseError) as info:
            parse_polynomial("y^2 - x^")
        assert info.value.column == 9

    def test_unknown_symbol(self):
        with pytest.raises(SpecParseError):
            parse_polynomial("y^2 - z")

    def test_zero_denominator(self):
        with pytest.raises(SpecParseError):
            parse_polynomial("1/0*x")


coeffs = st.fractions(min_value=-5, max_value=5, max_denominator=4)


@settings(max_examples=50, deadline=None)
@given(st.dictionaries(st.tuples(st.integers(0, 5), st.integers(0, 5)), coeffs, max_size=6))
def test_format_then_parse_round_trips(terms):
    f = BivarPoly(terms)
    assert parse_polynomial(format_polynomial(f)) == f


class TestSpecParsing:
    def test_param_branch(self):
        spec = parse_spec({"version": "1", "branches": [{"param": {"n": 2, "y": [[3, "1/2"]]}}]})
        assert spec.items[0].y == {3: Fraction(1, 2)}

    def test_missing_branches(self):
        with pytest.raises(SpecParseError):
            parse_spec({"version": "1", "branches": []})

    def test_bad_version(self):
        with pytest.raises(SpecParseError):
            parse_spec({"version": "9", "branches": [{"poly": "y - x^2"}]})

    def test_json_error_has_position(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text('{"version": "1",\n "branches": [}\n')
        code, _, err = run(capsys, "analyze", bad)
        assert code == 1 and "line 2" in err


class TestCommands:
    def test_analyze_cusp_pair(self, capsys):
        code, out, _ = run(capsys, "analyze", SPECS / "cusp-pair.json", "--json")
        data = json.loads(out)
        assert code == 0
        assert data["schema"] == "curvelab.report" and data["report"]["tau_berger"] == 15
        assert set(data["report"]["verdicts"].values()) == {"pass"}

    def test_duplicate_branch(self, capsys):
        code, _, err = run(capsys, "analyze", SPECS / "duplicate.json")
        assert code == 1 and "branches are not distinct" in err

    def test_paper_pair(self, capsys):
        code, out, _ = run(capsys, "analyze", SPECS / "paper-6-9-19.json", "--json", "--oracle", "off")
        assert code == 0 and json.loads(out)["report"]["tau_berger"] == 157

    def test_semigroup_cusp(self, capsys):
        code, out, _ = run(capsys, "semigroup", SPECS / "cusp.json", "--json")
        br = json.loads(out)["branches"][0]
        assert code == 0 and br["beta_bar"] == [2, 3] and br["conductor"] == 2

    def test_semigroup_pair(self, capsys):
        _, out, _ = run(capsys, "semigroup", SPECS / "cusp-pair.json", "--json")
        assert json.loads(out)["c_S"] == [9, 9]

    def test_semigroup_five_eight(self, capsys):
        _, out, _ = run(capsys, "semigroup", SPECS / "five-eight.json", "--json")
        br = json.loads(out)["branches"][0]
        assert br["beta_bar"] == [5, 8] and br["conductor"] == 28

    def test_lambda(self, capsys):
        _, out, _ = run(capsys, "lambda", SPECS / "cusp-pair.json", "--json")
        data = json.loads(out)
        assert data["conductor"] == [6, 6] and data["theta"] == [0, 4]

    def test_out_file(self, capsys, tmp_path):
        target = tmp_path / "r.json"
        code, out, _ = run(capsys, "analyze", SPECS / "cusp.json", "--out", target)
        assert code == 0 and "tau_berger=2" in out
        assert json.loads(target.read_text())["report"]["mu"] == 2

    def test_truncation_error_names_attempt(self, capsys, tmp_path):
        spec = tmp_path / "s.json"
        spec.write_text(json.dumps({"version": "1", "branches": [{"poly": "y^5 - x^8 + 2*x^5*y^2"},
                                                                 {"poly": "y^5 - x^8 + 3*x^5*y^2"}]}))
        code, _, err = run(capsys, "analyze", spec, "--truncation", "20")
        assert code == 1 and "attempted T=" in err

    def test_failed_verdict_exit_code(self, capsys, monkeypatch):
        import curvelab.invariants as inv
        original = inv.ratio_check
        monkeypatch.setattr(inv, "ratio_check", lambda rep: False)
        code, _, _ = run(capsys, "analyze", SPECS / "cusp.json")
        monkeypatch.setattr(inv, "ratio_check", original)
        assert code == 2


class TestExperiment:
    def test_cusp_family_closed_formula(self, capsys, tmp_path):
        fam = tmp_path / "f.json"
        fam.write_text(json.dumps({"name": "c", "semigroup": [2, 3], "I": [7], "samples": 5}))
        code, out, _ = run(capsys, "experiment", fam, "--json", "--seed", "3")
        data = json.loads(out)
        assert code == 0
        assert [r["tau_berger"] for r in data["rows"]] == [15] * 5

    def test_boundary_reports_conjecture(self, capsys, tmp_path):
        fam = tmp_path / "f.json"
        fam.write_text(json.dumps({"name": "c", "semigroup": [2, 3], "I": [6], "samples": 3}))
        _, out, _ = run(capsys, "experiment", fam, "--json")
        (entry,) = json.loads(out)["summary"]
        assert entry["conjectured_min"] == 14 and entry["tau_min"] is not None

    def test_below_boundary_rejected(self, capsys, tmp_path):
        fam = tmp_path / "f.json"
        fam.write_text(json.dumps({"semigroup": [2, 3], "I": [5]}))
        code, _, _ = run(capsys, "experiment", fam)
        assert code == 1


def test_reports_identical_across_jobs_and_runs(capsys, tmp_path):
    fam = tmp_path / "f.json"
    fam.write_text(json.dumps({"name": "d", "semigroup": [3, 4], "I": [12, 13], "samples": 3}))
    outs = []
    for jobs in (1, 8, 1):
        _, out, _ = run(capsys, "experiment", fam, "--json", "--seed", "7", "--jobs", jobs)
        outs.append(out)
    for jobs in (1, 8):
        _, out, _ = run(capsys, "analyze", SPECS / "cusp-pair.json", "--json", "--jobs", jobs)
        outs.append(out)
    assert outs[0] == outs[1] == outs[2]
    assert outs[3] == outs[4]
