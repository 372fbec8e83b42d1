"""End-to-end command-line tests: output shape, exit codes, determinism."""

import json

import pytest

from leximinflow import cli
from leximinflow.core import EMPTY_ALLOCATION, InternalCheckError
from leximinflow.fileio import parse_instance, save_instance, serialize_instance
from leximinflow.generators import random_instance, si_bound_instance, si_misreport_instance
from leximinflow.rational import Rational, format_rational, parse_rational


@pytest.fixture()
def squeeze_path(tmp_path):
    path = tmp_path / "squeeze.json"
    save_instance(si_bound_instance(2), str(path))
    return str(path)


@pytest.fixture()
def misreport_path(tmp_path):
    path = tmp_path / "misreport.json"
    save_instance(si_misreport_instance(), str(path))
    return str(path)


def run(capsys, argv):
    code = cli.main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# ---------------------------------------------------------------- allocate


def test_allocate_table(squeeze_path, capsys):
    code, out, err = run(capsys, ["allocate", squeeze_path])
    assert code == 0 and err == ""
    assert "3/2" in out  # the shared first-tier rate
    assert "breakpoints: 3/2" in out
    assert "entitlement ratio: 3/4" in out
    assert "frugal=pass" in out and "non-wasteful=pass" in out and "envy-free=pass" in out


def test_allocate_json_is_consistent(squeeze_path, capsys):
    code, out, err = run(capsys, ["allocate", squeeze_path, "--output", "json"])
    assert code == 0
    data = json.loads(out)
    for row in data["agents"]:
        endowment = parse_rational(row["endowment"])
        rate = parse_rational(row["rate"])
        assert parse_rational(row["utility"]) == endowment * rate
        assert parse_rational(row["normalized"]) == rate
    assert data["breakpoints"] == ["3/2"]
    assert data["entitlements"]["ratio"] == "3/4"
    assert all(data["properties"].values())
    # every rational string is already in canonical lowest-terms form
    for row in data["allocation"]:
        s = row["amount"]
        assert format_rational(parse_rational(s)) == s


def test_allocate_empty_instance(tmp_path, capsys):
    path = tmp_path / "empty.json"
    path.write_text('{"version": 1, "agents": [], "objects": [], "demands": []}\n')
    code, out, err = run(capsys, ["allocate", str(path)])
    assert code == 0
    assert "(empty)" in out
    assert "breakpoints: (none)" in out


def test_allocate_rejects_zero_denominator(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text(
        '{"version": 1, "agents": [{"id": "a", "endowment": "1/0"}],'
        ' "objects": [], "demands": []}\n'
    )
    code, out, err = run(capsys, ["allocate", str(path)])
    assert code == 2
    assert "agents[0].endowment" in err


def test_allocate_missing_file(tmp_path, capsys):
    code, out, err = run(capsys, ["allocate", str(tmp_path / "nope.json")])
    assert code == 2
    assert "cannot read" in err


def test_allocate_rejects_invalid_instance(tmp_path, capsys):
    path = tmp_path / "invalid.json"
    path.write_text(
        '{"version": 1, "agents": [{"id": "a", "endowment": "0"}],'
        ' "objects": [], "demands": []}\n'
    )
    code, out, err = run(capsys, ["allocate", str(path)])
    assert code == 2
    assert "strictly positive" in err


# ------------------------------------------------------------------- audit


def test_audit_all_properties_pass(misreport_path, capsys):
    code, out, err = run(capsys, ["audit", misreport_path, "--samples", "25"])
    assert code == 0, err
    for name in ("frugal", "non-wasteful", "envy-free", "si", "lorenz", "structure", "substructure"):
        assert f"{name}: pass" in out


def test_audit_sample_skip(misreport_path, capsys):
    code, out, err = run(capsys, ["audit", misreport_path, "--samples", "0"])
    assert code == 0
    assert "lorenz: skipped (0 samples requested)" in out


def test_audit_json_shape(misreport_path, capsys):
    code, out, err = run(
        capsys,
        ["audit", misreport_path, "--samples", "5", "--seed", "3", "--output", "json"],
    )
    assert code == 0
    data = json.loads(out)
    assert {r["name"] for r in data["properties"]} == {
        "frugal", "non-wasteful", "envy-free", "si", "lorenz", "structure", "substructure",
    }
    assert all(r["passed"] and r["witness"] is None for r in data["properties"])
    assert data["skipped"] == []


def test_audit_unknown_property(misreport_path, capsys):
    code, out, err = run(capsys, ["audit", misreport_path, "--properties", "frugal,karma"])
    assert code == 2
    assert "unknown properties: karma" in err


def test_audit_flags_an_injected_bug(squeeze_path, capsys, monkeypatch):
    # Swap the solver for one that allocates nothing; the auditors must catch it.
    real = cli.lexicographic_allocation

    def broken(instance):
        _, profile = real(instance)
        return EMPTY_ALLOCATION, profile

    monkeypatch.setattr(cli, "lexicographic_allocation", broken)
    code, out, err = run(
        capsys, ["audit", squeeze_path, "--properties", "nw,structure"]
    )
    assert code == 1
    assert "non-wasteful: FAIL" in out
    assert "structure: FAIL" in out


def test_audit_internal_error_exit_code(squeeze_path, capsys, monkeypatch):
    def exploding(instance):
        raise InternalCheckError("flow value mismatch (injected)")

    monkeypatch.setattr(cli, "lexicographic_allocation", exploding)
    code, out, err = run(capsys, ["audit", squeeze_path])
    assert code == 3
    assert "internal check failed" in err


def test_audit_deterministic_given_seed(misreport_path, capsys):
    first = run(capsys, ["audit", misreport_path, "--samples", "10", "--seed", "5"])
    second = run(capsys, ["audit", misreport_path, "--samples", "10", "--seed", "5"])
    assert first == second


# -------------------------------------------------------------- manipulate


def test_manipulate_main_mechanism_holds(misreport_path, capsys):
    code, out, err = run(capsys, ["manipulate", misreport_path, "--grid", "1,2"])
    assert code == 0
    assert "no counterexample found (grid-bounded evidence, not proof)" in out


def test_manipulate_reference_rule_breaks(misreport_path, capsys):
    code, out, err = run(
        capsys, ["manipulate", misreport_path, "--grid", "1,2", "--mechanism", "mmf-si"]
    )
    assert code == 1
    assert "counterexample: coalition a1" in out
    assert "a1: utility 3 -> 4" in out
    assert "reported d(a1,b2) = 2 (true 1)" in out


def test_manipulate_json_counterexample(misreport_path, capsys):
    code, out, err = run(
        capsys,
        [
            "manipulate", misreport_path,
            "--grid", "1,2", "--mechanism", "mmf-si", "--output", "json",
        ],
    )
    assert code == 1
    data = json.loads(out)
    assert data["counterexample"]["winners"] == ["a1"]
    assert data["counterexample"]["losers"] == []
    assert data["counterexample"]["truthful_utilities"]["a1"] == "3"
    assert data["counterexample"]["misreport_utilities"]["a1"] == "4"
    assert data["note"] == "absence of a counterexample is grid-bounded evidence, not proof"


def test_manipulate_argument_errors(misreport_path, capsys):
    code, _, err = run(capsys, ["manipulate", misreport_path, "--budget", "0"])
    assert code == 2 and "budget" in err
    code, _, err = run(capsys, ["manipulate", misreport_path, "--coalition", "7"])
    assert code == 2 and "coalition size" in err
    code, _, err = run(capsys, ["manipulate", misreport_path, "--grid", " , "])
    assert code == 2 and "grid" in err
    code, _, err = run(capsys, ["manipulate", misreport_path, "--grid", "1/0"])
    assert code == 2 and "zero denominator" in err


# ---------------------------------------------------------------- generate


def test_generate_named_family(capsys):
    code, out, err = run(capsys, ["generate", "lemma5", "--n", "2"])
    assert code == 0
    assert parse_instance(out) == si_bound_instance(2)


def test_generate_named_family_needs_n(capsys):
    code, _, err = run(capsys, ["generate", "lemma5"])
    assert code == 2
    assert "--n" in err


def test_generate_random_is_deterministic(capsys):
    first = run(capsys, ["generate", "random", "--seed", "7"])
    second = run(capsys, ["generate", "random", "--seed", "7"])
    assert first == second
    assert first[1] == serialize_instance(random_instance(7))


def test_generate_to_file(tmp_path, capsys):
    out_path = tmp_path / "generated.json"
    code, out, err = run(capsys, ["generate", "lemma6", "--out", str(out_path)])
    assert code == 0 and out == ""
    assert parse_instance(out_path.read_text()) == si_misreport_instance()


def test_generate_seed_env_fallback(capsys, monkeypatch):
    monkeypatch.setenv(cli.SEED_ENV, "9")
    code, out, err = run(capsys, ["generate", "random"])
    assert code == 0
    assert out == serialize_instance(random_instance(9))


def test_generate_invalid_seed_env(capsys, monkeypatch):
    monkeypatch.setenv(cli.SEED_ENV, "many")
    code, _, err = run(capsys, ["generate", "random"])
    assert code == 2
    assert cli.SEED_ENV in err


def test_generate_random_with_sizes(capsys):
    code, out, err = run(
        capsys,
        ["generate", "random", "--seed", "1", "--agents", "3", "--objects", "2",
         "--density", "1.0"],
    )
    assert code == 0
    inst = parse_instance(out)
    assert len(inst.agents) == 3 and len(inst.objects) == 2
    assert len(inst.demand) <= 6


def test_generate_rejects_bad_density(capsys):
    code, _, err = run(capsys, ["generate", "random", "--density", "1.5"])
    assert code == 2
    assert "density" in err
