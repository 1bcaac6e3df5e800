import json
import subprocess
import sys

import pytest

from skewmrd import get_field
from skewmrd.cli import CENSUS_COLUMNS, MRD_COLUMNS, WITNESS_COLUMNS, main, parse_element
from skewmrd.rankcodes import valid_h
from skewmrd.skew import generator_exponents


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv)
    return code, json.loads(out)


def _elem(ctx, x):
    return "[" + ",".join(str(c) for c in ctx.to_coeffs(x)) + "]"


F3 = ("-p", "3", "-r", "1", "-t", "3")
F5 = ("-p", "3", "-r", "1", "-t", "5")


def test_parse_element():
    ctx = get_field(3, 1, 3)
    g = ctx.primitive_root
    assert parse_element(ctx, "g^13") == ctx.pow(g, 13)
    assert parse_element(ctx, "[0,1]") == 3
    assert parse_element(ctx, "-1") == ctx.minus_one
    assert parse_element(ctx, "5") == 5
    with pytest.raises(ValueError):
        parse_element(ctx, "[0,1,2,0,0,0,0,0]")
    with pytest.raises(ValueError):
        parse_element(ctx, "[3]")
    with pytest.raises(ValueError):
        parse_element(ctx, str(ctx.size))
    with pytest.raises(ValueError):
        parse_element(ctx, "banana")


def test_mrd_check_all(capsys):
    code, data = run_json(capsys, "mrd-check", *F3, "--all-h", "--all-sigma")
    assert code == 0 and data["all_mrd"]
    rows = data["rows"]
    assert len(rows) == 28 * 2
    assert all(r["mrd"] and r["min_distance"] == 5 for r in rows)
    assert {r["s"] for r in rows} == set(generator_exponents(6))


def test_mrd_check_gabidulin(capsys):
    code, data = run_json(capsys, "mrd-check", *F3, "--family", "gabidulin", "-k", "2")
    assert code == 0 and data["rows"][0]["mrd"]


def test_mrd_check_invalid_h(capsys):
    code, data = run_json(capsys, "mrd-check", *F3, "-h", "g^7")
    assert code == 2
    assert "norm condition violated" in data["rows"][0]["error"]


def test_mrd_check_csv(capsys):
    code, out, _ = run(capsys, "mrd-check", *F3, "--all-h", "--format", "csv")
    lines = out.strip().splitlines()
    assert code == 0
    assert lines[0] == ",".join(MRD_COLUMNS)
    assert len(lines) == 1 + 28


def test_jobs_match_serial(capsys):
    _, serial = run(capsys, "mrd-check", *F3, "--all-h", "--all-sigma")[:2]
    _, par = run(capsys, "mrd-check", *F3, "--all-h", "--all-sigma", "--jobs", "2")[:2]
    assert serial == par


def test_deterministic_output(capsys):
    a = run(capsys, "selftest", "--seed", "3")
    b = run(capsys, "selftest", "--seed", "3")
    assert a == b and a[0] == 0
    assert json.loads(a[1])["ok"]


def test_invariants_profiles(capsys):
    ctx = get_field(3, 1, 3)
    h = _elem(ctx, valid_h(ctx)[0])
    code, prof = run_json(capsys, "invariants", *F3, "--h", h, "--no-distance")
    assert code == 0 and prof["right_idealizer_dim"] == 2
    code, prof = run_json(capsys, "invariants", *F3, "--family", "gabidulin", "--k", "2")
    assert code == 0
    assert prof["dims"]["1"] == [2, 3, 4] and prof["min_distance"] == 5


def test_invariants_compare(capsys):
    ctx = get_field(3, 1, 5)
    h = _elem(ctx, valid_h(ctx)[0])
    code, rep = run_json(capsys, "invariants", *F5, "--h", h, "--compare", "--no-idealizers",
                         "--no-distance")
    assert code == 0 and rep["verdict"] == "INEQUIVALENT"
    assert rep["witness_invariant"]["name"] == "s_sequence"


def test_witness_cases(capsys):
    ctx = get_field(3, 1, 5)
    hs = valid_h(ctx)
    h = _elem(ctx, hs[0])
    code, data = run_json(capsys, "witness", *F5, "--case", "adjoint", "-h", h)
    assert code == 0 and data["verified"] and data["status"] == "verified"
    code, data = run_json(capsys, "witness", *F5, "--case", "s=-1", "-h", h, "-k", h)
    assert code == 0 and data["verified"]
    related = {ctx.frobenius(ctx.mul(l, hs[0]), e) for l in (1, ctx.minus_one)
               for e in range(ctx.m)}
    other = _elem(ctx, next(x for x in hs if x not in related))
    code, data = run_json(capsys, "witness", *F5, "--case", "s=1", "-h", other, "-k", h)
    assert code == 2 and data["status"].startswith("no witness") and not data["verified"]


def test_witness_csv(capsys):
    ctx = get_field(3, 1, 5)
    h = _elem(ctx, valid_h(ctx)[3])
    code, out, _ = run(capsys, "witness", *F5, "--case", "adjoint", "-h", h, "--format", "csv")
    lines = out.strip().splitlines()
    assert code == 0 and lines[0] == ",".join(WITNESS_COLUMNS)
    assert lines[1].startswith("adjoint,")


def test_census(capsys):
    code, data = run_json(capsys, "census", *F5, "--enumerate")
    assert code == 0
    assert data["exact"] == data["enumerated"] == 26 and data["lower_bound"] == 24
    code, out, _ = run(capsys, "census", "-p", "3", "-r", "1", "-t", "6", "--format", "csv")
    header, row = out.strip().splitlines()
    assert header == ",".join(CENSUS_COLUMNS)
    assert dict(zip(CENSUS_COLUMNS, row.split(",")))["j_t"] == "10"


@pytest.mark.parametrize("argv", [
    ["census", "-p", "3", "-r", "1", "-t", "0"],
    ["census", "-p", "3", "-r", "1", "-t", "5", "--bogus"],
    ["census", "-p", "4", "-r", "1", "-t", "5"],
    ["mrd-check", *F3, "--family", "martian"],
    ["mrd-check", *F3, "--family", "gabidulin", "-k", "9"],
    ["witness", *F5, "--case", "s=1"],
    ["frobnicate"],
    [],
])
def test_usage_errors(capsys, argv):
    assert main(argv) == 2


def test_cap_flag(capsys):
    code, out, _ = run(capsys, "mrd-check", *F3, "--family", "gabidulin", "-k", "3",
                       "--cap", "10")
    assert code == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "skewmrd", "census", "-p", "3", "-r", "1",
                           "-t", "5"], capture_output=True, text=True, timeout=120)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["exact"] == 26
    bad = subprocess.run([sys.executable, "-m", "skewmrd", "census", "--nope"],
                         capture_output=True, text=True, timeout=120)
    assert bad.returncode == 2 and "usage" in bad.stderr
