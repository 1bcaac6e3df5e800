"""Command-line front end: mrd-check, invariants, witness, census, selftest.

Every subcommand prints a deterministic report (JSON by default, or a CSV
projection with fixed columns).  Exit codes: 0 when everything checked out, 1
when a mathematical counterexample was found, 2 on usage or configuration
errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import census as census_mod
from . import invariants as inv
from . import rankcodes as rc
from .gf import FieldCtx, FieldError, get_field
from .skew import SigmaAut, SkewError, generator_exponents

EXIT_OK, EXIT_COUNTEREXAMPLE, EXIT_USAGE = 0, 1, 2

MRD_COLUMNS = ["family", "h", "s", "k", "dim", "min_distance", "mrd", "error"]
WITNESS_COLUMNS = ["case", "h", "k", "s", "status", "verified"]
CENSUS_COLUMNS = ["p", "r", "t", "j_t", "exact", "lower_bound", "enumerated"]


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    p: int
    r: int
    t: int
    modulus: tuple | None = None
    fmt: str = "json"
    seed: int = 0
    jobs: int = 1
    cap: int = rc.DEFAULT_CAP
    command: str = ""
    options: dict = field(default_factory=dict)

    def field(self) -> FieldCtx:
        return get_field(self.p, self.r, self.t, self.modulus)


# -- parsing helpers ----------------------------------------------------------------


def parse_element(ctx: FieldCtx, text: str) -> int:
    """An element given as ``g^e`` (power of the primitive root), ``[c0,c1,..]``
    (power-basis coordinates, low first), ``-1``, or the integer encoding."""
    s = text.strip()
    try:
        if s.startswith("g^"):
            return ctx.elem(int(s[2:]))
        if s.startswith("["):
            coeffs = json.loads(s)
            if len(coeffs) > ctx.m or any(not 0 <= int(c) < ctx.p for c in coeffs):
                raise ValueError("coordinates out of range")
            return ctx.from_coeffs(coeffs)
        if s == "-1":
            return ctx.minus_one
        v = int(s)
    except (ValueError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot parse field element {text!r}") from exc
    if not 0 <= v < ctx.size:
        raise UsageError(f"element {v} outside 0..{ctx.size - 1}")
    return v


def _sigmas(ctx: FieldCtx, opts: dict) -> list[int]:
    gens = generator_exponents(ctx.n)
    if opts.get("all_sigma"):
        return gens
    s = opts.get("s", 1) % ctx.n
    if s not in gens:
        raise UsageError(f"s = {s} is not coprime to n = {ctx.n}")
    return [s]


def _build_code(ctx: FieldCtx, family: str, s: int, k: int | None, h: int | None,
                eta: int | None):
    sigma = SigmaAut(ctx, s)
    if family == "gabidulin":
        return rc.gabidulin(k or 2, sigma)
    if family == "twisted":
        return rc.twisted_gabidulin(k or 2, sigma, eta if eta is not None else 1)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", rc.NewFamilyWarning)
        return rc.new_family(rc.NewFamilyParams(h, ctx.t, sigma))


def _mrd_row(args):
    p, r, t, modulus, family, s, k, h, eta, method, cap = args
    ctx = get_field(p, r, t, modulus)
    row = {"family": family, "h": ctx.to_coeffs(h) if h is not None else None, "s": s,
           "k": k if family != "new" else 2}
    try:
        code = _build_code(ctx, family, s, k, h, eta)
        rep = rc.min_distance_report(code, method=method, cap=cap)
    except rc.NormConditionError as exc:
        row.update(dim=None, min_distance=None, mrd=None, witness=None,
                   error=str(exc) if "norm condition" in str(exc)
                   else f"norm condition violated: {exc}")
        return row
    except rc.CapExceededError as exc:
        row.update(dim=None, min_distance=None, mrd=None, witness=None, error=str(exc))
        return row
    row.update(dim=rep["dim"], min_distance=rep["min_distance"], mrd=rep["mrd"],
               witness=rep["witness"] if not rep["mrd"] else None, error=None)
    return row


def _pool_map(fn, items, jobs: int):
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, items, chunksize=max(1, len(items) // (4 * jobs))))


# -- commands ---------------------------------------------------------------------


def cmd_mrd_check(cfg: RunConfig) -> tuple[int, dict]:
    ctx = cfg.field()
    o = cfg.options
    family = o.get("family", "new")
    eta = parse_element(ctx, o["eta"]) if o.get("eta") is not None else None
    if family == "new":
        if o.get("all_h"):
            hs = rc.valid_h(ctx)
        elif o.get("h") is not None:
            hs = [parse_element(ctx, o["h"])]
        else:
            raise UsageError("give -h ELEMENT or --all-h for the new family")
    else:
        hs = [None]
    jobs = [(ctx.p, ctx.r, ctx.t, cfg.modulus, family, s, o.get("k"), h, eta,
             o.get("method", "auto"), cfg.cap)
            for h in hs for s in _sigmas(ctx, o)]
    rows = _pool_map(_mrd_row, jobs, cfg.jobs)
    report = {"field": ctx.to_json(), "rows": rows,
              "all_mrd": all(r["mrd"] for r in rows)}
    if any(r["mrd"] is False for r in rows):
        return EXIT_COUNTEREXAMPLE, report
    if any(r["error"] for r in rows):
        return EXIT_USAGE, report
    return EXIT_OK, report


def cmd_invariants(cfg: RunConfig) -> tuple[int, dict]:
    ctx = cfg.field()
    o = cfg.options

    def code_from(prefix: str):
        fam = o.get(prefix + "family") or "new"
        h = o.get(prefix + "h")
        if fam == "new" and h is None:
            raise UsageError(f"--{prefix.replace('_', '-')}h is required for the new family")
        hv = parse_element(ctx, h) if h is not None else None
        eta = o.get(prefix + "eta")
        ev = parse_element(ctx, eta) if eta is not None else None
        s = o.get(prefix + "s") or 1
        if s % ctx.n not in generator_exponents(ctx.n):
            raise UsageError(f"s = {s} is not coprime to n = {ctx.n}")
        return _build_code(ctx, fam, s % ctx.n, o.get(prefix + "k"), hv, ev)

    code = code_from("")
    imax = o.get("i_max", 2)
    idl = not o.get("no_idealizers") and ctx.n <= 12
    if o.get("vs_family"):
        other = code_from("vs_")
        rep = inv.inequivalence_report(code, other, imax, idealizers=idl,
                                       distance=not o.get("no_distance"))
        return EXIT_OK, rep
    prof = inv.invariant_profile(code, imax, idealizers=idl, distance=not o.get("no_distance"))
    out = {"code": code.label, **prof.to_json()}
    return EXIT_OK, out


def cmd_witness(cfg: RunConfig) -> tuple[int, dict]:
    ctx = cfg.field()
    o = cfg.options
    case = o["case"]
    hv = parse_element(ctx, o["h"])
    kv = parse_element(ctx, o["k"]) if o.get("k") is not None else hv
    s = o.get("s", 1)
    out = {"case": case, "h": ctx.to_coeffs(hv), "k": ctx.to_coeffs(kv), "s": s}
    if s % ctx.n not in generator_exponents(ctx.n):
        raise UsageError(f"s = {s} is not coprime to n = {ctx.n}")
    try:
        wit = inv.equivalence_witness(case, hv, kv, SigmaAut(ctx, s % ctx.n), o.get("rho"))
    except inv.NoWitnessError as exc:
        out.update(status="no witness exists for given (h,k,case)", detail=str(exc),
                   verified=False)
        return EXIT_USAGE, out
    out.update(wit.to_json(ctx))
    out["case"] = case
    if not wit.verified:
        out["status"] = "verification failed"
        return EXIT_COUNTEREXAMPLE, out
    out["status"] = "verified"
    return EXIT_OK, out


def cmd_census(cfg: RunConfig) -> tuple[int, dict]:
    params = census_mod.CensusParams(cfg.p, cfg.r, cfg.t)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", census_mod.SmallParameterWarning)
        rep = census_mod.census_report(params, enumerate_=cfg.options.get("enumerate", False),
                                       ctx=cfg.field() if cfg.options.get("enumerate") else None,
                                       method=cfg.options.get("method", "auto"))
    out = rep.to_json()
    out["warnings"] = sorted({str(w.message) for w in caught})
    bad = out["lower_bound"] > out["exact"] or (
        out["enumerated"] is not None and out["enumerated"] != out["exact"])
    return (EXIT_COUNTEREXAMPLE if bad else EXIT_OK), out


def cmd_selftest(cfg: RunConfig) -> tuple[int, dict]:
    """Fast smoke checks over F_{3^6} that touch every module."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", rc.NewFamilyWarning)
        checks = _selftest_checks(np.random.default_rng(cfg.seed))
    ok = all(checks.values())
    return (EXIT_OK if ok else EXIT_COUNTEREXAMPLE), {"checks": checks, "ok": ok}


def _selftest_checks(rng) -> dict:
    ctx = get_field(3, 1, 3)
    sig = SigmaAut(ctx, 1)
    hs = rc.valid_h(ctx)
    checks = {"valid_h_count": len(hs) == 28}
    code = rc.new_family(rc.NewFamilyParams(hs[int(rng.integers(len(hs)))], 3, sig))
    checks["new_family_mrd"] = rc.is_mrd(code)
    checks["gabidulin_mrd"] = rc.is_mrd(rc.gabidulin(2, sig))
    checks["lemma"] = not inv.lemma_counterexamples(ctx, 1)
    k = hs[int(rng.integers(len(hs)))]
    checks["witness_adjoint"] = inv.equivalence_witness("adjoint", k, None, sig).verified
    p5 = census_mod.CensusParams(3, 1, 5)
    checks["census_t5"] = census_mod.exact_count(p5) == census_mod.burnside_enumerate(p5)
    return checks


COMMANDS = {"mrd-check": cmd_mrd_check, "invariants": cmd_invariants,
            "witness": cmd_witness, "census": cmd_census, "selftest": cmd_selftest}


# -- output ----------------------------------------------------------------------


def _csv(command: str, report: dict) -> str:
    buf = io.StringIO()

    def cell(v):
        return json.dumps(v, separators=(",", ":")) if isinstance(v, (list, dict)) else (
            "" if v is None else v)

    if command == "mrd-check":
        w = csv.DictWriter(buf, MRD_COLUMNS, extrasaction="ignore", lineterminator="\n")
        w.writeheader()
        for row in report["rows"]:
            w.writerow({c: cell(row.get(c)) for c in MRD_COLUMNS})
    elif command == "witness":
        w = csv.DictWriter(buf, WITNESS_COLUMNS, extrasaction="ignore", lineterminator="\n")
        w.writeheader()
        w.writerow({c: cell(report.get(c)) for c in WITNESS_COLUMNS})
    elif command == "census":
        w = csv.DictWriter(buf, CENSUS_COLUMNS, extrasaction="ignore", lineterminator="\n")
        w.writeheader()
        w.writerow({c: cell(report.get(c)) for c in CENSUS_COLUMNS})
    else:
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["key", "value"])
        for key in sorted(report):
            w.writerow([key, cell(report[key])])
    return buf.getvalue()


def render(command: str, report: dict, fmt: str) -> str:
    if fmt == "csv":
        return _csv(command, report)
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


# -- argument parsing -------------------------------------------------------------


def _common() -> argparse.ArgumentParser:
    g = argparse.ArgumentParser(add_help=False)
    g.add_argument("--help", action="help", help="show this help message and exit")
    g.add_argument("-p", type=int, default=3, help="characteristic")
    g.add_argument("-r", type=int, default=1, help="q = p^r")
    g.add_argument("-t", type=int, default=3, help="n = 2t")
    g.add_argument("--modulus", default=None,
                   help="defining polynomial of F_{q^n} over F_p, coefficients low first, comma separated")
    g.add_argument("--format", dest="fmt", choices=["json", "csv"], default="json")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--jobs", type=int, default=1)
    g.add_argument("--cap", type=int, default=None,
                   help="enumeration size guard (default from SKEWMRD_CAP or 2e7)")
    return g


def _code_args(sp: argparse.ArgumentParser, prefix: str = ""):
    dash = "--" + prefix.replace("_", "-")
    sp.add_argument(dash + "family", dest=prefix + "family",
                    choices=["new", "gabidulin", "twisted"], default=None if prefix else "new")
    sp.add_argument(dash + "k", dest=prefix + "k", type=int, default=None, help="code dimension")
    sp.add_argument(dash + "h", dest=prefix + "h", default=None, help="parameter h (an element)")
    sp.add_argument(dash + "eta", dest=prefix + "eta", default=None, help="twist eta (an element)")
    sp.add_argument(dash + "s", dest=prefix + "s", type=int, default=None,
                    help="generator exponent: sigma = x^(q^s)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="skewmrd", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    common = _common()

    sp = sub.add_parser("mrd-check", parents=[common], add_help=False,
                        help="verify MRD-ness of codes")
    sp.add_argument("--family", choices=["new", "gabidulin", "twisted"], default="new")
    sp.add_argument("-k", type=int, default=None, help="dimension (Gabidulin / twisted)")
    sp.add_argument("-h", dest="h", default=None, help="parameter h of the new family")
    sp.add_argument("--eta", default=None)
    sp.add_argument("-s", type=int, default=1)
    sp.add_argument("--all-h", action="store_true")
    sp.add_argument("--all-sigma", action="store_true")
    sp.add_argument("--method", choices=["auto", "fiber", "enumerate"], default="auto")

    sp = sub.add_parser("invariants", parents=[common], add_help=False,
                        help="invariant profile or inequivalence verdict")
    _code_args(sp)
    _code_args(sp, "vs_")
    sp.add_argument("--compare", action="store_true",
                    help="compare with the --vs-* code (defaults to the Gabidulin code G_2)")
    sp.add_argument("--i-max", type=int, default=2)
    sp.add_argument("--no-idealizers", action="store_true")
    sp.add_argument("--no-distance", action="store_true")

    sp = sub.add_parser("witness", parents=[common], add_help=False,
                        help="explicit equivalence between two codes of the new family")
    sp.add_argument("--case", choices=list(inv.CASES), required=True)
    sp.add_argument("-h", dest="h", required=True)
    sp.add_argument("-k", dest="k", default=None)
    sp.add_argument("-s", type=int, default=1)
    sp.add_argument("--rho", type=int, default=None, help="force rho = x^(p^rho)")

    sp = sub.add_parser("census", parents=[common], add_help=False,
                        help="number of equivalence classes")
    sp.add_argument("--enumerate", action="store_true", help="also run the orbit enumeration")
    sp.add_argument("--method", choices=["auto", "roots", "dense"], default="auto")

    sub.add_parser("selftest", parents=[common], add_help=False, help="quick smoke checks")
    return parser


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    modulus = None
    if ns.modulus:
        try:
            modulus = tuple(int(c) for c in ns.modulus.split(","))
        except ValueError as exc:
            raise UsageError(f"bad --modulus {ns.modulus!r}") from exc
    cap = ns.cap if ns.cap is not None else rc.default_cap()
    skip = {"p", "r", "t", "modulus", "fmt", "seed", "jobs", "cap", "command"}
    opts = {k: v for k, v in vars(ns).items() if k not in skip}
    if ns.command == "invariants":
        if opts.get("compare") and not opts.get("vs_family"):
            opts["vs_family"] = "gabidulin"
        if not opts.get("compare"):
            opts["vs_family"] = None
    return RunConfig(ns.p, ns.r, ns.t, modulus, ns.fmt, ns.seed, max(1, ns.jobs), cap,
                     ns.command, opts)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        cfg = config_from_args(ns)
        code, report = COMMANDS[cfg.command](cfg)
    except (UsageError, FieldError, SkewError, rc.NormConditionError, ValueError) as exc:
        print(json.dumps({"error": str(exc)}), file=sys.stderr)
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    sys.stdout.write(render(cfg.command, report, cfg.fmt))
    return code


if __name__ == "__main__":
    sys.exit(main())
