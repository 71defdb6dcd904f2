"""Command-line surface over the function algebra and the pipeline.

Every subcommand reads its inputs (inline JSON or file paths), runs the
corresponding library call under one numeric context, and writes a JSON
or CSV artifact.  Identical arguments and configuration produce
byte-identical output: numbers travel as decimal strings at the
context's digit budget, JSON keys are sorted, and nothing in the
product path is randomized (the test suite owns all RNG, so there is
no --seed flag).

Exit codes: 0 success, 1 usage error, 2 domain error, 3 ill-conditioned
computation that exhausted its precision budget.
"""

import argparse
import json
import math
import sys

from . import config as config_mod
from . import functions, geometry
from . import laguerre as laguerre_mod
from . import pick as pick_mod
from .errors import DomainError, HardymonoError
from .pipeline import (
    PipelineConfig,
    SubspaceSpec,
    TestFunction,
    approximate,
)

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


class _Parser(argparse.ArgumentParser):
    """Argument parser that exits 1 on usage errors (argparse uses 2)."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


# ------------------------------------------------------------ input readers

def _load_json_arg(value):
    """Inline JSON when the argument looks like JSON, else a file path."""
    text = value.strip()
    if text.startswith("{") or text.startswith("["):
        return json.loads(text)
    with open(value, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _load_fn(ctx, value):
    """A LogMonomialSum or indicator test function from JSON."""
    data = _load_json_arg(value)
    return TestFunction.from_json(data).build(ctx)


def _load_space(ctx, value):
    """ExponentMultiset from JSON ({"exponents": [...]}) or comma text."""
    try:
        data = _load_json_arg(value)
    except (OSError, json.JSONDecodeError):
        return geometry.ExponentMultiset.from_text_list(ctx, value)
    return geometry.ExponentMultiset.from_json(ctx, data)


def _load_exponent_sequence(ctx, value):
    """Exponent scalars from a file (one per line, commas allowed) or
    inline comma text; order is preserved, repeats are kept."""
    try:
        with open(value, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError:
        text = value
    tokens = []
    for line in text.splitlines() if "\n" in text else [text]:
        line = line.split("#", 1)[0]
        tokens.extend(tok.strip() for tok in line.split(",") if tok.strip())
    if not tokens:
        raise DomainError("empty exponent list")
    return [ctx.from_text(tok) for tok in tokens]


def _parse_n_list(text):
    """Stage list syntax: "4", "2,4,8", "1..12", or mixtures."""
    out = []
    for token in str(text).split(","):
        token = token.strip()
        if not token:
            continue
        if ".." in token:
            lo, _, hi = token.partition("..")
            lo, hi = int(lo), int(hi)
            if hi < lo:
                raise DomainError(f"bad stage range {token!r}")
            out.extend(range(lo, hi + 1))
        else:
            out.append(int(token))
    if not out:
        raise DomainError("empty stage list")
    return out


def _parse_complex_list(ctx, text):
    vals = [ctx.from_text(tok.strip())
            for tok in str(text).split(",") if tok.strip()]
    if not vals:
        raise DomainError("empty list")
    return vals


# ------------------------------------------------------------------ output

def _json_text(payload):
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def _write(path, text):
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _fmt_matrix(ctx, matrix):
    """Real matrices serialize as single strings per entry, complex ones
    as [re, im] pairs; the choice is made for the whole matrix so shapes
    stay homogeneous."""
    is_real = all(float(ctx.im(v)) == 0.0 for row in matrix for v in row)
    if is_real:
        return [[ctx.fmt_real(ctx.re(v)) for v in row] for row in matrix]
    return [[ctx.fmt_complex_pair(v) for v in row] for row in matrix]


# -------------------------------------------------------------- subcommands

def _cmd_apply(args, cfg):
    ctx = cfg.context()
    f = functions.sum_from_json(ctx, _load_json_arg(args.fn))
    op = functions.apply_hardy if args.op == "H" else functions.apply_hardy_adjoint
    return _json_text(functions.sum_to_json(ctx, op(ctx, f)))


def _cmd_gram(args, cfg):
    ctx = cfg.context()
    space = _load_space(ctx, args.exponents)
    g = geometry.gram(ctx, space)
    payload = {
        "labels": space.labels(ctx),
        "gram": _fmt_matrix(ctx, g),
    }
    return _json_text(payload)


def _cmd_dist(args, cfg):
    ctx = cfg.context()
    f = _load_fn(ctx, args.fn)
    space = _load_space(ctx, args.space)
    d_sq = geometry.dist_sq_to_space(ctx, f, space, method=args.method)
    d = geometry.dist_to_space(ctx, f, space, method=args.method)
    payload = {
        "dist": ctx.fmt_real(d),
        "dist_sq": ctx.fmt_real(d_sq),
        "method": args.method,
        "space": space.to_json(ctx),
    }
    return _json_text(payload)


def _cmd_project(args, cfg):
    ctx = cfg.context()
    f = _load_fn(ctx, args.fn)
    space = _load_space(ctx, args.space)
    coeffs, _, _ = geometry.project_coeffs(ctx, f, space)
    proj = geometry.project(ctx, f, space)
    d_sq = geometry.dist_sq_to_space(ctx, f, space)
    payload = {
        "coeffs": [ctx.fmt_complex_pair(c) for c in coeffs],
        "labels": space.labels(ctx),
        "projection": functions.sum_to_json(ctx, proj),
        "dist_sq": ctx.fmt_real(d_sq),
    }
    return _json_text(payload)


def _cmd_laguerre(args, cfg):
    ctx = cfg.context()
    if args.expand is not None:
        f = functions.sum_from_json(ctx, _load_json_arg(args.expand))
        nmax = args.nmax if args.nmax is not None else args.n
        coeffs = laguerre_mod.laguerre_coeffs(ctx, f, nmax)
        with ctx.guard():
            captured = sum((ctx.abs2(c) for c in coeffs), ctx.real(0))
            tail_sq = functions.norm_sq(ctx, f) - captured
        payload = {
            "coeffs": [ctx.fmt_complex_pair(c) for c in coeffs],
            "nmax": nmax,
            "tail_sq": ctx.fmt_real(tail_sq),
        }
        return _json_text(payload)
    e_n = laguerre_mod.laguerre_fn(ctx, args.n)
    return _json_text({"n": args.n, "fn": functions.sum_to_json(ctx, e_n)})


def _cmd_muntz(args, cfg):
    ctx = cfg.context()
    exps = _load_exponent_sequence(ctx, args.exponents)
    sums = geometry.muntz_partial_sums(ctx, exps, terms=args.terms)
    payload = {
        "partial_sums": [ctx.fmt_real(v) for v in sums],
        "terms": len(sums),
    }
    return _json_text(payload)


def _cmd_pick(args, cfg):
    ctx = cfg.context()
    points = _parse_complex_list(ctx, args.points)
    values = _parse_complex_list(ctx, args.values)
    system = pick_mod.PickSystem.build(ctx, points, values, bound=args.bound)
    matrix = pick_mod.pick_matrix(ctx, system)
    report = pick_mod.is_psd(ctx, matrix, tol=cfg.psd_tol)
    payload = {
        "psd": bool(report.verdict),
        "min_eig": ctx.fmt_real(ctx.real(report.min_eig)),
        "rank": report.rank,
        "min_pivot": repr(float(report.min_pivot)),
    }
    return _json_text(payload)


def _cmd_scaling(args, cfg):
    ctx = cfg.context()
    moments = pick_mod.MomentSequence.from_json(ctx, _load_json_arg(args.moments))
    if args.N is not None:
        moments = moments.truncated(ctx, args.N + 1)
    result = pick_mod.max_scaling_constant(ctx, moments)
    payload = {
        "C": ctx.fmt_real(ctx.real(result.c_value)),
        "N": len(moments.values) - 1,
        "gamma": [ctx.fmt_complex_pair(g) for g in result.gamma],
        "degenerate": result.degenerate,
        "bisection_tol": repr(float(result.bisection_tol)),
        "kernel_residual": repr(float(result.kernel_residual)),
    }
    return _json_text(payload)


def _cmd_approximate(args, cfg):
    spec = SubspaceSpec.from_json(_load_json_arg(args.subspace))
    n_list = _parse_n_list(args.N)
    tests = []
    if args.tests is not None:
        data = _load_json_arg(args.tests)
        if isinstance(data, dict):
            data = [data]
        tests = [TestFunction.from_json(item) for item in data]
    pconfig = PipelineConfig(
        bits=cfg.bits,
        tolerances=cfg.context_tolerances() or None)
    report = approximate(spec, n_list, config=pconfig, tests=tests)
    if args.csv is not None:
        _write(args.csv, report.csv_text())
    if (cfg.format or "json") == "csv":
        return report.csv_text()
    return _json_text(report.to_json())


def _cmd_experiment_roots(args, cfg):
    ctx = cfg.context()
    s = ctx.from_text(args.s)
    logpow = args.logpow if args.logpow is not None else args.m - 1
    if not 0 <= logpow < args.m:
        raise DomainError(f"--logpow must lie in [0, m), got {logpow}")
    f = functions.log_power(ctx, logpow, s=s)
    h_list = [float(tok) for tok in str(args.h).split(",") if tok.strip()]
    if not h_list:
        raise DomainError("empty h list")
    rows = []
    prev = None
    for h in h_list:
        space = geometry.roots_of_unity_space(ctx, s, args.m, h)
        d = float(geometry.dist_to_space(ctx, f, space))
        slope = ""
        if prev is not None and prev[1] > 0.0 and d > 0.0:
            slope = repr(math.log(d / prev[1]) / math.log(h / prev[0]))
        rows.append((h, d, slope))
        prev = (h, d)
    if (cfg.format or "csv") == "json":
        payload = {"rows": [{"h": repr(h), "dist": repr(d), "slope": sl}
                            for h, d, sl in rows]}
        return _json_text(payload)
    lines = ["h,dist,slope"]
    lines += [f"{h!r},{d!r},{sl}" for h, d, sl in rows]
    return "\n".join(lines) + "\n"


def recovery_exponents(dim):
    """Deterministic low-discrepancy exponents in (-0.35, 2.95).

    Golden-ratio rotation keeps every pair at least ~0.29 apart through
    dimension 6, so the recovery sweep needs no random draws.
    """
    return [round((k * _GOLDEN) % 1.0 * 3.3 - 0.35, 12)
            for k in range(1, int(dim) + 1)]


def _cmd_experiment_recovery(args, cfg):
    bits = cfg.bits if cfg.bits is not None else 128
    ctx = cfg.context(default_bits=bits)
    rows = []
    for dim in _parse_n_list(args.dims):
        if not 1 <= dim <= 6:
            raise DomainError("recovery sweep covers dimensions 1..6")
        targets = recovery_exponents(dim)
        spec = SubspaceSpec.monomial(
            ctx, ",".join(repr(t) for t in targets))
        pconfig = PipelineConfig(
            bits=bits, tolerances=cfg.context_tolerances() or None)
        report = approximate(spec, [dim], config=pconfig)
        rec = report.records[-1]
        rctx = rec.context()
        recovered = [float(rctx.re(s))
                     for s, mult in rec.exponents_reduced.entries
                     for _ in range(mult)]
        err = max(min(abs(r - t) for r in recovered) for t in targets) \
            if recovered else math.inf
        rows.append((dim, rec.c_float, err))
    if (cfg.format or "csv") == "json":
        payload = {"rows": [{"dim": d, "C": repr(c), "max_exponent_error": repr(e)}
                            for d, c, e in rows]}
        return _json_text(payload)
    lines = ["dim,C,max_exponent_error"]
    lines += [f"{d},{c!r},{e!r}" for d, c, e in rows]
    return "\n".join(lines) + "\n"


# ------------------------------------------------------------------ parser

def _build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH",
                        help="flat key = value config file")
    common.add_argument("--bits", type=int, choices=config_mod.ALLOWED_BITS,
                        help="working precision (53 = double)")
    common.add_argument("--out", metavar="PATH",
                        help="write the artifact here instead of stdout")
    common.add_argument("--format", choices=("json", "csv"),
                        help="artifact shape where both exist")
    common.add_argument("--psd-tol", type=float, dest="psd_tol")
    common.add_argument("--root-cluster-tol", type=float,
                        dest="root_cluster_tol")
    common.add_argument("--membership-tol", type=float, dest="membership_tol")
    common.add_argument("--exponent-merge-tol", type=float,
                        dest="exponent_merge_tol")

    root = _Parser(
        prog="hardymono",
        description="Hardy-operator monomial subspace toolkit")
    sub = root.add_subparsers(dest="command", required=True,
                              parser_class=_Parser)

    p = sub.add_parser("apply", parents=[common],
                       help="apply H or H* to a log-monomial sum")
    p.add_argument("--op", choices=("H", "Hstar"), required=True)
    p.add_argument("--fn", required=True,
                   help="function JSON (inline or file path)")
    p.set_defaults(handler=_cmd_apply)

    p = sub.add_parser("gram", parents=[common],
                       help="Gram matrix of a generalized monomial space")
    p.add_argument("--exponents", required=True,
                   help="comma list like 0,1 or exponent-multiset JSON")
    p.set_defaults(handler=_cmd_gram)

    p = sub.add_parser("dist", parents=[common],
                       help="distance from a function to a monomial space")
    p.add_argument("--fn", required=True)
    p.add_argument("--space", required=True)
    p.add_argument("--method", choices=("residual", "detratio"),
                   default="residual")
    p.set_defaults(handler=_cmd_dist)

    p = sub.add_parser("project", parents=[common],
                       help="orthogonal projection onto a monomial space")
    p.add_argument("--fn", required=True)
    p.add_argument("--space", required=True)
    p.set_defaults(handler=_cmd_project)

    p = sub.add_parser("laguerre", parents=[common],
                       help="Laguerre basis functions and expansions")
    p.add_argument("--n", type=int, required=True,
                   help="basis index, or max index with --expand")
    p.add_argument("--expand", metavar="FN",
                   help="expand this function in e_0..e_n")
    p.add_argument("--nmax", type=int,
                   help="override the expansion cutoff")
    p.set_defaults(handler=_cmd_laguerre)

    p = sub.add_parser("muntz", parents=[common],
                       help="partial sums of the density criterion series")
    p.add_argument("--exponents", required=True,
                   help="file of exponents (or inline comma list)")
    p.add_argument("--terms", type=int)
    p.set_defaults(handler=_cmd_muntz)

    p = sub.add_parser("pick", parents=[common],
                       help="positivity test for an interpolation matrix")
    p.add_argument("--points", required=True, help="comma list of s_i")
    p.add_argument("--values", required=True, help="comma list of alpha(s_i)")
    p.add_argument("--bound", type=float, default=1.0)
    p.set_defaults(handler=_cmd_pick)

    p = sub.add_parser("scaling", parents=[common],
                       help="largest PSD-preserving scaling constant")
    p.add_argument("--moments", required=True,
                   help="moment sequence JSON (inline or file)")
    p.add_argument("--N", type=int,
                   help="truncate to moments m_0..m_N first")
    p.set_defaults(handler=_cmd_scaling)

    p = sub.add_parser("approximate", parents=[common],
                       help="full subspace-to-monomial-spaces pipeline")
    p.add_argument("--subspace", required=True,
                   help="subspace spec JSON (inline or file)")
    p.add_argument("--N", required=True,
                   help='stages, e.g. "4", "2,4,8", "1..12"')
    p.add_argument("--tests", metavar="PATH",
                   help="JSON list of labelled test functions")
    p.add_argument("--csv", metavar="PATH",
                   help="also write the convergence table here")
    p.set_defaults(handler=_cmd_approximate)

    pe = sub.add_parser("experiment", help="experiment drivers")
    esub = pe.add_subparsers(dest="experiment", required=True,
                             parser_class=_Parser)

    p = esub.add_parser("roots-of-unity", parents=[common],
                        help="h -> 0 distance rates for rotated exponents")
    p.add_argument("--s", required=True, help="center exponent")
    p.add_argument("--m", type=int, required=True,
                   help="number of roots of unity")
    p.add_argument("--h", required=True, help="comma list of radii")
    p.add_argument("--logpow", type=int,
                   help="log power of the test function (default m-1)")
    p.set_defaults(handler=_cmd_experiment_roots)

    p = esub.add_parser("recovery", parents=[common],
                        help="exact recovery sweep over fixed exponent sets")
    p.add_argument("--dims", default="1,2,3,4",
                   help='dimensions to run, e.g. "1..4" (default 1,2,3,4)')
    p.set_defaults(handler=_cmd_experiment_recovery)

    return root


def _resolve_config(args):
    flags = {key: getattr(args, key, None) for key in config_mod.CONFIG_KEYS}
    return config_mod.load_config(path=getattr(args, "config", None),
                                  flags=flags)


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _resolve_config(args)
        text = args.handler(args, cfg)
        _write(cfg.out, text)
    except HardymonoError as err:
        print(f"error: {err}", file=sys.stderr)
        return err.exit_code
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except json.JSONDecodeError as err:
        print(f"error: bad JSON input: {err}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
