"""Command line interface.

Exit status: 0 on success, 1 when a verification suite finds a violation,
2 on usage or validation errors.  Machine-readable output carries a
top-level ``"schema": "v1"`` field.
"""

from __future__ import annotations

import argparse
import csv
import inspect
import io
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from . import bounds, dlvp, energy, scattered, spectral, structure, verify
from .zp_core import PrimeContext, ZpError, ZpSet, parse_set_literal, read_set_file

SCHEMA = "v1"
EXIT_OK, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    p: Optional[int]
    precision: str
    eps: float
    C: float
    seed: Optional[int]
    budget: int
    output_format: str
    threads: int

    def validate(self) -> None:
        if self.eps <= 0:
            raise UsageError(f"--eps must be positive, got {self.eps}")
        if self.C <= 0:
            raise UsageError(f"-C must be positive, got {self.C}")
        if self.budget < 1:
            raise UsageError(f"--budget must be positive, got {self.budget}")
        if self.threads < 1:
            raise UsageError(f"--threads must be at least 1, got {self.threads}")

    def context(self) -> PrimeContext:
        if self.p is None:
            raise UsageError("this command needs a modulus: pass -p PRIME")
        return PrimeContext(self.p, self.precision)

    def require_seed(self, what: str) -> int:
        if self.seed is None:
            if self.output_format in ("json", "csv"):
                raise UsageError(f"{what} is randomised: pass --seed for reproducible output")
            return 0
        return self.seed


def clean(obj):
    """Make an object strict-JSON safe (NaN and infinities become null)."""
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {str(k): clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [clean(v) for v in obj]
    return obj


def emit(payload: dict, fmt: str, out) -> None:
    payload = {"schema": SCHEMA, **payload}
    if fmt == "human":
        for key, value in payload.items():
            if isinstance(value, (dict, list)):
                value = json.dumps(clean(value))
            out.write(f"{key}: {value}\n")
    else:
        out.write(json.dumps(clean(payload), sort_keys=True, indent=2) + "\n")


def emit_csv(rows: list[dict], fields: list[str], out) -> None:
    writer = csv.DictWriter(out, fieldnames=fields, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)


def load_set(args, ctx: Optional[PrimeContext]):
    if args.set is not None and args.set_file is not None:
        raise UsageError("give either --set or --set-file, not both")
    if args.set is not None:
        values = parse_set_literal(args.set)
    elif args.set_file is not None:
        values = read_set_file(args.set_file)
    else:
        raise UsageError("this command needs a set: pass --set or --set-file")
    if ctx is None:
        return values
    return ZpSet.from_iterable(ctx, values)


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _complex_list(text: str) -> list[complex]:
    try:
        return [complex(t.strip().replace(" ", "")) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _float_list(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


# -- commands ---------------------------------------------------------------

def cmd_norm(args, cfg: RunConfig, out) -> int:
    ctx = cfg.context()
    A = load_set(args, ctx)
    spec = spectral.indicator_spectrum(A, args.method)
    norm, err = spectral.wiener_norm(A, args.method)
    payload = {"command": "norm", "p": ctx.p, "set_size": A.cardinality,
               "norm": norm, "err_bound": err}
    if args.spectrum:
        payload["spectrum"] = spec.to_json()
    if args.figure:
        from .plotting import plot_spectrum
        payload["figure"] = str(plot_spectrum(spec, args.figure))
    emit(payload, cfg.output_format, out)
    return EXIT_OK


def cmd_energy(args, cfg: RunConfig, out) -> int:
    if args.k < 1:
        raise UsageError("-k must be a positive integer")
    if args.domain == "zp":
        ctx = cfg.context()
        Q = load_set(args, ctx)
        report = energy.nk_profile(Q, args.k)
        report.spectral_estimate = energy.t_k_spectral(Q, args.k)
    else:
        Q = load_set(args, None)
        if not Q:
            raise UsageError("the set must be nonempty")
        report = energy.nk_profile(Q, args.k)
    emit({"command": "energy", **report.to_json(include_profile=args.profile)},
         cfg.output_format, out)
    return EXIT_OK


def cmd_verify(args, cfg: RunConfig, out) -> int:
    fn = verify.SUITES[args.suite]
    seed = cfg.seed if cfg.seed is not None else 0
    kwargs = {"seed": seed}
    params = inspect.signature(fn).parameters
    if args.trials is not None:
        if args.trials < 1:
            raise UsageError("--trials must be positive")
        kwargs["trials"] = args.trials
    if cfg.p is not None:
        if "primes" not in params:
            raise UsageError(f"suite {args.suite!r} does not take -p")
        PrimeContext(cfg.p)
        kwargs["primes"] = (cfg.p,)
    result = fn(**kwargs)
    emit({"command": "verify", "seed": seed, **result.to_json()}, cfg.output_format, out)
    return EXIT_OK if result.ok else EXIT_VIOLATION


def cmd_trace(args, cfg: RunConfig, out) -> int:
    ctx = cfg.context()
    A = load_set(args, ctx)
    rep = scattered.trace_theorem3(A, eps=cfg.eps, C=cfg.C, k_override=args.k_override)
    if cfg.output_format == "human":
        emit({"command": "trace", **rep.to_json()}, "human", out)
    else:
        payload = json.loads(rep.dumps())
        payload["command"] = "trace"
        out.write(json.dumps(clean(payload), sort_keys=True, indent=2) + "\n")
    return EXIT_OK


def cmd_search(args, cfg: RunConfig, out) -> int:
    if cfg.p is None:
        raise UsageError("search needs -p")
    seed = cfg.require_seed("local_search") if args.strategy == "local_search" else 0
    results = []
    for n in args.n:
        if not 1 <= n < cfg.p:
            raise UsageError(f"need 1 <= n < p, got n={n}, p={cfg.p}")
        results.append(bounds.extremal_search(cfg.p, n, args.strategy, seed, cfg.budget,
                                              args.reduce_orbits, cfg.threads))
    if args.figure:
        from .plotting import plot_search
        plot_search(results, args.figure)
    if cfg.output_format == "csv":
        out.write(bounds.results_to_csv(results))
    else:
        emit({"command": "search", "results": [r.to_json() for r in results]},
             cfg.output_format, out)
    return EXIT_OK


def cmd_dilate(args, cfg: RunConfig, out) -> int:
    ctx = cfg.context()
    w = structure.find_dilate(ctx, args.generators, args.targets)
    payload = {"command": "dilate", "p": ctx.p, "found": w is not None}
    if w is not None:
        payload.update(w.to_json())
    emit(payload, cfg.output_format, out)
    return EXIT_OK


def cmd_localize(args, cfg: RunConfig, out) -> int:
    ctx = cfg.context()
    A = load_set(args, ctx)
    loc = structure.localize(A, args.m)
    emit({"command": "localize", "p": ctx.p, "m": args.m, **loc.to_json(),
          "B": list(loc.B)}, cfg.output_format, out)
    return EXIT_OK


def cmd_gap(args, cfg: RunConfig, out) -> int:
    ctx = cfg.context()
    P = structure.GapDescriptor.parse(args.gap)
    members = structure.gap_enumerate(P, ctx)
    emit({"command": "gap", "p": ctx.p, **P.to_json(), "cardinality": members.cardinality,
          "proper": members.cardinality == P.size, "members": list(members)},
         cfg.output_format, out)
    return EXIT_OK


def cmd_vdp_check(args, cfg: RunConfig, out) -> int:
    ctx = cfg.context()
    orders = [args.n] if args.n is not None else None
    table = dlvp.vdp_norm_table(ctx, orders)
    rows = [{"n": n, "norm": v, "ceiling": 3 * ctx.p, "holds": v <= 3 * ctx.p * (1 + 1e-12)}
            for n, v in table]
    if args.figure:
        from .plotting import plot_vdp_norms
        plot_vdp_norms(table, ctx.p, args.figure)
    ok = all(r["holds"] for r in rows)
    if cfg.output_format == "csv":
        emit_csv(rows, ["n", "norm", "ceiling", "holds"], out)
    else:
        emit({"command": "vdp-check", "p": ctx.p, "all_hold": ok, "orders": rows},
             cfg.output_format, out)
    return EXIT_OK if ok else EXIT_VIOLATION


def cmd_quad(args, cfg: RunConfig, out) -> int:
    coeffs = args.coeffs if args.coeffs is not None else [1.0] * len(args.freqs)
    res = dlvp.continuous_l1(args.freqs, coeffs)
    emit({"command": "quad", **res.to_json()}, cfg.output_format, out)
    return EXIT_OK


def cmd_profile(args, cfg: RunConfig, out) -> int:
    if cfg.p is None:
        raise UsageError("profile needs -p")
    rows = bounds.ap_norm_profile(cfg.p, args.lengths, cfg.precision)
    if args.figure:
        from .plotting import plot_ap_profile
        plot_ap_profile(rows, cfg.p, args.figure)
    dicts = [{"n": r.n, "norm": repr(r.norm), "err_bound": repr(r.err_bound),
              "ratio": "" if math.isnan(r.ratio) else repr(r.ratio),
              "in_range": int(r.in_range)} for r in rows]
    if cfg.output_format == "csv":
        emit_csv(dicts, ["n", "norm", "err_bound", "ratio", "in_range"], out)
    else:
        emit({"command": "profile", "p": cfg.p,
              "rows": [vars(r) for r in rows]}, cfg.output_format, out)
    return EXIT_OK


def cmd_report(args, cfg: RunConfig, out) -> int:
    """AP profile, extremal search and kernel norms as CSV plus PNG figures."""
    from .plotting import plot_ap_profile, plot_search, plot_vdp_norms

    seed = cfg.seed if cfg.seed is not None else 0
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    p = cfg.p if cfg.p is not None else 2003
    written = []

    lengths = [n for n in (2**j for j in range(1, 20)) if n < p / 2]
    rows = bounds.ap_norm_profile(p, lengths)
    buf = io.StringIO()
    emit_csv([{"n": r.n, "norm": repr(r.norm), "ratio": repr(r.ratio)} for r in rows],
             ["n", "norm", "ratio"], buf)
    (outdir / "ap_profile.csv").write_text(buf.getvalue())
    written += ["ap_profile.csv", plot_ap_profile(rows, p, outdir / "ap_profile.png").name]

    sp = args.search_p
    results = []
    for n in range(1, min(sp, args.search_max_n + 1)):
        strategy = "exhaustive" if math.comb(sp, n) <= args.exhaustive_limit else "local_search"
        results.append(bounds.extremal_search(sp, n, strategy, seed, cfg.budget,
                                              threads=cfg.threads))
    (outdir / "search.csv").write_text(bounds.results_to_csv(results))
    written += ["search.csv", plot_search(results, outdir / "search.png").name]

    vp = args.vdp_p
    table = dlvp.vdp_norm_table(PrimeContext(vp))
    buf = io.StringIO()
    emit_csv([{"n": n, "norm": repr(v), "norm_over_p": repr(v / vp)} for n, v in table],
             ["n", "norm", "norm_over_p"], buf)
    (outdir / "vdp_norms.csv").write_text(buf.getvalue())
    written += ["vdp_norms.csv", plot_vdp_norms(table, vp, outdir / "vdp_norms.png").name]

    emit({"command": "report", "outdir": str(outdir), "files": written},
         "json" if cfg.output_format == "csv" else cfg.output_format, out)
    return EXIT_OK


# -- parser -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-p", type=int, default=None, help="odd prime modulus")
    common.add_argument("--set", default=None, help='residues, e.g. "0,1,4"')
    common.add_argument("--set-file", default=None,
                        help="file with one integer per line (# comments allowed)")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--format", dest="output_format", default=None,
                        choices=("json", "csv", "human"))
    common.add_argument("--precision", default="float64", choices=("float64", "extended"))
    common.add_argument("--eps", type=float, default=0.1)
    common.add_argument("-C", type=float, default=1.0, dest="C")
    common.add_argument("--budget", type=int, default=None)

    parser = argparse.ArgumentParser(
        prog="wienerzp",
        description="Wiener norms, additive energies and related checks on Z_p.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_, **kw):
        sp = sub.add_parser(name, parents=[common], help=help_, **kw)
        sp.set_defaults(func=func)
        return sp

    sp = add("norm", cmd_norm, "Wiener norm of a set")
    sp.add_argument("--method", choices=spectral.METHODS, default="fft")
    sp.add_argument("--spectrum", action="store_true", help="include the full spectrum")
    sp.add_argument("--figure", default=None, help="write a spectrum plot here")

    sp = add("energy", cmd_energy, "exact T_k and N_k profile")
    sp.add_argument("-k", type=int, default=2)
    sp.add_argument("--domain", choices=("zp", "z"), default="zp")
    sp.add_argument("--profile", action="store_true", help="include the N_k profile")

    sp = add("verify", cmd_verify, "run an inequality/identity suite")
    sp.add_argument("suite", choices=sorted(verify.SUITES))
    sp.add_argument("--trials", type=int, default=None)

    sp = add("trace", cmd_trace, "instrumented run of the medium-size argument")
    sp.add_argument("--k-override", type=int, default=None)

    sp = add("search", cmd_search, "extremal (minimal-norm) set search")
    sp.add_argument("-n", type=_int_list, required=True, help="set size(s), comma separated")
    sp.add_argument("--strategy", choices=bounds.STRATEGIES, default="exhaustive")
    sp.add_argument("--reduce-orbits", action="store_true")
    sp.add_argument("--figure", default=None)

    sp = add("dilate", cmd_dilate, "smallest q shrinking generators into windows")
    sp.add_argument("--generators", type=_int_list, required=True)
    sp.add_argument("--targets", type=_int_list, required=True)

    sp = add("localize", cmd_localize, "best dilate of a set into [-m, m]")
    sp.add_argument("-m", type=int, required=True)

    sp = add("gap", cmd_gap, "enumerate a generalized arithmetic progression")
    sp.add_argument("--gap", required=True, help='"x0; x1,...,xd; w1,...,wd"')

    sp = add("vdp-check", cmd_vdp_check, "kernel norms against 3p")
    sp.add_argument("-n", type=int, default=None, help="single order (default: all n <= p/4)")
    sp.add_argument("--figure", default=None)

    sp = add("quad", cmd_quad, "continuous L1 norm of an exponential sum")
    sp.add_argument("--freqs", type=_float_list, required=True)
    sp.add_argument("--coeffs", type=_complex_list, default=None)

    sp = add("profile", cmd_profile, "Wiener norms of arithmetic progressions")
    sp.add_argument("--lengths", type=_int_list, required=True)
    sp.add_argument("--figure", default=None)

    sp = add("report", cmd_report, "CSV tables and figures in one directory")
    sp.add_argument("--outdir", required=True)
    sp.add_argument("--search-p", type=int, default=13)
    sp.add_argument("--search-max-n", type=int, default=6)
    sp.add_argument("--exhaustive-limit", type=int, default=10**6)
    sp.add_argument("--vdp-p", type=int, default=101)
    return parser


DEFAULT_FORMAT = {"search": "csv", "profile": "csv"}
DEFAULT_BUDGET = {"search": bounds.EXHAUSTIVE_CAP, "report": 10**4}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    fmt = args.output_format or DEFAULT_FORMAT.get(args.command, "json")
    budget = args.budget if args.budget is not None else DEFAULT_BUDGET.get(args.command, 10**4)
    cfg = RunConfig(args.p, args.precision, args.eps, args.C, args.seed, budget, fmt,
                    args.threads)
    try:
        cfg.validate()
        return args.func(args, cfg, out)
    except (UsageError, ZpError, ValueError, OSError) as exc:
        print(f"wienerzp {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
