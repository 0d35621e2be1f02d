"""
Command-line front end: one subcommand per library entry point, CSV out.

Exit codes: 0 on success, 2 on a usage error, 1 when a verification sweep
reports a violation or output cannot be written.
"""
from __future__ import annotations

import argparse
import csv
import io
import logging
import os
import sys
from pathlib import Path
from typing import Sequence

from . import asymptotics, dynamics, maximal, rearrangement
from .weights import K_LIMIT, WeightKind, WeightTable, build_weight_table, dump_table, load_table

#: Environment variable naming the default table cache directory.
CACHE_ENV = "PRIMEOMEGA_CACHE"

log = logging.getLogger("primeomega")


class UsageError(Exception):
    pass


class VerificationFailure(Exception):
    pass


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.12g}"
    return str(v)


def emit_csv(header: Sequence[str], rows, path: str | None) -> None:
    """Write UTF-8 CSV with LF endings to ``path``, or stdout if ``path`` is None or ``-``."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    emit_csv_text(buf.getvalue(), path)


def emit_csv_text(text: str, path: str | None) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


# --------------------------------------------------------------------------
# argument types


def _kmax(text: str) -> int:
    try:
        k = int(float(text)) if "e" in text.lower() else int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 1 <= k <= K_LIMIT:
        raise argparse.ArgumentTypeError(f"k_max must be in [1, {K_LIMIT}]")
    return k


def _kind(text: str) -> WeightKind:
    try:
        return WeightKind.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _int_list(text: str) -> list[int]:
    try:
        return [int(float(x)) if "e" in x.lower() else int(x) for x in text.split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _grid(text: str) -> list[int]:
    """``a..b`` (inclusive) or a comma-separated list."""
    try:
        if ".." in text:
            a, b = text.split("..")
            vals = list(range(int(a), int(b) + 1))
        else:
            vals = [int(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}") from None
    if not vals or min(vals) < 0:
        raise argparse.ArgumentTypeError("grid must be nonempty and nonnegative")
    return vals


def _positive(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not v > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


# --------------------------------------------------------------------------
# tables


def _cache_dir(arg: str | None) -> Path | None:
    if arg is None:
        return None
    if arg:
        return Path(arg)
    return Path(os.environ.get(CACHE_ENV) or Path.home() / ".cache" / "primeomega")


def get_table(k_max: int, kind: WeightKind, cache: str | None = None) -> WeightTable:
    """Build a table, or load/store it in the cache directory when ``cache`` is given."""
    folder = _cache_dir(cache)
    if folder is None:
        log.info("sieving %s up to %d", kind.value, k_max)
        return build_weight_table(k_max, kind)
    path = folder / f"{kind.value}-{k_max}.pwgt"
    if path.exists():
        log.info("loading %s", path)
        return load_table(path)
    table = build_weight_table(k_max, kind)
    folder.mkdir(parents=True, exist_ok=True)
    dump_table(table, path)
    log.info("cached %s", path)
    return table


# --------------------------------------------------------------------------
# subcommands


def cmd_sieve(args) -> int:
    table = get_table(args.kmax, args.kind, args.cache)
    rows = ((n, int(table.values[n]), int(table.prefix[n])) for n in range(1, table.k_max + 1))
    emit_csv(["n", "g", "S"], rows, args.output)
    return 0


_DIAGNOSTICS = ("hardy_wright_drift", "mertens_drift", "norton_ratio", "power_sum_ratio", "delange_ratio", "s_power_lower_constant", "dyadic_comparability")


def cmd_asymptotics(args) -> int:
    cps = args.checkpoints
    if sorted(set(cps)) != cps:
        raise UsageError("checkpoints must be strictly increasing")
    k_max = args.kmax or max(cps)
    if max(cps) > k_max:
        raise UsageError(f"checkpoint {max(cps)} exceeds --kmax {k_max}")
    wanted = args.diagnostic or list(_DIAGNOSTICS)
    series = []
    for kind in args.kind or [WeightKind.LITTLE_OMEGA, WeightKind.BIG_OMEGA]:
        need = 1 << (k_max - 1).bit_length() if "dyadic_comparability" in wanted else k_max
        table = get_table(max(need, 2), kind, args.cache)
        for name in wanted:
            if name == "delange_ratio":
                series += [asymptotics.delange_ratio(table, m, [K for K in cps if K >= 16]) for m in range(1, args.max_m + 1)]
            elif name == "dyadic_comparability":
                c = asymptotics.dyadic_comparability(table, k_max)
                series.append(asymptotics.RatioSeries(name, kind, (k_max,), (c.constant,), c.constant, c.argmax))
            else:
                fn = getattr(asymptotics, name)
                lo = 16 if name in ("hardy_wright_drift", "power_sum_ratio", "s_power_lower_constant") else 4 if name == "mertens_drift" else 2
                series.append(fn(table, [K for K in cps if K >= lo]))
    text = asymptotics.series_to_csv(series)
    emit_csv_text(text, args.output)
    return 0


def cmd_rearrange(args) -> int:
    try:
        ex = rearrangement.exhaustive_check(args.max_k, args.max_nu, args.grid, args.fix_first)
    except OverflowError as exc:
        raise UsageError(str(exc)) from None
    rows = [("exhaustive", ex.total, ex.passed, ex.total - ex.passed, ex.worst_slack)]
    failed = ex.passed != ex.total
    if args.random:
        sw = rearrangement.random_normalization_sweep(args.random, args.random_max_k, args.random_max_nu, args.seed)
        rows.append(("normalization", sw.total, sw.passed, sw.total - sw.passed, ""))
        failed |= sw.passed != sw.total
    emit_csv(["check", "total", "passed", "failed", "worst_slack"], rows, args.output)
    if failed:
        raise VerificationFailure("rearrangement inequality violated")
    return 0


def _scales(args) -> list[int]:
    if args.min_exp > args.max_exp or args.min_exp < 1:
        raise UsageError("need 1 <= --min-exp <= --max-exp")
    return [2**s for s in range(args.min_exp, args.max_exp + 1)]


def cmd_maximal(args) -> int:
    scales = _scales(args)
    table = get_table(args.kmax, args.kind, args.cache)
    try:
        for spec in args.corpus:
            maximal.corpus_at_scale(spec, 2)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    rows = []
    for spec, s, rep in maximal.weak_type_sweep(args.corpus, scales, args.lam, table, args.mode):
        rows.append((spec, s, args.lam, rep.level_count, rep.l1_mass, rep.ratio))
    emit_csv(["corpus", "scale", "lambda", "count", "l1", "ratio"], rows, args.output)
    return 0


def cmd_dynamics(args) -> int:
    try:
        obs = dynamics.parse_observable(args.observable)
        cps = args.checkpoints
        if sorted(set(cps)) != cps or cps[0] < 2:
            raise ValueError("checkpoints must be strictly increasing and at least 2")
        systems = [dynamics.make_system(args.system, args.alpha, args.p, s) for s in args.seed]
        for spec in systems:
            dynamics.known_mean(spec, obs)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    table = get_table(max(cps[-1], 2), args.kind, args.cache)
    rows = []
    for spec in systems:
        label = args.system if len(systems) == 1 else f"{args.system}/seed={spec.seed}"
        for i, series in enumerate(dynamics.convergence_sweep(spec, obs, cps, table, args.points)):
            for K, w, u in zip(series.checkpoints, series.weighted, series.unweighted):
                rows.append((label, args.observable, i, K, w, u))
    emit_csv(["system", "observable", "x0_index", "K", "weighted_error", "unweighted_error"], rows, args.output)
    return 0


def cmd_certify(args) -> int:
    table = get_table(args.kmax, args.kind, args.cache)
    fitted, _ = maximal.fit_moment_constant(table)
    c_gmax = args.safety * fitted
    rows, bad = [], 0
    for spec in args.corpus:
        try:
            phi = maximal.corpus_at_scale(spec, args.length)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        cert = maximal.claim_certificate(phi, table, c_gmax)
        bad += len(cert.violations)
        rows.append((spec, args.length, cert.direct_count, cert.small_scale, cert.light, cert.heavy, cert.bound, c_gmax, len(cert.violations)))
    emit_csv(["corpus", "scale", "direct", "small_scale", "light", "heavy", "bound", "c_gmax", "violations"], rows, args.output)
    if bad:
        raise VerificationFailure(f"{bad} certificate violations")
    return 0


# --------------------------------------------------------------------------
# parser


DEFAULT_CORPUS = ["delta:50", "indicator", "indicator::2", "random:0.1:0", "random:0.01:0"]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="primeomega", description="Prime-divisor weighted averages: sieves, diagnostics and maximal-function sweeps.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, kind=True, kmax=None):
        sp.add_argument("-o", "--output", default=None, help="CSV path (default stdout)")
        sp.add_argument(
            "--cache", nargs="?", const="", default=None, metavar="DIR",
            help=f"load/store weight tables in DIR (default ${CACHE_ENV} or ~/.cache/primeomega)",
        )
        sp.add_argument("-v", "--verbose", action="count", default=0)
        if kind:
            sp.add_argument("--kind", type=_kind, default=WeightKind.BIG_OMEGA, help="little-omega or big-omega")
        if kmax is not None:
            sp.add_argument("--kmax", type=_kmax, default=kmax, help="weight table bound")

    sp = sub.add_parser("sieve", help="tabulate n, g(n), S_g(n)")
    sp.add_argument("--kmax", type=_kmax, required=True)
    common(sp)
    sp.set_defaults(func=cmd_sieve)

    sp = sub.add_parser("asymptotics", help="checkpointed drift and ratio diagnostics")
    common(sp, kind=False)
    sp.add_argument("--kind", type=_kind, action="append", help="repeatable; default both")
    sp.add_argument("--kmax", type=_kmax, default=None, help="default: largest checkpoint")
    sp.add_argument("--checkpoints", type=_int_list, default=list(asymptotics.DEFAULT_CHECKPOINTS))
    sp.add_argument("--diagnostic", action="append", choices=_DIAGNOSTICS)
    sp.add_argument("--max-m", type=int, default=3, help="largest moment for delange_ratio")
    sp.set_defaults(func=cmd_asymptotics)

    sp = sub.add_parser("rearrange-test", help="exhaustive permutation-product inequality check")
    common(sp, kind=False)
    sp.add_argument("--max-k", type=int, default=4)
    sp.add_argument("--max-nu", type=int, default=3)
    sp.add_argument("--grid", type=_grid, default=[0, 1, 2, 3], help="a..b or comma list")
    sp.add_argument("--fix-first", action="store_true", help="pin the first permutation to the identity")
    sp.add_argument("--random", type=int, default=0, metavar="N", help="also normalize N random systems")
    sp.add_argument("--random-max-k", type=int, default=12)
    sp.add_argument("--random-max-nu", type=int, default=5)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_rearrange)

    sp = sub.add_parser("maximal", help="weak-type level-set sweep over a corpus")
    common(sp, kmax=2**20)
    sp.add_argument("--corpus", action="append", help="delta[:h] | indicator[:<len>[:h]] | random:<density>:<seed>; repeatable")
    sp.add_argument("--lambda", dest="lam", type=_positive, default=1.0)
    sp.add_argument("--mode", choices=("full", "dyadic"), default="full")
    sp.add_argument("--min-exp", type=int, default=10, help="smallest scale 2**min_exp")
    sp.add_argument("--max-exp", type=int, default=14, help="largest scale 2**max_exp")
    sp.set_defaults(func=cmd_maximal)

    sp = sub.add_parser("dynamics", help="weighted vs plain Birkhoff errors along orbits")
    common(sp)
    sp.add_argument("--system", choices=("rotation", "doubling", "bernoulli"), default="rotation")
    sp.add_argument("--observable", default="interval:0:0.5", help="interval:a:b | exp:k | cylinder:<word> | const")
    sp.add_argument("--alpha", type=float, default=None, help="rotation angle (default golden mean)")
    sp.add_argument("--p", type=_float_list, default=None, help="Bernoulli probabilities, comma-separated")
    sp.add_argument("--seed", type=_int_list, default=[0], help="comma-separated system seeds")
    sp.add_argument("--points", type=int, default=64, help="starting points per seed")
    sp.add_argument("--checkpoints", type=_int_list, default=[10**3, 10**4, 10**5])
    sp.set_defaults(func=cmd_dynamics)

    sp = sub.add_parser("certify", help="three-part level-set certificate over a corpus")
    common(sp, kmax=2**20)
    sp.add_argument("--corpus", action="append")
    sp.add_argument("--length", type=int, default=1024, help="support length for scalable corpus members")
    sp.add_argument("--safety", type=_positive, default=maximal.SAFETY_FACTOR, help="factor applied to the fitted moment constant")
    sp.set_defaults(func=cmd_certify)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), format="%(name)s: %(message)s")
    if getattr(args, "corpus", "unset") is None:
        args.corpus = list(DEFAULT_CORPUS)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"{parser.prog} {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except VerificationFailure as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
