"""Command-line front end: ``cgqf {reduce,dist,outage,ber,mse,validate}``.

Exit codes: 0 success, 2 malformed input, 3 numerical failure, 4 failed validation.
"""

import argparse
import csv
import hashlib
import io
import json
import os
import sys
import tempfile

import numpy as np

from . import __version__
from . import montecarlo as mc
from .confluent import mse, normalized_mse, select_m
from .distribution import ClosedFormDistribution
from .errors import CgqfError, InvalidInput, ParseError, PrecisionLoss, TargetUnreachable
from .mrc import (
    MrcScenario,
    ber,
    build_channel,
    channel_distribution,
    db_to_linear,
)
from .reduction import reduce
from .scenario import DEFAULT_MSE_TARGET, load_scenario
from .validation import FAULTS, run_validation

EXIT_OK, EXIT_PARSE, EXIT_NUMERIC, EXIT_VALIDATION = 0, 2, 3, 4


class _Fail(Exception):
    def __init__(self, code, msg):
        super().__init__(msg)
        self.code = code


def _fmt(v):
    return f"{float(v):.17g}"


def parse_grid(text, name="--grid"):
    try:
        lo, hi, n = text.split(":")
        lo, hi, n = float(lo), float(hi), int(n)
    except ValueError as exc:
        raise ParseError(f"{name} must look like lo:hi:npts, got {text!r}") from exc
    if n < 1 or hi < lo or (n == 1 and hi != lo):
        raise ParseError(f"{name}: need lo <= hi and npts >= 1 (npts = 1 only if lo == hi)")
    return lo, hi, n


def _write_csv(path, manifest, header, rows):
    buf = io.StringIO()
    buf.write("# manifest: " + json.dumps(manifest, sort_keys=True, separators=(",", ":")) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([c if isinstance(c, str) else _fmt(c) for c in row])
    text = buf.getvalue()
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".cgqf-", suffix=".csv", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _manifest(args, **extra):
    out = {
        "command": args.command,
        "input": getattr(args, "input", None),
        "output": getattr(args, "out", None),
        "version": __version__,
    }
    out.update(extra)
    return out


def _resolve(args, sc):
    """Effective (m, mse_target, precision_bits, seed) with CLI flags overriding the file."""
    bits = args.precision_bits if args.precision_bits is not None else sc.precision_bits
    seed = args.seed if args.seed is not None else sc.seed
    if args.m is not None and args.mse_target is not None:
        raise ParseError("give either --m or --mse-target, not both")
    m, target = args.m, args.mse_target
    if m is None and target is None:
        m, target = sc.m, sc.mse_target
    if m is None and target is None:
        target = DEFAULT_MSE_TARGET
    return m, target, bits, seed


def _mrc_with(sc, args, m, target):
    base = sc.mrc
    cov = args.covariance or base.covariance
    return MrcScenario(
        k=base.k, rho=base.rho, M=base.M, m=m, mse_target=target if target is not None else base.mse_target,
        gamma_bar_db=base.gamma_bar_db, gamma_th_db=base.gamma_th_db, covariance=cov, label=base.label,
    )


def _spectral(sc, args):
    if sc.kind == "form":
        if args.covariance:
            raise ParseError("--covariance only applies to mrc scenarios")
        return sc.form, reduce(sc.form)
    qf = build_channel(_mrc_with(sc, args, 1, None))
    return qf, reduce(qf)


# ------------------------------------------------------------------ commands


def cmd_reduce(args):
    sc = load_scenario(args.input)
    qf, sf = _spectral(sc, args)
    digest = hashlib.sha256(sf.fingerprint().encode()).hexdigest()
    print(f"n = {sf.n}")
    print("lambda = " + ", ".join(_fmt(v) for v in sf.lam))
    print("mu     = " + ", ".join(_fmt(v) for v in sf.mu))
    print(f"E[Q] from (A, L, v_bar): {_fmt(qf.mean())}")
    print(f"E[Q] = sum lam (1 + mu): {_fmt(sf.mean())}")
    print(f"E[Q^2]                 : {_fmt(sf.second_moment())}")
    print(f"spectral sha256        : {digest}")
    if args.out:
        rows = [(str(i), l, u) for i, (l, u) in enumerate(zip(sf.lam, sf.mu))]
        _write_csv(args.out, _manifest(args, covariance=args.covariance, sha256=digest),
                   ["index", "lambda", "mu"], rows)
    return EXIT_OK


def _m_for(sf, m, target):
    return m if m is not None else select_m(sf, target)


def cmd_dist(args):
    sc = load_scenario(args.input)
    m, target, bits, _ = _resolve(args, sc)
    _, sf = _spectral(sc, args)
    m = _m_for(sf, m, target)
    lo, hi, n = parse_grid(args.grid)
    d = ClosedFormDistribution.from_spectral(sf, m, bits)
    xs = np.linspace(lo, hi, n)
    rows = zip(xs, np.atleast_1d(d.pdf(xs)), np.atleast_1d(d.cdf(xs)))
    man = _manifest(args, m=m, mse_target=target, precision_bits=bits, grid=args.grid,
                    covariance=args.covariance)
    _write_csv(args.out, man, ["x", "pdf", "cdf"], rows)
    return EXIT_OK


def _require_mrc(sc, what):
    if sc.kind != "mrc":
        raise ParseError(f"{what} needs an 'mrc' scenario")


def cmd_outage(args):
    sc = load_scenario(args.input)
    _require_mrc(sc, "outage")
    m, target, bits, seed = _resolve(args, sc)
    mrc = _mrc_with(sc, args, m, target)
    d = channel_distribution(mrc, bits)
    m_used = mrc.m if mrc.m is not None else select_m(reduce(build_channel(mrc)), mrc.mse_target)
    gb = mrc.gamma_bars
    x = mrc.gamma_th / gb
    p = np.atleast_1d(d.cdf(x))
    comp = np.atleast_1d(d.survival(x))
    header = ["gamma_bar_db", "outage", "complementary"]
    cols = [np.array(mrc.gamma_bar_db), p, comp]
    if args.mc:
        pm, se = mc.mc_outage(build_channel(mrc), gb, mrc.gamma_th, mc.SimConfig(seed, args.mc))
        header += ["mc_outage", "mc_se"]
        cols += [pm, se]
    man = _manifest(args, m=m_used, mse_target=target if mrc.m is None else None, precision_bits=bits,
                    seed=seed if args.mc else None, samples=args.mc, covariance=mrc.covariance,
                    gamma_th_db=mrc.gamma_th_db, k=list(mrc.k), rho=mrc.rho)
    _write_csv(args.out, man, header, zip(*cols))
    return EXIT_OK


def cmd_ber(args):
    sc = load_scenario(args.input)
    _require_mrc(sc, "ber")
    m, target, bits, seed = _resolve(args, sc)
    mrc = _mrc_with(sc, args, m, target)
    m_used = mrc.m if mrc.m is not None else select_m(reduce(build_channel(mrc)), mrc.mse_target)
    gb = mrc.gamma_bars
    b = np.atleast_1d(ber(mrc, gb, bits))
    header = ["gamma_bar_db", "ber"]
    cols = [np.array(mrc.gamma_bar_db), b]
    if args.mc:
        bm, se = mc.simulate_mrc_ber(build_channel(mrc), mrc.M, gb, mc.SimConfig(seed, args.mc))
        header += ["mc_ber", "mc_se"]
        cols += [bm, se]
    man = _manifest(args, m=m_used, mse_target=target if mrc.m is None else None, precision_bits=bits,
                    seed=seed if args.mc else None, samples=args.mc, covariance=mrc.covariance,
                    M=mrc.M, k=list(mrc.k), rho=mrc.rho)
    _write_csv(args.out, man, header, zip(*cols))
    return EXIT_OK


def cmd_mse(args):
    sc = load_scenario(args.input)
    _, sf = _spectral(sc, args)
    _, _, _, seed = _resolve(args, sc)
    lo, hi, n = parse_grid(args.grid or "1:10000:25")
    if lo < 1:
        raise ParseError("--grid for mse is a range of m values and must start at >= 1")
    ms = sorted({int(round(v)) for v in np.geomspace(lo, hi, n)})
    header = ["m", "mse", "normalized_mse"]
    rows = []
    for m in ms:
        row = [str(m), mse(sf, m), normalized_mse(sf, m)]
        if args.mc:
            e, se = mc.empirical_mse(sf, m, mc.SimConfig(seed, args.mc, m % 2**32))
            row += [e / sf.second_moment(), se / sf.second_moment()]
        rows.append(row)
    if args.mc:
        header += ["mc_normalized_mse", "mc_se"]
    man = _manifest(args, grid=args.grid or "1:10000:25", seed=seed if args.mc else None,
                    samples=args.mc, covariance=args.covariance)
    _write_csv(args.out, man, header, rows)
    return EXIT_OK


def cmd_validate(args):
    results = run_validation(quick=args.quick, fault=args.inject_fault)
    for r in results:
        print(r.line())
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    return EXIT_VALIDATION if failed else EXIT_OK


# ------------------------------------------------------------------ parser


def build_parser():
    p = argparse.ArgumentParser(prog="cgqf", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"cgqf {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, grid_help=None):
        sp.add_argument("--input", required=True, help="scenario JSON file")
        sp.add_argument("--out", help="output CSV (default: stdout)")
        sp.add_argument("--m", type=int, help="confluence shape parameter")
        sp.add_argument("--mse-target", type=float, help="choose m as the smallest meeting this normalized MSE")
        sp.add_argument("--precision-bits", type=int, help="MPFR precision (default 512)")
        sp.add_argument("--seed", type=int, help="Monte-Carlo seed")
        sp.add_argument("--covariance", choices=["unit-power", "paper-literal"], help="Rician covariance convention")
        if grid_help:
            sp.add_argument("--grid", help=grid_help)

    common(sub.add_parser("reduce", help="spectral report of a quadratic form"))
    sp = sub.add_parser("dist", help="PDF and CDF on a grid")
    common(sp, "lo:hi:npts evaluation grid")
    sp = sub.add_parser("outage", help="outage probability sweep")
    common(sp)
    sp.add_argument("--mc", type=int, default=0, help="append Monte-Carlo estimate with this many trials")
    sp = sub.add_parser("ber", help="average M-QAM BER sweep")
    common(sp)
    sp.add_argument("--mc", type=int, default=0, help="append symbol-level Monte-Carlo BER")
    sp = sub.add_parser("mse", help="normalized MSE versus m")
    common(sp, "lo:hi:npts log-spaced m values (default 1:10000:25)")
    sp.add_argument("--mc", type=int, default=0, help="append coupled Monte-Carlo MSE")
    sp = sub.add_parser("validate", help="run the invariant suite")
    sp.add_argument("--quick", action="store_true", help="reduced sample sizes")
    sp.add_argument("--inject-fault", choices=FAULTS, help="corrupt an intermediate to test detection")
    return p


COMMANDS = {
    "reduce": cmd_reduce,
    "dist": cmd_dist,
    "outage": cmd_outage,
    "ber": cmd_ber,
    "mse": cmd_mse,
    "validate": cmd_validate,
}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PARSE if exc.code else EXIT_OK
    if args.command == "dist" and not args.grid:
        print("error: dist requires --grid lo:hi:npts", file=sys.stderr)
        return EXIT_PARSE
    if getattr(args, "mc", 0) and args.mc < 0:
        print("error: --mc must be >= 0", file=sys.stderr)
        return EXIT_PARSE
    try:
        return COMMANDS[args.command](args)
    except (ParseError, InvalidInput) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except PrecisionLoss as exc:
        print(f"numeric failure: {exc} (hint: --precision-bits 1024)", file=sys.stderr)
        return EXIT_NUMERIC
    except TargetUnreachable as exc:
        print(f"numeric failure: {exc} (hint: relax --mse-target or pass --m)", file=sys.stderr)
        return EXIT_NUMERIC
    except CgqfError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
