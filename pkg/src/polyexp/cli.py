"""Command-line interface: ``polyexp <command> [options]``.

Exit codes: 0 success, 1 usage or malformed input, 2 insufficient moments,
3 numerical failure.  Every input is parsed and validated before any
computation, and output files are written atomically.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile

import numpy as np

from .algebra import MomentSequence, MonomialOrder
from .applications import (
    prony_univariate,
    sparse_interpolate,
    spikes_from_fourier,
    values_from_csv,
    values_from_dict,
)
from .decompose import CLUSTER_TOL, DecomposeConfig, decompose, default_seed
from .errors import (
    InsufficientMoments,
    NumericalFailure,
    OutOfSupport,
    ParseError,
    PolyExpError,
    PreconditionViolation,
)
from .hankel import RANK_TOL, monomial_hankel
from .orthobasis import PIVOT_TOL
from .polexp import MERGE_TOL, PolExpModel, synth_full

EXIT_OK, EXIT_USAGE, EXIT_INSUFFICIENT, EXIT_NUMERICAL = 0, 1, 2, 3
PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------------------
# io helpers
# ---------------------------------------------------------------------------

def _read_text(path: str) -> str:
    try:
        if path == "-":
            return sys.stdin.read()
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _read_json(path: str):
    try:
        return json.loads(_read_text(path))
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from None


def _read_values(path: str, fmt: str):
    if fmt == "csv":
        return values_from_csv(_read_text(path))
    return values_from_dict(_read_json(path))


def _dump(doc) -> str:
    return json.dumps(doc, indent=2, allow_nan=True) + "\n"


def _write(text: str, out: str | None):
    """Write to ``out`` atomically (temporary file and rename), or to stdout."""
    if out is None or out == "-":
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(out))
    try:
        fd, tmp = tempfile.mkstemp(dir=directory, prefix=".polyexp-", suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                fh.write(text)
            os.replace(tmp, out)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
    except OSError as exc:
        raise UsageError(f"cannot write {out}: {exc.strerror}") from None


def _float_list(text: str, name: str) -> list:
    try:
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"--{name} expects comma-separated numbers, got {text!r}") from None
    if not values:
        raise UsageError(f"--{name} is empty")
    return values


def _per_variable(values, n: int, name: str) -> np.ndarray:
    if len(values) == 1:
        values = values * n
    if len(values) != n:
        raise UsageError(f"--{name} needs 1 or {n} values, got {len(values)}")
    return np.array(values, dtype=float)


def _seed(args) -> int:
    seed = args.seed if args.seed is not None else default_seed()
    if not -(2 ** 63) <= seed < 2 ** 64:
        raise UsageError("seed must be a 64-bit integer")
    return seed % 2 ** 64


def _config(args) -> DecomposeConfig:
    return DecomposeConfig(
        pivot_tol=args.tol_pivot,
        rank_tol=args.tol_rank,
        cluster_tol=args.tol_cluster,
        sep_tol=args.tol_cluster,
        merge_tol=args.tol_merge,
        seed=_seed(args),
        order=args.order,
    )


def _truncate(sigma: MomentSequence, degree: int | None) -> MomentSequence:
    if degree is None:
        return sigma
    keep = [a for a in sigma.support if sum(a) <= degree]
    if not keep:
        raise UsageError("--degree leaves no moments")
    return sigma.restrict(keep)


def _cpx(z) -> dict:
    return {"re": float(np.real(z)), "im": float(np.imag(z))}


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_synth(args) -> str:
    model = PolExpModel.from_dict(_read_json(args.model))
    if args.degree is None or args.degree < 0:
        raise UsageError("synth needs --degree D with D >= 0")
    return _dump(synth_full(model, args.degree).to_dict(args.order_obj))


def cmd_decompose(args) -> str:
    sigma = _truncate(MomentSequence.from_dict(_read_json(args.moments)), args.degree)
    report = decompose(sigma, args.config)
    return _dump(report.to_dict())


def cmd_rank(args) -> str:
    sigma = MomentSequence.from_dict(_read_json(args.moments))
    if args.degree is None:
        deg = sigma.max_degree // 2
    else:
        deg = args.degree
    if deg < 0:
        raise UsageError("--degree must be >= 0")
    H = monomial_hankel(sigma, deg)
    s = np.linalg.svd(H, compute_uv=False)
    rank = int(np.sum(s > args.tol_rank * s[0])) if s.size and s[0] > 0 else 0
    lines = [f"basis degree {deg}: {H.shape[0]} x {H.shape[1]} moment matrix", "index  singular_value"]
    lines += [f"{i:5d}  {v:.6e}" for i, v in enumerate(s)]
    lines.append(f"rank {rank} (tolerance {args.tol_rank:g} relative)")
    return "\n".join(lines) + "\n"


def cmd_interpolate(args) -> str:
    n, values = _read_values(args.values, args.format)
    lam = _per_variable(_float_list(args.lam, "lambda"), n, "lambda") if args.lam else np.array(PRIMES[:n], float)
    if len(lam) < n:
        raise UsageError("too many variables for the default lambda; pass --lambda")
    model = sparse_interpolate(values, lam, args.degree, config=args.config)
    doc = model.to_dict()
    doc["lambda"] = [float(v) for v in lam]
    doc["exponents"] = [list(a) for a in sorted({tuple(a) for a, _, _ in model.terms})]
    return _dump(doc)


def cmd_prony1d(args) -> str:
    n, values = _read_values(args.samples, args.format)
    if n != 1:
        raise ParseError("prony1d expects a univariate value table")
    k = len(values)
    if set(values) != {(i,) for i in range(k)}:
        raise ParseError("samples must be indexed 0, 1, ..., N-1 without gaps")
    if args.r is None or args.r < 1:
        raise UsageError("prony1d needs --r R with R >= 1")
    samples = [values[(i,)] for i in range(k)]
    model = prony_univariate(samples, args.r, config=args.config)
    return _dump(model.to_dict())


def cmd_fourier_spikes(args) -> str:
    n, values = _read_values(args.coeffs, args.format)
    T = _per_variable(_float_list(args.period, "period"), n, "period") if args.period else np.ones(n)
    if np.any(T <= 0):
        raise UsageError("--period entries must be positive")
    spikes = spikes_from_fourier(values, T, config=args.config)
    doc = {
        "nvars": n,
        "periods": [float(t) for t in T],
        "spikes": [
            {
                "position": [float(x) for x in s.position],
                "weights": [dict({"alpha": list(a)}, **_cpx(w)) for a, w in sorted(s.weights.items())],
            }
            for s in spikes
        ],
    }
    return _dump(doc)


COMMANDS = {
    "synth": (cmd_synth, "moments of a model on all exponents of degree <= D", "model"),
    "decompose": (cmd_decompose, "polynomial-exponential decomposition of a moment file", "moments"),
    "rank": (cmd_rank, "singular values and numeric rank of a moment matrix", "moments"),
    "interpolate": (cmd_interpolate, "sparse polynomial / polylog interpolation", "values"),
    "prony1d": (cmd_prony1d, "univariate Prony (pencil) method", "samples"),
    "fourier-spikes": (cmd_fourier_spikes, "spike recovery from Fourier coefficients", "coeffs"),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol-pivot", type=float, default=PIVOT_TOL)
    common.add_argument("--tol-rank", type=float, default=RANK_TOL)
    common.add_argument("--tol-cluster", type=float, default=CLUSTER_TOL)
    common.add_argument("--tol-merge", type=float, default=MERGE_TOL)
    common.add_argument("--seed", type=int, default=None, help="defaults to $POLYEXP_SEED, then 0")
    common.add_argument("--order", choices=("grlex", "grevlex", "lex"), default="grlex")
    common.add_argument("--degree", type=int, default=None,
                        help="synthesis degree (synth), basis degree (rank) or moment degree cap")
    common.add_argument("--lambda", dest="lam", default=None, help="base point v1,v2,... (interpolate)")
    common.add_argument("--period", default=None, help="periods t1,t2,... (fourier-spikes)")
    common.add_argument("--format", choices=("json", "csv"), default="json", help="input value-table format")
    common.add_argument("--out", default=None, help="output path (default stdout)")

    parser = _Parser(prog="polyexp", description="Polynomial-exponential decomposition of moment sequences.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, (_, help_text, arg) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text, parents=[common])
        p.add_argument(arg, help="input file ('-' for stdin)")
        if name == "prony1d":
            p.add_argument("--r", type=int, default=None, help="number of terms")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    func = COMMANDS[args.command][0]
    try:
        for name in ("tol_pivot", "tol_rank", "tol_cluster", "tol_merge"):
            if not getattr(args, name) > 0:
                raise UsageError(f"--{name.replace('_', '-')} must be positive")
        args.order_obj = MonomialOrder(args.order)
        args.config = _config(args)
        text = func(args)
        _write(text, args.out)
    except (UsageError, ParseError, PreconditionViolation) as exc:
        print(f"polyexp {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InsufficientMoments, OutOfSupport) as exc:
        print(f"polyexp {args.command}: insufficient moments: {exc}", file=sys.stderr)
        return EXIT_INSUFFICIENT
    except (NumericalFailure, PolyExpError) as exc:
        print(f"polyexp {args.command}: numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
