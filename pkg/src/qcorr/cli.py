"""Command line front end.

Commands write JSON (or CSV where tabular) to ``--out``; without ``--out``
the file goes to ``$QCORR_OUTPUT_DIR/<command>.<ext>`` when that variable is
set, otherwise to stdout.

Exit codes: 0 success, 1 computation failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .bounds import (
    DEFAULT_GRID_POINTS,
    bound_bell_deterministic,
    bound_entanglement_product,
    bound_steering_bloch,
    classical_bound,
    quantum_maximum_seesaw,
)
from .correlations import joint_distribution
from .qlinalg import PSI_PLUS, SINGLET, InvariantError, fidelity
from .tomography import (
    CountRecord,
    TomographySpec,
    depolarized_state,
    derive_seed,
    fidelity_experiment,
    reconstruct,
    simulate_counts,
)
from .werner import (
    BELL_465_SETTINGS_THRESHOLD,
    CANONICAL_ASSIGNMENT,
    STEERING_INFINITE_SETTINGS_THRESHOLD,
    decomposition_deviation,
    integer_row,
    violation_threshold,
    weights_for_p,
    werner_state,
)
from .witnesses import WitnessKind, canonical_settings, condition_for, evaluate

OUTPUT_DIR_ENV = "QCORR_OUTPUT_DIR"
SWEEP_HEADER = ["p", "kind", "n", "value", "bound", "violated", "normalized", "entropy"]
THRESHOLD_HEADER = ["kind", "n", "threshold", "bound", "source", "computed", "inconclusive_region"]

# (kind, n) families swept by default: entanglement, steering and Bell at two setting counts
FAMILIES = (
    (WitnessKind.ENTANGLEMENT, 2),
    (WitnessKind.ENTANGLEMENT, 3),
    (WitnessKind.STEERING, 2),
    (WitnessKind.STEERING, 3),
    (WitnessKind.BELL_CHSH, 2),
    (WitnessKind.BELL_3322, 3),
)
KIND_CHOICES = ["entanglement", "steering", "chsh", "bell3322"]


class UsageError(Exception):
    pass


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


def _dump_csv(header: list[str], rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=header, lineterminator="\n")
    w.writeheader()
    for row in rows:
        w.writerow({k: _csv_cell(row.get(k)) for k in header})
    return buf.getvalue()


def _csv_cell(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return "" if v is None else v


def _emit(args, text: str, ext: str) -> None:
    if args.out:
        path = Path(args.out)
    elif os.environ.get(OUTPUT_DIR_ENV):
        path = Path(os.environ[OUTPUT_DIR_ENV]) / f"{args.command}.{ext}"
    else:
        sys.stdout.write(text)
        return
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")


def _format(args, default: str, allowed: tuple[str, ...]) -> str:
    fmt = args.format or default
    if fmt not in allowed:
        raise UsageError(f"{args.command} supports --format {' or '.join(allowed)}")
    return fmt


def _probability(text: str) -> float:
    try:
        p = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0.0 <= p <= 1.0:
        raise argparse.ArgumentTypeError(f"p must lie in [0, 1], got {p}")
    return p


def _positive_int(text: str) -> int:
    try:
        k = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if k < 1:
        raise argparse.ArgumentTypeError(f"must be positive, got {k}")
    return k


def _kind_n(kind: str, n: int | None) -> tuple[WitnessKind, int]:
    kind = WitnessKind.parse(kind)
    try:
        tensor = condition_for(kind, n)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return kind, tensor.n


# -- commands ---------------------------------------------------------------------


def cmd_bounds(args) -> int:
    _format(args, "json", ("json",))
    kind, n = _kind_n(args.kind, args.n)
    if args.seesaw:
        report = quantum_maximum_seesaw(kind, werner_state(args.p), n, seed=args.seed, starts=args.starts)
        out = report.to_dict()
        out["state"] = {"werner_p": args.p}
    elif kind in (WitnessKind.BELL_CHSH, WitnessKind.BELL_3322):
        out = bound_bell_deterministic(condition_for(kind, n)).to_dict()
    else:
        settings = canonical_settings(kind, n)
        if kind is WitnessKind.STEERING:
            report = bound_steering_bloch(n, settings.bob, args.grid_points)
        else:
            report = bound_entanglement_product(n, settings, args.grid_points)
        out = report.to_dict()
        out["settings"] = settings.to_dict()
    _emit(args, _dump_json(out), "json")
    return 0


def cmd_evaluate(args) -> int:
    _format(args, "json", ("json",))
    kind, n = _kind_n(args.kind, args.n)
    tensor = condition_for(kind, n)
    settings = canonical_settings(kind, n)
    result = evaluate(tensor, joint_distribution(werner_state(args.p), settings), classical_bound(kind, n))
    out = result.to_dict()
    out["p"] = args.p
    if args.distribution:
        out["distribution"] = joint_distribution(werner_state(args.p), settings).to_dict()
    _emit(args, _dump_json(out), "json")
    return 0


def _p_grid(args) -> list[float]:
    if args.p:
        grid = sorted(set(args.p))
    else:
        if args.p_step <= 0:
            raise UsageError("--p-step must be positive")
        count = int(math.floor((args.p_stop - args.p_start) / args.p_step + 1e-9)) + 1
        grid = [round(args.p_start + k * args.p_step, 12) for k in range(max(count, 0))]
    if not grid:
        raise UsageError("the p grid is empty")
    if any(not 0.0 <= p <= 1.0 for p in grid):
        raise UsageError("p grid values must lie in [0, 1]")
    return grid


def _families(kinds: list[str] | None) -> list[tuple[WitnessKind, int]]:
    if not kinds:
        return list(FAMILIES)
    wanted = set()
    for k in kinds:
        if k == "bell":
            wanted |= {WitnessKind.BELL_CHSH, WitnessKind.BELL_3322}
        else:
            wanted.add(WitnessKind.parse(k))
    return [f for f in FAMILIES if f[0] in wanted]


def sweep_rows(grid: list[float], families) -> list[dict]:
    rows = []
    for kind, n in families:
        tensor = condition_for(kind, n)
        settings = canonical_settings(kind, n)
        bound = classical_bound(kind, n)
        for p in grid:
            res = evaluate(tensor, joint_distribution(werner_state(p), settings), bound)
            rows.append(
                {
                    "p": p,
                    "kind": kind.value,
                    "n": n,
                    "value": res.value,
                    "bound": res.bound,
                    "violated": res.violated,
                    "normalized": res.normalized,
                    "entropy": res.entropy,
                }
            )
    return rows


def cmd_sweep(args) -> int:
    fmt = _format(args, "csv", ("csv", "json"))
    rows = sweep_rows(_p_grid(args), _families(args.kinds))
    if fmt == "csv":
        _emit(args, _dump_csv(SWEEP_HEADER, rows), "csv")
    else:
        _emit(args, _dump_json({"rows": rows}), "json")
    return 0


def threshold_entries(tol: float) -> list[dict]:
    entries = []
    for kind, n in FAMILIES:
        entries.append(
            {
                "kind": kind.value,
                "n": n,
                "threshold": violation_threshold(kind, n, tol),
                "bound": classical_bound(kind, n),
                "source": "computed",
                "computed": True,
                "inconclusive_region": False,
            }
        )
    entries.append(
        {
            "kind": WitnessKind.STEERING.value,
            "n": "infinite",
            "threshold": STEERING_INFINITE_SETTINGS_THRESHOLD,
            "bound": None,
            "source": "literature",
            "computed": False,
            "inconclusive_region": False,
        }
    )
    entries.append(
        {
            "kind": "bell",
            "n": 465,
            "threshold": BELL_465_SETTINGS_THRESHOLD,
            "bound": None,
            "source": "literature",
            "computed": False,
            # below this p no Bell test is known to succeed, yet no local model is known either
            "inconclusive_region": True,
        }
    )
    return entries


def cmd_thresholds(args) -> int:
    fmt = _format(args, "json", ("json", "csv"))
    if args.tol <= 0:
        raise UsageError("--tol must be positive")
    entries = threshold_entries(args.tol)
    if fmt == "csv":
        _emit(args, _dump_csv(THRESHOLD_HEADER, entries), "csv")
    else:
        _emit(args, _dump_json({"tol": args.tol, "entries": entries}), "json")
    return 0


def _parse_state(text: str):
    name, _, arg = text.partition(":")
    try:
        if name == "werner":
            return werner_state(float(arg) if arg else 1.0)
        if name in ("bell", "psi-plus"):
            return PSI_PLUS.density()
        if name == "singlet":
            return SINGLET.density()
        if name == "depolarized":
            return depolarized_state(PSI_PLUS, float(arg))
    except ValueError as exc:
        raise UsageError(f"bad --state {text!r}: {exc}") from None
    raise UsageError(f"unknown --state {text!r}; use werner:P, bell, psi-plus, singlet or depolarized:F")


def _parse_target(text: str):
    if text in ("psi-plus", "psi-plus-like", "bell"):
        return PSI_PLUS
    if text == "singlet":
        return SINGLET
    raise UsageError(f"unknown --target {text!r}; use psi-plus or singlet")


def cmd_tomo(args) -> int:
    _format(args, "json", ("json",))
    target = _parse_target(args.target)
    if args.counts_in:
        text = Path(args.counts_in).read_text(encoding="utf-8")
        counts = CountRecord.from_csv(text, mode="analytic" if args.analytic else "multinomial")
        rec = reconstruct(counts)
        out = rec.to_dict()
        out["fidelity_to_target"] = fidelity(rec.rho_physical, target.density())
        out["config"] = {"counts_in": str(args.counts_in), "target": args.target}
        _emit(args, _dump_json(out), "json")
        return 0
    state = _parse_state(args.state)
    if args.reps < 2:
        raise UsageError("--reps must be at least 2")
    mode = "analytic" if args.analytic else args.mode
    spec = TomographySpec(shots_per_setting=args.shots, seed=args.seed, mode=mode)
    result = fidelity_experiment(state, target, spec, args.reps)
    out = result.to_dict()
    out["config"] = {
        "state": args.state,
        "target": args.target,
        "shots": args.shots,
        "reps": args.reps,
        "seed": args.seed,
        "mode": mode,
    }
    if args.counts_out:
        first = simulate_counts(state, spec, np.random.default_rng(derive_seed(args.seed, 0)))
        Path(args.counts_out).write_text(first.to_csv(), encoding="utf-8")
    _emit(args, _dump_json(out), "json")
    return 0


def cmd_decompose(args) -> int:
    _format(args, "json", ("json",))
    w = weights_for_p(args.p)
    row = integer_row(args.p)
    out = {
        "p": args.p,
        "weights": w.to_dict(),
        "assignment": dict(CANONICAL_ASSIGNMENT),
        "integer_row": None if row is None else {"alpha": row[0], "beta": row[1], "gamma": row[1], "delta": row[1]},
        "max_deviation": decomposition_deviation(args.p),
    }
    _emit(args, _dump_json(out), "json")
    return 0


# -- parser -----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qcorr", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--out", help="output file (default: stdout or $%s)" % OUTPUT_DIR_ENV)
        p.add_argument("--format", choices=["json", "csv"])

    p = sub.add_parser("bounds", help="classical bound of a functional (or see-saw quantum maximum)")
    p.add_argument("--kind", required=True, choices=KIND_CHOICES)
    p.add_argument("--n", type=int)
    p.add_argument("--grid-points", type=_positive_int, default=DEFAULT_GRID_POINTS)
    p.add_argument("--seesaw", action="store_true", help="quantum maximum on a Werner state instead")
    p.add_argument("--p", type=_probability, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--starts", type=_positive_int, default=20)
    common(p)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("evaluate", help="evaluate a functional on a Werner state")
    p.add_argument("--kind", required=True, choices=KIND_CHOICES)
    p.add_argument("--n", type=int)
    p.add_argument("--p", type=_probability, required=True)
    p.add_argument("--distribution", action="store_true", help="include the joint distribution")
    common(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("sweep", help="functional values over a grid of Werner states")
    p.add_argument("--kinds", nargs="+", choices=KIND_CHOICES + ["bell"])
    p.add_argument("--p", type=_probability, nargs="+", help="explicit grid (overrides start/stop/step)")
    p.add_argument("--p-start", type=_probability, default=0.0)
    p.add_argument("--p-stop", type=_probability, default=1.0)
    p.add_argument("--p-step", type=float, default=0.05)
    common(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("thresholds", help="Werner violation thresholds for every functional")
    p.add_argument("--tol", type=float, default=1e-6)
    common(p)
    p.set_defaults(func=cmd_thresholds)

    p = sub.add_parser("tomo", help="simulated over-complete state tomography")
    p.add_argument("--state", default="bell", help="werner:P | bell | psi-plus | singlet | depolarized:F")
    p.add_argument("--target", default="psi-plus")
    p.add_argument("--shots", type=_positive_int, default=10_000)
    p.add_argument("--reps", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mode", choices=["multinomial", "poisson"], default="multinomial")
    p.add_argument("--analytic", action="store_true", help="exact Born probabilities, no sampling")
    p.add_argument("--counts-out", help="write the first repetition's counts as CSV")
    p.add_argument("--counts-in", help="reconstruct from a counts CSV instead of simulating")
    common(p)
    p.set_defaults(func=cmd_tomo)

    p = sub.add_parser("decompose", help="Pauli-twirl weights that prepare a Werner state")
    p.add_argument("--p", type=_probability, required=True)
    common(p)
    p.set_defaults(func=cmd_decompose)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.exit(2, f"{parser.prog} {args.command}: error: {exc}\n")
    except (InvariantError, ValueError, ArithmeticError, OSError) as exc:
        sys.stderr.write(f"{parser.prog} {args.command}: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
