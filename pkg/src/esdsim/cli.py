"""
Command-line front end.

    esdsim evolve   --c0 0.4714 --branch finite --out finite.csv
    esdsim ts       --alpha2 0.3333333333 --beta2 0.6666666667
    esdsim protocol --kind ion --delta auto
    esdsim protocol --kind cavity --delta 0,pi/2,pi --invert
    esdsim selftest

Tables go to ``--out`` (stdout when omitted) as CSV or JSON, numbers with 12
significant digits.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import re
import sys
from dataclasses import dataclass
from typing import Sequence, TextIO

import numpy as np

from . import dynamics, protocols
from .entanglement import concurrence, probability_phi
from .errors import EsdError, NotEntangledInitially
from .states import DensityMatrix, InitialState, density_to_xstate, initial_state_density, xstate_to_density

DEFAULT_SAMPLES = 501
DEFAULT_TAU_MAX = 3.0

EVOLVE_COLUMNS = ["tau", "w", "x", "y", "|z|", "P", "C", "W"]


class InvalidFlags(EsdError, ValueError):
    pass


@dataclass
class RunConfig:
    alpha2: float = 0.5
    beta2: float = 0.5
    theta: float = 0.0
    gamma: float = 1.0
    t_max: float = DEFAULT_TAU_MAX
    samples: int = DEFAULT_SAMPLES
    reservoir: str = "amplitude"
    kind: str = "ion"
    deltas: list[float] | None = None  # None: choose_delta(theta)
    invert: bool = False
    output_path: str | None = None
    format: str = "csv"

    def __post_init__(self) -> None:
        if self.alpha2 < 0 or self.beta2 < 0 or self.alpha2 + self.beta2 <= 0:
            raise InvalidFlags("populations must be nonnegative and not both zero")
        total = self.alpha2 + self.beta2
        self.alpha2, self.beta2 = self.alpha2 / total, self.beta2 / total
        if not self.gamma > 0:
            raise InvalidFlags("--gamma must be positive")
        if not self.t_max >= 0:
            raise InvalidFlags("--tmax must be nonnegative")
        if self.samples < 2:
            raise InvalidFlags("--samples must be at least 2")
        if self.reservoir not in ("amplitude", "diffusive"):
            raise InvalidFlags(f"unknown reservoir {self.reservoir!r}")
        if self.kind not in ("ion", "cavity"):
            raise InvalidFlags(f"unknown protocol kind {self.kind!r}")
        if self.format not in ("csv", "json"):
            raise InvalidFlags(f"unknown format {self.format!r}")
        if self.invert and (self.deltas is None or len(self.deltas) != 3):
            raise InvalidFlags("--invert needs exactly three values in --delta")

    @property
    def initial_state(self) -> InitialState:
        return InitialState.from_populations(self.alpha2, self.beta2, self.theta)

    def taus(self) -> np.ndarray:
        return np.linspace(0.0, self.gamma * self.t_max, self.samples)


def populations_from_c0(c0: float, branch: str = "finite") -> tuple[float, float]:
    """
    Solve ``2 sqrt(p (1 - p)) = c0`` for ``(alpha^2, beta^2)``.

    ``branch="finite"`` puts the larger root on ``|11>`` (``|beta| > |alpha|``,
    finite-time disentanglement); ``"asymptotic"`` swaps them.
    """
    if not 0 < c0 <= 1:
        raise InvalidFlags("--c0 must lie in (0, 1]")
    root = math.sqrt(1 - c0 * c0)
    small, large = (1 - root) / 2, (1 + root) / 2
    if branch == "finite":
        return small, large
    if branch == "asymptotic":
        return large, small
    raise InvalidFlags(f"unknown branch {branch!r}")


# ------------------------------------------------------------------ tables


def trajectory(cfg: RunConfig) -> list[tuple[float, DensityMatrix]]:
    """States on the ``tau`` grid: analytic for amplitude damping, RK4 for diffusive."""
    taus = cfg.taus()
    s0 = cfg.initial_state
    if cfg.reservoir == "amplitude":
        x0 = s0.xstate()
        return [(tau, xstate_to_density(dynamics.evolve_analytic(x0, cfg.gamma, tau / cfg.gamma))) for tau in taus]
    spacing = cfg.t_max / (cfg.samples - 1)
    sub = max(1, math.ceil(spacing * cfg.gamma * dynamics.DEFAULT_STEPS_PER_UNIT - 1e-9))
    res = dynamics.diffusive(cfg.gamma)
    run = dynamics.integrate(initial_state_density(s0), res, cfg.t_max, spacing / sub, record_every=sub)
    return [(cfg.gamma * t, rho) for t, rho in zip(run.times, run.states)]


def evolve_table(cfg: RunConfig) -> tuple[list[str], list[list[float]]]:
    rows = []
    for tau, rho in trajectory(cfg):
        p = density_to_xstate(rho)
        prob = probability_phi(rho, cfg.theta)
        rows.append([tau, p.w, p.x, p.y, abs(p.z), prob, concurrence(rho), 1 - 2 * prob])
    return list(EVOLVE_COLUMNS), rows


def protocol_table(cfg: RunConfig) -> tuple[list[str], list[list[float]]]:
    measure = protocols.ion_protocol if cfg.kind == "ion" else protocols.cavity_measure
    name = "P_gg" if cfg.kind == "ion" else "P_e"
    columns = ["tau", "delta", name, "eta_scaled_concurrence", "true_concurrence"]
    if cfg.invert:
        columns += ["x_rec", "|z|_rec", "theta_rec"]
    deltas = cfg.deltas if cfg.deltas is not None else [protocols.choose_delta(cfg.theta)]
    rows = []
    for tau, rho in trajectory(cfg):
        p = density_to_xstate(rho)
        c_true = concurrence(rho)
        outcomes = [measure(p, None, d) for d in deltas]
        recovered = list(protocols.three_phase_inversion(outcomes)) if cfg.invert else []
        for o in outcomes:
            scaled = max(0.0, (2 * o.probability - 1) / o.eta)
            rows.append([tau, o.delta, o.probability, scaled, c_true, *recovered])
    return columns, rows


def ts_report(cfg: RunConfig) -> str:
    s = cfg.initial_state
    t_s = dynamics.disentanglement_time(s, cfg.gamma)
    t_b = dynamics.disentanglement_time_bisect(s, cfg.gamma)
    lines = [f"alpha2={_fmt(cfg.alpha2)} beta2={_fmt(cfg.beta2)} gamma={_fmt(cfg.gamma)}"]
    if math.isinf(t_s):
        lines.append("verdict: Asymptotic")
        lines.append("t_s: inf")
        lines.append(f"bisection: {'inf' if math.isinf(t_b) else _fmt(t_b)}")
    else:
        lines.append("verdict: FiniteTime")
        lines.append(f"t_s: {_fmt(t_s)}")
        lines.append(f"bisection: {_fmt(t_b)}")
        lines.append(f"difference: {abs(t_s - t_b):.3e}")
    return "\n".join(lines) + "\n"


def _fmt(v: float) -> str:
    return f"{v:.12g}"


def write_table(columns: Sequence[str], rows: Sequence[Sequence[float]], fh: TextIO, fmt: str = "csv") -> None:
    if fmt == "csv":
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([_fmt(v) for v in r])
    else:
        doc = {"columns": list(columns), "rows": [[float(_fmt(v)) for v in r] for r in rows]}
        json.dump(doc, fh, indent=1)
        fh.write("\n")


def _emit(cfg: RunConfig, columns: list[str], rows: list[list[float]]) -> None:
    if cfg.output_path is None:
        write_table(columns, rows, sys.stdout, cfg.format)
        return
    with open(cfg.output_path, "w", newline="") as fh:
        write_table(columns, rows, fh, cfg.format)


# ------------------------------------------------------------------ parsing

_PI_TOKEN = re.compile(r"^([+-]?(?:\d+\.?\d*|\.\d+)?)\*?pi(?:/(\d+\.?\d*))?$")


def parse_angle(token: str) -> float:
    """``"0.3"``, ``"pi"``, ``"-pi/2"``, ``"3pi/4"`` or ``"1.5*pi"``."""
    tok = token.strip().replace(" ", "")
    m = _PI_TOKEN.match(tok)
    if m:
        coef = m.group(1)
        value = math.pi * (float(coef) if coef not in ("", "+", "-") else (-1.0 if coef == "-" else 1.0))
        return value / float(m.group(2)) if m.group(2) else value
    try:
        return float(tok)
    except ValueError:
        raise InvalidFlags(f"cannot parse angle {token!r}") from None


def parse_deltas(text: str) -> list[float] | None:
    if text.strip().lower() == "auto":
        return None
    return [parse_angle(t) for t in text.split(",") if t.strip()]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    pops = common.add_mutually_exclusive_group()
    pops.add_argument("--alpha2", type=float, help="population of |00> (default 0.5)")
    pops.add_argument("--c0", type=float, help="initial concurrence; populations from 2 sqrt(p(1-p)) = c0")
    common.add_argument("--beta2", type=float, help="population of |11> (default 1 - alpha2)")
    common.add_argument("--branch", choices=["finite", "asymptotic"], default="finite",
                        help="root taken with --c0 (finite: |beta| > |alpha|)")
    common.add_argument("--theta", type=parse_angle, default=0.0)
    common.add_argument("--gamma", type=float, default=1.0)
    common.add_argument("--tmax", type=float, default=None, help=f"final time (default {DEFAULT_TAU_MAX}/gamma)")
    common.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    common.add_argument("--reservoir", choices=["amplitude", "diffusive"], default="amplitude")
    common.add_argument("--out", default=None)
    common.add_argument("--format", choices=["csv", "json"], default="csv")

    parser = argparse.ArgumentParser(prog="esdsim", description=__doc__.split("\n\n")[0].strip())
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("evolve", parents=[common], help="w, x, y, |z|, P, C, W along the decay")
    sub.add_parser("ts", parents=[common], help="disentanglement time, formula vs bisection")
    prot = sub.add_parser("protocol", parents=[common], help="simulated ion / cavity read-out")
    prot.add_argument("--kind", choices=["ion", "cavity"], default="ion")
    prot.add_argument("--delta", default="auto", help="'auto' or comma-separated phases, e.g. 0,pi/2,pi")
    prot.add_argument("--invert", action="store_true", help="recover x, |z|, theta from three phases")
    sub.add_parser("selftest", help="run the oracle suites")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    if args.c0 is not None:
        if args.beta2 is not None:
            raise InvalidFlags("--c0 cannot be combined with --beta2")
        alpha2, beta2 = populations_from_c0(args.c0, args.branch)
    elif args.alpha2 is not None:
        alpha2 = args.alpha2
        beta2 = 1.0 - alpha2 if args.beta2 is None else args.beta2
    elif args.beta2 is not None:
        alpha2, beta2 = 1.0 - args.beta2, args.beta2
    else:
        alpha2, beta2 = 0.5, 0.5
    gamma = args.gamma
    if not gamma > 0:
        raise InvalidFlags("--gamma must be positive")
    return RunConfig(
        alpha2=alpha2,
        beta2=beta2,
        theta=args.theta,
        gamma=gamma,
        t_max=DEFAULT_TAU_MAX / gamma if args.tmax is None else args.tmax,
        samples=args.samples,
        reservoir=args.reservoir,
        kind=getattr(args, "kind", "ion"),
        deltas=parse_deltas(getattr(args, "delta", "auto")),
        invert=getattr(args, "invert", False),
        output_path=args.out,
        format=args.format,
    )


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "selftest":
        from .selftest import run_selftest

        ok, report = run_selftest()
        sys.stdout.write(report)
        return 0 if ok else 1
    try:
        cfg = config_from_args(args)
        if args.command == "evolve":
            _emit(cfg, *evolve_table(cfg))
        elif args.command == "protocol":
            _emit(cfg, *protocol_table(cfg))
        elif args.command == "ts":
            sys.stdout.write(ts_report(cfg))
    except InvalidFlags as exc:
        parser.error(str(exc))
    except NotEntangledInitially:
        print("error: the initial state is not entangled; disentanglement time is undefined", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
