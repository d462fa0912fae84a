"""
Oracle suites behind ``esdsim selftest``.

Each suite pits one computation against an independent route and reports the
worst disagreement.  Output is deterministic (fixed seeds, no timings).
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from . import dynamics, protocols
from .entanglement import concurrence, concurrence_xstate, witness_reading
from .states import InitialState, initial_state_density, random_product_state, random_xstate, xstate_to_density


def _analytic_vs_integrator() -> float:
    worst = 0.0
    res = dynamics.amplitude_damping(1.0)
    for a2 in (0.5, 1 / 3):
        s = InitialState.from_populations(a2, 1 - a2, 0.4)
        run = dynamics.integrate(initial_state_density(s), res, 2.0, 1e-3, record_every=250)
        for t, rho in zip(run.times, run.states):
            want = xstate_to_density(dynamics.evolve_analytic(s.xstate(), 1.0, t)).matrix
            worst = max(worst, float(np.abs(rho.matrix - want).max()))
    return worst


def _wootters_vs_closed_form() -> float:
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(200):
        p = random_xstate(rng)
        worst = max(worst, abs(concurrence(xstate_to_density(p)) - concurrence_xstate(p)))
    return worst


def _protocol_vs_closed_form() -> float:
    worst = 0.0
    for a2 in (0.2, 0.5, 0.8):
        s = InitialState.from_populations(a2, 1 - a2, 0.9)
        for t in (0.0, 0.5, 2.0):
            p = dynamics.evolve_analytic(s.xstate(), 1.0, t)
            for d in (0.0, 1.0, 2.5, 4.0, protocols.choose_delta(s.theta)):
                want = protocols.readout_probability(p.x, abs(p.z), s.theta, d)
                for measure in (protocols.ion_protocol, protocols.cavity_measure):
                    worst = max(worst, abs(measure(p, None, d).probability - want))
    return worst


def _witness_positivity() -> float:
    lowest = math.inf
    for seed in range(100):
        rho = random_product_state(seed)
        for theta in np.linspace(0, 2 * math.pi, 32, endpoint=False):
            lowest = min(lowest, witness_reading(rho, theta).expectation)
    return -lowest


SUITES: list[tuple[str, Callable[[], float], float, str]] = [
    ("analytic-vs-integrator", _analytic_vs_integrator, 1e-8, "max |rho_rk4 - rho_exact|"),
    ("wootters-vs-closed-form", _wootters_vs_closed_form, 1e-9, "max |C - (2|z| - 2x)+|"),
    ("protocol-vs-closed-form", _protocol_vs_closed_form, 1e-10, "max |P_sim - P_closed|"),
    ("witness-positivity", _witness_positivity, 1e-9, "-(min witness expectation)"),
]


def run_selftest() -> tuple[bool, str]:
    lines = []
    ok = True
    for name, fn, tol, what in SUITES:
        try:
            value = fn()
            passed = value <= tol
            detail = f"{what} = {value:.1e} (tol {tol:.0e})"
        except Exception as exc:  # a crash is a failed suite, not a crashed run
            passed = False
            detail = f"error: {type(exc).__name__}: {exc}"
        ok &= passed
        lines.append(f"{'PASS' if passed else 'FAIL'} {name}: {detail}")
    lines.append("selftest: all suites passed" if ok else "selftest: FAILED")
    return ok, "\n".join(lines) + "\n"
