"""
Unitary simulations of the two concurrence read-out schemes.

Trapped ions
    Register ``ion1 (e, g) x ion2 (e, g) x vibration (0, 1, 2)``.  A red
    sideband pi pulse on ion 1 maps the coherence onto ion 2 and the phonon,
    a blue sideband pulse with control phase ``delta`` on ion 2 closes the
    interferometer, and both ions are read out in ``g``.

Cavity QED
    Register ``atom (e, g) x C_a (0, 1) x C_b (0, 1, 2)``.  A probe atom is
    rotated by ``C_a``, by the classical field in ``C_aux`` (phase
    ``delta/2``) and by ``C_b``; the atom is read out in ``e``.

Both reproduce ``1/2 - |z| cos(theta - delta) - eta x`` with
``eta = sin^2(pi sqrt(2) / 4)``; the factor comes from the sqrt(2)-enhanced
Rabi frequency of the one-phonon (one-photon) sideband.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Iterable, Literal, Sequence, TextIO

import numpy as np
import numpy.typing as npt

from .errors import InvalidParams, NonUnitaryCompletion, PreparationLeak, SingularSystem
from .linalg import ComplexMatrix, embed_operator, is_unitary
from .states import (
    TWO_QUBIT_BASIS,
    DensityMatrix,
    InitialState,
    XStateParams,
    embedded_basis,
    initial_state_density,
    xstate_to_density,
)

PULSE_ANGLE = math.pi * math.sqrt(2) / 4
ETA = math.sin(PULSE_ANGLE) ** 2

Completion = Literal["minimal", "alternate"]

# ion register
ION_DIMS = (2, 2, 3)
ION_BASIS = embedded_basis(ION_DIMS, (("e", "g"), ("e", "g"), ("0", "1", "2")))
# cavity register
CAVITY_DIMS = (2, 2, 3)
CAVITY_BASIS = embedded_basis(CAVITY_DIMS, (("e", "g"), ("0", "1"), ("0", "1", "2")))

E, G = 0, 1  # atomic/ionic level index


def _local(level: int, n: int, levels: int = 3) -> int:
    """Index of ``|level, n>`` in a two-level x Fock(levels) space."""
    return level * levels + n


def _check_unitary(u: ComplexMatrix, what: str) -> ComplexMatrix:
    if not is_unitary(u, atol=1e-12):
        raise NonUnitaryCompletion(f"{what} is not unitary")
    return u


# ---------------------------------------------------------------- ion pulses


def red_sideband_unitary(completion: Completion = "minimal") -> ComplexMatrix:
    """
    Red sideband pi pulse on ``ion (e, g) x vibration (0, 1, 2)``.

    ``|g1> -> |e0>`` and ``|e0> -> -|g1>``.  ``"minimal"`` leaves every other
    state alone; ``"alternate"`` also rotates ``{|e1>, |g2>}`` by the
    sqrt(2)-faster angle a real pulse would produce.  Neither pair is
    populated when the pulse is applied.
    """
    u = np.eye(6, dtype=complex)
    e0, g1 = _local(E, 0), _local(G, 1)
    u[:, [e0, g1]] = 0
    u[g1, e0] = -1
    u[e0, g1] = 1
    if completion == "alternate":
        e1, g2 = _local(E, 1), _local(G, 2)
        c, s = math.cos(math.pi / math.sqrt(2)), math.sin(math.pi / math.sqrt(2))
        u[[e1, g2], e1] = c, -s
        u[[e1, g2], g2] = s, c
    elif completion != "minimal":
        raise ValueError(f"unknown completion {completion!r}")
    return _check_unitary(u, "red sideband")


def blue_sideband_unitary(delta: float, completion: Completion = "minimal") -> ComplexMatrix:
    """
    Blue sideband pulse with control phase ``delta`` on ``ion x vibration``.

    * ``|g0> -> (|g0> - e^{i delta}|e1>) / sqrt 2``
    * ``|e1> -> (e^{-i delta}|g0> + |e1>) / sqrt 2``
    * ``|g1> -> cos a |g1> - sin a e^{-i delta}|e2>``
    * ``|e2> -> sin a e^{i delta}|g1> + cos a |e2>``

    with ``a = pi sqrt(2) / 4``; ``|e0>`` and ``|g2>`` are untouched.  The
    ``"alternate"`` completion puts arbitrary phases on ``|e0>``, ``|g2>``
    and ``|e2>``, which must not change any read-out.
    """
    u = np.zeros((6, 6), dtype=complex)
    ph = np.exp(1j * delta)
    r = 1 / math.sqrt(2)
    c, s = math.cos(PULSE_ANGLE), math.sin(PULSE_ANGLE)
    g0, e1, g1, e2, e0, g2 = (_local(G, 0), _local(E, 1), _local(G, 1),
                              _local(E, 2), _local(E, 0), _local(G, 2))
    u[g0, g0], u[e1, g0] = r, -ph * r
    u[g0, e1], u[e1, e1] = np.conj(ph) * r, r
    u[g1, g1], u[e2, g1] = c, -s * np.conj(ph)
    u[g1, e2], u[e2, e2] = s * ph, c
    u[e0, e0] = 1
    u[g2, g2] = 1
    if completion == "alternate":
        u[:, e0] *= np.exp(0.7j)
        u[:, g2] *= np.exp(-1.3j)
        u[:, e2] *= np.exp(0.4j)
    elif completion != "minimal":
        raise ValueError(f"unknown completion {completion!r}")
    return _check_unitary(u, "blue sideband")


@dataclass(frozen=True)
class IonRegister:
    """Two ions and their shared vibrational mode, truncated at two phonons."""

    state: DensityMatrix

    def __post_init__(self) -> None:
        if self.state.dim != 12:
            raise InvalidParams(f"ion register must have dimension 12, got {self.state.dim}")

    @classmethod
    def from_two_qubit(cls, rho: DensityMatrix) -> "IonRegister":
        ground = np.zeros((3, 3), dtype=complex)
        ground[0, 0] = 1
        return cls(DensityMatrix(np.kron(rho.matrix, ground), ION_BASIS))

    def phonon_population(self, n: int) -> float:
        diag = np.real(np.diag(self.state.matrix)).reshape(ION_DIMS)
        return float(diag[:, :, n].sum())

    def both_ground(self) -> float:
        diag = np.real(np.diag(self.state.matrix)).reshape(ION_DIMS)
        return float(diag[G, G, :].sum())

    def apply(self, u: ComplexMatrix) -> "IonRegister":
        m = u @ self.state.matrix @ u.conj().T
        return IonRegister(DensityMatrix(m, ION_BASIS))


def red_sideband_pi(reg: IonRegister, completion: Completion = "minimal") -> IonRegister:
    """Red sideband pi pulse on ion 1."""
    return reg.apply(embed_operator(red_sideband_unitary(completion), ION_DIMS, [0, 2]))


def blue_sideband_half(reg: IonRegister, delta: float, completion: Completion = "minimal") -> IonRegister:
    """Blue sideband pulse with control phase ``delta`` on ion 2."""
    return reg.apply(embed_operator(blue_sideband_unitary(delta, completion), ION_DIMS, [1, 2]))


# ---------------------------------------------------------------- outcomes


@dataclass(frozen=True)
class ProtocolOutcome:
    delta: float
    probability: float
    eta: float = ETA

    def __post_init__(self) -> None:
        if not -1e-10 <= self.probability <= 1 + 1e-10:
            raise InvalidParams(f"probability {self.probability} outside [0, 1]")


def readout_probability(x: float, z_abs: float, theta: float, delta: float, eta: float | None = None) -> float:
    """Closed form ``1/2 - |z| cos(theta - delta) - eta x``."""
    eta = ETA if eta is None else eta
    return 0.5 - z_abs * math.cos(theta - delta) - eta * x


def _with_phase(p: XStateParams, theta: float | None) -> XStateParams:
    if theta is None:
        return p
    return XStateParams(p.w, p.x, p.y, abs(p.z) * np.exp(1j * theta))


def ion_protocol(
    p: XStateParams,
    theta: float | None,
    delta: float,
    efficiency: float = 1.0,
    completion: Completion = "minimal",
) -> ProtocolOutcome:
    """
    Probability that both ions are found in ``g`` after the two pulses.

    Parameters
    ----------
    p : XStateParams
        Two-ion state at read-out time.
    theta : float or None
        Phase of the coherence.  When given it replaces ``arg p.z`` (only
        ``|p.z|`` is used); ``None`` keeps ``p.z`` as is.
    delta : float
        Control phase of the blue sideband pulse.
    efficiency : float
        Detection efficiency multiplying the ideal probability.
    completion : {"minimal", "alternate"}
        Action of the pulses on levels they never see populated.
    """
    rho = xstate_to_density(_with_phase(p, theta))
    reg = IonRegister.from_two_qubit(rho)
    reg = red_sideband_pi(reg, completion)
    reg = blue_sideband_half(reg, delta, completion)
    return ProtocolOutcome(delta=delta, probability=efficiency * reg.both_ground(), eta=ETA)


def choose_delta(theta: float) -> float:
    """Control phase with ``cos(theta - delta) = -eta``."""
    return theta + math.acos(-ETA)


def three_phase_inversion(readings: Sequence[ProtocolOutcome], cond_max: float = 1e10) -> tuple[float, float, float]:
    """
    Recover ``(x, |z|, theta)`` from read-outs at three control phases.

    Each reading gives one linear equation in ``(|z| cos theta,
    |z| sin theta, x)``:

        P(delta) = 1/2 - cos(delta) a - sin(delta) b - eta x

    Raises
    ------
    SingularSystem
        If the phases do not give three independent equations.
    """
    if len(readings) != 3:
        raise ValueError(f"need exactly three readings, got {len(readings)}")
    a = np.array([[math.cos(r.delta), math.sin(r.delta), r.eta] for r in readings])
    rhs = np.array([0.5 - r.probability for r in readings])
    if np.linalg.cond(a) > cond_max:
        raise SingularSystem("control phases give a rank-deficient system")
    zc, zs, x = np.linalg.solve(a, rhs)
    return float(x), float(math.hypot(zc, zs)), float(math.atan2(zs, zc))


def write_outcomes_csv(outcomes: Iterable[ProtocolOutcome], fh: TextIO) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["delta", "probability", "eta"])
    for o in outcomes:
        w.writerow([f"{o.delta:.12g}", f"{o.probability:.12g}", f"{o.eta:.12g}"])


def read_outcomes_csv(fh: TextIO) -> list[ProtocolOutcome]:
    rows = csv.DictReader(fh)
    if rows.fieldnames != ["delta", "probability", "eta"]:
        raise ValueError(f"unexpected header {rows.fieldnames}")
    return [ProtocolOutcome(float(r["delta"]), float(r["probability"]), float(r["eta"])) for r in rows]


def outcomes_to_csv(outcomes: Iterable[ProtocolOutcome]) -> str:
    buf = io.StringIO()
    write_outcomes_csv(outcomes, buf)
    return buf.getvalue()


# ---------------------------------------------------------------- cavity QED


def jc_unitary(angle: float, levels: int, phase: float = 0.0) -> ComplexMatrix:
    """
    Resonant atom-mode interaction on ``atom (e, g) x Fock(levels)``.

    Each pair ``{|e,n>, |g,n+1>}`` is rotated by ``angle * sqrt(n+1)``:
    ``|e,n> -> cos|e,n> - e^{i phase} sin|g,n+1>``.  ``|g,0>`` and the
    truncated ``|e,levels-1>`` are left alone.  ``angle = pi/2`` is a Rabi
    pi rotation on the one-excitation pair.
    """
    u = np.eye(2 * levels, dtype=complex)
    ph = np.exp(1j * phase)
    for n in range(levels - 1):
        a = angle * math.sqrt(n + 1)
        c, s = math.cos(a), math.sin(a)
        en, gn1 = _local(E, n, levels), _local(G, n + 1, levels)
        u[en, en], u[gn1, en] = c, -ph * s
        u[en, gn1], u[gn1, gn1] = np.conj(ph) * s, c
    return _check_unitary(u, "atom-cavity rotation")


def aux_rotation(delta: float) -> ComplexMatrix:
    """
    Classical pi rotation in ``C_aux`` on the atom ``(e, g)``:
    ``|g> -> e^{i delta/2}|e>``, ``|e> -> -e^{-i delta/2}|g>``.
    """
    u = np.zeros((2, 2), dtype=complex)
    u[E, G] = np.exp(0.5j * delta)
    u[G, E] = -np.exp(-0.5j * delta)
    return _check_unitary(u, "C_aux rotation")


def _two_mode_isometry() -> ComplexMatrix:
    # qubit order (11, 10, 01, 00) -> Fock |n_a> x |n_b>, n_b in 0..2
    v = np.zeros((6, 4), dtype=complex)
    for k, label in enumerate(TWO_QUBIT_BASIS):
        na, nb = int(label[0]), int(label[1])
        v[na * 3 + nb, k] = 1
    return v


_ISO = _two_mode_isometry()


@dataclass(frozen=True)
class CavityRegister:
    """Probe atom and the two high-Q modes; ``C_b`` keeps a two-photon level."""

    state: DensityMatrix

    def __post_init__(self) -> None:
        if self.state.dim != 12:
            raise InvalidParams(f"cavity register must have dimension 12, got {self.state.dim}")

    @classmethod
    def from_modes(cls, rho: DensityMatrix, atom_level: int = G) -> "CavityRegister":
        atom = np.zeros((2, 2), dtype=complex)
        atom[atom_level, atom_level] = 1
        modes = _ISO @ rho.matrix @ _ISO.conj().T
        return cls(DensityMatrix(np.kron(atom, modes), CAVITY_BASIS))

    def apply(self, u: ComplexMatrix) -> "CavityRegister":
        return CavityRegister(DensityMatrix(u @ self.state.matrix @ u.conj().T, CAVITY_BASIS))

    def atom_excited(self) -> float:
        return float(np.real(np.trace(self.state.matrix[:6, :6])))

    def modes_state(self) -> npt.NDArray[np.complex128]:
        """Reduced state of ``C_a x C_b`` (6x6), atom traced out."""
        m = self.state.matrix.reshape(2, 6, 2, 6)
        return np.einsum("iaib->ab", m)

    def two_mode_state(self) -> DensityMatrix:
        """Reduced mode state in the two-qubit basis; fails if ``C_b`` holds two photons."""
        modes = self.modes_state()
        leak = float(np.real(np.trace(modes)) - np.real(np.trace(_ISO.conj().T @ modes @ _ISO)))
        if leak > 1e-10:
            raise PreparationLeak(f"two-photon population {leak:.3e} in C_b")
        return DensityMatrix(_ISO.conj().T @ modes @ _ISO, TWO_QUBIT_BASIS)


def _on_atom_and(mode: int, u: ComplexMatrix) -> ComplexMatrix:
    return embed_operator(u, CAVITY_DIMS, [0, mode])


def cavity_prepare(s: InitialState) -> CavityRegister:
    """
    Prepare ``|alpha||00> + |beta| e^{i theta}|11>`` in ``C_a x C_b``.

    An excited atom undergoes a partial rotation in ``C_a`` (weights
    ``|alpha|``, ``|beta|``), a pi rotation in ``C_aux`` and a pi rotation
    in ``C_b``.  The coupling phase of the first stage is ``theta + pi`` so
    that the signs picked up in the two pi rotations cancel.

    Raises
    ------
    PreparationLeak
        If the atom is not left in ``g`` (to 1e-10) or the mode state differs
        from the target by more than 1e-12.
    """
    vac = DensityMatrix(np.diag([0, 0, 0, 1]).astype(complex), TWO_QUBIT_BASIS)  # |00>
    reg = CavityRegister.from_modes(vac, atom_level=E)
    angle = math.atan2(s.beta_mag, s.alpha_mag)
    reg = reg.apply(_on_atom_and(1, jc_unitary(angle, 2, phase=s.theta + math.pi)))
    reg = reg.apply(embed_operator(aux_rotation(0.0), CAVITY_DIMS, [0]))
    reg = reg.apply(_on_atom_and(2, jc_unitary(math.pi / 2, 3)))

    if reg.atom_excited() > 1e-10:
        raise PreparationLeak(f"atom leaves excited with probability {reg.atom_excited():.3e}")
    got = reg.two_mode_state().matrix
    want = initial_state_density(s).matrix
    if np.abs(got - want).max() > 1e-12:
        raise PreparationLeak(f"prepared state off by {np.abs(got - want).max():.3e}")
    return reg


def cavity_measure(
    p: XStateParams,
    theta: float | None,
    delta: float,
    efficiency: float = 1.0,
) -> ProtocolOutcome:
    """
    Probability of finding the probe atom in ``e`` after the three cavities.

    ``theta`` replaces the phase of ``p.z`` as in :func:`ion_protocol`.
    """
    rho = xstate_to_density(_with_phase(p, theta))
    reg = CavityRegister.from_modes(rho, atom_level=G)
    reg = reg.apply(_on_atom_and(1, jc_unitary(math.pi / 2, 2)))
    reg = reg.apply(embed_operator(aux_rotation(delta), CAVITY_DIMS, [0]))
    reg = reg.apply(_on_atom_and(2, jc_unitary(math.pi / 4, 3)))
    return ProtocolOutcome(delta=delta, probability=efficiency * reg.atom_excited(), eta=ETA)
