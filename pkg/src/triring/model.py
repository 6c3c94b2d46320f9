"""Driven three-cavity ring: Hamiltonian, collapse operators, and the
closed-form optimal working points of its linearized network.

Two Kerr-nonlinear cavities (a and c) are coupled directly with a complex
amplitude ``j_ac * exp(i*theta)`` and indirectly through a lossy linear
bridge cavity b.  Composite-space mode ordering is fixed globally as
``(a, b, c)`` = indices ``(0, 1, 2)``; the ring is driven through cavity
a ("left") or cavity c ("right").

All energies and rates are expressed in one common unit; the port loss
``kappa`` is the natural choice.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import (
    DegeneratePhaseError,
    InvalidRateError,
    InvalidSpaceError,
    UnsupportedAsymmetryError,
)
from .fock import CompositeSpace, Operator, annihilation, embed
from .scattering import LinearModel

__all__ = [
    "MODE_A",
    "MODE_B",
    "MODE_C",
    "DriveSide",
    "TransmissionDirection",
    "SystemParams",
    "OptimalCondition",
    "build_hamiltonian",
    "collapse_operators",
    "optimal_condition",
    "phase_matching_residual",
]

MODE_A, MODE_B, MODE_C = 0, 1, 2

# Above this fraction of the weakest port loss the weak-drive assumptions
# behind the transmission normalization start to degrade.
WEAK_DRIVE_FRACTION = 0.5


class DriveSide(Enum):
    """Which port carries the probe laser."""

    LEFT = "left"    # drive cavity a, read the output at c
    RIGHT = "right"  # drive cavity c, read the output at a


class TransmissionDirection(Enum):
    FORWARD = "forward"    # a -> c
    BACKWARD = "backward"  # c -> a


@dataclass(frozen=True)
class SystemParams:
    """Rotating-frame parameters of the driven ring.

    ``delta_*`` are cavity detunings from the drive frequency, ``u_*`` the
    Kerr strengths of the nonlinear cavities, ``j_*`` non-negative coupling
    magnitudes, ``theta`` the phase of the direct a-c coupling, ``omega``
    the drive amplitude, and ``kappa_*`` the cavity loss rates.
    """

    delta_a: float = 0.0
    delta_c: float = 0.0
    delta_b: float = 0.0
    u_a: float = 0.0
    u_c: float = 0.0
    j_ab: float = 0.0
    j_bc: float = 0.0
    j_ac: float = 0.0
    theta: float = 0.0
    omega: float = 0.0
    drive: DriveSide = DriveSide.LEFT
    kappa_a: float = 1.0
    kappa_c: float = 1.0
    kappa_b: float = 0.0

    def __post_init__(self):
        if self.kappa_a <= 0 or self.kappa_c <= 0:
            raise InvalidRateError(
                "the input-output ports must be lossy: kappa_a and kappa_c must be > 0, "
                f"got {self.kappa_a} and {self.kappa_c}"
            )
        if self.kappa_b < 0:
            raise InvalidRateError(f"kappa_b must be >= 0, got {self.kappa_b}")
        for name in ("j_ab", "j_bc", "j_ac"):
            if getattr(self, name) < 0:
                raise InvalidRateError(
                    f"{name} is a coupling magnitude and must be >= 0, got {getattr(self, name)}"
                )
        if self.omega < 0:
            raise InvalidRateError(f"omega must be >= 0, got {self.omega}")
        if self.omega > WEAK_DRIVE_FRACTION * min(self.kappa_a, self.kappa_c):
            warnings.warn(
                f"omega = {self.omega} exceeds {WEAK_DRIVE_FRACTION} * min(kappa_a, kappa_c); "
                "results leave the weak-drive regime the observables assume",
                stacklevel=2,
            )


@dataclass(frozen=True)
class OptimalCondition:
    """Parameter set for complete one-way transmission at equal port losses.

    ``theta`` is the effective coupling phase: when the raw closed form
    yields a negative direct coupling, its sign is folded into the phase
    (``phase_folded`` is then True) so that ``j_ac`` stays a magnitude.
    """

    direction: TransmissionDirection
    delta: float
    j_ac: float
    j: float
    kappa_b: float
    theta: float
    phase_folded: bool

    def as_linear_model(self) -> LinearModel:
        """Linear network with equal port losses satisfying this condition.

        Evaluate the scattering matrix at probe frequency ``delta`` (bare
        frequencies are zero here, so probe frequency equals detuning).
        """
        kappa = self.kappa_b
        return LinearModel(
            j_ab=self.j,
            j_bc=self.j,
            j_ac=self.j_ac,
            theta=self.theta,
            kappa_a=kappa,
            kappa_c=kappa,
            kappa_b=self.kappa_b,
        )


def _mode_ops(space: CompositeSpace, cache: dict, mode: int) -> Operator:
    if mode not in cache:
        dim = space.mode_dims[mode]
        cache[mode] = embed(annihilation(dim), mode, space)
    return cache[mode]


def build_hamiltonian(params: SystemParams, space: CompositeSpace) -> Operator:
    """Rotating-frame Hamiltonian on the (a, b, c) composite space.

    H = delta_a n_a + delta_c n_c + delta_b n_b
        + u_a a'a'aa + u_c c'c'cc
        + (j_ac e^{i theta} a c' + j_ab a b' + j_bc c b' + h.c.)
        + omega (d' + d),  d = a or c per the drive side.

    Terms with zero coefficient are skipped, so padded dimension-1 modes
    are legal as long as nothing couples to them.  The result is Hermitian
    to exact floating-point equality because every non-diagonal term is
    added together with its explicit adjoint.
    """
    if space.n_modes != 3:
        raise InvalidSpaceError(
            f"the ring model needs exactly 3 modes (a, b, c), got {space.n_modes}"
        )
    d = space.dim
    h = np.zeros((d, d), dtype=complex)
    ops: dict[int, Operator] = {}

    # n and n(n-1) vanish identically on a dimension-1 (vacuum-only) mode,
    # so diagonal terms on padded modes are skipped along with zero terms
    for coeff, mode in (
        (params.delta_a, MODE_A),
        (params.delta_b, MODE_B),
        (params.delta_c, MODE_C),
    ):
        if coeff != 0.0 and space.mode_dims[mode] > 1:
            a = _mode_ops(space, ops, mode).data
            h += coeff * (a.conj().T @ a)

    for coeff, mode in ((params.u_a, MODE_A), (params.u_c, MODE_C)):
        if coeff != 0.0 and space.mode_dims[mode] > 1:
            a = _mode_ops(space, ops, mode).data
            ad = a.conj().T
            h += coeff * (ad @ ad @ a @ a)

    coupling = np.zeros((d, d), dtype=complex)
    if params.j_ac != 0.0:
        a = _mode_ops(space, ops, MODE_A).data
        c = _mode_ops(space, ops, MODE_C).data
        coupling += params.j_ac * cmath.exp(1j * params.theta) * (a @ c.conj().T)
    if params.j_ab != 0.0:
        a = _mode_ops(space, ops, MODE_A).data
        b = _mode_ops(space, ops, MODE_B).data
        coupling += params.j_ab * (a @ b.conj().T)
    if params.j_bc != 0.0:
        c = _mode_ops(space, ops, MODE_C).data
        b = _mode_ops(space, ops, MODE_B).data
        coupling += params.j_bc * (c @ b.conj().T)
    if params.j_ac != 0.0 or params.j_ab != 0.0 or params.j_bc != 0.0:
        h += coupling + coupling.conj().T

    if params.omega != 0.0:
        mode = MODE_A if params.drive is DriveSide.LEFT else MODE_C
        dop = _mode_ops(space, ops, mode).data
        h += params.omega * (dop + dop.conj().T)

    return Operator(space, h)


def collapse_operators(params: SystemParams, space: CompositeSpace) -> list[Operator]:
    """Collapse operators sqrt(kappa_o) o for o in (a, c, b).

    The loss term (kappa/2) * (2 o rho o' - {o'o, rho}) equals the standard
    dissipator with collapse operator sqrt(kappa) o, so this list feeds the
    usual Lindblad form directly.  A zero rate drops the operator from the
    list (only kappa_b may vanish); both conventions give the same
    Liouvillian.
    """
    if space.n_modes != 3:
        raise InvalidSpaceError(
            f"the ring model needs exactly 3 modes (a, b, c), got {space.n_modes}"
        )
    ops: dict[int, Operator] = {}
    out = []
    for rate, mode in (
        (params.kappa_a, MODE_A),
        (params.kappa_c, MODE_C),
        (params.kappa_b, MODE_B),
    ):
        if rate < 0:
            raise InvalidRateError(f"loss rates must be >= 0, got {rate}")
        if rate == 0.0 or space.mode_dims[mode] == 1:
            # zero operator either way; keep the sparse assembly clean
            continue
        op = _mode_ops(space, ops, mode)
        out.append(math.sqrt(rate) * op)
    return out


def optimal_condition(
    direction: TransmissionDirection, theta: float, kappa: float
) -> OptimalCondition:
    """Parameters for complete one-way transmission at equal port losses.

    Forward (a -> c):  delta = kappa / (2 tan theta),  j_ac = -kappa / (2 sin theta)
    Backward (c -> a): both signs flipped.  In either case j = |j_ac| and
    kappa_b = kappa.  A negative raw j_ac is folded into the phase,
    ``theta -> theta + pi``, keeping the reported coupling non-negative.
    """
    if kappa <= 0:
        raise InvalidRateError(f"kappa must be > 0, got {kappa}")
    s = math.sin(theta)
    if abs(s) < 1e-12:
        raise DegeneratePhaseError(
            f"optimal conditions are undefined at theta = {theta}: sin(theta) vanishes"
        )
    sign = 1.0 if direction is TransmissionDirection.FORWARD else -1.0
    delta = sign * kappa * math.cos(theta) / (2.0 * s)
    j_ac_raw = -sign * kappa / (2.0 * s)
    folded = j_ac_raw < 0
    return OptimalCondition(
        direction=direction,
        delta=delta,
        j_ac=abs(j_ac_raw),
        j=abs(j_ac_raw),
        kappa_b=kappa,
        theta=theta + math.pi if folded else theta,
        phase_folded=folded,
    )


def _distance_to_pi(x: float) -> float:
    """|x - pi| reduced modulo 2 pi into [0, pi]."""
    return abs(math.remainder(x - math.pi, 2.0 * math.pi))


def phase_matching_residual(params: SystemParams, delta: float) -> tuple[float, float]:
    """How far a parameter set is from the two-channel interference condition.

    The destructive-interference condition for nonreciprocal transmission is
    j_ac * |delta + i kappa_b / 2| = j**2 together with a phase match
    phi -+ theta = pi (mod 2 pi), where phi = arg(delta + i kappa_b / 2) is
    the loss-induced phase lag.  Returns (amplitude residual, phase residual)
    with the phase residual minimized over both branches and reduced to
    [0, pi].  Requires j_ab == j_bc.
    """
    if params.j_ab != params.j_bc:
        raise UnsupportedAsymmetryError(
            f"the interference condition assumes j_ab == j_bc, got "
            f"{params.j_ab} and {params.j_bc}"
        )
    z = complex(delta, 0.5 * params.kappa_b)
    amp = params.j_ac * abs(z) - params.j_ab**2
    phi = cmath.phase(z)
    phase = min(
        _distance_to_pi(phi - params.theta),
        _distance_to_pi(phi + params.theta),
    )
    return amp, phase
