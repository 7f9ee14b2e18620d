"""Domain types and parameter handling for the four-level quantum-well model.

Every rate and frequency is expressed in units of the conduction-band decay
rate gamma (gamma == 1 internally). Level labels follow the usual scheme:
|1>, |2> are the light-hole ground states and |3>, |4> the conduction-band
states; index ``i`` in the 4x4 arrays below is ``level - 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, replace

import numpy as np

# Bohr magneton over hbar, rad s^-1 T^-1 (CODATA 2018).
MU_B_OVER_HBAR = 8.7941e10

# Scaling rate gamma for a typical GaAs QW waveguide, Hz.
GAMMA_HZ = 1e11

_RESONANCE_TOL = 1e-12


class MorqwError(Exception):
    """Base class for all errors raised by this package."""


class ParameterError(MorqwError, ValueError):
    """Invalid physical input."""


class NegativeRate(ParameterError):
    pass


class MultiPhotonViolation(ParameterError):
    pass


class NonPositiveGamma(ParameterError):
    pass


class ComputationError(MorqwError):
    """A well-formed input for which the requested quantity cannot be produced."""


class SingularSystem(ComputationError):
    pass


class NonPhysical(ComputationError):
    pass


class StepUnderflow(ComputationError):
    pass


class ZeroProbe(ComputationError):
    pass


class RegimeViolation(ComputationError):
    pass


RATE_FIELDS = (
    "gamma_31",
    "gamma_32",
    "gamma_41",
    "gamma_42",
    "gamma_d_21",
    "gamma_d_31",
    "gamma_d_32",
    "gamma_d_41",
    "gamma_d_42",
    "gamma_d_43",
)


@dataclass(frozen=True)
class SystemParams:
    """Physical inputs of the model, all in units of gamma (phi in radians).

    ``omega_1`` and ``omega_2`` are independent signed couplings; the dipole
    convention mu_42 = -mu_31 is expressed by choosing ``omega_2 = -omega_1``
    (which :meth:`symmetric` does), not enforced.
    """

    omega_plus: float = 0.0
    omega_minus: float = 0.0
    omega_1: float = 0.0
    omega_2: float = 0.0
    phi: float = 0.0
    delta_p: float = 0.0
    delta_pi: float = 0.0
    delta_b: float = 0.0
    delta_lh: float = 0.0
    gamma_31: float = 0.0
    gamma_32: float = 0.0
    gamma_41: float = 0.0
    gamma_42: float = 0.0
    gamma_d_21: float = 0.0
    gamma_d_31: float = 0.0
    gamma_d_32: float = 0.0
    gamma_d_41: float = 0.0
    gamma_d_42: float = 0.0
    gamma_d_43: float = 0.0

    @classmethod
    def symmetric(
        cls,
        omega: float = 1.0,
        omega_pi: float = 1.0,
        delta_b: float = 0.0,
        delta: float = 0.0,
        phi: float = 0.0,
        gamma: float = 1.0,
        gamma_prime: float = 0.01,
        **kwargs: float,
    ) -> "SystemParams":
        """Parameters with Omega+ = Omega- = omega, Omega1 = -Omega2 = omega_pi,
        gamma_32 = gamma_41 = gamma and gamma_31 = gamma_42 = gamma_prime."""
        return cls(
            omega_plus=omega,
            omega_minus=omega,
            omega_1=omega_pi,
            omega_2=-omega_pi,
            phi=phi,
            delta_p=delta,
            delta_pi=delta,
            delta_b=delta_b,
            gamma_31=gamma_prime,
            gamma_32=gamma,
            gamma_41=gamma,
            gamma_42=gamma_prime,
            **kwargs,
        )

    @classmethod
    def baseline(cls) -> "SystemParams":
        """Base point of the fig2-fig5 presets: Delta_B = 9, spin dephasing 0.05."""
        return cls.symmetric(delta_b=9.0, gamma_d_43=0.05)

    @classmethod
    def field_names(cls) -> tuple[str, ...]:
        return tuple(f.name for f in fields(cls))

    def with_delta(self, delta: float) -> "SystemParams":
        """Move probe and control detunings together (keeps multi-photon resonance)."""
        return self.replace(delta_p=delta, delta_pi=delta)

    def replace(self, **changes: float) -> "SystemParams":
        return replace(self, **changes)

    def as_dict(self) -> dict[str, float]:
        return {name: getattr(self, name) for name in self.field_names()}

    # Total decay rates of the excited states.
    @property
    def gamma_3(self) -> float:
        return self.gamma_31 + self.gamma_32

    @property
    def gamma_4(self) -> float:
        return self.gamma_41 + self.gamma_42

    # Overall coherence damping rates; the equations of motion use Gamma_ij / 2.
    @property
    def Gamma_21(self) -> float:
        return self.gamma_d_21

    @property
    def Gamma_31(self) -> float:
        return self.gamma_3 + self.gamma_d_31

    @property
    def Gamma_32(self) -> float:
        return self.gamma_3 + self.gamma_d_32

    @property
    def Gamma_41(self) -> float:
        return self.gamma_4 + self.gamma_d_41

    @property
    def Gamma_42(self) -> float:
        return self.gamma_4 + self.gamma_d_42

    @property
    def Gamma_43(self) -> float:
        return self.gamma_3 + self.gamma_4 + self.gamma_d_43


def validate_params(p: SystemParams) -> SystemParams:
    """Return ``p`` unchanged if it is a valid operating point, raise otherwise."""
    for name in p.field_names():
        if not math.isfinite(getattr(p, name)):
            raise ParameterError(f"{name} must be finite, got {getattr(p, name)!r}")
    for name in RATE_FIELDS:
        if getattr(p, name) < 0:
            raise NegativeRate(f"{name} = {getattr(p, name)!r} is negative")
    if p.omega_plus < 0 or p.omega_minus < 0:
        raise NegativeRate("probe Rabi frequencies must be non-negative")
    # The rotating-frame equations only hold on multi-photon resonance.
    if abs(p.delta_p - p.delta_pi) > _RESONANCE_TOL:
        raise MultiPhotonViolation(
            f"delta_p = {p.delta_p!r} differs from delta_pi = {p.delta_pi!r}"
        )
    return p


def zeeman_from_field(
    b_tesla: float, g_s: float, g_j: float, gamma_hz: float = GAMMA_HZ
) -> tuple[float, float]:
    """Zeeman half-splittings (delta_b, delta_lh) in units of gamma for a field B.

    The conduction band splits by 2*delta_b = -2 g_s mu_B B / hbar and the
    light-hole band by 2*delta_lh = -2 g_j mu_B B / hbar.
    """
    if not gamma_hz > 0:
        raise NonPositiveGamma(f"gamma_hz must be positive, got {gamma_hz!r}")
    delta_b = -g_s * MU_B_OVER_HBAR * b_tesla / gamma_hz
    delta_lh = -g_j * MU_B_OVER_HBAR * b_tesla / gamma_hz
    return delta_b, delta_lh


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """4x4 density matrix in the basis |1>, |2>, |3>, |4>."""

    rho: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.rho, dtype=complex)
        if arr.shape != (4, 4):
            raise ValueError(f"density matrix must be 4x4, got shape {arr.shape}")
        arr.setflags(write=False)
        object.__setattr__(self, "rho", arr)

    @classmethod
    def from_vector(cls, v: np.ndarray) -> "DensityMatrix":
        """Inverse of :meth:`vec` (row-major: v[4*(i-1)+(j-1)] = rho_ij)."""
        return cls(np.asarray(v, dtype=complex).reshape(4, 4))

    @classmethod
    def diagonal(cls, populations) -> "DensityMatrix":
        return cls(np.diag(np.asarray(populations, dtype=complex)))

    def vec(self) -> np.ndarray:
        return self.rho.reshape(16).copy()

    def element(self, i: int, j: int) -> complex:
        """rho_ij with 1-based level labels."""
        return complex(self.rho[i - 1, j - 1])

    @property
    def populations(self) -> np.ndarray:
        return self.rho.diagonal().real.copy()

    def check(self, tol: float = 1e-12, diag_tol: float = 1e-10) -> "DensityMatrix":
        """Raise :class:`NonPhysical` unless Hermitian, unit-trace, diagonal in [0, 1]."""
        rho = self.rho
        herm = np.max(np.abs(rho - rho.conj().T))
        if not herm <= tol:
            raise NonPhysical(f"density matrix not Hermitian (max deviation {herm:.3e})")
        tr = np.trace(rho)
        if not abs(tr - 1) <= tol:
            raise NonPhysical(f"trace is {tr!r}, expected 1")
        diag = rho.diagonal()
        if np.max(np.abs(diag.imag)) > tol:
            raise NonPhysical("diagonal entries are not real")
        if np.any(diag.real < -diag_tol) or np.any(diag.real > 1 + diag_tol):
            raise NonPhysical(f"populations out of [0, 1]: {diag.real}")
        return self

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DensityMatrix):
            return NotImplemented
        return bool(np.array_equal(self.rho, other.rho))

    __hash__ = None  # type: ignore[assignment]


@dataclass(frozen=True)
class Susceptibilities:
    """Normalized susceptibilities of the two circular probe components.

    Imaginary parts are absorption, real parts dispersion. Negative imaginary
    parts (gain) are allowed.
    """

    s_plus: complex
    s_minus: complex


@dataclass(frozen=True)
class Transmission:
    """Output intensities along x and y relative to the input, and the rotation angle.

    ``degenerate`` is set when both intensities vanish and the rotation angle
    is undefined (reported as 0).
    """

    t_x: float
    t_y: float
    phi_rot: float
    degenerate: bool = field(default=False, compare=False)
