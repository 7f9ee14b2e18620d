"""Probe response: susceptibilities, transmitted intensities and rotation angle.

Besides the general mapping from a steady state to observables, this module
holds the closed-form results valid in the symmetric resonant regime
(phi = 0, Delta = 0, no pure dephasing, Omega+ = Omega-, Omega1 = -Omega2,
gamma_32 = gamma_41, gamma_31 = gamma_42, delta_lh = 0). They serve as an
independent oracle for the numerical pipeline.
"""

from __future__ import annotations

import math
import warnings

import numpy as np

from .core import (
    DensityMatrix,
    ParameterError,
    RegimeViolation,
    Susceptibilities,
    SystemParams,
    Transmission,
    ZeroProbe,
)

_REGIME_TOL = 1e-12


class DegenerateRotation(UserWarning):
    """Rotation angle requested for a fully absorbed beam."""


def susceptibilities(rho: DensityMatrix, p: SystemParams) -> Susceptibilities:
    if p.omega_plus == 0 or p.omega_minus == 0:
        raise ZeroProbe("normalized susceptibility needs non-zero Omega+ and Omega-")
    s_plus = rho.element(4, 1) * p.gamma_41 / p.omega_plus
    s_minus = rho.element(3, 2) * p.gamma_32 / p.omega_minus
    return Susceptibilities(s_plus, s_minus)


def check_symmetric_regime(p: SystemParams) -> None:
    """Raise RegimeViolation unless the closed-form solution applies to ``p``."""
    close = lambda a, b: abs(a - b) <= _REGIME_TOL  # noqa: E731
    problems = []
    if not close(p.phi, 0.0):
        problems.append("phi != 0")
    if not (close(p.delta_p, 0.0) and close(p.delta_pi, 0.0)):
        problems.append("detuning != 0")
    if not close(p.delta_lh, 0.0):
        problems.append("delta_lh != 0")
    dephasing = ("gamma_d_21", "gamma_d_31", "gamma_d_32", "gamma_d_41", "gamma_d_42", "gamma_d_43")
    for name in dephasing:
        if getattr(p, name) != 0:
            problems.append(f"{name} != 0")
    if not p.omega_plus > 0 or not close(p.omega_plus, p.omega_minus):
        problems.append("needs Omega+ = Omega- > 0")
    if not close(p.omega_1, -p.omega_2):
        problems.append("needs Omega1 = -Omega2")
    if not close(p.gamma_32, p.gamma_41):
        problems.append("needs gamma_32 = gamma_41")
    if not close(p.gamma_31, p.gamma_42):
        problems.append("needs gamma_31 = gamma_42")
    if problems:
        raise RegimeViolation("closed form not applicable: " + ", ".join(problems))


def _denominator(p: SystemParams) -> float:
    g, gp = p.gamma_32, p.gamma_31
    return (g + gp) ** 2 + 8 * (p.omega_plus**2 + p.omega_1**2) + 4 * p.delta_b**2


def analytic_coherences(p: SystemParams) -> tuple[complex, complex]:
    """Closed-form steady-state (rho_32, rho_41) in the symmetric resonant regime."""
    check_symmetric_regime(p)
    g, gp, db = p.gamma_32, p.gamma_31, p.delta_b
    d = _denominator(p)
    rho_32 = complex(-2 * db, g + gp) * p.omega_plus / d
    rho_41 = complex(2 * db, g + gp) * p.omega_plus / d
    return rho_32, rho_41


def analytic_susceptibilities(p: SystemParams) -> Susceptibilities:
    check_symmetric_regime(p)
    g, gp, db = p.gamma_32, p.gamma_31, p.delta_b
    d = _denominator(p)
    return Susceptibilities(
        s_plus=complex(2 * db, g + gp) * g / d,
        s_minus=complex(-2 * db, g + gp) * g / d,
    )


def rotation_angle(t_x: float, t_y: float) -> tuple[float, bool]:
    """Folded rotation angle atan(sqrt(Ty/Tx)) in [0, pi/2], plus a degeneracy flag."""
    if t_x == 0 and t_y == 0:
        warnings.warn("rotation angle of a null field is undefined; using 0", DegenerateRotation)
        return 0.0, True
    if t_x == 0:
        return math.pi / 2, False
    return math.atan(math.sqrt(t_y / t_x)), False


def transmission(s: Susceptibilities, alpha_l: float) -> Transmission:
    """Intensities behind x- and y-analyzers for an x-polarized input of unit intensity."""
    if not alpha_l >= 0:
        raise ParameterError(f"alpha_l must be non-negative, got {alpha_l!r}")
    a = np.exp(0.5j * alpha_l * s.s_plus)
    b = np.exp(0.5j * alpha_l * s.s_minus)
    t_x = 0.25 * abs(a + b) ** 2
    t_y = 0.25 * abs(a - b) ** 2
    phi_rot, degenerate = rotation_angle(t_x, t_y)
    return Transmission(float(t_x), float(t_y), phi_rot, degenerate)


def rotation_phase(p: SystemParams, alpha_l: float) -> float:
    """Phase difference alpha_l * (Re S+ - Re S-) / 2 accumulated by the circular components."""
    check_symmetric_regime(p)
    return 2 * alpha_l * p.delta_b * p.gamma_32 / _denominator(p)


def analytic_transmission(p: SystemParams, alpha_l: float) -> Transmission:
    check_symmetric_regime(p)
    if not alpha_l >= 0:
        raise ParameterError(f"alpha_l must be non-negative, got {alpha_l!r}")
    g, gp = p.gamma_32, p.gamma_31
    beta = (g + gp) * g / _denominator(p)  # common absorption Im S+ = Im S-
    theta = rotation_phase(p, alpha_l)
    decay = math.exp(-alpha_l * beta)
    t_x = 0.5 * decay * (1 + math.cos(theta))
    t_y = 0.5 * decay * (1 - math.cos(theta))
    phi_rot, degenerate = rotation_angle(t_x, t_y)
    return Transmission(t_x, t_y, phi_rot, degenerate)


def birefringence_dichroism(s: Susceptibilities) -> tuple[float, float]:
    """(Re S+ - Re S-, Im S+ - Im S-)."""
    diff = s.s_plus - s.s_minus
    return diff.real, diff.imag


def max_birefringence_delta_b(p: SystemParams) -> float:
    """Zeeman splitting that maximizes Re S+ - Re S- with the other parameters of ``p`` fixed."""
    check_symmetric_regime(p)
    g, gp = p.gamma_32, p.gamma_31
    return 0.5 * math.sqrt((g + gp) ** 2 + 8 * (p.omega_plus**2 + p.omega_1**2))


def complete_rotation_alpha_l(p: SystemParams) -> float:
    """Optical depth at which the circular components are dephased by pi, so that Tx = 0."""
    check_symmetric_regime(p)
    if p.delta_b == 0:
        return math.inf
    return math.pi * _denominator(p) / (2 * abs(p.delta_b) * p.gamma_32)
