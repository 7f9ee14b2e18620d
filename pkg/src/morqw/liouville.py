"""Liouville-space generator of the four-level equations of motion and its steady state.

The density matrix is vectorized row-major, ``v[4*(i-1) + (j-1)] = rho_ij``,
so that ``dv/dt = L @ v``.
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass

import numpy as np

from .core import (
    DensityMatrix,
    NonPhysical,
    SingularSystem,
    StepUnderflow,
    SystemParams,
)

log = logging.getLogger(__name__)

RESIDUAL_TOL = 1e-10
PHYSICAL_TOL = 1e-10
TRACE_DRIFT_TOL = 1e-9
MIN_STEP = 1e-12

# Rows of the equations written out explicitly; the remaining coherences follow
# by conjugate transposition and rho_44 by trace conservation.
_LOWER = ((2, 1), (3, 1), (4, 1), (3, 2), (4, 2), (4, 3))
_TRACE_ROW = 0  # the rho_11 row is replaced by the trace constraint


def idx(i: int, j: int) -> int:
    """Position of rho_ij (1-based labels) in the vectorized density matrix."""
    return 4 * (i - 1) + (j - 1)


def _equations(p: SystemParams) -> dict[tuple[int, int], list[tuple[tuple[int, int], complex]]]:
    """Right-hand sides of the explicit equations as ``row -> [(column, coefficient)]``."""
    op, om = p.omega_plus, p.omega_minus
    e, ec = complex(math.cos(p.phi), math.sin(p.phi)), complex(math.cos(p.phi), -math.sin(p.phi))
    o1p, o1m = p.omega_1 * e, p.omega_1 * ec  # Omega_1 e^{+i phi}, Omega_1 e^{-i phi}
    o2p, o2m = p.omega_2 * e, p.omega_2 * ec
    # Degenerate transitions: Delta_+ = Delta_- = Delta_p, Delta_1 = Delta_2 = Delta_pi.
    d_plus = d_minus = p.delta_p
    d_1 = d_2 = p.delta_pi
    db, dlh = p.delta_b, p.delta_lh
    i = 1j
    return {
        (1, 1): [
            ((3, 3), p.gamma_31), ((4, 4), p.gamma_41),
            ((3, 1), i * o1p), ((1, 3), -i * o1m),
            ((4, 1), i * op), ((1, 4), -i * op),
        ],
        (2, 2): [
            ((3, 3), p.gamma_32), ((4, 4), p.gamma_42),
            ((3, 2), i * om), ((2, 3), -i * om),
            ((4, 2), i * o2p), ((2, 4), -i * o2m),
        ],
        (3, 3): [
            ((3, 3), -p.gamma_3),
            ((1, 3), i * o1m), ((3, 1), -i * o1p),
            ((2, 3), i * om), ((3, 2), -i * om),
        ],
        # Detuning bracket enters with the opposite sign to the other
        # coherences; this only matters for delta_lh != 0.
        (2, 1): [
            ((2, 1), -(p.Gamma_21 / 2 + i * (d_1 - d_minus - 2 * dlh))),
            ((3, 1), i * om), ((4, 1), i * o2p),
            ((2, 4), -i * op), ((2, 3), -i * o1m),
        ],
        (3, 1): [
            ((3, 1), -(p.Gamma_31 / 2 - i * (d_1 + db - dlh))),
            ((1, 1), i * o1m), ((3, 3), -i * o1m),
            ((2, 1), i * om), ((3, 4), -i * op),
        ],
        (4, 1): [
            ((4, 1), -(p.Gamma_41 / 2 - i * (d_plus - db - dlh))),
            ((1, 1), i * op), ((4, 4), -i * op),
            ((2, 1), i * o2m), ((4, 3), -i * o1m),
        ],
        (3, 2): [
            ((3, 2), -(p.Gamma_32 / 2 - i * (d_minus + db + dlh))),
            ((2, 2), i * om), ((3, 3), -i * om),
            ((1, 2), i * o1m), ((3, 4), -i * o2m),
        ],
        (4, 2): [
            ((4, 2), -(p.Gamma_42 / 2 - i * (d_2 - db + dlh))),
            ((2, 2), i * o2m), ((4, 4), -i * o2m),
            ((4, 3), -i * om), ((1, 2), i * op),
        ],
        (4, 3): [
            ((4, 3), -(p.Gamma_43 / 2 - i * (d_2 - d_minus - 2 * db))),
            ((4, 2), -i * om), ((4, 1), -i * o1p),
            ((2, 3), i * o2m), ((1, 3), i * op),
        ],
    }


@dataclass(frozen=True, eq=False)
class Generator:
    """16x16 matrix ``L`` with ``d vec(rho)/dt = L @ vec(rho)``."""

    matrix: np.ndarray

    def apply(self, rho: DensityMatrix) -> np.ndarray:
        """Time derivative of ``rho`` as a 4x4 array."""
        return (self.matrix @ rho.vec()).reshape(4, 4)

    def norm_inf(self) -> float:
        return float(np.abs(self.matrix).sum(axis=1).max())

    def to_csv(self, path) -> None:
        """Debug dump: one row per vec index, 32 columns of interleaved re/im parts."""
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            header = []
            for k in range(16):
                header += [f"re_{k}", f"im_{k}"]
            writer.writerow(header)
            for row in self.matrix:
                cells = []
                for z in row:
                    cells += [f"{z.real:.17g}", f"{z.imag:.17g}"]
                writer.writerow(cells)


def build_generator(p: SystemParams) -> Generator:
    L = np.zeros((16, 16), dtype=complex)
    for (r, c), terms in _equations(p).items():
        row = idx(r, c)
        for (k, l), coeff in terms:
            L[row, idx(k, l)] += coeff
    for r, c in _LOWER:
        src, dst = idx(r, c), idx(c, r)
        for k in range(1, 5):
            for l in range(1, 5):
                L[dst, idx(l, k)] = np.conj(L[src, idx(k, l)])
    L[idx(4, 4)] = -(L[idx(1, 1)] + L[idx(2, 2)] + L[idx(3, 3)])
    L.setflags(write=False)
    return Generator(L)


def residual(p: SystemParams, rho: DensityMatrix) -> float:
    """Largest element of |L vec(rho)|, in units of gamma."""
    return float(np.max(np.abs(build_generator(p).matrix @ rho.vec())))


def steady_state(p: SystemParams) -> DensityMatrix:
    """Unique trace-one fixed point of the equations of motion.

    Raises SingularSystem when the fixed point is not unique (e.g. no drive
    fields at all), NonPhysical when the solution is not a valid density matrix.
    """
    L = build_generator(p).matrix
    A = L.copy()
    A[_TRACE_ROW] = 0
    A[_TRACE_ROW, [idx(k, k) for k in range(1, 5)]] = 1
    b = np.zeros(16, dtype=complex)
    b[_TRACE_ROW] = 1
    try:
        v = np.linalg.solve(A, b)
    except np.linalg.LinAlgError as exc:
        raise SingularSystem(f"steady-state system is singular: {exc}") from exc
    res = float(np.max(np.abs(L @ v)))
    if not res < RESIDUAL_TOL:
        raise SingularSystem(f"steady-state residual {res:.3e} exceeds {RESIDUAL_TOL:g}")
    rho = DensityMatrix.from_vector(v)
    rho.check(tol=PHYSICAL_TOL, diag_tol=PHYSICAL_TOL)
    # Phenomenological dephasing need not be completely positive; only warn.
    lowest = float(np.linalg.eigvalsh(0.5 * (rho.rho + rho.rho.conj().T)).min())
    if lowest < -PHYSICAL_TOL:
        log.warning("steady state has a negative eigenvalue %.3e", lowest)
    return rho


def rk4_propagator(L: np.ndarray, h: float) -> np.ndarray:
    """One classical RK4 step for the linear system dv/dt = L v, as a matrix."""
    hL = h * L
    eye = np.eye(L.shape[0], dtype=complex)
    # k1..k4 composed: I + hL + (hL)^2/2 + (hL)^3/6 + (hL)^4/24
    return eye + hL @ (eye + hL @ (eye / 2 + hL @ (eye / 6 + hL / 24)))


def evolve(
    p: SystemParams, rho0: DensityMatrix, t_end: float, dt_max: float = 0.01
) -> DensityMatrix:
    """Integrate from ``rho0`` to ``t_end`` (units of 1/gamma) with fixed-step RK4.

    The step is the largest one with h <= dt_max and h <= 0.05 / ||L||_inf that
    divides ``t_end`` evenly. Because the equations are linear and autonomous,
    the n identical steps are applied as a matrix power of the one-step map.
    """
    if t_end < 0:
        raise ValueError(f"t_end must be non-negative, got {t_end!r}")
    if not dt_max > 0:
        raise ValueError(f"dt_max must be positive, got {dt_max!r}")
    if t_end == 0:
        return rho0
    gen = build_generator(p)
    norm = gen.norm_inf()
    h_max = dt_max if norm == 0 else min(dt_max, 0.05 / norm)
    if h_max < MIN_STEP:
        raise StepUnderflow(f"required step {h_max:.3e} is below {MIN_STEP:g}")
    n = math.ceil(t_end / h_max)
    h = t_end / n
    step = rk4_propagator(gen.matrix, h)
    v = np.linalg.matrix_power(step, n) @ rho0.vec()
    drift = abs(v[[idx(k, k) for k in range(1, 5)]].sum() - np.trace(rho0.rho))
    if drift > TRACE_DRIFT_TOL:
        raise NonPhysical(f"trace drifted by {drift:.3e} during integration")
    return DensityMatrix.from_vector(v)
