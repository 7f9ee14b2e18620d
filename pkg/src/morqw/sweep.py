"""Parameter sweeps over the full pipeline and the figure presets."""

from __future__ import annotations

import itertools
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import liouville, optics
from .core import MorqwError, ParameterError, SystemParams, validate_params

AXIS_NAMES = ("delta", "delta_b", "gamma_d_21", "phi", "alpha_l")
METHODS = ("numeric", "analytic")
OBSERVABLES = (
    "re_s_plus",
    "im_s_plus",
    "re_s_minus",
    "im_s_minus",
    "re_diff",
    "im_diff",
    "t_x",
    "t_y",
    "phi_rot",
    "residual",
)
MAX_POINTS = 10**7
DEFAULT_POINTS = 501


class GridTooLarge(ParameterError):
    pass


class UnknownFigure(ParameterError):
    pass


@dataclass(frozen=True)
class SweepAxis:
    name: str
    start: float
    stop: float
    count: int = DEFAULT_POINTS

    def __post_init__(self) -> None:
        if self.name not in AXIS_NAMES:
            raise ParameterError(f"unknown sweep axis {self.name!r}; expected one of {AXIS_NAMES}")
        if not (math.isfinite(self.start) and math.isfinite(self.stop)):
            raise ParameterError("sweep bounds must be finite")
        if not self.start < self.stop:
            raise ParameterError(f"axis {self.name}: start {self.start!r} must be below stop {self.stop!r}")
        if int(self.count) != self.count or self.count < 2:
            raise ParameterError(f"axis {self.name}: count must be an integer >= 2, got {self.count!r}")

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, int(self.count))


@dataclass(frozen=True)
class SweepRow:
    coords: tuple[float, ...]
    values: tuple[float, ...]  # ordered as OBSERVABLES; all NaN on error
    status: str = "ok"

    def __getitem__(self, name: str) -> float:
        return self.values[OBSERVABLES.index(name)]

    @property
    def ok(self) -> bool:
        return self.status == "ok"


@dataclass(frozen=True)
class SweepResult:
    axis_names: tuple[str, ...]
    rows: tuple[SweepRow, ...]
    method: str = "numeric"

    def __len__(self) -> int:
        return len(self.rows)

    @property
    def columns(self) -> tuple[str, ...]:
        return self.axis_names + OBSERVABLES + ("status",)

    def column(self, name: str) -> np.ndarray:
        if name in self.axis_names:
            k = self.axis_names.index(name)
            return np.array([r.coords[k] for r in self.rows])
        k = OBSERVABLES.index(name)
        return np.array([r.values[k] for r in self.rows])

    def statuses(self) -> list[str]:
        return [r.status for r in self.rows]


def apply_setting(p: SystemParams, name: str, value: float) -> SystemParams:
    """Set one sweepable parameter; ``delta`` moves probe and control detuning together."""
    if name == "delta":
        return p.with_delta(value)
    return p.replace(**{name: value})


def observables(p: SystemParams, alpha_l: float, method: str = "numeric") -> dict[str, float]:
    """All derived quantities at one operating point, keyed as OBSERVABLES.

    ``residual`` is NaN for the analytic method, which has no density matrix.
    """
    validate_params(p)
    if method == "numeric":
        rho = liouville.steady_state(p)
        s = optics.susceptibilities(rho, p)
        t = optics.transmission(s, alpha_l)
        res = liouville.residual(p, rho)
    elif method == "analytic":
        s = optics.analytic_susceptibilities(p)
        t = optics.analytic_transmission(p, alpha_l)
        res = math.nan
    else:
        raise ParameterError(f"unknown method {method!r}; expected one of {METHODS}")
    re_diff, im_diff = optics.birefringence_dichroism(s)
    values = (
        s.s_plus.real, s.s_plus.imag, s.s_minus.real, s.s_minus.imag,
        re_diff, im_diff, t.t_x, t.t_y, t.phi_rot, res,
    )
    return dict(zip(OBSERVABLES, (float(v) for v in values)))


def evaluate_point(
    base: SystemParams,
    settings: tuple[tuple[str, float], ...],
    alpha_l: float,
    method: str,
) -> SweepRow:
    """One grid point; errors are captured in the row status."""
    coords = tuple(float(v) for _, v in settings)
    p = base
    for name, value in settings:
        if name == "alpha_l":
            alpha_l = float(value)
        else:
            p = apply_setting(p, name, float(value))
    try:
        obs = observables(p, alpha_l, method)
    except MorqwError as exc:
        return SweepRow(coords, (math.nan,) * len(OBSERVABLES), type(exc).__name__)
    return SweepRow(coords, tuple(obs.values()))


def _evaluate_chunk(args) -> list[SweepRow]:
    base, chunk, alpha_l, method = args
    return [evaluate_point(base, settings, alpha_l, method) for settings in chunk]


def default_workers() -> int:
    env = os.environ.get("MORQW_WORKERS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def run_sweep(
    base: SystemParams,
    axes,
    alpha_l: float = 0.0,
    method: str = "numeric",
    workers: int = 1,
) -> SweepResult:
    """Evaluate the pipeline on the grid spanned by one or two axes.

    Rows follow the grid with the first axis outermost. Bad points are recorded
    with an error status instead of aborting the sweep. The result does not
    depend on ``workers``.
    """
    if isinstance(axes, SweepAxis):
        axes = (axes,)
    axes = tuple(axes)
    if not 1 <= len(axes) <= 2:
        raise ParameterError(f"a sweep takes one or two axes, got {len(axes)}")
    if len({a.name for a in axes}) != len(axes):
        raise ParameterError("sweep axes must address different parameters")
    if method not in METHODS:
        raise ParameterError(f"unknown method {method!r}; expected one of {METHODS}")
    n_points = math.prod(int(a.count) for a in axes)
    if n_points > MAX_POINTS:
        raise GridTooLarge(f"{n_points} grid points exceed the limit of {MAX_POINTS}")
    validate_params(base)
    names = tuple(a.name for a in axes)
    if "alpha_l" not in names and not alpha_l >= 0:
        raise ParameterError(f"alpha_l must be non-negative, got {alpha_l!r}")

    grid = [
        tuple(zip(names, point))
        for point in itertools.product(*(a.values().tolist() for a in axes))
    ]
    if workers <= 1 or n_points < 2 * workers:
        rows = [evaluate_point(base, settings, alpha_l, method) for settings in grid]
    else:
        size = math.ceil(n_points / (4 * workers))
        chunks = [grid[i : i + size] for i in range(0, n_points, size)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = pool.map(_evaluate_chunk, [(base, c, alpha_l, method) for c in chunks])
            rows = [row for part in parts for row in part]
    return SweepResult(names, tuple(rows), method)


@dataclass(frozen=True)
class FigurePreset:
    """Parameters reproducing one figure.

    ``variants`` are (tag, settings) pairs applied on top of ``base``; each
    variant is run once per value in ``alpha_l``. An empty ``alpha_l`` means
    the optical depth is itself a sweep axis.
    """

    name: str
    base: SystemParams
    axes: tuple[SweepAxis, ...]
    alpha_l: tuple[float, ...]
    method: str
    variants: tuple[tuple[str, tuple[tuple[str, float], ...]], ...] = field(
        default=(("", ()),)
    )

    def runs(self):
        """Yield (file stem, params, alpha_l) for every variant / optical depth pair."""
        for tag, settings in self.variants:
            p = self.base
            for name, value in settings:
                p = apply_setting(p, name, value)
            stem = self.name + (f"_{tag}" if tag else "")
            if not self.alpha_l:
                yield stem, p, 0.0
            for al in self.alpha_l:
                yield f"{stem}_al-{al:g}", p, al


def figure_preset(name: str, points: int = DEFAULT_POINTS) -> FigurePreset:
    base = SystemParams.baseline()
    gamma21 = (("gamma21-0", (("gamma_d_21", 0.0),)), ("gamma21-0.05", (("gamma_d_21", 0.05),)))
    # Closed-form regime: no spin dephasing.
    fig6_base = SystemParams.symmetric(delta_b=0.0)
    delta_axis = SweepAxis("delta", -20.0, 20.0, points)
    if name == "fig2":
        return FigurePreset(name, base, (delta_axis,), (58.0,), "numeric", gamma21)
    if name == "fig3":
        return FigurePreset(name, base, (delta_axis,), (30.0, 58.0, 85.0), "numeric", gamma21)
    if name == "fig4":
        variants = (("delta-0", (("delta", 0.0),)), ("delta-1", (("delta", 1.0),)))
        return FigurePreset(
            name, base.replace(delta_b=1.0), (SweepAxis("gamma_d_21", 0.0, 0.5, points),),
            (58.0,), "numeric", variants,
        )
    if name == "fig5":
        return FigurePreset(
            name, base.replace(delta_b=5.0), (SweepAxis("phi", 0.0, 2 * math.pi, points),),
            (30.0,), "numeric",
        )
    if name == "fig6":
        return FigurePreset(
            name, fig6_base, (SweepAxis("delta_b", 0.0, 10.0, points),), (45.0,), "analytic"
        )
    if name == "fig7":
        axes = (SweepAxis("delta_b", 0.0, 10.0, points), SweepAxis("alpha_l", 0.0, 100.0, points))
        return FigurePreset(name, fig6_base, axes, (), "analytic")
    raise UnknownFigure(f"unknown figure {name!r}; expected one of {FIGURES}")


FIGURES = ("fig2", "fig3", "fig4", "fig5", "fig6", "fig7")
