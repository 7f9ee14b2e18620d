"""Command-line front end: ``morqw point|sweep|figure``.

Exit codes: 0 success, 2 usage or configuration error, 3 solver error, 4 I/O error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field, fields
from pathlib import Path

from .core import ComputationError, ParameterError, SystemParams, validate_params
from .sweep import (
    DEFAULT_POINTS,
    FIGURES,
    METHODS,
    OBSERVABLES,
    SweepAxis,
    SweepResult,
    apply_setting,
    default_workers,
    figure_preset,
    observables,
    run_sweep,
)

EXIT_OK, EXIT_USAGE, EXIT_SOLVER, EXIT_IO = 0, 2, 3, 4
FORMATS = ("csv", "json")
PARAM_KEYS = SystemParams.field_names() + ("delta",)


class ConfigError(ParameterError):
    pass


def _as_float(key: str, value) -> float:
    if isinstance(value, bool):
        raise ConfigError(f"{key}: expected a number, got {value!r}")
    try:
        x = float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{key}: expected a number, got {value!r}") from None
    if not math.isfinite(x):
        raise ConfigError(f"{key}: value must be finite, got {value!r}")
    return x


def parse_axis(text: str) -> SweepAxis:
    """``name:start:stop[:count]`` -> SweepAxis."""
    parts = str(text).split(":")
    if len(parts) not in (3, 4):
        raise ConfigError(f"axis {text!r}: expected name:start:stop[:count]")
    name = parts[0]
    start = _as_float("axis start", parts[1])
    stop = _as_float("axis stop", parts[2])
    try:
        count = int(parts[3]) if len(parts) == 4 else DEFAULT_POINTS
    except ValueError:
        raise ConfigError(f"axis {text!r}: count must be an integer") from None
    try:
        return SweepAxis(name, start, stop, count)
    except ParameterError as exc:
        raise ConfigError(str(exc)) from None


def format_axis(axis: SweepAxis) -> str:
    return f"{axis.name}:{axis.start!r}:{axis.stop!r}:{axis.count}"


@dataclass
class ScenarioConfig:
    """Flat scenario document. ``params`` holds only explicitly set physical values."""

    params: dict[str, float] = field(default_factory=dict)
    alpha_l: float | None = None
    method: str | None = None
    axis1: str | None = None
    axis2: str | None = None
    figure: str | None = None
    out: str | None = None
    format: str | None = None
    workers: int | None = None

    @classmethod
    def keys(cls) -> tuple[str, ...]:
        return PARAM_KEYS + tuple(f.name for f in fields(cls) if f.name != "params")

    def set(self, key: str, value) -> None:
        if isinstance(value, (dict, list, tuple)):
            raise ConfigError(f"{key}: nested values are not allowed")
        if key in PARAM_KEYS:
            self.params[key] = _as_float(key, value)
        elif key == "alpha_l":
            self.alpha_l = _as_float(key, value)
        elif key in ("axis1", "axis2"):
            setattr(self, key, format_axis(parse_axis(value)))
        elif key == "method":
            if value not in METHODS:
                raise ConfigError(f"method must be one of {METHODS}, got {value!r}")
            self.method = value
        elif key == "format":
            if value not in FORMATS:
                raise ConfigError(f"format must be one of {FORMATS}, got {value!r}")
            self.format = value
        elif key == "workers":
            n = _as_float(key, value)
            if n != int(n) or n < 1:
                raise ConfigError(f"workers must be a positive integer, got {value!r}")
            self.workers = int(n)
        elif key in ("figure", "out"):
            setattr(self, key, str(value))
        else:
            raise ConfigError(f"unknown configuration key {key!r}")

    @classmethod
    def from_mapping(cls, mapping: dict) -> "ScenarioConfig":
        cfg = cls()
        for key, value in mapping.items():
            cfg.set(key, value)
        return cfg

    def to_mapping(self) -> dict:
        out: dict = dict(self.params)
        for f in fields(self):
            if f.name != "params" and getattr(self, f.name) is not None:
                out[f.name] = getattr(self, f.name)
        return out

    @classmethod
    def from_text(cls, text: str) -> "ScenarioConfig":
        """Parse a JSON object or ``key = value`` lines (``#`` starts a comment)."""
        stripped = text.strip()
        if stripped.startswith("{"):
            try:
                data = json.loads(stripped)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"invalid JSON config: {exc}") from None
            if not isinstance(data, dict):
                raise ConfigError("JSON config must be an object")
            return cls.from_mapping(data)
        cfg = cls()
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"line {lineno}: expected key=value, got {line!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            cfg.set(key, value)
        return cfg

    def to_text(self) -> str:
        lines = []
        for key, value in self.to_mapping().items():
            lines.append(f"{key} = {value!r}" if isinstance(value, float) else f"{key} = {value}")
        return "\n".join(lines) + "\n"

    def axes(self) -> tuple[SweepAxis, ...]:
        return tuple(parse_axis(a) for a in (self.axis1, self.axis2) if a is not None)


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def result_to_csv(result: SweepResult) -> str:
    lines = [",".join(result.columns)]
    for row in result.rows:
        cells = [_fmt(c) for c in row.coords] + [_fmt(v) for v in row.values] + [row.status]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def csv_to_records(text: str) -> tuple[list[str], list[list]]:
    """Parse a CSV written by :func:`result_to_csv`; numbers become floats."""
    lines = text.rstrip("\n").split("\n")
    header = lines[0].split(",")
    rows = []
    for line in lines[1:]:
        cells = line.split(",")
        rows.append([float(c) for c in cells[:-1]] + [cells[-1]])
    return header, rows


def records_to_csv(header: list[str], rows: list[list]) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join([_fmt(c) for c in row[:-1]] + [row[-1]]))
    return "\n".join(lines) + "\n"


def _json_value(x):
    return None if isinstance(x, float) and math.isnan(x) else x


def result_to_json(result: SweepResult) -> str:
    records = []
    for row in result.rows:
        rec = dict(zip(result.axis_names, row.coords))
        rec.update((k, _json_value(v)) for k, v in zip(OBSERVABLES, row.values))
        rec["status"] = row.status
        records.append(rec)
    return json.dumps(records, indent=1) + "\n"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="morqw",
        description="Magneto-optical rotation in a four-level GaAs quantum-well waveguide.",
    )
    parser.add_argument("command", choices=("point", "sweep", "figure"))
    parser.add_argument("name", nargs="?", help="figure name (same as --figure)")
    parser.add_argument("--config", help="key=value or JSON scenario file")
    parser.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override one configuration key (repeatable)")
    parser.add_argument("--figure", help=f"figure preset, one of {', '.join(FIGURES)}")
    parser.add_argument("--out", help="output file (sweep) or directory (figure)")
    parser.add_argument("--format", choices=FORMATS)
    parser.add_argument("--method", choices=METHODS)
    parser.add_argument("--workers", type=int, help="worker processes (default: $MORQW_WORKERS or CPU count)")
    return parser


def load_config(args: argparse.Namespace) -> ScenarioConfig:
    """Config file, then --set overrides, then dedicated flags."""
    if args.config:
        cfg = ScenarioConfig.from_text(Path(args.config).read_text())
    else:
        cfg = ScenarioConfig()
    for item in args.set:
        if "=" not in item:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        key, value = item.split("=", 1)
        cfg.set(key.strip(), value.strip())
    for key in ("figure", "out", "format", "method", "workers"):
        value = getattr(args, key)
        if value is not None:
            cfg.set(key, value)
    if args.name is not None:
        cfg.set("figure", args.name)
    return cfg


def resolve(cfg: ScenarioConfig):
    """(params, axes, alpha_l, method) after merging a figure preset with explicit settings."""
    axes = cfg.axes()
    if cfg.figure is not None:
        preset = figure_preset(cfg.figure)
        _, base, preset_al = next(iter(preset.runs()))
        axes = axes or preset.axes
        alpha_l = preset_al
        method = preset.method
    else:
        base, alpha_l, method = SystemParams.baseline(), 0.0, "numeric"
    for key, value in cfg.params.items():
        base = apply_setting(base, key, value)
    if cfg.alpha_l is not None:
        alpha_l = cfg.alpha_l
    if cfg.method is not None:
        method = cfg.method
    return validate_params(base), axes, alpha_l, method


def _workers(cfg: ScenarioConfig) -> int:
    return cfg.workers if cfg.workers is not None else default_workers()


def cmd_point(cfg: ScenarioConfig) -> int:
    if cfg.axis1 is not None or cfg.axis2 is not None:
        raise ConfigError("point does not take sweep axes")
    p, _, alpha_l, method = resolve(cfg)
    obs = observables(p, alpha_l, method)
    print(json.dumps({k: _json_value(v) for k, v in obs.items()}, indent=1))
    return EXIT_OK


def _render(result: SweepResult, fmt: str) -> str:
    return result_to_json(result) if fmt == "json" else result_to_csv(result)


def cmd_sweep(cfg: ScenarioConfig) -> int:
    p, axes, alpha_l, method = resolve(cfg)
    if not axes:
        raise ConfigError("sweep needs axis1 (and optionally axis2) or a figure preset")
    result = run_sweep(p, axes, alpha_l, method, workers=_workers(cfg))
    text = _render(result, cfg.format or "csv")
    if cfg.out is None:
        sys.stdout.write(text)
    else:
        Path(cfg.out).write_text(text)
    return EXIT_OK


def cmd_figure(cfg: ScenarioConfig) -> int:
    """Write one table per variant / optical depth of the preset into ``out`` (a directory)."""
    if cfg.figure is None:
        raise ConfigError("figure needs a figure name")
    preset = figure_preset(cfg.figure)
    fmt = cfg.format or "csv"
    outdir = Path(cfg.out or ".")
    outdir.mkdir(parents=True, exist_ok=True)
    for stem, base, alpha_l in preset.runs():
        for key, value in cfg.params.items():
            base = apply_setting(base, key, value)
        validate_params(base)
        result = run_sweep(base, preset.axes, alpha_l, cfg.method or preset.method,
                           workers=_workers(cfg))
        path = outdir / f"{stem}.{fmt}"
        path.write_text(_render(result, fmt))
        print(path)
    return EXIT_OK


COMMANDS = {"point": cmd_point, "sweep": cmd_sweep, "figure": cmd_figure}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args)
        return COMMANDS[args.command](cfg)
    except ParameterError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ComputationError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
