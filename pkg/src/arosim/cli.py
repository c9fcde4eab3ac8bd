"""Command-line entry point.

    aro-sim <mode> --config <path> [--out <dir>] [--workers N] [--overwrite]

Modes: simulate (trajectory CSV), dressed (branch CSV), scan-area and
scan-grid (yield CSV + metadata sidecar). Every run writes a manifest listing
each output file with its SHA-256 checksum. Exit codes: 0 success, 2 config
error, 3 numerical failure.

Configs are JSON with nested blocks; all physics inputs are the dimensionless
products delta*tau0, omega0*tau0, S0/pi etc., so no unit conventions leak in.
"""
from __future__ import annotations

import argparse
import datetime
import hashlib
import json
import math
import sys
from pathlib import Path

from . import __version__
from .hamiltonian import RwaHamiltonian
from .model import LevelScheme, PulseSpec, StateVector, TimeGrid
from .propagator import PropagationError, default_grid, propagate, recommended_steps_per_tau0
from .spectral import TrackingError, track_branches
from .sweep import AxisSpec, ScanSpec, scan_area, scan_area_delta

MODES = ("simulate", "dressed", "scan-area", "scan-grid")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

DRESSED_POINTS_PER_TAU0 = 400


class ConfigError(ValueError):
    """Invalid run configuration; the message lists every offending key."""


def _require(block: dict, prefix: str, keys: list[str], problems: list[str]) -> None:
    for key in keys:
        if key not in block:
            problems.append(f"missing key: {prefix}{key}")


def _build_scheme(cfg: dict, problems: list[str]) -> LevelScheme | None:
    system = cfg.get("system")
    if not isinstance(system, dict):
        problems.append("missing key: system")
        return None
    kind = system.get("kind")
    if kind not in ("tripod", "ladder"):
        problems.append("system.kind must be 'tripod' or 'ladder'")
        return None
    _require(system, "system.", ["delta_tau0"], problems)
    if kind == "ladder":
        _require(system, "system.", ["n_ground", "n_excited", "delta_prime_tau0"], problems)
    if problems:
        return None
    try:
        if kind == "tripod":
            return LevelScheme.tripod(
                system["delta_tau0"],
                system.get("detuning_tau0", 0.0),
                system.get("coupling_weights"),
            )
        return LevelScheme(
            system["n_ground"],
            system["n_excited"],
            system["delta_tau0"],
            system["delta_prime_tau0"],
            system.get("detuning_tau0", 0.0),
            system.get("coupling_weights"),
        )
    except (ValueError, TypeError) as exc:
        problems.append(f"system: {exc}")
        return None


def _build_pulse(cfg: dict, mode: str, problems: list[str]) -> PulseSpec | None:
    pulse = cfg.get("pulse")
    if not isinstance(pulse, dict):
        problems.append("missing key: pulse")
        return None
    shape = pulse.get("shape", "gaussian")
    tc = pulse.get("tc_over_tau0", 5.0)
    t_start = pulse.get("t_start_over_tau0", 0.0)
    t_end = pulse.get("t_end_over_tau0", 2.0 * tc)

    has_omega = "omega0_tau0" in pulse
    has_area = "s0_over_pi" in pulse
    if mode in ("simulate", "dressed"):
        if has_omega == has_area:
            problems.append(
                "pulse: exactly one of pulse.omega0_tau0 / pulse.s0_over_pi is required "
                f"for mode {mode}"
            )
            return None
        if has_omega:
            omega0 = float(pulse["omega0_tau0"])
        else:
            omega0 = float(pulse["s0_over_pi"]) * math.pi / math.sqrt(2.0 * math.pi)
    else:
        if has_omega or has_area:
            problems.append("pulse: scans set the amplitude per point; omit omega0_tau0/s0_over_pi")
            return None
        omega0 = 0.0
    try:
        return PulseSpec(shape, omega0, 1.0, float(tc), float(t_start), float(t_end))
    except ValueError as exc:
        problems.append(f"pulse: {exc}")
        return None


def _build_scan(cfg: dict, scheme, pulse, mode: str, problems: list[str]) -> ScanSpec | None:
    scan = cfg.get("scan")
    if not isinstance(scan, dict):
        problems.append("missing key: scan")
        return None
    _require(scan, "scan.", ["area_min_pi", "area_max_pi", "area_n", "initial_level", "target_level"], problems)
    if mode == "scan-grid":
        _require(scan, "scan.", ["delta_min_tau0", "delta_max_tau0", "delta_n"], problems)
    if problems or scheme is None or pulse is None:
        return None
    try:
        area_axis = AxisSpec(scan["area_min_pi"], scan["area_max_pi"], scan["area_n"])
        delta_axis = None
        if mode == "scan-grid":
            delta_axis = AxisSpec(scan["delta_min_tau0"], scan["delta_max_tau0"], scan["delta_n"])
        return ScanSpec(
            scheme=scheme,
            pulse=pulse,
            initial_level=int(scan["initial_level"]),
            target_level=int(scan["target_level"]),
            area_axis=area_axis,
            delta_axis=delta_axis,
            methods=tuple(scan.get("methods", ["tdse"])),
            detuning_factor=scan.get("detuning_factor"),
        )
    except (ValueError, TypeError) as exc:
        problems.append(f"scan: {exc}")
        return None


def load_config(path: Path, mode: str) -> dict:
    """Read and validate a config file; raises ConfigError listing every issue."""
    try:
        raw = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from None
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")

    problems: list[str] = []
    cfg_mode = raw.get("mode")
    if cfg_mode is not None and cfg_mode != mode:
        problems.append(f"config mode {cfg_mode!r} does not match requested mode {mode!r}")
    if cfg_mode is not None and cfg_mode not in MODES:
        problems.append(f"mode must be one of {MODES}")

    output = raw.get("output")
    if not isinstance(output, dict):
        problems.append("missing key: output")
    else:
        _require(output, "output.", ["directory", "basename"], problems)

    scheme = _build_scheme(raw, problems)
    pulse = _build_pulse(raw, mode, problems)

    parsed: dict = {"mode": mode, "scheme": scheme, "pulse": pulse, "raw": raw}
    if mode in ("scan-area", "scan-grid"):
        parsed["scan"] = _build_scan(raw, scheme, pulse, mode, problems)
    else:
        level = raw.get("initial_level")
        if level is None:
            problems.append("missing key: initial_level")
        elif scheme is not None and not 0 <= int(level) < scheme.dimension:
            problems.append(
                f"initial_level {level} out of range for dimension {scheme.dimension}"
            )
        else:
            parsed["initial_level"] = int(level)

    numerics = raw.get("numerics", {})
    if not isinstance(numerics, dict):
        problems.append("numerics must be an object")
        numerics = {}
    steps = numerics.get("steps_per_tau0", "auto")
    if steps != "auto" and (not isinstance(steps, int) or steps < 1):
        problems.append("numerics.steps_per_tau0 must be 'auto' or a positive integer")
    stride = numerics.get("output_stride", 10)
    if not isinstance(stride, int) or stride < 1:
        problems.append("numerics.output_stride must be a positive integer")
    parsed["steps_per_tau0"] = None if steps == "auto" else steps
    parsed["stride"] = stride

    if problems:
        raise ConfigError("invalid configuration:\n  " + "\n  ".join(problems))
    return parsed


def _sha256(path: Path) -> str:
    digest = hashlib.sha256()
    digest.update(path.read_bytes())
    return digest.hexdigest()


def _write_manifest(out_dir: Path, basename: str, mode: str, raw_cfg: dict, files: list[Path]) -> Path:
    manifest = {
        "tool_version": __version__,
        "created_utc": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "mode": mode,
        "config": raw_cfg,
        "outputs": [
            {"path": f.name, "bytes": f.stat().st_size, "sha256": _sha256(f)} for f in files
        ],
    }
    path = out_dir / f"{basename}_manifest.json"
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def _planned_outputs(out_dir: Path, basename: str, mode: str) -> list[Path]:
    if mode == "simulate":
        names = [f"{basename}_trajectory.csv"]
    elif mode == "dressed":
        names = [f"{basename}_branches.csv"]
    else:
        names = [f"{basename}_scan.csv", f"{basename}_scan_meta.json"]
    names.append(f"{basename}_manifest.json")
    return [out_dir / n for n in names]


def run(parsed: dict, out_override: str | None, workers: int, overwrite: bool) -> list[Path]:
    """Execute a validated configuration and return the written files."""
    raw = parsed["raw"]
    mode = parsed["mode"]
    out_dir = Path(out_override) if out_override else Path(raw["output"]["directory"])
    basename = raw["output"]["basename"]
    planned = _planned_outputs(out_dir, basename, mode)
    existing = [p for p in planned if p.exists()]
    if existing and not overwrite:
        raise ConfigError(
            "refusing to overwrite existing outputs (pass --overwrite): "
            + ", ".join(str(p) for p in existing)
        )
    out_dir.mkdir(parents=True, exist_ok=True)

    scheme: LevelScheme = parsed["scheme"]
    pulse: PulseSpec = parsed["pulse"]
    written: list[Path] = []

    if mode == "simulate":
        h = RwaHamiltonian(scheme, pulse)
        grid = default_grid(h, parsed["steps_per_tau0"])
        psi0 = StateVector.basis(scheme.dimension, parsed["initial_level"])
        trajectory = propagate(h, psi0, grid, stride=parsed["stride"])
        target = out_dir / f"{basename}_trajectory.csv"
        trajectory.write_csv(target)
        written.append(target)
    elif mode == "dressed":
        h = RwaHamiltonian(scheme, pulse)
        steps = parsed["steps_per_tau0"] or DRESSED_POINTS_PER_TAU0
        grid = TimeGrid.for_pulse(pulse, steps)
        psi0 = StateVector.basis(scheme.dimension, parsed["initial_level"])
        branches = track_branches(h, grid, psi0)
        target = out_dir / f"{basename}_branches.csv"
        branches.write_csv(target)
        written.append(target)
    else:
        spec: ScanSpec = parsed["scan"]
        if mode == "scan-area":
            grid_result = scan_area(spec, workers, parsed["steps_per_tau0"])
        else:
            grid_result = scan_area_delta(spec, workers, parsed["steps_per_tau0"])
        csv_path = out_dir / f"{basename}_scan.csv"
        meta_path = out_dir / f"{basename}_scan_meta.json"
        grid_result.write_csv(csv_path)
        meta = dict(grid_result.metadata)
        meta["config"] = raw
        with open(meta_path, "w") as fh:
            json.dump(meta, fh, indent=2, sort_keys=True)
            fh.write("\n")
        written.extend([csv_path, meta_path])

    written.append(_write_manifest(out_dir, basename, mode, raw, written.copy()))
    return written


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="aro-sim",
        description="Multilevel RWA dynamics: trajectories, dressed branches, area scans.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="mode", required=True)
    for mode, text in (
        ("simulate", "integrate the TDSE and write the population trajectory"),
        ("dressed", "track dressed branches and write their energies"),
        ("scan-area", "scan the final target population versus pulse area"),
        ("scan-grid", "map the final target population over (area, splitting)"),
    ):
        p = sub.add_parser(mode, help=text)
        p.add_argument("--config", required=True, help="JSON run configuration")
        p.add_argument("--out", default=None, help="output directory (overrides config)")
        p.add_argument("--workers", type=int, default=1, help="concurrent propagation workers")
        p.add_argument("--overwrite", action="store_true", help="replace existing outputs")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        parsed = load_config(Path(args.config), args.mode)
        written = run(parsed, args.out, args.workers, args.overwrite)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (PropagationError, TrackingError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    for path in written:
        print(path)
    return EXIT_OK


def entrypoint() -> None:
    raise SystemExit(main())
