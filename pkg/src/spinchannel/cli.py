"""Command-line front end.

Subcommands: validate, phase-sweep, transport, noise-spectrum, discord.
Exit codes: 0 success, 1 configuration/usage error, 2 model instability
(non-Hurwitz drift), 3 numeric failure. Runs write their CSV products plus
a ``manifest.json`` recording the config digest, seed, command and tool
version; identical inputs and seed reproduce byte-identical CSV bodies.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .config import ConfigError, validate_config
from .dynamics import (
    InstabilityError,
    SpectrumResult,
    default_spectrum_grid,
    joint_row,
    noise_spectrum,
    quadrature_row,
    steady_state_covariance,
)
from .gaussian import (
    gaussian_discord,
    joint_quadrature_variance,
    reduce,
    write_covariance_csv,
)
from .network import build_network, drift_diffusion
from .transport import (
    eit_width,
    phase_sweep,
    transport_spectrum,
    write_phase_sweep_csv,
    write_transport_csv,
)

GRID_DEFAULTS = {"phase-sweep": 361, "transport": 401, "noise-spectrum": 4096}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spinchannel",
        description="Simulate dissipatively coupled optical channels: phase sweeps, "
                    "directional transport, noise spectra and Gaussian discord.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, needs_out in (("validate", False), ("phase-sweep", True), ("transport", True),
                            ("noise-spectrum", True), ("discord", True)):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="TOML run configuration")
        if needs_out:
            p.add_argument("--out", required=True, help="output directory (must be empty unless --force)")
            p.add_argument("--force", action="store_true", help="write into a non-empty directory")
            p.add_argument("--seed", type=int, default=0, help="64-bit unsigned seed recorded in the manifest")
            p.add_argument("--grid-points", type=int, default=None,
                           help=f"grid size (default {GRID_DEFAULTS.get(name, '-')})")
    return parser


def _prepare_out_dir(args) -> Path:
    out = Path(args.out)
    if out.exists():
        if not out.is_dir():
            raise ConfigError([f"{out}: exists and is not a directory"])
        if any(out.iterdir()) and not args.force:
            raise ConfigError([f"{out}: directory not empty (use --force to overwrite)"])
    else:
        out.mkdir(parents=True)
    return out


def _grid_points(args) -> int:
    n = args.grid_points if args.grid_points is not None else GRID_DEFAULTS[args.command]
    if n < 2:
        raise ConfigError([f"--grid-points must be >= 2, got {n}"])
    return n


def _check_seed(seed: int) -> int:
    if not 0 <= seed < 2 ** 64:
        raise ConfigError([f"--seed must be an unsigned 64-bit integer, got {seed}"])
    return seed


def _manifest(args, started: str) -> dict:
    digest = hashlib.sha256(Path(args.config).read_bytes()).hexdigest()
    return {
        "command": args.command,
        "config_sha256": digest,
        "seed": _check_seed(getattr(args, "seed", 0)),
        "version": __version__,
        "started_utc": started,
        "finished_utc": datetime.now(timezone.utc).isoformat(),
    }


def _write_outputs(out_dir: Path, writers, manifest: dict) -> None:
    """Write all products, removing partial output if anything fails."""
    written = []
    try:
        for name, writer in writers:
            written.append(out_dir / name)
            writer(written[-1])
        written.append(out_dir / "manifest.json")
        written[-1].write_text(json.dumps(manifest, indent=2) + "\n", encoding="ascii")
    except Exception:
        for p in written:
            p.unlink(missing_ok=True)
        raise


def _write_lines(lines):
    def writer(path):
        Path(path).write_text("\n".join(lines) + "\n", encoding="ascii")
    return writer


def _spectrum_csv(result: SpectrumResult):
    header = ["omega_rad_s"]
    for name in result.observable_names:
        header += [f"{name}_psd", f"{name}_db"]
    lines = [",".join(header)]
    db = result.db_rel_shot
    for k, w in enumerate(result.frequencies):
        row = [repr(float(w))]
        for j in range(len(result.observable_names)):
            row += [repr(float(result.psd[k, j])), repr(float(db[k, j]))]
        lines.append(",".join(row))
    return _write_lines(lines)


def _cmd_validate(args) -> int:
    cfg = validate_config(args.config)
    print(f"{args.config}: OK ({len(cfg.channels)} channel(s))")
    for line in cfg.summary_lines():
        print(line)
    return 0


def _cmd_phase_sweep(args) -> int:
    started = datetime.now(timezone.utc).isoformat()
    cfg = validate_config(args.config)
    out = _prepare_out_dir(args)
    n = _grid_points(args)
    grid = np.linspace(0.0, 2.0 * np.pi, n)
    result = phase_sweep(cfg.channels, cfg.reservoir, grid)
    _write_outputs(out, [("phase_sweep.csv", lambda p: write_phase_sweep_csv(result, p))],
                   _manifest(args, started))
    print(f"wrote {out / 'phase_sweep.csv'}")
    return 0


def _cmd_transport(args) -> int:
    started = datetime.now(timezone.utc).isoformat()
    cfg = validate_config(args.config)
    out = _prepare_out_dir(args)
    n = _grid_points(args)
    by_id = {c.id: c for c in cfg.channels}
    if 1 not in by_id:
        raise ConfigError(["transport needs channel 1 as the injection node"])
    w = eit_width(by_id[1].control_rabi, cfg.reservoir.optical_decay, cfg.reservoir.spin_decay)
    grid = np.linspace(-5.0 * w, 5.0 * w, n)
    result = transport_spectrum(cfg.channels, cfg.reservoir, grid)
    meta = [f"isolation_db={result.isolation_db!r}", f"floor={result.floor!r}"]
    _write_outputs(out, [
        ("transport.csv", lambda p: write_transport_csv(result, p)),
        ("metadata.txt", _write_lines(meta)),
    ], _manifest(args, started))
    print(f"wrote {out / 'transport.csv'} (isolation {result.isolation_db:.2f} dB)")
    return 0


def _channel_observables(n_modes: int, channel_ids):
    rows, names = [], []
    index = {cid: k for k, cid in enumerate(channel_ids)}
    for cid in channel_ids:
        rows.append(quadrature_row(n_modes, index[cid], "x"))
        names.append(f"x{cid}")
    for a in range(len(channel_ids)):
        for b in range(a + 1, len(channel_ids)):
            i, j = channel_ids[a], channel_ids[b]
            rows.append(joint_row(n_modes, index[i], index[j], -1, "x"))
            names.append(f"xm{i}{j}")
            rows.append(joint_row(n_modes, index[i], index[j], +1, "p"))
            names.append(f"pp{i}{j}")
    return np.array(rows), names


def _cmd_noise_spectrum(args) -> int:
    started = datetime.now(timezone.utc).isoformat()
    cfg = validate_config(args.config)
    out = _prepare_out_dir(args)
    n = _grid_points(args)
    dd = drift_diffusion(build_network(cfg.channels, cfg.reservoir))
    ids = sorted(c.id for c in cfg.channels)
    rows, names = _channel_observables(dd.n_modes, ids)
    grid = default_spectrum_grid(dd, n)
    result = noise_spectrum(dd, rows, grid, names=names)
    _write_outputs(out, [("spectrum.csv", _spectrum_csv(result))], _manifest(args, started))
    print(f"wrote {out / 'spectrum.csv'} ({len(names)} observables)")
    return 0


def _cmd_discord(args) -> int:
    started = datetime.now(timezone.utc).isoformat()
    cfg = validate_config(args.config)
    out = _prepare_out_dir(args)
    dd = drift_diffusion(build_network(cfg.channels, cfg.reservoir))
    sigma = steady_state_covariance(dd)
    ids = sorted(c.id for c in cfg.channels)
    index = {cid: k for k, cid in enumerate(ids)}
    lines = ["pair,discord,joint_var_sum,separable_bound"]
    for a in range(len(ids)):
        for b in range(a + 1, len(ids)):
            i, j = ids[a], ids[b]
            pair_cov = reduce(sigma, [index[i], index[j]])
            disc = gaussian_discord(pair_cov)
            joint = (joint_quadrature_variance(sigma, index[i], index[j], -1, "x")
                     + joint_quadrature_variance(sigma, index[i], index[j], +1, "p"))
            m = sigma.matrix
            xi, pi = 2 * index[i], 2 * index[i] + 1
            xj, pj = 2 * index[j], 2 * index[j] + 1
            bound = float(0.5 * (m[xi, xi] + m[xj, xj]) + 0.5 * (m[pi, pi] + m[pj, pj]))
            lines.append(f"{i}{j},{disc!r},{joint!r},{bound!r}")
    _write_outputs(out, [
        ("discord.csv", _write_lines(lines)),
        ("covariance.csv", lambda p: write_covariance_csv(sigma, p)),
    ], _manifest(args, started))
    print(f"wrote {out / 'discord.csv'}")
    return 0


_COMMANDS = {
    "validate": _cmd_validate,
    "phase-sweep": _cmd_phase_sweep,
    "transport": _cmd_transport,
    "noise-spectrum": _cmd_noise_spectrum,
    "discord": _cmd_discord,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; fold those into the config class.
        return 0 if exc.code in (0, None) else 1
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        for err in exc.errors:
            print(f"config error: {err}", file=sys.stderr)
        return 1
    except InstabilityError as exc:
        print(f"instability: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # numeric failure
        print(f"numeric failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
