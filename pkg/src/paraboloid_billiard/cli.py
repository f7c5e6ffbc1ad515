"""Command-line front end.

Subcommands::

    simulate   bounce a particle and write one row per impact
    circle     launch a circle orbit and report its closure
    envelope   sample the confined-domain envelopes and limiting curves
    verify     run the invariant suites; exit 2 on any failure

Settings come from an optional flat ``key = value`` file (``--config``)
overridden by flags. Exit codes: 0 ok, 1 config error, 2 verification
failure, 3 simulation terminated abnormally.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import circle, domains, verification
from .dynamics import ParticleState, conserved, random_interior_states, simulate
from .exceptions import EmptyInterval, OutOfRange
from .geometry import MirrorConfig, mirror_height

EXIT_OK, EXIT_CONFIG, EXIT_VERIFY, EXIT_TERMINATED = 0, 1, 2, 3

TRAJECTORY_HEADER = "bounce_index,t_impact,x,y,z,vx,vy,vz,focus_x,focus_y,focus_z,H,l_z,R"
ENVELOPE_HEADER = "label,r,z"

# key -> parser for values read from the config file
_KEYS = {
    "f_m": float,
    "g": float,
    "n_bounces": int,
    "h": float,
    "r_sphere": float,
    "l_z": str,
    "theta": float,
    "r0": float,
    "seed": int,
    "out": str,
    "format": str,
    "state": str,
    "r_max": float,
    "n_r": int,
    "n_states": int,
    "n_oracle": int,
    "inject_fault": str,
    "clip": lambda v: _parse_bool(v),
}


def _parse_bool(text: str) -> bool:
    value = str(text).strip().lower()
    if value in ("1", "true", "yes", "on"):
        return True
    if value in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


class ConfigError(Exception):
    pass


def _fmt(x: float) -> str:
    return f"{float(x):.17g}"


def parse_config_file(path) -> dict:
    """Read ``key = value`` lines; ``#`` starts a comment."""
    cfg = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.replace("-", "_").lower()
        if key not in _KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            cfg[key] = _KEYS[key](value)
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: bad value for {key}: {exc}") from None
    return cfg


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key = value settings file")
    common.add_argument("--f-m", type=float, dest="f_m", help="mirror focal length (default 1)")
    common.add_argument("--g", type=float, help="gravitational acceleration (default 1)")
    common.add_argument("--n-bounces", type=int, dest="n_bounces")
    common.add_argument("--h", type=float, help="directrix height H")
    common.add_argument("--r-sphere", type=float, dest="r_sphere", help="foci-sphere radius R")
    common.add_argument("--l-z", dest="l_z", help="reduced angular momentum, or 'max' for sqrt(J_max)")
    common.add_argument("--theta", type=float, help="circle-orbit step angle")
    common.add_argument("--r0", type=float, help="circle-orbit radius")
    common.add_argument("--seed", type=int)
    common.add_argument("--state", help="initial state 'x,y,z,vx,vy,vz'")
    common.add_argument("--out", help="output file (default stdout)")
    common.add_argument("--format", choices=("csv", "json"))

    parser = argparse.ArgumentParser(prog="paraboloid-billiard", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="mode", required=True)
    sub.add_parser("simulate", parents=[common], help="bounce a particle")
    sub.add_parser("circle", parents=[common], help="circle orbit with step angle theta")
    env = sub.add_parser("envelope", parents=[common], help="confined-domain envelopes")
    env.add_argument("--r-max", type=float, dest="r_max")
    env.add_argument("--n-r", type=int, dest="n_r")
    env.add_argument("--no-clip", dest="clip", action="store_const", const=False,
                     help="keep curve points below the mirror wall")
    ver = sub.add_parser("verify", parents=[common], help="run invariant suites")
    ver.add_argument("--n-states", type=int, dest="n_states")
    ver.add_argument("--n-oracle", type=int, dest="n_oracle")
    ver.add_argument("--inject-fault", dest="inject_fault", choices=("reflection-sign",),
                     help="deliberately corrupt the reflection law")
    return parser


_DEFAULTS = {
    "f_m": 1.0, "g": 1.0, "seed": 0, "format": "csv",
    "simulate": {"n_bounces": 100},
    "circle": {"n_bounces": 12, "r0": 2.0},
    "envelope": {"n_r": 301, "clip": True},
    "verify": {"n_bounces": 2000, "n_states": 5, "n_oracle": 10},
}


def resolve_config(args: argparse.Namespace) -> dict:
    cfg = {k: v for k, v in _DEFAULTS.items() if not isinstance(v, dict)}
    cfg.update(_DEFAULTS.get(args.mode, {}))
    if args.config:
        cfg.update(parse_config_file(args.config))
    for key in _KEYS:
        value = getattr(args, key, None)
        if value is not None:
            cfg[key] = value
    cfg["mode"] = args.mode
    try:
        cfg["mirror"] = MirrorConfig(cfg["f_m"], cfg["g"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    if cfg.get("n_bounces", 0) < 0:
        raise ConfigError("n_bounces must be >= 0")
    if cfg["format"] not in ("csv", "json"):
        raise ConfigError(f"unknown format {cfg['format']!r}")
    if "state" in cfg:
        cfg["state"] = _parse_state(cfg["state"])
    return cfg


def _parse_state(text: str) -> ParticleState:
    try:
        values = [float(v) for v in text.replace(" ", "").split(",")]
    except ValueError:
        raise ConfigError(f"bad state {text!r}") from None
    if len(values) != 6:
        raise ConfigError("state needs six comma-separated numbers x,y,z,vx,vy,vz")
    return ParticleState(values[:3], values[3:])


def _write_atomic(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    target = Path(path)
    fd, tmp = tempfile.mkstemp(dir=target.parent or ".", prefix=f".{target.name}.")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


def _report(cfg, lines) -> None:
    stream = sys.stdout if cfg.get("out") else sys.stderr
    for line in lines:
        print(line, file=stream)


def trajectory_rows(traj, m: MirrorConfig):
    """Per-impact rows: impact point, pre-impact velocity, focus of the arriving
    arc and ``(H, l_z, R)`` of the pre-impact state."""
    times = traj.absolute_impact_times
    foci = traj.incoming_foci()
    end_states = (ParticleState(p, v) for p, v in zip(traj.end_pos, traj.end_vel))
    for i, s in enumerate(end_states):
        c = conserved(s, m)
        yield [i + 1, times[i], *s.pos, *s.vel, *foci[i], c.H, c.l_z, c.R]


def _format_trajectory(traj, m, fmt, summary) -> str:
    rows = list(trajectory_rows(traj, m))
    if fmt == "json":
        keys = TRAJECTORY_HEADER.split(",")
        doc = {
            "rows": [dict(zip(keys, [r[0]] + [float(v) for v in r[1:]])) for r in rows],
            "summary": summary,
        }
        return json.dumps(doc, indent=1) + "\n"
    lines = [TRAJECTORY_HEADER]
    lines += [",".join([str(r[0])] + [_fmt(v) for v in r[1:]]) for r in rows]
    return "\n".join(lines) + "\n"


def _initial_state(cfg) -> ParticleState:
    if "state" in cfg:
        s = cfg["state"]
        if not s.is_inside(cfg["mirror"]):
            raise ConfigError("initial state lies outside the mirror")
        return s
    rng = np.random.default_rng(cfg["seed"])
    return random_interior_states(rng, 1, cfg["mirror"])[0]


def _run_and_emit(cfg, s0, extra_summary=None):
    m = cfg["mirror"]
    traj = simulate(s0, cfg["n_bounces"], m)
    drift = verification.max_relative_drift(traj, s0, m)
    summary = {
        "n_segments": len(traj),
        "terminated": traj.termination,
        "max_drift_H": drift["H"],
        "max_drift_l_z": drift["l_z"],
        "max_drift_R": drift["R"],
    }
    summary.update(extra_summary(traj) if extra_summary else {})
    _write_atomic(cfg.get("out"), _format_trajectory(traj, m, cfg["format"], summary))
    _report(cfg, [f"{k}: {v}" for k, v in summary.items()])
    return EXIT_OK if traj.completed else EXIT_TERMINATED


def cmd_simulate(cfg) -> int:
    return _run_and_emit(cfg, _initial_state(cfg))


def cmd_circle(cfg) -> int:
    if "theta" not in cfg:
        raise ConfigError("circle mode needs theta")
    m = cfg["mirror"]
    try:
        spec = circle.CircleOrbitSpec(cfg["r0"], cfg["theta"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    kind = circle.classify_orbit(spec.theta)

    def extra(traj):
        radii = np.hypot(traj.end_pos[:, 0], traj.end_pos[:, 1])
        info = {
            "classification": f"Periodic({kind.q})" if isinstance(kind, circle.Periodic) else "NonPeriodic",
            "max_radius_deviation": float(np.abs(radii - spec.r0).max(initial=0.0) / spec.r0),
        }
        if isinstance(kind, circle.Periodic):
            err = verification.closure_error(traj, kind.q)
            info["closure_error"] = err
            info["period_closure"] = bool(err < 1e-9)
        return info

    return _run_and_emit(cfg, circle.initial_state(spec, m), extra)


def _domain_spec(cfg) -> domains.DomainSpec:
    m = cfg["mirror"]
    missing = [k for k in ("h", "r_sphere") if k not in cfg]
    if missing:
        raise ConfigError(f"envelope mode needs {', '.join(missing)}")
    H, R = cfg["h"], cfg["r_sphere"]
    lz = str(cfg.get("l_z", "0")).strip().lower()
    if lz == "max":
        probe = domains.DomainSpec(H, R, 0.0, m)
        l_z = math.sqrt(domains.J_max(probe))
    else:
        try:
            l_z = float(lz)
        except ValueError:
            raise ConfigError(f"bad l_z {lz!r}") from None
    return domains.DomainSpec(H, R, l_z, m)


def envelope_rows(spec: domains.DomainSpec, r_grid, clip: bool = True) -> list[tuple[str, float, float]]:
    """Numerical envelopes followed by whichever limiting curves apply.

    With ``clip`` only points on or above the mirror wall are kept.
    """
    rows = []
    for curve in domains.envelope(spec, r_grid):
        rows += [(curve.label, r, z) for r, z in zip(curve.r, curve.z)]
    jm = domains.J_max(spec)
    l2 = spec.l_z ** 2
    if spec.l_z == 0 or (spec.R > 0 and l2 <= domains.SMALL_LZ_FRACTION * jm):
        cp, cm = domains.limit_c_pm(r_grid, spec)
        rows += [("c_plus", r, z) for r, z in zip(r_grid, cp) if np.isfinite(z)]
        rows += [("c_minus", r, z) for r, z in zip(r_grid, cm) if np.isfinite(z)]
    if spec.l_z != 0 and spec.R > 0 and l2 <= domains.SMALL_LZ_FRACTION * jm:
        rows += [("c0", r, z) for r, z in zip(r_grid, domains.limit_c0(r_grid, spec))]
    if spec.R > 0 and spec.saturated:
        r_lo = spec.R * math.sin(domains.theta_max(spec))
        rr = r_grid[r_grid >= r_lo]
        rows += [("d", r, z) for r, z in zip(rr, np.atleast_1d(domains.limit_d(rr, spec)))]
    elif spec.R > 0 and l2 >= domains.LARGE_LZ_FRACTION * jm:
        tm = domains.theta_max(spec)
        rows += [("c_tilde", r, z) for r, z in zip(r_grid, domains.limit_c_tilde(r_grid, tm, spec))]
    if clip:
        m = spec.mirror
        rows = [row for row in rows if row[2] >= mirror_height(row[1], m) - m.tol_boundary]
    return rows


def cmd_envelope(cfg) -> int:
    spec = _domain_spec(cfg)
    m = cfg["mirror"]
    r_max = cfg.get("r_max", 3.0 * max(spec.H, spec.R, m.f_M))
    n_r = cfg["n_r"]
    if n_r < 2 or not r_max > 0:
        raise ConfigError("need n_r >= 2 and r_max > 0")
    r_grid = np.linspace(0.0, r_max, n_r)
    rows = envelope_rows(spec, r_grid, cfg["clip"])
    accessible = domains.max_lz_accessible(spec) if spec.R > 0 else True
    if cfg["format"] == "json":
        doc = {
            "H": spec.H, "R": spec.R, "l_z": spec.l_z, "J_max": domains.J_max(spec),
            "max_lz_accessible": accessible,
            "curves": [{"label": lab, "r": float(r), "z": float(z)} for lab, r, z in rows],
        }
        text = json.dumps(doc, indent=1) + "\n"
    else:
        text = "\n".join([ENVELOPE_HEADER] + [f"{lab},{_fmt(r)},{_fmt(z)}" for lab, r, z in rows]) + "\n"
    _write_atomic(cfg.get("out"), text)
    _report(cfg, [f"J_max: {domains.J_max(spec)}", f"max_lz_accessible: {accessible}"])
    return EXIT_OK


def _sign_flipped_reflection(p, v, m):
    # corrupt law for mutation checks: normal with the wrong horizontal sign
    grad = np.array([p[0] / (2.0 * m.f_M), p[1] / (2.0 * m.f_M), 1.0])
    return v - 2.0 * (v @ grad) / (grad @ grad) * grad


def cmd_verify(cfg) -> int:
    m = cfg["mirror"]
    if "state" in cfg:
        states = [cfg["state"]]
    else:
        rng = np.random.default_rng(cfg["seed"])
        states = random_interior_states(rng, cfg["n_states"], m)
    reflection = _sign_flipped_reflection if cfg.get("inject_fault") == "reflection-sign" else None
    results = verification.run_all(states, cfg["n_bounces"], m, n_oracle=cfg["n_oracle"],
                                   reflection=reflection)
    lines = [res.line() for res in results]
    ok = all(res.passed for res in results)
    lines.append("verify: " + ("all suites passed" if ok else "FAILED"))
    text = "\n".join(lines) + "\n"
    if cfg.get("out"):
        _write_atomic(cfg["out"], text)
    sys.stdout.write(text)
    return EXIT_OK if ok else EXIT_VERIFY


_COMMANDS = {"simulate": cmd_simulate, "circle": cmd_circle, "envelope": cmd_envelope,
             "verify": cmd_verify}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args)
        return _COMMANDS[args.mode](cfg)
    except EmptyInterval as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ConfigError, OutOfRange, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    raise SystemExit(main())
