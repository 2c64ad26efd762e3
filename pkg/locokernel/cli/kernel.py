"""Kernel commands: terrain, obs, encode, stability, reward, fk, config."""

import json
from pathlib import Path
from typing import List, Optional

import numpy as np
import typer
import yaml
from rich.table import Table

from locokernel.cli.common import console, get_config, init_run, kernel_errors, logger, parse_floats
from locokernel.config import list_profiles
from locokernel.control.kinematics import LEG_NAMES, LegGeometry, forward_kinematics_all
from locokernel.encoder.model import HeightmapEncoder
from locokernel.encoder.params import load_params, save_params
from locokernel.errors import ParseError
from locokernel.harness.log import ingest_log
from locokernel.observation.frame import build_frame, read_frame, write_frame
from locokernel.observation.state import RobotState
from locokernel.reward.terms import REWARD_TERMS
from locokernel.stability.margins import (
    StabilityKind,
    capture_point,
    center_of_pressure,
)
from locokernel.stability.polygon import point_polygon_margin, support_polygon
from locokernel.terrain.generator import generate_terrain
from locokernel.terrain.heightfield import read_heightfield, write_heightfield
from locokernel.terrain.spec import TerrainSpec

ProfileOpt = typer.Option("default", "--profile", help="Config profile under configs/kernel")
ConfigOpt = typer.Option(None, "--config", help="Explicit config YAML path")


def register(app: typer.Typer) -> None:
    app.command()(terrain)
    app.command()(obs)
    app.command()(encode)
    app.command()(stability)
    app.command()(reward)
    app.command()(fk)
    config_app = typer.Typer(help="Inspect kernel configuration profiles.")
    config_app.command("show")(config_show)
    config_app.command("list")(config_list)
    app.add_typer(config_app, name="config")


def terrain(
    kind: str = typer.Option(..., "--kind", help="Terrain kind, or two kinds joined by '+'"),
    level: int = typer.Option(0, "--level", help="Difficulty 0-9"),
    seed: int = typer.Option(0, "--seed"),
    out: Path = typer.Option(..., "--out", help="Output HF v1 file"),
    extent: Optional[str] = typer.Option(None, "--extent", help="x,y size in meters"),
    profile: str = ProfileOpt,
    config_path: Optional[Path] = ConfigOpt,
    quiet: bool = typer.Option(False, "--quiet"),
) -> None:
    """Generate a terrain tile and write it as an HF v1 heightfield."""
    init_run(quiet)
    cfg = get_config(profile, config_path)
    size = tuple(parse_floats(extent, 2, "extent")) if extent else cfg.terrain.extent
    with kernel_errors():
        spec = TerrainSpec.from_name(
            kind, level, extent=size, seed=seed, platform_margin=cfg.terrain.platform_margin
        )
        hf = generate_terrain(spec, cfg.terrain)
        write_heightfield(hf, out)
    console.print(
        f"[green]{spec.name}[/green] level {level} seed {seed}: {hf.rows}x{hf.cols} cells, "
        f"{int(hf.void.sum())} void -> {out}"
    )


def _feet_world(text: Optional[str], state: RobotState) -> np.ndarray:
    if text is None:
        return state.foot_positions[:, :2]
    return np.asarray(parse_floats(text, 8, "feet"), dtype=float).reshape(4, 2)


def obs(
    field: Path = typer.Option(..., "--field", help="HF v1 heightfield"),
    pose: str = typer.Option(..., "--pose", help="Base x,y,z,yaw"),
    feet: Optional[str] = typer.Option(
        None, "--feet", help="World xy of FR,FL,RR,RL as 8 numbers; default from the standing pose"
    ),
    command: str = typer.Option("0,0,0", "--command", help="Local command vx,vy,yaw_rate"),
    out: Path = typer.Option(..., "--out", help="Output frame JSON"),
    profile: str = ProfileOpt,
    config_path: Optional[Path] = ConfigOpt,
) -> None:
    """Build one observation frame at a given base pose."""
    init_run()
    cfg = get_config(profile, config_path)
    x, y, z, yaw = parse_floats(pose, 4, "pose")
    with kernel_errors():
        hf = read_heightfield(field)
        standing = RobotState.standing(x, y, yaw=yaw)
        feet_xy = _feet_world(feet, standing)
        foot_positions = np.column_stack([feet_xy, standing.foot_positions[:, 2]])
        state = standing.replace(base_position=np.array([x, y, z]), foot_positions=foot_positions)
        frame = build_frame(
            hf, state, parse_floats(command, 3, "command"), np.zeros(12), config=cfg.observation
        )
        write_frame(frame, out)
    console.print(f"Frame written to {out} (heightmap centre {frame.heightmap.values[8, 5]:.3f} m)")


def encode(
    frame_path: Path = typer.Option(..., "--frame", help="Frame JSON from 'obs'"),
    params: Optional[Path] = typer.Option(None, "--params", help="LKEP parameter file"),
    seed: int = typer.Option(0, "--seed", help="Seed for random parameters when --params is absent"),
    save: Optional[Path] = typer.Option(None, "--save-params", help="Write the parameters used"),
    dump_attention: bool = typer.Option(False, "--dump-attention", help="Print per-head attention peaks"),
    out: Optional[Path] = typer.Option(None, "--out", help="Write z and attention maps as JSON"),
    profile: str = ProfileOpt,
    config_path: Optional[Path] = ConfigOpt,
) -> None:
    """Encode a frame into the 64-dim exteroceptive latent."""
    init_run()
    cfg = get_config(profile, config_path)
    with kernel_errors():
        frame = read_frame(frame_path)
        encoder = load_params(params, cfg.encoder) if params else HeightmapEncoder.from_seed(seed, cfg.encoder)
        if save:
            save_params(encoder, save)
        result = encoder.encode(frame)

    console.print("z_t = [" + ", ".join(f"{v:.5f}" for v in result.z) + "]")
    if dump_attention:
        table = Table(title="Attention peaks")
        table.add_column("head")
        table.add_column("cell (row, col)")
        table.add_column("weight", justify="right")
        for h, amap in enumerate(result.attention):
            r, c = np.unravel_index(int(np.argmax(amap)), amap.shape)
            table.add_row(str(h), f"({r}, {c})", f"{float(amap[r, c]):.4f}")
        console.print(table)
    if out:
        payload = {"z": result.z.tolist(), "attention": result.attention.tolist()}
        out.write_text(json.dumps(payload, indent=2))


def _read_contacts(path: Path) -> np.ndarray:
    rows = []
    for line_no, line in enumerate(path.read_text().splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            values = [float(v) for v in line.replace(",", " ").split()]
        except ValueError as e:
            raise ParseError(f"bad contact row: {e}", line_no) from e
        if len(values) != 6:
            raise ParseError("contact rows need x y z fx fy fz", line_no)
        rows.append(values)
    return np.asarray(rows, dtype=float).reshape(-1, 6)


def stability(
    contacts: Path = typer.Option(..., "--contacts", help="Rows of 'x y z fx fy fz'"),
    point: Optional[str] = typer.Option(None, "--point", help="CoM x,y (com and cp kinds)"),
    kind: str = typer.Option("cop", "--kind", help="cop | com | cp"),
    velocity: str = typer.Option("0,0", "--velocity", help="World planar base velocity (cp)"),
    height: float = typer.Option(0.35, "--height", help="Pendulum height above the contacts (cp)"),
) -> None:
    """Print the signed stability margin for a set of contacts."""
    init_run(quiet=True)
    with kernel_errors():
        k = StabilityKind.parse(kind)
        rows = _read_contacts(contacts)
        polygon = support_polygon(rows[:, :2])
        if k is StabilityKind.COP:
            ref = center_of_pressure(rows[:, :3], rows[:, 3:])
        else:
            if point is None:
                raise typer.BadParameter("--point is required for com and cp")
            ref = np.asarray(parse_floats(point, 2, "point"))
            if k is StabilityKind.CAPTURE_POINT:
                ground = float(rows[:, 2].mean()) if len(rows) else 0.0
                state = RobotState(
                    base_position=np.array([ref[0], ref[1], ground + height]),
                    base_lin_vel=np.array([*parse_floats(velocity, 2, "velocity"), 0.0]),
                )
                ref = capture_point(state, ground_height=ground)
        if polygon.is_degenerate or ref is None:
            console.print("margin undefined (degenerate support polygon or no CoP)")
            raise typer.Exit(0)
        margin = point_polygon_margin(ref, polygon)
    console.print(f"point {ref[0]:.6f} {ref[1]:.6f}")
    console.print(f"margin {margin:.9f}")


def reward(
    log_path: Path = typer.Option(..., "--log", help="Trajectory log (JSONL)"),
    breakdown: bool = typer.Option(False, "--breakdown", help="Per-term means"),
    profile: str = ProfileOpt,
    config_path: Optional[Path] = ConfigOpt,
) -> None:
    """Summarise the rewards recorded in a trajectory log."""
    init_run(quiet=True)
    cfg = get_config(profile, config_path)
    with kernel_errors():
        log = ingest_log(log_path)
    rewards = [s.reward for s in log.steps if s.reward]
    if not rewards:
        logger.warning(f"{log_path} has no reward records")
        raise typer.Exit(1)
    totals = np.array([r["total"] for r in rewards])
    console.print(f"{len(rewards)} steps, mean total reward {totals.mean():.6f}")
    if breakdown:
        weights = cfg.reward.weights.model_dump()
        table = Table(title="Reward breakdown (means)")
        table.add_column("term")
        table.add_column("value", justify="right")
        table.add_column("weight", justify="right")
        table.add_column("weighted", justify="right")
        for name in REWARD_TERMS:
            mean = float(np.mean([r.get(name, 0.0) for r in rewards]))
            table.add_row(name, f"{mean:.6g}", f"{weights[name]:g}", f"{mean * weights[name]:.6g}")
        console.print(table)


def fk(
    q: str = typer.Option(..., "--q", help="12 joint angles, FR FL RR RL x (abduction, hip, knee)"),
    profile: str = ProfileOpt,
    config_path: Optional[Path] = ConfigOpt,
) -> None:
    """Print the four foot positions in the base frame."""
    init_run(quiet=True)
    cfg = get_config(profile, config_path)
    with kernel_errors():
        feet = forward_kinematics_all(parse_floats(q, 12, "q"), LegGeometry.from_config(cfg.control.leg))
    table = Table(title="Foot positions (base frame, m)")
    for col in ("leg", "x", "y", "z"):
        table.add_column(col, justify="right" if col != "leg" else "left")
    for name, p in zip(LEG_NAMES, feet):
        table.add_row(name, f"{p[0]:.6f}", f"{p[1]:.6f}", f"{p[2]:.6f}")
    console.print(table)


def config_show(profile: str = ProfileOpt, config_path: Optional[Path] = ConfigOpt) -> None:
    """Print the effective configuration as YAML."""
    cfg = get_config(profile, config_path)
    console.print(yaml.safe_dump(json.loads(cfg.model_dump_json()), sort_keys=False), markup=False)


def config_list() -> None:
    """List available configuration profiles."""
    profiles: List[str] = list_profiles()
    if not profiles:
        console.print("no profiles found; built-in defaults apply")
    for name in profiles:
        console.print(name)
