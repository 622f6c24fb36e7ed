"""Experiment orchestration: convergence studies, simulations, query tools.

These functions sit between the manifest layer and the solver: they assemble
problem definitions, loop refinement levels or time steps, and serialize the
outputs (CSV tables, FACF1 snapshots, max-norm traces).
"""

from __future__ import annotations

import math
import time as _time
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .analysis import (
    ConvergenceRow,
    MaxPrincipleWindow,
    amplification_factor,
    AmplificationQuery,
    error_norm,
    max_principle_window,
    track_max,
)
from .fieldio import FieldFile, read_field, write_field
from .manifest import ConfigError, RunManifest
from .problems import RandomInitial, manufactured_case, random_initial
from .stepper import Field, SolverConfig, richardson_extrapolate, run

__all__ = [
    "CSV_HEADER",
    "SimulationOutput",
    "run_convergence",
    "convergence_csv",
    "convergence_table",
    "run_simulation",
    "window_result",
    "amplification_result",
]

CSV_HEADER = "dt,hx,hy,hz,cpu_s,err_plain,order_plain,err_extrap,order_extrap"


def run_convergence(manifest: RunManifest) -> list[ConvergenceRow]:
    """Run the manufactured problem over halving refinement levels.

    Each level halves dt and every mesh size together.  Both the plain and
    the extrapolated errors come from one fine plus one coarse (2*dt) run.
    """
    if manifest.kind != "convergence":
        raise ConfigError(f"expected a convergence manifest, got kind '{manifest.kind}'")
    case = manufactured_case(manifest.dims, manifest.eps)
    rows: list[ConvergenceRow] = []
    for level in range(manifest.levels):
        factor = 2 ** level
        sizes = tuple(m * factor for m in manifest.sizes)
        dt = manifest.dt / factor
        config = SolverConfig(
            alpha=manifest.alpha,
            eps=manifest.eps,
            dt=dt,
            t_end=manifest.t_end,
            sizes=sizes,
            spatial_order=manifest.order,
            source=case.source(manifest.alpha),
        )
        started = _time.perf_counter()
        fine, _ = run(config, case.initial_field(sizes))
        coarse_config = SolverConfig(
            alpha=manifest.alpha,
            eps=manifest.eps,
            dt=2.0 * dt,
            t_end=manifest.t_end,
            sizes=sizes,
            spatial_order=manifest.order,
            source=case.source(manifest.alpha),
        )
        coarse, _ = run(coarse_config, case.initial_field(sizes))
        cpu = _time.perf_counter() - started
        exact = case.exact_field(sizes, manifest.t_end)
        err_plain = error_norm(fine, exact)
        err_extrap = error_norm(richardson_extrapolate(fine, coarse), exact)
        row = ConvergenceRow(
            dt=dt,
            meshsizes=tuple(1.0 / m for m in sizes),
            cpu_seconds=cpu,
            error_plain=err_plain,
            error_extrapolated=err_extrap,
        )
        if rows:
            prev = rows[-1]
            row.order_plain = math.log2(prev.error_plain / err_plain)
            row.order_extrapolated = math.log2(prev.error_extrapolated / err_extrap)
        rows.append(row)
    return rows


def _fmt_order(order: Optional[float]) -> str:
    return "" if order is None else f"{order:.3f}"


def convergence_csv(rows: list[ConvergenceRow]) -> str:
    """Canonical CSV with fixed columns; hz is empty for 2D runs."""
    lines = [CSV_HEADER]
    for row in rows:
        hs = list(row.meshsizes) + [None] * (3 - len(row.meshsizes))
        lines.append(
            ",".join(
                [
                    repr(row.dt),
                    *("" if h is None else repr(h) for h in hs),
                    f"{row.cpu_seconds:.3f}",
                    f"{row.error_plain:.6e}",
                    _fmt_order(row.order_plain),
                    f"{row.error_extrapolated:.6e}",
                    _fmt_order(row.order_extrapolated),
                ]
            )
        )
    return "\n".join(lines) + "\n"


def convergence_table(rows: list[ConvergenceRow]) -> str:
    """Human-readable table mirroring the CSV contents."""
    header = (
        f"{'dt':>12} {'h':>24} {'cpu[s]':>8} "
        f"{'err_plain':>12} {'ord1':>6} {'err_extrap':>12} {'ord2':>6}"
    )
    lines = [header, "-" * len(header)]
    for row in rows:
        hs = " ".join(f"1/{round(1.0 / h)}" for h in row.meshsizes)
        ord1 = _fmt_order(row.order_plain) or "-"
        ord2 = _fmt_order(row.order_extrapolated) or "-"
        lines.append(
            f"{row.dt:>12.6g} {hs:>24} {row.cpu_seconds:>8.2f} "
            f"{row.error_plain:>12.3e} {ord1:>6} {row.error_extrapolated:>12.3e} {ord2:>6}"
        )
    return "\n".join(lines) + "\n"


@dataclass
class SimulationOutput:
    """Files written by a simulation plus its monitoring summary."""

    snapshot_paths: list[Path]
    trace_path: Path
    window: MaxPrincipleWindow
    first_violation: Optional[int]
    final_max: float
    summary: str


def run_simulation(manifest: RunManifest, out_dir) -> SimulationOutput:
    """Advance from random or file initial data, writing snapshots and trace.

    Snapshots are written at the steps nearest the requested times (plus the
    initial state and the final time), each carrying its actual time in the
    header.  The max-norm trace goes to ``trace.csv`` and a summary line
    reports the maximum-principle window for the run's parameters.
    """
    if manifest.kind != "simulate":
        raise ConfigError(f"expected a simulate manifest, got kind '{manifest.kind}'")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    config = manifest.solver_config()
    n_steps = config.n_steps()

    if manifest.initial == "random":
        spec = RandomInitial(seed=manifest.seed, scale=manifest.ic_scale, offset=manifest.ic_offset)
        initial = random_initial(spec, config.sizes)
    else:
        loaded = read_field(manifest.initial_file)
        if loaded.sizes != config.sizes:
            raise ConfigError(
                f"initial_file grid {loaded.sizes} does not match config {config.sizes}"
            )
        initial = loaded.field
        initial.time = 0.0

    wanted_steps = {0, n_steps}
    for t in manifest.snapshots:
        step = round(t / config.dt)
        if step > n_steps:
            raise ConfigError(f"snapshot time {t} is beyond t_end")
        wanted_steps.add(step)

    snapshot_paths: list[Path] = []

    def snap(step: int, field: Field) -> None:
        path = out / f"snapshot_step{step:06d}.facf"
        write_field(
            path,
            FieldFile(
                values=field.values,
                time=field.time,
                alpha=config.alpha,
                eps=config.eps,
                meshsizes=config.meshsizes,
            ),
        )
        snapshot_paths.append(path)

    snap(0, initial)

    def on_step(step: int, field: Field) -> None:
        if step in wanted_steps and step != 0:
            snap(step, field)

    final, report = run(config, initial, on_step=on_step)
    if config.extrapolate:
        # snapshots come from the fine run; the final written field is the
        # extrapolated one
        snap_path = out / f"snapshot_step{n_steps:06d}.facf"
        write_field(
            snap_path,
            FieldFile(
                values=final.values,
                time=final.time,
                alpha=config.alpha,
                eps=config.eps,
                meshsizes=config.meshsizes,
            ),
        )

    trace, first_violation = track_max(report)
    trace_path = out / "trace.csv"
    with open(trace_path, "w", encoding="ascii") as fh:
        fh.write("step,time,max_norm\n")
        for n, value in enumerate(trace):
            fh.write(f"{n},{repr(n * config.dt)},{repr(float(value))}\n")

    window = max_principle_window(
        config.alpha, config.eps, config.meshsizes, scheme_order=config.spatial_order
    )
    inside = window.dt_min <= config.dt <= window.dt_max
    summary = (
        f"window=[{window.dt_min:.6g}, {window.dt_max:.6g}] dt={config.dt:.6g} "
        f"inside={str(inside).lower()} first_violation="
        f"{'none' if first_violation is None else first_violation} "
        f"final_max={trace[-1]:.9g}"
    )
    (out / "summary.txt").write_text(summary + "\n", encoding="ascii")
    return SimulationOutput(
        snapshot_paths=snapshot_paths,
        trace_path=trace_path,
        window=window,
        first_violation=first_violation,
        final_max=float(trace[-1]),
        summary=summary,
    )


def window_result(manifest: RunManifest) -> MaxPrincipleWindow:
    if manifest.kind != "window":
        raise ConfigError(f"expected a window manifest, got kind '{manifest.kind}'")
    meshsizes = tuple(1.0 / m for m in manifest.sizes)
    return max_principle_window(
        manifest.alpha,
        manifest.eps,
        meshsizes,
        scheme_order=manifest.order,
        constant_variant=manifest.variant,
    )


def amplification_result(manifest: RunManifest) -> dict:
    """Worst amplification modulus over a phase sweep, per axis and overall.

    Sweeps ``phases`` equispaced angles on [0, 2pi) per axis and, besides the
    symmetric truncation, samples the asymmetric row sums at the first,
    middle and last interior rows.  Because the per-axis factors are
    independent, the overall worst case is the product of per-axis maxima.
    """
    if manifest.kind != "amplification":
        raise ConfigError(f"expected an amplification manifest, got kind '{manifest.kind}'")
    m = manifest.amp_m
    angles = np.linspace(0.0, 2.0 * math.pi, manifest.phases, endpoint=False)
    nodes = (None, 1, max(1, m // 2), m - 1)
    per_axis = []
    for beta in manifest.betas:
        worst = 0.0
        for w in angles:
            for node in nodes:
                query = AmplificationQuery(
                    alpha=manifest.alpha, betas=(beta,), phases=(float(w),), m=(m,)
                )
                worst = max(worst, amplification_factor(query, node_indices=(node,)))
        per_axis.append(worst)
    overall = float(np.prod(per_axis))
    return {"per_axis_max": per_axis, "max_modulus": overall}
