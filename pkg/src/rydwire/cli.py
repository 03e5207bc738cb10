"""Batch front-end: declarative experiment configs and pipeline orchestration.

``rydwire run --config experiment.json`` executes the full pipeline (build
graph, layout, sweep, sample, post-select) and writes a reproducible artifact
bundle; the other subcommands expose the individual stages for debugging.
Identical (config, seed) runs produce byte-identical files.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import graphs, layout as layout_mod, spectrum, evolution, measure
from .hamiltonian import (
    all_ground_state,
    physical_coupling,
    save_state,
    uniform_coupling,
)
from .layout import (
    C6_DEFAULT,
    TWO_PI,
    interaction_strength,
    k4_family_layout,
    table1_layout,
)

CONFIG_SCHEMA_VERSION = 1
OUT_ROOT_ENV = "RYDWIRE_OUT"


class ConfigError(ValueError):
    pass


def _default_out() -> Path:
    return Path(os.environ.get(OUT_ROOT_ENV, "."))


def _write(path: Path, text: str, quiet: bool) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    if not quiet:
        print(f"wrote {path}")


def _dump_json(doc) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def _build_layout(config: dict, wg: graphs.WiredGraph) -> layout_mod.Layout:
    spec = config.get("layout", {"source": "table1"})
    source = spec.get("source", "table1")
    if source == "table1":
        return table1_layout(wg.base.name)
    if source == "k4_family":
        if wg.base.name != "tetrahedron":
            raise ConfigError("k4_family layout applies to the tetrahedron only")
        return k4_family_layout(spec.get("d_um", 8.0), spec["d_ratio"])
    if source == "file":
        text = Path(spec["path"]).read_text(encoding="utf-8")
        return layout_mod.layout_from_json(text, wg)
    raise ConfigError(f"unknown layout source {source!r}")


def _build_schedule(config: dict, graph_name: str) -> evolution.SweepSchedule:
    spec = config.get("schedule", "default")
    if spec == "default":
        return evolution.default_schedule(graph_name)
    return evolution.SweepSchedule(
        t1=spec["t1_us"], t2=spec["t2_us"], tf=spec["tf_us"],
        omega0=TWO_PI * spec["omega0_mhz"],
        delta_i=TWO_PI * spec["delta_i_mhz"],
        delta_f=TWO_PI * spec["delta_f_mhz"],
    )


def _build_noise(config: dict) -> evolution.NoiseModel:
    spec = config.get("noise")
    if not spec:
        return evolution.NOISELESS
    return evolution.NoiseModel(
        dephasing_rate=TWO_PI * spec.get("dephasing_rate_mhz", 0.0),
        per_atom=spec.get("per_atom", False),
        detect_p01=spec.get("p01", 0.0),
        detect_p10=spec.get("p10", 0.0),
    )


def load_config(path: Path) -> dict:
    config = json.loads(path.read_text(encoding="utf-8"))
    version = config.get("schema_version")
    if version != CONFIG_SCHEMA_VERSION:
        raise ConfigError(f"unsupported schema_version {version!r}")
    if "seed" not in config:
        raise ConfigError("config must set an explicit seed")
    return config


def run_experiment(config: dict, out_dir: Path, quiet: bool = False) -> dict:
    """Execute the build -> evolve -> sample -> post-select -> report pipeline."""
    seed = int(config["seed"])
    if "graph_file" in config:
        wg = graphs.graph_from_json(Path(config["graph_file"]).read_text(encoding="utf-8"))
        if not isinstance(wg, graphs.WiredGraph):
            raise ConfigError("graph_file must describe a wired graph")
    else:
        wg = graphs.wire_platonic(config["graph"])
    lay = _build_layout(config, wg)
    c6 = config.get("c6", C6_DEFAULT)
    d_um = config.get("d_um", layout_mod.D_SPACING_UM)
    u_nearest = interaction_strength(d_um, c6)

    mode = config.get("coupling", "uniform")
    if mode == "uniform":
        coupling = uniform_coupling(wg, u_nearest)
    elif mode == "physical":
        coupling = physical_coupling(lay, c6)
    else:
        raise ConfigError(f"unknown coupling mode {mode!r}")

    schedule = _build_schedule(config, wg.base.name)
    noise = _build_noise(config)
    dt_us = config.get("dt_ns", 1.0) * 1e-3
    evolver = config.get("evolver", "auto")
    if evolver == "auto":
        if noise.dephasing_rate == 0.0:
            evolver = "pure"
        elif wg.num_atoms <= evolution.MAX_DENSITY_ATOMS:
            evolver = "density"
        else:
            evolver = "trajectories"

    initial = all_ground_state(wg.num_atoms)
    if evolver == "pure":
        if noise.dephasing_rate != 0.0:
            raise ConfigError("pure evolver cannot apply dephasing; use density/trajectories")
        final = evolution.evolve_pure(initial, schedule, coupling, dt_us=dt_us)
    elif evolver == "density":
        final = evolution.evolve_density(initial, schedule, noise, coupling, dt_us=dt_us)
    elif evolver == "trajectories":
        ensemble = evolution.evolve_trajectories(
            initial, schedule, noise, coupling,
            n_traj=config.get("n_traj", 2000), seed=seed, dt_us=dt_us,
        )
        final = np.diag(evolution.trajectory_populations(ensemble)).astype(np.complex128)
    else:
        raise ConfigError(f"unknown evolver {evolver!r}")

    m_shots = int(config["shots"])
    shots = measure.sample_shots(final, m_shots, seed)
    if noise.detect_p01 > 0.0 or noise.detect_p10 > 0.0:
        shots = measure.apply_detection_errors(
            shots, noise.detect_p01, noise.detect_p10, seed + 1
        )
    raw = measure.distribution_from_shots(shots)
    post = measure.postselect_af(shots, wg)
    mis_p, mis_err = measure.mis_probability(post, wg.base)

    out_dir.mkdir(parents=True, exist_ok=True)
    _write(out_dir / "layout.csv", lay.to_csv(), quiet)
    _write(out_dir / "schedule.json", schedule.to_json(), quiet)
    _write(out_dir / "raw_distribution.json", raw.to_json(), quiet)
    _write(out_dir / "postselected_distribution.json", post.to_json(), quiet)
    report = {
        "graph": wg.base.name,
        "n_atoms": wg.num_atoms,
        "mis_probability": mis_p,
        "mis_probability_stderr": mis_err,
        "kept_events": post.total_count,
        "kept_fraction": post.kept_fraction,
        "total_shots": m_shots,
        "parameters": {
            "c6": c6,
            "u_mhz": u_nearest / TWO_PI,
            "omega0_mhz": schedule.omega0 / TWO_PI,
            "delta_f_mhz": schedule.delta_f / TWO_PI,
            "dephasing_mhz": noise.dephasing_rate / TWO_PI,
            "per_atom_dephasing": noise.per_atom,
            "detect_p01": noise.detect_p01,
            "detect_p10": noise.detect_p10,
            "dt_ns": dt_us * 1e3,
            "coupling": mode,
            "evolver": evolver,
            "seed": seed,
        },
        "config": config,
    }
    _write(out_dir / "report.json", _dump_json(report), quiet)
    return report


def phase_report(graph_name: str, out_dir: Path, u: float = 1.0, quiet: bool = False) -> None:
    g = graphs.platonic_graph(graph_name)
    regions = spectrum.phase_diagram(g, u)
    _write(out_dir / f"phases_{graph_name}.json", spectrum.phase_diagram_json(regions), quiet)
    _write(out_dir / f"phases_{graph_name}.csv", spectrum.phase_diagram_csv(regions), quiet)


def _read_points_csv(path: Path) -> list[graphs.ScalingRecord]:
    records = []
    for line in path.read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if not line or line.startswith("label"):
            continue
        label, n, n_prime = line.split(",")
        records.append(graphs.ScalingRecord(int(n), int(n_prime), label))
    return records


def scaling_report(
    points: list[graphs.ScalingRecord], out_dir: Path, quiet: bool = False
) -> dict:
    if len(points) < 2:
        raise ValueError("scaling fit needs at least 2 points")
    ns = np.array([p.n for p in points], dtype=float)
    nps = np.array([p.n_prime for p in points], dtype=float)
    if np.all(ns == ns[0]):
        raise ValueError("scaling fit needs at least 2 distinct N values")
    slope, intercept = np.polyfit(ns, nps, 1)
    csv = "label,n,n_prime\n" + "".join(f"{p.label},{p.n},{p.n_prime}\n" for p in points)
    _write(out_dir / "scaling.csv", csv, quiet)
    fit = {"slope": float(slope), "intercept": float(intercept), "points": len(points)}
    _write(out_dir / "scaling_fit.json", _dump_json(fit), quiet)
    return fit


def _cmd_graph(args) -> None:
    obj = graphs.wire_platonic(args.name) if args.wired else graphs.platonic_graph(args.name)
    suffix = "_wired" if args.wired else ""
    _write(args.out / f"graph_{args.name}{suffix}.json", graphs.graph_to_json(obj), args.quiet)


def _cmd_layout(args) -> None:
    if args.d_ratio is not None:
        lay = k4_family_layout(args.d, args.d_ratio)
        stem = f"layout_k4_family_{args.d_ratio:g}"
    else:
        lay = table1_layout(args.name)
        stem = f"layout_{args.name}"
    _write(args.out / f"{stem}.csv", lay.to_csv(), args.quiet)
    _write(args.out / f"{stem}.json", lay.to_json(), args.quiet)


def _cmd_phases(args) -> None:
    phase_report(args.name, args.out, u=args.u, quiet=args.quiet)


def _cmd_evolve(args) -> None:
    wg = graphs.wire_platonic(args.name)
    schedule = evolution.default_schedule(args.name)
    if args.coupling == "physical":
        coupling = physical_coupling(table1_layout(args.name), C6_DEFAULT)
    else:
        u = interaction_strength(layout_mod.D_SPACING_UM, C6_DEFAULT)
        coupling = uniform_coupling(wg, u)
    final = evolution.evolve_pure(
        all_ground_state(wg.num_atoms), schedule, coupling, dt_us=args.dt_ns * 1e-3
    )
    args.out.mkdir(parents=True, exist_ok=True)
    save_state(args.out / f"state_{args.name}.bin", final)
    _write(args.out / "schedule.json", schedule.to_json(), args.quiet)
    if not args.quiet:
        probs = np.abs(final) ** 2
        top = np.argsort(probs)[::-1][:8]
        print(f"wrote {args.out / f'state_{args.name}.bin'}")
        for v in top:
            print(f"  |{int(v) + 1}> p={probs[v]:.4f}")


def _cmd_run(args) -> None:
    config = load_config(args.config)
    if args.seed is not None:
        config["seed"] = args.seed
    out_dir = args.out / config.get("out_subdir", "run")
    report = run_experiment(config, out_dir, quiet=args.quiet)
    if not args.quiet:
        print(
            f"MIS probability {report['mis_probability']:.4f}"
            f" +/- {report['mis_probability_stderr']:.4f}"
            f" ({report['kept_events']} kept / {report['total_shots']} shots)"
        )


def _cmd_scaling(args) -> None:
    if args.points is not None:
        points = _read_points_csv(args.points)
    else:
        points = [
            p for p in graphs.builtin_scaling_points()
            if args.include_reported or not p.label.endswith("(reported)")
        ]
    fit = scaling_report(points, args.out, quiet=args.quiet)
    if not args.quiet:
        print(f"N' = {fit['slope']:.3f} N + {fit['intercept']:.3f}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rydwire",
        description="Platonic-graph Rydberg quantum-wire simulation toolkit",
    )
    parser.add_argument("--out", type=Path, default=None, help="output directory")
    parser.add_argument("--quiet", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("graph", help="emit a graph JSON document")
    p.add_argument("name", choices=graphs.PLATONIC_NAMES)
    p.add_argument("--wired", action="store_true")
    p.set_defaults(func=_cmd_graph)

    p = sub.add_parser("layout", help="emit layout CSV/JSON")
    p.add_argument("name", choices=graphs.PLATONIC_NAMES)
    p.add_argument("--d-ratio", dest="d_ratio", type=float, default=None,
                   help="tetrahedron-family wire-edge ratio d'/d")
    p.add_argument("--d", type=float, default=8.0)
    p.set_defaults(func=_cmd_layout)

    p = sub.add_parser("phases", help="emit the classical phase diagram")
    p.add_argument("name", choices=graphs.PLATONIC_NAMES)
    p.add_argument("--u", type=float, default=1.0)
    p.set_defaults(func=_cmd_phases)

    p = sub.add_parser("evolve", help="run the default sweep, checkpoint the state")
    p.add_argument("name", choices=graphs.PLATONIC_NAMES)
    p.add_argument("--coupling", choices=("uniform", "physical"), default="uniform")
    p.add_argument("--dt-ns", dest="dt_ns", type=float, default=1.0)
    p.set_defaults(func=_cmd_evolve)

    p = sub.add_parser("run", help="full pipeline from a config file")
    p.add_argument("--config", type=Path, required=True)
    p.add_argument("--seed", type=int, default=None, help="override the config seed")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("scaling", help="N vs N' scaling report")
    p.add_argument("--points", type=Path, default=None, help="CSV of label,n,n_prime")
    p.add_argument("--include-reported", action="store_true",
                   help="add the published octahedron N'=22 point")
    p.set_defaults(func=_cmd_scaling)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.out is None:
        args.out = _default_out()
    try:
        args.func(args)
    except Exception as exc:  # propagate any module error as a machine-readable record
        record = {"error": type(exc).__name__, "message": str(exc)}
        print(json.dumps(record, sort_keys=True), file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
