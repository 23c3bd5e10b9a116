"""Command-line entry point: ``freshroute <command> [flags]``.

Exit status: 0 on success, 1 when the requested model is infeasible (the
diagnostic table is still written), 2 on usage or input errors.

Every command writes its artifacts plus ``run_meta.json`` (resolved
configuration, seed and SHA-256 of each artifact) into ``--output-dir``.
Files are written to a temporary name and renamed into place.
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import os
import sys
import tempfile
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Sequence

from freshroute import analysis, domain, ingest, models, scenarios
from freshroute.errors import DomainError
from freshroute.kinetics import shelf_life_over_profile, time_weighted_mean

SEED_REQUIRED = ("generate", "scenarios", "sweep")

EXIT_OK, EXIT_INFEASIBLE, EXIT_INPUT = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    instance_path: str | None = None
    model: str = "deterministic"
    seed: int | None = None
    output_dir: str = "."
    overrides: dict[str, Any] = field(default_factory=dict)
    stops: int = 10
    scenario_count: int = 50
    scenario_id: int = 0
    risk_aversion: float = 1.0
    param: str = "beta"
    grid: str = "0:0.5:0.1"
    reps: int = 200
    log_path: str | None = None
    trip_start: str | None = None
    product: str = "apple"


# ------------------------------------------------------------ configuration


def _override_targets():
    return {
        "scenario": {f.name for f in dataclasses.fields(scenarios.ScenarioGenConfig)} - {"seed", "scenario_count"},
        "synthetic": {f.name for f in dataclasses.fields(scenarios.SyntheticConfig)} - {"seed", "product_catalog", "stop_count"},
        "adaptive": {f.name for f in dataclasses.fields(domain.AdaptiveParams)},
    }


def _split_overrides(overrides: dict[str, Any]) -> dict[str, dict[str, float]]:
    targets = _override_targets()
    out: dict[str, dict[str, float]] = {k: {} for k in targets}
    for key, value in overrides.items():
        owners = [name for name, fields in targets.items() if key in fields]
        if not owners:
            raise UsageError(f"unknown override {key!r}")
        for owner in owners:
            out[owner][key] = float(value)
    return out


def parse_grid(text: str) -> list[float]:
    """``start:stop:step`` (inclusive) or a comma-separated list."""
    try:
        if ":" in text:
            start, stop, step = (float(v) for v in text.split(":"))
            if step <= 0:
                raise ValueError
            count = int(round((stop - start) / step)) + 1
            return [round(start + i * step, 12) for i in range(count)]
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"bad grid {text!r}") from None


# ------------------------------------------------------------------- output


class ArtifactWriter:
    def __init__(self, output_dir: str):
        self.root = Path(output_dir)
        self.root.mkdir(parents=True, exist_ok=True)
        self.checksums: dict[str, str] = {}

    def write(self, name: str, text: str) -> None:
        data = text.encode("utf-8")
        fd, tmp = tempfile.mkstemp(dir=self.root, prefix=f".{name}.", suffix=".tmp")
        try:
            with os.fdopen(fd, "wb") as fh:
                fh.write(data)
            os.replace(tmp, self.root / name)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
        if name != "run_meta.json":
            self.checksums[name] = hashlib.sha256(data).hexdigest()

    def json(self, name: str, payload: Any) -> None:
        self.write(name, json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _result_to_dict(result: models.ModelResult) -> dict[str, Any]:
    out = {
        "model": result.kind.value,
        "status": result.status.value,
        "objective": _num(result.objective),
        "planned_hours": _num(result.planned_hours),
        "total_travel_hours": _num(result.total_travel_hours),
        "route": list(result.route.order) if result.route else None,
        "diagnostics": [
            {"name": c.name, "lhs": c.lhs, "bound": c.bound, "slack": c.slack} for c in result.diagnostics
        ],
    }
    if result.trace is not None:
        out["trace"] = {
            "total_cost": result.trace.total_cost,
            "total_deviation": result.trace.total_deviation,
            "total_slack": result.trace.total_slack,
            "hops": [
                {
                    "from": h.from_node,
                    "to": h.to_node,
                    "temperatures": list(h.temperatures),
                    "deviations": list(h.deviations),
                    "slacks": list(h.slacks),
                    "travel_hours": h.travel_hours,
                    "hop_cost": h.hop_cost,
                }
                for h in result.trace.hops
            ],
        }
    return out


def _num(value: float):
    return value if value == value and abs(value) != float("inf") else None


# ----------------------------------------------------------------- commands


def _load_instance(cfg: RunConfig) -> domain.Instance:
    if not cfg.instance_path:
        raise UsageError(f"{cfg.command} needs --instance")
    instance = domain.load_instance(cfg.instance_path)
    adaptive = _split_overrides(cfg.overrides)["adaptive"]
    if adaptive:
        instance = replace(instance, adaptive_params=replace(instance.adaptive_params, **adaptive))
    domain.check_instance(instance)
    return instance


def _scenario_config(cfg: RunConfig, count: int | None = None) -> scenarios.ScenarioGenConfig:
    return scenarios.ScenarioGenConfig(
        **_split_overrides(cfg.overrides)["scenario"],
        scenario_count=count or cfg.scenario_count,
        seed=cfg.seed or 0,
    )


def _scenario_set(cfg: RunConfig, instance: domain.Instance) -> list[domain.Scenario]:
    if instance.scenarios and cfg.seed is None:
        return list(instance.scenarios)
    return scenarios.generate_scenarios(_scenario_config(cfg), instance)


def _cmd_generate(cfg: RunConfig, out: ArtifactWriter) -> int:
    ov = _split_overrides(cfg.overrides)
    syn = scenarios.SyntheticConfig(stop_count=cfg.stops, seed=cfg.seed, **ov["synthetic"])
    base = scenarios.generate_instance(syn)
    base = replace(base, adaptive_params=replace(base.adaptive_params, **ov["adaptive"]))
    batch = scenarios.generate_scenarios(_scenario_config(cfg), base)
    instance = scenarios.attach_uncertainty(base, batch, cfg.risk_aversion)
    out.write("instance.json", domain.dumps_instance(instance))
    return EXIT_OK


def _cmd_scenarios(cfg: RunConfig, out: ArtifactWriter) -> int:
    instance = _load_instance(cfg)
    batch = scenarios.generate_scenarios(_scenario_config(cfg), instance)
    out.json("scenarios.json", {"seed": cfg.seed, "scenarios": [domain.scenario_to_dict(s) for s in batch]})
    return EXIT_OK


def _cmd_solve(cfg: RunConfig, out: ArtifactWriter) -> int:
    instance = _load_instance(cfg)
    kind = models.ModelKind(cfg.model)
    scenario = None
    if kind is models.ModelKind.ADAPTIVE:
        batch = _scenario_set(cfg, instance)
        matches = [s for s in batch if s.id == cfg.scenario_id]
        if not matches:
            raise UsageError(f"no scenario with id {cfg.scenario_id}")
        scenario = matches[0]
    result = models.solve(kind, instance, scenario)
    out.json("solution.json", _result_to_dict(result))
    out.write("diagnostics.csv", analysis.render_csv(
        ["constraint", "lhs", "bound", "slack", "satisfied"],
        ([c.name, c.lhs, c.bound, c.slack, c.satisfied] for c in result.diagnostics),
    ))
    return EXIT_OK if result.feasible else EXIT_INFEASIBLE


def _cmd_compare(cfg: RunConfig, out: ArtifactWriter) -> int:
    instance = _load_instance(cfg)
    batch = _scenario_set(cfg, instance)
    rows = analysis.compare_models(instance, batch)
    out.write("comparison.csv", analysis.comparison_csv(rows))
    det = rows[0]
    if det.status is models.SolveStatus.OPTIMAL:
        comp = analysis.run_scenario_comparison(instance, batch)
        out.write("scenario_outcomes.csv", analysis.scenario_comparison_csv(comp))
        out.json("comparison_summary.json", {k: _num(v) if isinstance(v, float) else v
                                             for k, v in comp.summary().items()})
    return EXIT_OK if det.status is models.SolveStatus.OPTIMAL else EXIT_INFEASIBLE


def _cmd_pareto(cfg: RunConfig, out: ArtifactWriter) -> int:
    instance = _load_instance(cfg)
    outcomes = analysis.adaptive_outcomes(instance, _scenario_set(cfg, instance))
    out.write("scenario_outcomes.csv", analysis.outcomes_csv(outcomes, "adaptive"))
    out.write("pareto.csv", analysis.pareto_csv(analysis.pareto_frontier(outcomes)))
    return EXIT_OK


def _cmd_sweep(cfg: RunConfig, out: ArtifactWriter) -> int:
    if cfg.instance_path:
        instance = _load_instance(cfg)
    else:
        instance = scenarios.generate_instance(scenarios.SyntheticConfig(stop_count=cfg.stops, seed=cfg.seed))
    grid = parse_grid(cfg.grid)
    if cfg.param == "beta":
        result = analysis.sweep_beta(instance, grid, cfg.reps, cfg.seed)
    elif cfg.param == "tau":
        beta = _split_overrides(cfg.overrides)["adaptive"].get("correction_factor", 0.5)
        result = analysis.sweep_tau(instance, grid, cfg.reps, cfg.seed, beta=beta)
    else:
        raise UsageError(f"unknown sweep parameter {cfg.param!r}")
    out.write(f"sweep_{cfg.param}.csv", analysis.sweep_csv(result))
    return EXIT_OK


def _cmd_ingest(cfg: RunConfig, out: ArtifactWriter) -> int:
    if not cfg.log_path:
        raise UsageError("ingest needs --log")
    log = ingest.load_sensor_csv(cfg.log_path)
    start = None
    if cfg.trip_start:
        try:
            start = ingest._parse_timestamp(cfg.trip_start, 0)
        except ValueError as exc:
            raise UsageError(f"bad --trip-start: {exc}") from None
    profile = ingest.log_to_profile(log, start)
    catalog = {p.name: p for p in scenarios.default_catalog()}
    if cfg.instance_path:
        catalog.update({p.name: p for p in _load_instance(cfg).products})
    if cfg.product not in catalog:
        raise UsageError(f"unknown product {cfg.product!r}")
    product = catalog[cfg.product]
    ref = analysis.product_reference(product)
    out.write("profile.csv", analysis.render_csv(
        ["hours", "temperature_c"], zip(profile.times, profile.temperatures)
    ))
    out.json("shelf_life.json", {
        "tag_id": log.tag_id,
        "records": len(log),
        "duration_hours": profile.duration,
        "product": product.name,
        "mean_temperature_c": time_weighted_mean(profile),
        "shelf_life_days": shelf_life_over_profile(ref, product.q10, profile),
    })
    return EXIT_OK


HANDLERS = {
    "generate": _cmd_generate,
    "scenarios": _cmd_scenarios,
    "solve": _cmd_solve,
    "compare": _cmd_compare,
    "pareto": _cmd_pareto,
    "sweep": _cmd_sweep,
    "ingest": _cmd_ingest,
}


def _input_checksums(cfg: RunConfig) -> dict[str, str]:
    paths = [p for p in (cfg.instance_path, cfg.log_path) if p]
    return {p: hashlib.sha256(Path(p).read_bytes()).hexdigest() for p in paths}


def run(cfg: RunConfig) -> int:
    """Execute one command; returns the process exit status."""
    if cfg.command not in HANDLERS:
        print(f"error: unknown command {cfg.command!r}", file=sys.stderr)
        return EXIT_INPUT
    try:
        if cfg.command in SEED_REQUIRED and cfg.seed is None:
            raise UsageError(f"{cfg.command} requires --seed")
        if cfg.instance_path and not Path(cfg.instance_path).exists():
            raise UsageError(f"instance file not found: {cfg.instance_path}")
        out = ArtifactWriter(cfg.output_dir)
        status = HANDLERS[cfg.command](cfg, out)
    except (UsageError, DomainError, ingest.SensorFormatError, ingest.SensorDataError,
            json.JSONDecodeError, KeyError, TypeError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    meta = {
        "config": dataclasses.asdict(cfg),
        "seed": cfg.seed,
        "exit_status": status,
        "artifacts": dict(sorted(out.checksums.items())),
        "inputs": _input_checksums(cfg),
    }
    out.json("run_meta.json", meta)
    return status


# -------------------------------------------------------------------- argv


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="freshroute", description="Perishable routing under uncertainty.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, instance=True):
        if instance:
            p.add_argument("--instance", dest="instance_path")
        p.add_argument("--seed", type=int)
        p.add_argument("--output-dir", "-o")
        p.add_argument("--config", help="JSON file of option values; flags take precedence")
        p.add_argument("--set", dest="overrides", action="append", metavar="KEY=VALUE",
                       help="override a scenario, synthetic or adaptive parameter")

    p = sub.add_parser("generate", help="synthetic instance with scenarios and uncertainty blocks")
    common(p, instance=False)
    p.add_argument("--stops", type=int)
    p.add_argument("--scenarios", dest="scenario_count", type=int)
    p.add_argument("--risk-aversion", type=float)

    p = sub.add_parser("scenarios", help="scenario batch for an instance")
    common(p)
    p.add_argument("--count", dest="scenario_count", type=int)

    p = sub.add_parser("solve", help="solve one model")
    common(p)
    p.add_argument("--model", choices=[k.value for k in models.ModelKind])
    p.add_argument("--scenario-id", type=int)

    p = sub.add_parser("compare", help="all five models plus deterministic vs adaptive replay")
    common(p)
    p.add_argument("--scenarios", dest="scenario_count", type=int)

    p = sub.add_parser("pareto", help="adaptive outcomes and their Pareto frontier")
    common(p)
    p.add_argument("--scenarios", dest="scenario_count", type=int)

    p = sub.add_parser("sweep", help="sensitivity sweep over beta or ambient std")
    common(p)
    p.add_argument("--param", choices=["beta", "tau"])
    p.add_argument("--grid", help="start:stop:step (inclusive) or comma list")
    p.add_argument("--reps", type=int)
    p.add_argument("--stops", type=int)

    p = sub.add_parser("ingest", help="temperature log to profile and shelf life")
    common(p)
    p.add_argument("--log", dest="log_path")
    p.add_argument("--trip-start")
    p.add_argument("--product")
    return parser


def config_from_args(argv: Sequence[str] | None = None) -> RunConfig:
    args = build_parser().parse_args(argv)
    values = vars(args)
    file_values: dict[str, Any] = {}
    if values.get("config"):
        try:
            file_values = json.loads(Path(values["config"]).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read --config: {exc}") from None
    known = {f.name for f in dataclasses.fields(RunConfig)}
    unknown = set(file_values) - known
    if unknown:
        raise UsageError(f"unknown keys in --config: {sorted(unknown)}")
    resolved: dict[str, Any] = {"command": args.command}
    for name in known - {"command", "overrides"}:
        if values.get(name) is not None:
            resolved[name] = values[name]
        elif name in file_values:
            resolved[name] = file_values[name]
    overrides = dict(file_values.get("overrides", {}))
    for item in values.get("overrides") or []:
        key, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"--set expects KEY=VALUE, got {item!r}")
        try:
            overrides[key.strip()] = float(value)
        except ValueError:
            raise UsageError(f"--set {key}: not a number") from None
    resolved["overrides"] = overrides
    return RunConfig(**resolved)


def main(argv: Sequence[str] | None = None) -> int:
    try:
        cfg = config_from_args(argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
