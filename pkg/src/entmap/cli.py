"""Command-line front end.

Exit codes: 0 success, 1 usage or configuration error, 2 inconsistent data
(shot provenance mismatch, oracle disagreement).
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .analytic import analytic_map, exact_region_bound, pair_projector_value
from .estimator import ProvenanceError, WitnessEstimate, WitnessMap, build_map, estimate_pair_projector, region_flags
from .lattice import REGION_KINDS, LatticeGraph, build_lattice, enumerate_regions, minimal_patch
from .noise import CHANNELS, NoiseScenario, build_scenario
from .oracle import MAX_QUBITS, export_golden, prepare, region_values
from .render import render_map, write_ppm
from .sampler import GRAPH_SETTINGS, PAIR_SETTINGS, SETTINGS, read_shots, sample, sample_pairs, write_shots
from .scan import parse_grid, threshold_scan, write_scan_csv

ENGINES = ("sampled", "analytic-exact", "analytic-paper", "oracle")
ORACLE_TOL = 1e-9


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    lattice: dict
    noise: dict = field(default_factory=dict)
    settings: tuple[str, ...] = ()
    n_shots: int = 10_000
    seed: int = 0
    regions: tuple[str, ...] = REGION_KINDS
    engine: str = "sampled"
    out: str = "out"

    @classmethod
    def from_json(cls, doc: dict) -> "RunConfig":
        if "lattice" not in doc:
            raise ConfigError("config needs a 'lattice' section")
        known = {"lattice", "noise", "settings", "n_shots", "seed", "regions", "engine", "out", "notes"}
        unknown = set(doc) - known
        if unknown:
            raise ConfigError(f"unknown config keys {sorted(unknown)}")
        cfg = cls(
            lattice=dict(doc["lattice"]),
            noise=dict(doc.get("noise", {})),
            settings=tuple(doc.get("settings", ())),
            n_shots=int(doc.get("n_shots", 10_000)),
            seed=int(doc.get("seed", 0)),
            regions=tuple(doc.get("regions", REGION_KINDS)),
            engine=doc.get("engine", "sampled"),
            out=doc.get("out", "out"),
        )
        cfg.validate()
        return cfg

    def validate(self) -> None:
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        if self.n_shots < 1:
            raise ConfigError("n_shots must be positive")
        if self.engine not in ENGINES:
            raise ConfigError(f"unknown engine {self.engine!r}; choose from {ENGINES}")
        for r in self.regions:
            if r not in REGION_KINDS:
                raise ConfigError(f"unknown region kind {r!r}")
        for s in self.settings:
            if s not in SETTINGS:
                raise ConfigError(f"unknown setting {s!r}")

    def build(self) -> tuple[LatticeGraph, NoiseScenario]:
        lat = self.lattice
        try:
            graph = build_lattice(lat["kind"], int(lat["n_u"]), int(lat["n_v"]), lat.get("holes", []))
            scenario = build_scenario(graph, self.noise)
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"invalid lattice/noise config: {exc}") from exc
        if self.engine == "oracle" and graph.n_sites > MAX_QUBITS:
            raise ConfigError(f"oracle engine needs at most {MAX_QUBITS} sites, lattice has {graph.n_sites}")
        return graph, scenario

    def setting_list(self, graph: LatticeGraph):
        if self.settings:
            chosen = [SETTINGS[s] for s in self.settings]
        else:
            chosen = list(PAIR_SETTINGS if graph.kind == "pairs" else GRAPH_SETTINGS)
        allowed = PAIR_SETTINGS if graph.kind == "pairs" else GRAPH_SETTINGS
        for s in chosen:
            if s not in allowed:
                raise ConfigError(f"setting {s.label} does not apply to a {graph.kind} lattice")
        return chosen


def load_config(path) -> RunConfig:
    try:
        doc = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    return RunConfig.from_json(doc)


def fig2_config_path() -> Path:
    return Path(str(resources.files("entmap") / "data" / "fig2.json"))


def _apply_overrides(cfg: RunConfig, args) -> RunConfig:
    if getattr(args, "seed", None) is not None:
        cfg.seed = args.seed
    if getattr(args, "shots", None) is not None:
        cfg.n_shots = args.shots
    if getattr(args, "engine", None) is not None:
        cfg.engine = args.engine
    if getattr(args, "regions", None) is not None:
        cfg.regions = tuple(r.strip() for r in args.regions.split(",") if r.strip())
    if getattr(args, "out", None) is not None:
        cfg.out = args.out
    cfg.validate()
    return cfg


def _sample_batches(graph, scenario, cfg: RunConfig):
    sampler = sample_pairs if graph.kind == "pairs" else sample
    return [sampler(graph, scenario, s, cfg.n_shots, cfg.seed) for s in cfg.setting_list(graph)]


# -- subcommands ----------------------------------------------------------------

def cmd_generate(args) -> int:
    cfg = _apply_overrides(load_config(args.config), args)
    graph, scenario = cfg.build()
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    for batch in _sample_batches(graph, scenario, cfg):
        path = out / f"shots_{batch.setting.label}.bin"
        write_shots(path, batch)
        print(path)
    return 0


def _pair_rows(graph, batches=None, scenario=None, gate_mode="derived"):
    by_label = {b.setting.label: b for b in batches or []}
    rows = []
    for a, b in graph.edges:
        if batches is not None:
            value, stderr = estimate_pair_projector(by_label.get("PAIR_XX"), by_label.get("PAIR_YZ"),
                                                    by_label.get("PAIR_ZY"), (a, b))
        else:
            value, stderr = pair_projector_value(graph, scenario, a, b, gate_mode), 0.0
        rows.append({"pair": [a.to_json(), b.to_json()], "value": value, "stderr": stderr})
    return rows


def _write_pairs(out: Path, engine: str, graph, rows) -> None:
    doc = {"source": engine, "region_kind": "pair", "lattice": graph.descriptor(), "entries": rows}
    (out / f"pairs_{engine}.json").write_text(json.dumps(doc, sort_keys=True, indent=1) + "\n")
    with open(out / f"pairs_{engine}.csv", "w") as fh:
        fh.write("cs_u,cs_v,value,stderr\n")
        for r in rows:
            fh.write(f"{r['pair'][0][0]},{r['pair'][0][1]},{r['value']!r},{r['stderr']!r}\n")


def _oracle_map(graph, scenario, regions) -> WitnessMap:
    patch = prepare(graph, scenario)
    entries = []
    for r in regions:
        p_a, p_b, _ = region_values(patch, graph, r)
        entries.append(WitnessEstimate.from_parts(r, p_a, p_b, 0.0, 0, 0, *region_flags(graph, r)))
    return WitnessMap.collect("oracle", entries, graph)


def cmd_map(args) -> int:
    out = Path(args.out or "out")
    if args.inputs:
        engine = args.engine or "sampled"
        if engine != "sampled":
            raise ConfigError("shot-file input only supports the sampled engine")
        batches = [read_shots(p) for p in args.inputs]
        graph = batches[0].graph
        kinds = [r.strip() for r in (args.regions or ",".join(REGION_KINDS)).split(",") if r.strip()]
        cfg = None
    else:
        if not args.config:
            raise ConfigError("map needs --config or --inputs")
        cfg = _apply_overrides(load_config(args.config), args)
        out = Path(cfg.out)
        engine = cfg.engine
        graph, scenario = cfg.build()
        kinds = list(cfg.regions)
        batches = _sample_batches(graph, scenario, cfg) if engine == "sampled" else None
    out.mkdir(parents=True, exist_ok=True)

    if graph.kind == "pairs":
        if engine == "sampled":
            if len(batches) != 3:
                raise ConfigError("the pair protocol needs exactly three shot files")
            rows = _pair_rows(graph, batches)
        elif engine in ("analytic-exact", "analytic-paper"):
            rows = _pair_rows(graph, scenario=scenario)
        else:
            raise ConfigError(f"engine {engine} is not available for pairs lattices")
        _write_pairs(out, engine, graph, rows)
        print(out / f"pairs_{engine}.json")
        return 0

    if engine == "sampled":
        by_label = {b.setting.label: b for b in batches}
        if set(by_label) != {"S_A", "S_B"} or len(batches) != 2:
            raise ConfigError("graph-state maps need exactly one S_A and one S_B shot file")
    for kind in kinds:
        regions = enumerate_regions(graph, kind)
        if not regions:
            continue
        if engine == "sampled":
            wmap = build_map(by_label["S_A"], by_label["S_B"], regions)
        elif engine == "oracle":
            wmap = _oracle_map(graph, scenario, regions)
        else:
            wmap = analytic_map(graph, scenario, regions, mode=engine.split("-")[1])
        stem = out / f"map_{kind}_{engine}"
        wmap.write_json(stem.with_suffix(".json"))
        wmap.write_csv(stem.with_suffix(".csv"))
        print(stem.with_suffix(".json"))
    return 0


def cmd_render(args) -> int:
    wmap = WitnessMap.read_json(args.map)
    write_ppm(args.out, render_map(wmap, clamp=args.clamp))
    print(args.out)
    return 0


def cmd_scan(args) -> int:
    grid = parse_grid(args.grid)
    kinds = [r.strip() for r in args.regions.split(",") if r.strip()]
    if args.channel not in CHANNELS:
        raise ConfigError(f"unknown channel {args.channel!r}")
    results = [threshold_scan(k, args.channel, grid, n_shots=args.shots or 0, seed=args.seed or 0,
                              gate_mode=args.gate_mode) for k in kinds]
    write_scan_csv(args.out, results)
    for res in results:
        print(f"{res.kind}: crossing {args.channel} = {res.crossing}")
    return 0


def cmd_oracle_check(args) -> int:
    cfg = load_config(args.config) if args.config else RunConfig.from_json(json.loads(fig2_config_path().read_text()))
    cfg.engine = "sampled"
    if args.regions:
        cfg.regions = tuple(r.strip() for r in args.regions.split(","))
    graph, scenario = cfg.build()
    records, worst = [], 0.0
    for kind in cfg.regions:
        for region in enumerate_regions(graph, kind)[: args.limit]:
            patch = minimal_patch(graph, region)
            exact = exact_region_bound(graph, scenario, region)
            p_a, p_b, w = region_values(prepare(patch, scenario), graph, region)
            diff = max(abs(exact.p_a - p_a), abs(exact.p_b - p_b), abs(exact.w - w))
            worst = max(worst, diff)
            records.append({
                "patch": [s.to_json() for s in patch.sites],
                "scenario": scenario.digest(),
                "region": region.to_json(),
                "value": {"p_a": p_a, "p_b": p_b, "w": w},
            })
            print(f"{kind} {[str(s) for s in region.sites]}: |exact - oracle| = {diff:.3e}")
    if args.golden:
        export_golden(records, args.golden)
    print(f"max deviation {worst:.3e} (tolerance {ORACLE_TOL:g})")
    return 0 if worst <= ORACLE_TOL else 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="entmap", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, engine=True, config_required=False):
        p.add_argument("--config", required=config_required, help="run configuration JSON")
        p.add_argument("--seed", type=int)
        p.add_argument("--shots", type=int)
        if engine:
            p.add_argument("--engine", choices=ENGINES)
        p.add_argument("--regions", help="comma-separated region kinds")
        p.add_argument("--out")

    p = sub.add_parser("generate", help="sample shot files")
    common(p, engine=False, config_required=True)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("map", help="witness maps (JSON + CSV)")
    common(p)
    p.add_argument("--inputs", nargs="+", help="shot files instead of --config")
    p.set_defaults(func=cmd_map)

    p = sub.add_parser("render", help="PPM heatmap of a map file")
    p.add_argument("--map", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--clamp", type=float, default=0.5)
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("scan", help="threshold scan under one uniform channel")
    p.add_argument("--regions", default=",".join(REGION_KINDS))
    p.add_argument("--channel", default="gate_error")
    p.add_argument("--grid", default="0:0.8:81")
    p.add_argument("--shots", type=int, default=0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--gate-mode", choices=("derived", "paper"), default="derived")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("oracle-check", help="analytic engine vs dense oracle on minimal patches")
    p.add_argument("--config", help="defaults to the bundled demo scenario")
    p.add_argument("--regions")
    p.add_argument("--limit", type=int, default=2, help="regions per kind")
    p.add_argument("--golden", help="write oracle values as a golden JSON file")
    p.set_defaults(func=cmd_oracle_check)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ProvenanceError as exc:
        print(f"entmap: data inconsistency: {exc}", file=sys.stderr)
        return 2
    except (ConfigError, ValueError, OSError) as exc:
        print(f"entmap: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
