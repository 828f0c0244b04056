"""Command-line front end.

    armagraph design  CONFIG
    armagraph compare CONFIG
    armagraph apply   CONFIG GRAPH SIGNAL

``CONFIG`` is a JSON object.  Relative paths inside it are resolved against
the directory holding the config file.
"""

import argparse
import csv
import json
import logging
import sys
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Optional

import numpy as np

from .chebyshev import ArmaChebFilter, ConversionError, freq_response, to_monomial
from .designer import DesignResult, design_modified_error, design_wls, verify_stability
from .graph import apply_filter, read_edge_list, read_signal
from .grid import DesignSpec, to_db

log = logging.getLogger("armagraph")

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NOT_CONVERGED = 2

MONOMIAL_EXPORT_MAX_ORDER = 8


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    spec: DesignSpec
    output_dir: Path
    solver_tol: float = 1e-9
    solver_max_iter: int = 100
    response_points: int = 2001
    stability_refinement: int = 10
    coefficients: Optional[Path] = None

    @classmethod
    def load(cls, path) -> "RunConfig":
        path = Path(path)
        try:
            raw = json.loads(path.read_text())
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {path}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON: {exc}") from None
        if not isinstance(raw, dict):
            raise ConfigError(f"{path}: top level must be an object")

        spec_keys = {f.name for f in fields(DesignSpec)}
        own_keys = {"output_dir", "solver_tol", "solver_max_iter", "response_points",
                    "stability_refinement", "coefficients"}
        unknown = set(raw) - spec_keys - own_keys
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")

        base = path.resolve().parent
        try:
            spec = DesignSpec(**{k: raw[k] for k in spec_keys & set(raw)})
            coeffs = raw.get("coefficients")
            cfg = cls(
                spec=spec,
                output_dir=base / raw.get("output_dir", "out"),
                solver_tol=float(raw.get("solver_tol", 1e-9)),
                solver_max_iter=int(raw.get("solver_max_iter", 100)),
                response_points=int(raw.get("response_points", 2001)),
                stability_refinement=int(raw.get("stability_refinement", 10)),
                coefficients=None if coeffs is None else base / coeffs,
            )
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{path}: {exc}") from None
        if cfg.response_points < 2 or cfg.stability_refinement < 1:
            raise ConfigError("response_points must be >= 2 and stability_refinement >= 1")
        return cfg

    def run_design(self) -> DesignResult:
        return design_wls(self.spec, solver_tol=self.solver_tol, solver_max_iter=self.solver_max_iter)

    def run_baseline(self) -> DesignResult:
        return design_modified_error(
            self.spec, solver_tol=self.solver_tol, solver_max_iter=self.solver_max_iter
        )


def _fmt(x) -> str:
    return format(float(x), ".17g")


def _write_csv(path: Path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _write_json(path: Path, obj):
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def coefficients_dict(filt: ArmaChebFilter) -> dict:
    out = {
        "order_p": filt.order_p,
        "order_q": filt.order_q,
        "epsilon": filt.epsilon,
        "beta": filt.beta.tolist(),
        "alpha": filt.alpha.tolist(),
        "monomial": None,
    }
    if max(filt.order_p, filt.order_q) <= MONOMIAL_EXPORT_MAX_ORDER:
        try:
            mono = to_monomial(filt)
            out["monomial"] = {"b": mono.b.tolist(), "a": mono.a.tolist()}
        except ConversionError:
            pass
    return out


def load_coefficients(path) -> ArmaChebFilter:
    data = json.loads(Path(path).read_text())
    return ArmaChebFilter(data["beta"], data.get("alpha", []), data.get("epsilon", 1e-5))


def write_design_outputs(cfg: RunConfig, result: DesignResult) -> dict:
    out = cfg.output_dir
    out.mkdir(parents=True, exist_ok=True)
    filt = result.filter
    _write_json(out / "coefficients.json", coefficients_dict(filt))

    lam = 2.0 * np.arange(cfg.response_points) / (cfg.response_points - 1)
    h = freq_response(filt, lam)
    _write_csv(
        out / "response.csv",
        ["lambda", "h", "mag_db"],
        [[_fmt(a), _fmt(b), _fmt(c)] for a, b, c in zip(lam, h, to_db(h))],
    )
    _write_csv(
        out / "trace.csv",
        ["k", "J", "step_inf_norm", "eta", "status"],
        [[r.k, _fmt(r.objective), _fmt(r.step), _fmt(r.eta), r.status] for r in result.trace],
    )
    stab = verify_stability(filt, cfg.stability_refinement, cfg.spec.grid_l)
    report = {
        "delta_p_db": result.metrics.delta_p_db,
        "delta_s_db": result.metrics.delta_s_db,
        "sse_db": result.metrics.sse_db,
        "true_objective": result.metrics.true_objective,
        "converged": result.converged,
        "iterations": result.iterations,
        "selected": result.source,
        "stability_margin": stab.margin,
        "stable": stab.stable,
        "spec": asdict(cfg.spec),
    }
    _write_json(out / "report.json", report)
    return report


def cmd_design(args) -> int:
    cfg = RunConfig.load(args.config)
    result = cfg.run_design()
    report = write_design_outputs(cfg, result)
    print(
        f"delta_p={report['delta_p_db']:.6g} dB  delta_s={report['delta_s_db']:.6g} dB  "
        f"SSE={report['sse_db']:.6g} dB  iterations={report['iterations']}  "
        f"converged={report['converged']}"
    )
    return EXIT_OK if result.converged else EXIT_NOT_CONVERGED


def cmd_compare(args) -> int:
    cfg = RunConfig.load(args.config)
    rows = []
    for name, result in (("proposed", cfg.run_design()), ("modified_error", cfg.run_baseline())):
        m = result.metrics
        rows.append([name, _fmt(m.delta_p_db), _fmt(m.delta_s_db), _fmt(m.sse_db), _fmt(m.true_objective)])
    cfg.output_dir.mkdir(parents=True, exist_ok=True)
    _write_csv(cfg.output_dir / "comparison.csv", ["method", "delta_p_db", "delta_s_db", "sse_db", "J"], rows)
    for row in rows:
        print("  ".join(row))
    return EXIT_OK


def cmd_apply(args) -> int:
    cfg = RunConfig.load(args.config)
    coeff_path = cfg.coefficients or cfg.output_dir / "coefficients.json"
    filt = load_coefficients(coeff_path)
    graph = read_edge_list(args.graph)
    signal = read_signal(args.signal)
    if signal.size != graph.n_nodes:
        raise ConfigError(f"signal length {signal.size} does not match {graph.n_nodes} graph nodes")
    y = apply_filter(filt, graph, signal)
    out = Path(args.output) if args.output else cfg.output_dir / "filtered_signal.txt"
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text("".join(_fmt(v) + "\n" for v in y))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="armagraph", description="WLS design of ARMA graph filters")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("design", help="run the iterative WLS design")
    p.add_argument("config")
    p.set_defaults(func=cmd_design)

    p = sub.add_parser("compare", help="compare against the modified-error design")
    p.add_argument("config")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("apply", help="filter a graph signal with stored coefficients")
    p.add_argument("config")
    p.add_argument("graph")
    p.add_argument("signal")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_apply)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    level = [logging.WARNING, logging.INFO, logging.DEBUG][min(args.verbose, 2)]
    logging.basicConfig(level=level, format="%(name)s %(message)s")
    try:
        return args.func(args)
    except Exception as exc:  # every failure maps to exit code 1
        print(f"armagraph: error: {exc}", file=sys.stderr)
        log.debug("traceback", exc_info=True)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
