"""Command-line harness: verification suites, benchmark runs, sweeps.

All artifacts are deterministic functions of the configuration (seeds
included): CSV files use ``.`` decimals, ``\\n`` line endings, a header row
and 17-significant-digit floats, so reruns are byte-identical. Config files
are flat JSON with a ``schema_version`` field and round-trip exactly.

Exit codes: 0 success, 1 verification failure, 2 usage/config error,
3 I/O error.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import Schedule, beta_grid
from .filters import (
    FilterKind,
    FilterSpec,
    SignalSpec,
    check_properties,
    decay_blindness,
    density_witness,
    filter_response,
    gen_signal,
)
from .identities import (
    check_prop1,
    mollified_direction,
    prop2_condition,
    square_completion_margin,
    steepest_descent_minimizer,
    trust_radius,
)
from .optim import OptimizerConfig, OptimizerKind
from .quadbench import (
    DEFAULT_LR_GRID,
    BlockSpec,
    Layout,
    build_problem,
    default_quad_config,
    derive_seed,
    initial_point,
    loss_quantiles,
    run_experiment,
    tune_and_compare,
)
from .vi import GaussianBelief, objective_batch, vi_numeric_oracle, vi_objective, vi_update

EXIT_OK = 0
EXIT_CHECK_FAILURE = 1
EXIT_USAGE = 2
EXIT_IO = 3

SCHEMA_VERSION = 1

#: the momentum grid studied throughout: beta1 values plus the kappa-scaled beta2 values
BETA_GRID_PRIMARY = (0.8, 0.9, 0.95, 0.975, 0.9875)
BETA_GRID_FULL = (0.6, 0.8, 0.9, 0.95, 0.975, 0.9875, 0.99375, 0.996875)


class ConfigError(ValueError):
    """Invalid configuration file or flag combination."""


def fmt_float(x) -> str:
    """17-significant-digit decimal text, enough to round-trip a double."""
    if x is None:
        return ""
    return f"{float(x):.17g}"


# ---------------------------------------------------------------------------
# configuration payloads


def _astuple(values, cast):
    return tuple(cast(v) for v in values)


@dataclass(frozen=True)
class QuadConfig:
    schema_version: int = SCHEMA_VERSION
    command: str = "quad"
    layouts: tuple[str, ...] = ("het", "hom")
    optimizers: tuple[str, ...] = ("sgd", "signum", "adameq")
    beta: float = 0.95
    lr_grid: tuple[float, ...] = tuple(DEFAULT_LR_GRID)
    fixed_lr: float | None = None
    seeds: tuple[int, ...] = tuple(range(10))
    steps: int = 1000
    batch_size: int = 3
    warmup_fraction: float = 0.1
    base_seed: int = 0

    @classmethod
    def from_dict(cls, data: dict) -> "QuadConfig":
        kwargs = dict(data)
        kwargs["layouts"] = _astuple(kwargs.get("layouts", cls.layouts), str)
        kwargs["optimizers"] = _astuple(kwargs.get("optimizers", cls.optimizers), str)
        kwargs["lr_grid"] = _astuple(kwargs.get("lr_grid", cls.lr_grid), float)
        kwargs["seeds"] = _astuple(kwargs.get("seeds", cls.seeds), int)
        return cls(**kwargs)


@dataclass(frozen=True)
class SignalConfig:
    schema_version: int = SCHEMA_VERSION
    command: str = "signal"
    filters: tuple[str, ...] = ("sign", "adameq", "signum", "emasign")
    beta: float = 0.95
    amplitude: float = 1.8
    frequency: float = 0.03
    decay: float = 0.0025
    length: int = 2000
    property_trials: int = 25
    property_tol: float = 1e-12
    blindness_tol: float = 0.05
    base_seed: int = 0

    @classmethod
    def from_dict(cls, data: dict) -> "SignalConfig":
        kwargs = dict(data)
        kwargs["filters"] = _astuple(kwargs.get("filters", cls.filters), str)
        return cls(**kwargs)

    def signal_spec(self) -> SignalSpec:
        return SignalSpec(
            amplitude=self.amplitude,
            frequency=self.frequency,
            decay=self.decay,
            length=self.length,
        )


@dataclass(frozen=True)
class SweepConfig:
    schema_version: int = SCHEMA_VERSION
    command: str = "sweep"
    layout: str = "het"
    optimizers: tuple[str, ...] = ("signum", "adameq")
    beta_base: float = 0.9
    kappas: tuple[float, ...] = (0.25, 0.5, 1.0, 2.0)
    equal_betas: bool = False
    lr_grid: tuple[float, ...] = tuple(2.0**i for i in range(-14, 1))
    seeds: tuple[int, ...] = (0, 1, 2)
    steps: int = 500
    batch_size: int = 3
    warmup_fraction: float = 0.1
    base_seed: int = 0

    @classmethod
    def from_dict(cls, data: dict) -> "SweepConfig":
        kwargs = dict(data)
        kwargs["optimizers"] = _astuple(kwargs.get("optimizers", cls.optimizers), str)
        kwargs["kappas"] = _astuple(kwargs.get("kappas", cls.kappas), float)
        kwargs["lr_grid"] = _astuple(kwargs.get("lr_grid", cls.lr_grid), float)
        kwargs["seeds"] = _astuple(kwargs.get("seeds", cls.seeds), int)
        return cls(**kwargs)


_CONFIG_TYPES = {"quad": QuadConfig, "signal": SignalConfig, "sweep": SweepConfig}


def serialize_config(config) -> str:
    return json.dumps(dataclasses.asdict(config), indent=2, sort_keys=True) + "\n"


def parse_config(text: str, command: str):
    data = json.loads(text)
    if not isinstance(data, dict):
        raise ConfigError("config file must contain a JSON object")
    version = data.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ConfigError(f"unsupported schema_version {version!r} (expected {SCHEMA_VERSION})")
    declared = data.get("command", command)
    if declared != command:
        raise ConfigError(f"config file is for command {declared!r}, not {command!r}")
    cls = _CONFIG_TYPES[command]
    try:
        return cls.from_dict(data)
    except TypeError as exc:
        raise ConfigError(f"bad config field: {exc}") from exc


def _load_config(path: str | None, command: str, overrides: dict):
    cls = _CONFIG_TYPES[command]
    if path is None:
        data = dataclasses.asdict(cls())
    else:
        try:
            text = Path(path).read_text()
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {path}") from None
        data = dataclasses.asdict(parse_config(text, command))
    data.update({k: v for k, v in overrides.items() if v is not None})
    return cls.from_dict(data)


# ---------------------------------------------------------------------------
# output helpers


def _write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _jsonable(value):
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


# ---------------------------------------------------------------------------
# verify suites


def _suite_prop1(seed: int) -> list[dict]:
    rng = np.random.default_rng(derive_seed(seed, "verify", "prop1"))
    checks = []
    for beta in BETA_GRID_PRIMARY:
        worst_dir, worst_var = 0.0, 0.0
        for _ in range(10):
            report = check_prop1(rng.standard_normal(1000), beta, tol=1e-9)
            worst_dir = max(worst_dir, report.direction.max_abs_residual)
            worst_var = max(worst_var, report.variance.max_abs_residual)
        checks.append(
            {
                "name": f"direction_forms_beta={beta:g}",
                "max_abs_residual": worst_dir,
                "tolerance": 1e-9,
                "passed": worst_dir <= 1e-9,
            }
        )
        checks.append(
            {
                "name": f"variance_forms_beta={beta:g}",
                "max_abs_residual": worst_var,
                "tolerance": 1e-10,
                "passed": worst_var <= 1e-10,
            }
        )
    return checks


def _suite_equalbeta(seed: int) -> list[dict]:
    checks = []
    for beta in BETA_GRID_FULL:
        value = prop2_condition(beta, beta)
        checks.append(
            {
                "name": f"condition_equal_beta={beta:g}",
                "value": value,
                "tolerance": 0.0,
                "passed": value == 0.0,
            }
        )
    for b1 in BETA_GRID_PRIMARY:
        for b2 in BETA_GRID_FULL:
            if b1 == b2:
                continue
            report = square_completion_margin(b1, b2)
            checks.append(
                {
                    "name": f"completion_margin_b1={b1:g}_b2={b2:g}",
                    "margin": _jsonable(report.margin),
                    "sqrt_defined": report.sqrt_defined,
                    "passed": report.margin > 1e-12,
                }
            )
    return checks


def _suite_trust(seed: int) -> list[dict]:
    rng = np.random.default_rng(derive_seed(seed, "verify", "trust"))
    worst = 0.0
    for _ in range(200):
        m = float(rng.normal(scale=3.0))
        var = float(rng.exponential(scale=2.0))
        radius = trust_radius(m, var)
        argmin = steepest_descent_minimizer(m, radius)
        worst = max(worst, abs(argmin - mollified_direction(m, var)))
    return [
        {
            "name": "trust_region_minimizer_matches_mollified_sign",
            "max_abs_residual": worst,
            "tolerance": 1e-12,
            "passed": worst <= 1e-12,
        }
    ]


def _suite_vi(seed: int) -> list[dict]:
    rng = np.random.default_rng(derive_seed(seed, "verify", "vi"))
    worst_param, worst_gap, worst_beat = 0.0, 0.0, -math.inf
    for _ in range(25):
        prior = GaussianBelief(float(rng.normal(scale=2.0)), float(rng.exponential(scale=1.0)) + 1e-3)
        g = float(rng.normal(scale=2.0))
        lam = float(rng.uniform(0.05, 20.0))
        closed = vi_update(prior, g, lam)
        oracle = vi_numeric_oracle(prior, g, lam)
        worst_param = max(
            worst_param, abs(closed.mean - oracle.mean), abs(closed.variance - oracle.variance)
        )
        obj_closed = vi_objective(prior, closed, g, lam)
        worst_gap = max(worst_gap, obj_closed - vi_objective(prior, oracle, g, lam))
        spread = abs(prior.mean - g) + 1.0
        means = rng.uniform(prior.mean - 3 * spread, prior.mean + 3 * spread, size=2000)
        variances = np.exp(rng.uniform(np.log(1e-4), np.log(1e3), size=2000)) * closed.variance
        worst_beat = max(worst_beat, obj_closed - float(np.min(objective_batch(prior, means, variances, g, lam))))
    return [
        {
            "name": "closed_form_vs_oracle_parameters",
            "max_abs_residual": worst_param,
            "tolerance": 1e-4,
            "passed": worst_param <= 1e-4,
        },
        {
            "name": "closed_form_objective_gap",
            "max_abs_residual": max(worst_gap, 0.0),
            "tolerance": 1e-8,
            "passed": worst_gap <= 1e-8,
        },
        {
            "name": "closed_form_beats_random_candidates",
            "max_abs_residual": max(worst_beat, 0.0),
            "tolerance": 1e-8,
            "passed": worst_beat <= 1e-8,
        },
    ]


def _suite_signal(seed: int) -> list[dict]:
    rng = np.random.default_rng(derive_seed(seed, "verify", "signal"))
    checks = []
    for kind in FilterKind:
        report = check_properties(FilterSpec(kind, beta=0.95), trials=25, tol=1e-12, rng=rng)
        for check in report.checks:
            checks.append(
                {
                    "name": f"{kind.value}_{check.name}",
                    "max_abs_residual": check.max_violation,
                    "tolerance": check.tolerance,
                    "passed": check.passed,
                }
            )
    blind = decay_blindness(0.95, SignalSpec())
    checks.append(
        {
            "name": "decay_blindness_damped_sine",
            "max_abs_residual": blind.max_gap,
            "tolerance": blind.tolerance,
            "passed": blind.passed,
        }
    )
    for target in (1.0, 0.37, -0.8, 0.0):
        witness = density_witness(target, k=10, beta=0.9)
        checks.append(
            {
                "name": f"density_witness_target={target:g}",
                "achieved": witness.achieved,
                "tolerance": 1e-6,
                "passed": witness.found,
            }
        )
    return checks


_SUITES = {
    "prop1": _suite_prop1,
    "equalbeta": _suite_equalbeta,
    "trust": _suite_trust,
    "vi": _suite_vi,
    "signal": _suite_signal,
}


def cmd_verify(args) -> int:
    names = list(_SUITES) if args.suite == "all" else [args.suite]
    suites = {}
    all_passed = True
    for name in names:
        checks = _SUITES[name](args.seed)
        passed = all(c["passed"] for c in checks)
        all_passed = all_passed and passed
        suites[name] = {"passed": passed, "checks": checks}
        for check in checks:
            status = "ok" if check["passed"] else "FAIL"
            print(f"[{name}] {check['name']}: {status}", file=sys.stderr)
    report = {"schema_version": SCHEMA_VERSION, "passed": all_passed, "suites": suites}
    print(json.dumps(report, indent=2, sort_keys=True))
    if args.out is not None:
        out_dir = _ensure_out(args.out)
        _write_json(out_dir / "verify.json", report)
    return EXIT_OK if all_passed else EXIT_CHECK_FAILURE


# ---------------------------------------------------------------------------
# quad


_QUAD_KINDS = {kind.value: kind for kind in OptimizerKind}


def _quad_optimizers(names, beta: float) -> dict[str, OptimizerConfig]:
    out = {}
    for name in names:
        if name not in _QUAD_KINDS:
            raise ConfigError(f"unknown optimizer {name!r}; choose from {sorted(_QUAD_KINDS)}")
        out[name] = default_quad_config(_QUAD_KINDS[name], beta)
    return out


def cmd_quad(args) -> int:
    overrides = {
        "layouts": None if args.layout is None else _layout_names(args.layout),
        "optimizers": tuple(args.optim) if args.optim else None,
        "fixed_lr": args.lr,
        "steps": args.steps,
        "batch_size": args.batch_size,
        "seeds": None if args.seeds is None else tuple(range(args.seeds)),
        "beta": args.beta,
        "base_seed": args.seed,
    }
    cfg = _load_config(args.config, "quad", overrides)
    if not cfg.lr_grid and cfg.fixed_lr is None:
        raise ConfigError("lr grid must be nonempty")
    out_dir = _ensure_out(args.out)

    run_rows = []
    summary_rows = []
    for layout_name in cfg.layouts:
        layout = _parse_layout(layout_name)
        problem = build_problem(
            BlockSpec.for_layout(layout), derive_seed(cfg.base_seed, "problem", layout.value)
        )
        grid = (cfg.fixed_lr,) if cfg.fixed_lr is not None else cfg.lr_grid
        summary = tune_and_compare(
            problem,
            _quad_optimizers(cfg.optimizers, cfg.beta),
            lr_grid=grid,
            seeds=cfg.seeds,
            steps=cfg.steps,
            batch_size=cfg.batch_size,
            warmup_fraction=cfg.warmup_fraction,
        )
        for result in summary.results:
            summary_rows.append(
                [
                    result.label,
                    layout.value,
                    fmt_float(result.best_lr),
                    fmt_float(result.median_final),
                    fmt_float(result.q25),
                    fmt_float(result.q75),
                    "all_diverged" if result.all_diverged else "ok",
                ]
            )
            for record in result.records:
                deltas = record.delta_block_means
                for step in range(record.losses.size):
                    if deltas is None:
                        block_cols = ["", "", ""]
                    else:
                        block_cols = [fmt_float(x) for x in deltas[step]]
                    run_rows.append(
                        [
                            record.config_id,
                            str(record.seed),
                            str(step),
                            fmt_float(record.losses[step]),
                            *block_cols,
                        ]
                    )
    _write_csv(
        out_dir / "runs.csv",
        ["config_id", "seed", "step", "loss", "delta_b1", "delta_b2", "delta_b3"],
        run_rows,
    )
    _write_csv(
        out_dir / "summary.csv",
        ["optimizer", "layout", "best_lr", "median_final", "q25", "q75", "status"],
        summary_rows,
    )
    print(f"wrote {out_dir / 'runs.csv'} and {out_dir / 'summary.csv'}", file=sys.stderr)
    return EXIT_OK


# ---------------------------------------------------------------------------
# signal


_FILTER_KINDS = {kind.value: kind for kind in FilterKind}


def cmd_signal(args) -> int:
    overrides = {
        "filters": tuple(args.filter) if args.filter else None,
        "beta": args.beta,
        "amplitude": args.amplitude,
        "frequency": args.frequency,
        "decay": args.decay,
        "length": args.length,
        "base_seed": args.seed,
    }
    cfg = _load_config(args.config, "signal", overrides)
    for name in cfg.filters:
        if name not in _FILTER_KINDS:
            raise ConfigError(f"unknown filter {name!r}; choose from {sorted(_FILTER_KINDS)}")
    out_dir = _ensure_out(args.out)

    spec = cfg.signal_spec()
    signal = gen_signal(spec)
    rows = []
    reports = {}
    rng = np.random.default_rng(derive_seed(cfg.base_seed, "signal", "properties"))
    for name in cfg.filters:
        filt = FilterSpec(_FILTER_KINDS[name], beta=cfg.beta)
        response = filter_response(filt, signal)
        for k in range(signal.size):
            rows.append([name, fmt_float(cfg.beta), str(k), fmt_float(signal[k]), fmt_float(response[k])])
        reports[name] = check_properties(
            filt, trials=cfg.property_trials, tol=cfg.property_tol, rng=rng
        ).to_dict()
    blind = decay_blindness(cfg.beta, spec, tol=cfg.blindness_tol)
    payload = {
        "schema_version": SCHEMA_VERSION,
        "properties": reports,
        "decay_blindness": blind.to_dict(),
    }
    _write_csv(out_dir / "responses.csv", ["filter", "beta", "k", "input", "response"], rows)
    _write_json(out_dir / "signal_properties.json", payload)
    print(f"wrote {out_dir / 'responses.csv'} and {out_dir / 'signal_properties.json'}", file=sys.stderr)
    return EXIT_OK


# ---------------------------------------------------------------------------
# sweep


def _sweep_cell(payload) -> list[str]:
    """Run one (optimizer, lr, betas) cell over all seeds; returns a CSV row."""
    (problem, name, lr, beta1, beta2, seeds, steps, batch_size, warmup_fraction) = payload
    kind = _QUAD_KINDS[name]
    epsilon = 0.0 if kind in (OptimizerKind.SIGNUM, OptimizerKind.SIGN_SGD) else 1e-8
    config = OptimizerConfig(kind=kind, beta1=beta1, beta2=beta2, epsilon=epsilon, weight_decay=0.0)
    cid = f"{problem.spec.layout.value}:{name}:lr={lr:.17g}:b1={beta1:.17g}:b2={beta2:.17g}"
    sched = Schedule(peak_lr=lr, total_steps=steps, warmup_fraction=warmup_fraction)
    finals = []
    n_diverged = 0
    for seed in seeds:
        record = run_experiment(
            problem,
            config,
            sched,
            steps,
            batch_size,
            initial_point(problem.dim, seed),
            seed,
            config_id=cid,
        )
        finals.append(record.final_loss())
        n_diverged += int(record.diverged)
    if n_diverged == len(seeds):
        status = "all_diverged"
    elif n_diverged:
        status = "partial"
    else:
        status = "ok"
    median, q25, q75 = loss_quantiles(finals)
    return [
        problem.spec.layout.value,
        name,
        fmt_float(lr),
        fmt_float(beta1),
        fmt_float(beta2),
        str(len(seeds)),
        fmt_float(median),
        fmt_float(q25),
        fmt_float(q75),
        str(n_diverged),
        status,
    ]


def _beta_pairs(kind: OptimizerKind, betas, equal_betas: bool):
    if kind is OptimizerKind.ADAM and not equal_betas:
        return [(b1, b2) for b1 in betas for b2 in betas]
    if kind is OptimizerKind.RMSPROP:
        return [(0.0, b2) for b2 in betas]
    return [(b, b) for b in betas]


def cmd_sweep(args) -> int:
    overrides = {
        "layout": args.layout if args.layout != "both" else None,
        "optimizers": tuple(args.optim) if args.optim else None,
        "beta_base": args.beta_base,
        "kappas": tuple(args.kappas) if args.kappas else None,
        "equal_betas": True if args.equal_betas else None,
        "steps": args.steps,
        "batch_size": args.batch_size,
        "seeds": None if args.seeds is None else tuple(range(args.seeds)),
        "base_seed": args.seed,
    }
    cfg = _load_config(args.config, "sweep", overrides)
    if not cfg.lr_grid:
        raise ConfigError("lr grid must be nonempty")
    if not cfg.kappas:
        raise ConfigError("kappa grid must be nonempty")
    for name in cfg.optimizers:
        if name not in _QUAD_KINDS:
            raise ConfigError(f"unknown optimizer {name!r}; choose from {sorted(_QUAD_KINDS)}")
    out_dir = _ensure_out(args.out)

    layout = _parse_layout(cfg.layout)
    problem = build_problem(
        BlockSpec.for_layout(layout), derive_seed(cfg.base_seed, "problem", layout.value)
    )
    betas = beta_grid(cfg.beta_base, cfg.kappas)
    payloads = []
    for name in cfg.optimizers:
        for beta1, beta2 in _beta_pairs(_QUAD_KINDS[name], betas, cfg.equal_betas):
            for lr in cfg.lr_grid:
                payloads.append(
                    (
                        problem,
                        name,
                        float(lr),
                        float(beta1),
                        float(beta2),
                        cfg.seeds,
                        cfg.steps,
                        cfg.batch_size,
                        cfg.warmup_fraction,
                    )
                )
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(_sweep_cell, payloads, chunksize=4))
    else:
        rows = [_sweep_cell(p) for p in payloads]
    _write_csv(
        out_dir / "sweep.csv",
        [
            "layout",
            "optimizer",
            "lr",
            "beta1",
            "beta2",
            "n_seeds",
            "median_final",
            "q25",
            "q75",
            "n_diverged",
            "status",
        ],
        rows,
    )
    print(f"wrote {out_dir / 'sweep.csv'} ({len(rows)} cells)", file=sys.stderr)
    return EXIT_OK


# ---------------------------------------------------------------------------
# plumbing


def _layout_names(value: str) -> tuple[str, ...]:
    return ("het", "hom") if value == "both" else (value,)


def _parse_layout(name: str) -> Layout:
    try:
        return Layout(name)
    except ValueError:
        raise ConfigError(f"unknown layout {name!r}; choose het or hom") from None


def _ensure_out(out: str) -> Path:
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _default_jobs() -> int:
    try:
        return max(1, int(os.environ.get("ADAMLAB_JOBS", "1")))
    except ValueError:
        return 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="adamlab",
        description="verification suites and desk-scale benchmarks for adaptive sign-based optimizers",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", metavar="PATH", help="JSON config file")
        p.add_argument("--out", default="out", metavar="DIR", help="output directory")
        p.add_argument("--seed", type=int, default=None, help="base seed (default 0)")
        p.add_argument(
            "--jobs",
            type=int,
            default=_default_jobs(),
            help="worker processes (default: ADAMLAB_JOBS or 1)",
        )

    p = sub.add_parser("verify", help="run property/identity suites")
    p.add_argument("--suite", default="all", choices=["all", *sorted(_SUITES)])
    p.add_argument("--out", default=None, metavar="DIR")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=_default_jobs())
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("quad", help="tuned optimizer comparison on the block quadratics")
    common(p)
    p.add_argument("--layout", choices=["het", "hom", "both"], default=None)
    p.add_argument("--optim", action="append", metavar="NAME", help="repeatable optimizer name")
    p.add_argument("--lr", type=float, default=None, help="fixed learning rate (skips tuning)")
    p.add_argument("--steps", type=int, default=None)
    p.add_argument("--batch-size", type=int, default=None)
    p.add_argument("--seeds", type=int, default=None, metavar="N", help="number of seeds (0..N-1)")
    p.add_argument("--beta", type=float, default=None)
    p.set_defaults(func=cmd_quad)

    p = sub.add_parser("signal", help="filter responses and operator properties")
    common(p)
    p.add_argument("--filter", action="append", metavar="NAME", help="repeatable filter name")
    p.add_argument("--beta", type=float, default=None)
    p.add_argument("--amplitude", type=float, default=None)
    p.add_argument("--frequency", type=float, default=None)
    p.add_argument("--decay", type=float, default=None)
    p.add_argument("--length", type=int, default=None)
    p.set_defaults(func=cmd_signal)

    p = sub.add_parser("sweep", help="cross-product sweep over (optimizer, lr, momentum)")
    common(p)
    p.add_argument("--layout", choices=["het", "hom"], default=None)
    p.add_argument("--optim", action="append", metavar="NAME")
    p.add_argument("--beta-base", type=float, default=None)
    p.add_argument("--kappas", type=float, nargs="+", default=None)
    p.add_argument("--equal-betas", action="store_true", default=False)
    p.add_argument("--steps", type=int, default=None)
    p.add_argument("--batch-size", type=int, default=None)
    p.add_argument("--seeds", type=int, default=None, metavar="N")
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (json.JSONDecodeError, ValueError) as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
