"""Optimizer direction maps viewed as causal operators on gradient signals.

There is no loss or training here: a fixed scalar signal is streamed through
a direction map (epsilon 0, zero init, no bias correction by default) and the
output sequence is studied. The interesting operator properties:

1. causality - the output up to step k only depends on the input up to k;
2. invariance to positive rescaling of the whole signal;
3. oddness - negating the input negates the output;
4. bounded sup norm (|d_k| <= 1);
5. density - any value in [-1, 1] is attainable at any step.

The filter wraps the real optimizer step functions, so there is a single
source of truth for the direction math.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .core import InitMode
from .optim import OptimizerConfig, OptimizerKind, direction, init_state


@dataclass(frozen=True)
class SignalSpec:
    """Damped sinusoid ``amplitude * sin(frequency*k) * exp(-decay*k)``."""

    amplitude: float = 1.8
    frequency: float = 0.03
    decay: float = 0.0025
    length: int = 2000

    def __post_init__(self) -> None:
        if self.length < 1:
            raise ValueError("length must be at least 1")
        if self.decay < 0:
            raise ValueError("decay must be nonnegative")


def gen_signal(spec: SignalSpec) -> np.ndarray:
    k = np.arange(spec.length)
    return spec.amplitude * np.sin(spec.frequency * k) * np.exp(-spec.decay * k)


class FilterKind(enum.Enum):
    SIGN = "sign"
    ADAM_EQUAL_BETA = "adameq"
    SIGNUM = "signum"
    EMA_SIGN = "emasign"


_OPTIM_KIND = {
    FilterKind.SIGN: OptimizerKind.SIGN_SGD,
    FilterKind.ADAM_EQUAL_BETA: OptimizerKind.ADAM_EQUAL_BETA,
    FilterKind.SIGNUM: OptimizerKind.SIGNUM,
    FilterKind.EMA_SIGN: OptimizerKind.EMA_SIGN,
}


@dataclass(frozen=True)
class FilterSpec:
    """Which direction map to stream through, and with what momentum."""

    kind: FilterKind
    beta: float = 0.95
    init_mode: InitMode = InitMode.ZERO

    def optimizer_config(self) -> OptimizerConfig:
        return OptimizerConfig(
            kind=_OPTIM_KIND[self.kind],
            beta1=self.beta,
            beta2=self.beta,
            epsilon=0.0,
            bias_correction=False,
            init_mode=self.init_mode,
        )


def filter_response(filt: FilterSpec, signal) -> np.ndarray:
    """Stream ``signal`` through the direction map, one scalar per step."""
    signal = np.asarray(signal, dtype=float).ravel()
    if not np.all(np.isfinite(signal)):
        raise ValueError("signal contains non-finite entries")
    config = filt.optimizer_config()
    state = init_state(config, ())
    out = np.empty(signal.size)
    for k in range(signal.size):
        d, state = direction(config, state, signal[k])
        out[k] = float(d)
    return out


@dataclass(frozen=True)
class PropertyCheck:
    name: str
    max_violation: float
    tolerance: float
    passed: bool

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "max_violation": self.max_violation,
            "tolerance": self.tolerance,
            "passed": self.passed,
        }


@dataclass(frozen=True)
class PropertyReport:
    label: str
    trials: int
    checks: tuple[PropertyCheck, ...]

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def check(self, name: str) -> PropertyCheck:
        for check in self.checks:
            if check.name == name:
                return check
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "trials": self.trials,
            "passed": self.passed,
            "checks": [check.to_dict() for check in self.checks],
        }


SCALING_FACTORS = (0.5, 2.0, 10.0)


def run_property_checks(
    response: Callable[[np.ndarray], np.ndarray],
    trials: int,
    tol: float,
    rng: np.random.Generator,
    signal_length: int = 256,
    label: str = "filter",
    truncations_per_trial: int = 3,
) -> PropertyReport:
    """Measure the four operator properties on random Gaussian signals.

    Violations are aggregated as maxima over all trials; failures are
    reported, never raised.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    worst = {"causal": 0.0, "scaling": 0.0, "odd": 0.0, "bounded": 0.0}
    for _ in range(trials):
        g = rng.standard_normal(signal_length)
        base = response(g)
        for k in rng.integers(1, signal_length, size=truncations_per_trial):
            head = response(g[: k + 1])
            worst["causal"] = max(worst["causal"], float(np.max(np.abs(head - base[: k + 1]))))
        for alpha in SCALING_FACTORS:
            scaled = response(alpha * g)
            worst["scaling"] = max(worst["scaling"], float(np.max(np.abs(scaled - base))))
        worst["odd"] = max(worst["odd"], float(np.max(np.abs(response(-g) + base))))
        worst["bounded"] = max(worst["bounded"], float(np.max(np.abs(base)) - 1.0))
    checks = tuple(
        PropertyCheck(name, value, tol, value <= tol) for name, value in worst.items()
    )
    return PropertyReport(label=label, trials=trials, checks=checks)


def check_properties(
    filt: FilterSpec,
    trials: int = 100,
    tol: float = 1e-12,
    rng: np.random.Generator | None = None,
    signal_length: int = 256,
) -> PropertyReport:
    """:func:`run_property_checks` applied to a named filter."""
    if rng is None:
        rng = np.random.default_rng(0)
    return run_property_checks(
        lambda s: filter_response(filt, s),
        trials=trials,
        tol=tol,
        rng=rng,
        signal_length=signal_length,
        label=filt.kind.value,
    )


@dataclass(frozen=True)
class DecayBlindnessReport:
    max_gap: float
    tolerance: float
    burn_in: int
    passed: bool

    def to_dict(self) -> dict:
        return {
            "max_gap": self.max_gap,
            "tolerance": self.tolerance,
            "burn_in": self.burn_in,
            "passed": self.passed,
        }


def decay_blindness(
    beta: float, spec: SignalSpec, tol: float = 0.05
) -> DecayBlindnessReport:
    """Gap between responses to the damped and undamped signal after burn-in.

    This is an empirical observation about slowly-decaying envelopes, not an
    exact operator identity, hence the loose default tolerance.
    """
    filt = FilterSpec(FilterKind.ADAM_EQUAL_BETA, beta=beta)
    damped = filter_response(filt, gen_signal(spec))
    undamped = filter_response(filt, gen_signal(replace(spec, decay=0.0)))
    burn_in = min(math.ceil(2.0 * math.pi / spec.frequency), spec.length - 1)
    gap = float(np.max(np.abs(damped[burn_in:] - undamped[burn_in:])))
    return DecayBlindnessReport(max_gap=gap, tolerance=tol, burn_in=burn_in, passed=gap <= tol)


@dataclass(frozen=True)
class DensityWitness:
    found: bool
    signal: np.ndarray | None
    achieved: float
    target: float
    iterations: int

    def to_dict(self) -> dict:
        return {
            "found": self.found,
            "achieved": self.achieved,
            "target": self.target,
            "iterations": self.iterations,
        }


def density_witness(
    target: float,
    k: int,
    beta: float,
    tol: float = 1e-6,
    max_iter: int = 200,
) -> DensityWitness:
    """Search for a signal whose step-k response equals ``target``.

    Uses a two-phase family: a constant prefix of k steps followed by one
    free sample, under first-sample seeding. Along that family the response
    at step k is monotone in the final sample, so bisection applies; by
    oddness, negative targets mirror positive ones. A miss is reported, not
    raised.
    """
    if not -1.0 <= target <= 1.0:
        raise ValueError(f"target must be in [-1, 1], got {target}")
    if k < 1:
        raise ValueError("k must be a positive integer")
    filt = FilterSpec(FilterKind.ADAM_EQUAL_BETA, beta=beta, init_mode=InitMode.FIRST_SAMPLE)

    sign = -1.0 if target < 0 else 1.0
    goal = abs(target)

    def make_signal(t: float) -> np.ndarray:
        return sign * np.concatenate([np.ones(k), [t]])

    def response_at_k(t: float) -> float:
        return sign * float(filter_response(filt, make_signal(t))[k])

    # response is nondecreasing on t <= 1: t=1 gives exactly 1, and the
    # momentum zero-crossing t0 gives exactly 0
    lo = -beta / (1.0 - beta) if beta > 0 else 0.0
    hi = 1.0
    f_lo, f_hi = response_at_k(lo), response_at_k(hi)
    best_t, best_val = (lo, f_lo) if abs(f_lo - goal) <= abs(f_hi - goal) else (hi, f_hi)
    iterations = 0
    if not f_lo <= goal <= f_hi:
        return DensityWitness(
            found=abs(best_val - goal) <= tol,
            signal=make_signal(best_t),
            achieved=sign * best_val,
            target=target,
            iterations=iterations,
        )
    while iterations < max_iter and abs(best_val - goal) > tol:
        mid = (lo + hi) / 2.0
        f_mid = response_at_k(mid)
        if abs(f_mid - goal) < abs(best_val - goal):
            best_t, best_val = mid, f_mid
        if f_mid < goal:
            lo = mid
        else:
            hi = mid
        iterations += 1
    return DensityWitness(
        found=abs(best_val - goal) <= tol,
        signal=make_signal(best_t),
        achieved=sign * best_val,
        target=target,
        iterations=iterations,
    )
