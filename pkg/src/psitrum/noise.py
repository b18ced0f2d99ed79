"""Depolarizing channel and noisy density-matrix evolution.

The channel mixes the register toward I/2^n:

    xi(rho) = (1 - p) rho + p I / 2^n,   0 <= p <= 4^n / (4^n - 1)

Overshoot mode applies the configured p after every gate column; stochastic
mode draws each column's rate uniformly from [0, p] using a seeded generator.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .circuit import Circuit, stage_operator
from .core import (
    DENSITY_MAX_QUBITS,
    DensityMatrix,
    ResourceLimitError,
    ValidationError,
    density_from_state,
)
from .engine import initial_state

MODE_OVERSHOOT = "overshoot"
MODE_STOCHASTIC = "stochastic"


def max_error_rate(n: int) -> float:
    d = 4.0**n
    return d / (d - 1.0)


@dataclass(frozen=True)
class NoiseConfig:
    error_rate: float
    mode: str = MODE_OVERSHOOT
    seed: int = 0

    def __post_init__(self):
        if self.mode not in (MODE_OVERSHOOT, MODE_STOCHASTIC):
            raise ValidationError(f"unknown noise mode {self.mode!r}")
        if not np.isfinite(self.error_rate) or self.error_rate < 0.0:
            raise ValidationError(f"error rate {self.error_rate} must be >= 0")
        if not 0 <= int(self.seed) < 2**64:
            raise ValidationError("seed must fit in 64 unsigned bits")

    def validate_for(self, num_qubits: int) -> None:
        cap = max_error_rate(num_qubits)
        if self.error_rate > cap:
            raise ValidationError(
                f"error rate {self.error_rate} exceeds 4^n/(4^n-1) = {cap!r} "
                f"for n = {num_qubits}"
            )

    def to_dict(self) -> dict:
        return {"p": self.error_rate, "mode": self.mode, "seed": int(self.seed)}

    @classmethod
    def from_dict(cls, d: dict) -> "NoiseConfig":
        try:
            return cls(float(d["p"]), d.get("mode", MODE_OVERSHOOT), int(d.get("seed", 0)))
        except (KeyError, TypeError, ValueError) as e:
            raise ValidationError(f"bad noise config: {e}") from e


def depolarize(rho: DensityMatrix, p: float) -> DensityMatrix:
    n = rho.num_qubits
    if not 0.0 <= p <= max_error_rate(n):
        raise ValidationError(
            f"error rate {p} outside [0, {max_error_rate(n)!r}] for n = {n}"
        )
    dim = 1 << n
    mixed = (1.0 - p) * rho.entries + (p / dim) * np.eye(dim)
    out = DensityMatrix(n, mixed)
    if p > 1.0:
        # the overshoot range above 1 is only conditionally PSD; check it
        out.check_psd()
    return out


def stage_rates(cfg: NoiseConfig, num_stages: int) -> np.ndarray:
    """Per-column error rates; reproducible for a fixed seed in stochastic mode."""
    if cfg.mode == MODE_OVERSHOOT:
        return np.full(num_stages, cfg.error_rate)
    rng = np.random.default_rng(int(cfg.seed))
    return rng.uniform(0.0, cfg.error_rate, size=num_stages)


def run_noisy(c: Circuit, cfg: NoiseConfig):
    """Evolve rho <- U_s rho U_s^dag then depolarize, column by column.

    Returns ``(final_density, per_stage_trace)``; trace index 0 is the
    (noiseless) initial density.
    """
    n = c.num_qubits
    if n > DENSITY_MAX_QUBITS:
        raise ResourceLimitError(
            f"density evolution caps at {DENSITY_MAX_QUBITS} qubits, got {n}"
        )
    cfg.validate_for(n)
    rates = stage_rates(cfg, c.num_stages)
    rho = density_from_state(initial_state(c))
    trace = [rho]
    for s in range(c.num_stages):
        u = stage_operator(c, s)
        rho = DensityMatrix(n, u @ rho.entries @ u.conj().T)
        rho = depolarize(rho, float(rates[s]))
        trace.append(rho)
    return rho, trace
