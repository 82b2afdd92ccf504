"""Frame potential minimization over K-tuples of unitaries.

Riemannian steepest descent on U(d)^K: the Euclidean gradient E_k = dP/d(conj U_k)
is mapped to the skew-Hermitian direction Omega_k = E_k U_k^dag - U_k E_k^dag and
iterates are retracted exactly by U_k <- exp(-eta Omega_k) U_k.  Step sizes come
from Armijo backtracking.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import _backend
from .designs import UnitaryEnsemble, target_potential

ARMIJO_C = 1e-4


@dataclass
class OptimizerConfig:
    d: int = 2
    K: int = 12
    t: int = 2
    max_iter: int = 2000
    restarts: int = 20
    step: float = 0.1
    backtrack: float = 0.5
    max_step: float = 10.0
    tol: float = 1e-6
    seed: int = 0
    threads: int = 1

    def __post_init__(self):
        for name in ("d", "K", "t", "max_iter", "restarts", "threads"):
            if int(getattr(self, name)) < 1:
                raise ValueError(f"{name} must be positive")
        if not (self.tol > 0 and self.step > 0 and 0 < self.backtrack < 1 and self.max_step >= self.step):
            raise ValueError("invalid step-size schedule or tolerance")


@dataclass
class RestartResult:
    restart: int
    seed: int
    values: list[float]
    steps: list[float]
    matrices: np.ndarray
    success: bool

    @property
    def final(self) -> float:
        return self.values[-1]


@dataclass
class OptimizationTrace:
    config: OptimizerConfig
    target: float
    runs: list[RestartResult] = field(default_factory=list)
    best_index: int = 0

    @property
    def best(self) -> RestartResult:
        return self.runs[self.best_index]

    @property
    def values(self) -> list[float]:
        return self.best.values

    @property
    def success(self) -> bool:
        return self.best.success

    @property
    def gap(self) -> float:
        return self.best.final - self.target

    def ensemble(self) -> UnitaryEnsemble:
        c = self.config
        return UnitaryEnsemble(
            self.best.matrices,
            name=f"minimized-d{c.d}-K{c.K}-t{c.t}",
            provenance=f"frame potential descent, seed {self.best.seed}",
            claims={"t": c.t} if self.success else {},
        )

    def summary(self) -> dict:
        return {
            "config": asdict(self.config),
            "target": self.target,
            "best_restart": self.best.restart,
            "best_value": self.best.final,
            "gap": self.gap,
            "success": self.success,
            "restarts": [
                {"restart": r.restart, "seed": r.seed, "value": r.final, "iterations": len(r.values) - 1, "success": r.success}
                for r in self.runs
            ],
        }

    def json_lines(self):
        for r in self.runs:
            for i, (v, s) in enumerate(zip(r.values, r.steps)):
                yield json.dumps({"restart": r.restart, "iter": i, "value": v, "step": s})
        yield json.dumps({"summary": self.summary()})


def potential_gradient(D, t: int = 2) -> np.ndarray:
    """Euclidean gradient dP/d(conj U_k) of the order-t frame potential."""
    mats = D.matrices if isinstance(D, UnitaryEnsemble) else np.asarray(D, dtype=complex)
    return _backend.potential_and_gradient(mats, t)[1]


def riemannian_direction(mats: np.ndarray, grad: np.ndarray) -> np.ndarray:
    A = grad @ np.conj(np.swapaxes(mats, 1, 2))
    return A - np.conj(np.swapaxes(A, 1, 2))


def expm_skew(omega: np.ndarray, eta: float) -> np.ndarray:
    """exp(-eta Omega) for a stack of skew-Hermitian Omega, via eigh of i Omega."""
    lam, V = np.linalg.eigh(1j * omega)
    return (V * np.exp(1j * eta * lam)[:, None, :]) @ np.conj(np.swapaxes(V, 1, 2))


def random_unitaries(d: int, K: int, rng: np.random.Generator) -> np.ndarray:
    """exp(A) with A skew-Hermitian, standard normal entries scaled by 1/sqrt(d)."""
    G = (rng.standard_normal((K, d, d)) + 1j * rng.standard_normal((K, d, d))) / np.sqrt(d)
    H = (G + np.conj(np.swapaxes(G, 1, 2))) / 2
    return expm_skew(1j * H, -1.0)


def _reunitarize(mats: np.ndarray) -> np.ndarray:
    u, _, vh = np.linalg.svd(mats)
    return u @ vh


def _run(config: OptimizerConfig, restart: int, target: float) -> RestartResult:
    seed = config.seed + restart
    rng = np.random.default_rng(seed)
    U = random_unitaries(config.d, config.K, rng)
    value, grad = _backend.potential_and_gradient(U, config.t)
    values, steps = [value], [0.0]
    eta = config.step
    for _ in range(config.max_iter):
        if abs(value - target) <= config.tol:
            break
        omega = riemannian_direction(U, grad)
        slope = float(np.sum(np.abs(omega) ** 2))
        if slope < 1e-30:
            break
        accepted = False
        while eta > 1e-14:
            trial = expm_skew(omega, eta) @ U
            tval, tgrad = _backend.potential_and_gradient(trial, config.t)
            if tval <= value - ARMIJO_C * eta * slope:
                accepted = True
                break
            eta *= config.backtrack
        if not accepted:
            break
        U, value, grad = trial, tval, tgrad
        if np.max(np.abs(np.conj(np.swapaxes(U, 1, 2)) @ U - np.eye(config.d))) > 1e-12:
            U = _reunitarize(U)
            value, grad = _backend.potential_and_gradient(U, config.t)
        values.append(value)
        steps.append(eta)
        eta = min(eta / config.backtrack, config.max_step)
    return RestartResult(restart, seed, values, steps, U, abs(value - target) <= config.tol)


def minimize_potential(config: OptimizerConfig) -> OptimizationTrace:
    """Multi-restart descent; the first successful restart (by index) is kept,
    otherwise the one with the lowest final potential."""
    target = float(target_potential(config.t, config.d))
    if config.threads > 1:
        with ThreadPoolExecutor(config.threads) as pool:
            runs = list(pool.map(lambda r: _run(config, r, target), range(config.restarts)))
    else:
        runs = []
        for r in range(config.restarts):
            runs.append(_run(config, r, target))
            if runs[-1].success:
                break
    ok = [i for i, r in enumerate(runs) if r.success]
    best = ok[0] if ok else min(range(len(runs)), key=lambda i: (runs[i].final, i))
    return OptimizationTrace(config, target, runs, best)
