"""
Simulación Monte-Carlo del relé UWO -> RF.

Cada ensayo sortea una SNR por salto (EGG y alpha-mu) y evalúa la métrica
sobre la SNR extremo a extremo min(snr_1, snr_2). Los ensayos se agrupan
en bloques de tamaño fijo STREAM_BLOCK_SIZE; el bloque k usa su propio
generador PCG64 derivado de (root_seed, k). Así el resultado depende
solo de (trials, root_seed) y no de batch_size ni del número de workers.
"""
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import special

from channels import alpha_mu_sample, egg_sample
from config import (
    DEFAULT_BATCH_SIZE,
    DEFAULT_ROOT_SEED,
    DEFAULT_TRIALS,
    DEFAULT_WORKERS,
    MIN_TRIALS,
    STREAM_BLOCK_SIZE,
)
from metrics import Scenario
from specfun import DomainError


@dataclass(frozen=True)
class SimConfig:
    """Parámetros de una simulación."""
    trials: int = DEFAULT_TRIALS
    root_seed: int = DEFAULT_ROOT_SEED
    batch_size: Optional[int] = None  # None = min(DEFAULT_BATCH_SIZE, trials)
    workers: int = DEFAULT_WORKERS

    def __post_init__(self):
        if int(self.trials) != self.trials or self.trials < MIN_TRIALS:
            raise DomainError(f"trials debe ser un entero >= {MIN_TRIALS}, recibido {self.trials}")
        if self.batch_size is None:
            object.__setattr__(self, "batch_size", min(DEFAULT_BATCH_SIZE, int(self.trials)))
        if self.batch_size < 1 or self.batch_size > self.trials:
            raise DomainError(f"batch_size debe estar en [1, trials], recibido {self.batch_size}")
        if self.workers < 1:
            raise DomainError(f"workers debe ser >= 1, recibido {self.workers}")
        if not 0 <= self.root_seed < 2 ** 64:
            raise DomainError(f"root_seed debe estar en [0, 2^64), recibido {self.root_seed}")


@dataclass(frozen=True)
class SimEstimate:
    value: float
    stderr: float
    trials: int


# ============================================================================
# FLUJOS ALEATORIOS
# ============================================================================

def block_stream(root_seed: int, block_index: int) -> np.random.Generator:
    """Generador independiente del bloque block_index (equivalente a SeedSequence(root_seed).spawn)."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(root_seed, spawn_key=(block_index,))))


def draw_hop_snrs(s: Scenario, n: int, rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray]:
    """SNR instantáneas de ambos saltos; primero UWO, luego RF, en ese orden fijo."""
    return egg_sample(s.uwo, rng, n), alpha_mu_sample(s.rf, rng, n)


# ============================================================================
# ESTIMADORES POR ENSAYO
# ============================================================================

def outage_indicator(snr_uwo: np.ndarray, snr_rf: np.ndarray, threshold_snr: float) -> np.ndarray:
    """1 si min(snr_1, snr_2) <= umbral."""
    return (np.minimum(snr_uwo, snr_rf) <= threshold_snr).astype(float)


def conditional_error(snr: np.ndarray, eta: float, beta: float) -> np.ndarray:
    """(eta/2) erfc(sqrt(beta snr))."""
    return 0.5 * eta * special.erfc(np.sqrt(beta * snr))


def asep_conditional(snr_uwo: np.ndarray, snr_rf: np.ndarray, eta: float, beta: float) -> np.ndarray:
    """Probabilidad condicional de error extremo a extremo: e1 + e2 - 2 e1 e2."""
    e1 = conditional_error(snr_uwo, eta, beta)
    e2 = conditional_error(snr_rf, eta, beta)
    return e1 + e2 - 2.0 * e1 * e2


def capacity_kernel(snr_uwo: np.ndarray, snr_rf: np.ndarray, half_duplex: bool = False) -> np.ndarray:
    """log2(1 + min(snr_1, snr_2)), con el factor 1/2 opcional."""
    bits = np.log2(1.0 + np.minimum(snr_uwo, snr_rf))
    return 0.5 * bits if half_duplex else bits


def _block_statistics(kind: str, s: Scenario, root_seed: int, block_index: int, n: int,
                      options: Dict) -> Tuple[float, float, float]:
    """(n, suma, suma de cuadrados) de un bloque."""
    rng = block_stream(root_seed, block_index)
    snr_uwo, snr_rf = draw_hop_snrs(s, n, rng)
    if kind == "outage":
        x = outage_indicator(snr_uwo, snr_rf, options["threshold_snr"])
    elif kind == "asep":
        x = asep_conditional(snr_uwo, snr_rf, s.modulation.eta, s.modulation.beta)
    elif kind == "asep-bit":
        e1 = conditional_error(snr_uwo, s.modulation.eta, s.modulation.beta)
        e2 = conditional_error(snr_rf, s.modulation.eta, s.modulation.beta)
        flip_1 = rng.random(n) < e1
        flip_2 = rng.random(n) < e2
        x = np.logical_xor(flip_1, flip_2).astype(float)
    elif kind == "capacity":
        x = capacity_kernel(snr_uwo, snr_rf, options.get("half_duplex", False))
    else:
        raise DomainError(f"Estimador desconocido: {kind}")
    return float(n), float(np.sum(x)), float(np.sum(x * x))


def _run_blocks(task: Tuple[str, Scenario, int, Sequence[Tuple[int, int]], Dict]) -> List[Tuple[float, float, float]]:
    kind, s, root_seed, blocks, options = task
    return [_block_statistics(kind, s, root_seed, index, n, options) for index, n in blocks]


def _block_plan(trials: int) -> List[Tuple[int, int]]:
    full, rest = divmod(trials, STREAM_BLOCK_SIZE)
    plan = [(k, STREAM_BLOCK_SIZE) for k in range(full)]
    if rest:
        plan.append((full, rest))
    return plan


def _simulate(kind: str, s: Scenario, cfg: SimConfig, options: Dict, verbose: bool = False) -> np.ndarray:
    """Ejecuta todos los bloques y devuelve sus estadísticos en orden de bloque."""
    plan = _block_plan(cfg.trials)
    per_batch = max(1, cfg.batch_size // STREAM_BLOCK_SIZE)
    batches = [plan[i:i + per_batch] for i in range(0, len(plan), per_batch)]
    tasks = [(kind, s, cfg.root_seed, batch, options) for batch in batches]

    if verbose:
        print(f"🎲 Monte-Carlo [{kind}]: {cfg.trials:,} ensayos en {len(plan)} bloques, "
              f"{len(batches)} lotes, {cfg.workers} worker(s)")

    if cfg.workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as executor:
            results = list(executor.map(_run_blocks, tasks))
    else:
        results = [_run_blocks(task) for task in tasks]

    stats = np.array([row for batch in results for row in batch])
    return stats


def _mean_estimate(stats: np.ndarray) -> SimEstimate:
    n = float(np.sum(stats[:, 0]))
    total = float(np.sum(stats[:, 1]))
    total_sq = float(np.sum(stats[:, 2]))
    mean = total / n
    variance = max(total_sq - n * mean * mean, 0.0) / (n - 1.0)
    return SimEstimate(mean, math.sqrt(variance / n), int(n))


def simulate_outage(s: Scenario, cfg: SimConfig = SimConfig(), threshold_snr: Optional[float] = None,
                    verbose: bool = False) -> SimEstimate:
    """
    Fracción de ensayos con min(snr_1, snr_2) <= umbral.

    threshold_snr permite usar un umbral distinto del escenario (incluido 0).
    """
    gamma_out = s.threshold_snr if threshold_snr is None else float(threshold_snr)
    if gamma_out < 0:
        raise DomainError(f"El umbral debe ser >= 0, recibido {gamma_out}")
    stats = _simulate("outage", s, cfg, {"threshold_snr": gamma_out}, verbose)
    n = float(np.sum(stats[:, 0]))
    p = float(np.sum(stats[:, 1])) / n
    return SimEstimate(p, math.sqrt(p * (1.0 - p) / n), int(n))


def simulate_asep(s: Scenario, cfg: SimConfig = SimConfig(), estimator: str = "conditional",
                  verbose: bool = False) -> SimEstimate:
    """
    ASEP extremo a extremo.

    estimator="conditional" promedia la probabilidad condicional e1 + e2 - 2 e1 e2;
    estimator="bit" sortea un error por salto y cuenta los bits con paridad impar.
    """
    if estimator == "conditional":
        kind = "asep"
    elif estimator == "bit":
        kind = "asep-bit"
    else:
        raise DomainError(f"Estimador desconocido: {estimator}")
    return _mean_estimate(_simulate(kind, s, cfg, {}, verbose))


def simulate_capacity(s: Scenario, cfg: SimConfig = SimConfig(), half_duplex: bool = False,
                      verbose: bool = False) -> SimEstimate:
    """Media de log2(1 + min(snr_1, snr_2))."""
    return _mean_estimate(_simulate("capacity", s, cfg, {"half_duplex": half_duplex}, verbose))


def simulate(metric: str, s: Scenario, cfg: SimConfig = SimConfig(), half_duplex: bool = False,
             verbose: bool = False) -> SimEstimate:
    if metric == "outage":
        return simulate_outage(s, cfg, verbose=verbose)
    if metric == "asep":
        return simulate_asep(s, cfg, verbose=verbose)
    if metric == "capacity":
        return simulate_capacity(s, cfg, half_duplex, verbose=verbose)
    raise DomainError(f"Métrica desconocida: {metric}")


# ============================================================================
# FIDELIDAD DE LOS MUESTREADORES
# ============================================================================

def ks_distance(samples: np.ndarray, cdf: Callable[[np.ndarray], np.ndarray]) -> float:
    """Distancia de Kolmogorov-Smirnov entre la CDF empírica de samples y cdf."""
    x = np.sort(np.asarray(samples, dtype=float))
    n = x.size
    f = np.asarray(cdf(x), dtype=float)
    upper = np.arange(1, n + 1) / n - f
    lower = f - np.arange(0, n) / n
    return float(max(upper.max(), lower.max()))
