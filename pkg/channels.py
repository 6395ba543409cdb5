"""
Modelos de canal de cada salto del relé.

- Salto RF: desvanecimiento alpha-mu (Rayleigh, Nakagami-m, Weibull,
  one-sided Gaussian y exponencial son casos particulares).
- Salto UWO: mezcla EGG (exponencial + gamma generalizada) de la
  turbulencia inducida por burbujas y gradientes de temperatura,
  con detección heterodina.

Todas las funciones reciben SNR instantánea lineal (nunca dB) y aceptan
escalares o arrays de numpy.
"""
import json
import math
from dataclasses import dataclass, replace
from typing import Any, Dict, Optional, Sequence

import numpy as np
from scipy import special

import config
from contract_validator import validate_contract
from specfun import (
    ContourConfig,
    DomainError,
    GHSpec,
    fox_h,
    reg_lower_incomplete_gamma_log,
    reg_upper_incomplete_gamma_log,
)

# Ruta de contraste: contorno genérico, sin reducciones a gamma incompleta
MEIJER_ROUTE_CONFIG = ContourConfig(fast_path=False)


class ScenarioError(KeyError):
    """Combinación (agua, turbulencia) o preset desconocido."""


class ConfigError(ValueError):
    """Archivo de escenarios inválido."""


# ============================================================================
# PARÁMETROS
# ============================================================================

def _require_positive(name: str, value: float) -> float:
    value = float(value)
    if not (value > 0 and math.isfinite(value)):
        raise DomainError(f"{name} debe ser positivo y finito, recibido {value}")
    return value


@dataclass(frozen=True)
class AlphaMuParams:
    """Salto RF alpha-mu con SNR media lineal mean_snr."""
    alpha: float
    mu: float
    mean_snr: float = 1.0

    def __post_init__(self):
        for name in ("alpha", "mu", "mean_snr"):
            object.__setattr__(self, name, _require_positive(name, getattr(self, name)))

    def with_mean_snr(self, mean_snr: float) -> "AlphaMuParams":
        return replace(self, mean_snr=mean_snr)


@dataclass(frozen=True)
class EggParams:
    """
    Salto UWO con distribución EGG.

    lam es el parámetro lambda de la componente exponencial; w el peso de mezcla.
    """
    a: float
    b: float
    c: float
    lam: float
    w: float
    mean_snr: float = 1.0

    def __post_init__(self):
        for name in ("a", "b", "c", "lam", "mean_snr"):
            object.__setattr__(self, name, _require_positive(name, getattr(self, name)))
        w = float(self.w)
        if not 0.0 < w < 1.0:
            raise DomainError(f"w debe estar en (0, 1), recibido {w}")
        object.__setattr__(self, "w", w)

    def with_mean_snr(self, mean_snr: float) -> "EggParams":
        return replace(self, mean_snr=mean_snr)


@dataclass(frozen=True)
class WaterScenario:
    """Fila de la tabla de escenarios: tipo de agua, turbulencia y nivel de burbujas (L/min)."""
    water: str
    turbulence: str
    bubble_level: float

    @property
    def label(self) -> str:
        return f"{self.water}-{self.turbulence}"


# ============================================================================
# CATÁLOGO
# ============================================================================

def load_scenario_catalog(path: Optional[str] = None) -> Dict[str, Any]:
    """
    Construye el catálogo de escenarios: valores incorporados más, si se indica,
    las filas de un archivo JSON validado contra el contrato scenario_config.

    Returns:
        {"water_scenarios": {(agua, turbulencia): fila}, "rf_presets": {...}, "sweep_presets": {...}}

    Raises:
        ConfigError: si el archivo no existe, no es JSON o no cumple el contrato
    """
    catalog = {
        "water_scenarios": {key: dict(row) for key, row in config.WATER_SCENARIOS.items()},
        "rf_presets": dict(config.RF_PRESETS),
        "sweep_presets": {name: dict(preset) for name, preset in config.SWEEP_PRESETS.items()},
    }
    path = config.get_config_path(path)
    if not path:
        return catalog

    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except FileNotFoundError as e:
        raise ConfigError(f"Archivo de escenarios no encontrado: {path}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"JSON inválido en {path}: {e}") from e

    check = validate_contract(data, "scenario_config")
    if not check["valid"]:
        raise ConfigError(f"{path}: {check['error']} (ruta: {check['path']})")

    for row in data.get("water_scenarios", []):
        key = (row["water"], row["turbulence"])
        catalog["water_scenarios"][key] = {
            "bubble_level": row["bubble_level"], "a": row["a"], "b": row["b"],
            "c": row["c"], "lambda": row["lambda"], "w": row["w"],
        }
    for name, shape in data.get("rf_presets", {}).items():
        catalog["rf_presets"][name] = (float(shape["alpha"]), float(shape["mu"]))
    for name, preset in data.get("sweep_presets", {}).items():
        catalog["sweep_presets"][name] = preset
    return catalog


def list_scenarios(catalog: Optional[Dict[str, Any]] = None) -> Sequence[WaterScenario]:
    rows = (catalog or load_scenario_catalog())["water_scenarios"]
    return [WaterScenario(water, turbulence, row["bubble_level"]) for (water, turbulence), row in rows.items()]


def get_water_scenario(water: str, turbulence: str, catalog: Optional[Dict[str, Any]] = None) -> WaterScenario:
    rows = (catalog or load_scenario_catalog())["water_scenarios"]
    key = (water, turbulence)
    if key not in rows:
        raise ScenarioError(f"Escenario desconocido: agua={water}, turbulencia={turbulence}")
    return WaterScenario(water, turbulence, rows[key]["bubble_level"])


def scenario_params(scenario: WaterScenario, mean_snr: float = 1.0,
                    catalog: Optional[Dict[str, Any]] = None) -> EggParams:
    """Parámetros EGG de una fila del catálogo con la SNR media indicada."""
    rows = (catalog or load_scenario_catalog())["water_scenarios"]
    key = (scenario.water, scenario.turbulence)
    if key not in rows:
        raise ScenarioError(f"Escenario desconocido: agua={scenario.water}, turbulencia={scenario.turbulence}")
    row = rows[key]
    return EggParams(a=row["a"], b=row["b"], c=row["c"], lam=row["lambda"], w=row["w"], mean_snr=mean_snr)


def alpha_mu_preset(name: str, mean_snr: float = 1.0, catalog: Optional[Dict[str, Any]] = None) -> AlphaMuParams:
    presets = (catalog or load_scenario_catalog())["rf_presets"]
    if name not in presets:
        raise ScenarioError(f"Preset RF desconocido: {name} (disponibles: {', '.join(sorted(presets))})")
    alpha, mu = presets[name]
    return AlphaMuParams(alpha=alpha, mu=mu, mean_snr=mean_snr)


# ============================================================================
# UTILIDADES
# ============================================================================

def _snr_array(snr):
    arr = np.asarray(snr, dtype=float)
    if np.any(np.isnan(arr)) or np.any(arr < 0):
        raise DomainError(f"La SNR instantánea debe ser >= 0, recibido {snr}")
    return arr


def _output(result: np.ndarray, snr):
    return float(result) if np.ndim(snr) == 0 else result


def _log_positive(arr: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.log(arr)


# ============================================================================
# ALPHA-MU
# ============================================================================

def alpha_mu_pdf(p: AlphaMuParams, snr):
    """Densidad de la SNR instantánea de un salto alpha-mu."""
    x = _snr_array(snr)
    half = 0.5 * p.alpha
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        log_x = _log_positive(x)
        log_f = (math.log(half) - special.gammaln(p.mu) + p.mu * math.log(p.mu)
                 - half * p.mu * math.log(p.mean_snr) + (half * p.mu - 1.0) * log_x
                 - p.mu * np.exp(half * (log_x - math.log(p.mean_snr))))
        f = np.exp(log_f)
    exponent = half * p.mu
    if exponent > 1:
        at_zero = 0.0
    elif exponent == 1:
        at_zero = half * p.mu ** p.mu / (math.gamma(p.mu) * p.mean_snr ** exponent)
    else:
        at_zero = math.inf
    f = np.where(x == 0, at_zero, f)
    f = np.where(np.isinf(x), 0.0, f)
    return _output(f, snr)


def _alpha_mu_log_arg(p: AlphaMuParams, x: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return math.log(p.mu) + 0.5 * p.alpha * (_log_positive(x) - math.log(p.mean_snr))


def alpha_mu_cdf(p: AlphaMuParams, snr, route: str = "gamma"):
    """
    CDF de la SNR: P(mu, mu (snr/mean)^(alpha/2)).

    route="meijer" evalúa la forma G^{1,1}_{1,2} por contorno (sin reducciones),
    como contraste independiente.
    """
    x = _snr_array(snr)
    if route == "gamma":
        return _output(reg_lower_incomplete_gamma_log(p.mu, _alpha_mu_log_arg(p, x)), snr)
    if route != "meijer":
        raise DomainError(f"Ruta desconocida: {route}")

    spec = GHSpec.lower_gamma(p.mu)
    log_norm = float(special.gammaln(p.mu))
    out = np.empty(x.shape)
    for idx, value in np.ndenumerate(x):
        if value == 0:
            out[idx] = 0.0
        elif np.isinf(value):
            out[idx] = 1.0
        else:
            log_z = math.log(p.mu) + 0.5 * p.alpha * (math.log(value) - math.log(p.mean_snr))
            out[idx] = fox_h(spec, None, MEIJER_ROUTE_CONFIG, log_z=log_z) * math.exp(-log_norm)
    return _output(out, snr)


def alpha_mu_survival(p: AlphaMuParams, snr):
    x = _snr_array(snr)
    return _output(reg_upper_incomplete_gamma_log(p.mu, _alpha_mu_log_arg(p, x)), snr)


def alpha_mu_quantile(p: AlphaMuParams, prob):
    """Inversa de la CDF: mean (P^-1(mu, prob)/mu)^(2/alpha)."""
    q = np.asarray(prob, dtype=float)
    if np.any(q < 0) or np.any(q > 1):
        raise DomainError(f"La probabilidad debe estar en [0, 1], recibido {prob}")
    g = special.gammaincinv(p.mu, q)
    return _output(p.mean_snr * (g / p.mu) ** (2.0 / p.alpha), prob)


def alpha_mu_moment(p: AlphaMuParams, order: float) -> float:
    """E[snr^t] = (mean mu^(-2/alpha))^t Gamma(mu + 2t/alpha) / Gamma(mu), para mu + 2t/alpha > 0."""
    shifted = p.mu + 2.0 * order / p.alpha
    if not shifted > 0:
        raise DomainError(f"El momento de orden {order} no existe (mu + 2t/alpha = {shifted})")
    log_m = (order * (math.log(p.mean_snr) - 2.0 / p.alpha * math.log(p.mu))
             + special.gammaln(shifted) - special.gammaln(p.mu))
    return math.exp(log_m)


def log_standard_gamma(rng: np.random.Generator, shape: float, size=None) -> np.ndarray:
    """
    log de una variable Gamma(shape, 1).

    Para shape < 1 se usa G_shape = G_(shape+1) * U^(1/shape) en el dominio
    logarítmico: con shape del orden de 1e-2 la muestra directa se anula.
    """
    if shape >= 1.0:
        return np.log(rng.standard_gamma(shape, size))
    boosted = np.log(rng.standard_gamma(shape + 1.0, size))
    uniform = 1.0 - rng.random(size)  # (0, 1]
    return boosted + np.log(uniform) / shape


def alpha_mu_sample(p: AlphaMuParams, rng: np.random.Generator, size=None):
    """Muestras de SNR: mean (G/mu)^(2/alpha) con G ~ Gamma(mu, 1)."""
    log_g = log_standard_gamma(rng, p.mu, size)
    samples = p.mean_snr * np.exp(2.0 / p.alpha * (log_g - math.log(p.mu)))
    return float(samples) if size is None else samples


# ============================================================================
# EGG
# ============================================================================

def egg_pdf(p: EggParams, snr):
    """
    Densidad EGG de la SNR heterodina:
    w/(lam mean) e^{-x/(lam mean)} + c (1-w) / (Gamma(a) x) u^{ac} e^{-u^c},  u = x/(b mean).
    """
    x = _snr_array(snr)
    if np.any(x == 0):
        raise DomainError(f"La densidad EGG solo está definida para SNR > 0, recibido {snr}")
    scale_exp = p.lam * p.mean_snr
    scale_gg = p.b * p.mean_snr
    with np.errstate(invalid="ignore", over="ignore"):
        exp_part = p.w / scale_exp * np.exp(-x / scale_exp)
        log_u = np.log(x) - math.log(scale_gg)
        log_gg = (math.log(p.c) - special.gammaln(p.a) - np.log(x)
                  + p.a * p.c * log_u - np.exp(p.c * log_u))
        gg_part = (1.0 - p.w) * np.exp(log_gg)
    gg_part = np.where(np.isinf(x), 0.0, gg_part)
    return _output(exp_part + gg_part, snr)


def _egg_gg_log_arg(p: EggParams, x: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return p.c * (_log_positive(x) - math.log(p.b * p.mean_snr))


def egg_cdf(p: EggParams, snr, route: str = "gamma"):
    """
    CDF EGG: w (1 - e^{-x/(lam mean)}) + (1-w) P(a, (x/(b mean))^c).

    route="meijer" usa las formas G^{1,1}_{1,2} (la potencia c se absorbe
    en las escalas de la H de Fox) evaluadas por contorno.
    """
    x = _snr_array(snr)
    if route == "gamma":
        exp_part = -np.expm1(-x / (p.lam * p.mean_snr))
        gg_part = reg_lower_incomplete_gamma_log(p.a, _egg_gg_log_arg(p, x))
        return _output(p.w * exp_part + (1.0 - p.w) * gg_part, snr)
    if route != "meijer":
        raise DomainError(f"Ruta desconocida: {route}")

    exp_spec = GHSpec.lower_gamma(1.0)
    gg_spec, gg_pref = GHSpec.lower_gamma(p.a).with_argument_power(p.c)
    gg_norm = math.exp(-float(special.gammaln(p.a)))
    out = np.empty(x.shape)
    for idx, value in np.ndenumerate(x):
        if value == 0:
            out[idx] = 0.0
        elif np.isinf(value):
            out[idx] = 1.0
        else:
            log_x = math.log(value)
            exp_part = fox_h(exp_spec, None, MEIJER_ROUTE_CONFIG, log_z=log_x - math.log(p.lam * p.mean_snr))
            gg_part = gg_pref * gg_norm * fox_h(gg_spec, None, MEIJER_ROUTE_CONFIG,
                                                log_z=log_x - math.log(p.b * p.mean_snr))
            out[idx] = p.w * exp_part + (1.0 - p.w) * gg_part
    return _output(out, snr)


def egg_survival(p: EggParams, snr):
    """1 - CDF, con la cola GG en logaritmos igual que egg_cdf."""
    x = _snr_array(snr)
    exp_part = np.exp(-x / (p.lam * p.mean_snr))
    gg_part = reg_upper_incomplete_gamma_log(p.a, _egg_gg_log_arg(p, x))
    return _output(p.w * exp_part + (1.0 - p.w) * gg_part, snr)


def egg_mean(p: EggParams) -> float:
    """Media de la SNR: w lam mean + (1-w) b mean Gamma(a + 1/c)/Gamma(a)."""
    gg = math.exp(special.gammaln(p.a + 1.0 / p.c) - special.gammaln(p.a))
    return p.mean_snr * (p.w * p.lam + (1.0 - p.w) * p.b * gg)


def egg_component_quantiles(p: EggParams, probs: Sequence[float]) -> np.ndarray:
    """Cuantiles de cada componente (exponencial y GG), útiles como puntos de ruptura de cuadraturas."""
    q = np.asarray(probs, dtype=float)
    exp_q = -p.lam * p.mean_snr * np.log1p(-q)
    gg_q = p.b * p.mean_snr * special.gammaincinv(p.a, q) ** (1.0 / p.c)
    return np.sort(np.concatenate([exp_q, gg_q]))


def egg_sample(p: EggParams, rng: np.random.Generator, size=None):
    """
    Muestras EGG por composición: con probabilidad w una exponencial de media
    lam mean, si no una GG b mean G^(1/c) con G ~ Gamma(a, 1) (en logaritmos).
    """
    n = 1 if size is None else size
    pick_exp = rng.random(n) < p.w
    exp_draw = rng.standard_exponential(n) * (p.lam * p.mean_snr)
    log_g = log_standard_gamma(rng, p.a, n)
    gg_draw = p.b * p.mean_snr * np.exp(log_g / p.c)
    samples = np.where(pick_exp, exp_draw, gg_draw)
    return float(samples[0]) if size is None else samples
