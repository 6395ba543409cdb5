"""
Métricas extremo a extremo del relé decodifica-y-reenvía UWO -> RF.

Probabilidad de outage (exacta, asintótica, por cuadratura), ASEP
(forma cerrada por H de Fox y cuadratura) y capacidad ergódica (forma
cerrada por H de Fox bivariada y cuadratura). Las formas cerradas se
construyen sobre specfun; las cuadraturas son oráculos independientes
que solo usan las PDF/CDF de channels.
"""
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from functools import partial
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate, special

from channels import (
    AlphaMuParams,
    EggParams,
    alpha_mu_cdf,
    alpha_mu_pdf,
    alpha_mu_quantile,
    alpha_mu_survival,
    egg_cdf,
    egg_component_quantiles,
    egg_pdf,
    egg_survival,
)
from config import (
    BPSK as BPSK_CONSTANTS,
    CAPACITY_TAIL_MASS,
    DOMINANCE_TIE_TOLERANCE,
    METHODS,
    METHODS_BY_METRIC,
    METRICS,
    QUADRATURE_LIMIT,
    QUADRATURE_REL_TOL,
)
from specfun import BivariateGHSpec, ContourConfig, DomainError, GHSpec, fox_h, fox_h_bivariate


class UnsupportedAlphaError(ValueError):
    """La forma cerrada pedida solo existe para alpha = 2."""


class NonIdenticalSnrError(ValueError):
    """La expansión asintótica requiere la misma SNR media en ambos saltos."""


# ============================================================================
# ESCENARIO
# ============================================================================

@dataclass(frozen=True)
class ModulationParams:
    """Constantes (eta, beta) de la aproximación de ASEP (eta/2) erfc(sqrt(beta snr))."""
    eta: float
    beta: float

    def __post_init__(self):
        for name in ("eta", "beta"):
            value = float(getattr(self, name))
            if not (value > 0 and math.isfinite(value)):
                raise DomainError(f"{name} debe ser positivo, recibido {value}")
            object.__setattr__(self, name, value)


BPSK = ModulationParams(*BPSK_CONSTANTS)


@dataclass(frozen=True)
class Scenario:
    """Relé completo: salto UWO, salto RF, umbral de outage lineal y modulación."""
    uwo: EggParams
    rf: AlphaMuParams
    threshold_snr: float
    modulation: ModulationParams = BPSK

    def __post_init__(self):
        value = float(self.threshold_snr)
        if not (value > 0 and math.isfinite(value)):
            raise DomainError(f"El umbral de outage debe ser positivo, recibido {value}")
        object.__setattr__(self, "threshold_snr", value)

    @property
    def is_iid(self) -> bool:
        return math.isclose(self.uwo.mean_snr, self.rf.mean_snr, rel_tol=1e-12)

    def with_mean_snr(self, uwo_mean: float, rf_mean: Optional[float] = None) -> "Scenario":
        return replace(
            self,
            uwo=self.uwo.with_mean_snr(uwo_mean),
            rf=self.rf.with_mean_snr(uwo_mean if rf_mean is None else rf_mean),
        )


# Núcleos H de Fox comunes
def _pdf_kernel(nu: float) -> GHSpec:
    """H^{1,2}_{2,3}[z | (0,1),(1,1); (nu,1),(0,1),(1,1)] = z^nu e^{-z}."""
    return GHSpec(((0.0, 1.0), (1.0, 1.0)), ((nu, 1.0), (0.0, 1.0), (1.0, 1.0)), 1, 2)


def _asep_kernel(nu: float, power: float) -> GHSpec:
    """H^{1,2}_{2,2}[z | (1/2, power),(1,1); (nu,1),(0,1)]."""
    return GHSpec(((0.5, power), (1.0, 1.0)), ((nu, 1.0), (0.0, 1.0)), 1, 2)


def _capacity_kernel(upper_third: Tuple[float, float]) -> GHSpec:
    """H^{1,3}_{3,2}[z | (1,1),(1,1),upper_third; (1,1),(0,1)]: E[ln(1+snr)] para una familia de momentos."""
    return GHSpec(((1.0, 1.0), (1.0, 1.0), upper_third), ((1.0, 1.0), (0.0, 1.0)), 1, 3)


# Bloque externo de la capacidad: Gamma(w)^2 Gamma(1-w) / Gamma(1+w), w = s + t
CAPACITY_OUTER = {
    "outer_upper": ((0.0, 1.0, 1.0), (1.0, 1.0, 1.0)),
    "outer_lower": ((0.0, 1.0, 1.0), (0.0, 1.0, 1.0)),
    "m0": 2,
    "n0": 1,
}


def _log(x: float) -> float:
    return math.log(x)


def _gamma_norm(nu: float) -> float:
    return math.exp(-float(special.gammaln(nu)))


# ============================================================================
# OUTAGE
# ============================================================================

def outage_combined(cdf_1, cdf_2):
    """Outage de DF: F1 + F2 - F1 F2 (acepta escalares o arrays)."""
    f1 = np.asarray(cdf_1, dtype=float)
    f2 = np.asarray(cdf_2, dtype=float)
    for name, arr in (("cdf_1", f1), ("cdf_2", f2)):
        if np.any(np.isnan(arr)) or np.any(arr < 0) or np.any(arr > 1):
            raise DomainError(f"{name} debe estar en [0, 1], recibido {arr}")
    result = f1 + f2 - f1 * f2
    return float(result) if result.ndim == 0 else result


def e2e_cdf(s: Scenario, snr):
    """CDF de min(snr_1, snr_2)."""
    return outage_combined(egg_cdf(s.uwo, snr), alpha_mu_cdf(s.rf, snr))


def e2e_survival(s: Scenario, snr):
    return np.multiply(egg_survival(s.uwo, snr), alpha_mu_survival(s.rf, snr))


def e2e_pdf(s: Scenario, snr):
    """PDF de min(snr_1, snr_2): f1 (1 - F2) + f2 (1 - F1)."""
    return (egg_pdf(s.uwo, snr) * alpha_mu_survival(s.rf, snr)
            + alpha_mu_pdf(s.rf, snr) * egg_survival(s.uwo, snr))


def outage_exact_terms(s: Scenario, config: Optional[ContourConfig] = None) -> Dict[str, float]:
    """
    Los cinco términos de la outage exacta en H de Fox: tres CDF marginales
    (RF, componente exponencial, componente GG) y dos EGBMGF de producto.
    """
    uwo, rf = s.uwo, s.rf
    log_gamma_out = _log(s.threshold_snr)
    rf_log = _log(rf.mu) + 0.5 * rf.alpha * (log_gamma_out - _log(rf.mean_snr))
    exp_log = log_gamma_out - _log(uwo.lam * uwo.mean_snr)
    gg_log = log_gamma_out - _log(uwo.b * uwo.mean_snr)

    rf_spec = GHSpec.lower_gamma(rf.mu)
    exp_spec = GHSpec.lower_gamma(1.0)
    gg_spec, gg_pref = GHSpec.lower_gamma(uwo.a).with_argument_power(uwo.c)
    norm_rf = _gamma_norm(rf.mu)
    norm_gg = _gamma_norm(uwo.a)

    return {
        "rf": norm_rf * fox_h(rf_spec, None, config, log_z=rf_log),
        "uwo_exponential": uwo.w * fox_h(exp_spec, None, config, log_z=exp_log),
        "uwo_gg": (1.0 - uwo.w) * norm_gg * gg_pref * fox_h(gg_spec, None, config, log_z=gg_log),
        "cross_exponential": -uwo.w * norm_rf * fox_h_bivariate(
            BivariateGHSpec(exp_spec, rf_spec), None, None, config, log_x=exp_log, log_y=rf_log),
        "cross_gg": -(1.0 - uwo.w) * norm_gg * norm_rf * gg_pref * fox_h_bivariate(
            BivariateGHSpec(gg_spec, rf_spec), None, None, config, log_x=gg_log, log_y=rf_log),
    }


def outage_exact(s: Scenario, config: Optional[ContourConfig] = None) -> float:
    """Outage exacta por H de Fox (univariadas y bivariadas)."""
    terms = outage_exact_terms(s, config)
    return float(sum(terms[k] for k in ("rf", "uwo_exponential", "uwo_gg", "cross_exponential", "cross_gg")))


def outage_quadrature(s: Scenario) -> float:
    """Oráculo: integral de la PDF extremo a extremo sobre [0, umbral]."""
    upper = s.threshold_snr
    points = _breakpoints(s, upper)
    value, _ = integrate.quad(lambda g: float(e2e_pdf(s, g)), 0.0, upper, points=points or None,
                              limit=QUADRATURE_LIMIT, epsabs=0.0, epsrel=QUADRATURE_REL_TOL)
    return float(value)


# ============================================================================
# ASINTÓTICO
# ============================================================================

TERM_NAMES = ("uwo_exponential", "uwo_gg", "rf")
ASYMPTOTIC_CONSTANTS = ("leading", "tabulated")


@dataclass(frozen=True)
class AsymptoticBreakdown:
    """
    Expansión de alta SNR: P_out ~ sum_i (Gc_i mean)^(-e_i).

    coding_gain es la ganancia efectiva del conjunto dominante,
    (sum_{i dominante} Gc_i^(-Gd))^(-1/Gd).
    """
    value: float
    terms: Dict[str, float]
    exponents: Dict[str, float]
    coding_gains: Dict[str, float]
    diversity_gain: float
    coding_gain: float
    dominating_terms: Tuple[str, ...]


def _coding_gains(s: Scenario, constants: str, psi2_scale: float) -> Dict[str, float]:
    uwo, rf = s.uwo, s.rf
    gamma_out = s.threshold_snr
    ac = uwo.a * uwo.c
    half_am = 0.5 * rf.alpha * rf.mu
    if constants == "leading":
        # Coeficientes exactos de las expansiones de primer orden de cada CDF
        psi1 = uwo.b * math.exp((special.gammaln(uwo.a + 1.0) - math.log1p(-uwo.w)) / ac)
        psi2 = math.exp((special.gammaln(rf.mu + 1.0) - rf.mu * math.log(rf.mu)) / half_am)
    elif constants == "tabulated":
        psi1 = uwo.b * math.gamma(uwo.a + 1.0) / (1.0 - uwo.w)
        psi2 = (rf.mu * math.gamma(rf.mu)) ** (-1.0 / half_am)
    else:
        raise DomainError(f"Constantes desconocidas: {constants} (válidas: {ASYMPTOTIC_CONSTANTS})")
    return {
        "uwo_exponential": uwo.lam / (uwo.w * gamma_out),
        "uwo_gg": psi1 / gamma_out,
        "rf": psi2_scale * psi2 / gamma_out,
    }


def outage_asymptotic(s: Scenario, constants: str = "leading", psi2_scale: float = 1.0) -> AsymptoticBreakdown:
    """
    Outage asintótica con SNR media común en ambos saltos.

    Args:
        s: Escenario i.i.d. (misma SNR media en UWO y RF)
        constants: "leading" (coeficientes exactos de primer orden) o "tabulated"
            (expresiones de Psi_1 y Psi_2 tal como se tabulan habitualmente;
            coinciden con las exactas cuando a c = 1 y mu = 1)
        psi2_scale: Factor aplicado a Psi_2 (control negativo)

    Raises:
        NonIdenticalSnrError: si las SNR medias difieren
    """
    if not s.is_iid:
        raise NonIdenticalSnrError(
            f"La expansión asintótica requiere SNR medias iguales "
            f"(UWO={s.uwo.mean_snr:g}, RF={s.rf.mean_snr:g})"
        )
    mean = s.uwo.mean_snr
    exponents = {
        "uwo_exponential": 1.0,
        "uwo_gg": s.uwo.a * s.uwo.c,
        "rf": 0.5 * s.rf.alpha * s.rf.mu,
    }
    gains = _coding_gains(s, constants, psi2_scale)
    terms = {name: math.exp(-exponents[name] * math.log(gains[name] * mean)) for name in TERM_NAMES}

    diversity = min(exponents.values())
    dominating = tuple(name for name in TERM_NAMES
                       if exponents[name] <= diversity * (1.0 + DOMINANCE_TIE_TOLERANCE))
    effective = sum(gains[name] ** (-diversity) for name in dominating) ** (-1.0 / diversity)
    return AsymptoticBreakdown(
        value=float(sum(terms[name] for name in TERM_NAMES)),
        terms=terms,
        exponents=exponents,
        coding_gains=gains,
        diversity_gain=diversity,
        coding_gain=effective,
        dominating_terms=dominating,
    )


def outage_asymptotic_value(s: Scenario, constants: str = "leading") -> float:
    return outage_asymptotic(s, constants).value


# ============================================================================
# ASEP
# ============================================================================

def _asep_prefactor(m: ModulationParams) -> float:
    return m.eta / (2.0 * math.sqrt(math.pi))


def asep_hop_uwo_terms(p: EggParams, m: ModulationParams, config: Optional[ContourConfig] = None) -> Tuple[float, float]:
    """(componente exponencial, componente GG) de la ASEP del salto UWO, sin el prefactor eta/(2 sqrt(pi))."""
    exp_term = p.w * fox_h(_asep_kernel(1.0, 1.0), None, config,
                           log_z=-_log(m.beta * p.lam * p.mean_snr))
    gg_spec, gg_pref = _asep_kernel(p.a, p.c).with_argument_power(p.c)
    gg_term = (1.0 - p.w) * _gamma_norm(p.a) * gg_pref * fox_h(
        gg_spec, None, config, log_z=-_log(m.beta * p.b * p.mean_snr))
    return exp_term, gg_term


def asep_hop_rf_term(p: AlphaMuParams, m: ModulationParams, config: Optional[ContourConfig] = None) -> float:
    """ASEP del salto RF sin el prefactor eta/(2 sqrt(pi))."""
    log_z = _log(p.mu) - 0.5 * p.alpha * _log(m.beta * p.mean_snr)
    return _gamma_norm(p.mu) * fox_h(_asep_kernel(p.mu, 0.5 * p.alpha), None, config, log_z=log_z)


def asep_hop_uwo(p: EggParams, m: ModulationParams = BPSK, config: Optional[ContourConfig] = None) -> float:
    """ASEP del salto UWO en forma cerrada (H de Fox)."""
    exp_term, gg_term = asep_hop_uwo_terms(p, m, config)
    return _asep_prefactor(m) * (exp_term + gg_term)


def asep_hop_rf(p: AlphaMuParams, m: ModulationParams = BPSK, config: Optional[ContourConfig] = None) -> float:
    """ASEP del salto RF en forma cerrada (H de Fox)."""
    return _asep_prefactor(m) * asep_hop_rf_term(p, m, config)


def asep_e2e(s: Scenario, config: Optional[ContourConfig] = None) -> float:
    """ASEP extremo a extremo: P1 + P2 - 2 P1 P2 (un error en cada salto se cancela)."""
    p1 = asep_hop_uwo(s.uwo, s.modulation, config)
    p2 = asep_hop_rf(s.rf, s.modulation, config)
    return p1 + p2 - 2.0 * p1 * p2


def asep_e2e_closed_form(s: Scenario, config: Optional[ContourConfig] = None) -> float:
    """
    Expresión ensamblada en un solo paso a partir de los tres términos H:
    K (A + B) + K C - 2 K^2 C (A + B), con K = eta / (2 sqrt(pi)).
    """
    k = _asep_prefactor(s.modulation)
    exp_term, gg_term = asep_hop_uwo_terms(s.uwo, s.modulation, config)
    rf_term = asep_hop_rf_term(s.rf, s.modulation, config)
    uwo_sum = exp_term + gg_term
    return k * uwo_sum + k * rf_term - 2.0 * k * k * rf_term * uwo_sum


def asep_hop_quadrature(cdf_fn: Callable[[float], float], m: ModulationParams = BPSK,
                        breakpoints: Sequence[float] = ()) -> float:
    """
    Oráculo: eta sqrt(beta) / (2 sqrt(pi)) * integral e^{-beta g} g^{-1/2} F(g) dg,
    con g = u^2 para quitar la singularidad del origen.
    """
    upper = math.sqrt(100.0 / m.beta)
    points = sorted({math.sqrt(b) for b in breakpoints if 0 < b < upper ** 2})

    def integrand(u: float) -> float:
        return math.exp(-m.beta * u * u) * float(cdf_fn(u * u))

    value, _ = integrate.quad(integrand, 0.0, upper, points=points or None, limit=QUADRATURE_LIMIT,
                              epsabs=0.0, epsrel=QUADRATURE_REL_TOL)
    return m.eta * math.sqrt(m.beta) / math.sqrt(math.pi) * value


_QUANTILE_PROBS = (1e-3, 1e-2, 0.1, 0.3, 0.5, 0.7, 0.9, 0.99, 0.999)


def _hop_breakpoints(uwo: Optional[EggParams] = None, rf: Optional[AlphaMuParams] = None) -> List[float]:
    points: List[float] = []
    if uwo is not None:
        points.extend(float(q) for q in egg_component_quantiles(uwo, _QUANTILE_PROBS))
    if rf is not None:
        points.extend(float(q) for q in np.atleast_1d(alpha_mu_quantile(rf, np.array(_QUANTILE_PROBS))))
    return [q for q in points if math.isfinite(q) and q > 0]


def _breakpoints(s: Scenario, upper: float) -> List[float]:
    return sorted({q for q in _hop_breakpoints(s.uwo, s.rf) if q < upper})


def asep_e2e_quadrature(s: Scenario) -> float:
    """ASEP extremo a extremo con cada salto integrado por cuadratura."""
    p1 = asep_hop_quadrature(lambda g: egg_cdf(s.uwo, g), s.modulation, _hop_breakpoints(uwo=s.uwo))
    p2 = asep_hop_quadrature(lambda g: alpha_mu_cdf(s.rf, g), s.modulation, _hop_breakpoints(rf=s.rf))
    return p1 + p2 - 2.0 * p1 * p2


def e2e_pdf_closed_form(s: Scenario, snr: float, config: Optional[ContourConfig] = None) -> float:
    """
    PDF extremo a extremo ensamblada con H de Fox: f_U + f_R - (f_U F_R + F_U f_R).

    Las densidades usan H^{1,2}_{2,3}[z | (0,1),(1,1); (nu,1),(0,1),(1,1)];
    en la componente GG el factor c multiplica fuera y la potencia c del
    argumento se absorbe en las escalas.
    """
    x = float(snr)
    if not (x > 0 and math.isfinite(x)):
        raise DomainError(f"La SNR debe ser positiva y finita, recibido {snr}")
    uwo, rf = s.uwo, s.rf
    lx = _log(x)
    rf_log = _log(rf.mu) + 0.5 * rf.alpha * (lx - _log(rf.mean_snr))
    exp_log = lx - _log(uwo.lam * uwo.mean_snr)
    gg_log = lx - _log(uwo.b * uwo.mean_snr)

    gg_pdf_spec, gg_pdf_pref = _pdf_kernel(uwo.a).with_argument_power(uwo.c)
    gg_cdf_spec, gg_cdf_pref = GHSpec.lower_gamma(uwo.a).with_argument_power(uwo.c)
    norm_rf = _gamma_norm(rf.mu)
    norm_gg = _gamma_norm(uwo.a)

    f_rf = 0.5 * rf.alpha * norm_rf / x * fox_h(_pdf_kernel(rf.mu), None, config, log_z=rf_log)
    f_uwo = (uwo.w / x * fox_h(_pdf_kernel(1.0), None, config, log_z=exp_log)
             + (1.0 - uwo.w) * uwo.c * norm_gg * gg_pdf_pref / x * fox_h(gg_pdf_spec, None, config, log_z=gg_log))
    cdf_rf = norm_rf * fox_h(GHSpec.lower_gamma(rf.mu), None, config, log_z=rf_log)
    cdf_uwo = (uwo.w * fox_h(GHSpec.lower_gamma(1.0), None, config, log_z=exp_log)
               + (1.0 - uwo.w) * norm_gg * gg_cdf_pref * fox_h(gg_cdf_spec, None, config, log_z=gg_log))
    return f_uwo + f_rf - (f_uwo * cdf_rf + cdf_uwo * f_rf)


# ============================================================================
# CAPACIDAD
# ============================================================================

def hop_capacity_rf(p: AlphaMuParams, config: Optional[ContourConfig] = None) -> float:
    """Capacidad ergódica de un salto alpha-mu (bits/s/Hz)."""
    log_z = _log(p.mean_snr) - 2.0 / p.alpha * _log(p.mu)
    nats = _gamma_norm(p.mu) * fox_h(_capacity_kernel((1.0 - p.mu, 2.0 / p.alpha)), None, config, log_z=log_z)
    return nats / math.log(2.0)


def hop_capacity_uwo(p: EggParams, config: Optional[ContourConfig] = None) -> float:
    """Capacidad ergódica de un salto EGG (bits/s/Hz)."""
    exp_part = p.w * fox_h(_capacity_kernel((0.0, 1.0)), None, config, log_z=_log(p.lam * p.mean_snr))
    gg_part = (1.0 - p.w) * _gamma_norm(p.a) * fox_h(
        _capacity_kernel((1.0 - p.a, 1.0 / p.c)), None, config, log_z=_log(p.b * p.mean_snr))
    return (exp_part + gg_part) / math.log(2.0)


def capacity_terms(s: Scenario, config: Optional[ContourConfig] = None) -> Dict[str, float]:
    """
    Términos (en nats) de C ln 2 = C_U + C_R - X_U - X_R, donde
    X_U = E-integral de ln(1+g) f_U(g) F_R(g) y X_R la de ln(1+g) F_U(g) f_R(g).
    Cada X se separa en componente exponencial y GG del salto UWO.
    """
    if not math.isclose(s.rf.alpha, 2.0, rel_tol=0.0, abs_tol=1e-12):
        raise UnsupportedAlphaError(f"La capacidad en forma cerrada requiere alpha = 2 (alpha = {s.rf.alpha:g})")
    uwo, rf = s.uwo, s.rf
    ln2 = math.log(2.0)
    log_exp = -_log(uwo.lam * uwo.mean_snr)
    log_gg = -_log(uwo.b * uwo.mean_snr)
    log_rf = _log(rf.mu) - _log(rf.mean_snr)
    norm_rf = _gamma_norm(rf.mu)
    norm_gg = _gamma_norm(uwo.a)

    def cross(inner_x: GHSpec, inner_y: GHSpec, power: float, log_x: float) -> float:
        # Potencia del argumento ya absorbida: el acople externo queda con coeficientes unitarios
        scaled_x, pref = inner_x.with_argument_power(power)
        spec = BivariateGHSpec(scaled_x, inner_y, **CAPACITY_OUTER)
        return pref * fox_h_bivariate(spec, None, None, config, log_x=log_x, log_y=log_rf)

    x_uwo_exp = uwo.w * norm_rf * cross(GHSpec.power_exponential(1.0), GHSpec.lower_gamma(rf.mu), 1.0, log_exp)
    x_uwo_gg = (1.0 - uwo.w) * uwo.c * norm_gg * norm_rf * cross(
        GHSpec.power_exponential(uwo.a), GHSpec.lower_gamma(rf.mu), uwo.c, log_gg)
    x_rf_exp = uwo.w * norm_rf * cross(GHSpec.lower_gamma(1.0), GHSpec.power_exponential(rf.mu), 1.0, log_exp)
    x_rf_gg = (1.0 - uwo.w) * norm_gg * norm_rf * cross(
        GHSpec.lower_gamma(uwo.a), GHSpec.power_exponential(rf.mu), uwo.c, log_gg)

    return {
        "hop_uwo": hop_capacity_uwo(uwo, config) * ln2,
        "hop_rf": hop_capacity_rf(rf, config) * ln2,
        "cross_uwo_exponential": x_uwo_exp,
        "cross_uwo_gg": x_uwo_gg,
        "cross_rf_exponential": x_rf_exp,
        "cross_rf_gg": x_rf_gg,
    }


def capacity_closed_form(s: Scenario, half_duplex: bool = False, config: Optional[ContourConfig] = None) -> float:
    """
    Capacidad ergódica extremo a extremo (bits/s/Hz) en forma cerrada.

    Args:
        half_duplex: aplica el factor 1/2 de las dos ranuras temporales

    Raises:
        UnsupportedAlphaError: si alpha != 2
    """
    t = capacity_terms(s, config)
    nats = (t["hop_uwo"] + t["hop_rf"]
            - t["cross_uwo_exponential"] - t["cross_uwo_gg"]
            - t["cross_rf_exponential"] - t["cross_rf_gg"])
    bits = nats / math.log(2.0)
    return 0.5 * bits if half_duplex else bits


def _capacity_upper_limit(s: Scenario, tail_mass: float) -> float:
    """Límite superior U con supervivencia extremo a extremo <= tail_mass."""
    rf_limit = float(alpha_mu_quantile(s.rf, 1.0 - tail_mass))
    uwo_limit = float(np.max(egg_component_quantiles(s.uwo, [1.0 - tail_mass])))
    return min(rf_limit, uwo_limit)


def capacity_quadrature(s: Scenario, half_duplex: bool = False,
                        tail_mass: float = CAPACITY_TAIL_MASS) -> float:
    """Oráculo: integral de log2(1+g) f_e2e(g) sobre [0, U]."""
    upper = _capacity_upper_limit(s, tail_mass)
    points = _breakpoints(s, upper)
    value, _ = integrate.quad(lambda g: math.log2(1.0 + g) * float(e2e_pdf(s, g)), 0.0, upper,
                              points=points or None, limit=QUADRATURE_LIMIT,
                              epsabs=1e-13, epsrel=QUADRATURE_REL_TOL)
    return 0.5 * value if half_duplex else float(value)


# ============================================================================
# CURVAS
# ============================================================================

@dataclass(frozen=True)
class MetricCurve:
    """Curva de una métrica frente a la SNR media (en dB, solo para presentación)."""
    metric: str
    method: str
    series: str
    mean_snr_db: Tuple[float, ...]
    values: Tuple[float, ...]
    stderr: Optional[Tuple[float, ...]] = None
    meta: Dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if self.metric not in METRICS:
            raise DomainError(f"Métrica desconocida: {self.metric}")
        if self.method not in METHODS:
            raise DomainError(f"Método desconocido: {self.method}")
        if len(self.mean_snr_db) != len(self.values):
            raise DomainError("mean_snr_db y values deben tener la misma longitud")
        if (self.stderr is not None) != (self.method == "monte-carlo"):
            raise DomainError("stderr existe si y solo si el método es monte-carlo")
        if self.stderr is not None and len(self.stderr) != len(self.values):
            raise DomainError("stderr y values deben tener la misma longitud")


def evaluate_point(metric: str, method: str, s: Scenario, half_duplex: bool = False) -> float:
    """
    Valor determinista de una métrica en un escenario (todo excepto Monte-Carlo).

    Raises:
        DomainError: combinación métrica/método no soportada
        UnsupportedAlphaError, NonIdenticalSnrError: según el método
    """
    if method not in METHODS_BY_METRIC.get(metric, ()):
        raise DomainError(f"El método '{method}' no aplica a la métrica '{metric}'")
    if metric == "outage":
        if method == "closed-form":
            return outage_exact(s)
        if method == "asymptotic":
            return outage_asymptotic_value(s)
        if method == "quadrature":
            return outage_quadrature(s)
    elif metric == "asep":
        if method == "closed-form":
            return asep_e2e(s)
        if method == "quadrature":
            return asep_e2e_quadrature(s)
    elif metric == "capacity":
        if method == "closed-form":
            return capacity_closed_form(s, half_duplex)
        if method == "quadrature":
            return capacity_quadrature(s, half_duplex)
    raise DomainError(f"El método '{method}' se evalúa por simulación, no con evaluate_point")


def evaluate_curve(metric: str, method: str, scenarios: Sequence[Scenario], snr_db: Sequence[float],
                   series: str = "", half_duplex: bool = False, workers: int = 1,
                   sim_config=None, verbose: bool = False) -> MetricCurve:
    """
    Evalúa una métrica sobre una rejilla de escenarios (uno por punto de SNR).

    Los escenarios ya llevan las SNR medias lineales; snr_db solo etiqueta
    los puntos. Con workers > 1 los puntos deterministas se reparten entre
    procesos; el orden de salida es siempre el de la rejilla.

    Args:
        sim_config: SimConfig para method="monte-carlo" (None = valores por defecto)
    """
    if len(scenarios) != len(snr_db) or not scenarios:
        raise DomainError("La rejilla de SNR no puede estar vacía y debe tener un escenario por punto")
    if method not in METHODS_BY_METRIC.get(metric, ()):
        raise DomainError(f"El método '{method}' no aplica a la métrica '{metric}'")

    stderr = None
    if method == "monte-carlo":
        from montecarlo import SimConfig, simulate
        cfg = sim_config or SimConfig()
        estimates = [simulate(metric, s, cfg, half_duplex, verbose=verbose) for s in scenarios]
        values = tuple(e.value for e in estimates)
        stderr = tuple(e.stderr for e in estimates)
    elif workers > 1 and len(scenarios) > 1:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            values = tuple(executor.map(partial(evaluate_point, metric, method, half_duplex=half_duplex), scenarios))
    else:
        values = tuple(evaluate_point(metric, method, s, half_duplex) for s in scenarios)

    first = scenarios[0]
    meta = {
        "uwo": f"a={first.uwo.a:g}, b={first.uwo.b:g}, c={first.uwo.c:g}, lambda={first.uwo.lam:g}, w={first.uwo.w:g}",
        "rf": f"alpha={first.rf.alpha:g}, mu={first.rf.mu:g}",
        "threshold_snr": f"{first.threshold_snr:.17g}",
    }
    return MetricCurve(metric, method, series or metric, tuple(float(g) for g in snr_db),
                       tuple(float(v) for v in values), stderr, meta)
