"""
Funciones especiales: log-gamma compleja, gamma incompleta regularizada,
H de Fox univariada y H de Fox bivariada (EGBMGF) por integración numérica
de contornos de Mellin-Barnes.

Convención del núcleo univariado, con parámetros superiores (a_j, A_j) y
parámetros inferiores (b_j, B_j):

    Theta(s) = prod_{j<m} Gamma(b_j + B_j s) * prod_{j<n} Gamma(1 - a_j - A_j s)
               / ( prod_{j>=m} Gamma(1 - b_j - B_j s) * prod_{j>=n} Gamma(a_j + A_j s) )

    H(z) = (1 / 2 pi i) * integral sobre Re(s) = sigma de Theta(s) z^(-s) ds

El contorno es una recta vertical que separa los polos izquierdos
-(b_j + k)/B_j de los polos derechos (1 - a_j + k)/A_j. Sobre ella
H(z) = (1/pi) * integral_0^inf Re[Theta(sigma + i t) z^-(sigma + i t)] dt,
que se aproxima con la regla del trapecio (convergencia exponencial para
integrandos analíticos en una franja) duplicando nodos hasta que dos
estimaciones consecutivas coinciden.
"""
import math
from dataclasses import dataclass, replace
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import optimize, special

from config import (
    CONTOUR_CHUNK,
    CONTOUR_DECAY_BUDGET,
    DEFAULT_BIVARIATE_REL_TOL,
    DEFAULT_MAX_REFINEMENTS,
    DEFAULT_NODE_COUNT,
    DEFAULT_REL_TOL,
    MAX_BIVARIATE_POINTS,
    MAX_CONTOUR_NODES,
    SADDLE_MARGIN,
    SADDLE_SPAN,
)

UNDERFLOW_LOG = -700.0  # log x por debajo del cual e^x pierde precisión o se anula


# ============================================================================
# ERRORES
# ============================================================================

class SpecFunError(Exception):
    """Error base de las funciones especiales."""


class DomainError(SpecFunError, ValueError):
    """Argumento fuera del dominio de la función."""


class PoleError(DomainError):
    """Argumento sobre un polo de Gamma."""


class ContourError(SpecFunError):
    """No existe un contorno vertical válido (polos solapados o integrando divergente)."""


class ConvergenceError(SpecFunError):
    """La integración numérica no alcanzó la tolerancia pedida."""

    def __init__(self, message: str, last: Optional[float] = None, previous: Optional[float] = None):
        super().__init__(message)
        self.last = last
        self.previous = previous


# ============================================================================
# GAMMA
# ============================================================================

def log_gamma_complex(z: complex) -> complex:
    """
    Logaritmo principal de Gamma para argumento complejo.

    Args:
        z: Argumento complejo (no puede ser 0, -1, -2, ...)

    Returns:
        log Gamma(z) en la rama principal (continua fuera del eje real negativo)
    """
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise DomainError(f"Argumento no finito: {z}")
    if z.imag == 0.0 and z.real <= 0.0 and z.real == math.floor(z.real):
        raise PoleError(f"Gamma tiene un polo en {z.real:g}")
    return complex(special.loggamma(z))


def reg_lower_incomplete_gamma(a, x):
    """
    Gamma incompleta inferior regularizada P(a, x) = gamma(a, x) / Gamma(a).

    Acepta escalares o arrays; x puede ser +inf (devuelve 1).
    """
    a_arr = np.asarray(a, dtype=float)
    x_arr = np.asarray(x, dtype=float)
    if np.any(~(a_arr > 0)) or np.any(~np.isfinite(a_arr)):
        raise DomainError(f"P(a, x) requiere a > 0 finito (a={a})")
    if np.any(np.isnan(x_arr)) or np.any(x_arr < 0):
        raise DomainError(f"P(a, x) requiere x >= 0 (x={x})")
    result = special.gammainc(a_arr, x_arr)
    return float(result) if np.ndim(result) == 0 else result


def reg_upper_incomplete_gamma(a, x):
    """Q(a, x) = 1 - P(a, x), calculada directamente para no perder la cola."""
    a_arr = np.asarray(a, dtype=float)
    x_arr = np.asarray(x, dtype=float)
    if np.any(~(a_arr > 0)) or np.any(~np.isfinite(a_arr)):
        raise DomainError(f"Q(a, x) requiere a > 0 finito (a={a})")
    if np.any(np.isnan(x_arr)) or np.any(x_arr < 0):
        raise DomainError(f"Q(a, x) requiere x >= 0 (x={x})")
    result = special.gammaincc(a_arr, x_arr)
    return float(result) if np.ndim(result) == 0 else result


def reg_lower_incomplete_gamma_log(a: float, log_x):
    """
    P(a, e^log_x) para argumentos que no caben en coma flotante.

    Cuando e^log_x se anula (log_x < UNDERFLOW_LOG) se usa el primer término
    de la serie, P ~ x^a / Gamma(a + 1), evaluado en logaritmos.
    """
    if not (a > 0 and math.isfinite(a)):
        raise DomainError(f"P(a, x) requiere a > 0 finito (a={a})")
    lx = np.asarray(log_x, dtype=float)
    with np.errstate(over="ignore", under="ignore"):
        direct = special.gammainc(a, np.exp(lx))
        series = np.exp(a * lx - special.gammaln(a + 1.0))
    result = np.where(lx < UNDERFLOW_LOG, series, direct)
    return float(result) if np.ndim(result) == 0 else result


def reg_upper_incomplete_gamma_log(a: float, log_x):
    """
    Q(a, e^log_x), complemento exacto de reg_lower_incomplete_gamma_log.

    Bajo UNDERFLOW_LOG, Q = 1 - x^a / Gamma(a + 1) vía expm1: con a del orden
    de 1e-2 ese término no es despreciable aunque x se anule.
    """
    if not (a > 0 and math.isfinite(a)):
        raise DomainError(f"Q(a, x) requiere a > 0 finito (a={a})")
    lx = np.asarray(log_x, dtype=float)
    with np.errstate(over="ignore", under="ignore"):
        direct = special.gammaincc(a, np.exp(lx))
        series = -np.expm1(a * lx - special.gammaln(a + 1.0))
    result = np.where(lx < UNDERFLOW_LOG, series, direct)
    return float(result) if np.ndim(result) == 0 else result


def _log_gamma(z: np.ndarray) -> np.ndarray:
    return special.loggamma(z)


def _log_rgamma(z: np.ndarray) -> np.ndarray:
    """log(1/Gamma(z)); en los ceros de 1/Gamma devuelve -inf."""
    with np.errstate(all="ignore"):
        out = -special.loggamma(z)
    bad = ~np.isfinite(out)
    if np.any(bad):
        out = np.where(bad, complex(-np.inf, 0.0), out)
    return out


# ============================================================================
# ESPECIFICACIONES
# ============================================================================

Pair = Tuple[float, float]
Triple = Tuple[float, float, float]


def _as_pairs(params, name: str) -> Tuple[Pair, ...]:
    pairs = []
    for item in params:
        if len(item) != 2:
            raise DomainError(f"{name}: cada parámetro debe ser (valor, escala), recibido {item!r}")
        value, scale = float(item[0]), float(item[1])
        if not (math.isfinite(value) and math.isfinite(scale)):
            raise DomainError(f"{name}: parámetro no finito {item!r}")
        if not scale > 0:
            raise DomainError(f"{name}: las escalas deben ser positivas, recibido {scale}")
        pairs.append((value, scale))
    return tuple(pairs)


@dataclass(frozen=True)
class GHSpec:
    """
    Parámetros de una H de Fox univariada H^{m,n}_{p,q}.

    upper_params son los p pares (a_j, A_j) y lower_params los q pares (b_j, B_j).
    Con todas las escalas iguales a 1 la función es una G de Meijer.
    """
    upper_params: Tuple[Pair, ...]
    lower_params: Tuple[Pair, ...]
    m: int
    n: int

    def __post_init__(self):
        object.__setattr__(self, "upper_params", _as_pairs(self.upper_params, "upper_params"))
        object.__setattr__(self, "lower_params", _as_pairs(self.lower_params, "lower_params"))
        if not 0 <= self.m <= len(self.lower_params):
            raise DomainError(f"m={self.m} fuera de [0, q={len(self.lower_params)}]")
        if not 0 <= self.n <= len(self.upper_params):
            raise DomainError(f"n={self.n} fuera de [0, p={len(self.upper_params)}]")
        lo, hi = self.pole_gap()
        if not lo < hi:
            raise ContourError(
                f"Los polos izquierdos (máx {lo:g}) y derechos (mín {hi:g}) se solapan: "
                "no hay recta vertical que los separe"
            )

    @classmethod
    def meijer(cls, upper: Sequence[float], lower: Sequence[float], m: int, n: int) -> "GHSpec":
        """G de Meijer como H de Fox con escalas unitarias."""
        return cls(tuple((a, 1.0) for a in upper), tuple((b, 1.0) for b in lower), m, n)

    @classmethod
    def lower_gamma(cls, nu: float) -> "GHSpec":
        """G^{1,1}_{1,2}[z | 1; nu, 0] = gamma(nu, z): núcleo de las CDF."""
        return cls.meijer([1.0], [nu, 0.0], 1, 1)

    @classmethod
    def upper_gamma(cls, nu: float) -> "GHSpec":
        """G^{2,0}_{1,2}[z | 1; nu, 0] = Gamma(nu, z): núcleo de las supervivencias."""
        return cls.meijer([1.0], [nu, 0.0], 2, 0)

    @classmethod
    def power_exponential(cls, nu: float) -> "GHSpec":
        """G^{1,0}_{0,1}[z | nu] = z^nu exp(-z): núcleo de las PDF."""
        return cls.meijer([], [nu], 1, 0)

    @property
    def p(self) -> int:
        return len(self.upper_params)

    @property
    def q(self) -> int:
        return len(self.lower_params)

    def pole_gap(self) -> Tuple[float, float]:
        """(polo izquierdo más a la derecha, polo derecho más a la izquierda)."""
        left = [-b / B for b, B in self.lower_params[:self.m]]
        right = [(1.0 - a) / A for a, A in self.upper_params[:self.n]]
        return (max(left) if left else -math.inf, min(right) if right else math.inf)

    def decay_rate(self) -> float:
        """Exponente delta: |Theta(sigma + i t)| decae como exp(-pi delta |t| / 2)."""
        num = sum(B for _, B in self.lower_params[:self.m]) + sum(A for _, A in self.upper_params[:self.n])
        den = sum(B for _, B in self.lower_params[self.m:]) + sum(A for _, A in self.upper_params[self.n:])
        return num - den

    def scales(self) -> List[float]:
        return [A for _, A in self.upper_params] + [B for _, B in self.lower_params]

    def log_kernel(self, s: np.ndarray) -> np.ndarray:
        """log Theta(s) evaluado elemento a elemento (s complejo)."""
        s = np.asarray(s, dtype=complex)
        out = np.zeros_like(s)
        for j, (b, B) in enumerate(self.lower_params):
            if j < self.m:
                out = out + _log_gamma(b + B * s)
            else:
                out = out + _log_rgamma(1.0 - b - B * s)
        for j, (a, A) in enumerate(self.upper_params):
            if j < self.n:
                out = out + _log_gamma(1.0 - a - A * s)
            else:
                out = out + _log_rgamma(a + A * s)
        return out

    def with_argument_power(self, c: float) -> Tuple["GHSpec", float]:
        """
        Absorbe una potencia del argumento: H[z^c | A, B] = (1/c) H[z | A/c, B/c].

        Returns:
            (spec reescalada, prefactor 1/c)
        """
        c = float(c)
        if not (c > 0 and math.isfinite(c)):
            raise DomainError(f"La potencia del argumento debe ser positiva y finita, recibido {c}")
        scaled = GHSpec(
            tuple((a, A / c) for a, A in self.upper_params),
            tuple((b, B / c) for b, B in self.lower_params),
            self.m,
            self.n,
        )
        return scaled, 1.0 / c


def _as_triples(params, name: str) -> Tuple[Triple, ...]:
    triples = []
    for item in params:
        if len(item) != 3:
            raise DomainError(f"{name}: cada factor externo debe ser (valor, coef_x, coef_y), recibido {item!r}")
        value, cx, cy = (float(v) for v in item)
        if not all(math.isfinite(v) for v in (value, cx, cy)):
            raise DomainError(f"{name}: factor externo no finito {item!r}")
        if cx < 0 or cy < 0 or cx + cy == 0:
            raise DomainError(f"{name}: los coeficientes de acople deben ser >= 0 y no ambos nulos, recibido {item!r}")
        triples.append((value, cx, cy))
    return tuple(triples)


@dataclass(frozen=True)
class BivariateGHSpec:
    """
    Parámetros de una H de Fox bivariada (EGBMGF).

    El bloque externo acopla las dos variables de integración (s, t) con la
    misma convención que el caso univariado:
      - outer_lower (b, B, B'): j < m0 aporta Gamma(b + B s + B' t) al numerador,
        el resto 1/Gamma(1 - b - B s - B' t);
      - outer_upper (a, A, A'): j < n0 aporta Gamma(1 - a - A s - A' t) al numerador,
        el resto 1/Gamma(a + A s + A' t).
    inner_x e inner_y son los núcleos univariados de cada variable.
    """
    inner_x: GHSpec
    inner_y: GHSpec
    outer_upper: Tuple[Triple, ...] = ()
    outer_lower: Tuple[Triple, ...] = ()
    m0: int = 0
    n0: int = 0

    def __post_init__(self):
        object.__setattr__(self, "outer_upper", _as_triples(self.outer_upper, "outer_upper"))
        object.__setattr__(self, "outer_lower", _as_triples(self.outer_lower, "outer_lower"))
        if not 0 <= self.m0 <= len(self.outer_lower):
            raise DomainError(f"m0={self.m0} fuera de [0, {len(self.outer_lower)}]")
        if not 0 <= self.n0 <= len(self.outer_upper):
            raise DomainError(f"n0={self.n0} fuera de [0, {len(self.outer_upper)}]")
        if self.has_outer:
            center, margin = _feasible_center(self)
            if margin <= 0:
                raise ContourError("No existe un par de rectas verticales que separe los polos del bloque externo")

    @property
    def outer_params(self) -> Tuple[Triple, ...]:
        return self.outer_upper + self.outer_lower

    @property
    def has_outer(self) -> bool:
        return bool(self.outer_upper or self.outer_lower)

    def constraints(self) -> List[Triple]:
        """Restricciones lineales k0 + kx sigma_x + ky sigma_y > 0 que debe cumplir el par de offsets."""
        rows: List[Triple] = []
        lo_x, hi_x = self.inner_x.pole_gap()
        lo_y, hi_y = self.inner_y.pole_gap()
        if math.isfinite(lo_x):
            rows.append((-lo_x, 1.0, 0.0))
        if math.isfinite(hi_x):
            rows.append((hi_x, -1.0, 0.0))
        if math.isfinite(lo_y):
            rows.append((-lo_y, 0.0, 1.0))
        if math.isfinite(hi_y):
            rows.append((hi_y, 0.0, -1.0))
        for b, B, Bp in self.outer_lower[:self.m0]:
            rows.append((b, B, Bp))
        for a, A, Ap in self.outer_upper[:self.n0]:
            rows.append((1.0 - a, -A, -Ap))
        return rows

    def log_outer(self, s: np.ndarray, t: np.ndarray) -> np.ndarray:
        s = np.asarray(s, dtype=complex)
        t = np.asarray(t, dtype=complex)
        out = np.zeros(np.broadcast(s, t).shape, dtype=complex)
        for j, (b, B, Bp) in enumerate(self.outer_lower):
            if j < self.m0:
                out = out + _log_gamma(b + B * s + Bp * t)
            else:
                out = out + _log_rgamma(1.0 - b - B * s - Bp * t)
        for j, (a, A, Ap) in enumerate(self.outer_upper):
            if j < self.n0:
                out = out + _log_gamma(1.0 - a - A * s - Ap * t)
            else:
                out = out + _log_rgamma(a + A * s + Ap * t)
        return out

    def decay_rate(self, theta: np.ndarray) -> np.ndarray:
        """Tasa de decaimiento direccional (sin el factor pi/2) en la dirección (cos theta, sin theta)."""
        ux, uy = np.cos(theta), np.sin(theta)
        rate = self.inner_x.decay_rate() * np.abs(ux) + self.inner_y.decay_rate() * np.abs(uy)
        for j, (_, B, Bp) in enumerate(self.outer_lower):
            sign = 1.0 if j < self.m0 else -1.0
            rate = rate + sign * np.abs(B * ux + Bp * uy)
        for j, (_, A, Ap) in enumerate(self.outer_upper):
            sign = 1.0 if j < self.n0 else -1.0
            rate = rate + sign * np.abs(A * ux + Ap * uy)
        return rate


# ============================================================================
# CONFIGURACIÓN Y RESULTADOS
# ============================================================================

OFFSET_RULES = ("saddle", "midpoint")


@dataclass(frozen=True)
class ContourConfig:
    """
    Parámetros de la integración de contorno.

    real_offset / real_offset_y: offsets fijos (None = automático según offset_rule).
    truncation_height: altura de truncamiento fija (None = automática).
    fast_path: usa las reducciones a gamma incompleta y la factorización exacta
    cuando la especificación lo permite.
    """
    real_offset: Optional[float] = None
    real_offset_y: Optional[float] = None
    truncation_height: Optional[float] = None
    node_count: int = DEFAULT_NODE_COUNT
    rel_tol: float = DEFAULT_REL_TOL
    max_refinements: int = DEFAULT_MAX_REFINEMENTS
    offset_rule: str = "saddle"
    fast_path: bool = True

    def __post_init__(self):
        if self.node_count < 16:
            raise DomainError(f"node_count debe ser >= 16, recibido {self.node_count}")
        if not (self.rel_tol > 0):
            raise DomainError(f"rel_tol debe ser positiva, recibido {self.rel_tol}")
        if self.max_refinements < 1:
            raise DomainError(f"max_refinements debe ser >= 1, recibido {self.max_refinements}")
        if self.truncation_height is not None and not self.truncation_height > 0:
            raise DomainError(f"truncation_height debe ser positiva, recibido {self.truncation_height}")
        if self.offset_rule not in OFFSET_RULES:
            raise DomainError(f"offset_rule desconocida: {self.offset_rule} (válidas: {OFFSET_RULES})")


DEFAULT_CONTOUR = ContourConfig()
DEFAULT_BIVARIATE_CONTOUR = ContourConfig(rel_tol=DEFAULT_BIVARIATE_REL_TOL)


@dataclass(frozen=True)
class ContourResult:
    """Valor de una evaluación junto con su diagnóstico."""
    value: float
    abs_error: float
    node_count: int
    refinements: int
    real_offset: Union[float, Tuple[float, float], None]
    truncation_height: Union[float, Tuple[float, float], None]
    method: str  # "contour", "reduction" o "factorized"


# ============================================================================
# UTILIDADES DE ARGUMENTO Y OFFSET
# ============================================================================

def _resolve_log_argument(z, log_z, name: str = "z") -> float:
    if (z is None) == (log_z is None):
        raise DomainError(f"Indique exactamente uno de {name} o log_{name}")
    if log_z is not None:
        value = float(log_z)
        if not math.isfinite(value):
            raise DomainError(f"log_{name} debe ser finito, recibido {log_z}")
        return value
    value = float(z)
    if not (value > 0 and math.isfinite(value)):
        raise DomainError(f"{name} debe ser real positivo y finito, recibido {z}")
    return math.log(value)


def _search_interval(lo: float, hi: float, unit: float) -> Tuple[float, float]:
    """Intervalo cerrado de búsqueda del offset dentro del hueco (lo, hi)."""
    span = SADDLE_SPAN * unit
    if math.isfinite(lo) and math.isfinite(hi):
        margin = SADDLE_MARGIN * (hi - lo)
        return lo + margin, hi - margin
    if math.isfinite(lo):
        return lo + SADDLE_MARGIN * unit, lo + span
    if math.isfinite(hi):
        return hi - span, hi - SADDLE_MARGIN * unit
    return -span, span


def _gap_midpoint(lo: float, hi: float) -> float:
    if math.isfinite(lo) and math.isfinite(hi):
        return 0.5 * (lo + hi)
    if math.isfinite(lo):
        return lo + 0.5
    if math.isfinite(hi):
        return hi - 0.5
    return 0.0


def _univariate_offset(spec: GHSpec, log_z: float, cfg: ContourConfig) -> float:
    lo, hi = spec.pole_gap()
    if cfg.real_offset is not None:
        sigma = float(cfg.real_offset)
        if not lo < sigma < hi:
            raise ContourError(f"real_offset={sigma} no separa los polos (hueco ({lo:g}, {hi:g}))")
        return sigma
    if cfg.offset_rule == "midpoint":
        return _gap_midpoint(lo, hi)

    unit = 1.0 / min(spec.scales()) if spec.scales() else 1.0
    left, right = _search_interval(lo, hi, unit)

    def objective(sigma: float) -> float:
        with np.errstate(all="ignore"):
            value = float(np.real(spec.log_kernel(np.array([sigma + 0j]))[0])) - sigma * log_z
        return value if math.isfinite(value) else 1e300

    # Barrido grueso y refinamiento acotado alrededor del mejor punto
    grid = np.linspace(left, right, 65)
    values = np.array([objective(g) for g in grid])
    k = int(np.argmin(values))
    a = grid[max(k - 1, 0)]
    b = grid[min(k + 1, len(grid) - 1)]
    res = optimize.minimize_scalar(objective, bounds=(a, b), method="bounded",
                                   options={"xatol": 1e-10 * max(1.0, abs(a), abs(b))})
    sigma = float(res.x) if objective(float(res.x)) <= values[k] else float(grid[k])
    return sigma


def _pole_distance(spec: GHSpec, sigma: float) -> float:
    lo, hi = spec.pole_gap()
    return min(sigma - lo, hi - sigma)


def _initial_step(distance: float, log_arg: float) -> float:
    """Paso del trapecio compatible con una franja de analiticidad de semiancho distance."""
    if not math.isfinite(distance):
        distance = 1.0
    h = 2.0 * math.pi * distance / (CONTOUR_DECAY_BUDGET + distance * abs(log_arg))
    return min(h, 0.25)


def _truncation_from_scan(logmag: np.ndarray, radii: np.ndarray, peak: float) -> float:
    significant = radii[logmag > peak - CONTOUR_DECAY_BUDGET]
    if significant.size == 0:
        return float(radii[1])
    return float(significant.max())


def _scan_radii(rate: float) -> np.ndarray:
    r_max = 4.0 * (CONTOUR_DECAY_BUDGET + 40.0) / rate + 50.0
    return np.unique(np.concatenate([np.linspace(0.0, 20.0, 401), np.geomspace(20.0, r_max, 600)]))


def _next_power_of_two(x: float) -> int:
    return 1 << max(0, int(math.ceil(math.log2(max(x, 1.0)))))


# ============================================================================
# REDUCCIONES CERRADAS
# ============================================================================

def _log_gamma_times(nu: float, prob: float) -> float:
    """log(Gamma(nu) * prob) sin desbordar Gamma."""
    if prob <= 0:
        return -math.inf
    return float(special.gammaln(nu)) + math.log(prob)


def _reduce_closed_form(spec: GHSpec, log_z: float) -> Optional[float]:
    """
    Reduce a gamma incompleta las formas con escala uniforme A:
    H[z | (1,A); (nu,A),(0,A)] con (m,n)=(1,1) o (2,0), y H[z | -; (nu,A)].
    """
    scales = set(spec.scales())
    if len(scales) != 1:
        return None
    A = scales.pop()
    lw = log_z / A
    with np.errstate(over="ignore"):
        w = float(np.exp(lw))
    shape = (spec.m, spec.n, spec.p, spec.q)

    if shape == (1, 0, 0, 1):
        nu = spec.lower_params[0][0]
        return math.exp(nu * lw - w) / A if math.isfinite(w) else 0.0

    if shape in ((1, 1, 1, 2), (2, 0, 1, 2)) and spec.upper_params[0][0] == 1.0:
        b0, b1 = spec.lower_params[0][0], spec.lower_params[1][0]
        if shape == (1, 1, 1, 2):
            if b1 != 0.0 or not b0 > 0:
                return None
            nu = b0
            if lw < UNDERFLOW_LOG:
                return math.exp(nu * lw - math.log(nu)) / A
            prob = float(special.gammainc(nu, w))
        else:
            if b1 == 0.0 and b0 > 0:
                nu = b0
            elif b0 == 0.0 and b1 > 0:
                nu = b1
            else:
                return None
            prob = float(special.gammaincc(nu, w))
        return math.exp(_log_gamma_times(nu, prob)) / A if prob > 0 else 0.0

    return None


# ============================================================================
# H DE FOX UNIVARIADA
# ============================================================================

def fox_h(spec: GHSpec, z: Optional[float] = None, config: Optional[ContourConfig] = None,
          *, log_z: Optional[float] = None) -> float:
    """
    H de Fox univariada.

    Args:
        spec: Parámetros de la función
        z: Argumento real positivo (o usar log_z para argumentos fuera de rango)
        config: Configuración del contorno (None = valores por defecto)
        log_z: Logaritmo del argumento

    Returns:
        Valor real de H(z)

    Raises:
        DomainError, ContourError, ConvergenceError
    """
    return fox_h_detailed(spec, z, config, log_z=log_z).value


def fox_h_detailed(spec: GHSpec, z: Optional[float] = None, config: Optional[ContourConfig] = None,
                   *, log_z: Optional[float] = None) -> ContourResult:
    """Igual que fox_h pero devuelve el diagnóstico completo de la evaluación."""
    lz = _resolve_log_argument(z, log_z)
    cfg = config or DEFAULT_CONTOUR
    if cfg.fast_path:
        reduced = _reduce_closed_form(spec, lz)
        if reduced is not None:
            return ContourResult(reduced, 0.0, 0, 0, None, None, "reduction")
    return _contour_univariate(spec, lz, cfg)


def _contour_univariate(spec: GHSpec, log_z: float, cfg: ContourConfig) -> ContourResult:
    rate = spec.decay_rate()
    if not rate > 0:
        raise ContourError(f"El integrando no decae sobre la recta vertical (delta={rate:g} <= 0)")

    sigma = _univariate_offset(spec, log_z, cfg)

    def log_integrand(t: np.ndarray) -> np.ndarray:
        s = sigma + 1j * np.asarray(t, dtype=float)
        with np.errstate(all="ignore"):
            return spec.log_kernel(s) - s * log_z

    shift = float(np.real(log_integrand(np.array([0.0]))[0]))
    if not math.isfinite(shift):
        raise ContourError(f"El integrando es singular en el offset sigma={sigma:g}")

    if cfg.truncation_height is not None:
        height = float(cfg.truncation_height)
    else:
        radii = _scan_radii(0.5 * math.pi * rate)
        logmag = np.real(log_integrand(radii))
        logmag = np.where(np.isfinite(logmag), logmag, -np.inf)
        height = 1.25 * _truncation_from_scan(logmag, radii, max(shift, float(logmag.max())))

    h0 = _initial_step(_pole_distance(spec, sigma), log_z)
    nodes = max(cfg.node_count, _next_power_of_two(height / h0))
    if nodes > MAX_CONTOUR_NODES:
        raise ConvergenceError(f"Se necesitan {nodes} nodos (límite {MAX_CONTOUR_NODES})")

    def weighted_sums(t: np.ndarray) -> Tuple[float, float]:
        total, total_abs = 0.0, 0.0
        for start in range(0, t.size, CONTOUR_CHUNK):
            chunk = t[start:start + CONTOUR_CHUNK]
            vals = np.exp(log_integrand(chunk) - shift)
            vals = np.where(np.isfinite(vals), vals, 0.0)
            total += float(np.sum(vals.real))
            total_abs += float(np.sum(np.abs(vals)))
        return total, total_abs

    h = height / nodes
    grid = np.arange(nodes + 1) * h
    raw, raw_abs = weighted_sums(grid)
    ends = np.exp(log_integrand(np.array([0.0, height])) - shift).real
    ends = np.where(np.isfinite(ends), ends, 0.0)
    acc = raw - 0.5 * float(ends[0]) - 0.5 * float(ends[1])
    previous = h * acc
    older = math.nan

    eps = np.finfo(float).eps
    scale = math.exp(shift) / math.pi if shift < 700 else math.inf
    for refinement in range(1, cfg.max_refinements + 1):
        if 2 * nodes > MAX_CONTOUR_NODES:
            break
        h *= 0.5
        odd = (2 * np.arange(nodes) + 1) * h
        extra, extra_abs = weighted_sums(odd)
        acc += extra
        raw_abs += extra_abs
        nodes *= 2
        current = h * acc
        diff = abs(current - previous)
        floor = 32.0 * eps * h * raw_abs
        if diff <= cfg.rel_tol * abs(current) + floor:
            value = scale * current
            if not math.isfinite(value):
                raise ConvergenceError("El valor de H desborda el rango de coma flotante")
            return ContourResult(value, scale * max(diff, floor), nodes, refinement, sigma, height, "contour")
        older, previous = previous, current

    raise ConvergenceError(
        f"Contorno sin converger tras {cfg.max_refinements} duplicaciones ({nodes} nodos)",
        last=scale * previous, previous=scale * older,
    )


# ============================================================================
# H DE FOX BIVARIADA
# ============================================================================

def _normalized_margins(rows: Sequence[Triple], sx: np.ndarray, sy: np.ndarray) -> np.ndarray:
    margins = []
    for k0, kx, ky in rows:
        norm = math.hypot(kx, ky)
        margins.append((k0 + kx * sx + ky * sy) / norm)
    return np.min(np.stack(margins), axis=0) if margins else np.full(np.shape(sx), np.inf)


def _offset_box(spec: BivariateGHSpec) -> Tuple[Tuple[float, float], Tuple[float, float]]:
    boxes = []
    for inner in (spec.inner_x, spec.inner_y):
        lo, hi = inner.pole_gap()
        unit = 1.0 / min(inner.scales()) if inner.scales() else 1.0
        span = SADDLE_SPAN * unit
        if not math.isfinite(lo) and not math.isfinite(hi):
            boxes.append((-span, span))
        elif not math.isfinite(lo):
            boxes.append((hi - span, hi))
        elif not math.isfinite(hi):
            boxes.append((lo, lo + span))
        else:
            boxes.append((lo, hi))
    return boxes[0], boxes[1]


def _margin_system(rows: Sequence[Triple]) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Restricciones k0 + kx sx + ky sy >= r |k| como A_ub [sx, sy] + norm r <= b_ub."""
    a_ub = np.array([[-kx, -ky] for _, kx, ky in rows])
    norms = np.array([math.hypot(kx, ky) for _, kx, ky in rows])
    b_ub = np.array([k0 for k0, _, _ in rows])
    return a_ub, norms, b_ub


def _feasible_center(spec: BivariateGHSpec) -> Tuple[Tuple[float, float], float]:
    """
    Centro de Chebyshev (programa lineal) del polígono de offsets válidos.
    El margen se satura en 1/2: en huecos no acotados basta con alejarse medio polo.
    """
    (x0, x1), (y0, y1) = _offset_box(spec)
    rows = spec.constraints()
    if not rows:
        return (0.5 * (x0 + x1), 0.5 * (y0 + y1)), math.inf
    a_ub, norms, b_ub = _margin_system(rows)
    res = optimize.linprog(
        c=[0.0, 0.0, -1.0],
        A_ub=np.column_stack([a_ub, norms]),
        b_ub=b_ub,
        bounds=[(x0, x1), (y0, y1), (None, 0.5)],
        method="highs",
    )
    if not res.success:
        return (math.nan, math.nan), -math.inf
    sx, sy, _ = res.x
    return (float(sx), float(sy)), float(_normalized_margins(rows, sx, sy))


def _feasible_box(spec: BivariateGHSpec, min_margin: float) -> Tuple[Tuple[float, float], Tuple[float, float]]:
    """Caja que envuelve los offsets con margen normalizado >= min_margin."""
    (x0, x1), (y0, y1) = _offset_box(spec)
    rows = spec.constraints()
    if not rows:
        return (x0, x1), (y0, y1)
    a_ub, norms, b_ub = _margin_system(rows)
    limits = []
    for direction in ([1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]):
        res = optimize.linprog(c=direction, A_ub=a_ub, b_ub=b_ub - min_margin * norms,
                               bounds=[(x0, x1), (y0, y1)], method="highs")
        limits.append(res.x if res.success else None)
    if any(v is None for v in limits):
        return (x0, x1), (y0, y1)
    return (limits[0][0], limits[1][0]), (limits[2][1], limits[3][1])


def _bivariate_offsets(spec: BivariateGHSpec, log_x: float, log_y: float,
                       cfg: ContourConfig) -> Tuple[float, float]:
    rows = spec.constraints()
    if cfg.real_offset is not None and cfg.real_offset_y is not None:
        pair = (float(cfg.real_offset), float(cfg.real_offset_y))
        if float(_normalized_margins(rows, pair[0], pair[1])) <= 0:
            raise ContourError(f"El par de offsets {pair} no separa los polos")
        return pair

    center, margin = _feasible_center(spec)
    if margin <= 0:
        raise ContourError("No existe un par de rectas verticales que separe los polos")
    if cfg.offset_rule == "midpoint":
        return center

    min_margin = SADDLE_MARGIN * min(margin, 0.5)

    def log_magnitude(vx: np.ndarray, vy: np.ndarray) -> np.ndarray:
        s = np.asarray(vx, dtype=complex)
        t = np.asarray(vy, dtype=complex)
        with np.errstate(all="ignore"):
            value = np.real(spec.inner_x.log_kernel(s) + spec.inner_y.log_kernel(t)
                            + spec.log_outer(s, t) - s * log_x - t * log_y)
        feasible = _normalized_margins(rows, np.real(s), np.real(t)) >= min_margin
        return np.where(feasible & np.isfinite(value), value, 1e300)

    def objective(v: np.ndarray) -> float:
        return float(log_magnitude(np.array([v[0]]), np.array([v[1]]))[0])

    (x0, x1), (y0, y1) = _feasible_box(spec, min_margin)
    gx, gy = np.meshgrid(np.linspace(x0, x1, 41), np.linspace(y0, y1, 41), indexing="ij")
    values = log_magnitude(gx.ravel(), gy.ravel())
    k = int(np.argmin(values))
    best, best_value = np.array(center), objective(np.array(center))
    if values[k] < best_value:
        best, best_value = np.array([gx.ravel()[k], gy.ravel()[k]]), float(values[k])
    res = optimize.minimize(objective, best, method="Nelder-Mead",
                            options={"xatol": 1e-9, "fatol": 1e-12, "maxiter": 4000})
    if res.fun < best_value:
        best = res.x
    return float(best[0]), float(best[1])


def _axis_distances(rows: Sequence[Triple], sx: float, sy: float) -> Tuple[float, float]:
    dx, dy = math.inf, math.inf
    for k0, kx, ky in rows:
        slack = k0 + kx * sx + ky * sy
        if kx != 0:
            dx = min(dx, slack / abs(kx))
        if ky != 0:
            dy = min(dy, slack / abs(ky))
    return dx, dy


def fox_h_bivariate(spec: BivariateGHSpec, x: Optional[float] = None, y: Optional[float] = None,
                    config: Optional[ContourConfig] = None, *, log_x: Optional[float] = None,
                    log_y: Optional[float] = None) -> float:
    """
    H de Fox bivariada (EGBMGF) en (x, y).

    Con bloque externo vacío el valor es exactamente el producto de las dos
    H univariadas.
    """
    return fox_h_bivariate_detailed(spec, x, y, config, log_x=log_x, log_y=log_y).value


def fox_h_bivariate_detailed(spec: BivariateGHSpec, x: Optional[float] = None, y: Optional[float] = None,
                             config: Optional[ContourConfig] = None, *, log_x: Optional[float] = None,
                             log_y: Optional[float] = None) -> ContourResult:
    lx = _resolve_log_argument(x, log_x, "x")
    ly = _resolve_log_argument(y, log_y, "y")
    cfg = config or DEFAULT_BIVARIATE_CONTOUR

    if not spec.has_outer and cfg.fast_path:
        # La suma tensorial se separa en el producto de las dos sumas univariadas
        cfg_x = replace(cfg, real_offset_y=None)
        cfg_y = replace(cfg, real_offset=cfg.real_offset_y, real_offset_y=None)
        rx = fox_h_detailed(spec.inner_x, None, cfg_x, log_z=lx)
        ry = fox_h_detailed(spec.inner_y, None, cfg_y, log_z=ly)
        value = rx.value * ry.value
        error = abs(rx.value) * ry.abs_error + abs(ry.value) * rx.abs_error
        return ContourResult(value, error, rx.node_count + ry.node_count,
                             max(rx.refinements, ry.refinements),
                             (rx.real_offset, ry.real_offset),
                             (rx.truncation_height, ry.truncation_height), "factorized")
    return _contour_bivariate(spec, lx, ly, cfg)


def _contour_bivariate(spec: BivariateGHSpec, log_x: float, log_y: float, cfg: ContourConfig) -> ContourResult:
    theta = np.linspace(-0.5 * math.pi, 0.5 * math.pi, 3601)
    rates = spec.decay_rate(theta)
    min_rate = float(rates.min())
    if not min_rate > 0:
        raise ContourError(f"El integrando bivariado no decae en todas las direcciones (tasa mínima {min_rate:g})")

    sx, sy = _bivariate_offsets(spec, log_x, log_y, cfg)

    def log_integrand(t1: np.ndarray, t2: np.ndarray) -> np.ndarray:
        s = sx + 1j * np.asarray(t1, dtype=float)
        t = sy + 1j * np.asarray(t2, dtype=float)
        with np.errstate(all="ignore"):
            return (spec.inner_x.log_kernel(s) + spec.inner_y.log_kernel(t)
                    + spec.log_outer(s, t) - s * log_x - t * log_y)

    shift = float(np.real(log_integrand(np.array([0.0]), np.array([0.0]))[0]))
    if not math.isfinite(shift):
        raise ContourError(f"El integrando es singular en los offsets ({sx:g}, {sy:g})")

    if cfg.truncation_height is not None:
        height_x = height_y = float(cfg.truncation_height)
    else:
        radii = _scan_radii(0.5 * math.pi * min_rate)
        rays = np.linspace(-0.5 * math.pi, 0.5 * math.pi, 181)
        height_x, height_y = 1.0, 1.0
        for ray in rays:
            logmag = np.real(log_integrand(radii * math.cos(ray), radii * math.sin(ray)))
            logmag = np.where(np.isfinite(logmag), logmag, -np.inf)
            reach = _truncation_from_scan(logmag, radii, max(shift, float(logmag.max())))
            height_x = max(height_x, reach * abs(math.cos(ray)))
            height_y = max(height_y, reach * abs(math.sin(ray)))
        height_x *= 1.25
        height_y *= 1.25

    dx, dy = _axis_distances(spec.constraints(), sx, sy)
    nx = max(cfg.node_count, _next_power_of_two(height_x / _initial_step(dx, log_x)))
    ny = max(cfg.node_count, _next_power_of_two(height_y / _initial_step(dy, log_y)))

    def tensor_sum(n1: int, n2: int) -> Tuple[float, float]:
        h1, h2 = height_x / n1, height_y / n2
        t1 = np.arange(n1 + 1) * h1
        t2 = np.arange(-n2, n2 + 1) * h2
        w1 = np.ones_like(t1)
        w1[0] = w1[-1] = 0.5
        w2 = np.ones_like(t2)
        w2[0] = w2[-1] = 0.5
        s = sx + 1j * t1
        t = sy + 1j * t2
        with np.errstate(all="ignore"):
            lx_vec = spec.inner_x.log_kernel(s) - s * log_x
            ly_vec = spec.inner_y.log_kernel(t) - t * log_y
        rows = max(1, CONTOUR_CHUNK // t2.size)
        total, total_abs = 0.0, 0.0
        for start in range(0, t1.size, rows):
            block = slice(start, start + rows)
            with np.errstate(all="ignore"):
                logv = (lx_vec[block, None] + ly_vec[None, :]
                        + spec.log_outer(s[block, None], t[None, :]) - shift)
                vals = np.exp(logv)
            vals = np.where(np.isfinite(vals), vals, 0.0)
            weights = w1[block, None] * w2[None, :]
            total += float(np.sum(weights * vals.real))
            total_abs += float(np.sum(weights * np.abs(vals)))
        return h1 * h2 * total, h1 * h2 * total_abs

    if (nx + 1) * (2 * ny + 1) > MAX_BIVARIATE_POINTS:
        raise ConvergenceError(f"La malla bivariada necesita {(nx + 1) * (2 * ny + 1)} puntos")

    previous, _ = tensor_sum(nx, ny)
    older = math.nan
    eps = np.finfo(float).eps
    scale = math.exp(shift) / (2.0 * math.pi ** 2) if shift < 700 else math.inf
    for refinement in range(1, cfg.max_refinements + 1):
        if (2 * nx + 1) * (4 * ny + 1) > MAX_BIVARIATE_POINTS:
            break
        nx, ny = 2 * nx, 2 * ny
        current, l1 = tensor_sum(nx, ny)
        diff = abs(current - previous)
        floor = 64.0 * eps * l1
        if diff <= cfg.rel_tol * abs(current) + floor:
            value = scale * current
            if not math.isfinite(value):
                raise ConvergenceError("El valor de la H bivariada desborda el rango de coma flotante")
            return ContourResult(value, scale * max(diff, floor), (nx + 1) * (2 * ny + 1), refinement,
                                 (sx, sy), (height_x, height_y), "contour")
        older, previous = previous, current

    raise ConvergenceError(
        f"Contorno bivariado sin converger ({nx}x{ny} nodos por semieje)",
        last=scale * previous, previous=scale * older,
    )

