"""
Gates de calidad numérica del toolkit.

Cada gate contrasta una forma cerrada con un oráculo independiente
(reducción a gamma incompleta, factorización, cuadratura, Monte-Carlo)
y registra el error medido frente a su tolerancia.
"""
import math
import time
from datetime import datetime
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate, special

from channels import (
    AlphaMuParams,
    alpha_mu_cdf,
    alpha_mu_preset,
    alpha_mu_sample,
    egg_cdf,
    egg_sample,
    get_water_scenario,
    scenario_params,
)
from config import QUADRATURE_LIMIT, WATER_SCENARIOS
from metrics import (
    BPSK,
    Scenario,
    _capacity_upper_limit,
    _breakpoints,
    asep_e2e,
    asep_e2e_closed_form,
    asep_e2e_quadrature,
    asep_hop_rf,
    capacity_closed_form,
    capacity_quadrature,
    e2e_cdf,
    e2e_pdf,
    e2e_pdf_closed_form,
    e2e_survival,
    outage_asymptotic,
    outage_exact,
    outage_exact_terms,
    outage_quadrature,
)
from montecarlo import SimConfig, block_stream, ks_distance, simulate_asep, simulate_capacity, simulate_outage
from specfun import (
    BivariateGHSpec,
    ContourConfig,
    DomainError,
    GHSpec,
    fox_h,
    fox_h_bivariate,
    reg_lower_incomplete_gamma_log,
)

FAULTS = ("psi2",)
PSI2_FAULT_SCALE = 2.0

GENERIC_CONTOUR = ContourConfig(fast_path=False)
GENERIC_BIVARIATE_CONTOUR = ContourConfig(fast_path=False, rel_tol=1e-8)

ALL_ROWS = tuple(WATER_SCENARIOS)
QUICK_ROWS = (("salty", "weak"), ("fresh", "severe"))


def _db(x: float) -> float:
    return 10.0 ** (x / 10.0)


def _relative(value: float, reference: float) -> float:
    if reference == 0:
        return abs(value)
    return abs(value - reference) / abs(reference)


def make_scenario(water: str, turbulence: str, rf_name: str, uwo_db: float,
                  rf_db: Optional[float] = None, threshold_snr: float = 1.0) -> Scenario:
    """Escenario de prueba con SNR medias en dB (la RF igual a la UWO si no se indica)."""
    uwo = scenario_params(get_water_scenario(water, turbulence), _db(uwo_db))
    rf = alpha_mu_preset(rf_name, _db(uwo_db if rf_db is None else rf_db))
    return Scenario(uwo, rf, threshold_snr, BPSK)


class QualityGate:
    """
    Gates numéricos: reducción, factorización, outage, asintótico, ASEP,
    capacidad, fidelidad de muestreadores, determinismo y PDF extremo a extremo.
    """

    GATES = ("reduction", "factorization", "outage", "asymptotic", "asep",
             "capacity", "sampler", "determinism", "e2e_pdf")

    def __init__(self):
        self.results_history = []

    def run_all_checks(self, quick: bool = False, inject_fault: Optional[str] = None,
                       gates: Optional[Sequence[str]] = None) -> Dict[str, Any]:
        """
        Ejecuta los gates pedidos (todos por defecto).

        Args:
            quick: Rejillas reducidas
            inject_fault: "psi2" altera Psi_2 en el gate asintótico (control negativo)
            gates: Subconjunto de GATES

        Returns:
            {"timestamp", "quick", "gates_passed", "gates": {nombre: resultado}}
        """
        if inject_fault is not None and inject_fault not in FAULTS:
            raise DomainError(f"Fallo inyectable desconocido: {inject_fault} (válidos: {FAULTS})")
        selected = list(gates or self.GATES)
        unknown = [g for g in selected if g not in self.GATES]
        if unknown:
            raise DomainError(f"Gates desconocidos: {unknown}")

        print(f"\n🚦 [QUALITY GATES] Ejecutando verificaciones{' (rápidas)' if quick else ''}...")
        result = {
            "timestamp": datetime.now().isoformat(),
            "quick": quick,
            "inject_fault": inject_fault,
            "gates_passed": True,
            "gates": {},
        }
        for name in selected:
            check = getattr(self, f"check_{name}")
            kwargs = {"quick": quick}
            if name == "asymptotic":
                kwargs["inject_fault"] = inject_fault
            gate_result = self._run_gate(name, check, kwargs)
            result["gates"][name] = gate_result
            if not gate_result["passed"]:
                result["gates_passed"] = False

        self._print_gates_summary(result)
        self.results_history.append(result)
        return result

    def _run_gate(self, name: str, check: Callable[..., Dict[str, Any]], kwargs: Dict) -> Dict[str, Any]:
        print(f"   🧪 [{name.upper()}] ...")
        start = time.perf_counter()
        try:
            gate_result = check(**kwargs)
        except Exception as e:
            gate_result = {"gate": name, "passed": False, "error": f"{type(e).__name__}: {e}",
                           "failures": [], "checked": 0}
        gate_result["seconds"] = time.perf_counter() - start
        status = "✅ PASS" if gate_result["passed"] else "❌ FAIL"
        measured = gate_result.get("max_error")
        detail = f" - error máx {measured:.3e} (tol {gate_result['tolerance']:.1e})" if measured is not None else ""
        print(f"      {status}{detail} [{gate_result['seconds']:.1f} s]")
        return gate_result

    @staticmethod
    def _gate(name: str, tolerance: float, errors: List[Tuple[str, float]],
              extra_failures: Sequence[str] = ()) -> Dict[str, Any]:
        failures = [f"{label}: {err:.3e}" for label, err in errors if not err <= tolerance]
        failures.extend(extra_failures)
        return {
            "gate": name,
            "passed": not failures,
            "checked": len(errors),
            "max_error": max((err for _, err in errors), default=0.0),
            "tolerance": tolerance,
            "failures": failures,
        }

    # ------------------------------------------------------------------
    # Funciones especiales
    # ------------------------------------------------------------------

    def check_reduction(self, quick: bool = False) -> Dict[str, Any]:
        """Contorno genérico de G^{1,1}_{1,2}[z|1; nu,0] frente a Gamma(nu) P(nu, z)."""
        errors = []
        for nu in (1.0, 0.7736, 2.0):
            for z in np.logspace(-4, 2, 12 if quick else 50):
                value = fox_h(GHSpec.lower_gamma(nu), float(z), GENERIC_CONTOUR)
                reference = math.gamma(nu) * float(special.gammainc(nu, z))
                errors.append((f"nu={nu:g}, z={z:.3e}", _relative(value, reference)))
        return self._gate("reduction", 1e-8, errors)

    def check_factorization(self, quick: bool = False) -> Dict[str, Any]:
        """
        Términos cruzados de la outage frente al producto de sus CDF marginales,
        y la malla tensorial forzada frente al producto de H univariadas.
        """
        errors = []
        grid = np.linspace(5.0, 35.0, 3 if quick else 5)
        for water, turbulence in (QUICK_ROWS if quick else ALL_ROWS):
            for uwo_db in grid:
                for rf_db in grid:
                    s = make_scenario(water, turbulence, "rayleigh", uwo_db, rf_db)
                    terms = outage_exact_terms(s)
                    f_rf = float(alpha_mu_cdf(s.rf, s.threshold_snr))
                    f_exp = -math.expm1(-s.threshold_snr / (s.uwo.lam * s.uwo.mean_snr))
                    log_gg = s.uwo.c * (math.log(s.threshold_snr) - math.log(s.uwo.b * s.uwo.mean_snr))
                    f_gg = float(reg_lower_incomplete_gamma_log(s.uwo.a, log_gg))
                    label = f"{water}-{turbulence} {uwo_db:g}/{rf_db:g} dB"
                    errors.append((label + " exp", _relative(terms["cross_exponential"], -s.uwo.w * f_exp * f_rf)))
                    if f_gg > 0:
                        errors.append((label + " gg",
                                       _relative(terms["cross_gg"], -(1.0 - s.uwo.w) * f_gg * f_rf)))

        for mu in (1.0, 2.0):
            spec = BivariateGHSpec(GHSpec.lower_gamma(1.0), GHSpec.lower_gamma(mu))
            for log_x in (-2.0, -0.5, 1.0):
                for log_y in (-2.0, -0.5, 1.0):
                    tensor = fox_h_bivariate(spec, None, None, GENERIC_BIVARIATE_CONTOUR, log_x=log_x, log_y=log_y)
                    product = fox_h(spec.inner_x, None, log_z=log_x) * fox_h(spec.inner_y, None, log_z=log_y)
                    errors.append((f"malla mu={mu:g} ({log_x:g}, {log_y:g})", _relative(tensor, product)))
        return self._gate("factorization", 1e-6, errors)

    # ------------------------------------------------------------------
    # Outage
    # ------------------------------------------------------------------

    def check_outage(self, quick: bool = False) -> Dict[str, Any]:
        """Forma cerrada frente a F1 + F2 - F1 F2 y a cuadratura (1e-6), y frente a Monte-Carlo (3 sigma)."""
        rows = (("salty", "weak"), ("fresh", "moderate")) if quick else ALL_ROWS
        rf_names = ("rayleigh", "alpha-mu-3.5-0.8") if quick else ("rayleigh", "nakagami-2", "exponential",
                                                                   "alpha-mu-3.5-0.8")
        grid = (5.0, 25.0) if quick else (5.0, 15.0, 25.0, 35.0)
        cfg = SimConfig(trials=10 ** 5 if quick else 10 ** 7)
        errors, mc_failures = [], []
        for water, turbulence in rows:
            for rf_name in rf_names:
                for snr_db in grid:
                    s = make_scenario(water, turbulence, rf_name, snr_db)
                    exact = outage_exact(s)
                    combined = e2e_cdf(s, s.threshold_snr)
                    label = f"{water}-{turbulence}/{rf_name} {snr_db:g} dB"
                    errors.append((label, _relative(exact, combined)))
                    estimate = simulate_outage(s, cfg)
                    sigma = math.sqrt(max(exact * (1.0 - exact), 0.0) / cfg.trials)
                    if abs(estimate.value - exact) > 3.0 * sigma + 1.0 / cfg.trials:
                        mc_failures.append(f"{label}: MC {estimate.value:.4e} vs {exact:.4e} (sigma {sigma:.1e})")
        for snr_db in (10.0, 30.0):
            s = make_scenario("fresh", "severe", "rayleigh", snr_db)
            label = f"fresh-severe/rayleigh {snr_db:g} dB cuadratura"
            errors.append((label, _relative(outage_exact(s), outage_quadrature(s))))
        return self._gate("outage", 1e-6, errors, mc_failures)

    def check_asymptotic(self, quick: bool = False, inject_fault: Optional[str] = None) -> Dict[str, Any]:
        """
        Pendiente log-log de alta SNR igual a -min(1, a c, alpha mu / 2) (5%) y
        cociente asintótico/exacto en [0.9, 1.1] donde la outage es < 1e-3.
        """
        psi2_scale = PSI2_FAULT_SCALE if inject_fault == "psi2" else 1.0
        pairs = [
            ("salty", "weak", "rayleigh"),
            ("salty", "weak", "nakagami-2"),
            ("salty", "weak", "exponential"),
            ("salty", "severe", "nakagami-2"),
            ("fresh", "weak", "one-sided-gaussian"),
        ]
        if quick:
            pairs = pairs[:4]
        slope_grid = (40.0, 45.0, 50.0)
        ratio_grid = (30.0, 40.0, 50.0, 60.0)
        errors, failures = [], []
        ratio_points = 0
        for water, turbulence, rf_name in pairs:
            label = f"{water}-{turbulence}/{rf_name}"
            base = make_scenario(water, turbulence, rf_name, slope_grid[0])
            expected = min(1.0, base.uwo.a * base.uwo.c, 0.5 * base.rf.alpha * base.rf.mu)
            breakdown = outage_asymptotic(base, psi2_scale=psi2_scale)
            if not math.isclose(breakdown.diversity_gain, expected, rel_tol=1e-12):
                failures.append(f"{label}: diversidad {breakdown.diversity_gain:g} != {expected:g}")

            log_snr = [math.log10(_db(g)) for g in slope_grid]
            log_p = [math.log10(outage_exact(make_scenario(water, turbulence, rf_name, g))) for g in slope_grid]
            slope = float(np.polyfit(log_snr, log_p, 1)[0])
            errors.append((f"{label} pendiente {slope:.4f}", _relative(-slope, expected)))

            for g in ratio_grid:
                s = make_scenario(water, turbulence, rf_name, g)
                exact = outage_exact(s)
                if exact >= 1e-3:
                    continue
                ratio_points += 1
                ratio = outage_asymptotic(s, psi2_scale=psi2_scale).value / exact
                if not 0.9 <= ratio <= 1.1:
                    failures.append(f"{label} {g:g} dB: cociente {ratio:.4f} fuera de [0.9, 1.1]")
        if ratio_points == 0:
            failures.append("Ningún punto con outage < 1e-3 para el cociente")
        return self._gate("asymptotic", 0.05, errors, failures)

    # ------------------------------------------------------------------
    # ASEP y capacidad
    # ------------------------------------------------------------------

    def check_asep(self, quick: bool = False) -> Dict[str, Any]:
        """Forma cerrada frente a cuadratura (1e-6), caso Rayleigh BPSK (1e-8) y Monte-Carlo (3 sigma)."""
        errors, failures = [], []
        for mean_db in np.linspace(0.0, 40.0, 5 if quick else 17):
            mean = _db(float(mean_db))
            value = asep_hop_rf(AlphaMuParams(2.0, 1.0, mean), BPSK)
            reference = 0.5 * (1.0 - math.sqrt(mean / (1.0 + mean)))
            rayleigh_error = _relative(value, reference)
            if rayleigh_error > 1e-8:
                failures.append(f"Rayleigh BPSK {mean_db:g} dB: {rayleigh_error:.3e} > 1e-8")

        rows = QUICK_ROWS if quick else ALL_ROWS
        grid = (0.0, 20.0) if quick else (0.0, 10.0, 20.0, 30.0)
        cfg = SimConfig(trials=10 ** 5 if quick else 10 ** 6)
        for water, turbulence in rows:
            for rf_name in ("rayleigh", "nakagami-2"):
                for snr_db in grid:
                    s = make_scenario(water, turbulence, rf_name, snr_db)
                    closed = asep_e2e(s)
                    label = f"{water}-{turbulence}/{rf_name} {snr_db:g} dB"
                    errors.append((label, _relative(closed, asep_e2e_quadrature(s))))
                    errors.append((label + " ensamblada", _relative(asep_e2e_closed_form(s), closed)))
                    estimate = simulate_asep(s, cfg)
                    if abs(estimate.value - closed) > 3.0 * estimate.stderr:
                        failures.append(f"{label}: MC {estimate.value:.4e} +- {estimate.stderr:.1e} vs {closed:.4e}")
        return self._gate("asep", 1e-6, errors, failures)

    def check_capacity(self, quick: bool = False) -> Dict[str, Any]:
        """Forma cerrada (alpha = 2) frente a cuadratura (1e-4 bits/s/Hz), Monte-Carlo y orden por turbulencia."""
        turbulences = ("weak", "severe") if quick else ("weak", "moderate", "severe")
        grid = (10.0, 30.0) if quick else (10.0, 20.0, 30.0)
        cfg = SimConfig(trials=10 ** 5 if quick else 10 ** 6)
        errors, failures = [], []
        closed_by_turbulence = {}
        for turbulence in turbulences:
            for snr_db in grid:
                s = make_scenario("salty", turbulence, "rayleigh", snr_db)
                closed = capacity_closed_form(s)
                closed_by_turbulence[(turbulence, snr_db)] = closed
                label = f"salty-{turbulence} {snr_db:g} dB"
                errors.append((label, abs(closed - capacity_quadrature(s))))
                estimate = simulate_capacity(s, cfg)
                if abs(estimate.value - closed) > 3.0 * estimate.stderr:
                    failures.append(f"{label}: MC {estimate.value:.5f} +- {estimate.stderr:.1e} vs {closed:.5f}")
        for snr_db in grid:
            weak, severe = closed_by_turbulence[("weak", snr_db)], closed_by_turbulence[("severe", snr_db)]
            if not severe < weak:
                failures.append(f"{snr_db:g} dB: capacidad severa {severe:.5f} >= débil {weak:.5f}")
        for snr_db in grid:
            s = make_scenario("fresh", "severe", "rayleigh", snr_db)
            errors.append((f"fresh-severe {snr_db:g} dB", abs(capacity_closed_form(s) - capacity_quadrature(s))))
        return self._gate("capacity", 1e-4, errors, failures)

    # ------------------------------------------------------------------
    # Monte-Carlo
    # ------------------------------------------------------------------

    def check_sampler(self, quick: bool = False) -> Dict[str, Any]:
        """Distancia KS entre muestras y CDF analítica de cada distribución."""
        n = 2 * 10 ** 5 if quick else 10 ** 6
        tolerance = max(0.002, 1.95 / math.sqrt(n))
        errors = []
        mean = _db(10.0)
        for k, (water, turbulence) in enumerate(QUICK_ROWS if quick else ALL_ROWS):
            p = scenario_params(get_water_scenario(water, turbulence), mean)
            samples = egg_sample(p, block_stream(7, k), n)
            errors.append((f"EGG {water}-{turbulence}", ks_distance(samples, lambda x: egg_cdf(p, x))))
        for k, rf_name in enumerate(("rayleigh", "nakagami-2", "exponential", "alpha-mu-3.5-0.8")):
            p = alpha_mu_preset(rf_name, mean)
            samples = alpha_mu_sample(p, block_stream(11, k), n)
            errors.append((f"alpha-mu {rf_name}", ks_distance(samples, lambda x: alpha_mu_cdf(p, x))))
        return self._gate("sampler", tolerance, errors)

    def check_determinism(self, quick: bool = False) -> Dict[str, Any]:
        """La misma semilla da el mismo estimador con cualquier batch_size y número de workers."""
        trials = 2 * 10 ** 5 if quick else 10 ** 6
        s = make_scenario("salty", "moderate", "rayleigh", 10.0)
        reference = simulate_outage(s, SimConfig(trials=trials, root_seed=99, batch_size=2 ** 16, workers=1))
        failures = []
        for batch_size, workers in ((2 ** 17, 1), (2 ** 16, 2), (2 ** 18, 3), (1000, 1)):
            other = simulate_outage(s, SimConfig(trials=trials, root_seed=99, batch_size=batch_size, workers=workers))
            if other != reference:
                failures.append(f"batch_size={batch_size}, workers={workers}: {other} != {reference}")
        return self._gate("determinism", 0.0, [], failures)

    # ------------------------------------------------------------------
    # PDF extremo a extremo
    # ------------------------------------------------------------------

    def check_e2e_pdf(self, quick: bool = False) -> Dict[str, Any]:
        """PDF ensamblada con H frente a f1(1-F2) + f2(1-F1), y su integral igual a 1."""
        cases = [("salty", "weak", "rayleigh", 10.0), ("fresh", "severe", "rayleigh", 10.0)]
        if not quick:
            cases += [("fresh", "moderate", "nakagami-2", 20.0), ("salty", "severe", "exponential", 5.0)]
        errors, failures = [], []
        for water, turbulence, rf_name, snr_db in cases:
            s = make_scenario(water, turbulence, rf_name, snr_db)
            label = f"{water}-{turbulence}/{rf_name} {snr_db:g} dB"
            upper = _capacity_upper_limit(s, 1e-12)
            points = _breakpoints(s, upper)
            for x in points:
                if float(e2e_survival(s, x)) < 1e-6:
                    continue
                errors.append((f"{label} x={x:.4g}", _relative(e2e_pdf_closed_form(s, x), float(e2e_pdf(s, x)))))
            total, _ = integrate.quad(lambda g: e2e_pdf_closed_form(s, g), 0.0, upper, points=points or None,
                                      limit=QUADRATURE_LIMIT, epsabs=1e-12, epsrel=1e-10)
            if abs(total - 1.0) > 1e-6:
                failures.append(f"{label}: integral {total:.9f}")
        return self._gate("e2e_pdf", 1e-6, errors, failures)

    def _print_gates_summary(self, result: Dict) -> None:
        """Imprime resumen de gates ejecutados."""
        print(f"\n{'='*70}")
        print("🚦 QUALITY GATES - RESUMEN")
        print(f"{'='*70}")

        status = "✅ TODOS PASARON" if result["gates_passed"] else "❌ ALGUNOS FALLARON"
        print(f"{status}\n")

        for gate_name, gate_result in result["gates"].items():
            gate_status = "✅" if gate_result.get("passed", True) else "❌"
            print(f"{gate_status} {gate_name.upper()}")
            print(f"   Comprobaciones: {gate_result.get('checked', 0)}")
            if gate_result.get("max_error") is not None and gate_result.get("checked"):
                print(f"   Error máximo: {gate_result['max_error']:.3e} (tolerancia {gate_result['tolerance']:.1e})")
            if gate_result.get("error"):
                print(f"   Excepción: {gate_result['error']}")
            for failure in gate_result.get("failures", [])[:5]:
                print(f"   ⚠️  {failure}")
            extra = len(gate_result.get("failures", [])) - 5
            if extra > 0:
                print(f"   ... y {extra} fallos más")

        print(f"{'='*70}\n")

