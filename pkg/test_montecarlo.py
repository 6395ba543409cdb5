"""
Tests de montecarlo: estimadores por ensayo, reproducibilidad por bloques
de flujo y acuerdo estadístico con las formas exactas.
"""
import math
import sys

import numpy as np
import pytest
from scipy import special

sys.path.insert(0, '.')
from channels import AlphaMuParams, EggParams, alpha_mu_preset, get_water_scenario, scenario_params
from config import MIN_TRIALS, STREAM_BLOCK_SIZE
from metrics import Scenario, e2e_cdf
from montecarlo import (
    SimConfig,
    asep_conditional,
    block_stream,
    capacity_kernel,
    conditional_error,
    ks_distance,
    outage_indicator,
    simulate,
    simulate_asep,
    simulate_capacity,
    simulate_outage,
)
from specfun import DomainError


def salty_weak_rayleigh(snr_db=10.0):
    mean = 10.0 ** (snr_db / 10.0)
    return Scenario(scenario_params(get_water_scenario("salty", "weak"), mean), alpha_mu_preset("rayleigh", mean), 1.0)


def test_per_trial_estimators():
    """Indicador de outage, error condicional y núcleo de capacidad."""
    print("🧪 TEST 1: Estimadores por ensayo")
    print("=" * 70)
    assert capacity_kernel(np.array([3.0]), np.array([7.0]))[0] == 2.0
    assert capacity_kernel(np.array([3.0]), np.array([7.0]), half_duplex=True)[0] == 1.0
    indicator = outage_indicator(np.array([0.5, 2.0, 1.0]), np.array([3.0, 3.0, 5.0]), 1.0)
    assert indicator.tolist() == [1.0, 0.0, 1.0]
    assert conditional_error(np.array([0.0]), 1.0, 1.0)[0] == 0.5
    assert asep_conditional(np.array([0.0]), np.array([0.0]), 1.0, 1.0)[0] == 0.5
    both = asep_conditional(np.array([2.0]), np.array([40.0]), 1.0, 1.0)[0]
    e1 = 0.5 * special.erfc(math.sqrt(2.0))
    assert both == pytest.approx(e1 + 0.5 * special.erfc(math.sqrt(40.0)) * (1.0 - 2.0 * e1), rel=1e-12)
    print("✅ Estimadores: PASS")


def test_block_streams_are_independent_and_repeatable():
    """El bloque k de una semilla raíz siempre produce la misma secuencia."""
    print("\n🧪 TEST 2: Flujos por bloque")
    print("=" * 70)
    a = block_stream(123, 0).random(5)
    b = block_stream(123, 0).random(5)
    c = block_stream(123, 1).random(5)
    d = block_stream(124, 0).random(5)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)
    assert not np.array_equal(a, d)
    print("✅ Flujos: PASS")


def test_results_independent_of_batch_size_and_workers():
    """Mismo (trials, semilla) da resultados idénticos con cualquier lote o número de workers."""
    print("\n🧪 TEST 3: Determinismo")
    print("=" * 70)
    s = salty_weak_rayleigh()
    trials = 2 * STREAM_BLOCK_SIZE + 1234
    reference = simulate_outage(s, SimConfig(trials=trials, root_seed=7))
    assert reference.trials == trials
    for batch_size, workers in ((trials, 1), (1000, 1), (STREAM_BLOCK_SIZE, 2), (STREAM_BLOCK_SIZE + 1, 3)):
        cfg = SimConfig(trials=trials, root_seed=7, batch_size=batch_size, workers=workers)
        assert simulate_outage(s, cfg) == reference, (batch_size, workers)
    capacity = simulate_capacity(s, SimConfig(trials=trials, root_seed=7))
    assert simulate_capacity(s, SimConfig(trials=trials, root_seed=7, batch_size=999, workers=2)) == capacity
    assert simulate_outage(s, SimConfig(trials=trials, root_seed=8)) != reference
    print("✅ Determinismo: PASS")


def test_outage_estimate_agrees_with_exact():
    """Outage simulada dentro de 4 sigma de F1 + F2 - F1 F2."""
    print("\n🧪 TEST 4: Outage Monte-Carlo")
    print("=" * 70)
    s = salty_weak_rayleigh(5.0)
    cfg = SimConfig(trials=200000)
    estimate = simulate_outage(s, cfg)
    exact = e2e_cdf(s, s.threshold_snr)
    sigma = math.sqrt(exact * (1.0 - exact) / cfg.trials)
    assert abs(estimate.value - exact) < 4.0 * sigma + 1.0 / cfg.trials
    assert estimate.stderr == math.sqrt(estimate.value * (1.0 - estimate.value) / cfg.trials)

    zero = simulate_outage(s, SimConfig(trials=MIN_TRIALS), threshold_snr=0.0)
    assert (zero.value, zero.stderr) == (0.0, 0.0)
    with pytest.raises(DomainError):
        simulate_outage(s, SimConfig(trials=MIN_TRIALS), threshold_snr=-1.0)
    print("✅ Outage MC: PASS")


def test_asep_estimators_agree():
    """Estimador condicional y estimador por bits estiman la misma ASEP."""
    print("\n🧪 TEST 5: Estimadores de ASEP")
    print("=" * 70)
    s = salty_weak_rayleigh(5.0)
    cfg = SimConfig(trials=200000)
    conditional = simulate_asep(s, cfg)
    bit = simulate_asep(s, cfg, estimator="bit")
    assert conditional.stderr < bit.stderr
    assert abs(conditional.value - bit.value) < 4.0 * (conditional.stderr + bit.stderr)
    assert simulate("asep", s, cfg) == conditional
    with pytest.raises(DomainError):
        simulate_asep(s, cfg, estimator="symbol")
    print("✅ ASEP MC: PASS")


def test_capacity_estimate_exponential_hops():
    """Capacidad simulada del mínimo de dos exponenciales frente a e^{1/m} E1(1/m) / ln 2."""
    print("\n🧪 TEST 6: Capacidad Monte-Carlo")
    print("=" * 70)
    mean = 10.0
    uwo = EggParams(a=1.0, b=0.8, c=1.0, lam=0.8, w=0.5, mean_snr=mean)
    s = Scenario(uwo, AlphaMuParams(2.0, 1.0, mean), 1.0)
    m = 1.0 / (1.0 / (0.8 * mean) + 1.0 / mean)
    exact = math.exp(1.0 / m) * special.exp1(1.0 / m) / math.log(2.0)
    cfg = SimConfig(trials=200000)
    estimate = simulate_capacity(s, cfg)
    assert abs(estimate.value - exact) < 4.0 * estimate.stderr
    half = simulate("capacity", s, cfg, half_duplex=True)
    assert half.value == pytest.approx(0.5 * estimate.value, rel=1e-12)
    print("✅ Capacidad MC: PASS")


def test_sim_config_validation():
    """Parámetros de simulación fuera de rango."""
    print("\n🧪 TEST 7: Validación de SimConfig")
    print("=" * 70)
    assert SimConfig(trials=5000).batch_size == 5000
    assert SimConfig(trials=10 ** 7).batch_size == 2 ** 18
    for kwargs in ({"trials": MIN_TRIALS - 1}, {"trials": 1500.5}, {"trials": 5000, "batch_size": 6000},
                   {"trials": 5000, "batch_size": 0}, {"trials": 5000, "workers": 0},
                   {"trials": 5000, "root_seed": -1}):
        with pytest.raises(DomainError):
            SimConfig(**kwargs)
    with pytest.raises(DomainError):
        simulate("ber", salty_weak_rayleigh(), SimConfig(trials=MIN_TRIALS))
    print("✅ SimConfig: PASS")


def test_ks_distance():
    """KS de una rejilla de cuantiles uniformes es 1/(2n)."""
    print("\n🧪 TEST 8: Distancia KS")
    print("=" * 70)
    n = 1000
    samples = (np.arange(n) + 0.5) / n
    assert ks_distance(samples[::-1], lambda x: x) == pytest.approx(0.5 / n)
    assert ks_distance(np.full(10, 2.0), lambda x: np.full_like(x, 0.5)) == pytest.approx(0.5)
    print("✅ KS: PASS")


if __name__ == "__main__":
    tests = [
        test_per_trial_estimators,
        test_block_streams_are_independent_and_repeatable,
        test_results_independent_of_batch_size_and_workers,
        test_outage_estimate_agrees_with_exact,
        test_asep_estimators_agree,
        test_capacity_estimate_exponential_hops,
        test_sim_config_validation,
        test_ks_distance,
    ]
    failed = 0
    for test in tests:
        try:
            test()
        except AssertionError as e:
            failed += 1
            print(f"❌ FAIL: {e}")

    print("\n" + "=" * 70)
    print("📊 RESUMEN DE TESTS - MONTECARLO")
    print("=" * 70)
    if failed == 0:
        print("🎉 TODOS LOS TESTS PASARON")
        sys.exit(0)
    print(f"⚠️  {failed} TESTS FALLARON")
    sys.exit(1)
