"""
Tests de specfun: gamma compleja, gamma incompleta y H de Fox por contorno.
Oráculos: mpmath y las reducciones a gamma incompleta de scipy.
"""
import math
import sys

import mpmath
import numpy as np
import pytest
from scipy import special

sys.path.insert(0, '.')
from specfun import (
    BivariateGHSpec,
    ContourConfig,
    ContourError,
    ConvergenceError,
    DomainError,
    GHSpec,
    PoleError,
    fox_h,
    fox_h_bivariate,
    fox_h_bivariate_detailed,
    fox_h_detailed,
    log_gamma_complex,
    reg_lower_incomplete_gamma,
    reg_lower_incomplete_gamma_log,
    reg_upper_incomplete_gamma,
)

GENERIC = ContourConfig(fast_path=False)


def _rel(value, reference):
    return abs(value - reference) / abs(reference)


def test_log_gamma_complex():
    """log Gamma compleja frente a mpmath."""
    print("🧪 TEST 1: log Gamma compleja")
    print("=" * 70)
    for z in (0.5 + 0.0j, 3.2 - 1.5j, -2.5 + 0.3j, 0.01 + 40.0j, 120.0 + 7.0j):
        reference = complex(mpmath.loggamma(mpmath.mpc(z.real, z.imag)))
        assert abs(log_gamma_complex(z) - reference) <= 1e-12 * max(1.0, abs(reference))
    with pytest.raises(PoleError):
        log_gamma_complex(-3.0)
    with pytest.raises(DomainError):
        log_gamma_complex(complex(math.inf, 0.0))
    print("✅ log Gamma compleja: PASS")


def test_incomplete_gamma():
    """P y Q regularizadas frente a mpmath, y P + Q = 1."""
    print("\n🧪 TEST 2: Gamma incompleta regularizada")
    print("=" * 70)
    for a in (0.0161, 0.7736, 1.0, 3.7291):
        for x in (1e-6, 0.3, 1.0, 7.5, 40.0):
            p_ref = float(mpmath.gammainc(a, 0, x, regularized=True))
            q_ref = float(mpmath.gammainc(a, x, mpmath.inf, regularized=True))
            assert _rel(reg_lower_incomplete_gamma(a, x), p_ref) < 1e-10
            assert _rel(reg_upper_incomplete_gamma(a, x), q_ref) < 1e-10
    assert reg_lower_incomplete_gamma(2.0, math.inf) == 1.0
    values = reg_lower_incomplete_gamma(1.0, np.array([0.0, 1.0]))
    assert values.shape == (2,) and values[0] == 0.0
    with pytest.raises(DomainError):
        reg_lower_incomplete_gamma(0.0, 1.0)
    with pytest.raises(DomainError):
        reg_upper_incomplete_gamma(1.0, -1.0)
    print("✅ Gamma incompleta: PASS")


def test_spec_validation():
    """Especificaciones inválidas se rechazan al construirlas."""
    print("\n🧪 TEST 3: Validación de GHSpec")
    print("=" * 70)
    with pytest.raises(ContourError):
        GHSpec.meijer([3.0], [2.0], 1, 1)  # polos izquierdo y derecho en -2
    with pytest.raises(DomainError):
        GHSpec.meijer([1.0], [0.5, 0.0], 3, 1)
    with pytest.raises(DomainError):
        GHSpec(((1.0, -1.0),), ((0.5, 1.0),), 1, 1)
    spec = GHSpec.lower_gamma(0.7736)
    assert (spec.p, spec.q) == (1, 2)
    assert spec.pole_gap() == (-0.7736, 0.0)
    assert spec.decay_rate() == 1.0
    print("✅ Validación: PASS")


@pytest.mark.parametrize("nu", [1.0, 0.7736, 2.0])
def test_contour_matches_lower_gamma(nu):
    """Contorno genérico de G^{1,1}_{1,2}[z|1; nu,0] = Gamma(nu) P(nu, z)."""
    print(f"\n🧪 TEST 4: Reducción G^(1,1)_(1,2), nu={nu}")
    print("=" * 70)
    for z in np.logspace(-4, 2, 10):
        value = fox_h(GHSpec.lower_gamma(nu), float(z), GENERIC)
        reference = math.gamma(nu) * special.gammainc(nu, z)
        assert _rel(value, reference) < 1e-8, (nu, z, value, reference)
    print("✅ Reducción inferior: PASS")


def test_contour_matches_upper_gamma_and_exponential():
    """G^{2,0}_{1,2} = Gamma(nu) Q(nu, z) y G^{1,0}_{0,1}[z|nu] = z^nu e^-z."""
    print("\n🧪 TEST 5: Reducciones superior y exponencial")
    print("=" * 70)
    for z in (0.01, 0.5, 3.0, 20.0):
        upper = fox_h(GHSpec.upper_gamma(1.5), z, GENERIC)
        assert _rel(upper, math.gamma(1.5) * special.gammaincc(1.5, z)) < 1e-8
        power = fox_h(GHSpec.power_exponential(0.7), z, GENERIC)
        assert _rel(power, z ** 0.7 * math.exp(-z)) < 1e-8
    print("✅ Reducciones: PASS")


def test_contour_matches_mpmath_meijerg():
    """Casos sin reducción directa frente a mpmath.meijerg y a su forma explícita."""
    print("\n🧪 TEST 6: G de Meijer frente a mpmath")
    print("=" * 70)
    cases = [
        # núcleo de ASEP: H^{1,2}_{2,2}[z | (1/2,1),(1,1); (1,1),(0,1)]
        (GHSpec.meijer([0.5, 1.0], [1.0, 0.0], 1, 2), [[0.5, 1.0], []], [[1.0], [0.0]]),
        # núcleo de capacidad con mu = 2
        (GHSpec.meijer([1.0, 1.0, -1.0], [1.0, 0.0], 1, 3), [[1.0, 1.0, -1.0], []], [[1.0], [0.0]]),
    ]
    for spec, a_s, b_s in cases:
        for z in (0.05, 0.7, 4.0):
            reference = float(mpmath.re(mpmath.meijerg(a_s, b_s, z)))
            assert _rel(fox_h(spec, z), reference) < 1e-8, (spec, z)

    # los pares Gamma(1-s) y Gamma(-s) se cancelan: queda z^1.3 e^-z
    density = GHSpec.meijer([0.0, 1.0], [1.3, 0.0, 1.0], 1, 2)
    for z in (0.05, 0.7, 4.0):
        assert _rel(fox_h(density, z), z ** 1.3 * math.exp(-z)) < 1e-8, z
    print("✅ Meijer G: PASS")


def test_argument_power_identity():
    """H[z^c] con escalas unitarias = (1/c) H[z] con escalas 1/c."""
    print("\n🧪 TEST 7: Potencia del argumento")
    print("=" * 70)
    base = GHSpec.lower_gamma(0.7736)
    for c in (0.5, 3.0, 49.1773):
        scaled, prefactor = base.with_argument_power(c)
        assert prefactor == pytest.approx(1.0 / c)
        for u in (0.8, 1.0, 1.05):
            direct = fox_h(base, None, GENERIC, log_z=c * math.log(u))
            rescaled = prefactor * fox_h(scaled, None, GENERIC, log_z=math.log(u))
            assert _rel(rescaled, direct) < 1e-8, (c, u)
    with pytest.raises(DomainError):
        base.with_argument_power(0.0)
    print("✅ Identidad de potencia: PASS")


def test_offset_rules_and_diagnostics():
    """Ambas reglas de offset dan el mismo valor; el diagnóstico es coherente."""
    print("\n🧪 TEST 8: Reglas de offset y diagnóstico")
    print("=" * 70)
    spec = GHSpec.lower_gamma(2.0)
    saddle = fox_h_detailed(spec, 1.0, GENERIC)
    midpoint = fox_h_detailed(spec, 1.0, ContourConfig(fast_path=False, offset_rule="midpoint"))
    assert saddle.method == midpoint.method == "contour"
    assert midpoint.real_offset == pytest.approx(-1.0)
    assert -2.0 < saddle.real_offset < 0.0
    assert _rel(saddle.value, midpoint.value) < 1e-9
    assert saddle.node_count >= 64 and saddle.abs_error >= 0.0

    reduced = fox_h_detailed(spec, 1.0)
    assert reduced.method == "reduction"
    assert _rel(reduced.value, saddle.value) < 1e-9

    fixed = fox_h(spec, 1.0, ContourConfig(fast_path=False, real_offset=-0.5))
    assert _rel(fixed, saddle.value) < 1e-9
    with pytest.raises(ContourError):
        fox_h(spec, 1.0, ContourConfig(fast_path=False, real_offset=0.5))
    print("✅ Offsets: PASS")


def test_argument_errors():
    """Argumentos inválidos y contornos sin decaimiento."""
    print("\n🧪 TEST 9: Errores de argumento y de contorno")
    print("=" * 70)
    spec = GHSpec.lower_gamma(1.0)
    with pytest.raises(DomainError):
        fox_h(spec, 0.0)
    with pytest.raises(DomainError):
        fox_h(spec, 1.0, log_z=0.0)
    with pytest.raises(DomainError):
        fox_h(spec)
    with pytest.raises(ContourError):
        fox_h(GHSpec.meijer([], [0.0, 0.5], 1, 0), 1.0)  # delta = 0
    with pytest.raises(DomainError):
        ContourConfig(node_count=8)
    with pytest.raises(DomainError):
        ContourConfig(offset_rule="izquierda")
    error = ConvergenceError("sin converger", last=1.0, previous=2.0)
    assert (error.last, error.previous) == (1.0, 2.0)
    print("✅ Errores: PASS")


def test_log_argument_far_outside_float_range():
    """log_z permite argumentos como (1/(b mean))^c con c ~ 217."""
    print("\n🧪 TEST 10: Argumentos en escala logarítmica")
    print("=" * 70)
    log_z = -216.8356 * math.log(2.9963 * 1000.0)
    value = fox_h(GHSpec.lower_gamma(0.0075), None, log_z=log_z)
    reference = math.exp(0.0075 * log_z - math.log(0.0075))  # gamma(a, z) ~ z^a / a
    assert _rel(value, reference) < 1e-6
    p_small = reg_lower_incomplete_gamma_log(0.0075, log_z)
    assert _rel(p_small, math.exp(0.0075 * log_z - special.gammaln(1.0075))) < 1e-12
    p_regular = reg_lower_incomplete_gamma_log(2.0, np.log([0.5, 3.0]))
    assert np.allclose(p_regular, special.gammainc(2.0, [0.5, 3.0]), rtol=1e-12)
    print("✅ Argumentos logarítmicos: PASS")


def test_bivariate_factorization():
    """Sin bloque externo la H bivariada es el producto de las univariadas."""
    print("\n🧪 TEST 11: Factorización bivariada")
    print("=" * 70)
    spec = BivariateGHSpec(GHSpec.lower_gamma(1.0), GHSpec.lower_gamma(2.0))
    assert not spec.has_outer
    for x, y in ((0.3, 0.5), (2.0, 0.1), (1.0, 4.0)):
        product = fox_h(spec.inner_x, x) * fox_h(spec.inner_y, y)
        factorized = fox_h_bivariate_detailed(spec, x, y)
        assert factorized.method == "factorized"
        assert _rel(factorized.value, product) < 1e-12
        tensor = fox_h_bivariate_detailed(spec, x, y, ContourConfig(fast_path=False, rel_tol=1e-8))
        assert tensor.method == "contour"
        assert _rel(tensor.value, product) < 1e-6
    print("✅ Factorización: PASS")


def test_bivariate_with_coupling_block():
    """Mellin-Barnes doble de Gamma(c) (1 + x + y)^-c."""
    print("\n🧪 TEST 12: H bivariada con bloque externo")
    print("=" * 70)
    for c in (1.5, 2.0):
        spec = BivariateGHSpec(
            GHSpec.power_exponential(0.0),
            GHSpec.power_exponential(0.0),
            outer_upper=((1.0 - c, 1.0, 1.0),),
            n0=1,
        )
        for x, y in ((0.5, 1.5), (0.2, 0.3), (3.0, 1.0)):
            reference = math.gamma(c) * (1.0 + x + y) ** (-c)
            assert _rel(fox_h_bivariate(spec, x, y), reference) < 1e-6, (c, x, y)
    print("✅ Bloque externo: PASS")


def test_bivariate_infeasible_coupling():
    """Un bloque externo que no deja franja entre polos se rechaza."""
    print("\n🧪 TEST 13: Bloque externo infactible")
    print("=" * 70)
    with pytest.raises(ContourError):
        # s > 0, t > 0 y -1 - s - t > 0 a la vez
        BivariateGHSpec(GHSpec.power_exponential(0.0), GHSpec.power_exponential(0.0),
                        outer_upper=((2.0, 1.0, 1.0),), n0=1)
    with pytest.raises(DomainError):
        BivariateGHSpec(GHSpec.lower_gamma(1.0), GHSpec.lower_gamma(1.0), outer_lower=((0.0, 1.0, 1.0),), m0=2)
    print("✅ Infactible: PASS")


if __name__ == "__main__":
    tests = [
        test_log_gamma_complex,
        test_incomplete_gamma,
        test_spec_validation,
        lambda: [test_contour_matches_lower_gamma(nu) for nu in (1.0, 0.7736, 2.0)],
        test_contour_matches_upper_gamma_and_exponential,
        test_contour_matches_mpmath_meijerg,
        test_argument_power_identity,
        test_offset_rules_and_diagnostics,
        test_argument_errors,
        test_log_argument_far_outside_float_range,
        test_bivariate_factorization,
        test_bivariate_with_coupling_block,
        test_bivariate_infeasible_coupling,
    ]
    failed = 0
    for test in tests:
        try:
            test()
        except AssertionError as e:
            failed += 1
            print(f"❌ FAIL: {e}")

    print("\n" + "=" * 70)
    print("📊 RESUMEN DE TESTS - SPECFUN")
    print("=" * 70)
    if failed == 0:
        print("🎉 TODOS LOS TESTS PASARON")
        sys.exit(0)
    print(f"⚠️  {failed} TESTS FALLARON")
    sys.exit(1)
