"""
Tests de la CLI: conversión dB, rejillas, catálogo, barridos que escriben
CSV/JSON/SVG deterministas y códigos de salida.
"""
import json
import math
import sys
import tempfile
from pathlib import Path

import pytest

sys.path.insert(0, '.')
from cli import (
    EXIT_FAILURE,
    EXIT_OK,
    EXIT_USAGE,
    RequestError,
    SweepRequest,
    cmd_scenarios,
    cmd_sweep,
    db_to_linear,
    expand_methods,
    linear_to_db,
    main,
    snr_grid,
)
from specfun import DomainError

SALTY_WEAK = ["sweep", "--water", "salty", "--turbulence", "weak", "--rf", "rayleigh", "--metric", "outage",
              "--snr", "0", "20", "10", "--quiet"]


@pytest.fixture(autouse=True)
def _no_env_config(monkeypatch):
    monkeypatch.delenv("UWORF_CONFIG", raising=False)


def test_db_conversion_and_grid():
    """Ida y vuelta dB <-> lineal y rejillas inclusivas."""
    print("🧪 TEST 1: dB y rejillas")
    print("=" * 70)
    for db in (-20.0, -3.0, 0.0, 7.5, 33.3, 60.0):
        assert abs(linear_to_db(db_to_linear(db)) - db) < 1e-12
    assert db_to_linear(10.0) == pytest.approx(10.0)
    with pytest.raises(DomainError):
        linear_to_db(0.0)

    assert snr_grid(0.0, 10.0, 2.5) == (0.0, 2.5, 5.0, 7.5, 10.0)
    grid = snr_grid(0.0, 1.0, 0.1)
    assert len(grid) == 11 and grid[-1] == 1.0 and grid[3] == 0.3
    assert snr_grid(5.0, 5.0, 1.0) == (5.0,)
    for bad in ((0.0, 10.0, 0.0), (10.0, 0.0, 1.0), (0.0, math.nan, 1.0)):
        with pytest.raises(RequestError):
            snr_grid(*bad)
    print("✅ dB y rejillas: PASS")


def test_expand_methods():
    """"all" se expande a los métodos aplicables; los demás se validan y ordenan."""
    print("\n🧪 TEST 2: Métodos")
    print("=" * 70)
    assert expand_methods("asep", ["all"]) == ("closed-form", "monte-carlo", "quadrature")
    assert expand_methods("outage", ["quadrature", "closed-form"]) == ("closed-form", "quadrature")
    with pytest.raises(RequestError):
        expand_methods("asep", ["asymptotic"])
    with pytest.raises(RequestError):
        expand_methods("ber", ["closed-form"])
    print("✅ Métodos: PASS")


def test_cmd_scenarios_filters():
    """Seis filas, filtro por agua y filtro sin coincidencias."""
    print("\n🧪 TEST 3: Comando scenarios")
    print("=" * 70)
    everything = cmd_scenarios()
    assert everything["success"] and everything["exit_code"] == EXIT_OK
    assert len(everything["scenarios"]) == 6
    assert "rayleigh" in everything["rf_presets"]
    fresh = cmd_scenarios(water="fresh")
    assert len(fresh["scenarios"]) == 3
    assert {row["turbulence"] for row in fresh["scenarios"]} == {"weak", "moderate", "severe"}
    assert len(cmd_scenarios(water="fresh", turbulence="severe")["scenarios"]) == 1
    none = cmd_scenarios(water="brackish")
    assert none["success"] and none["scenarios"] == []
    print("✅ scenarios: PASS")


def test_main_scenarios_json(capsys):
    """scenarios --json imprime las filas como JSON."""
    print("\n🧪 TEST 4: scenarios --json")
    print("=" * 70)
    capsys.readouterr()
    assert main(["scenarios", "--water", "salty", "--json"]) == EXIT_OK
    rows = json.loads(capsys.readouterr().out)
    assert [row["turbulence"] for row in rows] == ["weak", "moderate", "severe"]
    print("✅ scenarios --json: PASS")


def test_sweep_writes_deterministic_outputs(tmp_path):
    """CSV con cabecera y CRLF, JSON con stderr nulo y salidas idénticas byte a byte al repetir."""
    print("\n🧪 TEST 5: Barrido determinista")
    print("=" * 70)
    first, second = tmp_path / "a", tmp_path / "b"
    for out in (first, second):
        code = main(SALTY_WEAK + ["--methods", "closed-form", "asymptotic", "--out", str(out)])
        assert code == EXIT_OK

    stem = "outage-salty-weak-rayleigh"
    csv_bytes = (first / f"{stem}.csv").read_bytes()
    assert csv_bytes.startswith(b"series,snr_db,method,value,stderr\r\n")
    lines = csv_bytes.decode("utf-8").split("\r\n")
    assert len(lines) == 1 + 2 * 3 + 1 and lines[-1] == ""
    assert lines[1].startswith("salty-weak-rayleigh,0.0,closed-form,")
    assert lines[1].endswith(",")

    records = json.loads((first / f"{stem}.json").read_text(encoding="utf-8"))
    assert len(records) == 6
    assert all(r["stderr"] is None for r in records)
    assert [r["method"] for r in records[:3]] == ["closed-form"] * 3
    values = [r["value"] for r in records[:3]]
    assert values[0] > values[1] > values[2] > 0

    assert (first / f"{stem}.svg").read_bytes().lstrip().startswith(b"<?xml")
    for fmt in ("csv", "json", "svg"):
        assert (first / f"{stem}.{fmt}").read_bytes() == (second / f"{stem}.{fmt}").read_bytes(), fmt
    print("✅ Barrido determinista: PASS")


def test_sweep_preset_and_monte_carlo(tmp_path):
    """Un preset de barrido y una serie Monte-Carlo con stderr."""
    print("\n🧪 TEST 6: Preset y Monte-Carlo")
    print("=" * 70)
    code = main(["sweep", "--preset", "outage-turbulence", "--snr", "10", "20", "10", "--format", "csv",
                 "--out", str(tmp_path), "--quiet"])
    assert code == EXIT_OK
    lines = (tmp_path / "outage-turbulence.csv").read_text(encoding="utf-8").splitlines()
    assert len(lines) == 1 + 3 * 2 * 2
    assert not (tmp_path / "outage-turbulence.svg").exists()

    for name in ("fig2-style", "outage-rf-presets"):
        code = main(["sweep", "--preset", name, "--snr", "10", "20", "10", "--format", "csv",
                     "--out", str(tmp_path), "--quiet"])
        assert code == EXIT_OK
    alias_csv = (tmp_path / "fig2-style.csv").read_bytes()
    assert alias_csv == (tmp_path / "outage-rf-presets.csv").read_bytes()
    assert len(alias_csv.decode("utf-8").splitlines()) == 1 + 4 * 2 * 2

    code = main(["sweep", "--water", "fresh", "--turbulence", "weak", "--metric", "asep", "--snr", "5", "5", "1",
                 "--methods", "monte-carlo", "--trials", "2000", "--format", "json", "--out", str(tmp_path),
                 "--quiet"])
    assert code == EXIT_OK
    records = json.loads((tmp_path / "asep-fresh-weak-rayleigh.json").read_text(encoding="utf-8"))
    assert len(records) == 1 and records[0]["stderr"] > 0
    print("✅ Preset y Monte-Carlo: PASS")


def test_invalid_requests_write_nothing(tmp_path):
    """Peticiones incompatibles terminan con código 2 y sin archivos."""
    print("\n🧪 TEST 7: Peticiones inválidas")
    print("=" * 70)
    out = tmp_path / "vacio"
    cases = [
        ["sweep", "--water", "salty", "--turbulence", "weak", "--rf", "weibull-2.5", "--metric", "capacity",
         "--methods", "closed-form", "--snr", "0", "10", "10"],
        SALTY_WEAK + ["--methods", "asymptotic", "--rf-offset-db", "3"],
        ["sweep", "--water", "brackish", "--turbulence", "weak", "--metric", "outage"],
        ["sweep", "--water", "salty", "--turbulence", "weak", "--rf", "rician", "--metric", "outage"],
        ["sweep", "--water", "salty", "--turbulence", "weak"],
        ["sweep", "--preset", "no-existe"],
        ["sweep", "--water", "salty", "--metric", "outage"],
        SALTY_WEAK + ["--methods", "monte-carlo", "--trials", "10"],
        ["sweep", "--water", "salty", "--turbulence", "weak", "--metric", "outage", "--snr", "10", "0", "1"],
    ]
    for argv in cases:
        assert main(argv + ["--out", str(out)]) == EXIT_USAGE, argv
    assert not out.exists()
    with pytest.raises(SystemExit) as exc:
        main(["sweep", "--metric", "ber"])
    assert exc.value.code == EXIT_USAGE
    print("✅ Peticiones inválidas: PASS")


def test_all_methods_drop_incompatible(tmp_path, capsys):
    """Con --methods all y SNR distintas se omite el asintótico y se avisa."""
    print("\n🧪 TEST 8: --methods all")
    print("=" * 70)
    capsys.readouterr()
    code = main(["sweep", "--water", "salty", "--turbulence", "weak", "--metric", "outage", "--snr", "10", "10", "1",
                 "--methods", "all", "--rf-offset-db", "3", "--trials", "2000", "--format", "json",
                 "--out", str(tmp_path), "--quiet"])
    assert code == EXIT_OK
    assert "asymptotic" in capsys.readouterr().out
    records = json.loads((tmp_path / "outage-salty-weak-rayleigh.json").read_text(encoding="utf-8"))
    assert [r["method"] for r in records] == ["closed-form", "monte-carlo", "quadrature"]
    print("✅ --methods all: PASS")


def test_cmd_sweep_write_failure(tmp_path):
    """Un fallo al escribir devuelve código 1."""
    print("\n🧪 TEST 9: Fallo de escritura")
    print("=" * 70)
    blocker = tmp_path / "archivo"
    blocker.write_text("x", encoding="utf-8")
    req = SweepRequest(metric="outage", methods=("closed-form",),
                       series=(("s", "salty", "weak", "rayleigh"),), snr_db=(10.0,),
                       formats=("csv",), out_dir=str(blocker / "sub"))
    result = cmd_sweep(req, verbose=False)
    assert not result["success"] and result["exit_code"] == EXIT_FAILURE
    print("✅ Fallo de escritura: PASS")


def test_invalid_config_file(tmp_path):
    """Un archivo de escenarios inválido termina con código 2."""
    print("\n🧪 TEST 10: Configuración inválida")
    print("=" * 70)
    bad = tmp_path / "malo.json"
    bad.write_text(json.dumps({"water_scenarios": [{"water": "x"}]}), encoding="utf-8")
    assert main(["--config", str(bad), "scenarios"]) == EXIT_USAGE

    good = tmp_path / "bueno.json"
    good.write_text((Path(__file__).parent / "escenarios.example.json").read_text(encoding="utf-8"), encoding="utf-8")
    assert main(["--config", str(good), "scenarios", "--water", "tanque"]) == EXIT_OK
    print("✅ Configuración: PASS")


if __name__ == "__main__":
    def _tmp():
        return Path(tempfile.mkdtemp())

    tests = [
        test_db_conversion_and_grid,
        test_expand_methods,
        test_cmd_scenarios_filters,
        lambda: test_sweep_writes_deterministic_outputs(_tmp()),
        lambda: test_sweep_preset_and_monte_carlo(_tmp()),
        lambda: test_invalid_requests_write_nothing(_tmp()),
        lambda: test_cmd_sweep_write_failure(_tmp()),
        lambda: test_invalid_config_file(_tmp()),
    ]
    failed = 0
    for test in tests:
        try:
            test()
        except AssertionError as e:
            failed += 1
            print(f"❌ FAIL: {e}")

    print("\n" + "=" * 70)
    print("📊 RESUMEN DE TESTS - CLI")
    print("=" * 70)
    if failed == 0:
        print("🎉 TODOS LOS TESTS PASARON")
        sys.exit(0)
    print(f"⚠️  {failed} TESTS FALLARON")
    sys.exit(1)
