"""
Interfaz de línea de comandos del toolkit del relé UWO -> RF.

Subcomandos:
    scenarios  Lista el catálogo de escenarios de agua
    sweep      Barre una métrica sobre la SNR media y escribe CSV/JSON/SVG
    validate   Ejecuta la batería de verificaciones cruzadas

Es la única frontera donde se convierte entre dB y valores lineales.
"""
import argparse
import json
import math
import sys
from dataclasses import dataclass, field, replace
from typing import Any, Dict, List, Optional, Sequence, Tuple

from channels import ConfigError, ScenarioError, alpha_mu_preset, get_water_scenario, load_scenario_catalog, scenario_params
from config import (
    DEFAULT_ROOT_SEED,
    DEFAULT_SNR_GRID_DB,
    DEFAULT_THRESHOLD_DB,
    DEFAULT_TRIALS,
    DEFAULT_WORKERS,
    METHODS,
    METHODS_BY_METRIC,
    METRICS,
    OUTPUT_FORMATS,
    SWEEP_PRESET_ALIASES,
    get_output_dir,
)
from contract_validator import validate_contract
from metrics import (
    BPSK,
    MetricCurve,
    ModulationParams,
    NonIdenticalSnrError,
    Scenario,
    UnsupportedAlphaError,
    evaluate_curve,
)
from montecarlo import SimConfig
from report_generator import ReportGenerator
from specfun import DomainError, SpecFunError

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

SeriesRow = Tuple[str, str, str, str]  # (etiqueta, agua, turbulencia, preset RF)


class RequestError(ValueError):
    """Petición de barrido mal formada o incompatible."""


# ============================================================================
# CONVERSIÓN dB <-> LINEAL
# ============================================================================

def db_to_linear(db: float) -> float:
    return 10.0 ** (float(db) / 10.0)


def linear_to_db(x: float) -> float:
    if not x > 0:
        raise DomainError(f"Solo valores positivos tienen representación en dB, recibido {x}")
    return 10.0 * math.log10(x)


def snr_grid(start: float, stop: float, step: float) -> Tuple[float, ...]:
    """Rejilla inclusiva start, start+step, ..., <= stop."""
    if not all(math.isfinite(v) for v in (start, stop, step)):
        raise RequestError("La rejilla de SNR debe ser finita")
    if step <= 0:
        raise RequestError(f"El paso de la rejilla debe ser positivo, recibido {step}")
    if stop < start:
        raise RequestError(f"La rejilla está vacía: {start} > {stop}")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return tuple(round(start + k * step, 12) for k in range(count))


# ============================================================================
# PETICIÓN DE BARRIDO
# ============================================================================

@dataclass(frozen=True)
class SweepRequest:
    """
    Barrido de una métrica sobre la SNR media (en dB).

    rf_offset_db desplaza la SNR media del salto RF respecto del UWO; con un
    desplazamiento distinto de cero las SNR dejan de ser idénticas y el
    método asintótico no aplica.
    """
    metric: str
    methods: Tuple[str, ...]
    series: Tuple[SeriesRow, ...]
    snr_db: Tuple[float, ...]
    threshold_db: float = DEFAULT_THRESHOLD_DB
    rf_offset_db: float = 0.0
    half_duplex: bool = False
    modulation: ModulationParams = BPSK
    formats: Tuple[str, ...] = OUTPUT_FORMATS
    out_dir: Optional[str] = None
    stem: str = "sweep"
    sim: Optional[SimConfig] = None
    workers: int = DEFAULT_WORKERS
    title: str = ""
    catalog: Optional[Dict[str, Any]] = field(default=None, compare=False, repr=False)

    def to_record(self) -> Dict[str, Any]:
        return {
            "metric": self.metric,
            "methods": list(self.methods),
            "series": [list(row) for row in self.series],
            "snr_db": list(self.snr_db),
            "threshold_db": self.threshold_db,
            "rf_offset_db": self.rf_offset_db,
            "half_duplex": self.half_duplex,
            "formats": list(self.formats),
        }


def expand_methods(metric: str, methods: Sequence[str]) -> Tuple[str, ...]:
    """Resuelve "all" a los métodos aplicables a la métrica, sin duplicados y en orden canónico."""
    if metric not in METRICS:
        raise RequestError(f"Métrica desconocida: {metric} (válidas: {', '.join(METRICS)})")
    if "all" in methods:
        return tuple(METHODS_BY_METRIC[metric])
    unknown = [m for m in methods if m not in METHODS]
    if unknown:
        raise RequestError(f"Métodos desconocidos: {unknown}")
    invalid = [m for m in methods if m not in METHODS_BY_METRIC[metric]]
    if invalid:
        raise RequestError(f"Los métodos {invalid} no aplican a la métrica '{metric}'")
    return tuple(m for m in METHODS if m in methods)


def _rf_shape(req: SweepRequest, row: SeriesRow) -> Tuple[float, float]:
    p = alpha_mu_preset(row[3], 1.0, req.catalog)
    return p.alpha, p.mu


def check_request(req: SweepRequest) -> None:
    """
    Valida la petición completa antes de calcular nada.

    Raises:
        RequestError: contrato o rejilla inválidos
        ScenarioError: escenario o preset desconocido
        NonIdenticalSnrError: asintótico con SNR medias distintas
        UnsupportedAlphaError: capacidad en forma cerrada con alpha != 2
    """
    check = validate_contract(req.to_record(), "sweep_request")
    if not check["valid"]:
        raise RequestError(f"Petición inválida en {check['path']}: {check['error']}")
    expand_methods(req.metric, req.methods)
    if not req.snr_db:
        raise RequestError("La rejilla de SNR está vacía")
    if not math.isfinite(req.rf_offset_db) or not math.isfinite(req.threshold_db):
        raise RequestError("threshold_db y rf_offset_db deben ser finitos")

    for row in req.series:
        get_water_scenario(row[1], row[2], req.catalog)
        alpha, _ = _rf_shape(req, row)
        if req.metric == "capacity" and "closed-form" in req.methods and not math.isclose(alpha, 2.0):
            raise UnsupportedAlphaError(
                f"Serie '{row[0]}': la capacidad en forma cerrada requiere alpha = 2 (alpha = {alpha:g})")
    if "asymptotic" in req.methods and req.rf_offset_db != 0.0:
        raise NonIdenticalSnrError(
            f"El método asintótico requiere SNR medias idénticas (rf_offset_db = {req.rf_offset_db:g})")


def drop_incompatible(req: SweepRequest) -> Tuple[SweepRequest, List[str]]:
    """Con methods="all": quita los métodos que no aplican a esta petición."""
    dropped = []
    methods = list(req.methods)
    if "asymptotic" in methods and req.rf_offset_db != 0.0:
        methods.remove("asymptotic")
        dropped.append("asymptotic (SNR medias distintas)")
    if req.metric == "capacity" and "closed-form" in methods:
        if any(not math.isclose(_rf_shape(req, row)[0], 2.0) for row in req.series):
            methods.remove("closed-form")
            dropped.append("closed-form (alpha != 2)")
    return replace(req, methods=tuple(methods)), dropped


def build_scenarios(req: SweepRequest, row: SeriesRow) -> List[Scenario]:
    """Un escenario por punto de la rejilla, con SNR medias lineales."""
    water = get_water_scenario(row[1], row[2], req.catalog)
    threshold = db_to_linear(req.threshold_db)
    scenarios = []
    for snr_db in req.snr_db:
        uwo = scenario_params(water, db_to_linear(snr_db), req.catalog)
        rf = alpha_mu_preset(row[3], db_to_linear(snr_db + req.rf_offset_db), req.catalog)
        scenarios.append(Scenario(uwo, rf, threshold, req.modulation))
    return scenarios


def run_sweep(req: SweepRequest, verbose: bool = True) -> List[MetricCurve]:
    """Calcula todas las curvas (serie x método), en orden de serie y luego de método."""
    check_request(req)
    curves = []
    for row in req.series:
        scenarios = build_scenarios(req, row)
        for method in req.methods:
            if verbose:
                print(f"   ⏳ {row[0]} [{method}] ({len(scenarios)} puntos)")
            curve = evaluate_curve(req.metric, method, scenarios, req.snr_db, series=row[0],
                                   half_duplex=req.half_duplex, workers=req.workers,
                                   sim_config=req.sim, verbose=verbose)
            curves.append(curve)
    return curves


# ============================================================================
# COMANDOS
# ============================================================================

def cmd_scenarios(water: Optional[str] = None, turbulence: Optional[str] = None,
                  catalog: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    """Filas del catálogo que cumplen los filtros (un filtro sin coincidencias devuelve una lista vacía)."""
    try:
        catalog = catalog or load_scenario_catalog()
    except ConfigError as e:
        return {"success": False, "error": str(e), "exit_code": EXIT_USAGE}
    rows = []
    for (w, t), row in catalog["water_scenarios"].items():
        if water is not None and w != water:
            continue
        if turbulence is not None and t != turbulence:
            continue
        rows.append({"water": w, "turbulence": t, **row})
    return {"success": True, "scenarios": rows, "rf_presets": dict(catalog["rf_presets"]),
            "exit_code": EXIT_OK}


def cmd_sweep(req: SweepRequest, verbose: bool = True) -> Dict[str, Any]:
    """
    Ejecuta el barrido y escribe las salidas.

    Returns:
        {"success", "files", "curves", "exit_code"}; ante cualquier fallo no se
        escribe ningún archivo y exit_code es distinto de cero
    """
    if verbose:
        print(f"🚀 Barrido de {req.metric}: {len(req.series)} serie(s), métodos {', '.join(req.methods)}, "
              f"{len(req.snr_db)} puntos")
    try:
        curves = run_sweep(req, verbose)
    except (RequestError, ScenarioError, ConfigError, NonIdenticalSnrError, UnsupportedAlphaError) as e:
        print(f"❌ Petición inválida: {e}")
        return {"success": False, "error": str(e), "exit_code": EXIT_USAGE}
    except (SpecFunError, ValueError, ArithmeticError) as e:
        print(f"❌ Error numérico: {e}")
        return {"success": False, "error": str(e), "exit_code": EXIT_FAILURE}

    out_dir = get_output_dir(req.out_dir)
    written = ReportGenerator().write_outputs(curves, out_dir, req.stem, req.formats, req.title)
    if not written["success"]:
        print(f"❌ No se pudieron escribir las salidas: {written['error']}")
        return {"success": False, "error": written["error"], "exit_code": EXIT_FAILURE}
    if verbose:
        print(f"✅ {len(curves)} curva(s) escritas en {out_dir}")
    return {"success": True, "files": written["files"], "curves": curves, "exit_code": EXIT_OK}


def cmd_validate(quick: bool = False, inject_fault: Optional[str] = None) -> Dict[str, Any]:
    """Batería de verificaciones cruzadas; exit_code 1 si alguna falla."""
    from quality_gate import QualityGate
    result = QualityGate().run_all_checks(quick=quick, inject_fault=inject_fault)
    return {
        "success": result["gates_passed"],
        "gates": result["gates"],
        "exit_code": EXIT_OK if result["gates_passed"] else EXIT_FAILURE,
    }


# ============================================================================
# ARGPARSE
# ============================================================================

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="uworf",
        description="Outage, ASEP y capacidad de un relé DF UWO (EGG) -> RF (alpha-mu)",
    )
    parser.add_argument("--config", help="Archivo JSON de escenarios (por defecto $UWORF_CONFIG)")
    sub = parser.add_subparsers(dest="command", required=True)

    p_scen = sub.add_parser("scenarios", help="Lista el catálogo de escenarios de agua")
    p_scen.add_argument("--water", help="Filtra por tipo de agua")
    p_scen.add_argument("--turbulence", help="Filtra por turbulencia")
    p_scen.add_argument("--json", action="store_true", help="Salida JSON")

    p_sweep = sub.add_parser("sweep", help="Barre una métrica sobre la SNR media")
    aliases = ", ".join(f"{alias} = {name}" for alias, name in sorted(SWEEP_PRESET_ALIASES.items()))
    p_sweep.add_argument("--preset", help=f"Preset de barrido (alias: {aliases})")
    p_sweep.add_argument("--water", help="Tipo de agua (salty, fresh)")
    p_sweep.add_argument("--turbulence", help="Turbulencia (weak, moderate, severe)")
    p_sweep.add_argument("--rf", default="rayleigh", help="Preset RF alpha-mu")
    p_sweep.add_argument("--alpha", type=float, help="alpha explícito (requiere --mu)")
    p_sweep.add_argument("--mu", type=float, help="mu explícito (requiere --alpha)")
    p_sweep.add_argument("--label", help="Etiqueta de la serie")
    p_sweep.add_argument("--metric", choices=METRICS)
    p_sweep.add_argument("--snr", nargs=3, type=float, metavar=("START", "STOP", "STEP"),
                         help="Rejilla de SNR media en dB")
    p_sweep.add_argument("--methods", nargs="+", choices=METHODS + ("all",))
    p_sweep.add_argument("--threshold-db", type=float, default=DEFAULT_THRESHOLD_DB)
    p_sweep.add_argument("--rf-offset-db", type=float, default=0.0,
                         help="SNR media RF menos SNR media UWO, en dB")
    p_sweep.add_argument("--half-duplex", action="store_true", help="Factor 1/2 en la capacidad")
    p_sweep.add_argument("--eta", type=float, default=BPSK.eta)
    p_sweep.add_argument("--beta", type=float, default=BPSK.beta)
    p_sweep.add_argument("--trials", type=int, default=DEFAULT_TRIALS)
    p_sweep.add_argument("--seed", type=int, default=DEFAULT_ROOT_SEED)
    p_sweep.add_argument("--batch-size", type=int)
    p_sweep.add_argument("--workers", type=int, default=DEFAULT_WORKERS)
    p_sweep.add_argument("--format", nargs="+", choices=OUTPUT_FORMATS, default=list(OUTPUT_FORMATS))
    p_sweep.add_argument("--out", help="Directorio de salida (por defecto $UWORF_OUTPUT_DIR o resultados/)")
    p_sweep.add_argument("--quiet", action="store_true")

    p_val = sub.add_parser("validate", help="Ejecuta las verificaciones cruzadas")
    p_val.add_argument("--quick", action="store_true", help="Rejillas reducidas")
    p_val.add_argument("--inject-fault", choices=("psi2",), help="Control negativo")
    return parser


def request_from_args(args: argparse.Namespace, catalog: Dict[str, Any]) -> Tuple[SweepRequest, List[str]]:
    """
    Construye la petición: el preset (si hay) aporta los valores base y las
    opciones explícitas los sobrescriben.
    """
    preset = {}
    if args.preset:
        presets = catalog["sweep_presets"]
        name = SWEEP_PRESET_ALIASES.get(args.preset, args.preset)
        if name not in presets:
            raise ScenarioError(f"Preset de barrido desconocido: {args.preset} "
                                f"(disponibles: {', '.join(sorted(presets))})")
        preset = presets[name]

    metric = args.metric or preset.get("metric")
    if metric is None:
        raise RequestError("Falta --metric (o --preset)")

    if args.water or args.turbulence or not preset:
        if not (args.water and args.turbulence):
            raise RequestError("Se requieren --water y --turbulence (o --preset)")
        rf_name = args.rf
        if args.alpha is not None or args.mu is not None:
            if args.alpha is None or args.mu is None:
                raise RequestError("--alpha y --mu van juntos")
            rf_name = f"alpha-mu-{args.alpha:g}-{args.mu:g}"
            catalog["rf_presets"][rf_name] = (args.alpha, args.mu)
        label = args.label or f"{args.water}-{args.turbulence}-{rf_name}"
        series = ((label, args.water, args.turbulence, rf_name),)
    else:
        series = tuple(tuple(row) for row in preset["series"])

    requested = args.methods or preset.get("methods") or ["closed-form"]
    methods = expand_methods(metric, requested)
    grid = snr_grid(*(args.snr or DEFAULT_SNR_GRID_DB))

    sim = None
    if "monte-carlo" in methods:
        try:
            sim = SimConfig(trials=args.trials, root_seed=args.seed, batch_size=args.batch_size,
                            workers=args.workers)
        except DomainError as e:
            raise RequestError(str(e)) from e

    req = SweepRequest(
        metric=metric,
        methods=methods,
        series=series,
        snr_db=grid,
        threshold_db=args.threshold_db,
        rf_offset_db=args.rf_offset_db,
        half_duplex=args.half_duplex,
        modulation=ModulationParams(args.eta, args.beta),
        formats=tuple(args.format),
        out_dir=args.out,
        stem=args.preset or f"{metric}-{series[0][0]}",
        sim=sim,
        workers=args.workers,
        title=args.preset or "",
        catalog=catalog,
    )
    dropped: List[str] = []
    if "all" in requested:
        req, dropped = drop_incompatible(req)
    return req, dropped


def _print_scenarios(result: Dict[str, Any]) -> None:
    print("=" * 70)
    print("🌊 ESCENARIOS DE AGUA")
    print("=" * 70)
    print(f"{'agua':<8}{'turbulencia':<13}{'BL':>6}{'a':>9}{'b':>9}{'c':>10}{'lambda':>9}{'w':>9}")
    for row in result["scenarios"]:
        print(f"{row['water']:<8}{row['turbulence']:<13}{row['bubble_level']:>6g}{row['a']:>9.4f}"
              f"{row['b']:>9.4f}{row['c']:>10.4f}{row['lambda']:>9.4f}{row['w']:>9.4f}")
    if not result["scenarios"]:
        print("   (sin coincidencias)")
    print("\n📡 Presets RF: " + ", ".join(f"{k} {v}" for k, v in sorted(result["rf_presets"].items())))
    print("=" * 70)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.command == "validate":
        return cmd_validate(quick=args.quick, inject_fault=args.inject_fault)["exit_code"]

    try:
        catalog = load_scenario_catalog(args.config)
    except ConfigError as e:
        print(f"❌ Configuración inválida: {e}")
        return EXIT_USAGE

    if args.command == "scenarios":
        result = cmd_scenarios(args.water, args.turbulence, catalog)
        if args.json:
            print(json.dumps(result["scenarios"], indent=2, ensure_ascii=False))
        else:
            _print_scenarios(result)
        return result["exit_code"]

    try:
        req, dropped = request_from_args(args, catalog)
    except (RequestError, ScenarioError, DomainError) as e:
        print(f"❌ Petición inválida: {e}")
        return EXIT_USAGE
    for note in dropped:
        print(f"⚠️  Método omitido: {note}")
    return cmd_sweep(req, verbose=not args.quiet)["exit_code"]


if __name__ == "__main__":
    sys.exit(main())
