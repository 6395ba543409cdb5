"""
Generador de reportes de barridos.
Convierte curvas de métricas en CSV, JSON y SVG deterministas y los
escribe a disco solo cuando todas las salidas se renderizaron bien.
"""
import csv
import io
import json
import math
import os
from pathlib import Path
from typing import Any, Dict, List, Sequence, Tuple

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from config import OUTPUT_FORMATS  # noqa: E402
from contract_validator import validate_contract  # noqa: E402
from metrics import MetricCurve  # noqa: E402

CSV_HEADER = ("series", "snr_db", "method", "value", "stderr")
LOG_SCALE_METRICS = ("outage", "asep")
SVG_HASH_SALT = "uworf"

METRIC_LABELS = {
    "outage": "Probabilidad de outage",
    "asep": "ASEP",
    "capacity": "Capacidad ergódica [bits/s/Hz]",
}

METHOD_STYLES = {
    "closed-form": {"linestyle": "-", "marker": None},
    "asymptotic": {"linestyle": "--", "marker": None},
    "monte-carlo": {"linestyle": "none", "marker": "o"},
    "quadrature": {"linestyle": ":", "marker": "x"},
}


def _number(x: float) -> str:
    """Representación más corta que recupera el float exacto."""
    return repr(float(x))


class ReportGenerator:
    """Renderiza curvas de métricas a CSV, JSON y SVG."""

    def build_records(self, curves: Sequence[MetricCurve]) -> List[Dict[str, Any]]:
        """Un registro por (curva, punto de SNR), en el orden de las curvas."""
        records = []
        for curve in curves:
            for i, (snr_db, value) in enumerate(zip(curve.mean_snr_db, curve.values)):
                if not math.isfinite(value):
                    raise ValueError(f"Valor no finito en '{curve.series}' ({curve.method}) a {snr_db} dB: {value}")
                records.append({
                    "series": curve.series,
                    "snr_db": float(snr_db),
                    "method": curve.method,
                    "value": float(value),
                    "stderr": None if curve.stderr is None else float(curve.stderr[i]),
                })
        return records

    def render_csv(self, records: Sequence[Dict[str, Any]]) -> str:
        """CSV con cabecera fija, comillas mínimas y fin de línea CRLF."""
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\r\n")
        writer.writerow(CSV_HEADER)
        for r in records:
            writer.writerow([
                r["series"],
                _number(r["snr_db"]),
                r["method"],
                _number(r["value"]),
                "" if r["stderr"] is None else _number(r["stderr"]),
            ])
        return buffer.getvalue()

    def render_json(self, records: Sequence[Dict[str, Any]]) -> str:
        return json.dumps(list(records), indent=2, ensure_ascii=False, allow_nan=False) + "\n"

    def render_svg(self, curves: Sequence[MetricCurve], title: str = "") -> str:
        """Figura mínima: ejes, leyenda y escala logarítmica para outage/ASEP."""
        metric = curves[0].metric
        with matplotlib.rc_context({"svg.hashsalt": SVG_HASH_SALT, "svg.fonttype": "path"}):
            fig, ax = plt.subplots(figsize=(7, 5))
            try:
                for curve in curves:
                    style = METHOD_STYLES[curve.method]
                    ax.plot(curve.mean_snr_db, curve.values, label=f"{curve.series} ({curve.method})",
                            linestyle=style["linestyle"], marker=style["marker"])
                if metric in LOG_SCALE_METRICS:
                    ax.set_yscale("log", nonpositive="mask")
                ax.set_xlabel("SNR media [dB]")
                ax.set_ylabel(METRIC_LABELS[metric])
                if title:
                    ax.set_title(title)
                ax.grid(True, which="both", alpha=0.3)
                ax.legend(fontsize="small")
                buffer = io.StringIO()
                fig.savefig(buffer, format="svg", metadata={"Date": None})
            finally:
                plt.close(fig)
        return buffer.getvalue()

    def render_all(self, curves: Sequence[MetricCurve], formats: Sequence[str],
                   title: str = "") -> Dict[str, str]:
        """Todas las salidas en memoria; valida los registros contra el contrato metric_records."""
        if not curves:
            raise ValueError("No hay curvas que reportar")
        unknown = [f for f in formats if f not in OUTPUT_FORMATS]
        if unknown:
            raise ValueError(f"Formatos desconocidos: {unknown} (válidos: {OUTPUT_FORMATS})")
        records = self.build_records(curves)
        check = validate_contract(records, "metric_records")
        if not check["valid"]:
            raise ValueError(f"Registros inválidos en {check['path']}: {check['error']}")

        rendered = {}
        for fmt in formats:
            if fmt == "csv":
                rendered["csv"] = self.render_csv(records)
            elif fmt == "json":
                rendered["json"] = self.render_json(records)
            elif fmt == "svg":
                rendered["svg"] = self.render_svg(curves, title)
        return rendered

    def write_outputs(self, curves: Sequence[MetricCurve], out_dir: str, stem: str,
                      formats: Sequence[str] = OUTPUT_FORMATS, title: str = "") -> Dict[str, Any]:
        """
        Renderiza y escribe <stem>.<formato> en out_dir.

        Returns:
            {"success": True, "files": [...]} o {"success": False, "error": ...};
            si algo falla no queda ningún archivo escrito
        """
        try:
            rendered = self.render_all(curves, formats, title)
        except Exception as e:
            return {"success": False, "error": str(e)}

        output_path = Path(out_dir)
        staged: List[Tuple[Path, Path]] = []
        placed: List[Path] = []
        try:
            output_path.mkdir(parents=True, exist_ok=True)
            for fmt, content in rendered.items():
                target = output_path / f"{stem}.{fmt}"
                temp = output_path / f".{stem}.{fmt}.tmp"
                staged.append((temp, target))
                temp.write_bytes(content.encode("utf-8"))
            for temp, target in staged:
                os.replace(temp, target)
                placed.append(target)
        except OSError as e:
            # Ni temporales ni un conjunto parcial de salidas
            for path in [temp for temp, _ in staged] + placed:
                try:
                    path.unlink()
                except OSError:
                    pass
            return {"success": False, "error": str(e)}

        for target in placed:
            print(f"📊 Reporte generado: {target} ({target.stat().st_size} bytes)")
        return {"success": True, "files": [str(target) for target in placed]}
