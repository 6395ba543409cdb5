"""
Contratos de datos del toolkit.
Valida con JSON Schema el archivo de escenarios, las peticiones de barrido
y los registros de métricas antes de escribirlos a disco.
"""
from typing import Any, Dict

from jsonschema import Draft7Validator, ValidationError, validate

_POSITIVE = {"type": "number", "exclusiveMinimum": 0}

_WATER_ROW = {
    "type": "object",
    "required": ["water", "turbulence", "bubble_level", "a", "b", "c", "lambda", "w"],
    "additionalProperties": False,
    "properties": {
        "water": {"type": "string", "minLength": 1},
        "turbulence": {"type": "string", "minLength": 1},
        "bubble_level": {"type": "number", "minimum": 0},
        "a": _POSITIVE,
        "b": _POSITIVE,
        "c": _POSITIVE,
        "lambda": _POSITIVE,
        "w": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
    },
}

_SERIES_ROW = {
    "type": "array",
    "minItems": 4,
    "maxItems": 4,
    "items": {"type": "string", "minLength": 1},
}


class ContractValidator:
    """
    Valida contratos de datos usando JSON Schema.
    Cada esquema describe una frontera de entrada o salida del toolkit.
    """

    SCHEMAS = {
        "scenario_config": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "water_scenarios": {"type": "array", "items": _WATER_ROW},
                "rf_presets": {
                    "type": "object",
                    "additionalProperties": {
                        "type": "object",
                        "required": ["alpha", "mu"],
                        "additionalProperties": False,
                        "properties": {"alpha": _POSITIVE, "mu": _POSITIVE},
                    },
                },
                "sweep_presets": {
                    "type": "object",
                    "additionalProperties": {
                        "type": "object",
                        "required": ["metric", "methods", "series"],
                        "properties": {
                            "metric": {"enum": ["outage", "asep", "capacity"]},
                            "methods": {
                                "type": "array",
                                "minItems": 1,
                                "items": {"enum": ["closed-form", "asymptotic", "monte-carlo", "quadrature"]},
                            },
                            "series": {"type": "array", "minItems": 1, "items": _SERIES_ROW},
                        },
                    },
                },
            },
        },
        "sweep_request": {
            "type": "object",
            "required": ["metric", "methods", "series", "snr_db"],
            "properties": {
                "metric": {"enum": ["outage", "asep", "capacity"]},
                "methods": {
                    "type": "array",
                    "minItems": 1,
                    "uniqueItems": True,
                    "items": {"enum": ["closed-form", "asymptotic", "monte-carlo", "quadrature"]},
                },
                "series": {"type": "array", "minItems": 1, "items": _SERIES_ROW},
                "snr_db": {"type": "array", "minItems": 1, "items": {"type": "number"}},
                "threshold_db": {"type": "number"},
                "rf_offset_db": {"type": "number"},
                "half_duplex": {"type": "boolean"},
                "formats": {
                    "type": "array",
                    "minItems": 1,
                    "items": {"enum": ["csv", "json", "svg"]},
                },
            },
        },
        "metric_records": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["series", "snr_db", "method", "value", "stderr"],
                "additionalProperties": False,
                "properties": {
                    "series": {"type": "string", "minLength": 1},
                    "snr_db": {"type": "number"},
                    "method": {"enum": ["closed-form", "asymptotic", "monte-carlo", "quadrature"]},
                    "value": {"type": "number"},
                    "stderr": {"type": ["number", "null"], "minimum": 0},
                },
            },
        },
    }

    def validate_output(
        self,
        data: Any,
        schema_name: str = None,
        custom_schema: Dict = None
    ) -> Dict[str, Any]:
        """
        Valida datos contra un JSON Schema.

        Args:
            data: Datos a validar
            schema_name: Nombre del schema predefinido
            custom_schema: Schema personalizado (si no se usa predefinido)

        Returns:
            {"valid": bool, ...} con mensaje, ruta y ruta del schema si falla
        """
        if custom_schema:
            schema = custom_schema
        elif schema_name in self.SCHEMAS:
            schema = self.SCHEMAS[schema_name]
        else:
            return {
                "valid": False,
                "error": f"Schema '{schema_name}' no encontrado",
                "path": [],
                "schema_path": [],
            }

        try:
            validate(instance=data, schema=schema)
            return {
                "valid": True,
                "message": "Validación exitosa",
                "schema_name": schema_name or "custom"
            }
        except ValidationError as e:
            return {
                "valid": False,
                "error": str(e.message),
                "path": list(e.path),
                "schema_path": list(e.schema_path)
            }

    def collect_errors(self, data: Any, schema_name: str) -> list:
        """Todos los errores de validación (no solo el primero), como mensajes legibles."""
        validator = Draft7Validator(self.SCHEMAS[schema_name])
        return [
            f"{'/'.join(str(p) for p in error.path) or '<raíz>'}: {error.message}"
            for error in sorted(validator.iter_errors(data), key=lambda e: [str(p) for p in e.path])
        ]


# Instancia global para reutilizar
_contract_validator = ContractValidator()


def validate_contract(data: Any, schema_name: str) -> Dict[str, Any]:
    """Atajo sobre la instancia global."""
    return _contract_validator.validate_output(data, schema_name)
