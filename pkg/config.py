"""
Configuración del toolkit de análisis del enlace relé UWO/RF.

Constantes numéricas, catálogo de escenarios de agua, presets de canal RF,
presets de barrido y variables de entorno. Todo lo que un usuario puede
ajustar sin tocar código vive aquí o en el archivo JSON de escenarios.
"""
import env_loader  # Cargar .env PRIMERO
import os

# Evaluación de contornos de Mellin-Barnes
DEFAULT_REL_TOL = 1e-10  # Tolerancia relativa para H univariada
DEFAULT_BIVARIATE_REL_TOL = 1e-8  # Tolerancia relativa para H bivariada
DEFAULT_NODE_COUNT = 64  # Nodos iniciales del trapecio (mínimo 16)
DEFAULT_MAX_REFINEMENTS = 8  # Duplicaciones máximas de nodos
CONTOUR_DECAY_BUDGET = 40.0  # Caída en log-magnitud que define la altura de truncamiento
SADDLE_MARGIN = 1e-3  # Fracción del hueco que el offset deja libre junto a cada polo
SADDLE_SPAN = 20.0  # Ancho de búsqueda (en unidades de escala) cuando el hueco no está acotado
MAX_CONTOUR_NODES = 2 ** 23  # Límite de nodos univariados
MAX_BIVARIATE_POINTS = 2 ** 24  # Límite de puntos en la malla bivariada
CONTOUR_CHUNK = 2 ** 18  # Puntos por bloque de evaluación vectorizada

# Métricas
CAPACITY_TAIL_MASS = 1e-10  # Masa de cola descartada en la cuadratura de capacidad
DOMINANCE_TIE_TOLERANCE = 0.05  # Exponentes a menos de 5% se consideran co-dominantes
QUADRATURE_REL_TOL = 1e-10
QUADRATURE_LIMIT = 500

# Monte-Carlo
DEFAULT_TRIALS = 10 ** 6
DEFAULT_ROOT_SEED = 20240601
DEFAULT_BATCH_SIZE = 2 ** 18
DEFAULT_WORKERS = 1
STREAM_BLOCK_SIZE = 2 ** 16  # Tamaño fijo de un bloque de flujo aleatorio (independiente del lote)
MIN_TRIALS = 10 ** 3

# Escenarios de agua: filas de la tabla de parámetros de un enlace UWO (detección heterodina)
WATER_TYPES = ("salty", "fresh")
TURBULENCE_LEVELS = ("weak", "moderate", "severe")

WATER_SCENARIOS = {
    ("salty", "weak"): {"bubble_level": 2.4, "a": 0.7736, "b": 1.1372, "c": 49.1773, "lambda": 0.4687, "w": 0.1770},
    ("salty", "moderate"): {"bubble_level": 4.7, "a": 0.5307, "b": 1.2154, "c": 35.7368, "lambda": 0.3953, "w": 0.2064},
    ("salty", "severe"): {"bubble_level": 16.5, "a": 0.0161, "b": 3.2033, "c": 82.1030, "lambda": 0.1368, "w": 0.4951},
    ("fresh", "weak"): {"bubble_level": 2.4, "a": 3.7291, "b": 1.0721, "c": 30.3214, "lambda": 0.5273, "w": 0.1953},
    ("fresh", "moderate"): {"bubble_level": 4.7, "a": 1.2526, "b": 1.1501, "c": 41.3258, "lambda": 0.4603, "w": 0.2109},
    ("fresh", "severe"): {"bubble_level": 16.5, "a": 0.0075, "b": 2.9963, "c": 216.8356, "lambda": 0.1602, "w": 0.5117},
}

# Presets del canal RF alpha-mu: nombre -> (alpha, mu)
RF_PRESETS = {
    "rayleigh": (2.0, 1.0),
    "nakagami-2": (2.0, 2.0),
    "nakagami-3": (2.0, 3.0),
    "weibull-2.5": (2.5, 1.0),
    "one-sided-gaussian": (2.0, 0.5),
    "exponential": (1.0, 1.0),
    "alpha-mu-3.5-0.8": (3.5, 0.8),
}

# Modulación BPSK (eta, beta)
BPSK = (1.0, 1.0)

# Rejilla de SNR media por defecto (dB)
DEFAULT_SNR_GRID_DB = (0.0, 40.0, 5.0)
DEFAULT_THRESHOLD_DB = 0.0

METRICS = ("outage", "asep", "capacity")
METHODS = ("closed-form", "asymptotic", "monte-carlo", "quadrature")
METHODS_BY_METRIC = {
    "outage": ("closed-form", "asymptotic", "monte-carlo", "quadrature"),
    "asep": ("closed-form", "monte-carlo", "quadrature"),
    "capacity": ("closed-form", "monte-carlo", "quadrature"),
}
OUTPUT_FORMATS = ("csv", "json", "svg")

# Presets de barrido: cada serie es (etiqueta, agua, turbulencia, preset RF)
SWEEP_PRESETS = {
    "outage-rf-presets": {
        "metric": "outage",
        "methods": ["closed-form", "asymptotic"],
        "series": [
            ["rayleigh", "salty", "weak", "rayleigh"],
            ["nakagami-2", "salty", "weak", "nakagami-2"],
            ["weibull-2.5", "salty", "weak", "weibull-2.5"],
            ["exponential", "salty", "weak", "exponential"],
        ],
    },
    "outage-turbulence": {
        "metric": "outage",
        "methods": ["closed-form", "asymptotic"],
        "series": [
            ["salty-weak", "salty", "weak", "rayleigh"],
            ["salty-moderate", "salty", "moderate", "rayleigh"],
            ["salty-severe", "salty", "severe", "rayleigh"],
        ],
    },
    "asep-rf-presets": {
        "metric": "asep",
        "methods": ["closed-form"],
        "series": [
            ["rayleigh", "salty", "weak", "rayleigh"],
            ["nakagami-2", "salty", "weak", "nakagami-2"],
            ["weibull-2.5", "salty", "weak", "weibull-2.5"],
            ["exponential", "salty", "weak", "exponential"],
        ],
    },
    "asep-turbulence": {
        "metric": "asep",
        "methods": ["closed-form"],
        "series": [
            ["salty-weak", "salty", "weak", "rayleigh"],
            ["salty-moderate", "salty", "moderate", "rayleigh"],
            ["salty-severe", "salty", "severe", "rayleigh"],
        ],
    },
    "capacity-turbulence": {
        "metric": "capacity",
        "methods": ["closed-form"],
        "series": [
            ["salty-weak", "salty", "weak", "rayleigh"],
            ["salty-moderate", "salty", "moderate", "rayleigh"],
            ["salty-severe", "salty", "severe", "rayleigh"],
        ],
    },
}

# Nombres alternativos de presets de barrido
SWEEP_PRESET_ALIASES = {
    "fig2-style": "outage-rf-presets",
}

# Entorno
OUTPUT_DIR_ENV = "UWORF_OUTPUT_DIR"
CONFIG_PATH_ENV = "UWORF_CONFIG"
DEFAULT_OUTPUT_DIR = "resultados"


def get_output_dir(override: str = None) -> str:
    """Directorio de salida: argumento explícito, luego variable de entorno, luego el valor por defecto."""
    if override:
        return override
    return os.environ.get(OUTPUT_DIR_ENV) or DEFAULT_OUTPUT_DIR


def get_config_path(override: str = None):
    """Ruta del archivo JSON de escenarios, si hay alguno configurado."""
    if override:
        return override
    return os.environ.get(CONFIG_PATH_ENV) or None
