"""
Cargador centralizado de variables de entorno.
Se importa antes que config para que UWORF_OUTPUT_DIR y UWORF_CONFIG
definidas en .env estén disponibles al leer la configuración.
"""
from dotenv import load_dotenv

# Cargar variables de entorno inmediatamente al importar este módulo
load_dotenv()
