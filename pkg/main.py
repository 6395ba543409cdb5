"""
Punto de entrada principal del toolkit del relé UWO -> RF.

Ejemplos:
    python main.py scenarios --water salty
    python main.py sweep --water salty --turbulence weak --rf rayleigh --metric outage --methods all
    python main.py sweep --preset outage-turbulence --format csv svg --out resultados
    python main.py validate --quick
"""
# Los módulos cargan .env automáticamente vía env_loader
import sys

from cli import main

if __name__ == "__main__":
    sys.exit(main())
