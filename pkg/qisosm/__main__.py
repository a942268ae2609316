"""Run the qisosm checks with ``python -m qisosm``."""

import sys

from . import entrypoint

if __name__ == "__main__":
    sys.exit(entrypoint.main())
