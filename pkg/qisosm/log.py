"""The logger shared by all modules of the qisosm package.

Nothing is printed unless the application configures logging, the
command-line tool does so in :py:func:`qisosm.entrypoint.main`.
"""

from __future__ import annotations

import logging

logger = logging.getLogger("qisosm")
logger.addHandler(logging.NullHandler())
