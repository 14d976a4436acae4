"""Discrete two-well lattice energies for the square-to-rectangular
martensitic transition: domains, Hamiltonians, constrained minimization,
spin comparison, and the grid-perturbation recursion."""

import os
import sys

try:
    from ._core import *  # noqa: F401,F403  (installed wheel layout)
except ImportError:
    _ext_dir = os.environ.get("TWOWELL_EXT_DIR")
    if not _ext_dir:
        raise
    if _ext_dir not in sys.path:
        sys.path.insert(0, _ext_dir)
    from _core import *  # noqa: F401,F403  (in-tree CMake build)
