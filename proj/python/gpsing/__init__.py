"""Constrained minimizers of the singular Gross-Pitaevskii energy.

Thin wrapper over the C++ core; see the README for the CLI and file formats.
"""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
