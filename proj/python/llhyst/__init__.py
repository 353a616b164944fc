"""Hysteresis experiments on spring ODEs and the Landau-Lifshitz equation."""

import os as _os

# Installed wheels carry the presets next to the package.
_bundled = _os.path.join(_os.path.dirname(__file__), "presets")
if "LLHYST_PRESET_DIR" not in _os.environ and _os.path.isdir(_bundled):
    _os.environ["LLHYST_PRESET_DIR"] = _bundled

from ._core import (
    Error,
    Spec,
    SpecError,
    StabilityError,
    census,
    format_number,
    loop_area,
    loop_metrics,
    preset_names,
    simulate,
    spectrum,
    sweep,
    verify,
    version,
)

__version__ = version()

__all__ = [
    "Error",
    "Spec",
    "SpecError",
    "StabilityError",
    "census",
    "format_number",
    "loop_area",
    "loop_metrics",
    "preset_names",
    "simulate",
    "spectrum",
    "sweep",
    "verify",
    "version",
]
