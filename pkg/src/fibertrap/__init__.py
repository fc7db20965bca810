"""Two-color evanescent-field atom traps around vacuum-clad nanofibers."""

__version__ = "0.1.0"

from .atom import AtomModel, SpectralLine, cesium, load_atom  # noqa: E402
from .dielectric import SILICA, DielectricModel  # noqa: E402
from .modes import FiberSpec, ModeSolution, normalize_power, solve_he11, v_number  # noqa: E402
from .potential import TrapConfiguration, total_potential  # noqa: E402
from .analysis import TrapReport, analyze, find_minimum  # noqa: E402
from .bound import BoundStateSet, solve_bound_states  # noqa: E402

__all__ = [
    "AtomModel", "SpectralLine", "cesium", "load_atom", "SILICA", "DielectricModel",
    "FiberSpec", "ModeSolution", "normalize_power", "solve_he11", "v_number",
    "TrapConfiguration", "total_potential", "TrapReport", "analyze", "find_minimum",
    "BoundStateSet", "solve_bound_states",
]
