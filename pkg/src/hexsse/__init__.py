"""SSE Monte Carlo for the transverse-field Ising model on a frustrated honeycomb lattice."""

from .lattice import build_lattice, dump_lattice, frustration_indicator, parse_lattice

__version__ = "0.1.0"

__all__ = [
    "build_lattice",
    "dump_lattice",
    "parse_lattice",
    "frustration_indicator",
    "__version__",
]
