"""Desk-scale laboratory for stabilizer complexity: characteristic tables,
degree-3 uniformity norms, Bell difference sampling, tolerant stabilizer
testing, and constructive stabilizer-witness extraction."""

__all__ = [
    "gf2",
    "states",
    "clifford",
    "charfn",
    "measures",
    "witness",
    "tester",
    "cli",
]

__version__ = "0.1.0"
