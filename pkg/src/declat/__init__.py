"""Exact combinatorics of blow-up forests, their contraction lattices and glued t-structures."""

from .errors import DomainError
from .forest import (
    BlowupForest,
    Contraction,
    Node,
    chain_forest,
    conn,
    contraction,
    dec_elements,
    dec_lattice,
    full,
    identity,
    parse_forest,
    satellite_forest,
)
from .kernels import BACKEND
from .lattice import DistLattice, from_order
from .poset import Poset, enumerate_lower_ideals, linear_extensions

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BlowupForest",
    "Contraction",
    "DistLattice",
    "DomainError",
    "Node",
    "Poset",
    "chain_forest",
    "conn",
    "contraction",
    "dec_elements",
    "dec_lattice",
    "enumerate_lower_ideals",
    "from_order",
    "full",
    "identity",
    "linear_extensions",
    "parse_forest",
    "satellite_forest",
]
