"""Exact computational engine for graph complexes of modular graphs.

The package builds chain complexes of genus-labeled, leg-labeled multigraphs
over arbitrary-precision rationals, computes their homology exactly, and
verifies the combinatorial deformation retract on the complexes of ordered
nestings that underlies the whole construction.

Subpackage map:

- ``graphs``        modular graphs, canonical forms, gluing/contraction, enumeration
- ``nestings``      nests, nestings, layers, line graphs and tubing posets
- ``fiber``         the complex of mod-2 ordered nestings and its retract maps
- ``coefficients``  vertex label systems (commutative, cyclic Lie, odd twists)
- ``feynman``       assembly of the edge-expansion chain complex for a label system
- ``homalg``        exact sparse linear algebra, homology, symmetric group characters
- ``spectral``      bigraded dimension tables for the two standard filtrations
- ``cli``           command line frontend
"""

__version__ = "0.1.0"
