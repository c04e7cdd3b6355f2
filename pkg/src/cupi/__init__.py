"""Exact cochain-level operations on finite complexes.

Cup-i products and Steenrod squares, filtered complexes and spectral
sequences, normalizations of cubical and poset diagrams, weight pages of
hyperresolutions, perversity arithmetic and intersection cohomology,
all over exact F2 or Q coefficients.
"""

__version__ = "0.1.0"

from .exact import F2, Q, Matrix, Subspace, CochainComplex, ChainMap

__all__ = ["F2", "Q", "Matrix", "Subspace", "CochainComplex", "ChainMap", "__version__"]
