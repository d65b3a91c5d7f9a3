"""Translation and rotation of spherical Gauss-Laguerre expansions.

The basis ``H_nlm`` is orthonormal for the inner product
``<f, g>_H = int f conj(g) exp(-|x|^2) dx``.  The package evaluates the
matrix elements ``<T(t) R H_nlm, H_n'l'm'>_H`` in closed form and uses them
to score rigid motions of one expansion against another.
"""
from .match import MatchResult, PoseGrid, grid_search, moved_spectrum, overlap
from .sgl import (
    QuadratureRule,
    SglIndex,
    SglSpectrum,
    eval_basis,
    forward_transform,
    normalization,
    radial,
    synthesize,
    weighted_bessel_closed,
)
from .translate import (
    Pose,
    TranslationTable,
    a_coeff,
    build_table,
    coupled_element,
    t_element,
    t_element_exact,
    t_element_signed,
)
from .wigner import EulerZYZ, wigner3j, wigner_d_matrix

__version__ = "0.1.0"

__all__ = [
    "EulerZYZ",
    "MatchResult",
    "Pose",
    "PoseGrid",
    "QuadratureRule",
    "SglIndex",
    "SglSpectrum",
    "TranslationTable",
    "a_coeff",
    "build_table",
    "coupled_element",
    "eval_basis",
    "forward_transform",
    "grid_search",
    "moved_spectrum",
    "normalization",
    "overlap",
    "radial",
    "synthesize",
    "t_element",
    "t_element_exact",
    "t_element_signed",
    "weighted_bessel_closed",
    "wigner3j",
    "wigner_d_matrix",
]
