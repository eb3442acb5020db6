"""Quadratic equations in free groups and free products.

Modules: ``words`` (free-group arithmetic), ``quadratic`` (canonical forms),
``genus`` (commutator genus), ``surface`` (surface-group homomorphisms and
pinch decompositions), ``product`` (free products) and ``cli``.
"""

from .genus import genus_exact, genus_growth, genus_upper_search, match_wicks, enumerate_wicks_forms
from .product import ProductGroup, group_from_json
from .quadratic import canonicalize, classify_quadratic, polygon_type, transport_solution
from .surface import SurfaceGroupSpec, elementary_check, genus_reduce, klein_classify, make_hom
from .words import FreeGroup, Word, parse_word, format_word

__version__ = "0.1.0"

__all__ = [
    "FreeGroup",
    "ProductGroup",
    "SurfaceGroupSpec",
    "Word",
    "canonicalize",
    "classify_quadratic",
    "elementary_check",
    "enumerate_wicks_forms",
    "format_word",
    "genus_exact",
    "genus_growth",
    "genus_reduce",
    "genus_upper_search",
    "group_from_json",
    "klein_classify",
    "make_hom",
    "match_wicks",
    "parse_word",
    "polygon_type",
    "transport_solution",
]
