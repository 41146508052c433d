"""Planar actions of the solvable Baumslag-Solitar groups BS(1,n)."""

from .group import NormalForm, normalize, multiply, invert, parse_word, distortion_word
from .actions import (
    BsAction,
    fast_power,
    make_affine_product,
    make_conjugated_strange_rotation,
    make_diagonal,
    make_phi,
    make_product_action,
    make_strange_rotation,
    make_strange_rotation_action,
    make_translation_product,
)
from .line import FlowSpec, make_affine_line_action, make_flow_line_action, make_trivial_line_action

__version__ = "0.1.0"
