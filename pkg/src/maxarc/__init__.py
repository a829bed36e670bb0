"""Maximal arcs in PG(2, 2^m): field arithmetic, conic-family constructions,
arc verification, coefficient identities and searches for {p,q}-maps."""

from __future__ import annotations

__version__ = "0.1.0"

from .gf2m import FieldSpec, field_pair, find_modulus
from .subspaces import DualRep, QuadForm, Subspace, dual_mus, span, subgroup_from_mus
from .geometry import Arc, Conic, INF, build_arc, denniston_arc, verify_maximal_arc
from .pqmaps import PqMap, check_trace_condition, closed_set_from_pq, pq_from_closed_set

__all__ = [
    "Arc", "Conic", "DualRep", "FieldSpec", "INF", "PqMap", "QuadForm", "Subspace",
    "build_arc", "check_trace_condition", "closed_set_from_pq", "denniston_arc",
    "dual_mus", "field_pair", "find_modulus", "pq_from_closed_set", "span",
    "subgroup_from_mus", "verify_maximal_arc",
]
