"""Exact q-series invariants of plumbed 3-manifolds, two-variable series of
plumbed knot complements, their Dehn-surgery calculus, and the quantum
A-polynomial recursion for the trefoil and figure-eight knots."""

from .exactnum import Matrix, Inertia, SNF, Singular, NotPositiveDefinite
from .qseries import QSeries, XSeries, LaurentPoly, XRationalFunction
from .plumbing import PlumbingGraph, NeumannMove, make_graph, parse_graph
from .closed import zhat_closed, zhat_all_classes, brieskorn_zhat, false_theta
from .knots import (torus_fk, torus_psi, fk_plumbed, zhat_knot, surgery_zhat,
                    SurgeryPlan, mirror_series, laplace)
from .recursion import (jones_trefoil, jones_fig8, ahat_operator, solve_pk,
                        fk_extend, fk_initial, derive_f_recursion,
                        verify_annihilation)

__all__ = [
    "Matrix", "Inertia", "SNF", "Singular", "NotPositiveDefinite",
    "QSeries", "XSeries", "LaurentPoly", "XRationalFunction",
    "PlumbingGraph", "NeumannMove", "make_graph", "parse_graph",
    "zhat_closed", "zhat_all_classes", "brieskorn_zhat", "false_theta",
    "torus_fk", "torus_psi", "fk_plumbed", "zhat_knot", "surgery_zhat",
    "SurgeryPlan", "mirror_series", "laplace",
    "jones_trefoil", "jones_fig8", "ahat_operator", "solve_pk",
    "fk_extend", "fk_initial", "derive_f_recursion", "verify_annihilation",
]
