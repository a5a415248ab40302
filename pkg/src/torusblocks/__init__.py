"""Modular data, Macdonald polynomials, quantum-group trace functions and
elliptic integral blocks for sl2 conformal blocks on the torus.

Submodules
----------
qcore
    Exact arithmetic in cyclotomic fields and q-numbers at q = e^{pi i/kappa}.
macdonald
    A1 Macdonald polynomials P_n^(k) and the shift operator.
modular
    T and S matrices on the block basis, modular relations and Kirillov comparison.
trace
    Trace functions psi^(k) with their renormalization and a Verma-module oracle.
analytic
    Theta functions, finite-part quadrature and the integral blocks u^(k)_n.
cli
    The ``torusblocks`` command-line tool.
"""

from __future__ import annotations

from .qcore import CycloScalar, QContext
from .modular import ModularData, s_matrix, verify_relations

__all__ = ["CycloScalar", "QContext", "ModularData", "s_matrix", "verify_relations", "__version__"]

__version__ = "0.1.0"
