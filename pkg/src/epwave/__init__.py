"""Stable evanescent-plane-wave (EPW) approximation of 3D Helmholtz solutions.

Subpackages by layer: :mod:`epwave.specfun` (scalar special functions),
:mod:`epwave.waves` (plane and spherical waves), :mod:`epwave.modal`
(generalized Jacobi-Anger machinery), :mod:`epwave.sampling` (coherence-
optimal EPW set construction), :mod:`epwave.solver` (regularized boundary
sampling), :mod:`epwave.geometry` (boundary nodes and reference solutions),
:mod:`epwave.experiments` (the experiment harness behind the CLI).
"""

__version__ = "0.1.0"
