"""Computational toolkit for graded Lie algebras over p-adic fields.

Layers, from the bottom up:

- :mod:`plgz.padic` — exact arithmetic in Q_p at bounded precision, square
  classes, Hilbert symbols;
- :mod:`plgz.quadform` — classification of quadratic forms over Q_p;
- :mod:`plgz.characters` — tame characters, Gauss sums, local rho/L/epsilon
  factors;
- :mod:`plgz.weil` — Weil indices of quadratic characters;
- :mod:`plgz.diagrams` — weighted Satake-Tits diagrams and their descent;
- :mod:`plgz.realizations` — explicit matrix models (GL/SP/SU);
- :mod:`plgz.schwartz` — Schwartz-Bruhat calculus, Fourier transforms, zeta
  integrals;
- :mod:`plgz.funceq` — coefficient matrices and epsilon factors of the local
  functional equations;
- :mod:`plgz.cli` — the ``plgz`` command-line front end.
"""

from plgz.padic import LocalFieldContext, PadicScalar, SquareClass

__all__ = ["LocalFieldContext", "PadicScalar", "SquareClass"]
__version__ = "0.1.0"
