"""Harmonic analysis numerics on H^2 = SL(2,R)/SO(2) and H^3 = SL(2,C)/SU(2).

Iwasawa analysis, horocycle bracket, Poisson and Helgason transforms,
Op(a) and Wigner pairings, intermediate values, Radon transforms, L_lambda,
Patterson-Sullivan pairings and the stationary-phase leading term.
"""

from .groups import H2, H3, get_model

__version__ = "0.1.0"
__all__ = ["H2", "H3", "get_model", "__version__"]
