"""eisq: exact arithmetic for 2-Selmer ranks of CM twists, eta-products and
cuspidal divisor classes on X0(N), Hecke eigenchecks, and effective
non-triviality verdicts for Heegner points on Eisenstein quotients."""

from . import arith, classgroup, descent, etacusp, modforms, quadfield, selmer

__all__ = [
    "arith",
    "classgroup",
    "descent",
    "etacusp",
    "modforms",
    "quadfield",
    "selmer",
]

__version__ = "0.1.0"
