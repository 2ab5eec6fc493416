import math

import numpy as np
import pytest

from mqds.algebra import QGFunction, QGTerm, QuadExponent, VarSpace
from mqds.poly import Poly


@pytest.fixture
def space():
    return VarSpace(1, 1.0)


@pytest.fixture
def space2():
    return VarSpace(2, 1.0)


def w0(space):
    """Oscillator ground-state function (1/pi hbar) e^{-(x^2+p^2)/hbar}."""
    h = space.hbar
    return QGFunction.from_exponent(space, (2.0 / h) * np.eye(2), coeff=1.0 / (math.pi * h))


def f0_plus(space):
    """(1/pi hbar) e^{-2ixp/hbar}."""
    h = space.hbar
    A = np.array([[0.0, 2j / h], [2j / h, 0.0]])
    return QGFunction.from_exponent(space, A, coeff=1.0 / (math.pi * h))


def random_gaussian(space, rng, scale=1.0):
    """Random strictly integrable poly x Gaussian over the given space."""
    d = space.dim
    R = rng.normal(size=(d, d))
    S = rng.normal(size=(d, d))
    A = R.T @ R + 0.4 * np.eye(d) + 0.35j * (S + S.T)
    b = rng.normal(size=d) + 1j * rng.normal(size=d)
    poly = Poly(d, {tuple(rng.integers(0, 3, size=d)): scale * complex(rng.normal(), rng.normal())
                    for _ in range(3)})
    if poly.is_zero():
        poly = Poly.const(d, 1.0)
    return QGFunction(space, [QGTerm(poly, QuadExponent(A, b))])


def random_polynomial(space, rng, deg=3):
    d = space.dim
    terms = {tuple(rng.integers(0, deg + 1, size=d)): complex(rng.normal(), rng.normal())
             for _ in range(4)}
    p = Poly(d, terms)
    if p.is_zero():
        p = Poly.const(d, 1.0)
    return QGFunction.from_poly(space, p)
