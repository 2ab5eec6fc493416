"""Sparse complex polynomials in several variables.

Exponent tuples index complex coefficients; the empty map is the zero
polynomial.  Serialization order is graded lexicographic.
"""

from __future__ import annotations

import itertools
import math
from typing import Dict, Iterator, Mapping, Tuple

import numpy as np

Exponent = Tuple[int, ...]


class Poly:
    """Polynomial over ``dim`` complex variables, stored as {exponent: coeff}."""

    __slots__ = ("dim", "terms")

    def __init__(self, dim: int, terms: Mapping[Exponent, complex] | None = None):
        self.dim = int(dim)
        self.terms: Dict[Exponent, complex] = {}
        if terms:
            for e, c in terms.items():
                c = complex(c)
                if c != 0:
                    e = tuple(int(k) for k in e)
                    acc = self.terms.get(e, 0j) + c
                    if acc == 0:
                        self.terms.pop(e, None)
                    else:
                        self.terms[e] = acc

    # -- constructors ------------------------------------------------------
    @classmethod
    def zero(cls, dim: int) -> "Poly":
        return cls(dim)

    @classmethod
    def const(cls, dim: int, c: complex) -> "Poly":
        return cls(dim, {(0,) * dim: c} if c != 0 else None)

    @classmethod
    def monomial(cls, dim: int, expo: Exponent, c: complex = 1.0) -> "Poly":
        return cls(dim, {tuple(expo): c})

    @classmethod
    def variable(cls, dim: int, index: int, c: complex = 1.0) -> "Poly":
        e = [0] * dim
        e[index] = 1
        return cls(dim, {tuple(e): c})

    @classmethod
    def linear(cls, coeffs, const: complex = 0.0) -> "Poly":
        """c0 + sum_i coeffs[i] * z_i."""
        dim = len(coeffs)
        terms: Dict[Exponent, complex] = {}
        for i, a in enumerate(coeffs):
            if a != 0:
                e = [0] * dim
                e[i] = 1
                terms[tuple(e)] = complex(a)
        if const != 0:
            terms[(0,) * dim] = complex(const)
        return cls(dim, terms)

    # -- predicates / metrics ----------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def coeff_abs_sum(self) -> float:
        return float(sum(abs(c) for c in self.terms.values()))

    def max_abs_coeff(self) -> float:
        return max((abs(c) for c in self.terms.values()), default=0.0)

    def copy(self) -> "Poly":
        p = Poly(self.dim)
        p.terms = dict(self.terms)
        return p

    # -- arithmetic ----------------------------------------------------------
    def __add__(self, other: "Poly") -> "Poly":
        out = self.copy()
        t = out.terms
        for e, c in other.terms.items():
            acc = t.get(e, 0j) + c
            if acc == 0:
                t.pop(e, None)
            else:
                t[e] = acc
        return out

    def __sub__(self, other: "Poly") -> "Poly":
        return self + other.scaled(-1.0)

    def scaled(self, c: complex) -> "Poly":
        if c == 0:
            return Poly(self.dim)
        p = Poly(self.dim)
        p.terms = {e: v * c for e, v in self.terms.items()}
        return p

    def mul(self, other: "Poly") -> "Poly":
        out: Dict[Exponent, complex] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                acc = out.get(e, 0j) + c1 * c2
                if acc == 0:
                    out.pop(e, None)
                else:
                    out[e] = acc
        p = Poly(self.dim)
        p.terms = out
        return p

    def add_scaled(self, other: "Poly", c: complex) -> None:
        """In-place self += c*other (used in hot recursions)."""
        if c == 0:
            return
        t = self.terms
        for e, v in other.terms.items():
            acc = t.get(e, 0j) + c * v
            if acc == 0:
                t.pop(e, None)
            else:
                t[e] = acc

    def diff(self, index: int) -> "Poly":
        out: Dict[Exponent, complex] = {}
        for e, c in self.terms.items():
            k = e[index]
            if k:
                e2 = list(e)
                e2[index] = k - 1
                e2 = tuple(e2)
                acc = out.get(e2, 0j) + k * c
                if acc == 0:
                    out.pop(e2, None)
                else:
                    out[e2] = acc
        p = Poly(self.dim)
        p.terms = out
        return p

    def conj(self) -> "Poly":
        p = Poly(self.dim)
        p.terms = {e: c.conjugate() for e, c in self.terms.items()}
        return p

    def eval(self, z) -> complex:
        z = np.asarray(z, dtype=complex)
        total = 0j
        for e, c in self.terms.items():
            v = c
            for i, k in enumerate(e):
                if k:
                    v = v * z[i] ** k
            total += v
        return complex(total)

    def affine_sub(self, M, shift=None) -> "Poly":
        """Substitute z_i -> sum_j M[i, j] w_j + shift_i; result over w."""
        M = np.asarray(M, dtype=complex)
        dim_out = M.shape[1]
        shift = np.zeros(M.shape[0], dtype=complex) if shift is None else np.asarray(shift, dtype=complex)
        pow_cache: Dict[Tuple[int, int], Poly] = {}

        def lin_pow(i: int, k: int) -> Poly:
            key = (i, k)
            got = pow_cache.get(key)
            if got is not None:
                return got
            if k == 0:
                r = Poly.const(dim_out, 1.0)
            elif k == 1:
                r = Poly.linear(M[i, :], shift[i])
            else:
                r = lin_pow(i, k - 1).mul(lin_pow(i, 1))
            pow_cache[key] = r
            return r

        out = Poly(dim_out)
        for e, c in self.terms.items():
            fac = Poly.const(dim_out, c)
            for i, k in enumerate(e):
                if k:
                    fac = fac.mul(lin_pow(i, k))
            out = out + fac
        return out

    def embed(self, dim_out: int, var_map) -> "Poly":
        """Relabel variable i -> var_map[i] in a larger variable set."""
        out: Dict[Exponent, complex] = {}
        for e, c in self.terms.items():
            e2 = [0] * dim_out
            for i, k in enumerate(e):
                if k:
                    e2[var_map[i]] += k
            out[tuple(e2)] = out.get(tuple(e2), 0j) + c
        return Poly(dim_out, out)

    def pruned(self, abs_tol: float) -> "Poly":
        p = Poly(self.dim)
        p.terms = {e: c for e, c in self.terms.items() if abs(c) > abs_tol}
        return p

    def canonical_items(self):
        """Items sorted in graded-lex order (total degree, then exponents)."""
        return sorted(self.terms.items(), key=lambda kv: (sum(kv[0]), kv[0]))

    def __repr__(self) -> str:
        if not self.terms:
            return "Poly(0)"
        bits = [f"{c:.6g}*z^{e}" for e, c in itertools.islice(self.canonical_items(), 8)]
        more = "" if len(self.terms) <= 8 else f" +{len(self.terms) - 8} terms"
        return "Poly(" + " + ".join(bits) + more + ")"


def multi_indices(dim: int, max_total: int) -> Iterator[Exponent]:
    """All exponent tuples over `dim` variables with total degree <= max_total."""
    if dim == 0:
        yield ()
        return
    for head in range(max_total + 1):
        for tail in multi_indices(dim - 1, max_total - head):
            yield (head,) + tail


def multi_factorial(e: Exponent) -> float:
    out = 1.0
    for k in e:
        out *= math.factorial(k)
    return out


def multi_binom(e: Exponent, k: Exponent) -> float:
    out = 1.0
    for a, b in zip(e, k):
        if b > a:
            return 0.0
        out *= math.comb(a, b)
    return out
