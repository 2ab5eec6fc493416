"""Model systems and their stationary phase-space eigenfunctions.

Three models:

* harmonic_oscillator:  H = (w/2)(p^2 + x^2),      N = 1
* damped_toy:           H = -g x p,                N = 1   (lift of xdot = -g x)
* damped_ho:            H = w(p1 x2 - p2 x1) - g(p1 x1 + p2 x2),  N = 2

Each model carries ladder variables, a ground-state exponential killed by
the appropriate one-sided star multiplications, and excited families built
by star-multiplying ladder generators onto the ground state.  Ladder
exponent patterns are chosen so the two-sided eigen-equations

    H * F = F * H = E F

hold with the spectra

    oscillator:  E_n    = hbar w (n + 1/2)
    damped toy:  E_n    = +/- i hbar g (n + 1/2)
    damped ho F: E_nm   = hbar w (m - n) - i hbar g (n + m + 1)
    damped ho G: mu_nm  = hbar w (n + m + 1) - i hbar g (n - m)

(the eigen-residual is the arbiter for the generator bookkeeping; see the
verification module, which checks every member).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple

import numpy as np

from .algebra import QGFunction, QGTerm, QuadExponent, VarSpace, poisson_bracket
from .gausspoly import integrate_partial, sym
from .poly import Poly
from .star import star


class UnsupportedPair(Exception):
    """Pair transform of two delta-type factors in the same variable."""


_KINDS = ("harmonic_oscillator", "damped_toy", "damped_ho")


@dataclass(frozen=True)
class ModelId:
    kind: str
    omega: float = 1.0
    gamma: float = 1.0

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown model '{self.kind}'")
        if self.omega <= 0 or self.gamma <= 0:
            raise ValueError("model parameters must be positive")

    @property
    def n_dof(self) -> int:
        return 2 if self.kind == "damped_ho" else 1

    @property
    def alpha(self) -> complex:
        """w - i g; the complex frequency of the damped oscillator."""
        return complex(self.omega, -self.gamma)

    @classmethod
    def oscillator(cls, omega: float = 1.0) -> "ModelId":
        return cls("harmonic_oscillator", omega=omega)

    @classmethod
    def toy(cls, gamma: float = 1.0) -> "ModelId":
        return cls("damped_toy", gamma=gamma)

    @classmethod
    def dho(cls, omega: float = 1.0, gamma: float = 1.0) -> "ModelId":
        return cls("damped_ho", omega=omega, gamma=gamma)


@dataclass(frozen=True)
class SpectrumEntry:
    model: ModelId
    family: str                 # "W", "F" or "G"
    indices: Tuple[int, ...]
    sign: str                   # "+", "-" or "none"
    eigenvalue: complex


@dataclass
class LadderSet:
    space: VarSpace
    generators: Dict[str, QGFunction]

    def __getitem__(self, name: str) -> QGFunction:
        return self.generators[name]


def _check_space(model: ModelId, space: VarSpace) -> None:
    if space.n_dof != model.n_dof:
        raise ValueError(f"model '{model.kind}' needs N={model.n_dof}, space has N={space.n_dof}")


def hamiltonian(model: ModelId, space: VarSpace) -> QGFunction:
    _check_space(model, space)
    d = space.dim
    if model.kind == "harmonic_oscillator":
        w = model.omega
        return QGFunction.from_poly(space, Poly(d, {(2, 0): w / 2, (0, 2): w / 2}))
    if model.kind == "damped_toy":
        return QGFunction.from_poly(space, Poly(d, {(1, 1): -model.gamma}))
    w, g = model.omega, model.gamma
    # variables (x1, x2, p1, p2)
    return QGFunction.from_poly(space, Poly(d, {
        (0, 1, 1, 0): w, (1, 0, 0, 1): -w,
        (1, 0, 1, 0): -g, (0, 1, 0, 1): -g,
    }))


def lift_dynamics(components: Sequence[Poly], space: VarSpace) -> QGFunction:
    """Hamiltonian lift H(x, p) = sum_k p_k X_k(x) of the flow xdot = X(x).

    Hamilton's equations for the result reproduce the flow exactly:
    {x_k, H} = X_k(x).
    """
    n = space.n_dof
    if len(components) != n:
        raise ValueError("one component per configuration variable required")
    H = Poly(space.dim)
    for k, X in enumerate(components):
        if X.dim != n:
            raise ValueError("vector-field components live on configuration space")
        lifted = X.embed(space.dim, list(range(n)))
        H = H + lifted.mul(Poly.variable(space.dim, n + k))
    return QGFunction.from_poly(space, H)


def koopman_apply(H: QGFunction, f: QGFunction) -> QGFunction:
    """Generator of classical evolution: L_H f = i {f, H}."""
    return poisson_bracket(f, H).scaled(1j)


# ---------------------------------------------------------------------------
# ladder variables
# ---------------------------------------------------------------------------

def ladder_set(model: ModelId, space: VarSpace) -> LadderSet:
    _check_space(model, space)
    s = 1.0 / math.sqrt(2.0 * space.hbar)
    if model.kind == "harmonic_oscillator":
        a = QGFunction.from_poly(space, Poly.linear([s, 1j * s]))
        return LadderSet(space, {"a": a, "a*": a.conjugate()})
    if model.kind == "damped_toy":
        x = QGFunction.coordinate(space, 0)
        p = QGFunction.coordinate(space, 1)
        return LadderSet(space, {"x": x, "p": p})
    a1 = QGFunction.from_poly(space, Poly.linear([s, 1j * s, 0, 0]))
    a2 = QGFunction.from_poly(space, Poly.linear([0, 0, 1j * s, -s]))
    return LadderSet(space, {"a1": a1, "a2": a2, "a1*": a1.conjugate(), "a2*": a2.conjugate()})


def _star_left(gen: QGFunction, f: QGFunction, k: int) -> QGFunction:
    for _ in range(k):
        f = star(gen, f)
    return f


def _star_right(f: QGFunction, gen: QGFunction, k: int) -> QGFunction:
    for _ in range(k):
        f = star(f, gen)
    return f


# ---------------------------------------------------------------------------
# harmonic oscillator family
# ---------------------------------------------------------------------------

def laguerre_coeffs(n: int) -> List[float]:
    """Coefficients of L_n (three-term recurrence), constant term first."""
    if n == 0:
        return [1.0]
    prev, cur = [1.0], [1.0, -1.0]
    for k in range(1, n):
        nxt = [0.0] * (k + 2)
        for j, c in enumerate(cur):
            nxt[j] += (2 * k + 1) * c / (k + 1)
            nxt[j + 1] -= c / (k + 1)
        for j, c in enumerate(prev):
            nxt[j] -= k * c / (k + 1)
        prev, cur = cur, nxt
    return cur


def _radial_poly(space: VarSpace, coeffs: Sequence[float], unit: Poly) -> Poly:
    """sum_k coeffs[k] * unit^k."""
    out = Poly(space.dim)
    power = Poly.const(space.dim, 1.0)
    for k, c in enumerate(coeffs):
        if c != 0:
            out.add_scaled(power, c)
        if k + 1 < len(coeffs):
            power = power.mul(unit)
    return out


def oscillator_wigner(n: int, space: VarSpace) -> QGFunction:
    """W_n = ((-1)^n / pi hbar) e^{-xi/2} L_n(xi), xi = 2(x^2 + p^2)/hbar."""
    if not (0 <= n <= 12):
        raise ValueError("supported index range is 0 <= n <= 12")
    if space.n_dof != 1:
        raise ValueError("oscillator family lives on N=1")
    hbar = space.hbar
    xi = Poly(2, {(2, 0): 2.0 / hbar, (0, 2): 2.0 / hbar})
    poly = _radial_poly(space, laguerre_coeffs(n), xi).scaled((-1.0) ** n / (math.pi * hbar))
    A = (2.0 / hbar) * np.eye(2)
    return QGFunction(space, [QGTerm(poly, QuadExponent(A, np.zeros(2)))])


def oscillator_wigner_ladder(n: int, space: VarSpace) -> QGFunction:
    """W_n from the star-Fock construction a*^n * W_0 * a^n / n!."""
    if not (0 <= n <= 12):
        raise ValueError("supported index range is 0 <= n <= 12")
    lad = ladder_set(ModelId.oscillator(), space)
    out = oscillator_wigner(0, space)
    out = _star_left(lad["a*"], out, n)
    out = _star_right(out, lad["a"], n)
    return out.scaled(1.0 / math.factorial(n))


# ---------------------------------------------------------------------------
# damped toy model family
# ---------------------------------------------------------------------------

def toy_resonant(n: int, sign: str, space: VarSpace) -> QGFunction:
    """F^s_n = ((-1)^n / pi hbar) e^{-eta_s/2} L_n(eta_s), eta_s = s 4i x p / hbar.

    The sign-resolved variable eta_s makes the plus ground state
    e^{-2ixp/hbar} (killed by p* from the left and *x from the right) and
    the minus family its complex conjugate.
    """
    if not (0 <= n <= 12):
        raise ValueError("supported index range is 0 <= n <= 12")
    if space.n_dof != 1:
        raise ValueError("toy family lives on N=1")
    s = {"+": 1.0, "-": -1.0}[sign]
    hbar = space.hbar
    eta = Poly(2, {(1, 1): s * 4j / hbar})
    poly = _radial_poly(space, laguerre_coeffs(n), eta).scaled((-1.0) ** n / (math.pi * hbar))
    A = np.array([[0.0, s * 2j / hbar], [s * 2j / hbar, 0.0]])
    return QGFunction(space, [QGTerm(poly, QuadExponent(A, np.zeros(2)))])


def toy_resonant_ladder(n: int, sign: str, space: VarSpace) -> QGFunction:
    """F^+_n = (i/hbar)^n / n! x^n * F^+_0 * p^n (and the conjugate pattern)."""
    if not (0 <= n <= 12):
        raise ValueError("supported index range is 0 <= n <= 12")
    x = QGFunction.coordinate(space, 0)
    p = QGFunction.coordinate(space, 1)
    hbar = space.hbar
    if sign == "+":
        out = _star_right(_star_left(x, toy_resonant(0, "+", space), n), p, n)
        return out.scaled((1j / hbar) ** n / math.factorial(n))
    out = _star_right(_star_left(p, toy_resonant(0, "-", space), n), x, n)
    return out.scaled((-1j / hbar) ** n / math.factorial(n))


# ---------------------------------------------------------------------------
# damped harmonic oscillator families
# ---------------------------------------------------------------------------

def dho_f(n: int, m: int, sign: str, space: VarSpace) -> QGFunction:
    """Integrable damped-oscillator family, normalized so the integral is 1.

    Ground state F^+_00 = (pi hbar)^{-2} e^{(2i/hbar)(x1 p1 + x2 p2)}; excited
    members (a2*)^m (a2)^n * F^+_00 * (a1)^m (a1*)^n; the minus family is the
    complex conjugate.  The prefactor makes both the normalization integral
    and the star idempotency constant come out right.
    """
    if not (0 <= n <= 6 and 0 <= m <= 6):
        raise ValueError("supported index range is 0 <= n, m <= 6")
    if space.n_dof != 2:
        raise ValueError("damped-oscillator family lives on N=2")
    if sign == "-":
        return dho_f(n, m, "+", space).conjugate()
    hbar = space.hbar
    A = np.zeros((4, 4), dtype=complex)
    A[0, 2] = A[2, 0] = -2j / hbar
    A[1, 3] = A[3, 1] = -2j / hbar
    F00 = QGFunction.from_exponent(space, A, coeff=1.0 / (math.pi * hbar) ** 2)
    if n == 0 and m == 0:
        return F00
    lad = ladder_set(ModelId.dho(), space)
    out = _star_left(lad["a2"], F00, n)
    out = _star_left(lad["a2*"], out, m)
    out = _star_right(out, lad["a1"], m)
    out = _star_right(out, lad["a1*"], n)
    total = out.gaussian_integral()
    return out.scaled(1.0 / total)


def dho_g(n: int, m: int, space: VarSpace) -> QGFunction:
    """Non-integrable companion family built on G_00 = e^{(2/hbar)(x1 p2 - x2 p1)}.

    Members (a1*)^m (a2*)^n * G_00 * (a1)^n (a2)^m / (n! m!); the generator
    exponents are fixed by requiring the two-sided eigenvalue mu_nm.  The
    n < m members are built as conjugates of their mirror partners so that
    conj(G_nm) = G_mn holds exactly, not merely to rounding.
    """
    if not (0 <= n <= 6 and 0 <= m <= 6):
        raise ValueError("supported index range is 0 <= n, m <= 6")
    if space.n_dof != 2:
        raise ValueError("damped-oscillator family lives on N=2")
    if n < m:
        return dho_g(m, n, space).conjugate()
    hbar = space.hbar
    A = np.zeros((4, 4))
    A[0, 3] = A[3, 0] = -2.0 / hbar
    A[1, 2] = A[2, 1] = 2.0 / hbar
    G00 = QGFunction.from_exponent(space, A)
    if n == 0 and m == 0:
        return G00
    lad = ladder_set(ModelId.dho(), space)
    out = _star_left(lad["a2*"], G00, n)
    out = _star_left(lad["a1*"], out, m)
    out = _star_right(out, lad["a1"], n)
    out = _star_right(out, lad["a2"], m)
    return out.scaled(1.0 / (math.factorial(n) * math.factorial(m)))


# ---------------------------------------------------------------------------
# spectra
# ---------------------------------------------------------------------------

def spectrum(model: ModelId, indices, sign: str = "+", family: str | None = None) -> SpectrumEntry:
    """Eigenvalue table entry, in units of hbar (scale by the space's hbar)."""
    indices = tuple(int(i) for i in (indices if hasattr(indices, "__len__") else (indices,)))

    def entry(fam, sg, value):
        return SpectrumEntry(model, fam, indices, sg, complex(value))

    if model.kind == "harmonic_oscillator":
        (n,) = indices
        if n < 0:
            raise ValueError("index must be nonnegative")
        return entry("W", "none", model.omega * (n + 0.5))
    if model.kind == "damped_toy":
        (n,) = indices
        if n < 0:
            raise ValueError("index must be nonnegative")
        s = {"+": 1.0, "-": -1.0}[sign]
        return entry("F", sign, s * 1j * model.gamma * (n + 0.5))
    n, m = indices
    if n < 0 or m < 0:
        raise ValueError("indices must be nonnegative")
    fam = family or "F"
    if fam == "F":
        val = model.omega * (m - n) - 1j * model.gamma * (n + m + 1)
        if sign == "-":
            val = val.conjugate()
        return entry("F", sign, val)
    if fam == "G":
        return entry("G", "none", model.omega * (n + m + 1) - 1j * model.gamma * (n - m))
    raise ValueError(f"unknown family '{fam}'")


def eigenvalue(model: ModelId, space: VarSpace, indices, sign: str = "+",
               family: str | None = None) -> complex:
    """Spectrum entry scaled by the space's hbar."""
    return space.hbar * spectrum(model, indices, sign, family).eigenvalue


# ---------------------------------------------------------------------------
# complex scaling
# ---------------------------------------------------------------------------

def conjugation_by_V(f: QGFunction, lam: float) -> QGFunction:
    """V_lam * f * V_{-lam} realized as the substitution X -> e^{-i lam} X,
    P -> e^{+i lam} P (orientation fixed on generators; validated against
    the star series of V_lam order by order in the verification suite)."""
    if f.space.n_dof != 1:
        raise ValueError("complex scaling is defined on the N=1 (X, P) plane")
    M = np.diag([np.exp(-1j * lam), np.exp(1j * lam)])
    return f.substitute_linear(M)


def hyperbolic_frame_matrix() -> np.ndarray:
    """Substitution matrix sending an (X, P)-plane function to (x, p) via
    X = (x + p)/sqrt(2), P = (x - p)/sqrt(2); the frame in which
    -gamma x p becomes (gamma/2)(P^2 - X^2)."""
    return np.array([[1.0, 1.0], [1.0, -1.0]]) / math.sqrt(2.0)


# ---------------------------------------------------------------------------
# wavefunctions and the resonant-pair transform
# ---------------------------------------------------------------------------

@dataclass
class WaveFunction:
    """Configuration-space function: poly x Gaussian terms plus derivative-of-
    delta atoms at the origin.  `smooth` terms are (Poly over N vars, A, b, c);
    `atoms` are (derivative orders per variable, coefficient)."""

    n_vars: int
    smooth: List[Tuple[Poly, np.ndarray, np.ndarray, complex]] = field(default_factory=list)
    atoms: List[Tuple[Tuple[int, ...], complex]] = field(default_factory=list)

    @classmethod
    def monomial(cls, n_vars: int, expo: Tuple[int, ...], coeff: complex = 1.0) -> "WaveFunction":
        return cls(n_vars, smooth=[(Poly.monomial(n_vars, expo, coeff),
                                    np.zeros((n_vars, n_vars)), np.zeros(n_vars), 0.0)])

    @classmethod
    def constant(cls, n_vars: int, coeff: complex = 1.0) -> "WaveFunction":
        return cls.monomial(n_vars, (0,) * n_vars, coeff)

    @classmethod
    def gaussian(cls, n_vars: int, A, b=None, c: complex = 0.0, coeff: complex = 1.0) -> "WaveFunction":
        b = np.zeros(n_vars) if b is None else np.asarray(b, dtype=complex)
        return cls(n_vars, smooth=[(Poly.const(n_vars, coeff),
                                    np.asarray(A, dtype=complex), b, c)])

    @classmethod
    def delta(cls, orders: Tuple[int, ...], coeff: complex = 1.0) -> "WaveFunction":
        return cls(len(orders), atoms=[(tuple(orders), coeff)])

    @classmethod
    def oscillator_ground(cls, hbar: float) -> "WaveFunction":
        """Normalized e^{-x^2/(2 hbar)} ground state."""
        return cls.gaussian(1, np.array([[1.0 / hbar]]), coeff=(math.pi * hbar) ** -0.25)

    @classmethod
    def toy_plus(cls, n: int) -> "WaveFunction":
        """x^n (resonant state paired with the derivative-of-delta below)."""
        return cls.monomial(1, (n,))

    @classmethod
    def toy_minus(cls, n: int, hbar: float) -> "WaveFunction":
        """(-i hbar)^n delta^{(n)}(x)."""
        return cls.delta((n,), (-1j * hbar) ** n)


def _pullback(A, b, c, M):
    """Quadratic-form data of q(M w) for a possibly rectangular M."""
    A2 = sym(M.T @ np.asarray(A, dtype=complex) @ M)
    b2 = M.T @ np.asarray(b, dtype=complex)
    return A2, b2, complex(c)


def wigner_pair_transform(psi1: WaveFunction, psi2: WaveFunction, space: VarSpace) -> QGFunction:
    """Phase-space function of a resonant pair:

        T(z) = (2 pi)^{-N} int dy e^{-i p.y} conj(psi1)(x + hbar y/2)
                                         psi2(x - hbar y/2)

    For psi1 = psi2 a Hilbert-space state this is its Wigner function
    (a normalized Gaussian ground state maps exactly onto the oscillator
    ground-state Wigner function); for resonant pairs it produces the
    stationary eigenfunction families, e.g. (constant, delta) gives the
    plus ground state of the toy model with its standard prefactor.
    """
    n = space.n_dof
    hbar = space.hbar
    if psi1.n_vars != n or psi2.n_vars != n:
        raise ValueError("wavefunction arity does not match the space")
    if psi1.atoms and psi2.atoms:
        raise UnsupportedPair("delta-type factors on both sides of the pair")

    d = space.dim
    out = QGFunction.zero(space)
    pref = (2.0 * math.pi) ** (-n)

    # maps of (x, p, y) -> arguments; variables ordered (x.., p.., y..), dim 3N
    M_plus = np.zeros((n, 3 * n))   # x + hbar y / 2
    M_minus = np.zeros((n, 3 * n))  # x - hbar y / 2
    for k in range(n):
        M_plus[k, k] = 1.0
        M_plus[k, 2 * n + k] = hbar / 2.0
        M_minus[k, k] = 1.0
        M_minus[k, 2 * n + k] = -hbar / 2.0
    A_phase = np.zeros((3 * n, 3 * n), dtype=complex)
    for k in range(n):
        A_phase[n + k, 2 * n + k] = 1j   # contributes -i p_k y_k
        A_phase[2 * n + k, n + k] = 1j

    def smooth_to_big(poly: Poly, A, b, c, M) -> Tuple[Poly, np.ndarray, np.ndarray, complex]:
        A2, b2, c2 = _pullback(A, b, c, M)
        return poly.affine_sub(M), A2, b2, c2

    def sift(coeff_atom, orders, other_poly, other_A, other_b, other_c, M_other, y_sign):
        """Collapse the y-integral with delta derivatives at x ± hbar y/2 = 0."""
        big_poly = other_poly.affine_sub(M_other)
        A_t, b_t, c_t = _pullback(other_A, other_b, other_c, M_other)
        A_t = A_t + A_phase
        term = QGTerm(big_poly, QuadExponent(A_t, b_t, c_t))
        factor = complex(coeff_atom)
        for k, order in enumerate(orders):
            factor *= (2.0 / hbar) ** (order + 1) * ((-1.0) ** order if y_sign < 0 else 1.0)
            for _ in range(order):
                term = term.diff(2 * n + k)
        # substitute y = y_sign * (2/hbar) x  (map from (x, p) back into the big space)
        S = np.zeros((3 * n, d))
        S[:d, :d] = np.eye(d)
        for k in range(n):
            S[2 * n + k, k] = y_sign * 2.0 / hbar
        A_f, b_f, c_f = _pullback(term.expo.A, term.expo.b, term.expo.c, S)
        poly_f = term.poly.affine_sub(S)
        return QGFunction(space, [QGTerm(poly_f.scaled(factor * pref), QuadExponent(A_f, b_f, c_f))])

    for s2_poly, s2_A, s2_b, s2_c in psi2.smooth:
        for s1_poly, s1_A, s1_b, s1_c in psi1.smooth:
            p1, A1, b1, c1 = smooth_to_big(s1_poly.conj(), np.conj(s1_A), np.conj(s1_b),
                                           np.conj(complex(s1_c)), M_plus)
            p2, A2, b2, c2 = smooth_to_big(s2_poly, s2_A, s2_b, s2_c, M_minus)
            A_t = A1 + A2 + A_phase
            b_t = b1 + b2
            c_t = c1 + c2
            A_out, b_out, c_out, poly_out = integrate_partial(
                A_t, b_t, c_t, p1.mul(p2), list(range(2 * n, 3 * n)))
            out = out + QGFunction(space, [QGTerm(poly_out.scaled(pref),
                                                  QuadExponent(A_out, b_out, c_out))])
        for orders, coeff in psi1.atoms:
            # conj(delta atom) sits at x + hbar y/2 = 0  ->  y = -2x/hbar
            out = out + sift(np.conj(coeff), orders, s2_poly, s2_A, s2_b, s2_c, M_minus, -1.0)
    for orders, coeff in psi2.atoms:
        for s1_poly, s1_A, s1_b, s1_c in psi1.smooth:
            # delta atom at x - hbar y/2 = 0  ->  y = +2x/hbar
            out = out + sift(coeff, orders, s1_poly.conj(), np.conj(s1_A), np.conj(s1_b),
                             np.conj(complex(s1_c)), M_plus, 1.0)
    return out
