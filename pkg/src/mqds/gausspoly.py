"""Closed-form Gaussian calculus for polynomial-times-exponential integrands.

Everything here works on raw data: a complex symmetric matrix A, vector b,
scalar c and a sparse `Poly` prefactor, denoting

    P(z) * exp(-1/2 z^T A z + b^T z + c),   z in C^d (evaluated on R^d).

Conventions:

* integral over R^d of exp(-1/2 z^T A z + b^T z) equals
  (2 pi)^(d/2) det(A)^(-1/2) exp(1/2 b^T A^{-1} b), valid for Re A > 0 and
  extended to oscillatory exponents by the Fresnel limit A -> A + eps*I,
  eps -> 0+.  The determinant root is taken as the product of per-eigenvalue
  principal square roots, which is the branch continuous along eps.
* polynomial moments come from the Gaussian integration-by-parts recursion
      E[z^(a+e_i)] = mu_i E[z^a] + sum_j Sigma_ij a_j E[z^(a-e_j)]
  with mu = A^{-1} b and Sigma = A^{-1}; it holds for complex symmetric A by
  analytic continuation.
"""

from __future__ import annotations

import math
from typing import Dict, List, Sequence, Tuple

import numpy as np

from .poly import Exponent, Poly

_EIG_TOL = 1e-12


class NonIntegrable(Exception):
    """Gaussian integral has no eps -> 0+ Fresnel limit."""


class GaussianCompositionSingular(Exception):
    """Composed quadratic form of a star product is singular."""


def sym(A: np.ndarray) -> np.ndarray:
    return 0.5 * (A + A.T)


def _branch_sqrt_det(eigs: np.ndarray, eps: float = 0.0) -> complex:
    """Product of principal square roots of (lambda_k + eps).

    This equals the branch of det(A + eps I)^(1/2) obtained by continuous
    deformation from large eps, provided no eigenvalue sits on the negative
    real axis (callers must check).
    """
    out = 1.0 + 0j
    for lam in eigs:
        out *= np.sqrt(lam + eps)
    return complex(out)


def _check_fresnel_spectrum(A: np.ndarray, scale: float) -> np.ndarray:
    """Return eigenvalues of A; raise NonIntegrable when the eps-limit fails.

    Requires Re A >= 0 (so the damped integral exists for every eps > 0) and
    A nonsingular (so the limit is finite).
    """
    tol = _EIG_TOL * max(scale, 1.0)
    re_eigs = np.linalg.eigvalsh(sym(A.real))
    if re_eigs.min() < -tol:
        raise NonIntegrable("exponent grows on the real domain (Re A indefinite)")
    eigs = np.linalg.eigvals(A)
    if np.abs(eigs).min() <= tol:
        raise NonIntegrable("singular quadratic form (det A ~ 0)")
    for lam in eigs:
        if abs(lam.imag) <= tol and lam.real < 0:
            raise NonIntegrable("negative real eigenvalue in the exponent")
    return eigs


def moments_scalar(Sigma: np.ndarray, mu: np.ndarray, needed: Sequence[Exponent]) -> Dict[Exponent, complex]:
    """Moment table E[z^alpha] for a (complex) Gaussian with mean mu, cov Sigma."""
    dim = len(mu)
    memo: Dict[Exponent, complex] = {(0,) * dim: 1.0 + 0j}

    def get(alpha: Exponent) -> complex:
        got = memo.get(alpha)
        if got is not None:
            return got
        i = max(k for k in range(dim) if alpha[k] > 0)
        beta = list(alpha)
        beta[i] -= 1
        beta_t = tuple(beta)
        val = mu[i] * get(beta_t)
        for j in range(dim):
            if beta_t[j]:
                gamma = list(beta_t)
                gamma[j] -= 1
                val += Sigma[i, j] * beta_t[j] * get(tuple(gamma))
        memo[alpha] = val
        return val

    return {a: get(tuple(a)) for a in needed}


def moments_poly(Sigma: np.ndarray, mu_polys: List[Poly], needed: Sequence[Exponent],
                 memo: Dict[Exponent, Poly] | None = None) -> Dict[Exponent, Poly]:
    """Moment recursion where the mean components are Poly-valued.

    Used when a Gaussian block is integrated out and the completed-square
    mean is an affine function of the remaining variables (or of formal
    source parameters).  `memo` may be shared across calls with identical
    (Sigma, mu_polys).
    """
    dim = Sigma.shape[0]
    out_dim = mu_polys[0].dim if mu_polys else 0
    if memo is None:
        memo = {}
    if not memo:
        memo[(0,) * dim] = Poly.const(out_dim, 1.0)

    def get(alpha: Exponent) -> Poly:
        got = memo.get(alpha)
        if got is not None:
            return got
        i = max(k for k in range(dim) if alpha[k] > 0)
        beta = list(alpha)
        beta[i] -= 1
        beta_t = tuple(beta)
        val = mu_polys[i].mul(get(beta_t))
        for j in range(dim):
            if beta_t[j]:
                gamma = list(beta_t)
                gamma[j] -= 1
                val.add_scaled(get(tuple(gamma)), Sigma[i, j] * beta_t[j])
        memo[alpha] = val
        return val

    return {a: get(tuple(a)) for a in needed}


def _closed_value(A: np.ndarray, b: np.ndarray, c: complex, poly: Poly,
                  eigs: np.ndarray, eps: float) -> complex:
    d = A.shape[0]
    M = A + eps * np.eye(d)
    Minv = np.linalg.inv(M)
    mu = Minv @ b
    pref = (2.0 * math.pi) ** (d / 2.0) / _branch_sqrt_det(eigs, eps)
    base = pref * np.exp(0.5 * b @ mu + c)
    mom = moments_scalar(Minv, mu, list(poly.terms.keys()))
    acc = 0j
    for e, coef in poly.terms.items():
        acc += coef * mom[e]
    return complex(base * acc)


def integrate_poly_exp(A: np.ndarray, b: np.ndarray, c: complex, poly: Poly,
                       eps_start: float = 1e-2, eps_stop: float = 1e-8,
                       eps_ratio: float = 0.1, conv_tol: float = 1e-8) -> complex:
    """Fresnel-regularized integral of P(z) exp(-z.A.z/2 + b.z + c) over R^d.

    Evaluates the closed form on a geometric eps ladder and Richardson
    (Neville) extrapolates to eps = 0; raises NonIntegrable when the
    tableau fails to settle within `conv_tol` (relative).
    """
    if poly.is_zero():
        return 0j
    scale = float(np.abs(A).max(initial=0.0))
    eigs = _check_fresnel_spectrum(A, scale)

    eps_list: List[float] = []
    eps = eps_start
    while eps >= eps_stop * (1 - 1e-12):
        eps_list.append(eps)
        eps *= eps_ratio
    vals = [_closed_value(A, b, c, poly, eigs, e) for e in eps_list]

    # Neville tableau extrapolated to eps = 0.
    tbl = list(vals)
    last_diag = tbl[0]
    diag_prev = None
    for k in range(1, len(eps_list)):
        for j in range(len(eps_list) - 1, k - 1, -1):
            x_hi, x_lo = eps_list[j - k], eps_list[j]
            tbl[j] = tbl[j] + (tbl[j] - tbl[j - 1]) * (x_lo / (x_hi - x_lo))
        diag_prev, last_diag = last_diag, tbl[-1]
    if diag_prev is not None:
        err = abs(last_diag - diag_prev)
        if err > conv_tol * max(1.0, abs(last_diag)):
            raise NonIntegrable(f"eps-extrapolation did not converge (residual {err:.3g})")
    return complex(last_diag)


def integrate_partial(A: np.ndarray, b: np.ndarray, c: complex, poly: Poly,
                      out_idx: Sequence[int]) -> Tuple[np.ndarray, np.ndarray, complex, Poly]:
    """Integrate out the variables `out_idx`, keeping the rest.

    Returns (A', b', c', P') over the kept variables, in their original
    relative order.  Requires the out-block to have Re >= 0 spectrum and be
    nonsingular (principal-branch prefactor; no eps ladder here since each
    call site guarantees an honestly convergent block).
    """
    d = A.shape[0]
    out_idx = sorted(out_idx)
    keep_idx = [i for i in range(d) if i not in out_idx]
    S, K = np.ix_(out_idx, out_idx), np.ix_(keep_idx, keep_idx)
    A_ss = A[S]
    A_sk = A[np.ix_(out_idx, keep_idx)]
    scale = float(np.abs(A_ss).max(initial=0.0))
    eigs = _check_fresnel_spectrum(A_ss, scale)
    M_inv = np.linalg.inv(A_ss)
    b_s, b_k = b[out_idx], b[keep_idx]

    A_new = sym(A[K] - A_sk.T @ M_inv @ A_sk)
    b_new = b_k - A_sk.T @ (M_inv @ b_s)
    c_new = c + 0.5 * b_s @ (M_inv @ b_s)
    pref = (2.0 * math.pi) ** (len(out_idx) / 2.0) / _branch_sqrt_det(eigs)

    # mean of the integrated block is affine in the kept variables
    nk = len(keep_idx)
    lin = -M_inv @ A_sk                      # (len(out), nk)
    aff = M_inv @ b_s
    mu_polys = [Poly.linear(lin[i, :], aff[i]) for i in range(len(out_idx))]

    # split each monomial into kept / integrated-out parts
    grouped: Dict[Exponent, Poly] = {}
    for e, coef in poly.terms.items():
        e_keep = tuple(e[i] for i in keep_idx)
        e_out = tuple(e[i] for i in out_idx)
        g = grouped.get(e_out)
        if g is None:
            grouped[e_out] = Poly(nk, {e_keep: coef})
        else:
            g.add_scaled(Poly(nk, {e_keep: coef}), 1.0)
    mom = moments_poly(np.asarray(M_inv), mu_polys, list(grouped.keys()))
    new_poly = Poly(nk)
    for e_out, pk in grouped.items():
        new_poly = new_poly + pk.mul(mom[e_out])
    return A_new, b_new, complex(c_new), new_poly.scaled(pref)


class CompositionContext:
    """Shared data for the Gaussian star composition at fixed exponents.

    Built once per (A1, b1, A2, b2) pair; the Hermite-moment tables are
    memoized so that families sharing a common exponent (every ladder-built
    eigenfunction family does) reuse all recursion work.
    """

    def __init__(self, n_dof: int, hbar: float,
                 A1: np.ndarray, b1: np.ndarray, A2: np.ndarray, b2: np.ndarray):
        d = 2 * n_dof
        self.d = d
        kappa = 2j / hbar
        J = np.zeros((d, d))
        J[:n_dof, n_dof:] = np.eye(n_dof)
        J[n_dof:, :n_dof] = -np.eye(n_dof)

        AA = np.zeros((2 * d, 2 * d), dtype=complex)
        AA[:d, :d] = A1
        AA[d:, d:] = A2
        AA[:d, d:] = -kappa * J
        AA[d:, :d] = -kappa * J.T
        scale = float(np.abs(AA).max(initial=0.0))
        tol = _EIG_TOL * max(scale, 1.0)
        eigs = np.linalg.eigvals(AA)
        if np.abs(eigs).min() <= tol:
            raise GaussianCompositionSingular("composed quadratic form is singular")
        for lam in eigs:
            if abs(lam.imag) <= tol and lam.real < 0:
                raise GaussianCompositionSingular(
                    "no Fresnel branch: negative real eigenvalue in composition")

        G = np.linalg.inv(AA)
        B = np.zeros((2 * d, d), dtype=complex)
        B[:d, :] = -kappa * J
        B[d:, :] = kappa * J
        beta0 = np.concatenate([b1, b2])

        self.A3 = sym(-B.T @ G @ B)
        self.b3 = B.T @ (G @ beta0)
        self.c3_base = 0.5 * beta0 @ (G @ beta0)          # add c1 + c2 at use site
        self.pref = (2.0 / hbar) ** d / _branch_sqrt_det(eigs)

        T = G @ B                                          # (2d, d): z-coupling of the source means
        s_vec = G @ beta0
        # linear forms g_i(z) entering the Hermite recursions
        self.g_u = [Poly.linear(T[i, :], s_vec[i]) for i in range(d)]
        self.G_uu = G[:d, :d]
        self.G_vv = G[d:, d:]
        self.G_vu = G[d:, :d]
        # v-block linear forms over (z, u-symbols): dimension d + d
        self.g_v = []
        for j in range(d):
            coeffs = np.concatenate([T[d + j, :], self.G_vu[j, :]])
            self.g_v.append(Poly.linear(coeffs, s_vec[d + j]))
        self._mu_memo: Dict[Exponent, Poly] = {}
        self._mv_memo: Dict[Exponent, Poly] = {}

    def compose(self, P1: Poly, P2: Poly) -> Poly:
        """Prefactor polynomial of (P1 e^{q1}) star (P2 e^{q2}), without `pref`.

        Implements P1(d/db1) P2(d/db2) applied to the pure-exponential
        composition, via block-Hermite recursions: the v-block is reduced
        first with the u-coupling kept symbolic, then the u-block.
        """
        d = self.d
        mv = moments_poly(self.G_vv, self.g_v, list(P2.terms.keys()), self._mv_memo)
        # Phi(z, u) = sum_delta c2_delta mv_delta; collect by u-exponent kappa
        phi: Dict[Exponent, Poly] = {}
        for delta, c2 in P2.terms.items():
            for e2d, coef in mv[delta].terms.items():
                kz, ku = e2d[:d], e2d[d:]
                slot = phi.get(ku)
                if slot is None:
                    slot = Poly(d)
                    phi[ku] = slot
                slot.add_scaled(Poly(d, {kz: 1.0}), c2 * coef)

        needed_u = set()
        for gamma in P1.terms:
            for ku in phi:
                if all(k <= g for k, g in zip(ku, gamma)):
                    needed_u.add(tuple(g - k for g, k in zip(gamma, ku)))
        mu = moments_poly(self.G_uu, self.g_u, list(needed_u), self._mu_memo)

        out = Poly(d)
        for gamma, c1 in P1.terms.items():
            for ku, phi_k in phi.items():
                if not all(k <= g for k, g in zip(ku, gamma)):
                    continue
                w = c1
                for g, k in zip(gamma, ku):
                    w *= math.comb(g, k) * math.factorial(k)
                out = out + phi_k.mul(mu[tuple(g - k for g, k in zip(gamma, ku))]).scaled(w)
        return out


_CTX_CACHE: Dict[bytes, CompositionContext] = {}


def composition_context(n_dof: int, hbar: float,
                        A1: np.ndarray, b1: np.ndarray,
                        A2: np.ndarray, b2: np.ndarray) -> CompositionContext:
    key_arr = np.concatenate([
        np.array([n_dof, hbar], dtype=complex),
        np.round(A1, 12).ravel(), np.round(b1, 12),
        np.round(A2, 12).ravel(), np.round(b2, 12),
    ])
    key = key_arr.tobytes()
    ctx = _CTX_CACHE.get(key)
    if ctx is None:
        if len(_CTX_CACHE) > 128:
            _CTX_CACHE.clear()
        ctx = CompositionContext(n_dof, hbar, A1, b1, A2, b2)
        _CTX_CACHE[key] = ctx
    return ctx
