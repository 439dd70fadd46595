"""Analytic predictors for matching sizes on large random networks.

* Generating functions of a degree pmf: Phi(u) = sum_k p(k) u^k and its
  size-biased transform phi(u) = Phi'(u)/mu.
* The four-variable fixed point whose value U* is the limiting fraction
  of unmatched vertices under maximum matching, for arbitrary in/out
  degree distributions with equal finite means.
* Poisson closed forms: gamma_lo is the smallest root of
  gamma = lam*exp(-lam*e^-gamma), gamma_hi = lam*e^-gamma_lo; from these,
  k(lam) (unmatched fraction) and h(lam) (core fraction at the phase
  transition of Karp-Sipser), with h = 0 exactly for lam <= e.
* The exact distribution of the randomized greedy matching size on a
  directed Erdos-Renyi network, and its normal limit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import ConvergenceError, InputError
from .generators import DegreeDist

E = math.e


class GenFunc:
    """Generating functions of a degree distribution.

    phi requires a positive mean; both are evaluated from the stored
    (truncated, renormalized) pmf, so Phi(1) = phi(1) = 1 to rounding.
    """

    def __init__(self, base: DegreeDist):
        self.base = base
        self.mu = base.mean
        k = np.arange(base.pmf.size, dtype=np.float64)
        self._phi_coef = (k * base.pmf)[1:] / self.mu if self.mu > 0 else None
        self._dphi_coef = None
        if self._phi_coef is not None and self._phi_coef.size > 1:
            kk = np.arange(1, self._phi_coef.size)
            self._dphi_coef = self._phi_coef[1:] * kk

    @classmethod
    def poisson(cls, lam: float) -> "GenFunc":
        return cls(DegreeDist.poisson(lam))

    def Phi(self, u: float) -> float:
        return float(np.polynomial.polynomial.polyval(u, self.base.pmf))

    def phi(self, u: float) -> float:
        if self._phi_coef is None:
            raise InputError("phi undefined for a zero-mean degree distribution")
        return float(np.polynomial.polynomial.polyval(u, self._phi_coef))

    def dphi(self, u: float) -> float:
        if self._phi_coef is None:
            raise InputError("phi undefined for a zero-mean degree distribution")
        if self._dphi_coef is None:
            return 0.0
        return float(np.polynomial.polynomial.polyval(u, self._dphi_coef))


def eval_mgf(gf: GenFunc, u: float):
    """(Phi(u), phi(u)) at a point of [0, 1]."""
    if not 0.0 <= u <= 1.0:
        raise InputError(f"u must lie in [0, 1], got {u}")
    return gf.Phi(u), gf.phi(u)


@dataclass
class FixedPointSolution:
    w: tuple
    u_star: float
    residual: float
    iterations: int


def _least_fixed_point(T, dT, tol: float, max_iter: int):
    """Smallest fixed point of a monotone map T on [0, 1].

    Monotone iteration from 0 (iterates are nondecreasing and bounded, so
    they converge to the least fixed point), then a clamped Newton polish
    on h(w) = T(w) - w.  Newton keeps linear convergence even at the
    degenerate (multiple-root) boundary case where plain iteration stalls
    at O(k^-1/2).
    """
    w = 0.0
    it = 0
    sweep_cap = min(max_iter, 20_000)
    while it < sweep_cap:
        nxt = T(w)
        it += 1
        if not (nxt >= w - 1e-15):
            raise ConvergenceError(f"monotone iteration decreased: {w} -> {nxt}")
        if nxt > 1.0:
            raise ConvergenceError(f"iterate left [0,1]: {nxt}")
        if abs(nxt - w) < max(tol, 1e-13):
            w = nxt
            break
        w = nxt
    floor = w
    h = T(w) - w
    for _ in range(200):
        if abs(h) <= 1e-15:
            break
        d = dT(w) - 1.0
        if d == 0.0:
            break
        step = -h / d
        nw = min(max(w + step, floor), 1.0 - 1e-16)
        nh = T(nw) - nw
        if abs(nh) >= abs(h):
            break
        w, h = nw, nh
        it += 1
    return w, it


def solve_fixed_point(gf_in: GenFunc, gf_out: GenFunc,
                      tol: float = 1e-12) -> FixedPointSolution:
    """Solve the unmatched-fraction fixed point for given in/out degrees.

    The four equations decouple into two scalar problems:

        w3 = phi_in(1 - phi_out(1 - w3)),   w2 = 1 - phi_out(1 - w3)
        w1 = phi_out(1 - phi_in(1 - w1)),   w4 = 1 - phi_in(1 - w1)

    each solved for its smallest root in [0, 1].  The boundary value 1 can
    only arise in the degenerate all-degree-one case (phi constant 1),
    where the formula still evaluates correctly (U* = 0).  U* is computed
    from the closed form, which is stationary in w exactly at the
    solution, so its accuracy is second order in the w error.
    """
    if gf_in.mu <= 0 or gf_out.mu <= 0:
        raise InputError("fixed point requires positive mean degree")
    if abs(gf_in.mu - gf_out.mu) > 1e-9 * max(1.0, gf_in.mu):
        raise InputError(
            f"in/out mean degrees must agree: {gf_in.mu} vs {gf_out.mu}")
    mu = gf_in.mu

    def t_a(w3):
        return gf_in.phi(1.0 - gf_out.phi(1.0 - w3))

    def dt_a(w3):
        inner = gf_out.phi(1.0 - w3)
        return gf_in.dphi(1.0 - inner) * gf_out.dphi(1.0 - w3)

    def t_b(w1):
        return gf_out.phi(1.0 - gf_in.phi(1.0 - w1))

    def dt_b(w1):
        inner = gf_in.phi(1.0 - w1)
        return gf_out.dphi(1.0 - inner) * gf_in.dphi(1.0 - w1)

    max_iter = 10 ** 6
    w3, it_a = _least_fixed_point(t_a, dt_a, tol, max_iter)
    w1, it_b = _least_fixed_point(t_b, dt_b, tol, max_iter)
    w2 = 1.0 - gf_out.phi(1.0 - w3)
    w4 = 1.0 - gf_in.phi(1.0 - w1)

    residual = max(
        abs(gf_out.phi(1.0 - w3) - (1.0 - w2)),
        abs(gf_in.phi(w2) - w3),
        abs(gf_in.phi(1.0 - w1) - (1.0 - w4)),
        abs(gf_out.phi(w4) - w1),
    )
    if residual > 1e-10:
        raise ConvergenceError(
            f"fixed point did not converge: residual {residual:.3e} after "
            f"{it_a + it_b} iterations")
    u = 0.5 * (
        gf_in.Phi(1.0 - w1) + gf_in.Phi(w2) + gf_out.Phi(1.0 - w3)
        + gf_out.Phi(w4) - 2.0
        + mu * (w3 * (1.0 - w2) + w1 * (1.0 - w4))
    )
    u = min(max(u, 0.0), 1.0)
    return FixedPointSolution(w=(w1, w2, w3, w4), u_star=u,
                              residual=residual, iterations=it_a + it_b)


@dataclass
class PoissonKS:
    """Poisson closed-form constants for Karp-Sipser phase behavior."""

    lam: float
    gamma_star_lo: float
    gamma_star_hi: float
    k_lambda: float
    h_lambda: float


def solve_poisson_ks(lam: float) -> PoissonKS:
    """Smallest root of gamma = lam*exp(-lam*e^-gamma) and the derived
    unmatched fraction k(lam) and core fraction h(lam).

    The smallest root is located by a sign-change scan (the bracket
    function is negative at 0) plus brentq.  At lam = e the root is a
    triple zero at gamma = 1 and sign-based localization smears over
    ~1e-5; that state is detected via g' ~ 0 and snapped to the exact
    critical point gamma = log(lam), where g'' crosses zero.  For
    lam <= e the two gamma values coincide by definition, so gamma_hi is
    snapped to gamma_lo and h is exactly 0.
    """
    if not (lam > 0) or not np.isfinite(lam):
        raise InputError(f"lambda must be in (0, inf), got {lam}")

    def g(x):
        return x - lam * math.exp(-lam * math.exp(-x))

    def dg(x):
        y = lam * math.exp(-x)
        return 1.0 - y * math.exp(-y) * lam  # d/dx of the rhs is rhs*lam*e^-x

    hi = max(lam, 1.0)
    grid = np.linspace(0.0, hi, 10_001)
    vals = np.array([g(x) for x in grid])
    idx = np.nonzero((vals[:-1] < 0) & (vals[1:] >= 0))[0]
    if idx.size == 0:
        raise ConvergenceError(f"no sign change for gamma root at lambda={lam}")
    a, b = grid[idx[0]], grid[idx[0] + 1]
    gamma = brentq(g, a, b, xtol=1e-15, rtol=8.9e-16)
    crit = math.log(lam) if lam > 1 else 0.0
    if abs(dg(gamma)) < 1e-6 and lam > 1 and abs(g(crit)) < 1e-12:
        gamma = crit
    gamma_hi = gamma if lam <= E else lam * math.exp(-gamma)
    k = (gamma + gamma_hi + gamma * gamma_hi) / lam - 1.0
    h = 0.0 if lam <= E else (1.0 - gamma) * (gamma_hi - gamma) / lam
    return PoissonKS(lam=lam, gamma_star_lo=gamma, gamma_star_hi=gamma_hi,
                     k_lambda=k, h_lambda=h)


def greedy_pmf_directed_er(n: int, p: float) -> np.ndarray:
    """Exact pmf of the number of unmatched vertices after randomized
    greedy matching on a directed Erdos-Renyi network.

        P(k unmatched) = alpha_n(q)^2 / (alpha_k(q)^2 alpha_{n-k}(q)) * q^(k^2)

    with q = 1-p and alpha_i(q) = prod_{j<=i} (1 - q^j), computed in log
    space (log1p/expm1 forms stay accurate for p near 0).
    """
    if n < 1:
        raise InputError(f"n must be >= 1, got {n}")
    if not 0.0 <= p <= 1.0:
        raise InputError(f"p must lie in [0, 1], got {p}")
    out = np.zeros(n + 1)
    if p == 0.0:
        out[n] = 1.0
        return out
    if p == 1.0:
        out[0] = 1.0
        return out
    logq = math.log1p(-p)
    # log alpha_i(q), cumulative
    j = np.arange(1, n + 1, dtype=np.float64)
    log_terms = np.log(-np.expm1(j * logq))
    log_alpha = np.concatenate([[0.0], np.cumsum(log_terms)])
    k = np.arange(0, n + 1, dtype=np.float64)
    logp = (2.0 * log_alpha[n] - 2.0 * log_alpha[:n + 1]
            - log_alpha[::-1] + k * k * logq)
    return np.exp(logp)


def greedy_asymptotic(lam: float):
    """(matched_fraction, mean_coefficient, variance_coefficient) of the
    greedy matching size on ER(lam): |M| ~ Normal(n*mean, n*var) with
    matched fraction 1 - log(2 - e^-lam)/lam.

    lam = 0 and lam = inf return the limit fractions 0 and 1.
    """
    if lam < 0:
        raise InputError(f"lambda must be >= 0, got {lam}")
    if lam == 0:
        return 0.0, 0.0, math.inf
    if math.isinf(lam):
        return 1.0, 1.0, 0.0
    frac = 1.0 - math.log(2.0 - math.exp(-lam)) / lam
    return frac, frac, 1.0 / (4.0 * lam)


def predict_controllers(gf_in: GenFunc, gf_out: GenFunc, n: int,
                        tol: float = 1e-12) -> int:
    """Predicted minimum controller count max(1, round(n*U*))."""
    sol = solve_fixed_point(gf_in, gf_out, tol)
    return max(1, int(round(n * sol.u_star)))
