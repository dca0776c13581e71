"""Closed-form and semi-analytical performance of the tagged user.

Geometry enters only through the serving distance ``d0`` and the ratios
``rho_j = ||d_j|| / ||d0||`` of the out-of-cluster interferers.  The
desired gain is Gamma(N - 2K + 1, 1) and each interferer contributes
``rho_j^-beta`` times a Gamma(K, 1) gain.
"""

from dataclasses import dataclass
import math
import warnings

import numpy as np
from scipy import integrate

from .jet import Jet
from .special import digamma

LOG2E = 1.0 / math.log(2.0)


@dataclass(frozen=True, eq=False)
class FixedGeometry:
    """Serving distance (m) and interferer distance ratios."""

    d0: float
    ratios: np.ndarray

    def __post_init__(self):
        r = np.array(self.ratios, dtype=float).ravel()
        r.setflags(write=False)
        object.__setattr__(self, "ratios", r)
        if not self.d0 > 0:
            raise ValueError("d0 must be positive")
        if np.any(~(r > 0)):
            raise ValueError("distance ratios must be positive")

    @classmethod
    def from_distances(cls, d0, dists):
        return cls(d0, np.asarray(dists, dtype=float) / d0)

    def weights(self, beta):
        """``rho_j^-beta`` for every interferer."""
        return self.ratios ** (-beta)


def _check_nk(N, K):
    if K < 1 or N < 2 * K:
        raise ValueError(f"need N >= 2K with K >= 1, got N={N}, K={K}")


def _noise(geom, K, beta, snr):
    if snr is None or math.isinf(snr):
        return 0.0
    return geom.d0**beta * K / snr


def laplace_interference(s, geom, K, beta, order=None):
    """Laplace transform of the normalised interference, ``prod (1 + s w_j)^-K``.

    With ``order`` set, returns a :class:`Jet` holding all derivatives up
    to that order at ``s``.
    """
    if s < 0:
        raise ValueError("s must be non-negative")
    w = geom.weights(beta)
    if order is None:
        return float(np.prod((1.0 + s * w) ** (-K)))
    out = Jet.constant(1.0, order)
    for wj in w:
        out = out * Jet(([1.0 + s * wj, wj] + [0.0] * order)[: order + 1]) ** (-K)
    return out


def _coverage_from_jet(jet, s):
    # sum_m s^m / m! (-1)^m L^(m)(s) = sum_m (-s)^m c_m
    total = sum((-s) ** m * c for m, c in enumerate(jet.c))
    return min(1.0, max(0.0, total))


def _threshold(gamma):
    if gamma < 0:
        raise ValueError("rate threshold must be non-negative")
    return 2.0**gamma - 1.0


def rate_coverage_exact(geom, N, K, beta, gamma):
    """P[log2(1 + SIR) > gamma] in the interference-limited regime."""
    _check_nk(N, K)
    s = _threshold(gamma)
    return _coverage_from_jet(laplace_interference(s, geom, K, beta, order=N - 2 * K), s)


def rate_coverage_approx(geom, N, K, beta, gamma):
    """Coverage with all but the dominant interferer folded into an exponential."""
    _check_nk(N, K)
    s = _threshold(gamma)
    M = N - 2 * K
    w = geom.weights(beta)
    if len(w) == 0:
        return 1.0
    k = int(np.argmin(geom.ratios))
    rest = float(np.sum(np.delete(w, k)))
    var = Jet.variable(s, M) if M else Jet.constant(s, 0)
    base = (-rest * var).exp() / (1.0 + w[k] * var)
    return _coverage_from_jet(base**K, s)


def ergodic_se_exact(geom, N, K, beta, L=1, snr=math.inf, epsabs=1e-9):
    """Ergodic spectral efficiency (bits/s/Hz) with the ``1/L`` pre-log.

    The integral over ``z`` in (0, inf) is mapped to (0, 1) with
    ``z = c t / (1 - t)`` and evaluated by adaptive Gauss-Kronrod.  The
    scale ``c`` is the reciprocal of the mean interference plus noise, which
    keeps the mass of the integrand away from the endpoints when noise is
    strong.  ``epsabs`` applies to the integral in ``t``, which is of order
    one, so it acts roughly as a relative tolerance.
    """
    _check_nk(N, K)
    if L < 1:
        raise ValueError("L must be at least 1")
    w = geom.weights(beta)
    noise = _noise(geom, K, beta, snr)
    if noise == 0 and len(w) == 0:
        raise ValueError("SINR is unbounded without noise or interference")
    dof = N - 2 * K + 1
    c = 1.0 / (noise + K * float(np.sum(w)))

    def integrand(t):
        if t >= 1.0:
            return 0.0
        z = c * t / (1.0 - t)
        if z == 0.0:
            head = float(dof)
        else:
            head = -math.expm1(-dof * math.log1p(z)) / z
        lap = math.exp(-K * float(np.sum(np.log1p(z * w)))) if len(w) else 1.0
        return head * math.exp(-z * noise) * lap / (1.0 - t) ** 2

    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            val, _ = integrate.quad(integrand, 0.0, 1.0, epsabs=epsabs, epsrel=1e-10, limit=500)
        except integrate.IntegrationWarning as exc:
            raise ArithmeticError(f"quadrature did not converge: {exc}") from None
    return LOG2E * c * val / L


def ergodic_se_lower(geom, N, K, beta, L=1, snr=math.inf):
    """Closed-form lower bound on :func:`ergodic_se_exact`."""
    _check_nk(N, K)
    if L < 1:
        raise ValueError("L must be at least 1")
    denom = K * float(np.sum(geom.weights(beta))) + _noise(geom, K, beta, snr)
    if denom == 0:
        return math.inf
    return math.log2(1.0 + math.exp(digamma(N - 2 * K + 1)) / denom) / L


def ergodic_se_ppp_lower(N, K, beta, L=1):
    """Density-free lower bound for Poisson base stations, worst-case interference."""
    _check_nk(N, K)
    if beta < 2:
        raise ValueError("pathloss exponent must be at least 2")
    if L < 1:
        raise ValueError("L must be at least 1")
    return math.log2(1.0 + (beta**2 - 4.0) / (8.0 * K) * math.exp(digamma(N - 2 * K + 1))) / L
