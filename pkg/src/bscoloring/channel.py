"""Rayleigh fading, zero-forcing coordinated beamforming and SINR.

Only effective gains enter the SINR: the desired gain after zero
forcing, ``|h^T v|^2``, and each interfering BS's gain ``||h_j^T V_j||^2``
through its own (independent, semi-unitary) precoder.
"""

from dataclasses import dataclass
import math

import numpy as np


_CHUNK = 50000


class DegenerateChannel(ValueError):
    """Constraint channels are rank deficient; redraw them."""


@dataclass(frozen=True)
class ScenarioParams:
    N: int = 3
    K: int = 1
    beta: float = 4.0
    snr_db: float = 100.0
    gamma: float = 1.0
    L: int = 4
    delta_ec: int = 4
    k_per_bs: int = 40
    mmse: float = 1.0
    L_b: float = 200.0
    overhead_enabled: bool = False

    def __post_init__(self):
        if self.K < 1 or self.N < 2 * self.K:
            raise ValueError(f"need N >= 2K with K >= 1, got N={self.N}, K={self.K}")
        if not self.beta > 2:
            raise ValueError("pathloss exponent must exceed 2")
        if self.gamma < 0:
            raise ValueError("rate threshold must be non-negative")
        if not 0 < self.mmse <= 1:
            raise ValueError("mmse must lie in (0, 1]")
        if not self.L_b > 0:
            raise ValueError("L_b must be positive")

    @property
    def snr(self):
        """Linear P / sigma^2; ``inf`` when ``snr_db`` is None or inf."""
        if self.snr_db is None or math.isinf(self.snr_db):
            return math.inf
        return 10.0 ** (self.snr_db / 10.0)


def draw_fading(N, rng, size=()):
    """i.i.d. CN(0, 1) entries, shape ``size + (N,)``."""
    if N < 1:
        raise ValueError("N must be positive")
    shape = tuple(np.atleast_1d(size)) + (N,) if size != () else (N,)
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / math.sqrt(2.0)


def zf_cbf(channels, tagged=0, rtol=1e-10):
    """Unit-norm beamformer for user ``tagged`` among ``channels`` (M x N).

    Maximises ``|h^T v|^2`` subject to ``c^T v = 0`` for every other row
    ``c``: ``conj(h)`` projected onto the orthogonal complement of the
    conjugated constraint rows, then normalised.
    """
    H = np.asarray(channels, dtype=complex)
    h = H[tagged]
    C = np.delete(H, tagged, axis=0)
    return zf_cbf_batch(h[None], C[None], rtol)[0]


def zf_cbf_batch(h, C, rtol=1e-10):
    """Batched :func:`zf_cbf`; ``h`` is (B, N), ``C`` is (B, M-1, N)."""
    h = np.asarray(h, dtype=complex)
    C = np.asarray(C, dtype=complex)
    B, N = h.shape
    target = np.conj(h)
    if C.shape[1]:
        if C.shape[1] >= N:
            raise DegenerateChannel("need fewer constraints than antennas")
        Q, R = np.linalg.qr(np.conj(np.swapaxes(C, 1, 2)))
        diag = np.abs(np.diagonal(R, axis1=1, axis2=2))
        scale = np.linalg.norm(C, axis=2).max(axis=1)
        if np.any(diag.min(axis=1) <= rtol * scale):
            raise DegenerateChannel("constraint channels are rank deficient")
        target = target - np.einsum("bnk,bk->bn", Q, np.einsum("bnk,bn->bk", np.conj(Q), target))
    norm = np.linalg.norm(target, axis=1)
    if np.any(norm == 0):
        raise DegenerateChannel("tagged channel lies in the constraint span")
    return target / norm[:, None]


def desired_gains(N, n_constraints, rng, size):
    """``|h^T v|^2`` after zero forcing against ``n_constraints`` random users.

    Distributed Gamma(N - n_constraints, 1).
    """
    out = np.empty(size)
    for s in range(0, size, _CHUNK):
        b = min(_CHUNK, size - s)
        h = draw_fading(N, rng, b)
        while True:
            C = draw_fading(N, rng, (b, n_constraints)) if n_constraints else np.empty((b, 0, N))
            try:
                v = zf_cbf_batch(h, C)
                break
            except DegenerateChannel:
                continue
        out[s : s + b] = np.abs(np.einsum("bn,bn->b", h, v)) ** 2
    return out


def isotropic_precoders(N, K, rng, size):
    """Random N x K matrices with orthonormal columns (Haar), shape (size, N, K)."""
    G = draw_fading(N, rng, (size, K))
    Q, R = np.linalg.qr(np.swapaxes(G, 1, 2))
    ph = np.diagonal(R, axis1=1, axis2=2)
    return Q * (ph / np.abs(ph))[:, None, :]


def interference_gains(N, streams, rng):
    """``||h^T V||^2`` for one interferer per entry of ``streams``.

    Each entry sends ``streams[i]`` streams through an isotropic precoder
    independent of ``h``; the gain is Gamma(streams[i], 1), zero for a
    silent BS.
    """
    streams = np.asarray(streams, dtype=np.int64)
    out = np.zeros(streams.shape, dtype=float)
    flat_s, flat_o = streams.ravel(), out.reshape(-1)
    for k in np.unique(flat_s):
        if k == 0:
            continue
        sel = np.flatnonzero(flat_s == k)
        for s in range(0, len(sel), _CHUNK):
            part = sel[s : s + _CHUNK]
            h = draw_fading(N, rng, len(part))
            V = isotropic_precoders(N, int(k), rng, len(part))
            flat_o[part] = np.sum(np.abs(np.einsum("bn,bnk->bk", h, V)) ** 2, axis=1)
    return out


def noise_term(d0, beta, K, snr):
    """``||d0||^beta * K / SNR``, zero when ``snr`` is infinite."""
    if math.isinf(snr):
        return np.zeros_like(np.asarray(d0, dtype=float))
    return np.asarray(d0, dtype=float) ** beta * K / snr


def sinr(g0, d0, dists, gains, beta, K, snr):
    """SINR from effective gains.

    ``g0 / (sum_j (d_j / d0)^-beta g_j + d0^beta K / SNR)``; ``dists`` and
    ``gains`` have a trailing interferer axis (may be empty).
    """
    g0 = np.asarray(g0, dtype=float)
    d0 = np.asarray(d0, dtype=float)
    dists = np.asarray(dists, dtype=float)
    gains = np.asarray(gains, dtype=float)
    ratio = dists / d0[..., None]
    interf = np.sum(ratio ** (-beta) * gains, axis=-1)
    return g0 / (interf + noise_term(d0, beta, K, snr))


def pilot_overhead(mmse, N, L_b, sinr_value):
    """Pilot fraction ``alpha = 2 eta N / L_b`` for one pair-wise cluster.

    ``eta = max(1, floor((1 / SINR) (1 / MMSE - 1)))``.
    """
    if not 0 < mmse <= 1:
        raise ValueError("mmse must lie in (0, 1]")
    if not L_b > 0:
        raise ValueError("L_b must be positive")
    excess = 1.0 / mmse - 1.0
    if excess == 0:
        eta = 1
    elif sinr_value <= 0:
        raise ValueError("coherence block too short: SINR is zero")
    else:
        eta = max(1, math.floor(excess / sinr_value))
    alpha = 2 * eta * N / L_b
    if alpha >= 1:
        raise ValueError(f"coherence block too short: alpha = {alpha:.3g}")
    return alpha


def pilot_overhead_many(mmse, N, L_b, sinr_values):
    """Vectorised pilot fraction, clipped to 1 where the block is too short."""
    s = np.asarray(sinr_values, dtype=float)
    excess = 1.0 / mmse - 1.0
    with np.errstate(divide="ignore", invalid="ignore"):
        eta = np.where(excess == 0, 1.0, np.maximum(1.0, np.floor(excess / s)))
    return np.minimum(2.0 * eta * N / L_b, 1.0)
