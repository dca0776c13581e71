"""Closed-form coverage and spectral efficiency for a small geometry.

A user 50 m from its serving BS, with interferers at 2x, 3x and 4x that
distance, under N=3 antennas and K=1 user per BS.
"""

import numpy as np

from bscoloring import (
    FixedGeometry,
    ergodic_se_exact,
    ergodic_se_lower,
    ergodic_se_ppp_lower,
    rate_coverage_approx,
    rate_coverage_exact,
)

geom = FixedGeometry(50.0, [2.0, 3.0, 4.0])
N, K, beta = 3, 1, 4.0

print(" gamma   exact   approx")
for g in np.arange(0.0, 8.5, 1.0):
    print(f"{g:6.1f}  {rate_coverage_exact(geom, N, K, beta, g):.4f}  {rate_coverage_approx(geom, N, K, beta, g):.4f}")

print("\nSNR dB  exact SE  lower bound   (4 patterns)")
for snr_db in (40, 80, 120, 160):
    snr = 10 ** (snr_db / 10)
    print(f"{snr_db:6d}  {ergodic_se_exact(geom, N, K, beta, 4, snr):.4f}    {ergodic_se_lower(geom, N, K, beta, 4, snr):.4f}")

print(f"\nPoisson-layout worst case, 4 patterns: {ergodic_se_ppp_lower(N, K, beta, 4):.4f} bits/s/Hz")
