"""Digamma function."""

import math

# B_{2k} / (2k) for the asymptotic series of psi
_ASYMPTOTIC = (
    1.0 / 12,
    -1.0 / 120,
    1.0 / 252,
    -1.0 / 240,
    1.0 / 132,
    -691.0 / 32760,
    1.0 / 12,
)


def digamma(x):
    """psi(x) for x > 0.

    Recurrence ``psi(x) = psi(x + 1) - 1/x`` up to x >= 10, then
    ``ln x - 1/(2x) - sum B_2k / (2k x^2k)``.
    """
    x = float(x)
    if not x > 0 or math.isinf(x):
        raise ValueError(f"digamma needs a finite positive argument, got {x}")
    shift = 0.0
    while x < 10.0:
        shift -= 1.0 / x
        x += 1.0
    inv2 = 1.0 / (x * x)
    series = 0.0
    p = inv2
    for coef in _ASYMPTOTIC:
        series += coef * p
        p *= inv2
    return shift + math.log(x) - 0.5 / x - series
