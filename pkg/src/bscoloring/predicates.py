"""Orientation and in-circle predicates.

A floating-point evaluation is accepted when its magnitude clears a
forward error bound (Shewchuk's stage-A bounds); otherwise the
determinant is recomputed exactly with ``fractions.Fraction``, which
represents every double without rounding.

Exact cocircular ties are broken by symbolic perturbation: the lifted
height ``x^2 + y^2`` of vertex ``i`` is lowered by ``eps**(i + 1)``.
Lower-index vertices are perturbed more, so among the two diagonals of
a cocircular quadrilateral the one incident to the smallest index wins.
"""

from fractions import Fraction

_EPS = 2.0**-53
_CCW_BOUND = (3.0 + 16.0 * _EPS) * _EPS
_ICC_BOUND = (10.0 + 96.0 * _EPS) * _EPS


def _sign(v):
    return (v > 0) - (v < 0)


def orient2d(a, b, c):
    """Sign of twice the signed area of ``abc`` (+1 counter-clockwise)."""
    detleft = (a[0] - c[0]) * (b[1] - c[1])
    detright = (a[1] - c[1]) * (b[0] - c[0])
    det = detleft - detright
    if abs(det) > _CCW_BOUND * (abs(detleft) + abs(detright)):
        return _sign(det)
    return _orient_exact(a, b, c)


def _orient_exact(a, b, c):
    ax, ay = Fraction(a[0]), Fraction(a[1])
    bx, by = Fraction(b[0]), Fraction(b[1])
    cx, cy = Fraction(c[0]), Fraction(c[1])
    return _sign((ax - cx) * (by - cy) - (ay - cy) * (bx - cx))


def incircle(a, b, c, d):
    """Positive when ``d`` lies inside the circle through CCW ``abc``."""
    adx, ady = a[0] - d[0], a[1] - d[1]
    bdx, bdy = b[0] - d[0], b[1] - d[1]
    cdx, cdy = c[0] - d[0], c[1] - d[1]
    alift = adx * adx + ady * ady
    blift = bdx * bdx + bdy * bdy
    clift = cdx * cdx + cdy * cdy
    bc = bdx * cdy - bdy * cdx
    ca = cdx * ady - cdy * adx
    ab = adx * bdy - ady * bdx
    det = alift * bc + blift * ca + clift * ab
    permanent = (
        (abs(bdx * cdy) + abs(bdy * cdx)) * alift
        + (abs(cdx * ady) + abs(cdy * adx)) * blift
        + (abs(adx * bdy) + abs(ady * bdx)) * clift
    )
    if abs(det) > _ICC_BOUND * permanent:
        return _sign(det)
    return _incircle_exact(a, b, c, d)


def _incircle_exact(a, b, c, d):
    dx, dy = Fraction(d[0]), Fraction(d[1])
    adx, ady = Fraction(a[0]) - dx, Fraction(a[1]) - dy
    bdx, bdy = Fraction(b[0]) - dx, Fraction(b[1]) - dy
    cdx, cdy = Fraction(c[0]) - dx, Fraction(c[1]) - dy
    det = (
        (adx * adx + ady * ady) * (bdx * cdy - bdy * cdx)
        + (bdx * bdx + bdy * bdy) * (cdx * ady - cdy * adx)
        + (cdx * cdx + cdy * cdy) * (adx * bdy - ady * bdx)
    )
    return _sign(det)


def incircle_sos(pts, a, b, c, d):
    """In-circle sign for vertex indices with the index-ordered tie-break.

    ``a, b, c`` must be counter-clockwise.  Never returns 0 for four
    distinct points.
    """
    s = incircle(pts[a], pts[b], pts[c], pts[d])
    if s:
        return s
    # The determinant is linear in the lifted heights; its coefficients are
    # the orientations below.  The most perturbed vertex decides the sign.
    first = min(a, b, c, d)
    if first == a:
        coef = orient2d(pts[d], pts[b], pts[c])
    elif first == b:
        coef = -orient2d(pts[d], pts[a], pts[c])
    elif first == c:
        coef = orient2d(pts[d], pts[a], pts[b])
    else:
        coef = -orient2d(pts[a], pts[b], pts[c])
    return -coef
