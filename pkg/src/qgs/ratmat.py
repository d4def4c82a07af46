"""Exact rational linear algebra over sparse vectors.

Vectors are dicts mapping hashable keys to nonzero Fractions.  RatSpan
keeps a reduced row echelon basis incrementally, so rank growth, span
membership and reduction residuals are all exact.  A small dense
Gauss-Jordan inverse for Fraction matrices rounds things out.
"""

from fractions import Fraction


def vec_scale(v, c):
    c = Fraction(c)
    if c == 0:
        return {}
    return {k: c * x for k, x in v.items()}


def vec_add_scaled(dst, src, c):
    """dst += c * src in place (drops zeros)."""
    c = Fraction(c)
    if c == 0:
        return dst
    for k, x in src.items():
        y = dst.get(k, 0) + c * x
        if y:
            dst[k] = y
        else:
            dst.pop(k, None)
    return dst


def vec_dot(u, v):
    if len(u) > len(v):
        u, v = v, u
    return sum((x * v[k] for k, x in u.items() if k in v), Fraction(0))


def _sort_key(k):
    return repr(k)


class RatSpan:
    """Incrementally maintained reduced row echelon span of sparse vectors."""

    def __init__(self):
        self.pivots = {}       # pivot key -> vector with that coeff == 1

    @property
    def rank(self):
        return len(self.pivots)

    def reduce(self, v):
        """Residual of v modulo the span (v is not modified)."""
        out = dict(v)
        for k in [k for k in out if k in self.pivots]:
            c = out.get(k)
            if c:
                vec_add_scaled(out, self.pivots[k], -c)
        return out

    def contains(self, v):
        return not self.reduce(v)

    def add(self, v):
        """Add v to the span; return True if the rank grew."""
        r = self.reduce(v)
        if not r:
            return False
        p = min(r, key=_sort_key)
        r = vec_scale(r, Fraction(1) / r[p])
        for vec in self.pivots.values():
            c = vec.get(p)
            if c:
                vec_add_scaled(vec, r, -c)
        self.pivots[p] = r
        return True

    def basis(self):
        return [self.pivots[k] for k in sorted(self.pivots, key=_sort_key)]


def span_rank(vectors):
    s = RatSpan()
    for v in vectors:
        s.add(v)
    return s.rank


def invert_fraction_matrix(g):
    """Inverse of a square Fraction matrix (list of rows); Gauss-Jordan."""
    n = len(g)
    a = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(g)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col]), None)
        if piv is None:
            raise ValueError("matrix is singular")
        a[col], a[piv] = a[piv], a[col]
        inv = Fraction(1) / a[col][col]
        a[col] = [x * inv for x in a[col]]
        for r in range(n):
            if r != col and a[r][col]:
                c = a[r][col]
                a[r] = [x - c * y for x, y in zip(a[r], a[col])]
    return [row[n:] for row in a]
