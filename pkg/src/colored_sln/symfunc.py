"""Symmetric functions in elementary-symmetric coordinates.

An alphabet of size m is represented by the variables X1..Xm, where Xk is the
k-th elementary symmetric polynomial of its letters (degree 2k).  The
deformation parameters B1..BN behave like a virtual alphabet of size N with
quantum degree 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from flint import fmpq

from .polyring import GroebnerIdeal, MPoly, RingSpec, to_q


@dataclass(frozen=True)
class Alphabet:
    name: str
    size: int

    def var_names(self) -> List[str]:
        return [f"{self.name}{k}" for k in range(1, self.size + 1)]


@dataclass(frozen=True)
class BParams:
    """Symbolic deformation parameters or a rational specialization."""

    N: int
    values: Optional[Tuple[Fraction, ...]] = None

    @classmethod
    def symbolic(cls, N: int) -> "BParams":
        return cls(N, None)

    @classmethod
    def zero(cls, N: int) -> "BParams":
        return cls(N, tuple(Fraction(0) for _ in range(N)))

    @classmethod
    def specialized(cls, values: Sequence) -> "BParams":
        return cls(len(values), tuple(Fraction(v) for v in values))

    @property
    def is_symbolic(self) -> bool:
        return self.values is None

    @property
    def is_zero(self) -> bool:
        return self.values is not None and not any(self.values)

    def var_names(self) -> List[str]:
        return [f"B{k}" for k in range(1, self.N + 1)]

    def b(self, k: int, ring: RingSpec) -> MPoly:
        """B_k as an element of ``ring`` (B_0 = 1, B_k = 0 for k > N)."""
        if k == 0:
            return ring.one()
        if k < 0 or k > self.N:
            return ring.zero()
        if self.values is None:
            return ring.var(f"B{k}")
        return ring.const(self.values[k - 1])


def roots_to_b(roots: Sequence) -> BParams:
    """b_k = e_k(roots), so that f'(x) = (N+1) * prod (x - root)."""
    roots = [Fraction(r) for r in roots]
    if not roots:
        raise ValueError("need at least one root")
    N = len(roots)
    e = [Fraction(1)] + [Fraction(0)] * N
    for r in roots:
        for k in range(N, 0, -1):
            e[k] += e[k - 1] * r
    return BParams.specialized(e[1:])


def make_ring(alphabets: Sequence[Alphabet], B: Optional[BParams] = None,
              extra_blocks: bool = False) -> RingSpec:
    """Ring of the given alphabets (in order), with B variables last if symbolic."""
    names, degs, qdegs, blocks = [], [], [], []
    for a in alphabets:
        for k in range(1, a.size + 1):
            names.append(f"{a.name}{k}")
            degs.append(2 * k)
            qdegs.append(2 * k)
        blocks.append(a.size)
    if B is not None and B.is_symbolic:
        for k in range(1, B.N + 1):
            names.append(f"B{k}")
            degs.append(2 * k)
            qdegs.append(0)
        blocks.append(B.N)
    if not extra_blocks:
        blocks = None
    else:
        blocks = [b for b in blocks if b]
    return RingSpec(names, degs, qdegs, blocks)


AlphaExpr = Union[Alphabet, Sequence[Alphabet]]


def _as_list(X: AlphaExpr) -> List[Alphabet]:
    if isinstance(X, Alphabet):
        return [X]
    return list(X)


def elem(k: int, X: AlphaExpr, ring: RingSpec) -> MPoly:
    """e_k of an alphabet (or of a union of alphabets)."""
    alphas = _as_list(X)
    if k < 0:
        return ring.zero()
    if k == 0:
        return ring.one()
    if len(alphas) == 1:
        a = alphas[0]
        if k > a.size:
            return ring.zero()
        return ring.var(f"{a.name}{k}")
    head, rest = alphas[0], alphas[1:]
    out = ring.zero()
    for i in range(0, min(k, head.size) + 1):
        left = elem(i, head, ring)
        right = elem(k - i, rest, ring)
        if left and right:
            out = out + left * right
    return out


def _elems(X: AlphaExpr, ring: RingSpec) -> List[MPoly]:
    n = sum(a.size for a in _as_list(X))
    return [elem(k, X, ring) for k in range(n + 1)]


def _h_from_e(e: List[MPoly], kmax: int, ring: RingSpec) -> List[MPoly]:
    n = len(e) - 1
    h = [ring.one()]
    for k in range(1, kmax + 1):
        acc = ring.zero()
        for i in range(1, min(k, n) + 1):
            term = e[i] * h[k - i]
            acc = acc + term if i % 2 == 1 else acc - term
        h.append(acc)
    return h


def complete(k: int, X: AlphaExpr, ring: RingSpec) -> MPoly:
    if k < 0:
        return ring.zero()
    return _h_from_e(_elems(X, ring), k, ring)[k]


def power(k: int, X: AlphaExpr, ring: RingSpec) -> MPoly:
    """Power sum p_k via Newton's identities (0 for k <= 0)."""
    if k <= 0:
        return ring.zero()
    e = _elems(X, ring)
    n = len(e) - 1
    p = [ring.zero()]
    for j in range(1, k + 1):
        acc = ring.zero()
        for i in range(1, min(j - 1, n) + 1):
            term = e[i] * p[j - i]
            acc = acc + term if i % 2 == 1 else acc - term
        if j <= n:
            term = e[j] * j
            acc = acc + term if j % 2 == 1 else acc - term
        p.append(acc)
    return p[k]


def complete_diff(k: int, X: AlphaExpr, Y: AlphaExpr, ring: RingSpec) -> MPoly:
    """h_k(X - Y) = sum_j (-1)^j e_j(Y) h_{k-j}(X)."""
    if k < 0:
        return ring.zero()
    h = _h_from_e(_elems(X, ring), k, ring) if _as_list(X) else [ring.one()] + [ring.zero()] * k
    eY = _elems(Y, ring) if _as_list(Y) else [ring.one()]
    out = ring.zero()
    for j in range(0, min(k, len(eY) - 1) + 1):
        term = eY[j] * h[k - j]
        out = out + term if j % 2 == 0 else out - term
    return out


def _complete_diff_values(kmax: int, X, Y, ring: RingSpec, Yvals: Optional[List[MPoly]] = None) -> List[MPoly]:
    h = _h_from_e(_elems(X, ring), kmax, ring) if _as_list(X) else [ring.one()] + [ring.zero()] * kmax
    eY = Yvals if Yvals is not None else (_elems(Y, ring) if _as_list(Y) else [ring.one()])
    out = []
    for k in range(kmax + 1):
        acc = ring.zero()
        for j in range(0, min(k, len(eY) - 1) + 1):
            term = eY[j] * h[k - j]
            acc = acc + term if j % 2 == 0 else acc - term
        out.append(acc)
    return out


def complete_minus_B(k: int, X: AlphaExpr, B: BParams, ring: RingSpec) -> MPoly:
    """h_k(X - B) with B the virtual deformation alphabet."""
    if k < 0:
        return ring.zero()
    eB = [B.b(j, ring) for j in range(B.N + 1)]
    return _complete_diff_values(k, X, [], ring, Yvals=eB)[k]


def det(mat: List[List[MPoly]], ring: RingSpec) -> MPoly:
    """Determinant by Laplace expansion along the first row (small sizes)."""
    n = len(mat)
    if n == 0:
        return ring.one()
    if n == 1:
        return mat[0][0]
    out = ring.zero()
    for j in range(n):
        if not mat[0][j]:
            continue
        minor = [row[:j] + row[j + 1:] for row in mat[1:]]
        term = mat[0][j] * det(minor, ring)
        out = out + term if j % 2 == 0 else out - term
    return out


def schur_from_h(lam: Sequence[int], h: List[MPoly], ring: RingSpec) -> MPoly:
    lam = [x for x in lam]
    m = len(lam)
    mat = []
    for i in range(m):
        row = []
        for j in range(m):
            k = lam[i] - i + j
            row.append(h[k] if 0 <= k < len(h) else ring.zero())
        mat.append(row)
    return det(mat, ring)


def schur_diff(lam: Sequence[int], X: AlphaExpr, Y: AlphaExpr, ring: RingSpec) -> MPoly:
    """Jacobi-Trudi: S_lam(X - Y) = det(h_{lam_i - i + j}(X - Y))."""
    lam = list(lam)
    if not lam:
        return ring.one()
    kmax = lam[0] + len(lam)
    h = _complete_diff_values(kmax, X, Y, ring)
    return schur_from_h(lam, h, ring)


def schur(lam: Sequence[int], X: AlphaExpr, ring: RingSpec) -> MPoly:
    return schur_diff(lam, X, [], ring)


def schur_minus_B(lam: Sequence[int], X: AlphaExpr, B: BParams, ring: RingSpec) -> MPoly:
    lam = list(lam)
    if not lam:
        return ring.one()
    kmax = lam[0] + len(lam)
    eB = [B.b(j, ring) for j in range(B.N + 1)]
    h = _complete_diff_values(kmax, X, [], ring, Yvals=eB)
    return schur_from_h(lam, h, ring)


# partitions -------------------------------------------------------------------

def partitions_in_box(l: int, m: int) -> List[Tuple[int, ...]]:
    """All partitions with at most l parts, each at most m, as l-tuples."""
    out = []

    def rec(prefix: List[int], cap: int):
        if len(prefix) == l:
            out.append(tuple(prefix))
            return
        for v in range(cap, -1, -1):
            rec(prefix + [v], v)

    rec([], m)
    return sorted(out, key=lambda p: (sum(p), [-x for x in p]))


def partition_conjugate(lam: Sequence[int]) -> Tuple[int, ...]:
    lam = [x for x in lam if x > 0]
    if not lam:
        return ()
    return tuple(sum(1 for x in lam if x > i) for i in range(lam[0]))


def partition_complement(lam: Sequence[int], l: int, m: int) -> Tuple[int, ...]:
    lam = list(lam) + [0] * (l - len(lam))
    if len(lam) > l or any(x > m or x < 0 for x in lam) or any(
            lam[i] < lam[i + 1] for i in range(len(lam) - 1)):
        raise ValueError(f"{tuple(lam)} is not in the {l}x{m} box")
    return tuple(m - lam[l - 1 - j] for j in range(l))


# the potential ----------------------------------------------------------------

def potential_f(X: Alphabet, B: BParams, N: int, ring: RingSpec) -> MPoly:
    """f(X) = p_{N+1}(X) + sum_k (-1)^{N+1-k} ((N+1)/k) B_{N+1-k} p_k(X)."""
    if X.size > N:
        raise ValueError("alphabet larger than N")
    out = power(N + 1, X, ring)
    for k in range(1, N + 1):
        coef = fmpq(N + 1, k) * (1 if (N + 1 - k) % 2 == 0 else -1)
        out = out + B.b(N + 1 - k, ring) * power(k, X, ring) * coef
    return out


def potential_partial(j: int, X: Alphabet, B: BParams, N: int, ring: RingSpec) -> MPoly:
    """d f / d X_j = (-1)^{j+1} (N+1) h_{N+1-j}(X - B)."""
    if not 1 <= j <= X.size:
        raise ValueError("index out of range")
    sign = 1 if (j + 1) % 2 == 0 else -1
    return complete_minus_B(N + 1 - j, X, B, ring) * (sign * (N + 1))


def potential_of_values(e: Sequence[MPoly], B: BParams, N: int, ring: RingSpec) -> MPoly:
    """f evaluated on an alphabet whose elementary symmetric values are e[1..]."""
    n = len(e)
    ev = [ring.one()] + list(e)
    p = [ring.zero()]
    for j in range(1, N + 2):
        acc = ring.zero()
        for i in range(1, min(j - 1, n) + 1):
            term = ev[i] * p[j - i]
            acc = acc + term if i % 2 == 1 else acc - term
        if j <= n:
            term = ev[j] * j
            acc = acc + term if j % 2 == 1 else acc - term
        p.append(acc)
    out = p[N + 1]
    for k in range(1, N + 1):
        coef = fmpq(N + 1, k) * (1 if (N + 1 - k) % 2 == 0 else -1)
        out = out + B.b(N + 1 - k, ring) * p[k] * coef
    return out


# the Sylvester operator --------------------------------------------------------

class GrassmannianQuotient:
    """Sym(X|B) / (h_N(X-B), ..., h_{N+1-m}(X-B)) as a free Sym(B)-module.

    B is symbolic.  Normal forms use a block order with X above B, so the
    standard monomials in X form a Sym(B)-basis.
    """

    def __init__(self, m: int, N: int):
        if not 0 <= m <= N:
            raise ValueError("need 0 <= m <= N")
        self.m, self.N = m, N
        self.X = Alphabet("X", m)
        self.B = BParams.symbolic(N)
        self.ring = make_ring([self.X], self.B, extra_blocks=True)
        gens = [complete_minus_B(N + 1 - j, self.X, self.B, self.ring) for j in range(1, m + 1)]
        self.ideal = GroebnerIdeal(self.ring, gens)
        for lm in self.ideal.leading_monomials():
            if any(lm[m:]):
                raise RuntimeError("quotient is not presented as a free Sym(B)-module")
        self.box = partitions_in_box(m, N - m)
        self._schur_nf = {lam: self.ideal.normal_form(schur(lam, self.X, self.ring))
                          for lam in self.box}

    def reduce(self, p: MPoly) -> MPoly:
        return self.ideal.normal_form(p)

    def x_part(self, mono) -> tuple:
        return mono[: self.m]

    def schur_coordinates(self, p: MPoly) -> Dict[Tuple[int, ...], MPoly]:
        """Coefficients c_lam in Sym(B) with p = sum c_lam S_lam(X) in the quotient."""
        ring, m = self.ring, self.m
        p = self.reduce(p)
        coords: Dict[Tuple[int, ...], MPoly] = {lam: ring.zero() for lam in self.box}
        xdeg = lambda mono: sum(2 * (k + 1) * mono[k] for k in range(m))
        # triangular elimination from the top X-degree downwards
        guard = 0
        while p:
            guard += 1
            if guard > 10_000:
                raise RuntimeError("Schur expansion did not terminate")
            d = max(xdeg(mono) for mono in p.terms)
            lams = [lam for lam in self.box if 2 * sum(lam) == d]
            # X-monomials of this degree appearing in the Schur basis elements
            xmonos = sorted({self.x_part(mono) for lam in lams
                             for mono in self._schur_nf[lam].terms
                             if xdeg(mono) == d}, key=lambda t: t)
            pmonos = {self.x_part(mono) for mono in p.terms if xdeg(mono) == d}
            if not pmonos <= set(xmonos):
                raise ValueError("element not expressible in the Schur basis")
            # matrix T0[lam][xmono] over Q (top X-degree, B-free part)
            mat = []
            for lam in lams:
                row = []
                for xm in xmonos:
                    c = fmpq(0)
                    for mono, v in self._schur_nf[lam].terms.items():
                        if self.x_part(mono) == xm and not any(mono[m:]):
                            c = v
                    row.append(c)
                mat.append(row)
            # coefficients of p at top X-degree: polynomials in B
            rhs = []
            for xm in xmonos:
                terms = {}
                for mono, v in p.terms.items():
                    if self.x_part(mono) == xm:
                        terms[(0,) * m + mono[m:]] = v
                rhs.append(MPoly(ring, terms))
            sol = _solve_left(mat, rhs, ring)
            for lam, c in zip(lams, sol):
                if c:
                    coords[lam] = coords[lam] + c
                    p = p - self.reduce(c * self._schur_nf[lam])
        return coords

    def sylvester(self, p: MPoly) -> MPoly:
        top = tuple([self.N - self.m] * self.m)
        return self.schur_coordinates(p)[top]

    def pairing_matrix(self) -> List[List[MPoly]]:
        out = []
        for lam in self.box:
            row = []
            for mu in self.box:
                prod = schur(lam, self.X, self.ring) * schur_minus_B(mu, self.X, self.B, self.ring)
                row.append(self.sylvester(prod))
            out.append(row)
        return out


def _solve_left(mat: List[List[fmpq]], rhs: List[MPoly], ring: RingSpec) -> List[MPoly]:
    """Solve sum_i c_i mat[i][j] = rhs[j] for polynomials c_i (mat square invertible)."""
    from flint import fmpq_mat
    n = len(mat)
    if n == 0:
        if any(rhs):
            raise ValueError("inconsistent Schur expansion")
        return []
    if len(mat[0]) != n:
        raise ValueError("non-square transition matrix")
    A = fmpq_mat(n, n, [mat[i][j] for i in range(n) for j in range(n)])
    Ainv = A.inv()
    out = []
    for i in range(n):
        acc = ring.zero()
        for j in range(n):
            c = Ainv[j, i]
            if c:
                acc = acc + rhs[j] * c
        out.append(acc)
    return out


def sylvester(p: MPoly, m: int, N: int, B: Optional[BParams] = None,
              quotient: Optional[GrassmannianQuotient] = None) -> MPoly:
    """The Sylvester operator of the Grassmannian quotient ring."""
    if B is not None and not B.is_symbolic:
        raise ValueError("the Sylvester operator is defined over symbolic B")
    Q = quotient or GrassmannianQuotient(m, N)
    return Q.sylvester(p)


def letters_ring(sizes: Dict[str, int]) -> RingSpec:
    names = []
    for a, n in sizes.items():
        names.extend(f"{a}_{i}" for i in range(1, n + 1))
    return RingSpec(names, [2] * len(names))


def expand_in_letters(p: MPoly, alphabets: Sequence[Alphabet], target: RingSpec) -> MPoly:
    """Substitute each X_k by e_k of the letters X_1..X_m."""
    images = {}
    for a in alphabets:
        letters = [target.var(f"{a.name}_{i}") for i in range(1, a.size + 1)]
        for k in range(1, a.size + 1):
            acc = target.zero()
            for combo in combinations(letters, k):
                t = target.one()
                for x in combo:
                    t = t * x
                acc = acc + t
            images[p.ring.index[f"{a.name}{k}"]] = acc
    index_map = [-1] * p.ring.nvars
    return p.map_to(target, index_map, images)
