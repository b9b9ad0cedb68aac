"""Sparse exact linear algebra over Q (fmpq entries, dict rows)."""

from __future__ import annotations

from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from flint import fmpq

Vec = Dict[int, fmpq]


def vec_add(a: Vec, b: Vec, c: fmpq = fmpq(1)) -> Vec:
    """Return a + c*b."""
    out = dict(a)
    for k, v in b.items():
        w = out.get(k)
        if w is None:
            out[k] = c * v
        else:
            w = w + c * v
            if w:
                out[k] = w
            else:
                del out[k]
    return out


def vec_scale(a: Vec, c: fmpq) -> Vec:
    if not c:
        return {}
    return {k: v * c for k, v in a.items()}


class Echelon:
    """Incrementally maintained echelon basis with optional tag vectors.

    Each stored row r has a pivot (its smallest index); tags record which
    combination of inserted vectors produced it, so residual computations can
    report coordinates.
    """

    def __init__(self):
        self.rows: Dict[int, Tuple[Vec, Vec]] = {}  # pivot -> (row, tag)
        self.count = 0

    def __len__(self):
        return len(self.rows)

    def reduce(self, v: Vec, tag: Optional[Vec] = None) -> Tuple[Vec, Vec]:
        v = dict(v)
        tag = dict(tag) if tag is not None else {}
        rows = self.rows
        while v:
            hit = None
            for k in sorted(v):
                if k in rows:
                    hit = k
                    break
            if hit is None:
                break
            r, rt = rows[hit]
            c = -v[hit] / r[hit]
            v = vec_add(v, r, c)
            if rt:
                tag = vec_add(tag, rt, c)
        return v, tag

    def add(self, v: Vec, tag: Optional[Vec] = None) -> bool:
        """Insert v; return False if it was dependent."""
        r, t = self.reduce(v, tag)
        if not r:
            return False
        p = min(r)
        inv = fmpq(1) / r[p]
        self.rows[p] = (vec_scale(r, inv), vec_scale(t, inv))
        self.count += 1
        return True

    def contains(self, v: Vec) -> bool:
        return not self.reduce(v)[0]


def rank(columns: Sequence[Vec]) -> int:
    e = Echelon()
    n = 0
    for c in columns:
        if e.add(c):
            n += 1
    return n


def nullspace(columns: Sequence[Vec]) -> List[Vec]:
    """Kernel of the matrix whose j-th column is columns[j]; vectors indexed by j."""
    e = Echelon()
    kernel = []
    for j, c in enumerate(columns):
        r, t = e.reduce(c, {j: fmpq(1)})
        if not r:
            kernel.append(t)
        else:
            p = min(r)
            inv = fmpq(1) / r[p]
            e.rows[p] = (vec_scale(r, inv), vec_scale(t, inv))
    return kernel


def solve(columns: Sequence[Vec], target: Vec) -> Optional[Vec]:
    """Some x with sum_j x_j columns[j] = target, or None."""
    e = Echelon()
    for j, c in enumerate(columns):
        e.add(c, {j: fmpq(1)})
    r, t = e.reduce(target)
    if r:
        return None
    return {k: -v for k, v in t.items()}


def apply(columns: Sequence[Vec], x: Vec) -> Vec:
    out: Vec = {}
    for j, c in x.items():
        out = vec_add(out, columns[j], c)
    return out


class Quotient:
    """Subquotient Z/B with a chosen basis of representatives.

    ``boundaries`` span B, ``cycles`` span Z (B inside Z).  Representatives are
    picked from the cycle basis in order, skipping those already in the span,
    which makes the choice deterministic.
    """

    def __init__(self, boundaries: Iterable[Vec], cycles: Iterable[Vec]):
        self.ech = Echelon()
        for b in boundaries:
            self.ech.add(b)
        self.reps: List[Vec] = []
        for z in cycles:
            k = len(self.reps)
            if self.ech.add(z, {k: fmpq(1)}):
                self.reps.append(z)

    @property
    def dim(self) -> int:
        return len(self.reps)

    def coordinates(self, z: Vec) -> Vec:
        """Coordinates of the class of a cycle z in the representative basis."""
        r, t = self.ech.reduce(z)
        if r:
            raise ValueError("vector is not a cycle of this subquotient")
        return {k: -v for k, v in t.items()}
