"""Independent sl(2) link homology via the smoothing cube, used as an oracle
for uncolored diagrams at N = 2.  Also Lee's deformation (x^2 = 1) and the
Jones polynomial from the state sum.

Diagrams are given as lists of crossings (sign, left_in, right_in, left_out,
right_out) on arc labels; every strand points upward at a crossing.
"""

from __future__ import annotations

import itertools
from typing import Dict, List, Sequence, Tuple

from flint import fmpq, fmpq_mat

Cross = Tuple[int, str, str, str, str]


def _smoothing_pairs(c: Cross, bit: int) -> List[Tuple[str, str]]:
    sign, a, d, x, y = c
    oriented = [(a, x), (d, y)]
    unoriented = [(a, d), (x, y)]
    zero = oriented if sign > 0 else unoriented
    one = unoriented if sign > 0 else oriented
    return zero if bit == 0 else one


def _circles(arcs: Sequence[str], crossings: Sequence[Cross], state: Sequence[int]):
    parent = {a: a for a in arcs}

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for c, b in zip(crossings, state):
        for u, v in _smoothing_pairs(c, b):
            parent[find(u)] = find(v)
    roots = sorted({find(a) for a in arcs})
    label = {r: i for i, r in enumerate(roots)}
    return len(roots), {a: label[find(a)] for a in arcs}


def _basis(k: int):
    # 0 = unit "1" (q-degree +1), 1 = "x" (q-degree -1)
    return list(itertools.product((0, 1), repeat=k))


def _mult(u: int, v: int, lee: bool) -> Dict[int, int]:
    if u == 0:
        return {v: 1}
    if v == 0:
        return {u: 1}
    return {0: 1} if lee else {}


def _comult(u: int, lee: bool) -> Dict[Tuple[int, int], int]:
    if u == 0:
        out = {(0, 1): 1, (1, 0): 1}
        return out
    out = {(1, 1): 1}
    if lee:
        out[(0, 0)] = 1
    return out


def _edge_map(arcs, crossings, s0, s1, lee):
    n0, lab0 = _circles(arcs, crossings, s0)
    n1, lab1 = _circles(arcs, crossings, s1)
    B0, B1 = _basis(n0), _basis(n1)
    idx1 = {b: i for i, b in enumerate(B1)}
    # relate circles: each old circle maps into a new circle
    old_to_new = {}
    for a in arcs:
        old_to_new.setdefault(lab0[a], set()).add(lab1[a])
    new_from_old: Dict[int, List[int]] = {}
    for o, ns in old_to_new.items():
        for nn in ns:
            new_from_old.setdefault(nn, []).append(o)
    cols = []
    for b in B0:
        out: Dict[int, int] = {}
        if n1 == n0 - 1:
            # merge: two old circles into one new circle
            (merged,) = [nn for nn, os in new_from_old.items() if len(os) == 2]
            o1, o2 = new_from_old[merged]
            for u, cu in _mult(b[o1], b[o2], lee).items():
                img = [0] * n1
                for nn, os in new_from_old.items():
                    img[nn] = u if nn == merged else b[os[0]]
                out[idx1[tuple(img)]] = out.get(idx1[tuple(img)], 0) + cu
        else:
            (split,) = [o for o, ns in old_to_new.items() if len(ns) == 2]
            m1, m2 = sorted(old_to_new[split])
            for (u1, u2), cu in _comult(b[split], lee).items():
                img = [0] * n1
                for nn, os in new_from_old.items():
                    img[nn] = b[os[0]]
                img[m1], img[m2] = u1, u2
                out[idx1[tuple(img)]] = out.get(idx1[tuple(img)], 0) + cu
        cols.append(out)
    return cols


def _qdeg(b) -> int:
    return sum(1 if u == 0 else -1 for u in b)


def khovanov(arcs: Sequence[str], crossings: Sequence[Cross], lee: bool = False
             ) -> Dict[Tuple[int, int], int]:
    """{(q, t): dim}.  With lee=True the q entry is the filtration level of the
    basis vector (homology is then only filtered)."""
    arcs = list(arcs)
    n = len(crossings)
    npos = sum(1 for c in crossings if c[0] > 0)
    nneg = n - npos
    states = list(itertools.product((0, 1), repeat=n))
    groups: Dict[int, List[Tuple[int, ...]]] = {}
    for s in states:
        groups.setdefault(sum(s), []).append(s)
    offsets, bases = {}, {}
    for r, ss in groups.items():
        off = 0
        for s in ss:
            k, _ = _circles(arcs, crossings, s)
            offsets[s] = off
            bases[s] = _basis(k)
            off += len(bases[s])
    dims = {r: sum(len(bases[s]) for s in ss) for r, ss in groups.items()}
    mats = {}
    for r in range(n):
        M = fmpq_mat(dims[r + 1], dims[r])
        for s in groups[r]:
            for i in range(n):
                if s[i]:
                    continue
                s1 = s[:i] + (1,) + s[i + 1:]
                sign = -1 if sum(s[:i]) % 2 else 1
                cols = _edge_map(arcs, crossings, s, s1, lee)
                for j, col in enumerate(cols):
                    for row, v in col.items():
                        M[offsets[s1] + row, offsets[s] + j] += sign * v
        mats[r] = M
    # verify d^2 = 0
    for r in range(n - 1):
        P = mats[r + 1] * mats[r]
        assert all(P[i, j] == 0 for i in range(P.nrows()) for j in range(P.ncols()))
    out: Dict[Tuple[int, int], int] = {}
    for r in range(n + 1):
        labels = [(_qdeg(b) + r + npos - 2 * nneg) for s in groups[r] for b in bases[s]]
        t = r - nneg
        if not lee:
            for q in sorted(set(labels)):
                rows_r = [i for i, l in enumerate(labels) if l == q]
                dim = len(rows_r)
                rk_out = _rank_block(mats.get(r), rows_r, labels_next(groups, bases, r + 1, npos, nneg), q, out_side=True)
                rk_in = _rank_block(mats.get(r - 1), rows_r, labels_next(groups, bases, r - 1, npos, nneg), q, out_side=False)
                h = dim - rk_out - rk_in
                if h:
                    out[(q, t)] = h
        else:
            rk_out = mats[r].rank() if r in mats else 0
            rk_in = mats[r - 1].rank() if r - 1 in mats else 0
            h = dims[r] - rk_out - rk_in
            if h:
                out[(0, t)] = h
    return out


def labels_next(groups, bases, r, npos, nneg):
    if r not in groups:
        return []
    return [(_qdeg(b) + r + npos - 2 * nneg) for s in groups[r] for b in bases[s]]


def _rank_block(M, rows_here, labels_other, q, out_side):
    if M is None:
        return 0
    other = [i for i, l in enumerate(labels_other) if l == q]
    if not other or not rows_here:
        return 0
    if out_side:
        sub = fmpq_mat(len(other), len(rows_here))
        for a, i in enumerate(other):
            for b, j in enumerate(rows_here):
                sub[a, b] = M[i, j]
    else:
        sub = fmpq_mat(len(rows_here), len(other))
        for a, i in enumerate(rows_here):
            for b, j in enumerate(other):
                sub[a, b] = M[i, j]
    return sub.rank()


def jones_state_sum(arcs, crossings) -> Dict[int, int]:
    """Unnormalized Jones polynomial sum_r (-1)^r q^{r+n+-2n-} (q+q^-1)^{#circles}
    times (-1)^{n-}, as {q exponent: coefficient}."""
    n = len(crossings)
    npos = sum(1 for c in crossings if c[0] > 0)
    nneg = n - npos
    out: Dict[int, int] = {}
    for s in itertools.product((0, 1), repeat=n):
        k, _ = _circles(list(arcs), crossings, s)
        r = sum(s)
        poly = {0: 1}
        for _ in range(k):
            new = {}
            for e, c in poly.items():
                new[e + 1] = new.get(e + 1, 0) + c
                new[e - 1] = new.get(e - 1, 0) + c
            poly = new
        sgn = 1 if (r - nneg) % 2 == 0 else -1
        for e, c in poly.items():
            key = e + r + npos - 2 * nneg
            out[key] = out.get(key, 0) + sgn * c
    return {e: c for e, c in out.items() if c}
