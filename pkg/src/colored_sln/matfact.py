"""Koszul matrix factorizations, row exclusion, finite models, homology and
Hom-space solving.

A Koszul factorization is stored as rows (a_i, b_i) over a polynomial ring
(optionally modulo a Groebner ideal), possibly tensored with a finite-rank
free factorization ``base``.  Generators are 1_E (x) t with E a bitmask over
rows.  The differential is

    d(1_E t) = sum_i (-1)^{#(E below i)} c_i 1_{E xor i} t + (-1)^{|E|} 1_E d(t)

where c_i = a_i if i is not in E and b_i otherwise.  An excluded row keeps its
index with a fixed state: state 0 after quotienting by b_i, state 1 after
quotienting by a_i.  Keeping the fixed bit inside E makes all signs and the
degree/parity shifts of an a-exclusion automatic.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from flint import fmpq

from .linalg import Echelon, Quotient, Vec, nullspace, vec_add
from .polyring import GroebnerIdeal, MPoly, Mono, ResourceLimit, RingSpec, to_q

Elem = Dict[Tuple[int, int], MPoly]


class MFError(RuntimeError):
    reason = "unsupported-graph"


class UnsupportedGraph(MFError):
    reason = "unsupported-graph"


class UniquenessViolated(MFError):
    reason = "uniqueness-violated"


def popcount(x: int) -> int:
    return bin(x).count("1")


@dataclass
class Row:
    a: MPoly
    b: MPoly
    deg_b: int  # nominal total degree of b (deg a = 2N+2 - deg_b)


# --------------------------------------------------------------------------
# rings


def union_ring(rings: Sequence[RingSpec], extra_blocks: bool = True) -> RingSpec:
    """Merge rings by variable name; blocks of later rings are appended."""
    names, degs, qdegs, blocks = [], [], [], []
    seen = set()
    for r in rings:
        start = 0
        for b in r.blocks:
            new = 0
            for i in range(start, start + b):
                if r.names[i] in seen:
                    continue
                seen.add(r.names[i])
                names.append(r.names[i])
                degs.append(r.degrees[i])
                qdegs.append(r.qdegrees[i])
                new += 1
            if new:
                blocks.append(new)
            start += b
    return RingSpec(names, degs, qdegs, blocks if extra_blocks else None)


def transfer(p: MPoly, target: RingSpec, rename: Optional[Dict[str, str]] = None) -> MPoly:
    """Move a polynomial into ``target`` by (optionally renamed) variable names."""
    src = p.ring
    if src is target and not rename:
        return p
    rename = rename or {}
    used = p.variables()
    idx = []
    for i, n in enumerate(src.names):
        j = target.index.get(rename.get(n, n), -1)
        if j < 0 and i in used:
            raise KeyError(f"variable {n} has no counterpart in the target ring")
        idx.append(j)
    return p.map_to(target, idx)


# --------------------------------------------------------------------------
# free factorizations (explicit matrices)


class FreeMF:
    """Finite-rank free factorization: basis with parity and degree, and the
    differential as sparse columns ``D[col] = {row: entry}``."""

    def __init__(self, ring: RingSpec, parity: Sequence[int], degree: Sequence[int],
                 D: Sequence[Dict[int, MPoly]], labels: Optional[Sequence] = None):
        self.ring = ring
        self.parity = list(parity)
        self.degree = list(degree)
        self.D = [dict(c) for c in D]
        self.labels = list(labels) if labels is not None else list(range(len(parity)))

    @property
    def rank(self) -> int:
        return len(self.parity)

    def dual(self) -> "FreeMF":
        """Dual factorization: t* has parity |t|, degree -deg t and
        d(t*) = -(-1)^{|t|} sum_u D[t, u] u*."""
        n = self.rank
        cols: List[Dict[int, MPoly]] = [dict() for _ in range(n)]
        for u in range(n):
            for t, e in self.D[u].items():
                sgn = 1 if self.parity[t] % 2 else -1
                cols[t][u] = e * sgn
        return FreeMF(self.ring, self.parity, [-d for d in self.degree], cols,
                      [("dual", l) for l in self.labels])

    def square(self, ideal: Optional[GroebnerIdeal] = None) -> List[Dict[int, MPoly]]:
        """D*D as sparse columns (useful for potential checks)."""
        out = []
        for j in range(self.rank):
            col: Dict[int, MPoly] = {}
            for k, e in self.D[j].items():
                for i, f in self.D[k].items():
                    v = col.get(i, self.ring.zero()) + e * f
                    col[i] = v
            if ideal is not None:
                col = {i: ideal.normal_form(v) for i, v in col.items()}
            out.append({i: v for i, v in col.items() if v})
        return out


# --------------------------------------------------------------------------
# Koszul factorizations


class KoszulMF:
    def __init__(self, ring: RingSpec, rows: Sequence[Row], N: int,
                 ideal: Optional[GroebnerIdeal] = None,
                 fixed: Optional[Dict[int, int]] = None,
                 base: Optional[FreeMF] = None,
                 q_shift: int = 0, z2_shift: int = 0,
                 potential: Optional[MPoly] = None,
                 check: bool = True,
                 reduce_entries: bool = True):
        self.ring = ring
        self.N = N
        self.ideal = ideal
        self.fixed = dict(fixed or {})
        self.base = base
        self.q_shift = q_shift
        self.z2_shift = z2_shift % 2
        self.specialized = False
        if reduce_entries and ideal is not None:
            rows = [Row(self.nf(r.a), self.nf(r.b), r.deg_b) for r in rows]
            if base is not None:
                base = FreeMF(base.ring, base.parity, base.degree,
                              [{i: self.nf(e) for i, e in c.items() if self.nf(e)} for c in base.D],
                              base.labels)
                self.base = base
        self.rows = list(rows)
        self.potential = potential
        if check and potential is not None:
            self.check_potential(potential)

    # basic data -----------------------------------------------------------
    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def active(self) -> List[int]:
        return [i for i in range(self.nrows) if i not in self.fixed]

    @property
    def fixed_mask(self) -> int:
        return sum(1 << i for i, s in self.fixed.items() if s)

    @property
    def is_zero(self) -> bool:
        return self.ideal is not None and self.ideal.unit

    def nf(self, p: MPoly) -> MPoly:
        return self.ideal.normal_form(p) if self.ideal is not None else p

    def base_rank(self) -> int:
        return self.base.rank if self.base is not None else 1

    def generators(self) -> List[Tuple[int, int]]:
        act = self.active
        fm = self.fixed_mask
        out = []
        for bits in itertools.product((0, 1), repeat=len(act)):
            E = fm
            for i, bit in zip(act, bits):
                if bit:
                    E |= 1 << i
            for t in range(self.base_rank()):
                out.append((E, t))
        return out

    def gen_degree(self, E: int, t: int = 0) -> int:
        N1 = self.N + 1
        d = self.q_shift
        for i in range(self.nrows):
            if E >> i & 1:
                d += self.rows[i].deg_b - N1
        if self.base is not None:
            d += self.base.degree[t]
        return d

    def gen_parity(self, E: int, t: int = 0) -> int:
        p = popcount(E) + self.z2_shift
        if self.base is not None:
            p += self.base.parity[t]
        return p % 2

    def check_potential(self, w: MPoly):
        total = self.ring.zero()
        for i in self.active:
            total = total + self.rows[i].a * self.rows[i].b
        total = self.nf(total - w)
        if total:
            raise ValueError(f"row products do not sum to the potential: {total.to_str()}")

    # differential -----------------------------------------------------------
    def d(self, x: Elem) -> Elem:
        out: Dict[Tuple[int, int], MPoly] = {}
        rows = self.rows
        act = self.active
        for (E, t), p in x.items():
            if not p:
                continue
            for i in act:
                bit = 1 << i
                c = rows[i].b if E & bit else rows[i].a
                if not c:
                    continue
                s = popcount(E & (bit - 1)) & 1
                term = c * p
                if s:
                    term = -term
                key = (E ^ bit, t)
                out[key] = out[key] + term if key in out else term
            if self.base is not None:
                s = popcount(E) & 1
                for u, e in self.base.D[t].items():
                    term = e * p
                    if s:
                        term = -term
                    key = (E, u)
                    out[key] = out[key] + term if key in out else term
        res = {}
        for k, v in out.items():
            v = self.nf(v)
            if v:
                res[k] = v
        return res

    def reduce_elem(self, x: Elem) -> Elem:
        out = {}
        for k, v in x.items():
            v = self.nf(v)
            if v:
                out[k] = v
        return out

    # derived objects --------------------------------------------------------
    def with_changes(self, **kw) -> "KoszulMF":
        args = dict(ring=self.ring, rows=self.rows, N=self.N, ideal=self.ideal,
                    fixed=self.fixed, base=self.base, q_shift=self.q_shift,
                    z2_shift=self.z2_shift, potential=None, check=False)
        args.update(kw)
        out = KoszulMF(**args)
        out.specialized = self.specialized
        return out

    def shifted(self, q: int = 0, z2: int = 0) -> "KoszulMF":
        return self.with_changes(q_shift=self.q_shift + q, z2_shift=self.z2_shift + z2,
                                 reduce_entries=False)

    def to_json(self):
        return {
            "ring": list(self.ring.names),
            "rows": [{"a": r.a.to_json(), "b": r.b.to_json(), "deg_b": r.deg_b}
                     for r in self.rows],
            "fixed": {str(k): v for k, v in sorted(self.fixed.items())},
            "ideal": [g.to_json() for g in self.ideal.polys()] if self.ideal else [],
            "q_shift": self.q_shift,
            "z2_shift": self.z2_shift,
        }


def empty_mf(ring: RingSpec, N: int) -> KoszulMF:
    return KoszulMF(ring, [], N)


def tensor(M: KoszulMF, Mp: KoszulMF) -> KoszulMF:
    """Tensor product over the shared variables (rows concatenated)."""
    if M.N != Mp.N:
        raise ValueError("factorizations for different N")
    if M.base is not None and Mp.base is not None:
        raise ValueError("tensor of two factorizations with explicit bases is not supported")
    ring = union_ring([M.ring, Mp.ring])
    rows = [Row(transfer(r.a, ring), transfer(r.b, ring), r.deg_b) for r in M.rows]
    rows += [Row(transfer(r.a, ring), transfer(r.b, ring), r.deg_b) for r in Mp.rows]
    fixed = dict(M.fixed)
    for i, s in Mp.fixed.items():
        fixed[i + M.nrows] = s
    gens = []
    for I in (M.ideal, Mp.ideal):
        if I is not None:
            gens += [transfer(g, ring) for g in I.polys()]
    ideal = GroebnerIdeal(ring, gens) if gens else None
    base = None
    src = M.base or Mp.base
    if src is not None:
        base = FreeMF(ring, src.parity, src.degree,
                      [{i: transfer(e, ring) for i, e in c.items()} for c in src.D], src.labels)
    pot = None
    if M.potential is not None and Mp.potential is not None:
        pot = transfer(M.potential, ring) + transfer(Mp.potential, ring)
    return KoszulMF(ring, rows, M.N, ideal=ideal, fixed=fixed, base=base,
                    q_shift=M.q_shift + Mp.q_shift, z2_shift=M.z2_shift + Mp.z2_shift,
                    potential=pot)


def specialize_B(M: KoszulMF, values: Optional[Sequence] = None) -> KoszulMF:
    """Substitute the deformation parameters (all zero when ``values`` is None)."""
    if M.specialized:
        raise ValueError("factorization is already specialized")
    bnames = [n for n in M.ring.names if n.startswith("B") and n[1:].isdigit()]
    if values is None:
        values = [0] * len(bnames)
    if len(values) != len(bnames):
        raise ValueError(f"expected {len(bnames)} values, got {len(values)}")
    assign = {n: v for n, v in zip(bnames, values)}
    keep = [i for i, n in enumerate(M.ring.names) if n not in assign]
    # rebuild blocks without the B variables
    blocks = []
    start = 0
    for b in M.ring.blocks:
        k = sum(1 for i in range(start, start + b) if M.ring.names[i] not in assign)
        if k:
            blocks.append(k)
        start += b
    ring = RingSpec([M.ring.names[i] for i in keep], [M.ring.degrees[i] for i in keep],
                    [M.ring.qdegrees[i] for i in keep], blocks)

    def sp(p: MPoly) -> MPoly:
        return transfer(p.specialize(assign), ring) if p.terms else ring.zero()

    def sp_safe(p: MPoly) -> MPoly:
        q = p.specialize(assign)
        idx = [ring.index.get(n, -1) for n in M.ring.names]
        return q.map_to(ring, idx)

    rows = [Row(sp_safe(r.a), sp_safe(r.b), r.deg_b) for r in M.rows]
    ideal = None
    if M.ideal is not None:
        ideal = GroebnerIdeal(ring, [sp_safe(g) for g in M.ideal.polys()])
    base = None
    if M.base is not None:
        base = FreeMF(ring, M.base.parity, M.base.degree,
                      [{i: sp_safe(e) for i, e in c.items()} for c in M.base.D], M.base.labels)
    out = KoszulMF(ring, rows, M.N, ideal=ideal, fixed=M.fixed, base=base,
                   q_shift=M.q_shift, z2_shift=M.z2_shift,
                   potential=sp_safe(M.potential) if M.potential is not None else None)
    out.specialized = True
    return out


# --------------------------------------------------------------------------
# exclusions


@dataclass
class Exclusion:
    """One row exclusion with the data needed to move cycles across it."""

    before: KoszulMF
    after: KoszulMF
    row: int
    kept: int
    s: MPoly

    def project(self, x: Elem) -> Elem:
        bit = 1 << self.row
        want = bit if self.kept else 0
        out = {}
        for (E, t), p in x.items():
            if E & bit == want:
                p = self.after.nf(p)
                if p:
                    out[(E, t)] = p
        return out

    def contract(self, x: Elem) -> Elem:
        """The homotopy h on components that lie in (s)."""
        bit = 1 << self.row
        want = bit if self.kept else 0
        ideal = self.after.ideal
        out: Elem = {}
        for (E, t), p in x.items():
            if E & bit != want or not p:
                continue
            rem, cof = ideal.reduce(p, track=True)
            if rem:
                raise MFError("element is not divisible by the excluded entry")
            r = self.before.nf(cof)
            if not r:
                continue
            if popcount(E & (bit - 1)) & 1:
                r = -r
            key = (E ^ bit, t)
            out[key] = out[key] + r if key in out else r
        return {k: v for k, v in out.items() if v}

    def lift(self, z: Elem) -> Elem:
        y = self.before.reduce_elem(z)
        dy = self.before.d(y)
        if not dy:
            return y
        h = self.contract(dy)
        out = dict(y)
        for k, v in h.items():
            w = out[k] - v if k in out else -v
            if w:
                out[k] = self.before.nf(w)
            else:
                out.pop(k, None)
        return {k: v for k, v in out.items() if v}


def exclude(M: KoszulMF, i: int, which: str) -> Exclusion:
    """Quotient by b_i (``which='b'``, keep state 0) or by a_i (keep state 1)."""
    if i in M.fixed:
        raise ValueError(f"row {i} already excluded")
    row = M.rows[i]
    s = row.b if which == "b" else row.a
    kept = 0 if which == "b" else 1
    base_ideal = M.ideal if M.ideal is not None else GroebnerIdeal(M.ring, [])
    ideal = base_ideal.extend(s, track=True)
    fixed = dict(M.fixed)
    fixed[i] = kept
    after = M.with_changes(ideal=ideal, fixed=fixed, reduce_entries=True)
    if M.ideal is None:
        before = M.with_changes(ideal=base_ideal, reduce_entries=False)
    else:
        before = M
    return Exclusion(before, after, i, kept, s)


def exclude_row_b(M: KoszulMF, i: int) -> KoszulMF:
    return exclude(M, i, "b").after


def exclude_row_a(M: KoszulMF, rows: Sequence[int]) -> KoszulMF:
    for i in rows:
        M = exclude(M, i, "a").after
    return M


@dataclass
class Reduction:
    """A chain of exclusions from ``start`` to ``end``."""

    start: KoszulMF
    steps: List[Exclusion] = field(default_factory=list)
    finite: bool = True

    @property
    def end(self) -> KoszulMF:
        return self.steps[-1].after if self.steps else self.start

    def project(self, x: Elem) -> Elem:
        if not self.steps:
            return self.start.reduce_elem(x)
        for st in self.steps:
            x = st.project(st.before.reduce_elem(x))
        return x

    def lift(self, z: Elem) -> Elem:
        for st in reversed(self.steps):
            z = st.lift(z)
        return z


def _is_linear(p: MPoly) -> bool:
    m, c = p.lead()
    return sum(m) == 1 and p.ring.degrees[[i for i, e in enumerate(m) if e][0]] == p.degree()


def _candidates(M: KoszulMF, allowed: Optional[Iterable[int]], which: Sequence[str]):
    out = []
    rows = M.active if allowed is None else [i for i in allowed if i not in M.fixed]
    for i in rows:
        for w in which:
            s = M.rows[i].b if w == "b" else M.rows[i].a
            if not s:
                continue
            lin = _is_linear(s)
            out.append((0 if s.is_constant() else 1, 0 if lin else 1, s.degree(), len(s.terms),
                        i, w))
    out.sort()
    return out


def reduce_to_finite(M: KoszulMF, max_branch: int = 4000, partial: bool = False) -> Reduction:
    """Greedy regular-sequence exclusion until the base ring is finite.

    Each step quotients by a row entry that drops the Krull dimension by one;
    dead ends are backtracked.  A unit entry makes the factorization zero.
    With ``partial`` a stalled or over-budget search returns the deepest
    chain found, flagged ``finite=False``, instead of raising.
    """
    counter = [0]
    best: List[Tuple[int, List[Exclusion]]] = []

    def dimension(K: KoszulMF) -> int:
        if K.ideal is None:
            return K.ring.nvars
        return K.ideal.krull_dimension()

    # for homogeneous entries in a graded Cohen-Macaulay ring regularity does
    # not depend on the order, so a state is the set of excluded entries
    dead = set()

    def rec(K: KoszulMF, steps: List[Exclusion]) -> Optional[List[Exclusion]]:
        if K.is_zero or (K.ideal is not None and K.ideal.is_zero_dimensional()) \
                or (K.ideal is None and K.ring.nvars == 0):
            return steps
        state = frozenset(K.fixed.items())
        if state in dead:
            return None
        dim0 = dimension(K)
        if not best or dim0 < best[0][0]:
            best[:] = [(dim0, steps)]
        for unit, lin, deg, nterms, i, w in _candidates(K, None, ("b", "a")):
            nxt = state | {(i, 0 if w == "b" else 1)}
            if nxt in dead:
                continue
            counter[0] += 1
            if counter[0] > max_branch:
                raise UnsupportedGraph("exclusion search budget exhausted")
            ex = exclude(K, i, w)
            if ex.after.is_zero:
                return steps + [ex]
            if dimension(ex.after) != dim0 - 1:
                dead.add(nxt)
                continue
            res = rec(ex.after, steps + [ex])
            if res is not None:
                return res
        dead.add(state)
        return None

    try:
        res = rec(M, [])
    except UnsupportedGraph:
        if not partial:
            raise
        return Reduction(M, best[0][1], finite=False)
    if res is None:
        if partial:
            return Reduction(M, best[0][1], finite=False)
        raise UnsupportedGraph("row exclusions stall before the base ring becomes finite")
    return Reduction(M, res)


# --------------------------------------------------------------------------
# finite models and homology


class FiniteMF:
    """Explicit rational model over a finite-dimensional base ring.

    Basis vectors are (E, t, monomial) triples.  ``tag`` is the quantum degree
    (a filtration level when the deformation parameters are nonzero).  The
    basis is sorted by tag descending so echelon pivots realize the filtration.
    """

    def __init__(self, M: KoszulMF):
        if M.is_zero:
            self.mf = M
            self.basis = []
            self.index = {}
            self.tags = []
            self.parity = []
            self.cols = []
            return
        if M.ideal is not None:
            stairs = M.ideal.staircase()
        elif M.ring.nvars == 0:
            stairs = [M.ring.zero_mono]
        else:
            raise MFError("base ring is infinite-dimensional; exclusions are required first")
        self.mf = M
        ring = M.ring
        items = []
        for (E, t) in M.generators():
            g = M.gen_degree(E, t)
            par = M.gen_parity(E, t)
            for m in stairs:
                items.append((-(g + ring.mono_qdegree(m)), par, E, t, ring.key(m), m))
        items.sort()
        self.basis = [(E, t, m) for _, _, E, t, _, m in items]
        self.tags = [-it[0] for it in items]
        self.parity = [it[1] for it in items]
        self.index = {b: k for k, b in enumerate(self.basis)}
        self.cols = [self.to_vector(M.d({(E, t): MPoly(ring, {m: fmpq(1)})}))
                     for (E, t, m) in self.basis]

    @property
    def dim(self) -> int:
        return len(self.basis)

    def to_vector(self, x: Elem) -> Vec:
        v: Vec = {}
        idx = self.index
        for (E, t), p in x.items():
            for m, c in p.terms.items():
                v[idx[(E, t, m)]] = c
        return v

    def to_elem(self, v: Vec) -> Elem:
        ring = self.mf.ring
        acc: Dict[Tuple[int, int], Dict[Mono, fmpq]] = {}
        for k, c in v.items():
            E, t, m = self.basis[k]
            acc.setdefault((E, t), {})[m] = c
        return {k: MPoly(ring, d) for k, d in acc.items()}

    def check_square_zero(self) -> bool:
        for c in self.cols:
            out: Vec = {}
            for k, v in c.items():
                out = vec_add(out, self.cols[k], v)
            if out:
                return False
        return True


class GradedVS:
    """Homology of a finite model with chosen representatives.

    In graded mode the blocks are (z2, degree); in filtered mode blocks are z2
    only and every representative carries the filtration level of its pivot.
    """

    def __init__(self, fm: FiniteMF, graded: bool = True):
        self.fm = fm
        self.graded = graded
        N1 = fm.mf.N + 1 if fm.dim else 0
        blocks: Dict[tuple, List[int]] = {}
        for k in range(fm.dim):
            key = (fm.parity[k], fm.tags[k]) if graded else (fm.parity[k],)
            blocks.setdefault(key, []).append(k)
        self.block_of = {}
        for key, ks in blocks.items():
            for k in ks:
                self.block_of[k] = key
        self.quotients: Dict[tuple, Quotient] = {}
        self.reps: List[Tuple[tuple, int]] = []  # (block key, local index)
        self.rep_vectors: List[Vec] = []
        self.rep_tags: List[int] = []
        self.rep_parity: List[int] = []
        for key in sorted(blocks):
            ks = blocks[key]
            cols = [fm.cols[k] for k in ks]
            for c in cols:
                for r in c:
                    exp = (1 - key[0], key[1] + N1) if graded else (1 - key[0],)
                    if self.block_of[r] != exp:
                        raise MFError("differential does not respect the block grading")
            ker = nullspace(cols)
            cycles = [{ks[j]: v for j, v in z.items()} for z in ker]
            src_key = (1 - key[0], key[1] - N1) if graded else (1 - key[0],)
            bnd = [fm.cols[k] for k in blocks.get(src_key, [])]
            Q = _filtered_quotient(bnd, cycles)
            self.quotients[key] = Q
            for j, rep in enumerate(Q.reps):
                self.reps.append((key, j))
                self.rep_vectors.append(rep)
                self.rep_tags.append(fm.tags[min(rep)])
                self.rep_parity.append(key[0])
        self.rep_index = {r: n for n, r in enumerate(self.reps)}

    @property
    def dim(self) -> int:
        return len(self.reps)

    def rep_elem(self, n: int) -> Elem:
        return self.fm.to_elem(self.rep_vectors[n])

    def elem_coordinates(self, x: Elem) -> Vec:
        return self.coordinates(self.fm.to_vector(x)) if x else {}

    def dims(self) -> Dict[Tuple[int, int], int]:
        out: Dict[Tuple[int, int], int] = {}
        for p, g in zip(self.rep_parity, self.rep_tags):
            out[(p, g)] = out.get((p, g), 0) + 1
        return out

    def coordinates(self, v: Vec) -> Vec:
        """Homology coordinates of a cycle (given as a vector of the model)."""
        parts: Dict[tuple, Vec] = {}
        for k, c in v.items():
            parts.setdefault(self.block_of[k], {})[k] = c
        out: Vec = {}
        for key, part in parts.items():
            Q = self.quotients.get(key)
            if Q is None:
                raise MFError("vector outside the complex")
            for j, c in Q.coordinates(part).items():
                out[self.rep_index[(key, j)]] = c
        return out

    def filtration_profile(self) -> Dict[int, Dict[int, int]]:
        """z2 -> {level: dim of fil^level}, cumulative."""
        out: Dict[int, Dict[int, int]] = {}
        for p in (0, 1):
            tags = sorted(t for t, q in zip(self.rep_tags, self.rep_parity) if q == p)
            prof = {}
            for n, t in enumerate(tags, 1):
                prof[t] = n
            out[p] = prof
        return out


def _filtered_quotient(boundaries: List[Vec], cycles: List[Vec]) -> Quotient:
    """Quotient whose representatives are reduced residuals, so that each
    representative's smallest index is its filtration pivot."""
    ech = Echelon()
    for b in boundaries:
        ech.add(b)
    reps: List[Vec] = []
    for z in cycles:
        r, _ = ech.reduce(z)
        if r:
            # fully reduce against previously chosen representatives too
            ech.add(r)
            reps.append(r)
    # second pass: reduce representatives against each other's pivots would
    # break the pivot property; keep residuals as they are
    Q = Quotient.__new__(Quotient)
    Q.ech = Echelon()
    for b in boundaries:
        Q.ech.add(b)
    Q.reps = []
    for k, r in enumerate(reps):
        if not Q.ech.add(r, {k: fmpq(1)}):
            raise MFError("representative choice failed")
        Q.reps.append(r)
    return Q


def homology(M: KoszulMF, graded: bool = True) -> Tuple[GradedVS, Reduction]:
    """Reduce to a finite model and compute homology (potential must be zero)."""
    red = reduce_to_finite(M)
    fm = FiniteMF(red.end)
    return GradedVS(fm, graded=graded), red


# --------------------------------------------------------------------------
# degreewise homology for graded factorizations over infinite rings


class DegreePiece:
    def __init__(self, M: KoszulMF, parity: int, degree: int):
        self.M = M
        ideal = M.ideal if M.ideal is not None else GroebnerIdeal(M.ring, [])
        basis = []
        for (E, t) in M.generators():
            if M.gen_parity(E, t) != parity:
                continue
            g = M.gen_degree(E, t)
            for m in ideal.standard_monomials_of_degree(degree - g):
                basis.append((E, t, m))
        self.basis = basis
        self.index = {b: k for k, b in enumerate(basis)}

    def to_vector(self, x: Elem) -> Vec:
        v: Vec = {}
        for (E, t), p in x.items():
            for m, c in p.terms.items():
                k = self.index.get((E, t, m))
                if k is None:
                    raise MFError("element has a component outside this degree")
                v[k] = c
        return v

    def to_elem(self, v: Vec) -> Elem:
        ring = self.M.ring
        acc: Dict[Tuple[int, int], Dict[Mono, fmpq]] = {}
        for k, c in v.items():
            E, t, m = self.basis[k]
            acc.setdefault((E, t), {})[m] = c
        return {k: MPoly(ring, d) for k, d in acc.items()}

    def elem_of(self, k: int) -> Elem:
        E, t, m = self.basis[k]
        return {(E, t): MPoly(self.M.ring, {m: fmpq(1)})}


def degree_homology(M: KoszulMF, parity: int, degree: int) -> Tuple[List[Elem], DegreePiece]:
    """Homology representatives of M in one (parity, total degree)."""
    Q, here = _degree_quotient(M, parity, degree)
    return [here.to_elem(r) for r in Q.reps], here


def _degree_quotient(M: KoszulMF, parity: int, degree: int) -> Tuple[Quotient, DegreePiece]:
    N1 = M.N + 1
    here = DegreePiece(M, parity, degree)
    nxt = DegreePiece(M, 1 - parity, degree + N1)
    prv = DegreePiece(M, 1 - parity, degree - N1)
    cols = [nxt.to_vector(M.d(here.elem_of(k))) for k in range(len(here.basis))]
    cycles = nullspace(cols)
    bnd = [here.to_vector(M.d(prv.elem_of(k))) for k in range(len(prv.basis))]
    Q = Quotient(bnd, cycles)
    return Q, here


class DegreewiseVS:
    """Graded homology assembled one degree at a time.

    Used when exclusions cannot make the base ring finite.  Degrees below the
    smallest generator degree vanish; closed-graph homology is symmetric under
    q -> -q, so once the lowest nonzero degree q0 is found nothing lives above
    -q0.  The scan never passes -lo either.
    """

    graded = True

    def __init__(self, M: KoszulMF):
        self.mf = M
        self.pieces: Dict[Tuple[int, int], Tuple[Quotient, DegreePiece]] = {}
        self.reps: List[Tuple[Tuple[int, int], int]] = []
        self.rep_tags: List[int] = []
        self.rep_parity: List[int] = []
        if M.is_zero:
            self.rep_index = {}
            return
        lo = min(M.gen_degree(E, t) for E, t in M.generators())
        hi = -lo
        q = lo
        while q <= hi:
            for p in (0, 1):
                Q, here = _degree_quotient(M, p, q)
                self.pieces[(p, q)] = (Q, here)
                for j in range(Q.dim):
                    self.reps.append(((p, q), j))
                    self.rep_tags.append(q)
                    self.rep_parity.append(p)
            if self.reps and hi > -self.rep_tags[0]:
                hi = -self.rep_tags[0]
            q += 1
        self.rep_index = {r: n for n, r in enumerate(self.reps)}

    @property
    def dim(self) -> int:
        return len(self.reps)

    def dims(self) -> Dict[Tuple[int, int], int]:
        out: Dict[Tuple[int, int], int] = {}
        for p, g in zip(self.rep_parity, self.rep_tags):
            out[(p, g)] = out.get((p, g), 0) + 1
        return out

    def rep_elem(self, n: int) -> Elem:
        key, j = self.reps[n]
        Q, here = self.pieces[key]
        return here.to_elem(Q.reps[j])

    def elem_coordinates(self, x: Elem) -> Vec:
        M = self.mf
        ring = M.ring
        parts: Dict[Tuple[int, int], Elem] = {}
        for (E, t), poly in x.items():
            g = M.gen_degree(E, t)
            par = M.gen_parity(E, t)
            for m, c in poly.terms.items():
                key = (par, g + ring.mono_qdegree(m))
                d = parts.setdefault(key, {}).setdefault((E, t), {})
                d[m] = c
        out: Vec = {}
        for key, comp in parts.items():
            if key not in self.pieces:
                # outside the window the homology vanishes; the piece is
                # still needed to certify the element is a boundary
                Q, here = _degree_quotient(M, *key)
                if Q.dim:
                    raise MFError("homology found outside the symmetric degree window")
                self.pieces[key] = (Q, here)
            Q, here = self.pieces[key]
            v = here.to_vector({k: MPoly(ring, d) for k, d in comp.items()})
            for j, c in Q.coordinates(v).items():
                out[self.rep_index[(key, j)]] = c
        return out


# --------------------------------------------------------------------------
# local models and Hom solving


class LocalModel:
    """A Koszul factorization over R_bd[internal]/J that is free over the
    boundary ring R_bd with basis tau^alpha 1_E.

    ``internal`` lists the internal variable names; J's leading monomials
    involve internal variables only, so the internal staircase is a basis.
    """

    def __init__(self, mf: KoszulMF, internal: Sequence[str], boundary: Sequence[str]):
        self.mf = mf
        self.internal = list(internal)
        self.boundary = list(boundary)
        ring = mf.ring
        self.int_idx = [ring.index[n] for n in self.internal]
        ideal = mf.ideal
        if ideal is not None and not ideal.unit:
            int_set = set(self.int_idx)
            for lm in ideal.leading_monomials():
                if any(e and i not in int_set for i, e in enumerate(lm)):
                    raise UnsupportedGraph("quotient is not free over the boundary ring")
                if not any(lm):
                    raise UnsupportedGraph("local quotient is zero")
            pure = {i: False for i in self.int_idx}
            for lm in ideal.leading_monomials():
                nz = [i for i, e in enumerate(lm) if e]
                if len(nz) == 1:
                    pure[nz[0]] = True
            if not all(pure.values()):
                raise UnsupportedGraph("quotient is not finite over the boundary ring")
            self.stairs = self._internal_staircase()
        elif ideal is not None and ideal.unit:
            self.stairs = []
        else:
            if self.int_idx:
                raise UnsupportedGraph("free internal variables")
            self.stairs = [ring.zero_mono]

    def _internal_staircase(self) -> List[Mono]:
        ring = self.mf.ring
        lms = self.mf.ideal.leading_monomials()
        from .polyring import divides
        start = ring.zero_mono
        seen = {start}
        frontier = [start]
        while frontier:
            nxt = []
            for m in frontier:
                for i in self.int_idx:
                    t = list(m)
                    t[i] += 1
                    t = tuple(t)
                    if t in seen or any(divides(l, t) for l in lms):
                        continue
                    seen.add(t)
                    nxt.append(t)
            frontier = nxt
        return sorted(seen, key=ring.key, reverse=True)

    @property
    def simple(self) -> bool:
        return len(self.stairs) == 1

    def split(self, p: MPoly) -> Dict[Mono, MPoly]:
        """Write a normal form as sum tau^alpha * (boundary polynomial)."""
        ring = self.mf.ring
        ii = self.int_idx
        out: Dict[Mono, Dict[Mono, fmpq]] = {}
        for m, c in p.terms.items():
            alpha = [0] * ring.nvars
            rest = list(m)
            for i in ii:
                alpha[i] = m[i]
                rest[i] = 0
            out.setdefault(tuple(alpha), {})[tuple(rest)] = c
        return {a: MPoly(ring, d) for a, d in out.items()}

    def free_basis(self) -> List[Tuple[Mono, int]]:
        return [(a, E) for (E, _t) in self.mf.generators() for a in self.stairs]

    def as_free(self) -> FreeMF:
        """Explicit matrix over the boundary ring in the tau^alpha 1_E basis."""
        M = self.mf
        ring = M.ring
        basis = self.free_basis()
        index = {b: k for k, b in enumerate(basis)}
        cols = []
        parity, degree = [], []
        for (alpha, E) in basis:
            x = {(E, 0): M.nf(MPoly(ring, {alpha: fmpq(1)}))}
            dx = M.d(x)
            col: Dict[int, MPoly] = {}
            for (F, _t), p in dx.items():
                for beta, coef in self.split(p).items():
                    k = index[(beta, F)]
                    col[k] = col[k] + coef if k in col else coef
            cols.append({k: v for k, v in col.items() if v})
            parity.append(M.gen_parity(E))
            degree.append(M.gen_degree(E) + ring.mono_degree(alpha))
        return FreeMF(ring, parity, degree, cols, basis)


@dataclass
class LocalMap:
    """A morphism between local models, stored on the free boundary basis:
    ``images[(alpha, E)]`` is an element of the target."""

    source: LocalModel
    target: LocalModel
    images: Dict[Tuple[Mono, int], Elem]
    degree: int

    def check_chain_map(self) -> bool:
        S, T = self.source, self.target
        Sm, Tm = S.mf, T.mf
        for (alpha, E), img in self.images.items():
            lhs = Tm.d(img)
            x = {(E, 0): Sm.nf(MPoly(Sm.ring, {alpha: fmpq(1)}))}
            rhs = self.apply(Sm.d(x))
            diff = dict(lhs)
            for k, v in rhs.items():
                diff[k] = diff[k] - v if k in diff else -v
            if any(Tm.nf(v) for v in diff.values()):
                return False
        return True

    def apply(self, x: Elem) -> Elem:
        """Apply to an element of the source model (polys in the source ring)."""
        S, T = self.source, self.target
        out: Elem = {}
        for (E, _t), p in x.items():
            for alpha, coef in S.split(S.mf.nf(p)).items():
                img = self.images.get((alpha, E))
                if not img:
                    continue
                c = transfer(coef, T.mf.ring)
                for k, v in img.items():
                    w = c * v
                    out[k] = out[k] + w if k in out else w
        return T.mf.reduce_elem(out)

    def is_zero(self) -> bool:
        return not any(self.images.values())


def _hom_simple_source(S: LocalModel, T: LocalModel):
    """Hom(S, T) for S with trivial internal staircase, as a Koszul
    factorization over T's ring: S-rows (b', -a') followed by T's rows."""
    Sm, Tm = S.mf, T.mf
    ring = Tm.ring
    N = Tm.N
    rows: List[Row] = []
    fixed: Dict[int, int] = {}
    s_active = Sm.active
    p0 = popcount(Sm.fixed_mask) + Sm.z2_shift
    for i in s_active:
        f = popcount(Sm.fixed_mask & ((1 << i) - 1)) & 1
        sg = -1 if f else 1
        a = transfer(Sm.rows[i].a, ring) * sg
        b = transfer(Sm.rows[i].b, ring) * sg
        rows.append(Row(b, -a, 2 * N + 2 - Sm.rows[i].deg_b))
    r0 = len(rows)
    for j, r in enumerate(Tm.rows):
        rows.append(r)
    for j, s in Tm.fixed.items():
        fixed[j + r0] = s
    q0 = -Sm.gen_degree(Sm.fixed_mask)
    H = KoszulMF(ring, rows, N, ideal=Tm.ideal, fixed=fixed, q_shift=q0 + Tm.q_shift,
                 z2_shift=p0 + Tm.z2_shift, check=False)
    H.specialized = Tm.specialized

    def to_map(x: Elem) -> Dict[Tuple[Mono, int], Elem]:
        # element sum over (mu bits, T bits) -> phi(1_mu) components
        images: Dict[Tuple[Mono, int], Elem] = {}
        nS = len(s_active)
        for (E, _t), p in x.items():
            mu_bits = E & ((1 << nS) - 1)
            ET = E >> nS
            mu = Sm.fixed_mask
            for k, i in enumerate(s_active):
                if mu_bits >> k & 1:
                    mu |= 1 << i
            m = popcount(mu_bits)
            tpar = Tm.gen_parity(ET)
            sign = (tpar * m + m * (m + 1) // 2 + p0 * m) & 1
            key = (Sm.ring.zero_mono, mu)
            img = images.setdefault(key, {})
            img[(ET, 0)] = -p if sign else p
        return images

    return H, r0, to_map


def _hom_simple_target(Tp: LocalModel, S: LocalModel):
    """Hom(T', S) for S with trivial internal staircase: S-rows over the
    boundary ring tensored with the dual of T' as an explicit free module."""
    Sm = S.mf
    free = Tp.as_free()
    # move the dual into S's ring (boundary variables only)
    ring = Sm.ring
    dual = free.dual()
    dual = FreeMF(ring, dual.parity, dual.degree,
                  [{i: transfer(e, ring) for i, e in c.items()} for c in dual.D], dual.labels)
    H = KoszulMF(ring, Sm.rows, Sm.N, ideal=Sm.ideal, fixed=Sm.fixed, base=dual,
                 q_shift=Sm.q_shift, z2_shift=Sm.z2_shift, check=False)
    H.specialized = Sm.specialized
    basis = free.labels

    def to_map(x: Elem) -> Dict[Tuple[Mono, int], Elem]:
        images: Dict[Tuple[Mono, int], Elem] = {}
        for (E, t), p in x.items():
            alpha, F = basis[t]
            img = images.setdefault((alpha, F), {})
            img[(E, 0)] = img[(E, 0)] + p if (E, 0) in img else p
        return images

    return H, Sm.nrows, to_map


def hom_space(S: LocalModel, T: LocalModel, degree: int, parity: int = 0):
    """Chain maps S -> T of the given total degree modulo homotopy.

    Returns the list of LocalMap representatives (one per basis class).
    """
    if S.simple:
        H, nrows_S, to_map = _hom_simple_source(S, T)
        excl_rows = list(range(nrows_S))
        which = "a"   # quotient by b_S, which sits in the a-slot of the Hom rows
        s_rows = [i for i in excl_rows if i not in H.fixed]
    elif T.simple:
        H, nrows_S, to_map = _hom_simple_target(S, T)
        s_rows = [i for i in range(nrows_S) if i not in H.fixed]
        which = "b"
    else:
        raise UnsupportedGraph("Hom between two non-simple local models")
    red = Reduction(H)
    K = H
    for i in s_rows:
        ex = exclude(K, i, which)
        red.steps.append(ex)
        K = ex.after
    reps, piece = degree_homology(K, parity, degree)
    maps = []
    for z in reps:
        full = red.lift(z)
        if H.d(full):
            raise MFError("lifted Hom cycle is not closed")
        maps.append(LocalMap(S, T, to_map(full), degree))
    return maps


def hom_dimension(S: LocalModel, T: LocalModel, degree: int, parity: int = 0) -> int:
    return len(hom_space(S, T, degree, parity))


def hom_solve(S: LocalModel, T: LocalModel, degree: int, parity: int = 0) -> List["LocalMap"]:
    """Basis of chain maps S -> T in one (z2, total degree) modulo homotopy."""
    if S.mf.N != T.mf.N:
        raise ValueError("factorizations have different potentials")
    return hom_space(S, T, degree, parity)


def to_finite(M: KoszulMF) -> FiniteMF:
    """Explicit rational model; needs a finite-dimensional base ring."""
    return FiniteMF(M)


def unique_map(S: LocalModel, T: LocalModel, degree: int = 1) -> LocalMap:
    """The unique (up to scaling) degree-``degree`` map, normalized so its first
    nonzero coefficient (in basis order) is 1."""
    maps = hom_space(S, T, degree)
    if len(maps) != 1:
        raise UniquenessViolated(f"expected a 1-dimensional Hom space, found {len(maps)}")
    phi = maps[0]
    if not phi.check_chain_map():
        raise MFError("reconstructed morphism is not a chain map")
    return normalize_map(phi)


def normalize_map(phi: LocalMap) -> LocalMap:
    ring = phi.target.mf.ring
    for key in sorted(phi.images, key=lambda k: (k[1], phi.source.mf.ring.key(k[0]))):
        img = phi.images[key]
        for k2 in sorted(img):
            p = img[k2]
            if p:
                m, c = min(p.terms.items(), key=lambda kv: ring.key(kv[0]))
                inv = fmpq(1) / c
                images = {k: {kk: v * inv for kk, v in e.items()} for k, e in phi.images.items()}
                return LocalMap(phi.source, phi.target, images, phi.degree)
    return phi


# --------------------------------------------------------------------------
# Hom between finite rational models (linear algebra over Q)


def finite_hom_dimension(A: GradedVS, B: GradedVS, degree: int, parity: int = 0) -> int:
    """Graded Q-linear chain maps modulo homotopy between 2-periodic complexes
    equal maps between homologies; dimension = sum over gradings."""
    da, db = A.dims(), B.dims()
    total = 0
    for (p, g), n in da.items():
        total += n * db.get(((p + parity) % 2, g + degree), 0)
    return total
