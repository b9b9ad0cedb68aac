"""MOY graphs: data types, validation, markings, matrix factorizations,
graph homology, the decategorified rewriting engine and rotation numbers."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

from flint import fmpq

from .matfact import GradedVS, KoszulMF, Row, homology
from .polyring import MPoly, RingSpec
from .qpoly import LaurentPoly, Poincare
from .symfunc import Alphabet, BParams, elem, make_ring, potential_of_values


class GraphError(ValueError):
    reason = "invalid-graph"


@dataclass(frozen=True)
class Edge:
    tail: str
    head: str
    color: int


@dataclass
class MoyGraph:
    """Oriented colored graph.  A closed circle is an edge from a vertex to
    itself.  ``endpoints`` are valence-1 boundary vertices."""

    vertices: List[str]
    edges: List[Edge]
    endpoints: set = field(default_factory=set)
    cyclic_order: Dict[str, List[int]] = field(default_factory=dict)

    def in_edges(self, v: str) -> List[int]:
        return [i for i, e in enumerate(self.edges) if e.head == v]

    def out_edges(self, v: str) -> List[int]:
        return [i for i, e in enumerate(self.edges) if e.tail == v]

    @property
    def closed(self) -> bool:
        return not self.endpoints

    def copy(self) -> "MoyGraph":
        return MoyGraph(list(self.vertices), list(self.edges), set(self.endpoints),
                        {k: list(v) for k, v in self.cyclic_order.items()})

    # JSON -------------------------------------------------------------------
    def to_json(self) -> dict:
        out = {"format": 1, "vertices": list(self.vertices),
               "edges": [{"tail": e.tail, "head": e.head, "color": e.color} for e in self.edges]}
        if self.endpoints:
            out["endpoints"] = sorted(self.endpoints)
        if self.cyclic_order:
            out["cyclic_order"] = {k: list(v) for k, v in sorted(self.cyclic_order.items())}
        return out

    @classmethod
    def from_json(cls, data: dict) -> "MoyGraph":
        allowed = {"format", "vertices", "edges", "endpoints", "cyclic_order"}
        extra = set(data) - allowed
        if extra:
            raise GraphError(f"unknown fields: {sorted(extra)}")
        if data.get("format") != 1:
            raise GraphError("unsupported or missing format version")
        verts = [str(v) for v in data["vertices"]]
        edges = []
        for e in data["edges"]:
            if set(e) - {"tail", "head", "color"}:
                raise GraphError(f"unknown edge fields: {sorted(set(e) - {'tail', 'head', 'color'})}")
            c = int(e["color"])
            if c < 0:
                raise GraphError("negative color")
            if c == 0:
                continue
            edges.append(Edge(str(e["tail"]), str(e["head"]), c))
        g = cls(verts, edges, set(map(str, data.get("endpoints", []))),
                {str(k): [int(x) for x in v] for k, v in data.get("cyclic_order", {}).items()})
        for e in g.edges:
            if e.tail not in verts or e.head not in verts:
                raise GraphError("edge refers to an unknown vertex")
        return g


def circle(m: int) -> MoyGraph:
    return MoyGraph(["v"], [Edge("v", "v", m)])


def disjoint_union(*graphs: MoyGraph) -> MoyGraph:
    verts, edges, ends = [], [], set()
    for k, g in enumerate(graphs):
        ren = {v: f"g{k}.{v}" for v in g.vertices}
        verts += [ren[v] for v in g.vertices]
        edges += [Edge(ren[e.tail], ren[e.head], e.color) for e in g.edges]
        ends |= {ren[v] for v in g.endpoints}
    return MoyGraph(verts, edges, ends)


def theta(m: int, n: int) -> MoyGraph:
    """Merge of colors m and n into m+n followed by a split back (a digon on
    top of an (m+n)-colored edge, closed up)."""
    return MoyGraph(["s", "t"], [Edge("s", "t", m), Edge("s", "t", n), Edge("t", "s", m + n)])


# --------------------------------------------------------------------------
# validation and markings


def validate(G: MoyGraph, N: int) -> Tuple[str, str]:
    """('ok'|'zero'|'invalid', reason)."""
    for e in G.edges:
        if e.color < 1:
            return "invalid", "edge color must be at least 1"
    zero = False
    for v in G.vertices:
        ins, outs = G.in_edges(v), G.out_edges(v)
        if v in G.endpoints:
            if len(ins) + len(outs) != 1:
                return "invalid", f"endpoint {v} must have valence 1"
            continue
        if not ins and not outs:
            continue
        cin = sum(G.edges[i].color for i in ins)
        cout = sum(G.edges[i].color for i in outs)
        if cin != cout:
            return "invalid", f"flow not conserved at {v}"
        if cin > N:
            zero = True
    for e in G.edges:
        if e.color > N:
            zero = True
    if zero:
        return "zero", "a vertex has width greater than N"
    return "ok", ""


@dataclass
class Marking:
    """Number of marked points per edge (at least one)."""

    points: Dict[int, int]

    def alphabets(self, G: MoyGraph) -> List[List[Alphabet]]:
        out = []
        for i, e in enumerate(G.edges):
            k = self.points.get(i, 1)
            if k < 1:
                raise GraphError("every edge needs a marked point")
            out.append([Alphabet(f"E{i}p{j}_", e.color) for j in range(k)])
        return out


def default_marking(G: MoyGraph) -> Marking:
    return Marking({i: 1 for i in range(len(G.edges))})


# --------------------------------------------------------------------------
# vertex factorizations


@lru_cache(maxsize=None)
def _formal_vertex(c: int, N: int, B: BParams):
    """Difference quotients U_j in formal variables z (exits) and w (entrances)."""
    names = [f"z{k}" for k in range(1, c + 1)] + [f"w{k}" for k in range(1, c + 1)]
    degs = [2 * k for k in range(1, c + 1)] * 2
    qdegs = list(degs)
    if B.is_symbolic:
        names += [f"B{k}" for k in range(1, N + 1)]
        degs += [2 * k for k in range(1, N + 1)]
        qdegs += [0] * N
    ring = RingSpec(names, degs, qdegs)
    z = [ring.var(f"z{k}") for k in range(1, c + 1)]
    w = [ring.var(f"w{k}") for k in range(1, c + 1)]
    U = []
    for j in range(c):
        vals = w[:j] + z[j:]
        P = potential_of_values(vals, B, N, ring)
        # divided difference in z_j -> w_j (w_j does not occur in P)
        zi, wi = ring.index[f"z{j + 1}"], ring.index[f"w{j + 1}"]
        out: Dict[tuple, fmpq] = {}
        for m, coef in P.terms.items():
            k = m[zi]
            for i in range(k):
                mm = list(m)
                mm[zi] = i
                mm[wi] = k - 1 - i
                t = tuple(mm)
                out[t] = out.get(t, fmpq(0)) + coef
        U.append(MPoly(ring, {m: v for m, v in out.items() if v}))
    F_z = potential_of_values(z, B, N, ring)
    F_w = potential_of_values(w, B, N, ring)
    check = F_z - F_w
    for j in range(c):
        check = check - U[j] * (z[j] - w[j])
    if check:
        raise RuntimeError("difference quotients do not telescope")
    return ring, U


def vertex_rows(exits: Sequence[Alphabet], entrances: Sequence[Alphabet], N: int,
                B: BParams, ring: RingSpec) -> List[Row]:
    c = sum(a.size for a in exits)
    if c != sum(a.size for a in entrances):
        raise GraphError("flow not conserved")
    fring, U = _formal_vertex(c, N, B)
    images = {}
    for k in range(1, c + 1):
        images[fring.index[f"z{k}"]] = elem(k, list(exits), ring)
        images[fring.index[f"w{k}"]] = elem(k, list(entrances), ring)
    index_map = []
    for n in fring.names:
        if n.startswith("B"):
            index_map.append(ring.index[n])
        else:
            index_map.append(-1)
    rows = []
    for j in range(1, c + 1):
        a = U[j - 1].map_to(ring, index_map, images)
        b = elem(j, list(exits), ring) - elem(j, list(entrances), ring)
        rows.append(Row(a, b, 2 * j))
    return rows


def vertex_shift(exit_colors: Sequence[int]) -> int:
    s = 0
    for i in range(len(exit_colors)):
        for j in range(i + 1, len(exit_colors)):
            s += exit_colors[i] * exit_colors[j]
    return -s


def build_mf(G: MoyGraph, N: int, B: BParams, marking: Optional[Marking] = None,
             extra_vars: Sequence[Tuple[str, int, int]] = ()) -> KoszulMF:
    """C_f(G): tensor product of the vertex factorizations (and of the arc
    factorizations between consecutive marked points of one edge)."""
    status, why = validate(G, N)
    if status == "invalid":
        raise GraphError(why)
    mk = marking or default_marking(G)
    alph = mk.alphabets(G)
    flat = [a for lst in alph for a in lst]
    ring = make_ring(flat, B, extra_blocks=False)
    rows: List[Row] = []
    shift = 0
    pot = ring.zero()

    def f_of(alphas):
        vals = [elem(k, list(alphas), ring) for k in range(1, sum(a.size for a in alphas) + 1)]
        return potential_of_values(vals, B, N, ring)

    # marked points inside an edge: arc factorizations between consecutive alphabets
    for lst in alph:
        for j in range(len(lst) - 1):
            # segment j runs from point j to point j+1 (orientation along the edge)
            rows += vertex_rows([lst[j + 1]], [lst[j]], N, B, ring)
            pot = pot + f_of([lst[j + 1]]) - f_of([lst[j]])
    for v in G.vertices:
        if v in G.endpoints:
            continue
        ins, outs = G.in_edges(v), G.out_edges(v)
        if not ins and not outs:
            continue
        exits = [alph[i][0] for i in outs]
        entrances = [alph[i][-1] for i in ins]
        rows += vertex_rows(exits, entrances, N, B, ring)
        shift += vertex_shift([G.edges[i].color for i in outs])
        pot = pot + f_of(exits) - f_of(entrances)
    M = KoszulMF(ring, rows, N, q_shift=shift, potential=pot)
    if status == "zero":
        M.width_zero = True
    return M


# --------------------------------------------------------------------------
# homology of closed graphs


def graded_dimension(H: GradedVS) -> Tuple[LaurentPoly, set]:
    out: Dict[int, int] = {}
    z2 = set()
    for (p, g), n in H.dims().items():
        out[g] = out.get(g, 0) + n
        z2.add(p)
    return LaurentPoly(out), z2


def graph_homology(G: MoyGraph, N: int, B: Optional[BParams] = None,
                   marking: Optional[Marking] = None) -> GradedVS:
    if not G.closed:
        raise GraphError("graph homology needs a closed graph")
    B = B or BParams.zero(N)
    if B.is_symbolic:
        raise ValueError("specialize the deformation parameters first")
    status, why = validate(G, N)
    if status == "invalid":
        raise GraphError(why)
    M = build_mf(G, N, B, marking)
    H, _ = homology(M, graded=B.is_zero)
    return H


def graph_poincare(G: MoyGraph, N: int) -> Poincare:
    H = graph_homology(G, N)
    return Poincare({(g, 0, p): n for (p, g), n in H.dims().items()})


# --------------------------------------------------------------------------
# decategorified rewriting


class RewritingStuck(RuntimeError):
    reason = "rewriting-stuck"


class _Work:
    """Mutable edge table used by the rewriting engine."""

    def __init__(self, G: MoyGraph):
        self.edges: Dict[int, List] = {}
        self.next_id = 0
        self.next_v = 0
        for e in G.edges:
            self.add(e.tail, e.head, e.color)

    def add(self, tail, head, color) -> int:
        i = self.next_id
        self.next_id += 1
        self.edges[i] = [tail, head, color]
        return i

    def fresh(self) -> str:
        self.next_v += 1
        return f"_r{self.next_v}"

    def ins(self, v) -> List[int]:
        return [i for i, (t, h, c) in self.edges.items() if h == v]

    def outs(self, v) -> List[int]:
        return [i for i, (t, h, c) in self.edges.items() if t == v]

    def vertices(self) -> List:
        seen = {}
        for t, h, _ in self.edges.values():
            seen.setdefault(t, None)
            seen.setdefault(h, None)
        return list(seen)

    def copy(self) -> "_Work":
        w = _Work.__new__(_Work)
        w.edges = {i: list(e) for i, e in self.edges.items()}
        w.next_id, w.next_v = self.next_id, self.next_v
        return w

    def reversed(self) -> "_Work":
        w = self.copy()
        for e in w.edges.values():
            e[0], e[1] = e[1], e[0]
        return w

    def to_graph(self) -> MoyGraph:
        verts = self.vertices()
        return MoyGraph(verts, [Edge(t, h, c) for t, h, c in self.edges.values()])

    def key(self):
        """Cheap isomorphism-invariant-ish summary used for memoisation."""
        return tuple(sorted((str(t), str(h), c) for t, h, c in self.edges.values()))


def _qbin(n: int, m: int) -> LaurentPoly:
    from .qpoly import qbinom
    return qbinom(n, m)


def _qint(n: int) -> LaurentPoly:
    from .qpoly import qint
    return qint(n) if n >= 0 else LaurentPoly({})


def _simplify(w: _Work, N: int) -> Tuple[LaurentPoly, bool]:
    """Apply the scalar rules (width cap, circles, bivalent vertices, parallel
    edges, loops) until none fires.  Returns (factor, changed); a zero factor
    means the graph vanishes."""
    factor = LaurentPoly({0: 1})
    changed = False
    progress = True
    while progress:
        progress = False
        for i, (t, h, c) in list(w.edges.items()):
            if c > N:
                return LaurentPoly({}), True
        for v in w.vertices():
            ins, outs = w.ins(v), w.outs(v)
            width = sum(w.edges[i][2] for i in ins)
            if width > N:
                return LaurentPoly({}), True
            # circle: a single loop
            if len(ins) == 1 and len(outs) == 1 and ins[0] == outs[0]:
                factor = factor * _qbin(N, w.edges[ins[0]][2])
                del w.edges[ins[0]]
                progress = changed = True
                break
            # bivalent vertex: join the two edges
            if len(ins) == 1 and len(outs) == 1:
                a, b = ins[0], outs[0]
                w.edges[a][1] = w.edges[b][1]
                del w.edges[b]
                progress = changed = True
                break
            # loop at a larger vertex (loop removal after expansion)
            loops = [i for i in ins if w.edges[i][0] == v]
            if loops:
                c = w.edges[loops[0]][2]
                factor = factor * _qbin(N - (width - c), c)
                del w.edges[loops[0]]
                progress = changed = True
                break
            # parallel edges to one neighbour (digon removal after expansion)
            by_head: Dict = {}
            for i in outs:
                by_head.setdefault(w.edges[i][1], []).append(i)
            par = next((lst for hd, lst in by_head.items() if len(lst) > 1 and hd != v), None)
            if par:
                cols = [w.edges[i][2] for i in par]
                total = 0
                for c in cols:
                    factor = factor * _qbin(total + c, c)
                    total += c
                hd = w.edges[par[0]][1]
                for i in par:
                    del w.edges[i]
                w.add(v, hd, total)
                progress = changed = True
                break
        if factor.is_zero():
            return factor, True
    return factor, changed


def _contract_enabling(w: _Work) -> bool:
    """Contract one edge whose contraction creates a loop or parallel edges."""
    for i, (t, h, c) in list(w.edges.items()):
        if t == h:
            continue
        if not (len(w.outs(t)) == 1 or len(w.ins(h)) == 1):
            continue
        nbrs_t = {w.edges[j][1] for j in w.outs(t) if j != i} | {w.edges[j][0] for j in w.ins(t)}
        nbrs_h = {w.edges[j][1] for j in w.outs(h)} | {w.edges[j][0] for j in w.ins(h) if j != i}
        # after merging, an edge between t and h other than i becomes a loop;
        # shared neighbours may give parallel edges
        direct = any(j != i and {w.edges[j][0], w.edges[j][1]} == {t, h} for j in w.edges)
        shared_out = {w.edges[j][1] for j in w.outs(t) if j != i} & {w.edges[j][1] for j in w.outs(h)}
        shared_in = {w.edges[j][0] for j in w.ins(t)} & {w.edges[j][0] for j in w.ins(h) if j != i}
        if direct or shared_out - {t, h} or shared_in - {t, h}:
            del w.edges[i]
            for e in w.edges.values():
                if e[0] == h:
                    e[0] = t
                if e[1] == h:
                    e[1] = t
            return True
    return False


def _square_III(w: _Work, N: int):
    """Match a square with 1-colored rungs; return [(factor, graph)] or None."""
    for p1 in w.vertices():
        ins1, outs1 = w.ins(p1), w.outs(p1)
        if len(ins1) != 2 or len(outs1) != 1:
            continue
        e12 = outs1[0]
        p2 = w.edges[e12][1]
        m = w.edges[e12][2] - 1
        if m < 1 or p2 == p1:
            continue
        ins2, outs2 = w.ins(p2), w.outs(p2)
        if len(ins2) != 1 or len(outs2) != 2:
            continue
        for e23 in outs2:
            if w.edges[e23][2] != 1:
                continue
            e2x = next(j for j in outs2 if j != e23)
            if w.edges[e2x][2] != m:
                continue
            p3 = w.edges[e23][1]
            ins3, outs3 = w.ins(p3), w.outs(p3)
            if len(ins3) != 2 or len(outs3) != 1 or p3 in (p1, p2):
                continue
            e34 = outs3[0]
            e3x = next(j for j in ins3 if j != e23)
            if w.edges[e34][2] != m + 1 or w.edges[e3x][2] != m:
                continue
            p4 = w.edges[e34][1]
            ins4, outs4 = w.ins(p4), w.outs(p4)
            if len(ins4) != 1 or len(outs4) != 2 or p4 in (p1, p2, p3):
                continue
            e41 = next((j for j in outs4 if w.edges[j][1] == p1 and w.edges[j][2] == m), None)
            if e41 is None:
                continue
            e4x = next(j for j in outs4 if j != e41)
            e1x = next((j for j in ins1 if j != e41), None)
            if e1x is None or w.edges[e4x][2] != 1 or w.edges[e1x][2] != 1:
                continue
            internal = {e12, e23, e34, e41}
            if {e1x, e2x, e3x, e4x} & internal:
                continue
            # term 1: the 1-strand runs straight through, as does the m-strand
            g1 = w.copy()
            for j in internal:
                del g1.edges[j]
            a, b = g1.fresh(), g1.fresh()
            g1.edges[e1x][1] = a
            g1.edges[e4x][0] = a
            g1.edges[e3x][1] = b
            g1.edges[e2x][0] = b
            # term 2: two vertices joined by an (m-1)-edge
            g2 = w.copy()
            for j in internal:
                del g2.edges[j]
            v1, v2 = g2.fresh(), g2.fresh()
            g2.edges[e1x][1] = v1
            g2.edges[e2x][0] = v1
            g2.edges[e3x][1] = v2
            g2.edges[e4x][0] = v2
            if m - 1 > 0:
                g2.add(v2, v1, m - 1)
            return [(LaurentPoly({0: 1}), g1), (_qint(N - m - 1), g2)]
    return None


def _square_IV(w: _Work, N: int):
    """Match a general square with a 1-colored lower-left input."""
    for bl in w.vertices():
        insb, outsb = w.ins(bl), w.outs(bl)
        if len(insb) != 2 or len(outsb) != 1:
            continue
        e_bt = outsb[0]
        tl = w.edges[e_bt][1]
        ins_t, outs_t = w.ins(tl), w.outs(tl)
        if len(ins_t) != 1 or len(outs_t) != 2 or tl == bl:
            continue
        for e_in1 in insb:
            if w.edges[e_in1][2] != 1:
                continue
            e_rb = next(j for j in insb if j != e_in1)
            br = w.edges[e_rb][0]
            if br in (bl, tl):
                continue
            ins_r, outs_r = w.ins(br), w.outs(br)
            if len(ins_r) != 1 or len(outs_r) != 2:
                continue
            e_rt = next(j for j in outs_r if j != e_rb)
            tr = w.edges[e_rt][1]
            if tr in (bl, tl, br):
                continue
            ins_tr, outs_tr = w.ins(tr), w.outs(tr)
            if len(ins_tr) != 2 or len(outs_tr) != 1:
                continue
            for e_tt in outs_t:
                if w.edges[e_tt][1] != tr:
                    continue
                if e_tt not in ins_tr:
                    continue
                e_out_l = next(j for j in outs_t if j != e_tt)
                e_out_r = outs_tr[0]
                e_in_r = ins_r[0]
                n = w.edges[e_tt][2]
                l = w.edges[e_out_l][2]
                m = w.edges[e_out_r][2]
                if w.edges[e_bt][2] != l + n or w.edges[e_rb][2] != l + n - 1 or \
                        w.edges[e_rt][2] != m - n or w.edges[e_in_r][2] != m + l - 1:
                    continue
                if not (0 <= n <= m <= N and l >= 0 and m + l - 1 <= N):
                    continue
                internal = {e_bt, e_tt, e_rt, e_rb}
                if {e_in1, e_in_r, e_out_l, e_out_r} & internal:
                    continue
                out = []
                g1 = w.copy()
                for j in internal:
                    del g1.edges[j]
                vl, vr = g1.fresh(), g1.fresh()
                g1.edges[e_in1][1] = vl
                g1.edges[e_out_l][0] = vl
                g1.edges[e_in_r][1] = vr
                g1.edges[e_out_r][0] = vr
                if l - 1 > 0:
                    g1.add(vr, vl, l - 1)
                out.append((_qbin(m - 1, n), g1))
                g2 = w.copy()
                for j in internal:
                    del g2.edges[j]
                lo, hi = g2.fresh(), g2.fresh()
                g2.edges[e_in1][1] = lo
                g2.edges[e_in_r][1] = lo
                g2.edges[e_out_l][0] = hi
                g2.edges[e_out_r][0] = hi
                g2.add(lo, hi, m + l)
                out.append((_qbin(m - 1, n - 1), g2))
                return out
    return None


@dataclass
class MoyResult:
    poly: LaurentPoly
    steps: int
    fallbacks: int


def moy_poly_detailed(G: MoyGraph, N: int, budget: int = 10_000,
                      fallback: bool = True) -> MoyResult:
    if not G.closed:
        raise GraphError("moy_poly needs a closed graph")
    status, why = validate(G, N)
    if status == "invalid":
        raise GraphError(why)
    counter = {"steps": 0, "fallbacks": 0}
    memo: Dict = {}

    def evaluate(w: _Work) -> LaurentPoly:
        counter["steps"] += 1
        if counter["steps"] > budget:
            raise RewritingStuck("rewriting step budget exhausted")
        factor, _ = _simplify(w, N)
        if factor.is_zero():
            return factor
        if not w.edges:
            return factor
        k = w.key()
        if k in memo:
            return factor * memo[k]
        while _contract_enabling(w):
            f2, _ = _simplify(w, N)
            factor = factor * f2
            if factor.is_zero() or not w.edges:
                return factor
        for wv, rev in ((w, False), (w.reversed(), True)):
            for rule in (_square_III, _square_IV):
                terms = rule(wv, N)
                if terms is None:
                    continue
                total = LaurentPoly({})
                for coef, g in terms:
                    if coef.is_zero():
                        continue
                    total = total + coef * evaluate(g.reversed() if rev else g)
                memo[k] = total
                return factor * total
        if not fallback:
            raise RewritingStuck("no rewriting rule applies")
        counter["fallbacks"] += 1
        dims, _ = graded_dimension(graph_homology(w.to_graph(), N))
        memo[k] = dims
        return factor * dims

    w = _Work(G)
    if status == "zero":
        return MoyResult(LaurentPoly({}), 0, 0)
    poly = evaluate(w)
    return MoyResult(poly, counter["steps"], counter["fallbacks"])


def moy_poly(G: MoyGraph, N: int, budget: int = 10_000, fallback: bool = True) -> LaurentPoly:
    """Graded dimension of H(G) at b = 0 by local graph rewriting."""
    return moy_poly_detailed(G, N, budget, fallback).poly


# --------------------------------------------------------------------------
# rotation numbers


def _ordered_sides(G: MoyGraph, v: str) -> Tuple[List[int], List[int]]:
    """Incoming and outgoing edges at v, each listed left to right."""
    ins, outs = G.in_edges(v), G.out_edges(v)
    cyc = G.cyclic_order.get(v)
    if not cyc:
        return ins, outs
    # counterclockwise: outgoing right to left, then incoming left to right
    n = len(cyc)
    is_out = []
    seen_out = set()
    for i in cyc:
        e = G.edges[i]
        if e.tail == v and e.head == v:
            flag = i in seen_out
            seen_out.add(i)
            is_out.append(not flag)
        else:
            is_out.append(e.tail == v)
    for s in range(n):
        rot = [is_out[(s + k) % n] for k in range(n)]
        k = 0
        while k < n and rot[k]:
            k += 1
        if all(not x for x in rot[k:]):
            order = [cyc[(s + j) % n] for j in range(n)]
            return order[k:], list(reversed(order[:k]))
    raise GraphError(f"cyclic order at {v} does not separate incoming from outgoing edges")


def cable_circles(G: MoyGraph) -> int:
    """Number of circles after replacing every c-colored edge by c parallel
    1-colored strands, matched in left-to-right order at each vertex."""
    nxt: Dict[Tuple[int, int], Tuple[int, int]] = {}
    for v in G.vertices:
        if v in G.endpoints:
            continue
        ins, outs = _ordered_sides(G, v)
        src = [(i, s) for i in ins for s in range(G.edges[i].color)]
        dst = [(i, s) for i in outs for s in range(G.edges[i].color)]
        for a, b in zip(src, dst):
            nxt[a] = b
    seen = set()
    count = 0
    for start in nxt:
        if start in seen:
            continue
        count += 1
        s = start
        while s not in seen:
            seen.add(s)
            s = nxt[s]
    return count


def colored_rotation(G: MoyGraph) -> int:
    """Total rotation number of the cabling mod 2.  Cable circles are disjoint
    simple closed curves, so each contributes +-1."""
    if not G.closed:
        raise GraphError("rotation numbers need a closed graph")
    return cable_circles(G) % 2
