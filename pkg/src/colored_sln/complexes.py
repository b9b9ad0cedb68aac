"""Crossing complexes, link diagrams, the resolution hypercube, Gaussian
elimination, link homology and its deformations."""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple, Union

from flint import fmpq

from .linalg import Echelon, Vec, nullspace, vec_add, vec_scale
from .matfact import (DegreewiseVS, Elem, Exclusion, GradedVS, KoszulMF, LocalMap, LocalModel, MFError,
                      Reduction, Row, UnsupportedGraph, exclude, hom_space, popcount,
                      reduce_to_finite, FiniteMF, transfer, unique_map)
from .moy import Edge, GraphError, MoyGraph, vertex_rows, vertex_shift
from .polyring import GroebnerIdeal, MPoly, Mono, RingSpec
from .qpoly import LaurentPoly, Poincare, qbinom
from .symfunc import Alphabet, BParams, elem, potential_of_values, roots_to_b

BOUNDARY = ("A", "D", "X", "Y")
# graded vertices fall back to degreewise homology past this many exclusions
EXCLUSION_BUDGET = 200


# --------------------------------------------------------------------------
# resolutions of one crossing


def resolution_range(m: int, n: int) -> List[int]:
    return list(range(max(0, m - n), m + 1))


def resolution_graph(m: int, n: int, k: int) -> MoyGraph:
    """The square-shaped resolution with internal edges K (k), L (n+k),
    T (n+k-m), R (m-k).  Boundary: A (n) and D (m) enter at the bottom left
    and right; X (m) and Y (n) leave at the top left and right."""
    cols = {"K": k, "L": n + k, "T": n + k - m, "R": m - k}
    edges = [Edge("a", "BL", n), Edge("d", "BR", m), Edge("TL", "x", m), Edge("TR", "y", n)]
    ends = {"K": ("BR", "BL"), "L": ("BL", "TL"), "T": ("TL", "TR"), "R": ("BR", "TR")}
    for name in ("K", "L", "T", "R"):
        if cols[name]:
            t, h = ends[name]
            edges.append(Edge(t, h, cols[name]))
    return MoyGraph(["a", "d", "x", "y", "BL", "BR", "TL", "TR"], edges, {"a", "d", "x", "y"})


def crossing_resolutions(sign: int, m: int, n: int, N: int):
    """[(graph, q-shift, homological degree, k)] of one crossing's complex
    (before the equal-color normalization)."""
    if not (1 <= m <= N and 1 <= n <= N):
        raise ValueError("crossing colors must lie in 1..N")
    out = []
    for k in resolution_range(m, n):
        if sign > 0:
            out.append((resolution_graph(m, n, k), -(m - k), m - k, k))
        else:
            out.append((resolution_graph(m, n, k), m - k, k - m, k))
    return out


def normalization(sign: int, m: int, n: int, N: int) -> Tuple[int, int, int]:
    """(q, homological, z2) shift applied to an equal-color crossing."""
    if m != n:
        return 0, 0, 0
    if sign > 0:
        return m * (N + 1 - m), -m, m % 2
    return -m * (N + 1 - m), m, m % 2


@dataclass
class LocalResolution:
    """One resolution of a crossing as a local model free over the boundary."""

    m: int
    n: int
    k: int
    N: int
    model: Optional[LocalModel]   # None when the resolution is contractible
    boundary: Dict[str, Alphabet]
    surviving: List[str]          # internal variable names left in the quotient

    @property
    def zero(self) -> bool:
        return self.model is None


def _entry_is_internal_linear(p: MPoly, internal: set) -> bool:
    if not p:
        return False
    m, c = p.lead()
    nz = [i for i, e in enumerate(m) if e]
    return len(nz) == 1 and m[nz[0]] == 1 and nz[0] in internal


def _entry_lead_internal(p: MPoly, internal: set) -> bool:
    if not p or p.is_constant():
        return False
    m, _ = p.lead()
    return all(i in internal for i, e in enumerate(m) if e)


# vertices of the crossing square as (exits, entrances) by edge name
CROSSING_SQUARE = ((("K", "R"), ("D",)), (("L",), ("A", "K")),
                   (("X", "T"), ("L",)), (("Y",), ("R", "T")))


@lru_cache(maxsize=None)
def local_resolution(m: int, n: int, k: int, N: int, B: BParams) -> LocalResolution:
    cols = (("K", k), ("L", n + k), ("T", n + k - m), ("R", m - k))
    lr = local_square((("A", n), ("D", m), ("X", m), ("Y", n)), cols, CROSSING_SQUARE, N, B)
    return LocalResolution(m, n, k, N, lr.model, lr.boundary, lr.surviving)


@lru_cache(maxsize=None)
def local_square(boundary: Tuple[Tuple[str, int], ...], internal_colors: Tuple[Tuple[str, int], ...],
                 vertices, N: int, B: BParams) -> LocalResolution:
    """Local model of a four-ended square graph, free over the boundary.

    ``boundary`` gives the colors of A, D, X, Y (A, D enter; X, Y leave);
    internal edges of color 0 are absent.  Vertices list (exits, entrances).
    """
    bcol = dict(boundary)
    m, n = bcol["D"], bcol["A"]
    k = dict(internal_colors).get("K", 0)
    bd = {x: Alphabet(x, bcol[x]) for x in BOUNDARY}
    cols = dict(internal_colors)
    widths = [sum(bcol.get(e, cols.get(e, 0)) for e in ex) for ex, _ in vertices]
    if any(c > N for c in list(cols.values()) + list(bcol.values()) + widths):
        return LocalResolution(m, n, k, N, None, bd, [])
    internal = {name: Alphabet(name, c) for name, c in cols.items() if c}
    names, degs, qdegs, blocks = [], [], [], []
    for group in (list(internal.values()), [bd[x] for x in BOUNDARY]):
        cnt = 0
        for a in group:
            for j in range(1, a.size + 1):
                names.append(f"{a.name}{j}")
                degs.append(2 * j)
                qdegs.append(2 * j)
                cnt += 1
        if cnt:
            blocks.append(cnt)
    if B.is_symbolic:
        names += B.var_names()
        degs += [2 * j for j in range(1, N + 1)]
        qdegs += [0] * N
        blocks.append(N)
    ring = RingSpec(names, degs, qdegs, blocks)
    A, D, X, Y = (bd[x] for x in BOUNDARY)
    named = dict(bd, **internal)
    rows: List[Row] = []
    shift = 0
    for ex_names, en_names in vertices:
        exits = [named[e] for e in ex_names if e in named]
        entrances = [named[e] for e in en_names if e in named]
        rows += vertex_rows(exits, entrances, N, B, ring)
        shift += vertex_shift([a.size for a in exits])

    def f_of(a):
        return potential_of_values([elem(j, [a], ring) for j in range(1, a.size + 1)], B, N, ring)

    pot = f_of(X) + f_of(Y) - f_of(A) - f_of(D)
    M = KoszulMF(ring, rows, N, q_shift=shift, potential=pot)
    int_names = [nm for a in internal.values() for nm in a.var_names()]
    int_idx = {ring.index[nm] for nm in int_names}
    M = M.with_changes(ideal=GroebnerIdeal(ring, []), reduce_entries=False)
    # linear eliminations of internal variables
    progress = True
    while progress:
        progress = False
        for i in M.active:
            for which in ("b", "a"):
                s = M.rows[i].b if which == "b" else M.rows[i].a
                if _entry_is_internal_linear(s, int_idx):
                    M = exclude(M, i, which).after
                    progress = True
                    break
            if progress:
                break
    # nonlinear entries with internal leading terms until the quotient is finite
    def finite(Mx: KoszulMF) -> bool:
        pure = {i: False for i in int_idx}
        for lm in Mx.ideal.leading_monomials():
            nzs = [i for i, e in enumerate(lm) if e]
            if len(nzs) == 1 and nzs[0] in pure:
                pure[nzs[0]] = True
        return all(pure.values())

    guard = 0
    while not finite(M):
        guard += 1
        if guard > 20:
            raise UnsupportedGraph("local model: internal variables cannot be eliminated")
        dim0 = M.ideal.krull_dimension()
        cands = []
        for i in M.active:
            for which in ("b", "a"):
                s = M.rows[i].b if which == "b" else M.rows[i].a
                if _entry_lead_internal(s, int_idx):
                    cands.append((s.degree(), 0 if which == "b" else 1, i, which))
        cands.sort()
        for _, _, i, which in cands:
            ex = exclude(M, i, which)
            if ex.after.is_zero:
                return LocalResolution(m, n, k, N, None, bd, [])
            if ex.after.ideal.krull_dimension() == dim0 - 1:
                M = ex.after
                break
        else:
            raise UnsupportedGraph("local model: no regular internal entry")
    eliminated = set()
    for g in M.ideal.polys():
        lm, _ = g.lead()
        nzs = [i for i, e in enumerate(lm) if e]
        if len(nzs) == 1 and lm[nzs[0]] == 1 and nzs[0] in int_idx:
            eliminated.add(ring.names[nzs[0]])
    surviving = [nm for nm in int_names if nm not in eliminated]
    model = LocalModel(M, int_names, [nm for x in BOUNDARY for nm in bd[x].var_names()])
    return LocalResolution(m, n, k, N, model, bd, surviving)


def _next_k(sign: int, k: int) -> int:
    return k - 1 if sign > 0 else k + 1


@lru_cache(maxsize=None)
def crossing_map(sign: int, m: int, n: int, k: int, N: int, B: BParams) -> Optional[LocalMap]:
    """The normalized degree-1 differential out of resolution k (None if zero)."""
    rng = resolution_range(m, n)
    if k not in rng or _next_k(sign, k) not in rng:
        return None
    src = local_resolution(m, n, k, N, B)
    tgt = local_resolution(m, n, _next_k(sign, k), N, B)
    if src.zero or tgt.zero:
        return None
    return unique_map(src.model, tgt.model, 1)


def reconstruct_differential(sign: int, m: int, n: int, k: int, N: int,
                             B: Optional[BParams] = None) -> Optional[LocalMap]:
    return crossing_map(sign, m, n, k, N, B or BParams.zero(N))


def hom_dimension_between(m: int, n: int, k_from: int, k_to: int, N: int,
                          degree: int = 1, B: Optional[BParams] = None) -> int:
    B = B or BParams.zero(N)
    src = local_resolution(m, n, k_from, N, B)
    tgt = local_resolution(m, n, k_to, N, B)
    if src.zero or tgt.zero:
        return 0
    return len(hom_space(src.model, tgt.model, degree))


# --------------------------------------------------------------------------
# link diagrams


class DiagramError(ValueError):
    reason = "invalid-graph"


@dataclass
class Crossing:
    """Both strands point upward; A = left_in, D = right_in, X = left_out,
    Y = right_out.  The strand A -> Y has color n, the strand D -> X color m."""

    sign: int
    left_in: str
    right_in: str
    left_out: str
    right_out: str


@dataclass
class ForkVertex:
    """A trivalent (or wider) MOY vertex joining arcs of a knotted graph."""

    entrances: Tuple[str, ...]
    exits: Tuple[str, ...]


@dataclass
class LinkDiagram:
    arcs: Dict[str, int]
    crossings: List[Crossing]
    vertices: List[ForkVertex] = field(default_factory=list)

    def __post_init__(self):
        self.validate()

    def validate(self):
        ins: Dict[str, int] = {}
        outs: Dict[str, int] = {}
        for v in self.vertices:
            if not v.entrances or not v.exits:
                raise DiagramError("a vertex needs entering and leaving arcs")
            for a in v.entrances + v.exits:
                if a not in self.arcs:
                    raise DiagramError(f"unknown arc {a}")
            for a in v.entrances:
                ins[a] = ins.get(a, 0) + 1
            for a in v.exits:
                outs[a] = outs.get(a, 0) + 1
            if sum(self.arcs[a] for a in v.entrances) != sum(self.arcs[a] for a in v.exits):
                raise DiagramError("flow not conserved at a vertex")
        for c in self.crossings:
            if c.sign not in (1, -1):
                raise DiagramError("crossing sign must be +1 or -1")
            for a in (c.left_in, c.right_in, c.left_out, c.right_out):
                if a not in self.arcs:
                    raise DiagramError(f"unknown arc {a}")
            for a in (c.left_in, c.right_in):
                ins[a] = ins.get(a, 0) + 1
            for a in (c.left_out, c.right_out):
                outs[a] = outs.get(a, 0) + 1
            if self.arcs[c.left_in] != self.arcs[c.right_out] or \
                    self.arcs[c.right_in] != self.arcs[c.left_out]:
                raise DiagramError("strand colors do not match across a crossing")
        for a, col in self.arcs.items():
            if col < 1:
                raise DiagramError("arc colors must be at least 1")
            if ins.get(a, 0) != outs.get(a, 0) or ins.get(a, 0) > 1:
                raise DiagramError(f"arc {a} must end at exactly one entrance and "
                                   f"start at exactly one exit")

    def colors(self, c: Crossing) -> Tuple[int, int]:
        return self.arcs[c.right_in], self.arcs[c.left_in]   # (m, n)

    @property
    def free_circles(self) -> List[str]:
        used = set()
        for c in self.crossings:
            used |= {c.left_in, c.right_in, c.left_out, c.right_out}
        for v in self.vertices:
            used |= set(v.entrances) | set(v.exits)
        return [a for a in self.arcs if a not in used]

    def components(self) -> List[List[str]]:
        """Arcs grouped by link component (strand following)."""
        if self.vertices:
            raise DiagramError("components are only defined for diagrams without vertices")
        nxt = {}
        for c in self.crossings:
            nxt[c.left_in] = c.right_out
            nxt[c.right_in] = c.left_out
        seen, comps = set(), []
        for a in self.arcs:
            if a in seen:
                continue
            comp = [a]
            seen.add(a)
            b = nxt.get(a)
            while b is not None and b not in seen:
                comp.append(b)
                seen.add(b)
                b = nxt.get(b)
            comps.append(comp)
        return comps

    def total_color(self) -> int:
        return sum(self.arcs[comp[0]] for comp in self.components())

    def mirror(self) -> "LinkDiagram":
        return LinkDiagram(dict(self.arcs), [Crossing(-c.sign, c.left_in, c.right_in, c.left_out,
                                                      c.right_out) for c in self.crossings],
                           list(self.vertices))

    def to_json(self) -> dict:
        out = {"format": 1, "arcs": dict(self.arcs),
               "crossings": [{"sign": c.sign, "left_in": c.left_in, "right_in": c.right_in,
                              "left_out": c.left_out, "right_out": c.right_out}
                             for c in self.crossings]}
        if self.vertices:
            out["vertices"] = [{"in": list(v.entrances), "out": list(v.exits)}
                               for v in self.vertices]
        return out

    @classmethod
    def from_json(cls, data: dict) -> "LinkDiagram":
        extra = set(data) - {"format", "arcs", "crossings", "vertices"}
        if extra:
            raise DiagramError(f"unknown fields: {sorted(extra)}")
        if data.get("format") != 1:
            raise DiagramError("unsupported or missing format version")
        arcs = {str(k): int(v) for k, v in data["arcs"].items()}
        crs = []
        keys = {"sign", "left_in", "right_in", "left_out", "right_out"}
        for c in data.get("crossings", []):
            if set(c) != keys:
                raise DiagramError(f"crossing fields must be exactly {sorted(keys)}")
            crs.append(Crossing(int(c["sign"]), str(c["left_in"]), str(c["right_in"]),
                                str(c["left_out"]), str(c["right_out"])))
        verts = []
        for v in data.get("vertices", []):
            if set(v) != {"in", "out"}:
                raise DiagramError("vertex fields must be exactly ['in', 'out']")
            verts.append(ForkVertex(tuple(map(str, v["in"])), tuple(map(str, v["out"]))))
        return cls(arcs, crs, verts)


def braid_closure(word: Sequence[int], strands: int, color: int = 1) -> LinkDiagram:
    """Closure of a braid word; +i / -i stand for the positive / negative
    generator between strands i and i+1 (1-based)."""
    cur = [f"s{j}" for j in range(strands)]
    crossings = []
    for step, g in enumerate(word):
        i = abs(g) - 1
        if not 0 <= i < strands - 1:
            raise DiagramError("braid generator out of range")
        new = list(cur)
        new[i], new[i + 1] = f"p{step}_{i}", f"p{step}_{i + 1}"
        crossings.append(Crossing(1 if g > 0 else -1, cur[i], cur[i + 1], new[i], new[i + 1]))
        cur = new
    ren = {cur[j]: f"s{j}" for j in range(strands)}
    crossings = [Crossing(c.sign, *(ren.get(x, x) for x in (c.left_in, c.right_in, c.left_out,
                                                            c.right_out))) for c in crossings]
    arcs = set(f"s{j}" for j in range(strands))
    for c in crossings:
        arcs |= {c.left_in, c.right_in, c.left_out, c.right_out}
    return LinkDiagram({a: color for a in sorted(arcs)}, crossings)


def hat_tc(D: LinkDiagram) -> int:
    """Parity of the cabled wide-edge resolution's circles plus the equal-color
    adjustments."""
    if D.vertices:
        raise DiagramError("cable parity needs a diagram without vertices")
    # cable strands: (arc, index); at each crossing the wide-edge resolution
    # routes strand i of A and strand j of D through L in left-to-right order
    nxt: Dict[Tuple[str, int], Tuple[str, int]] = {}
    adj = 0
    for c in D.crossings:
        m, n = D.colors(c)
        if m == n:
            adj += m
        for i in range(n):
            pos = i
            nxt[(c.left_in, i)] = (c.left_out, pos) if pos < m else (c.right_out, pos - m)
        for j in range(m):
            pos = n + j
            nxt[(c.right_in, j)] = (c.left_out, pos) if pos < m else (c.right_out, pos - m)
    circles = 0
    seen = set()
    for a in D.free_circles:
        circles += D.arcs[a]
    for start in list(nxt):
        if start in seen:
            continue
        circles += 1
        s = start
        while s not in seen:
            seen.add(s)
            s = nxt[s]
    return (circles + adj) % 2


def tc(D: LinkDiagram) -> int:
    return D.total_color() % 2


# --------------------------------------------------------------------------
# closed resolutions


@dataclass
class Mode:
    """Undeformed (all b = 0, graded) or deformed at rational parameters."""

    N: int
    bvals: Optional[Tuple[Fraction, ...]] = None

    @property
    def graded(self) -> bool:
        return self.bvals is None

    @property
    def local_B(self) -> BParams:
        return BParams.zero(self.N) if self.graded else BParams.symbolic(self.N)

    @property
    def closed_B(self) -> BParams:
        return BParams.zero(self.N) if self.graded else BParams.specialized(self.bvals)


def _arc_alpha(D: LinkDiagram, arc: str) -> Alphabet:
    idx = list(D.arcs).index(arc)
    return Alphabet(f"w{idx}_", D.arcs[arc])


@dataclass
class VertexData:
    ks: Tuple[int, ...]
    mf: KoszulMF
    offsets: List[int]
    nrows: List[int]
    renames: List[Dict[str, str]]
    H: Optional[Union[GradedVS, DegreewiseVS]] = None
    red: Optional[Reduction] = None


class ResolutionCube:
    """All closed resolutions of a diagram and the induced edge maps."""

    def __init__(self, D: LinkDiagram, mode: Mode, normalized: bool = True):
        self.D = D
        self.mode = mode
        self.normalized = normalized
        N = mode.N
        self.levels: List[List[int]] = []
        self.res: List[Dict[int, LocalResolution]] = []
        for c in D.crossings:
            m, n = D.colors(c)
            if not (1 <= m <= N and 1 <= n <= N):
                raise DiagramError("crossing colors must lie in 1..N")
            table = {k: local_resolution(m, n, k, N, mode.local_B) for k in resolution_range(m, n)}
            self.res.append(table)
            self.levels.append([k for k in resolution_range(m, n) if not table[k].zero])
        arc_alphas = [_arc_alpha(D, a) for a in D.arcs]
        self.arc_names = [nm for a in arc_alphas for nm in a.var_names()]
        self.vertices: Dict[Tuple[int, ...], VertexData] = {}

    # degrees --------------------------------------------------------------
    def hdeg(self, ci: int, k: int) -> int:
        c = self.D.crossings[ci]
        m, _ = self.D.colors(c)
        return m - k if c.sign > 0 else k - m

    def qshift(self, ci: int, k: int) -> int:
        c = self.D.crossings[ci]
        m, _ = self.D.colors(c)
        return -(m - k) if c.sign > 0 else m - k

    def norm(self) -> Tuple[int, int, int]:
        q = h = z = 0
        if not self.normalized:
            return q, h, z
        for c in self.D.crossings:
            m, n = self.D.colors(c)
            a, b, cc = normalization(c.sign, m, n, self.mode.N)
            q, h, z = q + a, h + b, z + cc
        return q, h, z

    def vertex_keys(self) -> List[Tuple[int, ...]]:
        return list(itertools.product(*self.levels))

    # building ----------------------------------------------------------------
    def _instantiate(self, p: MPoly, ring: RingSpec, rename: Dict[str, str]) -> MPoly:
        if not self.mode.graded:
            assign = {f"B{j}": v for j, v in enumerate(self.mode.bvals, 1) if f"B{j}" in p.ring.index}
            if assign:
                p = p.specialize(assign)
        return transfer(p, ring, rename)

    def vertex(self, ks: Tuple[int, ...]) -> VertexData:
        if ks in self.vertices:
            return self.vertices[ks]
        D, N = self.D, self.mode.N
        names, degs, blocks = [], [], []
        renames = []
        for ci, (c, k) in enumerate(zip(D.crossings, ks)):
            lr = self.res[ci][k]
            ren = {}
            for role, arc in zip(BOUNDARY, (c.left_in, c.right_in, c.left_out, c.right_out)):
                alpha = _arc_alpha(D, arc)
                for j in range(1, alpha.size + 1):
                    ren[f"{role}{j}"] = f"{alpha.name}{j}"
            cnt = 0
            for nm in lr.surviving:
                new = f"c{ci}_{nm}"
                ren[nm] = new
                names.append(new)
                degs.append(lr.model.mf.ring.degrees[lr.model.mf.ring.index[nm]])
                cnt += 1
            if cnt:
                blocks.append(cnt)
            renames.append(ren)
        for a in D.arcs:
            alpha = _arc_alpha(D, a)
            for j in range(1, alpha.size + 1):
                names.append(f"{alpha.name}{j}")
                degs.append(2 * j)
        blocks.append(len(self.arc_names))
        ring = RingSpec(names, degs, degs, blocks)
        rows: List[Row] = []
        fixed: Dict[int, int] = {}
        offsets, nrows = [], []
        gens: List[MPoly] = []
        q_shift = 0
        for ci, k in enumerate(ks):
            lm = self.res[ci][k].model
            M = lm.mf
            offsets.append(len(rows))
            nrows.append(M.nrows)
            ren = renames[ci]
            for i, r in enumerate(M.rows):
                if i in M.fixed:
                    rows.append(Row(ring.zero(), ring.zero(), r.deg_b))
                    fixed[len(rows) - 1] = M.fixed[i]
                else:
                    rows.append(Row(self._instantiate(r.a, ring, ren),
                                    self._instantiate(r.b, ring, ren), r.deg_b))
            surv = set(self.res[ci][k].surviving)
            for g in M.ideal.polys():
                lmono, _ = g.lead()
                if any(e and M.ring.names[i] in surv for i, e in enumerate(lmono)):
                    gens.append(self._instantiate(g, ring, ren))
            q_shift += M.q_shift
        B = self.mode.closed_B
        for a in D.free_circles:
            alpha = _arc_alpha(D, a)
            rows += vertex_rows([alpha], [alpha], N, B, ring)
        for fv in D.vertices:
            exits = [_arc_alpha(D, a) for a in fv.exits]
            rows += vertex_rows(exits, [_arc_alpha(D, a) for a in fv.entrances], N, B, ring)
            q_shift += vertex_shift([a.size for a in exits])
        ideal = GroebnerIdeal(ring, gens)
        mf = KoszulMF(ring, rows, N, ideal=ideal, fixed=fixed, q_shift=q_shift,
                      potential=ring.zero())
        mf.specialized = True
        vd = VertexData(ks, mf, offsets, nrows, renames)
        graded = self.mode.graded
        red = reduce_to_finite(mf, max_branch=EXCLUSION_BUDGET if graded else 4000, partial=graded)
        vd.red = red
        if red.finite:
            vd.H = GradedVS(FiniteMF(red.end), graded=graded)
        else:
            vd.H = DegreewiseVS(red.end)
        self.vertices[ks] = vd
        return vd

    # edge maps --------------------------------------------------------------
    def _target_level(self, ci: int, k: int) -> int:
        return _next_k(self.D.crossings[ci].sign, k)

    def _local_map(self, ci: int, k: int, k2: int) -> Optional[LocalMap]:
        c = self.D.crossings[ci]
        m, n = self.D.colors(c)
        return crossing_map(c.sign, m, n, k, self.mode.N, self.mode.local_B)

    def _map_images(self, ci: int, k: int, k2: int, v2: VertexData):
        """Local map images instantiated in the target vertex ring, keyed by
        (internal exponent tuple, local bits)."""
        phi = self._local_map(ci, k, k2)
        if phi is None:
            return None
        src = self.res[ci][k]
        sring = src.model.mf.ring
        sidx = [sring.index[nm] for nm in src.surviving]
        ring2 = v2.mf.ring
        ren2 = v2.renames[ci]
        out: Dict[Tuple[Tuple[int, ...], int], List[Tuple[int, MPoly]]] = {}
        for (alpha, E), img in phi.images.items():
            key = (tuple(alpha[i] for i in sidx), E)
            lst = []
            for (F, _t), p in img.items():
                q = self._instantiate(p, ring2, ren2)
                if q:
                    lst.append((F, q))
            out[key] = lst
        return out

    def apply_edge(self, ci: int, v1: VertexData, v2: VertexData, images, y: Elem) -> Elem:
        ring1, ring2 = v1.mf.ring, v2.mf.ring
        surv = [f"c{ci}_{nm}" for nm in self.res[ci][v1.ks[ci]].surviving]
        sidx = [ring1.index[nm] for nm in surv]
        off1, n1 = v1.offsets[ci], v1.nrows[ci]
        off2, n2 = v2.offsets[ci], v2.nrows[ci]
        mask1 = (1 << n1) - 1
        idx_map = [ring2.index.get(nm, -1) for nm in ring1.names]
        out: Dict[Tuple[int, int], MPoly] = {}
        for (E, _t), p in y.items():
            Ec = (E >> off1) & mask1
            low = E & ((1 << off1) - 1)
            high = E >> (off1 + n1)
            groups: Dict[Tuple[int, ...], Dict[Mono, fmpq]] = {}
            for mono, coef in p.terms.items():
                alpha = tuple(mono[i] for i in sidx)
                rest = list(mono)
                for i in sidx:
                    rest[i] = 0
                groups.setdefault(alpha, {})[tuple(rest)] = coef
            for alpha, terms in groups.items():
                imgs = images.get((alpha, Ec))
                if not imgs:
                    continue
                coef = MPoly(ring1, terms).map_to(ring2, idx_map)
                for F, q in imgs:
                    key = (low | (F << off2) | (high << (off2 + n2)), 0)
                    w = coef * q
                    out[key] = out[key] + w if key in out else w
        return v2.mf.reduce_elem(out)

    def edge_matrix(self, ks: Tuple[int, ...], ci: int) -> Optional[Tuple[Tuple[int, ...], List[Vec]]]:
        """Columns (one per homology rep of ks) of the induced map along
        crossing ci, including the Koszul sign; None when there is no edge."""
        k = ks[ci]
        k2 = self._target_level(ci, k)
        if k2 not in self.levels[ci]:
            return None
        ks2 = ks[:ci] + (k2,) + ks[ci + 1:]
        v1, v2 = self.vertex(ks), self.vertex(ks2)
        images = self._map_images(ci, k, k2, v2)
        sign = sum(self.hdeg(j, ks[j]) for j in range(ci)) % 2
        cols = []
        for n in range(v1.H.dim):
            z = v1.red.lift(v1.H.rep_elem(n))
            img = self.apply_edge(ci, v1, v2, images, z)
            coords = v2.H.elem_coordinates(v2.red.project(img))
            if sign:
                coords = {i: -x for i, x in coords.items()}
            cols.append(coords)
        return ks2, cols


# --------------------------------------------------------------------------
# complexes of graded vector spaces


@dataclass
class VSComplex:
    """Bounded complex of finite vector spaces with graded or filtered basis.

    ``grades[t][i] = (z2, q)`` for basis vector i in homological degree t;
    ``d[t]`` lists sparse columns mapping degree t to t + 1.
    """

    grades: Dict[int, List[Tuple[int, int]]]
    d: Dict[int, List[Vec]]
    graded: bool = True

    def check_square_zero(self) -> bool:
        for t, cols in self.d.items():
            nxt = self.d.get(t + 1)
            if not nxt:
                continue
            for col in cols:
                out: Vec = {}
                for k, v in col.items():
                    out = vec_add(out, nxt[k], v)
                if out:
                    return False
        return True

    def total_dim(self) -> int:
        return sum(len(g) for g in self.grades.values())

    def homology(self) -> Poincare:
        """Graded dimensions (q, t, z2); in filtered mode q is the filtration level."""
        out: Dict[Tuple[int, int, int], int] = {}
        for t, reps in self.homology_levels().items():
            for (z, q), n in reps.items():
                out[(q, t, z)] = out.get((q, t, z), 0) + n
        return Poincare(out)

    def homology_levels(self) -> Dict[int, Dict[Tuple[int, int], int]]:
        """t -> {(z2, level): count}.  In graded mode homology splits by (z2, q);
        in filtered mode the level of a class is its filtration level."""
        res: Dict[int, Dict[Tuple[int, int], int]] = {}
        for t, grades in self.grades.items():
            n = len(grades)
            if self.graded:
                blocks: Dict[Tuple[int, int], List[int]] = {}
                for i, g in enumerate(grades):
                    blocks.setdefault(g, []).append(i)
            else:
                blocks = {}
                for i, g in enumerate(grades):
                    blocks.setdefault((g[0], 0), []).append(i)
            out_cols = self.d.get(t, [{} for _ in range(n)])
            in_cols = self.d.get(t - 1, [])
            counts: Dict[Tuple[int, int], int] = {}
            for key, idxs in blocks.items():
                # order basis by level descending so echelon pivots give levels
                order = sorted(idxs, key=lambda i: -grades[i][1])
                pos = {i: p for p, i in enumerate(order)}
                cols = [out_cols[i] for i in order]
                ker = nullspace(cols)
                cycles = [{pos_i: v for pos_i, v in z.items()} for z in ker]
                # cycles are indexed by position in ``order`` already
                bnd = []
                for col in in_cols:
                    part = {pos[i]: v for i, v in col.items() if i in pos}
                    if part:
                        bnd.append(part)
                ech = Echelon()
                for b in bnd:
                    ech.add(b)
                for z in cycles:
                    r, _ = ech.reduce(z)
                    if r:
                        ech.add(r)
                        lvl = grades[order[min(r)]][1]
                        z2 = grades[order[min(r)]][0]
                        counts[(z2, lvl)] = counts.get((z2, lvl), 0) + 1
            res[t] = counts
        return res


def gaussian_eliminate(C: VSComplex) -> VSComplex:
    """Cancel invertible grading-preserving entries d[t][j][i] one at a time,
    replacing the remaining block by eps - gamma phi^{-1} delta."""
    grades = {t: list(g) for t, g in C.grades.items()}
    # rows representation for convenient elimination: d[t] as dict col -> dict row
    d = {t: [dict(c) for c in cols] for t, cols in C.d.items()}
    alive = {t: set(range(len(g))) for t, g in grades.items()}

    def find():
        for t in sorted(d):
            for j in sorted(alive.get(t, ())):
                col = d[t][j]
                for i in sorted(col):
                    if i in alive.get(t + 1, ()) and grades[t][j] == grades[t + 1][i]:
                        return t, j, i
        return None

    while True:
        hit = find()
        if hit is None:
            break
        t, j, i = hit
        phi = d[t][j][i]
        # column j of d[t]: delta part (rows other than i)
        delta = {r: v for r, v in d[t][j].items() if r != i}
        # gamma: row i restricted to columns other than j
        gamma = {}
        for jj in alive[t]:
            if jj != j and i in d[t][jj]:
                gamma[jj] = d[t][jj][i]
        for jj, g in gamma.items():
            col = d[t][jj]
            f = -g / phi
            for r, v in delta.items():
                w = col.get(r, fmpq(0)) + f * v
                if w:
                    col[r] = w
                else:
                    col.pop(r, None)
            col.pop(i, None)
        # remove j from degree t and i from degree t+1
        alive[t].discard(j)
        alive[t + 1].discard(i)
        d[t][j] = {}
        if t - 1 in d:
            for col in d[t - 1]:
                col.pop(j, None)
        if t + 1 in d:
            d[t + 1][i] = {}
    # re-index
    new_grades, new_d, remap = {}, {}, {}
    for t, g in grades.items():
        keep = sorted(alive[t])
        remap[t] = {old: new for new, old in enumerate(keep)}
        new_grades[t] = [g[i] for i in keep]
    for t, cols in d.items():
        new_cols = []
        for j in sorted(alive[t]):
            new_cols.append({remap[t + 1][r]: v for r, v in cols[j].items()
                             if r in remap.get(t + 1, {})})
        new_d[t] = new_cols
    return VSComplex(new_grades, new_d, C.graded)


# --------------------------------------------------------------------------
# assembling link complexes

# The reported homological grading t is minus the internal one, so that
# positive knots have homology in t >= 0.  Fixed against the independent sl(2)
# cube computation in the tests.
T_SIGN = -1


def _complex_sign(sign: int) -> int:
    return sign


def assemble_complex(D: LinkDiagram, N: int, roots: Optional[Sequence] = None,
                     check: bool = True, normalized: bool = True) -> VSComplex:
    """Complex of resolution homologies; ``normalized=False`` drops the
    equal-color crossing shifts."""
    mode = Mode(N, None if roots is None else roots_to_b(roots).values)
    internal = LinkDiagram(D.arcs, [Crossing(_complex_sign(c.sign), c.left_in, c.right_in,
                                             c.left_out, c.right_out) for c in D.crossings],
                           list(D.vertices))
    return cube_complex(ResolutionCube(internal, mode, normalized), check)


def cube_complex(cube: ResolutionCube, check: bool = True) -> VSComplex:
    """Total complex of vertex homologies and induced edge maps."""
    mode = cube.mode
    qn, hn, zn = cube.norm()
    keys = cube.vertex_keys()
    dmat: Dict[int, List[Vec]] = {}
    # the complex is stored in the internal direction (d raises the degree);
    # degrees are relabelled by T_SIGN only when reporting
    internal_grades: Dict[int, List[Tuple[int, int]]] = {}
    ipos: Dict[Tuple[int, ...], Tuple[int, int]] = {}
    for ks in keys:
        v = cube.vertex(ks)
        t = sum(cube.hdeg(ci, k) for ci, k in enumerate(ks)) + hn
        q = sum(cube.qshift(ci, k) for ci, k in enumerate(ks)) + qn
        lst = internal_grades.setdefault(t, [])
        ipos[ks] = (t, len(lst))
        for p, g in zip(v.H.rep_parity, v.H.rep_tags):
            lst.append(((p + zn) % 2, g + q))
    for t, lst in internal_grades.items():
        dmat[t] = [dict() for _ in lst]
    for ks in keys:
        t, off = ipos[ks]
        for ci in range(len(ks)):
            res = cube.edge_matrix(ks, ci)
            if res is None:
                continue
            ks2, cols = res
            t2, off2 = ipos[ks2]
            assert t2 == t + 1
            for j, col in enumerate(cols):
                tgt = dmat[t][off + j]
                for i, v in col.items():
                    w = tgt.get(off2 + i, fmpq(0)) + v
                    if w:
                        tgt[off2 + i] = w
                    else:
                        tgt.pop(off2 + i, None)
    C = VSComplex(internal_grades, dmat, graded=mode.graded)
    if check and not C.check_square_zero():
        raise MFError("d^2 != 0 in the assembled complex")
    if check and mode.graded:
        for t, cols in dmat.items():
            for j, col in enumerate(cols):
                for i in col:
                    if internal_grades[t][j] != internal_grades[t + 1][i]:
                        raise MFError("differential does not preserve (z2, q)")
    return C


def _report(P: Poincare) -> Poincare:
    return Poincare({(q, T_SIGN * t, z): n for (q, t, z), n in P.coeffs.items()})


def link_homology(D: LinkDiagram, N: int, normalized: bool = True) -> Poincare:
    C = assemble_complex(D, N, normalized=normalized)
    return _report(C.homology())


# --------------------------------------------------------------------------
# null-homotopic square complexes

# the square with both rungs reversed: K runs left to right at the bottom,
# T right to left at the top
FLIPPED_SQUARE = ((("L", "K"), ("A",)), (("R",), ("D", "K")),
                  (("X",), ("L", "T")), (("Y", "T"), ("R",)))


def rung_square(m: int, n: int, k: int, N: int, B: Optional[BParams] = None) -> LocalResolution:
    """Square with boundary A (n), D (m+1), X (m), Y (n+1) and rungs k at the
    bottom (right to left) and n+k-m at the top (left to right)."""
    B = B or BParams.zero(N)
    bd = (("A", n), ("D", m + 1), ("X", m), ("Y", n + 1))
    cols = (("K", k), ("L", n + k), ("T", n + k - m), ("R", m + 1 - k))
    return local_square(bd, cols, CROSSING_SQUARE, N, B)


def flipped_square(m: int, n: int, j: int, N: int, B: Optional[BParams] = None) -> LocalResolution:
    """Same boundary as ``rung_square``; rungs n+j-m at the bottom (left to
    right) and j at the top (right to left)."""
    B = B or BParams.zero(N)
    bd = (("A", n), ("D", m + 1), ("X", m), ("Y", n + 1))
    cols = (("K", n + j - m), ("L", m - j), ("T", j), ("R", n + 1 + j))
    return local_square(bd, cols, FLIPPED_SQUARE, N, B)


def null_homotopic_chain(m: int, n: int, k1: int, k2: int, N: int,
                         B: Optional[BParams] = None) -> Tuple[List[LocalResolution], List[Optional[LocalMap]]]:
    """Flipped(k2) -> square(k2) -> ... -> square(k1) -> flipped(k1-1), each
    map the unique grading-preserving one."""
    if not (max(m - n, 0) + 1 <= k1 <= k2 <= m):
        raise ValueError("need max(m-n,0)+1 <= k1 <= k2 <= m")
    B = B or BParams.zero(N)
    pieces = [flipped_square(m, n, k2, N, B)]
    pieces += [rung_square(m, n, k, N, B) for k in range(k2, k1 - 1, -1)]
    pieces.append(flipped_square(m, n, k1 - 1, N, B))
    maps: List[Optional[LocalMap]] = []
    for a, b in zip(pieces, pieces[1:]):
        maps.append(None if a.zero or b.zero else unique_map(a.model, b.model, 0))
    return pieces, maps


@dataclass
class _ClosedSquare:
    """A square whose X end is joined to A and Y end to D."""

    arcs: Dict[str, int]
    crossings: List[Crossing]
    free_circles: List[str] = field(default_factory=list)
    vertices: List[ForkVertex] = field(default_factory=list)


class SquareChainClosure(ResolutionCube):
    """A chain of square-shaped pieces closed up into a complex of closed
    graph homologies; degree i holds piece i."""

    def __init__(self, pieces: Sequence[LocalResolution], maps: Sequence[Optional[LocalMap]],
                 mode: Mode):
        n, m = pieces[0].boundary["A"].size, pieces[0].boundary["X"].size
        if m != n:
            raise ValueError("closing a square needs equal colors on A and X")
        self.D = _ClosedSquare({"u": n, "v": pieces[0].boundary["D"].size},
                               [Crossing(1, "u", "v", "u", "v")])
        self.mode = mode
        self.res = [dict(enumerate(pieces))]
        self.levels = [[i for i, p in enumerate(pieces) if not p.zero]]
        self.maps = list(maps)
        self.arc_names = [nm for a in self.D.arcs for nm in _arc_alpha(self.D, a).var_names()]
        self.vertices = {}

    def hdeg(self, ci: int, k: int) -> int:
        return k

    def qshift(self, ci: int, k: int) -> int:
        return 0

    def norm(self) -> Tuple[int, int, int]:
        return 0, 0, 0

    def _target_level(self, ci: int, k: int) -> int:
        return k + 1

    def _local_map(self, ci: int, k: int, k2: int) -> Optional[LocalMap]:
        return self.maps[k]


def null_homotopic_closure(m: int, n: int, k1: int, k2: int, N: int) -> VSComplex:
    pieces, maps = null_homotopic_chain(m, n, k1, k2, N)
    return cube_complex(SquareChainClosure(pieces, maps, Mode(N)))


# --------------------------------------------------------------------------
# resolved graphs, decategorification, deformations


def resolved_graph(D: LinkDiagram, ks: Sequence[int]) -> MoyGraph:
    """Closed MOY graph obtained by replacing crossing i by its k_i resolution.
    Cyclic orders are recorded so rotation numbers can be computed."""
    if D.vertices:
        raise DiagramError("resolved graphs need a diagram without vertices")
    verts: List[str] = []
    edges: List[Edge] = []
    cyc: Dict[str, List[int]] = {}
    ends: Dict[str, Dict[str, str]] = {}   # arc -> {"tail": vertex, "head": vertex}
    for ci, (c, k) in enumerate(zip(D.crossings, ks)):
        m, n = D.colors(c)
        cols = {"K": k, "L": n + k, "T": n + k - m, "R": m - k}
        p = f"c{ci}."
        bl, br, tl, tr = p + "BL", p + "BR", p + "TL", p + "TR"
        verts += [bl, br, tl, tr]
        ends.setdefault(c.left_in, {})["head"] = bl
        ends.setdefault(c.right_in, {})["head"] = br
        ends.setdefault(c.left_out, {})["tail"] = tl
        ends.setdefault(c.right_out, {})["tail"] = tr
        local = {}
        for name, (t, h) in {"K": (br, bl), "L": (bl, tl), "T": (tl, tr), "R": (br, tr)}.items():
            if cols[name]:
                local[name] = len(edges)
                edges.append(Edge(t, h, cols[name]))
        # cyclic orders (counterclockwise) at the four corners; boundary arcs
        # are appended below once their edge ids are known
        cyc[bl] = [("L", local.get("L")), ("arc", c.left_in), ("K", local.get("K"))]
        cyc[br] = [("R", local.get("R")), ("K", local.get("K")), ("arc", c.right_in)]
        cyc[tl] = [("arc", c.left_out), ("L", local.get("L")), ("T", local.get("T"))]
        cyc[tr] = [("arc", c.right_out), ("T", local.get("T")), ("R", local.get("R"))]
    arc_edge: Dict[str, int] = {}
    for a in D.arcs:
        if a in ends:
            arc_edge[a] = len(edges)
            edges.append(Edge(ends[a]["tail"], ends[a]["head"], D.arcs[a]))
    for a in D.free_circles:
        v = f"circ.{a}"
        verts.append(v)
        cyc[v] = [len(edges), len(edges)]
        edges.append(Edge(v, v, D.arcs[a]))
    order: Dict[str, List[int]] = {}
    for v, lst in cyc.items():
        if v.startswith("circ."):
            order[v] = lst
            continue
        out = []
        for kind, x in lst:
            if kind == "arc":
                out.append(arc_edge[x])
            elif x is not None:
                out.append(x)
        order[v] = out
    # drop corners that lost all edges
    used = {e.tail for e in edges} | {e.head for e in edges}
    verts = [v for v in verts if v in used]
    order = {v: o for v, o in order.items() if v in used}
    return MoyGraph(verts, edges, set(), order)


def euler_characteristic(D: LinkDiagram, N: int, budget: int = 10_000) -> LaurentPoly:
    """sum over resolutions of (-1)^t q^shift moy_poly, in the reported grading."""
    from .moy import moy_poly
    internal = LinkDiagram(D.arcs, [Crossing(_complex_sign(c.sign), c.left_in, c.right_in,
                                             c.left_out, c.right_out) for c in D.crossings])
    mode = Mode(N)
    cube = ResolutionCube(internal, mode)
    qn, hn, _ = cube.norm()
    total = LaurentPoly({})
    for ks in itertools.product(*[resolution_range(*D.colors(c)) for c in D.crossings]):
        t = sum(cube.hdeg(ci, k) for ci, k in enumerate(ks)) + hn
        q = sum(cube.qshift(ci, k) for ci, k in enumerate(ks)) + qn
        P = moy_poly(resolved_graph(internal, ks), N, budget=budget)
        total = total + P * LaurentPoly({q: (-1) ** (t % 2)})
    return total


def poincare_at_t_minus_one(P: Poincare) -> LaurentPoly:
    out: Dict[int, int] = {}
    for (q, t, z), n in P.coeffs.items():
        out[q] = out.get(q, 0) + (-1) ** (t % 2) * n
    return LaurentPoly(out)


@dataclass
class FilteredVS:
    """Per (z2, homological degree): filtration level -> dim of fil^k."""

    profiles: Dict[Tuple[int, int], Dict[int, int]]

    @classmethod
    def from_levels(cls, levels: Dict[Tuple[int, int], Dict[int, int]]) -> "FilteredVS":
        """levels: (z2, t) -> {level: number of classes entering at that level}."""
        prof = {}
        for key, counts in levels.items():
            acc, out = 0, {}
            for k in sorted(counts):
                acc += counts[k]
                out[k] = acc
            prof[key] = out
        return cls(prof)

    def total_dim(self) -> int:
        return sum(max(p.values()) if p else 0 for p in self.profiles.values())

    def dim(self, z2: Optional[int] = None, t: Optional[int] = None) -> int:
        return sum(max(p.values()) if p else 0 for (z, tt), p in self.profiles.items()
                   if (z2 is None or z == z2) and (t is None or tt == t))

    def associated_graded(self) -> Poincare:
        out = {}
        for (z, t), prof in self.profiles.items():
            prev = 0
            for k in sorted(prof):
                if prof[k] - prev:
                    out[(k, t, z)] = prof[k] - prev
                prev = prof[k]
        return Poincare(out)

    def to_json(self) -> dict:
        return {"format": 1, "profiles": [
            {"z2": z, "t": t, "fil": [[k, v] for k, v in sorted(p.items())]}
            for (z, t), p in sorted(self.profiles.items())]}


def deformed_homology(D: LinkDiagram, N: int, roots: Sequence) -> FilteredVS:
    if len(roots) != N:
        raise ValueError("need exactly N roots")
    C = assemble_complex(D, N, roots)
    levels = {}
    for t, counts in C.homology_levels().items():
        for (z, lvl), n in counts.items():
            levels.setdefault((z, T_SIGN * t), {})
            levels[(z, T_SIGN * t)][lvl] = levels[(z, T_SIGN * t)].get(lvl, 0) + n
    return FilteredVS.from_levels(levels)


def spectral_E1(D: LinkDiagram, N: int, roots: Optional[Sequence] = None) -> Poincare:
    """E1 page of the quantum-filtration spectral sequence: the homology of the
    associated graded complex, which is the undeformed complex."""
    return link_homology(D, N)


def purity_check(D: LinkDiagram, N: int, roots: Sequence) -> bool:
    H = deformed_homology(D, N, roots)
    bad = (tc(D) + 1) % 2
    return H.dim(z2=bad) == 0
