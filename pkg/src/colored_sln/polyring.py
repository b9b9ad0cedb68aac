"""Exact multivariate polynomials over Q with graded variables, Groebner bases,
normal forms and quotient-ring bases.

Coefficients are flint ``fmpq`` values; monomials are dense exponent tuples
over the variables of a :class:`RingSpec`.
"""

from __future__ import annotations

import heapq
from contextlib import contextmanager
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from flint import fmpq

from .qpoly import LaurentPoly

Mono = Tuple[int, ...]


class ResourceLimit(RuntimeError):
    """A configured budget (steps or monomials) was exceeded."""

    reason = "resource-limit"


def to_q(x) -> fmpq:
    if isinstance(x, fmpq):
        return x
    if isinstance(x, int):
        return fmpq(x)
    if isinstance(x, Fraction):
        return fmpq(x.numerator, x.denominator)
    if isinstance(x, str):
        return to_q(Fraction(x))
    raise TypeError(f"cannot convert {type(x).__name__} to a rational")


def to_fraction(x: fmpq) -> Fraction:
    return Fraction(int(x.p), int(x.q))


class RingSpec:
    """Ordered graded variables plus a block weighted-grevlex monomial order.

    ``degrees`` are total degrees; ``qdegrees`` are quantum degrees (0 for the
    deformation parameters B_k).  ``blocks`` splits the variables into
    consecutive blocks; monomials are compared block by block, each block by
    weighted degree then reverse lexicographically.
    """

    def __init__(self, names: Sequence[str], degrees: Sequence[int],
                 qdegrees: Optional[Sequence[int]] = None,
                 blocks: Optional[Sequence[int]] = None):
        names = tuple(names)
        if len(set(names)) != len(names):
            raise ValueError("variable names must be unique")
        self.names = names
        self.degrees = tuple(int(d) for d in degrees)
        self.qdegrees = tuple(int(d) for d in (qdegrees if qdegrees is not None else degrees))
        if len(self.degrees) != len(names) or len(self.qdegrees) != len(names):
            raise ValueError("degree list length mismatch")
        if blocks is None:
            blocks = (len(names),) if names else ()
        if sum(blocks) != len(names):
            raise ValueError("blocks must cover all variables")
        self.blocks = tuple(blocks)
        self.index = {n: i for i, n in enumerate(names)}
        self.nvars = len(names)
        self._keycache: Dict[Mono, tuple] = {}
        spans = []
        start = 0
        for b in self.blocks:
            spans.append((start, start + b))
            start += b
        self._spans = spans
        self.zero_mono: Mono = (0,) * self.nvars

    def __repr__(self):
        return f"RingSpec({list(self.names)})"

    def __eq__(self, other):
        return (isinstance(other, RingSpec) and self.names == other.names
                and self.degrees == other.degrees and self.qdegrees == other.qdegrees
                and self.blocks == other.blocks)

    def __hash__(self):
        return hash((self.names, self.degrees, self.qdegrees, self.blocks))

    def key(self, m: Mono) -> tuple:
        """Sort key: a smaller key means a larger monomial."""
        k = self._keycache.get(m)
        if k is None:
            parts = []
            degs = self.degrees
            for lo, hi in self._spans:
                parts.append(-sum(degs[i] * m[i] for i in range(lo, hi)))
                parts.extend(m[i] for i in range(hi - 1, lo - 1, -1))
            k = tuple(parts)
            if len(self._keycache) > 2_000_000:
                self._keycache.clear()
            self._keycache[m] = k
        return k

    def mono_degree(self, m: Mono) -> int:
        return sum(d * e for d, e in zip(self.degrees, m))

    def mono_qdegree(self, m: Mono) -> int:
        return sum(d * e for d, e in zip(self.qdegrees, m))

    def var(self, name: str) -> "MPoly":
        i = self.index[name]
        m = [0] * self.nvars
        m[i] = 1
        return MPoly(self, {tuple(m): fmpq(1)})

    def const(self, c) -> "MPoly":
        c = to_q(c)
        return MPoly(self, {self.zero_mono: c} if c else {})

    def zero(self) -> "MPoly":
        return MPoly(self, {})

    def one(self) -> "MPoly":
        return self.const(1)

    def with_blocks(self, blocks: Sequence[int]) -> "RingSpec":
        return RingSpec(self.names, self.degrees, self.qdegrees, blocks)

    def mono_str(self, m: Mono) -> str:
        parts = []
        for n, e in zip(self.names, m):
            if e == 1:
                parts.append(n)
            elif e:
                parts.append(f"{n}^{e}")
        return "*".join(parts) if parts else "1"


class MPoly:
    """Sparse polynomial: dict monomial -> nonzero fmpq coefficient."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: RingSpec, terms: Optional[Dict[Mono, fmpq]] = None,
                 clean: bool = False):
        self.ring = ring
        if terms is None:
            terms = {}
        if clean:
            terms = {m: c for m, c in terms.items() if c}
        self.terms = terms

    # construction helpers -------------------------------------------------
    @staticmethod
    def from_dict(ring: RingSpec, data: Mapping[Mono, object]) -> "MPoly":
        return MPoly(ring, {tuple(m): to_q(c) for m, c in data.items() if c})

    def copy(self) -> "MPoly":
        return MPoly(self.ring, dict(self.terms))

    # arithmetic -------------------------------------------------------------
    def _coerce(self, other) -> "MPoly":
        if isinstance(other, MPoly):
            if other.ring is not self.ring and other.ring != self.ring:
                raise ValueError("polynomials live in different rings")
            return other
        return self.ring.const(other)

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            v = out.get(m)
            if v is None:
                out[m] = c
            else:
                v = v + c
                if v:
                    out[m] = v
                else:
                    del out[m]
        return MPoly(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        return MPoly(self.ring, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            v = out.get(m)
            if v is None:
                out[m] = -c
            else:
                v = v - c
                if v:
                    out[m] = v
                else:
                    del out[m]
        return MPoly(self.ring, out)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, MPoly):
            c = to_q(other)
            if not c:
                return MPoly(self.ring, {})
            return MPoly(self.ring, {m: v * c for m, v in self.terms.items()})
        other = self._coerce(other)
        if len(self.terms) < len(other.terms):
            a, b = self.terms, other.terms
        else:
            a, b = other.terms, self.terms
        out: Dict[Mono, fmpq] = {}
        for ma, ca in a.items():
            for mb, cb in b.items():
                m = tuple(x + y for x, y in zip(ma, mb))
                v = out.get(m)
                out[m] = ca * cb if v is None else v + ca * cb
        return MPoly(self.ring, {m: c for m, c in out.items() if c})

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power")
        out = self.ring.one()
        base = self
        while n:
            if n & 1:
                out = out * base
            n >>= 1
            if n:
                base = base * base
        return out

    def mul_term(self, m: Mono, c: fmpq) -> "MPoly":
        if not c:
            return MPoly(self.ring, {})
        return MPoly(self.ring, {tuple(x + y for x, y in zip(mm, m)): v * c
                                 for mm, v in self.terms.items()})

    def __eq__(self, other):
        if isinstance(other, MPoly):
            return self.ring == other.ring and self.terms == other.terms
        try:
            return self.terms == self.ring.const(other).terms
        except TypeError:
            return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(not any(m) for m in self.terms)

    def constant_term(self) -> fmpq:
        return self.terms.get(self.ring.zero_mono, fmpq(0))

    # orders and degrees -----------------------------------------------------
    def lead(self) -> Tuple[Mono, fmpq]:
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        key = self.ring.key
        m = min(self.terms, key=key)
        return m, self.terms[m]

    def degree(self) -> int:
        """Maximal total degree (-1 for zero)."""
        if not self.terms:
            return -1
        return max(self.ring.mono_degree(m) for m in self.terms)

    def qdegree(self) -> int:
        if not self.terms:
            return -10 ** 9
        return max(self.ring.mono_qdegree(m) for m in self.terms)

    def is_homogeneous(self) -> bool:
        return len({self.ring.mono_degree(m) for m in self.terms}) <= 1

    def homogeneous_part(self, d: int) -> "MPoly":
        return MPoly(self.ring, {m: c for m, c in self.terms.items()
                                 if self.ring.mono_degree(m) == d})

    def variables(self) -> set:
        out = set()
        for m in self.terms:
            for i, e in enumerate(m):
                if e:
                    out.add(i)
        return out

    # substitution -----------------------------------------------------------
    def specialize(self, assignments: Mapping[str, object]) -> "MPoly":
        """Substitute rational values; the result stays in the same ring."""
        idx = {self.ring.index[n]: to_q(v) for n, v in assignments.items()}
        out: Dict[Mono, fmpq] = {}
        for m, c in self.terms.items():
            mm = list(m)
            for i, v in idx.items():
                if mm[i]:
                    c = c * v ** mm[i]
                    mm[i] = 0
            if c:
                t = tuple(mm)
                out[t] = out.get(t, fmpq(0)) + c
        return MPoly(self.ring, {m: c for m, c in out.items() if c})

    def substitute(self, images: Mapping[int, "MPoly"]) -> "MPoly":
        """Substitute polynomials for variables (by index)."""
        ring = self.ring
        out = ring.zero()
        cache: Dict[Tuple[int, int], MPoly] = {}
        for m, c in self.terms.items():
            rest = list(m)
            term = None
            for i, p in images.items():
                e = m[i]
                if e:
                    rest[i] = 0
                    key = (i, e)
                    if key not in cache:
                        cache[key] = p ** e
                    term = cache[key] if term is None else term * cache[key]
            base = MPoly(ring, {tuple(rest): c})
            out = out + (base if term is None else base * term)
        return out

    def map_to(self, target: RingSpec, index_map: Sequence[int],
               images: Optional[Mapping[int, "MPoly"]] = None) -> "MPoly":
        """Ring map sending variable i to target variable index_map[i].

        ``index_map[i] = -1`` requires ``images[i]`` (a polynomial in target).
        """
        out: Dict[Mono, fmpq] = {}
        nv = target.nvars
        extra = []
        for m, c in self.terms.items():
            mm = [0] * nv
            sub = None
            for i, e in enumerate(m):
                if e:
                    j = index_map[i]
                    if j >= 0:
                        mm[j] += e
                    else:
                        p = images[i] ** e
                        sub = p if sub is None else sub * p
            t = tuple(mm)
            if sub is None:
                v = out.get(t)
                out[t] = c if v is None else v + c
            else:
                extra.append(sub.mul_term(t, c))
        res = MPoly(target, {m: c for m, c in out.items() if c})
        for p in extra:
            res = res + p
        return res

    def diff(self, i: int) -> "MPoly":
        out: Dict[Mono, fmpq] = {}
        for m, c in self.terms.items():
            e = m[i]
            if e:
                mm = list(m)
                mm[i] -= 1
                out[tuple(mm)] = c * e
        return MPoly(self.ring, out)

    def exact_div_scalar(self, c) -> "MPoly":
        c = to_q(c)
        return MPoly(self.ring, {m: v / c for m, v in self.terms.items()})

    def __repr__(self):
        return f"MPoly({self.to_str()})"

    def to_str(self) -> str:
        if not self.terms:
            return "0"
        items = sorted(self.terms.items(), key=lambda kv: self.ring.key(kv[0]))
        parts = []
        for m, c in items:
            ms = self.ring.mono_str(m)
            if ms == "1":
                parts.append(str(c))
            elif c == 1:
                parts.append(ms)
            elif c == -1:
                parts.append("-" + ms)
            else:
                parts.append(f"{c}*{ms}")
        return " + ".join(parts).replace("+ -", "- ")

    def to_json(self):
        return [[list(m), str(c)] for m, c in
                sorted(self.terms.items(), key=lambda kv: self.ring.key(kv[0]))]


def divides(a: Mono, b: Mono) -> bool:
    return all(x <= y for x, y in zip(a, b))


def mono_div(b: Mono, a: Mono) -> Mono:
    return tuple(y - x for x, y in zip(a, b))


def mono_lcm(a: Mono, b: Mono) -> Mono:
    return tuple(max(x, y) for x, y in zip(a, b))


@dataclass
class _Elem:
    poly: MPoly
    lm: Mono
    lc: fmpq
    cof: Optional[MPoly] = None


# process-wide defaults, adjustable through ``budgets``
BUDGET = {"steps": 200_000, "terms": 2_000_000}


@contextmanager
def budgets(steps: Optional[int] = None, terms: Optional[int] = None):
    """Temporarily change the default step and monomial budgets."""
    saved = dict(BUDGET)
    if steps is not None:
        BUDGET["steps"] = steps
    if terms is not None:
        BUDGET["terms"] = terms
    try:
        yield
    finally:
        BUDGET.update(saved)


class GroebnerIdeal:
    """A Groebner basis under the ring's monomial order.

    ``extend`` adds one generator and, optionally, tracks for each new basis
    element g a cofactor r_g with g = r_g * s modulo the previous ideal; this
    supports division by s in the previous quotient ring.
    """

    def __init__(self, ring: RingSpec, gens: Iterable[MPoly] = (),
                 max_steps: Optional[int] = None, max_terms: Optional[int] = None):
        self.ring = ring
        self.max_steps = BUDGET["steps"] if max_steps is None else max_steps
        self.max_terms = BUDGET["terms"] if max_terms is None else max_terms
        self.gens: List[MPoly] = []
        self.basis: List[_Elem] = []
        self.unit = False
        self.parent: Optional[GroebnerIdeal] = None
        self.new_gen: Optional[MPoly] = None
        for g in gens:
            self._add(g, track=False)

    # public API ---------------------------------------------------------------
    @classmethod
    def build(cls, ring: RingSpec, gens: Iterable[MPoly], **kw) -> "GroebnerIdeal":
        return cls(ring, gens, **kw)

    def extend(self, s: MPoly, track: bool = True) -> "GroebnerIdeal":
        """Return the Groebner basis of self + (s) (self is unchanged)."""
        new = GroebnerIdeal(self.ring, (), self.max_steps, self.max_terms)
        new.gens = list(self.gens)
        new.basis = [_Elem(e.poly, e.lm, e.lc, None) for e in self.basis]
        new.unit = self.unit
        new.parent = self
        new.new_gen = s
        new._add(s, track=track)
        return new

    def normal_form(self, p: MPoly) -> MPoly:
        return self.reduce(p)[0]

    def contains(self, p: MPoly) -> bool:
        return not self.normal_form(p)

    def is_unit_ideal(self) -> bool:
        return self.unit

    def leading_monomials(self) -> List[Mono]:
        return [e.lm for e in self.basis]

    def polys(self) -> List[MPoly]:
        return [e.poly for e in self.basis]

    # core -----------------------------------------------------------------------
    def reduce(self, p: MPoly, track: bool = False):
        """Full reduction. With ``track`` also return sum q_g * cof_g."""
        ring = self.ring
        if self.unit:
            cof = None
            if track:
                # p = p * 1 and 1 = r * s mod parent
                e = self._unit_elem()
                cof = (p * e.cof) if e.cof is not None else ring.zero()
            return ring.zero(), cof
        if not p.terms:
            return ring.zero(), (ring.zero() if track else None)
        basis = self.basis
        key = ring.key
        terms = dict(p.terms)
        heap = [(key(m), m) for m in terms]
        heapq.heapify(heap)
        rem: Dict[Mono, fmpq] = {}
        cof_acc: Dict[Mono, fmpq] = {} if track else None
        cof_terms: List[Tuple[Mono, fmpq, _Elem]] = []
        steps = 0
        last = None
        while heap:
            _, m = heapq.heappop(heap)
            if m == last:
                continue
            c = terms.get(m)
            if not c:
                continue
            last = m
            for e in basis:
                lm = e.lm
                if all(x <= y for x, y in zip(lm, m)):
                    break
            else:
                rem[m] = c
                del terms[m]
                continue
            steps += 1
            if steps > self.max_steps:
                raise ResourceLimit("normal form step budget exceeded")
            shift = tuple(y - x for x, y in zip(lm, m))
            f = c / e.lc
            for gm, gc in e.poly.terms.items():
                t = tuple(x + y for x, y in zip(gm, shift))
                v = terms.get(t)
                if v is None:
                    terms[t] = -f * gc
                    heapq.heappush(heap, (key(t), t))
                else:
                    v = v - f * gc
                    if v:
                        terms[t] = v
                    else:
                        del terms[t]
            if track:
                cof_terms.append((shift, f, e))
            if len(terms) > self.max_terms:
                raise ResourceLimit("normal form monomial budget exceeded")
        out = MPoly(ring, rem)
        if not track:
            return out, None
        total = ring.zero()
        grouped: Dict[int, Dict[Mono, fmpq]] = {}
        for shift, f, e in cof_terms:
            if e.cof is None or not e.cof.terms:
                continue
            d = grouped.setdefault(id(e), {})
            d[shift] = d.get(shift, fmpq(0)) + f
        emap = {id(e): e for e in basis}
        for eid, d in grouped.items():
            mult = MPoly(ring, {m: c for m, c in d.items() if c})
            total = total + mult * emap[eid].cof
        return out, total

    def _unit_elem(self) -> _Elem:
        for e in self.basis:
            if not any(e.lm):
                return e
        raise RuntimeError("unit ideal without constant element")

    def _make(self, p: MPoly, cof: Optional[MPoly]) -> _Elem:
        lm, lc = p.lead()
        return _Elem(p, lm, lc, cof)

    def _reduce_cof(self, cof: Optional[MPoly]) -> Optional[MPoly]:
        if cof is None or self.parent is None:
            return cof
        return self.parent.normal_form(cof)

    def _add(self, s: MPoly, track: bool):
        ring = self.ring
        self.gens.append(s)
        if self.unit:
            return
        cof0 = ring.one() if track else None
        h, hc = self.reduce(s, track=track) if track else (self.reduce(s)[0], None)
        if track:
            # s = sum q_g g + h  =>  h = s - sum q_g g, and g in old ideal has cof 0
            hc = self._reduce_cof(cof0 - hc)
        if not h.terms:
            return
        pending: List[_Elem] = [self._make(h, hc)]
        pairs: List[Tuple[tuple, int, int]] = []
        new_basis = self.basis
        # Buchberger on the enlarged basis: only pairs with new elements
        def push_pairs(j: int):
            ej = new_basis[j]
            for i in range(j):
                ei = new_basis[i]
                lcm = mono_lcm(ei.lm, ej.lm)
                if all(a + b == c for a, b, c in zip(ei.lm, ej.lm, lcm)):
                    continue  # coprime leading monomials
                heapq.heappush(pairs, (ring.mono_degree(lcm), i, j))

        steps = 0
        while pending or pairs:
            if pending:
                e = pending.pop()
                if not any(e.lm):
                    self._set_unit(e)
                    return
                new_basis.append(e)
                push_pairs(len(new_basis) - 1)
                continue
            _, i, j = heapq.heappop(pairs)
            ei, ej = new_basis[i], new_basis[j]
            if ei is None or ej is None:
                continue
            lcm = mono_lcm(ei.lm, ej.lm)
            # chain criterion (simple form)
            skip = False
            for k, ek in enumerate(new_basis):
                if ek is None or k == i or k == j:
                    continue
                if divides(ek.lm, lcm) and _pair_done(pairs, i, k, j):
                    skip = True
                    break
            if skip:
                continue
            steps += 1
            if steps > self.max_steps:
                raise ResourceLimit("Groebner step budget exceeded")
            si = mono_div(lcm, ei.lm)
            sj = mono_div(lcm, ej.lm)
            spoly = ei.poly.mul_term(si, fmpq(1) / ei.lc) - ej.poly.mul_term(sj, fmpq(1) / ej.lc)
            scof = None
            if track:
                zero = ring.zero()
                a = (ei.cof or zero).mul_term(si, fmpq(1) / ei.lc)
                b = (ej.cof or zero).mul_term(sj, fmpq(1) / ej.lc)
                scof = a - b
            if track:
                h, qc = self.reduce_with(spoly, True)
                hc = self._reduce_cof(scof - qc)
            else:
                h, hc = self.reduce_with(spoly, False)
            if h.terms:
                pending.append(self._make(h, hc))
        self._interreduce(track)

    def reduce_with(self, p: MPoly, track: bool):
        return self.reduce(p, track=track)

    def _set_unit(self, e: _Elem):
        ring = self.ring
        c = e.lc
        cof = e.cof * (fmpq(1) / c) if e.cof is not None else None
        self.basis = [_Elem(ring.one(), ring.zero_mono, fmpq(1), cof)]
        self.unit = True

    def _interreduce(self, track: bool):
        basis = [e for e in self.basis if e is not None]
        # drop elements whose leading monomial is divisible by another's
        keep: List[_Elem] = []
        basis.sort(key=lambda e: self.ring.key(e.lm), reverse=True)  # small first
        for e in basis:
            if any(divides(k.lm, e.lm) for k in keep):
                continue
            keep.append(e)
        # tail-reduce and make monic
        out: List[_Elem] = []
        for idx, e in enumerate(keep):
            others = GroebnerIdeal(self.ring, (), self.max_steps, self.max_terms)
            others.basis = [k for k in keep if k is not e]
            others.parent = self.parent
            if track:
                # elements of the previous ideal carry cofactor zero, but tail
                # reduction by new elements can give them a nonzero one
                r, qc = others.reduce(e.poly, track=True)
                base = e.cof if e.cof is not None else self.ring.zero()
                cof = self._reduce_cof(base - qc)
            else:
                r = others.reduce(e.poly)[0]
                cof = e.cof
            lm, lc = r.lead()
            inv = fmpq(1) / lc
            out.append(_Elem(r * inv, lm, fmpq(1), cof * inv if cof is not None else None))
        # reducing one element by the others can only change tails, so the
        # leading monomials are stable; rebuild sequentially for determinism
        out.sort(key=lambda e: self.ring.key(e.lm))
        self.basis = out

    # quotient-ring data ---------------------------------------------------------
    def is_zero_dimensional(self) -> bool:
        if self.unit:
            return True
        n = self.ring.nvars
        pure = [False] * n
        for lm in self.leading_monomials():
            nz = [i for i, e in enumerate(lm) if e]
            if len(nz) == 1:
                pure[nz[0]] = True
        return all(pure)

    def staircase(self, limit: int = 200_000) -> List[Mono]:
        """Standard monomials (finite quotient only), sorted by the order."""
        if self.unit:
            return []
        if not self.is_zero_dimensional():
            raise ValueError("quotient ring is infinite-dimensional")
        lms = self.leading_monomials()
        n = self.ring.nvars
        start = self.ring.zero_mono
        seen = {start}
        frontier = [start]
        while frontier:
            nxt = []
            for m in frontier:
                for i in range(n):
                    t = list(m)
                    t[i] += 1
                    t = tuple(t)
                    if t in seen or any(divides(l, t) for l in lms):
                        continue
                    seen.add(t)
                    nxt.append(t)
                    if len(seen) > limit:
                        raise ResourceLimit("staircase too large")
            frontier = nxt
        return sorted(seen, key=self.ring.key, reverse=True)

    def standard_monomials_of_degree(self, d: int, subset: Optional[Sequence[int]] = None) -> List[Mono]:
        """Standard monomials of total degree exactly d (any dimension).

        If ``subset`` is given, only those variables may appear.
        """
        ring = self.ring
        vars_ = list(range(ring.nvars)) if subset is None else list(subset)
        lms = self.leading_monomials() if not self.unit else [ring.zero_mono]
        out = []

        def rec(pos: int, remaining: int, cur: List[int]):
            if remaining == 0:
                t = tuple(cur)
                if not any(divides(l, t) for l in lms):
                    out.append(t)
                return
            if pos == len(vars_):
                return
            i = vars_[pos]
            w = ring.degrees[i]
            e = 0
            while e * w <= remaining:
                cur[i] = e
                t = tuple(cur)
                if e and any(divides(l, t) for l in lms):
                    break
                rec(pos + 1, remaining - e * w, cur)
                e += 1
            cur[i] = 0

        if d >= 0:
            rec(0, d, [0] * ring.nvars)
        return sorted(out, key=ring.key)

    def krull_dimension(self) -> int:
        """Dimension of the quotient, from the leading-monomial ideal."""
        if self.unit:
            return -1
        supports = []
        for lm in self.leading_monomials():
            supports.append(frozenset(i for i, e in enumerate(lm) if e))
        # minimal supports only
        supports = sorted(set(supports), key=len)
        minimal = []
        for s in supports:
            if not any(t <= s for t in minimal):
                minimal.append(s)
        forced_out = {next(iter(s)) for s in minimal if len(s) == 1}
        free = [i for i in range(self.ring.nvars) if i not in forced_out]
        # largest set of free variables containing no support set
        hyper = [s for s in minimal if len(s) > 1 and not (s & forced_out)]
        return _max_independent(free, hyper)

    def hilbert_series(self, grading: str = "total") -> LaurentPoly:
        ring = self.ring
        fn = ring.mono_degree if grading == "total" else ring.mono_qdegree
        out: Dict[int, int] = {}
        for m in self.staircase():
            d = fn(m)
            out[d] = out.get(d, 0) + 1
        return LaurentPoly(out)


def _pair_done(pairs, i, k, j) -> bool:
    """Chain-criterion helper: pairs (i,k) and (k,j) are no longer pending."""
    a, b = min(i, k), max(i, k)
    c, d = min(k, j), max(k, j)
    for _, x, y in pairs:
        if (x, y) == (a, b) or (x, y) == (c, d):
            return False
    return True


def _max_independent(free: List[int], hyper: List[frozenset]) -> int:
    if not hyper:
        return len(free)
    # branch on a variable of the smallest edge
    edge = min(hyper, key=len)
    best = -1
    for v in sorted(edge):
        nf = [x for x in free if x != v]
        nh = [s for s in hyper if v not in s]
        best = max(best, _max_independent(nf, nh))
        if best == len(free) - 1:
            break
    return best


def groebner(gens: Sequence[MPoly], ring: Optional[RingSpec] = None, **kw) -> GroebnerIdeal:
    if ring is None:
        if not gens:
            raise ValueError("ring required for an empty generator list")
        ring = gens[0].ring
    return GroebnerIdeal(ring, gens, **kw)


def normal_form(p: MPoly, ideal: GroebnerIdeal) -> MPoly:
    return ideal.normal_form(p)


def hilbert_series(ideal: GroebnerIdeal, grading: str = "total") -> LaurentPoly:
    return ideal.hilbert_series(grading)


def specialize(p: MPoly, assignments: Mapping[str, object]) -> MPoly:
    return p.specialize(assignments)
