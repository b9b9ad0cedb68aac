"""Laurent polynomials in q, quantum integers and binomials, Poincare series."""

from __future__ import annotations

import json
import re
from fractions import Fraction
from typing import Dict, Iterable, Mapping, Tuple


class LaurentPoly:
    """Exact Laurent polynomial in one variable q with rational coefficients."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Mapping[int, object] | None = None):
        c: Dict[int, Fraction] = {}
        if coeffs:
            for k, v in coeffs.items():
                v = Fraction(v)
                if v:
                    c[int(k)] = c.get(int(k), Fraction(0)) + v
                    if not c[int(k)]:
                        del c[int(k)]
        self.coeffs = c

    def is_zero(self) -> bool:
        return not self.coeffs

    @classmethod
    def const(cls, c) -> "LaurentPoly":
        return cls({0: c})

    @classmethod
    def monomial(cls, k: int, c=1) -> "LaurentPoly":
        return cls({k: c})

    def __add__(self, other):
        other = _coerce(other)
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, 0) + v
        return LaurentPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly({k: -v for k, v in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other):
        other = _coerce(other)
        out: Dict[int, Fraction] = {}
        for a, x in self.coeffs.items():
            for b, y in other.coeffs.items():
                out[a + b] = out.get(a + b, 0) + x * y
        return LaurentPoly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            if len(self.coeffs) != 1:
                raise ValueError("only monomials can be inverted")
            (k, v), = self.coeffs.items()
            return LaurentPoly({k * n: Fraction(1) / v ** (-n)})
        out = LaurentPoly.const(1)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        try:
            other = _coerce(other)
        except TypeError:
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(tuple(sorted(self.coeffs.items())))

    def __bool__(self):
        return bool(self.coeffs)

    def shift(self, s: int) -> "LaurentPoly":
        """Multiply by q^s."""
        return LaurentPoly({k + s: v for k, v in self.coeffs.items()})

    def bar(self) -> "LaurentPoly":
        """The involution q -> q^-1."""
        return LaurentPoly({-k: v for k, v in self.coeffs.items()})

    def divmod_exact(self, other: "LaurentPoly") -> "LaurentPoly":
        """Exact division; raises ValueError if other does not divide self."""
        if not other:
            raise ZeroDivisionError("division by zero Laurent polynomial")
        rem = LaurentPoly(self.coeffs)
        lo_d = min(other.coeffs)
        lead = other.coeffs[lo_d]
        quot: Dict[int, Fraction] = {}
        while rem:
            lo = min(rem.coeffs)
            c = rem.coeffs[lo] / lead
            quot[lo - lo_d] = c
            rem = rem - other.shift(lo - lo_d) * c
            if rem and max(rem.coeffs) < lo:
                break
            if len(quot) > 10000:
                raise ValueError("division does not terminate")
        if rem:
            raise ValueError("not divisible")
        return LaurentPoly(quot)

    def degree_range(self) -> Tuple[int, int]:
        if not self.coeffs:
            raise ValueError("zero polynomial has no degree")
        return min(self.coeffs), max(self.coeffs)

    def terms(self) -> Iterable[Tuple[int, Fraction]]:
        """Terms sorted by exponent, lowest first."""
        return sorted(self.coeffs.items())

    def __repr__(self):
        return f"LaurentPoly({self.to_text()!r})"

    def to_text(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for k, v in self.terms():
            if k == 0:
                mono = ""
            elif k == 1:
                mono = "q"
            else:
                mono = f"q^{k}"
            if mono and v == 1:
                s = mono
            elif mono and v == -1:
                s = "-" + mono
            elif mono:
                s = f"{v}*{mono}"
            else:
                s = str(v)
            parts.append(s)
        out = parts[0]
        for s in parts[1:]:
            out += " - " + s[1:] if s.startswith("-") else " + " + s
        return out

    def to_json(self) -> Dict[str, object]:
        return {f"q^{k}": _num_json(v) for k, v in self.terms()}

    @classmethod
    def from_json(cls, data: Mapping[str, object]) -> "LaurentPoly":
        out = {}
        for key, v in data.items():
            m = re.fullmatch(r"q\^(-?\d+)", key)
            if not m:
                raise ValueError(f"bad Laurent key {key!r}")
            out[int(m.group(1))] = Fraction(v)
        return cls(out)


def _num_json(v: Fraction):
    return int(v) if v.denominator == 1 else str(v)


def _coerce(x) -> LaurentPoly:
    if isinstance(x, LaurentPoly):
        return x
    if isinstance(x, (int, Fraction)):
        return LaurentPoly.const(x)
    raise TypeError(f"cannot coerce {type(x).__name__} to LaurentPoly")


q = LaurentPoly.monomial(1)


def qint(n: int) -> LaurentPoly:
    """Balanced quantum integer [n] = q^(n-1) + q^(n-3) + ... + q^(1-n)."""
    if n < 0:
        raise ValueError("qint needs n >= 0")
    return LaurentPoly({n - 1 - 2 * i: 1 for i in range(n)})


def qfactorial(n: int) -> LaurentPoly:
    out = LaurentPoly.const(1)
    for i in range(1, n + 1):
        out = out * qint(i)
    return out


def qbinom(n: int, m: int) -> LaurentPoly:
    """Balanced quantum binomial; zero when m < 0 or m > n."""
    if n < 0:
        raise ValueError("qbinom needs n >= 0")
    if m < 0 or m > n:
        return LaurentPoly()
    # q-Pascal: [n,m] = q^{-m}[n-1,m-1]... computed via the recursion
    # [n, m] = q^m [n-1, m] + q^{m-n} [n-1, m-1]
    row = [LaurentPoly.const(1)]
    for r in range(1, n + 1):
        new = []
        for k in range(r + 1):
            left = row[k] if k < r else LaurentPoly()
            right = row[k - 1] if k >= 1 else LaurentPoly()
            new.append(left.shift(k) + right.shift(k - r))
        row = new
    return row[m]


def evaluate_at_one(p: LaurentPoly) -> Fraction:
    return sum(p.coeffs.values(), Fraction(0))


class Poincare:
    """Finite map (q exponent, t exponent, z2) -> nonnegative dimension."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Mapping[Tuple[int, int, int], int] | None = None):
        c: Dict[Tuple[int, int, int], int] = {}
        for (qe, te, z), v in (coeffs or {}).items():
            v = int(v)
            if v < 0:
                raise ValueError("dimensions must be nonnegative")
            if v:
                key = (int(qe), int(te), int(z) % 2)
                c[key] = c.get(key, 0) + v
        self.coeffs = c

    def __eq__(self, other):
        if not isinstance(other, Poincare):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(tuple(sorted(self.coeffs.items())))

    def __add__(self, other: "Poincare") -> "Poincare":
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, 0) + v
        return Poincare(out)

    def __mul__(self, other: "Poincare") -> "Poincare":
        out: Dict[Tuple[int, int, int], int] = {}
        for (a, b, c), x in self.coeffs.items():
            for (d, e, f), y in other.coeffs.items():
                k = (a + d, b + e, (c + f) % 2)
                out[k] = out.get(k, 0) + x * y
        return Poincare(out)

    def shift(self, q_shift: int = 0, t_shift: int = 0, z2_shift: int = 0) -> "Poincare":
        return Poincare({(a + q_shift, b + t_shift, c + z2_shift): v
                         for (a, b, c), v in self.coeffs.items()})

    def total_dim(self) -> int:
        return sum(self.coeffs.values())

    def z2_support(self) -> set:
        return {z for (_, _, z) in self.coeffs}

    def q_part(self) -> LaurentPoly:
        """Forget t and z2."""
        out: Dict[int, int] = {}
        for (a, _, _), v in self.coeffs.items():
            out[a] = out.get(a, 0) + v
        return LaurentPoly(out)

    def at_t(self, t_value: int) -> LaurentPoly:
        """Specialize t to an integer (t = -1 gives the Euler characteristic)."""
        out: Dict[int, Fraction] = {}
        for (a, b, _), v in self.coeffs.items():
            out[a] = out.get(a, 0) + Fraction(t_value) ** b * v
        return LaurentPoly(out)

    def terms(self):
        return sorted(self.coeffs.items(), key=lambda kv: (kv[0][1], kv[0][0], kv[0][2]))

    def to_text(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for (a, b, c), v in self.terms():
            mono = []
            if b:
                mono.append("t" if b == 1 else f"t^{b}")
            if a:
                mono.append("q" if a == 1 else f"q^{a}")
            if c:
                mono.append("z")
            if not mono:
                parts.append(str(v))
                continue
            body = "*".join(mono)
            parts.append(body if v == 1 else f"{v}*{body}")
        return " + ".join(parts)

    def __repr__(self):
        return f"Poincare({self.to_text()!r})"

    def to_json(self) -> Dict[str, int]:
        return {f"q^{a} t^{b} z^{c}": v for (a, b, c), v in self.terms()}

    @classmethod
    def from_json(cls, data: Mapping[str, int]) -> "Poincare":
        out = {}
        for key, v in data.items():
            m = re.fullmatch(r"q\^(-?\d+) t\^(-?\d+) z\^([01])", key)
            if not m:
                raise ValueError(f"bad Poincare key {key!r}")
            out[(int(m.group(1)), int(m.group(2)), int(m.group(3)))] = int(v)
        return cls(out)


def dumps(obj) -> str:
    """Deterministic JSON for LaurentPoly / Poincare values."""
    return json.dumps(obj.to_json(), sort_keys=False)
