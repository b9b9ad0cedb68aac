"""Sympy-side reference computations for symmetric functions.

Polynomials from the package are converted to sympy expressions in the
letters of each alphabet, and the reference values are built directly from
letters (generating series, bialternant Schur polynomials).
"""

from itertools import combinations

import sympy as sp


def letters(name: str, size: int):
    return sp.symbols(f"{name}_1:{size + 1}") if size else ()


def elementary(k: int, xs) -> sp.Expr:
    if k < 0 or k > len(xs):
        return sp.Integer(0)
    return sp.Add(*[sp.Mul(*c) for c in combinations(xs, k)]) if k else sp.Integer(1)


def to_letters(p, sizes: dict) -> sp.Expr:
    """MPoly in elementary coordinates -> expression in letters.

    ``sizes`` maps alphabet name to size; variables named B<k> are kept as
    sympy symbols B<k>.
    """
    images = {}
    for name in p.ring.names:
        head, idx = name.rstrip("0123456789"), int(name[len(name.rstrip("0123456789")):])
        if head in sizes:
            images[name] = elementary(idx, letters(head, sizes[head]))
        else:
            images[name] = sp.Symbol(name)
    out = sp.Integer(0)
    for mono, c in p.terms.items():
        term = sp.Rational(int(c.p), int(c.q))
        for name, e in zip(p.ring.names, mono):
            if e:
                term *= images[name] ** e
        out += term
    return sp.expand(out)


def to_sympy(p) -> sp.Expr:
    """MPoly -> sympy expression in its own variable names."""
    out = sp.Integer(0)
    for mono, c in p.terms.items():
        term = sp.Rational(int(c.p), int(c.q))
        for name, e in zip(p.ring.names, mono):
            if e:
                term *= sp.Symbol(name) ** e
        out += term
    return sp.expand(out)


def complete_difference(k: int, xs, ys) -> sp.Expr:
    """h_k(X - Y): coefficient of t^k in prod(1 - y t) / prod(1 - x t)."""
    if k < 0:
        return sp.Integer(0)
    t = sp.Symbol("t")
    series = sp.Integer(1)
    for y in ys:
        series *= 1 - y * t
    for x in xs:
        series *= sum((x * t) ** i for i in range(k + 1))
    return sp.expand(sp.expand(series).coeff(t, k))


def schur_bialternant(lam, xs) -> sp.Expr:
    """s_lam(x_1..x_n) = det(x_i^(lam_j + n - j)) / Vandermonde."""
    n = len(xs)
    lam = list(lam) + [0] * (n - len(lam))
    if len(lam) > n:
        return sp.Integer(0)
    num = sp.Matrix(n, n, lambda i, j: xs[i] ** (lam[j] + n - 1 - j)).det()
    den = sp.Matrix(n, n, lambda i, j: xs[i] ** (n - 1 - j)).det()
    return sp.expand(sp.cancel(num / den))


def power_sum(k: int, xs) -> sp.Expr:
    return sp.Add(*[x ** k for x in xs])
