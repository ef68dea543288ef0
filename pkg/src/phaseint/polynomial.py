"""Sparse Laurent polynomials in named symbols and their conjugates.

A monomial is a sorted tuple of ``((name, conjugated), exponent)`` pairs.
Coefficients are ordinary Python numbers; integer arithmetic stays exact, so
identities such as det = 1 can be checked by term-map equality.
"""

from __future__ import annotations

from typing import Mapping, Union

Number = Union[int, float, complex]
Var = tuple  # (name, conjugated)
Monomial = tuple  # tuple of (Var, exponent), sorted, nonzero exponents


def _mono_mul(m1: Monomial, m2: Monomial) -> Monomial:
    exps = dict(m1)
    for v, e in m2:
        exps[v] = exps.get(v, 0) + e
    return tuple(sorted((v, e) for v, e in exps.items() if e != 0))


def _conj_number(c):
    return c.conjugate() if isinstance(c, complex) else c


def _tidy(c):
    if isinstance(c, complex) and c.imag == 0:
        r = c.real
        return int(r) if r.is_integer() and abs(r) < 2 ** 53 else r
    if isinstance(c, float) and c.is_integer() and abs(c) < 2 ** 53:
        return int(c)
    return c


class StokesPolynomial:
    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Monomial, Number] | None = None):
        clean = {}
        for mono, c in (terms or {}).items():
            if c != 0:
                clean[tuple(sorted(mono))] = _tidy(c)
        self.terms: dict[Monomial, Number] = clean

    # constructors

    @classmethod
    def constant(cls, c: Number) -> "StokesPolynomial":
        return cls({(): c})

    @classmethod
    def symbol(cls, name: str, conj: bool = False, power: int = 1) -> "StokesPolynomial":
        return cls({(((name, conj), power),): 1})

    @classmethod
    def coerce(cls, x) -> "StokesPolynomial":
        if isinstance(x, StokesPolynomial):
            return x
        if isinstance(x, str):
            return cls.symbol(x)
        return cls.constant(x)

    # ring operations

    def __add__(self, other):
        other = StokesPolynomial.coerce(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return StokesPolynomial(out)

    __radd__ = __add__

    def __neg__(self):
        return StokesPolynomial({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-StokesPolynomial.coerce(other))

    def __rsub__(self, other):
        return StokesPolynomial.coerce(other) - self

    def __mul__(self, other):
        other = StokesPolynomial.coerce(other)
        out: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _mono_mul(m1, m2)
                out[m] = out.get(m, 0) + c1 * c2
        return StokesPolynomial(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = StokesPolynomial.constant(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def inverse(self) -> "StokesPolynomial":
        """Inverse of a single monomial term."""
        if len(self.terms) != 1:
            raise ZeroDivisionError("only monomials are invertible")
        (m, c), = self.terms.items()
        inv_c = 1 / c
        if isinstance(c, int) and c in (1, -1):
            inv_c = c
        return StokesPolynomial({tuple((v, -e) for v, e in m): inv_c})

    def __truediv__(self, other):
        return self * StokesPolynomial.coerce(other).inverse()

    def conjugate(self) -> "StokesPolynomial":
        return StokesPolynomial({
            tuple(sorted(((name, not cj), e) for (name, cj), e in m)): _conj_number(c)
            for m, c in self.terms.items()
        })

    # comparison

    def __eq__(self, other):
        if not isinstance(other, StokesPolynomial):
            try:
                other = StokesPolynomial.coerce(other)
            except TypeError:
                return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(m == () for m in self.terms)

    def constant_term(self) -> Number:
        return self.terms.get((), 0)

    def coefficient(self, *factors) -> Number:
        """Coefficient of the monomial built from symbol names / (name, conj) pairs."""
        mono = StokesPolynomial.constant(1)
        for f in factors:
            mono = mono * (StokesPolynomial.symbol(f) if isinstance(f, str)
                           else StokesPolynomial.symbol(*f))
        (m,) = mono.terms
        return self.terms.get(m, 0)

    def close_to(self, other, tol: float = 1e-12) -> bool:
        diff = self - StokesPolynomial.coerce(other)
        return all(abs(c) <= tol for c in diff.terms.values())

    def symbols(self) -> set:
        return {v for m in self.terms for v, _ in m}

    # substitution

    def substitute(self, values: Mapping) -> "StokesPolynomial":
        """Replace symbols by numbers or polynomials.

        Keys are names (the conjugated symbol then receives the conjugate
        value) or explicit ``(name, conj)`` pairs.
        """
        table = {}
        for key, val in values.items():
            if isinstance(key, tuple):
                table[key] = StokesPolynomial.coerce(val)
            else:
                v = StokesPolynomial.coerce(val)
                table.setdefault((key, False), v)
                table.setdefault((key, True), v.conjugate())
        out = StokesPolynomial()
        for m, c in self.terms.items():
            term = StokesPolynomial.constant(c)
            for var, e in m:
                if var in table:
                    term = term * table[var] ** e
                else:
                    term = term * StokesPolynomial({((var, e),): 1})
            out = out + term
        return out

    def evaluate(self, values: Mapping) -> complex:
        res = self.substitute(values)
        if not res.is_constant():
            missing = sorted({name for name, _ in res.symbols()})
            raise KeyError(f"unassigned symbols: {missing}")
        return complex(res.constant_term())

    # display

    def __repr__(self):
        return f"StokesPolynomial({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for m, c in sorted(self.terms.items(), key=lambda kv: (len(kv[0]), str(kv[0]))):
            factors = []
            for (name, cj), e in m:
                sym = name + ("*" if cj else "")
                factors.append(sym if e == 1 else f"{sym}^{e}")
            mono = "·".join(factors)
            if not mono:
                parts.append(f"{c}")
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append(f"-{mono}")
            else:
                parts.append(f"({c})·{mono}")
        return " + ".join(parts)

    def to_json(self) -> list:
        out = []
        for m, c in sorted(self.terms.items(), key=lambda kv: str(kv[0])):
            cc = complex(c)
            out.append({
                "monomial": [[name, cj, e] for (name, cj), e in m],
                "c": [cc.real, cc.imag],
            })
        return out
