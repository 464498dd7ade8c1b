"""Sparse multivariate polynomials over Z/p^e.

A polynomial is a dict from exponent tuples to nonzero residues. Values are
immutable after construction; every operation returns a new object.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Mapping, Sequence

from sympy import isprime

Exps = tuple[int, ...]

_PACK_BITS = 32
_PACK_MASK = (1 << _PACK_BITS) - 1


class PolyError(ValueError):
    """Raised for modulus/arity mismatches and malformed input."""


@dataclass(frozen=True)
class Modulus:
    p: int
    e: int = 1

    def __post_init__(self) -> None:
        if not (2 <= self.p <= 2**31) or not isprime(self.p):
            raise PolyError(f"p={self.p} is not a prime in [2, 2^31]")
        if self.e < 1:
            raise PolyError(f"precision exponent must be >= 1, got {self.e}")

    @cached_property
    def q(self) -> int:
        return self.p**self.e


@dataclass(frozen=True)
class PolyRing:
    """Z/p^e[x_1, ..., x_N] with named variables."""

    names: tuple[str, ...]
    modulus: Modulus

    def __post_init__(self) -> None:
        if len(set(self.names)) != len(self.names):
            raise PolyError(f"duplicate variable names in {self.names}")
        for n in self.names:
            if not _IDENT.fullmatch(n):
                raise PolyError(f"bad variable name {n!r}")

    @classmethod
    def make(cls, names: str | Sequence[str], p: int, e: int = 1) -> "PolyRing":
        if isinstance(names, str):
            names = names.replace(",", " ").split()
        return cls(tuple(names), Modulus(p, e))

    @property
    def p(self) -> int:
        return self.modulus.p

    @property
    def nvars(self) -> int:
        return len(self.names)

    def with_precision(self, e: int) -> "PolyRing":
        return PolyRing(self.names, Modulus(self.modulus.p, e))

    def zero(self) -> "SparsePoly":
        return SparsePoly(self, {})

    def one(self) -> "SparsePoly":
        return self.const(1)

    def const(self, c: int) -> "SparsePoly":
        return SparsePoly(self, {(0,) * self.nvars: c})

    def monomial(self, exps: Sequence[int], c: int = 1) -> "SparsePoly":
        exps = tuple(exps)
        if len(exps) != self.nvars:
            raise PolyError(f"exponent vector {exps} has wrong length")
        return SparsePoly(self, {exps: c})

    def var(self, name: str | int) -> "SparsePoly":
        i = self.names.index(name) if isinstance(name, str) else name
        exps = [0] * self.nvars
        exps[i] = 1
        return self.monomial(exps)

    def gens(self) -> list["SparsePoly"]:
        return [self.var(i) for i in range(self.nvars)]

    def parse(self, text: str) -> "SparsePoly":
        return parse_poly(text, self)


def glex_key(exps: Exps) -> tuple[int, Exps]:
    return (sum(exps), exps)


class SparsePoly:
    """Polynomial over ``ring`` stored as {exponent tuple: residue mod p^e}."""

    __slots__ = ("ring", "terms", "_hash")

    def __init__(self, ring: PolyRing, terms: Mapping[Exps, int], *, _clean: bool = False):
        self.ring = ring
        if _clean:
            self.terms = terms
        else:
            q = ring.modulus.q
            n = ring.nvars
            clean: dict[Exps, int] = {}
            for k, c in terms.items():
                if len(k) != n:
                    raise PolyError(f"exponent vector {k} has wrong length for {n} variables")
                c %= q
                if c:
                    clean[k] = c
            self.terms = clean
        self._hash = None

    # -- basic protocol -------------------------------------------------

    def __len__(self) -> int:
        return len(self.terms)

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, int):
            return self == self.ring.const(other)
        if not isinstance(other, SparsePoly):
            return NotImplemented
        return self.ring == other.ring and self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.ring, frozenset(self.terms.items())))
        return self._hash

    def __repr__(self) -> str:
        return f"SparsePoly({serialize(self)!r}, p={self.ring.p}, e={self.ring.modulus.e})"

    def __str__(self) -> str:
        return serialize(self)

    def sorted_terms(self) -> list[tuple[Exps, int]]:
        """Terms in descending graded-lex order."""
        return sorted(self.terms.items(), key=lambda t: glex_key(t[0]), reverse=True)

    def __iter__(self) -> Iterator[tuple[Exps, int]]:
        return iter(self.sorted_terms())

    @property
    def p(self) -> int:
        return self.ring.p

    def is_zero(self) -> bool:
        return not self.terms

    def total_degree(self) -> int:
        return max((sum(k) for k in self.terms), default=-1)

    def min_total_degree(self) -> int:
        return min((sum(k) for k in self.terms), default=-1)

    # -- arithmetic -----------------------------------------------------

    def _check(self, other: "SparsePoly") -> None:
        if self.ring.modulus != other.ring.modulus:
            raise PolyError(f"modulus mismatch: {self.ring.modulus} vs {other.ring.modulus}")
        if self.ring.nvars != other.ring.nvars:
            raise PolyError(f"arity mismatch: {self.ring.nvars} vs {other.ring.nvars}")

    def _coerce(self, other: object) -> "SparsePoly":
        if isinstance(other, SparsePoly):
            self._check(other)
            return other
        if isinstance(other, int):
            return self.ring.const(other)
        raise TypeError(f"cannot combine SparsePoly with {type(other).__name__}")

    def __add__(self, other: object) -> "SparsePoly":
        other = self._coerce(other)
        q = self.ring.modulus.q
        out = dict(self.terms)
        for k, c in other.terms.items():
            v = (out.get(k, 0) + c) % q
            if v:
                out[k] = v
            else:
                out.pop(k, None)
        return SparsePoly(self.ring, out, _clean=True)

    __radd__ = __add__

    def __neg__(self) -> "SparsePoly":
        q = self.ring.modulus.q
        return SparsePoly(self.ring, {k: q - c for k, c in self.terms.items()}, _clean=True)

    def __sub__(self, other: object) -> "SparsePoly":
        return self + (-self._coerce(other))

    def __rsub__(self, other: object) -> "SparsePoly":
        return self._coerce(other) - self

    def scale(self, c: int) -> "SparsePoly":
        q = self.ring.modulus.q
        c %= q
        if c == 0:
            return self.ring.zero()
        out = {}
        for k, v in self.terms.items():
            w = v * c % q
            if w:
                out[k] = w
        return SparsePoly(self.ring, out, _clean=True)

    def __mul__(self, other: object) -> "SparsePoly":
        if isinstance(other, int):
            return self.scale(other)
        other = self._coerce(other)
        return SparsePoly(self.ring, _mul_terms(self.terms, other.terms, self.ring.modulus.q, self.ring.nvars), _clean=True)

    __rmul__ = __mul__

    def mul_truncated(self, other: "SparsePoly", q_bracket: int) -> "SparsePoly":
        """Product modulo the monomial ideal m^[q_bracket] (drops terms with an exponent >= q_bracket)."""
        self._check(other)
        terms = _mul_terms(self.terms, other.terms, self.ring.modulus.q, self.ring.nvars, bound=q_bracket)
        return SparsePoly(self.ring, terms, _clean=True)

    def mul_monomial(self, exps: Exps, c: int = 1) -> "SparsePoly":
        q = self.ring.modulus.q
        out = {}
        for k, v in self.terms.items():
            w = v * c % q
            if w:
                out[tuple(a + b for a, b in zip(k, exps))] = w
        return SparsePoly(self.ring, out, _clean=True)

    def __pow__(self, k: int) -> "SparsePoly":
        return power(self, k)

    def frobenius(self, times: int = 1) -> "SparsePoly":
        """Termwise p^times-th power: exponents scaled, coefficients raised (identity on F_p)."""
        s = self.ring.p**times
        q = self.ring.modulus.q
        if self.ring.modulus.e == 1:
            return SparsePoly(self.ring, {tuple(a * s for a in k): c for k, c in self.terms.items()}, _clean=True)
        return SparsePoly(self.ring, {tuple(a * s for a in k): pow(c, s, q) for k, c in self.terms.items()})

    def truncate_bracket(self, q_bracket: int) -> "SparsePoly":
        """Reduction modulo m^[q_bracket]."""
        return SparsePoly(
            self.ring, {k: c for k, c in self.terms.items() if max(k, default=0) < q_bracket}, _clean=True
        )

    def in_bracket_power(self, q_bracket: int) -> bool:
        """Membership in m^[q_bracket] = (x_1^q, ..., x_N^q): every term has an exponent >= q."""
        return all(max(k, default=0) >= q_bracket for k in self.terms)

    def constant_term(self) -> int:
        return self.terms.get((0,) * self.ring.nvars, 0)

    def coefficient(self, exps: Sequence[int]) -> int:
        return self.terms.get(tuple(exps), 0)


def _pack(k: Exps) -> int:
    out = 0
    for a in reversed(k):
        out = (out << _PACK_BITS) | a
    return out


def _unpack(v: int, n: int) -> Exps:
    out = []
    for _ in range(n):
        out.append(v & _PACK_MASK)
        v >>= _PACK_BITS
    return tuple(out)


def _mul_terms(a: Mapping[Exps, int], b: Mapping[Exps, int], q: int, n: int, bound: int | None = None) -> dict[Exps, int]:
    if not a or not b:
        return {}
    if len(a) < len(b):
        a, b = b, a
    pa = [(_pack(k), c) for k, c in a.items()]
    pb = [(_pack(k), c) for k, c in b.items()]
    acc: dict[int, int] = {}
    get = acc.get
    for kb, cb in pb:
        for ka, ca in pa:
            s = ka + kb
            acc[s] = get(s, 0) + ca * cb
    out: dict[Exps, int] = {}
    for s, c in acc.items():
        c %= q
        if c:
            k = _unpack(s, n)
            if bound is not None and max(k, default=0) >= bound:
                continue
            out[k] = c
    return out


def power(a: SparsePoly, k: int, bracket: int | None = None) -> SparsePoly:
    """a**k; over F_p uses base-p digits so that p-th powers are exponent scalings.

    With ``bracket`` set, the result is reduced modulo m^[bracket] along the way.
    """
    if k < 0:
        raise PolyError("negative exponent")
    ring = a.ring
    if k == 0:
        return ring.one()
    if ring.modulus.e == 1:
        p = ring.p
        result = ring.one()
        scale = 0
        while k:
            k, d = divmod(k, p)
            if d:
                part = _binary_pow(a, d, bracket).frobenius(scale) if scale else _binary_pow(a, d, bracket)
                if bracket is not None:
                    part = part.truncate_bracket(bracket)
                result = result.mul_truncated(part, bracket) if bracket is not None else result * part
            scale += 1
        return result
    return _binary_pow(a, k, bracket)


def _binary_pow(a: SparsePoly, k: int, bracket: int | None) -> SparsePoly:
    mul = (lambda x, y: x.mul_truncated(y, bracket)) if bracket is not None else (lambda x, y: x * y)
    result = a.ring.one()
    base = a
    while k:
        if k & 1:
            result = mul(result, base)
        k >>= 1
        if k:
            base = mul(base, base)
    return result


# -- gradings ------------------------------------------------------------


INHOMOGENEOUS = "inhomogeneous"


@dataclass(frozen=True)
class Grading:
    """Per-variable weight vectors in Z_{>=0}^m, each nonzero."""

    weights: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        if not self.weights:
            raise PolyError("grading needs at least one variable")
        m = len(self.weights[0])
        for w in self.weights:
            if len(w) != m or m == 0:
                raise PolyError("all weight vectors must have the same positive length")
            if any(x < 0 for x in w) or not any(w):
                raise PolyError(f"weight {w} must be nonnegative and nonzero")

    @classmethod
    def standard(cls, n: int) -> "Grading":
        return cls(tuple((1,) for _ in range(n)))

    @classmethod
    def from_weights(cls, weights: Sequence[int | Sequence[int]]) -> "Grading":
        return cls(tuple((w,) if isinstance(w, int) else tuple(w) for w in weights))

    @property
    def m(self) -> int:
        return len(self.weights[0])

    @property
    def nvars(self) -> int:
        return len(self.weights)

    @cached_property
    def mu(self) -> tuple[int, ...]:
        return tuple(sum(col) for col in zip(*self.weights))

    @cached_property
    def scalar_weights(self) -> tuple[int, ...]:
        return tuple(sum(w) for w in self.weights)

    def kind(self) -> str:
        if self.m > 1:
            return "multigraded"
        return "standard" if all(w == (1,) for w in self.weights) else "weighted"

    def monomial_degree(self, exps: Sequence[int]) -> tuple[int, ...]:
        m = self.m
        out = [0] * m
        for a, w in zip(exps, self.weights):
            if a:
                for j in range(m):
                    out[j] += a * w[j]
        return tuple(out)

    def degree(self, a: SparsePoly) -> tuple[int, ...] | str | None:
        """Common degree vector; None for the zero polynomial; INHOMOGENEOUS otherwise."""
        if a.ring.nvars != self.nvars:
            raise PolyError("grading arity does not match the polynomial ring")
        degs = {self.monomial_degree(k) for k in a.terms}
        if not degs:
            return None
        if len(degs) > 1:
            return INHOMOGENEOUS
        return degs.pop()

    def is_homogeneous(self, a: SparsePoly) -> bool:
        return self.degree(a) != INHOMOGENEOUS


def degree(a: SparsePoly, g: Grading) -> tuple[int, ...] | str | None:
    return g.degree(a)


def bracket_power_ideal_gens(gens: Iterable[SparsePoly], q: int) -> list[SparsePoly]:
    gens = list(gens)
    if gens:
        p = gens[0].ring.p
        t = q
        while t > 1 and t % p == 0:
            t //= p
        if t != 1 or q < 1:
            raise PolyError(f"{q} is not a power of p={p}")
    return [power(g, q) for g in gens]


def reduce_mod_p(a: SparsePoly) -> SparsePoly:
    ring = a.ring.with_precision(1)
    return SparsePoly(ring, a.terms)


def lift_terms(a: SparsePoly, e: int) -> SparsePoly:
    """Canonical lift of an F_p polynomial to Z/p^e (coefficients in 0..p-1)."""
    if a.ring.modulus.e != 1:
        raise PolyError("lift_terms expects a polynomial over F_p")
    return SparsePoly(a.ring.with_precision(e), dict(a.terms), _clean=True)


def in_monomial_bracket(a: SparsePoly, q: int) -> bool:
    return a.in_bracket_power(q)


# -- text grammar ---------------------------------------------------------

_IDENT = re.compile(r"[a-zA-Z][a-zA-Z0-9_]*")
_TOKEN = re.compile(r"\s*(?:(?P<int>\d+)|(?P<id>[a-zA-Z][a-zA-Z0-9_]*)|(?P<op>[-+*^()]))")


class ParseError(PolyError):
    def __init__(self, msg: str, text: str, pos: int):
        super().__init__(f"{msg} at position {pos}: {text[:pos]}<<HERE>>{text[pos:]}")
        self.pos = pos


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    out = []
    pos = 0
    n = len(text)
    while pos < n:
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError("unexpected character", text, pos)
        kind = m.lastgroup
        start = m.start(kind)
        out.append((kind, m.group(kind), start))
        pos = m.end()
    return out


def _split_juxtaposed(name: str, index: Mapping[str, int]) -> list[str] | None:
    """Read an undeclared identifier such as ``yw`` as a product of declared names."""
    best: dict[int, list[str]] = {0: []}
    for start in range(len(name)):
        if start not in best:
            continue
        for end in range(len(name), start, -1):
            piece = name[start:end]
            if piece in index and end not in best:
                best[end] = best[start] + [piece]
    return best.get(len(name))


def parse_poly(text: str, ring: PolyRing) -> SparsePoly:
    """Parse ``poly := term (('+'|'-') term)*`` with ``term := coeff? mono?``.

    Monomials are ``var('^'int)?`` factors separated by optional ``*``. An
    undeclared identifier that splits into declared names (``yw`` with y, w
    declared) is read as their product, the exponent binding to the last
    name. Anything else undeclared is an error; coefficients are reduced mod p^e.
    """
    toks = _tokenize(text)
    index = {n: i for i, n in enumerate(ring.names)}
    q = ring.modulus.q
    out: dict[Exps, int] = {}
    i = 0
    sign = 1
    if not toks:
        raise ParseError("empty polynomial", text, 0)
    if toks[0][1] in "+-" and toks[0][0] == "op":
        sign = -1 if toks[0][1] == "-" else 1
        i = 1
    while True:
        coeff = 1
        exps = [0] * ring.nvars
        seen_any = False
        if i < len(toks) and toks[i][0] == "int":
            coeff = int(toks[i][1])
            seen_any = True
            i += 1
            if i < len(toks) and toks[i][1] == "*" and i + 1 < len(toks) and toks[i + 1][0] == "id":
                i += 1
        while i < len(toks) and toks[i][0] == "id":
            name, pos = toks[i][1], toks[i][2]
            parts = [name] if name in index else _split_juxtaposed(name, index)
            if parts is None:
                raise ParseError(f"undeclared variable {name!r}", text, pos)
            i += 1
            e = 1
            if i < len(toks) and toks[i][1] == "^":
                if i + 1 >= len(toks) or toks[i + 1][0] != "int":
                    raise ParseError("expected integer exponent", text, toks[i][2] + 1)
                e = int(toks[i + 1][1])
                i += 2
            for part in parts[:-1]:
                exps[index[part]] += 1
            exps[index[parts[-1]]] += e
            seen_any = True
            if i < len(toks) and toks[i][1] == "*":
                if i + 1 >= len(toks) or toks[i + 1][0] != "id":
                    raise ParseError("expected variable after '*'", text, toks[i][2] + 1)
                i += 1
        if not seen_any:
            pos = toks[i][2] if i < len(toks) else len(text)
            raise ParseError("expected a term", text, pos)
        key = tuple(exps)
        out[key] = (out.get(key, 0) + sign * coeff) % q
        if i == len(toks):
            break
        kind, val, pos = toks[i]
        if val not in "+-" or kind != "op":
            raise ParseError(f"unexpected token {val!r}", text, pos)
        sign = -1 if val == "-" else 1
        i += 1
        if i == len(toks):
            raise ParseError("dangling operator", text, len(text))
    return SparsePoly(ring, out)


def serialize(a: SparsePoly) -> str:
    """Canonical text: descending graded-lex, explicit '*' and '^'."""
    if not a.terms:
        return "0"
    names = a.ring.names
    parts = []
    for k, c in a.sorted_terms():
        factors = []
        for name, e in zip(names, k):
            if e == 1:
                factors.append(name)
            elif e > 1:
                factors.append(f"{name}^{e}")
        if not factors:
            parts.append(str(c))
        elif c == 1:
            parts.append("*".join(factors))
        else:
            parts.append(f"{c}*" + "*".join(factors))
    return " + ".join(parts)
