"""The bigraded algebra Z/2[x0, x1, ...] of dual Brown-Gitler modules, and
the one-variable modules built from Z/2[t].

``x_k`` has degree 1 and weight ``2**k``.  The weight-``n`` part is J(n).
A monomial is a tuple of exponents ``(e0, e1, ...)`` with no trailing zeros;
a polynomial is a frozenset of monomials (coefficients are in F2, so adding a
monomial twice cancels it).

The Steenrod action is fixed by instability, the Cartan formula and
``Sq^1 x_{k+1} = x_k^2``, ``Sq^1 x_0 = 0``.  The total square of ``x_k`` is
therefore ``x_k + x_{k-1}^2`` and of a power::

    Sq^j (x_k^e) = binom(e, j) x_k^(e-j) x_{k-1}^(2j)

No ``Sq^|x| x = x^2`` rule is imposed (``Sq^1 x_0 = 0``).
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator

from .f2core import binom_mod2

Monomial = tuple[int, ...]
ONE: Monomial = ()


def _trim(exps) -> Monomial:
    exps = list(exps)
    while exps and exps[-1] == 0:
        exps.pop()
    return tuple(exps)


def monomial(exps: Iterable[int] | dict[int, int]) -> Monomial:
    """Build a monomial from an exponent sequence or ``{k: e_k}``."""
    if isinstance(exps, dict):
        top = max(exps, default=-1)
        exps = [exps.get(k, 0) for k in range(top + 1)]
    exps = list(exps)
    if any(e < 0 for e in exps):
        raise ValueError("negative exponent")
    return _trim(exps)


def degree(mono: Monomial) -> int:
    return sum(mono)


def weight(mono: Monomial) -> int:
    return sum(e << k for k, e in enumerate(mono))


def mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for k, e in enumerate(b):
        out[k] += e
    return tuple(out)


def x_of(n: int) -> Monomial:
    """The bottom class x(n): one x_k for every set bit 2**k of n."""
    if n < 0:
        raise ValueError("x_of needs n >= 0")
    return _trim((n >> k) & 1 for k in range(n.bit_length()))


def mono_key(mono: Monomial, width: int = 0) -> tuple:
    """Sort key: degree first, then exponents read from x0 upward."""
    width = max(width, len(mono))
    return (degree(mono), tuple(mono) + (0,) * (width - len(mono)))


def weight_basis(n: int) -> list[Monomial]:
    """All monomials of weight ``n`` (binary partitions of ``n``) in canonical order."""
    out: list[Monomial] = []

    def rec(rest: int, k: int, tail: tuple[int, ...]):
        # choose e_k for k descending; tail holds e_{k+1}, ...
        if k < 0:
            if rest == 0:
                out.append(_trim(tail))
            return
        for e in range(rest >> k, -1, -1):
            rec(rest - (e << k), k - 1, (e,) + tail)

    top = max(n.bit_length() - 1, 0)
    rec(n, top, ())
    width = top + 1
    out.sort(key=lambda m: mono_key(m, width))
    return out


# --------------------------------------------------------------------------
# polynomials
# --------------------------------------------------------------------------

class Polynomial:
    """F2-linear combination of monomials."""

    __slots__ = ("terms",)

    def __init__(self, terms: Iterable[Monomial] = ()):
        acc: set[Monomial] = set()
        for t in terms:
            t = _trim(t)
            if t in acc:
                acc.remove(t)
            else:
                acc.add(t)
        self.terms = frozenset(acc)

    @classmethod
    def _raw(cls, terms: frozenset) -> "Polynomial":
        p = object.__new__(cls)
        p.terms = terms
        return p

    @classmethod
    def mono(cls, m: Monomial) -> "Polynomial":
        return cls._raw(frozenset((m,)))

    def __add__(self, other: "Polynomial") -> "Polynomial":
        return Polynomial._raw(self.terms ^ other.terms)

    __sub__ = __add__

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        acc: set[Monomial] = set()
        for a in self.terms:
            for b in other.terms:
                acc ^= {mono_mul(a, b)}
        return Polynomial._raw(frozenset(acc))

    def __eq__(self, other) -> bool:
        if isinstance(other, Polynomial):
            return self.terms == other.terms
        if other == 0:
            return not self.terms
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.terms)

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __iter__(self) -> Iterator[Monomial]:
        return iter(self.sorted_terms())

    def __len__(self) -> int:
        return len(self.terms)

    def sorted_terms(self) -> list[Monomial]:
        width = max((len(t) for t in self.terms), default=0)
        return sorted(self.terms, key=lambda m: mono_key(m, width))

    def is_weight_homogeneous(self, n: int) -> bool:
        return all(weight(t) == n for t in self.terms)

    def degrees(self) -> set[int]:
        return {degree(t) for t in self.terms}

    def __repr__(self) -> str:
        return f"Polynomial({format_poly(self)!r})"

    def __str__(self) -> str:
        return format_poly(self)


ZERO = Polynomial()


def as_poly(p) -> Polynomial:
    if isinstance(p, Polynomial):
        return p
    if isinstance(p, tuple):
        return Polynomial.mono(_trim(p))
    if isinstance(p, str):
        return parse_poly(p)
    raise TypeError(f"cannot read {p!r} as a polynomial")


# --------------------------------------------------------------------------
# text syntax:  x0^4*x1 + x2
# --------------------------------------------------------------------------

def format_mono(m: Monomial) -> str:
    parts = []
    for k, e in enumerate(m):
        if e == 1:
            parts.append(f"x{k}")
        elif e > 1:
            parts.append(f"x{k}^{e}")
    return "*".join(parts) if parts else "1"


def format_poly(p: Polynomial) -> str:
    if not p.terms:
        return "0"
    return " + ".join(format_mono(m) for m in p.sorted_terms())


_FACTOR = re.compile(r"^x(\d+)(?:\^(\d+))?$")


def parse_mono(text: str) -> Monomial:
    text = text.strip().replace(" ", "")
    if text == "1":
        return ONE
    exps: dict[int, int] = {}
    for factor in text.split("*"):
        m = _FACTOR.match(factor)
        if not m:
            raise ValueError(f"malformed monomial factor {factor!r} in {text!r}")
        k = int(m.group(1))
        exps[k] = exps.get(k, 0) + int(m.group(2) or 1)
    return monomial(exps)


def parse_poly(text: str) -> Polynomial:
    text = text.strip()
    if not text:
        raise ValueError("empty polynomial")
    if text == "0":
        return ZERO
    return Polynomial(parse_mono(t) for t in text.split("+"))


# --------------------------------------------------------------------------
# Steenrod action
# --------------------------------------------------------------------------

def sq_on_power(k: int, e: int, j: int) -> Polynomial:
    """``Sq^j`` of the single power ``x_k^e``."""
    return Polynomial(_power_term(k, e, j))


def _power_term(k: int, e: int, j: int) -> tuple[Monomial, ...]:
    if j == 0:
        return (_trim((0,) * k + (e,)),)
    if k == 0 or j > e or not binom_mod2(e, j):
        return ()
    exps = [0] * (k + 1)
    exps[k] = e - j
    exps[k - 1] = 2 * j
    return (_trim(exps),)


@lru_cache(maxsize=1 << 18)
def sq_mono(i: int, m: Monomial) -> frozenset:
    """``Sq^i`` of one monomial, as a frozenset of monomials."""
    if i == 0:
        return frozenset((m,))
    if i > degree(m):
        return frozenset()
    # Cartan: distribute i over the variables; each factor contributes at most
    # one monomial, so track exponent vectors directly.
    partial: dict[int, set] = {0: {ONE}}
    for k, e in enumerate(m):
        if e == 0:
            continue
        nxt: dict[int, set] = {}
        options = [(0, _trim((0,) * k + (e,)))] if k == 0 else [
            (j, t[0]) for j in range(0, e + 1) for t in (_power_term(k, e, j),) if t
        ]
        for used, monos in partial.items():
            for j, factor in options:
                tot = used + j
                if tot > i:
                    continue
                bucket = nxt.setdefault(tot, set())
                for mono in monos:
                    bucket ^= {mono_mul(mono, factor)}
        partial = nxt
    return frozenset(partial.get(i, ()))


def sq(i: int, p) -> Polynomial:
    """``Sq^i p`` via the Cartan formula."""
    if i < 0:
        raise ValueError("negative square")
    p = as_poly(p)
    acc: set[Monomial] = set()
    for m in p.terms:
        acc ^= sq_mono(i, m)
    return Polynomial._raw(frozenset(acc))


def qm_generator(m: int, k: int) -> Monomial | None:
    """``Q_m x_k``: ``x_{k-m-1}^(2^(m+1))`` for k > m, else zero (None)."""
    if k <= m:
        return None
    exps = [0] * (k - m)
    exps[k - m - 1] = 1 << (m + 1)
    return tuple(exps)


@lru_cache(maxsize=1 << 18)
def qm_mono(m: int, mono: Monomial) -> frozenset:
    acc: set[Monomial] = set()
    for k, e in enumerate(mono):
        if not e & 1:
            continue
        g = qm_generator(m, k)
        if g is None:
            continue
        rest = list(mono)
        rest[k] -= 1
        acc ^= {_trim(mono_mul(tuple(rest), g))}
    return frozenset(acc)


def qm(m: int, p) -> Polynomial:
    """Milnor primitive ``Q_m`` acting as a derivation."""
    if m < 0:
        raise ValueError("negative primitive index")
    p = as_poly(p)
    acc: set[Monomial] = set()
    for mono in p.terms:
        acc ^= qm_mono(m, _trim(mono))
    return Polynomial._raw(frozenset(acc))


def qm_via_commutator(m: int, p) -> Polynomial:
    """``Q_0 = Sq^1``, ``Q_m = Q_{m-1} Sq^(2^m) + Sq^(2^m) Q_{m-1}``."""
    p = as_poly(p)
    if m == 0:
        return sq(1, p)
    s = 1 << m
    return qm_via_commutator(m - 1, sq(s, p)) + sq(s, qm_via_commutator(m - 1, p))


# --------------------------------------------------------------------------
# modules inside Z/2[t]
# --------------------------------------------------------------------------

class TFamily(enum.Enum):
    POLY_T = "poly"          # Z/2[t]
    IDEAL_T = "ideal"        # (t)
    F1 = "F1"                # span of t^(2^k)
    P_D = "P"                # H^*(P_d): t^j, j >= d
    P_TILDE_MINUS1 = "Ptilde"  # t^-1, t, t^2, ...; no t^0


@dataclass(frozen=True)
class TModuleElement:
    family: TFamily
    exponent: int
    d: int = 0  # only meaningful for P_D

    def __post_init__(self):
        if not t_admits(self.family, self.exponent, self.d):
            raise ValueError(f"t^{self.exponent} is not a class of {self.family.name}")

    def __str__(self) -> str:
        return f"t^{self.exponent}"


def t_admits(family: TFamily, j: int, d: int = 0) -> bool:
    if family is TFamily.POLY_T:
        return j >= 0
    if family is TFamily.IDEAL_T:
        return j >= 1
    if family is TFamily.F1:
        return j >= 1 and j & (j - 1) == 0
    if family is TFamily.P_D:
        return j >= d
    if family is TFamily.P_TILDE_MINUS1:
        return j == -1 or j >= 1
    raise TypeError(family)


def t_sq_exponent(i: int, family: TFamily, j: int, d: int = 0) -> int | None:
    """Exponent of ``Sq^i t^j`` in the given family, or None when it vanishes."""
    if not t_admits(family, j, d):
        raise ValueError(f"t^{j} is not a class of {family.name}")
    if not binom_mod2(j, i):
        return None
    out = j + i
    if not t_admits(family, out, d):
        # only the missing t^0 of P_TILDE_MINUS1 can be hit this way
        return None
    return out


def t_sq(i: int, e: TModuleElement) -> TModuleElement | None:
    """``Sq^i t^j = binom(j, i) t^(i+j)``; None means zero."""
    out = t_sq_exponent(i, e.family, e.exponent, e.d)
    return None if out is None else TModuleElement(e.family, out, e.d)


def t_qm_exponent(m: int, family: TFamily, j: int, d: int = 0) -> int | None:
    """``Q_m t^j`` by the commutator recursion (each term is a single power)."""
    acc: dict[int, int] = {}
    for word in _qm_words(m):
        e: int | None = j
        for s in reversed(word):
            e = t_sq_exponent(s, family, e, d)
            if e is None:
                break
        if e is not None:
            acc[e] = acc.get(e, 0) ^ 1
    hits = [e for e, c in acc.items() if c]
    if len(hits) > 1:
        raise AssertionError("Q_m of a power of t must be a single power")
    return hits[0] if hits else None


@lru_cache(maxsize=None)
def _qm_words(m: int) -> tuple[tuple[int, ...], ...]:
    """Q_m expanded as a sum of words in the Sq^(2^j), leftmost applied last."""
    if m == 0:
        return ((1,),)
    s = 1 << m
    prev = _qm_words(m - 1)
    return tuple(w + (s,) for w in prev) + tuple((s,) + w for w in prev)
