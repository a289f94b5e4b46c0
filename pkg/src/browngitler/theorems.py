"""Closed-form criteria, their homological oracles, and the exhaustive scans
comparing the two."""

from __future__ import annotations

import itertools
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

from . import polyalg
from .bg import J, build_q_module, p_map
from .f2core import alpha2, binom_mod2, bits, nu2
from .graded import (
    ContractViolation,
    a1_free_decomposition,
    is_margolis_iso,
    margolis,
    poly_vector,
)

MAX_PERMUTATION_SIZE = 8
MAX_MAGIC_BOUND = 4096
MAX_MIXED_BOUND = 64
MAX_TABLE_WEIGHT = 64


# --------------------------------------------------------------------------
# the criterion
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class CriterionVerdict:
    n: int
    m: int
    parity_case: str
    alpha_ok: bool
    nu_ok: bool
    binom_ok: bool
    predicted_acyclic: bool


def main_criterion(n: int, m: int) -> CriterionVerdict:
    """Predicted Q1-acyclicity of Q(n, m).

    Both even: alpha2(m) = alpha2(n) + 1, nu2(m) = nu2(n) and
    binom(m - n - 2, n) odd.  Both odd: same test on (n - 1, m - 1).
    Mixed parity, or n <= 1: never.
    """
    if not 0 <= n < m:
        raise ContractViolation("main_criterion needs 0 <= n < m")
    if n % 2 == 0 and m % 2 == 0:
        case, a, b = "a", n, m
    elif n % 2 and m % 2:
        case, a, b = "b", n - 1, m - 1
    else:
        return CriterionVerdict(n, m, "c", False, False, False, False)
    if n <= 1:
        return CriterionVerdict(n, m, case, False, False, False, False)
    alpha_ok = alpha2(b) == alpha2(a) + 1
    nu_ok = nu2(b) == nu2(a)
    binom_ok = binom_mod2(b - a - 2, a) == 1
    return CriterionVerdict(n, m, case, alpha_ok, nu_ok, binom_ok, alpha_ok and nu_ok and binom_ok)


@dataclass(frozen=True)
class OracleResult:
    n: int
    m: int
    acyclic: bool
    dimension: int
    witness: str | None


def acyclicity_oracle(n: int, m: int) -> OracleResult:
    """Build Q(n, m) and compute its Q1-homology directly."""
    if not 2 <= n < m:
        raise ContractViolation("acyclicity_oracle needs 2 <= n < m")
    qm = build_q_module(n, m, validate=False)
    rep = margolis(qm.module, 1)
    witness = None
    first = rep.first_class()
    if first is not None:
        d, v = first
        witness = f"deg {d}: {qm.module.describe(d, v)}"
    return OracleResult(n, m, rep.acyclic, qm.module.total_dim, witness)


# --------------------------------------------------------------------------
# scans
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ScanRecord:
    n: int
    m: int
    predicted: bool
    oracle: bool
    dimension: int
    witness: str | None = None
    a1_generators: tuple[int, ...] | None = None
    a1_free: bool | None = None

    @property
    def mismatch(self) -> bool:
        if self.predicted != self.oracle:
            return True
        return self.predicted and not self.a1_free


@dataclass
class ScanReport:
    n_max: int
    m_max: int
    records: list[ScanRecord]
    elapsed: float
    mismatches: list[ScanRecord] = field(default_factory=list)

    def __post_init__(self):
        self.mismatches = [r for r in self.records if r.mismatch]

    @property
    def ok(self) -> bool:
        return not self.mismatches

    def summary(self, timing: bool = True) -> dict:
        out = {
            "pairs": len(self.records),
            "predicted_acyclic": sum(r.predicted for r in self.records),
            "oracle_acyclic": sum(r.oracle for r in self.records),
            "mismatches": len(self.mismatches),
        }
        if timing:
            out["wall_time_s"] = round(self.elapsed, 2)
        return out

    def to_text(self, timing: bool = True) -> str:
        lines = [f"scan n<={self.n_max} m<={self.m_max}", "n m predicted oracle dim witness"]
        for r in self.records:
            extra = r.witness or ""
            if r.a1_generators is not None:
                extra = f"A(1)-free on {list(r.a1_generators)}" if r.a1_free else "A(1) decomposition FAILED"
            lines.append(f"{r.n} {r.m} {int(r.predicted)} {int(r.oracle)} {r.dimension} {extra}".rstrip())
        s = self.summary(timing)
        lines.append("summary " + " ".join(f"{k}={v}" for k, v in s.items()))
        lines.append(f"{s['mismatches']} mismatches")
        return "\n".join(lines) + "\n"

    def to_json(self, timing: bool = True) -> str:
        return json.dumps({"records": [asdict(r) for r in self.records], "summary": self.summary(timing)},
                          indent=1)


def scan_pair(n: int, m: int, freeness: bool = True) -> ScanRecord:
    verdict = main_criterion(n, m)
    qm = build_q_module(n, m, validate=False)
    rep = margolis(qm.module, 1)
    witness = None
    first = rep.first_class()
    if first is not None:
        d, v = first
        witness = f"deg {d}: {qm.module.describe(d, v)}"
    gens = free = None
    if freeness and verdict.predicted_acyclic:
        dec = a1_free_decomposition(qm.module)
        gens, free = tuple(dec.generator_degrees), dec.free
    return ScanRecord(n, m, verdict.predicted_acyclic, rep.acyclic, qm.module.total_dim, witness, gens, free)


def _scan_chunk(pairs):
    return [scan_pair(n, m) for n, m in pairs]


def scan_pairs(n_max: int, m_max: int, n_min: int = 2) -> list[tuple[int, int]]:
    return [(n, m) for m in range(n_min + 1, m_max + 1) for n in range(n_min, min(n_max, m - 1) + 1)]


def scan_main_theorem(n_max: int, m_max: int, jobs: int = 1, pairs=None) -> ScanReport:
    """Compare criterion and oracle on every ``2 <= n < m``, ``n <= n_max``, ``m <= m_max``."""
    if pairs is None:
        if n_max >= m_max:
            n_max = m_max - 1
        pairs = scan_pairs(n_max, m_max)
    start = time.perf_counter()
    if jobs <= 1:
        records = _scan_chunk(pairs)
    else:
        # group by m so each worker reuses its cached J(m)
        groups: dict[int, list] = {}
        for n, m in pairs:
            groups.setdefault(m, []).append((n, m))
        chunks = sorted(groups.values(), key=len, reverse=True)
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            records = [r for chunk in pool.map(_scan_chunk, chunks) for r in chunk]
    records.sort(key=lambda r: (r.m, r.n))
    return ScanReport(n_max, m_max, records, time.perf_counter() - start)


# --------------------------------------------------------------------------
# good pairs and S(J, K)
# --------------------------------------------------------------------------

def good_pair(n: int, l: int) -> bool:
    if n < 1 or l < 1:
        raise ContractViolation("good_pair needs n, l >= 1")
    return alpha2(n) == alpha2(l) and nu2(n) == nu2(l)


def q1_profile(n: int) -> dict[int, int]:
    return margolis(J(n), 1).profile()


def good_pair_graded(n: int, l: int) -> bool:
    """H(J(2n); Q1) and H(J(2l); Q1) agree as graded vector spaces."""
    return q1_profile(2 * n) == q1_profile(2 * l)


def clubsuit(js, ks) -> bool:
    """``j1 <= k1 < j2 <= k2 < ... < jd <= kd``."""
    chain = [v for pair in zip(js, ks) for v in pair]
    return all(a <= b if i % 2 == 0 else a < b for i, (a, b) in enumerate(zip(chain, chain[1:])))


@dataclass(frozen=True)
class SJKResult:
    count: int
    odd: bool
    s_profile: tuple[int, ...]
    clubsuit: bool


def s_jk(js, ks, max_d: int = MAX_PERMUTATION_SIZE) -> SJKResult:
    """Count permutations sigma with ``k_c >= j_sigma(c)`` for every c."""
    js, ks = tuple(js), tuple(ks)
    d = len(js)
    if len(ks) != d:
        raise ContractViolation("J and K must have the same size")
    if any(a >= b for a, b in zip(js, js[1:])) or any(a >= b for a, b in zip(ks, ks[1:])):
        raise ContractViolation("J and K must be strictly increasing")
    if d > max_d:
        raise ContractViolation(f"refusing to enumerate S_{d} (limit {max_d})")
    count = sum(all(ks[c] >= js[s[c]] for c in range(d)) for s in itertools.permutations(range(d)))
    profile = tuple(sum(j <= k for j in js) for k in ks)
    club = clubsuit(js, ks)
    odd = bool(count & 1)
    if odd != club:
        raise AssertionError(f"parity of |S(J,K)| disagrees with the chain condition for {js}, {ks}")
    if odd and count != 1:
        raise AssertionError(f"odd |S(J,K)| = {count} for {js}, {ks}")
    return SJKResult(count, odd, profile, club)


def sjk_for_pair(n: int, l: int) -> SJKResult:
    """S(J, K) with K, J the exponents of n, l above their common lowest bit."""
    if not good_pair(n, l):
        raise ContractViolation("S(J,K) is only attached to good pairs")
    return s_jk(tuple(bits(l))[1:], tuple(bits(n))[1:])


# --------------------------------------------------------------------------
# combinatorial lemmas
# --------------------------------------------------------------------------

def diamond(l: int, n: int) -> bool:
    """``j0 <= k0 < j1 <= k1 < ...`` for the bits j of l and k of n (same count)."""
    js, ks = tuple(bits(l)), tuple(bits(n))
    return len(js) == len(ks) and clubsuit(js, ks)


def magic_lemma_check(bound: int, reading: str = "proof") -> list[tuple[int, int]]:
    """Pairs ``n < m <= bound`` where the binomial test and the chain test disagree.

    Quantified over ``alpha2(m) = alpha2(n) + 1``.  ``reading="proof"`` uses
    ``binom(m - n - 1, n)``; ``reading="statement"`` uses ``binom(n - m - 1, n)``.
    """
    if bound > MAX_MAGIC_BOUND:
        raise ContractViolation(f"bound above {MAX_MAGIC_BOUND}")
    bad = []
    for m in range(1, bound + 1):
        k = m.bit_length() - 1
        l = m - (1 << k)
        for n in range(0, m):
            if alpha2(m) != alpha2(n) + 1:
                continue
            upper = m - n - 1 if reading == "proof" else n - m - 1
            lhs = binom_mod2(upper, n) == 1
            rhs = m >= 2 * n and diamond(l, n)
            if lhs != rhs:
                bad.append((n, m))
    return bad


def alpha_nu_identity(limit: int) -> list[int]:
    """n in [1, limit] violating alpha2(n - 1) - alpha2(n) = nu2(n) - 1."""
    return [n for n in range(1, limit + 1) if alpha2(n - 1) - alpha2(n) != nu2(n) - 1]


def binomial_halving(limit: int) -> list[tuple[int, int]]:
    """Even ``n < m <= limit`` with binom(m-n-2, n) != binom(m/2-n/2-1, n/2) mod 2."""
    return [(n, m) for m in range(0, limit + 1, 2) for n in range(0, m, 2)
            if binom_mod2(m - n - 2, n) != binom_mod2(m // 2 - n // 2 - 1, n // 2)]


# --------------------------------------------------------------------------
# mixed parity
# --------------------------------------------------------------------------

def _profiles_match(a: int, b: int) -> bool:
    return q1_profile(a) == q1_profile(b)


def mixed_parity_vanishing(bound: int) -> list[tuple[int, int, str]]:
    """Mixed-parity good pairs where the named Q1 class survives p(a, b)*.

    Checks ``p(2n, 2l+1)* x(n)^2 = 0`` and ``p(2n+1, 2l)* x0 x(n)^2 = 0`` as
    elements, for all such pairs with ``2 <= b < a <= bound``.
    """
    if bound > MAX_MIXED_BOUND:
        raise ContractViolation(f"bound above {MAX_MIXED_BOUND}")
    bad = []
    for a in range(2, bound + 1):
        for b in range(2, a):
            if a % 2 == b % 2 or not _profiles_match(a, b):
                continue
            n = a // 2
            cls = polyalg.Polynomial.mono(tuple(2 * e for e in polyalg.x_of(n)))
            if a % 2:
                cls = cls * polyalg.Polynomial.mono((1,))
            d, v = poly_vector(J(a), cls)
            if p_map(a, b).apply(d, v):
                bad.append((a, b, str(cls)))
    return bad


def mixed_parity_isos(bound: int) -> list[tuple[int, int]]:
    """Mixed-parity ``2 <= b < a <= bound`` with p(a, b)* a Q1-isomorphism."""
    return [(a, b) for a in range(2, bound + 1) for b in range(2, a)
            if a % 2 != b % 2 and is_margolis_iso(p_map(a, b), 1)]


# --------------------------------------------------------------------------
# Q_m ranks of J(n)
# --------------------------------------------------------------------------

def _series_mul(a: list[int], b: list[int], order: int) -> list[int]:
    out = [0] * (order + 1)
    for i, x in enumerate(a[: order + 1]):
        if x:
            for j, y in enumerate(b[: order + 1 - i]):
                out[i + j] += x * y
    return out


def _series_inv(a: list[int], order: int) -> list[int]:
    """Power-series inverse for ``a[0] = 1``."""
    out = [0] * (order + 1)
    out[0] = 1
    for n in range(1, order + 1):
        out[n] = -sum(a[k] * out[n - k] for k in range(1, min(n, len(a) - 1) + 1))
    return out


def _poly(terms: dict[int, int], order: int) -> list[int]:
    out = [0] * (order + 1)
    for e, c in terms.items():
        if e <= order:
            out[e] += c
    return out


def rational_series(m: int, order: int) -> list[int]:
    """k_0 = 1 + t, k_1 = (1 + t^2)/(1 - t), k_2 = (1 + t^4)/((1 - t)(1 - t^2))."""
    if m == 0:
        return _poly({0: 1, 1: 1}, order)
    if m == 1:
        return _series_mul(_poly({0: 1, 2: 1}, order), _series_inv(_poly({0: 1, 1: -1}, order), order), order)
    if m == 2:
        den = _series_mul(_poly({0: 1, 1: -1}, order), _poly({0: 1, 2: -1}, order), order)
        return _series_mul(_poly({0: 1, 4: 1}, order), _series_inv(den, order), order)
    raise ContractViolation("closed-form series known for m <= 2 only")


def product_series(m: int, order: int) -> list[int]:
    """Poincare series in weight of the quotient ring computing H(J(*); Q_m)."""
    top = 1 << (m + 1)
    out = _poly({0: 1}, order)
    k = 0
    while (1 << k) <= order:
        step = 1 << k
        exps = range(top) if k <= m else range(0, top, 2)
        out = _series_mul(out, _poly({e * step: 1 for e in exps}, order), order)
        k += 1
    return out


def quotient_slice(m: int, n: int) -> dict[int, int]:
    """Degree profile of the weight-n monomials with e_k < 2^(m+1), e_k even for k > m."""
    top = 1 << (m + 1)
    out: dict[int, int] = {}
    for mono in polyalg.weight_basis(n):
        if all(e < top and (k <= m or e % 2 == 0) for k, e in enumerate(mono)):
            d = polyalg.degree(mono)
            out[d] = out.get(d, 0) + 1
    return out


def closed_form_k(m: int, n: int) -> int:
    if n <= 1:
        return 1
    if m == 0:
        return 0
    if m == 1:
        return 2
    if m == 2:
        return 2 * (n // 2)
    raise ContractViolation("closed form known for m <= 2 only")


@dataclass
class KTable:
    m: int
    n_max: int
    values: list[int]
    closed_form: list[int]
    rational: list[int]
    product: list[int]
    mismatches: list[tuple[str, int]]

    def to_text(self) -> str:
        lines = [f"k_{{{self.m},n}} for n <= {self.n_max}"]
        for n, (k, c) in enumerate(zip(self.values, self.closed_form)):
            lines.append(f"k_{{{self.m},{n}}} = {k}  closed {c}  delta {k - c:+d}  series {self.rational[n]}")
        lines.append(f"{len(self.mismatches)} mismatches")
        return "\n".join(lines) + "\n"


def k_value(m: int, n: int) -> int:
    return margolis(J(n), m).total


def k_tables(m: int, n_max: int) -> KTable:
    if m not in (0, 1, 2):
        raise ContractViolation("k_tables covers m in {0, 1, 2}")
    if n_max > MAX_TABLE_WEIGHT:
        raise ContractViolation(f"n_max above {MAX_TABLE_WEIGHT}")
    values = [k_value(m, n) for n in range(n_max + 1)]
    closed = [closed_form_k(m, n) for n in range(n_max + 1)]
    rat = rational_series(m, n_max)
    prod = product_series(m, n_max)
    bad = []
    for n in range(n_max + 1):
        for tag, ref in (("closed", closed), ("rational", rat), ("product", prod)):
            if values[n] != ref[n]:
                bad.append((tag, n))
    return KTable(m, n_max, values, closed, rat, prod, bad)


# --------------------------------------------------------------------------
# structural checks of Q(n, m)
# --------------------------------------------------------------------------

def minimal_acyclic_m(n: int, limit: int | None = None) -> int | None:
    """Least m > n with the criterion true."""
    limit = limit if limit is not None else 8 * n + 8
    for m in range(n + 1, limit + 1):
        if main_criterion(n, m).predicted_acyclic:
            return m
    return None


def reduction_chain(n: int, m: int) -> tuple[bool, bool]:
    """(oracle(n, m), p(n, l)* is a Q1-iso) for ``m >= 2n``, ``m = l + 2^k``, ``l < 2^k``."""
    if m < 2 * n:
        raise ContractViolation("reduction needs m >= 2n")
    l = m - (1 << (m.bit_length() - 1))
    return acyclicity_oracle(n, m).acyclic, is_margolis_iso(p_map(n, l), 1)


def splitting_profile(n: int, m: int) -> tuple[int, int]:
    """(total Q1-homology of Q(n, m), k_{1,m} + k_{1,n})."""
    qm = build_q_module(n, m)
    return margolis(qm.module, 1).total, k_value(1, m) + k_value(1, n)
