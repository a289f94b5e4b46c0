"""Acceptance run.

Every criterion is checked exactly over F2.  Each clause is recorded through the
``acceptance`` fixture and a one-line verdict per criterion is printed in the
terminal summary.  Two literal clauses are false as written; they still run, fail,
and are marked ``xfail(strict=True)`` so they cannot silently start passing.

Run only this file with ``pytest tests/test_acceptance.py -rA``.
"""
import itertools
import os
import sys

import pytest

from browngitler import polyalg
from browngitler import theorems as T
from browngitler.bg import J, build_q_module, dot_sq, p_map, x0_times
from browngitler.f2core import nu2
from browngitler.graded import (
    a1_free_decomposition,
    hom_solver,
    hom_space_dimension,
    margolis,
    suspend,
)
from browngitler.polyalg import Polynomial, parse_poly

JOBS = os.cpu_count() or 1


# -- 1 -----------------------------------------------------------------------------

def test_criterion_1_main_scan(acceptance):
    rep = T.scan_main_theorem(47, 48, jobs=JOBS)
    pairs = T.scan_pairs(47, 48)
    bad = [(r.n, r.m) for r in rep.records if r.mismatch]
    ok = len(rep.records) == len(pairs) == 1081 and not bad
    s = rep.summary()
    acceptance(1, "oracle == criterion for 2 <= n < m <= 48", ok,
               f"{len(rep.records)} pairs, {s['predicted_acyclic']} predicted, "
               f"{s['oracle_acyclic']} acyclic, {len(bad)} mismatches, {rep.elapsed:.0f}s")
    assert ok, bad


# -- 2 -----------------------------------------------------------------------------

def test_criterion_2_fixtures(acceptance):
    Q26 = build_q_module(2, 6, check="all").module
    ok26 = (Q26.total_dim == 8 and Q26.poincare(0) == [1, 1, 1, 2, 1, 1, 1]
            and a1_free_decomposition(Q26).generator_degrees == [0])
    acceptance(2, "Q(2,6) dim 8, profile 1 1 1 2 1 1 1, A(1)-free of rank 1", ok26)

    Q412 = build_q_module(4, 12, check="all").module
    dec = a1_free_decomposition(Q412)
    ok412 = Q412.total_dim == 24 and dec.free and dec.generator_degrees == [0, 2, 6]
    acceptance(2, "Q(4,12) dim 24, A(1)-generators in degrees {0,2,6}", ok412,
               f"generators {dec.generator_degrees}")

    dim = build_q_module(10, 22).module.total_dim
    acceptance(2, "Q(10,22) dim 88", dim == 88, f"dim {dim}")

    # degree-consistent form: Sq^2 Sq^1 applied to the bottom class Sinv(x2)
    qm = build_q_module(4, 12)
    got = qm.module.apply_word((2, 1), *qm.desusp(parse_poly("x2")))
    want = qm.element(desusp_part=parse_poly("x0^4"), j_part=parse_poly("x1^2*x3"))
    acceptance(2, "Sq2 Sq1 Sinv(x2) = Sinv(x0^4) + x1^2 x3", got == want)
    assert ok26 and ok412 and dim == 88 and got == want


@pytest.mark.xfail(strict=True, reason="literal clause is degree-inconsistent: the left side "
                   "lives in degree 4, the right side in degree 3")
def test_criterion_2_literal_sq2sq1(acceptance):
    qm = build_q_module(4, 12)
    lhs = qm.module.apply_word((2, 1), *qm.desusp(parse_poly("x1^2")))
    rhs = qm.element(desusp_part=parse_poly("x0^4"), j_part=parse_poly("x1^2*x3"))
    acceptance(2, "literal Sq2 Sq1 Sinv(x1^2) = Sinv(x0^4) + x1^2 x3", lhs == rhs,
               f"lhs (deg, vec) = {lhs}, rhs = {rhs}")
    assert lhs == rhs


# -- 3 -----------------------------------------------------------------------------

def test_criterion_3_thomas(acceptance):
    crit_bad, oracle_bad, n_oracle = [], [], 0
    for n in range(2, 33, 2):
        k = n.bit_length()
        while n + (1 << k) <= 96:
            m = n + (1 << k)
            if not T.main_criterion(n, m).predicted_acyclic:
                crit_bad.append((n, m))
            if m <= 48:
                n_oracle += 1
                if not T.acyclicity_oracle(n, m).acyclic:
                    oracle_bad.append((n, m))
            k += 1
    ok = not crit_bad and not oracle_bad
    acceptance(3, "Q(n, n + 2^k) acyclic for even n <= 32, 2^k > n", ok,
               f"criterion failures {crit_bad}, oracle failures {oracle_bad} over {n_oracle} oracle pairs")
    assert ok


# -- 4 -----------------------------------------------------------------------------

def test_criterion_4_minimal(acceptance):
    bad_min, bad_oracle = [], []
    for n in range(2, 25, 2):
        m = 2 * n + (1 << nu2(n))
        smaller = [mm for mm in range(n + 1, m) if T.main_criterion(n, mm).predicted_acyclic]
        if smaller or not T.main_criterion(n, m).predicted_acyclic:
            bad_min.append(n)
        if n <= 16 and not T.acyclicity_oracle(n, m).acyclic:
            bad_oracle.append(n)
    ok = not bad_min and not bad_oracle
    acceptance(4, "m = 2n + 2^nu(n) minimal, oracle acyclic for n <= 16", ok,
               f"minimality failures {bad_min}, oracle failures {bad_oracle}")
    assert ok


# -- 5 -----------------------------------------------------------------------------

def test_criterion_5_rank_tables(acceptance):
    k0 = [T.k_value(0, n) for n in range(65)]
    ok0 = k0 == [1, 1] + [0] * 63
    acceptance(5, "k_{0,n} = 1, 1, 0, 0, ... for n <= 64", ok0)

    k1 = [T.k_value(1, n) for n in range(65)]
    ok1 = k1[2:] == [2] * 63
    acceptance(5, "k_{1,n} = 2 for 2 <= n <= 64", ok1)

    bad2 = [(n, e) for n in range(1, 33) for e in (0, 1) if T.k_value(2, 2 * n + e) != 2 * n]
    acceptance(5, "k_{2,2n+e} = 2n for 1 <= n <= 32", not bad2, f"failures {bad2}")

    k2 = [T.k_value(2, n) for n in range(65)]
    # coefficients written out directly
    ser1 = [1 + (n >= 2) for n in range(65)]
    ser2 = [n // 2 + 1 + ((n - 4) // 2 + 1 if n >= 4 else 0) for n in range(65)]
    ok_ser = (ser1 == T.rational_series(1, 64) == k1
              and ser2 == T.rational_series(2, 64) == k2)
    acceptance(5, "series (1+t^2)/(1-t) and (1+t^4)/((1-t)(1-t^2)) match to order 64", ok_ser)
    tables_ok = all(not T.k_tables(m, 64).mismatches for m in (0, 1, 2))
    acceptance(5, "k tables agree with closed forms and product series", tables_ok)
    assert ok0 and ok1 and not bad2 and ok_ser and tables_ok


# -- 6 -----------------------------------------------------------------------------

def test_criterion_6_cross_oracles(acceptance):
    count, bad_qm = 0, []
    for n in range(65):
        for mono in polyalg.weight_basis(n):
            for m in range(3):
                count += 1
                if polyalg.qm_mono(m, mono) != polyalg.qm_via_commutator(m, Polynomial.mono(mono)).terms:
                    bad_qm.append((m, mono))
    acceptance(6, "qm == qm_via_commutator, weight <= 64, m <= 2", not bad_qm,
               f"{count} checks, {len(bad_qm)} failures")

    bad_dot = []
    for n in range(1, 13):
        M = J(2 * n)
        phi = 1 << M.elements[n].index((0, n))
        if not dot_sq(n).equals(hom_solver(M, n, phi, verify=True)):
            bad_dot.append(n)
    acceptance(6, "dot_sq(n) is the A-map fixed by x1^n, n <= 12", not bad_dot, f"failures {bad_dot}")

    bad_mah = []
    for n in range(1, 17):
        inc, proj = x0_times(2 * n - 1), dot_sq(n)
        for d in J(2 * n).degrees:
            a, b, c = inc.source.dim(d), J(2 * n).dim(d), J(n).dim(d)
            if (inc.rank(d) != a or proj.rank(d) != c or a + c != b
                    or any(proj.apply(d, inc.image(d, k)) for k in range(a))):
                bad_mah.append((n, d))
    acceptance(6, "Mahowald sequence exact, n <= 16", not bad_mah, f"failures {bad_mah}")

    bad_hom = [(n, l) for n in range(21) for l in range(n + 1)
               if hom_space_dimension(J(n), l) != J(n).dim(l)]
    acceptance(6, "hom-solver solution space = dim J(n)^l, n <= 20", not bad_hom, f"failures {bad_hom}")
    assert not (bad_qm or bad_dot or bad_mah or bad_hom)


@pytest.mark.xfail(strict=True, reason="dot_sq(n) and p_map(2n, n) differ once J(2n)^n has "
                   "monomials besides x1^n, i.e. for n >= 3")
def test_criterion_6_literal_dot_sq_is_p_map(acceptance):
    differ = [n for n in range(1, 13) if not dot_sq(n).equals(p_map(2 * n, n))]
    acceptance(6, "literal dot_sq(n) == p_map(2n, n), n <= 12", not differ, f"differ for n = {differ}")
    assert not differ


# -- 7 -----------------------------------------------------------------------------

def test_criterion_7_combinatorics(acceptance):
    magic = T.magic_lemma_check(512)
    acceptance(7, "magic lemma (proof reading) to 512", not magic, f"{len(magic)} failures")

    bad_sjk, pairs = [], 0
    for d in range(5):
        for js in itertools.combinations(range(10), d):
            for ks in itertools.combinations(range(10), d):
                pairs += 1
                r = T.s_jk(js, ks)
                if r.odd != r.clubsuit or (r.odd and r.count != 1):
                    bad_sjk.append((js, ks))
    acceptance(7, "S(J,K) odd <=> clubsuit, odd => count 1, J,K in {0..9}, |J| <= 4",
               not bad_sjk, f"{pairs} pairs, {len(bad_sjk)} failures")

    mixed = T.mixed_parity_vanishing(32)
    acceptance(7, "mixed-parity classes vanish to 32", not mixed, f"failures {mixed}")

    an = T.alpha_nu_identity(1 << 16)
    acceptance(7, "alpha2(n-1) - alpha2(n) = nu2(n) - 1 for n <= 2^16", not an, f"{len(an)} failures")

    halving = T.binomial_halving(1024)
    acceptance(7, "binomial halving for even m, n <= 1024", not halving, f"{len(halving)} failures")
    assert not (magic or bad_sjk or mixed or an or halving)


# -- 8 -----------------------------------------------------------------------------

def test_criterion_8_splitting(acceptance):
    bad_split = []
    for n in range(2, 13):
        for m in range(n + 1, 2 * n - 1):
            got, want = T.splitting_profile(n, m)
            if got != want:
                bad_split.append((n, m, got, want))
    acceptance(8, "Q1-dim Q(n,m) = k_{1,m} + k_{1,n} for m < 2n - 1", not bad_split, f"failures {bad_split}")

    bad_edge = []
    for n in range(2, 13):
        Q = build_q_module(n, 2 * n - 1).module
        S = suspend(J(2 * n), -1)
        if (Q.poincare(-1) != S.poincare(-1)
                or any(margolis(Q, k).profile() != margolis(S, k).profile() for k in (0, 1))):
            bad_edge.append(n)
    acceptance(8, "Q(n, 2n-1) matches Sinv J(2n) in Poincare and Margolis data", not bad_edge,
               f"failures {bad_edge}")
    assert not bad_split and not bad_edge


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
