"""Maps between dual Brown-Gitler modules and the extensions Q(n, m).

Q(n, m) is the pushout of ``J(m) <- J(n)(x)(t) -> J(n)(x)H*(P~_{-1})``,
where the left leg is q(n, m)*.  Everything is built from truncations at
degree ``m``: J(m) vanishes above ``m`` and the cokernel of the right leg,
a desuspension of J(n), stops at degree ``n - 1``, so nothing is lost.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from . import polyalg
from .f2core import alpha2, bits
from .graded import (
    ContractViolation,
    FiniteGradedModule,
    ModuleMap,
    TheoryViolation,
    hom_solver,
    identity_map,
    module_from_weight,
    poly_vector,
    pushout,
    suspend,
    t_module,
    tensor,
    vector_poly,
)
from .polyalg import Polynomial, TFamily

J = module_from_weight


def _monomial_map(src: FiniteGradedModule, tgt: FiniteGradedModule, rule, name: str) -> ModuleMap:
    """Map sending each basis monomial of ``src`` to ``rule(mono)`` (a monomial or None)."""
    images = {}
    for d in src.degrees:
        col = []
        for mono in src.elements[d]:
            out = rule(mono)
            col.append(0 if out is None else 1 << tgt.monomial_index[out])
        images[d] = tuple(col)
    return ModuleMap(src, tgt, images, name)


def mu(n1: int, n2: int) -> ModuleMap:
    """Multiplication J(n1) (x) J(n2) -> J(n1 + n2)."""
    A, B, C = J(n1), J(n2), J(n1 + n2)
    T = tensor(A, B)
    images = {}
    for e, lst in T.pairs.items():
        col = []
        for da, ka, kb in lst:
            prod = polyalg.mono_mul(A.elements[da][ka], B.elements[e - da][kb])
            col.append(1 << C.monomial_index[prod])
        images[e] = tuple(col)
    return ModuleMap(T, C, images, f"mu({n1},{n2})")


def dot_sq(n: int) -> ModuleMap:
    """J(2n) -> J(n): kill monomials involving x0, shift x_{k+1} to x_k."""
    if n < 1:
        raise ContractViolation("dot_sq needs n >= 1")

    def rule(mono):
        if mono and mono[0]:
            return None
        return mono[1:]

    return _monomial_map(J(2 * n), J(n), rule, f".Sq^{n}")


def x0_times(n: int) -> ModuleMap:
    """Sigma J(n) -> J(n + 1), sigma x -> x0 x."""
    src = suspend(J(n), 1, f"SJ({n})")
    tgt = J(n + 1)
    return _monomial_map(src, tgt, lambda mono: polyalg.mono_mul(mono, (1,)), f"x0*:SJ({n})->J({n + 1})")


def f1_window(top: int) -> FiniteGradedModule:
    return t_module(TFamily.F1, top)


def p_k_map(k: int, window: int | None = None) -> ModuleMap:
    """The nonzero map F(1) -> J(2^k): t^(2^i) -> x_{k-i}^(2^i), zero for i > k."""
    if k < 0:
        raise ContractViolation("p_k needs k >= 0")
    top = window if window is not None else 1 << k
    src = f1_window(top)
    tgt = J(1 << k)
    images = {}
    for d in src.degrees:
        i = d.bit_length() - 1
        if i > k:
            images[d] = (0,)
            continue
        mono = [0] * (k - i + 1)
        mono[k - i] = 1 << i
        images[d] = (1 << tgt.monomial_index[tuple(mono)],)
    return ModuleMap(src, tgt, images, f"p_{k}", True)


def _all_ones(M: FiniteGradedModule, l: int) -> int:
    return (1 << M.dim(l)) - 1


@lru_cache(maxsize=2048)
def p_map(n: int, l: int, verify: bool = False) -> ModuleMap:
    """p(n, l)*: the A-map J(n) -> J(l) that is nonzero on every basis element of J(n)^l."""
    if n < 0 or l < 0:
        raise ContractViolation("weights must be nonnegative")
    src = J(n)
    f = hom_solver(src, l, _all_ones(src, l), verify=verify)
    f.name = f"p({n},{l})"
    return f


def q_source(n: int, m: int) -> FiniteGradedModule:
    """(J(n) (x) (t)) truncated at degree ``m``."""
    return tensor(J(n), t_module(TFamily.IDEAL_T, m), top=m, name=f"J({n})(x)(t)<={m}")


def q_map(n: int, m: int, verify: bool = False, source: FiniteGradedModule | None = None) -> ModuleMap:
    """q(n, m)*: the A-map (J(n)(x)(t))<=m -> J(m) nonzero on every basis element in degree m."""
    if n < 0 or m < 1:
        raise ContractViolation("q_map needs n >= 0 and m >= 1")
    M = source if source is not None else q_source(n, m)
    f = hom_solver(M, m, _all_ones(M, m), verify=verify)
    f.name = f"q({n},{m})"
    return f


def desusp_label(label: str) -> str:
    return f"Sinv({label})"


@dataclass
class QModule:
    n: int
    m: int
    module: FiniteGradedModule
    inclusion: ModuleMap
    projection: ModuleMap
    qmap: ModuleMap
    to_q: ModuleMap  # J(n)(x)H*(P~_{-1}) -> Q

    def desusp(self, x) -> tuple[int, int]:
        """Sigma^{-1} x: the image of ``x (x) t^-1`` in Q, as (degree, vector)."""
        p = polyalg.as_poly(x)
        src = self.to_q.source
        d = None
        v = 0
        for mono in p.terms:
            deg = polyalg.degree(mono) - 1
            label = f"{polyalg.format_mono(mono)}|t^-1"
            if d is not None and deg != d:
                raise ContractViolation("inhomogeneous polynomial")
            d = deg
            sd, k = src.locate(label)
            v ^= self.to_q.image(sd, k)
        if d is None:
            raise ContractViolation("zero polynomial has no degree")
        return d, v

    def include(self, y) -> tuple[int, int]:
        """An element of J(m) viewed in Q."""
        d, v = poly_vector(J(self.m), y)
        return d, self.inclusion.apply(d, v)

    def element(self, desusp_part=None, j_part=None) -> tuple[int, int]:
        """``Sigma^{-1} a + b`` with ``a`` in J(n), ``b`` in J(m)."""
        out_d, out = None, 0
        for piece in ((self.desusp, desusp_part), (self.include, j_part)):
            fn, arg = piece
            if arg is None:
                continue
            d, v = fn(arg)
            if out_d is not None and d != out_d:
                raise ContractViolation("parts of different degree")
            out_d, out = d, out ^ v
        return out_d, out

    def validate(self) -> None:
        Q = self.module
        Jm, Jn = J(self.m), J(self.n)
        if Q.total_dim != Jm.total_dim + Jn.total_dim:
            raise TheoryViolation("dim Q(n,m) != dim J(m) + dim J(n)")
        if Q.hi > self.m:
            raise TheoryViolation("Q(n,m) has classes above degree m")
        for d in Jm.degrees:
            if self.inclusion.rank(d) != Jm.dim(d):
                raise TheoryViolation(f"J(m) -> Q not injective in degree {d}")
            for k in range(Jm.dim(d)):
                if self.projection.apply(d, self.inclusion.image(d, k)):
                    raise TheoryViolation("projection o inclusion != 0")
        for d in Jn.degrees:
            for k, mono in enumerate(Jn.elements[d]):
                qd, qv = self.desusp(Polynomial.mono(mono))
                if self.projection.apply(qd, qv) != 1 << k:
                    raise TheoryViolation("desuspension section does not split the projection")
        for d in Q.degrees:
            if self.projection.rank(d) != self.projection.target.dim(d):
                raise TheoryViolation(f"Q -> Sigma^-1 J(n) not onto in degree {d}")


def build_q_module(n: int, m: int, check: str = "none", verify_map: bool = False,
                   validate: bool = True) -> QModule:
    """Q(n, m) for ``0 <= n < m`` as the pushout along q(n, m)*.

    ``check`` is passed to ``pushout``; the solver already certifies
    q(n,m)* against every Sq^(2^j) and the right leg is an inclusion of
    A-modules, so the default skips the redundant representative check.
    """
    if not 0 <= n < m:
        raise ContractViolation("build_q_module needs 0 <= n < m")
    Jn = J(n)
    M = q_source(n, m)
    f = q_map(n, m, verify=verify_map, source=M)
    N = tensor(Jn, t_module(TFamily.P_TILDE_MINUS1, m), top=m, name=f"J({n})(x)P~<={m}")
    g_images = {}
    for e, lst in M.pairs.items():
        idx = N.pair_index[e]
        g_images[e] = tuple(1 << idx[p] for p in lst)
    g = ModuleMap(M, N, g_images, "incl", True)
    po = pushout(f, g, check=check, name=f"Q({n},{m})")

    raw = po.module
    basis = {d: [desusp_label(lab[: -len("|t^-1")]) if lab.endswith("|t^-1") else lab
                 for lab in raw.labels(d)] for d in raw.degrees}
    Q = FiniteGradedModule(basis, raw.sq_image, f"Q({n},{m})")
    inclusion = ModuleMap(J(m), Q, po.from_p.images, f"J({m})->Q", True)
    to_q = ModuleMap(N, Q, po.from_n.images, "N->Q", True)

    target = suspend(Jn, -1, f"S^-1J({n})")
    proj = {}
    for d in Q.degrees:
        col = []
        shift = J(m).dim(d)
        for c in po.representatives[d]:
            if c < shift:
                col.append(0)
                continue
            da, ka, kb = N.pairs[d][c - shift]
            col.append(1 << ka if d - da == -1 else 0)
        proj[d] = tuple(col)
    projection = ModuleMap(Q, target, proj, "Q->S^-1J(n)", True)
    qm = QModule(n, m, Q, inclusion, projection, f, to_q)
    if validate:
        qm.validate()
    return qm


def q1_representatives(n: int) -> tuple[Polynomial, Polynomial]:
    """Cycles ``x0^e x(q)^2`` and ``x0^e x1 x(q-1)^2`` spanning H(J(n); Q1), n = 2q + e."""
    if n < 2:
        raise ContractViolation("H(J(n);Q1) has the two-class form only for n >= 2")
    q, e = divmod(n, 2)
    x0e = (e,)
    sq_of = lambda mono: tuple(2 * a for a in mono)  # noqa: E731
    first = polyalg.mono_mul(x0e, sq_of(polyalg.x_of(q)))
    second = polyalg.mono_mul(polyalg.mono_mul(x0e, (0, 1)), sq_of(polyalg.x_of(q - 1)))
    return Polynomial.mono(first), Polynomial.mono(second)


def qbar_composite(n: int, m: int, x, i: int) -> Polynomial:
    """``mu(p(n,l)*(x) (x) p_k(t^(2^i)))`` for ``m = l + 2^k``, ``l < 2^k``."""
    k = m.bit_length() - 1
    l = m - (1 << k)
    Jn = J(n)
    d, v = poly_vector(Jn, x)
    if i > k:
        return Polynomial()
    left = vector_poly(J(l), d, p_map(n, l).apply(d, v)) if J(l).dim(d) else Polynomial()
    mono = [0] * (k - i + 1)
    mono[k - i] = 1 << i
    return left * Polynomial.mono(tuple(mono))


def diagram_edges(M: FiniteGradedModule, squares=(1, 2, 4, 8)) -> list[tuple[int, int, int, int, int]]:
    """Nonzero matrix entries of the given squares: ``(i, d, k, d + i, k2)``."""
    out = []
    for d in M.degrees:
        for i in squares:
            if not M.dim(d + i):
                continue
            for k in range(M.dim(d)):
                for k2 in bits(M.sq_image(i, d, k)):
                    out.append((i, d, k, d + i, k2))
    return out


def to_dot(M: FiniteGradedModule, squares=(1, 2, 4, 8)) -> str:
    """DOT graph: one node per basis class, one labelled edge per nonzero entry."""
    def node(d, k):
        return f"d{d}_{k}".replace("-", "m")

    lines = [f'digraph "{M.name}" {{', "  rankdir=BT;", "  node [shape=plaintext];"]
    for d in M.degrees:
        for k, lab in enumerate(M.labels(d)):
            lines.append(f'  {node(d, k)} [label="{d}: {lab}"];')
    for i, d, k, d2, k2 in diagram_edges(M, squares):
        lines.append(f'  {node(d, k)} -> {node(d2, k2)} [label="sq{i}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def qmodule_dump(qm: QModule) -> dict:
    """Module dump plus the structure maps J(m) -> Q -> Sigma^-1 J(n)."""
    def map_blocks(f: ModuleMap):
        return [{"degree": d, "rows": f.matrix(d).bitstrings()} for d in sorted(f.images)
                if f.source.dim(d) and f.target.dim(d)]

    Jn = J(qm.n)
    section = []
    for d in Jn.degrees:
        for mono in Jn.elements[d]:
            qd, qv = qm.desusp(Polynomial.mono(mono))
            section.append({"x": polyalg.format_mono(mono), "degree": qd,
                            "value": qm.module.describe(qd, qv)})
    return {
        "n": qm.n,
        "m": qm.m,
        "module": qm.module.to_dict(),
        "inclusion": map_blocks(qm.inclusion),
        "projection": map_blocks(qm.projection),
        "desusp_section": section,
    }


def identity(n: int) -> ModuleMap:
    return identity_map(J(n))


def bottom_degree(n: int) -> int:
    return alpha2(n)
