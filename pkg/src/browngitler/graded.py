"""Finite graded modules over the Steenrod algebra, given by a basis in each
degree and the action of every ``Sq^i``.

Actions are evaluated lazily and memoised per basis element, so large
tensor-product windows only pay for the squares that are actually used.
A vector in degree ``d`` is an int whose bit ``k`` is the ``k``-th basis
element of that degree.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterable, Mapping, Sequence

from . import polyalg
from .f2core import (
    Echelon,
    F2Matrix,
    LeftInverse,
    bits,
    f2_kernel_basis,
    f2_rank,
    f2_solve,
)
from .polyalg import TFamily


class ContractViolation(ValueError):
    """Inputs break a documented precondition (shapes, Q_m^2 != 0, ...)."""


class TheoryViolation(RuntimeError):
    """A computation contradicts a structural fact it relies on.

    Raised e.g. when an A-linear map into J(l) fails to exist or to be unique;
    that always points at a construction bug, never at mathematical freedom.
    """


Action = Callable[[int, int, int], int]

A1_WORDS: tuple[tuple[int, ...], ...] = (
    (), (1,), (2,), (1, 2), (2, 1), (1, 2, 1), (2, 1, 2), (2, 1, 2, 1),
)


class FiniteGradedModule:
    """Basis labels per degree plus a (lazy) ``Sq^i`` action.

    ``action(i, d, k)`` must return the image of the ``k``-th basis element of
    degree ``d`` as a bit vector over the basis of degree ``d + i``; it is
    only called for ``i >= 1`` and ``d + i`` inside the module.
    """

    def __init__(
        self,
        basis: Mapping[int, Sequence[str]],
        action: Action,
        name: str = "",
        elements: Mapping[int, Sequence] | None = None,
        qm_action: Callable[[int, int, int], int] | None = None,
    ):
        self._labels = {d: tuple(v) for d, v in sorted(basis.items()) if len(v)}
        self.degrees = tuple(self._labels)
        self.lo = self.degrees[0] if self.degrees else 0
        self.hi = self.degrees[-1] if self.degrees else -1
        self.name = name
        self.elements = {d: tuple(elements[d]) for d in self.degrees} if elements is not None else None
        self._action = action
        self._qm_action = qm_action
        self._memo: dict[tuple[int, int, int], int] = {}
        self._index: dict[str, tuple[int, int]] | None = None

    # -- shape ---------------------------------------------------------------
    def dim(self, d: int) -> int:
        return len(self._labels.get(d, ()))

    @property
    def total_dim(self) -> int:
        return sum(len(v) for v in self._labels.values())

    def labels(self, d: int) -> tuple[str, ...]:
        return self._labels.get(d, ())

    def label(self, d: int, k: int) -> str:
        return self._labels[d][k]

    def locate(self, label: str) -> tuple[int, int]:
        """``(degree, index)`` of a basis label."""
        if self._index is None:
            self._index = {lab: (d, k) for d, labs in self._labels.items() for k, lab in enumerate(labs)}
        return self._index[label]

    def vector(self, labels: Iterable[str]) -> tuple[int, int]:
        """Sum of basis elements given by label; all must share a degree."""
        deg, v = None, 0
        for lab in labels:
            d, k = self.locate(lab)
            if deg is not None and d != deg:
                raise ContractViolation("labels of mixed degree")
            deg = d
            v ^= 1 << k
        if deg is None:
            raise ContractViolation("empty label list")
        return deg, v

    def describe(self, d: int, v: int) -> str:
        if not v:
            return "0"
        return " + ".join(self._labels[d][k] for k in bits(v))

    def poincare(self, lo: int = 0) -> list[int]:
        return [self.dim(d) for d in range(lo, self.hi + 1)]

    def __repr__(self) -> str:
        return f"<FiniteGradedModule {self.name or '?'} degrees {self.lo}..{self.hi} dim {self.total_dim}>"

    # -- action --------------------------------------------------------------
    def sq_image(self, i: int, d: int, k: int) -> int:
        if i == 0:
            return 1 << k
        if not self.dim(d + i):
            return 0
        key = (i, d, k)
        out = self._memo.get(key)
        if out is None:
            out = self._memo[key] = self._action(i, d, k)
        return out

    def sq_images(self, i: int, d: int) -> tuple[int, ...]:
        return tuple(self.sq_image(i, d, k) for k in range(self.dim(d)))

    def sq_matrix(self, i: int, d: int) -> F2Matrix:
        """Matrix of ``Sq^i: M^d -> M^(d+i)`` (rows index the target basis)."""
        return F2Matrix.from_columns(self.sq_images(i, d), self.dim(d + i))

    def apply(self, i: int, d: int, v: int) -> int:
        if i == 0:
            return v
        out = 0
        for k in bits(v):
            out ^= self.sq_image(i, d, k)
        return out

    def apply_word(self, word: Sequence[int], d: int, v: int) -> tuple[int, int]:
        """Apply ``Sq^word[0] ... Sq^word[-1]`` (rightmost first); returns (degree, vector)."""
        for i in reversed(word):
            v = self.apply(i, d, v)
            d += i
        return d, v

    def qm_image(self, m: int, d: int, k: int) -> int:
        if self._qm_action is not None:
            return self._qm_action(m, d, k)
        out = 0
        for word in polyalg._qm_words(m):
            out ^= self.apply_word(word, d, 1 << k)[1]
        return out

    def qm_images(self, m: int, d: int) -> tuple[int, ...]:
        if not self.dim(d + (1 << (m + 1)) - 1):
            return (0,) * self.dim(d)
        return tuple(self.qm_image(m, d, k) for k in range(self.dim(d)))

    # -- checks --------------------------------------------------------------
    def validate(self, unstable: bool = False) -> None:
        """Check the Adem relations Sq^1 Sq^1 = 0, Sq^1 Sq^2 = Sq^3 and
        Sq^2 Sq^2 = Sq^3 Sq^1 on every degree.

        (Sq^1 Sq^2 + Sq^2 Sq^1 is Q_1, not Sq^3.)
        """
        for d in self.degrees:
            for k in range(self.dim(d)):
                v = 1 << k
                if self.apply_word((1, 1), d, v)[1]:
                    raise ContractViolation(f"{self.name}: Sq1Sq1 != 0 on {self.label(d, k)}")
                if self.apply_word((1, 2), d, v)[1] != self.sq_image(3, d, k):
                    raise ContractViolation(f"{self.name}: Sq1Sq2 != Sq3 on {self.label(d, k)}")
                if self.apply_word((2, 2), d, v)[1] != self.apply_word((3, 1), d, v)[1]:
                    raise ContractViolation(f"{self.name}: Sq2Sq2 != Sq3Sq1 on {self.label(d, k)}")
                if unstable:
                    for i in range(d + 1, self.hi - d + 1):
                        if self.sq_image(i, d, k):
                            raise ContractViolation(f"{self.name}: Sq^{i} nonzero on degree-{d} class")

    def materialize(self, name: str | None = None) -> "FiniteGradedModule":
        """Table-backed copy with every Sq^i evaluated."""
        table = {}
        for d in self.degrees:
            for i in range(1, self.hi - d + 1):
                if self.dim(d + i):
                    table[(i, d)] = self.sq_images(i, d)
        return table_module(self._labels, table, name or self.name)

    # -- serialisation -------------------------------------------------------
    def to_dict(self) -> dict:
        sq_blocks = []
        for d in self.degrees:
            for i in range(1, self.hi - d + 1):
                if not self.dim(d + i):
                    continue
                mat = self.sq_matrix(i, d)
                if not mat.is_zero():
                    sq_blocks.append({"i": i, "from": d, "rows": mat.bitstrings()})
        return {
            "name": self.name,
            "lo": self.lo,
            "hi": self.hi,
            "basis": {str(d): list(self._labels[d]) for d in self.degrees},
            "sq": sq_blocks,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)

    def to_text(self) -> str:
        lines = [f"module {self.name}", f"range {self.lo} {self.hi}"]
        for d in self.degrees:
            lines.append(f"degree {d} {self.dim(d)}")
            lines.extend(f"  {lab}" for lab in self._labels[d])
        for blk in self.to_dict()["sq"]:
            lines.append(f"sq {blk['i']} {blk['from']} {' '.join(blk['rows'])}")
        return "\n".join(lines) + "\n"


def table_module(basis: Mapping[int, Sequence[str]], table: Mapping[tuple[int, int], Sequence[int]],
                 name: str = "", elements=None) -> FiniteGradedModule:
    """Module whose action is a fixed table ``{(i, d): images}``."""
    frozen = {key: tuple(v) for key, v in table.items()}

    def action(i, d, k):
        imgs = frozen.get((i, d))
        return imgs[k] if imgs is not None else 0

    return FiniteGradedModule(basis, action, name, elements)


def module_from_dict(data: dict) -> FiniteGradedModule:
    basis = {int(d): labs for d, labs in data["basis"].items()}
    table = {}
    for blk in data["sq"]:
        d, i = blk["from"], blk["i"]
        ncols = len(basis[d])
        mat = F2Matrix.from_bitstrings(blk["rows"], ncols)
        table[(i, d)] = mat.columns()
    return table_module(basis, table, data.get("name", ""))


def module_from_json(text: str) -> FiniteGradedModule:
    return module_from_dict(json.loads(text))


def module_from_text(text: str) -> FiniteGradedModule:
    name, basis, blocks = "", {}, []
    current = None
    for raw in text.splitlines():
        if not raw.strip():
            continue
        if raw.startswith("  "):
            basis[current].append(raw.strip())
            continue
        head, *rest = raw.split(" ", 1)
        rest = rest[0] if rest else ""
        if head == "module":
            name = rest
        elif head == "range":
            pass
        elif head == "degree":
            current = int(rest.split()[0])
            basis[current] = []
        elif head == "sq":
            i, d, *rows = rest.split()
            blocks.append({"i": int(i), "from": int(d), "rows": rows})
        else:
            raise ValueError(f"unrecognised dump line {raw!r}")
    return module_from_dict({"name": name, "basis": {str(d): v for d, v in basis.items()}, "sq": blocks})


def poincare(module: FiniteGradedModule, lo: int = 0) -> list[int]:
    """Degreewise dimensions from degree ``lo`` up to the top of the module."""
    return module.poincare(lo)


# --------------------------------------------------------------------------
# constructions
# --------------------------------------------------------------------------

@lru_cache(maxsize=256)
def module_from_weight(n: int) -> FiniteGradedModule:
    """J(n): the weight-``n`` monomials in x0, x1, ...."""
    if n < 0:
        raise ContractViolation("weight must be nonnegative")
    by_deg: dict[int, list] = {}
    for mono in polyalg.weight_basis(n):
        by_deg.setdefault(polyalg.degree(mono), []).append(mono)
    index = {mono: k for monos in by_deg.values() for k, mono in enumerate(monos)}

    def action(i, d, k):
        out = 0
        for t in polyalg.sq_mono(i, by_deg[d][k]):
            out ^= 1 << index[t]
        return out

    def qm_action(m, d, k):
        out = 0
        for t in polyalg.qm_mono(m, by_deg[d][k]):
            out ^= 1 << index[t]
        return out

    basis = {d: [polyalg.format_mono(x) for x in monos] for d, monos in by_deg.items()}
    mod = FiniteGradedModule(basis, action, f"J({n})", elements=by_deg, qm_action=qm_action)
    mod.monomial_index = index
    return mod


def poly_vector(module: FiniteGradedModule, p) -> tuple[int, int]:
    """Coordinates of a homogeneous polynomial in a weight module."""
    p = polyalg.as_poly(p)
    degs = p.degrees()
    if len(degs) != 1:
        raise ContractViolation(f"{p} is not homogeneous")
    deg = degs.pop()
    v = 0
    for t in p.terms:
        v ^= 1 << module.monomial_index[t]
    return deg, v


def vector_poly(module: FiniteGradedModule, d: int, v: int) -> polyalg.Polynomial:
    return polyalg.Polynomial(module.elements[d][k] for k in bits(v))


def t_module(family: TFamily, top: int, d: int = 0) -> FiniteGradedModule:
    """Truncation at degree ``top`` of one of the modules inside Z/2[t]."""
    start = {TFamily.POLY_T: 0, TFamily.IDEAL_T: 1, TFamily.F1: 1,
             TFamily.P_D: d, TFamily.P_TILDE_MINUS1: -1}[family]
    exps = [j for j in range(start, top + 1) if polyalg.t_admits(family, j, d)]
    basis = {j: [f"t^{j}"] for j in exps}

    def action(i, j, k):
        out = polyalg.t_sq_exponent(i, family, j, d)
        return 1 if out is not None and out <= top else 0

    def qm_action(m, j, k):
        out = polyalg.t_qm_exponent(m, family, j, d)
        return 1 if out is not None and out <= top else 0

    tag = family.name if family is not TFamily.P_D else f"P_{d}"
    return FiniteGradedModule(basis, action, f"{tag}<={top}",
                              elements={j: [j] for j in exps}, qm_action=qm_action)


def tensor(M: FiniteGradedModule, N: FiniteGradedModule, top: int | None = None,
           name: str | None = None) -> FiniteGradedModule:
    """``M (x) N`` with the Cartan action, optionally truncated at degree ``top``."""
    hi = M.hi + N.hi if top is None else min(top, M.hi + N.hi)
    pairs: dict[int, list[tuple[int, int, int]]] = {}
    for da in M.degrees:
        for db in N.degrees:
            e = da + db
            if e > hi:
                continue
            lst = pairs.setdefault(e, [])
            for ka in range(M.dim(da)):
                for kb in range(N.dim(db)):
                    lst.append((da, ka, kb))
    index = {e: {p: k for k, p in enumerate(lst)} for e, lst in pairs.items()}

    def action(i, e, k):
        da, ka, kb = pairs[e][k]
        db = e - da
        tgt = index.get(e + i)
        if tgt is None:
            return 0
        out = 0
        for a in range(i + 1):
            va = M.sq_image(a, da, ka)
            if not va:
                continue
            vb = N.sq_image(i - a, db, kb)
            if not vb:
                continue
            ua = list(bits(va))
            for wb in bits(vb):
                for wa in ua:
                    out ^= 1 << tgt[(da + a, wa, wb)]
        return out

    basis = {e: [f"{M.label(da, ka)}|{N.label(e - da, kb)}" for da, ka, kb in lst] for e, lst in pairs.items()}
    mod = FiniteGradedModule(basis, action, name or f"{M.name}(x){N.name}")
    mod.pair_index = index
    mod.pairs = pairs
    return mod


def suspend(M: FiniteGradedModule, s: int, name: str | None = None) -> FiniteGradedModule:
    basis = {d + s: M.labels(d) for d in M.degrees}
    elements = {d + s: M.elements[d] for d in M.degrees} if M.elements is not None else None
    qm = None
    if M._qm_action is not None:
        qm = lambda m, d, k: M.qm_image(m, d - s, k)  # noqa: E731
    return FiniteGradedModule(basis, lambda i, d, k: M.sq_image(i, d - s, k),
                              name or f"S^{s}{M.name}", elements, qm)


def truncate(M: FiniteGradedModule, top: int, name: str | None = None) -> FiniteGradedModule:
    if top < M.lo:
        raise ContractViolation("truncation below the bottom of the module")
    basis = {d: M.labels(d) for d in M.degrees if d <= top}
    elements = {d: M.elements[d] for d in basis} if M.elements is not None else None
    qm = None
    if M._qm_action is not None:
        qm = M._qm_action
    return FiniteGradedModule(basis, lambda i, d, k: M.sq_image(i, d, k),
                              name or f"{M.name}<={top}", elements, qm)


# --------------------------------------------------------------------------
# maps
# --------------------------------------------------------------------------

@dataclass
class ModuleMap:
    """Degree-preserving linear map given by the images of basis elements."""

    source: FiniteGradedModule
    target: FiniteGradedModule
    images: dict[int, tuple[int, ...]]
    name: str = ""
    a_linear: bool = False

    def image(self, d: int, k: int) -> int:
        imgs = self.images.get(d)
        return imgs[k] if imgs is not None else 0

    def apply(self, d: int, v: int) -> int:
        imgs = self.images.get(d)
        if imgs is None:
            return 0
        out = 0
        for k in bits(v):
            out ^= imgs[k]
        return out

    def matrix(self, d: int) -> F2Matrix:
        imgs = self.images.get(d, (0,) * self.source.dim(d))
        return F2Matrix.from_columns(imgs, self.target.dim(d))

    def rank(self, d: int) -> int:
        return f2_rank(self.matrix(d))

    def is_zero(self) -> bool:
        return not any(any(v) for v in self.images.values())

    def linearity_failures(self, squares: Iterable[int] | None = None) -> list[tuple[int, int, int]]:
        """All ``(i, d, k)`` where ``f Sq^i e_k != Sq^i f e_k``."""
        src, tgt = self.source, self.target
        bad = []
        for d in src.degrees:
            top = max(src.hi, tgt.hi) - d
            for i in (squares if squares is not None else range(1, top + 1)):
                if i < 1 or i > top:
                    continue
                for k in range(src.dim(d)):
                    lhs = self.apply(d + i, src.sq_image(i, d, k)) if src.dim(d + i) else 0
                    rhs = tgt.apply(i, d, self.image(d, k)) if tgt.dim(d) else 0
                    if lhs != rhs:
                        bad.append((i, d, k))
        return bad

    def certify(self) -> "ModuleMap":
        bad = self.linearity_failures()
        if bad:
            i, d, k = bad[0]
            raise TheoryViolation(f"{self.name}: not A-linear at Sq^{i} on {self.source.label(d, k)}")
        self.a_linear = True
        return self

    def compose(self, first: "ModuleMap", name: str = "") -> "ModuleMap":
        """``self o first``."""
        images = {}
        for d in first.source.degrees:
            images[d] = tuple(self.apply(d, first.image(d, k)) for k in range(first.source.dim(d)))
        return ModuleMap(first.source, self.target, images, name or f"{self.name}o{first.name}",
                         self.a_linear and first.a_linear)

    def equals(self, other: "ModuleMap") -> bool:
        for d in set(self.source.degrees) | set(other.source.degrees):
            for k in range(self.source.dim(d)):
                if self.image(d, k) != other.image(d, k):
                    return False
        return True


def identity_map(M: FiniteGradedModule) -> ModuleMap:
    return ModuleMap(M, M, {d: tuple(1 << k for k in range(M.dim(d))) for d in M.degrees},
                     f"id_{M.name}", True)


def _powers_below(span: int) -> list[int]:
    out, s = [], 1
    while s <= span:
        out.append(s)
        s <<= 1
    return out


def hom_solver(M: FiniteGradedModule, l: int, phi: int, verify: bool = False,
               target: FiniteGradedModule | None = None) -> ModuleMap:
    """The unique A-linear ``f: M -> J(l)`` whose degree-``l`` part is ``phi``.

    ``phi`` is a bit vector over the basis of ``M^l``: bit ``k`` set means the
    ``k``-th basis element goes to the top class ``x0^l``.  ``M`` must be (a
    truncation at degree >= l of) an unstable module.

    Works downward from degree ``l``: below the top, an element of J(l) is
    determined by its images under the ``Sq^(2^j)``, so each ``f(x)`` is the
    solution of ``Sq^(2^j) f(x) = f(Sq^(2^j) x)`` for all ``j``.  The stacked
    operator is checked injective (uniqueness) and every system is checked
    consistent (existence, i.e. A-linearity against the generators).
    """
    J = target if target is not None else module_from_weight(l)
    images: dict[int, tuple[int, ...]] = {}
    if phi >> M.dim(l):
        raise ContractViolation("phi has bits beyond dim M^l")
    if M.dim(l):
        images[l] = tuple(((phi >> k) & 1) for k in range(M.dim(l)))
    f = ModuleMap(M, J, images, f"hom(M,J({l}))")
    floor = max(M.lo, J.lo)
    for d in range(l - 1, floor - 1, -1):
        if not M.dim(d) or not J.dim(d):
            continue
        gens = [s for s in _powers_below(l - d) if J.dim(d + s)]
        offsets, off = [], 0
        for s in gens:
            offsets.append(off)
            off += J.dim(d + s)
        cols = []
        for r in range(J.dim(d)):
            c = 0
            for s, o in zip(gens, offsets):
                c |= J.sq_image(s, d, r) << o
            cols.append(c)
        inv = LeftInverse(cols)
        if not inv.injective:
            raise TheoryViolation(f"J({l}) is not detected by Sq^(2^j) in degree {d}")
        row = []
        for k in range(M.dim(d)):
            b = 0
            for s, o in zip(gens, offsets):
                b |= f.apply(d + s, M.sq_image(s, d, k)) << o
            y = inv.solve(b)
            if y is None:
                raise TheoryViolation(
                    f"no A-linear map M -> J({l}) extends phi (degree {d}, {M.label(d, k)})")
            row.append(y)
        images[d] = tuple(row)
    if verify:
        # below the bottom of J(l) the map is zero; the constraints landing
        # in range must still vanish
        for d in M.degrees:
            if d >= floor:
                continue
            for s in _powers_below(l - d):
                for k in range(M.dim(d)):
                    if f.apply(d + s, M.sq_image(s, d, k)):
                        raise TheoryViolation(f"inconsistent below J({l}) at degree {d}")
        f.certify()
    f.a_linear = True
    return f


def hom_system(M: FiniteGradedModule, l: int, J: FiniteGradedModule | None = None):
    """Monolithic linear system for A-linear maps ``M -> J(l)``.

    Unknowns are all matrix entries of all degree blocks; equations are
    ``f Sq^(2^j) = Sq^(2^j) f`` in every degree.  Returns ``(matrix, var)``
    where ``var[(d, r, c)]`` is the column of entry (row r, col c) of block d.
    """
    J = J if J is not None else module_from_weight(l)
    var: dict[tuple[int, int, int], int] = {}
    for d in M.degrees:
        for r in range(J.dim(d)):
            for c in range(M.dim(d)):
                var[(d, r, c)] = len(var)
    eqs = []
    span = max(M.hi, J.hi) - min(M.lo, J.lo)
    for d in M.degrees:
        for s in _powers_below(span):
            e = d + s
            if not J.dim(e):
                continue
            for c in range(M.dim(d)):
                src_img = M.sq_image(s, d, c) if M.dim(e) else 0
                for r2 in range(J.dim(e)):
                    row = 0
                    # (Sq^s f_d)[r2, c] = sum_r Sq[r2, r] f_d[r, c]
                    for r in range(J.dim(d)):
                        if (J.sq_image(s, d, r) >> r2) & 1:
                            row ^= 1 << var[(d, r, c)]
                    # (f_e Sq^s)[r2, c] = sum_c2 f_e[r2, c2] Sq[c2, c]
                    for c2 in bits(src_img):
                        row ^= 1 << var[(e, r2, c2)]
                    if row:
                        eqs.append(row)
    return F2Matrix(len(eqs), len(var), tuple(eqs)), var


def hom_space_dimension(M: FiniteGradedModule, l: int) -> int:
    mat, var = hom_system(M, l)
    return len(var) - f2_rank(mat)


def hom_solver_monolithic(M: FiniteGradedModule, l: int, phi: int) -> tuple[ModuleMap, int]:
    """Same contract as ``hom_solver`` by one global F2 solve.

    Returns the map and the dimension of the remaining solution space.
    """
    J = module_from_weight(l)
    mat, var = hom_system(M, l, J)
    rows = list(mat.rows)
    rhs = [0] * len(rows)
    for c in range(M.dim(l)):
        rows.append(1 << var[(l, 0, c)])
        rhs.append((phi >> c) & 1)
    b = sum(bit << k for k, bit in enumerate(rhs))
    sol = f2_solve(F2Matrix(len(rows), len(var), tuple(rows)), b)
    if sol is None:
        raise TheoryViolation("inconsistent hom system")
    images = {}
    for d in M.degrees:
        col = []
        for c in range(M.dim(d)):
            v = 0
            for r in range(J.dim(d)):
                if (sol.particular >> var[(d, r, c)]) & 1:
                    v |= 1 << r
            col.append(v)
        images[d] = tuple(col)
    return ModuleMap(M, J, images, f"hom(M,J({l}))"), sol.dimension


# --------------------------------------------------------------------------
# pushout
# --------------------------------------------------------------------------

@dataclass
class Pushout:
    module: FiniteGradedModule
    from_p: ModuleMap
    from_n: ModuleMap
    representatives: dict[int, tuple[int, ...]] = field(default_factory=dict)


def pushout(f: ModuleMap, g: ModuleMap, check: str = "generators", name: str = "") -> Pushout:
    """``Q = (P + N) / {(f x, g x)}`` for ``f: M -> P``, ``g: M -> N``.

    Coordinates in degree ``d``: P's basis in the low bits, N's above.  The
    relation rows are echelonised on their highest bit, so the quotient basis
    is the set of non-pivot coordinates in canonical order.  ``check`` is one
    of ``"all"``, ``"generators"`` (only ``Sq^(2^j)``) or ``"none"``; it
    certifies that the induced action does not depend on representatives.
    """
    if f.source is not g.source:
        raise ContractViolation("pushout legs need a common source")
    M, P, N = f.source, f.target, g.target
    degrees = sorted(set(P.degrees) | set(N.degrees))
    ech: dict[int, Echelon] = {}
    free: dict[int, list[int]] = {}
    pos: dict[int, dict[int, int]] = {}
    for d in degrees:
        e = Echelon()
        shift = P.dim(d)
        for k in range(M.dim(d)):
            e.add(f.image(d, k) | (g.image(d, k) << shift))
        width = P.dim(d) + N.dim(d)
        nonpiv = [c for c in range(width) if not (e.mask >> c) & 1]
        ech[d] = e
        free[d] = nonpiv
        pos[d] = {c: q for q, c in enumerate(nonpiv)}

    def compress(d: int, v: int) -> int:
        v = ech[d].reduce(v)[0]
        out = 0
        p = pos[d]
        for c in bits(v):
            out |= 1 << p[c]
        return out

    def lift_action(i: int, d: int, v: int) -> int:
        e = d + i
        if e not in ech:
            return 0
        shift = P.dim(d)
        pv = v & ((1 << shift) - 1)
        nv = v >> shift
        return P.apply(i, d, pv) | (N.apply(i, d, nv) << P.dim(e))

    def action(i, d, q):
        return compress(d + i, lift_action(i, d, 1 << free[d][q]))

    basis = {}
    for d in degrees:
        shift = P.dim(d)
        labs = []
        for c in free[d]:
            labs.append(P.label(d, c) if c < shift else N.label(d, c - shift))
        basis[d] = labs
    Q = FiniteGradedModule(basis, action, name or f"pushout({P.name},{N.name})")

    if check != "none":
        for d in M.degrees:
            span = Q.hi - d
            squares = range(1, span + 1) if check == "all" else _powers_below(span)
            for i in squares:
                if d + i not in ech:
                    continue
                for k in range(M.dim(d)):
                    rel = f.image(d, k) | (g.image(d, k) << P.dim(d))
                    if ech[d + i].reduce(lift_action(i, d, rel))[0]:
                        raise ContractViolation(
                            f"induced Sq^{i} not well defined (relation from {M.label(d, k)})")

    from_p = ModuleMap(P, Q, {d: tuple(compress(d, 1 << k) for k in range(P.dim(d))) for d in P.degrees if d in ech},
                       "P->Q", True)
    from_n = ModuleMap(N, Q, {d: tuple(compress(d, (1 << k) << P.dim(d)) for k in range(N.dim(d)))
                              for d in N.degrees if d in ech}, "N->Q", True)
    return Pushout(Q, from_p, from_n, {d: tuple(free[d]) for d in degrees})


# --------------------------------------------------------------------------
# Margolis homology
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class MargolisDegree:
    degree: int
    kernel: int
    image: int
    homology: int
    representatives: tuple[int, ...]


@dataclass
class MargolisReport:
    m: int
    module_name: str
    degrees: dict[int, MargolisDegree]
    complete: bool = True
    excluded: tuple[int, ...] = ()

    @property
    def total(self) -> int:
        return sum(r.homology for d, r in self.degrees.items() if d not in self.excluded)

    @property
    def acyclic(self) -> bool:
        return self.total == 0

    def profile(self) -> dict[int, int]:
        """Nonzero homology dimensions by degree (verdict degrees only)."""
        return {d: r.homology for d, r in sorted(self.degrees.items())
                if r.homology and d not in self.excluded}

    def first_class(self) -> tuple[int, int] | None:
        for d, r in sorted(self.degrees.items()):
            if d not in self.excluded and r.representatives:
                return d, r.representatives[0]
        return None

    def format(self, module: FiniteGradedModule | None = None) -> str:
        lines = [f"Q{self.m}-homology of {self.module_name}: total {self.total}"
                 + ("" if self.complete else f" (window edge degrees {list(self.excluded)} excluded)")]
        lines.append("deg  ker  im  H  representatives")
        for d, r in sorted(self.degrees.items()):
            reps = ""
            if module is not None and r.representatives:
                reps = "; ".join(module.describe(d, v) for v in r.representatives)
            mark = "*" if d in self.excluded else " "
            lines.append(f"{d:3d}{mark} {r.kernel:3d} {r.image:3d} {r.homology:2d}  {reps}")
        return "\n".join(lines)


def qm_blocks(M: FiniteGradedModule, m: int) -> dict[int, tuple[int, ...]]:
    return {d: M.qm_images(m, d) for d in M.degrees}


def margolis(M: FiniteGradedModule, m: int, blocks: Mapping[int, Sequence[int]] | None = None,
             complete: bool = True) -> MargolisReport:
    """``ker Q_m / im Q_m`` degree by degree.

    For a truncated window (``complete=False``) the degrees whose ``Q_m``
    target lies above the window are reported but left out of the verdict.
    """
    s = (1 << (m + 1)) - 1
    if blocks is None:
        blocks = qm_blocks(M, m)
    for d in M.degrees:
        nxt = blocks.get(d + s)
        if nxt is None:
            continue
        for k, img in enumerate(blocks[d]):
            acc = 0
            for b in bits(img):
                acc ^= nxt[b]
            if acc:
                raise ContractViolation(f"Q{m}^2 != 0 on {M.label(d, k)}")
    out = {}
    excluded = []
    for d in M.degrees:
        imgs = blocks[d]
        ker = f2_kernel_basis(F2Matrix.from_columns(imgs, M.dim(d + s)))
        below = blocks.get(d - s, ())
        e = Echelon()
        for v in below:
            e.add(v)
        im = len(e)
        reps = [v for v in ker if e.add(v)]
        out[d] = MargolisDegree(d, len(ker), im, len(ker) - im, tuple(reps))
        if not complete and d + s > M.hi:
            excluded.append(d)
    return MargolisReport(m, M.name, out, complete, tuple(excluded))


def induced_rank(f: ModuleMap, m: int, src: MargolisReport | None = None,
                 tgt: MargolisReport | None = None) -> int:
    """Rank of the map ``f`` induces on ``Q_m``-homology."""
    src = src or margolis(f.source, m)
    s = (1 << (m + 1)) - 1
    rank = 0
    for d, r in src.degrees.items():
        if not r.representatives:
            continue
        e = Echelon()
        for v in f.target.qm_images(m, d - s) if f.target.dim(d - s) else ():
            e.add(v)
        base = len(e)
        for v in r.representatives:
            e.add(f.apply(d, v))
        rank += len(e) - base
    return rank


def is_margolis_iso(f: ModuleMap, m: int) -> bool:
    src = margolis(f.source, m)
    tgt = margolis(f.target, m)
    if src.profile() != tgt.profile():
        return False
    return induced_rank(f, m, src) == tgt.total


# --------------------------------------------------------------------------
# A(1)
# --------------------------------------------------------------------------

@dataclass
class A1Decomposition:
    free: bool
    generator_degrees: list[int]
    generators: list[tuple[int, int]]
    witness: tuple | None = None

    def __bool__(self) -> bool:
        return self.free


def a1_free_decomposition(M: FiniteGradedModule) -> A1Decomposition:
    """Peel off free A(1) summands generated in the lowest uncovered degree.

    In each degree the first basis element not yet in the A(1)-span of the
    chosen generators becomes a generator; its eight images under the
    admissible words in Sq^1, Sq^2 must be independent of everything chosen
    so far.  Because all lower degrees are already covered, such an element
    is indecomposable, so the verdict does not depend on these choices.
    """
    span = {d: Echelon() for d in M.degrees}
    gens: list[tuple[int, int]] = []
    for d in M.degrees:
        for k in range(M.dim(d)):
            v = 1 << k
            if span[d].contains(v):
                continue
            for word in A1_WORDS:
                e, w = M.apply_word(word, d, v)
                if e not in span or not span[e].add(w):
                    return A1Decomposition(False, [g[0] for g in gens], gens,
                                           ("dependent orbit", d, M.label(d, k), word))
            gens.append((d, v))
    for d in M.degrees:
        if len(span[d]) != M.dim(d):
            return A1Decomposition(False, [g[0] for g in gens], gens, ("not exhausted", d))
    return A1Decomposition(True, [g[0] for g in gens], gens)
