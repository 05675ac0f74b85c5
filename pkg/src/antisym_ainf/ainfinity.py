"""
G-gapped A∞ structures and pre-homomorphisms over a truncation window.

Structures (role "m") have operations m_{k,beta} of degree 2-k; pre-
homomorphisms (role "f") have f_{k,beta} of degree 1-k.  Everything is
stored sparsely on basis tuples and evaluated for k <= k_max and
beta <= E_max.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional

from . import multilinear as ml
from .graded import (
    FreeGCA, LinearMap, Space, cohomology, reversal_parity, vadd,
)
from .scalars import ONE, ZERO, TruncParams, fmt_rational, rational

STRUCTURE = "m"
PREHOM = "f"


class DegreeError(ValueError):
    pass


class SlotFailure(NamedTuple):
    """A failing (k, beta) slot with the first basis tuple witnessing it."""

    k: int
    beta: object
    inputs: tuple
    value: dict

    def describe(self, space: Space) -> str:
        ins = ", ".join(space.labels[i] for i in self.inputs)
        return "(k=%d, beta=%s) at (%s): %s" % (
            self.k, fmt_rational(self.beta), ins, space.format(self.value))


class GappedStructure:
    """Sparse table of gapped operations on basis tuples.

    ``entries`` maps (k, beta) to {inputs tuple: {output index: coeff}}.
    For role "f" the target space may differ from the source.
    """

    def __init__(self, source: Space, entries=None, role=STRUCTURE, target=None,
                 validate=True):
        if role not in (STRUCTURE, PREHOM):
            raise ValueError("role must be 'm' or 'f'")
        self.source = source
        self.target = target if target is not None else source
        if role == STRUCTURE and self.target != source:
            raise ValueError("an A∞ structure is an endomorphism family")
        self.role = role
        norm = {}
        for (k, beta), mm in (entries or {}).items():
            norm[(int(k), rational(beta))] = mm
        self.entries = ml.clean(norm)
        if validate:
            self._validate()

    @property
    def space(self) -> Space:
        return self.source

    def _validate(self):
        shift = 2 if self.role == STRUCTURE else 1
        sd, td = self.source.degrees, self.target.degrees
        for (k, beta), mm in self.entries.items():
            if beta < 0:
                raise DegreeError("negative energy %s" % fmt_rational(beta))
            if k == 0 and beta == 0:
                raise DegreeError(
                    "(k, beta) = (0, 0) entry violates ||%s_0|| < 1" % self.role)
            for key, vec in mm.items():
                if len(key) != k:
                    raise DegreeError("entry %r filed under arity %d" % (key, k))
                want = self.target.deg(sum(sd[i] for i in key) + shift - k)
                for o in vec:
                    if td[o] != want:
                        raise DegreeError(
                            "entry (%d, %s) at %s has output %s of degree %d, "
                            "expected %d" % (
                                k, fmt_rational(beta),
                                tuple(self.source.labels[i] for i in key),
                                self.target.labels[o], td[o], want))

    # -- constructors -----------------------------------------------------

    @classmethod
    def zero(cls, space, role=STRUCTURE, target=None):
        return cls(space, {}, role, target)

    @classmethod
    def canonical(cls, space: Space):
        """m∞: only m_{2,0}(a, b) = (-1)^{|a|} a∧b on the ΛV summand."""
        gca = space.gca
        if gca is None:
            raise ValueError("space carries no free graded-commutative algebra")
        mm = {}
        for a in range(gca.size):
            sa = -1 if gca.degrees[a] & 1 else 1
            for b in range(gca.size):
                r = gca.mul_basis(a, b)
                if r is not None:
                    s, c = r
                    mm[(a, b)] = {c: rational(s * sa)}
        return cls(space, {(2, ZERO): mm}, STRUCTURE)

    @classmethod
    def identity(cls, space, target=None):
        return cls(space, {(1, ZERO): {(i,): {i: ONE} for i in range(space.dim)}},
                   PREHOM, target)

    @classmethod
    def strict(cls, lin: LinearMap):
        if lin.degree != 0:
            raise DegreeError("a strict pre-homomorphism has degree 0")
        return cls(lin.source, {(1, ZERO): {(j,): c for j, c in lin.cols.items()}},
                   PREHOM, lin.target)

    # -- access -----------------------------------------------------------

    def entry(self, k, beta=ZERO) -> dict:
        return self.entries.get((k, rational(beta)), {})

    def slots(self):
        return sorted(self.entries, key=lambda s: (s[0] + s[1], s[0], s[1]))

    def energies(self):
        return sorted({b for _, b in self.entries})

    def linear_part(self, beta=ZERO) -> LinearMap:
        mm = self.entry(1, beta)
        return LinearMap(self.source, self.target, {k[0]: v for k, v in mm.items()})

    def gapped_linear(self) -> dict:
        return {b: {key[0]: v for key, v in mm.items()}
                for (k, b), mm in self.entries.items() if k == 1}

    def restricted(self, kcap=None, ecap=None) -> "GappedStructure":
        return self._new(ml.restrict(self.entries, kcap, ecap))

    def _new(self, entries, role=None, source=None, target=None):
        return GappedStructure(source or self.source, entries, role or self.role,
                               target or self.target, validate=False)

    def is_zero(self) -> bool:
        return not self.entries

    def nnz(self) -> int:
        return sum(len(v) for mm in self.entries.values() for v in mm.values())

    def __eq__(self, other):
        return (isinstance(other, GappedStructure) and self.role == other.role
                and self.entries == other.entries)

    def __repr__(self):
        return "GappedStructure(role=%s, slots=%s, nnz=%d)" % (
            self.role, [(k, fmt_rational(b)) for k, b in self.slots()], self.nnz())

    def table(self) -> dict:
        return ml.fanin_table(self.entries)

    def is_weakly_minimal(self) -> bool:
        return (1, ZERO) not in self.entries

    def is_flat(self) -> bool:
        return not any(k == 0 for k, _ in self.entries)

    def is_minimal(self) -> bool:
        return not any(k == 1 for k, _ in self.entries)


def _window(trunc: TruncParams, output_arity=None):
    return (trunc.arity if output_arity is None else output_arity), trunc.energy


def _failures(diff: dict) -> list:
    out = []
    for slot in sorted(diff, key=lambda s: (s[0], s[1])):
        key = min(diff[slot])
        out.append(SlotFailure(slot[0], slot[1], key, diff[slot][key]))
    return out


# ---------------------------------------------------------------------------
# relations


def ainf_relation(m: GappedStructure, trunc: TruncParams) -> dict:
    """The left side of the gapped A∞ relation for k <= k_max - 1."""
    kcap, ecap = trunc.arity - 1, trunc.energy
    return ml.clean(ml.insertion(m.entries, m.table(), m.source.degrees, kcap, ecap))


def check_ainf(m: GappedStructure, trunc: TruncParams) -> list:
    """Violated (k, beta) slots of the A∞ relations; empty list = pass."""
    if m.role != STRUCTURE:
        raise ValueError("check_ainf expects a structure")
    m._validate()
    return _failures(ainf_relation(m, trunc))


def opposite(s: GappedStructure) -> GappedStructure:
    """Reverse inputs with sign (-1)^{spe(τ; α) + k + 1}; an involution."""
    deg = s.source.degrees
    out = {}
    for (k, b), mm in s.entries.items():
        new = {}
        for key, vec in mm.items():
            sign = reversal_parity([deg[i] for i in key]) ^ ((k + 1) & 1)
            new[key[::-1]] = {i: -x for i, x in vec.items()} if sign else dict(vec)
        out[(k, b)] = new
    return s._new(out)


def conjugate(s: GappedStructure, c_source: LinearMap, c_target: LinearMap,
              trunc: TruncParams) -> GappedStructure:
    """c_target⁻¹ ∘ s ∘ c_source^{⊗k} for involutions c (so c⁻¹ = c)."""
    tab = ml.linear_table(c_source.cols)
    pre = ml.composite(s.entries, tab, trunc.arity, trunc.energy)
    out = ml.apply_outputs(pre, {ZERO: c_target.cols}, trunc.energy)
    return s._new(ml.clean(out))


def _check_involution(c: LinearMap):
    if c.source != c.target or c.degree != 0:
        raise ValueError("involution must be a degree-0 endomorphism")
    if not (c @ c).is_identity():
        raise ValueError("c is not an involution")


@dataclass
class Verdict:
    ok: bool
    witness: Optional[SlotFailure] = None
    reason: str = ""

    def __bool__(self):
        return self.ok


def check_self_dual(m: GappedStructure, c: LinearMap, trunc: TruncParams) -> Verdict:
    """m(c̄α_1..c̄α_k) = (-1)^{spe(τ;α)+k+1} c̄ m(α_k..α_1) on all basis tuples."""
    _check_involution(c)
    lhs = conjugate(m, c, c, trunc).restricted(trunc.arity, trunc.energy)
    rhs = opposite(m).restricted(trunc.arity, trunc.energy)
    return _compare(lhs.entries, rhs.entries)


def is_self_dual_prehom(f: GappedStructure, c_source: LinearMap, c_target: LinearMap,
                        trunc: TruncParams) -> Verdict:
    """f ∘ c_C = c_D ∘ f^op, tested entrywise."""
    _check_involution(c_source)
    _check_involution(c_target)
    lhs = conjugate(f, c_source, c_target, trunc).restricted(trunc.arity, trunc.energy)
    rhs = opposite(f).restricted(trunc.arity, trunc.energy)
    return _compare(lhs.entries, rhs.entries)


def _compare(a: dict, b: dict) -> Verdict:
    d = ml.first_difference(a, b)
    if d is None:
        return Verdict(True)
    (k, beta), key, val = d
    return Verdict(False, SlotFailure(k, beta, key, val))


# ---------------------------------------------------------------------------
# composition, homomorphisms


def compose(g: GappedStructure, f: GappedStructure, trunc: TruncParams) -> GappedStructure:
    """(g∘f)_{k,beta} = sum g_{l,b0}(f_{r1,b1}(..), ..., f_{rl,bl}(..))."""
    entries = ml.composite(g.entries, f.table(), trunc.arity, trunc.energy)
    return GappedStructure(f.source, ml.clean(entries), PREHOM, g.target, validate=False)


def homomorphism_defect(f, mC, mD, trunc: TruncParams) -> dict:
    kcap, ecap = trunc.arity - 1, trunc.energy
    lhs = ml.composite(mD.entries, f.table(), kcap, ecap)
    rhs = ml.insertion(f.entries, mC.table(), f.source.degrees, kcap, ecap)
    return ml.combine((ONE, lhs), (-ONE, rhs))


def check_homomorphism(f, mC, mD, trunc: TruncParams) -> Verdict:
    """Gapped A∞ homomorphism relation for output arities <= k_max - 1."""
    if f.role != PREHOM or mC.role != STRUCTURE or mD.role != STRUCTURE:
        raise ValueError("check_homomorphism(f, mC, mD) expects roles f, m, m")
    diff = homomorphism_defect(f, mC, mD, trunc)
    if not diff:
        return Verdict(True)
    return Verdict(False, _failures(diff)[0])


# ---------------------------------------------------------------------------
# gapped linear maps and formal diffeomorphisms


def gapped_linear_mul(a: dict, b: dict, ecap) -> dict:
    """(a∘b) for gapped linear maps {beta: cols}."""
    out: dict = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = ea + eb
            if e > ecap:
                continue
            acc = out.setdefault(e, {})
            for j, col in cb.items():
                v = {}
                for i, x in col.items():
                    ci = ca.get(i)
                    if ci:
                        vadd(v, ci, x)
                if v:
                    vadd(acc.setdefault(j, {}), v)
    return {e: {j: c for j, c in cols.items() if c} for e, cols in out.items()
            if any(cols.values())}


def invert_linear(f: GappedStructure, trunc: TruncParams) -> dict:
    """Gapped inverse of f_1 = sum T^beta f_{1,beta}; {beta: cols}."""
    f1 = f.gapped_linear()
    if ZERO not in f1:
        raise ZeroDivisionError("f_{1,0} is singular (absent)")
    base = LinearMap(f.source, f.target, f1[ZERO])
    try:
        a0 = base.inverse().cols
    except (ZeroDivisionError, ValueError):
        raise ZeroDivisionError("f_{1,0} is singular") from None
    nil = {e: c for e, c in f1.items() if e > 0}
    result = {ZERO: a0}
    if not nil:
        return result
    # (F0 + N)^{-1} = sum_n (-A0 N)^n A0
    step = {e: {j: {i: -x for i, x in col.items()} for j, col in cols.items()}
            for e, cols in gapped_linear_mul({ZERO: a0}, nil, trunc.energy).items()}
    term = {ZERO: a0}
    while True:
        term = gapped_linear_mul(step, term, trunc.energy)
        if not term:
            break
        for e, cols in term.items():
            acc = result.setdefault(e, {})
            for j, col in cols.items():
                vadd(acc.setdefault(j, {}), col)
    return {e: {j: c for j, c in cols.items() if c} for e, cols in result.items()}


def _require_diffeo(f: GappedStructure):
    if f.role != PREHOM:
        raise ValueError("expected a pre-homomorphism")
    if any(k == 0 for k, _ in f.entries):
        raise ValueError("a formal diffeomorphism has f_0 = 0")
    if f.source.dim != f.target.dim:
        raise ZeroDivisionError("f_{1,0} is not square")


def invert_diffeo(f: GappedStructure, trunc: TruncParams) -> GappedStructure:
    """g with g∘f = id (and f∘g = id) inside the window."""
    _require_diffeo(f)
    g1 = invert_linear(f, trunc)
    kcap, ecap = trunc.arity, trunc.energy
    ftab = f.table()
    g1tab = ml.fanin_table({(1, b): {(j,): c for j, c in cols.items()}
                            for b, cols in g1.items()})
    result = {(1, b): {(j,): c for j, c in cols.items()} for b, cols in g1.items()}
    pending: dict = {}
    # contributions of g_1 to higher arities
    ml.composite(ml.restrict(result, arity=1), ftab, kcap, ecap, out=pending)
    for k in range(2, kcap + 1):
        xk = ml.clean(ml.restrict(pending, arity=k))
        gk = ml.clean(ml.composite(xk, g1tab, kcap, ecap))
        gk = {s: {key: {i: -x for i, x in v.items()} for key, v in mm.items()}
              for s, mm in gk.items()}
        result.update(gk)
        ml.composite(gk, ftab, kcap, ecap, out=pending)
    return GappedStructure(f.target, ml.clean(result), PREHOM, f.source, validate=False)


def pullback(f: GappedStructure, m: GappedStructure, trunc: TruncParams) -> GappedStructure:
    """The structure f*m making f a homomorphism (C, f*m) -> (C, m)."""
    _require_diffeo(f)
    if m.role != STRUCTURE:
        raise ValueError("pullback acts on structures")
    g1 = invert_linear(f, trunc)
    kcap, ecap = trunc.arity, trunc.energy
    deg = f.source.degrees
    s1 = ml.composite(m.entries, f.table(), kcap, ecap)
    higher_f = {s: mm for s, mm in f.entries.items() if s[0] >= 2}
    pending: dict = {}
    result: dict = {}
    for k in range(0, kcap + 1):
        val = ml.combine((ONE, ml.restrict(s1, arity=k)),
                         (-ONE, ml.restrict(pending, arity=k)))
        rk = ml.clean(ml.apply_outputs(val, g1, ecap))
        if not rk:
            continue
        result.update(rk)
        ml.insertion(higher_f, ml.fanin_table(rk), deg, kcap, ecap, out=pending)
    return GappedStructure(f.source, ml.clean(result), STRUCTURE, validate=False)


# ---------------------------------------------------------------------------
# numerical invariants


@dataclass(frozen=True)
class NuReport:
    value: object  # rational k + beta, or None for ∞
    witness: Optional[tuple] = None

    @property
    def finite(self) -> bool:
        return self.value is not None

    def __str__(self):
        if self.value is None:
            return "inf"
        return "%s (k=%d, beta=%s)" % (
            fmt_rational(self.value), self.witness[0], fmt_rational(self.witness[1]))

    def __lt__(self, other):
        if self.value is None:
            return False
        return other.value is None or self.value < other.value


def nu(s: GappedStructure, max_arity=None) -> NuReport:
    """min k+beta over nonzero entries with k+beta > 2 (structures) or > 1."""
    bound = 2 if s.role == STRUCTURE else 1
    best = None
    for (k, b) in s.entries:
        if max_arity is not None and k > max_arity:
            continue
        v = k + b
        if v > bound and (best is None or (v, k) < (best[0], best[1])):
            best = (v, k, b)
    if best is None:
        return NuReport(None)
    return NuReport(best[0], (best[1], best[2]))


def kappa(f: GappedStructure):
    """min positive beta with f_{1,beta} ≠ 0, or None (∞)."""
    bs = [b for (k, b) in f.entries if k == 1 and b > 0]
    return min(bs) if bs else None


# ---------------------------------------------------------------------------
# underlying algebra and quasi-isomorphisms


def underlying_product(m: GappedStructure) -> dict:
    """[a]∘[b] = (-1)^{|a|} m_{2,0}(a, b) on basis pairs of a weakly minimal m."""
    if m.role != STRUCTURE or not m.is_weakly_minimal():
        raise ValueError("underlying_product needs a weakly minimal structure")
    deg = m.source.degrees
    table = {}
    for (a, b), vec in m.entry(2, ZERO).items():
        table[(a, b)] = {i: -x for i, x in vec.items()} if deg[a] & 1 else dict(vec)
    return table


def product_apply(table: dict, x: dict, y: dict) -> dict:
    out: dict = {}
    for a, ca in x.items():
        for b, cb in y.items():
            v = table.get((a, b))
            if v:
                vadd(out, v, ca * cb)
    return out


def is_associative(table: dict, dim: int) -> bool:
    for a in range(dim):
        for b in range(dim):
            ab = table.get((a, b), {})
            for c in range(dim):
                lhs = product_apply(table, ab, {c: ONE})
                rhs = product_apply(table, {a: ONE}, table.get((b, c), {}))
                if lhs != rhs:
                    return False
    return True


def wedge_table(gca: FreeGCA) -> dict:
    out = {}
    for a in range(gca.size):
        for b in range(gca.size):
            r = gca.mul_basis(a, b)
            if r is not None:
                out[(a, b)] = {r[1]: rational(r[0])}
    return out


def differential(m: GappedStructure) -> LinearMap:
    d = m.linear_part(ZERO)
    d.degree = 1
    return d


def is_quasi_iso(f: GappedStructure, mC: GappedStructure, mD: GappedStructure) -> Verdict:
    """Does f_{1,0} induce an isomorphism H(C̄, m^C_{1,0}) -> H(D̄, m^D_{1,0})?"""
    f10 = f.linear_part(ZERO)
    dC, dD = differential(mC), differential(mD)
    if (f10 @ dC).cols != (dD @ f10).cols:
        raise ValueError("f_{1,0} is not a chain map")
    hC, hD = cohomology(dC), cohomology(dD)
    induced = hD.p @ f10 @ hC.i
    if hC.ranks != hD.ranks:
        return Verdict(False, reason="cohomology ranks differ: %s vs %s" % (
            hC.ranks, hD.ranks))
    if induced.rank() != hC.harmonic.dim:
        return Verdict(False, reason="induced map on cohomology is singular")
    return Verdict(True)
