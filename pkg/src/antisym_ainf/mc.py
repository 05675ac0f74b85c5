"""
Bounding cochains: Maurer-Cartan residuals, the deformed structure m^b,
gauge equivalence of two candidates, and the Floer differential's rank.

Elements with Novikov coefficients are dicts {basis index: NovElem}.  All
sums are reduced modulo T^{E_max}; terms that would need operations of
arity above k_max cap the precision, which every report states.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import multilinear as ml
from .ainfinity import STRUCTURE, GappedStructure
from .scalars import NovElem, TruncParams, nov_add, nov_mul, rational


class CandidateError(ValueError):
    pass


def check_candidate(m: GappedStructure, b: dict, degree=1):
    """b must be homogeneous of the given degree with coefficients in Λ₊."""
    space = m.source
    for i, a in b.items():
        if not (0 <= i < space.dim):
            raise CandidateError("index %r outside the space" % (i,))
        if a.is_zero():
            continue
        if space.degrees[i] != space.deg(degree):
            raise CandidateError("%s has degree %d, expected %d" % (
                space.labels[i], space.degrees[i], degree))
        if degree == 1 and not a.in_maximal_ideal():
            raise CandidateError("coefficient of %s has an energy-0 term" % space.labels[i])


def valuation(b: dict):
    vals = [a.min_energy for a in b.values() if not a.is_zero()]
    return min(vals) if vals else None


def _table(b: dict, ecap) -> dict:
    """Arity-0 fan-in table of a Novikov element."""
    out = {}
    for i, a in b.items():
        items = [((), e, c) for e, c in a.terms if e <= ecap]
        if items:
            out[i] = items
    return out


def _to_elements(entries: dict, cap) -> dict:
    """{(0, beta): {(): vec}} -> {index: NovElem} modulo T^cap."""
    acc: dict = {}
    for (k, beta), mm in entries.items():
        if beta >= cap:
            continue
        for vec in mm.values():
            for i, x in vec.items():
                acc.setdefault(i, []).append((beta, x))
    out = {}
    for i, terms in acc.items():
        a = NovElem(terms)
        if not a.is_zero():
            out[i] = a
    return dict(sorted(out.items()))


def _precision(trunc: TruncParams, b: dict, spare_arity: int):
    """Energy below which the truncated sum is exact."""
    v = valuation(b)
    if v is None:
        return trunc.energy
    return min(trunc.energy, (trunc.arity + 1 - spare_arity) * v)


@dataclass
class Residual:
    value: dict
    precision: object

    @property
    def vanishes(self) -> bool:
        return not self.value


def mc_residual(m: GappedStructure, b: dict, trunc: TruncParams) -> Residual:
    """Σ_k m_k(b, .., b) modulo T^{E_max}."""
    if m.role != STRUCTURE:
        raise ValueError("mc_residual expects a structure")
    check_candidate(m, b)
    prec = _precision(trunc, b, 0)
    entries = ml.composite(m.entries, _table(b, trunc.energy), 0, trunc.energy)
    return Residual(_to_elements(ml.clean(entries), prec), prec)


def deform(m: GappedStructure, b: dict, trunc: TruncParams) -> GappedStructure:
    """m^b_k(α) = Σ m(b.., α_1, b.., .., α_k, b..) inside the window."""
    check_candidate(m, b)
    if not any(not a.is_zero() for a in b.values()):
        return m
    table = ml.merge_tables(ml.identity_table(m.source.dim), _table(b, trunc.energy))
    entries = ml.composite(m.entries, table, trunc.arity, trunc.energy)
    return GappedStructure(m.source, ml.clean(entries), STRUCTURE)


@dataclass
class GaugeReport:
    ok: bool
    difference: dict
    precision: object


def check_gauge(m: GappedStructure, b0: dict, b1: dict, c: dict,
                trunc: TruncParams) -> GaugeReport:
    """b1 - b0 = Σ m_{k0+k1+1}(b0^{k0}, c, b1^{k1}) modulo T^{E_max}."""
    check_candidate(m, b0)
    check_candidate(m, b1)
    check_candidate(m, c, degree=0)
    ecap = trunc.energy
    t0, t1, tc = _table(b0, ecap), _table(b1, ecap), _table(c, ecap)
    rhs: dict = {}
    for (l, beta0), mm in m.entries.items():
        if beta0 > ecap or l == 0:
            continue
        for p in range(l):
            tables = [t0] * p + [tc] + [t1] * (l - p - 1)
            for gammas, vec in mm.items():
                for ins, e, coeff in ml.expand(gammas, tables, 0, ecap - beta0):
                    ml.accumulate(rhs, (0, beta0 + e), ins, vec, coeff)
    v = [x for x in (valuation(b0), valuation(b1)) if x is not None]
    prec = min([ecap] + [trunc.arity * x for x in v])
    got = _to_elements(ml.clean(rhs), prec)
    want = {}
    for i in set(b0) | set(b1):
        d = nov_add(b1.get(i, NovElem()), -b0.get(i, NovElem())).truncate(prec)
        if not d.is_zero():
            want[i] = d
    diff = {}
    for i in sorted(set(got) | set(want)):
        d = nov_add(want.get(i, NovElem()), -got.get(i, NovElem()))
        if not d.is_zero():
            diff[i] = d
    return GaugeReport(not diff, diff, prec)


# ---------------------------------------------------------------------------
# Floer differential


@dataclass
class FloerReport:
    ranks: dict             # degree -> rank of HF in that degree
    differential_rank: dict  # degree -> rank of (m^b_1) out of that degree
    differential_zero: bool
    precision: object
    pivots: list = field(default_factory=list)


class ObstructedError(ValueError):
    pass


def floer_differential(m: GappedStructure, b: dict, trunc: TruncParams) -> dict:
    """(m^b)_1 as columns {j: {i: NovElem}} modulo T^{E_max}."""
    mb = deform(m, b, trunc)
    cols: dict = {}
    for (k, beta), mm in mb.entries.items():
        if k != 1 or beta >= trunc.energy:
            continue
        for (j,), vec in mm.items():
            for i, x in vec.items():
                col = cols.setdefault(j, {})
                col[i] = nov_add(col.get(i, NovElem()), NovElem.monomial(x, beta))
    return {j: {i: a for i, a in col.items() if not a.is_zero()}
            for j, col in sorted(cols.items()) if any(not a.is_zero() for a in col.values())}


def _divide(a: NovElem, pivot: NovElem, cap) -> NovElem:
    """a / pivot when val(a) >= val(pivot); result is taken modulo T^cap."""
    v = pivot.min_energy
    unit = NovElem._raw(tuple((e - v, x) for e, x in pivot.terms))
    num = NovElem._raw(tuple((e - v, x) for e, x in a.terms))
    return nov_mul(num, unit.inverse(cap), cap)


def valuation_rank(cols: dict, cap):
    """Rank over the Novikov field by minimal-valuation pivoting.

    Returns (rank, remaining precision, pivot list).  Each pivot of
    valuation v costs v of the precision of the remaining entries.
    """
    rows = {j: dict(col) for j, col in cols.items()}
    prec = rational(cap)
    pivots = []
    while True:
        best = None
        for j in sorted(rows):
            for i in sorted(rows[j]):
                a = rows[j][i].truncate(prec)
                if a.is_zero():
                    continue
                key = (a.min_energy, j, i)
                if best is None or key < best[0]:
                    best = (key, j, i, a)
        if best is None:
            return len(pivots), prec, pivots
        (v, _, _), j0, i0, piv = best
        pivots.append((j0, i0, v))
        pcol = rows.pop(j0)
        for j in sorted(rows):
            col = rows[j]
            a = col.get(i0)
            if a is None or a.truncate(prec).is_zero():
                continue
            q = _divide(a.truncate(prec), piv, prec)
            for i, x in pcol.items():
                col[i] = nov_add(col.get(i, NovElem()), -nov_mul(q, x, prec))
            rows[j] = {i: x for i, x in col.items() if not x.truncate(prec).is_zero()}
        prec = prec - v


def floer_rank(m: GappedStructure, b: dict, trunc: TruncParams) -> FloerReport:
    """Ranks of HF(C, b) per degree from the Floer differential (m^b)_1."""
    res = mc_residual(m, b, trunc)
    if not res.vanishes:
        raise ObstructedError("b is not a bounding cochain: residual is nonzero")
    space = m.source
    cols = floer_differential(m, b, trunc)
    prec = min(res.precision, _precision(trunc, b, 1))
    dims: dict = {}
    for d in space.degrees:
        dims[d] = dims.get(d, 0) + 1
    drank = {}
    pivots = []
    worst = prec
    for d in sorted(dims):
        part = {j: c for j, c in cols.items() if space.degrees[j] == d}
        r, p, piv = valuation_rank(part, prec)
        drank[d] = r
        pivots.extend(piv)
        worst = min(worst, p)
    ranks = {}
    for d in sorted(dims):
        prev = space.deg(d - 1)
        ranks[d] = dims[d] - drank[d] - drank.get(prev, 0)
    return FloerReport(ranks, drank, not cols, worst, pivots)


def parse_element(text: str, space) -> dict:
    """'label = c*T^{e} + ..; label = ..' -> {index: NovElem}."""
    from .scalars import parse_nov
    out = {}
    text = text.strip()
    if not text or text == "0":
        return out
    for part in text.split(";"):
        if not part.strip():
            continue
        if "=" not in part:
            raise ValueError("expected 'label = value' in %r" % part.strip())
        lab, val = part.split("=", 1)
        i = space.index(lab.strip())
        a = parse_nov(val)
        out[i] = nov_add(out.get(i, NovElem()), a)
    return {i: a for i, a in sorted(out.items()) if not a.is_zero()}


def format_element(b: dict, space) -> str:
    from .scalars import format_nov
    if not b:
        return "0"
    return "; ".join("%s = %s" % (space.labels[i], format_nov(a)) for i, a in sorted(b.items()))
