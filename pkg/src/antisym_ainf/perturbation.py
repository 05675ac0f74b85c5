"""
Homological perturbation: a deformation retraction of (C̄, m_{1,0}) onto
its cohomology, and the weakly minimal model m^D with the inclusion i.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from . import multilinear as ml
from .ainfinity import (
    PREHOM, STRUCTURE, GappedStructure, _check_involution, differential,
)
from .graded import LinearMap, Space, cohomology, eigen_subspaces
from .scalars import ONE, ZERO, TruncParams, rational


class RetractionError(ValueError):
    pass


@dataclass
class RetractionData:
    """i: D̄ -> C̄, p: C̄ -> D̄, h: C̄ -> C̄ of degree -1.

    ``c_hat`` is the involution p c̄ i induced on D̄ when an involution was
    supplied, else None.
    """

    i: LinearMap
    p: LinearMap
    h: LinearMap
    c_hat: Optional[LinearMap] = None

    @property
    def harmonic(self) -> Space:
        return self.i.source


def retraction_defects(d: LinearMap, r: RetractionData, c: Optional[LinearMap] = None):
    """Names of the retraction identities that fail (empty = all hold)."""
    bad = []
    ident_D = LinearMap.identity(r.harmonic)
    ident_C = LinearMap.identity(d.source)
    if not (r.p @ d).is_zero():
        bad.append("p∘m_{1,0} = 0")
    if not (d @ r.i).is_zero():
        bad.append("m_{1,0}∘i = 0")
    if (r.p @ r.i).cols != ident_D.cols:
        bad.append("p∘i = Id")
    lhs = (d @ r.h) + (r.h @ d)
    rhs = (r.i @ r.p) - ident_C
    if lhs.cols != rhs.cols:
        bad.append("m_{1,0}∘h + h∘m_{1,0} = i∘p - Id")
    if c is not None and r.c_hat is not None:
        if (c @ r.i).cols != (r.i @ r.c_hat).cols:
            bad.append("c̄∘i = i∘ĉ")
        if (r.c_hat @ r.p).cols != (r.p @ c).cols:
            bad.append("ĉ∘p = p∘c̄")
        if (c @ r.h).cols != (r.h @ c).cols:
            bad.append("c̄∘h = h∘c̄")
    return bad


def derive_retraction(m: GappedStructure, c: Optional[LinearMap] = None) -> RetractionData:
    """Retraction data for m_{1,0}, c̄-equivariant when c is given.

    Complements are chosen inside the ±1 eigenspaces of c̄, so i and p
    commute with the involutions by construction; h is then averaged.
    """
    d = differential(m)
    if not (d @ d).is_zero():
        raise RetractionError("m_{1,0}∘m_{1,0} ≠ 0")
    subspaces = None
    if c is not None:
        _check_involution(c)
        if (c @ d).cols != (d @ c).cols:
            raise RetractionError("c̄ does not commute with m_{1,0}")
        subspaces = [s for s in eigen_subspaces(m.source, c) if s]
    split = cohomology(d, subspaces)
    i, p, h = split.i, split.p, split.h
    c_hat = None
    if c is not None:
        c_hat = p @ c @ i
        h = (h + (c @ h @ c)).scale(rational("1/2"))
        h.degree = -1
    r = RetractionData(i, p, h, c_hat)
    bad = retraction_defects(d, r, c)
    if bad:
        raise RetractionError("retraction identity fails: " + bad[0])
    return r


def build_minimal_model(m: GappedStructure, r: RetractionData, trunc: TruncParams):
    """(m^D, i) from the perturbation recursion, evaluated inside the window.

    i_{k,beta} = h(sum m_{r,b0}(i, .., i)) and m^D_{k,beta} = p(same sum) with
    (r, b0) ≠ (1, 0).  The sum for level k+beta only reads i at strictly
    smaller levels, so iterating to a fixed point settles one more level
    per pass.
    """
    d = differential(m)
    bad = retraction_defects(d, r)
    if bad:
        raise RetractionError("retraction identity fails: " + bad[0])
    kcap, ecap = trunc.arity, trunc.energy
    outer = {s: mm for s, mm in m.entries.items() if s != (1, ZERO)}
    base = {(1, ZERO): {(t,): col for t, col in r.i.cols.items() if col}}
    current = ml.clean(base)
    while True:
        sums = ml.clean(ml.composite(outer, ml.fanin_table(current), kcap, ecap))
        new = ml.combine((ONE, base), (ONE, ml.apply_outputs(sums, {ZERO: r.h.cols}, ecap)))
        if new == current:
            break
        current = new
    mD = ml.clean(ml.apply_outputs(sums, {ZERO: r.p.cols}, ecap))
    D = r.harmonic
    return (GappedStructure(D, mD, STRUCTURE),
            GappedStructure(D, current, PREHOM, target=m.source, validate=False))
