"""
Obstruction-theoretic formality for anti-symmetric A∞ algebras on ΛV.

Each step reads the operations at the lowest level ν = k + beta, solves
b(f_{k-1,beta}) = -m_{k,beta} in the Hochschild complex, symmetrizes the
primitive against the involution and pulls m back along id + f.  Since
ν strictly increases through a finite set inside the window, the loop ends
with only m_{2,0} left.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Optional

from . import multilinear as ml
from .ainfinity import (
    PREHOM, GappedStructure, NuReport, Verdict, check_self_dual, compose,
    conjugate, nu, opposite, pullback, underlying_product, wedge_table,
)
from .graded import NO_SOLUTION, FreeGCA, LinearMap, parity_map
from .hochschild import (
    HochschildCochain, hoch_b, is_antisymmetric, solve_primitive, structure_cochain,
    symmetrize,
)
from .scalars import ONE, ZERO, TruncParams, fmt_rational, rational


class FormalityError(RuntimeError):
    pass


@dataclass
class AntisymValidation:
    weakly_minimal: Verdict
    algebra_is_wedge: Verdict
    self_dual: Verdict
    involution_is_parity: Verdict
    flat: Verdict
    minimal: Verdict

    def items(self):
        return [
            ("weakly_minimal", self.weakly_minimal),
            ("underlying_algebra_is_wedge", self.algebra_is_wedge),
            ("self_dual", self.self_dual),
            ("involution_is_parity", self.involution_is_parity),
            ("flat", self.flat),
            ("minimal", self.minimal),
        ]

    @property
    def ok(self) -> bool:
        return all(v.ok for _, v in self.items())

    def first_failure(self):
        for name, v in self.items():
            if not v.ok:
                return name, v
        return None


def _skip(reason):
    return Verdict(False, reason=reason)


def validate_antisymmetric(m: GappedStructure, c: LinearMap, trunc: TruncParams,
                           identification: Optional[LinearMap] = None) -> AntisymValidation:
    """The three anti-symmetry conditions plus the flatness/minimality they force.

    ``identification`` maps ΛV onto the space of m as an algebra map; the
    default identifies the basis of m with the monomials of its generators.
    """
    space = m.source
    wm = Verdict(m.is_weakly_minimal(),
                 reason="" if m.is_weakly_minimal() else "m_{1,0} ≠ 0")
    if not wm.ok:
        na = _skip("not weakly minimal")
        return AntisymValidation(wm, na, na, na, na, na)
    gca = space.gca
    if gca is None or space.dim != gca.size:
        alg = _skip("space is not ΛV on declared generators")
    else:
        table = underlying_product(m)
        if identification is not None:
            phi = identification
            table = _pull_table(table, phi, space.dim)
        want = wedge_table(gca)
        alg = _table_verdict(table, want)
    sd = check_self_dual(m, c, trunc)
    if gca is None:
        par = _skip("no generators")
    else:
        ext = {lab: 1 for lab in space.labels[gca.size:]}
        target = parity_map(space, ext)
        if identification is not None:
            target = identification @ target @ identification.inverse()
        par = Verdict(c.cols == target.cols,
                      reason="" if c.cols == target.cols else "c̄ ≠ parity involution")
    flat = Verdict(m.is_flat(), reason="" if m.is_flat() else "m_0 ≠ 0")
    mini = Verdict(m.is_minimal(), reason="" if m.is_minimal() else "m_1 ≠ 0")
    return AntisymValidation(wm, alg, sd, par, flat, mini)


def _pull_table(table, phi: LinearMap, dim):
    # φ⁻¹(φ(a)·φ(b)) on basis pairs
    from .ainfinity import product_apply
    inv = phi.inverse()
    out = {}
    for a in range(dim):
        for b in range(dim):
            v = inv.apply(product_apply(table, phi.col(a), phi.col(b)))
            if v:
                out[(a, b)] = v
    return out


def _table_verdict(got: dict, want: dict) -> Verdict:
    for key in sorted(set(got) | set(want)):
        if got.get(key, {}) != want.get(key, {}):
            return Verdict(False, reason="product differs from the wedge at %r" % (key,))
    return Verdict(True)


# ---------------------------------------------------------------------------


@dataclass
class ObstructionClass:
    k: int
    beta: object
    cochain: HochschildCochain
    antisymmetric: Optional[bool] = None


def _level(m: GappedStructure, trunc: TruncParams) -> NuReport:
    # arity k_max entries only feed m_0 insertions and are not killed
    return nu(m, max_arity=trunc.arity - 1)


def obstruction_classes(m: GappedStructure, trunc: TruncParams,
                        check_antisymmetry=True) -> list:
    """Closed cochains m_{k,beta} with k + beta = ν(m), k <= k_max - 1."""
    level = _level(m, trunc)
    if not level.finite:
        return []
    gca = m.source.gca
    out = []
    for (k, b) in sorted(m.entries):
        if k > trunc.arity - 1 or k + b != level.value:
            continue
        zeta = structure_cochain(gca, m.entries[(k, b)], arity=k)
        if k < 2:
            raise FormalityError(
                "operation (%d, %s) at the obstruction level is not allowed for a "
                "flat minimal structure" % (k, fmt_rational(b)))
        if not hoch_b(zeta).is_zero():
            raise FormalityError(
                "obstruction cochain (%d, %s) is not closed; the A∞ relations fail"
                % (k, fmt_rational(b)))
        anti = None
        if check_antisymmetry:
            anti, witness = is_antisymmetric(zeta)
            if not anti:
                raise FormalityError(
                    "obstruction cochain (%d, %s) is not anti-symmetric at %r"
                    % (k, fmt_rational(b), witness))
        out.append(ObstructionClass(k, b, zeta, anti))
    return out


def obstruction_step(m: GappedStructure, c: LinearMap, trunc: TruncParams,
                     symmetrize_primitive=True):
    """(f, f*m) with f = id + sum f_{k-1,beta} killing every class at level ν."""
    classes = obstruction_classes(m, trunc, check_antisymmetry=symmetrize_primitive)
    if not classes:
        raise FormalityError("ν(m) is infinite inside the window; nothing to do")
    level = _level(m, trunc)
    entries = {(1, ZERO): {(i,): {i: ONE} for i in range(m.source.dim)}}
    for cl in classes:
        eta = solve_primitive(-cl.cochain, check_closed=False)
        if eta is NO_SOLUTION:
            raise FormalityError(
                "no primitive for the class at (%d, %s); input is not anti-symmetric"
                % (cl.k, fmt_rational(cl.beta)))
        if symmetrize_primitive:
            eta = symmetrize(eta, c)
        if hoch_b(eta) != -cl.cochain:
            raise FormalityError("primitive at (%d, %s) does not solve b(f) = -m"
                                 % (cl.k, fmt_rational(cl.beta)))
        slot = (cl.k - 1, cl.beta)
        if slot in entries:
            # (k-1, beta) = (1, 0) cannot occur: k + beta > 2
            raise FormalityError("slot clash at %r" % (slot,))
        if eta.values:
            entries[slot] = eta.values
    f = GappedStructure(m.source, entries, PREHOM)
    m2 = pullback(f, m, trunc)
    if m2.entry(2, ZERO) != m.entry(2, ZERO):
        raise FormalityError("pullback changed m_{2,0}")
    after = _level(m2, trunc)
    if not level < after:
        raise FormalityError("ν did not increase: %s -> %s" % (level, after))
    return f, m2


@dataclass
class GaugeRecord:
    j: int
    nu_before: NuReport
    slots: list
    nu_after: NuReport


@dataclass
class GaugeLog:
    records: list = field(default_factory=list)

    def nu_column(self):
        col = [r.nu_before for r in self.records]
        if self.records:
            col.append(self.records[-1].nu_after)
        return col

    def strictly_increasing(self) -> bool:
        col = self.nu_column()
        return all(a < b for a, b in zip(col, col[1:]))


def formality_run(m: GappedStructure, c: LinearMap, trunc: TruncParams,
                  symmetrize_primitive=True, validate=True):
    """Iterate obstruction steps until only m_{2,0} remains in the window.

    Returns (g_inf, m_inf, log) with g_inf a homomorphism (C, m_inf) -> (C, m).
    """
    if validate:
        v = validate_antisymmetric(m, c, trunc)
        if not v.ok:
            name, verdict = v.first_failure()
            raise FormalityError("input is not anti-symmetric: %s (%s)"
                                 % (name, verdict.reason or verdict.witness))
    g = GappedStructure.identity(m.source)
    cur = m
    log = GaugeLog()
    j = 0
    while _level(cur, trunc).finite:
        before = _level(cur, trunc)
        f, nxt = obstruction_step(cur, c, trunc, symmetrize_primitive)
        if symmetrize_primitive and not check_self_dual(nxt, c, trunc):
            raise FormalityError("self-duality lost at iteration %d" % j)
        slots = sorted(s for s in f.entries if s != (1, ZERO))
        log.records.append(GaugeRecord(j, before, slots, _level(nxt, trunc)))
        g = compose(g, f, trunc)
        cur = nxt
        j += 1
    # arity k_max entries never enter the statement; drop them
    m_inf = cur.restricted(kcap=trunc.arity - 1)
    return g.restricted(kcap=trunc.arity), m_inf, log


# ---------------------------------------------------------------------------
# test-instance generator


@dataclass(frozen=True)
class ScrambleProfile:
    """Which f_{k,beta} slots to fill, and how densely."""

    slots: tuple = ((2, 0), (3, 0), (1, 1), (2, 1), (2, 2))
    entries: int = 3
    coeff_range: int = 2

    @classmethod
    def empty(cls):
        return cls(slots=())


def _random_entry(rng, space, k, nentries, crange):
    deg = space.degrees
    mm = {}
    for _ in range(nentries):
        key = tuple(rng.randrange(space.dim) for _ in range(k))
        want = space.deg(sum(deg[i] for i in key) + 1 - k)
        outs = [o for o in range(space.dim) if deg[o] == want]
        if not outs:
            continue
        o = rng.choice(outs)
        x = rng.randint(-crange, crange)
        if x:
            mm.setdefault(key, {})[o] = rational(x)
    return mm


def random_self_dual_diffeo(rng, space, c: LinearMap, trunc: TruncParams,
                            profile: ScrambleProfile) -> GappedStructure:
    entries = {(1, ZERO): {(i,): {i: ONE} for i in range(space.dim)}}
    for k, b in profile.slots:
        b = rational(b)
        if (k, b) == (1, ZERO) or k < 1 or k > trunc.arity or b > trunc.energy:
            continue
        mm = _random_entry(rng, space, k, profile.entries, profile.coeff_range)
        if mm:
            entries[(k, b)] = mm
    f = GappedStructure(space, entries, PREHOM)
    sym = ml.combine((ONE, f.entries), (ONE, conjugate(opposite(f), c, c, trunc).entries))
    sym = {s: {key: {i: x / 2 for i, x in v.items()} for key, v in mm.items()}
           for s, mm in sym.items()}
    return GappedStructure(space, sym, PREHOM)


def scramble(seed: int, profile: ScrambleProfile, c: LinearMap, trunc: TruncParams,
             base: Optional[GappedStructure] = None, space=None) -> GappedStructure:
    """pullback(f, base) for a seeded random c self-dual diffeo f with f_{1,0} = Id."""
    if base is None:
        base = GappedStructure.canonical(space)
    rng = random.Random(seed)
    f = random_self_dual_diffeo(rng, base.source, c, trunc, profile)
    return pullback(f, base, trunc)


def torus_model(n: int, modulus=0) -> tuple:
    """(ΛV with n degree-1 generators, m∞, parity involution)."""
    gca = FreeGCA(["v%d" % (j + 1) for j in range(n)], [1] * n, modulus)
    return gca, GappedStructure.canonical(gca), parity_map(gca)


def is_formal(m: GappedStructure, trunc: TruncParams) -> bool:
    """Only m_{2,0} survives, and it is the canonical signed wedge."""
    canon = GappedStructure.canonical(m.source)
    return (set(m.restricted(kcap=trunc.arity - 1).entries) <= {(2, ZERO)}
            and m.entry(2, ZERO) == canon.entry(2, ZERO))
