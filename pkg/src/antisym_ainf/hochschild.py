"""
Hochschild cochains of ΛV: the coboundary, the transpose map t, pullback by
algebra isomorphisms, the HKR evaluation ε, anti-symmetry, and an exact
primitive solver.

A cochain η: A[1]^{⊗k} -> A is stored on basis tuples of monomials.  Its
degree |η| is the degree as a map out of A[1]^{⊗k}, so a structure
operation m_{k,beta} is a 2-cochain and a diffeomorphism component
f_{k,beta} is a 1-cochain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations, combinations_with_replacement, permutations, product

from .graded import (
    NO_SOLUTION, Echelon, FreeGCA, LinearMap, reversal_parity, spe, vadd, vclean,
)
from .scalars import ONE, ZERO, rational


@dataclass
class HochschildCochain:
    gca: FreeGCA
    arity: int
    degree: int
    values: dict = field(default_factory=dict)

    def __post_init__(self):
        self.degree = self.gca.deg(self.degree)
        vals = {}
        for key, vec in self.values.items():
            key = tuple(key)
            if len(key) != self.arity:
                raise ValueError("input %r does not have arity %d" % (key, self.arity))
            v = vclean(vec)
            if v:
                vals[key] = v
        self.values = vals
        deg = self.gca.degrees
        for key, vec in vals.items():
            want = self.gca.deg(self.degree + sum(deg[i] - 1 for i in key))
            for o in vec:
                if deg[o] != want:
                    raise ValueError("cochain value at %r has the wrong degree" % (key,))

    def __eq__(self, other):
        return (isinstance(other, HochschildCochain) and self.arity == other.arity
                and self.values == other.values)

    def is_zero(self) -> bool:
        return not self.values

    def __add__(self, other):
        return self.combine(other, ONE)

    def __sub__(self, other):
        return self.combine(other, -ONE)

    def __neg__(self):
        return self.scale(-ONE)

    def combine(self, other, c):
        vals = {k: dict(v) for k, v in self.values.items()}
        for k, v in other.values.items():
            vadd(vals.setdefault(k, {}), v, c)
        return HochschildCochain(self.gca, self.arity, self.degree, vals)

    def scale(self, c):
        c = rational(c)
        return HochschildCochain(self.gca, self.arity, self.degree,
                                 {k: {i: c * x for i, x in v.items()}
                                  for k, v in self.values.items()})

    def __call__(self, *inputs) -> dict:
        return self.values.get(tuple(inputs), {})

    def nnz(self) -> int:
        return sum(len(v) for v in self.values.values())


def structure_cochain(gca, entries: dict, role="m", arity=None) -> HochschildCochain:
    """View m_{k,beta} (degree 2) or f_{k,beta} (degree 1) as a cochain."""
    k = arity if arity is not None else (len(next(iter(entries))) if entries else 0)
    return HochschildCochain(gca, k, 2 if role == "m" else 1, dict(entries))


def _mulvec(gca, a: int, vec: dict, left: bool) -> dict:
    out = {}
    mul = gca._mul
    for i, x in vec.items():
        r = mul.get((a, i) if left else (i, a))
        if r is not None:
            out[r[1]] = out.get(r[1], ZERO) + r[0] * x
    return out


def _b_into(out: dict, gca: FreeGCA, ed: int, key: tuple, vec: dict, c=ONE):
    """Add c * b(single-entry cochain key -> vec) into `out` (dict by key)."""
    deg = gca.degrees
    # α_1 · η(α_2..)
    for a in range(gca.size):
        val = _mulvec(gca, a, vec, True)
        if val:
            s = -c if (ed * (deg[a] + 1) + 1) & 1 else c
            vadd(out.setdefault((a,) + key, {}), val, s)
    # η(..α_i α_{i+1}..)
    prefix = 0
    for p, g in enumerate(key):
        head, tail = key[:p], key[p + 1:]
        for fs, a, b in gca.factorizations(g):
            e = ed + 1 + prefix + deg[a] + 1
            s = c * fs
            vadd(out.setdefault(head + (a, b) + tail, {}), vec, -s if e & 1 else s)
        prefix += deg[g] + 1
    # η(..) · α_{k+1}
    for a in range(gca.size):
        val = _mulvec(gca, a, vec, False)
        if val:
            s = -c if (ed + prefix) & 1 else c
            vadd(out.setdefault(key + (a,), {}), val, s)


def hoch_b(eta: HochschildCochain) -> HochschildCochain:
    """The Hochschild coboundary with the Koszul signs of the A∞ convention."""
    out: dict = {}
    for key, vec in eta.values.items():
        _b_into(out, eta.gca, eta.degree, key, vec)
    return HochschildCochain(eta.gca, eta.arity + 1, eta.degree + 1, out)


def hoch_b_via_product(eta: HochschildCochain, m20: dict) -> HochschildCochain:
    """b(η) written through m_{2,0} with the (-1)^{|α_1|} product convention."""
    gca = eta.gca
    deg = gca.degrees
    ed = eta.degree

    def m2(x: dict, y: dict) -> dict:
        out = {}
        for a, ca in x.items():
            for b, cb in y.items():
                v = m20.get((a, b))
                if v:
                    vadd(out, v, ca * cb)
        return out

    out: dict = {}
    n = gca.size
    for key, vec in eta.values.items():
        for a in range(n):
            val = m2({a: ONE}, vec)
            if val:
                s = -1 if ((ed + 1) * (deg[a] + 1)) & 1 else 1
                vadd(out.setdefault((a,) + key, {}), val, s)
            val = m2(vec, {a: ONE})
            if val:
                vadd(out.setdefault(key + (a,), {}), val)
    # middle terms: sum over (k+1)-tuples whose adjacent pair multiplies into key
    for key, vec in eta.values.items():
        prefix = 0
        for p, g in enumerate(key):
            head, tail = key[:p], key[p + 1:]
            for a in range(n):
                for b in range(n):
                    r = m20.get((a, b))
                    if r and g in r:
                        s = -r[g] if (ed + 1 + prefix) & 1 else r[g]
                        vadd(out.setdefault(head + (a, b) + tail, {}), vec, -s)
            prefix += deg[g] + 1
    return HochschildCochain(gca, eta.arity + 1, eta.degree + 1, out)


def t_map(eta: HochschildCochain) -> HochschildCochain:
    """t(η)(α_1..α_k) = (-1)^{spe(τ;α)+k+1} η(α_k..α_1)."""
    deg = eta.gca.degrees
    k = eta.arity
    out = {}
    for key, vec in eta.values.items():
        s = reversal_parity([deg[i] for i in key]) ^ ((k + 1) & 1)
        out[key[::-1]] = {i: -x for i, x in vec.items()} if s else dict(vec)
    return HochschildCochain(eta.gca, k, eta.degree, out)


def is_multiplicative(h: LinearMap, gca: FreeGCA) -> bool:
    for a in range(gca.size):
        for b in range(gca.size):
            r = gca.mul_basis(a, b)
            ab = {r[1]: rational(r[0])} if r else {}
            lhs = h.apply(ab)
            rhs = {}
            for i, x in h.col(a).items():
                for j, y in h.col(b).items():
                    q = gca.mul_basis(i, j)
                    if q:
                        rhs[q[1]] = rhs.get(q[1], ZERO) + q[0] * x * y
            if lhs != vclean(rhs):
                return False
    return True


def pullback_iso(h: LinearMap, eta: HochschildCochain) -> HochschildCochain:
    """h*η = h⁻¹ ∘ η ∘ h^{⊗k} for an algebra isomorphism h."""
    gca = eta.gca
    if not is_multiplicative(h, gca):
        raise ValueError("h is not an algebra homomorphism")
    hinv = h.inverse()
    # fan-in of h: image basis vector -> [(source basis, coeff)]
    fan: dict = {}
    for j, col in h.cols.items():
        for i, x in col.items():
            fan.setdefault(i, []).append((j, x))
    out: dict = {}
    for key, vec in eta.values.items():
        w = hinv.apply(vec)
        if not w:
            continue
        choices = [fan.get(g, ()) for g in key]
        for combo in product(*choices):
            c = ONE
            for _, x in combo:
                c *= x
            vadd(out.setdefault(tuple(j for j, _ in combo), {}), w, c)
    return HochschildCochain(gca, eta.arity, eta.degree, out)


def symmetrize(eta: HochschildCochain, c: LinearMap) -> HochschildCochain:
    """½(c̄*(t(η)) + η), the c self-dual part of η."""
    return (pullback_iso(c, t_map(eta)) + eta).scale(rational("1/2"))


# ---------------------------------------------------------------------------
# HKR


def generator_indices(gca: FreeGCA):
    return [1 << j for j in range(gca.ngens)]


def epsilon(eta: HochschildCochain, check_closed=True) -> dict:
    """ε([η])(v_1⋯v_k) = Σ_σ (-1)^{spe(σ;v)} η(v_σ(1), .., v_σ(k)).

    Returned on every nondecreasing tuple of generators (V[1] is even, so
    repeated generators are allowed); values are vectors in ΛV.
    """
    if check_closed and not hoch_b(eta).is_zero():
        raise ValueError("ε is defined on closed cochains only")
    gca = eta.gca
    k = eta.arity
    gens = generator_indices(gca)
    deg = gca.degrees
    perms = list(permutations(range(k)))
    out = {}
    for word in combinations_with_replacement(range(gca.ngens), k):
        vs = [gens[j] for j in word]
        ds = [deg[v] for v in vs]
        acc: dict = {}
        for sigma in perms:
            val = eta.values.get(tuple(vs[s] for s in sigma))
            if val:
                vadd(acc, val, -ONE if spe(sigma, ds) else ONE)
        if acc:
            out[word] = acc
    return out


def is_antisymmetric(eta: HochschildCochain):
    """η(v_1..v_k) = -(-1)^{spe(τ;v)} η(v_k..v_1) for all generator inputs.

    Returns (True, None) or (False, witness tuple of generator positions).
    """
    gca = eta.gca
    gens = generator_indices(gca)
    deg = gca.degrees
    for word in product(range(gca.ngens), repeat=eta.arity):
        vs = tuple(gens[j] for j in word)
        s = reversal_parity([deg[v] for v in vs])
        lhs = eta(*vs)
        rhs = eta(*vs[::-1])
        # η(v) + (-1)^{spe} η(rev v) must vanish
        total = vadd(dict(lhs), rhs, -ONE if s else ONE)
        if total:
            return False, word
    return True, None


def antisymmetrize(eta: HochschildCochain) -> HochschildCochain:
    """η minus its signed reversal; always anti-symmetric on V-inputs."""
    gca = eta.gca
    deg = gca.degrees
    out = {k: dict(v) for k, v in eta.values.items()}
    for key, vec in eta.values.items():
        s = reversal_parity([deg[i] for i in key])
        vadd(out.setdefault(key[::-1], {}), vec, ONE if s else -ONE)
    return HochschildCochain(gca, eta.arity, eta.degree, out)


# ---------------------------------------------------------------------------
# primitives


def _shift(gca: FreeGCA, key, out):
    w = [0] * gca.ngens
    for j in range(gca.ngens):
        w[j] = (out >> j & 1) - sum(g >> j & 1 for g in key)
    return tuple(w)


def _block_basis(gca: FreeGCA, arity: int, w):
    """All (inputs, out) of the given arity whose weight shift is w."""
    per_gen = []
    for j, wj in enumerate(w):
        opts = []
        for o in (0, 1):
            r = o - wj
            if 0 <= r <= arity:
                for sub in combinations(range(arity), r):
                    opts.append((o, sub))
        if not opts:
            return []
        per_gen.append(opts)
    cells = []
    for choice in product(*per_gen):
        ins = [0] * arity
        out = 0
        for j, (o, sub) in enumerate(choice):
            out |= o << j
            for p in sub:
                ins[p] |= 1 << j
        cells.append((tuple(ins), out))
    cells.sort()
    return cells


def solve_primitive(zeta: HochschildCochain, check_closed=True):
    """Some η with b(η) = ζ, or NO_SOLUTION.

    The coboundary preserves the Z^n weight shift (weight of output minus
    weights of inputs), so the system splits into small independent blocks.
    """
    if check_closed and not hoch_b(zeta).is_zero():
        raise ValueError("solve_primitive needs a closed cochain")
    gca = zeta.gca
    k = zeta.arity
    if zeta.is_zero():
        return HochschildCochain(gca, max(k - 1, 0), zeta.degree - 1, {})
    if k == 0:
        return NO_SOLUTION
    blocks: dict = {}
    for key, vec in zeta.values.items():
        for o, x in vec.items():
            blocks.setdefault(_shift(gca, key, o), {})[(key, o)] = x
    ed = gca.deg(zeta.degree - 1)
    deg = gca.degrees
    result: dict = {}
    for w in sorted(blocks):
        rhs = blocks[w]
        cells = [
            (ins, out) for ins, out in _block_basis(gca, k - 1, w)
            if deg[out] == gca.deg(ed + sum(deg[i] - 1 for i in ins))
        ]
        ech = Echelon()
        for t, (ins, out) in enumerate(cells):
            col: dict = {}
            _b_into(col, gca, ed, ins, {out: ONE})
            flat = {}
            for key, vec in col.items():
                for o, x in vec.items():
                    if x:
                        flat[(key, o)] = x
            if flat:
                ech.add(flat, t)
        x = ech.express(rhs)
        if x is NO_SOLUTION:
            return NO_SOLUTION
        for t, c in x.items():
            ins, out = cells[t]
            vadd(result.setdefault(ins, {}), {out: c})
    eta = HochschildCochain(gca, k - 1, ed, result)
    return eta


# ---------------------------------------------------------------------------
# bar resolution comparison (verification only)


def _bar_differential(gca: FreeGCA, word):
    """b on A ⊗ A[1]^{⊗K} ⊗ A; returns list of (sign, word)."""
    deg = gca.degrees
    K = len(word) - 2
    out = []
    running = 0
    for i in range(K):
        running += deg[word[i]]
        r = gca.mul_basis(word[i], word[i + 1])
        if r is not None:
            e = i + running
            out.append(((-1 if e & 1 else 1) * r[0], word[:i] + (r[1],) + word[i + 2:]))
    # last term merges α_K α_{K+1}
    pre = sum(deg[word[j]] for j in range(K))
    r = gca.mul_basis(word[K], word[K + 1])
    if r is not None:
        e = K - 1 + pre
        out.append((-(-1 if e & 1 else 1) * r[0], word[:K] + (r[1],)))
    return out


def _tilde(eta: HochschildCochain, word) -> dict:
    """η̃(α_0 ⊗ .. ⊗ α_{k+1}) = (-1)^{|α_0||η|} α_0 η(α_1..α_k) α_{k+1}."""
    gca = eta.gca
    if len(word) != eta.arity + 2:
        return {}
    val = eta.values.get(tuple(word[1:-1]))
    if not val:
        return {}
    val = _mulvec(gca, word[0], val, True)
    val = _mulvec(gca, word[-1], val, False)
    if (gca.degrees[word[0]] * eta.degree) & 1:
        val = {i: -x for i, x in val.items()}
    return vclean(val)


def bar_comparison_defect(eta: HochschildCochain, words) -> list:
    """Inputs among `words` where r(b(η)) ≠ b*(r(η)); empty list = identity holds."""
    gca = eta.gca
    beta = hoch_b(eta)
    bad = []
    for word in words:
        word = tuple(word)
        lhs = _tilde(beta, word)
        rhs: dict = {}
        for s, w2 in _bar_differential(gca, word):
            v = _tilde(eta, w2)
            if v:
                vadd(rhs, v, s)
        if (eta.degree + 1) & 1:
            rhs = {i: -x for i, x in rhs.items()}
        if lhs != vclean(rhs):
            bad.append(word)
    return bad


def cochain_space_dim(gca: FreeGCA, arity: int) -> int:
    return gca.size ** (arity + 1)


def n_permutations(k: int) -> int:
    return math.factorial(k)
