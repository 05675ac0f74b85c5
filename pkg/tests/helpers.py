"""Shared random generators for tests."""

from antisym_ainf.ainfinity import GappedStructure
from antisym_ainf.graded import FreeGCA
from antisym_ainf.scalars import ONE, rational


def gca(n, N=0):
    return FreeGCA(["v%d" % (j + 1) for j in range(n)], [1] * n, N)


def random_entries(rng, space, k, count, shift, crange=2):
    """Random basis-tuple entries of degree `shift - k` (2 for m, 1 for f)."""
    deg = space.degrees
    mm = {}
    for _ in range(count):
        key = tuple(rng.randrange(space.dim) for _ in range(k))
        want = space.deg(sum(deg[i] for i in key) + shift - k)
        outs = [o for o in range(space.dim) if deg[o] == want]
        if outs:
            x = rng.randint(-crange, crange)
            if x:
                mm.setdefault(key, {})[rng.choice(outs)] = rational(x)
    return mm


def random_diffeo(rng, space, slots=((2, 0), (3, 0), (1, 1), (2, 1)), count=3,
                  linear=None):
    entries = {(1, 0): {(i,): {i: ONE} for i in range(space.dim)}}
    if linear is not None:
        entries[(1, 0)] = {(j,): col for j, col in linear.cols.items()}
    for k, b in slots:
        mm = random_entries(rng, space, k, count, 1)
        if mm:
            entries[(k, rational(b))] = mm
    return GappedStructure(space, entries, "f")


def random_cochain(rng, g, arity, degree, count=6, crange=3):
    from antisym_ainf.hochschild import HochschildCochain
    deg = g.degrees
    vals = {}
    for _ in range(count):
        key = tuple(rng.randrange(g.size) for _ in range(arity))
        want = g.deg(degree + sum(deg[i] - 1 for i in key))
        outs = [o for o in range(g.size) if deg[o] == want]
        if outs:
            x = rng.randint(-crange, crange)
            if x:
                vals.setdefault(key, {})[rng.choice(outs)] = rational(x)
    return HochschildCochain(g, arity, degree, vals)


def closed_antisymmetric(rng, g, arity, degree, max_cells=400):
    """A random nonzero closed anti-symmetric cochain supported in one weight block.

    The block is chosen among those touching generator-only inputs, and the
    constraint matrix (b plus the anti-symmetry rows) is solved densely.
    """
    from fractions import Fraction
    from antisym_ainf.hochschild import HochschildCochain, hoch_b
    from oracles import cells_by_weight, nullspace, spe_naive

    n = g.ngens
    gens = {1 << j for j in range(n)}
    groups = cells_by_weight(n, arity, degree)
    keys = sorted(w for w, cells in groups.items()
                  if len(cells) <= max_cells and any(set(c[0]) <= gens for c in cells))
    rng.shuffle(keys)
    for w in keys:
        cells = groups[w]
        cols = []
        for ins, out in cells:
            col = {}
            b = hoch_b(HochschildCochain(g, arity, degree, {ins: {out: ONE}}))
            for key, vec in b.values.items():
                for o, x in vec.items():
                    col[("b", key, o)] = Fraction(int(x.numerator), int(x.denominator))
            if set(ins) <= gens:
                rev = ins[::-1]
                s = (-1) ** spe_naive(tuple(range(arity))[::-1], [g.degrees[a] for a in rev])
                col[("as", ins, out)] = col.get(("as", ins, out), 0) + 1
                col[("as", rev, out)] = col.get(("as", rev, out), 0) + s
            cols.append({r: x for r, x in col.items() if x})
        basis = nullspace(cols, len(cells))
        if not basis:
            continue
        for _ in range(10):
            x = [Fraction(0)] * len(cells)
            for v in basis:
                c = rng.choice((-2, -1, 0, 1, 2))
                x = [a + c * b for a, b in zip(x, v)]
            vals = {}
            for (ins, out), a in zip(cells, x):
                if a:
                    vals.setdefault(ins, {})[out] = rational(a)
            eta = HochschildCochain(g, arity, degree, vals)
            if any(set(k) <= gens for k in eta.values):
                return eta
    raise RuntimeError("no closed anti-symmetric cochain found")


def fixture(name):
    from antisym_ainf import textio
    from antisym_ainf.cli import read_input
    return textio.parse(read_input("@" + name))


def random_unitriangular(rng, space, crange=2):
    """A degree-preserving invertible linear map: identity plus strictly upper entries."""
    from antisym_ainf.graded import LinearMap
    cols = {}
    for j in range(space.dim):
        col = {j: ONE}
        for i in range(j):
            if space.degrees[i] == space.degrees[j] and rng.random() < 0.5:
                x = rng.randint(-crange, crange)
                if x:
                    col[i] = rational(x)
        cols[j] = col
    return LinearMap(space, space, cols)
