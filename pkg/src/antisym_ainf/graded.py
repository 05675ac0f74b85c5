"""
Graded vector spaces over Q, the free graded-commutative algebra on odd
generators, Koszul signs, and exact sparse linear algebra.

Vectors ("elements" with field coefficients) are plain dicts
``{basis index: rational}`` with zero coefficients absent.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

from .scalars import ZERO, ONE, rational, fmt_rational


class NoSolution:
    """Sentinel value returned by the linear solvers."""

    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "NoSolution"

    def __bool__(self):
        return False


NO_SOLUTION = NoSolution()


# ---------------------------------------------------------------------------
# vectors


def vadd(acc: dict, v: dict, c=ONE) -> dict:
    """acc += c*v in place; returns acc."""
    for k, x in v.items():
        y = acc.get(k, ZERO) + c * x
        if y:
            acc[k] = y
        else:
            acc.pop(k, None)
    return acc


def vscale(v: dict, c) -> dict:
    if not c:
        return {}
    return {k: c * x for k, x in v.items()}


def vclean(v: dict) -> dict:
    return {k: x for k, x in v.items() if x}


def vsub(a: dict, b: dict) -> dict:
    return vadd(dict(a), b, -ONE)


# ---------------------------------------------------------------------------
# spaces


def norm_degree(d: int, modulus: int) -> int:
    return d % modulus if modulus else d


class Space:
    """A graded Q-vector space with a named, ordered basis.

    ``modulus`` is the grading modulus N (even, 0 = integer grading).
    ``gca`` is set when the first 2**n basis vectors form a free
    graded-commutative algebra (basis index = generator bitmask).
    """

    def __init__(self, labels, degrees, modulus=0, gca=None):
        if modulus % 2 or modulus < 0:
            raise ValueError("grading modulus must be even and nonnegative")
        labels = tuple(labels)
        if len(set(labels)) != len(labels):
            raise ValueError("duplicate basis labels")
        self.labels = labels
        self.modulus = modulus
        self.degrees = tuple(norm_degree(int(d), modulus) for d in degrees)
        if len(self.degrees) != len(labels):
            raise ValueError("one degree per basis label required")
        self.gca = gca
        self._index = {lab: i for i, lab in enumerate(labels)}

    @property
    def dim(self) -> int:
        return len(self.labels)

    def index(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise KeyError("unknown basis label %r" % label) from None

    def degree(self, i: int) -> int:
        return self.degrees[i]

    def deg(self, d: int) -> int:
        return norm_degree(d, self.modulus)

    def same_degree(self, a: int, b: int) -> bool:
        return self.deg(a - b) == 0

    def basis_of_degree(self, d: int):
        d = self.deg(d)
        return [i for i, e in enumerate(self.degrees) if e == d]

    def vector_degree(self, v: dict):
        """Degree of a homogeneous nonzero vector (None for 0)."""
        ds = {self.degrees[i] for i in v}
        if len(ds) > 1:
            raise ValueError("inhomogeneous vector")
        return ds.pop() if ds else None

    def __eq__(self, other):
        return (
            isinstance(other, Space)
            and self.labels == other.labels
            and self.degrees == other.degrees
            and self.modulus == other.modulus
        )

    def __hash__(self):
        return hash((self.labels, self.degrees, self.modulus))

    def __repr__(self):
        return "Space(dim=%d, N=%d)" % (self.dim, self.modulus)

    def format(self, v: dict) -> str:
        if not v:
            return "0"
        return " + ".join(
            "%s*%s" % (fmt_rational(v[i]), self.labels[i]) for i in sorted(v)
        )


def direct_sum(first: Space, extra_labels, extra_degrees) -> Space:
    """first ⊕ span(extras); keeps the gca marker of `first`."""
    return Space(
        tuple(first.labels) + tuple(extra_labels),
        tuple(first.degrees) + tuple(extra_degrees),
        first.modulus,
        gca=first.gca,
    )


class FreeGCA(Space):
    """ΛV on odd generators; basis index of a monomial = its generator bitmask."""

    def __init__(self, names, degrees, modulus=0):
        names = tuple(names)
        degrees = tuple(int(d) for d in degrees)
        if len(set(names)) != len(names):
            raise ValueError("duplicate generator names")
        if len(names) != len(degrees):
            raise ValueError("one degree per generator required")
        for nm, d in zip(names, degrees):
            if d % 2 == 0:
                raise ValueError("generator %s has even degree %d" % (nm, d))
            if not nm or "." in nm or nm == "1":
                raise ValueError("bad generator name %r" % nm)
        self.names = names
        self.gen_degrees = tuple(norm_degree(d, modulus) for d in degrees)
        n = len(names)
        labels, degs = [], []
        for mask in range(1 << n):
            gens = [j for j in range(n) if mask >> j & 1]
            labels.append(".".join(names[j] for j in gens) if gens else "1")
            degs.append(sum(degrees[j] for j in gens))
        super().__init__(labels, degs, modulus, gca=self)
        self.ngens = n
        self._mul = {}
        for a in range(1 << n):
            for b in range(1 << n):
                if a & b:
                    continue
                # sign from moving each generator of b past the larger ones of a
                s = 0
                for j in range(n):
                    if b >> j & 1:
                        s += bin(a >> (j + 1)).count("1")
                self._mul[a, b] = (-1 if s & 1 else 1, a | b)

    @property
    def size(self) -> int:
        return 1 << self.ngens

    def generator(self, j: int) -> int:
        return 1 << j

    def word_length(self, mask: int) -> int:
        return bin(mask).count("1")

    def mul_basis(self, a: int, b: int):
        """(sign, product index) for basis monomials, or None when a∧b = 0."""
        return self._mul.get((a, b))

    def factorizations(self, mask: int):
        """All (sign, a, b) with a∧b = sign*mask."""
        gens = [j for j in range(self.ngens) if mask >> j & 1]
        out = []
        for r in range(len(gens) + 1):
            for sub in combinations(gens, r):
                a = sum(1 << j for j in sub)
                b = mask ^ a
                out.append((self._mul[a, b][0], a, b))
        return out

    def weight(self, mask: int):
        return tuple(mask >> j & 1 for j in range(self.ngens))


def gca_multiply(a: dict, b: dict, gca: FreeGCA) -> dict:
    """Exterior product of two elements of ΛV."""
    out: dict = {}
    for i, x in a.items():
        for j, y in b.items():
            r = gca._mul.get((i, j))
            if r is not None:
                s, k = r
                z = out.get(k, ZERO) + s * x * y
                if z:
                    out[k] = z
                else:
                    out.pop(k, None)
    return out


def parity_involution(a: dict, gca: FreeGCA) -> dict:
    """The automorphism induced by -Id_V."""
    return {i: (-x if bin(i).count("1") & 1 else x) for i, x in a.items()}


# ---------------------------------------------------------------------------
# signs


def spe(perm, degrees) -> int:
    """Exponent sum_{i<j, σ(i)>σ(j)} (|α_σ(i)|+1)(|α_σ(j)|+1), reduced mod 2.

    ``perm`` is a 0-based tuple with perm[i] = σ(i).
    """
    k = len(perm)
    if len(degrees) != k:
        raise ValueError("permutation and degree list lengths differ")
    if sorted(perm) != list(range(k)):
        raise ValueError("not a permutation: %r" % (perm,))
    s = 0
    for i in range(k):
        pi = perm[i]
        ei = (degrees[pi] + 1) & 1
        if not ei:
            continue
        for j in range(i + 1, k):
            if perm[j] < pi and (degrees[perm[j]] + 1) & 1:
                s += 1
    return s & 1


def spe_sign(perm, degrees) -> int:
    return -1 if spe(perm, degrees) else 1


def reversal_parity(degrees) -> int:
    """spe(τ; α) mod 2 for the order-reversing τ: pairs of even-degree inputs."""
    e = sum(1 for d in degrees if not d & 1)
    return (e * (e - 1) // 2) & 1


# ---------------------------------------------------------------------------
# exact sparse elimination


class Echelon:
    """Incremental column echelon form over Q with deterministic pivoting.

    Pivot of a reduced vector = its smallest key, i.e. the first nonzero
    entry in declared basis order.  Each stored pivot vector remembers its
    expression as a combination of the vectors that were added.
    """

    def __init__(self):
        self.pivots = []  # (row, vec, combo)
        self._rows = {}

    def reduce(self, v: dict, track=True):
        v = dict(v)
        combo = {} if track else None
        for row, pv, pc in self.pivots:
            c = v.get(row)
            if c:
                vadd(v, pv, -c)
                if track:
                    vadd(combo, pc, -c)
        return v, combo

    def add(self, v: dict, tag) -> bool:
        """Insert vector `v` labelled `tag`; True iff it was independent."""
        r, combo = self.reduce(v)
        if not r:
            self.dependents.append((tag, vadd(combo, {tag: ONE})))
            return False
        row = min(r)
        c = 1 / r[row]
        r = vscale(r, c)
        combo = vscale(vadd(combo, {tag: ONE}), c)
        self.pivots.append((row, r, combo))
        return True

    @property
    def dependents(self):
        if not hasattr(self, "_deps"):
            self._deps = []
        return self._deps

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def express(self, y: dict):
        """Coefficients on the added tags reproducing y, or NO_SOLUTION."""
        r, combo = self.reduce(y)
        if r:
            return NO_SOLUTION
        return vscale(combo, -ONE) if combo else {}


def solve_columns(columns, rhs: dict):
    """Find x with sum_j x[j]*columns[j] = rhs.

    ``columns`` is a sequence of sparse vectors.  Returns a dict
    ``{j: x_j}`` (free variables set to 0) or NO_SOLUTION.
    """
    ech = Echelon()
    for j, col in enumerate(columns):
        if col:
            ech.add(col, j)
    return ech.express(rhs)


def rank_of(vectors) -> int:
    ech = Echelon()
    for j, v in enumerate(vectors):
        if v:
            ech.add(v, j)
    return ech.rank


# ---------------------------------------------------------------------------
# linear maps


class LinearMap:
    """Sparse matrix between spaces, stored by columns: cols[src] = {tgt: q}."""

    def __init__(self, source: Space, target: Space, cols=None, degree=0):
        self.source = source
        self.target = target
        self.degree = degree
        self.cols = {}
        for j, col in (cols or {}).items():
            col = vclean(col)
            if col:
                self.cols[j] = col

    @classmethod
    def identity(cls, space: Space):
        return cls(space, space, {i: {i: ONE} for i in range(space.dim)})

    @classmethod
    def zero(cls, source, target, degree=0):
        return cls(source, target, {}, degree)

    @classmethod
    def from_function(cls, source, target, fn, degree=0):
        return cls(source, target, {j: fn(j) for j in range(source.dim)}, degree)

    def apply(self, v: dict) -> dict:
        out: dict = {}
        for j, x in v.items():
            col = self.cols.get(j)
            if col:
                vadd(out, col, x)
        return out

    def __call__(self, v: dict) -> dict:
        return self.apply(v)

    def col(self, j: int) -> dict:
        return self.cols.get(j, {})

    def compose(self, other: "LinearMap") -> "LinearMap":
        """self ∘ other."""
        return LinearMap(
            other.source,
            self.target,
            {j: self.apply(c) for j, c in other.cols.items()},
            self.degree + other.degree,
        )

    def __matmul__(self, other):
        return self.compose(other)

    def __add__(self, other):
        cols = {j: dict(c) for j, c in self.cols.items()}
        for j, c in other.cols.items():
            vadd(cols.setdefault(j, {}), c)
        return LinearMap(self.source, self.target, cols, self.degree)

    def scale(self, c):
        c = rational(c)
        return LinearMap(
            self.source, self.target,
            {j: vscale(col, c) for j, col in self.cols.items()}, self.degree,
        )

    def __sub__(self, other):
        return self + other.scale(-1)

    def __eq__(self, other):
        return isinstance(other, LinearMap) and self.cols == other.cols

    def is_zero(self) -> bool:
        return not self.cols

    def is_identity(self) -> bool:
        return self.source == self.target and self.cols == {
            i: {i: ONE} for i in range(self.source.dim)
        }

    def respects_grading(self) -> bool:
        for j, col in self.cols.items():
            for i in col:
                if not self.target.same_degree(
                    self.target.degree(i), self.source.degree(j) + self.degree
                ):
                    return False
        return True

    def rank(self) -> int:
        return rank_of([self.cols[j] for j in sorted(self.cols)])

    def inverse(self) -> "LinearMap":
        if self.source.dim != self.target.dim:
            raise ValueError("non-square map has no inverse")
        columns = [self.col(j) for j in range(self.source.dim)]
        ech = Echelon()
        for j, c in enumerate(columns):
            if c:
                ech.add(c, j)
        if ech.rank != self.source.dim:
            raise ZeroDivisionError("singular linear map")
        cols = {}
        for i in range(self.target.dim):
            x = ech.express({i: ONE})
            cols[i] = x
        return LinearMap(self.target, self.source, cols, -self.degree)

    def rows(self):
        r: dict = {}
        for j, col in self.cols.items():
            for i, x in col.items():
                r.setdefault(i, {})[j] = x
        return r

    def __repr__(self):
        return "LinearMap(%d->%d, deg %d, nnz=%d)" % (
            self.source.dim, self.target.dim, self.degree,
            sum(len(c) for c in self.cols.values()),
        )


def linear_solve(A: LinearMap, y: dict):
    """Some x with A x = y (deterministic), or NO_SOLUTION."""
    x = solve_columns([A.col(j) for j in range(A.source.dim)], y)
    if x is NO_SOLUTION:
        return x
    assert A.apply(x) == vclean(y)
    return x


def parity_map(space: Space, extra_signs=None) -> LinearMap:
    """c̄ = parity involution on the ΛV part, given signs on extra vectors."""
    gca = space.gca
    cols = {}
    n = gca.size if gca is not None else 0
    extra_signs = extra_signs or {}
    for i in range(space.dim):
        if i < n:
            cols[i] = {i: -ONE if bin(i).count("1") & 1 else ONE}
        else:
            s = extra_signs.get(space.labels[i])
            if s is None:
                raise ValueError(
                    "no involution sign for extra vector %s" % space.labels[i])
            cols[i] = {i: rational(s)}
    return LinearMap(space, space, cols)


# ---------------------------------------------------------------------------
# cohomology and splittings


@dataclass
class Splitting:
    """Deformation retraction of (space, d) onto its cohomology.

    ``harmonic`` is the cohomology space D̄; i: D̄ -> C̄, p: C̄ -> D̄ and
    h: C̄ -> C̄ (degree -1) satisfy p d = 0, d i = 0, p i = Id and
    d h + h d = i p - Id.
    """

    harmonic: Space
    i: LinearMap
    p: LinearMap
    h: LinearMap
    ranks: dict = field(default_factory=dict)

    @property
    def representatives(self):
        return [self.i.col(t) for t in range(self.harmonic.dim)]


def _normalize(v: dict) -> dict:
    k = min(v)
    return vscale(v, 1 / v[k])


def eigen_subspaces(space: Space, c: LinearMap):
    """Bases of the ±1 eigenspaces of an involution, per degree."""
    if not (c @ c).is_identity():
        raise ValueError("c is not an involution")
    out = []
    for sign in (ONE, -ONE):
        ech = Echelon()
        vecs = []
        for i in range(space.dim):
            v = vadd({i: ONE}, c.col(i), sign)
            if v and ech.add(v, i):
                vecs.append(_normalize(v))
        out.append(vecs)
    return out


def cohomology(d: LinearMap, subspaces=None) -> Splitting:
    """Cohomology of a square-zero degree +1 map with splitting data.

    ``subspaces`` optionally lists d-invariant subspaces (bases of
    homogeneous vectors) whose direct sum is the whole space; the
    splitting is built inside each one, so it commutes with any operator
    that acts by a scalar on each.  Complements are chosen by scanning
    candidates in declared basis order.
    """
    space = d.source
    if d.target != space or d.degree != 1:
        raise ValueError("differential must be an endomorphism of degree +1")
    if not (d @ d).is_zero():
        raise ValueError("d∘d ≠ 0")
    if subspaces is None:
        subspaces = [[{i: ONE} for i in range(space.dim)]]

    B, W, H, L = [], [], [], []  # image vecs, their preimages, harmonic, complement
    for sub in subspaces:
        by_deg: dict = {}
        for v in sub:
            by_deg.setdefault(space.vector_degree(v), []).append(v)
        for deg in sorted(by_deg):
            vs = by_deg[deg]
            prev = by_deg.get(space.deg(deg - 1), [])
            # image of d inside this degree
            ech_img = Echelon()
            b_here = []
            for w in prev:
                dw = d.apply(w)
                if dw and ech_img.add(dw, len(b_here)):
                    b_here.append((dw, w))
            # kernel of d on this degree
            ech_k = Echelon()
            for t, v in enumerate(vs):
                dv = d.apply(v)
                if dv:
                    ech_k.add(dv, t)
                else:
                    ech_k.dependents.append((t, {t: ONE}))
            kernel = []
            for _, combo in ech_k.dependents:
                kv = {}
                for t, c in combo.items():
                    vadd(kv, vs[t], c)
                if kv:
                    kernel.append(kv)
            # harmonic complement of the image inside the kernel
            ech_h = Echelon()
            for t, (b, _) in enumerate(b_here):
                ech_h.add(b, ("b", t))
            h_here = []
            for t, kv in enumerate(kernel):
                if ech_h.add(kv, ("k", t)):
                    h_here.append(_normalize(kv))
            # complement of the kernel
            ech_l = Echelon()
            for t, kv in enumerate(kernel):
                ech_l.add(kv, ("k", t))
            l_here = []
            for t, v in enumerate(vs):
                if ech_l.add(v, ("v", t)):
                    l_here.append(v)
            for b, w in b_here:
                B.append(b)
                W.append(w)
            H.extend(h_here)
            L.extend(l_here)

    H.sort(key=min)
    frame = B + H + L
    if len(frame) != space.dim:
        raise ValueError("subspaces do not decompose the space")
    ech = Echelon()
    for t, v in enumerate(frame):
        if not ech.add(v, t):
            raise ValueError("subspaces are not independent")
    nb, nh = len(B), len(H)

    coords = [ech.express({j: ONE}) for j in range(space.dim)]

    # harmonic space: reuse a basis label when the representative is one
    labels, degrees = [], []
    for t, v in enumerate(H):
        if len(v) == 1 and next(iter(v.values())) == 1:
            labels.append(space.labels[next(iter(v))])
        else:
            labels.append("h%d" % t)
        degrees.append(space.vector_degree(v))
    gca = space.gca
    if gca is not None and not (
        nh >= gca.size and all(H[t] == {t: ONE} for t in range(gca.size))
    ):
        gca = None
    harmonic = Space(labels, degrees, space.modulus, gca=gca)

    i_map = LinearMap(harmonic, space, {t: H[t] for t in range(nh)})
    p_cols, h_cols = {}, {}
    # L-part of each preimage w_j
    lpart = []
    for w in W:
        x = {}
        for j, c in w.items():
            vadd(x, coords[j], c)
        lp = {}
        for t, c in x.items():
            if t >= nb + nh:
                vadd(lp, L[t - nb - nh], c)
        lpart.append(lp)
    for j in range(space.dim):
        cj = coords[j]
        p_cols[j] = {t - nb: c for t, c in cj.items() if nb <= t < nb + nh}
        hv = {}
        for t, c in cj.items():
            if t < nb:
                vadd(hv, lpart[t], -c)
        h_cols[j] = hv
    p_map = LinearMap(space, harmonic, p_cols)
    h_map = LinearMap(space, space, h_cols, degree=-1)
    ranks: dict = {}
    for deg in harmonic.degrees:
        ranks[deg] = ranks.get(deg, 0) + 1
    return Splitting(harmonic, i_map, p_map, h_map, ranks)
