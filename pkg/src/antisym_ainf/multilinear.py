"""
Sparse gapped multilinear maps and the two tree-summation kernels.

A multilinear map on basis tuples is a dict ``{inputs: {out: coeff}}``;
a gapped family is a dict ``{(k, beta): map}`` where k = len(inputs).

``composite`` evaluates  sum outer_l(inner(..), ..., inner(..))  over all
ways of splitting the inputs; ``insertion`` evaluates
sum ± outer(a_1, .., inner(..), .., a_k)  with the sign
(-1)^{sum_{j<i}(|a_j|+1)}.  Both enumerate from the outer entries
and fan in through a transposed table of the inner family, so the cost is
proportional to the number of nonzero terms rather than to dim^k.
"""

from __future__ import annotations

from .scalars import ZERO, ONE


def clean(entries: dict) -> dict:
    """Drop zero vectors and empty slots."""
    out = {}
    for slot, mm in entries.items():
        m2 = {}
        for key, vec in mm.items():
            v2 = {i: x for i, x in vec.items() if x}
            if v2:
                m2[key] = v2
        if m2:
            out[slot] = m2
    return out


def accumulate(target: dict, slot, key, vec: dict, c=ONE):
    mm = target.get(slot)
    if mm is None:
        mm = target[slot] = {}
    acc = mm.get(key)
    if acc is None:
        if c == ONE:
            mm[key] = dict(vec)
        else:
            mm[key] = {i: c * x for i, x in vec.items()}
        return
    for i, x in vec.items():
        acc[i] = acc.get(i, ZERO) + c * x


def add_into(target: dict, entries: dict, c=ONE):
    for slot, mm in entries.items():
        for key, vec in mm.items():
            accumulate(target, slot, key, vec, c)
    return target


def combine(*pairs) -> dict:
    """Linear combination  sum c_i * entries_i  of gapped families."""
    out: dict = {}
    for c, entries in pairs:
        add_into(out, entries, c)
    return clean(out)


def fanin_table(entries: dict) -> dict:
    """out index -> sorted list of (inputs, beta, coeff)."""
    table: dict = {}
    for (k, beta), mm in entries.items():
        for key, vec in mm.items():
            for i, x in vec.items():
                if x:
                    table.setdefault(i, []).append((key, beta, x))
    for items in table.values():
        items.sort(key=lambda t: (len(t[0]), t[1], t[0]))
    return table


def linear_table(cols: dict, beta=ZERO) -> dict:
    """Fan-in table of a linear map given by columns."""
    return fanin_table({(1, beta): {(j,): col for j, col in cols.items()}})


def identity_table(dim: int) -> dict:
    return {i: [((i,), ZERO, ONE)] for i in range(dim)}


def merge_tables(*tables) -> dict:
    out: dict = {}
    for t in tables:
        for i, items in t.items():
            out.setdefault(i, []).extend(items)
    for items in out.values():
        items.sort(key=lambda t: (len(t[0]), t[1], t[0]))
    return out


def _min_arity(table: dict) -> dict:
    return {i: min(len(t[0]) for t in items) for i, items in table.items()}


def expand(gammas, tables, kcap, ecap):
    """All (inputs, energy, coeff) for one outer entry; tables[j] feeds slot j."""
    n = len(gammas)
    mins = []
    for j, g in enumerate(gammas):
        items = tables[j].get(g)
        if not items:
            return ()
        mins.append(len(items[0][0]))
    suffix = [0] * (n + 1)
    for j in range(n - 1, -1, -1):
        suffix[j] = suffix[j + 1] + mins[j]
    partial = [((), ZERO, ONE)]
    for j, g in enumerate(gammas):
        items = tables[j][g]
        budget = kcap - suffix[j + 1]
        new = []
        for ins, e, c in partial:
            room = budget - len(ins)
            for ins2, e2, c2 in items:
                if len(ins2) > room:
                    break
                e3 = e + e2
                if e3 > ecap:
                    continue
                new.append((ins + ins2, e3, c * c2))
        if not new:
            return ()
        partial = new
    return partial


def composite(outer: dict, tables, kcap, ecap, out=None) -> dict:
    """sum over outer entries of outer(inner ⊗ ... ⊗ inner).

    ``tables`` is either one fan-in table used for every slot or a callable
    ``arity -> list of tables`` (one per slot).
    """
    if out is None:
        out = {}
    per_slot = callable(tables)
    for (l, b0), mm in outer.items():
        if b0 > ecap:
            continue
        slot_tables = tables(l) if per_slot else [tables] * l
        for gammas, vec in mm.items():
            for ins, e, c in expand(gammas, slot_tables, kcap, ecap - b0):
                accumulate(out, (len(ins), b0 + e), ins, vec, c)
    return out


def insertion(outer: dict, table: dict, degrees, kcap, ecap, out=None) -> dict:
    """sum_i (-1)^{sum_{j<i}(|a_j|+1)} outer(a_1, .., inner(..), .., a_k)."""
    if out is None:
        out = {}
    for (k1, b1), mm in outer.items():
        if b1 > ecap:
            continue
        for gammas, vec in mm.items():
            parity = 0
            for i, g in enumerate(gammas):
                items = table.get(g)
                if items:
                    head, tail = gammas[:i], gammas[i + 1:]
                    for ins, e2, c in items:
                        k = k1 - 1 + len(ins)
                        if k > kcap:
                            break
                        e = b1 + e2
                        if e > ecap:
                            continue
                        accumulate(out, (k, e), head + ins + tail, vec, -c if parity else c)
                parity ^= (degrees[g] + 1) & 1
    return out


def apply_outputs(entries: dict, gapped_cols: dict, ecap, out=None) -> dict:
    """Post-compose with a gapped linear map {beta: cols}."""
    if out is None:
        out = {}
    for (k, b), mm in entries.items():
        for b2, cols in gapped_cols.items():
            e = b + b2
            if e > ecap:
                continue
            for key, vec in mm.items():
                acc: dict = {}
                for j, x in vec.items():
                    col = cols.get(j)
                    if col:
                        for i, y in col.items():
                            acc[i] = acc.get(i, ZERO) + x * y
                if acc:
                    accumulate(out, (k, e), key, acc)
    return out


def restrict(entries: dict, kcap=None, ecap=None, arity=None) -> dict:
    out = {}
    for (k, b), mm in entries.items():
        if kcap is not None and k > kcap:
            continue
        if ecap is not None and b > ecap:
            continue
        if arity is not None and k != arity:
            continue
        out[(k, b)] = mm
    return out


def first_difference(a: dict, b: dict):
    """Smallest (slot, inputs) where two clean families differ, or None."""
    diff = combine((ONE, a), (-ONE, b))
    if not diff:
        return None
    slot = min(diff, key=lambda s: (s[0] + s[1], s[0], s[1]))
    key = min(diff[slot])
    return slot, key, diff[slot][key]
