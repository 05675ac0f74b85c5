"""
Line-oriented text format for structures.

    # comment
    grading 0
    generators v1:1 v2:1
    extra x:0 y:1
    truncation energy 3 arity 5
    involution parity            (or: identity, custom)
    involution_sign x 1          (extra vectors under parity; default 1)
    involution_col x -> 1*x      (columns of a custom involution)
    canonical_m2
    op 2 1/2 : v1, v2 -> 3*v1.v2 + -1/2*x
    op 0 1 : -> 1*v1

Emission is normalized (fixed directive order, sorted entries), so
emit(parse(emit(M))) == emit(M).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional

from .ainfinity import DegreeError, GappedStructure, STRUCTURE
from .graded import FreeGCA, LinearMap, Space, direct_sum, parity_map
from .scalars import ONE, TruncParams, fmt_rational, parse_rational, rational


class ParseError(ValueError):
    def __init__(self, line: int, column: int, reason: str):
        super().__init__("line %d, column %d: %s" % (line, column, reason))
        self.line = line
        self.column = column
        self.reason = reason


@dataclass
class Model:
    space: Space
    structure: GappedStructure
    trunc: Optional[TruncParams]
    involution: str = "parity"           # parity | identity | custom
    extra_signs: dict = field(default_factory=dict)
    custom_cols: dict = field(default_factory=dict)

    def involution_map(self) -> LinearMap:
        sp = self.space
        if self.involution == "identity":
            return LinearMap.identity(sp)
        if self.involution == "custom":
            return LinearMap(sp, sp, dict(self.custom_cols))
        ngca = sp.gca.size if sp.gca is not None else 0
        signs = {lab: self.extra_signs.get(lab, 1) for lab in sp.labels[ngca:]}
        return parity_map(sp, signs)


_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


class _Line:
    """Token cursor over one line with column tracking."""

    def __init__(self, text: str, lineno: int):
        self.text = text
        self.lineno = lineno

    def fail(self, col: int, reason: str):
        raise ParseError(self.lineno, col + 1, reason)

    def tokens(self):
        return [(m.start(), m.group()) for m in re.finditer(r"\S+", self.text)]


def _parse_decl(line: _Line, toks, what):
    """name:degree pairs."""
    out = []
    for col, tok in toks:
        if ":" not in tok:
            line.fail(col, "expected name:degree in %s, got %r" % (what, tok))
        name, d = tok.split(":", 1)
        if not _NAME.fullmatch(name):
            line.fail(col, "bad %s name %r" % (what, name))
        try:
            deg = int(d)
        except ValueError:
            line.fail(col + len(name) + 1, "degree %r is not an integer" % d)
        out.append((col, name, deg))
    return out


def _parse_terms(line: _Line, text: str, offset: int, space: Space) -> dict:
    """'c*label + c*label' -> {index: coeff}."""
    out: dict = {}
    stripped = text.strip()
    if stripped == "0":
        return out
    pos = offset
    for part in text.split("+"):
        col = pos + (len(part) - len(part.lstrip()))
        pos += len(part) + 1
        term = part.strip()
        if not term:
            line.fail(col, "empty term")
        if "*" in term:
            c, lab = term.rsplit("*", 1)
            try:
                coeff = parse_rational(c.replace(" ", ""))
            except ValueError:
                line.fail(col, "bad coefficient %r" % c.strip())
            lab = lab.strip()
        elif term.startswith("-"):
            coeff, lab = -ONE, term[1:].strip()
        else:
            coeff, lab = ONE, term
        try:
            i = space.index(lab)
        except KeyError:
            line.fail(col, "unknown basis vector %r" % lab)
        out[i] = out.get(i, rational(0)) + coeff
    return {i: x for i, x in sorted(out.items()) if x}


def parse(text: str) -> Model:
    modulus = 0
    gens, extras = None, []
    trunc = None
    involution = "parity"
    signs: dict = {}
    custom_lines = []
    canonical = False
    ops = []
    seen = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0].rstrip()
        if not body.strip():
            continue
        line = _Line(body, lineno)
        toks = line.tokens()
        col0, head = toks[0]
        if head in ("grading", "generators", "extra", "truncation", "involution",
                    "canonical_m2") and head in seen:
            line.fail(col0, "directive %r repeated" % head)
        if head == "grading":
            if len(toks) != 2:
                line.fail(col0, "usage: grading N")
            try:
                modulus = int(toks[1][1])
            except ValueError:
                line.fail(toks[1][0], "grading modulus must be an integer")
            if modulus < 0 or modulus % 2:
                line.fail(toks[1][0], "grading modulus must be even and nonnegative")
        elif head == "generators":
            gens = (line, _parse_decl(line, toks[1:], "generator"))
        elif head == "extra":
            extras = _parse_decl(line, toks[1:], "extra vector")
            extras_line = line
        elif head == "truncation":
            words = [t for _, t in toks]
            if len(words) != 5 or words[1] != "energy" or words[3] != "arity":
                line.fail(col0, "usage: truncation energy E arity k")
            try:
                trunc = TruncParams(parse_rational(words[2]), int(words[4]))
            except ValueError as e:
                line.fail(toks[2][0], str(e))
        elif head == "involution":
            if len(toks) != 2 or toks[1][1] not in ("parity", "identity", "custom"):
                line.fail(col0, "usage: involution parity|identity|custom")
            involution = toks[1][1]
        elif head == "involution_sign":
            if len(toks) != 3 or toks[2][1] not in ("1", "-1", "+1"):
                line.fail(col0, "usage: involution_sign label 1|-1")
            if toks[1][1] in signs:
                line.fail(toks[1][0], "sign for %r given twice" % toks[1][1])
            signs[toks[1][1]] = (int(toks[2][1]), line, toks[1][0])
        elif head == "involution_col":
            custom_lines.append(line)
        elif head == "canonical_m2":
            if len(toks) != 1:
                line.fail(toks[1][0], "canonical_m2 takes no arguments")
            canonical = True
        elif head == "op":
            ops.append(line)
        else:
            line.fail(col0, "unknown directive %r" % head)
        seen.add(head)

    # the space
    labels_seen = {}
    gca = None
    if gens is not None:
        gline, decl = gens
        for col, name, d in decl:
            if name in labels_seen:
                gline.fail(col, "duplicate generator %r" % name)
            labels_seen[name] = col
            if d % 2 == 0:
                gline.fail(col, "generator %s has even degree %d; V must be odd" % (name, d))
        gca = FreeGCA([n for _, n, _ in decl], [d for _, _, d in decl], modulus)
        space: Space = gca
    else:
        space = None
    if extras:
        taken = set(gca.labels) if gca is not None else set()
        for col, name, _ in extras:
            if name in taken:
                extras_line.fail(col, "duplicate basis label %r" % name)
            taken.add(name)
        names = [n for _, n, _ in extras]
        degs = [d for _, _, d in extras]
        if gca is not None:
            space = direct_sum(gca, names, degs)
        else:
            space = Space(names, degs, modulus)
    if space is None:
        raise ParseError(1, 1, "no generators or extra vectors declared")

    for lab, (_, line, col) in signs.items():
        if lab not in space.labels[gca.size if gca is not None else 0:]:
            line.fail(col, "involution_sign applies to extra vectors only, not %r" % lab)
    custom_cols = {}
    for line in custom_lines:
        m = re.match(r"\s*involution_col\s+(\S+)\s*->(.*)$", line.text)
        if not m:
            line.fail(0, "usage: involution_col label -> terms")
        try:
            j = space.index(m.group(1))
        except KeyError:
            line.fail(m.start(1), "unknown basis vector %r" % m.group(1))
        if j in custom_cols:
            line.fail(m.start(1), "column %r given twice" % m.group(1))
        custom_cols[j] = _parse_terms(line, m.group(2), m.start(2), space)
    if involution == "custom":
        missing = [space.labels[j] for j in range(space.dim) if j not in custom_cols]
        if missing and custom_lines:
            custom_lines[-1].fail(0, "custom involution misses columns %s" % ", ".join(missing))
        elif missing:
            raise ParseError(1, 1, "involution custom needs involution_col lines")
    elif custom_lines:
        custom_lines[0].fail(0, "involution_col requires 'involution custom'")

    entries: dict = {}
    if canonical:
        if gca is None:
            raise ParseError(1, 1, "canonical_m2 needs declared generators")
        entries[(2, rational(0))] = dict(GappedStructure.canonical(space).entry(2, 0))
    for line in ops:
        m = re.match(r"\s*op\s+(\S+)\s+(\S+)\s*:(.*?)->(.*)$", line.text)
        if not m:
            line.fail(0, "usage: op k beta : inputs -> terms")
        try:
            k = int(m.group(1))
        except ValueError:
            line.fail(m.start(1), "arity %r is not an integer" % m.group(1))
        try:
            beta = parse_rational(m.group(2))
        except ValueError:
            line.fail(m.start(2), "energy %r is not a rational" % m.group(2))
        if beta < 0:
            line.fail(m.start(2), "negative energy")
        if trunc is not None and beta > trunc.energy:
            line.fail(m.start(2), "energy %s exceeds E_max = %s" % (
                fmt_rational(beta), fmt_rational(trunc.energy)))
        if trunc is not None and k > trunc.arity:
            line.fail(m.start(1), "arity %d exceeds k_max = %d" % (k, trunc.arity))
        if k == 0 and beta == 0:
            line.fail(m.start(1), "an (0, 0) operation is not allowed")
        ins_text = m.group(3)
        inputs = []
        if ins_text.strip():
            pos = m.start(3)
            for part in ins_text.split(","):
                lab = part.strip()
                col = pos + len(part) - len(part.lstrip())
                pos += len(part) + 1
                try:
                    inputs.append(space.index(lab))
                except KeyError:
                    line.fail(col, "unknown basis vector %r" % lab)
        if len(inputs) != k:
            line.fail(m.start(3), "op declares arity %d but lists %d inputs" % (k, len(inputs)))
        vec = _parse_terms(line, m.group(4), m.start(4), space)
        want = space.deg(sum(space.degrees[i] for i in inputs) + 2 - k)
        for o in vec:
            if space.degrees[o] != want:
                line.fail(m.start(4), "output %s has degree %d, an m_%d needs degree %d"
                          % (space.labels[o], space.degrees[o], k, want))
        slot = entries.setdefault((k, beta), {})
        key = tuple(inputs)
        if key in slot:
            line.fail(m.start(3), "duplicate entry for these inputs")
        if vec:
            slot[key] = vec
    try:
        structure = GappedStructure(space, entries, STRUCTURE)
    except DegreeError as e:
        raise ParseError(1, 1, str(e)) from None
    sign_vals = {lab: v for lab, (v, _, _) in signs.items()}
    model = Model(space, structure, trunc, involution, sign_vals, custom_cols)
    c = model.involution_map()
    if not (c @ c).is_identity():
        raise ParseError(1, 1, "declared involution does not square to the identity")
    return model


def _label_terms(space: Space, vec: dict) -> str:
    if not vec:
        return "0"
    return " + ".join("%s*%s" % (fmt_rational(vec[i]), space.labels[i]) for i in sorted(vec))


def emit(model: Model) -> str:
    sp = model.space
    m = model.structure
    lines = ["grading %d" % sp.modulus]
    gca = sp.gca
    ngca = 0
    if gca is not None:
        ngca = gca.size
        lines.append("generators " + " ".join(
            "%s:%d" % (n, d) for n, d in zip(gca.names, gca.gen_degrees)))
    if sp.dim > ngca:
        lines.append("extra " + " ".join(
            "%s:%d" % (sp.labels[i], sp.degrees[i]) for i in range(ngca, sp.dim)))
    if model.trunc is not None:
        lines.append("truncation energy %s arity %d" % (
            fmt_rational(model.trunc.energy), model.trunc.arity))
    lines.append("involution %s" % model.involution)
    if model.involution == "parity":
        for lab in sp.labels[ngca:]:
            s = model.extra_signs.get(lab, 1)
            lines.append("involution_sign %s %d" % (lab, s))
    elif model.involution == "custom":
        for j in range(sp.dim):
            lines.append("involution_col %s -> %s" % (
                sp.labels[j], _label_terms(sp, model.custom_cols.get(j, {}))))
    entries = {s: dict(mm) for s, mm in m.entries.items()}
    if gca is not None:
        canon = GappedStructure.canonical(sp).entry(2, 0)
        m20 = entries.get((2, rational(0)), {})
        if all(m20.get(key) == v for key, v in canon.items()):
            lines.append("canonical_m2")
            rest = {key: v for key, v in m20.items() if key not in canon}
            if rest:
                entries[(2, rational(0))] = rest
            else:
                entries.pop((2, rational(0)), None)
    for (k, b) in sorted(entries):
        for key in sorted(entries[(k, b)]):
            lines.append("op %d %s : %s -> %s" % (
                k, fmt_rational(b), ", ".join(sp.labels[i] for i in key),
                _label_terms(sp, entries[(k, b)][key])))
    return "\n".join(lines) + "\n"


def model_for(structure: GappedStructure, trunc, involution: LinearMap = None) -> Model:
    """Wrap a structure for emission, describing the involution compactly."""
    sp = structure.source
    if involution is None:
        return Model(sp, structure, trunc)
    ngca = sp.gca.size if sp.gca is not None else 0
    if involution.is_identity():
        return Model(sp, structure, trunc, "identity")
    signs = {}
    diagonal = True
    for j in range(sp.dim):
        col = involution.col(j)
        if list(col) != [j] or col[j] not in (1, -1):
            diagonal = False
            break
        if j >= ngca:
            signs[sp.labels[j]] = int(col[j])
    if diagonal:
        model = Model(sp, structure, trunc, "parity", signs)
        if model.involution_map().cols == involution.cols:
            return model
    return Model(sp, structure, trunc, "custom", {},
                 {j: dict(involution.col(j)) for j in range(sp.dim)})
