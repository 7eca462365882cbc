"""Ribbon tangles as sliced Morse words, and their evaluation.

A word is read bottom to top. Each slice is a row of pieces placed side by
side; a strand is a colour name plus an orientation (up, or down meaning
the strand carries the dual module). Pieces:

    id        one strand passes through      id:k repeats it k times
    x+ / x-   positive / negative crossing of two strands
    tw+ / tw- positive / negative full twist of one strand
    cap_l     (V down, V up) -> nothing      left evaluation
    cap_r     (V up, V down) -> nothing      right evaluation
    cup_l:V   nothing -> (V up, V down)      left coevaluation
    cup_r:V   nothing -> (V down, V up)      right coevaluation

Text format, one item per line (``#`` starts a comment)::

    colour V = verma(0, 1/2; 0)
    colour K = kirby(1/3, 0)
    in V^
    id cup_l:K
    x+ id
    x+ id
    id cap_r

``in`` lists the bottom boundary (``^`` up, ``v`` down) and may be omitted
for words with empty bottom boundary.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Sequence

from .gwdata import GWInput, Weight
from .repcat import (
    Mat,
    WeightModule,
    braiding,
    braiding_inverse,
    coev_left,
    coev_right,
    dual_module,
    ev_left,
    ev_right,
    modified_dim,
    one_dim,
    simple_quotient,
    twist,
    verma,
)
from .scalar import Cyclotomic, to_fraction

__all__ = [
    "Strand",
    "Piece",
    "ColourSpec",
    "RibbonWord",
    "Topology",
    "Component",
    "Evaluation",
    "ParseError",
    "ProfileMismatch",
    "NotScalar",
    "SizeLimit",
    "MAX_DIMENSION",
    "parse_word",
    "format_word",
    "validate_word",
    "evaluate",
    "evaluate_cut",
    "ModuleCache",
]

MAX_DIMENSION = 1 << 20

PIECES = {
    # kind: (strands consumed, strands produced)
    "id": (1, 1),
    "x+": (2, 2),
    "x-": (2, 2),
    "tw+": (1, 1),
    "tw-": (1, 1),
    "cap_l": (2, 0),
    "cap_r": (2, 0),
    "cup_l": (0, 2),
    "cup_r": (0, 2),
}


class ParseError(ValueError):
    def __init__(self, message: str, line: int, col: int):
        self.line = line
        self.col = col
        super().__init__(f"line {line}, column {col}: {message}")


class ProfileMismatch(ValueError):
    def __init__(self, message: str, slice_index: int, position: int):
        self.slice_index = slice_index
        self.position = position
        super().__init__(f"slice {slice_index}, position {position}: {message}")


class NotScalar(ValueError):
    pass


class SizeLimit(ValueError):
    pass


@dataclass(frozen=True)
class Strand:
    colour: str
    up: bool = True

    def __str__(self) -> str:
        return f"{self.colour}{'^' if self.up else 'v'}"


@dataclass(frozen=True)
class Piece:
    kind: str
    colour: str | None = None

    def __post_init__(self):
        if self.kind not in PIECES:
            raise ValueError(f"unknown piece {self.kind!r}")
        if self.kind.startswith("cup") != (self.colour is not None):
            raise ValueError("cups take a colour, other pieces do not")

    def __str__(self) -> str:
        return f"{self.kind}:{self.colour}" if self.colour else self.kind


@dataclass(frozen=True)
class ColourSpec:
    """verma / simple / one_dim take a weight and parity; kirby takes a class."""

    kind: str
    weight: Weight
    parity: int = 0

    def __str__(self) -> str:
        w = ", ".join(str(x) for x in self.weight)
        if self.kind == "kirby":
            return f"kirby({w})"
        return f"{self.kind}({w}; {self.parity})"


@dataclass(frozen=True)
class RibbonWord:
    inputs: tuple[Strand, ...]
    slices: tuple[tuple[Piece, ...], ...]
    colours: tuple[tuple[str, ColourSpec], ...] = ()

    @property
    def colour_table(self) -> dict[str, ColourSpec]:
        return dict(self.colours)

    def then(self, *slices: Sequence[Piece]) -> "RibbonWord":
        return RibbonWord(self.inputs, self.slices + tuple(tuple(s) for s in slices), self.colours)


def word(inputs: Sequence[str], lines: Sequence[str], colours: Mapping[str, ColourSpec] | None = None) -> RibbonWord:
    """Build a word from strand tokens like ``V^`` and slice lines like ``"id x+"``."""
    ins = tuple(_parse_strand(t, 0, 0) for t in inputs)
    slices = tuple(_parse_slice(line, 0) for line in lines)
    return RibbonWord(ins, slices, tuple((colours or {}).items()))


__all__.append("word")


# ------------------------------------------------------------------ parsing


_COLOUR_RE = re.compile(r"colour\s+(\w+)\s*=\s*(verma|simple|one_dim|kirby)\s*\((.*)\)\s*$")


def _parse_strand(tok: str, line: int, col: int) -> Strand:
    if len(tok) < 2 or tok[-1] not in "^v":
        raise ParseError(f"bad strand {tok!r} (expected NAME^ or NAMEv)", line, col)
    return Strand(tok[:-1], tok[-1] == "^")


def _parse_slice(text: str, line: int) -> tuple[Piece, ...]:
    pieces: list[Piece] = []
    for m in re.finditer(r"\S+", text):
        tok, col = m.group(0), m.start() + 1
        kind, _, arg = tok.partition(":")
        if kind not in PIECES:
            raise ParseError(f"unknown piece {kind!r}", line, col)
        if kind == "id" and arg:
            if not arg.isdigit() or int(arg) < 1:
                raise ParseError(f"bad repeat count {arg!r}", line, col)
            pieces.extend([Piece("id")] * int(arg))
        elif kind.startswith("cup"):
            if not arg:
                raise ParseError(f"{kind} needs a colour, e.g. {kind}:V", line, col)
            pieces.append(Piece(kind, arg))
        else:
            if arg:
                raise ParseError(f"{kind} takes no argument", line, col)
            pieces.append(Piece(kind))
    return tuple(pieces)


def _parse_rational(text: str, line: int, col: int) -> Fraction:
    try:
        return to_fraction(text)
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"bad rational {text.strip()!r}", line, col) from None


def parse_word(text: str) -> RibbonWord:
    colours: dict[str, ColourSpec] = {}
    inputs: tuple[Strand, ...] = ()
    slices: list[tuple[Piece, ...]] = []
    for ln, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].rstrip()
        if not body.strip():
            continue
        start = len(body) - len(body.lstrip()) + 1
        stripped = body.strip()
        if stripped.startswith("colour"):
            m = _COLOUR_RE.match(stripped)
            if not m:
                raise ParseError("expected 'colour NAME = kind(weights; parity)'", ln, start)
            name, kind, args = m.groups()
            argcol = start + m.start(3)
            wpart, _, ppart = args.partition(";")
            ws = []
            offset = argcol
            for piece in wpart.split(","):
                if not piece.strip():
                    raise ParseError("empty weight entry", ln, offset)
                ws.append(_parse_rational(piece, ln, offset))
                offset += len(piece) + 1
            parity = 0
            if ppart.strip():
                if kind == "kirby" or ppart.strip() not in ("0", "1"):
                    raise ParseError(f"bad parity {ppart.strip()!r}", ln, argcol + len(wpart) + 1)
                parity = int(ppart)
            if name in colours:
                raise ParseError(f"colour {name!r} defined twice", ln, start)
            colours[name] = ColourSpec(kind, tuple(ws), parity)
        elif stripped == "in" or stripped.startswith("in "):
            if slices:
                raise ParseError("'in' must come before the slices", ln, start)
            toks = list(re.finditer(r"\S+", body))[1:]
            inputs = tuple(_parse_strand(m.group(0), ln, m.start() + 1) for m in toks)
        else:
            slices.append(_parse_slice(body, ln))
    for s in inputs:
        if s.colour not in colours:
            raise ParseError(f"undefined colour {s.colour!r}", 0, 0)
    for sl in slices:
        for p in sl:
            if p.colour and p.colour not in colours:
                raise ParseError(f"undefined colour {p.colour!r}", 0, 0)
    return RibbonWord(inputs, tuple(slices), tuple(colours.items()))


def format_word(w: RibbonWord) -> str:
    lines = [f"colour {name} = {spec}" for name, spec in w.colours]
    if w.inputs:
        lines.append("in " + " ".join(str(s) for s in w.inputs))
    lines.extend(" ".join(str(p) for p in sl) for sl in w.slices)
    return "\n".join(lines) + "\n"


# ------------------------------------------------------------------ topology


@dataclass(frozen=True)
class Component:
    colour: str
    closed: bool
    framing: int


@dataclass(frozen=True)
class Topology:
    profiles: tuple[tuple[Strand, ...], ...]
    components: tuple[Component, ...]
    linking: tuple[tuple[int | Fraction, ...], ...]  # half-integers only between open strands
    input_components: tuple[int, ...]
    output_components: tuple[int, ...]

    @property
    def outputs(self) -> tuple[Strand, ...]:
        return self.profiles[-1]


class _UnionFind:
    def __init__(self):
        self.parent: list[int] = []

    def new(self) -> int:
        self.parent.append(len(self.parent))
        return len(self.parent) - 1

    def find(self, a: int) -> int:
        while self.parent[a] != a:
            self.parent[a] = self.parent[self.parent[a]]
            a = self.parent[a]
        return a

    def union(self, a: int, b: int) -> None:
        a, b = self.find(a), self.find(b)
        if a != b:
            self.parent[max(a, b)] = min(a, b)


def validate_word(w: RibbonWord) -> Topology:
    """Check boundary profiles slice by slice and trace the components."""
    uf = _UnionFind()
    profile = list(w.inputs)
    segs = [uf.new() for _ in profile]
    input_segs = list(segs)
    profiles = [tuple(profile)]
    crossings: list[tuple[int, int, int]] = []
    twists: list[tuple[int, int]] = []
    table = w.colour_table
    for si, sl in enumerate(w.slices, start=1):
        need = sum(PIECES[p.kind][0] for p in sl)
        if need != len(profile):
            raise ProfileMismatch(f"slice consumes {need} strands but {len(profile)} are present", si, 0)
        new_prof: list[Strand] = []
        new_segs: list[int] = []
        pos = 0
        for p in sl:
            k_in = PIECES[p.kind][0]
            ins, iseg = profile[pos:pos + k_in], segs[pos:pos + k_in]
            if p.kind in ("id", "tw+", "tw-"):
                new_prof += ins
                new_segs += iseg
                if p.kind != "id":
                    twists.append((iseg[0], 1 if p.kind == "tw+" else -1))
            elif p.kind in ("x+", "x-"):
                new_prof += [ins[1], ins[0]]
                new_segs += [iseg[1], iseg[0]]
                orient = (1 if ins[0].up else -1) * (1 if ins[1].up else -1)
                crossings.append((iseg[0], iseg[1], orient * (1 if p.kind == "x+" else -1)))
            elif p.kind.startswith("cap"):
                a, b = ins
                if a.colour != b.colour:
                    raise ProfileMismatch(f"{p.kind} joins colours {a.colour} and {b.colour}", si, pos)
                want = (False, True) if p.kind == "cap_l" else (True, False)
                if (a.up, b.up) != want:
                    raise ProfileMismatch(f"{p.kind} needs orientations {want}", si, pos)
                uf.union(iseg[0], iseg[1])
            else:
                if p.colour not in table:
                    raise ProfileMismatch(f"undefined colour {p.colour!r}", si, pos)
                ups = (True, False) if p.kind == "cup_l" else (False, True)
                s1, s2 = uf.new(), uf.new()
                uf.union(s1, s2)
                new_prof += [Strand(p.colour, ups[0]), Strand(p.colour, ups[1])]
                new_segs += [s1, s2]
            pos += k_in
        profile, segs = new_prof, new_segs
        profiles.append(tuple(profile))
    for s in list(w.inputs) + profile:
        if s.colour not in table:
            raise ProfileMismatch(f"undefined colour {s.colour!r}", 0, 0)
    # components, numbered by first appearance
    roots: dict[int, int] = {}
    colour_of: dict[int, str] = {}

    def comp(seg: int) -> int:
        r = uf.find(seg)
        if r not in roots:
            roots[r] = len(roots)
        return roots[r]

    for s, strand in zip(input_segs, w.inputs):
        colour_of[comp(s)] = strand.colour
    all_segs = range(len(uf.parent))
    for s in all_segs:
        comp(s)
    # colours: recover from profiles by replaying is unnecessary, every segment
    # was created with a colour; record them during a second pass
    seg_colour = _segment_colours(w, uf)
    for s, c in seg_colour.items():
        colour_of.setdefault(comp(s), c)
    open_comps = {comp(s) for s in input_segs} | {comp(s) for s in segs}
    ncomp = len(roots)
    link = [[0] * ncomp for _ in range(ncomp)]
    frame = [0] * ncomp
    for a, b, sign in crossings:
        ca, cb = comp(a), comp(b)
        if ca == cb:
            frame[ca] += sign
        else:
            link[ca][cb] += sign
            link[cb][ca] += sign
    for s, t in twists:
        frame[comp(s)] += t
    for i in range(ncomp):
        for j in range(ncomp):
            if i != j:
                if link[i][j] % 2 == 0:
                    link[i][j] //= 2
                elif i in open_comps and j in open_comps:
                    # two open strands may cross an odd number of times
                    link[i][j] = Fraction(link[i][j], 2)
                else:
                    raise ProfileMismatch("odd crossing count between components", 0, 0)
        link[i][i] = frame[i]
    components = tuple(Component(colour_of[i], i not in open_comps, frame[i]) for i in range(ncomp))
    return Topology(tuple(profiles), components, tuple(map(tuple, link)),
                    tuple(comp(s) for s in input_segs), tuple(comp(s) for s in segs))


def _segment_colours(w: RibbonWord, uf: _UnionFind) -> dict[int, str]:
    # segments are created in the same order as in validate_word
    out: dict[int, str] = {}
    n = 0
    for s in w.inputs:
        out[n] = s.colour
        n += 1
    for sl in w.slices:
        for p in sl:
            if p.kind.startswith("cup"):
                out[n] = out[n + 1] = p.colour
                n += 2
    return out


# ------------------------------------------------------------------ evaluation


Resolver = Callable[[str], WeightModule]


class ModuleCache:
    """Caches local matrices of pieces by module identity across evaluations."""

    def __init__(self):
        self.duals: dict[int, WeightModule] = {}
        self.local: dict[tuple, dict] = {}
        self._keep: list = []

    def dual(self, V: WeightModule) -> WeightModule:
        key = id(V)
        if key not in self.duals:
            self.duals[key] = dual_module(V)
            self._keep.append(V)
        return self.duals[key]

    def piece(self, kind: str, mods: tuple[WeightModule, ...], builder) -> dict:
        key = (kind,) + tuple(id(m) for m in mods)
        if key not in self.local:
            self.local[key] = builder()
            self._keep.extend(mods)
        return self.local[key]


def _local(mat: Mat, in_dims: tuple[int, ...], out_dims: tuple[int, ...]) -> dict:
    def unflatten(x: int, dims: tuple[int, ...]) -> tuple[int, ...]:
        out = []
        for d in reversed(dims):
            x, r = divmod(x, d)
            out.append(r)
        return tuple(reversed(out))

    table: dict[tuple, list] = {}
    for (i, j), v in mat.data.items():
        table.setdefault(unflatten(j, in_dims), []).append((unflatten(i, out_dims), v))
    return table


@dataclass
class Evaluation:
    matrix: Mat
    inputs: tuple[Strand, ...]
    outputs: tuple[Strand, ...]


def _strand_module(s: Strand, resolve: Resolver, cache: ModuleCache) -> WeightModule:
    V = resolve(s.colour)
    return V if s.up else cache.dual(V)


def evaluate(w: RibbonWord, resolve: Resolver, cache: ModuleCache | None = None,
             columns: Sequence[int] | None = None) -> Evaluation:
    """The matrix of the tangle, from the bottom boundary to the top one.

    ``resolve`` maps a colour name to its module. ``columns`` restricts the
    evaluation to some input basis vectors (the rest of the matrix is left zero).
    """
    topo = validate_word(w)
    cache = cache or ModuleCache()
    mods = {}

    def mod(s: Strand) -> WeightModule:
        if s not in mods:
            mods[s] = _strand_module(s, resolve, cache)
        return mods[s]

    for prof in topo.profiles:
        size = 1
        for s in prof:
            size *= mod(s).dim
        if size > MAX_DIMENSION:
            raise SizeLimit(f"tensor dimension {size} exceeds {MAX_DIMENSION}")

    in_dims = tuple(mod(s).dim for s in w.inputs)
    total_in = 1
    for d in in_dims:
        total_in *= d
    cols = range(total_in) if columns is None else columns
    state: dict[tuple, Cyclotomic] = {}
    for c in cols:
        idx = []
        x = c
        for d in reversed(in_dims):
            x, r = divmod(x, d)
            idx.append(r)
        state[(c,) + tuple(reversed(idx))] = Cyclotomic.one()

    for si, sl in enumerate(w.slices):
        prof = topo.profiles[si]
        ops = []
        pos = 0
        for p in sl:
            k_in = PIECES[p.kind][0]
            ins = prof[pos:pos + k_in]
            ops.append((k_in, _piece_table(p, tuple(mod(s) for s in ins), resolve, cache, mod)))
            pos += k_in
        new: dict[tuple, Cyclotomic] = {}
        for key, coeff in state.items():
            partial = [((key[0],), coeff)]
            pos = 1
            for k_in, table in ops:
                chunk = key[pos:pos + k_in]
                pos += k_in
                if table is None:
                    partial = [(pre + chunk, c) for pre, c in partial]
                    continue
                outs = table.get(chunk)
                if not outs:
                    partial = []
                    break
                partial = [(pre + o, c * v) for pre, c in partial for o, v in outs]
            for k, c in partial:
                old = new.get(k)
                new[k] = c if old is None else old + c
        state = {k: v for k, v in new.items() if not v.is_zero()}

    out_prof = topo.profiles[-1]
    out_dims = tuple(mod(s).dim for s in out_prof)
    data = {}
    for key, v in state.items():
        row = 0
        for d, i in zip(out_dims, key[1:]):
            row = row * d + i
        data[(row, key[0])] = v
    total_out = 1
    for d in out_dims:
        total_out *= d
    return Evaluation(Mat(total_out, total_in, data), tuple(w.inputs), out_prof)


def _piece_table(p: Piece, ins: tuple[WeightModule, ...], resolve: Resolver, cache: ModuleCache, mod) -> dict | None:
    kind = p.kind
    if kind == "id":
        return None
    if kind in ("x+", "x-"):
        A, B = ins
        if kind == "x+":
            return cache.piece(kind, ins, lambda: _local(braiding(A, B).matrix, (A.dim, B.dim), (B.dim, A.dim)))
        return cache.piece(kind, ins, lambda: _local(braiding_inverse(B, A).matrix, (A.dim, B.dim), (B.dim, A.dim)))
    if kind in ("tw+", "tw-"):
        (A,) = ins

        def build():
            t = twist(A).matrix
            if kind == "tw-":
                t = t.inverse()
            return _local(t, (A.dim,), (A.dim,))
        return cache.piece(kind, ins, build)
    if kind == "cap_l":
        V = ins[1]
        return cache.piece(kind, (V,), lambda: _local(ev_left(V).matrix, (V.dim, V.dim), ()))
    if kind == "cap_r":
        V = ins[0]
        return cache.piece(kind, (V,), lambda: _local(ev_right(V).matrix, (V.dim, V.dim), ()))
    V = resolve(p.colour)
    if kind == "cup_l":
        return cache.piece(kind, (V,), lambda: _local(coev_left(V).matrix, (), (V.dim, V.dim)))
    return cache.piece(kind, (V,), lambda: _local(coev_right(V).matrix, (), (V.dim, V.dim)))


def evaluate_cut(w: RibbonWord, resolve: Resolver, cache: ModuleCache | None = None) -> Cyclotomic:
    """Modified trace of a (1,1)-tangle whose open strand is a typical Verma module."""
    if len(w.inputs) != 1 or not w.inputs[0].up:
        raise ValueError("a cut presentation has exactly one upward input strand")
    topo = validate_word(w)
    if topo.outputs != w.inputs:
        raise ValueError("the output strand must match the input strand")
    V = resolve(w.inputs[0].colour)
    if not V.is_typical_verma():
        raise ValueError("the cut strand must be coloured by a typical Verma module")
    ev = evaluate(w, resolve, cache)
    c = ev.matrix.scalar()
    if c is None:
        raise NotScalar("the (1,1)-evaluation is not a multiple of the identity")
    return c * modified_dim(V.data, V.label[1], V.label[2])


def module_resolver(data: GWInput, colours: Mapping[str, ColourSpec],
                    overrides: Mapping[str, WeightModule] | None = None) -> Resolver:
    """Resolve colour names into modules; ``kirby`` colours must be overridden."""
    made: dict[str, WeightModule] = {}

    def resolve(name: str) -> WeightModule:
        if overrides and name in overrides:
            return overrides[name]
        if name not in made:
            spec = colours[name]
            if spec.kind == "verma":
                made[name] = verma(data, spec.weight, spec.parity)
            elif spec.kind == "simple":
                made[name] = simple_quotient(data, spec.weight, spec.parity)
            elif spec.kind == "one_dim":
                made[name] = one_dim(data, spec.weight, spec.parity)
            else:
                raise ValueError(f"colour {name!r} is a Kirby colour and needs an expansion")
        return made[name]

    return resolve


__all__.append("module_resolver")
