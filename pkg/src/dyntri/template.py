"""Dynamic templates [P, C, E], their text format, validation and unrolling.

A template is written on a *2-chunk canvas*: frames
``0 .. T(P) + 2*T(C) + T(E) - 1`` laid out as prologue, chunk copy 1,
chunk copy 2 and epilogue.  Variables are declared for the prologue, the
first chunk copy and the epilogue; the second chunk copy is implied.  Edges
with one end in each chunk copy are the inter-chunk edges.

Text format::

    FRAMES P=<int> C=<int> E=<int>
    VAR <name> frame=<int> card=<int> [hint=<int>]
    EDGE <name>:<frame> -> <name>:<frame>
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .graph import DGraph, NodeInfo, UGraph, moralize


class TemplateError(ValueError):
    pass


class TemplateSyntaxError(TemplateError):
    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


Ref = tuple[str, int]


@dataclass(frozen=True)
class Variable:
    name: str
    frame: int
    card: int
    hint: int | None = None


@dataclass(frozen=True)
class Template:
    p_frames: int
    c_frames: int
    e_frames: int
    variables: tuple[Variable, ...]
    edges: tuple[tuple[Ref, Ref], ...]

    # --- canvas geometry -------------------------------------------------
    @property
    def canvas_frames(self) -> int:
        return self.p_frames + 2 * self.c_frames + self.e_frames

    def region(self, frame: int) -> str:
        """One of 'P', 'C1', 'C2', 'E' (or '?' when off the canvas)."""
        tp, tc = self.p_frames, self.c_frames
        if 0 <= frame < tp:
            return "P"
        if tp <= frame < tp + tc:
            return "C1"
        if tp + tc <= frame < tp + 2 * tc:
            return "C2"
        if tp + 2 * tc <= frame < self.canvas_frames:
            return "E"
        return "?"

    def var_index(self) -> dict[Ref, int]:
        return {(v.name, v.frame): i for i, v in enumerate(self.variables)}

    def part_of(self, i: int) -> str:
        return {"P": "P", "C1": "C", "E": "E"}.get(self.region(self.variables[i].frame), "?")

    def resolve(self, ref: Ref) -> tuple[str, int, int]:
        """Map a canvas reference to ``(part, copy_offset, var_index)``.

        Chunk-copy-2 references resolve to the chunk variable with offset 1.
        """
        name, frame = ref
        region = self.region(frame)
        index = self.var_index()
        if region == "C2":
            i = index.get((name, frame - self.c_frames))
            offset = 1
        else:
            i = index.get((name, frame))
            offset = 0
        if i is None or region == "?":
            raise TemplateError(f"unknown variable reference {name}:{frame}")
        part = "C" if region in ("C1", "C2") else region
        return part, offset, i

    def vars_in(self, part: str) -> list[int]:
        return [i for i in range(len(self.variables)) if self.part_of(i) == part]

    def mirrored(self) -> "Template":
        """Time-reversed template: prologue and epilogue swap roles.

        Unrolling the mirror gives the time reversal (frame ``f`` becomes
        ``T - 1 - f``) of the original unrolled graph.
        """
        last = self.canvas_frames - 1
        tc = self.c_frames
        new_vars = []
        for v in self.variables:
            frame = v.frame + tc if self.region(v.frame) == "C1" else v.frame
            new_vars.append((last - frame, Variable(v.name, last - frame, v.card, v.hint)))
        new_vars.sort(key=lambda fv: fv[0])
        edges = tuple(((a, last - fa), (b, last - fb)) for (a, fa), (b, fb) in self.edges)
        return Template(self.e_frames, tc, self.p_frames, tuple(v for _, v in new_vars), edges)


# --- text format -------------------------------------------------------------

_FRAMES = re.compile(r"FRAMES\s+P=(\d+)\s+C=(\d+)\s+E=(\d+)\s*$")
_VAR = re.compile(r"VAR\s+(\w+)\s+frame=(\d+)\s+card=(\d+)(?:\s+hint=(-?\d+))?\s*$")
_EDGE = re.compile(r"EDGE\s+(\w+):(\d+)\s*->\s*(\w+):(\d+)\s*$")


def parse_template(text: str, check: bool = True) -> Template:
    """Parse the template text format.

    With ``check`` (the default) structural problems found by
    :func:`validate` are raised as :class:`TemplateError`.
    """
    frames = None
    variables: list[Variable] = []
    edges: list[tuple[Ref, Ref]] = []
    edge_lines: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        col = len(raw) - len(raw.lstrip()) + 1
        keyword = line.split()[0]
        if keyword == "FRAMES":
            m = _FRAMES.match(line)
            if not m:
                raise TemplateSyntaxError("malformed FRAMES line", lineno, col)
            if frames is not None:
                raise TemplateSyntaxError("duplicate FRAMES line", lineno, col)
            frames = tuple(int(x) for x in m.groups())
        elif keyword == "VAR":
            m = _VAR.match(line)
            if not m:
                raise TemplateSyntaxError("malformed VAR line", lineno, col)
            name, frame, card, hint = m.groups()
            variables.append(Variable(name, int(frame), int(card),
                                      None if hint is None else int(hint)))
        elif keyword == "EDGE":
            m = _EDGE.match(line)
            if not m:
                raise TemplateSyntaxError("malformed EDGE line", lineno, col)
            a, fa, b, fb = m.groups()
            edges.append(((a, int(fa)), (b, int(fb))))
            edge_lines.append(lineno)
        else:
            raise TemplateSyntaxError(f"unknown keyword {keyword!r}", lineno, col)
    if frames is None:
        raise TemplateSyntaxError("missing FRAMES line", 1)
    t = Template(*frames, tuple(variables), tuple(edges))
    for (src, dst), lineno in zip(edges, edge_lines):
        for ref in (src, dst):
            try:
                t.resolve(ref)
            except TemplateError:
                raise TemplateSyntaxError(f"unknown variable {ref[0]}:{ref[1]}", lineno) from None
    if check:
        problems = validate(t)
        if problems:
            raise TemplateError("; ".join(problems))
    return t


def format_template(t: Template) -> str:
    lines = [f"FRAMES P={t.p_frames} C={t.c_frames} E={t.e_frames}"]
    for v in t.variables:
        hint = "" if v.hint is None else f" hint={v.hint}"
        lines.append(f"VAR {v.name} frame={v.frame} card={v.card}{hint}")
    for (a, fa), (b, fb) in t.edges:
        lines.append(f"EDGE {a}:{fa} -> {b}:{fb}")
    return "\n".join(lines) + "\n"


def load_template(path) -> Template:
    return parse_template(Path(path).read_text(encoding="utf-8"))


FIXTURES = ("chain", "ladder", "hourglass", "backchain", "xy", "multichunk")


def fixture(name: str) -> Template:
    """Load one of the template fixtures shipped with the package."""
    text = resources.files("dyntri.fixtures").joinpath(f"{name}.tmpl").read_text(encoding="utf-8")
    return parse_template(text)


# --- unrolling ---------------------------------------------------------------

Key = tuple[str, int, int]  # (part, chunk copy, variable index)


@dataclass
class UnrolledGraph:
    template: Template
    k: int
    graph: DGraph
    key_of: dict[int, Key]
    id_of: dict[Key, int]
    _moral: UGraph | None = field(default=None, repr=False)

    @property
    def slices(self) -> int:
        t = self.template
        return t.p_frames + self.k * t.c_frames + t.e_frames

    def frame_of(self, v: int) -> int:
        return self.graph.info[v].frame

    def partition_of(self, v: int) -> str:
        return self.key_of[v][0]

    def moral(self) -> UGraph:
        if self._moral is None:
            self._moral = moralize(self.graph)
        return self._moral

    def unit(self, v: int) -> int:
        """Position along the unrolled sequence: P=0, chunk copies 1..k, E=k+1."""
        part, copy, _ = self.key_of[v]
        return {"P": 0, "E": self.k + 1}.get(part, copy + 1)

    def chunk(self, copy: int) -> set[int]:
        return {v for v, (part, c, _) in self.key_of.items() if part == "C" and c == copy}

    def part_nodes(self, part: str) -> set[int]:
        return {v for v, key in self.key_of.items() if key[0] == part}


def node_frame(t: Template, key: Key, k: int) -> int:
    part, copy, i = key
    f = t.variables[i].frame
    if part == "C":
        return f + copy * t.c_frames
    if part == "E":
        return f + (k - 2) * t.c_frames
    return f


def unroll(t: Template, k: int) -> UnrolledGraph:
    """Unroll ``t`` to ``k`` chunk copies (``k = 1`` is the basic template)."""
    if k < 1:
        raise TemplateError("unroll count k must be >= 1")
    keys: list[Key] = [("P", 0, i) for i in t.vars_in("P")]
    chunk_vars = t.vars_in("C")
    keys += [("C", c, i) for c in range(k) for i in chunk_vars]
    keys += [("E", 0, i) for i in t.vars_in("E")]
    keys.sort(key=lambda key: (node_frame(t, key, k), key[2]))
    id_of = {key: n for n, key in enumerate(keys)}
    info = {}
    for key, n in id_of.items():
        var = t.variables[key[2]]
        info[n] = NodeInfo(var.name, node_frame(t, key, k), var.card,
                           0 if var.hint is None else var.hint, key[2])

    edges = set()
    for src, dst in t.edges:
        (pa, oa, ia), (pb, ob, ib) = t.resolve(src), t.resolve(dst)
        if pa == "C" and pb == "C":
            shift = min(oa, ob)
            oa, ob = oa - shift, ob - shift
            for c in range(k - max(oa, ob)):
                edges.add((id_of["C", c + oa, ia], id_of["C", c + ob, ib]))
            continue
        parts = {pa, pb}
        ends = []
        for part, i in ((pa, ia), (pb, ib)):
            if part == "C":
                # chunk endpoints attach to the copy next to P or E
                ends.append(id_of["C", 0 if "P" in parts else k - 1, i])
            else:
                ends.append(id_of[part, 0, i])
        edges.add(tuple(ends))
    return UnrolledGraph(t, k, DGraph(info, sorted(edges)), {n: key for key, n in id_of.items()}, id_of)


# --- validation --------------------------------------------------------------

def _edge_problems(t: Template) -> list[str]:
    problems = []
    allowed = {("P", "P"), ("E", "E"), ("P", "C0"), ("C0", "C0"), ("C0", "C1"),
               ("C1", "C1"), ("C1", "E")}
    for src, dst in t.edges:
        if src == dst:
            problems.append(f"self-loop on {src[0]}:{src[1]}")
            continue
        try:
            ends = [t.resolve(src), t.resolve(dst)]
        except TemplateError as exc:
            problems.append(str(exc))
            continue
        tags = [p if p != "C" else f"C{o}" for p, o, _ in ends]
        pair = tuple(sorted(tags, key=["P", "C0", "C1", "E"].index))
        if pair not in allowed:
            problems.append(f"edge {src[0]}:{src[1]} -> {dst[0]}:{dst[1]} joins non-adjacent "
                            f"partitions ({tags[0]}, {tags[1]})")
    return problems


def validate(t: Template) -> list[str]:
    """Return diagnostics; an empty list means the template is well formed.

    Besides the structural rules, every moral edge of the unrolled graph must
    join adjacent partitions (P, chunk copies, E); otherwise no interface
    inside a chunk can separate past from future.
    """
    problems = []
    if t.c_frames < 1:
        problems.append("the chunk must span at least one frame")
    if t.p_frames < 0 or t.e_frames < 0:
        problems.append("frame counts must be non-negative")
    if t.p_frames == 0 and t.e_frames == 0:
        problems.append("either P or E (but not both) may be empty")
    seen = set()
    for v in t.variables:
        region = t.region(v.frame)
        if region == "?":
            problems.append(f"variable {v.name}:{v.frame} lies outside the canvas")
        elif region == "C2":
            problems.append(f"variable {v.name}:{v.frame} declared in the implied second chunk copy")
        if (v.name, v.frame) in seen:
            problems.append(f"variable {v.name}:{v.frame} declared twice")
        seen.add((v.name, v.frame))
        if v.card < 2:
            problems.append(f"variable {v.name}:{v.frame} has cardinality {v.card} < 2")
    if not t.vars_in("C") and t.c_frames >= 1:
        problems.append("the chunk declares no variables")
    if problems:
        return problems
    problems = _edge_problems(t)
    if problems:
        return problems
    n_chunk = len(t.vars_in("C"))
    for k in range(1, max(3, n_chunk + 1) + 1):
        u = unroll(t, k)
        cycle = u.graph.find_cycle()
        if cycle:
            path = " -> ".join(u.graph.info[v].label for v in cycle)
            return [f"directed cycle at k={k}: {path}"]
    for k in (1, 2, 3):
        u = unroll(t, k)
        for a, b in u.moral().edges():
            if abs(u.unit(a) - u.unit(b)) > 1:
                la, lb = u.graph.info[a].label, u.graph.info[b].label
                problems.append(f"moralization joins non-adjacent partitions at k={k}: {la} -- {lb}")
        if problems:
            break
    return problems
