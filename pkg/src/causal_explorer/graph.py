"""Mixed causal graphs: storage, d-separation, Markov equivalence and I/O.

A :class:`MixedGraph` holds named nodes and at most one edge per unordered
pair.  Every edge carries an endpoint mark at each end (tail, arrow or
circle), which covers directed (``a -> b``), undirected (``a -- b``) and
bidirected (``a <-> b``) edges.  A DAG is simply a mixed graph whose edges are
all tail-to-arrow and which has no directed cycle.

Internally the algorithms work on an ``int8`` mark matrix ``m`` where
``m[i, j]`` is the mark at node ``j`` on the edge between ``i`` and ``j`` and
``0`` means the pair is not adjacent.
"""

from __future__ import annotations

import enum
import re
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import InputError, ParseError

__all__ = [
    "Mark",
    "Edge",
    "MixedGraph",
    "is_acyclic",
    "is_dag",
    "topological_order",
    "d_separated",
    "v_structures",
    "cpdag_of",
    "meek_closure",
    "skeleton_of",
    "pad_to_nodes",
    "to_dot",
    "from_dot",
    "to_edge_list",
    "from_edge_list",
]


class Mark(enum.IntEnum):
    TAIL = 1
    ARROW = 2
    CIRCLE = 3


NONE = 0
TAIL = int(Mark.TAIL)
ARROW = int(Mark.ARROW)
CIRCLE = int(Mark.CIRCLE)


@dataclass(frozen=True)
class Edge:
    """An edge between ``a`` and ``b`` with the mark found at each end."""

    a: str
    b: str
    mark_a: Mark
    mark_b: Mark

    @property
    def kind(self) -> str:
        marks = (self.mark_a, self.mark_b)
        if marks == (Mark.TAIL, Mark.ARROW) or marks == (Mark.ARROW, Mark.TAIL):
            return "dir"
        if marks == (Mark.TAIL, Mark.TAIL):
            return "undir"
        if marks == (Mark.ARROW, Mark.ARROW):
            return "bidir"
        return "partial"

    def oriented(self) -> tuple[str, str]:
        """Return ``(src, dst)`` of a directed edge."""
        if self.mark_a == Mark.TAIL and self.mark_b == Mark.ARROW:
            return self.a, self.b
        if self.mark_a == Mark.ARROW and self.mark_b == Mark.TAIL:
            return self.b, self.a
        raise ValueError(f"edge {self.a}-{self.b} is not directed")


class MixedGraph:
    """Immutable graph over named nodes with endpoint-marked edges.

    Parameters
    ----------
    nodes : sequence of str
        Node names; their position is the node index.
    edges : iterable
        :class:`Edge` objects or ``(a, b, mark_at_a, mark_at_b)`` tuples.

    Equality compares node sets and edges by name, so two graphs that list
    their nodes in a different order but have the same structure are equal.
    """

    def __init__(self, nodes: Sequence[str], edges: Iterable = ()):
        nodes = tuple(nodes)
        index: dict[str, int] = {}
        for i, name in enumerate(nodes):
            if not isinstance(name, str) or not name:
                raise InputError(f"node names must be non-empty strings, got {name!r}")
            if name in index:
                raise InputError(f"duplicate node name {name!r}")
            index[name] = i
        store: dict[tuple[str, str], tuple[Mark, Mark]] = {}
        for e in edges:
            if not isinstance(e, Edge):
                e = Edge(e[0], e[1], Mark(e[2]), Mark(e[3]))
            if e.a not in index or e.b not in index:
                raise InputError(f"edge {e.a!r}-{e.b!r} references an unknown node")
            if e.a == e.b:
                raise InputError(f"self-loop on {e.a!r}")
            a, b, ma, mb = e.a, e.b, Mark(e.mark_a), Mark(e.mark_b)
            if index[a] > index[b]:
                a, b, ma, mb = b, a, mb, ma
            if (a, b) in store:
                raise InputError(f"more than one edge between {a!r} and {b!r}")
            store[(a, b)] = (ma, mb)
        self._nodes = nodes
        self._index = index
        self._edges = store

    # construction helpers -------------------------------------------------

    @classmethod
    def from_arcs(
        cls,
        nodes: Sequence[str],
        directed: Iterable[tuple[str, str]] = (),
        undirected: Iterable[tuple[str, str]] = (),
        bidirected: Iterable[tuple[str, str]] = (),
    ) -> "MixedGraph":
        edges = [(s, t, Mark.TAIL, Mark.ARROW) for s, t in directed]
        edges += [(s, t, Mark.TAIL, Mark.TAIL) for s, t in undirected]
        edges += [(s, t, Mark.ARROW, Mark.ARROW) for s, t in bidirected]
        return cls(nodes, edges)

    @classmethod
    def from_marks(cls, nodes: Sequence[str], m: np.ndarray) -> "MixedGraph":
        nodes = tuple(nodes)
        edges = []
        for i, j in zip(*np.nonzero(np.triu(m != 0, 1))):
            edges.append((nodes[i], nodes[j], Mark(int(m[j, i])), Mark(int(m[i, j]))))
        return cls(nodes, edges)

    def to_marks(self, order: Sequence[str] | None = None) -> np.ndarray:
        order = self._nodes if order is None else tuple(order)
        pos = {v: i for i, v in enumerate(order)}
        m = np.zeros((len(order), len(order)), dtype=np.int8)
        for (a, b), (ma, mb) in self._edges.items():
            i, j = pos[a], pos[b]
            m[j, i] = ma
            m[i, j] = mb
        return m

    # queries --------------------------------------------------------------

    @property
    def nodes(self) -> tuple[str, ...]:
        return self._nodes

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise InputError(f"unknown node {name!r}") from None

    def __contains__(self, name: object) -> bool:
        return name in self._index

    @property
    def edges(self) -> tuple[Edge, ...]:
        return tuple(Edge(a, b, ma, mb) for (a, b), (ma, mb) in self._edges.items())

    @property
    def n_edges(self) -> int:
        return len(self._edges)

    def marks(self, a: str, b: str) -> tuple[Mark, Mark] | None:
        """Marks ``(at a, at b)`` for the a-b edge, or None if not adjacent."""
        if self._index.get(a, -1) <= self._index.get(b, -1):
            return self._edges.get((a, b))
        found = self._edges.get((b, a))
        return None if found is None else (found[1], found[0])

    def has_edge(self, a: str, b: str) -> bool:
        return self.marks(a, b) is not None

    def is_directed(self, a: str, b: str) -> bool:
        """True for ``a -> b``."""
        return self.marks(a, b) == (Mark.TAIL, Mark.ARROW)

    @cached_property
    def _parents(self) -> dict[str, frozenset[str]]:
        pa: dict[str, set[str]] = {v: set() for v in self._nodes}
        for (a, b), marks in self._edges.items():
            if marks == (Mark.TAIL, Mark.ARROW):
                pa[b].add(a)
            elif marks == (Mark.ARROW, Mark.TAIL):
                pa[a].add(b)
        return {v: frozenset(s) for v, s in pa.items()}

    @cached_property
    def _children(self) -> dict[str, frozenset[str]]:
        ch: dict[str, set[str]] = {v: set() for v in self._nodes}
        for v, pa in self._parents.items():
            for u in pa:
                ch[u].add(v)
        return {v: frozenset(s) for v, s in ch.items()}

    @cached_property
    def _adjacent(self) -> dict[str, frozenset[str]]:
        adj: dict[str, set[str]] = {v: set() for v in self._nodes}
        for a, b in self._edges:
            adj[a].add(b)
            adj[b].add(a)
        return {v: frozenset(s) for v, s in adj.items()}

    def parents(self, v: str) -> frozenset[str]:
        self.index(v)
        return self._parents[v]

    def children(self, v: str) -> frozenset[str]:
        self.index(v)
        return self._children[v]

    def adjacent(self, v: str) -> frozenset[str]:
        self.index(v)
        return self._adjacent[v]

    def directed_edges(self) -> list[tuple[str, str]]:
        return sorted(e.oriented() for e in self.edges if e.kind == "dir")

    def edges_of_kind(self, kind: str) -> list[tuple[str, str]]:
        out = []
        for e in self.edges:
            if e.kind == kind:
                out.append(e.oriented() if kind == "dir" else tuple(sorted((e.a, e.b))))
        return sorted(out)

    def _name_key(self):
        key = {}
        for (a, b), (ma, mb) in self._edges.items():
            if b < a:
                a, b, ma, mb = b, a, mb, ma
            key[(a, b)] = (int(ma), int(mb))
        return frozenset(self._nodes), frozenset(key.items())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MixedGraph):
            return NotImplemented
        return self._name_key() == other._name_key()

    def __hash__(self) -> int:
        return hash(self._name_key())

    def __repr__(self) -> str:
        parts = []
        for e in self.edges:
            kind = e.kind
            if kind == "dir":
                s, t = e.oriented()
                parts.append(f"{s}->{t}")
            elif kind == "undir":
                parts.append(f"{e.a}--{e.b}")
            elif kind == "bidir":
                parts.append(f"{e.a}<->{e.b}")
            else:
                parts.append(f"{e.a}({e.mark_a.name})-({e.mark_b.name}){e.b}")
        return f"MixedGraph(nodes={list(self._nodes)}, edges=[{', '.join(parts)}])"


# ---------------------------------------------------------------------------
# structure


def _directed_successors(g: MixedGraph) -> dict[str, frozenset[str]]:
    return g._children


def topological_order(g: MixedGraph) -> list[str] | None:
    """Kahn order over the directed edges (ties by name); None if cyclic."""
    children = _directed_successors(g)
    indeg = {v: len(g._parents[v]) for v in g.nodes}
    ready = sorted(v for v, d in indeg.items() if d == 0)
    order: list[str] = []
    while ready:
        v = ready.pop(0)
        order.append(v)
        for c in sorted(children[v]):
            indeg[c] -= 1
            if indeg[c] == 0:
                ready.append(c)
        ready.sort()
    return order if len(order) == len(g.nodes) else None


def is_acyclic(g: MixedGraph) -> bool:
    """True iff the fully directed edges of ``g`` contain no directed cycle."""
    return topological_order(g) is not None


def is_dag(g: MixedGraph) -> bool:
    return all(e.kind == "dir" for e in g.edges) and is_acyclic(g)


def _require_dag(g: MixedGraph) -> None:
    if not is_dag(g):
        raise InputError("graph is not a DAG")


def ancestors(g: MixedGraph, nodes: Iterable[str]) -> set[str]:
    """``nodes`` together with all their directed ancestors."""
    seen = set(nodes)
    stack = list(seen)
    while stack:
        v = stack.pop()
        for u in g._parents[v]:
            if u not in seen:
                seen.add(u)
                stack.append(u)
    return seen


def d_separated(g: MixedGraph, x: str, y: str, z: Iterable[str] = ()) -> bool:
    """Test whether ``z`` d-separates ``x`` and ``y`` in the DAG ``g``.

    Uses the reachable-trail search (a Bayes-ball style traversal over
    ``(node, direction)`` states), linear in the size of the graph.
    """
    z = frozenset(z)
    for v in (x, y, *z):
        g.index(v)
    if x == y:
        raise InputError("x and y must differ")
    if x in z or y in z:
        raise InputError("x and y must not be in the conditioning set")

    anc_z = ancestors(g, z)
    parents, children = g._parents, g._children
    # direction "up": arrived from a child; "down": arrived from a parent
    visited: set[tuple[str, str]] = set()
    queue = deque([(x, "up")])
    while queue:
        v, d = queue.popleft()
        if (v, d) in visited:
            continue
        visited.add((v, d))
        if v == y:
            return False
        if d == "up" and v not in z:
            queue.extend((p, "up") for p in parents[v])
            queue.extend((c, "down") for c in children[v])
        elif d == "down":
            if v not in z:
                queue.extend((c, "down") for c in children[v])
            if v in anc_z:
                queue.extend((p, "up") for p in parents[v])
    return True


def v_structures(g: MixedGraph) -> set[tuple[str, str, str]]:
    """Unshielded colliders ``(a, c, b)`` with ``a < b`` and ``a -> c <- b``."""
    out = set()
    for c in g.nodes:
        for a, b in combinations(sorted(g._parents[c]), 2):
            if not g.has_edge(a, b):
                out.add((a, c, b))
    return out


# ---------------------------------------------------------------------------
# Meek closure on mark matrices


def _directed(m: np.ndarray, x: int, y: int) -> bool:
    return m[x, y] == ARROW and m[y, x] == TAIL


def _undirected(m: np.ndarray, x: int, y: int) -> bool:
    return m[x, y] == TAIL and m[y, x] == TAIL


def _meek_applies(m: np.ndarray, a: int, b: int) -> bool:
    p = m.shape[0]
    adj = m != 0
    # R1: c -> a -- b with c, b non-adjacent
    for c in range(p):
        if c != b and _directed(m, c, a) and not adj[c, b]:
            return True
    # R2: a -> c -> b
    for c in range(p):
        if _directed(m, a, c) and _directed(m, c, b):
            return True
    # R3: a -- c -> b and a -- d -> b with c, d non-adjacent
    cands = [c for c in range(p) if c != b and _undirected(m, a, c) and _directed(m, c, b)]
    for c, d in combinations(cands, 2):
        if not adj[c, d]:
            return True
    # R4: a -- c -> l -> b with c, b non-adjacent and a adjacent to l
    for c in range(p):
        if c == b or not _undirected(m, a, c) or adj[c, b]:
            continue
        for l in range(p):
            if l not in (a, b) and adj[a, l] and _directed(m, c, l) and _directed(m, l, b):
                return True
    return False


def meek_closure(m: np.ndarray) -> np.ndarray:
    """Orient undirected edges by Meek's rules R1-R4 until nothing changes.

    Only tail-tail edges are ever touched, so existing arrowheads (including
    bidirected edges) are preserved.  Nodes are visited in matrix order; the
    fixpoint of the rules does not depend on that order.
    """
    m = np.array(m, dtype=np.int8, copy=True)
    p = m.shape[0]
    changed = True
    while changed:
        changed = False
        for a in range(p):
            for b in range(p):
                if a != b and _undirected(m, a, b) and _meek_applies(m, a, b):
                    m[a, b] = ARROW
                    changed = True
    return m


def cpdag_of(g: MixedGraph) -> MixedGraph:
    """CPDAG of the Markov equivalence class of the DAG ``g``.

    Keeps the skeleton, orients v-structures, then applies Meek closure.
    """
    _require_dag(g)
    order = tuple(sorted(g.nodes))
    pos = {v: i for i, v in enumerate(order)}
    m = skeleton_of(g).to_marks(order)
    for a, c, b in v_structures(g):
        m[pos[a], pos[c]] = ARROW
        m[pos[b], pos[c]] = ARROW
    closed = meek_closure(m)
    out = MixedGraph.from_marks(order, closed)
    return MixedGraph(g.nodes, out.edges)


def skeleton_of(g: MixedGraph) -> MixedGraph:
    return MixedGraph(g.nodes, [(e.a, e.b, Mark.TAIL, Mark.TAIL) for e in g.edges])


def pad_to_nodes(g: MixedGraph, nodes: Sequence[str]) -> MixedGraph:
    """Extend ``g`` with the missing ``nodes`` as isolated vertices.

    The result lists its nodes in the order given by ``nodes``.
    """
    nodes = tuple(nodes)
    if len(set(nodes)) != len(nodes):
        raise InputError("padding node list contains duplicate names")
    missing = set(g.nodes) - set(nodes)
    if missing:
        raise InputError(f"graph nodes {sorted(missing)} absent from padding list")
    if nodes == g.nodes:
        return g
    return MixedGraph(nodes, g.edges)


# ---------------------------------------------------------------------------
# serialization


def _dot_quote(name: str) -> str:
    return '"' + name.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _dot_unquote(token: str) -> str:
    return re.sub(r"\\(.)", r"\1", token[1:-1])


_DOT_ARROWS = {Mark.TAIL: "none", Mark.ARROW: "normal", Mark.CIRCLE: "odot"}


def to_dot(g: MixedGraph, name: str = "G") -> str:
    lines = [f"digraph {name} {{"]
    for v in g.nodes:
        lines.append(f"  {_dot_quote(v)};")
    for e in g.edges:
        kind = e.kind
        if kind == "dir":
            s, t = e.oriented()
            lines.append(f"  {_dot_quote(s)} -> {_dot_quote(t)};")
        elif kind == "undir":
            lines.append(f"  {_dot_quote(e.a)} -> {_dot_quote(e.b)} [dir=none];")
        elif kind == "bidir":
            lines.append(f"  {_dot_quote(e.a)} -> {_dot_quote(e.b)} [dir=both, style=dashed];")
        else:
            lines.append(
                f"  {_dot_quote(e.a)} -> {_dot_quote(e.b)} [dir=both, "
                f"arrowtail={_DOT_ARROWS[e.mark_a]}, arrowhead={_DOT_ARROWS[e.mark_b]}];"
            )
    lines.append("}")
    return "\n".join(lines) + "\n"


_Q = r'"(?:[^"\\]|\\.)*"'
_DOT_NODE = re.compile(rf"^\s*({_Q})\s*;\s*$")
_DOT_EDGE = re.compile(rf"^\s*({_Q})\s*->\s*({_Q})\s*(?:\[([^\]]*)\])?\s*;\s*$")
_DOT_MARKS = {v: k for k, v in _DOT_ARROWS.items()}


def from_dot(text: str, source: str | None = None) -> MixedGraph:
    """Parse the DOT subset written by :func:`to_dot`."""
    nodes: list[str] = []
    seen: set[str] = set()
    edges = []

    def declare(v: str) -> None:
        if v not in seen:
            seen.add(v)
            nodes.append(v)

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("digraph") or line == "}" or line.startswith("//"):
            continue
        if mt := _DOT_NODE.match(line):
            declare(_dot_unquote(mt.group(1)))
            continue
        mt = _DOT_EDGE.match(line)
        if not mt:
            raise ParseError(f"unrecognised DOT line {raw!r}", lineno, source)
        a, b = _dot_unquote(mt.group(1)), _dot_unquote(mt.group(2))
        attrs = dict(
            (k.strip(), v.strip())
            for k, v in (kv.split("=", 1) for kv in (mt.group(3) or "").split(",") if "=" in kv)
        )
        declare(a)
        declare(b)
        direction = attrs.get("dir", "forward")
        if direction == "none":
            marks = (Mark.TAIL, Mark.TAIL)
        elif direction == "forward":
            marks = (Mark.TAIL, Mark.ARROW)
        elif direction == "both" and "arrowhead" in attrs:
            marks = (_DOT_MARKS[attrs.get("arrowtail", "normal")], _DOT_MARKS[attrs["arrowhead"]])
        elif direction == "both":
            marks = (Mark.ARROW, Mark.ARROW)
        else:
            raise ParseError(f"unsupported dir={direction!r}", lineno, source)
        edges.append((a, b, *marks))
    try:
        return MixedGraph(nodes, edges)
    except InputError as exc:
        raise ParseError(str(exc), None, source) from None


_EDGE_TYPES = {
    "dir": (Mark.TAIL, Mark.ARROW),
    "undir": (Mark.TAIL, Mark.TAIL),
    "bidir": (Mark.ARROW, Mark.ARROW),
}


def to_edge_list(g: MixedGraph, header: str | None = None) -> str:
    """Tab-separated edge list: node lines, then one line per edge."""
    lines = []
    if header:
        lines.extend(f"# {h}" for h in header.splitlines())
    lines.extend(f"node\t{v}" for v in g.nodes)
    rows = []
    for e in g.edges:
        kind = e.kind
        if kind == "partial":
            raise InputError(f"edge {e.a}-{e.b} has circle marks; not representable in edge lists")
        if kind == "dir":
            s, t = e.oriented()
        else:
            s, t = sorted((e.a, e.b))
        rows.append((s, t, kind))
    lines.extend(f"{s}\t{t}\t{k}" for s, t, k in sorted(rows))
    return "\n".join(lines) + "\n"


def from_edge_list(text: str, source: str | None = None) -> MixedGraph:
    """Parse the edge-list format written by :func:`to_edge_list`.

    Edges may mention nodes that were not declared with a ``node`` line;
    those are appended in order of first appearance.
    """
    nodes: list[str] = []
    seen: set[str] = set()
    pairs: set[frozenset[str]] = set()
    edges = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        if not raw.strip() or raw.lstrip().startswith("#"):
            continue
        fields = raw.rstrip("\r").split("\t")
        if fields[0] == "node":
            if len(fields) != 2 or not fields[1]:
                raise ParseError(f"malformed node line {raw!r}", lineno, source)
            if fields[1] in seen:
                raise ParseError(f"node {fields[1]!r} declared twice", lineno, source)
            seen.add(fields[1])
            nodes.append(fields[1])
            continue
        if len(fields) != 3 or not fields[0] or not fields[1]:
            raise ParseError(f"malformed edge line {raw!r}", lineno, source)
        a, b, kind = fields
        if kind not in _EDGE_TYPES:
            raise ParseError(f"unknown edge type {kind!r}", lineno, source)
        if a == b:
            raise ParseError(f"self-loop on {a!r}", lineno, source)
        key = frozenset((a, b))
        if key in pairs:
            raise ParseError(f"duplicate edge between {a!r} and {b!r}", lineno, source)
        pairs.add(key)
        for v in (a, b):
            if v not in seen:
                seen.add(v)
                nodes.append(v)
        edges.append((a, b, *_EDGE_TYPES[kind]))
    return MixedGraph(nodes, edges)


def iter_pairs(nodes: Sequence[str]) -> Iterator[tuple[str, str]]:
    """Unordered pairs of ``nodes`` in lexicographic order."""
    return combinations(sorted(nodes), 2)
