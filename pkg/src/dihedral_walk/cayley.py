"""
The mixed Cayley graph Cay(D_N, {a, b}).

Vertices are the group elements ``b^s a^r`` labelled ``(s, r)``.  Right
multiplication by the rotation ``a`` gives two directed ``N``-cycles of
opposite orientation::

    (0, r) -> (0, r + 1)        inner cycle
    (1, r + 1) -> (1, r)        outer cycle

and the involution ``b`` gives the undirected edges ``(0, r) -- (1, r)``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, NamedTuple

from .errors import InputError

__all__ = [
    "DihedralVertex",
    "CayleyGraph",
    "build_cayley",
    "is_reversible",
    "vertex_index",
    "edge_list_text",
]


class DihedralVertex(NamedTuple):
    s: int
    r: int


def vertex_index(s: int, r: int, n: int) -> int:
    """Position index ``s * n + r`` of vertex ``(s, r)``."""
    if s not in (0, 1):
        raise InputError(f"reflection bit must be 0 or 1, got {s!r}")
    if not 0 <= r < n:
        raise InputError(f"rotation index r={r} outside [0, {n})")
    return s * n + r


@dataclass(frozen=True)
class CayleyGraph:
    n: int
    directed_arcs: tuple[tuple[DihedralVertex, DihedralVertex], ...]
    undirected_edges: tuple[frozenset, ...]

    @property
    def vertices(self) -> tuple[DihedralVertex, ...]:
        return tuple(DihedralVertex(s, r) for s in (0, 1) for r in range(self.n))

    def neighbours(self) -> dict[DihedralVertex, set[DihedralVertex]]:
        """Out-neighbours with undirected edges counted in both directions."""
        out: dict[DihedralVertex, set[DihedralVertex]] = {v: set() for v in self.vertices}
        for u, v in self.directed_arcs:
            out[u].add(v)
        for edge in self.undirected_edges:
            u, v = tuple(edge)
            out[u].add(v)
            out[v].add(u)
        return out

    def without_arc(self, arc: tuple[DihedralVertex, DihedralVertex]) -> "CayleyGraph":
        arcs = tuple(a for a in self.directed_arcs if a != tuple(arc))
        if len(arcs) == len(self.directed_arcs):
            raise InputError(f"arc {arc!r} not present")
        return CayleyGraph(self.n, arcs, self.undirected_edges)


def build_cayley(n: int) -> CayleyGraph:
    """Construct Cay(D_n, {a, b}) for ``n >= 3``."""
    if not isinstance(n, int) or n < 3:
        raise InputError(f"n must be an integer >= 3, got {n!r}")
    V = DihedralVertex
    arcs = [(V(0, r), V(0, (r + 1) % n)) for r in range(n)]
    arcs += [(V(1, (r + 1) % n), V(1, r)) for r in range(n)]
    edges = [frozenset((V(0, r), V(1, r))) for r in range(n)]
    return CayleyGraph(n, tuple(arcs), tuple(edges))


def _reachable(adj: dict, start) -> set:
    seen = {start}
    queue = deque([start])
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if v not in seen:
                seen.add(v)
                queue.append(v)
    return seen


def is_reversible(g: CayleyGraph) -> bool:
    """True iff every arc ``u -> v`` has a return path ``v ~> u``."""
    adj = g.neighbours()
    cache: dict = {}
    for u, v in g.directed_arcs:
        if v not in cache:
            cache[v] = _reachable(adj, v)
        if u not in cache[v]:
            return False
    return True


def edge_list_text(g: CayleyGraph) -> str:
    """Lines ``D s r s' r'`` for arcs and ``U s r s' r'`` for undirected edges."""
    lines: list[str] = []
    for u, v in g.directed_arcs:
        lines.append(f"D {u.s} {u.r} {v.s} {v.r}")
    for edge in g.undirected_edges:
        u, v = sorted(edge)
        lines.append(f"U {u.s} {u.r} {v.s} {v.r}")
    return "\n".join(lines) + "\n"


def parse_edge_list(lines: Iterable[str]) -> CayleyGraph:
    """Read the format written by :func:`edge_list_text`."""
    arcs, edges = [], []
    n = 0
    for line in lines:
        parts = line.split()
        if not parts:
            continue
        if len(parts) != 5 or parts[0] not in ("D", "U"):
            raise InputError(f"malformed edge-list line: {line!r}")
        s0, r0, s1, r1 = map(int, parts[1:])
        u, v = DihedralVertex(s0, r0), DihedralVertex(s1, r1)
        n = max(n, r0 + 1, r1 + 1)
        if parts[0] == "D":
            arcs.append((u, v))
        else:
            edges.append(frozenset((u, v)))
    return CayleyGraph(n, tuple(arcs), tuple(edges))
