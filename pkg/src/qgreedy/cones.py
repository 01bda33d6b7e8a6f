"""Light cones: extraction, canonical keys, and the bounded-degree census.

The depth-p light cone of a node is everything that can influence its
single-qubit expectation after p alternating-layer steps: all alive vertices
within graph distance p of the root, plus the causal edges, i.e. edges whose
nearer endpoint is at distance <= p-1.  Edges joining two distance-p vertices
are dropped; gates on them provably commute past the observable.  Fields are
taken from in-cone degrees.  For every vertex closer than the outermost shell
the in-cone degree equals the alive degree; outermost-shell fields do not
affect the root expectation, which is what makes the cone self-contained.

Canonical keys realize rooted-isomorphism equality as byte equality, with no
probabilistic hashing.  Tree cones (the common case during solver runs) use
the classic sorted-subtree encoding; general cones run color refinement
seeded with (distance, degree), then a backtracking search over color-class
orderings with the root pinned, pruned by discovered automorphisms.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

from .graph import Graph


@dataclass(frozen=True)
class LightCone:
    """Rooted causal neighborhood with local vertex ids.

    Local id 0 is the root (for multi-root cones, the roots take the first
    ids); remaining ids follow BFS order.  ``dists`` holds the distance label
    of every local vertex, ``edges`` the causal edges as (u, v) with u < v.
    ``source_ids`` maps local ids back to graph node ids when the cone was
    extracted from a graph; it is not part of the cone's identity.
    """

    depth: int
    dists: tuple[int, ...]
    edges: tuple[tuple[int, int], ...]
    source_ids: tuple[int, ...] | None = field(default=None, compare=False)

    @property
    def size(self) -> int:
        return len(self.dists)

    @property
    def is_tree(self) -> bool:
        return len(self.edges) == self.size - 1

    def in_degrees(self) -> list[int]:
        deg = [0] * self.size
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg

    def adjacency(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in range(self.size)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        for nbrs in adj:
            nbrs.sort()
        return adj


def extract_lightcone(g: Graph, root: int, depth: int) -> LightCone:
    """Depth-``depth`` causal cone of an alive node."""
    return _extract(g, (root,), depth)


def extract_lightcone_multi(g: Graph, roots, depth: int) -> LightCone:
    """Causal cone of a set of sources (used for edge observables)."""
    return _extract(g, tuple(roots), depth)


def _extract(g: Graph, roots: tuple[int, ...], depth: int) -> LightCone:
    if depth < 1:
        raise ValueError("cone depth must be >= 1")
    for r in roots:
        if not g.alive[r]:
            raise ValueError(f"node {r} is not alive")
    dist: dict[int, int] = {}
    order: list[int] = []
    for r in roots:
        dist[r] = 0
        order.append(r)
    frontier = list(roots)
    for k in range(1, depth + 1):
        nxt = []
        for u in frontier:
            for v in g.adj[u]:
                if g.alive[v] and v not in dist:
                    dist[v] = k
                    order.append(v)
                    nxt.append(v)
        frontier = nxt
    local = {node: idx for idx, node in enumerate(order)}
    edges = []
    for u in order:
        du = dist[u]
        for v in g.adj[u]:
            if v in local and v > u and g.alive[v]:
                if min(du, dist[v]) <= depth - 1:
                    a, b = local[u], local[v]
                    edges.append((a, b) if a < b else (b, a))
    edges.sort()
    return LightCone(
        depth=depth,
        dists=tuple(dist[node] for node in order),
        edges=tuple(edges),
        source_ids=tuple(order),
    )


def affected_nodes(g: Graph, i: int, depth: int) -> list[int]:
    """Nodes whose depth-``depth`` cone can change when N[i] is deleted.

    Deletions touch the closed neighborhood of i, so any changed cone has its
    root within distance depth+1 of i.  Taken before deletion.
    """
    return [node for node, _ in g.ball(i, depth + 1)]


# -- canonical keys ---------------------------------------------------------


@dataclass(frozen=True)
class CanonicalKey:
    """Isomorphism-class key plus the cheap derived facts callers need."""

    data: bytes
    size: int
    edge_count: int
    is_tree: bool

    @property
    def hex(self) -> str:
        return self.data.hex()


def key_digest(key_data: bytes) -> int:
    """Stable 64-bit digest of a canonical key, for seeding RNG streams."""
    return int.from_bytes(hashlib.sha256(key_data).digest()[:8], "big")


def canonical_key(cone: LightCone) -> CanonicalKey:
    """Key equal between two same-depth cones iff root-preserving isomorphic.

    The extraction depth is part of the key: structurally identical cones at
    different depths run different circuits, and everything keyed per cone
    (cache entries, noise offsets, shot streams) must not alias across
    depths.
    """
    if cone.is_tree:
        data = b"T" + bytes([cone.depth]) + _tree_encoding(cone)
    else:
        data = b"G" + bytes([cone.depth]) + _search_encoding(cone)
    return CanonicalKey(
        data=data, size=cone.size, edge_count=len(cone.edges), is_tree=cone.is_tree
    )


def _tree_encoding(cone: LightCone) -> bytes:
    """Sorted-subtree encoding; canonical for rooted trees.

    In a tree cone every edge joins consecutive shells, so children of v are
    exactly its neighbors one shell further out.
    """
    adj = cone.adjacency()
    dists = cone.dists

    def encode(v: int) -> bytes:
        parts = sorted(encode(c) for c in adj[v] if dists[c] == dists[v] + 1)
        return b"(" + b"".join(parts) + b")"

    import sys

    old = sys.getrecursionlimit()
    if old < cone.size + 100:
        sys.setrecursionlimit(cone.size + 200)
    try:
        return encode(0)
    finally:
        sys.setrecursionlimit(old)


def _refine(n: int, adj: list[list[int]], colors: list[int]) -> list[int]:
    """1-dimensional color refinement to a stable partition."""
    while True:
        sigs = [
            (colors[v], tuple(sorted(colors[w] for w in adj[v]))) for v in range(n)
        ]
        order = {}
        for s in sorted(set(sigs)):
            order[s] = len(order)
        new = [order[s] for s in sigs]
        if new == colors:
            return colors
        colors = new


def _search_encoding(cone: LightCone) -> bytes:
    """Canonical encoding by individualization-refinement.

    Explores orderings of the first non-singleton color class at each node
    and returns the minimum adjacency encoding over all discrete refinements
    reached.  Whenever two leaves produce the same encoding, the composed
    permutation is an automorphism; sibling branches equivalent under the
    subgroup of discovered automorphisms that fixes the already
    individualized vertices are skipped.  Restricting to that stabilizer is
    what keeps the pruning sound.
    """
    n = cone.size
    adj = cone.adjacency()
    deg = cone.in_degrees()
    init_pairs = sorted({(cone.dists[v], deg[v]) for v in range(n)})
    rank = {p: i for i, p in enumerate(init_pairs)}
    colors0 = _refine(n, adj, [rank[(cone.dists[v], deg[v])] for v in range(n)])

    best: list[bytes | None] = [None]
    best_label: list[list[int] | None] = [None]
    autos: list[tuple[int, ...]] = []

    def encode_discrete(colors: list[int]) -> tuple[bytes, list[int]]:
        label = colors  # discrete coloring is already a bijection to 0..n-1
        body = bytearray([n])
        inv = [0] * n
        for v in range(n):
            inv[label[v]] = v
        body.extend(cone.dists[inv[c]] for c in range(n))
        edges = sorted(
            (label[u], label[v]) if label[u] < label[v] else (label[v], label[u])
            for u, v in cone.edges
        )
        for a, b in edges:
            body.append(a)
            body.append(b)
        return bytes(body), list(label)

    def orbit_reps(members: list[int], fixed: list[int]) -> list[int]:
        gens = [
            phi for phi in autos if all(phi[x] == x for x in fixed)
        ]
        if not gens:
            return members
        parent = list(range(n))

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for phi in gens:
            for v in range(n):
                rv, rp = find(v), find(phi[v])
                if rv != rp:
                    parent[rv] = rp
        reps = []
        seen = set()
        for v in members:
            r = find(v)
            if r not in seen:
                seen.add(r)
                reps.append(v)
        return reps

    def search(colors: list[int], fixed: list[int]) -> None:
        cell = None
        for c in sorted(set(colors)):
            members = [v for v in range(n) if colors[v] == c]
            if len(members) > 1:
                cell = members
                break
        if cell is None:
            enc, label = encode_discrete(colors)
            if best[0] is None or enc < best[0]:
                best[0] = enc
                best_label[0] = label
            elif enc == best[0]:
                prev = best_label[0]
                inv_prev = [0] * n
                for v in range(n):
                    inv_prev[prev[v]] = v
                phi = tuple(inv_prev[label[v]] for v in range(n))
                if any(phi[v] != v for v in range(n)):
                    autos.append(phi)
            return
        tried: list[int] = []
        for v in cell:
            # orbits are re-derived per sibling: exploring the first branch
            # usually surfaces the automorphisms that let us skip the rest
            if tried and v not in orbit_reps(tried + [v], fixed):
                continue
            tried.append(v)
            pivot = colors[v]
            nxt = list(colors)
            for w in range(n):
                if nxt[w] > pivot or (nxt[w] == pivot and w != v):
                    nxt[w] += 1
            search(_refine(n, adj, nxt), fixed + [v])

    search(colors0, [])
    assert best[0] is not None
    return best[0]


# -- cone dump format -------------------------------------------------------
#
# line 1: "p n m", line 2: n distance labels, then m lines "u v" in local ids.

def dump_cone(cone: LightCone) -> str:
    lines = [f"{cone.depth} {cone.size} {len(cone.edges)}"]
    lines.append(" ".join(str(d) for d in cone.dists))
    lines.extend(f"{u} {v}" for u, v in cone.edges)
    return "\n".join(lines) + "\n"


def parse_cone(text: str) -> LightCone:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    p, n, m = (int(x) for x in lines[0].split())
    dists = tuple(int(x) for x in lines[1].split())
    if len(dists) != n:
        raise ValueError(f"expected {n} distance labels, got {len(dists)}")
    if len(lines) - 2 != m:
        raise ValueError(f"expected {m} edge lines, got {len(lines) - 2}")
    edges = []
    for ln in lines[2:]:
        u, v = (int(x) for x in ln.split())
        edges.append((u, v) if u < v else (v, u))
    return LightCone(depth=p, dists=dists, edges=tuple(sorted(edges)))


# -- census -----------------------------------------------------------------


@dataclass(frozen=True)
class CensusReport:
    depth: int
    total: int
    trees: int
    nontrees: int

    def __post_init__(self):
        if self.trees + self.nontrees != self.total:
            raise ValueError("census classes do not add up")


def enumerate_cones(depth: int, d: int = 3) -> tuple[CensusReport, list[LightCone]]:
    """All realizable depth-``depth`` cones at max degree ``d``, up to rooted
    isomorphism.

    A cone is any connected rooted graph with max degree <= d, every vertex
    within ``depth`` of the root, and no edge joining two outermost-shell
    vertices.  Enumeration grows shell by shell with canonical deduplication
    at every level; within-shell edges are only placed on shells that stay
    interior to the cone.
    """
    if depth not in (1, 2, 3):
        raise ValueError(f"census supported for depth 1..3, got {depth}")
    if d != 3:
        raise ValueError("census is tabulated for degree bound 3")

    # partial = (dists tuple, edges tuple) with shells 0..k complete
    partials = {(0,): ((0,), ())}
    for level in range(depth):
        nxt: dict[bytes, tuple[tuple[int, ...], tuple[tuple[int, int], ...]]] = {}
        for dists, edges in partials.values():
            shell = [v for v, dv in enumerate(dists) if dv == level]
            deg = [0] * len(dists)
            for u, v in edges:
                deg[u] += 1
                deg[v] += 1
            caps = [d - deg[v] for v in shell]
            for attach in _attachments(len(shell), caps, d):
                n0 = len(dists)
                new_dists = dists + tuple([level + 1] * len(attach))
                new_edges = list(edges)
                for idx, parents in enumerate(attach):
                    for pi in parents:
                        new_edges.append((shell[pi], n0 + idx))
                if level + 1 <= depth - 1 and len(attach) >= 2:
                    ncaps = [d - len(parents) for parents in attach]
                    for within in _within_edge_sets(len(attach), ncaps):
                        cand_edges = new_edges + [
                            (n0 + a, n0 + b) for a, b in within
                        ]
                        _census_insert(nxt, depth, new_dists, cand_edges)
                else:
                    _census_insert(nxt, depth, new_dists, new_edges)
        partials = nxt

    cones = []
    for dists, edges in partials.values():
        cones.append(LightCone(depth=depth, dists=dists, edges=tuple(sorted(edges))))
    cones.sort(key=lambda c: (c.size, len(c.edges), canonical_key(c).data))
    trees = sum(1 for c in cones if c.is_tree)
    report = CensusReport(
        depth=depth, total=len(cones), trees=trees, nontrees=len(cones) - trees
    )
    return report, cones


def _census_insert(table, depth, dists, edges) -> None:
    cone = LightCone(depth=depth, dists=tuple(dists), edges=tuple(sorted(edges)))
    table[canonical_key(cone).data] = (cone.dists, cone.edges)


def _attachments(n_parents: int, caps: list[int], d: int):
    """Multisets of nonempty parent subsets honoring parent capacities.

    Each element of the multiset becomes one next-shell vertex attached to
    that subset.  Subsets are chosen in nondecreasing index order so each
    multiset is produced once.
    """
    if n_parents == 0:
        yield ()
        return
    subsets = []
    for mask in range(1, 1 << n_parents):
        members = [i for i in range(n_parents) if mask >> i & 1]
        if len(members) <= d:
            subsets.append(tuple(members))
    out: list[tuple[tuple[int, ...], ...]] = []
    chosen: list[tuple[int, ...]] = []

    def rec(start: int, caps: list[int]):
        out.append(tuple(chosen))
        for si in range(start, len(subsets)):
            sub = subsets[si]
            if all(caps[i] >= 1 for i in sub):
                for i in sub:
                    caps[i] -= 1
                chosen.append(sub)
                rec(si, caps)
                chosen.pop()
                for i in sub:
                    caps[i] += 1

    rec(0, list(caps))
    yield from out


def _within_edge_sets(n: int, caps: list[int]):
    """Simple edge sets on n fresh vertices honoring degree capacities."""
    pairs = [(a, b) for a in range(n) for b in range(a + 1, n)]
    chosen: list[tuple[int, int]] = []
    out: list[tuple[tuple[int, int], ...]] = []

    def rec(idx: int, caps: list[int]):
        if idx == len(pairs):
            out.append(tuple(chosen))
            return
        rec(idx + 1, caps)
        a, b = pairs[idx]
        if caps[a] >= 1 and caps[b] >= 1:
            caps[a] -= 1
            caps[b] -= 1
            chosen.append((a, b))
            rec(idx + 1, caps)
            chosen.pop()
            caps[a] += 1
            caps[b] += 1

    rec(0, list(caps))
    yield from out


def tree_ball_size(depth: int, d: int) -> int:
    """Vertices within ``depth`` of a bulk vertex of the d-regular tree."""
    if d == 2:
        return 2 * depth + 1
    return 1 + d * ((d - 1) ** depth - 1) // (d - 2)
