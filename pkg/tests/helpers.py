"""Shared test utilities: small named graphs, random graph draws, and a
brute-force rooted-isomorphism oracle for canonical-key checks."""

from itertools import permutations

from qgreedy.cones import LightCone
from qgreedy.graph import Graph


def petersen() -> Graph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return Graph(10, outer + spokes + inner)


def complete(n: int) -> Graph:
    return Graph(n, [(a, b) for a in range(n) for b in range(a + 1, n)])


def k33() -> Graph:
    return Graph(6, [(a, 3 + b) for a in range(3) for b in range(3)])


def path(n: int) -> Graph:
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


def random_graph(rng, n: int, p: float = 0.3) -> Graph:
    edges = [
        (a, b) for a in range(n) for b in range(a + 1, n) if rng.random() < p
    ]
    return Graph(n, edges)


def random_degree3_graph(rng, n: int) -> Graph:
    """Random graph with all degrees <= 3 (not regular): greedy edge fill."""
    deg = [0] * n
    edges = []
    seen = set()
    pairs = [(a, b) for a in range(n) for b in range(a + 1, n)]
    rng.shuffle(pairs)
    for a, b in pairs:
        if deg[a] < 3 and deg[b] < 3 and (a, b) not in seen and rng.random() < 0.7:
            seen.add((a, b))
            deg[a] += 1
            deg[b] += 1
            edges.append((a, b))
    return Graph(n, edges)


def relabel_cone(cone: LightCone, rng) -> LightCone:
    """Random root-preserving relabeling (local ids permuted, id 0 fixed)."""
    n = cone.size
    perm = [0] + (1 + rng.permutation(n - 1)).tolist() if n > 1 else [0]
    # perm maps old local id -> new local id
    new_dists = [0] * n
    for old, new in enumerate(perm):
        new_dists[new] = cone.dists[old]
    new_edges = []
    for u, v in cone.edges:
        a, b = perm[u], perm[v]
        new_edges.append((a, b) if a < b else (b, a))
    return LightCone(
        depth=cone.depth, dists=tuple(new_dists), edges=tuple(sorted(new_edges))
    )


def rooted_isomorphic(c1: LightCone, c2: LightCone) -> bool:
    """Exhaustive shell-by-shell search for a root-fixing isomorphism."""
    if c1.depth != c2.depth or c1.size != c2.size:
        return False
    if len(c1.edges) != len(c2.edges):
        return False
    shells1: dict[int, list[int]] = {}
    shells2: dict[int, list[int]] = {}
    for v in range(c1.size):
        shells1.setdefault(c1.dists[v], []).append(v)
    for v in range(c2.size):
        shells2.setdefault(c2.dists[v], []).append(v)
    if sorted(shells1) != sorted(shells2):
        return False
    if any(len(shells1[k]) != len(shells2[k]) for k in shells1):
        return False
    edgeset2 = {frozenset(e) for e in c2.edges}
    levels = sorted(shells1)

    def extend(li: int, mapping: dict[int, int]) -> bool:
        if li == len(levels):
            return all(
                frozenset((mapping[u], mapping[v])) in edgeset2
                for u, v in c1.edges
            )
        lv = levels[li]
        src = shells1[lv]
        for perm in permutations(shells2[lv]):
            m2 = dict(mapping)
            for a, b in zip(src, perm):
                m2[a] = b
            ok = True
            for u, v in c1.edges:
                # check edges as soon as both endpoints are mapped
                if u in m2 and v in m2 and max(c1.dists[u], c1.dists[v]) == lv:
                    if frozenset((m2[u], m2[v])) not in edgeset2:
                        ok = False
                        break
            if ok and extend(li + 1, m2):
                return True
        return False

    return extend(0, {})
