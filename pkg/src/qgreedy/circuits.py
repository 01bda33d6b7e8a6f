"""Angle schedules and cone circuits.

A depth-p schedule drives the alternating ansatz

    |gamma, beta> = e^{-i beta_p B} e^{-i gamma_p H} ... e^{-i beta_1 B}
                    e^{-i gamma_1 H} |+...+>,   B = sum_v X_v,

with H the Ising cost restricted to the cone: ZZ weight lam/4 per causal
edge and Z weight h_v = (lam * deg_v - 2)/4 per vertex, degrees in-cone.
Gate "weight" w means the gate exp(-i * w * P) for Pauli string P.

Layer pruning drops gates that cannot reach the observable: counting layers
k = 0..p-1 in application order, layer k keeps ZZ gates on edges whose
nearer endpoint is within distance p-k-1 of the root and single-qubit gates
on vertices within distance p-k.  The pruned circuit is exactly
value-preserving; unpruned circuits share one gate layout across layers,
which the dense simulator exploits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .cones import LightCone


@dataclass(frozen=True)
class AngleSchedule:
    """Fixed angles for one (depth, degree, penalty) combination."""

    depth: int
    degree: int
    lam: float
    gammas: tuple[float, ...]
    betas: tuple[float, ...]

    def __post_init__(self):
        if self.depth < 1:
            raise ValueError("schedule depth must be >= 1")
        if len(self.gammas) != self.depth or len(self.betas) != self.depth:
            raise ValueError(
                f"need {self.depth} angles per family, got "
                f"{len(self.gammas)} gammas / {len(self.betas)} betas"
            )
        for x in (*self.gammas, *self.betas):
            if not math.isfinite(x):
                raise ValueError("angles must be finite")
        if self.lam < 1.0:
            raise ValueError("penalty weight must satisfy lam >= 1")

    @property
    def fingerprint(self) -> tuple:
        """Hashable identity used to scope caches to one schedule."""
        return (self.depth, self.degree, self.lam, self.gammas, self.betas)


@dataclass(frozen=True)
class Layer:
    """Gates of one (cost, mixer) step.

    zz: (u, v, weight); z: (v, weight); x: (v, angle).  Deterministic order:
    edges sorted, vertices ascending.
    """

    zz: tuple[tuple[int, int, float], ...]
    z: tuple[tuple[int, float], ...]
    x: tuple[tuple[int, float], ...]


@dataclass(frozen=True)
class ConeCircuit:
    n_qubits: int
    depth: int
    layers: tuple[Layer, ...]
    observable: tuple[int, ...] = (0,)
    # True when every layer applies the full gate layout (unpruned build);
    # the dense engine then builds one unit-gamma cost diagonal and scales it.
    uniform_layers: bool = field(default=False, compare=False)
    # unit-gamma cost structure: weights for gamma = 1
    cost_zz: tuple[tuple[int, int, float], ...] = field(default=(), compare=False)
    cost_z: tuple[tuple[int, float], ...] = field(default=(), compare=False)
    gammas: tuple[float, ...] = field(default=(), compare=False)


def build_circuit(
    cone: LightCone,
    schedule: AngleSchedule,
    prune_layers: bool = False,
    observable: tuple[int, ...] | None = None,
) -> ConeCircuit:
    """Compile a cone and a schedule into an explicit layered gate list."""
    if schedule.depth != cone.depth:
        raise ValueError(
            f"schedule depth {schedule.depth} != cone depth {cone.depth}"
        )
    p = cone.depth
    lam = schedule.lam
    deg = cone.in_degrees()
    fields = [(lam * deg[v] - 2.0) / 4.0 for v in range(cone.size)]
    if observable is None:
        observable = (0,)
    layers = []
    for k in range(p):
        gamma = schedule.gammas[k]
        beta = schedule.betas[k]
        if prune_layers:
            edge_reach = p - k - 1
            vert_reach = p - k
        else:
            edge_reach = p - 1
            vert_reach = p
        zz = tuple(
            (u, v, lam / 4.0 * gamma)
            for u, v in cone.edges
            if min(cone.dists[u], cone.dists[v]) <= edge_reach
        )
        z = tuple(
            (v, fields[v] * gamma)
            for v in range(cone.size)
            if cone.dists[v] <= vert_reach
        )
        x = tuple(
            (v, beta) for v in range(cone.size) if cone.dists[v] <= vert_reach
        )
        layers.append(Layer(zz=zz, z=z, x=x))
    return ConeCircuit(
        n_qubits=cone.size,
        depth=p,
        layers=tuple(layers),
        observable=tuple(observable),
        uniform_layers=not prune_layers,
        cost_zz=tuple((u, v, lam / 4.0) for u, v in cone.edges),
        cost_z=tuple((v, fields[v]) for v in range(cone.size)),
        gammas=schedule.gammas,
    )
