"""Phenomenological advice noise and shot-budget arithmetic.

A hardware estimate of a cone expectation is modeled as

    noisy = (1 - eta)^{cone_size} * ideal + alpha + xi

with a shrink rate eta per involved qubit, a uniform bias alpha, and a
residual offset xi ~ Normal(0, sigma).  xi is frozen per canonical cone key
per realization rather than redrawn per evaluation: two alive vertices whose
cones are isomorphic see the same offset, and reruns with the same seed see
the same offset table.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cones import key_digest


@dataclass(frozen=True)
class NoiseParams:
    eta: float
    alpha: float
    sigma: float
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.eta < 1.0:
            raise ValueError(f"eta must lie in [0, 1), got {self.eta}")
        if self.sigma < 0.0:
            raise ValueError(f"sigma must be >= 0, got {self.sigma}")


class NoiseRealization:
    """Lazily drawn per-cone-key offset table for one realization."""

    def __init__(self, params: NoiseParams):
        self.params = params
        self._offsets: dict[bytes, float] = {}

    def offset(self, key_data: bytes) -> float:
        xi = self._offsets.get(key_data)
        if xi is None:
            if self.params.sigma == 0.0:
                xi = 0.0
            else:
                rng = np.random.default_rng(
                    np.random.SeedSequence([self.params.seed, key_digest(key_data)])
                )
                xi = float(rng.normal(0.0, self.params.sigma))
            self._offsets[key_data] = xi
        return xi

    def items(self):
        return sorted(self._offsets.items())


def apply_noise(ideal: float, cone_size: int, params: NoiseParams, xi: float) -> float:
    """(1-eta)^cone_size * ideal + alpha + xi; pass xi = realization.offset(key)."""
    if not -1.0 <= ideal <= 1.0:
        raise ValueError(f"expectation {ideal} outside [-1, 1]")
    if cone_size < 1:
        raise ValueError("cone_size must be >= 1")
    return (1.0 - params.eta) ** cone_size * ideal + params.alpha + xi


def fit_noise(pairs) -> NoiseParams:
    """Least-squares (eta, alpha) from (ideal, noisy, cone_size) triples.

    1-D scan over eta in [0, 0.5] at step 1e-4 with the closed-form optimal
    alpha at each eta; sigma is the residual standard deviation at the
    winner.  eta is unidentifiable when all ideals or all sizes coincide.
    """
    data = [(float(x), float(y), int(s)) for x, y, s in pairs]
    if len(data) < 3:
        raise ValueError("need at least 3 (ideal, noisy, cone_size) triples")
    x = np.array([t[0] for t in data])
    y = np.array([t[1] for t in data])
    s = np.array([t[2] for t in data], dtype=np.int64)
    if np.all(x == x[0]) or np.all(s == s[0]):
        raise ValueError("degenerate input: eta is unidentifiable")
    etas = np.arange(0.0, 0.5 + 1e-12, 1e-4)
    # residual sum with alpha optimized out, all etas at once
    shrink = (1.0 - etas[:, None]) ** s[None, :]
    pred = shrink * x[None, :]
    resid = y[None, :] - pred
    alpha = resid.mean(axis=1)
    scores = ((resid - alpha[:, None]) ** 2).sum(axis=1)
    best = int(np.argmin(scores))
    res = resid[best] - alpha[best]
    return NoiseParams(
        eta=float(etas[best]),
        alpha=float(alpha[best]),
        sigma=float(np.std(res)),
    )


def required_shots(n: int, eps: float, gap: float) -> int:
    """ceil(ln(n/eps) / gap^2): Hoeffding shot count so that all n advice
    comparisons stay on the right side of a gap-wide margin with failure
    probability eps."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if not 0.0 < eps < 1.0:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    if gap <= 0.0:
        raise ValueError("gap must be positive; use the cutoff path for gap 0")
    return math.ceil(math.log(n / eps) / gap**2)


@dataclass(frozen=True)
class ShotPlan:
    n: int
    eps: float
    gap: float
    shots: int

    def __post_init__(self):
        if self.shots < 1:
            raise ValueError("shots must be >= 1")
        if not 0.0 < self.eps < 1.0:
            raise ValueError(f"eps must lie in (0, 1), got {self.eps}")

    @classmethod
    def for_problem(cls, n: int, eps: float, gap: float) -> "ShotPlan":
        return cls(n=n, eps=eps, gap=gap, shots=required_shots(n, eps, gap))


# -- realization file round trip ---------------------------------------------


def write_noise_file(path, realization: NoiseRealization) -> None:
    p = realization.params
    with open(path, "w") as fh:
        fh.write(
            f"eta {p.eta:.17g} alpha {p.alpha:.17g} "
            f"sigma {p.sigma:.17g} seed {p.seed}\n"
        )
        for key_data, xi in realization.items():
            fh.write(f"{key_data.hex()} {xi:.17g}\n")


def read_noise_file(path) -> NoiseRealization:
    with open(path) as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    head = lines[0].split()
    if len(head) != 8 or head[0::2] != ["eta", "alpha", "sigma", "seed"]:
        raise ValueError(f"malformed noise file header: {lines[0]!r}")
    params = NoiseParams(
        eta=float(head[1]), alpha=float(head[3]),
        sigma=float(head[5]), seed=int(head[7]),
    )
    real = NoiseRealization(params)
    for ln in lines[1:]:
        key_hex, val = ln.split()
        real._offsets[bytes.fromhex(key_hex)] = float(val)
    return real
