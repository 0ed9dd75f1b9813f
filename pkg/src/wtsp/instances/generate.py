"""Point placements and node weights for benchmark instances."""

from __future__ import annotations

import csv
import hashlib
import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

from ..core import Instance, ValidationError

BOX = 1000.0
PLACEMENTS = ("rue", "netgen", "tspgen")
CLASSES = ("C1", "C2", "C3")

# netgen
CENTER_LOW, CENTER_HIGH = 200.0, 800.0
MIN_CENTER_SEPARATION = 400.0
CLUSTER_SIGMA = 60.0

# tspgen
TSPGEN_ROUNDS = 10

SUITE_SIZES = (25, 50, 100, 500, 1000)
SUITE_D = {
    "C1": tuple(round(0.1 * k, 1) for k in range(11)),
    "C2": tuple(range(2, 11)),
    "C3": tuple(range(1, 11)),
}
SUITE_REPLICATIONS = 10


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(int(seed) & 0xFFFF_FFFF_FFFF_FFFF))


def stable_seed(*parts) -> int:
    """64-bit seed from a tuple of labels, identical on every platform."""
    digest = hashlib.blake2b("|".join(map(str, parts)).encode(), digest_size=8).digest()
    return int.from_bytes(digest, "little")


@dataclass(frozen=True)
class WeightConfig:
    weight_class: str
    d: float

    def __post_init__(self) -> None:
        if self.weight_class not in CLASSES:
            raise ValidationError(f"weight class must be one of {CLASSES}")
        if self.weight_class == "C1":
            if not 0.0 <= self.d <= 1.0:
                raise ValidationError("C1 needs 0 <= d <= 1")
        elif self.d != int(self.d) or not 1 <= self.d <= 10:
            raise ValidationError(f"{self.weight_class} needs an integer d in 1..10")


@dataclass(frozen=True)
class GeneratorSpec:
    n: int
    placement: str
    weight_class: str
    d: float
    placement_seed: int
    weight_seed: int

    def __post_init__(self) -> None:
        if self.n < 2:
            raise ValidationError("instances need at least two cities")
        if self.placement not in PLACEMENTS:
            raise ValidationError(f"placement must be one of {PLACEMENTS}")
        WeightConfig(self.weight_class, self.d)

    @property
    def weight_config(self) -> WeightConfig:
        return WeightConfig(self.weight_class, self.d)

    @property
    def instance_id(self) -> str:
        return (f"{self.placement}-{self.weight_class}-d{format_d(self.d)}-n{self.n}"
                f"-p{self.placement_seed}-w{self.weight_seed}")


def format_d(d: float) -> str:
    return str(int(d)) if float(d).is_integer() and d >= 1 else repr(float(d))


def _rue(rng: np.random.Generator, n: int) -> np.ndarray:
    return rng.integers(0, int(BOX) + 1, size=(n, 2)).astype(float)


def _gaussian_in_box(rng: np.random.Generator, center: np.ndarray, sigma: float, count: int) -> np.ndarray:
    out = np.empty((0, 2))
    while len(out) < count:
        pts = rng.normal(center, sigma, size=(count - len(out), 2))
        ok = np.all((pts >= 0) & (pts <= BOX), axis=1)
        out = np.vstack([out, pts[ok]])
    return np.round(out)


def _netgen(rng: np.random.Generator, n: int) -> np.ndarray:
    while True:
        centers = rng.uniform(CENTER_LOW, CENTER_HIGH, size=(2, 2))
        if np.linalg.norm(centers[0] - centers[1]) >= MIN_CENTER_SEPARATION:
            break
    half = n // 2
    return np.vstack([
        _gaussian_in_box(rng, centers[0], CLUSTER_SIGMA, half),
        _gaussian_in_box(rng, centers[1], CLUSTER_SIGMA, n - half),
    ])


def _explosion(rng, pts):
    center = rng.uniform(0, BOX, size=2)
    radius = rng.uniform(50, 250)
    off = pts - center
    dist = np.linalg.norm(off, axis=1)
    hit = (dist < radius) & (dist > 0)
    push = radius + rng.exponential(radius / 5, size=hit.sum())
    pts[hit] = center + off[hit] / dist[hit, None] * push[:, None]
    return pts


def _implosion(rng, pts):
    center = rng.uniform(0, BOX, size=2)
    radius = rng.uniform(50, 250)
    factor = rng.uniform(0.1, 0.5)
    off = pts - center
    hit = np.linalg.norm(off, axis=1) < radius
    pts[hit] = center + off[hit] * factor
    return pts


def _cluster(rng, pts):
    n = len(pts)
    size = max(1, int(rng.uniform(0.1, 0.3) * n))
    idx = rng.choice(n, size=size, replace=False)
    center = rng.uniform(0, BOX, size=2)
    sigma = rng.uniform(10, 40)
    pts[idx] = rng.normal(center, sigma, size=(size, 2))
    return pts


_TSPGEN_OPS = (_explosion, _implosion, _cluster)


def _tspgen(rng: np.random.Generator, n: int, rounds: int) -> np.ndarray:
    pts = _rue(rng, n)
    for _ in range(rounds):
        op = _TSPGEN_OPS[int(rng.integers(len(_TSPGEN_OPS)))]
        pts = np.clip(op(rng, pts), 0.0, BOX)
    return np.round(pts)


def generate_placement(spec: GeneratorSpec, tspgen_rounds: int = TSPGEN_ROUNDS) -> np.ndarray:
    """``n`` integer-valued points in ``[0, 1000]^2`` drawn from ``placement_seed``."""
    rng = make_rng(spec.placement_seed)
    if spec.placement == "rue":
        return _rue(rng, spec.n)
    if spec.placement == "netgen":
        return _netgen(rng, spec.n)
    return _tspgen(rng, spec.n, tspgen_rounds)


def assign_weights(n: int, config: WeightConfig, seed: int) -> np.ndarray:
    """Weights with ``w[0] = 1``; the rest i.i.d. per the weight class."""
    rng = make_rng(seed)
    w = np.empty(n)
    if config.weight_class == "C1":
        w[1:] = config.d
    elif config.weight_class == "C2":
        w[1:] = rng.integers(1, int(config.d) + 1, size=n - 1)
    else:
        w[1:] = rng.integers(0, int(config.d) + 1, size=n - 1)
    w[0] = 1.0
    return w


def generate_instance(spec: GeneratorSpec, tspgen_rounds: int = TSPGEN_ROUNDS) -> Instance:
    pts = generate_placement(spec, tspgen_rounds)
    w = assign_weights(spec.n, spec.weight_config, spec.weight_seed)
    return Instance.from_coords(pts, w, name=spec.instance_id)


def suite_specs(
    sizes: Iterable[int] = SUITE_SIZES,
    placements: Iterable[str] = PLACEMENTS,
    replications: int = SUITE_REPLICATIONS,
) -> Iterator[GeneratorSpec]:
    """The full factorial design: weight configuration x size x placement x seeds."""
    configs = [(cls, d) for cls in CLASSES for d in SUITE_D[cls]]
    for (cls, d), n, placement in itertools.product(configs, sizes, placements):
        for rp in range(replications):
            p_seed = stable_seed("placement", placement, n, rp)
            for rw in range(replications):
                w_seed = stable_seed("weights", cls, format_d(d), n, placement, rp, rw)
                yield GeneratorSpec(n, placement, cls, d, p_seed, w_seed)


MANIFEST_FIELDS = ("instance_id", "n", "placement", "weight_class", "d", "placement_seed", "weight_seed")


def write_manifest(path, specs: Iterable[GeneratorSpec]) -> int:
    count = 0
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(MANIFEST_FIELDS)
        for spec in specs:
            writer.writerow([spec.instance_id, spec.n, spec.placement, spec.weight_class,
                             format_d(spec.d), spec.placement_seed, spec.weight_seed])
            count += 1
    return count


def read_manifest(path) -> list[GeneratorSpec]:
    with open(path, newline="") as fh:
        return [
            GeneratorSpec(int(r["n"]), r["placement"], r["weight_class"], float(r["d"]),
                          int(r["placement_seed"]), int(r["weight_seed"]))
            for r in csv.DictReader(fh)
        ]
