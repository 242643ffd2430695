"""Monte Carlo realization of the level-n convolution decomposition.

Unfolding the identity mu = T(mu) * S(mu) n times writes mu as the
convolution over all length-n words alpha in T, S of alpha(mu).  A
level-n sample is the sum over words of alpha(Y_alpha) with independent
seed draws Y_alpha.  For commuting T, S the 2^n words collapse to n+1
letter-count classes with binomial multiplicities, so a replicate costs
O(n) matrix applications instead of O(2^n): the class sum needs only the
sum of C(n, i) independent seeds, which is exact for point seeds (scale
by the count), exact in law for gaussian seeds (scale covariance by the
count), and drawn literally in chunks for box-uniform seeds.

Streams are counter-based: class i reads from Philox keyed by
(rng_seed, i), so batches are reproducible and class draws can be shared
across levels in the infinitesimality scan, which makes the reported
p_n sequence monotone by construction rather than only in expectation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .charfn import Empirical, eval_cf
from .linops import MatrixLike, _as_matrix, operator_norm, pair_commutes

__all__ = [
    "SeedDistribution",
    "SampleBatch",
    "InfinitesimalityProfile",
    "tree_sample",
    "infinitesimality_profile",
    "empirical_cf",
]

DEPTH_CAP = 24
UNIFORM_DRAW_CAP = 2**28


@dataclass(frozen=True)
class SeedDistribution:
    """Seed law for the decomposition tree: gaussian, uniform box, or point.

    The gaussian variant is parameterized by its covariance matrix.  A
    point seed consumes no randomness; sums of it are exact multiples.
    """

    kind: str
    covariance: Optional[np.ndarray] = None
    half_widths: Optional[np.ndarray] = None
    location: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.kind not in ("gaussian", "uniform", "point"):
            raise ValueError(f"unknown seed kind {self.kind!r}")
        if self.kind == "gaussian":
            cov = np.atleast_2d(np.array(self.covariance, dtype=float))
            if cov.ndim != 2 or cov.shape[0] != cov.shape[1]:
                raise ValueError("covariance must be a square matrix")
            if operator_norm(cov - cov.T) > 1e-12 * (1.0 + operator_norm(cov)):
                raise ValueError("covariance must be symmetric")
            evals, vecs = np.linalg.eigh((cov + cov.T) / 2)
            if evals.min() < -1e-10 * max(1.0, float(evals.max())):
                raise ValueError("covariance must be positive semidefinite")
            root = vecs * np.sqrt(np.maximum(evals, 0.0))
            cov.flags.writeable = False
            object.__setattr__(self, "covariance", cov)
            object.__setattr__(self, "_root", root)
        elif self.kind == "uniform":
            h = np.atleast_1d(np.array(self.half_widths, dtype=float))
            if h.ndim != 1 or (h <= 0).any():
                raise ValueError("half widths must be a vector of positive reals")
            h.flags.writeable = False
            object.__setattr__(self, "half_widths", h)
        else:
            x = np.atleast_1d(np.array(self.location, dtype=float))
            if x.ndim != 1:
                raise ValueError("location must be a vector")
            x.flags.writeable = False
            object.__setattr__(self, "location", x)

    @classmethod
    def gaussian(cls, covariance) -> "SeedDistribution":
        return cls(kind="gaussian", covariance=covariance)

    @classmethod
    def uniform_box(cls, half_widths) -> "SeedDistribution":
        return cls(kind="uniform", half_widths=half_widths)

    @classmethod
    def point(cls, location) -> "SeedDistribution":
        return cls(kind="point", location=location)

    @property
    def dim(self) -> int:
        if self.kind == "gaussian":
            return self.covariance.shape[0]
        if self.kind == "uniform":
            return self.half_widths.shape[0]
        return self.location.shape[0]

    def covariance_matrix(self) -> np.ndarray:
        if self.kind == "gaussian":
            return np.array(self.covariance)
        if self.kind == "uniform":
            return np.diag(self.half_widths**2 / 3.0)
        return np.zeros((self.dim, self.dim))

    def support_radius(self) -> Optional[float]:
        """Euclidean bound on a single draw, or None when unbounded."""
        if self.kind == "uniform":
            return float(np.linalg.norm(self.half_widths))
        if self.kind == "point":
            return float(np.linalg.norm(self.location))
        return None

    def draw_sum(self, rng: np.random.Generator, m: int, count: int) -> np.ndarray:
        """count independent sums of m iid seed draws, shape (count, dim)."""
        if m < 0 or count < 1:
            raise ValueError("need m >= 0 and count >= 1")
        d = self.dim
        if m == 0:
            return np.zeros((count, d))
        if self.kind == "point":
            return np.broadcast_to(m * self.location, (count, d)).copy()
        if self.kind == "gaussian":
            e = rng.standard_normal((count, d))
            return np.sqrt(m) * (e @ self._root.T)
        out = np.zeros((count, d))
        done = 0
        block_rows = max(1, (1 << 20) // max(1, count * d))
        while done < m:
            step = min(m - done, block_rows)
            block = rng.uniform(-self.half_widths, self.half_widths, size=(step, count, d))
            out += block.sum(axis=0)
            done += step
        return out

    def draw(self, rng: np.random.Generator, count: int) -> np.ndarray:
        return self.draw_sum(rng, 1, count)


@dataclass(frozen=True)
class SampleBatch:
    """Replicates of the level-depth word sum, with full seed provenance."""

    points: np.ndarray
    depth: int
    word_count: int
    rng_seed: int

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[0] == 0:
            raise ValueError("points must be a nonempty (count, dim) array")
        if not np.isfinite(pts).all():
            raise ValueError("points must be finite")
        if self.word_count != 2**self.depth:
            raise ValueError("word_count must equal 2^depth")
        pts.flags.writeable = False
        object.__setattr__(self, "points", pts)

    @property
    def count(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]


def _class_rng(rng_seed: int, class_index: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=[rng_seed, class_index]))


def _validated_pair(first: MatrixLike, second: MatrixLike) -> tuple[np.ndarray, np.ndarray]:
    a = _as_matrix(first, "first map")
    b = _as_matrix(second, "second map")
    if a.shape != b.shape:
        raise ValueError("maps must share one dimension")
    for name, mat in (("first map", a), ("second map", b)):
        norm = operator_norm(mat)
        if norm >= 1.0:
            raise ValueError(f"{name} has operator norm {norm:.6f}; a strict contraction is required")
    if not pair_commutes(a, b):
        raise ValueError("maps must commute; the class-sum decomposition needs TS = ST")
    return a, b


def _word_matrices(a: np.ndarray, b: np.ndarray, depth: int) -> list[np.ndarray]:
    d = a.shape[0]
    a_pows = [np.eye(d)]
    b_pows = [np.eye(d)]
    for _ in range(depth):
        a_pows.append(a_pows[-1] @ a)
        b_pows.append(b_pows[-1] @ b)
    return [a_pows[depth - i] @ b_pows[i] for i in range(depth + 1)]


def tree_sample(
    first: MatrixLike,
    second: MatrixLike,
    seed_dist: SeedDistribution,
    depth: int,
    count: int,
    rng_seed: int = 0,
) -> SampleBatch:
    """Draw count replicates of the level-depth word sum.

    Deterministic for a fixed rng_seed.  Box-uniform seeds have no closed
    form for class sums, so their cost grows like 2^depth draws per
    replicate and is capped.
    """
    a, b = _validated_pair(first, second)
    if not 0 <= depth <= DEPTH_CAP:
        raise ValueError(f"depth must lie in [0, {DEPTH_CAP}], got {depth}")
    if count < 1:
        raise ValueError(f"count must be positive, got {count}")
    if rng_seed < 0:
        raise ValueError("rng_seed must be nonnegative")
    if seed_dist.dim != a.shape[0]:
        raise ValueError(
            f"seed dimension {seed_dist.dim} does not match map dimension {a.shape[0]}"
        )
    if seed_dist.kind == "uniform" and 2**depth * count > UNIFORM_DRAW_CAP:
        raise ValueError(
            f"uniform seeds need 2^depth * count = {2**depth * count} draws, "
            f"beyond the cap {UNIFORM_DRAW_CAP}"
        )
    words = _word_matrices(a, b, depth)
    points = np.zeros((count, a.shape[0]))
    for i, word in enumerate(words):
        z = seed_dist.draw_sum(_class_rng(rng_seed, i), math.comb(depth, i), count)
        points += z @ word.T
    return SampleBatch(points=points, depth=depth, word_count=2**depth, rng_seed=rng_seed)


@dataclass(frozen=True)
class InfinitesimalityProfile:
    """Estimated p_n = max over length-n words of P(||alpha(Y)|| > epsilon)."""

    epsilon: float
    count: int
    rng_seed: int
    p: tuple[float, ...]

    def to_dict(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "count": self.count,
            "rng_seed": self.rng_seed,
            "p": list(self.p),
        }


def infinitesimality_profile(
    first: MatrixLike,
    second: MatrixLike,
    seed_dist: SeedDistribution,
    epsilon: float,
    n_max: int,
    count: int,
    rng_seed: int = 0,
) -> InfinitesimalityProfile:
    """Estimate the triangular-system tail probabilities p_0 .. p_n_max.

    Class i keeps one stream of count seed draws shared across all levels,
    so each per-class estimate is computed on nested events and decreases
    with n whenever the word norms do.
    """
    a, b = _validated_pair(first, second)
    if epsilon <= 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    if n_max < 0 or count < 1:
        raise ValueError("need n_max >= 0 and count >= 1")
    if seed_dist.dim != a.shape[0]:
        raise ValueError(
            f"seed dimension {seed_dist.dim} does not match map dimension {a.shape[0]}"
        )
    draws = [seed_dist.draw(_class_rng(rng_seed, i), count) for i in range(n_max + 1)]
    d = a.shape[0]
    a_pows = [np.eye(d)]
    b_pows = [np.eye(d)]
    for _ in range(n_max):
        a_pows.append(a_pows[-1] @ a)
        b_pows.append(b_pows[-1] @ b)
    p = []
    for n in range(n_max + 1):
        worst = 0.0
        for i in range(n + 1):
            word = a_pows[n - i] @ b_pows[i]
            norms = np.linalg.norm(draws[i] @ word.T, axis=1)
            worst = max(worst, float((norms > epsilon).mean()))
        p.append(worst)
    return InfinitesimalityProfile(epsilon=epsilon, count=count, rng_seed=rng_seed, p=tuple(p))


def empirical_cf(batch: SampleBatch, v: Union[np.ndarray, list]) -> np.ndarray:
    """Average of character values over the batch; standard error is about 1/sqrt(count)."""
    if batch.count == 0:
        raise ValueError("empty batch")
    return eval_cf(Empirical(batch.points), v)
