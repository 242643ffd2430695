"""Exact finite-precision measures on the p-adic line.

The group G = p^{-m} Z_p / p^k Z_p is cyclic of order p^(m+k): index n
stands for the value x = n * p^{-m}, so |x|_p = p^{m - v_p(n)} and the
contraction x -> p x is index multiplication by p.  Convolution is cyclic
convolution of weight vectors, the transform is the finite-group Fourier
transform, and the dual index w stands for y = w * p^{-k} with
|y|_p = p^{k - v_p(w)}.

Two representations are provided.  QuotientMeasure stores one weight per
element and is capped at 10^6 elements.  RadialMeasure stores one mass
per valuation shell, which is lossless for unit-invariant measures (the
stable family, Haar measures, and everything the verification paths
need); its transform reduces to the classical shell character sums
(full shells contribute +1 per point coherently when a + b >= m + k,
the shell just below contributes -1/(p-1), deeper shells cancel), so
convolution, scaling, and total variation are exact at any precision
whose group order stays below 2^53.

A finite quotient cannot carry an exact nontrivial fixed point of
mu = T(mu) * S(mu): the slowest dual shell always folds onto the trivial
character.  The stable constructor therefore defaults its scale so that
the one-shell defect sits a couple of decades below the verification
tolerance and keeps shrinking as k grows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Union

import numpy as np

__all__ = [
    "PAdicQuotient",
    "QuotientMeasure",
    "RadialMeasure",
    "UnitModulusReport",
    "padic_norm",
    "convolve",
    "transform",
    "apply_scaling",
    "scaling_resolution_loss",
    "tv_distance",
    "padic_stable",
    "padic_stable_radial",
    "default_stable_exponent",
    "resolution_anchored_constant",
    "autophage_residual_padic",
    "unit_modulus_subgroup",
]

DENSE_CAP = 1_000_000
EXACT_ORDER_CAP = 2**53


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    f = 3
    while f * f <= p:
        if p % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class PAdicQuotient:
    """The cyclic group p^{-m} Z_p / p^k Z_p with its valuation bookkeeping."""

    p: int
    m: int
    k: int

    def __post_init__(self):
        if not _is_prime(self.p):
            raise ValueError(f"p must be prime, got {self.p}")
        if self.m < 0:
            raise ValueError(f"m must be nonnegative, got {self.m}")
        if self.k < 1:
            raise ValueError(f"k must be positive, got {self.k}")

    @property
    def depth(self) -> int:
        return self.m + self.k

    @property
    def order(self) -> int:
        return self.p**self.depth

    def valuation(self, index: int) -> int:
        """v_p of the representing integer; the zero class reports depth."""
        n = int(index) % self.order
        if n == 0:
            return self.depth
        v = 0
        while n % self.p == 0:
            n //= self.p
            v += 1
        return v

    def norm_of_index(self, index: int) -> float:
        """|x|_p for the element x = index * p^{-m}; 0.0 for the zero class."""
        v = self.valuation(index)
        if v == self.depth:
            return 0.0
        return float(self.p) ** (self.m - v)

    def dual_norm_of_index(self, w: int) -> float:
        """|y|_p for the dual element y = w * p^{-k}; 0.0 for the zero class."""
        v = self.valuation(w)
        if v == self.depth:
            return 0.0
        return float(self.p) ** (self.k - v)

    def index_for_valuation(self, j: int) -> int:
        """The index of the element with value p^j (requires -m <= j < k)."""
        if not -self.m <= j < self.k:
            raise ValueError(f"value p^{j} is not representable for m={self.m}, k={self.k}")
        return self.p ** (self.m + j)

    def shell_counts(self) -> np.ndarray:
        """Element counts per valuation shell a = 0..depth (last is the zero class)."""
        if self.order > EXACT_ORDER_CAP:
            raise ValueError("group order exceeds 2^53; exact float counts unavailable")
        counts = np.empty(self.depth + 1)
        for a in range(self.depth):
            counts[a] = float(self.p ** (self.depth - a) - self.p ** (self.depth - a - 1))
        counts[self.depth] = 1.0
        return counts


def _index_valuations(quotient: PAdicQuotient) -> np.ndarray:
    order = quotient.order
    vals = np.zeros(order, dtype=np.int64)
    pw, a = quotient.p, 1
    while pw <= order:
        vals[::pw] = a
        pw *= quotient.p
        a += 1
    vals[0] = quotient.depth
    return vals


def _clean_weights(raw: np.ndarray, what: str, dust: float = 1e-12) -> np.ndarray:
    w = np.array(raw, dtype=float)
    if w.min() < -dust:
        raise ValueError(f"{what} has negative weight {w.min():.3e}")
    w[w < 0] = 0.0
    total = w.sum()
    if abs(total - 1.0) > 1e-9:
        raise ValueError(f"{what} has total mass {total!r}, expected 1")
    return w


@dataclass(frozen=True)
class QuotientMeasure:
    """Dense probability weights, one per group element."""

    quotient: PAdicQuotient
    weights: np.ndarray

    def __post_init__(self):
        if self.quotient.order > DENSE_CAP:
            raise ValueError(
                f"group order {self.quotient.order} exceeds the dense cap {DENSE_CAP}; "
                "use RadialMeasure"
            )
        w = _clean_weights(self.weights, "measure")
        if w.shape != (self.quotient.order,):
            raise ValueError(f"weights must have length {self.quotient.order}, got {w.shape}")
        w.flags.writeable = False
        object.__setattr__(self, "weights", w)

    @classmethod
    def point(cls, quotient: PAdicQuotient, index: int) -> "QuotientMeasure":
        w = np.zeros(quotient.order)
        w[int(index) % quotient.order] = 1.0
        return cls(quotient, w)

    @classmethod
    def haar_ball(cls, quotient: PAdicQuotient, j: int = 0) -> "QuotientMeasure":
        """Haar measure of p^j Z_p (as a subgroup of the quotient); j in [-m, k]."""
        if not -quotient.m <= j <= quotient.k:
            raise ValueError(f"ball exponent {j} outside [{-quotient.m}, {quotient.k}]")
        stride = quotient.p ** (quotient.m + j)
        w = np.zeros(quotient.order)
        w[::stride] = stride / quotient.order
        return cls(quotient, w)

    def to_radial(self) -> "RadialMeasure":
        vals = _index_valuations(self.quotient)
        masses = np.bincount(vals, weights=self.weights, minlength=self.quotient.depth + 1)
        return RadialMeasure(self.quotient, masses)

    def to_dict(self) -> dict:
        return {
            "p": self.quotient.p,
            "m": self.quotient.m,
            "k": self.quotient.k,
            "weights": self.weights.tolist(),
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "QuotientMeasure":
        missing = {"p", "m", "k", "weights"} - set(payload)
        if missing:
            raise ValueError(f"missing keys {sorted(missing)} in measure payload")
        q = PAdicQuotient(int(payload["p"]), int(payload["m"]), int(payload["k"]))
        return cls(q, np.array(payload["weights"], dtype=float))


@lru_cache(maxsize=32)
def _shell_character_table(p: int, depth: int) -> np.ndarray:
    """C[a, b] = normalized shell-a character average at dual valuation b."""
    c = np.zeros((depth + 1, depth + 1))
    for a in range(depth + 1):
        for b in range(depth + 1):
            if a + b >= depth:
                c[a, b] = 1.0
            elif a + b == depth - 1:
                c[a, b] = -1.0 / (p - 1)
    c.flags.writeable = False
    return c


@dataclass(frozen=True)
class RadialMeasure:
    """Unit-invariant measure stored as one mass per valuation shell.

    shell_masses[a] is the total mass on elements of valuation a, with the
    final entry the zero-class mass.  Exact for measures invariant under
    the unit group, at any order up to 2^53.
    """

    quotient: PAdicQuotient
    shell_masses: np.ndarray

    def __post_init__(self):
        if self.quotient.order > EXACT_ORDER_CAP:
            raise ValueError("group order exceeds 2^53; shell counts lose exactness")
        masses = _clean_weights(self.shell_masses, "radial measure")
        if masses.shape != (self.quotient.depth + 1,):
            raise ValueError(
                f"shell_masses must have length {self.quotient.depth + 1}, got {masses.shape}"
            )
        masses.flags.writeable = False
        object.__setattr__(self, "shell_masses", masses)

    @classmethod
    def point_at_zero(cls, quotient: PAdicQuotient) -> "RadialMeasure":
        masses = np.zeros(quotient.depth + 1)
        masses[quotient.depth] = 1.0
        return cls(quotient, masses)

    @classmethod
    def haar_ball(cls, quotient: PAdicQuotient, j: int = 0) -> "RadialMeasure":
        if not -quotient.m <= j <= quotient.k:
            raise ValueError(f"ball exponent {j} outside [{-quotient.m}, {quotient.k}]")
        start = quotient.m + j
        counts = quotient.shell_counts()
        size = float(quotient.p) ** (quotient.depth - start)
        masses = np.zeros(quotient.depth + 1)
        masses[start:] = counts[start:] / size
        return cls(quotient, masses)

    def to_dense(self) -> QuotientMeasure:
        counts = self.quotient.shell_counts()
        vals = _index_valuations(self.quotient)
        per_element = self.shell_masses / counts
        return QuotientMeasure(self.quotient, per_element[vals])

    def to_dict(self) -> dict:
        return {
            "p": self.quotient.p,
            "m": self.quotient.m,
            "k": self.quotient.k,
            "shell_masses": self.shell_masses.tolist(),
        }


Measure = Union[QuotientMeasure, RadialMeasure]


def padic_norm(quotient: PAdicQuotient, index: int) -> float:
    """The p-adic absolute value of the element represented by index."""
    return quotient.norm_of_index(index)


def _require_same_quotient(mu: Measure, nu: Measure) -> None:
    if type(mu) is not type(nu):
        raise TypeError("measures must share a representation (both dense or both radial)")
    if mu.quotient != nu.quotient:
        raise ValueError("measures live on different quotients")


def transform(mu: Measure) -> np.ndarray:
    """Fourier transform of the measure.

    Dense input: one complex value per dual index w (length = group
    order).  Radial input: one real value per dual valuation shell
    b = 0..depth, the last entry being the trivial character.
    """
    if isinstance(mu, QuotientMeasure):
        return mu.quotient.order * np.fft.ifft(mu.weights)
    c = _shell_character_table(mu.quotient.p, mu.quotient.depth)
    return mu.shell_masses @ c


def _radial_from_dual(quotient: PAdicQuotient, dual_values: np.ndarray) -> np.ndarray:
    counts = quotient.shell_counts()
    c = _shell_character_table(quotient.p, quotient.depth)
    return counts * (c @ (counts * dual_values)) / float(quotient.order)


def convolve(mu: Measure, nu: Measure) -> Measure:
    """Group convolution; exact up to float rounding in either representation."""
    _require_same_quotient(mu, nu)
    if isinstance(mu, QuotientMeasure):
        spec = np.fft.fft(mu.weights) * np.fft.fft(nu.weights)
        return QuotientMeasure(mu.quotient, np.fft.ifft(spec).real)
    vals = transform(mu) * transform(nu)
    return RadialMeasure(mu.quotient, _radial_from_dual(mu.quotient, vals))


def _check_scaling(quotient: PAdicQuotient, u: int, j: int) -> None:
    if j < 1:
        raise ValueError(f"scaling exponent must be at least 1, got {j}")
    if j > quotient.k:
        raise ValueError(
            f"precision exhausted: scaling exponent {j} exceeds the truncation depth k={quotient.k}, "
            f"so all mass would collapse below resolution p^-{quotient.k}"
        )
    if int(u) % quotient.p == 0:
        raise ValueError(f"u={u} is not a unit (it is divisible by p={quotient.p})")


def apply_scaling(mu: Measure, u: int = 1, j: int = 1) -> Measure:
    """Pushforward under x -> p^j u x; support norms shrink by p^{-j}.

    Mass on elements whose image falls below the resolution p^{-k} folds
    into the zero class, which is the correct projection of the true
    pushforward onto the quotient's sigma-algebra.  Radial measures
    ignore u: units permute each shell within itself.
    """
    _check_scaling(mu.quotient, u, j)
    if isinstance(mu, QuotientMeasure):
        order = mu.quotient.order
        mult = (int(u) * mu.quotient.p**j) % order
        idx = (np.arange(order, dtype=np.int64) * mult) % order
        return QuotientMeasure(mu.quotient, np.bincount(idx, weights=mu.weights, minlength=order))
    depth = mu.quotient.depth
    masses = np.zeros(depth + 1)
    for a in range(depth + 1):
        masses[min(a + j, depth)] += mu.shell_masses[a]
    return RadialMeasure(mu.quotient, masses)


def scaling_resolution_loss(mu: Measure, u: int = 1, j: int = 1) -> float:
    """Mass that x -> p^j u x would fold from nonzero classes into zero.

    The pushforward itself is exact on the quotient; this reports how much
    formerly resolvable mass drops below the resolution p^{-k}, the
    quantity to gate on when the quotient stands in for the full group.
    """
    _check_scaling(mu.quotient, u, j)
    depth = mu.quotient.depth
    if isinstance(mu, QuotientMeasure):
        vals = _index_valuations(mu.quotient)
        folded = (vals >= depth - j) & (vals < depth)
        return float(mu.weights[folded].sum())
    return float(mu.shell_masses[depth - j : depth].sum())


def tv_distance(mu: Measure, nu: Measure) -> float:
    """Total variation distance, half the sum of absolute weight differences.

    For two radial measures the shell-mass differences already equal the
    elementwise sums, so the radial value is the exact full TV distance.
    """
    _require_same_quotient(mu, nu)
    if isinstance(mu, QuotientMeasure):
        return float(0.5 * np.abs(mu.weights - nu.weights).sum())
    return float(0.5 * np.abs(mu.shell_masses - nu.shell_masses).sum())


def default_stable_exponent(p: int) -> float:
    """The exponent r with 2 p^{-r} = 1, which the pair T = S = (p .) fixes."""
    return math.log(2.0) / math.log(p)


def resolution_anchored_constant(quotient: PAdicQuotient, r: float) -> float:
    """Scale constant tied to the truncation depth.

    The contraction pair folds the slowest dual shell (|y| = p^{1-m}) onto
    the trivial character, leaving a one-shell defect of roughly
    (1 - 1/p) * c * p^{(1-m) r}.  Anchoring c at p^{-r (k+8)} keeps that
    defect well under 1e-6 at the default precision and divides it by
    p^{2r} >= 2 for every two extra digits of k.
    """
    if r <= 0:
        raise ValueError(f"exponent must be positive, got {r}")
    return float(quotient.p) ** (-r * (quotient.k + 8))


def _stable_params(
    quotient: PAdicQuotient, r: Optional[float], c: Optional[float]
) -> tuple[float, float]:
    rr = default_stable_exponent(quotient.p) if r is None else float(r)
    if rr <= 0:
        raise ValueError(f"exponent must be positive, got {rr}")
    cc = resolution_anchored_constant(quotient, rr) if c is None else float(c)
    if cc <= 0:
        raise ValueError(f"scale constant must be positive, got {cc}")
    return rr, cc


def padic_stable(
    quotient: PAdicQuotient, r: Optional[float] = None, c: Optional[float] = None
) -> QuotientMeasure:
    """Dense measure with transform exp(-c |y|_p^r) on the dual.

    Defaults: r solves 2 p^{-r} = 1 (the autophage exponent for
    T = S = (p .)) and c is resolution-anchored.  Raises if truncation
    drives any weight below -1e-9; smaller negative dust is zeroed and
    the weights renormalized.
    """
    rr, cc = _stable_params(quotient, r, c)
    vals = _index_valuations(quotient)
    dual_norm = np.where(
        vals == quotient.depth, 0.0, float(quotient.p) ** (quotient.k - vals.astype(float))
    )
    phi = np.exp(-cc * dual_norm**rr)
    raw = np.fft.fft(phi).real / quotient.order
    if raw.min() < -1e-9:
        raise ValueError(
            f"truncation produced weight {raw.min():.3e}; increase m and k"
        )
    raw[raw < 0] = 0.0
    return QuotientMeasure(quotient, raw / raw.sum())


def padic_stable_radial(
    quotient: PAdicQuotient, r: Optional[float] = None, c: Optional[float] = None
) -> RadialMeasure:
    """Radial form of padic_stable; exact at orders far beyond the dense cap."""
    rr, cc = _stable_params(quotient, r, c)
    depth = quotient.depth
    b = np.arange(depth + 1, dtype=float)
    dual_norm = np.where(b == depth, 0.0, float(quotient.p) ** (quotient.k - b))
    phi = np.exp(-cc * dual_norm**rr)
    masses = _radial_from_dual(quotient, phi)
    if masses.min() < -1e-9:
        raise ValueError(
            f"truncation produced shell mass {masses.min():.3e}; increase m and k"
        )
    masses[masses < 0] = 0.0
    return RadialMeasure(quotient, masses / masses.sum())


def autophage_residual_padic(
    mu: Measure,
    first: tuple[int, int] = (1, 1),
    second: tuple[int, int] = (1, 1),
) -> float:
    """TV distance between mu and T(mu) * S(mu) for T = (p^j1 u1 .), S likewise."""
    u1, j1 = first
    u2, j2 = second
    pushed1 = apply_scaling(mu, u1, j1)
    pushed2 = apply_scaling(mu, u2, j2)
    return tv_distance(mu, convolve(pushed1, pushed2))


@dataclass(frozen=True)
class UnitModulusReport:
    """The dual subgroup K where the transform keeps modulus 1.

    size is |K|; generator is a divisor of the group order generating K
    (0 stands for the trivial subgroup {0}); full means K = {0}, the
    fullness verdict at this precision.  fixed_under_pair and
    forces_trivial describe K under the dual action of the contraction
    pair: whether T*(K) + S*(K) = K, and whether iterating that action
    ends at {0}.
    """

    size: int
    generator: int
    full: bool
    fixed_under_pair: bool
    forces_trivial: bool
    members: Optional[np.ndarray]


def _subgroup_dynamics(
    order: int, gen: int, first: tuple[int, int], second: tuple[int, int], p: int
) -> tuple[bool, bool]:
    t1 = int(first[0]) * p ** int(first[1])
    t2 = int(second[0]) * p ** int(second[1])

    def step(g: int) -> int:
        return math.gcd(g * math.gcd(t1, t2), order)

    fixed = step(gen) == gen
    g = gen
    for _ in range(2 * order.bit_length()):
        ng = step(g)
        if ng == g:
            break
        g = ng
    return fixed, g == order


def unit_modulus_subgroup(
    mu: Measure,
    first: tuple[int, int] = (1, 1),
    second: tuple[int, int] = (1, 1),
    tol: float = 1e-9,
) -> UnitModulusReport:
    """Find K = {w : |mu^(w)| >= 1 - tol} and verify it is a subgroup.

    The measure is full at this precision exactly when K = {0}.  In a
    cyclic group every subgroup is the set of multiples of one divisor,
    so closure is checked structurally and violations raise.
    """
    order = mu.quotient.order
    if isinstance(mu, QuotientMeasure):
        mod = np.abs(transform(mu))
        members = np.flatnonzero(mod >= 1.0 - tol)
        size = int(members.size)
        if size == 0 or order % size or not np.array_equal(
            members, (order // size) * np.arange(size, dtype=members.dtype)
        ):
            raise ValueError(
                "unit-modulus set is not closed under addition; "
                "the transform is numerically inconsistent"
            )
        gen = order // size
        out_members = members
    else:
        vals = np.abs(transform(mu))
        depth = mu.quotient.depth
        flagged = vals >= 1.0 - tol
        if not flagged[depth]:
            raise ValueError("trivial character lost modulus 1; transform inconsistent")
        b0 = int(np.flatnonzero(flagged).min())
        if not flagged[b0:].all():
            raise ValueError(
                "unit-modulus set is not closed under addition; "
                "the transform is numerically inconsistent"
            )
        gen = mu.quotient.p**b0
        size = order // gen
        out_members = (
            gen * np.arange(size, dtype=np.int64) if size <= 4096 else None
        )
    fixed, forced = _subgroup_dynamics(order, gen, first, second, mu.quotient.p)
    return UnitModulusReport(
        size=size,
        generator=0 if gen == order else gen,
        full=(size == 1),
        fixed_under_pair=fixed,
        forces_trivial=forced,
        members=out_members,
    )
