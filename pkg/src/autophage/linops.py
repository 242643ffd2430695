"""Commuting contraction pairs and the operator words they generate.

A pair of commuting linear maps (a, b) on R^d generates a semigroup of
words: every finite string over the two generators, composed left to
right.  The submultiplicative norm bound ``|word| <= |a|^i * |b|^j``
(i, j the letter counts) is what makes word norms at a fixed length
shrink geometrically once both maps are strict contractions, and the
rest of the package leans on that decay.  This module carries the map
wrapper, system validation (contraction kind, commutation,
invertibility) and the word enumeration utilities.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence, Union

import numpy as np

__all__ = [
    "LinearMap",
    "OperatorWord",
    "SystemReport",
    "ContractionSystem",
    "CommutationError",
    "operator_norm",
    "spectral_radius",
    "commutator_norm",
    "commutation_tolerance",
    "pair_commutes",
    "validate_system",
    "power_until_strict",
    "enumerate_words",
    "max_word_norm",
]

# Full enumeration of length-n words costs 2^n matrix products; keep a
# hard ceiling and switch to lazy streaming well before it.
WORD_LENGTH_CAP = 24
STREAM_THRESHOLD = 16

MatrixLike = Union["LinearMap", np.ndarray, Sequence[Sequence[float]]]


class CommutationError(ValueError):
    """A pair of maps fails to commute within tolerance."""

    def __init__(self, i: int, j: int, norm: float, tolerance: float):
        self.pair = (i, j)
        self.norm = norm
        self.tolerance = tolerance
        super().__init__(
            f"maps {i} and {j} do not commute: commutator norm {norm:.6e} "
            f"exceeds tolerance {tolerance:.6e}"
        )


def _as_matrix(m: MatrixLike, name: str = "map") -> np.ndarray:
    if isinstance(m, LinearMap):
        return m.entries
    a = np.asarray(m, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise ValueError(f"{name} must be a nonempty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} contains non-finite entries")
    return a


@dataclass(frozen=True)
class LinearMap:
    """A real linear map on R^dim stored as a row-major square matrix."""

    entries: np.ndarray

    def __post_init__(self):
        a = np.array(self.entries, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
            raise ValueError(f"expected a nonempty square matrix, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise ValueError("matrix contains non-finite entries")
        a.flags.writeable = False
        object.__setattr__(self, "entries", a)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def adjoint(self) -> "LinearMap":
        return LinearMap(self.entries.T)

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return self.entries @ np.asarray(x, dtype=float)

    def __matmul__(self, other: "LinearMap") -> "LinearMap":
        return LinearMap(self.entries @ _as_matrix(other))


def operator_norm(m: MatrixLike) -> float:
    """Largest singular value; the norm used throughout the package."""
    return float(np.linalg.svd(_as_matrix(m), compute_uv=False)[0])


def spectral_radius(m: MatrixLike) -> float:
    return float(np.max(np.abs(np.linalg.eigvals(_as_matrix(m)))))


def commutator_norm(a: MatrixLike, b: MatrixLike) -> float:
    x = _as_matrix(a, "first map")
    y = _as_matrix(b, "second map")
    return operator_norm(x @ y - y @ x)


def commutation_tolerance(a: MatrixLike, b: MatrixLike, scale: float = 1e-12) -> float:
    # Absolute floor plus a term covering roundoff on large-norm inputs.
    return scale * (1.0 + operator_norm(a) * operator_norm(b))


def pair_commutes(a: MatrixLike, b: MatrixLike, scale: float = 1e-12) -> bool:
    return commutator_norm(a, b) <= commutation_tolerance(a, b, scale)


def _contraction_kind(a: np.ndarray) -> str:
    if operator_norm(a) < 1.0:
        return "strict"
    if spectral_radius(a) < 1.0:
        return "eventual"
    return "none"


def _is_invertible(a: np.ndarray) -> bool:
    sv = np.linalg.svd(a, compute_uv=False)
    return bool(sv[-1] > sv[0] * a.shape[0] * np.finfo(float).eps * 8)


@dataclass(frozen=True)
class SystemReport:
    """Validation summary for a family of maps."""

    kinds: tuple[str, ...]
    norms: tuple[float, ...]
    spectral_radii: tuple[float, ...]
    invertible: tuple[bool, ...]
    commutator_norms: tuple[tuple[int, int, float], ...]


def validate_system(maps: Sequence[MatrixLike], *, tol_scale: float = 1e-12) -> SystemReport:
    """Classify each map and verify pairwise commutation.

    Every map is reported as ``strict`` (operator norm < 1), ``eventual``
    (spectral radius < 1 despite norm >= 1) or ``none``.  A pair whose
    commutator norm exceeds ``tol_scale * (1 + |a||b|)`` raises
    :class:`CommutationError` naming the offending pair.
    """
    mats = [_as_matrix(m, f"map {i}") for i, m in enumerate(maps)]
    if not mats:
        raise ValueError("expected at least one map")
    dims = {a.shape[0] for a in mats}
    if len(dims) > 1:
        raise ValueError(f"maps act on different dimensions: {sorted(dims)}")

    comms = []
    for i in range(len(mats)):
        for j in range(i + 1, len(mats)):
            norm = commutator_norm(mats[i], mats[j])
            tol = commutation_tolerance(mats[i], mats[j], tol_scale)
            if norm > tol:
                raise CommutationError(i, j, norm, tol)
            comms.append((i, j, norm))

    return SystemReport(
        kinds=tuple(_contraction_kind(a) for a in mats),
        norms=tuple(operator_norm(a) for a in mats),
        spectral_radii=tuple(spectral_radius(a) for a in mats),
        invertible=tuple(_is_invertible(a) for a in mats),
        commutator_norms=tuple(comms),
    )


@dataclass(frozen=True)
class ContractionSystem:
    """A validated family of commuting, invertible contractions."""

    maps: tuple[LinearMap, ...]
    report: SystemReport

    @classmethod
    def from_maps(cls, maps: Sequence[MatrixLike], *, tol_scale: float = 1e-12) -> "ContractionSystem":
        report = validate_system(maps, tol_scale=tol_scale)
        for i, kind in enumerate(report.kinds):
            if kind == "none":
                raise ValueError(
                    f"map {i} is not even eventually contracting "
                    f"(norm {report.norms[i]:.6g}, spectral radius {report.spectral_radii[i]:.6g})"
                )
        for i, ok in enumerate(report.invertible):
            if not ok:
                raise ValueError(f"map {i} is singular")
        return cls(tuple(LinearMap(_as_matrix(m)) for m in maps), report)

    @property
    def dim(self) -> int:
        return self.maps[0].dim


def power_until_strict(m: MatrixLike, cap: int = 100) -> int:
    """Smallest k with |m^k| < 1, or a ValueError once ``cap`` is passed."""
    a = _as_matrix(m)
    power = a.copy()
    for k in range(1, cap + 1):
        if operator_norm(power) < 1.0:
            return k
        power = power @ a
    raise ValueError(f"no power up to {cap} is a strict contraction")


@dataclass(frozen=True)
class OperatorWord:
    """A word over two generators with its composed matrix.

    ``letters`` uses 0 for the first generator and 1 for the second; the
    product composes letters left to right.
    """

    letters: tuple[int, ...]
    product: np.ndarray

    def __post_init__(self):
        a = np.array(self.product, dtype=float)
        a.flags.writeable = False
        object.__setattr__(self, "product", a)
        object.__setattr__(self, "letters", tuple(int(l) for l in self.letters))

    @property
    def length(self) -> int:
        return len(self.letters)

    @property
    def label(self) -> str:
        return "".join("ab"[l] for l in self.letters) or "e"

    def norm(self) -> float:
        return operator_norm(self.product)


def _word_stream(gens: tuple[np.ndarray, np.ndarray], length: int) -> Iterator[OperatorWord]:
    dim = gens[0].shape[0]

    def walk(letters: list[int], product: np.ndarray, remaining: int) -> Iterator[OperatorWord]:
        if remaining == 0:
            yield OperatorWord(tuple(letters), product)
            return
        for i, g in enumerate(gens):
            letters.append(i)
            yield from walk(letters, product @ g, remaining - 1)
            letters.pop()

    yield from walk([], np.eye(dim), length)


def enumerate_words(
    first: MatrixLike, second: MatrixLike, length: int, *, cap: int = WORD_LENGTH_CAP
) -> Union[list[OperatorWord], Iterator[OperatorWord]]:
    """All 2^length words over the generators, in lexicographic order.

    Returns a list for lengths up to 16 and a lazy iterator above that;
    lengths past ``cap`` (default 24) are refused outright.
    """
    a = _as_matrix(first, "first generator")
    b = _as_matrix(second, "second generator")
    if a.shape != b.shape:
        raise ValueError(f"generator shapes differ: {a.shape} vs {b.shape}")
    if length < 0:
        raise ValueError("word length must be nonnegative")
    if length > cap:
        raise ValueError(f"word length {length} exceeds enumeration cap {cap}")
    stream = _word_stream((a, b), length)
    if length > STREAM_THRESHOLD:
        return stream
    return list(stream)


def max_word_norm(
    first: MatrixLike, second: MatrixLike, length: int, *, cap: int = WORD_LENGTH_CAP
) -> float:
    """Largest operator norm among length-n words.

    Always bounded by ``max(|a|, |b|)^n``.  For commuting generators the
    2^n products collapse onto the n+1 letter-count classes, which is the
    path taken whenever the pair commutes within tolerance.
    """
    a = _as_matrix(first, "first generator")
    b = _as_matrix(second, "second generator")
    if a.shape != b.shape:
        raise ValueError(f"generator shapes differ: {a.shape} vs {b.shape}")
    if length < 0:
        raise ValueError("word length must be nonnegative")
    if length == 0:
        return 1.0
    if pair_commutes(a, b):
        a_pows = [np.eye(a.shape[0])]
        for _ in range(length):
            a_pows.append(a_pows[-1] @ a)
        best = 0.0
        b_pow = np.eye(a.shape[0])
        for i in range(length + 1):
            best = max(best, operator_norm(a_pows[length - i] @ b_pow))
            if i < length:
                b_pow = b_pow @ b
        return best
    if length > cap:
        raise ValueError(f"word length {length} exceeds enumeration cap {cap}")
    return max(w.norm() for w in _word_stream((a, b), length))
