"""Autophage Gaussian measures via the square-root cofactor construction.

A centered Gaussian with cf ``exp(-<P v, v>)`` satisfies the convolution
identity mu = T(mu) * S(mu) exactly when ``T P T^T + S P S^T = P``.  For a
symmetric strict contraction T commuting with P, the choice
``S = principal square root of I - T^2`` makes the left side collapse to
``(T^2 + S^2) P = P``, so the pair (T, S) always works.  This module
builds that cofactor, measures the fixed-point residual, and computes the
space of all covariance forms stationary under a given pair.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linops import MatrixLike, _as_matrix, commutation_tolerance, operator_norm

__all__ = [
    "GaussianSpec",
    "gaussian_cofactor",
    "covariance_residual",
    "stationary_covariance_space",
]


def _require_symmetric(m: np.ndarray, name: str, tol: float = 1e-12) -> np.ndarray:
    asym = operator_norm(m - m.T)
    if asym > tol * (1.0 + operator_norm(m)):
        raise ValueError(f"{name} must be symmetric; asymmetry norm is {asym:.3e}")
    return (m + m.T) / 2


def gaussian_cofactor(form: MatrixLike, contraction: MatrixLike) -> np.ndarray:
    """Return the unique symmetric positive-definite square root of I - T^2.

    Requires the contraction to be symmetric, invertible, of operator norm
    below 1, and commuting with the covariance form.  The result commutes
    with both inputs (it is a spectral function of the contraction) and
    closes the identity T P T^T + S P S^T = P.
    """
    p = _as_matrix(form, "form")
    t = _as_matrix(contraction, "contraction")
    if p.shape != t.shape:
        raise ValueError(f"form is {p.shape[0]}x{p.shape[0]} but contraction is {t.shape[0]}x{t.shape[0]}")
    p = _require_symmetric(p, "form")
    t = _require_symmetric(t, "contraction")
    norm_t = operator_norm(t)
    if norm_t >= 1.0:
        raise ValueError(f"contraction norm {norm_t:.6f} is not below 1, so I - T^2 degenerates")
    comm = operator_norm(t @ p - p @ t)
    if comm > commutation_tolerance(t, p):
        raise ValueError(f"contraction and form do not commute: commutator norm {comm:.3e}")
    evals, vecs = np.linalg.eigh(t)
    if np.abs(evals).min() < 1e-14:
        raise ValueError("contraction is singular; the construction needs an invertible map")
    root = (vecs * np.sqrt(1.0 - evals**2)) @ vecs.T
    return (root + root.T) / 2


def covariance_residual(form: MatrixLike, first: MatrixLike, second: MatrixLike) -> float:
    """Operator norm of T P T^T + S P S^T - P; zero certifies the identity."""
    p = _as_matrix(form, "form")
    t = _as_matrix(first, "first map")
    s = _as_matrix(second, "second map")
    if not (p.shape == t.shape == s.shape):
        raise ValueError("form and both maps must share one dimension")
    return operator_norm(t @ p @ t.T + s @ p @ s.T - p)


def _symmetric_basis(dim: int) -> list[np.ndarray]:
    basis = []
    for i in range(dim):
        e = np.zeros((dim, dim))
        e[i, i] = 1.0
        basis.append(e)
    inv_sqrt2 = 1.0 / np.sqrt(2.0)
    for i in range(dim):
        for j in range(i + 1, dim):
            e = np.zeros((dim, dim))
            e[i, j] = e[j, i] = inv_sqrt2
            basis.append(e)
    return basis


def stationary_covariance_space(
    first: MatrixLike, second: MatrixLike, *, tol: float = 1e-8
) -> tuple[np.ndarray, ...]:
    """Orthonormal basis of symmetric Q with T Q T^T + S Q S^T = Q.

    The map is linearized on the d(d+1)/2-dimensional space of symmetric
    matrices (orthonormal in the trace inner product) and the basis spans
    its fixed subspace; an empty tuple means only Q = 0 is stationary.
    """
    t = _as_matrix(first, "first map")
    s = _as_matrix(second, "second map")
    if t.shape != s.shape:
        raise ValueError("maps must share one dimension")
    basis = _symmetric_basis(t.shape[0])
    n = len(basis)
    action = np.empty((n, n))
    for col, b in enumerate(basis):
        image = t @ b @ t.T + s @ b @ s.T
        for row, e in enumerate(basis):
            action[row, col] = float((image * e).sum())
    _, sv, vt = np.linalg.svd(action - np.eye(n))
    fixed_coords = vt[sv <= tol]
    out = []
    for coords in fixed_coords:
        q = np.zeros_like(t)
        for c, b in zip(coords, basis):
            q += c * b
        out.append((q + q.T) / 2)
    return tuple(out)


@dataclass(frozen=True)
class GaussianSpec:
    """A covariance form together with a verified contraction/cofactor pair."""

    form: np.ndarray
    contraction: np.ndarray
    cofactor: np.ndarray

    def __post_init__(self):
        p = _as_matrix(self.form, "form")
        t = _as_matrix(self.contraction, "contraction")
        s = _as_matrix(self.cofactor, "cofactor")
        if not (p.shape == t.shape == s.shape):
            raise ValueError("form, contraction, and cofactor must share one dimension")
        for name, m in (("form", p), ("contraction", t), ("cofactor", s)):
            m = np.array(m, dtype=float)
            m.flags.writeable = False
            object.__setattr__(self, name, m)

    @classmethod
    def build(cls, form: MatrixLike, contraction: MatrixLike) -> "GaussianSpec":
        p = _as_matrix(form, "form")
        t = _as_matrix(contraction, "contraction")
        return cls(form=p, contraction=t, cofactor=gaussian_cofactor(p, t))

    @property
    def residual(self) -> float:
        return covariance_residual(self.form, self.contraction, self.cofactor)

    def to_dict(self) -> dict:
        return {
            "P": self.form.tolist(),
            "T": self.contraction.tolist(),
            "S": self.cofactor.tolist(),
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "GaussianSpec":
        missing = {"P", "T", "S"} - set(payload)
        if missing:
            raise ValueError(f"missing keys {sorted(missing)} in gaussian spec")
        return cls(
            form=np.array(payload["P"], dtype=float),
            contraction=np.array(payload["T"], dtype=float),
            cofactor=np.array(payload["S"], dtype=float),
        )
