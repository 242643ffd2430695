"""Request and response bodies for the verification service.

Matrices travel as row-major nested lists; models as kind-tagged
objects mirroring the JSON files the CLI reads.  Validation of the
mathematical preconditions (symmetry, contraction norms, commutation)
stays in the core library, which raises ValueError; the app maps those
to 422 responses.
"""

from __future__ import annotations

from typing import Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, Field

from .. import io
from ..charfn import CharFnModel
from ..sampler import SeedDistribution

Matrix = list[list[float]]


class GaussianPayload(BaseModel):
    kind: Literal["gaussian"] = "gaussian"
    form: Matrix


class SymStablePayload(BaseModel):
    kind: Literal["sym_stable"] = "sym_stable"
    alpha: float = Field(gt=0.0, le=2.0)
    scale: float = Field(default=1.0, gt=0.0)
    dim: int = Field(default=1, ge=1)


class WordProductPayload(BaseModel):
    kind: Literal["word_product"] = "word_product"
    base: "ModelPayload"
    words: list[Matrix]


class EmpiricalPayload(BaseModel):
    kind: Literal["empirical"] = "empirical"
    samples: list[list[float]]


ModelPayload = Union[
    GaussianPayload, SymStablePayload, WordProductPayload, EmpiricalPayload
]

WordProductPayload.model_rebuild()


def to_model(payload: "ModelPayload") -> CharFnModel:
    return io.model_from_dict(payload.model_dump())


class SeedPayload(BaseModel):
    kind: Literal["gaussian", "uniform", "point"]
    covariance: Optional[Matrix] = None
    half_widths: Optional[list[float]] = None
    location: Optional[list[float]] = None


def to_seed(payload: SeedPayload) -> SeedDistribution:
    if payload.kind == "gaussian":
        if payload.covariance is None:
            raise ValueError("gaussian seed needs a covariance matrix")
        return SeedDistribution.gaussian(np.array(payload.covariance, dtype=float))
    if payload.kind == "uniform":
        if payload.half_widths is None:
            raise ValueError("uniform seed needs half_widths")
        return SeedDistribution.uniform_box(np.array(payload.half_widths, dtype=float))
    if payload.location is None:
        raise ValueError("point seed needs a location")
    return SeedDistribution.point(np.array(payload.location, dtype=float))


class CofactorRequest(BaseModel):
    P: Matrix
    T: Matrix


class CofactorResponse(BaseModel):
    S: Matrix
    residual: float


class StationaryRequest(BaseModel):
    T: Matrix
    S: Matrix
    tol: float = 1e-8


class StationaryResponse(BaseModel):
    dimension: int
    basis: list[Matrix]


class AutophageRequest(BaseModel):
    model: ModelPayload = Field(discriminator="kind")
    first: Matrix
    second: Matrix
    count: int = Field(default=512, ge=2, le=65536)
    half_width: float = Field(default=20.0, gt=0.0)
    tolerance: float = Field(default=1e-10, gt=0.0)


class ResidualResponse(BaseModel):
    residual: float
    tolerance: float
    passed: bool


class SemistableRequest(BaseModel):
    model: ModelPayload = Field(discriminator="kind")
    contraction: Matrix
    n: int = Field(default=2, ge=2)
    count: int = Field(default=512, ge=2, le=65536)
    half_width: float = Field(default=20.0, gt=0.0)
    tolerance: float = Field(default=1e-10, gt=0.0)


class SemistableResponse(BaseModel):
    residual: float
    tolerance: float
    passed: bool
    autophage_with_self: bool


class FullnessRequest(BaseModel):
    model: ModelPayload = Field(discriminator="kind")
    tolerance: float = Field(default=1e-9, gt=0.0)


class FullnessResponse(BaseModel):
    full: bool
    modulus: float
    witness: Optional[list[float]] = None


class ExponentRequest(BaseModel):
    norms: list[float] = Field(min_length=2)


class ExponentResponse(BaseModel):
    r: float


class DecayProfileRequest(BaseModel):
    model: ModelPayload = Field(discriminator="kind")
    first: Matrix
    second: Matrix
    directions: int = Field(default=4096, ge=8, le=65536)
    radii: int = Field(default=64, ge=2, le=4096)


class DecayProfileResponse(BaseModel):
    t: float
    s: float
    r: float
    c: float
    sampled: bool


class BoundRequest(BaseModel):
    model: ModelPayload = Field(discriminator="kind")
    r: float = Field(gt=0.0)
    c: float = Field(gt=0.0)
    rays: int = Field(default=64, ge=1, le=65536)
    radii: int = Field(default=64, ge=1, le=4096)
    radius_max: float = Field(default=20.0, gt=1.0)
    tolerance: float = Field(default=1e-9, gt=0.0)


class BoundResponse(BaseModel):
    violations: int
    max_excess: float
    ok: bool
    integrability_bound: float


class DensityRequest(BaseModel):
    model: ModelPayload = Field(discriminator="kind")
    half_width: float = Field(default=40.0, gt=0.0)
    per_axis: int = Field(default=2048, ge=8)
    oversample: Optional[int] = None
    boundary_tol: float = Field(default=1e-6, gt=0.0)
    ringing_tol: float = Field(default=1e-6, gt=0.0)
    mass_tol: float = Field(default=1e-2, gt=0.0)


class DensityResponse(BaseModel):
    origin_density: float
    total_mass: float
    sup_value: float
    min_value: float
    x_spacing: float


class SampleRequest(BaseModel):
    first: Matrix
    second: Matrix
    seed: SeedPayload
    depth: int = Field(default=12, ge=0, le=24)
    count: int = Field(default=1024, ge=1, le=65536)
    rng_seed: int = 0


class SampleResponse(BaseModel):
    points: list[list[float]]
    depth: int
    count: int


class InfinitesimalRequest(BaseModel):
    first: Matrix
    second: Matrix
    seed: SeedPayload
    epsilon: float = Field(default=0.1, gt=0.0)
    n_max: int = Field(default=20, ge=0, le=24)
    count: int = Field(default=10000, ge=1, le=200000)
    rng_seed: int = 0


class InfinitesimalResponse(BaseModel):
    epsilon: float
    count: int
    rng_seed: int
    p: list[float]


class ScalingPair(BaseModel):
    u: int = 1
    j: int = 1


class PadicRequest(BaseModel):
    p: int = Field(default=5, ge=2)
    m: int = Field(default=4, ge=0)
    k: int = Field(default=10, ge=1)
    r: Optional[float] = None
    c: Optional[float] = None
    measure: Literal["stable", "haar"] = "stable"
    representation: Literal["radial", "dense"] = "radial"
    first: ScalingPair = ScalingPair()
    second: ScalingPair = ScalingPair()
    tolerance: float = Field(default=1e-6, gt=0.0)


class UnitModulusPayload(BaseModel):
    generator: int
    subgroup_order: int
    full: bool
    fixed_under_pair: bool
    forces_trivial: bool


class PadicResponse(BaseModel):
    residual: float
    tolerance: float
    passed: bool
    r: Optional[float]
    c: Optional[float]
    unit_modulus: UnitModulusPayload


class HealthResponse(BaseModel):
    status: str
