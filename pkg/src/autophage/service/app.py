"""HTTP wrapper around the core verification routines.

Run with:  uvicorn autophage.service.app:app

Every endpoint is a stateless call into the library.  Precondition
violations surface as 422 with the library's message; out-of-tolerance
results come back as normal responses with passed=false so callers can
distinguish bad inputs from failed checks.
"""

from __future__ import annotations

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from ..charfn import autophage_residual, default_points, fullness_check, semistable_residual
from ..decay import (
    decay_profile,
    integrability_estimate,
    solve_exponent_many,
    verify_bound,
)
from ..density import GridDensity, invert_to_density
from ..charfn import GridSpec
from ..gaussian import covariance_residual, gaussian_cofactor, stationary_covariance_space
from ..padic import (
    PAdicQuotient,
    QuotientMeasure,
    RadialMeasure,
    autophage_residual_padic,
    default_stable_exponent,
    padic_stable,
    padic_stable_radial,
    resolution_anchored_constant,
    unit_modulus_subgroup,
)
from ..sampler import infinitesimality_profile, tree_sample
from . import schemas as s


def create_app() -> FastAPI:
    app = FastAPI(
        title="autophage",
        description="Verification service for measures fixed by contracted self-convolution.",
        version="0.1.0",
    )

    @app.exception_handler(ValueError)
    async def _value_error(request: Request, exc: ValueError) -> JSONResponse:
        return JSONResponse(status_code=422, content={"detail": str(exc)})

    @app.get("/health", response_model=s.HealthResponse)
    def health() -> s.HealthResponse:
        return s.HealthResponse(status="ok")

    @app.post("/gaussian/cofactor", response_model=s.CofactorResponse)
    def cofactor(req: s.CofactorRequest) -> s.CofactorResponse:
        form = np.array(req.P, dtype=float)
        contraction = np.array(req.T, dtype=float)
        out = gaussian_cofactor(form, contraction)
        return s.CofactorResponse(
            S=out.tolist(),
            residual=float(covariance_residual(form, contraction, out)),
        )

    @app.post("/gaussian/stationary", response_model=s.StationaryResponse)
    def stationary(req: s.StationaryRequest) -> s.StationaryResponse:
        basis = stationary_covariance_space(
            np.array(req.T, dtype=float), np.array(req.S, dtype=float), tol=req.tol
        )
        return s.StationaryResponse(
            dimension=len(basis), basis=[b.tolist() for b in basis]
        )

    @app.post("/verify/autophage", response_model=s.ResidualResponse)
    def verify_autophage(req: s.AutophageRequest) -> s.ResidualResponse:
        model = s.to_model(req.model)
        points = default_points(model.dim, count=req.count, half_width=req.half_width)
        residual = float(
            autophage_residual(
                model,
                np.array(req.first, dtype=float),
                np.array(req.second, dtype=float),
                points=points,
            )
        )
        return s.ResidualResponse(
            residual=residual, tolerance=req.tolerance, passed=residual <= req.tolerance
        )

    @app.post("/verify/semistable", response_model=s.SemistableResponse)
    def verify_semistable(req: s.SemistableRequest) -> s.SemistableResponse:
        model = s.to_model(req.model)
        points = default_points(model.dim, count=req.count, half_width=req.half_width)
        residual = float(
            semistable_residual(
                model, np.array(req.contraction, dtype=float), req.n, points=points
            )
        )
        passed = residual <= req.tolerance
        return s.SemistableResponse(
            residual=residual,
            tolerance=req.tolerance,
            passed=passed,
            autophage_with_self=bool(req.n == 2 and passed),
        )

    @app.post("/verify/fullness", response_model=s.FullnessResponse)
    def verify_fullness(req: s.FullnessRequest) -> s.FullnessResponse:
        report = fullness_check(s.to_model(req.model), tol=req.tolerance)
        witness = None if report.witness is None else [float(x) for x in report.witness]
        return s.FullnessResponse(
            full=report.full, modulus=float(report.modulus), witness=witness
        )

    @app.post("/decay/exponent", response_model=s.ExponentResponse)
    def decay_exponent(req: s.ExponentRequest) -> s.ExponentResponse:
        return s.ExponentResponse(r=float(solve_exponent_many(req.norms)))

    @app.post("/decay/profile", response_model=s.DecayProfileResponse)
    def decay_profile_route(req: s.DecayProfileRequest) -> s.DecayProfileResponse:
        profile = decay_profile(
            s.to_model(req.model),
            np.array(req.first, dtype=float),
            np.array(req.second, dtype=float),
            directions=req.directions,
            radii=req.radii,
        )
        return s.DecayProfileResponse(
            t=profile.t, s=profile.s, r=profile.r, c=profile.c, sampled=profile.sampled
        )

    @app.post("/decay/bound", response_model=s.BoundResponse)
    def decay_bound(req: s.BoundRequest) -> s.BoundResponse:
        model = s.to_model(req.model)
        check = verify_bound(
            model,
            req.r,
            req.c,
            rays=req.rays,
            radii=req.radii,
            radius_range=(1.0, req.radius_max),
            tol=req.tolerance,
        )
        return s.BoundResponse(
            violations=len(check.violations),
            max_excess=float(check.max_excess),
            ok=check.ok,
            integrability_bound=float(integrability_estimate(req.r, req.c, model.dim)),
        )

    @app.post("/density/invert", response_model=s.DensityResponse)
    def density_invert(req: s.DensityRequest) -> s.DensityResponse:
        model = s.to_model(req.model)
        grid = GridSpec(dim=model.dim, half_width=req.half_width, per_axis=req.per_axis)
        dens: GridDensity = invert_to_density(
            model,
            grid,
            boundary_tol=req.boundary_tol,
            ringing_tol=req.ringing_tol,
            mass_tol=req.mass_tol,
            oversample=req.oversample,
        )
        return s.DensityResponse(
            origin_density=float(dens.value_at_origin()),
            total_mass=float(dens.total_mass),
            sup_value=float(dens.sup_value),
            min_value=float(dens.min_value),
            x_spacing=float(dens.spacing),
        )

    @app.post("/sample/tree", response_model=s.SampleResponse)
    def sample_tree(req: s.SampleRequest) -> s.SampleResponse:
        batch = tree_sample(
            np.array(req.first, dtype=float),
            np.array(req.second, dtype=float),
            s.to_seed(req.seed),
            req.depth,
            req.count,
            rng_seed=req.rng_seed,
        )
        return s.SampleResponse(
            points=batch.points.tolist(), depth=batch.depth, count=batch.count
        )

    @app.post("/sample/infinitesimal", response_model=s.InfinitesimalResponse)
    def sample_infinitesimal(req: s.InfinitesimalRequest) -> s.InfinitesimalResponse:
        profile = infinitesimality_profile(
            np.array(req.first, dtype=float),
            np.array(req.second, dtype=float),
            s.to_seed(req.seed),
            req.epsilon,
            req.n_max,
            req.count,
            rng_seed=req.rng_seed,
        )
        return s.InfinitesimalResponse(
            epsilon=profile.epsilon,
            count=profile.count,
            rng_seed=profile.rng_seed,
            p=list(profile.p),
        )

    @app.post("/padic/verify", response_model=s.PadicResponse)
    def padic_verify(req: s.PadicRequest) -> s.PadicResponse:
        quotient = PAdicQuotient(p=req.p, m=req.m, k=req.k)
        if req.measure == "haar":
            r = c = None
            if req.representation == "dense":
                measure = QuotientMeasure.haar_ball(quotient, 0)
            else:
                measure = RadialMeasure.haar_ball(quotient, 0)
        else:
            r = default_stable_exponent(req.p) if req.r is None else req.r
            c = resolution_anchored_constant(quotient, r) if req.c is None else req.c
            if req.representation == "dense":
                measure = padic_stable(quotient, r, c)
            else:
                measure = padic_stable_radial(quotient, r, c)
        first = (req.first.u, req.first.j)
        second = (req.second.u, req.second.j)
        residual = float(autophage_residual_padic(measure, first, second))
        report = unit_modulus_subgroup(measure, first, second)
        return s.PadicResponse(
            residual=residual,
            tolerance=req.tolerance,
            passed=residual <= req.tolerance,
            r=r,
            c=c,
            unit_modulus=s.UnitModulusPayload(
                generator=int(report.generator),
                subgroup_order=int(report.size),
                full=bool(report.full),
                fixed_under_pair=bool(report.fixed_under_pair),
                forces_trivial=bool(report.forces_trivial),
            ),
        )

    return app


app = create_app()
