"""One-shot command line front end.

Every subcommand reads its inputs, runs the corresponding library call
in process, writes machine-readable artifacts, and exits.  Exit code 0
means verified, 1 means a computed quantity exceeded its tolerance, and
2 means the invocation itself was bad (usage, config, unreadable or
inconsistent inputs).  Artifacts carry no timestamps and use fixed float
formatting, so identical inputs and seeds give byte-identical files.

Flags can also be supplied through --config pointing at a flat JSON
object keyed by flag name (dest); explicit flags override file values,
and unknown keys are rejected by name.  The AUTOPHAGE_OUT_DIR variable
sets the default output directory.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import io
from .charfn import (
    Gaussian,
    GridSpec,
    SymStable,
    autophage_residual,
    default_points,
    semistable_residual,
)
from .decay import (
    DecayProfile,
    decay_profile,
    estimate_constant,
    integrability_estimate,
    inverse_adjoint_norms,
    solve_exponent,
    solve_exponent_many,
    verify_bound,
)
from .density import (
    BoundaryAliasingError,
    MassDefectError,
    NegativeRingingError,
    invert_to_density,
)
from .gaussian import GaussianSpec, covariance_residual, gaussian_cofactor
from .padic import (
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
from .sampler import SeedDistribution, infinitesimality_profile, tree_sample

OUT_DIR_ENV = "AUTOPHAGE_OUT_DIR"


def _artifact_path(args, name: str) -> Path:
    base = args.out_dir if args.out_dir is not None else os.environ.get(OUT_DIR_ENV, ".")
    path = Path(name)
    if not path.is_absolute():
        path = Path(base) / path
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def _load_model(spec: str):
    """Resolve a model flag: a built-in alias or a kind-tagged JSON file."""
    key = spec.strip().lower()
    if key == "cauchy":
        return SymStable(alpha=1.0, scale=1.0, dim=1)
    if key == "gaussian":
        return Gaussian(form=np.eye(1))
    path = Path(spec)
    if not path.exists():
        raise ValueError(
            f"unknown model {spec!r}: use 'cauchy', 'gaussian', or a JSON model file"
        )
    payload = io.read_json(path)
    if not isinstance(payload, dict):
        raise ValueError(f"{path}: model file must hold a JSON object")
    return io.model_from_dict(payload)


def _matrix_arg(value: str, dim_hint: Optional[int], what: str) -> np.ndarray:
    """A float literal means a homothety; anything else is a matrix file."""
    try:
        scale = float(value)
    except ValueError:
        m = io.read_matrix(value)
        if dim_hint is not None and m.shape[0] != dim_hint:
            raise ValueError(f"{what}: expected a {dim_hint}x{dim_hint} matrix, got {m.shape[0]}x{m.shape[1]}")
        return m
    return scale * np.eye(dim_hint if dim_hint is not None else 1)


def _vector_arg(value: str) -> np.ndarray:
    return np.array([float(x) for x in value.split(",")], dtype=float)


def _build_seed(args) -> SeedDistribution:
    kind = args.seed_kind
    if kind == "gaussian":
        try:
            cov = np.array([[float(args.seed_cov)]])
        except ValueError:
            cov = io.read_matrix(args.seed_cov)
        return SeedDistribution.gaussian(cov)
    if kind == "uniform":
        return SeedDistribution.uniform_box(_vector_arg(args.seed_half_width))
    if args.seed_point is None:
        raise ValueError("--seed-point is required when --seed-kind is point")
    return SeedDistribution.point(_vector_arg(args.seed_point))


def _require(sub: argparse.ArgumentParser, args, dest: str, flag: str) -> None:
    if getattr(args, dest) is None:
        sub.error(f"{flag} is required (flag or config)")


def _merge_config(
    parser: argparse.ArgumentParser,
    sub: argparse.ArgumentParser,
    config_path: str,
    argv: list,
):
    """Fold a flat JSON config into the subparser defaults and re-parse.

    Re-parsing with updated defaults is what makes explicit flags win
    over file values without tracking which flags were actually given.
    """
    try:
        payload = io.read_json(config_path)
    except (OSError, json.JSONDecodeError) as exc:
        sub.error(f"cannot read config {config_path}: {exc}")
    if not isinstance(payload, dict):
        sub.error(f"config {config_path} must be a flat JSON object")
    allowed = {a.dest for a in sub._actions} - {"help", "config"}
    for key, value in payload.items():
        if key not in allowed:
            sub.error(f"unknown config key {key!r} in {config_path}")
        if isinstance(value, (dict, list)):
            sub.error(f"config key {key!r} must be a scalar (flat key-value file)")
    sub.set_defaults(**payload)
    return parser.parse_args(argv)


# ---------------------------------------------------------------------------
# subcommand runners


def _cmd_gaussian_cofactor(args) -> int:
    _require(args._sub, args, "P", "--P")
    _require(args._sub, args, "T", "--T")
    form = _matrix_arg(args.P, None, "--P")
    contraction = _matrix_arg(args.T, form.shape[0], "--T")
    cofactor = gaussian_cofactor(form, contraction)
    residual = float(covariance_residual(form, contraction, cofactor))
    out = _artifact_path(args, args.out)
    io.write_json(
        out,
        {
            "P": form.tolist(),
            "T": contraction.tolist(),
            "S": cofactor.tolist(),
            "residual": residual,
        },
    )
    print(f"residual = {residual:.3e} (tolerance {args.tol:g})")
    print(f"wrote {out}")
    return 0 if residual <= args.tol else 1


def _cmd_verify_autophage(args) -> int:
    if args.spec is not None:
        spec = GaussianSpec.from_dict(io.read_json(_as_existing(args.spec)))
        model = Gaussian(form=spec.form)
        first, second = spec.contraction, spec.cofactor
    else:
        _require(args._sub, args, "model", "--model")
        _require(args._sub, args, "T", "--T")
        _require(args._sub, args, "S", "--S")
        model = _load_model(args.model)
        first = _matrix_arg(args.T, model.dim, "--T")
        second = _matrix_arg(args.S, model.dim, "--S")
    points = default_points(model.dim, count=args.count, half_width=args.half_width)
    residual = float(autophage_residual(model, first, second, points=points))
    passed = residual <= args.tol
    out = _artifact_path(args, args.out)
    io.write_json(
        out,
        {
            "residual": residual,
            "tolerance": args.tol,
            "passed": bool(passed),
            "count": int(points.shape[0]),
            "half_width": args.half_width,
        },
    )
    print(f"autophage residual = {residual:.3e} (tolerance {args.tol:g})")
    print("status: ok" if passed else "status: residual exceeds tolerance")
    print(f"wrote {out}")
    return 0 if passed else 1


def _as_existing(path: str) -> Path:
    p = Path(path)
    if not p.exists():
        raise ValueError(f"no such file: {path}")
    return p


def _cmd_decay(args) -> int:
    model = _load_model(args.model) if args.model is not None else None
    use_matrices = args.T is not None or args.S is not None
    if use_matrices and (args.t is not None or args.s is not None):
        args._sub.error("give either --t/--s scalars or --T/--S matrices, not both")

    profile: Optional[DecayProfile] = None
    if use_matrices:
        if args.T is None or args.S is None:
            args._sub.error("--T and --S must be given together")
        dim_hint = model.dim if model is not None else None
        first = _matrix_arg(args.T, dim_hint, "--T")
        second = _matrix_arg(args.S, dim_hint, "--S")
        if model is not None:
            profile = decay_profile(
                model, first, second, directions=args.directions, radii=args.annulus_radii
            )
            t, s, r = profile.t, profile.s, profile.r
        else:
            t, s = inverse_adjoint_norms(first, second)
            r = solve_exponent(t, s)
    else:
        if args.t is None or args.s is None:
            args._sub.error("need --t and --s (or --T and --S matrix files)")
        t, s = args.t, args.s
        r = solve_exponent(t, s)
        if model is not None:
            c = float(
                estimate_constant(
                    model, t, s, r, directions=args.directions, radii=args.annulus_radii
                )
            )
            profile = DecayProfile(t=t, s=s, r=r, c=c)

    print(f"t = {t:.12g}, s = {s:.12g}")
    print(f"r = {round(r, 12)}")

    out = _artifact_path(args, args.out)
    if profile is None:
        io.write_json(out, {"t": float(t), "s": float(s), "r": float(r)})
        print(f"wrote {out}")
        return 0

    check = verify_bound(
        model,
        profile.r,
        profile.c,
        rays=args.rays,
        radii=args.radii,
        radius_range=(1.0, args.radius_max),
        tol=args.bound_tol,
    )
    integrability = float(integrability_estimate(profile.r, profile.c, model.dim))
    payload = profile.to_dict()
    payload["bound"] = {
        "rays": int(check.moduli.shape[0]),
        "radii": int(check.radii.size),
        "radius_max": args.radius_max,
        "tolerance": args.bound_tol,
        "violations": len(check.violations),
        "max_excess": float(check.max_excess),
    }
    payload["integrability_bound"] = integrability
    io.write_json(out, payload)
    table = _artifact_path(args, args.table_out)
    io.write_csv(
        table,
        ["ray", "radius", "modulus", "bound", "margin"],
        check.rows(),
    )
    print(f"c = {profile.c:.12g}")
    print(f"bound violations = {len(check.violations)} (max excess {check.max_excess:.3e})")
    print(f"integrability bound = {integrability:.6g}")
    print(f"wrote {out}")
    print(f"wrote {table}")
    return 0 if check.ok else 1


def _cmd_density(args) -> int:
    _require(args._sub, args, "model", "--model")
    model = _load_model(args.model)
    grid = GridSpec(dim=model.dim, half_width=args.L, per_axis=args.N)
    dens = invert_to_density(
        model,
        grid,
        boundary_tol=args.boundary_tol,
        ringing_tol=args.ringing_tol,
        mass_tol=args.mass_tol,
        oversample=args.oversample,
    )
    out = _artifact_path(args, args.out)
    axis = dens.x_axis()
    if model.dim == 1:
        header = ["x", "density"]
        rows = ((float(axis[i]), float(dens.values[i])) for i in range(axis.size))
    else:
        header = [f"x{i + 1}" for i in range(model.dim)] + ["density"]
        rows = (
            tuple(float(axis[i]) for i in idx) + (float(dens.values[idx]),)
            for idx in np.ndindex(dens.values.shape)
        )
    io.write_csv(out, header, rows)
    meta = _artifact_path(args, args.meta_out)
    io.write_json(
        meta,
        {
            "L": args.L,
            "N": args.N,
            "dim": int(model.dim),
            "x_spacing": float(dens.spacing),
            "origin_density": float(dens.value_at_origin()),
            "total_mass": float(dens.total_mass),
            "sup_value": float(dens.sup_value),
            "min_value": float(dens.min_value),
        },
    )
    print(f"density(0) = {dens.value_at_origin():.6f}")
    print(f"total mass = {dens.total_mass:.6f}")
    print(f"wrote {out}")
    print(f"wrote {meta}")
    return 0


def _cmd_sample(args) -> int:
    _require(args._sub, args, "T", "--T")
    _require(args._sub, args, "S", "--S")
    seed = _build_seed(args)
    first = _matrix_arg(args.T, seed.dim, "--T")
    second = _matrix_arg(args.S, seed.dim, "--S")
    batch = tree_sample(first, second, seed, args.depth, args.count, rng_seed=args.rng_seed)
    out = _artifact_path(args, args.out)
    if seed.dim == 1:
        header = ["x"]
        rows = ((float(v),) for v in batch.points[:, 0])
    else:
        header = [f"x{i + 1}" for i in range(seed.dim)]
        rows = (tuple(float(x) for x in row) for row in batch.points)
    io.write_csv(out, header, rows)
    print(f"wrote {batch.count} samples (depth {batch.depth}, dim {seed.dim}) to {out}")
    return 0


def _cmd_infinitesimal(args) -> int:
    _require(args._sub, args, "T", "--T")
    _require(args._sub, args, "S", "--S")
    seed = _build_seed(args)
    first = _matrix_arg(args.T, seed.dim, "--T")
    second = _matrix_arg(args.S, seed.dim, "--S")
    profile = infinitesimality_profile(
        first, second, seed, args.epsilon, args.n_max, args.count, rng_seed=args.rng_seed
    )
    p = np.asarray(profile.p)
    monotone = bool(np.all(np.diff(p) <= 1e-12))
    payload = profile.to_dict()
    payload["monotone_nonincreasing"] = monotone
    out = _artifact_path(args, args.out)
    io.write_json(out, payload)
    for n, value in enumerate(profile.p):
        print(f"n = {n:2d}  p = {value:.4f}")
    print(f"monotone nonincreasing: {'yes' if monotone else 'no'}")
    print(f"wrote {out}")
    return 0


def _cmd_padic_verify(args) -> int:
    quotient = PAdicQuotient(p=args.p, m=args.m, k=args.k)
    if args.measure == "haar":
        r = c = None
        if args.representation == "dense":
            measure = QuotientMeasure.haar_ball(quotient, 0)
        else:
            measure = RadialMeasure.haar_ball(quotient, 0)
    else:
        r = default_stable_exponent(args.p) if args.r is None else args.r
        c = resolution_anchored_constant(quotient, r) if args.c is None else args.c
        if args.representation == "dense":
            measure = padic_stable(quotient, r, c)
        else:
            measure = padic_stable_radial(quotient, r, c)
    first = (args.u1, args.j1)
    second = (args.u2, args.j2)
    residual = float(autophage_residual_padic(measure, first, second))
    report = unit_modulus_subgroup(measure, first, second)
    passed = residual <= args.tol
    out = _artifact_path(args, args.out)
    io.write_json(
        out,
        {
            "p": args.p,
            "m": args.m,
            "k": args.k,
            "measure": args.measure,
            "representation": args.representation,
            "r": r,
            "c": c,
            "first": [args.u1, args.j1],
            "second": [args.u2, args.j2],
            "residual": residual,
            "tolerance": args.tol,
            "passed": bool(passed),
            "unit_modulus": {
                "generator": int(report.generator),
                "subgroup_order": int(report.size),
                "full": bool(report.full),
                "fixed_under_pair": bool(report.fixed_under_pair),
                "forces_trivial": bool(report.forces_trivial),
            },
        },
    )
    print(f"p = {args.p}, m = {args.m}, k = {args.k} (group order {args.p}^{quotient.depth})")
    if r is not None:
        print(f"r = {r:.12g}, c = {c:.6e}")
    print(f"residual = {residual:.6e} (tolerance {args.tol:g})")
    if report.full:
        print("unit-modulus subgroup: trivial (measure is full at this precision)")
    else:
        print(
            f"unit-modulus subgroup: order {report.size}, generated by dual index {report.generator}"
        )
    print("status: ok" if passed else "status: residual exceeds tolerance")
    print(f"wrote {out}")
    return 0 if passed else 1


def _cmd_semistable_check(args) -> int:
    _require(args._sub, args, "alpha", "--alpha")
    model = SymStable(alpha=args.alpha, scale=args.scale, dim=args.dim)
    t = float(args.n) ** (-1.0 / args.alpha)
    contraction = t * np.eye(args.dim)
    points = default_points(model.dim, count=args.count, half_width=args.half_width)
    residual = float(semistable_residual(model, contraction, args.n, points=points))
    passed = residual <= args.tol
    print(f"semistable residual = {residual:.3e} (n = {args.n}, tolerance {args.tol:g})")
    if args.n == 2 and passed:
        print("autophage with S = T")

    r = solve_exponent_many([t] * args.n)
    c = float(estimate_constant(model, t, t, r))
    check = verify_bound(model, r, c, rays=args.rays, radii=args.radii)
    integrability = float(integrability_estimate(r, c, model.dim))
    grid = GridSpec(dim=model.dim, half_width=args.L, per_axis=args.N)
    dens = invert_to_density(model, grid, mass_tol=args.mass_tol)
    certified = passed and check.ok

    out = _artifact_path(args, args.out)
    io.write_json(
        out,
        {
            "alpha": args.alpha,
            "n": args.n,
            "scale": args.scale,
            "dim": args.dim,
            "contraction_scale": t,
            "residual": residual,
            "tolerance": args.tol,
            "exponent": float(r),
            "constant": c,
            "bound_violations": len(check.violations),
            "integrability_bound": integrability,
            "density": {
                "origin": float(dens.value_at_origin()),
                "total_mass": float(dens.total_mass),
                "sup_value": float(dens.sup_value),
                "min_value": float(dens.min_value),
            },
            "certified": bool(certified),
        },
    )
    print(f"r = {round(r, 12)}")
    print(f"c = {c:.12g}")
    print(f"bound violations = {len(check.violations)}")
    print(f"density(0) = {dens.value_at_origin():.6f}, mass = {dens.total_mass:.6f}")
    if certified:
        print("certified: bounded continuous density")
    else:
        print("not certified")
    print(f"wrote {out}")
    return 0 if certified else 1


# ---------------------------------------------------------------------------
# parser assembly


def _build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=None, help="flat JSON file of flag values")
    common.add_argument("--out-dir", default=None, help=f"output directory (default ${OUT_DIR_ENV} or .)")

    parser = argparse.ArgumentParser(
        prog="autophage",
        description="Verify and explore measures equal to their own contracted convolution square.",
        allow_abbrev=False,
    )
    sub = parser.add_subparsers(dest="command", required=True)
    registry = {}

    def add(name: str, help_text: str, runner):
        sp = sub.add_parser(name, help=help_text, parents=[common], allow_abbrev=False)
        sp.set_defaults(func=runner)
        registry[name] = sp
        return sp

    sp = add("gaussian-cofactor", "solve for S with T P T^t + S P S^t = P", _cmd_gaussian_cofactor)
    sp.add_argument("--P", default=None, help="covariance form: matrix file or float")
    sp.add_argument("--T", default=None, help="contraction: matrix file or float")
    sp.add_argument("--out", default="cofactor.json")
    sp.add_argument("--tol", type=float, default=1e-10)

    sp = add("verify-autophage", "check phi(v) = phi(T^t v) phi(S^t v) on a grid", _cmd_verify_autophage)
    sp.add_argument("--model", default=None, help="cauchy, gaussian, or a model JSON file")
    sp.add_argument("--T", default=None, help="first contraction: matrix file or float")
    sp.add_argument("--S", default=None, help="second contraction: matrix file or float")
    sp.add_argument("--spec", default=None, help="JSON file with P, T, S (overrides the three flags)")
    sp.add_argument("--count", type=int, default=512)
    sp.add_argument("--half-width", type=float, default=20.0)
    sp.add_argument("--tol", type=float, default=1e-10)
    sp.add_argument("--out", default="verify.json")

    sp = add("decay", "exponent from t^r + s^r = 1, then the tail bound", _cmd_decay)
    sp.add_argument("--t", type=float, default=None, help="inverse adjoint norm of T")
    sp.add_argument("--s", type=float, default=None, help="inverse adjoint norm of S")
    sp.add_argument("--T", default=None, help="matrix file (alternative to --t)")
    sp.add_argument("--S", default=None, help="matrix file (alternative to --s)")
    sp.add_argument("--model", default=None, help="optional model for the annulus constant and bound")
    sp.add_argument("--directions", type=int, default=4096)
    sp.add_argument("--annulus-radii", type=int, default=64)
    sp.add_argument("--rays", type=int, default=64)
    sp.add_argument("--radii", type=int, default=64)
    sp.add_argument("--radius-max", type=float, default=20.0)
    sp.add_argument("--bound-tol", type=float, default=1e-9)
    sp.add_argument("--out", default="decay.json")
    sp.add_argument("--table-out", default="decay_bound.csv")

    sp = add("density", "invert the cf to a density table", _cmd_density)
    sp.add_argument("--model", default=None, help="cauchy, gaussian, or a model JSON file")
    sp.add_argument("--L", type=float, default=40.0, help="frequency window half width")
    sp.add_argument("--N", type=int, default=2048, help="points per axis")
    sp.add_argument("--oversample", type=int, default=None, choices=[1, 2, 4, 8])
    sp.add_argument("--boundary-tol", type=float, default=1e-6)
    sp.add_argument("--ringing-tol", type=float, default=1e-6)
    sp.add_argument("--mass-tol", type=float, default=1e-2)
    sp.add_argument("--out", default="density.csv")
    sp.add_argument("--meta-out", default="density.json")

    def seed_flags(sp):
        sp.add_argument("--T", default=None, help="first contraction: matrix file or float")
        sp.add_argument("--S", default=None, help="second contraction: matrix file or float")
        sp.add_argument("--seed-kind", choices=["gaussian", "uniform", "point"], default="gaussian")
        sp.add_argument("--seed-cov", default="1.0", help="gaussian seed covariance: float or matrix file")
        sp.add_argument("--seed-half-width", default="1.0", help="uniform seed half widths, comma separated")
        sp.add_argument("--seed-point", default=None, help="point seed location, comma separated")
        sp.add_argument("--count", type=int, default=4096)
        sp.add_argument("--rng-seed", type=int, default=0)

    sp = add("sample", "draw replicates of the depth-n word sum", _cmd_sample)
    seed_flags(sp)
    sp.add_argument("--depth", type=int, default=12)
    sp.add_argument("--out", default="samples.csv")

    sp = add("infinitesimal", "estimate the triangular-array tail profile p_n", _cmd_infinitesimal)
    seed_flags(sp)
    sp.add_argument("--epsilon", type=float, default=0.1)
    sp.add_argument("--n-max", type=int, default=20)
    sp.add_argument("--out", default="infinitesimal.json")

    sp = add("padic-verify", "verify the p-adic stable fixed point in TV", _cmd_padic_verify)
    sp.add_argument("--p", type=int, default=5)
    sp.add_argument("--m", type=int, default=4)
    sp.add_argument("--k", type=int, default=10)
    sp.add_argument("--r", type=float, default=None, help="exponent (default log 2 / log p)")
    sp.add_argument("--c", type=float, default=None, help="scale constant (default resolution anchored)")
    sp.add_argument("--measure", choices=["stable", "haar"], default="stable")
    sp.add_argument("--representation", choices=["radial", "dense"], default="radial")
    sp.add_argument("--u1", type=int, default=1, help="unit part of the first scaling")
    sp.add_argument("--j1", type=int, default=1, help="valuation shift of the first scaling")
    sp.add_argument("--u2", type=int, default=1)
    sp.add_argument("--j2", type=int, default=1)
    sp.add_argument("--tol", type=float, default=1e-6)
    sp.add_argument("--out", default="padic.json")

    sp = add("semistable-check", "check phi = phi(T^t .)^n and run the density pipeline", _cmd_semistable_check)
    sp.add_argument("--alpha", type=float, default=None, help="stability index in (0, 2]")
    sp.add_argument("--n", type=int, default=2)
    sp.add_argument("--scale", type=float, default=1.0)
    sp.add_argument("--dim", type=int, default=1)
    sp.add_argument("--count", type=int, default=512)
    sp.add_argument("--half-width", type=float, default=20.0)
    sp.add_argument("--tol", type=float, default=1e-10)
    sp.add_argument("--rays", type=int, default=64)
    sp.add_argument("--radii", type=int, default=64)
    sp.add_argument("--L", type=float, default=40.0)
    sp.add_argument("--N", type=int, default=2048)
    sp.add_argument("--mass-tol", type=float, default=1e-2)
    sp.add_argument("--out", default="semistable.json")

    return parser, registry


def main(argv: Optional[Sequence[str]] = None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    argv = list(argv)
    parser, registry = _build_parser()
    args = parser.parse_args(argv)
    sub = registry[args.command]
    if args.config is not None:
        args = _merge_config(parser, sub, args.config, argv)
    args._sub = sub
    try:
        return args.func(args)
    except BoundaryAliasingError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except (NegativeRingingError, MassDefectError) as exc:
        print(f"verification failure: {exc}", file=sys.stderr)
        return 1
    except (ValueError, TypeError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
