"""Command-line interface: problem ingestion, checks, and table emission.

Problem files are JSON::

    {
      "nvars": 2,
      "P": "(x1-1)^2 + (x2+1)^2 - 4",
      "field": {"matrix": [[-1, 0], [0, -1]]},        # or {"components": ["-x1", "-x2"]}
      "x0": [3, 2],
      "multiplier": {"U1": "1", "U2": "1",
                     "gram_U1": {"basis": [[0,0]], "Q": [[1]]},
                     "gram_negG": {"basis": [[1,0],[0,1],[0,0]],
                                   "Q": [[1,0,0],[0,1,0],[0,0,2]]}},
      "options": {"seed": 0, "ray_samples": 256, "n_dirs": 4096,
                  "levels": [0.25, 0.5, 1], "abs_tol": 1e-12, "rel_tol": 1e-12,
                  "h": 0.001, "T": 1.0}
    }

Exit codes: 0 all checks pass, 1 check failure, 2 parse/usage error,
3 no positive root, 4 multiple positive roots, 5 unsupported dimension.
The ALGLY_SEED environment variable overrides the file seed.  Outputs
are byte-identical across runs for identical inputs and seed.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import certs, dynsys
from .alf import HomogenizedLyapunov
from .errors import (
    AlglyError,
    MultiplePositiveRootsError,
    NoPositiveRootError,
    OriginNotInteriorError,
    ParseError,
)
from .homogenize import homogeneous_parts, homogenize
from .polycore import MultiPoly, parse

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_PARSE = 2
EXIT_NO_ROOT = 3
EXIT_MULTI_ROOT = 4
EXIT_DIMENSION = 5


@dataclass
class Problem:
    nvars: int
    P: MultiPoly
    field: dynsys.PolyVectorField | None
    x0: tuple[float, ...] | None
    multiplier: dict | None
    options: dict
    seed: int


class UsageError(Exception):
    pass


def load_problem(path: str, seed_flag: int | None = None) -> Problem:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read problem file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"problem file is not valid JSON: {exc}") from exc
    if "nvars" not in data or "P" not in data:
        raise UsageError("problem file needs at least 'nvars' and 'P'")
    nvars = int(data["nvars"])
    P = parse(data["P"], nvars)
    options = dict(data.get("options", {}))

    field = None
    if "field" in data:
        entry = data["field"]
        if "matrix" in entry:
            field = dynsys.linear(entry["matrix"])
            if field.nvars != nvars:
                raise UsageError("field matrix size disagrees with nvars")
        elif "components" in entry:
            comps = tuple(parse(text, nvars) for text in entry["components"])
            if len(comps) != nvars:
                raise UsageError("field needs exactly nvars components")
            field = dynsys.PolyVectorField(comps)
        else:
            raise UsageError("field must have either 'matrix' or 'components'")

    x0 = tuple(float(v) for v in data["x0"]) if "x0" in data else None
    if x0 is not None and len(x0) != nvars:
        raise UsageError("x0 length disagrees with nvars")

    env_seed = os.environ.get("ALGLY_SEED")
    if seed_flag is not None:
        seed = seed_flag
    elif env_seed is not None:
        try:
            seed = int(env_seed)
        except ValueError:
            raise UsageError(f"ALGLY_SEED must be an integer, got {env_seed!r}") from None
    else:
        seed = int(options.get("seed", 0))

    return Problem(
        nvars=nvars,
        P=P,
        field=field,
        x0=x0,
        multiplier=data.get("multiplier"),
        options=options,
        seed=seed,
    )


def build_lyapunov(problem: Problem) -> HomogenizedLyapunov:
    return HomogenizedLyapunov(
        problem.P,
        abs_tol=float(problem.options.get("abs_tol", 1e-12)),
        rel_tol=float(problem.options.get("rel_tol", 1e-12)),
        ray_samples=int(problem.options.get("ray_samples", 256)),
        seed=problem.seed,
    )


def _emit(text: str, out_path: str | None) -> None:
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_json(payload: dict, out_path: str | None) -> None:
    _emit(json.dumps(payload, indent=2) + "\n", out_path)


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_decompose(args) -> int:
    problem = load_problem(args.problem, args.seed)
    decomposition = homogeneous_parts(problem.P)
    payload = {
        "nvars": problem.nvars,
        "degree": decomposition.degree,
        "parts": [part.to_text() for part in decomposition.parts],
        "homogenized": homogenize(decomposition).to_text(),
        "scale_variable": f"x{problem.nvars + 1}",
    }
    if decomposition.degree == 0:
        payload["warning"] = "degree-0 polynomial: no scaling function can be constructed"
    _emit_json(payload, args.out)
    return EXIT_OK


def cmd_tau(args) -> int:
    problem = load_problem(args.problem, args.seed)
    L = build_lyapunov(problem)
    x = tuple(args.x)
    if len(x) != problem.nvars:
        raise UsageError(f"--x needs {problem.nvars} values, got {len(x)}")
    value = L.tau(x)
    payload = {"x": list(x), "tau": value, "residual": L.tau_residual(x) if value > 0.0 else None}
    if value == 0.0:
        payload["note"] = "tau(0) = 0 by the degree-1 homogeneity convention"
    _emit_json(payload, args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    problem = load_problem(args.problem, args.seed)
    if problem.field is None:
        raise UsageError("verify needs a 'field' entry in the problem file")
    opts = problem.options
    n_dirs = int(args.n_dirs if args.n_dirs is not None else opts.get("n_dirs", 4096))
    h = float(args.h if args.h is not None else opts.get("h", 1e-3))
    T = float(args.T if args.T is not None else opts.get("T", 1.0))
    strict_tol = float(args.min_margin if args.min_margin is not None else opts.get("strict_tol", 0.0))

    checks: dict[str, dict] = {}
    origin_value = problem.P.eval((0.0,) * problem.nvars)
    checks["origin_interior"] = {"passed": origin_value < 0.0, "value_at_origin": origin_value}

    checks["field_homogeneity"] = {"passed": True, "nu": problem.field.nu}

    if problem.x0 is not None:
        v0 = problem.P.eval(problem.x0)
        checks["containment"] = {"passed": v0 <= 0.0, "x0": list(problem.x0), "value_at_x0": v0}

    blocked_reason = None
    if not checks["origin_interior"]["passed"]:
        blocked_reason = "origin_interior failed"
    L = None
    if blocked_reason is None:
        L = build_lyapunov(problem)
        star = L.check_star_convex()
        checks["star_convexity"] = {
            "passed": star.passed,
            "checked_directions": star.checked_directions,
            "n_failures": len(star.failures),
            "failures": [
                {
                    "index": fail.index,
                    "direction": list(fail.direction),
                    "root_count": fail.root_count,
                    "roots": list(fail.roots),
                    "suspected_tangency": fail.suspected_tangency,
                }
                for fail in star.failures[:16]
            ],
        }
        if not star.passed:
            blocked_reason = "star_convexity failed"
    else:
        checks["star_convexity"] = {"status": "blocked", "reason": blocked_reason}

    if blocked_reason is None:
        try:
            inv = dynsys.check_invariance(problem.P, problem.field, L, n_dirs, strict_tol)
            checks["invariance"] = _report_payload(inv)
        except AlglyError as exc:
            checks["invariance"] = {"passed": False, "error": str(exc)}
    else:
        checks["invariance"] = {"status": "blocked", "reason": blocked_reason}

    if blocked_reason is None:
        starts = [problem.x0] if problem.x0 is not None else _random_starts(problem, 8)
        try:
            dec = dynsys.check_decrease(L, problem.field, starts, h, T)
            checks["decrease"] = _report_payload(dec)
            checks["decrease"]["starts"] = [list(s) for s in starts]
        except AlglyError as exc:
            checks["decrease"] = {"passed": False, "error": str(exc)}
    else:
        checks["decrease"] = {"status": "blocked", "reason": blocked_reason}

    if problem.multiplier is not None:
        cert = _multiplier_from_json(problem.multiplier, problem.nvars)
        rep = certs.verify_multiplier(problem.P, problem.field, cert, seed=problem.seed)
        checks["multiplier"] = _report_payload(rep)

    overall = all(entry.get("passed", False) for entry in checks.values() if "status" not in entry)
    overall = overall and blocked_reason is None
    payload = {"seed": problem.seed, "checks": checks, "passed": overall}
    _emit_json(payload, args.out)
    return EXIT_OK if overall else EXIT_CHECK_FAILED


def _random_starts(problem: Problem, count: int) -> list[tuple[float, ...]]:
    rng = np.random.default_rng(problem.seed)
    starts = []
    while len(starts) < count:
        v = rng.standard_normal(problem.nvars)
        norm = float(np.linalg.norm(v))
        if norm == 0.0:
            continue
        radius = float(rng.uniform(0.5, 5.0))
        starts.append(tuple(float(c) * radius / norm for c in v))
    return starts


def _report_payload(report: dynsys.VerificationReport) -> dict:
    payload = {
        "passed": report.passed,
        "n_samples": report.n_samples,
        "worst_margin": None if math.isinf(report.worst_margin) else report.worst_margin,
        "worst_witness": list(report.worst_witness) if report.worst_witness is not None else None,
        "notes": _jsonable(report.notes),
    }
    if report.details:
        payload["details"] = _jsonable(report.details[:16])
    return payload


def _jsonable(value):
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    return value


def _multiplier_from_json(data: dict, nvars: int) -> certs.MultiplierCertificate:
    def gram_data(entry):
        if entry is None:
            return None
        basis = tuple(tuple(int(k) for k in e) for e in entry["basis"])
        return (basis, np.asarray(entry["Q"], dtype=float))

    return certs.MultiplierCertificate(
        U1=parse(data["U1"], nvars),
        U2=parse(data["U2"], nvars),
        gram_U1=gram_data(data.get("gram_U1")),
        gram_negG=gram_data(data.get("gram_negG")),
    )


def cmd_contour(args) -> int:
    problem = load_problem(args.problem, args.seed)
    if problem.nvars != 2:
        sys.stderr.write("contour emission is 2D-only\n")
        return EXIT_DIMENSION
    levels = list(args.levels) if args.levels else [float(v) for v in problem.options.get("levels", [0.25, 0.5, 1.0])]
    n_theta = int(args.n_theta if args.n_theta is not None else problem.options.get("n_theta", 360))
    L = build_lyapunov(problem)
    # one root solve per direction; each level is an exact scaling of the
    # unit-level boundary point d / tau(d)
    boundary = []
    for k in range(n_theta):
        theta = 2.0 * math.pi * k / n_theta
        d = (math.cos(theta), math.sin(theta))
        t = L.tau(d)
        boundary.append((theta, d[0] / t, d[1] / t))
    lines = ["level,theta,x1,x2"]
    for level in sorted(levels):
        for theta, b1, b2 in boundary:
            lines.append(f"{level!r},{theta!r},{level * b1!r},{level * b2!r}")
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_simulate(args) -> int:
    problem = load_problem(args.problem, args.seed)
    if problem.field is None:
        raise UsageError("simulate needs a 'field' entry in the problem file")
    if problem.x0 is None:
        raise UsageError("simulate needs an 'x0' entry in the problem file")
    h = float(args.h if args.h is not None else problem.options.get("h", 1e-3))
    T = float(args.T if args.T is not None else problem.options.get("T", 1.0))
    L = build_lyapunov(problem)
    traj = dynsys.rk4(problem.field, problem.x0, h, T)
    header = "t," + ",".join(f"x{i + 1}" for i in range(problem.nvars)) + ",tau,tau_dot"
    lines = [header]
    for t, state in zip(traj.times, traj.states):
        tau = L.tau(state)
        if any(v != 0.0 for v in state):
            td = L.tau_dot(problem.field, state)
        else:
            td = 0.0
        cells = [repr(t)] + [repr(v) for v in state] + [repr(tau), repr(td)]
        lines.append(",".join(cells))
    if traj.diverged:
        lines.append(f"# diverged: integration stopped at t={traj.times[-1]!r}")
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_cert(args) -> int:
    problem = load_problem(args.problem, args.seed)
    try:
        with open(args.cert) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read certificate file: {exc}") from exc

    if "basis" in data and "Q" in data:
        target = parse(data["target"], problem.nvars)
        cert = certs.GramCertificate(
            basis=tuple(tuple(int(k) for k in e) for e in data["basis"]),
            Q=np.asarray(data["Q"], dtype=float),
            target=target,
        )
        report = certs.verify_gram(cert)
        payload = {
            "kind": "gram",
            "passed": report.passed,
            "coeff_ok": report.coeff_ok,
            "psd_ok": report.psd_ok,
            "marginal": report.marginal,
            "eigenvalues": list(report.eigenvalues),
            "max_coeff_error": report.max_coeff_error,
            "psd_tol": report.psd_tol,
        }
        if report.mismatches:
            payload["mismatches"] = [
                {"exponents": list(m["exponents"]), "expanded": m["expanded"], "target": m["target"]}
                for m in report.mismatches
            ]
        _emit_json(payload, args.out)
        return EXIT_OK if report.passed else EXIT_CHECK_FAILED

    if "U1" in data and "U2" in data:
        if problem.field is None:
            raise UsageError("multiplier verification needs a 'field' entry in the problem file")
        cert = _multiplier_from_json(data, problem.nvars)
        report = certs.verify_multiplier(problem.P, problem.field, cert, seed=problem.seed)
        payload = {"kind": "multiplier", **_report_payload(report)}
        _emit_json(payload, args.out)
        return EXIT_OK if report.passed else EXIT_CHECK_FAILED

    raise UsageError("certificate file must carry either 'basis'/'Q'/'target' or 'U1'/'U2'")


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="algly",
        description="Gauge-type Lyapunov functions from polynomial invariant sets",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--problem", required=True, help="problem file (JSON)")
        p.add_argument("--out", default=None, help="write output to this file instead of stdout")
        p.add_argument("--seed", type=int, default=None, help="override the problem seed")

    p = sub.add_parser("decompose", help="homogeneous parts and the homogenized polynomial")
    common(p)
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("tau", help="evaluate the scaling function at a point")
    common(p)
    p.add_argument("--x", type=float, nargs="+", required=True, help="point coordinates")
    p.set_defaults(func=cmd_tau)

    p = sub.add_parser("verify", help="run the full check battery")
    common(p)
    p.add_argument("--n-dirs", type=int, default=None, help="boundary sampling density")
    p.add_argument("--h", type=float, default=None, help="integration step for the decrease check")
    p.add_argument("--T", type=float, default=None, help="integration horizon for the decrease check")
    p.add_argument("--min-margin", type=float, default=None,
                   help="require the invariance margin to be below minus this value")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("contour", help="emit level-set points as CSV (2D only)")
    common(p)
    p.add_argument("--levels", type=float, nargs="+", default=None)
    p.add_argument("--n-theta", type=int, default=None)
    p.set_defaults(func=cmd_contour)

    p = sub.add_parser("simulate", help="integrate from x0 and tabulate tau along the way")
    common(p)
    p.add_argument("--h", type=float, default=None)
    p.add_argument("--T", type=float, default=None)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("cert", help="verify a Gram or multiplier certificate file")
    common(p)
    p.add_argument("--cert", required=True, help="certificate file (JSON)")
    p.set_defaults(func=cmd_cert)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BrokenPipeError:
        # downstream consumer (e.g. `| head`) closed the pipe mid-write
        devnull = os.open(os.devnull, os.O_WRONLY)
        os.dup2(devnull, sys.stdout.fileno())
        return EXIT_OK
    except ParseError as exc:
        _emit_json({"error": "parse", "message": str(exc), "offset": exc.offset}, None)
        return EXIT_PARSE
    except UsageError as exc:
        _emit_json({"error": "usage", "message": str(exc)}, None)
        return EXIT_PARSE
    except NoPositiveRootError as exc:
        _emit_json({"error": "no_positive_root", "message": str(exc), "x": list(exc.x)}, None)
        return EXIT_NO_ROOT
    except MultiplePositiveRootsError as exc:
        _emit_json({
            "error": "multiple_positive_roots",
            "message": str(exc),
            "x": list(exc.x),
            "roots": list(exc.roots),
        }, None)
        return EXIT_MULTI_ROOT
    except OriginNotInteriorError as exc:
        _emit_json({"error": "origin_not_interior", "message": str(exc)}, None)
        return EXIT_CHECK_FAILED
    except AlglyError as exc:
        _emit_json({"error": type(exc).__name__, "message": str(exc)}, None)
        return EXIT_CHECK_FAILED


if __name__ == "__main__":
    sys.exit(main())
