"""Command line interface: ``minkprobe <subcommand> ...``.

Exit status is 0 on success, 1 when the library raises a domain error (its
class name is printed to stderr) and 2 on usage errors such as unknown
flags, missing files or unreadable input.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys

from .errors import MinkprobeError


class UsageError(Exception):
    pass


def _existing(path: str) -> str:
    if not os.path.isfile(path):
        raise UsageError(f"no such file: {path}")
    return path


def _read_json(path: str) -> dict:
    try:
        with open(_existing(path)) as fh:
            return json.load(fh)
    except json.JSONDecodeError as err:
        raise UsageError(f"{path}: invalid JSON ({err})") from None


def _load_measure(path: str):
    from .measures import DiscreteSphericalMeasure

    data = _read_json(path)
    try:
        return DiscreteSphericalMeasure.from_dict(data)
    except (KeyError, TypeError, ValueError) as err:
        raise UsageError(f"{path}: not a measure file ({err})") from None


def _load_body(spec: str):
    """Polytope JSON path or built-in name."""
    from .geometry import Polytope, named_body

    if os.path.isfile(spec):
        data = _read_json(spec)
        try:
            return Polytope.from_dict(data)
        except (KeyError, TypeError, ValueError) as err:
            raise UsageError(f"{spec}: not a polytope file ({err})") from None
    try:
        return named_body(spec)
    except ValueError:
        raise UsageError(f"{spec!r} is neither a file nor a built-in body") from None


def dumps(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _write(path: str, obj) -> None:
    with open(path, "w") as fh:
        fh.write(dumps(obj))


# ---------------------------------------------------------------------------
# subcommands

def cmd_sample(args) -> int:
    from .measures import empirical_measure, sample_normals

    body = _load_body(args.body)
    normals = sample_normals(body, args.n, args.seed, args.noise)
    out = {"dim": body.dim, "normals": normals.tolist()}
    out.update(empirical_measure(normals).to_dict())
    _write(args.out, out)
    return 0


def cmd_project(args) -> int:
    from .measures import zero_mean_project_radial, zero_mean_project_tv

    nu = _load_measure(args.measure)
    if args.mode == "radial":
        out = zero_mean_project_radial(nu).to_dict()
    else:
        mu, obj = zero_mean_project_tv(nu)
        out = mu.to_dict()
        out["tv_objective"] = obj
    _write(args.out, out)
    return 0


def cmd_reconstruct(args) -> int:
    from .minkowski import reconstruct

    rep = reconstruct(_load_measure(args.measure), tol=args.tol)
    _write(args.out, rep.body.to_dict())
    if args.report:
        _write(args.report, rep.to_dict())
    return 0


def cmd_distance(args) -> int:
    from .distances import d_bl, d_c_sandwich, d_tv

    a, b = _load_measure(args.a), _load_measure(args.b)
    if args.which == "tv":
        val = d_tv(a, b)
        report, shown = {"d_tv": val}, repr(val)
    elif args.which == "bl":
        val = d_bl(a, b)
        report, shown = {"d_bl": val}, repr(val)
    else:
        s = d_c_sandwich(a, b)
        report = {"d_c": {"lower": s.lower, "upper": s.upper,
                          "witness": s.lower_witness.describe(),
                          "certificate": s.upper_certificate}}
        shown = f"{s.lower!r} {s.upper!r}"
    if args.out:
        _write(args.out, report)
    print(shown)
    return 0


def cmd_hausdorff(args) -> int:
    from .geometry import hausdorff, min_translate_hausdorff

    a, b = _load_body(args.a), _load_body(args.b)
    val = min_translate_hausdorff(a, b)[0] if args.min_translate else hausdorff(a, b)
    print(repr(float(val)))
    return 0


def cmd_experiment(args) -> int:
    from .experiments import ExperimentConfig, run_experiment, tomllib

    try:
        cfg = ExperimentConfig.from_toml(_existing(args.config))
    except (ValueError, TypeError, tomllib.TOMLDecodeError) as err:
        raise UsageError(f"{args.config}: {err}") from None
    logging.basicConfig(level=logging.INFO, format="%(message)s", stream=sys.stderr)
    run_experiment(cfg, args.workers)
    return 0


def cmd_plot(args) -> int:
    from .experiments import emit_plots

    emit_plots(_existing(args.csv), args.kind, args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="minkprobe", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("sample", help="sample outer normals of a body")
    s.add_argument("--body", required=True, help="polytope JSON or square|cube|tetrahedron|ngon:K|icosphere:L")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--noise", type=float, default=0.0)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_sample)

    s = sub.add_parser("project", help="zero-mean projection of a measure")
    s.add_argument("--measure", required=True)
    s.add_argument("--mode", choices=["radial", "tv"], required=True)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_project)

    s = sub.add_parser("reconstruct", help="polytope with the given surface area measure")
    s.add_argument("--measure", required=True)
    s.add_argument("--tol", type=float, default=1e-6)
    s.add_argument("--out", required=True)
    s.add_argument("--report")
    s.set_defaults(func=cmd_reconstruct)

    s = sub.add_parser("distance", help="distance between two measures")
    s.add_argument("--a", required=True)
    s.add_argument("--b", required=True)
    s.add_argument("--which", choices=["tv", "bl", "cd"], required=True)
    s.add_argument("--out")
    s.set_defaults(func=cmd_distance)

    s = sub.add_parser("hausdorff", help="Hausdorff distance between two polytopes")
    s.add_argument("--a", required=True)
    s.add_argument("--b", required=True)
    s.add_argument("--min-translate", action="store_true")
    s.set_defaults(func=cmd_hausdorff)

    s = sub.add_parser("experiment", help="run a study from a TOML config")
    s.add_argument("--config", required=True)
    s.add_argument("--workers", type=int, default=None,
                   help="worker processes (default: MINKPROBE_THREADS or CPU count)")
    s.set_defaults(func=cmd_experiment)

    s = sub.add_parser("plot", help="SVG plot of a results CSV")
    s.add_argument("--csv", required=True)
    s.add_argument("--kind", choices=["scaling", "tail"], required=True)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_plot)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    try:
        return args.func(args)
    except UsageError as err:
        print(f"minkprobe: error: {err}", file=sys.stderr)
        return 2
    except MinkprobeError as err:
        print(f"{type(err).__name__}: {err}", file=sys.stderr)
        return 1
    except OSError as err:
        print(f"minkprobe: error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
