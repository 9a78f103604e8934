"""``pb``: batch front end for vectorizing, comparing and generating diagrams.

Data goes to files or standard output, logs to standard error. Exit status is
0 on success, 2 on a usage error and 1 on a data or numeric error.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from typing import List, Optional

import numpy as np

from .bspline import reconstruct_surface, vector_from_json, vector_to_json, write_height_field
from .datasets import (
    LINDSTROM_M0,
    SHAPES,
    OrbitSpec,
    RandomPdSpec,
    lindstrom_orbit,
    random_count,
    random_pd,
    sample_shape,
)
from .diagram import read_diagram, serialize_diagram, write_diagram
from .homology import persistence_diagrams, read_point_cloud, write_point_cloud
from .lspia import LspiaConfig, vectorize
from .metrics import bottleneck, wasserstein
from .transform import EminenceConfig, choose_m

log = logging.getLogger("pbgrid")


class UsageError(Exception):
    pass


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _nonneg_float(text: str) -> float:
    v = float(text)
    if not v >= 0 or math.isnan(v):
        raise argparse.ArgumentTypeError(f"expected a non-negative number, got {text}")
    return v


def _p_value(text: str) -> float:
    v = math.inf if text.lower() in ("inf", "infinity") else float(text)
    if not v >= 1:
        raise argparse.ArgumentTypeError(f"p must be >= 1 or inf, got {text}")
    return v


def _write_text(text: str, path: Optional[str]) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


# --- subcommands ----------------------------------------------------------


def cmd_vectorize(a) -> int:
    pds = [read_diagram(p) for p in a.input]
    m = a.m if a.m is not None else choose_m(pds)
    em = EminenceConfig(m=m, epsilon=a.epsilon, M=a.M, L=a.L)
    cfg = LspiaConfig(h=a.grid, iterations=a.iters)
    if len(pds) == 1 and not a.jsonl:
        _write_text(vector_to_json(vectorize(pds[0], em, cfg)) + "\n", a.out)
        return 0
    lines = [vector_to_json(vectorize(pd, em, cfg), id=path) for pd, path in zip(pds, a.input)]
    _write_text("\n".join(lines) + "\n", a.out)
    return 0


def cmd_distance(a) -> int:
    pd1, pd2 = read_diagram(a.first), read_diagram(a.second)
    if a.metric == "bottleneck":
        d = bottleneck(pd1, pd2)
    else:
        d = wasserstein(pd1, pd2, a.p)
    print(f"{d:.12g}")
    return 0


def cmd_homology(a) -> int:
    if a.out_h0 is None and a.out_h1 is None:
        raise UsageError("give at least one of --out-h0, --out-h1")
    dgms = persistence_diagrams(read_point_cloud(a.input), a.maxdim, a.rmax)
    if a.out_h0:
        write_diagram(dgms.h0, a.out_h0)
    if a.out_h1:
        write_diagram(dgms.h1, a.out_h1)
    return 0


def cmd_generate(a) -> int:
    if a.kind == "random-pd":
        _write_text(serialize_diagram(random_pd(RandomPdSpec(a.tau, a.count, a.seed))), a.out)
    elif a.kind == "shape":
        pts = sample_shape(a.shape, a.count, a.noise, a.seed)
        if a.out is None:
            raise UsageError("--out is required for --kind shape")
        write_point_cloud(pts, a.out)
    else:
        if a.M0 is None:
            raise UsageError("--M0 is required for --kind lindstrom")
        orbit = lindstrom_orbit(OrbitSpec(a.M0, iterations=a.count, seed=a.seed))
        if a.out is None:
            raise UsageError("--out is required for --kind lindstrom")
        write_point_cloud(orbit, a.out)
    return 0


def cmd_experiment(a) -> int:
    from . import experiments as ex

    params = {"seed": a.seed}
    if a.suite == "ratio":
        rng = np.random.default_rng(ex.subseed(a.seed, 0))
        pds = [
            random_pd(RandomPdSpec(1.0, random_count(rng), ex.subseed(a.seed, 1, i)))
            for i in range(a.count)
        ]
        _write_text(ex.ratio_curve(pds, em=EminenceConfig(m=1.0), h=a.grid).to_csv(), a.out)
        return 0
    if a.suite == "features":
        reports = ex.feature_extraction_suite(a.seed, a.design, a.epsilons, a.grid, a.iters, a.k, a.trials)
        lines = [
            r.to_json("features", {**params, "design": a.design, "epsilon": eps})
            for eps, r in reports.items()
        ]
        _write_text("\n".join(lines) + "\n", a.out)
        return 0
    if a.suite == "overperformance":
        r = ex.overperformance_suite(a.seed, trials=a.trials, h=a.grid, iterations=a.iters, k=a.k)
    else:
        r = ex.shape_suite(
            a.seed, a.points, a.clouds, h=a.grid, iterations=a.iters, k=a.k, trials=a.trials
        )
        params.update(points_per_cloud=a.points, clouds_per_class=a.clouds)
    _write_text(r.to_json(a.suite, params) + "\n", a.out)
    return 0


def cmd_reconstruct(a) -> int:
    with open(a.input, encoding="utf-8") as fh:
        v = vector_from_json(fh.read())
    write_height_field(reconstruct_surface(v, a.samples), a.out)
    return 0


# --- parser ---------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pb", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("vectorize", help="persistence vectors of diagram CSV files")
    s.add_argument("--input", nargs="+", required=True, help="diagram CSV file(s)")
    s.add_argument("--grid", type=_positive_int, default=20, help="control grid size h (default 20)")
    s.add_argument("--iters", type=_positive_int, default=100, help="LSPIA iterations (default 100)")
    s.add_argument("--epsilon", type=_nonneg_float, default=0.0, help="neighbour radius (default 0)")
    s.add_argument("--m", type=float, default=None, help="normalizing bound; chosen from the inputs if omitted")
    s.add_argument("--M", type=_positive_int, default=10, help="neighbour count cap (default 10)")
    s.add_argument("--L", type=float, default=None, help="persistence cap (default m)")
    s.add_argument("--jsonl", action="store_true", help="one JSON object per line, with ids")
    s.add_argument("--out", default=None, help="output file (default stdout)")
    s.set_defaults(func=cmd_vectorize)

    s = sub.add_parser("distance", help="distance between two diagram CSV files")
    s.add_argument("first")
    s.add_argument("second")
    s.add_argument("--metric", choices=("wasserstein", "bottleneck"), default="wasserstein")
    s.add_argument("--p", type=_p_value, default=1.0, help="Wasserstein order (default 1)")
    s.set_defaults(func=cmd_distance)

    s = sub.add_parser("homology", help="Rips diagrams of a point cloud CSV")
    s.add_argument("--input", required=True, help="point cloud CSV with header x,y[,z]")
    s.add_argument("--maxdim", type=int, choices=(1, 2), default=2, help="top simplex dimension")
    s.add_argument("--rmax", type=_nonneg_float, default=math.inf, help="filtration cutoff")
    s.add_argument("--out-h0", default=None)
    s.add_argument("--out-h1", default=None)
    s.set_defaults(func=cmd_homology)

    s = sub.add_parser("generate", help="seeded synthetic diagrams, point clouds or orbits")
    s.add_argument("--kind", choices=("random-pd", "shape", "lindstrom"), required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--count", type=int, default=None,
                   help="points (random-pd 200, shape 150) or orbit length (2000)")
    s.add_argument("--tau", type=float, default=0.02, help="random-pd spread (default 0.02)")
    s.add_argument("--shape", choices=SHAPES, default="circle")
    s.add_argument("--noise", type=_nonneg_float, default=0.025)
    s.add_argument("--M0", type=float, default=None, help=f"orbit parameter, e.g. one of {LINDSTROM_M0}")
    s.add_argument("--out", default=None)
    s.set_defaults(func=cmd_generate)

    s = sub.add_parser("experiment", help="run a desk-scale experiment and emit JSON or CSV")
    s.add_argument("--suite", choices=("ratio", "features", "overperformance", "shapes"), required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--grid", type=_positive_int, default=20)
    s.add_argument("--iters", type=_positive_int, default=100)
    s.add_argument("--k", type=_positive_int, default=3)
    s.add_argument("--trials", type=_positive_int, default=100)
    s.add_argument("--count", type=_positive_int, default=100, help="diagrams for the ratio suite")
    s.add_argument("--design", type=int, choices=(1, 2), default=1)
    s.add_argument("--epsilons", type=_nonneg_float, nargs="+", default=[0.0, 0.01, 0.02, 0.05])
    s.add_argument("--points", type=_positive_int, default=150, help="points per cloud (shapes)")
    s.add_argument("--clouds", type=_positive_int, default=20, help="clouds per class (shapes)")
    s.add_argument("--out", default=None)
    s.set_defaults(func=cmd_experiment)

    s = sub.add_parser("reconstruct", help="sample the surface of a persistence vector")
    s.add_argument("--input", required=True, help="vector JSON")
    s.add_argument("--samples", type=_positive_int, default=50, help="grid resolution (default 50)")
    s.add_argument("--out", required=True, help="height field CSV")
    s.set_defaults(func=cmd_reconstruct)
    return p


def run(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        a = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(
        level=logging.INFO if a.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    if a.command == "generate" and a.count is None:
        a.count = {"random-pd": 200, "shape": 150, "lindstrom": 2000}[a.kind]
    try:
        return a.func(a)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"pb: error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, FloatingPointError, OSError, KeyError, json.JSONDecodeError) as exc:
        print(f"pb: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
