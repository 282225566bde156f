"""Command-line front end.

Every command writes one deterministic document (JSON unless another
``--format`` is chosen) to ``--out`` or standard output.

Exit status: 0 success, 2 invalid configuration, 3 resource limit,
4 verification mismatch, 5 internal structure error.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import numpy as np

from . import dragon, export, spectral, typedyn
from ._kernels import BACKEND
from .errors import (
    ClassificationError,
    ClosureError,
    ContractError,
    ConvergenceError,
    DivergenceError,
    PrimitivityError,
    ResourceLimitError,
    StructureError,
    VerificationError,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RESOURCE = 3
EXIT_MISMATCH = 4
EXIT_STRUCTURE = 5

COMMANDS = ("render", "census", "stable-set", "matrix", "spectral", "dimension", "verify")
FORMATS = {
    "render": ("svg",),
    "census": ("json",),
    "stable-set": ("text", "json"),
    "matrix": ("triplets", "json"),
    "spectral": ("json", "text"),
    "dimension": ("json", "text"),
    "verify": ("json", "text"),
}
DEFAULT_DEPTH = {"render": 5, "census": 14, "verify": 14, "spectral": 30}


@dataclass
class RunConfig:
    command: str
    depth: Optional[int] = None
    tolerance: float = 1e-10
    output_path: Optional[Path] = None
    format: Optional[str] = None
    max_power: int = 25
    threads: int = 1
    max_depth: int = dragon.DEFAULT_MAX_DEPTH
    style: str = "by-class"
    method: str = "geometric"

    def validate(self) -> "RunConfig":
        if self.command not in COMMANDS:
            raise ContractError(f"unknown command {self.command!r}")
        if self.format is None:
            self.format = FORMATS[self.command][0]
        if self.format not in FORMATS[self.command]:
            raise ContractError(f"{self.command} does not support format {self.format!r}")
        if self.depth is None:
            self.depth = DEFAULT_DEPTH.get(self.command, 0)
        if self.depth < 0 or (self.command == "spectral" and self.depth < 1):
            raise ContractError("depth out of range")
        if not self.tolerance > 0:
            raise ContractError("tolerance must be positive")
        if self.max_power < 1 or self.threads < 1:
            raise ContractError("max-power and threads must be positive")
        return self


def _provenance(**fields: str) -> Dict[str, str]:
    return dict(fields)


def verify(depth_max: int, *, threads: int = 1, max_depth: int = dragon.DEFAULT_MAX_DEPTH) -> dict:
    """Cross-check the geometric and symbolic pipelines up to ``depth_max``.

    Returns a report whose ``passed`` flag is false on any mismatch; the
    first divergent census entry is recorded under ``first_difference``.
    """
    if depth_max > max_depth:
        raise ResourceLimitError(f"depth {depth_max} exceeds the geometric limit {max_depth}")
    checks: List[dict] = []
    first_difference = None

    census_rows = []
    symbolic = typedyn.seed_census()
    first_covered = None
    for k in range(depth_max + 1):
        if k:
            symbolic = typedyn.evolve(symbolic, 1)
        occ = dragon.iterate(k, max_depth=max_depth)
        geometric = dragon.type_census(k, max_depth=max_depth, threads=threads, occupancy=occ)
        b_geo = dragon.boundary_count_geometric(k, max_depth=max_depth, occupancy=occ)
        b_sym = typedyn.boundary_count(symbolic)
        distinct, sequences = dragon.covered_counts(k, max_depth=max_depth, occupancy=occ)
        diff = geometric.first_difference(symbolic)
        ok = diff is None and b_geo == b_sym and geometric.mass == 15 * 2 ** k
        if diff is not None and first_difference is None:
            first_difference = {"depth": k, "code": diff[0], "geometric": diff[1], "symbolic": diff[2]}
        if first_covered is None and symbolic.get(typedyn.COVERED):
            first_covered = k
        census_rows.append({
            "depth": k,
            "passed": ok,
            "distinct_occupied": len(occ),
            "sequences": str(occ.sequence_count),
            "boundary_geometric": b_geo,
            "boundary_symbolic": b_sym,
            "covered_distinct": distinct,
            "covered_sequences": sequences,
            "covered_symbolic": symbolic.get(typedyn.COVERED),
        })
    checks.append({"name": "census-equality", "passed": all(r["passed"] for r in census_rows),
                   "levels": census_rows})

    map_levels = []
    for k in range(min(depth_max, 12) + 1):
        same = dragon.iterate_by_maps(k) == dragon.iterate(k, max_depth=max_depth).triangles
        map_levels.append({"depth": k, "passed": same})
    checks.append({"name": "map-replacement-agreement",
                   "passed": all(r["passed"] for r in map_levels), "levels": map_levels})

    covered_at_max = census_rows[-1]
    checks.append({
        "name": "covered-scan",
        "passed": covered_at_max["covered_distinct"] == covered_at_max["covered_symbolic"],
        "first_covered": first_covered,
        "covered": covered_at_max["covered_distinct"],
        "covered_sequences": covered_at_max["covered_sequences"],
    })

    M = spectral.build_matrix(typedyn.stable_set())
    rows_ok = bool((M.entries.sum(axis=1) == 2).all())
    try:
        blocks = spectral.block_partition(M)
        blocks_ok = spectral.check_permutation(blocks.P) and bool((np.diag(blocks.I) == 2).all())
    except StructureError:
        blocks_ok = False
    checks.append({"name": "matrix-row-sums", "passed": rows_ok})
    checks.append({"name": "matrix-block-structure", "passed": blocks_ok,
                   "block_sizes": list(M.sizes)})

    return {
        "command": "verify",
        "depth_max": depth_max,
        "backend": BACKEND,
        "passed": all(c["passed"] for c in checks),
        "first_covered": first_covered,
        "covered": covered_at_max["covered_distinct"],
        "first_difference": first_difference,
        "checks": checks,
        "provenance": _provenance(
            covered="covered triangles of F^k(T0) at depth_max, distinct and by index sequence",
            first_covered="first depth at which a covered triangle appears",
            census_equality="geometric census of N_k equals the symbolic census evolved from N_0",
        ),
    }


def _verify_text(report: dict) -> str:
    lines = [f"verify depth_max={report['depth_max']} backend={report['backend']}"]
    for c in report["checks"]:
        lines.append(f"{'PASS' if c['passed'] else 'FAIL'} {c['name']}")
    lines.append(f"first_covered={report['first_covered']} covered={report['covered']}")
    lines.append("passed" if report["passed"] else "FAILED")
    return "\n".join(lines) + "\n"


def _census(cfg: RunConfig) -> str:
    k = cfg.depth
    if cfg.method == "geometric":
        census = dragon.type_census(k, max_depth=cfg.max_depth, threads=cfg.threads)
    else:
        census = typedyn.evolve(typedyn.seed_census(), k)
    return export.dumps({
        "command": "census",
        "depth": k,
        "method": cfg.method,
        "mass": str(census.mass),
        "boundary_count": str(typedyn.boundary_count(census)),
        "covered": str(census.get(typedyn.COVERED)),
        "census": {c: str(n) for c, n in export.census_map(census).items()},
        "provenance": _provenance(
            census="V(k): number of triangles of N_k of each neighbourhood type",
            boundary_count="|B_k|: occupied triangles that are not covered",
            covered="triangles of type 32767",
        ),
    })


def _stable_set(cfg: RunConfig) -> str:
    stable = typedyn.stable_set()
    cls = typedyn.classify(stable.codes)
    if cfg.format == "text":
        return export.stable_set_text(stable.codes, cls)
    return export.dumps({
        "command": "stable-set",
        "depth": stable.depth,
        "size": len(stable),
        "sizes": {"transient": len(cls.transient), "core": len(cls.core),
                  "absorbing": len(cls.absorbing)},
        "codes": [[c, cls.class_of(c)] for c in stable.codes],
        "provenance": _provenance(
            depth="first k with S_k == S_(k+1)",
            size="cardinality of the stable type set",
        ),
    })


def _matrix(cfg: RunConfig) -> str:
    M = spectral.build_matrix(typedyn.stable_set())
    spectral.block_partition(M)
    if cfg.format == "json":
        return export.dumps(export.matrix_metadata(M))
    if cfg.output_path is not None:
        meta = cfg.output_path.with_name(cfg.output_path.name + ".meta.json")
        meta.write_text(export.dumps(export.matrix_metadata(M)))
    return export.matrix_triplets(M)


def _spectral(cfg: RunConfig) -> str:
    report = spectral.spectral_report(cfg.tolerance, cfg.depth, cfg.max_power)
    doc = {"command": "spectral", **report.to_json_dict()}
    doc["provenance"] = _provenance(
        lambda_estimate="Perron root of the core block C by the power method",
        lower_bound="certified: lower_bound**k <= min row sum of C**k",
        upper_bound="certified: upper_bound**k >= max row sum of C**k",
        dimension_estimate="ln(lambda) / ln(sqrt 2)",
        primitivity_exponent="smallest m with C**m strictly positive",
    )
    if cfg.format == "text":
        return "".join(f"{k}: {v}\n" for k, v in doc.items() if k != "provenance")
    return export.dumps(doc)


def _dimension(cfg: RunConfig) -> str:
    M = spectral.build_matrix(typedyn.stable_set())
    C = spectral.block_partition(M).C
    lam, iters = spectral.power_method(C, cfg.tolerance)
    dim = spectral.dimension_from_growth(lam)
    if cfg.format == "text":
        return f"lambda={lam:.9f}\ndimension={dim:.9f}\n"
    return export.dumps({
        "command": "dimension",
        "tolerance": repr(cfg.tolerance),
        "lambda_estimate": repr(lam),
        "dimension_estimate": repr(dim),
        "iterations_used": iters,
        "provenance": _provenance(
            lambda_estimate="growth rate of the boundary count, Perron root of C",
            dimension_estimate="Hausdorff dimension of the boundary, ln(lambda) / ln(sqrt 2)",
        ),
    })


def run(cfg: RunConfig) -> int:
    """Execute one command; returns the process exit status."""
    try:
        cfg.validate()
        if cfg.command == "render":
            text = dragon.render(cfg.depth, cfg.style, max_depth=cfg.max_depth)
        elif cfg.command == "census":
            text = _census(cfg)
        elif cfg.command == "stable-set":
            text = _stable_set(cfg)
        elif cfg.command == "matrix":
            text = _matrix(cfg)
        elif cfg.command == "spectral":
            text = _spectral(cfg)
        elif cfg.command == "dimension":
            text = _dimension(cfg)
        else:
            report = verify(cfg.depth, threads=cfg.threads, max_depth=cfg.max_depth)
            text = _verify_text(report) if cfg.format == "text" else export.dumps(report)
            if not report["passed"]:
                _emit(text, cfg.output_path)
                raise VerificationError("verification failed", report["first_difference"])
    except ResourceLimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except VerificationError as exc:
        print(f"error: {exc}; first difference: {exc.first_difference}", file=sys.stderr)
        return EXIT_MISMATCH
    except (StructureError, ClassificationError, ClosureError, PrimitivityError,
            ConvergenceError, DivergenceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_STRUCTURE
    except ContractError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    _emit(text, cfg.output_path)
    return EXIT_OK


def _emit(text: str, path: Optional[Path]) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        path.write_text(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="levy-boundary",
        description="Boundary dimension of the Levy dragon by neighbourhood-type dynamics.",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--depth", type=int, default=None,
                        help="iteration depth (render 5, census/verify 14, spectral bound power 30)")
    parser.add_argument("--tolerance", type=float, default=1e-10, help="power-method tolerance")
    parser.add_argument("--max-power", type=int, default=25, help="primitivity search bound")
    parser.add_argument("--out", type=Path, default=None, help="output file (default: stdout)")
    parser.add_argument("--format", default=None,
                        choices=sorted({f for fs in FORMATS.values() for f in fs}))
    parser.add_argument("--threads", type=int, default=1, help="workers for the geometric census")
    parser.add_argument("--max-depth", type=int, default=dragon.DEFAULT_MAX_DEPTH,
                        help="resource limit for geometric computations")
    parser.add_argument("--style", choices=("plain", "by-class"), default="by-class",
                        help="render colouring")
    parser.add_argument("--method", choices=("geometric", "symbolic"), default="geometric",
                        help="how the census is computed")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    cfg = RunConfig(
        command=args.command,
        depth=args.depth,
        tolerance=args.tolerance,
        output_path=args.out,
        format=args.format,
        max_power=args.max_power,
        threads=args.threads,
        max_depth=args.max_depth,
        style=args.style,
        method=args.method,
    )
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
