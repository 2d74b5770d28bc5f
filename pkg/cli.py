#!/usr/bin/env python3
"""
cartankit command line

Subcommands:
    classify   verdict, rule, μ-shape and witnesses for a subalgebra
    verify     classify, then sample μ(H) and run the two-wall test and band check
    project    Cartan projection of a group element
    sample     μ-cloud of a subalgebra as CSV
    catalog    minimal Cartan-decomposition subgroups (--run verifies each)

Usage:
    python cli.py classify --config job.json
    python cli.py verify --config job.json --seed 3 --out out/
    python cli.py catalog --group SO2n --n 5 --run

Exit codes: 0 ok, 1 internal defect, 2 invalid config, 3 not a subalgebra / not a group
member, 4 classifier/empirical mismatch, 5 nonstandard form.
"""

import argparse
import csv
import json
import logging
import os
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np
from dotenv import load_dotenv
from pydantic import ValidationError

from capabilities.catalog import CatalogCapability
from capabilities.classification import ClassificationCapability
from capabilities.verification import VerificationCapability
from models.capabilities import CatalogInputs, ClassificationInputs, VerificationInputs
from models.config import JobConfig, Settings
from models.empirical import CLOUD_COLUMNS, MuCloud
from services.errors import CartanKitError, InvalidConfigError, NotInGroupError
from services.group import (
    cartan_projection_approx,
    cartan_projection_exact,
    form_residual,
    is_member,
    make_group,
    wall_distances,
)
from services.sampling import sample_cloud

logger = logging.getLogger("cartankit")

COMMANDS = ("classify", "verify", "project", "sample", "catalog")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cartankit", description="Cartan-decomposition subgroups of SL(3,R) and SO(2,n)")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", type=Path, help="JSON job file")
    parser.add_argument("--group", choices=["SL3", "SO2n"], help="Group when no config is given")
    parser.add_argument("--n", type=int, help="n for SO(2,n) when no config is given")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--budget", type=int)
    parser.add_argument("--max-log-radius", type=float, dest="max_log_radius")
    parser.add_argument("--out", type=Path, help="Directory for JSON reports and CSV clouds")
    parser.add_argument("--run", action="store_true", help="catalog: verify every entry")
    return parser


# === Configuration ===

def load_job(args: argparse.Namespace) -> JobConfig:
    """Read and validate the job; flags override config fields"""
    try:
        if args.config is not None:
            raw = json.loads(args.config.read_text())
        elif args.group is not None:
            raw = {"group": {"kind": args.group, "n": args.n}, "tasks": [args.command]}
        else:
            raise InvalidConfigError("Either --config or --group is required")
        job = JobConfig.model_validate(raw)
    except (OSError, json.JSONDecodeError) as e:
        raise InvalidConfigError(f"Cannot read config: {e}") from e
    except ValidationError as e:
        raise InvalidConfigError(f"Invalid config: {e.error_count()} error(s)", {"errors": e.errors(include_url=False)}) from e

    if job.needs_subalgebra(args.command) and job.subalgebra is None:
        raise InvalidConfigError(f"{args.command} needs a subalgebra basis")
    if args.command == "project" and job.matrix is None:
        raise InvalidConfigError("project needs a matrix")
    return job


def resolve(flag: Any, field: Any, setting: Any) -> Any:
    """CLI flag > job config > environment/default"""
    if flag is not None:
        return flag
    if field is not None:
        return field
    return setting


def config_echo(job: JobConfig, seed: int, budget: int, max_log_radius: float) -> Dict[str, Any]:
    echo = job.model_dump(mode="json")
    echo.update({"seed": seed, "budget": budget, "max_log_radius": max_log_radius})
    return echo


# === Output ===

def write_report(report: Dict[str, Any], out: Optional[Path], name: str) -> None:
    text = json.dumps(report, indent=2, default=str)
    print(text)
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        (out / f"{name}.json").write_text(text)
        logger.info(f"Wrote {out / f'{name}.json'}")


def write_cloud(cloud: MuCloud, out: Optional[Path], name: str = "cloud") -> Optional[Path]:
    if out is None:
        return None
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"{name}.csv"
    with path.open("w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(CLOUD_COLUMNS)
        for sample in cloud.samples:
            writer.writerow(sample.csv_row())
    logger.info(f"Wrote {len(cloud.samples)} samples to {path}")
    return path


# === Commands ===

def cmd_classify(job: JobConfig, params: Dict[str, Any], out: Optional[Path]) -> int:
    result = ClassificationCapability().execute(ClassificationInputs(
        group=job.group, basis=job.subalgebra.basis, seed=params["seed"],
    ))
    verdict = result.verdict
    write_report({
        "config": config_echo(job, **params),
        "verdict": verdict.model_dump(mode="json"),
        "rule": verdict.rule,
        "explanation": result.explanation,
        "envelope": result.metadata.get("envelope"),
        "standard_form": result.standard_form.model_dump(mode="json") if result.standard_form else None,
    }, out, "classify")
    return 0


def cmd_verify(job: JobConfig, params: Dict[str, Any], out: Optional[Path], threads: int) -> int:
    result = VerificationCapability().execute(VerificationInputs(
        group=job.group, basis=job.subalgebra.basis, seed=params["seed"], budget=params["budget"],
        max_log_radius=params["max_log_radius"], threads=threads,
        tolerances=job.tolerances, expected_shape=job.expected_shape,
    ))
    if result.cloud is not None:
        write_cloud(result.cloud, out)
    report = {
        "config": config_echo(job, **params),
        "exit_code": result.exit_code,
        "error": result.error,
        "result": result.result.model_dump(mode="json") if result.result else None,
        "cloud": {
            "samples": len(result.cloud.samples), "partial": result.cloud.partial,
            "skipped": result.cloud.skipped, "schedule": result.cloud.schedule,
        } if result.cloud else None,
    }
    write_report(report, out, "verify")
    return result.exit_code


def cmd_sample(job: JobConfig, params: Dict[str, Any], out: Optional[Path], threads: int) -> int:
    spec = make_group(job.group.kind, job.group.n)
    cloud = sample_cloud(
        spec, job.subalgebra_for(spec), params["budget"], params["max_log_radius"], params["seed"], threads,
    )
    path = write_cloud(cloud, out)
    if path is None:
        writer = csv.writer(sys.stdout)
        writer.writerow(CLOUD_COLUMNS)
        for sample in cloud.samples:
            writer.writerow(sample.csv_row())
    return 0


def cmd_project(job: JobConfig, out: Optional[Path]) -> int:
    spec = make_group(job.group.kind, job.group.n)
    g = np.array(job.matrix, dtype=float)
    if g.shape != (spec.d, spec.d):
        raise InvalidConfigError(f"{spec.label} needs a {spec.d}x{spec.d} matrix, got {g.shape}")
    if not is_member(spec, g, job.tolerances.membership):
        details = {"det": float(np.linalg.det(g))}
        if spec.kind == "SO2n":
            details["form_residual"] = form_residual(spec, g)
        raise NotInGroupError(f"Matrix is not in {spec.label}", details)
    point = cartan_projection_exact(spec, g)
    n1, n2 = cartan_projection_approx(spec, g)
    d1, d2 = wall_distances(spec, point)
    write_report({
        "config": job.model_dump(mode="json"),
        "exact": point.coords,
        "approx": [float(np.log(n1)), float(np.log(n2))],
        "wall_distances": [d1, d2],
    }, out, "project")
    return 0


def cmd_catalog(job: JobConfig, params: Dict[str, Any], out: Optional[Path], threads: int, run: bool) -> int:
    catalog = CatalogCapability().execute(CatalogInputs(group=job.group, seed=params["seed"]))
    rows: List[Dict[str, Any]] = []
    exit_code = 0
    for entry in catalog.entries:
        row = {
            "name": entry.name,
            "basis": [v.model_dump(mode="json") for v in entry.basis],
            "expected_rule": entry.expected.rule,
            "expected_cds": entry.expected.is_cds,
            "note": entry.note,
        }
        if run:
            verified = VerificationCapability().execute(VerificationInputs(
                group=job.group, basis=entry.basis, seed=params["seed"], budget=params["budget"],
                max_log_radius=params["max_log_radius"], threads=threads, tolerances=job.tolerances,
            ))
            row["exit_code"] = verified.exit_code
            row["agreement"] = verified.result.agreement if verified.result else None
            row["rule"] = verified.result.verdict.rule if verified.result else None
            if verified.exit_code != 0 and exit_code == 0:
                exit_code = verified.exit_code
        rows.append(row)
    write_report({"group": catalog.metadata, "entries": rows}, out, "catalog")
    return exit_code


def run(argv: Optional[List[str]] = None) -> int:
    """Entry point; returns the process exit code"""
    load_dotenv()
    args = build_parser().parse_args(argv)
    try:
        settings = Settings()
    except ValidationError as e:
        print(f"Invalid CARTANKIT_* environment: {e}", file=sys.stderr)
        return 2
    logging.basicConfig(
        level=getattr(logging, settings.log_level.upper(), logging.INFO),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )

    try:
        job = load_job(args)
        params = {
            "seed": resolve(args.seed, job.seed, settings.seed),
            "budget": resolve(args.budget, job.budget, settings.budget),
            "max_log_radius": resolve(args.max_log_radius, job.max_log_radius, settings.max_log_radius),
        }
        out = args.out or (Path(job.output.dir) if job.output.dir else None)
        if out is None and os.getenv("CARTANKIT_OUT"):
            out = Path(settings.out)
        logger.info(f"Running {args.command} on {job.group.kind} (seed {params['seed']})")

        if args.command == "classify":
            return cmd_classify(job, params, out)
        if args.command == "verify":
            return cmd_verify(job, params, out, settings.threads)
        if args.command == "sample":
            return cmd_sample(job, params, out, settings.threads)
        if args.command == "project":
            return cmd_project(job, out)
        return cmd_catalog(job, params, out, settings.threads, args.run)
    except CartanKitError as e:
        logger.error(f"{type(e).__name__}: {e}")
        print(json.dumps({"error": type(e).__name__, "message": str(e), "details": e.details}, default=str), file=sys.stderr)
        return e.exit_code
    except ValidationError as e:
        logger.error(f"Invalid input: {e}")
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
