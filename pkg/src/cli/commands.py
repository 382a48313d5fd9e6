"""
Subcommands: run, prior-simulate, eppf-check, calibrate, diagnose.

Each command returns a process exit code. Engine errors (NormCRMError)
print their message and exit with 2.
"""

import argparse
import logging
import math
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
import pandas as pd
import yaml
from pydantic import ValidationError
from scipy import stats

from config import settings
from crm_core import IntensityConfig, TruncationSpec
from diagnostics import fit_report
from eppf import (
    Composition,
    CalibrationTarget,
    bessel_eppf_bounds,
    calibrate_kappa,
    eppf_bessel,
    eppf_dirichlet,
    eppf_eps,
    integer_partitions,
    prior_kn,
    prior_mean_var_cov,
    prior_moments_monte_carlo,
)
from exceptions import ConfigValidationError, NormCRMError
from gibbs import ChainArchive, run_chains
from mixture import Dataset, GaussNIGConfig, LinDepConfig, predictive_density_grid
from .config_loader import ConfigLoader
from .ingest import ingest_csv
from .models import AIS_REFERENCE_VECTORS, RunConfig
from .simulate import simulate_dataset
from .writer import RunWriter

logger = logging.getLogger(__name__)

# mu-intervals of (B1, B2) for prior moment tables, in sd units of the mu marginal
MOMENT_SET_PAIRS: tuple[tuple[tuple[float, float], tuple[float, float]], ...] = (
    ((-math.inf, 0.0), (0.0, math.inf)),
    ((-1.0, 0.5), (-0.5, 1.0)),
    ((-2.0, 2.0), (-0.5, 0.5)),
)

CONVERGENCE_EPSILONS = (1e-2, 1e-4, 1e-6, 1e-8)


# ============================================================================
# Shared helpers
# ============================================================================

def load_dataset(config: RunConfig) -> Dataset:
    spec = config.data
    if spec.simulate is not None:
        seed = config.seed if spec.seed is None else spec.seed
        return simulate_dataset(spec.simulate, seed, spec.n)
    return ingest_csv(spec.path, spec.response, spec.covariates)


def resolve_kappa(config: RunConfig, writer: Optional[RunWriter] = None) -> float:
    if config.kappa is not None:
        return config.kappa
    result = calibrate_kappa(config.intensity.build(), config.epsilon, config.calibration, seed=config.seed)
    if writer is not None:
        writer.write_json("calibration.json", result.model_dump(mode="json"))
    return result.kappa


def response_grid(config: RunConfig, data: Dataset) -> np.ndarray:
    spread = float(data.y.max() - data.y.min()) or 1.0
    lower = config.grid.lower if config.grid.lower is not None else float(data.y.min()) - 0.1 * spread
    upper = config.grid.upper if config.grid.upper is not None else float(data.y.max()) + 0.1 * spread
    return np.linspace(lower, upper, config.grid.points)


def covariate_vectors(config: RunConfig, data: Dataset) -> list[Optional[np.ndarray]]:
    if not isinstance(config.model, LinDepConfig):
        return [None]
    if config.grid.covariate_vectors:
        return [np.asarray(v, dtype=float) for v in config.grid.covariate_vectors]
    if data.covariates == ("rcc", "Ht", "Wt"):
        return [np.asarray(v) for v in AIS_REFERENCE_VECTORS]
    return [data.X.mean(axis=0)]


def diagnose_chain(
    writer: RunWriter,
    chain_id: int,
    archive: ChainArchive,
    config: RunConfig,
    data: Dataset,
    model,
    subdir: str = "",
) -> dict:
    report, pi = fit_report(archive, data, model, loss_ratio=config.binder_loss_ratio)
    writer.write_report(chain_id, report, pi, subdir)
    return report.summary()


def _intensity_from_args(args) -> IntensityConfig:
    return IntensityConfig(kind=args.intensity, omega=args.omega, sigma=args.sigma)


def _print_table(frame: pd.DataFrame) -> None:
    print(frame.to_string(index=False))


# ============================================================================
# run
# ============================================================================

def cmd_run(args) -> int:
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.out is not None:
        overrides["output_dir"] = args.out
    config = ConfigLoader().load(args.config, overrides)

    writer = RunWriter.for_run(config.name, config.output_dir)
    data = load_dataset(config)
    kappa = resolve_kappa(config, writer)
    config = config.model_copy(update={"kappa": kappa, "calibration": None})
    writer.write_config(config)

    chain_config = config.chain_config()
    model = config.model.build().bind(data)
    logger.info(
        "Run started",
        extra={"directory": str(writer.directory), "n": data.n, "kappa": kappa, "chains": chain_config.n_chains},
    )
    archives = run_chains(chain_config, data, model)

    grid = response_grid(config, data)
    summaries = []
    for archive in archives:
        writer.write_archive(archive.chain_id, archive)
        summaries.append(diagnose_chain(writer, archive.chain_id, archive, config, data, model))
        for i, x in enumerate(covariate_vectors(config, data)):
            pred = predictive_density_grid(archive, model, grid, x=x, quantiles=config.grid.quantiles)
            writer.write_grid(archive.chain_id, i, pred)

    _print_table(pd.DataFrame(summaries))
    logger.info("Run finished", extra={"directory": str(writer.directory)})
    return 0


# ============================================================================
# diagnose
# ============================================================================

def cmd_diagnose(args) -> int:
    run_dir = Path(args.archive)
    config_path = run_dir / "config.yaml"
    if not config_path.exists():
        raise ConfigValidationError([{"field": "archive", "reason": f"No config.yaml in {run_dir}"}])
    config = ConfigLoader().load(config_path)
    data = load_dataset(config)
    model = config.model.build().bind(data)

    writer = RunWriter(args.out) if args.out else RunWriter(run_dir)
    subdir = "" if args.out else "diagnose"
    chain_dirs = sorted(p for p in run_dir.glob("chain_*") if p.is_dir())
    if not chain_dirs:
        raise ConfigValidationError([{"field": "archive", "reason": f"No chain_* directories in {run_dir}"}])
    summaries = []
    for path in chain_dirs:
        archive = ChainArchive.read(path)
        summaries.append(diagnose_chain(writer, archive.chain_id, archive, config, data, model, subdir))
    _print_table(pd.DataFrame(summaries))
    return 0


# ============================================================================
# prior-simulate
# ============================================================================

def moment_set_masses(base: GaussNIGConfig) -> list[tuple[float, float, float]]:
    """(P0(B1), P0(B2), P0(B1 & B2)) for each pair of mu-intervals under the NIG base."""
    # mu marginal: Student t with 2a dof, location m0, scale sqrt(b / (a kappa0))
    loc = base.m0 or 0.0
    marginal = stats.t(df=2.0 * base.a, loc=loc, scale=math.sqrt(base.b / (base.a * base.kappa0)))
    scale = marginal.std() if base.a > 1 else 1.0

    def mass(lo: float, hi: float) -> float:
        if not lo < hi:
            return 0.0
        return float(marginal.cdf(loc + hi * scale) - marginal.cdf(loc + lo * scale))

    out = []
    for (a1, b1), (a2, b2) in MOMENT_SET_PAIRS:
        out.append((mass(a1, b1), mass(a2, b2), mass(max(a1, a2), min(b1, b2))))
    return out


def cmd_prior_simulate(args) -> int:
    intensity = _intensity_from_args(args).build()
    trunc = TruncationSpec(epsilon=args.eps, kappa=args.kappa)
    rng = np.random.default_rng(args.seed)
    writer = RunWriter.for_run("prior_simulate", args.out)

    kn = prior_kn(intensity, trunc, args.n, reps=args.reps, rng=rng)
    kn_frame = pd.DataFrame({"k": kn.support, "prob": kn.probs, "se": kn.se})
    writer.write_frame("kn_prior.csv", kn_frame)

    rows = []
    base = GaussNIGConfig(kappa0=args.kappa0, a=args.a, b=args.b, m0=0.0)
    for i, masses in enumerate(moment_set_masses(base)):
        mean, var, cov = prior_mean_var_cov(intensity, trunc, masses)
        mc = prior_moments_monte_carlo(intensity, trunc, masses, args.moment_reps, rng)
        rows.append({
            "pair": i,
            "p0_b1": masses[0],
            "p0_b2": masses[1],
            "p0_both": masses[2],
            "mean": mean,
            "mean_mc": mc.mean,
            "mean_se": mc.mean_se,
            "var": var,
            "var_mc": mc.var,
            "var_se": mc.var_se,
            "cov": cov,
            "cov_mc": mc.cov,
            "cov_se": mc.cov_se,
        })
    moments = pd.DataFrame(rows)
    writer.write_frame("prior_moments.csv", moments)
    writer.write_json(
        "prior_summary.json",
        {"kn": kn.to_dict(), "intensity": repr(intensity), "kappa": args.kappa, "epsilon": args.eps},
    )

    print(f"E(K_{args.n}) = {kn.mean:.6g}  sd = {kn.sd:.6g}  ({kn.method})")
    _print_table(moments[["pair", "mean", "mean_mc", "var", "var_mc", "cov", "cov_mc"]])
    return 0


# ============================================================================
# eppf-check
# ============================================================================

def _limit_eppf(kind: str, comp: Composition, omega: float, kappa: float) -> float:
    if kind == "gamma":
        return eppf_dirichlet(comp, kappa)
    if kind == "bessel":
        return eppf_bessel(comp, omega, kappa)
    return math.nan


def cmd_eppf_check(args) -> int:
    cfg = _intensity_from_args(args)
    intensity = cfg.build()
    trunc = TruncationSpec(epsilon=args.eps, kappa=args.kappa)
    writer = RunWriter.for_run("eppf_check", args.out)

    values, normalization = [], []
    for n in range(1, args.nmax + 1):
        total = 0.0
        for counts in integer_partitions(n):
            comp = Composition(counts)
            p = eppf_eps(intensity, trunc, comp)
            limit = _limit_eppf(cfg.kind, comp, cfg.omega, args.kappa)
            mult = comp.set_partition_count()
            total += mult * p
            values.append({
                "composition": str(comp),
                "n": n,
                "k": comp.k,
                "multiplicity": mult,
                "eppf_eps": p,
                "eppf_limit": limit,
                "gap": abs(p - limit),
            })
        normalization.append({"n": n, "total": total, "residual": abs(total - 1.0)})

    values_frame = pd.DataFrame(values)
    norm_frame = pd.DataFrame(normalization)
    writer.write_frame("eppf.csv", values_frame)
    writer.write_frame("normalization.csv", norm_frame)

    if cfg.kind in ("gamma", "bessel"):
        conv = []
        for eps in CONVERGENCE_EPSILONS:
            t = TruncationSpec(epsilon=eps, kappa=args.kappa)
            gaps = [
                abs(eppf_eps(intensity, t, Composition(c)) - _limit_eppf(cfg.kind, Composition(c), cfg.omega, args.kappa))
                for n in range(2, args.nmax + 1)
                for c in integer_partitions(n)
            ]
            conv.append({"epsilon": eps, "max_gap": max(gaps) if gaps else 0.0})
        writer.write_frame("convergence.csv", pd.DataFrame(conv))
        _print_table(pd.DataFrame(conv))

    if cfg.kind == "bessel":
        rows = []
        for n in range(2, args.nmax + 1):
            for counts in integer_partitions(n):
                comp = Composition(counts)
                p_b = eppf_bessel(comp, cfg.omega, args.kappa)
                p_d = eppf_dirichlet(comp, args.kappa)
                lower, upper = bessel_eppf_bounds(comp, cfg.omega, args.kappa)
                rows.append({
                    "composition": str(comp),
                    "eppf_bessel": p_b,
                    "eppf_dirichlet": p_d,
                    "relative_gap": abs(p_b - p_d) / p_d,
                    "lower": lower,
                    "upper": upper,
                    "within_bounds": bool(lower <= p_b <= upper),
                })
        writer.write_frame("bessel_dirichlet.csv", pd.DataFrame(rows))

    _print_table(norm_frame)
    return 0


# ============================================================================
# calibrate
# ============================================================================

def cmd_calibrate(args) -> int:
    try:
        if args.target_ekn is not None:
            target = CalibrationTarget(kind="expected_kn", value=args.target_ekn, n=args.n)
        elif args.target_p2 is not None:
            target = CalibrationTarget(kind="pair_tie", value=args.target_p2)
        else:
            raise ConfigValidationError([{"field": "target", "reason": "Set --target-ekn or --target-p2"}])
    except ValidationError as e:
        raise ConfigValidationError(ConfigLoader()._parse_pydantic_errors(e))
    intensity = _intensity_from_args(args).build()
    result = calibrate_kappa(
        intensity,
        args.eps,
        target,
        reps=args.reps,
        seed=args.seed,
    )
    writer = RunWriter.for_run("calibrate", args.out)
    writer.write_json("calibration.json", result.model_dump(mode="json"))
    print(yaml.safe_dump(result.model_dump(mode="json"), sort_keys=False))
    return 0


# ============================================================================
# Parser
# ============================================================================

def _add_intensity_args(p: argparse.ArgumentParser, default_kind: str = "bessel") -> None:
    p.add_argument("--intensity", choices=["gamma", "gengamma", "bessel"], default=default_kind)
    p.add_argument("--omega", type=float, default=1.0)
    p.add_argument("--sigma", type=float, default=0.0)
    p.add_argument("--eps", type=float, default=settings.default_epsilon)
    p.add_argument("--seed", type=int, default=settings.default_seed)
    p.add_argument("--out", default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="normcrm", description="ε-NormCRM mixture engine")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a Gibbs sampler from a config file")
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(handler=cmd_run)

    p = sub.add_parser("prior-simulate", help="prior K_n law and P_eps(B) moment tables")
    _add_intensity_args(p)
    p.add_argument("--kappa", type=float, required=True)
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--reps", type=int, default=settings.prior_reps)
    p.add_argument("--moment-reps", type=int, default=settings.prior_reps)
    p.add_argument("--kappa0", type=float, default=0.01)
    p.add_argument("--a", type=float, default=2.0)
    p.add_argument("--b", type=float, default=1.0)
    p.set_defaults(handler=cmd_prior_simulate)

    p = sub.add_parser("eppf-check", help="eppf values, normalization and convergence tables")
    _add_intensity_args(p, default_kind="gamma")
    p.add_argument("--kappa", type=float, required=True)
    p.add_argument("--nmax", type=int, default=5)
    p.set_defaults(handler=cmd_eppf_check)

    p = sub.add_parser("calibrate", help="find kappa for a p_eps(2) or E(K_n) target")
    _add_intensity_args(p)
    p.add_argument("--target-ekn", type=float, default=None)
    p.add_argument("--target-p2", type=float, default=None)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--reps", type=int, default=None)
    p.set_defaults(handler=cmd_calibrate)

    p = sub.add_parser("diagnose", help="recompute the fit report of an existing run directory")
    p.add_argument("--archive", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(handler=cmd_diagnose)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except (NormCRMError, FileNotFoundError) as e:
        print(f"❌ {e}", file=sys.stderr)
        return 2
