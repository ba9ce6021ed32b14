"""Monte Carlo benchmark: random designs, planted truths, replicate harness.

Reproduces the standard sparse-recovery simulation protocol: rows of X drawn
i.i.d. from N(0, Sigma) for one of three covariance families, a sparse truth
with fixed magnitude sets and random signs, Gaussian noise, then fit ->
sparsify -> score per replicate, aggregated into a results table.
"""
from __future__ import annotations

import traceback
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .data import RegressionData, TruthSpec
from .errors import ConfigError, NumericalError
from .horseshoe import McmcConfig, gibbs_fit
from .metrics import AggregateMetrics, SelectionMetrics, aggregate, classify
from .savs import savs

__all__ = [
    "DesignSpec",
    "SignalSpec",
    "BenchConfig",
    "ReplicateRecord",
    "BenchReport",
    "SIGNAL_SETS",
    "covariance_entry",
    "generate_design",
    "generate_truth",
    "replicate_seeds",
    "run_replicates",
]

DESIGN_KINDS = ("independent", "compound_symmetry", "ar1")
COMPOUND_RHO = 0.5

SIGNAL_SETS = {
    "case1_set1": (1.50, 1.75, 2.00, 2.25, 2.50),
    "case1_set2": (0.75, 1.00, 1.25, 1.50, 1.75),
    "case2": (0.75, 1.00, 1.25, 1.50, 1.75, 2.00, 2.25, 2.50, 2.75, 3.00),
}

PLACEMENTS = ("uniform", "leading_block")


@dataclass(frozen=True)
class DesignSpec:
    kind: str
    n: int
    p: int
    rho: float | None = None

    def __post_init__(self):
        if self.kind not in DESIGN_KINDS:
            raise ConfigError(f"design kind must be one of {DESIGN_KINDS}, got {self.kind!r}")
        if self.n < 1 or self.p < 1:
            raise ConfigError(f"n and p must be positive, got n={self.n}, p={self.p}")
        if self.kind == "ar1":
            if self.rho is None or not 0.0 < self.rho < 1.0:
                raise ConfigError(f"ar1 requires rho in (0, 1), got {self.rho}")
        elif self.rho is not None:
            raise ConfigError(f"rho is only meaningful for ar1, got kind={self.kind!r}")


@dataclass(frozen=True)
class SignalSpec:
    case: str
    placement: str = "uniform"

    def __post_init__(self):
        if self.case not in SIGNAL_SETS:
            raise ConfigError(f"case must be one of {tuple(SIGNAL_SETS)}, got {self.case!r}")
        if self.placement not in PLACEMENTS:
            raise ConfigError(f"placement must be one of {PLACEMENTS}, got {self.placement!r}")

    @property
    def magnitudes(self) -> tuple[float, ...]:
        return SIGNAL_SETS[self.case]

    @property
    def s0(self) -> int:
        return len(self.magnitudes)


@dataclass(frozen=True)
class BenchConfig:
    design: DesignSpec
    signal: SignalSpec
    sigma: float = 1.5
    replicates: int = 50
    mcmc: McmcConfig = field(default_factory=McmcConfig)
    master_seed: int = 0
    skip_failures: bool = False

    def __post_init__(self):
        if self.replicates < 1:
            raise ConfigError(f"replicates must be >= 1, got {self.replicates}")
        if not self.sigma > 0:
            raise ConfigError(f"sigma must be positive, got {self.sigma}")
        if not 0 <= self.master_seed < 2**64:
            raise ConfigError(f"master_seed must be a 64-bit unsigned integer")
        if self.signal.s0 > self.design.p:
            raise ConfigError(
                f"signal set has {self.signal.s0} magnitudes but the design only has "
                f"p={self.design.p} columns"
            )


@dataclass(frozen=True)
class ReplicateRecord:
    replicate: int
    mcmc_seed: int
    metrics: SelectionMetrics
    selected_size: int
    true_support: tuple[int, ...]
    selected_support: tuple[int, ...]


@dataclass(frozen=True)
class BenchReport:
    config: BenchConfig
    records: tuple[ReplicateRecord, ...]
    summary: AggregateMetrics
    failures: tuple[tuple[int, str], ...] = ()


def covariance_entry(spec: DesignSpec, j: int, k: int) -> float:
    """Sigma[j, k] for the selected covariance family."""
    if not (0 <= j < spec.p and 0 <= k < spec.p):
        raise ConfigError(f"indices ({j}, {k}) out of range for p={spec.p}")
    if j == k:
        return 1.0
    if spec.kind == "independent":
        return 0.0
    if spec.kind == "compound_symmetry":
        return COMPOUND_RHO
    return float(spec.rho ** abs(j - k))


def generate_design(spec: DesignSpec, rng: np.random.Generator) -> np.ndarray:
    """n i.i.d. rows from N(0, Sigma), exploiting the covariance structure.

    Independent rows are raw normals; compound symmetry uses its
    rank-one-plus-diagonal form ``sqrt(1-r) z + sqrt(r) w 1``; the AR(1)
    family uses the causal recursion ``X_j = rho X_{j-1} + sqrt(1-rho^2) e_j``
    (an O(p) banded factor), so no dense p x p factorization is ever built.
    """
    n, p = spec.n, spec.p
    if spec.kind == "independent":
        return rng.standard_normal((n, p))
    if spec.kind == "compound_symmetry":
        z = rng.standard_normal((n, p))
        shared = rng.standard_normal(n)
        return np.sqrt(1.0 - COMPOUND_RHO) * z + np.sqrt(COMPOUND_RHO) * shared[:, None]
    rho = float(spec.rho)
    e = rng.standard_normal((n, p))
    X = np.empty((n, p))
    X[:, 0] = e[:, 0]
    scale = np.sqrt(1.0 - rho * rho)
    for j in range(1, p):
        X[:, j] = rho * X[:, j - 1] + scale * e[:, j]
    return X


def generate_truth(signal: SignalSpec, p: int, rng: np.random.Generator) -> TruthSpec:
    """Place the magnitude set, each times an independent random sign."""
    mags = np.asarray(signal.magnitudes)
    if mags.size > p:
        raise ConfigError(f"{mags.size} magnitudes do not fit into p={p} coordinates")
    if signal.placement == "uniform":
        support = rng.choice(p, size=mags.size, replace=False)
    else:
        support = np.arange(mags.size)
    signs = rng.integers(0, 2, size=mags.size) * 2 - 1
    beta0 = np.zeros(p)
    beta0[support] = mags * signs
    return TruthSpec.from_beta(beta0)


def replicate_seeds(master_seed: int, r: int) -> tuple[np.random.SeedSequence, int]:
    """Independent (data stream, sampler seed) pair for replicate r.

    A pure function of (master_seed, r): adding or removing other replicates
    cannot change what replicate r sees.
    """
    data_ss, mcmc_ss = np.random.SeedSequence([master_seed, r]).spawn(2)
    return data_ss, int(mcmc_ss.generate_state(1, np.uint64)[0])


def _run_one(args: tuple[BenchConfig, int]) -> ReplicateRecord | tuple[int, str]:
    config, r = args
    try:
        data_ss, mcmc_seed = replicate_seeds(config.master_seed, r)
        rng = np.random.default_rng(data_ss)
        X = generate_design(config.design, rng)
        truth = generate_truth(config.signal, config.design.p, rng)
        noise = config.sigma * rng.standard_normal(config.design.n)
        data = RegressionData.from_arrays(X, X @ truth.beta0 + noise)
        mcmc = replace(config.mcmc, seed=mcmc_seed, retain_draws=False)
        summary = gibbs_fit(data, mcmc)
        estimate = savs(summary.beta_mean, data.col_sq_norms)
        m = classify(estimate, truth)
        return ReplicateRecord(
            replicate=r,
            mcmc_seed=mcmc_seed,
            metrics=m,
            selected_size=len(estimate.support),
            true_support=tuple(sorted(truth.support)),
            selected_support=tuple(sorted(estimate.support)),
        )
    except Exception:
        if config.skip_failures:
            return (r, traceback.format_exc(limit=4))
        raise


def run_replicates(config: BenchConfig, workers: int = 1) -> BenchReport:
    """Run all replicates (optionally in parallel) and aggregate the scores.

    Each replicate owns an independent seeded stream, so the report is a pure
    function of the config regardless of worker count or scheduling.  A
    failing replicate aborts the run unless ``config.skip_failures`` is set,
    in which case it is logged with its index and excluded from aggregation.
    """
    if workers < 1:
        raise ConfigError(f"workers must be >= 1, got {workers}")
    tasks = [(config, r) for r in range(config.replicates)]
    if workers == 1:
        outcomes = [_run_one(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_run_one, tasks))
    records = tuple(o for o in outcomes if isinstance(o, ReplicateRecord))
    failures = tuple(o for o in outcomes if not isinstance(o, ReplicateRecord))
    if not records:
        raise NumericalError(
            f"all {config.replicates} replicates failed; first failure:\n{failures[0][1]}"
        )
    return BenchReport(
        config=config,
        records=records,
        summary=aggregate([rec.metrics for rec in records]),
        failures=failures,
    )
