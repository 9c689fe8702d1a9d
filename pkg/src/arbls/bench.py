"""Noise-contamination benchmark for BLS and its robust variants.

For each trial: seeded split, min-max scaling fitted on the training part,
contamination of the training targets only, one shared random hidden layer,
then every requested variant is trained and scored on the clean test
targets. The network structure is grid-searched once with plain BLS on
clean data and reused for every variant and noise level.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import logging
import time
from dataclasses import asdict, dataclass, field, replace
from typing import List, Optional, Tuple

import numpy as np

from .adaptive import AdaptiveConfig, arbls_fit
from .data import Dataset, NormalizationParams, load_csv, mae, rmse, split
from .kernels import KernelSpec
from .network import DEFAULT_LAMBDA, NetworkConfig, build_hidden, init_nodes
from .noise import OutlierSpec, StableSpec, add_stable_noise, inject_outliers
from .solvers import SolverConfig, irls_fit, ridge_solve

__all__ = [
    "VARIANTS",
    "NoiseSetting",
    "SearchRanges",
    "ExperimentConfig",
    "TrialRecord",
    "SummaryRow",
    "ExperimentReport",
    "structure_search",
    "run_experiment",
    "render_report",
]

log = logging.getLogger(__name__)

VARIANTS = ("bls", "huber", "cauchy", "welsch", "arbls")
DISPLAY = {
    "bls": "BLS",
    "huber": "M-BLS(Huber)",
    "cauchy": "M-BLS(Cauchy)",
    "welsch": "M-BLS(Welsch)",
    "arbls": "AR-BLS",
}


@dataclass(frozen=True)
class NoiseSetting:
    """``none``, ``outlier`` (``proportion``, range) or ``stable`` (``dispersion``, ``exponent``)."""

    mode: str = "none"
    proportion: float = 0.0
    low: float = 0.0
    high: float = 1.0
    dispersion: float = 0.1
    exponent: float = 1.5

    def __post_init__(self):
        if self.mode not in ("none", "outlier", "stable"):
            raise ValueError(f"unknown noise mode {self.mode!r}")
        if self.mode == "outlier":
            OutlierSpec(self.proportion, self.low, self.high)
        elif self.mode == "stable":
            StableSpec(self.dispersion, self.exponent)

    @classmethod
    def parse(cls, text):
        """Parse ``none``, ``outlier:P`` or ``stable:RHO,MU``."""
        text = text.strip().lower()
        mode, _, arg = text.partition(":")
        try:
            if mode == "none" and not arg:
                return cls()
            if mode == "outlier":
                return cls("outlier", proportion=float(arg))
            if mode == "stable":
                rho, mu = (float(v) for v in arg.split(","))
                return cls("stable", dispersion=rho, exponent=mu)
        except ValueError as exc:
            raise ValueError(f"bad noise setting {text!r}: {exc}") from None
        raise ValueError(f"bad noise setting {text!r}; expected none, outlier:P or stable:RHO,MU")

    @property
    def label(self):
        if self.mode == "outlier":
            return f"P={self.proportion * 100:g}%"
        if self.mode == "stable":
            return f"stable(rho={self.dispersion:g},mu={self.exponent:g})"
        return "clean"

    def apply(self, y, seed):
        if self.mode == "outlier":
            return inject_outliers(y, OutlierSpec(self.proportion, self.low, self.high, seed))[0]
        if self.mode == "stable":
            return add_stable_noise(y, StableSpec(self.dispersion, self.exponent, seed))
        return np.array(y, dtype=float)


def _span(lo, hi, step):
    if step < 1 or lo < 1 or hi < lo:
        raise ValueError(f"bad search range {lo}:{hi}:{step}")
    return tuple(range(lo, hi + 1, step))


@dataclass(frozen=True)
class SearchRanges:
    """Inclusive ``(low, high, step)`` ranges for n, q, m, p."""

    n: Tuple[int, int, int] = (1, 20, 1)
    q: Tuple[int, int, int] = (1, 20, 2)
    m: Tuple[int, int, int] = (1, 1, 1)
    p: Tuple[int, int, int] = (1, 200, 5)

    def candidates(self):
        return list(itertools.product(*(_span(*getattr(self, k)) for k in "nqmp")))

    @classmethod
    def parse(cls, text):
        """Parse ``"n=1:20:1;q=1:20:2;p=1:200:5"`` (missing keys keep defaults)."""
        kw = {}
        for part in filter(None, (s.strip() for s in text.split(";"))):
            key, _, rng = part.partition("=")
            vals = tuple(int(v) for v in rng.split(":"))
            if key not in "nqmp" or len(key) != 1 or len(vals) not in (1, 2, 3):
                raise ValueError(f"bad search range {part!r}")
            if len(vals) == 1:
                vals = (vals[0], vals[0], 1)
            elif len(vals) == 2:
                vals = (*vals, 1)
            kw[key] = vals
        return cls(**kw)


@dataclass(frozen=True)
class ExperimentConfig:
    data: Optional[str] = None
    target: str = "-1"
    has_header: bool = True
    variants: Tuple[str, ...] = VARIANTS
    noise: Tuple[NoiseSetting, ...] = (NoiseSetting(),)
    trials: int = 10
    split: float = 0.5
    seed: int = 0
    lam: float = DEFAULT_LAMBDA
    structure: Optional[Tuple[int, int, int, int]] = None
    search: SearchRanges = SearchRanges()
    solver: SolverConfig = SolverConfig()
    adaptive: AdaptiveConfig = AdaptiveConfig()
    denormalize: bool = False

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        bad = [v for v in self.variants if v not in VARIANTS]
        if bad:
            raise ValueError(f"unknown variants {bad}; choose from {VARIANTS}")
        if not self.noise:
            raise ValueError("at least one noise setting is required")
        if self.structure is not None:
            NetworkConfig(*self.structure, lam=self.lam)


@dataclass
class TrialRecord:
    variant: str
    noise: str
    trial: int
    seed: int
    rmse: float
    mae: float
    train_time: float
    alpha: Optional[float] = None
    iterations: int = 0


@dataclass
class SummaryRow:
    variant: str
    noise: str
    rmse_mean: float
    rmse_std: float
    mae_mean: float
    mae_std: float
    time_mean: float
    trials: int


@dataclass
class ExperimentReport:
    dataset: str
    structure: Tuple[int, int, int, int]
    variants: List[str]
    noise_levels: List[str]
    records: List[TrialRecord] = field(default_factory=list)

    def summary(self) -> List[SummaryRow]:
        rows = []
        for noise in self.noise_levels:
            for v in self.variants:
                recs = [r for r in self.records if r.variant == v and r.noise == noise]
                if not recs:
                    continue
                r_ = np.array([r.rmse for r in recs])
                m_ = np.array([r.mae for r in recs])
                t_ = np.array([r.train_time for r in recs])
                rows.append(SummaryRow(v, noise, float(r_.mean()), float(r_.std()),
                                       float(m_.mean()), float(m_.std()), float(t_.mean()),
                                       len(recs)))
        return rows

    def lookup(self, variant, noise) -> SummaryRow:
        for row in self.summary():
            if row.variant == variant and row.noise == noise:
                return row
        raise KeyError((variant, noise))

    def metric_table(self):
        """Summary without timing, for reproducibility comparisons."""
        return [
            (r.variant, r.noise, r.rmse_mean, r.rmse_std, r.mae_mean, r.mae_std)
            for r in self.summary()
        ]

    def to_dict(self):
        return {
            "dataset": self.dataset,
            "structure": list(self.structure),
            "variants": list(self.variants),
            "noise_levels": list(self.noise_levels),
            "records": [asdict(r) for r in self.records],
            "summary": [asdict(r) for r in self.summary()],
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            d["dataset"], tuple(d["structure"]), list(d["variants"]),
            list(d["noise_levels"]), [TrialRecord(**r) for r in d["records"]],
        )


def _derive_seed(*keys):
    return int(np.random.SeedSequence(list(keys)).generate_state(1, dtype=np.uint64)[0])


def structure_search(train: Dataset, ranges: SearchRanges = SearchRanges(),
                     lam=DEFAULT_LAMBDA, seed=0) -> NetworkConfig:
    """Grid-search (n, q, m, p) by plain-BLS RMSE on an internal 80/20 split.

    Ties go to the structure with fewer hidden nodes.
    """
    candidates = ranges.candidates()
    if not candidates:
        raise ValueError("empty structure search grid")
    if len(candidates) == 1:
        return NetworkConfig(*candidates[0], lam=lam, seed=seed)
    fit_part, val_part = split(train, 0.8, _derive_seed(seed, 1))
    best_key, best_cfg = None, None
    for n, q, m, p in candidates:
        cfg = NetworkConfig(n, q, m, p, lam=lam, seed=seed, strict=False)
        nodes = init_nodes(train.n_features, cfg)
        W = ridge_solve(build_hidden(fit_part.features, nodes), fit_part.targets, lam)
        score = rmse(val_part.targets, build_hidden(val_part.features, nodes) @ W)
        if not np.isfinite(score):
            continue
        key = (score, cfg.width, (n, q, m, p))
        if best_key is None or key < best_key:
            best_key, best_cfg = key, cfg
    if best_cfg is None:
        raise ArithmeticError("structure search produced no finite validation score")
    log.info("structure search picked %s (val RMSE %.5f)", best_cfg.structure(), best_key[0])
    return best_cfg


def _fit_variant(variant, A, y, cfg: ExperimentConfig):
    solver = replace(cfg.solver, lam=cfg.lam)
    if variant == "bls":
        return ridge_solve(A, y, cfg.lam), None, 1
    if variant == "arbls":
        W, tr = arbls_fit(A, y, replace(cfg.adaptive, solver=solver))
        return W, tr.alpha, tr.fit_trace.iterations
    W, tr = irls_fit(A, y, KernelSpec.from_name(variant), solver)
    return W, None, tr.iterations


def _load(cfg: ExperimentConfig, dataset):
    if dataset is not None:
        return dataset
    if cfg.data is None:
        raise ValueError("no dataset given")
    return load_csv(cfg.data, cfg.target, cfg.has_header)


def run_experiment(cfg: ExperimentConfig, dataset: Optional[Dataset] = None) -> ExperimentReport:
    """Run every (noise level, trial, variant) combination of ``cfg``."""
    ds = _load(cfg, dataset)
    trial_seeds = [_derive_seed(cfg.seed, t) for t in range(cfg.trials)]

    if cfg.structure is not None:
        structure = tuple(cfg.structure)
    else:
        train0, _ = split(ds, cfg.split, _derive_seed(trial_seeds[0], 0))
        structure = structure_search(
            NormalizationParams.fit(train0).transform(train0), cfg.search, cfg.lam,
            _derive_seed(cfg.seed, 99),
        ).structure()

    report = ExperimentReport(ds.name, structure, list(cfg.variants),
                              [n.label for n in cfg.noise])
    for t, tseed in enumerate(trial_seeds):
        train, test = split(ds, cfg.split, _derive_seed(tseed, 0))
        params = NormalizationParams.fit(train)
        train, test = params.transform(train), params.transform(test)
        net = NetworkConfig(*structure, lam=cfg.lam, seed=_derive_seed(tseed, 2), strict=False)
        nodes = init_nodes(ds.n_features, net)
        A_train = build_hidden(train.features, nodes)
        A_test = build_hidden(test.features, nodes)
        y_test = test.targets
        if cfg.denormalize:
            y_test = params.denormalize_target(y_test)
        for noise in cfg.noise:
            y_train = noise.apply(train.targets, _derive_seed(tseed, 1))
            for variant in cfg.variants:
                start = time.perf_counter()
                try:
                    W, alpha, iters = _fit_variant(variant, A_train, y_train, cfg)
                except Exception as exc:
                    raise RuntimeError(
                        f"variant {variant!r} failed in trial {t} ({noise.label}): {exc}"
                    ) from exc
                elapsed = time.perf_counter() - start
                pred = A_test @ W
                if cfg.denormalize:
                    pred = params.denormalize_target(pred)
                report.records.append(TrialRecord(
                    variant, noise.label, t, tseed, rmse(y_test, pred), mae(y_test, pred),
                    elapsed, alpha, iters,
                ))
    return report


def _plain(report: ExperimentReport, scale):
    rows = {(r.variant, r.noise): r for r in report.summary()}
    head = ["noise", *(DISPLAY[v] for v in report.variants)]
    lines = [head]
    for noise in report.noise_levels:
        cells = [(v, rows.get((v, noise))) for v in report.variants]
        scored = [r.rmse_mean for _, r in cells if r is not None]
        best = min(scored) if scored else None
        line = [noise]
        for _, r in cells:
            if r is None:
                line.append("-")
                continue
            mark = "*" if r.rmse_mean == best else ""
            line.append(f"{r.rmse_mean * scale:.2f}±{r.rmse_std * scale:.2f}{mark}")
        lines.append(line)
    widths = [max(len(l[j]) for l in lines) for j in range(len(head))]
    title = (f"{report.dataset}  structure (n,q,m,p)={tuple(report.structure)}  "
             f"test RMSE ± STD (x1e-2)  * best")
    body = "\n".join("  ".join(c.ljust(w) for c, w in zip(l, widths)).rstrip() for l in lines)
    return title + "\n" + body + "\n"


def _csv(report: ExperimentReport):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["variant", "noise", "rmse_mean", "rmse_std", "mae_mean", "mae_std",
                "train_time_mean", "trials"])
    for r in report.summary():
        w.writerow([r.variant, r.noise, repr(r.rmse_mean), repr(r.rmse_std), repr(r.mae_mean),
                    repr(r.mae_std), repr(r.time_mean), r.trials])
    return buf.getvalue()


def render_report(report: ExperimentReport, fmt="plain", scale=100.0) -> str:
    """Serialise a report as ``plain`` table, ``csv`` summary or full ``json``."""
    if fmt == "plain":
        return _plain(report, scale)
    if fmt == "csv":
        return _csv(report)
    if fmt == "json":
        return json.dumps(report.to_dict(), indent=2) + "\n"
    raise ValueError(f"unknown report format {fmt!r}")
