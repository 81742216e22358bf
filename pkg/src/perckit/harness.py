"""Reproducible experiment driver: threshold scans, P(A_k) sweeps, trend checks.

Every stochastic run is keyed by a mandatory master seed; per-point seeds
are derived with splitmix64 and recorded in the output, and the success
counts are exact integers (estimates are recomputed from the integers at
output time).  Reruns with the same config produce byte-identical CSV.

The frozen CSV schema is

    k,model,q,s,L,trials,successes,estimate,stderr,seed
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from dataclasses import asdict, dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from .gap_process import prob_ak, prob_ak_log_bounds
from .lattice import CellState, Lattice, ModelSpec, Variant, reaches_boundary, run_to_fixpoint
from .rng import derive_seed, trial_generator
from .special_fn import lambda_k

__all__ = [
    "ExperimentConfig",
    "MCResult",
    "TrendReport",
    "PakRow",
    "scan_threshold",
    "trend_check_theorem1",
    "sweep_pak_bounds",
    "results_to_csv",
    "write_results",
    "default_trend_window",
]

CSV_HEADER = ["k", "model", "q", "s", "L", "trials", "successes", "estimate", "stderr", "seed"]

_LOCAL_VARIANTS = {
    "local": Variant.LOCAL_K,
    "modified": Variant.LOCAL_MODIFIED,
    "frobose": Variant.LOCAL_FROBOSE,
}


@dataclass(frozen=True)
class ExperimentConfig:
    """Grid definition for a threshold scan."""

    model: str
    k_values: Tuple[int, ...]
    L_values: Tuple[int, ...]
    q_values: Optional[Tuple[float, ...]] = None
    s_values: Optional[Tuple[float, ...]] = None
    trials: int = 1000
    seed: int = 0
    output: Optional[str] = None
    format: str = "csv"

    def __post_init__(self):
        if self.model not in _LOCAL_VARIANTS:
            raise ValueError(f"model must be one of {sorted(_LOCAL_VARIANTS)}")
        if (self.q_values is None) == (self.s_values is None):
            raise ValueError("exactly one of q_values or s_values is required")
        if not self.k_values or not self.L_values:
            raise ValueError("parameter grids must be nonempty")
        if not (self.q_values or self.s_values):
            raise ValueError("parameter grids must be nonempty")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.format not in ("csv", "json"):
            raise ValueError("format must be 'csv' or 'json'")
        object.__setattr__(self, "k_values", tuple(int(k) for k in self.k_values))
        object.__setattr__(self, "L_values", tuple(int(L) for L in self.L_values))
        if self.q_values is not None:
            object.__setattr__(self, "q_values", tuple(float(q) for q in self.q_values))
        if self.s_values is not None:
            object.__setattr__(self, "s_values", tuple(float(s) for s in self.s_values))

    @classmethod
    def from_json(cls, path: str) -> "ExperimentConfig":
        with open(path) as fh:
            raw = json.load(fh)
        return cls(
            model=raw["model"],
            k_values=tuple(raw["k_values"]),
            L_values=tuple(raw["L_values"]),
            q_values=tuple(raw["q_values"]) if "q_values" in raw else None,
            s_values=tuple(raw["s_values"]) if "s_values" in raw else None,
            trials=raw.get("trials", 1000),
            seed=raw["seed"],
            output=raw.get("output"),
            format=raw.get("format", "csv"),
        )

    def points(self):
        """(k, q, s, L) in grid order."""
        out = []
        if self.q_values is not None:
            pq = [(q, -math.log(q) if q > 0 else math.inf) for q in self.q_values]
        else:
            pq = [(math.exp(-s), s) for s in self.s_values]
        for k in self.k_values:
            for q, s in pq:
                for L in self.L_values:
                    out.append((k, q, s, L))
        return out


@dataclass
class MCResult:
    k: int
    model: str
    q: float
    s: float
    L: int
    trials: int
    successes: int
    seed: int
    wall_time: float = 0.0

    def __post_init__(self):
        if not 0 <= self.successes <= self.trials:
            raise ValueError("successes must lie in [0, trials]")

    @property
    def estimate(self) -> float:
        return self.successes / self.trials

    @property
    def stderr(self) -> float:
        p = self.estimate
        return math.sqrt(p * (1.0 - p) / self.trials)


def _variant_for(model: str, k: int) -> Variant:
    v = _LOCAL_VARIANTS[model]
    if v is Variant.LOCAL_K and k == 1:
        raise ValueError("the local k-model needs k >= 2; use modified/frobose for k = 1")
    return v


def _boundary_trials(spec: ModelSpec, L: int, trials: int, point_seed: int) -> int:
    """Count localized trials whose cluster crosses the quadrant window.

    The window is the northeast quadrant with the origin in the lower-left
    corner (the geometry of the growth-event constructions): success means
    the fixpoint cluster reaches the far right or top edge, so the full
    L-span of row/column costs is paid.  A centered origin would halve the
    effective radius at the same L and measurably flatten the
    metastability exponent.
    """
    successes = 0
    p_active = 1.0 - spec.q
    for t in range(trials):
        rng = trial_generator(point_seed, t)
        draws = rng.random((L, L))
        if draws[0, 0] >= p_active:
            continue  # origin empty: nothing ever grows
        cells = np.where(draws < p_active, np.uint8(CellState.OCCUPIED), np.uint8(CellState.EMPTY))
        cells[0, 0] = CellState.ACTIVE
        lat = Lattice(cells=cells, origin=(0, 0))
        fixed, _, converged = run_to_fixpoint(lat, spec)
        if converged and reaches_boundary(fixed, spec):
            successes += 1
    return successes


def _scan_point(args) -> MCResult:
    model, k, q, s, L, trials, point_seed = args
    spec = ModelSpec(variant=_variant_for(model, k), k=k, q=q)
    t0 = time.perf_counter()
    successes = _boundary_trials(spec, L, trials, point_seed)
    return MCResult(
        k=k,
        model=model,
        q=q,
        s=s,
        L=L,
        trials=trials,
        successes=successes,
        seed=point_seed,
        wall_time=time.perf_counter() - t0,
    )


def scan_threshold(config: ExperimentConfig, workers: int = 1) -> List[MCResult]:
    """Boundary-reach frequency over the config grid; deterministic per seed.

    Points fan out to a process pool when workers > 1; every point's seed
    is derived from its grid index alone and results come back merged in
    grid order, so the output is identical for any worker count.
    """
    jobs = [
        (config.model, k, q, s, L, config.trials, derive_seed(config.seed, idx))
        for idx, (k, q, s, L) in enumerate(config.points())
    ]
    if workers <= 1:
        return [_scan_point(job) for job in jobs]
    from concurrent.futures import ProcessPoolExecutor

    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_scan_point, jobs))


def results_to_csv(results: Sequence[MCResult]) -> str:
    """Frozen-schema CSV; wall_time is deliberately not a column."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in results:
        # repr: shortest exact round-trip, so reruns stay byte-identical
        writer.writerow(
            [
                r.k,
                r.model,
                repr(r.q),
                repr(r.s),
                r.L,
                r.trials,
                r.successes,
                repr(r.estimate),
                repr(r.stderr),
                r.seed,
            ]
        )
    return buf.getvalue()


def write_results(results: Sequence[MCResult], path: str, fmt: str = "csv") -> None:
    try:
        if fmt == "csv":
            with open(path, "w") as fh:
                fh.write(results_to_csv(results))
        elif fmt == "json":
            rows = []
            for r in results:
                d = asdict(r)
                d.pop("wall_time")
                d["estimate"] = r.estimate
                d["stderr"] = r.stderr
                rows.append(d)
            with open(path, "w") as fh:
                json.dump(rows, fh, indent=2)
                fh.write("\n")
        else:
            raise ValueError(f"unknown format {fmt!r}")
    except OSError as exc:
        raise OSError(f"cannot write results to {path}: {exc}") from exc


def default_trend_window(s: float) -> int:
    """L = ceil(8/s): large enough that the window does not clip critical droplets."""
    return int(math.ceil(8.0 / s))


@dataclass
class TrendReport:
    k: int
    model: str
    s_values: List[float]
    L_values: List[int]
    trials: int
    successes: List[int]
    estimates: List[float]
    stderrs: List[float]
    lambda_k: float
    slope: float
    intercept: float
    residuals: List[float]
    envelope_ratios: List[float]
    slope_window: Tuple[float, float]
    degenerate: bool

    @property
    def slope_in_window(self) -> bool:
        lo, hi = self.slope_window
        return lo <= self.slope <= hi

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2)


def trend_check_theorem1(
    k: int,
    s_grid: Sequence[float],
    trials: int,
    seed: int,
    L_rule: Callable[[float], int] = default_trend_window,
    model: Optional[str] = None,
) -> TrendReport:
    """Fit log P(reach boundary) against 1/s and report bracketing diagnostics.

    The fitted slope is compared with the window [-4 lambda_k, -lambda_k]
    (the metastability exponent is -2 lambda_k; desk scale sees it only up
    to bounded factors).  Residuals from the 2-parameter fit are scaled by
    the s^{-1/2} (log s^{-1})^{5/2} envelope; the constants are recorded,
    never asserted.  Degenerate fits (an estimate of 0 or 1 anywhere) are
    flagged and leave slope/residuals as NaN.
    """
    s_values = [float(s) for s in s_grid]
    if len(s_values) < 2 or any(
        not s1 > s2 for s1, s2 in zip(s_values, s_values[1:])
    ):
        raise ValueError("s_grid must be strictly decreasing with at least two points")
    if model is None:
        model = "local" if k >= 2 else "modified"
    if trials < 1:
        raise ValueError("trials must be >= 1")
    results = []
    for idx, s in enumerate(s_values):
        L = L_rule(s)
        spec = ModelSpec(variant=_variant_for(model, k), k=k, q=math.exp(-s))
        point_seed = derive_seed(seed, idx)
        successes = _boundary_trials(spec, L, trials, point_seed)
        results.append((s, L, successes, point_seed))

    estimates = [succ / trials for _, _, succ, _ in results]
    stderrs = [math.sqrt(p * (1 - p) / trials) for p in estimates]
    degenerate = any(p in (0.0, 1.0) for p in estimates)
    lam = lambda_k(k)
    if degenerate:
        slope = intercept = float("nan")
        residuals = [float("nan")] * len(s_values)
        ratios = [float("nan")] * len(s_values)
    else:
        x = np.array([1.0 / s for s in s_values])
        y = np.log(np.array(estimates))
        slope, intercept = np.polyfit(x, y, 1)
        fit = slope * x + intercept
        residuals = list(y - fit)
        ratios = [
            abs(r) / (s ** -0.5 * math.log(1.0 / s) ** 2.5)
            for r, s in zip(residuals, s_values)
        ]
    return TrendReport(
        k=k,
        model=model,
        s_values=s_values,
        L_values=[L for _, L, _, _ in results],
        trials=trials,
        successes=[succ for _, _, succ, _ in results],
        estimates=estimates,
        stderrs=stderrs,
        lambda_k=lam,
        slope=float(slope),
        intercept=float(intercept),
        residuals=[float(r) for r in residuals],
        envelope_ratios=[float(r) for r in ratios],
        slope_window=(-4.0 * lam, -lam),
        degenerate=degenerate,
    )


@dataclass
class PakRow:
    k: int
    s: float
    value: float
    log_value: float
    error_bound: float
    paper_log_lower: float
    paper_log_upper: float
    inside_lower: bool
    ratio_to_upper: float


def sweep_pak_bounds(
    k_list: Sequence[int], s_list: Sequence[float], tol: float = 1e-8
) -> List[PakRow]:
    """P(A_k) against the theorem bounds over a (k, s) grid.

    `inside_lower` is the deterministic non-asymptotic inequality
    value >= exp(-lambda_k/s); `ratio_to_upper` is value / upper, the
    empirical (1+o(1)) diagnostic (expected to drop below 1 as s shrinks
    for k >= 2, and to approach sqrt(2 pi) for k = 1, where the stated
    upper bound's o(1) absorbs a constant).
    """
    rows = []
    for k in k_list:
        for s in s_list:
            if not 0.0 < s < 1.0:
                raise ValueError("s values must lie in (0, 1)")
            res = prob_ak(k, s, tol)
            lo, hi = prob_ak_log_bounds(k, s)
            rows.append(
                PakRow(
                    k=k,
                    s=s,
                    value=res.value,
                    log_value=res.log_value,
                    error_bound=res.error_bound,
                    paper_log_lower=lo,
                    paper_log_upper=hi,
                    inside_lower=bool(res.log_value >= lo),
                    ratio_to_upper=float(math.exp(res.log_value - hi)),
                )
            )
    return rows
