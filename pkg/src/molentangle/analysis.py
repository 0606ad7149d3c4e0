# src/molentangle/analysis.py

"""Parity-fringe fitting, fidelity bounds and bootstrap uncertainties."""

from __future__ import annotations

import csv
import io
import math
from collections import defaultdict
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from functools import partial
from pathlib import Path

import numpy as np
import numpy.typing as npt
from scipy.optimize import curve_fit

from .constants import (
    DEFAULT_BOOTSTRAP_RESAMPLES,
    MIN_BOOTSTRAP_RESAMPLES,
    MIN_FRINGE_POINTS,
    UNIFORM_PHASE_VARIANCE,
)
from .errors import DegenerateFitError, InsufficientDataError
from .hilbert import AtomLevel
from .logs import getAppLogger
from .measurement import (
    FIDELITY_KEYS,
    PopulationEstimate,
    estimate_populations,
    parity_standard_error,
    parity_values,
)
from .protocols import QubitKind
from .records import MolOutcome, TrialRecord
from .utils import Stream, ordered_map, trial_rng


FloatArray = npt.NDArray[np.float64]

PLOT_COLUMNS = ("phi_a", "parity", "sigma", "model_value")


@dataclass(frozen=True)
class FringePoint:
    phi_a: float
    parity: float
    sigma: float
    n_trials: int = 1

    def __post_init__(self) -> None:
        if not -1.0 - 1e-12 <= self.parity <= 1.0 + 1e-12:
            msg = f"Parity {self.parity} outside [-1, 1]"
            raise ValueError(msg)
        if self.sigma < 0:
            msg = f"sigma must be non-negative, got {self.sigma}"
            raise ValueError(msg)


@dataclass(frozen=True, eq=False)
class FringeFit:
    """Π(φ) = C·cos(2φ + φ₀) with C ≥ 0 and φ₀ in (−π, π]."""

    contrast: float
    phi0: float
    covariance: FloatArray  # over (C, φ₀)
    chi2: float
    dof: int

    @property
    def sigma_contrast(self) -> float:
        return math.sqrt(max(0.0, float(self.covariance[0, 0])))

    @property
    def sigma_phi0(self) -> float:
        return math.sqrt(max(0.0, float(self.covariance[1, 1])))

    @property
    def reduced_chi2(self) -> float:
        return self.chi2 / self.dof if self.dof > 0 else math.nan


@dataclass(frozen=True)
class FidelityReport:
    p_low: float
    p_high: float
    contrast: float
    fidelity: float
    sigma_fidelity: float

    @property
    def entangled(self) -> bool:
        return self.fidelity > 0.5  # noqa: PLR2004

    @property
    def entangled_2sigma(self) -> bool:
        return self.fidelity - 2 * self.sigma_fidelity > 0.5  # noqa: PLR2004

    @property
    def above_unity(self) -> bool:
        return self.fidelity > 1.0


@dataclass(frozen=True)
class BootstrapResult:
    sigma_contrast: float
    sigma_phi0: float
    sigma_fidelity: float
    resamples: int


def wrap_phase(phi: float) -> float:
    """Map onto (−π, π]."""
    wrapped = math.remainder(phi, 2 * math.pi)
    return math.pi if wrapped <= -math.pi else wrapped


def fringe_model(phi: FloatArray | float, contrast: float, phi0: float) -> FloatArray:
    return contrast * np.cos(2 * np.asarray(phi, dtype=np.float64) + phi0)


# --- fringe points ----------------------------------------------------------------


def group_by_phase(
    records: Iterable[TrialRecord],
) -> dict[float, list[TrialRecord]]:
    groups: dict[float, list[TrialRecord]] = defaultdict(list)
    for record in records:
        if record.valid and record.phi_a is not None:
            groups[record.phi_a].append(record)
    return dict(sorted(groups.items()))


def point_from_values(phi_a: float, values: FloatArray) -> FringePoint:
    return FringePoint(
        phi_a=phi_a,
        parity=float(np.mean(values)),
        sigma=parity_standard_error(values),
        n_trials=int(values.size),
    )


def fringe_points(
    records: Iterable[TrialRecord], qubit: QubitKind
) -> list[FringePoint]:
    """One point per distinct φ_a over valid records, sorted by φ_a."""
    return [
        point_from_values(phi, parity_values(group, qubit))
        for phi, group in group_by_phase(records).items()
    ]


# --- fitting --------------------------------------------------------------------


def _arrays(points: Sequence[FringePoint]) -> tuple[FloatArray, FloatArray, FloatArray]:
    if len(points) < MIN_FRINGE_POINTS:
        msg = f"Need at least {MIN_FRINGE_POINTS} fringe points, got {len(points)}"
        raise InsufficientDataError(msg)
    phi = np.array([p.phi_a for p in points], dtype=np.float64)
    y = np.array([p.parity for p in points], dtype=np.float64)
    sigma = np.array([p.sigma for p in points], dtype=np.float64)
    if np.any(sigma <= 0) or not np.all(np.isfinite(sigma)):
        msg = "Every fringe point needs a positive, finite sigma"
        raise ValueError(msg)
    return phi, y, sigma


def fit_fringe(points: Sequence[FringePoint]) -> FringeFit:
    """Weighted least squares via Π = a·cos2φ + b·sin2φ.

    C = √(a²+b²), φ₀ = atan2(−b, a); the (a, b) covariance is propagated to
    (C, φ₀) through the Jacobian. With C = 0 the phase is undetermined and
    gets the variance of a uniform phase.
    """
    phi, y, sigma = _arrays(points)
    design = np.column_stack((np.cos(2 * phi), np.sin(2 * phi)))
    weighted = design / sigma[:, None]
    if np.linalg.matrix_rank(weighted) < 2:  # noqa: PLR2004
        msg = "Fringe design is degenerate: all phases coincide modulo pi"
        raise DegenerateFitError(msg)

    normal = weighted.T @ weighted
    cov_ab = np.linalg.inv(normal)
    a, b = cov_ab @ (weighted.T @ (y / sigma))

    contrast = math.hypot(a, b)
    residuals = (y - design @ np.array([a, b])) / sigma
    chi2 = float(residuals @ residuals)

    if contrast > 0:
        jac = np.array(
            [
                [a / contrast, b / contrast],
                [b / contrast**2, -a / contrast**2],
            ]
        )
        covariance = jac @ cov_ab @ jac.T
        phi0 = wrap_phase(math.atan2(-b, a))
    else:
        covariance = np.diag([float(np.trace(cov_ab)) / 2, UNIFORM_PHASE_VARIANCE])
        phi0 = 0.0

    getAppLogger().trace(
        "[fit_fringe] C=%.6f phi0=%.6f chi2=%.3f", contrast, phi0, chi2
    )
    return FringeFit(contrast, phi0, covariance, chi2, len(points) - 2)


def fit_fringe_nonlinear(
    points: Sequence[FringePoint], initial: FringeFit | None = None
) -> FringeFit:
    """Direct (C, φ₀) least squares; cross-check for ``fit_fringe``."""
    phi, y, sigma = _arrays(points)
    seed = initial if initial is not None else fit_fringe(points)
    p0 = (max(seed.contrast, 1e-3), seed.phi0)
    params, pcov = curve_fit(
        fringe_model, phi, y, p0=p0, sigma=sigma, absolute_sigma=True
    )
    contrast, phi0 = float(params[0]), float(params[1])
    if contrast < 0:
        contrast, phi0 = -contrast, phi0 + math.pi
    residuals = (y - fringe_model(phi, contrast, phi0)) / sigma
    return FringeFit(
        contrast,
        wrap_phase(phi0),
        np.asarray(pcov, dtype=np.float64),
        float(residuals @ residuals),
        len(points) - 2,
    )


# --- fidelity -----------------------------------------------------------------------


def fidelity(
    p_low: float,
    p_high: float,
    contrast: float,
    *,
    sigma_p_low: float = 0.0,
    sigma_p_high: float = 0.0,
    sigma_contrast: float = 0.0,
) -> FidelityReport:
    """F = ½(P₁ + P₂ + C) with σ_F from the input errors in quadrature."""
    for name, value in (("p_low", p_low), ("p_high", p_high), ("contrast", contrast)):
        if not 0.0 <= value <= 1.0:
            msg = f"{name} must lie in [0, 1], got {value}"
            raise ValueError(msg)
    for name, value in (
        ("sigma_p_low", sigma_p_low),
        ("sigma_p_high", sigma_p_high),
        ("sigma_contrast", sigma_contrast),
    ):
        if value < 0:
            msg = f"{name} must be non-negative, got {value}"
            raise ValueError(msg)
    value = (p_low + p_high + contrast) / 2
    sigma = math.sqrt(sigma_p_low**2 + sigma_p_high**2 + sigma_contrast**2) / 2
    return FidelityReport(p_low, p_high, contrast, value, sigma)


def fidelity_from_populations(
    populations: PopulationEstimate, fit: FringeFit
) -> FidelityReport:
    first, second = FIDELITY_KEYS[populations.qubit]
    return fidelity(
        populations.probability(first),
        populations.probability(second),
        min(fit.contrast, 1.0),
        sigma_p_low=populations.standard_error(first),
        sigma_p_high=populations.standard_error(second),
        sigma_contrast=fit.sigma_contrast,
    )


def format_with_uncertainty(value: float, sigma: float) -> str:
    """Concise notation with one significant digit of uncertainty: 0.87(3)."""
    if not math.isfinite(sigma) or sigma <= 0:
        return f"{value:.6g}"
    exponent = min(0, math.floor(math.log10(sigma)))
    sig = Decimal(repr(sigma)).quantize(Decimal(1).scaleb(exponent), ROUND_HALF_UP)
    if exponent < 0 and sig >= Decimal(1).scaleb(exponent + 1):
        # 0.096 rounds to 0.10: drop a digit
        exponent += 1
        sig = sig.quantize(Decimal(1).scaleb(exponent), ROUND_HALF_UP)
    quantum = Decimal(1).scaleb(exponent)
    central = Decimal(repr(round(value, 12))).quantize(quantum, ROUND_HALF_UP)
    digits = int(sig.scaleb(-exponent)) if exponent < 0 else int(sig)
    return f"{central}({digits})"


# --- bootstrap -----------------------------------------------------------------------


def _bootstrap_once(
    index: int,
    *,
    seed: int,
    phases: tuple[float, ...],
    groups: tuple[FloatArray, ...],
    population_outcomes: FloatArray | None,
) -> tuple[float, float, float]:
    rng = trial_rng(seed, index, Stream.BOOTSTRAP)
    points = [
        point_from_values(phi, rng.choice(values, size=values.size, replace=True))
        for phi, values in zip(phases, groups, strict=True)
    ]
    fit = fit_fringe(points)
    if population_outcomes is None:
        return fit.contrast, fit.phi0, math.nan
    # rows hold [in first fidelity key, in second fidelity key]
    rows = rng.integers(0, population_outcomes.shape[0], population_outcomes.shape[0])
    p_first, p_second = population_outcomes[rows].mean(axis=0)
    value = (float(p_first) + float(p_second) + min(fit.contrast, 1.0)) / 2
    return fit.contrast, fit.phi0, value


def circular_std(angles: FloatArray) -> float:
    resultant = float(np.abs(np.mean(np.exp(1j * angles))))
    if resultant >= 1.0:
        return 0.0
    return math.sqrt(-2 * math.log(resultant))


def _population_indicators(
    records: Iterable[TrialRecord], qubit: QubitKind
) -> FloatArray:
    keys = FIDELITY_KEYS[qubit]
    return np.array(
        [
            [r.valid and (r.atom_outcome, r.mol_outcome) == key for key in keys]
            for r in records
            if r.has_readout
        ],
        dtype=np.float64,
    ).reshape(-1, 2)


def bootstrap_uncertainty(
    records: Iterable[TrialRecord],
    qubit: QubitKind,
    *,
    resamples: int = DEFAULT_BOOTSTRAP_RESAMPLES,
    seed: int = 0,
    population_records: Iterable[TrialRecord] | None = None,
    workers: int = 1,
) -> BootstrapResult:
    """Per-φ_a nonparametric bootstrap of the fringe fit.

    Trials are resampled with replacement within each φ_a; each resample is
    refit and the spread of (C, φ₀, F) is reported. Without population
    records σ_F is taken as σ_C/2.
    """
    if resamples < MIN_BOOTSTRAP_RESAMPLES:
        msg = f"Need at least {MIN_BOOTSTRAP_RESAMPLES} resamples, got {resamples}"
        raise ValueError(msg)
    grouped = group_by_phase(records)
    groups = tuple(parity_values(g, qubit) for g in grouped.values())
    for phi, values in zip(grouped, groups, strict=True):
        if values.size < 2:  # noqa: PLR2004
            msg = f"Bootstrap needs at least 2 trials at phi_a={phi:.6g}"
            raise InsufficientDataError(msg)

    indicators = None
    if population_records is not None:
        indicators = _population_indicators(population_records, qubit)
        if indicators.shape[0] < 2:  # noqa: PLR2004
            msg = "Bootstrap needs at least 2 population trials"
            raise InsufficientDataError(msg)

    task = partial(
        _bootstrap_once,
        seed=seed,
        phases=tuple(grouped),
        groups=groups,
        population_outcomes=indicators,
    )
    samples = np.array(ordered_map(task, range(resamples), workers=workers))
    sigma_c = float(np.std(samples[:, 0], ddof=1))
    sigma_f = (
        float(np.std(samples[:, 2], ddof=1)) if indicators is not None else sigma_c / 2
    )
    result = BootstrapResult(
        sigma_contrast=sigma_c,
        sigma_phi0=circular_std(samples[:, 1]),
        sigma_fidelity=sigma_f,
        resamples=resamples,
    )
    getAppLogger().debug(
        "Bootstrap (%d resamples): sigma_C=%.4f sigma_phi0=%.4f",
        resamples,
        result.sigma_contrast,
        result.sigma_phi0,
    )
    return result


# --- synthetic data ------------------------------------------------------------------


def synthetic_fringe(
    phases: Sequence[float],
    counts: Sequence[int],
    contrast: float,
    phi0: float,
    rng: np.random.Generator,
    *,
    qubit: QubitKind = QubitKind.LOW,
    protocol: str = "synthetic",
) -> list[TrialRecord]:
    """Binomial trials whose mean parity follows C·cos(2φ + φ₀)."""
    if len(phases) != len(counts):
        msg = "phases and counts must have equal length"
        raise ValueError(msg)
    minus = (AtomLevel.S, MolOutcome.MINUS32)
    plus = (
        (AtomLevel.S, MolOutcome.MINUS52)
        if qubit is QubitKind.LOW
        else (AtomLevel.S, MolOutcome.J0)
    )
    records: list[TrialRecord] = []
    for phi, count in zip(phases, counts, strict=True):
        p_plus = (1 + float(fringe_model(phi, contrast, phi0))) / 2
        hits = rng.random(count) < p_plus
        for hit in hits:
            atom, mol = plus if hit else minus
            records.append(
                TrialRecord(len(records), protocol, float(phi), atom, mol, 0)
            )
    return records


# --- outputs -------------------------------------------------------------------------


def fit_report_lines(
    fit: FringeFit,
    *,
    qubit: QubitKind | None = None,
    bootstrap: BootstrapResult | None = None,
    report: FidelityReport | None = None,
    populations: PopulationEstimate | None = None,
) -> list[str]:
    """``key = value`` lines; both fit-covariance and bootstrap errors."""
    lines: list[str] = []
    if qubit is not None:
        lines.append(f"qubit = {qubit.value}")
    lines += [
        f"contrast = {fit.contrast:.6f}",
        f"contrast_sigma_fit = {fit.sigma_contrast:.6f}",
        f"phi0_rad = {fit.phi0:.6f}",
        f"phi0_sigma_fit = {fit.sigma_phi0:.6f}",
        f"chi2 = {fit.chi2:.4f}",
        f"dof = {fit.dof}",
    ]
    if bootstrap is not None:
        lines += [
            f"bootstrap_resamples = {bootstrap.resamples}",
            f"contrast_sigma_bootstrap = {bootstrap.sigma_contrast:.6f}",
            f"phi0_sigma_bootstrap = {bootstrap.sigma_phi0:.6f}",
        ]
    if populations is not None:
        for key in FIDELITY_KEYS[populations.qubit]:
            name = f"P_{key[0].value}_{key[1].value}"
            lines.append(
                f"{name} = {populations.probability(key):.6f}"
                f" +- {populations.standard_error(key):.6f}"
            )
    if report is not None:
        lines += [
            f"fidelity = {report.fidelity:.6f}",
            f"fidelity_sigma = {report.sigma_fidelity:.6f}",
            "fidelity_display = "
            + format_with_uncertainty(report.fidelity, report.sigma_fidelity),
            f"entangled = {str(report.entangled).lower()}",
            f"entangled_2sigma = {str(report.entangled_2sigma).lower()}",
            f"above_unity = {str(report.above_unity).lower()}",
        ]
        if bootstrap is not None:
            lines.append(f"fidelity_sigma_bootstrap = {bootstrap.sigma_fidelity:.6f}")
    return lines


def plot_rows(
    points: Sequence[FringePoint], fit: FringeFit
) -> list[tuple[float, float, float, float]]:
    return [
        (
            p.phi_a,
            p.parity,
            p.sigma,
            float(fringe_model(p.phi_a, fit.contrast, fit.phi0)),
        )
        for p in points
    ]


def format_plot_csv(points: Sequence[FringePoint], fit: FringeFit) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(PLOT_COLUMNS)
    for row in plot_rows(points, fit):
        writer.writerow(f"{value:.10g}" for value in row)
    return buffer.getvalue()


def write_plot_csv(path: Path, points: Sequence[FringePoint], fit: FringeFit) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(format_plot_csv(points, fit), encoding="utf-8")


def populations_for(
    records: Iterable[TrialRecord], qubit: QubitKind
) -> PopulationEstimate:
    """Populations from the rows that carry no analysis phase."""
    return estimate_populations((r for r in records if r.phi_a is None), qubit)
