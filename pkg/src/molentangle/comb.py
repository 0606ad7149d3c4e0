# src/molentangle/comb.py

"""Frequency-comb Raman arithmetic.

Frequencies are exact ``Fraction`` values in Hz; integer inputs stay
integers and a back-solved fractional repetition rate stays exact.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import numpy.typing as npt
from scipy.optimize import curve_fit

from .constants import (
    COMB_CARRIER_PI_US,
    DEFAULT_COMB_SIGN,
    DEFAULT_DELTA_F_REP_HZ,
    DEFAULT_N_TOLERANCE,
    DEFAULT_ROTATIONAL_TOLERANCE,
    DEFAULT_SCAN_POINTS,
    DEFAULT_SCAN_SHOTS,
)
from .errors import AmbiguousCombToothError
from .logs import getAppLogger


FloatArray = npt.NDArray[np.float64]
HzLike = int | str | Fraction | float


def to_hz(value: HzLike) -> Fraction:
    """Exact Hz; floats go through their shortest decimal repr."""
    if isinstance(value, float):
        if not math.isfinite(value):
            msg = f"Frequency must be finite, got {value}"
            raise ValueError(msg)
        return Fraction(repr(value))
    return Fraction(value)


def format_hz(value: Fraction) -> str:
    """Integers print exactly; fractions with nine decimals."""
    if value.denominator == 1:
        return str(value.numerator)
    return f"{float(value):.9f}"


@dataclass(frozen=True)
class CombParams:
    f_rep: Fraction
    f_aom: Fraction
    n: int
    sign: int = DEFAULT_COMB_SIGN

    def __post_init__(self) -> None:
        object.__setattr__(self, "f_rep", to_hz(self.f_rep))
        object.__setattr__(self, "f_aom", to_hz(self.f_aom))
        if self.f_rep <= 0 or self.f_aom <= 0:
            msg = "f_rep and f_aom must be positive"
            raise ValueError(msg)
        if self.n <= 0:
            msg = f"Comb tooth number must be positive, got {self.n}"
            raise ValueError(msg)
        if self.sign not in (-1, 1):
            msg = f"sign must be +1 or -1, got {self.sign}"
            raise ValueError(msg)


@dataclass(frozen=True)
class RotationalModel:
    b_rot: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "b_rot", to_hz(self.b_rot))
        if self.b_rot <= 0:
            msg = f"Rotational constant must be positive, got {self.b_rot}"
            raise ValueError(msg)

    def energy(self, j: int) -> Fraction:
        """Rigid rotor E_J = B·J(J+1)."""
        return self.b_rot * j * (j + 1)

    def transition(self, j_low: int, j_high: int) -> Fraction:
        return self.energy(j_high) - self.energy(j_low)


@dataclass(frozen=True)
class ToothRecovery:
    n: int
    ratio: Fraction
    residual: Fraction


@dataclass(frozen=True)
class RotationalCheck:
    f_raman: Fraction
    expected: Fraction
    deviation: float  # relative
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.deviation <= self.tolerance


@dataclass(frozen=True, eq=False)
class LineshapeScan:
    f_aom: FloatArray
    probability: FloatArray  # noiseless Rabi transfer
    measured: FloatArray  # shot estimate, equal to probability when shots == 0
    shots: int
    duration_s: float


@dataclass(frozen=True)
class TransitionDetermination:
    center_aom_1: float
    center_aom_2: float
    delta_f_rep: Fraction
    tooth: ToothRecovery
    f_raman: Fraction
    rotational: RotationalCheck


# --- arithmetic ------------------------------------------------------------------


def raman_frequency(p: CombParams) -> Fraction:
    """|N·f_rep + sign·2·f_AOM|, exact."""
    return abs(p.n * p.f_rep + p.sign * 2 * p.f_aom)


def recover_n(
    delta_f_aom: HzLike,
    delta_f_rep: HzLike,
    tolerance: float = DEFAULT_N_TOLERANCE,
) -> ToothRecovery:
    """N = 2Δf_AOM/Δf_rep rounded, failing when the residual exceeds tolerance."""
    d_aom, d_rep = to_hz(delta_f_aom), to_hz(delta_f_rep)
    if d_rep == 0:
        msg = "delta_f_rep must be non-zero"
        raise ValueError(msg)
    ratio = 2 * d_aom / d_rep
    n = math.floor(ratio + Fraction(1, 2))
    residual = abs(ratio - n)
    if residual > Fraction(tolerance):
        msg = (
            f"2*delta_f_aom/delta_f_rep = {float(ratio):.6f} is {float(residual):.3f} "
            f"from the nearest integer (tolerance {tolerance})"
        )
        raise AmbiguousCombToothError(msg)
    if n <= 0:
        msg = f"Recovered comb tooth N={n} is not positive"
        raise AmbiguousCombToothError(msg)
    return ToothRecovery(n, ratio, residual)


def check_rotational_consistency(
    f_raman: HzLike,
    model: RotationalModel,
    tolerance: float = DEFAULT_ROTATIONAL_TOLERANCE,
    *,
    j_low: int = 0,
    j_high: int = 2,
) -> RotationalCheck:
    """Compare against E_{j_high} − E_{j_low} (6B for J = 0 → 2)."""
    f = to_hz(f_raman)
    if f <= 0:
        msg = f"f_raman must be positive, got {f}"
        raise ValueError(msg)
    expected = model.transition(j_low, j_high)
    deviation = float(abs(f - expected) / expected)
    return RotationalCheck(f, expected, deviation, tolerance)


# --- lineshape ---------------------------------------------------------------------


def rabi_transfer(
    detuning: FloatArray | float, omega: float, duration_s: float
) -> FloatArray:
    """P(δ) = Ω²/(Ω²+δ²)·sin²(√(Ω²+δ²)·t/2), angular frequencies."""
    delta = np.asarray(detuning, dtype=np.float64)
    generalized = np.sqrt(omega**2 + delta**2)
    return omega**2 / generalized**2 * np.sin(generalized * duration_s / 2) ** 2


def scan_lineshape(
    params: CombParams,
    f_aom_values: Sequence[float] | FloatArray,
    f_transition: HzLike,
    *,
    pulse_area: float = math.pi,
    duration_us: float = COMB_CARRIER_PI_US,
    shots: int = 0,
    rng: np.random.Generator | None = None,
) -> LineshapeScan:
    """Transfer probability versus AOM frequency for a square pulse.

    ``params.f_aom`` is ignored; each scan point substitutes its own value.
    """
    if duration_us <= 0:
        msg = f"duration_us must be positive, got {duration_us}"
        raise ValueError(msg)
    duration_s = duration_us * 1e-6
    omega = pulse_area / duration_s
    target = to_hz(f_transition)
    f_aom = np.asarray(f_aom_values, dtype=np.float64)
    detuning = np.array(
        [
            2
            * math.pi
            * float(
                abs(params.n * params.f_rep + params.sign * 2 * to_hz(float(f)))
                - target
            )
            for f in f_aom
        ]
    )
    probability = rabi_transfer(detuning, omega, duration_s)
    if shots > 0:
        if rng is None:
            msg = "Shot noise needs an rng"
            raise ValueError(msg)
        measured = rng.binomial(shots, probability) / shots
    else:
        measured = probability.copy()
    return LineshapeScan(f_aom, probability, measured, shots, duration_s)


def fit_lineshape_center(scan: LineshapeScan, pulse_area: float = math.pi) -> float:
    """AOM frequency of the resonance; the Raman detuning moves 2 Hz per AOM Hz."""
    omega0 = pulse_area / scan.duration_s
    offset = float(scan.f_aom[int(np.argmax(scan.measured))])

    # center in kHz from the brightest point, Rabi rate relative to omega0
    def model(f: FloatArray, center_khz: float, omega_scale: float) -> FloatArray:
        detuning = 4 * math.pi * (f - offset - 1e3 * center_khz)
        return rabi_transfer(detuning, omega0 * omega_scale, scan.duration_s)

    shots = max(scan.shots, 1)
    variance = np.clip(scan.measured * (1 - scan.measured), 1 / shots, None) / shots
    params, _ = curve_fit(
        model,
        scan.f_aom,
        scan.measured,
        p0=(0.0, 1.0),
        sigma=np.sqrt(variance),
    )
    return offset + 1e3 * float(params[0])


def resonant_aom(params: CombParams, f_transition: HzLike) -> Fraction:
    """f_AOM that puts |N·f_rep + sign·2·f_AOM| on ``f_transition``."""
    comb = params.n * params.f_rep
    target = to_hz(f_transition)
    # sign * 2 f_aom = ±target - comb; pick the positive root
    for branch in (target, -target):
        f_aom = (branch - comb) / (2 * params.sign)
        if f_aom > 0:
            return f_aom
    msg = "No positive AOM frequency reaches the transition"
    raise ValueError(msg)


def determine_transition(
    f_transition: HzLike,
    f_rep: HzLike,
    n_true: int,
    model: RotationalModel,
    rng: np.random.Generator,
    *,
    delta_f_rep: HzLike = DEFAULT_DELTA_F_REP_HZ,
    sign: int = DEFAULT_COMB_SIGN,
    shots: int = DEFAULT_SCAN_SHOTS,
    points: int = DEFAULT_SCAN_POINTS,
    duration_us: float = COMB_CARRIER_PI_US,
) -> TransitionDetermination:
    """Simulate the two-scan tooth identification and absolute frequency.

    A lineshape scan at f_rep and another at f_rep + Δf_rep locate the AOM
    resonance twice; N follows from the AOM shift, f_Raman from the first
    scan, and the result is checked against the rotational model.
    """
    logger = getAppLogger()
    f_rep_1 = to_hz(f_rep)
    f_rep_2 = f_rep_1 + to_hz(delta_f_rep)
    half_span = 2 / (duration_us * 1e-6)

    centers: list[float] = []
    for rep in (f_rep_1, f_rep_2):
        world = CombParams(rep, Fraction(1), n_true, sign)
        resonance = float(resonant_aom(world, f_transition))
        grid = np.linspace(resonance - half_span, resonance + half_span, points)
        scan = scan_lineshape(
            world, grid, f_transition, duration_us=duration_us, shots=shots, rng=rng
        )
        centers.append(fit_lineshape_center(scan))
        logger.debug("Lineshape at f_rep=%s centred at f_aom=%.3f", rep, centers[-1])

    delta_f_aom = to_hz(centers[1]) - to_hz(centers[0])
    tooth = recover_n(delta_f_aom * sign * -1, to_hz(delta_f_rep))
    f_raman = raman_frequency(CombParams(f_rep_1, to_hz(centers[0]), tooth.n, sign))
    rotational = check_rotational_consistency(f_raman, model)
    return TransitionDetermination(
        centers[0], centers[1], to_hz(delta_f_rep), tooth, f_raman, rotational
    )


def comb_report_lines(
    *,
    params: CombParams | None = None,
    tooth: ToothRecovery | None = None,
    rotational: RotationalCheck | None = None,
) -> list[str]:
    rows: list[tuple[str, str]] = []
    if params is not None:
        rows += [
            ("f_rep_hz", format_hz(params.f_rep)),
            ("f_aom_hz", format_hz(params.f_aom)),
            ("n", str(params.n)),
            ("sign", f"{params.sign:+d}"),
            ("f_raman_hz", format_hz(raman_frequency(params))),
        ]
    if tooth is not None:
        rows += [
            ("recovered_n", str(tooth.n)),
            ("n_ratio", f"{float(tooth.ratio):.6f}"),
            ("n_residual", f"{float(tooth.residual):.6f}"),
        ]
    if rotational is not None:
        if params is None:
            rows.append(("f_raman_hz", format_hz(rotational.f_raman)))
        rows += [
            ("expected_hz", format_hz(rotational.expected)),
            ("relative_deviation", f"{rotational.deviation:.3e}"),
            ("rotational_pass", str(rotational.passed).lower()),
        ]
    width = max((len(key) for key, _ in rows), default=0)
    return [f"{key:<{width}} = {value}" for key, value in rows]
