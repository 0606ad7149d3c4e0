# src/molentangle/hilbert.py

"""Composite Hilbert space of atom ⊗ molecule ⊗ shared motional mode.

Basis ordering is lexicographic (atom, mol, n) with atom order S, D and
molecular order -3/2, -5/2, 0, so the flat index of a label is
``(atom * 3 + mol) * n_max + n``. Amplitude arrays reshape to
``(2, 3, n_max)`` in C order.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Iterator, Mapping
from dataclasses import dataclass, replace
from enum import Enum
from functools import lru_cache

import numpy as np
import numpy.typing as npt

from .constants import BOUNDARY_TOLERANCE, DEFAULT_N_MAX, DUMP_CUTOFF, NORM_TOLERANCE
from .errors import DimensionMismatchError, NormalizationError, TruncationError


ComplexArray = npt.NDArray[np.complex128]
BoolArray = npt.NDArray[np.bool_]


class AtomLevel(Enum):
    S = "S"  # bright
    D = "D"  # dark


class MolLevel(Enum):
    MINUS32 = "-3/2"
    MINUS52 = "-5/2"
    J0 = "0"
    LEAKED = "leaked"


ATOM_LEVELS: tuple[AtomLevel, ...] = (AtomLevel.S, AtomLevel.D)
QUBIT_MOL_LEVELS: tuple[MolLevel, ...] = (
    MolLevel.MINUS32,
    MolLevel.MINUS52,
    MolLevel.J0,
)

_ATOM_POS = {level: i for i, level in enumerate(ATOM_LEVELS)}
_MOL_POS = {level: i for i, level in enumerate(QUBIT_MOL_LEVELS)}


@dataclass(frozen=True)
class BasisLabel:
    atom: AtomLevel
    mol: MolLevel
    n: int

    def __post_init__(self) -> None:
        if self.n < 0:
            msg = f"Fock number must be non-negative, got {self.n}"
            raise ValueError(msg)

    def __str__(self) -> str:
        return f"{self.atom.value},{self.mol.value},{self.n}"


Predicate = Callable[[BasisLabel], bool]


def dimension(n_max: int) -> int:
    return len(ATOM_LEVELS) * len(QUBIT_MOL_LEVELS) * n_max


def basis_index(label: BasisLabel, n_max: int) -> int:
    """Flat index of a label; raises TruncationError when n >= n_max."""
    if label.n >= n_max:
        msg = f"Fock number {label.n} outside truncation n_max={n_max}"
        raise TruncationError(msg)
    if label.mol is MolLevel.LEAKED:
        msg = "Leaked is a classical flag, not a basis level"
        raise ValueError(msg)
    row = _ATOM_POS[label.atom] * len(QUBIT_MOL_LEVELS) + _MOL_POS[label.mol]
    return row * n_max + label.n


@lru_cache(maxsize=32)
def basis_labels(n_max: int) -> tuple[BasisLabel, ...]:
    """All labels in flat-index order."""
    return tuple(
        BasisLabel(atom, mol, n)
        for atom in ATOM_LEVELS
        for mol in QUBIT_MOL_LEVELS
        for n in range(n_max)
    )


def label_at(index: int, n_max: int) -> BasisLabel:
    return basis_labels(n_max)[index]


@lru_cache(maxsize=256)
def level_mask(
    n_max: int,
    atom: AtomLevel | None = None,
    mol: MolLevel | None = None,
    n: int | None = None,
) -> BoolArray:
    """Boolean mask over the flat basis; None leaves that factor unconstrained."""
    mask = np.ones((len(ATOM_LEVELS), len(QUBIT_MOL_LEVELS), n_max), dtype=np.bool_)
    if atom is not None:
        keep = np.zeros(len(ATOM_LEVELS), dtype=np.bool_)
        keep[_ATOM_POS[atom]] = True
        mask &= keep[:, None, None]
    if mol is not None:
        keep = np.zeros(len(QUBIT_MOL_LEVELS), dtype=np.bool_)
        if mol is not MolLevel.LEAKED:
            keep[_MOL_POS[mol]] = True
        mask &= keep[None, :, None]
    if n is not None:
        keep = np.zeros(n_max, dtype=np.bool_)
        if 0 <= n < n_max:
            keep[n] = True
        mask &= keep[None, None, :]
    flat = mask.reshape(-1)
    flat.setflags(write=False)
    return flat


# --- predicates ------------------------------------------------------------


def atom_is(level: AtomLevel) -> Predicate:
    return lambda label: label.atom is level


def mol_is(level: MolLevel) -> Predicate:
    return lambda label: label.mol is level


def fock_is(n: int) -> Predicate:
    return lambda label: label.n == n


def all_of(*predicates: Predicate) -> Predicate:
    return lambda label: all(p(label) for p in predicates)


# --- state container --------------------------------------------------------


@dataclass(frozen=True, eq=False)
class StateVector:
    """Dense amplitudes over the product basis plus the classical leak flag.

    Once ``leaked`` is set every label reports ``MolLevel.LEAKED``: the
    molecule has left the modelled manifold and its amplitudes only keep
    the atom/motion marginals meaningful.
    """

    amplitudes: ComplexArray
    n_max: int = DEFAULT_N_MAX
    leaked: bool = False

    def __post_init__(self) -> None:
        if self.n_max < 1:
            msg = f"n_max must be positive, got {self.n_max}"
            raise ValueError(msg)
        amps = np.array(self.amplitudes, dtype=np.complex128).reshape(-1)
        if amps.shape != (dimension(self.n_max),):
            msg = (
                f"Amplitude vector of length {amps.shape[0]} does not match "
                f"dimension {dimension(self.n_max)} for n_max={self.n_max}"
            )
            raise DimensionMismatchError(msg)
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def dim(self) -> int:
        return dimension(self.n_max)

    @property
    def probabilities(self) -> npt.NDArray[np.float64]:
        return np.abs(self.amplitudes) ** 2

    def norm_squared(self) -> float:
        return float(np.sum(self.probabilities))

    def amplitude(self, label: BasisLabel) -> complex:
        if self.leaked:
            return 0j
        return complex(self.amplitudes[basis_index(label, self.n_max)])

    def reported_label(self, index: int) -> BasisLabel:
        label = label_at(index, self.n_max)
        if self.leaked:
            return BasisLabel(label.atom, MolLevel.LEAKED, label.n)
        return label

    def nonzero(
        self, cutoff: float = DUMP_CUTOFF
    ) -> Iterator[tuple[BasisLabel, complex]]:
        for index in np.flatnonzero(np.abs(self.amplitudes) >= cutoff):
            yield self.reported_label(int(index)), complex(self.amplitudes[index])

    def with_amplitudes(self, amplitudes: ComplexArray) -> StateVector:
        return replace(self, amplitudes=amplitudes)

    def mark_leaked(self) -> StateVector:
        if self.leaked:
            return self
        return replace(self, leaked=True)

    def as_tensor(self) -> ComplexArray:
        """Amplitudes reshaped to (atom, mol, n)."""
        return self.amplitudes.reshape(
            len(ATOM_LEVELS), len(QUBIT_MOL_LEVELS), self.n_max
        )


def new_basis_state(label: BasisLabel, n_max: int = DEFAULT_N_MAX) -> StateVector:
    amps = np.zeros(dimension(n_max), dtype=np.complex128)
    amps[basis_index(label, n_max)] = 1.0
    return StateVector(amps, n_max)


def superposition(
    components: Mapping[BasisLabel, complex],
    n_max: int = DEFAULT_N_MAX,
    *,
    normalize: bool = False,
) -> StateVector:
    """Build a state from label amplitudes.

    Raises NormalizationError unless the result is unit-norm or
    ``normalize`` is set.
    """
    amps = np.zeros(dimension(n_max), dtype=np.complex128)
    for label, value in components.items():
        amps[basis_index(label, n_max)] += value
    norm = float(np.linalg.norm(amps))
    if normalize:
        if norm == 0.0:
            msg = "Cannot normalize the zero vector"
            raise NormalizationError(msg)
        amps /= norm
    elif abs(norm**2 - 1.0) > NORM_TOLERANCE:
        msg = f"Components have squared norm {norm**2:.15g}, expected 1"
        raise NormalizationError(msg)
    return StateVector(amps, n_max)


def _same_space(a: StateVector, b: StateVector) -> None:
    if a.n_max != b.n_max:
        msg = f"State spaces differ: n_max={a.n_max} vs n_max={b.n_max}"
        raise DimensionMismatchError(msg)


def inner_product(a: StateVector, b: StateVector) -> complex:
    """⟨a|b⟩, conjugate-linear in ``a``."""
    _same_space(a, b)
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def state_fidelity(target: StateVector, state: StateVector) -> float:
    """|⟨target|state⟩|²."""
    return abs(inner_product(target, state)) ** 2


def population(state: StateVector, predicate: Predicate) -> float:
    """Total probability on labels matching ``predicate``.

    Leaked states report every label with ``MolLevel.LEAKED``.
    """
    mask = np.fromiter(
        (predicate(state.reported_label(i)) for i in range(state.dim)),
        dtype=np.bool_,
        count=state.dim,
    )
    return float(np.sum(state.probabilities[mask]))


def masked_population(state: StateVector, mask: BoolArray) -> float:
    return float(np.sum(state.probabilities[mask]))


def check_norm(state: StateVector, tolerance: float = NORM_TOLERANCE) -> None:
    deviation = abs(state.norm_squared() - 1.0)
    if deviation > tolerance:
        msg = f"State norm deviates from 1 by {deviation:.3e}"
        raise NormalizationError(msg)


def boundary_population(state: StateVector) -> float:
    """Population on the last kept Fock level n = n_max - 1."""
    return masked_population(state, level_mask(state.n_max, n=state.n_max - 1))


def check_truncation(
    state: StateVector, tolerance: float = BOUNDARY_TOLERANCE
) -> None:
    boundary = boundary_population(state)
    if boundary > tolerance:
        msg = (
            f"Population {boundary:.3e} on truncation boundary n={state.n_max - 1}; "
            "increase n_max"
        )
        raise TruncationError(msg)


# --- text dump ---------------------------------------------------------------


def dump_state(state: StateVector, cutoff: float = DUMP_CUTOFF) -> str:
    """One "atom,mol,n,re,im" line per amplitude with |a| >= cutoff."""
    lines = [
        f"{label},{amp.real:.17g},{amp.imag:.17g}"
        for label, amp in state.nonzero(cutoff)
    ]
    return "\n".join(lines) + ("\n" if lines else "")


def parse_state_dump(text: str, n_max: int = DEFAULT_N_MAX) -> StateVector:
    amps = np.zeros(dimension(n_max), dtype=np.complex128)
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        parts = line.split(",")
        if len(parts) != 5:  # noqa: PLR2004
            msg = f"line {lineno}: expected atom,mol,n,re,im, got {line!r}"
            raise ValueError(msg)
        atom, mol = AtomLevel(parts[0]), MolLevel(parts[1])
        if mol is MolLevel.LEAKED:
            msg = f"line {lineno}: leaked states carry no molecular amplitudes"
            raise ValueError(msg)
        label = BasisLabel(atom, mol, int(parts[2]))
        amps[basis_index(label, n_max)] = complex(float(parts[3]), float(parts[4]))
    norm = float(np.sum(np.abs(amps) ** 2))
    if not math.isclose(norm, 1.0, abs_tol=1e-9):
        msg = f"Dumped state has squared norm {norm:.12g}"
        raise NormalizationError(msg)
    return StateVector(amps, n_max)
