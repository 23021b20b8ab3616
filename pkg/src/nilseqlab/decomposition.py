"""Structured-plus-error splitting against a finite nilsequence dictionary.

A bounded signal is projected onto the span of the dictionary in the
empirical mean inner product (regularized least squares), the projection is
clipped to the closed unit disk pointwise, and the remainder is reported
with its density seminorm, its uniformity seminorm, and its worst residual
correlation against the dictionary.  The finite dictionary upper-bounds the
distance to the full structured class, so the epsilon check in the report
is advisory.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np

from .errors import BudgetError
from .nilmanifolds import BracketPhase, Dictionary, PolynomialPhase, eval_nilsequence
from .signals import (ScaleLike, Signal, Window, density_seminorm,
                      inner_product)
from .uniformity import GowersParams, GowersReport, ghk_seminorm

BOUND_SLACK = 1e-9


@dataclass(frozen=True)
class DictionarySpec:
    """Enumeration recipe for a polynomial-phase dictionary.

    One atom per tuple of coefficients on the grid ``j/Q`` (j = 0..Q-1),
    one grid per included degree; degree 0 is never gridded so the constant
    atom appears exactly once.  Optional bracket atoms add the pairs
    (alpha, cross) on the same grid.
    """

    step: int
    degrees: Union[Tuple[int, ...], None] = None
    freq_resolution: int = 64
    include_brackets: bool = False
    ridge: Union[float, None] = None
    budget: int = 4096

    def __post_init__(self) -> None:
        if not 1 <= self.step <= 3:
            raise ValueError("dictionary step must be 1..3")
        if self.freq_resolution < 1:
            raise ValueError("frequency resolution Q must be >= 1")
        degrees = self.degrees
        if degrees is None:
            degrees = tuple(range(1, self.step + 1))
        degrees = tuple(sorted(set(int(d) for d in degrees)))
        if any(d < 1 or d > self.step for d in degrees):
            raise ValueError("degrees must lie in 1..step")
        object.__setattr__(self, "degrees", degrees)
        if self.ridge is not None and self.ridge < 0:
            raise ValueError("ridge must be >= 0")

    def resolved_ridge(self, atom_count: int) -> float:
        if self.ridge is not None:
            return self.ridge
        return 1e-8 * atom_count


def build_dictionary(spec: DictionarySpec, w: Window) -> Dictionary:
    """Deterministic atom enumeration for a window.

    Atom order: polynomial phases in lexicographic coefficient order
    (lowest degree fastest), then bracket atoms if enabled.
    """
    Q = spec.freq_resolution
    grid = [j / Q for j in range(Q)]
    count = Q ** len(spec.degrees)
    if spec.include_brackets:
        count += Q * (Q - 1)
    if count > spec.budget:
        raise BudgetError(
            f"dictionary would hold {count} atoms, budget is {spec.budget}"
        )
    atoms: list = []
    for combo in itertools.product(*(grid for _ in spec.degrees)):
        coeffs = [0.0] * (max(spec.degrees) + 1)
        for d, c in zip(spec.degrees, combo):
            coeffs[d] = c
        atoms.append(PolynomialPhase(tuple(coeffs)))
    if spec.include_brackets:
        for alpha in grid:
            for cross in grid[1:]:
                atoms.append(BracketPhase(0.0, cross, alpha, 0.0))
    return Dictionary(tuple(atoms), spec.step)


def atom_matrix(dictionary: Dictionary, w: Window) -> np.ndarray:
    """Rows are the dictionary atoms evaluated on the window."""
    out = np.empty((len(dictionary), w.length), dtype=np.complex128)
    for i, atom in enumerate(dictionary.atoms):
        out[i] = eval_nilsequence(atom, w).values
    return out


def clip_to_unit_disk(values: np.ndarray) -> np.ndarray:
    """Radial projection onto the closed unit disk, pointwise.

    Never increases the distance to any point of the disk, so the residual
    against a bounded signal can only shrink.
    """
    mod = np.abs(values)
    divisor = np.where(mod > 1.0, mod, 1.0)
    return values / divisor


_SINGULAR_RTOL = 1e-12


def _solve_projection(a: Signal, psi: np.ndarray, ridge: float):
    n = a.window.length
    gram = np.conj(psi) @ psi.T / n
    rhs = np.conj(psi) @ a.values / n
    system = gram + ridge * np.eye(len(psi))
    singular_msg = "Gram matrix is singular; pass a ridge parameter > 0"
    if ridge == 0.0:
        # rounding hides exact rank deficiency from the LU solver; the
        # Cholesky pivots of the positive semidefinite Gram expose it
        try:
            chol = np.linalg.cholesky(system)
        except np.linalg.LinAlgError as exc:
            raise ValueError(singular_msg) from exc
        pivots = np.diagonal(chol).real ** 2
        if float(np.min(pivots)) < _SINGULAR_RTOL * float(np.max(pivots)):
            raise ValueError(singular_msg)
    try:
        coeffs = np.linalg.solve(system, rhs)
    except np.linalg.LinAlgError as exc:
        raise ValueError(singular_msg) from exc
    return coeffs, coeffs @ psi


def project_and_clip(a: Signal, dictionary: Dictionary, scale: ScaleLike,
                     ridge: float = 0.0, *, enforce_bound: bool = True
                     ) -> Tuple[Signal, np.ndarray]:
    """Least-squares projection in the window-mean inner product, clipped.

    Minimizes ``mean |a - sum_j c_j psi_j|^2 + ridge * |c|^2`` and returns
    the clipped combination together with the coefficients.  Requires
    ``sup |a| <= 1`` (the clipping argument needs it) unless the caller
    explicitly waives the check.
    """
    if enforce_bound and a.sup_norm > 1.0 + BOUND_SLACK:
        raise ValueError(
            f"signal sup-norm {a.sup_norm} exceeds 1; clipping requires a "
            "bounded input (pass enforce_bound=False to waive)"
        )
    density_seminorm(a, scale)  # validates the scale against the window
    psi = atom_matrix(dictionary, a.window)
    coeffs, combo = _solve_projection(a, psi, ridge)
    return Signal(a.window, clip_to_unit_disk(combo), 1.0), coeffs


@dataclass(frozen=True, eq=False)
class DecompositionReport:
    """Structured part, error part, and every diagnostic norm of the split."""

    atom_labels: Tuple[str, ...]
    coefficients: np.ndarray
    a_st: Signal
    a_er: Signal
    err2: float
    err_uniformity: GowersReport
    max_atom_correlation: float
    err2_preclip: float
    err2_postclip: float
    delta: float
    epsilon: float
    err2_within_epsilon: bool
    orthogonality_ok: bool

    def to_json_dict(self) -> dict:
        return {
            "coefficients": [
                {"atom": lab, "re": float(c.real), "im": float(c.imag)}
                for lab, c in zip(self.atom_labels, self.coefficients)
            ],
            "err2": self.err2,
            "errU": self.err_uniformity.value,
            "errU_report": self.err_uniformity.to_json_dict(),
            "max_atom_correlation": self.max_atom_correlation,
            "err2_preclip": self.err2_preclip,
            "err2_postclip": self.err2_postclip,
            "delta": self.delta,
            "epsilon": self.epsilon,
            "err2_within_epsilon": self.err2_within_epsilon,
            "orthogonality_ok": self.orthogonality_ok,
        }


def decompose(a: Signal, order: int, epsilon: float, spec: DictionarySpec,
              gowers: GowersParams, *, delta: Union[float, None] = None,
              enforce_bound: bool = True) -> DecompositionReport:
    """Split a bounded signal into clipped dictionary projection plus error.

    ``delta`` defaults to ``(epsilon / 16)^(2^order)``, the orthogonality
    threshold matching an anti-uniformity constant of 4; for inputs where
    that constant is not known, pass delta explicitly.  The epsilon flag is
    advisory: a finite dictionary only upper-bounds the distance to the
    structured class.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if enforce_bound and a.sup_norm > 1.0 + BOUND_SLACK:
        raise ValueError(f"signal sup-norm {a.sup_norm} exceeds 1")
    dictionary = build_dictionary(spec, a.window)
    psi = atom_matrix(dictionary, a.window)
    ridge = spec.resolved_ridge(len(dictionary))
    coeffs, combo = _solve_projection(a, psi, ridge)
    clipped = clip_to_unit_disk(combo)
    a_st = Signal(a.window, clipped, 1.0)
    a_er = a - a_st
    full = a.window.length
    err2_preclip = density_seminorm(Signal(a.window, a.values - combo), full) ** 2
    err2_postclip = density_seminorm(a_er, full) ** 2
    err_uniformity = ghk_seminorm(a_er, gowers)
    worst = 0.0
    for row in psi:
        atom_signal = Signal(a.window, row)
        corr = abs(inner_product(a_er, atom_signal, full))
        denom = max(1.0, density_seminorm(atom_signal, full))
        worst = max(worst, corr / denom)
    if delta is None:
        delta = (epsilon / 16.0) ** (2 ** order)
    return DecompositionReport(
        atom_labels=dictionary.labels,
        coefficients=coeffs,
        a_st=a_st,
        a_er=a_er,
        err2=err2_postclip,
        err_uniformity=err_uniformity,
        max_atom_correlation=worst,
        err2_preclip=err2_preclip,
        err2_postclip=err2_postclip,
        delta=delta,
        epsilon=epsilon,
        err2_within_epsilon=err2_postclip <= epsilon,
        orthogonality_ok=worst <= 2.0 * delta,
    )
