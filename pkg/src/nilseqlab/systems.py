"""Commuting unipotent affine maps on tori and their correlation sequences.

A transformation is ``x -> A x + alpha`` on the d-torus with A an integer
unipotent matrix, so every power has the closed form

    ``A^p = sum_k C(p, k) N^k``,   ``shift(p) = sum_k C(p, k+1) N^k alpha``

with ``N = A - I`` nilpotent; the generalized binomials are integers for
every integer p, which makes arbitrary (also negative and polynomially
large) iterates exact.

Two engines evaluate ``a(n) = integral of prod_j f_j(U_j(n) x) dx`` for
trigonometric observables f_j:

* the exact engine pushes each character through the affine map
  (``e_k o T = e^{2 pi i k.alpha} e_{A^T k}``) and keeps only the term
  combinations whose total frequency vanishes;
* the numeric engine transforms an equispaced product grid through the same
  affine maps and averages the raw integrand, which is exact below the
  aliasing threshold and is used as an independent cross-check.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence, Tuple, Union

import numpy as np

from ._exact import frac_part
from .errors import AliasingError, BudgetError
from .nilmanifolds import (BracketPhase, HeisenbergElement,
                           HeisenbergObservable, HeisenbergOrbit,
                           PolynomialPhase, eval_nilsequence)
from .signals import Signal, Window

MAX_ITERATE_DEGREE = 4
FREQUENCY_GUARD = 1 << 127
DEFAULT_QUAD_BUDGET = 1 << 24

Matrix = Tuple[Tuple[int, ...], ...]
IntPoly = Tuple[int, ...]


class FrequencyOverflowError(OverflowError):
    """Frequency bookkeeping exceeded the 2^127 sanity guard."""


def _as_int_matrix(m) -> Matrix:
    rows = tuple(tuple(int(v) for v in row) for row in m)
    d = len(rows)
    if any(len(row) != d for row in rows):
        raise ValueError("matrix must be square")
    arr = np.asarray(m, dtype=float)
    if not np.array_equal(arr, np.asarray(rows, dtype=float)):
        raise ValueError("matrix entries must be integers")
    return rows

def _mat_identity(d: int) -> Matrix:
    return tuple(tuple(1 if i == j else 0 for j in range(d)) for i in range(d))


def _mat_mul(a: Matrix, b: Matrix) -> Matrix:
    d = len(a)
    return tuple(
        tuple(sum(a[i][k] * b[k][j] for k in range(d)) for j in range(d))
        for i in range(d)
    )


def _mat_add(a: Matrix, b: Matrix, coeff: int = 1) -> Matrix:
    d = len(a)
    return tuple(
        tuple(a[i][j] + coeff * b[i][j] for j in range(d)) for i in range(d)
    )


def _mat_vec_transposed(m: Matrix, v: Tuple[int, ...]) -> Tuple[int, ...]:
    """``m^T v`` over the integers."""
    d = len(m)
    return tuple(sum(m[i][j] * v[i] for i in range(d)) for j in range(d))


def _is_zero(m: Matrix) -> bool:
    return all(all(v == 0 for v in row) for row in m)


def generalized_binomial(p: int, k: int) -> int:
    """``C(p, k)`` for any integer p; always an integer."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    if p >= 0:
        return math.comb(p, k)
    return (-1) ** k * math.comb(k - p - 1, k)


def poly_eval(coefficients: IntPoly, n: int) -> int:
    """Integer polynomial evaluation, constant term first."""
    acc = 0
    for c in reversed(coefficients):
        acc = acc * n + c
    return acc


@dataclass(frozen=True)
class ToralMap:
    """One affine torus map ``x -> matrix x + shift`` with shift in [0,1)^d."""

    matrix: Matrix
    shift: Tuple[float, ...]

    def __post_init__(self) -> None:
        matrix = _as_int_matrix(self.matrix)
        shift = tuple(float(s) for s in self.shift)
        if len(shift) != len(matrix):
            raise ValueError("shift dimension does not match matrix")
        if any(not 0.0 <= s < 1.0 for s in shift):
            raise ValueError("shift components must lie in [0, 1)")
        object.__setattr__(self, "matrix", matrix)
        object.__setattr__(self, "shift", shift)

    @property
    def dimension(self) -> int:
        return len(self.matrix)

    def shift_fractions(self) -> Tuple[Fraction, ...]:
        return tuple(Fraction(s) for s in self.shift)


@lru_cache(maxsize=256)
def _nilpotent_data(tm: ToralMap):
    """Powers N^k of the nilpotent part and the vectors N^k alpha (exact)."""
    d = tm.dimension
    nil = _mat_add(tm.matrix, _mat_identity(d), coeff=-1)
    powers = [_mat_identity(d)]
    for _ in range(1, d):
        powers.append(_mat_mul(powers[-1], nil))
    alpha = tm.shift_fractions()
    shift_vecs = []
    for pw in powers:
        shift_vecs.append(
            tuple(sum(Fraction(pw[i][j]) * alpha[j] for j in range(d))
                  for i in range(d))
        )
    return tuple(powers), tuple(shift_vecs), nil


def is_unipotent(tm: ToralMap) -> bool:
    powers, _, nil = _nilpotent_data(tm)
    return _is_zero(_mat_mul(powers[-1], nil))


def map_power(tm: ToralMap, p: int) -> Tuple[Matrix, Tuple[Fraction, ...]]:
    """Matrix and exact shift of ``tm^p`` for any integer p.

    Valid because the nilpotent expansion of A^p terminates at N^(d-1);
    the shift uses the hockey-stick identity
    ``sum_{j<p} C(j, k) = C(p, k+1)``, which extends to negative p through
    the generalized binomials.
    """
    powers, shift_vecs, _ = _nilpotent_data(tm)
    d = tm.dimension
    mat = None
    shift = [Fraction(0)] * d
    for k in range(d):
        ck = generalized_binomial(p, k)
        term = tuple(tuple(ck * v for v in row) for row in powers[k])
        mat = term if mat is None else _mat_add(mat, term)
        ck1 = generalized_binomial(p, k + 1)
        if ck1 != 0:
            vec = shift_vecs[k]
            shift = [s + ck1 * v for s, v in zip(shift, vec)]
    return mat, tuple(shift)


def _compose(outer: Tuple[Matrix, Tuple[Fraction, ...]],
             inner: Tuple[Matrix, Tuple[Fraction, ...]]):
    """Affine composition: apply ``inner`` first, then ``outer``."""
    m2, s2 = outer
    m1, s1 = inner
    d = len(m2)
    mat = _mat_mul(m2, m1)
    shift = tuple(
        sum(Fraction(m2[i][j]) * s1[j] for j in range(d)) + s2[i]
        for i in range(d)
    )
    return mat, shift


@dataclass(frozen=True)
class AffineToralSystem:
    """Finitely many affine torus maps intended to commute pairwise."""

    dimension: int
    transformations: Tuple[ToralMap, ...]

    def __post_init__(self) -> None:
        maps = tuple(self.transformations)
        if self.dimension < 1:
            raise ValueError("dimension must be >= 1")
        if not maps:
            raise ValueError("at least one transformation required")
        for tm in maps:
            if tm.dimension != self.dimension:
                raise ValueError("transformation dimension mismatch")
        object.__setattr__(self, "transformations", maps)

    @staticmethod
    def from_pairs(dimension: int, pairs: Sequence) -> "AffineToralSystem":
        maps = tuple(ToralMap(_as_int_matrix(m), tuple(a)) for m, a in pairs)
        return AffineToralSystem(dimension, maps)


@dataclass(frozen=True)
class SystemValidation:
    valid: bool
    violations: Tuple[str, ...]


COMMUTATION_TOL = 1e-12


def _mod1_distance(fr: Fraction) -> float:
    t = frac_part(fr)
    return min(t, 1.0 - t)


def validate_system(s: AffineToralSystem) -> SystemValidation:
    """Check unipotency and pairwise commutation; never raises.

    Commutation of ``x -> A_i x + a_i`` and ``x -> A_j x + a_j`` on the
    torus means ``A_i A_j = A_j A_i`` exactly and
    ``A_i a_j + a_i = A_j a_i + a_j (mod 1)``.  Haar measure is preserved
    automatically: a unipotent integer matrix has determinant 1.
    """
    violations: list[str] = []
    for idx, tm in enumerate(s.transformations):
        if not is_unipotent(tm):
            violations.append(f"transformation {idx}: matrix is not unipotent")
    maps = s.transformations
    for i in range(len(maps)):
        for j in range(i + 1, len(maps)):
            a, b = maps[i], maps[j]
            if _mat_mul(a.matrix, b.matrix) != _mat_mul(b.matrix, a.matrix):
                violations.append(f"pair ({i}, {j}): matrices do not commute")
                continue
            d = s.dimension
            ai, aj = a.shift_fractions(), b.shift_fractions()
            lhs = [
                sum(Fraction(a.matrix[r][c]) * aj[c] for c in range(d)) + ai[r]
                for r in range(d)
            ]
            rhs = [
                sum(Fraction(b.matrix[r][c]) * ai[c] for c in range(d)) + aj[r]
                for r in range(d)
            ]
            worst = max(_mod1_distance(x - y) for x, y in zip(lhs, rhs))
            if worst > COMMUTATION_TOL:
                violations.append(
                    f"pair ({i}, {j}): affine parts differ mod 1 by {worst:.3e}"
                )
    return SystemValidation(valid=not violations, violations=tuple(violations))


@dataclass(frozen=True)
class TrigObservable:
    """Finite character sum ``sum_t c_t e^{2 pi i k_t . x}`` on the d-torus."""

    terms: Tuple[Tuple[Tuple[int, ...], complex], ...]

    def __post_init__(self) -> None:
        terms = tuple(
            (tuple(int(v) for v in freq), complex(coeff))
            for freq, coeff in self.terms
        )
        if not terms:
            raise ValueError("observable needs at least one term")
        dims = {len(freq) for freq, _ in terms}
        if len(dims) != 1:
            raise ValueError("all frequency vectors must share one dimension")
        object.__setattr__(self, "terms", terms)

    @property
    def dimension(self) -> int:
        return len(self.terms[0][0])

    @property
    def bound(self) -> float:
        return float(sum(abs(c) for _, c in self.terms))


def character(freq: Sequence[int], coeff: complex = 1.0) -> TrigObservable:
    return TrigObservable(((tuple(int(v) for v in freq), complex(coeff)),))


@dataclass(frozen=True)
class QuadratureSpec:
    """Equispaced product grid with ``grid_size`` points per dimension."""

    grid_size: int

    def __post_init__(self) -> None:
        if self.grid_size < 2:
            raise ValueError("grid size must be >= 2")


@dataclass(frozen=True)
class CorrelationQuery:
    """System, observables, and the iterate polynomials p[i][j].

    ``iterates[i][j]`` is the integer-coefficient polynomial (constant term
    first) giving the exponent of transformation i in observable slot j, so
    slot j sees the point ``prod_i T_i^{p[i][j](n)} x``.
    """

    system: AffineToralSystem
    observables: Tuple[TrigObservable, ...]
    iterates: Tuple[Tuple[IntPoly, ...], ...]

    def __post_init__(self) -> None:
        obs = tuple(self.observables)
        if not obs:
            raise ValueError("need at least one observable")
        for o in obs:
            if o.dimension != self.system.dimension:
                raise ValueError("observable frequency dimension mismatch")
        ell = len(self.system.transformations)
        iters = tuple(
            tuple(tuple(int(c) for c in poly) for poly in row)
            for row in self.iterates
        )
        if len(iters) != ell:
            raise ValueError(f"iterates must have one row per transformation ({ell})")
        for row in iters:
            if len(row) != len(obs):
                raise ValueError("iterates must have one polynomial per slot")
            for poly in row:
                if len(poly) > MAX_ITERATE_DEGREE + 1:
                    raise ValueError(
                        f"iterate degree exceeds {MAX_ITERATE_DEGREE}"
                    )
        object.__setattr__(self, "observables", obs)
        object.__setattr__(self, "iterates", iters)

    def require_valid(self) -> None:
        report = validate_system(self.system)
        if not report.valid:
            raise ValueError(
                "invalid system: " + "; ".join(report.violations)
            )


def diagonal_query(system: AffineToralSystem,
                   observables: Sequence[TrigObservable]) -> CorrelationQuery:
    """The plain multi-correlation: slot j sees ``T_j^n``; requires one
    observable per transformation."""
    ell = len(system.transformations)
    if len(observables) != ell:
        raise ValueError("diagonal query needs one observable per map")
    iterates = tuple(
        tuple((0, 1) if i == j else (0,) for j in range(ell)) for i in range(ell)
    )
    return CorrelationQuery(system, tuple(observables), iterates)


def single_map_query(system: AffineToralSystem,
                     observables: Sequence[TrigObservable],
                     exponents: Sequence[int]) -> CorrelationQuery:
    """Slot j sees ``T^{k_j n}`` for a single-transformation system."""
    if len(system.transformations) != 1:
        raise ValueError("single_map_query needs exactly one transformation")
    if len(exponents) != len(observables):
        raise ValueError("one exponent per observable required")
    iterates = (tuple((0, int(k)) for k in exponents),)
    return CorrelationQuery(system, tuple(observables), iterates)


def _slot_affines(q: CorrelationQuery, n: int):
    """(matrix, exact shift) of ``prod_i T_i^{p[i][j](n)}`` for each slot j."""
    d = q.system.dimension
    out = []
    for j in range(len(q.observables)):
        acc = (_mat_identity(d), tuple(Fraction(0) for _ in range(d)))
        for i, tm in enumerate(q.system.transformations):
            p = poly_eval(q.iterates[i][j], n)
            acc = _compose(map_power(tm, p), acc)
        out.append(acc)
    return out


def _guard_frequency(freq: Tuple[int, ...]) -> None:
    if any(abs(v) > FREQUENCY_GUARD for v in freq):
        raise FrequencyOverflowError(
            "frequency overflow: component exceeds 2^127"
        )


def correlate_exact(q: CorrelationQuery, w: Window) -> Signal:
    """Correlation sequence by exact character calculus.

    For each n the integrand expands into products of pushed characters;
    a product integrates to its constant exactly when the total frequency
    vector vanishes, and to zero otherwise.  All frequency bookkeeping is
    exact integer arithmetic; phases are reduced mod 1 exactly before the
    single float exponential.
    """
    q.require_valid()
    values = np.zeros(w.length, dtype=np.complex128)
    term_lists = [obs.terms for obs in q.observables]
    for idx, n in enumerate(range(w.start, w.end)):
        affines = _slot_affines(q, n)
        pushed = []
        for (mat, shift), terms in zip(affines, term_lists):
            slot = []
            for freq, coeff in terms:
                new_freq = _mat_vec_transposed(mat, freq)
                _guard_frequency(new_freq)
                phase = sum(Fraction(k) * s for k, s in zip(freq, shift))
                slot.append((new_freq, coeff, phase))
            pushed.append(slot)
        total = 0.0 + 0.0j
        for combo in itertools.product(*pushed):
            freq_sum = [0] * q.system.dimension
            for new_freq, _, _ in combo:
                for c in range(q.system.dimension):
                    freq_sum[c] += new_freq[c]
            if any(freq_sum):
                continue
            phase = sum((item[2] for item in combo), Fraction(0))
            const = 1.0 + 0.0j
            for _, coeff, _ in combo:
                const *= coeff
            total += const * np.exp(2j * np.pi * frac_part(phase))
        values[idx] = total
    bound = 1.0
    for obs in q.observables:
        bound *= obs.bound
    return Signal(w, values, bound)


def required_grid_size(q: CorrelationQuery, w: Window) -> int:
    """Smallest grid size that cannot alias this query over the window.

    Aliasing happens when a nonzero combined frequency vector is divisible
    by G in every component; it is ruled out by taking G strictly larger
    than every component of every nonzero combined frequency.
    """
    q.require_valid()
    worst = 1
    term_lists = [obs.terms for obs in q.observables]
    for n in range(w.start, w.end):
        affines = _slot_affines(q, n)
        pushed = []
        for (mat, _), terms in zip(affines, term_lists):
            slot = []
            for freq, _ in terms:
                new_freq = _mat_vec_transposed(mat, freq)
                _guard_frequency(new_freq)
                slot.append(new_freq)
            pushed.append(slot)
        for combo in itertools.product(*pushed):
            freq_sum = [sum(col) for col in zip(*combo)]
            if any(freq_sum):
                worst = max(worst, max(abs(v) for v in freq_sum))
    return worst + 1


def correlate_numeric(q: CorrelationQuery, w: Window, quad: QuadratureSpec,
                      budget: int = DEFAULT_QUAD_BUDGET,
                      allow_aliased: bool = False) -> Signal:
    """Correlation sequence by grid quadrature of the raw integrand.

    Grid points are pushed through the affine maps (integer arithmetic for
    the matrix part) and the observables are evaluated at the transformed
    points.  Refuses grids below the aliasing threshold unless
    ``allow_aliased=True`` is passed explicitly.
    """
    q.require_valid()
    d = q.system.dimension
    G = quad.grid_size
    cost = G**d * w.length
    if cost > budget:
        raise BudgetError(
            f"quadrature cost G^d * |window| = {cost} exceeds budget {budget}"
        )
    needed = required_grid_size(q, w)
    if G < needed and not allow_aliased:
        raise AliasingError(
            f"grid size {G} would alias this query; need at least {needed}"
        )
    grid = np.indices((G,) * d).reshape(d, -1)  # (d, G^d)
    values = np.empty(w.length, dtype=np.complex128)
    for idx, n in enumerate(range(w.start, w.end)):
        prod = np.ones(grid.shape[1], dtype=np.complex128)
        for (mat, shift), obs in zip(_slot_affines(q, n), q.observables):
            mat_mod = np.array(
                [[int(v % G) for v in row] for row in mat], dtype=np.int64
            )
            transformed = (mat_mod @ grid) % G
            point = transformed.astype(float) / G
            shift_frac = np.array([frac_part(s) for s in shift])
            point = np.mod(point + shift_frac[:, None], 1.0)
            fval = np.zeros(grid.shape[1], dtype=np.complex128)
            for freq, coeff in obs.terms:
                phase = np.mod(np.asarray(freq, dtype=float) @ point, 1.0)
                fval += coeff * np.exp(2j * np.pi * phase)
            prod *= fval
        values[idx] = prod.mean()
    return Signal(w, values)


def disjoint_union_correlate(queries: Sequence[CorrelationQuery], w: Window,
                             weights: Union[Sequence[float], None] = None
                             ) -> Signal:
    """Correlation sequence of the disjoint-union system of several queries.

    On a disjoint union of tori carrying one query per component, every
    transformation and observable restricts componentwise, so the integral
    splits into the weighted sum of the component integrals.  With equal
    weights this realizes the average of the component sequences as a single
    correlation sequence, which is what makes the sequence classes linear.
    """
    if not queries:
        raise ValueError("need at least one component query")
    slots = {len(q.observables) for q in queries}
    if len(slots) != 1:
        raise ValueError("all components must share the observable count")
    if weights is None:
        weights = [1.0 / len(queries)] * len(queries)
    if len(weights) != len(queries):
        raise ValueError("one weight per component required")
    if abs(sum(weights) - 1.0) > 1e-12 or any(x < 0 for x in weights):
        raise ValueError("weights must be a probability vector")
    total = np.zeros(w.length, dtype=np.complex128)
    bound = 0.0
    for weight, q in zip(weights, queries):
        part = correlate_exact(q, w)
        total += weight * part.values
        bound += weight * (part.bound if part.bound is not None else 0.0)
    return Signal(w, total, bound)


# ---------------------------------------------------------------------------
# corpus generation for the three sequence classes
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class CorpusEntry:
    """One generated sequence with its provenance."""

    signal: Signal
    label: str
    params: dict


def _rotation_pair_query(alpha: float, beta: float) -> CorrelationQuery:
    system = AffineToralSystem.from_pairs(1, [(((1,),), (alpha,)),
                                              (((1,),), (beta,))])
    return diagonal_query(system, [character((1,)), character((-1,))])


def skew_spike_query(alpha: float, k1: int, k1p: int, k2: int) -> CorrelationQuery:
    """Skew-product pair whose correlation vanishes except at isolated n.

    Slot 1 sees S^n, slot 2 sees S^{2n} for the skew
    ``S(x, y) = (x + alpha, y + x)``; with frequencies (k1, k2) and
    (k1p, -k2) the combined x-frequency is ``k1 + k1p - n k2``, so the
    sequence is a single unimodular spike at ``n = (k1 + k1p) / k2`` when
    that is an integer.
    """
    system = AffineToralSystem.from_pairs(
        2, [(((1, 0), (1, 1)), (alpha, 0.0))]
    )
    observables = (character((k1, k2)), character((k1p, -k2)))
    iterates = (((0, 1), (0, 2)),)
    return CorrelationQuery(system, observables, iterates)


def _class_a_entry(ell: int, rng: np.random.Generator, w: Window,
                   freq_grid: Union[int, None]) -> CorpusEntry:
    def draw_freq() -> float:
        if freq_grid is not None:
            return int(rng.integers(0, freq_grid)) / freq_grid
        return float(rng.random())

    if ell == 1:
        c = float(rng.random()) * np.exp(2j * np.pi * rng.random())
        atom = PolynomialPhase((0.0,))
        sig = eval_nilsequence(atom, w).scale(c)
        return CorpusEntry(sig, f"A1:constant({c!r})", {"constant": str(c)})
    if ell == 2:
        alpha, theta = draw_freq(), float(rng.random())
        atom = PolynomialPhase((theta, alpha))
        return CorpusEntry(eval_nilsequence(atom, w), f"A2:{atom.label}",
                           {"alpha": alpha, "theta": theta})
    which = int(rng.integers(0, 3))
    if which == 0:
        atom = PolynomialPhase((float(rng.random()), float(rng.random()),
                                float(rng.random())))
    elif which == 1:
        atom = BracketPhase(float(rng.random()), float(rng.random()),
                            float(rng.random()), float(rng.random()))
    else:
        g = HeisenbergElement(float(rng.random()), float(rng.random()),
                              float(rng.random()))
        k = (int(rng.integers(-2, 3)), int(rng.integers(-2, 3)))
        atom = HeisenbergOrbit(g, HeisenbergObservable(horizontal=k))
    return CorpusEntry(eval_nilsequence(atom, w), f"A3:{atom.label}",
                       {"atom": atom.label})


def _zero_sum_frequencies(ell: int, rng: np.random.Generator) -> list[int]:
    ms = [int(rng.integers(-2, 3)) for _ in range(ell - 1)]
    ms.append(-sum(ms))
    return ms


def _class_b_entry(ell: int, rng: np.random.Generator, w: Window,
                   freq_grid: Union[int, None]) -> CorpusEntry:
    k = [math.factorial(ell) // i for i in range(1, ell + 1)]
    if freq_grid is not None:
        alpha = int(rng.integers(0, freq_grid)) / freq_grid
    else:
        alpha = float(rng.random())
    system = AffineToralSystem.from_pairs(1, [(((1,),), (alpha,))])
    ms = _zero_sum_frequencies(ell, rng)
    observables = [character((m,)) for m in ms]
    query = single_map_query(system, observables, k)
    sig = correlate_exact(query, w)
    return CorpusEntry(
        sig,
        f"B{ell}:rotation(alpha={alpha!r}, freqs={ms}, exponents={k})",
        {"alpha": alpha, "freqs": ms, "exponents": k},
    )


def _class_c_entry(ell: int, rng: np.random.Generator, w: Window,
                   freq_grid: Union[int, None], variant: str) -> CorpusEntry:
    use_skew = variant == "mixed" and ell == 2 and rng.random() < 0.25
    if use_skew:
        alpha = float(rng.random())
        k2 = int(rng.integers(1, 3))
        n_star = int(rng.integers(w.start + 1, w.end - 1))
        k1 = int(rng.integers(-3, 4))
        k1p = n_star * k2 - k1
        query = skew_spike_query(alpha, k1, k1p, k2)
        sig = correlate_exact(query, w)
        return CorpusEntry(
            sig,
            f"C2:skew-spike(alpha={alpha!r}, n*={n_star})",
            {"alpha": alpha, "spike_at": n_star, "spike_count": 1},
        )
    if ell == 2:
        alpha = float(rng.random())
        if freq_grid is not None:
            j = int(rng.integers(0, freq_grid))
            beta = (alpha - j / freq_grid) % 1.0
            delta = f"{j}/{freq_grid}"
        else:
            beta = float(rng.random())
            delta = repr((alpha - beta) % 1.0)
        query = _rotation_pair_query(alpha, beta)
        sig = correlate_exact(query, w)
        return CorpusEntry(
            sig,
            f"C2:rotations(alpha={alpha!r}, beta={beta!r}, delta={delta})",
            {"alpha": alpha, "beta": beta, "difference": delta},
        )
    alphas = [float(rng.random()) for _ in range(ell)]
    system = AffineToralSystem.from_pairs(
        1, [(((1,),), (a,)) for a in alphas]
    )
    ms = _zero_sum_frequencies(ell, rng)
    query = diagonal_query(system, [character((m,)) for m in ms])
    sig = correlate_exact(query, w)
    return CorpusEntry(
        sig,
        f"C{ell}:rotations(alphas={alphas}, freqs={ms})",
        {"alphas": alphas, "freqs": ms},
    )


def corpus_generate(family: str, ell: int, seed: int, w: Window,
                    count: int = 8, freq_grid: Union[int, None] = None,
                    variant: str = "mixed") -> list[CorpusEntry]:
    """Deterministic per-seed sample from one of the three sequence classes.

    Family "A" samples nilsequence atoms of step ell-1 (ell <= 3);
    family "B" samples single-transformation correlations with exponents
    ``k_i = ell!/i`` (ell <= 4); family "C" samples commuting-family
    correlations (ell <= 4).  ``freq_grid=Q`` aligns the generated base
    frequencies with the grid j/Q; ``variant="rotations"`` restricts family
    C to pure rotation pairs.
    """
    if family not in ("A", "B", "C"):
        raise ValueError(f"unknown class {family!r}")
    if variant not in ("mixed", "rotations"):
        raise ValueError(f"unknown variant {variant!r}")
    if family == "A" and not 1 <= ell <= 3:
        raise ValueError("class A supports ell in 1..3")
    if family in ("B", "C") and not 1 <= ell <= 4:
        raise ValueError(f"class {family} supports ell in 1..4")
    rng = np.random.default_rng(seed)
    entries = []
    for _ in range(count):
        if family == "A":
            entries.append(_class_a_entry(ell, rng, w, freq_grid))
        elif family == "B":
            entries.append(_class_b_entry(ell, rng, w, freq_grid))
        else:
            entries.append(_class_c_entry(ell, rng, w, freq_grid, variant))
    return entries
