"""Nonclassicality indicators built from the two-mode Pauli-like observables.

Four quantities are evaluated, each against an explicitly stated classical
bound:

* a Peres-Mermin-square expression for two beams, whose noncontextual
  bound 4 is established by brute-force enumeration, not assumed;
* linear entanglement witnesses obtained by substituting the bosonic
  observables for qubit Paulis in a real coefficient tensor, nonnegative on
  every separable state;
* a quadratic two-beam entanglement criterion and its nine-member family
  under cyclic index permutations per party;
* a three-beam Mermin expression over the dichotomized observables, with
  local-hidden-variable bound 2 (also re-derived by enumeration).

Each verdict carries a truncation interval: when the input state has a
nonzero ``norm_deficit`` the unresolved tail widens the admissible range,
and a verdict that straddles its bound is reported as inconclusive.
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .fock import (
    BeamSpace,
    ComplexOperator,
    DomainMismatchError,
    MultiBeamState,
    apply,
    build_space,
    expectation,
    tensor,
)
from .gpauli import g_minus, g_operator, p_r, s_r
from .states import BsvParams, EnsembleState, bsv_state, prob_diagonal

PM_BOUND = 4.0
LHV_BOUND = 2.0
LINE_COMMUTE_ATOL = 1e-12
LINE_PRODUCT_ATOL = 1e-12
SHORTCUT_ATOL = 1e-10
GRAM_PSD_ATOL = 1e-10
GRAM_TRACE_ATOL = 1e-10
VERDICT_ATOL = 1e-10
# Deficit multipliers: worst-case propagation of tail mass through the
# bracketed expectations (operator norm <= 2 per bracket, values <= 2,
# squared terms) and through the four Mermin products (norm 1 each).
NS_DEFICIT_FACTOR = 32.0
MERMIN_DEFICIT_FACTOR = 4.0


@dataclass(frozen=True)
class VerdictRecord:
    """One evaluated quantity with its bound, margin and truncation interval."""

    quantity: str
    value: float
    bound: float
    margin: float
    interval_lo: float
    interval_hi: float
    verdict: str

    def to_dict(self) -> dict:
        return {
            "quantity": self.quantity,
            "value": self.value,
            "bound": self.bound,
            "margin": self.margin,
            "interval": [self.interval_lo, self.interval_hi],
            "verdict": self.verdict,
        }


# ---------------------------------------------------------------------------
# Peres-Mermin square
# ---------------------------------------------------------------------------

# Cell (i, j) holds the observable pair (party-1 index, party-2 index).
PM_CELL_LABELS: dict[tuple[int, int], tuple[int, int]] = {
    (1, 1): (3, 0), (2, 1): (0, 3), (3, 1): (3, 3),
    (1, 2): (0, 1), (2, 2): (1, 0), (3, 2): (1, 1),
    (1, 3): (3, 1), (2, 3): (1, 3), (3, 3): (2, 2),
}

# The six measurement contexts (lines).  Each line's cells mutually
# commute; five line products equal +g0 x g0 while the line collecting
# the doubled-index cells {g3g3, g1g1, g2g2} multiplies to -g0 x g0 and
# enters the square expression with the minus sign.
PM_LINES: tuple[tuple[str, tuple[tuple[int, int], ...], int], ...] = (
    ("j1", ((1, 1), (2, 1), (3, 1)), +1),
    ("j2", ((1, 2), (2, 2), (3, 2)), +1),
    ("j3", ((1, 3), (2, 3), (3, 3)), +1),
    ("i1", ((1, 1), (1, 2), (1, 3)), +1),
    ("i2", ((2, 1), (2, 2), (2, 3)), +1),
    ("i3", ((3, 1), (3, 2), (3, 3)), -1),
)


@dataclass(frozen=True, eq=False)
class PeresMerminSquare:
    """The nine two-beam cell operators plus their six context products."""

    space: BeamSpace
    cells: dict[tuple[int, int], ComplexOperator]
    line_products: dict[str, ComplexOperator]
    operator: ComplexOperator
    max_commutator_residual: float


@functools.lru_cache(maxsize=8)
def _pm_square_cached(cutoff: int) -> PeresMerminSquare:
    return _build_pm_square(build_space(cutoff))


def build_pm_square(space: BeamSpace) -> PeresMerminSquare:
    """Assemble and self-check the square on the given per-beam space."""
    return _pm_square_cached(space.cutoff)


def _build_pm_square(space: BeamSpace) -> PeresMerminSquare:
    g = [g_operator(i, space) for i in range(4)]
    cells = {
        key: tensor([g[p1], g[p2]]) for key, (p1, p2) in PM_CELL_LABELS.items()
    }

    # Transcription guard: the three cells of every context must commute.
    worst = 0.0
    for _, line, _ in PM_LINES:
        for a, b in itertools.combinations(line, 2):
            residual = (cells[a] @ cells[b] - cells[b] @ cells[a]).max_abs()
            worst = max(worst, residual)
    if worst > LINE_COMMUTE_ATOL:
        raise AssertionError(
            f"cells within a context fail to commute (residual {worst:.3e})"
        )

    line_products = {
        name: cells[line[0]] @ cells[line[1]] @ cells[line[2]]
        for name, line, _ in PM_LINES
    }
    operator = None
    for name, _, sign in PM_LINES:
        term = line_products[name] if sign > 0 else -line_products[name]
        operator = term if operator is None else operator + term
    return PeresMerminSquare(
        space=space,
        cells=cells,
        line_products=line_products,
        operator=operator.with_hermitian_flag(),
        max_commutator_residual=worst,
    )


@dataclass(frozen=True)
class PmResult:
    """Square expression value with its diagonal-probability shortcut."""

    value: float
    shortcut_value: float
    p_diag: float
    norm_deficit: float

    @property
    def interval(self) -> tuple[float, float]:
        """Range admitted for the untruncated value.

        The truncated evaluation treats the missing tail as if it were all
        diagonal (contributing zero), so the true value sits between the
        operator value and the shortcut 6(1 - P(diagonal)), at most
        6 * deficit higher.
        """
        return self.value, self.value + 6.0 * self.norm_deficit


def pm_expectation(state: MultiBeamState, square: PeresMerminSquare | None = None) -> PmResult:
    """Evaluate the square expression by explicit operator products.

    The independently computed shortcut 6(1 - P(diagonal)) must agree with
    the operator value up to the tail mass weighted by the six contexts;
    disagreement beyond that signals an internal inconsistency and raises.
    """
    if state.n_beams != 2:
        raise DomainMismatchError("the square expression takes a two-beam state")
    if square is None:
        if state.domain[0] != state.domain[1]:
            raise DomainMismatchError("both beams must share one cutoff")
        square = build_pm_square(state.domain[0])
    value = expectation(square.operator, state)
    p_diag = prob_diagonal(state)
    shortcut = 6.0 * (1.0 - p_diag)
    if abs(value - shortcut) > SHORTCUT_ATOL + 6.0 * state.norm_deficit:
        raise RuntimeError(
            f"operator value {value!r} and shortcut {shortcut!r} disagree"
        )
    return PmResult(
        value=value,
        shortcut_value=shortcut,
        p_diag=p_diag,
        norm_deficit=state.norm_deficit,
    )


def contextuality_verdict(
    state: MultiBeamState, square: PeresMerminSquare | None = None
) -> VerdictRecord:
    """Violated iff the square expression exceeds 4 (equivalently P(diagonal) < 1/3)."""
    result = pm_expectation(state, square)
    lo, hi = result.interval
    if lo - PM_BOUND > 0.0:
        verdict = "violated"
    elif hi - PM_BOUND <= 0.0:
        verdict = "not_violated"
    else:
        verdict = "inconclusive"
    return VerdictRecord(
        quantity="peres_mermin_square",
        value=result.value,
        bound=PM_BOUND,
        margin=result.value - PM_BOUND,
        interval_lo=lo - PM_BOUND,
        interval_hi=hi - PM_BOUND,
        verdict=verdict,
    )


def contextuality_threshold(
    cutoff: int = 40,
    lo: float = 0.5,
    hi: float = 1.2,
    tol: float = 1e-6,
) -> float:
    """Locate, by bisection on the gain, where the verdict flips.

    P(diagonal) for the squeezed vacuum decreases with the gain, so the
    flip is the root of P(d) = 1/3 (closed form: acosh(3)/2).
    """
    def detects(gamma: float) -> bool:
        return prob_diagonal(bsv_state(BsvParams(gamma, cutoff))) < 1.0 / 3.0

    if detects(lo) or not detects(hi):
        raise ValueError(f"bracket [{lo}, {hi}] does not straddle the flip")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if detects(mid):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def nchv_expression(assignment: Mapping[tuple[int, int], float]) -> float:
    """The six-context expression for one noncontextual value assignment."""
    total = 0.0
    for _, line, sign in PM_LINES:
        product = 1.0
        for cell in line:
            product *= assignment[cell]
        total += sign * product
    return total


def nchv_bound_oracle(values: Sequence[int] = (-1, 0, 1)) -> int:
    """Brute-force maximum of the square expression over per-cell assignments.

    Enumerates every map cell -> values (3^9 assignments for the default
    trichotomic outcome set) and returns the exact maximum, which equals 4
    for both the dichotomic and the trichotomic outcome sets.
    """
    cells = sorted(PM_CELL_LABELS)
    best: int | float = -(10**9)
    for combo in itertools.product(values, repeat=len(cells)):
        assignment = dict(zip(cells, combo))
        total = 0
        for _, line, sign in PM_LINES:
            product = 1
            for cell in line:
                product *= assignment[cell]
            total += sign * product
        if total > best:
            best = total
    return best


# ---------------------------------------------------------------------------
# Witness mapping
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WitnessSpec:
    """Real coefficient tensor w over index tuples in {0,1,2,3}^n."""

    n_parties: int
    coefficients: Mapping[tuple[int, ...], float]

    def __post_init__(self) -> None:
        if self.n_parties not in (2, 3):
            raise ValueError(f"n_parties must be 2 or 3, got {self.n_parties}")
        if not self.coefficients:
            raise ValueError("witness needs at least one coefficient")
        for key, value in self.coefficients.items():
            if len(key) != self.n_parties or any(s not in (0, 1, 2, 3) for s in key):
                raise ValueError(f"bad coefficient index {key!r}")
            if not math.isfinite(value):
                raise ValueError(f"coefficient {key!r} is not finite")
        if all(v == 0 for v in self.coefficients.values()):
            raise ValueError("all witness coefficients are zero")


# Witness tailored to the three-beam GHZ-type states.
GHZ3_WITNESS = WitnessSpec(
    3,
    {
        (0, 0, 0): 1.5,
        (1, 1, 1): -1.0,
        (0, 3, 3): -0.5,
        (3, 0, 3): -0.5,
        (3, 3, 0): -0.5,
    },
)
# Two-party witnesses for the singlet and for phi+ respectively.
SINGLET_WITNESS = WitnessSpec(
    2, {(0, 0): 0.25, (1, 1): 0.25, (2, 2): 0.25, (3, 3): 0.25}
)
PHI_PLUS_WITNESS = WitnessSpec(
    2, {(0, 0): 0.25, (1, 1): -0.25, (2, 2): 0.25, (3, 3): -0.25}
)


def map_witness(spec: WitnessSpec, domain: BeamSpace | Sequence[BeamSpace]) -> ComplexOperator:
    """Boson image of the witness: sum_s w_s  g_{s_1} x ... x g_{s_n}."""
    if isinstance(domain, BeamSpace):
        domain = (domain,) * spec.n_parties
    else:
        domain = tuple(domain)
    if len(domain) != spec.n_parties:
        raise DomainMismatchError(
            f"witness has {spec.n_parties} parties but {len(domain)} spaces were given"
        )
    total: ComplexOperator | None = None
    for key, weight in sorted(spec.coefficients.items()):
        if weight == 0:
            continue
        term = float(weight) * tensor(
            [g_operator(s, space) for s, space in zip(key, domain)]
        )
        total = term if total is None else total + term
    assert total is not None
    return total.with_hermitian_flag()


def witness_expectation(
    spec: WitnessSpec, state: MultiBeamState | EnsembleState
) -> float:
    """Witness value on a pure state or a convex mixture (weighted member average).

    Nonnegative on every separable input; a negative value certifies
    entanglement.
    """
    if isinstance(state, EnsembleState):
        operator = map_witness(spec, state.domain)
        return float(
            sum(w * expectation(operator, member) for w, member in state.members)
        )
    operator = map_witness(spec, state.domain)
    return float(expectation(operator, state))


# ---------------------------------------------------------------------------
# Gram certificate
# ---------------------------------------------------------------------------


class DegenerateCertificateError(ValueError):
    """The state lives in the diagonal subspace, so the certificate trace vanishes."""


_PAULI = (
    np.eye(2, dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


@dataclass(frozen=True, eq=False)
class GramCertificate:
    """Positive-semidefinite overlap matrix certifying the qubit correspondence.

    ``matrix`` collects the overlaps of the 2^n vectors obtained by acting
    with the half-swap / half-projector pair on each beam; its trace equals
    the expectation of the tensored g0 projectors, and ``normalized`` is
    the unit-trace version, a valid n-qubit density matrix.  Witness
    expectations factor through it:  Tr[W normalized] * trace = <W_boson>.
    """

    matrix: np.ndarray
    trace: float
    normalized: np.ndarray
    min_eigenvalue: float

    def to_dict(self) -> dict:
        return {
            "trace": self.trace,
            "min_eigenvalue": self.min_eigenvalue,
            "matrix_real": self.matrix.real.tolist(),
            "matrix_imag": self.matrix.imag.tolist(),
            "normalized_real": self.normalized.real.tolist(),
            "normalized_imag": self.normalized.imag.tolist(),
        }


def _overlap_vectors(state: MultiBeamState) -> list[np.ndarray]:
    """Images of the state under every per-beam choice of (half-swap, half-projector)."""
    factors = [(s_r(space), p_r(space)) for space in state.domain]
    vectors = []
    for choice in itertools.product((0, 1), repeat=state.n_beams):
        op = tensor([factors[beam][pick] for beam, pick in enumerate(choice)])
        vectors.append(apply(op, state).amplitudes)
    return vectors


def gram_certificate(state: MultiBeamState) -> GramCertificate:
    """Overlap-matrix certificate of a pure multi-beam state.

    Raises DegenerateCertificateError for states inside the diagonal
    subspace (vanishing trace); verifies positivity and the trace identity
    before returning.
    """
    vectors = _overlap_vectors(state)
    n = len(vectors)
    matrix = np.empty((n, n), dtype=complex)
    for r in range(n):
        for c in range(n):
            matrix[r, c] = np.vdot(vectors[c], vectors[r])
    trace = float(matrix.trace().real)
    if trace < 1e-12:
        raise DegenerateCertificateError(
            "state lies in the diagonal subspace; certificate trace is 0"
        )
    g0_product = tensor([g_operator(0, space) for space in state.domain])
    reference = expectation(g0_product, state)
    if abs(trace - reference) > GRAM_TRACE_ATOL:
        raise RuntimeError(
            f"certificate trace {trace!r} deviates from projector expectation {reference!r}"
        )
    eigenvalues = np.linalg.eigvalsh(matrix)
    if eigenvalues[0] < -GRAM_PSD_ATOL:
        raise RuntimeError(f"certificate not positive semidefinite: {eigenvalues[0]!r}")
    return GramCertificate(
        matrix=matrix,
        trace=trace,
        normalized=matrix / trace,
        min_eigenvalue=float(eigenvalues[0]),
    )


def beam_gram(state: MultiBeamState) -> np.ndarray:
    """2x2 overlap matrix of a single-beam state (the per-factor certificate)."""
    if state.n_beams != 1:
        raise DomainMismatchError("beam_gram takes a one-beam state")
    return gram_certificate(state).matrix


def witness_qubit_value(spec: WitnessSpec, density: np.ndarray) -> float:
    """Tr[W rho] for the qubit-side witness with the same coefficients."""
    w = np.zeros_like(density)
    for key, weight in spec.coefficients.items():
        term = _PAULI[key[0]]
        for s in key[1:]:
            term = np.kron(term, _PAULI[s])
        w = w + weight * term
    return float(np.trace(w @ density).real)


# ---------------------------------------------------------------------------
# Quadratic two-beam criterion family
# ---------------------------------------------------------------------------

CYCLIC_PERMUTATIONS = ((1, 2, 3), (2, 3, 1), (3, 1, 2))


@dataclass(frozen=True)
class NsMember:
    """One member of the nine-condition family: permuted indices per party."""

    perm_party1: tuple[int, int, int]
    perm_party2: tuple[int, int, int]
    lhs_term1: float
    lhs_term2: float
    rhs: float
    slack: float
    violated: bool

    @property
    def lhs(self) -> float:
        return self.lhs_term1 + self.lhs_term2

    def to_dict(self) -> dict:
        return {
            "perm_party1": list(self.perm_party1),
            "perm_party2": list(self.perm_party2),
            "lhs_term1": self.lhs_term1,
            "lhs_term2": self.lhs_term2,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "slack": self.slack,
            "violated": self.violated,
        }


@dataclass(frozen=True)
class NsFamilyReport:
    members: tuple[NsMember, ...]
    detected: bool

    def to_dict(self) -> dict:
        return {
            "detected": self.detected,
            "members": [m.to_dict() for m in self.members],
        }


def _pair_expectation_table(state: MultiBeamState) -> dict[tuple[int, int], float]:
    """<g_i x g_j> for all 16 index pairs, via the reshaped two-beam product.

    With the amplitudes viewed as a matrix Psi (beam 1 rows), the joint
    action is (A x B) psi = A Psi B^T, so no Kronecker product is formed.
    """
    space1, space2 = state.domain
    psi = state.amplitudes.reshape(space1.dim, space2.dim)
    g1 = [g_operator(i, space1).matrix for i in range(4)]
    g2 = [g_operator(i, space2).matrix for i in range(4)]
    table: dict[tuple[int, int], float] = {}
    for i in range(4):
        left = g1[i] @ psi
        for j in range(4):
            image = (g2[j] @ left.T).T  # equals left @ g2[j]^T
            value = complex(np.vdot(psi, image))
            table[(i, j)] = float(value.real)
    return table


def ns_condition_family(state: MultiBeamState) -> NsFamilyReport:
    """Evaluate the quadratic criterion and its cyclic-permutation family.

    A member with party permutations (p, q) compares

        <g_p1 g_q1 + g_p2 g_q2>^2 + <g_p3 g_0 + g_0 g_q3>^2
            vs  <g_0 g_0 + g_p3 g_q3>^2

    and is violated (entanglement detected) when the left side exceeds the
    right beyond the truncation slack.  Detection semantics only: absence
    of violation is not reported as separability.
    """
    if state.n_beams != 2:
        raise DomainMismatchError("the criterion family takes a two-beam state")
    pairs = _pair_expectation_table(state)
    slack = VERDICT_ATOL + NS_DEFICIT_FACTOR * state.norm_deficit
    members = []
    for perm1 in CYCLIC_PERMUTATIONS:
        for perm2 in CYCLIC_PERMUTATIONS:
            t1 = pairs[(perm1[0], perm2[0])] + pairs[(perm1[1], perm2[1])]
            t2 = pairs[(perm1[2], 0)] + pairs[(0, perm2[2])]
            rhs = (pairs[(0, 0)] + pairs[(perm1[2], perm2[2])]) ** 2
            member = NsMember(
                perm_party1=perm1,
                perm_party2=perm2,
                lhs_term1=t1 * t1,
                lhs_term2=t2 * t2,
                rhs=rhs,
                slack=slack,
                violated=(t1 * t1 + t2 * t2) - rhs > slack,
            )
            members.append(member)
    return NsFamilyReport(members=tuple(members), detected=any(m.violated for m in members))


# ---------------------------------------------------------------------------
# Three-beam Mermin expression
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MerminResult:
    """Mermin expression value, its bound, and the structural cross-check."""

    value: float
    bound: float
    violated: bool
    interval_lo: float
    interval_hi: float
    verdict: str
    dichotomized: bool
    structural_expected: float | None

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "bound": self.bound,
            "margin": abs(self.value) - self.bound,
            "interval": [self.interval_lo, self.interval_hi],
            "verdict": self.verdict,
            "dichotomized": self.dichotomized,
            "structural_expected": self.structural_expected,
        }


def _is_pair_symmetric_triple(state: MultiBeamState) -> bool:
    """True when every support ket repeats one occupation pair across all
    three beams and the (p,m) and (m,p) amplitudes coincide."""
    if state.n_beams != 3:
        return False
    space = state.domain[0]
    if any(s != space for s in state.domain):
        return False
    dim = space.dim
    amps = state.amplitudes
    scale = np.abs(amps).max() or 1.0
    for flat in np.flatnonzero(np.abs(amps) > 1e-14):
        i3 = flat % dim
        i2 = (flat // dim) % dim
        i1 = flat // (dim * dim)
        if not (i1 == i2 == i3):
            return False
        n, m = space.basis[i1]
        partner = space.index[(m, n)]
        mirrored = amps[(partner * dim + partner) * dim + partner]
        if abs(amps[flat] - mirrored) > 1e-12 * scale:
            return False
    return True


def mermin_bell_value(state: MultiBeamState, dichotomized: bool = True) -> MerminResult:
    """<b1 b1 b1 - b1 b2 b2 - b2 b1 b2 - b2 b2 b1> with b_i per beam.

    With ``dichotomized`` (the default) b_i are the spectrum-{-1,+1}
    variants and the local-hidden-variable bound is 2.  For states that
    repeat one occupation pair across all beams with symmetric pair
    amplitudes, the value must equal 4 - 2 P(diagonal) (4 - 4 P(diagonal)
    without dichotomization); that expectation is returned alongside as a
    cross-check.
    """
    if state.n_beams != 3:
        raise DomainMismatchError("the Mermin expression takes a three-beam state")
    build = (lambda i, s: g_minus(i, s, verify_spectrum=False)) if dichotomized else g_operator
    ops = {
        beam: {i: build(i, space) for i in (1, 2)}
        for beam, space in enumerate(state.domain)
    }
    terms = (((1, 1, 1), +1.0), ((1, 2, 2), -1.0), ((2, 1, 2), -1.0), ((2, 2, 1), -1.0))
    value = 0.0
    for idx, sign in terms:
        operator = tensor([ops[beam][i] for beam, i in enumerate(idx)])
        value += sign * expectation(operator, state)

    structural = None
    if _is_pair_symmetric_triple(state):
        p_diag = prob_diagonal(state)
        structural = 4.0 - (2.0 if dichotomized else 4.0) * p_diag

    slack = MERMIN_DEFICIT_FACTOR * state.norm_deficit
    lo, hi = abs(value) - slack, abs(value) + slack
    if lo > LHV_BOUND:
        verdict = "violated"
    elif hi <= LHV_BOUND:
        verdict = "not_violated"
    else:
        verdict = "inconclusive"
    return MerminResult(
        value=value,
        bound=LHV_BOUND,
        violated=verdict == "violated",
        interval_lo=lo,
        interval_hi=hi,
        verdict=verdict,
        dichotomized=dichotomized,
        structural_expected=structural,
    )


def mermin_lhv_value(a: Sequence[int], b: Sequence[int]) -> int:
    """Expression value for one local assignment (a_j, b_j the two outcomes per party)."""
    return (
        a[0] * a[1] * a[2]
        - a[0] * b[1] * b[2]
        - b[0] * a[1] * b[2]
        - b[0] * b[1] * a[2]
    )


def lhv_bound_oracle() -> int:
    """Brute-force maximum over the 2^6 dichotomic local assignments; equals 2."""
    best = -(10**9)
    for outcomes in itertools.product((-1, 1), repeat=6):
        best = max(best, mermin_lhv_value(outcomes[:3], outcomes[3:]))
    return best
