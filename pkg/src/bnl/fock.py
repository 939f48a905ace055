"""Truncated Fock-sector linear algebra for multi-beam bosonic fields.

A *beam* is a pair of orthogonal bosonic modes (a, b).  Everything here
lives in the per-beam sector with at most ``cutoff`` photons in total.
The occupation basis is enumerated in one fixed canonical order (total
photon number ascending, then photons in mode a descending) so that
serialized operators and regression fixtures are byte-stable across runs.

Operators are stored as sparse complex matrices; states are dense complex
amplitude vectors over the tensored basis of one or more beams.  All
containers are immutable after construction, so evaluation is safe to run
concurrently over independent states and operators.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Callable, Iterable, NamedTuple, Sequence

import numpy as np
import scipy.sparse as sp

# Entrywise tolerance for verifying a declared Hermitian flag.
HERMITIAN_ATOL = 1e-14
# Slack allowed on |amplitudes|^2 + norm_deficit = 1 when taking expectations.
NORM_ATOL = 1e-8
# Imaginary part allowed in the expectation of a Hermitian-flagged operator.
HERMITIAN_IMAG_ATOL = 1e-12


class DomainMismatchError(ValueError):
    """Raised when operator and state (or two operators) live on different spaces."""


class HermitianViolationError(ValueError):
    """Raised when a Hermitian-flagged evaluation produces a non-real value."""


class ModeOccupation(NamedTuple):
    """Photon numbers (n_a, n_b) of the two modes of a single beam."""

    n_a: int
    n_b: int

    @property
    def total(self) -> int:
        return self.n_a + self.n_b

    @property
    def diagonal(self) -> bool:
        """True when both modes hold the same number of photons."""
        return self.n_a == self.n_b


@dataclass(frozen=True, eq=False)
class BeamSpace:
    """Two-mode occupation basis truncated at ``cutoff`` total photons.

    ``basis`` lists all (n_a, n_b) with n_a + n_b <= cutoff in canonical
    order; ``index`` is its inverse.  Dimension is
    (cutoff+1)(cutoff+2)/2.
    """

    cutoff: int
    basis: tuple[ModeOccupation, ...]
    index: dict[ModeOccupation, int]

    def __eq__(self, other: object) -> bool:
        return isinstance(other, BeamSpace) and other.cutoff == self.cutoff

    def __hash__(self) -> int:
        return hash(("BeamSpace", self.cutoff))

    @property
    def dim(self) -> int:
        return len(self.basis)

    def block_indices(self, total: int) -> list[int]:
        """Basis positions of the fixed total-photon-number block."""
        return [k for k, occ in enumerate(self.basis) if occ.total == total]

    @functools.cached_property
    def diagonal_mask(self) -> np.ndarray:
        """Boolean vector marking equal-occupation basis states."""
        return np.array([occ.diagonal for occ in self.basis], dtype=bool)


@functools.lru_cache(maxsize=None)
def build_space(cutoff: int) -> BeamSpace:
    """Enumerate the truncated beam space for the given total-photon cutoff.

    Canonical ordering: ascending total photon number, and within each
    block descending n_a, so the one-photon block reads |1,0>, |0,1>.
    Cutoff 0 yields the one-dimensional vacuum sector.
    """
    if cutoff < 0:
        raise ValueError(f"cutoff must be non-negative, got {cutoff}")
    basis = tuple(
        ModeOccupation(total - n_b, n_b)
        for total in range(cutoff + 1)
        for n_b in range(total + 1)
    )
    index = {occ: k for k, occ in enumerate(basis)}
    return BeamSpace(cutoff=cutoff, basis=basis, index=index)


def _domain_dim(domain: Sequence[BeamSpace]) -> int:
    dim = 1
    for space in domain:
        dim *= space.dim
    return dim


@dataclass(frozen=True, eq=False)
class ComplexOperator:
    """Sparse complex linear map on one or more tensored beam spaces.

    A set ``hermitian`` flag is verified entrywise at construction, so a
    Hermitian-flagged operator is guaranteed to satisfy
    entry(r, c) == conj(entry(c, r)) to within 1e-14.
    """

    domain: tuple[BeamSpace, ...]
    matrix: sp.csr_matrix
    hermitian: bool = False

    def __post_init__(self) -> None:
        dim = _domain_dim(self.domain)
        if self.matrix.shape != (dim, dim):
            raise ValueError(
                f"matrix shape {self.matrix.shape} does not match domain dimension {dim}"
            )
        if self.hermitian:
            residual = _sparse_max_abs(self.matrix - self.matrix.getH())
            if residual > HERMITIAN_ATOL:
                raise HermitianViolationError(
                    f"operator flagged Hermitian but max |A - A^dag| = {residual:.3e}"
                )

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def entries(self) -> dict[tuple[int, int], complex]:
        """Explicitly stored nonzero entries as a (row, column) -> value map."""
        coo = self.matrix.tocoo()
        return {
            (int(r), int(c)): complex(v)
            for r, c, v in zip(coo.row, coo.col, coo.data)
        }

    def entry(self, row: int, col: int) -> complex:
        return complex(self.matrix[row, col])

    def dagger(self) -> "ComplexOperator":
        return ComplexOperator(self.domain, self.matrix.getH().tocsr(), self.hermitian)

    def max_abs(self) -> float:
        """Largest entry magnitude (max norm)."""
        return _sparse_max_abs(self.matrix)

    def _check_same_domain(self, other: "ComplexOperator") -> None:
        if self.domain != other.domain:
            raise DomainMismatchError(
                f"operator domains differ: {_cutoffs(self.domain)} vs {_cutoffs(other.domain)}"
            )

    def __matmul__(self, other: "ComplexOperator") -> "ComplexOperator":
        self._check_same_domain(other)
        return ComplexOperator(self.domain, (self.matrix @ other.matrix).tocsr())

    def __add__(self, other: "ComplexOperator") -> "ComplexOperator":
        self._check_same_domain(other)
        return ComplexOperator(self.domain, (self.matrix + other.matrix).tocsr())

    def __sub__(self, other: "ComplexOperator") -> "ComplexOperator":
        self._check_same_domain(other)
        return ComplexOperator(self.domain, (self.matrix - other.matrix).tocsr())

    def __mul__(self, scalar: complex) -> "ComplexOperator":
        return ComplexOperator(self.domain, (self.matrix * scalar).tocsr())

    __rmul__ = __mul__

    def __neg__(self) -> "ComplexOperator":
        return self * (-1.0)

    def with_hermitian_flag(self) -> "ComplexOperator":
        """Re-tag as Hermitian (re-verified at construction)."""
        return ComplexOperator(self.domain, self.matrix, hermitian=True)

    def block(self, total: int) -> np.ndarray:
        """Dense submatrix on the fixed total-photon block (single-beam only)."""
        if len(self.domain) != 1:
            raise DomainMismatchError("block extraction is defined for single-beam operators")
        idx = self.domain[0].block_indices(total)
        return self.matrix[np.ix_(idx, idx)].toarray()


def _cutoffs(domain: Sequence[BeamSpace]) -> tuple[int, ...]:
    return tuple(space.cutoff for space in domain)


def _sparse_max_abs(matrix: sp.spmatrix) -> float:
    return float(abs(matrix).max()) if matrix.nnz else 0.0


@dataclass(frozen=True, eq=False)
class MultiBeamState:
    """Complex amplitude vector over the tensored occupation basis of n beams.

    ``norm_deficit`` carries the probability mass truncated away when the
    state has analytically infinite support; generators keep
    |amplitudes|^2 + norm_deficit = 1.  Renormalizing instead would
    silently bias diagonal-subspace probabilities, so the deficit is kept
    explicit and propagated into verdict intervals downstream.
    """

    domain: tuple[BeamSpace, ...]
    amplitudes: np.ndarray
    norm_deficit: float = 0.0
    tags: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        dim = _domain_dim(self.domain)
        if self.amplitudes.shape != (dim,):
            raise ValueError(
                f"amplitude vector of length {self.amplitudes.shape} does not match "
                f"domain dimension {dim}"
            )
        if self.norm_deficit < -1e-12:
            raise ValueError(f"norm_deficit must be non-negative, got {self.norm_deficit}")

    @property
    def n_beams(self) -> int:
        return len(self.domain)

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


def operator_from_action(
    space: BeamSpace,
    action: Callable[[ModeOccupation], Iterable[tuple[tuple[int, int], complex]]],
    hermitian: bool = False,
) -> ComplexOperator:
    """Build a single-beam operator column by column from its basis action.

    ``action(occ)`` yields (target occupation, amplitude) pairs for the
    image of |occ>.  Targets must stay inside the space.
    """
    rows: list[int] = []
    cols: list[int] = []
    vals: list[complex] = []
    for col, occ in enumerate(space.basis):
        for target, amp in action(occ):
            rows.append(space.index[ModeOccupation(*target)])
            cols.append(col)
            vals.append(amp)
    matrix = sp.csr_matrix(
        (np.asarray(vals, dtype=complex), (rows, cols)),
        shape=(space.dim, space.dim),
    )
    return ComplexOperator((space,), matrix, hermitian=hermitian)


def identity_operator(domain: BeamSpace | Sequence[BeamSpace]) -> ComplexOperator:
    domain = _as_domain(domain)
    dim = _domain_dim(domain)
    return ComplexOperator(domain, sp.identity(dim, dtype=complex, format="csr"), hermitian=True)


def zero_operator(domain: BeamSpace | Sequence[BeamSpace]) -> ComplexOperator:
    domain = _as_domain(domain)
    dim = _domain_dim(domain)
    return ComplexOperator(domain, sp.csr_matrix((dim, dim), dtype=complex), hermitian=True)


def _as_domain(domain: BeamSpace | Sequence[BeamSpace]) -> tuple[BeamSpace, ...]:
    if isinstance(domain, BeamSpace):
        return (domain,)
    return tuple(domain)


def tensor(ops: Sequence[ComplexOperator]) -> ComplexOperator:
    """Kronecker product of operators on distinct beams (first factor major).

    Sparsity is preserved: structural zeros of the factors never appear as
    stored entries of the product.
    """
    if not ops:
        raise ValueError("tensor() needs at least one factor")
    domain = tuple(space for op in ops for space in op.domain)
    matrix = ops[0].matrix
    for op in ops[1:]:
        matrix = sp.kron(matrix, op.matrix, format="csr")
    return ComplexOperator(domain, matrix.tocsr(), hermitian=all(op.hermitian for op in ops))


def apply(op: ComplexOperator, state: MultiBeamState) -> MultiBeamState:
    """Exact sparse matrix-vector product; the result is not renormalized."""
    _check_op_state(op, state)
    return MultiBeamState(
        domain=state.domain,
        amplitudes=op.matrix @ state.amplitudes,
        norm_deficit=0.0,
        tags=state.tags,
    )


def expectation(op: ComplexOperator, state: MultiBeamState) -> complex | float:
    """<psi|op|psi> on a normalized state.

    For a Hermitian-flagged operator the imaginary part must stay below
    1e-12 (else HermitianViolationError) and the real part is returned as
    a float; otherwise the full complex value is returned.
    """
    _check_op_state(op, state)
    total = state.norm() ** 2 + state.norm_deficit
    if abs(total - 1.0) > NORM_ATOL:
        raise ValueError(
            f"state is not normalized: |amplitudes|^2 + deficit = {total!r}"
        )
    value = complex(np.vdot(state.amplitudes, op.matrix @ state.amplitudes))
    if op.hermitian:
        if abs(value.imag) >= HERMITIAN_IMAG_ATOL:
            raise HermitianViolationError(
                f"Hermitian expectation has imaginary part {value.imag:.3e}"
            )
        return float(value.real)
    return value


def _check_op_state(op: ComplexOperator, state: MultiBeamState) -> None:
    if op.domain != state.domain:
        raise DomainMismatchError(
            f"operator domain {_cutoffs(op.domain)} does not match "
            f"state domain {_cutoffs(state.domain)}"
        )


def basis_state(
    domain: BeamSpace | Sequence[BeamSpace],
    occupations: Sequence[tuple[int, int]],
) -> MultiBeamState:
    """Unit-amplitude basis ket |occ_1; occ_2; ...> over the tensored domain."""
    domain = _as_domain(domain)
    if len(occupations) != len(domain):
        raise ValueError(
            f"{len(occupations)} occupations given for {len(domain)} beams"
        )
    amps = np.zeros(_domain_dim(domain), dtype=complex)
    amps[joint_index(domain, occupations)] = 1.0
    return MultiBeamState(domain, amps)


def joint_index(
    domain: Sequence[BeamSpace], occupations: Sequence[tuple[int, int]]
) -> int:
    """Flat index of a product basis ket (first beam major)."""
    flat = 0
    for space, occ in zip(domain, occupations):
        flat = flat * space.dim + space.index[ModeOccupation(*occ)]
    return flat


def product_state(states: Sequence[MultiBeamState]) -> MultiBeamState:
    """Tensor product of per-beam (or per-group) states."""
    if not states:
        raise ValueError("product_state() needs at least one factor")
    domain = tuple(space for state in states for space in state.domain)
    amps = states[0].amplitudes
    for state in states[1:]:
        amps = np.kron(amps, state.amplitudes)
    kept = 1.0
    for state in states:
        kept *= 1.0 - state.norm_deficit
    tags = tuple(dict.fromkeys(tag for state in states for tag in state.tags))
    return MultiBeamState(domain, amps, norm_deficit=1.0 - kept, tags=tags)
