"""Pauli-like observables for two bosonic modes.

The operator set g0..g3 acts on a single beam and mirrors the qubit Pauli
algebra while staying bounded on the whole truncated Fock sector:

    g0 = 1 - sum_n |n,n><n,n|          (projector off the equal-occupation states)
    g1 = sum_{n != m} |n,m><m,n|       (mode swap off the diagonal)
    g2 = -i sign(Na - Nb) g1
    g3 = sign(Na - Nb)

with sign(0) = 0, so every g_i annihilates the equal-occupation
("diagonal") states.  The set satisfies the Pauli product rule
g_i g_j = delta_ij g0 + i eps_ijk g_k and has spectrum {-1, 0, +1}.

Two independent constructions are provided: the direct occupation-basis
definition above (canonical) and the quadratic form

    g_i = (sr, pr)^dag sigma_i (sr, pr)

built from the half-swap ``sr`` and half-projector ``pr``.  Both must
agree entrywise; verify_algebra cross-checks them along with the full
commutation, anticommutation and spectrum suite.

The dichotomized variants g_{i-} = g_i - (diagonal projector) assign -1
to equal-occupation outcomes and have spectrum {-1, +1}; the standard
Stokes operators are included solely to exhibit, by contrast, that they
fail the anticommutation relation.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .fock import (
    BeamSpace,
    ComplexOperator,
    ModeOccupation,
    operator_from_action,
)

# Entrywise tolerance for the algebra identities (products of exact 0/±1/±i
# entries, so residuals are genuinely zero in floating point).
ALGEBRA_ATOL = 1e-12
# Tolerance on eigenvalues relative to the target spectrum {-1, 0, +1}.
SPECTRUM_ATOL = 1e-10
# Tolerance for the direct-vs-quadratic-form construction cross-check.
CROSS_CHECK_ATOL = 1e-14
# Hermiticity slack accepted by the per-block eigensolver.
HERMITIAN_BLOCK_ATOL = 1e-12

_LEVI_CIVITA = {
    (1, 2, 3): 1, (2, 3, 1): 1, (3, 1, 2): 1,
    (3, 2, 1): -1, (1, 3, 2): -1, (2, 1, 3): -1,
}


def _eps(i: int, j: int) -> tuple[int, int]:
    """Return (k, sign) with eps_ijk = sign, or (0, 0) when i == j."""
    for k in (1, 2, 3):
        sign = _LEVI_CIVITA.get((i, j, k))
        if sign is not None:
            return k, sign
    return 0, 0


@dataclass(frozen=True)
class GLabel:
    """Selector for one observable of the set: index 0..3, optionally dichotomized."""

    index: int
    minus_variant: bool = False

    def __post_init__(self) -> None:
        if self.index not in (0, 1, 2, 3):
            raise ValueError(f"index must be one of 0..3, got {self.index}")
        if self.minus_variant and self.index == 0:
            raise ValueError("g0 has no dichotomized variant")


def diagonal_projector(space: BeamSpace) -> ComplexOperator:
    """sum_n |n,n><n,n| restricted to the space."""
    return operator_from_action(
        space,
        lambda occ: [((occ.n_a, occ.n_b), 1.0)] if occ.diagonal else [],
        hermitian=True,
    )


def _g_action(index: int):
    def act(occ: ModeOccupation):
        n, m = occ
        if n == m:
            return []
        if index == 0:
            return [((n, m), 1.0)]
        if index == 1:
            return [((m, n), 1.0)]
        if index == 2:
            # sign acts after the swap: sign(m - n) on the target |m, n>.
            return [((m, n), -1j * float(np.sign(m - n)))]
        return [((n, m), float(np.sign(n - m)))]

    return act


def g_operator(label: GLabel | int, space: BeamSpace) -> ComplexOperator:
    """Observable g_index (or its dichotomized variant) on one beam."""
    if isinstance(label, int):
        label = GLabel(label)
    if label.minus_variant:
        return g_minus(label.index, space)
    return operator_from_action(space, _g_action(label.index), hermitian=True)


def g_minus(index: int, space: BeamSpace, verify_spectrum: bool = True) -> ComplexOperator:
    """Dichotomized g_{index-} = g_index - diagonal projector, spectrum {-1, +1}."""
    if index not in (1, 2, 3):
        raise ValueError(f"dichotomized variant exists for indices 1..3, got {index}")
    op = (g_operator(index, space) - diagonal_projector(space)).with_hermitian_flag()
    if verify_spectrum:
        deviation = spectrum_deviation(op, targets=(-1.0, 1.0))
        if deviation > SPECTRUM_ATOL:
            raise AssertionError(
                f"g_{index}- spectrum deviates from ±1 by {deviation:.3e}"
            )
    return op


def s_r(space: BeamSpace) -> ComplexOperator:
    """Half swap: maps |m,n> -> |n,m> for m > n, zero elsewhere."""
    return operator_from_action(
        space,
        lambda occ: [((occ.n_b, occ.n_a), 1.0)] if occ.n_a > occ.n_b else [],
    )


def p_r(space: BeamSpace) -> ComplexOperator:
    """Projector onto the states with more photons in mode b."""
    return operator_from_action(
        space,
        lambda occ: [((occ.n_a, occ.n_b), 1.0)] if occ.n_b > occ.n_a else [],
        hermitian=True,
    )


PAULI = (
    np.eye(2, dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


def g_operator_compact(index: int, space: BeamSpace) -> ComplexOperator:
    """Alternative construction of g_index as (sr, pr)^dag sigma_index (sr, pr)."""
    if index not in (0, 1, 2, 3):
        raise ValueError(f"index must be one of 0..3, got {index}")
    v = (s_r(space), p_r(space))
    sigma = PAULI[index]
    terms = [
        complex(sigma[k, l]) * (v[k].dagger() @ v[l])
        for k in range(2)
        for l in range(2)
        if sigma[k, l] != 0
    ]
    total = terms[0]
    for term in terms[1:]:
        total = total + term
    return total.with_hermitian_flag()


def stokes_operator(index: int, space: BeamSpace) -> ComplexOperator:
    """Standard two-mode su(2) generators S_i = (1/2) (a,b)^dag sigma_i (a,b).

    These conserve total photon number, so their restriction to the
    truncated sector is exact.  Unlike g1..g3 they do not anticommute.
    """
    if index not in (0, 1, 2, 3):
        raise ValueError(f"index must be one of 0..3, got {index}")

    def act(occ: ModeOccupation):
        n, m = occ
        out: list[tuple[tuple[int, int], complex]] = []
        if index == 0:
            if n + m:
                out.append(((n, m), (n + m) / 2.0))
        elif index == 3:
            if n != m:
                out.append(((n, m), (n - m) / 2.0))
        else:
            # a^dag b / 2 and b^dag a / 2 contributions.
            up = np.sqrt(m * (n + 1)) / 2.0 if m >= 1 else 0.0
            down = np.sqrt(n * (m + 1)) / 2.0 if n >= 1 else 0.0
            if index == 1:
                if up:
                    out.append(((n + 1, m - 1), up))
                if down:
                    out.append(((n - 1, m + 1), down))
            else:
                if up:
                    out.append(((n + 1, m - 1), -1j * up))
                if down:
                    out.append(((n - 1, m + 1), 1j * down))
        return out

    return operator_from_action(space, act, hermitian=True)


def pauli_restriction(space: BeamSpace) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Each g_i restricted to span{|1,0>, |0,1>}, with |1,0> as the first basis vector.

    On that subspace the restrictions equal the 2x2 identity and Pauli
    matrices exactly.
    """
    if space.cutoff < 1:
        raise ValueError("the one-photon sector needs cutoff >= 1")
    rows = [space.index[ModeOccupation(1, 0)], space.index[ModeOccupation(0, 1)]]
    sel = np.ix_(rows, rows)
    return tuple(g_operator(i, space).matrix[sel].toarray() for i in range(4))


def block_eigenvalues(op: ComplexOperator, space: BeamSpace) -> np.ndarray:
    """Eigenvalues of a Hermitian single-beam operator, solved per photon-number block.

    The g and Stokes operators conserve total photon number, so a dense
    eigensolve of each small block is exact and scales to large cutoffs.
    """
    values: list[np.ndarray] = []
    for total in range(space.cutoff + 1):
        block = op.block(total)
        if abs(block - block.conj().T).max() > HERMITIAN_BLOCK_ATOL:
            raise ValueError("block eigensolve expects a Hermitian operator")
        values.append(np.linalg.eigvalsh(block))
    return np.sort(np.concatenate(values))


def spectrum_deviation(
    op: ComplexOperator,
    targets: Iterable[float] = (-1.0, 0.0, 1.0),
    space: BeamSpace | None = None,
) -> float:
    """Largest distance of any eigenvalue from the target spectrum."""
    space = space or op.domain[0]
    eigenvalues = block_eigenvalues(op, space)
    targets = np.asarray(tuple(targets))
    return float(np.abs(eigenvalues[:, None] - targets[None, :]).min(axis=1).max())


@dataclass(frozen=True)
class AlgebraReport:
    """Residuals of the operator-algebra suite on one truncated space."""

    cutoff: int
    construction: str
    max_commutator_residual: float
    max_anticommutator_residual: float
    max_product_residual: float
    spectrum_ok: bool
    max_spectrum_deviation: float
    identity_residuals: dict[str, float]
    details: dict[str, float] = field(default_factory=dict)
    atol_identity: float = ALGEBRA_ATOL
    atol_spectrum: float = SPECTRUM_ATOL

    @property
    def passed(self) -> bool:
        worst = max(
            self.max_commutator_residual,
            self.max_anticommutator_residual,
            self.max_product_residual,
            max(self.identity_residuals.values(), default=0.0),
        )
        return worst <= self.atol_identity and self.spectrum_ok

    def to_dict(self) -> dict:
        return {
            "cutoff": self.cutoff,
            "construction": self.construction,
            "passed": self.passed,
            "max_commutator_residual": self.max_commutator_residual,
            "max_anticommutator_residual": self.max_anticommutator_residual,
            "max_product_residual": self.max_product_residual,
            "spectrum_ok": self.spectrum_ok,
            "max_spectrum_deviation": self.max_spectrum_deviation,
            "identity_residuals": dict(sorted(self.identity_residuals.items())),
            "details": dict(sorted(self.details.items())),
            "atol_identity": self.atol_identity,
            "atol_spectrum": self.atol_spectrum,
        }


def verify_algebra(space: BeamSpace, construction: str = "direct") -> AlgebraReport:
    """Check the full operator algebra on one space and report residuals.

    Verified identities (entrywise max norm):
      * [g_i, g_j] = 2i eps_ijk g_k
      * {g_i, g_j} = 2 delta_ij g0
      * g_i g_j = delta_ij g0 + i eps_ijk g_k   (covers g_i^2 = g0)
      * [g0, g_i] = 0
      * g2 = -i g3 g1
      * direct vs quadratic-form construction of every g_i
    plus the eigenvalue check: every g_i spectrum inside {-1, 0, +1}.

    Failures are reported in the residual table, never raised.
    """
    if construction not in ("direct", "compact"):
        raise ValueError(f"unknown construction {construction!r}")
    build = g_operator if construction == "direct" else g_operator_compact
    g = [build(i, space) for i in range(4)]

    details: dict[str, float] = {}
    max_comm = max_anti = max_prod = 0.0
    for i, j in itertools.product((1, 2, 3), repeat=2):
        k, sign = _eps(i, j)
        comm_target = (2j * sign) * g[k] if k else _zero_like(g[0])
        comm = (g[i] @ g[j] - g[j] @ g[i] - comm_target).max_abs()
        anti_target = 2.0 * g[0] if i == j else _zero_like(g[0])
        anti = (g[i] @ g[j] + g[j] @ g[i] - anti_target).max_abs()
        prod_target = g[0] if i == j else (1j * sign) * g[k]
        prod = (g[i] @ g[j] - prod_target).max_abs()
        details[f"commutator_{i}{j}"] = comm
        details[f"anticommutator_{i}{j}"] = anti
        details[f"product_{i}{j}"] = prod
        max_comm = max(max_comm, comm)
        max_anti = max(max_anti, anti)
        max_prod = max(max_prod, prod)

    identity_residuals = {
        "g2_equals_minus_i_g3_g1": (g[2] - (-1j) * (g[3] @ g[1])).max_abs(),
    }
    for i in range(4):
        identity_residuals[f"g0_commutes_g{i}"] = (
            g[0] @ g[i] - g[i] @ g[0]
        ).max_abs()
        identity_residuals[f"construction_cross_check_g{i}"] = (
            g_operator(i, space) - g_operator_compact(i, space)
        ).max_abs()

    max_dev = max(spectrum_deviation(gi, space=space) for gi in g)

    return AlgebraReport(
        cutoff=space.cutoff,
        construction=construction,
        max_commutator_residual=max_comm,
        max_anticommutator_residual=max_anti,
        max_product_residual=max_prod,
        spectrum_ok=max_dev <= SPECTRUM_ATOL,
        max_spectrum_deviation=max_dev,
        identity_residuals=identity_residuals,
        details=details,
    )


def _zero_like(op: ComplexOperator) -> ComplexOperator:
    return 0.0 * op
