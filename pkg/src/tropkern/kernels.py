"""Kernel representations, built-in families, positivity tests, factorization.

A kernel here is a map b : X x X' -> [-inf, +inf) on finite point sets, given
either as a dense Gram matrix or as a named closed form evaluated on demand.
The central structural notion is *tropical positive semidefiniteness* (tpsd):
symmetry together with

    b(x,x) + b(y,y) >= b(x,y) + b(y,x)   for all points x, y,

sums taken with -inf absorbing.  tpsd kernels decompose as a diagonal
translation of a nonpositive kernel and factor through a max-plus feature map,
both constructed explicitly below.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .core import (
    NEG_INF,
    POS_INF,
    GridFunction,
    Point,
    PointSet,
    PreconditionError,
    SizeError,
    as_point,
    decode_values,
    encode_values,
    lower_sub,
    max_reduce,
    validate_values,
)

CLOSED_FORM_NAMES = ("conv", "sconv", "lip", "dirac", "power_distance", "lax_hopf")


@dataclass(frozen=True)
class GramKernel:
    """A kernel given by a dense square matrix over a PointSet.

    Attributes:
        points: The n points indexing rows and columns.
        matrix: (n, n) float array; entries in [-inf, +inf) (no +inf, no NaN).
    """

    points: PointSet
    matrix: np.ndarray

    def __post_init__(self) -> None:
        arr = validate_values(self.matrix, "Gram matrix")
        n = len(self.points)
        if arr.shape != (n, n):
            raise ValueError(f"expected a {n}x{n} matrix, got shape {arr.shape}")
        if (arr == POS_INF).any():
            raise ValueError("kernel values must be < +inf")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "matrix", arr)

    def eval(self, x: float | Sequence[float], y: float | Sequence[float]) -> float:
        """b(x, y) by table lookup."""
        return float(self.matrix[self.points.index_of(x), self.points.index_of(y)])

    def transpose(self) -> "GramKernel":
        """The kernel (x, y) -> b(y, x)."""
        return GramKernel(self.points, self.matrix.T)


@dataclass(frozen=True)
class ClosedFormKernel:
    """A named closed-form kernel evaluated on demand.

    Supported names:
        conv:            b(x, y) = <x, y>                (Euclidean inner product)
        sconv:           b(x, y) = -||x - y||^2
        lip:             b(x, y) = -alpha * ||x - y||    (param ``alpha``, default 1)
        dirac:           b(x, y) = 0 if x == y else -inf
        power_distance:  b(x, y) = -||x - y||^p          (param ``p``, default 1)
        lax_hopf:        least-action cost between spacetime points for a
                         convex state-independent running cost
                         (param ``lagrangian``: a running-cost spec mapping).
    """

    name: str
    params: Mapping[str, object] = None  # type: ignore[assignment]

    def __post_init__(self) -> None:
        if self.name not in CLOSED_FORM_NAMES:
            raise ValueError(f"unknown closed-form kernel {self.name!r}")
        object.__setattr__(self, "params", dict(self.params or {}))

    def eval(self, x: float | Sequence[float], y: float | Sequence[float]) -> float:
        """b(x, y) by formula."""
        px, py = as_point(x), as_point(y)
        if len(px) != len(py):
            raise ValueError("points must share one dimension")
        ax, ay = np.array(px), np.array(py)
        if self.name == "conv":
            return float(ax @ ay)
        if self.name == "sconv":
            return float(-np.sum((ax - ay) ** 2))
        if self.name == "lip":
            alpha = float(self.params.get("alpha", 1.0))
            return float(-alpha * np.linalg.norm(ax - ay))
        if self.name == "dirac":
            return 0.0 if px == py else NEG_INF
        if self.name == "power_distance":
            p = float(self.params.get("p", 1.0))
            return float(-np.linalg.norm(ax - ay) ** p)
        # lax_hopf: defer to the control module (local import avoids a cycle).
        from .control import LagrangianSpec, lax_hopf

        lag = LagrangianSpec.from_spec(self.params.get("lagrangian", {"name": "quadratic"}))
        return lax_hopf(lag, px, py)


KernelRep = GramKernel | ClosedFormKernel


def gram_on(
    kernel: KernelRep,
    rows: PointSet,
    cols: PointSet | None = None,
) -> np.ndarray:
    """Dense matrix [b(x, y)] for x in ``rows``, y in ``cols`` (default rows)."""
    cols = rows if cols is None else cols
    out = np.empty((len(rows), len(cols)), dtype=float)
    for i, x in enumerate(rows):
        for j, y in enumerate(cols):
            out[i, j] = kernel.eval(x, y)
    return out


# ---------------------------------------------------------------------------
# Positivity tests.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TpsdVerdict:
    """Outcome of a pairwise tpsd check.

    Attributes:
        is_tpsd: True iff symmetric and pairwise-positive on the points.
        failure: None, "symmetry" or "positivity".
        witness: Violating index pair (i, j) when not tpsd.
    """

    is_tpsd: bool
    failure: str | None = None
    witness: tuple[int, int] | None = None


def _symmetry_witness(gram: np.ndarray, tol: float) -> tuple[int, int] | None:
    """First index pair where the matrix is not symmetric, or None."""
    n = gram.shape[0]
    for i in range(n):
        for j in range(i + 1, n):
            a, b = gram[i, j], gram[j, i]
            if a == b:  # covers matching infinities
                continue
            if math.isinf(a) or math.isinf(b) or abs(a - b) > tol:
                return (i, j)
    return None


def is_tpsd_pairwise(
    kernel: KernelRep,
    points: PointSet | None = None,
    tol: float = 1e-9,
) -> TpsdVerdict:
    """Check symmetry and the pairwise positivity inequality on a grid.

    The inequality is b(x,x) + b(y,y) >= b(x,y) + b(y,x) with -inf absorbing
    in the sums; a violation must exceed ``tol`` to be reported (guards
    against closed-form rounding).

    Args:
        kernel: Gram or closed-form kernel.
        points: Evaluation grid; defaults to the Gram kernel's own points.

    Returns:
        A TpsdVerdict (with the violating pair and failed condition if any).
    """
    gram = _materialize(kernel, points)
    sym = _symmetry_witness(gram, tol)
    if sym is not None:
        return TpsdVerdict(False, "symmetry", sym)
    diag = np.diag(gram)
    lhs = diag[:, None] + diag[None, :]  # no +inf entries, so no NaN
    rhs = gram + gram.T
    bad = np.argwhere(lhs < rhs - tol)
    if bad.size:
        i, j = map(int, bad[0])
        return TpsdVerdict(False, "positivity", (i, j))
    return TpsdVerdict(True)


@dataclass(frozen=True)
class PermutationVerdict:
    """Outcome of the subset/permutation positivity check.

    Attributes:
        holds: True iff every checked subset and permutation satisfies
            sum of diagonal >= sum of permuted entries.
        witness_subset: Violating subset of indices, if any.
        witness_perm: Violating permutation (as a tuple sigma of the subset
            positions), if any.
    """

    holds: bool
    witness_subset: tuple[int, ...] | None = None
    witness_perm: tuple[int, ...] | None = None


def check_permutation_positivity(
    gram: np.ndarray,
    m_max: int,
    tol: float = 1e-9,
    method: str = "cycles",
) -> PermutationVerdict:
    """Verify the permutation inequality on all subsets of size <= m_max.

    For every subset {x_1..x_M} and permutation sigma the inequality
    sum_m b(x_m, x_m) >= sum_m b(x_m, x_sigma(m)) must hold (-inf absorbing).
    Every permutation is a product of disjoint cycles and the inequality is
    additive across them, so checking cycles over subsets is sufficient;
    ``method="all_permutations"`` enumerates full permutations as a slow
    cross-check oracle.

    Args:
        gram: Square matrix of kernel values.
        m_max: Largest subset size; must be <= 8.
        tol: Violations must exceed this.
        method: "cycles" (sufficient) or "all_permutations" (oracle).

    Returns:
        A PermutationVerdict with a witness on failure.
    """
    if m_max > 8:
        raise SizeError("m_max larger than 8 is combinatorially explosive")
    if method not in ("cycles", "all_permutations"):
        raise ValueError(f"unknown method {method!r}")
    gram = validate_values(gram, "gram")
    n = gram.shape[0]
    sym = _symmetry_witness(gram, tol)
    if sym is not None:
        return PermutationVerdict(False, sym, None)
    diag = np.diag(gram)
    for size in range(1, min(m_max, n) + 1):
        for subset in itertools.combinations(range(n), size):
            lhs = float(np.sum(diag[list(subset)]))
            if method == "cycles":
                # All distinct cycles on the subset: fix the first element,
                # order the rest.
                rest = subset[1:]
                for tail in itertools.permutations(rest):
                    cycle = (subset[0],) + tail
                    rhs = float(
                        sum(
                            gram[cycle[k], cycle[(k + 1) % size]]
                            for k in range(size)
                        )
                    )
                    if lhs < rhs - tol:
                        sigma = _cycle_to_perm(subset, cycle)
                        return PermutationVerdict(False, subset, sigma)
            else:
                for sigma in itertools.permutations(range(size)):
                    rhs = float(
                        sum(gram[subset[k], subset[sigma[k]]] for k in range(size))
                    )
                    if lhs < rhs - tol:
                        return PermutationVerdict(False, subset, sigma)
    return PermutationVerdict(True)


def _cycle_to_perm(
    subset: tuple[int, ...], cycle: tuple[int, ...]
) -> tuple[int, ...]:
    """Express a cycle on ``subset`` as sigma over the subset positions."""
    pos = {v: k for k, v in enumerate(subset)}
    sigma = list(range(len(subset)))
    for k, v in enumerate(cycle):
        nxt = cycle[(k + 1) % len(cycle)]
        sigma[pos[v]] = pos[nxt]
    return tuple(sigma)


# ---------------------------------------------------------------------------
# Decomposition and feature-map factorization.
# ---------------------------------------------------------------------------


def _materialize(kernel: KernelRep, points: PointSet | None) -> np.ndarray:
    """Dense square matrix of a kernel on a grid."""
    if isinstance(kernel, GramKernel) and points is None:
        return kernel.matrix
    if points is None:
        raise ValueError("closed-form kernels need an evaluation PointSet")
    return gram_on(kernel, points)


def _require_tpsd(gram: GramKernel, op: str) -> None:
    verdict = is_tpsd_pairwise(gram)
    if not verdict.is_tpsd:
        raise PreconditionError(
            f"{op} requires a tpsd kernel; {verdict.failure} fails at pair "
            f"{verdict.witness}"
        )


def decompose_phi_b0(gram: GramKernel) -> tuple[GridFunction, GramKernel]:
    """Split a tpsd kernel as b = phi(x) + b0(x,y) + phi(y).

    phi(x) = b(x,x)/2; b0 is symmetric, zero on the diagonal and nonpositive.
    Where phi is -inf (a -inf diagonal forces a -inf row), the corresponding
    b0 entries are set to 0 by convention so that b0 stays well-defined.

    Raises:
        PreconditionError: If the kernel is not tpsd.
    """
    _require_tpsd(gram, "decompose_phi_b0")
    phi = np.diag(gram.matrix) / 2.0
    finite = np.isfinite(phi)
    both = finite[:, None] & finite[None, :]
    with np.errstate(invalid="ignore"):
        b0 = np.where(both, gram.matrix - phi[:, None] - phi[None, :], 0.0)
    return GridFunction(gram.points, phi), GramKernel(gram.points, b0)


@dataclass(frozen=True)
class FeatureMap:
    """A max-plus feature map psi : X x Z -> [-inf, +inf).

    The defining property is that the sup-product of features recomposes the
    kernel:  sup_z psi(x,z) + psi(y,z) = b(x,y)  (-inf absorbing).

    Attributes:
        points: The n kernel points (rows of psi).
        z_labels: The |Z| feature indices; here ordered pairs (i, j) of point
            indices.
        psi: (n, |Z|) float array with entries < +inf.
    """

    points: PointSet
    z_labels: tuple[tuple[int, int], ...]
    psi: np.ndarray

    def __post_init__(self) -> None:
        arr = validate_values(self.psi, "feature map")
        if (arr == POS_INF).any():
            raise ValueError("feature values must be < +inf")
        if arr.shape != (len(self.points), len(self.z_labels)):
            raise ValueError("feature matrix shape mismatch")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "psi", arr)

    def recompose(self) -> np.ndarray:
        """The kernel sup_z psi(x,z) + psi(y,z) as a dense matrix."""
        # No +inf entries, so plain addition realizes -inf absorption.
        return max_reduce(self.psi[:, None, :] + self.psi[None, :, :], axis=2)


def factorize(gram: GramKernel) -> FeatureMap:
    """Explicit feature map for a tpsd kernel over Z = X x X.

    Features: psi(x_i, (i, j)) = b(i,i)/2 and
    psi(x_i, (j, i)) = b(i,j) lower-minus b(j,j)/2 (-inf absorbing), all other
    entries -inf.  The recomposition sup-product returns the kernel exactly.

    Raises:
        PreconditionError: If the kernel is not tpsd.
    """
    _require_tpsd(gram, "factorize")
    b = gram.matrix
    n = b.shape[0]
    labels = tuple((i, j) for i in range(n) for j in range(n))
    psi = np.full((n, n * n), NEG_INF, dtype=float)
    for i in range(n):
        for j in range(n):
            psi[i, i * n + j] = b[i, i] / 2.0
            psi[i, j * n + i] = lower_sub(b[i, j], b[j, j] / 2.0)
    return FeatureMap(gram.points, labels, psi)


# ---------------------------------------------------------------------------
# JSON kernel specs.
# ---------------------------------------------------------------------------


def kernel_from_spec(spec: Mapping[str, object]) -> KernelRep:
    """Build a kernel from its JSON spec.

    Formats:
        {"type": "gram", "points": [...], "matrix": [[...]]}
        {"type": "closed_form", "name": "...", "params": {...}}
    """
    kind = spec.get("type")
    if kind == "gram":
        points = PointSet.make([as_point(p) for p in spec["points"]])  # type: ignore[index]
        matrix = decode_values(spec["matrix"])  # type: ignore[arg-type]
        return GramKernel(points, matrix)
    if kind == "closed_form":
        return ClosedFormKernel(str(spec["name"]), spec.get("params", {}))  # type: ignore[arg-type]
    raise ValueError(f"unknown kernel spec type {kind!r}")


def kernel_to_spec(kernel: KernelRep) -> dict:
    """Serialize a kernel to its JSON spec."""
    if isinstance(kernel, GramKernel):
        return {
            "type": "gram",
            "points": [list(p) for p in kernel.points],
            "matrix": encode_values(kernel.matrix),
        }
    return {"type": "closed_form", "name": kernel.name, "params": dict(kernel.params)}
