"""Max-plus matrix algebra: closures, residuation, idempotency, regularity.

The max-plus product used throughout is C[i,j] = max_k A[i,k] + B[k,j] with
-inf absorbing in the sums (so a -inf factor kills a +inf one).  A square
matrix equal to its own max-plus square is *idempotent*; idempotent matrices
are exactly the Bellman closures of shortest-path-type problems.

Given a family G of proper functions (finite somewhere, never -inf), the
largest kernel reproducing every member is

    c_G(x, y) = min_{g in G} g(x) - g(y)     (upper difference),

an idempotent matrix whose closure operator C_G f(x) = max_y c_G(x,y) + f(y)
is extensive, monotone and idempotent; its fixed points are the functions
f with f(x) <= f(y) - c_G(y, x) for all x, y (upper difference).

A square matrix B is *von Neumann regular* if B (x) A (x) B = B for some A.
Since the product is monotone in A, it suffices to test the residuated
greatest candidate A* = largest A with B A B <= B, computed by left/right
residuation (the adjoints of the max-plus product).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    ext_close,
    POS_INF,
    GridFunction,
    PointSet,
    lower_add_arrays,
    max_reduce,
    min_reduce,
    upper_add_arrays,
    validate_values,
)


def mp_matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Max-plus matrix product with -inf absorbing in the sums."""
    a = validate_values(a, "left factor")
    b = validate_values(b, "right factor")
    if a.shape[1] != b.shape[0]:
        raise ValueError("inner dimensions do not match")
    return max_reduce(lower_add_arrays(a[:, :, None], b[None, :, :]), axis=1)


def mp_apply(a: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Max-plus matrix-vector product, -inf absorbing."""
    return max_reduce(lower_add_arrays(a, np.asarray(v, dtype=float)[None, :]), axis=1)


def is_idempotent(gram: np.ndarray, tol: float = 1e-9) -> bool:
    """Whether the max-plus square of a square matrix equals the matrix.

    Integer-valued inputs are decided exactly (float64 sums and maxes of
    integers are exact); float inputs are compared within ``tol``.
    """
    gram = validate_values(gram, "gram")
    if gram.ndim != 2 or gram.shape[0] != gram.shape[1]:
        raise ValueError("idempotency is defined for square matrices")
    return bool(ext_close(mp_matmul(gram, gram), gram, tol).all())


def left_residual(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Greatest Z with X (x) Z <= Y:  Z[i,j] = min_k (Y[k,j] - X[k,i]).

    Differences are upper (so +inf is absorbing), giving the adjoint of the
    max-plus product; entries may be ±inf.
    """
    x = validate_values(x, "x")
    y = validate_values(y, "y")
    diff = upper_add_arrays(y[:, None, :], -x[:, :, None])  # (k, i, j)
    return min_reduce(diff, axis=0)


def right_residual(y: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Greatest Z with Z (x) X <= Y:  Z[i,j] = min_k (Y[i,k] - X[j,k])."""
    x = validate_values(x, "x")
    y = validate_values(y, "y")
    diff = upper_add_arrays(y[:, None, :], -x[None, :, :])  # (i, j, k)
    return min_reduce(diff, axis=2)


@dataclass(frozen=True)
class RegularityVerdict:
    """Outcome of the von Neumann regularity decision.

    Attributes:
        regular: True iff B (x) A* (x) B = B for the residuated candidate.
        witness: The greatest candidate A* (entries may be ±inf); a valid
            middle factor exactly when ``regular``.
        product: B (x) A* (x) B, for inspection of the failure gap.
    """

    regular: bool
    witness: np.ndarray
    product: np.ndarray


def is_von_neumann_regular(gram: np.ndarray, tol: float = 1e-9) -> RegularityVerdict:
    """Decide whether some A satisfies B (x) A (x) B = B.

    The product is entrywise monotone in A, and A* = greatest A with
    B A B <= B is computable by two residuations, so the equation has a
    solution iff it holds at A*.
    """
    b = validate_values(gram, "gram")
    if b.ndim != 2 or b.shape[0] != b.shape[1]:
        raise ValueError("regularity is defined for square matrices")
    a_star = right_residual(left_residual(b, b), b)
    product = mp_matmul(mp_matmul(b, a_star), b)
    regular = bool(ext_close(product, b, tol).all())
    return RegularityVerdict(regular, a_star, product)


@dataclass(frozen=True)
class FunctionFamily:
    """A finite family of proper functions on a common grid.

    Members take values in (-inf, +inf] and each is finite somewhere.

    Attributes:
        domain: The common PointSet.
        members: The functions, order preserved.
    """

    domain: PointSet
    members: tuple[GridFunction, ...]

    def __post_init__(self) -> None:
        if not self.members:
            raise ValueError("function family must be nonempty")
        for g in self.members:
            if g.domain != self.domain:
                raise ValueError("all members must share the family domain")
            if (g.values == -POS_INF).any():
                raise ValueError("members must not take the value -inf")
            if not np.isfinite(g.values).any():
                raise ValueError("members must be finite somewhere (proper)")

    def as_matrix(self) -> np.ndarray:
        """Member values stacked as an (m, n) array."""
        return np.stack([g.values for g in self.members])


def max_kernel_cG(family: FunctionFamily) -> np.ndarray:
    """Largest kernel reproducing every member of the family.

    c_G(x,y) = min over members of g(x) - g(y) (upper difference).  The
    diagonal is 0 where some member is finite and +inf where every member is
    +inf; the matrix is idempotent.
    """
    g = family.as_matrix()
    diff = upper_add_arrays(g[:, :, None], -g[:, None, :])  # (member, x, y)
    return min_reduce(diff, axis=0)


def closure_CG(cg: np.ndarray, f: GridFunction) -> GridFunction:
    """Closure image x -> max_y c_G(x,y) + f(y) (-inf absorbing).

    Extensive (result >= f), monotone, and idempotent.
    """
    cg = validate_values(cg, "cg")
    if cg.shape != (len(f.domain), len(f.domain)):
        raise ValueError("kernel shape does not match the function domain")
    return GridFunction(f.domain, mp_apply(cg, f.values))


def is_lipschitz_member(cg: np.ndarray, f: GridFunction, tol: float = 1e-9) -> bool:
    """Whether f satisfies f(x) <= f(y) - c_G(y,x) for all x, y.

    The inequality (upper difference on the right) characterizes the fixed
    points of the closure; both formulations are evaluated and must agree.
    """
    cg = validate_values(cg, "cg")
    rhs = upper_add_arrays(f.values[:, None], -cg)  # rhs[y, x] = f(y) - c(y,x)
    bound = min_reduce(rhs, axis=0)
    ineq_ok = bool(np.all(f.values <= bound + tol))
    closure_ok = bool(
        ext_close(closure_CG(cg, f).values, f.values, max(tol, 1e-9)).all()
    )
    if ineq_ok != closure_ok:
        raise RuntimeError(
            "internal inconsistency: inequality and closure characterizations "
            "disagree; this indicates a tolerance artifact in the inputs"
        )
    return ineq_ok
