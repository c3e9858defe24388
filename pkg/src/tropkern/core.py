"""Extended-real arithmetic and finite-grid function containers.

The extended real line [-inf, +inf] carries two additions that differ only on
the indeterminate pair (+inf) + (-inf):

* upper addition   -- +inf is absorbing: (+inf) + (-inf) = +inf;
* lower addition   -- -inf is absorbing: (+inf) + (-inf) = -inf.

Subtraction is addition of the negation in the same convention, so the upper
difference (+inf) - (+inf) is +inf while the lower one is -inf.  Everything in
this package (kernel operators, duality products, constraint bounds) is built
on these two operations, with the lattice conventions sup {} = -inf and
inf {} = +inf.

Values are IEEE doubles; NaN is rejected at every construction point so that
the absorbing rules above are the only infinity semantics in play.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

POS_INF = math.inf
NEG_INF = -math.inf


class PreconditionError(ValueError):
    """An operation's structural precondition does not hold for the input."""


class SizeError(ValueError):
    """An input exceeds a guard bound meant to keep runtimes desk-scale."""

#: Value of a supremum over an empty set.
SUP_EMPTY = NEG_INF
#: Value of an infimum over an empty set.
INF_EMPTY = POS_INF

Point = tuple[float, ...]


def ext(value: float) -> float:
    """Validate a scalar as an extended real (finite, +inf or -inf).

    Args:
        value: Any real number, ``math.inf`` or ``-math.inf``.

    Returns:
        The value as a float.

    Raises:
        ValueError: If the value is NaN.
    """
    out = float(value)
    if math.isnan(out):
        raise ValueError("NaN is not an extended real")
    return out


def negate(a: float) -> float:
    """Negation on the extended reals (swaps the infinities)."""
    return -a


def upper_add(a: float, b: float) -> float:
    """Addition with +inf absorbing.

    Returns +inf if either operand is +inf, else -inf if either operand is
    -inf, else the ordinary sum.
    """
    if a == POS_INF or b == POS_INF:
        return POS_INF
    if a == NEG_INF or b == NEG_INF:
        return NEG_INF
    return a + b


def lower_add(a: float, b: float) -> float:
    """Addition with -inf absorbing.

    Returns -inf if either operand is -inf, else +inf if either operand is
    +inf, else the ordinary sum.
    """
    if a == NEG_INF or b == NEG_INF:
        return NEG_INF
    if a == POS_INF or b == POS_INF:
        return POS_INF
    return a + b


def upper_sub(a: float, b: float) -> float:
    """Upper difference: ``upper_add(a, -b)``, so (+inf) - (+inf) = +inf."""
    return upper_add(a, -b)


def lower_sub(a: float, b: float) -> float:
    """Lower difference: ``lower_add(a, -b)``, so (+inf) - (+inf) = -inf."""
    return lower_add(a, -b)


# ---------------------------------------------------------------------------
# Vectorized counterparts.
#
# For NaN-free float arrays, ``a + b`` already realizes both conventions
# except on mixed-infinity pairs, where IEEE produces NaN; those slots are
# patched to the absorbing value of the requested convention.
# ---------------------------------------------------------------------------


def upper_add_arrays(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Elementwise upper addition of NaN-free arrays (broadcasting)."""
    with np.errstate(invalid="ignore"):
        out = np.asarray(a, dtype=float) + np.asarray(b, dtype=float)
    mask = np.isnan(out)
    if mask.any():
        out = np.where(mask, POS_INF, out)
    return out


def lower_add_arrays(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Elementwise lower addition of NaN-free arrays (broadcasting)."""
    with np.errstate(invalid="ignore"):
        out = np.asarray(a, dtype=float) + np.asarray(b, dtype=float)
    mask = np.isnan(out)
    if mask.any():
        out = np.where(mask, NEG_INF, out)
    return out


def max_reduce(a: np.ndarray, axis: int | None = None) -> np.ndarray:
    """Maximum along an axis with sup {} = -inf on empty slices."""
    return np.max(a, axis=axis, initial=NEG_INF)


def min_reduce(a: np.ndarray, axis: int | None = None) -> np.ndarray:
    """Minimum along an axis with inf {} = +inf on empty slices."""
    return np.min(a, axis=axis, initial=POS_INF)


def ext_close(a: np.ndarray, b: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Elementwise extended-real equality within tol.

    Matching infinities compare equal; a finite value never equals an
    infinity; finite values compare by absolute difference.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    exact = a == b
    with np.errstate(invalid="ignore"):
        near = np.abs(a - b) <= tol
    return exact | (np.isfinite(a) & np.isfinite(b) & near)


def validate_values(values: Iterable[float], what: str = "values") -> np.ndarray:
    """Convert to a float array, rejecting NaN entries.

    Args:
        values: Scalars convertible to float (±inf allowed).
        what: Name used in the error message.

    Returns:
        A float64 numpy array.
    """
    arr = np.asarray(values, dtype=float)
    if np.isnan(arr).any():
        raise ValueError(f"{what} must not contain NaN")
    return arr


def as_point(p: float | Sequence[float]) -> Point:
    """Normalize a scalar or coordinate sequence to a point tuple."""
    if isinstance(p, (int, float)):
        return (ext(p),)
    return tuple(ext(c) for c in p)


@dataclass(frozen=True)
class PointSet:
    """A finite, ordered set of pairwise-distinct points in R^d.

    The ordering is part of the identity: index ``m`` <-> point ``x_m`` is a
    bijection used by every matrix-valued object in the package.  For
    spacetime problems the first coordinate of each point is a time and
    ``has_time`` is set.

    Attributes:
        points: Tuple of coordinate tuples, all of the same dimension.
        has_time: Whether coordinate 0 is a time component.
    """

    points: tuple[Point, ...]
    has_time: bool = False
    _index: dict[Point, int] = field(
        init=False, repr=False, compare=False, hash=False, default=None  # type: ignore[assignment]
    )

    def __post_init__(self) -> None:
        if not self.points:
            raise ValueError("PointSet requires at least one point")
        dim = len(self.points[0])
        index: dict[Point, int] = {}
        for i, p in enumerate(self.points):
            if len(p) != dim:
                raise ValueError("all points must share one dimension")
            for c in p:
                if math.isnan(c):
                    raise ValueError("point coordinates must not be NaN")
            if p in index:
                raise ValueError(f"points must be pairwise distinct, got {p} twice")
            index[p] = i
        object.__setattr__(self, "_index", index)

    @classmethod
    def make(
        cls, points: Sequence[float | Sequence[float]], has_time: bool = False
    ) -> "PointSet":
        """Build from scalars (1-D) or coordinate sequences."""
        return cls(tuple(as_point(p) for p in points), has_time=has_time)

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    @property
    def dim(self) -> int:
        """Coordinate dimension d."""
        return len(self.points[0])

    def index_of(self, p: float | Sequence[float]) -> int:
        """Index of a point; raises KeyError if absent."""
        key = as_point(p)
        if key not in self._index:
            raise KeyError(f"point {key} is not in the set")
        return self._index[key]

    def __contains__(self, p: object) -> bool:
        try:
            return as_point(p) in self._index  # type: ignore[arg-type]
        except (TypeError, ValueError):
            return False

    def as_array(self) -> np.ndarray:
        """Coordinates as an (n, d) float array."""
        return np.array(self.points, dtype=float)


@dataclass(frozen=True)
class GridFunction:
    """A total extended-real-valued function on a PointSet.

    Attributes:
        domain: The PointSet (one value per point, in order).
        values: float64 array of length ``len(domain)``; ±inf allowed, NaN not.
    """

    domain: PointSet
    values: np.ndarray

    def __post_init__(self) -> None:
        arr = validate_values(self.values, "GridFunction values")
        if arr.shape != (len(self.domain),):
            raise ValueError(
                f"expected {len(self.domain)} values, got shape {arr.shape}"
            )
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    def value_at(self, p: float | Sequence[float]) -> float:
        """Value at a given point of the domain."""
        return float(self.values[self.domain.index_of(p)])

    def with_values(self, values: Iterable[float]) -> "GridFunction":
        """Same domain, new values."""
        return GridFunction(self.domain, np.asarray(values, dtype=float))


def grid_function(
    domain: PointSet | Sequence[float | Sequence[float]], values: Iterable[float]
) -> GridFunction:
    """Convenience constructor accepting raw point lists."""
    if not isinstance(domain, PointSet):
        domain = PointSet.make(domain)
    return GridFunction(domain, np.asarray(list(values), dtype=float))


def dirac(domain: PointSet, x: float | Sequence[float], kind: str) -> GridFunction:
    """Indicator spike at a point.

    Args:
        domain: The PointSet the function lives on.
        x: A point of the domain.
        kind: ``"bottom"`` for value 0 at x and -inf elsewhere (the max-plus
            unit vector), ``"top"`` for value 0 at x and +inf elsewhere (its
            min-plus counterpart).

    Returns:
        The indicator GridFunction.

    Raises:
        KeyError: If x is not in the domain.
        ValueError: For an unknown kind.
    """
    if kind not in ("bottom", "top"):
        raise ValueError(f"kind must be 'bottom' or 'top', got {kind!r}")
    i = domain.index_of(x)
    fill = NEG_INF if kind == "bottom" else POS_INF
    values = np.full(len(domain), fill, dtype=float)
    values[i] = 0.0
    return GridFunction(domain, values)


# ---------------------------------------------------------------------------
# JSON / CSV value encoding: finite -> number, +inf -> "inf", -inf -> "-inf".
# ---------------------------------------------------------------------------


def encode_extreal(v: float) -> float | str:
    """Encode one extended real for JSON."""
    if v == POS_INF:
        return "inf"
    if v == NEG_INF:
        return "-inf"
    return float(v)


def decode_extreal(obj: float | int | str) -> float:
    """Decode one extended real from JSON (number or "inf"/"-inf")."""
    if isinstance(obj, str):
        if obj == "inf":
            return POS_INF
        if obj == "-inf":
            return NEG_INF
        raise ValueError(f"invalid extended-real string {obj!r}")
    if isinstance(obj, bool) or not isinstance(obj, (int, float)):
        raise ValueError(f"invalid extended-real value {obj!r}")
    return ext(obj)


def encode_values(values: np.ndarray) -> list:
    """Encode a 1-D or 2-D array of extended reals for JSON."""
    arr = np.asarray(values, dtype=float)
    if arr.ndim == 1:
        return [encode_extreal(v) for v in arr]
    return [encode_values(row) for row in arr]


def decode_values(obj: Sequence) -> np.ndarray:
    """Decode a (possibly nested) JSON list of extended reals."""
    if obj and isinstance(obj[0], (list, tuple)):
        return np.array([decode_values(row) for row in obj], dtype=float)
    return np.array([decode_extreal(v) for v in obj], dtype=float)
