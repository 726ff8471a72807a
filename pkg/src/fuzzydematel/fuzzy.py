"""Triangular fuzzy numbers, the linguistic rating scale and CFCS defuzzification."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DematelError, DimensionMismatchError, EmptyInputError, UnknownTermError


@dataclass(frozen=True)
class TriangularFuzzyNumber:
    """A fuzzy rating ``(l, m, u)`` with ``l <= m <= u``."""

    l: float
    m: float
    u: float

    def __post_init__(self):
        for name in ("l", "m", "u"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if not (self.l <= self.m <= self.u):
            raise DematelError(f"invalid TFN ({self.l}, {self.m}, {self.u}): need l <= m <= u")

    @classmethod
    def crisp(cls, value: float) -> "TriangularFuzzyNumber":
        return cls(value, value, value)

    @property
    def is_crisp(self) -> bool:
        return self.l == self.m == self.u

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.l, self.m, self.u)

    def __iter__(self):
        return iter(self.as_tuple())


TFN = TriangularFuzzyNumber
ZERO = TriangularFuzzyNumber(0.0, 0.0, 0.0)


def membership(tfn: TriangularFuzzyNumber, x: float) -> float:
    """Membership degree of ``x`` in ``tfn``.

    Piecewise linear, 1 at the mode and 0 outside ``[l, u]``. Vertical edges
    (``l == m`` or ``m == u``) take the value 1 at the mode.
    """
    l, m, u = tfn.l, tfn.m, tfn.u
    if x < l or x > u:
        return 0.0
    if x == m:
        return 1.0
    if x < m:
        return (x - l) / (m - l)
    return (u - x) / (u - m)


@dataclass(frozen=True)
class LinguisticScale:
    """Ordered mapping from verbal influence terms to fuzzy numbers."""

    terms: tuple[tuple[str, TriangularFuzzyNumber], ...]

    def __post_init__(self):
        labels = [label for label, _ in self.terms]
        dupes = sorted({x for x in labels if labels.count(x) > 1})
        if dupes:
            raise DematelError(f"duplicate scale labels: {', '.join(dupes)}")
        if not labels:
            raise DematelError("linguistic scale needs at least one term")

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(label for label, _ in self.terms)

    @property
    def zero_term(self) -> str:
        """Label of the weakest term, accepted on the diagonal."""
        return self.terms[0][0]

    def __contains__(self, label) -> bool:
        return label in self.labels


DEFAULT_SCALE = LinguisticScale(
    (
        ("no-influence", TFN(0.0, 0.0, 0.25)),
        ("very-low", TFN(0.0, 0.25, 0.5)),
        ("low", TFN(0.25, 0.5, 0.75)),
        ("high", TFN(0.5, 0.75, 1.0)),
        ("very-high", TFN(0.75, 1.0, 1.0)),
    )
)


def term_to_tfn(scale: LinguisticScale, term: str) -> TriangularFuzzyNumber:
    for label, tfn in scale.terms:
        if label == term:
            return tfn
    raise UnknownTermError(term, scale.labels)


class FuzzyMatrix:
    """Square grid of TFNs stored as three read-only ``(n, n)`` arrays.

    The diagonal is forced to crisp zero. Indexing ``fm[i, j]`` returns a
    :class:`TriangularFuzzyNumber`.
    """

    __slots__ = ("lower", "middle", "upper")

    def __init__(self, lower, middle, upper):
        arrays = [np.array(a, dtype=float) for a in (lower, middle, upper)]
        shape = arrays[0].shape
        if len(shape) != 2 or shape[0] != shape[1]:
            raise DimensionMismatchError(f"fuzzy matrix must be square, got shape {shape}")
        if any(a.shape != shape for a in arrays):
            raise DimensionMismatchError("l, m and u grids differ in shape")
        if shape[0] < 2:
            raise DematelError("fuzzy matrix needs at least 2 factors")
        lo, mid, up = arrays
        if np.any(lo > mid) or np.any(mid > up):
            i, j = np.argwhere((lo > mid) | (mid > up))[0]
            raise DematelError(f"invalid TFN at ({i}, {j}): need l <= m <= u")
        for a in arrays:
            np.fill_diagonal(a, 0.0)
            a.setflags(write=False)
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "middle", mid)
        object.__setattr__(self, "upper", up)

    def __setattr__(self, name, value):
        raise AttributeError("FuzzyMatrix is immutable")

    @classmethod
    def from_entries(cls, entries: Sequence[Sequence[TriangularFuzzyNumber]]) -> "FuzzyMatrix":
        grid = np.array([[tuple(e) for e in row] for row in entries], dtype=float)
        if grid.ndim != 3:
            raise DimensionMismatchError("ragged fuzzy matrix")
        return cls(grid[..., 0], grid[..., 1], grid[..., 2])

    @classmethod
    def from_crisp(cls, values) -> "FuzzyMatrix":
        v = np.asarray(values, dtype=float)
        return cls(v, v, v)

    @property
    def n(self) -> int:
        return self.lower.shape[0]

    def __getitem__(self, idx) -> TriangularFuzzyNumber:
        i, j = idx
        return TFN(self.lower[i, j], self.middle[i, j], self.upper[i, j])

    def __eq__(self, other):
        if not isinstance(other, FuzzyMatrix):
            return NotImplemented
        return all(
            np.array_equal(a, b)
            for a, b in zip(
                (self.lower, self.middle, self.upper), (other.lower, other.middle, other.upper)
            )
        )

    def __repr__(self):
        return f"FuzzyMatrix(n={self.n})"


def fuzzy_mean(matrices: Iterable[FuzzyMatrix]) -> FuzzyMatrix:
    """Component-wise arithmetic mean of expert fuzzy matrices."""
    matrices = list(matrices)
    if not matrices:
        raise EmptyInputError("fuzzy_mean needs at least one matrix")
    n = matrices[0].n
    for k, fm in enumerate(matrices):
        if fm.n != n:
            raise DimensionMismatchError(f"matrix {k} has n={fm.n}, expected n={n}")
    h = len(matrices)
    lower = sum(fm.lower for fm in matrices) / h
    middle = sum(fm.middle for fm in matrices) / h
    upper = sum(fm.upper for fm in matrices) / h
    return FuzzyMatrix(lower, middle, upper)


@dataclass(frozen=True)
class CfcsTrace:
    """Intermediate CFCS quantities, one ``(n, n)`` array per field.

    ``min_l``, ``max_r`` and ``span`` are scalars in global mode and
    length-``n`` column vectors in per-column mode. Diagonal cells hold 0.
    """

    xl: np.ndarray
    xm: np.ndarray
    xr: np.ndarray
    xls: np.ndarray
    xrs: np.ndarray
    x: np.ndarray
    z: np.ndarray
    min_l: np.ndarray | float
    max_r: np.ndarray | float
    span: np.ndarray | float


CFCS_BOUND_MODES = ("global", "per-column")


def cfcs_defuzzify(fm: FuzzyMatrix, bounds: str = "global") -> tuple[np.ndarray, CfcsTrace]:
    """Defuzzify ``fm`` with CFCS (Converting Fuzzy data into Crisp Scores).

    Bounds ``min l`` and ``max u`` are taken over off-diagonal entries, either
    matrix-wide (``"global"``) or per column (``"per-column"``). Where the span
    is zero every input in scope is the same crisp value, and the output is
    that value.

    Returns the crisp ``(n, n)`` array and the full trace.
    """
    if bounds not in CFCS_BOUND_MODES:
        raise DematelError(f"unknown CFCS bound mode {bounds!r}; use one of {CFCS_BOUND_MODES}")
    n = fm.n
    off = ~np.eye(n, dtype=bool)
    lo, mid, up = fm.lower, fm.middle, fm.upper

    if bounds == "global":
        min_l = float(lo[off].min())
        max_r = float(up[off].max())
        span = max_r - min_l
        min_b = np.full((n, n), min_l)
        span_b = np.full((n, n), span)
    else:
        masked_lo = np.where(off, lo, np.inf)
        masked_up = np.where(off, up, -np.inf)
        min_l = masked_lo.min(axis=0)
        max_r = masked_up.max(axis=0)
        span = max_r - min_l
        min_b = np.broadcast_to(min_l, (n, n))
        span_b = np.broadcast_to(span, (n, n))

    degenerate = span_b <= 0.0
    safe_span = np.where(degenerate, 1.0, span_b)

    xl = (lo - min_b) / safe_span
    xm = (mid - min_b) / safe_span
    xr = (up - min_b) / safe_span
    xls = xm / (1.0 + xm - xl)
    xrs = xr / (1.0 + xr - xm)
    x = (xls * (1.0 - xls) + xrs * xrs) / (1.0 - xls + xrs)
    z = min_b + x * span_b

    # zero span: every entry in scope is the same crisp value
    xl, xm, xr, xls, xrs, x = (np.where(degenerate, 0.0, a) for a in (xl, xm, xr, xls, xrs, x))
    z = np.where(degenerate, mid, z)

    for a in (xl, xm, xr, xls, xrs, x, z):
        np.fill_diagonal(a, 0.0)
        a.setflags(write=False)

    trace = CfcsTrace(xl, xm, xr, xls, xrs, x, z, min_l, max_r, span)
    return z, trace
