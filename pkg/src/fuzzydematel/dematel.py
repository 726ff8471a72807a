"""Crisp DEMATEL: averaging, normalization, total relation and cause/effect scores."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DegenerateInputError,
    DematelError,
    DiagonalError,
    EmptyInputError,
    FactorSetMismatchError,
    NonConvergentError,
)

KINDS = ("average", "normalized", "total")

# reciprocal 1-norm condition number below which (I - D) is treated as singular
MIN_RCOND = 1e-12


@dataclass(frozen=True)
class Factor:
    id: str
    name: str = ""

    @property
    def label(self) -> str:
        return self.name or self.id


@dataclass(frozen=True)
class FactorSet:
    factors: tuple[Factor, ...]

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))
        ids = self.ids
        if len(ids) < 2:
            raise DematelError(f"need at least 2 factors, got {len(ids)}")
        seen = set()
        for fid in ids:
            if not fid:
                raise DematelError("factor ids must be non-empty")
            if fid in seen:
                raise DematelError(f"duplicate factor id {fid!r}")
            seen.add(fid)

    @classmethod
    def from_ids(cls, ids: Iterable[str], names: Iterable[str] | None = None) -> "FactorSet":
        ids = list(ids)
        names = list(names) if names is not None else [""] * len(ids)
        return cls(tuple(Factor(i, nm) for i, nm in zip(ids, names)))

    @classmethod
    def numbered(cls, n: int) -> "FactorSet":
        return cls.from_ids(f"F{k}" for k in range(1, n + 1))

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(f.id for f in self.factors)

    @property
    def n(self) -> int:
        return len(self.factors)

    def index(self, fid: str) -> int:
        return self.ids.index(fid)

    def __len__(self):
        return self.n

    def __iter__(self):
        return iter(self.factors)


@dataclass(frozen=True, eq=False)
class InfluenceMatrix:
    """Crisp ``n x n`` nonnegative matrix over a factor set.

    ``kind`` is ``"average"`` (A), ``"normalized"`` (D) or ``"total"`` (T).
    The values array is copied and made read-only.
    """

    factor_set: FactorSet
    values: np.ndarray
    kind: str = "average"

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        n = self.factor_set.n
        if v.shape != (n, n):
            raise FactorSetMismatchError(
                f"matrix shape {v.shape} does not match {n} factors"
            )
        if self.kind not in KINDS:
            raise DematelError(f"unknown matrix kind {self.kind!r}")
        if not np.all(np.isfinite(v)):
            raise DematelError("matrix contains non-finite values")
        if np.any(v < 0):
            i, j = np.argwhere(v < 0)[0]
            ids = self.factor_set.ids
            raise DematelError(f"negative entry {v[i, j]!r} at cell [{ids[i]}][{ids[j]}]")
        if self.kind in ("average", "normalized"):
            diag = np.diag(v)
            if np.any(diag != 0):
                i = int(np.flatnonzero(diag)[0])
                raise DiagonalError(i, float(diag[i]), self.factor_set.ids[i])
        if self.kind == "normalized" and np.any(v > 1.0):
            raise DematelError("normalized matrix has entries above 1")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def n(self) -> int:
        return self.factor_set.n

    @property
    def ids(self) -> tuple[str, ...]:
        return self.factor_set.ids

    def __getitem__(self, key):
        i, j = key
        if isinstance(i, str):
            i = self.factor_set.index(i)
        if isinstance(j, str):
            j = self.factor_set.index(j)
        return float(self.values[i, j])

    def __eq__(self, other):
        if not isinstance(other, InfluenceMatrix):
            return NotImplemented
        return (
            self.kind == other.kind
            and self.factor_set == other.factor_set
            and np.array_equal(self.values, other.values)
        )


def average_matrix(responses: Sequence[InfluenceMatrix], scale_max: float | None = None) -> InfluenceMatrix:
    """Entry-wise mean of the experts' crisp response matrices."""
    responses = list(responses)
    if not responses:
        raise EmptyInputError("average_matrix needs at least one expert response")
    fs = responses[0].factor_set
    for k, x in enumerate(responses):
        if x.factor_set != fs:
            raise FactorSetMismatchError(
                f"response {k + 1} is over factors {list(x.ids)}, expected {list(fs.ids)}"
            )
        diag = np.diag(x.values)
        if np.any(diag != 0):
            i = int(np.flatnonzero(diag)[0])
            raise DiagonalError(i, float(diag[i]), fs.ids[i], f"response {k + 1}")
        if scale_max is not None and np.any(x.values > scale_max):
            raise DematelError(f"response {k + 1} has ratings above the scale max {scale_max}")
    total = np.zeros((fs.n, fs.n))
    for x in responses:
        total = total + x.values
    return InfluenceMatrix(fs, total / len(responses), "average")


def normalize(a: InfluenceMatrix) -> tuple[InfluenceMatrix, float]:
    """Scale A by ``s = max(max row sum, max column sum)``; returns ``(D, s)``."""
    v = a.values
    s = float(max(v.sum(axis=1).max(), v.sum(axis=0).max()))
    if s <= 0.0:
        raise DegenerateInputError("degenerate input: all-zero matrix (s = 0)")
    d = np.minimum(v / s, 1.0)
    np.fill_diagonal(d, 0.0)
    return InfluenceMatrix(a.factor_set, d, "normalized"), s


def total_relation_values(d: np.ndarray, min_rcond: float = MIN_RCOND) -> np.ndarray:
    """``D (I - D)^-1`` for a bare square array via an LU solve.

    Solves ``(I - D)^T T^T = D^T`` rather than forming the inverse.
    """
    d = np.asarray(d, dtype=float)
    n = d.shape[0]
    m = np.eye(n) - d
    with np.errstate(all="ignore"):
        cond = np.linalg.cond(m, 1)
    rcond = 0.0 if not np.isfinite(cond) or cond == 0 else 1.0 / cond
    if rcond < min_rcond:
        raise NonConvergentError(
            f"(I - D) is singular or ill-conditioned (reciprocal condition {rcond:.3g} < "
            f"{min_rcond:.3g}); the indirect-influence series only converges when the "
            "spectral radius of D is below 1"
        )
    try:
        return np.linalg.solve(m.T, d.T).T
    except np.linalg.LinAlgError as exc:
        raise NonConvergentError(
            f"(I - D) is singular ({exc}); the spectral radius of D must be below 1"
        ) from exc


def total_relation(d: InfluenceMatrix, min_rcond: float = MIN_RCOND) -> InfluenceMatrix:
    t = total_relation_values(d.values, min_rcond)
    if np.any(t < -1e-12):
        raise NonConvergentError(
            "total-relation matrix has negative entries; the spectral radius of D must be below 1"
        )
    t = np.maximum(t, 0.0)
    return InfluenceMatrix(d.factor_set, t, "total")


CAUSE, EFFECT, NEUTRAL = "cause", "effect", "neutral"


def classify(relation: float, epsilon: float = 1e-9) -> str:
    if relation > epsilon:
        return CAUSE
    if relation < -epsilon:
        return EFFECT
    return NEUTRAL


@dataclass(frozen=True, eq=False)
class FactorScores:
    """Dispatched (r) and received (c) influence per factor."""

    factor_set: FactorSet
    r: np.ndarray
    c: np.ndarray
    epsilon: float = 1e-9

    @property
    def prominence(self) -> np.ndarray:
        return self.r + self.c

    @property
    def relation(self) -> np.ndarray:
        return self.r - self.c

    @property
    def classes(self) -> tuple[str, ...]:
        return tuple(classify(float(x), self.epsilon) for x in self.relation)

    def causes(self) -> list[str]:
        return [fid for fid, k in zip(self.factor_set.ids, self.classes) if k == CAUSE]

    def effects(self) -> list[str]:
        return [fid for fid, k in zip(self.factor_set.ids, self.classes) if k == EFFECT]

    def row(self, fid: str) -> dict:
        i = self.factor_set.index(fid)
        return {
            "factor": fid,
            "r": float(self.r[i]),
            "c": float(self.c[i]),
            "prominence": float(self.prominence[i]),
            "relation": float(self.relation[i]),
            "class": self.classes[i],
        }

    def rows(self) -> list[dict]:
        return [self.row(fid) for fid in self.factor_set.ids]


def factor_scores(t: InfluenceMatrix, epsilon: float = 1e-9) -> FactorScores:
    v = t.values
    r = v.sum(axis=1)
    c = v.sum(axis=0)
    r.setflags(write=False)
    c.setflags(write=False)
    return FactorScores(t.factor_set, r, c, epsilon)
