"""Expert survey container: H response matrices over one factor set."""

from __future__ import annotations

from dataclasses import dataclass

from .dematel import FactorSet, InfluenceMatrix
from .errors import DematelError, DiagonalError, EmptyInputError, OutOfRangeError, UnknownTermError
from .fuzzy import DEFAULT_SCALE, ZERO, FuzzyMatrix, LinguisticScale, term_to_tfn

CRISP, LINGUISTIC = "crisp", "linguistic"


@dataclass(frozen=True)
class ExpertSurvey:
    """Raw expert responses.

    ``responses[k][i][j]`` is expert ``k``'s rating of factor ``i``'s influence
    on factor ``j``: an ``int`` for crisp surveys, a term label for linguistic
    ones. Linguistic diagonals may hold the scale's weakest term or ``0``;
    both mean crisp zero.
    """

    factor_set: FactorSet
    responses: tuple
    kind: str = CRISP
    scale: LinguisticScale = DEFAULT_SCALE

    def __post_init__(self):
        if self.kind not in (CRISP, LINGUISTIC):
            raise DematelError(f"unknown survey kind {self.kind!r}")
        resp = tuple(tuple(tuple(row) for row in m) for m in self.responses)
        object.__setattr__(self, "responses", resp)
        if not resp:
            raise EmptyInputError("survey has no expert responses")
        n = self.factor_set.n
        for k, m in enumerate(resp, start=1):
            if len(m) != n or any(len(row) != n for row in m):
                raise DematelError(f"expert {k}: response is not {n}x{n}")

    @property
    def n(self) -> int:
        return self.factor_set.n

    @property
    def h(self) -> int:
        return len(self.responses)

    def validate(self, scale_max: int = 4) -> None:
        """Check every cell against the rating scale; raise on the first bad one."""
        ids = self.factor_set.ids
        for k, m in enumerate(self.responses, start=1):
            for i, row in enumerate(m):
                for j, cell in enumerate(row):
                    where = f"expert {k}, cell [{ids[i]}][{ids[j]}]"
                    if self.kind == CRISP:
                        if isinstance(cell, bool) or not isinstance(cell, int):
                            raise OutOfRangeError(f"{where}: crisp rating {cell!r} is not an integer")
                        if not 0 <= cell <= scale_max:
                            raise OutOfRangeError(
                                f"{where}: rating {cell} outside the integer scale 0..{scale_max}"
                            )
                        if i == j and cell != 0:
                            raise DiagonalError(i, cell, ids[i], f"expert {k}")
                    else:
                        if i == j:
                            if cell not in (0, "0", self.scale.zero_term):
                                raise DiagonalError(i, cell, ids[i], f"expert {k}")
                            continue
                        if cell not in self.scale:
                            raise UnknownTermError(cell, self.scale.labels)

    def crisp_matrices(self) -> list[InfluenceMatrix]:
        if self.kind != CRISP:
            raise DematelError("crisp_matrices() needs a crisp survey")
        return [InfluenceMatrix(self.factor_set, m, "average") for m in self.responses]

    def fuzzy_matrices(self) -> list[FuzzyMatrix]:
        if self.kind != LINGUISTIC:
            raise DematelError("fuzzy_matrices() needs a linguistic survey")
        out = []
        for m in self.responses:
            grid = [
                [ZERO if i == j else term_to_tfn(self.scale, cell) for j, cell in enumerate(row)]
                for i, row in enumerate(m)
            ]
            out.append(FuzzyMatrix.from_entries(grid))
        return out
