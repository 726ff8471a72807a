"""End-to-end analysis: survey or matrix in, every intermediate result out."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from . import dematel, fuzzy, graph
from .config import AnalysisConfig
from .dematel import FactorScores, FactorSet, InfluenceMatrix
from .errors import DematelError, StageError
from .survey import CRISP, ExpertSurvey

Source = Union[ExpertSurvey, InfluenceMatrix]


@dataclass(frozen=True, eq=False)
class AnalysisBundle:
    """Everything one run produced.

    ``source`` is one of ``"crisp survey"``, ``"linguistic survey"``,
    ``"average matrix"`` or ``"total matrix"``. Stages skipped for the
    given source are ``None`` (a total matrix has no A, D or s).
    """

    config: AnalysisConfig
    factor_set: FactorSet
    source: str
    experts: int | None
    fuzzy_average: fuzzy.FuzzyMatrix | None
    cfcs_trace: fuzzy.CfcsTrace | None
    average: InfluenceMatrix | None
    normalized: InfluenceMatrix | None
    s: float | None
    total: InfluenceMatrix
    scores: FactorScores
    threshold: float
    irm: graph.ImpactRelationMap
    loops: graph.FeedbackLoopSet
    structure: tuple[graph.FactorStructure, ...]


class _stage:
    """Re-raise domain errors inside the block as :class:`StageError`."""

    def __init__(self, name):
        self.name = name

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        if exc is not None and isinstance(exc, DematelError) and not isinstance(exc, StageError):
            raise StageError(self.name, exc) from exc
        return False


def run_pipeline(source: Source, config: AnalysisConfig | None = None) -> AnalysisBundle:
    config = config or AnalysisConfig()
    fuzzy_avg = trace = a = d = s = None
    experts = None

    if isinstance(source, ExpertSurvey):
        experts = source.h
        with _stage("validation"):
            source.validate(config.scale_max)
        if source.kind == CRISP:
            label = "crisp survey"
            with _stage("aggregation"):
                a = dematel.average_matrix(source.crisp_matrices(), config.scale_max)
        else:
            label = "linguistic survey"
            with _stage("aggregation"):
                fuzzy_avg = fuzzy.fuzzy_mean(source.fuzzy_matrices())
            with _stage("defuzzification"):
                z, trace = fuzzy.cfcs_defuzzify(fuzzy_avg, config.cfcs_bounds)
                a = InfluenceMatrix(source.factor_set, z, "average")
    elif isinstance(source, InfluenceMatrix):
        label = f"{source.kind} matrix"
        if source.kind == "average":
            a = source
        elif source.kind != "total":
            raise StageError("validation", DematelError("pipeline input must be an average or total matrix"))
    else:
        raise TypeError(f"cannot analyze {type(source).__name__}")

    if a is not None:
        with _stage("normalization"):
            d, s = dematel.normalize(a)
        with _stage("total-relation"):
            t = dematel.total_relation(d)
    else:
        t = source

    with _stage("scoring"):
        scores = dematel.factor_scores(t, config.epsilon)
    with _stage("threshold"):
        p = graph.default_threshold(t) if config.auto_threshold else float(config.threshold)
        irm = graph.threshold_map(t, p, exclude_self_loops=not config.allow_self_loops)
    with _stage("cycles"):
        loops = graph.enumerate_cycles(irm, config.max_cycle_len, config.max_cycles)
        structure = graph.factor_stats(irm, loops)

    return AnalysisBundle(
        config=config,
        factor_set=t.factor_set,
        source=label,
        experts=experts,
        fuzzy_average=fuzzy_avg,
        cfcs_trace=trace,
        average=a,
        normalized=d,
        s=s,
        total=t,
        scores=scores,
        threshold=p,
        irm=irm,
        loops=loops,
        structure=structure,
    )


def bundles_equal(x: AnalysisBundle, y: AnalysisBundle) -> bool:
    """Bit-level comparison of the numeric outputs of two runs."""

    def same(u, v):
        if u is None or v is None:
            return u is v
        return u == v

    return (
        same(x.average, y.average)
        and same(x.normalized, y.normalized)
        and x.s == y.s
        and x.total == y.total
        and np.array_equal(x.scores.r, y.scores.r)
        and np.array_equal(x.scores.c, y.scores.c)
        and x.threshold == y.threshold
        and x.irm == y.irm
        and x.loops.cycles == y.loops.cycles
        and x.structure == y.structure
    )
