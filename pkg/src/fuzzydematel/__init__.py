"""Fuzzy DEMATEL analysis toolkit.

Linguistic or crisp expert surveys are aggregated, defuzzified with CFCS,
pushed through the DEMATEL total-relation computation, split into cause and
effect factors, thresholded into an impact-relation map and searched for
feedback loops.
"""

__version__ = "0.1.0"

from .config import AnalysisConfig
from .dematel import (
    Factor,
    FactorScores,
    FactorSet,
    InfluenceMatrix,
    average_matrix,
    classify,
    factor_scores,
    normalize,
    total_relation,
)
from .errors import DematelError, ParseError, StageError
from .fuzzy import (
    DEFAULT_SCALE,
    CfcsTrace,
    FuzzyMatrix,
    LinguisticScale,
    TriangularFuzzyNumber,
    cfcs_defuzzify,
    fuzzy_mean,
    membership,
    term_to_tfn,
)
from .graph import (
    Edge,
    FeedbackLoopSet,
    ImpactRelationMap,
    default_threshold,
    enumerate_cycles,
    factor_stats,
    threshold_map,
)
from .io import export_dot, export_report, format_matrix_csv, parse_edges, parse_matrix, parse_survey
from .pipeline import AnalysisBundle, run_pipeline
from .survey import ExpertSurvey

__all__ = [
    "AnalysisBundle",
    "AnalysisConfig",
    "CfcsTrace",
    "DEFAULT_SCALE",
    "DematelError",
    "Edge",
    "ExpertSurvey",
    "Factor",
    "FactorScores",
    "FactorSet",
    "FeedbackLoopSet",
    "FuzzyMatrix",
    "ImpactRelationMap",
    "InfluenceMatrix",
    "LinguisticScale",
    "ParseError",
    "StageError",
    "TriangularFuzzyNumber",
    "average_matrix",
    "cfcs_defuzzify",
    "classify",
    "default_threshold",
    "enumerate_cycles",
    "export_dot",
    "export_report",
    "factor_scores",
    "factor_stats",
    "format_matrix_csv",
    "fuzzy_mean",
    "membership",
    "normalize",
    "parse_edges",
    "parse_matrix",
    "parse_survey",
    "run_pipeline",
    "term_to_tfn",
    "threshold_map",
    "total_relation",
]
