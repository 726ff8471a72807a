import numpy as np
import pytest

from fuzzydematel.config import AnalysisConfig
from fuzzydematel.dematel import FactorSet, InfluenceMatrix
from fuzzydematel.errors import DematelError, StageError
from fuzzydematel.fuzzy import DEFAULT_SCALE
from fuzzydematel.pipeline import bundles_equal, run_pipeline
from fuzzydematel.survey import ExpertSurvey

from conftest import IDS

FS10 = FactorSet.from_ids(IDS)
CAUSES = ["F2", "F4", "F5", "F7", "F8"]


@pytest.fixture(scope="module")
def t2_bundle(table2):
    return run_pipeline(InfluenceMatrix(FS10, table2), AnalysisConfig(threshold=0.80))


def test_table2_end_to_end(t2_bundle, table3, table4, table5):
    b = t2_bundle
    assert b.source == "average matrix" and b.experts is None
    assert b.s == pytest.approx(6.56, abs=0.005)
    np.testing.assert_allclose(b.normalized.values, table3, atol=0.01)
    np.testing.assert_allclose(b.total.values, table4, atol=0.02)
    # published scores are sums of the two-decimal T, so unrounded sums drift further
    np.testing.assert_allclose(b.scores.relation, table5[:, 3], atol=0.03)
    np.testing.assert_allclose(b.scores.r, table5[:, 0], atol=0.08)
    np.testing.assert_allclose(b.scores.c, table5[:, 1], atol=0.08)
    np.testing.assert_allclose(b.scores.prominence, table5[:, 2], atol=0.08)
    assert b.scores.causes() == CAUSES
    assert b.scores.effects() == [f for f in IDS if f not in CAUSES]


def test_table2_structure(t2_bundle):
    b = t2_bundle
    assert b.threshold == 0.80
    assert b.loops.cycles == (("F5", "F10"),)
    assert sorted(b.structure, key=lambda s: s.rank)[0].factor in ("F5", "F10")


def test_auto_threshold_is_mean_off_diagonal(table2):
    b = run_pipeline(InfluenceMatrix(FS10, table2))
    off = ~np.eye(10, dtype=bool)
    assert b.threshold == pytest.approx(b.total.values[off].mean(), abs=1e-15)


def test_single_expert_survey_matches_matrix_input():
    rng = np.random.default_rng(11)
    x = rng.integers(0, 5, size=(6, 6))
    np.fill_diagonal(x, 0)
    fs = FactorSet.numbered(6)
    sv = ExpertSurvey(fs, (x.tolist(),))
    a = run_pipeline(sv)
    b = run_pipeline(InfluenceMatrix(fs, x.astype(float)))
    assert a.source == "crisp survey" and a.experts == 1
    assert bundles_equal(a, b)


def test_two_expert_survey_averages():
    fs = FactorSet.numbered(3)
    e1 = [[0, 4, 0], [2, 0, 1], [3, 1, 0]]
    e2 = [[0, 2, 2], [0, 0, 3], [1, 1, 0]]
    b = run_pipeline(ExpertSurvey(fs, (e1, e2)))
    np.testing.assert_array_equal(b.average.values, (np.array(e1) + np.array(e2)) / 2)


def test_invalid_rating_is_a_validation_error():
    fs = FactorSet.numbered(2)
    with pytest.raises(StageError) as info:
        run_pipeline(ExpertSurvey(fs, ([[0, 5], [1, 0]],)))
    assert info.value.stage == "validation"
    assert "0..4" in str(info.value)


def test_all_zero_input_fails_at_normalization():
    with pytest.raises(StageError, match="^normalization: degenerate input"):
        run_pipeline(InfluenceMatrix(FactorSet.numbered(3), np.zeros((3, 3))))


def test_normalized_matrix_is_rejected():
    d = InfluenceMatrix(FactorSet.numbered(2), [[0, 0.5], [0.5, 0]], "normalized")
    with pytest.raises(DematelError):
        run_pipeline(d)


def test_linguistic_survey_end_to_end():
    fs = FactorSet.numbered(3)
    e1 = [["0", "very-high", "low"], ["very-low", "0", "high"], ["no-influence", "low", "0"]]
    e2 = [["0", "high", "low"], ["low", "0", "very-high"], ["very-low", "very-low", "0"]]
    b = run_pipeline(ExpertSurvey(fs, (e1, e2), "linguistic", DEFAULT_SCALE))
    assert b.source == "linguistic survey"
    assert b.fuzzy_average[0, 1].m == pytest.approx(0.875)
    off = ~np.eye(3, dtype=bool)
    assert np.all(b.average.values[off] >= b.cfcs_trace.min_l)
    assert np.all(b.average.values[off] <= b.cfcs_trace.max_r)
    assert np.all(np.diag(b.average.values) == 0)
    assert b.scores.r.sum() == pytest.approx(b.total.values.sum(), abs=1e-12)


def test_linguistic_per_column_bounds_differ():
    fs = FactorSet.numbered(3)
    e1 = [["0", "very-high", "very-low"], ["very-low", "0", "high"], ["no-influence", "low", "0"]]
    sv = ExpertSurvey(fs, (e1,), "linguistic")
    g = run_pipeline(sv, AnalysisConfig(cfcs_bounds="global"))
    c = run_pipeline(sv, AnalysisConfig(cfcs_bounds="per-column"))
    assert np.ndim(g.cfcs_trace.span) == 0 and np.shape(c.cfcs_trace.span) == (3,)
    assert not np.array_equal(g.average.values, c.average.values)


def test_total_matrix_input_skips_normalization(table4):
    b = run_pipeline(InfluenceMatrix(FS10, table4, "total"))
    assert b.average is None and b.normalized is None and b.s is None
    assert b.threshold == pytest.approx(0.70, abs=1e-12)


def test_runs_are_deterministic(table2):
    a = InfluenceMatrix(FS10, table2)
    assert bundles_equal(run_pipeline(a), run_pipeline(a))


def test_self_loops_config(table4):
    t = InfluenceMatrix(FS10, table4, "total")
    b = run_pipeline(t, AnalysisConfig(threshold=0.7, allow_self_loops=True))
    assert ("F4", "F4") in b.irm.edge_pairs()
    assert ("F4",) in b.loops.cycles
