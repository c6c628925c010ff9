"""End-to-end pipeline wiring: stages, goal tracking, and configuration."""

from hornchain.analyzer import AnalysisStats, Verdict, format_model
from hornchain.parser import parse_program
from hornchain.pipeline import PipelineConfig, run_pipeline


def test_full_pipeline_on_worked_example(twophase, twophase_model_text):
    res = run_pipeline(twophase)
    assert res.verdict is Verdict.SAFE
    assert [name for name, _ in res.stages] == ["input", "raf", "unfold", "qa", "split"]
    assert res.goal == "false_ans"
    assert format_model(res.model) == twophase_model_text
    assert len(res.thresholds) > 0


def test_scaled_example_same_iteration_counts(twophase, twophase_scaled):
    a = run_pipeline(twophase)
    b = run_pipeline(twophase_scaled)
    assert b.verdict is Verdict.SAFE
    assert a.stats == b.stats


def test_stage_skips_change_goal_and_stages(twophase):
    cfg = PipelineConfig(raf=False, unfold=False, qa=False, split=False)
    res = run_pipeline(twophase, cfg)
    assert [name for name, _ in res.stages] == ["input"]
    assert res.goal == "false"


def test_skip_thresholds_still_proves_worked_example(twophase):
    res = run_pipeline(twophase, PipelineConfig(thresholds=False))
    assert res.verdict is Verdict.SAFE
    assert len(res.thresholds) == 0


def test_partial_pipeline_is_sound_on_safe_program():
    p = parse_program("p(A) :- A = 1.\nfalse :- A = 2, p(A).\n")
    for cfg in (
        PipelineConfig(),
        PipelineConfig(raf=False),
        PipelineConfig(unfold=False),
        PipelineConfig(qa=False),
        PipelineConfig(split=False),
        PipelineConfig(raf=False, unfold=False, qa=False, split=False, thresholds=False),
    ):
        assert run_pipeline(p, cfg).verdict is Verdict.SAFE


def test_unsafe_program_never_reported_safe():
    p = parse_program("p(A) :- A = 1.\nfalse :- A = 1, p(A).\n")
    for cfg in (PipelineConfig(), PipelineConfig(qa=False, split=False)):
        assert run_pipeline(p, cfg).verdict is Verdict.UNKNOWN


def test_custom_goal_predicate():
    p = parse_program("p(A) :- A = 1.\nbad(A) :- A = 2, p(A).\n")
    res = run_pipeline(p, PipelineConfig(goal="bad"))
    assert res.verdict is Verdict.SAFE
    assert res.goal == "bad_ans"


def test_stats_fields(twophase):
    st = run_pipeline(twophase).stats
    assert isinstance(st, AnalysisStats)
    assert st.passes >= st.updates >= st.widenings >= 0
