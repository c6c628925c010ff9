"""End-to-end verification pipeline.

The stages run in a fixed order, each on the previous stage's output:
argument filtering, forward unfolding, query-answer specialization,
predicate splitting, threshold computation, and finally the polyhedral
fixpoint analysis.  Every transformation preserves derivability of the
goal, so emptiness of the goal's polyhedron in the final model proves the
original program safe.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .analyzer import (
    AbstractModel,
    AnalysisStats,
    Verdict,
    analyze,
    check_safety,
)
from .chc import FALSE_PRED, Program
from .thresholds import ThresholdSet, compute_thresholds
from .transform import (
    answer_pred,
    query_answer,
    raf_filter,
    split_predicates,
    unfold_forward,
)


@dataclass(frozen=True)
class PipelineConfig:
    """Stage toggles and numeric knobs for ``run_pipeline``."""

    raf: bool = True
    unfold: bool = True
    qa: bool = True
    split: bool = True
    thresholds: bool = True
    widen_delay: int = 2
    tp_cap: int = 200
    goal: str = FALSE_PRED


@dataclass(frozen=True)
class PipelineResult:
    verdict: Verdict
    model: AbstractModel
    goal: str                                   # goal predicate in the analyzed program
    stages: tuple[tuple[str, Program], ...]     # stage name -> program after it
    thresholds: ThresholdSet
    stats: AnalysisStats

    def stage(self, name: str) -> Program:
        for n, p in self.stages:
            if n == name:
                return p
        raise KeyError(name)


def run_pipeline(program: Program, config: PipelineConfig = PipelineConfig()) -> PipelineResult:
    """Transform, analyze, and judge a program."""
    goal = config.goal
    stages: list[tuple[str, Program]] = [("input", program)]

    if config.raf:
        program = raf_filter(program, goal)
        stages.append(("raf", program))
    if config.unfold:
        program = unfold_forward(program, goal)
        stages.append(("unfold", program))
    if config.qa:
        new_goal = answer_pred(goal, program)
        program = query_answer(program, goal)
        goal = new_goal
        stages.append(("qa", program))
    if config.split:
        program = split_predicates(program, protected=(goal,))
        stages.append(("split", program))

    ts = (
        compute_thresholds(program, cap=config.tp_cap)
        if config.thresholds
        else ThresholdSet.empty()
    )
    model, stats = analyze(program, ts, widen_delay=config.widen_delay)
    verdict = check_safety(model, goal)
    return PipelineResult(verdict, model, goal, tuple(stages), ts, stats)
