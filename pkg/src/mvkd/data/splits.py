"""Actor-fold and held-out-view split planning.

The evaluation protocol holds one camera view out entirely for testing and
partitions actors into k folds so no actor appears in both the train and
validation side of a run.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .types import Dataset, MultiViewSample, VideoClip


@dataclass(frozen=True)
class SplitPlan:
    """One (held-out view, actor fold) train/validation assignment."""

    test_view: int
    fold_index: int
    k_folds: int
    train_actors: frozenset[int]
    val_actors: frozenset[int]
    train_views: tuple[int, ...]

    def __post_init__(self):
        if not 0 <= self.fold_index < self.k_folds:
            raise ValueError(
                f"fold_index {self.fold_index} out of range [0, {self.k_folds})"
            )
        if self.train_actors & self.val_actors:
            raise ValueError("train and validation actor sets overlap")
        if self.test_view in self.train_views:
            raise ValueError(f"test view {self.test_view} appears in train_views")


def stratified_actor_folds(
    actors: Iterable[int], k_folds: int, seed: int
) -> list[tuple[frozenset[int], frozenset[int]]]:
    """Partition actors into k folds of (train, validation) sets.

    Actors are sorted, shuffled once with the seeded generator, and dealt
    round-robin into folds, so fold sizes differ by at most one and the
    result is a pure function of (actors, k_folds, seed).
    """
    actors = sorted(set(actors))
    if k_folds < 1:
        raise ValueError(f"k_folds must be >= 1, got {k_folds}")
    if k_folds > len(actors):
        raise ValueError(
            f"k_folds={k_folds} exceeds the number of actors ({len(actors)})"
        )
    rng = np.random.default_rng(seed)
    order = [actors[i] for i in rng.permutation(len(actors))]
    folds = []
    for fold in range(k_folds):
        val = frozenset(order[fold::k_folds])
        train = frozenset(a for a in actors if a not in val)
        folds.append((train, val))
    return folds


def make_split_plans(
    dataset: Dataset, k_folds: int, seed: int, views: Iterable[int] | None = None
) -> list[SplitPlan]:
    """All (test_view x fold) plans for a dataset."""
    views = tuple(views) if views is not None else dataset.view_ids
    folds = stratified_actor_folds(dataset.actors, k_folds, seed)
    plans = []
    for test_view in views:
        if test_view not in dataset.view_ids:
            raise ValueError(f"unknown test view {test_view}")
        train_views = tuple(v for v in dataset.view_ids if v != test_view)
        for fold_index, (train_actors, val_actors) in enumerate(folds):
            plans.append(
                SplitPlan(
                    test_view=test_view,
                    fold_index=fold_index,
                    k_folds=k_folds,
                    train_actors=train_actors,
                    val_actors=val_actors,
                    train_views=train_views,
                )
            )
    return plans


def make_cross_view_split(
    dataset: Dataset, plan: SplitPlan
) -> tuple[list[MultiViewSample], list[VideoClip]]:
    """Materialize a plan into (train samples, validation clips).

    Train samples keep only the training views of training actors; the
    validation side is the held-out view's clips of validation actors.
    """
    if plan.test_view not in dataset.view_ids:
        raise ValueError(f"plan test view {plan.test_view} not in dataset views {dataset.view_ids}")
    unknown_views = set(plan.train_views) - set(dataset.view_ids)
    if unknown_views:
        raise ValueError(f"plan references unknown views {sorted(unknown_views)}")
    unknown_actors = (plan.train_actors | plan.val_actors) - dataset.actors
    if unknown_actors:
        raise ValueError(f"plan references unknown actors {sorted(unknown_actors)}")
    if plan.train_actors | plan.val_actors != dataset.actors:
        missing = dataset.actors - (plan.train_actors | plan.val_actors)
        raise ValueError(f"plan does not cover actors {sorted(missing)}")

    train_set = [
        s.restricted_to(plan.train_views)
        for s in dataset.samples
        if s.actor_id in plan.train_actors
    ]
    val_set = [
        s.clips[plan.test_view]
        for s in dataset.samples
        if s.actor_id in plan.val_actors
    ]
    return train_set, val_set
