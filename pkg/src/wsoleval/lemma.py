"""Ill-posedness of weakly-supervised localization on finite cue worlds.

A cue world is a finite joint distribution over cue labels M with a prior
p(M), posteriors p(Y=1|M) and deterministic foreground labels T(M). The
scoring rule is the true posterior s(M) = p(Y=1|M), thresholded with the
inclusive rule s >= tau.

Boundary convention: with inclusive thresholding, a world whose smallest
foreground posterior *equals* the largest background posterior admits no
perfect threshold (the boundary background cue is predicted foreground), so
the ratio condition is implemented with a strict inequality by default; the
non-strict variant is exposed for comparison.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

import numpy as np

PRIOR_TOLERANCE = 1e-12


@dataclass(frozen=True)
class CueWorld:
    cues: tuple[str, ...]
    prior: tuple[float, ...]         # p(M), sums to 1
    posterior: tuple[float, ...]     # p(Y=1 | M)
    fg_label: tuple[int, ...]        # T(M) in {0, 1}

    def __post_init__(self) -> None:
        n = len(self.cues)
        if not (len(self.prior) == len(self.posterior) == len(self.fg_label) == n) or n == 0:
            raise ValueError("cue world fields must be non-empty and of equal length")
        pr = np.asarray(self.prior, dtype=np.float64)
        if np.any(pr < 0) or abs(pr.sum() - 1.0) > PRIOR_TOLERANCE:
            raise ValueError("prior must be non-negative and sum to 1")
        po = np.asarray(self.posterior, dtype=np.float64)
        if np.any(po < 0) or np.any(po > 1):
            raise ValueError("posteriors must lie in [0, 1]")
        if not set(self.fg_label) <= {0, 1}:
            raise ValueError("foreground labels must be 0 or 1")
        has_fg = any(t == 1 and p > 0 for t, p in zip(self.fg_label, self.prior))
        has_bg = any(t == 0 and p > 0 for t, p in zip(self.fg_label, self.prior))
        if not (has_fg and has_bg):
            raise ValueError("world needs a positive-prior cue of each class")


def px_acc(world: CueWorld, tau: float) -> float:
    """P(s >= tau | T=1) P(T=1) + P(s < tau | T=0) P(T=0), by enumeration."""
    acc = 0.0
    for p, s, t in zip(world.prior, world.posterior, world.fg_label):
        predicted_fg = s >= tau
        if (t == 1) == predicted_fg:
            acc += p
    return acc


def _candidate_thresholds(world: CueWorld) -> list[float]:
    """Distinct posteriors of positive-prior cues, plus one value above all
    of them; every achievable prediction pattern appears at one of these."""
    vals = sorted({s for s, p in zip(world.posterior, world.prior) if p > 0})
    return vals + [vals[-1] + 1.0]


def perfect_threshold_exists(world: CueWorld) -> tuple[bool, float | None]:
    """Whether some tau attains pixel accuracy 1, decided by testing the
    finitely many thresholds at which the prediction pattern changes."""
    for tau in _candidate_thresholds(world):
        if abs(px_acc(world, tau) - 1.0) <= PRIOR_TOLERANCE:
            return True, tau
    return False, None


def posterior_ratio_condition(world: CueWorld, strict: bool = True) -> bool:
    """Finite-world posterior-ratio condition over positive-prior cues:
    min foreground posterior (strictly, by default) above the max background
    posterior."""
    fg = [s for s, p, t in zip(world.posterior, world.prior, world.fg_label) if p > 0 and t == 1]
    bg = [s for s, p, t in zip(world.posterior, world.prior, world.fg_label) if p > 0 and t == 0]
    if strict:
        return min(fg) > max(bg)
    return min(fg) >= max(bg)


def posterior_ratio_from_likelihoods(p_fg_given_y1: float, p_bg_given_y1: float,
                                     p_fg_given_y0: float, p_bg_given_y0: float,
                                     p_y1: float) -> float:
    """Posterior ratio p(Y=1|fg)/p(Y=1|bg) via the likelihood/prior-ratio
    decomposition: [p(fg|Y=1)/p(bg|Y=1)] * [p(fg)/p(bg)]^-1."""
    for v in (p_fg_given_y1, p_bg_given_y1, p_fg_given_y0, p_bg_given_y0, p_y1):
        if not 0.0 <= v <= 1.0:
            raise ValueError(f"probabilities must lie in [0, 1], got {v}")
    p_y0 = 1.0 - p_y1
    p_fg = p_fg_given_y1 * p_y1 + p_fg_given_y0 * p_y0
    p_bg = p_bg_given_y1 * p_y1 + p_bg_given_y0 * p_y0
    if p_bg_given_y1 == 0 or p_fg == 0 or p_bg == 0:
        raise ValueError("zero denominator in posterior ratio")
    return (p_fg_given_y1 / p_bg_given_y1) * (p_bg / p_fg)


@dataclass(frozen=True)
class LemmaReport:
    worlds_checked: int
    disagreements: int
    counterexamples: list = field(default_factory=list)


def check_lemma_exhaustive(max_cues: int = 5, posterior_grid: int = 9,
                           strict: bool = True, max_counterexamples: int = 5) -> LemmaReport:
    """Exhaustively compare perfect_threshold_exists with the posterior-ratio
    condition over all worlds with 2..max_cues cues, posteriors on the grid
    {1/(g+1), ..., g/(g+1)} and every label assignment with both classes.

    Priors are uniform; neither predicate depends on the prior values once
    all cues have positive prior. The threshold search is vectorized but
    tests exactly the candidate thresholds of perfect_threshold_exists.
    """
    grid = np.array([(k + 1) / (posterior_grid + 1) for k in range(posterior_grid)])
    checked = 0
    disagreements = 0
    counterexamples: list = []
    for n in range(2, max_cues + 1):
        posts = np.array(list(product(grid, repeat=n)))  # (W, n)
        for labels in product((0, 1), repeat=n):
            if 0 not in labels or 1 not in labels:
                continue
            lab = np.array(labels, dtype=bool)
            fg_min = posts[:, lab].min(axis=1)
            bg_max = posts[:, ~lab].max(axis=1)
            cond = fg_min > bg_max if strict else fg_min >= bg_max
            # a perfect tau exists iff some candidate tau classifies every cue
            perfect = np.zeros(posts.shape[0], dtype=bool)
            candidates = [posts[:, c] for c in range(n)] + [posts.max(axis=1) + 1.0]
            for tau in candidates:
                ok = np.ones(posts.shape[0], dtype=bool)
                for j in range(n):
                    ok &= (posts[:, j] >= tau) == lab[j]
                perfect |= ok
            checked += posts.shape[0]
            bad = perfect != cond
            n_bad = int(bad.sum())
            disagreements += n_bad
            if n_bad and len(counterexamples) < max_counterexamples:
                for idx in np.flatnonzero(bad)[: max_counterexamples - len(counterexamples)]:
                    counterexamples.append(
                        {"posteriors": [float(v) for v in posts[idx]], "fg_labels": list(labels)}
                    )
    return LemmaReport(worlds_checked=checked, disagreements=disagreements,
                       counterexamples=counterexamples)
