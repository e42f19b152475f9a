"""Random hyperparameter search protocol: per-method sampling spaces,
seeded trial generation, convergence filtering, best-trial selection and
Kendall-tau ranking transfer.

Trial execution (training) is external: this module emits trial configs as
JSON lines and consumes results as CSV rows trial_id,final_loss,metric_value.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
from scipy import stats

METHODS = ("CAM", "HaS", "ACoL", "SPG", "ADL", "CutMix")

CONVERGENCE_LOSS_LIMIT = 2.0  # final loss above this marks a failed session

_MASK64 = (1 << 64) - 1


# ---------------------------------------------------------------------------
# distributions


@dataclass(frozen=True)
class Uniform:
    lo: float
    hi: float

    def sample(self, rng: np.random.Generator, values: dict) -> float:
        return float(rng.uniform(self.lo, self.hi))

    def contains(self, v, values: dict) -> bool:
        return self.lo <= v <= self.hi


@dataclass(frozen=True)
class LogUniform:
    lo: float
    hi: float

    def sample(self, rng: np.random.Generator, values: dict) -> float:
        return float(np.exp(rng.uniform(np.log(self.lo), np.log(self.hi))))

    def contains(self, v, values: dict) -> bool:
        return self.lo <= v <= self.hi


@dataclass(frozen=True)
class Categorical:
    choices: tuple

    def sample(self, rng: np.random.Generator, values: dict):
        return self.choices[int(rng.integers(len(self.choices)))]

    def contains(self, v, values: dict) -> bool:
        return v in self.choices


@dataclass(frozen=True)
class DependentUniform:
    """Uniform[values[lower_dim], hi]; the paired lower bound must already
    have been sampled."""

    lower_dim: str
    hi: float

    def sample(self, rng: np.random.Generator, values: dict) -> float:
        return float(rng.uniform(values[self.lower_dim], self.hi))

    def contains(self, v, values: dict) -> bool:
        return values[self.lower_dim] <= v <= self.hi


@dataclass(frozen=True)
class ReciprocalShift:
    """1 / Uniform(0, scale] - shift (the CutMix size-prior rule)."""

    scale: float = 2.0
    shift: float = 0.5

    def sample(self, rng: np.random.Generator, values: dict) -> float:
        u = self.scale * (1.0 - rng.random())  # open at 0, closed at scale
        return 1.0 / u - self.shift

    def contains(self, v, values: dict) -> bool:
        return v >= 1.0 / self.scale - self.shift


@dataclass(frozen=True)
class HparamSpace:
    method: str
    dimensions: tuple  # ordered (name, distribution) pairs


_COMMON = (
    ("learning_rate", LogUniform(1e-5, 1e0)),
    ("scoremap_resolution", Categorical((14, 28))),
)

_METHOD_DIMS = {
    "CAM": (),
    "HaS": (
        ("drop_rate", Uniform(0.0, 1.0)),
        ("drop_area", Uniform(0.0, 1.0)),
    ),
    "ACoL": (("erasing_threshold", Uniform(0.0, 1.0)),),
    "SPG": (
        ("threshold_l_b1", Uniform(0.0, 1.0)),
        ("threshold_h_b1", DependentUniform("threshold_l_b1", 1.0)),
        ("threshold_l_b2", Uniform(0.0, 1.0)),
        ("threshold_h_b2", DependentUniform("threshold_l_b2", 1.0)),
        ("threshold_l_c", Uniform(0.0, 1.0)),
        ("threshold_h_c", DependentUniform("threshold_l_c", 1.0)),
    ),
    "ADL": (
        ("drop_rate", Uniform(0.0, 1.0)),
        ("erasing_threshold", Uniform(0.0, 1.0)),
    ),
    "CutMix": (
        ("size_prior", ReciprocalShift()),
        ("mix_rate", Uniform(0.0, 1.0)),
    ),
}


def space_for(method: str) -> HparamSpace:
    if method not in _METHOD_DIMS:
        raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")
    return HparamSpace(method=method, dimensions=_COMMON + _METHOD_DIMS[method])


# ---------------------------------------------------------------------------
# trial sampling


@dataclass(frozen=True)
class TrialConfig:
    trial_id: int
    method: str
    values: dict
    seed: int

    def to_json(self) -> str:
        return json.dumps(
            {"trial_id": self.trial_id, "method": self.method,
             "values": self.values, "seed": self.seed},
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, line: str) -> "TrialConfig":
        d = json.loads(line)
        return cls(trial_id=d["trial_id"], method=d["method"], values=d["values"], seed=d["seed"])


def trial_seed(master_seed: int, trial_id: int) -> int:
    """Deterministic 64-bit substream seed: splitmix64 finalizer applied to
    master_seed advanced by (trial_id + 1) golden-gamma steps."""
    z = (master_seed + 0x9E3779B97F4A7C15 * (trial_id + 1)) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def sample_trials(space: HparamSpace, n: int, seed: int) -> list[TrialConfig]:
    """n independent trial configs; bit-reproducible given (space, n, seed)."""
    if n < 1:
        raise ValueError("need at least one trial")
    trials = []
    for tid in range(n):
        sub = trial_seed(seed, tid)
        rng = np.random.default_rng(sub)
        values: dict = {}
        for name, dist in space.dimensions:
            values[name] = dist.sample(rng, values)
        trials.append(TrialConfig(trial_id=tid, method=space.method, values=values, seed=sub))
    return trials


def trials_to_jsonl(trials) -> str:
    return "".join(t.to_json() + "\n" for t in trials)


# ---------------------------------------------------------------------------
# results


@dataclass(frozen=True)
class TrialResult:
    trial_id: int
    final_loss: float
    metric_value: float

    def __post_init__(self) -> None:
        if self.final_loss < 0:
            raise ValueError(f"trial {self.trial_id}: negative final loss")

    @property
    def converged(self) -> bool:
        return self.final_loss <= CONVERGENCE_LOSS_LIMIT


def read_results_csv(text: str) -> list[TrialResult]:
    import csv as _csv
    import io

    out = []
    for row in _csv.DictReader(io.StringIO(text)):
        out.append(TrialResult(trial_id=int(row["trial_id"]),
                               final_loss=float(row["final_loss"]),
                               metric_value=float(row["metric_value"])))
    return out


def filter_converged(results) -> tuple[list[TrialResult], float]:
    """Split off failed sessions and report the failure ratio."""
    results = list(results)
    if not results:
        raise ValueError("no trial results")
    ok = [r for r in results if r.converged]
    return ok, (len(results) - len(ok)) / len(results)


def select_best(results, higher_is_better: bool = True) -> TrialResult:
    """Best converged trial; ties broken toward the smallest trial_id."""
    ok = [r for r in results if r.converged]
    if not ok:
        raise ValueError("no converged trials to select from")
    sign = -1.0 if higher_is_better else 1.0
    return min(ok, key=lambda r: (sign * r.metric_value, r.trial_id))


def kendall_tau(ranking_a, ranking_b) -> float:
    """Tie-corrected (tau-b) rank correlation between two score lists."""
    a = np.asarray(ranking_a, dtype=np.float64)
    b = np.asarray(ranking_b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError("rankings must be 1-d and of equal length")
    if a.size < 2:
        raise ValueError("need at least two entries")
    tau = stats.kendalltau(a, b, variant="b").statistic
    return float(tau)
