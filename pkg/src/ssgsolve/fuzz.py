"""Randomized cross-checking of the solvers against the exact oracle.

Generates small games, solves each with the requested algorithms and
verifies convergence, final value accuracy, and that the certified bounds
actually sandwich the exact values, both at the end and at sampled
intermediate iterations. Failures are shrunk greedily (dropping actions
and unreferenced states while the failure persists) and can be written
out as model files for replay.
"""

from __future__ import annotations

import dataclasses
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterator, Mapping, Sequence

from .baselines import solve_bvi
from .model import Action, GenParams, StochasticGame, generate_random, serialize_model
from .oracle import TooLarge, exact_value
from .results import SolveResult
from .svi import DELAY, solve_svi
from .topo import solve_topological

SLACK = 1e-9


@dataclass(frozen=True)
class Counterexample:
    """One failing model, as generated and after shrinking."""

    index: int
    algorithm: str
    reason: str
    model_text: str
    shrunk_text: str


@dataclass
class FuzzReport:
    checked: int = 0
    skipped: int = 0
    failures: list[Counterexample] = field(default_factory=list)
    written: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def _solve(game: StochasticGame, algo: str, eps: float, overrides: Mapping[str, dict]) -> SolveResult:
    kwargs = dict(overrides.get(algo, {}))
    if algo == "svi":
        return solve_svi(game, eps, record_vectors=True, **kwargs)
    if algo == "bvi":
        return solve_bvi(game, eps, record_vectors=True, **kwargs)
    if algo == "topo":
        return solve_topological(game, eps, **kwargs)
    raise ValueError(f"unknown algorithm {algo!r}")


def _sample_indices(total: int, want: int) -> list[int]:
    if total <= want:
        return list(range(total))
    step = (total - 1) / (want - 1)
    return sorted({round(i * step) for i in range(want)})


def check_model(game: StochasticGame, algo: str, eps: float,
                values: Sequence[float], sample_iters: int = 10,
                overrides: Mapping[str, dict] | None = None) -> str | None:
    """Run one algorithm on one game; return a failure reason or None.

    Checks: convergence, |value - exact| within eps (2 eps for the
    topological driver, whose per-component budgets stack), the final
    bounds sandwich the exact values, the same at sampled recorded
    iterations, and the reported strategy uses real action labels.
    """
    try:
        res = _solve(game, algo, eps, overrides or {})
    except Exception as exc:  # a crash is a finding, not a test error
        return f"exception: {exc!r}"
    if not res.converged:
        return "did not converge"
    tol = 2 * eps if algo == "topo" else eps
    for s, v in enumerate(values):
        if res.lower[s] > v + SLACK:
            return f"final lower {res.lower[s]!r} above exact {v!r} at state {s}"
        if res.upper[s] < v - SLACK:
            return f"final upper {res.upper[s]!r} below exact {v!r} at state {s}"
        if abs(res.value[s] - v) > tol + SLACK:
            return f"value off by {abs(res.value[s] - v):.3e} at state {s}"
    if res.vectors:
        for k in _sample_indices(len(res.vectors), sample_iters):
            low, high = res.vectors[k]
            for s, v in enumerate(values):
                if low[s] > v + SLACK:
                    return f"iteration {k + 1}: lower {low[s]!r} above exact {v!r} at state {s}"
                if high[s] < v - SLACK:
                    return f"iteration {k + 1}: upper {high[s]!r} below exact {v!r} at state {s}"
    for s, label in res.strategy.items():
        if label != DELAY and label not in game.action_labels(s):
            return f"strategy names unknown action {label!r} at state {s}"
    return None


def _drop_action(game: StochasticGame, s: int, idx: int) -> StochasticGame:
    acts = list(game.actions)
    acts[s] = tuple(a for j, a in enumerate(acts[s]) if j != idx)
    return dataclasses.replace(game, actions=tuple(acts))


def _drop_state(game: StochasticGame, r: int) -> StochasticGame:
    remap = {s: (s if s < r else s - 1) for s in range(game.n_states) if s != r}
    actions = tuple(
        tuple(
            Action(a.label, tuple((remap[t], p) for t, p in a.transitions))
            for a in game.actions[s]
        )
        for s in range(game.n_states) if s != r
    )
    return StochasticGame(
        n_states=game.n_states - 1,
        owner=tuple(game.owner[s] for s in range(game.n_states) if s != r),
        actions=actions,
        targets=frozenset(remap[t] for t in game.targets if t != r),
    )


def _shrink_candidates(game: StochasticGame) -> Iterator[StochasticGame]:
    for s in range(game.n_states):
        if len(game.actions[s]) > 1:
            for idx in range(len(game.actions[s])):
                yield _drop_action(game, s, idx)
    if game.n_states > 1:
        referenced = {
            t
            for s in range(game.n_states)
            for a in game.actions[s]
            for t in a.successors()
            if t != s
        }
        for r in range(game.n_states):
            if r not in referenced:
                yield _drop_state(game, r)


def shrink(game: StochasticGame, still_fails: Callable[[StochasticGame], bool],
           budget: int = 200) -> StochasticGame:
    """Greedy minimization: keep any candidate on which the failure persists."""
    current = game
    progress = True
    while progress and budget > 0:
        progress = False
        for cand in _shrink_candidates(current):
            budget -= 1
            if still_fails(cand):
                current = cand
                progress = True
                break
            if budget <= 0:
                break
    return current


def run_fuzz(count: int, seed: int, *, max_states: int = 8, eps: float = 1e-6,
             algorithms: Sequence[str] = ("svi", "bvi", "topo"),
             extra_models: Sequence[StochasticGame] = (),
             overrides: Mapping[str, dict] | None = None,
             sample_iters: int = 10,
             out_dir: str | Path | None = None) -> FuzzReport:
    """Generate `count` random games, check each with every algorithm.

    Games whose strategy space exceeds the oracle caps are skipped and
    counted. `extra_models` are checked before the generated stream (same
    checks); `overrides` passes extra keyword arguments to specific
    solvers, which is how the acceptance suite checks that a deliberately
    weakened solver is caught. Failing models and their shrunk versions
    are written to `out_dir` when given.
    """
    rng = random.Random(seed)
    report = FuzzReport()
    overrides = overrides or {}

    def handle(index: int, game: StochasticGame) -> None:
        try:
            exact = exact_value(game)
        except TooLarge:
            report.skipped += 1
            return
        values = [float(v) for v in exact.values]
        report.checked += 1
        for algo in algorithms:
            reason = check_model(game, algo, eps, values, sample_iters, overrides)
            if reason is None:
                continue

            def fails(candidate: StochasticGame) -> bool:
                try:
                    cvals = [float(v) for v in exact_value(candidate).values]
                except TooLarge:
                    return False
                return check_model(candidate, algo, eps, cvals, sample_iters, overrides) is not None

            small = shrink(game, fails)
            ce = Counterexample(
                index=index,
                algorithm=algo,
                reason=reason,
                model_text=serialize_model(game),
                shrunk_text=serialize_model(small),
            )
            report.failures.append(ce)
            if out_dir is not None:
                root = Path(out_dir)
                root.mkdir(parents=True, exist_ok=True)
                full = root / f"fail_{index:04d}_{algo}.ssg"
                tiny = root / f"fail_{index:04d}_{algo}_shrunk.ssg"
                full.write_text(ce.model_text)
                tiny.write_text(ce.shrunk_text)
                report.written += [str(full), str(tiny)]

    for i, game in enumerate(extra_models):
        handle(-1 - i, game)
    for i in range(count):
        params = GenParams(
            n_states=rng.randint(2, max_states),
            max_actions_per_state=rng.randint(1, 3),
            max_branching=rng.randint(1, 3),
            target_fraction=rng.choice([0.1, 0.2, 0.4]),
            min_player_fraction=rng.choice([0.3, 0.5, 0.7]),
            ec_bias=rng.choice([0.0, 0.3, 0.7, 1.0]),
            seed=rng.randrange(2**31),
        )
        handle(i, generate_random(params))
    return report
