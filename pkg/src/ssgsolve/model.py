"""Game model: data types, text format, normalization, partition, generation.

A stochastic game here is a finite turn-based two-player game. Every state
belongs to either the Maximizer or the Minimizer; the owner picks one of the
state's actions and the successor is then drawn from that action's
distribution. The objective is reachability: the Maximizer tries to reach a
target state, the Minimizer tries to avoid that. A game with a single owner
is an MDP, a game with one action everywhere is a Markov chain.

Probabilities are kept as exact `Fraction`s on the model; solvers convert to
floats internally, the exact oracle keeps the rationals.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

MAX = "max"
MIN = "min"

#: Header expected on the first content line of a model file.
FORMAT_HEADER = "ssg 1"

#: Action label used for self-loops installed by `normalize`.
LOOP_LABEL = "loop"

PROB_SUM_TOL = 1e-9


class ModelError(ValueError):
    """Base class for everything raised while reading or validating a model."""


class ParseError(ModelError):
    """Structural problem in the model text (bad syntax, bad references)."""


class ValidationError(ModelError):
    """Well-formed text with semantically invalid content (bad probabilities)."""


class MissingHeader(ParseError):
    def __init__(self) -> None:
        super().__init__(f"expected header line {FORMAT_HEADER!r}")


class MalformedLine(ParseError):
    def __init__(self, line_no: int, text: str, why: str = "") -> None:
        self.line_no = line_no
        detail = f": {why}" if why else ""
        super().__init__(f"line {line_no}: cannot parse {text!r}{detail}")


class UnknownState(ParseError):
    def __init__(self, line_no: int, state: int) -> None:
        self.line_no = line_no
        self.state = state
        super().__init__(f"line {line_no}: state {state} is out of range")


class DuplicateActionLabel(ParseError):
    def __init__(self, line_no: int, state: int, label: str) -> None:
        self.line_no = line_no
        self.state = state
        self.label = label
        super().__init__(f"line {line_no}: state {state} already has an action {label!r}")


class ProbabilitySum(ValidationError):
    def __init__(self, state: int, label: str, total: Fraction) -> None:
        self.state = state
        self.label = label
        self.total = total
        super().__init__(
            f"action {label!r} of state {state} has probabilities summing to "
            f"{total} (= {float(total):.12g}), expected 1"
        )


class BadProbability(ValidationError):
    def __init__(self, line_no: int, value: Fraction) -> None:
        self.line_no = line_no
        self.value = value
        super().__init__(f"line {line_no}: probability {value} is not in (0, 1]")


@dataclass(frozen=True)
class Action:
    """A labelled action: a distribution over successor states.

    Transitions are (successor, probability) pairs with positive rational
    probabilities summing to 1 (within PROB_SUM_TOL for decimal input).
    """

    label: str
    transitions: tuple[tuple[int, Fraction], ...]

    def successors(self) -> tuple[int, ...]:
        return tuple(s for s, _ in self.transitions)


@dataclass(frozen=True)
class StochasticGame:
    """Immutable turn-based stochastic game with a reachability target set.

    States are 0..n_states-1. `owner[s]` is MAX or MIN, `actions[s]` is the
    ordered action tuple of state s (order is meaningful: it breaks ties),
    and `targets` is the set of goal states. Instances are safe to share
    across threads; solvers never mutate them.
    """

    n_states: int
    owner: tuple[str, ...]
    actions: tuple[tuple[Action, ...], ...]
    targets: frozenset[int]

    def validate(self) -> None:
        if self.n_states <= 0:
            raise ValidationError("a game needs at least one state")
        if len(self.owner) != self.n_states or len(self.actions) != self.n_states:
            raise ValidationError("owner/actions length does not match n_states")
        for s, tag in enumerate(self.owner):
            if tag not in (MAX, MIN):
                raise ValidationError(f"state {s} has unknown owner {tag!r}")
        for t in self.targets:
            if not 0 <= t < self.n_states:
                raise ValidationError(f"target {t} is out of range")
        for s, acts in enumerate(self.actions):
            seen = set()
            for act in acts:
                if act.label in seen:
                    raise ValidationError(f"state {s} repeats action label {act.label!r}")
                seen.add(act.label)
                if not act.transitions:
                    raise ProbabilitySum(s, act.label, Fraction(0))
                total = Fraction(0)
                for succ, p in act.transitions:
                    if not 0 <= succ < self.n_states:
                        raise ValidationError(f"state {s}, action {act.label!r}: successor {succ} out of range")
                    if not 0 < p <= 1:
                        raise ValidationError(f"state {s}, action {act.label!r}: probability {p} not in (0, 1]")
                    total += p
                if total != 1 and abs(float(total) - 1.0) > PROB_SUM_TOL:
                    raise ProbabilitySum(s, act.label, total)

    def action_labels(self, s: int) -> tuple[str, ...]:
        return tuple(a.label for a in self.actions[s])

    def action(self, s: int, label: str) -> Action:
        for a in self.actions[s]:
            if a.label == label:
                return a
        raise KeyError(f"state {s} has no action {label!r}")

    def is_normalized(self) -> bool:
        for s in range(self.n_states):
            if s in self.targets:
                acts = self.actions[s]
                if len(acts) != 1 or acts[0].transitions != ((s, Fraction(1)),):
                    return False
            elif not self.actions[s]:
                return False
        return True


@dataclass
class StatePartition:
    """The classic three-way split used by every solver.

    targets: the goal states (value 1); sinks: states with no path to a
    target under any resolution of choices (value 0); unknown: the rest.
    Solvers own their copy; EC analysis may move unknown states to sinks.
    """

    targets: set[int]
    sinks: set[int]
    unknown: set[int]

    def copy(self) -> "StatePartition":
        return StatePartition(set(self.targets), set(self.sinks), set(self.unknown))


@dataclass(frozen=True)
class GenParams:
    """Knobs for random model generation.

    ec_bias is the probability that a successor is drawn among already
    placed states (ids <= current), which creates back edges and therefore
    cycles and end components; 0 gives a mostly forward, often acyclic
    model, 1 wires everything backwards.
    """

    n_states: int
    max_actions_per_state: int = 2
    max_branching: int = 2
    target_fraction: float = 0.2
    min_player_fraction: float = 0.5
    ec_bias: float = 0.0
    seed: int = 0

    def validate(self) -> None:
        if self.n_states < 1 or self.max_actions_per_state < 1 or self.max_branching < 1:
            raise ValidationError("n_states, max_actions_per_state and max_branching must be >= 1")
        for name in ("target_fraction", "min_player_fraction", "ec_bias"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValidationError(f"{name} must be within [0, 1]")


def _parse_prob(token: str, line_no: int) -> Fraction:
    try:
        if "/" in token:
            num, den = token.split("/", 1)
            p = Fraction(int(num), int(den))
        else:
            p = Fraction(token)
    except (ValueError, ZeroDivisionError):
        raise MalformedLine(line_no, token, "not a probability") from None
    if not 0 < p <= 1:
        raise BadProbability(line_no, p)
    return p


def _parse_ids(parts: list[str], line_no: int, text: str, n_states: int) -> list[int]:
    if not parts:
        raise MalformedLine(line_no, text, "expected at least one state id")
    out = []
    for tok in parts:
        try:
            sid = int(tok)
        except ValueError:
            raise MalformedLine(line_no, text, f"{tok!r} is not a state id") from None
        if not 0 <= sid < n_states:
            raise UnknownState(line_no, sid)
        out.append(sid)
    return out


def parse_model(text: str) -> StochasticGame:
    """Parse the `ssg 1` text format into a game.

    Layout: the header, a `states N` line, then any number of `minplayer`,
    `target` and `action` sections. An `action <state> <label>` line is
    followed by one `<succ> <prob>` line per transition. `#` starts a
    comment. Probabilities are decimals or `n/d` fractions.
    """
    lines = text.splitlines()
    content: list[tuple[int, str]] = []
    for i, raw in enumerate(lines, start=1):
        stripped = raw.split("#", 1)[0].strip()
        if stripped:
            content.append((i, stripped))

    if not content or content[0][1] != FORMAT_HEADER:
        raise MissingHeader()
    content = content[1:]

    n_states: int | None = None
    min_states: set[int] = set()
    targets: set[int] = set()
    # per state: list of (label, transitions list, line_no)
    acts: dict[int, list[tuple[str, list[tuple[int, Fraction]]]]] = {}
    current: list[tuple[int, Fraction]] | None = None
    current_key: tuple[int, str] | None = None

    def close_action() -> None:
        nonlocal current, current_key
        if current_key is not None:
            state, label = current_key
            total = sum((p for _, p in current), Fraction(0))
            if total != 1 and abs(float(total) - 1.0) > PROB_SUM_TOL:
                raise ProbabilitySum(state, label, total)
        current = None
        current_key = None

    for line_no, text_line in content:
        parts = text_line.split()
        word = parts[0]
        if word == "states":
            if n_states is not None:
                raise MalformedLine(line_no, text_line, "repeated states line")
            if len(parts) != 2:
                raise MalformedLine(line_no, text_line, "expected 'states N'")
            try:
                n_states = int(parts[1])
            except ValueError:
                raise MalformedLine(line_no, text_line, "expected 'states N'") from None
            if n_states < 1:
                raise ValidationError(f"line {line_no}: need at least one state")
            continue
        if n_states is None:
            raise MalformedLine(line_no, text_line, "before the states line")
        if word == "minplayer":
            close_action()
            min_states.update(_parse_ids(parts[1:], line_no, text_line, n_states))
        elif word == "target":
            close_action()
            targets.update(_parse_ids(parts[1:], line_no, text_line, n_states))
        elif word == "action":
            close_action()
            if len(parts) != 3:
                raise MalformedLine(line_no, text_line, "expected 'action <state> <label>'")
            try:
                state = int(parts[1])
            except ValueError:
                raise MalformedLine(line_no, text_line, "bad state id") from None
            if not 0 <= state < n_states:
                raise UnknownState(line_no, state)
            label = parts[2]
            entry = acts.setdefault(state, [])
            if any(lbl == label for lbl, _ in entry):
                raise DuplicateActionLabel(line_no, state, label)
            current = []
            current_key = (state, label)
            entry.append((label, current))
        elif len(parts) == 2 and current is not None:
            try:
                succ = int(parts[0])
            except ValueError:
                raise MalformedLine(line_no, text_line, "bad successor id") from None
            if not 0 <= succ < n_states:
                raise UnknownState(line_no, succ)
            current.append((succ, _parse_prob(parts[1], line_no)))
        else:
            raise MalformedLine(line_no, text_line)
    close_action()

    if n_states is None:
        raise MissingHeader()

    owner = tuple(MIN if s in min_states else MAX for s in range(n_states))
    actions = tuple(
        tuple(Action(lbl, tuple(trans)) for lbl, trans in acts.get(s, []))
        for s in range(n_states)
    )
    game = StochasticGame(n_states, owner, actions, frozenset(targets))
    game.validate()
    return game


def _format_prob(p: Fraction) -> str:
    if p.denominator == 1:
        return str(p.numerator)
    return f"{p.numerator}/{p.denominator}"


def serialize_model(game: StochasticGame) -> str:
    """Render a game in the canonical text form; parse(serialize(g)) == g."""
    out = [FORMAT_HEADER, f"states {game.n_states}"]
    mins = sorted(s for s in range(game.n_states) if game.owner[s] == MIN)
    if mins:
        out.append("minplayer " + " ".join(map(str, mins)))
    if game.targets:
        out.append("target " + " ".join(map(str, sorted(game.targets))))
    for s in range(game.n_states):
        for act in game.actions[s]:
            out.append(f"action {s} {act.label}")
            for succ, p in act.transitions:
                out.append(f"{succ} {_format_prob(p)}")
    return "\n".join(out) + "\n"


def normalize(game: StochasticGame) -> StochasticGame:
    """Make targets absorbing and give actionless states a self-loop.

    Target states get a single self-loop action (their original actions are
    irrelevant once the goal is reached); non-target states without any
    action become sinks by self-looping. Idempotent; a game that is already
    in this shape is returned unchanged (same object).
    """
    if game.is_normalized():
        return game
    new_actions = []
    for s in range(game.n_states):
        acts = game.actions[s]
        loop = (Action(LOOP_LABEL, ((s, Fraction(1)),)),)
        if s in game.targets:
            if len(acts) == 1 and acts[0].transitions == ((s, Fraction(1)),):
                new_actions.append(acts)
            else:
                new_actions.append(loop)
        elif not acts:
            new_actions.append(loop)
        else:
            new_actions.append(acts)
    return StochasticGame(game.n_states, game.owner, tuple(new_actions), game.targets)


def partition_states(game: StochasticGame) -> StatePartition:
    """Split states into targets / sinks / unknown by graph reachability.

    A state is a sink when no sequence of choices can reach a target from
    it, regardless of who owns the states along the way. Found by a
    backward search from the targets over the edge relation of all actions.
    """
    preds: list[set[int]] = [set() for _ in range(game.n_states)]
    for s in range(game.n_states):
        for act in game.actions[s]:
            for succ, _ in act.transitions:
                preds[succ].add(s)
    can_reach = set(game.targets)
    frontier = list(game.targets)
    while frontier:
        t = frontier.pop()
        for p in preds[t]:
            if p not in can_reach:
                can_reach.add(p)
                frontier.append(p)
    targets = set(game.targets)
    sinks = {s for s in range(game.n_states) if s not in can_reach}
    unknown = {s for s in range(game.n_states) if s not in targets and s not in sinks}
    return StatePartition(targets, sinks, unknown)


def generate_random(params: GenParams) -> StochasticGame:
    """Generate a random game, deterministically from params.seed.

    Probabilities are small rationals (integer weights over their sum), so
    generated models are exact-oracle friendly. With target_fraction > 0 at
    least one target is produced. The result passes validate() but is not
    normalized.
    """
    params.validate()
    rng = random.Random(params.seed)
    n = params.n_states
    owner = tuple(MIN if rng.random() < params.min_player_fraction else MAX for _ in range(n))
    target_list = [s for s in range(n) if rng.random() < params.target_fraction]
    if params.target_fraction > 0 and not target_list:
        target_list = [rng.randrange(n)]
    targets = frozenset(target_list)

    actions: list[tuple[Action, ...]] = []
    for s in range(n):
        if s in targets:
            actions.append((Action(LOOP_LABEL, ((s, Fraction(1)),)),))
            continue
        n_acts = rng.randint(1, params.max_actions_per_state)
        acts = []
        for i in range(n_acts):
            width = rng.randint(1, params.max_branching)
            succs: set[int] = set()
            for _ in range(width):
                if rng.random() < params.ec_bias:
                    succs.add(rng.randint(0, s))
                else:
                    succs.add(rng.randrange(n))
            weights = [rng.randint(1, 6) for _ in succs]
            total = sum(weights)
            trans = tuple(
                (succ, Fraction(w, total)) for succ, w in zip(sorted(succs), weights)
            )
            acts.append(Action(f"a{i}", trans))
        actions.append(tuple(acts))

    game = StochasticGame(n, owner, tuple(actions), targets)
    game.validate()
    return game
