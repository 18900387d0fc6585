"""Tsetlin automaton primitives and a minimal two-class Tsetlin machine.

The machine is deliberately small: clauses are plain conjunctions over the
input bits and their negations, selected by saturating two-action automata
and trained with the classic Type I / Type II feedback scheme. It is sized
for desk-scale experiments (XOR and similar), not for large datasets.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

DEFAULT_N_HALF = 150


class Feedback(enum.Enum):
    REWARD = "reward"
    PENALTY = "penalty"


class Action(enum.Enum):
    EXCLUDE = 0
    INCLUDE = 1


class TsetlinAutomaton:
    """Two-action automaton over saturating states 1..2*n_half.

    States 1..n_half select Exclude, states n_half+1..2*n_half select
    Include. Reward pushes the state deeper into the current action's half,
    penalty pushes it toward (and across) the midpoint. Transitions saturate
    at 1 and 2*n_half.
    """

    __slots__ = ("n_half", "state")

    def __init__(self, n_half: int = DEFAULT_N_HALF, state: int | None = None):
        if n_half < 1:
            raise ValueError("n_half must be >= 1")
        self.n_half = n_half
        self.state = n_half if state is None else state
        if not 1 <= self.state <= 2 * n_half:
            raise ValueError(f"state {self.state} outside [1, {2 * n_half}]")

    @property
    def action(self) -> Action:
        return Action.INCLUDE if self.state > self.n_half else Action.EXCLUDE

    def toward_include(self) -> None:
        if self.state < 2 * self.n_half:
            self.state += 1

    def toward_exclude(self) -> None:
        if self.state > 1:
            self.state -= 1

    def step(self, feedback: Feedback) -> None:
        """Apply one reward/penalty transition relative to the current action."""
        deeper_is_include = self.action is Action.INCLUDE
        if feedback is Feedback.REWARD:
            self.toward_include() if deeper_is_include else self.toward_exclude()
        elif feedback is Feedback.PENALTY:
            self.toward_exclude() if deeper_is_include else self.toward_include()
        else:
            raise ValueError(f"unknown feedback {feedback!r}")

    def __repr__(self) -> str:
        return f"TsetlinAutomaton(n_half={self.n_half}, state={self.state})"


@dataclass(frozen=True)
class TransitionEvent:
    """One recorded automaton state change during training."""

    ta_index: int
    old_state: int
    new_state: int
    sample_index: int


class Clause:
    """Conjunction of the literals whose automata currently vote Include.

    A clause carries a polarity: +1 clauses vote for class 1, -1 clauses vote
    against it. A clause with no included literal outputs 1 during training
    (so learning can bootstrap) and 0 during inference.
    """

    __slots__ = ("polarity", "automata")

    def __init__(self, polarity: int, automata: list[TsetlinAutomaton]):
        if polarity not in (1, -1):
            raise ValueError("polarity must be +1 or -1")
        self.polarity = polarity
        self.automata = automata

    def included(self) -> list[int]:
        return [k for k, ta in enumerate(self.automata) if ta.action is Action.INCLUDE]

    def evaluate(self, literals: tuple[int, ...], train: bool) -> int:
        if len(literals) != len(self.automata):
            raise ValueError(
                f"literal count {len(literals)} != automata count {len(self.automata)}"
            )
        empty = True
        for lit, ta in zip(literals, self.automata):
            if ta.action is Action.INCLUDE:
                empty = False
                if not lit:
                    return 0
        if empty:
            return 1 if train else 0
        return 1


class TsetlinMachine:
    """Single-output Tsetlin machine with equal counts of +/- polarity clauses.

    All randomness is drawn from an owned generator, so a fixed seed plus a
    fixed dataset yields a bit-identical transition stream. Literal layout is
    blocked: literal k is input bit k for k < n_features, and the negation of
    bit k - n_features otherwise.
    """

    def __init__(
        self,
        n_features: int = 2,
        n_clauses: int = 10,
        threshold_t: int = 3,
        specificity_s: float = 3.9,
        n_half: int = DEFAULT_N_HALF,
        rng: np.random.Generator | int | None = None,
    ):
        if n_clauses < 2 or n_clauses % 2 != 0:
            raise ValueError("n_clauses must be even and >= 2")
        if threshold_t < 1:
            raise ValueError("threshold_t must be >= 1")
        if specificity_s <= 1.0:
            raise ValueError("specificity_s must be > 1")
        self.n_features = n_features
        self.n_literals = 2 * n_features
        self.threshold_t = threshold_t
        self.specificity_s = specificity_s
        self.n_half = n_half
        self.rng = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
        self.clauses = [
            Clause(
                polarity=1 if j < n_clauses // 2 else -1,
                automata=[TsetlinAutomaton(n_half) for _ in range(self.n_literals)],
            )
            for j in range(n_clauses)
        ]
        self._flat = [ta for clause in self.clauses for ta in clause.automata]

    @property
    def automata(self) -> list[TsetlinAutomaton]:
        """Flat automaton list; index = clause_index * n_literals + literal_index."""
        return self._flat

    def literals(self, x) -> tuple[int, ...]:
        if len(x) != self.n_features:
            raise ValueError(f"input length {len(x)} != n_features {self.n_features}")
        return tuple(int(b) for b in x) + tuple(1 - int(b) for b in x)

    def class_sum(self, literals: tuple[int, ...], train: bool) -> int:
        return sum(c.polarity * c.evaluate(literals, train) for c in self.clauses)

    def infer(self, x) -> int:
        """Predict the class for one input; a zero class sum resolves to 1."""
        return 1 if self.class_sum(self.literals(x), train=False) >= 0 else 0

    def train_step(self, x, label: int, sample_index: int = 0) -> list[TransitionEvent]:
        """Run one online update and report every automaton that moved."""
        lits = self.literals(x)
        outputs = [c.evaluate(lits, train=True) for c in self.clauses]
        v = sum(c.polarity * o for c, o in zip(self.clauses, outputs))
        t = self.threshold_t
        v_clamped = max(-t, min(t, v))
        p_update = (t - v_clamped) / (2 * t) if label == 1 else (t + v_clamped) / (2 * t)

        old_states = [ta.state for ta in self._flat]
        for clause, output in zip(self.clauses, outputs):
            if self.rng.random() >= p_update:
                continue
            if (clause.polarity == 1) == (label == 1):
                self._type_i(clause, lits, output)
            else:
                self._type_ii(clause, lits, output)

        return [
            TransitionEvent(i, old, ta.state, sample_index)
            for i, (old, ta) in enumerate(zip(old_states, self._flat))
            if ta.state != old
        ]

    def _type_i(self, clause: Clause, lits: tuple[int, ...], output: int) -> None:
        # Reinforce matching literals of a firing clause, erode the rest.
        s = self.specificity_s
        for lit, ta in zip(lits, clause.automata):
            if output == 1 and lit == 1:
                if self.rng.random() < (s - 1.0) / s:
                    ta.toward_include()
            else:
                if self.rng.random() < 1.0 / s:
                    ta.toward_exclude()

    def _type_ii(self, clause: Clause, lits: tuple[int, ...], output: int) -> None:
        # Turn off a wrongly firing clause by introducing a contradicting literal.
        if output == 0:
            return
        for lit, ta in zip(lits, clause.automata):
            if lit == 0 and ta.action is Action.EXCLUDE:
                ta.toward_include()

    def fit(self, dataset, start_index: int = 0) -> list[TransitionEvent]:
        """Train over (input, label) pairs; returns the full transition stream."""
        events: list[TransitionEvent] = []
        for i, (x, y) in enumerate(dataset, start=start_index):
            events.extend(self.train_step(x, y, sample_index=i))
        return events

    def accuracy(self, dataset) -> float:
        if not dataset:
            raise ValueError("dataset must be non-empty")
        return sum(self.infer(x) == y for x, y in dataset) / len(dataset)


XOR_POINTS = [((0, 0), 0), ((0, 1), 1), ((1, 0), 1), ((1, 1), 0)]


def xor_dataset(
    n_samples: int, rng: np.random.Generator | int | None = None
) -> list[tuple[tuple[int, int], int]]:
    """Noise-free XOR samples with uniformly drawn 2-bit inputs."""
    if n_samples <= 0:
        raise ValueError("n_samples must be positive")
    gen = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
    bits = gen.integers(0, 2, size=(n_samples, 2))
    return [((int(a), int(b)), int(a ^ b)) for a, b in bits]
