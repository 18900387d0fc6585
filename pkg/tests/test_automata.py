import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from yflash_tm.automata import (
    Action,
    Clause,
    Feedback,
    TsetlinAutomaton,
    TsetlinMachine,
    XOR_POINTS,
    xor_dataset,
)


class TestAutomatonStep:
    def test_reward_deepens_exclude_side(self):
        ta = TsetlinAutomaton(n_half=150, state=150)
        ta.step(Feedback.REWARD)
        assert ta.state == 149

    def test_penalty_crosses_boundary(self):
        ta = TsetlinAutomaton(n_half=150, state=150)
        ta.step(Feedback.PENALTY)
        assert ta.state == 151
        assert ta.action is Action.INCLUDE

    def test_saturation_at_lower_boundary(self):
        ta = TsetlinAutomaton(n_half=150, state=1)
        ta.step(Feedback.REWARD)
        assert ta.state == 1

    def test_saturation_at_upper_boundary(self):
        ta = TsetlinAutomaton(n_half=150, state=300)
        ta.step(Feedback.REWARD)
        assert ta.state == 300

    def test_action_boundary(self):
        assert TsetlinAutomaton(n_half=150, state=150).action is Action.EXCLUDE
        assert TsetlinAutomaton(n_half=150, state=151).action is Action.INCLUDE

    def test_state_validation(self):
        with pytest.raises(ValueError):
            TsetlinAutomaton(n_half=150, state=0)
        with pytest.raises(ValueError):
            TsetlinAutomaton(n_half=150, state=301)

    @given(
        n_half=st.integers(min_value=1, max_value=50),
        feedbacks=st.lists(st.sampled_from([Feedback.REWARD, Feedback.PENALTY]), max_size=500),
    )
    def test_state_bounds_and_step_size(self, n_half, feedbacks):
        ta = TsetlinAutomaton(n_half=n_half)
        for fb in feedbacks:
            before = ta.state
            ta.step(fb)
            assert 1 <= ta.state <= 2 * n_half
            assert abs(ta.state - before) <= 1


def _clause(states, polarity=1, n_half=150):
    return Clause(polarity, [TsetlinAutomaton(n_half, s) for s in states])


class TestClause:
    def test_all_included_literals_true(self):
        # x0 and not-x1 included; input (1, 0) -> literals (1, 0, 0, 1)
        clause = _clause([200, 100, 100, 200])
        assert clause.evaluate((1, 0, 0, 1), train=False) == 1

    def test_included_literal_false(self):
        clause = _clause([200, 100, 100, 100])  # only x0 included
        assert clause.evaluate((0, 1, 1, 0), train=False) == 0

    def test_empty_clause_convention(self):
        clause = _clause([100, 100, 100, 100])
        assert clause.evaluate((1, 0, 0, 1), train=True) == 1
        assert clause.evaluate((1, 0, 0, 1), train=False) == 0

    def test_length_mismatch_rejected(self):
        clause = _clause([200, 100])
        with pytest.raises(ValueError):
            clause.evaluate((1, 0, 0), train=False)


class TestInference:
    def test_untrained_machine_ties_to_one(self):
        tm = TsetlinMachine(rng=0)
        assert all(tm.infer(x) == 1 for x, _ in XOR_POINTS)

    def test_single_positive_clause(self):
        tm = TsetlinMachine(n_clauses=2, rng=0)
        # clause 0 (+1) includes x0 and not-x1
        tm.clauses[0].automata[0].state = 200
        tm.clauses[0].automata[3].state = 200
        assert tm.infer((1, 0)) == 1
        assert tm.infer((0, 1)) == 1  # clause off, sum 0, tie -> 1

    def test_negative_vote_flips(self):
        tm = TsetlinMachine(n_clauses=2, rng=0)
        tm.clauses[1].automata[0].state = 200  # clause 1 (-1) includes x0
        assert tm.infer((1, 1)) == 0


class TestTraining:
    def test_events_have_unit_step(self):
        tm = TsetlinMachine(rng=1)
        for i, (x, y) in enumerate(xor_dataset(200, rng=1)):
            for ev in tm.train_step(x, y, sample_index=i):
                assert abs(ev.new_state - ev.old_state) == 1
                assert ev.sample_index == i

    def test_default_seed_learns_xor(self):
        ss = np.random.SeedSequence(25)
        tm_ss, data_ss, _ = ss.spawn(3)
        tm = TsetlinMachine(rng=np.random.default_rng(tm_ss))
        tm.fit(xor_dataset(5000, np.random.default_rng(data_ss)))
        assert tm.accuracy(XOR_POINTS) == 1.0
        assert tm.infer((0, 1)) == 1 and tm.infer((1, 0)) == 1
        assert tm.infer((0, 0)) == 0 and tm.infer((1, 1)) == 0

    def test_default_seed_includes_every_relevant_literal(self):
        # The two tracked positive clauses converge onto the two XOR minterms,
        # so each of the four literals is included by some automaton.
        ss = np.random.SeedSequence(25)
        tm_ss, data_ss, _ = ss.spawn(3)
        tm = TsetlinMachine(rng=np.random.default_rng(tm_ss))
        tm.fit(xor_dataset(5000, np.random.default_rng(data_ss)))
        included_in_tracked = sum(
            1 for ta in tm.automata[:8] if ta.action is Action.INCLUDE
        )
        assert included_in_tracked == 4
        positive = [c for c in tm.clauses if c.polarity == 1]
        included_literals = {k for c in positive for k in c.included()}
        assert included_literals == {0, 1, 2, 3}

    def test_determinism(self):
        def run():
            ss = np.random.SeedSequence(7)
            tm_ss, data_ss = ss.spawn(2)
            tm = TsetlinMachine(rng=np.random.default_rng(tm_ss))
            return tm.fit(xor_dataset(1000, np.random.default_rng(data_ss)))

        assert run() == run()

    def test_constructor_validation(self):
        with pytest.raises(ValueError):
            TsetlinMachine(n_clauses=3)
        with pytest.raises(ValueError):
            TsetlinMachine(threshold_t=0)
        with pytest.raises(ValueError):
            TsetlinMachine(specificity_s=1.0)


class TestXorDataset:
    def test_truth_table_labels(self):
        for (a, b), label in xor_dataset(500, rng=3):
            assert label == (a ^ b)
            assert a in (0, 1) and b in (0, 1)

    def test_sample_count(self):
        assert len(xor_dataset(5000, rng=0)) == 5000

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            xor_dataset(0, rng=0)

    @settings(max_examples=20)
    @given(seed=st.integers(min_value=0, max_value=2**31))
    def test_deterministic_per_seed(self, seed):
        assert xor_dataset(50, rng=seed) == xor_dataset(50, rng=seed)
