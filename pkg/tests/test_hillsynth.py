import numpy as np
import pytest
from scipy import stats

from dataview import hillsynth, netcore
from dataview.hillsynth import (
    Binary,
    Categorical,
    Continuous,
    Failure,
    HillConfig,
    domains_from_data,
    randomize,
    synthesize_dataset,
    synthesize_record,
)
from dataview.oracle import InProcessOracle, top_class


class ConstantOracle:
    """Always fully confident in one class."""

    def __init__(self, class_index, class_count, feature_count):
        self.class_count = class_count
        self.feature_count = feature_count
        self.query_count = 0
        self._probs = np.zeros(class_count)
        self._probs[class_index] = 1.0

    def classify(self, record):
        self.query_count += 1
        return self._probs


class CappedOracle:
    """Probability for class 0 never exceeds a cap."""

    def __init__(self, cap=0.6):
        self.class_count = 2
        self.feature_count = 3
        self.query_count = 0
        self.cap = cap

    def classify(self, record):
        self.query_count += 1
        p = self.cap * 1.0 / (1.0 + np.exp(-record[0]))
        return np.array([p, 1.0 - p])


def linear_logit_oracle(seed=0):
    rng = np.random.default_rng(seed)
    net = netcore.make_mlp([2, 2], ["softmax"], rng)
    net.layers[0].weights *= 8  # sharp boundary, confident regions exist
    return InProcessOracle(net)


class TestDomains:
    def test_continuous_validation(self):
        with pytest.raises(ValueError):
            Continuous(1.0, 1.0)

    def test_categorical_validation(self):
        with pytest.raises(ValueError):
            Categorical(())

    def test_inferred_from_data(self):
        data = np.array([[0.0, 1.5, 1.0], [1.0, -0.5, 0.0], [0.0, 2.5, 1.0]])
        doms = domains_from_data(data)
        assert isinstance(doms[0], Binary)
        assert isinstance(doms[1], Continuous)
        assert (doms[1].min, doms[1].max) == (-0.5, 2.5)
        assert isinstance(doms[2], Binary)


class TestRandomize:
    def test_k_equals_feature_count_resamples_all(self):
        domains = [Categorical((5.0,)), Categorical((6.0,)), Categorical((7.0,))]
        rng = np.random.default_rng(0)
        out = randomize(np.zeros(3), 3, domains, rng)
        assert np.array_equal(out, [5.0, 6.0, 7.0])

    def test_k_one_changes_exactly_one_index(self):
        domains = [Continuous(-1, 1)] * 3
        rng = np.random.default_rng(1)
        base = np.array([0.1, 0.2, 0.3])
        for _ in range(50):
            out = randomize(base, 1, domains, rng)
            assert np.sum(out != base) <= 1  # continuous resample differs a.s.
            assert np.sum(out == base) >= 2

    def test_k_out_of_range(self):
        with pytest.raises(ValueError):
            randomize(np.zeros(3), 4, [Continuous(-1, 1)] * 3, np.random.default_rng(0))
        with pytest.raises(ValueError):
            randomize(np.zeros(3), 0, [Continuous(-1, 1)] * 3, np.random.default_rng(0))

    def test_selected_indices_uniform_chi_squared(self):
        # count-based oracle: chi-square over which single index was resampled
        domains = [Categorical((1.0,)), Categorical((2.0,)), Categorical((3.0,)),
                   Categorical((4.0,))]
        rng = np.random.default_rng(2)
        base = np.zeros(4)
        counts = np.zeros(4)
        n = 10000
        for _ in range(n):
            out = randomize(base, 1, domains, rng)
            counts[np.nonzero(out != base)[0][0]] += 1
        chi2 = float(np.sum((counts - n / 4) ** 2 / (n / 4)))
        assert chi2 < stats.chi2.ppf(0.999, df=3)


class TestSynthesizeRecord:
    def test_constant_oracle_first_try(self):
        oracle = ConstantOracle(1, 3, 4)
        cfg = HillConfig(rng_seed=0)
        result = synthesize_record(
            oracle, 1, cfg, hillsynth.default_domains(4), np.random.default_rng(0)
        )
        record, conf, queries = result
        assert queries == 1 and conf == 1.0
        assert oracle.query_count == 1

    def test_unreachable_confidence_fails_with_best(self):
        oracle = CappedOracle(cap=0.6)
        cfg = HillConfig(query_budget=500, restarts=5, rng_seed=0)
        result = synthesize_record(
            oracle, 0, cfg, hillsynth.default_domains(3), np.random.default_rng(0)
        )
        assert isinstance(result, Failure)
        assert result.best_confidence < 0.7
        assert result.best_confidence == pytest.approx(0.6 / (1 + np.exp(-1)), abs=0.05)

    def test_replayed_record_meets_threshold(self):
        oracle = linear_logit_oracle()
        cfg = HillConfig(rng_seed=3)
        domains = hillsynth.default_domains(2)
        for c in range(2):
            record, conf, _ = synthesize_record(
                oracle, c, cfg, domains, np.random.default_rng([3, c])
            )
            fresh = InProcessOracle(oracle.net)  # fresh connection replay
            cls, p = top_class(fresh.classify(record))
            assert cls == c and p >= 0.7
            assert p == pytest.approx(conf)

    def test_class_out_of_range(self):
        oracle = ConstantOracle(0, 2, 2)
        with pytest.raises(ValueError):
            synthesize_record(
                oracle, 5, HillConfig(), hillsynth.default_domains(2),
                np.random.default_rng(0),
            )


class TestSynthesizeDataset:
    def test_zero_per_class_empty(self):
        oracle = ConstantOracle(0, 2, 3)
        report = synthesize_dataset(
            oracle, [0, 1], 0, HillConfig(), hillsynth.default_domains(3)
        )
        assert len(report.labels) == 0 and report.queries == 0

    def test_all_records_pass_posthoc_recheck(self):
        oracle = linear_logit_oracle(seed=5)
        cfg = HillConfig(rng_seed=1)
        report = synthesize_dataset(
            oracle, [0, 1], 100, cfg, hillsynth.default_domains(2)
        )
        assert len(report.labels) == 200
        fresh = InProcessOracle(oracle.net)
        for record, label in zip(report.records, report.labels):
            cls, p = top_class(fresh.classify(record))
            assert cls == label and p >= cfg.conf_min

    def test_query_accounting(self):
        oracle = linear_logit_oracle(seed=6)
        before = oracle.query_count
        report = synthesize_dataset(
            oracle, [0, 1], 50, HillConfig(rng_seed=2), hillsynth.default_domains(2)
        )
        assert oracle.query_count - before == report.queries

    def test_deterministic_output(self):
        def once():
            oracle = linear_logit_oracle(seed=7)
            return synthesize_dataset(
                oracle, [0, 1], 30, HillConfig(rng_seed=9),
                hillsynth.default_domains(2),
            ).to_csv()

        assert once() == once()

    def test_impossible_class_reported_others_returned(self):
        oracle = CappedOracle(cap=0.6)
        cfg = HillConfig(query_budget=200, restarts=3, rng_seed=0)
        report = synthesize_dataset(
            oracle, [0, 1], 5, cfg, hillsynth.default_domains(3)
        )
        assert report.per_class_counts[1] == 5
        assert report.per_class_counts[0] == 0
        assert len(report.failures) == 5
        assert all(f.class_index == 0 for f in report.failures)

    def test_csv_round_trip(self):
        oracle = linear_logit_oracle(seed=8)
        report = synthesize_dataset(
            oracle, [0, 1], 10, HillConfig(rng_seed=4), hillsynth.default_domains(2)
        )
        text = report.to_csv()
        assert text.splitlines()[0] == "f0,f1,label,confidence"
        records, labels, confs = hillsynth.load_synth_csv(text)
        assert np.array_equal(records, report.records)
        assert np.array_equal(labels, report.labels)
        assert np.array_equal(confs, report.confidences)


class TestKSchedule:
    def test_k_never_increases_within_attempt(self):
        ks = []

        class SpyOracle(CappedOracle):
            pass

        base_randomize = hillsynth.randomize

        def spy_randomize(record, k, domains, rng):
            ks.append(k)
            return base_randomize(record, k, domains, rng)

        oracle = SpyOracle(cap=0.6)
        cfg = HillConfig(query_budget=300, restarts=1, rng_seed=0)
        try:
            hillsynth.randomize = spy_randomize
            synthesize_record(
                oracle, 0, cfg, hillsynth.default_domains(3), np.random.default_rng(0)
            )
        finally:
            hillsynth.randomize = base_randomize
        assert ks == sorted(ks, reverse=True)
