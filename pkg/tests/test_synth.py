import csv

import numpy as np
import pytest

from homsense.assign import recover_selection
from homsense.errors import PreconditionError
from homsense.synth import (
    CSV_FIELDS,
    gen_instance,
    relative_error,
    run_benchmark,
    summarize,
)


class TestGenInstance:
    def test_unshuffled_full_observation(self):
        inst = gen_instance(3, 8, 8, 0.0, 0.0, seed=1)
        assert inst.s_star.idx.tolist() == list(range(8))
        assert np.allclose(inst.y, inst.a_mat @ inst.x_star)

    def test_full_shuffle_is_consistent_subvector(self):
        inst = gen_instance(2, 10, 6, 1.0, 0.0, seed=2)
        cost = recover_selection(inst.y, inst.a_mat @ inst.x_star).cost
        assert cost == pytest.approx(0.0, abs=1e-15)

    def test_shuffle_ratio_counts_moved_positions(self):
        import math

        for seed in range(30):
            for ratio in (0.25, 0.5, 1.0):
                inst = gen_instance(2, 12, 8, ratio, 0.0, seed=seed)
                base = np.sort(inst.s_star.idx)
                moved = int((inst.s_star.idx != base).sum())
                expected = math.ceil(ratio * 8)
                assert moved == expected

    def test_zero_ratio_is_order_preserving(self):
        inst = gen_instance(2, 12, 7, 0.0, 0.0, seed=3)
        assert inst.s_star.is_order_preserving

    def test_deterministic(self):
        a = gen_instance(3, 12, 9, 0.5, 0.01, seed=7)
        b = gen_instance(3, 12, 9, 0.5, 0.01, seed=7)
        assert np.array_equal(a.a_mat, b.a_mat)
        assert np.array_equal(a.y, b.y)
        assert np.array_equal(a.s_star.idx, b.s_star.idx)
        assert a.digest() == b.digest()

    def test_noise_retained_for_ground_truth_checks(self):
        inst = gen_instance(2, 9, 6, 1.0, 0.3, seed=4)
        clean = inst.y - inst.noise
        assert recover_selection(clean, inst.a_mat @ inst.x_star).cost == pytest.approx(
            0.0, abs=1e-15
        )

    def test_parameter_validation(self):
        with pytest.raises(PreconditionError):
            gen_instance(3, 8, 2, 0.0, 0.0, seed=0)  # k < n
        with pytest.raises(PreconditionError):
            gen_instance(2, 4, 5, 0.0, 0.0, seed=0)  # k > m
        with pytest.raises(PreconditionError):
            gen_instance(2, 6, 4, 1.5, 0.0, seed=0)
        with pytest.raises(PreconditionError):
            gen_instance(2, 6, 4, 0.0, -1.0, seed=0)


class TestRelativeError:
    def test_values(self):
        x = np.array([3.0, 4.0])
        assert relative_error(x, x) == 0.0
        assert relative_error(2 * x, x) == pytest.approx(1.0)
        delta = np.array([0.0, 0.5])
        assert relative_error(x + delta, x) == pytest.approx(0.1)

    def test_zero_truth_rejected(self):
        with pytest.raises(PreconditionError):
            relative_error(np.ones(2), np.zeros(2))


class TestRunBenchmark:
    def test_single_cell_deterministic(self, tmp_path):
        grid = {
            "methods": ["altmin-op"],
            "cells": [{"n": 2, "m": 6, "k": 5, "shuffle_ratio": 1.0, "sigma": 0.0}],
            "trials": 3,
        }
        recs1, _ = run_benchmark(grid, seed0=10)
        recs2, _ = run_benchmark(grid, seed0=10)
        assert len(recs1) == 3
        assert [r.relative_error for r in recs1] == [r.relative_error for r in recs2]

    def test_precondition_routing_skips_full_perm_methods(self):
        grid = {
            "methods": ["altmin-sort", "altmin-op"],
            "cells": [
                {"n": 2, "m": 6, "k": 6, "shuffle_ratio": 1.0, "sigma": 0.0},
                {"n": 2, "m": 8, "k": 6, "shuffle_ratio": 1.0, "sigma": 0.0},
            ],
            "trials": 2,
        }
        recs, _ = run_benchmark(grid, seed0=0)
        full = [r for r in recs if r.m == 6]
        sub = [r for r in recs if r.m == 8]
        assert {r.method for r in full} == {"altmin-sort", "altmin-op"}
        assert {r.method for r in sub} == {"altmin-op"}

    def test_cross_method_pairing_by_digest(self):
        grid = {
            "methods": ["altmin-sort", "altmin-op"],
            "cells": [{"n": 2, "m": 6, "k": 6, "shuffle_ratio": 1.0, "sigma": 0.01}],
            "trials": 2,
        }
        recs, _ = run_benchmark(grid, seed0=3)
        by_seed = {}
        for r in recs:
            by_seed.setdefault(r.seed, set()).add(r.instance_digest)
        for digests in by_seed.values():
            assert len(digests) == 1

    def test_csv_schema(self, tmp_path):
        out = tmp_path / "records.csv"
        grid = {
            "methods": ["altmin-op"],
            "cells": [{"n": 2, "m": 6, "k": 5, "shuffle_ratio": 1.0, "sigma": 0.0}],
            "trials": 1,
        }
        run_benchmark(grid, seed0=0, out_csv=out)
        with open(out) as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == CSV_FIELDS
        assert len(rows) == 2
        assert (tmp_path / "records.csv.summary.csv").exists()

    def test_unknown_method_rejected(self):
        grid = {
            "methods": ["does-not-exist"],
            "cells": [{"n": 2, "m": 6, "k": 5, "shuffle_ratio": 1.0, "sigma": 0.0}],
            "trials": 1,
        }
        with pytest.raises(PreconditionError, match="unknown method"):
            run_benchmark(grid, seed0=0)

    def test_summary_quartiles(self):
        grid = {
            "methods": ["altmin-op"],
            "cells": [{"n": 2, "m": 6, "k": 5, "shuffle_ratio": 1.0, "sigma": 0.0}],
            "trials": 5,
        }
        recs, summary = run_benchmark(grid, seed0=1)
        errs = sorted(r.relative_error for r in recs)
        assert summary[0]["median"] == pytest.approx(np.median(errs))
        assert summary[0]["q1"] <= summary[0]["median"] <= summary[0]["q3"]
