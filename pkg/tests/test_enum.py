import itertools

import numpy as np
import pytest

from homsense.assign import recover_selection
from homsense.enum_solver import solve_enum
from homsense.errors import PreconditionError
from homsense.synth import gen_instance, relative_error


def test_square_invertible_no_shuffle_zero_residual(rng):
    a = rng.normal(size=(3, 3))
    y = a @ rng.normal(size=3)
    r = solve_enum(a, y, seed=0)
    assert r.residual == pytest.approx(0.0, abs=1e-9)


def test_noiseless_recovery_sweep():
    # the pinned subvector's true source rows always appear among the
    # enumerated tuples, so noiseless recovery is certain
    wins = 0
    for seed in range(100):
        inst = gen_instance(2, 8, 6, 1.0, 0.0, seed=seed)
        r = solve_enum(inst.a_mat, inst.y, seed=seed)
        if relative_error(r.x_hat, inst.x_star) < 1e-9:
            wins += 1
    assert wins == 100


def test_returned_cost_is_minimum_over_candidates(rng):
    # independent re-scan of every well-conditioned tuple
    inst = gen_instance(2, 6, 5, 1.0, 0.1, seed=3)
    a, y = inst.a_mat, inst.y
    r = solve_enum(a, y, seed=7, refine=False)
    got = r.residual**2
    rng2 = np.random.default_rng(7)
    sub = np.sort(rng2.choice(y.size, size=2, replace=False))
    ybar = y[sub]
    for rows in itertools.permutations(range(a.shape[0]), 2):
        a_i = a[list(rows)]
        if np.linalg.cond(a_i) > 1e8:
            continue
        x = np.linalg.solve(a_i, ybar)
        assert got <= recover_selection(y, a @ x).cost + 1e-10


def test_deterministic_given_seed():
    inst = gen_instance(2, 8, 6, 1.0, 0.05, seed=4)
    r1 = solve_enum(inst.a_mat, inst.y, seed=9)
    r2 = solve_enum(inst.a_mat, inst.y, seed=9)
    assert np.array_equal(r1.x_hat, r2.x_hat)
    assert r1.residual == r2.residual


def test_refine_never_hurts():
    for seed in range(20):
        inst = gen_instance(2, 10, 8, 1.0, 0.05, seed=seed)
        raw = solve_enum(inst.a_mat, inst.y, seed=seed, refine=False)
        ref = solve_enum(inst.a_mat, inst.y, seed=seed, refine=True)
        assert ref.residual <= raw.residual + 1e-12


def test_restarts_accepted():
    inst = gen_instance(2, 8, 6, 1.0, 0.05, seed=5)
    r = solve_enum(inst.a_mat, inst.y, seed=5, restarts=3)
    assert np.isfinite(r.residual)


def test_all_tuples_skipped_is_an_error(rng):
    a = rng.normal(size=(5, 2))
    y = rng.normal(size=4)
    with pytest.raises(PreconditionError, match="condition-number"):
        solve_enum(a, y, seed=0, cond_max=1e-12)


def test_k_below_n_rejected(rng):
    with pytest.raises(PreconditionError):
        solve_enum(rng.normal(size=(5, 3)), rng.normal(size=2), seed=0)
