"""Conditional-independence tests against sampled data."""

import numpy as np
import pytest

from causalspec import citest, scm
from causalspec.citest import ci_test, fisher_z, g_test, validate_model
from causalspec.errors import CiTestError
from causalspec.implications import make_statement


def _data(**cols):
    n = len(next(iter(cols.values())))
    return scm.Dataset({k: np.asarray(v) for k, v in cols.items()}, n, 0)


def test_fisher_z_independent_not_rejected():
    rng = np.random.default_rng(1)
    data = _data(x=rng.normal(size=4000), y=rng.normal(size=4000))
    res = fisher_z(data, make_statement("x", "y"))
    assert not res.rejected
    assert res.p_value > 0.01
    assert res.method == "fisher_z"
    assert res.n == 4000


def test_fisher_z_dependent_rejected():
    rng = np.random.default_rng(2)
    x = rng.normal(size=2000)
    data = _data(x=x, y=x + 0.5 * rng.normal(size=2000))
    res = fisher_z(data, make_statement("x", "y"))
    assert res.rejected
    assert abs(res.statistic) > 10


def test_fisher_z_partial_blocks_mediator():
    rng = np.random.default_rng(3)
    x = rng.normal(size=5000)
    z = 1.5 * x + rng.normal(size=5000)
    y = -2.0 * z + rng.normal(size=5000)
    data = _data(x=x, z=z, y=y)
    assert fisher_z(data, make_statement("x", "y")).rejected
    assert not fisher_z(data, make_statement("x", "y", ["z"])).rejected


def test_fisher_z_calibration():
    """Rejection rate under the null stays near alpha."""
    rejections = 0
    reps = 300
    for seed in range(reps):
        rng = np.random.default_rng(10_000 + seed)
        z = rng.normal(size=400)
        x = 0.8 * z + rng.normal(size=400)
        y = -0.5 * z + rng.normal(size=400)
        res = fisher_z(_data(x=x, y=y, z=z), make_statement("x", "y", ["z"]), alpha=0.01)
        rejections += res.rejected
    assert rejections <= 12  # binomial(300, 0.01) tail allowance


def test_fisher_z_needs_enough_rows():
    data = _data(x=np.arange(4.0), y=np.arange(4.0), z=np.arange(4.0))
    with pytest.raises(CiTestError):
        fisher_z(data, make_statement("x", "y", ["z"]))


def test_fisher_z_rejects_constant_column():
    data = _data(x=np.zeros(100), y=np.arange(100.0))
    with pytest.raises(CiTestError):
        fisher_z(data, make_statement("x", "y"))


def test_missing_column_raises():
    data = _data(x=np.arange(10.0))
    with pytest.raises(CiTestError):
        fisher_z(data, make_statement("x", "nope"))


def test_g_test_marginal_dependence():
    rng = np.random.default_rng(4)
    z = rng.integers(0, 2, size=3000)
    flip_x = rng.random(3000) < 0.2
    flip_y = rng.random(3000) < 0.2
    x = np.where(flip_x, 1 - z, z)
    y = np.where(flip_y, 1 - z, z)
    data = _data(x=x, y=y, z=z)
    assert g_test(data, make_statement("x", "y")).rejected
    assert not g_test(data, make_statement("x", "y", ["z"])).rejected


def test_g_test_requires_categorical_pair():
    rng = np.random.default_rng(5)
    data = _data(x=rng.normal(size=100), y=rng.integers(0, 2, size=100))
    with pytest.raises(CiTestError):
        g_test(data, make_statement("x", "y"))


def test_g_test_bins_continuous_conditioner():
    rng = np.random.default_rng(6)
    z = rng.normal(size=4000)
    x = (z + 0.8 * rng.normal(size=4000) > 0).astype(np.int64)
    y = (z + 0.8 * rng.normal(size=4000) > 0).astype(np.int64)
    data = _data(x=x, y=y, z=z)
    assert g_test(data, make_statement("x", "y")).rejected
    # binned conditioning is approximate; alpha stays modest here
    res = g_test(data, make_statement("x", "y", ["z"]), alpha=1e-6)
    assert res.p_value > 1e-6


def test_is_categorical():
    assert citest.is_categorical(np.array([0, 1, 1, 0]))
    assert citest.is_categorical(np.array([2.0, 3.0, 2.0]))
    assert not citest.is_categorical(np.random.default_rng(0).normal(size=50))


def test_ci_test_dispatch():
    rng = np.random.default_rng(7)
    both = _data(
        x=rng.integers(0, 2, size=500),
        y=rng.integers(0, 2, size=500),
    )
    assert ci_test(both, make_statement("x", "y")).method == "g_test"
    mixed = _data(x=rng.normal(size=500), y=rng.integers(0, 2, size=500).astype(float))
    assert ci_test(mixed, make_statement("x", "y")).method == "fisher_z"
    forced = ci_test(both, make_statement("x", "y"), method="fisher_z")
    assert forced.method == "fisher_z"


def test_validate_model_motor_clean(motor_dag, motor_doc):
    data = scm.sample(scm.from_document(motor_doc), 10_000, seed=7)
    results = validate_model(motor_dag, data, alpha=0.01)
    assert [r.statement.render() for r in results] == [
        "Classification ⊥ T_E | {H_s, T_s, V_s}",
        "T_E ⊥ V_s",
    ]
    assert citest.violation_count(results) == 0


def test_validate_model_detects_broken_independence(motor_doc):
    """Coupling the environment to mechanical faults breaks the V_s check."""
    from causalspec.dsl import LogisticBinary
    from causalspec.graph import Dag

    spec = scm.from_document(motor_doc)
    dag = Dag(
        list(spec.dag.nodes),
        list(spec.dag.edges) + [("T_E", "MechFault")],
        observed=spec.dag.observed,
        roles=spec.dag.roles,
    )
    mechs = dict(spec.mechanisms)
    mechs["MechFault"] = LogisticBinary((("T_E", 0.5),), -1.4)
    mutated = scm.ScmSpec(dag, mechs)
    data = scm.sample(mutated, 10_000, seed=7)
    # judge the data against the original (now wrong) model
    results = validate_model(Dag.from_document(motor_doc), data, alpha=0.01)
    flagged = {r.statement.render() for r in results if r.rejected}
    assert "T_E ⊥ V_s" in flagged


def test_validate_model_scope(motor_dag, motor_doc):
    data = scm.sample(scm.from_document(motor_doc), 2000, seed=8)
    results = validate_model(motor_dag, data, scope=["T_E", "V_s", "H_s"], alpha=0.01)
    assert [r.statement.render() for r in results] == ["T_E ⊥ V_s"]


def test_result_render():
    rng = np.random.default_rng(9)
    data = _data(x=rng.normal(size=200), y=rng.normal(size=200))
    line = fisher_z(data, make_statement("x", "y")).render()
    assert "x ⊥ y" in line
    assert "p=" in line
