"""Estimator wrapper: sklearn parameter contract over the chain."""

import json

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from hardymono.context import Context
from hardymono.estimator import MonomialSubspaceApproximator
from hardymono import pipeline

SPEC = {"variant": "monomial", "exponents": [{"s": "1", "mult": 1}]}
TESTS = [{"label": "chi", "indicator": 0.25},
         {"label": "one", "terms": [{"re": "1", "s_re": "0", "logpow": 0}]}]


def test_get_params_and_clone():
    est = MonomialSubspaceApproximator(n_values=(1, 2), bits=128)
    params = est.get_params()
    assert params["n_values"] == (1, 2)
    assert params["bits"] == 128
    twin = clone(est)
    assert twin.get_params() == params


def test_fit_sets_attributes():
    est = MonomialSubspaceApproximator(n_values=(1,))
    assert est.fit(SPEC) is est
    assert est.n_values_ == [1]
    assert est.c_values_.shape == (1,)
    assert abs(est.c_values_[0] - 1.0) < 1e-9
    assert isinstance(est.report_, pipeline.ApproximationReport)
    ctx = Context.double()
    assert [(float(ctx.re(s)), m) for s, m in est.exponents_.entries] == \
        [(1.0, 1)]


def test_fit_accepts_json_text_and_int_n():
    est = MonomialSubspaceApproximator(n_values=2)
    est.fit(json.dumps(SPEC))
    assert est.n_values_ == [1, 2]
    assert est.c_values_.shape == (2,)


def test_transform_distance_matrix():
    est = MonomialSubspaceApproximator(n_values=(1, 2)).fit(SPEC)
    d = est.transform(TESTS)
    assert d.shape == (2, 2)
    assert np.all(d >= 0.0)
    # the constant 1 has dist^2 = 1 - |<1,x>|^2 / |x|^2 = 1/4 from span{x}
    assert abs(d[1, 0] - 0.5) < 1e-8


def test_transform_before_fit_raises():
    est = MonomialSubspaceApproximator()
    with pytest.raises(NotFittedError):
        est.transform(TESTS)


def test_score_is_negative_mean_distance():
    est = MonomialSubspaceApproximator(n_values=(1,)).fit(SPEC)
    d = est.transform(TESTS)
    assert abs(est.score(TESTS) + d[:, -1].mean()) < 1e-12


def test_set_params_roundtrip():
    est = MonomialSubspaceApproximator()
    est.set_params(n_values=(3,), bits=256, k_max=16)
    assert est.get_params()["n_values"] == (3,)
    assert est.get_params()["bits"] == 256
    assert est.get_params()["k_max"] == 16
