"""Estimator-style wrapper around the approximation pipeline.

The pipeline itself is functional (approximate() in, report out); this
module repackages it with the fit/transform calling convention so the
stage sweep drops into existing model-selection tooling.  The sample
axis is unusual: fit() takes one subspace description, not a matrix,
and transform() maps test functions to distance columns, one per
fitted stage.
"""

import json

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from .errors import DomainError
from .pipeline import (
    PipelineConfig,
    SubspaceSpec,
    TestFunction,
    approximate,
    convergence_diagnostics,
)


def _coerce_spec(x):
    if isinstance(x, SubspaceSpec):
        return x
    if isinstance(x, str):
        x = json.loads(x)
    if isinstance(x, dict):
        return SubspaceSpec.from_json(x)
    raise DomainError(
        "expected a SubspaceSpec, a spec JSON dict, or spec JSON text, "
        f"got {type(x).__name__}")


def _coerce_tests(items):
    tests = []
    for k, item in enumerate(items):
        if isinstance(item, TestFunction):
            tests.append(item)
            continue
        if isinstance(item, str):
            item = json.loads(item)
        if isinstance(item, dict):
            data = dict(item)
            data.setdefault("label", f"test_{k}")
            tests.append(TestFunction.from_json(data))
            continue
        raise DomainError(
            "expected a TestFunction, a JSON dict, or JSON text, "
            f"got {type(item).__name__}")
    return tests


class MonomialSubspaceApproximator(BaseEstimator, TransformerMixin):
    """Fit a ladder of finite monomial spaces to an invariant subspace.

    Parameters
    ----------
    n_values : int or sequence of int, default (1, 2, 3, 4)
        Stage sizes N to run.  An int n means range 1..n inclusive.
    bits : int or None, default None
        Working precision for every stage; None picks per-N defaults.
    k_max : int, default 32
        Search bound for the wandering index k0.
    max_escalations : int, default 2
        Precision escalations allowed per stage on ill-conditioning.
    tolerances : dict or None, default None
        Tolerance overrides forwarded to the numeric context.

    After fit: report_ holds the full per-stage record, c_values_ the
    scaling constants, exponents_ the final reduced exponent multiset,
    n_values_ the stages actually completed.
    """

    def __init__(self, n_values=(1, 2, 3, 4), bits=None, k_max=32,
                 max_escalations=2, tolerances=None):
        self.n_values = n_values
        self.bits = bits
        self.k_max = k_max
        self.max_escalations = max_escalations
        self.tolerances = tolerances

    def _n_list(self):
        if isinstance(self.n_values, (int, np.integer)):
            return list(range(1, int(self.n_values) + 1))
        return [int(n) for n in self.n_values]

    def fit(self, X, y=None):
        """Run the pipeline on one subspace description X."""
        spec = _coerce_spec(X)
        config = PipelineConfig(
            bits=self.bits, tolerances=self.tolerances,
            k_max=self.k_max, max_escalations=self.max_escalations)
        self.report_ = approximate(spec, self._n_list(), config=config)
        self.n_values_ = [rec.n for rec in self.report_.records]
        self.c_values_ = np.array(
            [rec.c_float for rec in self.report_.records])
        self.exponents_ = self.report_.records[-1].exponents_reduced
        return self

    def transform(self, X):
        """Distances dist(f, Mult_N), one row per test function in X."""
        if not hasattr(self, "report_"):
            raise NotFittedError(
                "MonomialSubspaceApproximator must be fitted before "
                "calling transform")
        tests = _coerce_tests(X)
        diag = convergence_diagnostics(self.report_, tests)
        return np.array([diag["rows"][t.label] for t in tests], dtype=float)

    def score(self, X, y=None):
        """Negative final-stage distance averaged over X; higher is better."""
        dists = self.transform(X)
        return -float(np.mean(dists[:, -1])) if dists.size else 0.0
