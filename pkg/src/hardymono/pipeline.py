"""End-to-end subspace approximation.

Given a description of a shift-invariant subspace (an exponent multiset, a
wandering vector, a raw moment sequence, or a truncation cutoff), each stage
N runs the chain

    moments -> max_scaling_constant -> build_alpha ->
    partial_fractions_over_splus1 -> inverse_laplace_uN ->
    exponent_multiset_from_poles (one copy of 0 removed)

and the per-N records accumulate into an append-only report together with
convergence diagnostics (moment residuals, contractivity samples, distances
from caller-chosen test functions to the reconstructed spaces).

Specs and test functions hold only JSON-ready payloads, so a single object
can be materialized under every precision the ladder visits.
"""

from dataclasses import dataclass, field
from fractions import Fraction

from .context import Context
from .errors import (
    DomainError,
    HardymonoError,
    IllConditioningError,
    SpaceDenseError,
)
from . import functions
from . import geometry
from . import laguerre
from . import pick
from . import reconstruct

K_MAX_DEFAULT = 32
ESCALATION_LADDER = (53, 128, 256, 512, 1024)

# Precision ladder by stage size; Hilbert-type conditioning grows so fast
# that double is only trustworthy through N = 8.
def _ladder_bits(n):
    if n <= 8:
        return 53
    if n <= 12:
        return 128
    if n <= 16:
        return 256
    return 512


def _next_bits(current, required):
    for cand in ESCALATION_LADDER:
        if cand > current and (required is None or cand >= min(required, 1024)):
            if required is not None and required > ESCALATION_LADDER[-1]:
                return None
            return cand
    return None


def _stage(stage, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except HardymonoError as err:
        raise type(err)(f"[{stage}] {err}", **err.info) from err


# ------------------------------------------------------------------- specs


class SubspaceSpec:
    """Which subspace to approximate; payload is kept JSON-ready.

    variant "monomial"  : exponent multiset S, the space span{(log x)^r x^s}
    variant "wandering" : an explicit unit vector u
    variant "moments"   : the sequence <x^i, u> directly
    variant "truncation": cutoff a for {f : f = 0 a.e. on [0, a]}
    """

    VARIANTS = ("monomial", "wandering", "moments", "truncation")

    def __init__(self, variant, payload):
        if variant not in self.VARIANTS:
            raise DomainError(f"unknown subspace variant {variant!r}")
        self.variant = variant
        self.payload = payload

    # Constructors serialize eagerly so later materializations are
    # context-free and byte-stable.
    @classmethod
    def monomial(cls, ctx, exponents):
        if isinstance(exponents, str):
            exponents = geometry.ExponentMultiset.from_text_list(ctx, exponents)
        if exponents.dimension == 0:
            raise DomainError("monomial spec needs a nonempty exponent multiset")
        return cls("monomial", exponents.to_json(ctx))

    @classmethod
    def wandering(cls, ctx, u):
        return cls("wandering", functions.sum_to_json(ctx, u))

    @classmethod
    def moments(cls, ctx, m):
        if not isinstance(m, pick.MomentSequence):
            m = pick.MomentSequence.build(ctx, m)
        return cls("moments", m.to_json(ctx))

    @classmethod
    def truncation(cls, a):
        text = a if isinstance(a, str) else repr(float(a))
        value = float(Fraction(text)) if "/" in text else float(text)
        if not 0.0 < value < 1.0:
            raise DomainError("truncation cutoff must lie in (0, 1)")
        return cls("truncation", {"a": text})

    def exponents(self, ctx):
        return geometry.ExponentMultiset.from_json(ctx, self.payload)

    def u(self, ctx):
        return functions.sum_from_json(ctx, self.payload)

    def moment_sequence(self, ctx):
        return pick.MomentSequence.from_json(ctx, self.payload)

    def cutoff(self, ctx):
        return ctx.real(self.payload["a"])

    def to_json(self):
        out = {"variant": self.variant}
        if self.variant == "monomial":
            out["exponents"] = self.payload["exponents"]
        elif self.variant == "wandering":
            out["u"] = self.payload
        elif self.variant == "moments":
            out["m"] = self.payload["m"]
        else:
            out["a"] = self.payload["a"]
        return out

    @classmethod
    def from_json(cls, data):
        variant = data.get("variant")
        if variant == "monomial":
            return cls("monomial", {"exponents": data["exponents"]})
        if variant == "wandering":
            return cls("wandering", data["u"])
        if variant == "moments":
            return cls("moments", {"m": data["m"]})
        if variant == "truncation":
            return cls("truncation", {"a": str(data["a"])})
        raise DomainError(f"unknown subspace variant {variant!r}")

    def __repr__(self):
        return f"SubspaceSpec({self.variant!r})"


class TestFunction:
    """A labelled test function rebuilt per context for distance tables."""

    def __init__(self, label, payload):
        self.label = str(label)
        self.payload = payload

    @classmethod
    def indicator(cls, label, a):
        return cls(label, {"indicator": float(a)})

    @classmethod
    def from_sum(cls, label, ctx, f):
        return cls(label, functions.sum_to_json(ctx, f))

    @classmethod
    def from_json(cls, data):
        label = data.get("label", "test")
        payload = {k: v for k, v in data.items() if k != "label"}
        return cls(label, payload)

    def build(self, ctx):
        if "indicator" in self.payload:
            return geometry.TruncatedIndicator(self.payload["indicator"])
        return functions.sum_from_json(ctx, self.payload)

    def to_json(self):
        out = {"label": self.label}
        out.update(self.payload)
        return out


@dataclass
class PipelineConfig:
    bits: int = None                  # None: per-N ladder
    tolerances: dict = None
    k_max: int = K_MAX_DEFAULT
    max_escalations: int = 2

    def context_for(self, n):
        bits = self.bits if self.bits is not None else _ladder_bits(n)
        return bits


# -------------------------------------------------------- wandering vector


def wandering_vector(ctx, spec, k_max=None):
    """Unit vector orthogonal to the subspace (or its moments) plus k0.

    For the monomial variant this searches k0 = min{k : e_k outside the
    space}, projects e_{k0} onto the space and normalizes the residue.
    The truncation variant never materializes u (the normalized indicator
    is outside the log-monomial algebra); its exact integer moments
    a^{i+1}/((i+1) sqrt(a)) come back as a MomentSequence, with k0 = 0
    since e_0 = 1 certainly escapes the space.
    """
    k_max = K_MAX_DEFAULT if k_max is None else int(k_max)
    if spec.variant == "monomial":
        space = spec.exponents(ctx)
        k0 = None
        for k in range(k_max + 1):
            ek = laguerre.laguerre_fn(ctx, k)
            dist = float(geometry.dist_to_space(ctx, ek, space))
            if dist > ctx.membership_tol:
                k0 = k
                break
        if k0 is None:
            raise SpaceDenseError(
                f"every e_k with k <= {k_max} lies inside the space; "
                f"it appears dense")
        ek = laguerre.laguerre_fn(ctx, k0)
        eta = functions.subtract(ctx, ek, geometry.project(ctx, ek, space))
        nrm = functions.norm(ctx, eta)
        with ctx.guard():
            u = functions.scale(ctx, ctx.one / ctx.comp(nrm), eta)
        return u, k0
    if spec.variant == "wandering":
        u = spec.u(ctx)
        off = abs(float(functions.norm_sq(ctx, u)) - 1.0)
        if off > 1e-6:
            raise DomainError(
                f"wandering spec vector has |norm^2 - 1| = {off:.3e}")
        return u, None
    if spec.variant == "moments":
        return spec.moment_sequence(ctx), None
    # truncation
    a = spec.cutoff(ctx)
    if not 0.0 < float(a) < 1.0:
        raise DomainError("truncation cutoff must lie in (0, 1)")
    return _truncation_moments(ctx, a, K_MAX_DEFAULT + 1), 0


def _truncation_moments(ctx, a, count):
    with ctx.guard():
        root = ctx.sqrt_real(a)
        vals = []
        power = ctx.real(a)
        for i in range(count):
            vals.append(ctx.as_comp(power / (ctx.real(i + 1) * root)))
            power = power * a
    return pick.MomentSequence(tuple(vals))


def _moments_for(ctx, spec, n):
    """MomentSequence m_0..m_n for stage n under the given context."""
    if spec.variant == "moments":
        return spec.moment_sequence(ctx).truncated(ctx, n + 1), None
    if spec.variant == "truncation":
        return _truncation_moments(ctx, spec.cutoff(ctx), n + 1), 0
    u, k0 = wandering_vector(ctx, spec)
    vals = []
    for i in range(n + 1):
        vals.append(functions.inner_product(ctx, functions.monomial(ctx, i), u))
    return pick.MomentSequence(tuple(vals)), k0


# ------------------------------------------------------------- diagnostics


@dataclass
class WanderingDiagnostics:
    values: list                 # <(1-H*)^k u, u> for k = 0..K
    max_violation: float = 0.0
    warnings: tuple = ()


def validate_wandering(ctx, u, K):
    """Check the orthonormality condition <(1-H*)^k u, u> = delta_{k,0}.

    Purely diagnostic; a large violation means u is not the wandering
    vector of any invariant subspace, and downstream output will not
    converge to anything meaningful.
    """
    values = []
    worst = 0.0
    v = u
    with ctx.guard():
        for k in range(int(K) + 1):
            ip = functions.inner_product(ctx, v, u)
            values.append(ip)
            violation = ctx.absf(ip - ctx.one) if k == 0 else ctx.absf(ip)
            worst = max(worst, violation)
            if k < K:
                v = functions.subtract(ctx, v, functions.apply_hardy_adjoint(ctx, v))
    warnings = ()
    if worst > max(ctx.membership_tol, 1e-9):
        warnings = (f"wandering violation {worst:.3e}: u is not a "
                    f"wandering vector to working tolerance",)
    return WanderingDiagnostics(values, worst, warnings)


# ------------------------------------------------------------------ report


CONTRACTIVITY_RE = (-0.45, -0.2, 0.05, 0.35, 0.75, 1.3, 2.0, 3.0)
CONTRACTIVITY_IM = (-2.1, -0.7, 0.0, 0.7, 2.1)


@dataclass
class StageRecord:
    n: int
    bits: int
    k0: object
    c_value: object
    c_float: float
    degenerate: bool
    gamma: list
    alpha: object
    expansion: object
    u_n: object
    exponents_full: object
    exponents_reduced: object
    moment_residuals: list
    max_moment_residual: float
    interp_residual: float
    contractivity_excess: float
    distances: dict
    warnings: tuple

    def context(self, tolerances=None):
        return Context.for_bits(self.bits, **(tolerances or {}))

    def to_json(self):
        ctx = self.context()
        return {
            "N": self.n,
            "bits": self.bits,
            "k0": self.k0,
            "C": ctx.fmt_real(self.c_value),
            "degenerate": self.degenerate,
            "gamma": [ctx.fmt_complex_pair(g) for g in self.gamma],
            "alpha": self.alpha.to_json(ctx),
            "expansion": self.expansion.to_json(ctx),
            "u": functions.sum_to_json(ctx, self.u_n),
            "exponents_full": self.exponents_full.to_json(ctx),
            "exponents_reduced": self.exponents_reduced.to_json(ctx),
            "moment_residuals": [repr(r) for r in self.moment_residuals],
            "max_moment_residual": repr(self.max_moment_residual),
            "interp_residual": repr(self.interp_residual),
            "contractivity_excess": repr(self.contractivity_excess),
            "distances": {k: repr(v) for k, v in self.distances.items()},
            "warnings": list(self.warnings),
        }


@dataclass
class ApproximationReport:
    spec_json: dict
    test_labels: tuple = ()
    records: list = field(default_factory=list)

    def to_json(self):
        return {
            "spec": self.spec_json,
            "tests": list(self.test_labels),
            "records": [rec.to_json() for rec in self.records],
        }

    def csv_text(self):
        header = ["N", "C_N", "num_exponents", "max_moment_residual"]
        header += [f"dist:{label}" for label in self.test_labels]
        lines = [",".join(header)]
        for rec in self.records:
            ctx = rec.context()
            row = [str(rec.n), ctx.fmt_real(rec.c_value),
                   str(rec.exponents_reduced.dimension),
                   repr(rec.max_moment_residual)]
            row += [repr(rec.distances[label]) for label in self.test_labels]
            lines.append(",".join(row))
        return "\n".join(lines) + "\n"


def _contractivity_excess(ctx, alpha):
    worst = 0.0
    with ctx.guard():
        for re_part in CONTRACTIVITY_RE:
            for im_part in CONTRACTIVITY_IM:
                val = ctx.absf(alpha.evaluate(ctx, ctx.comp(re_part, im_part)))
                worst = max(worst, val - 1.0)
    return max(worst, 0.0)


def _run_stage_n(ctx, spec, n, tests, config):
    warnings = []
    moments, k0 = _stage("moments", _moments_for, ctx, spec, n)
    scaling = _stage("scaling", pick.max_scaling_constant, ctx, moments)
    if scaling.degenerate:
        warnings.append("degenerate kernel: gamma fell back to the first "
                        "coordinate vector")
    c_val = scaling.c_value
    with ctx.guard():
        values = [ctx.comp(c_val) * ctx.comp(i + 1) * moments.values[i]
                  for i in range(n + 1)]
    alpha = _stage("symbol", reconstruct.build_alpha, ctx, scaling.gamma, values)
    interp_residual = float(alpha.interp_residual)
    tol_interp = 1e-6 if ctx.mode == "double" else 2.0 ** (-(ctx.bits or 53) / 4)
    if interp_residual > tol_interp:
        warnings.append(
            f"symbol interpolation residual {interp_residual:.3e}")
    pf = _stage("expansion", reconstruct.partial_fractions_over_splus1,
                ctx, alpha)
    warnings.extend(pf.warnings)
    u_n = _stage("reconstruction", reconstruct.inverse_laplace_uN, ctx, pf)
    exps_full = _stage("exponents", reconstruct.exponent_multiset_from_poles,
                       ctx, pf, reduce=False)
    exps_reduced = _stage("exponents", reconstruct.exponent_multiset_from_poles,
                          ctx, pf)
    residuals = []
    with ctx.guard():
        for i in alpha.support:
            have = alpha.evaluate(ctx, ctx.comp(i))
            residuals.append(ctx.absf(have - values[i]))
    max_resid = max(residuals) if residuals else 0.0
    excess = _contractivity_excess(ctx, alpha)
    if excess > 1e-8:
        warnings.append(f"contractivity excess {excess:.3e} on sample grid")
    distances = {}
    for test in tests:
        fn = test.build(ctx)
        distances[test.label] = float(
            geometry.dist_to_space(ctx, fn, exps_reduced))
    return StageRecord(
        n=n, bits=ctx.bits if ctx.bits is not None else 53, k0=k0,
        c_value=c_val, c_float=float(c_val),
        degenerate=scaling.degenerate,
        gamma=list(scaling.gamma), alpha=alpha, expansion=pf, u_n=u_n,
        exponents_full=exps_full, exponents_reduced=exps_reduced,
        moment_residuals=residuals, max_moment_residual=max_resid,
        interp_residual=interp_residual, contractivity_excess=excess,
        distances=distances, warnings=tuple(warnings))


def approximate(spec, n_list, config=None, tests=()):
    """Run the full chain for every N in n_list; deterministic per config.

    Stages escalate precision (at most config.max_escalations times per N)
    when a step reports ill-conditioning; every raised error is tagged
    with the stage that produced it.  Records append in order, so on
    failure the partial report travels in the error's info dict.
    """
    if isinstance(config, dict):
        config = PipelineConfig(**config)
    config = config or PipelineConfig()
    tests = list(tests)
    report = ApproximationReport(
        spec_json=spec.to_json(),
        test_labels=tuple(t.label for t in tests))
    for n in n_list:
        n = int(n)
        if n < 1:
            raise DomainError(f"stage index N = {n} must be >= 1")
        bits = config.context_for(n)
        attempts = 0
        while True:
            ctx = Context.for_bits(bits, **(config.tolerances or {}))
            try:
                record = _run_stage_n(ctx, spec, n, tests, config)
                break
            except IllConditioningError as err:
                if attempts >= config.max_escalations:
                    err.info.setdefault("completed_n", [r.n for r in report.records])
                    raise
                nxt = _next_bits(bits, err.required_bits)
                if nxt is None:
                    err.info.setdefault("completed_n", [r.n for r in report.records])
                    raise
                bits = nxt
                attempts += 1
            except HardymonoError as err:
                err.info.setdefault("completed_n", [r.n for r in report.records])
                raise
        report.records.append(record)
    return report


def convergence_diagnostics(report, tests):
    """dist(f, Mult_N) for every test function f and record N.

    Returns {"N": [...], "labels": [...], "rows": {label: [floats]}} using
    each record's own working precision.
    """
    tests = list(tests)
    rows = {t.label: [] for t in tests}
    for rec in report.records:
        ctx = rec.context()
        for t in tests:
            fn = t.build(ctx)
            rows[t.label].append(
                float(geometry.dist_to_space(ctx, fn, rec.exponents_reduced)))
    return {
        "N": [rec.n for rec in report.records],
        "labels": [t.label for t in tests],
        "rows": rows,
    }
