"""Independent numerical checks of the probabilistic facts the growth bound rests on.

Every check returns a :class:`LemmaReport`. Exact checks enumerate a finite
support and compare with a 1e-12 tolerance; Monte Carlo checks use a fixed
multiple of the standard error (3 for equalities, 4 for counts), recorded in
the report's ``rule``.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .distributions import (
    DistributionSpec,
    abs_dot_expectation_oracle,
    discrete,
    enumerate_support,
    gaussian,
    integer_grid,
    m_constant,
    make_rng,
    mz_constant_A,
    mz_constant_B,
    mz_p0,
    sample,
    uniform,
)
from .network import NetworkConfig, build_network, iter_layers

EXACT_TOL = 1e-12
_MAX_ENUMERATION = 10**6
_MAX_SUBSET_DIM = 20


@dataclass
class LemmaReport:
    lemma: str
    estimate: float | list
    reference: float | list
    stderr: float | list = 0.0
    exact: bool = False
    rule: str = ""
    passed: bool = False
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return _jsonable(asdict(self))


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def _is_parallel(a, b) -> bool:
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0 or nb == 0:
        return True
    return abs(float(a @ b)) / (na * nb) >= 1.0 - 1e-12


def check_conditional_symmetry(weight_spec: DistributionSpec, bias_spec: DistributionSpec,
                               z, dz, trials: int, rng: np.random.Generator) -> LemmaReport:
    """Compare E[|X| | Y > 0] with E[|X|] for X = w.dz and Y = w.z + b.

    w has iid entries from the dense weight family, b one draw of the bias law.
    With both laws discrete and a small support the two expectations are summed
    exactly; otherwise they are estimated from the same samples and the
    difference is tested against its own standard error.
    """
    z = np.asarray(z, dtype=float)
    dz = np.asarray(dz, dtype=float)
    if z.shape != dz.shape or z.ndim != 1:
        raise ValueError("z and dz must be vectors of equal length")
    if _is_parallel(z, dz):
        raise ValueError("z and dz must not be parallel")
    w_law, b_law = weight_spec.dense(), bias_spec.dense()
    dim = z.size
    if (w_law.family == "discrete" and b_law.family == "discrete"
            and w_law.n_values ** dim * b_law.n_values <= _MAX_ENUMERATION):
        return _symmetry_exact(w_law, b_law, z, dz)
    if trials < 10**4:
        raise ValueError("conditional symmetry Monte Carlo needs at least 1e4 trials")
    w = sample(w_law, (trials, dim), rng)
    b = sample(b_law, trials, rng)
    x = np.abs(w @ dz)
    y = w @ z + b
    pos, neg = y > 0, y < 0
    n_pos, n_neg = int(pos.sum()), int(neg.sum())
    if n_pos < 2 or n_neg < 2:
        raise ValueError("Y is almost never of one sign; the check is degenerate")
    cond, uncond = float(x[pos].mean()), float(x.mean())
    # cond - uncond = (n_neg/n) (mean_pos - mean_neg) up to the Y == 0 mass,
    # and the two halves are independent samples
    frac_neg = n_neg / trials
    se = frac_neg * math.sqrt(x[pos].var(ddof=1) / n_pos + x[neg].var(ddof=1) / n_neg)
    diff = cond - uncond
    return LemmaReport(
        lemma="conditional_symmetry", estimate=[cond, uncond], reference=0.0, stderr=se,
        exact=False, rule="|E[|X| | Y>0] - E|X|| <= 3 stderr",
        passed=abs(diff) <= 3.0 * se,
        details={"difference": diff, "family": w_law.family, "trials": trials,
                 "p_y_positive": n_pos / trials})


def _symmetry_exact(w_law, b_law, z, dz) -> LemmaReport:
    support = enumerate_support(w_law.values, z.size)
    x = np.abs(support @ dz)
    y = (support @ z)[:, None] + np.asarray(b_law.values)[None, :]
    if np.any(y == 0):
        raise ValueError("Y = 0 has positive probability: z is orthogonal to a support vector")
    x = np.broadcast_to(x[:, None], y.shape)
    uncond = math.fsum(x.ravel()) / x.size
    pos = y > 0
    cond = math.fsum(x[pos]) / int(pos.sum())
    diff = cond - uncond
    return LemmaReport(
        lemma="conditional_symmetry", estimate=[cond, uncond], reference=0.0, stderr=0.0,
        exact=True, rule=f"|E[|X| | Y>0] - E|X|| <= {EXACT_TOL}",
        passed=abs(diff) <= EXACT_TOL,
        details={"difference": diff, "family": "discrete", "outcomes": int(y.size)})


def subvector_norm_expectation(u, alpha: float, method: str = "enumerate", trials: int = 10**5,
                               rng: np.random.Generator | None = None) -> tuple[float, float]:
    """E ||u_J|| where each index enters J independently with probability alpha.

    ``enumerate`` sums over all subsets of the nonzero coordinates (zeros never
    change the norm), so it is exact with stderr 0 for up to 20 nonzero
    entries in any dimension; ``montecarlo`` samples.
    """
    u = np.asarray(u, dtype=float)
    if method == "enumerate":
        sq = u[u != 0] ** 2
        n = sq.size
        if n > _MAX_SUBSET_DIM:
            raise ValueError(f"enumeration supports <= {_MAX_SUBSET_DIM} nonzero entries, got {n}")
        idx = np.arange(1 << n)
        mask = ((idx[:, None] >> np.arange(n)) & 1).astype(float)
        count = mask.sum(axis=1)
        prob = alpha ** count * (1.0 - alpha) ** (n - count)
        return math.fsum(prob * np.sqrt(mask @ sq)), 0.0
    sq = u * u
    n = u.size
    if method == "montecarlo":
        if rng is None:
            raise ValueError("montecarlo needs an rng")
        total = total_sq = 0.0
        done = 0
        chunk = max(1, (1 << 22) // max(n, 1))
        while done < trials:
            m = min(chunk, trials - done)
            keep = rng.random((m, n)) < alpha
            norms = np.sqrt(keep.astype(float) @ sq)
            total += norms.sum()
            total_sq += (norms * norms).sum()
            done += m
        mean = total / trials
        var = max(total_sq / trials - mean * mean, 0.0) * trials / max(trials - 1, 1)
        return mean, math.sqrt(var / trials)
    raise ValueError(f"unknown method {method!r}")


def check_subvector_sandwich(u, alpha: float) -> LemmaReport:
    """alpha ||u|| <= E ||u_J|| <= sqrt(alpha) ||u|| by exact enumeration."""
    value, _ = subvector_norm_expectation(u, alpha, "enumerate")
    norm = float(np.linalg.norm(u))
    lo, hi = alpha * norm, math.sqrt(alpha) * norm
    # float rounding on the tight edges (single nonzero entry, alpha in {0, 1})
    slack = EXACT_TOL * norm
    return LemmaReport(
        lemma="subvector_norm", estimate=value, reference=[lo, hi], exact=True,
        rule="alpha||u|| <= E||u_J|| <= sqrt(alpha)||u||",
        passed=lo - slack <= value <= hi + slack,
        details={"alpha": alpha, "dim": int(np.size(u))})


def check_m_bound(spec: DistributionSpec, dims: int, n_dirs: int, trials: int,
                  rng: np.random.Generator, directions=None) -> LemmaReport:
    """E|u.w| >= M ||u|| over random (or given) directions u."""
    if directions is None:
        directions = rng.standard_normal((n_dirs, dims))
    directions = np.atleast_2d(np.asarray(directions, dtype=float))
    m = m_constant(spec)
    means, ses, refs, ok = [], [], [], []
    exact = True
    for u in directions:
        mean, se = abs_dot_expectation_oracle(spec, u, trials, rng)
        ref = m * float(np.linalg.norm(u))
        if se == 0.0:
            ok.append(mean >= ref * (1.0 - EXACT_TOL))
        else:
            exact = False
            ok.append(mean + 3.0 * se >= ref)
        means.append(mean)
        ses.append(se)
        refs.append(ref)
    return LemmaReport(
        lemma="m_bound", estimate=means, reference=refs, stderr=ses, exact=exact,
        rule="E|u.w| + 3 stderr >= M||u|| (exact: >= up to 1e-12 relative)",
        passed=all(ok), details={"family": spec.family, "m": m, "directions": len(means)})


def check_active_count(config: NetworkConfig, replicates: int, seed: int,
                       point=None) -> LemmaReport:
    """Mean number of positive pre-activations per layer against width / 2."""
    if point is None:
        point = np.ones(config.input_dim) / math.sqrt(config.input_dim)
    point = np.asarray(point, dtype=float)[None, :]
    counts = np.empty((replicates, config.depth))
    for r in range(replicates):
        net = build_network(config, seed, r)
        for d, (h, _) in enumerate(iter_layers(net, point)):
            counts[r, d] = np.count_nonzero(h > 0)
    mean = counts.mean(axis=0)
    se = counts.std(axis=0, ddof=1) / math.sqrt(replicates)
    half = config.width / 2.0
    return LemmaReport(
        lemma="active_count", estimate=mean.tolist(), reference=half, stderr=se.tolist(),
        rule="|mean |A| - k/2| <= 4 stderr at every layer",
        passed=bool(np.all(np.abs(mean - half) <= 4.0 * se)),
        details={"width": config.width, "depth": config.depth, "replicates": replicates,
                 "family": config.weight_spec.family, "alpha": config.weight_spec.alpha})


def check_gaussian_closed_form(sigma: float, u, trials: int, rng: np.random.Generator,
                               rel_tol: float = 0.01) -> LemmaReport:
    mean, se = abs_dot_expectation_oracle(gaussian(sigma), u, trials, rng)
    ref = m_constant(gaussian(sigma)) * float(np.linalg.norm(u))
    return LemmaReport(
        lemma="gaussian_abs_dot", estimate=mean, reference=ref, stderr=se,
        rule=f"relative error <= {rel_tol}", passed=abs(mean - ref) <= rel_tol * ref,
        details={"sigma": sigma, "trials": trials})


def check_mz_constants() -> LemmaReport:
    p0 = mz_p0()
    vals = {"A(1)": mz_constant_A(1.0), "A(2)": mz_constant_A(2.0), "B(2)": mz_constant_B(2.0)}
    refs = {"A(1)": 2.0 ** -0.5, "A(2)": 1.0, "B(2)": 1.0}
    eps = 1e-9
    continuity = [abs(mz_constant_A(p0 + eps) - mz_constant_A(p0)),
                  abs(mz_constant_A(2.0 - eps) - mz_constant_A(2.0))]
    ok = (all(vals[k] == refs[k] for k in vals) and abs(p0 - 1.84742) <= 1e-5
          and max(continuity) <= 1e-8)
    return LemmaReport(
        lemma="mz_constants", estimate=list(vals.values()) + [p0],
        reference=list(refs.values()) + [1.84742], exact=True,
        rule="A(1)=2^-1/2, A(2)=B(2)=1 exactly; p0 within 1e-5 of 1.84742; A continuous",
        passed=ok, details={"continuity_gaps": continuity})


def check_mz_sandwich_p1(spec: DistributionSpec, u, trials: int,
                         rng: np.random.Generator) -> LemmaReport:
    """A(1) E sqrt(sum X_i^2) <= E|sum X_i| with X_i = u_i w_i, paired Monte Carlo."""
    u = np.asarray(u, dtype=float)
    w = sample(spec.dense(), (trials, u.size), rng)
    xs = w * u
    diff = np.abs(xs.sum(axis=1)) - mz_constant_A(1.0) * np.sqrt((xs * xs).sum(axis=1))
    mean = float(diff.mean())
    se = float(diff.std(ddof=1) / math.sqrt(trials))
    return LemmaReport(
        lemma="mz_sandwich_p1", estimate=mean, reference=0.0, stderr=se,
        rule="E|sum X| - A(1) E||X|| + 3 stderr >= 0", passed=mean + 3.0 * se >= 0,
        details={"family": spec.family, "trials": trials})


def _default_families():
    return [gaussian(1.0), uniform(1.0), discrete(integer_grid(2))]


def run_all(seed: int = 0, quick: bool = False) -> list[LemmaReport]:
    """Every check at its default size; ``quick`` shrinks trial counts for smoke runs."""
    trials = 2 * 10**4 if quick else 2 * 10**5
    reports = [check_mz_constants()]
    rng = make_rng(seed, 1)
    reports.append(check_gaussian_closed_form(1.0, rng.standard_normal(8), 10**5 if quick else 10**6,
                                              rng))
    for i, spec in enumerate(_default_families()):
        r = make_rng(seed, 100 + i)
        reports.append(check_m_bound(spec, 8 if spec.family != "discrete" else 6, 10 if quick else 50,
                                     trials, r))
        reports.append(check_mz_sandwich_p1(spec, r.standard_normal(8), trials, r))
    bias_laws = {"gaussian": gaussian(0.01), "uniform": uniform(0.01),
                 "discrete": discrete([-0.01, 0.01])}
    for i, spec in enumerate(_default_families()):
        r = make_rng(seed, 200 + i)
        dim = 3 if spec.family == "discrete" else 6
        for _ in range(5 if quick else 20):
            z, dz = r.standard_normal(dim), r.standard_normal(dim)
            reports.append(check_conditional_symmetry(spec, bias_laws[spec.family], z, dz,
                                                      trials, r))
    r = make_rng(seed, 300)
    for alpha in np.round(np.arange(0.1, 1.0, 0.1), 10):
        for _ in range(3 if quick else 20):
            reports.append(check_subvector_sandwich(r.standard_normal(int(r.integers(1, 13))),
                                                    float(alpha)))
    for i, spec in enumerate(_default_families()):
        for k in (10, 100):
            law = replace(spec, alpha=0.5, scale_by_inv_sqrt_k=True)
            cfg = NetworkConfig(k, 4, law, bias_laws[spec.family])
            reports.append(check_active_count(cfg, 200 if quick else 2000, seed + 400 + i))
    return reports
