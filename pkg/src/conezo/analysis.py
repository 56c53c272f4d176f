"""Monte-Carlo verification of the estimator's moment identities, the
concentration claims behind the fast cone sampler, and the per-step descent
inequality; plus per-run alignment diagnostics.

Statistical gates are 5 standard errors plus an absolute floor of 1e-3
relative to the quantity's scale, so degenerate-variance cells (e.g. theta=0,
where the draw is deterministic) cannot fail on underflowed standard errors.
With the fixed seeds used by the test-suite the checks are deterministic; under
reseeding a 5-sigma gate would flake at roughly the 1e-6 level per check.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import cos, sin, sqrt
from typing import Optional

import numpy as np

from .estimator import Objective
from .rng import RngStream, normal_stride
from .sampling import (ConeAngleSampler, HALF_PI, angle_tail_bound,
                       cone_coefficients, sample_orthogonal_complement)
from .vec import sample_unit_sphere

GATE_SIGMAS = 5.0
GATE_REL_FLOOR = 1e-3


def _gate(delta: float, se: float, scale: float) -> bool:
    return abs(delta) <= GATE_SIGMAS * se + GATE_REL_FLOOR * abs(scale)


def _zscore(delta: float, se: float, scale: float) -> float:
    denom = se + GATE_REL_FLOOR * abs(scale) / GATE_SIGMAS
    return 0.0 if denom == 0.0 else abs(delta) / denom


# ---------------------------------------------------------------------------
# Closed forms


def cone_first_moment_analytic(a, m_hat, theta: float, d: int) -> np.ndarray:
    """E[(z.a) z] = d cos^2(theta) (m_hat.a) m_hat + sin^2(theta) a."""
    a = np.asarray(a, dtype=np.float64)
    m_hat = np.asarray(m_hat, dtype=np.float64)
    ct, st = cone_coefficients(theta)
    return d * ct * ct * float(np.dot(m_hat, a)) * m_hat + st * st * a


def cone_second_moment_exact(a, m_hat, theta: float, d: int) -> float:
    """Exact E ||(z.a) z||^2 = d cos^2(th)(d + 4 sin^2(th))(m_hat.a)^2 + d sin^2(th)||a||^2.

    Holds for every d (only second moments of the uniform sphere draw and the
    constancy of ||u|| enter), not just asymptotically.
    """
    a = np.asarray(a, dtype=np.float64)
    m_hat = np.asarray(m_hat, dtype=np.float64)
    ct, st = cone_coefficients(theta)
    ma = float(np.dot(m_hat, a))
    return d * ct * ct * (d + 4.0 * st * st) * ma * ma + d * st * st * float(np.dot(a, a))


def cone_second_moment_bound(a, m_hat, theta: float, d: int) -> float:
    """The looser closed-form bound d((d+4) cos^2(th) cos^2(rho) + sin^2(th)) ||a||^2."""
    a = np.asarray(a, dtype=np.float64)
    m_hat = np.asarray(m_hat, dtype=np.float64)
    ct, st = cone_coefficients(theta)
    ma = float(np.dot(m_hat, a))
    return d * (d + 4.0) * ct * ct * ma * ma + d * st * st * float(np.dot(a, a))


def track_alignment(m, grad) -> Optional[float]:
    """Squared cosine between the momentum and the gradient; None when either
    vector is degenerate (the logged diagnostic is then left empty)."""
    m = np.asarray(m, dtype=np.float64)
    grad = np.asarray(grad, dtype=np.float64)
    mm = float(np.dot(m, m))
    gg = float(np.dot(grad, grad))
    if mm <= 0.0 or gg <= 0.0:
        return None
    mg = float(np.dot(m, grad))
    return (mg * mg) / (mm * gg)


def optimal_eta(theta: float, cos2_rho: float, d: int, ell: float) -> float:
    """The step size maximizing the guaranteed per-step decrease; 0 when the
    direction carries no gradient signal (theta=0 with orthogonal momentum)."""
    ct, st = cone_coefficients(theta)
    num = d * ct * ct * cos2_rho + st * st
    den = ell * d * ((d + 4.0) * ct * ct * cos2_rho + st * st)
    return 0.0 if den == 0.0 else num / den


def descent_rhs(f_x: float, theta: float, cos2_rho: float, a_norm2: float,
                eta: float, d: int, ell: float) -> float:
    """Upper bound for E f(x_+): f(x) - eta L1 ||a||^2 + (eta^2 ell / 2) L2 ||a||^2."""
    ct, st = cone_coefficients(theta)
    lin = d * ct * ct * cos2_rho + st * st
    quad = d * ((d + 4.0) * ct * ct * cos2_rho + st * st)
    return f_x - eta * lin * a_norm2 + 0.5 * eta * eta * ell * quad * a_norm2


def optimal_decrease(theta: float, cos2_rho: float, d: int, ell: float) -> float:
    """Guaranteed decrease per unit ||a||^2 at the optimal step size (>= 0)."""
    ct, st = cone_coefficients(theta)
    num = d * ct * ct * cos2_rho + st * st
    den = 2.0 * ell * d * ((d + 4.0) * ct * ct * cos2_rho + st * st)
    return 0.0 if den == 0.0 else num * num / den


def quadratic_expected_next_value(sigma, x, m_hat, theta: float, eta: float) -> float:
    """Exact E f(x - eta (z.a) z) for f(y) = sum_i sigma_i y_i^2 under the fast
    cone draw (sphere mode) - the independent oracle for the descent check.

    Uses only sphere moments: E f_+ = f - eta E[(z.a)^2] + eta^2 E[(z.a)^2 z^T D z],
    with both expectations in closed form.
    """
    sigma = np.asarray(sigma, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    m_hat = np.asarray(m_hat, dtype=np.float64)
    d = x.shape[0]
    ct, st = cone_coefficients(theta)
    al2 = d * ct * ct          # alpha^2, alpha = sqrt(d) cos(theta)
    be2 = d * st * st          # beta^2,  beta  = sqrt(d) sin(theta)
    a = 2.0 * sigma * x
    ma = float(np.dot(m_hat, a))
    aa = float(np.dot(a, a))
    tr_d = float(np.sum(sigma))
    mdm = float(np.dot(m_hat, sigma * m_hat))
    ada = float(np.dot(a, sigma * a))
    adm = float(np.dot(a, sigma * m_hat))
    f_x = float(np.dot(sigma, x * x))

    t1 = al2 * ma * ma + be2 * aa / d
    t2 = (al2 * al2 * ma * ma * mdm
          + (al2 * be2 / d) * (ma * ma * tr_d + 4.0 * ma * adm + aa * mdm)
          + be2 * be2 * (aa * tr_d + 2.0 * ada) / (d * (d + 2.0)))
    return f_x - eta * t1 + eta * eta * t2


# ---------------------------------------------------------------------------
# Monte-Carlo verification


def _batch_normals(rng: RngStream, rows: int, d: int) -> np.ndarray:
    """``rows`` independent d-entry normal draws, bitwise identical to looping
    rng.normals(d) (the flat draw shares the per-row counter grid because the
    per-draw stride is even)."""
    stride = normal_stride(d)
    flat = rng.normals(rows * stride)
    return flat.reshape(rows, stride)[:, :d]


def _batch_cone(rng: RngStream, rows: int, d: int, theta: float, m_hat: np.ndarray) -> np.ndarray:
    ct, st = cone_coefficients(theta)
    g = _batch_normals(rng, rows, d)
    norms = np.sqrt(np.einsum("ij,ij->i", g, g))
    z = g * (sqrt(d) * st / norms)[:, None]
    if ct != 0.0:
        z += (sqrt(d) * ct) * m_hat[None, :]
    return z


@dataclass
class MomentReport:
    """Empirical vs analytic moments of (z.a) z for one (d, theta) cell."""

    d: int
    theta: float
    n_samples: int
    empirical_mean: np.ndarray
    analytic_mean: np.ndarray
    empirical_second: float
    analytic_second_exact: float
    analytic_second_bound: float
    std_error: float            # of the second moment
    proj_axis: tuple[float, float, float]   # (delta, se, scale) along m_hat
    proj_perp: tuple[float, float, float]   # along the a-component orthogonal to m_hat
    mean_norm_gap: tuple[float, float, float]
    passed: bool = False
    z_scores: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.n_samples < 10_000:
            raise ValueError("moment verification needs n_samples >= 1e4")


def verify_cone_moments(d: int, theta: float, n_samples: int, rng: RngStream,
                        batch: int = 4096) -> MomentReport:
    """Draw one random (a, m_hat), sample the fast cone direction n_samples
    times, and compare the empirical moments of (z.a) z against the closed
    forms: the mean along m_hat, along the orthogonal component of a, and in
    total norm; the second moment against the exact identity and its bound."""
    m_hat = sample_unit_sphere(rng, d)
    a = 1.0 + 2.0 * rng.uniforms(1)[0] ** 2  # scale, so ||a|| is not always ~1
    a = a * sample_unit_sphere(rng, d)

    analytic = cone_first_moment_analytic(a, m_hat, theta, d)
    exact2 = cone_second_moment_exact(a, m_hat, theta, d)
    bound2 = cone_second_moment_bound(a, m_hat, theta, d)

    # Orthonormal frame spanning (m_hat, a).
    e_perp = a - float(np.dot(a, m_hat)) * m_hat
    pn = float(np.linalg.norm(e_perp))
    e_perp = e_perp / pn if pn > 1e-12 else None

    vec_sum = np.zeros(d)
    s1 = s1sq = 0.0     # projections onto m_hat
    s2 = s2sq = 0.0     # projections onto e_perp
    q = qsq = 0.0       # per-sample (z.a)^2 ||z||^2
    done = 0
    while done < n_samples:
        rows = min(batch, n_samples - done)
        z = _batch_cone(rng, rows, d, theta, m_hat)
        wa = z @ a
        g = z * wa[:, None]
        vec_sum += g.sum(axis=0)
        p1 = g @ m_hat
        s1 += p1.sum()
        s1sq += float(p1 @ p1)
        if e_perp is not None:
            p2 = g @ e_perp
            s2 += p2.sum()
            s2sq += float(p2 @ p2)
        sq = wa * wa * np.einsum("ij,ij->i", z, z)
        q += sq.sum()
        qsq += float(sq @ sq)
        done += rows

    n = float(n_samples)
    mean_vec = vec_sum / n
    mean_scale = float(np.linalg.norm(analytic))

    def stats(total, total_sq, target):
        m = total / n
        var = max(total_sq / n - m * m, 0.0)
        # Floor scale is the analytic mean's norm: a projection target of 0
        # (e.g. theta=0) must not zero out the tolerance.
        return m - target, sqrt(var / n), max(abs(target), mean_scale)

    pa = stats(s1, s1sq, float(np.dot(analytic, m_hat)))
    pp = stats(s2, s2sq, float(np.dot(analytic, e_perp))) if e_perp is not None else (0.0, 0.0, 0.0)
    second_mean = q / n
    second_se = sqrt(max(qsq / n - second_mean**2, 0.0) / n)

    # Total-norm gate: ||mean - analytic|| against the trace standard error.
    trace_var = max(second_mean - float(np.dot(mean_vec, mean_vec)), 0.0)
    norm_gap = (float(np.linalg.norm(mean_vec - analytic)), sqrt(trace_var / n), mean_scale)

    scale2 = max(exact2, bound2)
    ok = (_gate(*pa) and _gate(*pp) and _gate(norm_gap[0], norm_gap[1], norm_gap[2])
          and _gate(second_mean - exact2, second_se, scale2)
          and second_mean <= bound2 + GATE_SIGMAS * second_se + GATE_REL_FLOOR * scale2
          and exact2 <= bound2 * (1.0 + 1e-12))
    report = MomentReport(
        d=d, theta=theta, n_samples=n_samples,
        empirical_mean=mean_vec, analytic_mean=analytic,
        empirical_second=second_mean, analytic_second_exact=exact2,
        analytic_second_bound=bound2, std_error=second_se,
        proj_axis=pa, proj_perp=pp, mean_norm_gap=norm_gap, passed=ok,
        z_scores={
            "mean_axis": _zscore(*pa),
            "mean_perp": _zscore(*pp),
            "mean_norm": _zscore(*norm_gap),
            "second": _zscore(second_mean - exact2, second_se, scale2),
        },
    )
    return report


def verify_vanilla_moments(d: int, n_samples: int, rng: RngStream) -> MomentReport:
    """theta = pi/2 reduction: mean equals a; on the sphere the second moment
    is exactly d ||a||^2, comfortably inside the 2 d ||a||^2 bound."""
    report = verify_cone_moments(d, HALF_PI, n_samples, rng)
    two_d_bound = 2.0 * report.analytic_second_exact  # exact there is d ||a||^2
    report.z_scores["second_vs_2d_bound"] = report.empirical_second / two_d_bound
    report.passed = report.passed and report.empirical_second <= two_d_bound
    return report


@dataclass
class DescentReport:
    theta: float
    cos2_rho: float
    eta: float
    n_samples: int
    f_x: float
    empirical_mean: float
    std_error: float
    rhs: float
    exact_expected: Optional[float]
    approx_decrease: float
    passed: bool
    z_scores: dict = field(default_factory=dict)


def verify_descent(f: Objective, x, m_hat, theta: float, eta: Optional[float],
                   n_samples: int, rng: RngStream, ell: float,
                   sigma=None, batch: int = 2048) -> DescentReport:
    """Monte-Carlo E f(x - eta (z.a) z) over cone draws against the descent
    upper bound; when ``sigma`` is given (diagonal quadratic) the expectation
    is also cross-checked against its closed form.

    Uses the analytic-gradient limit of the estimator, so no smoothing bias
    enters.
    """
    x = np.asarray(x, dtype=np.float64)
    m_hat = np.asarray(m_hat, dtype=np.float64)
    d = x.shape[0]
    a = f.grad(x)
    aa = float(np.dot(a, a))
    ma = float(np.dot(m_hat, a))
    cos2_rho = (ma * ma) / aa
    if eta is None:
        eta = optimal_eta(theta, cos2_rho, d, ell)
    f_x = f.value(x)

    total = total_sq = 0.0
    done = 0
    while done < n_samples:
        rows = min(batch, n_samples - done)
        z = _batch_cone(rng, rows, d, theta, m_hat)
        wa = z @ a
        x_next = x[None, :] - (eta * wa)[:, None] * z
        if sigma is not None:
            vals = (x_next * x_next) @ np.asarray(sigma, dtype=np.float64)
        else:
            vals = np.array([f.value(row) for row in x_next])
        total += float(vals.sum())
        total_sq += float(vals @ vals)
        done += rows

    n = float(n_samples)
    mean = total / n
    se = sqrt(max(total_sq / n - mean * mean, 0.0) / n)
    rhs = descent_rhs(f_x, theta, cos2_rho, aa, eta, d, ell)
    exact = (quadratic_expected_next_value(sigma, x, m_hat, theta, eta)
             if sigma is not None else None)
    approx = -optimal_decrease(theta, cos2_rho, d, ell) * aa

    ok = mean <= rhs + GATE_SIGMAS * se + GATE_REL_FLOOR * abs(f_x)
    zs = {"vs_rhs": _zscore(max(mean - rhs, 0.0), se, f_x)}
    if exact is not None:
        ok = ok and _gate(mean - exact, se, f_x)
        zs["vs_exact"] = _zscore(mean - exact, se, f_x)
    return DescentReport(theta=theta, cos2_rho=cos2_rho, eta=eta, n_samples=n_samples,
                         f_x=f_x, empirical_mean=mean, std_error=se, rhs=rhs,
                         exact_expected=exact, approx_decrease=approx, passed=ok,
                         z_scores=zs)


# ---------------------------------------------------------------------------
# Concentration checks for the fast-sampler simplifications


def axis_overlap_medians(ds: tuple[int, ...], n: int, rng: RngStream) -> dict:
    """Median |<m_hat, u>| for uniform unit draws at each dimension.

    The overlap scaled by sqrt(d) is asymptotically |N(0,1)|, whose median is
    ~0.6745, so the medians sit well under 3/sqrt(d) and scale like 1/sqrt(d).
    """
    out = {}
    for d in ds:
        m_hat = sample_unit_sphere(rng, d)
        g = _batch_normals(rng, n, d)
        norms = np.sqrt(np.einsum("ij,ij->i", g, g))
        overlap = np.abs(g @ m_hat) / norms
        out[d] = float(np.median(overlap))
    return out


def exact_angle_tail(d: int, theta: float, theta_prime: float, n: int,
                     rng: RngStream) -> dict:
    """Empirical P(gamma <= theta') for the exact cone-angle sampler plus the
    closed-form tail bound it must respect."""
    sampler = ConeAngleSampler(d, theta)
    gammas = sampler.sample(rng, n)
    phat = float(np.mean(gammas <= theta_prime))
    return {
        "d": d,
        "phat": phat,
        "bound": angle_tail_bound(theta, theta_prime, d),
        "n": n,
    }


def fast_vs_exact_angle_means(d: int, theta: float, n: int, rng: RngStream) -> dict:
    """Mean cos(angle(z, m_hat)) from the fast construction vs the exact
    sampler; they agree as d grows (both concentrate at cos theta)."""
    m_hat = sample_unit_sphere(rng, d)
    z = _batch_cone(rng, n, d, theta, m_hat)
    cos_fast = (z @ m_hat) / np.sqrt(np.einsum("ij,ij->i", z, z))
    sampler = ConeAngleSampler(d, theta)
    cos_exact = np.cos(sampler.sample(rng, n))
    return {"fast": float(np.mean(cos_fast)), "exact": float(np.mean(cos_exact))}


def theta_star_consistent(cos2_rho: float, d: int, ell: float = 2.0) -> bool:
    """The binary exploit/explore rule must agree with comparing the optimal
    guaranteed decreases at theta = 0 and theta = pi/2 (closed form, no
    sampling).  At the exact threshold the two decreases tie (to rounding) and
    either choice is consistent."""
    from .optimizers import theta_star

    d0 = optimal_decrease(0.0, cos2_rho, d, ell)
    d90 = optimal_decrease(HALF_PI, cos2_rho, d, ell)
    if abs(d0 - d90) <= 1e-9 * max(d0, d90):
        return True
    star = theta_star(cos2_rho, d)
    return (d0 > d90) == (star == 0.0)


# ---------------------------------------------------------------------------
# Check registry (drives the `verify` CLI subcommand)


@dataclass
class CheckRecord:
    name: str
    passed: bool
    z_score: Optional[float] = None
    n: Optional[int] = None
    detail: str = ""

    def as_json(self) -> dict:
        return {"name": self.name, "pass": bool(self.passed),
                "z_score": None if self.z_score is None else float(self.z_score),
                "n": None if self.n is None else int(self.n), "detail": self.detail}


MOMENT_GRID_DS = (2, 10, 50, 500)
MOMENT_GRID_THETAS = (0.0, 0.5, 1.0, 1.35, HALF_PI)


def _moment_checks(grid: str, seed: int) -> list[CheckRecord]:
    n = 200_000 if grid == "full" else 20_000
    ds = MOMENT_GRID_DS if grid == "full" else (2, 50)
    records = []
    for d in ds:
        for theta in MOMENT_GRID_THETAS:
            rep = verify_cone_moments(d, theta, n, RngStream(seed))
            records.append(CheckRecord(
                name=f"cone_moments[d={d},theta={theta:.4g}]",
                passed=rep.passed,
                z_score=max(rep.z_scores.values()),
                n=n,
                detail=(f"second {rep.empirical_second:.6g} vs exact "
                        f"{rep.analytic_second_exact:.6g} (bound {rep.analytic_second_bound:.6g})"),
            ))
    return records


def _bound_grid_check() -> CheckRecord:
    rng = RngStream(7)
    worst = -np.inf
    for d in (2, 3, 10, 100, 1000, 10_000, 100_000, 1_000_000, 5, 50):
        for theta in np.linspace(0.0, HALF_PI, 10):
            for _ in range(20):
                # Only (m_hat.a) and ||a|| enter; a 2-D frame covers the grid.
                ma_frac = rng.uniforms(1)[0]
                a_norm = 0.1 + 10.0 * rng.uniforms(1)[0]
                a = np.array([ma_frac, sqrt(max(1.0 - ma_frac**2, 0.0))]) * a_norm
                mh = np.array([1.0, 0.0])
                exact = cone_second_moment_exact(a, mh, float(theta), d)
                bound = cone_second_moment_bound(a, mh, float(theta), d)
                worst = max(worst, exact - bound * (1.0 + 1e-12))
    return CheckRecord(name="second_moment_exact_le_bound_grid", passed=worst <= 0.0,
                       detail=f"max(exact - bound) = {worst:.3g}")


def _vanilla_checks(grid: str, seed: int) -> list[CheckRecord]:
    n = 200_000 if grid == "full" else 20_000
    rep = verify_vanilla_moments(1000 if grid == "full" else 100, n, RngStream(seed))
    ratio = rep.z_scores["second_vs_2d_bound"]
    return [CheckRecord(name="vanilla_moments", passed=rep.passed,
                        z_score=max(v for k, v in rep.z_scores.items()
                                    if k != "second_vs_2d_bound"),
                        n=n,
                        detail=f"second/bound = {ratio:.3f} (expected ~0.5)")]


def _sampling_checks(grid: str, seed: int) -> list[CheckRecord]:
    records = []
    n = 10_000
    ds = (100, 10_000) if grid == "full" else (100, 2500)
    medians = axis_overlap_medians(ds, n, RngStream(seed))
    for d, med in medians.items():
        records.append(CheckRecord(name=f"axis_overlap_median[d={d}]",
                                   passed=med <= 3.0 / sqrt(d), n=n,
                                   detail=f"median {med:.5f} vs 3/sqrt(d) {3.0 / sqrt(d):.5f}"))
    ratio = medians[ds[0]] / medians[ds[1]]
    expect = sqrt(ds[1] / ds[0])
    records.append(CheckRecord(name="axis_overlap_median_scaling",
                               passed=0.7 * expect <= ratio <= 1.3 * expect,
                               detail=f"ratio {ratio:.2f} vs sqrt scaling {expect:.2f}"))
    for d, limit in ((10, None), (100, 0.1), (1000, 1e-3)):
        tail = exact_angle_tail(d, 1.0, 0.9, n, RngStream(seed + d))
        ok = tail["phat"] <= tail["bound"]
        if limit is not None:
            ok = ok and tail["phat"] < limit
        records.append(CheckRecord(name=f"exact_angle_tail[d={d}]", passed=ok, n=n,
                                   detail=f"P(gamma<=0.9) = {tail['phat']:.2e}, bound {tail['bound']:.2e}"))
    agree = fast_vs_exact_angle_means(10_000 if grid == "full" else 2000, 1.35,
                                      10_000, RngStream(seed + 1))
    records.append(CheckRecord(name="fast_vs_exact_angle_agreement",
                               passed=abs(agree["fast"] - agree["exact"]) < 0.01,
                               detail=f"fast {agree['fast']:.5f} vs exact {agree['exact']:.5f}"))
    return records


def _descent_checks(grid: str, seed: int) -> list[CheckRecord]:
    from .problems import make_paper_quadratic

    n = 100_000 if grid == "full" else 10_000
    d = 200
    prob = make_paper_quadratic(d, init_seed=seed)
    records = []
    rng = RngStream(seed)
    x = prob.x0.copy()
    a = prob.objective.grad(x)
    a_hat = a / np.linalg.norm(a)
    w = sample_orthogonal_complement(a_hat, rng)
    for cos2 in (0.0, 0.25, 1.0):
        c = sqrt(cos2)
        m_hat = c * a_hat + sqrt(1.0 - cos2) * w
        m_hat /= np.linalg.norm(m_hat)
        for theta in (0.0, 1.3, HALF_PI):
            rep = verify_descent(prob.objective, x, m_hat, theta, None, n,
                                 RngStream(seed + int(100 * cos2) + int(10 * theta)),
                                 ell=prob.smoothness, sigma=prob.objective.sigma)
            records.append(CheckRecord(
                name=f"descent[cos2={cos2:g},theta={theta:.4g}]",
                passed=rep.passed, z_score=max(rep.z_scores.values()), n=n,
                detail=(f"E f+ {rep.empirical_mean:.6g} vs rhs {rep.rhs:.6g}"
                        + (f", exact {rep.exact_expected:.6g}" if rep.exact_expected is not None else "")),
            ))
    records.append(CheckRecord(
        name="theta_star_consistency",
        passed=all(theta_star_consistent(c, d)
                   for d in (10, 100, 1000, 10_000)
                   for c in (0.0, (d + 4) / d**2 * 0.5, (d + 4) / d**2,
                             (d + 4) / d**2 * 2.0, 0.1, 1.0)),
        detail="closed-form decrease comparison matches the exploit/explore rule",
    ))
    return records


def run_checks(module: str = "all", grid: str = "full", seed: int = 2024) -> list[CheckRecord]:
    """Run a named verification suite; returns one record per check."""
    if grid not in ("small", "full"):
        raise ValueError("grid must be 'small' or 'full'")
    suites = {
        "estimator": lambda: _vanilla_checks(grid, seed),
        "sampling": lambda: _sampling_checks(grid, seed),
        "analysis": lambda: _moment_checks(grid, seed) + [_bound_grid_check()]
        + _descent_checks(grid, seed),
    }
    if module == "all":
        records = []
        for name in ("estimator", "sampling", "analysis"):
            records.extend(suites[name]())
        return records
    if module not in suites:
        raise ValueError(f"unknown verify module {module!r}; have {sorted(suites)} or 'all'")
    return suites[module]()
