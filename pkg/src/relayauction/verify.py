"""Self-verification: oracle cross-checks, game-theoretic fuzzing, and the
qualitative trend suite.

Two levels: ``fast`` runs reduced scales for a quick health check; ``full``
runs every release criterion at production scale (the trend check alone
executes the complete default sweep). Each check returns a CheckResult; the
CLI turns failures into exit code 3, and the acceptance tests assert the
same functions one by one.
"""

from __future__ import annotations

import math
import os
import time
from dataclasses import dataclass, replace

import numpy as np

from .mechanisms import (
    ex_post_utility,
    non_ic_witness,
    run_mspoa,
    run_spoa,
    sample_deviations,
    truthful_bid,
    truthful_profile,
    StrategyProfile,
)
from .montecarlo import SweepConfig, render_csv, run_sweep
from .numerics import ToleranceSpec, lambert_w0, minimize_unimodal
from .scenario import ChannelConfig, GeometryConfig, ScenarioInstance, sample_instance
from .schedule import (
    SystemParams,
    cost_function,
    min_total_power,
    optimal_schedule,
    value_of_z,
    z_of_value,
)

_NEG_INV_E = -0.36787944117144233


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float


def _result(name: str, started: float, passed, detail: str) -> CheckResult:
    # bool() guards against numpy bools sneaking into JSON reports.
    return CheckResult(name, bool(passed), detail, time.perf_counter() - started)


def _default_jobs() -> int:
    return max(1, min(8, os.cpu_count() or 1))


def _oracle_bracket(z: float, params: SystemParams) -> tuple[float, float]:
    d, lam = params.d_bits_per_hz, params.lambda_w
    t_min = d / math.log2(1.0 + params.p_max_w / z)
    t_hi = max(10.0 * d / lam * (lam + z), 100.0 * d * math.log(2.0), 2.0 * t_min)
    g = lambda t: cost_function(t, z, params)
    while g(2.0 * t_hi) < g(t_hi):
        t_hi *= 2.0
    return t_min, t_hi


def oracle_schedule_cost(z: float, params: SystemParams) -> float:
    """Golden-section minimization of the cost over the feasible bracket;
    independent of the closed form it cross-checks."""
    t_min, t_hi = _oracle_bracket(z, params)
    tol = ToleranceSpec(abs_tol=1e-12, rel_tol=1e-9, max_iter=200)
    _, f_min = minimize_unimodal(lambda t: cost_function(t, z, params), t_min, t_hi, tol)
    return f_min


def check_oracle_equivalence(n_z: int = 200) -> CheckResult:
    t0 = time.perf_counter()
    zs = np.logspace(-4.0, 4.0, n_z)
    worst = 0.0
    for lam in (0.1, 1.0, 10.0, 100.0):
        for p_max in (1.0, 10.0):
            params = SystemParams(lambda_w=lam, p_max_w=p_max)
            for z in zs:
                closed = optimal_schedule(float(z), params).cost_ws
                brute = oracle_schedule_cost(float(z), params)
                worst = max(worst, abs(brute - closed) / closed)
    elapsed = time.perf_counter() - t0
    passed = worst <= 1e-6 and elapsed < 10.0
    return _result(
        "oracle-equivalence",
        t0,
        passed,
        f"{n_z} z-points x 4 lambdas x 2 caps, worst rel cost err {worst:.3e}, {elapsed:.2f}s",
    )


def check_lambert_residuals(n: int = 1000) -> CheckResult:
    t0 = time.perf_counter()
    rng = np.random.default_rng(1848)
    offsets = 10.0 ** rng.uniform(-9.0, math.log10(1e6 - _NEG_INV_E), size=n - 8)
    xs = list(_NEG_INV_E + offsets)
    xs += [_NEG_INV_E, _NEG_INV_E + 1e-12, _NEG_INV_E + 1e-9, _NEG_INV_E + 1e-7, 0.0, 1.0, 2.718281828459045, 1e6]
    worst = 0.0
    for x in xs:
        w = lambert_w0(float(x))
        resid = abs(w * math.exp(w) - x) / max(1.0, abs(x))
        worst = max(worst, resid)
        if w < -1.0:
            return _result("lambert-residuals", t0, False, f"w < -1 at x={x}")
    passed = worst <= 1e-9
    return _result(
        "lambert-residuals", t0, passed, f"{len(xs)} samples, worst scaled residual {worst:.3e}"
    )


def _kink_z(params: SystemParams) -> float:
    # Bisect on the constraint-active flag; the kink is unique because the
    # unconstrained optimal power is increasing in z. The bracket is huge
    # since activation recedes like lambda*exp(-e*lambda/p_max) as the cap
    # tightens relative to the delay power.
    lo, hi = 1e-130, 1e10
    if optimal_schedule(lo, params).constraint_active or not optimal_schedule(hi, params).constraint_active:
        raise RuntimeError("cap activation not bracketed")
    for _ in range(200):
        mid = math.sqrt(lo * hi)
        if optimal_schedule(mid, params).constraint_active:
            hi = mid
        else:
            lo = mid
        if hi / lo < 1.0 + 1e-12:
            break
    return math.sqrt(lo * hi)


def check_monotonicity(n_grid: int = 200, n_roundtrip: int = 100) -> CheckResult:
    t0 = time.perf_counter()
    problems = []
    for lam in (0.1, 1.0, 10.0, 100.0):
        for p_max in (1.0, 10.0):
            params = SystemParams(lambda_w=lam, p_max_w=p_max)
            sols = [optimal_schedule(float(z), params) for z in np.logspace(-4, 4, n_grid)]
            ts = [s.t_star_s for s in sols]
            ps = [s.p_star_w for s in sols]
            vs = [s.cost_ws for s in sols]
            if not all(a < b for a, b in zip(ts, ts[1:])):
                problems.append(f"T* not strictly increasing at lam={lam}, p_max={p_max}")
            if not all(a <= b for a, b in zip(ps, ps[1:])):
                problems.append(f"P* decreasing at lam={lam}, p_max={p_max}")
            if not all(a < b for a, b in zip(vs, vs[1:])):
                problems.append(f"v not strictly increasing at lam={lam}, p_max={p_max}")
            zk = _kink_z(params)
            below = optimal_schedule(zk * (1.0 - 1e-8), params)
            above = optimal_schedule(zk * (1.0 + 1e-8), params)
            jump = abs(above.p_star_w - below.p_star_w)
            if jump > 1e-6:
                problems.append(f"P* jump {jump:.2e} across cap activation at lam={lam}, p_max={p_max}")
    params = SystemParams(lambda_w=1.0, p_max_w=10.0)
    rng = np.random.default_rng(3)
    worst_rt = 0.0
    for z in 10.0 ** rng.uniform(-3, 3, size=n_roundtrip):
        z_back = z_of_value(value_of_z(float(z), params), params)
        worst_rt = max(worst_rt, abs(z_back - z) / z)
    if worst_rt > 1e-6:
        problems.append(f"round-trip rel error {worst_rt:.2e}")
    return _result(
        "monotonicity-suites",
        t0,
        not problems,
        "; ".join(problems) if problems else f"monotonicity holds on {n_grid}-pt grids, round-trip err {worst_rt:.2e}",
    )


def _fuzz_setup(k: int, seed: int):
    geom = GeometryConfig()
    chan = ChannelConfig()
    n = 2 + k % 4
    lam = (0.1, 1.0, 10.0, 100.0)[(k // 4) % 4]
    p_max = (1.0, 10.0)[(k // 16) % 2]
    params = SystemParams(lambda_w=lam, p_max_w=p_max)
    rng = np.random.default_rng((seed, k))
    inst = sample_instance(n, geom, chan, params, rng)
    focal = 1 + k % n
    return inst, params, rng, focal


def _swap_bid(profile: StrategyProfile, bid) -> StrategyProfile:
    bids = tuple(b if b.bidder != bid.bidder else bid for b in profile.bids)
    return StrategyProfile(bids)


def check_mspoa_ic_fuzz(instances: int = 1000, deviations: int = 200) -> CheckResult:
    """Truthful bidding must dominate in MSPOA against arbitrary opponents."""
    t0 = time.perf_counter()
    violations = 0
    worst = 0.0
    for k in range(instances):
        inst, params, rng, focal = _fuzz_setup(k, seed=511)
        bids = [truthful_bid(inst.z0_w, params, 0)]
        for j in range(1, inst.n_candidates + 1):
            if j == focal:
                bids.append(truthful_bid(float(inst.z_w[j - 1]), params, j))
            else:
                bids.append(
                    sample_deviations(float(inst.z_w[j - 1]), params, 1, rng, bidder=j)[0]
                )
        profile = StrategyProfile(tuple(bids))
        u_truth = ex_post_utility(focal, run_mspoa(profile, inst, params), inst, params)
        z_focal = float(inst.z_w[focal - 1])
        for dev in sample_deviations(z_focal, params, deviations, rng, bidder=focal):
            u_dev = ex_post_utility(focal, run_mspoa(_swap_bid(profile, dev), inst, params), inst, params)
            gap = u_dev - u_truth
            worst = max(worst, gap)
            if gap > 1e-9:
                violations += 1
    elapsed = time.perf_counter() - t0
    passed = violations == 0 and elapsed < 120.0
    return _result(
        "mspoa-incentive-compatibility-fuzz",
        t0,
        passed,
        f"{instances} instances x {deviations} deviations, {violations} violations, "
        f"worst gain {worst:.2e} J, {elapsed:.1f}s",
    )


def check_spoa_ne_fuzz(instances: int = 1000, deviations: int = 200) -> CheckResult:
    """No profitable unilateral deviation in SPOA when opponents are truthful."""
    t0 = time.perf_counter()
    violations = 0
    worst = 0.0
    for k in range(instances):
        inst, params, rng, focal = _fuzz_setup(k, seed=1823)
        profile = truthful_profile(inst, params)
        u_truth = ex_post_utility(focal, run_spoa(profile, inst, params), inst, params)
        z_focal = float(inst.z_w[focal - 1])
        for dev in sample_deviations(z_focal, params, deviations, rng, bidder=focal):
            u_dev = ex_post_utility(focal, run_spoa(_swap_bid(profile, dev), inst, params), inst, params)
            gap = u_dev - u_truth
            worst = max(worst, gap)
            if gap > 1e-9:
                violations += 1
    elapsed = time.perf_counter() - t0
    passed = violations == 0 and elapsed < 120.0
    return _result(
        "spoa-nash-equilibrium-fuzz",
        t0,
        passed,
        f"{instances} instances x {deviations} deviations, {violations} violations, "
        f"worst gain {worst:.2e} J, {elapsed:.1f}s",
    )


def witness_instance() -> tuple[ScenarioInstance, SystemParams]:
    """Golden instance with z0=10, z=(1, 2) in plain units (sigma2=1)."""
    params = SystemParams(
        d_bits_per_hz=8.0, lambda_w=1.0, p_max_w=10.0, sigma2_w=1.0, a_r_m2=1.0, alpha=0.25
    )
    inst = ScenarioInstance(
        candidate_positions_m=np.array([[1.0, 1.0], [2.0, 2.0]]),
        h_s=0.1,
        h_i=np.array([4.0 / 3.0, 4.0 / 7.0]),
        h_si=np.array([4.0, 4.0]),
        alpha_tilde=np.array([1.0, 1.0]),
        z0_w=10.0,
        z_w=np.array([1.0, 2.0]),
    )
    return inst, params


def check_non_ic_demo() -> CheckResult:
    """Sign-level SPOA/MSPOA contrast on the witness profile.

    Candidate 1 is truthful at z=1; candidate 2 submits the off-manifold
    eps construction built on z=2 with eps1=1.5, which scores between v(1)
    and v(2) yet pays below candidate 1's break-even power.
    """
    t0 = time.perf_counter()
    inst, params = witness_instance()
    witness = non_ic_witness(2.0, params, eps1=1.5, bidder=2)
    profile = StrategyProfile(
        (
            truthful_bid(inst.z0_w, params, 0),
            truthful_bid(1.0, params, 1),
            witness,
        )
    )
    spoa = run_spoa(profile, inst, params)
    mspoa = run_mspoa(profile, inst, params)
    u_spoa = ex_post_utility(1, spoa, inst, params)
    u_mspoa = ex_post_utility(1, mspoa, inst, params)
    passed = (
        spoa.winner == 1
        and mspoa.winner == 1
        and u_spoa < 0.0
        and u_mspoa >= 0.0
    )
    return _result(
        "spoa-non-ic-witness",
        t0,
        passed,
        f"truthful winner utility: spoa {u_spoa:.4e} J (<0), mspoa {u_mspoa:.4e} J (>=0)",
    )


def _cell_index(cells):
    return {(c.mechanism, c.n, c.lambda_w): c for c in cells}


def _db_to_joules(db_mj: float) -> float:
    return 10.0 ** (db_mj / 10.0) / 1e3


def check_trends(trials: int = 5000, n_jobs: int | None = None) -> CheckResult:
    """Qualitative trend gates on the default sweep.

    (a) MSPOA mean duration strictly falls from n=1 to n=3 at the largest
        delay power, by at least 30 percent;
    (b) MSPOA mean energy at n=2 is at least 40 percent below n=1 at the
        smallest delay power;
    (c) |MSPOA - cooperative| gaps in duration and energy shrink with n
        (within two standard errors);
    (d) mean net harvest is non-increasing in n (within two standard errors)
        and non-decreasing in the delay power with a strict overall rise
        (cap-bound cells tie exactly, so ties are allowed step to step).
    """
    t0 = time.perf_counter()
    cfg = SweepConfig(trials=trials)
    cells = run_sweep(cfg, GeometryConfig(), ChannelConfig(), SystemParams(),
                      n_jobs=_default_jobs() if n_jobs is None else n_jobs)
    by = _cell_index(cells)
    lams = cfg.lambda_values_w
    ns = cfg.n_values
    problems = []

    lam_hi, lam_lo = max(lams), min(lams)
    t1, t2, t3 = (by[("mspoa", n, lam_hi)].mean_t_s for n in (1, 2, 3))
    if not (t1 > t2 > t3):
        problems.append(f"(a) duration not strictly decreasing: {t1:.3g}, {t2:.3g}, {t3:.3g}")
    cut = 1.0 - t3 / t1
    if cut < 0.30:
        problems.append(f"(a) duration cut n1->n3 {cut:.1%} < 30%")

    e1 = _db_to_joules(by[("mspoa", 1, lam_lo)].mean_energy_db_mj)
    e2 = _db_to_joules(by[("mspoa", 2, lam_lo)].mean_energy_db_mj)
    ecut = 1.0 - e2 / e1
    if ecut < 0.40:
        problems.append(f"(b) energy cut n1->n2 {ecut:.1%} < 40%")

    for lam in lams:
        for a, b in zip(ns, ns[1:]):
            ca, cb = by[("mspoa", a, lam)], by[("mspoa", b, lam)]
            ka, kb = by[("cooperative", a, lam)], by[("cooperative", b, lam)]
            gap_t_a = abs(ca.mean_t_s - ka.mean_t_s)
            gap_t_b = abs(cb.mean_t_s - kb.mean_t_s)
            se = math.sqrt(ca.std_err_t_s**2 + ka.std_err_t_s**2 + cb.std_err_t_s**2 + kb.std_err_t_s**2)
            if gap_t_b > gap_t_a + 2.0 * se:
                problems.append(f"(c) duration gap grew {a}->{b} at lam={lam}")
            se_j = lambda c: c.std_err_energy_db_mj * _db_to_joules(c.mean_energy_db_mj) * math.log(10.0) / 10.0
            gap_e_a = abs(_db_to_joules(ca.mean_energy_db_mj) - _db_to_joules(ka.mean_energy_db_mj))
            gap_e_b = abs(_db_to_joules(cb.mean_energy_db_mj) - _db_to_joules(kb.mean_energy_db_mj))
            se_e = math.sqrt(se_j(ca)**2 + se_j(ka)**2 + se_j(cb)**2 + se_j(kb)**2)
            if gap_e_b > gap_e_a + 2.0 * se_e:
                problems.append(f"(c) energy gap grew {a}->{b} at lam={lam}")

    for lam in lams:
        for a, b in zip(ns, ns[1:]):
            ca, cb = by[("mspoa", a, lam)], by[("mspoa", b, lam)]
            se = math.sqrt(ca.std_err_net_harvest_j**2 + cb.std_err_net_harvest_j**2)
            if cb.mean_net_harvest_j > ca.mean_net_harvest_j + 2.0 * se:
                problems.append(f"(d) harvest grew with n {a}->{b} at lam={lam}")
    for n in ns:
        hs = [by[("mspoa", n, lam)].mean_net_harvest_j for lam in sorted(lams)]
        if any(b < a - 1e-12 for a, b in zip(hs, hs[1:])):
            problems.append(f"(d) harvest fell with lambda at n={n}: {hs}")
        if not hs[-1] > hs[0]:
            problems.append(f"(d) harvest not strictly higher at lam={lam_hi} vs {lam_lo} for n={n}")

    elapsed = time.perf_counter() - t0
    if elapsed >= 300.0:
        problems.append(f"sweep runtime {elapsed:.0f}s exceeds 5 minutes")
    detail = "; ".join(problems) if problems else (
        f"duration cut {cut:.1%}, energy cut {ecut:.1%}, gap/harvest trends hold, {elapsed:.0f}s"
    )
    return _result("trend-reproduction", t0, not problems, detail)


def check_reproducibility(trials: int = 200) -> CheckResult:
    """Identical seeds give byte-identical CSV, for any worker count."""
    t0 = time.perf_counter()
    cfg = SweepConfig(
        n_values=(1, 2, 3), lambda_values_w=(1.0, 100.0), trials=trials,
        mechanisms=("cooperative", "spoa", "mspoa"),
    )
    geom, chan, params = GeometryConfig(), ChannelConfig(), SystemParams()
    first = render_csv(run_sweep(cfg, geom, chan, params, n_jobs=1))
    second = render_csv(run_sweep(cfg, geom, chan, params, n_jobs=1))
    parallel = render_csv(run_sweep(cfg, geom, chan, params, n_jobs=2))
    passed = first == second == parallel
    return _result(
        "sweep-reproducibility",
        t0,
        passed,
        f"{trials}-trial CSV identical across reruns and 1 vs 2 workers: {passed}",
    )


def checks_for_level(level: str):
    if level == "fast":
        return [
            lambda: check_oracle_equivalence(n_z=50),
            lambda: check_lambert_residuals(n=200),
            lambda: check_monotonicity(n_grid=60, n_roundtrip=25),
            lambda: check_mspoa_ic_fuzz(instances=100, deviations=40),
            lambda: check_spoa_ne_fuzz(instances=100, deviations=40),
            check_non_ic_demo,
            lambda: check_reproducibility(trials=40),
        ]
    if level == "full":
        return [
            check_oracle_equivalence,
            check_lambert_residuals,
            check_monotonicity,
            check_mspoa_ic_fuzz,
            check_spoa_ne_fuzz,
            check_non_ic_demo,
            check_trends,
            check_reproducibility,
        ]
    raise ValueError(f"unknown verification level {level!r}")


def run_level(level: str, emit=print) -> list[CheckResult]:
    results = []
    for check in checks_for_level(level):
        res = check()
        results.append(res)
        emit(f"{'PASS' if res.passed else 'FAIL'} {res.name}: {res.detail}")
    return results
