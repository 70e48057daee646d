//! Invariant suites run by `cantor verify`.
//!
//! Suites: 1 fixed points, 2 escape gap and expansion, 3 model structure,
//! 4 endpoint orbits, 5 target refinement, 6 conjugating map, 7 conjugated map,
//! 8 bounded/escaped dichotomy, 9 escape-time demo.

use std::fmt;

use cantor_core::conjugacy::segment_mapping_check;
use cantor_core::orbit::{classify_grid, cobweb_trace, escape_grid, iterate, mandelbrot_escape, EscapeTime, Region};
use cantor_core::quadratic::fixed_points;
use cantor_core::target::build_target_system;
use cantor_core::{
    build_model_system, build_phi, eval_fstar, BuildMode, CantorSpec, ConjugateMap, IntervalSystem, Outcome,
    QuadraticParams, Result,
};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub suite: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{verdict} [{}] {}: {}", self.suite, self.name, self.detail)
    }
}

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub c: f64,
    pub depth: usize,
    pub spec: CantorSpec,
    pub mode: BuildMode,
}

struct Suite {
    id: u8,
    checks: Vec<Check>,
}

impl Suite {
    fn new(id: u8) -> Self {
        Self { id, checks: Vec::new() }
    }

    fn check(&mut self, name: &'static str, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check { suite: self.id, name, passed, detail: detail.into() });
    }
}

/// Larger root of `x² - x + c`, written as `1/2 + y` with `y² = 1/4 - c` solved by
/// bisection. The completed square keeps the root simple away from `c = 1/4`, where
/// bisection on `x² - x + c` itself stalls near the double root.
fn bisect_fixed_point(c: f64) -> f64 {
    let target = 0.25 - c;
    let (mut lo, mut hi) = (0.0, 1.0 + target);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid * mid > target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 + 0.5 * (lo + hi)
}

fn fixed_point_suite(cfg: &VerifyConfig) -> Suite {
    let mut s = Suite::new(1);
    let mut cs = vec![0.25, -1.0, -3.0];
    if cfg.c <= 0.25 && !cs.contains(&cfg.c) {
        cs.push(cfg.c);
    }
    for c in cs {
        let Ok((q, p)) = fixed_points(c) else {
            s.check("fixed point exists", false, format!("c = {c}"));
            continue;
        };
        let residual = (p * p + c - p).abs().max((q * q + c - q).abs());
        s.check("fixed point residual", residual <= 1e-12 * p.abs().max(1.0), format!("c = {c}: {residual:e}"));
        let oracle = (p - bisect_fixed_point(c)).abs();
        s.check("fixed point matches bisection", oracle <= 1e-10, format!("c = {c}: difference {oracle:e}"));
    }
    s.check("double root at c = 1/4", fixed_points(0.25) == Ok((0.5, 0.5)), "p = q = 0.5");
    s
}

fn expansion_suite(params: &QuadraticParams) -> Suite {
    let mut s = Suite::new(2);
    let nonempty_ok = (0..=100).all(|k| {
        let c = -2.5 + 0.01 * k as f64;
        QuadraticParams::new(c).map(|f| f.gap_a0().is_some() == (c < -2.0)).unwrap_or(false)
    });
    s.check("escape gap exists exactly for c < -2", nonempty_ok, "101 values of c in [-2.5, -1.5]");
    let Some(p) = params.p() else {
        s.check("fixed point exists", false, format!("c = {}", params.c()));
        return s;
    };
    s.check("lambda = 2s", params.lambda() == 2.0 * params.half_gap(), format!("lambda = {}", params.lambda()));
    if let Some(gap) = params.gap_a0() {
        let edge = (params.eval(gap.hi) + p).abs();
        s.check("escape gap edges map to -p", edge <= 1e-12 * p.max(1.0), format!("|F(s) + p| = {edge:e}"));
        let worst = (0..=1000)
            .map(|k| gap.hi + (p - gap.hi) * k as f64 / 1000.0)
            .map(|x| (2.0 * x).abs() - params.lambda())
            .fold(f64::INFINITY, f64::min);
        s.check("|F'| >= lambda off the gap", worst >= -1e-12, format!("min |2x| - lambda = {worst:e}"));
    }
    let monotone = (1..=200).all(|k| {
        let t = 0.05 * k as f64;
        params.eval(p + t) > p + t && params.eval(-p - t) > p
    });
    s.check("orbits leaving the hull increase", monotone, "200 points on each side");
    s
}

fn model_suite(params: &QuadraticParams, model: &IntervalSystem, depth: usize) -> Suite {
    let mut s = Suite::new(3);
    let p = params.p().unwrap_or(f64::NAN);
    let counts = (0..=depth).all(|n| model.level(n).map(|l| l.len() == 1 << n).unwrap_or(false));
    s.check("level n holds 2^n segments", counts, format!("n <= {depth}"));
    s.check("nested and disjoint", model.validate().is_ok(), format!("{:?}", model.validate().err()));
    let lambda = params.lambda();
    let worst = (0..=depth)
        .map(|n| model.max_segment_length(n).unwrap_or(f64::INFINITY) / (2.0 * p * lambda.powi(-(n as i32))))
        .fold(0.0, f64::max);
    s.check("max length <= 2p lambda^-n", worst <= 1.0 + 1e-9, format!("worst ratio {worst}"));
    let symmetric = (0..=depth).all(|n| {
        let l = model.level(n).unwrap_or_default();
        (0..l.len()).all(|j| l[j].lo == -l[l.len() - 1 - j].hi)
    });
    s.check("symmetric about 0", symmetric, "bit-exact mirror images");
    s
}

fn endpoint_orbit_suite(params: &QuadraticParams, model: &IntervalSystem, depth: usize) -> Suite {
    let mut s = Suite::new(4);
    let p = params.p().unwrap_or(f64::NAN);
    let top = depth.min(12);
    let mut worst: f64 = 0.0;
    for n in 0..=top {
        for e in model.endpoints(n).unwrap_or_default() {
            let mut x = e;
            for _ in 0..n {
                x = params.step(x);
            }
            worst = worst.max((x.abs() - p).abs());
        }
    }
    s.check("F^n(level-n endpoint) lands on +-p", worst <= 1e-6, format!("n <= {top}, worst distance {worst:e}"));
    s
}

fn target_suite(cfg: &VerifyConfig, target: &IntervalSystem) -> Suite {
    let mut s = Suite::new(5);
    let depth = cfg.depth;
    s.check("nested and disjoint", target.validate().is_ok(), format!("{:?}", target.validate().err()));
    let positive = target.levels().iter().flatten().all(|seg| seg.length() > 0.0);
    s.check("positive lengths", positive, "no degenerate segment");
    if cfg.mode == BuildMode::Strict {
        let width = target.hull().length();
        let worst = (0..=depth)
            .map(|n| target.max_segment_length(n).unwrap_or(f64::INFINITY) / ((2.0f64 / 3.0).powi(n as i32) * width))
            .fold(0.0, f64::max);
        s.check("max length <= (2/3)^n (b - a)", worst <= 1.0 + 1e-12, format!("worst ratio {worst}"));
    }
    let probe = depth + 8;
    let endpoints_in =
        (0..=depth).all(|n| target.endpoints(n).unwrap_or_default().iter().all(|&e| cfg.spec.membership(e, probe)));
    s.check("stored endpoints belong to the target", endpoints_in, format!("membership at depth {probe}"));
    let gaps_out = (1..=depth).all(|n| {
        target.gaps(n).unwrap_or_default().iter().all(|g| {
            let w = g.width();
            [g.lo + 0.25 * w, g.midpoint(), g.hi - 0.25 * w].iter().all(|&x| !cfg.spec.membership(x, probe))
        })
    });
    s.check("gap midpoints and quartiles are outside", gaps_out, format!("membership at depth {probe}"));
    s
}

fn phi_suite(params: &QuadraticParams, model: &IntervalSystem, target: &IntervalSystem, depth: usize) -> Result<Suite> {
    let mut s = Suite::new(6);
    let phi = build_phi(model, target, depth)?;
    let next = build_phi(model, target, depth + 1)?;
    let p = params.p().unwrap_or(1.0);
    let bound = target.max_segment_length(depth)?;
    let n = 100_000;
    let (mut monotone, mut round_trip, mut stability): (bool, f64, f64) = (true, 0.0, 0.0);
    let mut prev = f64::NEG_INFINITY;
    for i in 0..n {
        let x = -p - 1.0 + (2.0 * p + 2.0) * i as f64 / (n - 1) as f64;
        let y = phi.eval(x);
        monotone &= y > prev;
        prev = y;
        round_trip = round_trip.max((phi.eval_inverse(y) - x).abs() / x.abs().max(1.0));
        stability = stability.max((y - next.eval(x)).abs());
    }
    s.check("strictly increasing", monotone, format!("{n}-point grid on [-p-1, p+1]"));
    let knots_exact = (0..=depth).all(|k| {
        let (xs, ys) = (model.endpoints(k).unwrap_or_default(), target.endpoints(k).unwrap_or_default());
        xs.iter().zip(&ys).all(|(&x, &y)| phi.eval(x) == y && phi.eval_inverse(y) == x)
    });
    s.check("knots map exactly", knots_exact, format!("every endpoint of levels <= {depth}"));
    s.check("round trip", round_trip <= 1e-12, format!("max relative error {round_trip:e}"));
    s.check("depth stability", stability <= bound, format!("sup |phi_N - phi_N+1| = {stability:e} <= {bound:e}"));
    let delta = model.min_gap_width(depth.max(1))?;
    let mut modulus: f64 = 0.0;
    for seg in model.level(depth)? {
        for k in 0..4 {
            let x = seg.lo + seg.length() * k as f64 / 4.0;
            modulus = modulus.max((phi.eval(x) - phi.eval((x + delta).min(seg.hi))).abs());
        }
    }
    s.check("modulus of continuity", modulus <= bound, format!("{modulus:e} <= {bound:e}"));
    let report = segment_mapping_check(&phi, model, target, depth.min(10), 2, 1)?;
    s.check(
        "segments and gaps map to their partners",
        report.violations.is_empty(),
        format!("{} points, {} violations", report.checked, report.violations.len()),
    );
    Ok(s)
}

fn conjugacy_suite(params: &QuadraticParams, f: &ConjugateMap, target: &IntervalSystem, depth: usize) -> Suite {
    let mut s = Suite::new(7);
    let hull = target.hull();
    let composed = eval_fstar(f.phi(), params, hull.hi);
    s.check("F*(b*) = b*", (composed - hull.hi).abs() <= 1e-9, format!("F*({}) = {composed}", hull.hi));
    let pre = f.eval(hull.lo);
    s.check("F*(a*) = b*", (pre - hull.hi).abs() <= 1e-9, format!("F*({}) = {pre}", hull.lo));
    let pinned = cobweb_trace(f, hull.hi, 3).map(|t| t.is_degenerate()).unwrap_or(false);
    s.check("cobweb at b* is pinned", pinned, "3 steps");

    let phi = f.phi();
    let lambda = params.lambda();
    let p = params.p().unwrap_or(f64::NAN);
    let horizon = depth.min(15) as i32;
    let mut worst: f64 = 0.0;
    for k in 0..=64 {
        let y0 = hull.lo + hull.length() * k as f64 / 64.0;
        let (mut y, mut x) = (y0, phi.eval_inverse(y0));
        for n in 0..=horizon {
            if !(x.abs() <= p) {
                break;
            }
            worst = worst.max((phi.eval_inverse(y) - x).abs() / (1e-6 * lambda.powi(n)));
            y = f.eval(y);
            x = params.step(x);
        }
    }
    s.check("orbits correspond under phi", worst <= 1.0, format!("n <= {horizon}, worst error / budget = {worst:e}"));
    s
}

fn dichotomy_suite(f: &ConjugateMap, target: &IntervalSystem, depth: usize) -> Suite {
    let mut s = Suite::new(8);
    let gap_levels = depth.min(5);
    let mut gaps_escape = true;
    let mut count = 0;
    for n in 1..=gap_levels {
        for g in target.gaps(n).unwrap_or_default() {
            count += 1;
            gaps_escape &= iterate(f, g.midpoint(), 200, false).escaped();
        }
    }
    s.check(
        "gap midpoints escape",
        gaps_escape,
        format!("{count} midpoints of levels <= {gap_levels}, 200 iterations"),
    );
    let end_levels = depth.min(8);
    let mut bounded = true;
    let mut count = 0;
    for n in 0..=end_levels {
        for e in target.endpoints(n).unwrap_or_default() {
            count += 1;
            bounded &= iterate(f, e, 25, false).outcome == Outcome::Bounded { iterations_run: 25 };
        }
    }
    s.check("endpoints stay bounded", bounded, format!("{count} endpoints of levels <= {end_levels}, 25 iterations"));
    let hull = target.hull();
    let below = classify_grid(f, hull.lo - 0.5 * hull.length(), hull.lo - 0.1 * hull.length(), 5, 50);
    s.check("points below the hull escape", below.iter().all(|(_, r)| r.escaped()), "5 points");
    let stable = classify_grid(f, hull.lo, hull.hi, 257, 60).iter().all(|(y, r)| match r.outcome {
        Outcome::Escaped { .. } => iterate(f, *y, 120, false).outcome == r.outcome,
        Outcome::Bounded { .. } => true,
    });
    s.check("escape verdicts are stable in max_iter", stable, "257 points, 60 vs 120 iterations");
    s
}

fn mandelbrot_suite() -> Suite {
    let mut s = Suite::new(9);
    s.check("c = 0 inside", mandelbrot_escape(0.0, 0.0, 1000, 2.0) == EscapeTime::Inside, "1000 iterations");
    s.check(
        "c = 1 escapes at 3",
        mandelbrot_escape(1.0, 0.0, 1000, 2.0) == EscapeTime::EscapedAt(3),
        "orbit 0, 1, 2, 5",
    );
    s.check("c = -1 inside", mandelbrot_escape(-1.0, 0.0, 1000, 2.0) == EscapeTime::Inside, "period 2");
    let far = (0..360).all(|k| {
        let t = (k as f64).to_radians();
        matches!(mandelbrot_escape(2.01 * t.cos(), 2.01 * t.sin(), 1000, 2.0), EscapeTime::EscapedAt(n) if n <= 2)
    });
    s.check("|c| > 2 escapes by iteration 2", far, "360 points on |c| = 2.01");
    let region = Region { re_min: -2.5, re_max: 1.0, im_min: -1.75, im_max: 1.75 };
    let same = escape_grid(&region, 64, 64, 128) == escape_grid(&region, 64, 64, 128);
    s.check("escape grid is deterministic", same, "64x64, two runs");
    s
}

/// Runs suites 1–9; construction errors (for example an uncertified `c`) abort.
pub fn run_suites(cfg: &VerifyConfig) -> Result<Vec<Check>> {
    let params = QuadraticParams::new(cfg.c)?;
    params.require_certified()?;
    let model = build_model_system(&params, cfg.depth + 1)?;
    let target = build_target_system(&cfg.spec, cfg.depth + 1, cfg.mode)?.system;
    let f = ConjugateMap::new(params, &model, &target, cfg.depth)?;

    let mut checks = Vec::new();
    checks.extend(fixed_point_suite(cfg).checks);
    checks.extend(expansion_suite(&params).checks);
    checks.extend(model_suite(&params, &model, cfg.depth).checks);
    checks.extend(endpoint_orbit_suite(&params, &model, cfg.depth).checks);
    checks.extend(target_suite(cfg, &target).checks);
    checks.extend(phi_suite(&params, &model, &target, cfg.depth)?.checks);
    checks.extend(conjugacy_suite(&params, &f, &target, cfg.depth).checks);
    checks.extend(dichotomy_suite(&f, &target, cfg.depth).checks);
    checks.extend(mandelbrot_suite().checks);
    Ok(checks)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_configuration_passes() {
        let cfg = VerifyConfig { c: -3.0, depth: 8, spec: CantorSpec::middle_thirds(), mode: BuildMode::Strict };
        let checks = run_suites(&cfg).unwrap();
        let failed: Vec<String> = checks.iter().filter(|c| !c.passed).map(ToString::to_string).collect();
        assert!(failed.is_empty(), "{failed:#?}");
        let suites: std::collections::BTreeSet<u8> = checks.iter().map(|c| c.suite).collect();
        assert_eq!(suites.into_iter().collect::<Vec<_>>(), (1..=9).collect::<Vec<_>>());
    }

    #[test]
    fn other_targets_pass() {
        for (spec, mode) in [
            (CantorSpec::affine_ifs2(0.3, 0.45), BuildMode::Strict),
            (CantorSpec::middle_alpha(0.5).with_hull(cantor_core::Segment::new(-2.0, 5.0)), BuildMode::Natural),
            (CantorSpec::fat(0.2, 0.5), BuildMode::Strict),
        ] {
            let cfg = VerifyConfig { c: -4.0, depth: 6, spec, mode };
            let failed: Vec<String> =
                run_suites(&cfg).unwrap().iter().filter(|c| !c.passed).map(ToString::to_string).collect();
            assert!(failed.is_empty(), "{failed:#?}");
        }
    }

    #[test]
    fn uncertified_parameter_is_a_regime_error() {
        let cfg = VerifyConfig { c: -2.05, depth: 4, spec: CantorSpec::middle_thirds(), mode: BuildMode::Strict };
        assert!(matches!(run_suites(&cfg), Err(cantor_core::Error::Regime(_))));
    }
}
