//! End-to-end acceptance checks, one PASS/FAIL line per criterion.
//!
//! Reference values come from oracles written here rather than from the library:
//! bisection for roots, plain `x * x + c` for forward orbits, and exact integer
//! ternary expansions for middle-thirds membership.

use std::process::Command;
use std::time::{Duration, Instant};

use cantor_cli::formats::{load_system, save_system, SystemDocument, SystemKind};
use cantor_cli::ppm;
use cantor_core::orbit::{iterate_target, mandelbrot_escape, EscapeTime, Region};
use cantor_core::target::build_target_system;
use cantor_core::{
    build_model_system, build_phi, BuildMode, CantorSpec, ConjugateMap, IntervalSystem, Outcome, QuadraticParams,
};

type Verdict = Result<String, String>;

type Criterion = (&'static str, Duration, fn() -> Verdict);

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn bisect(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    let rising = f(hi) > f(lo);
    for _ in 0..300 {
        let mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0) == rising {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Larger fixed point `1/2 + y`, `y² = 1/4 - c`, by bisection on `y`.
fn oracle_p(c: f64) -> f64 {
    let t = 0.25 - c;
    0.5 + bisect(0.0, 1.0 + t, |y| y * y - t)
}

/// Membership of `k / 3^n` in the middle-thirds set: no ternary digit 1, except a
/// final 1 (since `0.1 = 0.0222…`).
fn ternary_member(num: u128, den: u128) -> bool {
    if num > den {
        return false;
    }
    if num == den {
        return true;
    }
    let mut r = num;
    for _ in 0..80 {
        if r == 0 {
            return true;
        }
        let t = 3 * r;
        let digit = t / den;
        r = t % den;
        if digit == 1 && r != 0 {
            return false;
        }
    }
    true
}

/// Rounding allowance for "exact" lengths on the unit hull: a few ulps of 1. Endpoints
/// are doubles, so their differences cannot equal `3^-n` bit for bit.
const UNIT_ROUNDING: f64 = 4.0 * f64::EPSILON;

/// `round(x · 3^n)` when `x` is within `1e-9 / 3^n` of a multiple of `3^-n`.
fn triadic(x: f64, n: u32) -> Option<u128> {
    let scaled = x * 3f64.powi(n as i32);
    let k = scaled.round();
    ((scaled - k).abs() <= 1e-9 && k >= 0.0).then_some(k as u128)
}

fn timed(limit: Duration, f: impl FnOnce() -> Verdict) -> Verdict {
    let start = Instant::now();
    let detail = f()?;
    let elapsed = start.elapsed();
    ensure(elapsed < limit, format!("took {elapsed:?}, limit {limit:?}"))?;
    Ok(format!("{detail} ({elapsed:.2?})"))
}

fn fixed_points() -> Verdict {
    for c in [0.25, -1.0, -3.0] {
        let params = QuadraticParams::new(c).map_err(|e| e.to_string())?;
        let p = params.p().ok_or("no fixed point")?;
        ensure((params.eval(p) - p).abs() <= 1e-12, format!("c = {c}: |F(p) - p| too large"))?;
        ensure((p - oracle_p(c)).abs() <= 1e-10, format!("c = {c}: p = {p}, bisection {}", oracle_p(c)))?;
    }
    let quarter = QuadraticParams::new(0.25).unwrap().p();
    ensure(quarter == Some(0.5), format!("c = 1/4 gives {quarter:?}"))?;
    Ok("c in {1/4, -1, -3}".into())
}

fn escape_gap() -> Verdict {
    let p = oracle_p(-3.0);
    // F(s) = -p with s > 0.
    let s = bisect(0.0, p, |x| x * x - 3.0 + p);
    let gap = QuadraticParams::new(-3.0).unwrap().gap_a0().ok_or("A0 empty for c = -3")?;
    ensure(
        (gap.hi - s).abs() <= 1e-9 && (gap.lo + s).abs() <= 1e-9,
        format!("A0 = ({}, {}), oracle s = {s}", gap.lo, gap.hi),
    )?;
    ensure((gap.hi - 0.835).abs() < 5e-4, format!("s = {} is not 0.835 to drawing precision", gap.hi))?;
    for c in [-2.0, -1.0] {
        ensure(QuadraticParams::new(c).unwrap().gap_a0().is_none(), format!("A0 nonempty for c = {c}"))?;
    }
    Ok(format!("A0 = +-{s:.12}; empty for c = -2, -1"))
}

fn structure() -> Verdict {
    let params = QuadraticParams::new(-3.0).unwrap();
    let sys = build_model_system(&params, 20).map_err(|e| e.to_string())?;
    let p = oracle_p(-3.0);
    for n in 0..=20usize {
        let level = sys.level(n).unwrap();
        ensure(level.len() == 1 << n, format!("level {n} has {} segments", level.len()))?;
        ensure(level.windows(2).all(|w| w[0].hi < w[1].lo), format!("level {n} not disjoint"))?;
        if n > 0 {
            let parents = sys.level(n - 1).unwrap();
            let nested = level.iter().enumerate().all(|(j, s)| {
                let parent = parents[j / 2];
                parent.lo <= s.lo && s.hi <= parent.hi
            });
            ensure(nested, format!("level {n} not nested in level {}", n - 1))?;
        }
        let max = level.iter().map(|s| s.hi - s.lo).fold(0.0, f64::max);
        let bound = 2.0 * p * 1.6699f64.powi(-(n as i32)) * (1.0 + 1e-9);
        ensure(max <= bound, format!("level {n}: max length {max} > {bound}"))?;
    }
    Ok("c = -3, n <= 20".into())
}

fn endpoint_orbits() -> Verdict {
    let c = -3.0;
    let p = oracle_p(c);
    let sys = build_model_system(&QuadraticParams::new(c).unwrap(), 12).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for n in 0..=12 {
        for e in sys.endpoints(n).unwrap() {
            let mut x = e;
            for _ in 0..n {
                x = x * x + c;
            }
            worst = worst.max((x - p).abs().min((x + p).abs()));
        }
    }
    ensure(worst <= 1e-6, format!("worst distance to +-p is {worst:e}"))?;
    Ok(format!("n <= 12, worst distance {worst:.1e}"))
}

fn target_construction() -> Verdict {
    let t = build_target_system(&CantorSpec::middle_thirds(), 12, BuildMode::Strict).map_err(|e| e.to_string())?.system;
    for n in 0..=12u32 {
        let expected = 3f64.powi(-(n as i32));
        let den = 3u128.pow(n);
        for seg in t.level(n as usize).unwrap() {
            let len = seg.hi - seg.lo;
            ensure((len - expected).abs() <= UNIT_ROUNDING, format!("level {n}: length {len}, expected {expected}"))?;
            ensure(len <= (2.0f64 / 3.0).powi(n as i32), format!("level {n}: length above (2/3)^n"))?;
            for x in [seg.lo, seg.hi] {
                let k = triadic(x, n).ok_or(format!("endpoint {x} is not a multiple of 3^-{n}"))?;
                ensure(ternary_member(k, den), format!("endpoint {x} fails the ternary oracle"))?;
            }
        }
        for g in t.gaps(n as usize).unwrap() {
            let (a, b) =
                (triadic(g.lo, n).ok_or("gap end not triadic")?, triadic(g.hi, n).ok_or("gap end not triadic")?);
            // Midpoint (a + b) / (2 · 3^n), exactly.
            ensure(
                !ternary_member(a + b, 2 * den),
                format!("gap midpoint {} passes the ternary oracle", g.midpoint()),
            )?;
        }
    }
    Ok("middle thirds, depth 12".into())
}

fn pair(depth: usize) -> (QuadraticParams, IntervalSystem, IntervalSystem) {
    let params = QuadraticParams::new(-3.0).unwrap();
    let model = build_model_system(&params, depth).unwrap();
    let target = build_target_system(&CantorSpec::middle_thirds(), depth, BuildMode::Strict).unwrap().system;
    (params, model, target)
}

fn phi_properties() -> Verdict {
    let (params, model, target) = pair(13);
    let phi = build_phi(&model, &target, 12).map_err(|e| e.to_string())?;
    let next = build_phi(&model, &target, 13).map_err(|e| e.to_string())?;
    let p = params.p().unwrap();
    let bound = target.level(12).unwrap().iter().map(|s| s.hi - s.lo).fold(0.0, f64::max);
    ensure((bound - 3f64.powi(-12)).abs() <= UNIT_ROUNDING, "level-12 target length is not 3^-12")?;
    let n = 100_000;
    let mut prev = f64::NEG_INFINITY;
    let (mut round_trip, mut stability): (f64, f64) = (0.0, 0.0);
    for i in 0..n {
        let x = -p - 1.0 + (2.0 * p + 2.0) * i as f64 / (n - 1) as f64;
        let y = phi.eval(x);
        ensure(y > prev, format!("not strictly increasing at x = {x}"))?;
        prev = y;
        round_trip = round_trip.max((phi.eval_inverse(y) - x).abs() / x.abs().max(1.0));
        stability = stability.max((y - next.eval(x)).abs());
    }
    for k in 0..=12 {
        for (m, t) in model.level(k).unwrap().iter().zip(target.level(k).unwrap()) {
            ensure(phi.eval(m.lo) == t.lo && phi.eval(m.hi) == t.hi, format!("knot mismatch at level {k}"))?;
        }
    }
    ensure(round_trip <= 1e-12, format!("round trip error {round_trip:e}"))?;
    ensure(stability <= bound, format!("sup |phi_12 - phi_13| = {stability:e} > {bound:e}"))?;
    Ok(format!("round trip {round_trip:.1e}, depth change {stability:.1e} <= 3^-12"))
}

fn conjugacy_values() -> Verdict {
    let (params, model, target) = pair(12);
    let f = ConjugateMap::new(params, &model, &target, 12).map_err(|e| e.to_string())?;
    // phi^-1(1/2) = 0 (centre of the first gap), F(0) = -3, and left of the hull phi
    // translates by p, so F*(1/2) = p - 3. Likewise phi^-1(1/3) = s, F(s) = -p, phi(-p) = 0.
    let expected_half = oracle_p(-3.0) - 3.0;
    let cases = [(1.0, 1.0, 1e-9), (0.5, expected_half, 1e-6), (1.0 / 3.0, 0.0, 1e-6)];
    for (y, want, tol) in cases {
        let got = f.eval(y);
        ensure((got - want).abs() <= tol, format!("F*({y}) = {got}, expected {want}"))?;
    }
    ensure((f.eval(0.5) + 0.6972244).abs() <= 1e-6, "F*(1/2) differs from -0.6972244")?;
    Ok(format!("F*(1/2) = {}", f.eval(0.5)))
}

fn dichotomy() -> Verdict {
    let (params, model, target) = pair(12);
    let f = ConjugateMap::new(params, &model, &target, 12).map_err(|e| e.to_string())?;
    let mut gaps = 0;
    for n in 1..=5 {
        for g in target.gaps(n).unwrap() {
            gaps += 1;
            let r = iterate_target(&f, g.midpoint(), 200);
            ensure(r.escaped(), format!("gap midpoint {} reported {:?}", g.midpoint(), r.outcome))?;
        }
    }
    let mut ends = 0;
    for n in 0..=8 {
        for e in target.endpoints(n).unwrap() {
            ends += 1;
            let r = iterate_target(&f, e, 25);
            ensure(
                r.outcome == Outcome::Bounded { iterations_run: 25 },
                format!("endpoint {e} reported {:?}", r.outcome),
            )?;
        }
    }
    Ok(format!("{gaps} gap midpoints escaped, {ends} endpoints bounded"))
}

fn mandelbrot() -> Verdict {
    ensure(mandelbrot_escape(0.0, 0.0, 1000, 2.0) == EscapeTime::Inside, "c = 0 not inside")?;
    ensure(mandelbrot_escape(1.0, 0.0, 1000, 2.0) == EscapeTime::EscapedAt(3), "c = 1 not escaped at 3")?;
    ensure(mandelbrot_escape(-1.0, 0.0, 1000, 2.0) == EscapeTime::Inside, "c = -1 not inside")?;
    let region = Region { re_min: -2.5, re_max: 1.0, im_min: -1.75, im_max: 1.75 };
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().map_err(|e| e.to_string())?;
    let start = Instant::now();
    let image = pool.install(|| ppm::escape_image(&region, 200, 200, 256));
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(2), format!("single-threaded render took {elapsed:?}"))?;
    ensure(image.starts_with(b"P6\n200 200\n255\n"), "bad header")?;
    ensure(image.len() == 15 + 3 * 200 * 200, "bad length")?;
    ensure(image == ppm::escape_image(&region, 200, 200, 256), "render not deterministic")?;
    let pixel = |re: f64, im: f64| {
        let i = ((re - region.re_min) / 0.0175).floor() as usize;
        let j = ((region.im_max - im) / 0.0175).floor() as usize;
        let off = 15 + 3 * (j * 200 + i.min(199));
        [image[off], image[off + 1], image[off + 2]]
    };
    ensure(pixel(0.0, 0.0) == [0, 0, 0], "pixel at c = 0 is not black")?;
    ensure(pixel(1.0, 0.0) == ppm::PALETTE[3], "pixel nearest c = 1 lacks escape-3 shading")?;
    Ok(format!("200x200 single-threaded render in {elapsed:.2?}"))
}

fn serialization() -> Verdict {
    let params = QuadraticParams::new(-3.0).unwrap();
    let model =
        SystemDocument { kind: SystemKind::Model { c: -3.0 }, system: build_model_system(&params, 12).unwrap() };
    let spec = CantorSpec::middle_thirds();
    let target = SystemDocument {
        kind: SystemKind::Target { spec: spec.clone(), mode: BuildMode::Strict },
        system: build_target_system(&spec, 12, BuildMode::Strict).unwrap().system,
    };
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    for (name, doc) in [("model", &model), ("target", &target)] {
        let path = dir.path().join(format!("{name}.json"));
        let first = save_system(doc);
        std::fs::write(&path, &first).map_err(|e| e.to_string())?;
        let loaded =
            load_system(&std::fs::read_to_string(&path).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        ensure(&loaded == doc, format!("{name}: load(save(s)) differs from s"))?;
        ensure(save_system(&loaded) == first, format!("{name}: save(load(save(s))) changed bytes"))?;
    }
    let out = Command::new(env!("CARGO_BIN_EXE_cantor"))
        .args(["verify", "--c", "-3", "--depth", "12", "--target", "middle-thirds"])
        .output()
        .map_err(|e| e.to_string())?;
    let stdout = String::from_utf8_lossy(&out.stdout);
    ensure(out.status.code() == Some(0), format!("verify exited with {:?}:\n{stdout}", out.status.code()))?;
    for suite in 1..=9 {
        ensure(stdout.contains(&format!("PASS [{suite}]")), format!("verify output lacks suite {suite}"))?;
    }
    ensure(!stdout.contains("FAIL"), "verify reported a failure")?;
    Ok(format!("depth-12 round trips identical; verify: {}", stdout.lines().last().unwrap_or("")))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("fixed points", Duration::from_secs(1), fixed_points),
        ("escape gap A0", Duration::from_secs(1), escape_gap),
        ("model structure", Duration::from_secs(5), structure),
        ("endpoint orbits", Duration::from_secs(5), endpoint_orbits),
        ("target construction", Duration::from_secs(5), target_construction),
        ("phi properties", Duration::from_secs(10), phi_properties),
        ("conjugacy spot values", Duration::from_secs(1), conjugacy_values),
        ("bounded/escaped dichotomy", Duration::from_secs(10), dichotomy),
        ("escape-time demo", Duration::from_secs(60), mandelbrot),
        ("serialization and verify", Duration::from_secs(60), serialization),
    ];
    let mut failures = 0;
    for (i, (name, limit, check)) in criteria.into_iter().enumerate() {
        match timed(limit, check) {
            Ok(detail) => println!("PASS criterion {}: {name}: {detail}", i + 1),
            Err(why) => {
                failures += 1;
                println!("FAIL criterion {}: {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of 10 criteria passed", 10 - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
