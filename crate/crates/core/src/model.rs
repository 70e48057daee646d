//! The interval system of `Λ_c`, built backwards from `I = [-p, p]`.
//!
//! `C_{n+1} = F_c⁻¹(C_n) ∩ I`: every level-`n` segment has one preimage on each side
//! of the origin. The negative branch reverses order, so level `n + 1` lists the
//! negative preimages of level `n` in reverse followed by the positive preimages.
//! Square roots contract rounding error where forward iteration would amplify it.

use crate::error::{Error, Result};
use crate::interval::{Gap, IntervalSystem, Segment};
use crate::quadratic::QuadraticParams;
use crate::MAX_DEPTH;

/// The two closed preimages of `[u, v] ⊆ [-p, p]` under `F_c`.
pub fn preimage_interval(params: &QuadraticParams, seg: Segment) -> Result<(Segment, Segment)> {
    let hull =
        params.hull().ok_or_else(|| Error::Domain(format!("c = {} has no invariant interval [-p, p]", params.c())))?;
    if !(seg.lo <= seg.hi && hull.contains_segment(&seg)) {
        return Err(Error::Domain(format!(
            "[{}, {}] is not a subinterval of [{}, {}]",
            seg.lo, seg.hi, hull.lo, hull.hi
        )));
    }
    if seg.lo - params.c() < 0.0 {
        return Err(Error::Domain(format!("[{}, {}] reaches below c = {}", seg.lo, seg.hi, params.c())));
    }
    let (inner, outer) = ((seg.lo - params.c()).sqrt(), (seg.hi - params.c()).sqrt());
    Ok((Segment::new(-outer, -inner), Segment::new(inner, outer)))
}

/// `C₀ ⊇ … ⊇ C_depth` for `Λ_c`. Requires `λ > 1`.
pub fn build_model_system(params: &QuadraticParams, depth: usize) -> Result<IntervalSystem> {
    let p = params.require_certified()?;
    if depth > MAX_DEPTH {
        return Err(Error::Domain(format!("depth {depth} exceeds the maximum {MAX_DEPTH}")));
    }
    let mut system = IntervalSystem::from_hull(Segment::new(-p, p));
    for n in 0..depth {
        let current = system.level(n)?;
        let right =
            current.iter().map(|&s| preimage_interval(params, s).map(|(_, r)| r)).collect::<Result<Vec<_>>>()?;
        // Negative branch is the mirror image of the positive one.
        let next: Vec<Segment> =
            right.iter().rev().map(|r| Segment::new(-r.hi, -r.lo)).chain(right.iter().copied()).collect();
        system.refine(|addr, _| {
            let k = addr.offset();
            Ok(Gap::new(next[2 * k].hi, next[2 * k + 1].lo))
        })?;
    }
    Ok(system)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c3() -> (QuadraticParams, f64, f64) {
        let params = QuadraticParams::new(-3.0).unwrap();
        (params, params.p().unwrap(), params.half_gap())
    }

    #[test]
    fn preimage_of_hull_is_split_by_a0() {
        let (params, p, s) = c3();
        let (l, r) = preimage_interval(&params, Segment::new(-p, p)).unwrap();
        assert!((l.lo + p).abs() < 1e-15 && (l.hi + s).abs() < 1e-15);
        assert!((r.lo - s).abs() < 1e-15 && (r.hi - p).abs() < 1e-15);
        assert!((s - 0.8350).abs() < 1e-4);
    }

    #[test]
    fn preimage_of_left_half() {
        let (params, p, s) = c3();
        let (l, r) = preimage_interval(&params, Segment::new(-p, -s)).unwrap();
        assert!((r.lo - s).abs() < 1e-15);
        assert!((r.hi - (3.0 - s).sqrt()).abs() < 1e-15);
        assert!((r.hi - 1.4714).abs() < 1e-4);
        assert_eq!((l.lo, l.hi), (-r.hi, -r.lo));
    }

    #[test]
    fn preimage_of_fixed_point() {
        let (params, p, _) = c3();
        let (l, r) = preimage_interval(&params, Segment::new(p, p)).unwrap();
        assert!((l.lo + p).abs() < 1e-15 && (l.hi + p).abs() < 1e-15);
        assert!((r.lo - p).abs() < 1e-15 && (r.hi - p).abs() < 1e-15);
    }

    #[test]
    fn preimage_rejects_outside_hull() {
        let (params, p, _) = c3();
        assert!(matches!(preimage_interval(&params, Segment::new(0.0, p + 0.1)), Err(Error::Domain(_))));
        let no_hull = QuadraticParams::new(0.5).unwrap();
        assert!(preimage_interval(&no_hull, Segment::new(0.0, 0.1)).is_err());
    }

    #[test]
    fn shallow_levels() {
        let (params, p, s) = c3();
        let sys = build_model_system(&params, 2).unwrap();
        assert_eq!(sys.level(0).unwrap(), &[Segment::new(-p, p)]);
        let l1 = sys.level(1).unwrap();
        assert_eq!(l1.len(), 2);
        assert_eq!(l1[0].lo, -p);
        assert!((l1[0].hi + s).abs() < 1e-15 && (l1[1].lo - s).abs() < 1e-15);
        assert_eq!(sys.gaps(1).unwrap()[0], Gap::new(l1[0].hi, l1[1].lo));

        let l2 = sys.level(2).unwrap();
        let inner = (3.0 - s).sqrt();
        let outer = (3.0 + s).sqrt();
        assert!((inner - 1.47139).abs() < 1e-5 && (outer - 1.95831).abs() < 1e-5);
        let expected = [(-p, -outer), (-inner, -s), (s, inner), (outer, p)];
        for (seg, (lo, hi)) in l2.iter().zip(expected) {
            assert!((seg.lo - lo).abs() < 1e-15 && (seg.hi - hi).abs() < 1e-15);
        }
    }

    #[test]
    fn max_lengths() {
        let (params, p, s) = c3();
        let sys = build_model_system(&params, 2).unwrap();
        assert!((sys.max_segment_length(0).unwrap() - 2.0 * p).abs() < 1e-15);
        assert!((sys.max_segment_length(1).unwrap() - (p - s)).abs() < 1e-15);
        assert!((sys.max_segment_length(1).unwrap() - 1.4678).abs() < 1e-4);
        assert!((sys.max_segment_length(2).unwrap() - 0.6364).abs() < 1e-4);
        assert!(matches!(sys.max_segment_length(3), Err(Error::Domain(_))));
    }

    #[test]
    fn symmetric_about_origin() {
        let (params, ..) = c3();
        let sys = build_model_system(&params, 10).unwrap();
        for level in sys.levels() {
            for (a, b) in level.iter().zip(level.iter().rev()) {
                assert_eq!(a.lo, -b.hi);
                assert_eq!(a.hi, -b.lo);
            }
        }
    }

    #[test]
    fn uncertified_parameters_rejected() {
        let params = QuadraticParams::new(-2.05).unwrap();
        assert!(matches!(build_model_system(&params, 3), Err(Error::Regime(_))));
        let params = QuadraticParams::new(-3.0).unwrap();
        assert!(matches!(build_model_system(&params, MAX_DEPTH + 1), Err(Error::Domain(_))));
    }

    #[test]
    fn depth_zero_is_hull() {
        let (params, p, _) = c3();
        let sys = build_model_system(&params, 0).unwrap();
        assert_eq!(sys.depth(), 0);
        assert_eq!(sys.hull(), Segment::new(-p, p));
    }
}
