//! The conjugating homeomorphism `φ` between `Λ_c` and a target set, truncated at depth `N`.
//!
//! `φ_N` is the monotone piecewise-linear map through the knots
//! `(a_{N,j}, a*_{N,j})` and `(b_{N,j}, b*_{N,j})`. Every endpoint of every
//! shallower level is among these knots, so across each gap `(c_{n,j}, d_{n,j})` the
//! map is exactly the affine map onto `(c*_{n,j}, d*_{n,j})`, and outside the hull it
//! is the unit-slope translation matching the hull endpoints. Inside a level-`N`
//! segment it interpolates linearly, which stays within one level-`N` target
//! segment of the limiting map.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::interval::{IntervalAddress, IntervalSystem};
use crate::quadratic::QuadraticParams;

/// Strictly increasing piecewise-linear map of the real line with unit-slope tails.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotonePLMap {
    xs: Vec<f64>,
    ys: Vec<f64>,
    err_bound: f64,
}

/// Index of the piece containing `v` in sorted `knots`: `Ok(i)` on an exact knot hit,
/// otherwise `Err(i)` with `knots[i-1] < v < knots[i]`.
fn locate(knots: &[f64], v: f64) -> std::result::Result<usize, usize> {
    let i = knots.partition_point(|&k| k < v);
    if i < knots.len() && knots[i] == v {
        Ok(i)
    } else {
        Err(i)
    }
}

fn interpolate(from: &[f64], to: &[f64], v: f64) -> f64 {
    let last = from.len() - 1;
    match locate(from, v) {
        Ok(i) => to[i],
        Err(0) => (v + (to[0] - from[0])).min(to[0]),
        Err(i) if i > last => (v + (to[last] - from[last])).max(to[last]),
        Err(i) => {
            let (x0, x1, y0, y1) = (from[i - 1], from[i], to[i - 1], to[i]);
            if y1 - y0 == x1 - x0 {
                // Unit slope: a pure translation, exact when the shift is zero.
                return (v + (y0 - x0)).clamp(y0, y1);
            }
            let t = (v - x0) / (x1 - x0);
            (y0 + t * (y1 - y0)).clamp(y0, y1)
        }
    }
}

impl MonotonePLMap {
    pub fn from_knots(xs: Vec<f64>, ys: Vec<f64>, err_bound: f64) -> Result<Self> {
        if xs.is_empty() || xs.len() != ys.len() {
            return Err(Error::Domain("knot lists must be nonempty and of equal length".into()));
        }
        let increasing = |v: &[f64]| v.iter().all(|x| x.is_finite()) && v.windows(2).all(|w| w[0] < w[1]);
        if !increasing(&xs) || !increasing(&ys) {
            return Err(Error::Domain("knots must be finite and strictly increasing in both coordinates".into()));
        }
        Ok(Self { xs, ys, err_bound })
    }

    pub fn eval(&self, x: f64) -> f64 {
        interpolate(&self.xs, &self.ys, x)
    }

    pub fn eval_inverse(&self, y: f64) -> f64 {
        interpolate(&self.ys, &self.xs, y)
    }

    pub fn knots(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.xs.iter().copied().zip(self.ys.iter().copied())
    }

    pub fn knot_count(&self) -> usize {
        self.xs.len()
    }

    /// Index of the knot whose image is exactly `y`.
    pub fn knot_with_value(&self, y: f64) -> Option<usize> {
        locate(&self.ys, y).ok()
    }

    /// Translation applied left of the first knot.
    pub fn left_shift(&self) -> f64 {
        self.ys[0] - self.xs[0]
    }

    /// Translation applied right of the last knot.
    pub fn right_shift(&self) -> f64 {
        self.ys[self.ys.len() - 1] - self.xs[self.xs.len() - 1]
    }

    /// Certified sup-distance to the limiting homeomorphism: the longest level-`N`
    /// target segment.
    pub fn err_bound(&self) -> f64 {
        self.err_bound
    }
}

/// `φ_N` pairing `model` and `target` address-for-address at level `depth`.
pub fn build_phi(model: &IntervalSystem, target: &IntervalSystem, depth: usize) -> Result<MonotonePLMap> {
    if model.depth() < depth || target.depth() < depth {
        return Err(Error::Domain(format!(
            "depth {depth} exceeds model depth {} or target depth {}",
            model.depth(),
            target.depth()
        )));
    }
    let xs = model.endpoints(depth)?;
    let ys = target.endpoints(depth)?;
    MonotonePLMap::from_knots(xs, ys, target.max_segment_length(depth)?)
}

/// `F*(y) = φ(F_c(φ⁻¹(y)))`, composed pointwise.
pub fn eval_fstar(map: &MonotonePLMap, params: &QuadraticParams, y: f64) -> f64 {
    map.eval(params.step(map.eval_inverse(y)))
}

/// `φ_N` together with the map it conjugates.
///
/// `F_c` sends every endpoint of `C_N` to an endpoint of `C_{N-1}`, which is again a
/// knot. On knots `F*` is evaluated through this combinatorial action, so orbits of
/// target endpoints pick up no rounding error. Everywhere else it is composed.
#[derive(Debug, Clone)]
pub struct ConjugateMap {
    phi: MonotonePLMap,
    params: QuadraticParams,
    knot_image: Vec<usize>,
}

impl ConjugateMap {
    /// `model` must be the system of `params` as built by [`crate::build_model_system`].
    pub fn new(params: QuadraticParams, model: &IntervalSystem, target: &IntervalSystem, depth: usize) -> Result<Self> {
        let hull = params.require_certified().map(|p| (-p, p))?;
        if (model.hull().lo, model.hull().hi) != hull {
            return Err(Error::Domain(format!(
                "model hull [{}, {}] is not [-p, p] for c = {}",
                model.hull().lo,
                model.hull().hi,
                params.c()
            )));
        }
        let phi = build_phi(model, target, depth)?;
        let knot_image = endpoint_images(depth);
        Ok(Self { phi, params, knot_image })
    }

    pub fn phi(&self) -> &MonotonePLMap {
        &self.phi
    }

    pub fn params(&self) -> &QuadraticParams {
        &self.params
    }

    pub fn eval(&self, y: f64) -> f64 {
        match self.phi.knot_with_value(y) {
            Some(i) => self.phi.ys[self.knot_image[i]],
            None => eval_fstar(&self.phi, &self.params, y),
        }
    }
}

/// Knot index of `F_c(knot i)` for the level-`depth` endpoints of the model system.
///
/// Level `N` lists the negative preimages of level `N-1` in reverse, then the positive
/// ones. Segment `j` on the negative side maps onto segment `2^{N-1} - 1 - j` with its
/// orientation flipped; on the positive side segment `j` maps onto `j - 2^{N-1}`.
/// Level-`(N-1)` segment `m` has endpoints at knots `4m` and `4m + 3`.
fn endpoint_images(depth: usize) -> Vec<usize> {
    if depth == 0 {
        return vec![1, 1];
    }
    let half = 1usize << (depth - 1);
    let mut image = Vec::with_capacity(4 * half);
    for j in 0..2 * half {
        let (lo, hi) = if j < half {
            let m = half - 1 - j;
            (4 * m + 3, 4 * m)
        } else {
            let m = j - half;
            (4 * m, 4 * m + 3)
        };
        image.extend([lo, hi]);
    }
    image
}

/// A point whose image left its paired target segment or gap.
#[derive(Debug, Clone, PartialEq)]
pub struct MappingViolation {
    pub address: IntervalAddress,
    pub in_gap: bool,
    pub x: f64,
    pub image: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct MappingReport {
    pub checked: usize,
    pub violations: Vec<MappingViolation>,
}

/// Samples every segment and gap of every level up to the map's depth and checks that
/// `φ_N` sends it into the same-address target segment or gap.
pub fn segment_mapping_check(
    map: &MonotonePLMap,
    model: &IntervalSystem,
    target: &IntervalSystem,
    depth: usize,
    samples: usize,
    seed: u64,
) -> Result<MappingReport> {
    if model.depth() < depth || target.depth() < depth {
        return Err(Error::Domain(format!("depth {depth} exceeds a system depth")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = MappingReport::default();
    for n in 0..=depth {
        let pieces = model
            .level(n)?
            .iter()
            .zip(target.level(n)?)
            .map(|(s, t)| (false, (s.lo, s.hi), (t.lo, t.hi)))
            .chain(model.gaps(n)?.iter().zip(target.gaps(n)?).map(|(g, t)| (true, (g.lo, g.hi), (t.lo, t.hi))));
        let per_level = model.level(n)?.len();
        for (k, (in_gap, (lo, hi), (tlo, thi))) in pieces.enumerate() {
            let index = if in_gap { k - per_level } else { k };
            let points = [lo, hi].into_iter().chain((0..samples).map(|_| rng.gen_range(lo..=hi)));
            for x in points {
                report.checked += 1;
                let image = map.eval(x);
                if !(tlo <= image && image <= thi) {
                    report.violations.push(MappingViolation {
                        address: IntervalAddress::new(n as u32, index as u64 + 1)?,
                        in_gap,
                        x,
                        image,
                    });
                }
            }
        }
    }
    Ok(report)
}
