//! Orbit classification, cobweb traces and escape-time grids.
//!
//! Escape is decided by a sound radius test: once an orbit of `F_c` leaves `[-p, p]`
//! it increases monotonically to infinity. `Bounded` is a finite-horizon verdict:
//! the orbit stayed inside for the iterations that were run.

use rayon::prelude::*;

use crate::conjugacy::ConjugateMap;
use crate::quadratic::QuadraticParams;

/// A map under iteration together with its escape test.
pub trait IteratedMap: Sync {
    fn apply(&self, x: f64) -> f64;

    /// Whether `x` has provably left for infinity.
    fn has_escaped(&self, x: f64) -> bool;
}

impl IteratedMap for QuadraticParams {
    fn apply(&self, x: f64) -> f64 {
        self.step(x)
    }

    fn has_escaped(&self, x: f64) -> bool {
        !(x.abs() <= self.escape_radius())
    }
}

/// `F*`, tested for escape in model coordinates.
impl IteratedMap for ConjugateMap {
    fn apply(&self, y: f64) -> f64 {
        self.eval(y)
    }

    fn has_escaped(&self, y: f64) -> bool {
        !(self.phi().eval_inverse(y).abs() <= self.params().escape_radius())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    /// No escape within `iterations_run` iterations.
    Bounded { iterations_run: usize },
    /// The iterate with this index was the first outside the escape radius.
    Escaped { first_exit_iteration: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrbitResult {
    pub outcome: Outcome,
    /// `x₀, x₁, …` up to and including the exit iterate, capped at `max_iter + 1` values.
    pub trajectory: Option<Vec<f64>>,
}

impl OrbitResult {
    pub fn escaped(&self) -> bool {
        matches!(self.outcome, Outcome::Escaped { .. })
    }
}

/// Iterates `map` from `x0`, checking `x₀` through `x_{max_iter}`.
pub fn iterate<M: IteratedMap + ?Sized>(map: &M, x0: f64, max_iter: usize, keep_trajectory: bool) -> OrbitResult {
    let mut trajectory = keep_trajectory.then(|| Vec::with_capacity(max_iter.min(1 << 16) + 1));
    let mut x = x0;
    for n in 0..=max_iter {
        if let Some(t) = trajectory.as_mut() {
            t.push(x);
        }
        if map.has_escaped(x) {
            return OrbitResult { outcome: Outcome::Escaped { first_exit_iteration: n }, trajectory };
        }
        if n < max_iter {
            x = map.apply(x);
        }
    }
    OrbitResult { outcome: Outcome::Bounded { iterations_run: max_iter }, trajectory }
}

pub fn iterate_model(params: &QuadraticParams, x0: f64, max_iter: usize) -> OrbitResult {
    iterate(params, x0, max_iter, false)
}

pub fn iterate_target(map: &ConjugateMap, y0: f64, max_iter: usize) -> OrbitResult {
    iterate(map, y0, max_iter, false)
}

/// Graphical analysis of an orbit.
///
/// Starts at `(x₀, F(x₀))` and alternates a horizontal move to the diagonal with a
/// vertical move back to the graph: `(x₀, x₁) → (x₁, x₁) → (x₁, x₂) → (x₂, x₂) → …`.
#[derive(Debug, Clone, PartialEq)]
pub struct CobwebTrace {
    pub points: Vec<(f64, f64)>,
}

impl CobwebTrace {
    pub fn segments(&self) -> impl Iterator<Item = ((f64, f64), (f64, f64))> + '_ {
        self.points.windows(2).map(|w| (w[0], w[1]))
    }

    /// Ordinates at which the trace touches the graph: `x₁, x₂, …`.
    pub fn graph_ordinates(&self) -> Vec<f64> {
        self.points.iter().step_by(2).map(|p| p.1).collect()
    }

    /// True when every point coincides, as for a fixed point.
    pub fn is_degenerate(&self) -> bool {
        self.points.windows(2).all(|w| w[0] == w[1])
    }
}

/// `steps` graph touches, or `None` when `steps` is zero.
pub fn cobweb_trace<M: IteratedMap + ?Sized>(map: &M, x0: f64, steps: usize) -> Option<CobwebTrace> {
    if steps == 0 {
        return None;
    }
    let mut x = x0;
    let mut next = map.apply(x);
    let mut points = vec![(x, next)];
    for _ in 1..steps {
        x = next;
        next = map.apply(x);
        points.push((x, x));
        points.push((x, next));
    }
    Some(CobwebTrace { points })
}

/// Classifies `n_points` evenly spaced points of `[lo, hi]`, endpoints included.
///
/// Work is spread over the rayon pool; results come back in grid order.
pub fn classify_grid<M: IteratedMap + ?Sized>(
    map: &M,
    lo: f64,
    hi: f64,
    n_points: usize,
    max_iter: usize,
) -> Vec<(f64, OrbitResult)> {
    let n = n_points.max(2);
    let step = (hi - lo) / (n - 1) as f64;
    (0..n)
        .into_par_iter()
        .map(|i| {
            let x = if i == n - 1 { hi } else { lo + step * i as f64 };
            (x, iterate(map, x, max_iter, false))
        })
        .collect()
}

/// Escape-time verdict for the complex orbit of `0` under `z ↦ z² + c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EscapeTime {
    Inside,
    EscapedAt(usize),
}

pub fn mandelbrot_escape(c_re: f64, c_im: f64, max_iter: usize, bailout: f64) -> EscapeTime {
    let bailout_sq = bailout * bailout;
    let (mut re, mut im) = (0.0f64, 0.0f64);
    for n in 1..=max_iter {
        let next_re = re * re - im * im + c_re;
        im = 2.0 * re * im + c_im;
        re = next_re;
        if re * re + im * im > bailout_sq {
            return EscapeTime::EscapedAt(n);
        }
    }
    EscapeTime::Inside
}

/// Axis-aligned rectangle of the parameter plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Region {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Region {
    /// Centre of pixel `(i, j)`, column `i` from the left and row `j` from the top.
    pub fn pixel_center(&self, i: usize, j: usize, width: usize, height: usize) -> (f64, f64) {
        let re = self.re_min + (i as f64 + 0.5) * (self.re_max - self.re_min) / width as f64;
        let im = self.im_max - (j as f64 + 0.5) * (self.im_max - self.im_min) / height as f64;
        (re, im)
    }
}

/// Row-major escape times, top row first. Rows are computed in parallel.
pub fn escape_grid(region: &Region, width: usize, height: usize, max_iter: usize) -> Vec<EscapeTime> {
    (0..height)
        .into_par_iter()
        .flat_map_iter(|j| {
            (0..width).map(move |i| {
                let (re, im) = region.pixel_center(i, j, width, height);
                mandelbrot_escape(re, im, max_iter, 2.0)
            })
        })
        .collect()
}
