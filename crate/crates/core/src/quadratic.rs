//! The real quadratic family `F_c(x) = x² + c`.

use crate::error::{Error, Result};
use crate::interval::{Gap, Segment};

/// Both real roots of `x² + c = x`, smaller first.
///
/// The larger root uses the quadratic formula; the smaller one is recovered from
/// the product of the roots, `q·p = c`, which avoids cancellation when `c` is small.
pub fn fixed_points(c: f64) -> Result<(f64, f64)> {
    if !(c <= 0.25) {
        return Err(Error::NoRealFixedPoint { c });
    }
    let p = 0.5 * (1.0 + (1.0 - 4.0 * c).sqrt());
    Ok((c / p, p))
}

/// Parameter `c` of `F_c` together with the constants derived from it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraticParams {
    c: f64,
    fixed: Option<(f64, f64)>,
    half_gap: f64,
    escape_radius: f64,
}

impl QuadraticParams {
    /// Accepts any finite `c`. For `c > 1/4` there are no real fixed points; every
    /// orbit diverges and the escape radius is `1/2`, past which `x² + c > |x| + (c - 1/4)`.
    pub fn new(c: f64) -> Result<Self> {
        if !c.is_finite() {
            return Err(Error::Domain(format!("map parameter must be finite, got {c}")));
        }
        let fixed = fixed_points(c).ok();
        let (half_gap, escape_radius) = match fixed {
            Some((_, p)) => {
                let depth = -p - c;
                (if depth > 0.0 { depth.sqrt() } else { 0.0 }, p)
            }
            None => (0.0, 0.5),
        };
        Ok(Self { c, fixed, half_gap, escape_radius })
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// The larger fixed point `p`, when `c ≤ 1/4`.
    pub fn p(&self) -> Option<f64> {
        self.fixed.map(|(_, p)| p)
    }

    pub fn fixed_points(&self) -> Option<(f64, f64)> {
        self.fixed
    }

    /// Half-width `s` of the escape gap `A₀ = (-s, s)`; zero when the gap is empty.
    pub fn half_gap(&self) -> f64 {
        self.half_gap
    }

    /// Lower bound `2s` on `|F'|` over `I \ A₀`.
    pub fn lambda(&self) -> f64 {
        2.0 * self.half_gap
    }

    pub fn escape_radius(&self) -> f64 {
        self.escape_radius
    }

    /// `I = [-p, p]`.
    pub fn hull(&self) -> Option<Segment> {
        self.p().map(|p| Segment::new(-p, p))
    }

    /// `x² + c`.
    pub fn eval(&self, x: f64) -> f64 {
        x * x + self.c
    }

    /// `x² + c` evaluated as `p + (x - p)(x + p)` when the fixed point exists.
    ///
    /// The two forms agree in exact arithmetic. This one returns `p` bit-exactly at
    /// `x = ±p`, so the repelling fixed point and its preimage are float fixed points.
    pub fn step(&self, x: f64) -> f64 {
        match self.p() {
            Some(p) => p + (x - p) * (x + p),
            None => self.eval(x),
        }
    }

    /// `A₀ = {x ∈ I : F_c(x) < -p}`, nonempty exactly when `c < -2`.
    pub fn gap_a0(&self) -> Option<Gap> {
        (self.half_gap > 0.0).then(|| Gap::new(-self.half_gap, self.half_gap))
    }

    /// `(λ, λ > 1)`. The flag is the checkable stand-in for `c < c_*`.
    pub fn expansion_bound(&self) -> (f64, bool) {
        let lambda = self.lambda();
        (lambda, lambda > 1.0)
    }

    /// Fails with [`Error::Regime`] unless the expansion bound certifies the Cantor regime.
    pub fn require_certified(&self) -> Result<f64> {
        match (self.p(), self.expansion_bound()) {
            (Some(p), (_, true)) => Ok(p),
            (_, (lambda, _)) => Err(Error::Regime(format!(
                "c = {} is not certified: expansion bound lambda = {lambda} must exceed 1",
                self.c
            ))),
        }
    }
}
