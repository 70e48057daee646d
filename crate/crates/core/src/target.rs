//! Target Cantor sets `Λ* ⊂ [a, b]` and their refinement `C*₀ ⊇ C*₁ ⊇ …`.
//!
//! A target is described constructively by a binary gap tree: every node segment
//! `[u, v]` of the tree has a principal open gap `(e, f)` and two children `[u, e]`
//! and `[f, v]`. `Λ*` is the intersection of all tree levels. Family descriptions
//! compute principal gaps from the node bounds; an explicit tree stores them.
//!
//! The refinement used for conjugation comes in two flavours (see [`BuildMode`]).
//! In strict mode every segment `[c, d]` is split at a complementary gap that meets
//! its middle third `[c + (d-c)/3, d - (d-c)/3]`, widened to the maximal gap of
//! `Λ*`, so both children are shorter than `2/3 (d - c)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval::{Gap, IntervalSystem, Segment};
use crate::MAX_DEPTH;

/// Search limit, in tree levels, for gaps and maximal-gap descents.
const MAX_SEARCH_LEVELS: usize = 64;

/// Hard cap on descents while widening a gap; guards against non-shrinking trees.
const MAX_TIGHTEN_STEPS: usize = 4096;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum CantorFamily {
    /// Remove the open middle `alpha` proportion of every segment.
    MiddleAlpha { alpha: f64 },
    /// Attractor of `x ↦ r1·x` and `x ↦ r2·x + (1 - r2)`, rescaled to the hull.
    AffineIfs2 { r1: f64, r2: f64 },
    /// Remove the central proportion `base · ratioⁿ` of every level-`n` segment.
    /// The proportions sum to `base / (1 - ratio) < 1`.
    FatCantor { base: f64, ratio: f64 },
    /// Stored gaps for the first levels; below the stored depth each leaf continues
    /// as an affine copy of the middle-thirds set.
    ExplicitGapTree { tree: GapTree },
}

/// Explicit binary gap tree: `levels[k]` holds the `2ᵏ` principal gaps of the level-`k`
/// node segments, left to right.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapTree {
    pub hull: Segment,
    pub levels: Vec<Vec<Gap>>,
}

impl GapTree {
    /// The principal gaps of an interval system, level by level.
    pub fn from_system(system: &IntervalSystem) -> Self {
        let levels = (1..=system.depth()).map(|n| system.gaps(n).unwrap_or_default().to_vec()).collect();
        Self { hull: system.hull(), levels }
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    /// Checks counts and that every gap sits strictly inside its node segment.
    pub fn validate(&self) -> Result<()> {
        let hull = self.hull;
        if !(hull.lo.is_finite() && hull.hi.is_finite() && hull.lo < hull.hi) {
            return Err(Error::Spec(format!("hull [{}, {}] is not a proper interval", hull.lo, hull.hi)));
        }
        let mut nodes = vec![hull];
        for (k, gaps) in self.levels.iter().enumerate() {
            if gaps.len() != nodes.len() {
                return Err(Error::Spec(format!("gap level {k} holds {} gaps, expected {}", gaps.len(), nodes.len())));
            }
            let mut next = Vec::with_capacity(2 * nodes.len());
            for (j, (node, gap)) in nodes.iter().zip(gaps).enumerate() {
                if !(node.lo < gap.lo && gap.lo < gap.hi && gap.hi < node.hi) {
                    return Err(Error::Spec(format!(
                        "gap {} of level {k} is ({}, {}), not strictly inside its parent [{}, {}]",
                        j + 1,
                        gap.lo,
                        gap.hi,
                        node.lo,
                        node.hi
                    )));
                }
                next.push(Segment::new(node.lo, gap.lo));
                next.push(Segment::new(gap.hi, node.hi));
            }
            nodes = next;
        }
        Ok(())
    }
}

/// A target Cantor set with hull `[a, b]`, `a, b ∈ Λ*`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CantorSpec {
    pub family: CantorFamily,
    pub hull: Segment,
}

/// A node of the spec's own gap tree.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Node {
    level: usize,
    offset: usize,
    seg: Segment,
}

impl CantorSpec {
    pub fn middle_thirds() -> Self {
        Self::middle_alpha(1.0 / 3.0)
    }

    pub fn middle_alpha(alpha: f64) -> Self {
        Self { family: CantorFamily::MiddleAlpha { alpha }, hull: Segment::new(0.0, 1.0) }
    }

    pub fn affine_ifs2(r1: f64, r2: f64) -> Self {
        Self { family: CantorFamily::AffineIfs2 { r1, r2 }, hull: Segment::new(0.0, 1.0) }
    }

    pub fn fat(base: f64, ratio: f64) -> Self {
        Self { family: CantorFamily::FatCantor { base, ratio }, hull: Segment::new(0.0, 1.0) }
    }

    pub fn explicit(tree: GapTree) -> Self {
        Self { hull: tree.hull, family: CantorFamily::ExplicitGapTree { tree } }
    }

    pub fn with_hull(mut self, hull: Segment) -> Self {
        if !matches!(self.family, CantorFamily::ExplicitGapTree { .. }) {
            self.hull = hull;
        }
        self
    }

    pub fn validate(&self) -> Result<()> {
        let Segment { lo, hi } = self.hull;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::Spec(format!("hull [{lo}, {hi}] is not a proper interval")));
        }
        let unit = |name: &str, v: f64| {
            if v > 0.0 && v < 1.0 {
                Ok(())
            } else {
                Err(Error::Spec(format!("{name} = {v} must lie in (0, 1)")))
            }
        };
        match &self.family {
            CantorFamily::MiddleAlpha { alpha } => unit("alpha", *alpha),
            CantorFamily::AffineIfs2 { r1, r2 } => {
                unit("r1", *r1)?;
                unit("r2", *r2)?;
                if r1 + r2 < 1.0 {
                    Ok(())
                } else {
                    Err(Error::Spec(format!("r1 + r2 = {} must be below 1", r1 + r2)))
                }
            }
            CantorFamily::FatCantor { base, ratio } => {
                unit("base", *base)?;
                unit("ratio", *ratio)?;
                let total = base / (1.0 - ratio);
                if total < 1.0 {
                    Ok(())
                } else {
                    Err(Error::Spec(format!("removed proportions sum to {total}, must be below 1")))
                }
            }
            CantorFamily::ExplicitGapTree { tree } => {
                if tree.hull != self.hull {
                    return Err(Error::Spec("explicit gap tree hull differs from the spec hull".into()));
                }
                tree.validate()
            }
        }
    }

    /// Largest ratio of child length to parent length over the spec's tree.
    pub fn max_child_ratio(&self) -> f64 {
        match &self.family {
            CantorFamily::MiddleAlpha { alpha } => (1.0 - alpha) / 2.0,
            CantorFamily::AffineIfs2 { r1, r2 } => r1.max(*r2),
            // Proportions shrink to zero, so the supremum is 1/2.
            CantorFamily::FatCantor { .. } => 0.5,
            CantorFamily::ExplicitGapTree { tree } => {
                let mut worst: f64 = 1.0 / 3.0;
                let mut nodes = vec![tree.hull];
                for gaps in &tree.levels {
                    let mut next = Vec::with_capacity(2 * nodes.len());
                    for (node, gap) in nodes.iter().zip(gaps) {
                        let (l, r) = (Segment::new(node.lo, gap.lo), Segment::new(gap.hi, node.hi));
                        worst = worst.max(l.length() / node.length()).max(r.length() / node.length());
                        next.extend([l, r]);
                    }
                    nodes = next;
                }
                worst
            }
        }
    }

    fn root(&self) -> Node {
        Node { level: 0, offset: 0, seg: self.hull }
    }

    fn principal_gap(&self, node: &Node) -> Gap {
        let Segment { lo: u, hi: v } = node.seg;
        let len = v - u;
        let centred = |proportion: f64| {
            let side = len * (1.0 - proportion) / 2.0;
            Gap::new(u + side, v - side)
        };
        match &self.family {
            CantorFamily::MiddleAlpha { alpha } => centred(*alpha),
            CantorFamily::AffineIfs2 { r1, r2 } => Gap::new(u + r1 * len, v - r2 * len),
            CantorFamily::FatCantor { base, ratio } => centred(base * ratio.powi(node.level as i32)),
            CantorFamily::ExplicitGapTree { tree } => match tree.levels.get(node.level) {
                Some(gaps) => gaps[node.offset],
                None => centred(1.0 / 3.0),
            },
        }
    }

    fn children(&self, node: &Node, gap: Gap) -> (Node, Node) {
        let level = node.level + 1;
        (
            Node { level, offset: 2 * node.offset, seg: Segment::new(node.seg.lo, gap.lo) },
            Node { level, offset: 2 * node.offset + 1, seg: Segment::new(gap.hi, node.seg.hi) },
        )
    }

    /// Whether `x` survives `depth` levels of the spec's gap tree. Endpoints count as in.
    pub fn membership(&self, x: f64, depth: usize) -> bool {
        if !self.hull.contains(x) {
            return false;
        }
        let mut node = self.root();
        for _ in 0..depth {
            let gap = self.principal_gap(&node);
            if gap.contains(x) {
                return false;
            }
            let (left, right) = self.children(&node, gap);
            node = if x <= gap.lo { left } else { right };
        }
        true
    }

    /// An open interval inside the middle third of `[c, d]` that misses `Λ*`.
    ///
    /// Searches the spec's tree level by level, keeping only nodes that overlap the
    /// middle third, and takes the leftmost gap meeting it at the shallowest level.
    /// The result is that gap clipped to the middle third; [`Self::tighten_gap`]
    /// widens it back to the maximal gap.
    pub fn find_gap_in_middle_third(&self, seg: Segment) -> Result<Gap> {
        if !(seg.lo < seg.hi) {
            return Err(Error::Spec(format!("segment [{}, {}] has no interior", seg.lo, seg.hi)));
        }
        let third = seg.length() / 3.0;
        let (g, h) = (seg.lo + third, seg.hi - third);
        let mut frontier = vec![self.root()];
        for _ in 0..MAX_SEARCH_LEVELS {
            let mut next = Vec::new();
            for node in &frontier {
                let gap = self.principal_gap(node);
                if gap.lo < h && gap.hi > g {
                    return Ok(Gap::new(gap.lo.max(g), gap.hi.min(h)));
                }
                let (left, right) = self.children(node, gap);
                next.extend([left, right].into_iter().filter(|n| n.seg.lo < h && n.seg.hi > g));
            }
            if next.is_empty() {
                break;
            }
            frontier = next;
        }
        Err(Error::Spec(format!(
            "no gap of the target set meets the middle third of [{}, {}] within {MAX_SEARCH_LEVELS} levels",
            seg.lo, seg.hi
        )))
    }

    /// Widens a gap `(e, f)` of `Λ*` to `(sup{x ∈ Λ* : x ≤ e}, inf{x ∈ Λ* : x ≥ f})`.
    ///
    /// Exact: the answer is the tree gap containing the midpoint of `(e, f)`. `tol` is
    /// the resolution below which a tree node counts as a point of `Λ*`, and the slack
    /// allowed when checking that the answer covers `(e, f)`.
    pub fn tighten_gap(&self, gap: Gap, tol: f64) -> Result<Gap> {
        if !(tol > 0.0) {
            return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
        }
        let x = gap.midpoint();
        if !(gap.lo < gap.hi && self.hull.contains(x)) {
            return Err(Error::Domain(format!("({}, {}) is not a gap inside the hull", gap.lo, gap.hi)));
        }
        let meets = || Error::Spec(format!("({}, {}) meets the target set", gap.lo, gap.hi));
        let mut node = self.root();
        for _ in 0..MAX_TIGHTEN_STEPS {
            let principal = self.principal_gap(&node);
            if principal.contains(x) {
                if principal.lo > gap.lo + tol || principal.hi < gap.hi - tol {
                    return Err(meets());
                }
                return Ok(principal);
            }
            if node.seg.length() < tol {
                return Err(meets());
            }
            let (left, right) = self.children(&node, principal);
            node = if x <= principal.lo { left } else { right };
        }
        Err(meets())
    }

    /// Default widening resolution, `1e-12 (b - a)`.
    pub fn default_tolerance(&self) -> f64 {
        1e-12 * self.hull.length()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum BuildMode {
    /// Split each segment at a maximal gap meeting its middle third; lengths at level
    /// `n` are at most `(2/3)ⁿ (b - a)`.
    #[default]
    Strict,
    /// Use the spec's own tree levels as the refinement.
    Natural,
}

/// Refinement `C*₀ ⊇ … ⊇ C*_N` of a target set; all endpoints lie in `Λ*`.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetSystem {
    pub system: IntervalSystem,
    pub mode: BuildMode,
    pub spec: CantorSpec,
}

pub fn build_target_system(spec: &CantorSpec, depth: usize, mode: BuildMode) -> Result<TargetSystem> {
    if depth > MAX_DEPTH {
        return Err(Error::Domain(format!("depth {depth} exceeds the maximum {MAX_DEPTH}")));
    }
    if mode == BuildMode::Natural {
        let ratio = spec.max_child_ratio();
        if !(ratio < 1.0) {
            return Err(Error::Regime(format!("natural refinement needs child ratios below 1, spec has {ratio}")));
        }
    }
    spec.validate()?;
    let mut system = IntervalSystem::from_hull(spec.hull);
    let tol = spec.default_tolerance();
    for _ in 0..depth {
        match mode {
            BuildMode::Strict => system.refine(|_, seg| spec.tighten_gap(spec.find_gap_in_middle_third(seg)?, tol))?,
            BuildMode::Natural => system.refine(|addr, seg| {
                let node = Node { level: addr.level() as usize, offset: addr.offset(), seg };
                Ok(spec.principal_gap(&node))
            })?,
        }
    }
    Ok(TargetSystem { system, mode, spec: spec.clone() })
}

impl TargetSystem {
    pub fn depth(&self) -> usize {
        self.system.depth()
    }
}
