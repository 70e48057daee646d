//! Closed segments, open gaps and nested binary interval systems.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A closed interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Segment {
    pub lo: f64,
    pub hi: f64,
}

impl Segment {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_segment(&self, other: &Segment) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }
}

/// An open interval `(lo, hi)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Gap {
    pub lo: f64,
    pub hi: f64,
}

impl Gap {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo < x && x < self.hi
    }
}

impl From<[f64; 2]> for Segment {
    fn from([lo, hi]: [f64; 2]) -> Self {
        Self { lo, hi }
    }
}

impl From<Segment> for [f64; 2] {
    fn from(s: Segment) -> Self {
        [s.lo, s.hi]
    }
}

impl From<[f64; 2]> for Gap {
    fn from([lo, hi]: [f64; 2]) -> Self {
        Self { lo, hi }
    }
}

impl From<Gap> for [f64; 2] {
    fn from(g: Gap) -> Self {
        [g.lo, g.hi]
    }
}

/// Position `(n, j)` of a segment in a binary interval system, `1 ≤ j ≤ 2ⁿ`.
///
/// Equivalently a binary word of length `n`, most significant bit first, where
/// `0` picks the left child and `1` the right child.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntervalAddress {
    level: u32,
    index: u64,
}

impl IntervalAddress {
    pub const ROOT: Self = Self { level: 0, index: 1 };

    pub fn new(level: u32, index: u64) -> Result<Self> {
        if level > 62 || index == 0 || index > 1u64 << level {
            return Err(Error::Domain(format!(
                "address ({level}, {index}) needs 1 <= index <= 2^level and level <= 62"
            )));
        }
        Ok(Self { level, index })
    }

    /// Address of the segment reached by following `word` from the root.
    pub fn from_word(word: &[bool]) -> Result<Self> {
        if word.len() > 62 {
            return Err(Error::Domain(format!("word of length {} is too long", word.len())));
        }
        let bits = word.iter().fold(0u64, |acc, &b| (acc << 1) | u64::from(b));
        Ok(Self { level: word.len() as u32, index: bits + 1 })
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    /// One-based index within the level.
    pub fn index(&self) -> u64 {
        self.index
    }

    /// Zero-based position within the level.
    pub fn offset(&self) -> usize {
        (self.index - 1) as usize
    }

    pub fn word(&self) -> Vec<bool> {
        let bits = self.index - 1;
        (0..self.level).rev().map(|k| (bits >> k) & 1 == 1).collect()
    }

    pub fn parent(&self) -> Option<Self> {
        (self.level > 0).then(|| Self { level: self.level - 1, index: self.index.div_ceil(2) })
    }

    pub fn children(&self) -> (Self, Self) {
        let level = self.level + 1;
        (Self { level, index: 2 * self.index - 1 }, Self { level, index: 2 * self.index })
    }
}

/// Nested closed sets `C₀ ⊇ C₁ ⊇ … ⊇ C_N`, each level a sorted list of `2ⁿ` segments.
///
/// Level `n ≥ 1` also records the `2ⁿ⁻¹` open gaps removed from `C_{n-1}`; gap `k`
/// separates children `2k` and `2k+1` (zero-based) of level-`(n-1)` segment `k`.
/// The outer endpoints of every pair of children are bit-identical to their parent's.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalSystem {
    levels: Vec<Vec<Segment>>,
    gaps: Vec<Vec<Gap>>,
}

impl IntervalSystem {
    /// A depth-0 system holding only the hull.
    pub fn from_hull(hull: Segment) -> Self {
        Self { levels: vec![vec![hull]], gaps: vec![Vec::new()] }
    }

    /// Assembles a system from per-level segments, deriving gaps, and checks every
    /// structural invariant.
    pub fn from_levels(levels: Vec<Vec<Segment>>) -> Result<Self> {
        let mut levels = levels.into_iter();
        let root = match levels.next().as_deref() {
            Some(&[hull]) => hull,
            _ => return Err(Error::Spec("level 0 must hold exactly one segment".into())),
        };
        check_level(&[], &[root], &[], 0)?;
        let mut system = Self::from_hull(root);
        for level in levels {
            system.push_level(level)?;
        }
        Ok(system)
    }

    /// Appends a level below the deepest one after checking it refines that level.
    pub fn push_level(&mut self, segments: Vec<Segment>) -> Result<()> {
        let gaps: Vec<Gap> =
            segments.chunks(2).filter(|pair| pair.len() == 2).map(|pair| Gap::new(pair[0].hi, pair[1].lo)).collect();
        check_level(&self.levels[self.depth()], &segments, &gaps, self.depth() + 1)?;
        self.levels.push(segments);
        self.gaps.push(gaps);
        Ok(())
    }

    /// Appends the children of every segment of the deepest level. `split` receives the
    /// address and bounds of a segment and returns its gap.
    pub(crate) fn refine<F>(&mut self, mut split: F) -> Result<()>
    where
        F: FnMut(IntervalAddress, Segment) -> Result<Gap>,
    {
        let depth = self.depth();
        let current = &self.levels[depth];
        let mut children = Vec::with_capacity(2 * current.len());
        let mut gaps = Vec::with_capacity(current.len());
        for (k, seg) in current.iter().enumerate() {
            let addr = IntervalAddress { level: depth as u32, index: k as u64 + 1 };
            let gap = split(addr, *seg)?;
            if !(seg.lo < gap.lo && gap.lo < gap.hi && gap.hi < seg.hi) {
                return Err(Error::Spec(format!(
                    "gap ({}, {}) is not strictly inside segment [{}, {}] at level {depth}, index {}",
                    gap.lo,
                    gap.hi,
                    seg.lo,
                    seg.hi,
                    k + 1
                )));
            }
            children.push(Segment::new(seg.lo, gap.lo));
            children.push(Segment::new(gap.hi, seg.hi));
            gaps.push(gap);
        }
        self.levels.push(children);
        self.gaps.push(gaps);
        Ok(())
    }

    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn hull(&self) -> Segment {
        self.levels[0][0]
    }

    pub fn levels(&self) -> &[Vec<Segment>] {
        &self.levels
    }

    pub fn level(&self, n: usize) -> Result<&[Segment]> {
        self.levels
            .get(n)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::Domain(format!("level {n} exceeds depth {}", self.depth())))
    }

    /// Gaps removed from level `n - 1` to form level `n`; empty for `n = 0`.
    pub fn gaps(&self, n: usize) -> Result<&[Gap]> {
        self.gaps
            .get(n)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::Domain(format!("level {n} exceeds depth {}", self.depth())))
    }

    pub fn segment(&self, addr: IntervalAddress) -> Result<Segment> {
        Ok(self.level(addr.level() as usize)?[addr.offset()])
    }

    pub fn max_segment_length(&self, n: usize) -> Result<f64> {
        Ok(self.level(n)?.iter().map(Segment::length).fold(0.0, f64::max))
    }

    pub fn min_gap_width(&self, n: usize) -> Result<f64> {
        Ok(self.gaps(n)?.iter().map(Gap::width).fold(f64::INFINITY, f64::min))
    }

    /// Address of the level-`n` segment containing `x`, if any.
    pub fn locate(&self, n: usize, x: f64) -> Result<Option<IntervalAddress>> {
        let level = self.level(n)?;
        let k = level.partition_point(|s| s.hi < x);
        Ok((k < level.len() && level[k].lo <= x).then(|| IntervalAddress { level: n as u32, index: k as u64 + 1 }))
    }

    /// Every segment endpoint of level `n`, in increasing order.
    pub fn endpoints(&self, n: usize) -> Result<Vec<f64>> {
        Ok(self.level(n)?.iter().flat_map(|s| [s.lo, s.hi]).collect())
    }

    /// Checks counts, ordering, positive lengths, nesting and gap placement.
    pub fn validate(&self) -> Result<()> {
        if self.levels.is_empty() || self.levels[0].len() != 1 {
            return Err(Error::Spec("level 0 must hold exactly one segment".into()));
        }
        if self.gaps.len() != self.levels.len() {
            return Err(Error::Spec("gap levels do not match segment levels".into()));
        }
        for (n, level) in self.levels.iter().enumerate() {
            let parents = if n == 0 { &[][..] } else { &self.levels[n - 1][..] };
            check_level(parents, level, &self.gaps[n], n)?;
        }
        Ok(())
    }
}

/// Structural checks for level `n` against its parent level (empty for `n = 0`).
fn check_level(parents: &[Segment], level: &[Segment], gaps: &[Gap], n: usize) -> Result<()> {
    let expected = if n == 0 { 1 } else { 2 * parents.len() };
    if level.len() != expected {
        return Err(Error::Spec(format!("level {n} has {} segments, expected {expected}", level.len())));
    }
    for (j, seg) in level.iter().enumerate() {
        if !(seg.lo.is_finite() && seg.hi.is_finite() && seg.lo < seg.hi) {
            return Err(Error::Spec(format!(
                "segment {} of level {n} is [{}, {}], not a proper interval",
                j + 1,
                seg.lo,
                seg.hi
            )));
        }
        if j > 0 && level[j - 1].hi >= seg.lo {
            return Err(Error::Spec(format!("segments {j} and {} of level {n} overlap or are unsorted", j + 1)));
        }
    }
    if gaps.len() != parents.len() {
        return Err(Error::Spec(format!("level {n} has {} gaps, expected {}", gaps.len(), parents.len())));
    }
    for (k, parent) in parents.iter().enumerate() {
        let (left, right, gap) = (level[2 * k], level[2 * k + 1], gaps[k]);
        if left.lo != parent.lo || right.hi != parent.hi {
            return Err(Error::Spec(format!(
                "children of segment {} at level {} do not share its outer endpoints",
                k + 1,
                n - 1
            )));
        }
        if gap.lo != left.hi || gap.hi != right.lo || !(parent.lo < gap.lo && gap.hi < parent.hi) {
            return Err(Error::Spec(format!(
                "gap {} of level {n} is not strictly inside its parent between the two children",
                k + 1
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn address_parent_is_ceiling_half() {
        let a = IntervalAddress::new(3, 6).unwrap();
        assert_eq!(a.parent(), Some(IntervalAddress::new(2, 3).unwrap()));
        assert_eq!(IntervalAddress::new(3, 5).unwrap().parent(), a.parent());
        assert_eq!(IntervalAddress::ROOT.parent(), None);
    }

    #[test]
    fn address_word_round_trip() {
        let word = [true, false, true, true];
        let a = IntervalAddress::from_word(&word).unwrap();
        assert_eq!(a.level(), 4);
        assert_eq!(a.index(), 0b1011 + 1);
        assert_eq!(a.word(), word);
        let (l, r) = a.children();
        assert_eq!(l.parent(), Some(a));
        assert_eq!(r.word(), [true, false, true, true, true]);
    }

    #[test]
    fn address_bounds() {
        assert!(IntervalAddress::new(2, 0).is_err());
        assert!(IntervalAddress::new(2, 5).is_err());
        assert!(IntervalAddress::new(2, 4).is_ok());
    }

    #[test]
    fn from_levels_rejects_broken_nesting() {
        let ok = vec![vec![Segment::new(0.0, 1.0)], vec![Segment::new(0.0, 0.3), Segment::new(0.6, 1.0)]];
        assert!(IntervalSystem::from_levels(ok).is_ok());

        let outside = vec![vec![Segment::new(0.0, 1.0)], vec![Segment::new(0.0, 0.3), Segment::new(0.6, 1.2)]];
        assert!(matches!(IntervalSystem::from_levels(outside), Err(Error::Spec(_))));

        let overlap = vec![vec![Segment::new(0.0, 1.0)], vec![Segment::new(0.0, 0.7), Segment::new(0.6, 1.0)]];
        assert!(matches!(IntervalSystem::from_levels(overlap), Err(Error::Spec(_))));

        let short = vec![vec![Segment::new(0.0, 1.0)], vec![Segment::new(0.0, 0.3)]];
        assert!(IntervalSystem::from_levels(short).is_err());
    }

    #[test]
    fn locate_includes_endpoints() {
        let sys = IntervalSystem::from_levels(vec![
            vec![Segment::new(0.0, 1.0)],
            vec![Segment::new(0.0, 0.25), Segment::new(0.75, 1.0)],
        ])
        .unwrap();
        assert_eq!(sys.locate(1, 0.25).unwrap().map(|a| a.index()), Some(1));
        assert_eq!(sys.locate(1, 0.75).unwrap().map(|a| a.index()), Some(2));
        assert_eq!(sys.locate(1, 0.5).unwrap(), None);
        assert_eq!(sys.locate(1, 1.5).unwrap(), None);
        assert!(sys.locate(2, 0.1).is_err());
    }
}
