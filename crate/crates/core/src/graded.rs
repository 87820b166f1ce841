//! Degree-indexed storage for bounded and eventually periodic data.
//!
//! A [`Graded`] value stores items for an explicit interval `[lo, hi]`.
//! Outside it each end is either zero or periodic: below `lo` with period `p`
//! the item at `j` is the item at `lo + (j - lo) mod p`; above `hi` it is the
//! item at `hi - p + 1 + (j - hi - 1) mod p`. Evaluation is plain indexing
//! into immutable storage, so concurrent readers always see the same items.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::Degree;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Tail {
    Zero,
    Periodic(usize),
}

impl Tail {
    pub fn period(self) -> Option<usize> {
        match self {
            Tail::Zero => None,
            Tail::Periodic(p) => Some(p),
        }
    }

    pub fn is_periodic(self) -> bool {
        matches!(self, Tail::Periodic(_))
    }
}

/// Explicit interval plus tail behaviour; shared by every graded field of a
/// complex or map.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Shape {
    pub lo: Degree,
    pub hi: Degree,
    pub below: Tail,
    pub above: Tail,
}

/// One input of a derived graded object: the derived item at `j` reads the
/// input at `j + shift` (or at `shift - j` when `reflected`).
#[derive(Clone, Copy, Debug)]
pub struct Dependency {
    pub shape: Shape,
    pub shift: Degree,
    pub reflected: bool,
}

impl Dependency {
    pub fn at(shape: Shape, shift: Degree) -> Dependency {
        Dependency { shape, shift, reflected: false }
    }

    pub fn reflected(shape: Shape, shift: Degree) -> Dependency {
        Dependency { shape, shift, reflected: true }
    }
}

fn lcm(a: usize, b: usize) -> usize {
    a / num_integer::gcd(a, b) * b
}

impl Shape {
    pub fn bounded(lo: Degree, hi: Degree) -> Shape {
        Shape { lo, hi, below: Tail::Zero, above: Tail::Zero }
    }

    pub fn len(&self) -> usize {
        (self.hi - self.lo + 1).max(0) as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_bounded(&self) -> bool {
        !self.below.is_periodic() && !self.above.is_periodic()
    }

    /// Degrees that must be inspected to certify a degreewise identity for
    /// all degrees: the explicit region plus one period and a seam on each
    /// periodic side.
    pub fn check_range(&self, extra: Degree) -> (Degree, Degree) {
        let below = self.below.period().map_or(0, |p| p as Degree + 2);
        let above = self.above.period().map_or(0, |p| p as Degree + 2);
        (self.lo - below - extra, self.hi + above + extra)
    }

    /// A shape on which a value built from `deps` is faithfully stored:
    /// periods are combined by lcm and the explicit region is padded so that
    /// its first and last periods lie inside every input's periodic regime.
    pub fn covering(deps: &[Dependency]) -> Shape {
        let mut below = None::<usize>;
        let mut above = None::<usize>;
        let mut core_lo = Degree::MAX;
        let mut core_hi = Degree::MIN;
        for d in deps {
            let (lo, hi, tail_lo, tail_hi) = if d.reflected {
                (d.shift - d.shape.hi, d.shift - d.shape.lo, d.shape.above, d.shape.below)
            } else {
                (d.shape.lo - d.shift, d.shape.hi - d.shift, d.shape.below, d.shape.above)
            };
            core_lo = core_lo.min(lo);
            core_hi = core_hi.max(hi);
            if let Some(p) = tail_lo.period() {
                below = Some(below.map_or(p, |q| lcm(p, q)));
            }
            if let Some(p) = tail_hi.period() {
                above = Some(above.map_or(p, |q| lcm(p, q)));
            }
        }
        if deps.is_empty() {
            core_lo = 0;
            core_hi = 0;
        }
        let pad = |p: Option<usize>| p.map_or(0, |p| 2 * p as Degree + 2);
        Shape {
            lo: core_lo - pad(below),
            hi: core_hi + pad(above),
            below: below.map_or(Tail::Zero, Tail::Periodic),
            above: above.map_or(Tail::Zero, Tail::Periodic),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Graded<T> {
    shape: Shape,
    items: Vec<T>,
}

impl<T> Graded<T> {
    pub fn new(shape: Shape, items: Vec<T>) -> Result<Graded<T>> {
        if items.len() != shape.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} items for degrees {}..{}",
                items.len(),
                shape.lo,
                shape.hi
            )));
        }
        for p in [shape.below.period(), shape.above.period()].into_iter().flatten() {
            if p == 0 || p > items.len() {
                return Err(Error::Invariant(format!(
                    "period {p} does not fit in the explicit region {}..{}",
                    shape.lo, shape.hi
                )));
            }
        }
        Ok(Graded { shape, items })
    }

    pub fn from_fn(shape: Shape, f: impl FnMut(Degree) -> T) -> Graded<T> {
        let items = (shape.lo..=shape.hi).map(f).collect();
        Graded::new(shape, items).expect("covering shape holds a full period")
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn items(&self) -> &[T] {
        &self.items
    }

    /// Storage index of degree `j`, `None` in a zero tail.
    pub fn index(&self, j: Degree) -> Option<usize> {
        let Shape { lo, hi, below, above } = self.shape;
        if j < lo {
            let p = below.period()? as Degree;
            Some((j - lo).rem_euclid(p) as usize)
        } else if j > hi {
            let p = above.period()? as Degree;
            let start = hi - p + 1;
            Some((start + (j - start).rem_euclid(p) - lo) as usize)
        } else {
            Some((j - lo) as usize)
        }
    }

    pub fn get(&self, j: Degree) -> Option<&T> {
        self.index(j).map(|i| &self.items[i])
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> Graded<U> {
        Graded { shape: self.shape, items: self.items.iter().map(f).collect() }
    }
}

/// A closed degree interval `[lo, hi]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Window {
    pub lo: Degree,
    pub hi: Degree,
}

impl Window {
    pub fn new(lo: Degree, hi: Degree) -> Window {
        Window { lo, hi }
    }

    pub fn contains(&self, j: Degree) -> bool {
        self.lo <= j && j <= self.hi
    }

    pub fn degrees(&self) -> std::ops::RangeInclusive<Degree> {
        self.lo..=self.hi
    }

    pub fn width(&self) -> usize {
        (self.hi - self.lo + 1).max(0) as usize
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.lo, self.hi)
    }
}

impl FromStr for Window {
    type Err = Error;

    fn from_str(s: &str) -> Result<Window> {
        let bad = || Error::Precondition(format!("window `{s}` is not of the form a..b"));
        let (a, b) = s.split_once("..").ok_or_else(bad)?;
        let lo: Degree = a.trim().parse().map_err(|_| bad())?;
        let hi: Degree = b.trim().parse().map_err(|_| bad())?;
        if lo > hi {
            return Err(bad());
        }
        Ok(Window { lo, hi })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn periodic_indexing() {
        let shape = Shape { lo: -2, hi: 1, below: Tail::Periodic(2), above: Tail::Periodic(1) };
        let g = Graded::new(shape, vec!['a', 'b', 'c', 'd']).unwrap();
        assert_eq!(g.get(-3), Some(&'b'));
        assert_eq!(g.get(-4), Some(&'a'));
        assert_eq!(g.get(-5), Some(&'b'));
        assert_eq!(g.get(0), Some(&'c'));
        assert_eq!(g.get(2), Some(&'d'));
        assert_eq!(g.get(7), Some(&'d'));
        let bounded = Graded::new(Shape::bounded(0, 0), vec![1]).unwrap();
        assert_eq!(bounded.get(-1), None);
        assert_eq!(bounded.get(1), None);
    }

    #[test]
    fn period_must_fit() {
        let shape = Shape { lo: 0, hi: 0, below: Tail::Periodic(2), above: Tail::Zero };
        assert!(Graded::new(shape, vec![1]).is_err());
    }

    #[test]
    fn covering_pads_periodic_sides() {
        let x = Shape { lo: -3, hi: 0, below: Tail::Periodic(2), above: Tail::Zero };
        let y = Shape { lo: 0, hi: 1, below: Tail::Periodic(1), above: Tail::Zero };
        let c = Shape::covering(&[Dependency::at(x, 1), Dependency::at(y, 0)]);
        assert_eq!(c.below, Tail::Periodic(2));
        assert_eq!(c.above, Tail::Zero);
        assert_eq!(c.lo, -4 - 6);
        assert_eq!(c.hi, 1);
        let r = Shape::covering(&[Dependency::reflected(x, 0)]);
        assert_eq!(r.above, Tail::Periodic(2));
        assert_eq!((r.lo, r.hi), (0, 3 + 6));
    }

    #[test]
    fn window_parsing() {
        assert_eq!("-1..0".parse::<Window>().unwrap(), Window::new(-1, 0));
        assert!("3..1".parse::<Window>().is_err());
        assert!("x".parse::<Window>().is_err());
    }
}
