//! Cochain complexes of finitely presented modules, chain maps and homotopies.
//!
//! Indexing is cohomological: `d^j: C^j -> C^{j+1}`. Terms are given by a
//! generator count and a relation matrix; free terms (the common case) have
//! no relations. Sign conventions, fixed once for the whole crate:
//!
//! * suspension: `(Σ^i C)^j = C^{j+i}`, `d_{Σ^i C} = (-1)^i d_C`, `(Σ^i f)^j = f^{j+i}`;
//!   hence `H^j(Σ C) = H^{j+1}(C)`;
//! * cone of `f: X -> Y`: `cone^j = X^{j+1} ⊕ Y^j` with
//!   `d = [[-d_X, 0], [f, d_Y]]`, triangle `X -> Y -> cone(f) -> Σ X`;
//! * dual: `(C*)^j = (C^{-j})*`, `d_{C*}^j = (d_C^{-j-1})^T`, no sign;
//! * Hom complex (see [`crate::hom`]): `(D φ) = d_Y φ - (-1)^n φ d_X` in degree `n`.

use crate::error::{Error, Result};
use crate::graded::{Dependency, Graded, Shape, Tail, Window};
use crate::linalg::{kernel, solve};
use crate::matrix::RingMatrix;
use crate::module::FPModule;
use crate::ring::{Ring, Side};
use crate::Degree;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Complex {
    ring: Ring,
    side: Side,
    ranks: Graded<usize>,
    relations: Graded<RingMatrix>,
    diffs: Graded<RingMatrix>,
}

impl Complex {
    /// Assembles and validates a complex. `relations` and `diffs` must share
    /// the shape of `ranks`.
    pub fn from_parts(
        ring: Ring,
        side: Side,
        ranks: Graded<usize>,
        relations: Graded<RingMatrix>,
        diffs: Graded<RingMatrix>,
    ) -> Result<Complex> {
        if relations.shape() != ranks.shape() || diffs.shape() != ranks.shape() {
            return Err(Error::Invariant("ranks, relations and differentials must share a shape".into()));
        }
        let c = Complex { ring, side, ranks, relations, diffs };
        c.validate()?;
        Ok(c)
    }

    /// Builds the complex on `shape` from per-degree closures.
    pub fn from_fn(
        ring: Ring,
        side: Side,
        shape: Shape,
        mut term: impl FnMut(Degree) -> (usize, RingMatrix),
        diff: impl FnMut(Degree) -> RingMatrix,
    ) -> Result<Complex> {
        let terms = Graded::from_fn(shape, &mut term);
        let ranks = terms.map(|t| t.0);
        let relations = terms.map(|t| t.1.clone());
        let diffs = Graded::from_fn(shape, diff);
        Complex::from_parts(ring, side, ranks, relations, diffs)
    }

    /// A bounded complex of free modules with `ranks[k]` in degree `lo + k`
    /// and `diffs[k] = d^{lo+k}`.
    pub fn bounded(ring: Ring, side: Side, lo: Degree, ranks: Vec<usize>, diffs: Vec<RingMatrix>) -> Result<Complex> {
        if ranks.is_empty() {
            return Ok(Complex::zero(ring, side));
        }
        if diffs.len() + 1 != ranks.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} terms need {} differentials, got {}",
                ranks.len(),
                ranks.len() - 1,
                diffs.len()
            )));
        }
        let shape = Shape::bounded(lo, lo + ranks.len() as Degree - 1);
        let hi_rank = *ranks.last().unwrap();
        let mut diffs = diffs;
        diffs.push(RingMatrix::zeros(ring, 0, hi_rank));
        let relations = ranks.iter().map(|&r| RingMatrix::zeros(ring, r, 0)).collect();
        Complex::from_parts(
            ring,
            side,
            Graded::new(shape, ranks)?,
            Graded::new(shape, relations)?,
            Graded::new(shape, diffs)?,
        )
    }

    pub fn zero(ring: Ring, side: Side) -> Complex {
        let shape = Shape::bounded(0, 0);
        Complex {
            ring,
            side,
            ranks: Graded::new(shape, vec![0]).unwrap(),
            relations: Graded::new(shape, vec![RingMatrix::zeros(ring, 0, 0)]).unwrap(),
            diffs: Graded::new(shape, vec![RingMatrix::zeros(ring, 0, 0)]).unwrap(),
        }
    }

    /// The module `m` as a complex concentrated in `degree`.
    pub fn concentrated(m: &FPModule, degree: Degree) -> Complex {
        let ring = m.ring();
        let shape = Shape::bounded(degree, degree);
        Complex {
            ring,
            side: m.side(),
            ranks: Graded::new(shape, vec![m.rank0()]).unwrap(),
            relations: Graded::new(shape, vec![m.presentation().clone()]).unwrap(),
            diffs: Graded::new(shape, vec![RingMatrix::zeros(ring, 0, m.rank0())]).unwrap(),
        }
    }

    /// `A^rank` in a single degree.
    pub fn free_in_degree(ring: Ring, side: Side, rank: usize, degree: Degree) -> Complex {
        Complex::concentrated(&FPModule::free(ring, side, rank), degree)
    }

    /// The doubly infinite complex with `A^rank` in every degree and every
    /// differential equal to `d` (which must square to zero).
    pub fn periodic(ring: Ring, side: Side, d: RingMatrix) -> Result<Complex> {
        let rank = d.rows();
        if d.cols() != rank {
            return Err(Error::DimensionMismatch("periodic differential must be square".into()));
        }
        let shape = Shape { lo: 0, hi: 1, below: Tail::Periodic(1), above: Tail::Periodic(1) };
        Complex::from_fn(ring, side, shape, |_| (rank, RingMatrix::zeros(ring, rank, 0)), |_| d.clone())
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn shape(&self) -> Shape {
        self.ranks.shape()
    }

    pub fn is_bounded(&self) -> bool {
        self.shape().is_bounded()
    }

    pub fn rank(&self, j: Degree) -> usize {
        self.ranks.get(j).copied().unwrap_or(0)
    }

    pub fn relations(&self, j: Degree) -> RingMatrix {
        self.relations.get(j).cloned().unwrap_or_else(|| RingMatrix::zeros(self.ring, self.rank(j), 0))
    }

    /// `d^j: C^j -> C^{j+1}`.
    pub fn differential(&self, j: Degree) -> RingMatrix {
        self.diffs.get(j).cloned().unwrap_or_else(|| RingMatrix::zeros(self.ring, self.rank(j + 1), self.rank(j)))
    }

    pub fn term(&self, j: Degree) -> FPModule {
        FPModule::new(self.side, self.relations(j))
    }

    pub(crate) fn ranks_graded(&self) -> &Graded<usize> {
        &self.ranks
    }

    pub(crate) fn relations_graded(&self) -> &Graded<RingMatrix> {
        &self.relations
    }

    pub(crate) fn diffs_graded(&self) -> &Graded<RingMatrix> {
        &self.diffs
    }

    /// Whether every term is free (no relations anywhere).
    pub fn is_free(&self) -> bool {
        self.relations.items().iter().all(|r| r.is_zero())
    }

    /// Lowest and highest degree with a non-zero term, for bounded complexes.
    pub fn support(&self) -> Option<(Degree, Degree)> {
        if !self.is_bounded() {
            return None;
        }
        let s = self.shape();
        let nonzero: Vec<Degree> = (s.lo..=s.hi).filter(|&j| self.rank(j) > 0).collect();
        Some((*nonzero.first()?, *nonzero.last()?))
    }

    /// Degrees with a possibly non-zero term, as (lowest, highest) with
    /// `None` for an infinite end.
    pub fn extent(&self) -> (Option<Degree>, Option<Degree>) {
        let s = self.shape();
        let nonzero_tail = |t: Tail, range: std::ops::RangeInclusive<Degree>| {
            t.is_periodic() && range.clone().any(|j| self.rank(j) > 0)
        };
        let p_lo = s.below.period().unwrap_or(0) as Degree;
        let p_hi = s.above.period().unwrap_or(0) as Degree;
        let lo = if nonzero_tail(s.below, s.lo..=s.lo + p_lo - 1) {
            None
        } else {
            Some((s.lo..=s.hi).find(|&j| self.rank(j) > 0).unwrap_or(s.hi))
        };
        let hi = if nonzero_tail(s.above, s.hi - p_hi + 1..=s.hi) {
            None
        } else {
            Some((s.lo..=s.hi).rev().find(|&j| self.rank(j) > 0).unwrap_or(s.lo))
        };
        (lo, hi)
    }

    fn validate(&self) -> Result<()> {
        let (a, b) = self.shape().check_range(1);
        for j in a..=b {
            let r = self.rank(j);
            let rel = self.relations(j);
            if rel.rows() != r {
                return Err(Error::Invariant(format!("relations in degree {j} have {} rows, rank is {r}", rel.rows())));
            }
            if rel.ring() != self.ring {
                return Err(Error::RingMismatch(rel.ring(), self.ring));
            }
            let d = self.differential(j);
            if d.shape() != (self.rank(j + 1), r) {
                return Err(Error::DimensionMismatch(format!(
                    "d^{j} is {}x{}, expected {}x{}",
                    d.rows(),
                    d.cols(),
                    self.rank(j + 1),
                    r
                )));
            }
            let next = self.term(j + 1);
            if !next.vanishes(&(&d * &rel)) {
                return Err(Error::Invariant(format!("d^{j} does not respect the relations of degree {j}")));
            }
        }
        for j in a..b {
            let dd = &self.differential(j + 1) * &self.differential(j);
            if !self.term(j + 2).vanishes(&dd) {
                return Err(Error::Invariant(format!("d^{}d^{} = {} is not zero", j + 1, j, dd)));
            }
        }
        Ok(())
    }

    fn same_ring(&self, other: &Complex) -> Result<()> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch(self.ring, other.ring));
        }
        Ok(())
    }

    /// `Σ^i C`.
    pub fn suspend(&self, i: Degree) -> Complex {
        let shape = Shape::covering(&[Dependency::at(self.shape(), i)]);
        let sign = self.ring.sign(i);
        Complex::from_fn(
            self.ring,
            self.side,
            shape,
            |j| (self.rank(j + i), self.relations(j + i)),
            |j| self.differential(j + i).scale(sign),
        )
        .expect("suspension of a complex")
    }

    /// `Hom(C, A)`; all terms must be free.
    pub fn dualize(&self) -> Result<Complex> {
        if !self.is_free() {
            return Err(Error::Precondition("only complexes of free modules can be dualized".into()));
        }
        let shape = Shape::covering(&[
            Dependency::reflected(self.shape(), 0),
            Dependency::reflected(self.shape(), -1),
        ]);
        let ring = self.ring;
        Complex::from_fn(
            ring,
            self.side.opposite(),
            shape,
            |j| (self.rank(-j), RingMatrix::zeros(ring, self.rank(-j), 0)),
            |j| self.differential(-j - 1).transpose(),
        )
    }

    /// `⊕ C_k`.
    pub fn direct_sum(parts: &[Complex]) -> Result<Complex> {
        let Some(first) = parts.first() else {
            return Err(Error::Precondition("empty coproduct needs a ring".into()));
        };
        for p in parts {
            first.same_ring(p)?;
        }
        let deps: Vec<Dependency> = parts.iter().map(|p| Dependency::at(p.shape(), 0)).collect();
        let shape = Shape::covering(&deps);
        let ring = first.ring;
        let block = |mats: Vec<RingMatrix>| {
            mats.into_iter().reduce(|a, b| a.block_diag(&b)).unwrap()
        };
        Complex::from_fn(
            ring,
            first.side,
            shape,
            |j| {
                let rank = parts.iter().map(|p| p.rank(j)).sum();
                (rank, block(parts.iter().map(|p| p.relations(j)).collect()))
            },
            |j| block(parts.iter().map(|p| p.differential(j)).collect()),
        )
    }

    /// Whether `self` and `other` agree degreewise on `window`.
    pub fn agrees_on(&self, other: &Complex, window: Window) -> bool {
        window.degrees().all(|j| {
            self.rank(j) == other.rank(j)
                && self.relations(j) == other.relations(j)
                && self.differential(j) == other.differential(j)
        })
    }

    /// Structural equality as functions of the degree (not just storage).
    pub fn same_as(&self, other: &Complex) -> bool {
        if self.ring != other.ring || self.side != other.side {
            return false;
        }
        let a = self.shape().check_range(0);
        let b = other.shape().check_range(0);
        let w = Window::new(a.0.min(b.0), a.1.max(b.1));
        self.agrees_on(other, w)
    }
}

/// A chain map; components are `target.rank(j) x source.rank(j)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainMap {
    source: Complex,
    target: Complex,
    components: Graded<RingMatrix>,
}

impl ChainMap {
    pub fn new(source: Complex, target: Complex, components: Graded<RingMatrix>) -> Result<ChainMap> {
        source.same_ring(&target)?;
        let f = ChainMap { source, target, components };
        f.validate()?;
        Ok(f)
    }

    pub fn from_fn(source: &Complex, target: &Complex, f: impl FnMut(Degree) -> RingMatrix) -> Result<ChainMap> {
        let shape = Shape::covering(&[Dependency::at(source.shape(), 0), Dependency::at(target.shape(), 0)]);
        ChainMap::new(source.clone(), target.clone(), Graded::from_fn(shape, f))
    }

    /// A map with finitely many non-zero components.
    pub fn from_components(
        source: &Complex,
        target: &Complex,
        components: &std::collections::BTreeMap<Degree, RingMatrix>,
    ) -> Result<ChainMap> {
        let ring = source.ring;
        let (lo, hi) = match (components.keys().next(), components.keys().next_back()) {
            (Some(&a), Some(&b)) => (a, b),
            _ => (0, 0),
        };
        let comps = Graded::from_fn(Shape::bounded(lo, hi), |j| {
            components.get(&j).cloned().unwrap_or_else(|| RingMatrix::zeros(ring, target.rank(j), source.rank(j)))
        });
        ChainMap::new(source.clone(), target.clone(), comps)
    }

    pub fn identity(c: &Complex) -> ChainMap {
        ChainMap::from_fn(c, c, |j| RingMatrix::identity(c.ring, c.rank(j))).expect("identity is a chain map")
    }

    pub fn zero(source: &Complex, target: &Complex) -> ChainMap {
        ChainMap::from_components(source, target, &Default::default()).expect("zero map")
    }

    pub fn source(&self) -> &Complex {
        &self.source
    }

    pub fn target(&self) -> &Complex {
        &self.target
    }

    pub fn shape(&self) -> Shape {
        self.components.shape()
    }

    pub(crate) fn components_graded(&self) -> &Graded<RingMatrix> {
        &self.components
    }

    pub fn component(&self, j: Degree) -> RingMatrix {
        self.components
            .get(j)
            .cloned()
            .unwrap_or_else(|| RingMatrix::zeros(self.source.ring, self.target.rank(j), self.source.rank(j)))
    }

    fn validate(&self) -> Result<()> {
        let deps = [
            Dependency::at(self.source.shape(), 0),
            Dependency::at(self.target.shape(), 0),
            Dependency::at(self.shape(), 0),
        ];
        let (a, b) = Shape::covering(&deps).check_range(1);
        for j in a..=b {
            let f = self.component(j);
            if f.shape() != (self.target.rank(j), self.source.rank(j)) {
                return Err(Error::DimensionMismatch(format!("component in degree {j} has shape {:?}", f.shape())));
            }
            if !self.target.term(j).vanishes(&(&f * &self.source.relations(j))) {
                return Err(Error::Invariant(format!("component in degree {j} does not respect relations")));
            }
            let lhs = &self.component(j + 1) * &self.source.differential(j);
            let rhs = &self.target.differential(j) * &f;
            if !self.target.term(j + 1).vanishes(&(&lhs - &rhs)) {
                return Err(Error::Invariant(format!("chain map fails to commute with d^{j}: {lhs} vs {rhs}")));
            }
        }
        Ok(())
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &ChainMap) -> Result<ChainMap> {
        if !self.target.same_as(&other.source) {
            return Err(Error::Precondition("composition of non-composable chain maps".into()));
        }
        let shape = Shape::covering(&[
            Dependency::at(self.shape(), 0),
            Dependency::at(other.shape(), 0),
            Dependency::at(self.source.shape(), 0),
            Dependency::at(other.target.shape(), 0),
        ]);
        let comps = Graded::from_fn(shape, |j| &other.component(j) * &self.component(j));
        ChainMap::new(self.source.clone(), other.target.clone(), comps)
    }

    pub fn add(&self, other: &ChainMap, scale: i128) -> Result<ChainMap> {
        let shape = Shape::covering(&[
            Dependency::at(self.shape(), 0),
            Dependency::at(other.shape(), 0),
            Dependency::at(self.source.shape(), 0),
            Dependency::at(self.target.shape(), 0),
        ]);
        let comps = Graded::from_fn(shape, |j| &self.component(j) + &other.component(j).scale(scale));
        ChainMap::new(self.source.clone(), self.target.clone(), comps)
    }

    /// `Σ^i f`.
    pub fn suspend(&self, i: Degree) -> ChainMap {
        let source = self.source.suspend(i);
        let target = self.target.suspend(i);
        let shape = Shape::covering(&[Dependency::at(self.shape(), i), Dependency::at(source.shape(), 0)]);
        let comps = Graded::from_fn(shape, |j| self.component(j + i));
        ChainMap::new(source, target, comps).expect("suspension of a chain map")
    }

    /// `f*: Y* -> X*` with `(f*)^j = (f^{-j})^T`.
    pub fn dualize(&self) -> Result<ChainMap> {
        let source = self.target.dualize()?;
        let target = self.source.dualize()?;
        let shape = Shape::covering(&[Dependency::reflected(self.shape(), 0), Dependency::at(source.shape(), 0)]);
        let comps = Graded::from_fn(shape, |j| self.component(-j).transpose());
        ChainMap::new(source, target, comps)
    }

    /// Degreewise equality modulo target relations on `window`.
    pub fn agrees_on(&self, other: &ChainMap, window: Window) -> bool {
        window.degrees().all(|j| {
            let (a, b) = (self.component(j), other.component(j));
            a.shape() == b.shape() && self.target.term(j).vanishes(&(&a - &b))
        })
    }
}

/// The mapping cone of `f` together with the two canonical maps of the
/// triangle `X -> Y -> cone(f) -> ΣX`.
#[derive(Clone, Debug)]
pub struct Cone {
    pub complex: Complex,
    pub inclusion: ChainMap,
    pub projection: ChainMap,
}

pub fn cone(f: &ChainMap) -> Result<Cone> {
    let x = &f.source;
    let y = &f.target;
    let ring = x.ring;
    let shape = Shape::covering(&[
        Dependency::at(x.shape(), 1),
        Dependency::at(y.shape(), 0),
        Dependency::at(f.shape(), 1),
    ]);
    let complex = Complex::from_fn(
        ring,
        y.side,
        shape,
        |j| (x.rank(j + 1) + y.rank(j), x.relations(j + 1).block_diag(&y.relations(j))),
        |j| {
            let (xa, xb, ya, yb) = (x.rank(j + 1), x.rank(j + 2), y.rank(j), y.rank(j + 1));
            let mut d = RingMatrix::zeros(ring, xb + yb, xa + ya);
            d.paste(0, 0, &x.differential(j + 1).neg());
            d.paste(xb, 0, &f.component(j + 1));
            d.paste(xb, xa, &y.differential(j));
            d
        },
    )?;
    let inclusion = ChainMap::from_fn(y, &complex, |j| {
        let mut m = RingMatrix::zeros(ring, x.rank(j + 1) + y.rank(j), y.rank(j));
        m.paste(x.rank(j + 1), 0, &RingMatrix::identity(ring, y.rank(j)));
        m
    })?;
    let sx = x.suspend(1);
    let projection = ChainMap::from_fn(&complex, &sx, |j| {
        let mut m = RingMatrix::zeros(ring, x.rank(j + 1), x.rank(j + 1) + y.rank(j));
        m.paste(0, 0, &RingMatrix::identity(ring, x.rank(j + 1)));
        m
    })?;
    Ok(Cone { complex, inclusion, projection })
}

/// `s^j: X^j -> Y^{j-1}` witnessing `f - g = d s + s d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Homotopy {
    source: Complex,
    target: Complex,
    components: Graded<RingMatrix>,
}

impl Homotopy {
    pub fn new(source: Complex, target: Complex, components: Graded<RingMatrix>) -> Homotopy {
        Homotopy { source, target, components }
    }

    pub fn zero(source: &Complex, target: &Complex) -> Homotopy {
        let ring = source.ring;
        let comps = Graded::from_fn(Shape::bounded(0, 0), |j| RingMatrix::zeros(ring, target.rank(j - 1), source.rank(j)));
        Homotopy::new(source.clone(), target.clone(), comps)
    }

    pub fn shape(&self) -> Shape {
        self.components.shape()
    }

    pub fn component(&self, j: Degree) -> RingMatrix {
        self.components
            .get(j)
            .cloned()
            .unwrap_or_else(|| RingMatrix::zeros(self.source.ring, self.target.rank(j - 1), self.source.rank(j)))
    }

    /// `(d s + s d)^j`.
    pub fn boundary(&self, j: Degree) -> RingMatrix {
        let a = &self.target.differential(j - 1) * &self.component(j);
        let b = &self.component(j + 1) * &self.source.differential(j);
        &a + &b
    }

    /// Degrees in `window` where `f - g ≠ d s + s d` (modulo target relations).
    pub fn failures(&self, f: &ChainMap, g: &ChainMap, window: Window) -> Vec<Degree> {
        window
            .degrees()
            .filter(|&j| {
                let diff = &f.component(j) - &g.component(j);
                let ds = self.boundary(j);
                diff.shape() != ds.shape() || !self.target.term(j).vanishes(&(&diff - &ds))
            })
            .collect()
    }

    /// Checks the homotopy identity on every degree needed to certify it
    /// globally (explicit regions plus one period on periodic sides), and on
    /// `window` in addition.
    pub fn verify(&self, f: &ChainMap, g: &ChainMap, window: Window) -> Result<()> {
        let shape = Shape::covering(&[
            Dependency::at(self.shape(), 0),
            Dependency::at(f.shape(), 0),
            Dependency::at(g.shape(), 0),
            Dependency::at(self.source.shape(), 0),
            Dependency::at(self.target.shape(), 0),
        ]);
        let (a, b) = shape.check_range(1);
        let w = Window::new(a.min(window.lo), b.max(window.hi));
        match self.failures(f, g, w).first() {
            None => Ok(()),
            Some(j) => Err(Error::Invariant(format!("homotopy identity fails in degree {j}"))),
        }
    }

    pub fn components_in(&self, window: Window) -> Vec<(Degree, RingMatrix)> {
        window.degrees().map(|j| (j, self.component(j))).collect()
    }
}

/// `H^j` with its generating cycles.
#[derive(Clone, Debug)]
pub struct Homology {
    pub module: FPModule,
    /// Columns: generating cycles in `C^j` coordinates.
    pub cycles: RingMatrix,
}

/// Generators of `{x : d^j x ∈ im R_{j+1}}` in `C^j` coordinates.
fn cycle_generators(c: &Complex, j: Degree) -> RingMatrix {
    let r = c.rank(j);
    let d = c.differential(j);
    let stacked = d.hstack(&c.relations(j + 1)).expect("cycle system");
    let k = kernel(&stacked);
    let top = k.submatrix(0..r, 0..k.cols());
    let nonzero: Vec<usize> = (0..top.cols()).filter(|&i| top.column(i).iter().any(|&x| x != 0)).collect();
    top.select_columns(&nonzero)
}

pub fn homology_data(c: &Complex, j: Degree) -> Homology {
    let z = cycle_generators(c, j);
    let g = z.cols();
    // Relations on the cycle generators: combinations landing in im d^{j-1} + im R_j.
    let system = z
        .hstack(&c.differential(j - 1))
        .and_then(|m| m.hstack(&c.relations(j)))
        .expect("homology system");
    let k = kernel(&system);
    let rel = k.submatrix(0..g, 0..k.cols());
    Homology { module: FPModule::new(c.side, rel), cycles: z }
}

pub fn homology(c: &Complex, j: Degree) -> FPModule {
    homology_data(c, j).module
}

/// Checks `H^j = 0` for every `j` in `window`; returns the first failure.
pub fn first_non_exact(c: &Complex, window: Window) -> Option<Degree> {
    window.degrees().find(|&j| !homology(c, j).is_zero())
}

/// `Z^j C` with its inclusion into `C^j` and, when `C` is exact at `j`,
/// the surjection `σ: C^{j-1} -> Z^j`.
#[derive(Clone, Debug)]
pub struct CycleModule {
    pub module: FPModule,
    /// `C^j`-coordinates of the generators.
    pub inclusion: RingMatrix,
    /// Generator coordinates of `σ(e_i)` for the basis of `C^{j-1}`.
    pub sigma: Option<RingMatrix>,
}

pub fn cycle_module(c: &Complex, j: Degree) -> CycleModule {
    let z = cycle_generators(c, j);
    let g = z.cols();
    let with_rel = z.hstack(&c.relations(j)).expect("cycle relations");
    let k = kernel(&with_rel);
    let module = FPModule::new(c.side, k.submatrix(0..g, 0..k.cols()));
    let sigma = if homology(c, j).is_zero() {
        solve(&with_rel, &c.differential(j - 1)).map(|x| x.submatrix(0..g, 0..x.cols()))
    } else {
        None
    };
    CycleModule { module, inclusion: z, sigma }
}

/// The map `H^j(X) -> H^j(Y)` induced by `f`, on the generators returned by
/// [`homology_data`].
pub fn induced_on_homology(f: &ChainMap, j: Degree) -> crate::module::ModuleMap {
    induced_by_matrix(&f.source, j, &f.target, j, &f.component(j))
}

/// The map `H^j(X) -> H^k(Y)` induced by a cycle-preserving matrix
/// `l: X^j -> Y^k`.
pub fn induced_by_matrix(x: &Complex, j: Degree, y: &Complex, k: Degree, l: &RingMatrix) -> crate::module::ModuleMap {
    let hx = homology_data(x, j);
    let hy = homology_data(y, k);
    let images = l * &hx.cycles;
    let g = hy.cycles.cols();
    let system = hy.cycles.hstack(&y.relations(k)).expect("induced map system");
    let sol = solve(&system, &images).expect("cycles map to cycles");
    crate::module::ModuleMap::new_unchecked(hx.module, hy.module, sol.submatrix(0..g, 0..sol.cols()))
}

/// Whether `f` induces isomorphisms on `H^j` for all `j` in `window`.
pub fn is_quasi_isomorphism_on(f: &ChainMap, window: Window) -> Option<Degree> {
    window.degrees().find(|&j| !induced_on_homology(f, j).is_isomorphism())
}
