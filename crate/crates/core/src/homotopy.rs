//! Null-homotopies: a direct linear solve, and the constructive route through
//! projective cycle modules.

use crate::complex::{cycle_module, homology, ChainMap, Complex, Homotopy};
use crate::error::{Error, Result};
use crate::graded::{Dependency, Graded, Shape, Window};
use crate::linalg::solve;
use crate::matrix::RingMatrix;
use crate::module::{is_projective, FPModule, ModuleMap};
use crate::Degree;

/// Solves `f^j = d_Y^{j-1} s^j + s^{j+1} d_X^j` for all `j` at once.
///
/// The unknowns live on the covering shape of `f`, its source and its
/// target, so for eventually periodic inputs a solution is a periodic
/// homotopy valid in every degree. Returns `None` when no homotopy exists
/// (for periodic inputs: no homotopy with that periodicity).
pub fn null_homotopy_witness(f: &ChainMap) -> Result<Option<Homotopy>> {
    let x = f.source();
    let y = f.target();
    if !x.is_free() {
        return Err(Error::Precondition("null-homotopies are solved for complexes of free modules".into()));
    }
    let ring = x.ring();
    let shape = Shape::covering(&[
        Dependency::at(x.shape(), 0),
        Dependency::at(y.shape(), 0),
        Dependency::at(f.shape(), 0),
    ]);
    let slots = Graded::from_fn(shape, |j| (j, y.rank(j - 1) * x.rank(j)));
    let mut offsets = Vec::with_capacity(slots.items().len());
    let mut total = 0;
    for &(_, n) in slots.items() {
        offsets.push(total);
        total += n;
    }
    let (a, b) = shape.check_range(1);
    // Extra unknowns absorb the relations of target terms.
    let rel_cols: usize = (a..=b).map(|j| y.relations(j).cols() * x.rank(j)).sum();
    let eq_rows: usize = (a..=b).map(|j| y.rank(j) * x.rank(j)).sum();
    let mut system = RingMatrix::zeros(ring, eq_rows, total + rel_cols);
    let mut rhs = RingMatrix::zeros(ring, eq_rows, 1);
    let (mut row, mut rel_col) = (0, total);
    for j in a..=b {
        let (yj, xj) = (y.rank(j), x.rank(j));
        let len = yj * xj;
        if len == 0 {
            continue;
        }
        if let Some(k) = slots.index(j) {
            let m = y.differential(j - 1).kron(&RingMatrix::identity(ring, xj));
            add_block(&mut system, row, offsets[k], &m);
        }
        if let Some(k) = slots.index(j + 1) {
            let m = RingMatrix::identity(ring, yj).kron(&x.differential(j).transpose());
            add_block(&mut system, row, offsets[k], &m);
        }
        let rel = y.relations(j);
        if rel.cols() > 0 {
            let m = rel.kron(&RingMatrix::identity(ring, xj));
            system.paste(row, rel_col, &m);
            rel_col += m.cols();
        }
        rhs.paste(row, 0, &f.component(j).vectorize());
        row += len;
    }
    let Some(sol) = solve(&system, &rhs) else {
        return Ok(None);
    };
    let v = sol.column(0);
    let comps = Graded::from_fn(shape, |j| {
        let k = slots.index(j).expect("degree inside the covering shape");
        let (rows, cols) = (y.rank(j - 1), x.rank(j));
        RingMatrix::unvectorize(&v[offsets[k]..offsets[k] + rows * cols], ring, rows, cols)
    });
    let h = Homotopy::new(x.clone(), y.clone(), comps);
    let zero = ChainMap::zero(x, y);
    h.verify(f, &zero, Window::new(a, b))?;
    Ok(Some(h))
}

/// Accumulates `m` into `target` at the given offset (two equations can
/// touch the same unknown block when periods are short).
fn add_block(target: &mut RingMatrix, r0: usize, c0: usize, m: &RingMatrix) {
    for r in 0..m.rows() {
        for c in 0..m.cols() {
            let v = target.ring().add(target.get(r0 + r, c0 + c), m.get(r, c));
            target.set(r0 + r, c0 + c, v);
        }
    }
}

/// Outcome of [`split_exactness_check`].
#[derive(Clone, Debug)]
pub enum SplitVerdict {
    /// Exact with projective cycles; the homotopy satisfies
    /// `id = d s + s d` on `window`.
    SplitExact {
        window: Window,
        homotopy: Homotopy,
        sections: Vec<(Degree, ModuleMap)>,
    },
    ExactNotSplit { degree: Degree, cycle: FPModule },
    NotExact { degree: Degree, homology: FPModule },
}

impl SplitVerdict {
    pub fn is_split(&self) -> bool {
        matches!(self, SplitVerdict::SplitExact { .. })
    }
}

struct CycleSplit {
    /// `C^j` coordinates of the cycle generators.
    inclusion: RingMatrix,
    /// `t_j: Z^j -> C^{j-1}` with `d^{j-1} t_j = inclusion`.
    lift: RingMatrix,
}

/// Checks exactness and cycle projectivity, then assembles
/// `s^j = t_j π_j`, where `t_j` splits `C^{j-1} -> Z^j` and
/// `π_j = id - t_{j+1} d^j` retracts `C^j` onto `Z^j`.
///
/// Homology and projectivity are examined on `window.lo ..= window.hi + 2`,
/// the degrees the homotopy identity on `window` depends on.
pub fn split_exactness_check(c: &Complex, window: Window) -> Result<SplitVerdict> {
    if !c.is_free() {
        return Err(Error::Precondition("split exactness is checked for complexes of free modules".into()));
    }
    let ring = c.ring();
    let (a, b) = (window.lo, window.hi + 2);
    for j in a..=b {
        let h = homology(c, j);
        if !h.is_zero() {
            return Ok(SplitVerdict::NotExact { degree: j, homology: h });
        }
    }
    let mut splits = std::collections::BTreeMap::new();
    let mut sections = Vec::new();
    for j in a..=b {
        let z = cycle_module(c, j);
        let Some(section) = is_projective(&z.module) else {
            return Ok(SplitVerdict::ExactNotSplit { degree: j, cycle: z.module });
        };
        let t = solve(&c.differential(j - 1), &z.inclusion)
            .ok_or_else(|| Error::Internal(format!("cycles in degree {j} are not boundaries")))?;
        let lift = &t * section.matrix();
        splits.insert(j, CycleSplit { inclusion: z.inclusion, lift });
        sections.push((j, section));
    }
    let comps = Graded::from_fn(Shape::bounded(a, b - 1), |j| {
        let here = &splits[&j];
        let next = &splits[&(j + 1)];
        let delta = solve(&next.inclusion, &c.differential(j)).expect("d^j lands in the next cycles");
        let retract = &RingMatrix::identity(ring, c.rank(j)) - &(&next.lift * &delta);
        let w = solve(&here.inclusion, &retract).expect("the retraction lands in the cycles");
        &here.lift * &w
    });
    let homotopy = Homotopy::new(c.clone(), c.clone(), comps);
    let id = ChainMap::identity(c);
    let zero = ChainMap::zero(c, c);
    let bad = homotopy.failures(&id, &zero, window);
    if let Some(j) = bad.first() {
        return Err(Error::Internal(format!("assembled homotopy fails in degree {j}")));
    }
    Ok(SplitVerdict::SplitExact { window, homotopy, sections })
}
