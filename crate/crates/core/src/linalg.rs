//! Exact solving and kernels over the supported rings.
//!
//! Over `Z` the work is done by column Hermite forms. Over `Z/n` and `F_p`
//! a system `A x = b (mod n)` is lifted to the integer system
//! `[A | n I] x' = b` and the first block of `x'` is reduced mod `n`.
//!
//! Outputs are canonical, independent of the elimination order:
//!
//! * `kernel_basis` returns the column Hermite basis of the kernel lattice
//!   (over `Z/n`: of the lifted lattice `ker + nZ^k`, dropping the columns
//!   that vanish mod `n`).
//! * `solve_linear` returns the unique solution lying in the fundamental
//!   domain of that kernel basis: at every pivot row `r_i` of the kernel
//!   basis the solution entry lies in `[0, pivot_i)`.

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::hermite::{self, with_fallback, IMat, Int};
use crate::matrix::RingMatrix;
use crate::ring::{Elem, Ring};

/// Which side the unknown multiplies from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveSide {
    /// `A X = B`
    Right,
    /// `X A = B`
    Left,
}

fn to_imat<T: Int>(m: &RingMatrix) -> IMat<T> {
    IMat::from_i128(m.rows(), m.cols(), m.entries())
}

fn lifted<T: Int>(ring: Ring, a: &IMat<T>) -> IMat<T> {
    match ring.modulus() {
        None => a.clone(),
        Some(n) => {
            let mut ni = IMat::<T>::identity(a.rows);
            for i in 0..a.rows {
                ni.put(i, i, T::from_i128(n));
            }
            a.hstack(&ni)
        }
    }
}

/// Canonical kernel lattice of `A` over the ring, as (basis, pivot rows).
/// Over `Z/n` the basis is of the full-rank lattice `ker + nZ^k`.
fn kernel_lattice<T: Int>(ring: Ring, a: &IMat<T>) -> Option<(IMat<T>, Vec<usize>)> {
    let k = a.cols;
    match ring.modulus() {
        None => hermite::kernel(a),
        Some(n) => {
            let (kl, _) = hermite::kernel(&lifted(ring, a))?;
            let gens: Vec<Vec<T>> = (0..kl.cols).map(|c| kl.column(c)[..k].to_vec()).collect();
            let g = IMat::from_columns(k, &gens);
            let mut ni = IMat::<T>::identity(k);
            for i in 0..k {
                ni.put(i, i, T::from_i128(n));
            }
            hermite::lattice_basis(&g.hstack(&ni))
        }
    }
}

fn kernel_generic<T: Int>(ring: Ring, a: &IMat<T>) -> Option<Vec<Vec<i128>>> {
    let (basis, pivots) = kernel_lattice(ring, a)?;
    let mut out = Vec::new();
    for (i, &r) in pivots.iter().enumerate() {
        if let Some(n) = ring.modulus() {
            if basis.at(r, i).to_i128()? == n {
                continue;
            }
        }
        let col = basis.column(i).iter().map(|x| x.to_i128()).collect::<Option<Vec<_>>>()?;
        out.push(col.into_iter().map(|x| ring.reduce(x)).collect());
    }
    Some(out)
}

/// Solves `A x = b` for each column `b` of `bmat`; `None` in the inner
/// position means that column has no solution.
fn solve_generic<T: Int>(ring: Ring, a: &IMat<T>, bmat: &IMat<T>) -> Option<Option<Vec<Vec<i128>>>> {
    let k = a.cols;
    let lift = lifted(ring, a);
    let hf = hermite::hermite(&lift, true)?;
    let (basis, pivots) = kernel_lattice(ring, a)?;
    let mut out = Vec::with_capacity(bmat.cols);
    for c in 0..bmat.cols {
        let b = bmat.column(c);
        let Some(x) = hermite::particular(&hf, &b)? else {
            return Some(None);
        };
        let mut x: Vec<T> = x[..k].to_vec();
        if let Some(n) = ring.modulus() {
            let nn = T::from_i128(n);
            for v in x.iter_mut() {
                *v = v.rem_floor(&nn)?;
            }
        }
        hermite::reduce_into_domain(&mut x, &basis, &pivots)?;
        let x = x.iter().map(|v| v.to_i128()).collect::<Option<Vec<_>>>()?;
        out.push(x.into_iter().map(|v| ring.reduce(v)).collect());
    }
    Some(Some(out))
}

/// Solves `A X = B` (`SolveSide::Right`) or `X A = B` (`SolveSide::Left`)
/// exactly. Returns `Ok(None)` when no solution exists.
pub fn solve_linear(a: &RingMatrix, b: &RingMatrix, side: SolveSide) -> Result<Option<RingMatrix>> {
    if a.ring() != b.ring() {
        return Err(Error::RingMismatch(a.ring(), b.ring()));
    }
    match side {
        SolveSide::Left => {
            if a.cols() != b.cols() {
                return Err(Error::DimensionMismatch(format!(
                    "X A = B with A {}x{} and B {}x{}",
                    a.rows(),
                    a.cols(),
                    b.rows(),
                    b.cols()
                )));
            }
            Ok(solve_linear(&a.transpose(), &b.transpose(), SolveSide::Right)?.map(|x| x.transpose()))
        }
        SolveSide::Right => {
            if a.rows() != b.rows() {
                return Err(Error::DimensionMismatch(format!(
                    "A X = B with A {}x{} and B {}x{}",
                    a.rows(),
                    a.cols(),
                    b.rows(),
                    b.cols()
                )));
            }
            let ring = a.ring();
            let cols = with_fallback(
                || solve_generic::<i128>(ring, &to_imat(a), &to_imat(b)),
                || solve_generic::<BigInt>(ring, &to_imat(a), &to_imat(b)),
            );
            Ok(cols.map(|cols| {
                let mut x = RingMatrix::from_columns(ring, a.cols(), &cols);
                if cols.is_empty() {
                    x = RingMatrix::zeros(ring, a.cols(), 0);
                }
                x
            }))
        }
    }
}

/// Right solve that panics on dimension errors; for internal call sites
/// whose shapes are correct by construction.
pub(crate) fn solve(a: &RingMatrix, b: &RingMatrix) -> Option<RingMatrix> {
    solve_linear(a, b, SolveSide::Right).expect("internal solve shape")
}

/// Generators of the kernel: columns `K` with `A K = 0` (right) or rows
/// with `K A = 0` (left). May have zero columns/rows.
pub fn kernel_basis(a: &RingMatrix, side: SolveSide) -> RingMatrix {
    match side {
        SolveSide::Left => kernel_basis(&a.transpose(), SolveSide::Right).transpose(),
        SolveSide::Right => {
            let ring = a.ring();
            let cols = with_fallback(
                || kernel_generic::<i128>(ring, &to_imat(a)),
                || kernel_generic::<BigInt>(ring, &to_imat(a)),
            );
            RingMatrix::from_columns(ring, a.cols(), &cols)
        }
    }
}

/// Right kernel generators.
pub fn kernel(a: &RingMatrix) -> RingMatrix {
    kernel_basis(a, SolveSide::Right)
}

/// Smith invariants of the module presented by `a` (cokernel of `a`),
/// as the list of non-unit invariant factors; `0` stands for a free
/// summand over `Z`. Over `Z/n` the presentation is lifted first.
pub fn cokernel_invariants(a: &RingMatrix) -> Vec<Elem> {
    let ring = a.ring();
    let rows = a.rows();
    let run = |lift: &IMat<i128>| -> Vec<Elem> {
        let d = with_fallback(
            || hermite::smith_diagonal::<i128>(lift),
            || {
                hermite::smith_diagonal::<BigInt>(&IMat::from_i128(lift.rows, lift.cols, &lift.d))
                    .and_then(|d| d.iter().map(|x| x.to_i128()).collect::<Option<Vec<_>>>())
            },
        );
        let mut factors: Vec<Elem> = d.into_iter().filter(|&x| x != 1).collect();
        factors.extend(std::iter::repeat(0).take(rows.saturating_sub(lift.cols.min(rows))));
        factors
    };
    let lift = lifted(ring, &to_imat::<i128>(a));
    run(&lift)
}
