//! Integer Hermite and Smith normal forms.
//!
//! Everything here is generic over [`Int`] so that the same code runs on
//! `i128` (fast path, every operation checked) and on `BigInt` (fallback when
//! an intermediate value overflows). A `None` return always means "overflow,
//! retry with a wider type".
//!
//! Column Hermite form of `A` is `H = A U` with `U` unimodular and `H` in
//! column echelon form: the pivot of column `i` sits in row `r_i` with
//! `r_0 < r_1 < ...`, is positive, everything above it is zero, and the
//! entries to its left in row `r_i` lie in `[0, pivot)`. Zero columns come last.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

pub(crate) trait Int: Clone + Debug + PartialEq {
    fn from_i128(v: i128) -> Self;
    fn to_i128(&self) -> Option<i128>;
    fn is_zero(&self) -> bool;
    fn is_negative(&self) -> bool;
    fn add(&self, o: &Self) -> Option<Self>;
    fn sub(&self, o: &Self) -> Option<Self>;
    fn mul(&self, o: &Self) -> Option<Self>;
    fn neg(&self) -> Option<Self>;
    /// Floor division; `o` is non-zero.
    fn div_floor(&self, o: &Self) -> Option<Self>;
    fn rem_floor(&self, o: &Self) -> Option<Self>;
}

impl Int for i128 {
    fn from_i128(v: i128) -> Self {
        v
    }
    fn to_i128(&self) -> Option<i128> {
        Some(*self)
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn is_negative(&self) -> bool {
        *self < 0
    }
    fn add(&self, o: &Self) -> Option<Self> {
        self.checked_add(*o)
    }
    fn sub(&self, o: &Self) -> Option<Self> {
        self.checked_sub(*o)
    }
    fn mul(&self, o: &Self) -> Option<Self> {
        self.checked_mul(*o)
    }
    fn neg(&self) -> Option<Self> {
        self.checked_neg()
    }
    fn div_floor(&self, o: &Self) -> Option<Self> {
        if *self == i128::MIN {
            return None;
        }
        Some(Integer::div_floor(self, o))
    }
    fn rem_floor(&self, o: &Self) -> Option<Self> {
        if *self == i128::MIN {
            return None;
        }
        Some(Integer::mod_floor(self, o))
    }
}

impl Int for BigInt {
    fn from_i128(v: i128) -> Self {
        BigInt::from(v)
    }
    fn to_i128(&self) -> Option<i128> {
        ToPrimitive::to_i128(self)
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }
    fn add(&self, o: &Self) -> Option<Self> {
        Some(self + o)
    }
    fn sub(&self, o: &Self) -> Option<Self> {
        Some(self - o)
    }
    fn mul(&self, o: &Self) -> Option<Self> {
        Some(self * o)
    }
    fn neg(&self) -> Option<Self> {
        Some(-self)
    }
    fn div_floor(&self, o: &Self) -> Option<Self> {
        Some(Integer::div_floor(self, o))
    }
    fn rem_floor(&self, o: &Self) -> Option<Self> {
        Some(Integer::mod_floor(self, o))
    }
}

/// Row-major integer matrix used by the normal-form routines.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct IMat<T> {
    pub rows: usize,
    pub cols: usize,
    pub d: Vec<T>,
}

impl<T: Int> IMat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IMat { rows, cols, d: vec![T::from_i128(0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.d[i * n + i] = T::from_i128(1);
        }
        m
    }

    pub fn from_i128(rows: usize, cols: usize, d: &[i128]) -> Self {
        IMat { rows, cols, d: d.iter().map(|&x| T::from_i128(x)).collect() }
    }

    #[cfg(test)]
    pub fn to_i128(&self) -> Option<IMat<i128>> {
        let d = self.d.iter().map(|x| x.to_i128()).collect::<Option<Vec<_>>>()?;
        Some(IMat { rows: self.rows, cols: self.cols, d })
    }

    #[inline]
    pub fn at(&self, r: usize, c: usize) -> &T {
        &self.d[r * self.cols + c]
    }

    #[inline]
    pub fn put(&mut self, r: usize, c: usize, v: T) {
        self.d[r * self.cols + c] = v;
    }

    pub fn column(&self, c: usize) -> Vec<T> {
        (0..self.rows).map(|r| self.at(r, c).clone()).collect()
    }

    pub fn from_columns(rows: usize, cols: &[Vec<T>]) -> Self {
        let mut m = Self::zeros(rows, cols.len());
        for (c, col) in cols.iter().enumerate() {
            for (r, v) in col.iter().enumerate() {
                m.put(r, c, v.clone());
            }
        }
        m
    }

    pub fn hstack(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows);
        let mut cols: Vec<Vec<T>> = (0..self.cols).map(|c| self.column(c)).collect();
        cols.extend((0..other.cols).map(|c| other.column(c)));
        Self::from_columns(self.rows, &cols)
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        for r in 0..self.rows {
            self.d.swap(r * self.cols + a, r * self.cols + b);
        }
    }

    fn negate_col(&mut self, c: usize) -> Option<()> {
        for r in 0..self.rows {
            let v = self.at(r, c).neg()?;
            self.put(r, c, v);
        }
        Some(())
    }

    /// `col[dst] -= q * col[src]`
    fn axpy_col(&mut self, dst: usize, src: usize, q: &T) -> Option<()> {
        if q.is_zero() {
            return Some(());
        }
        for r in 0..self.rows {
            let s = self.at(r, src);
            if s.is_zero() {
                continue;
            }
            let v = self.at(r, dst).sub(&s.mul(q)?)?;
            self.put(r, dst, v);
        }
        Some(())
    }

    /// `(col[a], col[b]) <- (s col[a] + t col[b], u col[a] + v col[b])`
    fn combine_cols(&mut self, a: usize, b: usize, s: &T, t: &T, u: &T, v: &T) -> Option<()> {
        for r in 0..self.rows {
            let x = self.at(r, a).clone();
            let y = self.at(r, b).clone();
            if x.is_zero() && y.is_zero() {
                continue;
            }
            let na = s.mul(&x)?.add(&t.mul(&y)?)?;
            let nb = u.mul(&x)?.add(&v.mul(&y)?)?;
            self.put(r, a, na);
            self.put(r, b, nb);
        }
        Some(())
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.put(c, r, self.at(r, c).clone());
            }
        }
        t
    }
}

/// Returns `(g, s, t)` with `g = s a + t b >= 0`.
pub(crate) fn ext_gcd<T: Int>(a: &T, b: &T) -> Option<(T, T, T)> {
    let (mut r0, mut r1) = (a.clone(), b.clone());
    let (mut s0, mut s1) = (T::from_i128(1), T::from_i128(0));
    let (mut t0, mut t1) = (T::from_i128(0), T::from_i128(1));
    while !r1.is_zero() {
        let q = r0.div_floor(&r1)?;
        let r2 = r0.sub(&q.mul(&r1)?)?;
        let s2 = s0.sub(&q.mul(&s1)?)?;
        let t2 = t0.sub(&q.mul(&t1)?)?;
        r0 = std::mem::replace(&mut r1, r2);
        s0 = std::mem::replace(&mut s1, s2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    if r0.is_negative() {
        Some((r0.neg()?, s0.neg()?, t0.neg()?))
    } else {
        Some((r0, s0, t0))
    }
}

pub(crate) struct Hermite<T> {
    pub h: IMat<T>,
    /// Unimodular transform with `A U = H`, present when requested.
    pub u: Option<IMat<T>>,
    pub pivot_rows: Vec<usize>,
}

impl<T> Hermite<T> {
    pub fn rank(&self) -> usize {
        self.pivot_rows.len()
    }
}

/// Column Hermite normal form. Pivoting rule: rows are scanned top to
/// bottom; in each row the entries right of the current pivot column are
/// folded into it by extended-gcd column operations (plain subtraction when
/// the pivot already divides), the pivot is made positive and the entries to
/// its left in that row are reduced into `[0, pivot)`.
pub(crate) fn hermite<T: Int>(a: &IMat<T>, with_u: bool) -> Option<Hermite<T>> {
    let mut h = a.clone();
    let mut u = with_u.then(|| IMat::<T>::identity(a.cols));
    let mut pivot_rows = Vec::new();
    let mut col = 0;
    for r in 0..h.rows {
        if col >= h.cols {
            break;
        }
        for j in col + 1..h.cols {
            if h.at(r, j).is_zero() {
                continue;
            }
            let a_ = h.at(r, col).clone();
            let b_ = h.at(r, j).clone();
            if a_.is_zero() {
                h.swap_cols(col, j);
                if let Some(u) = u.as_mut() {
                    u.swap_cols(col, j);
                }
                continue;
            }
            if b_.rem_floor(&a_)?.is_zero() {
                let q = b_.div_floor(&a_)?;
                h.axpy_col(j, col, &q)?;
                if let Some(u) = u.as_mut() {
                    u.axpy_col(j, col, &q)?;
                }
                continue;
            }
            let (g, s, t) = ext_gcd(&a_, &b_)?;
            let u_ = b_.div_floor(&g)?.neg()?;
            let v_ = a_.div_floor(&g)?;
            h.combine_cols(col, j, &s, &t, &u_, &v_)?;
            if let Some(u) = u.as_mut() {
                u.combine_cols(col, j, &s, &t, &u_, &v_)?;
            }
        }
        if h.at(r, col).is_zero() {
            continue;
        }
        if h.at(r, col).is_negative() {
            h.negate_col(col)?;
            if let Some(u) = u.as_mut() {
                u.negate_col(col)?;
            }
        }
        let p = h.at(r, col).clone();
        for j in 0..col {
            let q = h.at(r, j).div_floor(&p)?;
            h.axpy_col(j, col, &q)?;
            if let Some(u) = u.as_mut() {
                u.axpy_col(j, col, &q)?;
            }
        }
        pivot_rows.push(r);
        col += 1;
    }
    Some(Hermite { h, u, pivot_rows })
}

/// Canonical basis of the lattice spanned by the columns of `gens`.
pub(crate) fn lattice_basis<T: Int>(gens: &IMat<T>) -> Option<(IMat<T>, Vec<usize>)> {
    let hf = hermite(gens, false)?;
    let cols: Vec<Vec<T>> = (0..hf.rank()).map(|c| hf.h.column(c)).collect();
    Some((IMat::from_columns(gens.rows, &cols), hf.pivot_rows))
}

/// Canonical basis (column Hermite form) of the integer kernel of `a`.
pub(crate) fn kernel<T: Int>(a: &IMat<T>) -> Option<(IMat<T>, Vec<usize>)> {
    let hf = hermite(a, true)?;
    let u = hf.u.as_ref().unwrap();
    let cols: Vec<Vec<T>> = (hf.rank()..a.cols).map(|c| u.column(c)).collect();
    lattice_basis(&IMat::from_columns(a.cols, &cols))
}

/// Some integer solution of `A x = b`, given the Hermite data of `A`.
/// Outer `None`: overflow. Inner `None`: no solution.
pub(crate) fn particular<T: Int>(hf: &Hermite<T>, b: &[T]) -> Option<Option<Vec<T>>> {
    let h = &hf.h;
    let u = hf.u.as_ref().expect("particular solution needs the transform");
    let rank = hf.rank();
    let mut y: Vec<T> = Vec::with_capacity(rank);
    for (i, &r) in hf.pivot_rows.iter().enumerate() {
        let mut c = b[r].clone();
        for (l, yl) in y.iter().enumerate() {
            c = c.sub(&h.at(r, l).mul(yl)?)?;
        }
        let p = h.at(r, i);
        if !c.rem_floor(p)?.is_zero() {
            return Some(None);
        }
        y.push(c.div_floor(p)?);
    }
    for (r, br) in b.iter().enumerate().take(h.rows) {
        let mut acc = T::from_i128(0);
        for (l, yl) in y.iter().enumerate() {
            acc = acc.add(&h.at(r, l).mul(yl)?)?;
        }
        if acc != *br {
            return Some(None);
        }
    }
    let mut x = vec![T::from_i128(0); h.cols];
    for (c, xc) in x.iter_mut().enumerate() {
        let mut acc = T::from_i128(0);
        for (l, yl) in y.iter().enumerate() {
            acc = acc.add(&u.at(c, l).mul(yl)?)?;
        }
        *xc = acc;
    }
    Some(Some(x))
}

/// Reduces `x` modulo the lattice with echelon basis `basis` (pivot rows
/// `pivots`) into the fundamental domain `0 <= x[r_i] < pivot_i`.
pub(crate) fn reduce_into_domain<T: Int>(x: &mut [T], basis: &IMat<T>, pivots: &[usize]) -> Option<()> {
    for (i, &r) in pivots.iter().enumerate() {
        let p = basis.at(r, i).clone();
        let q = x[r].div_floor(&p)?;
        if q.is_zero() {
            continue;
        }
        for (row, xr) in x.iter_mut().enumerate() {
            let b = basis.at(row, i);
            if !b.is_zero() {
                *xr = xr.sub(&b.mul(&q)?)?;
            }
        }
    }
    Some(())
}

/// Diagonal of the Smith normal form (non-negative, each dividing the next),
/// padded with zeros to `min(rows, cols)`.
pub(crate) fn smith_diagonal<T: Int>(a: &IMat<T>) -> Option<Vec<T>> {
    let mut m = a.clone();
    // Alternate column and row Hermite forms until the matrix is diagonal.
    loop {
        m = hermite(&m, false)?.h;
        m = hermite(&m.transpose(), false)?.h.transpose();
        let diagonal = (0..m.rows).all(|r| (0..m.cols).all(|c| r == c || m.at(r, c).is_zero()));
        if diagonal {
            break;
        }
    }
    let n = m.rows.min(m.cols);
    let mut d: Vec<T> = (0..n).map(|i| m.at(i, i).clone()).collect();
    for x in d.iter_mut() {
        if x.is_negative() {
            *x = x.neg()?;
        }
    }
    // Enforce divisibility: (a, b) -> (gcd, lcm).
    for i in 0..n {
        for j in i + 1..n {
            let (a_, b_) = (d[i].clone(), d[j].clone());
            if a_.is_zero() && !b_.is_zero() {
                d.swap(i, j);
                continue;
            }
            if a_.is_zero() || b_.is_zero() {
                continue;
            }
            let (g, _, _) = ext_gcd(&a_, &b_)?;
            let l = a_.div_floor(&g)?.mul(&b_)?;
            d[i] = g;
            d[j] = l;
        }
    }
    Some(d)
}

/// Runs `f` on `i128`, falling back to `BigInt` on overflow.
pub(crate) fn with_fallback<R>(
    fast: impl FnOnce() -> Option<R>,
    slow: impl FnOnce() -> Option<R>,
) -> R {
    match fast() {
        Some(r) => r,
        None => slow().expect("arbitrary-precision arithmetic cannot overflow"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: usize, cols: usize, d: &[i128]) -> IMat<i128> {
        IMat::from_i128(rows, cols, d)
    }

    fn mul(a: &IMat<i128>, b: &IMat<i128>) -> IMat<i128> {
        let mut out = IMat::zeros(a.rows, b.cols);
        for i in 0..a.rows {
            for j in 0..b.cols {
                let s: i128 = (0..a.cols).map(|k| a.at(i, k) * b.at(k, j)).sum();
                out.put(i, j, s);
            }
        }
        out
    }

    #[test]
    fn hermite_transform_is_consistent() {
        let a = m(2, 3, &[2, 3, 4, 6, -9, 12]);
        let hf = hermite(&a, true).unwrap();
        assert_eq!(mul(&a, hf.u.as_ref().unwrap()), hf.h);
        assert_eq!(hf.rank(), 2);
        assert!(*hf.h.at(0, 0) > 0);
        assert_eq!(*hf.h.at(0, 1), 0);
    }

    #[test]
    fn kernel_of_two_three_row() {
        let (k, _) = kernel(&m(1, 2, &[2, 3])).unwrap();
        assert_eq!(k, m(2, 1, &[3, -2]));
    }

    #[test]
    fn smith_of_small_matrix() {
        let d = smith_diagonal(&m(2, 2, &[2, 0, 0, 3])).unwrap();
        assert_eq!(d, vec![1, 6]);
        let d = smith_diagonal(&m(2, 3, &[2, 4, 4, -6, 6, 12])).unwrap();
        assert_eq!(d, vec![2, 6]);
    }

    #[test]
    fn bigint_agrees_with_i128() {
        let a = [3i128, 5, 7, 11, -13, 17, 19, 23, 2];
        let fast = kernel(&m(3, 3, &a)).unwrap().0;
        let slow = kernel(&IMat::<BigInt>::from_i128(3, 3, &a)).unwrap().0.to_i128().unwrap();
        assert_eq!(fast, slow);
    }
}
