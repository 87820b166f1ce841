//! Dense matrices with entries in one of the supported rings.
//!
//! Matrices act on column vectors: an `r x c` matrix is a map `A^c -> A^r`.
//! Zero-row and zero-column matrices are legal and stand for maps to or from
//! the zero module.

use std::fmt;

use crate::error::{Error, Result};
use crate::ring::{Elem, Ring};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RingMatrix {
    ring: Ring,
    rows: usize,
    cols: usize,
    data: Vec<Elem>,
}

impl fmt::Debug for RingMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{} over {} {:?}", self.rows, self.cols, self.ring, self.to_rows())
    }
}

impl fmt::Display for RingMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .to_rows()
            .iter()
            .map(|r| r.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(" "))
            .collect();
        write!(f, "[{}] ({}x{})", rows.join("; "), self.rows, self.cols)
    }
}

impl RingMatrix {
    pub fn zeros(ring: Ring, rows: usize, cols: usize) -> RingMatrix {
        RingMatrix { ring, rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(ring: Ring, n: usize) -> RingMatrix {
        let mut m = RingMatrix::zeros(ring, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    /// Builds a matrix from row-major data, reducing every entry.
    pub fn new(ring: Ring, rows: usize, cols: usize, data: Vec<Elem>) -> Result<RingMatrix> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        let data = data.into_iter().map(|x| ring.reduce(x)).collect();
        Ok(RingMatrix { ring, rows, cols, data })
    }

    /// Like [`RingMatrix::new`] but rejects non-canonical entries instead of reducing them.
    pub fn new_canonical(ring: Ring, rows: usize, cols: usize, data: Vec<Elem>) -> Result<RingMatrix> {
        if let Some(bad) = data.iter().find(|&&x| !ring.is_canonical(x)) {
            return Err(Error::Invariant(format!("entry {bad} is not a canonical representative over {ring}")));
        }
        RingMatrix::new(ring, rows, cols, data)
    }

    /// Builds from nested rows; `cols` is needed for the zero-row case.
    pub fn from_rows(ring: Ring, rows: &[Vec<Elem>], cols: usize) -> Result<RingMatrix> {
        if let Some(r) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch(format!("row of length {} in a matrix with {cols} columns", r.len())));
        }
        RingMatrix::new(ring, rows.len(), cols, rows.concat())
    }

    /// Short-hand for tests and examples; panics on ragged input.
    pub fn from_vec(ring: Ring, rows: Vec<Vec<Elem>>) -> RingMatrix {
        let cols = rows.first().map_or(0, |r| r.len());
        RingMatrix::from_rows(ring, &rows, cols).expect("ragged matrix literal")
    }

    pub fn column_vector(ring: Ring, v: &[Elem]) -> RingMatrix {
        RingMatrix::new(ring, v.len(), 1, v.to_vec()).unwrap()
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, r: usize, c: usize) -> Elem {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Elem) {
        self.data[r * self.cols + c] = self.ring.reduce(v);
    }

    pub fn entries(&self) -> &[Elem] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<Elem>> {
        (0..self.rows).map(|r| self.data[r * self.cols..(r + 1) * self.cols].to_vec()).collect()
    }

    pub fn column(&self, c: usize) -> Vec<Elem> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn columns(&self) -> Vec<Vec<Elem>> {
        (0..self.cols).map(|c| self.column(c)).collect()
    }

    pub fn from_columns(ring: Ring, rows: usize, cols: &[Vec<Elem>]) -> RingMatrix {
        let mut m = RingMatrix::zeros(ring, rows, cols.len());
        for (c, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), rows, "column length");
            for (r, &v) in col.iter().enumerate() {
                m.set(r, c, v);
            }
        }
        m
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols && *self == RingMatrix::identity(self.ring, self.rows)
    }

    pub fn transpose(&self) -> RingMatrix {
        let mut t = RingMatrix::zeros(self.ring, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.data[c * self.rows + r] = self.get(r, c);
            }
        }
        t
    }

    fn same_ring(&self, other: &RingMatrix) -> Result<()> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch(self.ring, other.ring));
        }
        Ok(())
    }

    pub fn try_mul(&self, other: &RingMatrix) -> Result<RingMatrix> {
        self.same_ring(other)?;
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let ring = self.ring;
        let mut out = RingMatrix::zeros(ring, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b != 0 {
                        let idx = i * other.cols + j;
                        out.data[idx] = ring.add(out.data[idx], ring.mul(a, b));
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn try_add(&self, other: &RingMatrix) -> Result<RingMatrix> {
        self.same_ring(other)?;
        if self.shape() != other.shape() {
            return Err(Error::DimensionMismatch(format!(
                "cannot add {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let ring = self.ring;
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| ring.add(a, b)).collect();
        Ok(RingMatrix { ring, rows: self.rows, cols: self.cols, data })
    }

    pub fn try_sub(&self, other: &RingMatrix) -> Result<RingMatrix> {
        self.try_add(&other.neg())
    }

    pub fn neg(&self) -> RingMatrix {
        self.scale(-1)
    }

    pub fn scale(&self, s: Elem) -> RingMatrix {
        let ring = self.ring;
        let s = ring.reduce(s);
        RingMatrix { ring, rows: self.rows, cols: self.cols, data: self.data.iter().map(|&a| ring.mul(a, s)).collect() }
    }

    /// `[self | other]`
    pub fn hstack(&self, other: &RingMatrix) -> Result<RingMatrix> {
        self.same_ring(other)?;
        if self.rows != other.rows {
            return Err(Error::DimensionMismatch(format!("hstack of {} and {} rows", self.rows, other.rows)));
        }
        let mut out = RingMatrix::zeros(self.ring, self.rows, self.cols + other.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.data[r * out.cols + c] = self.get(r, c);
            }
            for c in 0..other.cols {
                out.data[r * out.cols + self.cols + c] = other.get(r, c);
            }
        }
        Ok(out)
    }

    /// `[self; other]`
    pub fn vstack(&self, other: &RingMatrix) -> Result<RingMatrix> {
        Ok(self.transpose().hstack(&other.transpose())?.transpose())
    }

    pub fn block_diag(&self, other: &RingMatrix) -> RingMatrix {
        assert_eq!(self.ring, other.ring, "block_diag over different rings");
        let mut out = RingMatrix::zeros(self.ring, self.rows + other.rows, self.cols + other.cols);
        out.paste(0, 0, self);
        out.paste(self.rows, self.cols, other);
        out
    }

    /// Copies `block` into `self` with its top-left corner at `(r0, c0)`.
    pub fn paste(&mut self, r0: usize, c0: usize, block: &RingMatrix) {
        assert!(r0 + block.rows <= self.rows && c0 + block.cols <= self.cols, "paste out of bounds");
        for r in 0..block.rows {
            for c in 0..block.cols {
                self.data[(r0 + r) * self.cols + c0 + c] = block.get(r, c);
            }
        }
    }

    pub fn submatrix(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> RingMatrix {
        let mut out = RingMatrix::zeros(self.ring, rows.len(), cols.len());
        for (i, r) in rows.clone().enumerate() {
            for (j, c) in cols.clone().enumerate() {
                out.data[i * out.cols + j] = self.get(r, c);
            }
        }
        out
    }

    pub fn select_columns(&self, which: &[usize]) -> RingMatrix {
        let cols: Vec<Vec<Elem>> = which.iter().map(|&c| self.column(c)).collect();
        RingMatrix::from_columns(self.ring, self.rows, &cols)
    }

    /// Kronecker product `self (x) other`.
    pub fn kron(&self, other: &RingMatrix) -> RingMatrix {
        assert_eq!(self.ring, other.ring, "kron over different rings");
        let ring = self.ring;
        let mut out = RingMatrix::zeros(ring, self.rows * other.rows, self.cols * other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if a == 0 {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        let idx = (i * other.rows + k) * out.cols + j * other.cols + l;
                        out.data[idx] = ring.mul(a, other.get(k, l));
                    }
                }
            }
        }
        out
    }

    /// Row-major flattening into a column vector, so that
    /// `vec(P X Q) = (P (x) Q^T) vec(X)`.
    pub fn vectorize(&self) -> RingMatrix {
        RingMatrix { ring: self.ring, rows: self.rows * self.cols, cols: 1, data: self.data.clone() }
    }

    pub fn unvectorize(v: &[Elem], ring: Ring, rows: usize, cols: usize) -> RingMatrix {
        RingMatrix::new(ring, rows, cols, v.to_vec()).expect("unvectorize shape")
    }
}

impl std::ops::Mul for &RingMatrix {
    type Output = RingMatrix;
    fn mul(self, rhs: &RingMatrix) -> RingMatrix {
        self.try_mul(rhs).expect("matrix product")
    }
}

impl std::ops::Add for &RingMatrix {
    type Output = RingMatrix;
    fn add(self, rhs: &RingMatrix) -> RingMatrix {
        self.try_add(rhs).expect("matrix sum")
    }
}

impl std::ops::Sub for &RingMatrix {
    type Output = RingMatrix;
    fn sub(self, rhs: &RingMatrix) -> RingMatrix {
        self.try_sub(rhs).expect("matrix difference")
    }
}
