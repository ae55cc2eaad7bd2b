//! Small dense matrices over the rationals with arbitrary-size integers.
//!
//! Used wherever membership has to be decided exactly (symplectic group,
//! congruence subgroups, cone generators). Sizes are tiny, so the
//! representation is a flat row-major `Vec`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigRational>,
}

pub fn q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn q_frac(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMatrix { rows, cols, data: vec![BigRational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigRational::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> BigRational) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        QMatrix { rows, cols, data }
    }

    /// Builds a matrix from integer rows. All rows must have the same length.
    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|row| row.len() != c) {
            return Err(Error::DimensionMismatch { expected: c, found: bad.len() });
        }
        Ok(Self::from_fn(r, c, |i, j| q(rows[i][j])))
    }

    /// Builds a matrix from numerator and denominator rows.
    pub fn from_num_den(num: &[Vec<i64>], den: &[Vec<i64>]) -> Result<Self> {
        let n = Self::from_i64_rows(num)?;
        let d = Self::from_i64_rows(den)?;
        if n.rows != d.rows || n.cols != d.cols {
            return Err(Error::DimensionMismatch { expected: n.rows * n.cols, found: d.rows * d.cols });
        }
        if d.data.iter().any(Zero::is_zero) {
            return Err(Error::InvalidParameter("zero denominator".into()));
        }
        Ok(Self::from_fn(n.rows, n.cols, |i, j| &n[(i, j)] / &d[(i, j)]))
    }

    pub fn from_i64_matrix(m: &DMatrix<i64>) -> Self {
        Self::from_fn(m.nrows(), m.ncols(), |i, j| q(m[(i, j)]))
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |i, j| self[(r0 + i, c0 + j)].clone())
    }

    /// Assembles `[[a, b], [c, d]]` from four blocks of matching shapes.
    pub fn from_blocks(a: &Self, b: &Self, c: &Self, d: &Self) -> Self {
        let (r0, c0) = (a.rows, a.cols);
        Self::from_fn(a.rows + c.rows, a.cols + b.cols, |i, j| match (i < r0, j < c0) {
            (true, true) => a[(i, j)].clone(),
            (true, false) => b[(i, j - c0)].clone(),
            (false, true) => c[(i - r0, j)].clone(),
            (false, false) => d[(i - r0, j - c0)].clone(),
        })
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        QMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x * s).collect() }
    }

    pub fn is_integer(&self) -> bool {
        self.data.iter().all(|x| x.is_integer())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    /// Integer entries as `i64`, if every entry is an integer that fits.
    pub fn to_i64(&self) -> Result<DMatrix<i64>> {
        if !self.is_integer() {
            return Err(Error::NonIntegerEntries);
        }
        let mut out = DMatrix::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(i, j)] = self[(i, j)].to_integer().to_i64().ok_or(Error::Overflow)?;
            }
        }
        Ok(out)
    }

    pub fn to_f64(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)].to_f64().unwrap_or(f64::NAN))
    }

    /// Largest absolute entry.
    pub fn sup_norm(&self) -> BigRational {
        self.data.iter().map(|x| x.abs()).max().unwrap_or_else(BigRational::zero)
    }

    /// Exact inverse by Gauss-Jordan elimination; `None` when singular.
    pub fn inverse(&self) -> Option<Self> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for col in 0..n {
            let pivot = (col..n).find(|&r| !a[(r, col)].is_zero())?;
            if pivot != col {
                a.swap_rows(pivot, col);
                inv.swap_rows(pivot, col);
            }
            let p = a[(col, col)].clone();
            for j in 0..n {
                a[(col, j)] = &a[(col, j)] / &p;
                inv[(col, j)] = &inv[(col, j)] / &p;
            }
            for r in 0..n {
                if r == col || a[(r, col)].is_zero() {
                    continue;
                }
                let f = a[(r, col)].clone();
                for j in 0..n {
                    let t = &a[(col, j)] * &f;
                    a[(r, j)] = &a[(r, j)] - t;
                    let t = &inv[(col, j)] * &f;
                    inv[(r, j)] = &inv[(r, j)] - t;
                }
            }
        }
        Some(inv)
    }

    /// Rank by fraction-exact row reduction.
    pub fn rank(&self) -> usize {
        let mut a = self.clone();
        let mut rank = 0;
        for col in 0..a.cols {
            let Some(pivot) = (rank..a.rows).find(|&r| !a[(r, col)].is_zero()) else { continue };
            a.swap_rows(pivot, rank);
            for r in rank + 1..a.rows {
                if a[(r, col)].is_zero() {
                    continue;
                }
                let f = &a[(r, col)] / &a[(rank, col)];
                for j in col..a.cols {
                    let t = &a[(rank, j)] * &f;
                    a[(r, j)] = &a[(r, j)] - t;
                }
            }
            rank += 1;
            if rank == a.rows {
                break;
            }
        }
        rank
    }

    /// Basis of the right null space `{x : A x = 0}`.
    pub fn null_space(&self) -> Vec<Vec<BigRational>> {
        let mut a = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..a.cols {
            if row == a.rows {
                break;
            }
            let Some(p) = (row..a.rows).find(|&r| !a[(r, col)].is_zero()) else { continue };
            a.swap_rows(p, row);
            let pv = a[(row, col)].clone();
            for j in 0..a.cols {
                a[(row, j)] = &a[(row, j)] / &pv;
            }
            for r in 0..a.rows {
                if r != row && !a[(r, col)].is_zero() {
                    let f = a[(r, col)].clone();
                    for j in 0..a.cols {
                        let t = &a[(row, j)] * &f;
                        a[(r, j)] = &a[(r, j)] - t;
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        let free: Vec<usize> = (0..a.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![BigRational::zero(); a.cols];
                v[f] = BigRational::one();
                for (r, &pc) in pivots.iter().enumerate() {
                    v[pc] = -a[(r, f)].clone();
                }
                v
            })
            .collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

impl std::ops::Index<(usize, usize)> for QMatrix {
    type Output = BigRational;
    fn index(&self, (i, j): (usize, usize)) -> &BigRational {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for QMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigRational {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &QMatrix {
    type Output = QMatrix;
    fn mul(self, rhs: &QMatrix) -> QMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix product shape mismatch");
        let mut out = QMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        out
    }
}

impl Add for &QMatrix {
    type Output = QMatrix;
    fn add(self, rhs: &QMatrix) -> QMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        QMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &QMatrix {
    type Output = QMatrix;
    fn sub(self, rhs: &QMatrix) -> QMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        QMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect() }
    }
}

impl Neg for &QMatrix {
    type Output = QMatrix;
    fn neg(self) -> QMatrix {
        QMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| -a).collect() }
    }
}

impl fmt::Debug for QMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self[(i, j)])?;
            }
        }
        write!(f, "]")
    }
}

/// Exact determinant of a small integer matrix (Bareiss elimination).
pub fn det_i64(m: &DMatrix<i64>) -> BigInt {
    let n = m.nrows();
    assert_eq!(n, m.ncols());
    if n == 0 {
        return BigInt::one();
    }
    let mut a: Vec<Vec<BigInt>> = (0..n).map(|i| (0..n).map(|j| BigInt::from(m[(i, j)])).collect()).collect();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&r| !a[r][k].is_zero()) else { return BigInt::zero() };
            a.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * a[n - 1][n - 1].clone()
}

/// Primitive integer vector proportional to a nonzero rational vector.
pub fn primitive_integer(v: &[BigRational]) -> Vec<BigInt> {
    use num_integer::Integer;
    let lcm = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| (x * BigRational::from_integer(lcm.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return ints;
    }
    ints.into_iter().map(|x| x / &g).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_round_trip() {
        let m = QMatrix::from_i64_rows(&[vec![2, 1], vec![1, 1]]).unwrap();
        let inv = m.inverse().unwrap();
        assert_eq!(&m * &inv, QMatrix::identity(2));
        assert!(QMatrix::from_i64_rows(&[vec![1, 2], vec![2, 4]]).unwrap().inverse().is_none());
    }

    #[test]
    fn rank_and_null_space() {
        let m = QMatrix::from_i64_rows(&[vec![1, 2, 3], vec![2, 4, 6]]).unwrap();
        assert_eq!(m.rank(), 1);
        let ns = m.null_space();
        assert_eq!(ns.len(), 2);
        for v in ns {
            let s: BigRational = v.iter().zip([1, 2, 3]).map(|(x, c)| x * q(c)).sum();
            assert!(s.is_zero());
        }
    }

    #[test]
    fn bareiss_determinant() {
        let m = DMatrix::from_row_slice(3, 3, &[2, 0, 1, 1, 3, 2, 1, 1, 2]);
        assert_eq!(det_i64(&m), BigInt::from(6));
        let s = DMatrix::from_row_slice(2, 2, &[0, 1, 1, 0]);
        assert_eq!(det_i64(&s), BigInt::from(-1));
    }

    #[test]
    fn primitive_scaling() {
        let v = vec![q_frac(1, 2), q_frac(-3, 4), q(0)];
        assert_eq!(primitive_integer(&v), vec![BigInt::from(2), BigInt::from(-3), BigInt::from(0)]);
    }
}
