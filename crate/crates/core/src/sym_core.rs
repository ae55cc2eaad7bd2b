//! Symmetric real and complex matrices and the Siegel upper half-space.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Real symmetric `g x g` matrix. Symmetry holds bit-for-bit.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatR {
    m: DMatrix<f64>,
}

impl SymMatR {
    /// Wraps a matrix, rejecting anything that is not exactly symmetric.
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch { expected: m.nrows(), found: m.ncols() });
        }
        if m.nrows() == 0 {
            return Err(Error::UnsupportedDimension(0));
        }
        for i in 0..m.nrows() {
            for j in 0..i {
                if m[(i, j)] != m[(j, i)] {
                    return Err(Error::NotSymmetric);
                }
            }
        }
        Ok(SymMatR { m })
    }

    /// Replaces `m` by `(m + m^T) / 2` and wraps it.
    pub fn symmetrize(m: &DMatrix<f64>) -> Self {
        assert!(m.is_square() && m.nrows() > 0);
        let mut s = (m + m.transpose()) * 0.5;
        for i in 0..s.nrows() {
            for j in 0..i {
                s[(i, j)] = s[(j, i)];
            }
        }
        SymMatR { m: s }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let g = rows.len();
        if let Some(r) = rows.iter().find(|r| r.len() != g) {
            return Err(Error::DimensionMismatch { expected: g, found: r.len() });
        }
        Self::new(DMatrix::from_fn(g, g, |i, j| rows[i][j]))
    }

    pub fn identity(g: usize) -> Self {
        SymMatR { m: DMatrix::identity(g, g) }
    }

    pub fn zeros(g: usize) -> Self {
        SymMatR { m: DMatrix::zeros(g, g) }
    }

    pub fn g(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.m[(i, j)]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.g()).map(|i| (0..self.g()).map(|j| self.m[(i, j)]).collect()).collect()
    }

    /// `x^T beta x`, written `beta[x]`.
    pub fn quad_form(&self, x: &[f64]) -> f64 {
        let g = self.g();
        let mut s = 0.0;
        for i in 0..g {
            for j in 0..g {
                s += x[i] * self.m[(i, j)] * x[j];
            }
        }
        s
    }

    /// `U^T beta U` for an integer matrix `U`.
    pub fn congruence(&self, u: &DMatrix<i64>) -> SymMatR {
        let uf = u.map(|x| x as f64);
        SymMatR::symmetrize(&(uf.transpose() * &self.m * uf))
    }

    pub fn scale(&self, s: f64) -> SymMatR {
        SymMatR { m: &self.m * s }
    }

    pub fn determinant(&self) -> f64 {
        self.m.determinant()
    }
}

/// Dimension of `Sym(g, R)`.
pub fn sym_dim(g: usize) -> usize {
    g * (g + 1) / 2
}

/// Packs the upper triangle row by row: `(b11, b12, .., b1g, b22, ..)`.
pub fn sym_to_vec(beta: &SymMatR) -> Vec<f64> {
    let g = beta.g();
    let mut v = Vec::with_capacity(sym_dim(g));
    for i in 0..g {
        for j in i..g {
            v.push(beta.m[(i, j)]);
        }
    }
    v
}

/// Inverse of [`sym_to_vec`].
pub fn vec_to_sym(v: &[f64]) -> Result<SymMatR> {
    let g = g_from_sym_dim(v.len()).ok_or(Error::DimensionMismatch { expected: sym_dim(1), found: v.len() })?;
    let mut m = DMatrix::zeros(g, g);
    let mut k = 0;
    for i in 0..g {
        for j in i..g {
            m[(i, j)] = v[k];
            m[(j, i)] = v[k];
            k += 1;
        }
    }
    Ok(SymMatR { m })
}

/// Recovers `g` from `n = g(g+1)/2`.
pub fn g_from_sym_dim(n: usize) -> Option<usize> {
    (1..=64).find(|&g| sym_dim(g) == n)
}

/// Upper triangular `T` with `beta = T^T T`, provided every pivot exceeds `pd_tol`.
pub fn cholesky_upper(beta: &DMatrix<f64>, pd_tol: f64) -> Option<DMatrix<f64>> {
    let g = beta.nrows();
    let mut t = DMatrix::zeros(g, g);
    for i in 0..g {
        let mut pivot = beta[(i, i)];
        for k in 0..i {
            pivot -= t[(k, i)] * t[(k, i)];
        }
        if !(pivot > pd_tol) {
            return None;
        }
        let tii = pivot.sqrt();
        t[(i, i)] = tii;
        for j in i + 1..g {
            let mut s = beta[(i, j)];
            for k in 0..i {
                s -= t[(k, i)] * t[(k, j)];
            }
            t[(i, j)] = s / tii;
        }
    }
    Some(t)
}

pub fn is_positive_definite(beta: &SymMatR, pd_tol: f64) -> bool {
    cholesky_upper(&beta.m, pd_tol).is_some()
}

/// Complex symmetric matrix stored as real and imaginary parts.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatC {
    pub re: SymMatR,
    pub im: SymMatR,
}

impl SymMatC {
    pub fn new(re: SymMatR, im: SymMatR) -> Result<Self> {
        if re.g() != im.g() {
            return Err(Error::DimensionMismatch { expected: re.g(), found: im.g() });
        }
        Ok(SymMatC { re, im })
    }

    /// Symmetrizes a complex matrix.
    pub fn from_complex(m: &DMatrix<Complex64>) -> Self {
        SymMatC { re: SymMatR::symmetrize(&m.map(|z| z.re)), im: SymMatR::symmetrize(&m.map(|z| z.im)) }
    }

    /// Scalar `x + i y` for `g = 1`.
    pub fn scalar(z: Complex64) -> Self {
        SymMatC { re: SymMatR { m: DMatrix::from_element(1, 1, z.re) }, im: SymMatR { m: DMatrix::from_element(1, 1, z.im) } }
    }

    pub fn g(&self) -> usize {
        self.re.g()
    }

    pub fn to_complex(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.g(), self.g(), |i, j| Complex64::new(self.re.m[(i, j)], self.im.m[(i, j)]))
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        Complex64::new(self.re.m[(i, j)], self.im.m[(i, j)])
    }
}

/// Point of the Siegel upper half-space: `Im(tau)` certified positive definite.
///
/// Keeps the Cholesky factor `T` (`Im tau = T^T T`) for reuse by the theta
/// truncation and coordinate solves.
#[derive(Debug, Clone)]
pub struct SiegelPoint {
    tau: SymMatC,
    chol: DMatrix<f64>,
}

impl PartialEq for SiegelPoint {
    fn eq(&self, other: &Self) -> bool {
        self.tau == other.tau
    }
}

impl SiegelPoint {
    pub fn new(tau: SymMatC) -> Result<Self> {
        in_siegel_space(&tau, crate::DEFAULT_PD_TOL).ok_or(Error::NotInSiegelSpace)
    }

    pub fn from_complex(m: &DMatrix<Complex64>) -> Result<Self> {
        Self::new(SymMatC::from_complex(m))
    }

    pub fn scalar(z: Complex64) -> Result<Self> {
        Self::new(SymMatC::scalar(z))
    }

    /// `i * I_g`.
    pub fn i_identity(g: usize) -> Self {
        Self::new(SymMatC { re: SymMatR::zeros(g), im: SymMatR::identity(g) }).expect("identity is positive definite")
    }

    pub fn g(&self) -> usize {
        self.tau.g()
    }

    pub fn tau(&self) -> &SymMatC {
        &self.tau
    }

    pub fn re(&self) -> &SymMatR {
        &self.tau.re
    }

    pub fn im(&self) -> &SymMatR {
        &self.tau.im
    }

    pub fn to_complex(&self) -> DMatrix<Complex64> {
        self.tau.to_complex()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.tau.get(i, j)
    }

    /// Upper triangular factor of `Im tau`.
    pub fn cholesky(&self) -> &DMatrix<f64> {
        &self.chol
    }

    /// Solves `Im(tau) x = b` with the cached factor.
    pub fn solve_im(&self, b: &[f64]) -> Vec<f64> {
        let g = self.g();
        let t = &self.chol;
        // T^T u = b
        let mut u = vec![0.0; g];
        for i in 0..g {
            let mut s = b[i];
            for k in 0..i {
                s -= t[(k, i)] * u[k];
            }
            u[i] = s / t[(i, i)];
        }
        // T x = u
        let mut x = vec![0.0; g];
        for i in (0..g).rev() {
            let mut s = u[i];
            for k in i + 1..g {
                s -= t[(i, k)] * x[k];
            }
            x[i] = s / t[(i, i)];
        }
        x
    }

    /// `k * tau`.
    pub fn scaled(&self, k: f64) -> Result<Self> {
        Self::new(SymMatC { re: self.tau.re.scale(k), im: self.tau.im.scale(k) })
    }
}

/// Certifies `tau` as a point of `H_g` when `Im tau` passes the Cholesky test.
pub fn in_siegel_space(tau: &SymMatC, pd_tol: f64) -> Option<SiegelPoint> {
    let chol = cholesky_upper(tau.im.matrix(), pd_tol)?;
    Some(SiegelPoint { tau: tau.clone(), chol })
}

/// JSON form `{"g": int, "re": [[..]], "im": [[..]]}`; a missing `im` means zero.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<usize>,
    pub re: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<Vec<Vec<f64>>>,
}

impl MatrixJson {
    pub fn to_sym(&self) -> Result<SymMatC> {
        let re = SymMatR::from_rows(&self.re)?;
        let g = re.g();
        if let Some(declared) = self.g {
            if declared != g {
                return Err(Error::DimensionMismatch { expected: declared, found: g });
            }
        }
        let im = match &self.im {
            Some(rows) => SymMatR::from_rows(rows)?,
            None => SymMatR::zeros(g),
        };
        SymMatC::new(re, im)
    }
}

impl From<&SymMatC> for MatrixJson {
    fn from(m: &SymMatC) -> Self {
        MatrixJson { g: Some(m.g()), re: m.re.rows(), im: Some(m.im.rows()) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn packing_examples() {
        assert_eq!(sym_to_vec(&SymMatR::from_rows(&[vec![5.0]]).unwrap()), vec![5.0]);
        let b = SymMatR::from_rows(&[vec![1.0, 2.0], vec![2.0, 3.0]]).unwrap();
        assert_eq!(sym_to_vec(&b), vec![1.0, 2.0, 3.0]);
        assert!(vec_to_sym(&[1.0, 2.0]).is_err());
    }

    #[test]
    fn rejects_asymmetric() {
        assert_eq!(SymMatR::from_rows(&[vec![1.0, 2.0], vec![2.5, 3.0]]), Err(Error::NotSymmetric));
    }

    #[test]
    fn positive_definite_examples() {
        for g in 1..5 {
            assert!(is_positive_definite(&SymMatR::identity(g), 1e-12));
        }
        assert!(!is_positive_definite(&SymMatR::from_rows(&[vec![1.0, 0.0], vec![0.0, -1.0]]).unwrap(), 1e-12));
        // eigenvalues 1 and 3
        assert!(is_positive_definite(&SymMatR::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap(), 1e-12));
        assert!(!is_positive_definite(&SymMatR::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap(), 1e-12));
    }

    #[test]
    fn siegel_predicate() {
        assert!(in_siegel_space(&SymMatC::scalar(Complex64::new(0.0, 2.0)), 1e-12).is_some());
        assert!(in_siegel_space(&SymMatC::scalar(Complex64::new(1.0, 0.0)), 1e-12).is_none());
        let tau = SymMatC::new(SymMatR::zeros(2), SymMatR::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap()).unwrap();
        let p = in_siegel_space(&tau, 1e-12).unwrap();
        assert!(is_positive_definite(p.im(), 1e-12));
    }

    #[test]
    fn cholesky_solve() {
        let tau = SymMatC::new(SymMatR::zeros(2), SymMatR::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap()).unwrap();
        let p = SiegelPoint::new(tau).unwrap();
        let x = p.solve_im(&[3.0, 3.0]);
        assert!((x[0] - 1.0).abs() < 1e-14 && (x[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn json_without_imaginary_part() {
        let j: MatrixJson = serde_json::from_str(r#"{"re": [[0]], "im": [[1]]}"#).unwrap();
        assert_eq!(j.to_sym().unwrap().get(0, 0), Complex64::new(0.0, 1.0));
        let j: MatrixJson = serde_json::from_str(r#"{"g": 1, "re": [[3]]}"#).unwrap();
        assert_eq!(j.to_sym().unwrap().get(0, 0), Complex64::new(3.0, 0.0));
        let j: MatrixJson = serde_json::from_str(r#"{"g": 2, "re": [[3]]}"#).unwrap();
        assert!(j.to_sym().is_err());
    }

    fn sym_strategy() -> impl Strategy<Value = SymMatR> {
        (1usize..5).prop_flat_map(|g| prop::collection::vec(-1e6f64..1e6, sym_dim(g)).prop_map(|v| vec_to_sym(&v).unwrap()))
    }

    proptest! {
        #[test]
        fn packing_round_trip(b in sym_strategy()) {
            let back = vec_to_sym(&sym_to_vec(&b)).unwrap();
            prop_assert_eq!(back, b);
        }

        #[test]
        fn pd_invariant_under_unimodular_congruence(
            a in prop::collection::vec(-1.0f64..1.0, 4),
            t in -3i64..4,
            swap in any::<bool>(),
        ) {
            let m = DMatrix::from_row_slice(2, 2, &a);
            let beta = SymMatR::symmetrize(&(&m * m.transpose() + DMatrix::identity(2, 2) * 0.05));
            let mut u = DMatrix::from_row_slice(2, 2, &[1, t, 0, 1]);
            if swap {
                u.swap_columns(0, 1);
            }
            let image = beta.congruence(&u);
            let tol = 1e-12 * (1.0 + (t * t) as f64);
            if is_positive_definite(&beta, tol) {
                prop_assert!(is_positive_definite(&image, tol));
            }
        }
    }
}
