//! The symplectic group `Sp(2g, Q)`, its action on `H_g`, and the subgroups
//! `G_D`, `G_D(D)_0` and `Gamma_g(k)`.
//!
//! Group membership is decided in exact rational arithmetic. Only the action
//! on the Siegel half-space uses floating point.

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::rational::{q, QMatrix};
use crate::sym_core::{in_siegel_space, SiegelPoint, SymMatC};
use crate::{Error, Result};

/// A `2g x 2g` rational matrix with `M J M^T = J`, split into blocks
/// `[[alpha, beta], [gamma, delta]]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SymplecticMatrix {
    g: usize,
    m: QMatrix,
}

/// `J = [[0, I], [-I, 0]]`.
pub fn j_matrix(g: usize) -> QMatrix {
    let i = QMatrix::identity(g);
    let z = QMatrix::zeros(g, g);
    QMatrix::from_blocks(&z, &i, &-&i, &z)
}

/// `M J M^T == J` in exact arithmetic.
pub fn is_symplectic(m: &QMatrix) -> Result<bool> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch { expected: m.nrows(), found: m.ncols() });
    }
    if m.nrows() % 2 == 1 {
        return Err(Error::DimensionOdd(m.nrows()));
    }
    let j = j_matrix(m.nrows() / 2);
    Ok(&(m * &j) * &m.transpose() == j)
}

impl SymplecticMatrix {
    pub fn new(m: QMatrix) -> Result<Self> {
        if !is_symplectic(&m)? {
            return Err(Error::NotSymplectic);
        }
        Ok(SymplecticMatrix { g: m.nrows() / 2, m })
    }

    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Result<Self> {
        Self::new(QMatrix::from_i64_rows(rows)?)
    }

    pub fn from_i64_matrix(m: &DMatrix<i64>) -> Result<Self> {
        Self::new(QMatrix::from_i64_matrix(m))
    }

    pub fn identity(g: usize) -> Self {
        SymplecticMatrix { g, m: QMatrix::identity(2 * g) }
    }

    pub fn j(g: usize) -> Self {
        SymplecticMatrix { g, m: j_matrix(g) }
    }

    /// `M_beta = [[I, beta], [0, I]]` for an integer symmetric `beta`.
    pub fn translation(beta: &DMatrix<i64>) -> Result<Self> {
        let g = beta.nrows();
        let b = QMatrix::from_i64_matrix(beta);
        Self::new(QMatrix::from_blocks(&QMatrix::identity(g), &b, &QMatrix::zeros(g, g), &QMatrix::identity(g)))
    }

    /// `[[U^T^{-1}, 0], [0, U]]` for a unimodular `U`; acts by `tau -> U^T^{-1} tau U^{-1}`.
    pub fn gl_embedding(u: &DMatrix<i64>) -> Result<Self> {
        let g = u.nrows();
        let uq = QMatrix::from_i64_matrix(u);
        let inv_t = uq.transpose().inverse().ok_or(Error::NumericalSingularity(0.0))?;
        Self::new(QMatrix::from_blocks(&inv_t, &QMatrix::zeros(g, g), &QMatrix::zeros(g, g), &uq))
    }

    /// Inversion in the first `s` coordinates; `det(gamma tau + delta)` is the
    /// leading `s x s` minor of `tau`. For `s = g` this is `J^{-1}`.
    pub fn partial_inversion(g: usize, s: usize) -> Self {
        assert!(s >= 1 && s <= g);
        let e = QMatrix::from_fn(g, g, |i, j| if i == j && i < s { q(1) } else { q(0) });
        let rest = &QMatrix::identity(g) - &e;
        SymplecticMatrix { g, m: QMatrix::from_blocks(&rest, &-&e, &e, &rest) }
    }

    pub fn g(&self) -> usize {
        self.g
    }

    pub fn matrix(&self) -> &QMatrix {
        &self.m
    }

    pub fn alpha(&self) -> QMatrix {
        self.m.block(0, 0, self.g, self.g)
    }

    pub fn beta(&self) -> QMatrix {
        self.m.block(0, self.g, self.g, self.g)
    }

    pub fn gamma(&self) -> QMatrix {
        self.m.block(self.g, 0, self.g, self.g)
    }

    pub fn delta(&self) -> QMatrix {
        self.m.block(self.g, self.g, self.g, self.g)
    }

    pub fn is_integer(&self) -> bool {
        self.m.is_integer()
    }

    pub fn to_f64(&self) -> DMatrix<f64> {
        self.m.to_f64()
    }

    pub fn mul(&self, rhs: &SymplecticMatrix) -> SymplecticMatrix {
        assert_eq!(self.g, rhs.g);
        SymplecticMatrix { g: self.g, m: &self.m * &rhs.m }
    }

    /// `[[delta^T, -beta^T], [-gamma^T, alpha^T]]`.
    pub fn inverse(&self) -> SymplecticMatrix {
        let m = QMatrix::from_blocks(
            &self.delta().transpose(),
            &-&self.beta().transpose(),
            &-&self.gamma().transpose(),
            &self.alpha().transpose(),
        );
        SymplecticMatrix { g: self.g, m }
    }

    pub fn transpose(&self) -> SymplecticMatrix {
        SymplecticMatrix { g: self.g, m: self.m.transpose() }
    }

    /// Largest absolute entry, `||M||_s`.
    pub fn sup_norm(&self) -> f64 {
        self.m.sup_norm().to_f64().unwrap_or(f64::INFINITY)
    }

    fn float_blocks(&self) -> [DMatrix<Complex64>; 4] {
        let f = self.to_f64().map(|x| Complex64::new(x, 0.0));
        let g = self.g;
        [
            f.view((0, 0), (g, g)).into_owned(),
            f.view((0, g), (g, g)).into_owned(),
            f.view((g, 0), (g, g)).into_owned(),
            f.view((g, g), (g, g)).into_owned(),
        ]
    }

    /// `gamma tau + delta` in floating point.
    pub fn automorphy_factor(&self, tau: &SiegelPoint) -> DMatrix<Complex64> {
        let [_, _, c, d] = self.float_blocks();
        c * tau.to_complex() + d
    }
}

/// `M . tau = (alpha tau + beta)(gamma tau + delta)^{-1}` together with
/// `det(gamma tau + delta)`.
pub fn act(m: &SymplecticMatrix, tau: &SiegelPoint) -> Result<(SiegelPoint, Complex64)> {
    if m.g() != tau.g() {
        return Err(Error::DimensionMismatch { expected: m.g(), found: tau.g() });
    }
    let [a, b, c, d] = m.float_blocks();
    let t = tau.to_complex();
    let denom = c * &t + d;
    let det = denom.determinant();
    if !(det.norm() >= 1e-300) {
        return Err(Error::NumericalSingularity(det.norm()));
    }
    let inv = denom.try_inverse().ok_or(Error::NumericalSingularity(det.norm()))?;
    let image = (a * &t + b) * inv;
    let sym = SymMatC::from_complex(&image);
    let point = in_siegel_space(&sym, 0.0).ok_or(Error::NotInSiegelSpace)?;
    Ok((point, det))
}

/// Polarization type `D = diag(d_1, .., d_g)` with `d_1 | d_2 | .. | d_g`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u64>", into = "Vec<u64>")]
pub struct PolarizationType {
    d: Vec<u64>,
}

impl PolarizationType {
    pub fn new(d: Vec<u64>) -> Result<Self> {
        if d.is_empty() {
            return Err(Error::InvalidPolarization("empty".into()));
        }
        if d.contains(&0) {
            return Err(Error::InvalidPolarization("entries must be positive".into()));
        }
        if d.windows(2).any(|w| w[1] % w[0] != 0) {
            return Err(Error::InvalidPolarization(format!("{d:?} is not a divisor chain")));
        }
        Ok(PolarizationType { d })
    }

    pub fn principal(g: usize) -> Self {
        PolarizationType { d: vec![1; g] }
    }

    pub fn g(&self) -> usize {
        self.d.len()
    }

    pub fn entries(&self) -> &[u64] {
        &self.d
    }

    pub fn d1(&self) -> u64 {
        self.d[0]
    }

    pub fn dg(&self) -> u64 {
        *self.d.last().expect("nonempty")
    }

    /// `d_1 d_2 .. d_g`, the number of projective coordinates.
    pub fn product(&self) -> u64 {
        self.d.iter().product()
    }

    pub fn scaled(&self, k: u64) -> Self {
        PolarizationType { d: self.d.iter().map(|x| x * k).collect() }
    }

    pub fn as_qmatrix(&self) -> QMatrix {
        let g = self.g();
        QMatrix::from_fn(g, g, |i, j| if i == j { q(self.d[i] as i64) } else { q(0) })
    }

    pub fn as_f64(&self) -> Vec<f64> {
        self.d.iter().map(|&x| x as f64).collect()
    }
}

impl TryFrom<Vec<u64>> for PolarizationType {
    type Error = Error;
    fn try_from(d: Vec<u64>) -> Result<Self> {
        Self::new(d)
    }
}

impl From<PolarizationType> for Vec<u64> {
    fn from(p: PolarizationType) -> Self {
        p.d
    }
}

fn diag_1_d(d: &PolarizationType) -> QMatrix {
    let g = d.g();
    QMatrix::from_blocks(&QMatrix::identity(g), &QMatrix::zeros(g, g), &QMatrix::zeros(g, g), &d.as_qmatrix())
}

/// Membership in `G_D`: `diag(1, D) M diag(1, D)^{-1}` has integer entries.
///
/// This is the integrality condition under which `z -> (gamma tau + delta)^T z`
/// carries `tau' Z^g + D Z^g` onto `tau Z^g + D Z^g`; it contains
/// `G_D(D)_0` and equals `Sp(2g, Z)` for `D = I`.
pub fn in_gd(m: &SymplecticMatrix, d: &PolarizationType) -> bool {
    if m.g() != d.g() {
        return false;
    }
    let s = diag_1_d(d);
    let s_inv = s.inverse().expect("D is invertible");
    (&(&s * m.matrix()) * &s_inv).is_integer()
}

/// Membership in `G_D(D)_0`.
pub fn in_gd0(m: &SymplecticMatrix, d: &PolarizationType) -> Result<bool> {
    if !in_gd(m, d) {
        return Err(Error::NotInGD);
    }
    let g = m.g();
    let dm = d.as_qmatrix();
    let d_inv = dm.inverse().expect("D is invertible");
    let id = QMatrix::identity(g);
    let (alpha, beta, gamma, delta) = (m.alpha(), m.beta(), m.gamma(), m.delta());
    let a = &d_inv * &(&alpha - &id);
    let b = &(&d_inv * &beta) * &d_inv;
    let dd = &(&delta - &id) * &d_inv;
    if !(a.is_integer() && b.is_integer() && gamma.is_integer() && dd.is_integer()) {
        return Ok(false);
    }
    let first = &(&(&d_inv * &alpha) * &beta.transpose()) * &d_inv;
    let second = &gamma * &delta.transpose();
    let two = BigInt::from(2);
    let even = |x: &BigRational| x.is_integer() && x.to_integer().is_multiple_of(&two);
    Ok((0..g).all(|i| even(&first[(i, i)]) && even(&second[(i, i)])))
}

/// `M = I mod k`.
pub fn in_principal_congruence(m: &SymplecticMatrix, k: u64) -> Result<bool> {
    if !m.is_integer() {
        return Err(Error::NonIntegerEntries);
    }
    if k == 0 {
        return Err(Error::InvalidParameter("k must be positive".into()));
    }
    let diff = m.matrix() - &QMatrix::identity(2 * m.g());
    let k = BigInt::from(k);
    let n = 2 * m.g();
    Ok((0..n).all(|i| (0..n).all(|j| diff[(i, j)].to_integer().is_multiple_of(&k))))
}

/// The pair `(A, tau')` with `tau' = M . tau` and `A = (gamma tau + delta)^T`.
pub fn iso_matrix(m: &SymplecticMatrix, tau: &SiegelPoint) -> Result<(DMatrix<Complex64>, SiegelPoint)> {
    let (tau_prime, _) = act(m, tau)?;
    let a = m.automorphy_factor(tau).transpose();
    Ok((a, tau_prime))
}

/// `|| A (tau' | I) - (tau | I) M^T ||_inf`.
pub fn iso_residual(m: &SymplecticMatrix, tau: &SiegelPoint, a: &DMatrix<Complex64>, tau_prime: &SiegelPoint) -> f64 {
    let g = m.g();
    let stack = |t: &DMatrix<Complex64>| {
        let mut s = DMatrix::zeros(g, 2 * g);
        s.view_mut((0, 0), (g, g)).copy_from(t);
        s.view_mut((0, g), (g, g)).copy_from(&DMatrix::identity(g, g));
        s
    };
    let lhs = a * stack(&tau_prime.to_complex());
    let mt = m.to_f64().transpose().map(|x| Complex64::new(x, 0.0));
    let rhs = stack(&tau.to_complex()) * mt;
    (lhs - rhs).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Lattice coordinates after an isomorphism: `(r1; D r1') = M^T (r; D r')`.
pub fn lattice_coord_transform(m: &SymplecticMatrix, d: &PolarizationType, r: &[f64], r_prime: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let g = m.g();
    if r.len() != g || r_prime.len() != g {
        return Err(Error::DimensionMismatch { expected: g, found: r.len().min(r_prime.len()) });
    }
    if !in_gd(m, d) {
        return Err(Error::NotInGD);
    }
    let dv = d.as_f64();
    let mut x = Vec::with_capacity(2 * g);
    x.extend_from_slice(r);
    x.extend(r_prime.iter().zip(&dv).map(|(a, b)| a * b));
    let mt = m.to_f64().transpose();
    let y = mt * nalgebra::DVector::from_vec(x);
    let r1 = (0..g).map(|i| y[i]).collect();
    let r1p = (0..g).map(|i| y[g + i] / dv[i]).collect();
    Ok((r1, r1p))
}

/// All symmetric integer `g x g` matrices with entries in `[-r, r]`.
pub fn symmetric_integer_matrices(g: usize, r: i64) -> Vec<DMatrix<i64>> {
    let n = g * (g + 1) / 2;
    let base = (2 * r + 1) as usize;
    let total = base.pow(n as u32);
    (0..total)
        .map(|mut code| {
            let mut m = DMatrix::zeros(g, g);
            for i in 0..g {
                for j in i..g {
                    let v = (code % base) as i64 - r;
                    code /= base;
                    m[(i, j)] = v;
                    m[(j, i)] = v;
                }
            }
            m
        })
        .collect()
}

/// Fixed, ordered generating list: `J`, `J^{-1}`, the translations `M_beta`
/// with entries of `beta` in `{-1, 0, 1}`, and `GL(g, Z)` embeddings of
/// elementary transvections, adjacent transpositions and sign flips.
pub fn standard_generators(g: usize) -> Vec<SymplecticMatrix> {
    assert!(g >= 1);
    let mut out = vec![SymplecticMatrix::j(g), SymplecticMatrix::j(g).inverse()];
    for beta in symmetric_integer_matrices(g, 1) {
        if beta.iter().all(|&x| x == 0) {
            continue;
        }
        out.push(SymplecticMatrix::translation(&beta).expect("translations are symplectic"));
    }
    for u in elementary_unimodular(g) {
        out.push(SymplecticMatrix::gl_embedding(&u).expect("unimodular"));
    }
    out
}

/// Transvections `I +- E_ij`, adjacent transpositions and single sign flips.
pub fn elementary_unimodular(g: usize) -> Vec<DMatrix<i64>> {
    let mut out = Vec::new();
    for i in 0..g {
        for j in 0..g {
            if i == j {
                continue;
            }
            for s in [1, -1] {
                let mut u = DMatrix::identity(g, g);
                u[(i, j)] = s;
                out.push(u);
            }
        }
    }
    for i in 0..g.saturating_sub(1) {
        let mut u = DMatrix::<i64>::identity(g, g);
        u.swap_columns(i, i + 1);
        out.push(u);
    }
    for i in 0..g {
        let mut u = DMatrix::<i64>::identity(g, g);
        u[(i, i)] = -1;
        out.push(u);
    }
    out
}

/// Exact JSON form: `{"g", "num", "den"}` or integer-only `{"g", "m"}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SymplecticJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<Vec<Vec<i64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub num: Option<Vec<Vec<i64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub den: Option<Vec<Vec<i64>>>,
}

impl SymplecticJson {
    pub fn to_matrix(&self) -> Result<SymplecticMatrix> {
        let qm = match (&self.m, &self.num, &self.den) {
            (Some(m), _, _) => QMatrix::from_i64_rows(m)?,
            (None, Some(num), Some(den)) => QMatrix::from_num_den(num, den)?,
            (None, Some(num), None) => QMatrix::from_i64_rows(num)?,
            _ => return Err(Error::InvalidParameter("symplectic matrix needs \"m\" or \"num\"/\"den\"".into())),
        };
        if let Some(g) = self.g {
            if qm.nrows() != 2 * g {
                return Err(Error::DimensionMismatch { expected: 2 * g, found: qm.nrows() });
            }
        }
        SymplecticMatrix::new(qm)
    }
}

impl From<&SymplecticMatrix> for SymplecticJson {
    fn from(s: &SymplecticMatrix) -> Self {
        let n = 2 * s.g();
        let m = s.matrix();
        let fits = |x: &BigRational| x.numer().to_i64().is_some() && x.denom().to_i64().is_some();
        let all_fit = (0..n).all(|i| (0..n).all(|j| fits(&m[(i, j)])));
        if s.is_integer() && all_fit {
            let rows = (0..n).map(|i| (0..n).map(|j| m[(i, j)].to_integer().to_i64().unwrap_or(0)).collect()).collect();
            SymplecticJson { g: Some(s.g()), m: Some(rows), num: None, den: None }
        } else {
            let num = (0..n).map(|i| (0..n).map(|j| m[(i, j)].numer().to_i64().unwrap_or(0)).collect()).collect();
            let den = (0..n).map(|i| (0..n).map(|j| m[(i, j)].denom().to_i64().unwrap_or(1)).collect()).collect();
            SymplecticJson { g: Some(s.g()), m: None, num: Some(num), den: Some(den) }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{random_congruence_element, random_integral_symplectic, random_siegel_point};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn sm(rows: &[Vec<i64>]) -> SymplecticMatrix {
        SymplecticMatrix::from_i64_rows(rows).unwrap()
    }

    fn pol(d: &[u64]) -> PolarizationType {
        PolarizationType::new(d.to_vec()).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn symplectic_predicate() {
        for g in 1..4 {
            assert!(is_symplectic(&QMatrix::identity(2 * g)).unwrap());
            assert!(is_symplectic(&j_matrix(g)).unwrap());
        }
        let m = QMatrix::from_i64_rows(&[vec![2, 0], vec![0, 1]]).unwrap();
        assert!(!is_symplectic(&m).unwrap());
        assert_eq!(is_symplectic(&QMatrix::identity(3)), Err(Error::DimensionOdd(3)));
        assert!(SymplecticMatrix::new(m).is_err());
    }

    #[test]
    fn action_examples() {
        let i = SiegelPoint::scalar(c(0.0, 1.0)).unwrap();
        let (t, det) = act(&sm(&[vec![1, 1], vec![0, 1]]), &i).unwrap();
        assert!((t.get(0, 0) - c(1.0, 1.0)).norm() < 1e-15);
        assert_eq!(det, c(1.0, 0.0));
        let (t, _) = act(&sm(&[vec![0, -1], vec![1, 0]]), &i).unwrap();
        assert!((t.get(0, 0) - c(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn gd_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let m = random_integral_symplectic(2, 6, &mut rng);
            assert!(in_gd(&m, &PolarizationType::principal(2)));
        }
        let d2 = pol(&[2]);
        assert!(in_gd(&SymplecticMatrix::identity(1), &d2));
        assert!(!in_gd(&sm(&[vec![1, 1], vec![0, 1]]), &d2));
        assert!(in_gd(&sm(&[vec![1, 2], vec![0, 1]]), &d2));
    }

    #[test]
    fn gd0_examples() {
        for d in [pol(&[1]), pol(&[3]), pol(&[2, 4])] {
            assert!(in_gd0(&SymplecticMatrix::identity(d.g()), &d).unwrap());
        }
        assert!(!in_gd0(&sm(&[vec![1, 1], vec![0, 1]]), &pol(&[1])).unwrap());
        assert_eq!(in_gd0(&sm(&[vec![1, 1], vec![0, 1]]), &pol(&[2])), Err(Error::NotInGD));
    }

    #[test]
    fn congruence_subgroup_lies_in_gd0() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for d in [pol(&[2]), pol(&[1, 2]), pol(&[2, 2])] {
            let level = 2 * d.dg() * d.dg();
            for _ in 0..100 {
                let m = random_congruence_element(d.g(), level as i64, 4, &mut rng);
                assert!(in_principal_congruence(&m, level).unwrap());
                assert!(in_gd0(&m, &d).unwrap(), "{m:?}");
                assert!(in_gd(&m, &d));
            }
        }
    }

    #[test]
    fn principal_congruence_examples() {
        assert!(in_principal_congruence(&SymplecticMatrix::identity(2), 7).unwrap());
        assert!(in_principal_congruence(&sm(&[vec![1, 2], vec![0, 1]]), 2).unwrap());
        assert!(!in_principal_congruence(&sm(&[vec![1, 1], vec![0, 1]]), 2).unwrap());
        let half = SymplecticMatrix::new(QMatrix::from_num_den(&[vec![1, 1], vec![0, 1]], &[vec![1, 2], vec![1, 1]]).unwrap()).unwrap();
        assert_eq!(in_principal_congruence(&half, 2), Err(Error::NonIntegerEntries));
    }

    #[test]
    fn iso_matrix_examples() {
        let i = SiegelPoint::scalar(c(0.0, 1.0)).unwrap();
        let (a, t) = iso_matrix(&SymplecticMatrix::identity(1), &i).unwrap();
        assert_eq!(a[(0, 0)], c(1.0, 0.0));
        assert_eq!(t, i);
        let m = sm(&[vec![1, 1], vec![0, 1]]);
        let (a, t) = iso_matrix(&m, &i).unwrap();
        assert_eq!(a[(0, 0)], c(1.0, 0.0));
        assert!((t.get(0, 0) - c(1.0, 1.0)).norm() < 1e-15);
        assert!(iso_residual(&m, &i, &a, &t) < 1e-15);

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let m = random_integral_symplectic(2, 5, &mut rng);
            let tau = random_siegel_point(2, 0.5, 1.0, &mut rng);
            let (a, t) = iso_matrix(&m, &tau).unwrap();
            assert!(iso_residual(&m, &tau, &a, &t) < 1e-10);
        }
    }

    #[test]
    fn lattice_coordinates_transform() {
        let d1 = pol(&[1]);
        let (r, rp) = lattice_coord_transform(&SymplecticMatrix::identity(1), &d1, &[0.3], &[0.7]).unwrap();
        assert_eq!((r, rp), (vec![0.3], vec![0.7]));
        // J = [[0, 1], [-1, 0]] and its inverse
        let (r, rp) = lattice_coord_transform(&SymplecticMatrix::j(1), &d1, &[1.0], &[0.0]).unwrap();
        assert_eq!((r, rp), (vec![0.0], vec![1.0]));
        let (r, rp) = lattice_coord_transform(&sm(&[vec![0, -1], vec![1, 0]]), &d1, &[1.0], &[0.0]).unwrap();
        assert_eq!((r, rp), (vec![0.0], vec![-1.0]));
        assert_eq!(lattice_coord_transform(&SymplecticMatrix::j(1), &pol(&[2]), &[1.0], &[0.0]), Err(Error::NotInGD));

        let d = pol(&[1, 2]);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..30 {
            let m = random_congruence_element(2, 2, 4, &mut rng);
            assert!(in_gd(&m, &d));
            let r = [0.25, -0.5];
            let rp = [0.75, 0.125];
            let (r1, r1p) = lattice_coord_transform(&m, &d, &r, &rp).unwrap();
            let x = nalgebra::DVector::from_vec(vec![r[0], r[1], rp[0], 2.0 * rp[1]]);
            let y = m.to_f64().transpose() * x;
            for i in 0..2 {
                assert!((r1[i] - y[i]).abs() < 1e-12);
                assert!((r1p[i] * d.as_f64()[i] - y[2 + i]).abs() < 1e-12);
            }
            let bound = 1.0 * m.sup_norm() * d.dg() as f64 * 4.0;
            assert!(r1.iter().chain(&r1p).all(|v| v.abs() <= bound));
        }
    }

    #[test]
    fn generators() {
        let g1 = standard_generators(1);
        assert!(g1.contains(&sm(&[vec![0, -1], vec![1, 0]])));
        assert!(g1.contains(&sm(&[vec![1, 1], vec![0, 1]])));
        for g in 1..4 {
            let gens = standard_generators(g);
            assert!(gens.iter().all(|m| is_symplectic(m.matrix()).unwrap() && m.is_integer()));
            assert_eq!(gens, standard_generators(g));
        }
    }

    #[test]
    fn inverse_and_json() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let m = random_integral_symplectic(2, 7, &mut rng);
        assert_eq!(m.mul(&m.inverse()), SymplecticMatrix::identity(2));
        let json = serde_json::to_string(&SymplecticJson::from(&m)).unwrap();
        let back: SymplecticJson = serde_json::from_str(&json).unwrap();
        assert_eq!(back.to_matrix().unwrap(), m);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn products_stay_symplectic(seed in any::<u64>(), g in 1usize..4) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_integral_symplectic(g, 5, &mut rng);
            let b = random_integral_symplectic(g, 5, &mut rng);
            prop_assert!(is_symplectic(a.mul(&b).matrix()).unwrap());
        }

        #[test]
        fn action_is_compatible(seed in any::<u64>(), g in 1usize..3) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_integral_symplectic(g, 4, &mut rng);
            let b = random_integral_symplectic(g, 4, &mut rng);
            let tau = random_siegel_point(g, 0.5, 1.0, &mut rng);
            let lhs = act(&a.mul(&b), &tau).unwrap().0;
            let rhs = act(&a, &act(&b, &tau).unwrap().0).unwrap().0;
            let scale = lhs.to_complex().iter().map(|z| z.norm()).fold(1.0, f64::max);
            let err = (lhs.to_complex() - rhs.to_complex()).iter().map(|z| z.norm()).fold(0.0, f64::max);
            prop_assert!(err < 1e-10 * scale);
        }

        #[test]
        fn cocycle_determinant(seed in any::<u64>(), g in 1usize..3) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = random_integral_symplectic(g, 5, &mut rng);
            let tau = random_siegel_point(g, 0.5, 1.0, &mut rng);
            let (image, det) = act(&m, &tau).unwrap();
            let lhs = image.im().determinant() * det.norm_sqr();
            let rhs = tau.im().determinant();
            prop_assert!((lhs - rhs).abs() < 1e-10 * rhs);
        }

        #[test]
        fn membership_chain(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let d = PolarizationType::new(vec![2, 4]).unwrap();
            let m = random_integral_symplectic(2, 3, &mut rng);
            if in_gd(&m, &d) {
                prop_assert!(is_symplectic(m.matrix()).unwrap());
                let _ = in_gd0(&m, &d).unwrap();
            } else {
                prop_assert_eq!(in_gd0(&m, &d), Err(Error::NotInGD));
            }
        }
    }
}
