//! Polarized complex tori `C^g / (tau Z^g + D Z^g)` and their theta maps into
//! projective space.

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::cones_tubes::lattice_coordinates;
use crate::sym_core::SiegelPoint;
use crate::symplectic::{in_gd, iso_matrix, PolarizationType, SymplecticMatrix};
use crate::theta_engine::{theta_char, theta_char_many, Characteristic, ThetaValue};
use crate::{Error, Result, DEFAULT_ZERO_TOL};

pub use crate::theta_engine::product;

/// Point of `P^N(C)` scaled so that its largest-modulus coordinate is `1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectivePoint {
    coords: Vec<Complex64>,
    pivot: usize,
}

impl ProjectivePoint {
    pub fn new(coords: Vec<Complex64>, zero_tol: f64) -> Result<Self> {
        let (pivot, max) = coords
            .iter()
            .enumerate()
            .fold((0, -1.0), |(bi, bm), (i, c)| if c.norm() > bm { (i, c.norm()) } else { (bi, bm) });
        if coords.is_empty() || !(max > zero_tol) {
            return Err(Error::CommonZeroSuspected);
        }
        let p = coords[pivot];
        let coords = coords.iter().map(|c| c / p).collect();
        Ok(ProjectivePoint { coords, pivot })
    }

    /// Normalizes log-scaled coordinates after removing their common scale.
    pub fn from_theta_values(values: &[ThetaValue], zero_tol: f64) -> Result<Self> {
        let shift = values.iter().map(ThetaValue::ln_abs).fold(f64::NEG_INFINITY, f64::max);
        if !shift.is_finite() {
            return Err(Error::CommonZeroSuspected);
        }
        Self::new(values.iter().map(|v| v.to_complex_shifted(shift)).collect(), zero_tol)
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.coords
    }

    pub fn pivot(&self) -> usize {
        self.pivot
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn max_modulus(&self) -> f64 {
        self.coords.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

#[derive(Serialize, Deserialize)]
struct ProjectivePointJson {
    coords: Vec<[f64; 2]>,
    pivot: usize,
}

impl Serialize for ProjectivePoint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ProjectivePointJson { coords: self.coords.iter().map(|c| [c.re, c.im]).collect(), pivot: self.pivot }.serialize(s)
    }
}

/// Projective equality after rescaling `q` to agree with `p` at `p`'s pivot.
pub fn proj_equal(p: &ProjectivePoint, q: &ProjectivePoint, tol: f64) -> Result<bool> {
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch { expected: p.len(), found: q.len() });
    }
    let (a, b) = if q.coords[p.pivot].norm() >= DEFAULT_ZERO_TOL {
        (p, q)
    } else if p.coords[q.pivot].norm() >= DEFAULT_ZERO_TOL {
        (q, p)
    } else {
        return Err(Error::PivotMismatch);
    };
    let scale = a.coords[a.pivot] / b.coords[a.pivot];
    Ok(a.coords.iter().zip(&b.coords).all(|(x, y)| (x - y * scale).norm() < tol))
}

/// Basis `(tau | D)` of the period lattice.
#[derive(Debug, Clone)]
pub struct LatticeBasis {
    pub d: PolarizationType,
    pub tau: SiegelPoint,
    pub columns: Vec<Vec<Complex64>>,
}

impl LatticeBasis {
    pub fn new(d: PolarizationType, tau: SiegelPoint) -> Result<Self> {
        let g = tau.g();
        if d.g() != g {
            return Err(Error::DimensionMismatch { expected: g, found: d.g() });
        }
        let mut columns: Vec<Vec<Complex64>> = (0..g).map(|j| (0..g).map(|i| tau.get(i, j)).collect()).collect();
        for (j, dj) in d.as_f64().into_iter().enumerate() {
            columns.push((0..g).map(|i| Complex64::new(if i == j { dj } else { 0.0 }, 0.0)).collect());
        }
        Ok(LatticeBasis { d, tau, columns })
    }

    /// The `2g x 2g` real matrix of stacked real and imaginary parts.
    pub fn real_matrix(&self) -> DMatrix<f64> {
        let g = self.tau.g();
        DMatrix::from_fn(2 * g, 2 * g, |i, j| if i < g { self.columns[j][i].re } else { self.columns[j][i - g].im })
    }

    /// 2-norm condition number of [`Self::real_matrix`].
    pub fn condition(&self) -> f64 {
        let sv = self.real_matrix().singular_values();
        sv.max() / sv.min()
    }

    /// `tau m + D n` for integer coefficient vectors.
    pub fn point(&self, m: &[f64], n: &[f64]) -> Vec<Complex64> {
        let g = self.tau.g();
        (0..g)
            .map(|i| {
                (0..g).map(|j| self.columns[j][i] * m[j]).sum::<Complex64>()
                    + (0..g).map(|j| self.columns[g + j][i] * n[j]).sum::<Complex64>()
            })
            .collect()
    }
}

/// The vectors of `D^{-1} Z^g` with entries in `[0, 1)`, lexicographically.
pub fn coset_reps(d: &PolarizationType) -> Vec<Vec<Ratio<i64>>> {
    let mut out: Vec<Vec<Ratio<i64>>> = vec![Vec::new()];
    for &di in d.entries() {
        let di = di as i64;
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..di).map(move |k| {
                    let mut v = prefix.clone();
                    v.push(Ratio::new(k, di));
                    v
                })
            })
            .collect();
    }
    out
}

fn reps_f64(d: &PolarizationType) -> Vec<Vec<f64>> {
    coset_reps(d).iter().map(|c| c.iter().map(|x| *x.numer() as f64 / *x.denom() as f64).collect()).collect()
}

/// `z = tau (t + m) + D (s + n)` with `t, s` in `[0, 1)^g`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParallelogramReduction {
    pub z0: Vec<Complex64>,
    pub m: Vec<i64>,
    pub n: Vec<i64>,
    pub t: Vec<f64>,
    pub s: Vec<f64>,
}

fn split_unit(x: f64) -> (i64, f64) {
    let k = x.floor();
    let f = x - k;
    if f >= 1.0 {
        (k as i64 + 1, 0.0)
    } else {
        (k as i64, f)
    }
}

pub fn reduce_to_parallelogram(z: &[Complex64], d: &PolarizationType, tau: &SiegelPoint) -> Result<ParallelogramReduction> {
    let (r, rp) = lattice_coordinates(z, tau, d)?;
    let (m, t): (Vec<i64>, Vec<f64>) = r.iter().map(|&x| split_unit(x)).unzip();
    let (n, s): (Vec<i64>, Vec<f64>) = rp.iter().map(|&x| split_unit(x)).unzip();
    let basis = LatticeBasis::new(d.clone(), tau.clone())?;
    let z0 = basis.point(&t, &s);
    Ok(ParallelogramReduction { z0, m, n, t, s })
}

fn coset_characteristics(d: &PolarizationType) -> Vec<Characteristic> {
    let g = d.g();
    reps_f64(d).into_iter().map(|a| Characteristic { a, b: vec![0.0; g] }).collect()
}

/// `(theta[c_0; 0](z, tau) : ... : theta[c_N; 0](z, tau))`.
pub fn phi_d(z: &[Complex64], tau: &SiegelPoint, d: &PolarizationType, eps: f64) -> Result<ProjectivePoint> {
    if d.g() != tau.g() {
        return Err(Error::DimensionMismatch { expected: tau.g(), found: d.g() });
    }
    if d.d1() < 2 {
        log::warn!("polarization type with d1 = {} gives no common-zero guarantee", d.d1());
    }
    let values = theta_char_many(&coset_characteristics(d), z, tau, eps)?;
    ProjectivePoint::from_theta_values(&values, DEFAULT_ZERO_TOL)
}

/// Theta-null map `tau -> phi_d(0, tau)`.
pub fn psi_d(tau: &SiegelPoint, d: &PolarizationType, eps: f64) -> Result<ProjectivePoint> {
    phi_d(&vec![Complex64::new(0.0, 0.0); tau.g()], tau, d, eps)
}

pub fn phi_big(z: &[Complex64], tau: &SiegelPoint, d: &PolarizationType, eps: f64) -> Result<(ProjectivePoint, ProjectivePoint)> {
    Ok((phi_d(z, tau, d, eps)?, psi_d(tau, d, eps)?))
}

/// `z -> k z` identifies the torus of type `D` at `tau` with the torus of
/// type `kD` at `k tau`.
pub fn scale_iso(k: u64, d: &PolarizationType, tau: &SiegelPoint) -> Result<(PolarizationType, SiegelPoint)> {
    if k == 0 {
        return Err(Error::InvalidParameter("scaling factor must be positive".into()));
    }
    Ok((d.scaled(k), tau.scaled(k as f64)?))
}

/// `tau' = M tau` and `A = (gamma tau + delta)^T`, so that `z -> A z` maps the
/// lattice at `tau'` into the lattice at `tau`.
pub fn torus_iso_apply(m: &SymplecticMatrix, d: &PolarizationType, tau: &SiegelPoint) -> Result<(SiegelPoint, DMatrix<Complex64>)> {
    if !in_gd(m, d) {
        return Err(Error::NotInGD);
    }
    let (a, tau_prime) = iso_matrix(m, tau)?;
    Ok((tau_prime, a))
}

/// Largest distance to the nearest integer among the `(tau | D)` coordinates
/// of the columns of `A (tau' | D)`.
pub fn lattice_image_residual(a: &DMatrix<Complex64>, d: &PolarizationType, tau: &SiegelPoint, tau_prime: &SiegelPoint) -> Result<f64> {
    let source = LatticeBasis::new(d.clone(), tau_prime.clone())?;
    let mut worst = 0.0f64;
    for col in &source.columns {
        let v = nalgebra::DVector::from_column_slice(col);
        let image: Vec<Complex64> = (a * v).iter().copied().collect();
        let (r, rp) = lattice_coordinates(&image, tau, d)?;
        for x in r.iter().chain(&rp) {
            worst = worst.max((x - x.round()).abs());
        }
    }
    Ok(worst)
}

/// `|f(M tau) - det(gamma tau + delta)^k f(tau)| / max(|f(tau)|, zero_tol)`.
pub fn modular_weight_residual(f: impl Fn(&SiegelPoint) -> Complex64, m: &SymplecticMatrix, tau: &SiegelPoint, k: i32) -> Result<f64> {
    let (image, det) = crate::symplectic::act(m, tau)?;
    let base = f(tau);
    Ok((f(&image) - det.powi(k) * base).norm() / base.norm().max(DEFAULT_ZERO_TOL))
}

/// Theta constant `theta[a; b](0, tau)`.
pub fn theta_null(ch: &Characteristic, tau: &SiegelPoint, eps: f64) -> Result<ThetaValue> {
    theta_char(ch, &vec![Complex64::new(0.0, 0.0); tau.g()], tau, eps)
}
