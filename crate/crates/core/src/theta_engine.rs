//! Riemann theta functions with characteristics.
//!
//! Values are returned as [`ThetaValue`], a unit-modulus mantissa together
//! with the natural log of the modulus, so that large quasi-periodicity
//! factors never overflow.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma_ui;

use crate::cones_tubes::{build_cm, build_mib, relative_interior_contains, tube_contains, TubeMode, TubeSpec};
use crate::reduction::minkowski_reduce;
use crate::sym_core::{sym_dim, sym_to_vec, SiegelPoint, SymMatC, SymMatR};
use crate::symplectic::{act, SymplecticMatrix};
use crate::{Error, Result};

/// Largest number of lattice points a single evaluation may visit.
pub const MAX_LATTICE_POINTS: f64 = 1e8;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// `mantissa * exp(log_scale)` with `|mantissa| = 1`, or the exact zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(into = "ThetaValueJson", from = "ThetaValueJson")]
pub struct ThetaValue {
    pub mantissa: Complex64,
    pub log_scale: f64,
}

#[derive(Serialize, Deserialize)]
struct ThetaValueJson {
    mantissa: [f64; 2],
    log_scale: f64,
}

impl From<ThetaValue> for ThetaValueJson {
    fn from(v: ThetaValue) -> Self {
        ThetaValueJson { mantissa: [v.mantissa.re, v.mantissa.im], log_scale: v.log_scale }
    }
}

impl From<ThetaValueJson> for ThetaValue {
    fn from(v: ThetaValueJson) -> Self {
        ThetaValue::from_parts(Complex64::new(v.mantissa[0], v.mantissa[1]), v.log_scale)
    }
}

impl ThetaValue {
    pub const ZERO: ThetaValue = ThetaValue { mantissa: Complex64::new(0.0, 0.0), log_scale: 0.0 };
    pub const ONE: ThetaValue = ThetaValue { mantissa: Complex64::new(1.0, 0.0), log_scale: 0.0 };

    /// Normalizes `mantissa * exp(log_scale)`.
    pub fn from_parts(mantissa: Complex64, log_scale: f64) -> Self {
        let r = mantissa.norm();
        if r == 0.0 || !r.is_finite() {
            return ThetaValue::ZERO;
        }
        ThetaValue { mantissa: mantissa / r, log_scale: log_scale + r.ln() }
    }

    pub fn from_complex(v: Complex64) -> Self {
        Self::from_parts(v, 0.0)
    }

    /// `exp(w)` for complex `w`, kept in log form.
    pub fn exp(w: Complex64) -> Self {
        ThetaValue { mantissa: Complex64::from_polar(1.0, w.im.rem_euclid(2.0 * PI)), log_scale: w.re }
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa == Complex64::new(0.0, 0.0)
    }

    /// `ln |v|`, `-inf` for zero.
    pub fn ln_abs(&self) -> f64 {
        if self.is_zero() {
            f64::NEG_INFINITY
        } else {
            self.log_scale
        }
    }

    pub fn abs(&self) -> f64 {
        if self.is_zero() {
            0.0
        } else {
            self.log_scale.exp()
        }
    }

    pub fn to_complex(&self) -> Complex64 {
        self.mantissa * self.abs()
    }

    /// The value scaled by `exp(-shift)`.
    pub fn to_complex_shifted(&self, shift: f64) -> Complex64 {
        if self.is_zero() {
            Complex64::new(0.0, 0.0)
        } else {
            self.mantissa * (self.log_scale - shift).exp()
        }
    }

    pub fn mul(&self, other: &ThetaValue) -> ThetaValue {
        if self.is_zero() || other.is_zero() {
            return ThetaValue::ZERO;
        }
        Self::from_parts(self.mantissa * other.mantissa, self.log_scale + other.log_scale)
    }

    pub fn div(&self, other: &ThetaValue) -> Option<ThetaValue> {
        if other.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(ThetaValue::ZERO);
        }
        Some(Self::from_parts(self.mantissa / other.mantissa, self.log_scale - other.log_scale))
    }

    pub fn powi(&self, k: i32) -> ThetaValue {
        if self.is_zero() {
            return if k == 0 { ThetaValue::ONE } else { ThetaValue::ZERO };
        }
        Self::from_parts(self.mantissa.powi(k), self.log_scale * k as f64)
    }
}

/// Product of log-scaled values.
pub fn product(values: &[ThetaValue]) -> ThetaValue {
    values.iter().fold(ThetaValue::ONE, |acc, v| acc.mul(v))
}

/// Characteristic `(a, b)` of `theta[a; b]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Characteristic {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

impl Characteristic {
    pub fn new(a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::DimensionMismatch { expected: a.len(), found: b.len() });
        }
        if a.iter().chain(&b).any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter("characteristic entries must be finite".into()));
        }
        Ok(Characteristic { a, b })
    }

    pub fn zero(g: usize) -> Self {
        Characteristic { a: vec![0.0; g], b: vec![0.0; g] }
    }

    pub fn g(&self) -> usize {
        self.a.len()
    }
}

/// `e(z) = exp(2 pi i z)`.
pub fn e_func(z: Complex64) -> Complex64 {
    (2.0 * PI * I * z).exp()
}

#[derive(Default, Clone, Copy)]
struct KahanComplex {
    sum: Complex64,
    comp: Complex64,
}

impl KahanComplex {
    fn add(&mut self, x: Complex64) {
        let y = x - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }
}

fn check_dims(z: &[Complex64], tau: &SiegelPoint) -> Result<()> {
    if z.len() != tau.g() {
        return Err(Error::DimensionMismatch { expected: tau.g(), found: z.len() });
    }
    Ok(())
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 1e-15 && eps < 1e-2) {
        return Err(Error::InvalidParameter(format!("eps must lie in (1e-15, 1e-2), got {eps}")));
    }
    Ok(())
}

/// `t^T M t` for complex symmetric `M` and complex `t`.
fn quad_c(m: &DMatrix<Complex64>, u: &[Complex64], v: &[Complex64]) -> Complex64 {
    let g = u.len();
    let mut s = Complex64::new(0.0, 0.0);
    for i in 0..g {
        for j in 0..g {
            s += u[i] * m[(i, j)] * v[j];
        }
    }
    s
}

/// `exp(-pi i (m^T tau m + 2 m^T z))`, the factor with
/// `theta(z + tau m, tau) = q * theta(z, tau)`.
pub fn quasiperiod_factor(m: &[i64], z: &[Complex64], tau: &SiegelPoint) -> ThetaValue {
    let t = tau.to_complex();
    let mc: Vec<Complex64> = m.iter().map(|&x| Complex64::new(x as f64, 0.0)).collect();
    let q = quad_c(&t, &mc, &mc) + 2.0 * mc.iter().zip(z).map(|(a, b)| a * b).sum::<Complex64>();
    ThetaValue::exp(-PI * I * q)
}

/// Tail bound for `sum exp(-|x|^2)` over a lattice with minimum `rho`,
/// outside the ball of radius `r`.
fn tail_bound(g: usize, rho: f64, r: f64) -> f64 {
    let gf = g as f64;
    let x = (r - rho / 2.0).powi(2);
    if x <= 0.0 {
        return f64::INFINITY;
    }
    0.5 * gf * (2.0 / rho).powf(gf) * gamma_ui(gf / 2.0, x)
}

/// Smallest radius (in the `sqrt(pi) T` metric) with tail below `target`.
fn truncation_radius(g: usize, rho: f64, target: f64) -> f64 {
    let mut lo = ((g as f64).sqrt() + rho) / 2.0;
    if tail_bound(g, rho, lo) <= target {
        return lo;
    }
    let mut hi = lo + 1.0;
    while tail_bound(g, rho, hi) > target {
        lo = hi;
        hi *= 1.5;
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if tail_bound(g, rho, mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// Evaluation plan shared by all values at a fixed `tau`.
struct Plan {
    g: usize,
    t: DMatrix<f64>,
    x: DMatrix<f64>,
    /// Length of the shortest nonzero vector of `sqrt(pi) T`.
    rho: f64,
    tdet: f64,
}

impl Plan {
    fn new(tau: &SiegelPoint) -> Result<Self> {
        let g = tau.g();
        let (reduced, _) = minkowski_reduce(tau.im())?;
        let lambda1 = if g <= 3 {
            reduced.get(0, 0)
        } else {
            // Gram-Schmidt lengths of a reduced basis bound the minimum from below.
            let c = crate::sym_core::cholesky_upper(reduced.matrix(), 0.0).ok_or(Error::NotPositiveDefinite)?;
            (0..g).map(|i| c[(i, i)] * c[(i, i)]).fold(f64::INFINITY, f64::min).min(reduced.get(0, 0))
        };
        let t = tau.cholesky().clone();
        let tdet = (0..g).map(|i| t[(i, i)]).product();
        Ok(Plan { g, t, x: tau.re().matrix().clone(), rho: (PI * lambda1).sqrt(), tdet })
    }

    /// Lattice points `n` with `|T(n + c)| <= radius`, sorted by norm then
    /// lexicographically.
    fn enumerate(&self, c: &[f64], radius: f64) -> Result<Vec<(f64, Vec<i64>)>> {
        let g = self.g;
        let unit_ball = PI.powf(g as f64 / 2.0) / statrs::function::gamma::gamma(g as f64 / 2.0 + 1.0);
        let pad = (0..g).map(|i| self.t[(i, i)]).fold(0.0, f64::max) * (g as f64).sqrt();
        let estimate = unit_ball * (radius + pad).powi(g as i32) / self.tdet;
        if estimate > MAX_LATTICE_POINTS {
            return Err(Error::TruncationRadiusOverflow(radius));
        }
        let mut out = Vec::new();
        let mut n = vec![0i64; g];
        self.descend(g, c, radius * radius, 0.0, &mut n, &mut out);
        if out.len() as f64 > MAX_LATTICE_POINTS {
            return Err(Error::TruncationRadiusOverflow(radius));
        }
        out.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
        Ok(out)
    }

    fn descend(&self, level: usize, c: &[f64], r2: f64, acc: f64, n: &mut Vec<i64>, out: &mut Vec<(f64, Vec<i64>)>) {
        if level == 0 {
            out.push((acc, n.clone()));
            return;
        }
        let i = level - 1;
        let tii = self.t[(i, i)];
        let s: f64 = (level..self.g).map(|j| self.t[(i, j)] * (n[j] as f64 + c[j])).sum();
        let rem = r2 - acc;
        if rem < 0.0 {
            return;
        }
        let w = rem.sqrt();
        let lo = ((-s - w) / tii - c[i]).ceil() as i64;
        let hi = ((-s + w) / tii - c[i]).floor() as i64;
        for k in lo..=hi {
            let v = tii * (k as f64 + c[i]) + s;
            let next = acc + v * v;
            if next <= r2 {
                n[i] = k;
                self.descend(i, c, r2, next, n, out);
            }
        }
        n[i] = 0;
    }

    /// `sum_n exp(-pi |T(n + c)|^2) exp(i pi (n^T X n + 2 n^T u))`.
    fn sum(&self, c: &[f64], u: &[f64], radius: f64) -> Result<Complex64> {
        let pts = self.enumerate(c, radius)?;
        let mut acc = KahanComplex::default();
        for (norm2, n) in &pts {
            let mut phase = 0.0;
            for i in 0..self.g {
                if n[i] == 0 {
                    continue;
                }
                let ni = n[i] as f64;
                phase += 2.0 * ni * u[i];
                for j in 0..self.g {
                    phase += ni * self.x[(i, j)] * n[j] as f64;
                }
            }
            acc.add(Complex64::from_polar((-PI * norm2).exp(), PI * phase.rem_euclid(2.0)));
        }
        Ok(acc.sum)
    }
}

/// Riemann theta function `sum_n exp(pi i (n^T tau n + 2 n^T z))`, with
/// relative accuracy `eps`.
pub fn theta(z: &[Complex64], tau: &SiegelPoint, eps: f64) -> Result<ThetaValue> {
    check_dims(z, tau)?;
    check_eps(eps)?;
    let plan = Plan::new(tau)?;
    theta_with_plan(&plan, z, tau, eps)
}

fn theta_with_plan(plan: &Plan, z: &[Complex64], tau: &SiegelPoint, eps: f64) -> Result<ThetaValue> {
    let g = tau.g();
    let y: Vec<f64> = z.iter().map(|w| w.im).collect();
    let r = tau.solve_im(&y);
    let m: Vec<i64> = r.iter().map(|v| v.round() as i64).collect();
    let c: Vec<f64> = r.iter().zip(&m).map(|(v, k)| v - *k as f64).collect();

    // w = z - tau m, so that Im w = Y c.
    let t = tau.to_complex();
    let w: Vec<Complex64> = (0..g)
        .map(|i| z[i] - (0..g).map(|j| t[(i, j)] * m[j] as f64).sum::<Complex64>())
        .collect();
    let u: Vec<f64> = w.iter().map(|v| v.re - v.re.round()).collect();
    let ycy = tau.im().quad_form(&c);
    let front = ThetaValue::exp(Complex64::new(PI * ycy, 0.0));
    let qf = quasiperiod_factor(&m, &w, tau);

    let mut target = eps / 2.0;
    let mut value = Complex64::new(0.0, 0.0);
    for _ in 0..8 {
        let radius = truncation_radius(g, plan.rho, target) / PI.sqrt();
        value = plan.sum(&c, &u, radius)?;
        let size = value.norm();
        if size >= 1.0 || target <= eps / 2.0 * size {
            break;
        }
        if size == 0.0 {
            target *= 1e-6;
        } else {
            target = eps / 2.0 * size;
        }
        if target < 1e-300 {
            break;
        }
    }
    // theta(w + tau m) = exp(-pi i (m tau m + 2 m w)) theta(w)
    Ok(qf.mul(&front).mul(&ThetaValue::from_complex(value)))
}

/// `theta[a; b](z, tau) = exp(pi i (a^T tau a + 2 a^T (z + b))) theta(z + tau a + b, tau)`.
pub fn theta_char(ch: &Characteristic, z: &[Complex64], tau: &SiegelPoint, eps: f64) -> Result<ThetaValue> {
    check_dims(z, tau)?;
    check_eps(eps)?;
    let plan = Plan::new(tau)?;
    theta_char_with_plan(&plan, ch, z, tau, eps)
}

fn theta_char_with_plan(plan: &Plan, ch: &Characteristic, z: &[Complex64], tau: &SiegelPoint, eps: f64) -> Result<ThetaValue> {
    let g = tau.g();
    if ch.g() != g {
        return Err(Error::DimensionMismatch { expected: g, found: ch.g() });
    }
    let t = tau.to_complex();
    let a: Vec<Complex64> = ch.a.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let zb: Vec<Complex64> = z.iter().zip(&ch.b).map(|(w, b)| w + b).collect();
    let pre = PI * I * (quad_c(&t, &a, &a) + 2.0 * a.iter().zip(&zb).map(|(x, y)| x * y).sum::<Complex64>());
    let shifted: Vec<Complex64> = (0..g).map(|i| zb[i] + (0..g).map(|j| t[(i, j)] * a[j]).sum::<Complex64>()).collect();
    Ok(ThetaValue::exp(pre).mul(&theta_with_plan(plan, &shifted, tau, eps)?))
}

/// Evaluates several characteristics at one `(z, tau)` sharing the lattice plan.
pub fn theta_char_many(chars: &[Characteristic], z: &[Complex64], tau: &SiegelPoint, eps: f64) -> Result<Vec<ThetaValue>> {
    check_dims(z, tau)?;
    check_eps(eps)?;
    let plan = Plan::new(tau)?;
    chars.iter().map(|ch| theta_char_with_plan(&plan, ch, z, tau, eps)).collect()
}

/// Plain partial sum over `|n|_inf <= shell_radius` of
/// `exp(pi i ((n+a)^T tau (n+a) + 2 (n+a)^T (z+b)))`.
pub fn theta_char_direct(ch: &Characteristic, z: &[Complex64], tau: &SiegelPoint, shell_radius: u32) -> Complex64 {
    let g = tau.g();
    assert!(g <= 3 && shell_radius <= 20, "direct sum limited to g <= 3 and shell <= 20");
    assert_eq!(z.len(), g);
    let t = tau.to_complex();
    let side = 2 * shell_radius as i64 + 1;
    let mut total = KahanComplex::default();
    for code in 0..side.pow(g as u32) {
        let mut rest = code;
        let v: Vec<Complex64> = (0..g)
            .map(|i| {
                let n = rest % side - shell_radius as i64;
                rest /= side;
                Complex64::new(n as f64 + ch.a[i], 0.0)
            })
            .collect();
        let zb: Vec<Complex64> = z.iter().zip(&ch.b).map(|(w, b)| w + b).collect();
        let lin: Complex64 = v.iter().zip(&zb).map(|(x, y)| x * y).sum();
        total.add((PI * I * (quad_c(&t, &v, &v) + 2.0 * lin)).exp());
    }
    total.sum
}

/// `exp(2 pi i k tau_{g,g}) theta(z, 2 tau)`.
pub fn aux_theta_prop1(z: &[Complex64], tau: &SiegelPoint, k: u64) -> Result<ThetaValue> {
    let g = tau.g();
    let two_tau = tau.scaled(2.0)?;
    let pre = ThetaValue::exp(2.0 * PI * I * k as f64 * tau.get(g - 1, g - 1));
    Ok(pre.mul(&theta(z, &two_tau, crate::DEFAULT_EPS)?))
}

/// Parameters of the auxiliary bounded theta function.
#[derive(Debug, Clone, PartialEq)]
pub struct Prop1Params {
    pub g: usize,
    pub m: f64,
    pub d: f64,
    pub c: f64,
    pub c_prime: f64,
    pub k: u64,
    pub beta_star: SymMatR,
}

/// `k = floor(m^2 g / 2c) + 1` and an interior point `beta*` of the closed
/// Minkowski cone with `beta*_{g,g} < c d / 2c'`.
pub fn prop1_parameters(g: usize, m: f64, d: f64, c: f64, c_prime: f64) -> Result<Prop1Params> {
    if g == 0 {
        return Err(Error::InvalidParameter("g must be positive".into()));
    }
    for (name, v) in [("m", m), ("d", d), ("c", c), ("c_prime", c_prime)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::InvalidParameter(format!("{name} must be positive and finite")));
        }
    }
    let k = (m * m * g as f64 / (2.0 * c)).floor() as u64 + 1;
    let bound = c * d / (2.0 * c_prime);
    if !(bound.is_normal() && bound > 0.0) {
        return Err(Error::InfeasibleParameters(format!("c d / 2c' = {bound} is not a usable bound")));
    }
    let top = 1.0 + 0.1 * (g as f64 - 1.0);
    let scale = 0.5 * bound / top;
    let shape = DMatrix::from_fn(g, g, |i, j| if i == j { 1.0 + 0.1 * i as f64 } else { 0.05 });
    let beta_star = SymMatR::symmetrize(&(shape * scale));
    if g <= 3 {
        let cone = build_mib(g)?;
        if !relative_interior_contains(&cone, &sym_to_vec(&beta_star), 0.0)? {
            return Err(Error::InfeasibleParameters("beta* is not interior to the Minkowski cone".into()));
        }
    }
    Ok(Prop1Params { g, m, d, c, c_prime, k, beta_star })
}

fn random_pd(g: usize, rng: &mut ChaCha8Rng) -> SymMatR {
    let a = DMatrix::from_fn(g, g, |_, _| rng.gen_range(-1.0..1.0));
    SymMatR::symmetrize(&(&a * a.transpose() + DMatrix::identity(g, g) * 0.05))
}

/// Empirical constants `c <= beta[x] / sum beta_ii x_i^2 <= c'` over random
/// Minkowski-reduced `beta`, widened by the factors 0.9 and 1.1.
pub fn estimate_reduction_constants(g: usize, sample_count: usize) -> Result<(f64, f64)> {
    estimate_reduction_constants_seeded(g, sample_count, 0x5eed)
}

pub fn estimate_reduction_constants_seeded(g: usize, sample_count: usize, seed: u64) -> Result<(f64, f64)> {
    if g == 0 || g > 3 {
        return Err(Error::UnsupportedDimension(g));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut lo, mut hi) = (1.0f64, 1.0f64);
    for _ in 0..sample_count {
        let (beta, _) = minkowski_reduce(&random_pd(g, &mut rng))?;
        // Extremes over x of beta[x] / sum beta_ii x_i^2 are the eigenvalues of
        // the diagonally normalized form.
        let m = beta.matrix();
        let s = DMatrix::from_fn(g, g, |i, j| m[(i, j)] / (m[(i, i)] * m[(j, j)]).sqrt());
        for ev in s.symmetric_eigenvalues().iter() {
            lo = lo.min(*ev);
            hi = hi.max(*ev);
        }
    }
    Ok((0.9 * lo, 1.1 * hi))
}

/// `(sum_n exp(-pi c d (|n| - m/c)^2))^g`, summed until terms drop below 1e-18.
pub fn prop1_series_bound(params: &Prop1Params) -> f64 {
    let a = PI * params.c * params.d;
    let center = params.m / params.c;
    let term = |n: i64| (-a * ((n.abs() as f64) - center).powi(2)).exp();
    let mut s = term(0);
    let mut n = 1i64;
    loop {
        let t = term(n);
        s += 2.0 * t;
        if n as f64 > center && t < 1e-18 {
            break;
        }
        n += 1;
    }
    s.powi(params.g as i32)
}

/// Samples `(z, tau)` from the tube over `C_m` translated by `beta*` and cut
/// by `beta_{1,1} > d`, and returns the largest observed modulus of the
/// auxiliary theta function together with the Gaussian series bound.
pub fn boundedness_probe(params: &Prop1Params, sample_count: usize, radius: f64, seed: u64) -> Result<(f64, f64)> {
    let g = params.g;
    let n = sym_dim(g);
    let m_q = Ratio::<i64>::approximate_float(params.m)
        .ok_or_else(|| Error::InvalidParameter("m has no rational approximation".into()))?;
    let cone = build_cm(g, m_q)?;
    let m_used = *m_q.numer() as f64 / *m_q.denom() as f64;
    let mut shift = vec![0.0; g];
    shift.extend(sym_to_vec(&params.beta_star).into_iter().map(|v| -v));
    let mut ell = vec![0i64; g + n];
    ell[g] = 1;
    let spec = TubeSpec::new(cone, shift, ell, params.d, TubeMode::Strict, None)?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sup = 0.0f64;
    let mut accepted = 0;
    let mut attempts = 0;
    while accepted < sample_count && attempts < 100 * sample_count.max(1) {
        attempts += 1;
        let (base, _) = minkowski_reduce(&random_pd(g, &mut rng))?;
        let base = base.scale(1.0 / base.get(0, 0));
        let s = rng.gen_range(0.0..radius.max(1e-9));
        let beta0 = base.scale(s);
        let beta = SymMatR::symmetrize(&(beta0.matrix() + params.beta_star.matrix()));
        let y: Vec<f64> = (0..g).map(|i| 0.999 * m_used * beta0.get(i, i) * rng.gen_range(-1.0..1.0)).collect();
        let re_tau = DMatrix::from_fn(g, g, |_, _| rng.gen_range(-1.0..1.0));
        let re_z: Vec<f64> = (0..g).map(|_| rng.gen_range(0.0..1.0)).collect();

        let mut coords: Vec<Complex64> = (0..g).map(|i| Complex64::new(re_z[i], y[i])).collect();
        let re_sym = SymMatR::symmetrize(&re_tau);
        for (re, im) in sym_to_vec(&re_sym).into_iter().zip(sym_to_vec(&beta)) {
            coords.push(Complex64::new(re, im));
        }
        if !tube_contains(&spec, &coords, 1e-12)? {
            continue;
        }
        let tau = SiegelPoint::new(SymMatC::new(re_sym, beta)?)?;
        let value = aux_theta_prop1(&coords[..g], &tau, params.k)?;
        sup = sup.max(value.abs());
        accepted += 1;
    }
    Ok((sup, prop1_series_bound(params)))
}

/// Outcome of the transformation-formula check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransformStats {
    pub mean_ratio: Complex64,
    pub rel_std: f64,
    pub used: usize,
    pub rejected: usize,
}

/// Ratio of `theta[ch1](z, M tau)` to
/// `sqrt(det(gamma tau + delta)) exp(pi i z^T gamma (gamma tau + delta)^T z) theta[ch]((gamma tau + delta)^T z, tau)`
/// over the samples, with its mean and relative standard deviation.
///
/// The square root is taken on the principal branch, then each ratio is
/// aligned in sign with the first one.
pub fn transformation_constancy(
    m: &SymplecticMatrix,
    ch1: &Characteristic,
    ch: &Characteristic,
    samples: &[(Vec<Complex64>, SiegelPoint)],
    eps: f64,
) -> Result<TransformStats> {
    let gamma = m.gamma().to_f64().map(|x| Complex64::new(x, 0.0));
    let mut ratios: Vec<Complex64> = Vec::new();
    let mut rejected = 0;
    for (z, tau1) in samples {
        check_dims(z, tau1)?;
        let (tau, det) = act(m, tau1)?;
        let a = m.automorphy_factor(tau1);
        let at = a.transpose();
        let zv = nalgebra::DVector::from_column_slice(z);
        let az: Vec<Complex64> = (&at * &zv).iter().copied().collect();
        let q = (zv.transpose() * &gamma * &at * &zv)[(0, 0)];
        let den_theta = theta_char(ch, &az, tau1, eps)?;
        if den_theta.abs() < 1e-12 {
            rejected += 1;
            continue;
        }
        let num = theta_char(ch1, z, &tau, eps)?;
        let den = ThetaValue::from_complex(det.sqrt()).mul(&ThetaValue::exp(PI * I * q)).mul(&den_theta);
        let r = num.div(&den).expect("nonzero denominator").to_complex();
        ratios.push(r);
    }
    if ratios.is_empty() {
        return Err(Error::DenominatorNearZero { rejected });
    }
    let first = ratios[0];
    for r in ratios.iter_mut() {
        if (*r + first).norm() < (*r - first).norm() {
            *r = -*r;
        }
    }
    let n = ratios.len() as f64;
    let mean = ratios.iter().sum::<Complex64>() / n;
    let var = ratios.iter().map(|r| (r - mean).norm_sqr()).sum::<f64>() / n;
    Ok(TransformStats { mean_ratio: mean, rel_std: var.sqrt() / mean.norm(), used: ratios.len(), rejected })
}
