//! Minkowski reduction of positive definite forms and reduction of period
//! matrices toward the Siegel fundamental set.

use std::collections::{HashMap, HashSet};
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::ToPrimitive;

use crate::rational::{det_i64, QMatrix};
use crate::sym_core::{is_positive_definite, SiegelPoint, SymMatC, SymMatR};
use crate::symplectic::{act, elementary_unimodular, symmetric_integer_matrices, SymplecticMatrix};
use crate::{Error, Result};

/// Default cap on Siegel reduction rounds.
pub const DEFAULT_MAX_ITERATIONS: usize = 1000;

/// The vectors `a` entering condition M(II), tagged with their index `k`
/// (zero-based). Vacuous instances `a = +-e_k` are left out and `a`, `-a`
/// are stored once.
#[derive(Debug, Clone, PartialEq)]
pub struct MinkowskiInequalitySet {
    g: usize,
    entries: Vec<(usize, Vec<i64>)>,
}

impl MinkowskiInequalitySet {
    /// Coefficients bounded by 2, which contains the known minimal lists for `g <= 3`.
    pub fn builtin(g: usize) -> Result<Self> {
        if g == 0 || g > 3 {
            return Err(Error::UnsupportedDimension(g));
        }
        Ok(Self::with_radius(g, 2))
    }

    /// All admissible `a` with `|a_i| <= radius`.
    pub fn with_radius(g: usize, radius: i64) -> Self {
        let base = (2 * radius + 1) as usize;
        let total = base.pow(g as u32);
        let mut entries = Vec::new();
        for k in 0..g {
            for code in 0..total {
                let mut c = code;
                let a: Vec<i64> = (0..g)
                    .map(|_| {
                        let v = (c % base) as i64 - radius;
                        c /= base;
                        v
                    })
                    .collect();
                let tail_gcd = a[k..].iter().fold(0i64, |acc, &x| acc.gcd(&x));
                if tail_gcd != 1 {
                    continue;
                }
                let first = a.iter().find(|&&x| x != 0).copied().unwrap_or(0);
                if first < 0 {
                    continue;
                }
                let is_unit_k = a.iter().enumerate().all(|(i, &x)| if i == k { x.abs() == 1 } else { x == 0 });
                if is_unit_k {
                    continue;
                }
                entries.push((k, a));
            }
        }
        MinkowskiInequalitySet { g, entries }
    }

    pub fn g(&self) -> usize {
        self.g
    }

    pub fn entries(&self) -> &[(usize, Vec<i64>)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

fn quad_i(beta: &SymMatR, a: &[i64]) -> f64 {
    let g = beta.g();
    let mut s = 0.0;
    for i in 0..g {
        if a[i] == 0 {
            continue;
        }
        for j in 0..g {
            s += (a[i] * a[j]) as f64 * beta.get(i, j);
        }
    }
    s
}

/// Checks M(I), M(II) over `ineqs` (or the built-in list) and M(III).
pub fn is_minkowski_reduced(beta: &SymMatR, ineqs: Option<&MinkowskiInequalitySet>, tol: f64) -> Result<bool> {
    let g = beta.g();
    let owned;
    let set = match ineqs {
        Some(s) => {
            if s.g() != g {
                return Err(Error::DimensionMismatch { expected: g, found: s.g() });
            }
            s
        }
        None => {
            owned = MinkowskiInequalitySet::builtin(g)?;
            &owned
        }
    };
    if !(beta.get(0, 0) > 0.0) {
        return Ok(false);
    }
    for (k, a) in set.entries() {
        if quad_i(beta, a) < beta.get(*k, *k) - tol {
            return Ok(false);
        }
    }
    Ok((0..g.saturating_sub(1)).all(|k| beta.get(k, k + 1) >= -tol))
}

fn inequality_set_for(g: usize) -> MinkowskiInequalitySet {
    if g <= 3 {
        MinkowskiInequalitySet::with_radius(g, 2)
    } else {
        MinkowskiInequalitySet::with_radius(g, 1)
    }
}

/// LLL reduction of the basis (columns of the returned `U`) with respect to
/// the form `beta`.
fn lll_gram(beta: &SymMatR, delta: f64) -> DMatrix<i64> {
    let g = beta.g();
    let mut u = DMatrix::<i64>::identity(g, g);
    if g == 1 {
        return u;
    }
    let mut k = 1;
    let mut guard = 0;
    while k < g && guard < 100_000 {
        guard += 1;
        for j in (0..k).rev() {
            let (mu, _) = gram_schmidt(&beta.congruence(&u));
            let r = mu[(k, j)].round();
            if r != 0.0 {
                let r = r as i64;
                for i in 0..g {
                    u[(i, k)] -= r * u[(i, j)];
                }
            }
        }
        let (mu, bstar) = gram_schmidt(&beta.congruence(&u));
        if bstar[k] >= (delta - mu[(k, k - 1)].powi(2)) * bstar[k - 1] {
            k += 1;
        } else {
            u.swap_columns(k, k - 1);
            k = (k - 1).max(1);
        }
    }
    u
}

fn gram_schmidt(gram: &SymMatR) -> (DMatrix<f64>, Vec<f64>) {
    let g = gram.g();
    let mut mu = DMatrix::zeros(g, g);
    let mut b = vec![0.0; g];
    for i in 0..g {
        for j in 0..i {
            let mut s = gram.get(i, j);
            for l in 0..j {
                s -= mu[(j, l)] * mu[(i, l)] * b[l];
            }
            mu[(i, j)] = s / b[j];
        }
        let mut s = gram.get(i, i);
        for l in 0..i {
            s -= mu[(i, l)] * mu[(i, l)] * b[l];
        }
        b[i] = s;
        mu[(i, i)] = 1.0;
    }
    (mu, b)
}

/// Unimodular `W` whose first column is the primitive vector `a`.
fn complete_to_unimodular(a: &[i64]) -> DMatrix<i64> {
    let n = a.len();
    let mut v = a.to_vec();
    let mut w = DMatrix::<i64>::identity(n, n);
    loop {
        let nonzero: Vec<usize> = (0..n).filter(|&i| v[i] != 0).collect();
        if nonzero.len() <= 1 {
            break;
        }
        let p = *nonzero.iter().min_by_key(|&&i| (v[i].abs(), i)).expect("nonempty");
        for &j in &nonzero {
            if j == p {
                continue;
            }
            let qt = Integer::div_floor(&v[j], &v[p]);
            if qt != 0 {
                // v <- E v with row_j -= q row_p; W <- W E^{-1}: col_p += q col_j
                v[j] -= qt * v[p];
                for i in 0..n {
                    w[(i, p)] += qt * w[(i, j)];
                }
            }
        }
    }
    let p = (0..n).find(|&i| v[i] != 0).expect("primitive vector is nonzero");
    debug_assert_eq!(v[p].abs(), 1);
    if p != 0 {
        v.swap(0, p);
        w.swap_columns(0, p);
    }
    if v[0] < 0 {
        for i in 0..n {
            w[(i, 0)] = -w[(i, 0)];
        }
    }
    w
}

/// Minkowski reduction: returns `(U^T beta U, U)` with `det U = +-1`.
pub fn minkowski_reduce(beta: &SymMatR) -> Result<(SymMatR, DMatrix<i64>)> {
    let g = beta.g();
    let scale = (0..g).map(|i| beta.get(i, i).abs()).fold(0.0, f64::max);
    if !is_positive_definite(beta, crate::DEFAULT_PD_TOL * scale.max(1e-300)) {
        return Err(Error::NotPositiveDefinite);
    }
    let mut u = lll_gram(beta, 0.99);
    let set = inequality_set_for(g);
    for _ in 0..10_000 {
        let cur = beta.congruence(&u);
        let tol = 1e-13 * (0..g).map(|i| cur.get(i, i)).fold(0.0, f64::max);
        let mut found = None;
        'outer: for k in 0..g {
            let mut best: Option<(f64, &Vec<i64>)> = None;
            for (kk, a) in set.entries() {
                if *kk != k {
                    continue;
                }
                let val = quad_i(&cur, a);
                if val < cur.get(k, k) - tol && best.is_none_or(|(b, _)| val < b) {
                    best = Some((val, a));
                }
            }
            if let Some((_, a)) = best {
                found = Some((k, a.clone()));
                break 'outer;
            }
        }
        let Some((k, a)) = found else {
            fix_signs(beta, &mut u);
            let red = beta.congruence(&u);
            debug_assert!(num_traits::Signed::abs(&det_i64(&u)) == num_bigint::BigInt::from(1));
            return Ok((red, u));
        };
        let w = complete_to_unimodular(&a[k..]);
        let mut v = DMatrix::<i64>::identity(g, g);
        for i in 0..k {
            v[(i, k)] = a[i];
        }
        for i in k..g {
            for j in k..g {
                v[(i, j)] = w[(i - k, j - k)];
            }
        }
        u = &u * v;
    }
    Err(Error::MaxIterationsExceeded(10_000))
}

fn fix_signs(beta: &SymMatR, u: &mut DMatrix<i64>) {
    let g = beta.g();
    for k in 0..g.saturating_sub(1) {
        let cur = beta.congruence(u);
        if cur.get(k, k + 1) < 0.0 {
            for i in 0..g {
                u[(i, k + 1)] = -u[(i, k + 1)];
            }
        }
    }
}

/// Reduction outcome status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReductionStatus {
    /// Every condition of the fundamental set was verified (`g = 1`).
    Exact,
    /// Condition (iii) was verified on the check set of the given radius.
    CheckedOnBall(u32),
}

#[derive(Debug, Clone)]
pub struct ReductionCertificate {
    pub sigma: SymplecticMatrix,
    pub tau_reduced: SiegelPoint,
    pub residual: f64,
    pub status: ReductionStatus,
    pub iterations: usize,
}

/// Finite family of integral symplectic `sigma` used to test
/// `|det(gamma tau + delta)| >= 1`.
///
/// Elements are `J_s . diag(U^T, U^{-1}) . M_beta`, so that
/// `det(gamma tau + delta)` is, up to sign, the leading `s x s` minor of
/// `U^T (tau + beta) U`. `beta` runs over symmetric integer matrices with
/// entries in `[-r, r]`. For `g <= 2`, `U` runs over every unimodular matrix
/// with entries in `[-r, r]`; for larger `g` over the identity and the
/// elementary generators. Elements with the same `(gamma, delta)` up to sign
/// appear once.
#[derive(Debug, Clone)]
pub struct CheckSet {
    g: usize,
    radius: u32,
    elements: Vec<SymplecticMatrix>,
    blocks: Vec<(DMatrix<Complex64>, DMatrix<Complex64>)>,
}

fn unimodular_ball(g: usize, r: i64) -> Vec<DMatrix<i64>> {
    if g <= 2 {
        let base = (2 * r + 1) as usize;
        let total = base.pow((g * g) as u32);
        (0..total)
            .filter_map(|mut code| {
                let mut m = DMatrix::zeros(g, g);
                for i in 0..g {
                    for j in 0..g {
                        m[(i, j)] = (code % base) as i64 - r;
                        code /= base;
                    }
                }
                let d = det_i64(&m);
                (d == 1.into() || d == (-1).into()).then_some(m)
            })
            .collect()
    } else {
        let mut v = vec![DMatrix::identity(g, g)];
        v.extend(elementary_unimodular(g));
        v
    }
}

fn unimodular_inverse(u: &DMatrix<i64>) -> DMatrix<i64> {
    QMatrix::from_i64_matrix(u).inverse().expect("unimodular").to_i64().expect("integral inverse")
}

impl CheckSet {
    pub fn new(g: usize, radius: u32) -> Self {
        assert!(g >= 1 && radius >= 1);
        let r = radius as i64;
        let id = DMatrix::<i64>::identity(g, g);
        let units = unimodular_ball(g, r);
        let betas = symmetric_integer_matrices(g, r);
        let mut seen = HashSet::new();
        let mut elements = Vec::new();
        let mut blocks = Vec::new();
        for s in 1..=g {
            let e = DMatrix::<i64>::from_fn(g, g, |i, j| i64::from(i == j && i < s));
            let rest = &id - &e;
            for u in &units {
                let ut = u.transpose();
                let u_inv = unimodular_inverse(u);
                for beta in &betas {
                    let gamma = &e * &ut;
                    let ut_beta = &ut * beta;
                    let delta = &e * &ut_beta + &rest * &u_inv;
                    let mut key: Vec<i64> = gamma.iter().chain(delta.iter()).copied().collect();
                    if key.iter().find(|&&x| x != 0).is_some_and(|&x| x < 0) {
                        key.iter_mut().for_each(|x| *x = -*x);
                    }
                    if !seen.insert(key) {
                        continue;
                    }
                    let alpha = &rest * &ut;
                    let top = &rest * &ut_beta - &e * &u_inv;
                    let mut full = DMatrix::<i64>::zeros(2 * g, 2 * g);
                    full.view_mut((0, 0), (g, g)).copy_from(&alpha);
                    full.view_mut((0, g), (g, g)).copy_from(&top);
                    full.view_mut((g, 0), (g, g)).copy_from(&gamma);
                    full.view_mut((g, g), (g, g)).copy_from(&delta);
                    let sigma = SymplecticMatrix::from_i64_matrix(&full).expect("products of symplectic generators");
                    let to_c = |m: &DMatrix<i64>| m.map(|x| Complex64::new(x as f64, 0.0));
                    blocks.push((to_c(&gamma), to_c(&delta)));
                    elements.push(sigma);
                }
            }
        }
        CheckSet { g, radius, elements, blocks }
    }

    pub fn g(&self) -> usize {
        self.g
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[SymplecticMatrix] {
        &self.elements
    }

    /// Index and value of the smallest `|det(gamma tau + delta)|`.
    pub fn min_det(&self, tau: &SiegelPoint) -> (usize, f64) {
        let t = tau.to_complex();
        let mut best = (0, f64::INFINITY);
        for (i, (c, d)) in self.blocks.iter().enumerate() {
            let v = (c * &t + d).determinant().norm();
            if v < best.1 {
                best = (i, v);
            }
        }
        best
    }
}

fn integer_translation(g: usize, b: &DMatrix<i64>) -> SymplecticMatrix {
    SymplecticMatrix::translation(b).unwrap_or_else(|_| SymplecticMatrix::identity(g))
}

/// Reduces `tau` toward the Siegel fundamental set with the default check set
/// of radius `check_radius`.
pub fn siegel_reduce(tau: &SiegelPoint, check_radius: u32) -> Result<ReductionCertificate> {
    siegel_reduce_with(tau, &shared_check_set(tau.g(), check_radius), DEFAULT_MAX_ITERATIONS)
}

/// Process-wide cache of check sets keyed by `(g, radius)`.
fn shared_check_set(g: usize, radius: u32) -> Arc<CheckSet> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, u32), Arc<CheckSet>>>> = OnceLock::new();
    let radius = radius.max(1);
    let mut cache = CACHE.get_or_init(Default::default).lock().unwrap_or_else(|e| e.into_inner());
    cache.entry((g, radius)).or_insert_with(|| Arc::new(CheckSet::new(g, radius))).clone()
}

/// Reduction loop: Minkowski-reduce `Im tau`, translate `Re tau` into
/// `[-1/2, 1/2]`, and apply the check-set element with the smallest
/// `|det(gamma tau + delta)|` while that value is below one.
pub fn siegel_reduce_with(tau: &SiegelPoint, set: &CheckSet, max_iterations: usize) -> Result<ReductionCertificate> {
    let g = tau.g();
    if set.g() != g {
        return Err(Error::DimensionMismatch { expected: g, found: set.g() });
    }
    let mut cur = tau.clone();
    let mut sigma = SymplecticMatrix::identity(g);
    for iteration in 1..=max_iterations {
        let (_, u) = minkowski_reduce(cur.im())?;
        let uf = u.map(|x| Complex64::new(x as f64, 0.0));
        let t = uf.transpose() * cur.to_complex() * &uf;
        cur = SiegelPoint::new(SymMatC::from_complex(&t))?;
        let u_inv = unimodular_inverse(&u);
        sigma = SymplecticMatrix::gl_embedding(&u_inv)?.mul(&sigma);

        let shift = DMatrix::<i64>::from_fn(g, g, |i, j| cur.re().get(i, j).round() as i64);
        if shift.iter().any(|&x| x != 0) {
            let t = cur.to_complex() - shift.map(|x| Complex64::new(x as f64, 0.0));
            cur = SiegelPoint::new(SymMatC::from_complex(&t))?;
            sigma = integer_translation(g, &(-&shift)).mul(&sigma);
        }

        let (idx, det) = set.min_det(&cur);
        if det < 1.0 - 1e-10 {
            let step = &set.elements()[idx];
            cur = act(step, &cur)?.0;
            sigma = step.mul(&sigma);
            continue;
        }
        let (image, _) = act(&sigma, tau)?;
        let residual = (image.to_complex() - cur.to_complex()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        let status = if g == 1 { ReductionStatus::Exact } else { ReductionStatus::CheckedOnBall(set.radius()) };
        return Ok(ReductionCertificate { sigma, tau_reduced: cur, residual, status, iterations: iteration });
    }
    Err(Error::MaxIterationsExceeded(max_iterations))
}

/// Membership verdict for the fundamental set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum FundamentalVerdict {
    Yes,
    No,
    /// Conditions (i), (ii) hold and (iii) holds on the finite check set.
    YesOnBall,
}

impl FundamentalVerdict {
    pub fn is_member(self) -> bool {
        self != FundamentalVerdict::No
    }
}

pub fn in_fundamental_set(tau: &SiegelPoint, check_radius: u32) -> FundamentalVerdict {
    in_fundamental_set_with(tau, &shared_check_set(tau.g(), check_radius))
}

pub fn in_fundamental_set_with(tau: &SiegelPoint, set: &CheckSet) -> FundamentalVerdict {
    let g = tau.g();
    let im = tau.im();
    let scale = (0..g).map(|i| im.get(i, i)).fold(1.0, f64::max);
    let ineqs = inequality_set_for(g);
    if !is_minkowski_reduced(im, Some(&ineqs), 1e-12 * scale).unwrap_or(false) {
        return FundamentalVerdict::No;
    }
    if (0..g).any(|i| (0..g).any(|j| tau.re().get(i, j).abs() > 0.5 + 1e-12)) {
        return FundamentalVerdict::No;
    }
    if set.min_det(tau).1 < 1.0 - 1e-9 {
        return FundamentalVerdict::No;
    }
    debug_assert!(im.get(0, 0) >= 3f64.sqrt() / 2.0 - 1e-9, "imaginary part too small for a reduced point");
    if g == 1 {
        FundamentalVerdict::Yes
    } else {
        FundamentalVerdict::YesOnBall
    }
}

/// Index of the first representative `gamma_i` with `gamma_i^{-1} . tau` in
/// the fundamental set.
pub fn in_fundamental_set_union(tau: &SiegelPoint, reps: &[SymplecticMatrix], check_radius: u32) -> Result<Option<usize>> {
    let set = shared_check_set(tau.g(), check_radius);
    for (i, rep) in reps.iter().enumerate() {
        if !rep.is_integer() {
            return Err(Error::NonIntegerEntries);
        }
        let (pre, _) = act(&rep.inverse(), tau)?;
        if in_fundamental_set_with(&pre, &set).is_member() {
            return Ok(Some(i));
        }
    }
    Ok(None)
}

/// `max |det(U)|` helper for tests of unimodularity.
pub fn unimodular_det(u: &DMatrix<i64>) -> Option<i64> {
    det_i64(u).to_i64()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{random_positive_definite, random_siegel_point, random_unimodular};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sym(rows: &[Vec<f64>]) -> SymMatR {
        SymMatR::from_rows(rows).unwrap()
    }

    /// Shift into the strip and invert while `|tau| < 1`.
    fn classical_reduce(mut t: Complex64) -> Complex64 {
        for _ in 0..1000 {
            t.re -= t.re.round();
            if t.norm_sqr() < 1.0 - 1e-15 {
                t = -1.0 / t;
            } else {
                break;
            }
        }
        t
    }

    /// Lexicographic minimizer of `(diag, packed beta)` over unimodular `U`
    /// with entries in `[-3, 3]` whose image has a nonnegative off-diagonal.
    fn brute_force_minkowski(beta: &SymMatR) -> SymMatR {
        let mut best: Option<(Vec<f64>, SymMatR)> = None;
        for code in 0..7usize.pow(4) {
            let mut k = code;
            let u = DMatrix::from_fn(2, 2, |_, _| {
                let v = (k % 7) as i64 - 3;
                k /= 7;
                v
            });
            if (u[(0, 0)] * u[(1, 1)] - u[(0, 1)] * u[(1, 0)]).abs() != 1 {
                continue;
            }
            let b = beta.congruence(&u);
            if b.get(0, 1) < 0.0 {
                continue;
            }
            let key = vec![b.get(0, 0), b.get(1, 1), b.get(0, 0), b.get(0, 1), b.get(1, 1)];
            let better = match &best {
                None => true,
                Some((k0, _)) => {
                    let mut ord = std::cmp::Ordering::Equal;
                    for (a, b) in key.iter().zip(k0) {
                        if (a - b).abs() > 1e-12 * (1.0 + b.abs()) {
                            ord = a.partial_cmp(b).unwrap();
                            break;
                        }
                    }
                    ord == std::cmp::Ordering::Less
                }
            };
            if better {
                best = Some((key, b));
            }
        }
        best.unwrap().1
    }

    #[test]
    fn inequality_sets() {
        assert!(MinkowskiInequalitySet::builtin(1).unwrap().is_empty());
        assert_eq!(MinkowskiInequalitySet::builtin(4), Err(Error::UnsupportedDimension(4)));
        let set = MinkowskiInequalitySet::builtin(2).unwrap();
        assert!(set.entries().contains(&(0, vec![0, 1])));
        assert!(set.entries().contains(&(1, vec![1, 1])));
        assert!(!set.entries().contains(&(1, vec![2, 0])));
        for (k, a) in set.entries() {
            let gcd = a[*k..].iter().fold(0i64, |acc, &x| acc.gcd(&x));
            assert_eq!(gcd, 1);
        }
    }

    #[test]
    fn reduced_predicate_examples() {
        assert!(is_minkowski_reduced(&sym(&[vec![5.0]]), None, 0.0).unwrap());
        assert!(is_minkowski_reduced(&sym(&[vec![2.0, 1.0], vec![1.0, 2.0]]), None, 0.0).unwrap());
        // the same verdict against every primitive vector with entries up to 3
        let wide = MinkowskiInequalitySet::with_radius(2, 3);
        assert!(is_minkowski_reduced(&sym(&[vec![2.0, 1.0], vec![1.0, 2.0]]), Some(&wide), 0.0).unwrap());
        assert!(!is_minkowski_reduced(&sym(&[vec![2.0, 0.0], vec![0.0, 1.0]]), None, 0.0).unwrap());
        assert!(!is_minkowski_reduced(&sym(&[vec![1.0, -0.2], vec![-0.2, 1.0]]), None, 0.0).unwrap());
        assert_eq!(is_minkowski_reduced(&SymMatR::identity(4), None, 0.0), Err(Error::UnsupportedDimension(4)));
        let four = MinkowskiInequalitySet::with_radius(4, 1);
        assert!(is_minkowski_reduced(&SymMatR::identity(4), Some(&four), 0.0).unwrap());
    }

    #[test]
    fn minkowski_examples() {
        let (b, u) = minkowski_reduce(&sym(&[vec![5.0]])).unwrap();
        assert_eq!(b, sym(&[vec![5.0]]));
        assert_eq!(u, DMatrix::from_element(1, 1, 1));
        let (b, u) = minkowski_reduce(&sym(&[vec![2.0, 0.0], vec![0.0, 1.0]])).unwrap();
        assert_eq!(b, sym(&[vec![1.0, 0.0], vec![0.0, 2.0]]));
        assert_eq!(u.map(|x| x.abs()), DMatrix::from_row_slice(2, 2, &[0, 1, 1, 0]));
        assert_eq!(minkowski_reduce(&sym(&[vec![1.0, 0.0], vec![0.0, -1.0]])), Err(Error::NotPositiveDefinite));
    }

    #[test]
    fn minkowski_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let beta = random_positive_definite(2, 0.2, 1.0, &mut rng);
            let (ours, u) = minkowski_reduce(&beta).unwrap();
            let oracle = brute_force_minkowski(&beta);
            let err = (ours.matrix() - oracle.matrix()).amax();
            assert!(err < 1e-10 * (1.0 + oracle.matrix().amax()), "{beta:?}: {ours:?} vs {oracle:?}");
            assert_eq!(unimodular_det(&u).map(i64::abs), Some(1));
        }
    }

    #[test]
    fn minkowski_three_dimensional() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..40 {
            let beta = random_positive_definite(3, 0.05, 1.0, &mut rng).congruence(&random_unimodular(3, 5, &mut rng));
            let (b, u) = minkowski_reduce(&beta).unwrap();
            let wide = MinkowskiInequalitySet::with_radius(3, 3);
            assert!(is_minkowski_reduced(&b, Some(&wide), 1e-12).unwrap());
            assert!((beta.congruence(&u).matrix() - b.matrix()).amax() < 1e-10);
        }
    }

    #[test]
    fn check_set_shape() {
        let one = CheckSet::new(1, 1);
        assert!(one.elements().iter().all(|m| m.is_integer()));
        assert!(one.elements().iter().any(|m| !m.gamma().is_zero()));
        let two = CheckSet::new(2, 1);
        assert!(two.len() > 50);
        let i = SiegelPoint::scalar(c(0.0, 1.0)).unwrap();
        assert!((one.min_det(&i).1 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn siegel_reduce_examples() {
        let t = SiegelPoint::scalar(c(0.3, 2.0)).unwrap();
        let cert = siegel_reduce(&t, 1).unwrap();
        assert_eq!(cert.sigma, SymplecticMatrix::identity(1));
        assert_eq!(cert.status, ReductionStatus::Exact);
        assert!((cert.tau_reduced.get(0, 0) - c(0.3, 2.0)).norm() < 1e-15);

        let t = SiegelPoint::scalar(c(0.7, 0.8)).unwrap();
        let cert = siegel_reduce(&t, 1).unwrap();
        let expected = classical_reduce(c(0.7, 0.8));
        assert!((expected - c(0.4110, 1.0959)).norm() < 1e-4);
        assert!((cert.tau_reduced.get(0, 0) - expected).norm() < 1e-10);
        assert!(cert.residual < 1e-12);

        let re = sym(&[vec![0.6, 0.0], vec![0.0, 0.6]]);
        let im = sym(&[vec![2.0, 0.0], vec![0.0, 1.0]]);
        let t = SiegelPoint::new(SymMatC::new(re, im).unwrap()).unwrap();
        let cert = siegel_reduce(&t, 1).unwrap();
        assert_eq!(cert.status, ReductionStatus::CheckedOnBall(1));
        assert_eq!(in_fundamental_set(&cert.tau_reduced, 1), FundamentalVerdict::YesOnBall);
        assert!(cert.residual < 1e-9);
    }

    #[test]
    fn classical_agreement() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let set = CheckSet::new(1, 1);
        for _ in 0..100 {
            let t = c(rng.gen_range(-3.0..3.0), rng.gen_range(0.05..2.0));
            let cert = siegel_reduce_with(&SiegelPoint::scalar(t).unwrap(), &set, DEFAULT_MAX_ITERATIONS).unwrap();
            let oracle = classical_reduce(t);
            let ours = cert.tau_reduced.get(0, 0);
            // boundary points may land on either of two equivalent representatives
            let on_edge = (oracle.re.abs() - 0.5).abs() < 1e-9 || (oracle.norm() - 1.0).abs() < 1e-9;
            assert!(on_edge || (ours - oracle).norm() < 1e-10, "{t} -> {ours} vs {oracle}");
        }
    }

    #[test]
    fn fundamental_set_examples() {
        let p = |re, im| SiegelPoint::scalar(c(re, im)).unwrap();
        assert_eq!(in_fundamental_set(&p(0.0, 2.0), 1), FundamentalVerdict::Yes);
        assert_eq!(in_fundamental_set(&p(0.6, 0.8), 1), FundamentalVerdict::No);
        assert_eq!(in_fundamental_set(&p(0.4, 0.5), 1), FundamentalVerdict::No);

        let translate = SymplecticMatrix::from_i64_rows(&[vec![1, 1], vec![0, 1]]).unwrap();
        let reps = [SymplecticMatrix::identity(1), translate];
        assert_eq!(in_fundamental_set_union(&p(0.0, 2.0), &reps[..1], 1).unwrap(), Some(0));
        assert_eq!(in_fundamental_set_union(&p(1.0, 2.0), &reps, 1).unwrap(), Some(1));
        assert_eq!(in_fundamental_set_union(&p(0.7, 0.8), &reps[..1], 1).unwrap(), None);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn minkowski_output_properties(seed in any::<u64>(), g in 1usize..4) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let beta = random_positive_definite(g, 0.05, 1.0, &mut rng).congruence(&random_unimodular(g, 4, &mut rng));
            let (b, u) = minkowski_reduce(&beta).unwrap();
            prop_assert_eq!(unimodular_det(&u).map(i64::abs), Some(1));
            prop_assert!((b.determinant() - beta.determinant()).abs() < 1e-10 * beta.determinant());
            for i in 0..g {
                if i + 1 < g {
                    prop_assert!(b.get(i, i) <= b.get(i + 1, i + 1) + 1e-12);
                }
                for j in 0..g {
                    if i != j {
                        prop_assert!(b.get(i, j).abs() <= 0.5 * b.get(i, i) + 1e-12);
                    }
                }
            }
        }

        #[test]
        fn reduction_certificate(seed in any::<u64>(), g in 1usize..3) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let tau = random_siegel_point(g, 0.1, 2.0, &mut rng);
            let cert = siegel_reduce(&tau, 1).unwrap();
            prop_assert!(cert.residual < 1e-9);
            prop_assert!(in_fundamental_set(&cert.tau_reduced, 1).is_member());
            let again = siegel_reduce(&cert.tau_reduced, 1).unwrap();
            let moved = (again.tau_reduced.to_complex() - cert.tau_reduced.to_complex()).camax();
            prop_assert!(moved < 1e-10 || again.sigma.sup_norm() <= 2.0);
        }
    }
}
