//! Integral polyhedral cones, tube domains over them, and the specific cones
//! built from Minkowski reduction.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::rational::{primitive_integer, q, QMatrix};
use crate::reduction::MinkowskiInequalitySet;
use crate::sym_core::{sym_dim, SiegelPoint, SymMatR};
use crate::symplectic::PolarizationType;
use crate::{Complex64, Error, Result};

/// Largest ambient dimension accepted by generator extraction.
pub const MAX_CONE_DIM: usize = 8;

/// The cone `{x : A x >= 0}` with integer `A`.
#[derive(Debug)]
pub struct IntegralCone {
    n: usize,
    rows: Vec<Vec<i64>>,
    generators: OnceLock<Vec<Vec<i64>>>,
}

impl Clone for IntegralCone {
    fn clone(&self) -> Self {
        let generators = OnceLock::new();
        if let Some(g) = self.generators.get() {
            let _ = generators.set(g.clone());
        }
        IntegralCone { n: self.n, rows: self.rows.clone(), generators }
    }
}

impl PartialEq for IntegralCone {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.rows == other.rows
    }
}

impl IntegralCone {
    pub fn new(n: usize, rows: Vec<Vec<i64>>) -> Result<Self> {
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::DimensionMismatch { expected: n, found: bad.len() });
        }
        Ok(IntegralCone { n, rows, generators: OnceLock::new() })
    }

    /// The standard positive cone of `R^n`.
    pub fn spc(n: usize) -> Self {
        let rows = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
        IntegralCone { n, rows, generators: OnceLock::new() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[Vec<i64>] {
        &self.rows
    }

    pub fn generators(&self) -> Option<&[Vec<i64>]> {
        self.generators.get().map(Vec::as_slice)
    }
}

fn check_len(n: usize, len: usize) -> Result<()> {
    if n != len {
        return Err(Error::DimensionMismatch { expected: n, found: len });
    }
    Ok(())
}

fn dot_f(row: &[i64], x: &[f64]) -> f64 {
    row.iter().zip(x).map(|(a, b)| *a as f64 * b).sum()
}

/// `true` iff every row satisfies `r . x >= -tol`.
pub fn cone_contains(cone: &IntegralCone, x: &[f64], tol: f64) -> Result<bool> {
    check_len(cone.n, x.len())?;
    Ok(cone.rows.iter().all(|r| dot_f(r, x) >= -tol))
}

/// Exact membership for rational points.
pub fn cone_contains_exact(cone: &IntegralCone, x: &[BigRational]) -> Result<bool> {
    check_len(cone.n, x.len())?;
    Ok(cone.rows.iter().all(|r| {
        let s: BigRational = r.iter().zip(x).map(|(a, b)| q(*a) * b).sum();
        !s.is_negative()
    }))
}

fn dot_big(row: &[BigInt], v: &[BigInt]) -> BigInt {
    row.iter().zip(v).map(|(a, b)| a * b).sum()
}

fn primitive(v: Vec<BigInt>) -> Vec<BigInt> {
    let g = v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        v
    } else {
        v.into_iter().map(|x| x / &g).collect()
    }
}

fn to_i64_vec(v: &[BigInt]) -> Result<Vec<i64>> {
    v.iter().map(|x| x.to_i64().ok_or(Error::Overflow)).collect()
}

/// Extreme rays of the pointed cone `{x : A x >= 0}`, where `A` has full
/// column rank, by the double description method.
fn double_description(n: usize, a: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    // Greedy choice of n independent rows for the initial simplicial cone.
    let mut basis: Vec<usize> = Vec::new();
    for i in 0..a.len() {
        let mut trial = basis.clone();
        trial.push(i);
        let m = QMatrix::from_fn(trial.len(), n, |r, c| BigRational::from_integer(a[trial[r]][c].clone()));
        if m.rank() == trial.len() {
            basis = trial;
        }
        if basis.len() == n {
            break;
        }
    }
    debug_assert_eq!(basis.len(), n);
    let b = QMatrix::from_fn(n, n, |r, c| BigRational::from_integer(a[basis[r]][c].clone()));
    let inv = b.inverse().expect("independent rows");
    let mut rays: Vec<Vec<BigInt>> = (0..n)
        .map(|j| primitive_integer(&(0..n).map(|i| inv[(i, j)].clone()).collect::<Vec<_>>()))
        .collect();
    let mut processed: Vec<usize> = basis.clone();

    for i in (0..a.len()).filter(|i| !basis.contains(i)) {
        let row = &a[i];
        let vals: Vec<BigInt> = rays.iter().map(|r| dot_big(row, r)).collect();
        if vals.iter().all(|v| !v.is_negative()) {
            processed.push(i);
            continue;
        }
        let zero_sets: Vec<Vec<bool>> = rays
            .iter()
            .map(|r| processed.iter().map(|&p| dot_big(&a[p], r).is_zero()).collect())
            .collect();
        let mut next: Vec<Vec<BigInt>> = Vec::new();
        for (r, v) in rays.iter().zip(&vals) {
            if !v.is_negative() {
                next.push(r.clone());
            }
        }
        for (pi, pv) in vals.iter().enumerate().filter(|(_, v)| v.is_positive()) {
            for (ni, nv) in vals.iter().enumerate().filter(|(_, v)| v.is_negative()) {
                let common: Vec<bool> = zero_sets[pi].iter().zip(&zero_sets[ni]).map(|(x, y)| *x && *y).collect();
                if common.iter().filter(|&&c| c).count() + 2 < n {
                    continue;
                }
                let adjacent = (0..rays.len()).filter(|&k| k != pi && k != ni).all(|k| {
                    !common.iter().zip(&zero_sets[k]).all(|(c, z)| !*c || *z)
                });
                if !adjacent {
                    continue;
                }
                let combo: Vec<BigInt> =
                    rays[ni].iter().zip(&rays[pi]).map(|(x, y)| pv * x - nv * y).collect();
                next.push(primitive(combo));
            }
        }
        rays = next;
        processed.push(i);
    }
    rays
}

/// Generators of `{x : A x >= 0}`: a pair `+-l` for each basis vector of the
/// lineality space followed by the extreme rays of the pointed part.
fn compute_generators(n: usize, rows: &[Vec<i64>]) -> Result<Vec<Vec<i64>>> {
    let a = QMatrix::from_fn(rows.len(), n, |i, j| q(rows[i][j]));
    let lineality: Vec<Vec<BigInt>> = a.null_space().iter().map(|v| primitive_integer(v)).collect();
    let mut big_rows: Vec<Vec<BigInt>> = rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
    for l in &lineality {
        big_rows.push(l.clone());
        big_rows.push(l.iter().map(|x| -x).collect());
    }
    let mut out: Vec<Vec<i64>> = Vec::new();
    for l in &lineality {
        out.push(to_i64_vec(l)?);
        out.push(to_i64_vec(&l.iter().map(|x| -x).collect::<Vec<_>>())?);
    }
    if lineality.len() < n {
        let mut rays: Vec<Vec<i64>> =
            double_description(n, &big_rows).iter().map(|r| to_i64_vec(r)).collect::<Result<_>>()?;
        rays.sort();
        rays.dedup();
        out.extend(rays);
    }
    Ok(out)
}

/// Integer generators of the cone, computed once and cached.
pub fn cone_generators(cone: &IntegralCone) -> Result<Vec<Vec<i64>>> {
    if cone.n > MAX_CONE_DIM {
        return Err(Error::DimensionTooLarge(cone.n));
    }
    if let Some(g) = cone.generators.get() {
        return Ok(g.clone());
    }
    let gens = compute_generators(cone.n, &cone.rows)?;
    Ok(cone.generators.get_or_init(|| gens).clone())
}

/// H-representation of the cone generated by `generators`, obtained from the
/// generators of the dual cone.
pub fn h_representation(n: usize, generators: &[Vec<i64>]) -> Result<IntegralCone> {
    if n > MAX_CONE_DIM {
        return Err(Error::DimensionTooLarge(n));
    }
    let dual = IntegralCone::new(n, generators.to_vec())?;
    IntegralCone::new(n, cone_generators(&dual)?)
}

/// Irredundant inequalities of the cone as primitive integer rows, sorted.
pub fn facets(cone: &IntegralCone) -> Result<Vec<Vec<i64>>> {
    let gens = cone_generators(cone)?;
    let mut rows = h_representation(cone.n, &gens)?.rows;
    rows.sort();
    Ok(rows)
}

/// Relative interior test: rows vanishing on every generator must vanish at
/// `x`, all other rows must exceed `tol`.
pub fn relative_interior_contains(cone: &IntegralCone, x: &[f64], tol: f64) -> Result<bool> {
    check_len(cone.n, x.len())?;
    let gens = cone_generators(cone)?;
    let scale = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    for row in &cone.rows {
        let implicit = gens.iter().all(|g| row.iter().zip(g).map(|(a, b)| a * b).sum::<i64>() == 0);
        let v = dot_f(row, x);
        if implicit {
            let width = row.iter().map(|a| a.abs() as f64).sum::<f64>();
            if v.abs() > tol.max(1e-12 * scale * width) {
                return Ok(false);
            }
        } else if v <= tol {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Rows of the closed Minkowski cone in packed coordinates.
fn mib_rows(g: usize) -> Result<Vec<Vec<i64>>> {
    let set = MinkowskiInequalitySet::builtin(g)?;
    let n = sym_dim(g);
    let idx = |i: usize, j: usize| offset(g, i, j);
    let mut rows: Vec<Vec<i64>> = Vec::new();
    let mut unit = vec![0i64; n];
    unit[idx(0, 0)] = 1;
    rows.push(unit);
    for k in 0..g.saturating_sub(1) {
        let mut r = vec![0i64; n];
        r[idx(k, k + 1)] = 1;
        rows.push(r);
    }
    for (k, a) in set.entries() {
        let mut r = vec![0i64; n];
        for i in 0..g {
            r[idx(i, i)] += a[i] * a[i];
            for j in i + 1..g {
                r[idx(i, j)] += 2 * a[i] * a[j];
            }
        }
        r[idx(*k, *k)] -= 1;
        if !rows.contains(&r) {
            rows.push(r);
        }
    }
    Ok(rows)
}

/// Offset of `beta_{i,j}` in the upper-triangle row-major packing.
pub fn offset(g: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * (2 * g - i + 1) / 2 + (j - i)
}

/// The closed Minkowski cone in `R^n`, `n = g(g+1)/2`.
pub fn build_mib(g: usize) -> Result<IntegralCone> {
    if g == 0 || g > 3 {
        return Err(Error::UnsupportedDimension(g));
    }
    IntegralCone::new(sym_dim(g), mib_rows(g)?)
}

/// The cone `C_m` in `R^g x R^n`: `beta` in the closed Minkowski cone and
/// `|y_i| <= m beta_{i,i}`.
pub fn build_cm(g: usize, m: Ratio<i64>) -> Result<IntegralCone> {
    if g == 0 || g > 3 {
        return Err(Error::UnsupportedDimension(g));
    }
    if *m.numer() <= 0 || *m.denom() <= 0 {
        return Err(Error::InvalidParameter("m must be a positive rational".into()));
    }
    let n = sym_dim(g);
    let mut rows: Vec<Vec<i64>> = mib_rows(g)?
        .into_iter()
        .map(|r| {
            let mut full = vec![0i64; g];
            full.extend(r);
            full
        })
        .collect();
    let (p, qd) = (*m.numer(), *m.denom());
    for i in 0..g {
        for sign in [-1i64, 1] {
            let mut r = vec![0i64; g + n];
            r[g + offset(g, i, i)] = p;
            r[i] = sign * qd;
            rows.push(r);
        }
    }
    IntegralCone::new(g + n, rows)
}

/// The functional `(y, beta) -> beta_{1,1}`.
pub fn ell11(_y: &[f64], beta: &SymMatR) -> f64 {
    beta.get(0, 0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TubeMode {
    /// `ell > d`
    Strict,
    /// `ell >= d`
    Weak,
}

/// Tube domain over `C + v`, cut by `ell (>|>=) d`, optionally truncated by
/// `|Re z_i| <= R`.
#[derive(Debug, Clone)]
pub struct TubeSpec {
    pub cone: IntegralCone,
    pub v_shift: Vec<f64>,
    pub ell: Vec<i64>,
    pub bound: f64,
    pub mode: TubeMode,
    pub r: Option<f64>,
}

impl TubeSpec {
    pub fn new(cone: IntegralCone, v_shift: Vec<f64>, ell: Vec<i64>, bound: f64, mode: TubeMode, r: Option<f64>) -> Result<Self> {
        check_len(cone.n(), v_shift.len())?;
        check_len(cone.n(), ell.len())?;
        if let Some(r) = r {
            if !(r > 0.0) {
                return Err(Error::InvalidParameter("truncation bound must be positive".into()));
            }
        }
        Ok(TubeSpec { cone, v_shift, ell, bound, mode, r })
    }
}

pub fn tube_contains(spec: &TubeSpec, z: &[Complex64], tol: f64) -> Result<bool> {
    check_len(spec.cone.n(), z.len())?;
    let im: Vec<f64> = z.iter().map(|w| w.im).collect();
    let shifted: Vec<f64> = im.iter().zip(&spec.v_shift).map(|(a, b)| a + b).collect();
    if !cone_contains(&spec.cone, &shifted, tol)? {
        return Ok(false);
    }
    let l = dot_f(&spec.ell, &im);
    let ok = match spec.mode {
        TubeMode::Strict => l > spec.bound + tol,
        TubeMode::Weak => l >= spec.bound - tol,
    };
    if !ok {
        return Ok(false);
    }
    Ok(spec.r.is_none_or(|r| z.iter().all(|w| w.re.abs() <= r + tol)))
}

/// Constants `(m, d, R)` of the inclusion of bounded-coordinate torus points
/// over the fundamental set into a truncated tube.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Theta0Constants {
    pub m: f64,
    pub d: f64,
    #[serde(rename = "R")]
    pub r: f64,
}

pub fn theta0_constants(g: usize, d: &PolarizationType, k: f64) -> Theta0Constants {
    let m = 0.5 * g as f64 * k;
    Theta0Constants { m, d: 3f64.sqrt() / 2.0, r: m + d.dg() as f64 * k }
}

/// Coordinates `(r, r')` with `z = tau r + D r'`.
pub fn lattice_coordinates(z: &[Complex64], tau: &SiegelPoint, d: &PolarizationType) -> Result<(Vec<f64>, Vec<f64>)> {
    let g = tau.g();
    check_len(g, z.len())?;
    check_len(g, d.g())?;
    let im: Vec<f64> = z.iter().map(|w| w.im).collect();
    let r = tau.solve_im(&im);
    let dv = d.as_f64();
    let r_prime = (0..g)
        .map(|i| (z[i].re - (0..g).map(|j| tau.re().get(i, j) * r[j]).sum::<f64>()) / dv[i])
        .collect();
    Ok((r, r_prime))
}

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Membership in the set of `(z, tau)` with `tau` accepted by `v_pred` and
/// `z = tau r + D r'`, `|r|_inf, |r'|_inf < K`.
pub fn xdk_member(
    z: &[Complex64],
    tau: &SiegelPoint,
    d: &PolarizationType,
    k: f64,
    v_pred: impl Fn(&SiegelPoint) -> bool,
) -> Result<bool> {
    let (r, rp) = lattice_coordinates(z, tau, d)?;
    Ok(v_pred(tau) && sup(&r) < k && sup(&rp) < k)
}

/// Membership in the set of `(z, tau)` with `tau` accepted by `v_pred` and `z`
/// in the closed fundamental parallelogram of `tau Z^g + D Z^g`.
pub fn xd_member(
    z: &[Complex64],
    tau: &SiegelPoint,
    d: &PolarizationType,
    v_pred: impl Fn(&SiegelPoint) -> bool,
    tol: f64,
) -> Result<bool> {
    let (t, s) = lattice_coordinates(z, tau, d)?;
    let inside = |v: &[f64]| v.iter().all(|x| *x >= -tol && *x <= 1.0 + tol);
    Ok(v_pred(tau) && inside(&t) && inside(&s))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConeJson {
    pub n: usize,
    #[serde(rename = "A")]
    pub a: Vec<Vec<i64>>,
}

impl ConeJson {
    pub fn to_cone(&self) -> Result<IntegralCone> {
        IntegralCone::new(self.n, self.a.clone())
    }
}

impl From<&IntegralCone> for ConeJson {
    fn from(c: &IntegralCone) -> Self {
        ConeJson { n: c.n(), a: c.rows().to_vec() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RaysJson {
    pub rays: Vec<Vec<i64>>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sym_core::{sym_to_vec, SymMatC};
    use num_bigint::BigInt;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeSet;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn half_plane() -> IntegralCone {
        IntegralCone::new(2, vec![vec![1, 0], vec![1, 1]]).unwrap()
    }

    fn as_set(v: Vec<Vec<i64>>) -> BTreeSet<Vec<i64>> {
        v.into_iter().collect()
    }

    fn sym(rows: &[Vec<f64>]) -> SymMatR {
        SymMatR::from_rows(rows).unwrap()
    }

    #[test]
    fn containment_examples() {
        let s = IntegralCone::spc(2);
        assert!(cone_contains(&s, &[1.0, 1.0], 0.0).unwrap());
        assert!(!cone_contains(&s, &[-1.0, 0.0], 0.0).unwrap());
        assert!(cone_contains(&half_plane(), &[1.0, -1.0], 0.0).unwrap());
        assert!(matches!(cone_contains(&s, &[1.0], 0.0), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn generator_examples() {
        assert_eq!(as_set(cone_generators(&IntegralCone::spc(2)).unwrap()), as_set(vec![vec![1, 0], vec![0, 1]]));
        assert_eq!(as_set(cone_generators(&half_plane()).unwrap()), as_set(vec![vec![0, 1], vec![1, -1]]));
        assert_eq!(cone_generators(&build_mib(1).unwrap()).unwrap(), vec![vec![1]]);
        let too_big = IntegralCone::spc(9);
        assert!(matches!(cone_generators(&too_big), Err(Error::DimensionTooLarge(9))));
    }

    #[test]
    fn generators_with_lineality() {
        // {x_1 >= 0} in R^2 is a half plane containing the line x_1 = 0.
        let cone = IntegralCone::new(2, vec![vec![1, 0]]).unwrap();
        let gens = cone_generators(&cone).unwrap();
        assert!(gens.contains(&vec![1, 0]) && gens.contains(&vec![0, 1]) && gens.contains(&vec![0, -1]));
        assert_eq!(facets(&cone).unwrap(), vec![vec![1, 0]]);
    }

    #[test]
    fn relative_interior_examples() {
        let s = IntegralCone::spc(2);
        assert!(relative_interior_contains(&s, &[1.0, 1.0], 0.0).unwrap());
        assert!(!relative_interior_contains(&s, &[1.0, 0.0], 0.0).unwrap());
        assert!(relative_interior_contains(&half_plane(), &[1.0, 0.0], 0.0).unwrap());
        // A ray in R^2: its relative interior is the open ray.
        let ray = IntegralCone::new(2, vec![vec![1, 0], vec![0, 1], vec![0, -1]]).unwrap();
        assert!(relative_interior_contains(&ray, &[2.0, 0.0], 0.0).unwrap());
        assert!(!relative_interior_contains(&ray, &[2.0, 0.1], 0.0).unwrap());
    }

    #[test]
    fn mib_examples() {
        let m1 = build_mib(1).unwrap();
        assert_eq!(m1.rows(), &[vec![1]]);
        let m2 = build_mib(2).unwrap();
        assert!(cone_contains(&m2, &sym_to_vec(&SymMatR::identity(2)), 0.0).unwrap());
        assert!(!cone_contains(&m2, &sym_to_vec(&sym(&[vec![1.0, -1.0], vec![-1.0, 1.0]])), 0.0).unwrap());
        assert!(matches!(build_mib(4), Err(Error::UnsupportedDimension(4))));
        assert_eq!(offset(3, 0, 0), 0);
        assert_eq!(offset(3, 1, 2), 4);
        assert_eq!(offset(3, 2, 1), 4);
        assert_eq!(offset(3, 2, 2), 5);
    }

    #[test]
    fn mib_matches_reduction_predicate() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m3 = build_mib(3).unwrap();
        for _ in 0..200 {
            let b = crate::sampling::random_positive_definite(3, 0.1, 2.0, &mut rng);
            let (red, _) = crate::reduction::minkowski_reduce(&b).unwrap();
            assert!(cone_contains(&m3, &sym_to_vec(&red), 1e-9).unwrap());
            let reduced = crate::reduction::is_minkowski_reduced(&b, None, 0.0).unwrap();
            if !reduced {
                assert!(!cone_contains(&m3, &sym_to_vec(&b), -1e-12).unwrap() || b.get(0, 0) <= 0.0);
            }
        }
    }

    #[test]
    fn cm_examples() {
        let c1 = build_cm(1, Ratio::from_integer(1)).unwrap();
        assert!(cone_contains(&c1, &[0.5, 1.0], 0.0).unwrap());
        assert!(!cone_contains(&c1, &[2.0, 1.0], 0.0).unwrap());
        let c2 = build_cm(2, Ratio::from_integer(1)).unwrap();
        let mut x = vec![0.3, 0.3];
        x.extend(sym_to_vec(&SymMatR::identity(2)));
        assert!(cone_contains(&c2, &x, 0.0).unwrap());
        let half = build_cm(1, Ratio::new(1, 2)).unwrap();
        assert!(cone_contains(&half, &[0.5, 1.0], 0.0).unwrap());
        assert!(!cone_contains(&half, &[0.6, 1.0], 0.0).unwrap());
    }

    #[test]
    fn ell11_examples() {
        assert_eq!(ell11(&[5.0], &sym(&[vec![3.0]])), 3.0);
        assert_eq!(ell11(&[0.0, 1.0], &SymMatR::identity(2)), 1.0);
        let a = sym(&[vec![2.0, 0.5], vec![0.5, 1.0]]);
        let b = sym(&[vec![0.25, 0.0], vec![0.0, 3.0]]);
        let sum = SymMatR::new(a.matrix() + b.matrix()).unwrap();
        assert_eq!(ell11(&[], &sum), ell11(&[], &a) + ell11(&[], &b));
    }

    #[test]
    fn tube_examples() {
        let spec = TubeSpec::new(IntegralCone::spc(1), vec![0.0], vec![1], 1.0, TubeMode::Strict, None).unwrap();
        assert!(tube_contains(&spec, &[c(0.0, 2.0)], 1e-12).unwrap());
        assert!(!tube_contains(&spec, &[c(0.0, 0.5)], 1e-12).unwrap());
        let cut = TubeSpec { r: Some(1.0), ..spec.clone() };
        assert!(!tube_contains(&cut, &[c(2.0, 2.0)], 1e-12).unwrap());
        assert!(tube_contains(&cut, &[c(0.5, 2.0)], 1e-12).unwrap());

        assert!(!tube_contains(&spec, &[c(0.0, 1.0)], 1e-12).unwrap());
        let weak = TubeSpec { mode: TubeMode::Weak, ..spec.clone() };
        assert!(tube_contains(&weak, &[c(0.0, 1.0)], 1e-12).unwrap());

        let shifted = TubeSpec::new(IntegralCone::spc(1), vec![-3.0], vec![1], 1.0, TubeMode::Strict, None).unwrap();
        assert!(!tube_contains(&shifted, &[c(0.0, 2.0)], 1e-12).unwrap());
        assert!(TubeSpec::new(IntegralCone::spc(1), vec![0.0], vec![1], 1.0, TubeMode::Strict, Some(0.0)).is_err());
    }

    #[test]
    fn theta0_constant_examples() {
        let r3 = 3f64.sqrt() / 2.0;
        let k = theta0_constants(1, &PolarizationType::new(vec![3]).unwrap(), 2.0);
        assert_eq!((k.m, k.d, k.r), (1.0, r3, 7.0));
        let k = theta0_constants(2, &PolarizationType::principal(2), 1.0);
        assert_eq!((k.m, k.d, k.r), (1.0, r3, 2.0));
        let k = theta0_constants(1, &PolarizationType::principal(1), 1e-12);
        assert!(k.m < 1e-11 && k.r < 1e-11 && k.d == r3);
    }

    #[test]
    fn xdk_examples() {
        let any = |_: &SiegelPoint| true;
        let d1 = PolarizationType::principal(1);
        let two_i = SiegelPoint::scalar(c(0.0, 2.0)).unwrap();
        assert!(xdk_member(&[c(0.0, 0.0)], &two_i, &d1, 1e-3, any).unwrap());
        assert!(!xdk_member(&[c(3.0, 0.0)], &two_i, &d1, 2.0, any).unwrap());
        assert!(xdk_member(&[c(3.0, 0.0)], &two_i, &d1, 4.0, any).unwrap());
        assert!(!xdk_member(&[c(0.0, 0.0)], &two_i, &d1, 4.0, |_| false).unwrap());
    }

    #[test]
    fn xd_examples() {
        let any = |_: &SiegelPoint| true;
        let d1 = PolarizationType::principal(1);
        let i = SiegelPoint::scalar(c(0.0, 1.0)).unwrap();
        assert!(xd_member(&[c(0.0, 0.0)], &i, &d1, any, 1e-12).unwrap());
        assert!(xd_member(&[c(0.5, 0.5)], &i, &d1, any, 1e-12).unwrap());
        assert!(!xd_member(&[c(2.0, 0.0)], &i, &d1, any, 1e-12).unwrap());
    }

    #[test]
    fn xd_inside_xdk() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let d = PolarizationType::new(vec![1, 2]).unwrap();
        let any = |_: &SiegelPoint| true;
        for _ in 0..500 {
            let tau = crate::sampling::random_siegel_point(2, 0.5, 1.0, &mut rng);
            let t: Vec<f64> = (0..2).map(|_| rng.gen_range(0.0..1.0)).collect();
            let s: Vec<f64> = (0..2).map(|_| rng.gen_range(0.0..1.0)).collect();
            let z: Vec<Complex64> = (0..2)
                .map(|i| (0..2).map(|j| tau.get(i, j) * t[j]).sum::<Complex64>() + d.as_f64()[i] * s[i])
                .collect();
            assert!(xd_member(&z, &tau, &d, any, 1e-9).unwrap());
            assert!(xdk_member(&z, &tau, &d, 1.0 + 1e-9, any).unwrap());
        }
    }

    #[test]
    fn json_round_trip() {
        let j = ConeJson::from(&half_plane());
        let text = serde_json::to_string(&j).unwrap();
        assert_eq!(text, r#"{"n":2,"A":[[1,0],[1,1]]}"#);
        let back: ConeJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_cone().unwrap(), half_plane());
    }

    fn round_trip(cone: &IntegralCone, rng: &mut ChaCha8Rng) {
        let gens = cone_generators(cone).unwrap();
        for v in &gens {
            assert!(cone.rows().iter().all(|r| r.iter().zip(v).map(|(a, b)| a * b).sum::<i64>() >= 0));
        }
        let back = h_representation(cone.n(), &gens).unwrap();
        assert_eq!(facets(cone).unwrap(), facets(&back).unwrap());
        for _ in 0..1000 {
            let x: Vec<BigRational> =
                (0..cone.n()).map(|_| BigRational::new(BigInt::from(rng.gen_range(-20..=20)), BigInt::from(rng.gen_range(1..=6)))).collect();
            assert_eq!(cone_contains_exact(cone, &x).unwrap(), cone_contains_exact(&back, &x).unwrap());
        }
    }

    #[test]
    fn round_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for n in 1..=4 {
            round_trip(&IntegralCone::spc(n), &mut rng);
        }
        round_trip(&build_mib(2).unwrap(), &mut rng);
        round_trip(&build_cm(2, Ratio::from_integer(1)).unwrap(), &mut rng);
        round_trip(&half_plane(), &mut rng);
    }

    #[test]
    fn mib3_generators_are_members() {
        let m3 = build_mib(3).unwrap();
        let gens = cone_generators(&m3).unwrap();
        assert!(!gens.is_empty());
        for v in &gens {
            let x: Vec<f64> = v.iter().map(|&a| a as f64).collect();
            assert!(cone_contains(&m3, &x, 0.0).unwrap());
        }
    }

    #[test]
    fn linear_image_of_tube() {
        // Complexified generator map sends the tube over the orthant into the
        // tube over the Minkowski cone.
        let m2 = build_mib(2).unwrap();
        let gens = cone_generators(&m2).unwrap();
        let orthant = TubeSpec::new(IntegralCone::spc(gens.len()), vec![0.0; gens.len()], vec![0; gens.len()], 0.0, TubeMode::Weak, None).unwrap();
        let target = TubeSpec::new(m2, vec![0.0; 3], vec![0; 3], 0.0, TubeMode::Weak, None).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..300 {
            let w: Vec<Complex64> = (0..gens.len()).map(|_| c(rng.gen_range(-5.0..5.0), rng.gen_range(0.0..3.0))).collect();
            assert!(tube_contains(&orthant, &w, 1e-12).unwrap());
            let image: Vec<Complex64> = (0..3).map(|i| gens.iter().zip(&w).map(|(g, x)| x * g[i] as f64).sum()).collect();
            assert!(tube_contains(&target, &image, 1e-9).unwrap());
        }
    }

    #[test]
    fn siegel_packing_agrees() {
        let t = SymMatC::new(SymMatR::zeros(2), sym(&[vec![2.0, 0.5], vec![0.5, 1.0]])).unwrap();
        let v = sym_to_vec(&t.im);
        assert_eq!(v[offset(2, 0, 1)], 0.5);
        assert_eq!(v[offset(2, 1, 1)], 1.0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn cm_monotone_in_m(seed in any::<u64>(), a in 1i64..6, b in 1i64..6, den in 1i64..4) {
            let (lo, hi) = (a.min(b), a.max(b));
            let small = build_cm(2, Ratio::new(lo, den)).unwrap();
            let large = build_cm(2, Ratio::new(hi, den)).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..50 {
                let x: Vec<f64> = (0..5).map(|_| rng.gen_range(-3.0..3.0)).collect();
                if cone_contains(&small, &x, 0.0).unwrap() {
                    prop_assert!(cone_contains(&large, &x, 0.0).unwrap());
                }
            }
        }

        #[test]
        fn generated_points_are_members(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let cone = build_cm(2, Ratio::new(3, 2)).unwrap();
            let gens = cone_generators(&cone).unwrap();
            prop_assert!(cone_contains(&cone, &[0.0; 5], 0.0).unwrap());
            let lam: Vec<f64> = gens.iter().map(|_| rng.gen_range(0.0..2.0)).collect();
            let y: Vec<f64> = (0..5).map(|i| gens.iter().zip(&lam).map(|(g, l)| g[i] as f64 * l).sum()).collect();
            prop_assert!(cone_contains(&cone, &y, 1e-9).unwrap());
            let pos: Vec<f64> = gens.iter().map(|_| rng.gen_range(0.1..2.0)).collect();
            let z: Vec<f64> = (0..5).map(|i| gens.iter().zip(&pos).map(|(g, l)| g[i] as f64 * l).sum()).collect();
            prop_assert!(relative_interior_contains(&cone, &z, 0.0).unwrap());
        }
    }
}
