//! Seeded random generators for points of `H_g` and elements of arithmetic
//! subgroups of `Sp(2g, Z)`, used by the probes and the test suites.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use crate::sym_core::{SiegelPoint, SymMatC, SymMatR};
use crate::symplectic::{elementary_unimodular, standard_generators, symmetric_integer_matrices, PolarizationType, SymplecticMatrix};

/// Symmetric matrix with entries uniform in `[-bound, bound]`.
pub fn random_symmetric<R: Rng>(g: usize, bound: f64, rng: &mut R) -> SymMatR {
    let m = DMatrix::from_fn(g, g, |_, _| rng.gen_range(-bound..=bound));
    SymMatR::symmetrize(&m)
}

/// `A A^T + min_eig I` with `A` uniform in `[-spread, spread]`.
pub fn random_positive_definite<R: Rng>(g: usize, min_eig: f64, spread: f64, rng: &mut R) -> SymMatR {
    let a = DMatrix::from_fn(g, g, |_, _| rng.gen_range(-spread..=spread));
    SymMatR::symmetrize(&(&a * a.transpose() + DMatrix::identity(g, g) * min_eig))
}

/// Point of `H_g` with `|Re tau_ij| <= re_bound` and `Im tau >= min_eig I`.
pub fn random_siegel_point<R: Rng>(g: usize, min_eig: f64, re_bound: f64, rng: &mut R) -> SiegelPoint {
    let re = random_symmetric(g, re_bound, rng);
    let im = random_positive_definite(g, min_eig, 1.0, rng);
    SiegelPoint::new(SymMatC::new(re, im).expect("square blocks")).expect("positive definite imaginary part")
}

pub fn random_complex_vector<R: Rng>(g: usize, bound: f64, rng: &mut R) -> Vec<Complex64> {
    (0..g).map(|_| Complex64::new(rng.gen_range(-bound..=bound), rng.gen_range(-bound..=bound))).collect()
}

fn word<R: Rng>(g: usize, gens: &[SymplecticMatrix], len: usize, rng: &mut R) -> SymplecticMatrix {
    (0..len).fold(SymplecticMatrix::identity(g), |acc, _| acc.mul(&gens[rng.gen_range(0..gens.len())]))
}

/// Product of `len` random standard generators of `Sp(2g, Z)`.
pub fn random_integral_symplectic<R: Rng>(g: usize, len: usize, rng: &mut R) -> SymplecticMatrix {
    word(g, &standard_generators(g), len, rng)
}

fn lower(c: &DMatrix<i64>) -> SymplecticMatrix {
    SymplecticMatrix::translation(c).expect("symmetric").transpose()
}

/// Product of `len` generators of the principal congruence subgroup of level `k`.
pub fn random_congruence_element<R: Rng>(g: usize, k: i64, len: usize, rng: &mut R) -> SymplecticMatrix {
    let mut gens = Vec::new();
    for b in symmetric_integer_matrices(g, 1) {
        if b.iter().all(|&x| x == 0) {
            continue;
        }
        let kb = b * k;
        gens.push(SymplecticMatrix::translation(&kb).expect("symmetric"));
        gens.push(lower(&kb));
    }
    for i in 0..g {
        for j in 0..g {
            if i != j {
                let mut u = DMatrix::<i64>::identity(g, g);
                u[(i, j)] = k;
                gens.push(SymplecticMatrix::gl_embedding(&u).expect("unimodular"));
            }
        }
    }
    word(g, &gens, len, rng)
}

/// Generators of `G_D(D)_0`: lower translations by `2C`, upper translations
/// by `D b D` with `b` of even diagonal, and `GL(g, Z)` embeddings of
/// `I + d_g E_ij`.
pub fn gd0_generators(d: &PolarizationType) -> Vec<SymplecticMatrix> {
    let g = d.g();
    let dm = DMatrix::from_fn(g, g, |i, j| if i == j { d.entries()[i] as i64 } else { 0 });
    let mut gens = Vec::new();
    for c in symmetric_integer_matrices(g, 1) {
        if c.iter().all(|&x| x == 0) {
            continue;
        }
        gens.push(lower(&(&c * 2)));
        let mut b = c.clone();
        for i in 0..g {
            b[(i, i)] *= 2;
        }
        gens.push(SymplecticMatrix::translation(&(&dm * b * &dm)).expect("symmetric"));
    }
    for i in 0..g {
        for j in 0..g {
            if i != j {
                let mut u = DMatrix::<i64>::identity(g, g);
                u[(i, j)] = d.dg() as i64;
                gens.push(SymplecticMatrix::gl_embedding(&u).expect("unimodular"));
            }
        }
    }
    gens
}

pub fn random_gd0_element<R: Rng>(d: &PolarizationType, len: usize, rng: &mut R) -> SymplecticMatrix {
    word(d.g(), &gd0_generators(d), len, rng)
}

/// Random unimodular matrix as a product of elementary moves.
pub fn random_unimodular<R: Rng>(g: usize, len: usize, rng: &mut R) -> DMatrix<i64> {
    let moves = elementary_unimodular(g);
    (0..len).fold(DMatrix::identity(g, g), |acc, _| acc * &moves[rng.gen_range(0..moves.len())])
}
