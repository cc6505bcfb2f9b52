//! Dense reference constructions shared by the integration tests. Everything
//! here is built from explicit 2×2 matrices and Kronecker products so it does
//! not share code paths with the bit-twiddling kernels under test.
#![allow(dead_code)]

use entfreeze::{Axis, CMatrix, DensityMatrix};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn single(axis: Option<Axis>) -> CMatrix {
    let m = match axis {
        None => [[c(1., 0.), c(0., 0.)], [c(0., 0.), c(1., 0.)]],
        Some(Axis::X) => [[c(0., 0.), c(1., 0.)], [c(1., 0.), c(0., 0.)]],
        Some(Axis::Y) => [[c(0., 0.), c(0., -1.)], [c(0., 1.), c(0., 0.)]],
        Some(Axis::Z) => [[c(1., 0.), c(0., 0.)], [c(0., 0.), c(-1., 0.)]],
        Some(Axis::Plus) => [[c(0., 0.), c(1., 0.)], [c(0., 0.), c(0., 0.)]],
        Some(Axis::Minus) => [[c(0., 0.), c(0., 0.)], [c(1., 0.), c(0., 0.)]],
    };
    CMatrix::from_fn(2, 2, |r, col| m[r][col])
}

/// `coef · ⊗_s A_s` with site 1 leftmost.
pub fn dense_string(factors: &[(usize, Axis)], coef: Complex64, sites: usize) -> CMatrix {
    let mut acc = CMatrix::identity(1, 1);
    for s in 1..=sites {
        let axis = factors.iter().find(|f| f.0 == s).map(|f| f.1);
        acc = acc.kronecker(&single(axis));
    }
    acc * coef
}

/// ATXY/XXZ chain Hamiltonian with uniform fields, open boundary.
pub fn dense_chain(sites: usize, gamma: f64, delta: f64, h1: f64, h2: f64) -> CMatrix {
    let dim = 1 << sites;
    let mut h = CMatrix::zeros(dim, dim);
    for i in 1..sites {
        h += dense_string(&[(i, Axis::X), (i + 1, Axis::X)], c((1.0 + gamma) / 4.0, 0.0), sites);
        h += dense_string(&[(i, Axis::Y), (i + 1, Axis::Y)], c((1.0 - gamma) / 4.0, 0.0), sites);
        h += dense_string(&[(i, Axis::Z), (i + 1, Axis::Z)], c(delta / 4.0, 0.0), sites);
    }
    for i in 1..=sites {
        let sign = if i % 2 == 1 { -1.0 } else { 1.0 };
        h += dense_string(&[(i, Axis::Z)], c(0.5 * (h1 + sign * h2), 0.0), sites);
    }
    h
}

pub fn herm_eig(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let eig = m.clone().symmetric_eigen();
    (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
}

pub fn dense_thermal(h: &CMatrix, beta: f64) -> CMatrix {
    let (vals, vecs) = herm_eig(h);
    let e0 = vals.iter().copied().fold(f64::INFINITY, f64::min);
    let w: Vec<f64> = vals.iter().map(|e| (-beta * (e - e0)).exp()).collect();
    let z: f64 = w.iter().sum();
    let d = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(w.len(), w.iter().map(|x| c(x / z, 0.0))));
    &vecs * d * vecs.adjoint()
}

pub fn propagator(h: &CMatrix, t: f64) -> CMatrix {
    let (vals, vecs) = herm_eig(h);
    let d = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        vals.len(),
        vals.iter().map(|e| Complex64::from_polar(1.0, -e * t)),
    ));
    &vecs * d * vecs.adjoint()
}

pub fn max_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_matrix(dim: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    DMatrix::from_fn(dim, dim, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
}

/// Full-rank random state `A A† / tr(A A†)`.
pub fn random_state(sites: usize, rng: &mut ChaCha8Rng) -> DensityMatrix {
    let a = random_matrix(1 << sites, rng);
    let m = &a * a.adjoint();
    let tr: Complex64 = (0..m.nrows()).map(|i| m[(i, i)]).sum();
    DensityMatrix::new(sites, m / tr).unwrap()
}

pub fn random_unitary_2x2(rng: &mut ChaCha8Rng) -> CMatrix {
    let a = random_matrix(2, rng);
    a.qr().q()
}

pub fn trace(m: &CMatrix) -> Complex64 {
    (0..m.nrows()).map(|i| m[(i, i)]).sum()
}
