//! Small dense linear-algebra helpers on top of `nalgebra`.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::pauli::CMatrix;

/// Largest `|m[r, c] - conj(m[c, r])|`.
pub fn hermiticity_error(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let s = m.as_slice();
    let mut worst = 0.0f64;
    for c in 0..n {
        for r in c..n {
            let d = (s[c * n + r] - s[r * n + c].conj()).norm();
            if d > worst {
                worst = d;
            }
        }
    }
    worst
}

/// Replace `m` by `(m + m†)/2` in place.
pub fn hermitize(m: &mut CMatrix) {
    let n = m.nrows();
    let s = m.as_mut_slice();
    for c in 0..n {
        for r in c..n {
            let avg = (s[c * n + r] + s[r * n + c].conj()) * 0.5;
            s[c * n + r] = avg;
            s[r * n + c] = avg.conj();
        }
    }
}

pub fn trace(m: &CMatrix) -> Complex64 {
    (0..m.nrows()).map(|i| m[(i, i)]).sum()
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn max_abs(a: &CMatrix) -> f64 {
    a.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

fn is_real(m: &CMatrix) -> bool {
    m.iter().all(|z| z.im == 0.0)
}

/// Eigenvalues (ascending) and eigenvectors of a Hermitian matrix.
///
/// Real symmetric input takes the cheaper real path; spin-chain Hamiltonians
/// built from x, y, z strings are always real in the computational basis.
pub fn eigh(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = m.nrows();
    let (vals, vecs) = if is_real(m) {
        let re = DMatrix::from_fn(n, n, |r, c| m[(r, c)].re);
        let eig = SymmetricEigen::new(re);
        let vecs = eig.eigenvectors.map(|x| Complex64::new(x, 0.0));
        (eig.eigenvalues.as_slice().to_vec(), vecs)
    } else {
        let eig = SymmetricEigen::new(m.clone());
        (eig.eigenvalues.as_slice().to_vec(), eig.eigenvectors)
    };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
    let sorted_vals = order.iter().map(|&i| vals[i]).collect();
    let sorted_vecs = CMatrix::from_fn(n, n, |r, c| vecs[(r, order[c])]);
    (sorted_vals, sorted_vecs)
}

/// Eigenvalues (ascending) of a Hermitian matrix.
pub fn eigvalsh(m: &CMatrix) -> Vec<f64> {
    let n = m.nrows();
    let mut vals: Vec<f64> = if is_real(m) {
        let re = DMatrix::from_fn(n, n, |r, c| m[(r, c)].re);
        re.symmetric_eigenvalues().as_slice().to_vec()
    } else {
        m.clone().symmetric_eigenvalues().as_slice().to_vec()
    };
    vals.sort_by(f64::total_cmp);
    vals
}

/// `V diag(f(λ)) V†` for a Hermitian matrix with eigenpairs `(vals, vecs)`.
pub fn spectral_apply(vals: &[f64], vecs: &CMatrix, f: impl Fn(f64) -> Complex64) -> CMatrix {
    let n = vals.len();
    let weights: Vec<Complex64> = vals.iter().map(|&v| f(v)).collect();
    let scaled = CMatrix::from_fn(n, n, |r, c| vecs[(r, c)] * weights[c]);
    scaled * vecs.adjoint()
}

/// Real-weight variant of [`spectral_apply`] that stays in real arithmetic when `vecs` is real.
pub fn spectral_apply_real(vals: &[f64], vecs: &CMatrix, f: impl Fn(f64) -> f64) -> CMatrix {
    let n = vals.len();
    if is_real(vecs) {
        let v = DMatrix::from_fn(n, n, |r, c| vecs[(r, c)].re);
        let weights: Vec<f64> = vals.iter().map(|&x| f(x)).collect();
        let scaled = DMatrix::from_fn(n, n, |r, c| v[(r, c)] * weights[c]);
        let out = scaled * v.transpose();
        out.map(|x| Complex64::new(x, 0.0))
    } else {
        spectral_apply(vals, vecs, |x| Complex64::new(f(x), 0.0))
    }
}

/// Cholesky test of `m + shift·I` for Hermitian `m`: succeeds iff every
/// pivot is strictly positive.
pub fn is_positive_definite_shifted(m: &CMatrix, shift: f64) -> bool {
    let n = m.nrows();
    // lower factor, column-major, in place
    let mut l: Vec<Complex64> = m.as_slice().to_vec();
    for i in 0..n {
        l[i * n + i] += shift;
    }
    for k in 0..n {
        let mut d = l[k * n + k].re;
        for p in 0..k {
            d -= l[p * n + k].norm_sqr();
        }
        if !(d > 0.0) {
            return false;
        }
        let d = d.sqrt();
        l[k * n + k] = Complex64::new(d, 0.0);
        for p in 0..k {
            let lkp = l[p * n + k].conj();
            let (head, tail) = l.split_at_mut(k * n);
            let col_p = &head[p * n..p * n + n];
            let col_k = &mut tail[..n];
            for r in k + 1..n {
                col_k[r] -= col_p[r] * lkp;
            }
        }
        let inv = 1.0 / d;
        for r in k + 1..n {
            l[k * n + r] *= inv;
        }
    }
    true
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}
