//! Symbolic Pauli strings and the kernels that apply them to dense matrices.
//!
//! Site indices are 1-based. Site `s` of an `L`-site register lives on bit
//! `L - s` of the computational index, so site `L` is the least significant
//! bit and site 1 the most significant one (ordinary Kronecker ordering,
//! site 1 leftmost). A cleared bit is spin up, the `+1` eigenstate of σz.
//!
//! The ladder axes are σ± = (σx ± iσy)/2, i.e. σ+ = |0⟩⟨1| and σ- = |1⟩⟨0|.
//!
//! Dense matrices are `nalgebra` column-major; the kernels below index the raw
//! storage directly and never build a 2^L × 2^L operator.

use std::cmp::Ordering;
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::DensityMatrix;

pub type CMatrix = DMatrix<Complex64>;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Imaginary residue tolerated by [`expectation`] before it is reported.
pub const EXPECTATION_IMAG_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
    Plus,
    Minus,
}

impl Axis {
    pub fn adjoint(self) -> Axis {
        match self {
            Axis::Plus => Axis::Minus,
            Axis::Minus => Axis::Plus,
            a => a,
        }
    }

    /// The 2×2 matrix in the `{|0⟩, |1⟩}` basis.
    pub fn matrix(self) -> [[Complex64; 2]; 2] {
        let one = Complex64::new(1.0, 0.0);
        match self {
            Axis::X => [[ZERO, one], [one, ZERO]],
            Axis::Y => [[ZERO, -I], [I, ZERO]],
            Axis::Z => [[one, ZERO], [ZERO, -one]],
            Axis::Plus => [[ZERO, one], [ZERO, ZERO]],
            Axis::Minus => [[ZERO, ZERO], [one, ZERO]],
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
            Axis::Plus => "+",
            Axis::Minus => "-",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Bit position of a 1-based site in an `sites`-qubit register.
#[inline]
pub fn site_bit(sites: usize, site: usize) -> usize {
    sites - site
}

/// A product of single-site operators times a complex coefficient.
///
/// Acting on a basis state, `P|j⟩ = amplitude(j) |j ^ flip_mask⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliString {
    sites: usize,
    factors: Vec<(usize, Axis)>,
    coefficient: Complex64,
    flip: usize,
    sign_mask: usize,
    ladder_mask: usize,
    ladder_bits: usize,
    base: Complex64,
}

impl PauliString {
    pub fn new(factors: &[(usize, Axis)], coefficient: Complex64, sites: usize) -> Result<Self> {
        if sites == 0 || sites >= usize::BITS as usize {
            return Err(Error::InvalidOperator(format!("unsupported register size {sites}")));
        }
        if !coefficient.re.is_finite() || !coefficient.im.is_finite() {
            return Err(Error::InvalidOperator(format!("non-finite coefficient {coefficient}")));
        }
        let mut sorted = factors.to_vec();
        sorted.sort_by_key(|&(site, _)| site);
        for &(site, _) in &sorted {
            if site == 0 || site > sites {
                return Err(Error::SiteOutOfRange { site, sites });
            }
        }
        if let Some(w) = sorted.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidOperator(format!("site {} appears twice", w[0].0)));
        }

        let mut flip = 0;
        let mut sign_mask = 0;
        let mut ladder_mask = 0;
        let mut ladder_bits = 0;
        let mut base = coefficient;
        for &(site, axis) in &sorted {
            let bit = 1usize << site_bit(sites, site);
            match axis {
                Axis::X => flip |= bit,
                Axis::Y => {
                    flip |= bit;
                    sign_mask |= bit;
                    base *= I;
                }
                Axis::Z => sign_mask |= bit,
                Axis::Plus => {
                    flip |= bit;
                    ladder_mask |= bit;
                    ladder_bits |= bit;
                }
                Axis::Minus => {
                    flip |= bit;
                    ladder_mask |= bit;
                }
            }
        }
        Ok(Self { sites, factors: sorted, coefficient, flip, sign_mask, ladder_mask, ladder_bits, base })
    }

    pub fn identity(sites: usize, coefficient: Complex64) -> Result<Self> {
        Self::new(&[], coefficient, sites)
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn dim(&self) -> usize {
        1 << self.sites
    }

    pub fn factors(&self) -> &[(usize, Axis)] {
        &self.factors
    }

    pub fn coefficient(&self) -> Complex64 {
        self.coefficient
    }

    pub fn flip_mask(&self) -> usize {
        self.flip
    }

    /// Amplitude `a` with `P|j⟩ = a |j ^ flip_mask⟩`.
    #[inline]
    pub fn amplitude(&self, j: usize) -> Complex64 {
        if j & self.ladder_mask != self.ladder_bits {
            return ZERO;
        }
        if (j & self.sign_mask).count_ones() & 1 == 1 {
            -self.base
        } else {
            self.base
        }
    }

    pub fn adjoint(&self) -> PauliString {
        let factors: Vec<_> = self.factors.iter().map(|&(s, a)| (s, a.adjoint())).collect();
        PauliString::new(&factors, self.coefficient.conj(), self.sites).expect("adjoint of a valid string is valid")
    }

    pub fn with_coefficient(&self, coefficient: Complex64) -> Result<PauliString> {
        PauliString::new(&self.factors, coefficient, self.sites)
    }

    fn cmp_factors(&self, other: &Self) -> Ordering {
        self.factors.cmp(&other.factors)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.coefficient)?;
        if self.factors.is_empty() {
            return write!(f, " I");
        }
        for (site, axis) in &self.factors {
            write!(f, " σ{axis}_{site}")?;
        }
        Ok(())
    }
}

/// Build the canonical string for `coefficient · Π σ_axis(site)` on an `sites`-site register.
pub fn embed_pauli(factors: &[(usize, Axis)], coefficient: Complex64, sites: usize) -> Result<PauliString> {
    PauliString::new(factors, coefficient, sites)
}

fn check_square(rho: &CMatrix, dim: usize) -> Result<()> {
    if rho.nrows() != dim || rho.ncols() != dim {
        return Err(Error::Shape {
            expected: format!("{dim}x{dim}"),
            found: format!("{}x{}", rho.nrows(), rho.ncols()),
        });
    }
    Ok(())
}

/// `term·ρ` (left) or `ρ·term` (right) by index permutation and phase accumulation.
pub fn apply_string(term: &PauliString, side: Side, rho: &CMatrix) -> Result<CMatrix> {
    let dim = term.dim();
    check_square(rho, dim)?;
    let mut out = CMatrix::zeros(dim, dim);
    apply_string_into(term, side, rho.as_slice(), out.as_mut_slice(), ONE_REAL);
    Ok(out)
}

const ONE_REAL: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// Accumulates `scale · term·ρ` (or `scale · ρ·term`) into `out`; both column-major `dim × dim`.
pub(crate) fn apply_string_into(
    term: &PauliString,
    side: Side,
    rho: &[Complex64],
    out: &mut [Complex64],
    scale: Complex64,
) {
    let dim = term.dim();
    let m = term.flip;
    match side {
        Side::Left => {
            // (Pρ)[r, c] = amp(r ^ m) ρ[r ^ m, c]
            let row_amp: Vec<Complex64> = (0..dim).map(|r| scale * term.amplitude(r ^ m)).collect();
            for (col_in, col_out) in rho.chunks_exact(dim).zip(out.chunks_exact_mut(dim)) {
                for r in 0..dim {
                    col_out[r] += row_amp[r] * col_in[r ^ m];
                }
            }
        }
        Side::Right => {
            // (ρP)[r, c] = ρ[r, c ^ m] amp(c)
            for c in 0..dim {
                let a = scale * term.amplitude(c);
                if a == ZERO {
                    continue;
                }
                let src = c ^ m;
                let col_in = &rho[src * dim..(src + 1) * dim];
                let col_out = &mut out[c * dim..(c + 1) * dim];
                for (o, x) in col_out.iter_mut().zip(col_in) {
                    *o += a * x;
                }
            }
        }
    }
}

/// A sum of Pauli strings on a common register.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct OperatorSum {
    sites: usize,
    terms: Vec<PauliString>,
}

impl OperatorSum {
    pub fn new(sites: usize) -> Self {
        Self { sites, terms: Vec::new() }
    }

    pub fn from_terms(sites: usize, terms: Vec<PauliString>) -> Result<Self> {
        let mut op = Self::new(sites);
        for t in terms {
            op.push(t)?;
        }
        Ok(op)
    }

    pub fn push(&mut self, term: PauliString) -> Result<()> {
        if term.sites != self.sites {
            return Err(Error::Shape {
                expected: format!("{}-site term", self.sites),
                found: format!("{}-site term", term.sites),
            });
        }
        self.terms.push(term);
        Ok(())
    }

    /// Convenience for builders: pushes `coefficient · Π factors`, skipping exact zeros.
    pub fn add(&mut self, factors: &[(usize, Axis)], coefficient: f64) -> Result<()> {
        if coefficient == 0.0 {
            return Ok(());
        }
        self.push(PauliString::new(factors, Complex64::new(coefficient, 0.0), self.sites)?)
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn dim(&self) -> usize {
        1 << self.sites
    }

    pub fn terms(&self) -> &[PauliString] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn adjoint(&self) -> OperatorSum {
        OperatorSum { sites: self.sites, terms: self.terms.iter().map(PauliString::adjoint).collect() }
    }

    pub fn scaled(&self, factor: f64) -> OperatorSum {
        let terms =
            self.terms.iter().map(|t| t.with_coefficient(t.coefficient * factor).expect("finite rescale")).collect();
        OperatorSum { sites: self.sites, terms }
    }

    /// Sorted by factor list with like strings merged and vanishing ones dropped.
    pub fn canonical(&self) -> OperatorSum {
        let mut terms = self.terms.clone();
        terms.sort_by(|a, b| a.cmp_factors(b));
        let mut merged: Vec<PauliString> = Vec::with_capacity(terms.len());
        for t in terms {
            match merged.last_mut() {
                Some(last) if last.factors == t.factors => {
                    *last = last.with_coefficient(last.coefficient + t.coefficient).expect("finite sum");
                }
                _ => merged.push(t),
            }
        }
        merged.retain(|t| t.coefficient.norm() > 1e-14);
        OperatorSum { sites: self.sites, terms: merged }
    }

    /// Term-by-term comparison of the canonical forms of `self` and its adjoint.
    pub fn is_hermitian(&self) -> bool {
        let a = self.canonical();
        let b = self.adjoint().canonical();
        a.terms.len() == b.terms.len()
            && a.terms
                .iter()
                .zip(&b.terms)
                .all(|(x, y)| x.factors == y.factors && (x.coefficient - y.coefficient).norm() <= 1e-12)
    }

    /// Dense 2^L × 2^L matrix. Intended for eigendecompositions of small registers.
    pub fn to_matrix(&self) -> CMatrix {
        let dim = self.dim();
        let mut m = CMatrix::zeros(dim, dim);
        for t in &self.terms {
            for j in 0..dim {
                let a = t.amplitude(j);
                if a != ZERO {
                    m[(j ^ t.flip, j)] += a;
                }
            }
        }
        m
    }

    /// Group strings by flip mask for repeated application.
    pub fn compile(&self) -> CompiledOperator {
        CompiledOperator::new(self)
    }
}

#[derive(Debug, Clone)]
struct FlipGroup {
    mask: usize,
    row_coef: Vec<Complex64>,
    /// Real parts of `row_coef` when every coefficient is real.
    real_coef: Option<Vec<f64>>,
}

impl FlipGroup {
    /// `out[r] += coef[r] · input[r ^ mask]` for `r` in `start..start + out.len()`,
    /// walking aligned blocks on which `r ↦ r ^ mask` is a contiguous shift.
    fn accumulate(&self, input: &[Complex64], start: usize, out: &mut [Complex64]) {
        let len = out.len();
        let block = if self.mask == 0 { len } else { (1usize << self.mask.trailing_zeros()).min(len) };
        for off in (0..len).step_by(block) {
            let r0 = start + off;
            let src = &input[r0 ^ self.mask..][..block];
            let dst = &mut out[off..off + block];
            match &self.real_coef {
                Some(coef) => {
                    for ((o, x), c) in dst.iter_mut().zip(src).zip(&coef[r0..r0 + block]) {
                        o.re += c * x.re;
                        o.im += c * x.im;
                    }
                }
                None => {
                    for ((o, x), c) in dst.iter_mut().zip(src).zip(&self.row_coef[r0..r0 + block]) {
                        *o += c * x;
                    }
                }
            }
        }
    }
}

/// Rows per output chunk in `apply_left_into`; keeps the chunk in L1.
const ROW_CHUNK: usize = 512;

/// Tile edge for the blocked transpose in the commutator.
const TILE: usize = 32;

/// An [`OperatorSum`] pre-grouped by flip mask.
///
/// For every distinct mask `m` it stores `row_coef[r] = Σ amp(r ^ m)` over the
/// strings sharing `m`, so that `(Hρ)[r, c] = Σ_m row_coef_m[r] ρ[r ^ m, c]`.
/// A chain Hamiltonian with nearest-neighbour flip-flop terms has `L` groups
/// regardless of how many strings it was built from.
#[derive(Debug, Clone)]
pub struct CompiledOperator {
    sites: usize,
    groups: Vec<FlipGroup>,
}

impl CompiledOperator {
    pub fn new(op: &OperatorSum) -> Self {
        let dim = op.dim();
        let mut groups: Vec<FlipGroup> = Vec::new();
        for t in &op.terms {
            let idx = match groups.iter().position(|g| g.mask == t.flip) {
                Some(i) => i,
                None => {
                    groups.push(FlipGroup { mask: t.flip, row_coef: vec![ZERO; dim], real_coef: None });
                    groups.len() - 1
                }
            };
            let g = &mut groups[idx];
            for r in 0..dim {
                g.row_coef[r] += t.amplitude(r ^ t.flip);
            }
        }
        groups.retain(|g| g.row_coef.iter().any(|c| *c != ZERO));
        groups.sort_by_key(|g| g.mask);
        for g in &mut groups {
            if g.row_coef.iter().all(|c| c.im == 0.0) {
                g.real_coef = Some(g.row_coef.iter().map(|c| c.re).collect());
            }
        }
        Self { sites: op.sites, groups }
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn dim(&self) -> usize {
        1 << self.sites
    }

    pub fn group_count(&self) -> usize {
        self.groups.len()
    }

    /// `out = H·ρ` for column-major `dim × dim` slices.
    pub fn apply_left_into(&self, rho: &[Complex64], out: &mut [Complex64]) {
        let dim = self.dim();
        debug_assert_eq!(rho.len(), dim * dim);
        debug_assert_eq!(out.len(), dim * dim);
        out.fill(ZERO);
        for (col_in, col_out) in rho.chunks_exact(dim).zip(out.chunks_exact_mut(dim)) {
            for (k, chunk) in col_out.chunks_mut(ROW_CHUNK).enumerate() {
                for g in &self.groups {
                    g.accumulate(col_in, k * ROW_CHUNK, chunk);
                }
            }
        }
    }

    pub fn apply_left(&self, rho: &CMatrix) -> Result<CMatrix> {
        check_square(rho, self.dim())?;
        let dim = self.dim();
        let mut out = CMatrix::zeros(dim, dim);
        self.apply_left_into(rho.as_slice(), out.as_mut_slice());
        Ok(out)
    }

    /// `out = -i[H, ρ]` for Hermitian `H` and `ρ`, using `ρH = (Hρ)†`.
    ///
    /// `scratch` receives `Hρ`. The result is exactly Hermitian in floating point.
    pub fn commutator_into(&self, rho: &[Complex64], scratch: &mut [Complex64], out: &mut [Complex64]) {
        let dim = self.dim();
        self.apply_left_into(rho, scratch);
        for c0 in (0..dim).step_by(TILE) {
            for r0 in (c0..dim).step_by(TILE) {
                for c in c0..(c0 + TILE).min(dim) {
                    for r in r0.max(c)..(r0 + TILE).min(dim) {
                        let x_rc = scratch[c * dim + r];
                        let x_cr = scratch[r * dim + c];
                        // -i (X - X†)
                        let d = x_rc - x_cr.conj();
                        let v = Complex64::new(d.im, -d.re);
                        out[c * dim + r] = v;
                        out[r * dim + c] = v.conj();
                    }
                }
            }
        }
    }
}

/// `tr(ρ·op)` for Hermitian `op`.
pub fn expectation(rho: &DensityMatrix, op: &OperatorSum) -> Result<f64> {
    if op.sites() != rho.sites() {
        return Err(Error::Shape {
            expected: format!("{}-site operator", rho.sites()),
            found: format!("{}-site operator", op.sites()),
        });
    }
    if !op.is_hermitian() {
        return Err(Error::Contract("expectation requires a Hermitian operator".into()));
    }
    let value = trace_product(rho.matrix(), op);
    if value.im.abs() > EXPECTATION_IMAG_TOL {
        return Err(Error::NumericalIntegrity(format!("expectation value has imaginary residue {:e}", value.im)));
    }
    Ok(value.re)
}

/// `tr(m·op)` without any Hermiticity requirement.
pub fn trace_product(m: &CMatrix, op: &OperatorSum) -> Complex64 {
    // tr(m P) = Σ_j m[j, j^f] amp(j)
    let dim = op.dim();
    let mut acc = ZERO;
    for t in op.terms() {
        for j in 0..dim {
            let a = t.amplitude(j);
            if a != ZERO {
                acc += m[(j, j ^ t.flip)] * a;
            }
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn sigma_z_single_site() {
        let p = embed_pauli(&[(1, Axis::Z)], c(1.0), 1).unwrap();
        let op = OperatorSum::from_terms(1, vec![p]).unwrap();
        let m = op.to_matrix();
        assert_eq!(m[(0, 0)], c(1.0));
        assert_eq!(m[(1, 1)], c(-1.0));
        assert_eq!(m[(0, 1)], ZERO);
    }

    #[test]
    fn xx_is_scaled_antidiagonal() {
        let p = embed_pauli(&[(2, Axis::X), (1, Axis::X)], c(0.5), 2).unwrap();
        assert_eq!(p.factors(), &[(1, Axis::X), (2, Axis::X)]);
        let m = OperatorSum::from_terms(2, vec![p]).unwrap().to_matrix();
        for r in 0..4 {
            for col in 0..4 {
                let expect = if r + col == 3 { c(0.5) } else { ZERO };
                assert_eq!(m[(r, col)], expect);
            }
        }
    }

    #[test]
    fn construction_errors() {
        assert!(matches!(embed_pauli(&[(1, Axis::X), (1, Axis::Z)], c(1.0), 2), Err(Error::InvalidOperator(_))));
        assert!(matches!(embed_pauli(&[(3, Axis::X)], c(1.0), 2), Err(Error::SiteOutOfRange { site: 3, sites: 2 })));
        assert!(matches!(embed_pauli(&[(0, Axis::X)], c(1.0), 2), Err(Error::SiteOutOfRange { .. })));
        assert!(embed_pauli(&[(1, Axis::X)], Complex64::new(f64::NAN, 0.0), 2).is_err());
    }

    #[test]
    fn identity_leaves_matrix_unchanged() {
        let rho = CMatrix::from_fn(4, 4, |r, k| Complex64::new(r as f64, k as f64 * 0.5));
        let id = PauliString::identity(2, c(1.0)).unwrap();
        assert_eq!(apply_string(&id, Side::Left, &rho).unwrap(), rho);
        assert_eq!(apply_string(&id, Side::Right, &rho).unwrap(), rho);
    }

    #[test]
    fn sigma_x_on_up_projector() {
        let mut rho = CMatrix::zeros(2, 2);
        rho[(0, 0)] = c(1.0);
        let x = embed_pauli(&[(1, Axis::X)], c(1.0), 1).unwrap();
        let out = apply_string(&x, Side::Left, &rho).unwrap();
        assert_eq!(out[(1, 0)], c(1.0));
        assert_eq!(out[(0, 0)], ZERO);
        assert_eq!(out[(0, 1)], ZERO);
        assert_eq!(out[(1, 1)], ZERO);
    }

    #[test]
    fn shape_mismatch_is_reported() {
        let x = embed_pauli(&[(1, Axis::X)], c(1.0), 2).unwrap();
        let rho = CMatrix::zeros(2, 2);
        assert!(matches!(apply_string(&x, Side::Left, &rho), Err(Error::Shape { .. })));
    }

    #[test]
    fn ladder_operators() {
        // σ+ = |0⟩⟨1|
        let p = embed_pauli(&[(1, Axis::Plus)], c(1.0), 1).unwrap();
        let m = OperatorSum::from_terms(1, vec![p]).unwrap().to_matrix();
        assert_eq!(m[(0, 1)], c(1.0));
        assert_eq!(m[(1, 0)], ZERO);
        assert_eq!(m[(0, 0)], ZERO);
    }

    #[test]
    fn hermiticity_check() {
        let mut h = OperatorSum::new(3);
        h.add(&[(1, Axis::X), (2, Axis::X)], 0.3).unwrap();
        h.add(&[(2, Axis::Z)], -1.0).unwrap();
        assert!(h.is_hermitian());
        h.push(embed_pauli(&[(3, Axis::Plus)], c(1.0), 3).unwrap()).unwrap();
        assert!(!h.is_hermitian());
        h.push(embed_pauli(&[(3, Axis::Minus)], c(1.0), 3).unwrap()).unwrap();
        assert!(h.is_hermitian());
        let mut ih = OperatorSum::new(1);
        ih.push(embed_pauli(&[(1, Axis::Z)], Complex64::new(0.0, 1.0), 1).unwrap()).unwrap();
        assert!(!ih.is_hermitian());
    }

    #[test]
    fn canonical_merges_like_terms() {
        let mut h = OperatorSum::new(2);
        h.add(&[(1, Axis::Z)], 1.0).unwrap();
        h.add(&[(2, Axis::X), (1, Axis::Y)], 2.0).unwrap();
        h.add(&[(1, Axis::Z)], -1.0).unwrap();
        let canon = h.canonical();
        assert_eq!(canon.len(), 1);
        assert_eq!(canon.terms()[0].factors(), &[(1, Axis::Y), (2, Axis::X)]);
    }

    #[test]
    fn compiled_groups_share_masks() {
        let mut h = OperatorSum::new(4);
        for i in 1..4 {
            h.add(&[(i, Axis::X), (i + 1, Axis::X)], 0.3).unwrap();
            h.add(&[(i, Axis::Y), (i + 1, Axis::Y)], 0.2).unwrap();
        }
        for i in 1..=4 {
            h.add(&[(i, Axis::Z)], 0.1 * i as f64).unwrap();
        }
        assert_eq!(h.compile().group_count(), 4);
    }
}
