//! Small dense complex 2×2 kernels.
//!
//! Everything in this crate lives on 2×2 complex matrices, so the helpers here
//! are written for that size only: closed-form eigenvalues, condition numbers
//! and a matrix exponential by eigen-decomposition with a scaling-and-squaring
//! fallback.

use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64;

pub type CMat2 = Matrix2<Complex64>;
pub type CVec2 = Vector2<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// Eigenvector condition number above which `expm` stops trusting the
/// eigen-decomposition.
const EIGVEC_COND_MAX: f64 = 1e8;

#[inline]
pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn identity() -> CMat2 {
    CMat2::identity()
}

pub fn sigma_x() -> CMat2 {
    CMat2::new(ZERO, ONE, ONE, ZERO)
}

pub fn sigma_y() -> CMat2 {
    CMat2::new(ZERO, -I, I, ZERO)
}

pub fn sigma_z() -> CMat2 {
    CMat2::new(ONE, ZERO, ZERO, -ONE)
}

pub fn det(m: &CMat2) -> Complex64 {
    m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]
}

/// Inverse via the adjugate; `None` when the determinant is exactly zero.
pub fn inverse(m: &CMat2) -> Option<CMat2> {
    let d = det(m);
    if d == ZERO || !d.is_finite() {
        return None;
    }
    Some(CMat2::new(m[(1, 1)], -m[(0, 1)], -m[(1, 0)], m[(0, 0)]) / d)
}

/// Induced 1-norm (max column sum).
pub fn norm_1(m: &CMat2) -> f64 {
    let c0 = m[(0, 0)].norm() + m[(1, 0)].norm();
    let c1 = m[(0, 1)].norm() + m[(1, 1)].norm();
    c0.max(c1)
}

/// Largest entry magnitude.
pub fn norm_max(m: &CMat2) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

/// 1-norm condition number; infinite for singular input.
pub fn condition_number(m: &CMat2) -> f64 {
    match inverse(m) {
        Some(inv) => norm_1(m) * norm_1(&inv),
        None => f64::INFINITY,
    }
}

/// Both eigenvalues, `(a+d)/2 ± √(((a−d)/2)² + bc)`.
///
/// The discriminant is formed from the diagonal difference rather than
/// `tr²/4 − det`, which cancels badly for nearly degenerate eigenvalues.
pub fn eigenvalues(m: &CMat2) -> [Complex64; 2] {
    let half_tr = (m[(0, 0)] + m[(1, 1)]) * 0.5;
    let half_diff = (m[(0, 0)] - m[(1, 1)]) * 0.5;
    let disc = (half_diff * half_diff + m[(0, 1)] * m[(1, 0)]).sqrt();
    [half_tr + disc, half_tr - disc]
}

pub fn is_hermitian(m: &CMat2, tol: f64) -> bool {
    norm_max(&(m - m.adjoint())) <= tol * norm_max(m).max(1.0)
}

/// `sin(z)/z`, with a short Taylor series near the origin.
pub fn sinc(z: Complex64) -> Complex64 {
    if z.norm() < 1e-4 {
        let z2 = z * z;
        ONE - z2 / 6.0 + z2 * z2 / 120.0
    } else {
        z.sin() / z
    }
}

/// Matrix exponential of a complex 2×2 matrix.
///
/// Diagonalizes when the eigenvector basis is well conditioned and falls back
/// to scaling-and-squaring otherwise (near-defective input).
pub fn expm(a: &CMat2) -> CMat2 {
    expm_eigen(a).unwrap_or_else(|| expm_scaling_squaring(a))
}

fn expm_eigen(a: &CMat2) -> Option<CMat2> {
    let [l1, l2] = eigenvalues(a);
    let scale = norm_1(a).max(f64::MIN_POSITIVE);
    if (l1 - l2).norm() <= 1e-8 * scale {
        return None;
    }
    let v1 = eigenvector(a, l1)?;
    let v2 = eigenvector(a, l2)?;
    let v = CMat2::from_columns(&[v1, v2]);
    if condition_number(&v) > EIGVEC_COND_MAX {
        return None;
    }
    let v_inv = inverse(&v)?;
    let d = CMat2::from_diagonal(&CVec2::new(l1.exp(), l2.exp()));
    Some(v * d * v_inv)
}

fn eigenvector(a: &CMat2, lambda: Complex64) -> Option<CVec2> {
    // Rows of (A - λI) are orthogonal to the eigenvector; pick the better-scaled one.
    let r0 = CVec2::new(-a[(0, 1)], a[(0, 0)] - lambda);
    let r1 = CVec2::new(a[(1, 1)] - lambda, -a[(1, 0)]);
    let v = if r0.norm() >= r1.norm() { r0 } else { r1 };
    let n = v.norm();
    if n == 0.0 {
        // A = λI on this subspace; any basis vector works.
        return None;
    }
    Some(v / c(n))
}

/// Scaling-and-squaring with a truncated Taylor series on the scaled matrix.
pub fn expm_scaling_squaring(a: &CMat2) -> CMat2 {
    let norm = norm_1(a);
    let mut squarings = 0u32;
    if norm > 0.5 {
        squarings = (norm / 0.5).log2().ceil() as u32;
    }
    let scaled = a / c(2f64.powi(squarings as i32));
    let mut term = identity();
    let mut sum = identity();
    for k in 1..=20 {
        term = term * scaled / c(k as f64);
        sum += term;
        if norm_max(&term) < 1e-18 * norm_max(&sum) {
            break;
        }
    }
    for _ in 0..squarings {
        sum = sum * sum;
    }
    sum
}
