#![allow(dead_code)]

use num_complex::Complex64;
use spinor_eit::linalg::CMat2;

/// Reference matrix exponential: plain Taylor series on `A/2^s` followed by
/// `s` squarings, sized so that the scaled entry sum is at most 1/2.
pub fn expm_reference(a: &CMat2) -> CMat2 {
    let norm = a.iter().map(|z| z.norm()).sum::<f64>();
    let s = if norm > 0.0 { (2.0 * norm).log2().ceil().max(0.0) as i32 } else { 0 };
    let scaled = a / Complex64::new(2f64.powi(s), 0.0);
    let mut term = CMat2::identity();
    let mut sum = CMat2::identity();
    for k in 1..30 {
        term = term * scaled / Complex64::new(k as f64, 0.0);
        sum += term;
    }
    for _ in 0..s {
        sum = sum * sum;
    }
    sum
}

pub fn max_abs(m: &CMat2) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}
