mod common;

use std::f64::consts::{FRAC_PI_2, TAU};

use num_complex::Complex64;
use proptest::prelude::*;
use spinor_eit::linalg::{eigenvalues, is_hermitian, CMat2, I};
use spinor_eit::medium::{
    classify_regime, detuning_matrix, eigen_velocities, lg_ratio, rabi_matrix, velocity_matrix, MediumParams,
    Regime,
};
use spinor_eit::oracle::analytic_generator;
use spinor_eit::transfer::{
    k_coefficients, transfer_matrix, transmissions, transmissions_from, Branch, KCoefficients,
};

use common::{expm_reference, max_abs};

fn medium() -> impl Strategy<Value = MediumParams> {
    (0.0..2.2f64, -3.2..3.2f64, -3i32..=3, 20.0..500.0f64, 0.0..2.5f64, 0.0..0.1f64).prop_map(
        |(a, s, l, alpha, xi, epsilon)| MediumParams { a, s, l, alpha, xi, epsilon, ..Default::default() },
    )
}

fn complex(r: f64) -> impl Strategy<Value = Complex64> {
    (-r..r, -r..r).prop_map(|(re, im)| Complex64::new(re, im))
}

proptest! {
    #[test]
    fn velocity_matrix_spectrum_matches_closed_form(p in medium(), rho in 0.0..3.0f64, phi in 0.0..TAU) {
        let v = velocity_matrix(rho, phi, &p).unwrap();
        prop_assert!(is_hermitian(&v, 1e-15));
        let f = lg_ratio(rho, p.a).unwrap();
        prop_assert!((v.trace().re - 2.0 * (1.0 + f * f)).abs() < 1e-13);
        if let Ok(d) = eigen_velocities(rho, &p) {
            let mut numeric: Vec<f64> = eigenvalues(&v).iter().map(|z| z.re).collect();
            numeric.sort_by(f64::total_cmp);
            let mut closed = [d.v_plus, d.v_minus];
            closed.sort_by(f64::total_cmp);
            for (n, c) in numeric.iter().zip(closed) {
                // Absolute floor covers cancellation in the characteristic polynomial.
                prop_assert!((n - c).abs() <= 1e-12 * c.abs() + 1e-14, "{n} vs {c}");
            }
            prop_assert!((d.u_plus * d.v_plus - 1.0).abs() <= f64::EPSILON);
            prop_assert!((d.u_minus * d.v_minus - 1.0).abs() <= f64::EPSILON);
        }
    }

    #[test]
    fn detuning_matrix_keeps_detunings_as_eigenvalues(
        p in medium(), rho in 0.0..3.0f64, phi in 0.0..TAU, d1 in -2.0..2.0f64, d2 in -2.0..2.0f64,
    ) {
        let p = MediumParams { delta_tilde: [d1, d2], ..p };
        let det = rabi_matrix(rho, phi, &p).unwrap().det().norm();
        prop_assume!(det > 1e-6);
        let d = detuning_matrix(rho, phi, &p).unwrap();
        let mut ev: Vec<f64> = eigenvalues(&d).iter().map(|z| z.re).collect();
        ev.sort_by(f64::total_cmp);
        let mut expected = [d1, d2];
        expected.sort_by(f64::total_cmp);
        for (e, x) in ev.iter().zip(expected) {
            prop_assert!((e - x).abs() < 1e-10);
        }
    }

    #[test]
    fn half_pi_phase_decouples_tripods(a in 0.01..5.0f64, rho in 1e-6..3.0f64) {
        let p = MediumParams { a, s: FRAC_PI_2, ..Default::default() };
        prop_assert_eq!(classify_regime(rho, &p).unwrap(), Regime::IndependentTripods);
    }

    #[test]
    fn k_coefficients_structure(p in medium(), rho in 0.0..3.0f64, phi in 0.0..TAU) {
        if let Ok(k) = k_coefficients(rho, phi, &p) {
            let angle = p.s + p.l as f64 * phi;
            prop_assert!((k.kx * angle.sin() + k.ky * angle.cos()).norm() < 1e-14 * (1.0 + k.kx.norm()));
            prop_assert!(k.k0.im >= 0.0);
            let direct = analytic_generator(rho, phi, &p).unwrap().0;
            prop_assert!(max_abs(&(direct - k.generator())) < 1e-12 * (1.0 + max_abs(&direct)));
        }
    }

    #[test]
    fn azimuthal_factorization(p in medium(), rho in 0.0..3.0f64, phi in 0.0..TAU) {
        if let (Ok(t0), Ok(t)) = (transmissions(rho, 0.0, &p), transmissions(rho, phi, &p)) {
            let winding = Complex64::from_polar(1.0, -(p.l as f64) * phi);
            prop_assert!((t.t1 - t0.t1).norm() < 1e-14);
            prop_assert!((t.t2 - winding * t0.t2).norm() < 1e-14);
        }
    }

    #[test]
    fn lossless_is_unitary_and_lossy_is_passive(p in medium(), rho in 0.0..3.0f64, phi in 0.0..TAU) {
        if let Ok(t) = transmissions(rho, phi, &p) {
            prop_assert!(t.i1 + t.i2 <= 1.0 + 1e-12);
        }
        let lossless = MediumParams { lossless: true, ..p };
        if let Ok(t) = transmissions(rho, phi, &lossless) {
            prop_assert!((t.i1 + t.i2 - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn branch_choice_is_irrelevant(k0 in complex(3.0), kx in complex(3.0), ky in complex(3.0)) {
        let k = KCoefficients { k0, kx, ky };
        let a = transmissions_from(&k, Branch::Principal);
        let b = transmissions_from(&k, Branch::Flipped);
        let scale = 1.0 + a.t1.norm() + a.t2.norm();
        prop_assert!((a.t1 - b.t1).norm() < 1e-14 * scale);
        prop_assert!((a.t2 - b.t2).norm() < 1e-14 * scale);
    }

    #[test]
    fn transfer_matrix_is_the_exponential(k0 in complex(2.0), kx in complex(2.0), ky in complex(2.0)) {
        let k = KCoefficients { k0, kx, ky };
        let reference = expm_reference(&(k.generator() * I));
        let m = transfer_matrix(&k);
        let err = max_abs(&(m - reference));
        prop_assert!(err < 1e-12 * (1.0 + max_abs(&reference)), "err {err:e}, |M| {}", max_abs(&reference));
        let column = transmissions_from(&k, Branch::Principal);
        prop_assert!((column.t1 - m[(0, 0)]).norm() < 1e-12 * (1.0 + column.t1.norm()));
        prop_assert!((column.t2 - m[(1, 0)]).norm() < 1e-12 * (1.0 + column.t2.norm()));
    }
}

#[test]
fn transfer_matrix_near_zero_kperp() {
    // K⊥ ~ 1e-6 exercises the series branch of sin(x)/x.
    let k = KCoefficients {
        k0: Complex64::new(0.4, 0.01),
        kx: Complex64::new(7e-7, 1e-7),
        ky: Complex64::new(-3e-7, 2e-7),
    };
    let reference = expm_reference(&(k.generator() * I));
    let err = max_abs(&(transfer_matrix(&k) - reference));
    assert!(err < 1e-15, "{err:e}");
    let _: CMat2 = reference;
}
