//! Cross-checks of the zeta integrals: agreement with the completed Riemann
//! zeta, the exact functional equation, method independence, and the
//! semistability invariant of the rank-2 moduli sampler.

use latcoh::{stability, zeta};
use num::complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn rank1_tracks_the_completed_zeta_at_random_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x2E7A1);
    for _ in 0..12 {
        let s = Complex64::new(rng.gen_range(0.15..0.85), rng.gen_range(0.3..12.0));
        let ev = zeta::rank1_zeta(s, 1e-10).unwrap();
        let oracle = zeta::xi_reference(s).unwrap();
        let gap = (ev.value - oracle).norm();
        // The oracle itself carries ~1e-13 relative noise; allow for it.
        let budget = ev.abs_error + 1e-12 * (1.0 + oracle.norm());
        assert!(gap <= budget, "s = {s}: gap {gap:.3e} > {budget:.3e}");
    }
}

#[test]
fn rank1_functional_equation_is_exact_by_construction() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x2E7A2);
    for _ in 0..8 {
        let s = Complex64::new(rng.gen_range(-0.5..1.5), rng.gen_range(0.1..8.0));
        let a = zeta::rank1_zeta(s, 1e-9).unwrap();
        let b = zeta::rank1_zeta(Complex64::new(1.0, 0.0) - s, 1e-9).unwrap();
        // The two integral pieces swap roles; the assembled values agree to
        // round-off, far below the certified errors.
        assert!(
            (a.value - b.value).norm() <= 1e-13 * (1.0 + a.value.norm()),
            "s = {s}: {} vs {}",
            a.value,
            b.value
        );
    }
}

#[test]
fn moduli_sampler_yields_semistable_points_a_thousand_times() {
    let pts = zeta::sample_semistable_moduli(1000, 0xA0D, 1.0).unwrap();
    assert_eq!(pts.len(), 1000);
    for p in &pts {
        // Fundamental-domain coordinates, in the semistable slice y <= 1...
        assert!(p.tau.re.abs() <= 0.5 + 1e-12);
        assert!(p.tau.norm() >= 1.0 - 1e-12);
        assert!(p.tau.im <= 1.0 + 1e-12);
        assert!(p.weight > 0.0);
        // ...and the lattice they parameterize really is semistable.
        assert!(stability::is_semistable(&p.lattice, 1e-9).unwrap(), "tau = {}", p.tau);
    }
}

#[test]
fn rank2_quadrature_and_monte_carlo_agree() {
    let s = Complex64::new(2.0, 0.0);
    let quad = zeta::rank2_zeta(s, &zeta::Rank2Config::default()).unwrap();
    let mc_cfg = zeta::Rank2Config {
        tol: 1e-3,
        method: zeta::Rank2Method::MonteCarlo { samples: 60_000, seed: 0xAB },
        t_max: None,
    };
    let mc = zeta::rank2_zeta(s, &mc_cfg).unwrap();
    let gap = (quad.value - mc.value).norm();
    assert!(
        gap <= quad.abs_error + mc.abs_error,
        "gap {gap:.3e} exceeds combined budget {:.3e}",
        quad.abs_error + mc.abs_error
    );
    assert_eq!(mc.method, "monte-carlo");
    assert_eq!(mc.sample_count, 60_000);
}

#[test]
fn special_values_of_the_scalar_oracles() {
    let z2 = zeta::riemann_zeta(Complex64::new(2.0, 0.0)).unwrap();
    assert!((z2.re - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-12);
    let g = zeta::gamma(Complex64::new(0.5, 0.0));
    assert!((g.re - std::f64::consts::PI.sqrt()).abs() < 1e-12);
    let xi2 = zeta::xi_reference(Complex64::new(2.0, 0.0)).unwrap();
    assert!((xi2.re - std::f64::consts::PI / 6.0).abs() < 1e-12);
}

#[test]
fn domain_volumes_are_pinned() {
    assert!((zeta::full_domain_volume() - std::f64::consts::PI / 3.0).abs() < 1e-12);
    let semi = zeta::moduli_volume_rank2();
    assert!((semi - (std::f64::consts::PI / 3.0 - 1.0)).abs() < 1e-9);
}

#[test]
fn pole_arguments_are_rejected_cleanly() {
    assert!(matches!(
        zeta::rank1_zeta(Complex64::new(1.0, 0.0), 1e-8),
        Err(latcoh::Error::PoleArgument(_))
    ));
    assert!(matches!(
        zeta::rank1_zeta(Complex64::new(0.0, 0.0), 1e-8),
        Err(latcoh::Error::PoleArgument(_))
    ));
    // Direct evaluation needs absolute convergence.
    assert!(zeta::rank1_zeta_direct(Complex64::new(0.8, 0.0), 1e-8).is_err());
}

#[test]
fn rejected_moduli_parameters_error_out() {
    // |Re tau| too large.
    assert!(zeta::moduli_point_rank2(Complex64::new(0.7, 1.2), 1.0).is_err());
    // Inside the unit circle.
    assert!(zeta::moduli_point_rank2(Complex64::new(0.1, 0.5), 1.0).is_err());
    // Unstable region t is fine, but nonpositive t is not.
    assert!(zeta::moduli_point_rank2(Complex64::new(0.0, 1.5), -1.0).is_err());
}

/// The hexagonal lattice minimizes the theta value among unit-covolume
/// rank-2 lattices (a classical extremal property), so the moduli point at
/// `tau = 1/2 + i·sqrt(3)/2` is a numerical touchstone for the integrand.
#[test]
fn hexagonal_point_minimizes_theta_over_the_domain() {
    let hex = zeta::moduli_point_rank2(Complex64::new(0.5, 3f64.sqrt() / 2.0), 1.0).unwrap();
    let hex_theta = latcoh::theta::h0(&hex.lattice, 1e-10).unwrap().value;
    let mut rng = ChaCha8Rng::seed_from_u64(0x4E9);
    let mut tested = 0;
    while tested < 25 {
        let x: f64 = rng.gen_range(-0.5..0.5);
        let y: f64 = rng.gen_range(0.86..1.0);
        if x * x + y * y < 1.0 {
            continue;
        }
        let p = zeta::moduli_point_rank2(Complex64::new(x, y), 1.0).unwrap();
        let v = latcoh::theta::h0(&p.lattice, 1e-10).unwrap().value;
        assert!(
            v >= hex_theta - 1e-9,
            "theta at ({x}, {y}) = {v} undercuts hexagonal {hex_theta}"
        );
        tested += 1;
    }
}
