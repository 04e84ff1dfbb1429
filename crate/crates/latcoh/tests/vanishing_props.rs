//! Properties of the effective vanishing bounds, the scaling decay probes,
//! and the extremal moduli statistics.

use latcoh::field::NumberField;
use latcoh::lattice::MetrizedLattice;
use latcoh::{stability, theta, vanishing};

/// A random semistable lattice of the requested degree, by rejection.
fn semistable(field: &NumberField, of_rank: usize, seed0: u64, degree: f64) -> MetrizedLattice {
    for attempt in 0..300u64 {
        let lat = MetrizedLattice::random(field, of_rank, seed0 + attempt, 0.6, Some(degree))
            .unwrap();
        if stability::is_semistable(&lat, 1e-9).unwrap() {
            return lat;
        }
    }
    panic!("no semistable draw in 300 attempts");
}

#[test]
fn h0_bound_certifies_the_actual_theta_value() {
    let q = NumberField::rational();
    let qi = NumberField::quadratic(-1).unwrap();
    for (field, n) in [(&q, 1usize), (&q, 2), (&q, 3), (&qi, 1), (&qi, 2)] {
        let d = field.degree() as f64;
        let nz = (n * field.degree()) as f64;
        let base = semistable(field, n, 0xFA3E, 0.0);
        // Push the degree well under the threshold -d·n·ln(n)/2, step by step.
        let threshold = -d * n as f64 * (n as f64).ln() / 2.0;
        for j in 0..4 {
            let target = threshold - 0.4 - 0.6 * j as f64;
            let lat = base.scale(((base.degree() - target) / nz).exp()).unwrap();
            let bound = vanishing::effective_h0_bound(&lat, true)
                .unwrap()
                .expect("hypothesis holds by construction");
            let tv = theta::h0(&lat, 1e-13).unwrap();
            assert!(
                tv.h0 <= bound + tv.h0_error + 1e-12,
                "{}: h0 {} exceeds bound {}",
                lat.label(),
                tv.h0,
                bound
            );
        }
    }
}

#[test]
fn h1_bound_mirrors_under_duality() {
    let q = NumberField::rational();
    let base = semistable(&q, 2, 0xFA4E, 0.0);
    let nz = base.z_rank() as f64;
    let threshold = 2f64.ln(); // d·n·ln(n)/2 with d = 1, n = 2; log disc = 0.
    for j in 0..4 {
        let target = threshold + 0.4 + 0.6 * j as f64;
        let lat = base.scale(((base.degree() - target) / nz).exp()).unwrap();
        let bound = vanishing::effective_h1_bound(&lat, true)
            .unwrap()
            .expect("hypothesis holds by construction");
        let tv = theta::h1(&lat, 1e-13).unwrap();
        assert!(
            tv.h0 <= bound + tv.h0_error + 1e-12,
            "h1 {} exceeds bound {}",
            tv.h0,
            bound
        );
    }
}

#[test]
fn bounds_return_none_outside_their_hypotheses() {
    let q = NumberField::rational();
    // Degree 0 on Z^2 satisfies neither threshold.
    let lat = MetrizedLattice::standard(&q, 2);
    assert!(vanishing::effective_h0_bound(&lat, true).unwrap().is_none());
    assert!(vanishing::effective_h1_bound(&lat, true).unwrap().is_none());
    // Unstable input without the assumption is a hypothesis violation.
    let skew = MetrizedLattice::diag(&q, &[4.0, 0.25]).unwrap();
    assert!(matches!(
        vanishing::effective_h0_bound(&skew, false),
        Err(latcoh::Error::HypothesisViolated(_))
    ));
}

#[test]
fn decay_probe_converges_with_a_monotone_tail() {
    let q = NumberField::rational();
    let f5 = NumberField::quadratic(5).unwrap();
    for (field, n, seed) in [(&q, 2usize, 0xFA5E), (&q, 3, 0xFA6E), (&f5, 1, 0xFA7E)] {
        let lat = semistable(field, n, seed as u64, 0.0);
        for twist in [0.5, 1.0, 2.0] {
            let probe = vanishing::scaling_decay_probe(&lat, twist, 30, 1e-12).unwrap();
            assert!(probe.converged, "twist {twist} failed to converge");
            let tail = probe.monotone_tail_start.expect("eventually monotone");
            let h1s: Vec<f64> = probe.steps.iter().map(|s| s.h1).collect();
            for w in h1s[tail..].windows(2) {
                assert!(w[1] <= w[0] + 1e-15);
            }
            assert!(*h1s.last().unwrap() < 1e-12);
            // Once the h1 bound applies it certifies every later step.
            for (step, bound) in probe.steps.iter().zip(&probe.bound_values) {
                if let Some(b) = bound {
                    assert!(step.h1 <= b + step.certified_error + 1e-12);
                }
            }
        }
    }
}

#[test]
fn probe_rejects_nonpositive_twists() {
    let q = NumberField::rational();
    let lat = MetrizedLattice::standard(&q, 1);
    assert!(vanishing::scaling_decay_probe(&lat, 0.0, 5, 1e-12).is_err());
    assert!(vanishing::scaling_decay_probe(&lat, -1.0, 5, 1e-12).is_err());
}

#[test]
fn extremal_estimates_are_deterministic_and_duality_tight() {
    let q = NumberField::rational();
    let a = vanishing::extremal_values_estimate(&q, 2, 0.8, 10, 0x0DD).unwrap();
    let b = vanishing::extremal_values_estimate(&q, 2, 0.8, 10, 0x0DD).unwrap();
    assert_eq!(a.min_h0.to_bits(), b.min_h0.to_bits());
    assert_eq!(a.max_h0.to_bits(), b.max_h0.to_bits());
    assert_eq!(a.sample_count, 10);
    assert!(a.delta_hat >= 0.0);
    let (rmax, rmin) = vanishing::extremal_duality_residual(&a).unwrap();
    assert!(rmax < 1e-8 && rmin < 1e-8, "residuals {rmax:.3e}, {rmin:.3e}");
}
