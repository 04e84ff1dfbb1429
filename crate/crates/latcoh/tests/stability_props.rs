//! Properties of slopes, maximal destabilizers, and Harder–Narasimhan
//! polygons on random integer and metrized lattices.

use latcoh::field::NumberField;
use latcoh::lattice::MetrizedLattice;
use latcoh::linalg::Mat;
use latcoh::stability;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn integer_lattices(count: usize, seed: u64) -> Vec<MetrizedLattice> {
    let q = NumberField::rational();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let n = 1 + out.len() % 3;
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..n).map(|_| rng.gen_range(-3i64..=3) as f64).collect())
            .collect();
        if let Ok(lat) = MetrizedLattice::from_basis(&q, Mat::from_rows(&rows).unwrap()) {
            out.push(lat);
        }
    }
    out
}

#[test]
fn hn_polygon_is_concave_with_exact_endpoints() {
    for lat in integer_lattices(30, 0x51AB1E) {
        let poly = stability::hn_filtration(&lat).unwrap();
        poly.validate().unwrap();
        let (k0, v0) = poly.vertices[0];
        assert_eq!((k0, v0), (0, 0.0));
        let (kn, vn) = *poly.vertices.last().unwrap();
        assert_eq!(kn, lat.of_rank());
        assert!(
            (vn - lat.degree()).abs() < 1e-9,
            "{}: endpoint {} vs degree {}",
            lat.label(),
            vn,
            lat.degree()
        );
        // Concavity: slopes strictly decrease along the polygon.
        for w in poly.slopes.windows(2) {
            assert!(w[0] > w[1] - 1e-12, "slopes not decreasing: {:?}", poly.slopes);
        }
    }
}

#[test]
fn first_slope_is_the_maximal_subobject_slope() {
    for lat in integer_lattices(20, 0x51AB2E) {
        let poly = stability::hn_filtration(&lat).unwrap();
        let best = stability::max_slope_sublattice(&lat, 1.5).unwrap();
        assert!(
            (poly.slopes[0] - best.slope).abs() < 1e-9,
            "{}: polygon slope {} vs max slope {}",
            lat.label(),
            poly.slopes[0],
            best.slope
        );
        // The maximal subobject never has smaller slope than the lattice.
        assert!(best.slope >= lat.slope() - 1e-12);
    }
}

#[test]
fn semistable_iff_single_segment() {
    let mut single = 0usize;
    for lat in integer_lattices(30, 0x51AB3E) {
        let semi = stability::is_semistable(&lat, 1e-9).unwrap();
        let poly = stability::hn_filtration(&lat).unwrap();
        assert_eq!(
            semi,
            poly.is_single_segment(),
            "{}: verdict {} vs polygon {:?}",
            lat.label(),
            semi,
            poly.vertices
        );
        single += poly.is_single_segment() as usize;
    }
    // The corpus must exercise both branches.
    assert!(single > 0 && single < 30, "degenerate corpus: {single} of 30 semistable");
}

#[test]
fn scaling_translates_the_polygon_linearly() {
    let f = NumberField::quadratic(5).unwrap();
    for k in 0..6u64 {
        let lat = MetrizedLattice::random(&f, 2, 0xBE7A + k, 0.8, Some(1.0)).unwrap();
        let poly = stability::hn_filtration(&lat).unwrap();
        let c = 1.0 + 0.25 * (k as f64 + 1.0);
        let scaled_poly = stability::hn_filtration(&lat.scale(c).unwrap()).unwrap();
        assert_eq!(poly.vertices.len(), scaled_poly.vertices.len());
        let d = lat.field().degree() as f64;
        for ((k1, v1), (k2, v2)) in poly.vertices.iter().zip(&scaled_poly.vertices) {
            assert_eq!(k1, k2);
            // A rank-k subobject loses k·d·log c of degree under scaling.
            let expected = v1 - (*k1 as f64) * d * c.ln();
            assert!(
                (v2 - expected).abs() < 1e-9,
                "vertex {k1}: {v2} vs {expected}"
            );
        }
    }
}

#[test]
fn doubling_the_margin_does_not_change_the_polygon() {
    for lat in integer_lattices(12, 0x51AB4E) {
        let a = stability::hn_filtration_with_margin(&lat, 1.5).unwrap();
        let b = stability::hn_filtration_with_margin(&lat, 3.0).unwrap();
        assert_eq!(a.vertices.len(), b.vertices.len());
        for ((ka, va), (kb, vb)) in a.vertices.iter().zip(&b.vertices) {
            assert_eq!(ka, kb);
            assert!((va - vb).abs() < 1e-9);
        }
    }
}

#[test]
fn restriction_polygon_dominates_the_field_polygon() {
    // An O_F-subobject of rank k restricts to a Z-sublattice of rank k·d and
    // degree v - (k/2)·log Δ (the discriminant normalization drops over Q),
    // so the polygon over Q — a hull over strictly more subobjects — lies on
    // or above those shifted vertices.
    let f = NumberField::quadratic(-1).unwrap();
    let d = f.degree() as f64;
    let log_disc = f.log_abs_disc();
    for k in 0..6u64 {
        let lat = MetrizedLattice::random(&f, 2, 0xC0DE + k, 0.7, Some(0.5)).unwrap();
        let over_f = stability::hn_filtration(&lat).unwrap();
        let over_q = stability::canonical_polygon_over_q(&lat).unwrap();
        assert_eq!(over_q.rank(), lat.z_rank());
        for (r, v) in &over_f.vertices {
            let restricted = v - 0.5 * (*r as f64) * log_disc;
            let q_val = over_q.value_at(*r as f64 * d);
            assert!(
                q_val >= restricted - 1e-9,
                "{}: Q-polygon {} below restricted F-vertex ({r}, {restricted})",
                lat.label(),
                q_val
            );
        }
    }
}
