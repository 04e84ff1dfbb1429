//! Harder–Narasimhan polygons: the canonical destabilizing filtration of a
//! metrized lattice, computed by certified short-vector search.
//!
//! The polygon is the concave hull of `(rank, degree)` over all sublattices;
//! its vertices are the HN filtration steps and its slopes strictly
//! decrease.  A lattice is semistable exactly when the polygon is a single
//! segment.

use latcoh::field::NumberField;
use latcoh::lattice::MetrizedLattice;
use latcoh::linalg::Mat;
use latcoh::stability;

fn show(label: &str, lat: &MetrizedLattice) {
    let poly = stability::hn_filtration(lat).expect("filtration");
    let verts: Vec<String> = poly
        .vertices
        .iter()
        .map(|(r, d)| format!("({r}, {d:.4})"))
        .collect();
    let slopes: Vec<String> = poly.slopes.iter().map(|s| format!("{s:.4}")).collect();
    println!("{label}");
    println!("  vertices  {}", verts.join(" -> "));
    println!("  slopes    {}", slopes.join(" > "));
    println!(
        "  semistable: {}",
        stability::is_semistable(lat, 1e-9).unwrap()
    );
}

fn main() {
    let q = NumberField::rational();

    // A visibly unstable diagonal lattice: the short direction destabilizes.
    let diag = MetrizedLattice::diag(&q, &[2.0, 0.5, 0.25]).unwrap();
    show("diag(2, 1/2, 1/4) over Q", &diag);
    println!();

    // A dense integer lattice; the polygon comes out of the same search and
    // matches the exhaustive rank-by-rank oracle.
    let m = Mat::from_rows(&[vec![2.0, 1.0, 0.0], vec![-1.0, 1.0, 3.0], vec![0.0, 2.0, -1.0]])
        .unwrap();
    let dense = MetrizedLattice::from_basis(&q, m).unwrap();
    show("integer lattice with entries in [-3, 3]", &dense);
    let oracle = stability::reference::canonical_polygon(&dense).unwrap();
    println!(
        "  oracle    {}",
        oracle
            .vertices
            .iter()
            .map(|(r, d)| format!("({r}, {d:.4})"))
            .collect::<Vec<_>>()
            .join(" -> ")
    );
    println!();

    // Over a real quadratic field the filtration runs over O_F-submodules;
    // restriction of scalars refines the picture over Q.
    let f5 = NumberField::quadratic(5).unwrap();
    let lat = MetrizedLattice::random(&f5, 2, 7, 1.2, Some(0.5)).unwrap();
    show(&format!("random rank-2 lattice over {}", f5.label()), &lat);
    let over_q = stability::canonical_polygon_over_q(&lat).unwrap();
    println!(
        "  over Q    {}",
        over_q
            .vertices
            .iter()
            .map(|(r, d)| format!("({r}, {d:.4})"))
            .collect::<Vec<_>>()
            .join(" -> ")
    );

    // The maximal destabilizer behind the first vertex.
    let best = stability::max_slope_sublattice(&lat, 1.5).unwrap();
    println!();
    println!(
        "maximal subobject of the last lattice: O_F-rank {}, slope {:.4} (ambient {:.4})",
        best.of_rank,
        best.slope,
        lat.slope()
    );
}
