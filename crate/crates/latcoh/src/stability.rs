//! Slope stability, maximal destabilizers, Harder–Narasimhan filtrations.
//!
//! The slope of a metrized `O_F`-lattice is `μ = deg/rank_{O_F}`, and `Λ` is
//! semistable when no saturated `O_F`-sublattice has larger slope.  The
//! maximal destabilizing sublattice (largest slope, then largest rank) is
//! found by a *provably complete* finite search: if `Λ₁ ⊆ Λ` is saturated of
//! `Z`-rank `k` with slope `≥ μ*`, then by Minkowski's second theorem its
//! successive minima satisfy
//!
//! ```text
//! λ_k(Λ₁) ≤ γ_k^{k/2} · covol(Λ₁) / λ₁(Λ)^{k-1},
//! covol(Λ₁) ≤ exp((r/2)·log|Δ_F| - r·μ*),      r = k/[F:Q],
//! ```
//!
//! and `Λ₁` is the saturation of `k` vectors achieving its minima — so every
//! candidate is the saturation of a `k`-subset of lattice vectors shorter
//! than an explicit radius.  The search processes ranks in increasing order
//! and tightens `μ*` as better slopes appear, which keeps the enumeration
//! small; `search_margin` multiplies the radius as an additional safety
//! factor, and the acceptance suite checks that doubling it changes nothing.
//!
//! The Harder–Narasimhan polygon is produced by recursively peeling the
//! maximal destabilizer and continuing on the orthogonally-projected
//! quotient.  A brute-force oracle (over `Q`, exhaustive subsets inside the
//! Minkowski radius, no slope tightening) provides an independent
//! cross-check at small rank.

use std::collections::HashSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{MetrizedLattice, Sublattice};
use crate::linalg::norm_sq;
use crate::lll::{lll_reduce, LLL_DELTA};
use crate::theta::enumerate_half;
use crate::zmat::{lex_cmp, IMat};

/// Default multiplier on the provable search radius.
pub const DEFAULT_MARGIN: f64 = 1.5;

/// Slopes closer than this are treated as equal when ranking destabilizers.
const SLOPE_TIE: f64 = 1e-12;

/// Polygon-level tie tolerance (slope collapse, endpoint checks).
const POLY_TIE: f64 = 1e-9;

/// Hard cap on the number of candidate subsets examined per rank.
const SUBSET_CAP: u64 = 5_000_000;

/// Enumeration cap for destabilizer candidate vectors.
const CAND_CAP: u64 = 20_000_000;

/// `γ_k^{k/2}` for `k = 1..8`: the exact Hermite constants
/// `γ = 1, 2/√3, 2^{1/3}, √2, 8^{1/5}, (64/3)^{1/6}, 64^{1/7}, 2`.
const GAMMA_KPOW: [f64; 9] = [
    1.0,
    1.0,
    1.154_700_538_379_251_5,
    std::f64::consts::SQRT_2,
    2.0,
    2.828_427_124_746_190_3,
    4.618_802_153_517_006,
    8.0,
    16.0,
];

/// A Harder–Narasimhan (canonical) polygon.
#[derive(Debug, Clone, Serialize)]
pub struct HNPolygon {
    /// `(rank over the base ring, cumulative degree)`, starting at `(0, 0)`.
    pub vertices: Vec<(usize, f64)>,
    /// Per-segment slopes, strictly decreasing.
    pub slopes: Vec<f64>,
    /// Label of the base field of the filtration.
    pub base_field: String,
}

impl HNPolygon {
    /// Build from vertices, collapsing slope ties at `1e-9` and validating.
    pub fn from_vertices(vertices: Vec<(usize, f64)>, base_field: &str) -> Result<HNPolygon> {
        if vertices.len() < 2 || vertices[0] != (0, 0.0) && vertices[0].0 != 0 {
            return Err(Error::InvalidParameter("polygon must start at (0, 0)".into()));
        }
        // Collapse interior vertices whose adjacent slopes agree.
        let mut vs: Vec<(usize, f64)> = vec![vertices[0]];
        for &v in &vertices[1..] {
            while vs.len() >= 2 {
                let a = vs[vs.len() - 2];
                let b = vs[vs.len() - 1];
                let s1 = (b.1 - a.1) / (b.0 - a.0) as f64;
                let s2 = (v.1 - b.1) / (v.0 - b.0) as f64;
                if (s1 - s2).abs() <= POLY_TIE {
                    vs.pop();
                } else {
                    break;
                }
            }
            vs.push(v);
        }
        let slopes: Vec<f64> = vs
            .windows(2)
            .map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0) as f64)
            .collect();
        let poly = HNPolygon { vertices: vs, slopes, base_field: base_field.to_string() };
        poly.validate()?;
        Ok(poly)
    }

    /// Total rank (abscissa of the last vertex).
    pub fn rank(&self) -> usize {
        self.vertices.last().unwrap().0
    }

    /// Total degree (ordinate of the last vertex).
    pub fn degree(&self) -> f64 {
        self.vertices.last().unwrap().1
    }

    pub fn is_single_segment(&self) -> bool {
        self.vertices.len() == 2
    }

    /// Piecewise-linear value at abscissa `r` (clamped to the span).
    pub fn value_at(&self, r: f64) -> f64 {
        let r = r.clamp(0.0, self.rank() as f64);
        for w in self.vertices.windows(2) {
            let (r0, d0) = (w[0].0 as f64, w[0].1);
            let (r1, d1) = (w[1].0 as f64, w[1].1);
            if r <= r1 + 1e-12 {
                if r1 == r0 {
                    return d1;
                }
                return d0 + (d1 - d0) * (r - r0) / (r1 - r0);
            }
        }
        self.degree()
    }

    /// Check the polygon invariants: ranks strictly increasing from 0,
    /// slopes strictly decreasing (post-collapse), concavity.
    pub fn validate(&self) -> Result<()> {
        if self.vertices.first().map(|v| v.0) != Some(0) {
            return Err(Error::InvalidParameter("polygon must start at rank 0".into()));
        }
        for w in self.vertices.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(Error::InvalidParameter("polygon ranks must increase".into()));
            }
        }
        for w in self.slopes.windows(2) {
            if w[1] >= w[0] - POLY_TIE * 1e-3 {
                return Err(Error::NonConvergent(format!(
                    "polygon slopes fail to decrease: {} then {}",
                    w[0], w[1]
                )));
            }
        }
        Ok(())
    }
}

/// Slope of a whole lattice (`deg/rank` over its own base ring).
pub fn slope(lat: &MetrizedLattice) -> f64 {
    lat.slope()
}

/// The maximal destabilizing sublattice: maximum slope, then maximum rank,
/// then lexicographically smallest Hermite form.  Returns the full lattice
/// itself when `Λ` is semistable.
pub fn max_slope_sublattice(lat: &MetrizedLattice, search_margin: f64) -> Result<Sublattice> {
    if !(search_margin >= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "search margin {search_margin} must be ≥ 1"
        )));
    }
    let n_z = lat.z_rank();
    let d = lat.field().degree();
    let n_of = lat.of_rank();
    let full = lat.sublattice(&IMat::identity(n_z))?;
    if n_of == 1 {
        return Ok(full);
    }
    let lam1 = shortest_sq(lat)?.sqrt();
    let log_disc = lat.field().log_abs_disc();
    let mut best = full;
    let mut mu_star = lat.slope();
    let mut seen: HashSet<IMat> = HashSet::new();
    for r in 1..n_of {
        let k = r * d;
        // Provable covering radius for rank-r candidates of slope ≥ μ*.
        let ln_radius = GAMMA_KPOW[k].ln() + 0.5 * r as f64 * log_disc
            - r as f64 * (mu_star - 1e-9)
            - (k - 1) as f64 * lam1.ln()
            + search_margin.ln();
        let q_bound = (2.0 * ln_radius).exp();
        let cands = primitive_candidates(lat, q_bound, CAND_CAP)?;
        for gens in subsets(&cands, k)? {
            let sub = match lat.sublattice(&gens) {
                Ok(s) => s,
                Err(Error::NotModuleStable(_)) | Err(Error::EmptySublattice) => continue,
                Err(e) => return Err(e),
            };
            if sub.rank_z != k || !seen.insert(sub.generators.hermite_form()?) {
                continue;
            }
            mu_star = mu_star.max(sub.slope);
            if prefer(&sub, &best)? {
                best = sub;
            }
        }
    }
    Ok(best)
}

/// `true` iff no sublattice slope exceeds `μ(Λ) + tol`.
pub fn is_semistable(lat: &MetrizedLattice, tol: f64) -> Result<bool> {
    if !(tol > 0.0) {
        return Err(Error::NonPositiveTolerance(tol));
    }
    let best = max_slope_sublattice(lat, DEFAULT_MARGIN)?;
    Ok(best.slope <= lat.slope() + tol)
}

/// Harder–Narasimhan filtration of `Λ` over its own base ring, returned as
/// the canonical polygon.
pub fn hn_filtration(lat: &MetrizedLattice) -> Result<HNPolygon> {
    hn_filtration_with_margin(lat, DEFAULT_MARGIN)
}

pub fn hn_filtration_with_margin(lat: &MetrizedLattice, margin: f64) -> Result<HNPolygon> {
    let mut vertices = vec![(0usize, 0.0f64)];
    let mut current = lat.clone();
    let (mut cum_rank, mut cum_deg) = (0usize, 0.0f64);
    loop {
        let step = max_slope_sublattice(&current, margin)?;
        cum_rank += step.of_rank;
        cum_deg += step.degree;
        vertices.push((cum_rank, cum_deg));
        if step.of_rank == current.of_rank() {
            break;
        }
        current = current.quotient_by(&step)?;
    }
    HNPolygon::from_vertices(vertices, &lat.field().label())
}

/// The canonical polygon over `Q`: restrict scalars, then filter.
pub fn canonical_polygon_over_q(lat: &MetrizedLattice) -> Result<HNPolygon> {
    hn_filtration(&lat.restrict_scalars())
}

/// `true` iff `p` lies on or below `g` at every integer abscissa.  The two
/// polygons must share endpoints (within `1e-9`).
pub fn polygon_leq(p: &HNPolygon, g: &HNPolygon) -> Result<bool> {
    if p.rank() != g.rank() || (p.degree() - g.degree()).abs() > POLY_TIE {
        return Err(Error::InvalidParameter(
            "polygon comparison requires equal endpoints".into(),
        ));
    }
    for k in 0..=p.rank() {
        if p.value_at(k as f64) > g.value_at(k as f64) + POLY_TIE {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Deterministic destabilizer preference: bigger slope (beyond ties), then
/// bigger rank, then lexicographically smaller Hermite form.
fn prefer(a: &Sublattice, b: &Sublattice) -> Result<bool> {
    if a.slope > b.slope + SLOPE_TIE {
        return Ok(true);
    }
    if a.slope < b.slope - SLOPE_TIE {
        return Ok(false);
    }
    if a.of_rank != b.of_rank {
        return Ok(a.of_rank > b.of_rank);
    }
    Ok(lex_cmp(&a.generators.hermite_form()?, &b.generators.hermite_form()?)
        == std::cmp::Ordering::Less)
}

/// Squared length of a shortest nonzero vector.
fn shortest_sq(lat: &MetrizedLattice) -> Result<f64> {
    let red = lll_reduce(lat.basis(), LLL_DELTA)?;
    let bound = (0..red.basis.rows())
        .map(|i| norm_sq(red.basis.row(i)))
        .fold(f64::INFINITY, f64::min);
    let mut best = f64::INFINITY;
    enumerate_half(lat.basis(), bound * (1.0 + 1e-9), CAND_CAP, &mut |_, q| {
        if q < best {
            best = q;
        }
    })?;
    Ok(best)
}

/// Primitive candidate vectors with `Q ≤ q_bound`, deduplicated up to sign
/// and scaling, sorted by `(Q, coordinates)`.
fn primitive_candidates(
    lat: &MetrizedLattice,
    q_bound: f64,
    cap: u64,
) -> Result<Vec<Vec<i64>>> {
    let mut set: HashSet<Vec<i64>> = HashSet::new();
    enumerate_half(lat.basis(), q_bound, cap, &mut |coords, _| {
        if let Some(p) = crate::zmat::primitive(coords) {
            set.insert(p);
        }
    })?;
    let basis = lat.basis();
    let mut out: Vec<(f64, Vec<i64>)> = set
        .into_iter()
        .map(|c| {
            let mut q = 0.0;
            for t in 0..basis.cols() {
                let mut x = 0.0;
                for (i, &ci) in c.iter().enumerate() {
                    x += ci as f64 * basis.at(i, t);
                }
                q += x * x;
            }
            (q, c)
        })
        .collect();
    out.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
    Ok(out.into_iter().map(|(_, c)| c).collect())
}

/// All `k`-subsets of the candidate list as generator matrices, in
/// lexicographic index order.  Errors out if the count would be excessive.
fn subsets(cands: &[Vec<i64>], k: usize) -> Result<Vec<IMat>> {
    let l = cands.len();
    if k > l {
        return Ok(Vec::new());
    }
    // Subset count guard: C(l, k) without overflow.
    let mut count: f64 = 1.0;
    for i in 0..k {
        count *= (l - i) as f64 / (i + 1) as f64;
    }
    if count > SUBSET_CAP as f64 {
        return Err(Error::EnumerationTooLarge { count: count as u64, cap: SUBSET_CAP });
    }
    let mut out = Vec::with_capacity(count as usize);
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        let rows: Vec<Vec<i64>> = idx.iter().map(|&i| cands[i].clone()).collect();
        out.push(IMat::from_rows(&rows)?);
        // Advance combination.
        let mut i = k;
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            if idx[i] != i + l - k {
                idx[i] += 1;
                for j in i + 1..k {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Brute-force oracle for canonical polygons over `Q`.
///
/// Independent of the production search: computes the successive minima
/// numerically, enumerates ALL saturated sublattices generated by subsets of
/// vectors inside the Minkowski-second-theorem radius (times 4 on `Q`), takes
/// the maximal degree at every rank, and returns the concave upper hull.
/// No slope tightening, no early exits — quadratic in the candidate count,
/// usable only at small rank, which is the point of an oracle.
pub mod reference {
    use super::*;

    /// Max degree of a saturated rank-`k` sublattice, for each `k`, then the
    /// concave hull.  The input is restricted to `Q` first.
    pub fn canonical_polygon(lat: &MetrizedLattice) -> Result<HNPolygon> {
        let lat = lat.restrict_scalars();
        let n = lat.z_rank();
        let min_sq = successive_minima_sq(&lat)?;
        let mut points: Vec<(usize, f64)> = vec![(0, 0.0)];
        for k in 1..n {
            let lam_prod: f64 = min_sq[..k].iter().map(|q| q.sqrt()).product();
            let len_bound = GAMMA_KPOW[k] * lam_prod / min_sq[0].sqrt().powi(k as i32 - 1);
            let q_bound = 4.0 * len_bound * len_bound;
            let cands = primitive_candidates(&lat, q_bound, CAND_CAP)?;
            let mut bestdeg = f64::NEG_INFINITY;
            let mut seen: HashSet<IMat> = HashSet::new();
            for gens in subsets(&cands, k)? {
                let sub = match lat.sublattice(&gens) {
                    Ok(s) => s,
                    Err(Error::EmptySublattice) => continue,
                    Err(e) => return Err(e),
                };
                if sub.rank_z != k || !seen.insert(sub.generators.hermite_form()?) {
                    continue;
                }
                if sub.degree > bestdeg {
                    bestdeg = sub.degree;
                }
            }
            points.push((k, bestdeg));
        }
        points.push((n, lat.degree()));
        HNPolygon::from_vertices(upper_hull(&points), "Q")
    }

    /// Successive minima (squared lengths) of the realized lattice, greedily
    /// from the sorted short-vector list.
    pub fn successive_minima_sq(lat: &MetrizedLattice) -> Result<Vec<f64>> {
        let n = lat.z_rank();
        let red = lll_reduce(lat.basis(), LLL_DELTA)?;
        let bound = (0..n).map(|i| norm_sq(red.basis.row(i))).fold(0.0, f64::max);
        let mut all: Vec<(f64, Vec<i64>)> = Vec::new();
        enumerate_half(lat.basis(), bound * (1.0 + 1e-9), CAND_CAP, &mut |c, q| {
            all.push((q, c.to_vec()));
        })?;
        all.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
        let mut picked: Vec<Vec<i64>> = Vec::new();
        let mut minima = Vec::new();
        for (q, c) in all {
            let mut rows = picked.clone();
            rows.push(c.clone());
            let rank = crate::zmat::saturate(&IMat::from_rows(&rows)?)?.rank;
            if rank == picked.len() + 1 {
                picked.push(c);
                minima.push(q);
                if picked.len() == n {
                    break;
                }
            }
        }
        if minima.len() != n {
            return Err(Error::NonConvergent(
                "failed to realize all successive minima inside the reduced-row bound".into(),
            ));
        }
        Ok(minima)
    }

    /// Concave upper hull of points with strictly increasing abscissae.
    fn upper_hull(points: &[(usize, f64)]) -> Vec<(usize, f64)> {
        let mut hull: Vec<(usize, f64)> = Vec::new();
        for &p in points {
            while hull.len() >= 2 {
                let a = hull[hull.len() - 2];
                let b = hull[hull.len() - 1];
                let s1 = (b.1 - a.1) / (b.0 - a.0) as f64;
                let s2 = (p.1 - b.1) / (p.0 - b.0) as f64;
                // Concave hull: slopes must strictly decrease.
                if s2 >= s1 - 1e-12 {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(p);
        }
        hull
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::NumberField;
    use rand::{Rng, SeedableRng};

    fn qq() -> NumberField {
        NumberField::rational()
    }

    #[test]
    fn slope_examples() {
        let z2 = MetrizedLattice::standard(&qq(), 2);
        assert!(slope(&z2).abs() < 1e-12);
        let d = MetrizedLattice::diag(&qq(), &[2.0, 0.5]).unwrap();
        let sub = d.sublattice(&IMat::from_rows(&[vec![0, 1]]).unwrap()).unwrap();
        assert!((sub.slope - 2f64.ln()).abs() < 1e-12);
        let oi = MetrizedLattice::standard(&NumberField::quadratic(-1).unwrap(), 1);
        assert!(slope(&oi).abs() < 1e-10);
    }

    #[test]
    fn destabilizer_of_skew_diagonal() {
        let d = MetrizedLattice::diag(&qq(), &[2.0, 0.5]).unwrap();
        let best = max_slope_sublattice(&d, DEFAULT_MARGIN).unwrap();
        assert_eq!(best.of_rank, 1);
        assert!((best.slope - 2f64.ln()).abs() < 1e-10);
        assert_eq!(best.generators.to_rows(), vec![vec![0, 1]]);
        // Semistable lattice returns itself.
        let z2 = MetrizedLattice::standard(&qq(), 2);
        let whole = max_slope_sublattice(&z2, DEFAULT_MARGIN).unwrap();
        assert_eq!(whole.of_rank, 2);
        assert!(whole.slope.abs() < 1e-12);
    }

    #[test]
    fn destabilizer_of_rank_three_diagonal() {
        let d = MetrizedLattice::diag(&qq(), &[0.5, 1.0, 2.0]).unwrap();
        let best = max_slope_sublattice(&d, DEFAULT_MARGIN).unwrap();
        assert_eq!(best.of_rank, 1);
        assert!((best.slope - 2f64.ln()).abs() < 1e-10);
        assert_eq!(best.generators.to_rows(), vec![vec![1, 0, 0]]);
    }

    #[test]
    fn semistability_verdicts() {
        for n in 1..=4 {
            assert!(is_semistable(&MetrizedLattice::standard(&qq(), n), 1e-9).unwrap());
        }
        let d = MetrizedLattice::diag(&qq(), &[2.0, 0.5]).unwrap();
        assert!(!is_semistable(&d, 1e-9).unwrap());
        // Hexagonal lattice rescaled to covolume 1 is semistable.
        let s = (2.0 / 3f64.sqrt()).sqrt(); // covol of [(1,0),(1/2,√3/2)] is √3/2
        let hex = MetrizedLattice::from_basis(
            &qq(),
            crate::linalg::Mat::from_rows(&[
                vec![s, 0.0],
                vec![0.5 * s, 0.75f64.sqrt() * s],
            ])
            .unwrap(),
        )
        .unwrap();
        assert!((hex.covolume() - 1.0).abs() < 1e-12);
        assert!(is_semistable(&hex, 1e-9).unwrap());
    }

    #[test]
    fn hn_polygon_examples() {
        let z2 = MetrizedLattice::standard(&qq(), 2);
        let p = hn_filtration(&z2).unwrap();
        assert!(p.is_single_segment());
        assert_eq!(p.vertices[1].0, 2);
        assert!(p.degree().abs() < 1e-10);

        let d = MetrizedLattice::diag(&qq(), &[2.0, 0.5]).unwrap();
        let p = hn_filtration(&d).unwrap();
        assert_eq!(p.vertices.len(), 3);
        assert_eq!(p.vertices[1].0, 1);
        assert!((p.vertices[1].1 - 2f64.ln()).abs() < 1e-9);
        assert!(p.vertices[2].1.abs() < 1e-9);

        let t = MetrizedLattice::diag(&qq(), &[0.25, 1.0, 4.0]).unwrap();
        let p = hn_filtration(&t).unwrap();
        let want = [(0usize, 0.0), (1, 4f64.ln()), (2, 4f64.ln()), (3, 0.0)];
        assert_eq!(p.vertices.len(), 4, "{:?}", p.vertices);
        for (got, want) in p.vertices.iter().zip(want.iter()) {
            assert_eq!(got.0, want.0);
            assert!((got.1 - want.1).abs() < 1e-9, "{:?}", p.vertices);
        }
    }

    #[test]
    fn canonical_polygons_of_quadratic_rings() {
        // O_{Q(i)}: restricted rank-1 max slope ties the chord — flat polygon.
        let oi = MetrizedLattice::standard(&NumberField::quadratic(-1).unwrap(), 1);
        let p = canonical_polygon_over_q(&oi).unwrap();
        assert!(p.is_single_segment(), "{:?}", p.vertices);
        assert_eq!(p.rank(), 2);
        assert!((p.degree() + 2f64.ln()).abs() < 1e-10);

        // O_{Q(√5)}: genuinely unstable over Q.
        let o5 = MetrizedLattice::standard(&NumberField::quadratic(5).unwrap(), 1);
        let p = canonical_polygon_over_q(&o5).unwrap();
        assert_eq!(p.vertices.len(), 3, "{:?}", p.vertices);
        assert!((p.vertices[1].1 + 0.5 * 2f64.ln()).abs() < 1e-9, "{:?}", p.vertices);
        assert!((p.degree() + 0.5 * 5f64.ln()).abs() < 1e-10);
    }

    #[test]
    fn polygon_comparison() {
        let d = MetrizedLattice::diag(&qq(), &[2.0, 0.5]).unwrap();
        let p = hn_filtration(&d).unwrap();
        assert!(polygon_leq(&p, &p).unwrap());
        let flat = HNPolygon::from_vertices(vec![(0, 0.0), (2, 0.0)], "Q").unwrap();
        assert!(polygon_leq(&flat, &p).unwrap());
        assert!(!polygon_leq(&p, &flat).unwrap());
        let other = HNPolygon::from_vertices(vec![(0, 0.0), (3, 0.0)], "Q").unwrap();
        assert!(polygon_leq(&p, &other).is_err());
    }

    #[test]
    fn twist_equivariance_of_slopes() {
        let lat = MetrizedLattice::diag(&qq(), &[0.5, 1.0, 3.0]).unwrap();
        let base = hn_filtration(&lat).unwrap();
        let c = 1.7;
        let scaled = hn_filtration(&lat.scale(c).unwrap()).unwrap();
        assert_eq!(base.slopes.len(), scaled.slopes.len());
        for (a, b) in base.slopes.iter().zip(scaled.slopes.iter()) {
            assert!((b - (a - c.ln())).abs() < 1e-9);
        }
        // Quadratic: slope shift is -d·log c per O_F-rank.
        let f = NumberField::quadratic(5).unwrap();
        let lat = MetrizedLattice::random(&f, 2, 8, 0.5, Some(1.2)).unwrap();
        let base = hn_filtration(&lat).unwrap();
        let scaled = hn_filtration(&lat.scale(c).unwrap()).unwrap();
        assert_eq!(base.slopes.len(), scaled.slopes.len());
        for (a, b) in base.slopes.iter().zip(scaled.slopes.iter()) {
            assert!((b - (a - 2.0 * c.ln())).abs() < 1e-9);
        }
    }

    #[test]
    fn duality_preserves_semistability() {
        let fields = [
            NumberField::rational(),
            NumberField::quadratic(-1).unwrap(),
            NumberField::quadratic(5).unwrap(),
        ];
        for f in &fields {
            for seed in 0..4u64 {
                let lat = MetrizedLattice::random(f, 2, seed, 0.5, Some(0.4)).unwrap();
                let a = is_semistable(&lat, 1e-9).unwrap();
                let b = is_semistable(&lat.omega_twist().unwrap(), 1e-9).unwrap();
                assert_eq!(a, b, "{} seed {seed}", f.label());
            }
        }
    }

    #[test]
    fn oracle_agrees_on_random_integer_lattices() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(77);
        let mut done = 0;
        while done < 12 {
            let n = 2 + (done % 2);
            let rows: Vec<Vec<f64>> = (0..n)
                .map(|_| (0..n).map(|_| rng.gen_range(-2i64..=2) as f64).collect())
                .collect();
            let m = crate::linalg::Mat::from_rows(&rows).unwrap();
            if m.det().abs() < 0.5 {
                continue;
            }
            let lat = MetrizedLattice::from_basis(&qq(), m).unwrap();
            let fast = hn_filtration(&lat).unwrap();
            let slow = reference::canonical_polygon(&lat).unwrap();
            assert_eq!(fast.vertices.len(), slow.vertices.len(), "lattice {done}");
            for (a, b) in fast.vertices.iter().zip(slow.vertices.iter()) {
                assert_eq!(a.0, b.0);
                assert!((a.1 - b.1).abs() < 1e-9, "lattice {done}: {:?} vs {:?}", fast.vertices, slow.vertices);
            }
            // Doubling the margin must change nothing.
            let wide = hn_filtration_with_margin(&lat, 2.0 * DEFAULT_MARGIN).unwrap();
            assert_eq!(fast.vertices.len(), wide.vertices.len());
            for (a, b) in fast.vertices.iter().zip(wide.vertices.iter()) {
                assert!((a.1 - b.1).abs() < 1e-12);
            }
            done += 1;
        }
    }

    #[test]
    fn margin_below_one_is_rejected() {
        let z2 = MetrizedLattice::standard(&qq(), 2);
        assert!(max_slope_sublattice(&z2, 0.5).is_err());
    }
}
