//! Effective vanishing bounds, positivity probes, and sampled extrema of
//! `h⁰` on strata of semistable lattices.
//!
//! For a semistable metrized `O_F`-lattice of `O_F`-rank `n` over a field of
//! degree `d = [F:Q]`, with `C = 3^{nd}/(1 - log 3/π)`:
//!
//! ```text
//! deg(Λ) ≤ -d·(n log n)/2            ⟹  h⁰(Λ) ≤ C·exp(-π d · e^{-2 deg(Λ)/(n d)}),
//! deg(Λ) ≥  d·(n log n)/2 + n log Δ  ⟹  h¹(Λ) ≤ C·exp(-π d · |Δ|^{-2/d} · e^{ 2 deg(Λ)/(n d)}).
//! ```
//!
//! Positivity of a rank-1 twist is probed through its analytic shadow: the
//! twist acts as the uniform metric scaling `e^{-t/d}` per step (degree gain
//! `n·t`), and positivity is equivalent to `h¹(twistᵐ ⊗ Λ) → 0`.  The
//! `scaling_decay_probe` traces that sequence together with the effective
//! bound wherever the theorem applies.
//!
//! Extremal values `m(n,d) ≤ h⁰ ≤ M(n,d)` on the stratum of semistable
//! lattices of fixed rank and degree are estimated by seeded rejection
//! sampling; the duality relation `M(n, n log Δ - d) = M(n,d) + ((n/2)log Δ - d)`
//! is an exact samplewise consequence of Riemann-Roch and is checked to
//! numerical precision, not merely statistically.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::NumberField;
use crate::lattice::MetrizedLattice;
use crate::stability::is_semistable;
use crate::theta;

/// Stability tolerance used when the hypotheses are machine-checked.
pub const SEMISTABLE_TOL: f64 = 1e-9;

/// `3^{nd} / (1 - log 3 / π)`.
pub fn theorem_constant(n: usize, d: usize) -> f64 {
    3f64.powi((n * d) as i32) / (1.0 - 3f64.ln() / PI)
}

/// Right-hand side of the effective `h⁰` bound, when applicable.
///
/// Returns `Ok(None)` when the degree hypothesis `deg ≤ -d(n log n)/2`
/// fails.  The lattice must be semistable; pass `assume_semistable = true`
/// to skip the (possibly expensive) check when stability is already known.
pub fn effective_h0_bound(lat: &MetrizedLattice, assume_semistable: bool) -> Result<Option<f64>> {
    let (n, d) = (lat.of_rank(), lat.field().degree());
    if !assume_semistable && !is_semistable(lat, SEMISTABLE_TOL)? {
        return Err(Error::HypothesisViolated(
            "effective h0 bound requires a semistable lattice".into(),
        ));
    }
    let deg = lat.degree();
    let threshold = -(d as f64) * (n as f64) * (n as f64).ln() / 2.0;
    if deg > threshold + 1e-12 {
        return Ok(None);
    }
    let inner = (-2.0 * deg / (n as f64 * d as f64)).exp();
    Ok(Some(theorem_constant(n, d) * (-PI * d as f64 * inner).exp()))
}

/// Right-hand side of the effective `h¹` bound, when applicable
/// (`deg ≥ d(n log n)/2 + n log|Δ|`); the duality mirror of
/// [`effective_h0_bound`].
pub fn effective_h1_bound(lat: &MetrizedLattice, assume_semistable: bool) -> Result<Option<f64>> {
    let (n, d) = (lat.of_rank(), lat.field().degree());
    if !assume_semistable && !is_semistable(lat, SEMISTABLE_TOL)? {
        return Err(Error::HypothesisViolated(
            "effective h1 bound requires a semistable lattice".into(),
        ));
    }
    let deg = lat.degree();
    let log_disc = lat.field().log_abs_disc();
    let threshold = d as f64 * (n as f64) * (n as f64).ln() / 2.0 + n as f64 * log_disc;
    if deg < threshold - 1e-12 {
        return Ok(None);
    }
    let inner = (2.0 * deg / (n as f64 * d as f64)).exp();
    let disc_factor = (-2.0 / d as f64 * log_disc).exp();
    Ok(Some(theorem_constant(n, d) * (-PI * d as f64 * disc_factor * inner).exp()))
}

/// One step of a decay probe.
#[derive(Debug, Clone, Serialize)]
pub struct DecayStep {
    /// Twist exponent `m`.
    pub m: usize,
    /// `h¹(twistᵐ ⊗ Λ)`.
    pub h1: f64,
    /// Certified absolute error of `h1`.
    pub certified_error: f64,
}

/// Trace of `h¹` along powers of a positive rank-1 twist.
#[derive(Debug, Clone, Serialize)]
pub struct DecayProbe {
    /// Degree of the rank-1 twist (must be positive).
    pub twist_degree: f64,
    /// `h¹` at `m = 0, 1, …, m_max`.
    pub steps: Vec<DecayStep>,
    /// Effective `h¹` bound per step, `None` until the theorem applies.
    pub bound_values: Vec<Option<f64>>,
    /// Whether the final `h¹` dropped below the requested tolerance.
    pub converged: bool,
    /// First index from which the sequence is weakly decreasing to the end.
    pub monotone_tail_start: Option<usize>,
}

/// Trace `h¹(twistᵐ ⊗ Λ)` for `m = 0..m_max`, where the twist is the
/// uniform metric scaling by `e^{-twist_deg/d}` (degree gain `n·twist_deg`
/// per step).  Non-convergence within `m_max` is reported in the probe, not
/// as an error.
pub fn scaling_decay_probe(
    lat: &MetrizedLattice,
    twist_deg: f64,
    m_max: usize,
    tol: f64,
) -> Result<DecayProbe> {
    if !(twist_deg > 0.0 && twist_deg.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "twist degree {twist_deg} must be positive"
        )));
    }
    if m_max < 1 || m_max > 200 {
        return Err(Error::InvalidParameter(format!(
            "step count {m_max} out of range 1..=200"
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::NonPositiveTolerance(tol));
    }
    let d = lat.field().degree() as f64;
    let step_scale = (-twist_deg / d).exp();
    // Stability is scale-invariant: check once, reuse for every step.
    let semistable = is_semistable(lat, SEMISTABLE_TOL)?;
    let theta_tol = (tol / 10.0).clamp(1e-13, 1e-6);
    let mut steps = Vec::with_capacity(m_max + 1);
    let mut bounds = Vec::with_capacity(m_max + 1);
    let mut current = lat.clone();
    for m in 0..=m_max {
        let tv = theta::h1(&current, theta_tol)?;
        steps.push(DecayStep { m, h1: tv.h0, certified_error: tv.h0_error });
        bounds.push(if semistable { effective_h1_bound(&current, true)? } else { None });
        if m < m_max {
            current = current.scale(step_scale)?;
        }
    }
    let converged = steps.last().map(|s| s.h1 < tol).unwrap_or(false);
    let mut tail_start = steps.len() - 1;
    while tail_start > 0 && steps[tail_start - 1].h1 >= steps[tail_start].h1 {
        tail_start -= 1;
    }
    let monotone_tail_start = if tail_start + 1 < steps.len() || steps.len() == 1 {
        Some(tail_start)
    } else {
        None
    };
    Ok(DecayProbe {
        twist_degree: twist_deg,
        steps,
        bound_values: bounds,
        converged,
        monotone_tail_start,
    })
}

/// One accepted sample of the extremal-value estimator.
#[derive(Debug, Clone)]
pub struct SamplePoint {
    /// Index in the deterministic attempt stream.
    pub sample_id: u64,
    pub degree: f64,
    pub h0: f64,
    pub lattice: MetrizedLattice,
}

/// Observed extrema of `h⁰` over sampled semistable lattices of fixed rank
/// and degree.
#[derive(Debug, Clone, Serialize)]
pub struct ExtremalEstimate {
    pub field: String,
    /// `O_F`-rank of the stratum.
    pub n: usize,
    /// Common degree of the sampled lattices.
    pub d: f64,
    pub sample_count: usize,
    /// Observed minimum of `h⁰` (estimates `m(n,d)`).
    #[serde(rename = "m_hat")]
    pub min_h0: f64,
    /// Observed maximum of `h⁰` (estimates `M(n,d)`).
    #[serde(rename = "M_hat")]
    pub max_h0: f64,
    /// `M̂ - m̂`.
    pub delta_hat: f64,
    /// The accepted samples (kept for duality cross-checks and CSV export).
    #[serde(skip)]
    pub samples: Vec<SamplePoint>,
}

/// Theta tolerance adapted to the expected magnitude `h⁰ ≈ max(0, χ)`.
fn sample_theta_tol(lat: &MetrizedLattice) -> f64 {
    1e-12 * (1.0 + lat.chi().max(0.0).exp())
}

/// SplitMix64 step, used to derive independent per-attempt seeds.
fn derived_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Rejection-sample `samples` random semistable lattices of `O_F`-rank `n`
/// and degree `d`, and record the observed extrema of `h⁰`.  Deterministic
/// per seed and schedule-independent (per-attempt derived seeds, accepted in
/// attempt order).  Errors with `SamplingStarved` if the acceptance rate
/// falls below 0.1%.
pub fn extremal_values_estimate(
    field: &NumberField,
    n: usize,
    d: f64,
    samples: usize,
    seed: u64,
) -> Result<ExtremalEstimate> {
    if samples < 1 {
        return Err(Error::InvalidParameter("need at least one sample".into()));
    }
    if n == 0 || n * field.degree() > 12 {
        return Err(Error::InvalidRank(format!(
            "rank {n} over {} is outside the supported range",
            field.label()
        )));
    }
    let max_attempts = 1000u64.max(1000 * samples as u64);
    let block = 64usize.max(samples);
    let mut accepted: Vec<SamplePoint> = Vec::with_capacity(samples);
    let mut next_attempt = 0u64;
    while accepted.len() < samples {
        if next_attempt >= max_attempts {
            return Err(Error::SamplingStarved(format!(
                "{} of {samples} samples accepted after {next_attempt} attempts",
                accepted.len()
            )));
        }
        let hi = (next_attempt + block as u64).min(max_attempts);
        let results: Vec<(u64, Result<Option<SamplePoint>>)> = (next_attempt..hi)
            .into_par_iter()
            .map(|idx| (idx, sample_one(field, n, d, derived_seed(seed, idx), idx)))
            .collect();
        next_attempt = hi;
        for (_, r) in results {
            match r? {
                Some(p) if accepted.len() < samples => accepted.push(p),
                _ => {}
            }
        }
    }
    let min_h0 = accepted.iter().map(|p| p.h0).fold(f64::INFINITY, f64::min);
    let max_h0 = accepted.iter().map(|p| p.h0).fold(f64::NEG_INFINITY, f64::max);
    Ok(ExtremalEstimate {
        field: field.label(),
        n,
        d,
        sample_count: accepted.len(),
        min_h0,
        max_h0,
        delta_hat: max_h0 - min_h0,
        samples: accepted,
    })
}

fn sample_one(
    field: &NumberField,
    n: usize,
    d: f64,
    seed: u64,
    sample_id: u64,
) -> Result<Option<SamplePoint>> {
    let lat = MetrizedLattice::random(field, n, seed, 1.0, Some(d))?;
    if !is_semistable(&lat, SEMISTABLE_TOL)? {
        return Ok(None);
    }
    let tv = theta::h0(&lat, sample_theta_tol(&lat))?;
    Ok(Some(SamplePoint { sample_id, degree: lat.degree(), h0: tv.h0, lattice: lat }))
}

/// Duality cross-check of an estimate: map every sample to `ω ⊗ Λ^∨`
/// (degree `n·log Δ - d`), recompute `h⁰`, and return the residuals
/// `(|M̂' - M̂ - s|, |m̂' - m̂ - s|)` with `s = (n/2)log Δ - d`.  Riemann-Roch
/// makes the shift exact samplewise, so both residuals are tiny.
pub fn extremal_duality_residual(est: &ExtremalEstimate) -> Result<(f64, f64)> {
    if est.samples.is_empty() {
        return Err(Error::InvalidParameter(
            "estimate carries no stored samples".into(),
        ));
    }
    let mapped: Vec<f64> = est
        .samples
        .par_iter()
        .map(|p| -> Result<f64> {
            let dual = p.lattice.omega_twist()?;
            Ok(theta::h0(&dual, sample_theta_tol(&dual))?.h0)
        })
        .collect::<Result<Vec<f64>>>()?;
    let max_m = mapped.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min_m = mapped.iter().copied().fold(f64::INFINITY, f64::min);
    let first = &est.samples[0].lattice;
    let shift = 0.5 * first.of_rank() as f64 * first.field().log_abs_disc() - est.d;
    Ok(((max_m - est.max_h0 - shift).abs(), (min_m - est.min_h0 - shift).abs()))
}
