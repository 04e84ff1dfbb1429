//! Number fields `Q` and `Q(√D)`: exact invariants and the calibrated
//! Minkowski realization.
//!
//! A field `F` of degree `d` with signature `(r_1, r_2)` embeds into
//! `R^{r_1} × C^{r_2} ≅ R^d`.  We use the *calibrated* coordinates
//!
//! ```text
//! j(x) = (σ_1(x), …, σ_{r_1}(x), √2·Re τ_1(x), √2·Im τ_1(x), …)
//! ```
//!
//! so that the plain Euclidean inner product of `j(x)` and `j(y)` equals the
//! trace form `Tr_{F/Q}(x·ȳ)`, `covol j(O_F) = √Δ_F`, and theta series can be
//! summed with the unweighted squared norm.  In particular the Euclidean dual
//! of `j(O_F)` is exactly `j(∂_F^{-1})`, the inverse different — duality and
//! the `ω`-twist of Serre duality are then the *same* operation on realized
//! lattices.
//!
//! Integral bases follow the classical convention: `{1, (1+√D)/2}` when
//! `D ≡ 1 (mod 4)` (discriminant `D`), `{1, √D}` otherwise (discriminant
//! `4D`).  The trace Gram matrix, its exact inverse (the codifferent basis in
//! integral coordinates), and the multiplication-by-`ω` matrix are kept as
//! exact rational/integer data.

use num::rational::Rational64;
use num::traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::zmat::IMat;

/// Maximum |D| accepted for `Q(√D)`; keeps the exact integer paths far from
/// overflow and the squarefree check cheap.
pub const MAX_ABS_D: i64 = 10_000_000;

/// Identifies a supported base field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FieldSpec {
    /// The rational numbers.
    Rational,
    /// The quadratic field `Q(√d)`, `d` squarefree and not `0` or `1`.
    Quadratic { d: i64 },
}

impl FieldSpec {
    /// Parse a field label: `"Q"` or `"Q(sqrt D)"` (whitespace optional,
    /// case-insensitive, so `"q(sqrt5)"` and `"Q(sqrt -1)"` both work).
    pub fn parse(s: &str) -> Result<FieldSpec> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("q") {
            return Ok(FieldSpec::Rational);
        }
        let lower = t.to_ascii_lowercase();
        let inner = lower
            .strip_prefix("q(")
            .and_then(|r| r.strip_suffix(')'))
            .and_then(|r| r.trim().strip_prefix("sqrt"))
            .ok_or_else(|| Error::InvalidFieldSpec(s.to_string()))?;
        let d: i64 = inner
            .trim()
            .parse()
            .map_err(|_| Error::InvalidFieldSpec(s.to_string()))?;
        Ok(FieldSpec::Quadratic { d })
    }

    pub fn label(&self) -> String {
        match self {
            FieldSpec::Rational => "Q".to_string(),
            FieldSpec::Quadratic { d } => format!("Q(sqrt {d})"),
        }
    }
}

/// Serializable summary of a field's exact invariants.
#[derive(Debug, Clone, Serialize)]
pub struct FieldRecord {
    pub label: String,
    pub degree: usize,
    pub signature: [usize; 2],
    pub discriminant: i64,
    pub integral_basis: Vec<String>,
    /// Codifferent basis as rational coordinates in the integral basis.
    pub codifferent_basis: Vec<Vec<String>>,
}

/// A supported base field with its realization data precomputed.
#[derive(Debug, Clone)]
pub struct NumberField {
    spec: FieldSpec,
    degree: usize,
    signature: (usize, usize),
    /// Signed discriminant `Δ_F`.
    disc: i64,
    log_abs_disc: f64,
    /// Calibrated Minkowski matrix `M`; row `i` is `j(ω_i)`.
    embedding: Mat,
    embedding_inv: Mat,
    /// Multiplication by `ω` on integral-basis coordinates (quadratic only).
    omega_action: Option<IMat>,
    /// The same action on ambient calibrated coordinates: `M^{-1} W M`.
    ambient_action: Option<Mat>,
    /// Exact trace Gram matrix `T_{ij} = Tr(ω_i ω_j)`.
    trace_gram: Vec<Vec<Rational64>>,
    /// Exact rows of `T^{-1}`: the codifferent basis in integral coordinates.
    codifferent: Vec<Vec<Rational64>>,
}

impl NumberField {
    pub fn rational() -> NumberField {
        NumberField::new(FieldSpec::Rational).expect("Q is always valid")
    }

    pub fn quadratic(d: i64) -> Result<NumberField> {
        NumberField::new(FieldSpec::Quadratic { d })
    }

    pub fn new(spec: FieldSpec) -> Result<NumberField> {
        match spec {
            FieldSpec::Rational => Ok(NumberField {
                spec,
                degree: 1,
                signature: (1, 0),
                disc: 1,
                log_abs_disc: 0.0,
                embedding: Mat::identity(1),
                embedding_inv: Mat::identity(1),
                omega_action: None,
                ambient_action: None,
                trace_gram: vec![vec![Rational64::one()]],
                codifferent: vec![vec![Rational64::one()]],
            }),
            FieldSpec::Quadratic { d } => {
                if d == 0 || d == 1 {
                    return Err(Error::InvalidFieldSpec(format!(
                        "Q(sqrt {d}) is not a quadratic field"
                    )));
                }
                if d.abs() > MAX_ABS_D {
                    return Err(Error::InvalidFieldSpec(format!(
                        "|D| = {} exceeds the supported bound {MAX_ABS_D}",
                        d.abs()
                    )));
                }
                if !is_squarefree(d.unsigned_abs()) {
                    return Err(Error::InvalidFieldSpec(format!(
                        "D = {d} is not squarefree"
                    )));
                }
                let one_mod_four = d.rem_euclid(4) == 1;
                let disc = if one_mod_four { d } else { 4 * d };
                let signature = if d > 0 { (2, 0) } else { (0, 1) };
                let sqrt_abs_d = (d.abs() as f64).sqrt();

                // Integral basis {1, θ}: θ = (1+√D)/2 or √D.
                // θ satisfies θ² = q·1 + p·θ with (q, p) as below.
                let (q, p): (i64, i64) =
                    if one_mod_four { ((d - 1) / 4, 1) } else { (d, 0) };
                let omega_action =
                    Some(IMat::from_rows(&[vec![0, 1], vec![q, p]])?);

                // Trace Gram: Tr(1) = 2, Tr(θ) = p, Tr(θ²) = p·Tr(θ)/1 + 2q.
                let tr_theta = Rational64::from_integer(p);
                let tr_theta_sq = Rational64::from_integer(p * p + 2 * q);
                let trace_gram = vec![
                    vec![Rational64::from_integer(2), tr_theta],
                    vec![tr_theta, tr_theta_sq],
                ];
                let codifferent = invert_2x2(&trace_gram)?;

                let embedding = if d > 0 {
                    // Two real places; θ ↦ (θ, θ').
                    let theta1 = if one_mod_four { (1.0 + sqrt_abs_d) / 2.0 } else { sqrt_abs_d };
                    let theta2 = if one_mod_four { (1.0 - sqrt_abs_d) / 2.0 } else { -sqrt_abs_d };
                    Mat::from_rows(&[vec![1.0, 1.0], vec![theta1, theta2]])?
                } else {
                    // One complex place; x ↦ (√2 Re τ(x), √2 Im τ(x)).
                    let s2 = std::f64::consts::SQRT_2;
                    let (re, im) = if one_mod_four {
                        (0.5, sqrt_abs_d / 2.0)
                    } else {
                        (0.0, sqrt_abs_d)
                    };
                    Mat::from_rows(&[vec![s2, 0.0], vec![s2 * re, s2 * im]])?
                };
                let embedding_inv = embedding.inverse()?;
                let w = omega_action.as_ref().unwrap();
                let ambient_action =
                    Some(embedding_inv.mul(&w.mul_mat(&embedding)));

                Ok(NumberField {
                    spec,
                    degree: 2,
                    signature,
                    disc,
                    log_abs_disc: (disc.unsigned_abs() as f64).ln(),
                    embedding,
                    embedding_inv,
                    omega_action,
                    ambient_action,
                    trace_gram,
                    codifferent,
                })
            }
        }
    }

    pub fn parse(s: &str) -> Result<NumberField> {
        NumberField::new(FieldSpec::parse(s)?)
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    pub fn label(&self) -> String {
        self.spec.label()
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn signature(&self) -> (usize, usize) {
        self.signature
    }

    /// Signed discriminant `Δ_F`.
    pub fn discriminant(&self) -> i64 {
        self.disc
    }

    pub fn abs_discriminant(&self) -> u64 {
        self.disc.unsigned_abs()
    }

    /// `log |Δ_F|`, the constant in Riemann–Roch and degree/duality formulas.
    pub fn log_abs_disc(&self) -> f64 {
        self.log_abs_disc
    }

    /// Calibrated Minkowski matrix; row `i` realizes the `i`-th integral
    /// basis element.  `|det| = √|Δ_F|`.
    pub fn embedding(&self) -> &Mat {
        &self.embedding
    }

    pub fn embedding_inv(&self) -> &Mat {
        &self.embedding_inv
    }

    /// Multiplication by the non-rational basis element `θ` on integral
    /// coordinates (`None` over `Q`).
    pub fn omega_action(&self) -> Option<&IMat> {
        self.omega_action.as_ref()
    }

    /// The same multiplication on ambient calibrated coordinates, acting on
    /// row vectors from the right (`None` over `Q`).
    pub fn ambient_action(&self) -> Option<&Mat> {
        self.ambient_action.as_ref()
    }

    /// Exact trace Gram matrix of the integral basis.
    pub fn trace_gram(&self) -> &[Vec<Rational64>] {
        &self.trace_gram
    }

    /// Exact codifferent basis (rows of the inverse trace Gram) in integral
    /// coordinates.
    pub fn codifferent(&self) -> &[Vec<Rational64>] {
        &self.codifferent
    }

    /// Names of the integral basis elements, for reports.
    pub fn integral_basis_labels(&self) -> Vec<String> {
        match self.spec {
            FieldSpec::Rational => vec!["1".to_string()],
            FieldSpec::Quadratic { d } => {
                if d.rem_euclid(4) == 1 {
                    vec!["1".to_string(), format!("(1+sqrt({d}))/2")]
                } else {
                    vec!["1".to_string(), format!("sqrt({d})")]
                }
            }
        }
    }

    pub fn record(&self) -> FieldRecord {
        FieldRecord {
            label: self.label(),
            degree: self.degree,
            signature: [self.signature.0, self.signature.1],
            discriminant: self.disc,
            integral_basis: self.integral_basis_labels(),
            codifferent_basis: self
                .codifferent
                .iter()
                .map(|row| row.iter().map(|r| r.to_string()).collect())
                .collect(),
        }
    }
}

impl PartialEq for NumberField {
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec
    }
}

fn is_squarefree(n: u64) -> bool {
    let mut p = 2u64;
    while p * p <= n {
        if n % (p * p) == 0 {
            return false;
        }
        p += 1;
    }
    true
}

/// Exact inverse of a 2×2 rational matrix.
fn invert_2x2(m: &[Vec<Rational64>]) -> Result<Vec<Vec<Rational64>>> {
    let (a, b, c, d) = (m[0][0], m[0][1], m[1][0], m[1][1]);
    let det = a * d - b * c;
    if det.is_zero() {
        return Err(Error::DegenerateBasis("trace form is degenerate".into()));
    }
    Ok(vec![vec![d / det, -b / det], vec![-c / det, a / det]])
}

/// Exact determinant of the stored trace Gram (equals `Δ_F`); used in tests
/// and the selftest as an exact cross-check of the discriminant.
pub fn trace_gram_det(f: &NumberField) -> Rational64 {
    let t = f.trace_gram();
    if t.len() == 1 {
        t[0][0]
    } else {
        t[0][0] * t[1][1] - t[0][1] * t[1][0]
    }
}
