//! Metrized `O_F`-lattices in the calibrated Minkowski realization.
//!
//! A lattice of `O_F`-rank `n` over a field of degree `d` is a full-rank
//! `Z`-lattice in `R^{nd}` (row basis `B`) that is stable under the ambient
//! multiplication action of `O_F`.  The arithmetic invariants are
//!
//! ```text
//! χ(Λ)   = -log covol(Λ)
//! deg(Λ) =  χ(Λ) + (n/2)·log|Δ_F|
//! μ(Λ)   =  deg(Λ)/n
//! ```
//!
//! normalized so that `deg O_F = 0`.  Because the realization is calibrated
//! (the Euclidean pairing restricts to the twisted trace form `Tr(x·ȳ)`),
//! the Serre dual `ω ⊗ Λ^∨` — dualize, then twist by the codifferent — is
//! realized by the *plain Euclidean dual* basis `(B^{-1})ᵀ`: the codifferent
//! twist is already absorbed into the geometry.  This gives the clean
//! degree flip `deg(Λ^∨) = n·log|Δ_F| - deg(Λ)` and makes
//! `h^1(Λ) = h^0(Λ^∨)` a pure theta computation.
//!
//! Sublattices are handled exactly through saturated integer coordinate
//! matrices, and quotients are realized on the orthogonal complement of the
//! sublattice span, which makes arithmetic degrees exactly additive in short
//! exact sequences — the bookkeeping the Harder–Narasimhan recursion relies
//! on.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::NumberField;
use crate::linalg::Mat;
use crate::zmat::{self, IMat, Saturation};

/// Condition-number guard for user-supplied bases.
const MAX_CONDITION: f64 = 1e12;

/// A metrized lattice over a supported base field.
#[derive(Debug, Clone)]
pub struct MetrizedLattice {
    field: NumberField,
    of_rank: usize,
    /// Row basis of the realized lattice (`z_rank × z_rank`).
    basis: Mat,
    /// Right-multiplication action of the field generator `θ` on ambient
    /// row vectors (`None` over `Q`).
    ambient_action: Option<Mat>,
    /// Integer matrix `W` with `W·B = B·J` where `J` is the ambient action:
    /// multiplication by `θ` written on lattice coordinates.
    of_action: Option<IMat>,
    label: String,
}

/// Serializable summary of a lattice.
#[derive(Debug, Clone, Serialize)]
pub struct LatticeRecord {
    pub label: String,
    pub field: String,
    pub of_rank: usize,
    pub z_rank: usize,
    pub covolume: f64,
    pub chi: f64,
    pub degree: f64,
    pub slope: f64,
    pub basis: Vec<Vec<f64>>,
}

/// A saturated sublattice of a metrized lattice, in exact coordinates.
#[derive(Debug, Clone)]
pub struct Sublattice {
    /// Saturated basis rows, in coordinates of the parent lattice.
    pub generators: IMat,
    /// Full tracker from the saturation (completion rows included).
    pub saturation: Saturation,
    /// `Z`-rank of the sublattice.
    pub rank_z: usize,
    /// `O_F`-rank (equals `rank_z` over `Q`).
    pub of_rank: usize,
    pub degree: f64,
    pub slope: f64,
}

impl MetrizedLattice {
    /// The standard lattice `O_F^n` with basis `I_n ⊗ M`.
    pub fn standard(field: &NumberField, of_rank: usize) -> MetrizedLattice {
        assert!(of_rank > 0, "rank must be positive");
        let _d = field.degree();
        let basis = Mat::identity(of_rank).kron(field.embedding());
        let (ambient_action, of_action) = match field.ambient_action() {
            None => (None, None),
            Some(a) => (
                Some(Mat::identity(of_rank).kron(a)),
                Some(kron_identity(of_rank, field.omega_action().unwrap())),
            ),
        };
        MetrizedLattice {
            field: field.clone(),
            of_rank,
            basis,
            ambient_action,
            of_action,
            label: format!("O^{of_rank}"),
        }
    }

    /// Build a lattice from an explicit row basis, verifying full rank and
    /// (over a quadratic field) stability under the `O_F`-action.
    pub fn from_basis(field: &NumberField, basis: Mat) -> Result<MetrizedLattice> {
        let d = field.degree();
        let n = basis.rows();
        if basis.cols() != n {
            return Err(Error::DimensionMismatch { expected: n, got: basis.cols() });
        }
        if n == 0 || n % d != 0 {
            return Err(Error::InvalidRank(format!(
                "Z-rank {n} is not a multiple of the field degree {d}"
            )));
        }
        let ambient = field
            .ambient_action()
            .map(|a| Mat::identity(n / d).kron(a));
        Self::from_basis_in_frame(field, basis, ambient, format!("lattice/{}", field.label()))
    }

    /// Internal constructor for a basis expressed in an arbitrary orthonormal
    /// ambient frame carrying the given `θ`-action (used by quotients, whose
    /// frame is a rotated copy of the standard one).
    fn from_basis_in_frame(
        field: &NumberField,
        basis: Mat,
        ambient_action: Option<Mat>,
        label: String,
    ) -> Result<MetrizedLattice> {
        let d = field.degree();
        let n = basis.rows();
        let det = basis.det();
        if !det.is_finite() || det == 0.0 {
            return Err(Error::DegenerateBasis("basis has zero or non-finite determinant".into()));
        }
        let cond = basis.cond_frobenius();
        if !cond.is_finite() || cond > MAX_CONDITION {
            return Err(Error::DegenerateBasis(format!(
                "basis condition number {cond:.3e} exceeds {MAX_CONDITION:.0e}"
            )));
        }
        let of_action = match &ambient_action {
            None => None,
            Some(j) => Some(detect_of_action(&basis, j)?),
        };
        Ok(MetrizedLattice {
            field: field.clone(),
            of_rank: n / d,
            basis,
            ambient_action,
            of_action,
            label,
        })
    }

    /// Direct sum of scaled rank-one standard lattices: the lattice written
    /// `diag(c_1, …, c_n)` in reports.
    pub fn diag(field: &NumberField, scales: &[f64]) -> Result<MetrizedLattice> {
        if scales.is_empty() {
            return Err(Error::InvalidRank("diag lattice needs at least one scale".into()));
        }
        let mut acc: Option<MetrizedLattice> = None;
        for &c in scales {
            let part = MetrizedLattice::standard(field, 1).scale(c)?;
            acc = Some(match acc {
                None => part,
                Some(a) => a.direct_sum(&part)?,
            });
        }
        let mut lat = acc.unwrap();
        let shown: Vec<String> = scales.iter().map(|c| format!("{c}")).collect();
        lat.label = format!("diag({})", shown.join(","));
        Ok(lat)
    }

    /// Pseudorandom module lattice: the standard lattice deformed by a random
    /// `F ⊗ R`-linear map `I + spread·S` (per-place blocks, so the module
    /// structure is exact by construction), optionally rescaled to hit a
    /// target degree.  Deterministic in `(field, of_rank, seed)`.
    pub fn random(
        field: &NumberField,
        of_rank: usize,
        seed: u64,
        spread: f64,
        target_degree: Option<f64>,
    ) -> Result<MetrizedLattice> {
        if of_rank == 0 {
            return Err(Error::InvalidRank("rank must be positive".into()));
        }
        if !(spread.is_finite() && spread >= 0.0) {
            return Err(Error::InvalidParameter(format!("spread {spread} must be >= 0")));
        }
        let d = field.degree();
        let n = of_rank * d;
        let std_basis = Mat::identity(of_rank).kron(field.embedding());
        for attempt in 0..64u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(attempt);
            // T = I + spread·S with commuting per-place blocks.
            let mut t = Mat::identity(n);
            let bump = |t: &mut Mat, bj: usize, bk: usize, i: usize, j: usize, v: f64| {
                let (r, c) = (bj * d + i, bk * d + j);
                t.set(r, c, t.at(r, c) + v);
            };
            for bj in 0..of_rank {
                for bk in 0..of_rank {
                    match (d, field.signature()) {
                        (1, _) => {
                            let g: f64 = rng.gen_range(-1.0..1.0);
                            bump(&mut t, bj, bk, 0, 0, spread * g);
                        }
                        (_, (2, 0)) => {
                            // Real places act diagonally.
                            let g1: f64 = rng.gen_range(-1.0..1.0);
                            let g2: f64 = rng.gen_range(-1.0..1.0);
                            bump(&mut t, bj, bk, 0, 0, spread * g1);
                            bump(&mut t, bj, bk, 1, 1, spread * g2);
                        }
                        _ => {
                            // One complex place: blocks are C-scalars.
                            let u: f64 = rng.gen_range(-1.0..1.0);
                            let v: f64 = rng.gen_range(-1.0..1.0);
                            bump(&mut t, bj, bk, 0, 0, spread * u);
                            bump(&mut t, bj, bk, 1, 1, spread * u);
                            bump(&mut t, bj, bk, 0, 1, spread * v);
                            bump(&mut t, bj, bk, 1, 0, -spread * v);
                        }
                    }
                }
            }
            let basis = std_basis.mul(&t);
            let det = basis.det().abs();
            if !(det.is_finite() && det > 1e-9) || basis.cond_frobenius() > 1e8 {
                continue;
            }
            let mut lat = MetrizedLattice::from_basis(field, basis)?;
            if let Some(target) = target_degree {
                let c = ((lat.degree() - target) / n as f64).exp();
                lat = lat.scale(c)?;
            }
            lat.label = format!("random({}, n={of_rank}, seed={seed})", field.label());
            return Ok(lat);
        }
        Err(Error::NonConvergent(
            "could not draw a well-conditioned random lattice".into(),
        ))
    }

    pub fn field(&self) -> &NumberField {
        &self.field
    }

    /// `O_F`-rank.
    pub fn of_rank(&self) -> usize {
        self.of_rank
    }

    /// `Z`-rank (ambient dimension).
    pub fn z_rank(&self) -> usize {
        self.basis.rows()
    }

    pub fn basis(&self) -> &Mat {
        &self.basis
    }

    pub fn ambient_action(&self) -> Option<&Mat> {
        self.ambient_action.as_ref()
    }

    /// Integer coordinate action of `θ` (row coordinates multiply it on the
    /// right); `None` over `Q`.
    pub fn of_action(&self) -> Option<&IMat> {
        self.of_action.as_ref()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> MetrizedLattice {
        self.label = label.into();
        self
    }

    pub fn covolume(&self) -> f64 {
        self.basis.det().abs()
    }

    /// Euler characteristic `χ = -log covol`.
    pub fn chi(&self) -> f64 {
        -self.covolume().ln()
    }

    /// Arithmetic degree `deg = χ + (n/2)·log|Δ_F|`.
    pub fn degree(&self) -> f64 {
        self.chi() + 0.5 * self.of_rank as f64 * self.field.log_abs_disc()
    }

    /// Slope `μ = deg/n`.
    pub fn slope(&self) -> f64 {
        self.degree() / self.of_rank as f64
    }

    /// Scale every vector by `c > 0` (a uniform metric twist); shifts the
    /// degree by `-N·log c` where `N` is the `Z`-rank.
    pub fn scale(&self, c: f64) -> Result<MetrizedLattice> {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::InvalidScale(c));
        }
        let mut out = self.clone();
        out.basis = self.basis.scaled(c);
        out.label = format!("scale({}, {c})", self.label);
        Ok(out)
    }

    /// The Euclidean dual lattice, with basis `(B^{-1})ᵀ`.
    ///
    /// In the calibrated realization this *is* the Serre dual `ω ⊗ Λ^∨`:
    /// the trace-form dual of `O_F` is the codifferent, so the `ω`-twist is
    /// built into the pairing.  `deg(Λ^∨) = n·log|Δ_F| - deg(Λ)`.
    pub fn dual_lattice(&self) -> Result<MetrizedLattice> {
        let dual_basis = self.basis.inverse()?.transpose();
        let of_action = match &self.ambient_action {
            None => None,
            Some(j) => Some(detect_of_action(&dual_basis, j)?),
        };
        Ok(MetrizedLattice {
            field: self.field.clone(),
            of_rank: self.of_rank,
            basis: dual_basis,
            ambient_action: self.ambient_action.clone(),
            of_action,
            label: format!("dual({})", self.label),
        })
    }

    /// Serre dual (duality with the codifferent twist).  See
    /// [`MetrizedLattice::dual_lattice`]: in calibrated coordinates the twist
    /// is absorbed, so this is the same lattice; it is kept as a separate
    /// name so callers can express intent.
    pub fn omega_twist(&self) -> Result<MetrizedLattice> {
        let mut out = self.dual_lattice()?;
        out.label = format!("serre_dual({})", self.label);
        Ok(out)
    }

    /// Orthogonal direct sum.
    pub fn direct_sum(&self, other: &MetrizedLattice) -> Result<MetrizedLattice> {
        if self.field != other.field {
            return Err(Error::FieldMismatch);
        }
        let basis = Mat::block_diag(&[&self.basis, &other.basis]);
        let ambient_action = match (&self.ambient_action, &other.ambient_action) {
            (Some(a), Some(b)) => Some(Mat::block_diag(&[a, b])),
            (None, None) => None,
            _ => return Err(Error::FieldMismatch),
        };
        let of_action = match (&self.of_action, &other.of_action) {
            (Some(a), Some(b)) => Some(block_diag_int(a, b)?),
            (None, None) => None,
            _ => return Err(Error::FieldMismatch),
        };
        Ok(MetrizedLattice {
            field: self.field.clone(),
            of_rank: self.of_rank + other.of_rank,
            basis,
            ambient_action,
            of_action,
            label: format!("({})+({})", self.label, other.label),
        })
    }

    /// Forget the `O_F`-structure: the same point set viewed over `Q`.
    /// Preserves `χ` exactly; the restricted degree equals `χ`.
    pub fn restrict_scalars(&self) -> MetrizedLattice {
        if self.field.degree() == 1 {
            return self.clone();
        }
        MetrizedLattice {
            field: NumberField::rational(),
            of_rank: self.z_rank(),
            basis: self.basis.clone(),
            ambient_action: None,
            of_action: None,
            label: format!("res({})", self.label),
        }
    }

    /// Saturate integer generators inside this lattice and package the exact
    /// sublattice data.  Over a quadratic field the saturated span must be an
    /// `O_F`-submodule.
    pub fn sublattice(&self, generators: &IMat) -> Result<Sublattice> {
        if generators.cols() != self.z_rank() {
            return Err(Error::DimensionMismatch {
                expected: self.z_rank(),
                got: generators.cols(),
            });
        }
        if generators.rows() == 0 || generators.is_zero() {
            return Err(Error::EmptySublattice);
        }
        let saturation = zmat::saturate(generators)?;
        if saturation.rank == 0 {
            return Err(Error::EmptySublattice);
        }
        let sat_basis = saturation.basis();
        let d = self.field.degree();
        let of_rank = if let Some(w) = &self.of_action {
            // Module stability: the span must be carried into itself by W.
            let image = sat_basis.mul(w)?;
            let mut stacked = sat_basis.to_rows();
            stacked.extend(image.to_rows());
            let stack = IMat::from_rows(&stacked)?;
            if stack.hermite_form()? != sat_basis.hermite_form()? {
                return Err(Error::NotModuleStable(
                    "saturated span is not stable under the O_F-action".into(),
                ));
            }
            debug_assert_eq!(saturation.rank % d, 0);
            saturation.rank / d
        } else {
            saturation.rank
        };
        let realized = sat_basis.mul_mat(&self.basis);
        let covol = realized.row_covolume();
        let degree = -covol.ln() + 0.5 * of_rank as f64 * self.field.log_abs_disc();
        Ok(Sublattice {
            generators: sat_basis,
            saturation,
            rank_z: of_rank * d,
            of_rank,
            degree,
            slope: degree / of_rank as f64,
            })
    }

    /// Materialize a saturated sublattice as a metrized lattice in its own
    /// right (full rank in the subspace it spans, rotated to standard
    /// coordinates by an orthonormal frame of that subspace).
    pub fn sub_as_lattice(&self, sub: &Sublattice) -> Result<MetrizedLattice> {
        let realized = sub.generators.mul_mat(&self.basis);
        let frame = crate::linalg::orthonormal_rowspace(&realized);
        let basis = realized.mul(&frame.transpose());
        let ambient = match &self.ambient_action {
            None => None,
            Some(j) => Some(frame.mul(j).mul(&frame.transpose())),
        };
        MetrizedLattice::from_basis_in_frame(
            &self.field,
            basis,
            ambient,
            format!("sub({})", self.label),
        )
    }

    /// Quotient by a saturated sublattice, realized on the orthogonal
    /// complement of its span.  Degrees are exactly additive:
    /// `deg(Λ) = deg(sub) + deg(Λ/sub)`.
    pub fn quotient_by(&self, sub: &Sublattice) -> Result<MetrizedLattice> {
        let n = self.z_rank();
        let k = sub.rank_z;
        if k >= n {
            return Err(Error::InvalidRank("quotient by a full-rank sublattice is zero".into()));
        }
        let realized_sub = sub.generators.mul_mat(&self.basis);
        // Orthonormal frames of the span and its complement.
        let span = crate::linalg::orthonormal_rowspace(&realized_sub);
        let comp = crate::linalg::orthonormal_complement(&realized_sub);
        // Completion rows project to a basis of the quotient.
        let completion = sub.saturation.completion();
        let realized_comp = completion.mul_mat(&self.basis);
        // Remove the span component, then express in the complement frame.
        let mut proj = realized_comp.clone();
        for i in 0..proj.rows() {
            for s in 0..span.rows() {
                let c = crate::linalg::dot(proj.row(i), span.row(s));
                for t in 0..n {
                    proj.set(i, t, proj.at(i, t) - c * span.at(s, t));
                }
            }
        }
        let basis = proj.mul(&comp.transpose());
        let ambient = match &self.ambient_action {
            None => None,
            Some(j) => Some(comp.mul(j).mul(&comp.transpose())),
        };
        MetrizedLattice::from_basis_in_frame(
            &self.field,
            basis,
            ambient,
            format!("quot({})", self.label),
        )
    }

    pub fn record(&self) -> LatticeRecord {
        LatticeRecord {
            label: self.label.clone(),
            field: self.field.label(),
            of_rank: self.of_rank,
            z_rank: self.z_rank(),
            covolume: self.covolume(),
            chi: self.chi(),
            degree: self.degree(),
            slope: self.slope(),
            basis: self.basis.to_rows(),
        }
    }
}

/// `I_n ⊗ W` on integer matrices.
fn kron_identity(n: usize, w: &IMat) -> IMat {
    let d = w.rows();
    let mut out = IMat::zeros(n * d, n * d);
    for b in 0..n {
        for i in 0..d {
            for j in 0..d {
                out.set(b * d + i, b * d + j, w.at(i, j));
            }
        }
    }
    out
}

fn block_diag_int(a: &IMat, b: &IMat) -> Result<IMat> {
    let mut out = IMat::zeros(a.rows() + b.rows(), a.cols() + b.cols());
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            out.set(i, j, a.at(i, j));
        }
    }
    for i in 0..b.rows() {
        for j in 0..b.cols() {
            out.set(a.rows() + i, a.cols() + j, b.at(i, j));
        }
    }
    Ok(out)
}

/// Recover the integer coordinate action `W = B·J·B^{-1}`, verifying that it
/// really is integral (the lattice is `O_F`-stable).
fn detect_of_action(basis: &Mat, ambient: &Mat) -> Result<IMat> {
    let wf = basis.mul(ambient).mul(&basis.inverse()?);
    let n = wf.rows();
    let mut rows = vec![vec![0i64; n]; n];
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let v = wf.at(i, j);
            let r = v.round();
            worst = worst.max((v - r).abs());
            rows[i][j] = r as i64;
        }
    }
    if worst > 1e-6 {
        return Err(Error::NotModuleStable(format!(
            "coordinate action is off-integer by {worst:.3e}"
        )));
    }
    // Confirm the rounded action reproduces the ambient one on the basis.
    let w = IMat::from_rows(&rows)?;
    let lhs = w.mul_mat(basis);
    let rhs = basis.mul(ambient);
    let mut err = 0.0f64;
    let mut scale = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            err = err.max((lhs.at(i, j) - rhs.at(i, j)).abs());
            scale = scale.max(rhs.at(i, j).abs());
        }
    }
    if err > 1e-9 * (1.0 + scale) {
        return Err(Error::NotModuleStable(format!(
            "integer action fails to reproduce multiplication (residual {err:.3e})"
        )));
    }
    Ok(w)
}
