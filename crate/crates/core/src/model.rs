//! The basic-tuple model of a frame-tuple and the similarity decision.
//!
//! For a frame-tuple with synthesis operator `C`, the model subspace is
//! `𝒩 = ker(C)^⊥` inside the universe. It is reducing for `U` (resp. `U₁`),
//! invariant for `Ŝ*` (resp. reducing for `U₂`), and `C|𝒩` is an
//! isomorphism onto `ℋ` intertwining the model with the tuple. Two
//! frame-tuples over the same universe are similar exactly when their
//! kernels coincide.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fibers::{reducing_defect, ReducingDefect};
use crate::io::{cmatrix, cmatrix_opt, cvectors};
use crate::lattice::{Mode, Shift, Universe};
use crate::linalg::{
    inverse, min_singular_value, orthonormal_range, orthonormality_defect, projector_distance,
    relative_residual, spectral_norm,
};
use crate::tolerances::Tolerances;
use crate::tuples::{frame_bounds, synthesis, FrameReport, Iteration, Tuple};
use crate::C64;

/// Ratio below which the gap between a kept singular value and the cutoff
/// is too small to call.
const AMBIGUITY_FACTOR: f64 = 10.0;

/// Measured defining properties of a basic tuple.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BasicInvariants {
    /// `‖N*N − I‖`.
    pub orthonormality: f64,
    pub reducing: ReducingDefect,
    /// `‖U|𝒩 A − A U|𝒩‖` (resp. `‖U₁|𝒩 U₂|𝒩 − U₂|𝒩 U₁|𝒩‖`).
    pub commutation: f64,
    /// `σ_min(C|𝒩)`.
    pub c_sigma_min: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct BasicTuple {
    pub universe: Universe,
    pub iteration: Iteration,
    /// Orthonormal basis of `𝒩` in coefficient coordinates (`dim(u) × r`).
    #[serde(rename = "N_basis", with = "cmatrix")]
    pub n_basis: DMatrix<C64>,
    /// `U|𝒩` (resp. `U₁|𝒩`) in the `N_basis` coordinates.
    #[serde(with = "cmatrix")]
    pub model_t: DMatrix<C64>,
    /// `A = P_𝒩Ŝ|𝒩` (resp. `U₂|𝒩`) in the `N_basis` coordinates.
    #[serde(rename = "A", with = "cmatrix")]
    pub model_l: DMatrix<C64>,
    /// `φᵢ = P_𝒩ϕᵢ` in the `N_basis` coordinates.
    #[serde(with = "cvectors")]
    pub phis: Vec<DVector<C64>>,
    /// `C|𝒩` as a `dim_H × r` matrix.
    #[serde(rename = "C_restricted", with = "cmatrix")]
    pub c_restricted: DMatrix<C64>,
    /// Singular values of `C`, descending.
    pub singular_spectrum: Vec<f64>,
    pub cutoff: f64,
    /// Smallest kept over largest dropped singular value; `None` when
    /// nothing below the cutoff was numerically present.
    pub spectral_gap: Option<f64>,
    pub invariants: BasicInvariants,
    pub source_report: FrameReport,
}

impl BasicTuple {
    pub fn rank(&self) -> usize {
        self.n_basis.ncols()
    }

    pub fn kernel_dim(&self) -> usize {
        self.universe.dim() - self.rank()
    }

    /// `(𝒩, U|𝒩, A, {φᵢ})` as a tuple on `ℂʳ`, iterated like its source.
    pub fn as_tuple(&self) -> Result<Tuple> {
        Tuple::new(
            self.model_t.clone(),
            self.model_l.clone(),
            self.phis.clone(),
            self.universe.mode(),
            self.iteration,
        )
    }
}

/// Orthonormal basis of `ker(C)^⊥` with its singular spectrum, cutoff and gap.
fn kernel_complement(
    c_universe: &DMatrix<C64>,
    tol: &Tolerances,
) -> Result<(DMatrix<C64>, Vec<f64>, f64, Option<f64>)> {
    // Left singular vectors of C* are right singular vectors of C.
    let (n_basis, spectrum) = orthonormal_range(&c_universe.adjoint(), tol.rank_tol);
    let smax = spectrum.first().copied().unwrap_or(0.0);
    let cutoff = tol.rank_tol * smax;
    let r = n_basis.ncols();
    let kept_min = spectrum[..r].last().copied();
    let dropped_max = spectrum.get(r).copied().filter(|&s| s > 0.0);
    for &s in &spectrum {
        let near = if s > cutoff {
            s < AMBIGUITY_FACTOR * cutoff
        } else {
            s > cutoff / AMBIGUITY_FACTOR
        };
        if near && s > 0.0 {
            return Err(Error::RankAmbiguous { value: s, cutoff });
        }
    }
    let gap = match (kept_min, dropped_max) {
        (Some(k), Some(d)) => Some(k / d),
        _ => None,
    };
    Ok((n_basis, spectrum, cutoff, gap))
}

/// Builds the basic tuple of a frame-tuple.
pub fn build_basic_tuple(t: &Tuple, u: &Universe, tol: &Tolerances) -> Result<BasicTuple> {
    let report = frame_bounds(t, u, tol)?;
    if !report.is_frame {
        return Err(Error::NotAFrame {
            lower: report.lower_bound,
            upper: report.upper_bound,
        });
    }
    let c_u = synthesis(t, u)?.universe_matrix();
    let (n_basis, spectrum, cutoff, spectral_gap) = kernel_complement(&c_u, tol)?;
    basic_from_parts(t, u, tol, c_u, n_basis, spectrum, cutoff, spectral_gap, report)
}

#[allow(clippy::too_many_arguments)]
fn basic_from_parts(
    t: &Tuple,
    u: &Universe,
    tol: &Tolerances,
    c_u: DMatrix<C64>,
    n_basis: DMatrix<C64>,
    singular_spectrum: Vec<f64>,
    cutoff: f64,
    spectral_gap: Option<f64>,
    source_report: FrameReport,
) -> Result<BasicTuple> {
    let mode = u.mode();
    let n_adj = n_basis.adjoint();
    let model_t = &n_adj * u.shift_columns(Shift::first(mode), &n_basis)?;
    let model_l = &n_adj * u.shift_columns(Shift::second(mode), &n_basis)?;
    let phis = (0..u.n_gen())
        .map(|i| n_basis.row(u.flat(0, 0, i)).adjoint())
        .collect();
    let c_restricted = &c_u * &n_basis;

    let orthonormality = orthonormality_defect(&n_basis);
    let reducing = reducing_defect(&n_basis, u)?;
    let commutation = spectral_norm(&(&model_t * &model_l - &model_l * &model_t));
    let c_sigma_min = min_singular_value(&c_restricted);
    let structural = match mode {
        Mode::Unilateral => reducing.u_defect.max(reducing.u_star_defect).max(reducing.s_star_defect),
        Mode::Bilateral => reducing.max(),
    };
    let passed = orthonormality <= tol.red_tol
        && structural <= tol.red_tol
        && commutation <= tol.red_tol
        && c_sigma_min > 0.0;
    Ok(BasicTuple {
        universe: *u,
        iteration: t.iteration(),
        n_basis,
        model_t,
        model_l,
        phis,
        c_restricted,
        singular_spectrum,
        cutoff,
        spectral_gap,
        invariants: BasicInvariants {
            orthonormality,
            reducing,
            commutation,
            c_sigma_min,
            passed,
        },
        source_report,
    })
}

/// Residuals of `TC = CU`, `T⁻¹C = CU*`, `LC = CŜ` on `𝒩` (bilateral:
/// `TC = CU₁`, `T⁻¹C = CU₁*`, `LC = CU₂`, `L⁻¹C = CU₂*`).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IntertwiningReport {
    pub t_residual: f64,
    pub t_inv_residual: f64,
    pub l_residual: f64,
    pub l_inv_residual: Option<f64>,
    /// `‖C‖`.
    pub c_norm: f64,
    /// Largest residual divided by `‖C‖`.
    pub relative: f64,
    pub threshold: f64,
    pub passed: bool,
}

/// Relative threshold for intertwining residuals.
pub const INTERTWINING_TOL: f64 = 1e-8;

/// Intertwining residuals for an explicit universe-ordered synthesis matrix.
pub fn intertwining_residuals(
    t: &Tuple,
    c_u: &DMatrix<C64>,
    n_basis: &DMatrix<C64>,
    u: &Universe,
) -> Result<IntertwiningReport> {
    let mode = u.mode();
    let first = Shift::first(mode);
    let second = Shift::second(mode);
    let cn = c_u * n_basis;
    let t_inv = inverse(t.t(), "T")?;
    let t_residual = spectral_norm(&(t.t() * &cn - c_u * u.shift_columns(first, n_basis)?));
    let t_inv_residual =
        spectral_norm(&(&t_inv * &cn - c_u * u.shift_columns(first.adjoint(), n_basis)?));
    let l_residual = spectral_norm(&(t.l() * &cn - c_u * u.shift_columns(second, n_basis)?));
    let l_inv_residual = match mode {
        Mode::Bilateral => {
            let l_inv = inverse(t.l(), "L")?;
            Some(spectral_norm(
                &(&l_inv * &cn - c_u * u.shift_columns(second.adjoint(), n_basis)?),
            ))
        }
        Mode::Unilateral => None,
    };
    let c_norm = spectral_norm(c_u);
    let worst = t_residual
        .max(t_inv_residual)
        .max(l_residual)
        .max(l_inv_residual.unwrap_or(0.0));
    let relative = if c_norm > 0.0 { worst / c_norm } else { worst };
    Ok(IntertwiningReport {
        t_residual,
        t_inv_residual,
        l_residual,
        l_inv_residual,
        c_norm,
        relative,
        threshold: INTERTWINING_TOL,
        passed: relative <= INTERTWINING_TOL,
    })
}

/// Intertwining residuals of `t` against its basic tuple `b`.
pub fn verify_intertwining(t: &Tuple, b: &BasicTuple) -> Result<IntertwiningReport> {
    let c_u = synthesis(t, &b.universe)?.universe_matrix();
    let recomputed = &c_u * &b.n_basis;
    if recomputed.shape() != b.c_restricted.shape()
        || relative_residual(&recomputed, &b.c_restricted) > 1e-8
    {
        return Err(Error::ProvenanceMismatch(
            "C|𝒩 of the tuple differs from the stored restriction".into(),
        ));
    }
    intertwining_residuals(t, &c_u, &b.n_basis, &b.universe)
}

/// Parseval check of the model system `{U|𝒩ᵏAʲφᵢ}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ParsevalCheck {
    pub report: FrameReport,
    /// `max ‖U|𝒩ᵏAʲφᵢ − N*(UᵏŜʲϕᵢ)‖` over the orbit.
    pub projection_identity: f64,
}

pub fn verify_parseval_basic(b: &BasicTuple, tol: &Tolerances) -> Result<ParsevalCheck> {
    let model = b.as_tuple()?;
    let report = frame_bounds(&model, &b.universe, tol)?;
    let c_model = synthesis(&model, &b.universe)?.universe_matrix();
    // Shift powers of canonical basis elements are canonical basis elements,
    // so P_𝒩UᵏŜʲϕᵢ has coordinates N* e_(k,j,i).
    let diff = c_model - b.n_basis.adjoint();
    let projection_identity = diff
        .column_iter()
        .map(|col| col.norm())
        .fold(0.0, f64::max);
    Ok(ParsevalCheck {
        report,
        projection_identity,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SimilarityStatus {
    /// Kernels agree and the connecting map is certified.
    Similar,
    /// Kernels agree but the connecting map fails certification.
    KernelOnly,
    NotSimilar,
}

#[derive(Clone, Debug, Serialize)]
pub struct SimilarityVerdict {
    /// `kernel_distance ≤ sim_tol`.
    pub similar: bool,
    pub status: SimilarityStatus,
    /// `‖P_ker C₁ − P_ker C₂‖_op`.
    pub kernel_distance: f64,
    pub sim_tol: f64,
    /// `B = C₂|𝒩 (C₁|𝒩)⁻¹` when the kernels agree.
    #[serde(with = "cmatrix_opt")]
    pub connecting_map: Option<DMatrix<C64>>,
    /// Relative residuals of `BT₁ = T₂B`, `BL₁ = L₂B`, `Bw₁ᵢ = w₂ᵢ`.
    pub certificate: Option<[f64; 3]>,
    pub cert_tol: f64,
    /// `‖B*B − I‖` when both tuples are Parseval.
    pub unitarity_defect: Option<f64>,
    /// With `Ψ = P_𝒩₂|𝒩₁`: relative residual of `ΨA₁ = A₂Ψ` (compressions
    /// only, generators ignored). Reported for equal ranks.
    pub compression_residual: Option<f64>,
}

impl SimilarityVerdict {
    pub fn certified(&self) -> bool {
        self.status == SimilarityStatus::Similar
    }

    pub fn max_certificate_residual(&self) -> Option<f64> {
        self.certificate.map(|c| c[0].max(c[1]).max(c[2]))
    }
}

/// Decides similarity from already built models.
pub fn similarity_of_models(
    t1: &Tuple,
    b1: &BasicTuple,
    t2: &Tuple,
    b2: &BasicTuple,
    tol: &Tolerances,
) -> Result<SimilarityVerdict> {
    b1.universe.same_as(&b2.universe)?;
    if t1.variant() != t2.variant() {
        return Err(Error::UniverseMismatch("unilateral versus bilateral tuple".into()));
    }
    let same_shape = t1.dim() == t2.dim() && b1.rank() == b2.rank();
    let kernel_distance = if same_shape {
        projector_distance(&b1.n_basis, &b2.n_basis)
    } else {
        1.0
    };
    let compression_residual = (b1.rank() == b2.rank()).then(|| {
        let psi = b2.n_basis.adjoint() * &b1.n_basis;
        relative_residual(&(&psi * &b1.model_l), &(&b2.model_l * &psi))
    });
    let similar = kernel_distance <= tol.sim_tol;
    let mut verdict = SimilarityVerdict {
        similar,
        status: SimilarityStatus::NotSimilar,
        kernel_distance,
        sim_tol: tol.sim_tol,
        connecting_map: None,
        certificate: None,
        cert_tol: tol.cert_tol,
        unitarity_defect: None,
        compression_residual,
    };
    if !similar {
        return Ok(verdict);
    }
    let psi = b2.n_basis.adjoint() * &b1.n_basis;
    let c1_inv = inverse(&b1.c_restricted, "C₁|𝒩")?;
    let map = &b2.c_restricted * psi * c1_inv;
    let w1 = t1.generator_matrix();
    let w2 = t2.generator_matrix();
    let cert = [
        relative_residual(&(&map * t1.t()), &(t2.t() * &map)),
        relative_residual(&(&map * t1.l()), &(t2.l() * &map)),
        relative_residual(&(&map * w1), &w2),
    ];
    verdict.status = if cert.iter().all(|&r| r <= tol.cert_tol) {
        SimilarityStatus::Similar
    } else {
        SimilarityStatus::KernelOnly
    };
    if b1.source_report.is_parseval && b2.source_report.is_parseval {
        let d = map.nrows();
        verdict.unitarity_defect = Some(spectral_norm(
            &(map.adjoint() * &map - DMatrix::<C64>::identity(d, d)),
        ));
    }
    verdict.certificate = Some(cert);
    verdict.connecting_map = Some(map);
    Ok(verdict)
}

pub fn similarity(t1: &Tuple, t2: &Tuple, u: &Universe, tol: &Tolerances) -> Result<SimilarityVerdict> {
    if t1.n_gen() != t2.n_gen() {
        return Err(Error::UniverseMismatch(format!(
            "{} versus {} generators",
            t1.n_gen(),
            t2.n_gen()
        )));
    }
    let b1 = build_basic_tuple(t1, u, tol)?;
    let b2 = build_basic_tuple(t2, u, tol)?;
    similarity_of_models(t1, &b1, t2, &b2, tol)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RieszClass {
    Riesz,
    FrameProper,
    NotFrame,
}

pub fn riesz_classify(t: &Tuple, u: &Universe, tol: &Tolerances) -> Result<RieszClass> {
    let r = frame_bounds(t, u, tol)?;
    Ok(if !r.is_frame {
        RieszClass::NotFrame
    } else if r.kernel_dim == 0 {
        RieszClass::Riesz
    } else {
        RieszClass::FrameProper
    })
}
