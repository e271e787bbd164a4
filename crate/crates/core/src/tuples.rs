//! Tuples `(ℋ, T, L, {wᵢ})`, their orbit systems and synthesis operators,
//! and frame bounds read off the singular values of the synthesis matrix.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{BasisIndex, CoefField, Mode, Universe};
use crate::linalg::{
    hermitian_eigenvalues, inverse, matrix_power, min_singular_value, singular_values, spectral_norm,
};
use crate::tolerances::Tolerances;
use crate::C64;

/// Which powers `TᵏLʲ` enter the orbit system.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "IterationRepr", into = "IterationRepr")]
pub enum Iteration {
    /// `k ∈ ℤ_N`; `j ∈ [0, M)` (unilateral) or `j ∈ ℤ_M` (bilateral).
    Cyclic { n: usize, m: usize },
    /// `k ∈ [−K, K]`; `j ∈ [0, J)` (unilateral) or `j ∈ [−J, J]` (bilateral).
    Truncated { k: usize, j: usize },
}

#[allow(non_snake_case)]
#[derive(Serialize, Deserialize)]
struct IterationRepr {
    mode: String,
    N_or_K: usize,
    M_or_J: usize,
}

impl TryFrom<IterationRepr> for Iteration {
    type Error = Error;

    fn try_from(r: IterationRepr) -> Result<Self> {
        match r.mode.as_str() {
            "cyclic" => Ok(Iteration::Cyclic {
                n: r.N_or_K,
                m: r.M_or_J,
            }),
            "truncated" => Ok(Iteration::Truncated {
                k: r.N_or_K,
                j: r.M_or_J,
            }),
            other => Err(Error::Serialization(format!(
                "iteration mode must be cyclic or truncated, got {other:?}"
            ))),
        }
    }
}

impl From<Iteration> for IterationRepr {
    fn from(it: Iteration) -> Self {
        let (mode, a, b) = match it {
            Iteration::Cyclic { n, m } => ("cyclic", n, m),
            Iteration::Truncated { k, j } => ("truncated", k, j),
        };
        IterationRepr {
            mode: mode.into(),
            N_or_K: a,
            M_or_J: b,
        }
    }
}

impl Iteration {
    pub fn is_cyclic(&self) -> bool {
        matches!(self, Iteration::Cyclic { .. })
    }

    /// Exponents of `T` in column order.
    pub fn k_exponents(&self) -> Vec<i64> {
        match *self {
            Iteration::Cyclic { n, .. } => (0..n as i64).collect(),
            Iteration::Truncated { k, .. } => (-(k as i64)..=k as i64).collect(),
        }
    }

    /// Exponents of `L` in column order.
    pub fn j_exponents(&self, mode: Mode) -> Vec<i64> {
        match (*self, mode) {
            (Iteration::Cyclic { m, .. }, _) => (0..m as i64).collect(),
            (Iteration::Truncated { j, .. }, Mode::Unilateral) => (0..j as i64).collect(),
            (Iteration::Truncated { j, .. }, Mode::Bilateral) => (-(j as i64)..=j as i64).collect(),
        }
    }

    /// The universe whose canonical basis is indexed like the orbit.
    pub fn universe(&self, mode: Mode, n_gen: usize) -> Result<Universe> {
        let first = self.k_exponents().len();
        let second = self.j_exponents(mode).len();
        Universe::new(mode, first, second, n_gen)
    }
}

/// A candidate tuple: square `T`, `L` of equal size and generators `wᵢ`.
#[derive(Clone, Debug, PartialEq)]
pub struct Tuple {
    t: DMatrix<C64>,
    l: DMatrix<C64>,
    generators: Vec<DVector<C64>>,
    variant: Mode,
    iteration: Iteration,
}

impl Tuple {
    pub fn new(
        t: DMatrix<C64>,
        l: DMatrix<C64>,
        generators: Vec<DVector<C64>>,
        variant: Mode,
        iteration: Iteration,
    ) -> Result<Self> {
        let d = t.nrows();
        if d == 0 {
            return Err(Error::DimensionMismatch("ℋ must be nonzero".into()));
        }
        if t.ncols() != d || l.nrows() != d || l.ncols() != d {
            return Err(Error::DimensionMismatch(format!(
                "T is {}x{}, L is {}x{}; both must be square of the same size",
                t.nrows(),
                t.ncols(),
                l.nrows(),
                l.ncols()
            )));
        }
        if generators.is_empty() {
            return Err(Error::DimensionMismatch("at least one generator required".into()));
        }
        if let Some(w) = generators.iter().find(|w| w.len() != d) {
            return Err(Error::DimensionMismatch(format!(
                "generator of length {} in a space of dimension {d}",
                w.len()
            )));
        }
        iteration.universe(variant, generators.len())?;
        Ok(Tuple {
            t,
            l,
            generators,
            variant,
            iteration,
        })
    }

    pub fn dim(&self) -> usize {
        self.t.nrows()
    }

    pub fn t(&self) -> &DMatrix<C64> {
        &self.t
    }

    pub fn l(&self) -> &DMatrix<C64> {
        &self.l
    }

    pub fn generators(&self) -> &[DVector<C64>] {
        &self.generators
    }

    pub fn n_gen(&self) -> usize {
        self.generators.len()
    }

    pub fn variant(&self) -> Mode {
        self.variant
    }

    pub fn iteration(&self) -> Iteration {
        self.iteration
    }

    pub fn universe(&self) -> Result<Universe> {
        self.iteration.universe(self.variant, self.n_gen())
    }

    /// Generators as the columns of a `dim × n_gen` matrix.
    pub fn generator_matrix(&self) -> DMatrix<C64> {
        DMatrix::from_columns(&self.generators)
    }

    pub fn with_iteration(&self, iteration: Iteration) -> Result<Tuple> {
        Tuple::new(
            self.t.clone(),
            self.l.clone(),
            self.generators.clone(),
            self.variant,
            iteration,
        )
    }

    pub fn with_generators(&self, generators: Vec<DVector<C64>>) -> Result<Tuple> {
        Tuple::new(
            self.t.clone(),
            self.l.clone(),
            generators,
            self.variant,
            self.iteration,
        )
    }

    /// `(ℋ, BTB⁻¹, BLB⁻¹, {Bwᵢ})`.
    pub fn pushforward(&self, b: &DMatrix<C64>) -> Result<Tuple> {
        if b.nrows() != self.dim() || b.ncols() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "map is {}x{}, tuple acts on dimension {}",
                b.nrows(),
                b.ncols(),
                self.dim()
            )));
        }
        let b_inv = inverse(b, "similarity map")?;
        Tuple::new(
            b * &self.t * &b_inv,
            b * &self.l * &b_inv,
            self.generators.iter().map(|w| b * w).collect(),
            self.variant,
            self.iteration,
        )
    }

    /// Same `ℋ`, `T`, `L` (exactly) and variant.
    pub fn shares_operators(&self, other: &Tuple) -> bool {
        self.variant == other.variant && self.t == other.t && self.l == other.l
    }
}

/// Measured structural quantities of a tuple.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TupleDiagnostics {
    pub dim: usize,
    pub n_gen: usize,
    pub t_norm: f64,
    pub t_sigma_min: f64,
    pub l_norm: f64,
    pub l_sigma_min: f64,
    /// `‖TL − LT‖_F`.
    pub commutator_norm: f64,
    /// Admissible commutator size `comm_tol · max(‖T‖‖L‖, 1)`.
    pub commutator_bound: f64,
    /// `‖Tᴺ − I‖_F / √dim` in cyclic iteration.
    pub cyclic_defect: Option<f64>,
    /// `‖Lᴹ − I‖_F / √dim` in bilateral cyclic iteration.
    pub l_cyclic_defect: Option<f64>,
    /// `maxᵢ ‖Lᴹwᵢ‖` in unilateral cyclic iteration. The intertwining
    /// `LC = CŜ` holds on the truncation only when this vanishes.
    pub hardy_tail: Option<f64>,
    /// Names of the violated invariants, in check order.
    pub violations: Vec<&'static str>,
}

impl TupleDiagnostics {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

fn normalized_identity_defect(m: &DMatrix<C64>) -> f64 {
    let d = m.nrows();
    (m - DMatrix::<C64>::identity(d, d)).norm() / (d as f64).sqrt()
}

pub fn tuple_diagnostics(t: &Tuple, tol: &Tolerances) -> TupleDiagnostics {
    let t_norm = spectral_norm(&t.t);
    let l_norm = spectral_norm(&t.l);
    let t_sigma_min = min_singular_value(&t.t);
    let l_sigma_min = min_singular_value(&t.l);
    let commutator_norm = (&t.t * &t.l - &t.l * &t.t).norm();
    let commutator_bound = tol.comm_tol * (t_norm * l_norm).max(1.0);

    let mut violations = Vec::new();
    if !(t_sigma_min > tol.inv_tol * t_norm) {
        violations.push("invertibility of T");
    }
    if commutator_norm > commutator_bound {
        violations.push("commutation");
    }
    if t.variant == Mode::Bilateral && !(l_sigma_min > tol.inv_tol * l_norm) {
        violations.push("invertibility of L");
    }

    let (mut cyclic_defect, mut l_cyclic_defect, mut hardy_tail) = (None, None, None);
    if let Iteration::Cyclic { n, m } = t.iteration {
        let d = normalized_identity_defect(&matrix_power(&t.t, n));
        if d > tol.cyclic_tol {
            violations.push("cyclicity of T");
        }
        cyclic_defect = Some(d);
        match t.variant {
            Mode::Bilateral => {
                let d = normalized_identity_defect(&matrix_power(&t.l, m));
                if d > tol.cyclic_tol {
                    violations.push("cyclicity of L");
                }
                l_cyclic_defect = Some(d);
            }
            Mode::Unilateral => {
                let lm = matrix_power(&t.l, m);
                hardy_tail = Some(
                    t.generators
                        .iter()
                        .map(|w| (&lm * w).norm())
                        .fold(0.0, f64::max),
                );
            }
        }
    }

    TupleDiagnostics {
        dim: t.dim(),
        n_gen: t.n_gen(),
        t_norm,
        t_sigma_min,
        l_norm,
        l_sigma_min,
        commutator_norm,
        commutator_bound,
        cyclic_defect,
        l_cyclic_defect,
        hardy_tail,
        violations,
    }
}

/// Diagnostics, or the first violated invariant as an error.
pub fn validate_tuple(t: &Tuple, tol: &Tolerances) -> Result<TupleDiagnostics> {
    let diag = tuple_diagnostics(t, tol);
    match diag.violations.first().copied() {
        None => Ok(diag),
        Some(invariant) => {
            Err(Error::InvariantViolated {
                invariant,
                detail: format!(
                    "‖TL−LT‖_F = {:e} (bound {:e}), σ_min(T) = {:e}, σ_min(L) = {:e}, ‖Tᴺ−I‖ = {:?}, ‖Lᴹ−I‖ = {:?}",
                    diag.commutator_norm,
                    diag.commutator_bound,
                    diag.t_sigma_min,
                    diag.l_sigma_min,
                    diag.cyclic_defect,
                    diag.l_cyclic_defect
                ),
            })
        }
    }
}

fn require_universe(t: &Tuple, u: &Universe) -> Result<()> {
    let expected = t.universe()?;
    if &expected != u {
        return Err(Error::UniverseMismatch(format!(
            "tuple iteration indexes {expected:?}, got {u:?}"
        )));
    }
    Ok(())
}

/// `M^e v` for every exponent in `exps`; negative exponents use `inv`.
fn power_orbit(
    m: &DMatrix<C64>,
    inv: Option<&DMatrix<C64>>,
    v: &DVector<C64>,
    exps: &[i64],
) -> Vec<DVector<C64>> {
    let max_pos = exps.iter().copied().max().unwrap_or(0).max(0) as usize;
    let max_neg = exps.iter().copied().min().unwrap_or(0).min(0).unsigned_abs() as usize;
    let mut pos = Vec::with_capacity(max_pos + 1);
    pos.push(v.clone());
    for p in 1..=max_pos {
        let next = m * &pos[p - 1];
        pos.push(next);
    }
    let mut neg = vec![v.clone()];
    if max_neg > 0 {
        let inv = inv.expect("negative powers need the inverse");
        for p in 1..=max_neg {
            let next = inv * &neg[p - 1];
            neg.push(next);
        }
    }
    exps.iter()
        .map(|&e| {
            if e >= 0 {
                pos[e as usize].clone()
            } else {
                neg[e.unsigned_abs() as usize].clone()
            }
        })
        .collect()
}

/// The vectors `TᵏLʲwᵢ` in column order: `k`, then `j`, then `i`.
pub fn orbit_system(t: &Tuple, u: &Universe) -> Result<Vec<(BasisIndex, DVector<C64>)>> {
    require_universe(t, u)?;
    let ks = t.iteration.k_exponents();
    let js = t.iteration.j_exponents(t.variant);
    let t_inv = if ks.iter().any(|&k| k < 0) {
        Some(inverse(&t.t, "T")?)
    } else {
        None
    };
    let l_inv = if js.iter().any(|&j| j < 0) {
        Some(inverse(&t.l, "L")?)
    } else {
        None
    };
    let per_gen: Vec<Vec<Vec<DVector<C64>>>> = t
        .generators
        .iter()
        .map(|w| {
            power_orbit(&t.t, t_inv.as_ref(), w, &ks)
                .iter()
                .map(|tw| power_orbit(&t.l, l_inv.as_ref(), tw, &js))
                .collect()
        })
        .collect();
    let mut out = Vec::with_capacity(u.dim());
    for (a, &k) in ks.iter().enumerate() {
        for (b, &j) in js.iter().enumerate() {
            for (i, gen) in per_gen.iter().enumerate() {
                out.push((BasisIndex::new(k, j, i), gen[a][b].clone()));
            }
        }
    }
    Ok(out)
}

/// Synthesis operator `f ↦ Σ f^i_{kj} TᵏLʲwᵢ` as an explicit matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct SynthesisOp {
    pub matrix: DMatrix<C64>,
    pub index_map: Vec<BasisIndex>,
    pub universe: Universe,
}

impl SynthesisOp {
    /// Columns reordered to the universe's coefficient order, so that
    /// `universe_matrix() · coefficients(f) = Cf`.
    pub fn universe_matrix(&self) -> DMatrix<C64> {
        let mut out = DMatrix::zeros(self.matrix.nrows(), self.matrix.ncols());
        for (c, idx) in self.index_map.iter().enumerate() {
            let q = self
                .universe
                .flat_index(*idx)
                .expect("orbit indices lie in the universe");
            out.set_column(q, &self.matrix.column(c));
        }
        out
    }

    pub fn apply_coefficients(&self, coeffs: &DVector<C64>) -> Result<DVector<C64>> {
        if coeffs.len() != self.universe.dim() {
            return Err(Error::DimensionMismatch(format!(
                "coefficient vector of length {} for a universe of dim {}",
                coeffs.len(),
                self.universe.dim()
            )));
        }
        let mut out = DVector::zeros(self.matrix.nrows());
        for (c, idx) in self.index_map.iter().enumerate() {
            let q = self.universe.flat_index(*idx)?;
            out += self.matrix.column(c) * coeffs[q];
        }
        Ok(out)
    }

    pub fn apply(&self, f: &CoefField) -> Result<DVector<C64>> {
        let coeffs = self.universe.coefficients(f)?;
        self.apply_coefficients(&coeffs)
    }
}

pub fn synthesis(t: &Tuple, u: &Universe) -> Result<SynthesisOp> {
    let orbit = orbit_system(t, u)?;
    let mut matrix = DMatrix::zeros(t.dim(), orbit.len());
    let mut index_map = Vec::with_capacity(orbit.len());
    for (c, (idx, v)) in orbit.into_iter().enumerate() {
        matrix.set_column(c, &v);
        index_map.push(idx);
    }
    Ok(SynthesisOp {
        matrix,
        index_map,
        universe: *u,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceLevel {
    pub k: usize,
    pub j: usize,
    pub lower: f64,
    pub upper: f64,
}

/// Bound history over growing truncation windows.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Convergence {
    pub levels: Vec<ConvergenceLevel>,
    /// `B` never decreases as the window grows (it cannot, for nested systems).
    pub upper_monotone: bool,
    /// Last relative change of both bounds is at most `1e−6`.
    pub converged: bool,
    /// Last step grew `B` by more than 10%.
    pub divergence_suspected: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrameReport {
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub is_frame: bool,
    pub is_parseval: bool,
    pub is_riesz: bool,
    pub frame_tol: f64,
    pub parseval_tol: f64,
    pub rank_tol: f64,
    pub dim: usize,
    pub n_vectors: usize,
    pub rank: usize,
    pub kernel_dim: usize,
    /// Singular values of the synthesis matrix, descending.
    pub singular_spectrum: Vec<f64>,
    /// Largest deviation between `{A, B}` and the extreme eigenvalues of
    /// `CC*`, relative to `B`.
    pub eigen_cross_check: f64,
    pub convergence: Option<Convergence>,
}

const CONVERGED_CHANGE: f64 = 1e-6;
const DIVERGENCE_GROWTH: f64 = 0.1;

/// Bounds of the system formed by the columns of `c`.
pub fn frame_report_from_matrix(c: &DMatrix<C64>, tol: &Tolerances) -> FrameReport {
    let dim = c.nrows();
    let n_vectors = c.ncols();
    let spectrum = singular_values(c);
    let smax = spectrum.first().copied().unwrap_or(0.0);
    let upper = smax * smax;
    let lower = if n_vectors >= dim {
        spectrum.last().map(|s| s * s).unwrap_or(0.0)
    } else {
        0.0
    };
    let rank = spectrum
        .iter()
        .filter(|&&s| smax > 0.0 && s > tol.rank_tol * smax)
        .count();

    let eigen_cross_check = if upper > 0.0 {
        let eig = hermitian_eigenvalues(&(c * c.adjoint()));
        let emin = eig.first().copied().unwrap_or(0.0);
        let emax = eig.last().copied().unwrap_or(0.0);
        ((emax - upper).abs().max((emin - lower).abs())) / upper
    } else {
        0.0
    };

    let is_frame = upper > 0.0 && lower > tol.frame_tol * upper;
    FrameReport {
        lower_bound: lower,
        upper_bound: upper,
        is_frame,
        is_parseval: (lower - 1.0).abs() <= tol.parseval_tol
            && (upper - 1.0).abs() <= tol.parseval_tol,
        is_riesz: is_frame && rank == n_vectors,
        frame_tol: tol.frame_tol,
        parseval_tol: tol.parseval_tol,
        rank_tol: tol.rank_tol,
        dim,
        n_vectors,
        rank,
        kernel_dim: n_vectors - rank,
        singular_spectrum: spectrum,
        eigen_cross_check,
        convergence: None,
    }
}

/// Frame bounds of the orbit system over `u`. Truncated iterations carry a
/// bound history over four nested windows ending at the requested one.
pub fn frame_bounds(t: &Tuple, u: &Universe, tol: &Tolerances) -> Result<FrameReport> {
    let c = synthesis(t, u)?;
    let mut report = frame_report_from_matrix(&c.matrix, tol);
    if let Iteration::Truncated { k, j } = t.iteration {
        report.convergence = Some(truncation_history(t, k, j, &report, tol)?);
    }
    Ok(report)
}

fn truncation_history(
    t: &Tuple,
    k: usize,
    j: usize,
    full: &FrameReport,
    tol: &Tolerances,
) -> Result<Convergence> {
    let mut levels = Vec::new();
    for level in 1..=4usize {
        let (kl, jl) = ((k * level).div_ceil(4), (j * level).div_ceil(4));
        if levels
            .last()
            .is_some_and(|p: &ConvergenceLevel| p.k == kl && p.j == jl)
        {
            continue;
        }
        let (lower, upper) = if level == 4 {
            (full.lower_bound, full.upper_bound)
        } else {
            let sub = t.with_iteration(Iteration::Truncated { k: kl, j: jl });
            match sub {
                Ok(sub) => {
                    let su = sub.universe()?;
                    let r = frame_report_from_matrix(&synthesis(&sub, &su)?.matrix, tol);
                    (r.lower_bound, r.upper_bound)
                }
                // A window with no j-range is empty: both bounds vanish.
                Err(Error::InvalidUniverse(_)) => (0.0, 0.0),
                Err(e) => return Err(e),
            }
        };
        levels.push(ConvergenceLevel {
            k: kl,
            j: jl,
            lower,
            upper,
        });
    }
    let upper_monotone = levels
        .windows(2)
        .all(|w| w[1].upper >= w[0].upper * (1.0 - 1e-12));
    let (converged, divergence_suspected) = match levels.as_slice() {
        [.., a, b] if b.upper > 0.0 => {
            let du = (b.upper - a.upper).abs() / b.upper;
            let dl = (b.lower - a.lower).abs() / b.upper;
            (
                du <= CONVERGED_CHANGE && dl <= CONVERGED_CHANGE,
                a.upper > 0.0 && b.upper > a.upper * (1.0 + DIVERGENCE_GROWTH),
            )
        }
        _ => (true, false),
    };
    Ok(Convergence {
        levels,
        upper_monotone,
        converged,
        divergence_suspected,
    })
}

/// Frame bounds of `(ℋ, BTB⁻¹, BLB⁻¹, {Bwᵢ})` next to those of `t`, with
/// the sandwich `A/‖B⁻¹‖² ≤ A′` and `B′ ≤ B‖B‖²`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimilarFrameReport {
    pub original: FrameReport,
    pub pushed: FrameReport,
    /// `1/‖B⁻¹‖²`.
    pub lower_factor: f64,
    /// `‖B‖²`.
    pub upper_factor: f64,
    pub sandwich_holds: bool,
}

pub fn frame_bounds_of_similar(
    t: &Tuple,
    b_map: &DMatrix<C64>,
    tol: &Tolerances,
) -> Result<SimilarFrameReport> {
    let u = t.universe()?;
    let pushed_tuple = t.pushforward(b_map)?;
    let original = frame_bounds(t, &u, tol)?;
    let pushed = frame_bounds(&pushed_tuple, &u, tol)?;
    let b_inv = inverse(b_map, "similarity map")?;
    let inv_norm = spectral_norm(&b_inv);
    let lower_factor = 1.0 / (inv_norm * inv_norm);
    let b_norm = spectral_norm(b_map);
    let upper_factor = b_norm * b_norm;
    let slack = 1e-9;
    let sandwich_holds = pushed.lower_bound >= original.lower_bound * lower_factor * (1.0 - slack)
        && pushed.upper_bound <= original.upper_bound * upper_factor * (1.0 + slack);
    Ok(SimilarFrameReport {
        original,
        pushed,
        lower_factor,
        upper_factor,
        sandwich_holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    fn diag(v: &[f64]) -> DMatrix<C64> {
        DMatrix::from_diagonal(&DVector::from_iterator(v.len(), v.iter().map(|&x| c(x))))
    }

    fn vector(v: &[f64]) -> DVector<C64> {
        DVector::from_iterator(v.len(), v.iter().map(|&x| c(x)))
    }

    #[test]
    fn diagonal_pair_validates() {
        let t = Tuple::new(
            diag(&[1.0, -1.0]),
            diag(&[0.5, 1.0 / 3.0]),
            vec![vector(&[1.0, 1.0])],
            Mode::Unilateral,
            Iteration::Cyclic { n: 2, m: 4 },
        )
        .unwrap();
        let d = validate_tuple(&t, &Tolerances::default()).unwrap();
        assert_eq!(d.commutator_norm, 0.0);
        assert!(d.cyclic_defect.unwrap() < 1e-15);
    }

    #[test]
    fn non_commuting_pair_fails() {
        let t = DMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(1.0), c(0.0)]);
        let l = DMatrix::from_row_slice(2, 2, &[c(1.0), c(1.0), c(0.0), c(1.0)]);
        let tup = Tuple::new(
            t,
            l,
            vec![vector(&[1.0, 0.0])],
            Mode::Unilateral,
            Iteration::Cyclic { n: 2, m: 2 },
        )
        .unwrap();
        let err = validate_tuple(&tup, &Tolerances::default()).unwrap_err();
        assert!(matches!(
            err,
            Error::InvariantViolated {
                invariant: "commutation",
                ..
            }
        ));
        // TL − LT = [[0,−1],[1,0]] has Frobenius norm √2.
        let d = tuple_diagnostics(&tup, &Tolerances::default());
        assert!((d.commutator_norm - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn singular_t_fails() {
        let tup = Tuple::new(
            diag(&[1.0, 0.0]),
            diag(&[1.0, 1.0]),
            vec![vector(&[1.0, 0.0])],
            Mode::Unilateral,
            Iteration::Truncated { k: 1, j: 1 },
        )
        .unwrap();
        assert!(matches!(
            validate_tuple(&tup, &Tolerances::default()),
            Err(Error::InvariantViolated {
                invariant: "invertibility of T",
                ..
            })
        ));
    }

    #[test]
    fn shape_errors() {
        assert!(Tuple::new(
            diag(&[1.0, 1.0]),
            diag(&[1.0]),
            vec![vector(&[1.0, 0.0])],
            Mode::Unilateral,
            Iteration::Cyclic { n: 1, m: 1 },
        )
        .is_err());
        assert!(Tuple::new(
            diag(&[1.0]),
            diag(&[1.0]),
            vec![],
            Mode::Unilateral,
            Iteration::Cyclic { n: 1, m: 1 },
        )
        .is_err());
    }

    #[test]
    fn orbit_of_diagonal_powers() {
        let tup = Tuple::new(
            diag(&[1.0, 1.0]),
            diag(&[0.5, 1.0 / 3.0]),
            vec![vector(&[1.0, 1.0])],
            Mode::Unilateral,
            Iteration::Cyclic { n: 1, m: 5 },
        )
        .unwrap();
        let u = tup.universe().unwrap();
        let orbit = orbit_system(&tup, &u).unwrap();
        assert_eq!(orbit.len(), 5);
        for (idx, v) in orbit {
            let j = idx.j as i32;
            assert!((v[0] - c(0.5f64.powi(j))).norm() < 1e-15);
            assert!((v[1] - c((1.0 / 3.0f64).powi(j))).norm() < 1e-15);
        }
    }

    #[test]
    fn truncated_orbit_uses_inverse() {
        let tup = Tuple::new(
            diag(&[2.0, 4.0]),
            diag(&[1.0, 1.0]),
            vec![vector(&[1.0, 1.0])],
            Mode::Unilateral,
            Iteration::Truncated { k: 2, j: 1 },
        )
        .unwrap();
        let u = tup.universe().unwrap();
        let orbit = orbit_system(&tup, &u).unwrap();
        let ks: Vec<i64> = orbit.iter().map(|(i, _)| i.k).collect();
        assert_eq!(ks, vec![-2, -1, 0, 1, 2]);
        assert!((orbit[0].1[0] - c(0.25)).norm() < 1e-15);
        assert!((orbit[0].1[1] - c(1.0 / 16.0)).norm() < 1e-15);
        // B grows without bound as the window widens.
        let r = frame_bounds(&tup, &u, &Tolerances::default()).unwrap();
        assert!(r.convergence.as_ref().unwrap().upper_monotone);
        assert!(!r.convergence.unwrap().converged);
    }

    #[test]
    fn zero_generators_are_not_a_frame() {
        let tup = Tuple::new(
            diag(&[1.0, -1.0]),
            diag(&[1.0, 1.0]),
            vec![vector(&[0.0, 0.0])],
            Mode::Unilateral,
            Iteration::Cyclic { n: 2, m: 1 },
        )
        .unwrap();
        let r = frame_bounds(&tup, &tup.universe().unwrap(), &Tolerances::default()).unwrap();
        assert_eq!(r.lower_bound, 0.0);
        assert_eq!(r.upper_bound, 0.0);
        assert!(!r.is_frame);
    }

    #[test]
    fn scalar_similarity_scales_bounds() {
        let tup = Tuple::new(
            diag(&[1.0, -1.0]),
            diag(&[0.5, 0.25]),
            vec![vector(&[1.0, 2.0])],
            Mode::Unilateral,
            Iteration::Cyclic { n: 2, m: 3 },
        )
        .unwrap();
        let two = DMatrix::<C64>::identity(2, 2) * c(2.0);
        let r = frame_bounds_of_similar(&tup, &two, &Tolerances::default()).unwrap();
        assert!(r.sandwich_holds);
        assert!((r.pushed.lower_bound - 4.0 * r.original.lower_bound).abs() < 1e-12);
        assert!((r.pushed.upper_bound - 4.0 * r.original.upper_bound).abs() < 1e-12);
    }
}
