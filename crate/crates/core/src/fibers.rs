//! Range functions of `U`-reducing subspaces.
//!
//! A subspace `𝓜` reducing for `U` (or for `U₁`, `U₂`) is determined by its
//! fibers `J(λ) = {f(λ) : f ∈ 𝓜}`, and the orthogonal projection onto `𝓜`
//! acts pointwise: `(P_𝓜 f)(λ) = P_{J(λ)} f(λ)`. On the grid, fibers live
//! over the grid points of the universe (see [`Universe::points`]).
//!
//! Also here: Beurling generators of `Ŝ`-invariant fibers, `χ_E` masks of
//! bilateral reducing subspaces and pointwise operator-valued multipliers.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::io::{cmatrices, cvectors_opt};
use crate::lattice::{CoefField, Mode, Shift, Universe};
use crate::linalg::{
    min_singular_value, null_space, orthogonal_complement, orthonormal_range,
    orthonormality_defect, projector_distance, residual_off, spectral_norm, tall_norm, thin_svd,
};
use crate::C64;

/// Largest Gram defect accepted for a basis claimed to be orthonormal.
pub const ORTHONORMAL_TOL: f64 = 1e-10;

/// Residual allowed in the `χ_E` double inclusion.
pub const CHI_E_TOL: f64 = 1e-10;

/// Accuracy with which shifted copies of a Beurling generator must
/// reproduce its fiber.
const GENERATOR_SPAN_TOL: f64 = 1e-8;

/// Autocorrelation level below which a generator counts as unimodular.
const UNIMODULAR_TOL: f64 = 1e-12;

#[derive(Clone, Debug, Serialize)]
pub struct RangeFunction {
    pub universe: Universe,
    /// Orthonormal basis of `J(p)` for every grid point, as columns.
    #[serde(with = "cmatrices")]
    pub fibers: Vec<DMatrix<C64>>,
    pub dims: Vec<usize>,
    /// Grid points with a nonzero fiber.
    pub sigma_support: Vec<usize>,
    /// Absolute singular-value cutoff used for every fiber.
    pub cutoff: f64,
    /// Smallest ratio of kept to largest dropped singular value over the
    /// grid; `None` when no fiber dropped a nonzero value.
    pub min_gap: Option<f64>,
}

impl RangeFunction {
    pub fn from_fibers(universe: Universe, fibers: Vec<DMatrix<C64>>) -> Result<Self> {
        if fibers.len() != universe.points() {
            return Err(Error::DimensionMismatch(format!(
                "{} fibers for {} grid points",
                fibers.len(),
                universe.points()
            )));
        }
        if let Some(f) = fibers.iter().find(|f| f.nrows() != universe.fiber_dim()) {
            return Err(Error::DimensionMismatch(format!(
                "fiber basis with {} rows in a fiber space of dimension {}",
                f.nrows(),
                universe.fiber_dim()
            )));
        }
        let dims: Vec<usize> = fibers.iter().map(|f| f.ncols()).collect();
        let sigma_support = (0..dims.len()).filter(|&p| dims[p] > 0).collect();
        Ok(RangeFunction {
            universe,
            fibers,
            dims,
            sigma_support,
            cutoff: 0.0,
            min_gap: None,
        })
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }
}

fn fiber_matrix(fields: &[CoefField], p: usize) -> DMatrix<C64> {
    let d = fields[0].universe().fiber_dim();
    let mut m = DMatrix::zeros(d, fields.len());
    for (c, f) in fields.iter().enumerate() {
        m.column_mut(c).copy_from_slice(f.fiber(p));
    }
    m
}

/// Fibers of the closed span of `{Uᵏf : f ∈ generators}` (bilateral:
/// `{U₁ᵏU₂ʲf}`). Singular values at or below `rank_tol` times the largest
/// fiber singular value over the whole grid are dropped, so fibers that
/// vanish up to rounding are empty.
pub fn compute_range_function(
    generators: &[CoefField],
    u: &Universe,
    rank_tol: f64,
) -> Result<RangeFunction> {
    if generators.is_empty() {
        return Err(Error::Precondition("empty generator list".into()));
    }
    for g in generators {
        u.same_as(g.universe())?;
    }
    let svds: Vec<_> = (0..u.points())
        .map(|p| thin_svd(&fiber_matrix(generators, p)))
        .collect();
    let smax = svds
        .iter()
        .flat_map(|s| s.s.iter().copied())
        .fold(0.0, f64::max);
    let cutoff = rank_tol * smax;
    let mut min_gap: Option<f64> = None;
    let fibers = svds
        .into_iter()
        .map(|svd| {
            let sv = &svd.s;
            let keep: Vec<usize> = (0..sv.len())
                .filter(|&k| smax > 0.0 && sv[k] > cutoff)
                .collect();
            let kept_min = keep.iter().map(|&k| sv[k]).fold(f64::INFINITY, f64::min);
            let dropped_max = (0..sv.len())
                .filter(|k| !keep.contains(k))
                .map(|k| sv[k])
                .fold(0.0, f64::max);
            if !keep.is_empty() && dropped_max > 0.0 {
                let g = kept_min / dropped_max;
                min_gap = Some(min_gap.map_or(g, |m| m.min(g)));
            }
            svd.u.columns(0, keep.len()).into_owned()
        })
        .collect();
    let mut rf = RangeFunction::from_fibers(*u, fibers)?;
    rf.cutoff = cutoff;
    rf.min_gap = min_gap;
    Ok(rf)
}

/// Range function of the reducing hull of the span of the given columns
/// (coefficient coordinates).
pub fn range_function_of_subspace(
    basis: &DMatrix<C64>,
    u: &Universe,
    rank_tol: f64,
) -> Result<RangeFunction> {
    if basis.nrows() != u.dim() {
        return Err(Error::DimensionMismatch(format!(
            "basis with {} rows in a universe of dim {}",
            basis.nrows(),
            u.dim()
        )));
    }
    if basis.ncols() == 0 {
        let d = u.fiber_dim();
        return RangeFunction::from_fibers(*u, vec![DMatrix::zeros(d, 0); u.points()]);
    }
    compute_range_function(&u.fields_from_columns(basis)?, u, rank_tol)
}

/// Field supported at one grid point with fiber `v`, of norm `‖v‖`.
fn point_field(u: &Universe, p: usize, v: &[C64]) -> CoefField {
    let mut f = CoefField::zeros(*u);
    let scale = (u.points() as f64).sqrt();
    for (slot, x) in f.fiber_mut(p).iter_mut().zip(v) {
        *slot = x * scale;
    }
    f
}

/// Orthonormal basis (coefficient coordinates) of `{f : f(p) ∈ J(p) ∀p}`.
pub fn subspace_basis(rf: &RangeFunction) -> Result<DMatrix<C64>> {
    let u = rf.universe;
    let mut out = DMatrix::zeros(u.dim(), rf.total_dim());
    let mut c = 0;
    for (p, fiber) in rf.fibers.iter().enumerate() {
        for col in fiber.column_iter() {
            let v: Vec<C64> = col.iter().copied().collect();
            out.set_column(c, &u.coefficients(&point_field(&u, p, &v))?);
            c += 1;
        }
    }
    Ok(out)
}

/// Range function of `𝓜^⊥`.
pub fn complement(rf: &RangeFunction) -> Result<RangeFunction> {
    let fibers = rf.fibers.iter().map(orthogonal_complement).collect();
    RangeFunction::from_fibers(rf.universe, fibers)
}

/// `(P_𝓜 f)(p) = P_{J(p)} f(p)`.
pub fn project(rf: &RangeFunction, f: &CoefField) -> Result<CoefField> {
    rf.universe.same_as(f.universe())?;
    let mut out = CoefField::zeros(rf.universe);
    for (p, j) in rf.fibers.iter().enumerate() {
        if j.ncols() == 0 {
            continue;
        }
        let x = DVector::from_column_slice(f.fiber(p));
        let y = j * (j.adjoint() * x);
        out.fiber_mut(p).copy_from_slice(y.as_slice());
    }
    Ok(out)
}

/// Norm of `P_𝓜f − (λ ↦ P_{J(λ)} f(λ))`, with `P_𝓜` computed from an
/// arbitrary orthonormal coefficient basis of `𝓜`.
pub fn helson_residual(rf: &RangeFunction, subspace: &DMatrix<C64>, f: &CoefField) -> Result<f64> {
    let u = rf.universe;
    let coeffs = u.coefficients(f)?;
    let global = if subspace.ncols() == 0 {
        DVector::zeros(u.dim())
    } else {
        subspace * (subspace.adjoint() * &coeffs)
    };
    let pointwise = u.coefficients(&project(rf, f)?)?;
    Ok((global - pointwise).norm())
}

/// Helson identity residual with `P_𝓜` built from the fibers themselves.
pub fn helson_projection_check(rf: &RangeFunction, f: &CoefField) -> Result<f64> {
    helson_residual(rf, &subspace_basis(rf)?, f)
}

/// Orthonormal basis of the closed span of the shift orbits of the given
/// fields: `{Uᵏf}` (unilateral) or `{U₁ᵏU₂ʲf}` (bilateral).
pub fn orbit_span_basis(generators: &[CoefField], u: &Universe, rank_tol: f64) -> Result<DMatrix<C64>> {
    let mode = u.mode();
    let second_steps = match mode {
        Mode::Unilateral => 1,
        Mode::Bilateral => u.second_len(),
    };
    let mut cols = Vec::with_capacity(generators.len() * u.n_lambda() * second_steps);
    for g in generators {
        let mut row: Vec<C64> = u.coefficients(g)?.iter().copied().collect();
        for _ in 0..second_steps {
            let mut v = row.clone();
            for _ in 0..u.n_lambda() {
                cols.push(DVector::from_vec(v.clone()));
                v = u.shift_coefficients(Shift::first(mode), &v)?;
            }
            if mode == Mode::Bilateral {
                row = u.shift_coefficients(Shift::U2, &row)?;
            }
        }
    }
    if cols.is_empty() {
        return Ok(DMatrix::zeros(u.dim(), 0));
    }
    Ok(orthonormal_range(&DMatrix::from_columns(&cols), rank_tol).0)
}

/// Largest projector distance between corresponding fibers. For reducing
/// subspaces this equals the distance of the global projectors.
pub fn fiber_distance(a: &RangeFunction, b: &RangeFunction) -> Result<f64> {
    a.universe.same_as(&b.universe)?;
    Ok(a.fibers
        .iter()
        .zip(&b.fibers)
        .map(|(x, y)| projector_distance(x, y))
        .fold(0.0, f64::max))
}

/// `‖(I−P)XP‖` for the four shifts of the universe. In the bilateral
/// universe `u`/`s` refer to `U₁`/`U₂`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ReducingDefect {
    pub u_defect: f64,
    pub u_star_defect: f64,
    pub s_defect: f64,
    pub s_star_defect: f64,
}

impl ReducingDefect {
    pub fn max(&self) -> f64 {
        self.u_defect
            .max(self.u_star_defect)
            .max(self.s_defect)
            .max(self.s_star_defect)
    }

    /// Reducing for `U` (resp. `U₁`).
    pub fn is_u_reducing(&self, tol: f64) -> bool {
        self.u_defect <= tol && self.u_star_defect <= tol
    }

    pub fn is_s_star_invariant(&self, tol: f64) -> bool {
        self.s_star_defect <= tol
    }

    pub fn is_s_invariant(&self, tol: f64) -> bool {
        self.s_defect <= tol
    }
}

pub fn reducing_defect(basis: &DMatrix<C64>, u: &Universe) -> Result<ReducingDefect> {
    if basis.nrows() != u.dim() {
        return Err(Error::DimensionMismatch(format!(
            "basis with {} rows in a universe of dim {}",
            basis.nrows(),
            u.dim()
        )));
    }
    let gram = orthonormality_defect(basis);
    if gram > ORTHONORMAL_TOL {
        return Err(Error::InvariantViolated {
            invariant: "orthonormal basis",
            detail: format!("‖Q*Q − I‖ = {gram:e}"),
        });
    }
    let mode = u.mode();
    let defect = |s: Shift| -> Result<f64> {
        Ok(tall_norm(&residual_off(basis, &u.shift_columns(s, basis)?)))
    };
    let first = Shift::first(mode);
    let second = Shift::second(mode);
    Ok(ReducingDefect {
        u_defect: defect(first)?,
        u_star_defect: defect(first.adjoint())?,
        s_defect: defect(second)?,
        s_star_defect: defect(second.adjoint())?,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Coverage {
    /// The generator is unimodular: its multiples are exactly the fiber.
    Exact,
    /// The fiber is spanned by shifted copies of a non-unimodular generator
    /// that fit inside the truncation.
    Truncated,
}

/// Per-fiber Beurling generators `φ(λ)` of an `Ŝ`-invariant subspace.
#[derive(Clone, Debug, Serialize)]
pub struct InnerFactor {
    pub universe: Universe,
    /// Unit z-coefficient vectors; `None` off the support.
    #[serde(with = "cvectors_opt")]
    pub factors: Vec<Option<DVector<C64>>>,
    /// Degree of the generator polynomial.
    pub degrees: Vec<Option<usize>>,
    pub coverage: Vec<Option<Coverage>>,
    pub sigma_support: Vec<usize>,
}

/// `z^s g` truncated to the universe, for `s = 0..=M−1−deg(g)`.
fn shifted_copies(g: &DVector<C64>, degree: usize) -> DMatrix<C64> {
    let m = g.len();
    let count = m - degree;
    DMatrix::from_fn(m, count, |row, s| if row >= s { g[row - s] } else { C64::new(0.0, 0.0) })
}

/// Beurling generator of every fiber of `n_perp`: the unit element of
/// least degree, phase-normalized so its first nonzero coefficient is
/// real positive. The fiber must coincide with the span of the shifted
/// copies of that element which fit in the truncation.
pub fn extract_inner_factor(n_perp: &RangeFunction) -> Result<InnerFactor> {
    let u = n_perp.universe;
    u.require_mode(Mode::Unilateral, "inner factor extraction")?;
    if u.n_gen() != 1 {
        return Err(Error::Precondition(format!(
            "inner factors need a single generator slot, universe has {}",
            u.n_gen()
        )));
    }
    let m = u.second_len();
    let points = u.points();
    let mut factors = Vec::with_capacity(points);
    let mut degrees = Vec::with_capacity(points);
    let mut coverage = Vec::with_capacity(points);
    for (p, j) in n_perp.fibers.iter().enumerate() {
        if j.ncols() == 0 {
            factors.push(None);
            degrees.push(None);
            coverage.push(None);
            continue;
        }
        let mut found = None;
        for degree in 0..m {
            let tail = j.rows(degree + 1, m - degree - 1).into_owned();
            let null = if tail.nrows() == 0 {
                DMatrix::identity(j.ncols(), j.ncols())
            } else {
                null_space(&tail, GENERATOR_SPAN_TOL)
            };
            match null.ncols() {
                0 => continue,
                1 => {
                    found = Some((degree, j * null.column(0)));
                    break;
                }
                k => {
                    return Err(Error::StructuralFailure {
                        point: p,
                        detail: format!("{k} independent elements of least degree {degree}"),
                    })
                }
            }
        }
        let (degree, mut g) = found.ok_or_else(|| Error::StructuralFailure {
            point: p,
            detail: "no element of bounded degree".into(),
        })?;
        for coeff in g.iter_mut().skip(degree + 1) {
            *coeff = C64::new(0.0, 0.0);
        }
        let norm = g.norm();
        g /= C64::new(norm, 0.0);
        if let Some(lead) = g.iter().find(|c| c.norm() > 1e-10).copied() {
            g *= lead.conj() / lead.norm();
        }

        let (span, _) = orthonormal_range(&shifted_copies(&g, degree), 1e-12);
        let dist = projector_distance(&span, j);
        if dist > GENERATOR_SPAN_TOL {
            return Err(Error::StructuralFailure {
                point: p,
                detail: format!(
                    "fiber of dimension {} is not spanned by shifts of its least-degree element (distance {dist:e})",
                    j.ncols()
                ),
            });
        }
        let unimodular = (1..=degree).all(|s| {
            let r: C64 = (0..m - s).map(|i| g[i + s] * g[i].conj()).sum();
            r.norm() <= UNIMODULAR_TOL
        });
        factors.push(Some(g));
        degrees.push(Some(degree));
        coverage.push(Some(if unimodular {
            Coverage::Exact
        } else {
            Coverage::Truncated
        }));
    }
    Ok(InnerFactor {
        universe: u,
        factors,
        degrees,
        coverage,
        sigma_support: n_perp.sigma_support.clone(),
    })
}

/// Fibers spanned by the in-truncation multiples `zˢφ(λ)`.
pub fn resynthesize(inner: &InnerFactor) -> Result<RangeFunction> {
    let m = inner.universe.second_len();
    let fibers = inner
        .factors
        .iter()
        .zip(&inner.degrees)
        .map(|(g, d)| match (g, d) {
            (Some(g), Some(d)) => orthonormal_range(&shifted_copies(g, *d), 1e-12).0,
            _ => DMatrix::zeros(m, 0),
        })
        .collect();
    RangeFunction::from_fibers(inner.universe, fibers)
}

/// Grid mask of a bilateral reducing subspace with one generator slot.
#[derive(Clone, Debug, Serialize)]
pub struct ChiE {
    pub universe: Universe,
    /// `mask[t₁·N2 + t₂]`.
    pub mask: Vec<bool>,
    pub dims: Vec<usize>,
    pub reducing: ReducingDefect,
    /// Frobenius bound on `‖(I − χ_E)P_𝓜‖`.
    pub forward_residual: f64,
    /// Frobenius bound on `‖(I − P_𝓜)χ_E‖`.
    pub reverse_residual: f64,
    pub passed: bool,
}

impl ChiE {
    pub fn support(&self) -> Vec<usize> {
        (0..self.mask.len()).filter(|&p| self.mask[p]).collect()
    }
}

/// Detects `E` with `𝓜 = χ_E L²(𝕋²)` from an orthonormal coefficient basis.
pub fn chi_e_detect(basis: &DMatrix<C64>, u: &Universe, rank_tol: f64, red_tol: f64) -> Result<ChiE> {
    u.require_mode(Mode::Bilateral, "χ_E detection")?;
    if u.n_gen() != 1 {
        return Err(Error::Precondition(format!(
            "χ_E detection needs n_gen = 1, universe has {}",
            u.n_gen()
        )));
    }
    let reducing = reducing_defect(basis, u)?;
    if reducing.max() > red_tol {
        return Err(Error::Precondition(format!(
            "subspace is not reducing for U1 and U2 (defect {:e})",
            reducing.max()
        )));
    }
    let rf = range_function_of_subspace(basis, u, rank_tol)?;
    if let Some(p) = rf.dims.iter().position(|&d| d > 1) {
        return Err(Error::StructuralFailure {
            point: p,
            detail: format!("fiber dimension {} in a one-dimensional fiber space", rf.dims[p]),
        });
    }
    let mask: Vec<bool> = rf.dims.iter().map(|&d| d == 1).collect();
    let points = u.points();
    let sqrt_p = (points as f64).sqrt();

    // Field values of the basis: values[p, c] = f_c(p).
    let fields = u.fields_from_columns(basis)?;
    let values = DMatrix::from_fn(points, fields.len(), |p, c| fields[c].data()[p]);

    let off: f64 = (0..points)
        .filter(|&p| !mask[p])
        .map(|p| values.row(p).norm_squared())
        .sum();
    let forward_residual = (off / points as f64).sqrt();

    let on: Vec<usize> = (0..points).filter(|&p| mask[p]).collect();
    let reverse_residual = if on.is_empty() {
        0.0
    } else {
        let rows = DMatrix::from_fn(on.len(), values.ncols(), |a, c| values[(on[a], c)]);
        // Columns: (I − P_𝓜) applied to the unit point fields at E.
        let mut r = (&values * rows.adjoint()) * C64::new(-1.0 / sqrt_p, 0.0);
        for (a, &p) in on.iter().enumerate() {
            r[(p, a)] += C64::new(sqrt_p, 0.0);
        }
        r.norm() / sqrt_p
    };
    Ok(ChiE {
        universe: *u,
        mask,
        dims: rf.dims,
        reducing,
        forward_residual,
        reverse_residual,
        passed: forward_residual <= CHI_E_TOL && reverse_residual <= CHI_E_TOL,
    })
}

/// Pointwise multiplier `(F̂f)(p) = F(p)f(p)`.
#[derive(Clone, Debug, Serialize)]
pub struct OperatorField {
    pub universe: Universe,
    #[serde(with = "cmatrices")]
    pub ops: Vec<DMatrix<C64>>,
}

impl OperatorField {
    pub fn new(universe: Universe, ops: Vec<DMatrix<C64>>) -> Result<Self> {
        let d = universe.fiber_dim();
        if ops.len() != universe.points() {
            return Err(Error::DimensionMismatch(format!(
                "{} operators for {} grid points",
                ops.len(),
                universe.points()
            )));
        }
        if ops.iter().any(|m| m.nrows() != d || m.ncols() != d) {
            return Err(Error::DimensionMismatch(format!(
                "every F(p) must be {d}x{d}"
            )));
        }
        Ok(OperatorField { universe, ops })
    }

    pub fn from_fn(universe: Universe, f: impl FnMut(usize) -> DMatrix<C64>) -> Result<Self> {
        Self::new(universe, (0..universe.points()).map(f).collect())
    }

    pub fn identity(universe: Universe) -> Self {
        let d = universe.fiber_dim();
        OperatorField {
            universe,
            ops: vec![DMatrix::identity(d, d); universe.points()],
        }
    }

    pub fn apply(&self, f: &CoefField) -> Result<CoefField> {
        self.universe.same_as(f.universe())?;
        let mut out = CoefField::zeros(self.universe);
        for (p, op) in self.ops.iter().enumerate() {
            let y = op * DVector::from_column_slice(f.fiber(p));
            out.fiber_mut(p).copy_from_slice(y.as_slice());
        }
        Ok(out)
    }

    pub fn adjoint(&self) -> OperatorField {
        OperatorField {
            universe: self.universe,
            ops: self.ops.iter().map(|m| m.adjoint()).collect(),
        }
    }

    /// `self ∘ other`, pointwise.
    pub fn compose(&self, other: &OperatorField) -> Result<OperatorField> {
        self.universe.same_as(&other.universe)?;
        Ok(OperatorField {
            universe: self.universe,
            ops: self.ops.iter().zip(&other.ops).map(|(a, b)| a * b).collect(),
        })
    }

    /// `max_p ‖F(p)‖`.
    pub fn norm_inf(&self) -> f64 {
        self.ops.iter().map(spectral_norm).fold(0.0, f64::max)
    }

    /// `F̂` as a matrix in coefficient coordinates.
    pub fn matrix_in_coefficients(&self) -> Result<DMatrix<C64>> {
        let u = self.universe;
        let n = u.dim();
        let mut out = DMatrix::zeros(n, n);
        let mut e = vec![C64::new(0.0, 0.0); n];
        for q in 0..n {
            e[q] = C64::new(1.0, 0.0);
            let f = u.field_from_coefficients(&e)?;
            out.set_column(q, &u.coefficients(&self.apply(&f)?)?);
            e[q] = C64::new(0.0, 0.0);
        }
        Ok(out)
    }
}

/// `G(λ) = P_{J(λ)} S` on every fiber of a unilateral range function,
/// with `S` the truncated shift in the z-degree.
pub fn compressed_shift_field(rf: &RangeFunction) -> Result<OperatorField> {
    let u = rf.universe;
    u.require_mode(Mode::Unilateral, "compressed shift")?;
    let m = u.second_len();
    let n = u.n_gen();
    let d = u.fiber_dim();
    let shift = DMatrix::from_fn(d, d, |r, c| {
        if c % n == r % n && r / n == c / n + 1 && c / n + 1 < m {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    OperatorField::from_fn(u, |p| {
        let j = &rf.fibers[p];
        j * j.adjoint() * &shift
    })
}

/// Fiber-wise restriction `F(p)|J_from(p) → J_to(p)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FiberIsomorphism {
    /// `σ_min(J_to(p)* F(p) J_from(p))`; 0 where the dimensions differ.
    pub min_sigma: Vec<f64>,
    pub dims_match: bool,
    /// Worst `‖(I − P_{J_to})F J_from‖`: how far `F` leaves the target.
    pub range_defect: f64,
}

impl FiberIsomorphism {
    pub fn is_isomorphism(&self, tol: f64) -> bool {
        self.dims_match
            && self.range_defect <= tol
            && self.min_sigma.iter().all(|&s| s > tol)
    }
}

pub fn fiber_restriction_check(
    f: &OperatorField,
    from: &RangeFunction,
    to: &RangeFunction,
) -> Result<FiberIsomorphism> {
    f.universe.same_as(&from.universe)?;
    f.universe.same_as(&to.universe)?;
    let mut min_sigma = Vec::with_capacity(f.ops.len());
    let mut range_defect: f64 = 0.0;
    let mut dims_match = true;
    for (p, op) in f.ops.iter().enumerate() {
        let (jf, jt) = (&from.fibers[p], &to.fibers[p]);
        let image = op * jf;
        range_defect = range_defect.max(spectral_norm(&residual_off(jt, &image)));
        if jf.ncols() != jt.ncols() {
            dims_match = false;
            min_sigma.push(0.0);
        } else if jf.ncols() == 0 {
            min_sigma.push(f64::INFINITY);
        } else {
            min_sigma.push(min_singular_value(&(jt.adjoint() * image)));
        }
    }
    Ok(FiberIsomorphism {
        min_sigma,
        dims_match,
        range_defect,
    })
}
