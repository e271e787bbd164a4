//! Finite discretization of `L²(𝕋, H²_{ℓ²(I)})` and `L²(𝕋², ℓ²(I))`.
//!
//! The circle is replaced by the cyclic group of `N`-th roots of unity
//! `λ_t = exp(2πi t/N)` with the normalized counting measure, so the
//! bilateral shifts are exactly unitary. In the unilateral universe the
//! Hardy direction is stored as z-coefficients of degree `< M_z`; the
//! pointwise unilateral shift `Ŝ` drops the top coefficient and reports
//! what it dropped.
//!
//! A [`CoefField`] stores grid values `f[t][j][i]`:
//!
//! * unilateral: `t` is the λ-grid index, `j` the z-degree, `i` the
//!   generator coordinate;
//! * bilateral: `t` and `j` are indices on the `z₁` and `z₂` grids.
//!
//! Both layouts are row-major in `(t, j, i)`, so the fiber over a grid
//! point is a contiguous slice. Coefficient vectors in the orthonormal
//! basis `UᵏŜʲϕᵢ` (resp. `U₁ᵏU₂ʲϕᵢ`) use the same `(k, j, i)` layout and
//! are obtained by a DFT along the grid axes.

use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector};
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::C64;

/// Largest admissible number of complex entries in a universe.
pub const MAX_DIM: usize = 1 << 22;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Unilateral,
    Bilateral,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Unilateral => "unilateral",
            Mode::Bilateral => "bilateral",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "UniverseRepr", into = "UniverseRepr")]
pub struct Universe {
    mode: Mode,
    n_lambda: usize,
    second: usize,
    n_gen: usize,
}

#[allow(non_snake_case)]
#[derive(Serialize, Deserialize)]
struct UniverseRepr {
    mode: Mode,
    N_lambda: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    M_z: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    N2: Option<usize>,
    n_gen: usize,
}

impl TryFrom<UniverseRepr> for Universe {
    type Error = Error;

    fn try_from(r: UniverseRepr) -> Result<Self> {
        let second = match (r.mode, r.M_z, r.N2) {
            (Mode::Unilateral, Some(m), None) => m,
            (Mode::Bilateral, None, Some(n2)) => n2,
            _ => {
                return Err(Error::InvalidUniverse(
                    "unilateral universes carry M_z, bilateral ones N2".into(),
                ))
            }
        };
        Universe::new(r.mode, r.N_lambda, second, r.n_gen)
    }
}

impl From<Universe> for UniverseRepr {
    fn from(u: Universe) -> Self {
        UniverseRepr {
            mode: u.mode,
            N_lambda: u.n_lambda,
            M_z: u.m_z(),
            N2: u.n2(),
            n_gen: u.n_gen,
        }
    }
}

/// Index of the canonical basis element `UᵏŜʲϕᵢ` (or `U₁ᵏU₂ʲϕᵢ`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BasisIndex {
    /// Power of the bilateral shift; taken modulo `N_lambda`.
    pub k: i64,
    /// Unilateral-shift power in `[0, M_z)`, or second bilateral power
    /// taken modulo `N2`.
    pub j: i64,
    pub i: usize,
}

impl BasisIndex {
    pub fn new(k: i64, j: i64, i: usize) -> Self {
        BasisIndex { k, j, i }
    }
}

/// The shift operators acting on a universe.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Shift {
    U,
    UStar,
    Shat,
    ShatStar,
    U1,
    U1Star,
    U2,
    U2Star,
}

impl Shift {
    pub fn adjoint(self) -> Shift {
        match self {
            Shift::U => Shift::UStar,
            Shift::UStar => Shift::U,
            Shift::Shat => Shift::ShatStar,
            Shift::ShatStar => Shift::Shat,
            Shift::U1 => Shift::U1Star,
            Shift::U1Star => Shift::U1,
            Shift::U2 => Shift::U2Star,
            Shift::U2Star => Shift::U2,
        }
    }

    pub fn mode(self) -> Mode {
        match self {
            Shift::U | Shift::UStar | Shift::Shat | Shift::ShatStar => Mode::Unilateral,
            _ => Mode::Bilateral,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Shift::U => "U",
            Shift::UStar => "U*",
            Shift::Shat => "Ŝ",
            Shift::ShatStar => "Ŝ*",
            Shift::U1 => "U1",
            Shift::U1Star => "U1*",
            Shift::U2 => "U2",
            Shift::U2Star => "U2*",
        }
    }

    /// The shift playing the role of `T` in the model: `U` or `U₁`.
    pub fn first(mode: Mode) -> Shift {
        match mode {
            Mode::Unilateral => Shift::U,
            Mode::Bilateral => Shift::U1,
        }
    }

    /// The shift playing the role of `L` in the model: `Ŝ` or `U₂`.
    pub fn second(mode: Mode) -> Shift {
        match mode {
            Mode::Unilateral => Shift::Shat,
            Mode::Bilateral => Shift::U2,
        }
    }
}

/// `exp(2πi e/n)` with the exponent reduced first.
pub fn root_of_unity(n: usize, e: i64) -> C64 {
    let r = e.rem_euclid(n as i64) as f64;
    C64::from_polar(1.0, TAU * r / n as f64)
}

impl Universe {
    pub fn new(mode: Mode, n_lambda: usize, second: usize, n_gen: usize) -> Result<Self> {
        if n_lambda == 0 || second == 0 || n_gen == 0 {
            return Err(Error::InvalidUniverse(format!(
                "all sizes must be at least 1 (got N_lambda={n_lambda}, {}={second}, n_gen={n_gen})",
                match mode {
                    Mode::Unilateral => "M_z",
                    Mode::Bilateral => "N2",
                }
            )));
        }
        let dim = n_lambda
            .checked_mul(second)
            .and_then(|d| d.checked_mul(n_gen))
            .filter(|&d| d <= MAX_DIM)
            .ok_or_else(|| {
                Error::InvalidUniverse(format!("dimension exceeds the limit of {MAX_DIM} entries"))
            })?;
        debug_assert!(dim > 0);
        Ok(Universe {
            mode,
            n_lambda,
            second,
            n_gen,
        })
    }

    pub fn unilateral(n_lambda: usize, m_z: usize, n_gen: usize) -> Result<Self> {
        Self::new(Mode::Unilateral, n_lambda, m_z, n_gen)
    }

    pub fn bilateral(n1: usize, n2: usize, n_gen: usize) -> Result<Self> {
        Self::new(Mode::Bilateral, n1, n2, n_gen)
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn n_lambda(&self) -> usize {
        self.n_lambda
    }

    /// `M_z` in the unilateral universe, `N2` in the bilateral one.
    pub fn second_len(&self) -> usize {
        self.second
    }

    pub fn m_z(&self) -> Option<usize> {
        (self.mode == Mode::Unilateral).then_some(self.second)
    }

    pub fn n2(&self) -> Option<usize> {
        (self.mode == Mode::Bilateral).then_some(self.second)
    }

    pub fn n_gen(&self) -> usize {
        self.n_gen
    }

    pub fn dim(&self) -> usize {
        self.n_lambda * self.second * self.n_gen
    }

    /// Number of grid points carrying a fiber.
    pub fn points(&self) -> usize {
        match self.mode {
            Mode::Unilateral => self.n_lambda,
            Mode::Bilateral => self.n_lambda * self.second,
        }
    }

    /// Dimension of the fiber space over one grid point.
    pub fn fiber_dim(&self) -> usize {
        match self.mode {
            Mode::Unilateral => self.second * self.n_gen,
            Mode::Bilateral => self.n_gen,
        }
    }

    /// `λ_t` (or `z₁` at grid index `t`).
    pub fn grid_point(&self, t: usize) -> C64 {
        root_of_unity(self.n_lambda, t as i64)
    }

    pub fn same_as(&self, other: &Universe) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::UniverseMismatch(format!("{self:?} vs {other:?}")))
        }
    }

    pub fn require_mode(&self, mode: Mode, op: &str) -> Result<()> {
        if self.mode == mode {
            Ok(())
        } else {
            Err(Error::UniverseMismatch(format!(
                "{op} needs a {mode} universe, got {}",
                self.mode
            )))
        }
    }

    #[inline]
    pub fn flat(&self, t: usize, j: usize, i: usize) -> usize {
        (t * self.second + j) * self.n_gen + i
    }

    /// `(t, j, i)` of a flat position.
    #[inline]
    pub fn unflat(&self, idx: usize) -> (usize, usize, usize) {
        let i = idx % self.n_gen;
        let rest = idx / self.n_gen;
        (rest / self.second, rest % self.second, i)
    }

    pub fn flat_index(&self, idx: BasisIndex) -> Result<usize> {
        if idx.i >= self.n_gen {
            return Err(Error::IndexOutOfRange(format!(
                "generator {} not below n_gen = {}",
                idx.i, self.n_gen
            )));
        }
        let k = idx.k.rem_euclid(self.n_lambda as i64) as usize;
        let j = match self.mode {
            Mode::Unilateral => {
                if idx.j < 0 || idx.j >= self.second as i64 {
                    return Err(Error::IndexOutOfRange(format!(
                        "z-degree {} outside [0, {})",
                        idx.j, self.second
                    )));
                }
                idx.j as usize
            }
            Mode::Bilateral => idx.j.rem_euclid(self.second as i64) as usize,
        };
        Ok(self.flat(k, j, idx.i))
    }

    pub fn basis_index(&self, flat: usize) -> BasisIndex {
        let (k, j, i) = self.unflat(flat);
        BasisIndex::new(k as i64, j as i64, i)
    }

    /// Canonical basis indices in coefficient order.
    pub fn indices(&self) -> impl Iterator<Item = BasisIndex> + '_ {
        (0..self.dim()).map(|q| self.basis_index(q))
    }

    fn check_shift(&self, shift: Shift) -> Result<()> {
        self.require_mode(shift.mode(), shift.name())
    }

    /// Where the shift sends the basis element at coefficient position
    /// `flat`; `None` when the truncated `Ŝ`/`Ŝ*` annihilates it.
    pub fn shift_target(&self, shift: Shift, flat: usize) -> Option<usize> {
        let (k, j, i) = self.unflat(flat);
        let n = self.n_lambda;
        let m = self.second;
        match shift {
            Shift::U | Shift::U1 => Some(self.flat((k + 1) % n, j, i)),
            Shift::UStar | Shift::U1Star => Some(self.flat((k + n - 1) % n, j, i)),
            Shift::Shat => (j + 1 < m).then(|| self.flat(k, j + 1, i)),
            Shift::ShatStar => (j >= 1).then(|| self.flat(k, j - 1, i)),
            Shift::U2 => Some(self.flat(k, (j + 1) % m, i)),
            Shift::U2Star => Some(self.flat(k, (j + m - 1) % m, i)),
        }
    }

    /// Shift applied to a coefficient vector.
    pub fn shift_coefficients(&self, shift: Shift, coeffs: &[C64]) -> Result<Vec<C64>> {
        self.check_shift(shift)?;
        if coeffs.len() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "coefficient vector of length {} in a universe of dim {}",
                coeffs.len(),
                self.dim()
            )));
        }
        let mut out = vec![C64::new(0.0, 0.0); coeffs.len()];
        for (q, &v) in coeffs.iter().enumerate() {
            if let Some(target) = self.shift_target(shift, q) {
                out[target] = v;
            }
        }
        Ok(out)
    }

    /// Shift applied to every column of a matrix in coefficient coordinates.
    pub fn shift_columns(&self, shift: Shift, m: &DMatrix<C64>) -> Result<DMatrix<C64>> {
        self.check_shift(shift)?;
        if m.nrows() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{} rows in a universe of dim {}",
                m.nrows(),
                self.dim()
            )));
        }
        let mut out = DMatrix::zeros(m.nrows(), m.ncols());
        for q in 0..self.dim() {
            if let Some(target) = self.shift_target(shift, q) {
                out.set_row(target, &m.row(q));
            }
        }
        Ok(out)
    }

    /// Dense matrix of a shift in coefficient coordinates.
    pub fn shift_matrix(&self, shift: Shift) -> Result<DMatrix<C64>> {
        self.shift_columns(shift, &DMatrix::identity(self.dim(), self.dim()))
    }

    /// Coefficient vector of `f` in the canonical orthonormal basis:
    /// `c[k][j][i] = ⟨f, UᵏŜʲϕᵢ⟩` (resp. `⟨f, U₁ᵏU₂ʲϕᵢ⟩`).
    pub fn coefficients(&self, f: &CoefField) -> Result<DVector<C64>> {
        self.same_as(&f.universe)?;
        let mut data = f.data.clone();
        self.dft_axes(&mut data, true);
        let scale = 1.0 / self.points() as f64;
        Ok(DVector::from_iterator(
            data.len(),
            data.into_iter().map(|v| v * scale),
        ))
    }

    /// Inverse of [`Universe::coefficients`].
    pub fn field_from_coefficients(&self, coeffs: &[C64]) -> Result<CoefField> {
        if coeffs.len() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "coefficient vector of length {} in a universe of dim {}",
                coeffs.len(),
                self.dim()
            )));
        }
        let mut data = coeffs.to_vec();
        self.dft_axes(&mut data, false);
        CoefField::from_data(*self, data)
    }

    /// Fields represented by the columns of a coefficient-coordinate matrix.
    pub fn fields_from_columns(&self, m: &DMatrix<C64>) -> Result<Vec<CoefField>> {
        (0..m.ncols())
            .map(|c| {
                let col: Vec<C64> = m.column(c).iter().copied().collect();
                self.field_from_coefficients(&col)
            })
            .collect()
    }

    /// Coefficient-coordinate matrix whose columns are the given fields.
    pub fn columns_from_fields(&self, fields: &[CoefField]) -> Result<DMatrix<C64>> {
        let mut m = DMatrix::zeros(self.dim(), fields.len());
        for (c, f) in fields.iter().enumerate() {
            m.set_column(c, &self.coefficients(f)?);
        }
        Ok(m)
    }

    /// Unnormalized DFT along the grid axes. Forward uses `exp(−2πi tk/N)`.
    fn dft_axes(&self, data: &mut [C64], forward: bool) {
        let mut planner = FftPlanner::<f64>::new();
        let n = self.n_lambda;
        let m = self.second;
        let g = self.n_gen;
        let run = |planner: &mut FftPlanner<f64>,
                   data: &mut [C64],
                   len: usize,
                   stride: usize,
                   starts: &mut dyn Iterator<Item = usize>| {
            if len == 1 {
                return;
            }
            let fft = if forward {
                planner.plan_fft_forward(len)
            } else {
                planner.plan_fft_inverse(len)
            };
            let mut buf = vec![C64::new(0.0, 0.0); len];
            for start in starts {
                for (s, slot) in buf.iter_mut().enumerate() {
                    *slot = data[start + s * stride];
                }
                fft.process(&mut buf);
                for (s, v) in buf.iter().enumerate() {
                    data[start + s * stride] = *v;
                }
            }
        };
        // Along t: stride m·g, one line per (j, i).
        run(&mut planner, data, n, m * g, &mut (0..m * g));
        if self.mode == Mode::Bilateral {
            // Along t₂: stride g, one line per (t, i).
            run(
                &mut planner,
                data,
                m,
                g,
                &mut (0..n).flat_map(|t| (0..g).map(move |i| t * m * g + i)),
            );
        }
    }
}

/// One element of the truncated function space, stored by grid values.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefField {
    universe: Universe,
    data: Vec<C64>,
}

impl CoefField {
    pub fn zeros(u: Universe) -> Self {
        CoefField {
            universe: u,
            data: vec![C64::new(0.0, 0.0); u.dim()],
        }
    }

    pub fn from_data(u: Universe, data: Vec<C64>) -> Result<Self> {
        if data.len() != u.dim() {
            return Err(Error::DimensionMismatch(format!(
                "field data of length {} in a universe of dim {}",
                data.len(),
                u.dim()
            )));
        }
        Ok(CoefField { universe: u, data })
    }

    /// Field with entries `f(t, j, i)`.
    pub fn from_fn(u: Universe, mut f: impl FnMut(usize, usize, usize) -> C64) -> Self {
        let data = (0..u.dim())
            .map(|q| {
                let (t, j, i) = u.unflat(q);
                f(t, j, i)
            })
            .collect();
        CoefField { universe: u, data }
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<C64> {
        self.data
    }

    pub fn get(&self, t: usize, j: usize, i: usize) -> C64 {
        self.data[self.universe.flat(t, j, i)]
    }

    /// Fiber `f(p)` over grid point `p` (see [`Universe::points`]).
    pub fn fiber(&self, p: usize) -> &[C64] {
        let d = self.universe.fiber_dim();
        &self.data[p * d..(p + 1) * d]
    }

    pub fn fiber_mut(&mut self, p: usize) -> &mut [C64] {
        let d = self.universe.fiber_dim();
        &mut self.data[p * d..(p + 1) * d]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum::<f64>() / self.universe.points() as f64
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&self, s: C64) -> CoefField {
        CoefField {
            universe: self.universe,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    pub fn add(&self, other: &CoefField) -> Result<CoefField> {
        self.universe.same_as(&other.universe)?;
        Ok(CoefField {
            universe: self.universe,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &CoefField) -> Result<CoefField> {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    fn map_points(&self, factor: impl Fn(usize, usize) -> C64) -> CoefField {
        let u = self.universe;
        let data = self
            .data
            .iter()
            .enumerate()
            .map(|(q, v)| {
                let (t, j, _) = u.unflat(q);
                v * factor(t, j)
            })
            .collect();
        CoefField { universe: u, data }
    }
}

/// The discretized `UᵏŜʲϕᵢ` (unilateral) or `U₁ᵏU₂ʲϕᵢ` (bilateral).
pub fn basis_element(u: &Universe, idx: BasisIndex) -> Result<CoefField> {
    let flat = u.flat_index(idx)?;
    let (_, j0, i0) = u.unflat(flat);
    let n = u.n_lambda();
    Ok(match u.mode() {
        Mode::Unilateral => CoefField::from_fn(*u, |t, j, i| {
            if j == j0 && i == i0 {
                root_of_unity(n, t as i64 * idx.k)
            } else {
                C64::new(0.0, 0.0)
            }
        }),
        Mode::Bilateral => {
            let n2 = u.second_len();
            CoefField::from_fn(*u, |t1, t2, i| {
                if i == i0 {
                    root_of_unity(n, t1 as i64 * idx.k) * root_of_unity(n2, t2 as i64 * idx.j)
                } else {
                    C64::new(0.0, 0.0)
                }
            })
        }
    })
}

/// `⟨f, g⟩`, conjugate-linear in `g`, with the normalized grid measure.
pub fn inner(f: &CoefField, g: &CoefField) -> Result<C64> {
    f.universe.same_as(&g.universe)?;
    let s: C64 = f.data.iter().zip(&g.data).map(|(a, b)| a * b.conj()).sum();
    Ok(s / f.universe.points() as f64)
}

/// `(Uf)(λ) = λ f(λ)`.
pub fn apply_u(f: &CoefField) -> Result<CoefField> {
    f.universe.require_mode(Mode::Unilateral, "U")?;
    let u = f.universe;
    Ok(f.map_points(|t, _| u.grid_point(t)))
}

/// `(U*f)(λ) = λ̄ f(λ)`.
pub fn apply_u_star(f: &CoefField) -> Result<CoefField> {
    f.universe.require_mode(Mode::Unilateral, "U*")?;
    let u = f.universe;
    Ok(f.map_points(|t, _| u.grid_point(t).conj()))
}

/// Pointwise unilateral shift: z-degree `j → j+1`. The top coefficient is
/// dropped; its norm is returned alongside (zero when the shift is exact).
pub fn apply_shat(f: &CoefField) -> Result<(CoefField, f64)> {
    let u = f.universe;
    u.require_mode(Mode::Unilateral, "Ŝ")?;
    let m = u.second_len();
    let g = u.n_gen();
    let mut out = CoefField::zeros(u);
    let mut overflow = 0.0;
    for t in 0..u.n_lambda() {
        for j in 0..m {
            for i in 0..g {
                let v = f.data[u.flat(t, j, i)];
                if j + 1 < m {
                    out.data[u.flat(t, j + 1, i)] = v;
                } else {
                    overflow += v.norm_sqr();
                }
            }
        }
    }
    Ok((out, (overflow / u.points() as f64).sqrt()))
}

/// Exact adjoint of the truncated `Ŝ`: `j → j−1`, the `j = 0` term dropped.
pub fn apply_shat_star(f: &CoefField) -> Result<CoefField> {
    let u = f.universe;
    u.require_mode(Mode::Unilateral, "Ŝ*")?;
    let m = u.second_len();
    let mut out = CoefField::zeros(u);
    for t in 0..u.n_lambda() {
        for j in 1..m {
            for i in 0..u.n_gen() {
                out.data[u.flat(t, j - 1, i)] = f.data[u.flat(t, j, i)];
            }
        }
    }
    Ok(out)
}

/// `(U₁f)(z₁, z₂) = z₁ f(z₁, z₂)`.
pub fn apply_u1(f: &CoefField) -> Result<CoefField> {
    f.universe.require_mode(Mode::Bilateral, "U1")?;
    let u = f.universe;
    Ok(f.map_points(|t, _| u.grid_point(t)))
}

pub fn apply_u1_star(f: &CoefField) -> Result<CoefField> {
    f.universe.require_mode(Mode::Bilateral, "U1*")?;
    let u = f.universe;
    Ok(f.map_points(|t, _| u.grid_point(t).conj()))
}

/// `(U₂f)(z₁, z₂) = z₂ f(z₁, z₂)`.
pub fn apply_u2(f: &CoefField) -> Result<CoefField> {
    f.universe.require_mode(Mode::Bilateral, "U2")?;
    let n2 = f.universe.second_len();
    Ok(f.map_points(|_, j| root_of_unity(n2, j as i64)))
}

pub fn apply_u2_star(f: &CoefField) -> Result<CoefField> {
    f.universe.require_mode(Mode::Bilateral, "U2*")?;
    let n2 = f.universe.second_len();
    Ok(f.map_points(|_, j| root_of_unity(n2, j as i64).conj()))
}

/// Field-level action of any shift; `Ŝ` overflow is discarded.
pub fn apply_shift(shift: Shift, f: &CoefField) -> Result<CoefField> {
    match shift {
        Shift::U => apply_u(f),
        Shift::UStar => apply_u_star(f),
        Shift::Shat => apply_shat(f).map(|(g, _)| g),
        Shift::ShatStar => apply_shat_star(f),
        Shift::U1 => apply_u1(f),
        Shift::U1Star => apply_u1_star(f),
        Shift::U2 => apply_u2(f),
        Shift::U2Star => apply_u2_star(f),
    }
}
