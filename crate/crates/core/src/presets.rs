//! Reproducible tuples and subspaces with known structure.

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::error::{Error, Result};
use crate::fibers::{subspace_basis, RangeFunction};
use crate::genlab::extension_pair;
use crate::lattice::{Mode, Shift, Universe};
use crate::linalg::c;
use crate::random::well_conditioned;
use crate::tuples::{Iteration, Tuple};
use crate::C64;

fn unit(dim: usize, q: usize) -> DVector<C64> {
    let mut v = DVector::zeros(dim);
    v[q] = c(1.0);
    v
}

/// `(universe, U, Ŝ, {ϕᵢ})` in coefficient coordinates: the basic tuple
/// whose model subspace is the whole universe.
pub fn full_riesz(n: usize, m: usize, n_gen: usize) -> Result<Tuple> {
    let u = Universe::unilateral(n, m, n_gen)?;
    Tuple::new(
        u.shift_matrix(Shift::U)?,
        u.shift_matrix(Shift::Shat)?,
        (0..n_gen).map(|i| unit(u.dim(), u.flat(0, 0, i))).collect(),
        Mode::Unilateral,
        Iteration::Cyclic { n, m },
    )
}

/// `(universe, U₁, U₂, {ϕᵢ})` on the bilateral universe.
pub fn full_riesz_bilateral(n1: usize, n2: usize, n_gen: usize) -> Result<Tuple> {
    let u = Universe::bilateral(n1, n2, n_gen)?;
    Tuple::new(
        u.shift_matrix(Shift::U1)?,
        u.shift_matrix(Shift::U2)?,
        (0..n_gen).map(|i| unit(u.dim(), u.flat(0, 0, i))).collect(),
        Mode::Bilateral,
        Iteration::Cyclic { n: n1, m: n2 },
    )
}

/// The basic tuple `(𝒩, U|𝒩, P_𝒩Ŝ|𝒩, {P_𝒩ϕᵢ})` (bilateral: `U₁|𝒩`,
/// `U₂|𝒩`) of a subspace given by an orthonormal coefficient basis. The
/// subspace must be `U`-reducing and `Ŝ*`-invariant for the result to be a
/// basic tuple.
pub fn basic_tuple_from_subspace(basis: &DMatrix<C64>, u: &Universe) -> Result<Tuple> {
    if basis.ncols() == 0 {
        return Err(Error::Precondition("empty model subspace".into()));
    }
    if basis.nrows() != u.dim() {
        return Err(Error::DimensionMismatch(format!(
            "basis with {} rows in a universe of dim {}",
            basis.nrows(),
            u.dim()
        )));
    }
    let mode = u.mode();
    let adj = basis.adjoint();
    Tuple::new(
        &adj * u.shift_columns(Shift::first(mode), basis)?,
        &adj * u.shift_columns(Shift::second(mode), basis)?,
        (0..u.n_gen())
            .map(|i| basis.row(u.flat(0, 0, i)).adjoint())
            .collect(),
        mode,
        Iteration::Cyclic {
            n: u.n_lambda(),
            m: u.second_len(),
        },
    )
}

/// Expands a per-point profile whose rows have length 1 (broadcast) or `n_gen`.
fn expand_profile<T: Copy>(rows: &[Vec<T>], points: usize, n_gen: usize, what: &str) -> Result<Vec<Vec<T>>> {
    if rows.len() != points {
        return Err(Error::Precondition(format!(
            "{what} has {} entries for {points} grid points",
            rows.len()
        )));
    }
    rows.iter()
        .map(|r| match r.len() {
            1 => Ok(vec![r[0]; n_gen]),
            k if k == n_gen => Ok(r.clone()),
            k => Err(Error::Precondition(format!(
                "{what} row of length {k}, expected 1 or {n_gen}"
            ))),
        })
        .collect()
}

/// Fibers `J(λ_t) = span{zʲεᵢ : j < m(t, i)}`: down-shift closed and
/// fiber-block, so the subspace is `U`-reducing and `Ŝ*`-invariant.
/// `profile[t]` holds `m(t, ·)` per generator, or one value for all.
pub fn monomial_fibers(u: &Universe, profile: &[Vec<usize>]) -> Result<RangeFunction> {
    u.require_mode(Mode::Unilateral, "monomial fibers")?;
    let n = u.n_gen();
    let m_z = u.second_len();
    let profile = expand_profile(profile, u.points(), n, "m-profile")?;
    let d = u.fiber_dim();
    let fibers = profile
        .iter()
        .map(|row| {
            if let Some(&bad) = row.iter().find(|&&m| m > m_z) {
                return Err(Error::Precondition(format!(
                    "m-profile entry {bad} exceeds M_z = {m_z}"
                )));
            }
            let cols: Vec<DVector<C64>> = (0..m_z)
                .flat_map(|j| (0..n).map(move |i| (j, i)))
                .filter(|&(j, i)| j < row[i])
                .map(|(j, i)| unit(d, j * n + i))
                .collect();
            Ok(if cols.is_empty() {
                DMatrix::zeros(d, 0)
            } else {
                DMatrix::from_columns(&cols)
            })
        })
        .collect::<Result<Vec<_>>>()?;
    RangeFunction::from_fibers(*u, fibers)
}

/// Synthetic basic tuple with monomial fibers over `(n, m, n_gen)`.
pub fn monomial_fibers_tuple(n: usize, m: usize, n_gen: usize, profile: &[Vec<usize>]) -> Result<Tuple> {
    let u = Universe::unilateral(n, m, n_gen)?;
    let basis = subspace_basis(&monomial_fibers(&u, profile)?)?;
    basic_tuple_from_subspace(&basis, &u)
}

/// Fibers `J(z₁, z₂) = span{εᵢ : mask[p][i]}` on a bilateral universe.
/// Rows of length 1 apply to every generator slot.
pub fn bilateral_fibers(u: &Universe, mask: &[Vec<bool>]) -> Result<RangeFunction> {
    u.require_mode(Mode::Bilateral, "bilateral fibers")?;
    let n = u.n_gen();
    let mask = expand_profile(mask, u.points(), n, "mask")?;
    let fibers = mask
        .iter()
        .map(|row| {
            let cols: Vec<DVector<C64>> = (0..n).filter(|&i| row[i]).map(|i| unit(n, i)).collect();
            if cols.is_empty() {
                DMatrix::zeros(n, 0)
            } else {
                DMatrix::from_columns(&cols)
            }
        })
        .collect();
    RangeFunction::from_fibers(*u, fibers)
}

/// `χ_E L²(𝕋²)` for a grid mask `E` (`mask[t₁·N2 + t₂]`), `n_gen = 1`.
pub fn bilateral_mask(u: &Universe, mask: &[bool]) -> Result<RangeFunction> {
    if u.n_gen() != 1 {
        return Err(Error::Precondition("a grid mask needs n_gen = 1".into()));
    }
    let rows: Vec<Vec<bool>> = mask.iter().map(|&b| vec![b]).collect();
    bilateral_fibers(u, &rows)
}

/// Synthetic bilateral basic tuple with model subspace `χ_E L²(𝕋²)`.
pub fn bilateral_mask_tuple(n1: usize, n2: usize, mask: &[bool]) -> Result<Tuple> {
    let u = Universe::bilateral(n1, n2, 1)?;
    let basis = subspace_basis(&bilateral_mask(&u, mask)?)?;
    basic_tuple_from_subspace(&basis, &u)
}

/// `T = I`, `L = diag(½, ⅓)`, `w = (1, 1)`, iterated over `j ∈ [0, m)`.
pub fn geometric_diag_with(m: usize) -> Result<Tuple> {
    let l = DMatrix::from_diagonal(&DVector::from_vec(vec![c(0.5), c(1.0 / 3.0)]));
    Tuple::new(
        DMatrix::identity(2, 2),
        l,
        vec![DVector::from_vec(vec![c(1.0), c(1.0)])],
        Mode::Unilateral,
        Iteration::Cyclic { n: 1, m },
    )
}

/// [`geometric_diag_with`] at fifty powers of `L`.
pub fn geometric_diag() -> Result<Tuple> {
    geometric_diag_with(50)
}

/// `{ϕ₀, ϕ₁, ϕ₀ + ϕ₁}` and `{ϕ₀, ϕ₁, ϕ₀ − ϕ₁}` over the full two-generator
/// universe `(n, m, 2)`.
pub fn sum_difference_pair(n: usize, m: usize) -> Result<(Tuple, Tuple)> {
    extension_pair(&full_riesz(n, m, 2)?)
}

/// Pushforward by a random map with condition number `cond`.
pub fn random_pushforward<R: Rng + ?Sized>(t: &Tuple, rng: &mut R, cond: f64) -> Result<(Tuple, DMatrix<C64>)> {
    let b = well_conditioned(rng, t.dim(), cond);
    Ok((t.pushforward(&b)?, b))
}

/// Random `m(t)` profile (one value per point) with at least one positive entry.
pub fn random_profile<R: Rng + ?Sized>(rng: &mut R, points: usize, m_z: usize, n_gen: usize) -> Vec<Vec<usize>> {
    loop {
        let p: Vec<Vec<usize>> = (0..points)
            .map(|_| (0..n_gen).map(|_| rng.random_range(0..=m_z)).collect())
            .collect();
        if p.iter().flatten().any(|&m| m > 0) {
            return p;
        }
    }
}

/// Random nonempty grid mask with the given density.
pub fn random_mask<R: Rng + ?Sized>(rng: &mut R, points: usize, density: f64) -> Vec<bool> {
    loop {
        let m: Vec<bool> = (0..points).map(|_| rng.random_bool(density)).collect();
        if m.iter().any(|&b| b) {
            return m;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tolerances::Tolerances;
    use crate::tuples::validate_tuple;

    #[test]
    fn presets_validate() {
        let tol = Tolerances::default();
        for t in [
            full_riesz(4, 3, 1).unwrap(),
            full_riesz_bilateral(3, 4, 2).unwrap(),
            geometric_diag().unwrap(),
            monomial_fibers_tuple(4, 3, 1, &[vec![1], vec![2], vec![1], vec![3]]).unwrap(),
            bilateral_mask_tuple(4, 4, &[true, false].repeat(8)).unwrap(),
        ] {
            validate_tuple(&t, &tol).unwrap();
        }
        let (a, b) = sum_difference_pair(3, 2).unwrap();
        validate_tuple(&a, &tol).unwrap();
        validate_tuple(&b, &tol).unwrap();
    }

    #[test]
    fn profile_beyond_truncation_rejected() {
        assert!(monomial_fibers_tuple(2, 3, 1, &[vec![4], vec![1]]).is_err());
        assert!(monomial_fibers_tuple(2, 3, 1, &[vec![0], vec![0]]).is_err());
        assert!(monomial_fibers_tuple(2, 3, 1, &[vec![1]]).is_err());
    }

    #[test]
    fn monomial_fixture_dimensions() {
        let t = monomial_fibers_tuple(4, 3, 2, &[vec![1], vec![2, 0], vec![1], vec![3]]).unwrap();
        assert_eq!(t.dim(), 2 + 2 + 2 + 6);
    }
}
