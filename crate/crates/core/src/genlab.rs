//! Generator experiments over a fixed pair `(T, L)`.
//!
//! With one generator, `(ℋ, T, L, v)` is a frame-tuple exactly when
//! `v = Bw` for an invertible `B` commuting with `T` and `L`, and then it is
//! similar to `(ℋ, T, L, w)`. With several generators this fails: there are
//! frame generator sets that are not similar to each other.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::io::cmatrices;
use crate::lattice::Universe;
use crate::linalg::{null_space, relative_residual, singular_values, spectral_norm};
use crate::model::{build_basic_tuple, similarity_of_models, BasicTuple, SimilarityVerdict};
use crate::random::{complex_gaussian, well_conditioned};
use crate::tolerances::Tolerances;
use crate::tuples::{frame_bounds, FrameReport, Tuple};
use crate::C64;

/// Conditioning demanded of sampled commuting maps: `σ_min > 1e−6·σ_max`.
pub const SAMPLE_CONDITION: f64 = 1e-6;

/// Joint commutant `{B : BT = TB, BL = LB}` with a Frobenius-orthonormal basis.
#[derive(Clone, Debug, Serialize)]
pub struct CommutantBasis {
    pub dim_h: usize,
    #[serde(with = "cmatrices")]
    pub basis: Vec<DMatrix<C64>>,
    pub dimension: usize,
    /// Largest `‖BT − TB‖_F + ‖BL − LB‖_F` over the basis.
    pub max_commutator: f64,
    /// Frobenius distance from the identity to the span.
    pub identity_residual: f64,
}

impl CommutantBasis {
    /// `Σ cₖBₖ`.
    pub fn combine(&self, coeffs: &[C64]) -> DMatrix<C64> {
        let d = self.dim_h;
        self.basis
            .iter()
            .zip(coeffs)
            .fold(DMatrix::zeros(d, d), |acc, (b, c)| acc + b * *c)
    }
}

/// Matrix of `X ↦ XA − AX` on column-major `vec(X)`.
fn commutator_map(a: &DMatrix<C64>) -> DMatrix<C64> {
    let d = a.nrows();
    let mut k = DMatrix::zeros(d * d, d * d);
    // vec(XA) = (Aᵀ ⊗ I) vec(X),  vec(AX) = (I ⊗ A) vec(X).
    for col in 0..d {
        for row in 0..d {
            let x = col * d + row;
            for c in 0..d {
                k[(c * d + row, x)] += a[(col, c)];
            }
            for r in 0..d {
                k[(col * d + r, x)] -= a[(r, row)];
            }
        }
    }
    k
}

/// Joint commutant of `T` and `L`. Singular values of the stacked
/// commutator map at or below `rel_tol · max(σ_max, 1)` count as zero.
pub fn commutant_basis(t: &DMatrix<C64>, l: &DMatrix<C64>, rel_tol: f64) -> Result<CommutantBasis> {
    let d = t.nrows();
    if t.ncols() != d || l.nrows() != d || l.ncols() != d {
        return Err(Error::DimensionMismatch(
            "T and L must be square of the same size".into(),
        ));
    }
    let kt = commutator_map(t);
    let kl = commutator_map(l);
    let mut stacked = DMatrix::zeros(2 * d * d, d * d);
    stacked.view_mut((0, 0), (d * d, d * d)).copy_from(&kt);
    stacked.view_mut((d * d, 0), (d * d, d * d)).copy_from(&kl);
    let scale = singular_values(&stacked).first().copied().unwrap_or(0.0).max(1.0);
    let null = null_space(&stacked, rel_tol * scale);
    let basis: Vec<DMatrix<C64>> = null
        .column_iter()
        .map(|v| DMatrix::from_column_slice(d, d, v.as_slice()))
        .collect();
    let max_commutator = basis
        .iter()
        .map(|b| (b * t - t * b).norm() + (b * l - l * b).norm())
        .fold(0.0, f64::max);
    let id = DMatrix::<C64>::identity(d, d);
    let proj = basis.iter().fold(DMatrix::zeros(d, d), |acc, b| {
        let coeff: C64 = b.iter().zip(id.iter()).map(|(x, y)| x.conj() * y).sum();
        acc + b * coeff
    });
    Ok(CommutantBasis {
        dim_h: d,
        dimension: basis.len(),
        basis,
        max_commutator,
        identity_residual: (id - proj).norm(),
    })
}

/// Random invertible element of the commutant: Gaussian combinations of
/// the basis, redrawn until `σ_min > 1e−6·σ_max`.
pub fn sample_invertible_commutant<R: Rng + ?Sized>(
    cb: &CommutantBasis,
    rng: &mut R,
    max_tries: usize,
) -> Result<DMatrix<C64>> {
    if cb.basis.is_empty() {
        return Err(Error::Precondition("empty commutant basis".into()));
    }
    for _ in 0..max_tries {
        let coeffs: Vec<C64> = (0..cb.basis.len()).map(|_| complex_gaussian(rng)).collect();
        let b = cb.combine(&coeffs);
        let s = singular_values(&b);
        let (smax, smin) = (s[0], s[s.len() - 1]);
        if smax > 0.0 && smin > SAMPLE_CONDITION * smax {
            return Ok(b);
        }
    }
    Err(Error::SamplingExhausted(max_tries))
}

/// Outcome of testing one candidate `v` against a single-generator base.
#[derive(Clone, Debug, Serialize)]
pub struct MembershipVerdict {
    /// `(ℋ, T, L, v)` is a frame-tuple.
    pub in_v: bool,
    pub frame_report: FrameReport,
    /// Similarity to the base tuple; absent when the candidate is no frame.
    pub similarity: Option<SimilarityVerdict>,
    /// Kernel criterion says similar.
    pub similar: bool,
    /// The frame pathway and the kernel pathway agree.
    pub consistent: bool,
}

/// Membership oracle for `𝒱 = {v : (ℋ, T, L, v) is a frame-tuple}` with
/// the base model built once.
pub struct MembershipTester {
    base: Tuple,
    model: BasicTuple,
    universe: Universe,
    tol: Tolerances,
}

impl MembershipTester {
    pub fn new(base: Tuple, tol: Tolerances) -> Result<Self> {
        if base.n_gen() != 1 {
            return Err(Error::Precondition(format!(
                "membership needs a single generator, base has {}",
                base.n_gen()
            )));
        }
        let universe = base.universe()?;
        let model = build_basic_tuple(&base, &universe, &tol)?;
        Ok(MembershipTester {
            base,
            model,
            universe,
            tol,
        })
    }

    pub fn base(&self) -> &Tuple {
        &self.base
    }

    pub fn test(&self, v: &DVector<C64>) -> Result<MembershipVerdict> {
        let candidate = self.base.with_generators(vec![v.clone()])?;
        let frame_report = frame_bounds(&candidate, &self.universe, &self.tol)?;
        let in_v = frame_report.is_frame;
        let similarity = if in_v {
            let model = build_basic_tuple(&candidate, &self.universe, &self.tol)?;
            Some(similarity_of_models(
                &self.base,
                &self.model,
                &candidate,
                &model,
                &self.tol,
            )?)
        } else {
            None
        };
        let similar = similarity.as_ref().is_some_and(|s| s.similar);
        Ok(MembershipVerdict {
            in_v,
            frame_report,
            similarity,
            similar,
            consistent: in_v == similar,
        })
    }
}

pub fn membership_v(base: &Tuple, v: &DVector<C64>, tol: &Tolerances) -> Result<MembershipVerdict> {
    MembershipTester::new(base.clone(), *tol)?.test(v)
}

#[derive(Clone, Debug, Serialize)]
pub struct CandidateSummary {
    /// SHA-256 of the generator entries (little-endian `re, im` pairs).
    pub hash: String,
    pub n_gen: usize,
    pub lower_bound: f64,
    pub upper_bound: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct GeneratorClassReport {
    pub candidates: Vec<CandidateSummary>,
    /// Pairwise kernel distances.
    pub distances: Vec<Vec<f64>>,
    pub similar: Vec<Vec<bool>>,
    /// Verdicts for `i < j`, row-major.
    pub verdicts: Vec<SimilarityVerdict>,
    /// Component label of every candidate under "similar".
    pub class_of: Vec<usize>,
    pub class_count_lower_bound: usize,
    pub seed: Option<u64>,
    pub tolerances: Tolerances,
}

pub fn generator_hash(t: &Tuple) -> String {
    let mut h = Sha256::new();
    for w in t.generators() {
        for c in w.iter() {
            h.update(c.re.to_le_bytes());
            h.update(c.im.to_le_bytes());
        }
    }
    hex::encode(h.finalize())
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    let mut y = x;
    while parent[y] != r {
        let next = parent[y];
        parent[y] = r;
        y = next;
    }
    r
}

/// Pairwise similarity of frame-tuples sharing `(ℋ, T, L)` and `n_gen`.
pub fn class_census(tuples: &[Tuple], tol: &Tolerances, seed: Option<u64>) -> Result<GeneratorClassReport> {
    let first = tuples
        .first()
        .ok_or_else(|| Error::Precondition("empty candidate list".into()))?;
    if let Some(t) = tuples
        .iter()
        .find(|t| !t.shares_operators(first) || t.n_gen() != first.n_gen() || t.iteration() != first.iteration())
    {
        return Err(Error::Precondition(format!(
            "candidate {} does not share (ℋ, T, L), iteration and n_gen with the first",
            generator_hash(t)
        )));
    }
    let u = first.universe()?;
    let models = tuples
        .iter()
        .map(|t| build_basic_tuple(t, &u, tol))
        .collect::<Result<Vec<_>>>()?;
    let n = tuples.len();
    let mut distances = vec![vec![0.0; n]; n];
    let mut similar = vec![vec![false; n]; n];
    let mut verdicts = Vec::new();
    let mut parent: Vec<usize> = (0..n).collect();
    for i in 0..n {
        similar[i][i] = true;
        for j in i + 1..n {
            let v = similarity_of_models(&tuples[i], &models[i], &tuples[j], &models[j], tol)?;
            distances[i][j] = v.kernel_distance;
            distances[j][i] = v.kernel_distance;
            similar[i][j] = v.similar;
            similar[j][i] = v.similar;
            if v.similar {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a.max(b)] = a.min(b);
            }
            verdicts.push(v);
        }
    }
    let mut labels = Vec::new();
    let class_of: Vec<usize> = (0..n)
        .map(|i| {
            let r = find(&mut parent, i);
            match labels.iter().position(|&x| x == r) {
                Some(k) => k,
                None => {
                    labels.push(r);
                    labels.len() - 1
                }
            }
        })
        .collect();
    let candidates = tuples
        .iter()
        .zip(&models)
        .map(|(t, m)| CandidateSummary {
            hash: generator_hash(t),
            n_gen: t.n_gen(),
            lower_bound: m.source_report.lower_bound,
            upper_bound: m.source_report.upper_bound,
        })
        .collect();
    Ok(GeneratorClassReport {
        candidates,
        distances,
        similar,
        verdicts,
        class_count_lower_bound: labels.len(),
        class_of,
        seed,
        tolerances: *tol,
    })
}

/// The two extensions `{vᵢ} ∪ {v₀ + v₁}` and `{vᵢ} ∪ {v₀ − v₁}` of a
/// generator set.
pub fn extension_pair(base: &Tuple) -> Result<(Tuple, Tuple)> {
    if base.n_gen() < 2 {
        return Err(Error::Precondition("need at least two generators".into()));
    }
    let g = base.generators();
    let pair = DMatrix::from_columns(&[g[0].clone(), g[1].clone()]);
    let s = singular_values(&pair);
    if !(s[1] > 1e-8 * s[0]) {
        return Err(Error::Precondition(
            "the first two generators are linearly dependent".into(),
        ));
    }
    let extend = |v: DVector<C64>| {
        let mut gens = g.to_vec();
        gens.push(v);
        base.with_generators(gens)
    };
    Ok((extend(&g[0] + &g[1])?, extend(&g[0] - &g[1])?))
}

/// Builds the extension pair, certifies both are frames, and classifies them.
pub fn counterexample_multigen(base: &Tuple, tol: &Tolerances) -> Result<GeneratorClassReport> {
    let (a, b) = extension_pair(base)?;
    let report = class_census(&[a, b], tol, None)?;
    if report.similar[0][1] {
        return Err(Error::InvariantViolated {
            invariant: "non-similarity of the extension pair",
            detail: format!("kernel distance {:e}", report.distances[0][1]),
        });
    }
    Ok(report)
}

/// Classes of `{v, a·v}` for the given scalars `a`, with `v` the first
/// generator of `base`.
pub fn scaled_pair_census(base: &Tuple, scalars: &[C64], tol: &Tolerances) -> Result<GeneratorClassReport> {
    let v = base.generators()[0].clone();
    let tuples = scalars
        .iter()
        .map(|a| base.with_generators(vec![v.clone(), &v * *a]))
        .collect::<Result<Vec<_>>>()?;
    class_census(&tuples, tol, None)
}

#[derive(Clone, Debug, Serialize)]
pub struct DichotomySample {
    pub in_v: bool,
    pub similar: bool,
    pub consistent: bool,
    /// Largest relative intertwining residual of the recovered map.
    pub certificate: Option<f64>,
    /// `‖B̂ − B‖/‖B‖` for the recovered connecting map (commuting draws).
    pub map_error: Option<f64>,
    /// Frame verdict of the pushforward `(BTB⁻¹, BLB⁻¹, Bw)` (non-commuting draws).
    pub pushforward_is_frame: Option<bool>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DichotomyReport {
    pub seed: u64,
    pub commutant_dimension: usize,
    pub commuting: Vec<DichotomySample>,
    pub non_commuting: Vec<DichotomySample>,
    pub all_commuting_in_v: bool,
    pub disagreements: usize,
    pub tolerances: Tolerances,
}

/// Tests `Bw` for sampled commuting maps and for generic (non-commuting)
/// well-conditioned maps.
pub fn dichotomy<R: Rng + ?Sized>(
    base: &Tuple,
    samples: usize,
    rng: &mut R,
    seed: u64,
    tol: &Tolerances,
) -> Result<DichotomyReport> {
    let tester = MembershipTester::new(base.clone(), *tol)?;
    let cb = commutant_basis(base.t(), base.l(), tol.rank_tol)?;
    let w = &base.generators()[0];
    let u = base.universe()?;
    let mut commuting = Vec::with_capacity(samples);
    for _ in 0..samples {
        let b = sample_invertible_commutant(&cb, rng, 100)?;
        let verdict = tester.test(&(&b * w))?;
        let map_error = verdict
            .similarity
            .as_ref()
            .and_then(|s| s.connecting_map.as_ref())
            .map(|m| (m - &b).norm() / b.norm());
        commuting.push(DichotomySample {
            in_v: verdict.in_v,
            similar: verdict.similar,
            consistent: verdict.consistent,
            certificate: verdict.similarity.as_ref().and_then(|s| s.max_certificate_residual()),
            map_error,
            pushforward_is_frame: None,
        });
    }
    let mut non_commuting = Vec::with_capacity(samples);
    for _ in 0..samples {
        let b = well_conditioned(rng, base.dim(), 10.0);
        let pushed = base.pushforward(&b)?;
        let pushed_frame = frame_bounds(&pushed, &u, tol)?.is_frame;
        let verdict = tester.test(&(&b * w))?;
        non_commuting.push(DichotomySample {
            in_v: verdict.in_v,
            similar: verdict.similar,
            consistent: verdict.consistent,
            certificate: verdict.similarity.as_ref().and_then(|s| s.max_certificate_residual()),
            map_error: None,
            pushforward_is_frame: Some(pushed_frame),
        });
    }
    let disagreements = commuting
        .iter()
        .chain(&non_commuting)
        .filter(|s| !s.consistent)
        .count();
    Ok(DichotomyReport {
        seed,
        commutant_dimension: cb.dimension,
        all_commuting_in_v: commuting.iter().all(|s| s.in_v && s.similar),
        commuting,
        non_commuting,
        disagreements,
        tolerances: *tol,
    })
}

/// Relative residuals `‖BT − TB‖/‖·‖` and `‖BL − LB‖/‖·‖` of a map.
pub fn commutation_residual(b: &DMatrix<C64>, t: &DMatrix<C64>, l: &DMatrix<C64>) -> f64 {
    relative_residual(&(b * t), &(t * b)).max(relative_residual(&(b * l), &(l * b)))
}

/// Norm scale `‖T‖‖B‖` used for commutant checks.
pub fn commutant_scale(b: &DMatrix<C64>, t: &DMatrix<C64>) -> f64 {
    spectral_norm(t) * spectral_norm(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;
    use crate::random::seeded;

    fn diag(v: &[f64]) -> DMatrix<C64> {
        DMatrix::from_diagonal(&DVector::from_iterator(v.len(), v.iter().map(|&x| c(x))))
    }

    #[test]
    fn commutator_map_matches_direct_products() {
        let mut rng = seeded(4);
        let a = crate::random::gaussian_matrix(&mut rng, 3, 3);
        let x = crate::random::gaussian_matrix(&mut rng, 3, 3);
        let k = commutator_map(&a);
        let vx = DVector::from_column_slice(x.as_slice());
        let lhs = k * vx;
        let rhs = &x * &a - &a * &x;
        assert!((lhs - DVector::from_column_slice(rhs.as_slice())).norm() < 1e-12);
    }

    #[test]
    fn distinct_eigenvalues_give_diagonal_commutant() {
        let cb = commutant_basis(&diag(&[1.0, 2.0]), &diag(&[1.0, 1.0]), 1e-10).unwrap();
        assert_eq!(cb.dimension, 2);
        assert!(cb.identity_residual < 1e-10);
        for b in &cb.basis {
            assert!(b[(0, 1)].norm() < 1e-12 && b[(1, 0)].norm() < 1e-12);
        }
    }

    #[test]
    fn identity_pair_commutes_with_everything() {
        let i3 = DMatrix::<C64>::identity(3, 3);
        let cb = commutant_basis(&i3, &i3, 1e-10).unwrap();
        assert_eq!(cb.dimension, 9);
    }

    #[test]
    fn sampling_is_deterministic() {
        let cb = commutant_basis(&diag(&[1.0, 2.0, 3.0]), &diag(&[1.0, 1.0, 1.0]), 1e-10).unwrap();
        let a = sample_invertible_commutant(&cb, &mut seeded(1), 10).unwrap();
        let b = sample_invertible_commutant(&cb, &mut seeded(1), 10).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn dependent_pair_rejected() {
        let t = crate::presets::full_riesz(2, 2, 2).unwrap();
        let g = t.generators()[0].clone();
        let dep = t.with_generators(vec![g.clone(), &g * c(2.0)]).unwrap();
        assert!(matches!(extension_pair(&dep), Err(Error::Precondition(_))));
    }
}
