use nalgebra::{DMatrix, DVector};
use orbitframe::lattice::basis_element;
use orbitframe::presets;
use orbitframe::random::{gaussian_vector, random_unitary, seeded, well_conditioned};
use orbitframe::tuples::{frame_bounds, frame_bounds_of_similar, synthesis};
use orbitframe::{Iteration, Mode, Tolerances, Tuple, C64};
use rand::Rng;

fn power(m: &DMatrix<C64>, e: i64) -> DMatrix<C64> {
    let base = if e < 0 {
        m.clone().try_inverse().expect("invertible")
    } else {
        m.clone()
    };
    let mut out = DMatrix::identity(m.nrows(), m.ncols());
    for _ in 0..e.unsigned_abs() {
        out = &out * &base;
    }
    out
}

/// Commuting pair `P diag(a) P⁻¹`, `P diag(b) P⁻¹` with unimodular-ish `a`.
fn commuting_pair(seed: u64, d: usize, n_gen: usize, iteration: Iteration, mode: Mode) -> Tuple {
    let mut rng = seeded(seed);
    let p = well_conditioned(&mut rng, d, 5.0);
    let p_inv = p.clone().try_inverse().unwrap();
    let mut diag = |lo: f64, hi: f64| {
        DMatrix::from_diagonal(&DVector::from_fn(d, |_, _| {
            C64::from_polar(rng.random_range(lo..hi), rng.random_range(0.0..std::f64::consts::TAU))
        }))
    };
    let t = &p * diag(0.8, 1.2) * &p_inv;
    let l = &p * diag(0.3, 0.9) * &p_inv;
    let mut rng = seeded(seed ^ 0xabc);
    let gens = (0..n_gen).map(|_| gaussian_vector(&mut rng, d)).collect();
    Tuple::new(t, l, gens, mode, iteration).unwrap()
}

fn gram_extremes(c: &DMatrix<C64>) -> (f64, f64) {
    let ev = (c * c.adjoint()).symmetric_eigenvalues();
    let lo = ev.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = ev.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (lo.max(0.0), hi)
}

#[test]
fn synthesis_columns_are_operator_orbits() {
    let cases = [
        (Iteration::Cyclic { n: 3, m: 4 }, Mode::Unilateral),
        (Iteration::Truncated { k: 2, j: 3 }, Mode::Unilateral),
        (Iteration::Truncated { k: 1, j: 1 }, Mode::Bilateral),
    ];
    for (s, &(it, mode)) in cases.iter().enumerate() {
        let t = commuting_pair(10 + s as u64, 3, 2, it, mode);
        let u = t.universe().unwrap();
        let c = synthesis(&t, &u).unwrap();
        for (col, idx) in c.index_map.iter().enumerate() {
            let expected = power(t.t(), idx.k) * power(t.l(), idx.j) * &t.generators()[idx.i];
            let via_field = c.apply(&basis_element(&u, *idx).unwrap()).unwrap();
            let scale = 1.0 + expected.norm();
            assert!((c.matrix.column(col) - &expected).norm() <= 1e-10 * scale);
            assert!((via_field - &expected).norm() <= 1e-10 * scale);
        }
    }
}

#[test]
fn synthesis_sends_generators_and_zero() {
    let t = commuting_pair(4, 4, 3, Iteration::Cyclic { n: 2, m: 3 }, Mode::Unilateral);
    let u = t.universe().unwrap();
    let c = synthesis(&t, &u).unwrap();
    for i in 0..t.n_gen() {
        let phi = basis_element(&u, orbitframe::BasisIndex::new(0, 0, i)).unwrap();
        assert!((c.apply(&phi).unwrap() - &t.generators()[i]).norm() <= 1e-12);
    }
    let zero = orbitframe::CoefField::zeros(u);
    assert_eq!(c.apply(&zero).unwrap().norm(), 0.0);
}

#[test]
fn bounds_are_the_extreme_gram_eigenvalues() {
    let tol = Tolerances::default();
    let mut rng = seeded(77);
    let mut tuples = vec![
        commuting_pair(1, 3, 1, Iteration::Cyclic { n: 4, m: 3 }, Mode::Unilateral),
        commuting_pair(2, 5, 2, Iteration::Truncated { k: 2, j: 2 }, Mode::Unilateral),
        commuting_pair(3, 4, 1, Iteration::Truncated { k: 1, j: 2 }, Mode::Bilateral),
        presets::geometric_diag_with(10).unwrap(),
    ];
    let base = presets::monomial_fibers_tuple(4, 3, 2, &[vec![1, 0], vec![2, 1], vec![3, 3], vec![0, 2]]).unwrap();
    for _ in 0..4 {
        tuples.push(presets::random_pushforward(&base, &mut rng, 30.0).unwrap().0);
    }
    for t in &tuples {
        let u = t.universe().unwrap();
        let r = frame_bounds(t, &u, &tol).unwrap();
        let (lo, hi) = gram_extremes(&synthesis(t, &u).unwrap().matrix);
        assert!((r.upper_bound - hi).abs() <= 1e-10 * hi.max(1.0), "{} vs {hi}", r.upper_bound);
        assert!((r.lower_bound - lo).abs() <= 1e-10 * hi.max(1.0), "{} vs {lo}", r.lower_bound);
        assert!(r.eigen_cross_check <= 1e-10);
    }
}

#[test]
fn pushforwards_keep_the_frame_property() {
    let tol = Tolerances::default();
    let base = presets::monomial_fibers_tuple(3, 3, 1, &[vec![1], vec![3], vec![2]]).unwrap();
    let mut rng = seeded(5);
    for _ in 0..25 {
        let cond = rng.random_range(1.0..50.0);
        let b = well_conditioned(&mut rng, base.dim(), cond);
        let rep = frame_bounds_of_similar(&base, &b, &tol).unwrap();
        assert!(rep.original.is_frame && rep.pushed.is_frame);
        assert!(rep.sandwich_holds);
        assert!(rep.pushed.lower_bound >= rep.lower_factor * rep.original.lower_bound * (1.0 - 1e-9));
        assert!(rep.pushed.upper_bound <= rep.upper_factor * rep.original.upper_bound * (1.0 + 1e-9));
    }
}

#[test]
fn identity_and_scalar_maps_rescale_exactly() {
    let tol = Tolerances::default();
    let base = presets::full_riesz(3, 2, 1).unwrap();
    let d = base.dim();
    let id = frame_bounds_of_similar(&base, &DMatrix::identity(d, d), &tol).unwrap();
    assert!((id.pushed.lower_bound - id.original.lower_bound).abs() <= 1e-12);
    assert!((id.pushed.upper_bound - id.original.upper_bound).abs() <= 1e-12);
    let two = frame_bounds_of_similar(&base, &(DMatrix::identity(d, d) * C64::new(2.0, 0.0)), &tol).unwrap();
    assert!((two.pushed.lower_bound - 4.0).abs() <= 1e-10);
    assert!((two.pushed.upper_bound - 4.0).abs() <= 1e-10);
    let mut rng = seeded(9);
    let q = random_unitary(&mut rng, d);
    let rot = frame_bounds_of_similar(&base, &q, &tol).unwrap();
    assert!(rot.pushed.is_parseval);
}
