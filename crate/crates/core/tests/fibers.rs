use nalgebra::DMatrix;
use orbitframe::fibers::{
    chi_e_detect, complement, compressed_shift_field, compute_range_function, extract_inner_factor,
    fiber_distance, fiber_restriction_check, project, range_function_of_subspace, reducing_defect,
    subspace_basis,
};
use orbitframe::lattice::{apply_u1, basis_element};
use orbitframe::linalg::spectral_norm;
use orbitframe::presets;
use orbitframe::random::{gaussian_matrix, random_field, seeded};
use orbitframe::{BasisIndex, CoefField, OperatorField, Universe, C64};

const RANK_TOL: f64 = 1e-10;

#[test]
fn collinear_generators_give_one_dimensional_fibers() {
    let u = Universe::bilateral(3, 4, 2).unwrap();
    let e0 = basis_element(&u, BasisIndex::new(0, 0, 0)).unwrap();
    let e1 = basis_element(&u, BasisIndex::new(0, 0, 1)).unwrap();
    let shifted = apply_u1(&e0).unwrap();
    let collinear = compute_range_function(&[e0.clone(), shifted], &u, RANK_TOL).unwrap();
    assert!(collinear.dims.iter().all(|&d| d == 1));
    let spanning = compute_range_function(&[e0, e1], &u, RANK_TOL).unwrap();
    assert!(spanning.dims.iter().all(|&d| d == 2));
}

#[test]
fn range_function_and_subspace_correspond() {
    let u = Universe::unilateral(5, 3, 2).unwrap();
    let mut rng = seeded(21);
    let gens: Vec<CoefField> = (0..2).map(|_| random_field(&mut rng, &u)).collect();
    let rf = compute_range_function(&gens, &u, RANK_TOL).unwrap();
    let basis = subspace_basis(&rf).unwrap();
    assert_eq!(basis.ncols(), rf.total_dim());
    let again = range_function_of_subspace(&basis, &u, RANK_TOL).unwrap();
    assert_eq!(again.dims, rf.dims);
    assert!(fiber_distance(&rf, &again).unwrap() <= 1e-10);
}

#[test]
fn projection_fixes_members_and_kills_the_complement() {
    let u = Universe::unilateral(4, 3, 1).unwrap();
    let rf = presets::monomial_fibers(&u, &[vec![1], vec![3], vec![0], vec![2]]).unwrap();
    let inside = u.fields_from_columns(&subspace_basis(&rf).unwrap()).unwrap();
    for f in &inside {
        assert!(project(&rf, f).unwrap().sub(f).unwrap().norm() <= 1e-12);
    }
    let outside = u
        .fields_from_columns(&subspace_basis(&complement(&rf).unwrap()).unwrap())
        .unwrap();
    for f in &outside {
        assert!(project(&rf, f).unwrap().norm() <= 1e-12);
    }
    let mut rng = seeded(2);
    let g = random_field(&mut rng, &u);
    let p = project(&rf, &g).unwrap();
    assert!(project(&rf, &p).unwrap().sub(&p).unwrap().norm() <= 1e-12);
}

#[test]
fn monomial_subspaces_are_reducing_and_down_invariant() {
    let u = Universe::unilateral(4, 4, 1).unwrap();
    let rf = presets::monomial_fibers(&u, &[vec![1], vec![2], vec![0], vec![3]]).unwrap();
    let d = reducing_defect(&subspace_basis(&rf).unwrap(), &u).unwrap();
    assert!(d.is_u_reducing(1e-12));
    assert!(d.is_s_star_invariant(1e-12));
    assert!(!d.is_s_invariant(1e-6));
    let full = presets::monomial_fibers(&u, &vec![vec![4]; 4]).unwrap();
    let d = reducing_defect(&subspace_basis(&full).unwrap(), &u).unwrap();
    assert!(d.max() <= 1e-12);
}

#[test]
fn monomial_complements_have_monomial_inner_factors() {
    let (n, m) = (5, 4);
    let profile = [0usize, 1, 2, 3, 4];
    let u = Universe::unilateral(n, m, 1).unwrap();
    let rows: Vec<Vec<usize>> = profile.iter().map(|&p| vec![p]).collect();
    let rf = presets::monomial_fibers(&u, &rows).unwrap();
    let inner = extract_inner_factor(&complement(&rf).unwrap()).unwrap();
    for (t, &depth) in profile.iter().enumerate() {
        if depth == m {
            assert_eq!(inner.degrees[t], None);
            assert!(inner.factors[t].is_none());
            continue;
        }
        assert_eq!(inner.degrees[t], Some(depth));
        let g = inner.factors[t].as_ref().unwrap();
        for (q, v) in g.iter().enumerate() {
            let expected = if q == depth { 1.0 } else { 0.0 };
            assert!((v - C64::new(expected, 0.0)).norm() <= 1e-12);
        }
    }
    let full = presets::monomial_fibers(&u, &vec![vec![m]; n]).unwrap();
    let none = extract_inner_factor(&complement(&full).unwrap()).unwrap();
    assert!(none.factors.iter().all(Option::is_none));
}

#[test]
fn chi_e_of_half_grid_and_whole_space() {
    let (n1, n2) = (6, 4);
    let u = Universe::bilateral(n1, n2, 1).unwrap();
    let left: Vec<bool> = (0..n1 * n2).map(|p| p / n2 < n1 / 2).collect();
    let whole = vec![true; n1 * n2];
    for mask in [left, whole] {
        let basis = subspace_basis(&presets::bilateral_mask(&u, &mask).unwrap()).unwrap();
        let chi = chi_e_detect(&basis, &u, RANK_TOL, 1e-10).unwrap();
        assert!(chi.passed);
        assert_eq!(chi.mask, mask);
        assert!(chi.forward_residual.max(chi.reverse_residual) <= 1e-10);
    }
}

#[test]
fn multiplier_norm_is_the_sup_of_fiber_norms() {
    let u = Universe::unilateral(4, 2, 2).unwrap();
    let d = u.fiber_dim();
    let mut rng = seeded(31);
    let field = OperatorField::from_fn(u, |_| gaussian_matrix(&mut rng, d, d)).unwrap();
    let m = field.matrix_in_coefficients().unwrap();
    assert!((spectral_norm(&m) - field.norm_inf()).abs() <= 1e-10 * field.norm_inf());
    let adj = field.adjoint().matrix_in_coefficients().unwrap();
    assert!((adj - m.adjoint()).norm() <= 1e-10 * m.norm());
    let id = OperatorField::identity(u).matrix_in_coefficients().unwrap();
    assert!((id - DMatrix::<C64>::identity(u.dim(), u.dim())).norm() <= 1e-12);
}

#[test]
fn restriction_is_a_fiberwise_isomorphism_exactly_when_fibers_match() {
    let u = Universe::unilateral(3, 3, 1).unwrap();
    let a = presets::monomial_fibers(&u, &[vec![1], vec![2], vec![3]]).unwrap();
    let b = presets::monomial_fibers(&u, &[vec![1], vec![1], vec![3]]).unwrap();
    let id = OperatorField::identity(u);
    assert!(fiber_restriction_check(&id, &a, &a).unwrap().is_isomorphism(1e-10));
    let mismatch = fiber_restriction_check(&id, &a, &b).unwrap();
    assert!(!mismatch.dims_match);
    assert!(!mismatch.is_isomorphism(1e-10));
    let g = compressed_shift_field(&a).unwrap();
    assert!(fiber_restriction_check(&g, &a, &a).unwrap().range_defect <= 1e-12);
}
