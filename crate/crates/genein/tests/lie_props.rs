//! Property tests for brackets, subspaces and exterior algebra.

use nalgebra::{DMatrix, DVector};
use proptest::collection::vec as pvec;
use proptest::prelude::*;

use genein::lie::{basis_vector, KForm, LieAlgebra, Subspace};

/// Almost Abelian algebra: `e_n` acts on the Abelian ideal `e_1..e_{n-1}`
/// by the matrix `f`. Any `f` satisfies the Jacobi identity.
fn almost_abelian(n: usize, f_entries: &[f64]) -> LieAlgebra {
    let m = n - 1;
    let f = DMatrix::from_row_slice(m, m, f_entries);
    let mut entries = Vec::new();
    for i in 0..m {
        for k in 0..m {
            if f[(k, i)] != 0.0 {
                entries.push((i + 1, n, k + 1, -f[(k, i)]));
            }
        }
    }
    LieAlgebra::new(n, &entries).expect("almost Abelian tables are Lie")
}

fn algebra_strategy() -> impl Strategy<Value = LieAlgebra> {
    (3usize..=6)
        .prop_flat_map(|n| pvec(-2.0..2.0f64, (n - 1) * (n - 1)).prop_map(move |f| almost_abelian(n, &f)))
}

fn vector(n: usize) -> impl Strategy<Value = DVector<f64>> {
    pvec(-2.0..2.0f64, n).prop_map(|v| DVector::from_row_slice(&v))
}

fn one_form(n: usize) -> impl Strategy<Value = KForm> {
    pvec(-2.0..2.0f64, n).prop_map(|v| KForm::from_covector(&DVector::from_row_slice(&v)))
}

fn two_form_strategy(n: usize) -> impl Strategy<Value = KForm> {
    let pairs: Vec<(usize, usize)> = (1..=n)
        .flat_map(|i| ((i + 1)..=n).map(move |j| (i, j)))
        .collect();
    let count = pairs.len();
    pvec(-2.0..2.0f64, count).prop_map(move |coeffs| {
        let terms: Vec<(Vec<usize>, f64)> = pairs
            .iter()
            .zip(&coeffs)
            .map(|(&(i, j), &c)| (vec![i, j], c))
            .collect();
        KForm::from_terms(n, 2, &terms).expect("canonical indices")
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn almost_abelian_satisfies_jacobi(lie in algebra_strategy()) {
        prop_assert!(lie.jacobi_residual() < 1e-12);
    }

    #[test]
    fn bracket_is_antisymmetric(lie in algebra_strategy()) {
        let n = lie.dim();
        for i in 0..n {
            for j in 0..n {
                let forward = lie.bracket_basis(i, j);
                let backward = lie.bracket_basis(j, i);
                prop_assert!((forward + backward).amax() == 0.0);
            }
        }
    }

    #[test]
    fn differential_squares_to_zero(
        (lie, omega) in algebra_strategy().prop_flat_map(|lie| {
            let n = lie.dim();
            (Just(lie), two_form_strategy(n))
        })
    ) {
        let d_omega = omega.ce_differential(&lie).unwrap();
        let dd = d_omega.ce_differential(&lie).unwrap();
        let scale = 1.0 + d_omega.sup_norm();
        prop_assert!(dd.sup_norm() / scale < 1e-12, "d^2 = {}", dd.sup_norm());
    }

    #[test]
    fn wedge_of_one_forms_is_antisymmetric(
        (xi, eta) in (3usize..=6).prop_flat_map(|n| (one_form(n), one_form(n)))
    ) {
        // xi ^ eta = -(eta ^ xi), coefficient by coefficient.
        let forward = xi.wedge(&eta).unwrap();
        let backward = eta.wedge(&xi).unwrap();
        for (indices, value) in forward.canonical_terms() {
            prop_assert!((value + backward.get(&indices)).abs() < 1e-12);
        }
    }

    #[test]
    fn wedge_with_a_two_form_commutes(
        (xi, omega) in (3usize..=6).prop_flat_map(|n| (one_form(n), two_form_strategy(n)))
    ) {
        let forward = xi.wedge(&omega).unwrap();
        let backward = omega.wedge(&xi).unwrap();
        for (indices, value) in forward.canonical_terms() {
            prop_assert!((value - backward.get(&indices)).abs() < 1e-12);
        }
    }

    #[test]
    fn differential_obeys_the_graded_leibniz_rule(
        (lie, xi, omega) in algebra_strategy().prop_flat_map(|lie| {
            let n = lie.dim();
            (Just(lie), one_form(n), two_form_strategy(n))
        })
    ) {
        // d(xi ^ omega) = d xi ^ omega - xi ^ d omega for a one-form xi.
        let product = xi.wedge(&omega).unwrap();
        let lhs = product.ce_differential(&lie).unwrap();
        let d_xi = xi.ce_differential(&lie).unwrap();
        let d_omega = omega.ce_differential(&lie).unwrap();
        let first = d_xi.wedge(&omega).unwrap();
        let second = xi.wedge(&d_omega).unwrap();
        let scale = 1.0 + lhs.sup_norm();
        for (indices, value) in lhs.canonical_terms() {
            let rhs = first.get(&indices) - second.get(&indices);
            prop_assert!((value - rhs).abs() / scale < 1e-11);
        }
        for (indices, value) in first.canonical_terms() {
            let lhs_val = lhs.get(&indices);
            let rhs = value - second.get(&indices);
            prop_assert!((lhs_val - rhs).abs() / scale < 1e-11);
        }
    }

    #[test]
    fn contraction_is_an_antiderivation(
        (x, xi, omega) in (3usize..=6).prop_flat_map(|n| (vector(n), one_form(n), two_form_strategy(n)))
    ) {
        // x . (xi ^ omega) = xi(x) omega - xi ^ (x . omega).
        let product = xi.wedge(&omega).unwrap();
        let lhs = product.contract(&x);
        let xi_x = xi.apply(&[&x]);
        let second = xi.wedge(&omega.contract(&x)).unwrap();
        for (indices, value) in lhs.canonical_terms() {
            let rhs = xi_x * omega.get(&indices) - second.get(&indices);
            prop_assert!((value - rhs).abs() < 1e-10);
        }
    }

    #[test]
    fn form_application_is_alternating(
        (omega, x, y) in (3usize..=6).prop_flat_map(|n| (two_form_strategy(n), vector(n), vector(n)))
    ) {
        let forward = omega.apply(&[&x, &y]);
        let backward = omega.apply(&[&y, &x]);
        prop_assert!((forward + backward).abs() < 1e-10);
        prop_assert!(omega.apply(&[&x, &x]).abs() < 1e-10);
    }

    #[test]
    fn span_projection_is_idempotent(
        (n, vectors, probe) in (3usize..=6).prop_flat_map(|n| {
            (Just(n), pvec(pvec(-2.0..2.0f64, n), 1..=3), pvec(-2.0..2.0f64, n))
        })
    ) {
        let vectors: Vec<DVector<f64>> = vectors.iter().map(|v| DVector::from_row_slice(v)).collect();
        let sub = Subspace::span(n, &vectors);
        let probe = DVector::from_row_slice(&probe);
        let once = sub.project(&probe);
        let twice = sub.project(&once);
        prop_assert!((&once - twice).amax() < 1e-10);
        prop_assert!(sub.contains(&once, 1e-9));
        for v in &vectors {
            prop_assert!(sub.contains(v, 1e-8 * (1.0 + v.amax())));
        }
    }

    #[test]
    fn commutator_ideal_absorbs_brackets(lie in algebra_strategy()) {
        let ideal = lie.commutator_ideal();
        let n = lie.dim();
        for i in 0..n {
            for j in 0..ideal.dim() {
                let image = lie.bracket(&basis_vector(n, i), &ideal.basis_vector(j));
                prop_assert!(ideal.contains(&image, 1e-8 * (1.0 + image.amax())));
            }
        }
    }

    #[test]
    fn center_brackets_vanish(lie in algebra_strategy()) {
        let center = lie.center();
        let n = lie.dim();
        for j in 0..center.dim() {
            let z = center.basis_vector(j);
            for i in 0..n {
                let image = lie.bracket(&basis_vector(n, i), &z);
                prop_assert!(image.amax() < 1e-9, "central vector moved by {}", image.amax());
            }
        }
    }

    #[test]
    fn restriction_to_the_commutator_ideal_is_lie(lie in algebra_strategy()) {
        let ideal = lie.commutator_ideal();
        if ideal.dim() > 0 {
            let restricted = lie.restrict(&ideal, 1e-9).unwrap();
            prop_assert!(restricted.jacobi_residual() < 1e-9);
            prop_assert_eq!(restricted.dim(), ideal.dim());
        }
    }

    #[test]
    fn differential_encodes_the_bracket(lie in algebra_strategy()) {
        // d e^k (e_i, e_j) = -c^k_ij for every basis triple.
        let n = lie.dim();
        for k in 0..n {
            let d = KForm::basis_one_form(n, k).ce_differential(&lie).unwrap();
            for i in 0..n {
                for j in 0..n {
                    let value = d.apply(&[&basis_vector(n, i), &basis_vector(n, j)]);
                    prop_assert!((value + lie.structure_constant(i, j, k)).abs() < 1e-12);
                }
            }
        }
    }
}

#[test]
fn kernel_and_span_are_orthogonal_complements_in_rank() {
    // For random-ish integer matrices the rank-nullity identity is exact.
    let m = DMatrix::from_row_slice(3, 5, &[
        1.0, 2.0, 0.0, -1.0, 3.0,
        0.0, 1.0, 1.0, 2.0, -1.0,
        1.0, 3.0, 1.0, 1.0, 2.0,
    ]);
    let kernel = Subspace::kernel(&m);
    let columns: Vec<DVector<f64>> = (0..5).map(|j| m.column(j).into_owned()).collect();
    let image = Subspace::span(3, &columns);
    assert_eq!(kernel.dim() + image.dim(), 5);
    for j in 0..kernel.dim() {
        let v = kernel.basis_vector(j);
        assert!((&m * v).amax() < 1e-12);
    }
}
