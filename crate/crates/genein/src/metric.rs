//! Pseudo-Riemannian scalar products on the underlying vector space:
//! signatures, musical isomorphisms, metric adjoints, inner products of
//! endomorphisms and forms, and pseudo-orthonormal frames.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::lie::{basis_vector, KForm, LieAlgebra, RANK_RTOL};

/// A non-degenerate symmetric bilinear form on R^n.
#[derive(Clone, Debug)]
pub struct ScalarProduct {
    mat: DMatrix<f64>,
    inv: DMatrix<f64>,
    /// (positive, negative) eigenvalue counts.
    signature: (usize, usize),
}

impl ScalarProduct {
    pub fn new(mat: DMatrix<f64>) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::DimensionMismatch {
                expected: mat.nrows(),
                got: mat.ncols(),
            });
        }
        let asym = (&mat - mat.transpose()).amax();
        if asym > 1e-9 * (1.0 + mat.amax()) {
            return Err(Error::NotSymmetric { residual: asym });
        }
        let sym = 0.5 * (&mat + mat.transpose());
        let (eigenvalues, eigenvectors) = crate::lie::symmetric_eigen(&sym);
        let max_abs = eigenvalues.amax();
        let min_abs = eigenvalues
            .iter()
            .fold(f64::INFINITY, |m, l| m.min(l.abs()));
        if max_abs == 0.0 || min_abs <= RANK_RTOL * max_abs {
            return Err(Error::DegenerateMetric {
                ratio: if max_abs == 0.0 { 0.0 } else { min_abs / max_abs },
            });
        }
        let pos = eigenvalues.iter().filter(|&&l| l > 0.0).count();
        let neg = eigenvalues.len() - pos;
        // Stable inverse from the eigendecomposition.
        let mut diag_inv = DMatrix::zeros(mat.nrows(), mat.nrows());
        for (i, &l) in eigenvalues.iter().enumerate() {
            diag_inv[(i, i)] = 1.0 / l;
        }
        let inv = &eigenvectors * diag_inv * eigenvectors.transpose();
        Ok(Self {
            mat: sym,
            inv,
            signature: (pos, neg),
        })
    }

    pub fn diagonal(entries: &[f64]) -> Result<Self> {
        Self::new(DMatrix::from_diagonal(&DVector::from_row_slice(entries)))
    }

    pub fn euclidean(dim: usize) -> Self {
        Self::new(DMatrix::identity(dim, dim)).expect("identity is non-degenerate")
    }

    /// diag(-1, 1, ..., 1).
    pub fn lorentzian_neg_first(dim: usize) -> Self {
        let mut entries = vec![1.0; dim];
        entries[0] = -1.0;
        Self::diagonal(&entries).expect("diagonal of units is non-degenerate")
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.mat
    }

    pub fn inverse(&self) -> &DMatrix<f64> {
        &self.inv
    }

    /// (positive, negative) inertia counts.
    pub fn signature(&self) -> (usize, usize) {
        self.signature
    }

    pub fn is_riemannian(&self) -> bool {
        self.signature.1 == 0
    }

    /// Exactly one negative or exactly one positive direction.
    pub fn is_lorentzian(&self) -> bool {
        self.signature.1 == 1 || self.signature.0 == 1
    }

    pub fn inner(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        (x.transpose() * &self.mat * y)[(0, 0)]
    }

    pub fn covector_inner(&self, xi: &DVector<f64>, eta: &DVector<f64>) -> f64 {
        (xi.transpose() * &self.inv * eta)[(0, 0)]
    }

    /// Musical isomorphism `X -> g(X, .)`.
    pub fn flat(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.mat * x
    }

    /// Musical isomorphism `xi -> xi^sharp` with `g(xi^sharp, .) = xi`.
    pub fn sharp(&self, xi: &DVector<f64>) -> DVector<f64> {
        &self.inv * xi
    }

    /// Metric adjoint `f*` with `g(f X, Y) = g(X, f* Y)`.
    pub fn adjoint(&self, f: &DMatrix<f64>) -> DMatrix<f64> {
        &self.inv * f.transpose() * &self.mat
    }

    /// `f^S = (f + f*) / 2`.
    pub fn sym_part(&self, f: &DMatrix<f64>) -> DMatrix<f64> {
        0.5 * (f + self.adjoint(f))
    }

    /// `f^A = (f - f*) / 2`.
    pub fn skew_part(&self, f: &DMatrix<f64>) -> DMatrix<f64> {
        0.5 * (f - self.adjoint(f))
    }

    pub fn self_adjoint_residual(&self, f: &DMatrix<f64>) -> f64 {
        (f - self.adjoint(f)).amax()
    }

    /// The operator `ad*(x)` sending `y` to `(ad_y)* x`. It is always
    /// skew-adjoint with respect to the scalar product.
    pub fn ad_star(&self, lie: &LieAlgebra, x: &DVector<f64>) -> DMatrix<f64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for j in 0..n {
            let col = self.adjoint(&lie.ad_basis(j)) * x;
            m.set_column(j, &col);
        }
        m
    }

    /// The skew-adjoint operator `H_x` sending `y` to `H(x, y, .)^sharp`.
    pub fn h_endo(&self, h: &KForm, x: &DVector<f64>) -> DMatrix<f64> {
        let b = h.contract(x);
        self.two_form_endo(&b)
    }

    /// The endomorphism attached to a 2-form, `y -> b(y, .)^sharp`.
    pub fn two_form_endo(&self, b: &KForm) -> DMatrix<f64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for j in 0..n {
            let cov = b.covector_with(&[&basis_vector(n, j)]);
            m.set_column(j, &self.sharp(&cov));
        }
        m
    }

    /// Raises every slot of a form with the inverse metric.
    fn raise_all(&self, form: &KForm) -> Vec<f64> {
        let n = self.dim();
        let k = form.degree();
        let mut data: Vec<f64> = (0..n.pow(k as u32))
            .map(|flat| {
                let mut idx = vec![0usize; k];
                let mut rest = flat;
                for slot in (0..k).rev() {
                    idx[slot] = rest % n;
                    rest /= n;
                }
                form.get(&idx)
            })
            .collect();
        // Contract each slot in turn with the inverse metric.
        let mut scratch = vec![0.0; data.len()];
        for slot in 0..k {
            let stride = n.pow((k - 1 - slot) as u32);
            scratch.iter_mut().for_each(|v| *v = 0.0);
            for (flat, &value) in data.iter().enumerate() {
                if value == 0.0 {
                    continue;
                }
                let i = (flat / stride) % n;
                let base = flat - i * stride;
                for target in 0..n {
                    let w = self.inv[(target, i)];
                    if w != 0.0 {
                        scratch[base + target * stride] += w * value;
                    }
                }
            }
            std::mem::swap(&mut data, &mut scratch);
        }
        data
    }

    /// Inner product of two k-forms,
    /// `(1/k!) sum a_{i_1..i_k} b_{j_1..j_k} g^{i_1 j_1} ... g^{i_k j_k}`.
    pub fn form_inner(&self, a: &KForm, b: &KForm) -> Result<f64> {
        if a.dim() != self.dim() || b.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: a.dim().max(b.dim()),
            });
        }
        if a.degree() != b.degree() {
            return Err(Error::DegreeMismatch {
                expected: a.degree(),
                got: b.degree(),
            });
        }
        let raised = self.raise_all(b);
        let n = self.dim();
        let k = a.degree();
        let mut total = 0.0;
        let mut idx = vec![0usize; k];
        for (flat, &rb) in raised.iter().enumerate() {
            if rb == 0.0 {
                continue;
            }
            let mut rest = flat;
            for slot in (0..k).rev() {
                idx[slot] = rest % n;
                rest /= n;
            }
            total += a.get(&idx) * rb;
        }
        let mut factorial = 1.0;
        for i in 2..=k {
            factorial *= i as f64;
        }
        Ok(total / factorial)
    }

    /// Inner product of endomorphisms, `g(A, B) = tr(A B*)`.
    pub fn endo_inner(&self, a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
        (a * self.adjoint(b)).trace()
    }

    /// Restriction of the scalar product to a subspace basis (columns).
    pub fn restrict(&self, basis: &DMatrix<f64>) -> Result<ScalarProduct> {
        ScalarProduct::new(basis.transpose() * &self.mat * basis)
    }

    /// A pseudo-orthonormal frame: columns `v_i` with `g(v_i, v_j) = sign_i delta_ij`,
    /// ordered with the negative directions first.
    pub fn orthonormal_frame(&self) -> OrthonormalFrame {
        let n = self.dim();
        let mut working: Vec<DVector<f64>> = (0..n).map(|i| basis_vector(n, i)).collect();
        let mut frame: Vec<(DVector<f64>, f64)> = Vec::with_capacity(n);
        while !working.is_empty() {
            // Among w_i and w_i + w_j, some vector has |g(v, v)| bounded away
            // from zero whenever g is non-degenerate on the remaining span.
            let mut best: Option<(DVector<f64>, f64, usize)> = None;
            for (i, w) in working.iter().enumerate() {
                let q = self.inner(w, w);
                if best.as_ref().map_or(true, |b| q.abs() > b.1.abs()) {
                    best = Some((w.clone(), q, i));
                }
            }
            for i in 0..working.len() {
                for j in (i + 1)..working.len() {
                    let w = &working[i] + &working[j];
                    let q = self.inner(&w, &w);
                    if best.as_ref().map_or(true, |b| q.abs() > b.1.abs()) {
                        best = Some((w, q, i));
                    }
                }
            }
            let (v, q, drop_idx) = best.expect("non-empty working set");
            let sign = q.signum();
            let v = v / q.abs().sqrt();
            working.remove(drop_idx);
            for w in working.iter_mut() {
                let coeff = sign * self.inner(w, &v);
                *w -= coeff * &v;
            }
            frame.push((v, sign));
        }
        frame.sort_by(|a, b| a.1.partial_cmp(&b.1).expect("signs are finite"));
        let mut vectors = DMatrix::zeros(n, n);
        let mut signs = Vec::with_capacity(n);
        for (j, (v, s)) in frame.iter().enumerate() {
            vectors.set_column(j, v);
            signs.push(*s);
        }
        OrthonormalFrame { vectors, signs }
    }
}

/// A pseudo-orthonormal basis, columns paired with signs.
#[derive(Clone, Debug)]
pub struct OrthonormalFrame {
    pub vectors: DMatrix<f64>,
    pub signs: Vec<f64>,
}

impl OrthonormalFrame {
    /// Sup norm of `B^T G B - diag(signs)`.
    pub fn residual(&self, g: &ScalarProduct) -> f64 {
        let gram = self.vectors.transpose() * g.matrix() * &self.vectors;
        let expected = DMatrix::from_diagonal(&DVector::from_row_slice(&self.signs));
        (gram - expected).amax()
    }
}

/// Either side of a mixed inner product: an endomorphism or a form.
#[derive(Clone, Copy, Debug)]
pub enum Tensor<'a> {
    Endo(&'a DMatrix<f64>),
    Form(&'a KForm),
}

/// Inner product of two tensors of the same kind.
pub fn tensor_inner(g: &ScalarProduct, a: Tensor<'_>, b: Tensor<'_>) -> Result<f64> {
    match (a, b) {
        (Tensor::Endo(a), Tensor::Endo(b)) => Ok(g.endo_inner(a, b)),
        (Tensor::Form(a), Tensor::Form(b)) => g.form_inner(a, b),
        _ => Err(Error::KindMismatch),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::three_form;

    #[test]
    fn signature_and_inverse() {
        let g = ScalarProduct::diagonal(&[1.0, 1.0, -1.0]).unwrap();
        assert_eq!(g.signature(), (2, 1));
        assert!(g.is_lorentzian());
        let xi = DVector::from_row_slice(&[2.0, 0.0, 3.0]);
        let x = g.sharp(&xi);
        assert!((g.flat(&x) - &xi).amax() < 1e-12);
    }

    #[test]
    fn degenerate_metric_is_rejected() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        assert!(matches!(
            ScalarProduct::new(m),
            Err(Error::DegenerateMetric { .. })
        ));
    }

    // nalgebra's SymmetricEigen mispairs eigenvalues and eigenvectors on
    // this well-conditioned negative-definite matrix, which silently broke
    // the stored inverse before the crate switched to its own Jacobi
    // solver. Pinned so a regression cannot slip back in.
    #[test]
    fn inverse_is_exact_on_a_dense_metric() {
        let m = DMatrix::from_row_slice(3, 3, &[
            -0.8786878213819551, 0.04235723436597867, 0.1424073695554089,
            0.04235723436597867, -0.8849845851574114, -0.15338525098917094,
            0.1424073695554089, -0.15338525098917094, -1.3550518367086037,
        ]);
        let g = ScalarProduct::new(m.clone()).unwrap();
        assert_eq!(g.signature(), (0, 3));
        let residual = (g.inverse() * &m - DMatrix::identity(3, 3)).amax();
        assert!(residual < 1e-12, "inverse residual {residual:.3e}");
        let x = DVector::from_row_slice(&[1.0, -0.5, 2.0]);
        assert!((g.sharp(&g.flat(&x)) - &x).amax() < 1e-12);
    }

    #[test]
    fn adjoint_satisfies_defining_identity() {
        let g = ScalarProduct::diagonal(&[-1.0, 1.0, 1.0, 1.0]).unwrap();
        let f = DMatrix::from_row_slice(
            4,
            4,
            &[
                0.3, -1.2, 0.0, 2.0, 0.7, 0.1, -0.4, 0.0, 1.0, 0.0, 0.5, -0.3, 0.2, 0.9, -1.1, 0.6,
            ],
        );
        let fs = g.adjoint(&f);
        for i in 0..4 {
            for j in 0..4 {
                let x = basis_vector(4, i);
                let y = basis_vector(4, j);
                let lhs = g.inner(&(&f * &x), &y);
                let rhs = g.inner(&x, &(&fs * &y));
                assert!((lhs - rhs).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn ad_star_and_h_endo_are_skew() {
        let lie = crate::lie::LieAlgebra::new(
            4,
            &[(1, 2, 3, 1.0), (1, 3, 4, 0.5), (2, 4, 1, -2.0)],
        )
        .unwrap();
        let g = ScalarProduct::diagonal(&[1.0, 1.0, -1.0, 1.0]).unwrap();
        let x = DVector::from_row_slice(&[0.3, -1.0, 2.0, 0.7]);
        let a = g.ad_star(&lie, &x);
        assert!((g.adjoint(&a) + &a).amax() < 1e-12);
        let h = three_form(4, &[(1, 2, 3, 1.0), (1, 2, 4, -0.5), (2, 3, 4, 2.0)]).unwrap();
        let hx = g.h_endo(&h, &x);
        assert!((g.adjoint(&hx) + &hx).amax() < 1e-12);
    }

    #[test]
    fn form_inner_on_basis_monomials() {
        // g(e^i ^ e^j, e^i ^ e^j) = eps_i eps_j for orthonormal bases.
        let g = ScalarProduct::diagonal(&[1.0, -1.0, 1.0, -1.0]).unwrap();
        let cases = [((1, 2), -1.0), ((1, 3), 1.0), ((2, 4), 1.0), ((1, 4), -1.0)];
        for ((i, j), expected) in cases {
            let f = crate::lie::two_form(4, &[(i, j, 1.0)]).unwrap();
            assert!((g.form_inner(&f, &f).unwrap() - expected).abs() < 1e-12);
        }
        let h = three_form(4, &[(1, 2, 3, 1.0)]).unwrap();
        assert!((g.form_inner(&h, &h).unwrap() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn endo_inner_matches_frame_expansion() {
        // g(f, f) = sum_i eps_i g(f e_i, f e_i) in a pseudo-orthonormal frame.
        let g = ScalarProduct::diagonal(&[-1.0, 1.0, 1.0]).unwrap();
        let f = DMatrix::from_row_slice(3, 3, &[0.2, 1.0, -0.7, 0.4, -0.1, 0.9, 1.3, 0.0, 0.5]);
        let direct = g.endo_inner(&f, &f);
        let mut expanded = 0.0;
        for i in 0..3 {
            let eps = g.matrix()[(i, i)];
            let fe = &f * basis_vector(3, i);
            expanded += eps * g.inner(&fe, &fe);
        }
        assert!((direct - expanded).abs() < 1e-12);
    }

    #[test]
    fn frame_handles_witt_metrics() {
        let m = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let g = ScalarProduct::new(m).unwrap();
        assert_eq!(g.signature(), (1, 1));
        let frame = g.orthonormal_frame();
        assert!(frame.residual(&g) < 1e-12);
        assert_eq!(frame.signs, vec![-1.0, 1.0]);
    }

    #[test]
    fn tensor_inner_rejects_mixed_kinds() {
        let g = ScalarProduct::euclidean(3);
        let f = DMatrix::identity(3, 3);
        let w = KForm::basis_one_form(3, 0);
        assert!(matches!(
            tensor_inner(&g, Tensor::Endo(&f), Tensor::Form(&w)),
            Err(Error::KindMismatch)
        ));
    }
}
