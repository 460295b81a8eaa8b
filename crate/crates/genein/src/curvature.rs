//! Curvature of left-invariant connections: Levi-Civita via the Koszul
//! formula, metric connections with totally skew torsion, Ricci and scalar
//! curvature, flatness tests.

use nalgebra::{DMatrix, DVector};

use crate::einstein::GEProblem;
use crate::error::Result;
use crate::lie::{basis_vector, KForm, LieAlgebra};
use crate::metric::ScalarProduct;

/// A left-invariant connection, stored as the matrices of the operators
/// `nabla_{e_i}` acting on the algebra.
#[derive(Clone, Debug)]
pub struct Connection {
    matrices: Vec<DMatrix<f64>>,
}

impl Connection {
    /// The Levi-Civita connection of a left-invariant metric, from the
    /// Koszul formula
    /// `2 g(nabla_X Y, Z) = g([X,Y], Z) - g([Y,Z], X) + g([Z,X], Y)`.
    pub fn levi_civita(lie: &LieAlgebra, g: &ScalarProduct) -> Self {
        let n = lie.dim();
        let mut matrices = Vec::with_capacity(n);
        for i in 0..n {
            let mut m = DMatrix::zeros(n, n);
            for j in 0..n {
                let mut w = DVector::zeros(n);
                for k in 0..n {
                    let ij = lie.bracket_basis(i, j);
                    let jk = lie.bracket_basis(j, k);
                    let ki = lie.bracket_basis(k, i);
                    w[k] = 0.5
                        * (g.inner(&ij, &basis_vector(n, k))
                            - g.inner(&jk, &basis_vector(n, i))
                            + g.inner(&ki, &basis_vector(n, j)));
                }
                m.set_column(j, &(g.inverse() * w));
            }
            matrices.push(m);
        }
        Self { matrices }
    }

    /// The metric connection `nabla_X Y = nabla^g_X Y + (t/2) H(X, Y, .)^sharp`,
    /// whose torsion is the totally skew tensor `t H`.
    pub fn with_skew_torsion(
        lie: &LieAlgebra,
        g: &ScalarProduct,
        h: &KForm,
        t: f64,
    ) -> Self {
        let mut conn = Self::levi_civita(lie, g);
        let n = lie.dim();
        for i in 0..n {
            conn.matrices[i] += 0.5 * t * g.h_endo(h, &basis_vector(n, i));
        }
        conn
    }

    pub fn dim(&self) -> usize {
        self.matrices.len()
    }

    /// The matrix of `nabla_{e_i}`.
    pub fn matrix(&self, i: usize) -> &DMatrix<f64> {
        &self.matrices[i]
    }

    /// The matrix of `nabla_x`.
    pub fn derivative(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            m += x[i] * &self.matrices[i];
        }
        m
    }

    /// The curvature operator
    /// `R(e_i, e_j) = [nabla_{e_i}, nabla_{e_j}] - nabla_{[e_i, e_j]}`.
    pub fn curvature_basis(&self, lie: &LieAlgebra, i: usize, j: usize) -> DMatrix<f64> {
        let a = &self.matrices[i];
        let b = &self.matrices[j];
        a * b - b * a - self.derivative(&lie.bracket_basis(i, j))
    }

    /// The Ricci tensor `Ric(e_j, e_k) = tr(X -> R(X, e_j) e_k)`.
    ///
    /// For a connection with torsion this is in general not symmetric.
    pub fn ricci(&self, lie: &LieAlgebra) -> DMatrix<f64> {
        let n = self.dim();
        let mut ric = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let r = self.curvature_basis(lie, i, j);
                for k in 0..n {
                    ric[(j, k)] += r[(i, k)];
                }
            }
        }
        ric
    }

    /// Largest curvature entry over basis pairs, scaled by
    /// `1 + (largest connection entry)^2`.
    pub fn curvature_residual(&self, lie: &LieAlgebra) -> f64 {
        let n = self.dim();
        let scale = self
            .matrices
            .iter()
            .map(|m| m.amax())
            .fold(0.0_f64, f64::max);
        let mut sup = 0.0_f64;
        for i in 0..n {
            for j in (i + 1)..n {
                sup = sup.max(self.curvature_basis(lie, i, j).amax());
            }
        }
        sup / (1.0 + scale * scale)
    }
}

/// Curvature summary of the Levi-Civita connection of a problem's metric.
#[derive(Clone, Debug)]
pub struct CurvatureReport {
    pub ricci: DMatrix<f64>,
    pub scalar: f64,
    /// Normalised sup of the full curvature tensor.
    pub curvature_residual: f64,
    pub is_flat: bool,
}

pub fn curvature_report(p: &GEProblem) -> CurvatureReport {
    let conn = Connection::levi_civita(&p.algebra, &p.metric);
    let ricci = conn.ricci(&p.algebra);
    let scalar = (p.metric.inverse() * &ricci).trace();
    let curvature_residual = conn.curvature_residual(&p.algebra);
    CurvatureReport {
        ricci,
        scalar,
        curvature_residual,
        is_flat: curvature_residual <= p.tolerance,
    }
}

/// The Ricci tensor of the metric connection with torsion `sign * H`
/// (`sign` is `+1.0` or `-1.0`).
///
/// For a unimodular algebra that is generalised Einstein with zero
/// divergence, both of these tensors vanish.
pub fn bismut_ricci(p: &GEProblem, sign: f64) -> DMatrix<f64> {
    let conn = Connection::with_skew_torsion(&p.algebra, &p.metric, &p.h_form, sign);
    conn.ricci(&p.algebra)
}

/// Sup-norm residual of the steady soliton identity `Ric = nabla tau`, where
/// `tau(X) = tr(ad_X)` and `(nabla_X tau)(Y) = -tau(nabla_X Y)`; normalised
/// by `1 + max(|Ric|, |nabla tau|)`.
///
/// Equivalently this is `Ric + nabla delta` for the Riemannian divergence
/// one-form `delta = -tau`. For an almost Abelian algebra with `H = 0` it
/// vanishes exactly when the structure is generalised Einstein with zero
/// divergence; on the Abelian ideal the identity reads
/// `Ric = -eps tr(f) g(f^S(.), .)`.
pub fn soliton_residual(lie: &LieAlgebra, g: &ScalarProduct) -> f64 {
    let n = lie.dim();
    let conn = Connection::levi_civita(lie, g);
    let ricci = conn.ricci(lie);
    let tau = DVector::from_fn(n, |j, _| lie.ad_basis(j).trace());
    let mut nabla_tau = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            nabla_tau[(i, j)] = -tau.dot(&conn.matrix(i).column(j).into_owned());
        }
    }
    let scale = ricci.amax().max(nabla_tau.amax());
    (ricci - nabla_tau).amax() / (1.0 + scale)
}

/// Flatness test for an almost Abelian structure, given the action `f` of the
/// extra direction on the Abelian ideal and the restricted scalar product.
///
/// The metric is flat exactly when `f` is the sum of a skew map `h` and a
/// rank one piece `c * Y^flat (x) Y` with `Y` null and `h(Y) = 0`; the two
/// summands are then the self-adjoint and skew parts of `f`.
pub fn almost_abelian_flat_test(g: &ScalarProduct, f: &DMatrix<f64>, tol: f64) -> Result<bool> {
    let f_sym = g.sym_part(f);
    let scale = 1.0 + f.amax();
    if f_sym.amax() <= tol * scale {
        return Ok(true);
    }
    let svd = f_sym.clone().svd(true, false);
    let sigma_max = svd.singular_values.max();
    let rank = svd
        .singular_values
        .iter()
        .filter(|s| **s > crate::lie::RANK_RTOL.max(tol) * sigma_max)
        .count();
    if rank != 1 {
        return Ok(false);
    }
    let u = svd.u.as_ref().expect("requested");
    let y: DVector<f64> = u.column(0).into_owned();
    let y_null = g.inner(&y, &y).abs() <= tol * (1.0 + g.matrix().amax());
    let skew_kills_y = (g.skew_part(f) * &y).amax() <= tol * scale;
    Ok(y_null && skew_kills_y)
}
