//! The generalised Einstein condition on `E = g + g*`.
//!
//! A problem bundles a Lie algebra, a scalar product, a closed 3-form `H` and
//! a divergence operator `delta` (a linear functional on `E`). Verification
//! runs through two independent routes: explicit algebraic equations in the
//! operators `ad^S`, `ad*` and `H_X`, and a trace route that works directly
//! with the Dorfman bracket and the eigenbundles `E+` and `E-` of the
//! generalised metric.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::lie::{basis_vector, KForm, LieAlgebra, Subspace};
use crate::metric::ScalarProduct;

/// An element `X + xi` of the double `E = g + g*`.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneralisedVector {
    pub vector: DVector<f64>,
    pub covector: DVector<f64>,
}

impl GeneralisedVector {
    pub fn new(vector: DVector<f64>, covector: DVector<f64>) -> Self {
        debug_assert_eq!(vector.len(), covector.len());
        Self { vector, covector }
    }

    pub fn from_vector(x: DVector<f64>) -> Self {
        let covector = DVector::zeros(x.len());
        Self {
            vector: x,
            covector,
        }
    }

    pub fn from_covector(xi: DVector<f64>) -> Self {
        let vector = DVector::zeros(xi.len());
        Self {
            vector,
            covector: xi,
        }
    }

    pub fn dim(&self) -> usize {
        self.vector.len()
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            vector: &self.vector + &other.vector,
            covector: &self.covector + &other.covector,
        }
    }

    pub fn scale(&self, t: f64) -> Self {
        Self {
            vector: t * &self.vector,
            covector: t * &self.covector,
        }
    }

    pub fn amax(&self) -> f64 {
        self.vector.amax().max(self.covector.amax())
    }

    /// The canonical pairing `<X + xi, Y + eta> = (xi(Y) + eta(X)) / 2`.
    pub fn pairing(&self, other: &Self) -> f64 {
        0.5 * (self.covector.dot(&other.vector) + other.covector.dot(&self.vector))
    }
}

/// A divergence operator, i.e. a linear functional on `E = g + g*`.
///
/// `on_vectors` is its restriction to `g` (a covector) and `on_covectors`
/// its restriction to `g*` (a vector, acting by `xi -> xi(on_covectors)`).
#[derive(Clone, Debug, PartialEq)]
pub struct Divergence {
    pub on_vectors: DVector<f64>,
    pub on_covectors: DVector<f64>,
}

impl Divergence {
    pub fn new(on_vectors: DVector<f64>, on_covectors: DVector<f64>) -> Self {
        debug_assert_eq!(on_vectors.len(), on_covectors.len());
        Self {
            on_vectors,
            on_covectors,
        }
    }

    pub fn zero(dim: usize) -> Self {
        Self {
            on_vectors: DVector::zeros(dim),
            on_covectors: DVector::zeros(dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.on_vectors.len()
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.on_vectors.amax() <= tol && self.on_covectors.amax() <= tol
    }

    pub fn apply(&self, u: &GeneralisedVector) -> f64 {
        self.on_vectors.dot(&u.vector) + self.on_covectors.dot(&u.covector)
    }

    pub fn apply_vector(&self, x: &DVector<f64>) -> f64 {
        self.on_vectors.dot(x)
    }

    pub fn apply_covector(&self, xi: &DVector<f64>) -> f64 {
        self.on_covectors.dot(xi)
    }

    /// Coordinates in `R^{2n}`, vector slots first.
    pub fn coords(&self) -> DVector<f64> {
        let n = self.dim();
        let mut v = DVector::zeros(2 * n);
        for i in 0..n {
            v[i] = self.on_vectors[i];
            v[n + i] = self.on_covectors[i];
        }
        v
    }

    /// Inverse of [`Divergence::coords`].
    pub fn from_coords(v: &DVector<f64>) -> Self {
        let n = v.len() / 2;
        Self {
            on_vectors: v.rows(0, n).into_owned(),
            on_covectors: v.rows(n, n).into_owned(),
        }
    }

    /// Restriction to `E(a) = a + a*` for a subspace `a` with orthonormal
    /// column basis `p` and non-degenerate restricted metric: covectors on
    /// `a` are extended to `g*` through the `g`-orthogonal projection.
    pub fn restrict(
        &self,
        g: &ScalarProduct,
        p: &DMatrix<f64>,
        g_sub: &ScalarProduct,
    ) -> Divergence {
        let on_vectors = p.transpose() * &self.on_vectors;
        let on_covectors = g_sub.inverse() * p.transpose() * g.matrix() * &self.on_covectors;
        Divergence {
            on_vectors,
            on_covectors,
        }
    }
}

/// A generalised pseudo-Riemannian Lie algebra with divergence operator.
#[derive(Clone, Debug)]
pub struct GEProblem {
    pub algebra: LieAlgebra,
    pub metric: ScalarProduct,
    pub h_form: KForm,
    pub divergence: Divergence,
    pub tolerance: f64,
}

impl GEProblem {
    /// Validates dimensions, the Jacobi identity and closedness of `H`.
    pub fn new(
        algebra: LieAlgebra,
        metric: ScalarProduct,
        h_form: KForm,
        divergence: Divergence,
        tolerance: f64,
    ) -> Result<Self> {
        let n = algebra.dim();
        if metric.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: metric.dim(),
            });
        }
        if h_form.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: h_form.dim(),
            });
        }
        if h_form.degree() != 3 {
            return Err(Error::DegreeMismatch {
                expected: 3,
                got: h_form.degree(),
            });
        }
        if divergence.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: divergence.dim(),
            });
        }
        let c_scale: f64 = (0..n)
            .map(|i| algebra.ad_basis(i).amax())
            .fold(0.0, f64::max);
        let jacobi = algebra.jacobi_residual();
        if jacobi > tolerance * (1.0 + c_scale * c_scale) {
            return Err(Error::JacobiFailure { residual: jacobi });
        }
        let dh = h_form.closedness_residual(&algebra);
        if dh > tolerance * (1.0 + c_scale * h_form.sup_norm()) {
            return Err(Error::NotClosed { residual: dh });
        }
        Ok(Self {
            algebra,
            metric,
            h_form,
            divergence,
            tolerance,
        })
    }

    pub fn with_zero_divergence(
        algebra: LieAlgebra,
        metric: ScalarProduct,
        h_form: KForm,
        tolerance: f64,
    ) -> Result<Self> {
        let n = algebra.dim();
        Self::new(algebra, metric, h_form, Divergence::zero(n), tolerance)
    }

    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }

    /// Replaces the divergence operator, keeping everything else.
    pub fn replacing_divergence(&self, divergence: Divergence) -> Self {
        Self {
            divergence,
            ..self.clone()
        }
    }

    /// The generalised metric `G(X + xi) = xi^sharp + X^flat`.
    pub fn generalised_metric(&self, u: &GeneralisedVector) -> GeneralisedVector {
        GeneralisedVector {
            vector: self.metric.sharp(&u.covector),
            covector: self.metric.flat(&u.vector),
        }
    }

    /// Projection onto `E+` (`sign = +1`) or `E-` (`sign = -1`).
    pub fn half_projection(&self, u: &GeneralisedVector, sign: f64) -> GeneralisedVector {
        u.add(&self.generalised_metric(u).scale(sign)).scale(0.5)
    }

    /// The `H`-twisted Dorfman bracket
    /// `[X + xi, Y + eta] = [X, Y] - ad_X^t eta + ad_Y^t xi + H(X, Y, .)`.
    ///
    /// For left-invariant data it is antisymmetric, and together with the
    /// canonical pairing it turns `E` into a quadratic Lie algebra in which
    /// `g*` sits as an Abelian ideal.
    pub fn dorfman(&self, u: &GeneralisedVector, v: &GeneralisedVector) -> GeneralisedVector {
        let vector = self.algebra.bracket(&u.vector, &v.vector);
        let ad_u = self.algebra.ad(&u.vector);
        let ad_v = self.algebra.ad(&v.vector);
        let mut covector = ad_v.transpose() * &u.covector - ad_u.transpose() * &v.covector;
        covector += self
            .h_form
            .covector_with(&[&u.vector, &v.vector]);
        GeneralisedVector { vector, covector }
    }

    /// `Gamma^+_X = (2 ad_X^S + ad*(X) + H_X) / 4`, the operator on `g`
    /// representing `pi_+ [pi_-(X), .]` restricted to `E+`.
    pub fn gamma_plus(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let s = self.metric.sym_part(&self.algebra.ad(x));
        let a = self.metric.ad_star(&self.algebra, x);
        let h = self.metric.h_endo(&self.h_form, x);
        (2.0 * s + a + h) / 4.0
    }

    /// `Gamma^-_X = (2 ad_X^S + ad*(X) - H_X) / 4`.
    pub fn gamma_minus(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let s = self.metric.sym_part(&self.algebra.ad(x));
        let a = self.metric.ad_star(&self.algebra, x);
        let h = self.metric.h_endo(&self.h_form, x);
        (2.0 * s + a - h) / 4.0
    }
}

/// Residuals of the generalised Einstein equations, one per equation family,
/// each normalised by `1 + (largest term in the instance)` and maximised over
/// basis instances.
#[derive(Clone, Debug)]
pub struct EinsteinReport {
    /// Quadratic equation coupling `ad^S`, `ad*`, `H(X,.,.)` and
    /// `delta(ad_X^* X)`.
    pub eq1: f64,
    /// Antisymmetric equation coupling `g(H_X, ad*(Y))` and
    /// `delta(H(X,Y,.)^sharp + [X,Y]^flat)`.
    pub eq2: f64,
    /// `delta((ad_X^* X)^flat) = 0`.
    pub eq3: f64,
    /// `delta([X,Y] + H(X,Y,.)) = 0`.
    pub eq4: f64,
    pub total: f64,
    pub is_einstein: bool,
}

fn normalized_residual(terms: &[f64]) -> f64 {
    let sum: f64 = terms.iter().sum();
    let largest = terms.iter().fold(0.0_f64, |m, t| m.max(t.abs()));
    sum.abs() / (1.0 + largest)
}

/// Pushes the products `weight * functional_k * argument_k` onto `terms`.
fn push_functional_terms(terms: &mut Vec<f64>, weight: f64, functional: &DVector<f64>, arg: &DVector<f64>) {
    for k in 0..functional.len() {
        let t = weight * functional[k] * arg[k];
        if t != 0.0 {
            terms.push(t);
        }
    }
}

/// Verifies the generalised Einstein condition through the explicit algebraic
/// equations. Quadratic equations are polarised over `X = e_i + e_j` with
/// `i <= j`, antisymmetric ones run over basis pairs `i < j`.
pub fn einstein_residuals(p: &GEProblem) -> EinsteinReport {
    let n = p.dim();
    let g = &p.metric;
    let lie = &p.algebra;
    let delta = &p.divergence;

    let mut eq1 = 0.0_f64;
    let mut eq3 = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            let x = basis_vector(n, i) + basis_vector(n, j);
            let ad_x = lie.ad(&x);
            let ad_x_sym = g.sym_part(&ad_x);
            let ad_star_x = g.ad_star(lie, &x);
            let h_x_form = p.h_form.contract(&x);
            // ad_X^*(X), the defect of X being a Killing direction.
            let w = g.adjoint(&ad_x) * &x;

            let mut terms = vec![
                4.0 * g.endo_inner(&ad_x_sym, &ad_x_sym),
                -g.endo_inner(&ad_star_x, &ad_star_x),
                2.0 * g.form_inner(&h_x_form, &h_x_form).expect("degrees match"),
            ];
            push_functional_terms(&mut terms, 2.0, &delta.on_vectors, &w);
            eq1 = eq1.max(normalized_residual(&terms));

            let mut terms3 = Vec::new();
            push_functional_terms(&mut terms3, 1.0, &delta.on_covectors, &g.flat(&w));
            eq3 = eq3.max(normalized_residual(&terms3));
        }
    }

    let mut eq2 = 0.0_f64;
    let mut eq4 = 0.0_f64;
    for i in 0..n {
        for j in (i + 1)..n {
            let x = basis_vector(n, i);
            let y = basis_vector(n, j);
            let h_x = g.h_endo(&p.h_form, &x);
            let h_y = g.h_endo(&p.h_form, &y);
            let ad_star_x = g.ad_star(lie, &x);
            let ad_star_y = g.ad_star(lie, &y);
            let bracket = lie.bracket_basis(i, j);
            let h_xy = p.h_form.covector_with(&[&x, &y]);

            let mut terms = vec![
                g.endo_inner(&h_x, &ad_star_y),
                -g.endo_inner(&h_y, &ad_star_x),
            ];
            push_functional_terms(&mut terms, -2.0, &delta.on_vectors, &g.sharp(&h_xy));
            push_functional_terms(&mut terms, -2.0, &delta.on_covectors, &g.flat(&bracket));
            eq2 = eq2.max(normalized_residual(&terms));

            let mut terms4 = Vec::new();
            push_functional_terms(&mut terms4, 1.0, &delta.on_vectors, &bracket);
            push_functional_terms(&mut terms4, 1.0, &delta.on_covectors, &h_xy);
            eq4 = eq4.max(normalized_residual(&terms4));
        }
    }

    let total = eq1.max(eq2).max(eq3).max(eq4);
    EinsteinReport {
        eq1,
        eq2,
        eq3,
        eq4,
        total,
        is_einstein: total < p.tolerance,
    }
}

/// Residuals from the definition of the condition on `E+` and `E-`.
#[derive(Clone, Debug)]
pub struct TraceReport {
    /// `2 tr(Gamma_v Gamma_u) - delta(G [v, u])` over basis pairs.
    pub pairing_eq: f64,
    /// `delta([u, v])` over basis pairs.
    pub closure_eq: f64,
    pub total: f64,
    pub is_einstein: bool,
}

/// The matrix of `Gamma_u = pi_sign . [u, .]` restricted to the opposite
/// eigenbundle, in the bases `pi_{-sign}(e_j) -> pi_sign(e_i)`. Elements of
/// `E+-` have coordinates twice their vector part in these bases.
fn gamma_matrix(p: &GEProblem, u: &GeneralisedVector, sign: f64) -> DMatrix<f64> {
    let n = p.dim();
    let mut m = DMatrix::zeros(n, n);
    for j in 0..n {
        let vj = p.half_projection(&GeneralisedVector::from_vector(basis_vector(n, j)), -sign);
        let w = p.half_projection(&p.dorfman(u, &vj), sign);
        m.set_column(j, &(2.0 * w.vector));
    }
    m
}

/// Verifies the generalised Einstein condition through traces of the
/// operators `Gamma_u`, `Gamma_v` built from the Dorfman bracket.
pub fn trace_route_residuals(p: &GEProblem) -> TraceReport {
    let n = p.dim();
    let delta = &p.divergence;
    let mut pairing_eq = 0.0_f64;
    let mut closure_eq = 0.0_f64;
    let plus_basis: Vec<GeneralisedVector> = (0..n)
        .map(|i| p.half_projection(&GeneralisedVector::from_vector(basis_vector(n, i)), 1.0))
        .collect();
    let minus_basis: Vec<GeneralisedVector> = (0..n)
        .map(|j| p.half_projection(&GeneralisedVector::from_vector(basis_vector(n, j)), -1.0))
        .collect();
    let gammas_plus: Vec<DMatrix<f64>> = plus_basis
        .iter()
        .map(|u| gamma_matrix(p, u, 1.0))
        .collect();
    let gammas_minus: Vec<DMatrix<f64>> = minus_basis
        .iter()
        .map(|v| gamma_matrix(p, v, -1.0))
        .collect();
    for (i, u) in plus_basis.iter().enumerate() {
        for (j, v) in minus_basis.iter().enumerate() {
            let product = &gammas_minus[j] * &gammas_plus[i];
            let mut terms: Vec<f64> = (0..n).map(|k| 2.0 * product[(k, k)]).collect();
            let gvu = p.generalised_metric(&p.dorfman(v, u));
            push_functional_terms(&mut terms, -1.0, &delta.on_vectors, &gvu.vector);
            push_functional_terms(&mut terms, -1.0, &delta.on_covectors, &gvu.covector);
            pairing_eq = pairing_eq.max(normalized_residual(&terms));

            let uv = p.dorfman(u, v);
            let mut terms_b = Vec::new();
            push_functional_terms(&mut terms_b, 1.0, &delta.on_vectors, &uv.vector);
            push_functional_terms(&mut terms_b, 1.0, &delta.on_covectors, &uv.covector);
            closure_eq = closure_eq.max(normalized_residual(&terms_b));
        }
    }
    let total = pairing_eq.max(closure_eq);
    TraceReport {
        pairing_eq,
        closure_eq,
        total,
        is_einstein: total < p.tolerance,
    }
}

/// `beta(X, Y) = 2 tr(Gamma^-_X Gamma^+_Y)`, the bilinear form whose
/// vanishing (together with the closure conditions) characterises the
/// generalised Einstein property.
pub fn beta_trace(p: &GEProblem, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
    2.0 * (p.gamma_minus(x) * p.gamma_plus(y)).trace()
}

/// The symmetric and antisymmetric parts of `beta(X, Y)` from the closed
/// formulas
/// `beta^S = g(ad_X^S, ad_Y^S)/2 - g(ad*(X), ad*(Y))/8 + g(H(X,.,.), H(Y,.,.))/4`
/// and `beta^A = (g(H_X, ad*(Y)) - g(H_Y, ad*(X)))/8`.
pub fn beta_explicit(p: &GEProblem, x: &DVector<f64>, y: &DVector<f64>) -> (f64, f64) {
    let g = &p.metric;
    let lie = &p.algebra;
    let sym = 0.5 * g.endo_inner(&g.sym_part(&lie.ad(x)), &g.sym_part(&lie.ad(y)))
        - 0.125 * g.endo_inner(&g.ad_star(lie, x), &g.ad_star(lie, y))
        + 0.25
            * g.form_inner(&p.h_form.contract(x), &p.h_form.contract(y))
                .expect("equal degrees");
    let antisym = 0.125
        * (g.endo_inner(&g.h_endo(&p.h_form, x), &g.ad_star(lie, y))
            - g.endo_inner(&g.h_endo(&p.h_form, y), &g.ad_star(lie, x)));
    (sym, antisym)
}

/// The bilinear form `beta(e_i, e_j) = 2 tr(Gamma^-_{e_i} Gamma^+_{e_j})`
/// from the quarter operators on `g`.
pub fn beta_via_gamma(p: &GEProblem) -> DMatrix<f64> {
    let n = p.dim();
    let minus: Vec<DMatrix<f64>> = (0..n).map(|i| p.gamma_minus(&basis_vector(n, i))).collect();
    let plus: Vec<DMatrix<f64>> = (0..n).map(|j| p.gamma_plus(&basis_vector(n, j))).collect();
    DMatrix::from_fn(n, n, |i, j| 2.0 * (&minus[i] * &plus[j]).trace())
}

/// The same bilinear form computed on the eigenbundles,
/// `beta(e_i, e_j) = 2 tr(Gamma_{pi_-(e_i)} Gamma_{pi_+(e_j)})`.
pub fn beta_via_trace(p: &GEProblem) -> DMatrix<f64> {
    let n = p.dim();
    let gammas_minus: Vec<DMatrix<f64>> = (0..n)
        .map(|i| {
            let v = p.half_projection(&GeneralisedVector::from_vector(basis_vector(n, i)), -1.0);
            gamma_matrix(p, &v, -1.0)
        })
        .collect();
    let gammas_plus: Vec<DMatrix<f64>> = (0..n)
        .map(|j| {
            let u = p.half_projection(&GeneralisedVector::from_vector(basis_vector(n, j)), 1.0);
            gamma_matrix(p, &u, 1.0)
        })
        .collect();
    DMatrix::from_fn(n, n, |i, j| {
        2.0 * (&gammas_minus[i] * &gammas_plus[j]).trace()
    })
}

/// Data extracted from a problem relative to a non-degenerate codimension one
/// ideal: the unit normal `X`, its sign, the restriction of the bracket, the
/// operator `f = ad_X`, and the split `H = H' + X^flat ^ B`.
#[derive(Clone, Debug)]
pub struct Codim1Data {
    /// Euclidean-orthonormal columns spanning the ideal.
    pub basis: DMatrix<f64>,
    pub x: DVector<f64>,
    pub epsilon: f64,
    pub restricted_algebra: LieAlgebra,
    pub restricted_metric: ScalarProduct,
    /// `ad_X` restricted to the ideal, in ideal coordinates.
    pub f: DMatrix<f64>,
    /// `H' = H` restricted to the ideal.
    pub h_prime: KForm,
    /// `B = epsilon (X -| H)` restricted to the ideal.
    pub b_form: KForm,
}

/// Checks that `sub` is an ideal and extracts the codimension one data.
pub fn codim1_data(p: &GEProblem, sub: &Subspace) -> Result<Codim1Data> {
    let n = p.dim();
    let tol = p.tolerance;
    if sub.dim() + 1 != n {
        return Err(Error::WrongCodimension {
            expected: 1,
            got: n - sub.dim(),
        });
    }
    check_ideal(&p.algebra, sub, tol)?;
    // Metric-orthogonal complement of the ideal.
    let normal_space = Subspace::kernel(&(sub.basis().transpose() * p.metric.matrix()));
    if normal_space.dim() != 1 {
        return Err(Error::DegenerateComplement);
    }
    let x_raw = normal_space.basis_vector(0);
    let q = p.metric.inner(&x_raw, &x_raw);
    if q.abs() <= 1e-9 * (1.0 + p.metric.matrix().amax()) {
        return Err(Error::DegenerateComplement);
    }
    let x = &x_raw / q.abs().sqrt();
    let epsilon = q.signum();

    let basis = sub.basis().clone();
    let restricted_metric = p
        .metric
        .restrict(&basis)
        .map_err(|_| Error::DegenerateRestriction)?;
    let restricted_algebra = p.algebra.restrict(sub, tol)?;
    let f = basis.transpose() * p.algebra.ad(&x) * &basis;
    let h_prime = restrict_form(&p.h_form, &basis)?;
    let xh = p.h_form.contract(&x);
    let b_form = restrict_form(&xh, &basis)?.scale(epsilon);
    Ok(Codim1Data {
        basis,
        x,
        epsilon,
        restricted_algebra,
        restricted_metric,
        f,
        h_prime,
        b_form,
    })
}

/// Restriction of a form to the span of orthonormal columns.
pub fn restrict_form(form: &KForm, basis: &DMatrix<f64>) -> Result<KForm> {
    let m = basis.ncols();
    let k = form.degree();
    let mut out = KForm::zero(m, k)?;
    let cols: Vec<DVector<f64>> = (0..m).map(|j| basis.column(j).into_owned()).collect();
    let mut tuple = vec![0usize; k];
    fn walk(
        form: &KForm,
        cols: &[DVector<f64>],
        out: &mut KForm,
        tuple: &mut Vec<usize>,
        level: usize,
        start: usize,
    ) {
        if level == tuple.len() {
            let args: Vec<&DVector<f64>> = tuple.iter().map(|&i| &cols[i]).collect();
            let v = form.apply(&args);
            if v != 0.0 {
                out.set_canonical(tuple, v);
            }
            return;
        }
        for i in start..cols.len() {
            tuple[level] = i;
            walk(form, cols, out, tuple, level + 1, i + 1);
        }
    }
    walk(form, &cols, &mut out, &mut tuple, 0, 0);
    Ok(out)
}

fn check_ideal(lie: &LieAlgebra, sub: &Subspace, tol: f64) -> Result<()> {
    let n = lie.dim();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in 0..sub.dim() {
            let w = lie.bracket(&basis_vector(n, i), &sub.basis_vector(j));
            let leak = (&w - sub.project(&w)).amax();
            worst = worst.max(leak / (1.0 + w.amax()));
        }
    }
    if worst > tol {
        return Err(Error::NotAnIdeal { residual: worst });
    }
    Ok(())
}

/// Residuals of the five zero-divergence Einstein equations relative to a
/// non-degenerate codimension one ideal, in the order: norm equation for the
/// normal direction, mixed linear equation, quadratic equation on the ideal,
/// `ad*`-against-`B` equation, and the symmetry equation.
#[derive(Clone, Debug)]
pub struct Codim1Report {
    pub residuals: [f64; 5],
    pub total: f64,
    pub data: Codim1Data,
}

pub fn codim1_residuals(p: &GEProblem, sub: &Subspace) -> Result<Codim1Report> {
    let data = codim1_data(p, sub)?;
    let m = sub.dim();
    let g = &data.restricted_metric;
    let lie = &data.restricted_algebra;
    let eps = data.epsilon;
    let f_sym = g.sym_part(&data.f);
    let f_adj = g.adjoint(&data.f);
    let b_endo = g.two_form_endo(&data.b_form);

    // Equation 1: 0 = 2 g(f^S, f^S) + g(B, B).
    let r1 = normalized_residual(&[
        2.0 * g.endo_inner(&f_sym, &f_sym),
        g.form_inner(&data.b_form, &data.b_form)?,
    ]);

    // Equation 2 (linear in Y): 0 = 2 g(f^S, ad_Y^S) + g(B, H'(Y,.,.)).
    let mut r2 = 0.0_f64;
    // Equation 4 (linear in Y): 0 = g(ad*(Y), B).
    let mut r4 = 0.0_f64;
    for q in 0..m {
        let y = basis_vector(m, q);
        let ad_y_sym = g.sym_part(&lie.ad(&y));
        let hy = data.h_prime.contract(&y);
        r2 = r2.max(normalized_residual(&[
            2.0 * g.endo_inner(&f_sym, &ad_y_sym),
            g.form_inner(&data.b_form, &hy)?,
        ]));
        let ad_star_y = g.ad_star(lie, &y);
        r4 = r4.max(normalized_residual(&[g.endo_inner(&ad_star_y, &b_endo)]));
    }

    // Equation 3 (quadratic in Y, polarised):
    // 0 = 4 g(ad_Y^S, ad_Y^S) - g(ad*(Y), ad*(Y)) + 2 eps g([f*, f](Y), Y)
    //     + 2 g(H'(Y,.,.), H'(Y,.,.)) + 2 eps g(B(Y,.), B(Y,.)).
    let commutator = &f_adj * &data.f - &data.f * &f_adj;
    let mut r3 = 0.0_f64;
    for i in 0..m {
        for j in i..m {
            let y = basis_vector(m, i) + basis_vector(m, j);
            let ad_y_sym = g.sym_part(&lie.ad(&y));
            let ad_star_y = g.ad_star(lie, &y);
            let hy = data.h_prime.contract(&y);
            let by = data.b_form.covector_with(&[&y]);
            let terms = [
                4.0 * g.endo_inner(&ad_y_sym, &ad_y_sym),
                -g.endo_inner(&ad_star_y, &ad_star_y),
                2.0 * eps * g.inner(&(&commutator * &y), &y),
                2.0 * g.form_inner(&hy, &hy)?,
                2.0 * eps * g.covector_inner(&by, &by),
            ];
            r3 = r3.max(normalized_residual(&terms));
        }
    }

    // Equation 5 (symmetry in Y, Z):
    // g(ad*(Y), H'_Z) - 2 g(f*(Y), B(Z,.)^sharp) is symmetric.
    let mut r5 = 0.0_f64;
    for i in 0..m {
        for j in (i + 1)..m {
            let y = basis_vector(m, i);
            let z = basis_vector(m, j);
            let val = |a: &DVector<f64>, b: &DVector<f64>| -> Result<[f64; 2]> {
                let ad_star_a = g.ad_star(lie, a);
                let h_b = g.h_endo(&data.h_prime, b);
                let b_b = g.sharp(&data.b_form.covector_with(&[b]));
                Ok([
                    g.endo_inner(&ad_star_a, &h_b),
                    -2.0 * g.inner(&(&f_adj * a), &b_b),
                ])
            };
            let yz = val(&y, &z)?;
            let zy = val(&z, &y)?;
            r5 = r5.max(normalized_residual(&[yz[0], yz[1], -zy[0], -zy[1]]));
        }
    }

    let residuals = [r1, r2, r3, r4, r5];
    let total = residuals.iter().fold(0.0_f64, |m, r| m.max(*r));
    Ok(Codim1Report {
        residuals,
        total,
        data,
    })
}

/// Data extracted relative to a non-degenerate codimension two ideal:
/// an orthonormal pair spanning the complement, the action operators, the
/// bracket decomposition `[X_1, X_2] = a X_1 + b X_2 + u` and the split
/// `H = H' + X_1^flat ^ B_1 + X_2^flat ^ B_2 + X_1^flat ^ X_2^flat ^ C`.
#[derive(Clone, Debug)]
pub struct Codim2Data {
    pub basis: DMatrix<f64>,
    pub x1: DVector<f64>,
    pub x2: DVector<f64>,
    pub eps1: f64,
    pub eps2: f64,
    pub a: f64,
    pub b: f64,
    /// Ideal component of `[X_1, X_2]`, in ideal coordinates.
    pub u: DVector<f64>,
    /// `C(Y) = eps1 eps2 H(X_1, X_2, Y)` as a covector on the ideal.
    pub c: DVector<f64>,
    pub restricted_algebra: LieAlgebra,
    pub restricted_metric: ScalarProduct,
    pub f1: DMatrix<f64>,
    pub f2: DMatrix<f64>,
    pub h_prime: KForm,
    pub b1: KForm,
    pub b2: KForm,
}

pub fn codim2_data(p: &GEProblem, sub: &Subspace) -> Result<Codim2Data> {
    let n = p.dim();
    let tol = p.tolerance;
    if sub.dim() + 2 != n {
        return Err(Error::WrongCodimension {
            expected: 2,
            got: n - sub.dim(),
        });
    }
    check_ideal(&p.algebra, sub, tol)?;
    let complement = Subspace::kernel(&(sub.basis().transpose() * p.metric.matrix()));
    if complement.dim() != 2 {
        return Err(Error::DegenerateComplement);
    }
    let g_comp = p
        .metric
        .restrict(complement.basis())
        .map_err(|_| Error::DegenerateComplement)?;
    // Orthonormal pair, negative sign first when the complement is indefinite.
    let frame = g_comp.orthonormal_frame();
    let x1 = complement.basis() * frame.vectors.column(0);
    let x2 = complement.basis() * frame.vectors.column(1);
    let eps1 = frame.signs[0];
    let eps2 = frame.signs[1];

    let basis = sub.basis().clone();
    let restricted_metric = p
        .metric
        .restrict(&basis)
        .map_err(|_| Error::DegenerateRestriction)?;
    let restricted_algebra = p.algebra.restrict(sub, tol)?;
    let f1 = basis.transpose() * p.algebra.ad(&x1) * &basis;
    let f2 = basis.transpose() * p.algebra.ad(&x2) * &basis;

    let x1x2 = p.algebra.bracket(&x1, &x2);
    let a = eps1 * p.metric.inner(&x1x2, &x1);
    let b = eps2 * p.metric.inner(&x1x2, &x2);
    let u = basis.transpose() * (&x1x2 - a * &x1 - b * &x2);

    let h_prime = restrict_form(&p.h_form, &basis)?;
    let b1 = restrict_form(&p.h_form.contract(&x1), &basis)?.scale(eps1);
    let b2 = restrict_form(&p.h_form.contract(&x2), &basis)?.scale(eps2);
    let m = sub.dim();
    let c = DVector::from_fn(m, |q, _| {
        let yq = basis.column(q).into_owned();
        eps1 * eps2 * p.h_form.apply(&[&x1, &x2, &yq])
    });
    Ok(Codim2Data {
        basis,
        x1,
        x2,
        eps1,
        eps2,
        a,
        b,
        u,
        c,
        restricted_algebra,
        restricted_metric,
        f1,
        f2,
        h_prime,
        b1,
        b2,
    })
}

/// Residuals of the nine zero-divergence Einstein equations relative to a
/// non-degenerate codimension two ideal.
#[derive(Clone, Debug)]
pub struct Codim2Report {
    pub residuals: [f64; 9],
    pub total: f64,
    pub data: Codim2Data,
}

pub fn codim2_residuals(p: &GEProblem, sub: &Subspace) -> Result<Codim2Report> {
    let data = codim2_data(p, sub)?;
    let m = sub.dim();
    let g = &data.restricted_metric;
    let lie = &data.restricted_algebra;
    let (e1, e2) = (data.eps1, data.eps2);
    let (a, b) = (data.a, data.b);
    let f1_sym = g.sym_part(&data.f1);
    let f2_sym = g.sym_part(&data.f2);
    let f1_adj = g.adjoint(&data.f1);
    let f2_adj = g.adjoint(&data.f2);
    let b1_endo = g.two_form_endo(&data.b1);
    let b2_endo = g.two_form_endo(&data.b2);
    let u_vec = &data.u;
    let c_sharp = g.sharp(&data.c);
    let guu = g.inner(u_vec, u_vec);
    let gcc = g.covector_inner(&data.c, &data.c);

    let r1 = normalized_residual(&[
        2.0 * g.endo_inner(&f1_sym, &f1_sym),
        g.form_inner(&data.b1, &data.b1)?,
        2.0 * b * b,
        e2 * (guu + gcc),
    ]);
    let r2 = normalized_residual(&[
        2.0 * g.endo_inner(&f2_sym, &f2_sym),
        g.form_inner(&data.b2, &data.b2)?,
        2.0 * a * a,
        e1 * (guu + gcc),
    ]);
    let r3 = normalized_residual(&[
        2.0 * g.endo_inner(&f1_sym, &f2_sym),
        e1 * e2 * g.form_inner(&data.b1, &data.b2)?,
        -2.0 * a * b,
    ]);

    let commutator1 = &f1_adj * &data.f1 - &data.f1 * &f1_adj;
    let commutator2 = &f2_adj * &data.f2 - &data.f2 * &f2_adj;

    let mut r4 = 0.0_f64;
    let mut r5 = 0.0_f64;
    let mut r7 = 0.0_f64;
    let mut r8 = 0.0_f64;
    for q in 0..m {
        let y = basis_vector(m, q);
        let ad_y_sym = g.sym_part(&lie.ad(&y));
        let ad_star_y = g.ad_star(lie, &y);
        let hy = data.h_prime.contract(&y);
        let ufl_y = g.inner(u_vec, &y);
        let b1y = data.b1.covector_with(&[&y]);
        let b2y = data.b2.covector_with(&[&y]);
        let cy = data.c.dot(&y);

        r4 = r4.max(normalized_residual(&[
            2.0 * g.endo_inner(&f1_sym, &ad_y_sym),
            g.form_inner(&data.b1, &hy)?,
            -e2 * a * ufl_y,
            -e2 * g.inner(u_vec, &(&data.f2 * &y)),
            -e2 * e1 * g.covector_inner(&data.c, &b2y),
        ]));
        r5 = r5.max(normalized_residual(&[
            2.0 * g.endo_inner(&f2_sym, &ad_y_sym),
            g.form_inner(&data.b2, &hy)?,
            -e1 * b * ufl_y,
            e1 * g.inner(u_vec, &(&data.f1 * &y)),
            e1 * e2 * g.covector_inner(&data.c, &b1y),
        ]));
        r7 = r7.max(normalized_residual(&[
            g.endo_inner(&ad_star_y, &b1_endo),
            2.0 * e1 * g.inner(&c_sharp, &(&f2_adj * &y)),
            -2.0 * e1 * a * cy,
        ]));
        r8 = r8.max(normalized_residual(&[
            g.endo_inner(&ad_star_y, &b2_endo),
            -2.0 * e2 * g.inner(&c_sharp, &(&f1_adj * &y)),
            -2.0 * e2 * b * cy,
        ]));
    }

    let mut r6 = 0.0_f64;
    for i in 0..m {
        for j in i..m {
            let y = basis_vector(m, i) + basis_vector(m, j);
            let ad_y_sym = g.sym_part(&lie.ad(&y));
            let ad_star_y = g.ad_star(lie, &y);
            let hy = data.h_prime.contract(&y);
            let b1y = data.b1.covector_with(&[&y]);
            let b2y = data.b2.covector_with(&[&y]);
            let cy = data.c.dot(&y);
            let ufl_y = g.inner(u_vec, &y);
            let terms = [
                4.0 * g.endo_inner(&ad_y_sym, &ad_y_sym),
                -g.endo_inner(&ad_star_y, &ad_star_y),
                2.0 * g.form_inner(&hy, &hy)?,
                2.0 * e1 * g.inner(&(&commutator1 * &y), &y),
                2.0 * e1 * g.covector_inner(&b1y, &b1y),
                2.0 * e2 * g.inner(&(&commutator2 * &y), &y),
                2.0 * e2 * g.covector_inner(&b2y, &b2y),
                2.0 * e1 * e2 * (cy * cy - ufl_y * ufl_y),
            ];
            r6 = r6.max(normalized_residual(&terms));
        }
    }

    let mut r9 = 0.0_f64;
    for i in 0..m {
        for j in (i + 1)..m {
            let y = basis_vector(m, i);
            let z = basis_vector(m, j);
            let one_side = |s: &DVector<f64>, t: &DVector<f64>| -> Result<[f64; 3]> {
                let ad_star_s = g.ad_star(lie, s);
                let h_t = g.h_endo(&data.h_prime, t);
                let b1_t = g.sharp(&data.b1.covector_with(&[t]));
                let b2_t = g.sharp(&data.b2.covector_with(&[t]));
                Ok([
                    g.endo_inner(&ad_star_s, &h_t),
                    -2.0 * g.inner(&(&f1_adj * s), &b1_t),
                    -2.0 * g.inner(&(&f2_adj * s), &b2_t),
                ])
            };
            let yz = one_side(&y, &z)?;
            let zy = one_side(&z, &y)?;
            let ufl_y = g.inner(u_vec, &y);
            let ufl_z = g.inner(u_vec, &z);
            let cy = data.c.dot(&y);
            let cz = data.c.dot(&z);
            let terms = [
                yz[0],
                yz[1],
                yz[2],
                -zy[0],
                -zy[1],
                -zy[2],
                2.0 * ufl_y * cz,
                -2.0 * ufl_z * cy,
            ];
            r9 = r9.max(normalized_residual(&terms));
        }
    }

    let residuals = [r1, r2, r3, r4, r5, r6, r7, r8, r9];
    let total = residuals.iter().fold(0.0_f64, |m, r| m.max(*r));
    Ok(Codim2Report {
        residuals,
        total,
        data,
    })
}

/// Outcome of the structure test for Riemannian generalised Einstein
/// algebras: the orthogonal complement of the commutator ideal must be an
/// Abelian subalgebra acting skew-symmetrically, `H` must not see it, the
/// divergence must kill `[h, g'] + [h, g']^flat`, and the restricted problem
/// on the commutator ideal must itself be generalised Einstein.
#[derive(Clone, Debug)]
pub struct RiemannianReduction {
    pub h_abelian_residual: f64,
    pub h_acts_skew_residual: f64,
    pub h_hook_residual: f64,
    pub divergence_residual: f64,
    pub restricted_report: EinsteinReport,
    pub restricted_problem: GEProblem,
    /// All structural residuals below tolerance and the restricted problem
    /// generalised Einstein.
    pub is_einstein: bool,
}

pub fn riemannian_reduction_check(p: &GEProblem) -> Result<RiemannianReduction> {
    if !p.metric.is_riemannian() {
        let (pos, neg) = p.metric.signature();
        return Err(Error::WrongSignature {
            pos,
            neg,
            expected: "Riemannian".into(),
        });
    }
    let tol = p.tolerance;
    let commutator = p.algebra.commutator_ideal();
    let h_space = Subspace::kernel(&(commutator.basis().transpose() * p.metric.matrix()));

    let mut h_abelian_residual = 0.0_f64;
    for i in 0..h_space.dim() {
        for j in (i + 1)..h_space.dim() {
            let w = p
                .algebra
                .bracket(&h_space.basis_vector(i), &h_space.basis_vector(j));
            h_abelian_residual = h_abelian_residual.max(w.amax());
        }
    }

    let basis = commutator.basis().clone();
    let g_sub = p
        .metric
        .restrict(&basis)
        .map_err(|_| Error::DegenerateRestriction)?;
    let mut h_acts_skew_residual = 0.0_f64;
    let mut h_hook_residual = 0.0_f64;
    for i in 0..h_space.dim() {
        let x = h_space.basis_vector(i);
        let action = basis.transpose() * p.algebra.ad(&x) * &basis;
        h_acts_skew_residual =
            h_acts_skew_residual.max((g_sub.adjoint(&action) + &action).amax());
        h_hook_residual = h_hook_residual.max(p.h_form.contract(&x).sup_norm());
    }

    let bracket_span = p.algebra.bracket_span(&h_space, &commutator);
    let mut divergence_residual = 0.0_f64;
    for j in 0..bracket_span.dim() {
        let w = bracket_span.basis_vector(j);
        divergence_residual = divergence_residual
            .max(p.divergence.apply_vector(&w).abs())
            .max(p.divergence.apply_covector(&p.metric.flat(&w)).abs());
    }

    let restricted_algebra = p.algebra.restrict(&commutator, tol)?;
    let restricted_h = restrict_form(&p.h_form, &basis)?;
    let restricted_divergence = p.divergence.restrict(&p.metric, &basis, &g_sub);
    let restricted_problem = GEProblem::new(
        restricted_algebra,
        g_sub,
        restricted_h,
        restricted_divergence,
        tol,
    )?;
    let restricted_report = einstein_residuals(&restricted_problem);

    let is_einstein = h_abelian_residual <= tol
        && h_acts_skew_residual <= tol
        && h_hook_residual <= tol
        && divergence_residual <= tol
        && restricted_report.is_einstein;
    Ok(RiemannianReduction {
        h_abelian_residual,
        h_acts_skew_residual,
        h_hook_residual,
        divergence_residual,
        restricted_report,
        restricted_problem,
        is_einstein,
    })
}

/// The space of divergence operators for which a structure that is
/// generalised Einstein with `delta = 0` stays generalised Einstein,
/// as a subspace of `E* = R^{2n}` in [`Divergence::coords`] coordinates.
///
/// Refuses to answer when the zero-divergence problem is not Einstein, since
/// the linear characterisation of admissible divergences only holds there.
pub fn admissible_divergences(
    algebra: &LieAlgebra,
    metric: &ScalarProduct,
    h_form: &KForm,
    tolerance: f64,
) -> Result<Subspace> {
    let base = GEProblem::with_zero_divergence(
        algebra.clone(),
        metric.clone(),
        h_form.clone(),
        tolerance,
    )?;
    let report = einstein_residuals(&base);
    if !report.is_einstein {
        return Err(Error::NotEinsteinAtZeroDivergence {
            residual: report.total,
        });
    }
    let n = algebra.dim();
    let mut rows: Vec<DVector<f64>> = Vec::new();
    let mut push_row = |vector: DVector<f64>, covector: DVector<f64>| {
        let mut row = DVector::zeros(2 * n);
        for k in 0..n {
            row[k] = vector[k];
            row[n + k] = covector[k];
        }
        rows.push(row);
    };
    for i in 0..n {
        for j in i..n {
            let x = basis_vector(n, i) + basis_vector(n, j);
            let w = metric.adjoint(&algebra.ad(&x)) * &x;
            push_row(w.clone(), DVector::zeros(n));
            push_row(DVector::zeros(n), metric.flat(&w));
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let x = basis_vector(n, i);
            let y = basis_vector(n, j);
            let bracket = algebra.bracket_basis(i, j);
            let h_xy = h_form.covector_with(&[&x, &y]);
            push_row(bracket.clone(), h_xy.clone());
            push_row(metric.sharp(&h_xy), metric.flat(&bracket));
        }
    }
    let mut matrix = DMatrix::zeros(rows.len(), 2 * n);
    for (r, row) in rows.iter().enumerate() {
        matrix.set_row(r, &row.transpose());
    }
    Ok(Subspace::kernel(&matrix))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::three_form;
    use crate::DEFAULT_TOL;

    fn so3_r_problem(a: f64, eps: f64, b: f64) -> GEProblem {
        let algebra = LieAlgebra::new(
            4,
            &[
                (1, 2, 3, eps * a),
                (2, 3, 1, eps * a),
                (3, 1, 2, eps * a),
                (3, 4, 2, b),
                (4, 2, 3, b),
            ],
        )
        .unwrap();
        let metric = ScalarProduct::euclidean(4);
        let h = three_form(4, &[(1, 2, 3, a)]).unwrap();
        GEProblem::with_zero_divergence(algebra, metric, h, DEFAULT_TOL).unwrap()
    }

    #[test]
    fn abelian_with_any_divergence_is_einstein() {
        let algebra = LieAlgebra::abelian(3);
        let metric = ScalarProduct::diagonal(&[1.0, -1.0, 1.0]).unwrap();
        let h = KForm::zero(3, 3).unwrap();
        let delta = Divergence::new(
            DVector::from_row_slice(&[0.3, -1.0, 0.2]),
            DVector::from_row_slice(&[1.0, 0.5, -0.7]),
        );
        let p = GEProblem::new(algebra, metric, h, delta, DEFAULT_TOL).unwrap();
        let report = einstein_residuals(&p);
        assert!(report.is_einstein, "{report:?}");
        let trace = trace_route_residuals(&p);
        assert!(trace.is_einstein, "{trace:?}");
    }

    #[test]
    fn compact_simple_instance_is_einstein_on_both_routes() {
        for (a, eps, b) in [(1.0, 1.0, 0.0), (1.5, -1.0, 0.7), (0.5, 1.0, -2.0)] {
            let p = so3_r_problem(a, eps, b);
            let report = einstein_residuals(&p);
            assert!(report.total < 1e-12, "explicit route: {report:?}");
            let trace = trace_route_residuals(&p);
            assert!(trace.total < 1e-12, "trace route: {trace:?}");
        }
    }

    #[test]
    fn wrong_h_scale_fails_both_routes() {
        let mut p = so3_r_problem(1.0, 1.0, 0.0);
        p.h_form = p.h_form.scale(2.0);
        let report = einstein_residuals(&p);
        assert!(!report.is_einstein);
        assert!(report.eq1 > 0.1, "{report:?}");
        let trace = trace_route_residuals(&p);
        assert!(!trace.is_einstein);
    }

    #[test]
    fn beta_routes_agree() {
        let p = so3_r_problem(1.3, -1.0, 0.4);
        let via_gamma = beta_via_gamma(&p);
        let via_trace = beta_via_trace(&p);
        let scale = via_gamma.amax().max(via_trace.amax()).max(1.0);
        assert!(
            (via_gamma.clone() - via_trace).amax() / scale < 1e-12,
            "beta mismatch"
        );
        let n = p.dim();
        for i in 0..n {
            for j in 0..n {
                let x = basis_vector(n, i);
                let y = basis_vector(n, j);
                let pointwise = beta_trace(&p, &x, &y);
                assert!((pointwise - via_gamma[(i, j)]).abs() < 1e-12);
                let (sym, antisym) = beta_explicit(&p, &x, &y);
                assert!(
                    (pointwise - sym - antisym).abs() < 1e-12,
                    "split mismatch at ({i},{j})"
                );
            }
        }
    }

    #[test]
    fn beta_split_symmetry_types() {
        let p = so3_r_problem(0.9, 1.0, 1.7);
        let n = p.dim();
        for i in 0..n {
            for j in 0..n {
                let x = basis_vector(n, i);
                let y = basis_vector(n, j);
                let (s_xy, a_xy) = beta_explicit(&p, &x, &y);
                let (s_yx, a_yx) = beta_explicit(&p, &y, &x);
                assert!((s_xy - s_yx).abs() < 1e-12);
                assert!((a_xy + a_yx).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn dorfman_is_a_quadratic_lie_bracket() {
        let p = so3_r_problem(1.0, 1.0, 0.5);
        let n = p.dim();
        let gv = |v: &[f64], c: &[f64]| GeneralisedVector {
            vector: DVector::from_row_slice(v),
            covector: DVector::from_row_slice(c),
        };
        let a = gv(&[1.0, 0.2, -0.5, 0.7], &[0.1, 0.0, 1.0, -0.3]);
        let b = gv(&[0.0, 1.0, 0.4, -0.2], &[0.5, -0.6, 0.0, 0.8]);
        let c = gv(&[-0.7, 0.3, 1.0, 0.1], &[0.2, 0.9, -0.4, 0.0]);
        // Antisymmetry.
        let ab = p.dorfman(&a, &b);
        let ba = p.dorfman(&b, &a);
        assert!(ab.add(&ba).amax() < 1e-12);
        // Jacobi in Leibniz form.
        let lhs = p.dorfman(&a, &p.dorfman(&b, &c));
        let rhs = p.dorfman(&p.dorfman(&a, &b), &c).add(&p.dorfman(&b, &p.dorfman(&a, &c)));
        assert!(lhs.add(&rhs.scale(-1.0)).amax() < 1e-12);
        // Invariance of the pairing: <[a,b], c> + <b, [a,c]> = 0.
        let inv = ab.pairing(&c) + b.pairing(&p.dorfman(&a, &c));
        assert!(inv.abs() < 1e-12);
        // g* is an Abelian ideal.
        let xi = gv(&[0.0; 4], &[0.3, -0.2, 0.5, 0.1]);
        let eta = gv(&[0.0; 4], &[1.0, 0.0, -0.8, 0.4]);
        assert!(p.dorfman(&xi, &eta).amax() < 1e-12);
        assert!(p.dorfman(&a, &xi).vector.amax() < 1e-12);
        let _ = n;
    }

    #[test]
    fn codim1_route_agrees_with_direct_route() {
        // Almost Abelian example: f = M3-type on a Lorentzian ideal.
        let sigma = 0.8_f64;
        let algebra = LieAlgebra::new(
            4,
            &[
                (4, 1, 1, 0.0),
                (4, 1, 3, -1.0 + sigma),
                (4, 2, 3, 1.0 + sigma),
                (4, 3, 1, -1.0 + sigma),
                (4, 3, 2, -1.0 - sigma),
            ],
        )
        .unwrap();
        let metric = ScalarProduct::diagonal(&[-1.0, 1.0, 1.0, 1.0]).unwrap();
        let h = KForm::zero(4, 3).unwrap();
        let p = GEProblem::with_zero_divergence(algebra, metric, h, DEFAULT_TOL).unwrap();
        let sub = Subspace::span(
            4,
            &[basis_vector(4, 0), basis_vector(4, 1), basis_vector(4, 2)],
        );
        let direct = einstein_residuals(&p);
        let reduced = codim1_residuals(&p, &sub).unwrap();
        assert_eq!(direct.is_einstein, reduced.total < p.tolerance);
        assert!(reduced.total < 1e-12, "{:?}", reduced.residuals);
    }

    #[test]
    fn admissible_divergences_needs_einstein_base() {
        let algebra = LieAlgebra::new(3, &[(1, 2, 3, 1.0)]).unwrap();
        let metric = ScalarProduct::euclidean(3);
        let h = KForm::zero(3, 3).unwrap();
        let err = admissible_divergences(&algebra, &metric, &h, DEFAULT_TOL).unwrap_err();
        assert!(matches!(err, Error::NotEinsteinAtZeroDivergence { .. }));
    }

    #[test]
    fn admissible_divergences_of_flat_abelian_space_is_everything() {
        let algebra = LieAlgebra::abelian(3);
        let metric = ScalarProduct::euclidean(3);
        let h = KForm::zero(3, 3).unwrap();
        let space = admissible_divergences(&algebra, &metric, &h, DEFAULT_TOL).unwrap();
        assert_eq!(space.dim(), 6);
    }
}
