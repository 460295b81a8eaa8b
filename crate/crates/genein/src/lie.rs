//! Finite-dimensional real Lie algebras presented by structure constants,
//! exterior forms on them, and the Chevalley-Eilenberg differential.
//!
//! Conventions: a basis (e_1, ..., e_n) is fixed once and for all, vectors are
//! coordinate columns, and the bracket is stored through the constants
//! c^k_{ij} defined by [e_i, e_j] = sum_k c^k_{ij} e_k. The differential of a
//! one-form acts by d xi (X, Y) = -xi([X, Y]), so the shorthand
//! "d e^1 = e^{23}" describes an algebra with [e_2, e_3] = -e_1.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Relative threshold used for numerical rank decisions throughout the crate.
pub(crate) const RANK_RTOL: f64 = 1e-9;

/// A real Lie algebra of dimension `dim` given by structure constants.
#[derive(Clone, Debug, PartialEq)]
pub struct LieAlgebra {
    dim: usize,
    /// `c[k][(i, j)]` is the coefficient of `e_{k+1}` in `[e_{i+1}, e_{j+1}]`.
    c: Vec<DMatrix<f64>>,
}

impl LieAlgebra {
    /// Builds an algebra from a list of bracket entries `(i, j, k, v)` meaning
    /// `[e_i, e_j] = ... + v e_k + ...` with one-based indices.
    ///
    /// Antisymmetry is imposed automatically, so entries may use either index
    /// order; an entry conflicting with an earlier one (directly or through
    /// antisymmetry) is rejected. The Jacobi identity is deliberately not
    /// checked here, so that invalid candidates can be built and then probed
    /// with [`LieAlgebra::jacobi_residual`].
    pub fn new(dim: usize, entries: &[(usize, usize, usize, f64)]) -> Result<Self> {
        let mut c: Vec<DMatrix<f64>> = vec![DMatrix::zeros(dim, dim); dim];
        let mut seen = vec![false; dim * dim * dim];
        for &(i1, j1, k1, v) in entries {
            for idx in [i1, j1, k1] {
                if idx < 1 || idx > dim {
                    return Err(Error::IndexOutOfRange { index: idx, dim });
                }
            }
            if i1 == j1 {
                return Err(Error::BadParameter {
                    name: format!("bracket ({i1},{j1},{k1})"),
                    reason: "bracket of a basis vector with itself is zero".into(),
                });
            }
            let (i, j, k) = (i1 - 1, j1 - 1, k1 - 1);
            let slot = (i * dim + j) * dim + k;
            let mirror = (j * dim + i) * dim + k;
            if seen[slot] || seen[mirror] {
                let old = c[k][(i, j)];
                if (old - v).abs() > 0.0 {
                    return Err(Error::ConflictingEntry {
                        entry: format!("({i1},{j1},{k1})"),
                        first: old,
                        second: v,
                    });
                }
                continue;
            }
            seen[slot] = true;
            c[k][(i, j)] = v;
            c[k][(j, i)] = -v;
        }
        Ok(Self { dim, c })
    }

    /// The Abelian algebra of the given dimension.
    pub fn abelian(dim: usize) -> Self {
        Self {
            dim,
            c: vec![DMatrix::zeros(dim, dim); dim],
        }
    }

    /// Builds an algebra from structure constant matrices `c[k][(i, j)] = c^k_{ij}`.
    ///
    /// Symmetric parts are discarded so the result is always antisymmetric.
    pub fn from_structure_constants(c: Vec<DMatrix<f64>>) -> Result<Self> {
        let dim = c.len();
        for m in &c {
            if m.nrows() != dim || m.ncols() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: m.nrows().max(m.ncols()),
                });
            }
        }
        let c = c.into_iter().map(|m| 0.5 * (&m - m.transpose())).collect();
        Ok(Self { dim, c })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Structure constant `c^k_{ij}` with zero-based indices.
    pub fn structure_constant(&self, i: usize, j: usize, k: usize) -> f64 {
        self.c[k][(i, j)]
    }

    /// `[x, y]` for coordinate vectors.
    pub fn bracket(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        DVector::from_fn(self.dim, |k, _| (x.transpose() * &self.c[k] * y)[(0, 0)])
    }

    /// `[e_i, e_j]` with zero-based indices.
    pub fn bracket_basis(&self, i: usize, j: usize) -> DVector<f64> {
        DVector::from_fn(self.dim, |k, _| self.c[k][(i, j)])
    }

    /// The adjoint operator `ad_x = [x, .]` as a matrix.
    pub fn ad(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for k in 0..self.dim {
            let row = x.transpose() * &self.c[k];
            for j in 0..self.dim {
                m[(k, j)] = row[(0, j)];
            }
        }
        m
    }

    /// `ad_{e_i}` with a zero-based index.
    pub fn ad_basis(&self, i: usize) -> DMatrix<f64> {
        DMatrix::from_fn(self.dim, self.dim, |k, j| self.c[k][(i, j)])
    }

    /// Sup norm over basis triples of the Jacobi cyclic sum
    /// `[e_i,[e_j,e_k]] + [e_j,[e_k,e_i]] + [e_k,[e_i,e_j]]`.
    pub fn jacobi_residual(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                for k in (j + 1)..n {
                    let ei = basis_vector(n, i);
                    let ej = basis_vector(n, j);
                    let ek = basis_vector(n, k);
                    let cyc = self.bracket(&ei, &self.bracket(&ej, &ek))
                        + self.bracket(&ej, &self.bracket(&ek, &ei))
                        + self.bracket(&ek, &self.bracket(&ei, &ej));
                    worst = worst.max(cyc.amax());
                }
            }
        }
        worst
    }

    /// The trace form `tau(x) = tr(ad_x)` as a covector.
    pub fn trace_form(&self) -> DVector<f64> {
        DVector::from_fn(self.dim, |i, _| self.ad_basis(i).trace())
    }

    /// Unimodular means the trace form vanishes.
    pub fn is_unimodular(&self, tol: f64) -> bool {
        self.trace_form().amax() <= tol
    }

    /// The commutator ideal `[g, g]` as the span of all basis brackets.
    pub fn commutator_ideal(&self) -> Subspace {
        let mut spanning = Vec::new();
        for i in 0..self.dim {
            for j in (i + 1)..self.dim {
                spanning.push(self.bracket_basis(i, j));
            }
        }
        Subspace::span(self.dim, &spanning)
    }

    /// The center, the kernel of `x -> ad_x`.
    pub fn center(&self) -> Subspace {
        // Stack all ad matrices as rows of an n^2 x n system.
        let n = self.dim;
        let mut m = DMatrix::zeros(n * n, n);
        for i in 0..n {
            let ad_i = self.ad_basis(i);
            for r in 0..n {
                for c in 0..n {
                    m[(r * n + c, i)] = ad_i[(r, c)];
                }
            }
        }
        Subspace::kernel(&m)
    }

    /// Derived series termination test.
    pub fn is_solvable(&self) -> bool {
        let mut current = Subspace::full(self.dim);
        loop {
            let next = self.bracket_span(&current, &current);
            if next.dim() == 0 {
                return true;
            }
            if next.dim() >= current.dim() {
                return false;
            }
            current = next;
        }
    }

    /// Lower central series termination test.
    pub fn is_nilpotent(&self) -> bool {
        let full = Subspace::full(self.dim);
        let mut current = self.bracket_span(&full, &full);
        let mut last_dim = self.dim;
        loop {
            if current.dim() == 0 {
                return true;
            }
            if current.dim() >= last_dim {
                return false;
            }
            last_dim = current.dim();
            current = self.bracket_span(&full, &current);
        }
    }

    /// Span of `[a, b]` over basis pairs of the two subspaces.
    pub fn bracket_span(&self, a: &Subspace, b: &Subspace) -> Subspace {
        let mut spanning = Vec::new();
        for p in 0..a.dim() {
            for q in 0..b.dim() {
                spanning.push(self.bracket(&a.basis_vector(p), &b.basis_vector(q)));
            }
        }
        Subspace::span(self.dim, &spanning)
    }

    /// Summary of the structural invariants used by the catalog.
    pub fn structure_analysis(&self, tol: f64) -> StructureAnalysis {
        StructureAnalysis {
            dim: self.dim,
            commutator_dim: self.commutator_ideal().dim(),
            center_dim: self.center().dim(),
            solvable: self.is_solvable(),
            nilpotent: self.is_nilpotent(),
            unimodular: self.is_unimodular(tol),
            trace_form: self.trace_form(),
        }
    }

    /// Restricts the bracket to a subalgebra, in the coordinates of the
    /// subspace basis. Fails if the span is not closed under the bracket.
    /// Coordinates below `tol` relative to the structure-constant scale are
    /// rounding noise of the orthonormalised basis and are snapped to zero.
    pub fn restrict(&self, sub: &Subspace, tol: f64) -> Result<LieAlgebra> {
        let m = sub.dim();
        let scale = self.c.iter().map(|ck| ck.amax()).fold(0.0, f64::max);
        let floor = tol * (1.0 + scale);
        let mut c = vec![DMatrix::zeros(m, m); m];
        for p in 0..m {
            for q in (p + 1)..m {
                let w = self.bracket(&sub.basis_vector(p), &sub.basis_vector(q));
                let leak = (&w - sub.project(&w)).amax();
                if leak > tol * (1.0 + w.amax()) {
                    return Err(Error::NotASubalgebra { residual: leak });
                }
                let coords = sub.coordinates(&w);
                for k in 0..m {
                    let value = if coords[k].abs() <= floor { 0.0 } else { coords[k] };
                    c[k][(p, q)] = value;
                    c[k][(q, p)] = -value;
                }
            }
        }
        Ok(LieAlgebra { dim: m, c })
    }
}

/// Structural invariants of a Lie algebra.
#[derive(Clone, Debug)]
pub struct StructureAnalysis {
    pub dim: usize,
    pub commutator_dim: usize,
    pub center_dim: usize,
    pub solvable: bool,
    pub nilpotent: bool,
    pub unimodular: bool,
    pub trace_form: DVector<f64>,
}

/// Standard basis vector of length `n` (zero-based index).
pub fn basis_vector(n: usize, i: usize) -> DVector<f64> {
    let mut v = DVector::zeros(n);
    v[i] = 1.0;
    v
}

/// Eigendecomposition `m = V diag(l) V^T` of a symmetric matrix by the
/// cyclic Jacobi method. nalgebra's `SymmetricEigen` mispairs eigenvalues
/// and eigenvectors on some well-conditioned inputs, so the crate carries
/// its own solver; Jacobi is slow but dependable at the dimensions used
/// here, and its recomposition is machine-accurate.
pub(crate) fn symmetric_eigen(m: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let n = m.nrows();
    let mut a = 0.5 * (m + m.transpose());
    let mut v = DMatrix::<f64>::identity(n, n);
    let scale = a.amax().max(1e-300);
    for _sweep in 0..100 {
        let mut off = 0.0_f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off = off.max(a[(p, q)].abs());
            }
        }
        if off <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq.abs() <= 1e-18 * scale {
                    continue;
                }
                let tau = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = tau.signum() / (tau.abs() + (tau * tau + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    (a.diagonal(), v)
}

/// A linear subspace of R^n carried by a Euclidean-orthonormal basis.
#[derive(Clone, Debug)]
pub struct Subspace {
    ambient_dim: usize,
    /// Columns form an orthonormal basis of the subspace.
    basis: DMatrix<f64>,
}

impl Subspace {
    /// Span of a list of vectors, with numerical rank determined by SVD.
    pub fn span(ambient_dim: usize, vectors: &[DVector<f64>]) -> Self {
        if vectors.is_empty() {
            return Self::zero(ambient_dim);
        }
        let mut m = DMatrix::zeros(ambient_dim, vectors.len());
        for (j, v) in vectors.iter().enumerate() {
            m.set_column(j, v);
        }
        let svd = m.svd(true, false);
        let u = svd.u.as_ref().expect("svd with u");
        let smax = svd.singular_values.max();
        let rank = svd
            .singular_values
            .iter()
            .filter(|&&s| s > RANK_RTOL * smax.max(1e-300))
            .count();
        Self {
            ambient_dim,
            basis: u.columns(0, rank).into_owned(),
        }
    }

    /// Kernel of a matrix, via the right singular vectors.
    pub fn kernel(m: &DMatrix<f64>) -> Self {
        let n = m.ncols();
        if m.nrows() == 0 {
            return Self::full(n);
        }
        // Pad with zero rows so that the thin SVD carries all n right
        // singular vectors even for wide matrices.
        let rows = m.nrows().max(n);
        let mut padded = DMatrix::zeros(rows, n);
        padded.view_mut((0, 0), (m.nrows(), n)).copy_from(m);
        let svd = padded.svd(false, true);
        let vt = svd.v_t.as_ref().expect("svd with v_t");
        let smax = svd.singular_values.max();
        let thresh = RANK_RTOL * smax.max(1e-300);
        let mut cols = Vec::new();
        for (idx, &s) in svd.singular_values.iter().enumerate() {
            if s <= thresh {
                cols.push(vt.row(idx).transpose());
            }
        }
        Self::span(n, &cols)
    }

    pub fn zero(ambient_dim: usize) -> Self {
        Self {
            ambient_dim,
            basis: DMatrix::zeros(ambient_dim, 0),
        }
    }

    pub fn full(ambient_dim: usize) -> Self {
        Self {
            ambient_dim,
            basis: DMatrix::identity(ambient_dim, ambient_dim),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    /// The orthonormal basis, one column per basis vector.
    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn basis_vector(&self, j: usize) -> DVector<f64> {
        self.basis.column(j).into_owned()
    }

    /// Euclidean-orthogonal projection onto the subspace.
    pub fn project(&self, v: &DVector<f64>) -> DVector<f64> {
        &self.basis * (self.basis.transpose() * v)
    }

    /// Coordinates of a vector of the subspace in the stored basis.
    pub fn coordinates(&self, v: &DVector<f64>) -> DVector<f64> {
        self.basis.transpose() * v
    }

    pub fn contains(&self, v: &DVector<f64>, tol: f64) -> bool {
        (v - self.project(v)).amax() <= tol * (1.0 + v.amax())
    }

    /// Sum of two subspaces of the same ambient space.
    pub fn sum(&self, other: &Subspace) -> Subspace {
        let mut vectors = Vec::new();
        for j in 0..self.dim() {
            vectors.push(self.basis_vector(j));
        }
        for j in 0..other.dim() {
            vectors.push(other.basis_vector(j));
        }
        Subspace::span(self.ambient_dim, &vectors)
    }
}

/// An alternating k-form on R^n, stored densely with full antisymmetry.
#[derive(Clone, Debug, PartialEq)]
pub struct KForm {
    dim: usize,
    degree: usize,
    /// Row-major dense tensor of size dim^degree.
    coeffs: Vec<f64>,
}

impl KForm {
    /// The zero form. Degrees above the dimension are allowed (the form is
    /// then identically zero); the cap only guards dense storage size.
    pub fn zero(dim: usize, degree: usize) -> Result<Self> {
        if degree > 6 {
            return Err(Error::DegreeTooLarge { degree, dim });
        }
        Ok(Self {
            dim,
            degree,
            coeffs: vec![0.0; dim.pow(degree as u32)],
        })
    }

    /// Builds a form from `(indices, value)` terms with one-based, strictly
    /// increasing index tuples. Duplicate tuples are rejected.
    pub fn from_terms(dim: usize, degree: usize, terms: &[(Vec<usize>, f64)]) -> Result<Self> {
        let mut form = Self::zero(dim, degree)?;
        let mut seen = std::collections::HashSet::new();
        for (indices, value) in terms {
            if indices.len() != degree {
                return Err(Error::DegreeMismatch {
                    expected: degree,
                    got: indices.len(),
                });
            }
            for &idx in indices {
                if idx < 1 || idx > dim {
                    return Err(Error::IndexOutOfRange { index: idx, dim });
                }
            }
            if indices.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::NonIncreasingIndices {
                    entry: format!("{indices:?}"),
                });
            }
            if !seen.insert(indices.clone()) {
                return Err(Error::DuplicateEntry {
                    entry: format!("{indices:?}"),
                });
            }
            let zero_based: Vec<usize> = indices.iter().map(|&i| i - 1).collect();
            form.set_canonical(&zero_based, *value);
        }
        Ok(form)
    }

    /// The basis one-form `e^{i+1}` (zero-based index).
    pub fn basis_one_form(dim: usize, i: usize) -> Self {
        let mut form = Self::zero(dim, 1).expect("degree 1 fits");
        form.coeffs[i] = 1.0;
        form
    }

    /// Wraps a covector as a one-form.
    pub fn from_covector(xi: &DVector<f64>) -> Self {
        Self {
            dim: xi.len(),
            degree: 1,
            coeffs: xi.iter().copied().collect(),
        }
    }

    /// The coordinate covector of a one-form.
    pub fn to_covector(&self) -> Result<DVector<f64>> {
        if self.degree != 1 {
            return Err(Error::DegreeMismatch {
                expected: 1,
                got: self.degree,
            });
        }
        Ok(DVector::from_vec(self.coeffs.clone()))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    fn flat_index(&self, indices: &[usize]) -> usize {
        let mut pos = 0;
        for &i in indices {
            pos = pos * self.dim + i;
        }
        pos
    }

    /// Coefficient on a basis tuple (zero-based, any order, repeats give 0).
    pub fn get(&self, indices: &[usize]) -> f64 {
        debug_assert_eq!(indices.len(), self.degree);
        self.coeffs[self.flat_index(indices)]
    }

    /// Writes `value` on a strictly increasing tuple and fills every
    /// permutation with the matching sign.
    pub fn set_canonical(&mut self, indices: &[usize], value: f64) {
        debug_assert!(indices.windows(2).all(|w| w[0] < w[1]));
        let mut perm: Vec<usize> = (0..indices.len()).collect();
        permute_with_signs(&mut perm, 0, &mut |perm, sign| {
            let tuple: Vec<usize> = perm.iter().map(|&p| indices[p]).collect();
            let pos = self.flat_index(&tuple);
            self.coeffs[pos] = sign * value;
        });
    }

    /// Adds `value` on a strictly increasing tuple (and its permutations).
    pub fn add_canonical(&mut self, indices: &[usize], value: f64) {
        let old = self.get(indices);
        self.set_canonical(indices, old + value);
    }

    /// All strictly increasing index tuples with their coefficients.
    pub fn canonical_terms(&self) -> Vec<(Vec<usize>, f64)> {
        let mut out = Vec::new();
        let mut tuple = vec![0; self.degree];
        self.walk_canonical(0, 0, &mut tuple, &mut out);
        out
    }

    fn walk_canonical(
        &self,
        level: usize,
        start: usize,
        tuple: &mut Vec<usize>,
        out: &mut Vec<(Vec<usize>, f64)>,
    ) {
        if level == self.degree {
            out.push((tuple.clone(), self.get(tuple)));
            return;
        }
        for i in start..self.dim {
            tuple[level] = i;
            self.walk_canonical(level + 1, i + 1, tuple, out);
        }
    }

    /// Full evaluation on coordinate vectors.
    pub fn apply(&self, args: &[&DVector<f64>]) -> f64 {
        debug_assert_eq!(args.len(), self.degree);
        let mut total = 0.0;
        let mut indices = vec![0usize; self.degree];
        loop {
            let mut weight = 1.0;
            for (slot, &i) in indices.iter().enumerate() {
                weight *= args[slot][i];
            }
            if weight != 0.0 {
                total += weight * self.coeffs[self.flat_index(&indices)];
            }
            // Odometer increment over all multi-indices.
            let mut slot = self.degree;
            loop {
                if slot == 0 {
                    return total;
                }
                slot -= 1;
                indices[slot] += 1;
                if indices[slot] < self.dim {
                    break;
                }
                indices[slot] = 0;
            }
        }
    }

    /// Interior product `x -| omega`.
    pub fn contract(&self, x: &DVector<f64>) -> KForm {
        debug_assert!(self.degree >= 1);
        let n = self.dim;
        let tail = n.pow((self.degree - 1) as u32);
        let mut coeffs = vec![0.0; tail];
        for i in 0..n {
            let xi = x[i];
            if xi == 0.0 {
                continue;
            }
            let base = i * tail;
            for (j, c) in coeffs.iter_mut().enumerate() {
                *c += xi * self.coeffs[base + j];
            }
        }
        KForm {
            dim: n,
            degree: self.degree - 1,
            coeffs,
        }
    }

    /// The covector `m -> omega(args..., e_m)` for `args` one short of the degree.
    pub fn covector_with(&self, args: &[&DVector<f64>]) -> DVector<f64> {
        debug_assert_eq!(args.len() + 1, self.degree);
        let mut partial = self.clone();
        for &a in args {
            partial = partial.contract(a);
        }
        DVector::from_vec(partial.coeffs)
    }

    pub fn add(&self, other: &KForm) -> Result<KForm> {
        self.compatible(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Ok(KForm {
            dim: self.dim,
            degree: self.degree,
            coeffs,
        })
    }

    pub fn sub(&self, other: &KForm) -> Result<KForm> {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, factor: f64) -> KForm {
        KForm {
            dim: self.dim,
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
        }
    }

    fn compatible(&self, other: &KForm) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        if self.degree != other.degree {
            return Err(Error::DegreeMismatch {
                expected: self.degree,
                got: other.degree,
            });
        }
        Ok(())
    }

    /// Exterior product.
    pub fn wedge(&self, other: &KForm) -> Result<KForm> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        let degree = self.degree + other.degree;
        let mut out = KForm::zero(self.dim, degree)?;
        let p = self.degree;
        let terms = out.increasing_tuples();
        for tuple in terms {
            let mut total = 0.0;
            // Sum over p-element subsets of the tuple with shuffle signs.
            for_each_subset(tuple.len(), p, &mut |subset_mask| {
                let mut left = Vec::with_capacity(p);
                let mut right = Vec::with_capacity(degree - p);
                for (pos, &idx) in tuple.iter().enumerate() {
                    if subset_mask & (1usize << pos) != 0 {
                        left.push(idx);
                    } else {
                        right.push(idx);
                    }
                }
                let sign = shuffle_sign(subset_mask, tuple.len());
                let a = if p == 0 { 1.0 } else { self.get(&left) };
                let b = if degree - p == 0 { 1.0 } else { other.get(&right) };
                total += sign * a * b;
            });
            if total != 0.0 {
                out.set_canonical(&tuple, total);
            }
        }
        Ok(out)
    }

    fn increasing_tuples(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut tuple = vec![0usize; self.degree];
        fn walk(
            dim: usize,
            degree: usize,
            level: usize,
            start: usize,
            tuple: &mut Vec<usize>,
            out: &mut Vec<Vec<usize>>,
        ) {
            if level == degree {
                out.push(tuple.clone());
                return;
            }
            for i in start..dim {
                tuple[level] = i;
                walk(dim, degree, level + 1, i + 1, tuple, out);
            }
        }
        walk(self.dim, self.degree, 0, 0, &mut tuple, &mut out);
        out
    }

    pub fn sup_norm(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.sup_norm() <= tol
    }

    /// Chevalley-Eilenberg differential
    /// `d omega (X_0, ..., X_k) = sum_{a<b} (-1)^{a+b} omega([X_a, X_b], ..., no X_a, no X_b)`.
    pub fn ce_differential(&self, lie: &LieAlgebra) -> Result<KForm> {
        if lie.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: lie.dim(),
            });
        }
        let degree = self.degree + 1;
        let mut out = KForm::zero(self.dim, degree)?;
        for tuple in out.increasing_tuples() {
            let mut total = 0.0;
            for a in 0..degree {
                for b in (a + 1)..degree {
                    let z = lie.bracket_basis(tuple[a], tuple[b]);
                    let rest: Vec<usize> = tuple
                        .iter()
                        .enumerate()
                        .filter(|&(pos, _)| pos != a && pos != b)
                        .map(|(_, &idx)| idx)
                        .collect();
                    let sign = if (a + b) % 2 == 0 { 1.0 } else { -1.0 };
                    total += sign * self.eval_first_vector(&z, &rest);
                }
            }
            if total != 0.0 {
                out.set_canonical(&tuple, total);
            }
        }
        Ok(out)
    }

    /// `omega(z, e_{rest_1}, ..., e_{rest_{k-1}})` for a coordinate vector `z`.
    fn eval_first_vector(&self, z: &DVector<f64>, rest: &[usize]) -> f64 {
        let mut total = 0.0;
        let mut indices = Vec::with_capacity(self.degree);
        for m in 0..self.dim {
            if z[m] == 0.0 {
                continue;
            }
            indices.clear();
            indices.push(m);
            indices.extend_from_slice(rest);
            total += z[m] * self.coeffs[self.flat_index(&indices)];
        }
        total
    }

    /// Sup norm of `d omega`; forms of top degree are closed by convention.
    pub fn closedness_residual(&self, lie: &LieAlgebra) -> f64 {
        if self.degree >= self.dim {
            return 0.0;
        }
        self.ce_differential(lie)
            .map(|d| d.sup_norm())
            .unwrap_or(0.0)
    }

    pub fn is_closed(&self, lie: &LieAlgebra, tol: f64) -> bool {
        self.closedness_residual(lie) <= tol
    }
}

/// Convenience constructor for 3-forms from one-based `(i, j, k, value)` terms.
pub fn three_form(dim: usize, terms: &[(usize, usize, usize, f64)]) -> Result<KForm> {
    let converted: Vec<(Vec<usize>, f64)> = terms
        .iter()
        .map(|&(i, j, k, v)| (vec![i, j, k], v))
        .collect();
    KForm::from_terms(dim, 3, &converted)
}

/// Convenience constructor for 2-forms from one-based `(i, j, value)` terms.
pub fn two_form(dim: usize, terms: &[(usize, usize, f64)]) -> Result<KForm> {
    let converted: Vec<(Vec<usize>, f64)> = terms.iter().map(|&(i, j, v)| (vec![i, j], v)).collect();
    KForm::from_terms(dim, 2, &converted)
}

/// Calls `body` for every permutation of `perm[start..]` together with the
/// permutation sign, by Heap-style recursion on swaps.
fn permute_with_signs(perm: &mut Vec<usize>, start: usize, body: &mut impl FnMut(&[usize], f64)) {
    fn rec(perm: &mut Vec<usize>, k: usize, sign: f64, body: &mut impl FnMut(&[usize], f64)) {
        if k == perm.len() {
            body(perm, sign);
            return;
        }
        for i in k..perm.len() {
            perm.swap(k, i);
            let s = if i == k { sign } else { -sign };
            rec(perm, k + 1, s, body);
            perm.swap(k, i);
        }
    }
    rec(perm, start, 1.0, body);
}

/// Iterates over all `size`-element subsets of `{0, ..., len-1}` as bitmasks.
fn for_each_subset(len: usize, size: usize, body: &mut impl FnMut(usize)) {
    for mask in 0usize..(1 << len) {
        if mask.count_ones() as usize == size {
            body(mask);
        }
    }
}

/// Sign of the shuffle that sorts (subset positions, complement positions)
/// back to the identity: (-1)^(number of inversions).
fn shuffle_sign(mask: usize, len: usize) -> f64 {
    // Inversions are pairs (a, b) with a in the complement occurring before
    // b in the subset when reading positions in order.
    let mut inversions = 0usize;
    let mut subset_seen_later = 0usize;
    for pos in (0..len).rev() {
        if mask & (1 << pos) != 0 {
            subset_seen_later += 1;
        } else {
            inversions += subset_seen_later;
        }
    }
    if inversions % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Labels small Lie algebras by isomorphism type where the crate needs it:
/// Abelian of any dimension, the Heisenberg algebra, and the two
/// three-dimensional simple algebras recognised through their Killing form.
pub fn isomorphism_class(lie: &LieAlgebra, tol: f64) -> Option<String> {
    let n = lie.dim();
    let commutator = lie.commutator_ideal();
    if commutator.dim() == 0 {
        return Some(if n == 0 {
            "0".to_string()
        } else {
            format!("R^{n}")
        });
    }
    if n == 3 {
        if lie.is_nilpotent() && commutator.dim() == 1 {
            return Some("h_3".to_string());
        }
        if !lie.is_solvable() {
            // Killing form distinguishes so(3) (negative definite) from so(2,1).
            let mut killing = DMatrix::zeros(3, 3);
            for i in 0..3 {
                for j in 0..3 {
                    killing[(i, j)] = (lie.ad_basis(i) * lie.ad_basis(j)).trace();
                }
            }
            let (eigenvalues, _) = symmetric_eigen(&killing);
            let neg = eigenvalues.iter().filter(|&&l| l < -tol).count();
            let pos = eigenvalues.iter().filter(|&&l| l > tol).count();
            if neg == 3 {
                return Some("so(3)".to_string());
            }
            if pos == 2 && neg == 1 {
                return Some("so(2,1)".to_string());
            }
        }
        if lie.is_solvable()
            && !lie.is_nilpotent()
            && commutator.dim() == 2
            && lie.is_unimodular(tol)
        {
            // Unimodular solvable non-nilpotent in dimension three: a vector
            // outside the commutator ideal acts on it with trace zero, and the
            // determinant sign separates the rotation case e(2) from the boost
            // case e(1,1). The sign is invariant under rescaling and under
            // changing the complement vector.
            let x = (0..3)
                .map(|i| basis_vector(3, i))
                .find(|v| !commutator.contains(v, tol))?;
            let mut action = DMatrix::zeros(2, 2);
            for q in 0..2 {
                let image = lie.bracket(&x, &commutator.basis_vector(q));
                action.set_column(q, &commutator.coordinates(&image));
            }
            let det = action[(0, 0)] * action[(1, 1)] - action[(0, 1)] * action[(1, 0)];
            if det > tol {
                return Some("e(2)".to_string());
            }
            if det < -tol {
                return Some("e(1,1)".to_string());
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn heisenberg3() -> LieAlgebra {
        // d e^1 = e^{23} in differential shorthand, so [e_2, e_3] = -e_1.
        LieAlgebra::new(3, &[(2, 3, 1, -1.0)]).unwrap()
    }

    #[test]
    fn bracket_antisymmetry_is_imposed() {
        let lie = LieAlgebra::new(4, &[(1, 2, 3, 2.0)]).unwrap();
        assert_eq!(lie.structure_constant(0, 1, 2), 2.0);
        assert_eq!(lie.structure_constant(1, 0, 2), -2.0);
    }

    #[test]
    fn conflicting_entries_are_rejected() {
        let err = LieAlgebra::new(3, &[(1, 2, 3, 1.0), (2, 1, 3, 1.0)]).unwrap_err();
        assert!(matches!(err, Error::ConflictingEntry { .. }));
        // A mirrored entry with the antisymmetric value is consistent.
        assert!(LieAlgebra::new(3, &[(1, 2, 3, 1.0), (2, 1, 3, -1.0)]).is_ok());
    }

    #[test]
    fn heisenberg_differential_recovers_shorthand() {
        let lie = heisenberg3();
        let e1 = KForm::basis_one_form(3, 0);
        let d = e1.ce_differential(&lie).unwrap();
        // d e^1 = e^{23}: coefficient +1 on (e_2, e_3).
        assert_eq!(d.get(&[1, 2]), 1.0);
        assert_eq!(d.get(&[2, 1]), -1.0);
        assert_eq!(d.get(&[0, 1]), 0.0);
    }

    #[test]
    fn jacobi_residual_detects_broken_constants() {
        let lie = heisenberg3();
        assert_eq!(lie.jacobi_residual(), 0.0);
        // [e1,[e2,e3]] + cyclic = -2 e1 for these constants.
        let broken =
            LieAlgebra::new(3, &[(1, 2, 2, 1.0), (1, 3, 3, 1.0), (2, 3, 1, 1.0)]).unwrap();
        assert!((broken.jacobi_residual() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn d_squared_vanishes_on_a_lie_algebra() {
        let lie = LieAlgebra::new(
            4,
            &[(1, 2, 3, 1.5), (1, 3, 4, -0.5), (2, 3, 4, 2.0)],
        )
        .unwrap();
        assert!(lie.jacobi_residual() < 1e-12);
        for i in 0..4 {
            let omega = KForm::basis_one_form(4, i);
            let dd = omega
                .ce_differential(&lie)
                .unwrap()
                .ce_differential(&lie)
                .unwrap();
            assert!(dd.sup_norm() < 1e-12, "d^2 e^{} = {:?}", i + 1, dd);
        }
    }

    #[test]
    fn structure_analysis_of_heisenberg() {
        let lie = heisenberg3();
        let s = lie.structure_analysis(1e-12);
        assert_eq!(s.commutator_dim, 1);
        assert_eq!(s.center_dim, 1);
        assert!(s.solvable && s.nilpotent && s.unimodular);
        assert!(lie.commutator_ideal().contains(&basis_vector(3, 0), 1e-12));
    }

    #[test]
    fn wedge_matches_hand_values() {
        let e1 = KForm::basis_one_form(4, 0);
        let e2 = KForm::basis_one_form(4, 1);
        let e3 = KForm::basis_one_form(4, 2);
        let e12 = e1.wedge(&e2).unwrap();
        assert_eq!(e12.get(&[0, 1]), 1.0);
        assert_eq!(e12.get(&[1, 0]), -1.0);
        let e123 = e12.wedge(&e3).unwrap();
        assert_eq!(e123.get(&[0, 1, 2]), 1.0);
        assert_eq!(e123.get(&[2, 1, 0]), -1.0);
        // Graded commutativity for one-forms.
        let e21 = e2.wedge(&e1).unwrap();
        assert_eq!(e21.get(&[0, 1]), -1.0);
    }

    #[test]
    fn contraction_evaluates_first_slot() {
        let h = three_form(4, &[(1, 2, 3, 2.0)]).unwrap();
        let x = basis_vector(4, 0);
        let b = h.contract(&x);
        assert_eq!(b.get(&[1, 2]), 2.0);
        let y = basis_vector(4, 1);
        assert_eq!(h.apply(&[&x, &y, &basis_vector(4, 2)]), 2.0);
        assert_eq!(h.apply(&[&y, &x, &basis_vector(4, 2)]), -2.0);
    }

    #[test]
    fn kernel_and_span_agree_on_rank() {
        let m = DMatrix::from_row_slice(2, 4, &[1.0, 0.0, 1.0, 0.0, 0.0, 1.0, 0.0, 1.0]);
        let k = Subspace::kernel(&m);
        assert_eq!(k.dim(), 2);
        for j in 0..k.dim() {
            assert!((m.clone() * k.basis_vector(j)).amax() < 1e-12);
        }
    }

    #[test]
    fn restrict_to_subalgebra() {
        // so(3) inside so(3) + R.
        let lie = LieAlgebra::new(
            4,
            &[(1, 2, 3, 1.0), (2, 3, 1, 1.0), (3, 1, 2, 1.0)],
        )
        .unwrap();
        let sub = Subspace::span(
            4,
            &[basis_vector(4, 0), basis_vector(4, 1), basis_vector(4, 2)],
        );
        let restricted = lie.restrict(&sub, 1e-12).unwrap();
        assert_eq!(restricted.dim(), 3);
        assert!(!restricted.is_solvable());
        assert_eq!(isomorphism_class(&restricted, 1e-9).as_deref(), Some("so(3)"));
    }

    #[test]
    fn labels_unimodular_solvable_3d() {
        // Rotation action: [e_3, e_1] = a e_2, [e_3, e_2] = -a e_1.
        let euclid = LieAlgebra::new(3, &[(3, 1, 2, 2.5), (3, 2, 1, -2.5)]).unwrap();
        assert_eq!(isomorphism_class(&euclid, 1e-9).as_deref(), Some("e(2)"));
        // Boost action: [e_3, e_1] = e_1, [e_3, e_2] = -e_2.
        let poincare = LieAlgebra::new(3, &[(3, 1, 1, 1.0), (3, 2, 2, -1.0)]).unwrap();
        assert_eq!(isomorphism_class(&poincare, 1e-9).as_deref(), Some("e(1,1)"));
        // Shear off-diagonal presentation of e(1,1).
        let shear = LieAlgebra::new(3, &[(3, 1, 2, 1.0), (3, 2, 1, 1.0)]).unwrap();
        assert_eq!(isomorphism_class(&shear, 1e-9).as_deref(), Some("e(1,1)"));
        // Non-unimodular solvable algebras stay unlabeled.
        let aff = LieAlgebra::new(3, &[(3, 1, 1, 1.0), (3, 2, 2, 1.0)]).unwrap();
        assert_eq!(isomorphism_class(&aff, 1e-9), None);
    }

    #[test]
    fn jacobi_eigensolver_recomposes_exactly() {
        // Dense symmetric matrices with clustered eigenvalues; the solver
        // must return consistent eigenpairs, V orthogonal, m = V diag V^T.
        let samples = [
            DMatrix::from_row_slice(3, 3, &[
                -0.8786878213819551, 0.04235723436597867, 0.1424073695554089,
                0.04235723436597867, -0.8849845851574114, -0.15338525098917094,
                0.1424073695554089, -0.15338525098917094, -1.3550518367086037,
            ]),
            DMatrix::from_row_slice(4, 4, &[
                2.0, 1.0, 0.0, -1.0,
                1.0, 2.0, 1.0, 0.0,
                0.0, 1.0, 2.0, 1.0,
                -1.0, 0.0, 1.0, 2.0,
            ]),
            DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]),
            DMatrix::zeros(3, 3),
        ];
        for m in samples {
            let n = m.nrows();
            let (values, vectors) = symmetric_eigen(&m);
            let recomposed =
                &vectors * DMatrix::from_diagonal(&values) * vectors.transpose();
            let scale = 1.0 + m.amax();
            assert!((recomposed - &m).amax() / scale < 1e-13);
            let orth = vectors.transpose() * &vectors - DMatrix::identity(n, n);
            assert!(orth.amax() < 1e-13);
        }
    }
}
