//! Canonical forms of symmetric and skew-symmetric endomorphisms of
//! Lorentzian vector spaces.
//!
//! Every g-symmetric endomorphism of a Lorentzian space can be written, in a
//! suitable pseudo-orthonormal basis listing the negative direction first, as
//! exactly one of four block shapes: a real diagonal, `diag(L1(a,b), ...)`
//! carrying a non-real eigenvalue pair, `diag(L2(c,eps), ...)` carrying a
//! real Jordan block of size two, or `diag(L3(t), ...)` carrying a real
//! Jordan block of size three. Skew-symmetric endomorphisms reduce likewise
//! to an `M3` or `M4` block padded by rotation blocks `L1(0,a)` and zeros.
//! [`classify_symmetric`] decides the type numerically, [`trfs2_gap`]
//! evaluates `tr(f^2)` in the canonical parameters, and
//! [`verify_normal_form`] checks a claimed form against an explicit frame.

use std::fmt;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::metric::{OrthonormalFrame, ScalarProduct};

/// Default tolerance for [`classify_symmetric`].
pub const DEFAULT_CLASSIFY_TOL: f64 = 1e-6;

/// Relative floor for trusting computed spectral separations. Eigenvalues
/// closer than this are merged into one cluster, and imaginary parts below
/// it are treated as rounding artifacts: a real Jordan block of size k
/// splits in floating point into a ring of radius about eps^(1/k), which is
/// near 6e-6 for k = 3 and grows with conditioning, and the ring members are
/// exact (often non-real) eigenvalues of a nearby matrix, so no residual
/// test can unmask them. 1e-4 absorbs the k = 3 case with a margin.
const SPECTRAL_FLOOR: f64 = 1e-4;

/// Frames handed to [`verify_normal_form`] must be orthonormal to this
/// relative precision.
const FRAME_TOL: f64 = 1e-8;

/// The four mutually exclusive shapes of a symmetric endomorphism of a
/// Lorentzian vector space.
///
/// First: diagonalisable over the reals. Second: a non-real eigenvalue pair.
/// Third: a real Jordan block of size two. Fourth: a real Jordan block of
/// size three. No larger block can occur.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CanonicalType {
    First,
    Second,
    Third,
    Fourth,
}

impl fmt::Display for CanonicalType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            CanonicalType::First => "first",
            CanonicalType::Second => "second",
            CanonicalType::Third => "third",
            CanonicalType::Fourth => "fourth",
        };
        write!(f, "{name}")
    }
}

/// Names of the five basic blocks, for the dispatching constructor [`block`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlockName {
    L1,
    L2,
    L3,
    M3,
    M4,
}

/// `[[alpha, -beta], [beta, alpha]]`, the rotation-scaling block with
/// eigenvalues `alpha +- i beta`. Symmetric for `diag(-1, 1)`; with
/// `alpha = 0` it is also skew for the Euclidean product.
pub fn l1(alpha: f64, beta: f64) -> DMatrix<f64> {
    DMatrix::from_row_slice(2, 2, &[alpha, -beta, beta, alpha])
}

/// `epsilon [[1/2 + alpha, 1/2], [-1/2, -1/2 + alpha]]`: a single real
/// eigenvalue `epsilon alpha` with one Jordan block of size two. Symmetric
/// for `diag(-1, 1)`. Requires `epsilon` in `{-1, 1}`.
pub fn l2(alpha: f64, epsilon: f64) -> Result<DMatrix<f64>> {
    if epsilon != 1.0 && epsilon != -1.0 {
        return Err(Error::BadParameter {
            name: "epsilon".into(),
            reason: format!("must be -1 or 1, got {epsilon}"),
        });
    }
    Ok(epsilon * DMatrix::from_row_slice(2, 2, &[0.5 + alpha, 0.5, -0.5, -0.5 + alpha]))
}

/// `alpha I + K` with the tridiagonal `K` built from `1/sqrt(2)` entries,
/// satisfying `K^2 != 0`, `K^3 = 0`: one real Jordan block of size three for
/// the eigenvalue `alpha`. Symmetric for `diag(-1, 1, 1)`.
pub fn l3(alpha: f64) -> DMatrix<f64> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    DMatrix::from_row_slice(3, 3, &[alpha, -s, 0.0, s, alpha, s, 0.0, s, alpha])
}

/// The size-three skew block for `diag(-1, 1, 1)`.
pub fn m3(sigma: f64) -> DMatrix<f64> {
    DMatrix::from_row_slice(
        3,
        3,
        &[
            0.0,
            0.0,
            -1.0 + sigma,
            0.0,
            0.0,
            -1.0 - sigma,
            -1.0 + sigma,
            1.0 + sigma,
            0.0,
        ],
    )
}

/// The size-four skew block for `diag(-1, 1, 1, 1)`.
pub fn m4(sigma: f64, tau: f64) -> DMatrix<f64> {
    DMatrix::from_row_slice(
        4,
        4,
        &[
            0.0,
            0.0,
            -1.0 + sigma,
            tau,
            0.0,
            0.0,
            -1.0 - sigma,
            tau,
            -1.0 + sigma,
            1.0 + sigma,
            0.0,
            0.0,
            tau,
            -tau,
            0.0,
            0.0,
        ],
    )
}

/// Builds a named block from a parameter slice, checking arity.
/// `L1` takes `(alpha, beta)`, `L2` takes `(alpha, epsilon)`, `L3` takes
/// `(alpha)`, `M3` takes `(sigma)`, `M4` takes `(sigma, tau)`.
pub fn block(name: BlockName, params: &[f64]) -> Result<DMatrix<f64>> {
    let arity = match name {
        BlockName::L1 | BlockName::L2 | BlockName::M4 => 2,
        BlockName::L3 | BlockName::M3 => 1,
    };
    if params.len() != arity {
        return Err(Error::BadParameter {
            name: format!("{name:?}"),
            reason: format!("takes {arity} parameter(s), got {}", params.len()),
        });
    }
    Ok(match name {
        BlockName::L1 => l1(params[0], params[1]),
        BlockName::L2 => l2(params[0], params[1])?,
        BlockName::L3 => l3(params[0]),
        BlockName::M3 => m3(params[0]),
        BlockName::M4 => m4(params[0], params[1]),
    })
}

/// `diag(head, tail_1, ..., tail_m)`.
fn pad_with_diagonal(head: DMatrix<f64>, tail: &[f64]) -> DMatrix<f64> {
    let k = head.nrows();
    let n = k + tail.len();
    let mut m = DMatrix::zeros(n, n);
    m.view_mut((0, 0), (k, k)).copy_from(&head);
    for (i, &d) in tail.iter().enumerate() {
        m[(k + i, k + i)] = d;
    }
    m
}

fn need_params(kind: CanonicalType, params: &[f64], min: usize, shape: &str) -> Result<()> {
    if params.len() < min {
        return Err(Error::BadParameter {
            name: "params".into(),
            reason: format!("{kind} type takes {shape}, got {} value(s)", params.len()),
        });
    }
    Ok(())
}

/// The canonical symmetric matrix of the given type, in the negatives-first
/// pseudo-orthonormal coordinates.
///
/// Parameter layout: First takes the diagonal `(a_1, ..., a_n)`; Second takes
/// `(alpha, beta, b_1, ..., b_{n-2})` for `diag(L1(alpha, beta), b...)`;
/// Third takes `(gamma, c_1, ..., c_{n-2})` for `diag(L2(gamma, 1), c...)`
/// (the `epsilon = -1` branch has the same trace data; build it from [`l2`]
/// directly when needed); Fourth takes `(tau, d_1, ..., d_{n-3})` for
/// `diag(L3(tau), d...)`.
pub fn canonical_symmetric(kind: CanonicalType, params: &[f64]) -> Result<DMatrix<f64>> {
    match kind {
        CanonicalType::First => {
            need_params(kind, params, 1, "diagonal entries a_1..a_n")?;
            Ok(DMatrix::from_diagonal(&DVector::from_row_slice(params)))
        }
        CanonicalType::Second => {
            need_params(kind, params, 2, "(alpha, beta, b_1..b_{n-2})")?;
            Ok(pad_with_diagonal(l1(params[0], params[1]), &params[2..]))
        }
        CanonicalType::Third => {
            need_params(kind, params, 1, "(gamma, c_1..c_{n-2})")?;
            Ok(pad_with_diagonal(l2(params[0], 1.0)?, &params[1..]))
        }
        CanonicalType::Fourth => {
            need_params(kind, params, 1, "(tau, d_1..d_{n-3})")?;
            Ok(pad_with_diagonal(l3(params[0]), &params[1..]))
        }
    }
}

/// `tr(f^2)` of the canonical matrix, in closed form.
///
/// First: `sum a_i^2`. Second: `2 (alpha^2 - beta^2) + sum b_i^2`, the only
/// type where the trace can be negative; it vanishes exactly on
/// `beta = sqrt(alpha^2 + sum b_i^2 / 2)`. Third: `2 gamma^2 + sum c_i^2`.
/// Fourth: `3 tau^2 + sum d_i^2`. For the three non-negative types the trace
/// vanishes only when every listed parameter is zero.
pub fn trfs2_gap(kind: CanonicalType, params: &[f64]) -> Result<f64> {
    let square_sum = |xs: &[f64]| xs.iter().map(|x| x * x).sum::<f64>();
    match kind {
        CanonicalType::First => {
            need_params(kind, params, 1, "diagonal entries a_1..a_n")?;
            Ok(square_sum(params))
        }
        CanonicalType::Second => {
            need_params(kind, params, 2, "(alpha, beta, b_1..b_{n-2})")?;
            let (alpha, beta) = (params[0], params[1]);
            Ok(2.0 * (alpha * alpha - beta * beta) + square_sum(&params[2..]))
        }
        CanonicalType::Third => {
            need_params(kind, params, 1, "(gamma, c_1..c_{n-2})")?;
            Ok(2.0 * params[0] * params[0] + square_sum(&params[1..]))
        }
        CanonicalType::Fourth => {
            need_params(kind, params, 1, "(tau, d_1..d_{n-3})")?;
            Ok(3.0 * params[0] * params[0] + square_sum(&params[1..]))
        }
    }
}

/// Number of singular values above `tol * (1 + sigma_max)`.
fn rank_rel(m: &DMatrix<f64>, tol: f64) -> usize {
    let sv = m.clone().svd(false, false).singular_values;
    let smax = sv.max();
    if !smax.is_finite() || smax <= 0.0 {
        return 0;
    }
    let threshold = tol * (1.0 + smax);
    sv.iter().filter(|s| **s > threshold).count()
}

/// Size of the largest Jordan block of `f` at the real eigenvalue `lambda`,
/// cross-checked against the cluster multiplicity.
fn jordan_block_size(
    f: &DMatrix<f64>,
    lambda: f64,
    multiplicity: usize,
    tol: f64,
) -> Result<usize> {
    let n = f.nrows();
    let base = f - lambda * DMatrix::identity(n, n);
    let cap = multiplicity.min(3);
    // ranks[k] = rank((f - lambda)^k); the sequence strictly decreases until
    // k hits the largest block size and is constant afterwards.
    let mut ranks = vec![n];
    let mut power = base.clone();
    for _ in 1..=(cap + 1) {
        ranks.push(rank_rel(&power, tol));
        power = &power * &base;
    }
    let size = (0..=cap).find(|&k| ranks[k] == ranks[k + 1]);
    let Some(size) = size else {
        return Err(Error::IllConditioned {
            detail: format!(
                "rank sequence at eigenvalue {lambda:.6} does not stabilise \
                 within the cluster multiplicity {multiplicity}"
            ),
        });
    };
    if size == 0 {
        return Err(Error::IllConditioned {
            detail: format!(
                "no kernel defect at the eigenvalue cluster near {lambda:.6}; \
                 eigenvalue separations fall below the working tolerance"
            ),
        });
    }
    if n - ranks[size] != multiplicity {
        return Err(Error::IllConditioned {
            detail: format!(
                "eigenvalue cluster near {lambda:.6} has rank defect {} but \
                 multiplicity {multiplicity}",
                n - ranks[size]
            ),
        });
    }
    Ok(size)
}

/// Decides which of the four canonical shapes a g-symmetric endomorphism of
/// a Lorentzian space has.
///
/// The decision is eigenvalue-based: a trusted non-real pair gives Second,
/// otherwise the largest real Jordan block (1, 2 or 3, read off rank
/// sequences of `(f - lambda)^k` at each eigenvalue cluster) gives First,
/// Third or Fourth. Imaginary parts are trusted only above a relative floor
/// of about 1e-4: an exact real Jordan block splits in floating point into a
/// near-conjugate ring whose members are exact eigenvalues of a matrix a
/// rounding error away, so smaller imaginary parts carry no information and
/// are folded back into the real clusters.
///
/// Intended for exactly constructed inputs whose eigenvalue separations are
/// well above that floor; ambiguous rank patterns are reported as
/// [`Error::IllConditioned`] rather than guessed.
pub fn classify_symmetric(
    g: &ScalarProduct,
    f: &DMatrix<f64>,
    tol: f64,
) -> Result<CanonicalType> {
    let n = g.dim();
    if f.nrows() != n || f.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: f.nrows().max(f.ncols()),
        });
    }
    if !g.is_lorentzian() {
        let (pos, neg) = g.signature();
        return Err(Error::WrongSignature {
            pos,
            neg,
            expected: "Lorentzian (exactly one positive or one negative direction)".into(),
        });
    }
    let scale = 1.0 + f.amax();
    let sym_residual = g.self_adjoint_residual(f);
    if sym_residual > tol * scale {
        return Err(Error::NotSelfAdjoint {
            residual: sym_residual,
        });
    }

    let eigenvalues = f.complex_eigenvalues();
    let spectral_tol = scale * tol.max(SPECTRAL_FLOOR);
    let mut real_pool: Vec<f64> = Vec::with_capacity(n);
    for ev in eigenvalues.iter() {
        if ev.im > spectral_tol {
            return Ok(CanonicalType::Second);
        } else if ev.im >= -spectral_tol {
            // Ring artifacts from defective real blocks re-enter here with
            // both pair members, keeping cluster multiplicities intact.
            real_pool.push(ev.re);
        }
        // Entries with im < -spectral_tol are conjugates of pairs that
        // already returned above.
    }

    real_pool.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
    let cluster_tol = spectral_tol;
    let mut max_block = 0usize;
    let mut start = 0;
    while start < real_pool.len() {
        let mut end = start + 1;
        while end < real_pool.len() && real_pool[end] - real_pool[end - 1] <= cluster_tol {
            end += 1;
        }
        let cluster = &real_pool[start..end];
        let center = cluster.iter().sum::<f64>() / cluster.len() as f64;
        let size = jordan_block_size(f, center, cluster.len(), tol)?;
        max_block = max_block.max(size);
        start = end;
    }
    match max_block {
        1 => Ok(CanonicalType::First),
        2 => Ok(CanonicalType::Third),
        3 => Ok(CanonicalType::Fourth),
        other => Err(Error::IllConditioned {
            detail: format!(
                "largest real Jordan block has size {other}, outside the \
                 Lorentzian range 1..=3"
            ),
        }),
    }
}

/// Sup-norm distance between `f` expressed in the given orthonormal frame
/// and the claimed matrix: `|frame^-1 f frame - claimed|_max`. Zero exactly
/// when `f` has the claimed form in that frame.
pub fn verify_normal_form(
    g: &ScalarProduct,
    f: &DMatrix<f64>,
    claimed: &DMatrix<f64>,
    frame: &OrthonormalFrame,
) -> Result<f64> {
    let n = g.dim();
    for m in [f, claimed, &frame.vectors] {
        if m.nrows() != n || m.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: m.nrows().max(m.ncols()),
            });
        }
    }
    let frame_residual = frame.residual(g);
    if frame_residual > FRAME_TOL * (1.0 + g.matrix().amax()) {
        return Err(Error::BadParameter {
            name: "frame".into(),
            reason: format!("not orthonormal for g, residual {frame_residual:.3e}"),
        });
    }
    let in_frame = frame
        .vectors
        .clone()
        .lu()
        .solve(&(f * &frame.vectors))
        .ok_or_else(|| Error::BadParameter {
            name: "frame".into(),
            reason: "frame matrix is singular".into(),
        })?;
    Ok((in_frame - claimed).amax())
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, DVector};

    fn lorentz(n: usize) -> ScalarProduct {
        ScalarProduct::lorentzian_neg_first(n)
    }

    #[test]
    fn blocks_match_their_displayed_entries() {
        assert_eq!(
            l1(0.0, 1.0),
            DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0])
        );
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let k = l3(0.0);
        assert_eq!(k[(0, 1)], -s);
        assert_eq!(k[(1, 0)], s);
        assert_eq!(k[(1, 2)], s);
        assert_eq!(k[(2, 1)], s);
        assert_eq!(k[(0, 0)], 0.0);
        assert_eq!(k[(0, 2)], 0.0);
        assert_eq!(k[(2, 0)], 0.0);
        let cube = &k * &k * &k;
        assert!(cube.amax() < 1e-15);
        assert!((&k * &k).amax() > 0.4);
        assert_eq!(
            m3(1.0),
            DMatrix::from_row_slice(3, 3, &[0.0, 0.0, 0.0, 0.0, 0.0, -2.0, 0.0, 2.0, 0.0])
        );
        let m = m4(0.5, 2.0);
        assert_eq!(m[(0, 2)], -0.5);
        assert_eq!(m[(1, 2)], -1.5);
        assert_eq!(m[(2, 0)], -0.5);
        assert_eq!(m[(2, 1)], 1.5);
        assert_eq!(m[(0, 3)], 2.0);
        assert_eq!(m[(3, 0)], 2.0);
        assert_eq!(m[(3, 1)], -2.0);
        let j = l2(0.3, -1.0).unwrap();
        assert_eq!(
            j,
            DMatrix::from_row_slice(2, 2, &[-0.8, -0.5, 0.5, 0.2])
        );
        assert_eq!(block(BlockName::L1, &[0.0, 1.0]).unwrap(), l1(0.0, 1.0));
        assert!(matches!(
            block(BlockName::L3, &[1.0, 2.0]),
            Err(Error::BadParameter { .. })
        ));
        assert!(matches!(l2(0.0, 0.5), Err(Error::BadParameter { .. })));
    }

    #[test]
    fn symmetric_and_skew_blocks_respect_the_lorentzian_product() {
        let g2 = lorentz(2);
        assert!(g2.self_adjoint_residual(&l1(0.7, 1.3)) < 1e-15);
        assert!(g2.self_adjoint_residual(&l2(0.4, -1.0).unwrap()) < 1e-15);
        let g3 = lorentz(3);
        assert!(g3.self_adjoint_residual(&l3(0.9)) < 1e-15);
        // M3, M4 and the L1(0, a) rotations are skew: f* = -f.
        let f3 = m3(0.8);
        assert!((g3.adjoint(&f3) + &f3).amax() < 1e-15);
        let g4 = lorentz(4);
        let f4 = m4(0.5, 1.7);
        assert!((g4.adjoint(&f4) + &f4).amax() < 1e-15);
        let g5 = lorentz(5);
        let mut f5 = pad_with_diagonal(m3(0.8), &[0.0, 0.0]);
        f5.view_mut((3, 3), (2, 2)).copy_from(&l1(0.0, 2.1));
        assert!((g5.adjoint(&f5) + &f5).amax() < 1e-15);
    }

    #[test]
    fn classification_recognises_all_four_types() {
        let g3 = lorentz(3);
        let tol = DEFAULT_CLASSIFY_TOL;
        let first = DMatrix::from_diagonal(&DVector::from_row_slice(&[0.3, -1.2, 2.0]));
        assert_eq!(
            classify_symmetric(&g3, &first, tol).unwrap(),
            CanonicalType::First
        );
        let second = canonical_symmetric(CanonicalType::Second, &[0.0, 1.0, 0.0]).unwrap();
        assert_eq!(
            classify_symmetric(&g3, &second, tol).unwrap(),
            CanonicalType::Second
        );
        let third = canonical_symmetric(CanonicalType::Third, &[0.0, 0.0]).unwrap();
        assert_eq!(
            classify_symmetric(&g3, &third, tol).unwrap(),
            CanonicalType::Third
        );
        let third_neg = pad_with_diagonal(l2(0.4, -1.0).unwrap(), &[1.9]);
        assert_eq!(
            classify_symmetric(&g3, &third_neg, tol).unwrap(),
            CanonicalType::Third
        );
        assert_eq!(
            classify_symmetric(&g3, &l3(0.0), tol).unwrap(),
            CanonicalType::Fourth
        );
        let g5 = lorentz(5);
        let fourth = canonical_symmetric(CanonicalType::Fourth, &[0.7, 1.0, -2.0]).unwrap();
        assert_eq!(
            classify_symmetric(&g5, &fourth, tol).unwrap(),
            CanonicalType::Fourth
        );
        // A tail entry colliding with the defective eigenvalue merges into
        // one cluster of multiplicity three; the block size must still be 2.
        let collision = canonical_symmetric(CanonicalType::Third, &[0.5, 0.5]).unwrap();
        assert_eq!(
            classify_symmetric(&g3, &collision, tol).unwrap(),
            CanonicalType::Third
        );
    }

    #[test]
    fn classification_is_stable_under_an_exact_isometry() {
        // A boost preserves diag(-1, 1, 1), so conjugation preserves both
        // g-symmetry and the type.
        let g3 = lorentz(3);
        let t: f64 = 0.5;
        let boost = DMatrix::from_row_slice(
            3,
            3,
            &[
                t.cosh(),
                t.sinh(),
                0.0,
                t.sinh(),
                t.cosh(),
                0.0,
                0.0,
                0.0,
                1.0,
            ],
        );
        let unboost = DMatrix::from_row_slice(
            3,
            3,
            &[
                t.cosh(),
                -t.sinh(),
                0.0,
                -t.sinh(),
                t.cosh(),
                0.0,
                0.0,
                0.0,
                1.0,
            ],
        );
        for (f, expected) in [
            (
                canonical_symmetric(CanonicalType::Second, &[0.2, 0.7, 1.0]).unwrap(),
                CanonicalType::Second,
            ),
            (
                canonical_symmetric(CanonicalType::Third, &[0.4, -0.9]).unwrap(),
                CanonicalType::Third,
            ),
            (l3(0.4), CanonicalType::Fourth),
            (
                DMatrix::from_diagonal(&DVector::from_row_slice(&[1.0, 2.0, 3.0])),
                CanonicalType::First,
            ),
        ] {
            let conjugated = &boost * f * &unboost;
            assert!(g3.self_adjoint_residual(&conjugated) < 1e-12);
            assert_eq!(
                classify_symmetric(&g3, &conjugated, DEFAULT_CLASSIFY_TOL).unwrap(),
                expected
            );
        }
    }

    #[test]
    fn classification_rejects_bad_inputs() {
        let g3 = lorentz(3);
        assert!(matches!(
            classify_symmetric(&g3, &m3(0.3), DEFAULT_CLASSIFY_TOL),
            Err(Error::NotSelfAdjoint { .. })
        ));
        let euclidean = ScalarProduct::euclidean(3);
        assert!(matches!(
            classify_symmetric(&euclidean, &DMatrix::identity(3, 3), DEFAULT_CLASSIFY_TOL),
            Err(Error::WrongSignature { .. })
        ));
        assert!(matches!(
            classify_symmetric(&g3, &DMatrix::identity(4, 4), DEFAULT_CLASSIFY_TOL),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn gap_formula_examples_and_direct_traces() {
        assert_eq!(trfs2_gap(CanonicalType::First, &[0.0, 0.0, 0.0]).unwrap(), 0.0);
        assert!(trfs2_gap(CanonicalType::First, &[1.0]).unwrap() > 0.0);
        let vanishing = trfs2_gap(CanonicalType::Second, &[1.0, 3f64.sqrt(), 2.0]).unwrap();
        assert!(vanishing.abs() < 1e-12);
        assert_eq!(trfs2_gap(CanonicalType::Third, &[0.0, 0.0]).unwrap(), 0.0);
        assert_eq!(trfs2_gap(CanonicalType::Fourth, &[0.0, 0.0]).unwrap(), 0.0);
        let cases: [(CanonicalType, &[f64]); 4] = [
            (CanonicalType::First, &[0.4, -1.1, 2.2]),
            (CanonicalType::Second, &[0.8, 1.4, -0.6, 2.0]),
            (CanonicalType::Third, &[0.9, 1.3, -0.2]),
            (CanonicalType::Fourth, &[0.7, -1.5]),
        ];
        for (kind, params) in cases {
            let f = canonical_symmetric(kind, params).unwrap();
            let direct = (&f * &f).trace();
            let gap = trfs2_gap(kind, params).unwrap();
            assert!((direct - gap).abs() < 1e-12, "{kind} type gap mismatch");
        }
        // The epsilon = -1 branch of the third type has the same trace data.
        let f = pad_with_diagonal(l2(0.9, -1.0).unwrap(), &[1.3, -0.2]);
        let gap = trfs2_gap(CanonicalType::Third, &[0.9, 1.3, -0.2]).unwrap();
        assert!(((&f * &f).trace() - gap).abs() < 1e-12);
        assert!(matches!(
            trfs2_gap(CanonicalType::Second, &[1.0]),
            Err(Error::BadParameter { .. })
        ));
    }

    #[test]
    fn verify_normal_form_measures_the_frame_mismatch() {
        let g2 = ScalarProduct::euclidean(2);
        let claimed = l1(0.0, 1.4);
        let identity_frame = g2.orthonormal_frame();
        assert!(verify_normal_form(&g2, &claimed, &claimed, &identity_frame).unwrap() < 1e-14);
        // A rotated skew endomorphism recovers its block in the rotated frame.
        let theta: f64 = 0.7;
        let rot = DMatrix::from_row_slice(
            2,
            2,
            &[theta.cos(), -theta.sin(), theta.sin(), theta.cos()],
        );
        let f = &rot * l1(0.0, 1.4) * rot.transpose();
        let frame = OrthonormalFrame {
            vectors: rot.clone(),
            signs: vec![1.0, 1.0],
        };
        assert!(verify_normal_form(&g2, &f, &claimed, &frame).unwrap() < 1e-12);
        let wrong = l1(0.0, 1.9);
        let residual = verify_normal_form(&g2, &f, &wrong, &frame).unwrap();
        assert!((residual - 0.5).abs() < 1e-12);
        let sheared = OrthonormalFrame {
            vectors: DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 1.0]),
            signs: vec![1.0, 1.0],
        };
        assert!(matches!(
            verify_normal_form(&g2, &f, &claimed, &sheared),
            Err(Error::BadParameter { .. })
        ));
    }
}
