//! Parameter scans, seeded random falsification, and a numerical Jordan
//! oracle.
//!
//! The scanners support the negative side of the classification: where no
//! generalised Einstein structure exists, seeded random sampling of metrics
//! and closed three-forms establishes empirical residual floors that are
//! frozen into regression tests. Nothing here proves non-existence; the
//! floors record what a fixed sampled population showed. The Jordan oracle
//! estimates eigenstructure from rank sequences and serves as an independent
//! cross-check of the canonical-form classifier.

use std::collections::BTreeMap;

use nalgebra::{Complex, DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::catalog::{family, instantiate_family, ParamMap};
use crate::einstein::{einstein_residuals, Divergence, GEProblem};
use crate::error::{Error, Result};
use crate::lie::{KForm, LieAlgebra, Subspace};
use crate::metric::ScalarProduct;

/// Grid of parameter values, scanned in lexicographic order: keys in sorted
/// order, the last key varying fastest, values in their listed order.
pub type Grid = BTreeMap<String, Vec<f64>>;

/// One evaluated grid point: either a residual or the error that stopped
/// this point (the scan itself continues).
#[derive(Clone, Debug)]
pub struct ScanRow {
    pub params: ParamMap,
    pub residual: Option<f64>,
    pub error: Option<String>,
}

/// Evaluates the total Einstein residual over the Cartesian product of the
/// grid. Domain violations are recorded per point and the scan continues;
/// only an unknown family or an empty value list fails the whole scan.
pub fn residual_scan(family_id: &str, grid: &Grid) -> Result<Vec<ScanRow>> {
    let spec = family(family_id)?;
    let keys: Vec<&String> = grid.keys().collect();
    for key in &keys {
        if grid[*key].is_empty() {
            return Err(Error::BadGrid {
                reason: format!("parameter {key} has no values"),
            });
        }
    }
    let mut rows = Vec::new();
    let mut idx = vec![0usize; keys.len()];
    loop {
        let params: ParamMap = keys
            .iter()
            .zip(&idx)
            .map(|(key, &i)| ((*key).clone(), grid[*key][i]))
            .collect();
        let row = match instantiate_family(spec.family_id, &params) {
            Ok(problem) => ScanRow {
                params,
                residual: Some(einstein_residuals(&problem).total),
                error: None,
            },
            Err(e) => ScanRow {
                params,
                residual: None,
                error: Some(e.to_string()),
            },
        };
        rows.push(row);
        // Odometer increment, last key fastest.
        let mut pos = keys.len();
        loop {
            if pos == 0 {
                return Ok(rows);
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < grid[keys[pos]].len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

/// Outcome of a seeded falsification run.
#[derive(Clone, Debug)]
pub struct Falsification {
    /// Smallest total residual over injected instances and random trials.
    pub min_residual: f64,
    /// The problem attaining the minimum.
    pub argmin: GEProblem,
    /// Index of the random trial attaining the minimum, or `None` when an
    /// injected instance did.
    pub argmin_trial: Option<usize>,
    /// Smallest residual over the random trials whose three-form was
    /// normalised to unit sup norm, when any such trial ran.
    pub min_residual_unit_h: Option<f64>,
    pub trials: usize,
}

/// Seeded random search for generalised Einstein structures on a fixed Lie
/// algebra: random bounded-condition metrics of the given signature, random
/// closed three-forms (every fourth trial uses H = 0, the others normalise
/// H to unit sup norm), divergence zero. Identical inputs give identical
/// outputs. When the commutator ideal is proper and nonzero, sampled metrics
/// are required to restrict non-degenerately to it.
pub fn random_falsification(
    algebra: &LieAlgebra,
    signature: (usize, usize),
    trials: usize,
    seed: u64,
) -> Result<Falsification> {
    falsify_with_injections(algebra, signature, trials, seed, &[])
}

/// [`random_falsification`] with known candidate problems evaluated ahead of
/// the random trials; used to check that explicit instances are found.
pub fn falsify_with_injections(
    algebra: &LieAlgebra,
    signature: (usize, usize),
    trials: usize,
    seed: u64,
    injections: &[GEProblem],
) -> Result<Falsification> {
    let n = algebra.dim();
    let (p, q) = signature;
    if p + q != n {
        return Err(Error::WrongSignature {
            pos: p,
            neg: q,
            expected: format!("p + q = {n}"),
        });
    }
    if trials == 0 {
        return Err(Error::BadParameter {
            name: "trials".to_string(),
            reason: "at least one trial is required".to_string(),
        });
    }

    let closed = closed_three_forms(algebra);
    let commutator = algebra.commutator_ideal();
    let enforce_commutator = commutator.dim() > 0 && commutator.dim() < n;

    let mut best: Option<(f64, GEProblem, Option<usize>)> = None;
    let mut best_unit_h: Option<f64> = None;
    let mut consider = |residual: f64, problem: &GEProblem, trial: Option<usize>| {
        if best.as_ref().map_or(true, |(r, _, _)| residual < *r) {
            best = Some((residual, problem.clone(), trial));
        }
    };

    for problem in injections {
        if problem.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: problem.dim(),
            });
        }
        let residual = einstein_residuals(problem).total;
        consider(residual, problem, None);
    }

    for trial in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(trial as u64 + 1);
        let metric = loop {
            let candidate = random_metric(&mut rng, n, p, q)?;
            if !enforce_commutator || restricts_nondegenerately(&candidate, &commutator) {
                break candidate;
            }
        };
        let h = if trial % 4 == 3 {
            KForm::zero(n, 3)?
        } else {
            let sample = random_closed_form(&mut rng, n, &closed)?;
            let norm = sample.sup_norm();
            if norm < 1e-9 {
                KForm::zero(n, 3)?
            } else {
                sample.scale(1.0 / norm)
            }
        };
        let unit_h = h.sup_norm() > 0.5;
        let problem = GEProblem::new(
            algebra.clone(),
            metric,
            h,
            Divergence::zero(n),
            crate::DEFAULT_TOL,
        )?;
        let residual = einstein_residuals(&problem).total;
        if unit_h && best_unit_h.map_or(true, |r| residual < r) {
            best_unit_h = Some(residual);
        }
        consider(residual, &problem, Some(trial));
    }

    let (min_residual, argmin, argmin_trial) = best.expect("at least one trial ran");
    Ok(Falsification {
        min_residual,
        argmin,
        argmin_trial,
        min_residual_unit_h: best_unit_h,
        trials,
    })
}

/// Basis of the closed three-forms: index map of the strictly increasing
/// triples plus the kernel of the differential as a subspace of coefficient
/// vectors.
struct ClosedForms {
    triples: Vec<[usize; 3]>,
    kernel: Subspace,
}

fn closed_three_forms(algebra: &LieAlgebra) -> ClosedForms {
    let n = algebra.dim();
    let mut triples = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            for k in (j + 1)..n {
                triples.push([i, j, k]);
            }
        }
    }
    let mut quads = Vec::new();
    for a in 0..n {
        for b in (a + 1)..n {
            for c in (b + 1)..n {
                for d in (c + 1)..n {
                    quads.push([a, b, c, d]);
                }
            }
        }
    }
    let mut matrix = DMatrix::zeros(quads.len(), triples.len());
    for (col, t) in triples.iter().enumerate() {
        let basis = KForm::from_terms(n, 3, &[(vec![t[0] + 1, t[1] + 1, t[2] + 1], 1.0)])
            .expect("strictly increasing triple");
        let d = basis.ce_differential(algebra).expect("degree in range");
        for (row, qd) in quads.iter().enumerate() {
            matrix[(row, col)] = d.get(qd);
        }
    }
    ClosedForms {
        triples,
        kernel: Subspace::kernel(&matrix),
    }
}

fn random_closed_form(rng: &mut ChaCha8Rng, n: usize, closed: &ClosedForms) -> Result<KForm> {
    let raw = DVector::from_fn(closed.triples.len(), |_, _| rng.gen_range(-1.0..1.0));
    let projected = closed.kernel.project(&raw);
    let mut terms = Vec::new();
    for (idx, t) in closed.triples.iter().enumerate() {
        if projected[idx] != 0.0 {
            terms.push((vec![t[0] + 1, t[1] + 1, t[2] + 1], projected[idx]));
        }
    }
    KForm::from_terms(n, 3, &terms)
}

/// Random scalar product of signature `(p, q)`: the standard diagonal form
/// conjugated by a random frame of bounded condition number.
fn random_metric(rng: &mut ChaCha8Rng, n: usize, p: usize, _q: usize) -> Result<ScalarProduct> {
    let raw = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
    let qr = raw.qr();
    let orth = qr.q();
    // Row scalings keep the condition number of the frame below e^1.2.
    let scales = DVector::from_fn(n, |_, _| f64::exp(rng.gen_range(-0.6..0.6)));
    let mut frame = orth;
    for i in 0..n {
        for j in 0..n {
            frame[(i, j)] *= scales[i];
        }
    }
    let mut diag = DVector::from_element(n, 1.0);
    for i in p..n {
        diag[i] = -1.0;
    }
    let gram = frame.transpose() * DMatrix::from_diagonal(&diag) * &frame;
    // Symmetrise away the rounding skew before validation.
    let sym = (&gram + gram.transpose()) * 0.5;
    ScalarProduct::new(sym)
}

/// Whether the scalar product restricts non-degenerately to the subspace,
/// with a fixed relative floor on the smallest singular value of the
/// restricted Gram matrix.
fn restricts_nondegenerately(metric: &ScalarProduct, sub: &Subspace) -> bool {
    let m = sub.dim();
    let mut gram = DMatrix::zeros(m, m);
    for a in 0..m {
        for b in 0..m {
            gram[(a, b)] = (sub.basis_vector(a).transpose()
                * metric.matrix()
                * sub.basis_vector(b))[(0, 0)];
        }
    }
    let sv = gram.svd(false, false).singular_values;
    sv.min() > 1e-3 * sv.max().max(1.0)
}

// ---------------------------------------------------------------------------
// Jordan oracle.
// ---------------------------------------------------------------------------

/// Eigenvalue clusters closer than this relative floor are merged; rank
/// decisions within a cluster use the same floor. Matches the spectral floor
/// of the canonical-form classifier.
const SPECTRAL_FLOOR: f64 = 1e-4;

/// One cluster of the estimated Jordan structure. Complex pairs are merged:
/// the representative has nonnegative imaginary part and its blocks count
/// once for the pair.
#[derive(Clone, Debug, PartialEq)]
pub struct JordanCluster {
    /// Eigenvalue as `(re, im)` with `im >= 0`.
    pub eigenvalue: (f64, f64),
    /// Block sizes in descending order.
    pub block_sizes: Vec<usize>,
}

/// Estimated Jordan structure, clusters sorted by eigenvalue.
#[derive(Clone, Debug, PartialEq)]
pub struct JordanStructure {
    pub clusters: Vec<JordanCluster>,
}

impl JordanStructure {
    /// Total dimension accounted for; complex clusters count twice.
    pub fn dimension(&self) -> usize {
        self.clusters
            .iter()
            .map(|c| {
                let total: usize = c.block_sizes.iter().sum();
                if c.eigenvalue.1 > 0.0 {
                    2 * total
                } else {
                    total
                }
            })
            .sum()
    }
}

/// Estimates the Jordan structure of a real square matrix: eigenvalues are
/// clustered at a relative spectral floor, and block sizes at each cluster
/// come from the rank sequence of powers of the shifted matrix. Ambiguous
/// rank decisions and overlapping clusters are reported as errors rather
/// than guessed.
pub fn jordan_oracle(f: &DMatrix<f64>, tol: f64) -> Result<JordanStructure> {
    if f.nrows() != f.ncols() {
        return Err(Error::DimensionMismatch {
            expected: f.nrows(),
            got: f.ncols(),
        });
    }
    let n = f.nrows();
    if n == 0 {
        return Ok(JordanStructure { clusters: vec![] });
    }
    let scale = f.amax().max(1.0);
    let radius = SPECTRAL_FLOOR.max(tol) * scale;

    let eigenvalues = f.clone().complex_eigenvalues();
    // Greedy clustering: sort by (re, im), then merge chains of eigenvalues
    // within the spectral radius of the running cluster mean.
    let mut sorted: Vec<Complex<f64>> = eigenvalues.iter().copied().collect();
    sorted.sort_by(|a, b| {
        (a.re, a.im)
            .partial_cmp(&(b.re, b.im))
            .expect("eigenvalues are finite")
    });
    let mut clusters: Vec<(Complex<f64>, usize)> = Vec::new();
    for ev in sorted {
        match clusters.last_mut() {
            Some((mean, count)) if (ev - *mean).norm() <= 2.0 * radius => {
                let total = *mean * (*count as f64) + ev;
                *count += 1;
                *mean = total / (*count as f64);
            }
            _ => clusters.push((ev, 1)),
        }
    }
    // Overlap guard: distinct clusters must be well separated.
    for (i, (a, _)) in clusters.iter().enumerate() {
        for (b, _) in clusters.iter().skip(i + 1) {
            if (a - b).norm() < 10.0 * radius {
                return Err(Error::IllConditioned {
                    detail: format!(
                        "eigenvalue clusters {:.6} and {:.6} are separated by less than ten spectral radii",
                        a, b
                    ),
                });
            }
        }
    }

    // Merge conjugate pairs: keep im >= 0 representatives, after checking
    // that every negative-im cluster has a matching partner.
    let mut merged: Vec<(Complex<f64>, usize)> = Vec::new();
    for &(ev, count) in &clusters {
        if ev.im < -radius {
            let has_partner = clusters.iter().any(|&(other, c)| {
                other.im > radius && (other - ev.conj()).norm() <= 2.0 * radius && c == count
            });
            if !has_partner {
                return Err(Error::IllConditioned {
                    detail: format!("eigenvalue {ev:.6} lacks a conjugate partner"),
                });
            }
            continue;
        }
        let im = if ev.im.abs() <= radius { 0.0 } else { ev.im };
        merged.push((Complex::new(ev.re, im), count));
    }

    let complex_f = f.map(|x| Complex::new(x, 0.0));
    let mut out = Vec::new();
    for (ev, multiplicity) in merged {
        let shifted = &complex_f - DMatrix::from_diagonal_element(n, n, ev);
        // r[k] = rank((f - ev)^k); blocks of size exactly k number
        // r[k-1] - 2 r[k] + r[k+1].
        let mut ranks = vec![n];
        let mut power = DMatrix::identity(n, n).map(|x: f64| Complex::new(x, 0.0));
        let mut k = 0usize;
        while *ranks.last().expect("nonempty") > n - multiplicity && k < n {
            k += 1;
            power *= &shifted;
            let threshold = radius * scale.powi(k as i32 - 1);
            ranks.push(rank_at(&power, threshold)?);
        }
        let padded = |i: usize| -> isize {
            if i < ranks.len() {
                ranks[i] as isize
            } else {
                (n - multiplicity) as isize
            }
        };
        let mut block_sizes = Vec::new();
        for size in 1..=k.max(1) {
            let count = padded(size - 1) - 2 * padded(size) + padded(size + 1);
            if count < 0 {
                return Err(Error::IllConditioned {
                    detail: format!("non-monotone rank sequence at eigenvalue {ev:.6}"),
                });
            }
            for _ in 0..count {
                block_sizes.push(size);
            }
        }
        block_sizes.sort_unstable_by(|a, b| b.cmp(a));
        let accounted: usize = block_sizes.iter().sum();
        if accounted != multiplicity {
            return Err(Error::IllConditioned {
                detail: format!(
                    "blocks at eigenvalue {ev:.6} account for {accounted} of multiplicity {multiplicity}"
                ),
            });
        }
        out.push(JordanCluster {
            eigenvalue: (ev.re, ev.im),
            block_sizes,
        });
    }
    out.sort_by(|a, b| {
        a.eigenvalue
            .partial_cmp(&b.eigenvalue)
            .expect("finite eigenvalues")
    });
    let structure = JordanStructure { clusters: out };
    if structure.dimension() != n {
        return Err(Error::IllConditioned {
            detail: format!(
                "clusters account for dimension {} of {n}",
                structure.dimension()
            ),
        });
    }
    Ok(structure)
}

/// Rank with an ambiguity guard: a singular value within a factor ten of the
/// threshold on either side makes the decision ill-conditioned.
fn rank_at(m: &DMatrix<Complex<f64>>, threshold: f64) -> Result<usize> {
    let sv = m.clone().svd(false, false).singular_values;
    let mut rank = 0usize;
    for &s in sv.iter() {
        if s > threshold * 3.0 && s < threshold * 30.0 {
            return Err(Error::IllConditioned {
                detail: format!(
                    "singular value {s:.3e} sits in the ambiguity band of threshold {threshold:.3e}"
                ),
            });
        }
        if s >= threshold * 30.0 {
            rank += 1;
        }
    }
    Ok(rank)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::instantiate_family;
    use crate::normal_form::{l1, l2, l3, m3};

    fn grid_of(pairs: &[(&str, &[f64])]) -> Grid {
        pairs
            .iter()
            .map(|&(name, values)| (name.to_string(), values.to_vec()))
            .collect()
    }

    #[test]
    fn scan_orders_lexicographically_and_hits_zero() {
        let grid = grid_of(&[("sigma", &[-1.0, 0.0, 1.0])]);
        let rows = residual_scan("aa.4d.ii", &grid).unwrap();
        assert_eq!(rows.len(), 3);
        for (row, sigma) in rows.iter().zip([-1.0, 0.0, 1.0]) {
            assert_eq!(row.params["sigma"], sigma);
            assert!(row.residual.unwrap() < 1e-9);
            assert!(row.error.is_none());
        }
    }

    #[test]
    fn scan_continues_past_domain_violations() {
        let grid = grid_of(&[("a", &[0.5, 0.0, 2f64.sqrt(), 3.0])]);
        let rows = residual_scan("aa.4d.vi", &grid).unwrap();
        assert_eq!(rows.len(), 4);
        assert!(rows[0].residual.unwrap() < 1e-9);
        assert!(rows[1].residual.is_none());
        assert!(rows[1].error.as_deref().unwrap().contains("nonzero"));
        assert!(rows[2].residual.unwrap() < 1e-9);
        assert!(rows[3].residual.unwrap() < 1e-9);
    }

    #[test]
    fn scan_rejects_unknown_family_and_empty_grid() {
        assert!(matches!(
            residual_scan("no.such.family", &Grid::new()),
            Err(Error::UnknownFamily { .. })
        ));
        let empty = grid_of(&[("sigma", &[])]);
        assert!(matches!(
            residual_scan("aa.4d.ii", &empty),
            Err(Error::BadGrid { .. })
        ));
    }

    #[test]
    fn tampering_with_the_three_form_breaks_every_point() {
        let problem = instantiate_family("red.so3", &ParamMap::new()).unwrap();
        let tampered = GEProblem::new(
            problem.algebra.clone(),
            problem.metric.clone(),
            problem.h_form.scale(2.0),
            problem.divergence.clone(),
            problem.tolerance,
        )
        .unwrap();
        assert!(einstein_residuals(&problem).total < 1e-9);
        assert!(einstein_residuals(&tampered).total > 1e-2);
    }

    #[test]
    fn falsification_is_deterministic() {
        let lie = LieAlgebra::new(3, &[(1, 2, 3, 1.0)]).unwrap();
        let a = random_falsification(&lie, (2, 1), 40, 11).unwrap();
        let b = random_falsification(&lie, (2, 1), 40, 11).unwrap();
        assert_eq!(a.min_residual.to_bits(), b.min_residual.to_bits());
        assert_eq!(a.argmin_trial, b.argmin_trial);
        let c = random_falsification(&lie, (2, 1), 40, 12).unwrap();
        assert_ne!(a.min_residual.to_bits(), c.min_residual.to_bits());
    }

    #[test]
    fn abelian_minimum_needs_vanishing_torsion() {
        // Every metric on the Abelian algebra is generalised Einstein with
        // H = 0, and none is with unit-norm H.
        let lie = LieAlgebra::new(4, &[]).unwrap();
        let run = random_falsification(&lie, (3, 1), 60, 5).unwrap();
        assert!(run.min_residual < 1e-12, "H = 0 trials reach zero");
        assert!(
            run.min_residual_unit_h.unwrap() > 1e-2,
            "unit-torsion trials stay away from zero, got {:?}",
            run.min_residual_unit_h
        );
    }

    #[test]
    fn injected_instances_are_found() {
        let problem = instantiate_family("red.so3", &ParamMap::new()).unwrap();
        let run = falsify_with_injections(
            &problem.algebra.clone(),
            (4, 0),
            8,
            3,
            std::slice::from_ref(&problem),
        )
        .unwrap();
        assert!(run.min_residual < 1e-9);
        assert_eq!(run.argmin_trial, None);
    }

    #[test]
    fn falsification_validates_inputs() {
        let lie = LieAlgebra::new(3, &[]).unwrap();
        assert!(matches!(
            random_falsification(&lie, (3, 1), 10, 0),
            Err(Error::WrongSignature { .. })
        ));
        assert!(matches!(
            random_falsification(&lie, (2, 1), 0, 0),
            Err(Error::BadParameter { .. })
        ));
    }

    #[test]
    fn jordan_oracle_matches_the_canonical_blocks() {
        // Size-2 nilpotent block plus a trivial line.
        let mut f = DMatrix::zeros(3, 3);
        for i in 0..2 {
            for j in 0..2 {
                f[(i, j)] = l2(0.0, 1.0).unwrap()[(i, j)];
            }
        }
        let s = jordan_oracle(&f, 1e-9).unwrap();
        assert_eq!(s.clusters.len(), 1);
        assert!(s.clusters[0].eigenvalue.0.abs() < 1e-6);
        assert_eq!(s.clusters[0].eigenvalue.1, 0.0);
        assert_eq!(s.clusters[0].block_sizes, vec![2, 1]);

        // Size-3 block at 0.7.
        let s = jordan_oracle(&l3(0.7), 1e-9).unwrap();
        assert_eq!(s.clusters.len(), 1);
        assert!((s.clusters[0].eigenvalue.0 - 0.7).abs() < 1e-6);
        assert_eq!(s.clusters[0].block_sizes, vec![3]);

        // Distinct simple eigenvalues.
        let s = jordan_oracle(&DMatrix::from_diagonal(&DVector::from_row_slice(&[
            1.0, 2.0, 3.0,
        ])), 1e-9)
        .unwrap();
        assert_eq!(s.clusters.len(), 3);
        for (cluster, expected) in s.clusters.iter().zip([1.0, 2.0, 3.0]) {
            assert!((cluster.eigenvalue.0 - expected).abs() < 1e-9);
            assert_eq!(cluster.block_sizes, vec![1]);
        }

        // Complex pair reported once with nonnegative imaginary part.
        let s = jordan_oracle(&l1(1.0, 2.0), 1e-9).unwrap();
        assert_eq!(s.clusters.len(), 1);
        assert!((s.clusters[0].eigenvalue.0 - 1.0).abs() < 1e-9);
        assert!((s.clusters[0].eigenvalue.1 - 2.0).abs() < 1e-9);
        assert_eq!(s.clusters[0].block_sizes, vec![1]);
        assert_eq!(s.dimension(), 2);

        // The null-block canonical matrix at sigma = 0 is nilpotent with a
        // nonzero square, a single size-3 block.
        let s = jordan_oracle(&m3(0.0), 1e-9).unwrap();
        assert_eq!(s.clusters.len(), 1);
        assert!(s.clusters[0].eigenvalue.0.abs() < 1e-4);
        assert_eq!(s.clusters[0].eigenvalue.1, 0.0);
        assert_eq!(s.clusters[0].block_sizes, vec![3]);
    }

    #[test]
    fn jordan_oracle_rejects_ambiguous_input() {
        // Two eigenvalues separated by less than ten spectral radii but
        // more than a merge radius.
        let f = DMatrix::from_diagonal(&DVector::from_row_slice(&[0.0, 5e-4, 1.0]));
        assert!(matches!(
            jordan_oracle(&f, 1e-9),
            Err(Error::IllConditioned { .. })
        ));
    }
}
