//! Mesh-constrained maximization of the weighted Vandermonde objective:
//! greedy Leja extraction, approximate Fekete points by column-pivoted QR,
//! exchange refinement with rank-one inverse updates, and exhaustive search.
//!
//! All searches run in the orthonormal basis of a [`Normalizer`] built on the
//! mesh; reported objectives are converted back to the raw monomial basis.
//! Ties are broken in favor of the lowest mesh index.

use num_complex::Complex64;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::basis::{basis_size, enumerate_basis, EvaluationMatrix, MonomialBasis, Normalizer};
use crate::error::{Error, Result};
use crate::geometry::{build_mesh, CompactSet, Mesh, Point, Weight};
use crate::linalg::{norm2, reflect_column, CMat, Lu};
use crate::vandermonde::{submatrix_logdet, Configuration, LogDet};

/// Values closer than this (in log scale) count as ties.
pub const TIE_TOL: f64 = 1e-12;
/// Minimum log-determinant gain for an exchange step to count as an improvement.
pub const IMPROVEMENT_TOL: f64 = 1e-12;
/// Allowed drift between incremental and refactorized objectives after a sweep.
pub const DRIFT_TOL: f64 = 1e-6;
/// Default cap on the number of subsets examined by [`brute_force_fekete`].
pub const BRUTE_FORCE_BUDGET: u128 = 1_000_000;
/// Exchange steps gaining more than this refactorize immediately.
const RESYNC_GAIN: f64 = 1.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    Leja,
    ApproxFekete,
    Exchange,
    BruteForce,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchReport {
    pub config: Configuration,
    /// Raw monomial-basis objective `log|Δ| - k Σ φ`.
    pub objective: LogDet,
    pub iterations: usize,
    pub improved_steps: usize,
    pub method: Method,
    #[serde(default)]
    pub seed: Option<u64>,
    /// Mesh index of each configuration point.
    pub mesh_indices: Vec<usize>,
    /// Objective after every accepted exchange step.
    #[serde(default)]
    pub objective_trace: Vec<f64>,
    /// Sweeps whose incremental objective drifted from the refactorized one.
    #[serde(default)]
    pub drift_resyncs: usize,
}

impl SearchReport {
    /// Mesh indices in increasing order, for set comparisons.
    pub fn sorted_indices(&self) -> Vec<usize> {
        let mut v = self.mesh_indices.clone();
        v.sort_unstable();
        v
    }
}

/// Precomputed orthonormal evaluation of a basis on a mesh.
#[derive(Clone, Debug)]
pub struct SearchSpace<'a> {
    pub mesh: &'a Mesh,
    pub basis: MonomialBasis,
    pub weight: Weight,
    pub k: usize,
    pub normalizer: Normalizer,
    /// Orthonormal mesh evaluation with unit-norm mantissa columns.
    search_matrix: EvaluationMatrix,
}

fn first_max(values: impl IntoIterator<Item = (usize, f64)>) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for (j, v) in values {
        if !v.is_finite() {
            continue;
        }
        match best {
            Some((_, b)) if v <= b + TIE_TOL => {}
            _ => best = Some((j, v)),
        }
    }
    best
}

impl<'a> SearchSpace<'a> {
    pub fn new(mesh: &'a Mesh, basis: &MonomialBasis, weight: &Weight, k: usize) -> Result<Self> {
        if basis.degree != k {
            return Err(Error::InvalidArgument(format!(
                "basis degree {} differs from k = {k}",
                basis.degree
            )));
        }
        if basis.dim_ambient != mesh.parent.ambient_dim() {
            return Err(Error::DimensionMismatch {
                expected: mesh.parent.ambient_dim(),
                got: basis.dim_ambient,
            });
        }
        let needed = basis_size(basis.dim_ambient, k)?;
        if mesh.len() < needed {
            return Err(Error::MeshTooSmall {
                got: mesh.len(),
                needed,
                degree: k,
            });
        }
        let normalizer = Normalizer::new(basis, &mesh.points, weight, k)?;
        let search_matrix = unit_columns(&normalizer.mesh_matrix);
        Ok(SearchSpace {
            mesh,
            basis: basis.clone(),
            weight: weight.clone(),
            k,
            normalizer,
            search_matrix,
        })
    }

    pub fn n(&self) -> usize {
        self.basis.size()
    }

    fn columns(&self) -> &CMat {
        &self.search_matrix.mantissa
    }

    fn scales(&self) -> &[f64] {
        &self.search_matrix.log_scale
    }

    /// Raw objective of the mesh subset `idx`.
    pub fn objective_of(&self, idx: &[usize]) -> LogDet {
        submatrix_logdet(&self.search_matrix, idx).shifted(self.normalizer.offset())
    }

    fn report(&self, idx: Vec<usize>, objective: LogDet, method: Method) -> SearchReport {
        SearchReport {
            config: Configuration::new(idx.iter().map(|&j| self.mesh.points[j].clone()).collect()),
            objective,
            iterations: 0,
            improved_steps: 0,
            method,
            seed: None,
            mesh_indices: idx,
            objective_trace: Vec::new(),
            drift_resyncs: 0,
        }
    }

    /// Sequential selection by row-pivoted elimination: each new point
    /// maximizes the next pivot, i.e. the determinant grown by one point.
    pub fn greedy_leja(&self) -> Result<SearchReport> {
        let n = self.n();
        let m = self.mesh.len();
        let scales = self.scales();
        let mut rows: Vec<Vec<Complex64>> =
            (0..m).map(|j| self.columns().col(j).to_vec()).collect();
        let mut used = vec![false; m];
        let mut chosen = Vec::with_capacity(n);
        let mut logdet = 0.0;
        for i in 0..n {
            let cand = (0..m)
                .filter(|&j| !used[j])
                .map(|j| (j, rows[j][i].norm().ln() + scales[j]));
            let (p, val) = first_max(cand).ok_or_else(|| {
                Error::RankDeficient(format!(
                    "no nonzero pivot for basis function {i} after {i} points"
                ))
            })?;
            used[p] = true;
            chosen.push(p);
            logdet += val;
            let pivot = rows[p].clone();
            rows.par_iter_mut()
                .enumerate()
                .filter(|(j, _)| !used[*j])
                .for_each(|(_, row)| {
                    let f = row[i] / pivot[i];
                    if f != Complex64::new(0.0, 0.0) {
                        for l in i + 1..n {
                            row[l] -= f * pivot[l];
                        }
                    }
                    row[i] = Complex64::new(0.0, 0.0);
                });
        }
        let mut rep = self.report(
            chosen,
            LogDet::finite(logdet + self.normalizer.offset()),
            Method::Leja,
        );
        rep.iterations = n;
        // the pivot product equals the determinant; recompute for a consistent value
        rep.objective = self.objective_of(&rep.mesh_indices);
        Ok(rep)
    }

    /// The `N` columns chosen by a column-pivoted Householder QR of the
    /// weighted evaluation matrix (columns = mesh points).
    pub fn approximate_fekete(&self) -> Result<SearchReport> {
        let n = self.n();
        let m = self.mesh.len();
        let scales = self.scales();
        let mut w = self.columns().clone();
        let mut used = vec![false; m];
        let mut chosen = Vec::with_capacity(n);
        for i in 0..n {
            let norms: Vec<(usize, f64)> = (0..m)
                .into_par_iter()
                .filter(|&j| !used[j])
                .map(|j| (j, norm2(&w.col(j)[i..]).ln() + scales[j]))
                .collect();
            let (p, _) = first_max(norms).ok_or_else(|| {
                Error::RankDeficient(format!("residual vanished after {i} of {n} points"))
            })?;
            used[p] = true;
            chosen.push(p);
            let others: Vec<usize> = (0..m).filter(|&j| !used[j]).collect();
            reflect_column(&mut w, i, p, others);
        }
        let objective = self.objective_of(&chosen);
        if !objective.is_finite() {
            return Err(Error::RankDeficient("selected columns are singular".into()));
        }
        let mut rep = self.report(chosen, objective, Method::ApproxFekete);
        rep.iterations = n;
        Ok(rep)
    }

    fn locate(&self, p: &Point) -> Option<usize> {
        self.mesh.points.iter().position(|q| {
            q.dim() == p.dim() && q.0.iter().zip(&p.0).all(|(a, b)| (a - b).norm() <= 1e-12)
        })
    }

    /// Coordinate-wise exchange: each sweep replaces every point in turn by the
    /// mesh point maximizing the objective with the others fixed.
    pub fn exchange_refine(
        &self,
        start: &Configuration,
        max_sweeps: usize,
    ) -> Result<SearchReport> {
        let n = self.n();
        if start.len() != n {
            return Err(Error::SizeMismatch {
                expected: n,
                got: start.len(),
            });
        }
        let located: Vec<Option<usize>> = start.points.iter().map(|p| self.locate(p)).collect();
        let off_mesh: Vec<Point> = start
            .points
            .iter()
            .zip(&located)
            .filter(|(_, l)| l.is_none())
            .map(|(p, _)| p.clone())
            .collect();
        let extra = unit_columns(&self.normalizer.columns_for(&off_mesh, &self.weight)?);
        let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(n);
        let mut sig = Vec::with_capacity(n);
        let mut extra_i = 0;
        for l in &located {
            match l {
                Some(j) => {
                    cols.push(self.columns().col(*j).to_vec());
                    sig.push(self.scales()[*j]);
                }
                None => {
                    cols.push(extra.mantissa.col(extra_i).to_vec());
                    sig.push(extra.log_scale[extra_i]);
                    extra_i += 1;
                }
            }
        }
        let mut idx = located;
        let offset = self.normalizer.offset();

        let factor = |cols: &[Vec<Complex64>], sig: &[f64]| -> Result<(f64, CMat)> {
            let b = CMat::from_columns(n, cols);
            let lu = Lu::new(&b.transpose())?;
            if lu.is_singular() {
                return Err(Error::Degenerate);
            }
            // inverse of B from the factorization of B^T
            let inv_t = lu.inverse();
            Ok((
                lu.log_abs_det() + sig.iter().sum::<f64>(),
                inv_t.transpose(),
            ))
        };
        let (mut current, mut inv) = factor(&cols, &sig)?;
        let mut trace = vec![current + offset];
        let mut improved_steps = 0;
        let mut sweeps = 0;
        let mut drift_resyncs = 0;
        let mesh_cols = self.columns();
        let scales = self.scales();
        while sweeps < max_sweeps {
            sweeps += 1;
            let mut improved = false;
            for j in 0..n {
                let r: Vec<Complex64> = (0..n).map(|l| inv[(j, l)]).collect();
                let sj = sig[j];
                let gains: Vec<(usize, f64, Complex64)> = (0..self.mesh.len())
                    .into_par_iter()
                    .map(|y| {
                        let u = mesh_cols.col(y);
                        let ratio: Complex64 = r.iter().zip(u).map(|(a, b)| a * b).sum();
                        (y, ratio.norm().ln() + scales[y] - sj, ratio)
                    })
                    .collect();
                let candidates = gains
                    .iter()
                    .filter(|(y, _, _)| !idx.contains(&Some(*y)))
                    .map(|&(y, g, _)| (y, g));
                let Some((y, gain)) = first_max(candidates) else {
                    continue;
                };
                if gain <= IMPROVEMENT_TOL {
                    continue;
                }
                let ratio = gains[y].2;
                let u = mesh_cols.col(y);
                let v: Vec<Complex64> = u.iter().zip(&cols[j]).map(|(a, b)| a - b).collect();
                let inv_v = inv.mul_vec(&v);
                for c in 0..n {
                    let rc = r[c] / ratio;
                    for row in 0..n {
                        inv[(row, c)] -= inv_v[row] * rc;
                    }
                }
                cols[j] = u.to_vec();
                sig[j] = scales[y];
                idx[j] = Some(y);
                current += gain;
                if gain > RESYNC_GAIN {
                    // large steps come from ill-conditioned starts; refresh the inverse
                    let (full, fresh_inv) = factor(&cols, &sig)?;
                    current = full;
                    inv = fresh_inv;
                }
                trace.push(current + offset);
                improved_steps += 1;
                improved = true;
            }
            let (full, fresh_inv) = factor(&cols, &sig)?;
            if (full - current).abs() > DRIFT_TOL {
                drift_resyncs += 1;
            }
            current = full;
            inv = fresh_inv;
            if !improved {
                break;
            }
        }
        let config = Configuration::new(
            idx.iter()
                .zip(&start.points)
                .map(|(i, p)| i.map_or_else(|| p.clone(), |j| self.mesh.points[j].clone()))
                .collect(),
        );
        Ok(SearchReport {
            config,
            objective: LogDet::finite(current + offset),
            iterations: sweeps,
            improved_steps,
            method: Method::Exchange,
            seed: None,
            mesh_indices: idx.iter().map(|i| i.unwrap_or(usize::MAX)).collect(),
            objective_trace: trace,
            drift_resyncs,
        })
    }

    /// Exhaustive maximization over all `N`-subsets of the mesh, in
    /// lexicographic order of index tuples.
    pub fn brute_force(&self, budget: u128) -> Result<SearchReport> {
        let n = self.n();
        let m = self.mesh.len();
        let needed = binomial_u128(m, n);
        if needed > budget {
            return Err(Error::BudgetExceeded { needed, budget });
        }
        let mat = &self.search_matrix;
        let mut comb: Vec<usize> = (0..n).collect();
        let mut best: Option<(Vec<usize>, f64)> = None;
        let mut count = 0usize;
        loop {
            count += 1;
            let v = submatrix_logdet(mat, &comb);
            if v.is_finite() {
                match &best {
                    Some((_, b)) if v.value <= b + TIE_TOL => {}
                    _ => best = Some((comb.clone(), v.value)),
                }
            }
            if !next_combination(&mut comb, m) {
                break;
            }
        }
        let (idx, v) =
            best.ok_or_else(|| Error::RankDeficient("every subset is singular".into()))?;
        let mut rep = self.report(
            idx,
            LogDet::finite(v + self.normalizer.offset()),
            Method::BruteForce,
        );
        rep.iterations = count;
        Ok(rep)
    }

    fn random_start(&self, rng: &mut ChaCha8Rng) -> Option<Vec<usize>> {
        for _ in 0..100 {
            let idx = sample(rng, self.mesh.len(), self.n()).into_vec();
            if self.objective_of(&idx).is_finite() {
                return Some(idx);
            }
        }
        None
    }

    /// Best exchange refinement over the Leja start, the approximate Fekete
    /// start, and `starts - 2` seeded random starts.
    pub fn multistart(&self, starts: usize, seed: u64, max_sweeps: usize) -> Result<SearchReport> {
        if starts == 0 {
            return Err(Error::InvalidArgument("need at least one start".into()));
        }
        let mut inits: Vec<Vec<usize>> = vec![self.greedy_leja()?.mesh_indices];
        if starts >= 2 {
            inits.push(self.approximate_fekete()?.mesh_indices);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 2..starts {
            if let Some(idx) = self.random_start(&mut rng) {
                inits.push(idx);
            }
        }
        let runs: Vec<Result<SearchReport>> = inits
            .par_iter()
            .map(|idx| {
                let cfg =
                    Configuration::new(idx.iter().map(|&j| self.mesh.points[j].clone()).collect());
                self.exchange_refine(&cfg, max_sweeps)
            })
            .collect();
        let mut best: Option<SearchReport> = None;
        for (i, run) in runs.into_iter().enumerate() {
            let run = match run {
                // a random start can be too ill-conditioned to refine
                Err(Error::Degenerate) if i >= 2 => continue,
                r => r?,
            };
            match &best {
                Some(b) if run.objective.value <= b.objective.value + TIE_TOL => {}
                _ => best = Some(run),
            }
        }
        let mut best = best.expect("at least one start");
        best.seed = Some(seed);
        Ok(best)
    }
}

fn unit_columns(m: &EvaluationMatrix) -> EvaluationMatrix {
    let mut out = m.clone();
    for j in 0..m.cols() {
        let nrm = norm2(m.mantissa.col(j));
        if nrm > 0.0 && nrm.is_finite() {
            out.mantissa.col_mut(j).iter_mut().for_each(|z| *z /= nrm);
            out.log_scale[j] += nrm.ln();
        }
    }
    out
}

pub(crate) fn binomial_u128(m: usize, n: usize) -> u128 {
    if n > m {
        return 0;
    }
    let n = n.min(m - n);
    let mut acc: u128 = 1;
    for i in 0..n as u128 {
        acc = acc.saturating_mul(m as u128 - i) / (i + 1);
    }
    acc
}

fn next_combination(c: &mut [usize], m: usize) -> bool {
    let n = c.len();
    let mut i = n;
    while i > 0 {
        i -= 1;
        if c[i] < m - n + i {
            c[i] += 1;
            for l in i + 1..n {
                c[l] = c[l - 1] + 1;
            }
            return true;
        }
    }
    false
}

pub fn greedy_leja(
    mesh: &Mesh,
    basis: &MonomialBasis,
    weight: &Weight,
    k: usize,
) -> Result<SearchReport> {
    SearchSpace::new(mesh, basis, weight, k)?.greedy_leja()
}

pub fn approximate_fekete(
    mesh: &Mesh,
    basis: &MonomialBasis,
    weight: &Weight,
    k: usize,
) -> Result<SearchReport> {
    SearchSpace::new(mesh, basis, weight, k)?.approximate_fekete()
}

pub fn exchange_refine(
    start: &Configuration,
    mesh: &Mesh,
    basis: &MonomialBasis,
    weight: &Weight,
    k: usize,
    max_sweeps: usize,
) -> Result<SearchReport> {
    SearchSpace::new(mesh, basis, weight, k)?.exchange_refine(start, max_sweeps)
}

pub fn brute_force_fekete(
    mesh: &Mesh,
    basis: &MonomialBasis,
    weight: &Weight,
    k: usize,
) -> Result<SearchReport> {
    // cheap rejection before building the search space
    let needed = binomial_u128(mesh.len(), basis.size());
    if needed > BRUTE_FORCE_BUDGET {
        return Err(Error::BudgetExceeded {
            needed,
            budget: BRUTE_FORCE_BUDGET,
        });
    }
    SearchSpace::new(mesh, basis, weight, k)?.brute_force(BRUTE_FORCE_BUDGET)
}

pub fn multistart_fekete(
    mesh: &Mesh,
    basis: &MonomialBasis,
    weight: &Weight,
    k: usize,
    starts: usize,
    rng_seed: u64,
    max_sweeps: usize,
) -> Result<SearchReport> {
    SearchSpace::new(mesh, basis, weight, k)?.multistart(starts, rng_seed, max_sweeps)
}

/// Mesh and search parameters shared by the experiment drivers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchOptions {
    pub mesh_density: usize,
    pub starts: usize,
    pub seed: u64,
    pub max_sweeps: usize,
    /// Meshes with at most this many `N`-subsets are searched exhaustively.
    pub brute_force_budget: u128,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            mesh_density: 4,
            starts: 4,
            seed: 0,
            max_sweeps: 200,
            brute_force_budget: 10_000,
        }
    }
}

/// Whether a reported maximum is certified over the whole mesh.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Certainty {
    BruteForce,
    Heuristic,
}

/// Everything produced by one search at one degree.
#[derive(Clone, Debug)]
pub struct FeketeRun {
    pub mesh: Mesh,
    pub basis: MonomialBasis,
    pub normalizer: Normalizer,
    pub report: SearchReport,
    pub certainty: Certainty,
}

/// Builds the mesh of `set` (truncated for `weight` if unbounded) and finds a
/// Fekete configuration of degree `k`: exhaustively when the mesh is small
/// enough for the budget, by multistart exchange otherwise.
pub fn find_fekete(
    set: &CompactSet,
    weight: &Weight,
    k: usize,
    opts: &SearchOptions,
) -> Result<FeketeRun> {
    let set = set.truncated_for(weight)?;
    let mesh = build_mesh(&set, k, opts.mesh_density)?;
    let basis = enumerate_basis(set.ambient_dim(), k)?;
    let space = SearchSpace::new(&mesh, &basis, weight, k)?;
    let exhaustive = binomial_u128(mesh.len(), basis.size()) <= opts.brute_force_budget;
    let (report, certainty) = if exhaustive {
        (
            space.brute_force(opts.brute_force_budget)?,
            Certainty::BruteForce,
        )
    } else {
        (
            space.multistart(opts.starts, opts.seed, opts.max_sweeps)?,
            Certainty::Heuristic,
        )
    };
    let normalizer = space.normalizer;
    Ok(FeketeRun {
        mesh,
        basis,
        normalizer,
        report,
        certainty,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn interval_mesh(xs: &[f64], k: usize) -> Mesh {
        let set = CompactSet::interval(-1.0, 1.0).unwrap();
        Mesh::from_points(set, xs.iter().map(|&x| Point::real(x)).collect(), k).unwrap()
    }

    fn reals(rep: &SearchReport) -> Vec<f64> {
        let mut v: Vec<f64> = rep.config.points.iter().map(|p| p.0[0].re).collect();
        v.sort_by(f64::total_cmp);
        v
    }

    #[test]
    fn leja_three_points() {
        let mesh = interval_mesh(&[-1.0, 0.0, 1.0], 1);
        let b = enumerate_basis(1, 1).unwrap();
        let rep = greedy_leja(&mesh, &b, &Weight::zero(), 1).unwrap();
        assert_eq!(reals(&rep), vec![-1.0, 1.0]);
        // the constant column ties everywhere: the first mesh point is taken first
        assert_eq!(rep.mesh_indices[0], 0);
    }

    #[test]
    fn leja_degree_zero_takes_first_point() {
        let mesh = interval_mesh(&[0.3, -0.2, 0.9], 0);
        let b = enumerate_basis(1, 0).unwrap();
        let rep = greedy_leja(&mesh, &b, &Weight::zero(), 0).unwrap();
        assert_eq!(rep.mesh_indices, vec![0]);
    }

    #[test]
    fn leja_rank_deficiency() {
        // two distinct points for a 3-dimensional space is caught at mesh level,
        // so use a degenerate product mesh: collinear points in C^2 with k = 1
        let set = CompactSet::product(vec![
            CompactSet::interval(-1.0, 1.0).unwrap(),
            CompactSet::interval(-1.0, 1.0).unwrap(),
        ])
        .unwrap();
        let pts = [-1.0, 0.0, 0.5, 1.0]
            .iter()
            .map(|&x| Point::from_reals(&[x, x]))
            .collect();
        let mesh = Mesh::from_points(set, pts, 1).unwrap();
        let b = enumerate_basis(2, 1).unwrap();
        assert!(matches!(
            greedy_leja(&mesh, &b, &Weight::zero(), 1),
            Err(Error::RankDeficient(_))
        ));
    }

    #[test]
    fn approximate_fekete_examples() {
        let mesh = interval_mesh(&[-1.0, -0.5, 0.5, 1.0], 1);
        let b = enumerate_basis(1, 1).unwrap();
        let rep = approximate_fekete(&mesh, &b, &Weight::zero(), 1).unwrap();
        assert_eq!(reals(&rep), vec![-1.0, 1.0]);

        let mesh = interval_mesh(&[-0.7, 0.1, 0.4], 2);
        let b = enumerate_basis(1, 2).unwrap();
        let rep = approximate_fekete(&mesh, &b, &Weight::zero(), 2).unwrap();
        assert_eq!(rep.sorted_indices(), vec![0, 1, 2]);
        assert!(rep.objective.is_finite());
    }

    #[test]
    fn brute_force_examples() {
        let mesh = interval_mesh(&[-1.0, 0.0, 1.0], 1);
        let b = enumerate_basis(1, 1).unwrap();
        let rep = brute_force_fekete(&mesh, &b, &Weight::zero(), 1).unwrap();
        assert_eq!(reals(&rep), vec![-1.0, 1.0]);
        assert_eq!(rep.iterations, 3);

        let xs: Vec<f64> = (0..21).map(|i| -1.0 + 0.1 * i as f64).collect();
        let mesh = interval_mesh(&xs, 2);
        let b = enumerate_basis(1, 2).unwrap();
        let rep = brute_force_fekete(&mesh, &b, &Weight::zero(), 2).unwrap();
        assert_eq!(rep.iterations, 1330);
        assert_eq!(rep.sorted_indices(), vec![0, 10, 20]);
        assert!((rep.objective.value - 2f64.ln()).abs() < 1e-12);

        let b0 = enumerate_basis(1, 0).unwrap();
        let mesh0 = interval_mesh(&[0.3, -0.2, 0.9], 0);
        let rep = brute_force_fekete(&mesh0, &b0, &Weight::real_power(1.0, 2), 0).unwrap();
        assert_eq!(rep.mesh_indices, vec![0]);
    }

    #[test]
    fn brute_force_budget() {
        let set = CompactSet::interval(-1.0, 1.0).unwrap();
        let mesh = build_mesh(&set, 10, 3).unwrap();
        let b = enumerate_basis(1, 10).unwrap();
        assert!(matches!(
            brute_force_fekete(&mesh, &b, &Weight::zero(), 10),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn exchange_fixpoint_and_convergence() {
        let xs: Vec<f64> = (0..41).map(|i| -1.0 + 0.05 * i as f64).collect();
        let mesh = interval_mesh(&xs, 2);
        let b = enumerate_basis(1, 2).unwrap();
        let start = Configuration::from_reals(&[xs[7], xs[12], xs[30]]);
        let rep = exchange_refine(&start, &mesh, &b, &Weight::zero(), 2, 50).unwrap();
        assert_eq!(rep.sorted_indices(), vec![0, 20, 40]);
        assert!(rep.improved_steps > 0);

        let again = exchange_refine(&rep.config, &mesh, &b, &Weight::zero(), 2, 50).unwrap();
        assert_eq!(again.improved_steps, 0);
        assert_eq!(again.config, rep.config);
    }

    #[test]
    fn exchange_accepts_off_mesh_start() {
        let xs: Vec<f64> = (0..21).map(|i| -1.0 + 0.1 * i as f64).collect();
        let mesh = interval_mesh(&xs, 2);
        let b = enumerate_basis(1, 2).unwrap();
        let start = Configuration::from_reals(&[-0.33, 0.123, 0.77]);
        let rep = exchange_refine(&start, &mesh, &b, &Weight::zero(), 2, 50).unwrap();
        assert_eq!(rep.sorted_indices(), vec![0, 10, 20]);
    }

    #[test]
    fn exchange_rejects_singular_start() {
        let mesh = interval_mesh(&[-1.0, 0.0, 1.0], 1);
        let b = enumerate_basis(1, 1).unwrap();
        let start = Configuration::from_reals(&[0.0, 0.0]);
        assert_eq!(
            exchange_refine(&start, &mesh, &b, &Weight::zero(), 1, 5),
            Err(Error::Degenerate)
        );
    }

    #[test]
    fn multistart_single_start_is_refined_leja() {
        let set = CompactSet::interval(-1.0, 1.0).unwrap();
        let mesh = build_mesh(&set, 6, 2).unwrap();
        let b = enumerate_basis(1, 6).unwrap();
        let space = SearchSpace::new(&mesh, &b, &Weight::zero(), 6).unwrap();
        let leja = space.greedy_leja().unwrap();
        let refined = space.exchange_refine(&leja.config, 30).unwrap();
        let ms = space.multistart(1, 99, 30).unwrap();
        assert_eq!(ms.config, refined.config);
        assert_eq!(ms.objective, refined.objective);
        assert_eq!(ms.seed, Some(99));
        let again = space.multistart(1, 99, 30).unwrap();
        assert_eq!(ms, again);
    }

    #[test]
    fn combinations_enumerate_in_order() {
        let mut c = vec![0, 1];
        let mut all = vec![c.clone()];
        while next_combination(&mut c, 4) {
            all.push(c.clone());
        }
        assert_eq!(
            all,
            vec![
                vec![0, 1],
                vec![0, 2],
                vec![0, 3],
                vec![1, 2],
                vec![1, 3],
                vec![2, 3]
            ]
        );
        assert_eq!(binomial_u128(41, 3), 10660);
    }
}
