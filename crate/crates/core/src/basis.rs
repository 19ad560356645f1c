//! Monomial bases of polynomials of degree ≤ k in n variables, weighted
//! evaluation matrices, and orthonormalization against a discrete measure.
//!
//! Evaluation matrices never materialize `exp(-k φ)`: every column is stored
//! as a mantissa vector plus a log-scale, and every change of basis applied
//! to the rows is tracked through `basis_logdet_offset`, so that
//! `log|det(raw submatrix)| = log|det(transformed submatrix)| + offset`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{CompactSet, Point, Weight};
use crate::linalg::{householder_r, invert_lower, norm2, CMat};

/// Exponent tuple α of the monomial `z_1^α_1 ... z_n^α_n`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct MultiIndex(pub Vec<u32>);

impl MultiIndex {
    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn eval(&self, z: &[Complex64]) -> Complex64 {
        self.0
            .iter()
            .zip(z)
            .fold(Complex64::new(1.0, 0.0), |acc, (&a, &x)| acc * x.powu(a))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonomialBasis {
    pub dim_ambient: usize,
    pub degree: usize,
    pub indices: Vec<MultiIndex>,
}

impl MonomialBasis {
    pub fn size(&self) -> usize {
        self.indices.len()
    }
}

/// `binomial(n + k, n)`, the dimension of polynomials of degree ≤ k in n variables.
pub fn basis_size(n: usize, k: usize) -> Result<usize> {
    let mut acc: u128 = 1;
    for i in 1..=n as u128 {
        acc = acc
            .checked_mul(k as u128 + i)
            .ok_or(Error::BasisOverflow { n, k })?
            / i;
    }
    usize::try_from(acc).map_err(|_| Error::BasisOverflow { n, k })
}

/// All exponents with `|α| ≤ k` in graded lexicographic order.
pub fn enumerate_basis(n: usize, k: usize) -> Result<MonomialBasis> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "ambient dimension must be at least 1".into(),
        ));
    }
    let size = basis_size(n, k)?;
    let mut indices = Vec::with_capacity(size);
    for d in 0..=k as u32 {
        let mut current = vec![0u32; n];
        push_compositions(&mut indices, &mut current, 0, d);
    }
    debug_assert_eq!(indices.len(), size);
    Ok(MonomialBasis {
        dim_ambient: n,
        degree: k,
        indices,
    })
}

// exponent tuples of total degree `remaining` over positions pos.., ascending lexicographically
fn push_compositions(out: &mut Vec<MultiIndex>, cur: &mut Vec<u32>, pos: usize, remaining: u32) {
    if pos == cur.len() - 1 {
        cur[pos] = remaining;
        out.push(MultiIndex(cur.clone()));
        return;
    }
    for a in 0..=remaining {
        cur[pos] = a;
        push_compositions(out, cur, pos + 1, remaining - a);
    }
    cur[pos] = 0;
}

/// Weighted evaluation matrix. Entry `(i, j)` is
/// `mantissa[(i, j)] * exp(log_scale[j])`.
#[derive(Clone, Debug, PartialEq)]
pub struct EvaluationMatrix {
    pub mantissa: CMat,
    pub log_scale: Vec<f64>,
    pub basis_logdet_offset: f64,
}

impl EvaluationMatrix {
    pub fn rows(&self) -> usize {
        self.mantissa.rows()
    }

    pub fn cols(&self) -> usize {
        self.mantissa.cols()
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.mantissa[(i, j)] * self.log_scale[j].exp()
    }

    /// Materializes the entries; may underflow for large `k φ`.
    pub fn to_dense(&self) -> CMat {
        CMat::from_fn(self.rows(), self.cols(), |i, j| self.entry(i, j))
    }

    /// Discrete Gram matrix `Σ_j w_j f_i(x_j) conj(f_l(x_j))`.
    pub fn gram(&self, weights: &[f64]) -> CMat {
        let n = self.rows();
        let mut g = CMat::zeros(n, n);
        for (j, &w) in weights.iter().enumerate() {
            let s = (2.0 * self.log_scale[j]).exp() * w;
            let c = self.mantissa.col(j);
            for i in 0..n {
                for l in 0..n {
                    g[(i, l)] += c[i] * c[l].conj() * s;
                }
            }
        }
        g
    }
}

fn normalize_columns(
    cols: Vec<Vec<Complex64>>,
    log_weights: Vec<f64>,
    rows: usize,
    offset: f64,
) -> EvaluationMatrix {
    let mut scales = Vec::with_capacity(cols.len());
    let mut normed = Vec::with_capacity(cols.len());
    for (mut c, lw) in cols.into_iter().zip(log_weights) {
        let nrm = norm2(&c);
        if nrm > 0.0 && nrm.is_finite() {
            c.iter_mut().for_each(|z| *z /= nrm);
            scales.push(nrm.ln() + lw);
        } else {
            scales.push(lw);
        }
        normed.push(c);
    }
    EvaluationMatrix {
        mantissa: CMat::from_columns(rows, &normed),
        log_scale: scales,
        basis_logdet_offset: offset,
    }
}

fn weight_logs(points: &[Point], weight: &Weight, k: usize) -> Result<Vec<f64>> {
    points
        .iter()
        .map(|p| Ok(-(k as f64) * weight.eval(p)?))
        .collect()
}

fn check_points(basis: &MonomialBasis, points: &[Point]) -> Result<()> {
    for p in points {
        if p.dim() != basis.dim_ambient {
            return Err(Error::DimensionMismatch {
                expected: basis.dim_ambient,
                got: p.dim(),
            });
        }
    }
    Ok(())
}

/// Raw monomial evaluation: entry `(i, j) = x_j^{α_i} exp(-k φ(x_j))`.
pub fn evaluate(
    basis: &MonomialBasis,
    points: &[Point],
    weight: &Weight,
    k: usize,
) -> Result<EvaluationMatrix> {
    if basis.degree != k {
        return Err(Error::InvalidArgument(format!(
            "basis degree {} differs from k = {k}",
            basis.degree
        )));
    }
    check_points(basis, points)?;
    let cols: Vec<Vec<Complex64>> = points
        .iter()
        .map(|p| basis.indices.iter().map(|a| a.eval(&p.0)).collect())
        .collect();
    Ok(normalize_columns(
        cols,
        weight_logs(points, weight, k)?,
        basis.size(),
        0.0,
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum CoordinateFamily {
    /// `T_j((z - c) / h)`
    Chebyshev,
    /// `((z - c) / h)^j`
    Power,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoordinateFrame {
    pub center: Complex64,
    pub scale: f64,
    pub family: CoordinateFamily,
}

impl CoordinateFrame {
    fn values(&self, z: Complex64, k: usize) -> Vec<Complex64> {
        let t = (z - self.center) / self.scale;
        let mut v = Vec::with_capacity(k + 1);
        v.push(Complex64::new(1.0, 0.0));
        if k >= 1 {
            v.push(t);
        }
        for j in 2..=k {
            let next = match self.family {
                CoordinateFamily::Chebyshev => 2.0 * t * v[j - 1] - v[j - 2],
                CoordinateFamily::Power => t * v[j - 1],
            };
            v.push(next);
        }
        v
    }

    /// log of the leading coefficient (in z) of the degree-j member.
    fn log_leading(&self, j: u32) -> f64 {
        let base = -(j as f64) * self.scale.ln();
        match self.family {
            CoordinateFamily::Chebyshev if j >= 1 => {
                base + (j as f64 - 1.0) * std::f64::consts::LN_2
            }
            _ => base,
        }
    }
}

/// A tensor basis of scaled Chebyshev or power functions, related to the
/// monomials by a change of basis that is triangular in graded order; its
/// log-determinant is known in closed form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StableFrame {
    pub coords: Vec<CoordinateFrame>,
}

impl StableFrame {
    /// Unscaled monomials.
    pub fn monomial(n: usize) -> Self {
        StableFrame {
            coords: vec![
                CoordinateFrame {
                    center: Complex64::new(0.0, 0.0),
                    scale: 1.0,
                    family: CoordinateFamily::Power
                };
                n
            ],
        }
    }

    pub fn for_set(set: &CompactSet) -> Self {
        let coords = set
            .factors()
            .iter()
            .map(|f| {
                let (center, scale, real) = f.coordinate_frame();
                let family = if real {
                    CoordinateFamily::Chebyshev
                } else {
                    CoordinateFamily::Power
                };
                CoordinateFrame {
                    center,
                    scale,
                    family,
                }
            })
            .collect();
        StableFrame { coords }
    }

    /// Frame fitted to the bounding box of a point cloud.
    pub fn fit(points: &[Point]) -> Self {
        let n = points.first().map_or(1, |p| p.dim());
        let coords = (0..n)
            .map(|i| {
                let zs: Vec<Complex64> = points.iter().map(|p| p.0[i]).collect();
                let mag = zs.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1e-300);
                let real = zs.iter().all(|z| z.im.abs() <= 1e-14 * mag);
                if real {
                    let lo = zs.iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
                    let hi = zs.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
                    if hi > lo {
                        return CoordinateFrame {
                            center: Complex64::new(0.5 * (lo + hi), 0.0),
                            scale: 0.5 * (hi - lo),
                            family: CoordinateFamily::Chebyshev,
                        };
                    }
                }
                let c = zs.iter().sum::<Complex64>() / zs.len().max(1) as f64;
                let r = zs.iter().map(|z| (z - c).norm()).fold(0.0, f64::max);
                CoordinateFrame {
                    center: c,
                    scale: if r > 0.0 { r } else { 1.0 },
                    family: CoordinateFamily::Power,
                }
            })
            .collect();
        StableFrame { coords }
    }

    /// `log|det S|` for the change of basis `frame rows = S · monomial rows`.
    pub fn log_det_change(&self, basis: &MonomialBasis) -> f64 {
        basis
            .indices
            .iter()
            .map(|a| {
                a.0.iter()
                    .zip(&self.coords)
                    .map(|(&e, c)| c.log_leading(e))
                    .sum::<f64>()
            })
            .sum()
    }

    fn column(&self, basis: &MonomialBasis, p: &Point) -> Vec<Complex64> {
        let tables: Vec<Vec<Complex64>> = self
            .coords
            .iter()
            .zip(&p.0)
            .map(|(c, &z)| c.values(z, basis.degree))
            .collect();
        basis
            .indices
            .iter()
            .map(|a| {
                a.0.iter()
                    .enumerate()
                    .fold(Complex64::new(1.0, 0.0), |acc, (i, &e)| {
                        acc * tables[i][e as usize]
                    })
            })
            .collect()
    }
}

/// Evaluation in the frame basis; the offset converts log-determinants back
/// to the raw monomial basis.
pub fn evaluate_in_frame(
    basis: &MonomialBasis,
    frame: &StableFrame,
    points: &[Point],
    weight: &Weight,
    k: usize,
) -> Result<EvaluationMatrix> {
    check_points(basis, points)?;
    if frame.coords.len() != basis.dim_ambient {
        return Err(Error::DimensionMismatch {
            expected: basis.dim_ambient,
            got: frame.coords.len(),
        });
    }
    let cols: Vec<Vec<Complex64>> = points.iter().map(|p| frame.column(basis, p)).collect();
    Ok(normalize_columns(
        cols,
        weight_logs(points, weight, k)?,
        basis.size(),
        -frame.log_det_change(basis),
    ))
}

/// Row transform `rows ↦ exp(scale_shift) · lower · rows`.
#[derive(Clone, Debug, PartialEq)]
pub struct RowTransform {
    pub lower: CMat,
    pub scale_shift: f64,
    /// Increment of `basis_logdet_offset` caused by this transform.
    pub offset_increment: f64,
}

impl RowTransform {
    pub fn apply(&self, mat: &EvaluationMatrix) -> EvaluationMatrix {
        EvaluationMatrix {
            mantissa: self.lower.mul(&mat.mantissa),
            log_scale: mat.log_scale.iter().map(|s| s + self.scale_shift).collect(),
            basis_logdet_offset: mat.basis_logdet_offset + self.offset_increment,
        }
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &RowTransform) -> RowTransform {
        RowTransform {
            lower: other.lower.mul(&self.lower),
            scale_shift: self.scale_shift + other.scale_shift,
            offset_increment: self.offset_increment + other.offset_increment,
        }
    }
}

/// Relative size of the smallest diagonal entry of R below which the rows are
/// declared dependent on the mesh.
const RANK_TOL: f64 = 1e-14;

/// Orthonormalizes the rows under `⟨f, g⟩ = Σ_j w_j f(x_j) conj(g(x_j))`.
pub fn orthonormalize(mat: &EvaluationMatrix, mesh_weights: &[f64]) -> Result<EvaluationMatrix> {
    orthonormalize_with_transform(mat, mesh_weights).map(|(m, _)| m)
}

/// As [`orthonormalize`], also returning the applied transform. The transform
/// is lower triangular, so it preserves the graded prefix structure of the basis.
pub fn orthonormalize_with_transform(
    mat: &EvaluationMatrix,
    mesh_weights: &[f64],
) -> Result<(EvaluationMatrix, RowTransform)> {
    let (n, m) = (mat.rows(), mat.cols());
    if mesh_weights.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: mesh_weights.len(),
        });
    }
    if mesh_weights.iter().any(|w| !(*w > 0.0)) {
        return Err(Error::InvalidArgument(
            "mesh weights must be positive".into(),
        ));
    }
    if m < n {
        return Err(Error::RankDeficient(format!(
            "{m} mesh points for {n} basis functions"
        )));
    }
    let shifted: Vec<f64> = mat
        .log_scale
        .iter()
        .zip(mesh_weights)
        .map(|(s, w)| s + 0.5 * w.ln())
        .collect();
    let s_max = shifted.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    // G^T: one row per mesh point
    let gt = CMat::from_fn(m, n, |j, i| {
        mat.mantissa[(i, j)] * (shifted[j] - s_max).exp()
    });
    let r = householder_r(&gt);
    let rmax = (0..n).map(|i| r[(i, i)].re).fold(0.0, f64::max);
    for i in 0..n {
        if !(r[(i, i)].re > RANK_TOL * rmax) {
            return Err(Error::RankDeficient(format!(
                "basis function {i} is dependent on the mesh"
            )));
        }
    }
    let lower = invert_lower(&r.transpose());
    let log_diag: f64 = (0..n).map(|i| r[(i, i)].re.ln()).sum();
    let t = RowTransform {
        lower,
        scale_shift: -s_max,
        offset_increment: n as f64 * s_max + log_diag,
    };
    Ok((t.apply(mat), t))
}

/// Rejects an Arnoldi step whose new direction is this small relative to the
/// vector it came from.
const ARNOLDI_RANK_TOL: f64 = 1e-13;

/// Above this magnitude a recurrence evaluation is rescaled into its log scale.
const RESCALE_AT: f64 = 1e150;

/// One step of the orthonormalizing recurrence:
/// `p_i = (z_coord p_parent - Σ_{j<i} coeffs[j] p_j) / diag`.
#[derive(Clone, Debug, PartialEq)]
struct Step {
    parent: usize,
    coord: usize,
    coeffs: Vec<Complex64>,
    diag: f64,
}

/// Orthonormal basis of the weighted polynomial space on a mesh (uniform mesh
/// weights `1/M`), built by Arnoldi iteration: each basis function is a
/// coordinate times an earlier one, orthogonalized against all earlier ones.
/// The change of basis from monomials is triangular in graded-lex order, so
/// its determinant is known exactly.
#[derive(Clone, Debug)]
pub struct Normalizer {
    pub basis: MonomialBasis,
    pub k: usize,
    pub weight: Weight,
    steps: Vec<Step>,
    /// Largest `-k φ` over the mesh; weights are taken relative to it.
    weight_shift: f64,
    offset: f64,
    /// Orthonormal evaluation on the mesh.
    pub mesh_matrix: EvaluationMatrix,
}

fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| x * y.conj())
        .sum::<Complex64>()
        / a.len() as f64
}

impl Normalizer {
    pub fn new(
        basis: &MonomialBasis,
        mesh_points: &[Point],
        weight: &Weight,
        k: usize,
    ) -> Result<Self> {
        if basis.degree != k {
            return Err(Error::InvalidArgument(format!(
                "basis degree {} differs from k = {k}",
                basis.degree
            )));
        }
        check_points(basis, mesh_points)?;
        let (n, m) = (basis.size(), mesh_points.len());
        if m < n {
            return Err(Error::RankDeficient(format!(
                "{m} mesh points for {n} basis functions"
            )));
        }
        let logs = weight_logs(mesh_points, weight, k)?;
        let shift = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let u: Vec<Complex64> = logs
            .iter()
            .map(|s| Complex64::new((s - shift).exp(), 0.0))
            .collect();
        let h0 = inner(&u, &u).re.sqrt();
        let mut q = vec![u.iter().map(|z| z / h0).collect::<Vec<_>>()];
        let mut steps = vec![Step {
            parent: 0,
            coord: 0,
            coeffs: Vec::new(),
            diag: h0,
        }];
        let mut log_lead = vec![-h0.ln()];
        for i in 1..n {
            let alpha = &basis.indices[i].0;
            let coord = alpha
                .iter()
                .position(|&a| a > 0)
                .expect("nonconstant index");
            let mut pa = alpha.clone();
            pa[coord] -= 1;
            let parent = basis
                .indices
                .iter()
                .position(|b| b.0 == pa)
                .expect("graded basis is closed");
            let mut w: Vec<Complex64> = q[parent]
                .iter()
                .zip(mesh_points)
                .map(|(v, p)| v * p.0[coord])
                .collect();
            let start = inner(&w, &w).re.sqrt();
            let mut coeffs = vec![Complex64::new(0.0, 0.0); i];
            for _ in 0..2 {
                let c: Vec<Complex64> = q.par_iter().map(|qj| inner(&w, qj)).collect();
                for (j, cj) in c.iter().enumerate() {
                    coeffs[j] += cj;
                    for (wl, ql) in w.iter_mut().zip(&q[j]) {
                        *wl -= cj * ql;
                    }
                }
            }
            let diag = inner(&w, &w).re.sqrt();
            if !(diag > ARNOLDI_RANK_TOL * start) {
                return Err(Error::RankDeficient(format!(
                    "basis function {i} is dependent on the mesh"
                )));
            }
            q.push(w.iter().map(|z| z / diag).collect());
            log_lead.push(log_lead[parent] - diag.ln());
            steps.push(Step {
                parent,
                coord,
                coeffs,
                diag,
            });
        }
        let offset = n as f64 * shift - log_lead.iter().sum::<f64>();
        let mut nz = Normalizer {
            basis: basis.clone(),
            k,
            weight: weight.clone(),
            steps,
            weight_shift: shift,
            offset,
            mesh_matrix: EvaluationMatrix {
                mantissa: CMat::zeros(n, 0),
                log_scale: Vec::new(),
                basis_logdet_offset: offset,
            },
        };
        nz.mesh_matrix = nz.columns_for(mesh_points, weight)?;
        Ok(nz)
    }

    /// `raw log|det| = orthonormal log|det| + offset`.
    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// Runs the recurrence at one point; returns values and their log scale.
    fn recurrence(&self, z: &[Complex64]) -> (Vec<Complex64>, f64) {
        let n = self.steps.len();
        let mut v = Vec::with_capacity(n);
        let mut log_scale = 0.0;
        v.push(Complex64::new(1.0 / self.steps[0].diag, 0.0));
        for step in &self.steps[1..] {
            let mut x = v[step.parent] * z[step.coord];
            for (c, vj) in step.coeffs.iter().zip(&v) {
                x -= c * vj;
            }
            v.push(x / step.diag);
            let big = v.last().expect("nonempty").norm();
            if big > RESCALE_AT {
                v.iter_mut().for_each(|y| *y /= big);
                log_scale += big.ln();
            }
        }
        (v, log_scale)
    }

    /// Orthonormal-basis columns at arbitrary points, weighted by `weight`.
    pub fn columns_for(&self, points: &[Point], weight: &Weight) -> Result<EvaluationMatrix> {
        check_points(&self.basis, points)?;
        let logs = weight_logs(points, weight, self.k)?;
        let evals: Vec<(Vec<Complex64>, f64)> =
            points.par_iter().map(|p| self.recurrence(&p.0)).collect();
        let (cols, scales): (Vec<Vec<Complex64>>, Vec<f64>) = evals
            .into_iter()
            .zip(logs)
            .map(|((c, ls), lw)| (c, ls + lw - self.weight_shift))
            .unzip();
        Ok(normalize_columns(
            cols,
            scales,
            self.basis.size(),
            self.offset,
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Lu;

    fn idx(v: &[u32]) -> MultiIndex {
        MultiIndex(v.to_vec())
    }

    #[test]
    fn enumerate_examples() {
        let b = enumerate_basis(2, 2).unwrap();
        assert_eq!(
            b.indices,
            vec![
                idx(&[0, 0]),
                idx(&[0, 1]),
                idx(&[1, 0]),
                idx(&[0, 2]),
                idx(&[1, 1]),
                idx(&[2, 0])
            ]
        );
        let b = enumerate_basis(1, 3).unwrap();
        assert_eq!(b.indices, vec![idx(&[0]), idx(&[1]), idx(&[2]), idx(&[3])]);
        assert_eq!(enumerate_basis(3, 1).unwrap().size(), 4);
    }

    #[test]
    fn basis_size_matches_closed_form() {
        fn binom(n: u64, k: u64) -> u64 {
            (1..=k).fold(1, |acc, i| acc * (n + 1 - i) / i)
        }
        for n in 1..=4 {
            for k in 0..=10 {
                let b = enumerate_basis(n, k).unwrap();
                assert_eq!(b.size() as u64, binom((n + k) as u64, n as u64));
                assert!(b
                    .indices
                    .windows(2)
                    .all(|w| { (w[0].total_degree(), &w[0].0) < (w[1].total_degree(), &w[1].0) }));
            }
        }
        assert_eq!(enumerate_basis(1, 5).unwrap().size(), 6);
    }

    #[test]
    fn basis_size_overflow() {
        assert!(matches!(
            basis_size(200, 1usize << 40),
            Err(Error::BasisOverflow { .. })
        ));
    }

    #[test]
    fn evaluate_examples() {
        let b = enumerate_basis(1, 1).unwrap();
        let m = evaluate(
            &b,
            &[Point::real(0.0), Point::real(1.0)],
            &Weight::zero(),
            1,
        )
        .unwrap();
        let d = m.to_dense();
        let want = [[1.0, 1.0], [0.0, 1.0]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((d[(i, j)] - Complex64::new(want[i][j], 0.0)).norm() < 1e-15);
            }
        }
        assert_eq!(m.basis_logdet_offset, 0.0);

        let b0 = enumerate_basis(1, 0).unwrap();
        let m = evaluate(&b0, &[Point::real(5.0)], &Weight::zero(), 0).unwrap();
        assert!((m.entry(0, 0) - Complex64::new(1.0, 0.0)).norm() < 1e-15);

        let m = evaluate(&b, &[Point::real(1.0)], &Weight::radial_quadratic(1.0), 1).unwrap();
        for i in 0..2 {
            assert!((m.entry(i, 0).re - (-1f64).exp()).abs() < 1e-15);
        }
    }

    #[test]
    fn large_weight_does_not_underflow_in_log_scale() {
        let b = enumerate_basis(1, 40).unwrap();
        let m = evaluate(&b, &[Point::real(3.0)], &Weight::radial_quadratic(10.0), 40).unwrap();
        assert!(m.log_scale[0].is_finite() && m.log_scale[0] < -3000.0);
        assert!(m.mantissa.col(0).iter().any(|z| z.norm() > 0.1));
    }

    #[test]
    fn orthonormalize_examples() {
        // already orthonormal single row
        let b = enumerate_basis(1, 0).unwrap();
        let m = evaluate(
            &b,
            &[Point::real(0.3), Point::real(-0.2)],
            &Weight::zero(),
            0,
        )
        .unwrap();
        let o = orthonormalize(&m, &[0.5, 0.5]).unwrap();
        assert!(o.basis_logdet_offset.abs() < 1e-15);
        assert!((o.entry(0, 0) - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!((o.entry(0, 1) - Complex64::new(1.0, 0.0)).norm() < 1e-15);

        // k = 1 Vandermonde on 3 uniform points of [-1, 1]
        let b = enumerate_basis(1, 1).unwrap();
        let pts = [Point::real(-1.0), Point::real(0.0), Point::real(1.0)];
        let m = evaluate(&b, &pts, &Weight::zero(), 1).unwrap();
        let w = [1.0 / 3.0; 3];
        let o = orthonormalize(&m, &w).unwrap();
        let g = o.gram(&w);
        for i in 0..2 {
            for j in 0..2 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((g[(i, j)] - Complex64::new(want, 0.0)).norm() < 1e-12);
            }
        }
        // identity input: orthonormal again gives itself
        let again = orthonormalize(&o, &w).unwrap();
        assert!((again.basis_logdet_offset - o.basis_logdet_offset).abs() < 1e-14);
        for j in 0..3 {
            for i in 0..2 {
                assert!((again.entry(i, j) - o.entry(i, j)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn orthonormalize_detects_rank_deficiency() {
        let b = enumerate_basis(1, 2).unwrap();
        let pts = [Point::real(0.5), Point::real(0.5), Point::real(-0.5)];
        let m = evaluate(&b, &pts, &Weight::zero(), 2).unwrap();
        assert!(matches!(
            orthonormalize(&m, &[1.0; 3]),
            Err(Error::RankDeficient(_))
        ));
    }

    fn logdet_sub(m: &EvaluationMatrix, cols: &[usize]) -> f64 {
        let sub = m.mantissa.select_columns(cols).transpose();
        Lu::new(&sub).unwrap().log_abs_det() + cols.iter().map(|&j| m.log_scale[j]).sum::<f64>()
    }

    #[test]
    fn offset_consistency_frame_and_orthonormal() {
        let b = enumerate_basis(2, 3).unwrap();
        let pts: Vec<Point> = (0..30)
            .map(|i| {
                let t = i as f64 * 0.37;
                Point(vec![
                    Complex64::new(t.sin(), 0.0),
                    Complex64::new((1.3 * t).cos() * 0.8, 0.0),
                ])
            })
            .collect();
        let w = Weight::radial_quadratic(0.7);
        let raw = evaluate(&b, &pts, &w, 3).unwrap();
        let framed = evaluate_in_frame(&b, &StableFrame::fit(&pts), &pts, &w, 3).unwrap();
        let orth = orthonormalize(&framed, &vec![1.0 / 30.0; 30]).unwrap();
        let cols: Vec<usize> = (0..10).map(|i| 3 * i).collect();
        let r = logdet_sub(&raw, &cols);
        let f = logdet_sub(&framed, &cols) + framed.basis_logdet_offset;
        let o = logdet_sub(&orth, &cols) + orth.basis_logdet_offset;
        assert!((r - f).abs() < 1e-8 * r.abs().max(1.0), "{r} {f}");
        assert!((r - o).abs() < 1e-8 * r.abs().max(1.0), "{r} {o}");
    }

    #[test]
    fn normalizer_is_orthonormal_on_mesh() {
        let set = CompactSet::interval(-2.0, 2.0).unwrap();
        let mesh = crate::geometry::build_mesh(&set, 30, 3).unwrap();
        let b = enumerate_basis(1, 30).unwrap();
        let w = Weight::real_power(1.0, 2);
        let nz = Normalizer::new(&b, &mesh.points, &w, 30).unwrap();
        let m = mesh.len();
        let g = nz.mesh_matrix.gram(&vec![1.0 / m as f64; m]);
        for i in 0..b.size() {
            for j in 0..b.size() {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!(
                    (g[(i, j)] - Complex64::new(want, 0.0)).norm() < 1e-10,
                    "{i} {j} {}",
                    g[(i, j)]
                );
            }
        }
    }
}
