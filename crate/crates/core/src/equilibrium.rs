//! Reference equilibrium measures: closed forms for an interval and a circle,
//! and a fixed-node discrete energy minimizer for one-dimensional sets with an
//! external field.
//!
//! The discrete energy is `Q(w) = w·A w + 2 Σ w_i φ(x_i)` on the probability
//! simplex, with `A_ij = -ln|x_i - x_j|` off the diagonal. The diagonal holds
//! the self-energy of a uniform distribution over the node's cell, which keeps
//! `Q` convex on the simplex.

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    chebyshev_gauss, chebyshev_lobatto, equispaced_circle, CompactSet, Point, SetKind, Weight,
};

/// Tolerance on `Σ masses = total_mass`.
pub const MASS_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscreteMeasure {
    pub nodes: Vec<Point>,
    pub masses: Vec<f64>,
    pub total_mass: f64,
}

impl DiscreteMeasure {
    /// Validates nonnegativity and sets `total_mass` to the sum of the masses.
    pub fn new(nodes: Vec<Point>, masses: Vec<f64>) -> Result<Self> {
        if nodes.len() != masses.len() {
            return Err(Error::SizeMismatch {
                expected: nodes.len(),
                got: masses.len(),
            });
        }
        if nodes.is_empty() {
            return Err(Error::EmptyMeasure);
        }
        if masses.iter().any(|m| !(*m >= 0.0) || !m.is_finite()) {
            return Err(Error::InvalidArgument(
                "masses must be finite and nonnegative".into(),
            ));
        }
        let total_mass = masses.iter().sum();
        Ok(DiscreteMeasure {
            nodes,
            masses,
            total_mass,
        })
    }

    pub fn uniform(nodes: Vec<Point>) -> Result<Self> {
        let m = nodes.len();
        Self::new(nodes, vec![1.0 / m as f64; m])
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.nodes.first().map_or(0, Point::dim)
    }

    pub fn is_probability(&self) -> bool {
        self.masses.iter().all(|m| *m >= 0.0)
            && (self.masses.iter().sum::<f64>() - 1.0).abs() <= MASS_TOL
            && (self.total_mass - 1.0).abs() <= MASS_TOL
    }

    /// `∫ f dμ`.
    pub fn integrate(&self, mut f: impl FnMut(&Point) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.masses)
            .map(|(p, m)| m * f(p))
            .sum()
    }

    /// CSV with header `re_1,im_1,...,re_n,im_n,mass`.
    pub fn to_csv(&self) -> String {
        let n = self.dim();
        let mut out = String::new();
        let header: Vec<String> = (1..=n)
            .flat_map(|i| [format!("re_{i}"), format!("im_{i}")])
            .collect();
        out.push_str(&header.join(","));
        out.push_str(if n > 0 { ",mass\n" } else { "mass\n" });
        for (p, m) in self.nodes.iter().zip(&self.masses) {
            for z in &p.0 {
                let _ = write!(out, "{:.16e},{:.16e},", z.re, z.im);
            }
            let _ = writeln!(out, "{m:.16e}");
        }
        out
    }

    /// Parses the output of [`DiscreteMeasure::to_csv`].
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines.next().ok_or(Error::EmptyMeasure)?;
        let cols = header.split(',').count();
        if cols % 2 != 1 {
            return Err(Error::InvalidArgument(format!(
                "bad measure header: {header}"
            )));
        }
        let n = (cols - 1) / 2;
        let mut nodes = Vec::new();
        let mut masses = Vec::new();
        for line in lines.filter(|l| !l.trim().is_empty()) {
            let v: Vec<f64> = line
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse::<f64>()
                        .map_err(|e| Error::InvalidArgument(format!("{e}: {s}")))
                })
                .collect::<Result<_>>()?;
            if v.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    got: v.len(),
                });
            }
            nodes.push(Point(
                (0..n)
                    .map(|i| Complex64::new(v[2 * i], v[2 * i + 1]))
                    .collect(),
            ));
            masses.push(v[2 * n]);
        }
        Self::new(nodes, masses)
    }
}

/// Arcsine distribution of `[a, b]`, quantized as equal masses at the
/// Chebyshev–Gauss points.
pub fn arcsine_measure(a: f64, b: f64, m: usize) -> Result<DiscreteMeasure> {
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "need a < b, got [{a}, {b}]"
        )));
    }
    if m < 2 {
        return Err(Error::InvalidArgument(
            "arcsine quantization needs m >= 2".into(),
        ));
    }
    DiscreteMeasure::uniform(
        chebyshev_gauss(a, b, m)
            .into_iter()
            .map(Point::real)
            .collect(),
    )
}

pub fn uniform_circle_measure(r: f64, m: usize) -> Result<DiscreteMeasure> {
    if !(r > 0.0) || m == 0 {
        return Err(Error::InvalidArgument(format!(
            "need r > 0 and m >= 1, got r = {r}, m = {m}"
        )));
    }
    DiscreteMeasure::uniform(
        equispaced_circle(r, m)
            .into_iter()
            .map(|z| Point(vec![z]))
            .collect(),
    )
}

/// Total mass of the equilibrium measure in the classical setting.
pub fn equilibrium_mass(_n: usize) -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrostmanReport {
    pub measure: DiscreteMeasure,
    /// `U(x_i) + φ(x_i)` at every node.
    pub potential_values: Vec<f64>,
    pub frostman_constant: f64,
    pub max_violation_on_support: f64,
    pub max_violation_off_support: f64,
    pub iterations: usize,
    /// Conditional-gradient gap `∇Q·(w - e_min)` at termination.
    pub duality_gap: f64,
    pub converged: bool,
    /// `Q` after every iteration, starting with the initial uniform masses.
    #[serde(skip)]
    pub objective_trace: Vec<f64>,
}

/// Nodes and cell lengths for a one-dimensional set.
fn nodes_1d(set: &CompactSet, weight: &Weight, m: usize) -> Result<(Vec<Point>, Vec<f64>)> {
    match &set.kind {
        SetKind::IntervalUnion { .. } => {
            let set = set.truncated_for(weight)?;
            let iv = set.effective_intervals(None);
            if iv.is_empty() {
                return Err(Error::InvalidSet(
                    "no interval left after truncation".into(),
                ));
            }
            let total: f64 = iv.iter().map(|(a, b)| b - a).sum();
            let mut counts: Vec<usize> = iv
                .iter()
                .map(|(a, b)| ((b - a) / total * m as f64).round() as usize)
                .collect();
            counts.iter_mut().for_each(|c| *c = (*c).max(2));
            let mut nodes = Vec::new();
            let mut cells = Vec::new();
            for ((a, b), c) in iv.iter().zip(counts) {
                let edges = chebyshev_lobatto(*a, *b, c + 1);
                nodes.extend(chebyshev_gauss(*a, *b, c).into_iter().map(Point::real));
                cells.extend(edges.windows(2).map(|e| e[1] - e[0]));
            }
            Ok((nodes, cells))
        }
        SetKind::Circle { radius } => {
            let nodes = equispaced_circle(*radius, m)
                .into_iter()
                .map(|z| Point(vec![z]))
                .collect();
            Ok((nodes, vec![2.0 * PI * radius / m as f64; m]))
        }
        _ => Err(Error::InvalidSet(
            "energy minimization needs an interval union or a circle".into(),
        )),
    }
}

/// Minimizes the discrete weighted energy over the simplex by pairwise
/// conditional-gradient steps with exact line search: each step moves mass
/// from the supported node of largest potential to the node of smallest
/// potential. Stops once the spread `max_{w_i > 0} P_i - min_i P_i` of the
/// weighted potential `P = U + φ` is at most `tol`.
pub fn energy_minimize_1d(
    set: &CompactSet,
    weight: &Weight,
    m: usize,
    max_iters: usize,
    tol: f64,
) -> Result<FrostmanReport> {
    if set.ambient_dim() != 1 {
        return Err(Error::InvalidSet(
            "energy minimization needs a one-dimensional set".into(),
        ));
    }
    if m < 10 {
        return Err(Error::InvalidArgument(format!(
            "need at least 10 nodes, got {m}"
        )));
    }
    let (nodes, cells) = nodes_1d(set, weight, m)?;
    let m = nodes.len();
    let z: Vec<Complex64> = nodes.iter().map(|p| p.0[0]).collect();
    let phi: Vec<f64> = nodes
        .iter()
        .map(|p| weight.eval(p))
        .collect::<Result<_>>()?;
    // row-major kernel
    let kernel: Vec<f64> = (0..m)
        .into_par_iter()
        .flat_map_iter(|i| {
            let (z, cells) = (&z, &cells);
            (0..m).map(move |j| {
                if i == j {
                    1.5 - cells[i].ln()
                } else {
                    -(z[i] - z[j]).norm().ln()
                }
            })
        })
        .collect();
    for i in 0..m {
        for j in 0..i {
            if !kernel[i * m + j].is_finite() {
                return Err(Error::CoincidentNodes(i));
            }
        }
    }
    let row = |i: usize| &kernel[i * m..(i + 1) * m];

    let mut w = vec![1.0 / m as f64; m];
    let mut u: Vec<f64> = (0..m)
        .into_par_iter()
        .map(|i| row(i).iter().zip(&w).map(|(a, b)| a * b).sum())
        .collect();
    let energy = |w: &[f64], u: &[f64]| -> f64 {
        w.iter()
            .zip(u.iter().zip(&phi))
            .map(|(wi, (ui, pi))| wi * (ui + 2.0 * pi))
            .sum()
    };
    let mut trace = vec![energy(&w, &u)];
    let mut iterations = 0;
    let mut converged = false;
    loop {
        let p: Vec<f64> = u.iter().zip(&phi).map(|(a, b)| a + b).collect();
        let (s, pmin) =
            p.iter().enumerate().fold(
                (0, f64::INFINITY),
                |acc, (i, &v)| if v < acc.1 { (i, v) } else { acc },
            );
        let (a, pmax) = p.iter().enumerate().filter(|(i, _)| w[*i] > 0.0).fold(
            (0, f64::NEG_INFINITY),
            |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc },
        );
        if pmax - pmin <= tol {
            converged = true;
            break;
        }
        if iterations >= max_iters {
            break;
        }
        iterations += 1;
        // Q(w + γ(e_s - e_a)) = Q - 2γ(P_a - P_s) + γ² (A_ss + A_aa - 2 A_sa)
        let curvature = row(s)[s] + row(a)[a] - 2.0 * row(s)[a];
        let descent = pmax - pmin;
        let gamma = if curvature > 0.0 {
            (descent / curvature).min(w[a])
        } else {
            w[a]
        };
        w[s] += gamma;
        w[a] = if gamma >= w[a] { 0.0 } else { w[a] - gamma };
        let (rs, ra) = (row(s), row(a));
        for i in 0..m {
            u[i] += gamma * (rs[i] - ra[i]);
        }
        trace.push(energy(&w, &u));
    }
    // fold in rounding from the updates
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= total);
    let u: Vec<f64> = (0..m)
        .into_par_iter()
        .map(|i| row(i).iter().zip(&w).map(|(a, b)| a * b).sum())
        .collect();
    let p: Vec<f64> = u.iter().zip(&phi).map(|(a, b)| a + b).collect();
    let f: f64 = w.iter().zip(&p).map(|(a, b)| a * b).sum();
    let on = p
        .iter()
        .zip(&w)
        .filter(|(_, wi)| **wi > 0.0)
        .map(|(pi, _)| (pi - f).abs())
        .fold(0.0, f64::max);
    let pmin = p.iter().cloned().fold(f64::INFINITY, f64::min);
    let off = p
        .iter()
        .zip(&w)
        .filter(|(_, wi)| **wi == 0.0)
        .map(|(pi, _)| (f - pi).max(0.0))
        .fold(0.0, f64::max);
    Ok(FrostmanReport {
        measure: DiscreteMeasure::new(nodes, w)?,
        potential_values: p,
        frostman_constant: f,
        max_violation_on_support: on,
        max_violation_off_support: off,
        iterations,
        duality_gap: 2.0 * (f - pmin),
        converged,
        objective_trace: trace,
    })
}
