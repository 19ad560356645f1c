//! Measurable consequences of equidistribution: distances between measures,
//! transfinite diameter estimates, the first-variation identity of the
//! normalized energy, and a randomized check of the concave-limit lemma.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::equilibrium::{equilibrium_mass, DiscreteMeasure};
use crate::error::{Error, Result};
use crate::fekete::{find_fekete, Certainty, SearchOptions};
use crate::geometry::{CompactSet, Point, Weight};
use crate::vandermonde::{objective_f, Configuration};

/// Uniform probability measure on the configuration; repeated points are
/// merged into one node carrying their combined mass.
pub fn empirical_measure(config: &Configuration) -> Result<DiscreteMeasure> {
    if config.is_empty() {
        return Err(Error::EmptyMeasure);
    }
    let unit = 1.0 / config.len() as f64;
    let mut nodes: Vec<Point> = Vec::new();
    let mut masses: Vec<f64> = Vec::new();
    for p in &config.points {
        match nodes.iter().position(|q| q == p) {
            Some(i) => masses[i] += unit,
            None => {
                nodes.push(p.clone());
                masses.push(unit);
            }
        }
    }
    DiscreteMeasure::new(nodes, masses)
}

/// Real line onto which a one-dimensional measure is projected.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Projection {
    Real,
    Imag,
    /// Argument in `[0, 2π)`.
    Angle,
}

impl Projection {
    pub fn apply(self, z: Complex64) -> f64 {
        match self {
            Projection::Real => z.re,
            Projection::Imag => z.im,
            Projection::Angle => z.arg().rem_euclid(2.0 * PI),
        }
    }
}

fn projected(mu: &DiscreteMeasure, axis: Projection) -> Result<Vec<(f64, f64)>> {
    if mu.is_empty() {
        return Err(Error::EmptyMeasure);
    }
    if mu.dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: mu.dim(),
        });
    }
    let mut v: Vec<(f64, f64)> = mu
        .nodes
        .iter()
        .zip(&mu.masses)
        .map(|(p, m)| (axis.apply(p.0[0]), *m))
        .collect();
    v.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(v)
}

/// `sup_x |F_μ(x) - F_ν(x)|` of the projected distribution functions. Both
/// are normalized by their total mass.
pub fn kolmogorov_distance_1d(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    axis: Projection,
) -> Result<f64> {
    let a = projected(mu, axis)?;
    let b = projected(nu, axis)?;
    let (ta, tb) = (mu.total_mass, nu.total_mass);
    let (mut i, mut j) = (0, 0);
    let (mut fa, mut fb) = (0.0, 0.0);
    let mut d: f64 = 0.0;
    while i < a.len() || j < b.len() {
        let x = match (a.get(i), b.get(j)) {
            (Some(p), Some(q)) => p.0.min(q.0),
            (Some(p), None) => p.0,
            (None, Some(q)) => q.0,
            (None, None) => unreachable!(),
        };
        while i < a.len() && a[i].0 == x {
            fa += a[i].1;
            i += 1;
        }
        while j < b.len() && b[j].0 == x {
            fb += b[j].1;
            j += 1;
        }
        d = d.max((fa / ta - fb / tb).abs());
    }
    Ok(d)
}

/// Exponent pairs `(α, β)` with `|α| + |β| ≤ max_degree` in `n` variables.
fn moment_exponents(n: usize, max_degree: usize) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for _ in 0..2 * n {
        out = out
            .into_iter()
            .flat_map(|e: Vec<u32>| {
                let used: u32 = e.iter().sum();
                (0..=max_degree as u32 - used).map(move |p| {
                    let mut f = e.clone();
                    f.push(p);
                    f
                })
            })
            .collect();
    }
    out
}

fn moment(mu: &DiscreteMeasure, e: &[u32]) -> Complex64 {
    mu.nodes
        .iter()
        .zip(&mu.masses)
        .map(|(p, m)| {
            let mut v = Complex64::new(*m, 0.0);
            for (l, z) in p.0.iter().enumerate() {
                v *= z.powu(e[2 * l]) * z.conj().powu(e[2 * l + 1]);
            }
            v
        })
        .sum()
}

/// Largest difference of the moments `∫ z^α conj(z)^β` with
/// `|α| + |β| ≤ max_degree`.
pub fn moment_distance(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    max_degree: usize,
) -> Result<f64> {
    if mu.dim() != nu.dim() {
        return Err(Error::DimensionMismatch {
            expected: mu.dim(),
            got: nu.dim(),
        });
    }
    Ok(moment_exponents(mu.dim(), max_degree)
        .iter()
        .map(|e| (moment(mu, e) - moment(nu, e)).norm())
        .fold(0.0, f64::max))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiameterEstimate {
    pub k: usize,
    /// Best found log-modulus of the weighted monomial Vandermonde determinant.
    pub sup_logdet: f64,
    /// `exp((n+1)!/(n k^{n+1}) · sup_logdet)`.
    pub d_k_exponent: f64,
    /// `exp(sup_logdet / C(N, 2))` in one variable.
    pub d_k_pairs: Option<f64>,
    pub method_certainty: Certainty,
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// Converts a maximal log-determinant into both diameter normalizations.
pub fn diameter_from_logdet(
    n: usize,
    k: usize,
    sup_logdet: f64,
    method_certainty: Certainty,
) -> DiameterEstimate {
    let exponent = factorial(n + 1) / (n as f64 * (k as f64).powi(n as i32 + 1));
    let d_k_pairs = (n == 1 && k >= 2).then(|| {
        let pairs = ((k + 1) * k / 2) as f64;
        (sup_logdet / pairs).exp()
    });
    DiameterEstimate {
        k,
        sup_logdet,
        d_k_exponent: (exponent * sup_logdet).exp(),
        d_k_pairs,
        method_certainty,
    }
}

pub fn transfinite_diameter(
    set: &CompactSet,
    weight: &Weight,
    k: usize,
    opts: &SearchOptions,
) -> Result<DiameterEstimate> {
    if k == 0 {
        return Err(Error::InvalidArgument("diameter needs k >= 1".into()));
    }
    let run = find_fekete(set, weight, k, opts)?;
    Ok(diameter_from_logdet(
        set.ambient_dim(),
        k,
        run.report.objective.value,
        run.certainty,
    ))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DerivativeReport {
    pub k: usize,
    pub t_values: Vec<f64>,
    /// `(F_k(φ + t v) - F_k(φ)) / t` with the configuration re-optimized at each weight.
    pub finite_differences: Vec<f64>,
    /// `M^{-1} ∫ v dμ` against the reference measure.
    pub predicted: f64,
    pub residuals: Vec<f64>,
    /// Difference quotients with the configuration frozen at the base optimum.
    pub frozen_differences: Vec<f64>,
    /// `Σ v(x_j) / N` over the frozen configuration.
    pub frozen_expected: f64,
    pub frozen_residuals: Vec<f64>,
}

/// First variation of `F_k` along `v`, compared with the integral of `v`
/// against the reference equilibrium measure. All values of `F_k` use the
/// orthonormal basis of the base weight.
pub fn derivative_check(
    set: &CompactSet,
    phi: &Weight,
    v: &Weight,
    k: usize,
    t_values: &[f64],
    reference: &DiscreteMeasure,
    opts: &SearchOptions,
) -> Result<DerivativeReport> {
    if t_values.iter().any(|t| *t == 0.0 || !t.is_finite()) {
        return Err(Error::InvalidArgument(
            "t values must be finite and nonzero".into(),
        ));
    }
    let base = find_fekete(set, phi, k, opts)?;
    let p0 = &base.report.config;
    let f = |config: &Configuration, w: &Weight| {
        objective_f(config, &base.basis, w, k, &base.normalizer)
    };
    let f0 = f(p0, phi)?;
    let n = set.ambient_dim();
    let predicted = reference.integrate(|p| v.eval(p).unwrap_or(f64::NAN)) / equilibrium_mass(n);
    if !predicted.is_finite() {
        return Err(Error::InvalidWeight(
            "perturbation is not finite on the reference support".into(),
        ));
    }
    let frozen_expected = p0
        .points
        .iter()
        .map(|p| v.eval(p))
        .collect::<Result<Vec<f64>>>()?
        .iter()
        .sum::<f64>()
        / p0.len() as f64;
    let rows: Vec<(f64, f64)> = t_values
        .par_iter()
        .map(|&t| {
            let w = phi.perturbed(t, v);
            let run = find_fekete(set, &w, k, opts)?;
            let fd = (f(&run.report.config, &w)? - f0) / t;
            let frozen = (f(p0, &w)? - f0) / t;
            Ok((fd, frozen))
        })
        .collect::<Result<_>>()?;
    let (finite_differences, frozen_differences): (Vec<f64>, Vec<f64>) = rows.into_iter().unzip();
    Ok(DerivativeReport {
        k,
        t_values: t_values.to_vec(),
        residuals: finite_differences
            .iter()
            .map(|d| (d - predicted).abs())
            .collect(),
        frozen_residuals: frozen_differences
            .iter()
            .map(|d| (d - frozen_expected).abs())
            .collect(),
        finite_differences,
        predicted,
        frozen_differences,
        frozen_expected,
    })
}

/// `a t² + b t + c`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Quadratic {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl Quadratic {
    pub fn eval(&self, t: f64) -> f64 {
        (self.a * t + self.b) * t + self.c
    }

    pub fn derivative(&self, t: f64) -> f64 {
        2.0 * self.a * t + self.b
    }

    pub fn is_concave(&self) -> bool {
        self.a <= 0.0
    }

    fn add(self, other: Quadratic, scale: f64) -> Quadratic {
        Quadratic {
            a: self.a + scale * other.a,
            b: self.b + scale * other.b,
            c: self.c + scale * other.c,
        }
    }
}

/// A limit function `g` and the sequence `f_k = g + ε_k h_k + c_k` at the
/// scheduled `k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LemmaInstance {
    pub g: Quadratic,
    /// `(k, f_k)` in increasing `k`.
    pub sequence: Vec<(u64, Quadratic)>,
    /// Half-width of the interval on which `f_k ≥ g` is enforced.
    pub half_width: f64,
}

/// Degrees at which every lemma instance is evaluated.
pub const LEMMA_SCHEDULE: [u64; 13] =
    [1, 2, 5, 10, 20, 50, 100, 200, 500, 1000, 2000, 5000, 10_000];

/// Grid size of the pointwise self-test.
const SELF_TEST_POINTS: usize = 101;

/// Step of the central difference used for `f_k'(0)`.
const DIFF_STEP: f64 = 1e-4;

impl LemmaInstance {
    /// `f_k = g` for every scheduled `k`.
    pub fn constant(g: Quadratic) -> Self {
        LemmaInstance {
            g,
            sequence: LEMMA_SCHEDULE.iter().map(|&k| (k, g)).collect(),
            half_width: 1.0,
        }
    }

    /// `f_k = g + ε_k h_k + c_k` with `h_k` concave and
    /// `c_k = ε_k · max_{|t| ≤ T} (-h_k)`, so that `f_k ≥ g` on `[-T, T]`.
    pub fn perturbed(g: Quadratic, h: &[Quadratic], eps: &[f64], half_width: f64) -> Self {
        let sequence = LEMMA_SCHEDULE
            .iter()
            .zip(h.iter().zip(eps))
            .map(|(&k, (hk, &e))| {
                // -h_k is convex, so its maximum on [-T, T] is at an endpoint
                let deficit = (-hk.eval(half_width)).max(-hk.eval(-half_width)).max(0.0);
                (
                    k,
                    g.add(*hk, e).add(
                        Quadratic {
                            a: 0.0,
                            b: 0.0,
                            c: deficit,
                        },
                        e,
                    ),
                )
            })
            .collect();
        LemmaInstance {
            g,
            sequence,
            half_width,
        }
    }

    /// Concavity, `f_k ≥ g` on the grid, `f_k(0) → g(0)`, and the tangent
    /// inequality `f_k(0) + f_k'(0) t ≥ f_k(t)` on the grid.
    pub fn self_test(&self) -> Result<()> {
        let slack = 1e-12;
        for (k, f) in &self.sequence {
            if !f.is_concave() {
                return Err(Error::GeneratorBug(format!("f_{k} is not concave")));
            }
            for i in 0..SELF_TEST_POINTS {
                let t = grid_point(i, self.half_width);
                let scale = 1.0 + f.eval(t).abs();
                if f.eval(t) < self.g.eval(t) - slack * scale {
                    return Err(Error::GeneratorBug(format!("f_{k}({t}) < g({t})")));
                }
                if f.eval(0.0) + f.derivative(0.0) * t < f.eval(t) - slack * scale {
                    return Err(Error::GeneratorBug(format!(
                        "tangent inequality fails for f_{k} at {t}"
                    )));
                }
            }
        }
        if let Some((k, f)) = self.sequence.last() {
            if (f.eval(0.0) - self.g.eval(0.0)).abs() > 1e-3 {
                return Err(Error::GeneratorBug(format!("f_{k}(0) is far from g(0)")));
            }
        }
        Ok(())
    }

    /// `|f_k'(0) - g'(0)|` along the schedule, by central differences.
    pub fn derivative_gaps(&self) -> Vec<f64> {
        let gd = self.g.derivative(0.0);
        self.sequence
            .iter()
            .map(|(_, f)| ((f.eval(DIFF_STEP) - f.eval(-DIFF_STEP)) / (2.0 * DIFF_STEP) - gd).abs())
            .collect()
    }
}

fn grid_point(i: usize, half_width: f64) -> f64 {
    -half_width + 2.0 * half_width * i as f64 / (SELF_TEST_POINTS - 1) as f64
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LemmaInstanceResult {
    pub instance: LemmaInstance,
    pub gaps: Vec<f64>,
    pub final_gap: f64,
    /// Least-squares slope of `ln gap` against `ln k` over the nonzero gaps.
    pub empirical_rate: Option<f64>,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub seed: u64,
    pub tol: f64,
    pub passed: usize,
    pub failed: usize,
    pub max_final_gap: f64,
    pub results: Vec<LemmaInstanceResult>,
}

impl LemmaReport {
    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }
}

fn empirical_rate(ks: &[u64], gaps: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = ks
        .iter()
        .zip(gaps)
        .filter(|(_, g)| **g > 0.0)
        .map(|(k, g)| ((*k as f64).ln(), g.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(sxy / sxx)
}

/// Runs the self-test and the derivative gaps of one instance.
pub fn check_lemma_instance(instance: LemmaInstance, tol: f64) -> Result<LemmaInstanceResult> {
    instance.self_test()?;
    let gaps = instance.derivative_gaps();
    let ks: Vec<u64> = instance.sequence.iter().map(|(k, _)| *k).collect();
    let final_gap = *gaps
        .last()
        .ok_or_else(|| Error::GeneratorBug("empty sequence".into()))?;
    Ok(LemmaInstanceResult {
        empirical_rate: empirical_rate(&ks, &gaps),
        passed: final_gap <= tol,
        final_gap,
        gaps,
        instance,
    })
}

/// Random concave instances: `g` a concave quadratic, `h_k` concave
/// quadratics with bounded coefficients, `ε_k = k^{-2}`.
pub fn random_lemma_instance(rng: &mut ChaCha8Rng) -> LemmaInstance {
    let g = Quadratic {
        a: -rng.gen_range(0.0..2.0),
        b: rng.gen_range(-2.0..2.0),
        c: rng.gen_range(-1.0..1.0),
    };
    let h: Vec<Quadratic> = LEMMA_SCHEDULE
        .iter()
        .map(|_| Quadratic {
            a: -rng.gen_range(0.0..3.0),
            b: rng.gen_range(-1.0..1.0),
            c: rng.gen_range(-1.0..1.0),
        })
        .collect();
    let eps: Vec<f64> = LEMMA_SCHEDULE
        .iter()
        .map(|&k| (k as f64).powi(-2))
        .collect();
    LemmaInstance::perturbed(g, &h, &eps, rng.gen_range(0.5..2.0))
}

pub fn concave_lemma_suite(instance_count: usize, rng_seed: u64, tol: f64) -> Result<LemmaReport> {
    if instance_count == 0 {
        return Err(Error::InvalidArgument("need at least one instance".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let instances: Vec<LemmaInstance> = (0..instance_count)
        .map(|_| random_lemma_instance(&mut rng))
        .collect();
    let results: Vec<LemmaInstanceResult> = instances
        .into_iter()
        .map(|i| check_lemma_instance(i, tol))
        .collect::<Result<_>>()?;
    let passed = results.iter().filter(|r| r.passed).count();
    Ok(LemmaReport {
        seed: rng_seed,
        tol,
        passed,
        failed: results.len() - passed,
        max_final_gap: results.iter().map(|r| r.final_gap).fold(0.0, f64::max),
        results,
    })
}
