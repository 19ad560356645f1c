use std::path::{Path, PathBuf};

use fekete_core::diagnostics::LemmaInstanceResult;
use fekete_core::{
    arcsine_measure, concave_lemma_suite, derivative_check, empirical_measure, energy_minimize_1d,
    find_fekete, kolmogorov_distance_1d, moment_distance, transfinite_diameter,
    uniform_circle_measure, Certainty, DerivativeReport, DiameterEstimate, DiscreteMeasure,
    FrostmanReport, Point, Projection, SearchReport, SetKind, WeightKind,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, Format};
use crate::error::{CliError, CliResult};
use crate::output::{ensure_dir, points_table, write_json, write_text, Table};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Fekete,
    Equidistribution,
    Diameter,
    Verify,
}

/// Runs `command` and returns the summary lines to print.
pub fn run(command: Command, cfg: &ExperimentConfig, out: &Path) -> CliResult<Vec<String>> {
    cfg.validate()?;
    let out = ensure_dir(out)?;
    match command {
        Command::Fekete => cmd_fekete(cfg, &out),
        Command::Equidistribution => cmd_equidistribution(cfg, &out),
        Command::Diameter => cmd_diameter(cfg, &out),
        Command::Verify => cmd_verify(cfg, &out),
    }
}

fn file(out: &Path, name: String) -> PathBuf {
    out.join(name)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeketeFile {
    pub k: usize,
    pub n_points: usize,
    pub mesh_size: usize,
    pub certainty: Certainty,
    pub report: SearchReport,
}

pub fn cmd_fekete(cfg: &ExperimentConfig, out: &Path) -> CliResult<Vec<String>> {
    let opts = cfg.search_options();
    let files: Vec<FeketeFile> = cfg
        .degrees
        .par_iter()
        .map(|&k| {
            let run = find_fekete(&cfg.set, &cfg.weight, k, &opts).map_err(CliError::search(k))?;
            let f = FeketeFile {
                k,
                n_points: run.report.config.len(),
                mesh_size: run.mesh.len(),
                certainty: run.certainty,
                report: run.report,
            };
            if cfg.wants(Format::Json) {
                write_json(&file(out, format!("fekete_k{k}.json")), &f)?;
            }
            if cfg.wants(Format::Csv) {
                write_text(
                    &file(out, format!("fekete_k{k}_points.csv")),
                    &points_table(&f.report.config.points).to_csv(),
                )?;
            }
            Ok(f)
        })
        .collect::<CliResult<_>>()?;
    Ok(files
        .iter()
        .map(|f| {
            format!(
                "k={} N_k={} objective={:.12e} sweeps={} mesh={}",
                f.k, f.n_points, f.report.objective.value, f.report.iterations, f.mesh_size
            )
        })
        .collect())
}

/// The equilibrium measure the Fekete measures are compared against.
pub struct Reference {
    pub kind: String,
    pub measure: DiscreteMeasure,
    pub projection: Option<Projection>,
    pub frostman: Option<FrostmanReport>,
}

fn product_arcsine(
    factors: &[(f64, f64)],
    per_axis: usize,
) -> fekete_core::Result<DiscreteMeasure> {
    let mut nodes = vec![Point(Vec::new())];
    for &(a, b) in factors {
        let line = arcsine_measure(a, b, per_axis)?;
        nodes = nodes
            .iter()
            .flat_map(|p| {
                line.nodes.iter().map(move |q| {
                    let mut c = p.0.clone();
                    c.push(q.0[0]);
                    Point(c)
                })
            })
            .collect();
    }
    DiscreteMeasure::uniform(nodes)
}

fn single_interval(kind: &SetKind) -> Option<(f64, f64)> {
    match kind {
        SetKind::IntervalUnion { intervals } if intervals.len() == 1 => {
            let (a, b) = (intervals[0][0].0, intervals[0][1].0);
            (a.is_finite() && b.is_finite()).then_some((a, b))
        }
        _ => None,
    }
}

/// Closed forms for `φ = 0` on an interval, a circle or a product of
/// intervals; the one-dimensional energy minimizer otherwise.
pub fn reference_for(cfg: &ExperimentConfig) -> CliResult<Reference> {
    let r = &cfg.reference;
    let unweighted = matches!(cfg.weight.kind, WeightKind::Zero);
    let closed = |kind: &str, m: fekete_core::Result<DiscreteMeasure>, projection| {
        let measure = m.map_err(|e| CliError::Config(e.to_string()))?;
        Ok(Reference {
            kind: kind.into(),
            measure,
            projection,
            frostman: None,
        })
    };
    if unweighted {
        if let Some((a, b)) = single_interval(&cfg.set.kind) {
            return closed(
                "arcsine",
                arcsine_measure(a, b, r.closed_form_nodes),
                Some(Projection::Real),
            );
        }
        if let SetKind::Circle { radius } = cfg.set.kind {
            return closed(
                "uniform_circle",
                uniform_circle_measure(radius, r.closed_form_nodes),
                Some(Projection::Angle),
            );
        }
        if let SetKind::Product { factors } = &cfg.set.kind {
            let ivs: Option<Vec<(f64, f64)>> =
                factors.iter().map(|f| single_interval(&f.kind)).collect();
            if let Some(ivs) = ivs {
                let per_axis = ((r.closed_form_nodes as f64)
                    .powf(1.0 / ivs.len() as f64)
                    .round() as usize)
                    .max(2);
                return closed("product_arcsine", product_arcsine(&ivs, per_axis), None);
            }
        }
    }
    let projection = match cfg.set.kind {
        SetKind::IntervalUnion { .. } => Projection::Real,
        SetKind::Circle { .. } => Projection::Angle,
        _ => {
            return Err(CliError::Config(
                "no reference equilibrium measure for this set and weight".into(),
            ))
        }
    };
    let rep = energy_minimize_1d(&cfg.set, &cfg.weight, r.nodes, r.max_iters, r.tol)
        .map_err(|e| CliError::Config(format!("reference measure: {e}")))?;
    Ok(Reference {
        kind: "energy_minimizer".into(),
        measure: rep.measure.clone(),
        projection: Some(projection),
        frostman: Some(rep),
    })
}

/// Distribution functions of both measures at every jump point.
pub fn cdf_curves(mu: &DiscreteMeasure, nu: &DiscreteMeasure, axis: Projection) -> Table {
    let project = |m: &DiscreteMeasure| {
        let mut v: Vec<(f64, f64)> = m
            .nodes
            .iter()
            .zip(&m.masses)
            .map(|(p, w)| (axis.apply(p.0[0]), w / m.total_mass))
            .collect();
        v.sort_by(|a, b| a.0.total_cmp(&b.0));
        v
    };
    let (a, b) = (project(mu), project(nu));
    let mut xs: Vec<f64> = a.iter().chain(&b).map(|p| p.0).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    let mut t = Table::new(&["x", "empirical", "reference"]);
    let (mut i, mut j, mut fa, mut fb) = (0, 0, 0.0, 0.0);
    for x in xs {
        while i < a.len() && a[i].0 <= x {
            fa += a[i].1;
            i += 1;
        }
        while j < b.len() && b[j].0 <= x {
            fb += b[j].1;
            j += 1;
        }
        t.push(vec![x, fa, fb]);
    }
    t
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquidistributionRow {
    pub k: usize,
    pub n_points: usize,
    pub objective: f64,
    pub kolmogorov: Option<f64>,
    pub moment_distance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquidistributionFile {
    pub reference: String,
    pub moment_degree: usize,
    pub rows: Vec<EquidistributionRow>,
}

pub fn cmd_equidistribution(cfg: &ExperimentConfig, out: &Path) -> CliResult<Vec<String>> {
    let reference = reference_for(cfg)?;
    if let Some(rep) = &reference.frostman {
        if cfg.wants(Format::Json) {
            write_json(&out.join("frostman.json"), rep)?;
        }
        if cfg.wants(Format::Csv) {
            write_text(&out.join("reference_measure.csv"), &rep.measure.to_csv())?;
        }
    }
    let opts = cfg.search_options();
    let deg = cfg.reference.moment_degree;
    let rows: Vec<EquidistributionRow> = cfg
        .degrees
        .par_iter()
        .map(|&k| {
            let run = find_fekete(&cfg.set, &cfg.weight, k, &opts).map_err(CliError::search(k))?;
            let mu = empirical_measure(&run.report.config).map_err(CliError::search(k))?;
            let kolmogorov = match reference.projection {
                Some(p) => Some(
                    kolmogorov_distance_1d(&mu, &reference.measure, p)
                        .map_err(CliError::search(k))?,
                ),
                None => None,
            };
            if let (Some(p), true) = (reference.projection, cfg.wants(Format::Csv)) {
                write_text(
                    &out.join(format!("cdf_k{k}.csv")),
                    &cdf_curves(&mu, &reference.measure, p).to_csv(),
                )?;
            }
            Ok(EquidistributionRow {
                k,
                n_points: mu.masses.len(),
                objective: run.report.objective.value,
                kolmogorov,
                moment_distance: moment_distance(&mu, &reference.measure, deg)
                    .map_err(CliError::search(k))?,
            })
        })
        .collect::<CliResult<_>>()?;
    let mut table = Table::new(&["k", "N_k", "kolmogorov", "moment_distance"]);
    for r in &rows {
        table.push(vec![
            r.k as f64,
            r.n_points as f64,
            r.kolmogorov.unwrap_or(f64::NAN),
            r.moment_distance,
        ]);
    }
    let summary = rows
        .iter()
        .map(|r| {
            let ks = r
                .kolmogorov
                .map_or("n/a".to_string(), |d| format!("{d:.6}"));
            format!(
                "k={} N_k={} kolmogorov={ks} moment_distance={:.6} reference={}",
                r.k, r.n_points, r.moment_distance, reference.kind
            )
        })
        .collect();
    if cfg.wants(Format::Csv) {
        write_text(&out.join("equidistribution.csv"), &table.to_csv())?;
    }
    if cfg.wants(Format::Json) {
        write_json(
            &out.join("equidistribution.json"),
            EquidistributionFile {
                reference: reference.kind,
                moment_degree: deg,
                rows,
            },
        )?;
    }
    Ok(summary)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiameterFile {
    pub rows: Vec<DiameterEstimate>,
}

pub fn cmd_diameter(cfg: &ExperimentConfig, out: &Path) -> CliResult<Vec<String>> {
    let opts = cfg.search_options();
    let rows: Vec<DiameterEstimate> = cfg
        .degrees
        .par_iter()
        .map(|&k| {
            transfinite_diameter(&cfg.set, &cfg.weight, k, &opts).map_err(CliError::search(k))
        })
        .collect::<CliResult<_>>()?;
    let mut table = Table::new(&["k", "sup_logdet", "d_k_exponent", "d_k_pairs"]);
    for r in &rows {
        table.push(vec![
            r.k as f64,
            r.sup_logdet,
            r.d_k_exponent,
            r.d_k_pairs.unwrap_or(f64::NAN),
        ]);
    }
    let summary = rows
        .iter()
        .map(|r| {
            let pairs = r
                .d_k_pairs
                .map_or("n/a".to_string(), |d| format!("{d:.12}"));
            format!(
                "k={} sup_logdet={:.12e} d_k_exponent={:.12} d_k_pairs={pairs}",
                r.k, r.sup_logdet, r.d_k_exponent
            )
        })
        .collect();
    if cfg.wants(Format::Csv) {
        write_text(&out.join("diameter.csv"), &table.to_csv())?;
    }
    if cfg.wants(Format::Json) {
        write_json(&out.join("diameter.json"), DiameterFile { rows })?;
    }
    Ok(summary)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DerivativeFile {
    pub reference: String,
    pub max_residual: f64,
    pub max_frozen_residual: f64,
    pub report: DerivativeReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LemmaFile {
    pub instances: usize,
    pub seed: u64,
    pub tol: f64,
    pub passed: usize,
    pub failed: usize,
    pub all_passed: bool,
    pub max_final_gap: f64,
    pub results: Vec<LemmaInstanceResult>,
}

pub fn cmd_verify(cfg: &ExperimentConfig, out: &Path) -> CliResult<Vec<String>> {
    let reference = reference_for(cfg)?;
    let v = &cfg.verify;
    let opts = cfg.search_options();
    let files: Vec<DerivativeFile> = cfg
        .degrees
        .par_iter()
        .map(|&k| {
            let report = derivative_check(
                &cfg.set,
                &cfg.weight,
                &v.perturbation,
                k,
                &v.t_values,
                &reference.measure,
                &opts,
            )
            .map_err(CliError::search(k))?;
            let f = DerivativeFile {
                reference: reference.kind.clone(),
                max_residual: report.residuals.iter().cloned().fold(0.0, f64::max),
                max_frozen_residual: report.frozen_residuals.iter().cloned().fold(0.0, f64::max),
                report,
            };
            if cfg.wants(Format::Json) {
                write_json(&out.join(format!("derivative_k{k}.json")), &f)?;
            }
            if cfg.wants(Format::Csv) {
                let r = &f.report;
                let mut t = Table::new(&[
                    "t",
                    "finite_difference",
                    "predicted",
                    "residual",
                    "frozen_difference",
                    "frozen_expected",
                    "frozen_residual",
                ]);
                for i in 0..r.t_values.len() {
                    t.push(vec![
                        r.t_values[i],
                        r.finite_differences[i],
                        r.predicted,
                        r.residuals[i],
                        r.frozen_differences[i],
                        r.frozen_expected,
                        r.frozen_residuals[i],
                    ]);
                }
                write_text(&out.join(format!("derivative_k{k}.csv")), &t.to_csv())?;
            }
            Ok(f)
        })
        .collect::<CliResult<_>>()?;
    let lemma = concave_lemma_suite(v.lemma_instances, v.lemma_seed, v.lemma_tol)
        .map_err(CliError::search(0))?;
    let lemma_file = LemmaFile {
        instances: v.lemma_instances,
        seed: lemma.seed,
        tol: lemma.tol,
        passed: lemma.passed,
        failed: lemma.failed,
        all_passed: lemma.all_passed(),
        max_final_gap: lemma.max_final_gap,
        results: lemma.results,
    };
    if cfg.wants(Format::Csv) {
        let mut t = Table::new(&["instance", "final_gap", "empirical_rate", "passed"]);
        for (i, r) in lemma_file.results.iter().enumerate() {
            t.push(vec![
                i as f64,
                r.final_gap,
                r.empirical_rate.unwrap_or(f64::NAN),
                f64::from(u8::from(r.passed)),
            ]);
        }
        write_text(&out.join("lemma.csv"), &t.to_csv())?;
    }
    let mut summary: Vec<String> = files
        .iter()
        .map(|f| {
            format!(
                "k={} predicted={:.6} max_residual={:.3e} max_frozen_residual={:.3e}",
                f.report.k, f.report.predicted, f.max_residual, f.max_frozen_residual
            )
        })
        .collect();
    summary.push(format!(
        "lemma: {}/{} passed, max final gap {:.3e}",
        lemma_file.passed, lemma_file.instances, lemma_file.max_final_gap
    ));
    if cfg.wants(Format::Json) {
        write_json(&out.join("lemma.json"), lemma_file)?;
    }
    Ok(summary)
}
