//! Log-modulus of weighted Vandermonde determinants: the objective whose
//! maximizers are Fekete configurations.

use serde::{Deserialize, Serialize};

use crate::basis::{evaluate_in_frame, EvaluationMatrix, MonomialBasis, Normalizer, StableFrame};
use crate::error::{Error, Result};
use crate::geometry::{Point, Weight};
use crate::linalg::{CMat, Lu};

/// An ordered tuple of points of C^n.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Configuration {
    pub points: Vec<Point>,
}

impl Configuration {
    pub fn new(points: Vec<Point>) -> Self {
        Configuration { points }
    }

    pub fn from_reals(xs: &[f64]) -> Self {
        Configuration {
            points: xs.iter().map(|&x| Point::real(x)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    fn has_duplicates(&self) -> bool {
        for (i, p) in self.points.iter().enumerate() {
            if self.points[..i].contains(p) {
                return true;
            }
        }
        false
    }
}

/// Log-modulus of a determinant; `-inf` marks numerical singularity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogDet {
    pub value: f64,
    pub sign_defined: bool,
}

impl LogDet {
    pub fn finite(value: f64) -> Self {
        if value.is_finite() {
            LogDet {
                value,
                sign_defined: true,
            }
        } else {
            Self::neg_infinity()
        }
    }

    pub fn neg_infinity() -> Self {
        LogDet {
            value: f64::NEG_INFINITY,
            sign_defined: false,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.sign_defined
    }

    pub fn shifted(self, by: f64) -> Self {
        if self.sign_defined {
            LogDet::finite(self.value + by)
        } else {
            self
        }
    }
}

/// `Σ log|pivot|` of a partially pivoted LU factorization.
pub fn log_abs_det(square: &CMat) -> Result<LogDet> {
    Ok(LogDet::finite(Lu::new(square)?.log_abs_det()))
}

/// Log-modulus of the determinant of the square submatrix made of the listed
/// columns, including the per-column log scales. Points go in the rows of the
/// factored matrix so that repeated points produce exactly zero pivots.
pub fn submatrix_logdet(m: &EvaluationMatrix, cols: &[usize]) -> LogDet {
    let sub = m.mantissa.select_columns(cols).transpose();
    let ld = Lu::new(&sub).expect("square").log_abs_det();
    LogDet::finite(ld + cols.iter().map(|&j| m.log_scale[j]).sum::<f64>())
}

/// `log|det(b_i(x_j))| - k Σ_j φ(x_j)`.
///
/// Without a normalizer `b_i` are the raw monomials (evaluated through a
/// stabilized frame fitted to the configuration, with the exact change-of-basis
/// correction). With a normalizer `b_i` is its orthonormal basis, and the result
/// is smaller than the raw value by exactly `normalizer.offset()`.
pub fn objective_d(
    config: &Configuration,
    basis: &MonomialBasis,
    weight: &Weight,
    k: usize,
    normalizer: Option<&Normalizer>,
) -> Result<LogDet> {
    if config.len() != basis.size() {
        return Err(Error::SizeMismatch {
            expected: basis.size(),
            got: config.len(),
        });
    }
    if basis.degree != k {
        return Err(Error::InvalidArgument(format!(
            "basis degree {} differs from k = {k}",
            basis.degree
        )));
    }
    if config.has_duplicates() {
        return Ok(LogDet::neg_infinity());
    }
    let cols: Vec<usize> = (0..config.len()).collect();
    match normalizer {
        Some(nz) => {
            if nz.basis != *basis {
                return Err(Error::InvalidArgument(
                    "normalizer built for a different basis".into(),
                ));
            }
            let m = nz.columns_for(&config.points, weight)?;
            Ok(submatrix_logdet(&m, &cols))
        }
        None => {
            let frame = StableFrame::fit(&config.points);
            let m = evaluate_in_frame(basis, &frame, &config.points, weight, k)?;
            Ok(submatrix_logdet(&m, &cols).shifted(m.basis_logdet_offset))
        }
    }
}

/// `F_k = -D / (k N_k)` with `D` computed in the normalizer's orthonormal basis.
pub fn objective_f(
    config: &Configuration,
    basis: &MonomialBasis,
    weight: &Weight,
    k: usize,
    normalizer: &Normalizer,
) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidArgument("F_k needs k >= 1".into()));
    }
    let d = objective_d(config, basis, weight, k, Some(normalizer))?;
    if !d.is_finite() {
        return Err(Error::Degenerate);
    }
    Ok(-d.value / (k as f64 * basis.size() as f64))
}
