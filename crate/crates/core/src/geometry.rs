//! Compact sets of C^n, their discretization meshes, and continuous weights.

use num_complex::Complex64;
use serde::de::{self, Deserializer};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::basis::basis_size;
use crate::error::{Error, Result};

/// Absolute tolerance for boundary comparisons in membership tests.
pub const BOUNDARY_TOL: f64 = 1e-12;

/// Truncation keeps the region where the weight stays within this much of its minimum.
pub const TRUNCATION_MARGIN: f64 = 20.0 * std::f64::consts::LN_10;

/// A point of C^n. Serialized as a list of `[re, im]` pairs, one per coordinate.
#[derive(Clone, Debug, PartialEq)]
pub struct Point(pub Vec<Complex64>);

impl Point {
    pub fn real(x: f64) -> Self {
        Point(vec![Complex64::new(x, 0.0)])
    }

    pub fn complex(re: f64, im: f64) -> Self {
        Point(vec![Complex64::new(re, im)])
    }

    pub fn from_reals(xs: &[f64]) -> Self {
        Point(xs.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

impl From<Complex64> for Point {
    fn from(z: Complex64) -> Self {
        Point(vec![z])
    }
}

impl Serialize for Point {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let pairs: Vec<[f64; 2]> = self.0.iter().map(|z| [z.re, z.im]).collect();
        pairs.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Point {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let pairs: Vec<[f64; 2]> = Vec::deserialize(d)?;
        Ok(Point(
            pairs
                .into_iter()
                .map(|[re, im]| Complex64::new(re, im))
                .collect(),
        ))
    }
}

/// Interval endpoint; JSON accepts numbers or the strings `"inf"` / `"-inf"`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Endpoint(pub f64);

impl Serialize for Endpoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.is_finite() {
            s.serialize_f64(self.0)
        } else if self.0 > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }
}

impl<'de> Deserialize<'de> for Endpoint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(x) => Ok(Endpoint(x)),
            Raw::Str(s) => match s.as_str() {
                "inf" | "+inf" => Ok(Endpoint(f64::INFINITY)),
                "-inf" => Ok(Endpoint(f64::NEG_INFINITY)),
                other => Err(de::Error::custom(format!("bad endpoint {other:?}"))),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum SetKind {
    /// Disjoint real intervals embedded in C.
    IntervalUnion {
        intervals: Vec<[Endpoint; 2]>,
    },
    Circle {
        radius: f64,
    },
    ClosedDisk {
        radius: f64,
    },
    /// Cartesian product of one-dimensional sets.
    Product {
        factors: Vec<CompactSet>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompactSet {
    #[serde(flatten)]
    pub kind: SetKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation_radius: Option<f64>,
}

impl CompactSet {
    pub fn new(kind: SetKind) -> Result<Self> {
        let s = CompactSet {
            kind,
            truncation_radius: None,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn interval(a: f64, b: f64) -> Result<Self> {
        Self::interval_union(&[(a, b)])
    }

    pub fn interval_union(intervals: &[(f64, f64)]) -> Result<Self> {
        Self::new(SetKind::IntervalUnion {
            intervals: intervals
                .iter()
                .map(|&(a, b)| [Endpoint(a), Endpoint(b)])
                .collect(),
        })
    }

    pub fn circle(radius: f64) -> Result<Self> {
        Self::new(SetKind::Circle { radius })
    }

    pub fn disk(radius: f64) -> Result<Self> {
        Self::new(SetKind::ClosedDisk { radius })
    }

    pub fn product(factors: Vec<CompactSet>) -> Result<Self> {
        Self::new(SetKind::Product { factors })
    }

    pub fn with_truncation(mut self, radius: f64) -> Result<Self> {
        self.truncation_radius = Some(radius);
        self.validate()?;
        Ok(self)
    }

    pub fn ambient_dim(&self) -> usize {
        match &self.kind {
            SetKind::Product { factors } => factors.len(),
            _ => 1,
        }
    }

    /// True when some interval has an infinite endpoint.
    pub fn is_unbounded(&self) -> bool {
        match &self.kind {
            SetKind::IntervalUnion { intervals } => intervals
                .iter()
                .any(|[a, b]| !a.0.is_finite() || !b.0.is_finite()),
            SetKind::Product { factors } => factors.iter().any(|f| f.is_unbounded()),
            _ => false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(r) = self.truncation_radius {
            if !(r.is_finite() && r > 0.0) {
                return Err(Error::InvalidSet(format!(
                    "truncation radius {r} must be finite and positive"
                )));
            }
        }
        match &self.kind {
            SetKind::IntervalUnion { intervals } => {
                if intervals.is_empty() {
                    return Err(Error::InvalidSet("empty interval union".into()));
                }
                let mut sorted: Vec<(f64, f64)> =
                    intervals.iter().map(|[a, b]| (a.0, b.0)).collect();
                for &(a, b) in &sorted {
                    if a.is_nan() || b.is_nan() || !(a < b) {
                        return Err(Error::InvalidSet(format!(
                            "interval [{a}, {b}] needs a < b"
                        )));
                    }
                }
                sorted.sort_by(|x, y| x.0.total_cmp(&y.0));
                for w in sorted.windows(2) {
                    if w[1].0 <= w[0].1 {
                        return Err(Error::InvalidSet(
                            "intervals must be pairwise disjoint".into(),
                        ));
                    }
                }
                if self.is_unbounded() && self.truncation_radius.is_none() {
                    return Err(Error::InvalidSet(
                        "unbounded interval needs a truncation radius".into(),
                    ));
                }
            }
            SetKind::Circle { radius } | SetKind::ClosedDisk { radius } => {
                if !(radius.is_finite() && *radius > 0.0) {
                    return Err(Error::InvalidSet(format!(
                        "radius {radius} must be positive"
                    )));
                }
            }
            SetKind::Product { factors } => {
                if factors.is_empty() {
                    return Err(Error::InvalidSet(
                        "product needs at least one factor".into(),
                    ));
                }
                for f in factors {
                    if f.ambient_dim() != 1 {
                        return Err(Error::InvalidSet(
                            "product factors must be one-dimensional".into(),
                        ));
                    }
                    if f.truncation_radius.is_none()
                        && f.is_unbounded()
                        && self.truncation_radius.is_none()
                    {
                        return Err(Error::InvalidSet(
                            "unbounded factor needs a truncation radius".into(),
                        ));
                    }
                    f.validate_factor()?;
                }
            }
        }
        Ok(())
    }

    fn validate_factor(&self) -> Result<()> {
        if self.is_unbounded() && self.truncation_radius.is_none() {
            // truncation is inherited from the product
            let mut t = self.clone();
            t.truncation_radius = Some(1.0);
            return t.validate();
        }
        self.validate()
    }

    /// Fills in the default truncation radius for unbounded sets: the radius
    /// beyond which the weight exceeds its minimum by `20 ln 10`.
    pub fn truncated_for(&self, weight: &Weight) -> Result<CompactSet> {
        if !self.is_unbounded() || self.truncation_radius.is_some() {
            return Ok(self.clone());
        }
        if !(weight.growth_exponent > 0.0) {
            return Err(Error::InvalidWeight(
                "unbounded set needs a weight with positive growth".into(),
            ));
        }
        let n = self.ambient_dim();
        let probe = |r: f64| -> Vec<Point> {
            let mut pts = Vec::new();
            for axis in 0..n {
                for sign in [-1.0, 1.0] {
                    let mut c = vec![Complex64::new(0.0, 0.0); n];
                    c[axis] = Complex64::new(sign * r, 0.0);
                    pts.push(Point(c));
                }
            }
            pts
        };
        let phi_min = {
            let mut m = weight.eval(&Point(vec![Complex64::new(0.0, 0.0); n]))?;
            let mut r = 1e-3;
            while r < 1e6 {
                for p in probe(r) {
                    m = m.min(weight.eval(&p)?);
                }
                r *= 1.25;
            }
            m
        };
        let exceeds = |r: f64| -> Result<bool> {
            for p in probe(r) {
                if weight.eval(&p)? < phi_min + TRUNCATION_MARGIN {
                    return Ok(false);
                }
            }
            Ok(true)
        };
        let mut hi = 1.0;
        while !exceeds(hi)? {
            hi *= 2.0;
            if hi > 1e12 {
                return Err(Error::InvalidWeight(
                    "weight does not grow along the coordinate axes".into(),
                ));
            }
        }
        let mut lo = 0.0;
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if exceeds(mid)? {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let mut out = self.clone();
        out.truncation_radius = Some(hi);
        out.validate()?;
        Ok(out)
    }

    /// Intervals clipped to the truncation ball.
    pub(crate) fn effective_intervals(&self, inherited: Option<f64>) -> Vec<(f64, f64)> {
        let r = self
            .truncation_radius
            .or(inherited)
            .unwrap_or(f64::INFINITY);
        match &self.kind {
            SetKind::IntervalUnion { intervals } => intervals
                .iter()
                .filter_map(|[a, b]| {
                    let (a, b) = (a.0.max(-r), b.0.min(r));
                    (a < b).then_some((a, b))
                })
                .collect(),
            _ => Vec::new(),
        }
    }

    /// Per-coordinate one-dimensional factors, with truncation propagated.
    pub(crate) fn factors(&self) -> Vec<CompactSet> {
        match &self.kind {
            SetKind::Product { factors } => factors
                .iter()
                .map(|f| {
                    let mut f = f.clone();
                    if f.truncation_radius.is_none() {
                        f.truncation_radius = self.truncation_radius.filter(|_| f.is_unbounded());
                    }
                    f
                })
                .collect(),
            _ => vec![self.clone()],
        }
    }

    /// Bounding data for the coordinate: (center, half-width, is_real_interval).
    pub(crate) fn coordinate_frame(&self) -> (Complex64, f64, bool) {
        match &self.kind {
            SetKind::IntervalUnion { .. } => {
                let iv = self.effective_intervals(None);
                let a = iv.iter().map(|x| x.0).fold(f64::INFINITY, f64::min);
                let b = iv.iter().map(|x| x.1).fold(f64::NEG_INFINITY, f64::max);
                (Complex64::new(0.5 * (a + b), 0.0), 0.5 * (b - a), true)
            }
            SetKind::Circle { radius } | SetKind::ClosedDisk { radius } => {
                (Complex64::new(0.0, 0.0), *radius, false)
            }
            SetKind::Product { .. } => unreachable!("frame is per coordinate"),
        }
    }

    pub fn contains(&self, z: &Point) -> Result<bool> {
        if z.dim() != self.ambient_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_dim(),
                got: z.dim(),
            });
        }
        if let Some(r) = self.truncation_radius {
            if z.norm() > r + BOUNDARY_TOL {
                return Ok(false);
            }
        }
        Ok(match &self.kind {
            SetKind::IntervalUnion { intervals } => {
                let w = z.0[0];
                w.im.abs() <= BOUNDARY_TOL
                    && intervals
                        .iter()
                        .any(|[a, b]| w.re >= a.0 - BOUNDARY_TOL && w.re <= b.0 + BOUNDARY_TOL)
            }
            SetKind::Circle { radius } => (z.0[0].norm() - radius).abs() <= BOUNDARY_TOL,
            SetKind::ClosedDisk { radius } => z.0[0].norm() <= radius + BOUNDARY_TOL,
            SetKind::Product { factors } => {
                let mut inside = true;
                for (f, c) in factors.iter().zip(&z.0) {
                    inside &= f.contains(&Point(vec![*c]))?;
                }
                inside
            }
        })
    }

    fn mesh_1d(&self, degree: usize, density: usize) -> Vec<Complex64> {
        let per = density * degree * degree;
        match &self.kind {
            SetKind::IntervalUnion { .. } => {
                let mut pts = Vec::new();
                for (a, b) in self.effective_intervals(None) {
                    for x in chebyshev_lobatto(a, b, per.max(2)) {
                        pts.push(Complex64::new(x, 0.0));
                    }
                }
                pts
            }
            SetKind::Circle { radius } => equispaced_circle(*radius, per),
            SetKind::ClosedDisk { radius } => {
                let rings = density * degree;
                let mut pts = vec![Complex64::new(0.0, 0.0)];
                for i in 1..=rings {
                    let rho = if i == rings {
                        *radius
                    } else {
                        radius * 0.5 * (1.0 - (PI * i as f64 / rings as f64).cos())
                    };
                    pts.extend(equispaced_circle(rho, per));
                }
                pts
            }
            SetKind::Product { .. } => unreachable!("mesh_1d on a product"),
        }
    }
}

/// `m` Chebyshev–Gauss–Lobatto points mapped to `[a, b]`, ascending, endpoints exact.
pub fn chebyshev_lobatto(a: f64, b: f64, m: usize) -> Vec<f64> {
    assert!(m >= 2);
    (0..m)
        .map(|i| {
            if i == 0 {
                a
            } else if i == m - 1 {
                b
            } else {
                let t = -(PI * i as f64 / (m - 1) as f64).cos();
                0.5 * (a + b) + 0.5 * (b - a) * t
            }
        })
        .collect()
}

/// `m` Chebyshev–Gauss points (interior) mapped to `[a, b]`, ascending.
pub fn chebyshev_gauss(a: f64, b: f64, m: usize) -> Vec<f64> {
    (1..=m)
        .map(|i| {
            let t = -(PI * (2 * i - 1) as f64 / (2 * m) as f64).cos();
            0.5 * (a + b) + 0.5 * (b - a) * t
        })
        .collect()
}

pub fn equispaced_circle(radius: f64, m: usize) -> Vec<Complex64> {
    (0..m)
        .map(|j| Complex64::from_polar(radius, 2.0 * PI * j as f64 / m as f64))
        .collect()
}

/// A finite subset of a compact set, used as the search space for Fekete points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mesh {
    pub points: Vec<Point>,
    pub parent: CompactSet,
    pub degree_hint: usize,
}

impl Mesh {
    /// Wraps explicit points, checking membership and cardinality.
    pub fn from_points(parent: CompactSet, points: Vec<Point>, degree: usize) -> Result<Self> {
        for p in &points {
            if !parent.contains(p)? {
                return Err(Error::InvalidArgument(format!(
                    "mesh point {:?} lies outside the set",
                    p.0
                )));
            }
        }
        let needed = basis_size(parent.ambient_dim(), degree)?;
        if points.len() < needed {
            return Err(Error::MeshTooSmall {
                got: points.len(),
                needed,
                degree,
            });
        }
        Ok(Mesh {
            points,
            parent,
            degree_hint: degree,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Deterministic mesh of `set` for polynomial degree `degree`.
///
/// Intervals get `density * k^2` Chebyshev–Lobatto points each, circles
/// `density * k^2` equispaced angles from 0, disks `density * k` rings of
/// `density * k^2` angles plus the center, and products the Cartesian product
/// of their factor meshes.
pub fn build_mesh(set: &CompactSet, degree: usize, density: usize) -> Result<Mesh> {
    if degree < 1 {
        return Err(Error::InvalidArgument(
            "mesh degree must be at least 1".into(),
        ));
    }
    if density < 1 {
        return Err(Error::InvalidArgument(
            "mesh density must be at least 1".into(),
        ));
    }
    set.validate()?;
    let factor_meshes: Vec<Vec<Complex64>> = set
        .factors()
        .iter()
        .map(|f| f.mesh_1d(degree, density))
        .collect();
    let mut points: Vec<Point> = vec![Point(Vec::new())];
    for fm in &factor_meshes {
        let mut next = Vec::with_capacity(points.len() * fm.len());
        for p in &points {
            for z in fm {
                let mut c = p.0.clone();
                c.push(*z);
                next.push(Point(c));
            }
        }
        points = next;
    }
    if set.truncation_radius.is_some() && set.ambient_dim() > 1 {
        let mut kept = Vec::with_capacity(points.len());
        for p in points {
            if set.contains(&p)? {
                kept.push(p);
            }
        }
        points = kept;
    }
    let needed = basis_size(set.ambient_dim(), degree)?;
    if points.len() < needed {
        return Err(Error::MeshTooSmall {
            got: points.len(),
            needed,
            degree,
        });
    }
    Ok(Mesh {
        points,
        parent: set.clone(),
        degree_hint: degree,
    })
}

/// One term `coeff * Π x_i^{p_i}` in the real coordinates
/// `(Re z_1, Im z_1, Re z_2, Im z_2, ...)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RealTerm {
    pub coeff: f64,
    pub powers: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum WeightKind {
    Zero,
    /// `c |z|^2`.
    RadialQuadratic {
        c: f64,
    },
    RealPolynomial {
        terms: Vec<RealTerm>,
    },
    ScaledSum {
        terms: Vec<(f64, Weight)>,
    },
}

/// A continuous weight φ on the ambient space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Weight {
    #[serde(flatten)]
    pub kind: WeightKind,
    #[serde(default)]
    pub growth_exponent: f64,
}

impl Weight {
    pub fn zero() -> Self {
        Weight {
            kind: WeightKind::Zero,
            growth_exponent: 0.0,
        }
    }

    pub fn radial_quadratic(c: f64) -> Self {
        let growth = if c > 0.0 { 2.0 } else { 0.0 };
        Weight {
            kind: WeightKind::RadialQuadratic { c },
            growth_exponent: growth,
        }
    }

    pub fn constant(c: f64) -> Self {
        Self::polynomial(vec![RealTerm {
            coeff: c,
            powers: vec![],
        }])
    }

    pub fn polynomial(terms: Vec<RealTerm>) -> Self {
        Weight {
            kind: WeightKind::RealPolynomial { terms },
            growth_exponent: 0.0,
        }
    }

    /// `coeff * (Re z_1)^power`.
    pub fn real_power(coeff: f64, power: u32) -> Self {
        Self::polynomial(vec![RealTerm {
            coeff,
            powers: vec![power],
        }])
    }

    pub fn scaled_sum(terms: Vec<(f64, Weight)>) -> Self {
        let growth = terms
            .iter()
            .filter(|(s, _)| *s > 0.0)
            .map(|(_, w)| w.growth_exponent)
            .fold(0.0, f64::max);
        Weight {
            kind: WeightKind::ScaledSum { terms },
            growth_exponent: growth,
        }
    }

    pub fn with_growth(mut self, growth_exponent: f64) -> Self {
        self.growth_exponent = growth_exponent;
        self
    }

    /// `self + t * other`.
    pub fn perturbed(&self, t: f64, other: &Weight) -> Weight {
        Weight::scaled_sum(vec![(1.0, self.clone()), (t, other.clone())])
            .with_growth(self.growth_exponent)
    }

    /// `self + c`.
    pub fn shifted(&self, c: f64) -> Weight {
        self.perturbed(1.0, &Weight::constant(c))
    }

    pub fn eval(&self, z: &Point) -> Result<f64> {
        eval_weight(self, z)
    }
}

pub fn eval_weight(w: &Weight, z: &Point) -> Result<f64> {
    Ok(match &w.kind {
        WeightKind::Zero => 0.0,
        WeightKind::RadialQuadratic { c } => c * z.0.iter().map(|c| c.norm_sqr()).sum::<f64>(),
        WeightKind::RealPolynomial { terms } => {
            let mut total = 0.0;
            for t in terms {
                if t.powers.len() > 2 * z.dim() {
                    return Err(Error::DimensionMismatch {
                        expected: 2 * z.dim(),
                        got: t.powers.len(),
                    });
                }
                let mut v = t.coeff;
                for (i, &p) in t.powers.iter().enumerate() {
                    if p > 0 {
                        let c = z.0[i / 2];
                        let x = if i % 2 == 0 { c.re } else { c.im };
                        v *= x.powi(p as i32);
                    }
                }
                total += v;
            }
            total
        }
        WeightKind::ScaledSum { terms } => {
            let mut total = 0.0;
            for (s, inner) in terms {
                total += s * eval_weight(inner, z)?;
            }
            total
        }
    })
}
