//! Two-coordinate potentials h(x, y) on the unit square.
//!
//! Every supported kind is polynomial, so first and mixed derivatives are
//! analytic; a central-difference probe exists for cross-checks and for the
//! experiment code that is contractually finite-difference. The twist
//! certificate samples the mixed partial D2 D1 h on a dense grid and passes
//! only when it is strictly negative everywhere sampled.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Safety factor applied on top of sampled gradient suprema.
pub const LIPSCHITZ_SAFETY: f64 = 1.05;

/// Step for finite-difference probes.
pub const FD_STEP: f64 = 1e-5;

const MIN_SAMPLE_DENSITY: usize = 64;

/// Univariate polynomial, ascending coefficients: c[k] multiplies x^k.
#[derive(Clone, Debug, PartialEq)]
pub struct UnivariatePoly {
    pub coeffs: Vec<f64>,
}

impl UnivariatePoly {
    pub fn new(coeffs: Vec<f64>) -> Self {
        Self { coeffs }
    }

    /// (x - a)^2 as coefficients; the standard single-well shape.
    pub fn well_at(a: f64) -> Self {
        Self::new(vec![a * a, -2.0 * a, 1.0])
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, &c)| k as f64 * c)
            .collect();
        Self { coeffs }
    }
}

/// Bivariate polynomial in the monomial basis. Row-major coefficients:
/// `coeffs[i * (degree + 1) + j]` multiplies x^i y^j.
#[derive(Clone, Debug, PartialEq)]
pub struct BivariatePoly {
    pub degree: usize,
    pub coeffs: Vec<f64>,
}

impl BivariatePoly {
    pub fn new(degree: usize, coeffs: Vec<f64>) -> Result<Self> {
        let want = (degree + 1) * (degree + 1);
        if coeffs.len() != want {
            return Err(Error::InvalidSpec(format!(
                "coeffs must hold {want} entries for degree {degree}, got {}",
                coeffs.len()
            )));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidSpec("coeffs must be finite".into()));
        }
        Ok(Self { degree, coeffs })
    }

    pub fn zero(degree: usize) -> Self {
        Self {
            degree,
            coeffs: vec![0.0; (degree + 1) * (degree + 1)],
        }
    }

    #[inline]
    pub fn coeff(&self, i: usize, j: usize) -> f64 {
        self.coeffs[i * (self.degree + 1) + j]
    }

    pub fn coeff_mut(&mut self, i: usize, j: usize) -> &mut f64 {
        &mut self.coeffs[i * (self.degree + 1) + j]
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        // Horner in x over Horner-in-y row values.
        let d = self.degree;
        let mut acc = 0.0;
        for i in (0..=d).rev() {
            let row = &self.coeffs[i * (d + 1)..(i + 1) * (d + 1)];
            let row_val = row.iter().rev().fold(0.0, |a, &c| a * y + c);
            acc = acc * x + row_val;
        }
        acc
    }

    pub fn d1(&self, x: f64, y: f64) -> f64 {
        let d = self.degree;
        let mut acc = 0.0;
        for i in (1..=d).rev() {
            let row = &self.coeffs[i * (d + 1)..(i + 1) * (d + 1)];
            let row_val = row.iter().rev().fold(0.0, |a, &c| a * y + c);
            acc = acc * x + i as f64 * row_val;
        }
        acc
    }

    pub fn d2(&self, x: f64, y: f64) -> f64 {
        let d = self.degree;
        let mut acc = 0.0;
        for i in (0..=d).rev() {
            let row = &self.coeffs[i * (d + 1)..(i + 1) * (d + 1)];
            let mut row_val = 0.0;
            for j in (1..=d).rev() {
                row_val = row_val * y + j as f64 * row[j];
            }
            acc = acc * x + row_val;
        }
        acc
    }

    pub fn d2d1(&self, x: f64, y: f64) -> f64 {
        let d = self.degree;
        let mut acc = 0.0;
        for i in (1..=d).rev() {
            let row = &self.coeffs[i * (d + 1)..(i + 1) * (d + 1)];
            let mut row_val = 0.0;
            for j in (1..=d).rev() {
                row_val = row_val * y + j as f64 * row[j];
            }
            acc = acc * x + i as f64 * row_val;
        }
        acc
    }

    /// Restriction to the diagonal y = x as a univariate polynomial.
    pub fn diagonal(&self) -> UnivariatePoly {
        let d = self.degree;
        let mut coeffs = vec![0.0; 2 * d + 1];
        for i in 0..=d {
            for j in 0..=d {
                coeffs[i + j] += self.coeff(i, j);
            }
        }
        UnivariatePoly { coeffs }
    }
}

/// A validated potential. Serialization uses the flat config shape
/// (kind / degree / coeffs / base / epsilon) with strict field checking.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpec", into = "RawSpec")]
pub enum PotentialSpec {
    /// h(x, y) = x
    Projection,
    /// h(x, y) = -x y
    Product,
    /// h(x, y) = (x - y)^2
    SquaredDifference,
    /// h(x, y) = (x - y)^2 + (x - 1/2)^2
    SquaredDifferencePlusWell,
    /// Arbitrary bivariate polynomial.
    Polynomial(BivariatePoly),
    /// base + epsilon * well(x); the perturbation depends on the first
    /// coordinate only, so the mixed partial of the base is untouched.
    Perturbed {
        base: Box<PotentialSpec>,
        well: UnivariatePoly,
        epsilon: f64,
    },
}

pub const KIND_PROJECTION: &str = "projection";
pub const KIND_PRODUCT: &str = "product";
pub const KIND_SQUARED_DIFFERENCE: &str = "squared-difference";
pub const KIND_SQUARED_DIFFERENCE_PLUS_WELL: &str = "squared-difference-plus-well";
pub const KIND_POLYNOMIAL: &str = "bivariate-polynomial";
pub const KIND_SUM_OF_TERMS: &str = "sum-of-terms";

/// Wire shape of a potential spec. Unknown fields are rejected outright.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSpec {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coeffs: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<Box<RawSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
}

impl TryFrom<RawSpec> for PotentialSpec {
    type Error = Error;

    fn try_from(raw: RawSpec) -> Result<Self> {
        let builtin = |raw: &RawSpec, spec: PotentialSpec| -> Result<PotentialSpec> {
            if raw.degree.is_some() || raw.coeffs.is_some() || raw.base.is_some() || raw.epsilon.is_some() {
                return Err(Error::InvalidSpec(format!(
                    "kind '{}' takes no extra fields",
                    raw.kind
                )));
            }
            Ok(spec)
        };
        match raw.kind.as_str() {
            KIND_PROJECTION => builtin(&raw, PotentialSpec::Projection),
            KIND_PRODUCT => builtin(&raw, PotentialSpec::Product),
            KIND_SQUARED_DIFFERENCE => builtin(&raw, PotentialSpec::SquaredDifference),
            KIND_SQUARED_DIFFERENCE_PLUS_WELL => {
                builtin(&raw, PotentialSpec::SquaredDifferencePlusWell)
            }
            KIND_POLYNOMIAL => {
                if raw.base.is_some() || raw.epsilon.is_some() {
                    return Err(Error::InvalidSpec(
                        "bivariate-polynomial takes no base or epsilon".into(),
                    ));
                }
                let degree = raw
                    .degree
                    .ok_or_else(|| Error::InvalidSpec("bivariate-polynomial needs a degree".into()))?;
                let coeffs = raw
                    .coeffs
                    .ok_or_else(|| Error::InvalidSpec("bivariate-polynomial needs coeffs".into()))?;
                Ok(PotentialSpec::Polynomial(BivariatePoly::new(degree, coeffs)?))
            }
            KIND_SUM_OF_TERMS => {
                if raw.degree.is_some() {
                    return Err(Error::InvalidSpec(
                        "sum-of-terms carries no degree; coeffs are the well coefficients".into(),
                    ));
                }
                let base = raw
                    .base
                    .ok_or_else(|| Error::InvalidSpec("sum-of-terms needs a base potential".into()))?;
                let coeffs = raw
                    .coeffs
                    .ok_or_else(|| Error::InvalidSpec("sum-of-terms needs well coeffs".into()))?;
                if coeffs.is_empty() || coeffs.iter().any(|c| !c.is_finite()) {
                    return Err(Error::InvalidSpec("well coeffs must be nonempty and finite".into()));
                }
                let epsilon = raw
                    .epsilon
                    .ok_or_else(|| Error::InvalidSpec("sum-of-terms needs epsilon".into()))?;
                if !epsilon.is_finite() || epsilon < 0.0 {
                    return Err(Error::InvalidSpec(format!(
                        "epsilon must be finite and >= 0, got {epsilon}"
                    )));
                }
                Ok(PotentialSpec::Perturbed {
                    base: Box::new(PotentialSpec::try_from(*base)?),
                    well: UnivariatePoly::new(coeffs),
                    epsilon,
                })
            }
            other => Err(Error::InvalidSpec(format!("unknown kind '{other}'"))),
        }
    }
}

impl From<PotentialSpec> for RawSpec {
    fn from(spec: PotentialSpec) -> Self {
        let bare = |kind: &str| RawSpec {
            kind: kind.to_string(),
            degree: None,
            coeffs: None,
            base: None,
            epsilon: None,
        };
        match spec {
            PotentialSpec::Projection => bare(KIND_PROJECTION),
            PotentialSpec::Product => bare(KIND_PRODUCT),
            PotentialSpec::SquaredDifference => bare(KIND_SQUARED_DIFFERENCE),
            PotentialSpec::SquaredDifferencePlusWell => bare(KIND_SQUARED_DIFFERENCE_PLUS_WELL),
            PotentialSpec::Polynomial(p) => RawSpec {
                kind: KIND_POLYNOMIAL.to_string(),
                degree: Some(p.degree),
                coeffs: Some(p.coeffs),
                base: None,
                epsilon: None,
            },
            PotentialSpec::Perturbed { base, well, epsilon } => RawSpec {
                kind: KIND_SUM_OF_TERMS.to_string(),
                degree: None,
                coeffs: Some(well.coeffs),
                base: Some(Box::new(RawSpec::from(*base))),
                epsilon: Some(epsilon),
            },
        }
    }
}

fn check_domain(x: f64, y: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x) || !(0.0..=1.0).contains(&y) {
        return Err(Error::OutOfDomain { x, y });
    }
    Ok(())
}

impl PotentialSpec {
    pub fn kind_name(&self) -> &'static str {
        match self {
            PotentialSpec::Projection => KIND_PROJECTION,
            PotentialSpec::Product => KIND_PRODUCT,
            PotentialSpec::SquaredDifference => KIND_SQUARED_DIFFERENCE,
            PotentialSpec::SquaredDifferencePlusWell => KIND_SQUARED_DIFFERENCE_PLUS_WELL,
            PotentialSpec::Polynomial(_) => KIND_POLYNOMIAL,
            PotentialSpec::Perturbed { .. } => KIND_SUM_OF_TERMS,
        }
    }

    /// Evaluate h(x, y). Arguments must lie in the unit square.
    pub fn eval(&self, x: f64, y: f64) -> Result<f64> {
        check_domain(x, y)?;
        Ok(self.eval_raw(x, y))
    }

    /// Unchecked evaluation. All kinds are polynomial, so values outside the
    /// square are well defined; only finite-difference stencils straddling the
    /// boundary use this directly.
    pub(crate) fn eval_raw(&self, x: f64, y: f64) -> f64 {
        match self {
            PotentialSpec::Projection => x,
            PotentialSpec::Product => -x * y,
            PotentialSpec::SquaredDifference => (x - y) * (x - y),
            PotentialSpec::SquaredDifferencePlusWell => {
                (x - y) * (x - y) + (x - 0.5) * (x - 0.5)
            }
            PotentialSpec::Polynomial(p) => p.eval(x, y),
            PotentialSpec::Perturbed { base, well, epsilon } => {
                base.eval_raw(x, y) + epsilon * well.eval(x)
            }
        }
    }

    /// Analytic partial derivative in the first argument.
    pub fn d1(&self, x: f64, y: f64) -> Result<f64> {
        check_domain(x, y)?;
        Ok(self.d1_raw(x, y))
    }

    fn d1_raw(&self, x: f64, y: f64) -> f64 {
        match self {
            PotentialSpec::Projection => 1.0,
            PotentialSpec::Product => -y,
            PotentialSpec::SquaredDifference => 2.0 * (x - y),
            PotentialSpec::SquaredDifferencePlusWell => 2.0 * (x - y) + 2.0 * (x - 0.5),
            PotentialSpec::Polynomial(p) => p.d1(x, y),
            PotentialSpec::Perturbed { base, well, epsilon } => {
                base.d1_raw(x, y) + epsilon * well.derivative().eval(x)
            }
        }
    }

    /// Analytic partial derivative in the second argument.
    pub fn d2(&self, x: f64, y: f64) -> Result<f64> {
        check_domain(x, y)?;
        Ok(self.d2_raw(x, y))
    }

    fn d2_raw(&self, x: f64, y: f64) -> f64 {
        match self {
            PotentialSpec::Projection => 0.0,
            PotentialSpec::Product => -x,
            PotentialSpec::SquaredDifference => -2.0 * (x - y),
            PotentialSpec::SquaredDifferencePlusWell => -2.0 * (x - y),
            PotentialSpec::Polynomial(p) => p.d2(x, y),
            PotentialSpec::Perturbed { base, .. } => base.d2_raw(x, y),
        }
    }

    /// Analytic mixed partial D2 D1 h.
    pub fn mixed_partial(&self, x: f64, y: f64) -> Result<f64> {
        check_domain(x, y)?;
        Ok(self.mixed_raw(x, y))
    }

    fn mixed_raw(&self, x: f64, y: f64) -> f64 {
        match self {
            PotentialSpec::Projection => 0.0,
            PotentialSpec::Product => -1.0,
            PotentialSpec::SquaredDifference => -2.0,
            PotentialSpec::SquaredDifferencePlusWell => -2.0,
            PotentialSpec::Polynomial(p) => p.d2d1(x, y),
            PotentialSpec::Perturbed { base, .. } => base.mixed_raw(x, y),
        }
    }

    /// Central-difference mixed partial, the fallback/cross-check probe.
    pub fn mixed_fd(&self, x: f64, y: f64) -> f64 {
        let h = FD_STEP;
        (self.eval_raw(x + h, y + h) - self.eval_raw(x + h, y - h)
            - self.eval_raw(x - h, y + h)
            + self.eval_raw(x - h, y - h))
            / (4.0 * h * h)
    }

    /// Everything here is polynomial; expose that form for coefficient-space
    /// experiments.
    pub fn to_polynomial(&self) -> BivariatePoly {
        match self {
            PotentialSpec::Projection => {
                let mut p = BivariatePoly::zero(1);
                *p.coeff_mut(1, 0) = 1.0;
                p
            }
            PotentialSpec::Product => {
                let mut p = BivariatePoly::zero(1);
                *p.coeff_mut(1, 1) = -1.0;
                p
            }
            PotentialSpec::SquaredDifference => {
                let mut p = BivariatePoly::zero(2);
                *p.coeff_mut(2, 0) = 1.0;
                *p.coeff_mut(1, 1) = -2.0;
                *p.coeff_mut(0, 2) = 1.0;
                p
            }
            PotentialSpec::SquaredDifferencePlusWell => {
                let mut p = PotentialSpec::SquaredDifference.to_polynomial();
                *p.coeff_mut(0, 0) += 0.25;
                *p.coeff_mut(1, 0) += -1.0;
                *p.coeff_mut(2, 0) += 1.0;
                p
            }
            PotentialSpec::Polynomial(p) => p.clone(),
            PotentialSpec::Perturbed { base, well, epsilon } => {
                let b = base.to_polynomial();
                let degree = b.degree.max(well.coeffs.len().saturating_sub(1));
                let mut p = BivariatePoly::zero(degree);
                for i in 0..=b.degree {
                    for j in 0..=b.degree {
                        *p.coeff_mut(i, j) += b.coeff(i, j);
                    }
                }
                for (k, &c) in well.coeffs.iter().enumerate() {
                    *p.coeff_mut(k, 0) += epsilon * c;
                }
                p
            }
        }
    }
}

/// Outcome of sampling the mixed partial on a density x density grid.
#[derive(Clone, Debug, PartialEq)]
pub struct TwistCertificate {
    /// True iff the sampled mixed partial is strictly negative everywhere.
    pub passed: bool,
    pub max_mixed_partial: f64,
    pub sample_density: usize,
    /// Signed distance of the sampled maximum below zero; positive iff passed.
    pub margin: f64,
}

/// Gradient supremum estimates with the safety factor applied.
#[derive(Clone, Debug, PartialEq)]
pub struct LipschitzBound {
    pub l_planar: f64,
    /// Constant for the shift-space metric; the planar constant converts with
    /// a factor of two.
    pub l_shift: f64,
}

fn unit_samples(density: usize) -> impl Iterator<Item = f64> {
    let step = 1.0 / (density - 1) as f64;
    (0..density).map(move |i| if i + 1 == density { 1.0 } else { i as f64 * step })
}

fn require_density(density: usize) -> Result<()> {
    if density < MIN_SAMPLE_DENSITY {
        return Err(Error::Invalid(format!(
            "sample density must be at least {MIN_SAMPLE_DENSITY}, got {density}"
        )));
    }
    Ok(())
}

/// Sample D2 D1 h on a density x density grid and certify strict negativity.
pub fn certify_twist(spec: &PotentialSpec, density: usize) -> Result<TwistCertificate> {
    require_density(density)?;
    let mut max = f64::NEG_INFINITY;
    for x in unit_samples(density) {
        for y in unit_samples(density) {
            let m = spec.mixed_raw(x, y);
            if m > max {
                max = m;
            }
        }
    }
    Ok(TwistCertificate {
        passed: max < 0.0,
        max_mixed_partial: max,
        sample_density: density,
        margin: -max,
    })
}

/// Sampled gradient supremum times the safety factor, plus the shift-space
/// constant (twice the planar one).
pub fn lipschitz_bound(spec: &PotentialSpec, density: usize) -> Result<LipschitzBound> {
    require_density(density)?;
    let mut sup = 0.0f64;
    for x in unit_samples(density) {
        for y in unit_samples(density) {
            let gx = spec.d1_raw(x, y);
            let gy = spec.d2_raw(x, y);
            let norm = gx.hypot(gy);
            if norm > sup {
                sup = norm;
            }
        }
    }
    let l_planar = sup * LIPSCHITZ_SAFETY;
    Ok(LipschitzBound {
        l_planar,
        l_shift: 2.0 * l_planar,
    })
}

/// base + epsilon * well(x). The well depends on the first coordinate only.
pub fn perturb(base: &PotentialSpec, well: UnivariatePoly, epsilon: f64) -> Result<PotentialSpec> {
    if !epsilon.is_finite() || epsilon < 0.0 {
        return Err(Error::InvalidSpec(format!(
            "epsilon must be finite and >= 0, got {epsilon}"
        )));
    }
    if well.coeffs.is_empty() || well.coeffs.iter().any(|c| !c.is_finite()) {
        return Err(Error::InvalidSpec("well coeffs must be nonempty and finite".into()));
    }
    Ok(PotentialSpec::Perturbed {
        base: Box::new(base.clone()),
        well,
        epsilon,
    })
}

/// Sampled diagonal g(a) = h(a, a) on a uniform grid with `density` points.
pub fn diag_profile(spec: &PotentialSpec, density: usize) -> Result<Vec<(f64, f64)>> {
    if density < 2 {
        return Err(Error::Invalid(format!(
            "diagonal profile needs at least 2 samples, got {density}"
        )));
    }
    let step = 1.0 / (density - 1) as f64;
    Ok((0..density)
        .map(|i| {
            let a = if i + 1 == density { 1.0 } else { i as f64 * step };
            (a, spec.eval_raw(a, a))
        })
        .collect())
}
