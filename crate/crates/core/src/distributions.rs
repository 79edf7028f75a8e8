//! Parametric job-size families.
//!
//! Every family samples by inverting its survival function, so one uniform
//! draw yields exactly one job size. Moments of the minimum of `d` replicas
//! have closed forms for all families here; the quadrature routes
//! ([`JobSizeDistribution::expected_min_by_quadrature`] and
//! [`JobSizeDistribution::second_moment_min_by_quadrature`]) integrate the
//! survival function directly and serve as an independent cross-check.

use std::fmt;

use rand::Rng;
use statrs::function::gamma::gamma;
use thiserror::Error;

use crate::quadrature::{self, QuadratureError, Tolerance};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DistributionError {
    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("survival function evaluated at negative x = {0}")]
    NegativeArgument(f64),
    #[error("number of replicas must be at least 1")]
    ZeroReplicas,
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

/// Distribution of a single replica size `X`.
///
/// Construct through the validating constructors; the operations assume the
/// parameter invariants hold (all parameters positive, Pareto index > 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum JobSizeDistribution {
    Exponential {
        rate: f64,
    },
    /// Survival `exp(-(x / scale)^shape)`.
    Weibull {
        shape: f64,
        scale: f64,
    },
    /// Survival `(min / x)^index` for `x >= min`.
    Pareto {
        index: f64,
        min: f64,
    },
    Deterministic {
        value: f64,
    },
}

/// Joint structure of the `d` replica sizes of one job.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ReplicaDependence {
    /// Each replica size is an independent draw.
    Iid,
    /// All replicas share a single draw.
    Identical,
}

/// Aging class of a job-size distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AgingClass {
    /// New better than used: `F(x+y) <= F(x) F(y)` for survival `F`.
    Nbu,
    /// New worse than used: `F(x+y) >= F(x) F(y)`.
    Nwu,
    /// Both NBU and NWU (the memoryless case).
    ExponentialBoundary,
    /// Neither inequality holds everywhere.
    Neither,
}

/// A moment that may diverge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Moment {
    Finite(f64),
    Infinite,
}

impl Moment {
    pub fn finite(self) -> Option<f64> {
        match self {
            Moment::Finite(v) => Some(v),
            Moment::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Moment::Infinite)
    }
}

impl fmt::Display for Moment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Moment::Finite(v) => write!(f, "{v}"),
            Moment::Infinite => f.write_str("inf"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub mean: f64,
    pub second_moment: Moment,
    /// Squared coefficient of variation `Var[X] / E[X]^2`.
    pub cv_squared: Moment,
}

fn positive(name: &'static str, value: f64) -> Result<f64, DistributionError> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(DistributionError::InvalidParameter {
            name,
            value,
            reason: "must be positive and finite",
        })
    }
}

impl JobSizeDistribution {
    pub fn exponential(rate: f64) -> Result<Self, DistributionError> {
        Ok(Self::Exponential {
            rate: positive("rate", rate)?,
        })
    }

    pub fn weibull(shape: f64, scale: f64) -> Result<Self, DistributionError> {
        Ok(Self::Weibull {
            shape: positive("shape", shape)?,
            scale: positive("scale", scale)?,
        })
    }

    pub fn pareto(index: f64, min: f64) -> Result<Self, DistributionError> {
        let min = positive("min", min)?;
        if !(index.is_finite() && index > 1.0) {
            return Err(DistributionError::InvalidParameter {
                name: "index",
                value: index,
                reason: "must exceed 1 for a finite mean",
            });
        }
        Ok(Self::Pareto { index, min })
    }

    pub fn deterministic(value: f64) -> Result<Self, DistributionError> {
        Ok(Self::Deterministic {
            value: positive("value", value)?,
        })
    }

    /// Re-checks the parameter invariants of an already constructed value.
    pub fn validate(&self) -> Result<(), DistributionError> {
        match *self {
            Self::Exponential { rate } => Self::exponential(rate).map(|_| ()),
            Self::Weibull { shape, scale } => Self::weibull(shape, scale).map(|_| ()),
            Self::Pareto { index, min } => Self::pareto(index, min).map(|_| ()),
            Self::Deterministic { value } => Self::deterministic(value).map(|_| ()),
        }
    }

    /// Short family name used in reports.
    pub fn family(&self) -> &'static str {
        match self {
            Self::Exponential { .. } => "exponential",
            Self::Weibull { .. } => "weibull",
            Self::Pareto { .. } => "pareto",
            Self::Deterministic { .. } => "deterministic",
        }
    }

    /// Value `x` with survival probability `u`, for `u` in `(0, 1]`.
    pub fn from_uniform(&self, u: f64) -> f64 {
        match *self {
            Self::Exponential { rate } => -u.ln() / rate,
            Self::Weibull { shape, scale } => scale * (-u.ln()).powf(1.0 / shape),
            Self::Pareto { index, min } => min * u.powf(-1.0 / index),
            Self::Deterministic { value } => value,
        }
    }

    /// Draws one job size, consuming exactly one `f64` from `rng`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        // random::<f64>() is in [0, 1); flip it so ln never sees zero.
        let u = 1.0 - rng.random::<f64>();
        self.from_uniform(u)
    }

    /// Complementary CDF `P(X > x)`.
    pub fn survival(&self, x: f64) -> Result<f64, DistributionError> {
        if x < 0.0 || x.is_nan() {
            return Err(DistributionError::NegativeArgument(x));
        }
        Ok(self.survival_unchecked(x))
    }

    fn survival_unchecked(&self, x: f64) -> f64 {
        match *self {
            Self::Exponential { rate } => (-rate * x).exp(),
            Self::Weibull { shape, scale } => (-(x / scale).powf(shape)).exp(),
            Self::Pareto { index, min } => {
                if x <= min {
                    1.0
                } else {
                    (min / x).powf(index)
                }
            }
            Self::Deterministic { value } => {
                if x < value {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            Self::Exponential { rate } => 1.0 / rate,
            Self::Weibull { shape, scale } => scale * gamma(1.0 + 1.0 / shape),
            Self::Pareto { index, min } => min * index / (index - 1.0),
            Self::Deterministic { value } => value,
        }
    }

    pub fn second_moment(&self) -> Moment {
        match *self {
            Self::Exponential { rate } => Moment::Finite(2.0 / (rate * rate)),
            Self::Weibull { shape, scale } => Moment::Finite(scale * scale * gamma(1.0 + 2.0 / shape)),
            Self::Pareto { index, min } => {
                if index > 2.0 {
                    Moment::Finite(min * min * index / (index - 2.0))
                } else {
                    Moment::Infinite
                }
            }
            Self::Deterministic { value } => Moment::Finite(value * value),
        }
    }

    pub fn moments(&self) -> Moments {
        let mean = self.mean();
        let second_moment = self.second_moment();
        let cv_squared = match second_moment {
            Moment::Finite(m2) => Moment::Finite(((m2 - mean * mean) / (mean * mean)).max(0.0)),
            Moment::Infinite => Moment::Infinite,
        };
        Moments {
            mean,
            second_moment,
            cv_squared,
        }
    }

    /// Rescales the scale parameter so that the mean is one; shape and index
    /// parameters are kept.
    pub fn normalize_to_unit_mean(&self) -> Self {
        match *self {
            Self::Exponential { .. } => Self::Exponential { rate: 1.0 },
            Self::Weibull { shape, .. } => Self::Weibull {
                shape,
                scale: 1.0 / gamma(1.0 + 1.0 / shape),
            },
            Self::Pareto { index, .. } => Self::Pareto {
                index,
                min: (index - 1.0) / index,
            },
            Self::Deterministic { .. } => Self::Deterministic { value: 1.0 },
        }
    }

    /// Distribution of the minimum of `d` i.i.d. copies, when it stays in
    /// the same family.
    fn iid_min(&self, d: usize) -> Self {
        let d = d as f64;
        match *self {
            Self::Exponential { rate } => Self::Exponential { rate: rate * d },
            Self::Weibull { shape, scale } => Self::Weibull {
                shape,
                scale: scale * d.powf(-1.0 / shape),
            },
            Self::Pareto { index, min } => Self::Pareto { index: index * d, min },
            Self::Deterministic { value } => Self::Deterministic { value },
        }
    }

    /// `E[min(X_1, ..., X_d)]`.
    pub fn expected_min(&self, d: usize, dep: ReplicaDependence) -> Result<f64, DistributionError> {
        if d == 0 {
            return Err(DistributionError::ZeroReplicas);
        }
        Ok(match dep {
            ReplicaDependence::Identical => self.mean(),
            ReplicaDependence::Iid => self.iid_min(d).mean(),
        })
    }

    /// `E[min(X_1, ..., X_d)^2]`; Weibull goes through quadrature.
    pub fn second_moment_min(&self, d: usize, dep: ReplicaDependence) -> Result<Moment, DistributionError> {
        if d == 0 {
            return Err(DistributionError::ZeroReplicas);
        }
        match (dep, self) {
            (ReplicaDependence::Identical, _) => Ok(self.second_moment()),
            (ReplicaDependence::Iid, Self::Weibull { .. }) => self.second_moment_min_by_quadrature(d),
            (ReplicaDependence::Iid, _) => Ok(self.iid_min(d).second_moment()),
        }
    }

    /// `E[X_min] = integral of F(x)^d over [0, inf)` for i.i.d. replicas.
    pub fn expected_min_by_quadrature(&self, d: usize) -> Result<f64, DistributionError> {
        if d == 0 {
            return Err(DistributionError::ZeroReplicas);
        }
        let d = d as i32;
        self.integrate_with_kink(|x| self.survival_unchecked(x).powi(d))
    }

    /// `E[X_min^2] = integral of 2x F(x)^d over [0, inf)` for i.i.d.
    /// replicas. Pareto tails with `d * index <= 2` diverge and are flagged.
    pub fn second_moment_min_by_quadrature(&self, d: usize) -> Result<Moment, DistributionError> {
        if d == 0 {
            return Err(DistributionError::ZeroReplicas);
        }
        if let Self::Pareto { index, .. } = *self {
            if index * d as f64 <= 2.0 {
                return Ok(Moment::Infinite);
            }
        }
        let d = d as i32;
        self.integrate_with_kink(|x| 2.0 * x * self.survival_unchecked(x).powi(d))
            .map(Moment::Finite)
    }

    // Pareto and Deterministic survival functions have a kink (or jump) at a
    // known point; integrate the flat piece exactly and quadrature the rest.
    fn integrate_with_kink<F: Fn(f64) -> f64>(&self, f: F) -> Result<f64, DistributionError> {
        let tol = Tolerance::default();
        let value = match *self {
            Self::Pareto { min, .. } => {
                // x = min e^s turns the power-law tail into an exponential one;
                // mapped directly, tails near x^-1 leave an endpoint singularity
                // that fools the error estimate.
                let tail = |s: f64| {
                    let x = min * s.exp();
                    if x.is_finite() {
                        f(x) * x
                    } else {
                        0.0
                    }
                };
                quadrature::integrate(&f, 0.0, min, tol)? + quadrature::integrate_half_line(tail, tol)?
            }
            Self::Deterministic { value } => quadrature::integrate(&f, 0.0, value, tol)?,
            _ => quadrature::integrate_half_line(f, tol)?,
        };
        Ok(value)
    }

    /// Parametric aging class, cross-checked against the defining inequality
    /// on a 50 x 50 log-spaced grid.
    ///
    /// Panics if the grid contradicts the parametric class, which can only
    /// happen through an implementation bug.
    pub fn classify_aging(&self) -> AgingClass {
        let class = self.parametric_aging();
        if let Err(v) = self.check_aging(class) {
            panic!("aging class {class:?} of {self:?} contradicted by grid: {v}");
        }
        class
    }

    fn parametric_aging(&self) -> AgingClass {
        match *self {
            Self::Exponential { .. } => AgingClass::ExponentialBoundary,
            Self::Weibull { shape, .. } => {
                if shape > 1.0 {
                    AgingClass::Nbu
                } else if shape < 1.0 {
                    AgingClass::Nwu
                } else {
                    AgingClass::ExponentialBoundary
                }
            }
            Self::Deterministic { .. } => AgingClass::Nbu,
            // (m / (x + y))^a < (m / x)^a (m / y)^a fails near x = y = m while
            // F(x + y) >= F(y) = F(x) F(y) holds for x < m.
            Self::Pareto { .. } => AgingClass::Neither,
        }
    }

    /// Verifies `class` against `F(x + y)` vs `F(x) F(y)` on the grid.
    pub fn check_aging(&self, class: AgingClass) -> Result<(), AgingViolation> {
        let grid = self.aging_grid();
        let mut nbu_broken = None;
        let mut nwu_broken = None;
        for &x in &grid {
            for &y in &grid {
                let joint = self.survival_unchecked(x + y);
                let product = self.survival_unchecked(x) * self.survival_unchecked(y);
                if joint > product + AGING_TOLERANCE && nbu_broken.is_none() {
                    nbu_broken = Some(AgingViolation { x, y, joint, product });
                }
                if joint < product - AGING_TOLERANCE && nwu_broken.is_none() {
                    nwu_broken = Some(AgingViolation { x, y, joint, product });
                }
            }
        }
        let fail = match class {
            AgingClass::Nbu => nbu_broken,
            AgingClass::Nwu => nwu_broken,
            AgingClass::ExponentialBoundary => nbu_broken.or(nwu_broken),
            AgingClass::Neither => match (nbu_broken, nwu_broken) {
                (Some(_), Some(_)) => None,
                (None, _) | (_, None) => Some(AgingViolation {
                    x: f64::NAN,
                    y: f64::NAN,
                    joint: f64::NAN,
                    product: f64::NAN,
                }),
            },
        };
        fail.map_or(Ok(()), Err)
    }

    fn aging_grid(&self) -> Vec<f64> {
        // Spans the bulk of the distribution around its mean.
        let mean = self.mean();
        let (lo, hi) = ((mean * 1e-2).ln(), (mean * 5.0).ln());
        (0..AGING_GRID)
            .map(|i| (lo + (hi - lo) * i as f64 / (AGING_GRID - 1) as f64).exp())
            .collect()
    }

    /// `(d, d * E[X_min])` for `d = 1..=d_max` with i.i.d. replicas.
    pub fn min_work_profile(&self, d_max: usize) -> Vec<(usize, f64)> {
        (1..=d_max)
            .map(|d| {
                let e = self.expected_min(d, ReplicaDependence::Iid).expect("d >= 1");
                (d, d as f64 * e)
            })
            .collect()
    }
}

const AGING_GRID: usize = 50;
const AGING_TOLERANCE: f64 = 1e-12;

/// A grid point where the aging inequality fails. NaN coordinates mean the
/// distribution unexpectedly satisfied one of the inequalities everywhere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AgingViolation {
    pub x: f64,
    pub y: f64,
    pub joint: f64,
    pub product: f64,
}

impl fmt::Display for AgingViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "F({} + {}) = {} vs F({}) F({}) = {}",
            self.x, self.y, self.joint, self.x, self.y, self.product
        )
    }
}

impl fmt::Display for JobSizeDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Exponential { rate } => write!(f, "Exponential(rate={rate})"),
            Self::Weibull { shape, scale } => write!(f, "Weibull(shape={shape}, scale={scale})"),
            Self::Pareto { index, min } => write!(f, "Pareto(index={index}, min={min})"),
            Self::Deterministic { value } => write!(f, "Deterministic({value})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs().max(1e-300)
    }

    #[test]
    fn constructors_reject_bad_parameters() {
        assert!(JobSizeDistribution::exponential(0.0).is_err());
        assert!(JobSizeDistribution::weibull(-1.0, 1.0).is_err());
        assert!(JobSizeDistribution::weibull(1.0, f64::INFINITY).is_err());
        assert!(JobSizeDistribution::pareto(1.0, 1.0).is_err());
        assert!(JobSizeDistribution::pareto(2.0, 0.0).is_err());
        assert!(JobSizeDistribution::deterministic(f64::NAN).is_err());
        assert!(JobSizeDistribution::Pareto { index: 0.5, min: 1.0 }.validate().is_err());
    }

    #[test]
    fn sample_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let det = JobSizeDistribution::deterministic(3.0).unwrap();
        assert_eq!(det.sample(&mut rng), 3.0);
        let exp = JobSizeDistribution::exponential(1.0).unwrap();
        assert!((exp.from_uniform(0.5) - 0.5f64.ln().abs()).abs() < 1e-15);
        assert!((exp.from_uniform(0.5) - std::f64::consts::LN_2).abs() < 1e-12);
        let w = JobSizeDistribution::weibull(2.0, 1.0).unwrap();
        assert!((w.from_uniform(0.3) - (-(0.3f64).ln()).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn weibull_monte_carlo_mean() {
        let w = JobSizeDistribution::weibull(2.0, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 1_000_000;
        let mean = (0..n).map(|_| w.sample(&mut rng)).sum::<f64>() / n as f64;
        // Gamma(1.5) = sqrt(pi) / 2
        let expected = std::f64::consts::PI.sqrt() / 2.0;
        assert!(close(mean, expected, 0.01), "{mean} vs {expected}");
    }

    #[test]
    fn survival_examples() {
        let exp = JobSizeDistribution::exponential(1.0).unwrap();
        assert_eq!(exp.survival(0.0).unwrap(), 1.0);
        let p = JobSizeDistribution::pareto(2.0, 1.0).unwrap();
        assert_eq!(p.survival(2.0).unwrap(), 0.25);
        let w = JobSizeDistribution::weibull(0.8, 1.0).unwrap();
        assert!((w.survival(1.0).unwrap() - (-1.0f64).exp()).abs() < 1e-15);
        assert!(matches!(
            exp.survival(-1.0),
            Err(DistributionError::NegativeArgument(_))
        ));
    }

    #[test]
    fn moments_examples() {
        let m = JobSizeDistribution::exponential(1.0).unwrap().moments();
        assert_eq!(m.mean, 1.0);
        assert_eq!(m.second_moment, Moment::Finite(2.0));
        assert_eq!(m.cv_squared, Moment::Finite(1.0));
        let m = JobSizeDistribution::deterministic(2.0).unwrap().moments();
        assert_eq!(
            (m.mean, m.second_moment, m.cv_squared),
            (2.0, Moment::Finite(4.0), Moment::Finite(0.0))
        );
        let m = JobSizeDistribution::pareto(1.5, 1.0).unwrap().moments();
        assert_eq!(m.mean, 3.0);
        assert!(m.second_moment.is_infinite());
        assert!(m.cv_squared.is_infinite());
    }

    #[test]
    fn normalize_examples() {
        let w = JobSizeDistribution::weibull(1.2, 17.0)
            .unwrap()
            .normalize_to_unit_mean();
        match w {
            JobSizeDistribution::Weibull { shape, scale } => {
                assert_eq!(shape, 1.2);
                assert!((scale - 1.0630).abs() < 1e-4, "{scale}");
            }
            _ => unreachable!(),
        }
        assert!((w.mean() - 1.0).abs() < 1e-12);
        assert_eq!(
            JobSizeDistribution::exponential(5.0).unwrap().normalize_to_unit_mean(),
            JobSizeDistribution::Exponential { rate: 1.0 }
        );
        let p = JobSizeDistribution::pareto(2.5, 3.0).unwrap().normalize_to_unit_mean();
        assert_eq!(p, JobSizeDistribution::Pareto { index: 2.5, min: 0.6 });
        assert!((p.mean() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn expected_min_examples() {
        let exp = JobSizeDistribution::exponential(1.0).unwrap();
        assert_eq!(exp.expected_min(2, ReplicaDependence::Iid).unwrap(), 0.5);
        let w = JobSizeDistribution::weibull(2.0, 1.0).unwrap();
        let e = w.expected_min(4, ReplicaDependence::Iid).unwrap();
        assert!((e - 0.4431).abs() < 1e-4, "{e}");
        assert!(close(w.expected_min_by_quadrature(4).unwrap(), e, 1e-6));
        for dist in [exp, w, JobSizeDistribution::pareto(2.5, 0.6).unwrap()] {
            assert_eq!(dist.expected_min(7, ReplicaDependence::Identical).unwrap(), dist.mean());
        }
        assert_eq!(
            exp.expected_min(0, ReplicaDependence::Iid),
            Err(DistributionError::ZeroReplicas)
        );
    }

    #[test]
    fn second_moment_min_examples() {
        let exp = JobSizeDistribution::exponential(1.0).unwrap();
        assert_eq!(
            exp.second_moment_min(2, ReplicaDependence::Iid).unwrap(),
            Moment::Finite(0.5)
        );
        let det = JobSizeDistribution::deterministic(1.0).unwrap();
        assert_eq!(
            det.second_moment_min(3, ReplicaDependence::Iid).unwrap(),
            Moment::Finite(1.0)
        );

        let w = JobSizeDistribution::weibull(1.2, 1.0).unwrap().normalize_to_unit_mean();
        let theta = 1.0 / gamma(1.0 + 1.0 / 1.2);
        let closed = (theta * 2f64.powf(-1.0 / 1.2)).powi(2) * gamma(1.0 + 2.0 / 1.2);
        let quad = w
            .second_moment_min(2, ReplicaDependence::Iid)
            .unwrap()
            .finite()
            .unwrap();
        assert!(close(quad, closed, 1e-6), "{quad} vs {closed}");

        let heavy = JobSizeDistribution::pareto(1.5, 1.0).unwrap();
        assert_eq!(
            heavy.second_moment_min(1, ReplicaDependence::Iid).unwrap(),
            Moment::Infinite
        );
        assert!(heavy
            .second_moment_min(2, ReplicaDependence::Iid)
            .unwrap()
            .finite()
            .is_some());
        assert_eq!(heavy.second_moment_min_by_quadrature(1).unwrap(), Moment::Infinite);
    }

    #[test]
    fn slow_pareto_tails_integrate() {
        for index in [1.05, 1.1, 1.5, 3.0] {
            for min in [0.1, 2.0] {
                let p = JobSizeDistribution::pareto(index, min).unwrap();
                for d in 1..=3 {
                    let exact = p.expected_min(d, ReplicaDependence::Iid).unwrap();
                    let quad = p.expected_min_by_quadrature(d).unwrap();
                    assert!(close(quad, exact, 1e-7), "{index} {min} {d}: {quad} vs {exact}");
                    if let Moment::Finite(m2) = p.second_moment_min(d, ReplicaDependence::Iid).unwrap() {
                        let q2 = p.second_moment_min_by_quadrature(d).unwrap().finite().unwrap();
                        assert!(close(q2, m2, 1e-7), "{index} {min} {d}: {q2} vs {m2}");
                    }
                }
            }
        }
    }

    #[test]
    fn classify_examples() {
        let w = |k| JobSizeDistribution::weibull(k, 1.0).unwrap();
        assert_eq!(w(1.2).classify_aging(), AgingClass::Nbu);
        assert_eq!(w(0.8).classify_aging(), AgingClass::Nwu);
        assert_eq!(w(1.0).classify_aging(), AgingClass::ExponentialBoundary);
        assert_eq!(
            JobSizeDistribution::exponential(1.0).unwrap().classify_aging(),
            AgingClass::ExponentialBoundary
        );
        assert_eq!(
            JobSizeDistribution::deterministic(2.0).unwrap().classify_aging(),
            AgingClass::Nbu
        );
        assert_eq!(
            JobSizeDistribution::pareto(2.5, 0.6).unwrap().classify_aging(),
            AgingClass::Neither
        );
    }

    #[test]
    fn grid_check_catches_wrong_class() {
        let w = JobSizeDistribution::weibull(1.5, 1.0).unwrap();
        assert!(w.check_aging(AgingClass::Nwu).is_err());
        assert!(JobSizeDistribution::pareto(3.0, 1.0)
            .unwrap()
            .check_aging(AgingClass::Nwu)
            .is_err());
    }

    #[test]
    fn min_work_profile_examples() {
        let exp = JobSizeDistribution::exponential(1.0).unwrap();
        assert!(exp.min_work_profile(5).iter().all(|&(_, v)| (v - 1.0).abs() < 1e-15));
        let nbu = JobSizeDistribution::weibull(1.2, 1.0).unwrap().normalize_to_unit_mean();
        let p = nbu.min_work_profile(5);
        assert!(p.windows(2).all(|w| w[1].1 > w[0].1));
        for &(d, v) in &p {
            assert!(close(v, (d as f64).powf(1.0 - 1.0 / 1.2), 1e-12));
        }
        let nwu = JobSizeDistribution::weibull(0.8, 1.0).unwrap().normalize_to_unit_mean();
        assert!(nwu.min_work_profile(5).windows(2).all(|w| w[1].1 < w[0].1));
    }
}
