//! Fair CDS spreads.
//!
//! The fair spread equates the premium leg (a unit premium paid while the
//! name survives) with the default leg (loss given default paid at default):
//! `S_T = (1 − R) · default_leg / premium_leg`. Recovery here is a fraction
//! of notional, unlike the bond modules which quote it per 100 of face.
//!
//! For non-constant continuous intensities two weightings of the leg
//! integrals are offered, see [`Kernel`].

use serde::{Deserialize, Serialize};

use crate::continuous::{exp_integral, IntensitySpec};
use crate::numerics::{integrate_pieces, DEFAULT_QUAD_TOL};
use crate::{Error, FlatRate, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CdsSpec {
    /// Integer periods in the discrete model, years in the continuous one.
    pub maturity: f64,
    pub recovery_fraction: f64,
    pub risk_free: FlatRate,
}

impl CdsSpec {
    pub fn new(maturity: f64, recovery_fraction: f64, risk_free: FlatRate) -> Result<Self> {
        if !maturity.is_finite() || maturity <= 0.0 {
            return Err(Error::invalid("maturity", format!("must be positive, got {maturity}")));
        }
        if !recovery_fraction.is_finite() || !(0.0..=1.0).contains(&recovery_fraction) {
            return Err(Error::invalid(
                "recovery_fraction",
                format!("must lie in [0, 1], got {recovery_fraction}"),
            ));
        }
        Ok(Self { maturity, recovery_fraction, risk_free })
    }

    pub fn with_maturity(&self, maturity: f64) -> Result<Self> {
        Self::new(maturity, self.recovery_fraction, self.risk_free)
    }

    fn periods(&self) -> Result<usize> {
        if self.maturity.fract() != 0.0 {
            return Err(Error::invalid(
                "maturity",
                format!("discrete CDS needs a whole number of periods, got {}", self.maturity),
            ));
        }
        Ok(self.maturity as usize)
    }
}

/// Continuous piecewise-linear intensity through `(time, level)` knots.
///
/// The first knot sits at time zero; the intensity is undefined past the
/// last knot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearIntensity {
    knots: Vec<(f64, f64)>,
}

impl LinearIntensity {
    pub fn new(knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.len() < 2 {
            return Err(Error::invalid("hazard", "piecewise-linear intensity needs at least two knots"));
        }
        if knots[0].0 != 0.0 {
            return Err(Error::invalid("hazard", "first knot must be at time 0"));
        }
        for w in knots.windows(2) {
            if !w[1].0.is_finite() || w[1].0 <= w[0].0 {
                return Err(Error::invalid("hazard", "knot times must be strictly ascending"));
            }
        }
        for &(_, level) in &knots {
            if !level.is_finite() || level < 0.0 {
                return Err(Error::invalid("hazard", format!("intensity must be >= 0, got {level}")));
            }
        }
        Ok(Self { knots })
    }

    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }

    pub fn horizon(&self) -> f64 {
        self.knots[self.knots.len() - 1].0
    }

    fn piece(&self, t: f64) -> usize {
        self.knots.partition_point(|k| k.0 < t).clamp(1, self.knots.len() - 1)
    }

    pub fn at(&self, t: f64) -> f64 {
        let i = self.piece(t);
        let (t0, l0) = self.knots[i - 1];
        let (t1, l1) = self.knots[i];
        l0 + (l1 - l0) * (t - t0) / (t1 - t0)
    }

    /// `∫₀ᵗ λ(s) ds`, exact for the linear pieces.
    pub fn cumulative(&self, t: f64) -> f64 {
        let mut total = 0.0;
        for w in self.knots.windows(2) {
            let (t0, l0) = w[0];
            if t <= t0 {
                break;
            }
            let end = t.min(w[1].0);
            total += 0.5 * (l0 + self.at(end)) * (end - t0);
        }
        total
    }

    fn breakpoints(&self, maturity: f64) -> Vec<f64> {
        let mut pts: Vec<f64> = self.knots.iter().map(|k| k.0).take_while(|&t| t < maturity).collect();
        pts.push(maturity);
        pts
    }

    fn check_support(&self, maturity: f64) -> Result<()> {
        if maturity > self.horizon() {
            return Err(Error::invalid(
                "maturity",
                format!("{maturity} lies beyond the last hazard knot at {}", self.horizon()),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum CdsHazard {
    DiscreteConstant(f64),
    DiscreteSequence(Vec<f64>),
    ContinuousConstant(f64),
    ContinuousPiecewiseConstant { breaks: Vec<f64>, values: Vec<f64> },
    ContinuousPiecewiseLinear(LinearIntensity),
}

impl CdsHazard {
    pub fn is_discrete(&self) -> bool {
        matches!(self, Self::DiscreteConstant(_) | Self::DiscreteSequence(_))
    }

    fn check(&self) -> Result<()> {
        let probability = |l: f64| {
            if !l.is_finite() || !(0.0..=1.0).contains(&l) {
                return Err(Error::invalid("hazard", format!("probability must lie in [0, 1], got {l}")));
            }
            Ok(())
        };
        match self {
            Self::DiscreteConstant(l) => probability(*l),
            Self::DiscreteSequence(v) => v.iter().try_for_each(|&l| probability(l)),
            Self::ContinuousConstant(l) => IntensitySpec::constant(*l).map(drop),
            Self::ContinuousPiecewiseConstant { breaks, values } => {
                IntensitySpec::piecewise(breaks.clone(), values.clone()).map(drop)
            }
            Self::ContinuousPiecewiseLinear(_) => Ok(()),
        }
    }
}

/// Weighting applied inside the continuous leg integrals.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Kernel {
    /// `e^{−(r + λ(s))·s}`: the intensity at `s` is applied to the whole of `[0, s]`.
    #[default]
    PaperLiteral,
    /// `e^{−r s − ∫₀ˢ λ(u) du}`: discount times survival.
    ConsistentSurvival,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SlopeSign {
    Negative,
    Zero,
    Positive,
}

/// Premium and default legs (before the `1 − R` factor), discrete model.
fn discrete_legs(lambda: impl Fn(usize) -> f64, periods: usize, r: f64) -> (f64, f64) {
    let mut survival = 1.0;
    let mut discount = 1.0;
    let mut premium = 0.0;
    let mut default = 0.0;
    for t in 1..=periods {
        let l = lambda(t);
        discount /= 1.0 + r;
        default += l * survival * discount;
        survival *= 1.0 - l;
        premium += survival * discount;
    }
    (premium, default)
}

pub fn spread_discrete(hazard: &CdsHazard, spec: &CdsSpec) -> Result<f64> {
    hazard.check()?;
    let periods = spec.periods()?;
    let lgd = 1.0 - spec.recovery_fraction;
    match hazard {
        CdsHazard::DiscreteConstant(l) => {
            if *l >= 1.0 {
                return Err(Error::DegenerateHazard("CDS premium leg"));
            }
            Ok(lgd * l / (1.0 - l))
        }
        CdsHazard::DiscreteSequence(v) => {
            if v.len() < periods {
                return Err(Error::HazardTooShort { len: v.len(), needed: periods });
            }
            let (premium, default) = discrete_legs(|t| v[t - 1], periods, spec.risk_free.value());
            if premium <= 0.0 {
                return Err(Error::DegenerateHazard("CDS premium leg"));
            }
            Ok(lgd * default / premium)
        }
        _ => Err(Error::invalid("hazard", "discrete spread needs a discrete hazard")),
    }
}

/// Leg integrals `(∫ w, ∫ λ w)` over `[0, T]` for piecewise-constant intensities.
fn piecewise_legs(intensity: &IntensitySpec, maturity: f64, r: f64, kernel: Kernel) -> (f64, f64) {
    let mut premium = 0.0;
    let mut default = 0.0;
    let mut weight = 1.0;
    for seg in intensity.segments(maturity) {
        let k = r + seg.lambda;
        let len = seg.end - seg.start;
        let start_weight = match kernel {
            Kernel::PaperLiteral => (-k * seg.start).exp(),
            Kernel::ConsistentSurvival => weight,
        };
        let piece = start_weight * exp_integral(k, len);
        premium += piece;
        default += seg.lambda * piece;
        weight *= (-k * len).exp();
    }
    (premium, default)
}

fn linear_weight(h: &LinearIntensity, r: f64, kernel: Kernel) -> impl Fn(f64) -> f64 + '_ {
    move |s| match kernel {
        Kernel::PaperLiteral => (-(r + h.at(s)) * s).exp(),
        Kernel::ConsistentSurvival => (-r * s - h.cumulative(s)).exp(),
    }
}

fn linear_legs(h: &LinearIntensity, maturity: f64, r: f64, kernel: Kernel) -> Result<(f64, f64)> {
    h.check_support(maturity)?;
    let w = linear_weight(h, r, kernel);
    let pts = h.breakpoints(maturity);
    let premium = integrate_pieces(&w, &pts, DEFAULT_QUAD_TOL)?;
    let default = integrate_pieces(&|s| h.at(s) * w(s), &pts, DEFAULT_QUAD_TOL)?;
    Ok((premium, default))
}

pub fn spread_continuous(hazard: &CdsHazard, spec: &CdsSpec, kernel: Kernel) -> Result<f64> {
    hazard.check()?;
    let lgd = 1.0 - spec.recovery_fraction;
    let r = spec.risk_free.value();
    let (premium, default) = match hazard {
        CdsHazard::ContinuousConstant(l) => return Ok(lgd * l),
        CdsHazard::ContinuousPiecewiseConstant { breaks, values } => {
            let intensity = IntensitySpec::PiecewiseConstant { breaks: breaks.clone(), values: values.clone() };
            piecewise_legs(&intensity, spec.maturity, r, kernel)
        }
        CdsHazard::ContinuousPiecewiseLinear(h) => linear_legs(h, spec.maturity, r, kernel)?,
        _ => return Err(Error::invalid("hazard", "continuous spread needs a continuous hazard")),
    };
    if premium <= 0.0 {
        return Err(Error::ZeroPremiumLeg(premium));
    }
    Ok(lgd * default / premium)
}

/// Fair spread for any hazard; `kernel` only matters for continuous ones.
pub fn spread(hazard: &CdsHazard, spec: &CdsSpec, kernel: Kernel) -> Result<f64> {
    if hazard.is_discrete() {
        spread_discrete(hazard, spec)
    } else {
        spread_continuous(hazard, spec, kernel)
    }
}

/// `λ(T)·∫₀ᵀ w − ∫₀ᵀ λ w`, which carries the sign of `∂S/∂T`, together
/// with the premium leg `∫₀ᵀ w` that scales it.
pub fn slope_quantity(h: &LinearIntensity, spec: &CdsSpec, maturity: f64, kernel: Kernel) -> Result<(f64, f64)> {
    let (premium, default) = linear_legs(h, maturity, spec.risk_free.value(), kernel)?;
    Ok((h.at(maturity) * premium - default, premium))
}

/// Sign of the spread slope at `maturity` under the default kernel.
pub fn slope_sign(h: &LinearIntensity, spec: &CdsSpec, maturity: f64) -> Result<SlopeSign> {
    slope_sign_with(h, spec, maturity, Kernel::PaperLiteral)
}

pub fn slope_sign_with(h: &LinearIntensity, spec: &CdsSpec, maturity: f64, kernel: Kernel) -> Result<SlopeSign> {
    let (value, premium) = slope_quantity(h, spec, maturity, kernel)?;
    Ok(if value.abs() < 1e-12 * premium {
        SlopeSign::Zero
    } else if value > 0.0 {
        SlopeSign::Positive
    } else {
        SlopeSign::Negative
    })
}

/// Spreads at each of `maturities`, which must be ascending.
pub fn spread_curve(
    hazard: &CdsHazard,
    template: &CdsSpec,
    maturities: &[f64],
    kernel: Kernel,
) -> Result<Vec<(f64, f64)>> {
    if maturities.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("maturities", "must be strictly ascending"));
    }
    maturities
        .iter()
        .map(|&t| Ok((t, spread(hazard, &template.with_maturity(t)?, kernel)?)))
        .collect()
}
