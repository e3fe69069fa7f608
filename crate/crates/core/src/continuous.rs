//! Continuous-time model with a deterministic default intensity.
//!
//! Coupons accrue continuously at `C` per year while the bond survives, the
//! recovery amount is paid at the default time, and the face value at
//! maturity. Survival to `t` is `exp(-∫₀ᵗ λ(s) ds)`. Prices are computed
//! from per-segment closed forms; no quadrature is involved.

use serde::{Deserialize, Serialize};

use crate::numerics::{expand_upper, solve_root, RootProblem};
use crate::{check_recovery, Error, FlatRate, Result, NOMINAL};

pub const YTM_FLOOR: f64 = -0.99;
const YTM_START_HI: f64 = 1.0;
const YTM_EXPANSIONS: u32 = 10;
const YTM_TOL: f64 = 1e-15;
const SERIES_CUTOFF: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContinuousBondSpec {
    pub face: f64,
    /// Coupon amount paid per year, continuously.
    pub coupon: f64,
    /// Maturity in years.
    pub maturity: f64,
}

impl ContinuousBondSpec {
    pub fn new(face: f64, coupon: f64, maturity: f64) -> Result<Self> {
        if !face.is_finite() || face <= 0.0 {
            return Err(Error::invalid("face", format!("must be positive, got {face}")));
        }
        if !coupon.is_finite() || coupon < 0.0 {
            return Err(Error::invalid("coupon", format!("must be >= 0, got {coupon}")));
        }
        if !maturity.is_finite() || maturity <= 0.0 {
            return Err(Error::invalid("maturity", format!("must be positive, got {maturity}")));
        }
        Ok(Self { face, coupon, maturity })
    }

    pub fn with_coupon(coupon: f64, maturity: f64) -> Result<Self> {
        Self::new(NOMINAL, coupon, maturity)
    }

    pub fn coupon_rate(&self) -> f64 {
        self.coupon / self.face
    }
}

/// A stretch `[start, end]` of constant intensity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub start: f64,
    pub end: f64,
    pub lambda: f64,
}

/// Deterministic default intensity.
///
/// `PiecewiseConstant` holds `values[i]` on `(breaks[i-1], breaks[i]]`, with
/// `breaks[-1] = 0` and the last value extending to infinity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum IntensitySpec {
    Constant(f64),
    PiecewiseConstant { breaks: Vec<f64>, values: Vec<f64> },
}

fn check_intensity(field: &'static str, v: f64) -> Result<()> {
    if !v.is_finite() || v < 0.0 {
        return Err(Error::invalid(field, format!("intensity must be finite and >= 0, got {v}")));
    }
    Ok(())
}

impl IntensitySpec {
    pub fn constant(lambda: f64) -> Result<Self> {
        check_intensity("lambda", lambda)?;
        Ok(Self::Constant(lambda))
    }

    pub fn piecewise(breaks: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if values.len() != breaks.len() + 1 {
            return Err(Error::invalid(
                "hazard",
                format!("{} breaks need {} values, got {}", breaks.len(), breaks.len() + 1, values.len()),
            ));
        }
        let mut prev = 0.0;
        for &b in &breaks {
            if !b.is_finite() || b <= prev {
                return Err(Error::invalid("hazard", "breaks must be positive and strictly ascending"));
            }
            prev = b;
        }
        for &v in &values {
            check_intensity("hazard", v)?;
        }
        Ok(Self::PiecewiseConstant { breaks, values })
    }

    /// Yearly segments: `values[i]` on `(i, i + 1]`.
    pub fn yearly(values: Vec<f64>) -> Result<Self> {
        let breaks = (1..values.len()).map(|i| i as f64).collect();
        Self::piecewise(breaks, values)
    }

    /// Constant-intensity pieces covering `[0, horizon]`.
    pub fn segments(&self, horizon: f64) -> Vec<Segment> {
        match self {
            Self::Constant(l) => vec![Segment { start: 0.0, end: horizon, lambda: *l }],
            Self::PiecewiseConstant { breaks, values } => {
                let mut out = Vec::with_capacity(values.len());
                let mut start = 0.0;
                for (i, &lambda) in values.iter().enumerate() {
                    let end = breaks.get(i).copied().unwrap_or(f64::INFINITY).min(horizon);
                    out.push(Segment { start, end, lambda });
                    if end >= horizon {
                        break;
                    }
                    start = end;
                }
                out
            }
        }
    }

    pub fn intensity_at(&self, t: f64) -> f64 {
        match self {
            Self::Constant(l) => *l,
            Self::PiecewiseConstant { breaks, values } => {
                let i = breaks.partition_point(|&b| b < t);
                values[i]
            }
        }
    }

    /// `∫₀ᵗ λ(s) ds`.
    pub fn cumulative(&self, t: f64) -> f64 {
        self.segments(t).iter().map(|s| s.lambda * (s.end - s.start)).sum()
    }

    /// The intensity seen from time `offset` onwards, re-based to start at zero.
    pub fn shifted(&self, offset: f64) -> Self {
        match self {
            Self::Constant(l) => Self::Constant(*l),
            Self::PiecewiseConstant { breaks, values } => {
                let first = breaks.partition_point(|&b| b <= offset);
                Self::PiecewiseConstant {
                    breaks: breaks[first..].iter().map(|b| b - offset).collect(),
                    values: values[first..].to_vec(),
                }
            }
        }
    }

    pub fn as_constant(&self) -> Option<f64> {
        match self {
            Self::Constant(l) => Some(*l),
            Self::PiecewiseConstant { .. } => None,
        }
    }
}

/// Probability of surviving past `t`.
pub fn survival(intensity: &IntensitySpec, t: f64) -> f64 {
    (-intensity.cumulative(t.max(0.0))).exp()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuousCreditAssumptions {
    pub intensity: IntensitySpec,
    /// Amount recovered at default, per 100 of face.
    pub recovery: f64,
}

impl ContinuousCreditAssumptions {
    pub fn new(intensity: IntensitySpec, recovery: f64) -> Result<Self> {
        check_recovery(recovery)?;
        Ok(Self { intensity, recovery })
    }

    fn constant_lambda(&self, what: &'static str) -> Result<f64> {
        self.intensity
            .as_constant()
            .ok_or_else(|| Error::invalid("hazard", format!("{what} needs a constant intensity")))
    }
}

/// `∫₀ᴸ e^{-k s} ds`.
pub(crate) fn exp_integral(k: f64, len: f64) -> f64 {
    let x = k * len;
    if k.abs() < SERIES_CUTOFF {
        len * (1.0 - 0.5 * x + x * x / 6.0)
    } else {
        -(-x).exp_m1() / k
    }
}

/// Model price. For a constant intensity this is
/// `(C + Rλ)/(r + λ) · (1 − e^{−(r+λ)T}) + F·e^{−(r+λ)T}`; piecewise
/// intensities chain the same expression across segments.
pub fn price(spec: &ContinuousBondSpec, credit: &ContinuousCreditAssumptions, rate: FlatRate) -> Result<f64> {
    let r = rate.value();
    let recovery = credit.recovery * spec.face / NOMINAL;
    // Survival times risk-free discount at the current segment start.
    let mut weight = 1.0;
    let mut value = 0.0;
    for seg in credit.intensity.segments(spec.maturity) {
        let k = r + seg.lambda;
        let len = seg.end - seg.start;
        value += weight * (spec.coupon + recovery * seg.lambda) * exp_integral(k, len);
        weight *= (-k * len).exp();
    }
    Ok(value + spec.face * weight)
}

/// Present value of the contractual cash flows at continuously compounded yield `y`.
pub fn present_value(spec: &ContinuousBondSpec, y: f64) -> f64 {
    spec.coupon * exp_integral(y, spec.maturity) + spec.face * (-y * spec.maturity).exp()
}

/// Continuously compounded yield-to-maturity.
pub fn ytm(price: f64, spec: &ContinuousBondSpec) -> Result<f64> {
    if !price.is_finite() || price <= 0.0 {
        return Err(Error::invalid("price", format!("must be positive, got {price}")));
    }
    let f = |y: f64| present_value(spec, y) - price;
    if f(YTM_FLOOR) < 0.0 {
        return Err(Error::NoSolution(format!(
            "price {price} exceeds the cash-flow value at the {YTM_FLOOR} yield floor"
        )));
    }
    let (lo, hi) = expand_upper(&f, YTM_FLOOR, YTM_START_HI, YTM_EXPANSIONS)
        .map_err(|_| Error::NoSolution(format!("price {price} implies a yield above the search range")))?;
    solve_root(&RootProblem::new(f, lo, hi).tol_x(YTM_TOL))
}

/// `r + (1 − R/100)·λ`, the same for every maturity.
pub fn par_yield(credit: &ContinuousCreditAssumptions, rate: FlatRate) -> Result<f64> {
    let lambda = credit.constant_lambda("par yield")?;
    Ok(rate.value() + (1.0 - credit.recovery / NOMINAL) * lambda)
}

/// Par coupon rate at one maturity under any intensity.
pub fn par_yield_at(credit: &ContinuousCreditAssumptions, rate: FlatRate, maturity: f64) -> Result<f64> {
    let zero = price(&ContinuousBondSpec::with_coupon(0.0, maturity)?, credit, rate)?;
    let unit = price(&ContinuousBondSpec::with_coupon(1.0, maturity)?, credit, rate)?;
    Ok((NOMINAL - zero) / (unit - zero) / NOMINAL)
}

pub fn delta_sup(credit: &ContinuousCreditAssumptions) -> Result<f64> {
    Ok(credit.recovery / NOMINAL * credit.constant_lambda("yield bound")?)
}

/// `c_par + δ_sup`, which simplifies to `r + λ`.
pub fn ytm_upper_bound(credit: &ContinuousCreditAssumptions, rate: FlatRate) -> Result<f64> {
    Ok(rate.value() + credit.constant_lambda("yield bound")?)
}

/// `P_{T+ε} − P_T` for a constant intensity:
/// `(C + Rλ − F(r + λ)) · ∫_T^{T+ε} e^{−(r+λ)t} dt`.
pub fn maturity_increment(
    coupon: f64,
    face: f64,
    credit: &ContinuousCreditAssumptions,
    rate: FlatRate,
    maturity: f64,
    step: f64,
) -> Result<f64> {
    let lambda = credit.constant_lambda("price recursion")?;
    let k = rate.value() + lambda;
    let recovery = credit.recovery * face / NOMINAL;
    let window = (-k * maturity).exp() * exp_integral(k, step);
    Ok((coupon + recovery * lambda - face * k) * window)
}
