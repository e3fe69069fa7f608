//! Bootstrapping a piecewise-constant default intensity from bond quotes.
//!
//! Quotes are processed in maturity order. Each one fixes the intensity on
//! the stretch between the previous quote's maturity and its own, holding
//! the earlier stretches at their already-solved values. With one quote per
//! year this yields one intensity per year. Quoted bonds are repriced with
//! the continuous-coupon model.

use serde::{Deserialize, Serialize};

use crate::continuous::{self, ContinuousBondSpec, ContinuousCreditAssumptions, IntensitySpec, Segment};
use crate::numerics::{integrate_pieces, solve_root, RootProblem};
use crate::{check_recovery, Error, FlatRate, Result, NOMINAL};

pub const DEFAULT_LAMBDA_MAX: f64 = 20.0;
const SCAN_POINTS: usize = 64;
const LAMBDA_TOL: f64 = 1e-15;
const CURVE_QUAD_TOL: f64 = 1e-12;
const ZERO_PRICE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BondQuote {
    pub maturity: f64,
    /// Annual coupon as a fraction of face.
    pub coupon_rate: f64,
    /// Clean price per 100 face.
    pub clean_price: f64,
}

impl BondQuote {
    pub fn new(maturity: f64, coupon_rate: f64, clean_price: f64) -> Result<Self> {
        if !maturity.is_finite() || maturity <= 0.0 {
            return Err(Error::invalid("maturity_years", format!("must be positive, got {maturity}")));
        }
        if !coupon_rate.is_finite() || coupon_rate < 0.0 {
            return Err(Error::invalid("coupon_rate", format!("must be >= 0, got {coupon_rate}")));
        }
        if !clean_price.is_finite() || clean_price <= 0.0 {
            return Err(Error::invalid("clean_price", format!("must be positive, got {clean_price}")));
        }
        Ok(Self { maturity, coupon_rate, clean_price })
    }
}

/// Zero-coupon rate curve, continuously compounded, linear in the zero rate
/// and flat beyond its end points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroCurve {
    points: Vec<(f64, f64)>,
}

impl ZeroCurve {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::invalid("zero_curve", "needs at least one point"));
        }
        for &(t, z) in &points {
            if !t.is_finite() || t < 0.0 || !z.is_finite() {
                return Err(Error::invalid("zero_curve", format!("bad point ({t}, {z})")));
            }
        }
        if points.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::invalid("zero_curve", "maturities must be strictly ascending"));
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn zero_rate(&self, t: f64) -> f64 {
        let pts = &self.points;
        let i = pts.partition_point(|p| p.0 <= t);
        if i == 0 {
            return pts[0].1;
        }
        if i == pts.len() {
            return pts[pts.len() - 1].1;
        }
        let (t0, z0) = pts[i - 1];
        let (t1, z1) = pts[i];
        z0 + (z1 - z0) * (t - t0) / (t1 - t0)
    }

    pub fn discount(&self, t: f64) -> f64 {
        (-self.zero_rate(t) * t).exp()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum DiscountSpec {
    Flat(FlatRate),
    ZeroCurve(ZeroCurve),
}

impl DiscountSpec {
    pub fn discount(&self, t: f64) -> f64 {
        match self {
            Self::Flat(r) => (-r.value() * t).exp(),
            Self::ZeroCurve(c) => c.discount(t),
        }
    }
}

/// Continuous-model price of a bond under a general discount curve.
///
/// Flat curves use the closed form; zero curves integrate numerically with
/// pieces split at curve knots and intensity breaks.
pub fn model_price(
    spec: &ContinuousBondSpec,
    credit: &ContinuousCreditAssumptions,
    discount: &DiscountSpec,
) -> Result<f64> {
    let curve = match discount {
        DiscountSpec::Flat(r) => return continuous::price(spec, credit, *r),
        DiscountSpec::ZeroCurve(c) => c,
    };
    let horizon = spec.maturity;
    let recovery = credit.recovery * spec.face / NOMINAL;
    let h = &credit.intensity;
    let mut pts: Vec<f64> = std::iter::once(0.0)
        .chain(h.segments(horizon).iter().map(|s| s.end))
        .chain(curve.points().iter().map(|p| p.0).filter(|&t| t > 0.0 && t < horizon))
        .collect();
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let integrand =
        |t: f64| (spec.coupon + recovery * h.intensity_at(t)) * curve.discount(t) * continuous::survival(h, t);
    let flows = integrate_pieces(&integrand, &pts, CURVE_QUAD_TOL)?;
    Ok(flows + spec.face * curve.discount(horizon) * continuous::survival(h, horizon))
}

fn quote_spec(q: &BondQuote) -> Result<ContinuousBondSpec> {
    ContinuousBondSpec::with_coupon(NOMINAL * q.coupon_rate, q.maturity)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationResult {
    /// Solved stretches, one per quote.
    pub segments: Vec<Segment>,
    /// The calibrated intensity, last value extended flat.
    pub intensity: IntensitySpec,
    /// Average intensity over each year `(i − 1, i]`.
    pub intensities: Vec<(u32, f64)>,
    /// `1 − e^{−∫ λ}` over each year.
    pub conditional_probs: Vec<(u32, f64)>,
    /// Model price minus quoted price, per quote.
    pub residuals: Vec<f64>,
}

/// Solves the smallest intensity in `[0, lambda_max]` that reprices `q`.
fn solve_segment(
    q: &BondQuote,
    breaks: &[f64],
    solved: &[f64],
    recovery: f64,
    discount: &DiscountSpec,
    lambda_max: f64,
) -> Result<f64> {
    let spec = quote_spec(q)?;
    let price_at = |lambda: f64| {
        let values = solved.iter().copied().chain(std::iter::once(lambda)).collect();
        let credit = ContinuousCreditAssumptions {
            intensity: IntensitySpec::PiecewiseConstant { breaks: breaks.to_vec(), values },
            recovery,
        };
        model_price(&spec, &credit, discount)
    };
    // Surface quadrature failures instead of hiding them inside the objective.
    price_at(0.0)?;
    let f = |lambda: f64| price_at(lambda).map_or(f64::NAN, |p| p - q.clean_price);

    let mut lo = 0.0;
    let mut f_lo = f(lo);
    // A quote equal to the default-free price up to rounding means λ = 0,
    // even if rounding puts it a hair above.
    if f_lo.abs() <= ZERO_PRICE_TOL * q.clean_price {
        return Ok(0.0);
    }
    for j in 1..=SCAN_POINTS {
        let hi = lambda_max * (j as f64 / SCAN_POINTS as f64).powi(2);
        let f_hi = f(hi);
        if !f_hi.is_finite() {
            return Err(Error::NonFinite { x: hi });
        }
        if f_hi == 0.0 {
            return Ok(hi);
        }
        if (f_lo < 0.0) != (f_hi < 0.0) {
            return solve_root(&RootProblem::new(f, lo, hi).tol_x(LAMBDA_TOL));
        }
        lo = hi;
        f_lo = f_hi;
    }
    Err(Error::NoRootInRange { maturity: q.maturity, lambda_max })
}

/// Sequential bootstrap of one intensity per quote.
pub fn bootstrap(
    quotes: &[BondQuote],
    recovery: f64,
    discount: &DiscountSpec,
    lambda_max: f64,
) -> Result<CalibrationResult> {
    if quotes.is_empty() {
        return Err(Error::invalid("quotes", "no quotes supplied"));
    }
    check_recovery(recovery)?;
    if !lambda_max.is_finite() || lambda_max <= 0.0 {
        return Err(Error::invalid("lambda_max", format!("must be positive, got {lambda_max}")));
    }
    for q in quotes {
        BondQuote::new(q.maturity, q.coupon_rate, q.clean_price)?;
    }
    for w in quotes.windows(2) {
        if w[1].maturity <= w[0].maturity {
            return Err(Error::NonMonotoneMaturities { previous: w[0].maturity, next: w[1].maturity });
        }
    }

    let mut breaks: Vec<f64> = Vec::with_capacity(quotes.len());
    let mut values: Vec<f64> = Vec::with_capacity(quotes.len());
    for q in quotes {
        let lambda = solve_segment(q, &breaks, &values, recovery, discount, lambda_max)?;
        values.push(lambda);
        breaks.push(q.maturity);
    }
    breaks.pop();

    let intensity = IntensitySpec::piecewise(breaks, values)?;
    let last = quotes[quotes.len() - 1].maturity;
    let segments = intensity.segments(last);
    let credit = ContinuousCreditAssumptions::new(intensity.clone(), recovery)?;
    let residuals = quotes
        .iter()
        .map(|q| Ok(model_price(&quote_spec(q)?, &credit, discount)? - q.clean_price))
        .collect::<Result<Vec<_>>>()?;

    let years = last.ceil() as u32;
    let intensities: Vec<(u32, f64)> = (1..=years)
        .map(|i| (i, intensity.cumulative(f64::from(i)) - intensity.cumulative(f64::from(i - 1))))
        .collect();
    let conditional_probs = intensities.iter().map(|&(i, l)| (i, -(-l).exp_m1())).collect();

    Ok(CalibrationResult { segments, intensity, intensities, conditional_probs, residuals })
}

/// Yearly conditional default probabilities `1 − e^{−λᵢ}`.
pub fn conditional_default_probabilities(result: &CalibrationResult) -> Vec<f64> {
    result.intensities.iter().map(|&(_, l)| -(-l).exp_m1()).collect()
}
