//! Yield term-structure grids over maturity × coupon rate.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::continuous::{self, ContinuousBondSpec, ContinuousCreditAssumptions, IntensitySpec};
use crate::discrete::{self, DiscreteBondSpec, DiscreteCreditAssumptions, DiscreteHazard};
use crate::{bond_spread, check_recovery, Error, FlatRate, Result, NOMINAL};

pub const FLAT_TOL: f64 = 1e-10;
pub const CSV_HEADER: &str = "model,maturity,coupon_rate,price,ytm,spread";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ScenarioModel {
    Discrete(DiscreteHazard),
    Continuous(IntensitySpec),
}

impl ScenarioModel {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Discrete(_) => "discrete",
            Self::Continuous(_) => "continuous",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub model: ScenarioModel,
    /// Ascending, positive; whole years for the discrete model.
    pub maturities: Vec<f64>,
    /// Coupon rates as fractions of face.
    pub coupon_rates: Vec<f64>,
    /// Recovery per 100 face.
    pub recovery: f64,
    pub risk_free: FlatRate,
}

impl ScenarioSpec {
    pub fn validate(&self) -> Result<()> {
        check_recovery(self.recovery)?;
        if self.maturities.is_empty() {
            return Err(Error::invalid("maturities", "empty"));
        }
        if self.coupon_rates.is_empty() {
            return Err(Error::invalid("coupon_rates", "empty"));
        }
        if let Some(&t) = self.maturities.iter().find(|t| !t.is_finite() || **t <= 0.0) {
            return Err(Error::invalid("maturities", format!("must be positive, got {t}")));
        }
        if let Some(w) = self.maturities.windows(2).find(|w| w[1] <= w[0]) {
            return Err(Error::NonMonotoneMaturities { previous: w[0], next: w[1] });
        }
        if let Some(&c) = self.coupon_rates.iter().find(|c| !c.is_finite() || **c < 0.0) {
            return Err(Error::invalid("coupon_rates", format!("must be >= 0, got {c}")));
        }
        if let ScenarioModel::Discrete(h) = &self.model {
            if let Some(&t) = self.maturities.iter().find(|t| t.fract() != 0.0) {
                return Err(Error::invalid("maturities", format!("discrete model needs whole years, got {t}")));
            }
            h.ensure_covers(self.maturities[self.maturities.len() - 1] as usize)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub model: &'static str,
    pub maturity: f64,
    pub coupon_rate: f64,
    pub price: f64,
    pub ytm: f64,
    pub spread: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveTable {
    pub rows: Vec<CurveRow>,
    /// Maturity-independent par yield, when the hazard is constant.
    pub par_yield: Option<f64>,
    /// Par coupon rate per maturity.
    pub par_curve: Vec<(f64, f64)>,
}

impl CurveTable {
    /// Yields for one coupon rate, in maturity order.
    pub fn column(&self, coupon_rate: f64) -> Vec<f64> {
        self.rows.iter().filter(|r| r.coupon_rate == coupon_rate).map(|r| r.ytm).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(64 * (self.rows.len() + 1));
        out.push_str(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{:.15e},{:.15e},{:.15e}",
                r.model, r.maturity, r.coupon_rate, r.price, r.ytm, r.spread
            );
        }
        out
    }
}

fn cell(spec: &ScenarioSpec, maturity: f64, coupon_rate: f64) -> Result<CurveRow> {
    let coupon = NOMINAL * coupon_rate;
    let (price, ytm) = match &spec.model {
        ScenarioModel::Discrete(h) => {
            let bond = DiscreteBondSpec::with_coupon(coupon, maturity as u32)?;
            let credit = DiscreteCreditAssumptions::new(h.clone(), spec.recovery)?;
            let p = discrete::price(&bond, &credit, spec.risk_free)?;
            (p, discrete::ytm(p, &bond)?)
        }
        ScenarioModel::Continuous(h) => {
            let bond = ContinuousBondSpec::with_coupon(coupon, maturity)?;
            let credit = ContinuousCreditAssumptions::new(h.clone(), spec.recovery)?;
            let p = continuous::price(&bond, &credit, spec.risk_free)?;
            (p, continuous::ytm(p, &bond)?)
        }
    };
    Ok(CurveRow {
        model: spec.model.name(),
        maturity,
        coupon_rate,
        price,
        ytm,
        spread: bond_spread(ytm, spec.risk_free),
    })
}

fn par_at(spec: &ScenarioSpec, maturity: f64) -> Result<f64> {
    match &spec.model {
        ScenarioModel::Discrete(h) => {
            let credit = DiscreteCreditAssumptions::new(h.clone(), spec.recovery)?;
            discrete::par_yield_at(&credit, spec.risk_free, maturity as u32)
        }
        ScenarioModel::Continuous(h) => {
            let credit = ContinuousCreditAssumptions::new(h.clone(), spec.recovery)?;
            continuous::par_yield_at(&credit, spec.risk_free, maturity)
        }
    }
}

/// Evaluates every (maturity, coupon) cell. Cells run in parallel; rows come
/// back maturity-major regardless of scheduling.
pub fn generate(spec: &ScenarioSpec) -> Result<CurveTable> {
    spec.validate()?;
    let cells: Vec<(f64, f64)> = spec
        .maturities
        .iter()
        .flat_map(|&t| spec.coupon_rates.iter().map(move |&c| (t, c)))
        .collect();
    let rows = cells
        .par_iter()
        .map(|&(t, c)| {
            cell(spec, t, c).map_err(|e| Error::Cell { maturity: t, coupon_rate: c, source: Box::new(e) })
        })
        .collect::<Result<Vec<_>>>()?;
    let par_yield = match &spec.model {
        ScenarioModel::Discrete(DiscreteHazard::Constant(l)) if *l < 1.0 => {
            Some(discrete::par_yield(&DiscreteCreditAssumptions::new(DiscreteHazard::Constant(*l), spec.recovery)?, spec.risk_free)?)
        }
        ScenarioModel::Continuous(IntensitySpec::Constant(l)) => Some(continuous::par_yield(
            &ContinuousCreditAssumptions::new(IntensitySpec::Constant(*l), spec.recovery)?,
            spec.risk_free,
        )?),
        _ => None,
    };
    let par_curve = spec
        .maturities
        .iter()
        .map(|&t| Ok((t, par_at(spec, t)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(CurveTable { rows, par_yield, par_curve })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Slope {
    MonotoneIncreasing,
    MonotoneDecreasing,
    Flat,
    Humped,
    Other,
}

impl Slope {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::MonotoneIncreasing => "monotone-increasing",
            Self::MonotoneDecreasing => "monotone-decreasing",
            Self::Flat => "flat",
            Self::Humped => "humped",
            Self::Other => "other",
        }
    }
}

impl std::fmt::Display for Slope {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Shape of a yield column. Steps within [`FLAT_TOL`] count as flat; a hump
/// is a single change from rising to falling. Fewer than two points is flat.
pub fn classify_slope(column: &[f64]) -> Slope {
    let signs: Vec<i8> = column
        .windows(2)
        .map(|w| w[1] - w[0])
        .filter(|d| d.abs() > FLAT_TOL)
        .map(|d| if d > 0.0 { 1 } else { -1 })
        .collect();
    if signs.is_empty() {
        return Slope::Flat;
    }
    let changes: Vec<(i8, i8)> = signs.windows(2).filter(|w| w[0] != w[1]).map(|w| (w[0], w[1])).collect();
    match (changes.as_slice(), signs[0]) {
        ([], 1) => Slope::MonotoneIncreasing,
        ([], _) => Slope::MonotoneDecreasing,
        ([(1, -1)], _) => Slope::Humped,
        _ => Slope::Other,
    }
}
