//! Built-in regression cases with published reference values.
//!
//! Each case recomputes a number from first principles and compares it
//! with a reference at a stated tolerance. Used by the command-line
//! `verify` command.

use crate::cds::{self, CdsHazard, CdsSpec, Kernel};
use crate::continuous::{self, ContinuousBondSpec, ContinuousCreditAssumptions, IntensitySpec};
use crate::discrete::{self, DiscreteBondSpec, DiscreteCreditAssumptions, DiscreteHazard};
use crate::{FlatRate, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct CaseResult {
    pub name: &'static str,
    pub value: f64,
    pub expected: f64,
    pub tolerance: f64,
}

impl CaseResult {
    pub fn passed(&self) -> bool {
        (self.value - self.expected).abs() <= self.tolerance
    }
}

const BP: f64 = 1e-4;

fn discrete_ytm(lambda: f64, maturity: u32, coupon: f64, r: f64) -> Result<f64> {
    let spec = DiscreteBondSpec::with_coupon(coupon, maturity)?;
    let credit = DiscreteCreditAssumptions::new(DiscreteHazard::constant(lambda)?, 80.0)?;
    discrete::ytm(discrete::price(&spec, &credit, FlatRate::new(r)?)?, &spec)
}

fn panel_ytm(coupon: f64) -> Result<f64> {
    let hazard = DiscreteHazard::sequence((0..10).map(|i| 0.1 - 0.002 * f64::from(i)).collect())?;
    let spec = DiscreteBondSpec::with_coupon(coupon, 10)?;
    let credit = DiscreteCreditAssumptions::new(hazard, 80.0)?;
    discrete::ytm(discrete::price(&spec, &credit, FlatRate::new(0.03)?)?, &spec)
}

fn par(lambda: f64) -> Result<f64> {
    let credit = DiscreteCreditAssumptions::new(DiscreteHazard::constant(lambda)?, 80.0)?;
    discrete::par_yield(&credit, FlatRate::new(0.03)?)
}

/// First maturity from which the λ = 1% zero-coupon yield stays above the
/// λ = 10% one, over 1..=30 years.
fn crossing_maturity() -> Result<f64> {
    let mut first = None;
    for t in 1..=30 {
        let above = discrete_ytm(0.01, t, 0.0, 0.03)? > discrete_ytm(0.10, t, 0.0, 0.03)?;
        match (above, first) {
            (true, None) => first = Some(t),
            (false, Some(_)) => first = None,
            _ => {}
        }
    }
    Ok(first.map_or(f64::NAN, f64::from))
}

pub fn run() -> Result<Vec<CaseResult>> {
    let case = |name, value, expected, tolerance| CaseResult { name, value, expected, tolerance };
    let r = FlatRate::new(0.03)?;
    let cont_credit = ContinuousCreditAssumptions::new(IntensitySpec::constant(0.1)?, 80.0)?;
    let cont_spec = ContinuousBondSpec::with_coupon(0.0, 10.0)?;
    let cds_spec = CdsSpec::new(5.0, 0.8, r)?;
    Ok(vec![
        case("discrete ytm, lambda 10%, T 10, C 0", discrete_ytm(0.10, 10, 0.0, 0.03)?, 0.0341, BP),
        case("discrete ytm, lambda 10%, T 10, C 10", discrete_ytm(0.10, 10, 10.0, 0.03)?, 0.0679, BP),
        case("discrete ytm, lambda 1%, T 10, C 15", discrete_ytm(0.01, 10, 15.0, 0.03)?, 0.0353, BP),
        case("discrete par yield, lambda 1%", par(0.01)?, 0.0323, 0.5 * BP),
        case("discrete par yield, lambda 10%", par(0.10)?, 0.0556, 0.5 * BP),
        case("discrete ytm, lambda 10%, T 15, r 3%", discrete_ytm(0.10, 15, 0.0, 0.03)?, 0.0274, BP),
        case("discrete ytm, lambda 10%, T 15, r 2%", discrete_ytm(0.10, 15, 0.0, 0.02)?, 0.0224, BP),
        case("decreasing hazard, T 10, c 4%", panel_ytm(4.0)?, 0.0492, 2.0 * BP),
        case("decreasing hazard, T 10, c 7%", panel_ytm(7.0)?, 0.0584, 2.0 * BP),
        case("zero-coupon crossing maturity", crossing_maturity()?, 13.0, 0.0),
        case(
            "continuous par yield, lambda 10%",
            continuous::par_yield(&cont_credit, r)?,
            0.05,
            1e-15,
        ),
        case(
            "continuous ytm, lambda 10%, T 10, C 0",
            continuous::ytm(continuous::price(&cont_spec, &cont_credit, r)?, &cont_spec)?,
            0.032_822_002_983_896_8,
            1e-12,
        ),
        case(
            "discrete cds spread, lambda 10%",
            cds::spread(&CdsHazard::DiscreteConstant(0.1), &cds_spec, Kernel::default())?,
            0.2 * 0.1 / 0.9,
            1e-12,
        ),
        case(
            "continuous cds spread, lambda 10%",
            cds::spread(&CdsHazard::ContinuousConstant(0.1), &cds_spec, Kernel::default())?,
            0.02,
            1e-12,
        ),
    ])
}

#[cfg(test)]
mod tests {
    #[test]
    fn all_cases_pass() {
        for c in super::run().unwrap() {
            assert!(c.passed(), "{c:?}");
        }
    }
}
