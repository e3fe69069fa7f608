//! Analytics for defaultable coupon bonds and credit default swaps under
//! simple reduced-form credit models.
//!
//! Two model families are provided:
//!
//! - [`discrete`]: annual periods, a per-period conditional default
//!   probability, coupons paid at the end of each surviving period and the
//!   recovery amount paid at the default date.
//! - [`continuous`]: a deterministic default intensity (constant or
//!   piecewise constant), coupons paid continuously and recovery paid at the
//!   default time.
//!
//! On top of the pricers sit yield-to-maturity and par-yield solvers, CDS
//! fair spreads ([`cds`]), a yearly piecewise-constant hazard bootstrap from
//! bond quotes ([`calibration`]), and a term-structure grid generator
//! ([`curves`]).
//!
//! All rates are decimals (`0.03` is 3%). Bond recovery amounts are quoted
//! per 100 of face value; CDS recovery is a fraction of notional.

pub mod calibration;
pub mod cds;
pub mod continuous;
pub mod curves;
pub mod discrete;
mod error;
pub mod numerics;
pub mod regression;

pub use error::{Error, Result};

/// Nominal value the recovery amount is quoted against.
pub const NOMINAL: f64 = 100.0;

/// Flat risk-free rate, per period (discrete model) or continuously
/// compounded (continuous model).
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct FlatRate(f64);

impl FlatRate {
    pub fn new(r: f64) -> Result<Self> {
        if !r.is_finite() || r < 0.0 {
            return Err(Error::invalid("rate", format!("must be finite and >= 0, got {r}")));
        }
        Ok(Self(r))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Difference between a defaultable yield and the risk-free yield.
pub fn bond_spread(ytm: f64, rate: FlatRate) -> f64 {
    ytm - rate.value()
}

pub(crate) fn check_recovery(recovery: f64) -> Result<()> {
    if !recovery.is_finite() || !(0.0..=NOMINAL).contains(&recovery) {
        return Err(Error::invalid(
            "recovery",
            format!("must lie in [0, 100] per 100 face, got {recovery}"),
        ));
    }
    Ok(())
}
