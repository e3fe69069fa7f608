//! Discrete-time model: annual periods, one coupon per period.
//!
//! The default time is geometric: conditional on surviving to the start of
//! period `t`, the bond defaults during the period with probability `λ_t`.
//! Coupons are paid at the end of each period the bond survives, the
//! recovery amount is paid at the end of the default period, and the face
//! value at maturity if no default occurred. Payoffs are discounted at a flat
//! per-period risk-free rate.

use serde::{Deserialize, Serialize};

use crate::numerics::{expand_upper, solve_root, RootProblem};
use crate::{check_recovery, Error, FlatRate, Result, NOMINAL};

/// Lowest yield the solver will search; deeper-negative yields are rejected.
pub const YTM_FLOOR: f64 = -0.99;
const YTM_START_HI: f64 = 1.0;
const YTM_EXPANSIONS: u32 = 10;
const YTM_TOL: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscreteBondSpec {
    pub face: f64,
    /// Coupon amount paid per period.
    pub coupon: f64,
    /// Number of annual periods.
    pub maturity: u32,
}

impl DiscreteBondSpec {
    pub fn new(face: f64, coupon: f64, maturity: u32) -> Result<Self> {
        if !face.is_finite() || face <= 0.0 {
            return Err(Error::invalid("face", format!("must be positive, got {face}")));
        }
        if !coupon.is_finite() || coupon < 0.0 {
            return Err(Error::invalid("coupon", format!("must be >= 0, got {coupon}")));
        }
        if maturity == 0 {
            return Err(Error::invalid("maturity", "must be at least one period"));
        }
        Ok(Self { face, coupon, maturity })
    }

    /// Bond with face 100 paying `coupon` per period.
    pub fn with_coupon(coupon: f64, maturity: u32) -> Result<Self> {
        Self::new(NOMINAL, coupon, maturity)
    }

    pub fn coupon_rate(&self) -> f64 {
        self.coupon / self.face
    }
}

/// Conditional per-period default probability.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum DiscreteHazard {
    Constant(f64),
    /// `λ_t` for periods `t = 1, 2, ...`.
    Sequence(Vec<f64>),
}

fn check_probability(field: &'static str, p: f64) -> Result<()> {
    if !p.is_finite() || !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid(field, format!("must lie in [0, 1], got {p}")));
    }
    Ok(())
}

impl DiscreteHazard {
    pub fn constant(lambda: f64) -> Result<Self> {
        check_probability("lambda", lambda)?;
        Ok(Self::Constant(lambda))
    }

    pub fn sequence(lambdas: Vec<f64>) -> Result<Self> {
        if lambdas.is_empty() {
            return Err(Error::invalid("hazard", "sequence is empty"));
        }
        for &l in &lambdas {
            check_probability("hazard", l)?;
        }
        Ok(Self::Sequence(lambdas))
    }

    /// Probability of defaulting in period `t` (1-based) given survival to `t - 1`.
    pub fn at(&self, t: usize) -> f64 {
        match self {
            Self::Constant(l) => *l,
            Self::Sequence(v) => v[t - 1],
        }
    }

    pub fn ensure_covers(&self, periods: usize) -> Result<()> {
        match self {
            Self::Sequence(v) if v.len() < periods => {
                Err(Error::HazardTooShort { len: v.len(), needed: periods })
            }
            _ => Ok(()),
        }
    }

    pub fn as_constant(&self) -> Option<f64> {
        match self {
            Self::Constant(l) => Some(*l),
            Self::Sequence(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteCreditAssumptions {
    pub hazard: DiscreteHazard,
    /// Amount recovered at default, per 100 of face.
    pub recovery: f64,
}

impl DiscreteCreditAssumptions {
    pub fn new(hazard: DiscreteHazard, recovery: f64) -> Result<Self> {
        check_recovery(recovery)?;
        Ok(Self { hazard, recovery })
    }

    fn constant_lambda(&self, what: &'static str) -> Result<f64> {
        self.hazard
            .as_constant()
            .ok_or_else(|| Error::invalid("hazard", format!("{what} needs a constant hazard")))
    }
}

/// Model price as the expected discounted payoff, summed period by period.
///
/// Handles `λ = 1` (certain default in the first period) and time-varying
/// hazards. A `Sequence` whose entries all equal `λ` gives the same bits as
/// `Constant(λ)`.
pub fn price(spec: &DiscreteBondSpec, credit: &DiscreteCreditAssumptions, rate: FlatRate) -> Result<f64> {
    let periods = spec.maturity as usize;
    credit.hazard.ensure_covers(periods)?;
    let recovery = credit.recovery * spec.face / NOMINAL;
    let growth = 1.0 + rate.value();

    let mut survival = 1.0;
    let mut discount = 1.0;
    let mut value = 0.0;
    for t in 1..=periods {
        let lambda = credit.hazard.at(t);
        discount /= growth;
        value += recovery * lambda * survival * discount;
        survival *= 1.0 - lambda;
        value += spec.coupon * survival * discount;
    }
    Ok(value + spec.face * survival * discount)
}

/// Closed form of the constant-hazard price. Requires `λ < 1`.
pub fn price_closed_form(
    spec: &DiscreteBondSpec,
    lambda: f64,
    recovery: f64,
    rate: FlatRate,
) -> Result<f64> {
    check_probability("lambda", lambda)?;
    check_recovery(recovery)?;
    if lambda >= 1.0 {
        return Err(Error::DegenerateHazard("closed-form price"));
    }
    let r = rate.value();
    let t = f64::from(spec.maturity);
    let recovery = recovery * spec.face / NOMINAL;
    // q = (1 - λ) / (1 + r); m = -ln q.
    let m = r.ln_1p() - (-lambda).ln_1p();
    let q_t = (-t * m).exp();
    let k = r + lambda;
    // (1 - λ) / (r + λ) * (1 - q^T), with its small-(r+λ) series.
    let annuity = if k < 1e-9 {
        (1.0 + 0.5 * (lambda - r)) * t * (1.0 - 0.5 * t * m + (t * m).powi(2) / 6.0) * (1.0 - lambda)
    } else {
        (1.0 - lambda) / k * -(-t * m).exp_m1()
    };
    Ok((spec.coupon + recovery * lambda / (1.0 - lambda)) * annuity + spec.face * q_t)
}

/// Annuity factor `Σ_{t=1..T} (1 + y)^{-t}`.
fn annuity(y: f64, periods: u32) -> f64 {
    let t = f64::from(periods);
    if y == 0.0 {
        t
    } else {
        -(-t * y.ln_1p()).exp_m1() / y
    }
}

/// Present value of the contractual cash flows at yield `y`.
pub fn present_value(spec: &DiscreteBondSpec, y: f64) -> f64 {
    let t = f64::from(spec.maturity);
    spec.coupon * annuity(y, spec.maturity) + spec.face * (-t * y.ln_1p()).exp()
}

/// Yield-to-maturity: the unique `y > -0.99` discounting the contractual
/// cash flows to `price`.
pub fn ytm(price: f64, spec: &DiscreteBondSpec) -> Result<f64> {
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

/// Maturity-independent par yield for a constant hazard.
pub fn par_yield(credit: &DiscreteCreditAssumptions, rate: FlatRate) -> Result<f64> {
    let lambda = credit.constant_lambda("par yield")?;
    if lambda >= 1.0 {
        return Err(Error::DegenerateHazard("par yield"));
    }
    Ok((rate.value() + (1.0 - credit.recovery / NOMINAL) * lambda) / (1.0 - lambda))
}

/// Par coupon rate for one maturity under any hazard.
///
/// The price is affine in the coupon, so the par coupon follows from two
/// evaluations. Equals [`par_yield`] for constant hazards.
pub fn par_yield_at(credit: &DiscreteCreditAssumptions, rate: FlatRate, maturity: u32) -> Result<f64> {
    let zero = price(&DiscreteBondSpec::with_coupon(0.0, maturity)?, credit, rate)?;
    let unit = price(&DiscreteBondSpec::with_coupon(1.0, maturity)?, credit, rate)?;
    let annuity = unit - zero;
    if annuity <= 0.0 {
        return Err(Error::DegenerateHazard("par yield"));
    }
    Ok((NOMINAL - zero) / annuity / NOMINAL)
}

/// Coupon-independent gap between any attainable yield and the par yield.
pub fn delta_sup(credit: &DiscreteCreditAssumptions) -> Result<f64> {
    let lambda = credit.constant_lambda("yield bound")?;
    if lambda >= 1.0 {
        return Err(Error::DegenerateHazard("yield bound"));
    }
    Ok(credit.recovery / NOMINAL * lambda / (1.0 - lambda))
}

/// Supremum of the yield over all coupon levels: par yield plus `δ_sup`.
pub fn ytm_upper_bound(credit: &DiscreteCreditAssumptions, rate: FlatRate) -> Result<f64> {
    Ok(par_yield(credit, rate)? + delta_sup(credit)?)
}

/// `P_{T+1} - P_T` for a constant hazard, from the one-period recursion.
///
/// Its sign is the sign of `C - C_par`.
pub fn maturity_increment(
    coupon: f64,
    face: f64,
    credit: &DiscreteCreditAssumptions,
    rate: FlatRate,
    maturity: u32,
) -> Result<f64> {
    let lambda = credit.constant_lambda("price recursion")?;
    let growth = 1.0 + rate.value();
    let recovery = credit.recovery * face / NOMINAL;
    let survival = ((1.0 - lambda) / growth).powi(maturity as i32);
    Ok(survival
        * (coupon * (1.0 - lambda) / growth + recovery * lambda / growth + face * (1.0 - lambda) / growth
            - face))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn credit(lambda: f64, recovery: f64) -> DiscreteCreditAssumptions {
        DiscreteCreditAssumptions::new(DiscreteHazard::constant(lambda).unwrap(), recovery).unwrap()
    }

    fn r(v: f64) -> FlatRate {
        FlatRate::new(v).unwrap()
    }

    // Direct transcription of the expected-payoff sum, kept apart from `price`.
    fn oracle_price(c: f64, t: u32, lambdas: &[f64], rec: f64, rate: f64) -> f64 {
        let mut total = 0.0;
        for s in 1..=t as usize {
            let alive: f64 = lambdas[..s].iter().map(|l| 1.0 - l).product();
            let alive_before: f64 = lambdas[..s - 1].iter().map(|l| 1.0 - l).product();
            let disc = (1.0 + rate).powi(s as i32);
            total += c * alive / disc + rec * lambdas[s - 1] * alive_before / disc;
        }
        let alive: f64 = lambdas[..t as usize].iter().map(|l| 1.0 - l).product();
        total + 100.0 * alive / (1.0 + rate).powi(t as i32)
    }

    #[test]
    fn risk_free_par_bond() {
        let spec = DiscreteBondSpec::with_coupon(3.0, 7).unwrap();
        let p = price(&spec, &credit(0.0, 80.0), r(0.03)).unwrap();
        assert_relative_eq!(p, 100.0, max_relative = 1e-13);
    }

    #[test]
    fn zero_coupon_ten_years() {
        let spec = DiscreteBondSpec::with_coupon(0.0, 10).unwrap();
        let p = price(&spec, &credit(0.1, 80.0), r(0.03)).unwrap();
        let expected = oracle_price(0.0, 10, &[0.1; 10], 80.0, 0.03);
        assert_relative_eq!(expected, 71.517_288_674_388_18, max_relative = 1e-12);
        assert_relative_eq!(p, expected, max_relative = 1e-12);
    }

    #[test]
    fn certain_default_pays_recovery() {
        let spec = DiscreteBondSpec::with_coupon(5.0, 1).unwrap();
        let p = price(&spec, &credit(1.0, 80.0), r(0.03)).unwrap();
        assert_relative_eq!(p, 80.0 / 1.03, max_relative = 1e-14);
        assert!(matches!(
            price_closed_form(&spec, 1.0, 80.0, r(0.03)),
            Err(Error::DegenerateHazard(_))
        ));
    }

    #[test]
    fn short_sequence_rejected() {
        let spec = DiscreteBondSpec::with_coupon(5.0, 4).unwrap();
        let c = DiscreteCreditAssumptions::new(DiscreteHazard::sequence(vec![0.1; 3]).unwrap(), 80.0).unwrap();
        assert!(matches!(price(&spec, &c, r(0.03)), Err(Error::HazardTooShort { len: 3, needed: 4 })));
    }

    #[test]
    fn invalid_inputs() {
        assert!(DiscreteBondSpec::new(0.0, 1.0, 1).is_err());
        assert!(DiscreteBondSpec::new(100.0, -1.0, 1).is_err());
        assert!(DiscreteBondSpec::new(100.0, 1.0, 0).is_err());
        assert!(DiscreteHazard::constant(1.5).is_err());
        assert!(DiscreteHazard::sequence(vec![0.1, -0.1]).is_err());
        assert!(DiscreteCreditAssumptions::new(DiscreteHazard::Constant(0.1), 101.0).is_err());
    }

    #[test]
    fn reference_yields() {
        let c = credit(0.1, 80.0);
        let zero = DiscreteBondSpec::with_coupon(0.0, 10).unwrap();
        let ten = DiscreteBondSpec::with_coupon(10.0, 10).unwrap();
        let y0 = ytm(price(&zero, &c, r(0.03)).unwrap(), &zero).unwrap();
        let y10 = ytm(price(&ten, &c, r(0.03)).unwrap(), &ten).unwrap();
        assert!((y0 - 0.0341).abs() < 5e-5, "{y0}");
        assert!((y10 - 0.0679).abs() < 5e-5, "{y10}");
        assert!((bond_spread_bp(y0) - 41.0).abs() < 0.5);
    }

    fn bond_spread_bp(y: f64) -> f64 {
        crate::bond_spread(y, r(0.03)) * 1e4
    }

    #[test]
    fn par_price_gives_coupon_rate_yield() {
        let spec = DiscreteBondSpec::with_coupon(5.0, 20).unwrap();
        let y = ytm(100.0, &spec).unwrap();
        assert!((y - 0.05).abs() < 1e-14);
    }

    #[test]
    fn ytm_rejects_bad_prices() {
        let spec = DiscreteBondSpec::with_coupon(5.0, 2).unwrap();
        assert!(matches!(ytm(0.0, &spec), Err(Error::InvalidInput { .. })));
        // Above the value at the -99% floor.
        assert!(matches!(ytm(1e9, &spec), Err(Error::NoSolution(_))));
        // Below the value at the largest searched yield.
        assert!(matches!(ytm(1e-6, &spec), Err(Error::NoSolution(_))));
    }

    #[test]
    fn ytm_residual() {
        let spec = DiscreteBondSpec::with_coupon(7.0, 30).unwrap();
        for p in [20.0, 55.5, 100.0, 140.0, 300.0] {
            let y = ytm(p, &spec).unwrap();
            assert!((present_value(&spec, y) - p).abs() <= 1e-12 * spec.face, "{p}");
        }
    }

    #[test]
    fn reference_par_yields() {
        let p1 = par_yield(&credit(0.01, 80.0), r(0.03)).unwrap();
        let p10 = par_yield(&credit(0.1, 80.0), r(0.03)).unwrap();
        assert!((p1 - 0.0323).abs() < 5e-5);
        assert!((p10 - 0.0556).abs() < 5e-5);
        assert_eq!(par_yield(&credit(0.0, 35.0), r(0.03)).unwrap(), 0.03);
        assert!(matches!(par_yield(&credit(1.0, 80.0), r(0.03)), Err(Error::DegenerateHazard(_))));
        let seq = DiscreteCreditAssumptions::new(DiscreteHazard::Sequence(vec![0.1]), 80.0).unwrap();
        assert!(par_yield(&seq, r(0.03)).is_err());
    }

    #[test]
    fn par_coupon_prices_at_face() {
        let c = credit(0.1, 80.0);
        let cp = par_yield(&c, r(0.03)).unwrap();
        for t in [1, 2, 5, 10, 40] {
            let spec = DiscreteBondSpec::with_coupon(100.0 * cp, t).unwrap();
            assert_relative_eq!(price(&spec, &c, r(0.03)).unwrap(), 100.0, max_relative = 1e-12);
            assert_relative_eq!(par_yield_at(&c, r(0.03), t).unwrap(), cp, max_relative = 1e-10);
        }
    }

    #[test]
    fn upper_bounds() {
        assert_relative_eq!(ytm_upper_bound(&credit(0.0, 80.0), r(0.03)).unwrap(), 0.03);
        let no_rec = credit(0.1, 0.0);
        assert_relative_eq!(ytm_upper_bound(&no_rec, r(0.03)).unwrap(), 0.13 / 0.9, max_relative = 1e-14);
        let c = credit(0.1, 80.0);
        let bound = ytm_upper_bound(&c, r(0.03)).unwrap();
        assert_relative_eq!(bound, 0.05 / 0.9 + 0.08 / 0.9, max_relative = 1e-14);
        assert!((bound - 0.144_444).abs() < 1e-6);
        // The yield approaches the bound from below as the coupon grows.
        let mut last = f64::NEG_INFINITY;
        for coupon in [0.0, 10.0, 100.0, 1e3, 1e4, 1e5, 1e6] {
            let spec = DiscreteBondSpec::with_coupon(coupon, 10).unwrap();
            let y = ytm(price(&spec, &c, r(0.03)).unwrap(), &spec).unwrap();
            assert!(y < bound && y > last);
            last = y;
        }
        assert!(bound - last < 1e-4, "sup {last} vs bound {bound}");
    }

    #[test]
    fn recursion_matches_price_difference() {
        let c = credit(0.07, 60.0);
        for coupon in [0.0, 4.0, 9.0] {
            for t in 1..20 {
                let a = price(&DiscreteBondSpec::with_coupon(coupon, t).unwrap(), &c, r(0.02)).unwrap();
                let b = price(&DiscreteBondSpec::with_coupon(coupon, t + 1).unwrap(), &c, r(0.02)).unwrap();
                let inc = maturity_increment(coupon, 100.0, &c, r(0.02), t).unwrap();
                assert!((b - a - inc).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn closed_form_near_zero_rate_and_hazard() {
        let spec = DiscreteBondSpec::with_coupon(4.0, 25).unwrap();
        for (l, rr) in [(0.0, 0.0), (3e-10, 2e-10), (1e-10, 0.0), (0.0, 5e-10)] {
            let cf = price_closed_form(&spec, l, 80.0, r(rr)).unwrap();
            let sum = price(&spec, &credit(l, 80.0), r(rr)).unwrap();
            assert_relative_eq!(cf, sum, max_relative = 1e-12);
        }
    }

    proptest! {
        #[test]
        fn closed_form_matches_summation(
            coupon in 0.0f64..30.0, t in 1u32..60, lambda in 0.0f64..0.99,
            rec in 0.0f64..100.0, rate in 0.0f64..0.2,
        ) {
            let spec = DiscreteBondSpec::with_coupon(coupon, t).unwrap();
            let cf = price_closed_form(&spec, lambda, rec, r(rate)).unwrap();
            let sum = price(&spec, &credit(lambda, rec), r(rate)).unwrap();
            prop_assert!(((cf - sum) / sum).abs() <= 1e-10);
            let lambdas = vec![lambda; t as usize];
            let oracle = oracle_price(coupon, t, &lambdas, rec, rate);
            prop_assert!(((oracle - sum) / sum).abs() <= 1e-10);
        }

        #[test]
        fn sequence_of_equal_entries_is_constant(
            coupon in 0.0f64..20.0, t in 1u32..40, lambda in 0.0f64..1.0, rec in 0.0f64..100.0,
        ) {
            let spec = DiscreteBondSpec::with_coupon(coupon, t).unwrap();
            let seq = DiscreteCreditAssumptions::new(DiscreteHazard::Sequence(vec![lambda; t as usize]), rec).unwrap();
            let a = price(&spec, &credit(lambda, rec), r(0.03)).unwrap();
            let b = price(&spec, &seq, r(0.03)).unwrap();
            prop_assert_eq!(a.to_bits(), b.to_bits());
        }

        #[test]
        fn time_varying_matches_oracle(
            lambdas in proptest::collection::vec(0.0f64..0.5, 1..30), coupon in 0.0f64..15.0, rec in 0.0f64..100.0,
        ) {
            let t = lambdas.len() as u32;
            let spec = DiscreteBondSpec::with_coupon(coupon, t).unwrap();
            let c = DiscreteCreditAssumptions::new(DiscreteHazard::sequence(lambdas.clone()).unwrap(), rec).unwrap();
            let p = price(&spec, &c, r(0.03)).unwrap();
            let o = oracle_price(coupon, t, &lambdas, rec, 0.03);
            prop_assert!(((p - o) / o).abs() <= 1e-12);
        }

        #[test]
        fn zero_hazard_or_recovery_is_flat(
            coupon in 0.0f64..30.0, t in 1u32..50, lambda in 0.0f64..0.5, rate in 0.0f64..0.1, zero_rec in any::<bool>(),
        ) {
            let c = if zero_rec { credit(lambda, 0.0) } else { credit(0.0, 80.0) };
            let spec = DiscreteBondSpec::with_coupon(coupon, t).unwrap();
            let y = ytm(price(&spec, &c, r(rate)).unwrap(), &spec).unwrap();
            prop_assert!((y - par_yield(&c, r(rate)).unwrap()).abs() <= 1e-10);
        }
    }
}
