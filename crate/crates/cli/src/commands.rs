//! One function per subcommand, each producing an output table.

use credit_ytm::calibration::{self, BondQuote, DiscountSpec, ZeroCurve};
use credit_ytm::cds::{self, CdsHazard, CdsSpec, Kernel, LinearIntensity};
use credit_ytm::continuous::{self, ContinuousBondSpec, ContinuousCreditAssumptions, IntensitySpec};
use credit_ytm::curves::{self, ScenarioModel, ScenarioSpec};
use credit_ytm::discrete::{self, DiscreteBondSpec, DiscreteCreditAssumptions, DiscreteHazard};
use credit_ytm::{regression, FlatRate};

use crate::output::{Cell, Table};
use crate::{input, BondArgs, BootstrapArgs, CdsArgs, CliError, CreditArgs, CurveArgs, HazardInterp, KernelArg, Model, YtmArgs};

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

fn required<T: Copy>(value: Option<T>, flag: &str) -> Result<T, CliError> {
    value.ok_or_else(|| invalid(format!("{flag} is required")))
}

fn model_name(model: Model) -> &'static str {
    match model {
        Model::Discrete => "discrete",
        Model::Continuous => "continuous",
    }
}

fn whole_years(maturity: f64, flag: &str) -> Result<u32, CliError> {
    if maturity.fract() != 0.0 || !(1.0..=f64::from(u32::MAX)).contains(&maturity) {
        return Err(invalid(format!("{flag}: discrete model needs a whole number of years >= 1, got {maturity}")));
    }
    Ok(maturity as u32)
}

/// Hazard rows from a file as `(time, lambda)`, times strictly ascending.
fn hazard_rows(a: &CreditArgs) -> Result<Vec<(f64, f64)>, CliError> {
    let path = a.hazard_file.as_deref().ok_or_else(|| invalid("one of --lambda or --hazard-file is required"))?;
    let rows = input::hazard(path)?;
    if rows.windows(2).any(|w| w[1].0 <= w[0].0) {
        return Err(invalid("hazard file: period_or_time must be strictly ascending"));
    }
    Ok(rows)
}

fn discrete_hazard(a: &CreditArgs) -> Result<DiscreteHazard, CliError> {
    if let Some(l) = a.lambda {
        return Ok(DiscreteHazard::constant(l)?);
    }
    let rows = hazard_rows(a)?;
    if rows.iter().enumerate().any(|(i, r)| r.0 != (i + 1) as f64) {
        return Err(invalid("hazard file: discrete periods must run 1, 2, 3, ..."));
    }
    Ok(DiscreteHazard::sequence(rows.into_iter().map(|r| r.1).collect())?)
}

fn step_intensity(a: &CreditArgs) -> Result<IntensitySpec, CliError> {
    if let Some(l) = a.lambda {
        return Ok(IntensitySpec::constant(l)?);
    }
    if a.hazard_interp == HazardInterp::Linear {
        return Err(invalid("hazard-interp: linear intensities are only supported by the cds command"));
    }
    let rows = hazard_rows(a)?;
    if rows[0].0 <= 0.0 {
        return Err(invalid("hazard file: times must be positive"));
    }
    let breaks = rows[..rows.len() - 1].iter().map(|r| r.0).collect();
    Ok(IntensitySpec::piecewise(breaks, rows.iter().map(|r| r.1).collect())?)
}

fn rate(a: &CreditArgs) -> Result<FlatRate, CliError> {
    Ok(FlatRate::new(required(a.rate, "--rate")?)?)
}

fn coupon(a: &BondArgs) -> Result<f64, CliError> {
    match (a.coupon, a.coupon_rate) {
        (Some(c), _) => Ok(c),
        (None, Some(c)) => Ok(100.0 * c),
        (None, None) => Err(invalid("one of --coupon or --coupon-rate is required")),
    }
}

enum Bond {
    Discrete(DiscreteBondSpec),
    Continuous(ContinuousBondSpec),
}

fn bond(a: &BondArgs) -> Result<Bond, CliError> {
    let c = coupon(a)?;
    let t = required(a.maturity, "--maturity")?;
    Ok(match a.credit.model {
        Model::Discrete => Bond::Discrete(DiscreteBondSpec::with_coupon(c, whole_years(t, "maturity")?)?),
        Model::Continuous => Bond::Continuous(ContinuousBondSpec::with_coupon(c, t)?),
    })
}

fn model_price(a: &BondArgs, b: &Bond) -> Result<f64, CliError> {
    let c = &a.credit;
    let recovery = required(c.recovery, "--recovery")?;
    Ok(match b {
        Bond::Discrete(spec) => {
            let credit = DiscreteCreditAssumptions::new(discrete_hazard(c)?, recovery)?;
            discrete::price(spec, &credit, rate(c)?)?
        }
        Bond::Continuous(spec) => {
            let credit = ContinuousCreditAssumptions::new(step_intensity(c)?, recovery)?;
            continuous::price(spec, &credit, rate(c)?)?
        }
    })
}

fn bond_table(a: &BondArgs, value_name: &'static str, value: f64) -> Result<Table, CliError> {
    let mut t = Table::new(vec!["model", "maturity", "coupon", value_name]);
    t.rows.push(vec![
        Cell::Text(model_name(a.credit.model).into()),
        Cell::Key(required(a.maturity, "--maturity")?),
        Cell::Key(coupon(a)?),
        Cell::Value(value),
    ]);
    Ok(t.with_text(value.to_string()))
}

pub fn price(a: &BondArgs) -> Result<Table, CliError> {
    let p = model_price(a, &bond(a)?)?;
    bond_table(a, "price", p)
}

pub fn ytm(a: &YtmArgs) -> Result<Table, CliError> {
    let b = bond(&a.bond)?;
    let p = match a.price {
        Some(p) => p,
        None => model_price(&a.bond, &b)?,
    };
    let y = match &b {
        Bond::Discrete(spec) => discrete::ytm(p, spec)?,
        Bond::Continuous(spec) => continuous::ytm(p, spec)?,
    };
    bond_table(&a.bond, "ytm", y)
}

pub fn par_yield(a: &BondArgs) -> Result<Table, CliError> {
    let c = &a.credit;
    let recovery = required(c.recovery, "--recovery")?;
    let r = rate(c)?;
    let value = match (c.model, a.maturity) {
        (Model::Discrete, None) => {
            discrete::par_yield(&DiscreteCreditAssumptions::new(discrete_hazard(c)?, recovery)?, r)?
        }
        (Model::Discrete, Some(t)) => discrete::par_yield_at(
            &DiscreteCreditAssumptions::new(discrete_hazard(c)?, recovery)?,
            r,
            whole_years(t, "maturity")?,
        )?,
        (Model::Continuous, None) => {
            continuous::par_yield(&ContinuousCreditAssumptions::new(step_intensity(c)?, recovery)?, r)?
        }
        (Model::Continuous, Some(t)) => {
            continuous::par_yield_at(&ContinuousCreditAssumptions::new(step_intensity(c)?, recovery)?, r, t)?
        }
    };
    let mut t = Table::new(vec!["model", "maturity", "par_yield"]);
    t.rows.push(vec![
        Cell::Text(model_name(c.model).into()),
        a.maturity.map_or(Cell::Text(String::new()), Cell::Key),
        Cell::Value(value),
    ]);
    Ok(t.with_text(value.to_string()))
}

pub fn curve(a: &CurveArgs) -> Result<Table, CliError> {
    let c = &a.credit;
    let model = match c.model {
        Model::Discrete => ScenarioModel::Discrete(discrete_hazard(c)?),
        Model::Continuous => ScenarioModel::Continuous(step_intensity(c)?),
    };
    let spec = ScenarioSpec {
        model,
        maturities: a.maturities.0.clone(),
        coupon_rates: a.coupon_rates.0.clone(),
        recovery: required(c.recovery, "--recovery")?,
        risk_free: rate(c)?,
    };
    let grid = curves::generate(&spec)?;
    let headers = curves::CSV_HEADER.split(',').collect();
    let mut t = Table::new(headers);
    t.rows = grid
        .rows
        .iter()
        .map(|r| {
            vec![
                Cell::Text(r.model.into()),
                Cell::Key(r.maturity),
                Cell::Key(r.coupon_rate),
                Cell::Value(r.price),
                Cell::Value(r.ytm),
                Cell::Value(r.spread),
            ]
        })
        .collect();
    Ok(t)
}

fn cds_hazard(a: &CreditArgs) -> Result<CdsHazard, CliError> {
    Ok(match (a.model, a.lambda) {
        (Model::Discrete, Some(l)) => CdsHazard::DiscreteConstant(l),
        (Model::Discrete, None) => match discrete_hazard(a)? {
            DiscreteHazard::Sequence(v) => CdsHazard::DiscreteSequence(v),
            DiscreteHazard::Constant(l) => CdsHazard::DiscreteConstant(l),
        },
        (Model::Continuous, Some(l)) => CdsHazard::ContinuousConstant(l),
        (Model::Continuous, None) if a.hazard_interp == HazardInterp::Linear => {
            CdsHazard::ContinuousPiecewiseLinear(LinearIntensity::new(hazard_rows(a)?)?)
        }
        (Model::Continuous, None) => match step_intensity(a)? {
            IntensitySpec::PiecewiseConstant { breaks, values } => {
                CdsHazard::ContinuousPiecewiseConstant { breaks, values }
            }
            IntensitySpec::Constant(l) => CdsHazard::ContinuousConstant(l),
        },
    })
}

pub fn cds(a: &CdsArgs) -> Result<Table, CliError> {
    let c = &a.credit;
    // The only place bond-style recovery (per 100) becomes a CDS fraction.
    let recovery = match (a.recovery_fraction, c.recovery) {
        (Some(f), _) => f,
        (None, Some(r)) => r / 100.0,
        (None, None) => return Err(invalid("one of --recovery-fraction or --recovery is required")),
    };
    let maturities = match (&a.maturities, a.maturity) {
        (Some(list), _) => list.0.clone(),
        (None, Some(t)) => vec![t],
        (None, None) => return Err(invalid("one of --maturity or --maturities is required")),
    };
    let kernel = match a.kernel {
        KernelArg::Paper => Kernel::PaperLiteral,
        KernelArg::Consistent => Kernel::ConsistentSurvival,
    };
    let template = CdsSpec::new(maturities[0], recovery, rate(c)?)?;
    let spreads = cds::spread_curve(&cds_hazard(c)?, &template, &maturities, kernel)?;
    let mut t = Table::new(vec!["model", "maturity", "spread"]);
    t.rows = spreads
        .iter()
        .map(|&(m, s)| vec![Cell::Text(model_name(c.model).into()), Cell::Key(m), Cell::Value(s)])
        .collect();
    if let [(_, s)] = spreads[..] {
        t = t.with_text(s.to_string());
    }
    Ok(t)
}

pub fn bootstrap(a: &BootstrapArgs) -> Result<Table, CliError> {
    let quotes = input::quotes(&a.quotes_file)?
        .into_iter()
        .map(|q| BondQuote::new(q.maturity_years, q.coupon_rate, q.clean_price))
        .collect::<Result<Vec<_>, _>>()?;
    let discount = match (&a.zero_curve_file, a.rate) {
        (Some(path), _) => DiscountSpec::ZeroCurve(ZeroCurve::new(input::zero_curve(path)?)?),
        (None, Some(r)) => DiscountSpec::Flat(FlatRate::new(r)?),
        (None, None) => return Err(invalid("one of --rate or --zero-curve-file is required")),
    };
    let res = calibration::bootstrap(&quotes, a.recovery, &discount, a.lambda_max)?;
    let mut t = Table::new(vec!["year", "lambda", "conditional_default_probability"]);
    t.rows = res
        .intensities
        .iter()
        .zip(&res.conditional_probs)
        .map(|(&(year, l), &(_, p))| vec![Cell::Key(f64::from(year)), Cell::Value(l), Cell::Value(p)])
        .collect();
    Ok(t)
}

pub fn verify() -> Result<(Table, bool), CliError> {
    let cases = regression::run()?;
    let mut t = Table::new(vec!["case", "value", "expected", "tolerance", "passed"]);
    let mut text = Vec::with_capacity(cases.len() + 1);
    for c in &cases {
        let status = if c.passed() { "PASS" } else { "FAIL" };
        text.push(format!("{status} {}: {} (expected {} ± {})", c.name, c.value, c.expected, c.tolerance));
        t.rows.push(vec![
            Cell::Text(c.name.into()),
            Cell::Value(c.value),
            Cell::Value(c.expected),
            Cell::Value(c.tolerance),
            Cell::Flag(c.passed()),
        ]);
    }
    let passed = cases.iter().filter(|c| c.passed()).count();
    text.push(format!("{passed}/{} cases passed", cases.len()));
    Ok((t.with_text(text.join("\n")), passed == cases.len()))
}
