//! Bracketed root finding and adaptive quadrature.
//!
//! Both kernels are deterministic: identical inputs give bit-identical
//! outputs, and neither keeps any state between calls.

use crate::{Error, Result};

pub const DEFAULT_TOL_X: f64 = 1e-12;
pub const DEFAULT_MAX_ITER: usize = 200;
pub const DEFAULT_QUAD_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_DEPTH: u32 = 50;

/// Bracketed scalar root problem.
#[derive(Clone)]
pub struct RootProblem<F> {
    pub objective: F,
    pub lo: f64,
    pub hi: f64,
    pub tol_x: f64,
    pub max_iter: usize,
}

impl<F: Fn(f64) -> f64> RootProblem<F> {
    pub fn new(objective: F, lo: f64, hi: f64) -> Self {
        Self { objective, lo, hi, tol_x: DEFAULT_TOL_X, max_iter: DEFAULT_MAX_ITER }
    }

    pub fn tol_x(mut self, tol_x: f64) -> Self {
        self.tol_x = tol_x;
        self
    }

    pub fn max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }
}

fn eval<F: Fn(f64) -> f64>(f: &F, x: f64) -> Result<f64> {
    let y = f(x);
    if y.is_finite() {
        Ok(y)
    } else {
        Err(Error::NonFinite { x })
    }
}

fn same_sign(a: f64, b: f64) -> bool {
    (a > 0.0 && b > 0.0) || (a < 0.0 && b < 0.0)
}

/// Brent's method: bisection safeguarded inverse quadratic / secant steps.
///
/// The returned `x` lies within `tol_x` (plus a few ulps of `x`) of the sign
/// change in `[lo, hi]`.
pub fn solve_root<F: Fn(f64) -> f64>(problem: &RootProblem<F>) -> Result<f64> {
    let RootProblem { ref objective, lo, hi, tol_x, max_iter } = *problem;
    if !lo.is_finite() || !hi.is_finite() || lo >= hi {
        return Err(Error::InvalidBracket { lo, hi });
    }
    if tol_x.is_nan() || tol_x <= 0.0 {
        return Err(Error::invalid("tol_x", format!("must be positive, got {tol_x}")));
    }

    let (mut a, mut b) = (lo, hi);
    let mut fa = eval(objective, a)?;
    let mut fb = eval(objective, b)?;
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if same_sign(fa, fb) {
        return Err(Error::NoSignChange { lo, hi, f_lo: fa, f_hi: fb });
    }

    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;

    for _ in 0..max_iter {
        if same_sign(fb, fc) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }

        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol_x;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Ok(b);
        }

        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q) = if a == c {
                (2.0 * xm * s, 1.0 - s)
            } else {
                let qa = fa / fc;
                let rb = fb / fc;
                (
                    s * (2.0 * xm * qa * (qa - rb) - (b - a) * (rb - 1.0)),
                    (qa - 1.0) * (rb - 1.0) * (s - 1.0),
                )
            };
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let bound = (3.0 * xm * q - (tol1 * q).abs()).min((e * q).abs());
            if 2.0 * p < bound {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }

        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = eval(objective, b)?;
    }

    Err(Error::MaxIterExceeded { iterations: max_iter, last_x: b })
}

/// Doubles `hi` until `f` changes sign over `[lo, hi]`, at most
/// `max_expansions` times.
pub fn expand_upper<F: Fn(f64) -> f64>(
    f: &F,
    lo: f64,
    mut hi: f64,
    max_expansions: u32,
) -> Result<(f64, f64)> {
    let f_lo = eval(f, lo)?;
    let mut f_hi = eval(f, hi)?;
    let mut n = 0;
    while same_sign(f_lo, f_hi) {
        if n == max_expansions {
            return Err(Error::NoSignChange { lo, hi, f_lo, f_hi });
        }
        hi *= 2.0;
        f_hi = eval(f, hi)?;
        n += 1;
    }
    Ok((lo, hi))
}

/// Definite integral over `[a, b]` to an absolute tolerance.
#[derive(Clone)]
pub struct QuadProblem<F> {
    pub integrand: F,
    pub a: f64,
    pub b: f64,
    pub tol: f64,
    pub max_depth: u32,
}

impl<F: Fn(f64) -> f64> QuadProblem<F> {
    pub fn new(integrand: F, a: f64, b: f64) -> Self {
        Self { integrand, a, b, tol: DEFAULT_QUAD_TOL, max_depth: DEFAULT_MAX_DEPTH }
    }

    pub fn tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn max_depth(mut self, depth: u32) -> Self {
        self.max_depth = depth;
        self
    }
}

struct Simpson<'a, F> {
    f: &'a F,
    max_depth: u32,
}

// Refinement is forced for the first few levels so that a lucky match of the
// coarse and halved estimates cannot end the recursion early.
const MIN_DEPTH: u32 = 4;

impl<F: Fn(f64) -> f64> Simpson<'_, F> {
    #[allow(clippy::too_many_arguments)]
    fn refine(
        &self,
        a: f64,
        fa: f64,
        m: f64,
        fm: f64,
        b: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> Result<f64> {
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = eval(self.f, lm)?;
        let frm = eval(self.f, rm)?;
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;

        let settled = depth >= MIN_DEPTH
            && (delta.abs() <= 15.0 * tol
                || delta.abs() <= 15.0 * f64::EPSILON * (left.abs() + right.abs()));
        // Intervals a few hundred ulps wide stop refining: a jump inside one
        // costs at most its width times the jump size.
        let tiny = b - a <= 256.0 * f64::EPSILON * a.abs().max(b.abs()).max(1.0);
        if settled || tiny || lm <= a || rm >= b {
            return Ok(left + right + delta / 15.0);
        }
        if depth >= self.max_depth {
            return Err(Error::ToleranceNotReached { a, b, tol });
        }
        let half = 0.5 * tol;
        let l = self.refine(a, fa, lm, flm, m, fm, left, half, depth + 1)?;
        let r = self.refine(m, fm, rm, frm, b, fb, right, half, depth + 1)?;
        Ok(l + r)
    }
}

/// Adaptive Simpson quadrature with interval halving.
pub fn integrate<F: Fn(f64) -> f64>(problem: &QuadProblem<F>) -> Result<f64> {
    let QuadProblem { ref integrand, a, b, tol, max_depth } = *problem;
    if !a.is_finite() || !b.is_finite() || a > b {
        return Err(Error::invalid("interval", format!("need finite a <= b, got [{a}, {b}]")));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::invalid("tol", format!("must be positive, got {tol}")));
    }
    if a == b {
        return Ok(0.0);
    }
    let m = 0.5 * (a + b);
    let fa = eval(integrand, a)?;
    let fm = eval(integrand, m)?;
    let fb = eval(integrand, b)?;
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    Simpson { f: integrand, max_depth }.refine(a, fa, m, fm, b, fb, whole, tol, 0)
}

/// Integrates over consecutive pieces `[p0, p1], [p1, p2], ...`, splitting the
/// tolerance evenly. Used where the integrand has known kinks.
pub fn integrate_pieces<F: Fn(f64) -> f64>(integrand: &F, points: &[f64], tol: f64) -> Result<f64> {
    let pieces = points.len().saturating_sub(1).max(1) as f64;
    points.windows(2).try_fold(0.0, |acc, w| {
        Ok(acc + integrate(&QuadProblem::new(integrand, w[0], w[1]).tol(tol / pieces))?)
    })
}
