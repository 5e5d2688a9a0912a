//! Floating-point cross-checks: Dormand–Prince integration of a [`RationalODE`]
//! and drift of a candidate first integral along the computed trajectory.

use std::collections::HashMap;

use num_complex::Complex64;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::eval::{BigEvaluator, Evaluator};
use crate::ode::RationalODE;
use crate::ratfun::RationalFunction as RF;
use crate::symbol::{x, y, Symbol, TowerDef};
use crate::tower::diff;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Precision {
    Machine,
    /// About 34 significant digits; only for expressions without formal integrals.
    Extended,
}

#[derive(Clone, Debug)]
pub struct NumericConfig {
    pub rtol: f64,
    pub atol: f64,
    pub precision: Precision,
    /// Samples closer than this to a zero of the denominator end the run.
    pub pole_radius: f64,
    /// Lower limit for formal integrals. `None` starts them at the first point
    /// evaluated, which for a constancy check is the regular starting point.
    pub basepoint: Option<f64>,
    pub max_steps: usize,
    /// Denominator floor for relative drift.
    pub abs_floor: f64,
    /// Drift accepted by [`constancy_check`].
    pub drift_tol: f64,
}

impl Default for NumericConfig {
    fn default() -> Self {
        NumericConfig {
            rtol: 1e-10,
            atol: 1e-12,
            precision: Precision::Machine,
            pole_radius: 1e-6,
            basepoint: None,
            max_steps: 200_000,
            abs_floor: 1e-12,
            drift_tol: 1e-6,
        }
    }
}

impl NumericConfig {
    pub fn with_tol(tol: f64) -> Self {
        NumericConfig { rtol: tol, atol: tol * 1e-2, ..Default::default() }
    }

    fn validate(&self) -> Result<()> {
        let ok = |v: f64| v.is_finite() && v > 0.0;
        if !(ok(self.rtol) && ok(self.atol) && ok(self.abs_floor) && ok(self.drift_tol)) || self.pole_radius < 0.0 {
            return Err(Error::Invalid("tolerances must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Stats {
    pub steps: usize,
    pub rejected: usize,
    pub max_error: f64,
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub samples: Vec<(f64, f64)>,
    pub stats: Stats,
    /// The run stopped short of the target next to a singularity.
    pub near_pole: bool,
    /// The step size collapsed before the target was reached.
    pub underflow: bool,
}

impl Trajectory {
    pub fn last(&self) -> (f64, f64) {
        *self.samples.last().expect("trajectory has a start sample")
    }

    pub fn completed(&self) -> bool {
        !self.near_pole && !self.underflow
    }

    pub fn to_json(&self) -> Value {
        json!({
            "samples": self.samples.len(),
            "end": [self.last().0, self.last().1],
            "steps": self.stats.steps,
            "rejected": self.stats.rejected,
            "max_error_estimate": self.stats.max_error,
            "near_pole": self.near_pole,
            "underflow": self.underflow,
        })
    }
}

fn real_only(v: Complex64, what: &str) -> Result<f64> {
    if !v.re.is_finite() || !v.im.is_finite() {
        return Err(Error::Singular(format!("{what} is not finite")));
    }
    if v.im.abs() > 1e-12 * (1.0 + v.re.abs()) {
        return Err(Error::Unsupported(format!("{what} is complex-valued")));
    }
    Ok(v.re)
}

struct Field {
    rhs: RF,
    den: RF,
    den_x: RF,
    den_y: RF,
    ev: Evaluator,
}

impl Field {
    fn new(e: &RationalODE, cfg: &NumericConfig) -> Result<Self> {
        if let Some(s) = e.rhs.free_symbols().into_iter().find(|&s| s != x() && s != y()) {
            return Err(Error::Numeric(format!("no numeric value for `{s}`")));
        }
        let den = RF::from_poly(e.rhs.den().clone());
        Ok(Field {
            rhs: e.rhs.clone(),
            den_x: diff(&den, x()),
            den_y: diff(&den, y()),
            den,
            ev: Evaluator::new(cfg.basepoint, cfg.atol),
        })
    }

    fn at(&self, f: &RF, px: f64, py: f64, what: &str) -> Result<f64> {
        let v = self.ev.eval_real_complex(f, &[(x(), px), (y(), py)])?;
        real_only(v, what)
    }

    fn slope(&self, px: f64, py: f64) -> Result<f64> {
        self.at(&self.rhs, px, py, "right-hand side")
    }

    /// First-order distance estimate to the zero set of the denominator.
    fn pole_distance(&self, px: f64, py: f64) -> f64 {
        if self.den.is_constant() {
            return f64::INFINITY;
        }
        let d = self.at(&self.den, px, py, "denominator").unwrap_or(0.0);
        let gx = self.at(&self.den_x, px, py, "denominator").unwrap_or(0.0);
        let gy = self.at(&self.den_y, px, py, "denominator").unwrap_or(0.0);
        let g = gx.hypot(gy);
        if d == 0.0 {
            0.0
        } else if g == 0.0 {
            f64::INFINITY
        } else {
            d.abs() / g
        }
    }
}

// Dormand–Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] =
    [5179.0 / 57600.0, 0.0, 7571.0 / 16695.0, 393.0 / 640.0, -92097.0 / 339200.0, 187.0 / 2100.0, 1.0 / 40.0];

/// One Dormand–Prince step; returns the fifth-order value and the error estimate.
fn dopri_step(f: &Field, px: f64, py: f64, h: f64, k0: f64) -> Result<(f64, f64)> {
    let mut k = [0.0; 7];
    k[0] = k0;
    for i in 1..7 {
        let yi = py + h * (0..i).map(|j| A[i][j] * k[j]).sum::<f64>();
        k[i] = f.slope(px + C[i] * h, yi)?;
    }
    let y5 = py + h * (0..7).map(|j| B5[j] * k[j]).sum::<f64>();
    let y4 = py + h * (0..7).map(|j| B4[j] * k[j]).sum::<f64>();
    if !y5.is_finite() {
        return Err(Error::Singular("solution left the finite range".into()));
    }
    Ok((y5, (y5 - y4).abs()))
}

fn initial_step(f: &Field, x0: f64, y0: f64, k0: f64, span: f64, cfg: &NumericConfig) -> f64 {
    let sc = cfg.atol + cfg.rtol * y0.abs();
    let (d0, d1) = (y0.abs() / sc, k0.abs() / sc);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 }.min(span);
    let d2 = match f.slope(x0 + h0, y0 + h0 * k0) {
        Ok(k1) => (k1 - k0).abs() / sc / h0,
        Err(_) => return h0 * 1e-3,
    };
    let h1 = if d1.max(d2) <= 1e-15 { (h0 * 1e-3).max(1e-6) } else { (0.01 / d1.max(d2)).powf(0.2) };
    (100.0 * h0).min(h1).min(span)
}

/// Adaptive integration from `(x0, y0)` to `x1` (in either direction).
pub fn integrate_ode(e: &RationalODE, x0: f64, y0: f64, x1: f64, cfg: &NumericConfig) -> Result<Trajectory> {
    cfg.validate()?;
    let f = Field::new(e, cfg)?;
    let mut k0 = match f.slope(x0, y0) {
        Ok(v) => v,
        Err(Error::Singular(_)) => return Err(Error::Singular(format!("({x0}, {y0}) is a pole"))),
        Err(err) => return Err(err),
    };
    if f.pole_distance(x0, y0) <= cfg.pole_radius {
        return Err(Error::Singular(format!("({x0}, {y0}) is within the pole-exclusion radius")));
    }
    let mut traj =
        Trajectory { samples: vec![(x0, y0)], stats: Stats::default(), near_pole: false, underflow: false };
    let span = x1 - x0;
    if span == 0.0 {
        return Ok(traj);
    }
    let dir = span.signum();
    let (mut px, mut py) = (x0, y0);
    let mut h = dir * initial_step(&f, x0, y0, k0, span.abs(), cfg);
    while dir * (x1 - px) > 0.0 {
        if traj.stats.steps + traj.stats.rejected >= cfg.max_steps {
            traj.underflow = true;
            break;
        }
        let hmin = 1e-14 * (1.0 + px.abs());
        if h.abs() < hmin {
            traj.underflow = true;
            traj.near_pole = f.pole_distance(px, py) < 1e-3 || py.abs() > 1e6 || k0.abs() > 1e12;
            break;
        }
        let last = dir * (x1 - px - h) <= 0.0;
        if last {
            h = x1 - px;
        }
        let attempt = dopri_step(&f, px, py, h, k0).and_then(|(yn, err)| {
            let xn = if last { x1 } else { px + h };
            let kn = f.slope(xn, yn)?;
            Ok((xn, yn, err, kn))
        });
        let (xn, yn, err, kn) = match attempt {
            Ok(v) => v,
            Err(Error::Singular(_)) => {
                traj.stats.rejected += 1;
                h *= 0.25;
                continue;
            }
            Err(other) => return Err(other),
        };
        let scale = cfg.atol + cfg.rtol * py.abs().max(yn.abs());
        let ratio = err / scale;
        if ratio <= 1.0 {
            if f.pole_distance(xn, yn) <= cfg.pole_radius {
                traj.near_pole = true;
                break;
            }
            traj.stats.steps += 1;
            traj.stats.max_error = traj.stats.max_error.max(err);
            traj.samples.push((xn, yn));
            px = xn;
            py = yn;
            k0 = kn;
            let grow = if ratio == 0.0 { 5.0 } else { (0.9 * ratio.powf(-0.2)).clamp(0.2, 5.0) };
            h *= grow;
        } else {
            traj.stats.rejected += 1;
            h *= (0.9 * ratio.powf(-0.2)).clamp(0.1, 0.9);
        }
    }
    Ok(traj)
}

/// Classical fixed-step RK4 with `n` steps; returns the final `y`.
pub fn integrate_rk4(e: &RationalODE, x0: f64, y0: f64, x1: f64, n: usize) -> Result<f64> {
    let f = Field::new(e, &NumericConfig::default())?;
    let h = (x1 - x0) / n as f64;
    let mut py = y0;
    for i in 0..n {
        let px = x0 + i as f64 * h;
        let k1 = f.slope(px, py)?;
        let k2 = f.slope(px + h / 2.0, py + h / 2.0 * k1)?;
        let k3 = f.slope(px + h / 2.0, py + h / 2.0 * k2)?;
        let k4 = f.slope(px + h, py + h * k3)?;
        py += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    Ok(py)
}

fn has_integral(f: &RF) -> bool {
    fn walk(s: Symbol) -> bool {
        match s.tower_def().as_deref() {
            None => false,
            Some(TowerDef::Integral { .. }) => true,
            Some(TowerDef::Exp(a) | TowerDef::Log(a) | TowerDef::Atan(a) | TowerDef::Root { base: a, .. }) => {
                a.symbols().into_iter().any(walk)
            }
        }
    }
    f.symbols().into_iter().any(walk)
}

/// Evaluates an expression at a real point, reusing integral basepoints between calls.
pub struct PointEvaluator<'a> {
    psi: &'a RF,
    cfg: &'a NumericConfig,
    ev: Evaluator,
    fell_back: bool,
}

impl<'a> PointEvaluator<'a> {
    pub fn new(psi: &'a RF, cfg: &'a NumericConfig) -> Self {
        PointEvaluator { psi, cfg, ev: Evaluator::new(cfg.basepoint, cfg.atol), fell_back: false }
    }

    pub fn eval(&mut self, point: &[(Symbol, f64)]) -> Result<f64> {
        if self.cfg.precision == Precision::Extended && !has_integral(self.psi) {
            return extended(self.psi, point);
        }
        real_only(self.eval_complex(point)?, "expression")
    }

    /// Principal-branch value; a constant imaginary part from logarithms of negative numbers is kept.
    pub fn eval_complex(&mut self, point: &[(Symbol, f64)]) -> Result<Complex64> {
        match self.ev.eval_real_complex(self.psi, point) {
            Ok(v) if v.re.is_finite() && v.im.is_finite() => Ok(v),
            Ok(_) => Err(Error::Singular("expression is not finite".into())),
            // A pole between the basepoint and the first point: restart the
            // integrals there instead.
            Err(Error::Numeric(m)) | Err(Error::Singular(m))
                if !self.fell_back && self.cfg.basepoint.is_some() && has_integral(self.psi) =>
            {
                self.fell_back = true;
                self.ev = Evaluator::new(None, self.cfg.atol);
                self.eval_complex(point).map_err(|_| Error::Numeric(m))
            }
            Err(err) => Err(err),
        }
    }
}

fn extended(f: &RF, point: &[(Symbol, f64)]) -> Result<f64> {
    let big = BigEvaluator::new(34, 0);
    let env: HashMap<_, _> = point.iter().map(|&(s, v)| (s, big.real(v))).collect();
    let v = big.eval(f, &env)?;
    let (re, im) = (big.to_f64(&v.re), big.to_f64(&v.im));
    real_only(Complex64::new(re, im), "expression")
}

pub fn eval_expression(psi: &RF, point: &[(Symbol, f64)], cfg: &NumericConfig) -> Result<f64> {
    cfg.validate()?;
    PointEvaluator::new(psi, cfg).eval(point)
}

#[derive(Clone, Debug)]
pub struct ConstancyReport {
    pub max_drift: f64,
    pub psi0: f64,
    pub rows: Vec<(f64, f64, f64)>,
    pub trajectory: Trajectory,
    pub tolerance: f64,
}

impl ConstancyReport {
    pub fn passed(&self) -> bool {
        self.max_drift < self.tolerance
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,y,psi\n");
        for (a, b, c) in &self.rows {
            out.push_str(&format!("{a:e},{b:e},{c:e}\n"));
        }
        out
    }

    pub fn to_json(&self) -> Value {
        json!({
            "max_drift": self.max_drift,
            "psi0": self.psi0,
            "tolerance": self.tolerance,
            "passed": self.passed(),
            "trajectory": self.trajectory.to_json(),
        })
    }
}

/// Integrates `e` and reports the largest relative change of `psi` along the samples.
pub fn constancy_check(
    e: &RationalODE,
    psi: &RF,
    x0: f64,
    y0: f64,
    x1: f64,
    cfg: &NumericConfig,
) -> Result<ConstancyReport> {
    let trajectory = integrate_ode(e, x0, y0, x1, cfg)?;
    let mut pe = PointEvaluator::new(psi, cfg);
    let mut values = Vec::with_capacity(trajectory.samples.len());
    for &(a, b) in &trajectory.samples {
        values.push(pe.eval_complex(&[(x(), a), (y(), b)])?);
    }
    let psi0 = values[0];
    let denom = psi0.norm().max(cfg.abs_floor);
    let max_drift = values.iter().map(|v| (v - psi0).norm() / denom).fold(0.0, f64::max);
    let rows = trajectory.samples.iter().zip(&values).map(|(&(a, b), v)| (a, b, v.re)).collect();
    Ok(ConstancyReport { max_drift, psi0: psi0.re, rows, trajectory, tolerance: cfg.drift_tol })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_value;

    fn ode(s: &str) -> RationalODE {
        RationalODE::parse(s).unwrap()
    }

    /// Solves (x + y - 1) e^y = e for y by bisection on [-5, 1].
    fn implicit_y(px: f64) -> f64 {
        let g = |v: f64| (px + v - 1.0) * v.exp() - std::f64::consts::E;
        let (mut lo, mut hi) = (-5.0_f64, 1.0_f64);
        assert!(g(lo) < 0.0 && g(hi) > 0.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if g(mid) > 0.0 {
                hi = mid
            } else {
                lo = mid
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn matches_implicit_solution() {
        let e = ode("y' = -1/(y+x)");
        let tr = integrate_ode(&e, 1.0, 1.0, 2.0, &NumericConfig::default()).unwrap();
        assert!(tr.completed());
        assert!(tr.samples.windows(2).all(|w| w[1].0 > w[0].0 && w[1].1 < w[0].1));
        let (xe, ye) = tr.last();
        assert_eq!(xe, 2.0);
        assert!((ye - implicit_y(2.0)).abs() < 1e-8);
    }

    #[test]
    fn tighter_tolerance_helps() {
        let e = ode("y' = -1/(y+x)");
        let exact = implicit_y(2.0);
        let err = |tol: f64| {
            let cfg = NumericConfig { rtol: tol, atol: tol, ..Default::default() };
            (integrate_ode(&e, 1.0, 1.0, 2.0, &cfg).unwrap().last().1 - exact).abs()
        };
        for tol in [1e-6, 1e-8] {
            assert!(err(tol) >= 10.0 * err(tol * 1e-2), "{tol}");
        }
    }

    #[test]
    fn constant_field() {
        let tr = integrate_ode(&ode("y' = 0"), -1.0, 3.5, 4.0, &NumericConfig::default()).unwrap();
        assert!(tr.samples.iter().all(|s| s.1 == 3.5));
    }

    #[test]
    fn rk4_order() {
        let e = ode("y' = -1/(y+x)");
        let exact = implicit_y(2.0);
        let e1 = (integrate_rk4(&e, 1.0, 1.0, 2.0, 20).unwrap() - exact).abs();
        let e2 = (integrate_rk4(&e, 1.0, 1.0, 2.0, 40).unwrap() - exact).abs();
        let ratio = e1 / e2;
        assert!((ratio - 16.0).abs() < 0.2 * 16.0, "ratio {ratio}");
    }

    #[test]
    fn pole_handling() {
        let e = ode("y' = 1/(x+y)");
        assert!(matches!(integrate_ode(&e, 1.0, -1.0, 2.0, &NumericConfig::default()), Err(Error::Singular(_))));
        // y' = y^2 blows up at x = 1 from (0, 1).
        let tr = integrate_ode(&ode("y' = y^2"), 0.0, 1.0, 2.0, &NumericConfig::default()).unwrap();
        assert!(tr.near_pole && tr.underflow);
        assert!(tr.last().0 < 1.0);
        let e = ode("y' = 1/(y-1)");
        let tr = integrate_ode(&e, 0.0, 0.0, -1.0, &NumericConfig::default()).unwrap();
        assert!(tr.near_pole || tr.underflow);
        assert!(tr.samples.iter().all(|s| (s.1 - 1.0).abs() > 1e-6));
    }

    #[test]
    fn expressions() {
        let cfg = NumericConfig::default();
        let v = eval_expression(&parse_value("(x+y-1)*exp(y)").unwrap(), &[(x(), 1.0), (y(), 1.0)], &cfg).unwrap();
        assert!((v - std::f64::consts::E).abs() < 1e-14);
        let v = eval_expression(&parse_value("atan(1)").unwrap(), &[], &cfg).unwrap();
        assert!((v - std::f64::consts::FRAC_PI_4).abs() < 1e-15);
        let at_zero = NumericConfig { basepoint: Some(0.0), ..Default::default() };
        let v = eval_expression(&parse_value("Int(s*exp(s), s, y)").unwrap(), &[(y(), 1.0)], &at_zero).unwrap();
        assert!((v - 1.0).abs() < 1e-10);
        let ext = NumericConfig { precision: Precision::Extended, ..Default::default() };
        let v = eval_expression(&parse_value("atan(1)*4").unwrap(), &[], &ext).unwrap();
        assert!((v - std::f64::consts::PI).abs() < 1e-15);
        assert!(eval_expression(&parse_value("a*x").unwrap(), &[(x(), 1.0)], &cfg).is_err());
    }

    #[test]
    fn drift() {
        let e = ode("y' = -1/(y+x)");
        let cfg = NumericConfig::default();
        let good = constancy_check(&e, &parse_value("(x+y-1)*exp(y)").unwrap(), 1.0, 1.0, 2.0, &cfg).unwrap();
        assert!(good.max_drift < 1e-8, "{}", good.max_drift);
        assert!(good.to_csv().starts_with("x,y,psi\n"));
        let one = constancy_check(&e, &RF::one(), 1.0, 1.0, 2.0, &cfg).unwrap();
        assert_eq!(one.max_drift, 0.0);
        let bad = constancy_check(&e, &parse_value("x*exp(y)").unwrap(), 1.0, 1.0, 2.0, &cfg).unwrap();
        assert!(bad.max_drift > 1e-3 && !bad.passed());
    }
}
