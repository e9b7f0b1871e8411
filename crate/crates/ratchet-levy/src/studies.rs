//! Parameter sweeps and barrier optimization over the closed forms.

use crate::error::{LevyError, Result};
use crate::models::LevyModel;
use crate::ruin::laplace_ruin;
use crate::valuation::{value, Strategy};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    DividendNpv,
    RuinLaplace,
}

/// Sweep abscissa. `C1C2Grid` walks the square grid in row-major order with
/// `c1` as the outer coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Y,
    A,
    B,
    C1,
    C2,
    Sigma,
    Gamma,
    C1C2Grid,
}

impl Axis {
    pub fn name(&self) -> &'static str {
        match self {
            Axis::Y => "y",
            Axis::A => "a",
            Axis::B => "b",
            Axis::C1 => "c1",
            Axis::C2 => "c2",
            Axis::Sigma => "sigma",
            Axis::Gamma => "gamma",
            Axis::C1C2Grid => "c1c2",
        }
    }
}

/// Fixed parameter record a sweep perturbs one axis of.
#[derive(Debug, Clone, Copy)]
pub struct SweepFixed {
    pub model: LevyModel,
    pub strategy: Strategy,
    pub delta: f64,
    pub y: f64,
}

#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub quantity: Quantity,
    pub axis: Axis,
    pub lo: f64,
    pub hi: f64,
    pub n_points: usize,
    pub fixed: SweepFixed,
}

/// One sweep row; inadmissible points carry their error instead of a value.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub axis_value: f64,
    /// Second coordinate for grid sweeps.
    pub axis_value2: Option<f64>,
    pub value: Option<f64>,
    pub error: Option<String>,
}

fn eval_point(q: Quantity, model: &LevyModel, s: &Strategy, delta: f64, y: f64) -> Result<f64> {
    let v = match q {
        Quantity::DividendNpv => value(model, s, delta, y)?.value,
        Quantity::RuinLaplace => laplace_ruin(model, s, delta, y)?.value,
    };
    if !v.is_finite() {
        return Err(LevyError::NumericalFailure(format!(
            "non-finite value at y = {y}, a = {}, b = {}: exponent overflow",
            s.a, s.b
        )));
    }
    Ok(v)
}

fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

/// Evaluates the requested quantity along the axis grid. Every row is
/// recomputable from the fixed record alone; failures are tagged per point.
pub fn sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    if !(spec.lo < spec.hi) || spec.n_points < 2 {
        return Err(LevyError::InvalidInput(
            "sweep range must be increasing with n_points >= 2".into(),
        ));
    }
    let f = &spec.fixed;
    let xs = grid(spec.lo, spec.hi, spec.n_points);
    let mut rows = Vec::new();
    if spec.axis == Axis::C1C2Grid {
        for &c1 in &xs {
            for &c2 in &xs {
                let r = Strategy::new(f.strategy.a, f.strategy.b, c1, c2, f.strategy.gamma)
                    .and_then(|s| eval_point(spec.quantity, &f.model, &s, f.delta, f.y));
                rows.push(row2(c1, c2, r));
            }
        }
        return Ok(rows);
    }
    for &x in &xs {
        let r = point_at(spec, x);
        rows.push(SweepRow {
            axis_value: x,
            axis_value2: None,
            value: r.as_ref().ok().copied(),
            error: r.err().map(|e| e.to_string()),
        });
    }
    Ok(rows)
}

fn row2(c1: f64, c2: f64, r: Result<f64>) -> SweepRow {
    SweepRow {
        axis_value: c1,
        axis_value2: Some(c2),
        value: r.as_ref().ok().copied(),
        error: r.err().map(|e| e.to_string()),
    }
}

fn point_at(spec: &SweepSpec, x: f64) -> Result<f64> {
    let f = &spec.fixed;
    let s = f.strategy;
    match spec.axis {
        Axis::Y => eval_point(spec.quantity, &f.model, &s, f.delta, x),
        Axis::A => {
            let s = Strategy::new(x, s.b, s.c1, s.c2, s.gamma)?;
            eval_point(spec.quantity, &f.model, &s, f.delta, f.y)
        }
        Axis::B => {
            let s = Strategy::new(s.a, x, s.c1, s.c2, s.gamma)?;
            eval_point(spec.quantity, &f.model, &s, f.delta, f.y)
        }
        Axis::C1 => {
            let s = Strategy::new(s.a, s.b, x, s.c2, s.gamma)?;
            eval_point(spec.quantity, &f.model, &s, f.delta, f.y)
        }
        Axis::C2 => {
            let s = Strategy::new(s.a, s.b, s.c1, x, s.gamma)?;
            eval_point(spec.quantity, &f.model, &s, f.delta, f.y)
        }
        Axis::Gamma => {
            let s = Strategy::new(s.a, s.b, s.c1, s.c2, x)?;
            eval_point(spec.quantity, &f.model, &s, f.delta, f.y)
        }
        Axis::Sigma => {
            let mut m = f.model;
            m.sigma = x;
            m.validate()?;
            eval_point(spec.quantity, &m, &s, f.delta, f.y)
        }
        Axis::C1C2Grid => unreachable!("grid handled by sweep"),
    }
}

/// Result of a one-dimensional barrier search.
#[derive(Debug, Clone)]
pub struct OptimumReport {
    pub argmax: f64,
    pub max_value: f64,
    pub grid: Vec<(f64, f64)>,
    /// Golden-section refinement ran on the best bracket.
    pub refined: bool,
}

/// Maximizes the dividend value over the periodic barrier `a` in `(0, b]`:
/// a 64-point grid pass followed by golden-section refinement of the best
/// bracket. Endpoints win ties so a monotone grid returns `b` exactly.
pub fn optimize_a(
    model: &LevyModel,
    y: f64,
    b: f64,
    c1: f64,
    c2: f64,
    gamma: f64,
    delta: f64,
) -> Result<OptimumReport> {
    if !(b > 0.0) {
        return Err(LevyError::InvalidStrategy("b must be > 0".into()));
    }
    let eval = |a: f64| -> Result<f64> {
        let s = Strategy::new(a, b, c1, c2, gamma)?;
        Ok(value(model, &s, delta, y)?.value)
    };
    let n = 64;
    let mut grid_vals = Vec::with_capacity(n);
    for i in 1..=n {
        let a = b * i as f64 / n as f64;
        grid_vals.push((a, eval(a)?));
    }
    let best = grid_vals
        .iter()
        .enumerate()
        .max_by(|x, y| x.1 .1.total_cmp(&y.1 .1))
        .map(|(i, _)| i)
        .unwrap();
    let lo = if best == 0 {
        b / (2.0 * n as f64)
    } else {
        grid_vals[best - 1].0
    };
    let hi = if best + 1 < grid_vals.len() {
        grid_vals[best + 1].0
    } else {
        b
    };
    let (mut argmax, mut max_value) = golden_max(&|a| eval(a).unwrap_or(f64::NEG_INFINITY), lo, hi);
    // endpoints beat interior refinement on monotone data
    for (a, v) in [(lo, eval(lo)?), (hi, eval(hi)?)] {
        if v >= max_value {
            argmax = a;
            max_value = v;
        }
    }
    Ok(OptimumReport {
        argmax,
        max_value,
        grid: grid_vals,
        refined: true,
    })
}

fn golden_max(f: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..80 {
        if hi - lo < 1e-10 {
            break;
        }
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Search report for the ratcheting barrier, where the value keeps rising
/// toward a finite limit as `b` grows.
#[derive(Debug, Clone)]
pub struct BStarReport {
    /// Value limit approximated at a large barrier.
    pub asymptote: f64,
    /// Smallest grid `b` within `tolerance` (relative) of the asymptote.
    pub b_star_approx: f64,
    /// True when the supremum sits at the right boundary (no finite argmax).
    pub boundary_supremum: bool,
    pub grid: Vec<(f64, f64)>,
}

/// Scans the ratcheting barrier `b >= max(a, y_floor)` and reports the
/// asymptote together with the smallest barrier within `tolerance` of it.
pub fn optimize_b(
    model: &LevyModel,
    y: f64,
    a: f64,
    c1: f64,
    c2: f64,
    gamma: f64,
    delta: f64,
    tolerance: f64,
) -> Result<BStarReport> {
    if !(a > 0.0) {
        return Err(LevyError::InvalidStrategy("a must be > 0".into()));
    }
    let tol = if tolerance > 0.0 { tolerance } else { 0.005 };
    let eval = |b: f64| -> Result<f64> {
        let s = Strategy::new(a, b, c1, c2, gamma)?;
        let v = value(model, &s, delta, y)?.value;
        if !v.is_finite() {
            return Err(LevyError::NumericalFailure(format!(
                "non-finite value at b = {b}: exponent overflow"
            )));
        }
        Ok(v)
    };
    let b_lo = a.max(y).max(1e-6);
    // the kernels grow like e^{phi_hi (b - a)}; keep the far barrier inside
    // f64 exponent headroom at steep rates
    let phi_hi = model.drained(c1)?.phi_root(delta + gamma)?;
    let b_far = b_lo + 80.0_f64.min(600.0 / phi_hi.max(1e-3));
    let asymptote = eval(b_far)?;
    let n = 128;
    let mut grid_vals = Vec::with_capacity(n);
    let mut b_star = b_far;
    let mut found = false;
    for i in 0..n {
        let b = b_lo + (b_far - b_lo) * i as f64 / (n - 1) as f64;
        let v = eval(b)?;
        grid_vals.push((b, v));
        if !found && (v - asymptote).abs() <= tol * asymptote.abs() {
            b_star = b;
            found = true;
        }
    }
    let max_v = grid_vals
        .iter()
        .map(|p| p.1)
        .fold(f64::NEG_INFINITY, f64::max);
    let boundary_supremum = (grid_vals.last().unwrap().1 - max_v).abs() <= 1e-9 * max_v.abs();
    Ok(BStarReport {
        asymptote,
        b_star_approx: b_star,
        boundary_supremum,
        grid: grid_vals,
    })
}

/// Volatility profile of the dividend value with per-point discrete
/// second-difference concavity flags and the grid argmax.
#[derive(Debug, Clone)]
pub struct SigmaProfile {
    /// `(sigma, value, concave_flag)`; flags are `None` at the two edges.
    pub rows: Vec<(f64, f64, Option<bool>)>,
    pub argmax_sigma: f64,
    pub max_value: f64,
}

pub fn sigma_profile(
    model_template: &LevyModel,
    y: f64,
    s: &Strategy,
    delta: f64,
    sigma_lo: f64,
    sigma_hi: f64,
    n_points: usize,
) -> Result<SigmaProfile> {
    if !(sigma_lo > 0.0 && sigma_hi > sigma_lo) || n_points < 3 {
        return Err(LevyError::InvalidInput(
            "sigma range must satisfy 0 < lo < hi with n_points >= 3".into(),
        ));
    }
    let xs = grid(sigma_lo, sigma_hi, n_points);
    let mut vals = Vec::with_capacity(n_points);
    for &sg in &xs {
        let mut m = *model_template;
        m.sigma = sg;
        m.validate()?;
        vals.push(value(&m, s, delta, y)?.value);
    }
    let mut rows = Vec::with_capacity(n_points);
    for i in 0..n_points {
        let flag = if i == 0 || i + 1 == n_points {
            None
        } else {
            Some(vals[i + 1] - 2.0 * vals[i] + vals[i - 1] <= 0.0)
        };
        rows.push((xs[i], vals[i], flag));
    }
    let (k, _) = vals
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .unwrap();
    Ok(SigmaProfile {
        argmax_sigma: xs[k],
        max_value: vals[k],
        rows,
    })
}
