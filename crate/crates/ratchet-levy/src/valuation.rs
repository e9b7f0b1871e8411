//! Expected net present value of dividends paid up to ruin.
//!
//! The state space splits at the barriers: for initial surplus `y >= b` the
//! rate is already ratcheted and the surplus follows the fully drained process
//! reflected periodically at `a`; on `[a, b)` the pre-ratchet process runs
//! until it either ruins or creeps up to `b`, where the ratcheted value takes
//! over; below `a` no control binds until the surplus reaches `a`. Each region
//! has its own closed form, glued by the exit identities of the kernels.

use crate::error::{LevyError, Result};
use crate::models::LevyModel;
use crate::scale::{Rate, ScaleKit};

/// Barriers and rates of the mixed ratcheting-periodic strategy.
///
/// Dividends flow continuously at rate `c1`, ratcheting once to `c1 + c2` the
/// first time the surplus reaches `b`; independently, at the jump times of a
/// Poisson clock with rate `gamma`, any surplus above `a` is paid out as a
/// lump.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Strategy {
    pub a: f64,
    pub b: f64,
    pub c1: f64,
    pub c2: f64,
    pub gamma: f64,
}

impl Strategy {
    pub fn new(a: f64, b: f64, c1: f64, c2: f64, gamma: f64) -> Result<Self> {
        let s = Strategy {
            a,
            b,
            c1,
            c2,
            gamma,
        };
        s.validate()?;
        if !(c2 > 0.0) {
            return Err(LevyError::InvalidStrategy("c2 must be > 0".into()));
        }
        if !b.is_finite() {
            return Err(LevyError::InvalidStrategy("b must be finite".into()));
        }
        Ok(s)
    }

    /// Degenerate strategy with the ratchet disabled (`c1 = c2 = 0`,
    /// `b = infinity`); the simulation oracle for the periodic-only value.
    pub fn periodic_only(a: f64, gamma: f64) -> Result<Self> {
        let s = Strategy {
            a,
            b: f64::INFINITY,
            c1: 0.0,
            c2: 0.0,
            gamma,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.a.is_finite() || self.a < 0.0 {
            return Err(LevyError::InvalidStrategy(
                "a must be finite and >= 0".into(),
            ));
        }
        if self.b < self.a {
            return Err(LevyError::InvalidStrategy("b must satisfy b >= a".into()));
        }
        if !self.c1.is_finite() || self.c1 < 0.0 {
            return Err(LevyError::InvalidStrategy(
                "c1 must be finite and >= 0".into(),
            ));
        }
        if self.c2 < 0.0 || self.c2.is_nan() {
            return Err(LevyError::InvalidStrategy("c2 must be >= 0".into()));
        }
        if !(self.gamma > 0.0) || !self.gamma.is_finite() {
            return Err(LevyError::InvalidStrategy("gamma must be > 0".into()));
        }
        Ok(())
    }

    pub fn total_rate(&self) -> f64 {
        self.c1 + self.c2
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    Lower,
    Middle,
    Upper,
}

/// Value with its region and per-stream decomposition;
/// `value = ratchet_part + periodic_part + continuation` exactly.
#[derive(Debug, Clone, Copy)]
pub struct ValuationResult {
    pub value: f64,
    pub region: Region,
    /// Discounted continuous-stream dividends attributed to this region.
    pub ratchet_part: f64,
    /// Discounted lump dividends attributed to this region.
    pub periodic_part: f64,
    /// Value carried by first passage into the next region up.
    pub continuation: f64,
}

impl ValuationResult {
    fn new(region: Region, ratchet: f64, periodic: f64, continuation: f64) -> Self {
        ValuationResult {
            value: ratchet + periodic + continuation,
            region,
            ratchet_part: ratchet,
            periodic_part: periodic,
            continuation,
        }
    }
}

/// Kits for both drained processes of one (model, strategy, delta) triple.
pub(crate) struct MixedKits {
    pub kit_x: ScaleKit,
    pub kit_xt: ScaleKit,
    pub s: Strategy,
    pub delta: f64,
}

impl MixedKits {
    pub fn build(model: &LevyModel, s: &Strategy, delta: f64) -> Result<Self> {
        s.validate()?;
        if !(s.a > 0.0) {
            return Err(LevyError::InvalidStrategy(
                "a must be > 0 (W(0) = 0 enters denominators at a = 0)".into(),
            ));
        }
        if !s.b.is_finite() {
            return Err(LevyError::InvalidStrategy(
                "b must be finite (take the periodic-only value instead)".into(),
            ));
        }
        let kit_x = ScaleKit::new(model.drained(s.c1)?, delta, s.gamma)?;
        let kit_xt = ScaleKit::new(model.drained(s.c1 + s.c2)?, delta, s.gamma)?;
        Ok(MixedKits {
            kit_x,
            kit_xt,
            s: *s,
            delta,
        })
    }

    fn upper(&self, y: f64) -> Result<ValuationResult> {
        let (s, d) = (&self.s, self.delta);
        let kt = &self.kit_xt;
        let phi = kt.phi(Rate::DeltaPlusGamma);
        let ker = kt.kernels(s.a)?;
        let w_a = kt.w(Rate::Delta, s.a)?;
        let z_p = kt.z_theta(Rate::Delta, s.a, phi)?;
        let z_pp = kt.z_theta_prime(Rate::Delta, s.a, phi)?;
        let x = y - s.a;
        // each stream is subexponential on its own (the transform part is
        // bounded, the lump part grows linearly), so both are assembled with
        // the growing kernel modes cancelled
        let c = s.total_rate() / d;
        let ratchet =
            ker.subexponential_combination(c, -c, c * d * w_a * z_p / z_pp, 0.0, x)?;
        let periodic = ker.subexponential_combination(
            0.0,
            0.0,
            s.gamma * w_a / (phi * z_pp),
            -s.gamma,
            x,
        )?;
        Ok(ValuationResult::new(Region::Upper, ratchet, periodic, 0.0))
    }

    fn middle(&self, y: f64) -> Result<ValuationResult> {
        let (s, d) = (&self.s, self.delta);
        let kx = &self.kit_x;
        let v_ub = self.upper(s.b)?.value;
        let ker = kx.kernels(s.a)?;
        let ratio = ker.i(y - s.a)? / ker.i(s.b - s.a)?;
        let j_y = ker.j(y - s.a)?;
        let j_b = ker.j(s.b - s.a)?;
        let wbb_y = kx.wbarbar(Rate::DeltaPlusGamma, y - s.a)?;
        let wbb_b = kx.wbarbar(Rate::DeltaPlusGamma, s.b - s.a)?;
        let c1d = s.c1 / d;
        let continuation = ratio * v_ub;
        let ratchet = ratio * c1d * (j_b - 1.0) - c1d * (j_y - 1.0);
        let periodic = s.gamma * (ratio * wbb_b - wbb_y);
        Ok(ValuationResult::new(
            Region::Middle,
            ratchet,
            periodic,
            continuation,
        ))
    }

    fn lower(&self, y: f64) -> Result<ValuationResult> {
        let (s, d) = (&self.s, self.delta);
        let kx = &self.kit_x;
        let v_ma = self.middle(s.a)?.value;
        let w_ratio = kx.w(Rate::Delta, y)? / kx.w(Rate::Delta, s.a)?;
        let z_a = kx.z(Rate::Delta, s.a)?;
        let z_y = kx.z(Rate::Delta, y)?;
        let c1d = s.c1 / d;
        let continuation = w_ratio * v_ma;
        let ratchet = w_ratio * c1d * (z_a - 1.0) - c1d * (z_y - 1.0);
        Ok(ValuationResult::new(
            Region::Lower,
            ratchet,
            0.0,
            continuation,
        ))
    }
}

/// Expected NPV of all dividends paid up to ruin from initial surplus `y`,
/// dispatched by region (`y = a` counts as middle, `y = b` as upper).
pub fn value(model: &LevyModel, s: &Strategy, delta: f64, y: f64) -> Result<ValuationResult> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(LevyError::InvalidInput(
            "valuation requires delta > 0".into(),
        ));
    }
    if !(y >= 0.0) {
        return Err(LevyError::InvalidInput("y must satisfy y >= 0".into()));
    }
    let kits = MixedKits::build(model, s, delta)?;
    if y >= s.b {
        kits.upper(y)
    } else if y >= s.a {
        kits.middle(y)
    } else {
        kits.lower(y)
    }
}

/// Value on the ratcheted region `y >= b` only.
pub fn value_upper(model: &LevyModel, s: &Strategy, delta: f64, y: f64) -> Result<ValuationResult> {
    if y < s.b {
        return Err(LevyError::InvalidRegion(format!(
            "upper formula needs y >= b, got y = {y} < b = {}",
            s.b
        )));
    }
    value(model, s, delta, y)
}

/// Value on `a <= y < b` only.
pub fn value_middle(
    model: &LevyModel,
    s: &Strategy,
    delta: f64,
    y: f64,
) -> Result<ValuationResult> {
    if !(y >= s.a && y < s.b) {
        return Err(LevyError::InvalidRegion(format!(
            "middle formula needs a <= y < b, got y = {y}"
        )));
    }
    value(model, s, delta, y)
}

/// Value on `0 <= y < a` only.
pub fn value_lower(model: &LevyModel, s: &Strategy, delta: f64, y: f64) -> Result<ValuationResult> {
    if !(y >= 0.0 && y < s.a) {
        return Err(LevyError::InvalidRegion(format!(
            "lower formula needs 0 <= y < a, got y = {y}"
        )));
    }
    value(model, s, delta, y)
}

/// Expected NPV of dividends under the pure periodic barrier strategy
/// (no continuous stream, no ratchet); the `c1 = 0`, `c2 -> 0` limit.
///
/// All scale objects live on the undrained process, and the rate root is
/// taken there as well, which is where the drained root collapses to in the
/// limit.
pub fn value_periodic_only(
    model: &LevyModel,
    a: f64,
    gamma: f64,
    delta: f64,
    y: f64,
) -> Result<f64> {
    if !(a > 0.0) {
        return Err(LevyError::InvalidStrategy("a must be > 0".into()));
    }
    if !(gamma > 0.0) || !(delta > 0.0) {
        return Err(LevyError::InvalidInput(
            "periodic-only value requires gamma > 0 and delta > 0".into(),
        ));
    }
    if !(y >= 0.0) {
        return Err(LevyError::InvalidInput("y must satisfy y >= 0".into()));
    }
    let kit = ScaleKit::new(model.drained(0.0)?, delta, gamma)?;
    let phi = kit.phi(Rate::DeltaPlusGamma);
    let ker = kit.kernels(a)?;
    let w_a = kit.w(Rate::Delta, a)?;
    let z_pp = kit.z_theta_prime(Rate::Delta, a, phi)?;
    ker.subexponential_combination(0.0, 0.0, gamma * w_a / (phi * z_pp), -gamma, y - a)
}

/// Expected NPV of dividends under the pure single-rise ratcheting strategy
/// (no periodic lumps); the `gamma -> 0` limit.
pub fn value_ratchet_only(
    model: &LevyModel,
    b: f64,
    c1: f64,
    c2: f64,
    delta: f64,
    y: f64,
) -> Result<f64> {
    if !(b > 0.0) {
        return Err(LevyError::InvalidStrategy("b must be > 0".into()));
    }
    if !(c2 > 0.0) || c1 < 0.0 {
        return Err(LevyError::InvalidStrategy(
            "ratchet rates require c1 >= 0 and c2 > 0".into(),
        ));
    }
    if !(delta > 0.0) {
        return Err(LevyError::InvalidInput(
            "ratchet-only value requires delta > 0".into(),
        ));
    }
    if !(y >= 0.0) {
        return Err(LevyError::InvalidInput("y must satisfy y >= 0".into()));
    }
    let kit_x = ScaleKit::new(model.drained(c1)?, delta, 0.0)?;
    let kit_xt = ScaleKit::new(model.drained(c1 + c2)?, delta, 0.0)?;
    let phi = kit_xt.phi(Rate::Delta);
    let upper = |v: f64| -> Result<f64> {
        Ok((c1 + c2) / delta
            * (1.0 - kit_xt.z(Rate::Delta, v)? + delta / phi * kit_xt.w(Rate::Delta, v)?))
    };
    if y >= b {
        return upper(y);
    }
    let w_ratio = kit_x.w(Rate::Delta, y)? / kit_x.w(Rate::Delta, b)?;
    let z_y = kit_x.z(Rate::Delta, y)?;
    let z_b = kit_x.z(Rate::Delta, b)?;
    Ok(upper(b)? * w_ratio + c1 / delta * (1.0 - z_y + (z_b - 1.0) * w_ratio))
}
