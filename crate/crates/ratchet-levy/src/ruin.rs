//! Laplace transform of the ruin time, `E_y[e^{-delta tau}; tau < infinity]`.
//!
//! Equivalently the expected NPV of one unit paid at ruin. The same region
//! split as the valuation applies. On the middle band the exit weights of the
//! periodically reflected pre-ratchet process are the kernel ratios, the same
//! ones the dividend formulas use; the Monte Carlo oracle confirms this route
//! (see the acceptance suite).

use crate::error::{LevyError, Result};
use crate::models::LevyModel;
use crate::scale::{Rate, ScaleKit};
use crate::valuation::{MixedKits, Region, Strategy};

/// Transform value in `[0, 1]` with the region it was computed in.
#[derive(Debug, Clone, Copy)]
pub struct RuinTransform {
    pub value: f64,
    pub region: Region,
}

fn clamp_unit(v: f64) -> f64 {
    debug_assert!(
        (-1e-9..=1.0 + 1e-9).contains(&v),
        "transform far outside [0,1]: {v}"
    );
    v.clamp(0.0, 1.0)
}

/// Transform of the ruin time under the mixed strategy; `delta = 0` yields
/// the ruin probability, which is one under the periodic clock.
pub fn laplace_ruin(model: &LevyModel, s: &Strategy, delta: f64, y: f64) -> Result<RuinTransform> {
    if !(delta >= 0.0) || !delta.is_finite() {
        return Err(LevyError::InvalidInput("delta must be >= 0".into()));
    }
    if !(y >= 0.0) {
        return Err(LevyError::InvalidInput("y must satisfy y >= 0".into()));
    }
    if !(s.a > 0.0) {
        return Err(LevyError::InvalidStrategy(
            "ruin transform requires a > 0".into(),
        ));
    }
    let kits = MixedKits::build(model, s, delta)?;
    let region = if y >= s.b {
        Region::Upper
    } else if y >= s.a {
        Region::Middle
    } else {
        Region::Lower
    };
    let value = match region {
        Region::Upper => upper(&kits, y)?,
        Region::Middle => middle(&kits, y)?,
        Region::Lower => {
            let kx = &kits.kit_x;
            let l_a = middle(&kits, s.a)?;
            let w_ratio = kx.w(Rate::Delta, y)? / kx.w(Rate::Delta, s.a)?;
            let z_y = kx.z(Rate::Delta, y)?;
            let z_a = kx.z(Rate::Delta, s.a)?;
            z_y - z_a * w_ratio + w_ratio * l_a
        }
    };
    Ok(RuinTransform {
        value: clamp_unit(value),
        region,
    })
}

/// Ratcheted-region transform: ruin of the fully drained process under the
/// periodic clock. Assembled as one subexponential combination so that far
/// above the barrier the growing kernel modes cancel exactly instead of
/// swamping the bounded result.
fn upper(kits: &MixedKits, y: f64) -> Result<f64> {
    let (s, d) = (&kits.s, kits.delta);
    let kt = &kits.kit_xt;
    let phi = kt.phi(Rate::DeltaPlusGamma);
    let ker = kt.kernels(s.a)?;
    let w_a = kt.w(Rate::Delta, s.a)?;
    let z_p = kt.z_theta(Rate::Delta, s.a, phi)?;
    let z_pp = kt.z_theta_prime(Rate::Delta, s.a, phi)?;
    ker.subexponential_combination(0.0, 1.0, -d * w_a * z_p / z_pp, 0.0, y - s.a)
}

/// Middle-band transform through the kernel exit weights of the pre-ratchet
/// periodically reflected process, continued at `b` by the upper constant.
fn middle(kits: &MixedKits, y: f64) -> Result<f64> {
    let s = &kits.s;
    let kx = &kits.kit_x;
    let l_b = upper(kits, s.b)?;
    let ker = kx.kernels(s.a)?;
    let ratio = ker.i(y - s.a)? / ker.i(s.b - s.a)?;
    Ok(ker.j(y - s.a)? - ratio * ker.j(s.b - s.a)? + ratio * l_b)
}

/// Transform of the ruin time under the pure single-rise ratcheting strategy;
/// the `gamma -> 0` limit. At `delta = 0` the `delta/phi(delta)` factor is
/// continued by its limit, the drift of the fully drained process, and the
/// result is the classical ruin probability (below one for positive drift).
pub fn laplace_ruin_ratchet_only(
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
    if !(delta >= 0.0) || !(y >= 0.0) {
        return Err(LevyError::InvalidInput(
            "ratchet-only transform requires delta >= 0 and y >= 0".into(),
        ));
    }
    let kit_x = ScaleKit::new(model.drained(c1)?, delta, 0.0)?;
    let kit_xt = ScaleKit::new(model.drained(c1 + c2)?, delta, 0.0)?;
    let dop = if delta == 0.0 {
        kit_xt.process().drift()
    } else {
        delta / kit_xt.phi(Rate::Delta)
    };
    let v = if y >= b {
        kit_xt.z(Rate::Delta, y)? - dop * kit_xt.w(Rate::Delta, y)?
    } else {
        let w_ratio = kit_x.w(Rate::Delta, y)? / kit_x.w(Rate::Delta, b)?;
        kit_x.z(Rate::Delta, y)?
            + w_ratio
                * (kit_xt.z(Rate::Delta, b)?
                    - kit_x.z(Rate::Delta, b)?
                    - dop * kit_xt.w(Rate::Delta, b)?)
    };
    Ok(clamp_unit(v))
}
