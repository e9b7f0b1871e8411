//! Uncontrolled surplus models and their drained variants.
//!
//! The surplus before any control is a spectrally negative Lévy process `Y`.
//! Subtracting a constant dividend rate gives the drained processes
//! `X = Y - c1 t` and `X~ = Y - (c1 + c2) t` whose scale functions drive every
//! formula downstream. Two backends are supported: Brownian motion with drift,
//! and compound Poisson with exponential claim sizes (optionally with a
//! Gaussian component, served by the inversion backend only).

use crate::error::{LevyError, Result};

/// Residual tolerance for the largest-root solver, relative to `max(1, q)`.
const ROOT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    BrownianDrift,
    CompoundPoissonExp,
}

/// Parameters of the uncontrolled process `Y`.
///
/// For `BrownianDrift`: `Y(t) = mu t + sigma B(t)`.
/// For `CompoundPoissonExp`: `Y(t) = mu t + sigma B(t) - sum of Exp(eta) claims`
/// arriving at rate `lambda`, so only downward jumps occur.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevyModel {
    pub kind: ModelKind,
    pub mu: f64,
    pub sigma: f64,
    pub lambda: f64,
    pub eta: f64,
}

impl LevyModel {
    pub fn brownian(mu: f64, sigma: f64) -> Result<Self> {
        let m = LevyModel {
            kind: ModelKind::BrownianDrift,
            mu,
            sigma,
            lambda: 0.0,
            eta: 1.0,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn compound_poisson(mu: f64, sigma: f64, lambda: f64, eta: f64) -> Result<Self> {
        let m = LevyModel {
            kind: ModelKind::CompoundPoissonExp,
            mu,
            sigma,
            lambda,
            eta,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.mu.is_finite() {
            return Err(LevyError::InvalidModel("mu must be finite".into()));
        }
        if !self.sigma.is_finite() || self.sigma < 0.0 {
            return Err(LevyError::InvalidModel(
                "sigma must be finite and >= 0".into(),
            ));
        }
        match self.kind {
            ModelKind::BrownianDrift => {
                if self.lambda != 0.0 {
                    return Err(LevyError::InvalidModel(
                        "lambda must be 0 for BrownianDrift".into(),
                    ));
                }
            }
            ModelKind::CompoundPoissonExp => {
                if !self.lambda.is_finite() || self.lambda < 0.0 {
                    return Err(LevyError::InvalidModel(
                        "lambda must be finite and >= 0".into(),
                    ));
                }
                if !self.eta.is_finite() || self.eta <= 0.0 {
                    return Err(LevyError::InvalidModel("eta must be finite and > 0".into()));
                }
            }
        }
        Ok(())
    }

    /// Laplace exponent of `Y`: `psi(theta) = log E[exp(theta Y(1))]`.
    pub fn psi(&self, theta: f64) -> f64 {
        let diff = self.mu * theta + 0.5 * self.sigma * self.sigma * theta * theta;
        match self.kind {
            ModelKind::BrownianDrift => diff,
            ModelKind::CompoundPoissonExp => {
                diff + self.lambda * (self.eta / (self.eta + theta) - 1.0)
            }
        }
    }

    /// Mean growth rate `E[Y(1)] = psi'(0+)`.
    pub fn mean_rate(&self) -> f64 {
        match self.kind {
            ModelKind::BrownianDrift => self.mu,
            ModelKind::CompoundPoissonExp => self.mu - self.lambda / self.eta,
        }
    }

    /// The process `Y - drain * t`. Fails unless its drift stays positive.
    pub fn drained(&self, drain: f64) -> Result<DrainedProcess> {
        DrainedProcess::new(*self, drain)
    }
}

/// `Y` minus a constant dividend rate; the object scale functions attach to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DrainedProcess {
    pub model: LevyModel,
    pub drain: f64,
}

impl DrainedProcess {
    pub fn new(model: LevyModel, drain: f64) -> Result<Self> {
        model.validate()?;
        if !drain.is_finite() || drain < 0.0 {
            return Err(LevyError::InvalidModel(
                "drain must be finite and >= 0".into(),
            ));
        }
        let p = DrainedProcess { model, drain };
        if p.drift() <= 0.0 {
            return Err(LevyError::InvalidModel(format!(
                "effective drift psi'(0+) - drain = {} must be > 0",
                p.drift()
            )));
        }
        Ok(p)
    }

    /// Effective drift `psi'(0+) - drain`.
    pub fn drift(&self) -> f64 {
        self.model.mean_rate() - self.drain
    }

    /// Laplace exponent of the drained process.
    pub fn laplace_exponent(&self, theta: f64) -> f64 {
        debug_assert!(theta >= 0.0, "laplace_exponent requires theta >= 0");
        self.model.psi(theta) - self.drain * theta
    }

    fn laplace_exponent_deriv(&self, theta: f64) -> f64 {
        let m = &self.model;
        let mut d = m.mu - self.drain + m.sigma * m.sigma * theta;
        if m.kind == ModelKind::CompoundPoissonExp {
            let s = m.eta + theta;
            d -= m.lambda * m.eta / (s * s);
        }
        d
    }

    /// Largest nonnegative root of `psi_p(theta) = q`.
    ///
    /// With positive drift the exponent is convex, zero at zero, and strictly
    /// increasing past the origin, so the root is unique for `q > 0` and equals
    /// zero for `q = 0`. Bracketing by geometric growth plus safeguarded Newton;
    /// residual bounded by `1e-12 * max(1, q)`.
    pub fn phi_root(&self, q: f64) -> Result<f64> {
        if !(q >= 0.0) {
            return Err(LevyError::InvalidInput("phi_root requires q >= 0".into()));
        }
        let m = &self.model;
        if m.sigma == 0.0 && m.lambda == 0.0 && (m.mu - self.drain) == 0.0 {
            return Err(LevyError::NoRoot(
                "degenerate exponent: zero drift, zero sigma, zero lambda".into(),
            ));
        }
        if q == 0.0 {
            return Ok(0.0);
        }
        let tol = ROOT_TOL * q.max(1.0);
        let mut hi = 1.0_f64;
        let mut grow = 0;
        while self.laplace_exponent(hi) < q {
            hi *= 2.0;
            grow += 1;
            if grow > 200 {
                return Err(LevyError::NoRoot(format!("exponent never reaches q = {q}")));
            }
        }
        let mut lo = 0.0_f64;
        let mut th = hi.min(1.0);
        for _ in 0..200 {
            let f = self.laplace_exponent(th) - q;
            if f.abs() <= tol {
                return Ok(th);
            }
            if f > 0.0 {
                hi = th;
            } else {
                lo = th;
            }
            let d = self.laplace_exponent_deriv(th);
            let newton = th - f / d;
            th = if d > 0.0 && newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
        }
        let f = self.laplace_exponent(th) - q;
        if f.abs() <= tol {
            Ok(th)
        } else {
            Err(LevyError::NoRoot(format!(
                "root iteration stalled at residual {f:e}"
            )))
        }
    }
}
