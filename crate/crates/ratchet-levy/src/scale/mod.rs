//! Scale functions and exit kernels for a drained process at a discount rate.
//!
//! A [`ScaleKit`] bundles everything the exit identities need for one process
//! and one `(delta, gamma)` pair: the scale function `W` at rates `delta` and
//! `delta + gamma`, its running integrals, the two-parameter `Z(x, theta)`,
//! the convolution operator `M_b`, and the exit kernels `I_b`, `J_b`.
//!
//! Two backends:
//! - `ClosedForm` represents `W^{(q)}` as a finite exponential sum (quadratic
//!   roots for Brownian drift, partial fractions of the rational transform for
//!   compound Poisson with `sigma = 0`) and derives every other object
//!   symbolically, so evaluations are exact up to roundoff.
//! - `Inversion` recovers `W` and `Z` by numerically inverting their Laplace
//!   transforms on a Talbot contour and falls back to quadrature for the
//!   integral quantities. It exists to cross-check the closed forms and to
//!   serve models with both a Gaussian part and jumps.

mod exppoly;
mod invert;
pub(crate) mod quad;

use num_complex::Complex64;

use crate::error::{LevyError, Result};
use crate::models::{DrainedProcess, ModelKind};
use exppoly::ExpPoly;

/// Absolute tolerance for the definitional quadrature routes.
pub(crate) const QUAD_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    ClosedForm,
    Inversion,
}

/// Selects which of the kit's two discount rates an evaluation uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rate {
    /// The base discount rate `delta`.
    Delta,
    /// The decision-clock-adjusted rate `delta + gamma`.
    DeltaPlusGamma,
}

/// Roots and prefactor of the Brownian closed form at one rate:
/// `W^{(q)}(x) = kappa (e^{theta_plus x} - e^{theta_minus x})`.
#[derive(Debug, Clone, Copy)]
pub struct BrownianRoots {
    pub theta_plus: f64,
    pub theta_minus: f64,
    pub kappa: f64,
}

struct ClosedRate {
    w_exps: Vec<(f64, f64)>,
    w: ExpPoly,
    wbar: ExpPoly,
    wbarbar: ExpPoly,
    z: ExpPoly,
    zbar: ExpPoly,
}

struct RateCache {
    rate: f64,
    phi: f64,
    closed: Option<ClosedRate>,
}

pub struct ScaleKit {
    process: DrainedProcess,
    delta: f64,
    gamma: f64,
    backend: Backend,
    lo: RateCache,
    hi: RateCache,
}

impl ScaleKit {
    /// Builds a kit with the preferred backend for the model: closed forms
    /// whenever the transform is rational (Brownian drift, or compound Poisson
    /// with `sigma = 0`), inversion otherwise.
    pub fn new(process: DrainedProcess, delta: f64, gamma: f64) -> Result<Self> {
        let backend = match (process.model.kind, process.model.sigma) {
            (ModelKind::CompoundPoissonExp, s) if s > 0.0 => Backend::Inversion,
            _ => Backend::ClosedForm,
        };
        Self::with_backend(process, delta, gamma, backend)
    }

    pub fn with_backend(
        process: DrainedProcess,
        delta: f64,
        gamma: f64,
        backend: Backend,
    ) -> Result<Self> {
        if !delta.is_finite() || delta < 0.0 {
            return Err(LevyError::InvalidInput("delta must be >= 0".into()));
        }
        if !gamma.is_finite() || gamma < 0.0 {
            return Err(LevyError::InvalidInput("gamma must be >= 0".into()));
        }
        let lo = RateCache::build(&process, delta, backend)?;
        let hi = RateCache::build(&process, delta + gamma, backend)?;
        Ok(ScaleKit {
            process,
            delta,
            gamma,
            backend,
            lo,
            hi,
        })
    }

    pub fn process(&self) -> &DrainedProcess {
        &self.process
    }

    pub fn backend(&self) -> Backend {
        self.backend
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn rate_value(&self, rate: Rate) -> f64 {
        self.cache(rate).rate
    }

    /// Largest root `Phi(rate)` of the drained process' exponent.
    pub fn phi(&self, rate: Rate) -> f64 {
        self.cache(rate).phi
    }

    /// Closed-form roots of the Brownian scale function at `rate`.
    pub fn brownian_roots(&self, rate: Rate) -> Result<BrownianRoots> {
        let m = &self.process.model;
        if m.kind != ModelKind::BrownianDrift || m.sigma == 0.0 {
            return Err(LevyError::BackendUnavailable(
                "Brownian roots require a BrownianDrift model with sigma > 0".into(),
            ));
        }
        let drift = m.mu - self.process.drain;
        let q = self.rate_value(rate);
        let disc = (drift * drift + 2.0 * q * m.sigma * m.sigma).sqrt();
        Ok(BrownianRoots {
            theta_plus: (-drift + disc) / (m.sigma * m.sigma),
            theta_minus: (-drift - disc) / (m.sigma * m.sigma),
            kappa: 1.0 / disc,
        })
    }

    fn cache(&self, rate: Rate) -> &RateCache {
        match rate {
            Rate::Delta => &self.lo,
            Rate::DeltaPlusGamma => &self.hi,
        }
    }

    fn psi_complex(&self, s: Complex64) -> Complex64 {
        let m = &self.process.model;
        let mut v = (m.mu - self.process.drain) * s + 0.5 * m.sigma * m.sigma * s * s;
        if m.kind == ModelKind::CompoundPoissonExp {
            v += m.lambda * (m.eta / (m.eta + s) - 1.0);
        }
        v
    }

    /// Scale function `W^{(rate)}(x)`; zero on the negatives.
    pub fn w(&self, rate: Rate, x: f64) -> Result<f64> {
        if x < 0.0 {
            return Ok(0.0);
        }
        let c = self.cache(rate);
        match &c.closed {
            Some(cr) => Ok(cr.w.eval(x)),
            None => {
                if x == 0.0 {
                    // bounded variation keeps an atom 1/c at the origin
                    return Ok(if self.process.model.sigma == 0.0 {
                        1.0 / (self.process.model.mu - self.process.drain)
                    } else {
                        0.0
                    });
                }
                let q = c.rate;
                invert::invert(&|s| (self.psi_complex(s) - q).inv(), x, c.phi)
            }
        }
    }

    /// `Z^{(rate)}(x) = 1 + rate * int_0^x W^{(rate)}`; one at and left of zero.
    pub fn z(&self, rate: Rate, x: f64) -> Result<f64> {
        if x <= 0.0 {
            return Ok(1.0);
        }
        let c = self.cache(rate);
        match &c.closed {
            Some(cr) => Ok(cr.z.eval(x)),
            None => {
                let q = c.rate;
                invert::invert(
                    &|s| self.psi_complex(s) / (s * (self.psi_complex(s) - q)),
                    x,
                    c.phi,
                )
            }
        }
    }

    /// First running integral of `W`.
    pub fn wbar(&self, rate: Rate, x: f64) -> Result<f64> {
        if x <= 0.0 {
            return Ok(0.0);
        }
        let c = self.cache(rate);
        match &c.closed {
            Some(cr) => Ok(cr.wbar.eval(x)),
            None => invert::invert(&|s| ((self.psi_complex(s) - c.rate) * s).inv(), x, c.phi),
        }
    }

    /// Second running integral of `W`.
    pub fn wbarbar(&self, rate: Rate, x: f64) -> Result<f64> {
        if x <= 0.0 {
            return Ok(0.0);
        }
        let c = self.cache(rate);
        match &c.closed {
            Some(cr) => Ok(cr.wbarbar.eval(x)),
            None => invert::invert(
                &|s| ((self.psi_complex(s) - c.rate) * s * s).inv(),
                x,
                c.phi,
            ),
        }
    }

    /// Running integral of `Z`; equals `x` at and left of zero.
    pub fn zbar(&self, rate: Rate, x: f64) -> Result<f64> {
        if x <= 0.0 {
            return Ok(x);
        }
        let c = self.cache(rate);
        match &c.closed {
            Some(cr) => Ok(cr.zbar.eval(x)),
            None => Ok(x + c.rate * self.wbarbar(rate, x)?),
        }
    }

    /// Two-parameter scale function
    /// `Z^{(rate)}(x, theta) = e^{theta x} (1 + (rate - psi(theta)) int_0^x e^{-theta u} W(u) du)`.
    pub fn z_theta(&self, rate: Rate, x: f64, theta: f64) -> Result<f64> {
        if !(theta >= 0.0) {
            return Err(LevyError::InvalidInput(
                "z_theta requires theta >= 0".into(),
            ));
        }
        if x <= 0.0 {
            return Ok((theta * x).exp());
        }
        let c = self.cache(rate);
        let coef = c.rate - self.process.laplace_exponent(theta);
        match &c.closed {
            Some(cr) => {
                let conv = cr.w.mul_exp(-theta).antiderivative().mul_exp(theta);
                Ok((theta * x).exp() + coef * conv.eval(x))
            }
            None => {
                let integ = quad::integrate(
                    &|u| (-theta * u).exp() * self.w(rate, u).unwrap_or(f64::NAN),
                    0.0,
                    x,
                    QUAD_TOL,
                )?;
                Ok((theta * x).exp() * (1.0 + coef * integ))
            }
        }
    }

    /// Partial derivative of `z_theta` in `x`:
    /// `theta Z(x, theta) + (rate - psi(theta)) W(x)`.
    pub fn z_theta_prime(&self, rate: Rate, x: f64, theta: f64) -> Result<f64> {
        let coef = self.cache(rate).rate - self.process.laplace_exponent(theta);
        Ok(theta * self.z_theta(rate, x, theta)? + coef * self.w(rate, x)?)
    }

    /// Convolution operator
    /// `M_b f(x) = f(x + b) + gamma int_0^x W^{(delta+gamma)}(x - y) f(y + b) dy`,
    /// evaluated by adaptive quadrature regardless of backend. This is the
    /// definitional route the closed-form kernels are checked against.
    pub fn m_apply<F: Fn(f64) -> f64>(&self, b: f64, f: F, x: f64) -> Result<f64> {
        if !(b > 0.0) {
            return Err(LevyError::InvalidInput("m_apply requires b > 0".into()));
        }
        if x <= 0.0 {
            return Ok(f(x + b));
        }
        let integ = quad::integrate(
            &|y| self.w(Rate::DeltaPlusGamma, x - y).unwrap_or(f64::NAN) * f(y + b),
            0.0,
            x,
            QUAD_TOL,
        )?;
        let v = f(x + b) + self.gamma * integ;
        if v.is_nan() {
            return Err(LevyError::QuadratureFailure(
                "integrand evaluation failed inside M_b".into(),
            ));
        }
        Ok(v)
    }

    /// `W_b^{(delta,gamma)}(x) = M_b W^{(delta)}(x)`.
    pub fn w_b(&self, b: f64, x: f64) -> Result<f64> {
        let k = self.kernels(b)?;
        k.w_b(x)
    }

    /// `Z_b^{(delta,gamma)}(x) = M_b Z^{(delta)}(x)`.
    pub fn z_b(&self, b: f64, x: f64) -> Result<f64> {
        let k = self.kernels(b)?;
        k.z_b(x)
    }

    /// Exit kernels at barrier `b`, cached for repeated evaluation.
    pub fn kernels(&self, b: f64) -> Result<Kernels<'_>> {
        if !(b > 0.0) {
            return Err(LevyError::InvalidInput("kernels require b > 0".into()));
        }
        let closed = match (&self.lo.closed, &self.hi.closed) {
            (Some(lo), Some(hi)) => {
                let w_at_b = lo.w.eval(b);
                let z_at_b = lo.z.eval(b);
                let mut w_b = lo.w.shift(b);
                w_b.add(&lo.w.shift(b).convolve_exps(&hi.w_exps).scaled(self.gamma));
                let mut z_b = lo.z.shift(b);
                z_b.add(&lo.z.shift(b).convolve_exps(&hi.w_exps).scaled(self.gamma));
                let mut i = w_b.scaled(1.0 / w_at_b);
                i.add(&hi.wbar.scaled(-self.gamma));
                let mut j = z_b.clone();
                j.add(&hi.wbar.scaled(-self.gamma * z_at_b));
                Some(ClosedKernels { w_b, z_b, i, j })
            }
            _ => None,
        };
        Ok(Kernels {
            kit: self,
            b,
            closed,
        })
    }

    /// `I_b^{(delta,gamma)}(x)`; single-shot convenience over [`Self::kernels`].
    pub fn i_kernel(&self, b: f64, x: f64) -> Result<f64> {
        self.kernels(b)?.i(x)
    }

    /// `J_b^{(delta,gamma)}(x)`; single-shot convenience over [`Self::kernels`].
    pub fn j_kernel(&self, b: f64, x: f64) -> Result<f64> {
        self.kernels(b)?.j(x)
    }
}

struct ClosedKernels {
    w_b: ExpPoly,
    z_b: ExpPoly,
    i: ExpPoly,
    j: ExpPoly,
}

/// Exit kernels `I_b`, `J_b` for one barrier, with their `M_b`-composites.
pub struct Kernels<'a> {
    kit: &'a ScaleKit,
    b: f64,
    closed: Option<ClosedKernels>,
}

impl Kernels<'_> {
    pub fn barrier(&self) -> f64 {
        self.b
    }

    fn w_b(&self, x: f64) -> Result<f64> {
        if x <= 0.0 {
            return self.kit.w(Rate::Delta, x + self.b);
        }
        match &self.closed {
            Some(c) => Ok(c.w_b.eval(x)),
            None => self.kit.m_apply(
                self.b,
                |v| self.kit.w(Rate::Delta, v).unwrap_or(f64::NAN),
                x,
            ),
        }
    }

    fn z_b(&self, x: f64) -> Result<f64> {
        if x <= 0.0 {
            return self.kit.z(Rate::Delta, x + self.b);
        }
        match &self.closed {
            Some(c) => Ok(c.z_b.eval(x)),
            None => self.kit.m_apply(
                self.b,
                |v| self.kit.z(Rate::Delta, v).unwrap_or(f64::NAN),
                x,
            ),
        }
    }

    /// `I_b(x) = W_b(x) / W(b) - gamma Wbar^{(delta+gamma)}(x)`; reduces to
    /// `W(x + b) / W(b)` left of zero.
    pub fn i(&self, x: f64) -> Result<f64> {
        if x < 0.0 {
            let num = self.kit.w(Rate::Delta, x + self.b)?;
            let den = self.kit.w(Rate::Delta, self.b)?;
            return Ok(num / den);
        }
        match &self.closed {
            Some(c) => Ok(c.i.eval(x)),
            None => {
                let wb = self.w_b(x)?;
                let den = self.kit.w(Rate::Delta, self.b)?;
                Ok(wb / den - self.kit.gamma * self.kit.wbar(Rate::DeltaPlusGamma, x)?)
            }
        }
    }

    /// `J_b(x) = Z_b(x) - gamma Z(b) Wbar^{(delta+gamma)}(x)`; reduces to
    /// `Z(x + b)` left of zero.
    pub fn j(&self, x: f64) -> Result<f64> {
        if x < 0.0 {
            return self.kit.z(Rate::Delta, x + self.b);
        }
        match &self.closed {
            Some(c) => Ok(c.j.eval(x)),
            None => {
                let zb = self.z_b(x)?;
                let z_at_b = self.kit.z(Rate::Delta, self.b)?;
                Ok(zb - self.kit.gamma * z_at_b * self.kit.wbar(Rate::DeltaPlusGamma, x)?)
            }
        }
    }

    /// Evaluates `c0 + cj J_b(x) + ci I_b(x) + cw Wbarbar^{(delta+gamma)}(x)`
    /// for combinations that are analytically subexponential in `x` (the exit
    /// functionals: bounded transforms, linearly growing dividend values).
    ///
    /// `J`, `I` and the iterated integral each grow like
    /// `e^{Phi(delta+gamma) x}`, so evaluating them separately and combining
    /// loses all precision once the growing parts dwarf the result. Here the
    /// combination is assembled termwise and the growing modes, whose
    /// coefficients cancel exactly in such combinations, are removed before
    /// evaluation.
    pub fn subexponential_combination(
        &self,
        c0: f64,
        cj: f64,
        ci: f64,
        cw: f64,
        x: f64,
    ) -> Result<f64> {
        if x < 0.0 {
            // boundary reductions are plain ratios; nothing amplifies
            return Ok(c0
                + cj * self.j(x)?
                + ci * self.i(x)?
                + cw * self.kit.wbarbar(Rate::DeltaPlusGamma, x)?);
        }
        match (&self.closed, &self.kit.hi.closed) {
            (Some(c), Some(hi)) => {
                let mut combined = ExpPoly::constant(c0);
                combined.add(&c.j.scaled(cj));
                combined.add(&c.i.scaled(ci));
                combined.add(&hi.wbarbar.scaled(cw));
                combined.prune_growing();
                Ok(combined.eval(x))
            }
            _ => Ok(c0
                + cj * self.j(x)?
                + ci * self.i(x)?
                + cw * self.kit.wbarbar(Rate::DeltaPlusGamma, x)?),
        }
    }
}

impl RateCache {
    fn build(process: &DrainedProcess, rate: f64, backend: Backend) -> Result<Self> {
        let phi = process.phi_root(rate)?;
        let closed = match backend {
            Backend::Inversion => None,
            Backend::ClosedForm => {
                let w_exps = closed_basis(process, rate)?;
                let w = ExpPoly::from_exps(&w_exps);
                let wbar = w.antiderivative();
                let wbarbar = wbar.antiderivative();
                let mut z = ExpPoly::constant(1.0);
                z.add(&wbar.scaled(rate));
                let zbar = z.antiderivative();
                Some(ClosedRate {
                    w_exps,
                    w,
                    wbar,
                    wbarbar,
                    z,
                    zbar,
                })
            }
        };
        Ok(RateCache { rate, phi, closed })
    }
}

/// Exponential-sum representation of `W^{(q)}` from the partial fractions of
/// `1/(psi - q)`.
fn closed_basis(process: &DrainedProcess, q: f64) -> Result<Vec<(f64, f64)>> {
    let m = &process.model;
    let drift = m.mu - process.drain;
    match m.kind {
        ModelKind::BrownianDrift => {
            if m.sigma > 0.0 {
                let disc = (drift * drift + 2.0 * q * m.sigma * m.sigma).sqrt();
                let kappa = 1.0 / disc;
                let tp = (-drift + disc) / (m.sigma * m.sigma);
                let tm = (-drift - disc) / (m.sigma * m.sigma);
                Ok(vec![(kappa, tp), (-kappa, tm)])
            } else {
                // pure drift: 1/(drift * theta - q)
                Ok(vec![(1.0 / drift, q / drift)])
            }
        }
        ModelKind::CompoundPoissonExp => {
            if m.sigma > 0.0 {
                return Err(LevyError::BackendUnavailable(
                    "closed form needs sigma = 0 for CompoundPoissonExp; use Inversion".into(),
                ));
            }
            // (eta + theta) / (drift theta^2 + (drift eta - lambda - q) theta - q eta)
            let bq = drift * m.eta - m.lambda - q;
            let disc = (bq * bq + 4.0 * drift * q * m.eta).sqrt();
            let r1 = (-bq + disc) / (2.0 * drift);
            let r2 = (-bq - disc) / (2.0 * drift);
            let a1 = (m.eta + r1) / (drift * (r1 - r2));
            let a2 = (m.eta + r2) / (drift * (r2 - r1));
            Ok(vec![(a1, r1), (a2, r2)])
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::LevyModel;
    use approx::assert_relative_eq;

    const DELTA: f64 = 0.05;
    const GAMMA: f64 = 1.0;

    fn kit_y() -> ScaleKit {
        let p = LevyModel::brownian(1.0, 2.0).unwrap().drained(0.0).unwrap();
        ScaleKit::new(p, DELTA, GAMMA).unwrap()
    }

    fn kit_xt() -> ScaleKit {
        let p = LevyModel::brownian(1.0, 2.0).unwrap().drained(0.1).unwrap();
        ScaleKit::new(p, DELTA, GAMMA).unwrap()
    }

    #[test]
    fn w_vanishes_on_negatives_and_matches_closed_form_value() {
        let k = kit_y();
        assert_eq!(k.w(Rate::Delta, -1.0).unwrap(), 0.0);
        // frozen from arbitrary-precision evaluation of the two-root form
        assert_relative_eq!(
            k.w(Rate::Delta, 1.0).unwrap(),
            0.39510404362427326,
            epsilon = 1e-13
        );
    }

    #[test]
    fn brownian_roots_match_root_solver() {
        let k = kit_y();
        let r = k.brownian_roots(Rate::Delta).unwrap();
        assert_relative_eq!(r.theta_plus, 0.045803989154980802, epsilon = 1e-13);
        assert_relative_eq!(r.theta_minus, -0.5458039891549808, epsilon = 1e-13);
        assert_relative_eq!(r.kappa, 0.84515425472851658, epsilon = 1e-13);
        assert_relative_eq!(r.theta_plus, k.phi(Rate::Delta), epsilon = 1e-10);
        // kappa = ((drift)^2 + 2 sigma^2 rate)^{-1/2} = 2 / (sigma^2 (tp - tm))
        assert_relative_eq!(
            r.kappa,
            2.0 / (4.0 * (r.theta_plus - r.theta_minus)),
            epsilon = 1e-13
        );
    }

    #[test]
    fn z_boundary_and_value() {
        let k = kit_y();
        assert_eq!(k.z(Rate::Delta, 0.0).unwrap(), 1.0);
        assert_eq!(k.z(Rate::Delta, -3.0).unwrap(), 1.0);
        assert_relative_eq!(
            k.z(Rate::Delta, 1.0).unwrap(),
            1.0106745104714539,
            epsilon = 1e-13
        );
        // cross-check z = 1 + rate * wbar
        assert_relative_eq!(
            k.z(Rate::Delta, 1.0).unwrap(),
            1.0 + DELTA * k.wbar(Rate::Delta, 1.0).unwrap(),
            epsilon = 1e-14
        );
    }

    #[test]
    fn zero_rate_z_is_identically_one() {
        let p = LevyModel::brownian(1.0, 2.0).unwrap().drained(0.0).unwrap();
        let k = ScaleKit::new(p, 0.0, GAMMA).unwrap();
        for x in [0.5, 2.0, 7.0] {
            assert_relative_eq!(k.z(Rate::Delta, x).unwrap(), 1.0, epsilon = 1e-12);
            // and its running integral collapses to x
            assert_relative_eq!(k.zbar(Rate::Delta, x).unwrap(), x, epsilon = 1e-12);
        }
    }

    #[test]
    fn integrals_match_quadrature_of_w() {
        let k = kit_y();
        for (rate, x) in [(Rate::Delta, 1.0), (Rate::DeltaPlusGamma, 2.0)] {
            let wbar_quad = quad::integrate(&|u| k.w(rate, u).unwrap(), 0.0, x, 1e-12).unwrap();
            assert_relative_eq!(k.wbar(rate, x).unwrap(), wbar_quad, epsilon = 1e-10);
            let wbarbar_quad =
                quad::integrate(&|u| k.wbar(rate, u).unwrap(), 0.0, x, 1e-12).unwrap();
            assert_relative_eq!(k.wbarbar(rate, x).unwrap(), wbarbar_quad, epsilon = 1e-10);
        }
        // frozen value for the iterated integral at the clock-adjusted rate
        assert_relative_eq!(
            k.wbarbar(Rate::DeltaPlusGamma, 2.0).unwrap(),
            0.58192573241853145,
            epsilon = 1e-12
        );
        assert_eq!(k.wbarbar(Rate::DeltaPlusGamma, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn zbar_convention_left_of_zero() {
        let k = kit_y();
        assert_eq!(k.zbar(Rate::Delta, -2.5).unwrap(), -2.5);
        let zbar_quad =
            quad::integrate(&|u| k.z(Rate::Delta, u).unwrap(), 0.0, 3.0, 1e-12).unwrap();
        assert_relative_eq!(
            k.zbar(Rate::Delta, 3.0).unwrap(),
            zbar_quad,
            epsilon = 1e-10
        );
    }

    #[test]
    fn z_theta_reductions() {
        let k = kit_y();
        // theta = 0 collapses to Z
        for x in [0.3, 1.0, 4.0] {
            assert_relative_eq!(
                k.z_theta(Rate::Delta, x, 0.0).unwrap(),
                k.z(Rate::Delta, x).unwrap(),
                epsilon = 1e-12
            );
        }
        // empty integral left of zero
        assert_relative_eq!(
            k.z_theta(Rate::Delta, -1.2, 0.7).unwrap(),
            (-1.2 * 0.7_f64).exp(),
            epsilon = 1e-14
        );
    }

    #[test]
    fn z_theta_at_phi_matches_definitional_quadrature() {
        // frozen: Z^{(delta)}(3, phi(delta+gamma)) on the fully drained process
        let k = kit_xt();
        let phi = k.phi(Rate::DeltaPlusGamma);
        assert_relative_eq!(phi, 0.53369954527467591, epsilon = 1e-12);
        let z = k.z_theta(Rate::Delta, 3.0, phi).unwrap();
        assert_relative_eq!(z, 1.9873810388943865, epsilon = 1e-10);
        let zp = k.z_theta_prime(Rate::Delta, 3.0, phi).unwrap();
        assert_relative_eq!(zp, 0.20729700894558045, epsilon = 1e-10);
        // direct quadrature of the defining integral
        let coef = DELTA - k.process().laplace_exponent(phi);
        let integ = quad::integrate(
            &|u| (-phi * u).exp() * k.w(Rate::Delta, u).unwrap(),
            0.0,
            3.0,
            1e-12,
        )
        .unwrap();
        assert_relative_eq!(
            z,
            (phi * 3.0_f64).exp() * (1.0 + coef * integ),
            epsilon = 1e-10
        );
    }

    #[test]
    fn m_apply_pass_through_and_constant_reduction() {
        let k = kit_y();
        // x <= 0 passes through
        let v = k.m_apply(3.0, |u| u * u, -0.5).unwrap();
        assert_relative_eq!(v, 2.5 * 2.5, epsilon = 1e-14);
        // f = 1 reduces to 1 + gamma Wbar^{(delta+gamma)}(x)
        let v = k.m_apply(3.0, |_| 1.0, 2.0).unwrap();
        assert_relative_eq!(
            v,
            1.0 + GAMMA * k.wbar(Rate::DeltaPlusGamma, 2.0).unwrap(),
            epsilon = 1e-9
        );
    }

    #[test]
    fn kernels_match_frozen_values_and_boundary_identities() {
        let k = kit_y();
        let ker = k.kernels(3.0).unwrap();
        assert_relative_eq!(ker.i(2.0).unwrap(), 1.3342065506849311, epsilon = 1e-11);
        assert_relative_eq!(ker.j(2.0).unwrap(), 1.1902464606102485, epsilon = 1e-11);
        // I_b(0) = 1, J_b(0) = Z(b)
        assert_relative_eq!(ker.i(0.0).unwrap(), 1.0, epsilon = 1e-12);
        assert_relative_eq!(
            ker.j(0.0).unwrap(),
            k.z(Rate::Delta, 3.0).unwrap(),
            epsilon = 1e-12
        );
        // boundary reduction on (-b, 0)
        assert_relative_eq!(
            ker.i(-1.0).unwrap(),
            k.w(Rate::Delta, 2.0).unwrap() / k.w(Rate::Delta, 3.0).unwrap(),
            epsilon = 1e-13
        );
        assert_relative_eq!(
            ker.j(-1.0).unwrap(),
            k.z(Rate::Delta, 2.0).unwrap(),
            epsilon = 1e-13
        );
    }

    #[test]
    fn kernels_agree_with_definitional_m_apply_route() {
        let k = kit_y();
        let ker = k.kernels(3.0).unwrap();
        for x in [0.25, 1.0, 2.0, 5.0] {
            let w_b = k.m_apply(3.0, |v| k.w(Rate::Delta, v).unwrap(), x).unwrap();
            let i_def = w_b / k.w(Rate::Delta, 3.0).unwrap()
                - GAMMA * k.wbar(Rate::DeltaPlusGamma, x).unwrap();
            assert_relative_eq!(ker.i(x).unwrap(), i_def, max_relative = 1e-7);
            let z_b = k.m_apply(3.0, |v| k.z(Rate::Delta, v).unwrap(), x).unwrap();
            let j_def = z_b
                - GAMMA * k.z(Rate::Delta, 3.0).unwrap() * k.wbar(Rate::DeltaPlusGamma, x).unwrap();
            assert_relative_eq!(ker.j(x).unwrap(), j_def, max_relative = 1e-7);
        }
        // m_apply with f = W^{(delta)} is exactly W_b
        assert_relative_eq!(
            k.w_b(3.0, 2.0).unwrap(),
            k.m_apply(3.0, |v| k.w(Rate::Delta, v).unwrap(), 2.0)
                .unwrap(),
            max_relative = 1e-8
        );
    }

    #[test]
    fn laplace_transform_identity_numerically() {
        // int_0^T e^{-theta x} W^{(rate)}(x) dx ~ 1/(psi(theta) - rate)
        let k = kit_y();
        for rate in [Rate::Delta, Rate::DeltaPlusGamma] {
            let theta = k.phi(rate) + 1.0;
            let t_cap = 60.0;
            let integ = quad::integrate(
                &|x| (-theta * x).exp() * k.w(rate, x).unwrap(),
                0.0,
                t_cap,
                1e-12,
            )
            .unwrap();
            let expect = 1.0 / (k.process().laplace_exponent(theta) - k.rate_value(rate));
            assert_relative_eq!(integ, expect, max_relative = 1e-6);
        }
    }

    #[test]
    fn inversion_backend_agrees_with_closed_form_brownian() {
        let p = LevyModel::brownian(1.0, 2.0).unwrap().drained(0.0).unwrap();
        let closed = ScaleKit::new(p, DELTA, GAMMA).unwrap();
        let inv = ScaleKit::with_backend(p, DELTA, GAMMA, Backend::Inversion).unwrap();
        for rate in [Rate::Delta, Rate::DeltaPlusGamma] {
            for i in 0..=9 {
                let x = 0.1 + i as f64 * 1.1;
                assert_relative_eq!(
                    closed.w(rate, x).unwrap(),
                    inv.w(rate, x).unwrap(),
                    max_relative = 1e-8
                );
                assert_relative_eq!(
                    closed.z(rate, x).unwrap(),
                    inv.z(rate, x).unwrap(),
                    max_relative = 1e-8
                );
            }
        }
    }

    #[test]
    fn inversion_backend_agrees_with_partial_fractions_compound_poisson() {
        let p = LevyModel::compound_poisson(2.0, 0.0, 1.0, 1.0)
            .unwrap()
            .drained(0.0)
            .unwrap();
        let closed = ScaleKit::new(p, DELTA, GAMMA).unwrap();
        let inv = ScaleKit::with_backend(p, DELTA, GAMMA, Backend::Inversion).unwrap();
        // frozen partial-fraction values
        assert_relative_eq!(
            closed.w(Rate::Delta, 1.0).unwrap(),
            0.7152051622548823,
            epsilon = 1e-12
        );
        assert_relative_eq!(
            closed.w(Rate::Delta, 5.0).unwrap(),
            1.135469278127406,
            epsilon = 1e-12
        );
        for rate in [Rate::Delta, Rate::DeltaPlusGamma] {
            for i in 0..=9 {
                let x = 0.1 + i as f64 * 1.1;
                assert_relative_eq!(
                    closed.w(rate, x).unwrap(),
                    inv.w(rate, x).unwrap(),
                    max_relative = 1e-8
                );
                assert_relative_eq!(
                    closed.z(rate, x).unwrap(),
                    inv.z(rate, x).unwrap(),
                    max_relative = 1e-8
                );
            }
        }
    }

    #[test]
    fn compound_poisson_atom_at_zero() {
        // W(0) = 1/c for bounded variation; closed form and inversion limit
        let p = LevyModel::compound_poisson(2.0, 0.0, 1.0, 1.0)
            .unwrap()
            .drained(0.0)
            .unwrap();
        let closed = ScaleKit::new(p, DELTA, GAMMA).unwrap();
        assert_relative_eq!(closed.w(Rate::Delta, 0.0).unwrap(), 0.5, epsilon = 1e-12);
        let inv = ScaleKit::with_backend(p, DELTA, GAMMA, Backend::Inversion).unwrap();
        let small = inv.w(Rate::Delta, 0.01).unwrap();
        assert_relative_eq!(small, 0.5, max_relative = 0.02);
        // Brownian case is continuous at zero with W(0) = 0
        let kb = kit_y();
        assert_eq!(kb.w(Rate::Delta, 0.0).unwrap(), 0.0);
        assert!(kb.w(Rate::Delta, 1e-9).unwrap() < 1e-8);
    }

    #[test]
    fn closed_form_unavailable_for_mixed_compound_poisson() {
        let p = LevyModel::compound_poisson(2.0, 0.5, 1.0, 1.0)
            .unwrap()
            .drained(0.0)
            .unwrap();
        let err = ScaleKit::with_backend(p, DELTA, GAMMA, Backend::ClosedForm);
        assert!(matches!(err, Err(LevyError::BackendUnavailable(_))));
        // default constructor silently routes to inversion
        let k = ScaleKit::new(p, DELTA, GAMMA).unwrap();
        assert_eq!(k.backend(), Backend::Inversion);
        assert!(k.w(Rate::Delta, 1.0).unwrap() > 0.0);
    }
}
