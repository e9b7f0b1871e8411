//! Exponential-polynomial algebra.
//!
//! Scale functions of the supported models are finite sums `sum c x^p e^{r x}`
//! on `x >= 0`, and every derived object (running integrals, the convolution
//! operator, the exit kernels) stays inside that family. Building those objects
//! symbolically once and evaluating them pointwise keeps the closed-form
//! backend exact and avoids re-deriving each expansion by hand.

/// Rates closer than this are treated as equal when integrating; the exact
/// coincidence branch is used instead of a `1/(r - s)` coefficient that would
/// amplify roundoff. Near-coincident (but unequal) rates in `(1e-9, 1e-7)`
/// lose precision either way and do not occur for admissible parameters.
const RATE_MERGE_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy)]
struct Term {
    coef: f64,
    pow: u32,
    rate: f64,
}

/// `sum of coef * x^pow * exp(rate * x)`, valid on `x >= 0`.
#[derive(Debug, Clone, Default)]
pub(crate) struct ExpPoly {
    terms: Vec<Term>,
}

impl ExpPoly {
    pub fn zero() -> Self {
        ExpPoly { terms: Vec::new() }
    }

    pub fn constant(c: f64) -> Self {
        ExpPoly {
            terms: vec![Term {
                coef: c,
                pow: 0,
                rate: 0.0,
            }],
        }
    }

    /// Builds `sum c_i e^{r_i x}` from `(c_i, r_i)` pairs.
    pub fn from_exps(pairs: &[(f64, f64)]) -> Self {
        ExpPoly {
            terms: pairs
                .iter()
                .map(|&(coef, rate)| Term { coef, pow: 0, rate })
                .collect(),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.terms
            .iter()
            .map(|t| t.coef * x.powi(t.pow as i32) * (t.rate * x).exp())
            .sum()
    }

    pub fn add(&mut self, other: &ExpPoly) {
        self.terms.extend_from_slice(&other.terms);
        self.compress();
    }

    /// Removes every exponentially growing term. Only valid for combinations
    /// that are analytically subexponential: there the positive-rate
    /// coefficients cancel exactly and any residue is pure roundoff, which
    /// would otherwise be amplified by `e^{rate x}` at large `x`.
    pub fn prune_growing(&mut self) {
        self.terms.retain(|t| t.rate <= RATE_MERGE_EPS);
    }

    pub fn scaled(&self, c: f64) -> ExpPoly {
        ExpPoly {
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    coef: c * t.coef,
                    ..*t
                })
                .collect(),
        }
    }

    /// Multiplies by `e^{dr x}`.
    pub fn mul_exp(&self, dr: f64) -> ExpPoly {
        ExpPoly {
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    rate: t.rate + dr,
                    ..*t
                })
                .collect(),
        }
    }

    /// `x -> f(x + b)` re-expanded around the new origin.
    pub fn shift(&self, b: f64) -> ExpPoly {
        let mut out = ExpPoly::zero();
        for t in &self.terms {
            let scale = (t.rate * b).exp();
            // (x + b)^p = sum_j C(p, j) b^{p-j} x^j
            for j in 0..=t.pow {
                let binom = binomial(t.pow, j);
                out.terms.push(Term {
                    coef: t.coef * scale * binom * b.powi((t.pow - j) as i32),
                    pow: j,
                    rate: t.rate,
                });
            }
        }
        out.compress();
        out
    }

    /// Antiderivative vanishing at zero: `x -> int_0^x f(u) du`.
    pub fn antiderivative(&self) -> ExpPoly {
        let mut out = ExpPoly::zero();
        for t in &self.terms {
            push_int_pow_exp(&mut out.terms, t.coef, t.pow, t.rate);
        }
        out.compress();
        out
    }

    /// `x -> int_0^x w(x - u) f(u) du` where `w(v) = sum a_i e^{s_i v}`.
    pub fn convolve_exps(&self, w: &[(f64, f64)]) -> ExpPoly {
        let mut out = ExpPoly::zero();
        for &(a, s) in w {
            for t in &self.terms {
                // a e^{s x} * int_0^x u^p e^{(r - s) u} du
                let mut inner = Vec::new();
                push_int_pow_exp(&mut inner, a * t.coef, t.pow, t.rate - s);
                for it in &mut inner {
                    it.rate += s;
                }
                out.terms.extend(inner);
            }
        }
        out.compress();
        out
    }

    fn compress(&mut self) {
        self.terms.retain(|t| t.coef != 0.0);
        self.terms
            .sort_by(|a, b| a.pow.cmp(&b.pow).then(a.rate.partial_cmp(&b.rate).unwrap()));
        let mut merged: Vec<Term> = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            match merged.last_mut() {
                Some(last) if last.pow == t.pow && (last.rate - t.rate).abs() == 0.0 => {
                    last.coef += t.coef;
                }
                _ => merged.push(*t),
            }
        }
        self.terms = merged;
    }
}

fn binomial(n: u32, k: u32) -> f64 {
    let mut v = 1.0;
    for i in 0..k {
        v = v * (n - i) as f64 / (i + 1) as f64;
    }
    v
}

fn factorial_ratio(p: u32, j: u32) -> f64 {
    // p! / j!
    ((j + 1)..=p).map(|i| i as f64).product()
}

/// Appends terms of `c * int_0^x u^p e^{q u} du`.
fn push_int_pow_exp(out: &mut Vec<Term>, c: f64, p: u32, q: f64) {
    if q.abs() <= RATE_MERGE_EPS {
        out.push(Term {
            coef: c / (p + 1) as f64,
            pow: p + 1,
            rate: 0.0,
        });
        return;
    }
    // int u^p e^{qu} du = e^{qu} sum_{j<=p} (-1)^{p-j} (p!/j!) u^j / q^{p-j+1}
    for j in 0..=p {
        let sign = if (p - j) % 2 == 0 { 1.0 } else { -1.0 };
        out.push(Term {
            coef: c * sign * factorial_ratio(p, j) * q.powi(-((p - j + 1) as i32)),
            pow: j,
            rate: q,
        });
    }
    let sign = if p % 2 == 0 { -1.0 } else { 1.0 };
    out.push(Term {
        coef: c * sign * factorial_ratio(p, 0) * q.powi(-((p + 1) as i32)),
        pow: 0,
        rate: 0.0,
    });
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn antiderivative_of_exponential() {
        let f = ExpPoly::from_exps(&[(2.0, 0.5)]);
        let g = f.antiderivative();
        // 2 (e^{x/2} - 1) / 0.5 = 4 (e^{x/2} - 1)
        assert_relative_eq!(g.eval(1.3), 4.0 * ((0.65_f64).exp() - 1.0), epsilon = 1e-14);
        assert_relative_eq!(g.eval(0.0), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn antiderivative_of_linear_times_exponential() {
        // int_0^x u e^{-u} du = 1 - (1 + x) e^{-x}
        let mut f = ExpPoly::zero();
        f.terms.push(Term {
            coef: 1.0,
            pow: 1,
            rate: -1.0,
        });
        let g = f.antiderivative();
        let x = 2.7;
        assert_relative_eq!(g.eval(x), 1.0 - (1.0 + x) * (-x).exp(), epsilon = 1e-14);
    }

    #[test]
    fn zero_rate_integrates_to_power() {
        let f = ExpPoly::constant(3.0);
        let g = f.antiderivative().antiderivative();
        assert_relative_eq!(g.eval(2.0), 6.0, epsilon = 1e-14); // 3 x^2 / 2
    }

    #[test]
    fn shift_matches_direct_evaluation() {
        let mut f = ExpPoly::from_exps(&[(1.5, 0.3), (-0.4, -0.8)]);
        f.terms.push(Term {
            coef: 0.7,
            pow: 2,
            rate: 0.1,
        });
        let g = f.shift(1.9);
        for x in [0.0, 0.5, 3.2] {
            assert_relative_eq!(g.eval(x), f.eval(x + 1.9), epsilon = 1e-12);
        }
    }

    #[test]
    fn convolution_matches_quadrature() {
        let w = [(0.8, 0.4), (-0.8, -1.1)];
        let f = ExpPoly::from_exps(&[(1.0, 0.2), (2.0, -0.5)]);
        let conv = f.convolve_exps(&w);
        let x = 1.7;
        // midpoint rule refined enough for 1e-9
        let n = 200_000;
        let h = x / n as f64;
        let weval = |v: f64| -> f64 { w.iter().map(|&(a, s)| a * (s * v).exp()).sum() };
        let mut acc = 0.0;
        for i in 0..n {
            let u = (i as f64 + 0.5) * h;
            acc += weval(x - u) * f.eval(u) * h;
        }
        assert_relative_eq!(conv.eval(x), acc, epsilon = 1e-8);
    }

    #[test]
    fn coincident_rate_convolution_uses_exact_branch() {
        // int_0^x e^{0.4(x-u)} e^{0.4u} du = x e^{0.4x}
        let f = ExpPoly::from_exps(&[(1.0, 0.4)]);
        let conv = f.convolve_exps(&[(1.0, 0.4)]);
        let x = 2.2;
        assert_relative_eq!(conv.eval(x), x * (0.4 * x as f64).exp(), epsilon = 1e-13);
    }
}
