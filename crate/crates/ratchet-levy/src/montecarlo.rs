//! Monte Carlo oracle: path simulation of the controlled surplus.
//!
//! Paths follow the Euler grid with events (periodic decision times, claim
//! arrivals) stepped to exactly. Between grid points the Brownian bridge gives
//! the exact probability of an unseen barrier crossing, which removes the
//! first-passage discretization bias that plain endpoint checks leave behind;
//! without the correction the bias at `dt = 1e-3` exceeds the standard errors
//! the estimates are held to.
//!
//! Reproducibility: every path draws from its own ChaCha stream keyed by
//! `(seed, path_index)`, and chunk results are combined in index order, so an
//! estimate depends only on `(seed, n_paths, config)` and never on scheduling.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{LevyError, Result};
use crate::models::LevyModel;
use crate::pool;
use crate::valuation::Strategy;

/// Simulation grid and reproducibility settings.
#[derive(Debug, Clone, Copy)]
pub struct SimConfig {
    pub dt: f64,
    pub t_max: f64,
    pub n_paths: u64,
    pub seed: u64,
    pub antithetic: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            dt: 1e-3,
            t_max: 2000.0,
            n_paths: 100_000,
            seed: 0,
            antithetic: false,
        }
    }
}

impl SimConfig {
    /// Checks grid invariants against the strategy's decision intensity:
    /// the grid must resolve the decision clock, `dt <= 1/(10 gamma)`.
    pub fn validate(&self, gamma: f64) -> Result<()> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(LevyError::ConfigError("dt must be > 0".into()));
        }
        if !(self.t_max > 0.0) || !self.t_max.is_finite() {
            return Err(LevyError::ConfigError("t_max must be > 0".into()));
        }
        if self.n_paths == 0 {
            return Err(LevyError::ConfigError("n_paths must be > 0".into()));
        }
        if self.dt > 1.0 / (10.0 * gamma) {
            return Err(LevyError::ConfigError(format!(
                "dt = {} too coarse for gamma = {gamma}: need dt <= 1/(10 gamma) = {}",
                self.dt,
                1.0 / (10.0 * gamma)
            )));
        }
        Ok(())
    }
}

/// Which discounted functional an estimate aggregates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    DividendNpv,
    RuinLaplace,
}

/// One simulated path's discounted dividends and ruin data.
#[derive(Debug, Clone, Copy)]
pub struct PathOutcome {
    pub ruined: bool,
    /// Ruin time, or `t_max` when censored (`ruined = false`).
    pub tau: f64,
    /// Discounted continuous-stream dividends up to ruin or censoring.
    pub disc_ratchet: f64,
    /// Discounted lump dividends.
    pub disc_periodic: f64,
    /// `e^{-delta tau}` if ruined, zero if censored.
    pub disc_ruin_indicator: f64,
}

/// Aggregated estimate with its standard error and censoring report.
#[derive(Debug, Clone, Copy)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n: u64,
    pub censored_fraction: f64,
}

struct PathRng {
    rng: ChaCha8Rng,
    negate: bool,
}

impl PathRng {
    fn new(seed: u64, path_index: u64, antithetic: bool) -> Self {
        let (stream, negate) = if antithetic {
            (path_index / 2 * 2, path_index % 2 == 1)
        } else {
            (path_index, false)
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        PathRng { rng, negate }
    }

    fn normal(&mut self) -> f64 {
        let z: f64 = self.rng.sample(StandardNormal);
        if self.negate {
            -z
        } else {
            z
        }
    }

    fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    fn exp(&mut self, rate: f64) -> f64 {
        -(1.0 - self.rng.random::<f64>()).ln() / rate
    }
}

/// Discount-weighted length of `[t0, t1]`: `int_{t0}^{t1} e^{-delta s} ds`.
fn discounted_span(delta: f64, t0: f64, t1: f64) -> f64 {
    if delta == 0.0 {
        t1 - t0
    } else {
        (-delta * t0).exp() * (-(-delta * (t1 - t0)).exp_m1()) / delta
    }
}

/// Simulates one controlled path; deterministic in `(seed, path_index)`.
pub fn simulate_path(
    model: &LevyModel,
    s: &Strategy,
    delta: f64,
    y0: f64,
    cfg: &SimConfig,
    path_index: u64,
) -> Result<PathOutcome> {
    validate_run(model, s, delta, y0, cfg)?;
    Ok(simulate_core(model, s, delta, y0, cfg, path_index))
}

fn validate_run(
    model: &LevyModel,
    s: &Strategy,
    delta: f64,
    y0: f64,
    cfg: &SimConfig,
) -> Result<()> {
    model.validate()?;
    s.validate()?;
    cfg.validate(s.gamma)?;
    if !(delta >= 0.0) {
        return Err(LevyError::InvalidInput("delta must be >= 0".into()));
    }
    if !(y0 >= 0.0) {
        return Err(LevyError::InvalidInput("y0 must be >= 0".into()));
    }
    // the fully drained process must still drift upward
    model.drained(s.c1 + s.c2)?;
    Ok(())
}

fn simulate_core(
    model: &LevyModel,
    s: &Strategy,
    delta: f64,
    y0: f64,
    cfg: &SimConfig,
    path_index: u64,
) -> PathOutcome {
    let mut rng = PathRng::new(cfg.seed, path_index, cfg.antithetic);
    let sigma = model.sigma;
    let sig2 = sigma * sigma;
    let has_jumps = model.lambda > 0.0;

    let mut t = 0.0_f64;
    let mut cur = y0;
    let mut ratcheted = y0 >= s.b;
    let mut ratchet_time = 0.0_f64;
    let mut disc_periodic = 0.0_f64;
    let mut ruined = false;
    let mut tau = cfg.t_max;

    let mut next_dec = rng.exp(s.gamma);
    let mut next_jump = if has_jumps {
        rng.exp(model.lambda)
    } else {
        f64::INFINITY
    };

    'path: while t < cfg.t_max {
        let grid_next = t + cfg.dt;
        let mut t_next = grid_next.min(cfg.t_max);
        let mut is_dec = false;
        let mut is_jump = false;
        if next_dec <= t_next {
            t_next = next_dec;
            is_dec = true;
            is_jump = false;
        }
        if next_jump < t_next || (next_jump == t_next && !is_dec) {
            t_next = next_jump;
            is_jump = true;
            is_dec = false;
        }
        let h = t_next - t;
        let prev = cur;
        if h > 0.0 {
            let rate = if ratcheted { s.c1 + s.c2 } else { s.c1 };
            cur += (model.mu - rate) * h;
            if sigma > 0.0 {
                cur += sigma * h.sqrt() * rng.normal();
            }
        }
        t = t_next;

        // ruin inside or at the end of the diffusion segment
        if cur < 0.0 {
            ruined = true;
            tau = t;
            break 'path;
        }
        if sigma > 0.0 && h > 0.0 && prev >= 0.0 {
            // bridge crossing of zero; skip when the probability underflows
            let prod = 2.0 * prev * cur;
            if prod < 40.0 * sig2 * h && rng.uniform() < (-prod / (sig2 * h)).exp() {
                ruined = true;
                tau = t;
                break 'path;
            }
        }

        // permanent ratchet the first time the surplus reaches b
        if !ratcheted && s.b.is_finite() {
            if cur >= s.b {
                ratcheted = true;
                ratchet_time = if sigma == 0.0 && h > 0.0 {
                    // deterministic segment: exact crossing time
                    t - h + (s.b - prev) / ((cur - prev) / h)
                } else {
                    t
                };
            } else if sigma > 0.0 && h > 0.0 && prev < s.b {
                let prod = 2.0 * (s.b - prev) * (s.b - cur);
                if prod < 40.0 * sig2 * h && rng.uniform() < (-prod / (sig2 * h)).exp() {
                    ratcheted = true;
                    ratchet_time = t;
                }
            }
        }

        if is_jump {
            cur -= rng.exp(model.eta);
            next_jump = t + rng.exp(model.lambda);
            if cur < 0.0 {
                ruined = true;
                tau = t;
                break 'path;
            }
        }
        if is_dec {
            next_dec = t + rng.exp(s.gamma);
            if cur > s.a {
                disc_periodic += (-delta * t).exp() * (cur - s.a);
                cur = s.a;
                debug_assert!(cur <= s.a);
            }
        }
    }

    let t_end = if ruined { tau } else { cfg.t_max };
    let mut disc_ratchet = s.c1 * discounted_span(delta, 0.0, t_end);
    if ratcheted {
        disc_ratchet += s.c2 * discounted_span(delta, ratchet_time, t_end);
    }
    PathOutcome {
        ruined,
        tau,
        disc_ratchet,
        disc_periodic,
        disc_ruin_indicator: if ruined { (-delta * tau).exp() } else { 0.0 },
    }
}

#[derive(Default, Clone, Copy)]
struct ChunkStat {
    sum_d: f64,
    sumsq_d: f64,
    sum_r: f64,
    sumsq_r: f64,
    censored: u64,
}

/// Estimates one target; simulates the path set once.
pub fn estimate(
    model: &LevyModel,
    s: &Strategy,
    delta: f64,
    y0: f64,
    cfg: &SimConfig,
    target: Target,
) -> Result<McEstimate> {
    let (div, ruin) = estimate_pair(model, s, delta, y0, cfg)?;
    Ok(match target {
        Target::DividendNpv => div,
        Target::RuinLaplace => ruin,
    })
}

/// Estimates both targets from one shared path set.
pub fn estimate_pair(
    model: &LevyModel,
    s: &Strategy,
    delta: f64,
    y0: f64,
    cfg: &SimConfig,
) -> Result<(McEstimate, McEstimate)> {
    estimate_pair_with_workers(model, s, delta, y0, cfg, pool::worker_count())
}

/// As [`estimate_pair`], with an explicit worker count. The result is
/// bitwise identical for any `workers >= 1`.
pub fn estimate_pair_with_workers(
    model: &LevyModel,
    s: &Strategy,
    delta: f64,
    y0: f64,
    cfg: &SimConfig,
    workers: usize,
) -> Result<(McEstimate, McEstimate)> {
    validate_run(model, s, delta, y0, cfg)?;
    let n = cfg.n_paths as usize;
    let chunks = pool::map_chunks(n, 4096, workers.max(1), |from, to| {
        let mut st = ChunkStat::default();
        for idx in from..to {
            let o = simulate_core(model, s, delta, y0, cfg, idx as u64);
            let d = o.disc_ratchet + o.disc_periodic;
            st.sum_d += d;
            st.sumsq_d += d * d;
            st.sum_r += o.disc_ruin_indicator;
            st.sumsq_r += o.disc_ruin_indicator * o.disc_ruin_indicator;
            if !o.ruined {
                st.censored += 1;
            }
        }
        st
    });
    let mut total = ChunkStat::default();
    for c in &chunks {
        total.sum_d += c.sum_d;
        total.sumsq_d += c.sumsq_d;
        total.sum_r += c.sum_r;
        total.sumsq_r += c.sumsq_r;
        total.censored += c.censored;
    }
    let nf = cfg.n_paths as f64;
    let censored_fraction = total.censored as f64 / nf;
    let finish = |sum: f64, sumsq: f64| {
        let mean = sum / nf;
        let std_error = if cfg.n_paths > 1 {
            ((sumsq - nf * mean * mean).max(0.0) / ((nf - 1.0) * nf)).sqrt()
        } else {
            0.0
        };
        McEstimate {
            mean,
            std_error,
            n: cfg.n_paths,
            censored_fraction,
        }
    };
    Ok((
        finish(total.sum_d, total.sumsq_d),
        finish(total.sum_r, total.sumsq_r),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ruin::laplace_ruin;
    use crate::scale::{Rate, ScaleKit};
    use crate::valuation::value;

    fn model() -> LevyModel {
        LevyModel::brownian(1.0, 2.0).unwrap()
    }

    fn base() -> Strategy {
        Strategy::new(3.0, 5.0, 0.0, 0.1, 1.0).unwrap()
    }

    const DELTA: f64 = 0.05;

    #[test]
    fn config_invariant_against_decision_clock() {
        let cfg = SimConfig {
            dt: 0.2,
            ..SimConfig::default()
        };
        assert!(matches!(cfg.validate(1.0), Err(LevyError::ConfigError(_))));
        assert!(cfg.validate(0.1).is_ok());
    }

    #[test]
    fn disabled_clock_gives_plain_first_passage() {
        // gamma tiny: the first decision lands far beyond the horizon, the
        // ratchet is off (b infinite), so tau is the uncontrolled passage of 0
        let m = model();
        let s = Strategy::periodic_only(3.0, 1e-12).unwrap();
        let cfg = SimConfig {
            dt: 0.01,
            t_max: 800.0,
            n_paths: 20_000,
            seed: 7,
            antithetic: false,
        };
        let (div, ruin) = estimate_pair(&m, &s, DELTA, 5.0, &cfg).unwrap();
        assert_eq!(div.mean, 0.0);
        // classical one-sided transform Z - (delta/Phi) W on the undrained process
        let kit = ScaleKit::new(m.drained(0.0).unwrap(), DELTA, 0.0).unwrap();
        let expect = kit.z(Rate::Delta, 5.0).unwrap()
            - DELTA / kit.phi(Rate::Delta) * kit.w(Rate::Delta, 5.0).unwrap();
        let zscore = (ruin.mean - expect) / ruin.std_error;
        assert!(
            zscore.abs() < 4.0,
            "z = {zscore}, mc = {}, cf = {expect}",
            ruin.mean
        );
    }

    #[test]
    fn zero_initial_surplus_ruins_immediately() {
        let o = simulate_path(
            &model(),
            &base(),
            DELTA,
            0.0,
            &SimConfig {
                n_paths: 1,
                ..SimConfig::default()
            },
            0,
        )
        .unwrap();
        assert!(o.ruined);
        assert!(o.tau <= 2e-3);
        assert!(o.disc_ruin_indicator > 0.999);
    }

    #[test]
    fn paths_are_deterministic_in_seed_and_index() {
        let m = model();
        let s = base();
        let cfg = SimConfig {
            n_paths: 4,
            seed: 42,
            ..SimConfig::default()
        };
        let a = simulate_path(&m, &s, DELTA, 6.0, &cfg, 3).unwrap();
        let b = simulate_path(&m, &s, DELTA, 6.0, &cfg, 3).unwrap();
        assert_eq!(a.tau.to_bits(), b.tau.to_bits());
        assert_eq!(a.disc_ratchet.to_bits(), b.disc_ratchet.to_bits());
        let c = simulate_path(&m, &s, DELTA, 6.0, &cfg, 4).unwrap();
        assert_ne!(a.tau.to_bits(), c.tau.to_bits());
    }

    #[test]
    fn estimates_identical_across_worker_counts() {
        let m = model();
        let s = base();
        let cfg = SimConfig {
            dt: 0.01,
            t_max: 200.0,
            n_paths: 10_000,
            seed: 11,
            antithetic: false,
        };
        let (d1, r1) = estimate_pair_with_workers(&m, &s, DELTA, 5.0, &cfg, 1).unwrap();
        for w in [2, 4, 16] {
            let (dw, rw) = estimate_pair_with_workers(&m, &s, DELTA, 5.0, &cfg, w).unwrap();
            assert_eq!(d1.mean.to_bits(), dw.mean.to_bits());
            assert_eq!(d1.std_error.to_bits(), dw.std_error.to_bits());
            assert_eq!(r1.mean.to_bits(), rw.mean.to_bits());
            assert_eq!(r1.censored_fraction, rw.censored_fraction);
        }
    }

    #[test]
    fn single_path_estimate_flags_degenerate_error() {
        let cfg = SimConfig {
            dt: 0.01,
            t_max: 50.0,
            n_paths: 1,
            seed: 3,
            antithetic: false,
        };
        let (d, _) = estimate_pair(&model(), &base(), DELTA, 5.0, &cfg).unwrap();
        assert_eq!(d.n, 1);
        assert_eq!(d.std_error, 0.0);
    }

    #[test]
    fn agrees_with_closed_forms_at_moderate_path_count() {
        let m = model();
        let s = base();
        let cfg = SimConfig {
            dt: 2e-3,
            t_max: 1200.0,
            n_paths: 40_000,
            seed: 2024,
            antithetic: false,
        };
        for y in [2.0, 4.0, 8.0] {
            let (div, ruin) = estimate_pair(&m, &s, DELTA, y, &cfg).unwrap();
            let v = value(&m, &s, DELTA, y).unwrap().value;
            let l = laplace_ruin(&m, &s, DELTA, y).unwrap().value;
            let zd = (div.mean - v) / div.std_error;
            let zr = (ruin.mean - l) / ruin.std_error;
            assert!(zd.abs() < 4.5, "dividends z = {zd} at y = {y}");
            assert!(zr.abs() < 4.5, "ruin z = {zr} at y = {y}");
            assert!(div.censored_fraction < 1e-3);
        }
    }

    #[test]
    fn periodic_only_paths_match_the_closed_form() {
        // ratchet disabled end to end: c1 = c2 = 0, b infinite
        let m = model();
        let s = Strategy::periodic_only(3.0, 1.0).unwrap();
        let cfg = SimConfig {
            dt: 2e-3,
            t_max: 1200.0,
            n_paths: 30_000,
            seed: 77,
            antithetic: false,
        };
        let (div, _) = estimate_pair(&m, &s, DELTA, 5.0, &cfg).unwrap();
        let v = crate::valuation::value_periodic_only(&m, 3.0, 1.0, DELTA, 5.0).unwrap();
        let z = (div.mean - v) / div.std_error;
        assert!(z.abs() < 4.5, "z = {z}, mc = {}, cf = {v}", div.mean);
    }

    #[test]
    fn compound_poisson_paths_agree_with_closed_form() {
        // sigma = 0: deterministic segments between jumps, no bridge needed
        let m = LevyModel::compound_poisson(2.0, 0.0, 1.0, 1.0).unwrap();
        let s = base();
        let cfg = SimConfig {
            dt: 0.01,
            t_max: 1500.0,
            n_paths: 30_000,
            seed: 5,
            antithetic: false,
        };
        for y in [2.0, 6.0] {
            let (div, ruin) = estimate_pair(&m, &s, DELTA, y, &cfg).unwrap();
            let v = value(&m, &s, DELTA, y).unwrap().value;
            let l = laplace_ruin(&m, &s, DELTA, y).unwrap().value;
            let zd = (div.mean - v) / div.std_error;
            let zr = (ruin.mean - l) / ruin.std_error;
            assert!(
                zd.abs() < 4.5,
                "dividends z = {zd} at y = {y} (mc {}, cf {v})",
                div.mean
            );
            assert!(
                zr.abs() < 4.5,
                "ruin z = {zr} at y = {y} (mc {}, cf {l})",
                ruin.mean
            );
        }
    }

    #[test]
    fn antithetic_pairs_reuse_streams_with_flipped_noise() {
        let m = model();
        let s = base();
        let cfg = SimConfig {
            dt: 0.01,
            t_max: 100.0,
            n_paths: 2,
            seed: 9,
            antithetic: true,
        };
        let a = simulate_path(&m, &s, DELTA, 5.0, &cfg, 0).unwrap();
        let b = simulate_path(&m, &s, DELTA, 5.0, &cfg, 1).unwrap();
        // different outcomes from mirrored noise, same event clock
        assert_ne!(a.tau.to_bits(), b.tau.to_bits());
    }

    #[test]
    fn small_discount_ruin_transform_near_one() {
        let m = model();
        let s = base();
        let cfg = SimConfig {
            dt: 5e-3,
            t_max: 5000.0,
            n_paths: 4_000,
            seed: 1,
            antithetic: false,
        };
        let (_, ruin) = estimate_pair(&m, &s, 1e-8, 5.0, &cfg).unwrap();
        assert!(
            ruin.mean > 1.0 - 1e-3 - ruin.censored_fraction,
            "mean = {}, censored = {}",
            ruin.mean,
            ruin.censored_fraction
        );
    }
}
