//! Discretization-convergence check: halving the grid moves the estimates by
//! less than the combined statistical noise at the base parameter set.

use ratchet_levy::{estimate_pair, LevyModel, SimConfig, Strategy};

#[test]
fn halving_dt_moves_estimates_less_than_two_combined_standard_errors() {
    let m = LevyModel::brownian(1.0, 2.0).unwrap();
    let s = Strategy::new(3.0, 5.0, 0.0, 0.1, 1.0).unwrap();
    let run = |dt: f64| {
        let cfg = SimConfig {
            dt,
            t_max: 2000.0,
            n_paths: 100_000,
            seed: 515,
            antithetic: false,
        };
        estimate_pair(&m, &s, 0.05, 5.0, &cfg).unwrap()
    };
    let (d1, r1) = run(1e-3);
    let (d2, r2) = run(5e-4);
    let comb = |a: f64, b: f64| (a * a + b * b).sqrt();
    let dv = (d1.mean - d2.mean).abs();
    let dl = (r1.mean - r2.mean).abs();
    assert!(
        dv < 2.0 * comb(d1.std_error, d2.std_error),
        "dividend estimate moved {dv} vs allowance {}",
        2.0 * comb(d1.std_error, d2.std_error)
    );
    assert!(
        dl < 2.0 * comb(r1.std_error, r2.std_error),
        "ruin estimate moved {dl} vs allowance {}",
        2.0 * comb(r1.std_error, r2.std_error)
    );
}
