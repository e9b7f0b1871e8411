//! Bundled sweep presets reproducing the study panels.
//!
//! Base parameters throughout: `mu = 1`, `sigma = 2`, `c1 = 0`, `c2 = 0.1`,
//! `gamma = 1`, `delta = 0.05`. Each preset emits one CSV per panel; panels
//! with several curves carry a `curve` column.

use anyhow::{anyhow, Result};
use ratchet_levy::{
    sigma_profile, sweep, Axis, LevyModel, Quantity, Strategy, SweepFixed, SweepSpec,
};

pub const PRESET_NAMES: [&str; 9] = [
    "fig1a", "fig1b", "fig3", "fig4", "fig5", "fig6a", "fig6b", "fig6c", "fig6d",
];

/// One output file: name stem plus CSV body.
pub struct Panel {
    pub name: String,
    pub csv: String,
}

fn base_model() -> LevyModel {
    LevyModel::brownian(1.0, 2.0).expect("base model")
}

fn strat(a: f64, b: f64) -> Strategy {
    Strategy::new(a, b, 0.0, 0.1, 1.0).expect("base strategy")
}

fn fixed(a: f64, b: f64, y: f64) -> SweepFixed {
    SweepFixed {
        model: base_model(),
        strategy: strat(a, b),
        delta: 0.05,
        y,
    }
}

fn fmt(v: f64) -> String {
    format!("{v:.12e}")
}

/// Renders one or more single-axis curves into a panel CSV.
fn curves_csv(
    quantity: Quantity,
    axis: Axis,
    lo: f64,
    hi: f64,
    n: usize,
    curves: &[(&str, SweepFixed)],
) -> Result<String> {
    let qname = match quantity {
        Quantity::DividendNpv => "dividend_npv",
        Quantity::RuinLaplace => "ruin_laplace",
    };
    let mut out = String::new();
    let multi = curves.len() > 1;
    if multi {
        out.push_str(&format!("curve,{},{qname},error\n", axis.name()));
    } else {
        out.push_str(&format!("{},{qname},error\n", axis.name()));
    }
    for (label, fx) in curves {
        let rows = sweep(&SweepSpec {
            quantity,
            axis,
            lo,
            hi,
            n_points: n,
            fixed: *fx,
        })?;
        for r in rows {
            let val = r.value.map(fmt).unwrap_or_default();
            let err = r.error.unwrap_or_default();
            if multi {
                out.push_str(&format!("{label},{},{val},{err}\n", fmt(r.axis_value)));
            } else {
                out.push_str(&format!("{},{val},{err}\n", fmt(r.axis_value)));
            }
        }
    }
    Ok(out)
}

fn grid_csv(quantity: Quantity, fx: SweepFixed, lo: f64, hi: f64, n: usize) -> Result<String> {
    let qname = match quantity {
        Quantity::DividendNpv => "dividend_npv",
        Quantity::RuinLaplace => "ruin_laplace",
    };
    let rows = sweep(&SweepSpec {
        quantity,
        axis: Axis::C1C2Grid,
        lo,
        hi,
        n_points: n,
        fixed: fx,
    })?;
    let mut out = format!("c1,c2,{qname},error\n");
    for r in rows {
        let val = r.value.map(fmt).unwrap_or_default();
        let err = r.error.unwrap_or_default();
        out.push_str(&format!(
            "{},{},{val},{err}\n",
            fmt(r.axis_value),
            fmt(r.axis_value2.unwrap())
        ));
    }
    Ok(out)
}

fn profile_csv(y: f64, a: f64, b: f64) -> Result<String> {
    let prof = sigma_profile(&base_model(), y, &strat(a, b), 0.05, 0.025, 0.8, 32)?;
    let mut out = String::from("sigma,dividend_npv,concave,error\n");
    for (sg, v, flag) in prof.rows {
        let f = flag.map(|b| b.to_string()).unwrap_or_default();
        out.push_str(&format!("{},{},{f},\n", fmt(sg), fmt(v)));
    }
    Ok(out)
}

pub fn render(preset: &str) -> Result<Vec<Panel>> {
    let q = Quantity::DividendNpv;
    let l = Quantity::RuinLaplace;
    let panels = match preset {
        "fig1a" => vec![Panel {
            name: "fig1a".into(),
            csv: curves_csv(q, Axis::Y, 0.0, 10.0, 201, &[("v", fixed(3.0, 5.0, 0.0))])?,
        }],
        "fig1b" => vec![Panel {
            name: "fig1b".into(),
            csv: curves_csv(
                q,
                Axis::A,
                0.05,
                5.0,
                100,
                &[("y8", fixed(3.0, 5.0, 8.0)), ("y2", fixed(3.0, 5.0, 2.0))],
            )?,
        }],
        "fig3" => vec![Panel {
            name: "fig3".into(),
            csv: curves_csv(
                q,
                Axis::B,
                3.0,
                40.0,
                149,
                &[("y5", fixed(3.0, 5.0, 5.0)), ("y2", fixed(3.0, 5.0, 2.0))],
            )?,
        }],
        "fig4" => vec![
            Panel {
                name: "fig4a".into(),
                csv: grid_csv(q, fixed(3.0, 4.0, 5.0), 0.0, 0.3, 13)?,
            },
            Panel {
                name: "fig4b".into(),
                csv: grid_csv(q, fixed(3.0, 24.0, 5.0), 0.0, 0.3, 13)?,
            },
            Panel {
                name: "fig4c".into(),
                csv: grid_csv(q, fixed(3.0, 24.0, 2.0), 0.0, 0.3, 13)?,
            },
        ],
        "fig5" => vec![
            Panel {
                name: "fig5a".into(),
                csv: curves_csv(
                    q,
                    Axis::Sigma,
                    0.1,
                    10.0,
                    100,
                    &[("v", fixed(3.0, 4.0, 8.0))],
                )?,
            },
            Panel {
                name: "fig5b".into(),
                csv: profile_csv(8.0, 3.0, 4.0)?,
            },
            Panel {
                name: "fig5c".into(),
                csv: profile_csv(5.0, 3.0, 24.0)?,
            },
            Panel {
                name: "fig5d".into(),
                csv: profile_csv(2.0, 3.0, 24.0)?,
            },
        ],
        "fig6a" => vec![Panel {
            name: "fig6a".into(),
            csv: curves_csv(
                l,
                Axis::Gamma,
                0.25,
                4.0,
                76,
                &[("v", fixed(3.0, 4.0, 8.0))],
            )?,
        }],
        "fig6b" => vec![Panel {
            name: "fig6b".into(),
            csv: curves_csv(
                l,
                Axis::A,
                0.05,
                5.0,
                100,
                &[("y8", fixed(3.0, 5.0, 8.0)), ("y2", fixed(3.0, 5.0, 2.0))],
            )?,
        }],
        "fig6c" => vec![Panel {
            name: "fig6c".into(),
            csv: curves_csv(l, Axis::B, 3.0, 40.0, 149, &[("v", fixed(3.0, 5.0, 10.0))])?,
        }],
        "fig6d" => vec![Panel {
            name: "fig6d".into(),
            csv: grid_csv(l, fixed(3.0, 4.0, 5.0), 0.0, 0.3, 13)?,
        }],
        other => {
            return Err(anyhow!(
                "unknown preset {other:?}; available: {}",
                PRESET_NAMES.join(", ")
            ))
        }
    };
    Ok(panels)
}
