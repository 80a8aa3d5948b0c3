//! One line per acceptance criterion. Tolerances and runtime budgets are
//! pinned here rather than read from the library.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use tempcorr::reference::regression_report;
use tempcorr::sweep::linear_grid;
use tempcorr::verify::{
    channel_properties, identity_maxima, k4_regression, measurement_properties, memory_protection,
    optimizer_recovery, s4_exactness, tsi_invariances, CheckOutcome, VerifyOptions,
};

const MAXIMUM_TOL: f64 = 0.01;
const K4_CURVE_TOL: f64 = 0.1;
const FLAT_TOL: f64 = 1e-6;
const S4_CURVE_TOL: f64 = 1e-9;
const S4_ORIGIN_TOL: f64 = 1e-12;
const OPTIMIZER_SLACK: f64 = 0.02;
const RESTARTS: usize = 64;
const CHANNEL_SAMPLES: usize = 100;
const EXACT_TOL: f64 = 1e-12;
const PSD_FLOOR: f64 = -1e-10;
const INVARIANCE_TOL: f64 = 1e-9;

struct Criterion {
    number: u8,
    title: &'static str,
    budget: Option<Duration>,
    run: fn(&VerifyOptions) -> Vec<CheckOutcome>,
}

fn opts() -> VerifyOptions {
    VerifyOptions {
        p_grid: linear_grid(0.0, 1.0, 11).unwrap(),
        mu_list: vec![0.0, 0.5, 1.0],
        seed: 2024,
        restarts: RESTARTS,
        channel_samples: CHANNEL_SAMPLES,
        ..VerifyOptions::default()
    }
}

/// Re-derives pass/fail from the measured value against the pinned bound,
/// so a change in the library's own thresholds cannot loosen a criterion.
fn pinned(mut c: CheckOutcome, bound: f64, at_least: bool) -> CheckOutcome {
    c.passed = if at_least {
        c.measured >= bound
    } else {
        c.measured <= bound
    };
    c.threshold = bound;
    c
}

fn c1(_: &VerifyOptions) -> Vec<CheckOutcome> {
    identity_maxima()
        .unwrap()
        .into_iter()
        .map(|c| pinned(c, MAXIMUM_TOL, false))
        .collect()
}

fn c2(o: &VerifyOptions) -> Vec<CheckOutcome> {
    let rows = regression_report(&o.p_grid, &o.mu_list).unwrap();
    k4_regression(&rows, o)
        .unwrap()
        .into_iter()
        .map(|c| {
            let tol = if c.name.starts_with("curve") {
                K4_CURVE_TOL
            } else {
                FLAT_TOL
            };
            pinned(c, tol, false)
        })
        .collect()
}

fn c3(o: &VerifyOptions) -> Vec<CheckOutcome> {
    let rows = regression_report(&o.p_grid, &o.mu_list).unwrap();
    s4_exactness(&rows)
        .unwrap()
        .into_iter()
        .map(|c| {
            let tol = if c.name.starts_with("curve") {
                S4_CURVE_TOL
            } else {
                S4_ORIGIN_TOL
            };
            pinned(c, tol, false)
        })
        .collect()
}

fn c4(o: &VerifyOptions) -> Vec<CheckOutcome> {
    memory_protection(o).unwrap()
}

fn c5(o: &VerifyOptions) -> Vec<CheckOutcome> {
    let printed = [3.18, SQRT8, SQRT8, 3.0, SQRT8, SQRT8, 3.18, SQRT8, SQRT8];
    optimizer_recovery(o)
        .unwrap()
        .into_iter()
        .zip(printed)
        .map(|(c, m)| pinned(c, m - OPTIMIZER_SLACK, true))
        .collect()
}

const SQRT8: f64 = 2.0 * std::f64::consts::SQRT_2;

fn c6(o: &VerifyOptions) -> Vec<CheckOutcome> {
    channel_properties(o.seed, o.channel_samples)
        .unwrap()
        .into_iter()
        .map(|c| {
            if c.name == "channel positivity" {
                pinned(c, PSD_FLOOR, true)
            } else {
                pinned(c, EXACT_TOL, false)
            }
        })
        .collect()
}

fn c7(_: &VerifyOptions) -> Vec<CheckOutcome> {
    assert_eq!(tempcorr::verify::direction_grid().len(), 25);
    measurement_properties()
        .unwrap()
        .into_iter()
        .map(|c| pinned(c, EXACT_TOL, false))
        .collect()
}

fn c8(o: &VerifyOptions) -> Vec<CheckOutcome> {
    tsi_invariances(o)
        .unwrap()
        .into_iter()
        .map(|c| pinned(c, INVARIANCE_TOL, false))
        .collect()
}

fn main() -> ExitCode {
    let criteria = [
        Criterion {
            number: 1,
            title: "identity-channel maxima",
            budget: Some(Duration::from_secs(1)),
            run: c1,
        },
        Criterion {
            number: 2,
            title: "K4 regression",
            budget: Some(Duration::from_secs(10)),
            run: c2,
        },
        Criterion {
            number: 3,
            title: "S4 exactness",
            budget: Some(Duration::from_secs(5)),
            run: c3,
        },
        Criterion {
            number: 4,
            title: "memory-protection ordering",
            budget: None,
            run: c4,
        },
        Criterion {
            number: 5,
            title: "optimizer recovery",
            budget: Some(Duration::from_secs(120)),
            run: c5,
        },
        Criterion {
            number: 6,
            title: "channel property suite",
            budget: None,
            run: c6,
        },
        Criterion {
            number: 7,
            title: "measurement suite",
            budget: None,
            run: c7,
        },
        Criterion {
            number: 8,
            title: "TSI invariances",
            budget: None,
            run: c8,
        },
    ];
    let o = opts();
    let mut all_ok = true;
    for c in criteria {
        let start = Instant::now();
        let checks = (c.run)(&o);
        let elapsed = start.elapsed();
        let in_budget = c.budget.is_none_or(|b| elapsed <= b);
        let failed: Vec<&CheckOutcome> = checks.iter().filter(|x| !x.passed).collect();
        let ok = failed.is_empty() && in_budget && !checks.is_empty();
        all_ok &= ok;
        let budget = c
            .budget
            .map(|b| format!(" (budget {}s)", b.as_secs()))
            .unwrap_or_default();
        let mut line = format!(
            "criterion {}: {} {} [{} checks, {:.2}s{}]",
            c.number,
            if ok { "PASS" } else { "FAIL" },
            c.title,
            checks.len(),
            elapsed.as_secs_f64(),
            budget
        );
        if !in_budget {
            line.push_str(" over runtime budget");
        }
        for f in failed {
            line.push_str(&format!("\n    {f}"));
        }
        println!("{line}");
    }
    if all_ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
