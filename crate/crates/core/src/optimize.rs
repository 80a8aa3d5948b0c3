//! Bounded Nelder-Mead with seeded random restarts, and its use to recover
//! optimal measurement settings for K4.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::cell::Cell;
use std::f64::consts::PI;

use crate::channel::{ChannelKind, MemoryChannel};
use crate::error::{Error, Result};
use crate::lgi::{AngleSet, LgiConfig, PreparedLgi};
use crate::measurement::BsmType;
use crate::parallel::{self, Execution};

pub const REFLECTION: f64 = 1.0;
pub const EXPANSION: f64 = 2.0;
pub const CONTRACTION: f64 = 0.5;
pub const SHRINK: f64 = 0.5;
pub const MAX_EVALUATIONS: usize = 5000;
/// Initial simplex edge as a fraction of each bound's width.
const INITIAL_STEP: f64 = 0.1;

/// A bounded maximization problem.
pub struct OptProblem<F> {
    objective: F,
    bounds: Vec<(f64, f64)>,
    seed: u64,
    restarts: usize,
}

impl<F> OptProblem<F>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    pub fn new(objective: F, bounds: Vec<(f64, f64)>, seed: u64, restarts: usize) -> Result<Self> {
        if bounds.is_empty() {
            return Err(Error::InvalidProblem("no parameters".into()));
        }
        if let Some((lo, hi)) = bounds
            .iter()
            .find(|(lo, hi)| !(lo.is_finite() && hi.is_finite() && lo < hi))
        {
            return Err(Error::InvalidProblem(format!("bad bound [{lo}, {hi}]")));
        }
        if restarts == 0 {
            return Err(Error::InvalidProblem("restarts must be >= 1".into()));
        }
        Ok(Self {
            objective,
            bounds,
            seed,
            restarts,
        })
    }

    pub fn dim(&self) -> usize {
        self.bounds.len()
    }

    pub fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }

    fn clamp(&self, x: &mut [f64]) {
        for (v, &(lo, hi)) in x.iter_mut().zip(&self.bounds) {
            *v = v.clamp(lo, hi);
        }
    }

    /// Uniform random starting points, drawn up front so results do not
    /// depend on how restarts are scheduled.
    pub fn starts(&self) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        (0..self.restarts)
            .map(|_| {
                self.bounds
                    .iter()
                    .map(|&(lo, hi)| rng.random_range(lo..=hi))
                    .collect()
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OptResult {
    pub best_params: Vec<f64>,
    pub best_value: f64,
    pub evaluations: usize,
    pub restart_index: usize,
    /// Best value after each iteration of the winning restart.
    #[serde(skip)]
    pub history: Vec<f64>,
}

struct Vertex {
    x: Vec<f64>,
    cost: f64,
}

/// Maximizes the objective from `start` by simplex descent on its negation.
pub fn nelder_mead<F>(problem: &OptProblem<F>, start: &[f64], tol: f64) -> Result<OptResult>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let n = problem.dim();
    if start.len() != n {
        return Err(Error::DimensionMismatch {
            left: n,
            right: start.len(),
        });
    }
    if start
        .iter()
        .zip(problem.bounds())
        .any(|(v, &(lo, hi))| !(lo..=hi).contains(v))
    {
        return Err(Error::InvalidProblem("start point outside bounds".into()));
    }

    let evaluations = Cell::new(0usize);
    let eval = |x: &[f64]| -> Result<f64> {
        evaluations.set(evaluations.get() + 1);
        let v = (problem.objective)(x);
        if v.is_finite() {
            Ok(-v)
        } else {
            Err(Error::NonFiniteObjective(evaluations.get()))
        }
    };

    let mut simplex = Vec::with_capacity(n + 1);
    simplex.push(Vertex {
        x: start.to_vec(),
        cost: eval(start)?,
    });
    for i in 0..n {
        let (lo, hi) = problem.bounds[i];
        let step = INITIAL_STEP * (hi - lo);
        let mut x = start.to_vec();
        x[i] = if x[i] + step <= hi {
            x[i] + step
        } else {
            x[i] - step
        };
        let cost = eval(&x)?;
        simplex.push(Vertex { x, cost });
    }

    let mut history = Vec::new();
    loop {
        simplex.sort_by(|a, b| a.cost.total_cmp(&b.cost));
        history.push(-simplex[0].cost);
        let spread = simplex[n].cost - simplex[0].cost;
        if spread < tol || evaluations.get() >= MAX_EVALUATIONS {
            break;
        }

        let mut centroid = vec![0.0; n];
        for v in &simplex[..n] {
            for (c, xi) in centroid.iter_mut().zip(&v.x) {
                *c += xi / n as f64;
            }
        }
        let along = |from: &[f64], to: &[f64], t: f64| -> Vec<f64> {
            let mut x: Vec<f64> = from.iter().zip(to).map(|(a, b)| a + t * (b - a)).collect();
            problem.clamp(&mut x);
            x
        };

        let worst = &simplex[n];
        let reflected = along(&centroid, &worst.x, -REFLECTION);
        let fr = eval(&reflected)?;

        if fr < simplex[0].cost {
            let expanded = along(&centroid, &reflected, EXPANSION);
            let fe = eval(&expanded)?;
            simplex[n] = if fe < fr {
                Vertex {
                    x: expanded,
                    cost: fe,
                }
            } else {
                Vertex {
                    x: reflected,
                    cost: fr,
                }
            };
            continue;
        }
        if fr < simplex[n - 1].cost {
            simplex[n] = Vertex {
                x: reflected,
                cost: fr,
            };
            continue;
        }

        let (contracted, fc, accept) = if fr < simplex[n].cost {
            let x = along(&centroid, &reflected, CONTRACTION);
            let f = eval(&x)?;
            (x, f, f <= fr)
        } else {
            let x = along(&centroid, &simplex[n].x, CONTRACTION);
            let f = eval(&x)?;
            (x, f, f < simplex[n].cost)
        };
        if accept {
            simplex[n] = Vertex {
                x: contracted,
                cost: fc,
            };
            continue;
        }

        let best = simplex[0].x.clone();
        for v in simplex.iter_mut().skip(1) {
            v.x = along(&best, &v.x, SHRINK);
            v.cost = eval(&v.x)?;
        }
    }

    let best = &simplex[0];
    Ok(OptResult {
        best_params: best.x.clone(),
        best_value: -best.cost,
        evaluations: evaluations.get(),
        restart_index: 0,
        history,
    })
}

/// Runs every restart and keeps the best; ties go to the lowest restart index.
pub fn maximize<F>(problem: &OptProblem<F>, tol: f64) -> Result<OptResult>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    maximize_with(Execution::default(), problem, tol)
}

pub fn maximize_with<F>(exec: Execution, problem: &OptProblem<F>, tol: f64) -> Result<OptResult>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let starts: Vec<(usize, Vec<f64>)> = problem.starts().into_iter().enumerate().collect();
    let runs = parallel::map(exec, &starts, |(i, x0)| {
        nelder_mead(problem, x0, tol).map(|mut r| {
            r.restart_index = *i;
            r
        })
    });
    let total_evals: usize = runs.iter().flatten().map(|r| r.evaluations).sum();
    let mut first_err = None;
    let mut best: Option<OptResult> = None;
    for run in runs {
        match run {
            Ok(r) => {
                if best.as_ref().is_none_or(|b| r.best_value > b.best_value) {
                    best = Some(r);
                }
            }
            Err(e) => {
                first_err.get_or_insert(e);
            }
        }
    }
    match best {
        Some(mut b) => {
            b.evaluations = total_evals;
            Ok(b)
        }
        None => Err(first_err.expect("at least one restart ran")),
    }
}

/// Parameter layout `[theta1..4, phi1..4]` plus `k1` unless it is frozen.
pub fn k4_bounds(freeze_k1: bool) -> Vec<(f64, f64)> {
    let mut b = vec![(0.0, PI); 4];
    b.extend([(0.0, 2.0 * PI); 4]);
    if !freeze_k1 {
        b.push((0.0, 1.0));
    }
    b
}

#[derive(Clone, Debug)]
pub struct K4Search {
    pub kind: ChannelKind,
    pub p: f64,
    pub mu: f64,
    pub bsm_type: BsmType,
    pub restarts: usize,
    pub seed: u64,
    /// Optimize with `k1` held at this value.
    pub frozen_k1: Option<f64>,
    pub tol: f64,
}

impl K4Search {
    pub fn new(
        kind: ChannelKind,
        p: f64,
        mu: f64,
        bsm_type: BsmType,
        restarts: usize,
        seed: u64,
    ) -> Self {
        Self {
            kind,
            p,
            mu,
            bsm_type,
            restarts,
            seed,
            frozen_k1: None,
            tol: 1e-10,
        }
    }

    pub fn run(&self) -> Result<K4Optimum> {
        self.run_with(Execution::default())
    }

    pub fn run_with(&self, exec: Execution) -> Result<K4Optimum> {
        let channel = MemoryChannel::new(self.kind, self.p, self.mu)?;
        if let Some(k1) = self.frozen_k1 {
            crate::error::check_range("k1", k1, 0.0, 1.0)?;
        }
        let frozen = self.frozen_k1;
        let bsm_type = self.bsm_type;
        let objective = move |x: &[f64]| -> f64 {
            let k1 = frozen.unwrap_or_else(|| x[8]);
            AngleSet::from_flat(&x[..8])
                .and_then(|a| LgiConfig::new(k1, &a, bsm_type, channel.clone()))
                .and_then(|cfg| PreparedLgi::new(&cfg))
                .map(|prepared| prepared.k4())
                .unwrap_or(f64::NAN)
        };
        let problem = OptProblem::new(
            objective,
            k4_bounds(frozen.is_some()),
            self.seed,
            self.restarts,
        )?;
        let result = maximize_with(exec, &problem, self.tol)?;
        let angles = AngleSet::from_flat(&result.best_params[..8])?;
        let k1 = frozen.unwrap_or_else(|| result.best_params[8]);
        Ok(K4Optimum { angles, k1, result })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct K4Optimum {
    pub angles: AngleSet,
    pub k1: f64,
    pub result: OptResult,
}

/// Best K4 over `restarts` seeded starts, with `k1` free.
pub fn maximize_k4(
    kind: ChannelKind,
    p: f64,
    mu: f64,
    bsm_type: BsmType,
    restarts: usize,
    seed: u64,
) -> Result<OptResult> {
    K4Search::new(kind, p, mu, bsm_type, restarts, seed)
        .run()
        .map(|o| o.result)
}
