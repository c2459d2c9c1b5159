//! Nelder–Mead search over `(mu, nu)` for the largest Q-criterion margin.
//!
//! Restarts are independent: each draws its start from its own random stream,
//! so they run in parallel and the result does not depend on scheduling.
//! Even restarts start at scale `init_scale`, odd ones at `10 * init_scale`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::criteria::{q_margin, ParamPair};
use crate::error::{Error, Result};
use crate::linalg::DensityMatrix;
use crate::states::{stream, Seed, StreamRng};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub n: usize,
    pub m: usize,
    pub restarts: usize,
    /// Simplex iterations per restart.
    pub max_iters: usize,
    pub init_scale: f64,
    pub seed: Seed,
    /// Stop once the simplex spans less than `tol` in objective value.
    pub tol: f64,
    /// Replaces the random start of restart 0.
    pub warm_start: Option<ParamPair>,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            n: 2,
            m: 2,
            restarts: 20,
            max_iters: 2000,
            init_scale: 1.0,
            seed: Seed(0),
            tol: 1e-12,
            warm_start: None,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.m == 0 {
            return Err(Error::BadConfig("n and m must be at least 1".into()));
        }
        if self.restarts == 0 || self.max_iters == 0 {
            return Err(Error::BadConfig("restarts and max_iters must be at least 1".into()));
        }
        if !(self.init_scale > 0.0 && self.init_scale.is_finite()) {
            return Err(Error::BadConfig(format!("init_scale {} must be positive", self.init_scale)));
        }
        if !(self.tol > 0.0) {
            return Err(Error::BadConfig(format!("tol {} must be positive", self.tol)));
        }
        if let Some(w) = &self.warm_start {
            if w.mu().len() != self.n || w.nu().len() != self.m {
                return Err(Error::BadConfig(format!(
                    "warm start has lengths {}/{}, expected {}/{}",
                    w.mu().len(),
                    w.nu().len(),
                    self.n,
                    self.m
                )));
            }
        }
        Ok(())
    }
}

/// Best margin seen so far, sampled once per simplex iteration.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub restart: usize,
    pub iteration: usize,
    pub margin: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizationResult {
    pub best: ParamPair,
    pub margin: f64,
    pub evaluations: usize,
    /// Non-decreasing across the whole run, restarts in index order.
    pub trace: Vec<TracePoint>,
    pub best_restart: usize,
    /// Some restart used its whole iteration budget without converging.
    pub exhausted: bool,
}

/// The Q-criterion margin of `rho` at `p`.
pub fn evaluate_objective(rho: &DensityMatrix, p: &ParamPair) -> Result<f64> {
    Ok(q_margin(rho, p)?.margin)
}

struct Restart {
    x: Vec<f64>,
    f: f64,
    evaluations: usize,
    trace: Vec<(usize, f64)>,
    exhausted: bool,
}

fn nelder_mead<F>(f: F, start: Vec<f64>, step: f64, max_iters: usize, tol: f64) -> Result<Restart>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    let dim = start.len();
    let mut evaluations = 0;
    let mut eval = |x: &[f64]| -> Result<f64> {
        evaluations += 1;
        f(x)
    };
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    let f0 = eval(&start)?;
    simplex.push((start.clone(), f0));
    for k in 0..dim {
        let mut x = start.clone();
        x[k] += step;
        let fx = eval(&x)?;
        simplex.push((x, fx));
    }

    let mut trace = Vec::new();
    let mut converged = false;
    for iter in 0..max_iters {
        // minimization of the negated margin
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        trace.push((iter, -simplex[0].1));
        if simplex[dim].1 - simplex[0].1 <= tol {
            converged = true;
            break;
        }
        let mut centroid = vec![0.0; dim];
        for (x, _) in &simplex[..dim] {
            for (c, v) in centroid.iter_mut().zip(x) {
                *c += v / dim as f64;
            }
        }
        let toward = |coef: f64, x: &[f64]| -> Vec<f64> {
            centroid.iter().zip(x).map(|(c, v)| c + coef * (v - c)).collect()
        };
        let worst = simplex[dim].0.clone();
        let reflected = toward(-1.0, &worst);
        let fr = eval(&reflected)?;
        if fr < simplex[0].1 {
            let expanded = toward(-2.0, &worst);
            let fe = eval(&expanded)?;
            simplex[dim] = if fe < fr { (expanded, fe) } else { (reflected, fr) };
            continue;
        }
        if fr < simplex[dim - 1].1 {
            simplex[dim] = (reflected, fr);
            continue;
        }
        let (contracted, fc) = if fr < simplex[dim].1 {
            let x = toward(-0.5, &worst);
            let fx = eval(&x)?;
            (x, fx)
        } else {
            let x = toward(0.5, &worst);
            let fx = eval(&x)?;
            (x, fx)
        };
        if fc < fr.min(simplex[dim].1) {
            simplex[dim] = (contracted, fc);
            continue;
        }
        let best = simplex[0].0.clone();
        for entry in simplex.iter_mut().skip(1) {
            let x: Vec<f64> = best.iter().zip(&entry.0).map(|(b, v)| b + 0.5 * (v - b)).collect();
            let fx = eval(&x)?;
            *entry = (x, fx);
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, f) = simplex.swap_remove(0);
    Ok(Restart { x, f: -f, evaluations, trace, exhausted: !converged })
}

/// Maximizes the Q-criterion margin of a bipartite state over `(mu, nu)`.
pub fn optimize_params(rho: &DensityMatrix, cfg: &OptimizerConfig) -> Result<OptimizationResult> {
    cfg.validate()?;
    rho.bipartite_dims()?;
    let n = cfg.n;
    let objective = |x: &[f64]| -> Result<f64> {
        let p = ParamPair::from_flat(x, n)?;
        Ok(-evaluate_objective(rho, &p)?)
    };
    let runs = (0..cfg.restarts)
        .into_par_iter()
        .map(|r| {
            let scale = if r % 2 == 0 { cfg.init_scale } else { 10.0 * cfg.init_scale };
            let start = match (&cfg.warm_start, r) {
                (Some(w), 0) => w.to_flat(),
                _ => {
                    let mut rng = StreamRng::new(cfg.seed, stream::OPTIMIZER + r as u64);
                    (0..n + cfg.m).map(|_| scale * rng.gaussian()).collect()
                }
            };
            nelder_mead(objective, start, scale, cfg.max_iters, cfg.tol)
        })
        .collect::<Result<Vec<Restart>>>()?;

    let mut best_restart = 0;
    let mut running = f64::NEG_INFINITY;
    let mut trace = Vec::new();
    for (r, run) in runs.iter().enumerate() {
        if run.f > runs[best_restart].f {
            best_restart = r;
        }
        for &(iteration, m) in &run.trace {
            running = running.max(m);
            trace.push(TracePoint { restart: r, iteration, margin: running });
        }
    }
    let win = &runs[best_restart];
    Ok(OptimizationResult {
        best: ParamPair::from_flat(&win.x, n)?,
        margin: win.f,
        evaluations: runs.iter().map(|r| r.evaluations).sum(),
        trace,
        best_restart,
        exhausted: runs.iter().any(|r| r.exhausted),
    })
}
