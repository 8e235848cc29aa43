//! Seeded, parallel Monte Carlo estimators.
//!
//! Trial `i` draws everything from its own generator seeded with
//! [`trial_seed`]`(base_seed, i)`. Trials run on a dedicated rayon pool and
//! write into a slot indexed by trial number; aggregation is a sequential
//! pass over those slots, so a report depends only on its configuration and
//! never on the thread count.

use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::brd::{basins_with, brd_run_with};
use crate::error::{Error, Result};
use crate::game::{equilibria_from_replies, sample_uniform_potential_with, ActionProfile, BestReplies, Potential};
use crate::incremental::{
    construct_with, epsilon_stopped_construct, simulate_aux_processes, stopping_target, Completion,
};
use crate::oracle::unrank_permutation;
use crate::rng::{rng_from_seed, trial_seed, GameRng, TRIAL_SEED_RULE};
use crate::theory::{basin_limit, ode_solution, rank_cdf_limit, rank_cdf_limit_total, rc_limit, tau_limit};
use crate::util::{ecdf_sorted, fmt_real, kolmogorov_distance, mean_and_se, quantile_sorted, ratio_string};

/// Environment variable holding the default worker count.
pub const THREADS_ENV: &str = "SOP_BASINS_THREADS";

/// Worker count from [`THREADS_ENV`], else the machine's parallelism.
pub fn default_threads() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorKind {
    /// Uniform shuffle of 1..=K².
    Uniform,
    /// Incremental construction run to completion.
    Incremental,
    /// Every one of the (K²)! potentials once, for K ≤ 3; `trials` is ignored.
    Exhaustive,
}

impl FromStr for GeneratorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(GeneratorKind::Uniform),
            "incremental" => Ok(GeneratorKind::Incremental),
            "exhaustive" => Ok(GeneratorKind::Exhaustive),
            other => Err(Error::arg(format!("unknown generator '{other}' (uniform|incremental|exhaustive)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Target {
    Basins,
    Ranks,
    WorstEq,
    Incremental,
}

impl FromStr for Target {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "basins" => Ok(Target::Basins),
            "ranks" => Ok(Target::Ranks),
            "worst-eq" => Ok(Target::WorstEq),
            "incremental" => Ok(Target::Incremental),
            other => Err(Error::arg(format!("unknown target '{other}' (basins|ranks|worst-eq|incremental)"))),
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Target::Basins => "basins",
            Target::Ranks => "ranks",
            Target::WorstEq => "worst-eq",
            Target::Incremental => "incremental",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub k: usize,
    pub trials: u64,
    /// Strictly increasing, in [0, 1/2). ε = 0 stands for rank 1.
    pub epsilons: Vec<f64>,
    pub base_seed: u64,
    pub generator: GeneratorKind,
    /// Not echoed in reports: results never depend on it.
    #[serde(skip)]
    pub threads: usize,
    /// Tolerances δ for the worst-equilibrium frequency Ψ(η_W)/(K log K) < 1 + δ.
    pub deltas: Vec<f64>,
    /// Fluid-limit horizon T: the sup error runs over t ≤ T·K.
    pub horizon: f64,
    /// Rank experiments: draw the start row uniformly too instead of fixing it to 1.
    pub full_profile_starts: bool,
}

impl ExperimentConfig {
    pub fn new(k: usize, trials: u64, base_seed: u64) -> Self {
        ExperimentConfig {
            k,
            trials,
            epsilons: Vec::new(),
            base_seed,
            generator: GeneratorKind::Uniform,
            threads: 1,
            deltas: vec![0.1, 0.2],
            horizon: 1.0,
            full_profile_starts: false,
        }
    }

    pub fn with_epsilons(mut self, epsilons: &[f64]) -> Self {
        self.epsilons = epsilons.to_vec();
        self
    }

    pub fn with_generator(mut self, generator: GeneratorKind) -> Self {
        self.generator = generator;
        self
    }

    pub fn with_threads(mut self, threads: usize) -> Self {
        self.threads = threads;
        self
    }

    /// Number of trials actually run.
    pub fn effective_trials(&self) -> u64 {
        match self.generator {
            GeneratorKind::Exhaustive => (1..=(self.k * self.k) as u64).product(),
            _ => self.trials,
        }
    }

    pub fn validate(&self, target: Target) -> Result<()> {
        if self.k == 0 {
            return Err(Error::arg("k must be at least 1"));
        }
        if self.trials == 0 && self.generator != GeneratorKind::Exhaustive {
            return Err(Error::arg("trials must be at least 1"));
        }
        if self.threads == 0 {
            return Err(Error::arg("threads must be at least 1"));
        }
        if self.generator == GeneratorKind::Exhaustive && self.k > 3 {
            return Err(Error::arg("the exhaustive generator needs k <= 3"));
        }
        if let Some(bad) = self.epsilons.iter().find(|e| !(**e >= 0.0 && **e < 0.5)) {
            return Err(Error::arg(format!("epsilon {bad} outside [0, 1/2)")));
        }
        if self.epsilons.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::arg("epsilons must be strictly increasing"));
        }
        let smallest_positive = self.epsilons.iter().copied().find(|&e| e > 0.0);
        match target {
            Target::Basins | Target::Incremental => {
                if self.epsilons.is_empty() {
                    return Err(Error::arg(format!("target {target} needs at least one epsilon")));
                }
                if let Some(e) = smallest_positive {
                    if stopping_target(self.k, e) == 0 {
                        return Err(Error::arg(format!("floor(epsilon * k) = 0 for epsilon = {e}, k = {}", self.k)));
                    }
                }
                if target == Target::Incremental {
                    if self.epsilons[0] == 0.0 {
                        return Err(Error::arg("incremental limits need epsilon > 0"));
                    }
                    if self.horizon.is_nan()
                        || self.horizon <= 0.0
                        || self.horizon * self.k as f64 > (self.k * self.k) as f64
                    {
                        return Err(Error::arg("horizon must lie in (0, k]"));
                    }
                    if self.generator != GeneratorKind::Uniform {
                        return Err(Error::arg("incremental limits always use the incremental construction"));
                    }
                }
            }
            Target::WorstEq => {
                if self.k < 2 {
                    return Err(Error::arg("worst-eq needs k >= 2 (K log K vanishes at k = 1)"));
                }
                if self.deltas.iter().any(|d| d.is_nan() || *d <= 0.0) {
                    return Err(Error::arg("deltas must be positive"));
                }
            }
            Target::Ranks => {}
        }
        Ok(())
    }

    /// Equilibrium rank ⌊εK⌋ addressed by ε; ε = 0 maps to rank 1.
    pub fn rank_for(&self, epsilon: f64) -> u32 {
        if epsilon == 0.0 {
            1
        } else {
            stopping_target(self.k, epsilon) as u32
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasinRecord {
    pub epsilon: f64,
    pub rank: u32,
    pub mean_basin_over_k: f64,
    pub std_err: f64,
    /// Trials with fewer than `rank` equilibria.
    pub excluded: u64,
    pub phi_theory: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WStats {
    pub mean: f64,
    pub variance: f64,
    pub mean_over_k: f64,
    pub std_err_over_k: f64,
    /// Exact sample mean as "num/den".
    pub mean_exact: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CdfPoint {
    pub epsilon: f64,
    pub empirical: f64,
    pub theory: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankStats {
    /// Sorted Λ/K values, one per trial.
    pub sample: Vec<f64>,
    pub mean_over_k: f64,
    pub std_err: f64,
    pub mean_theory: f64,
    pub kolmogorov_distance: f64,
    pub cdf: Vec<CdfPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaFrequency {
    pub delta: f64,
    pub frequency_below: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorstStats {
    /// Sorted Ψ(η_W)/(K log K) values.
    pub ratios: Vec<f64>,
    pub q10: f64,
    pub median: f64,
    pub q90: f64,
    pub below: Vec<DeltaFrequency>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StoppedRecord {
    pub epsilon: f64,
    pub target_greens: u64,
    pub tau_over_k: f64,
    pub tau_std_err: f64,
    pub tau_limit: f64,
    pub r_over_k: f64,
    pub r_std_err: f64,
    pub c_over_k: f64,
    pub c_std_err: f64,
    pub rc_limit: f64,
    /// Runs whose construction never reached the target number of greens.
    pub missing: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FluidStats {
    pub horizon: f64,
    /// Per trial: sup_{t ≤ TK} |R_t/K − r| + |C̃_t/K − c| + |G̃_t/K − g|.
    pub sup_errors: Vec<f64>,
    pub mean_sup_error: f64,
    /// Per trial: D at t = ⌊TK⌋.
    pub resamples: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IncrementalStats {
    pub stopped: Vec<StoppedRecord>,
    pub fluid: FluidStats,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub target: Target,
    pub config: ExperimentConfig,
    pub trials_run: u64,
    pub seed_rule: String,
    /// Present when ε = 0 was requested.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon_zero: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub basins: Option<Vec<BasinRecord>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w: Option<WStats>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ranks: Option<RankStats>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub worst: Option<WorstStats>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub incremental: Option<IncrementalStats>,
}

impl ExperimentReport {
    fn empty(target: Target, cfg: &ExperimentConfig) -> Self {
        ExperimentReport {
            target,
            config: cfg.clone(),
            trials_run: cfg.effective_trials(),
            seed_rule: TRIAL_SEED_RULE.to_string(),
            epsilon_zero: cfg.epsilons.contains(&0.0).then(|| "epsilon=0 -> rank 1".to_string()),
            basins: None,
            w: None,
            ranks: None,
            worst: None,
            incremental: None,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Per-target table; for `basins` the header is
    /// `epsilon,mean_basin_over_k,std_err,excluded,phi_theory`.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let f = fmt_real;
        if let Some(rows) = &self.basins {
            out.push_str("epsilon,mean_basin_over_k,std_err,excluded,phi_theory\n");
            for r in rows {
                out.push_str(&format!(
                    "{},{},{},{},{}\n",
                    f(r.epsilon),
                    f(r.mean_basin_over_k),
                    f(r.std_err),
                    r.excluded,
                    f(r.phi_theory)
                ));
            }
        } else if let Some(ranks) = &self.ranks {
            out.push_str("epsilon,empirical_cdf,Phi\n");
            for p in &ranks.cdf {
                out.push_str(&format!("{},{},{}\n", f(p.epsilon), f(p.empirical), f(p.theory)));
            }
        } else if let Some(worst) = &self.worst {
            out.push_str("delta,frequency_below\n");
            for d in &worst.below {
                out.push_str(&format!("{},{}\n", f(d.delta), f(d.frequency_below)));
            }
        } else if let Some(inc) = &self.incremental {
            out.push_str("epsilon,tau_over_k,tau_limit,r_over_k,c_over_k,rc_limit,missing\n");
            for s in &inc.stopped {
                out.push_str(&format!(
                    "{},{},{},{},{},{},{}\n",
                    f(s.epsilon),
                    f(s.tau_over_k),
                    f(s.tau_limit),
                    f(s.r_over_k),
                    f(s.c_over_k),
                    f(s.rc_limit),
                    s.missing
                ));
            }
        }
        out
    }
}

fn run_trials<T, F>(cfg: &ExperimentConfig, trial: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync + Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| Error::internal(format!("cannot build thread pool: {e}")))?;
    let n = cfg.effective_trials();
    pool.install(|| (0..n).into_par_iter().map(&trial).collect())
}

/// The game of trial `i`, and the generator to keep drawing from.
fn trial_game(cfg: &ExperimentConfig, i: u64) -> Result<(Potential, GameRng)> {
    let mut rng = rng_from_seed(trial_seed(cfg.base_seed, i));
    let p = match cfg.generator {
        GeneratorKind::Uniform => sample_uniform_potential_with(cfg.k, &mut rng)?,
        GeneratorKind::Incremental => construct_with(cfg.k, &mut rng, false)?
            .potential
            .ok_or_else(|| Error::internal("completed construction has no potential"))?,
        GeneratorKind::Exhaustive => Potential::new(cfg.k, unrank_permutation(cfg.k * cfg.k, i))?,
    };
    Ok((p, rng))
}

/// E|BoA(η_⌊εK⌋)|/K for each ε, plus the law of W.
pub fn estimate_basin_profile(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate(Target::Basins)?;
    let k = cfg.k;
    let ranks: Vec<u32> = cfg.epsilons.iter().map(|&e| cfg.rank_for(e)).collect();
    let trials = run_trials(cfg, |i| {
        let (p, _) = trial_game(cfg, i)?;
        let replies = BestReplies::new(&p);
        let eqs = equilibria_from_replies(&p, &replies);
        let basins = basins_with(&replies, &eqs)?;
        if basins.total() != (k * k) as u64 {
            return Err(Error::internal(format!("basin sizes sum to {} in trial {i}", basins.total())));
        }
        let per_eps: Vec<Option<f64>> =
            ranks.iter().map(|&r| basins.size_of_rank(r).map(|s| s as f64 / k as f64)).collect();
        Ok((eqs.count() as u64, per_eps))
    })?;

    let mut report = ExperimentReport::empty(Target::Basins, cfg);
    let records = cfg
        .epsilons
        .iter()
        .zip(&ranks)
        .enumerate()
        .map(|(j, (&epsilon, &rank))| {
            let xs: Vec<f64> = trials.iter().filter_map(|(_, v)| v[j]).collect();
            let (mean, se) = mean_and_se(&xs);
            Ok(BasinRecord {
                epsilon,
                rank,
                mean_basin_over_k: mean,
                std_err: se,
                excluded: trials.len() as u64 - xs.len() as u64,
                phi_theory: basin_limit(epsilon)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    report.basins = Some(records);

    let ws: Vec<f64> = trials.iter().map(|(w, _)| *w as f64).collect();
    let (mean, se) = mean_and_se(&ws);
    let variance = if ws.len() > 1 { se * se * ws.len() as f64 } else { 0.0 };
    let w_sum: u64 = trials.iter().map(|(w, _)| w).sum();
    report.w = Some(WStats {
        mean,
        variance,
        mean_over_k: mean / k as f64,
        std_err_over_k: se / k as f64,
        mean_exact: ratio_string(&BigRational::new(w_sum.into(), (trials.len() as u64).into())),
    });
    Ok(report)
}

/// Law of Λ/K for the equilibrium reached from a uniform start.
pub fn estimate_rank_distribution(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate(Target::Ranks)?;
    let k = cfg.k;
    let mut sample = run_trials(cfg, |i| {
        let (p, mut rng) = trial_game(cfg, i)?;
        let col = rng.gen_range(1..=k as u32);
        let row = if cfg.full_profile_starts { rng.gen_range(1..=k as u32) } else { 1 };
        let replies = BestReplies::new(&p);
        let eqs = equilibria_from_replies(&p, &replies);
        let trace = brd_run_with(&replies, &eqs, ActionProfile::new(row, col))?;
        Ok(trace.absorbed_rank as f64 / k as f64)
    })?;
    sample.sort_by(f64::total_cmp);
    let (mean, se) = mean_and_se(&sample);
    let cdf = cfg
        .epsilons
        .iter()
        .map(|&e| Ok(CdfPoint { epsilon: e, empirical: ecdf_sorted(&sample, e), theory: rank_cdf_limit(e)? }))
        .collect::<Result<Vec<_>>>()?;
    let mut report = ExperimentReport::empty(Target::Ranks, cfg);
    report.ranks = Some(RankStats {
        kolmogorov_distance: kolmogorov_distance(&sample, rank_cdf_limit_total),
        mean_over_k: mean,
        std_err: se,
        mean_theory: crate::theory::mean_rank_limit(),
        cdf,
        sample,
    });
    Ok(report)
}

/// Law of Ψ(η_W)/(K log K), the potential of the worst equilibrium.
pub fn estimate_worst_equilibrium(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate(Target::WorstEq)?;
    let scale = cfg.k as f64 * (cfg.k as f64).ln();
    let mut ratios = run_trials(cfg, |i| {
        let (p, _) = trial_game(cfg, i)?;
        let eqs = equilibria_from_replies(&p, &BestReplies::new(&p));
        Ok(eqs.worst().potential_value as f64 / scale)
    })?;
    ratios.sort_by(f64::total_cmp);
    let n = ratios.len() as f64;
    let below = cfg
        .deltas
        .iter()
        .map(|&delta| DeltaFrequency {
            delta,
            frequency_below: ratios.partition_point(|&x| x < 1.0 + delta) as f64 / n,
        })
        .collect();
    let mut report = ExperimentReport::empty(Target::WorstEq, cfg);
    report.worst = Some(WorstStats {
        q10: quantile_sorted(&ratios, 0.1),
        median: quantile_sorted(&ratios, 0.5),
        q90: quantile_sorted(&ratios, 0.9),
        below,
        ratios,
    });
    Ok(report)
}

/// τ/K, R_τ/K and C_τ/K of ε-stopped constructions, and the sup distance of
/// (R, C̃, G̃)/K to the fluid limit over t ≤ T·K.
///
/// Each trial runs one realization: the stopped runs for every ε and the
/// auxiliary-process run share the trial seed, so they follow the same path.
pub fn estimate_incremental_limits(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate(Target::Incremental)?;
    let k = cfg.k;
    let kf = k as f64;
    let t_max = (cfg.horizon * kf).floor() as u64;
    let trials = run_trials(cfg, |i| {
        let seed = trial_seed(cfg.base_seed, i);
        let stopped = cfg
            .epsilons
            .iter()
            .map(|&e| {
                let tr = epsilon_stopped_construct(k, e, seed, Completion::Skip, false)?;
                Ok(tr.tau.map(|tau| (tau as f64 / kf, tr.last.r as f64 / kf, tr.last.c as f64 / kf)))
            })
            .collect::<Result<Vec<_>>>()?;
        let aux = simulate_aux_processes(k, seed, t_max)?;
        let mut sup = 0.0f64;
        for s in &aux.snapshots {
            let ode = ode_solution(s.t as f64 / kf)?;
            let err = (s.r as f64 / kf - ode.r).abs()
                + (s.c_tilde as f64 / kf - ode.c).abs()
                + (s.g_tilde as f64 / kf - ode.g).abs();
            sup = sup.max(err);
        }
        Ok((stopped, sup, aux.last.d))
    })?;

    let stopped = cfg
        .epsilons
        .iter()
        .enumerate()
        .map(|(j, &epsilon)| {
            let hits: Vec<(f64, f64, f64)> = trials.iter().filter_map(|(s, _, _)| s[j]).collect();
            let col = |f: fn(&(f64, f64, f64)) -> f64| mean_and_se(&hits.iter().map(f).collect::<Vec<_>>());
            let (tau, tau_se) = col(|h| h.0);
            let (r, r_se) = col(|h| h.1);
            let (c, c_se) = col(|h| h.2);
            Ok(StoppedRecord {
                epsilon,
                target_greens: stopping_target(k, epsilon),
                tau_over_k: tau,
                tau_std_err: tau_se,
                tau_limit: tau_limit(epsilon)?,
                r_over_k: r,
                r_std_err: r_se,
                c_over_k: c,
                c_std_err: c_se,
                rc_limit: rc_limit(epsilon)?,
                missing: (trials.len() - hits.len()) as u64,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let sup_errors: Vec<f64> = trials.iter().map(|t| t.1).collect();
    let mut report = ExperimentReport::empty(Target::Incremental, cfg);
    report.incremental = Some(IncrementalStats {
        stopped,
        fluid: FluidStats {
            horizon: cfg.horizon,
            mean_sup_error: mean_and_se(&sup_errors).0,
            sup_errors,
            resamples: trials.iter().map(|t| t.2).collect(),
        },
    });
    Ok(report)
}

pub fn run_experiment(target: Target, cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    match target {
        Target::Basins => estimate_basin_profile(cfg),
        Target::Ranks => estimate_rank_distribution(cfg),
        Target::WorstEq => estimate_worst_equilibrium(cfg),
        Target::Incremental => estimate_incremental_limits(cfg),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_validation() {
        let base = ExperimentConfig::new(20, 10, 1);
        assert!(base.validate(Target::Basins).is_err());
        assert!(base.clone().with_epsilons(&[0.1, 0.3]).validate(Target::Basins).is_ok());
        assert!(base.clone().with_epsilons(&[0.3, 0.1]).validate(Target::Basins).is_err());
        assert!(base.clone().with_epsilons(&[0.5]).validate(Target::Basins).is_err());
        assert!(base.clone().with_epsilons(&[0.01]).validate(Target::Basins).is_err());
        assert!(base.clone().with_epsilons(&[0.0, 0.1]).validate(Target::Basins).is_ok());
        assert!(base.clone().with_epsilons(&[0.0, 0.1]).validate(Target::Incremental).is_err());
        assert!(base.clone().with_threads(0).validate(Target::Ranks).is_err());
        assert!(ExperimentConfig::new(1, 10, 1).validate(Target::WorstEq).is_err());
        assert!(ExperimentConfig::new(4, 10, 1)
            .with_generator(GeneratorKind::Exhaustive)
            .validate(Target::Ranks)
            .is_err());
    }

    #[test]
    fn exhaustive_k2_mean_w() {
        let cfg = ExperimentConfig::new(2, 1, 0).with_epsilons(&[0.0]).with_generator(GeneratorKind::Exhaustive);
        let rep = estimate_basin_profile(&cfg).unwrap();
        assert_eq!(rep.trials_run, 24);
        assert_eq!(rep.w.as_ref().unwrap().mean_exact, "4/3");
        assert_eq!(rep.epsilon_zero.as_deref(), Some("epsilon=0 -> rank 1"));
        // Basin of the best equilibrium: 4 cells when W=1 (16 grids), 2 when W=2 (8 grids).
        let b = &rep.basins.as_ref().unwrap()[0];
        assert!((b.mean_basin_over_k - (16.0 * 2.0 + 8.0 * 1.0) / 24.0).abs() < 1e-12);
    }

    #[test]
    fn exclusions_are_counted() {
        let cfg = ExperimentConfig::new(20, 200, 3).with_epsilons(&[0.05, 0.45]);
        let rep = estimate_basin_profile(&cfg).unwrap();
        let rows = rep.basins.unwrap();
        assert_eq!(rows[0].rank, 1);
        assert_eq!(rows[0].excluded, 0);
        assert_eq!(rows[1].rank, 9);
        assert!(rows[1].excluded > 0 && rows[1].excluded <= 200);
    }

    #[test]
    fn thread_count_does_not_change_reports() {
        let cfg = ExperimentConfig::new(30, 64, 9).with_epsilons(&[0.1, 0.2]);
        let a = estimate_basin_profile(&cfg.clone().with_threads(1)).unwrap().to_json().unwrap();
        let b = estimate_basin_profile(&cfg.with_threads(4)).unwrap().to_json().unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn csv_headers() {
        let cfg = ExperimentConfig::new(10, 20, 2).with_epsilons(&[0.1]);
        let csv = estimate_basin_profile(&cfg).unwrap().to_csv();
        assert!(csv.starts_with("epsilon,mean_basin_over_k,std_err,excluded,phi_theory\n"));
        assert_eq!(csv.lines().count(), 2);
    }
}
