//! Experiment runners: reproducible, seeded, parallel over independent
//! chains, emitting self-describing reports.
//!
//! Every cell fans out `samples` chains; chain `i` of cell `c` draws from
//! `chain_rng(seed, c·2³² + i)`, so results are identical whatever the thread
//! count. Wall-clock numbers are recorded for context but never asserted;
//! they are hardware facts, not correctness facts.

use crate::automaton::Alphabet;
use crate::baseline::{tabakov_vardi, TvParams};
use crate::census::census;
use crate::chain::{default_steps, ChainParams};
use crate::class::{ClassSpec, Family};
use crate::dfa::minimal_dfa_size;
use crate::error::Result;
use crate::iso::{canonical_form, CanonicalForm};
use crate::metropolis::{chain_rng, sample_uniform_labeled, sample_uniform_up_to_iso, AutCache};
use crate::stats::{empirical_from_counts, tv_distance};
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;
use std::time::Instant;

/// Echo of how an experiment was invoked; embedded in every report so a run
/// can be reproduced from its output alone.
#[derive(Clone, Debug, Serialize)]
pub struct ExperimentConfig {
    pub experiment: String,
    pub class: Option<ClassSpec>,
    pub n_values: Vec<usize>,
    pub alphabet: usize,
    pub params: Option<ChainParams>,
    pub steps_override: Option<u64>,
    pub samples: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CellReport {
    pub label: String,
    pub n: usize,
    pub samples: usize,
    pub steps: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trim_fraction: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_aut: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_aut: Option<u128>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_min_dfa: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_min_dfa_trim: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub accept_rate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ns_per_step: Option<f64>,
    pub wall_ms: u128,
}

impl CellReport {
    fn new(label: String, n: usize, samples: usize, steps: u64) -> Self {
        CellReport {
            label,
            n,
            samples,
            steps,
            trim_fraction: None,
            mean_aut: None,
            max_aut: None,
            mean_min_dfa: None,
            mean_min_dfa_trim: None,
            accept_rate: None,
            ns_per_step: None,
            wall_ms: 0,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub format_version: u32,
    pub config: ExperimentConfig,
    pub cells: Vec<CellReport>,
}

pub const REPORT_FORMAT_VERSION: u32 = 1;

fn stream(cell: usize, chain: usize) -> u64 {
    (cell as u64) << 32 | chain as u64
}

/// Proportion of trim automata after lazy walks on the full space, one cell
/// per `n`.
pub fn run_trim_rate(
    alphabet: Alphabet,
    n_values: &[usize],
    samples: usize,
    seed: u64,
    steps_override: Option<u64>,
) -> Result<RunReport> {
    let class = ClassSpec::all();
    let params = ChainParams::thirds(true);
    let mut cells = Vec::new();
    for (cell_idx, &n) in n_values.iter().enumerate() {
        // default to the mixing budget: this experiment reports a stationary
        // proportion, and bare n³ still remembers the transition-free start
        let steps = steps_override.unwrap_or_else(|| {
            distribution_check_steps(&class, n, alphabet.size(), &params, 0.005)
        });
        let started = Instant::now();
        let trim: Result<u64> = (0..samples)
            .into_par_iter()
            .map(|i| {
                let mut rng = chain_rng(seed, stream(cell_idx, i));
                let (a, _) = sample_uniform_labeled(&class, n, alphabet, &params, steps, &mut rng)?;
                Ok(u64::from(a.is_trim()))
            })
            .try_reduce(|| 0, |a, b| Ok(a + b));
        let trim = trim?;
        let mut cell = CellReport::new(format!("all n={n}"), n, samples, steps);
        cell.trim_fraction = Some(trim as f64 / samples as f64);
        cell.wall_ms = started.elapsed().as_millis();
        cells.push(cell);
    }
    Ok(RunReport {
        format_version: REPORT_FORMAT_VERSION,
        config: ExperimentConfig {
            experiment: "trim-rate".into(),
            class: Some(class),
            n_values: n_values.to_vec(),
            alphabet: alphabet.size(),
            params: Some(params),
            steps_override,
            samples,
            seed,
        },
        cells,
    })
}

/// Average and maximum automorphism group sizes of Metropolis samples, one
/// cell per class and `n`. With `baseline = true`, extra cells report the
/// same statistic for Bernoulli-generated automata (whose groups are orders
/// of magnitude larger: they are typically far from trim, and the dead
/// parts are interchangeable).
pub fn run_aut_sizes(
    alphabet: Alphabet,
    classes: &[ClassSpec],
    n_values: &[usize],
    samples: usize,
    seed: u64,
    steps_override: Option<u64>,
) -> Result<RunReport> {
    run_aut_sizes_with_baseline(
        alphabet,
        classes,
        n_values,
        samples,
        seed,
        steps_override,
        false,
    )
}

pub fn run_aut_sizes_with_baseline(
    alphabet: Alphabet,
    classes: &[ClassSpec],
    n_values: &[usize],
    samples: usize,
    seed: u64,
    steps_override: Option<u64>,
    baseline: bool,
) -> Result<RunReport> {
    let mut cells = Vec::new();
    let mut cell_idx = 0;
    for class in classes {
        let params = ChainParams::default_for(class);
        for &n in n_values {
            let steps = steps_override.unwrap_or_else(|| {
                distribution_check_steps(class, n, alphabet.size(), &params, 0.005)
            });
            let started = Instant::now();
            let cache = AutCache::new(1 << 16);
            let outcomes: Result<Vec<(u128, f64)>> = (0..samples)
                .into_par_iter()
                .map(|i| {
                    let mut rng = chain_rng(seed, stream(cell_idx, i));
                    let (_, meta) = sample_uniform_up_to_iso(
                        class,
                        n,
                        alphabet,
                        &params,
                        steps,
                        &mut rng,
                        Some(&cache),
                    )?;
                    Ok((meta.aut_of_output, meta.stats.accept_rate()))
                })
                .collect();
            let outcomes = outcomes?;
            let mut cell = CellReport::new(format!("{} n={n}", class.label()), n, samples, steps);
            cell.mean_aut =
                Some(outcomes.iter().map(|(a, _)| *a as f64).sum::<f64>() / samples as f64);
            cell.max_aut = outcomes.iter().map(|(a, _)| *a).max();
            cell.accept_rate = Some(outcomes.iter().map(|(_, r)| r).sum::<f64>() / samples as f64);
            cell.wall_ms = started.elapsed().as_millis();
            cells.push(cell);
            cell_idx += 1;
        }
    }
    if baseline {
        for (p_i, sigma) in [(0.2, 2.0), (0.5, 2.0), (0.2, 3.0)] {
            for &n in n_values {
                let tv = TvParams {
                    n,
                    alphabet: alphabet.size(),
                    sigma,
                    p_f: p_i,
                    p_i: Some(p_i),
                };
                let started = Instant::now();
                let auts: Result<Vec<u128>> = (0..samples)
                    .into_par_iter()
                    .map(|i| {
                        let mut rng = chain_rng(seed, stream(cell_idx, i));
                        let a = tabakov_vardi(&tv, &mut rng)?;
                        Ok(crate::iso::automorphism_group_size(&a))
                    })
                    .collect();
                let auts = auts?;
                let mut cell =
                    CellReport::new(format!("tv p_i={p_i} sigma={sigma} n={n}"), n, samples, 0);
                cell.mean_aut = Some(auts.iter().map(|&a| a as f64).sum::<f64>() / samples as f64);
                cell.max_aut = auts.iter().copied().max();
                cell.wall_ms = started.elapsed().as_millis();
                cells.push(cell);
                cell_idx += 1;
            }
        }
    }
    Ok(RunReport {
        format_version: REPORT_FORMAT_VERSION,
        config: ExperimentConfig {
            experiment: "aut-sizes".into(),
            class: None,
            n_values: n_values.to_vec(),
            alphabet: alphabet.size(),
            params: None,
            steps_override,
            samples,
            seed,
        },
        cells,
    })
}

/// Average minimal-DFA sizes: Metropolis samples from the per-letter-bounded
/// single-initial class versus the Bernoulli baseline at `σ ∈ {2, 3}`,
/// `p_f = 0.2`.
pub fn run_min_dfa(
    alphabet: Alphabet,
    n_values: &[usize],
    samples: usize,
    seed: u64,
    steps_override: Option<u64>,
) -> Result<RunReport> {
    let class = ClassSpec::new(Family::DegPerLetter(2), true)?;
    let params = ChainParams::default_for(&class);
    let mut cells = Vec::new();
    let mut cell_idx = 0;
    for &n in n_values {
        let steps = steps_override.unwrap_or_else(|| default_steps(n));
        let started = Instant::now();
        let cache = AutCache::new(1 << 16);
        let sizes: Result<Vec<(usize, usize)>> = (0..samples)
            .into_par_iter()
            .map(|i| {
                let mut rng = chain_rng(seed, stream(cell_idx, i));
                let (a, _) = sample_uniform_up_to_iso(
                    &class,
                    n,
                    alphabet,
                    &params,
                    steps,
                    &mut rng,
                    Some(&cache),
                )?;
                let min = minimal_dfa_size(&a);
                Ok((min.reported_size, min.trim_size))
            })
            .collect();
        let sizes = sizes?;
        let mut cell = CellReport::new(format!("{} n={n}", class.label()), n, samples, steps);
        cell.mean_min_dfa =
            Some(sizes.iter().map(|(s, _)| *s as f64).sum::<f64>() / samples as f64);
        cell.mean_min_dfa_trim =
            Some(sizes.iter().map(|(_, t)| *t as f64).sum::<f64>() / samples as f64);
        cell.wall_ms = started.elapsed().as_millis();
        cells.push(cell);
        cell_idx += 1;
    }
    for sigma in [2.0, 3.0] {
        for &n in n_values {
            let tv = TvParams {
                n,
                alphabet: alphabet.size(),
                sigma,
                p_f: 0.2,
                p_i: None,
            };
            let started = Instant::now();
            let sizes: Result<Vec<(usize, usize)>> = (0..samples)
                .into_par_iter()
                .map(|i| {
                    let mut rng = chain_rng(seed, stream(cell_idx, i));
                    let a = tabakov_vardi(&tv, &mut rng)?;
                    let min = minimal_dfa_size(&a);
                    Ok((min.reported_size, min.trim_size))
                })
                .collect();
            let sizes = sizes?;
            let mut cell = CellReport::new(format!("tv sigma={sigma} n={n}"), n, samples, 0);
            cell.mean_min_dfa =
                Some(sizes.iter().map(|(s, _)| *s as f64).sum::<f64>() / samples as f64);
            cell.mean_min_dfa_trim =
                Some(sizes.iter().map(|(_, t)| *t as f64).sum::<f64>() / samples as f64);
            cell.wall_ms = started.elapsed().as_millis();
            cells.push(cell);
            cell_idx += 1;
        }
    }
    Ok(RunReport {
        format_version: REPORT_FORMAT_VERSION,
        config: ExperimentConfig {
            experiment: "min-dfa".into(),
            class: Some(class),
            n_values: n_values.to_vec(),
            alphabet: alphabet.size(),
            params: Some(params),
            steps_override,
            samples,
            seed,
        },
        cells,
    })
}

pub use crate::chain::distribution_check_steps;

/// End-to-end distribution check on a census-sized space.
#[derive(Clone, Debug, Serialize)]
pub struct TvCheckReport {
    pub class: ClassSpec,
    pub n: usize,
    pub alphabet: usize,
    pub samples: usize,
    pub steps: u64,
    pub seed: u64,
    /// Number of isomorphism classes (γ).
    pub gamma: u64,
    /// Labeled automata in the space.
    pub total: u64,
    /// TV between the two exact target laws: how distinguishable uniform-
    /// over-classes and uniform-over-labeled are on this space at all.
    pub law_separation: f64,
    pub tv_mh_to_uniform: f64,
    pub tv_mh_to_size_weighted: f64,
    pub tv_plain_to_uniform: f64,
    pub tv_plain_to_size_weighted: f64,
}

/// Runs both samplers against the census laws.
pub fn run_tv_check(
    class: &ClassSpec,
    n: usize,
    alphabet: Alphabet,
    samples: usize,
    seed: u64,
    steps_override: Option<u64>,
) -> Result<TvCheckReport> {
    let report = census(class, n, alphabet)?;
    let params = ChainParams::default_for(class);
    let steps = steps_override
        .unwrap_or_else(|| distribution_check_steps(class, n, alphabet.size(), &params, 0.005));

    let collect = |mh: bool| -> Result<BTreeMap<CanonicalForm, u64>> {
        let counts: Result<Vec<BTreeMap<CanonicalForm, u64>>> = (0..samples)
            .into_par_iter()
            .chunks(4096)
            .map(|chunk| {
                let mut local: BTreeMap<CanonicalForm, u64> = BTreeMap::new();
                for i in chunk {
                    let cell = usize::from(mh);
                    let mut rng = chain_rng(seed, stream(cell, i));
                    let a = if mh {
                        sample_uniform_up_to_iso(
                            class, n, alphabet, &params, steps, &mut rng, None,
                        )?
                        .0
                    } else {
                        sample_uniform_labeled(class, n, alphabet, &params, steps, &mut rng)?.0
                    };
                    *local.entry(canonical_form(&a)?).or_insert(0) += 1;
                }
                Ok(local)
            })
            .collect();
        let mut merged = BTreeMap::new();
        for partial in counts? {
            for (k, v) in partial {
                *merged.entry(k).or_insert(0) += v;
            }
        }
        Ok(merged)
    };

    let mh_counts = collect(true)?;
    let plain_counts = collect(false)?;
    let uniform = report.uniform_class_law();
    let size_weighted = report.labeled_class_law();
    let mh_emp = empirical_from_counts(&mh_counts, &report)?;
    let plain_emp = empirical_from_counts(&plain_counts, &report)?;
    Ok(TvCheckReport {
        class: *class,
        n,
        alphabet: alphabet.size(),
        samples,
        steps,
        seed,
        gamma: report.gamma,
        total: report.total,
        law_separation: tv_distance(&uniform, &size_weighted)?,
        tv_mh_to_uniform: tv_distance(&mh_emp, &uniform)?,
        tv_mh_to_size_weighted: tv_distance(&mh_emp, &size_weighted)?,
        tv_plain_to_uniform: tv_distance(&plain_emp, &uniform)?,
        tv_plain_to_size_weighted: tv_distance(&plain_emp, &size_weighted)?,
    })
}

/// Wall-clock per chain step at growing `n`. Reported, never asserted.
pub fn run_timing(
    alphabet: Alphabet,
    class: &ClassSpec,
    n_values: &[usize],
    samples: usize,
    seed: u64,
) -> Result<RunReport> {
    let params = ChainParams::default_for(class);
    let mut cells = Vec::new();
    for (cell_idx, &n) in n_values.iter().enumerate() {
        let steps = default_steps(n);
        let started = Instant::now();
        let cache = AutCache::new(1 << 16);
        for i in 0..samples {
            let mut rng = chain_rng(seed, stream(cell_idx, i));
            sample_uniform_up_to_iso(class, n, alphabet, &params, steps, &mut rng, Some(&cache))?;
        }
        let elapsed = started.elapsed();
        let total_steps = steps as f64 * samples as f64;
        let mut cell = CellReport::new(format!("{} n={n}", class.label()), n, samples, steps);
        cell.ns_per_step = Some(elapsed.as_nanos() as f64 / total_steps);
        cell.wall_ms = elapsed.as_millis();
        cells.push(cell);
    }
    Ok(RunReport {
        format_version: REPORT_FORMAT_VERSION,
        config: ExperimentConfig {
            experiment: "timing".into(),
            class: Some(*class),
            n_values: n_values.to_vec(),
            alphabet: alphabet.size(),
            params: Some(params),
            steps_override: None,
            samples,
            seed,
        },
        cells,
    })
}
