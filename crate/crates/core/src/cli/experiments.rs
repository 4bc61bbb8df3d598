//! The three experiment drivers behind the CLI verbs.

use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;

use super::config::{BranchChoice, DriveChoice, EvolutionChoice, ExperimentConfig, Observable};
use super::output::{fmt_sig, write_series, write_table, ConvergenceReport, Manifest};
use crate::error::{FloqError, Result};
use crate::floquet::{fractional_weight, magnus, resonance_weight, Branch};
use crate::linalg::operator_norm;
use crate::models::DrivenModel;
use crate::observables::{
    autocorrelations, configuration_count, heating_rate_series, loschmidt_echo, participation_ratio_in,
    populations, von_neumann_entropy, ObservableSeries,
};
use crate::propagate::{
    continuous_evolve, period_propagator, sparse_evolve, state_distance, stroboscopic_evolve, KrylovOptions,
    PropagatorOptions, StateVector,
};

/// Dimension up to which `evolution = "auto"` picks dense propagation.
pub const DENSE_LIMIT: usize = 600;

fn use_dense(cfg: &ExperimentConfig, dim: usize) -> bool {
    match cfg.run.evolution {
        EvolutionChoice::Dense => true,
        EvolutionChoice::Sparse => false,
        EvolutionChoice::Auto => dim <= DENSE_LIMIT,
    }
}

fn initial_state(cfg: &ExperimentConfig, model: &DrivenModel) -> Result<StateVector> {
    let amps = model
        .product_state(&cfg.initial_labels())
        .map_err(|e| FloqError::config("model.initial", e.to_string()))?;
    StateVector::normalized(amps, model.basis().id(), 0.0)
}

/// Step count for the sparse path: double until one period reproduces the
/// state within the propagator tolerance.
fn sparse_steps(model: &DrivenModel, psi0: &StateVector, opts: &PropagatorOptions) -> Result<(usize, f64)> {
    let kopts = KrylovOptions::default();
    let grid = [0.0, model.drive().period_eff()];
    let run = |steps: usize| -> Result<Vec<crate::linalg::C64>> {
        let o = PropagatorOptions { steps_per_period: steps, ..*opts };
        Ok(sparse_evolve(model, psi0, &grid, &o, &kopts)?.pop().unwrap().into_amps())
    };
    let mut steps = opts.steps_per_period.max(1);
    let mut coarse = run(steps)?;
    loop {
        let fine = run(2 * steps)?;
        let defect = state_distance(&coarse, &fine);
        steps *= 2;
        if defect < opts.tolerance {
            return Ok((steps, defect));
        }
        if 2 * steps > opts.max_steps {
            return Err(FloqError::NotConverged { defect, steps });
        }
        coarse = fine;
    }
}

/// Evolve `psi0` onto `grid`. With `stroboscopic = Some(n)` the grid is
/// `0, T, …, nT` and the dense path uses powers of the period propagator.
pub fn evolve(
    cfg: &ExperimentConfig,
    model: &DrivenModel,
    psi0: &StateVector,
    grid: &[f64],
    stroboscopic: Option<usize>,
) -> Result<(Vec<StateVector>, ConvergenceReport)> {
    let opts = PropagatorOptions {
        steps_per_period: cfg.run.steps_per_period,
        ..PropagatorOptions::default()
    };
    let dense = use_dense(cfg, model.dim());
    let (states, steps, defect) = if dense {
        let prop = period_propagator(model, &opts)?;
        let states = match stroboscopic {
            Some(n) => stroboscopic_evolve(&prop, psi0, n)?,
            None => {
                let o = PropagatorOptions { steps_per_period: prop.steps(), ..opts };
                continuous_evolve(model, psi0, grid, &o)?
            }
        };
        (states, prop.steps(), prop.defect())
    } else {
        let (steps, defect) = sparse_steps(model, psi0, &opts)?;
        let o = PropagatorOptions { steps_per_period: steps, ..opts };
        (sparse_evolve(model, psi0, grid, &o, &KrylovOptions::default())?, steps, defect)
    };
    let drift = states.iter().map(|s| (s.norm() - 1.0).abs()).fold(0.0, f64::max);
    let report = ConvergenceReport {
        evolution: if dense { "dense" } else { "sparse" }.into(),
        steps_per_period: steps,
        step_doubling_defect: defect,
        max_norm_drift: drift,
        ..Default::default()
    };
    Ok((states, report))
}

fn family_file(obs: Observable) -> &'static str {
    match obs {
        Observable::Populations => "populations.csv",
        Observable::Pr => "localization.csv",
        Observable::Entropy => "entanglement.csv",
        Observable::Echo => "echo.csv",
        Observable::Autocorrelation => "autocorrelation.csv",
        Observable::Heating => "heating.csv",
    }
}

type RowEval<'a> = Box<dyn Fn(&StateVector) -> Result<Vec<f64>> + Sync + 'a>;

fn family_series(
    obs: Observable,
    cfg: &ExperimentConfig,
    model: &DrivenModel,
    states: &[StateVector],
    period: f64,
) -> Result<ObservableSeries> {
    let basis = model.basis();
    let psi0 = &states[0];
    let (keys, eval): (Vec<String>, RowEval) = match obs {
        Observable::Populations => {
            let targets = model.trimer_states().map_err(|e| FloqError::config("run.observables", e.to_string()))?;
            let keys = (0..targets.len()).map(|j| format!("P_psi{j}")).collect();
            (keys, Box::new(move |s| populations(s, &targets)))
        }
        Observable::Pr => {
            let thr = cfg.run.count_threshold;
            (
                vec!["PR".into(), "n_configs".into()],
                Box::new(move |s| {
                    Ok(vec![participation_ratio_in(basis, s)?, configuration_count(basis, s, thr)? as f64])
                }),
            )
        }
        Observable::Entropy => {
            let cut = cfg.cut();
            (vec![format!("S_vN_cut{cut}")], Box::new(move |s| Ok(vec![von_neumann_entropy(basis, s, cut)?])))
        }
        Observable::Echo => (vec!["echo".into()], Box::new(move |s| Ok(vec![loschmidt_echo(psi0, s)?]))),
        Observable::Autocorrelation => {
            let keys = (1..=model.sector().n_sites()).map(|j| format!("Cj_{j}")).collect();
            (keys, Box::new(move |s| autocorrelations(basis, psi0, s)))
        }
        Observable::Heating => unreachable!("heating is evaluated on stroboscopic states"),
    };
    let rows: Vec<Vec<f64>> = states.par_iter().map(&eval).collect::<Result<_>>()?;
    let mut series = ObservableSeries::new(keys);
    for (s, row) in states.iter().zip(rows) {
        series.push(s.t() / period, row)?;
    }
    Ok(series)
}

fn base_manifest(command: &str, cfg: &ExperimentConfig, model: &DrivenModel) -> Manifest {
    let d = model.drive();
    Manifest {
        command: command.into(),
        model: model.kind().name().into(),
        dim: model.dim(),
        sector_dim: model.sector().dim(),
        parity: cfg.model.parity,
        omega: d.omega,
        period: d.period(),
        period_eff: d.period_eff(),
        delta_omega_rel: d.delta_rel,
        config: cfg.to_toml(),
        ..Default::default()
    }
}

/// Evolve the configured model and write one CSV per observable family plus
/// `manifest.json`. Times are in units of the (detuned) drive period.
pub fn run(cfg: &ExperimentConfig, out: &Path) -> Result<Manifest> {
    let start = Instant::now();
    cfg.validate()?;
    let model = cfg.build_model()?;
    std::fs::create_dir_all(out)?;
    let mut manifest = base_manifest("run", cfg, &model);

    if cfg.run.magnus {
        let m = magnus(&model)?;
        manifest.magnus_h0_norm = Some(operator_norm(&m.hf0));
        manifest.magnus_h1_norm = Some(operator_norm(&m.hf1));
        manifest.convergence.quadrature_error = Some(m.report.error);
        manifest.convergence.quadrature_nodes = Some(m.report.nodes);
    }

    let mut families = cfg.run.observables.clone();
    families.sort();
    families.dedup();
    if !families.is_empty() {
        let psi0 = initial_state(cfg, &model)?;
        let period = model.drive().period_eff();
        let per = cfg.run.samples_per_period;
        let n = cfg.run.periods;
        let grid: Vec<f64> = (0..=n * per).map(|k| k as f64 * period / per as f64).collect();
        let strob = (per == 1).then_some(n);
        let (states, report) = evolve(cfg, &model, &psi0, &grid, strob)?;
        let quad = manifest.convergence.clone();
        manifest.convergence = ConvergenceReport {
            quadrature_error: quad.quadrature_error,
            quadrature_nodes: quad.quadrature_nodes,
            ..report
        };
        for obs in families {
            let series = if obs == Observable::Heating {
                let strobe: Vec<StateVector> = states.iter().step_by(per).cloned().collect();
                heating_rate_series(&strobe, &model, period)?
            } else {
                family_series(obs, cfg, &model, &states, period)?
            };
            let name = family_file(obs);
            write_series(&out.join(name), &series)?;
            manifest.files.push(name.into());
        }
    }
    manifest.wall_clock_s = start.elapsed().as_secs_f64();
    manifest.write(out)?;
    Ok(manifest)
}

/// `lo:hi:steps` in units of `U`; the points are `lo + k(hi − lo)/steps`,
/// `k = 1..=steps`, so `0:1.5:2000` samples `(0, 1.5U]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OmegaGrid {
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
}

impl OmegaGrid {
    pub fn parse(s: &str) -> Result<Self> {
        let bad = || FloqError::config("grid", format!("expected lo:hi:steps, got `{s}`"));
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(bad());
        }
        let lo: f64 = parts[0].trim().parse().map_err(|_| bad())?;
        let hi: f64 = parts[1].trim().parse().map_err(|_| bad())?;
        let steps: usize = parts[2].trim().parse().map_err(|_| bad())?;
        let g = Self { lo, hi, steps };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lo >= 0.0 && self.hi > self.lo && self.hi <= 2.0) {
            return Err(FloqError::config("grid", format!("need 0 <= lo < hi <= 2, got {}:{}", self.lo, self.hi)));
        }
        if self.steps == 0 {
            return Err(FloqError::config("grid", "steps must be positive"));
        }
        Ok(())
    }

    pub fn points(&self) -> Vec<f64> {
        (1..=self.steps)
            .map(|k| self.lo + (self.hi - self.lo) * k as f64 / self.steps as f64)
            .collect()
    }
}

pub const SWEEP_HEADERS: [&str; 10] =
    ["Re_F", "Im_F", "abs_F", "Re_F1", "Im_F1", "abs_F1", "Re_F2", "Im_F2", "abs_F2", "quad_err"];

/// Resonance weights over the grid; `F` in units of `J0`, `F1` and `F2` in
/// units of `J0²`. Writes `sweep.csv` with first column `omega_over_U`.
pub fn sweep_omega(cfg: &ExperimentConfig, grid: &OmegaGrid, out: &Path) -> Result<Manifest> {
    let start = Instant::now();
    cfg.validate()?;
    grid.validate()?;
    std::fs::create_dir_all(out)?;
    let u = cfg.parameters.u;
    let [mj, mk] = cfg.sweep.f_labels;
    let [aj, ak, al] = cfg.sweep.f1_labels;
    let branch = match cfg.sweep.branch {
        BranchChoice::Plus => Branch::Plus,
        BranchChoice::Minus => Branch::Minus,
    };
    let xs = grid.points();
    let rows: Vec<Vec<f64>> = xs
        .par_iter()
        .map(|&x| {
            let omega = x * u;
            let f = resonance_weight(omega, u, mj, mk, branch);
            let w = fractional_weight(omega, u, aj, ak, al)?;
            Ok(vec![
                f.re,
                f.im,
                f.norm(),
                w.f1.re,
                w.f1.im,
                w.f1.norm(),
                w.f2.re,
                w.f2.im,
                w.f2.norm(),
                w.report.error,
            ])
        })
        .collect::<Result<_>>()?;
    let quad = rows.iter().map(|r| r[9]).fold(0.0, f64::max);
    let headers: Vec<String> = SWEEP_HEADERS.iter().map(|s| s.to_string()).collect();
    write_table(&out.join("sweep.csv"), "omega_over_U", &headers, xs.iter().copied().zip(rows))?;
    let manifest = Manifest {
        command: "sweep-omega".into(),
        model: format!("{:?}", cfg.model.kind).to_lowercase(),
        convergence: ConvergenceReport {
            evolution: "none".into(),
            quadrature_error: Some(quad),
            ..Default::default()
        },
        files: vec!["sweep.csv".into()],
        wall_clock_s: start.elapsed().as_secs_f64(),
        config: cfg.to_toml(),
        ..Default::default()
    };
    manifest.write(out)?;
    Ok(manifest)
}

pub fn parse_deltas(s: &str) -> Result<Vec<f64>> {
    let deltas = s
        .split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .ok()
                .filter(|d| *d > -1.0 && d.is_finite())
                .ok_or_else(|| FloqError::config("deltas", format!("bad value `{v}`")))
        })
        .collect::<Result<Vec<_>>>()?;
    if deltas.is_empty() {
        return Err(FloqError::config("deltas", "empty list"));
    }
    Ok(deltas)
}

/// Probe entropy of one detuning.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StabilityPoint {
    pub delta: f64,
    pub probe_entropy: f64,
}

/// Entropy against time for each detuning, on a common grid in nominal
/// periods that contains the probe time. Writes `stability.csv` and
/// `stability_summary.csv`.
pub fn stability(cfg: &ExperimentConfig, deltas: &[f64], out: &Path) -> Result<(Manifest, Vec<StabilityPoint>)> {
    let start = Instant::now();
    cfg.validate()?;
    if cfg.drive.kind != DriveChoice::Fractional {
        return Err(FloqError::config("drive.kind", "stability scans need the fractional drive"));
    }
    if deltas.is_empty() {
        return Err(FloqError::config("deltas", "empty list"));
    }
    std::fs::create_dir_all(out)?;
    let base = cfg.build_model()?;
    let psi0 = initial_state(cfg, &base)?;
    let t0 = base.drive().period();
    let st = &cfg.stability;
    let span = (cfg.run.periods as f64).max(st.probe_periods);
    let mut grid_n: Vec<f64> = (0..)
        .map(|k| k as f64 * st.sample_every)
        .take_while(|x| *x <= span + 1e-9)
        .collect();
    grid_n.push(st.probe_periods);
    grid_n.sort_by(f64::total_cmp);
    grid_n.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    let probe_idx = grid_n.iter().position(|x| (x - st.probe_periods).abs() < 1e-9).unwrap();
    let grid: Vec<f64> = grid_n.iter().map(|x| x * t0).collect();
    let cut = cfg.cut();

    let results: Vec<(Vec<f64>, ConvergenceReport)> = deltas
        .par_iter()
        .map(|&d| {
            let model = base.with_drive(base.drive().with_detuning(d));
            let (states, report) = evolve(cfg, &model, &psi0, &grid, None)?;
            let s = states
                .iter()
                .map(|s| von_neumann_entropy(model.basis(), s, cut))
                .collect::<Result<Vec<_>>>()?;
            Ok((s, report))
        })
        .collect::<Result<_>>()?;

    let headers: Vec<String> = deltas.iter().map(|d| format!("S_vN_cut{cut}_d{}", fmt_sig(*d))).collect();
    let rows = grid_n
        .iter()
        .enumerate()
        .map(|(i, &x)| (x, results.iter().map(|(s, _)| s[i]).collect::<Vec<_>>()));
    write_table(&out.join("stability.csv"), "t_over_T", &headers, rows)?;

    let points: Vec<StabilityPoint> = deltas
        .iter()
        .zip(&results)
        .map(|(&delta, (s, _))| StabilityPoint { delta, probe_entropy: s[probe_idx] })
        .collect();
    let baseline = points
        .iter()
        .find(|p| p.delta == 0.0)
        .unwrap_or(&points[0])
        .probe_entropy;
    let summary_headers: Vec<String> =
        ["probe_t_over_T", "S_probe", "ratio_to_baseline"].iter().map(|s| s.to_string()).collect();
    write_table(
        &out.join("stability_summary.csv"),
        "delta_omega_rel",
        &summary_headers,
        points
            .iter()
            .map(|p| (p.delta, vec![st.probe_periods, p.probe_entropy, p.probe_entropy / baseline])),
    )?;

    let worst = results
        .iter()
        .map(|(_, r)| r.clone())
        .max_by(|a, b| a.step_doubling_defect.total_cmp(&b.step_doubling_defect))
        .unwrap();
    let mut manifest = base_manifest("stability", cfg, &base);
    manifest.convergence = worst;
    manifest.files = vec!["stability.csv".into(), "stability_summary.csv".into()];
    manifest.wall_clock_s = start.elapsed().as_secs_f64();
    manifest.write(out)?;
    Ok((manifest, points))
}
