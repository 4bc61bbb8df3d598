//! Named desk-scale experiments.

use super::config::{
    DriveChoice, DriveSection, EvolutionChoice, ExperimentConfig, ModelChoice, ModelSection, Observable,
    Parameters, RunSection, StabilitySection, SweepSection,
};
use crate::error::{FloqError, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum PresetAction {
    Run,
    Stability(Vec<f64>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct PresetJob {
    /// Subdirectory of the output directory; empty for single-job presets.
    pub subdir: String,
    pub config: ExperimentConfig,
    pub action: PresetAction,
}

pub const PRESET_NAMES: [&str; 11] = [
    "fig4a", "fig4b", "fig5", "fig6", "fig7", "fig8_reduced", "fig9a", "fig10", "fig11", "fig12", "fig13",
];

fn model(kind: ModelChoice, sites: usize, n_max: Option<u8>, parity: Option<i8>) -> ModelSection {
    ModelSection {
        kind,
        sites,
        charge: None,
        leg_charges: None,
        n_max,
        parity,
        initial: None,
    }
}

fn config(model: ModelSection, drive: DriveChoice, run: RunSection) -> ExperimentConfig {
    ExperimentConfig {
        model,
        parameters: Parameters::default(),
        drive: DriveSection {
            kind: drive,
            ..DriveSection::default()
        },
        run,
        sweep: SweepSection::default(),
        stability: StabilitySection::default(),
    }
}

fn run(periods: usize, samples: usize, observables: &[Observable], cut: Option<usize>) -> RunSection {
    RunSection {
        periods,
        samples_per_period: samples,
        observables: observables.to_vec(),
        cut,
        ..RunSection::default()
    }
}

fn job(subdir: &str, config: ExperimentConfig) -> PresetJob {
    PresetJob {
        subdir: subdir.into(),
        config,
        action: PresetAction::Run,
    }
}

fn both_drives(make: impl Fn(DriveChoice) -> ExperimentConfig) -> Vec<PresetJob> {
    vec![
        job("integer", make(DriveChoice::Integer)),
        job("fractional", make(DriveChoice::Fractional)),
    ]
}

fn trimer(kind: ModelChoice, drive: DriveChoice, periods: usize) -> ExperimentConfig {
    config(
        model(kind, 3, Some(3), Some(1)),
        drive,
        run(periods, 4, &[Observable::Populations, Observable::Entropy], Some(1)),
    )
}

pub fn preset(name: &str) -> Result<Vec<PresetJob>> {
    use DriveChoice::*;
    use ModelChoice::*;
    use Observable::*;
    let jobs = match name {
        "fig4a" => vec![job(
            "",
            config(model(BoseHubbard, 3, Some(3), Some(1)), Integer, run(40, 1, &[Populations], None)),
        )],
        "fig4b" => vec![job(
            "",
            config(model(BoseHubbard, 3, Some(3), Some(1)), Fractional, run(120, 1, &[Populations], None)),
        )],
        "fig5" => both_drives(|d| {
            config(model(BoseHubbard, 3, Some(3), None), d, run(if d == Integer { 40 } else { 120 }, 4, &[Entropy], Some(1)))
        }),
        "fig6" => both_drives(|d| config(model(BoseHubbard, 5, Some(5), Some(1)), d, run(100, 1, &[Pr], None))),
        "fig7" => both_drives(|d| config(model(BoseHubbard, 5, Some(5), Some(1)), d, run(100, 1, &[Heating], None))),
        "fig8_reduced" => both_drives(|d| {
            let mut c = config(
                model(BoseHubbard, 8, Some(2), None),
                d,
                run(60, 1, &[Entropy, Echo, Autocorrelation], Some(4)),
            );
            c.run.evolution = EvolutionChoice::Sparse;
            c
        }),
        "fig9a" => {
            let mut c = config(model(BoseHubbard, 4, Some(4), None), Fractional, run(60, 1, &[], Some(2)));
            c.stability.probe_periods = 30.0;
            let r = (c.parameters.j0 / c.parameters.u).powi(2);
            vec![PresetJob {
                subdir: String::new(),
                config: c,
                action: PresetAction::Stability(vec![0.0, 10.0 * r, 100.0 * r]),
            }]
        }
        "fig10" => vec![job("", trimer(Spin1Xxz, Integer, 40))],
        "fig11" => vec![job("", trimer(Spin1Xxz, Fractional, 120))],
        "fig12" => vec![job("", trimer(Jch, Integer, 40))],
        "fig13" => vec![job("", trimer(Jch, Fractional, 120))],
        _ => {
            return Err(FloqError::config(
                "preset",
                format!("unknown preset `{name}`; known: {}", PRESET_NAMES.join(", ")),
            ))
        }
    };
    Ok(jobs)
}
