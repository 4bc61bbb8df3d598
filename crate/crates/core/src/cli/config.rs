//! Experiment configuration files.
//!
//! ```toml
//! [model]
//! kind = "bose_hubbard"      # spin1_xxz | jch | spin_ladder
//! sites = 3
//! n_max = 3
//! parity = 1
//!
//! [parameters]
//! j0 = 0.01
//! u = 0.4
//!
//! [drive]
//! kind = "fractional"        # integer | fractional | custom
//!
//! [run]
//! periods = 120
//! observables = ["populations", "entropy"]
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::basis::{Label, LocalSpace};
use crate::error::{FloqError, Result};
use crate::models::{
    build_bose_hubbard, build_jch, build_spin1_xxz_sector, build_spin_ladder, DriveSpec, DrivenModel,
    ModelParams, DEFAULT_J0, DEFAULT_U,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelChoice {
    BoseHubbard,
    Spin1Xxz,
    Jch,
    SpinLadder,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub kind: ModelChoice,
    pub sites: usize,
    /// Total particle number, magnetization or excitation number. Derived
    /// from the initial configuration when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub charge: Option<i32>,
    /// Up-spin counts of the two ladder legs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub leg_charges: Option<[i32; 2]>,
    /// Local cutoff: bosons per site, or photons per site for jch.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_max: Option<u8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parity: Option<i8>,
    /// Initial configuration labels; jch labels are polariton slots.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<Vec<Label>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Parameters {
    pub j0: f64,
    pub u: f64,
    pub omega: f64,
    pub g: f64,
    /// Emitter detuning `ω0 − ω` of the jch model.
    pub delta: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rung_coupling: Option<f64>,
}

impl Default for Parameters {
    fn default() -> Self {
        Self {
            j0: DEFAULT_J0,
            u: DEFAULT_U,
            omega: 1.0,
            g: DEFAULT_U,
            delta: 0.0,
            rung_coupling: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DriveChoice {
    Integer,
    Fractional,
    Custom,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DriveSection {
    pub kind: DriveChoice,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    pub delta_omega_rel: f64,
}

impl Default for DriveSection {
    fn default() -> Self {
        Self {
            kind: DriveChoice::Integer,
            omega: None,
            delta_omega_rel: 0.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvolutionChoice {
    Auto,
    Dense,
    Sparse,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Observable {
    Populations,
    Pr,
    Entropy,
    Echo,
    Autocorrelation,
    Heating,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunSection {
    pub periods: usize,
    pub steps_per_period: usize,
    /// Output samples per drive period; 1 means stroboscopic.
    pub samples_per_period: usize,
    pub observables: Vec<Observable>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cut: Option<usize>,
    pub evolution: EvolutionChoice,
    pub count_threshold: f64,
    /// Also evaluate both Magnus terms and record their norms.
    pub magnus: bool,
}

impl Default for RunSection {
    fn default() -> Self {
        Self {
            periods: 40,
            steps_per_period: 256,
            samples_per_period: 1,
            observables: Vec::new(),
            cut: None,
            evolution: EvolutionChoice::Auto,
            count_threshold: 1e-3,
            magnus: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BranchChoice {
    Plus,
    Minus,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    /// `(m_j, m_k)` of the first-order weight.
    pub f_labels: [i32; 2],
    pub branch: BranchChoice,
    /// `(m_j, m_k, m_l)` of the second-order weights.
    pub f1_labels: [i32; 3],
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            f_labels: [1, 1],
            branch: BranchChoice::Plus,
            f1_labels: [0, 1, 2],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StabilitySection {
    /// Probe time in nominal drive periods.
    pub probe_periods: f64,
    /// Sampling interval in nominal drive periods.
    pub sample_every: f64,
}

impl Default for StabilitySection {
    fn default() -> Self {
        Self {
            probe_periods: 30.0,
            sample_every: 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelSection,
    #[serde(default)]
    pub parameters: Parameters,
    #[serde(default)]
    pub drive: DriveSection,
    #[serde(default)]
    pub run: RunSection,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default)]
    pub stability: StabilitySection,
}

fn positive(field: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(FloqError::config(field, format!("must be positive, got {v}")))
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| FloqError::config("toml", e.message().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| FloqError::config("config", format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let m = &self.model;
        if m.sites < 2 {
            return Err(FloqError::config("model.sites", format!("need at least 2 sites, got {}", m.sites)));
        }
        let p = &self.parameters;
        positive("parameters.j0", p.j0)?;
        positive("parameters.omega", p.omega)?;
        match m.kind {
            ModelChoice::Jch => positive("parameters.g", p.g)?,
            _ => positive("parameters.u", p.u)?,
        }
        if let Some(par) = m.parity {
            if par != 1 && par != -1 {
                return Err(FloqError::config("model.parity", format!("must be 1 or -1, got {par}")));
            }
        }
        if let Some(init) = &m.initial {
            if init.len() != m.sites {
                return Err(FloqError::config(
                    "model.initial",
                    format!("has {} labels for {} sites", init.len(), m.sites),
                ));
            }
        }
        if self.drive.kind == DriveChoice::Custom {
            positive("drive.omega", self.drive.omega.ok_or_else(|| FloqError::config("drive.omega", "required for a custom drive"))?)?;
        }
        if self.drive.delta_omega_rel.is_nan() || self.drive.delta_omega_rel <= -1.0 {
            return Err(FloqError::config("drive.delta_omega_rel", "must exceed -1"));
        }
        let r = &self.run;
        if r.steps_per_period == 0 {
            return Err(FloqError::config("run.steps_per_period", "must be positive"));
        }
        if r.samples_per_period == 0 {
            return Err(FloqError::config("run.samples_per_period", "must be positive"));
        }
        positive("run.count_threshold", r.count_threshold)?;
        if let Some(cut) = r.cut {
            if cut == 0 || cut >= m.sites {
                return Err(FloqError::config("run.cut", format!("must lie in 1..{}, got {cut}", m.sites)));
            }
        }
        positive("stability.probe_periods", self.stability.probe_periods)?;
        positive("stability.sample_every", self.stability.sample_every)?;
        Ok(())
    }

    pub fn local_space(&self) -> LocalSpace {
        match self.model.kind {
            ModelChoice::BoseHubbard => LocalSpace::Boson { n_max: self.n_max() },
            ModelChoice::Spin1Xxz => LocalSpace::Spin1,
            ModelChoice::Jch => LocalSpace::JaynesCummings { n_max_photons: self.n_max() },
            ModelChoice::SpinLadder => LocalSpace::LadderRung,
        }
    }

    /// Default cutoff: the particle number up to six sites, two beyond.
    fn n_max(&self) -> u8 {
        if let Some(n) = self.model.n_max {
            return n;
        }
        let n = self.model.charge.unwrap_or(self.model.sites as i32).max(1) as u8;
        if self.model.sites <= 6 {
            n
        } else {
            2
        }
    }

    /// Initial configuration: unit filling, all spins `m = 0`, one lower
    /// polariton per site, or alternating rung polarization for the ladder.
    pub fn initial_labels(&self) -> Vec<Label> {
        if let Some(init) = &self.model.initial {
            return init.clone();
        }
        let l = self.model.sites;
        match self.model.kind {
            ModelChoice::BoseHubbard | ModelChoice::Jch => vec![1; l],
            ModelChoice::Spin1Xxz => vec![0; l],
            ModelChoice::SpinLadder => (0..l).map(|j| if j % 2 == 0 { 2 } else { 1 }).collect(),
        }
    }

    pub fn model_params(&self) -> ModelParams {
        let p = &self.parameters;
        match self.model.kind {
            ModelChoice::BoseHubbard => ModelParams::BoseHubbard { u: p.u, omega: p.omega },
            ModelChoice::Spin1Xxz => ModelParams::Spin1Xxz { u: p.u },
            ModelChoice::Jch => ModelParams::Jch {
                g: p.g,
                omega: p.omega,
                omega0: p.omega + p.delta,
            },
            ModelChoice::SpinLadder => ModelParams::SpinLadder {
                u: p.u,
                rung_coupling: p.rung_coupling.unwrap_or(0.5 * p.u),
            },
        }
    }

    /// Nominal drive frequency after resolving `integer`/`fractional`.
    pub fn resolved_omega(&self) -> Result<f64> {
        let params = self.model_params();
        let w = match self.drive.kind {
            DriveChoice::Integer => params.integer_resonance(),
            DriveChoice::Fractional => params.fractional_resonance(),
            DriveChoice::Custom => self.drive.omega.unwrap_or(0.0),
        };
        positive("drive.omega", w)?;
        Ok(w)
    }

    pub fn drive_spec(&self) -> Result<DriveSpec> {
        Ok(DriveSpec::new(self.parameters.j0, self.resolved_omega()?)?.with_detuning(self.drive.delta_omega_rel))
    }

    /// Build the model in its working basis: jch in the polariton frame, then
    /// the parity block when one is requested.
    pub fn build_model(&self) -> Result<DrivenModel> {
        let drive = self.drive_spec()?;
        let local = self.local_space();
        let init = self.initial_labels();
        let init_cfg = crate::basis::Configuration::new(init, &local)
            .map_err(|e| FloqError::config("model.initial", e.to_string()))?;
        let charges = init_cfg.charges(&local);
        let l = self.model.sites;
        let p = &self.parameters;
        let charge = self.model.charge.unwrap_or(charges[0]);
        let model = match self.model.kind {
            ModelChoice::BoseHubbard => build_bose_hubbard(l, charge, self.n_max(), p.u, p.omega, drive)?,
            ModelChoice::Spin1Xxz => build_spin1_xxz_sector(l, charge, p.u, drive)?,
            ModelChoice::Jch => {
                build_jch(l, charge, self.n_max(), p.g, p.omega, p.omega + p.delta, drive)?.to_polariton_frame()?
            }
            ModelChoice::SpinLadder => {
                let legs = self.model.leg_charges.unwrap_or([charges[0], charges[1]]);
                let ModelParams::SpinLadder { rung_coupling, .. } = self.model_params() else {
                    unreachable!()
                };
                build_spin_ladder(l, legs, rung_coupling, p.u, drive)?
            }
        };
        match self.model.parity {
            Some(sign) => model.restrict_parity(sign),
            None => Ok(model),
        }
    }

    pub fn cut(&self) -> usize {
        self.run.cut.unwrap_or(self.model.sites / 2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TRIMER: &str = r#"
[model]
kind = "bose_hubbard"
sites = 3
n_max = 3
parity = 1

[drive]
kind = "fractional"

[run]
periods = 5
observables = ["populations", "entropy"]
"#;

    #[test]
    fn parses_and_resolves() {
        let cfg = ExperimentConfig::from_toml(TRIMER).unwrap();
        assert_eq!(cfg.resolved_omega().unwrap(), 0.5 * DEFAULT_U);
        let m = cfg.build_model().unwrap();
        assert_eq!(m.dim(), 6);
        let again = ExperimentConfig::from_toml(&cfg.to_toml()).unwrap();
        assert_eq!(again, cfg);
    }

    #[test]
    fn field_level_errors() {
        let bad = TRIMER.replace("sites = 3", "sites = 1");
        let e = ExperimentConfig::from_toml(&bad).unwrap_err();
        assert!(e.to_string().contains("model.sites"), "{e}");
        let bad = TRIMER.replace("periods = 5", "periods = 5\nbogus = 1");
        assert!(ExperimentConfig::from_toml(&bad).unwrap_err().is_config());
        let bad = TRIMER.replace("kind = \"fractional\"", "kind = \"custom\"");
        let e = ExperimentConfig::from_toml(&bad).unwrap_err();
        assert!(e.to_string().contains("drive.omega"), "{e}");
    }

    #[test]
    fn boson_cutoff_policy() {
        let mut cfg = ExperimentConfig::from_toml(TRIMER).unwrap();
        cfg.model.n_max = None;
        cfg.model.sites = 8;
        assert_eq!(cfg.local_space(), LocalSpace::Boson { n_max: 2 });
        cfg.model.sites = 5;
        cfg.model.charge = Some(5);
        assert_eq!(cfg.local_space(), LocalSpace::Boson { n_max: 5 });
    }

    #[test]
    fn jch_integer_frequency() {
        let cfg = ExperimentConfig::from_toml(
            "[model]\nkind = \"jch\"\nsites = 3\nn_max = 3\n[parameters]\ng = 1.0\n",
        )
        .unwrap();
        assert!((cfg.resolved_omega().unwrap() - (2.0 - 2f64.sqrt())).abs() < 1e-15);
    }
}
