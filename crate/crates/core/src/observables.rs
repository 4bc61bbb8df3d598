//! Diagnostics evaluated on evolved states.
//!
//! Functions taking a [`WorkingBasis`] expand parity-basis states to
//! configuration amplitudes first, so PR, entropy and occupations always refer
//! to the un-symmetrized configurations.

use std::collections::{BTreeMap, HashMap};

use crate::basis::{Label, LocalSpace, SectorBasis, WorkingBasis};
use crate::error::{FloqError, Result};
use crate::linalg::{inner, CMatrix, C64, ZERO};
use crate::models::DrivenModel;
use crate::propagate::StateVector;

/// Largest product space [`embed_product`] will allocate.
pub const MAX_PRODUCT_DIM: usize = 1 << 24;

fn same_basis(a: &StateVector, b: &StateVector) -> Result<()> {
    if a.basis() != b.basis() || a.dim() != b.dim() {
        return Err(FloqError::BasisMismatch("states live in different bases".into()));
    }
    Ok(())
}

fn check_in(basis: &WorkingBasis, psi: &StateVector) -> Result<()> {
    if psi.basis() != basis.id() || psi.dim() != basis.dim() {
        return Err(FloqError::BasisMismatch("state does not belong to this basis".into()));
    }
    Ok(())
}

/// `P_j = |⟨target_j|ψ⟩|²`.
pub fn populations(psi: &StateVector, targets: &[Vec<C64>]) -> Result<Vec<f64>> {
    targets
        .iter()
        .map(|t| {
            if t.len() != psi.dim() {
                return Err(FloqError::BasisMismatch("target has the wrong dimension".into()));
            }
            Ok(inner(t, psi.amps()).norm_sqr())
        })
        .collect()
}

/// `PR = 1/Σ|c_l|⁴` over configuration amplitudes.
pub fn participation_ratio(config_amps: &[C64]) -> f64 {
    1.0 / config_amps.iter().map(|c| c.norm_sqr().powi(2)).sum::<f64>()
}

/// PR of a state of `basis`, expanded to configurations.
pub fn participation_ratio_in(basis: &WorkingBasis, psi: &StateVector) -> Result<f64> {
    check_in(basis, psi)?;
    Ok(participation_ratio(&basis.to_sector_amplitudes(psi.amps())))
}

/// Number of configurations with `|c_l|² > threshold`.
pub fn configuration_count(basis: &WorkingBasis, psi: &StateVector, threshold: f64) -> Result<usize> {
    check_in(basis, psi)?;
    Ok(basis
        .to_sector_amplitudes(psi.amps())
        .iter()
        .filter(|c| c.norm_sqr() > threshold)
        .count())
}

/// `|⟨ψ(0)|ψ(t)⟩|²`.
pub fn loschmidt_echo(psi0: &StateVector, psi_t: &StateVector) -> Result<f64> {
    same_basis(psi0, psi_t)?;
    Ok(inner(psi0.amps(), psi_t.amps()).norm_sqr())
}

/// `⟨n_j⟩` per site from configuration amplitudes.
pub fn site_occupations(sector: &SectorBasis, config_amps: &[C64]) -> Vec<f64> {
    let local = sector.local();
    let mut occ = vec![0.0; sector.n_sites()];
    for (c, a) in sector.configs().iter().zip(config_amps) {
        let p = a.norm_sqr();
        if p == 0.0 {
            continue;
        }
        for (o, &l) in occ.iter_mut().zip(c.labels()) {
            *o += p * local.occupation(l);
        }
    }
    occ
}

/// `C_j(t) = (2⟨n_j(t)⟩ − 1)(2⟨n_j(0)⟩ − 1)`.
pub fn autocorrelations(basis: &WorkingBasis, psi0: &StateVector, psi_t: &StateVector) -> Result<Vec<f64>> {
    same_basis(psi0, psi_t)?;
    check_in(basis, psi0)?;
    let n0 = site_occupations(basis.sector(), &basis.to_sector_amplitudes(psi0.amps()));
    let nt = site_occupations(basis.sector(), &basis.to_sector_amplitudes(psi_t.amps()));
    Ok(nt
        .iter()
        .zip(&n0)
        .map(|(a, b)| (2.0 * a - 1.0) * (2.0 * b - 1.0))
        .collect())
}

fn shannon(probs: impl Iterator<Item = f64>) -> f64 {
    probs.filter(|&p| p > 1e-300).map(|p| -p * p.ln()).sum()
}

/// Schmidt coefficients squared of the bipartition `[0, cut) | [cut, L)`.
///
/// Only left and right factors that occur in the sector are kept, which gives
/// the same non-zero singular values as the full product-space reshape.
pub fn schmidt_spectrum(sector: &SectorBasis, config_amps: &[C64], cut: usize) -> Result<Vec<f64>> {
    let l = sector.n_sites();
    if cut == 0 || cut >= l {
        return Err(FloqError::CutOutOfRange { cut, sites: l });
    }
    let mut left: HashMap<&[Label], usize> = HashMap::new();
    let mut right: HashMap<&[Label], usize> = HashMap::new();
    let mut entries = Vec::with_capacity(sector.dim());
    for (c, &a) in sector.configs().iter().zip(config_amps) {
        let (lp, rp) = c.labels().split_at(cut);
        let nl = left.len();
        let i = *left.entry(lp).or_insert(nl);
        let nr = right.len();
        let j = *right.entry(rp).or_insert(nr);
        entries.push((i, j, a));
    }
    let mut m = CMatrix::zeros(left.len(), right.len());
    for (i, j, a) in entries {
        m[(i, j)] += a;
    }
    let sv = m.singular_values();
    Ok(sv.iter().map(|s| s * s).collect())
}

/// `S = −Σ σ_k² ln σ_k²` across the cut after `cut` sites.
pub fn von_neumann_entropy(basis: &WorkingBasis, psi: &StateVector, cut: usize) -> Result<f64> {
    check_in(basis, psi)?;
    let amps = basis.to_sector_amplitudes(psi.amps());
    Ok(shannon(schmidt_spectrum(basis.sector(), &amps, cut)?.into_iter()))
}

/// Entropy of raw configuration amplitudes of a sector.
pub fn entropy_of_amplitudes(sector: &SectorBasis, config_amps: &[C64], cut: usize) -> Result<f64> {
    Ok(shannon(schmidt_spectrum(sector, config_amps, cut)?.into_iter()))
}

/// Index of a configuration in the full product space `d^L`, first site most significant.
fn product_index(local: &LocalSpace, labels: &[Label]) -> usize {
    let d = local.dim();
    labels.iter().fold(0usize, |acc, &l| acc * d + local.slot(l))
}

/// Embed sector amplitudes into the full product space.
pub fn embed_product(sector: &SectorBasis, config_amps: &[C64]) -> Result<Vec<C64>> {
    let d = sector.local().dim();
    let dim = (d as f64).powi(sector.n_sites() as i32);
    if dim > MAX_PRODUCT_DIM as f64 {
        return Err(FloqError::SizeLimit {
            dim: dim as usize,
            limit: MAX_PRODUCT_DIM,
        });
    }
    let mut out = vec![ZERO; dim as usize];
    for (c, &a) in sector.configs().iter().zip(config_amps) {
        out[product_index(sector.local(), c.labels())] = a;
    }
    Ok(out)
}

/// Inverse of [`embed_product`]; weight outside the sector is dropped.
pub fn restrict_product(sector: &SectorBasis, full: &[C64]) -> Vec<C64> {
    sector
        .configs()
        .iter()
        .map(|c| full[product_index(sector.local(), c.labels())])
        .collect()
}

/// Named time series with a fixed key set and strictly increasing times.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ObservableSeries {
    keys: Vec<String>,
    times: Vec<f64>,
    rows: Vec<Vec<f64>>,
}

impl ObservableSeries {
    pub fn new(keys: Vec<String>) -> Self {
        Self {
            keys,
            times: Vec::new(),
            rows: Vec::new(),
        }
    }

    pub fn keys(&self) -> &[String] {
        &self.keys
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn push(&mut self, t: f64, values: Vec<f64>) -> Result<()> {
        if values.len() != self.keys.len() {
            return Err(FloqError::param(
                "series",
                format!("expected {} values, got {}", self.keys.len(), values.len()),
            ));
        }
        if self.times.last().is_some_and(|&last| t <= last) {
            return Err(FloqError::param("series", format!("time {t} is not increasing")));
        }
        self.times.push(t);
        self.rows.push(values);
        Ok(())
    }

    /// Insert from a map; keys must match the series exactly.
    pub fn push_map(&mut self, t: f64, record: &BTreeMap<String, f64>) -> Result<()> {
        if record.len() != self.keys.len() {
            return Err(FloqError::param("series", "record key set differs"));
        }
        let values = self
            .keys
            .iter()
            .map(|k| {
                record
                    .get(k)
                    .copied()
                    .ok_or_else(|| FloqError::param("series", format!("missing key {k}")))
            })
            .collect::<Result<Vec<_>>>()?;
        self.push(t, values)
    }

    pub fn column(&self, key: &str) -> Option<Vec<f64>> {
        let k = self.keys.iter().position(|x| x == key)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }
}

/// `ε_n = ⟨ψ(nT)|H0|ψ(nT)⟩` and `(ε_{n+1} − ε_n)/T` for stroboscopic states.
/// The last state only enters through the final difference.
pub fn heating_rate_series(states: &[StateVector], model: &DrivenModel, period: f64) -> Result<ObservableSeries> {
    let eps: Vec<f64> = states
        .iter()
        .map(|s| {
            check_in(model.basis(), s)?;
            Ok(model.static_energy(s.amps()))
        })
        .collect::<Result<_>>()?;
    let mut series = ObservableSeries::new(vec!["eps_n".into(), "rate".into()]);
    for n in 0..eps.len().saturating_sub(1) {
        series.push(n as f64, vec![eps[n], (eps[n + 1] - eps[n]) / period])?;
    }
    Ok(series)
}
