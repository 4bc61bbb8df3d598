//! Driven lattice Hamiltonians `H(t) = H0 + s·J0·cos(Ωt)·K`.
//!
//! Every model is stored as a static part (diagonal, or sparse for the bare
//! Jaynes-Cummings lattice), a real symmetric hopping operator `K` and a
//! [`DriveSpec`]. All energies are in units of ħω with ħ = 1.

use std::f64::consts::PI;

use crate::basis::{
    enumerate_sector, jc_components, parity_project, Configuration, Label, LocalSpace, SectorBasis,
    WorkingBasis,
};
use crate::error::{FloqError, Result};
use crate::linalg::{CsrMatrix, TripletBuilder, C64, ZERO};

/// Default bare hopping rate, in units of ω.
pub const DEFAULT_J0: f64 = 0.01;
/// Default on-site interaction, `40·J0`.
pub const DEFAULT_U: f64 = 0.4;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DriveSpec {
    pub j0: f64,
    /// Nominal drive angular frequency.
    pub omega: f64,
    /// Sign in front of `J0·cos(Ωt)·K`.
    pub hop_sign: f64,
    /// Relative detuning δΩ/Ω applied on top of `omega`.
    pub delta_rel: f64,
}

impl DriveSpec {
    pub fn new(j0: f64, omega: f64) -> Result<Self> {
        if !(j0 >= 0.0 && j0.is_finite()) {
            return Err(FloqError::param("j0", format!("must be non-negative, got {j0}")));
        }
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(FloqError::param("omega", format!("must be positive, got {omega}")));
        }
        Ok(Self {
            j0,
            omega,
            hop_sign: -1.0,
            delta_rel: 0.0,
        })
    }

    pub fn with_detuning(mut self, delta_rel: f64) -> Self {
        self.delta_rel = delta_rel;
        self
    }

    pub fn with_hop_sign(mut self, sign: f64) -> Self {
        self.hop_sign = sign.signum();
        self
    }

    pub fn omega_eff(&self) -> f64 {
        self.omega * (1.0 + self.delta_rel)
    }

    /// Nominal period `2π/Ω`.
    pub fn period(&self) -> f64 {
        2.0 * PI / self.omega
    }

    /// Period of the detuned drive.
    pub fn period_eff(&self) -> f64 {
        2.0 * PI / self.omega_eff()
    }

    /// Coefficient of `K` at time `t`.
    pub fn coefficient(&self, t: f64) -> f64 {
        self.hop_sign * self.j0 * (self.omega_eff() * t).cos()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ModelKind {
    BoseHubbard,
    Spin1Xxz,
    Jch,
    SpinLadder,
}

impl ModelKind {
    pub fn hop_sign(&self) -> f64 {
        match self {
            ModelKind::Spin1Xxz => 1.0,
            _ => -1.0,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ModelKind::BoseHubbard => "bose_hubbard",
            ModelKind::Spin1Xxz => "spin1_xxz",
            ModelKind::Jch => "jch",
            ModelKind::SpinLadder => "spin_ladder",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ModelParams {
    BoseHubbard { u: f64, omega: f64 },
    Spin1Xxz { u: f64 },
    Jch { g: f64, omega: f64, omega0: f64 },
    SpinLadder { u: f64, rung_coupling: f64 },
}

impl ModelParams {
    /// The anharmonicity scale: `U`, or `g` for the Jaynes-Cummings lattice.
    pub fn scale(&self) -> f64 {
        match *self {
            ModelParams::BoseHubbard { u, .. } => u,
            ModelParams::Spin1Xxz { u } => u,
            ModelParams::Jch { g, .. } => g,
            ModelParams::SpinLadder { u, .. } => u,
        }
    }

    /// Drive frequency of the integer resonance.
    pub fn integer_resonance(&self) -> f64 {
        match *self {
            ModelParams::Jch { g, omega, omega0 } => jch_integer_resonance(g, omega0 - omega),
            _ => self.scale(),
        }
    }

    pub fn fractional_resonance(&self) -> f64 {
        0.5 * self.integer_resonance()
    }
}

/// Static part of the Hamiltonian in the working basis.
#[derive(Clone, Debug)]
pub enum StaticPart {
    Diagonal(Vec<f64>),
    Sparse(CsrMatrix),
}

impl StaticPart {
    pub fn to_csr(&self) -> CsrMatrix {
        match self {
            StaticPart::Diagonal(d) => CsrMatrix::from_diagonal(d),
            StaticPart::Sparse(m) => m.clone(),
        }
    }

    pub fn expectation(&self, amps: &[C64]) -> f64 {
        match self {
            StaticPart::Diagonal(d) => d.iter().zip(amps).map(|(e, a)| e * a.norm_sqr()).sum(),
            StaticPart::Sparse(m) => {
                let hv = m.apply(amps);
                amps.iter().zip(&hv).map(|(a, b)| (a.conj() * b).re).sum()
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Frame {
    Bare,
    /// Local Jaynes-Cummings blocks diagonalized.
    Polariton,
}

#[derive(Clone, Debug)]
pub struct DrivenModel {
    kind: ModelKind,
    params: ModelParams,
    basis: WorkingBasis,
    h0: StaticPart,
    h_hop: CsrMatrix,
    drive: DriveSpec,
    frame: Frame,
}

impl DrivenModel {
    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn basis(&self) -> &WorkingBasis {
        &self.basis
    }

    pub fn sector(&self) -> &SectorBasis {
        self.basis.sector()
    }

    pub fn local(&self) -> &LocalSpace {
        self.basis.sector().local()
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn h0(&self) -> &StaticPart {
        &self.h0
    }

    pub fn h0_diag(&self) -> Option<&[f64]> {
        match &self.h0 {
            StaticPart::Diagonal(d) => Some(d),
            StaticPart::Sparse(_) => None,
        }
    }

    pub fn h_hop(&self) -> &CsrMatrix {
        &self.h_hop
    }

    pub fn drive(&self) -> &DriveSpec {
        &self.drive
    }

    pub fn frame(&self) -> Frame {
        self.frame
    }

    /// Same Hamiltonian with another drive; the model's hopping sign is kept.
    pub fn with_drive(&self, drive: DriveSpec) -> Self {
        let mut m = self.clone();
        m.drive = drive.with_hop_sign(self.drive.hop_sign);
        m
    }

    /// `H(t) = H0 + s·J0·cos(Ω(1+δ)t)·K`.
    pub fn hamiltonian_at(&self, t: f64) -> CsrMatrix {
        self.h0.to_csr().add_scaled(&self.h_hop, self.drive.coefficient(t))
    }

    /// Restrict to the reflection-parity block of sign `sign`.
    pub fn restrict_parity(&self, sign: i8) -> Result<Self> {
        let sector = match &self.basis {
            WorkingBasis::Sector(s) => s.clone(),
            WorkingBasis::Parity { .. } => {
                return Err(FloqError::BasisMismatch("model is already parity restricted".into()))
            }
        };
        let parity = parity_project(&sector, sign)?;
        let p = parity.isometry();
        let h_hop = self.h_hop.congruence(&p).pruned(1e-14);
        let h0 = match &self.h0 {
            StaticPart::Diagonal(d) => StaticPart::Diagonal(
                parity.members().iter().map(|m| d[m.rep]).collect(),
            ),
            StaticPart::Sparse(m) => StaticPart::Sparse(m.congruence(&p).pruned(1e-14)),
        };
        Ok(Self {
            basis: WorkingBasis::Parity { sector, parity },
            h0,
            h_hop,
            ..self.clone()
        })
    }

    /// Rotate a bare Jaynes-Cummings lattice into the local polariton basis,
    /// where the static part becomes diagonal.
    pub fn to_polariton_frame(&self) -> Result<Self> {
        let ModelParams::Jch { g, omega, omega0 } = self.params else {
            return Err(FloqError::param("frame", "polariton frame exists only for the jch model"));
        };
        if self.frame == Frame::Polariton {
            return Ok(self.clone());
        }
        let sector = self.sector();
        let LocalSpace::JaynesCummings { n_max_photons } = *sector.local() else {
            unreachable!("jch model on a non-JC local space")
        };
        let local = LocalPolaritons::new(g, omega, omega0, n_max_photons);
        let v_sector = polariton_transform(sector, &local);
        let v = match &self.basis {
            WorkingBasis::Sector(_) => v_sector,
            WorkingBasis::Parity { parity, .. } => v_sector.congruence(&parity.isometry()),
        };
        let h_hop = self.h_hop.congruence(&v).pruned(1e-14);
        let energies: Vec<f64> = match &self.basis {
            WorkingBasis::Sector(s) => s
                .configs()
                .iter()
                .map(|c| c.labels().iter().map(|&l| local.energy(l)).sum())
                .collect(),
            WorkingBasis::Parity { sector, parity } => parity
                .members()
                .iter()
                .map(|m| {
                    sector.config(m.rep).labels().iter().map(|&l| local.energy(l)).sum()
                })
                .collect(),
        };
        Ok(Self {
            h0: StaticPart::Diagonal(energies),
            h_hop,
            frame: Frame::Polariton,
            ..self.clone()
        })
    }

    /// `⟨ψ|H0|ψ⟩` for amplitudes over the working basis.
    pub fn static_energy(&self, amps: &[C64]) -> f64 {
        self.h0.expectation(amps)
    }

    /// Unit vector on one configuration, in the working basis.
    pub fn product_state(&self, labels: &[Label]) -> Result<Vec<C64>> {
        let sector = self.sector();
        let c = Configuration::new(labels.to_vec(), sector.local())?;
        let amps = sector.basis_state(&c)?;
        let out = self.basis.from_sector_amplitudes(&amps);
        let n = crate::linalg::norm(&out);
        if n < 1e-12 {
            return Err(FloqError::NotInSector(format!("{c} has no weight in the parity block")));
        }
        Ok(out.into_iter().map(|a| a / n).collect())
    }

    /// The named trimer states ψ0, ψ1, … in the working basis.
    ///
    /// Bose-Hubbard (N = 3): six states, spin-1 (S_z = 0): four, and the
    /// Jaynes-Cummings trimer in the polariton frame: four lower-branch states.
    pub fn trimer_states(&self) -> Result<Vec<Vec<C64>>> {
        if self.sector().n_sites() != 3 {
            return Err(FloqError::param("sites", "named states exist only for the trimer"));
        }
        let sets: Vec<Vec<[Label; 3]>> = match self.kind {
            ModelKind::BoseHubbard => vec![
                vec![[1, 1, 1]],
                vec![[0, 2, 1], [1, 2, 0]],
                vec![[2, 0, 1], [1, 0, 2]],
                vec![[0, 1, 2], [2, 1, 0]],
                vec![[0, 3, 0]],
                vec![[3, 0, 0], [0, 0, 3]],
            ],
            ModelKind::Spin1Xxz => vec![
                vec![[0, 0, 0]],
                vec![[1, -1, 0], [0, -1, 1]],
                vec![[-1, 1, 0], [0, 1, -1]],
                vec![[1, 0, -1], [-1, 0, 1]],
            ],
            ModelKind::Jch => {
                if self.frame != Frame::Polariton {
                    return Err(FloqError::NonDiagonalStatic);
                }
                // lower polaritons |e,−⟩ sit at slot 2e − 1, the vacuum at 0
                vec![
                    vec![[1, 1, 1]],
                    vec![[3, 0, 1], [1, 0, 3]],
                    vec![[0, 3, 1], [1, 3, 0]],
                    vec![[3, 1, 0], [0, 1, 3]],
                ]
            }
            ModelKind::SpinLadder => {
                return Err(FloqError::param("model", "no named trimer states for the ladder"))
            }
        };
        let sector = self.sector();
        sets.into_iter()
            .map(|configs| {
                let mut amps = vec![ZERO; sector.dim()];
                let w = 1.0 / (configs.len() as f64).sqrt();
                for labels in configs {
                    let k = sector.index_of(&Configuration::new(labels.to_vec(), sector.local())?)?;
                    amps[k] = C64::new(w, 0.0);
                }
                Ok(self.basis.from_sector_amplitudes(&amps))
            })
            .collect()
    }
}

/// Ladder action of the hopping operator on one local label.
///
/// `channel` selects the leg for ladders and is ignored otherwise.
fn raise(local: &LocalSpace, label: Label, channel: usize) -> Option<(Label, f64)> {
    match *local {
        LocalSpace::Boson { n_max } => {
            (label < n_max as Label).then(|| (label + 1, ((label + 1) as f64).sqrt()))
        }
        LocalSpace::Spin1 => {
            let m = label as f64;
            (label < 1).then(|| (label + 1, (2.0 - m * (m + 1.0)).sqrt()))
        }
        LocalSpace::JaynesCummings { n_max_photons } => {
            let (n, _) = jc_components(label);
            (n < n_max_photons).then(|| (label + 2, ((n + 1) as f64).sqrt()))
        }
        LocalSpace::LadderRung => {
            let bit = if channel == 0 { 2 } else { 1 };
            (label & bit == 0).then_some((label | bit, 1.0))
        }
    }
}

fn lower(local: &LocalSpace, label: Label, channel: usize) -> Option<(Label, f64)> {
    match *local {
        LocalSpace::Boson { .. } => (label > 0).then(|| (label - 1, (label as f64).sqrt())),
        LocalSpace::Spin1 => {
            let m = label as f64;
            (label > -1).then(|| (label - 1, (2.0 - m * (m - 1.0)).sqrt()))
        }
        LocalSpace::JaynesCummings { .. } => {
            let (n, _) = jc_components(label);
            (n > 0).then(|| (label - 2, (n as f64).sqrt()))
        }
        LocalSpace::LadderRung => {
            let bit = if channel == 0 { 2 } else { 1 };
            (label & bit != 0).then_some((label & !bit, 1.0))
        }
    }
}

/// `K = Σ_j Σ_channels (A†_j A_{j+1} + A†_{j+1} A_j)` over a sector.
pub fn hopping_operator(basis: &SectorBasis) -> CsrMatrix {
    let local = *basis.local();
    let channels = if local == LocalSpace::LadderRung { 2 } else { 1 };
    let mut b = TripletBuilder::new(basis.dim(), basis.dim());
    let mut labels: Vec<Label> = Vec::with_capacity(basis.n_sites());
    for (col, config) in basis.configs().iter().enumerate() {
        for j in 0..basis.n_sites() - 1 {
            for ch in 0..channels {
                for (up, down) in [(j, j + 1), (j + 1, j)] {
                    let src = config.labels();
                    let Some((l_down, a_down)) = lower(&local, src[down], ch) else {
                        continue;
                    };
                    let Some((l_up, a_up)) = raise(&local, src[up], ch) else {
                        continue;
                    };
                    labels.clear();
                    labels.extend_from_slice(src);
                    labels[down] = l_down;
                    labels[up] = l_up;
                    if let Some(row) = basis.find(&labels) {
                        b.push(row, col, a_up * a_down);
                    }
                }
            }
        }
    }
    b.build()
}

fn sector_for(n_sites: usize, charges: &[i32], local: LocalSpace) -> Result<SectorBasis> {
    enumerate_sector(n_sites, charges, local)
}

fn check_positive(field: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(FloqError::param(field, format!("must be positive, got {v}")))
    }
}

/// Bose-Hubbard chain: `H0 = Σ ω n + (U/2) n(n−1)`, drive sign −1.
pub fn build_bose_hubbard(
    n_sites: usize,
    n_particles: i32,
    n_max: u8,
    u: f64,
    omega: f64,
    drive: DriveSpec,
) -> Result<DrivenModel> {
    check_positive("u", u)?;
    let basis = sector_for(n_sites, &[n_particles], LocalSpace::Boson { n_max })?;
    let h0 = basis
        .configs()
        .iter()
        .map(|c| {
            c.labels()
                .iter()
                .map(|&n| {
                    let n = n as f64;
                    omega * n + 0.5 * u * n * (n - 1.0)
                })
                .sum()
        })
        .collect();
    Ok(finish(ModelKind::BoseHubbard, ModelParams::BoseHubbard { u, omega }, basis, StaticPart::Diagonal(h0), drive))
}

/// Spin-1 XXZ chain in the zero-magnetization sector: `H0 = (U/2) Σ m²`, drive sign +1.
pub fn build_spin1_xxz(n_sites: usize, u: f64, drive: DriveSpec) -> Result<DrivenModel> {
    build_spin1_xxz_sector(n_sites, 0, u, drive)
}

pub fn build_spin1_xxz_sector(n_sites: usize, sz: i32, u: f64, drive: DriveSpec) -> Result<DrivenModel> {
    check_positive("u", u)?;
    let basis = sector_for(n_sites, &[sz], LocalSpace::Spin1)?;
    let h0 = basis
        .configs()
        .iter()
        .map(|c| c.labels().iter().map(|&m| 0.5 * u * (m as f64).powi(2)).sum())
        .collect();
    Ok(finish(ModelKind::Spin1Xxz, ModelParams::Spin1Xxz { u }, basis, StaticPart::Diagonal(h0), drive))
}

/// Jaynes-Cummings-Hubbard chain with photon hopping, in the bare basis.
///
/// The static part holds the local 2×2 light-matter blocks and is not diagonal;
/// call [`DrivenModel::to_polariton_frame`] before any rotating-frame analysis.
pub fn build_jch(
    n_sites: usize,
    n_excitations: i32,
    n_max_photons: u8,
    g: f64,
    omega: f64,
    omega0: f64,
    drive: DriveSpec,
) -> Result<DrivenModel> {
    check_positive("g", g)?;
    let local = LocalSpace::JaynesCummings { n_max_photons };
    let basis = sector_for(n_sites, &[n_excitations], local)?;
    let mut b = TripletBuilder::new(basis.dim(), basis.dim());
    let mut labels: Vec<Label> = Vec::with_capacity(n_sites);
    for (col, config) in basis.configs().iter().enumerate() {
        let src = config.labels();
        let diag: f64 = src
            .iter()
            .map(|&l| {
                let (n, s) = jc_components(l);
                omega * n as f64 + omega0 * s as f64
            })
            .sum();
        b.push(col, col, diag);
        for j in 0..n_sites {
            let (n, s) = jc_components(src[j]);
            // g(σ⁺a + σ⁻a†): |n,↓⟩ ↔ |n−1,↑⟩ with amplitude g√n
            let target = match (n, s) {
                (n, 0) if n > 0 => Some((src[j] - 1, g * (n as f64).sqrt())),
                (n, 1) if n < n_max_photons => Some((src[j] + 1, g * ((n + 1) as f64).sqrt())),
                _ => None,
            };
            if let Some((l, amp)) = target {
                labels.clear();
                labels.extend_from_slice(src);
                labels[j] = l;
                if let Some(row) = basis.find(&labels) {
                    b.push(row, col, amp);
                }
            }
        }
    }
    Ok(finish(
        ModelKind::Jch,
        ModelParams::Jch { g, omega, omega0 },
        basis,
        StaticPart::Sparse(b.build()),
        drive,
    ))
}

/// Two-leg spin-1/2 ladder with rung coupling `c·Σ σz_a σz_b` and intra-leg
/// XX hopping. Both leg magnetizations are conserved; `up_counts` fixes the
/// number of up spins on legs a and b.
pub fn build_spin_ladder(
    n_rungs: usize,
    up_counts: [i32; 2],
    rung_coupling: f64,
    u: f64,
    drive: DriveSpec,
) -> Result<DrivenModel> {
    let basis = sector_for(n_rungs, &up_counts, LocalSpace::LadderRung)?;
    let h0 = basis
        .configs()
        .iter()
        .map(|c| {
            c.labels()
                .iter()
                .map(|&l| {
                    let za = 2.0 * (l >> 1) as f64 - 1.0;
                    let zb = 2.0 * (l & 1) as f64 - 1.0;
                    rung_coupling * za * zb
                })
                .sum()
        })
        .collect();
    Ok(finish(
        ModelKind::SpinLadder,
        ModelParams::SpinLadder { u, rung_coupling },
        basis,
        StaticPart::Diagonal(h0),
        drive,
    ))
}

fn finish(kind: ModelKind, params: ModelParams, basis: SectorBasis, h0: StaticPart, drive: DriveSpec) -> DrivenModel {
    let h_hop = hopping_operator(&basis);
    DrivenModel {
        kind,
        params,
        basis: WorkingBasis::Sector(basis),
        h0,
        h_hop,
        drive: drive.with_hop_sign(kind.hop_sign()),
        frame: Frame::Bare,
    }
}

/// `χ(n) = √(Δ²/4 + g² n)`.
pub fn chi(n: u32, g: f64, delta: f64) -> f64 {
    (0.25 * delta * delta + g * g * n as f64).sqrt()
}

/// `E±_n = nω + Δ/2 ± χ(n)`.
pub fn polariton_energy(n: u32, plus: bool, g: f64, omega: f64, delta: f64) -> f64 {
    let s = if plus { 1.0 } else { -1.0 };
    n as f64 * omega + 0.5 * delta + s * chi(n, g, delta)
}

/// Integer resonance of the Jaynes-Cummings lattice: the energy cost of
/// `|1,−⟩|1,−⟩ → |2,−⟩|0⟩`, `2χ(1) − χ(2) − Δ/2`. Equals `(2 − √2)g` at Δ = 0.
pub fn jch_integer_resonance(g: f64, delta: f64) -> f64 {
    2.0 * chi(1, g, delta) - chi(2, g, delta) - 0.5 * delta
}

/// Mixing coefficients `(γ_{n+}, ρ_{n+})` of the upper polariton
/// `|n,+⟩ = γ|↓,n⟩ + ρ|↑,n−1⟩`; the lower one is `(ρ, −γ)`.
pub fn polariton_mixing(n: u32, g: f64, delta: f64) -> (f64, f64) {
    let theta = (2.0 * g * (n as f64).sqrt()).atan2(delta);
    ((0.5 * theta).sin(), (0.5 * theta).cos())
}

/// Polariton hopping amplitude
/// `t_n^{αα'} = √n γ_{n−1,α} γ_{n,α'} + √(n−1) ρ_{n−1,α} ρ_{n,α'}`.
pub fn polariton_hopping(n: u32, alpha: bool, alpha_p: bool, g: f64, delta: f64) -> f64 {
    let coeffs = |m: u32, plus: bool| -> (f64, f64) {
        if m == 0 {
            // |0,−⟩ = |↓,0⟩, |0,+⟩ is unphysical
            return if plus { (0.0, 0.0) } else { (1.0, 0.0) };
        }
        let (gp, rp) = polariton_mixing(m, g, delta);
        if plus {
            (gp, rp)
        } else {
            (rp, -gp)
        }
    };
    let (g1, r1) = coeffs(n - 1, alpha);
    let (g2, r2) = coeffs(n, alpha_p);
    (n as f64).sqrt() * g1 * g2 + ((n - 1) as f64).sqrt() * r1 * r2
}

/// Local polariton data for one Jaynes-Cummings site.
#[derive(Clone, Debug)]
struct LocalPolaritons {
    /// `columns[slot]` lists `(bare label, amplitude)`.
    columns: Vec<Vec<(Label, f64)>>,
    energies: Vec<f64>,
}

impl LocalPolaritons {
    fn new(g: f64, omega: f64, omega0: f64, n_max_photons: u8) -> Self {
        let delta = omega0 - omega;
        let d = 2 * (n_max_photons as usize + 1);
        let mut columns = vec![Vec::new(); d];
        let mut energies = vec![0.0; d];
        columns[0] = vec![(0, 1.0)];
        for e in 1..=n_max_photons as u32 {
            let (gp, rp) = polariton_mixing(e, g, delta);
            let down = (2 * e) as Label;
            let up = down - 1;
            columns[2 * e as usize - 1] = vec![(down, rp), (up, -gp)];
            columns[2 * e as usize] = vec![(down, gp), (up, rp)];
            energies[2 * e as usize - 1] = polariton_energy(e, false, g, omega, delta);
            energies[2 * e as usize] = polariton_energy(e, true, g, omega, delta);
        }
        // |n_max,↑⟩ has no partner inside the truncated space
        columns[d - 1] = vec![((d - 1) as Label, 1.0)];
        energies[d - 1] = n_max_photons as f64 * omega + omega0;
        Self { columns, energies }
    }

    fn energy(&self, slot: Label) -> f64 {
        self.energies[slot as usize]
    }
}

/// Sector-level orthogonal map whose columns are polariton product states.
fn polariton_transform(basis: &SectorBasis, local: &LocalPolaritons) -> CsrMatrix {
    let mut b = TripletBuilder::new(basis.dim(), basis.dim());
    for (col, config) in basis.configs().iter().enumerate() {
        let mut partial: Vec<(Vec<Label>, f64)> = vec![(Vec::new(), 1.0)];
        for &slot in config.labels() {
            let mut next = Vec::with_capacity(partial.len() * 2);
            for (labels, amp) in &partial {
                for &(bare, a) in &local.columns[slot as usize] {
                    let mut l = labels.clone();
                    l.push(bare);
                    next.push((l, amp * a));
                }
            }
            partial = next;
        }
        for (labels, amp) in partial {
            if let Some(row) = basis.find(&labels) {
                b.push(row, col, amp);
            }
        }
    }
    b.build()
}

/// True when the last slot of a polariton-frame local space, the unpaired
/// `|n_max,↑⟩`, is occupied somewhere in the configuration.
pub fn touches_truncation(config: &Configuration, local: &LocalSpace) -> bool {
    let top = (local.dim() - 1) as Label;
    config.labels().contains(&top)
}
