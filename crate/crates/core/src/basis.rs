//! Symmetry-resolved many-body bases.
//!
//! A [`SectorBasis`] enumerates every configuration of `L` sites with a fixed
//! set of conserved charges (total particle number, total magnetization,
//! per-leg magnetization for ladders) in lexicographic order. A
//! [`ParityBasis`] symmetrizes it under the reflection `|m1…mL⟩ → |mL…m1⟩`.

use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};

use crate::error::{FloqError, Result};
use crate::linalg::{CsrMatrix, TripletBuilder, C64, ZERO};

/// Upper bound on the number of configurations in a sector.
pub const MAX_SECTOR_DIM: usize = 10_000_000;

pub type Label = i8;

/// Local Hilbert space of one lattice site.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LocalSpace {
    /// Occupations `0..=n_max`.
    Boson { n_max: u8 },
    /// Magnetic quantum numbers `-1, 0, 1`.
    Spin1,
    /// Photon number `n ∈ 0..=n_max_photons` times a two-level system.
    ///
    /// Labels are ordered by local excitation number: label `2n + s` with
    /// `s = 1` for the excited emitter, so label `2e − 1` is `|e−1, ↑⟩` and
    /// label `2e` is `|e, ↓⟩`. In the polariton frame the same slots hold the
    /// lower (`2e − 1`) and upper (`2e`) dressed states of excitation `e`.
    JaynesCummings { n_max_photons: u8 },
    /// One rung of a two-leg spin-1/2 ladder: label `2a + b` with `a, b ∈ {0, 1}`
    /// the up-spin indicators on legs a and b.
    LadderRung,
}

impl LocalSpace {
    pub fn dim(&self) -> usize {
        match *self {
            LocalSpace::Boson { n_max } => n_max as usize + 1,
            LocalSpace::Spin1 => 3,
            LocalSpace::JaynesCummings { n_max_photons } => 2 * (n_max_photons as usize + 1),
            LocalSpace::LadderRung => 4,
        }
    }

    pub fn min_label(&self) -> Label {
        match self {
            LocalSpace::Spin1 => -1,
            _ => 0,
        }
    }

    /// All labels in ascending order.
    pub fn labels(&self) -> Vec<Label> {
        let lo = self.min_label();
        (0..self.dim()).map(|k| lo + k as Label).collect()
    }

    pub fn contains(&self, label: Label) -> bool {
        let lo = self.min_label();
        label >= lo && ((label - lo) as usize) < self.dim()
    }

    /// Position of a label inside the local space, `0..dim`.
    pub fn slot(&self, label: Label) -> usize {
        (label - self.min_label()) as usize
    }

    pub fn n_charges(&self) -> usize {
        match self {
            LocalSpace::LadderRung => 2,
            _ => 1,
        }
    }

    /// Conserved charge `k` carried by a local label.
    pub fn charge(&self, label: Label, k: usize) -> i32 {
        match *self {
            LocalSpace::Boson { .. } | LocalSpace::Spin1 => label as i32,
            LocalSpace::JaynesCummings { .. } => {
                let (n, s) = jc_components(label);
                (n + s) as i32
            }
            LocalSpace::LadderRung => {
                if k == 0 {
                    (label >> 1) as i32
                } else {
                    (label & 1) as i32
                }
            }
        }
    }

    /// Local "occupation" used by autocorrelation functions: bosons `n`,
    /// spin-1 `m + 1`, Jaynes-Cummings excitations, ladder up-spins per rung.
    pub fn occupation(&self, label: Label) -> f64 {
        match *self {
            LocalSpace::Boson { .. } => label as f64,
            LocalSpace::Spin1 => label as f64 + 1.0,
            LocalSpace::JaynesCummings { .. } => self.charge(label, 0) as f64,
            LocalSpace::LadderRung => ((label >> 1) + (label & 1)) as f64,
        }
    }

    fn charge_range(&self, k: usize) -> (i32, i32) {
        let charges: Vec<i32> = self.labels().iter().map(|&l| self.charge(l, k)).collect();
        (
            *charges.iter().min().unwrap(),
            *charges.iter().max().unwrap(),
        )
    }
}

/// `(photon number, emitter excited)` of a bare Jaynes-Cummings label.
pub fn jc_components(label: Label) -> (u8, u8) {
    ((label as u8) / 2, (label as u8) % 2)
}

/// Occupation/spin labels of every site.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Configuration(Vec<Label>);

impl Configuration {
    pub fn new(labels: Vec<Label>, local: &LocalSpace) -> Result<Self> {
        if labels.len() < 2 {
            return Err(FloqError::InvalidConfiguration(format!(
                "lattice size {} < 2",
                labels.len()
            )));
        }
        if let Some(bad) = labels.iter().find(|l| !local.contains(**l)) {
            return Err(FloqError::InvalidConfiguration(format!(
                "label {bad} outside the local space {local:?}"
            )));
        }
        Ok(Self(labels))
    }

    pub fn labels(&self) -> &[Label] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Mirror image under the lattice reflection.
    pub fn reflected(&self) -> Self {
        let mut v = self.0.clone();
        v.reverse();
        Self(v)
    }

    pub fn charges(&self, local: &LocalSpace) -> Vec<i32> {
        (0..local.n_charges())
            .map(|k| self.0.iter().map(|&l| local.charge(l, k)).sum())
            .collect()
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|")?;
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, "⟩")
    }
}

/// Fingerprint identifying the basis a state vector lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BasisId(pub u64);

/// All configurations of a conserved-charge sector, lexicographically ordered.
#[derive(Clone, Debug)]
pub struct SectorBasis {
    local: LocalSpace,
    n_sites: usize,
    charges: Vec<i32>,
    configs: Vec<Configuration>,
    lookup: HashMap<u128, usize>,
    id: BasisId,
}

/// Enumerate the sector of `n_sites` sites whose summed charges equal `charges`.
pub fn enumerate_sector(n_sites: usize, charges: &[i32], local: LocalSpace) -> Result<SectorBasis> {
    if n_sites < 2 {
        return Err(FloqError::param("sites", format!("need at least 2 sites, got {n_sites}")));
    }
    if charges.len() != local.n_charges() {
        return Err(FloqError::param(
            "charge",
            format!("{:?} needs {} charges, got {}", local, local.n_charges(), charges.len()),
        ));
    }
    if (local.dim() as f64).powi(n_sites as i32) > 2f64.powi(127) {
        return Err(FloqError::SizeLimit {
            dim: usize::MAX,
            limit: MAX_SECTOR_DIM,
        });
    }
    let ranges: Vec<(i32, i32)> = (0..local.n_charges()).map(|k| local.charge_range(k)).collect();
    for (k, &q) in charges.iter().enumerate() {
        let (lo, hi) = ranges[k];
        if q < lo * n_sites as i32 || q > hi * n_sites as i32 {
            return Err(FloqError::EmptySector(format!(
                "charge {q} unreachable with {n_sites} sites of {local:?}"
            )));
        }
    }

    let labels = local.labels();
    let mut configs = Vec::new();
    let mut current = Vec::with_capacity(n_sites);
    let mut remaining = charges.to_vec();
    dfs(
        &local,
        &labels,
        &ranges,
        n_sites,
        &mut current,
        &mut remaining,
        &mut configs,
    )?;
    if configs.is_empty() {
        return Err(FloqError::EmptySector(format!(
            "no configuration of {n_sites} sites carries charge {charges:?}"
        )));
    }

    let mut lookup = HashMap::with_capacity(configs.len());
    for (i, c) in configs.iter().enumerate() {
        lookup.insert(pack(&local, c.labels()), i);
    }
    let mut h = DefaultHasher::new();
    (local, n_sites, charges).hash(&mut h);
    Ok(SectorBasis {
        local,
        n_sites,
        charges: charges.to_vec(),
        configs,
        lookup,
        id: BasisId(h.finish()),
    })
}

fn dfs(
    local: &LocalSpace,
    labels: &[Label],
    ranges: &[(i32, i32)],
    n_sites: usize,
    current: &mut Vec<Label>,
    remaining: &mut [i32],
    out: &mut Vec<Configuration>,
) -> Result<()> {
    if current.len() == n_sites {
        if remaining.iter().all(|&q| q == 0) {
            if out.len() >= MAX_SECTOR_DIM {
                return Err(FloqError::SizeLimit {
                    dim: out.len() + 1,
                    limit: MAX_SECTOR_DIM,
                });
            }
            out.push(Configuration(current.clone()));
        }
        return Ok(());
    }
    let left = (n_sites - current.len() - 1) as i32;
    for &l in labels {
        let feasible = (0..ranges.len()).all(|k| {
            let rest = remaining[k] - local.charge(l, k);
            rest >= ranges[k].0 * left && rest <= ranges[k].1 * left
        });
        if !feasible {
            continue;
        }
        for (k, r) in remaining.iter_mut().enumerate() {
            *r -= local.charge(l, k);
        }
        current.push(l);
        dfs(local, labels, ranges, n_sites, current, remaining, out)?;
        current.pop();
        for (k, r) in remaining.iter_mut().enumerate() {
            *r += local.charge(l, k);
        }
    }
    Ok(())
}

/// Pack labels base-`local_dim`, first site most significant.
fn pack(local: &LocalSpace, labels: &[Label]) -> u128 {
    let d = local.dim() as u128;
    labels.iter().fold(0u128, |acc, &l| acc * d + local.slot(l) as u128)
}

impl SectorBasis {
    pub fn local(&self) -> &LocalSpace {
        &self.local
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn charges(&self) -> &[i32] {
        &self.charges
    }

    pub fn dim(&self) -> usize {
        self.configs.len()
    }

    pub fn configs(&self) -> &[Configuration] {
        &self.configs
    }

    pub fn config(&self, index: usize) -> &Configuration {
        &self.configs[index]
    }

    pub fn id(&self) -> BasisId {
        self.id
    }

    pub fn index_of(&self, config: &Configuration) -> Result<usize> {
        if config.len() != self.n_sites || config.labels().iter().any(|l| !self.local.contains(*l)) {
            return Err(FloqError::NotInSector(config.to_string()));
        }
        self.lookup
            .get(&pack(&self.local, config.labels()))
            .copied()
            .ok_or_else(|| FloqError::NotInSector(config.to_string()))
    }

    /// Index lookup from raw labels.
    pub fn find(&self, labels: &[Label]) -> Option<usize> {
        if labels.len() != self.n_sites || labels.iter().any(|l| !self.local.contains(*l)) {
            return None;
        }
        self.lookup.get(&pack(&self.local, labels)).copied()
    }

    /// Index of the reflected configuration; the sector is closed under reflection.
    pub fn reflection_index(&self, index: usize) -> usize {
        self.index_of(&self.configs[index].reflected())
            .expect("sectors are reflection invariant")
    }

    /// Unit vector on one configuration.
    pub fn basis_state(&self, config: &Configuration) -> Result<Vec<C64>> {
        let k = self.index_of(config)?;
        let mut v = vec![ZERO; self.dim()];
        v[k] = C64::new(1.0, 0.0);
        Ok(v)
    }
}

/// One symmetrized parity state `norm·(|rep⟩ + sign·|partner⟩)`, or `|rep⟩`
/// when the configuration is its own mirror image.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ParityMember {
    pub rep: usize,
    pub partner: usize,
    pub norm: f64,
}

impl ParityMember {
    pub fn is_self_symmetric(&self) -> bool {
        self.rep == self.partner
    }
}

#[derive(Clone, Debug)]
pub struct ParityBasis {
    members: Vec<ParityMember>,
    sign: i8,
    sector_dim: usize,
    id: BasisId,
}

/// Symmetrize a sector under reflection, keeping the states of parity `sign`.
pub fn parity_project(basis: &SectorBasis, sign: i8) -> Result<ParityBasis> {
    if sign != 1 && sign != -1 {
        return Err(FloqError::param("parity", format!("sign must be ±1, got {sign}")));
    }
    let mut members = Vec::new();
    for i in 0..basis.dim() {
        let j = basis.reflection_index(i);
        if j < i {
            continue;
        }
        if j == i {
            if sign == 1 {
                members.push(ParityMember {
                    rep: i,
                    partner: i,
                    norm: 1.0,
                });
            }
        } else {
            members.push(ParityMember {
                rep: i,
                partner: j,
                norm: std::f64::consts::FRAC_1_SQRT_2,
            });
        }
    }
    let mut h = DefaultHasher::new();
    (basis.id(), sign).hash(&mut h);
    Ok(ParityBasis {
        members,
        sign,
        sector_dim: basis.dim(),
        id: BasisId(h.finish()),
    })
}

impl ParityBasis {
    pub fn members(&self) -> &[ParityMember] {
        &self.members
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    pub fn dim(&self) -> usize {
        self.members.len()
    }

    pub fn sector_dim(&self) -> usize {
        self.sector_dim
    }

    pub fn id(&self) -> BasisId {
        self.id
    }

    /// Sector amplitudes of the `k`-th symmetrized state.
    pub fn column(&self, k: usize) -> Vec<(usize, f64)> {
        let m = self.members[k];
        if m.is_self_symmetric() {
            vec![(m.rep, 1.0)]
        } else {
            vec![(m.rep, m.norm), (m.partner, self.sign as f64 * m.norm)]
        }
    }

    /// Sector × parity isometry whose columns are the symmetrized states.
    pub fn isometry(&self) -> CsrMatrix {
        let mut b = TripletBuilder::new(self.sector_dim, self.dim());
        for k in 0..self.dim() {
            for (r, v) in self.column(k) {
                b.push(r, k, v);
            }
        }
        b.build()
    }

    /// Expand parity-basis amplitudes into sector amplitudes.
    pub fn expand(&self, amps: &[C64]) -> Vec<C64> {
        let mut out = vec![ZERO; self.sector_dim];
        for (k, a) in amps.iter().enumerate() {
            for (r, v) in self.column(k) {
                out[r] += a * v;
            }
        }
        out
    }

    /// Project sector amplitudes onto this parity subspace.
    pub fn restrict(&self, amps: &[C64]) -> Vec<C64> {
        (0..self.dim())
            .map(|k| self.column(k).into_iter().map(|(r, v)| amps[r] * v).sum())
            .collect()
    }
}

/// The space state vectors of a model live in.
#[derive(Clone, Debug)]
pub enum WorkingBasis {
    Sector(SectorBasis),
    Parity {
        sector: SectorBasis,
        parity: ParityBasis,
    },
}

impl WorkingBasis {
    pub fn sector(&self) -> &SectorBasis {
        match self {
            WorkingBasis::Sector(s) => s,
            WorkingBasis::Parity { sector, .. } => sector,
        }
    }

    pub fn parity(&self) -> Option<&ParityBasis> {
        match self {
            WorkingBasis::Sector(_) => None,
            WorkingBasis::Parity { parity, .. } => Some(parity),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            WorkingBasis::Sector(s) => s.dim(),
            WorkingBasis::Parity { parity, .. } => parity.dim(),
        }
    }

    pub fn id(&self) -> BasisId {
        match self {
            WorkingBasis::Sector(s) => s.id(),
            WorkingBasis::Parity { parity, .. } => parity.id(),
        }
    }

    /// Amplitudes over sector configurations.
    pub fn to_sector_amplitudes(&self, amps: &[C64]) -> Vec<C64> {
        match self {
            WorkingBasis::Sector(_) => amps.to_vec(),
            WorkingBasis::Parity { parity, .. } => parity.expand(amps),
        }
    }

    pub fn from_sector_amplitudes(&self, amps: &[C64]) -> Vec<C64> {
        match self {
            WorkingBasis::Sector(_) => amps.to_vec(),
            WorkingBasis::Parity { parity, .. } => parity.restrict(amps),
        }
    }
}
