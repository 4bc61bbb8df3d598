//! Rotating frame, Magnus effective Hamiltonians and resonance weights.
//!
//! In the interaction picture with respect to a diagonal `H0` the driven
//! Hamiltonian reads `H_I(t) = s·J0·cos(Ωt) Σ_ν e^{iνt} K_ν`, where `K_ν`
//! collects the hopping elements whose energy difference `E_r − E_c` equals ν.
//! Both Magnus terms then reduce to scalar time integrals per frequency (pair).

pub mod quadrature;
pub mod trimer;

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{FloqError, Result};
use crate::linalg::{CMatrix, CsrMatrix, TripletBuilder, C64, I, ZERO};
use crate::models::DrivenModel;

pub use quadrature::{drive_average, nested_weight, QuadratureReport};
pub use trimer::{trimer_populations_integer, TrimerOracle};

/// Tolerance of the periodicity check `|e^{iνT} − 1|`.
pub const PERIODICITY_TOL: f64 = 1e-8;

#[derive(Clone, Debug)]
pub struct MagnusResult {
    pub hf0: CMatrix,
    pub hf1: CMatrix,
    pub period: f64,
    pub report: QuadratureReport,
}

fn static_energies(model: &DrivenModel) -> Result<&[f64]> {
    model.h0_diag().ok_or(FloqError::NonDiagonalStatic)
}

/// `H_I(t)[r, c] = J(t)·K[r, c]·e^{i(E_r − E_c)t}`.
pub fn rotating_frame_hamiltonian(model: &DrivenModel, t: f64) -> Result<CMatrix> {
    let e = static_energies(model)?;
    let n = model.dim();
    let jt = model.drive().coefficient(t);
    let mut h = CMatrix::zeros(n, n);
    for (r, c, v) in model.h_hop().iter() {
        h[(r, c)] = C64::from_polar(jt * v, (e[r] - e[c]) * t);
    }
    Ok(h)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    Plus,
    Minus,
}

/// `F = (1/T)∫₀ᵀ cos(Ωt) e^{iUt[±(m_k − m_j) + 1]} dt`, closed form.
pub fn resonance_weight(omega: f64, u: f64, m_j: i32, m_k: i32, branch: Branch) -> C64 {
    let s = match branch {
        Branch::Plus => 1.0,
        Branch::Minus => -1.0,
    };
    drive_average(omega, u * (s * (m_k - m_j) as f64 + 1.0))
}

#[derive(Clone, Copy, Debug)]
pub struct FractionalWeights {
    pub f1: C64,
    pub f2: C64,
    pub report: QuadratureReport,
}

/// Second-order weights of the `l → j` process through the middle site `k`,
/// in units of `J0²`:
///
/// * `F1 = 1/(2iT) ∫∫ cos(Ωt1)cos(Ωt2) e^{iU(m_j−m_k)t1} e^{iU(1+m_k−m_l)t2}`
/// * `F2` the same with `e^{iU(m_k−m_l)t2}`.
pub fn fractional_weight(omega: f64, u: f64, m_j: i32, m_k: i32, m_l: i32) -> Result<FractionalWeights> {
    let nu1 = u * (m_j - m_k) as f64;
    let (f1, r1) = nested_weight(omega, nu1, u * (1 + m_k - m_l) as f64)?;
    let (f2, r2) = nested_weight(omega, nu1, u * (m_k - m_l) as f64)?;
    Ok(FractionalWeights {
        f1,
        f2,
        report: r1.merge(r2),
    })
}

/// Hopping operator split by transition frequency.
struct FrequencyBlocks {
    freqs: Vec<f64>,
    blocks: Vec<CsrMatrix>,
}

fn frequency_blocks(model: &DrivenModel) -> Result<FrequencyBlocks> {
    let e = static_energies(model)?;
    let n = model.dim();
    let scale = model.drive().omega_eff();
    let mut groups: BTreeMap<i64, (f64, TripletBuilder)> = BTreeMap::new();
    for (r, c, v) in model.h_hop().iter() {
        let nu = e[r] - e[c];
        let key = (nu / scale * 1e9).round() as i64;
        groups
            .entry(key)
            .or_insert_with(|| (nu, TripletBuilder::new(n, n)))
            .1
            .push(r, c, v);
    }
    let (freqs, blocks) = groups.into_values().map(|(nu, b)| (nu, b.build())).unzip();
    Ok(FrequencyBlocks { freqs, blocks })
}

/// Largest `|e^{iνT} − 1|` over the transition frequencies of the model.
pub fn periodicity_defect(model: &DrivenModel) -> Result<f64> {
    let t = model.drive().period_eff();
    let fb = frequency_blocks(model)?;
    Ok(fb
        .freqs
        .iter()
        .map(|nu| ((I * nu * t).exp() - 1.0).norm())
        .fold(0.0, f64::max))
}

fn check_periodic(model: &DrivenModel) -> Result<()> {
    let defect = periodicity_defect(model)?;
    if defect > PERIODICITY_TOL {
        return Err(FloqError::PeriodicityViolation {
            defect,
            tolerance: PERIODICITY_TOL,
        });
    }
    Ok(())
}

/// Zeroth Magnus term `(1/T)∫₀ᵀ H_I(t) dt`.
pub fn magnus_h0(model: &DrivenModel) -> Result<(CMatrix, QuadratureReport)> {
    check_periodic(model)?;
    let fb = frequency_blocks(model)?;
    let omega = model.drive().omega_eff();
    let amp = model.drive().hop_sign * model.drive().j0;
    let weights: Vec<(C64, QuadratureReport)> = fb
        .freqs
        .par_iter()
        .map(|&nu| quadrature::drive_average_quadrature(omega, nu))
        .collect::<Result<_>>()?;
    let n = model.dim();
    let mut h = CMatrix::zeros(n, n);
    let mut report = QuadratureReport::default();
    for (block, (w, rep)) in fb.blocks.iter().zip(weights) {
        report = report.merge(rep);
        for (r, c, v) in block.iter() {
            h[(r, c)] += w * (amp * v);
        }
    }
    Ok((h, report))
}

/// First Magnus term `1/(2iT)∫₀ᵀdt1∫₀^{t1}dt2 [H_I(t1), H_I(t2)]`.
pub fn magnus_h1(model: &DrivenModel) -> Result<(CMatrix, QuadratureReport)> {
    check_periodic(model)?;
    let fb = frequency_blocks(model)?;
    let omega = model.drive().omega_eff();
    let amp2 = model.drive().j0 * model.drive().j0;
    let m = fb.freqs.len();
    let pairs: Vec<(usize, usize)> = (0..m).flat_map(|a| (0..m).map(move |b| (a, b))).collect();
    let weights: Vec<(C64, QuadratureReport)> = pairs
        .par_iter()
        .map(|&(a, b)| nested_weight(omega, fb.freqs[a], fb.freqs[b]))
        .collect::<Result<_>>()?;
    let n = model.dim();
    let mut report = QuadratureReport::default();
    // Σ_ab W_ab [K_a, K_b] = Σ_ab (W_ab − W_ba) K_a K_b
    let products: Vec<(C64, CsrMatrix)> = pairs
        .par_iter()
        .enumerate()
        .filter_map(|(idx, &(a, b))| {
            let w = weights[idx].0 - weights[b * m + a].0;
            if w.norm() == 0.0 {
                return None;
            }
            Some((w, fb.blocks[a].matmul(&fb.blocks[b])))
        })
        .collect();
    for (_, rep) in &weights {
        report = report.merge(*rep);
    }
    let mut h = CMatrix::zeros(n, n);
    for (w, prod) in products {
        for (r, c, v) in prod.iter() {
            h[(r, c)] += w * (amp2 * v);
        }
    }
    Ok((h, report))
}

pub fn magnus(model: &DrivenModel) -> Result<MagnusResult> {
    let (hf0, r0) = magnus_h0(model)?;
    let (hf1, r1) = magnus_h1(model)?;
    Ok(MagnusResult {
        hf0,
        hf1,
        period: 2.0 * PI / model.drive().omega_eff(),
        report: r0.merge(r1),
    })
}

/// Restrict a dense operator to the span of orthonormal states.
pub fn project(op: &CMatrix, states: &[&[C64]]) -> CMatrix {
    let k = states.len();
    let mut out = CMatrix::zeros(k, k);
    for (a, va) in states.iter().enumerate() {
        for (b, vb) in states.iter().enumerate() {
            let mut acc = ZERO;
            for r in 0..op.nrows() {
                if va[r] == ZERO {
                    continue;
                }
                let row: C64 = (0..op.ncols()).map(|c| op[(r, c)] * vb[c]).sum();
                acc += va[r].conj() * row;
            }
            out[(a, b)] = acc;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{hermiticity_defect, max_abs};
    use crate::models::{build_bose_hubbard, DriveSpec, DEFAULT_J0, DEFAULT_U};
    use approx::assert_abs_diff_eq;

    fn trimer(omega: f64) -> DrivenModel {
        build_bose_hubbard(3, 3, 3, DEFAULT_U, 1.0, DriveSpec::new(DEFAULT_J0, omega).unwrap())
            .unwrap()
            .restrict_parity(1)
            .unwrap()
    }

    #[test]
    fn rotating_frame_at_origin_is_scaled_hopping() {
        let m = trimer(DEFAULT_U);
        let h = rotating_frame_hamiltonian(&m, 0.0).unwrap();
        let k = m.h_hop().to_dense();
        for r in 0..m.dim() {
            for c in 0..m.dim() {
                assert_abs_diff_eq!(h[(r, c)].re, -DEFAULT_J0 * k[(r, c)], epsilon = 1e-16);
            }
        }
    }

    #[test]
    fn rotating_frame_element_psi1_psi0() {
        let m = trimer(DEFAULT_U);
        let s = m.trimer_states().unwrap();
        let t = 3.7;
        let h = rotating_frame_hamiltonian(&m, t).unwrap();
        let e = project(&h, &[&s[1], &s[0]])[(0, 1)];
        let expect = C64::from_polar(-2.0 * DEFAULT_J0 * (DEFAULT_U * t).cos(), DEFAULT_U * t);
        assert_abs_diff_eq!(e.re, expect.re, epsilon = 1e-15);
        assert_abs_diff_eq!(e.im, expect.im, epsilon = 1e-15);
    }

    #[test]
    fn fractional_drive_is_periodic() {
        let m = trimer(DEFAULT_U / 2.0);
        let t = 4.0 * PI / DEFAULT_U;
        for s in [0.3, 1.7, 11.0] {
            let a = rotating_frame_hamiltonian(&m, s).unwrap();
            let b = rotating_frame_hamiltonian(&m, s + t).unwrap();
            assert!(max_abs(&(a - b)) < 1e-12);
        }
        assert!(periodicity_defect(&m).unwrap() < 1e-12);
    }

    #[test]
    fn off_resonant_drive_is_rejected() {
        let m = trimer(DEFAULT_U * 0.77);
        assert!(matches!(magnus_h0(&m), Err(FloqError::PeriodicityViolation { .. })));
    }

    #[test]
    fn bare_jch_has_no_rotating_frame() {
        let m = crate::models::build_jch(2, 2, 2, 0.4, 1.0, 1.0, DriveSpec::new(0.01, 0.2).unwrap()).unwrap();
        assert!(matches!(rotating_frame_hamiltonian(&m, 0.0), Err(FloqError::NonDiagonalStatic)));
    }

    #[test]
    fn resonance_weight_anchors() {
        let u = 1.0;
        assert_abs_diff_eq!(resonance_weight(u, u, 1, 1, Branch::Plus).re, 0.5, epsilon = 1e-15);
        assert!(resonance_weight(u / 2.0, u, 1, 1, Branch::Plus).norm() < 1e-15);
        assert!(resonance_weight(u / 3.0, u, 1, 1, Branch::Plus).norm() < 1e-15);
    }

    #[test]
    fn magnus_terms_are_hermitian() {
        for omega in [DEFAULT_U, DEFAULT_U / 2.0] {
            let r = magnus(&trimer(omega)).unwrap();
            assert!(hermiticity_defect(&r.hf0) < 1e-12);
            assert!(hermiticity_defect(&r.hf1) < 1e-10 * DEFAULT_J0 * DEFAULT_J0);
        }
    }
}
