use proptest::prelude::*;

use floqsim::basis::{enumerate_sector, LocalSpace};
use floqsim::linalg::{norm, unitarity_defect, C64};
use floqsim::models::{build_bose_hubbard, build_jch, build_spin1_xxz, build_spin_ladder, DriveSpec, DrivenModel};
use floqsim::observables::{entropy_of_amplitudes, participation_ratio, populations, von_neumann_entropy};
use floqsim::propagate::{period_propagator_fixed, propagator_over, StateVector, StepScheme};

fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Brute-force count of occupation tuples with the given total.
fn brute_count(sites: usize, n: i32, n_max: i32) -> usize {
    let base = (n_max + 1) as usize;
    (0..base.pow(sites as u32))
        .filter(|&idx| {
            let mut rest = idx;
            let mut total = 0;
            for _ in 0..sites {
                total += (rest % base) as i32;
                rest /= base;
            }
            total == n
        })
        .count()
}

fn drive(omega: f64) -> DriveSpec {
    DriveSpec::new(0.01, omega).unwrap()
}

fn models() -> Vec<DrivenModel> {
    vec![
        build_bose_hubbard(3, 3, 3, 0.4, 1.0, drive(0.2)).unwrap(),
        build_bose_hubbard(4, 4, 2, 0.4, 1.0, drive(0.4)).unwrap(),
        build_spin1_xxz(3, 0.4, drive(0.2)).unwrap(),
        build_jch(3, 3, 3, 0.7, 1.0, 1.0, drive(0.4)).unwrap().to_polariton_frame().unwrap(),
        build_spin_ladder(3, [1, 2], 0.2, 0.4, drive(0.4)).unwrap(),
    ]
}

fn random_state(dim: usize, raw: &[(f64, f64)]) -> Vec<C64> {
    let v: Vec<C64> = (0..dim).map(|k| C64::new(raw[k % raw.len()].0, raw[k % raw.len()].1 + k as f64 * 1e-3)).collect();
    let n = norm(&v);
    v.into_iter().map(|z| z / n).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn unit_filling_dimension(sites in 2usize..=7, fill in 0usize..=7) {
        let n = fill.min(sites) as i32;
        let b = enumerate_sector(sites, &[n], LocalSpace::Boson { n_max: n.max(1) as u8 }).unwrap();
        prop_assert_eq!(b.dim() as u64, binomial(n as u64 + sites as u64 - 1, sites as u64 - 1));
    }

    #[test]
    fn truncated_dimension(sites in 2usize..=5, n in 0i32..=6, n_max in 1u8..=3) {
        let expected = brute_count(sites, n, n_max as i32);
        match enumerate_sector(sites, &[n], LocalSpace::Boson { n_max }) {
            Ok(b) => prop_assert_eq!(b.dim(), expected),
            Err(_) => prop_assert_eq!(expected, 0),
        }
    }

    #[test]
    fn reflection_is_an_involution(sites in 2usize..=6, n in 1i32..=5) {
        let b = enumerate_sector(sites, &[n], LocalSpace::Boson { n_max: 3 }).unwrap();
        for k in 0..b.dim() {
            let r = b.reflection_index(k);
            prop_assert_eq!(b.reflection_index(r), k);
            prop_assert_eq!(b.config(r), &b.config(k).reflected());
        }
    }

    #[test]
    fn hamiltonian_is_hermitian(t in 0.0f64..200.0) {
        for m in models() {
            prop_assert!(m.hamiltonian_at(t).symmetry_defect() <= 1e-14);
        }
    }

    #[test]
    fn propagation_is_unitary(t0 in 0.0f64..30.0, span in 0.1f64..30.0) {
        for m in models() {
            let u = propagator_over(&m, t0, span, 32, StepScheme::Magnus4);
            prop_assert!(unitarity_defect(&u) <= 1e-10);
        }
    }

    #[test]
    fn pr_and_entropy_bounds(raw in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..40), cut in 1usize..4) {
        let b = enumerate_sector(4, &[4], LocalSpace::Boson { n_max: 4 }).unwrap();
        let psi = random_state(b.dim(), &raw);
        let pr = participation_ratio(&psi);
        prop_assert!((1.0 - 1e-12..=b.dim() as f64 + 1e-9).contains(&pr));
        let s = entropy_of_amplitudes(&b, &psi, cut).unwrap();
        let bound = (5f64.powi(cut.min(4 - cut) as i32)).ln();
        prop_assert!(s >= -1e-12 && s <= bound + 1e-12);
    }

    #[test]
    fn observables_ignore_global_phase(raw in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..20), phi in 0.0f64..6.3) {
        let m = build_bose_hubbard(3, 3, 3, 0.4, 1.0, drive(0.2)).unwrap().restrict_parity(1).unwrap();
        let id = m.basis().id();
        let psi = random_state(m.dim(), &raw);
        let rot: Vec<C64> = psi.iter().map(|z| z * C64::from_polar(1.0, phi)).collect();
        let a = StateVector::new(psi, id, 0.0).unwrap();
        let b = StateVector::new(rot, id, 0.0).unwrap();
        let targets = m.trimer_states().unwrap();
        let pa = populations(&a, &targets).unwrap();
        let pb = populations(&b, &targets).unwrap();
        for (x, y) in pa.iter().zip(&pb) {
            prop_assert!((x - y).abs() <= 1e-13);
        }
        let sa = von_neumann_entropy(m.basis(), &a, 1).unwrap();
        let sb = von_neumann_entropy(m.basis(), &b, 1).unwrap();
        prop_assert!((sa - sb).abs() <= 1e-12);
        prop_assert!((participation_ratio(a.amps()) - participation_ratio(b.amps())).abs() <= 1e-10);
    }
}

/// Halving the step shrinks the one-period error 16× for Magnus4 and 4× for
/// the midpoint rule.
#[test]
fn convergence_orders() {
    let m = build_bose_hubbard(3, 3, 3, 0.4, 1.0, DriveSpec::new(0.1, 0.2).unwrap()).unwrap();
    let reference = period_propagator_fixed(&m, 2048, StepScheme::Magnus4);
    let err = |steps, scheme| (period_propagator_fixed(&m, steps, scheme) - &reference).norm();
    let r4 = err(32, StepScheme::Magnus4) / err(64, StepScheme::Magnus4);
    let r2 = err(32, StepScheme::Midpoint) / err(64, StepScheme::Midpoint);
    assert!((12.0..=20.0).contains(&r4), "Magnus4 ratio {r4}");
    assert!((3.0..=5.0).contains(&r2), "midpoint ratio {r2}");
}
