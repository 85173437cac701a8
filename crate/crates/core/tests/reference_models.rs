//! The small named models: spectra, ground spaces, frustration values and
//! verdicts.

mod common;

use approx::assert_abs_diff_eq;
use frustra::eigen::{eig_hermitian, ground_space, mmgs, partial_trace, DensityMatrix, DEFAULT_DEGENERACY_TOL};
use frustra::metrics::{
    analyze_model, analyze_pure_sweep, epsilon_d, frustration, parity_ground_states, GroundAnalysis, Verdict,
    DEFAULT_EQUALITY_TOL,
};
use frustra::model::{apply_gauge, build_hamiltonian, local_term, Bond, Pauli, SpinModel};
use frustra::presets;
use frustra::{CMatrix, CVector, C64};

const TOL: f64 = DEFAULT_DEGENERACY_TOL;

fn ket(amps: &[f64]) -> CVector {
    CVector::from_iterator(amps.len(), amps.iter().map(|&a| C64::new(a, 0.0)))
}

#[test]
fn ising_triangle_ground_space() {
    let m = presets::ising_triangle();
    let h = build_hamiltonian(&m).unwrap();
    let gs = ground_space(&h, TOL).unwrap();
    assert_abs_diff_eq!(gs.energy, -0.75, epsilon = 1e-12);
    assert_eq!(gs.degeneracy, 2);

    // x-aligned product states |+++> and |--->.
    let s = 1.0 / 8f64.sqrt();
    let plus = ket(&[s; 8]);
    let minus = ket(&(0..8).map(|b: u32| if b.count_ones().is_multiple_of(2) { s } else { -s }).collect::<Vec<_>>());
    let expected = (&plus * plus.adjoint() + &minus * minus.adjoint()) * C64::new(0.5, 0.0);
    assert!(frustra::max_abs(&(mmgs(&gs).matrix() - expected)) < 1e-10);
}

#[test]
fn ising_triangle_superpositions_are_frustration_free() {
    let m = presets::ising_triangle();
    let gs = ground_space(&build_hamiltonian(&m).unwrap(), TOL).unwrap();
    let mut rng = common::rng(1);
    for _ in 0..20 {
        let coeffs = common::random_state(2, &mut rng);
        let psi = gs.vector(0) * coeffs[0] + gs.vector(1) * coeffs[1];
        let rho = DensityMatrix::pure(&psi).unwrap();
        for b in m.bonds() {
            let pi = ground_space(&local_term(b), TOL).unwrap().projector();
            assert!(frustration(&rho, &pi, &b.sites()).unwrap().abs() < 1e-10);
            let rho_s = partial_trace(&rho, &b.sites()).unwrap();
            assert!(epsilon_d(&rho_s, 2).unwrap().abs() < 1e-10);
        }
    }
}

#[test]
fn ground_degeneracies() {
    let cases = [
        (presets::ising_ring5(), 2),
        (presets::xy_ring5(0.1), 2),
        (presets::heisenberg_chain4(), 5),
        (presets::heisenberg_chain4_transposed(), 1),
    ];
    for (m, d) in cases {
        let h = build_hamiltonian(&m).unwrap();
        assert_eq!(ground_space(&h, TOL).unwrap().degeneracy, d, "{m:?}");
    }
    let (vals, _) = eig_hermitian(&build_hamiltonian(&presets::xy_ring5(0.1)).unwrap()).unwrap();
    assert_eq!(vals.len(), 32);
    assert!((vals[1] - vals[0]).abs() <= TOL * vals[0].abs().max(1.0));
    assert!(vals[2] - vals[0] > 1e-3);
}

#[test]
fn local_term_examples() {
    let heis = ground_space(&local_term(&Bond::new(0, 1, [1.0, 1.0, 1.0])), TOL).unwrap();
    assert_eq!(heis.degeneracy, 3);
    assert_abs_diff_eq!(heis.energy, -0.25, epsilon = 1e-12);
    assert_abs_diff_eq!(heis.projector().matrix().trace().re, 3.0, epsilon = 1e-12);
    let (vals, _) = eig_hermitian(&local_term(&Bond::new(0, 1, [1.0, 1.0, 1.0]))).unwrap();
    assert_abs_diff_eq!(vals[3], 0.75, epsilon = 1e-12);

    let xy = ground_space(&local_term(&Bond::new(0, 1, [1.0, 0.1, 0.0])), TOL).unwrap();
    assert_eq!(xy.degeneracy, 1);
    // Independent 4x4 diagonalization of the same operator.
    let spectrum = common::hermitian_spectrum(local_term(&Bond::new(0, 1, [1.0, 0.1, 0.0])).matrix());
    assert!(spectrum[1] - spectrum[0] > 1e-3);
    assert_abs_diff_eq!(spectrum[0], xy.energy, epsilon = 1e-12);
}

#[test]
fn transposed_heisenberg_is_antiferromagnetic_up_to_gauge() {
    // PT on sites {1, 3} flips J^y on every bond; Y on those sites then flips
    // J^x and J^z, leaving the antiferromagnetic chain.
    let af = presets::open_chain(4, [-1.0, -1.0, -1.0]);
    let gauged = apply_gauge(&build_hamiltonian(&af).unwrap(), &[Pauli::I, Pauli::Y, Pauli::I, Pauli::Y]).unwrap();
    let pt = build_hamiltonian(&presets::heisenberg_chain4_transposed()).unwrap();
    assert!(frustra::max_abs(&(gauged.matrix() - pt.matrix())) < 1e-14);
}

#[test]
fn frustration_values() {
    let xy = presets::xy_ring5(0.1);
    let c = analyze_model(&xy, TOL, DEFAULT_EQUALITY_TOL).unwrap();
    assert_eq!(c.verdict, Verdict::Ines);
    for r in &c.per_bond {
        assert_abs_diff_eq!(r.f_s, 0.476, epsilon = 1e-3);
        assert!(r.residual.abs() <= 1e-7);
        assert_eq!(r.d_local, 1);
    }

    let pt = analyze_model(&presets::heisenberg_chain4_transposed(), TOL, DEFAULT_EQUALITY_TOL).unwrap();
    assert_eq!(pt.verdict, Verdict::Ines);
    let central = pt.per_bond.iter().find(|r| r.bond == (1, 2)).unwrap();
    assert_abs_diff_eq!(central.f_s, 0.5, epsilon = 1e-10);
    for r in pt.per_bond.iter().filter(|r| r.bond != (1, 2)) {
        assert_abs_diff_eq!(r.f_s, 0.067, epsilon = 1e-3);
        assert_eq!(r.d_local, 1);
    }

    let heis = analyze_model(&presets::heisenberg_chain4(), TOL, DEFAULT_EQUALITY_TOL).unwrap();
    assert_eq!(heis.verdict, Verdict::Ff);
    assert!(heis.per_bond.iter().all(|r| r.d_local == 3 && r.f_s.abs() < 1e-10 && r.epsilon_d.abs() < 1e-10));
}

#[test]
fn verdicts() {
    let cases = [
        (presets::ising_triangle(), Verdict::Ff),
        (presets::ising_ring5(), Verdict::Ff),
        (presets::xy_ring5(0.1), Verdict::Ines),
        (presets::xy_ring5_chord(0.1), Verdict::NonInes),
        (presets::heisenberg_chain4(), Verdict::Ff),
        (presets::heisenberg_chain4_transposed(), Verdict::Ines),
    ];
    for (m, v) in cases {
        let c = analyze_model(&m, TOL, DEFAULT_EQUALITY_TOL).unwrap();
        assert_eq!(c.verdict, v, "{m:?}");
        assert!(c.support_leak.abs() < 1e-10);
    }
    let chord = analyze_model(&presets::xy_ring5_chord(0.1), TOL, DEFAULT_EQUALITY_TOL).unwrap();
    assert!(chord.worst_residual() > 1e-3);
}

#[test]
fn pure_state_frustration_matches_mmgs() {
    let m = presets::xy_ring5(0.1);
    let report = analyze_pure_sweep(&m, 20, 5, TOL).unwrap();
    assert!(report.parity_basis);
    assert!(report.max_spread() <= 1e-9);
    assert!(report.max_mmgs_deviation() <= 1e-9);

    // Trial 0 is the +1 parity state.
    let analysis = GroundAnalysis::new(&m, TOL).unwrap();
    let states = parity_ground_states(&analysis.ground, 5, Pauli::X).unwrap();
    assert_abs_diff_eq!(states[0].0, 1.0, epsilon = 1e-10);
    let rho = DensityMatrix::pure(&states[0].1).unwrap();
    for (k, b) in m.bonds().iter().enumerate() {
        let pi = ground_space(&local_term(b), TOL).unwrap().projector();
        assert_abs_diff_eq!(frustration(&rho, &pi, &b.sites()).unwrap(), report.f_values[0][k], epsilon = 1e-12);
    }

    assert!(analyze_pure_sweep(&presets::heisenberg_chain4(), 3, 0, TOL).is_err());
}

#[test]
fn mmgs_is_a_scaled_projector_for_random_models() {
    let mut rng = common::rng(77);
    for _ in 0..50 {
        let n = 2 + (common::normal(&mut rng).abs() as usize % 4);
        let m = common::random_model(n, &mut rng);
        let gs = ground_space(&build_hamiltonian(&m).unwrap(), TOL).unwrap();
        let scaled = mmgs(&gs).matrix() * C64::new(gs.degeneracy as f64, 0.0);
        assert!(frustra::max_abs(&(&scaled * &scaled - &scaled)) < 1e-9);
    }
}

#[test]
fn gauge_does_not_change_ground_degeneracy() {
    let mut rng = common::rng(78);
    for _ in 0..30 {
        let m = common::random_model(4, &mut rng);
        let bare = SpinModel::new(4, m.bonds().to_vec()).unwrap();
        let d0 = ground_space(&build_hamiltonian(&bare).unwrap(), TOL).unwrap().degeneracy;
        let gauged = bare.clone().with_gauges(m.gauges().to_vec()).unwrap();
        let d1 = ground_space(&build_hamiltonian(&gauged).unwrap(), TOL).unwrap().degeneracy;
        assert_eq!(d0, d1);
    }
}

#[test]
fn bundled_json_models_match_presets() {
    for (name, m) in presets::bundled() {
        let reparsed = SpinModel::from_json(&m.to_json()).unwrap();
        assert_eq!(reparsed, m, "{name}");
    }
    assert!(SpinModel::from_json("{\"sites\": 2, \"bonds\": [").is_err());
}

#[test]
fn reduced_mmgs_is_a_density_matrix() {
    for (_, m) in presets::bundled() {
        let a = GroundAnalysis::new(&m, TOL).unwrap();
        for b in m.bonds() {
            let r = partial_trace(&a.mmgs, &b.sites()).unwrap();
            assert!(DensityMatrix::new(r.matrix().clone()).is_ok());
            let ev: CMatrix = r.matrix().clone();
            assert_abs_diff_eq!(ev.trace().re, 1.0, epsilon = 1e-10);
        }
    }
}
