use ddgeo_core::control::{
    control_unitary_1q, sequence_average_exact, single_qubit_pauli_terms, DecouplingFrame1Q, DecouplingSequence2Q,
};
use ddgeo_core::gate2q::{coupling_hamiltonian, real_couplings, target_gate_2q};
use ddgeo_core::geometry::{
    basis_states, catalog, geometric_phase, holonomy_gate, implied_target, latitude_loop, orange_slice,
    smooth_orange_slice, target_gate_1q, GateTarget1Q,
};
use ddgeo_core::matrix::{
    c, expm_hermitian, kron, partial_trace, trace_fidelity, ComplexMatrix, StateVector, ONE,
};
use ddgeo_core::noise::{assemble_total, BathHamiltonian, NoiseModel};
use ddgeo_core::pulse1q::{consistency_residual, synthesize};
use proptest::prelude::*;

fn hermitian(dim: usize) -> impl Strategy<Value = ComplexMatrix> {
    prop::collection::vec(-1.0f64..1.0, 2 * dim * dim).prop_map(move |v| {
        let m = ComplexMatrix::from_fn(dim, |i, j| c(v[2 * (i * dim + j)], v[2 * (i * dim + j) + 1]));
        m.hermitian_part()
    })
}

fn state(dim: usize) -> impl Strategy<Value = StateVector> {
    prop::collection::vec(-1.0f64..1.0, 2 * dim)
        .prop_filter("nonzero", |v| v.iter().any(|x| x.abs() > 1e-3))
        .prop_map(move |v| StateVector::new((0..dim).map(|i| c(v[2 * i], v[2 * i + 1])).collect()).normalized())
}

fn frame() -> impl Strategy<Value = DecouplingFrame1Q> {
    (1u32..=6, 1u32..=3, 0.2f64..3.0).prop_map(|(nx, step, tau)| {
        DecouplingFrame1Q::new(nx, nx + 2 * step, tau).expect("same parity, distinct")
    })
}

fn dist(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    (a - b).frobenius_norm()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kron_is_associative(a in hermitian(2), b in hermitian(2), d in hermitian(2)) {
        prop_assert!(dist(&kron(&kron(&a, &b), &d), &kron(&a, &kron(&b, &d))) < 1e-14);
    }

    #[test]
    fn expm_commutes_with_identity_padding(h in hermitian(2), s in -3.0f64..3.0) {
        let id = ComplexMatrix::identity(4);
        let lhs = expm_hermitian(&kron(&h, &id), s).unwrap();
        let rhs = kron(&expm_hermitian(&h, s).unwrap(), &id);
        prop_assert!(dist(&lhs, &rhs) < 1e-10);
    }

    #[test]
    fn expm_is_a_one_parameter_group(h in hermitian(4), s1 in -2.0f64..2.0, s2 in -2.0f64..2.0) {
        let lhs = &expm_hermitian(&h, s1).unwrap() * &expm_hermitian(&h, s2).unwrap();
        prop_assert!(dist(&lhs, &expm_hermitian(&h, s1 + s2).unwrap()) < 1e-10);
        prop_assert!(expm_hermitian(&h, s1).unwrap().is_unitary(1e-10));
    }

    #[test]
    fn partial_trace_preserves_trace(h in hermitian(8), psi in state(8)) {
        let u = expm_hermitian(&h, 1.3).unwrap();
        let rho = psi.projector().conjugate_by(&u);
        let full = partial_trace(&rho, &[2, 4], &[]).unwrap();
        prop_assert!((full[(0, 0)] - rho.trace()).norm() < 1e-12);
        for keep in [[0usize].as_slice(), &[1]] {
            let reduced = partial_trace(&rho, &[2, 4], keep).unwrap();
            let (vals, _) = reduced.hermitian_part().eigh().unwrap();
            prop_assert!((vals.iter().sum::<f64>() - 1.0).abs() < 1e-10);
            prop_assert!(vals.iter().all(|v| *v > -1e-12));
        }
    }

    #[test]
    fn frame_is_periodic(f in frame(), t in 0.0f64..1.0) {
        let t = t * f.tau();
        let a = control_unitary_1q(&f, t);
        let b = control_unitary_1q(&f, t + f.tau());
        prop_assert!(dist(&a, &b) < 1e-12);
    }

    #[test]
    fn frame_validation_matches_parity_rule(nx in 0u32..8, nz in 0u32..8) {
        let ok = nx > 0 && nz > 0 && nx != nz && (nx + nz) % 2 == 0;
        prop_assert_eq!(DecouplingFrame1Q::new(nx, nz, 1.0).is_ok(), ok);
    }

    #[test]
    fn basis_is_orthonormal(gamma in -1.5f64..1.5, t in 0.0f64..1.0) {
        for path in [orange_slice(gamma, 1.0), smooth_orange_slice(gamma, 1.0)] {
            let (a, b) = basis_states(&path, t).unwrap();
            prop_assert!((a.norm() - 1.0).abs() < 1e-12 && (b.norm() - 1.0).abs() < 1e-12);
            prop_assert!(a.inner(&b).norm() < 1e-12);
        }
    }

    #[test]
    fn reversal_negates_geometric_phase(gamma in -1.5f64..1.5, theta in 0.1f64..3.0) {
        for path in [orange_slice(gamma, 1.0), smooth_orange_slice(gamma, 1.0), latitude_loop(theta, 1.0)] {
            let fwd = geometric_phase(&path).unwrap();
            let back = geometric_phase(&path.reversed()).unwrap();
            prop_assert!((fwd + back).abs() < 1e-10, "{} {}", fwd, back);
        }
    }

    #[test]
    fn holonomy_undone_by_inverse_target(gamma in -1.5f64..1.5) {
        for path in [orange_slice(gamma, 1.0), smooth_orange_slice(gamma, 1.0)] {
            let t = implied_target(&path).unwrap();
            let inverse = target_gate_1q(&GateTarget1Q { gamma: -t.gamma, ..t });
            let id = &holonomy_gate(&path).unwrap() * &inverse;
            prop_assert!(dist(&id, &ComplexMatrix::identity(2)) < 1e-8);
        }
    }

    #[test]
    fn orange_slice_phase_is_its_opening_angle(gamma in -3.0f64..3.0) {
        prop_assert!((geometric_phase(&orange_slice(gamma, 1.0)).unwrap() - gamma).abs() < 1e-10);
    }

    #[test]
    fn drive_coefficients_are_periodic(f in frame(), gamma in -1.0f64..1.0, t in 0.0f64..1.0) {
        let path = orange_slice(gamma, f.tau());
        let s = synthesize(&path, &f).unwrap();
        let t = t * f.tau();
        let a = s.coefficients_extended(t);
        let b = s.coefficients_extended(t + f.tau());
        let at = s.coefficients(t).unwrap();
        for k in 0..3 {
            prop_assert!((a[k] - b[k]).abs() < 1e-9 * (1.0 + a[k].abs()));
            prop_assert!((a[k] - at[k]).abs() < 1e-12 * (1.0 + a[k].abs()));
        }
    }

    #[test]
    fn closed_form_drive_matches_frame_composition(f in frame(), gamma in -1.5f64..1.5) {
        let path = smooth_orange_slice(gamma, f.tau());
        prop_assert!(consistency_residual(&path, &f, 97).unwrap() < 1e-9);
    }

    #[test]
    fn real_couplings_keep_xy_and_flip_dm(a in -2.0f64..2.0, b in -2.0f64..2.0) {
        for k in 0..4 {
            let (j1, j2) = real_couplings(a, b, k);
            let sign = if k == 1 || k == 2 { -1.0 } else { 1.0 };
            prop_assert!((j1 - a).abs() < 1e-14 && (j2 - sign * b).abs() < 1e-14);
            let p = DecouplingSequence2Q::operator_matrix(k);
            prop_assert!(dist(&coupling_hamiltonian(a, b).conjugate_by(&p), &coupling_hamiltonian(j1, j2)) < 1e-14);
        }
    }

    #[test]
    fn target_2q_is_unitary_with_block_eigenphases(gamma in -3.0f64..3.0) {
        let g = target_gate_2q(gamma);
        prop_assert!(g.is_unitary(1e-12));
        prop_assert!((g.trace() - c(2.0 + 2.0 * gamma.cos(), 0.0)).norm() < 1e-12);
    }

    #[test]
    fn joint_hamiltonian_is_linear_and_hermitian(hs in hermitian(2), eps in 0.0f64..1.0, omega in -2.0f64..2.0) {
        let model = NoiseModel {
            bath_hamiltonian: BathHamiltonian::Zeeman { omega },
            ..NoiseModel::heisenberg(eps)
        };
        let total = assemble_total(|_| Ok(hs.clone()), &model, 1).unwrap().at(0.3).unwrap();
        prop_assert!(total.is_hermitian(1e-12));
        let parts = &(&kron(&hs, &ComplexMatrix::identity(2))
            + &kron(&ComplexMatrix::identity(2), &model.bath_matrix(1)))
            + &model.interaction_matrix(1);
        prop_assert!(dist(&total, &parts) < 1e-14);
    }
}

#[test]
fn sequence_average_vanishes_exactly() {
    let seq = DecouplingSequence2Q::instantaneous(1.0).unwrap();
    for term in single_qubit_pauli_terms() {
        assert!(sequence_average_exact(&seq, &term).is_zero());
    }
}

#[test]
fn catalog_holonomies_are_unitary() {
    for (name, path) in catalog(1.0) {
        let g = holonomy_gate(&path).unwrap();
        assert!(g.is_unitary(1e-12), "{name}");
        let t = target_gate_1q(&implied_target(&path).unwrap());
        assert!(trace_fidelity(&g, &t) > 1.0 - 1e-12, "{name}");
    }
    assert!((target_gate_2q(0.0)[(0, 0)] - ONE).norm() < 1e-15);
}
