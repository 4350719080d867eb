use std::sync::Arc;

use zslab_core::generators::examples::{coordinate_swap_system, odometer_system, swap_loops_system, twisted_two_vertex_system};
use zslab_core::rep::{fock_ball, rep_distance, scalar_rep, unitary_distance};
use zslab_core::{
    build_bowtie, build_fock_unitary, build_tilde_bowtie, check_cp_equivalence, check_iota, check_nica, check_nica_equivalence, cp_defect,
    fock_for_system, nica_check, pi_backward, pi_forward, pi_tilde_backward, pi_tilde_forward, transport_rep, trivial_system, validate_covariance,
    validate_toeplitz, validate_unitary_rep, Group, LcmEntry, Semigroup, Tolerance, UnitaryRep, ZsData, ZsSystem,
};

fn tol() -> Tolerance {
    Tolerance::default()
}

fn systems() -> Vec<(&'static str, ZsSystem, usize)> {
    vec![
        ("odometer", odometer_system(3, 3).unwrap(), 2),
        ("swap loops", swap_loops_system(3).unwrap(), 2),
        ("twisted", twisted_two_vertex_system(2).unwrap(), 1),
        ("coordinate swap", coordinate_swap_system(2).unwrap(), 1),
    ]
}

fn homogeneous() -> Vec<(&'static str, ZsSystem, usize)> {
    systems().into_iter().filter(|(_, s, _)| zslab_core::is_homogeneous(s)).collect()
}

#[test]
fn fock_pairs_are_covariant_and_round_trip() {
    for (name, s, radius) in systems() {
        let psi = fock_for_system(&s, &fock_ball(&s.zs.p, radius)).unwrap();
        assert!(validate_toeplitz(&psi, tol()).is_clean(), "{name}");
        let u = build_fock_unitary(&s, &psi).unwrap();
        assert!(validate_unitary_rep(&u, tol()).is_clean(), "{name}");
        let cov = validate_covariance(&psi, &u, &s, tol());
        assert!(cov.is_clean(), "{name}: {:?}", cov.violations);
        assert!(cov.tallies["covariance"].checked > 0, "{name}");

        let y = build_bowtie(&s, tol()).unwrap();
        let joint = pi_forward(&psi, &u, &y, tol()).unwrap();
        let rep = validate_toeplitz(&joint, tol());
        assert!(rep.is_clean(), "{name}: {:?}", rep.violations);
        let (psi2, u2) = pi_backward(&joint, &s).unwrap();
        assert!(rep_distance(&psi, &psi2) <= 1e-12, "{name}");
        assert!(unitary_distance(&u, &u2) <= 1e-12, "{name}");
        assert!(u2.notes.is_empty(), "{name}: {:?}", u2.notes);
        let joint2 = pi_forward(&psi2, &u2, &y, tol()).unwrap();
        assert!(rep_distance(&joint, &joint2) <= 1e-12, "{name}");
    }
}

#[test]
fn tilde_round_trips_and_transport() {
    for (name, s, radius) in homogeneous() {
        let psi = fock_for_system(&s, &fock_ball(&s.zs.p, radius)).unwrap();
        let u = build_fock_unitary(&s, &psi).unwrap();
        let z = build_tilde_bowtie(&s, tol()).unwrap();
        let tilde = pi_tilde_forward(&psi, &u, &z, tol()).unwrap();
        let rep = validate_toeplitz(&tilde, tol());
        assert!(rep.is_clean(), "{name}: {:?}", rep.violations);
        let (psi2, u2) = pi_tilde_backward(&tilde, &z).unwrap();
        assert!(rep_distance(&psi, &psi2) <= 1e-12, "{name}");
        assert!(unitary_distance(&u, &u2) <= 1e-12, "{name}");
        let again = pi_tilde_forward(&psi2, &u2, &z, tol()).unwrap();
        assert!(rep_distance(&tilde, &again) <= 1e-12, "{name}");

        let y = build_bowtie(&s, tol()).unwrap();
        let joint = transport_rep(&tilde, &z, &y, tol()).unwrap();
        let rep = validate_toeplitz(&joint, tol());
        assert!(rep.is_clean(), "{name}: {:?}", rep.violations);
        let (psi3, u3) = pi_backward(&joint, &s).unwrap();
        assert!(rep_distance(&psi, &psi3) <= 1e-12 && unitary_distance(&u, &u3) <= 1e-12, "{name}");
    }
}

#[test]
fn iota_matches_rank_one_operators() {
    for (name, s, _) in systems() {
        let y = build_bowtie(&s, tol()).unwrap();
        let rep = check_iota(&y, Tolerance::new(1e-12).unwrap());
        assert!(rep.is_clean(), "{name}: {:?}", rep.violations);
        assert!(rep.tallies["isometry"].checked > 0, "{name}");
    }
}

#[test]
fn cp_defects_agree_for_fock_truncations() {
    for (name, s, radius) in systems() {
        let psi = fock_for_system(&s, &fock_ball(&s.zs.p, radius)).unwrap();
        let u = build_fock_unitary(&s, &psi).unwrap();
        let y = build_bowtie(&s, tol()).unwrap();
        let joint = pi_forward(&psi, &u, &y, tol()).unwrap();
        let rep = check_cp_equivalence(&joint, &psi, &y, tol());
        assert!(rep.is_clean(), "{name}: {:?}", rep.violations);
        let e = psi.system.window.identity;
        assert!(cp_defect(&psi, e).unwrap() < 1e-12, "{name}");
        assert!((0..psi.psi.len()).any(|x| cp_defect(&psi, x).unwrap() > 0.5), "{name}");
    }
}

#[test]
fn fock_defect_over_n_is_one_and_scalar_defect_is_zero() {
    let s = trivial_system(ZsData::trivial(Semigroup::nk(1), Group::trivial()), 3, 0).unwrap();
    let psi = fock_for_system(&s, &fock_ball(&s.zs.p, 3)).unwrap();
    assert_eq!(psi.dim, 4);
    let one = s.system.window.position(&Semigroup::nk_elem(&[1])).unwrap();
    assert_eq!(cp_defect(&psi, one).unwrap(), 1.0);

    let y = build_bowtie(&s, tol()).unwrap();
    let scalar = scalar_rep(Arc::new(s.system.clone())).unwrap();
    let u = UnitaryRep::trivial(s.zs.g.clone(), s.gball.elements.clone(), 1, 1);
    let joint = pi_forward(&scalar, &u, &y, tol()).unwrap();
    let rep = check_cp_equivalence(&joint, &scalar, &y, tol());
    assert!(rep.is_clean(), "{:?}", rep.violations);
    for x in 0..joint.psi.len() {
        assert!(cp_defect(&joint, x).unwrap() < 1e-12);
    }
}

#[test]
fn fock_truncations_are_nica_covariant() {
    let n2 = trivial_system(ZsData::trivial(Semigroup::nk(2), Group::trivial()), 4, 0).unwrap();
    let free = trivial_system(ZsData::trivial(Semigroup::free_monoid(&['0', '1']), Group::trivial()), 3, 0).unwrap();
    for (name, s) in [("N2", n2), ("free monoid", free)] {
        let psi = fock_for_system(&s, &fock_ball(&s.zs.p, 2)).unwrap();
        let rep = check_nica(&psi, tol());
        assert!(rep.is_clean(), "{name}: {:?}", rep.violations);
        assert!(rep.worst_residual() <= 1e-9);
        assert!(rep.tallies["nica"].checked > 0);
    }

    let s = trivial_system(ZsData::trivial(Semigroup::free_monoid(&['0', '1']), Group::trivial()), 3, 0).unwrap();
    let psi = fock_for_system(&s, &fock_ball(&s.zs.p, 2)).unwrap();
    let w = &s.system.window;
    let p = w.position(&s.zs.p.word("0").unwrap()).unwrap();
    let q = w.position(&s.zs.p.word("1").unwrap()).unwrap();
    assert!(matches!(w.lcm(p, q).unwrap(), LcmEntry::Empty));
    let one = zslab_core::scalar::identity(1);
    assert!(nica_check(&psi, p, q, &one, &one).unwrap().unwrap() <= 1e-12);
}

#[test]
fn nica_equivalence_on_coordinate_swap() {
    let s = coordinate_swap_system(2).unwrap();
    let psi = fock_for_system(&s, &fock_ball(&s.zs.p, 2)).unwrap();
    let u = build_fock_unitary(&s, &psi).unwrap();
    let y = build_bowtie(&s, tol()).unwrap();
    let joint = pi_forward(&psi, &u, &y, tol()).unwrap();
    let rep = check_nica_equivalence(&joint, &y, Tolerance::new(1e-12).unwrap());
    assert!(rep.tallies["commuting-square"].violated == 0, "{:?}", rep.violations);
    assert!(rep.tallies["commuting-square"].checked > 0);
    let rep = check_nica_equivalence(&joint, &y, tol());
    assert!(rep.is_clean(), "{:?}", rep.violations);
    assert!(rep.tallies["residual-agreement"].checked > 0);

    let mut bad = joint.clone();
    let x = (0..bad.psi.len())
        .find(|&x| y.system.window.elements[x].g != s.zs.g.identity() && bad.psi[x].len() == 1)
        .unwrap();
    bad.psi[x][0] *= zslab_core::scalar::c(2.0, 0.0);
    assert!(check_nica_equivalence(&bad, &y, tol()).has_violation("residual-agreement"));
}
