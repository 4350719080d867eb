use proptest::prelude::*;

use zslab_core::generators::examples::odometer_system;
use zslab_core::rep::{compact_samples, fock_ball};
use zslab_core::scalar::{c, identity, zeros};
use zslab_core::{
    check_nica, cp_defect, fock_for_system, nica_check, odometer_zs, trivial_system, validate_toeplitz, zs_axiom_check, ComplexMatrix, Group,
    GroupElement, LcmEntry, Semigroup, SemigroupElement, Tolerance, ZsData,
};

fn unitary(n: usize, entries: &[(f64, f64)]) -> ComplexMatrix {
    let mut h = zeros(n, n);
    let mut it = entries.iter().cycle();
    for i in 0..n {
        for j in i..n {
            let &(re, im) = it.next().unwrap();
            let z = if i == j { c(re, 0.0) } else { c(re, im) };
            h[(i, j)] = z;
            h[(j, i)] = z.conj();
        }
    }
    (h * c(0.0, 1.0)).exp()
}

fn increment(word: &[u32], n: i64) -> (Vec<u32>, i64) {
    let len = word.len() as u32;
    let value: i64 = word.iter().enumerate().map(|(i, &b)| i64::from(b) << i).sum();
    let total = value + n;
    let modulus = 1i64 << len;
    let out = (0..len).map(|i| (total.rem_euclid(modulus) >> i) as u32 & 1).collect();
    (out, total.div_euclid(modulus))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn odometer_is_binary_addition(word in prop::collection::vec(0u32..2, 0..8), n in -20i64..20) {
        let d = odometer_zs();
        let p = SemigroupElement(word.clone());
        let (image, restriction) = d.evaluate(&GroupElement(vec![n]), &p).unwrap();
        let (want, carry) = increment(&word, n);
        prop_assert_eq!(image.0, want);
        prop_assert_eq!(restriction, GroupElement(vec![carry]));
    }

    #[test]
    fn zs_tallies_account_for_every_tuple(pr in 0usize..4, gr in 0usize..3) {
        let d = odometer_zs();
        let pb = d.p.enumerate_ball(pr);
        let gb = d.g.enumerate_ball(gr);
        let rep = zs_axiom_check(&d, &pb, &gb);
        let (np, ng) = (pb.len() as u64, gb.len() as u64);
        let total = |t: &str| rep.tallies[t].checked + rep.tallies[t].skipped;
        for t in ["ZS1", "ZS7"] { prop_assert_eq!(total(t), np); }
        for t in ["ZS3", "ZS4"] { prop_assert_eq!(total(t), ng); }
        for t in ["ZS2", "ZS8"] { prop_assert_eq!(total(t), ng * ng * np); }
        for t in ["ZS5", "ZS6"] { prop_assert_eq!(total(t), ng * np * np); }
        prop_assert!(rep.is_clean());
    }

    #[test]
    fn defects_and_nica_residuals_survive_conjugation(
        k in 1usize..3,
        entries in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..12),
    ) {
        let s = trivial_system(ZsData::trivial(Semigroup::nk(k), Group::trivial()), 3, 0).unwrap();
        let psi = fock_for_system(&s, &fock_ball(&s.zs.p, 2)).unwrap();
        let w = unitary(psi.dim, &entries);
        prop_assert!(zslab_core::scalar::max_abs_diff(&(w.adjoint() * &w), &identity(psi.dim)).unwrap() < 1e-10);
        let moved = psi.conjugate(&w);
        prop_assert!(validate_toeplitz(&moved, Tolerance::default()).is_clean());
        prop_assert!(check_nica(&moved, Tolerance::default()).is_clean());
        let win = &s.system.window;
        for x in 0..win.len() {
            prop_assert!((cp_defect(&psi, x).unwrap() - cp_defect(&moved, x).unwrap()).abs() < 1e-10);
        }
        let t = compact_samples(&s.system.fibers[0])[0].clone();
        for p in 0..win.len() {
            for q in 0..win.len() {
                if matches!(win.lcm(p, q), Ok(LcmEntry::Outside)) { continue; }
                let a = nica_check(&psi, p, q, &t, &t).unwrap();
                let b = nica_check(&moved, p, q, &t, &t).unwrap();
                match (a, b) {
                    (Some(a), Some(b)) => prop_assert!((a - b).abs() < 1e-10),
                    (a, b) => prop_assert_eq!(a.is_some(), b.is_some()),
                }
            }
        }
    }

    #[test]
    fn fock_pairs_stay_covariant_over_windows(pr in 1usize..4, gr in 1usize..4, ball in 0usize..3) {
        let s = odometer_system(pr, gr).unwrap();
        let ball = ball.min(pr);
        let psi = fock_for_system(&s, &fock_ball(&s.zs.p, ball)).unwrap();
        let u = zslab_core::build_fock_unitary(&s, &psi).unwrap();
        let rep = zslab_core::validate_covariance(&psi, &u, &s, Tolerance::default());
        prop_assert!(rep.is_clean(), "{:?}", rep.violations);
    }
}
