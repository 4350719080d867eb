//! Runs the ten acceptance criteria and prints one PASS/FAIL line for each.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::sync::Arc;
use std::time::Instant;

use zslab_cli::{SuiteStatus, VerificationReport};
use zslab_core::bowtie::{structure_distance, validate_crossed_product};
use zslab_core::generators::degree_restriction_maps;
use zslab_core::generators::examples::{
    coordinate_swap_system, odometer_system, swap_loops_action, swap_loops_system, twisted_two_vertex_system, two_loop_graph, two_vertex_graph,
};
use zslab_core::rep::{fock_ball, rep_distance, scalar_rep, unitary_distance};
use zslab_core::scalar::{c, from_rows, identity};
use zslab_core::{
    build_bowtie, build_crossed_product, build_fock_unitary, build_tilde_bowtie, cal_e_system, check_cp_equivalence, check_iota, check_nica,
    check_nica_equivalence, cp_defect, fock_for_system, is_homogeneous, kgraph_system, nica_check, odometer_zs, pi_backward, pi_forward,
    pi_tilde_backward, pi_tilde_forward, selfsimilar_beta, transport_rep, trivial_system, validate_covariance, validate_product_system,
    validate_toeplitz, validate_unitary_rep, zs_axiom_check, AlgebraError, Convention, FiniteCStarAlgebra, Group, GroupElement, LcmEntry,
    SelfSimilarKGraphAction, Semigroup, Tolerance, UnitaryRep, ViolationReport, ZsData, ZsSystem,
};

type Outcome = Result<String, String>;

fn tol() -> Tolerance {
    Tolerance::default()
}

fn exact() -> Tolerance {
    Tolerance::new(1e-12).unwrap()
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn clean(name: &str, rep: &ViolationReport) -> Result<(), String> {
    ensure(rep.is_clean(), || {
        let first = rep.violations.first().map(|v| format!("{}: {}", v.tag, v.witness)).unwrap_or_default();
        format!("{name}: {} violations, first {first}", rep.violations.len())
    })
}

fn ok<T, E: std::fmt::Display>(r: Result<T, E>, what: &str) -> Result<T, String> {
    r.map_err(|e| format!("{what}: {e}"))
}

fn cases() -> Result<Vec<(&'static str, ZsSystem, usize)>, String> {
    Ok(vec![
        ("odometer", ok(odometer_system(3, 2), "odometer")?, 2),
        ("swap loops", ok(swap_loops_system(3), "swap loops")?, 2),
        ("twisted", ok(twisted_two_vertex_system(2), "twisted")?, 1),
        ("coordinate swap", ok(coordinate_swap_system(2), "coordinate swap")?, 1),
    ])
}

fn criterion_1() -> Outcome {
    let d = odometer_zs();
    let pb = d.p.enumerate_ball(4);
    let gb = d.g.enumerate_ball(3);
    ensure((pb.len(), gb.len()) == (31, 7), || format!("window {}×{}", pb.len(), gb.len()))?;
    let start = Instant::now();
    let rep = zs_axiom_check(&d, &pb, &gb);
    let secs = start.elapsed().as_secs_f64();
    clean("odometer", &rep)?;
    ensure(secs < 1.0, || format!("took {secs:.2}s"))?;

    let table = d.tabulate(&pb, &gb);
    let mut tried = 0;
    for g in gb.iter() {
        for p in pb.iter() {
            let value = ok(d.restrict(g, p), "restrict")?;
            for shift in [-1, 1] {
                let wrong = GroupElement(vec![value.0[0] + shift]);
                let mut t = table.clone();
                ok(t.set_restriction(g, p, wrong.clone()), "tamper")?;
                tried += 1;
                ensure(!zs_axiom_check(&t, &pb, &gb).is_clean(), || {
                    format!("undetected {} -> {}", d.show_pair(g, p), d.g.show(&wrong))
                })?;
            }
        }
    }
    Ok(format!(
        "{} checks clean in {:.0} ms, {tried} tampers detected",
        rep.total_checked(),
        secs * 1e3
    ))
}

fn criterion_2() -> Outcome {
    let mut worst: f64 = 0.0;
    for (name, s, _) in cases()?.into_iter().take(3) {
        let start = Instant::now();
        let y = ok(build_bowtie(&s, tol()), name)?;
        let rep = validate_product_system(&y.system, tol());
        clean(name, &rep)?;
        let secs = start.elapsed().as_secs_f64();
        ensure(secs < 10.0, || format!("{name} took {secs:.1}s"))?;
        ensure(rep.tallies["unitarity"].checked > 0 && rep.tallies["associativity"].checked > 0, || {
            format!("{name}: nothing checked")
        })?;
        worst = worst.max(rep.worst_residual());
    }
    Ok(format!("worst residual {worst:.1e}"))
}

fn criterion_3() -> Outcome {
    for (name, s, _) in cases()? {
        if !is_homogeneous(&s) {
            continue;
        }
        let z = ok(build_tilde_bowtie(&s, tol()), name)?;
        clean(name, &validate_product_system(&z.system, tol()))?;
        clean(name, &validate_crossed_product(&z.crossed, tol()))?;
    }
    let alg = Arc::new(FiniteCStarAlgebra::diagonal(2));
    let swap = from_rows(&[vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(1.0, 0.0), c(0.0, 0.0)]]);
    let beta = move |g: &GroupElement| Ok(if g.0[0] == 0 { identity(2) } else { swap.clone() });
    let cp = ok(build_crossed_product(alg, Group::cyclic(2), &beta, tol()), "C^2 x Z/2")?;
    clean("C^2 x Z/2", &validate_crossed_product(&cp, tol()))?;
    ensure(cp.algebra.dim() == 4 && cp.center_dim() == 1, || {
        format!("dim {} centre {}", cp.algebra.dim(), cp.center_dim())
    })?;
    Ok("swap loops and twisted clean; C^2 x Z/2 has dimension 4, centre 1".into())
}

fn criterion_4() -> Outcome {
    let mut worst: f64 = 0.0;
    for (name, s, radius) in cases()? {
        let psi = ok(fock_for_system(&s, &fock_ball(&s.zs.p, radius)), name)?;
        let u = ok(build_fock_unitary(&s, &psi), name)?;
        clean(name, &validate_unitary_rep(&u, tol()))?;
        let cov = validate_covariance(&psi, &u, &s, tol());
        clean(name, &cov)?;
        let y = ok(build_bowtie(&s, tol()), name)?;
        let joint = ok(pi_forward(&psi, &u, &y, tol()), name)?;
        let (psi2, u2) = ok(pi_backward(&joint, &s), name)?;
        let joint2 = ok(pi_forward(&psi2, &u2, &y, tol()), name)?;
        let err = rep_distance(&psi, &psi2)
            .max(unitary_distance(&u, &u2))
            .max(rep_distance(&joint, &joint2));
        ensure(err <= 1e-12, || format!("{name}: round trip error {err:.1e}"))?;
        worst = worst.max(err);
    }
    Ok(format!("worst round-trip error {worst:.1e}"))
}

fn criterion_5() -> Outcome {
    let mut n = 0;
    for (name, s, radius) in cases()? {
        if !is_homogeneous(&s) {
            continue;
        }
        let psi = ok(fock_for_system(&s, &fock_ball(&s.zs.p, radius)), name)?;
        let u = ok(build_fock_unitary(&s, &psi), name)?;
        let z = ok(build_tilde_bowtie(&s, tol()), name)?;
        let tilde = ok(pi_tilde_forward(&psi, &u, &z, tol()), name)?;
        clean(name, &validate_toeplitz(&tilde, tol()))?;
        let (psi2, u2) = ok(pi_tilde_backward(&tilde, &z), name)?;
        let again = ok(pi_tilde_forward(&psi2, &u2, &z, tol()), name)?;
        let err = rep_distance(&psi, &psi2).max(unitary_distance(&u, &u2)).max(rep_distance(&tilde, &again));
        ensure(err <= 1e-12, || format!("{name}: round trip error {err:.1e}"))?;
        let y = ok(build_bowtie(&s, tol()), name)?;
        let joint = ok(transport_rep(&tilde, &z, &y, tol()), name)?;
        clean(name, &validate_toeplitz(&joint, tol()))?;
        n += 1;
    }
    ensure(n == 2, || format!("{n} homogeneous cases"))?;
    Ok("swap loops and twisted round trip; transports are Toeplitz".into())
}

fn criterion_6() -> Outcome {
    let mut checked = 0;
    for (name, s, _) in cases()? {
        let y = ok(build_bowtie(&s, tol()), name)?;
        let rep = check_iota(&y, exact());
        clean(name, &rep)?;
        checked += rep.total_checked();
    }
    Ok(format!("{checked} checks within 1e-12"))
}

fn criterion_7() -> Outcome {
    for (name, s, radius) in cases()? {
        let psi = ok(fock_for_system(&s, &fock_ball(&s.zs.p, radius)), name)?;
        let u = ok(build_fock_unitary(&s, &psi), name)?;
        let y = ok(build_bowtie(&s, tol()), name)?;
        let joint = ok(pi_forward(&psi, &u, &y, tol()), name)?;
        clean(name, &check_cp_equivalence(&joint, &psi, &y, tol()))?;
    }
    let s = ok(trivial_system(ZsData::trivial(Semigroup::nk(1), Group::trivial()), 3, 0), "N")?;
    let psi = ok(fock_for_system(&s, &fock_ball(&s.zs.p, 3)), "N")?;
    let one = s.system.window.position(&Semigroup::nk_elem(&[1])).ok_or("1 outside the window")?;
    let d = ok(cp_defect(&psi, one), "defect")?;
    ensure(d == 1.0, || format!("Fock defect at 1 is {d}"))?;
    let y = ok(build_bowtie(&s, tol()), "N")?;
    let scalar = ok(scalar_rep(Arc::new(s.system.clone())), "scalar")?;
    let u = UnitaryRep::trivial(s.zs.g.clone(), s.gball.elements.clone(), 1, 1);
    let joint = ok(pi_forward(&scalar, &u, &y, tol()), "scalar")?;
    clean("scalar", &check_cp_equivalence(&joint, &scalar, &y, tol()))?;
    for x in 0..joint.psi.len() {
        let d = ok(cp_defect(&joint, x), "defect")?;
        ensure(d < 1e-12, || format!("scalar defect {d}"))?;
    }
    Ok("defects agree; Fock defect over N at 1 is exactly 1".into())
}

fn criterion_8() -> Outcome {
    let n2 = ok(trivial_system(ZsData::trivial(Semigroup::nk(2), Group::trivial()), 4, 0), "N2")?;
    let free = ok(
        trivial_system(ZsData::trivial(Semigroup::free_monoid(&['0', '1']), Group::trivial()), 3, 0),
        "free",
    )?;
    let mut worst: f64 = 0.0;
    for (name, s) in [("N2", &n2), ("free monoid", &free)] {
        let psi = ok(fock_for_system(s, &fock_ball(&s.zs.p, 2)), name)?;
        let rep = check_nica(&psi, tol());
        clean(name, &rep)?;
        worst = worst.max(rep.worst_residual());
    }
    let psi = ok(fock_for_system(&free, &fock_ball(&free.zs.p, 2)), "free")?;
    let w = &free.system.window;
    let p = w.position(&ok(free.zs.p.word("0"), "word")?).ok_or("0 outside")?;
    let q = w.position(&ok(free.zs.p.word("1"), "word")?).ok_or("1 outside")?;
    ensure(matches!(w.lcm(p, q), Ok(LcmEntry::Empty)), || "0 and 1 have a common extension".into())?;
    let r = ok(nica_check(&psi, p, q, &identity(1), &identity(1)), "nica")?.ok_or("empty safe domain")?;
    ensure(r <= 1e-12, || format!("empty-intersection residual {r:.1e}"))?;

    let s = ok(coordinate_swap_system(2), "coordinate swap")?;
    let psi = ok(fock_for_system(&s, &fock_ball(&s.zs.p, 2)), "coordinate swap")?;
    let u = ok(build_fock_unitary(&s, &psi), "coordinate swap")?;
    let y = ok(build_bowtie(&s, tol()), "coordinate swap")?;
    let joint = ok(pi_forward(&psi, &u, &y, tol()), "coordinate swap")?;
    let squares = check_nica_equivalence(&joint, &y, exact());
    ensure(squares.tallies["commuting-square"].violated == 0, || {
        "commuting square fails at 1e-12".into()
    })?;
    clean("coordinate swap", &check_nica_equivalence(&joint, &y, tol()))?;
    Ok(format!("worst Nica residual {worst:.1e}; empty intersection and equivalence clean"))
}

fn criterion_9() -> Outcome {
    for (name, l) in [("two loops", two_loop_graph()), ("two vertex", two_vertex_graph())] {
        for conv in [Convention::Source, Convention::Range] {
            let x = ok(kgraph_system(&l, 4, conv), name)?;
            for (p, f) in x.window.elements.iter().zip(&x.fibers) {
                ensure(f.dim == l.morphisms(p).len(), || format!("{name}: dimension {} at {p:?}", f.dim))?;
            }
        }
    }
    let bad = SelfSimilarKGraphAction {
        group: Group::cyclic(2),
        vertex: vec![vec![0], vec![0]],
        edge: vec![vec![0, 1], vec![0, 1]],
        restriction: vec![vec![0, 0], vec![0, 1]],
    };
    let witness = match degree_restriction_maps(&two_loop_graph(), &bad, 2) {
        Err(AlgebraError::Refused { reason, .. }) if reason.contains("μ=a") && reason.contains("ν=b") => reason,
        other => return Err(format!("restriction violation not reported: {other:?}")),
    };
    let trivial = ok(SelfSimilarKGraphAction::trivial(&two_vertex_graph(), Group::cyclic(2)), "trivial action")?;
    let mut worst: f64 = 0.0;
    for (name, l, a) in [
        ("swap loops", two_loop_graph(), swap_loops_action()),
        ("trivial", two_vertex_graph(), trivial),
    ] {
        let e = ok(cal_e_system(&l, &a, 3, tol()), name)?;
        let s = ok(selfsimilar_beta(&l, &a, 3, Convention::Source), name)?;
        let z = ok(build_tilde_bowtie(&s, tol()), name)?;
        let d = structure_distance(&e, &z.system);
        ensure(d <= 1e-12, || format!("{name}: distance {d:.1e}"))?;
        worst = worst.max(d);
    }
    Ok(format!("dimensions exact; witness '{witness}'; coincidence within {worst:.1e}"))
}

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(format!("{name}.toml"))
}

fn run_config(name: &str, dir: &Path) -> Result<(i32, VerificationReport), String> {
    let out = dir.join(format!("{name}.json"));
    let o = Command::new(env!("CARGO_BIN_EXE_zslab"))
        .args(["verify", "--config", config(name).to_str().unwrap(), "--out", out.to_str().unwrap()])
        .output()
        .map_err(|e| e.to_string())?;
    let code = o.status.code().ok_or("killed by a signal")?;
    let text = std::fs::read_to_string(&out).map_err(|e| format!("{name}: no report ({e}); {}", String::from_utf8_lossy(&o.stderr)))?;
    Ok((code, serde_json::from_str(&text).map_err(|e| e.to_string())?))
}

fn suite<'a>(r: &'a VerificationReport, name: &str) -> Result<&'a zslab_cli::SuiteReport, String> {
    r.suites
        .iter()
        .find(|s| s.name == name)
        .ok_or_else(|| format!("{}: no {name} suite", r.config_name))
}

fn passes(r: &VerificationReport, name: &str) -> Result<(), String> {
    let s = suite(r, name)?;
    ensure(s.status == SuiteStatus::Pass && s.checked > 0, || {
        format!("{}: {name} is {:?}", r.config_name, s.status)
    })
}

fn criterion_10() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let dir = dir.path();
    let expected: [(&str, &[&str]); 9] = [
        ("odometer-axioms", &["zs-axioms", "action-axioms"]),
        ("odometer", &["bowtie", "toeplitz", "covariance", "round-trip", "cp", "nica"]),
        (
            "swap-loops",
            &["bowtie", "bowtie-tilde", "covariance", "round-trip", "cp", "nica", "generators"],
        ),
        (
            "twisted",
            &["bowtie", "bowtie-tilde", "covariance", "round-trip", "cp", "nica", "generators"],
        ),
        ("coordinate-swap", &["bowtie", "covariance", "round-trip", "cp", "nica"]),
        ("n-fock", &["cp", "nica"]),
        ("n-scalar", &["cp"]),
        ("n2-nica", &["nica"]),
        ("free-nica", &["nica"]),
    ];
    for (name, suites) in expected {
        let (code, r) = run_config(name, dir)?;
        ensure(code == 0 && r.passed, || format!("{name}: exit {code}"))?;
        for s in suites {
            passes(&r, s)?;
        }
    }
    let (_, fock) = run_config("n-fock", dir)?;
    ensure(suite(&fock, "cp")?.notes.iter().any(|n| n.contains(" 1=1.000000")), || {
        "n-fock: defect at 1 is not 1".into()
    })?;
    for name in ["swap-loops", "twisted"] {
        let (_, r) = run_config(name, dir)?;
        ensure(suite(&r, "round-trip")?.checks.contains_key("transport-agreement"), || {
            format!("{name}: no transport check")
        })?;
    }

    let (_, a) = run_config("odometer", dir)?;
    let (_, b) = run_config("odometer", dir)?;
    ensure(a.normalized() == b.normalized(), || "odometer reports differ between runs".into())?;
    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/odometer.json");
    let golden: VerificationReport = serde_json::from_str(&std::fs::read_to_string(golden).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    ensure(golden.config_hash == a.config_hash && golden.suites.len() == a.suites.len(), || {
        "golden report mismatch".into()
    })?;
    for (g, s) in golden.suites.iter().zip(&a.suites) {
        ensure(
            (g.status, g.checked, g.skipped, g.violated) == (s.status, s.checked, s.skipped, s.violated),
            || format!("golden mismatch in {}", s.name),
        )?;
    }

    let (code, r) = run_config("tampered-odometer", dir)?;
    ensure(code == 1, || format!("tampered config exited {code}"))?;
    let zs = suite(&r, "zs-axioms")?;
    ensure(zs.witnesses.iter().any(|w| w.witness == "g=a, h=a, p=1: a vs e"), || {
        format!("witnesses {:?}", zs.witnesses)
    })?;
    let (code, r) = run_config("tampered-beta", dir)?;
    ensure(code == 1 && suite(&r, "action-axioms")?.status == SuiteStatus::Fail, || {
        format!("tampered β exited {code}")
    })?;
    Ok("shipped configs exit 0; golden stable; tampered configs exit 1 with witnesses".into())
}

fn main() -> ExitCode {
    let criteria: [(usize, fn() -> Outcome); 10] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
        (10, criterion_10),
    ];
    let mut failed = 0;
    for (n, f) in criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        let ms = start.elapsed().as_millis();
        match outcome {
            Ok(detail) => println!("criterion {n}: PASS ({detail}; {ms} ms)"),
            Err(why) => {
                failed += 1;
                println!("criterion {n}: FAIL ({why})");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
