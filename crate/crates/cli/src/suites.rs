//! Suite orchestration: builds the configured objects once and runs the
//! requested checks against them.

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Instant;

use thiserror::Error;
use zslab_core::bowtie::{structure_distance, validate_crossed_product};
use zslab_core::generators::{degree_restriction_maps, validate_kgraph, validate_selfsimilar};
use zslab_core::rep::{fock_ball, rep_distance, scalar_rep, unitary_distance};
use zslab_core::scalar::identity;
use zslab_core::{
    build_bowtie, build_fock_unitary, build_tilde_bowtie, cal_e_system, check_compactly_aligned, check_cp_equivalence, check_iota, check_nica,
    check_nica_equivalence, fock_for_system, is_homogeneous, kgraph_system, pi_backward, pi_forward, pi_tilde_backward, pi_tilde_forward,
    selfsimilar_beta, transport_rep, trivial_system, validate_covariance, validate_product_system, validate_toeplitz, validate_unitary_rep,
    validate_zs_action, zs_axiom_check, AlgebraError, BowtieSystem, Convention, JointRep, Semigroup, TildeBowtieSystem, ToeplitzRep, UnitaryRep,
    ViolationReport, ZsSystem,
};

use crate::config::{atoms_source, RepresentationKind, RunConfig, SystemSpec};
use crate::report::{SuiteReport, SuiteStatus, VerificationReport, WindowInfo, SCHEMA_VERSION};

/// Round trips are compared entrywise against this bound.
pub const ROUND_TRIP_EPS: f64 = 1e-12;

#[derive(Debug, Error)]
#[error("{stage}: {source}")]
pub struct RunError {
    pub stage: String,
    pub source: AlgebraError,
}

type Built<T> = Option<Result<T, AlgebraError>>;

struct Context<'a> {
    cfg: &'a RunConfig,
    system: Result<ZsSystem, AlgebraError>,
    bowtie: Built<BowtieSystem>,
    tilde: Built<TildeBowtieSystem>,
    pair: Built<(ToeplitzRep<Semigroup>, UnitaryRep)>,
    joint: Built<JointRep>,
}

fn build_system(cfg: &RunConfig) -> Result<ZsSystem, AlgebraError> {
    let w = cfg.windows;
    let mut s = match &cfg.system {
        SystemSpec::Trivial { zs } => trivial_system(zs.clone(), w.radius_p, w.radius_g)?,
        SystemSpec::SelfSimilar { graph, action, convention } => selfsimilar_beta(graph, action, w.radius_p, *convention)?,
        SystemSpec::KGraphBeta {
            graph,
            zs,
            convention,
            atoms,
            algebra,
        } => {
            let system = kgraph_system(graph, w.radius_p, *convention)?;
            let e = zs.g.identity();
            let mut atoms = atoms.clone();
            let mut algebra = algebra.clone();
            let unit_dims: Vec<usize> = (0..graph.k)
                .map(|i| {
                    let mut v = vec![0u32; graph.k];
                    v[i] = 1;
                    system
                        .window
                        .position(&zslab_core::SemigroupElement(v))
                        .map_or(0, |x| system.fibers[x].dim)
                })
                .collect();
            atoms.entry(e.clone()).or_insert_with(|| unit_dims.iter().map(|&d| identity(d)).collect());
            algebra.entry(e).or_insert_with(|| identity(system.coeff.dim()));
            let gball = zs.g.enumerate_ball(w.radius_g);
            ZsSystem::new(system, zs.clone(), gball, atoms_source(atoms, algebra))?
        }
    };
    for (g, p, m) in &cfg.beta_overrides {
        s.override_beta(g.clone(), p.clone(), m.clone());
    }
    Ok(s)
}

impl<'a> Context<'a> {
    fn new(cfg: &'a RunConfig) -> Self {
        Context {
            cfg,
            system: build_system(cfg),
            bowtie: None,
            tilde: None,
            pair: None,
            joint: None,
        }
    }

    fn system(&self) -> Result<&ZsSystem, AlgebraError> {
        self.system.as_ref().map_err(Clone::clone)
    }

    fn bowtie(&mut self) -> Result<&BowtieSystem, AlgebraError> {
        if self.bowtie.is_none() {
            let built = self.system().and_then(|s| build_bowtie(s, self.cfg.tolerance));
            self.bowtie = Some(built);
        }
        self.bowtie.as_ref().expect("just built").as_ref().map_err(Clone::clone)
    }

    fn tilde(&mut self) -> Result<&TildeBowtieSystem, AlgebraError> {
        if self.tilde.is_none() {
            let built = self.system().and_then(|s| build_tilde_bowtie(s, self.cfg.tolerance));
            self.tilde = Some(built);
        }
        self.tilde.as_ref().expect("just built").as_ref().map_err(Clone::clone)
    }

    fn pair(&mut self) -> Result<&(ToeplitzRep<Semigroup>, UnitaryRep), AlgebraError> {
        if self.pair.is_none() {
            let cfg = self.cfg;
            let built = self.system().and_then(|s| match cfg.representation {
                RepresentationKind::Fock => {
                    let psi = fock_for_system(s, &fock_ball(&s.zs.p, cfg.windows.fock_ball))?;
                    let u = build_fock_unitary(s, &psi)?;
                    Ok((psi, u))
                }
                RepresentationKind::Scalar => {
                    let psi = scalar_rep(Arc::new(s.system.clone()))?;
                    let u = UnitaryRep::trivial(s.zs.g.clone(), s.gball.elements.clone(), 1, 1);
                    Ok((psi, u))
                }
            });
            self.pair = Some(built);
        }
        self.pair.as_ref().expect("just built").as_ref().map_err(Clone::clone)
    }

    fn joint(&mut self) -> Result<&JointRep, AlgebraError> {
        if self.joint.is_none() {
            let tol = self.cfg.tolerance;
            let built = match (self.pair().cloned(), self.bowtie().cloned()) {
                (Ok((psi, u)), Ok(y)) => pi_forward(&psi, &u, &y, tol),
                (Err(e), _) | (_, Err(e)) => Err(e),
            };
            self.joint = Some(built);
        }
        self.joint.as_ref().expect("just built").as_ref().map_err(Clone::clone)
    }

    fn run(&mut self, name: &str) -> Result<ViolationReport, AlgebraError> {
        let tol = self.cfg.tolerance;
        let w = self.cfg.windows;
        let mut rep = ViolationReport::new();
        match name {
            "zs-axioms" => {
                let s = self.system()?;
                let pball = s.zs.p.enumerate_ball(w.radius_p);
                rep = zs_axiom_check(&s.zs, &pball, &s.gball);
            }
            "action-axioms" => rep = validate_zs_action(self.system()?, tol),
            "bowtie" => {
                let y = self.bowtie()?;
                rep.merge_prefixed("product-system", validate_product_system(&y.system, tol));
                rep.merge_prefixed("iota", check_iota(y, tol));
                rep.note(format!("window of {} elements of P⋈G", y.system.window.len()));
            }
            "bowtie-tilde" => {
                let z = self.tilde()?;
                rep.merge_prefixed("product-system", validate_product_system(&z.system, tol));
                rep.merge_prefixed("crossed-product", validate_crossed_product(&z.crossed, tol));
                rep.note(format!(
                    "coefficient algebra of dimension {} with centre of dimension {}",
                    z.crossed.algebra.dim(),
                    z.crossed.center_dim()
                ));
            }
            "toeplitz" => {
                let (psi, u) = self.pair()?;
                rep.merge_prefixed("psi", validate_toeplitz(psi, tol));
                rep.merge_prefixed("unitary", validate_unitary_rep(u, tol));
                rep.note(format!("representation space of dimension {}", psi.dim));
                let joint = self.joint()?;
                rep.merge_prefixed("joint", validate_toeplitz(joint, tol));
            }
            "covariance" => {
                let (psi, u) = self.pair()?.clone();
                rep = validate_covariance(&psi, &u, self.system()?, tol);
            }
            "round-trip" => {
                let (psi, u) = self.pair()?.clone();
                let joint = self.joint()?.clone();
                let s = self.system()?.clone();
                let y = self.bowtie()?.clone();
                let (psi2, u2) = pi_backward(&joint, &s)?;
                rep.check("pi-psi", rep_distance(&psi, &psi2), ROUND_TRIP_EPS, || {
                    "ψ vs pi_backward(pi_forward(ψ, U))".into()
                });
                rep.check("pi-unitary", unitary_distance(&u, &u2), ROUND_TRIP_EPS, || {
                    "U vs pi_backward(pi_forward(ψ, U))".into()
                });
                let joint2 = pi_forward(&psi2, &u2, &y, tol)?;
                rep.check("pi-joint", rep_distance(&joint, &joint2), ROUND_TRIP_EPS, || {
                    "Ψ vs pi_forward(pi_backward(Ψ))".into()
                });
                for n in &u2.notes {
                    rep.note(n.clone());
                }
                if is_homogeneous(&s) && s.zs.g.order().is_some() {
                    let z = self.tilde()?.clone();
                    let tilde = pi_tilde_forward(&psi, &u, &z, tol)?;
                    rep.merge_prefixed("tilde-rep", validate_toeplitz(&tilde, tol));
                    let (psi3, u3) = pi_tilde_backward(&tilde, &z)?;
                    rep.check("tilde-psi", rep_distance(&psi, &psi3), ROUND_TRIP_EPS, || {
                        "ψ vs the pair extracted from Ψ̃".into()
                    });
                    rep.check("tilde-unitary", unitary_distance(&u, &u3), ROUND_TRIP_EPS, || {
                        "U vs the pair extracted from Ψ̃".into()
                    });
                    let again = pi_tilde_forward(&psi3, &u3, &z, tol)?;
                    rep.check("tilde-rep-round-trip", rep_distance(&tilde, &again), ROUND_TRIP_EPS, || {
                        "Ψ̃ round trip".into()
                    });
                    let moved = transport_rep(&tilde, &z, &y, tol)?;
                    rep.merge_prefixed("transport", validate_toeplitz(&moved, tol));
                    rep.check("transport-agreement", rep_distance(&moved, &joint), ROUND_TRIP_EPS, || {
                        "transported Ψ̃ vs Ψ".into()
                    });
                } else {
                    rep.note("X⋈̃G round trips need a homogeneous action of a finite group; skipped");
                }
            }
            "cp" => {
                let (psi, _) = self.pair()?.clone();
                let joint = self.joint()?.clone();
                let y = self.bowtie()?;
                rep = check_cp_equivalence(&joint, &psi, y, tol);
            }
            "nica" => {
                let (psi, _) = self.pair()?.clone();
                let joint = self.joint()?.clone();
                let s = self.system()?;
                rep.merge_prefixed("compact-alignment", check_compactly_aligned(&s.system, tol));
                rep.merge_prefixed("psi", check_nica(&psi, tol));
                let y = self.bowtie()?;
                rep.merge(check_nica_equivalence(&joint, y, tol));
            }
            "generators" => rep = self.generators()?,
            other => unreachable!("suite names are validated at parse time: {other}"),
        }
        Ok(rep)
    }

    fn generators(&mut self) -> Result<ViolationReport, AlgebraError> {
        let tol = self.cfg.tolerance;
        let radius = self.cfg.windows.radius_p;
        let mut rep = ViolationReport::new();
        let (graph, action, convention) = match &self.cfg.system {
            SystemSpec::SelfSimilar { graph, action, convention } => (graph, Some(action), *convention),
            SystemSpec::KGraphBeta { graph, convention, .. } => (graph, None, *convention),
            SystemSpec::Trivial { .. } => unreachable!("checked by applicability"),
        };
        rep.merge_prefixed("kgraph", validate_kgraph(graph, radius));
        let x = kgraph_system(graph, radius, convention)?;
        rep.touch("dimension");
        for (p, f) in x.window.elements.iter().zip(&x.fibers) {
            let n = graph.morphisms(p).len();
            rep.expect("dimension", f.dim == n, || format!("p={p:?}: dim {} vs {n} morphisms", f.dim));
        }
        let Some(action) = action else {
            return Ok(rep);
        };
        rep.merge_prefixed("self-similar", validate_selfsimilar(graph, action, radius));
        rep.touch("restriction-condition");
        match degree_restriction_maps(graph, action, radius) {
            Ok(_) => rep.pass("restriction-condition", 0.0),
            Err(AlgebraError::Refused { reason, .. }) => {
                rep.fail("restriction-condition", reason, f64::INFINITY);
                return Ok(rep);
            }
            Err(e) => return Err(e),
        }
        let mut holds = Vec::new();
        for conv in [Convention::Source, Convention::Range] {
            let s = selfsimilar_beta(graph, action, radius, conv)?;
            let a6 = validate_zs_action(&s, tol);
            if !a6.has_violation("A6") {
                holds.push(format!("{conv:?}").to_lowercase());
            }
        }
        rep.note(format!("A6 holds under conventions: [{}]", holds.join(", ")));
        if action.group.order().is_some() {
            let e = cal_e_system(graph, action, radius, tol)?;
            let z = self.tilde()?;
            let d = structure_distance(&e, &z.system);
            rep.check("cal-e-coincidence", d, ROUND_TRIP_EPS, || "ℰ vs X⋈̃G structure tensors".into());
        }
        Ok(rep)
    }

    fn applicable(&self, name: &str) -> Option<String> {
        let s = self.system.as_ref().ok();
        match name {
            "bowtie-tilde" => match s {
                Some(s) if !is_homogeneous(s) => Some("the action is not homogeneous".into()),
                Some(s) if s.zs.g.order().is_none() => Some("the group is infinite".into()),
                _ => None,
            },
            "generators" => matches!(self.cfg.system, SystemSpec::Trivial { .. }).then(|| "no k-graph in this configuration".into()),
            _ => None,
        }
    }
}

pub fn run_suites(cfg: &RunConfig) -> Result<VerificationReport, RunError> {
    let start = Instant::now();
    let mut ctx = Context::new(cfg);
    if let Err(e) = &ctx.system {
        if !matches!(e, AlgebraError::Refused { .. }) {
            return Err(RunError {
                stage: "system".into(),
                source: e.clone(),
            });
        }
    }
    let mut suites = Vec::new();
    for name in &cfg.suites {
        if let Some(reason) = ctx.applicable(name) {
            suites.push(SuiteReport::without_checks(name, SuiteStatus::NotApplicable, reason));
            continue;
        }
        let out = match ctx.run(name) {
            Ok(rep) => SuiteReport::from_violations(name, &rep, cfg.witness_cap),
            Err(AlgebraError::Refused { reason, report }) => {
                let mut rep = ViolationReport::new();
                rep.fail("construction", reason, f64::INFINITY);
                if let Some(r) = report {
                    rep.merge(*r);
                }
                let mut out = SuiteReport::from_violations(name, &rep, cfg.witness_cap);
                if name != "generators" && ctx.system.is_err() {
                    out.status = SuiteStatus::Blocked;
                }
                out
            }
            Err(e) => {
                return Err(RunError {
                    stage: name.clone(),
                    source: e,
                })
            }
        };
        suites.push(out);
    }
    let passed = suites.iter().all(|s| matches!(s.status, SuiteStatus::Pass | SuiteStatus::NotApplicable));
    Ok(VerificationReport {
        schema_version: SCHEMA_VERSION,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        config_name: cfg.name.clone(),
        config_hash: cfg.text_hash.clone(),
        windows: WindowInfo {
            radius_p: cfg.windows.radius_p,
            radius_g: cfg.windows.radius_g,
            fock_ball: cfg.windows.fock_ball,
        },
        tolerance: cfg.tolerance.eps,
        passed,
        suites,
        wall_time_ms: start.elapsed().as_millis() as u64,
    })
}

/// Suites restricted to a subset, keeping configuration order.
pub fn select_suites(cfg: &mut RunConfig, names: &[String]) -> Result<(), String> {
    let known: BTreeMap<&str, ()> = crate::config::SUITES.iter().map(|s| (*s, ())).collect();
    let mut out = Vec::new();
    for n in names {
        if n == "all" {
            out.extend(crate::config::SUITES.iter().map(|s| s.to_string()));
        } else if known.contains_key(n.as_str()) {
            out.push(n.clone());
        } else {
            return Err(format!("unknown suite '{n}'"));
        }
    }
    out.dedup();
    cfg.suites = out;
    Ok(())
}
