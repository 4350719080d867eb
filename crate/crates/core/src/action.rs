//! Zappa-Szép actions β = {β_g^p} on a product system over P and the axiom
//! suite A1-A6.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use crate::error::{AlgebraError, Result};
use crate::product_system::ProductSystem;
use crate::report::ViolationReport;
use crate::scalar::{check_star_homomorphism, identity, max_abs_diff, pinv, rank, ComplexMatrix, ComplexVector, Tolerance};
use crate::semigroup::{Ball, GroupElement, IndexMonoid, Semigroup, SemigroupElement, SemigroupKind};
use crate::zs::ZsData;

/// β_g^p as a matrix X_p → X_{g·p}.
pub type BetaFn = Arc<dyn Fn(&GroupElement, &SemigroupElement) -> Result<ComplexMatrix> + Send + Sync>;
/// β_g on the degree-one fiber of the i-th atom (unit vector or letter).
pub type AtomFn = Arc<dyn Fn(&GroupElement, usize) -> Result<ComplexMatrix> + Send + Sync>;
/// β_g on 𝒜 in the coordinates of the algebra basis.
pub type AlgebraFn = Arc<dyn Fn(&GroupElement) -> Result<ComplexMatrix> + Send + Sync>;

#[derive(Clone)]
pub enum BetaSource {
    Direct(BetaFn),
    /// Degree-one data extended through A5:
    /// β_g^{ap} = M_{g·a, g|_a·p}(β_g^a ⊗ β_{g|_a}^p)M_{a,p}⁻¹.
    Atoms {
        atom: AtomFn,
        algebra: AlgebraFn,
    },
}

type BetaKey = (GroupElement, SemigroupElement);

/// A product system over P with a Zappa-Szép action of G.
#[derive(Clone)]
pub struct ZsSystem {
    pub system: ProductSystem<Semigroup>,
    pub zs: ZsData,
    pub gball: Ball<GroupElement>,
    source: BetaSource,
    overrides: HashMap<BetaKey, ComplexMatrix>,
    memo: Arc<Mutex<HashMap<BetaKey, ComplexMatrix>>>,
}

impl std::fmt::Debug for ZsSystem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ZsSystem")
            .field("window", &self.system.window.len())
            .field("gball", &self.gball.len())
            .field("overrides", &self.overrides.len())
            .finish()
    }
}

impl ZsSystem {
    pub fn new(system: ProductSystem<Semigroup>, zs: ZsData, gball: Ball<GroupElement>, source: BetaSource) -> Result<Self> {
        if system.window.monoid != zs.p {
            return Err(AlgebraError::Dimension("product system and ZS data use different semigroups".into()));
        }
        Ok(ZsSystem {
            system,
            zs,
            gball,
            source,
            overrides: HashMap::new(),
            memo: Arc::default(),
        })
    }

    /// The window of P as a ball.
    pub fn pball(&self) -> Ball<SemigroupElement> {
        Ball::new(self.system.window.elements.clone(), 0)
    }

    /// Replaces one β_g^p; used to exercise the validator.
    pub fn override_beta(&mut self, g: GroupElement, p: SemigroupElement, m: ComplexMatrix) {
        self.overrides.insert((g, p), m);
        self.memo = Arc::default();
    }

    fn index(&self, p: &SemigroupElement) -> Result<usize> {
        self.system
            .window
            .position(p)
            .ok_or_else(|| AlgebraError::WindowOverflow(self.zs.p.show(p)))
    }

    pub fn beta_matrix(&self, g: &GroupElement, p: &SemigroupElement) -> Result<ComplexMatrix> {
        let key = (g.clone(), p.clone());
        if let Some(m) = self.overrides.get(&key) {
            return Ok(m.clone());
        }
        if let Some(m) = self.memo.lock().expect("memo lock").get(&key) {
            return Ok(m.clone());
        }
        let src = self.index(p)?;
        let dst = self.index(&self.zs.act(g, p)?)?;
        let m = match &self.source {
            BetaSource::Direct(f) => f(g, p)?,
            BetaSource::Atoms { atom, algebra } => self.extend_from_atoms(atom, algebra, g, p)?,
        };
        let want = (self.system.fibers[dst].dim, self.system.fibers[src].dim);
        if m.shape() != want {
            return Err(AlgebraError::Dimension(format!(
                "β at ({}) has shape {:?}, expected {want:?}",
                self.zs.show_pair(g, p),
                m.shape()
            )));
        }
        self.memo.lock().expect("memo lock").insert(key, m.clone());
        Ok(m)
    }

    fn extend_from_atoms(&self, atom: &AtomFn, algebra: &AlgebraFn, g: &GroupElement, p: &SemigroupElement) -> Result<ComplexMatrix> {
        let s = &self.zs.p;
        if p == &s.identity() {
            return algebra(g);
        }
        let (a_idx, a, rest) = split_first_atom(s, p)?;
        if rest == s.identity() {
            return atom(g, a_idx);
        }
        let (ga, gr) = self.zs.evaluate(g, &a)?;
        let g_rest = self.zs.act(&gr, &rest)?;
        let lhs_m = self
            .system
            .mult(self.index(&ga)?, self.index(&g_rest)?)
            .ok_or_else(|| AlgebraError::WindowOverflow(format!("{}·{}", s.show(&ga), s.show(&g_rest))))?
            .clone();
        let m_in = self
            .system
            .mult(self.index(&a)?, self.index(&rest)?)
            .ok_or_else(|| AlgebraError::WindowOverflow(s.show(p)))?;
        let head = self.beta_matrix(g, &a)?;
        let tail = self.beta_matrix(&gr, &rest)?;
        Ok(lhs_m * head.kronecker(&tail) * pinv(m_in))
    }

    pub fn apply_beta(&self, g: &GroupElement, p: &SemigroupElement, x: &ComplexVector) -> Result<ComplexVector> {
        let m = self.beta_matrix(g, p)?;
        if x.len() != m.ncols() {
            return Err(AlgebraError::Dimension(format!(
                "vector of length {} in a fiber of dimension {}",
                x.len(),
                m.ncols()
            )));
        }
        Ok(m * x)
    }

    /// β_g applied to an element of 𝒜 (as a d×d matrix).
    pub fn beta_on_algebra(&self, g: &GroupElement, a: &ComplexMatrix) -> Result<ComplexMatrix> {
        let b = self.beta_matrix(g, &self.zs.p.identity())?;
        let alg = &self.system.coeff;
        let (coords, _) = alg.coords(a);
        let out = b * coords;
        Ok(alg.element(out.as_slice()))
    }
}

/// Splits p = a·rest with a the first unit vector (ℕᵏ) or first letter.
pub fn split_first_atom(s: &Semigroup, p: &SemigroupElement) -> Result<(usize, SemigroupElement, SemigroupElement)> {
    match &s.kind {
        SemigroupKind::Nk(k) => {
            let i =
                p.0.iter()
                    .position(|&x| x > 0)
                    .ok_or_else(|| AlgebraError::Domain("identity has no atom".into()))?;
            let mut a = vec![0; *k];
            a[i] = 1;
            let mut rest = p.0.clone();
            rest[i] -= 1;
            Ok((i, SemigroupElement(a), SemigroupElement(rest)))
        }
        SemigroupKind::FreeMonoid(_) => {
            let (&first, tail) = p.0.split_first().ok_or_else(|| AlgebraError::Domain("identity has no atom".into()))?;
            Ok((first as usize, SemigroupElement(vec![first]), SemigroupElement(tail.to_vec())))
        }
        SemigroupKind::FiniteTable { .. } => Err(AlgebraError::Unsupported("atom decomposition needs ℕᵏ or a free monoid".into())),
    }
}

pub fn is_homogeneous(s: &ZsSystem) -> bool {
    s.zs.is_homogeneous_on(&s.pball(), &s.gball)
}

/// Checks A1-A6 over the P window and the group ball.
pub fn validate_zs_action(s: &ZsSystem, tol: Tolerance) -> ViolationReport {
    let mut rep = ViolationReport::new();
    for tag in ["A1", "A2", "A3", "A4", "A5", "A6"] {
        rep.touch(tag);
    }
    let eps = tol.eps;
    let sys = &s.system;
    let w = &sys.window;
    let zs = &s.zs;
    let (sp, sg) = (&zs.p, &zs.g);
    let e_g = sg.identity();
    let alg = sys.coeff.clone();

    for g in s.gball.iter() {
        for (pi, p) in w.elements.iter().enumerate() {
            let pair = || zs.show_pair(g, p);
            match s.beta_matrix(g, p) {
                Ok(b) => {
                    let m = sys.fibers[pi].dim;
                    let rk = rank(&b);
                    rep.expect("A1", rk == m && b.nrows() == m, || {
                        format!("{}: β has shape {:?} and rank {rk}", pair(), b.shape())
                    });
                }
                Err(_) => rep.skip("A1"),
            }
        }
    }

    for p in w.elements.iter() {
        match s.beta_matrix(&e_g, p) {
            Ok(b) => {
                let r = max_abs_diff(&b, &identity(b.ncols())).unwrap_or(f64::INFINITY);
                rep.check("A3", r, eps, || format!("p={}", sp.show(p)));
            }
            Err(_) => rep.skip("A3"),
        }
    }

    for g in s.gball.iter() {
        for h in s.gball.iter() {
            let Ok(gh) = sg.multiply(g, h) else {
                rep.skip("A2");
                continue;
            };
            for p in w.elements.iter() {
                let lhs = zs.act(h, p).and_then(|hp| Ok(s.beta_matrix(g, &hp)? * s.beta_matrix(h, p)?));
                let rhs = s.beta_matrix(&gh, p);
                match (lhs, rhs) {
                    (Ok(l), Ok(r)) => {
                        let res = max_abs_diff(&l, &r).unwrap_or(f64::INFINITY);
                        rep.check("A2", res, eps, || format!("g={}, h={}, p={}", sg.show(g), sg.show(h), sp.show(p)));
                    }
                    _ => rep.skip("A2"),
                }
            }
        }
    }

    for g in s.gball.iter() {
        match s.beta_matrix(g, &sp.identity()) {
            Ok(b) => {
                let images: Vec<ComplexMatrix> = (0..alg.dim()).map(|k| alg.element(b.column(k).as_slice())).collect();
                let sub = check_star_homomorphism(&images, &alg, &alg, tol);
                for (tag, t) in sub.tallies {
                    let r = t.worst_residual;
                    if t.violated > 0 {
                        let witness = sub
                            .violations
                            .iter()
                            .find(|v| v.tag == tag)
                            .map(|v| v.witness.clone())
                            .unwrap_or_default();
                        rep.fail("A4", format!("g={}: {tag} fails at {witness}", sg.show(g)), r);
                    } else {
                        rep.pass("A4", r);
                    }
                }
            }
            Err(_) => rep.skip("A4"),
        }
    }

    for g in s.gball.iter() {
        for (pi, p) in w.elements.iter().enumerate() {
            for (qi, q) in w.elements.iter().enumerate() {
                let Some(pqi) = w.product(pi, qi) else {
                    rep.skip("A5");
                    continue;
                };
                let res = (|| -> Result<f64> {
                    let (gp, gr) = zs.evaluate(g, p)?;
                    let grq = zs.act(&gr, q)?;
                    let gpi = w.position(&gp).ok_or_else(|| AlgebraError::WindowOverflow(sp.show(&gp)))?;
                    let grqi = w.position(&grq).ok_or_else(|| AlgebraError::WindowOverflow(sp.show(&grq)))?;
                    let m_out = sys.mult(gpi, grqi).ok_or_else(|| AlgebraError::WindowOverflow("g·(pq)".into()))?;
                    let lhs = s.beta_matrix(g, &w.elements[pqi])? * &sys.mult[&(pi, qi)];
                    let rhs = m_out * s.beta_matrix(g, p)?.kronecker(&s.beta_matrix(&gr, q)?);
                    if lhs.shape() != rhs.shape() {
                        return Ok(f64::INFINITY);
                    }
                    max_abs_diff(&lhs, &rhs)
                })();
                match res {
                    Ok(r) => {
                        rep.check("A5", r, eps, || format!("g={}, p={}, q={}", sg.show(g), sp.show(p), sp.show(q)));
                    }
                    Err(_) => rep.skip("A5"),
                }
            }
        }
    }

    for g in s.gball.iter() {
        for (pi, p) in w.elements.iter().enumerate() {
            let res = (|| -> Result<(f64, String)> {
                let (gp, gr) = zs.evaluate(g, p)?;
                let gpi = w.position(&gp).ok_or_else(|| AlgebraError::WindowOverflow(sp.show(&gp)))?;
                let b = s.beta_matrix(g, p)?;
                let (xp, xgp) = (&sys.fibers[pi], &sys.fibers[gpi]);
                let mut worst: f64 = 0.0;
                let mut at = String::new();
                for i in 0..xp.dim {
                    for j in 0..xp.dim {
                        let lhs = xgp.inner_product(&b.column(i).into_owned(), &b.column(j).into_owned());
                        let rhs = s.beta_on_algebra(&gr, &xp.inner[i][j])?;
                        let r = max_abs_diff(&lhs, &rhs)?;
                        if r > worst {
                            worst = r;
                            at = format!("x=e{i}, y=e{j}");
                        }
                    }
                }
                Ok((worst, at))
            })();
            match res {
                Ok((r, at)) => {
                    rep.check("A6", r, eps, || format!("{}, {at}", zs.show_pair(g, p)));
                }
                Err(_) => rep.skip("A6"),
            }
        }
    }
    rep
}
