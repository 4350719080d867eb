//! Representations on finite-dimensional Hilbert spaces: truncated Fock
//! representations, covariant pairs (ψ, U) and the representations of
//! X⋈G and X⋈̃G they correspond to, Cuntz-Pimsner defects and Nica
//! residuals.
//!
//! A truncated Fock space ⊕_{s∈B} X_s is split into blocks, one per slot.
//! Every identity is checked only on the blocks where the truncation leaves
//! it exact; excluded tuples are counted as skipped.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use crate::action::ZsSystem;
use crate::bowtie::{BowtieSystem, TildeBowtieSystem};
use crate::error::{AlgebraError, Result};
use crate::product_system::{LcmEntry, ProductSystem};
use crate::report::ViolationReport;
use crate::scalar::{identity, max_abs, max_abs_diff, pinv, psd_sqrt, spectral_norm, zeros, ComplexMatrix, ComplexVector, Tolerance};
use crate::semigroup::{Group, GroupElement, IndexMonoid, Semigroup, SemigroupElement};
use crate::zs::{ZsElement, ZsProduct};

/// Block structure of the representation space and, for each index x, the
/// block that ψ_x sends each block to when the image stays in range.
#[derive(Debug, Clone)]
pub struct SafeDomain {
    pub blocks: Vec<(usize, usize)>,
    pub moves: Vec<Vec<Option<usize>>>,
    pub labels: Vec<String>,
}

impl SafeDomain {
    pub fn full(dim: usize, indices: usize) -> Self {
        SafeDomain {
            blocks: vec![(0, dim)],
            moves: vec![vec![Some(0)]; indices],
            labels: vec!["all".into()],
        }
    }

    /// Blocks t with x▷t in range.
    pub fn toeplitz_blocks(&self, x: usize) -> Vec<usize> {
        (0..self.blocks.len()).filter(|&t| self.moves[x][t].is_some()).collect()
    }

    /// Blocks t with y▷t and x▷(y▷t) in range.
    pub fn product_blocks(&self, x: usize, y: usize) -> Vec<usize> {
        (0..self.blocks.len())
            .filter(|&t| self.moves[y][t].is_some_and(|u| self.moves[x][u].is_some()))
            .collect()
    }
}

/// The slots of a truncated Fock space with the square roots of their
/// ω-Gram matrices.
#[derive(Debug, Clone)]
pub struct FockSpace {
    pub slots: Vec<usize>,
    pub weights: Vec<ComplexMatrix>,
    pub weights_pinv: Vec<ComplexMatrix>,
}

/// The state ω(a) = mean_j tr(β_j(a)) used for the Fock scalar product,
/// with β_j given in algebra coordinates.
#[derive(Debug, Clone)]
pub struct FockState {
    pub maps: Vec<ComplexMatrix>,
}

impl FockState {
    pub fn trace(algebra_dim: usize) -> Self {
        FockState {
            maps: vec![identity(algebra_dim)],
        }
    }

    /// The trace averaged over the group when G is finite, so that every
    /// β_g preserves ω; the plain trace otherwise.
    pub fn for_system(s: &ZsSystem) -> Result<Self> {
        let n = s.system.coeff.dim();
        let Some(order) = s.zs.g.order() else {
            return Ok(Self::trace(n));
        };
        let e = s.zs.p.identity();
        let maps =
            s.zs.g
                .enumerate_ball(order)
                .iter()
                .map(|g| s.beta_matrix(g, &e))
                .collect::<Result<Vec<_>>>()?;
        Ok(FockState { maps })
    }

    fn eval<M: IndexMonoid>(&self, x: &ProductSystem<M>, a: &ComplexMatrix) -> num_complex::Complex64 {
        let alg = &x.coeff;
        let (coords, _) = alg.coords(a);
        let total: num_complex::Complex64 = self.maps.iter().map(|b| alg.element((b * &coords).as_slice()).trace()).sum();
        total / self.maps.len() as f64
    }
}

/// Fiberwise linear maps ψ_x: X_x → M_N, stored on basis vectors.
#[derive(Debug)]
pub struct ToeplitzRep<M: IndexMonoid> {
    pub system: Arc<ProductSystem<M>>,
    pub dim: usize,
    pub psi: Vec<Vec<ComplexMatrix>>,
    pub domain: SafeDomain,
    pub fock: Option<FockSpace>,
    /// A unitary W when the representation has been conjugated; block
    /// projections are then W Q W*.
    pub frame: Option<ComplexMatrix>,
    theta_cache: Arc<Mutex<HashMap<usize, ComplexMatrix>>>,
}

impl<M: IndexMonoid> Clone for ToeplitzRep<M> {
    fn clone(&self) -> Self {
        ToeplitzRep {
            system: self.system.clone(),
            dim: self.dim,
            psi: self.psi.clone(),
            domain: self.domain.clone(),
            fock: self.fock.clone(),
            frame: self.frame.clone(),
            theta_cache: Arc::default(),
        }
    }
}

/// Alias for representations of X⋈G.
pub type JointRep = ToeplitzRep<ZsProduct>;

impl<M: IndexMonoid> ToeplitzRep<M> {
    /// A representation given by explicit operators, checked on the whole
    /// space.
    pub fn from_operators(system: Arc<ProductSystem<M>>, dim: usize, psi: Vec<Vec<ComplexMatrix>>) -> Result<Self> {
        if psi.len() != system.window.len() {
            return Err(AlgebraError::Dimension(format!(
                "operators for {} of {} indices",
                psi.len(),
                system.window.len()
            )));
        }
        for (x, ops) in psi.iter().enumerate() {
            if ops.len() != system.fibers[x].dim || ops.iter().any(|m| m.shape() != (dim, dim)) {
                return Err(AlgebraError::Dimension(format!(
                    "operators at {} have the wrong shape",
                    system.window.show(x)
                )));
            }
        }
        let n = system.window.len();
        Ok(Self::assemble(system, dim, psi, SafeDomain::full(dim, n), None))
    }

    fn assemble(system: Arc<ProductSystem<M>>, dim: usize, psi: Vec<Vec<ComplexMatrix>>, domain: SafeDomain, fock: Option<FockSpace>) -> Self {
        ToeplitzRep {
            system,
            dim,
            psi,
            domain,
            fock,
            frame: None,
            theta_cache: Arc::default(),
        }
    }

    /// ψ_x(v).
    pub fn apply(&self, x: usize, v: &ComplexVector) -> ComplexMatrix {
        let mut out = zeros(self.dim, self.dim);
        for (i, z) in v.iter().enumerate() {
            if *z != num_complex::Complex64::default() {
                out += &self.psi[x][i] * *z;
            }
        }
        out
    }

    /// ψ_e(a) for a ∈ 𝒜.
    pub fn on_algebra(&self, a: &ComplexMatrix) -> ComplexMatrix {
        let (coords, _) = self.system.coeff.coords(a);
        self.apply(self.system.window.identity, &coords)
    }

    /// The projection onto the given blocks.
    pub fn projection(&self, blocks: &[usize]) -> ComplexMatrix {
        let mut q = zeros(self.dim, self.dim);
        for &t in blocks {
            let (off, len) = self.domain.blocks[t];
            for i in off..off + len {
                q[(i, i)] = num_complex::Complex64::new(1.0, 0.0);
            }
        }
        match &self.frame {
            Some(w) => w * q * w.adjoint(),
            None => q,
        }
    }

    /// W ψ W* for a unitary W.
    pub fn conjugate(&self, w: &ComplexMatrix) -> Self {
        let mut out = self.clone();
        out.psi = self.psi.iter().map(|ops| ops.iter().map(|m| w * m * w.adjoint()).collect()).collect();
        out.frame = Some(match &self.frame {
            Some(f) => w * f,
            None => w.clone(),
        });
        out
    }

    /// ψ^{(x)}(S) = Σ c_ij ψ_x(e_i)ψ_x(e_j)* where S = Σ c_ij θ_{e_i,e_j}.
    pub fn compact(&self, x: usize, s: &ComplexMatrix) -> Result<ComplexMatrix> {
        let f = &self.system.fibers[x];
        let m = f.dim;
        if s.shape() != (m, m) {
            return Err(AlgebraError::Dimension(format!(
                "operator of shape {:?} on a fiber of dimension {m}",
                s.shape()
            )));
        }
        if m == 0 {
            return Ok(zeros(self.dim, self.dim));
        }
        let solver = {
            let mut cache = self.theta_cache.lock().expect("cache lock");
            cache
                .entry(x)
                .or_insert_with(|| {
                    let mut a = zeros(m * m, m * m);
                    for i in 0..m {
                        for j in 0..m {
                            let th = f.rank_one(&f.basis_vector(i), &f.basis_vector(j)).expect("basis vectors fit");
                            a.set_column(i * m + j, &ComplexVector::from_column_slice(th.as_slice()));
                        }
                    }
                    pinv(&a)
                })
                .clone()
        };
        let coeffs = solver * ComplexVector::from_column_slice(s.as_slice());
        let mut out = zeros(self.dim, self.dim);
        for i in 0..m {
            for j in 0..m {
                let z = coeffs[i * m + j];
                if z.norm() > 0.0 {
                    out += &self.psi[x][i] * self.psi[x][j].adjoint() * z;
                }
            }
        }
        Ok(out)
    }

    fn show(&self, x: usize) -> String {
        self.system.window.show(x)
    }
}

/// Largest Fock space built.
pub const FOCK_DIM_CAP: usize = 4096;

/// The truncated Fock representation on ⊕_{s∈B} X_s with scalar product
/// ω(⟨x, y⟩): ψ_p(x) sends slot s to slot ps by M_{p,s}, and to zero when
/// ps leaves B. B must contain the identity and be closed under left
/// division within the window.
pub fn build_fock_rep<M: IndexMonoid>(system: Arc<ProductSystem<M>>, ball: &[M::Elem], state: &FockState) -> Result<ToeplitzRep<M>> {
    let w = &system.window;
    let slots = ball
        .iter()
        .map(|s| {
            w.position(s)
                .ok_or_else(|| AlgebraError::WindowOverflow(format!("{} is outside the window", w.monoid.show(s))))
        })
        .collect::<Result<Vec<_>>>()?;
    if !slots.contains(&w.identity) {
        return Err(AlgebraError::Domain("Fock ball must contain the identity".into()));
    }
    let slot_of: HashMap<usize, usize> = slots.iter().enumerate().map(|(t, &s)| (s, t)).collect();
    for &r in &slots {
        for p in 0..w.len() {
            if let Some(q) = w.monoid.left_quotient(&w.elements[p], &w.elements[r])? {
                if !w.position(&q).is_some_and(|qi| slot_of.contains_key(&qi)) {
                    return Err(AlgebraError::Domain(format!(
                        "Fock ball is not closed under left division: {} = {}·{}",
                        w.show(r),
                        w.show(p),
                        w.monoid.show(&q)
                    )));
                }
            }
        }
    }
    let dim: usize = slots.iter().map(|&s| system.fibers[s].dim).sum();
    if dim > FOCK_DIM_CAP {
        return Err(AlgebraError::Unsupported(format!(
            "Fock space of dimension {dim} exceeds the cap {FOCK_DIM_CAP}"
        )));
    }
    let mut blocks = Vec::with_capacity(slots.len());
    let mut off = 0;
    let mut weights = Vec::new();
    let mut weights_pinv = Vec::new();
    for &s in &slots {
        let f = &system.fibers[s];
        blocks.push((off, f.dim));
        off += f.dim;
        let h = ComplexMatrix::from_fn(f.dim, f.dim, |i, j| state.eval(&system, &f.inner[i][j]));
        let h = (&h + h.adjoint()) * num_complex::Complex64::new(0.5, 0.0);
        let root = psd_sqrt(&h);
        weights_pinv.push(pinv(&root));
        weights.push(root);
    }
    let moves: Vec<Vec<Option<usize>>> = (0..w.len())
        .map(|x| {
            (0..slots.len())
                .map(|t| w.product(x, slots[t]).and_then(|k| slot_of.get(&k).copied()))
                .collect()
        })
        .collect();
    let mut psi = Vec::with_capacity(w.len());
    for (x, row) in moves.iter().enumerate() {
        let mx = system.fibers[x].dim;
        let mut ops = vec![zeros(dim, dim); mx];
        for (t, &s) in slots.iter().enumerate() {
            let Some(u) = row[t] else { continue };
            let mult = &system.mult[&(x, s)];
            let ms = system.fibers[s].dim;
            let (src_off, _) = blocks[t];
            let (dst_off, dst_len) = blocks[u];
            for (i, op) in ops.iter_mut().enumerate() {
                let piece = &weights[u] * mult.columns(i * ms, ms) * &weights_pinv[t];
                op.view_mut((dst_off, src_off), (dst_len, ms)).copy_from(&piece);
            }
        }
        psi.push(ops);
    }
    let labels = slots.iter().map(|&s| w.show(s)).collect();
    let domain = SafeDomain { blocks, moves, labels };
    Ok(ToeplitzRep::assemble(
        system,
        dim,
        psi,
        domain,
        Some(FockSpace {
            slots,
            weights,
            weights_pinv,
        }),
    ))
}

/// The Fock representation of a ZS system over a ball of P, with ω chosen
/// by [`FockState::for_system`].
pub fn fock_for_system(s: &ZsSystem, ball: &[SemigroupElement]) -> Result<ToeplitzRep<Semigroup>> {
    build_fock_rep(Arc::new(s.system.clone()), ball, &FockState::for_system(s)?)
}

/// Unitaries U_g for the group elements of a ball, with the block each
/// U_g sends each block to.
#[derive(Debug, Clone)]
pub struct UnitaryRep {
    pub group: Group,
    pub elements: Vec<GroupElement>,
    pub u: Vec<ComplexMatrix>,
    pub moves: Vec<Vec<usize>>,
    pub notes: Vec<String>,
}

impl UnitaryRep {
    /// U_g = I for every listed g, on a space with the given block count.
    pub fn trivial(group: Group, elements: Vec<GroupElement>, dim: usize, blocks: usize) -> Self {
        UnitaryRep {
            u: vec![identity(dim); elements.len()],
            moves: vec![(0..blocks).collect(); elements.len()],
            group,
            elements,
            notes: vec![],
        }
    }

    pub fn index(&self, g: &GroupElement) -> Option<usize> {
        self.elements.iter().position(|h| h == g)
    }

    pub fn get(&self, g: &GroupElement) -> Option<&ComplexMatrix> {
        self.index(g).map(|i| &self.u[i])
    }
}

/// β̃_g(⊕x_s) = ⊕β_g(x_s), sending slot s to slot g·s.
pub fn build_fock_unitary(s: &ZsSystem, fock: &ToeplitzRep<Semigroup>) -> Result<UnitaryRep> {
    let space = fock
        .fock
        .as_ref()
        .ok_or_else(|| AlgebraError::Unsupported("β̃ needs a Fock representation".into()))?;
    let w = &fock.system.window;
    let slot_of: HashMap<usize, usize> = space.slots.iter().enumerate().map(|(t, &x)| (x, t)).collect();
    let mut us = Vec::new();
    let mut moves = Vec::new();
    for g in s.gball.iter() {
        let mut u = zeros(fock.dim, fock.dim);
        let mut mv = Vec::with_capacity(space.slots.len());
        for (t, &x) in space.slots.iter().enumerate() {
            let p = &w.elements[x];
            let gp = s.zs.act(g, p)?;
            let target = w
                .position(&gp)
                .and_then(|i| slot_of.get(&i).copied())
                .ok_or_else(|| AlgebraError::refused(format!("the Fock ball is not invariant: {} leaves it", s.zs.show_pair(g, p))))?;
            let b = s.beta_matrix(g, p)?;
            let block = &space.weights[target] * b * &space.weights_pinv[t];
            let (src, len) = fock.domain.blocks[t];
            let (dst, dlen) = fock.domain.blocks[target];
            u.view_mut((dst, src), (dlen, len)).copy_from(&block);
            mv.push(target);
        }
        us.push(u);
        moves.push(mv);
    }
    Ok(UnitaryRep {
        group: s.zs.g.clone(),
        elements: s.gball.elements.clone(),
        u: us,
        moves,
        notes: vec![],
    })
}

/// U_e = I, U_g*U_g = I and U_gU_h = U_{gh} where gh is listed.
pub fn validate_unitary_rep(u: &UnitaryRep, tol: Tolerance) -> ViolationReport {
    let mut rep = ViolationReport::new();
    for tag in ["identity", "unitary", "homomorphism"] {
        rep.touch(tag);
    }
    let show = |g: &GroupElement| u.group.show(g);
    let e = u.group.identity();
    for (i, g) in u.elements.iter().enumerate() {
        let n = u.u[i].nrows();
        if *g == e {
            rep.check("identity", max_abs_diff(&u.u[i], &identity(n)).unwrap_or(f64::INFINITY), tol.eps, || {
                "U_e".into()
            });
        }
        let r = max_abs_diff(&(u.u[i].adjoint() * &u.u[i]), &identity(n)).unwrap_or(f64::INFINITY);
        rep.check("unitary", r, tol.eps, || format!("U_{}", show(g)));
        for (j, h) in u.elements.iter().enumerate() {
            let Some(k) = u.group.multiply(g, h).ok().and_then(|gh| u.index(&gh)) else {
                rep.skip("homomorphism");
                continue;
            };
            let r = max_abs_diff(&(&u.u[i] * &u.u[j]), &u.u[k]).unwrap_or(f64::INFINITY);
            rep.check("homomorphism", r, tol.eps, || format!("g={}, h={}", show(g), show(h)));
        }
    }
    rep
}

/// ψ_e is a *-homomorphism, ψ_x(e_i)*ψ_x(e_j) = ψ_e(⟨e_i, e_j⟩) and
/// ψ_x(e_i)ψ_y(e_j) = ψ_{xy}(e_i e_j), each on its safe blocks.
pub fn validate_toeplitz<M: IndexMonoid>(rep: &ToeplitzRep<M>, tol: Tolerance) -> ViolationReport {
    let mut out = ViolationReport::new();
    for tag in ["psi-e-homomorphism", "inner-product", "multiplicativity"] {
        out.touch(tag);
    }
    let eps = tol.eps;
    let x = &rep.system;
    let w = &x.window;
    let e = w.identity;
    let alg = &x.coeff;
    let basis = alg.basis();
    for (i, a) in basis.iter().enumerate() {
        let pa = &rep.psi[e][i];
        let r = max_abs_diff(&rep.on_algebra(&a.adjoint()), &pa.adjoint()).unwrap_or(f64::INFINITY);
        out.check("psi-e-homomorphism", r, eps, || format!("ψ_e(b{i}*)"));
        for (j, b) in basis.iter().enumerate() {
            let r = max_abs_diff(&rep.on_algebra(&(a * b)), &(pa * &rep.psi[e][j])).unwrap_or(f64::INFINITY);
            out.check("psi-e-homomorphism", r, eps, || format!("ψ_e(b{i}b{j})"));
        }
    }
    for p in 0..w.len() {
        let blocks = rep.domain.toeplitz_blocks(p);
        let f = &x.fibers[p];
        if blocks.is_empty() {
            for _ in 0..f.dim * f.dim {
                out.skip("inner-product");
            }
            continue;
        }
        let q = rep.projection(&blocks);
        for i in 0..f.dim {
            for j in 0..f.dim {
                let lhs = rep.psi[p][i].adjoint() * &rep.psi[p][j];
                let rhs = rep.on_algebra(&f.inner[i][j]);
                let r = max_abs(&(&q * (lhs - rhs) * &q));
                out.check("inner-product", r, eps, || format!("x={}: e{i}, e{j}", rep.show(p)));
            }
        }
    }
    for p in 0..w.len() {
        for qi in 0..w.len() {
            let (mp, mq) = (x.fibers[p].dim, x.fibers[qi].dim);
            let Some(k) = w.product(p, qi) else {
                for _ in 0..mp * mq {
                    out.skip("multiplicativity");
                }
                continue;
            };
            let blocks = rep.domain.product_blocks(p, qi);
            if blocks.is_empty() {
                for _ in 0..mp * mq {
                    out.skip("multiplicativity");
                }
                continue;
            }
            let proj = rep.projection(&blocks);
            let m = &x.mult[&(p, qi)];
            for i in 0..mp {
                for j in 0..mq {
                    let lhs = &rep.psi[p][i] * &rep.psi[qi][j];
                    let rhs = rep.apply(k, &m.column(i * mq + j).into_owned());
                    let r = max_abs(&((lhs - rhs) * &proj));
                    out.check("multiplicativity", r, eps, || format!("({}, {}): e{i}, e{j}", rep.show(p), rep.show(qi)));
                }
            }
        }
    }
    out
}

/// U_g ψ_p(x) = ψ_{g·p}(β_g x) U_{g|_p} on the blocks s with ps in range.
pub fn validate_covariance(psi: &ToeplitzRep<Semigroup>, u: &UnitaryRep, s: &ZsSystem, tol: Tolerance) -> ViolationReport {
    let mut rep = ViolationReport::new();
    rep.touch("covariance");
    if u.u.iter().any(|m| m.nrows() != psi.dim) {
        rep.fail("covariance", "U and ψ act on spaces of different dimension", f64::INFINITY);
        return rep;
    }
    let w = &psi.system.window;
    for (gi, g) in u.elements.iter().enumerate() {
        for (p, pe) in w.elements.iter().enumerate() {
            let m = psi.system.fibers[p].dim;
            let pieces = (|| -> Result<Option<(usize, ComplexMatrix, usize)>> {
                let (gp, gr) = s.zs.evaluate(g, pe)?;
                let (Some(gpi), Some(ri)) = (w.position(&gp), u.index(&gr)) else {
                    return Ok(None);
                };
                Ok(Some((gpi, s.beta_matrix(g, pe)?, ri)))
            })();
            let blocks = psi.domain.toeplitz_blocks(p);
            let (Ok(Some((gpi, b, ri))), false) = (pieces, blocks.is_empty()) else {
                for _ in 0..m {
                    rep.skip("covariance");
                }
                continue;
            };
            let q = psi.projection(&blocks);
            for i in 0..m {
                let lhs = &u.u[gi] * &psi.psi[p][i];
                let rhs = psi.apply(gpi, &b.column(i).into_owned()) * &u.u[ri];
                let r = max_abs(&((lhs - rhs) * &q));
                rep.check("covariance", r, tol.eps, || format!("g={}, p={}, x=e{i}", u.group.show(g), w.show(p)));
            }
        }
    }
    rep
}

/// Ψ_(p,g)(x⊗g) = ψ_p(x)U_g.
pub fn pi_forward(psi: &ToeplitzRep<Semigroup>, u: &UnitaryRep, y: &BowtieSystem, tol: Tolerance) -> Result<JointRep> {
    let cov = validate_covariance(psi, u, &y.base, tol);
    if !cov.is_clean() {
        return Err(AlgebraError::refused_with("the pair is not covariant", cov));
    }
    let yw = &y.system.window;
    let pw = &psi.system.window;
    let mut ops = Vec::with_capacity(yw.len());
    let mut moves = Vec::with_capacity(yw.len());
    for x in &yw.elements {
        let p = pw.position(&x.p).ok_or_else(|| AlgebraError::WindowOverflow(pw.monoid.show(&x.p)))?;
        let gi = u
            .index(&x.g)
            .ok_or_else(|| AlgebraError::WindowOverflow(format!("U_{} is not available", u.group.show(&x.g))))?;
        ops.push(psi.psi[p].iter().map(|m| m * &u.u[gi]).collect());
        moves.push((0..psi.domain.blocks.len()).map(|t| psi.domain.moves[p][u.moves[gi][t]]).collect());
    }
    let domain = SafeDomain {
        blocks: psi.domain.blocks.clone(),
        moves,
        labels: psi.domain.labels.clone(),
    };
    let mut out = ToeplitzRep::assemble(Arc::new(y.system.clone()), psi.dim, ops, domain, psi.fock.clone());
    out.frame = psi.frame.clone();
    Ok(out)
}

fn unit_coords(s: &ZsSystem) -> ComplexVector {
    let alg = &s.system.coeff;
    alg.coords(alg.unit()).0
}

fn unital_note(psi: &ToeplitzRep<Semigroup>, notes: &mut Vec<String>) {
    let one = psi.on_algebra(psi.system.coeff.unit());
    let r = max_abs_diff(&one, &identity(psi.dim)).unwrap_or(f64::INFINITY);
    if r > 1e-9 {
        notes.push(format!(
            "ψ_e is not unital (‖ψ_e(1) − I‖ = {r:.3e}); extracted U_g are partial isometries"
        ));
    }
}

/// ψ_p(x) = Ψ_(p,e)(x⊗e) and U_g = Ψ_(e,g)(1⊗g).
pub fn pi_backward(joint: &JointRep, s: &ZsSystem) -> Result<(ToeplitzRep<Semigroup>, UnitaryRep)> {
    let yw = &joint.system.window;
    let pw = &s.system.window;
    let (e_p, e_g) = (s.zs.p.identity(), s.zs.g.identity());
    let mut ops = Vec::with_capacity(pw.len());
    let mut moves = Vec::with_capacity(pw.len());
    for p in &pw.elements {
        let x = yw
            .position(&ZsElement::new(p.clone(), e_g.clone()))
            .ok_or_else(|| AlgebraError::WindowOverflow(s.zs.p.show(p)))?;
        ops.push(joint.psi[x].clone());
        moves.push(joint.domain.moves[x].clone());
    }
    let unit = unit_coords(s);
    let mut us = Vec::new();
    let mut umoves = Vec::new();
    for g in s.gball.iter() {
        let x = yw
            .position(&ZsElement::new(e_p.clone(), g.clone()))
            .ok_or_else(|| AlgebraError::WindowOverflow(s.zs.g.show(g)))?;
        us.push(joint.apply(x, &unit));
        umoves.push(
            joint.domain.moves[x]
                .iter()
                .map(|m| m.ok_or_else(|| AlgebraError::Domain(format!("U_{} leaves the truncation", s.zs.g.show(g)))))
                .collect::<Result<Vec<_>>>()?,
        );
    }
    let domain = SafeDomain {
        blocks: joint.domain.blocks.clone(),
        moves,
        labels: joint.domain.labels.clone(),
    };
    let mut psi = ToeplitzRep::assemble(Arc::new(s.system.clone()), joint.dim, ops, domain, joint.fock.clone());
    psi.frame = joint.frame.clone();
    let mut notes = Vec::new();
    unital_note(&psi, &mut notes);
    Ok((
        psi,
        UnitaryRep {
            group: s.zs.g.clone(),
            elements: s.gball.elements.clone(),
            u: us,
            moves: umoves,
            notes,
        },
    ))
}

/// Ψ̃_p(x⊗g) = ψ_p(x)U_g on Z_p (basis index i*|G| + g).
pub fn pi_tilde_forward(psi: &ToeplitzRep<Semigroup>, u: &UnitaryRep, z: &TildeBowtieSystem, tol: Tolerance) -> Result<ToeplitzRep<Semigroup>> {
    let cov = validate_covariance(psi, u, &z.base, tol);
    if !cov.is_clean() {
        return Err(AlgebraError::refused_with("the pair is not covariant", cov));
    }
    let els = &z.crossed.elements;
    let idx = els
        .iter()
        .map(|g| {
            u.index(g)
                .ok_or_else(|| AlgebraError::WindowOverflow(format!("U_{} is not available", u.group.show(g))))
        })
        .collect::<Result<Vec<_>>>()?;
    if idx.iter().any(|&gi| u.moves[gi].iter().enumerate().any(|(t, &m)| m != t)) {
        return Err(AlgebraError::refused("U moves blocks; the action is not homogeneous on this space"));
    }
    let ops = psi
        .psi
        .iter()
        .map(|row| {
            let mut out = Vec::with_capacity(row.len() * els.len());
            for m in row {
                for &gi in &idx {
                    out.push(m * &u.u[gi]);
                }
            }
            out
        })
        .collect();
    let mut out = ToeplitzRep::assemble(Arc::new(z.system.clone()), psi.dim, ops, psi.domain.clone(), psi.fock.clone());
    out.frame = psi.frame.clone();
    Ok(out)
}

/// ψ_p(x) = Ψ̃_p(x⊗e) and U_g = Ψ̃_e(1⊗g).
pub fn pi_tilde_backward(rep: &ToeplitzRep<Semigroup>, z: &TildeBowtieSystem) -> Result<(ToeplitzRep<Semigroup>, UnitaryRep)> {
    let s = &z.base;
    let els = &z.crossed.elements;
    let n = els.len();
    let e_idx = z.crossed.group_index(&s.zs.g.identity())?;
    let ops: Vec<Vec<ComplexMatrix>> = rep
        .psi
        .iter()
        .map(|row| (0..row.len() / n).map(|i| row[i * n + e_idx].clone()).collect())
        .collect();
    let unit = unit_coords(s);
    let e = rep.system.window.identity;
    let us: Vec<ComplexMatrix> = (0..n)
        .map(|g| {
            let mut m = zeros(rep.dim, rep.dim);
            for (k, c) in unit.iter().enumerate() {
                m += &rep.psi[e][k * n + g] * *c;
            }
            m
        })
        .collect();
    let mut psi = ToeplitzRep::assemble(Arc::new(s.system.clone()), rep.dim, ops, rep.domain.clone(), rep.fock.clone());
    psi.frame = rep.frame.clone();
    let mut notes = Vec::new();
    unital_note(&psi, &mut notes);
    Ok((
        psi,
        UnitaryRep {
            group: s.zs.g.clone(),
            elements: els.clone(),
            u: us,
            moves: vec![(0..rep.domain.blocks.len()).collect(); n],
            notes,
        },
    ))
}

/// A representation of X⋈̃G carried to one of X⋈G through the covariant
/// pair it determines.
pub fn transport_rep(rep: &ToeplitzRep<Semigroup>, z: &TildeBowtieSystem, y: &BowtieSystem, tol: Tolerance) -> Result<JointRep> {
    let (psi, u) = pi_tilde_backward(rep, z)?;
    pi_forward(&psi, &u, y, tol)
}

/// Largest entrywise gap between two representations on the same index set.
pub fn rep_distance<M: IndexMonoid>(a: &ToeplitzRep<M>, b: &ToeplitzRep<M>) -> f64 {
    if a.psi.len() != b.psi.len() || a.dim != b.dim {
        return f64::INFINITY;
    }
    let mut worst: f64 = 0.0;
    for (x, y) in a.psi.iter().zip(&b.psi) {
        if x.len() != y.len() {
            return f64::INFINITY;
        }
        for (m, n) in x.iter().zip(y) {
            worst = worst.max(max_abs_diff(m, n).unwrap_or(f64::INFINITY));
        }
    }
    worst
}

pub fn unitary_distance(a: &UnitaryRep, b: &UnitaryRep) -> f64 {
    let mut worst: f64 = 0.0;
    for (g, m) in a.elements.iter().zip(&a.u) {
        match b.get(g) {
            Some(n) => worst = worst.max(max_abs_diff(m, n).unwrap_or(f64::INFINITY)),
            None => return f64::INFINITY,
        }
    }
    worst
}

/// ι_{p,g}(S): S on X_p read as an operator on Y_(p,g).
pub fn iota(y: &BowtieSystem, x: usize, s: &ComplexMatrix, tol: Tolerance) -> Result<ComplexMatrix> {
    let el = &y.system.window.elements[x];
    let base = &y.base.system;
    let p = base
        .window
        .position(&el.p)
        .ok_or_else(|| AlgebraError::WindowOverflow(y.base.zs.p.show(&el.p)))?;
    if base.fibers[p].adjoint_in_module(s, tol).is_none() {
        return Err(AlgebraError::refused("operator is not adjointable"));
    }
    Ok(s.clone())
}

/// ι(θ_{x,y}) = Θ_{x⊗g, y⊗g}, ‖ι(S)‖ = ‖S‖ and ι(S)* = ι(S*) over the
/// window on basis vectors and their rank-one operators.
pub fn check_iota(y: &BowtieSystem, tol: Tolerance) -> ViolationReport {
    let mut rep = ViolationReport::new();
    for tag in ["rank-one", "isometry", "adjoint"] {
        rep.touch(tag);
    }
    let base = &y.base.system;
    let yw = &y.system.window;
    for (x, el) in yw.elements.iter().enumerate() {
        let Some(p) = base.window.position(&el.p) else {
            rep.skip("rank-one");
            continue;
        };
        let xp = &base.fibers[p];
        let yf = &y.system.fibers[x];
        for i in 0..xp.dim {
            for j in 0..xp.dim {
                let (u, v) = (xp.basis_vector(i), xp.basis_vector(j));
                let witness = || format!("{}: θ(e{i}, e{j})", yw.show(x));
                let (Ok(th), Ok(big)) = (xp.rank_one(&u, &v), yf.rank_one(&u, &v)) else {
                    rep.fail("rank-one", witness(), f64::INFINITY);
                    continue;
                };
                let Ok(io) = iota(y, x, &th, tol) else {
                    rep.fail("rank-one", witness(), f64::INFINITY);
                    continue;
                };
                rep.check("rank-one", max_abs_diff(&io, &big).unwrap_or(f64::INFINITY), tol.eps, witness);
                let r = (xp.module_operator_norm(&th) - yf.module_operator_norm(&io)).abs();
                rep.check("isometry", r, tol.eps.max(1e-9), witness);
                let r = match (xp.adjoint_in_module(&th, tol), yf.adjoint_in_module(&io, tol)) {
                    (Some(a), Some(b)) => max_abs_diff(&a, &b).unwrap_or(f64::INFINITY),
                    _ => f64::INFINITY,
                };
                rep.check("adjoint", r, tol.eps.max(1e-9), witness);
            }
        }
    }
    rep
}

/// max_a ‖(ψ^{(x)}(φ_x(a)) − ψ_e(a))Q_x‖ over the algebra basis, Q_x the
/// projection onto the blocks s with xs in range.
pub fn cp_defect<M: IndexMonoid>(rep: &ToeplitzRep<M>, x: usize) -> Result<f64> {
    let f = &rep.system.fibers[x];
    let q = rep.projection(&rep.domain.toeplitz_blocks(x));
    let mut worst: f64 = 0.0;
    for (k, a) in rep.system.coeff.basis().iter().enumerate() {
        let lhs = rep.compact(x, &f.left[k])?;
        worst = worst.max(spectral_norm(&((lhs - rep.on_algebra(a)) * &q)));
    }
    Ok(worst)
}

/// Ψ^{(p,g)}(ι_{p,g}(θ)) = ψ^{(p)}(θ) on basis rank-one operators, and
/// equal Cuntz-Pimsner defects at (p,g) and p.
pub fn check_cp_equivalence(joint: &JointRep, psi: &ToeplitzRep<Semigroup>, y: &BowtieSystem, tol: Tolerance) -> ViolationReport {
    let mut rep = ViolationReport::new();
    for tag in ["iota-identity", "defect-agreement"] {
        rep.touch(tag);
    }
    let base = &y.base.system;
    let yw = &joint.system.window;
    let mut defects: Vec<String> = Vec::new();
    for (x, el) in yw.elements.iter().enumerate() {
        let Some(p) = psi.system.window.position(&el.p) else {
            rep.skip("iota-identity");
            continue;
        };
        let xp = &base.fibers[p];
        for i in 0..xp.dim {
            for j in 0..xp.dim {
                let witness = || format!("{}: θ(e{i}, e{j})", yw.show(x));
                let th = xp.rank_one(&xp.basis_vector(i), &xp.basis_vector(j));
                let r = th
                    .and_then(|th| {
                        let io = iota(y, x, &th, tol)?;
                        max_abs_diff(&joint.compact(x, &io)?, &psi.compact(p, &th)?)
                    })
                    .unwrap_or(f64::INFINITY);
                rep.check("iota-identity", r, tol.eps, witness);
            }
        }
        match (cp_defect(joint, x), cp_defect(psi, p)) {
            (Ok(a), Ok(b)) => {
                rep.check("defect-agreement", (a - b).abs(), tol.eps, || {
                    format!("{}: {a:.3e} vs {b:.3e}", yw.show(x))
                });
                if el.g == y.base.zs.g.identity() {
                    defects.push(format!("{}={b:.6}", psi.system.window.show(p)));
                }
            }
            _ => rep.fail("defect-agreement", yw.show(x), f64::INFINITY),
        }
    }
    rep.note(format!("Cuntz-Pimsner defects: {}", defects.join(", ")));
    rep
}

/// ‖(ψ^{(p)}(S)ψ^{(q)}(T) − ψ^{(r)}(S∨T))Q‖ with r = lcm(p, q), or
/// ‖ψ^{(p)}(S)ψ^{(q)}(T)Q‖ when pP ∩ qP is empty. Q projects onto the blocks
/// s with ps, qs (and rs) in range. `None` when no block qualifies.
pub fn nica_check<M: IndexMonoid>(rep: &ToeplitzRep<M>, p: usize, q: usize, s: &ComplexMatrix, t: &ComplexMatrix) -> Result<Option<f64>> {
    let x = &rep.system;
    let lcm = x.window.lcm(p, q)?;
    let r = match lcm {
        LcmEntry::Outside => {
            return Err(AlgebraError::WindowOverflow(format!(
                "lcm({}, {}) lies outside the window",
                rep.show(p),
                rep.show(q)
            )));
        }
        LcmEntry::Inside(r) => Some(r),
        LcmEntry::Empty => None,
    };
    let blocks: Vec<usize> = (0..rep.domain.blocks.len())
        .filter(|&b| {
            let m = &rep.domain.moves;
            m[p][b].is_some() && m[q][b].is_some() && r.is_none_or(|r| m[r][b].is_some())
        })
        .collect();
    if blocks.is_empty() {
        return Ok(None);
    }
    let proj = rep.projection(&blocks);
    let mut lhs = rep.compact(p, s)? * rep.compact(q, t)?;
    if let Some(r) = r {
        let meet = x.meet(p, q, s, t)?.expect("lcm exists");
        lhs -= rep.compact(r, &meet)?;
    }
    Ok(Some(spectral_norm(&(lhs * proj))))
}

/// Basis rank-one operators on a fiber: all of them for small fibers, the
/// diagonal and first off-diagonal otherwise.
pub fn compact_samples(f: &crate::module::Correspondence) -> Vec<ComplexMatrix> {
    let m = f.dim;
    let pairs: Vec<(usize, usize)> = if m <= 4 {
        (0..m).flat_map(|i| (0..m).map(move |j| (i, j))).collect()
    } else {
        (0..m).map(|i| (i, i)).chain((0..m - 1).map(|i| (i, i + 1))).collect()
    };
    pairs
        .into_iter()
        .map(|(i, j)| f.rank_one(&f.basis_vector(i), &f.basis_vector(j)).expect("basis vectors fit"))
        .collect()
}

/// Nica residuals over all window pairs and sampled compacts.
pub fn check_nica<M: IndexMonoid>(rep: &ToeplitzRep<M>, tol: Tolerance) -> ViolationReport {
    let mut out = ViolationReport::new();
    out.touch("nica");
    let x = &rep.system;
    let n = x.window.len();
    let samples: Vec<Vec<ComplexMatrix>> = x.fibers.iter().map(compact_samples).collect();
    let mut empty_checked = 0usize;
    for p in 0..n {
        for q in 0..n {
            let empty = matches!(x.window.lcm(p, q), Ok(LcmEntry::Empty));
            for (a, s) in samples[p].iter().enumerate() {
                for (b, t) in samples[q].iter().enumerate() {
                    match nica_check(rep, p, q, s, t) {
                        Ok(Some(r)) => {
                            empty_checked += usize::from(empty);
                            out.check("nica", r, tol.eps, || format!("p={}, q={}, S#{a}, T#{b}", rep.show(p), rep.show(q)));
                        }
                        Ok(None) | Err(AlgebraError::WindowOverflow(_)) => out.skip("nica"),
                        Err(e) => out.fail("nica", format!("p={}, q={}: {e}", rep.show(p), rep.show(q)), f64::INFINITY),
                    }
                }
            }
        }
    }
    out.note(format!("{empty_checked} checked tuples have pP ∩ qP empty"));
    out
}

/// The square ι_{r,e}∘i_p^r = i_{(p,g)}^{(r,e)}∘ι_{p,g} on sampled compacts,
/// and equal Nica residuals for Ψ over P⋈G and the extracted ψ over P.
pub fn check_nica_equivalence(joint: &JointRep, y: &BowtieSystem, tol: Tolerance) -> ViolationReport {
    let mut rep = ViolationReport::new();
    for tag in ["commuting-square", "residual-agreement"] {
        rep.touch(tag);
    }
    let s = &y.base;
    let base = &s.system;
    let yw = &y.system.window;
    let e_g = s.zs.g.identity();
    let (psi, _) = match pi_backward(joint, s) {
        Ok(pair) => pair,
        Err(e) => {
            rep.fail("residual-agreement", format!("extraction failed: {e}"), f64::INFINITY);
            return rep;
        }
    };
    let p_of = |x: usize| {
        base.window
            .position(&yw.elements[x].p)
            .expect("window P components lie in the base window")
    };
    let samples: Vec<Vec<ComplexMatrix>> = base.fibers.iter().map(compact_samples).collect();

    for x in 0..yw.len() {
        let p = p_of(x);
        for (ri, r) in base.window.elements.iter().enumerate() {
            let Some(target) = yw.position(&ZsElement::new(r.clone(), e_g.clone())) else {
                continue;
            };
            if base.window.quotient(p, ri).is_none() {
                continue;
            }
            for (a, sm) in samples[p].iter().enumerate() {
                let res = (|| -> Result<f64> {
                    let lhs = base.embed_to(p, ri, sm)?;
                    let rhs = y.system.embed_to(x, target, sm)?;
                    max_abs_diff(&lhs, &rhs)
                })();
                match res {
                    Ok(v) => {
                        rep.check("commuting-square", v, tol.eps, || format!("{} → {}, S#{a}", yw.show(x), yw.show(target)));
                    }
                    Err(_) => rep.skip("commuting-square"),
                }
            }
        }
    }

    for x in 0..yw.len() {
        for z in 0..yw.len() {
            let (p, q) = (p_of(x), p_of(z));
            for (a, sm) in samples[p].iter().enumerate() {
                for (b, tm) in samples[q].iter().enumerate() {
                    let big = nica_check(joint, x, z, sm, tm);
                    let small = nica_check(&psi, p, q, sm, tm);
                    match (big, small) {
                        (Ok(Some(u)), Ok(Some(v))) => {
                            rep.check("residual-agreement", (u - v).abs(), tol.eps, || {
                                format!("{}, {}, S#{a}, T#{b}: {u:.3e} vs {v:.3e}", yw.show(x), yw.show(z))
                            });
                        }
                        _ => rep.skip("residual-agreement"),
                    }
                }
            }
        }
    }
    rep
}

/// Operators ψ_n(λv_n) = λ on the one-dimensional system over ℕ.
pub fn scalar_rep(system: Arc<ProductSystem<Semigroup>>) -> Result<ToeplitzRep<Semigroup>> {
    if system.fibers.iter().any(|f| f.dim != 1) || system.coeff.dim() != 1 {
        return Err(AlgebraError::Unsupported(
            "scalar representations need one-dimensional fibers over ℂ".into(),
        ));
    }
    let psi = vec![vec![identity(1)]; system.window.len()];
    ToeplitzRep::from_operators(system, 1, psi)
}

/// All elements of a Fock ball taken from the window: the P elements with
/// length at most `radius`.
pub fn fock_ball(s: &Semigroup, radius: usize) -> Vec<SemigroupElement> {
    s.enumerate_ball(radius).elements
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bowtie::{build_bowtie, build_tilde_bowtie};
    use crate::generators::examples::*;
    use crate::generators::trivial_system;
    use crate::scalar::c;
    use crate::zs::ZsData;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn nat_system(radius: usize) -> ZsSystem {
        trivial_system(ZsData::trivial(Semigroup::nk(1), Group::trivial()), radius, 0).unwrap()
    }

    #[test]
    fn fock_shift_over_n() {
        let s = nat_system(3);
        let ball = fock_ball(&s.zs.p, 2);
        let psi = fock_for_system(&s, &ball).unwrap();
        assert_eq!(psi.dim, 3);
        let one = s.system.window.position(&Semigroup::nk_elem(&[1])).unwrap();
        let v = &psi.psi[one][0];
        assert_eq!(v[(1, 0)], c(1.0, 0.0));
        assert_eq!(v[(2, 1)], c(1.0, 0.0));
        assert_eq!(v[(0, 2)], c(0.0, 0.0));
        let rep = validate_toeplitz(&psi, tol());
        assert!(rep.is_clean(), "{:?}", rep.violations);
        assert!(rep.tallies["inner-product"].skipped > 0);
        assert!((cp_defect(&psi, one).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn scalar_rep_has_no_defect() {
        let s = nat_system(3);
        let psi = scalar_rep(Arc::new(s.system.clone())).unwrap();
        assert!(validate_toeplitz(&psi, tol()).is_clean());
        for x in 0..psi.psi.len() {
            assert!(cp_defect(&psi, x).unwrap() < 1e-12);
        }
    }

    #[test]
    fn odometer_unitary_increments_slots() {
        let s = odometer_system(3, 2).unwrap();
        let ball = fock_ball(&s.zs.p, 2);
        let psi = fock_for_system(&s, &ball).unwrap();
        let u = build_fock_unitary(&s, &psi).unwrap();
        assert!(validate_unitary_rep(&u, tol()).is_clean());
        let a = u.index(&s.zs.g.parse("a").unwrap()).unwrap();
        let labels = &psi.domain.labels;
        let from = labels.iter().position(|l| l == "0").unwrap();
        let to = labels.iter().position(|l| l == "1").unwrap();
        assert_eq!(u.moves[a][from], to);
        let from = labels.iter().position(|l| l == "1").unwrap();
        let to = labels.iter().position(|l| l == "0").unwrap();
        assert_eq!(u.moves[a][from], to);
        let rep = validate_covariance(&psi, &u, &s, tol());
        assert!(rep.is_clean(), "{:?}", rep.violations);
    }

    #[test]
    fn identity_unitaries_are_not_covariant_for_the_odometer() {
        let s = odometer_system(3, 2).unwrap();
        let psi = fock_for_system(&s, &fock_ball(&s.zs.p, 2)).unwrap();
        let u = UnitaryRep::trivial(s.zs.g.clone(), s.gball.elements.clone(), psi.dim, psi.domain.blocks.len());
        let rep = validate_covariance(&psi, &u, &s, tol());
        assert!(rep.has_violation("covariance"));
        let y = build_bowtie(&s, tol()).unwrap();
        assert!(matches!(pi_forward(&psi, &u, &y, tol()), Err(AlgebraError::Refused { .. })));
    }

    #[test]
    fn bowtie_round_trip() {
        let s = odometer_system(2, 1).unwrap();
        let y = build_bowtie(&s, tol()).unwrap();
        let psi = fock_for_system(&s, &fock_ball(&s.zs.p, 2)).unwrap();
        let u = build_fock_unitary(&s, &psi).unwrap();
        let joint = pi_forward(&psi, &u, &y, tol()).unwrap();
        let rep = validate_toeplitz(&joint, tol());
        assert!(rep.is_clean(), "{:?}", rep.violations);
        let (psi2, u2) = pi_backward(&joint, &s).unwrap();
        assert!(rep_distance(&psi, &psi2) <= 1e-12);
        assert!(unitary_distance(&u, &u2) <= 1e-12);
        let joint2 = pi_forward(&psi2, &u2, &y, tol()).unwrap();
        assert!(rep_distance(&joint, &joint2) <= 1e-12);
    }

    #[test]
    fn tilde_round_trip_and_transport() {
        let s = swap_loops_system(2).unwrap();
        let z = build_tilde_bowtie(&s, tol()).unwrap();
        let y = build_bowtie(&s, tol()).unwrap();
        let psi = fock_for_system(&s, &fock_ball(&s.zs.p, 1)).unwrap();
        let u = build_fock_unitary(&s, &psi).unwrap();
        let tilde = pi_tilde_forward(&psi, &u, &z, tol()).unwrap();
        let rep = validate_toeplitz(&tilde, tol());
        assert!(rep.is_clean(), "{:?}", rep.violations);
        let (psi2, u2) = pi_tilde_backward(&tilde, &z).unwrap();
        assert!(rep_distance(&psi, &psi2) <= 1e-12);
        assert!(unitary_distance(&u, &u2) <= 1e-12);
        let joint = transport_rep(&tilde, &z, &y, tol()).unwrap();
        assert!(rep_distance(&joint, &pi_forward(&psi, &u, &y, tol()).unwrap()) <= 1e-12);
    }

    #[test]
    fn iota_and_cp_equivalence() {
        let s = odometer_system(2, 1).unwrap();
        let y = build_bowtie(&s, tol()).unwrap();
        assert!(check_iota(&y, tol()).is_clean());
        let psi = fock_for_system(&s, &fock_ball(&s.zs.p, 2)).unwrap();
        let u = build_fock_unitary(&s, &psi).unwrap();
        let joint = pi_forward(&psi, &u, &y, tol()).unwrap();
        let rep = check_cp_equivalence(&joint, &psi, &y, tol());
        assert!(rep.is_clean(), "{:?}", rep.violations);
    }

    #[test]
    fn nica_on_n2_fock() {
        let s = trivial_system(ZsData::trivial(Semigroup::nk(2), Group::trivial()), 2, 0).unwrap();
        let psi = fock_for_system(&s, &fock_ball(&s.zs.p, 1)).unwrap();
        let w = &s.system.window;
        let p = w.position(&Semigroup::nk_elem(&[1, 0])).unwrap();
        let q = w.position(&Semigroup::nk_elem(&[0, 1])).unwrap();
        let one = identity(1);
        let r = nica_check(&psi, p, q, &one, &one).unwrap().unwrap();
        assert!(r < 1e-12);
        assert!(check_nica(&psi, tol()).is_clean());
    }

    #[test]
    fn nica_empty_lcm_in_free_monoid() {
        let s = trivial_system(ZsData::trivial(Semigroup::free_monoid(&['0', '1']), Group::trivial()), 2, 0).unwrap();
        let psi = fock_for_system(&s, &fock_ball(&s.zs.p, 1)).unwrap();
        let w = &s.system.window;
        let p = w.position(&s.zs.p.word("0").unwrap()).unwrap();
        let q = w.position(&s.zs.p.word("1").unwrap()).unwrap();
        let one = identity(1);
        assert!(nica_check(&psi, p, q, &one, &one).unwrap().unwrap() < 1e-12);
        let rep = check_nica(&psi, tol());
        assert!(rep.is_clean(), "{:?}", rep.violations);
    }

    #[test]
    fn nica_equivalence_and_tamper() {
        let s = odometer_system(2, 1).unwrap();
        let y = build_bowtie(&s, tol()).unwrap();
        let psi = fock_for_system(&s, &fock_ball(&s.zs.p, 2)).unwrap();
        let u = build_fock_unitary(&s, &psi).unwrap();
        let joint = pi_forward(&psi, &u, &y, tol()).unwrap();
        let rep = check_nica_equivalence(&joint, &y, tol());
        assert!(rep.is_clean(), "{:?}", rep.violations);
        assert!(rep.tallies["residual-agreement"].checked > 0);

        let mut bad = joint.clone();
        let x = y
            .position(&ZsElement::new(s.zs.p.word("0").unwrap(), s.zs.g.parse("a").unwrap()))
            .unwrap();
        bad.psi[x][0] *= c(2.0, 0.0);
        assert!(check_nica_equivalence(&bad, &y, tol()).has_violation("residual-agreement"));
    }

    #[test]
    fn conjugation_keeps_defect_and_residuals() {
        let s = nat_system(3);
        let psi = fock_for_system(&s, &fock_ball(&s.zs.p, 2)).unwrap();
        let h = crate::scalar::from_rows(&[
            vec![c(0.0, 0.0), c(1.0, 0.5), c(0.0, -0.2)],
            vec![c(1.0, -0.5), c(0.3, 0.0), c(0.7, 0.0)],
            vec![c(0.0, 0.2), c(0.7, 0.0), c(-0.4, 0.0)],
        ]);
        let w = (h * c(0.0, 1.0)).exp();
        let moved = psi.conjugate(&w);
        assert!(validate_toeplitz(&moved, tol()).is_clean());
        for x in 0..psi.psi.len() {
            assert!((cp_defect(&psi, x).unwrap() - cp_defect(&moved, x).unwrap()).abs() < 1e-10);
        }
    }
}
