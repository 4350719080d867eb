//! Product systems over a finite window of an index monoid.

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{AlgebraError, Result};
use crate::module::{validate_correspondence, CompactSpan, Correspondence};
use crate::report::ViolationReport;
use crate::scalar::{identity, max_abs, max_abs_diff, pinv, rank, zeros, ComplexMatrix, ComplexVector, FiniteCStarAlgebra, Tolerance};
use crate::semigroup::IndexMonoid;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LcmEntry {
    Empty,
    Inside(usize),
    Outside,
}

/// A finite set of monoid elements with its partial product table.
#[derive(Debug, Clone)]
pub struct IndexWindow<M: IndexMonoid> {
    pub monoid: M,
    pub elements: Vec<M::Elem>,
    pub identity: usize,
    index: HashMap<M::Elem, usize>,
    product: Vec<Vec<Option<usize>>>,
}

impl<M: IndexMonoid> IndexWindow<M> {
    pub fn new(monoid: M, elements: Vec<M::Elem>) -> Result<Self> {
        let index: HashMap<M::Elem, usize> = elements.iter().cloned().enumerate().map(|(i, e)| (e, i)).collect();
        if index.len() != elements.len() {
            return Err(AlgebraError::Dimension("window elements are not distinct".into()));
        }
        let identity = *index
            .get(&monoid.identity())
            .ok_or_else(|| AlgebraError::Dimension("window does not contain the identity".into()))?;
        let product = elements
            .iter()
            .map(|a| {
                elements
                    .iter()
                    .map(|b| monoid.multiply(a, b).ok().and_then(|c| index.get(&c).copied()))
                    .collect()
            })
            .collect();
        Ok(IndexWindow {
            monoid,
            elements,
            identity,
            index,
            product,
        })
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn position(&self, x: &M::Elem) -> Option<usize> {
        self.index.get(x).copied()
    }

    pub fn product(&self, i: usize, j: usize) -> Option<usize> {
        self.product[i][j]
    }

    /// The c in the window with (i)(c) = (j).
    pub fn quotient(&self, i: usize, j: usize) -> Option<usize> {
        (0..self.len()).find(|&c| self.product[i][c] == Some(j))
    }

    pub fn lcm(&self, i: usize, j: usize) -> Result<LcmEntry> {
        Ok(match self.monoid.lcm(&self.elements[i], &self.elements[j])? {
            None => LcmEntry::Empty,
            Some(r) => match self.position(&r) {
                Some(k) => LcmEntry::Inside(k),
                None => LcmEntry::Outside,
            },
        })
    }

    pub fn show(&self, i: usize) -> String {
        self.monoid.show(&self.elements[i])
    }
}

#[derive(Debug, Clone)]
pub struct ProductSystem<M: IndexMonoid> {
    pub window: IndexWindow<M>,
    pub coeff: Arc<FiniteCStarAlgebra>,
    pub fibers: Vec<Correspondence>,
    /// M_{p,q} as an m_pq × (m_p·m_q) matrix, x⊗y at index i*m_q + k.
    pub mult: HashMap<(usize, usize), ComplexMatrix>,
    mult_pinv: HashMap<(usize, usize), ComplexMatrix>,
}

impl<M: IndexMonoid> ProductSystem<M> {
    pub fn new(
        window: IndexWindow<M>,
        coeff: Arc<FiniteCStarAlgebra>,
        fibers: Vec<Correspondence>,
        mult: HashMap<(usize, usize), ComplexMatrix>,
    ) -> Result<Self> {
        if fibers.len() != window.len() {
            return Err(AlgebraError::Dimension(format!(
                "{} fibers for {} window elements",
                fibers.len(),
                window.len()
            )));
        }
        for i in 0..window.len() {
            for j in 0..window.len() {
                let Some(k) = window.product(i, j) else { continue };
                let m = mult
                    .get(&(i, j))
                    .ok_or_else(|| AlgebraError::refused(format!("no multiplication map for ({}, {})", window.show(i), window.show(j))))?;
                let want = (fibers[k].dim, fibers[i].dim * fibers[j].dim);
                if m.shape() != want {
                    return Err(AlgebraError::Dimension(format!(
                        "M_({}, {}) has shape {:?}, expected {want:?}",
                        window.show(i),
                        window.show(j),
                        m.shape()
                    )));
                }
            }
        }
        let mult_pinv = mult.iter().map(|(k, m)| (*k, pinv(m))).collect();
        Ok(ProductSystem {
            window,
            coeff,
            fibers,
            mult,
            mult_pinv,
        })
    }

    /// Builds the system from per-element fibers and a multiplication
    /// callback invoked for every in-window pair.
    pub fn from_fn(
        window: IndexWindow<M>,
        coeff: Arc<FiniteCStarAlgebra>,
        fiber: impl Fn(usize) -> Result<Correspondence>,
        mult: impl Fn(usize, usize, usize) -> Result<ComplexMatrix>,
    ) -> Result<Self> {
        let fibers = (0..window.len()).map(fiber).collect::<Result<Vec<_>>>()?;
        let mut table = HashMap::new();
        for i in 0..window.len() {
            for j in 0..window.len() {
                if let Some(k) = window.product(i, j) {
                    table.insert((i, j), mult(i, j, k)?);
                }
            }
        }
        Self::new(window, coeff, fibers, table)
    }

    pub fn fiber(&self, i: usize) -> &Correspondence {
        &self.fibers[i]
    }

    pub fn mult(&self, i: usize, j: usize) -> Option<&ComplexMatrix> {
        self.mult.get(&(i, j))
    }

    /// M_{p,q}(x ⊗ y).
    pub fn multiply_vectors(&self, i: usize, x: &ComplexVector, j: usize, y: &ComplexVector) -> Result<ComplexVector> {
        let m = self.mult(i, j).ok_or_else(|| self.overflow(i, j))?;
        Ok(m * x.kronecker(y))
    }

    fn overflow(&self, i: usize, j: usize) -> AlgebraError {
        AlgebraError::WindowOverflow(format!("{}·{}", self.window.show(i), self.window.show(j)))
    }

    /// i_p^{pq}(S) = M_{p,q}(S ⊗ 1)M_{p,q}⁻¹ on X_{pq}.
    pub fn embed_compact(&self, p: usize, q: usize, s: &ComplexMatrix) -> Result<ComplexMatrix> {
        let m = self.mult(p, q).ok_or_else(|| self.overflow(p, q))?;
        let mp = self.fibers[p].dim;
        if s.shape() != (mp, mp) {
            return Err(AlgebraError::Dimension(format!(
                "operator of shape {:?} on a fiber of dimension {mp}",
                s.shape()
            )));
        }
        let big = s.kronecker(&identity(self.fibers[q].dim));
        Ok(m * big * &self.mult_pinv[&(p, q)])
    }

    /// i_p^r(S) for a right multiple r of p inside the window.
    pub fn embed_to(&self, p: usize, r: usize, s: &ComplexMatrix) -> Result<ComplexMatrix> {
        let q = self.window.quotient(p, r).ok_or_else(|| {
            AlgebraError::WindowOverflow(format!(
                "{} is not a right multiple of {} in the window",
                self.window.show(r),
                self.window.show(p)
            ))
        })?;
        self.embed_compact(p, q, s)
    }

    /// S ∨ T = i_p^r(S) i_q^r(T), `None` when pP ∩ qP is empty.
    pub fn meet(&self, p: usize, q: usize, s: &ComplexMatrix, t: &ComplexMatrix) -> Result<Option<ComplexMatrix>> {
        match self.window.lcm(p, q)? {
            LcmEntry::Empty => Ok(None),
            LcmEntry::Outside => Err(AlgebraError::WindowOverflow(format!(
                "lcm({}, {}) lies outside the window",
                self.window.show(p),
                self.window.show(q)
            ))),
            LcmEntry::Inside(r) => Ok(Some(self.embed_to(p, r, s)? * self.embed_to(q, r, t)?)),
        }
    }

    pub fn compact_spans(&self) -> Vec<CompactSpan> {
        self.fibers.iter().map(Correspondence::compact_span).collect()
    }
}

/// Checks the identity fiber, fiberwise correspondence axioms, unitarity and
/// surjectivity of every M_{p,q}, the module-action clause and associativity.
pub fn validate_product_system<M: IndexMonoid>(x: &ProductSystem<M>, tol: Tolerance) -> ViolationReport {
    let mut rep = ViolationReport::new();
    let eps = tol.eps;
    let w = &x.window;
    let n = w.len();
    let e = w.identity;
    let d = x.coeff.ambient_dim();
    for tag in [
        "identity-fiber",
        "unitarity",
        "surjectivity",
        "left-action",
        "right-action",
        "associativity",
    ] {
        rep.touch(tag);
    }

    let a = Correspondence::identity_fiber(x.coeff.clone());
    let xe = &x.fibers[e];
    let r = if xe.dim != a.dim {
        f64::INFINITY
    } else {
        let mut worst: f64 = 0.0;
        for k in 0..a.right.len() {
            worst = worst.max(max_abs_diff(&xe.right[k], &a.right[k]).unwrap_or(f64::INFINITY));
            worst = worst.max(max_abs_diff(&xe.left[k], &a.left[k]).unwrap_or(f64::INFINITY));
        }
        for i in 0..a.dim {
            for j in 0..a.dim {
                worst = worst.max(max_abs_diff(&xe.inner[i][j], &a.inner[i][j]).unwrap_or(f64::INFINITY));
            }
        }
        worst
    };
    rep.check("identity-fiber", r, eps, || {
        format!("X_{} differs from the coefficient algebra", w.show(e))
    });

    for i in 0..n {
        let sub = validate_correspondence(&x.fibers[i], tol);
        rep.merge_context("fiber", &format!("X_{}", w.show(i)), sub);
    }

    let grams: Vec<ComplexMatrix> = x.fibers.iter().map(Correspondence::gram_block).collect();
    let id_d = identity(d);
    for i in 0..n {
        for j in 0..n {
            let Some(k) = w.product(i, j) else { continue };
            let m = &x.mult[&(i, j)];
            let (mp, mq) = (x.fibers[i].dim, x.fibers[j].dim);
            let witness = || format!("({}, {})", w.show(i), w.show(j));
            let big = m.kronecker(&id_d);
            let lhs = big.adjoint() * &grams[k] * &big;
            let mut rhs = zeros(mp * mq * d, mp * mq * d);
            let xq = &x.fibers[j];
            for a_i in 0..mp {
                for a_k in 0..mp {
                    let phi = xq.left_op(&x.fibers[i].inner[a_i][a_k]);
                    let block = &grams[j] * phi.kronecker(&id_d);
                    for b_j in 0..mq {
                        for b_l in 0..mq {
                            let row = (a_i * mq + b_j) * d;
                            let col = (a_k * mq + b_l) * d;
                            rhs.view_mut((row, col), (d, d)).copy_from(&block.view((b_j * d, b_l * d), (d, d)));
                        }
                    }
                }
            }
            let r = max_abs_diff(&lhs, &rhs).unwrap_or(f64::INFINITY);
            rep.check("unitarity", r, eps, witness);
            let rk = rank(m);
            rep.expect("surjectivity", rk == x.fibers[k].dim, || {
                format!("{}: rank {rk} < {}", witness(), x.fibers[k].dim)
            });
        }
    }

    for p in 0..n {
        let xp = &x.fibers[p];
        let mp = xp.dim;
        let na = x.coeff.dim();
        if let Some(m) = x.mult(e, p) {
            let mut expect = zeros(mp, na * mp);
            for k in 0..na {
                expect.view_mut((0, k * mp), (mp, mp)).copy_from(&xp.left[k]);
            }
            let r = max_abs_diff(m, &expect).unwrap_or(f64::INFINITY);
            rep.check("left-action", r, eps, || format!("M_(e, {})", w.show(p)));
        }
        if let Some(m) = x.mult(p, e) {
            let mut expect = zeros(mp, mp * na);
            for jj in 0..mp {
                for k in 0..na {
                    expect.set_column(jj * na + k, &xp.right[k].column(jj));
                }
            }
            let r = max_abs_diff(m, &expect).unwrap_or(f64::INFINITY);
            rep.check("right-action", r, eps, || format!("M_({}, e)", w.show(p)));
        }
    }

    for p in 0..n {
        for q in 0..n {
            let pq = w.product(p, q);
            for r in 0..n {
                let (Some(pq), Some(qr)) = (pq, w.product(q, r)) else {
                    rep.skip("associativity");
                    continue;
                };
                let (Some(_), Some(_)) = (w.product(pq, r), w.product(p, qr)) else {
                    rep.skip("associativity");
                    continue;
                };
                let (mp, mr) = (x.fibers[p].dim, x.fibers[r].dim);
                let lhs = &x.mult[&(pq, r)] * x.mult[&(p, q)].kronecker(&identity(mr));
                let rhs = &x.mult[&(p, qr)] * identity(mp).kronecker(&x.mult[&(q, r)]);
                let res = max_abs_diff(&lhs, &rhs).unwrap_or(f64::INFINITY);
                rep.check("associativity", res, eps, || format!("({}, {}, {})", w.show(p), w.show(q), w.show(r)));
            }
        }
    }
    rep
}

/// For every pair with lcm r in the window, checks that S ∨ T lies in the
/// span of the compacts on X_r for spanning compacts S, T.
pub fn check_compactly_aligned<M: IndexMonoid>(x: &ProductSystem<M>, tol: Tolerance) -> ViolationReport {
    let mut rep = ViolationReport::new();
    rep.touch("compact-alignment");
    let w = &x.window;
    let spans = x.compact_spans();
    for (i, s) in spans.iter().enumerate() {
        if !s.equals_adjointable {
            rep.note(format!(
                "compacts on X_{} span {} of {} adjointable dimensions",
                w.show(i),
                s.basis.len(),
                s.adjointable_dim
            ));
        }
    }
    // Projections onto each span, reused for every membership test.
    let span_proj: Vec<(ComplexMatrix, ComplexMatrix)> = spans
        .iter()
        .map(|s| {
            let dim = s.basis.first().map_or(0, |b| b.len());
            let a = ComplexMatrix::from_fn(dim, s.basis.len(), |r, k| s.basis[k].as_slice()[r]);
            let ap = pinv(&a);
            (a, ap)
        })
        .collect();
    for p in 0..w.len() {
        for q in 0..w.len() {
            let r = match w.lcm(p, q) {
                Ok(LcmEntry::Inside(r)) => r,
                Ok(LcmEntry::Empty) => {
                    rep.pass("compact-alignment", 0.0);
                    continue;
                }
                Ok(LcmEntry::Outside) | Err(_) => {
                    rep.skip("compact-alignment");
                    continue;
                }
            };
            let mut worst: f64 = 0.0;
            let mut failed = false;
            for s in &spans[p].basis {
                for t in &spans[q].basis {
                    match x.meet(p, q, s, t) {
                        Ok(Some(v)) => {
                            let col = ComplexMatrix::from_column_slice(v.len(), 1, v.as_slice());
                            let (a, ap) = &span_proj[r];
                            worst = worst.max(max_abs(&(a * (ap * &col) - &col)));
                        }
                        _ => failed = true,
                    }
                }
            }
            if failed {
                rep.skip("compact-alignment");
            } else {
                rep.check("compact-alignment", worst, tol.eps, || format!("({}, {})", w.show(p), w.show(q)));
            }
        }
    }
    rep
}
