//! The Zappa-Szép product system X⋈G over P⋈G, the crossed product 𝒜⋊G
//! with its conditional expectation, and the homogeneous product X⋈̃G over
//! P with coefficients in 𝒜⋊G.

use std::collections::HashMap;
use std::sync::Arc;

use crate::action::{is_homogeneous, validate_zs_action, ZsSystem};
use crate::error::{AlgebraError, Result};
use crate::module::Correspondence;
use crate::product_system::{IndexWindow, ProductSystem};
use crate::report::ViolationReport;
use crate::scalar::{check_star_homomorphism, identity, max_abs_diff, rank, zeros, ComplexMatrix, FiniteCStarAlgebra, Tolerance};
use crate::semigroup::{Group, GroupElement, IndexMonoid, Semigroup};
use crate::zs::{ZsElement, ZsProduct};

/// All elements of a finite group, identity first.
pub fn group_elements(g: &Group) -> Result<Vec<GroupElement>> {
    let n = g
        .order()
        .ok_or_else(|| AlgebraError::Unsupported("construction needs a finite group".into()))?;
    let els = g.enumerate_ball(n).elements;
    debug_assert_eq!(els.len(), n);
    Ok(els)
}

/// X⋈G: fibers Y_(p,g) on the carrier of X_p.
#[derive(Debug, Clone)]
pub struct BowtieSystem {
    pub base: ZsSystem,
    pub system: ProductSystem<ZsProduct>,
}

impl BowtieSystem {
    /// Index of (p, g) in the P⋈G window.
    pub fn position(&self, x: &ZsElement) -> Option<usize> {
        self.system.window.position(x)
    }
}

pub fn build_bowtie(s: &ZsSystem, tol: Tolerance) -> Result<BowtieSystem> {
    let rep = validate_zs_action(s, tol);
    if !rep.is_clean() {
        return Err(AlgebraError::refused_with("the ZS action fails its axioms", rep));
    }
    let base = &s.system;
    let pw = &base.window;
    let zs = &s.zs;
    let prod = ZsProduct::new(zs.clone(), s.pball(), s.gball.clone());
    let elements = prod.window().elements;
    let window = IndexWindow::new(prod, elements)?;
    let coeff = base.coeff.clone();
    let p_index = |x: &ZsElement| pw.position(&x.p).expect("window elements have P components in the base window");

    let mut fibers = Vec::with_capacity(window.len());
    for x in &window.elements {
        let xp = &base.fibers[p_index(x)];
        let ginv = zs.g.inverse(&x.g)?;
        let right = coeff
            .basis()
            .iter()
            .map(|a| Ok(xp.right_op(&s.beta_on_algebra(&x.g, a)?)))
            .collect::<Result<Vec<_>>>()?;
        let inner = xp
            .inner
            .iter()
            .map(|row| row.iter().map(|g| s.beta_on_algebra(&ginv, g)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        fibers.push(Correspondence::new(coeff.clone(), xp.dim, right, xp.left.clone(), inner)?);
    }

    let mut mult = HashMap::new();
    for i in 0..window.len() {
        for j in 0..window.len() {
            if window.product(i, j).is_none() {
                continue;
            }
            let (x, y) = (&window.elements[i], &window.elements[j]);
            let gq = zs.act(&x.g, &y.p)?;
            let (pi, gqi) = (p_index(x), pw.position(&gq).ok_or_else(|| AlgebraError::WindowOverflow(zs.p.show(&gq)))?);
            let m = base
                .mult(pi, gqi)
                .ok_or_else(|| AlgebraError::WindowOverflow(format!("{}·{}", pw.show(pi), pw.show(gqi))))?;
            let twist = identity(base.fibers[pi].dim).kronecker(&s.beta_matrix(&x.g, &y.p)?);
            mult.insert((i, j), m * twist);
        }
    }
    let system = ProductSystem::new(window, coeff, fibers, mult)?;
    Ok(BowtieSystem { base: s.clone(), system })
}

/// 𝒜⋊G in the regular representation on ℂ^{d|G|}: ξ(h) occupies rows
/// h*d..(h+1)*d, π(a)ξ(h) = β_{h⁻¹}(a)ξ(h) and (λ_g ξ)(h) = ξ(g⁻¹h). Since G
/// is finite this realises the universal crossed product. The basis element
/// a_k u_g sits at index k*|G| + g.
#[derive(Debug, Clone)]
pub struct CrossedProduct {
    pub algebra: Arc<FiniteCStarAlgebra>,
    pub base: Arc<FiniteCStarAlgebra>,
    pub group: Group,
    pub elements: Vec<GroupElement>,
    /// β_g on 𝒜 in basis coordinates, indexed like `elements`.
    pub beta: Vec<ComplexMatrix>,
}

impl CrossedProduct {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn group_index(&self, g: &GroupElement) -> Result<usize> {
        self.elements
            .iter()
            .position(|h| h == g)
            .ok_or_else(|| AlgebraError::Domain(format!("group element {:?}", g.0)))
    }

    fn beta_apply(&self, gi: usize, a: &ComplexMatrix) -> ComplexMatrix {
        let (coords, _) = self.base.coords(a);
        self.base.element((&self.beta[gi] * coords).as_slice())
    }

    /// π(a).
    pub fn embed(&self, a: &ComplexMatrix) -> ComplexMatrix {
        let d = self.base.ambient_dim();
        let n = self.order();
        let mut out = zeros(d * n, d * n);
        for (hi, h) in self.elements.iter().enumerate() {
            let hinv = self
                .group_index(&self.group.inverse(h).expect("listed elements are valid"))
                .expect("closed");
            out.view_mut((hi * d, hi * d), (d, d)).copy_from(&self.beta_apply(hinv, a));
        }
        out
    }

    /// λ_g.
    pub fn unitary(&self, g: &GroupElement) -> Result<ComplexMatrix> {
        let d = self.base.ambient_dim();
        let n = self.order();
        let ginv = self.group.inverse(g)?;
        let mut out = zeros(d * n, d * n);
        for (hi, h) in self.elements.iter().enumerate() {
            let src = self.group_index(&self.group.multiply(&ginv, h)?)?;
            out.view_mut((hi * d, src * d), (d, d)).copy_from(&identity(d));
        }
        Ok(out)
    }

    /// a u_g.
    pub fn element(&self, a: &ComplexMatrix, g: &GroupElement) -> Result<ComplexMatrix> {
        Ok(self.embed(a) * self.unitary(g)?)
    }

    /// β_g(a).
    pub fn beta_on(&self, g: &GroupElement, a: &ComplexMatrix) -> Result<ComplexMatrix> {
        Ok(self.beta_apply(self.group_index(g)?, a))
    }

    /// Φ(Σ a_g u_g) = a_e.
    pub fn expectation(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let (coords, _) = self.algebra.coords(x);
        let n = self.order();
        let a: Vec<_> = (0..self.base.dim()).map(|k| coords[k * n]).collect();
        self.base.element(&a)
    }

    /// Dimension of the centre of the crossed product.
    pub fn center_dim(&self) -> usize {
        let basis = self.algebra.basis();
        let nb = basis.len();
        let side = self.algebra.ambient_dim();
        let mut sys = zeros(nb * side * side, nb);
        for (j, bj) in basis.iter().enumerate() {
            for (i, bi) in basis.iter().enumerate() {
                let comm = bi * bj - bj * bi;
                sys.view_mut((j * side * side, i), (side * side, 1)).copy_from_slice(comm.as_slice());
            }
        }
        nb - rank(&sys)
    }
}

/// Builds 𝒜⋊G from β_g on 𝒜 given in basis coordinates.
pub fn build_crossed_product(
    base: Arc<FiniteCStarAlgebra>,
    group: Group,
    beta: impl Fn(&GroupElement) -> Result<ComplexMatrix>,
    tol: Tolerance,
) -> Result<CrossedProduct> {
    let elements = group_elements(&group)?;
    let nb = base.dim();
    let mut pre = ViolationReport::new();
    let mut maps = Vec::with_capacity(elements.len());
    for g in &elements {
        let b = beta(g)?;
        if b.shape() != (nb, nb) {
            return Err(AlgebraError::Dimension(format!("β on 𝒜 must be {nb}x{nb}")));
        }
        let images: Vec<ComplexMatrix> = (0..nb).map(|k| base.element(b.column(k).as_slice())).collect();
        pre.merge_context("automorphism", &group.show(g), check_star_homomorphism(&images, &base, &base, tol));
        maps.push(b);
    }
    pre.touch("homomorphism");
    for (gi, g) in elements.iter().enumerate() {
        for (hi, h) in elements.iter().enumerate() {
            let gh = group.multiply(g, h)?;
            let ghi = elements.iter().position(|x| *x == gh).expect("group is closed");
            let r = max_abs_diff(&(&maps[gi] * &maps[hi]), &maps[ghi])?;
            pre.check("homomorphism", r, tol.eps, || format!("g={}, h={}", group.show(g), group.show(h)));
        }
    }
    if !pre.is_clean() {
        return Err(AlgebraError::refused_with("β is not an action by automorphisms", pre));
    }

    let mut cp = CrossedProduct {
        algebra: Arc::new(FiniteCStarAlgebra::complex()),
        base: base.clone(),
        group,
        elements,
        beta: maps,
    };
    let mut basis = Vec::with_capacity(nb * cp.order());
    for a in base.basis() {
        for g in &cp.elements {
            basis.push(cp.element(a, g)?);
        }
    }
    let unit = identity(base.ambient_dim() * cp.order());
    cp.algebra = Arc::new(FiniteCStarAlgebra::new(basis, unit)?);
    let rep = validate_crossed_product(&cp, tol);
    if !rep.is_clean() {
        return Err(AlgebraError::refused_with("crossed product identities fail", rep));
    }
    Ok(cp)
}

/// Covariance u_g a u_g* = β_g(a), Φ(a u_e) = a, Φ(u_g) = 0 for g ≠ e,
/// idempotence of Φ and positivity of Φ on elements x*x.
pub fn validate_crossed_product(cp: &CrossedProduct, tol: Tolerance) -> ViolationReport {
    let mut rep = ViolationReport::new();
    for tag in ["covariance", "expectation", "expectation-positivity"] {
        rep.touch(tag);
    }
    let eps = tol.eps;
    let e = cp.group.identity();
    for g in &cp.elements {
        let Ok(u) = cp.unitary(g) else {
            rep.skip("covariance");
            continue;
        };
        for (k, a) in cp.base.basis().iter().enumerate() {
            let lhs = &u * cp.embed(a);
            let r = cp
                .beta_on(g, a)
                .and_then(|b| max_abs_diff(&lhs, &(cp.embed(&b) * &u)))
                .unwrap_or(f64::INFINITY);
            rep.check("covariance", r, eps, || format!("g={}, a=b{k}", cp.group.show(g)));
            let x = &lhs;
            let phi = cp.expectation(x);
            let want = if *g == e { a.clone() } else { zeros(a.nrows(), a.ncols()) };
            rep.check("expectation", max_abs_diff(&phi, &want).unwrap_or(f64::INFINITY), eps, || {
                format!("Φ(u_{} b{k})", cp.group.show(g))
            });
            let again = cp.expectation(&cp.embed(&phi));
            rep.check("expectation", max_abs_diff(&again, &phi).unwrap_or(f64::INFINITY), eps, || {
                format!("Φ∘Φ at u_{} b{k}", cp.group.show(g))
            });
            let pos = cp.expectation(&(x.adjoint() * x));
            let m = crate::scalar::min_eigenvalue(&pos).unwrap_or(f64::NEG_INFINITY);
            rep.check("expectation-positivity", (-m).max(0.0), eps, || {
                format!("Φ(x*x) at x = b{k} u_{}", cp.group.show(g))
            });
        }
    }
    rep
}

/// X⋈̃G: fibers Z_p = X_p ⊗ ℂ[G] over P with coefficients in 𝒜⋊G. The
/// basis vector e_i ⊗ g sits at index i*|G| + g.
#[derive(Debug, Clone)]
pub struct TildeBowtieSystem {
    pub base: ZsSystem,
    pub crossed: CrossedProduct,
    pub system: ProductSystem<Semigroup>,
}

pub fn build_tilde_bowtie(s: &ZsSystem, tol: Tolerance) -> Result<TildeBowtieSystem> {
    if !is_homogeneous(s) {
        return Err(AlgebraError::refused("the action is not homogeneous on the window"));
    }
    let rep = validate_zs_action(s, tol);
    if !rep.is_clean() {
        return Err(AlgebraError::refused_with("the ZS action fails its axioms", rep));
    }
    let base = &s.system;
    let zs = &s.zs;
    let e_p = zs.p.identity();
    let crossed = build_crossed_product(base.coeff.clone(), zs.g.clone(), |g| s.beta_matrix(g, &e_p), tol)?;
    let n = crossed.order();
    let els = &crossed.elements;
    let gidx = |g: &GroupElement| crossed.group_index(g);
    let big = crossed.algebra.clone();
    let nb = base.coeff.dim();

    let mut fibers = Vec::with_capacity(base.window.len());
    for (pi, p) in base.window.elements.iter().enumerate() {
        let xp = &base.fibers[pi];
        let m = xp.dim;
        let dim = m * n;
        let mut right = vec![zeros(dim, dim); nb * n];
        let mut left = vec![zeros(dim, dim); nb * n];
        for (k, a) in base.coeff.basis().iter().enumerate() {
            for (hi, h) in els.iter().enumerate() {
                let phi = &xp.left[k] * s.beta_matrix(h, p)?;
                let hp = gidx(&zs.restrict(h, p)?)?;
                for (gi, g) in els.iter().enumerate() {
                    let ra = xp.right_op(&crossed.beta_on(g, a)?);
                    let gh = gidx(&zs.g.multiply(g, h)?)?;
                    let hpg = gidx(&zs.g.multiply(&els[hp], g)?)?;
                    for i in 0..m {
                        for r in 0..m {
                            right[k * n + hi][(r * n + gh, i * n + gi)] = ra[(r, i)];
                            left[k * n + hi][(r * n + hpg, i * n + gi)] = phi[(r, i)];
                        }
                    }
                }
            }
        }
        let mut inner = vec![vec![zeros(big.ambient_dim(), big.ambient_dim()); dim]; dim];
        for (gi, g) in els.iter().enumerate() {
            let ginv = zs.g.inverse(g)?;
            for (hi, h) in els.iter().enumerate() {
                let u = crossed.unitary(&zs.g.multiply(&ginv, h)?)?;
                for i in 0..m {
                    for j in 0..m {
                        let a = crossed.beta_on(&ginv, &xp.inner[i][j])?;
                        inner[i * n + gi][j * n + hi] = crossed.embed(&a) * &u;
                    }
                }
            }
        }
        fibers.push(Correspondence::new(big.clone(), dim, right, left, inner)?);
    }

    let w = &base.window;
    let mut mult = HashMap::new();
    for pi in 0..w.len() {
        for qi in 0..w.len() {
            let Some(ri) = w.product(pi, qi) else { continue };
            let q = &w.elements[qi];
            let (mp, mq, mr) = (base.fibers[pi].dim, base.fibers[qi].dim, base.fibers[ri].dim);
            let mpq = &base.mult[&(pi, qi)];
            let mut out = zeros(mr * n, mp * n * mq * n);
            for (gi, g) in els.iter().enumerate() {
                let twisted = mpq * identity(mp).kronecker(&s.beta_matrix(g, q)?);
                let gq = zs.restrict(g, q)?;
                for (hi, h) in els.iter().enumerate() {
                    let target = gidx(&zs.g.multiply(&gq, h)?)?;
                    for i in 0..mp {
                        for j in 0..mq {
                            let col = (i * n + gi) * (mq * n) + (j * n + hi);
                            for r in 0..mr {
                                out[(r * n + target, col)] = twisted[(r, i * mq + j)];
                            }
                        }
                    }
                }
            }
            mult.insert((pi, qi), out);
        }
    }
    let system = ProductSystem::new(w.clone(), big, fibers, mult)?;
    Ok(TildeBowtieSystem {
        base: s.clone(),
        crossed,
        system,
    })
}

/// Smallest eigenvalue of each Z_p trace Gram matrix, for reporting
/// near-degenerate inner products.
pub fn tilde_gram_spectra(z: &TildeBowtieSystem) -> Vec<f64> {
    z.system
        .fibers
        .iter()
        .map(|f| crate::scalar::min_eigenvalue(&f.trace_gram()).unwrap_or(f64::NAN))
        .collect()
}

/// Largest entrywise gap between two systems over the same window.
pub fn structure_distance(a: &ProductSystem<Semigroup>, b: &ProductSystem<Semigroup>) -> f64 {
    if a.fibers.len() != b.fibers.len() {
        return f64::INFINITY;
    }
    let mut worst: f64 = 0.0;
    let gap = |x: &ComplexMatrix, y: &ComplexMatrix| max_abs_diff(x, y).unwrap_or(f64::INFINITY);
    for (x, y) in a.fibers.iter().zip(&b.fibers) {
        if x.dim != y.dim || x.right.len() != y.right.len() {
            return f64::INFINITY;
        }
        for k in 0..x.right.len() {
            worst = worst.max(gap(&x.right[k], &y.right[k])).max(gap(&x.left[k], &y.left[k]));
        }
        for i in 0..x.dim {
            for j in 0..x.dim {
                worst = worst.max(gap(&x.inner[i][j], &y.inner[i][j]));
            }
        }
    }
    for (key, m) in &a.mult {
        match b.mult.get(key) {
            Some(n) => worst = worst.max(gap(m, n)),
            None => return f64::INFINITY,
        }
    }
    if a.mult.len() != b.mult.len() {
        return f64::INFINITY;
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::examples::*;
    use crate::generators::{cal_e_system, trivial_system};
    use crate::product_system::validate_product_system;
    use crate::scalar::{c, real_diag};
    use crate::semigroup::SemigroupElement;
    use crate::zs::ZsData;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn trivial_bowtie_is_a_product_over_g() {
        let zs = ZsData::trivial(Semigroup::nk(1), Group::cyclic(2));
        let s = trivial_system(zs, 2, 1).unwrap();
        let y = build_bowtie(&s, tol()).unwrap();
        assert_eq!(y.system.fibers.len(), 6);
        let rep = validate_product_system(&y.system, tol());
        assert!(rep.is_clean(), "{:?}", rep.violations);
        let g = GroupElement(vec![1]);
        let i = y.position(&ZsElement::new(SemigroupElement(vec![1]), g.clone())).unwrap();
        let j = y.position(&ZsElement::new(SemigroupElement(vec![1]), g)).unwrap();
        let k = y.system.window.product(i, j).unwrap();
        assert_eq!(
            y.system.window.elements[k],
            ZsElement::new(SemigroupElement(vec![2]), GroupElement(vec![0]))
        );
    }

    #[test]
    fn odometer_bowtie_increments() {
        let s = odometer_system(2, 1).unwrap();
        let y = build_bowtie(&s, tol()).unwrap();
        let a = s.zs.g.parse("a").unwrap();
        let e = s.zs.g.identity();
        let eps = s.zs.p.identity();
        let zero = s.zs.p.word("0").unwrap();
        let i = y.position(&ZsElement::new(eps, a)).unwrap();
        let j = y.position(&ZsElement::new(zero, e.clone())).unwrap();
        let k = y.system.window.product(i, j).unwrap();
        assert_eq!(y.system.window.elements[k], ZsElement::new(s.zs.p.word("1").unwrap(), e));
        let v = y
            .system
            .multiply_vectors(i, &y.system.fibers[i].basis_vector(0), j, &y.system.fibers[j].basis_vector(0))
            .unwrap();
        assert_eq!(v[0], c(1.0, 0.0));
        let rep = validate_product_system(&y.system, tol());
        assert!(rep.is_clean(), "{:?}", rep.violations);
    }

    #[test]
    fn identity_group_component_keeps_inner_products_and_norms() {
        let s = twisted_two_vertex_system(2).unwrap();
        let y = build_bowtie(&s, tol()).unwrap();
        for (i, x) in y.system.window.elements.iter().enumerate() {
            let base = &s.system.fibers[s.system.window.position(&x.p).unwrap()];
            let f = &y.system.fibers[i];
            if x.g == s.zs.g.identity() {
                for (r, b) in f.inner.iter().zip(&base.inner) {
                    for (u, v) in r.iter().zip(b) {
                        assert!(max_abs_diff(u, v).unwrap() < 1e-12);
                    }
                }
            }
            let v = f.basis_vector(0) + f.basis_vector(f.dim - 1) * c(0.0, 2.0);
            assert!((f.norm(&v) - base.norm(&v)).abs() < 1e-12);
        }
    }

    #[test]
    fn invalid_action_is_refused_with_report() {
        let mut s = odometer_system(2, 1).unwrap();
        s.override_beta(GroupElement(vec![1]), s.zs.p.word("0").unwrap(), identity(1) * c(3.0, 0.0));
        match build_bowtie(&s, tol()) {
            Err(AlgebraError::Refused { report: Some(r), .. }) => assert!(r.has_violation("A6")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn swap_crossed_product_is_m2() {
        let alg = Arc::new(FiniteCStarAlgebra::diagonal(2));
        let swap = crate::scalar::from_rows(&[vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(1.0, 0.0), c(0.0, 0.0)]]);
        let cp = build_crossed_product(alg, Group::cyclic(2), |g| Ok(if g.0[0] == 0 { identity(2) } else { swap.clone() }), tol()).unwrap();
        assert_eq!(cp.algebra.dim(), 4);
        assert_eq!(cp.center_dim(), 1);
        let g = GroupElement(vec![1]);
        let u = cp.unitary(&g).unwrap();
        assert!(max_abs_diff(&cp.expectation(&u), &zeros(2, 2)).unwrap() < 1e-12);
        let a = real_diag(&[2.0, -1.0]);
        assert!(max_abs_diff(&cp.expectation(&cp.embed(&a)), &a).unwrap() < 1e-12);
    }

    #[test]
    fn trivial_action_crossed_product_is_commutative() {
        let alg = Arc::new(FiniteCStarAlgebra::diagonal(2));
        let cp = build_crossed_product(alg, Group::cyclic(3), |_| Ok(identity(2)), tol()).unwrap();
        assert_eq!(cp.algebra.dim(), 6);
        assert_eq!(cp.center_dim(), 6);
    }

    #[test]
    fn non_automorphism_is_refused() {
        let alg = Arc::new(FiniteCStarAlgebra::diagonal(2));
        let bad = real_diag(&[1.0, 0.0]);
        let r = build_crossed_product(alg, Group::cyclic(2), |g| Ok(if g.0[0] == 0 { identity(2) } else { bad.clone() }), tol());
        assert!(matches!(r, Err(AlgebraError::Refused { .. })));
    }

    #[test]
    fn infinite_group_is_unsupported() {
        let r = build_crossed_product(
            Arc::new(FiniteCStarAlgebra::complex()),
            Group::free_abelian(1),
            |_| Ok(identity(1)),
            tol(),
        );
        assert!(matches!(r, Err(AlgebraError::Unsupported(_))));
    }

    #[test]
    fn tilde_over_trivial_group_is_x() {
        let zs = ZsData::trivial(Semigroup::nk(1), Group::trivial());
        let s = trivial_system(zs, 3, 0).unwrap();
        let z = build_tilde_bowtie(&s, tol()).unwrap();
        assert!(z.system.fibers.iter().all(|f| f.dim == 1));
        assert!(validate_product_system(&z.system, tol()).is_clean());
    }

    #[test]
    fn tilde_refuses_non_homogeneous() {
        let s = odometer_system(2, 1).unwrap();
        assert!(matches!(build_tilde_bowtie(&s, tol()), Err(AlgebraError::Refused { .. })));
    }

    #[test]
    fn tilde_swap_loops_doubles_and_matches_cal_e() {
        let s = swap_loops_system(2).unwrap();
        let z = build_tilde_bowtie(&s, tol()).unwrap();
        for (a, b) in z.system.fibers.iter().zip(&s.system.fibers) {
            assert_eq!(a.dim, 2 * b.dim);
        }
        assert!(tilde_gram_spectra(&z).iter().all(|&m| m > 1e-9));
        let rep = validate_product_system(&z.system, tol());
        assert!(rep.is_clean(), "{:?}", rep.violations);
        let e = cal_e_system(&two_loop_graph(), &swap_loops_action(), 2, tol()).unwrap();
        assert!(structure_distance(&z.system, &e) <= 1e-12);
    }

    #[test]
    fn tilde_twisted_system_passes() {
        let s = twisted_two_vertex_system(2).unwrap();
        let z = build_tilde_bowtie(&s, tol()).unwrap();
        let rep = validate_product_system(&z.system, tol());
        assert!(rep.is_clean(), "{:?}", rep.violations);
    }
}
