//! Finite-dimensional C*-correspondences given by structure tensors.
//!
//! A fiber is ℂᵐ with basis e_0..e_{m-1}. The right action of the k-th
//! algebra basis element is the matrix `right[k]`, the left action is
//! `left[k]`, and `inner[i][j] = ⟨e_i, e_j⟩` is an element of the
//! coefficient algebra, realised as a d×d matrix.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{AlgebraError, Result};
use crate::report::ViolationReport;
use crate::scalar::{
    c, identity, is_positive, least_squares, max_abs, max_abs_diff, min_eigenvalue, pinv, psd_sqrt, rank, spectral_norm, zeros, ComplexMatrix,
    ComplexVector, FiniteCStarAlgebra, Tolerance,
};

#[derive(Debug, Clone)]
pub struct Correspondence {
    pub coeff: Arc<FiniteCStarAlgebra>,
    pub dim: usize,
    pub right: Vec<ComplexMatrix>,
    pub left: Vec<ComplexMatrix>,
    pub inner: Vec<Vec<ComplexMatrix>>,
    /// When false the form is extended bilinearly instead of conjugating
    /// the first slot. Only useful for exercising the validator.
    pub sesquilinear: bool,
}

/// A spanning set of the compact operators and whether it exhausts the
/// adjointable (right 𝒜-linear) operators.
#[derive(Debug, Clone)]
pub struct CompactSpan {
    pub basis: Vec<ComplexMatrix>,
    pub equals_adjointable: bool,
    pub adjointable_dim: usize,
}

impl Correspondence {
    pub fn new(
        coeff: Arc<FiniteCStarAlgebra>,
        dim: usize,
        right: Vec<ComplexMatrix>,
        left: Vec<ComplexMatrix>,
        inner: Vec<Vec<ComplexMatrix>>,
    ) -> Result<Self> {
        let n = coeff.dim();
        let d = coeff.ambient_dim();
        if right.len() != n || left.len() != n {
            return Err(AlgebraError::Dimension(format!(
                "actions given for {} / {} basis elements, algebra has {n}",
                right.len(),
                left.len()
            )));
        }
        if right.iter().chain(&left).any(|m| m.shape() != (dim, dim)) {
            return Err(AlgebraError::Dimension(format!("action matrices must be {dim}x{dim}")));
        }
        if inner.len() != dim || inner.iter().any(|row| row.len() != dim || row.iter().any(|g| g.shape() != (d, d))) {
            return Err(AlgebraError::Dimension(format!("inner product must be {dim}x{dim} blocks of {d}x{d}")));
        }
        Ok(Correspondence {
            coeff,
            dim,
            right,
            left,
            inner,
            sesquilinear: true,
        })
    }

    /// 𝒜 as a correspondence over itself, with coordinates in the algebra
    /// basis.
    pub fn identity_fiber(coeff: Arc<FiniteCStarAlgebra>) -> Self {
        let n = coeff.dim();
        let basis = coeff.basis().to_vec();
        let mat_of = |f: &dyn Fn(&ComplexMatrix) -> ComplexMatrix| {
            let mut m = zeros(n, n);
            for (j, b) in basis.iter().enumerate() {
                m.set_column(j, &coeff.coords(&f(b)).0);
            }
            m
        };
        let right = basis.iter().map(|a| mat_of(&|x| x * a)).collect();
        let left = basis.iter().map(|a| mat_of(&|x| a * x)).collect();
        let inner = basis.iter().map(|x| basis.iter().map(|y| x.adjoint() * y).collect()).collect();
        Correspondence::new(coeff, n, right, left, inner).expect("shapes agree by construction")
    }

    /// ℂᵐ as a Hilbert space (a correspondence over ℂ).
    pub fn hilbert_space(m: usize) -> Self {
        let coeff = Arc::new(FiniteCStarAlgebra::complex());
        let inner = (0..m)
            .map(|i| {
                (0..m)
                    .map(|j| ComplexMatrix::from_element(1, 1, c(f64::from(u8::from(i == j)), 0.0)))
                    .collect()
            })
            .collect();
        Correspondence::new(coeff, m, vec![identity(m)], vec![identity(m)], inner).expect("shapes agree")
    }

    pub fn basis_vector(&self, i: usize) -> ComplexVector {
        let mut v = ComplexVector::zeros(self.dim);
        v[i] = c(1.0, 0.0);
        v
    }

    /// ⟨x, y⟩ ∈ 𝒜.
    pub fn inner_product(&self, x: &ComplexVector, y: &ComplexVector) -> ComplexMatrix {
        let d = self.coeff.ambient_dim();
        let mut out = zeros(d, d);
        for i in 0..self.dim {
            let xi = if self.sesquilinear { x[i].conj() } else { x[i] };
            if xi == Complex64::default() {
                continue;
            }
            for j in 0..self.dim {
                if y[j] != Complex64::default() {
                    out += &self.inner[i][j] * (xi * y[j]);
                }
            }
        }
        out
    }

    /// The matrix of x ↦ x·a.
    pub fn right_op(&self, a: &ComplexMatrix) -> ComplexMatrix {
        let (coords, _) = self.coeff.coords(a);
        let mut m = zeros(self.dim, self.dim);
        for (k, z) in coords.iter().enumerate() {
            m += &self.right[k] * *z;
        }
        m
    }

    /// The matrix of φ(a).
    pub fn left_op(&self, a: &ComplexMatrix) -> ComplexMatrix {
        let (coords, _) = self.coeff.coords(a);
        let mut m = zeros(self.dim, self.dim);
        for (k, z) in coords.iter().enumerate() {
            m += &self.left[k] * *z;
        }
        m
    }

    /// The (m·d)×(m·d) block Gram matrix [⟨e_i, e_j⟩], index i*d + r.
    pub fn gram_block(&self) -> ComplexMatrix {
        let d = self.coeff.ambient_dim();
        let mut k = zeros(self.dim * d, self.dim * d);
        for i in 0..self.dim {
            for j in 0..self.dim {
                k.view_mut((i * d, j * d), (d, d)).copy_from(&self.inner[i][j]);
            }
        }
        k
    }

    /// The m×m matrix [tr ⟨e_i, e_j⟩]; positive definite iff the module
    /// inner product is definite.
    pub fn trace_gram(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.dim, self.dim, |i, j| self.inner[i][j].trace())
    }

    /// Basis vectors, their i-multiples and the neighbour sums
    /// e_i + e_{i+1}, e_i + i·e_{i+1}. These detect failures of
    /// sesquilinearity as well.
    fn probes(&self) -> Vec<(String, ComplexVector)> {
        let mut out = Vec::new();
        for i in 0..self.dim {
            out.push((format!("e{i}"), self.basis_vector(i)));
            out.push((format!("i·e{i}"), self.basis_vector(i) * c(0.0, 1.0)));
        }
        for i in 0..self.dim.saturating_sub(1) {
            let j = i + 1;
            out.push((format!("e{i}+e{j}"), self.basis_vector(i) + self.basis_vector(j)));
            out.push((format!("e{i}+i·e{j}"), self.basis_vector(i) + self.basis_vector(j) * c(0.0, 1.0)));
        }
        out
    }

    /// z ↦ x⟨y, z⟩.
    pub fn rank_one(&self, x: &ComplexVector, y: &ComplexVector) -> Result<ComplexMatrix> {
        if x.len() != self.dim || y.len() != self.dim {
            return Err(AlgebraError::Dimension(format!(
                "vectors of length {} and {} in a fiber of dimension {}",
                x.len(),
                y.len(),
                self.dim
            )));
        }
        let mut t = zeros(self.dim, self.dim);
        for j in 0..self.dim {
            let a = self.inner_product(y, &self.basis_vector(j));
            t.set_column(j, &(self.right_op(&a) * x));
        }
        Ok(t)
    }

    /// Linear conditions T R_k = R_k T describing right 𝒜-linear maps, as a
    /// matrix acting on column-major vec(T).
    fn commutant_system(&self) -> ComplexMatrix {
        let m = self.dim;
        let id = identity(m);
        let mut rows = zeros(m * m * self.right.len(), m * m);
        for (k, r) in self.right.iter().enumerate() {
            // vec(T R) = (Rᵀ ⊗ I) vec(T), vec(R T) = (I ⊗ R) vec(T).
            let block = r.transpose().kronecker(&id) - id.kronecker(r);
            rows.view_mut((k * m * m, 0), (m * m, m * m)).copy_from(&block);
        }
        rows
    }

    pub fn compact_span(&self) -> CompactSpan {
        let m = self.dim;
        let mut basis: Vec<ComplexMatrix> = Vec::new();
        for i in 0..m {
            for j in 0..m {
                let th = self
                    .rank_one(&self.basis_vector(i), &self.basis_vector(j))
                    .expect("basis vectors have the right length");
                let mut cols: Vec<&ComplexMatrix> = basis.iter().collect();
                cols.push(&th);
                let stacked = ComplexMatrix::from_fn(m * m, cols.len(), |r, k| cols[k].as_slice()[r]);
                if rank(&stacked) > basis.len() {
                    basis.push(th);
                }
            }
        }
        let sys = self.commutant_system();
        let adjointable_dim = m * m - rank(&sys);
        let inside = basis.iter().all(|t| {
            let v = ComplexVector::from_column_slice(t.as_slice());
            max_abs(&(&sys * ComplexMatrix::from_column_slice(m * m, 1, v.as_slice()))) <= 1e-9
        });
        CompactSpan {
            equals_adjointable: inside && basis.len() == adjointable_dim,
            adjointable_dim,
            basis,
        }
    }

    /// Solves ⟨T* e_i, e_j⟩ = ⟨e_i, T e_j⟩ for T*, returning `None` when the
    /// system has no solution to tolerance.
    pub fn adjoint_in_module(&self, t: &ComplexMatrix, tol: Tolerance) -> Option<ComplexMatrix> {
        let m = self.dim;
        let d = self.coeff.ambient_dim();
        if t.shape() != (m, m) {
            return None;
        }
        // Unknowns U = conj(T*) with ⟨T* e_i, e_j⟩ = Σ_k U[k,i] G[k][j];
        // variable (k, i) sits at index k*m + i.
        let eqs = m * m * d * d;
        let mut a = zeros(eqs, m * m);
        let mut b = zeros(eqs, 1);
        for i in 0..m {
            for j in 0..m {
                let rhs = self.inner_product(&self.basis_vector(i), &(t * self.basis_vector(j)));
                for r in 0..d {
                    for col in 0..d {
                        let row = ((i * m + j) * d + r) * d + col;
                        b[(row, 0)] = rhs[(r, col)];
                        for k in 0..m {
                            a[(row, k * m + i)] = self.inner[k][j][(r, col)];
                        }
                    }
                }
            }
        }
        let (u, resid) = least_squares(&a, &b);
        if resid > tol.eps.max(1e-12) {
            return None;
        }
        Some(ComplexMatrix::from_fn(m, m, |k, i| u[(k * m + i, 0)].conj()))
    }

    /// ‖T‖ as an operator on the Hilbert module, computed on X ⊗_𝒜 ℂᵈ.
    pub fn module_operator_norm(&self, t: &ComplexMatrix) -> f64 {
        let d = self.coeff.ambient_dim();
        let w = psd_sqrt(&self.gram_block());
        let big = t.kronecker(&identity(d));
        spectral_norm(&(&w * big * pinv(&w)))
    }

    /// ‖x‖ = ‖⟨x, x⟩‖^{1/2}.
    pub fn norm(&self, x: &ComplexVector) -> f64 {
        spectral_norm(&self.inner_product(x, x)).sqrt()
    }
}

/// Checks the correspondence axioms on spanning sets.
pub fn validate_correspondence(x: &Correspondence, tol: Tolerance) -> ViolationReport {
    let mut rep = ViolationReport::new();
    let eps = tol.eps;
    let alg = &x.coeff;
    let probes = x.probes();
    for tag in [
        "right-linearity",
        "symmetry",
        "positivity",
        "definiteness",
        "right-action",
        "left-action",
        "left-adjoint",
        "bimodule",
        "essential",
    ] {
        rep.touch(tag);
    }

    for (nx, vx) in &probes {
        for (ny, vy) in &probes {
            let xy = x.inner_product(vx, vy);
            let yx = x.inner_product(vy, vx);
            let r = max_abs_diff(&xy.adjoint(), &yx).unwrap_or(f64::INFINITY);
            rep.check("symmetry", r, eps, || format!("x={nx}, y={ny}"));
            for (k, a) in alg.basis().iter().enumerate() {
                let lhs = x.inner_product(vx, &(&x.right[k] * vy));
                let r = max_abs_diff(&lhs, &(&xy * a)).unwrap_or(f64::INFINITY);
                rep.check("right-linearity", r, eps, || format!("x={nx}, y={ny}, a=b{k}"));
            }
        }
    }

    let gram = x.gram_block();
    match min_eigenvalue(&gram) {
        Ok(lo) => {
            let ok = is_positive(&gram, tol).unwrap_or(false);
            rep.expect("positivity", ok, || format!("block Gram matrix has eigenvalue {lo:.3e}"));
        }
        Err(e) => rep.fail("positivity", e.to_string(), f64::INFINITY),
    }
    if x.dim > 0 {
        let lo = min_eigenvalue(&x.trace_gram()).unwrap_or(f64::NEG_INFINITY);
        rep.expect("definiteness", lo > eps, || format!("trace Gram spectrum reaches {lo:.3e}"));
        if lo > eps && lo < 1e3 * eps.max(1e-12) {
            rep.note(format!("near-degenerate inner product: smallest trace Gram eigenvalue {lo:.3e}"));
        }
    }

    // x·(ab) = (x·a)·b, x·1 = x.
    let m = x.dim;
    let r_unit = max_abs_diff(&x.right_op(alg.unit()), &identity(m)).unwrap_or(f64::INFINITY);
    rep.check("right-action", r_unit, eps, || "x·1 ≠ x".into());
    let l_unit = max_abs_diff(&x.left_op(alg.unit()), &identity(m)).unwrap_or(f64::INFINITY);
    rep.check("left-action", l_unit, eps, || "φ(1) ≠ 1".into());
    for (i, a) in alg.basis().iter().enumerate() {
        for (j, b) in alg.basis().iter().enumerate() {
            let ab = a * b;
            let r = max_abs_diff(&x.right_op(&ab), &(&x.right[j] * &x.right[i])).unwrap_or(f64::INFINITY);
            rep.check("right-action", r, eps, || format!("(b{i}, b{j})"));
            let r = max_abs_diff(&x.left_op(&ab), &(&x.left[i] * &x.left[j])).unwrap_or(f64::INFINITY);
            rep.check("left-action", r, eps, || format!("(b{i}, b{j})"));
            let r = max_abs_diff(&(&x.left[i] * &x.right[j]), &(&x.right[j] * &x.left[i])).unwrap_or(f64::INFINITY);
            rep.check("bimodule", r, eps, || format!("φ(b{i}) vs right b{j}"));
        }
        // ⟨φ(a)u, v⟩ = ⟨u, φ(a*)v⟩
        let star = x.left_op(&a.adjoint());
        for p in 0..m {
            for q in 0..m {
                let (u, v) = (x.basis_vector(p), x.basis_vector(q));
                let lhs = x.inner_product(&(&x.left[i] * &u), &v);
                let rhs = x.inner_product(&u, &(&star * &v));
                let r = max_abs_diff(&lhs, &rhs).unwrap_or(f64::INFINITY);
                rep.check("left-adjoint", r, eps, || format!("a=b{i}, x=e{p}, y=e{q}"));
            }
        }
    }

    let mut span = zeros(m, m * alg.dim());
    for (k, l) in x.left.iter().enumerate() {
        span.view_mut((0, k * m), (m, m)).copy_from(l);
    }
    let rk = if m == 0 { 0 } else { rank(&span) };
    rep.expect("essential", rk == m, || format!("span φ(𝒜)X has dimension {rk} < {m}"));
    rep
}
