//! Complex matrices, concrete finite-dimensional C*-algebras and tolerance
//! based comparison.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{AlgebraError, Result};
use crate::report::ViolationReport;

pub type ComplexMatrix = DMatrix<Complex64>;
pub type ComplexVector = DVector<Complex64>;

/// Relative cutoff used for numerical rank and pseudo-inverses.
const RANK_CUTOFF: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub eps: f64,
}

impl Tolerance {
    pub fn new(eps: f64) -> Result<Self> {
        if !eps.is_finite() || eps < 0.0 {
            return Err(AlgebraError::Dimension(format!(
                "tolerance must be a finite nonnegative number, got {eps}"
            )));
        }
        Ok(Tolerance { eps })
    }

    pub fn exact() -> Self {
        Tolerance { eps: 0.0 }
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { eps: 1e-9 }
    }
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(n: usize) -> ComplexMatrix {
    ComplexMatrix::identity(n, n)
}

pub fn zeros(r: usize, c: usize) -> ComplexMatrix {
    ComplexMatrix::zeros(r, c)
}

/// E_ij in n×n matrices (zero-based).
pub fn matrix_unit(n: usize, i: usize, j: usize) -> ComplexMatrix {
    let mut m = zeros(n, n);
    m[(i, j)] = c(1.0, 0.0);
    m
}

pub fn diag(values: &[Complex64]) -> ComplexMatrix {
    ComplexMatrix::from_diagonal(&ComplexVector::from_column_slice(values))
}

pub fn real_diag(values: &[f64]) -> ComplexMatrix {
    let v: Vec<Complex64> = values.iter().map(|&x| c(x, 0.0)).collect();
    diag(&v)
}

pub fn from_rows(rows: &[Vec<Complex64>]) -> ComplexMatrix {
    let r = rows.len();
    let cols = rows.first().map_or(0, Vec::len);
    ComplexMatrix::from_fn(r, cols, |i, j| rows[i][j])
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

pub fn all_finite(a: &ComplexMatrix) -> bool {
    a.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

fn same_shape(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<()> {
    if a.shape() != b.shape() {
        return Err(AlgebraError::Dimension(format!("{:?} vs {:?}", a.shape(), b.shape())));
    }
    Ok(())
}

fn square(a: &ComplexMatrix) -> Result<()> {
    if !a.is_square() {
        return Err(AlgebraError::Dimension(format!("expected a square matrix, got {:?}", a.shape())));
    }
    Ok(())
}

/// Largest entrywise modulus.
pub fn max_abs(a: &ComplexMatrix) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_abs_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    same_shape(a, b)?;
    Ok(a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max))
}

pub fn approx_eq(a: &ComplexMatrix, b: &ComplexMatrix, tol: Tolerance) -> Result<bool> {
    Ok(max_abs_diff(a, b)? <= tol.eps)
}

pub fn hermitian_defect(a: &ComplexMatrix) -> Result<f64> {
    square(a)?;
    max_abs_diff(a, &a.adjoint())
}

/// Smallest eigenvalue of the Hermitian part (A + A*)/2.
pub fn min_eigenvalue(a: &ComplexMatrix) -> Result<f64> {
    square(a)?;
    if a.nrows() == 0 {
        return Ok(0.0);
    }
    let h = (a + a.adjoint()) * c(0.5, 0.0);
    let eig = h.symmetric_eigenvalues();
    Ok(eig.iter().copied().fold(f64::INFINITY, f64::min))
}

pub fn is_positive(a: &ComplexMatrix, tol: Tolerance) -> Result<bool> {
    Ok(hermitian_defect(a)? <= tol.eps && min_eigenvalue(a)? >= -tol.eps)
}

/// Operator norm (largest singular value).
pub fn spectral_norm(a: &ComplexMatrix) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    a.clone().svd(false, false).singular_values.iter().copied().fold(0.0, f64::max)
}

fn cutoff(sv: &DVector<f64>) -> f64 {
    let top = sv.iter().copied().fold(0.0, f64::max);
    RANK_CUTOFF * top.max(1.0)
}

pub fn rank(a: &ComplexMatrix) -> usize {
    if a.is_empty() {
        return 0;
    }
    let sv = a.clone().svd(false, false).singular_values;
    let cut = cutoff(&sv);
    sv.iter().filter(|&&s| s > cut).count()
}

pub fn pinv(a: &ComplexMatrix) -> ComplexMatrix {
    if a.is_empty() {
        return zeros(a.ncols(), a.nrows());
    }
    let svd = a.clone().svd(true, true);
    let cut = cutoff(&svd.singular_values);
    svd.pseudo_inverse(cut).expect("both singular bases were requested")
}

/// Least-squares solution of A x = b and the residual max |A x - b|.
pub fn least_squares(a: &ComplexMatrix, b: &ComplexMatrix) -> (ComplexMatrix, f64) {
    let x = pinv(a) * b;
    let r = max_abs(&(a * &x - b));
    (x, r)
}

/// Column-major vectorisation.
pub fn vectorize(a: &ComplexMatrix) -> ComplexVector {
    ComplexVector::from_column_slice(a.as_slice())
}

/// Hermitian square root of a positive semidefinite matrix.
pub fn psd_sqrt(a: &ComplexMatrix) -> ComplexMatrix {
    let h = (a + a.adjoint()) * c(0.5, 0.0);
    let eig = h.symmetric_eigen();
    let roots: Vec<Complex64> = eig.eigenvalues.iter().map(|&l| c(l.max(0.0).sqrt(), 0.0)).collect();
    &eig.eigenvectors * diag(&roots) * eig.eigenvectors.adjoint()
}

/// A unital *-subalgebra of d×d matrices given by a linearly independent
/// spanning basis.
#[derive(Debug, Clone)]
pub struct FiniteCStarAlgebra {
    ambient_dim: usize,
    basis: Vec<ComplexMatrix>,
    unit: ComplexMatrix,
    synthesis: ComplexMatrix,
    analysis: ComplexMatrix,
}

impl FiniteCStarAlgebra {
    pub fn new(basis: Vec<ComplexMatrix>, unit: ComplexMatrix) -> Result<Self> {
        let d = unit.nrows();
        square(&unit)?;
        if basis.is_empty() {
            return Err(AlgebraError::Dimension("empty basis".into()));
        }
        for b in &basis {
            if b.shape() != (d, d) {
                return Err(AlgebraError::Dimension(format!(
                    "basis element of shape {:?} in a {d}x{d} algebra",
                    b.shape()
                )));
            }
        }
        let n = basis.len();
        let mut synthesis = zeros(d * d, n);
        for (k, b) in basis.iter().enumerate() {
            synthesis.set_column(k, &vectorize(b));
        }
        if rank(&synthesis) < n {
            return Err(AlgebraError::Dimension("basis matrices are linearly dependent".into()));
        }
        let analysis = pinv(&synthesis);
        let alg = FiniteCStarAlgebra {
            ambient_dim: d,
            basis,
            unit,
            synthesis,
            analysis,
        };
        let (_, r) = alg.coords(&alg.unit);
        if r > 1e-9 {
            return Err(AlgebraError::NotInAlgebra(r));
        }
        Ok(alg)
    }

    /// ℂ as 1×1 matrices.
    pub fn complex() -> Self {
        Self::diagonal(1)
    }

    /// ℂⁿ as diagonal n×n matrices.
    pub fn diagonal(n: usize) -> Self {
        let basis = (0..n).map(|i| matrix_unit(n, i, i)).collect();
        Self::new(basis, identity(n)).expect("matrix units are independent")
    }

    /// M_n with the matrix-unit basis E_ij at index i*n + j.
    pub fn full_matrix(n: usize) -> Self {
        let mut basis = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                basis.push(matrix_unit(n, i, j));
            }
        }
        Self::new(basis, identity(n)).expect("matrix units are independent")
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn basis(&self) -> &[ComplexMatrix] {
        &self.basis
    }

    pub fn unit(&self) -> &ComplexMatrix {
        &self.unit
    }

    /// Least-squares coordinates of `a` and the projection residual.
    pub fn coords(&self, a: &ComplexMatrix) -> (ComplexVector, f64) {
        if a.shape() != (self.ambient_dim, self.ambient_dim) {
            return (ComplexVector::zeros(self.dim()), f64::INFINITY);
        }
        let v = vectorize(a);
        let x = &self.analysis * &v;
        let r = (&self.synthesis * &x - v).iter().map(|z| z.norm()).fold(0.0, f64::max);
        (x, r)
    }

    pub fn try_coords(&self, a: &ComplexMatrix, tol: Tolerance) -> Result<ComplexVector> {
        let (x, r) = self.coords(a);
        if r > tol.eps {
            return Err(AlgebraError::NotInAlgebra(r));
        }
        Ok(x)
    }

    pub fn contains(&self, a: &ComplexMatrix, tol: Tolerance) -> bool {
        self.coords(a).1 <= tol.eps
    }

    pub fn element(&self, coords: &[Complex64]) -> ComplexMatrix {
        let mut m = zeros(self.ambient_dim, self.ambient_dim);
        for (k, z) in coords.iter().enumerate() {
            m += &self.basis[k] * *z;
        }
        m
    }

    /// The trace of the ambient realisation, a faithful positive functional.
    pub fn trace(&self, a: &ComplexMatrix) -> Complex64 {
        a.trace()
    }

    /// Checks closure under products and adjoints, and the unit laws.
    pub fn validate(&self, tol: Tolerance) -> ViolationReport {
        let mut rep = ViolationReport::new();
        for (i, a) in self.basis.iter().enumerate() {
            let (_, r) = self.coords(&a.adjoint());
            rep.check("adjoint-closure", r, tol.eps, || format!("b{i}"));
            let left = max_abs_diff(&(&self.unit * a), a).unwrap_or(f64::INFINITY);
            let right = max_abs_diff(&(a * &self.unit), a).unwrap_or(f64::INFINITY);
            rep.check("unit", left.max(right), tol.eps, || format!("b{i}"));
            for (j, b) in self.basis.iter().enumerate() {
                let (_, r) = self.coords(&(a * b));
                rep.check("product-closure", r, tol.eps, || format!("(b{i}, b{j})"));
            }
        }
        rep
    }
}

/// Extends images of basis elements linearly to an arbitrary element.
pub fn apply_linear(images: &[ComplexMatrix], a: &FiniteCStarAlgebra, x: &ComplexMatrix) -> ComplexMatrix {
    let (coords, _) = a.coords(x);
    let (r, cols) = images.first().map_or((0, 0), |m| m.shape());
    let mut out = zeros(r, cols);
    for (k, z) in coords.iter().enumerate() {
        out += &images[k] * *z;
    }
    out
}

/// Checks that the linear map sending `a.basis()[k]` to `images[k]` is a
/// unital *-homomorphism from `a` into `b`.
pub fn check_star_homomorphism(images: &[ComplexMatrix], a: &FiniteCStarAlgebra, b: &FiniteCStarAlgebra, tol: Tolerance) -> ViolationReport {
    let mut rep = ViolationReport::new();
    for tag in ["containment", "multiplicative", "star", "unital"] {
        rep.touch(tag);
    }
    if images.len() != a.dim() {
        rep.fail(
            "containment",
            format!("{} images for a basis of size {}", images.len(), a.dim()),
            f64::INFINITY,
        );
        return rep;
    }
    for (k, img) in images.iter().enumerate() {
        let (_, r) = b.coords(img);
        rep.check("containment", r, tol.eps, || format!("b{k}"));
    }
    let f = |x: &ComplexMatrix| apply_linear(images, a, x);
    for (i, x) in a.basis().iter().enumerate() {
        let lhs = f(&x.adjoint());
        let rhs = images[i].adjoint();
        let r = max_abs_diff(&lhs, &rhs).unwrap_or(f64::INFINITY);
        rep.check("star", r, tol.eps, || format!("b{i}"));
        for (j, y) in a.basis().iter().enumerate() {
            let lhs = f(&(x * y));
            let rhs = &images[i] * &images[j];
            let r = max_abs_diff(&lhs, &rhs).unwrap_or(f64::INFINITY);
            rep.check("multiplicative", r, tol.eps, || format!("(b{i}, b{j})"));
        }
    }
    let r = max_abs_diff(&f(a.unit()), b.unit()).unwrap_or(f64::INFINITY);
    rep.check("unital", r, tol.eps, || "1".into());
    rep
}
