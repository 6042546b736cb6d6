//! Dense complex linear algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};

pub type C64 = nalgebra::Complex<f64>;
pub type CMatrix = DMatrix<C64>;

/// Eigen-decomposition of a Hermitian matrix. Eigenvalues are returned in
/// ascending order with the matching eigenvectors as columns.
pub fn eigh(m: &CMatrix) -> (DVector<f64>, CMatrix) {
    let eig = m.clone().symmetric_eigen();
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let mut vectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

/// Eigenvalues of a Hermitian matrix, sorted descending.
pub fn eigvalsh_desc(m: &CMatrix) -> Vec<f64> {
    let mut v: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

/// Largest elementwise deviation |m - m†|.
pub fn hermitian_deviation(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut dev: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

/// (m + m†) / 2
pub fn hermitize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * C64::new(0.5, 0.0)
}

/// How a factor enters a product.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Op {
    Plain,
    Adjoint,
}

/// `op(a)·op(b)` through the blocked complex kernel of `matrixmultiply`.
pub fn gemm(a: &CMatrix, op_a: Op, b: &CMatrix, op_b: Op) -> CMatrix {
    let owned_a;
    let a = match op_a {
        Op::Plain => a,
        Op::Adjoint => {
            owned_a = a.adjoint();
            &owned_a
        }
    };
    let owned_b;
    let b = match op_b {
        Op::Plain => b,
        Op::Adjoint => {
            owned_b = b.adjoint();
            &owned_b
        }
    };
    let (m, k, n) = (a.nrows(), a.ncols(), b.ncols());
    assert_eq!(k, b.nrows(), "inner dimensions differ");
    let mut c = CMatrix::zeros(m, n);
    if m == 0 || n == 0 || k == 0 {
        return c;
    }
    let opt = matrixmultiply::CGemmOption::Standard;
    // SAFETY: Complex<f64> is repr(C) with the layout of [f64; 2]; all three
    // matrices are dense column-major with the strides passed here.
    unsafe {
        matrixmultiply::zgemm(
            opt,
            opt,
            m,
            k,
            n,
            [1.0, 0.0],
            a.as_ptr() as *const [f64; 2],
            1,
            m as isize,
            b.as_ptr() as *const [f64; 2],
            1,
            k as isize,
            [0.0, 0.0],
            c.as_mut_ptr() as *mut [f64; 2],
            1,
            m as isize,
        );
    }
    c
}

/// Unitary conjugation u·m·u†.
pub fn conjugate(u: &CMatrix, m: &CMatrix) -> CMatrix {
    let um = gemm(u, Op::Plain, m, Op::Plain);
    gemm(&um, Op::Plain, u, Op::Adjoint)
}

/// Largest elementwise |a - b|.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Rebuilds V·diag(f(λ))·V† for a real-valued spectral function.
pub fn spectral_map(values: &DVector<f64>, vectors: &CMatrix, f: impl Fn(f64) -> C64) -> CMatrix {
    let mut scaled = vectors.clone();
    for (j, &lambda) in values.iter().enumerate() {
        let w = f(lambda);
        for x in scaled.column_mut(j).iter_mut() {
            *x *= w;
        }
    }
    gemm(&scaled, Op::Plain, vectors, Op::Adjoint)
}
