//! Dense complex linear algebra used by the Hermitian model.
//!
//! Every spectral routine first checks that its input is finite: the
//! iterative eigensolver does not terminate on NaN input, so non-finite
//! matrices short-circuit to NaN results instead.

use nalgebra::{DMatrix, DVector, SymmetricEigen, SVD};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type RMatrix = DMatrix<f64>;

const MAX_ITER: usize = 100_000;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn all_finite(a: &CMatrix) -> bool {
    a.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub fn nan_matrix(rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_element(rows, cols, c(f64::NAN, f64::NAN))
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

/// `(a + a*) / 2`
pub fn hermitian_part(a: &CMatrix) -> CMatrix {
    (a + a.adjoint()) * c(0.5, 0.0)
}

/// Largest entrywise modulus of `a - a*`.
pub fn hermitian_defect(a: &CMatrix) -> f64 {
    if a.nrows() != a.ncols() {
        return f64::INFINITY;
    }
    let n = a.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn max_entry(a: &CMatrix) -> f64 {
    a.iter().fold(0.0f64, |m, z| m.max(z.norm()))
}

pub fn frobenius(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Eigen-decomposition of a Hermitian matrix with ascending eigenvalues.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl Spectrum {
    pub fn of(a: &CMatrix) -> Option<Spectrum> {
        if !all_finite(a) {
            return None;
        }
        let eig = SymmetricEigen::try_new(hermitian_part(a), f64::EPSILON, MAX_ITER)?;
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
        let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let vectors = CMatrix::from_fn(a.nrows(), order.len(), |r, k| {
            eig.eigenvectors[(r, order[k])]
        });
        Some(Spectrum { values, vectors })
    }

    /// `U f(Λ) U*`
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let n = self.vectors.nrows();
        let mut scaled = self.vectors.clone();
        for (k, &lambda) in self.values.iter().enumerate() {
            let fk = f(lambda);
            for r in 0..n {
                scaled[(r, k)] *= fk;
            }
        }
        &scaled * self.vectors.adjoint()
    }

    /// Spectral projection onto the eigenvectors with the given indices.
    pub fn projection(&self, indices: impl IntoIterator<Item = usize>) -> CMatrix {
        let n = self.vectors.nrows();
        let mut p = CMatrix::zeros(n, n);
        for k in indices {
            let v = self.vectors.column(k);
            p += v * v.adjoint();
        }
        p
    }
}

/// Eigenvalues of the Hermitian part of `a`, ascending. NaN-filled when `a`
/// has non-finite entries.
pub fn eigenvalues(a: &CMatrix) -> Vec<f64> {
    if !all_finite(a) {
        return vec![f64::NAN; a.nrows()];
    }
    let h = hermitian_part(a);
    let mut vals: Vec<f64> = match SymmetricEigen::try_new(h, f64::EPSILON, MAX_ITER) {
        Some(eig) => eig.eigenvalues.iter().copied().collect(),
        None => vec![f64::NAN; a.nrows()],
    };
    vals.sort_by(f64::total_cmp);
    vals
}

pub fn min_eigenvalue(a: &CMatrix) -> f64 {
    eigenvalues(a).first().copied().unwrap_or(0.0)
}

/// Order-unit norm of a Hermitian matrix: largest eigenvalue modulus.
pub fn hermitian_norm(a: &CMatrix) -> f64 {
    let vals = eigenvalues(a);
    match (vals.first(), vals.last()) {
        (Some(lo), Some(hi)) => {
            if lo.is_nan() || hi.is_nan() {
                f64::NAN
            } else {
                lo.abs().max(hi.abs())
            }
        }
        _ => 0.0,
    }
}

/// Square root of a positive semidefinite matrix. With `clamp`, eigenvalues
/// are replaced by `max(λ, 0)` first; without it, slightly negative rounding
/// noise turns into NaN.
pub fn psd_sqrt(a: &CMatrix, clamp: bool) -> CMatrix {
    match Spectrum::of(a) {
        Some(s) if clamp => s.apply(|l| l.max(0.0).sqrt()),
        Some(s) => s.apply(f64::sqrt),
        None => nan_matrix(a.nrows(), a.ncols()),
    }
}

/// `|a| = (a* a)^{1/2}` for a square Hermitian `a`, as `U |Λ| U*`.
pub fn abs_hermitian(a: &CMatrix) -> CMatrix {
    match Spectrum::of(a) {
        Some(s) => s.apply(f64::abs),
        None => nan_matrix(a.nrows(), a.ncols()),
    }
}

/// `[[0, a], [a*, 0]]`, Hermitian with eigenvalues `±σ_i(a)` and absolute
/// value `|a*| ⊕ |a|`.
pub fn dilation(a: &CMatrix) -> CMatrix {
    let (r, c) = a.shape();
    let mut h = CMatrix::zeros(r + c, r + c);
    h.view_mut((0, r), (r, c)).copy_from(a);
    h.view_mut((r, 0), (c, r)).copy_from(&a.adjoint());
    h
}

/// `|a| = (a* a)^{1/2}` for an arbitrary (possibly rectangular) `a`, read off
/// the lower-right block of `|dilation(a)|`.
pub fn abs_general(a: &CMatrix) -> CMatrix {
    let (r, n) = a.shape();
    if !all_finite(a) {
        return nan_matrix(n, n);
    }
    if r == 0 || n == 0 {
        return CMatrix::zeros(n, n);
    }
    abs_hermitian(&dilation(a))
        .view((r, r), (n, n))
        .into_owned()
}

/// Largest singular value.
pub fn operator_norm(a: &CMatrix) -> f64 {
    if !all_finite(a) {
        return f64::NAN;
    }
    if a.is_empty() {
        return 0.0;
    }
    hermitian_norm(&dilation(a))
}

/// Rank and an orthonormal basis of the null space of a real matrix, with
/// singular values below `rel_tol * max(1, σ_max)` treated as zero.
pub fn real_rank_and_kernel(m: &RMatrix, rel_tol: f64) -> (usize, Vec<DVector<f64>>) {
    let (rows, cols) = m.shape();
    if cols == 0 {
        return (0, Vec::new());
    }
    // Pad to at least `cols` rows so the SVD returns a full right basis.
    let padded = if rows < cols {
        let mut p = RMatrix::zeros(cols, cols);
        p.view_mut((0, 0), (rows, cols)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = SVD::new(padded, false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let sigma_max = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let cutoff = rel_tol * sigma_max.max(1.0);
    let mut rank = 0;
    let mut kernel = Vec::new();
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if s > cutoff {
            rank += 1;
        } else {
            kernel.push(v_t.row(k).transpose());
        }
    }
    (rank, kernel)
}

/// Block-diagonal sum `a ⊕ b`.
pub fn direct_sum(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let mut out = CMatrix::zeros(a.nrows() + b.nrows(), a.ncols() + b.ncols());
    out.view_mut((0, 0), a.shape()).copy_from(a);
    out.view_mut(a.shape(), b.shape()).copy_from(b);
    out
}

/// `a ⊗ b` (Kronecker product, `a` indexes the outer blocks).
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Scalar matrix acting on block rows: `α ⊗ I_k`.
pub fn inflate(alpha: &CMatrix, k: usize) -> CMatrix {
    kron(alpha, &identity(k))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(vals: &[f64]) -> CMatrix {
        CMatrix::from_diagonal(&DVector::from_iterator(
            vals.len(),
            vals.iter().map(|&v| c(v, 0.0)),
        ))
    }

    #[test]
    fn spectrum_sorted_and_reconstructs() {
        let a =
            CMatrix::from_row_slice(2, 2, &[c(2.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(2.0, 0.0)]);
        let s = Spectrum::of(&a).unwrap();
        assert!((s.values[0] - 1.0).abs() < 1e-14);
        assert!((s.values[1] - 3.0).abs() < 1e-14);
        assert!(frobenius(&(s.apply(|l| l) - &a)) < 1e-14);
    }

    #[test]
    fn abs_routes_agree_on_hermitian_input() {
        let a = CMatrix::from_row_slice(
            2,
            2,
            &[c(1.0, 0.0), c(2.0, -0.5), c(2.0, 0.5), c(-3.0, 0.0)],
        );
        let d = abs_hermitian(&a) - abs_general(&a);
        assert!(frobenius(&d) < 1e-13);
    }

    #[test]
    fn abs_of_wide_row_pads_with_zero() {
        // |[1 0]| = diag(1, 0)
        let row = CMatrix::from_row_slice(1, 2, &[c(1.0, 0.0), c(0.0, 0.0)]);
        let d = abs_general(&row) - diag(&[1.0, 0.0]);
        assert!(frobenius(&d) < 1e-15);
    }

    #[test]
    fn unclamped_sqrt_of_negative_is_nan() {
        let a = diag(&[1.0, -1e-17]);
        assert!(all_finite(&psd_sqrt(&a, true)));
        assert!(!all_finite(&psd_sqrt(&a, false)));
    }

    #[test]
    fn non_finite_input_does_not_hang() {
        let a = nan_matrix(3, 3);
        assert!(min_eigenvalue(&a).is_nan());
        assert!(hermitian_norm(&a).is_nan());
        assert!(!all_finite(&abs_hermitian(&a)));
        assert!(operator_norm(&a).is_nan());
    }

    #[test]
    fn kernel_of_rank_deficient_real_matrix() {
        let m = RMatrix::from_row_slice(2, 3, &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
        let (rank, kernel) = real_rank_and_kernel(&m, 1e-12);
        assert_eq!(rank, 2);
        assert_eq!(kernel.len(), 1);
        assert!((kernel[0][2].abs() - 1.0).abs() < 1e-12);
    }
}
