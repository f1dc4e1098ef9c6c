//! Independent oracles: a cyclic Jacobi eigensolver on real symmetric
//! matrices, applied to Hermitian matrices through their real form
//! `[[A, -B], [B, A]]`.

#![allow(dead_code)]

use absorder::linalg::{c, CMatrix};

pub struct Sym {
    n: usize,
    a: Vec<f64>,
}

impl Sym {
    fn at(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.n + j]
    }
}

/// Eigenvalues and column eigenvectors (row-major `n × n`) of a real
/// symmetric matrix.
pub fn jacobi(mut s: Sym) -> (Vec<f64>, Vec<f64>) {
    let n = s.n;
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| s.at(i, j).powi(2))
            .sum();
        let total: f64 = s.a.iter().map(|x| x * x).sum();
        if off <= 1e-30 * total.max(1e-300) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = s.at(p, q);
                if apq == 0.0 {
                    continue;
                }
                let theta = (s.at(q, q) - s.at(p, p)) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let cs = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * cs;
                for k in 0..n {
                    let (akp, akq) = (s.a[k * n + p], s.a[k * n + q]);
                    s.a[k * n + p] = cs * akp - sn * akq;
                    s.a[k * n + q] = sn * akp + cs * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (s.a[p * n + k], s.a[q * n + k]);
                    s.a[p * n + k] = cs * apk - sn * aqk;
                    s.a[q * n + k] = sn * apk + cs * aqk;
                }
                for k in 0..n {
                    let (vkp, vkq) = (v[k * n + p], v[k * n + q]);
                    v[k * n + p] = cs * vkp - sn * vkq;
                    v[k * n + q] = sn * vkp + cs * vkq;
                }
            }
        }
    }
    ((0..n).map(|i| s.at(i, i)).collect(), v)
}

fn real_form(h: &CMatrix) -> Sym {
    let k = h.nrows();
    let n = 2 * k;
    let mut a = vec![0.0; n * n];
    for i in 0..k {
        for j in 0..k {
            let z = h[(i, j)];
            let (re, im) = ((z.re + h[(j, i)].re) / 2.0, (z.im - h[(j, i)].im) / 2.0);
            a[i * n + j] = re;
            a[(i + k) * n + j + k] = re;
            a[i * n + j + k] = -im;
            a[(i + k) * n + j] = im;
        }
    }
    Sym { n, a }
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn eigenvalues(h: &CMatrix) -> Vec<f64> {
    let (mut vals, _) = jacobi(real_form(h));
    vals.sort_by(f64::total_cmp);
    vals.into_iter().step_by(2).collect()
}

/// `f(h)` for Hermitian `h`.
pub fn apply(h: &CMatrix, f: impl Fn(f64) -> f64) -> CMatrix {
    let k = h.nrows();
    let n = 2 * k;
    let (vals, v) = jacobi(real_form(h));
    let mut out = vec![0.0; n * n];
    for (m, &l) in vals.iter().enumerate() {
        let fl = f(l);
        for i in 0..n {
            for j in 0..n {
                out[i * n + j] += fl * v[i * n + m] * v[j * n + m];
            }
        }
    }
    CMatrix::from_fn(k, k, |i, j| c(out[i * n + j], out[(i + k) * n + j]))
}

pub fn abs(h: &CMatrix) -> CMatrix {
    apply(h, f64::abs)
}

/// `(a* a)^{1/2}` from the Gram matrix; accurate when `a` has full column
/// rank.
pub fn abs_gram(a: &CMatrix) -> CMatrix {
    apply(&(a.adjoint() * a), |l| l.max(0.0).sqrt())
}

pub fn max_abs(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}
