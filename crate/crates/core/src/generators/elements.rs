//! Seeded random elements: self-adjoint draws, cone elements, projections,
//! orthogonal pairs and minorants.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::linalg::{self, c, CMatrix, Spectrum};
use crate::model::{Element, ModelKind, SpaceModel};
use crate::rng::{stream_rng, SeededRng};

fn gaussian(rng: &mut SeededRng) -> f64 {
    rng.sample(StandardNormal)
}

fn complex_gaussian(rng: &mut SeededRng) -> num_complex::Complex64 {
    c(gaussian(rng), gaussian(rng))
}

/// Complex Gaussian payload restricted to the block pattern (real Gaussian
/// coordinates on the lattice).
pub fn gaussian_element(model: &SpaceModel, level: (usize, usize), rng: &mut SeededRng) -> Element {
    let (r, cl) = model
        .payload_shape(level)
        .expect("gaussian element at unsupported level");
    match model.kind() {
        ModelKind::Lattice { .. } => {
            Element::new(level, CMatrix::from_fn(r, 1, |_, _| c(gaussian(rng), 0.0)))
        }
        ModelKind::Hermitian { .. } => {
            let labels = model.labels();
            let mut m = CMatrix::zeros(r, cl);
            for i in 0..r {
                for j in 0..cl {
                    if model.allowed(&labels, i, j) {
                        m[(i, j)] = complex_gaussian(rng);
                    }
                }
            }
            Element::new(level, m)
        }
    }
}

/// Independent Gaussian real and imaginary parts, symmetrized.
pub fn gaussian_self_adjoint(model: &SpaceModel, n: usize, rng: &mut SeededRng) -> Element {
    let g = gaussian_element(model, (n, n), rng);
    match model.kind() {
        ModelKind::Lattice { .. } => g,
        ModelKind::Hermitian { .. } => Element::new((n, n), linalg::hermitian_part(g.coords())),
    }
}

/// `G G* / N` for a Gaussian `G` in the algebra.
pub fn random_psd(model: &SpaceModel, n: usize, rng: &mut SeededRng) -> Element {
    let g = gaussian_element(model, (n, n), rng);
    match model.kind() {
        ModelKind::Lattice { .. } => Element::new((1, 1), g.coords().map(|z| c(z.re * z.re, 0.0))),
        ModelKind::Hermitian { .. } => {
            let size = g.coords().nrows() as f64;
            let m = g.coords() * g.coords().adjoint() / c(size, 0.0);
            model.clean(Element::new((n, n), linalg::hermitian_part(&m)))
        }
    }
}

/// `ξ ξ*` with `ξ` Gaussian on a single block of the pattern.
pub fn rank_one_psd(model: &SpaceModel, n: usize, rng: &mut SeededRng) -> Element {
    match model.kind() {
        ModelKind::Lattice { dim } => {
            let i = rng.random_range(0..*dim);
            let mut v = CMatrix::zeros(*dim, 1);
            v[(i, 0)] = c(gaussian(rng).abs() + 0.1, 0.0);
            Element::new((1, 1), v)
        }
        ModelKind::Hermitian { blocks } => {
            let labels = model.labels();
            let block = rng.random_range(0..blocks.len());
            let size = n * model.size();
            let xi = CMatrix::from_fn(size, 1, |i, _| {
                if labels[i % labels.len()] == block {
                    complex_gaussian(rng)
                } else {
                    c(0.0, 0.0)
                }
            });
            let m = &xi * xi.adjoint();
            Element::new((n, n), linalg::hermitian_part(&m))
        }
    }
}

/// Spectral projection onto the lower half of the spectrum of a random
/// self-adjoint element (random coordinate mask on the lattice).
pub fn random_projection(model: &SpaceModel, n: usize, rng: &mut SeededRng) -> Element {
    match model.kind() {
        ModelKind::Lattice { dim } => Element::new(
            (1, 1),
            CMatrix::from_fn(*dim, 1, |_, _| {
                c(if rng.random::<bool>() { 1.0 } else { 0.0 }, 0.0)
            }),
        ),
        ModelKind::Hermitian { .. } => {
            let size = n * model.size();
            if size == 1 {
                return if rng.random::<bool>() {
                    model.unit(n)
                } else {
                    model.zero((n, n))
                };
            }
            let h = gaussian_self_adjoint(model, n, rng);
            let spec = Spectrum::of(h.coords()).expect("finite Gaussian draw");
            let p = spec.projection(0..size / 2);
            model.clean(Element::new((n, n), linalg::hermitian_part(&p)))
        }
    }
}

/// Random `0 ≤ c ≤ e`: uniform eigenvalues in a random eigenbasis.
pub fn random_contraction(model: &SpaceModel, n: usize, rng: &mut SeededRng) -> Element {
    match model.kind() {
        ModelKind::Lattice { dim } => Element::new(
            (1, 1),
            CMatrix::from_fn(*dim, 1, |_, _| c(rng.random::<f64>(), 0.0)),
        ),
        ModelKind::Hermitian { .. } => {
            let h = gaussian_self_adjoint(model, n, rng);
            let mut spec = Spectrum::of(h.coords()).expect("finite Gaussian draw");
            for v in spec.values.iter_mut() {
                *v = rng.random::<f64>();
            }
            let m = spec.apply(|l| l);
            model.clean(Element::new((n, n), linalg::hermitian_part(&m)))
        }
    }
}

/// Positive square root, honouring the model's clamp setting.
pub fn sqrt_positive(model: &SpaceModel, v: &Element) -> Element {
    match model.kind() {
        ModelKind::Lattice { .. } => Element::new(
            v.level(),
            v.coords().map(|z| {
                let x = if model.clamps_sqrt() {
                    z.re.max(0.0)
                } else {
                    z.re
                };
                c(x.sqrt(), 0.0)
            }),
        ),
        ModelKind::Hermitian { .. } => model.clean(Element::new(
            v.level(),
            linalg::psd_sqrt(v.coords(), model.clamps_sqrt()),
        )),
    }
}

/// `v^{1/2} c v^{1/2}` for a given `0 ≤ c ≤ e`; this sweeps the order
/// interval `[0, v]`.
pub fn compress(model: &SpaceModel, v: &Element, contraction: &Element) -> Element {
    match model.kind() {
        ModelKind::Lattice { .. } => {
            Element::new((1, 1), v.coords().component_mul(contraction.coords()))
        }
        ModelKind::Hermitian { .. } => {
            let s = if model.clamps_sqrt() {
                rank_cut_sqrt(v.coords())
            } else {
                sqrt_positive(model, v).into_coords()
            };
            let m = &s * contraction.coords() * &s;
            model.clean(Element::new(v.level(), linalg::hermitian_part(&m)))
        }
    }
}

/// Square root with eigenvalues below the numerical rank cutoff set to
/// zero, so minorants keep the support of `v`.
fn rank_cut_sqrt(a: &CMatrix) -> CMatrix {
    match linalg::Spectrum::of(a) {
        Some(s) => {
            let top = s.values.iter().fold(0.0f64, |m, l| m.max(l.abs()));
            let cut = 1e-12 * top;
            s.apply(|l| if l > cut { l.sqrt() } else { 0.0 })
        }
        None => linalg::nan_matrix(a.nrows(), a.ncols()),
    }
}

/// Random minorant `0 ≤ w ≤ v` of a cone element.
pub fn minorant(model: &SpaceModel, v: &Element, rng: &mut SeededRng) -> Element {
    let contraction = random_contraction(model, v.level().0, rng);
    compress(model, v, &contraction)
}

/// `u = p a p`, `v = (e − p) b (e − p)` for a given projection `p`.
pub fn orthogonal_pair_for(
    model: &SpaceModel,
    p: &Element,
    rng: &mut SeededRng,
) -> (Element, Element) {
    let n = p.level().0;
    match model.kind() {
        ModelKind::Lattice { .. } => {
            let a = random_psd(model, 1, rng);
            let b = random_psd(model, 1, rng);
            let q = &model.unit(1) - p;
            (
                Element::new((1, 1), a.coords().component_mul(p.coords())),
                Element::new((1, 1), b.coords().component_mul(q.coords())),
            )
        }
        ModelKind::Hermitian { .. } => {
            let q = &model.unit(n) - p;
            let a = random_psd(model, n, rng);
            let b = random_psd(model, n, rng);
            (sandwich(model, p, &a), sandwich(model, &q, &b))
        }
    }
}

fn sandwich(model: &SpaceModel, p: &Element, a: &Element) -> Element {
    let m = p.coords() * a.coords() * p.coords();
    model.clean(Element::new(a.level(), linalg::hermitian_part(&m)))
}

/// A pair `u ⊥ v` at level `n`.
pub fn orthogonal_pair(model: &SpaceModel, n: usize, rng: &mut SeededRng) -> (Element, Element) {
    let p = random_projection(model, n, rng);
    orthogonal_pair_for(model, &p, rng)
}

/// Level-1 orthogonal pair reproducible from a seed.
pub fn gen_orthogonal_pair(model: &SpaceModel, seed: u64) -> (Element, Element) {
    let mut rng = stream_rng(seed, "orthogonal-pair", 0);
    orthogonal_pair(model, 1, &mut rng)
}

/// `(u, v, w)` with `u ⊥ v` and `u ⊥ w`: `v` and `w` share the support
/// complementary to `u`.
pub fn orthogonal_triple(
    model: &SpaceModel,
    n: usize,
    rng: &mut SeededRng,
) -> (Element, Element, Element) {
    let p = random_projection(model, n, rng);
    let (u, v) = orthogonal_pair_for(model, &p, rng);
    let (_, w) = orthogonal_pair_for(model, &p, rng);
    (u, v, w)
}

/// Haar-like unitary via QR of a complex Gaussian with the phases of the
/// `R` diagonal moved into `Q`.
pub fn random_unitary(k: usize, rng: &mut SeededRng) -> CMatrix {
    random_isometry(k, k, rng)
}

/// `r × m` isometry (`α* α = I_m`, `r ≥ m`) from the QR factorization of a
/// tall complex Gaussian, sign-fixed on the diagonal of `R`.
pub fn random_isometry(r: usize, m: usize, rng: &mut SeededRng) -> CMatrix {
    assert!(r >= m, "isometry needs r >= m");
    let g = CMatrix::from_fn(r, m, |_, _| complex_gaussian(rng));
    let qr = g.qr();
    let mut q = qr.q();
    let rr = qr.r();
    for j in 0..m {
        let d = rr[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            c(1.0, 0.0)
        };
        for i in 0..r {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Block-diagonal unitary in the algebra of a Hermitian model.
pub fn block_unitary(model: &SpaceModel, rng: &mut SeededRng) -> CMatrix {
    let size = model.size();
    let mut u = CMatrix::zeros(size, size);
    let mut offset = 0;
    for &k in model.blocks() {
        let blk = random_unitary(k, rng);
        u.view_mut((offset, offset), (k, k)).copy_from(&blk);
        offset += k;
    }
    u
}

/// `Σ_{a,b} E_ab ⊗ e_ab` over the first block of size at least two, at level
/// `n ≥ 2`. Positive, rank one, and sent by the blockwise transpose to a
/// swap with eigenvalue `−1`.
pub fn choi_element(model: &SpaceModel, n: usize) -> Option<Element> {
    if n < 2 || model.is_lattice() {
        return None;
    }
    let mut offset = 0;
    let mut found = None;
    for &k in model.blocks() {
        if k >= 2 {
            found = Some((offset, k));
            break;
        }
        offset += k;
    }
    let (offset, k) = found?;
    let size = model.size();
    let m = n.min(k);
    let mut x = CMatrix::zeros(n * size, n * size);
    for a in 0..m {
        for b in 0..m {
            x[(a * size + offset + a, b * size + offset + b)] = c(1.0, 0.0);
        }
    }
    Some(Element::new((n, n), x))
}
