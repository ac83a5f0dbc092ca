//! Dense complex linear algebra shared by the simulation modules.

use nalgebra::{DMatrix, DVector};
pub use num_complex::Complex64 as C64;

pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

pub fn identity(dim: usize) -> CMatrix {
    CMatrix::identity(dim, dim)
}

pub fn zeros(dim: usize) -> CMatrix {
    CMatrix::zeros(dim, dim)
}

/// `a ⊗ b` with `a` as the outer (block) factor.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Column-stacking vectorization. nalgebra stores column-major, so this is a copy.
pub fn vectorize(m: &CMatrix) -> CVector {
    CVector::from_column_slice(m.as_slice())
}

pub fn unvectorize(v: &[C64], dim: usize) -> CMatrix {
    assert_eq!(v.len(), dim * dim, "vector length is not a square");
    CMatrix::from_column_slice(dim, dim, v)
}

pub fn expm(m: &CMatrix) -> CMatrix {
    m.exp()
}

pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * C64::new(0.5, 0.0)
}

/// Eigenvalues (ascending) and eigenvectors of the Hermitian part of `m`.
pub fn eigh(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let eig = hermitian_part(m).symmetric_eigen();
    let n = eig.eigenvalues.len();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = idx.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (col, &i) in idx.iter().enumerate() {
        vectors.set_column(col, &eig.eigenvectors.column(i));
    }
    (values, vectors)
}

pub fn min_eigenvalue_hermitian(m: &CMatrix) -> f64 {
    hermitian_part(m)
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    m.clone().svd(false, false).singular_values.iter().copied().collect()
}

pub fn trace_norm(m: &CMatrix) -> f64 {
    if m.nrows() == 2 && m.ncols() == 2 {
        return trace_norm_2x2(m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
    }
    singular_values(m).iter().sum()
}

/// σ₁ + σ₂ = sqrt(σ₁² + σ₂² + 2σ₁σ₂) = sqrt(‖M‖_F² + 2|det M|).
#[inline]
pub fn trace_norm_2x2(a: C64, b: C64, c: C64, d: C64) -> f64 {
    let frob = a.norm_sqr() + b.norm_sqr() + c.norm_sqr() + d.norm_sqr();
    let det = (a * d - b * c).norm();
    (frob + 2.0 * det).max(0.0).sqrt()
}

pub fn spectral_norm(m: &CMatrix) -> f64 {
    singular_values(m).into_iter().fold(0.0, f64::max)
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn trace(m: &CMatrix) -> C64 {
    m.diagonal().iter().sum()
}

pub fn is_hermitian(m: &CMatrix, tol: f64) -> bool {
    m.is_square() && max_abs(&(m - m.adjoint())) <= tol
}

pub fn projector(psi: &CVector) -> CMatrix {
    psi * psi.adjoint()
}

/// Index bookkeeping for acting on a subset of sites of an `N`-site register.
///
/// A global basis index decomposes as `support_offsets[a] + rest_offsets[r]`
/// where `a` runs over the local basis of the support (first support site most
/// significant) and `r` over the complement.
#[derive(Debug, Clone)]
pub struct LocalLayout {
    pub dim: usize,
    pub local_dim: usize,
    pub support_offsets: Vec<usize>,
    pub rest_offsets: Vec<usize>,
}

impl LocalLayout {
    pub fn new(num_sites: usize, d: usize, support: &[usize]) -> Self {
        let stride = |site: usize| d.pow((num_sites - 1 - site) as u32);
        let rest: Vec<usize> = (0..num_sites).filter(|s| !support.contains(s)).collect();
        LocalLayout {
            dim: d.pow(num_sites as u32),
            local_dim: d.pow(support.len() as u32),
            support_offsets: digit_offsets(support, d, stride),
            rest_offsets: digit_offsets(&rest, d, stride),
        }
    }

    /// Applies a local superoperator (column-stacked, `dl² × dl²`) in place to a
    /// column-stacked global operator of dimension `dim × dim`.
    pub fn apply_superop(&self, local: &CMatrix, op: &mut [C64], scratch: &mut LocalScratch) {
        let dl = self.local_dim;
        let dim = self.dim;
        debug_assert_eq!(local.nrows(), dl * dl);
        debug_assert_eq!(op.len(), dim * dim);
        scratch.ensure(dl * dl);
        let local = local.as_slice();
        for &rc in &self.rest_offsets {
            for &rr in &self.rest_offsets {
                for b in 0..dl {
                    let col = (self.support_offsets[b] + rc) * dim;
                    for a in 0..dl {
                        scratch.input[a + dl * b] = op[self.support_offsets[a] + rr + col];
                    }
                }
                let n = dl * dl;
                scratch.output[..n].fill(ZERO);
                for (j, x) in scratch.input[..n].iter().enumerate() {
                    if *x == ZERO {
                        continue;
                    }
                    let column = &local[j * n..(j + 1) * n];
                    for (y, s) in scratch.output[..n].iter_mut().zip(column) {
                        *y += s * x;
                    }
                }
                for b in 0..dl {
                    let col = (self.support_offsets[b] + rc) * dim;
                    for a in 0..dl {
                        op[self.support_offsets[a] + rr + col] = scratch.output[a + dl * b];
                    }
                }
            }
        }
    }

    /// Global matrix of a local operator: identity on the complement.
    pub fn embed_operator(&self, local: &CMatrix) -> CMatrix {
        let mut out = zeros(self.dim);
        for &r in &self.rest_offsets {
            for b in 0..self.local_dim {
                for a in 0..self.local_dim {
                    out[(self.support_offsets[a] + r, self.support_offsets[b] + r)] = local[(a, b)];
                }
            }
        }
        out
    }

    /// Global `dim² × dim²` superoperator of a local superoperator.
    pub fn embed_superop(&self, local: &CMatrix) -> CMatrix {
        let n = self.dim * self.dim;
        let mut out = CMatrix::identity(n, n);
        let mut scratch = LocalScratch::default();
        for c in 0..n {
            let column = &mut out.as_mut_slice()[c * n..(c + 1) * n];
            self.apply_superop(local, column, &mut scratch);
        }
        out
    }
}

#[derive(Debug, Default)]
pub struct LocalScratch {
    input: Vec<C64>,
    output: Vec<C64>,
}

impl LocalScratch {
    fn ensure(&mut self, n: usize) {
        if self.input.len() < n {
            self.input.resize(n, ZERO);
            self.output.resize(n, ZERO);
        }
    }
}

fn digit_offsets(sites: &[usize], d: usize, stride: impl Fn(usize) -> usize) -> Vec<usize> {
    let count = d.pow(sites.len() as u32);
    (0..count)
        .map(|mut idx| {
            let mut offset = 0;
            for &site in sites.iter().rev() {
                offset += (idx % d) * stride(site);
                idx /= d;
            }
            offset
        })
        .collect()
}

pub fn pauli(label: char) -> Option<CMatrix> {
    let m = |a: [C64; 4]| CMatrix::from_row_slice(2, 2, &a);
    Some(match label {
        'I' => m([ONE, ZERO, ZERO, ONE]),
        'X' => m([ZERO, ONE, ONE, ZERO]),
        'Y' => m([ZERO, -I, I, ZERO]),
        'Z' => m([ONE, ZERO, ZERO, -ONE]),
        // σ⁻ = |0⟩⟨1|, σ⁺ = |1⟩⟨0|
        '-' => m([ZERO, ONE, ZERO, ZERO]),
        '+' => m([ZERO, ZERO, ONE, ZERO]),
        _ => return None,
    })
}
