use super::jacobi::{jacobi, Planes};
use super::{ComplexMatrix, HermitianMatrix, StateVector, C64, ZERO};
use crate::error::{Error, Result};

/// Eigenvalues (ascending) and orthonormal eigenvectors (columns) of a
/// Hermitian matrix, `H = V Λ V†`.
///
/// Matrices that decouple into independent index sets (for example the
/// even and odd Fock sectors of a parity-symmetric Hamiltonian) are
/// diagonalized block by block; the dense `V` is assembled from the blocks.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    eigenvectors: ComplexMatrix,
    blocks: Vec<EigenBlock>,
}

#[derive(Clone, Debug)]
struct EigenBlock {
    idx: Vec<usize>,
    values: Vec<f64>,
    // local eigenvectors as columns, and the adjoint
    vecs: ComplexMatrix,
    vecs_adj: ComplexMatrix,
}

impl EigenBlock {
    fn local_function(&self, f: &impl Fn(f64) -> C64) -> ComplexMatrix {
        let k = self.idx.len();
        let weights: Vec<C64> = self.values.iter().map(|&l| f(l)).collect();
        let scaled = ComplexMatrix::from_fn(k, k, |i, j| self.vecs.get(i, j) * weights[j]);
        scaled.matmul(&self.vecs_adj).expect("square factors")
    }
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Unitary matrix whose columns are the eigenvectors.
    pub fn eigenvectors(&self) -> &ComplexMatrix {
        &self.eigenvectors
    }

    /// Column `k` of the eigenvector matrix.
    pub fn eigenvector(&self, k: usize) -> StateVector {
        let d = self.dim();
        StateVector::from_amplitudes((0..d).map(|i| self.eigenvectors.get(i, k)).collect())
    }

    /// Number of independent blocks found at construction.
    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    /// `V f(Λ) V†` for a scalar function of the eigenvalues.
    pub fn apply_function(&self, f: impl Fn(f64) -> C64) -> ComplexMatrix {
        self.block_function(f).to_dense()
    }

    /// `f(H)` kept in block form.
    pub fn block_function(&self, f: impl Fn(f64) -> C64) -> BlockOperator {
        BlockOperator {
            dim: self.dim(),
            blocks: self
                .blocks
                .iter()
                .map(|b| OperatorBlock::new(b.idx.clone(), &b.local_function(&f)))
                .collect(),
        }
    }

    /// Propagator `e^{-itH}` as a dense matrix.
    pub fn propagator(&self, t: f64) -> ComplexMatrix {
        self.apply_function(|l| C64::from_polar(1.0, -t * l))
    }

    /// `V Λ V†`
    pub fn reconstruct(&self) -> ComplexMatrix {
        self.apply_function(|l| C64::new(l, 0.0))
    }

    /// `e^{-itH} ψ` without forming the propagator.
    pub fn evolve_state(&self, t: f64, psi: &StateVector) -> Result<StateVector> {
        if psi.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                op: "evolve_state",
                expected: self.dim(),
                found: psi.dim(),
            });
        }
        if t == 0.0 {
            return Ok(psi.clone());
        }
        let x = psi.amplitudes();
        let mut out = vec![ZERO; self.dim()];
        for b in &self.blocks {
            let local: Vec<C64> = b.idx.iter().map(|&i| x[i]).collect();
            let mut coeffs = vec![ZERO; local.len()];
            b.vecs_adj.matvec_into(&local, &mut coeffs);
            for (c, &l) in coeffs.iter_mut().zip(&b.values) {
                *c *= C64::from_polar(1.0, -t * l);
            }
            let mut back = vec![ZERO; local.len()];
            b.vecs.matvec_into(&coeffs, &mut back);
            for (&i, v) in b.idx.iter().zip(back) {
                out[i] = v;
            }
        }
        Ok(StateVector::from_amplitudes(out))
    }
}

/// Free-function form of [`SpectralDecomposition::evolve_state`].
pub fn evolve_state(s: &SpectralDecomposition, t: f64, psi: &StateVector) -> Result<StateVector> {
    s.evolve_state(t, psi)
}

/// Square operator that acts independently on disjoint index sets.
#[derive(Clone, Debug)]
pub struct BlockOperator {
    dim: usize,
    blocks: Vec<OperatorBlock>,
}

#[derive(Clone, Debug)]
struct OperatorBlock {
    idx: Vec<usize>,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl OperatorBlock {
    fn new(idx: Vec<usize>, m: &ComplexMatrix) -> Self {
        OperatorBlock {
            idx,
            re: m.as_slice().iter().map(|x| x.re).collect(),
            im: m.as_slice().iter().map(|x| x.im).collect(),
        }
    }
}

impl BlockOperator {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn to_dense(&self) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(self.dim, self.dim);
        for b in &self.blocks {
            let k = b.idx.len();
            for (r, &i) in b.idx.iter().enumerate() {
                for (c, &j) in b.idx.iter().enumerate() {
                    m.set(i, j, C64::new(b.re[r * k + c], b.im[r * k + c]));
                }
            }
        }
        m
    }

    /// `dst[s] = self · src[s]` for every vector `s`.
    pub fn apply_many(&self, src: &[Vec<C64>], dst: &mut [Vec<C64>]) {
        let n_vec = src.len();
        for b in &self.blocks {
            let k = b.idx.len();
            if k == 1 {
                let u = C64::new(b.re[0], b.im[0]);
                let i = b.idx[0];
                for (s, t) in src.iter().zip(dst.iter_mut()) {
                    t[i] = u * s[i];
                }
                continue;
            }
            let mut xr = vec![0.0; n_vec * k];
            let mut xi = vec![0.0; n_vec * k];
            for (v, s) in src.iter().enumerate() {
                for (l, &i) in b.idx.iter().enumerate() {
                    xr[v * k + l] = s[i].re;
                    xi[v * k + l] = s[i].im;
                }
            }
            for (r, &i) in b.idx.iter().enumerate() {
                let row_re = &b.re[r * k..(r + 1) * k];
                let row_im = &b.im[r * k..(r + 1) * k];
                for (v, t) in dst.iter_mut().enumerate() {
                    let (re, im) = dot_split(row_re, row_im, &xr[v * k..(v + 1) * k], &xi[v * k..(v + 1) * k]);
                    t[i] = C64::new(re, im);
                }
            }
        }
    }
}

/// `Σ a_k x_k` over split real/imaginary storage.
#[inline]
fn dot_split(ar: &[f64], ai: &[f64], xr: &[f64], xi: &[f64]) -> (f64, f64) {
    let mut sr = [0.0f64; 4];
    let mut si = [0.0f64; 4];
    let n = ar.len();
    let body = n - n % 4;
    for (((a, b), (x, y)), _) in ar[..body]
        .chunks_exact(4)
        .zip(ai[..body].chunks_exact(4))
        .zip(xr[..body].chunks_exact(4).zip(xi[..body].chunks_exact(4)))
        .zip(0..)
    {
        for j in 0..4 {
            sr[j] += a[j] * x[j] - b[j] * y[j];
            si[j] += a[j] * y[j] + b[j] * x[j];
        }
    }
    for k in body..n {
        sr[0] += ar[k] * xr[k] - ai[k] * xi[k];
        si[0] += ar[k] * xi[k] + ai[k] * xr[k];
    }
    ((sr[0] + sr[1]) + (sr[2] + sr[3]), (si[0] + si[1]) + (si[2] + si[3]))
}

/// Index sets that the matrix couples, via exact nonzero entries. Sorted by
/// smallest member; members ascending.
fn coupled_blocks(h: &HermitianMatrix) -> Vec<Vec<usize>> {
    let d = h.dim();
    let mut parent: Vec<usize> = (0..d).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for i in 0..d {
        for j in i + 1..d {
            if h.get(i, j) != ZERO {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; d];
    for i in 0..d {
        let root = find(&mut parent, i);
        if slot[root] == usize::MAX {
            slot[root] = blocks.len();
            blocks.push(Vec::new());
        }
        blocks[slot[root]].push(i);
    }
    blocks
}

fn diagonalize_block(h: &HermitianMatrix, idx: Vec<usize>) -> Result<EigenBlock> {
    let k = idx.len();
    if k == 1 {
        return Ok(EigenBlock {
            values: vec![h.get(idx[0], idx[0]).re],
            vecs: ComplexMatrix::identity(1),
            vecs_adj: ComplexMatrix::identity(1),
            idx,
        });
    }
    let entry = |r: usize, c: usize| h.get(idx[r], idx[c]);
    let real = (0..k).all(|r| (0..k).all(|c| entry(r, c).im == 0.0));
    let planes = Planes {
        d: k,
        re: (0..k * k).map(|n| entry(n / k, n % k).re).collect(),
        im: if real {
            Vec::new()
        } else {
            (0..k * k).map(|n| entry(n / k, n % k).im).collect()
        },
    };
    let (values, w) = jacobi(planes)?;
    // w stores eigenvectors as rows
    let at = |j: usize, i: usize| C64::new(w.re[j * k + i], if real { 0.0 } else { w.im[j * k + i] });
    let vecs = ComplexMatrix::from_fn(k, k, |i, j| at(j, i));
    let vecs_adj = ComplexMatrix::from_fn(k, k, |j, i| at(j, i).conj());
    Ok(EigenBlock {
        idx,
        values,
        vecs,
        vecs_adj,
    })
}

/// Diagonalizes a Hermitian matrix by cyclic Jacobi rotations.
///
/// Output is deterministic for identical input.
pub fn eig_hermitian(h: &HermitianMatrix) -> Result<SpectralDecomposition> {
    let d = h.dim();
    if d == 0 {
        return Err(Error::usage("eigendecomposition of an empty matrix"));
    }
    let blocks = coupled_blocks(h)
        .into_iter()
        .map(|idx| diagonalize_block(h, idx))
        .collect::<Result<Vec<_>>>()?;

    let mut order: Vec<(f64, usize, usize)> = blocks
        .iter()
        .enumerate()
        .flat_map(|(b, blk)| blk.values.iter().enumerate().map(move |(j, &v)| (v, b, j)))
        .collect();
    order.sort_by(|x, y| x.0.total_cmp(&y.0).then((x.1, x.2).cmp(&(y.1, y.2))));

    let mut eigenvectors = ComplexMatrix::zeros(d, d);
    for (col, &(_, b, j)) in order.iter().enumerate() {
        let blk = &blocks[b];
        for (r, &i) in blk.idx.iter().enumerate() {
            eigenvectors.set(i, col, blk.vecs.get(r, j));
        }
    }
    Ok(SpectralDecomposition {
        eigenvalues: order.iter().map(|x| x.0).collect(),
        eigenvectors,
        blocks,
    })
}

/// Largest singular value, from the top eigenvalue of `A†A` (or `AA†`,
/// whichever is smaller).
pub fn spectral_norm(a: &ComplexMatrix) -> Result<f64> {
    if a.rows() == 0 || a.cols() == 0 {
        return Ok(0.0);
    }
    let adj = a.adjoint();
    let gram = if a.rows() >= a.cols() {
        adj.matmul(a)?
    } else {
        a.matmul(&adj)?
    };
    let s = eig_hermitian(&HermitianMatrix::new(gram)?)?;
    let top = s.eigenvalues().last().copied().unwrap_or(0.0);
    Ok(top.max(0.0).sqrt())
}

/// `‖H − VΛV†‖` and `‖V†V − I‖` in spectral norm.
pub fn decomposition_residuals(h: &HermitianMatrix, s: &SpectralDecomposition) -> Result<(f64, f64)> {
    let v = s.eigenvectors();
    let lambda = ComplexMatrix::diagonal(s.eigenvalues());
    let recon = v.matmul(&lambda)?.matmul(&v.adjoint())?.try_sub(h.matrix())?;
    let gram = v.adjoint().matmul(v)?;
    let defect = gram.try_sub(&ComplexMatrix::identity(s.dim()))?;
    Ok((spectral_norm(&recon)?, spectral_norm(&defect)?))
}
