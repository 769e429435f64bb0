//! Cyclic Jacobi iteration for Hermitian matrices.
//!
//! Rotations follow the round-robin ordering: each round annihilates
//! `⌊d/2⌋` disjoint pivots at once, so a round is two streaming passes over
//! the matrix (rows, then columns row by row) instead of scattered column
//! writes per rotation. Storage is split into real and imaginary planes;
//! real input skips the imaginary plane entirely.

use crate::error::{Error, Result};

/// Sweep cap.
pub const MAX_SWEEPS: usize = 100;

/// Convergence threshold on the off-diagonal Frobenius mass, relative to
/// the Frobenius norm of the input.
pub(crate) const OFF_DIAGONAL_RTOL: f64 = 1e-13;

/// Row-major `d × d` matrix in split storage. `im` is empty for real data.
pub(crate) struct Planes {
    pub d: usize,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl Planes {
    fn is_complex(&self) -> bool {
        !self.im.is_empty()
    }

    fn abs_sqr(&self, idx: usize) -> f64 {
        let r = self.re[idx];
        if self.is_complex() {
            let i = self.im[idx];
            r * r + i * i
        } else {
            r * r
        }
    }

    /// Frobenius mass off the diagonal, and the entrywise l1 sum there.
    fn off_diagonal(&self) -> (f64, f64) {
        let d = self.d;
        let mut sq = 0.0;
        let mut l1 = 0.0;
        for i in 0..d {
            for j in 0..d {
                if i != j {
                    let v = self.abs_sqr(i * d + j);
                    sq += v;
                    l1 += v.sqrt();
                }
            }
        }
        (sq.sqrt(), l1)
    }
}

#[derive(Clone, Copy)]
struct Rotation {
    p: usize,
    q: usize,
    c: f64,
    // s·e^{iφ}, where a_pq = r e^{iφ}
    sr: f64,
    si: f64,
    new_pp: f64,
    new_qq: f64,
}

/// Pivot angle for the 2×2 block `[[app, r e^{iφ}], [r e^{-iφ}, aqq]]`.
fn rotation(p: usize, q: usize, app: f64, aqq: f64, apq_re: f64, apq_im: f64, r: f64) -> Rotation {
    let theta = (aqq - app) / (2.0 * r);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    Rotation {
        p,
        q,
        c,
        sr: s * apq_re / r,
        si: s * apq_im / r,
        new_pp: app - t * r,
        new_qq: aqq + t * r,
    }
}

/// `(x, y) ← (c·x − σ·y, σ̄·x + c·y)` over two rows, `σ = sr + i·si`.
#[inline]
fn mix_rows(c: f64, sr: f64, si: f64, xr: &mut [f64], xi: &mut [f64], yr: &mut [f64], yi: &mut [f64]) {
    if xi.is_empty() {
        for k in 0..xr.len() {
            let (a, b) = (xr[k], yr[k]);
            xr[k] = c * a - sr * b;
            yr[k] = sr * a + c * b;
        }
        return;
    }
    for k in 0..xr.len() {
        let (ar, ai, br, bi) = (xr[k], xi[k], yr[k], yi[k]);
        xr[k] = c * ar - (sr * br - si * bi);
        xi[k] = c * ai - (sr * bi + si * br);
        yr[k] = sr * ar + si * ai + c * br;
        yi[k] = sr * ai - si * ar + c * bi;
    }
}

fn two_rows(v: &mut [f64], d: usize, p: usize, q: usize) -> (&mut [f64], &mut [f64]) {
    if v.is_empty() {
        return (&mut [], &mut []);
    }
    debug_assert!(p < q);
    let (head, tail) = v.split_at_mut(q * d);
    (&mut head[p * d..(p + 1) * d], &mut tail[..d])
}

/// Round-robin pairing for round `r` over `m` (even) players.
fn schedule(m: usize, r: usize, pairs: &mut Vec<(usize, usize)>) {
    pairs.clear();
    // player 0 fixed, the rest rotate
    let pos = |i: usize| if i == 0 { 0 } else { 1 + (i - 1 + r) % (m - 1) };
    for i in 0..m / 2 {
        let (a, b) = (pos(i), pos(m - 1 - i));
        pairs.push((a.min(b), a.max(b)));
    }
}

/// Diagonalizes `a` in place. Returns the diagonal and the eigenvectors as
/// rows of a split-storage matrix.
pub(crate) fn jacobi(mut a: Planes) -> Result<(Vec<f64>, Planes)> {
    let d = a.d;
    let complex = a.is_complex();
    let mut w = Planes {
        d,
        re: vec![0.0; d * d],
        im: if complex { vec![0.0; d * d] } else { Vec::new() },
    };
    for i in 0..d {
        w.re[i * d + i] = 1.0;
    }
    let fro = (0..d * d).map(|k| a.abs_sqr(k)).sum::<f64>().sqrt();
    let target = OFF_DIAGONAL_RTOL * fro;
    let negligible = f64::EPSILON * fro / d as f64;

    let players = d + d % 2;
    let mut pairs = Vec::with_capacity(players / 2);
    let mut rots: Vec<Rotation> = Vec::with_capacity(players / 2);
    let mut off = a.off_diagonal();
    let mut sweeps = 0;
    while off.0 > target {
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence {
                sweeps,
                residual: off.0,
            });
        }
        // early sweeps only chase large elements
        let threshold = if sweeps < 3 {
            (0.2 * off.1 / (d * d) as f64).max(negligible)
        } else {
            negligible
        };
        for round in 0..players - 1 {
            schedule(players, round, &mut pairs);
            rots.clear();
            for &(p, q) in &pairs {
                if q >= d {
                    continue;
                }
                let idx = p * d + q;
                let r = a.abs_sqr(idx).sqrt();
                if r <= threshold {
                    continue;
                }
                let apq_im = if complex { a.im[idx] } else { 0.0 };
                rots.push(rotation(p, q, a.re[p * d + p], a.re[q * d + q], a.re[idx], apq_im, r));
            }
            if rots.is_empty() {
                continue;
            }
            apply_round(&mut a, &mut w, &rots);
        }
        sweeps += 1;
        off = a.off_diagonal();
    }
    let diag = (0..d).map(|i| a.re[i * d + i]).collect();
    Ok((diag, w))
}

/// `A ← J†AJ`, `W ← JᵀW` for a set of disjoint rotations.
fn apply_round(a: &mut Planes, w: &mut Planes, rots: &[Rotation]) {
    let d = a.d;
    let complex = a.is_complex();
    for rot in rots {
        let (xr, yr) = two_rows(&mut a.re, d, rot.p, rot.q);
        let (xi, yi) = two_rows(&mut a.im, d, rot.p, rot.q);
        mix_rows(rot.c, rot.sr, rot.si, xr, xi, yr, yi);
        let (xr, yr) = two_rows(&mut w.re, d, rot.p, rot.q);
        let (xi, yi) = two_rows(&mut w.im, d, rot.p, rot.q);
        mix_rows(rot.c, rot.sr, -rot.si, xr, xi, yr, yi);
    }
    // columns, one row at a time: (A_kp, A_kq) ← (c·A_kp − σ̄·A_kq, σ·A_kp + c·A_kq)
    for k in 0..d {
        let row_re = &mut a.re[k * d..(k + 1) * d];
        if complex {
            let row_im = &mut a.im[k * d..(k + 1) * d];
            for rot in rots {
                let (c, sr, si) = (rot.c, rot.sr, rot.si);
                let (ar, ai, br, bi) = (row_re[rot.p], row_im[rot.p], row_re[rot.q], row_im[rot.q]);
                row_re[rot.p] = c * ar - (sr * br + si * bi);
                row_im[rot.p] = c * ai - (sr * bi - si * br);
                row_re[rot.q] = sr * ar - si * ai + c * br;
                row_im[rot.q] = sr * ai + si * ar + c * bi;
            }
        } else {
            for rot in rots {
                let (x, y) = (row_re[rot.p], row_re[rot.q]);
                row_re[rot.p] = rot.c * x - rot.sr * y;
                row_re[rot.q] = rot.sr * x + rot.c * y;
            }
        }
    }
    for rot in rots {
        let (p, q) = (rot.p, rot.q);
        a.re[p * d + p] = rot.new_pp;
        a.re[q * d + q] = rot.new_qq;
        a.re[p * d + q] = 0.0;
        a.re[q * d + p] = 0.0;
        if complex {
            a.im[p * d + p] = 0.0;
            a.im[q * d + q] = 0.0;
            a.im[p * d + q] = 0.0;
            a.im[q * d + p] = 0.0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedule_covers_every_pair_once_per_sweep() {
        for m in [2usize, 4, 6, 10] {
            let mut seen = std::collections::HashSet::new();
            let mut pairs = Vec::new();
            for r in 0..m - 1 {
                schedule(m, r, &mut pairs);
                let mut used = vec![false; m];
                for &(p, q) in &pairs {
                    assert!(p < q && !used[p] && !used[q]);
                    used[p] = true;
                    used[q] = true;
                    assert!(seen.insert((p, q)));
                }
            }
            assert_eq!(seen.len(), m * (m - 1) / 2);
        }
    }
}
