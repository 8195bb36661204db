//! Dense symmetric eigensolver: Householder tridiagonalization plus
//! implicit-shift QL iteration, with a windowed fast path.
//!
//! [`eigh`] is the classic full decomposition — reduce to tridiagonal
//! form with Householder reflections, accumulate the orthogonal
//! transform, and diagonalize with implicit-shift QL — organized so
//! every hot loop walks contiguous rows of row-major storage (the
//! transform is accumulated transposed, and eigenvectors live in rows,
//! so QL's plane rotations mix adjacent rows instead of strided
//! columns).
//!
//! [`eigh_window`] computes the same eigenvalues but recovers only a
//! contiguous block of eigenvectors by rank: it skips the transform
//! accumulation and QL's eigenvector updates, finds all eigenvalues
//! with a rotation-free QL sweep, builds the requested tridiagonal
//! eigenvectors by inverse iteration, and back-transforms them through
//! the stored reflectors. That costs roughly a third of the full
//! decomposition, which is what makes large Monte-Carlo sweeps
//! practical on a single core.

use crate::ensemble::SymmetricMatrix;
use std::ops::Range;
use thiserror::Error;

/// Cap on implicit-shift QL sweeps spent on a single eigenvalue.
const MAX_QL_SWEEPS: usize = 50;

/// Errors produced by the eigensolver.
#[derive(Debug, Error)]
pub enum EigensolveError {
    /// The QL iteration did not isolate eigenvalue `index` within the
    /// sweep budget (pathological or non-finite input).
    #[error("QL iteration failed to isolate eigenvalue {index} after {sweeps} sweeps")]
    NoConvergence {
        /// Index of the eigenvalue being worked on when the budget ran out.
        index: usize,
        /// Number of sweeps spent.
        sweeps: usize,
    },
    /// A structurally invalid request, such as an empty or out-of-range
    /// rank window.
    #[error("invalid eigensolve request: {detail}")]
    InvalidRequest {
        /// Human-readable description.
        detail: String,
    },
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Mutable references to rows `i` and `i + 1` of a row-major `n × n` buffer.
#[inline]
fn row_pair_mut(m: &mut [f64], n: usize, i: usize) -> (&mut [f64], &mut [f64]) {
    let (a, b) = m[i * n..].split_at_mut(n);
    (a, &mut b[..n])
}

// ── Householder tridiagonalization ─────────────────────────────────────────

/// Outcome of [`tridiagonalize`]: the tridiagonal matrix similar to the
/// input, plus the stored reflectors needed to map tridiagonal
/// eigenvectors back to eigenvectors of the original matrix.
#[derive(Debug, Clone)]
pub struct HouseholderReduction {
    n: usize,
    /// Row-major n×n scratch; row `k` (columns `0..k`) holds reflector `k`.
    work: Vec<f64>,
    /// `h_k = ‖v_k‖²/2` per reflector; zero marks a skipped step.
    h: Vec<f64>,
    diagonal: Vec<f64>,
    /// `subdiagonal[k] = T[k][k−1]`; entry 0 is identically zero.
    subdiagonal: Vec<f64>,
}

/// Reduce a symmetric matrix to tridiagonal form `T = QᵀHQ` by a
/// sequence of Householder reflections.
///
/// Row `k` is processed from the bottom up; each reflector acts on
/// coordinates `0..k` and zeroes everything in that row left of the
/// subdiagonal. The rank-2 update of the leading block runs over full
/// contiguous rows, trading a factor ~2 in arithmetic for streaming
/// memory access.
pub fn tridiagonalize(matrix: &SymmetricMatrix) -> HouseholderReduction {
    let n = matrix.dim();
    let mut a = matrix.to_dense();
    let mut e = vec![0.0; n];
    let mut hs = vec![0.0; n];
    let mut p = vec![0.0; n];
    let mut w = vec![0.0; n];

    for k in (2..n).rev() {
        // Split so the leading block (rows 0..k) and row k borrow apart.
        let (head, tail) = a.split_at_mut(k * n);
        let row_k = &mut tail[..k];

        let scale: f64 = row_k.iter().map(|x| x.abs()).sum();
        if scale == 0.0 || !scale.is_finite() {
            e[k] = 0.0;
            hs[k] = 0.0;
            continue;
        }
        for x in row_k.iter_mut() {
            *x /= scale;
        }
        let sigma2: f64 = row_k.iter().map(|x| x * x).sum();
        let last = row_k[k - 1];
        let alpha = if last > 0.0 { -sigma2.sqrt() } else { sigma2.sqrt() };
        e[k] = scale * alpha;
        let h = sigma2 - last * alpha;
        hs[k] = h;
        row_k[k - 1] = last - alpha;
        let v = &tail[..k];

        // p = A·v / h over the leading block, contiguous row reads.
        for r in 0..k {
            let row = &head[r * n..r * n + k];
            p[r] = dot(row, v) / h;
        }
        // w = p − (vᵀp / 2h) v, then A ← A − v wᵀ − w vᵀ.
        let kappa = dot(v, &p[..k]) / (2.0 * h);
        for c in 0..k {
            w[c] = p[c] - kappa * v[c];
        }
        for r in 0..k {
            let row = &mut head[r * n..r * n + k];
            let (vr, wr) = (v[r], w[r]);
            for ((x, &wc), &vc) in row.iter_mut().zip(&w[..k]).zip(v) {
                *x -= vr * wc + wr * vc;
            }
        }
    }

    let mut d = vec![0.0; n];
    for (i, di) in d.iter_mut().enumerate() {
        *di = a[i * n + i];
    }
    if n >= 2 {
        e[1] = a[n];
    }

    HouseholderReduction {
        n,
        work: a,
        h: hs,
        diagonal: d,
        subdiagonal: e,
    }
}

impl HouseholderReduction {
    /// Dimension of the reduced matrix.
    pub fn dim(&self) -> usize {
        self.n
    }

    /// Diagonal of the tridiagonal matrix.
    pub fn diagonal(&self) -> &[f64] {
        &self.diagonal
    }

    /// Subdiagonal of the tridiagonal matrix; `subdiagonal()[k]` sits at
    /// `(k, k−1)` and entry 0 is identically zero.
    pub fn subdiagonal(&self) -> &[f64] {
        &self.subdiagonal
    }

    /// Accumulate `Qᵀ` as a row-major matrix.
    ///
    /// Reflectors are multiplied in from the right in ascending order,
    /// so the live block grows one row and column per step and every
    /// update touches contiguous row segments.
    pub fn accumulate_q_transpose(&self) -> Vec<f64> {
        let n = self.n;
        let mut m = vec![0.0; n * n];
        for i in 0..n {
            m[i * n + i] = 1.0;
        }
        for k in 2..n {
            let h = self.h[k];
            if h == 0.0 {
                continue;
            }
            let v = &self.work[k * n..k * n + k];
            for r in 0..k {
                let row = &mut m[r * n..r * n + k];
                let coef = dot(row, v) / h;
                for (x, &vc) in row.iter_mut().zip(v) {
                    *x -= coef * vc;
                }
            }
        }
        m
    }

    /// Back-transform one tridiagonal eigenvector in place: `z ← Q z`.
    pub fn apply_q(&self, z: &mut [f64]) {
        assert_eq!(z.len(), self.n, "vector length must match dimension");
        for k in 2..self.n {
            let h = self.h[k];
            if h == 0.0 {
                continue;
            }
            let v = &self.work[k * self.n..k * self.n + k];
            let coef = dot(&z[..k], v) / h;
            for (x, &vc) in z[..k].iter_mut().zip(v) {
                *x -= coef * vc;
            }
        }
    }
}

// ── Implicit-shift QL iteration ─────────────────────────────────────────────

/// Implicit-shift QL on a symmetric tridiagonal matrix.
///
/// `d` holds the diagonal and `e[k] = T[k][k−1]` (entry 0 ignored); on
/// success `d` holds eigenvalues in no particular order and `e` is
/// destroyed. Every applied plane rotation is reported through
/// `rotate(i, c, s)`, which acts on coordinates `(i, i+1)`; passing a
/// no-op closure yields the eigenvalue-only solver.
fn ql_implicit<F>(d: &mut [f64], e: &mut [f64], mut rotate: F) -> Result<(), EigensolveError>
where
    F: FnMut(usize, f64, f64),
{
    let n = d.len();
    if n == 0 {
        return Ok(());
    }
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    let eps = f64::EPSILON;
    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        if !tst1.is_finite() {
            return Err(EigensolveError::NoConvergence { index: l, sweeps: 0 });
        }
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > MAX_QL_SWEEPS {
                    return Err(EigensolveError::NoConvergence {
                        index: l,
                        sweeps: iter - 1,
                    });
                }
                // Form the implicit shift from the leading 2×2.
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let h = g - d[l];
                for di in d.iter_mut().take(n).skip(l + 2) {
                    *di -= h;
                }
                f += h;

                // One QL sweep, chasing the bulge from m−1 down to l.
                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let gi = c * e[i];
                    let hi = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * gi;
                    d[i + 1] = hi + s * (c * gi + s * d[i]);
                    rotate(i, c, s);
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}

// ── Inverse iteration on the tridiagonal matrix ─────────────────────────────

/// LU factorization of `T − λI` with partial pivoting; tridiagonal plus
/// one fill-in superdiagonal.
struct TridiagLu {
    n: usize,
    main: Vec<f64>,
    up1: Vec<f64>,
    up2: Vec<f64>,
    mult: Vec<f64>,
    swapped: Vec<bool>,
}

impl TridiagLu {
    /// Factor `T − λI`. Zero pivots are replaced by a tiny multiple of
    /// the matrix scale so the factorization (and inverse iteration on
    /// a near-exact eigenvalue) never divides by zero.
    fn factor(d: &[f64], e: &[f64], lambda: f64) -> Self {
        let n = d.len();
        let mut scale: f64 = 0.0;
        for i in 0..n {
            scale = scale.max(d[i].abs() + e[i].abs());
        }
        let tiny = (f64::EPSILON * scale.max(1e-300)).max(f64::MIN_POSITIVE);

        let mut main: Vec<f64> = d.iter().map(|&x| x - lambda).collect();
        let mut up1 = vec![0.0; n];
        let mut up2 = vec![0.0; n];
        let mut mult = vec![0.0; n];
        let mut swapped = vec![false; n];
        for i in 0..n.saturating_sub(1) {
            up1[i] = e[i + 1];
        }

        for i in 0..n.saturating_sub(1) {
            let sub = e[i + 1];
            if main[i].abs() >= sub.abs() {
                if main[i] == 0.0 {
                    main[i] = tiny;
                }
                let f = sub / main[i];
                mult[i] = f;
                main[i + 1] -= f * up1[i];
                up1[i + 1] -= f * up2[i];
            } else {
                // |sub| > |main[i]| ≥ 0, so the swapped pivot is nonzero.
                swapped[i] = true;
                let (pm, pu1, pu2) = (main[i], up1[i], up2[i]);
                main[i] = sub;
                up1[i] = main[i + 1];
                up2[i] = up1[i + 1];
                let f = pm / sub;
                mult[i] = f;
                main[i + 1] = pu1 - f * up1[i];
                up1[i + 1] = pu2 - f * up2[i];
            }
        }
        if main[n - 1] == 0.0 {
            main[n - 1] = tiny;
        }

        TridiagLu {
            n,
            main,
            up1,
            up2,
            mult,
            swapped,
        }
    }

    /// Solve `(T − λI) x = b` in place.
    fn solve(&self, b: &mut [f64]) {
        let n = self.n;
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                b.swap(i, i + 1);
            }
            b[i + 1] -= self.mult[i] * b[i];
        }
        b[n - 1] /= self.main[n - 1];
        if n >= 2 {
            b[n - 2] = (b[n - 2] - self.up1[n - 2] * b[n - 1]) / self.main[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            b[i] = (b[i] - self.up1[i] * b[i + 1] - self.up2[i] * b[i + 2]) / self.main[i];
        }
    }
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn normalize(z: &mut [f64]) {
    let norm = dot(z, z).sqrt();
    if norm > 0.0 {
        for x in z.iter_mut() {
            *x /= norm;
        }
    }
}

/// One tridiagonal eigenvector by inverse iteration at eigenvalue λ.
///
/// The start vector is a fixed pseudo-random function of `seed`, so
/// results are reproducible. Three solves are ample: each contracts
/// the off-eigendirection content by the eigenvalue-gap ratio, which
/// is at machine-precision level after the first solve already.
fn inverse_iteration(d: &[f64], e: &[f64], lambda: f64, seed: u64) -> Vec<f64> {
    let n = d.len();
    let mut state = seed ^ 0xA076_1D64_78BD_642F;
    let mut z: Vec<f64> = (0..n)
        .map(|_| {
            let bits = splitmix64(&mut state);
            2.0 * ((bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)) - 1.0
        })
        .collect();
    normalize(&mut z);
    let lu = TridiagLu::factor(d, e, lambda);
    for _ in 0..3 {
        lu.solve(&mut z);
        normalize(&mut z);
    }
    z
}

// ── Decomposition container and drivers ─────────────────────────────────────

/// Eigenvalues and (a block of) eigenvectors of a symmetric matrix.
///
/// Eigenvalues are always the full ascending spectrum. Eigenvectors are
/// stored as contiguous rows for the ranks in [`Self::stored_ranks`] —
/// the whole spectrum for [`eigh`], a window for [`eigh_window`]. Each
/// stored vector is normalized and signed so its largest-magnitude
/// component is positive.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    n: usize,
    first_rank: usize,
    eigenvalues: Vec<f64>,
    vectors: Vec<f64>,
}

impl EigenDecomposition {
    /// Matrix dimension.
    pub fn dim(&self) -> usize {
        self.n
    }

    /// All eigenvalues, ascending.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Eigenvalue of the given rank (0 = smallest).
    pub fn eigenvalue(&self, rank: usize) -> f64 {
        self.eigenvalues[rank]
    }

    /// Ranks whose eigenvectors are stored.
    pub fn stored_ranks(&self) -> Range<usize> {
        self.first_rank..self.first_rank + self.vectors.len() / self.n
    }

    /// Eigenvector of the given rank as a row slice.
    ///
    /// # Panics
    /// If `rank` is outside [`Self::stored_ranks`].
    pub fn eigenvector(&self, rank: usize) -> &[f64] {
        let stored = self.stored_ranks();
        assert!(
            stored.contains(&rank),
            "eigenvector {rank} not stored (stored ranks {stored:?})"
        );
        let r = rank - self.first_rank;
        &self.vectors[r * self.n..(r + 1) * self.n]
    }

    /// Largest 2-norm residual `‖Hv − λv‖₂` over the stored ranks.
    pub fn max_residual(&self, matrix: &SymmetricMatrix) -> f64 {
        assert_eq!(matrix.dim(), self.n, "matrix dimension mismatch");
        let dense = matrix.to_dense();
        let n = self.n;
        let mut worst: f64 = 0.0;
        for rank in self.stored_ranks() {
            let v = self.eigenvector(rank);
            let lambda = self.eigenvalues[rank];
            let mut sq = 0.0;
            for r in 0..n {
                let y = dot(&dense[r * n..(r + 1) * n], v) - lambda * v[r];
                sq += y * y;
            }
            worst = worst.max(sq.sqrt());
        }
        worst
    }

    /// Largest deviation of the stored Gram matrix from the identity.
    pub fn orthonormality_defect(&self) -> f64 {
        let n = self.n;
        let rows = self.vectors.len() / n;
        let mut worst: f64 = 0.0;
        for a in 0..rows {
            let va = &self.vectors[a * n..(a + 1) * n];
            for b in a..rows {
                let vb = &self.vectors[b * n..(b + 1) * n];
                let g = dot(va, vb);
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((g - target).abs());
            }
        }
        worst
    }
}

fn fix_signs(vectors: &mut [f64], n: usize) {
    for row in vectors.chunks_mut(n) {
        let mut best = 0;
        let mut best_abs = 0.0;
        for (j, &x) in row.iter().enumerate() {
            let a = x.abs();
            if a > best_abs {
                best_abs = a;
                best = j;
            }
        }
        if row[best] < 0.0 {
            for x in row.iter_mut() {
                *x = -*x;
            }
        }
    }
}

/// Full eigendecomposition of a symmetric matrix.
///
/// Eigenvalues come back ascending with eigenvectors stored as rows in
/// the same order.
pub fn eigh(matrix: &SymmetricMatrix) -> Result<EigenDecomposition, EigensolveError> {
    let n = matrix.dim();
    if n == 1 {
        return Ok(EigenDecomposition {
            n,
            first_rank: 0,
            eigenvalues: vec![matrix.get(0, 0)],
            vectors: vec![1.0],
        });
    }
    let red = tridiagonalize(matrix);
    let mut d = red.diagonal().to_vec();
    let mut e = red.subdiagonal().to_vec();
    let mut m = red.accumulate_q_transpose();
    ql_implicit(&mut d, &mut e, |i, c, s| {
        let (ra, rb) = row_pair_mut(&mut m, n, i);
        for (xa, xb) in ra.iter_mut().zip(rb.iter_mut()) {
            let t = *xb;
            *xb = s * *xa + c * t;
            *xa = c * *xa - s * t;
        }
    })?;

    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    let mut eigenvalues = Vec::with_capacity(n);
    let mut vectors = vec![0.0; n * n];
    for (new_r, &old_r) in idx.iter().enumerate() {
        eigenvalues.push(d[old_r]);
        vectors[new_r * n..(new_r + 1) * n].copy_from_slice(&m[old_r * n..(old_r + 1) * n]);
    }
    fix_signs(&mut vectors, n);

    Ok(EigenDecomposition {
        n,
        first_rank: 0,
        eigenvalues,
        vectors,
    })
}

/// Eigenvalues of the whole spectrum plus eigenvectors for a contiguous
/// window of ranks (0 = smallest eigenvalue).
///
/// The eigenvectors are built by inverse iteration on the tridiagonal
/// reduction and re-orthogonalized against one another within the
/// window, so degenerate clusters that fit inside the window stay
/// orthonormal to machine precision.
pub fn eigh_window(
    matrix: &SymmetricMatrix,
    ranks: Range<usize>,
) -> Result<EigenDecomposition, EigensolveError> {
    let n = matrix.dim();
    if ranks.start >= ranks.end || ranks.end > n {
        return Err(EigensolveError::InvalidRequest {
            detail: format!("rank window {ranks:?} invalid for dimension {n}"),
        });
    }
    if n == 1 {
        return eigh(matrix);
    }
    let red = tridiagonalize(matrix);
    let mut d = red.diagonal().to_vec();
    let mut e = red.subdiagonal().to_vec();
    ql_implicit(&mut d, &mut e, |_, _, _| {})?;
    d.sort_unstable_by(f64::total_cmp);

    let count = ranks.end - ranks.start;
    let mut tri_vecs = vec![0.0; count * n];
    for (slot, rank) in ranks.clone().enumerate() {
        let mut z = inverse_iteration(red.diagonal(), red.subdiagonal(), d[rank], rank as u64);
        // Modified Gram–Schmidt against every earlier window vector;
        // a cheap no-op for well-separated eigenvalues and the fix
        // for any near-degenerate cluster inside the window.
        for prev in 0..slot {
            let u = &tri_vecs[prev * n..(prev + 1) * n];
            let overlap = dot(&z, u);
            for (x, &uc) in z.iter_mut().zip(u) {
                *x -= overlap * uc;
            }
        }
        normalize(&mut z);
        tri_vecs[slot * n..(slot + 1) * n].copy_from_slice(&z);
    }

    let mut vectors = tri_vecs;
    for slot in 0..count {
        red.apply_q(&mut vectors[slot * n..(slot + 1) * n]);
    }
    fix_signs(&mut vectors, n);

    Ok(EigenDecomposition {
        n,
        first_rank: ranks.start,
        eigenvalues: d,
        vectors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::{sample_realization, EnsembleParams};

    fn matrix_from_rows(rows: &[&[f64]]) -> SymmetricMatrix {
        let n = rows.len();
        let mut m = SymmetricMatrix::zeros(n).unwrap();
        for i in 0..n {
            for j in i..n {
                assert_eq!(rows[i][j], rows[j][i], "test matrix must be symmetric");
                m.set(i, j, rows[i][j]);
            }
        }
        m
    }

    #[test]
    fn three_by_three_hand_case() {
        // [[2,1,0],[1,3,1],[0,1,4]] has eigenvalues 3 − √3, 3, 3 + √3.
        let m = matrix_from_rows(&[&[2.0, 1.0, 0.0], &[1.0, 3.0, 1.0], &[0.0, 1.0, 4.0]]);
        let dec = eigh(&m).unwrap();
        let s3 = 3f64.sqrt();
        let expect = [3.0 - s3, 3.0, 3.0 + s3];
        for (got, want) in dec.eigenvalues().iter().zip(expect) {
            assert!(
                (got - want).abs() < 1e-14,
                "eigenvalue {got} vs {want}"
            );
        }
        // The middle eigenvector is (1, 1, −1)/√3 after sign fixing.
        let v = dec.eigenvector(1);
        let r = 1.0 / s3;
        for (got, want) in v.iter().zip([r, r, -r]) {
            assert!((got - want).abs() < 1e-14, "component {got} vs {want}");
        }
        assert!(dec.max_residual(&m) < 1e-14);
        assert!(dec.orthonormality_defect() < 1e-14);
    }

    #[test]
    fn diagonal_matrix_is_immediate() {
        let m = matrix_from_rows(&[&[5.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 3.0]]);
        let dec = eigh(&m).unwrap();
        assert_eq!(dec.eigenvalues(), &[1.0, 3.0, 5.0]);
        assert_eq!(dec.eigenvector(0), &[0.0, 1.0, 0.0]);
        assert_eq!(dec.eigenvector(1), &[0.0, 0.0, 1.0]);
        assert_eq!(dec.eigenvector(2), &[1.0, 0.0, 0.0]);
    }

    #[test]
    fn one_by_one_and_two_by_two() {
        let mut m1 = SymmetricMatrix::zeros(1).unwrap();
        m1.set(0, 0, -2.5);
        let d1 = eigh(&m1).unwrap();
        assert_eq!(d1.eigenvalues(), &[-2.5]);
        assert_eq!(d1.eigenvector(0), &[1.0]);

        // [[0,1],[1,0]] has eigenvalues ∓1 and vectors (1,∓1)/√2.
        let m2 = matrix_from_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let d2 = eigh(&m2).unwrap();
        assert!((d2.eigenvalue(0) + 1.0).abs() < 1e-15);
        assert!((d2.eigenvalue(1) - 1.0).abs() < 1e-15);
        assert!(d2.max_residual(&m2) < 1e-15);
    }

    #[test]
    fn random_matrix_reconstruction_at_n50() {
        let params = EnsembleParams::new(50, 1.5, std::f64::consts::FRAC_1_SQRT_2).unwrap();
        let m = sample_realization(&params, 2024, 0).unwrap();
        let dec = eigh(&m).unwrap();
        let n = 50;
        let frob = m.frobenius_norm();

        assert!(dec.max_residual(&m) <= 1e-12 * frob, "residual too large");
        assert!(dec.orthonormality_defect() <= 1e-13, "vectors not orthonormal");

        // Trace and Frobenius norm are invariants of the similarity.
        let trace: f64 = (0..n).map(|i| m.get(i, i)).sum();
        let eig_sum: f64 = dec.eigenvalues().iter().sum();
        assert!((trace - eig_sum).abs() <= 1e-12 * frob.max(1.0));
        let eig_sq: f64 = dec.eigenvalues().iter().map(|l| l * l).sum();
        assert!((frob * frob - eig_sq).abs() <= 1e-11 * frob * frob);

        // Entrywise reconstruction H = Σ λ v vᵀ.
        for i in 0..n {
            for j in 0..n {
                let mut acc = 0.0;
                for r in 0..n {
                    let v = dec.eigenvector(r);
                    acc += dec.eigenvalue(r) * v[i] * v[j];
                }
                assert!(
                    (acc - m.get(i, j)).abs() <= 1e-12 * frob,
                    "reconstruction off at ({i},{j})"
                );
            }
        }

        // Ascending order.
        for w in dec.eigenvalues().windows(2) {
            assert!(w[0] <= w[1]);
        }
    }

    #[test]
    fn tridiagonalize_preserves_similarity_invariants() {
        let params = EnsembleParams::new(40, 1.5, 0.9).unwrap();
        let m = sample_realization(&params, 7, 1).unwrap();
        let red = tridiagonalize(&m);
        let trace: f64 = (0..40).map(|i| m.get(i, i)).sum();
        let tri_trace: f64 = red.diagonal().iter().sum();
        assert!((trace - tri_trace).abs() < 1e-12 * trace.abs().max(1.0));

        let frob2 = m.frobenius_norm().powi(2);
        let tri_frob2: f64 = red.diagonal().iter().map(|x| x * x).sum::<f64>()
            + 2.0 * red.subdiagonal().iter().map(|x| x * x).sum::<f64>();
        assert!((frob2 - tri_frob2).abs() < 1e-11 * frob2);
        assert_eq!(red.subdiagonal()[0], 0.0);
    }

    #[test]
    fn already_tridiagonal_input_passes_through() {
        // A tridiagonal input reduces to itself up to subdiagonal signs.
        let m = matrix_from_rows(&[
            &[1.0, 0.5, 0.0, 0.0],
            &[0.5, 2.0, 0.5, 0.0],
            &[0.0, 0.5, 3.0, 0.5],
            &[0.0, 0.0, 0.5, 4.0],
        ]);
        let red = tridiagonalize(&m);
        for (i, &di) in red.diagonal().iter().enumerate() {
            assert!((di - (i as f64 + 1.0)).abs() < 1e-14, "diagonal {di}");
        }
        for &ei in &red.subdiagonal()[1..] {
            assert!((ei.abs() - 0.5).abs() < 1e-14, "subdiagonal {ei}");
        }
        let dec = eigh(&m).unwrap();
        assert!(dec.max_residual(&m) < 1e-13);
    }

    #[test]
    fn windowed_solver_matches_full_solver() {
        let params = EnsembleParams::new(60, 1.5, std::f64::consts::FRAC_1_SQRT_2).unwrap();
        let m = sample_realization(&params, 99, 5).unwrap();
        let full = eigh(&m).unwrap();
        let window = 20..31;
        let win = eigh_window(&m, window.clone()).unwrap();

        assert_eq!(win.stored_ranks(), window.clone());
        let scale = m.frobenius_norm();
        for r in 0..60 {
            assert!(
                (full.eigenvalue(r) - win.eigenvalue(r)).abs() <= 1e-12 * scale,
                "eigenvalue {r} disagrees"
            );
        }
        for r in window {
            let a = full.eigenvector(r);
            let b = win.eigenvector(r);
            let overlap = dot(a, b).abs();
            assert!(overlap >= 1.0 - 1e-10, "rank {r} overlap {overlap}");
            for (x, y) in a.iter().zip(b) {
                assert!((x - y).abs() < 1e-7, "rank {r}: {x} vs {y}");
            }
        }
        assert!(win.max_residual(&m) <= 1e-11 * scale);
        assert!(win.orthonormality_defect() <= 1e-12);
    }

    #[test]
    fn window_request_is_validated() {
        let params = EnsembleParams::new(8, 1.5, 0.5).unwrap();
        let m = sample_realization(&params, 1, 0).unwrap();
        assert!(matches!(
            eigh_window(&m, 4..4),
            Err(EigensolveError::InvalidRequest { .. })
        ));
        assert!(matches!(
            eigh_window(&m, 5..9),
            Err(EigensolveError::InvalidRequest { .. })
        ));
        assert!(matches!(
            eigh_window(&m, 9..5),
            Err(EigensolveError::InvalidRequest { .. })
        ));
    }

    #[test]
    fn sign_convention_is_applied() {
        let params = EnsembleParams::new(24, 1.5, 0.8).unwrap();
        let m = sample_realization(&params, 3, 2).unwrap();
        for dec in [eigh(&m).unwrap(), eigh_window(&m, 8..16).unwrap()] {
            for r in dec.stored_ranks() {
                let v = dec.eigenvector(r);
                let mut best = 0.0f64;
                for &x in v {
                    if x.abs() > best.abs() {
                        best = x;
                    }
                }
                assert!(best > 0.0, "rank {r}: largest component {best} not positive");
            }
        }
    }

    #[test]
    fn non_finite_input_is_an_error() {
        let mut m = SymmetricMatrix::zeros(4).unwrap();
        m.set(0, 0, f64::NAN);
        m.set(1, 0, 1.0);
        m.set(2, 1, 1.0);
        m.set(3, 2, 1.0);
        assert!(eigh(&m).is_err());
    }

    #[test]
    #[ignore = "timing probe; run manually with --release"]
    fn bench_solvers() {
        for &n in &[512usize, 1024, 2048] {
            let params = EnsembleParams::new(n, 1.5, std::f64::consts::FRAC_1_SQRT_2).unwrap();
            let m = sample_realization(&params, 1234, 0).unwrap();

            let t0 = std::time::Instant::now();
            let red = tridiagonalize(&m);
            let t_tri = t0.elapsed().as_secs_f64();
            let _ = red.diagonal();

            let lo = n / 2 - n / 16;
            let hi = n / 2 + n / 16;
            let t1 = std::time::Instant::now();
            let win = eigh_window(&m, lo..hi).unwrap();
            let t_win = t1.elapsed().as_secs_f64();
            let res_win = win.max_residual(&m) / m.frobenius_norm();

            let (t_full, res_full) = if n <= 1024 {
                let t2 = std::time::Instant::now();
                let full = eigh(&m).unwrap();
                (t2.elapsed().as_secs_f64(), full.max_residual(&m) / m.frobenius_norm())
            } else {
                (f64::NAN, f64::NAN)
            };

            println!(
                "n={n}: tridiagonalize {t_tri:.2}s, window {t_win:.2}s (rel res {res_win:.2e}), \
                 full {t_full:.2}s (rel res {res_full:.2e})"
            );
        }
    }
}
