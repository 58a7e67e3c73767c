//! Dense minimum-norm least squares via Householder QR with column pivoting followed by a
//! complete orthogonal decomposition (the `xGELSY` scheme).
//!
//! Factorisation stops as soon as the largest remaining column norm drops below
//! `rank_tol * |R_00|`; the trailing columns are then eliminated from the right so the
//! returned solution has minimum 2-norm among the least-squares minimisers of the
//! truncated problem.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Column-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Real> DenseMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn from_row_major(rows: usize, cols: usize, values: &[T]) -> Self {
        assert_eq!(values.len(), rows * cols);
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = values[i * cols + j];
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn col(&self, j: usize) -> &[T] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn col_mut(&mut self, j: usize) -> &mut [T] {
        &mut self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// `A x`.
    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.cols);
        let mut out = vec![T::zero(); self.rows];
        for (j, &xj) in x.iter().enumerate() {
            if xj != T::zero() {
                axpy(xj, self.col(j), &mut out);
            }
        }
        out
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let (lo, hi) = (a.min(b), a.max(b));
        let (left, right) = self.data.split_at_mut(hi * self.rows);
        left[lo * self.rows..(lo + 1) * self.rows].swap_with_slice(&mut right[..self.rows]);
    }
}

impl<T> std::ops::Index<(usize, usize)> for DenseMatrix<T> {
    type Output = T;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[j * self.rows + i]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for DenseMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[j * self.rows + i]
    }
}

#[inline]
fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    let n = a.len().min(b.len());
    let (a, b) = (&a[..n], &b[..n]);
    let mut acc = [T::zero(); 4];
    let chunks = n / 4;
    for k in 0..chunks {
        let i = 4 * k;
        acc[0] = acc[0] + a[i] * b[i];
        acc[1] = acc[1] + a[i + 1] * b[i + 1];
        acc[2] = acc[2] + a[i + 2] * b[i + 2];
        acc[3] = acc[3] + a[i + 3] * b[i + 3];
    }
    let mut tail = T::zero();
    for i in 4 * chunks..n {
        tail = tail + a[i] * b[i];
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

#[inline]
fn axpy<T: Real>(alpha: T, x: &[T], y: &mut [T]) {
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi = *yi + alpha * xi;
    }
}

fn norm2<T: Real>(x: &[T]) -> T {
    let scale = x.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    if scale == T::zero() {
        return T::zero();
    }
    let ssq = x.iter().fold(T::zero(), |acc, &v| {
        let r = v / scale;
        acc + r * r
    });
    scale * ssq.sqrt()
}

/// Householder reflector `H = I - tau v v^T` with `v[0] = 1` and `H x = beta e_1`.
/// Overwrites `x[1..]` with `v[1..]`; returns `(beta, tau)`.
fn householder<T: Real>(x: &mut [T]) -> (T, T) {
    let alpha = x[0];
    let tail_norm = norm2(&x[1..]);
    if tail_norm == T::zero() {
        return (alpha, T::zero());
    }
    let mut beta = alpha.hypot(tail_norm);
    if alpha >= T::zero() {
        beta = -beta;
    }
    let tau = (beta - alpha) / beta;
    let scale = T::one() / (alpha - beta);
    for v in &mut x[1..] {
        *v = *v * scale;
    }
    (beta, tau)
}

/// Result of [`solve_min_norm`].
#[derive(Debug, Clone, PartialEq)]
pub struct LeastSquaresSolution<T> {
    pub x: Vec<T>,
    /// Numerical rank at the requested tolerance.
    pub rank: usize,
    /// Absolute values of the pivoted `R` diagonal for the retained columns.
    pub r_diagonal: Vec<T>,
}

/// Minimum-norm solution of `min ||A x - b||_2`, discarding directions whose pivoted
/// `R` diagonal falls below `rank_tol` times the largest one.
pub fn solve_min_norm<T: Real>(
    mut a: DenseMatrix<T>,
    b: &[T],
    rank_tol: T,
) -> Result<LeastSquaresSolution<T>> {
    let (m, n) = (a.rows, a.cols);
    if b.len() != m {
        return Err(Error::InvalidInput(format!(
            "rhs has {} entries for {m} rows",
            b.len()
        )));
    }
    if n == 0 {
        return Ok(LeastSquaresSolution {
            x: Vec::new(),
            rank: 0,
            r_diagonal: Vec::new(),
        });
    }
    let mut rhs = b.to_vec();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut norms: Vec<T> = (0..n).map(|j| norm2(a.col(j))).collect();
    let mut norms_ref = norms.clone();
    let recompute_tol = T::epsilon().sqrt();
    let kmax = m.min(n);
    let mut r_diagonal = Vec::with_capacity(kmax);
    let mut taus = Vec::with_capacity(kmax);
    let mut rank = 0;
    let mut largest = T::zero();

    for k in 0..kmax {
        let mut p = k;
        for j in k + 1..n {
            if norms[j] > norms[p] {
                p = j;
            }
        }
        if k == 0 {
            largest = norms[p];
            if !(largest > T::zero()) {
                return Err(Error::DegenerateSystem);
            }
        }
        if norms[p] <= rank_tol * largest {
            break;
        }
        a.swap_cols(k, p);
        perm.swap(k, p);
        norms.swap(k, p);
        norms_ref.swap(k, p);

        let (beta, tau) = householder(&mut a.col_mut(k)[k..]);
        if beta.abs() <= rank_tol * largest {
            // downdated norm overestimated the column; treat as rank boundary
            break;
        }
        // apply H_k to the trailing columns and to the rhs with v[0] = 1 implied
        a.col_mut(k)[k] = T::one();
        let (head, tail) = a.data.split_at_mut((k + 1) * m);
        let v = &head[k * m + k..(k + 1) * m];
        if tau != T::zero() {
            for col in tail.chunks_exact_mut(m) {
                let seg = &mut col[k..];
                let w = dot(v, seg);
                if w != T::zero() {
                    axpy(-tau * w, v, seg);
                }
            }
            let w = dot(v, &rhs[k..]);
            axpy(-tau * w, v, &mut rhs[k..]);
        }
        a[(k, k)] = beta;
        taus.push(tau);
        r_diagonal.push(beta.abs());
        rank = k + 1;

        for j in k + 1..n {
            if norms[j] != T::zero() {
                let ratio = a[(k, j)].abs() / norms[j];
                let temp = (T::one() - ratio * ratio).max(T::zero());
                let rel = norms[j] / norms_ref[j];
                if temp * rel * rel <= recompute_tol {
                    norms[j] = norm2(&a.col(j)[k + 1..]);
                    norms_ref[j] = norms[j];
                } else {
                    norms[j] = norms[j] * temp.sqrt();
                }
            }
        }
    }
    if rank == 0 {
        return Err(Error::DegenerateSystem);
    }

    // eliminate R12 from the right: [R11 R12] = [T11 0] Z, one reflector per row
    let r = rank;
    let extra = n - r;
    let mut z_vecs: Vec<Vec<T>> = Vec::with_capacity(r);
    let mut z_taus: Vec<T> = Vec::with_capacity(r);
    if extra > 0 {
        for i in (0..r).rev() {
            let mut x = Vec::with_capacity(extra + 1);
            x.push(a[(i, i)]);
            for t in 0..extra {
                x.push(a[(i, r + t)]);
            }
            let (beta, tau) = householder(&mut x);
            a[(i, i)] = beta;
            let v: Vec<T> = x[1..].to_vec();
            if tau != T::zero() {
                for l in 0..i {
                    let mut w = a[(l, i)];
                    for t in 0..extra {
                        w = w + v[t] * a[(l, r + t)];
                    }
                    let tw = tau * w;
                    a[(l, i)] = a[(l, i)] - tw;
                    for t in 0..extra {
                        a[(l, r + t)] = a[(l, r + t)] - tw * v[t];
                    }
                }
            }
            z_vecs.push(v);
            z_taus.push(tau);
        }
        // stored in order i = r-1, ..., 0
        z_vecs.reverse();
        z_taus.reverse();
    }

    // back substitution with the r x r upper triangle
    let mut y = vec![T::zero(); n];
    for i in (0..r).rev() {
        let mut acc = rhs[i];
        for j in i + 1..r {
            acc = acc - a[(i, j)] * y[j];
        }
        y[i] = acc / a[(i, i)];
    }
    // x = Z^T [y; 0] = H_{r-1} ... H_0 applied in order H_0 first
    if extra > 0 {
        for i in 0..r {
            let tau = z_taus[i];
            if tau == T::zero() {
                continue;
            }
            let v = &z_vecs[i];
            let mut w = y[i];
            for t in 0..extra {
                w = w + v[t] * y[r + t];
            }
            let tw = tau * w;
            y[i] = y[i] - tw;
            for t in 0..extra {
                y[r + t] = y[r + t] - tw * v[t];
            }
        }
    }
    let mut x = vec![T::zero(); n];
    for (j, &pj) in perm.iter().enumerate() {
        x[pj] = y[j];
    }
    let _ = taus;
    Ok(LeastSquaresSolution {
        x,
        rank,
        r_diagonal,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn residual(a: &DenseMatrix<f64>, x: &[f64], b: &[f64]) -> Vec<f64> {
        a.mul_vec(x).iter().zip(b).map(|(u, v)| u - v).collect()
    }

    fn random_matrix(rng: &mut ChaCha8Rng, m: usize, n: usize) -> DenseMatrix<f64> {
        let vals: Vec<f64> = (0..m * n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        DenseMatrix::from_row_major(m, n, &vals)
    }

    /// Normal-equation residual `A^T (A x - b)`, zero at any least-squares minimiser.
    fn gradient(a: &DenseMatrix<f64>, x: &[f64], b: &[f64]) -> f64 {
        let r = residual(a, x, b);
        (0..a.cols())
            .map(|j| dot(a.col(j), &r).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn square_system_is_solved_exactly() {
        let a =
            DenseMatrix::from_row_major(3, 3, &[4.0f64, 1.0, 0.0, 1.0, 3.0, 1.0, 0.0, 1.0, 2.0]);
        let x_true = [1.0, -2.0, 0.5];
        let b = a.mul_vec(&x_true);
        let sol = solve_min_norm(a, &b, 1e-12).unwrap();
        assert_eq!(sol.rank, 3);
        for (u, v) in sol.x.iter().zip(x_true) {
            assert!((u - v).abs() < 1e-14);
        }
    }

    #[test]
    fn overdetermined_full_rank_satisfies_normal_equations() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = random_matrix(&mut rng, 60, 20);
        let b: Vec<f64> = (0..60).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let sol = solve_min_norm(a.clone(), &b, 1e-12).unwrap();
        assert_eq!(sol.rank, 20);
        assert!(gradient(&a, &sol.x, &b) < 1e-12);
    }

    #[test]
    fn rank_deficient_gives_minimum_norm() {
        // duplicate columns: x1 + x2 is determined, min norm splits evenly
        let a = DenseMatrix::from_row_major(4, 2, &[1.0f64, 1.0, 2.0, 2.0, 3.0, 3.0, -1.0, -1.0]);
        let b = [2.0, 4.0, 6.0, -2.0];
        let sol = solve_min_norm(a, &b, 1e-12).unwrap();
        assert_eq!(sol.rank, 1);
        assert!((sol.x[0] - 1.0).abs() < 1e-14 && (sol.x[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rank_deficient_random_matches_projection() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let (m, n, r) = (40, 15, 9);
        let left = random_matrix(&mut rng, m, r);
        let right = random_matrix(&mut rng, r, n);
        let mut a = DenseMatrix::zeros(m, n);
        for i in 0..m {
            for j in 0..n {
                a[(i, j)] = (0..r).map(|k| left[(i, k)] * right[(k, j)]).sum();
            }
        }
        let b: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let sol = solve_min_norm(a.clone(), &b, 1e-10).unwrap();
        assert_eq!(sol.rank, r);
        assert!(gradient(&a, &sol.x, &b) < 1e-10);
        // minimum norm: x lies in the row space of A, i.e. orthogonal to the null space.
        // Null vectors of A are null vectors of `right`; build one per free column.
        for _ in 0..5 {
            let probe: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            // project probe onto null(right) via x - R^T (R R^T)^{-1} R x using a solve
            let rp: Vec<f64> = (0..r)
                .map(|k| (0..n).map(|j| right[(k, j)] * probe[j]).sum())
                .collect();
            let mut rt = DenseMatrix::zeros(n, r);
            for k in 0..r {
                for j in 0..n {
                    rt[(j, k)] = right[(k, j)];
                }
            }
            let mut gram = DenseMatrix::zeros(r, r);
            for p in 0..r {
                for q in 0..r {
                    gram[(p, q)] = (0..n).map(|j| right[(p, j)] * right[(q, j)]).sum();
                }
            }
            let coef = solve_min_norm(gram, &rp, 1e-14).unwrap().x;
            let back = rt.mul_vec(&coef);
            let null: Vec<f64> = probe.iter().zip(&back).map(|(p, q)| p - q).collect();
            let overlap: f64 = null.iter().zip(&sol.x).map(|(u, v)| u * v).sum();
            assert!(overlap.abs() < 1e-9, "overlap {overlap}");
        }
    }

    #[test]
    fn zero_matrix_is_degenerate() {
        let a = DenseMatrix::<f64>::zeros(5, 3);
        assert_eq!(
            solve_min_norm(a, &[1.0; 5], 1e-12),
            Err(Error::DegenerateSystem)
        );
    }

    #[test]
    fn deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let a = random_matrix(&mut rng, 30, 12);
        let b: Vec<f64> = (0..30).map(|_| rng.gen::<f64>()).collect();
        let s1 = solve_min_norm(a.clone(), &b, 1e-12).unwrap();
        let s2 = solve_min_norm(a, &b, 1e-12).unwrap();
        assert_eq!(s1, s2);
    }

    #[test]
    fn works_in_single_precision() {
        let a = DenseMatrix::from_row_major(3, 2, &[1.0f32, 0.0, 0.0, 1.0, 1.0, 1.0]);
        let b = [1.0f32, 2.0, 3.0];
        let sol = solve_min_norm(a, &b, 1e-6).unwrap();
        assert!((sol.x[0] - 1.0).abs() < 1e-5 && (sol.x[1] - 2.0).abs() < 1e-5);
    }
}
