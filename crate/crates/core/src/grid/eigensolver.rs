//! Block Krylov eigensolvers for the lowest eigenpairs of a large symmetric
//! operator.
//!
//! The default is Chebyshev-filtered block subspace iteration: a block of
//! k + g vectors is multiplied by a degree-d Chebyshev polynomial in A that
//! is small on [θ_cut, upper bound] and grows fast below θ_cut, then
//! re-orthonormalized and Rayleigh–Ritz projected. Each step is a block
//! Krylov extension of degree d compressed back to the block, so almost
//! all of the work is stencil applications and very little is
//! orthogonalization. The cut θ_cut is the largest Ritz value of the block,
//! an upper bound on the eigenvalue it approximates.
//!
//! The alternative is thick-restart block Lanczos in Krylov–Schur form. The basis V grows a
//! block at a time: the images A·v of the newest block are orthogonalized
//! against the whole basis (two classical Gram–Schmidt passes, plus one
//! more after normalization), which yields both the next block and the
//! exact residual directions of every Ritz pair. When the basis is full it
//! is compressed onto the lowest Ritz vectors; the pending residual block
//! stays orthogonal to it, so nothing is lost. Convergence is confirmed
//! with explicitly recomputed residuals.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{input_err, Error, Result};

/// A symmetric linear map on ℝⁿ.
pub trait LinearOperator: Sync {
    fn len(&self) -> usize;
    fn apply(&self, x: &[f64], y: &mut [f64]);
}

impl LinearOperator for DMatrix<f64> {
    fn len(&self) -> usize {
        self.nrows()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = (0..self.ncols()).map(|j| self[(i, j)] * x[j]).sum();
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EigenMethod {
    /// Chebyshev-filtered block subspace iteration (the default).
    ChebyshevFiltered,
    /// Thick-restart block Lanczos.
    BlockLanczos,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenOptions {
    pub method: EigenMethod,
    /// Block width; for the filtered method, guard vectors beyond k.
    pub block_size: usize,
    /// Largest Lanczos basis before a thick restart.
    pub max_basis: usize,
    /// Degree of the Chebyshev filter.
    pub filter_degree: usize,
    pub max_matvecs: usize,
    pub seed: u64,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self {
            method: EigenMethod::ChebyshevFiltered,
            block_size: 4,
            max_basis: 40,
            filter_degree: 20,
            max_matvecs: 200_000,
            seed: 0x5eed_1e7e1,
        }
    }
}

#[derive(Debug, Clone)]
pub struct EigenResult {
    /// Ascending eigenvalues of the unshifted operator.
    pub values: Vec<f64>,
    /// Unit 2-norm eigenvectors.
    pub vectors: Vec<Vec<f64>>,
    /// Explicit ‖Ax − λx‖ for each pair.
    pub residuals: Vec<f64>,
    pub matvecs: usize,
    pub restarts: usize,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    // Fixed summation order in four lanes; reproducible across runs.
    let mut acc = [0.0; 4];
    let chunks = a.len() / 4;
    for c in 0..chunks {
        let i = 4 * c;
        acc[0] += a[i] * b[i];
        acc[1] += a[i + 1] * b[i + 1];
        acc[2] += a[i + 2] * b[i + 2];
        acc[3] += a[i + 3] * b[i + 3];
    }
    let mut s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for i in 4 * chunks..a.len() {
        s += a[i] * b[i];
    }
    s
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

fn norm(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}

/// Σ_j coeffs[j]·cols[j].
fn combine(cols: &[Vec<f64>], coeffs: impl Iterator<Item = f64>, n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n];
    for (c, col) in coeffs.zip(cols) {
        if c != 0.0 {
            axpy(c, col, &mut out);
        }
    }
    out
}

struct Subspace<'a> {
    op: &'a dyn LinearOperator,
    shift: f64,
    v: Vec<Vec<f64>>,
    /// Lower triangle of Vᵀ(A − shift)V; row i holds entries j ≤ i.
    h: Vec<Vec<f64>>,
    matvecs: usize,
}

impl Subspace<'_> {
    fn len(&self) -> usize {
        self.v.len()
    }

    fn image(&mut self, w: &[f64]) -> Vec<f64> {
        let mut aw = vec![0.0; w.len()];
        self.op.apply(w, &mut aw);
        axpy(-self.shift, w, &mut aw);
        self.matvecs += 1;
        aw
    }

    /// Classical Gram–Schmidt against the basis, `passes` times.
    fn orthogonalize(&self, w: &mut [f64], passes: usize) {
        for _ in 0..passes {
            let coeffs: Vec<f64> = self.v.iter().map(|vi| dot(vi, w)).collect();
            for (c, vi) in coeffs.iter().zip(&self.v) {
                axpy(-c, vi, w);
            }
        }
    }

    /// Appends a unit vector orthogonal to the basis; returns its image.
    fn append(&mut self, w: Vec<f64>) -> Vec<f64> {
        let aw = self.image(&w);
        let mut row: Vec<f64> = self.v.iter().map(|vi| dot(vi, &aw)).collect();
        row.push(dot(&w, &aw));
        self.h.push(row);
        self.v.push(w);
        aw
    }

    /// Orthonormalizes `w` (already roughly orthogonal when `passes` is 1)
    /// and appends it. Returns None if nothing independent remains.
    fn try_append(&mut self, mut w: Vec<f64>, scale: f64, passes: usize) -> Option<Vec<f64>> {
        self.orthogonalize(&mut w, passes);
        let nw = norm(&w);
        if !(nw > 1e-13 * scale) {
            return None;
        }
        w.iter_mut().for_each(|x| *x /= nw);
        // One more pass restores orthogonality lost to cancellation.
        self.orthogonalize(&mut w, 1);
        let nw = norm(&w);
        w.iter_mut().for_each(|x| *x /= nw);
        Some(self.append(w))
    }

    fn projected(&self) -> (Vec<f64>, DMatrix<f64>) {
        let p = self.len();
        let h = DMatrix::from_fn(p, p, |i, j| {
            let (a, b) = if j <= i { (i, j) } else { (j, i) };
            self.h[a][b]
        });
        let eig = SymmetricEigen::new(h);
        let mut order: Vec<usize> = (0..p).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let theta = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let s = DMatrix::from_fn(p, p, |r, c| eig.eigenvectors[(r, order[c])]);
        (theta, s)
    }

    /// Compresses the basis onto the lowest `keep` Ritz vectors.
    fn restart(&mut self, theta: &[f64], s: &DMatrix<f64>, keep: usize) {
        let n = self.op.len();
        self.v = (0..keep)
            .map(|j| combine(&self.v, s.column(j).iter().copied(), n))
            .collect();
        self.h = (0..keep)
            .map(|i| (0..=i).map(|j| if i == j { theta[i] } else { 0.0 }).collect())
            .collect();
    }
}

fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

/// Lowest `k` eigenpairs of `op`, each with ‖Ax − λx‖ ≤ `abs_tol`.
///
/// The iteration runs on A − `shift`·I (pick the shift so this is positive
/// definite); reported values are for A itself. `upper` must bound the
/// spectrum of A from above. `start` vectors, if any, seed the first block
/// and the rest is filled from a fixed-seed stream.
pub fn lowest_eigenpairs_of(
    op: &dyn LinearOperator,
    k: usize,
    abs_tol: f64,
    shift: f64,
    upper: f64,
    start: &[Vec<f64>],
    opts: &EigenOptions,
) -> Result<EigenResult> {
    let n = op.len();
    if k == 0 || k > n {
        return input_err(format!("need 1 ≤ k ≤ {n}, got {k}"));
    }
    if !(abs_tol > 0.0) {
        return input_err("tolerance must be > 0");
    }
    match opts.method {
        EigenMethod::BlockLanczos => block_lanczos(op, k, abs_tol, shift, start, opts),
        EigenMethod::ChebyshevFiltered => chebyshev_filtered(op, k, abs_tol, shift, upper, start, opts),
    }
}

/// Orthonormalizes `block` in place (two Gram–Schmidt passes, also against
/// `against`); dependent vectors are replaced from `rng`.
fn orthonormalize(block: &mut [Vec<f64>], against: &[Vec<f64>], rng: &mut ChaCha8Rng) {
    for i in 0..block.len() {
        let (done, rest) = block.split_at_mut(i);
        let w = &mut rest[0];
        for attempt in 0..8 {
            let scale = norm(w);
            for _ in 0..2 {
                for q in against.iter().chain(done.iter()) {
                    let c = dot(q, w);
                    axpy(-c, q, w);
                }
            }
            let nw = norm(w);
            if nw > 1e-10 * scale && nw > 0.0 {
                w.iter_mut().for_each(|x| *x /= nw);
                break;
            }
            assert!(attempt < 7, "cannot extend an orthonormal block");
            *w = random_vector(rng, w.len());
        }
    }
}

struct Shifted<'a> {
    op: &'a dyn LinearOperator,
    shift: f64,
    matvecs: usize,
}

impl Shifted<'_> {
    fn apply(&mut self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; x.len()];
        self.op.apply(x, &mut y);
        axpy(-self.shift, x, &mut y);
        self.matvecs += 1;
        y
    }
}

fn chebyshev_filtered(
    op: &dyn LinearOperator,
    k: usize,
    abs_tol: f64,
    shift: f64,
    upper: f64,
    start: &[Vec<f64>],
    opts: &EigenOptions,
) -> Result<EigenResult> {
    let n = op.len();
    let q = (k + opts.block_size).min(n);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut a = Shifted { op, shift, matvecs: 0 };
    let beta = upper - shift;
    let mut x: Vec<Vec<f64>> = start
        .iter()
        .filter(|s| s.len() == n)
        .take(q)
        .cloned()
        .collect();
    while x.len() < q {
        x.push(random_vector(&mut rng, n));
    }
    orthonormalize(&mut x, &[], &mut rng);
    let mut best = vec![f64::INFINITY; k];
    let mut iterations = 0;
    loop {
        // Rayleigh–Ritz on span(x).
        let ax: Vec<Vec<f64>> = x.iter().map(|v| a.apply(v)).collect();
        let h = DMatrix::from_fn(q, q, |i, j| {
            let (i, j) = if j <= i { (i, j) } else { (j, i) };
            dot(&x[i], &ax[j])
        });
        let eig = SymmetricEigen::new(h);
        let mut order: Vec<usize> = (0..q).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
        let theta: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let coeffs = |j: usize| eig.eigenvectors.column(order[j]).iter().copied().collect::<Vec<_>>();
        let ritz: Vec<Vec<f64>> = (0..q).map(|j| combine(&x, coeffs(j).into_iter(), n)).collect();
        let aritz: Vec<Vec<f64>> = (0..q).map(|j| combine(&ax, coeffs(j).into_iter(), n)).collect();
        let residuals: Vec<f64> = (0..k)
            .map(|j| {
                let mut r = aritz[j].clone();
                axpy(-theta[j], &ritz[j], &mut r);
                norm(&r)
            })
            .collect();
        for (bj, rj) in best.iter_mut().zip(&residuals) {
            *bj = bj.min(*rj);
        }
        if q == n || residuals.iter().all(|&r| r <= abs_tol) {
            let vectors = ritz
                .into_iter()
                .take(k)
                .map(|v| {
                    let nv = norm(&v);
                    let lead = v.iter().find(|t| t.abs() > 1e-8 * nv).copied().unwrap_or(1.0);
                    let sign = if lead < 0.0 { -1.0 } else { 1.0 } / nv;
                    v.into_iter().map(|t| t * sign).collect()
                })
                .collect();
            return Ok(EigenResult {
                values: theta[..k].iter().map(|t| t + shift).collect(),
                vectors,
                residuals,
                matvecs: a.matvecs,
                restarts: iterations,
            });
        }
        if a.matvecs >= opts.max_matvecs {
            return Err(Error::NonConvergence {
                iterations: a.matvecs,
                best_residuals: best,
                tolerance: abs_tol,
            });
        }
        iterations += 1;
        // Scaled Chebyshev filter damping [cut, beta], normalized at theta_0.
        let cut = theta[q - 1];
        let low = theta[0];
        if !(cut < beta) {
            return input_err("upper spectral bound lies below the Ritz values");
        }
        let e = 0.5 * (beta - cut);
        let c = 0.5 * (beta + cut);
        let mut sigma = e / (low - c);
        let tau = 2.0 / sigma;
        let mut prev = ritz;
        let mut cur: Vec<Vec<f64>> = prev
            .iter()
            .zip(&aritz)
            .map(|(v, av)| av.iter().zip(v).map(|(av, v)| (av - c * v) * sigma / e).collect())
            .collect();
        for _ in 1..opts.filter_degree.max(1) {
            let next_sigma = 1.0 / (tau - sigma);
            for (p, y) in prev.iter_mut().zip(cur.iter_mut()) {
                let ay = a.apply(y);
                // p ← 2σ'/e·(A − c)y − σσ'·p, then swap roles.
                for ((pi, yi), ai) in p.iter_mut().zip(y.iter()).zip(&ay) {
                    *pi = 2.0 * next_sigma / e * (ai - c * yi) - sigma * next_sigma * *pi;
                }
                std::mem::swap(p, y);
            }
            sigma = next_sigma;
        }
        x = cur;
        orthonormalize(&mut x, &[], &mut rng);
    }
}

fn block_lanczos(
    op: &dyn LinearOperator,
    k: usize,
    abs_tol: f64,
    shift: f64,
    start: &[Vec<f64>],
    opts: &EigenOptions,
) -> Result<EigenResult> {
    let n = op.len();
    let b = opts.block_size.clamp(1, n);
    let m = opts.max_basis.max(k + 2 * b).min(n);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut sub = Subspace {
        op,
        shift,
        v: Vec::new(),
        h: Vec::new(),
        matvecs: 0,
    };
    // (basis index, image) of vectors whose images are not yet in the span.
    let mut frontier: Vec<(usize, Vec<f64>)> = Vec::new();
    let seeds = start
        .iter()
        .filter(|s| s.len() == n)
        .take(b)
        .cloned()
        .chain(std::iter::repeat_with(|| random_vector(&mut rng, n)))
        .take(8 * b);
    for w in seeds {
        if frontier.len() >= b || sub.len() >= n {
            break;
        }
        let scale = norm(&w);
        if let Some(aw) = sub.try_append(w, scale, 2) {
            frontier.push((sub.len() - 1, aw));
        }
    }
    let mut restarts = 0;
    let mut best = vec![f64::INFINITY; k];
    loop {
        let p = sub.len();
        // Residual directions: the part of each frontier image outside span V.
        let resid: Vec<Vec<f64>> = frontier
            .iter()
            .map(|(_, aw)| {
                let mut r = aw.clone();
                sub.orthogonalize(&mut r, 2);
                r
            })
            .collect();
        let (theta, s) = sub.projected();
        let nf = resid.len();
        let gram = DMatrix::from_fn(nf, nf, |i, j| dot(&resid[i], &resid[j]));
        let est: Vec<f64> = (0..k.min(p))
            .map(|j| {
                let c = nalgebra::DVector::from_fn(nf, |f, _| s[(frontier[f].0, j)]);
                c.dot(&(&gram * &c)).max(0.0).sqrt()
            })
            .collect();
        for (bj, ej) in best.iter_mut().zip(&est) {
            *bj = bj.min(*ej);
        }
        if p >= k && (p == n || est.iter().all(|&r| r <= abs_tol)) {
            let mut values = Vec::with_capacity(k);
            let mut vectors = Vec::with_capacity(k);
            let mut residuals = Vec::with_capacity(k);
            for j in 0..k {
                let x = combine(&sub.v, s.column(j).iter().copied(), n);
                let nx = norm(&x);
                let ax = sub.image(&x);
                let lambda = dot(&x, &ax) / (nx * nx);
                let mut r = ax;
                axpy(-lambda, &x, &mut r);
                residuals.push(norm(&r) / nx);
                values.push(lambda + shift);
                let lead = x.iter().find(|v| v.abs() > 1e-8 * nx).copied().unwrap_or(1.0);
                let sign = if lead < 0.0 { -1.0 } else { 1.0 };
                vectors.push(x.into_iter().map(|v| sign * v / nx).collect::<Vec<_>>());
            }
            if p == n || residuals.iter().all(|&r| r <= abs_tol) {
                return Ok(EigenResult {
                    values,
                    vectors,
                    residuals,
                    matvecs: sub.matvecs,
                    restarts,
                });
            }
        }
        if sub.matvecs >= opts.max_matvecs || p == n {
            return Err(Error::NonConvergence {
                iterations: sub.matvecs,
                best_residuals: best,
                tolerance: abs_tol,
            });
        }
        if p + nf.max(1) > m {
            let keep = (k + b).max(m / 2).min(p);
            sub.restart(&theta, &s, keep);
            restarts += 1;
        }
        let scales: Vec<f64> = frontier.iter().map(|(_, aw)| norm(aw)).collect();
        frontier.clear();
        for (r, scale) in resid.into_iter().zip(scales) {
            if sub.len() >= n {
                break;
            }
            let appended = match sub.try_append(r, scale, 1) {
                Some(aw) => Some(aw),
                // Invariant subspace reached: continue with a fresh direction.
                None => (0..4).find_map(|_| {
                    let w = random_vector(&mut rng, n);
                    let sc = norm(&w);
                    sub.try_append(w, sc, 2)
                }),
            };
            if let Some(aw) = appended {
                frontier.push((sub.len() - 1, aw));
            }
        }
        if frontier.is_empty() && sub.len() < n {
            return Err(Error::NonConvergence {
                iterations: sub.matvecs,
                best_residuals: best,
                tolerance: abs_tol,
            });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplacian_1d(n: usize) -> DMatrix<f64> {
        DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                2.0
            } else if i.abs_diff(j) == 1 {
                -1.0
            } else {
                0.0
            }
        })
    }

    #[test]
    fn matches_dense_on_laplacian() {
        let n = 300;
        let a = laplacian_1d(n);
        let res = lowest_eigenpairs_of(&a, 5, 1e-9, -1.0, 4.0, &[], &EigenOptions::default()).unwrap();
        for (j, &v) in res.values.iter().enumerate() {
            let exact = 2.0 - 2.0 * ((j + 1) as f64 * std::f64::consts::PI / (n + 1) as f64).cos();
            assert!((v - exact).abs() < 1e-12, "{j}: {v} vs {exact}");
        }
        assert!(res.residuals.iter().all(|&r| r <= 1e-9));
    }

    #[test]
    fn resolves_degenerate_clusters() {
        // diag(1,1,1,4,5,...) rotated by a fixed orthogonal matrix.
        let n = 60;
        let mut d: Vec<f64> = (0..n).map(|i| 1.0 + i as f64).collect();
        d[1] = 1.0;
        d[2] = 1.0;
        let q = {
            let mut rng = ChaCha8Rng::seed_from_u64(3);
            let m = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
            m.qr().q()
        };
        let a = &q * DMatrix::from_diagonal(&nalgebra::DVector::from_vec(d)) * q.transpose();
        let res = lowest_eigenpairs_of(&a, 4, 1e-10, 0.0, 61.0 * 61.0, &[], &EigenOptions::default()).unwrap();
        let expect = [1.0, 1.0, 1.0, 4.0];
        for (v, e) in res.values.iter().zip(expect) {
            assert!((v - e).abs() < 1e-9, "{:?}", res.values);
        }
        for i in 0..4 {
            for j in 0..i {
                assert!(dot(&res.vectors[i], &res.vectors[j]).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn deterministic() {
        let a = laplacian_1d(200);
        let opts = EigenOptions::default();
        let r1 = lowest_eigenpairs_of(&a, 3, 1e-9, 0.0, 4.0, &[], &opts).unwrap();
        let r2 = lowest_eigenpairs_of(&a, 3, 1e-9, 0.0, 4.0, &[], &opts).unwrap();
        assert_eq!(r1.values, r2.values);
        assert_eq!(r1.vectors, r2.vectors);
    }

    #[test]
    fn reports_non_convergence() {
        let a = laplacian_1d(400);
        let opts = EigenOptions {
            max_matvecs: 20,
            ..EigenOptions::default()
        };
        match lowest_eigenpairs_of(&a, 2, 1e-12, 0.0, 4.0, &[], &opts) {
            Err(Error::NonConvergence { best_residuals, .. }) => assert_eq!(best_residuals.len(), 2),
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }

    #[test]
    fn both_methods_agree() {
        let a = laplacian_1d(500);
        let cheb = lowest_eigenpairs_of(&a, 4, 1e-10, -1.0, 4.0, &[], &EigenOptions::default()).unwrap();
        let lanczos_opts = EigenOptions {
            method: EigenMethod::BlockLanczos,
            ..EigenOptions::default()
        };
        let lan = lowest_eigenpairs_of(&a, 4, 1e-10, -1.0, 4.0, &[], &lanczos_opts).unwrap();
        for (x, y) in cheb.values.iter().zip(&lan.values) {
            assert!((x - y).abs() < 1e-12, "{x} vs {y}");
        }
        for (u, v) in cheb.vectors.iter().zip(&lan.vectors) {
            assert!((dot(u, v).abs() - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn tiny_problems_fill_the_space() {
        let a = laplacian_1d(3);
        let res = lowest_eigenpairs_of(&a, 3, 1e-12, 0.0, 4.0, &[], &EigenOptions::default()).unwrap();
        let s = 2f64.sqrt();
        for (v, e) in res.values.iter().zip([2.0 - s, 2.0, 2.0 + s]) {
            assert!((v - e).abs() < 1e-12);
        }
    }
}
