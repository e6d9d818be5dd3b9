//! Lowest eigenpairs of a real symmetric tridiagonal matrix by Sturm
//! bisection and inverse iteration.

#[derive(Debug, Clone)]
pub struct SymTridiagonal {
    pub diag: Vec<f64>,
    /// `off[i]` couples rows i and i + 1.
    pub off: Vec<f64>,
}

impl SymTridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Self {
        assert!(!diag.is_empty());
        assert_eq!(off.len() + 1, diag.len());
        Self { diag, off }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    fn gershgorin(&self) -> (f64, f64) {
        let n = self.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let r = if i > 0 { self.off[i - 1].abs() } else { 0.0 }
                + if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    /// Number of eigenvalues strictly below `x`.
    pub fn count_below(&self, x: f64) -> usize {
        let tiny = f64::MIN_POSITIVE.sqrt();
        let mut count = 0;
        let mut d = self.diag[0] - x;
        for i in 0..self.len() {
            if i > 0 {
                d = self.diag[i] - x - self.off[i - 1] * self.off[i - 1] / d;
            }
            if d == 0.0 {
                d = -tiny;
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// The `k` lowest eigenvalues, ascending.
    pub fn lowest_eigenvalues(&self, k: usize) -> Vec<f64> {
        let k = k.min(self.len());
        let (glo, ghi) = self.gershgorin();
        let span = (ghi - glo).abs().max(f64::MIN_POSITIVE);
        (0..k)
            .map(|j| {
                let (mut lo, mut hi) = (glo - 1e-12 * span, ghi + 1e-12 * span);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    if self.count_below(mid) > j {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                0.5 * (lo + hi)
            })
            .collect()
    }

    /// Eigenvector for an accurately known eigenvalue, unit Euclidean norm.
    pub fn eigenvector(&self, lambda: f64) -> Vec<f64> {
        let n = self.len();
        let (glo, ghi) = self.gershgorin();
        let eps = f64::EPSILON * (ghi - glo).abs().max(1.0);
        // Deterministic, non-symmetric start so no eigenvector is missed by parity.
        let mut x: Vec<f64> = (0..n)
            .map(|i| 1.0 + 0.37 * ((i as f64 * 0.618_033_988_75).fract() - 0.5))
            .collect();
        for _ in 0..3 {
            x = self.shifted_solve(lambda, &x, eps);
            let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            x.iter_mut().for_each(|v| *v /= norm);
        }
        x
    }

    /// Solves (T − λI) y = b by Gaussian elimination with partial pivoting.
    fn shifted_solve(&self, lambda: f64, b: &[f64], eps: f64) -> Vec<f64> {
        let n = self.len();
        if n == 1 {
            let d = self.diag[0] - lambda;
            return vec![b[0] / if d.abs() < eps { eps } else { d }];
        }
        // Row i after elimination: u0[i]·y_i + u1[i]·y_{i+1} + u2[i]·y_{i+2}.
        let mut u0 = vec![0.0; n];
        let mut u1 = vec![0.0; n];
        let mut u2 = vec![0.0; n];
        let mut rhs = b.to_vec();
        let mut cur = [self.diag[0] - lambda, self.off[0], 0.0];
        for i in 0..n - 1 {
            let next_diag = self.diag[i + 1] - lambda;
            let next_off = if i + 1 < n - 1 { self.off[i + 1] } else { 0.0 };
            let sub = self.off[i];
            let mut next = [next_diag, next_off];
            if sub.abs() > cur[0].abs() {
                // Swap rows i and i+1.
                let row_i = [sub, next_diag, next_off];
                let row_n = [cur[0], cur[1], cur[2]];
                rhs.swap(i, i + 1);
                let m = row_n[0] / row_i[0];
                u0[i] = row_i[0];
                u1[i] = row_i[1];
                u2[i] = row_i[2];
                next = [row_n[1] - m * row_i[1], row_n[2] - m * row_i[2]];
                rhs[i + 1] -= m * rhs[i];
            } else {
                let piv = if cur[0].abs() < eps { eps } else { cur[0] };
                let m = sub / piv;
                u0[i] = piv;
                u1[i] = cur[1];
                u2[i] = cur[2];
                next = [next[0] - m * cur[1], next[1] - m * cur[2]];
                rhs[i + 1] -= m * rhs[i];
            }
            cur = [next[0], next[1], 0.0];
        }
        u0[n - 1] = if cur[0].abs() < eps { eps } else { cur[0] };
        let mut y = vec![0.0; n];
        for i in (0..n).rev() {
            let mut s = rhs[i];
            if i + 1 < n {
                s -= u1[i] * y[i + 1];
            }
            if i + 2 < n {
                s -= u2[i] * y[i + 2];
            }
            y[i] = s / u0[i];
        }
        y
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    #[test]
    fn laplacian_closed_form() {
        // tridiag(−1, 2, −1) of size n: 2 − 2cos(kπ/(n+1)).
        let n = 50;
        let t = SymTridiagonal::new(vec![2.0; n], vec![-1.0; n - 1]);
        let ev = t.lowest_eigenvalues(5);
        for (k, e) in ev.iter().enumerate() {
            let want = 2.0 - 2.0 * ((k + 1) as f64 * std::f64::consts::PI / (n + 1) as f64).cos();
            assert!((e - want).abs() < 1e-13);
        }
    }

    #[test]
    fn matches_dense_solver() {
        let n = 40;
        let diag: Vec<f64> = (0..n).map(|i| ((i * 7919) % 13) as f64 * 0.3 - 1.0).collect();
        let off: Vec<f64> = (0..n - 1).map(|i| 0.5 + ((i * 31) % 5) as f64 * 0.1).collect();
        let t = SymTridiagonal::new(diag.clone(), off.clone());
        let mut dense = DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            dense[(i, i)] = diag[i];
            if i + 1 < n {
                dense[(i, i + 1)] = off[i];
                dense[(i + 1, i)] = off[i];
            }
        }
        let mut want: Vec<f64> = dense.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
        want.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let got = t.lowest_eigenvalues(6);
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).abs() < 1e-12, "{g} vs {w}");
            let v = t.eigenvector(*g);
            let dv = nalgebra::DVector::from_vec(v.clone());
            let r = &dense * &dv - *g * &dv;
            assert!(r.norm() < 1e-10, "residual {}", r.norm());
        }
    }
}
