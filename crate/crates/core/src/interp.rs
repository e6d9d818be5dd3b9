//! Local cubic interpolation of even functions tabulated on a uniform
//! half-line grid.
//!
//! Node `j` sits at `(j + offset) * step` with `offset` either `0` (node 0 at
//! the origin) or `0.5` (cell-centred grid). Values at negative positions are
//! taken from the mirror image, so the interpolant is exactly even and keeps
//! full order right up to the origin.

#[derive(Debug, Clone)]
pub struct EvenCubic {
    step: f64,
    offset: f64,
    values: Vec<f64>,
}

impl EvenCubic {
    /// `offset` must be `0.0` or `0.5`; at least four nodes are required.
    pub fn new(step: f64, offset: f64, values: Vec<f64>) -> Self {
        assert!(step > 0.0, "step must be positive");
        assert!(offset == 0.0 || offset == 0.5, "offset must be 0 or 1/2");
        assert!(values.len() >= 4, "need at least four nodes");
        Self {
            step,
            offset,
            values,
        }
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    /// Position of the last tabulated node.
    pub fn last_node(&self) -> f64 {
        (self.values.len() as f64 - 1.0 + self.offset) * self.step
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn at(&self, j: isize) -> f64 {
        let idx = if j >= 0 {
            j
        } else if self.offset == 0.0 {
            -j
        } else {
            -j - 1
        };
        self.values[idx as usize]
    }

    /// Evaluates the interpolant at `|x|`. Positions past the last node are
    /// extrapolated from the final four nodes.
    pub fn eval(&self, x: f64) -> f64 {
        let t = x.abs() / self.step - self.offset;
        let n = self.values.len() as isize;
        let mut i = t.floor() as isize;
        // Stencil i-1..=i+2 must stay within the table on the right.
        if i + 2 > n - 1 {
            i = n - 3;
        }
        let s = t - i as f64;
        let (f0, f1, f2, f3) = (self.at(i - 1), self.at(i), self.at(i + 1), self.at(i + 2));
        // Lagrange weights for nodes at -1, 0, 1, 2.
        let w0 = -s * (s - 1.0) * (s - 2.0) / 6.0;
        let w1 = (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0;
        let w2 = -(s + 1.0) * s * (s - 2.0) / 2.0;
        let w3 = (s + 1.0) * s * (s - 1.0) / 6.0;
        w0 * f0 + w1 * f1 + w2 * f2 + w3 * f3
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_even_cubics_exactly() {
        // x^2 is even and of degree < 4, so the interpolant is exact.
        for &offset in &[0.0, 0.5] {
            let step = 0.1;
            let vals: Vec<f64> = (0..40)
                .map(|j| {
                    let x = (j as f64 + offset) * step;
                    3.0 - 2.0 * x * x
                })
                .collect();
            let f = EvenCubic::new(step, offset, vals);
            for k in 0..200 {
                let x = -3.5 + 0.0351 * k as f64;
                assert!((f.eval(x) - (3.0 - 2.0 * x * x)).abs() < 1e-12, "x={x}");
            }
        }
    }

    #[test]
    fn fourth_order_on_smooth_function() {
        let err = |step: f64| {
            let vals: Vec<f64> = (0..(6.0 / step) as usize)
                .map(|j| (-(j as f64 * step).powi(2)).exp())
                .collect();
            let f = EvenCubic::new(step, 0.0, vals);
            (0..500)
                .map(|k| {
                    let x = 0.0107 * k as f64;
                    (f.eval(x) - (-x * x).exp()).abs()
                })
                .fold(0.0, f64::max)
        };
        let ratio = err(0.02) / err(0.01);
        assert!(ratio > 12.0, "ratio {ratio}");
    }
}
