//! Monotone piecewise-cubic Hermite interpolation (Fritsch-Butland slopes).
//!
//! Used for CDF resampling in pushforwards and for quantile functions in the
//! circular W2 distance. Monotone data yields a monotone C^1 interpolant, so
//! derivatives of interpolated CDFs stay nonnegative.

/// Monotone C^1 piecewise-cubic interpolant of strictly increasing abscissae.
#[derive(Debug, Clone)]
pub(crate) struct MonotoneCubic {
    xs: Vec<f64>,
    ys: Vec<f64>,
    /// Node derivatives chosen so the interpolant preserves monotonicity.
    ds: Vec<f64>,
}

impl MonotoneCubic {
    /// Build from nodes with strictly increasing `xs` and nondecreasing `ys`,
    /// estimating slopes from the data (Fritsch-Butland).
    ///
    /// Panics if fewer than two nodes are given or `xs` is not strictly
    /// increasing; callers sanitize their data first.
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Self {
        let secants = secants(&xs, &ys);
        let n = xs.len();

        // Weighted harmonic mean of adjacent secants, zero where the secants
        // change sign or vanish.
        let mut ds = vec![0.0; n];
        ds[0] = secants[0];
        ds[n - 1] = secants[n - 2];
        for i in 1..n - 1 {
            let s0 = secants[i - 1];
            let s1 = secants[i];
            if s0 * s1 <= 0.0 {
                ds[i] = 0.0;
            } else {
                let h0 = xs[i] - xs[i - 1];
                let h1 = xs[i + 1] - xs[i];
                let w0 = 2.0 * h1 + h0;
                let w1 = h1 + 2.0 * h0;
                ds[i] = (w0 + w1) / (w0 / s0 + w1 / s1);
            }
        }

        MonotoneCubic { xs, ys, ds }
    }

    /// Build with prescribed node slopes (e.g. a CDF whose density is known
    /// at the nodes). Slopes are clamped into the Fritsch-Carlson monotone
    /// region `[0, 3 * adjacent secants]`; for consistent smooth data the
    /// clamp never engages and nodal derivatives reproduce exactly.
    pub fn with_slopes(xs: Vec<f64>, ys: Vec<f64>, mut ds: Vec<f64>) -> Self {
        let secants = secants(&xs, &ys);
        let n = xs.len();
        assert_eq!(ds.len(), n);
        for (i, d) in ds.iter_mut().enumerate() {
            let left = if i > 0 { secants[i - 1] } else { f64::INFINITY };
            let right = if i < n - 1 { secants[i] } else { f64::INFINITY };
            *d = d.max(0.0).min(3.0 * left.min(right).max(0.0));
        }
        MonotoneCubic { xs, ys, ds }
    }

    fn cell(&self, x: f64) -> usize {
        // partition_point returns the first index with xs[i] > x.
        let i = self.xs.partition_point(|&v| v <= x);
        i.clamp(1, self.xs.len() - 1) - 1
    }

    /// Interpolated value; clamps outside the node range.
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.xs.len();
        if x <= self.xs[0] {
            return self.ys[0];
        }
        if x >= self.xs[n - 1] {
            return self.ys[n - 1];
        }
        let i = self.cell(x);
        let h = self.xs[i + 1] - self.xs[i];
        let t = (x - self.xs[i]) / h;
        let (h00, h10, h01, h11) = hermite_basis(t);
        self.ys[i] * h00 + h * self.ds[i] * h10 + self.ys[i + 1] * h01 + h * self.ds[i + 1] * h11
    }

    /// Derivative of the interpolant; nonnegative for monotone data.
    pub fn deriv(&self, x: f64) -> f64 {
        let n = self.xs.len();
        let xq = x.clamp(self.xs[0], self.xs[n - 1]);
        let i = self.cell(xq);
        let h = self.xs[i + 1] - self.xs[i];
        let t = (xq - self.xs[i]) / h;
        let (d00, d10, d01, d11) = hermite_basis_deriv(t);
        (self.ys[i] * d00 + self.ys[i + 1] * d01) / h + self.ds[i] * d10 + self.ds[i + 1] * d11
    }
}

fn secants(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    assert!(xs.len() >= 2 && xs.len() == ys.len());
    xs.windows(2)
        .zip(ys.windows(2))
        .map(|(x, y)| {
            let dx = x[1] - x[0];
            assert!(dx > 0.0, "abscissae must be strictly increasing");
            (y[1] - y[0]) / dx
        })
        .collect()
}

fn hermite_basis(t: f64) -> (f64, f64, f64, f64) {
    let t2 = t * t;
    let t3 = t2 * t;
    (
        2.0 * t3 - 3.0 * t2 + 1.0,
        t3 - 2.0 * t2 + t,
        -2.0 * t3 + 3.0 * t2,
        t3 - t2,
    )
}

fn hermite_basis_deriv(t: f64) -> (f64, f64, f64, f64) {
    let t2 = t * t;
    (
        6.0 * t2 - 6.0 * t,
        3.0 * t2 - 4.0 * t + 1.0,
        -6.0 * t2 + 6.0 * t,
        3.0 * t2 - 2.0 * t,
    )
}
