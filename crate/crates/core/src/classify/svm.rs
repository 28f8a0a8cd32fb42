//! Binary soft-margin SVM trained by sequential minimal optimization.
//!
//! The dual problem max sum a_i - 1/2 sum a_i a_j y_i y_j K_ij subject to
//! 0 <= a_i <= C and sum a_i y_i = 0 is solved two multipliers at a time.
//! The pair is the maximal violating pair: i maximizes y_i - u_i over the
//! index set still allowed to move up, j minimizes it over the set allowed
//! to move down, where u is the bias-free decision value. Optimality is
//! m - M <= tol, and the bias falls out of the final violation bounds as
//! b = (m + M) / 2. Selection is index-ordered, so training is
//! deterministic. The kernel is the inhomogeneous polynomial
//! K(x, z) = (x . z + 1)^d.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct SvmParams {
    /// Box constraint C.
    pub c: f64,
    /// Polynomial kernel degree.
    pub degree: u32,
    /// KKT tolerance.
    pub tol: f64,
    /// Cap on optimization sweeps (n pair updates each); 0 means 10x the
    /// training size.
    pub max_passes: usize,
}

impl Default for SvmParams {
    fn default() -> Self {
        Self {
            c: 1.0,
            degree: 3,
            tol: 1e-3,
            max_passes: 0,
        }
    }
}

/// Trained binary subproblem. Full multipliers and labels are kept so dual
/// feasibility can be audited after training.
#[derive(Debug, Clone)]
pub struct BinarySvm {
    pub points: Vec<Vec<f64>>,
    pub labels: Vec<f64>,
    pub alphas: Vec<f64>,
    pub bias: f64,
    pub degree: u32,
    pub c: f64,
}

#[inline]
fn poly_kernel(a: &[f64], b: &[f64], degree: u32) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    (dot + 1.0).powi(degree as i32)
}

impl BinarySvm {
    /// Trains on `points` with labels in {-1, +1}.
    pub fn train(points: Vec<Vec<f64>>, labels: Vec<f64>, params: &SvmParams) -> Result<Self> {
        let n = points.len();
        if n < 2 {
            return Err(Error::Parameter("SVM needs at least two points".into()));
        }
        if labels.len() != n {
            return Err(Error::Parameter("label count does not match point count".into()));
        }
        if labels.iter().any(|&y| y != 1.0 && y != -1.0) {
            return Err(Error::Parameter("SVM labels must be -1 or +1".into()));
        }
        if params.c <= 0.0 {
            return Err(Error::Parameter(format!("C must be positive, got {}", params.c)));
        }
        if params.degree == 0 {
            return Err(Error::Parameter("kernel degree must be at least 1".into()));
        }
        let sweeps = if params.max_passes == 0 {
            10 * n
        } else {
            params.max_passes
        };
        let max_updates = sweeps.saturating_mul(n);

        let kernel: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| poly_kernel(&points[i], &points[j], params.degree))
                    .collect()
            })
            .collect();

        let (alphas, bias) = {
            let mut solver = Solver {
                c: params.c,
                kernel: &kernel,
                labels: &labels,
                alphas: vec![0.0; n],
                margins: vec![0.0; n],
            };

            let mut updates = 0usize;
            let bias = loop {
                let Some((m, big_m)) = solver.violation_bounds() else {
                    // one side of the constraint set is empty
                    break 0.0;
                };
                if m.1 - big_m <= params.tol {
                    break (m.1 + big_m) / 2.0;
                }
                let j = solver.select_second(m.0, m.1);
                if !solver.optimize_pair(m.0, j) {
                    return Err(Error::Training(format!(
                        "SMO stalled with violation gap {} (n = {n}, C = {}, degree = {})",
                        m.1 - big_m,
                        params.c,
                        params.degree
                    )));
                }
                updates += 1;
                if updates > max_updates {
                    return Err(Error::Training(format!(
                        "SMO did not converge within {sweeps} sweeps (n = {n}, C = {}, degree = {})",
                        params.c, params.degree
                    )));
                }
            };
            (solver.alphas, bias)
        };

        Ok(BinarySvm {
            points,
            labels,
            alphas,
            bias,
            degree: params.degree,
            c: params.c,
        })
    }

    /// Decision value f(x); positive means the +1 class.
    pub fn decision(&self, x: &[f64]) -> f64 {
        let mut acc = self.bias;
        for i in 0..self.points.len() {
            if self.alphas[i] > 0.0 {
                acc += self.alphas[i] * self.labels[i] * poly_kernel(&self.points[i], x, self.degree);
            }
        }
        acc
    }

    /// sum a_i y_i, which the equality constraint pins to zero.
    pub fn equality_residual(&self) -> f64 {
        self.alphas
            .iter()
            .zip(&self.labels)
            .map(|(&a, &y)| a * y)
            .sum()
    }

    /// Worst KKT violation over the training set.
    pub fn kkt_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.points.len() {
            let margin = self.labels[i] * self.decision(&self.points[i]);
            let a = self.alphas[i];
            let v = if a <= 0.0 {
                (1.0 - margin).max(0.0)
            } else if a >= self.c {
                (margin - 1.0).max(0.0)
            } else {
                (margin - 1.0).abs()
            };
            worst = worst.max(v);
        }
        worst
    }

    /// Dual objective value at the trained multipliers.
    pub fn dual_objective(&self) -> f64 {
        let n = self.points.len();
        let mut obj: f64 = self.alphas.iter().sum();
        for i in 0..n {
            if self.alphas[i] == 0.0 {
                continue;
            }
            for j in 0..n {
                if self.alphas[j] == 0.0 {
                    continue;
                }
                obj -= 0.5
                    * self.alphas[i]
                    * self.alphas[j]
                    * self.labels[i]
                    * self.labels[j]
                    * poly_kernel(&self.points[i], &self.points[j], self.degree);
            }
        }
        obj
    }
}

struct Solver<'a> {
    c: f64,
    kernel: &'a [Vec<f64>],
    labels: &'a [f64],
    alphas: Vec<f64>,
    /// margins[t] = sum_j a_j y_j K_jt, the decision value without bias.
    margins: Vec<f64>,
}

impl Solver<'_> {
    /// Can alpha_t move so that y_t * alpha_t increases?
    fn in_up(&self, t: usize) -> bool {
        (self.labels[t] > 0.0 && self.alphas[t] < self.c)
            || (self.labels[t] < 0.0 && self.alphas[t] > 0.0)
    }

    fn in_low(&self, t: usize) -> bool {
        (self.labels[t] < 0.0 && self.alphas[t] < self.c)
            || (self.labels[t] > 0.0 && self.alphas[t] > 0.0)
    }

    /// Violation score: the bias each point wants; optimality squeezes the
    /// up-set maximum below the low-set minimum.
    #[inline]
    fn score(&self, t: usize) -> f64 {
        self.labels[t] - self.margins[t]
    }

    /// Violation bounds: ((i, m), M) where i attains m = max score over the
    /// up set and M is the minimum score over the low set. Optimality is
    /// m - M <= tol.
    fn violation_bounds(&self) -> Option<((usize, f64), f64)> {
        let n = self.alphas.len();
        let mut up: Option<(usize, f64)> = None;
        let mut low = f64::INFINITY;
        for t in 0..n {
            let v = self.score(t);
            if self.in_up(t) && up.map_or(true, |(_, best)| v > best) {
                up = Some((t, v));
            }
            if self.in_low(t) {
                low = low.min(v);
            }
        }
        let (i, m) = up?;
        if !low.is_finite() {
            return None;
        }
        Some(((i, m), low))
    }

    /// Second-order partner choice: among low-set points below m, maximize
    /// the objective gain (m - v_j)^2 / eta_ij. Avoids the zigzag of plain
    /// maximal-violating-pair selection on ill-conditioned kernels. Only
    /// called when m - M > tol, so a positive-gap candidate exists.
    fn select_second(&self, i: usize, m: f64) -> usize {
        let mut best: Option<(usize, f64)> = None;
        for t in 0..self.alphas.len() {
            if t == i || !self.in_low(t) {
                continue;
            }
            let gap = m - self.score(t);
            if gap <= 0.0 {
                continue;
            }
            let eta = (self.kernel[i][i] + self.kernel[t][t] - 2.0 * self.kernel[i][t]).max(1e-12);
            let gain = gap * gap / eta;
            if best.map_or(true, |(_, g)| gain > g) {
                best = Some((t, gain));
            }
        }
        best.expect("a violating partner exists when the gap exceeds tol").0
    }

    /// Joint update of the pair; reports whether any progress was made.
    fn optimize_pair(&mut self, i1: usize, i2: usize) -> bool {
        let (a1_old, a2_old) = (self.alphas[i1], self.alphas[i2]);
        let (y1, y2) = (self.labels[i1], self.labels[i2]);
        let s = y1 * y2;

        let (lo, hi) = if s < 0.0 {
            ((a2_old - a1_old).max(0.0), (self.c + a2_old - a1_old).min(self.c))
        } else {
            ((a1_old + a2_old - self.c).max(0.0), (a1_old + a2_old).min(self.c))
        };
        if hi - lo <= 0.0 {
            return false;
        }

        let k11 = self.kernel[i1][i1];
        let k12 = self.kernel[i1][i2];
        let k22 = self.kernel[i2][i2];
        let eta = k11 + k22 - 2.0 * k12;

        let e1 = self.margins[i1] - y1;
        let e2 = self.margins[i2] - y2;
        let mut a2 = if eta > 1e-12 {
            (a2_old + y2 * (e1 - e2) / eta).clamp(lo, hi)
        } else {
            // flat or concave direction: pick the better endpoint by the
            // exact dual objective change
            let delta = |t: f64| -> f64 {
                let d2 = t - a2_old;
                let d1 = -s * d2;
                d1 * y1 * self.margins[i1] + d2 * y2 * self.margins[i2]
                    + 0.5 * (d1 * d1 * k11 + d2 * d2 * k22)
                    + d1 * d2 * s * k12
                    - (d1 + d2)
            };
            let (dl, dh) = (delta(lo), delta(hi));
            if dl < dh - 1e-12 {
                lo
            } else if dh < dl - 1e-12 {
                hi
            } else {
                a2_old
            }
        };
        // snap to the box so bound states are exact
        if a2 - lo < 1e-10 {
            a2 = lo;
        } else if hi - a2 < 1e-10 {
            a2 = hi;
        }
        if (a2 - a2_old).abs() < 1e-12 {
            return false;
        }
        let mut a1 = a1_old + s * (a2_old - a2);
        if a1 < 1e-10 {
            a1 = 0.0;
        } else if a1 > self.c - 1e-10 {
            a1 = self.c;
        }

        let d1 = y1 * (a1 - a1_old);
        let d2 = y2 * (a2 - a2_old);
        self.alphas[i1] = a1;
        self.alphas[i2] = a2;
        for t in 0..self.alphas.len() {
            self.margins[t] += d1 * self.kernel[i1][t] + d2 * self.kernel[i2][t];
        }
        true
    }
}
