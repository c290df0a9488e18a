//! Hives: concave functions on the lattice `[0, W] × [0, H]`, read through the
//! edge differences
//!
//! ```text
//! x_ij = f(i, j−1) − f(i−1, j−1)
//! y_ij = f(i−1, j−1) − f(i−1, j)
//! z_ij = f(i−1, j) − f(i, j−1)
//! ```
//!
//! so `x + y + z = 0` on every triangle. Concavity of the piecewise affine
//! interpolant is checked rhombus by rhombus across each interior edge.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default tolerance for hives given by exact formulas.
pub const EXACT_TOL: f64 = 1e-12;
/// Default tolerance for reconstructed data.
pub const RECONSTRUCTED_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Hive {
    pub width: usize,
    pub height: usize,
    /// `f(i, j)` stored at `i * (height + 1) + j`.
    values: Vec<f64>,
}

/// The three rhombus orientations around an interior edge.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Rhombus {
    /// `f(i−1,j) + f(i,j−1) − f(i−1,j−1) − f(i,j)`
    R1,
    /// `f(i,j) + f(i,j−1) − f(i−1,j) − f(i+1,j−1)`
    R2,
    /// `f(i−1,j) + f(i,j) − f(i,j−1) − f(i−1,j+1)`
    R3,
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RhombusSlack {
    pub kind: Rhombus,
    pub i: usize,
    pub j: usize,
    pub slack: f64,
}

impl Hive {
    pub fn from_fn(width: usize, height: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let values = (0..=width).flat_map(|i| (0..=height).map(move |j| (i, j))).map(|(i, j)| f(i, j)).collect();
        Hive { width, height, values }
    }

    pub fn zero(width: usize, height: usize) -> Self {
        Self::from_fn(width, height, |_, _| 0.0)
    }

    pub fn f(&self, i: usize, j: usize) -> f64 {
        assert!(i <= self.width && j <= self.height, "({i}, {j}) outside the hive");
        self.values[i * (self.height + 1) + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        assert!(i <= self.width && j <= self.height, "({i}, {j}) outside the hive");
        self.values[i * (self.height + 1) + j] = v;
    }

    pub fn x(&self, i: usize, j: usize) -> f64 {
        self.f(i, j - 1) - self.f(i - 1, j - 1)
    }

    pub fn y(&self, i: usize, j: usize) -> f64 {
        self.f(i - 1, j - 1) - self.f(i - 1, j)
    }

    pub fn z(&self, i: usize, j: usize) -> f64 {
        self.f(i - 1, j) - self.f(i, j - 1)
    }

    /// Rows `i, j, f, x, y, z` for `1 ≤ i ≤ W`, `1 ≤ j ≤ H`.
    pub fn csv(&self) -> String {
        let mut out = String::from("i,j,f,x,y,z\n");
        for i in 1..=self.width {
            for j in 1..=self.height {
                out += &format!("{i},{j},{},{},{},{}\n", self.f(i, j), self.x(i, j), self.y(i, j), self.z(i, j));
            }
        }
        out
    }
}

/// Every rhombus slack; the hive is concave iff all are `≥ −tol`.
pub fn rhombus_slacks(h: &Hive) -> Vec<RhombusSlack> {
    let f = |i, j| h.f(i, j);
    let mut out = Vec::new();
    for i in 1..=h.width {
        for j in 1..=h.height {
            let r1 = f(i - 1, j) + f(i, j - 1) - f(i - 1, j - 1) - f(i, j);
            out.push(RhombusSlack { kind: Rhombus::R1, i, j, slack: r1 });
            if i < h.width {
                let r2 = f(i, j) + f(i, j - 1) - f(i - 1, j) - f(i + 1, j - 1);
                out.push(RhombusSlack { kind: Rhombus::R2, i, j, slack: r2 });
            }
            if j < h.height {
                let r3 = f(i - 1, j) + f(i, j) - f(i, j - 1) - f(i - 1, j + 1);
                out.push(RhombusSlack { kind: Rhombus::R3, i, j, slack: r3 });
            }
        }
    }
    out
}

/// Largest rhombus violation (`0` for a concave hive).
pub fn max_violation(h: &Hive) -> f64 {
    rhombus_slacks(h).iter().map(|r| -r.slack).fold(0.0, f64::max)
}

/// Rebuilds `f` from bottom-edge differences `alpha` (`W` of them), left-edge
/// differences `beta` and the `z` grid, with `f(0, 0) = 0`.
///
/// Points are filled along anti-diagonals from the left edge using
/// `f(i, j−1) = f(i−1, j) − z_ij`, so `beta` needs `W + H` entries and `z`
/// needs `W` rows of `W + H` entries. The bottom edge is then determined
/// twice and must agree with `alpha` within `tol`.
pub fn hive_reconstruct(alpha: &[f64], beta: &[f64], z: &[Vec<f64>], tol: f64) -> Result<Hive> {
    let w = alpha.len();
    if beta.len() < w {
        return Err(Error::DimensionMismatch(format!("need at least {w} left-edge differences")));
    }
    let span = beta.len();
    let h = span - w;
    if z.len() != w || z.iter().any(|row| row.len() < span) {
        return Err(Error::DimensionMismatch(format!("z must have {w} rows of {span} entries")));
    }
    // full triangle i + j ≤ W + H, row-major with row length span + 1
    let mut g = vec![vec![f64::NAN; span + 1]; w + 1];
    g[0][0] = 0.0;
    for j in 1..=span {
        g[0][j] = g[0][j - 1] + beta[j - 1];
    }
    for i in 1..=w {
        for j in 0..=span - i {
            g[i][j] = g[i - 1][j + 1] - z[i - 1][j];
        }
    }
    let mut bottom = 0.0;
    for (i, &a) in alpha.iter().enumerate() {
        bottom += a;
        let got = g[i + 1][0];
        if (got - bottom).abs() > tol * (1.0 + bottom.abs()) {
            return Err(Error::Inconsistency(format!(
                "bottom edge at i = {}: z gives {got}, cumulative differences give {bottom}",
                i + 1
            )));
        }
    }
    Ok(Hive::from_fn(w, h, |i, j| g[i][j]))
}

/// `z_ij = ½[1/(i+j+1) − 1/(i+1)]`.
pub fn example_z(i: usize, j: usize) -> f64 {
    0.5 * (1.0 / (i + j + 1) as f64 - 1.0 / (i + 1) as f64)
}

/// `1/(i+2)`.
pub fn example_alpha(i: usize) -> f64 {
    1.0 / (i + 2) as f64
}

/// `1/(2(j+1))`, also used as the third sequence.
pub fn example_beta(j: usize) -> f64 {
    1.0 / (2 * (j + 1)) as f64
}

/// The explicit hive on a `W × H` window.
pub fn example_hive(width: usize, height: usize) -> Result<Hive> {
    if width == 0 || height == 0 {
        return Err(Error::Precondition("hive extents must be at least 1".into()));
    }
    let span = width + height;
    let alpha: Vec<f64> = (1..=width).map(example_alpha).collect();
    let beta: Vec<f64> = (1..=span).map(example_beta).collect();
    let z: Vec<Vec<f64>> = (1..=width).map(|i| (1..=span).map(|j| example_z(i, j)).collect()).collect();
    hive_reconstruct(&alpha, &beta, &z, EXACT_TOL)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HiveReport {
    pub width: usize,
    pub height: usize,
    pub max_rhombus_violation: f64,
    pub worst_rhombus: Option<RhombusSlack>,
    /// `max_i |x_{i,1} − α_i|` along the bottom row of edges.
    pub bottom_mismatch: f64,
    /// `max_j |y_{1,j} + β_j|` along the left column of edges.
    pub left_mismatch: f64,
    /// `max_i |z_{i,H} + γ_i|` at the top of the window.
    pub tail_gap: f64,
    pub alpha_dominates_beta: bool,
    pub tol: f64,
    pub pass: bool,
}

/// Checks a hive window against boundary data `α` (bottom), `β` (left) and
/// the tail condition `z_{i,j} → −γ_i`.
pub fn verify_continuous_lr(alpha: &[f64], beta: &[f64], gamma: &[f64], h: &Hive, tol: f64) -> HiveReport {
    let slacks = rhombus_slacks(h);
    let worst = slacks.iter().copied().min_by(|a, b| a.slack.total_cmp(&b.slack));
    let max_rhombus_violation = worst.map_or(0.0, |r| (-r.slack).max(0.0));
    let at = |v: &[f64], k: usize| v.get(k - 1).copied().unwrap_or(0.0);
    // the bottom and left edges of the window: x_{i,1} and y_{1,j}
    let bottom_mismatch = (1..=h.width).map(|i| (h.f(i, 0) - h.f(i - 1, 0) - at(alpha, i)).abs()).fold(0.0, f64::max);
    let left_mismatch = (1..=h.height).map(|j| (h.f(0, j - 1) - h.f(0, j) + at(beta, j)).abs()).fold(0.0, f64::max);
    let tail_gap = if h.height == 0 {
        0.0
    } else {
        (1..=h.width).map(|i| (h.z(i, h.height) + at(gamma, i)).abs()).fold(0.0, f64::max)
    };
    let n = alpha.len().max(beta.len());
    let alpha_dominates_beta = (1..=n).all(|k| at(alpha, k) >= at(beta, k) - tol);
    let pass = max_rhombus_violation <= tol && bottom_mismatch <= tol && left_mismatch <= tol && alpha_dominates_beta;
    HiveReport {
        width: h.width,
        height: h.height,
        max_rhombus_violation,
        worst_rhombus: worst,
        bottom_mismatch,
        left_mismatch,
        tail_gap,
        alpha_dominates_beta,
        tol,
        pass,
    }
}

/// The example sequences on the given window and its verification report.
pub fn verify_example(width: usize, height: usize, tol: f64) -> Result<HiveReport> {
    let h = example_hive(width, height)?;
    let alpha: Vec<f64> = (1..=width).map(example_alpha).collect();
    let beta: Vec<f64> = (1..=height).map(example_beta).collect();
    let gamma: Vec<f64> = (1..=width).map(example_beta).collect();
    Ok(verify_continuous_lr(&alpha, &beta, &gamma, &h, tol))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn affine_and_quadratic_slacks() {
        let h = Hive::from_fn(4, 3, |i, j| 2.0 * i as f64 - 0.5 * j as f64 + 7.0);
        assert!(rhombus_slacks(&h).iter().all(|r| r.slack.abs() < 1e-12));
        let q = Hive::from_fn(4, 4, |i, j| -((i * i + j * j) as f64) / 2.0);
        for r in rhombus_slacks(&q) {
            let want = if r.kind == Rhombus::R1 { 0.0 } else { 1.0 };
            assert!((r.slack - want).abs() < 1e-12, "{r:?}");
        }
    }

    #[test]
    fn reconstruct_small() {
        let h = hive_reconstruct(&[1.0], &[1.0], &[vec![0.0]], RECONSTRUCTED_TOL).unwrap();
        assert_eq!((h.width, h.height), (1, 0));
        assert_eq!((h.f(0, 0), h.f(1, 0)), (0.0, 1.0));
        assert!(matches!(hive_reconstruct(&[1.0], &[1.0], &[vec![5.0]], 1e-9), Err(Error::Inconsistency(_))));
    }

    #[test]
    fn example_values() {
        assert!((example_z(1, 1) + 1.0 / 12.0).abs() < 1e-15);
        assert!((example_z(3, 100_000) + 1.0 / 8.0).abs() < 1e-5);
        let h = example_hive(5, 4).unwrap();
        assert!((h.x(1, 1) - 1.0 / 3.0).abs() < 1e-14);
        for i in 1..=5 {
            for j in 1..=4 {
                assert!((h.z(i, j) - example_z(i, j)).abs() < 1e-12);
                assert_eq!(h.x(i, j) + h.y(i, j) + h.z(i, j), 0.0);
            }
        }
    }

    #[test]
    fn example_report() {
        let r = verify_example(60, 60, 1e-9).unwrap();
        assert!(r.pass, "{r:?}");
        assert!((r.tail_gap - 1.0 / 124.0).abs() < 1e-12);
        let zero = verify_continuous_lr(&[0.0; 3], &[0.0; 3], &[0.0; 3], &Hive::zero(3, 3), 1e-9);
        assert!(zero.pass && zero.tail_gap == 0.0);
    }

    #[test]
    fn perturbation_breaks_concavity() {
        let mut h = example_hive(6, 6).unwrap();
        h.set(3, 3, h.f(3, 3) + 1.0);
        let alpha: Vec<f64> = (1..=6).map(example_alpha).collect();
        let beta: Vec<f64> = (1..=6).map(example_beta).collect();
        let r = verify_continuous_lr(&alpha, &beta, &beta, &h, 1e-9);
        assert!(!r.pass && r.max_rhombus_violation > 0.5);
    }
}
