use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Circle {
    pub center: (f64, f64),
    pub radius: f64,
    /// Fraction of input points within tolerance of the final circle.
    pub inlier_ratio: f64,
}

impl Circle {
    pub fn residual(&self, p: (f64, f64)) -> f64 {
        ((p.0 - self.center.0).hypot(p.1 - self.center.1) - self.radius).abs()
    }
}

/// Circumscribed circle of three points, `None` for (near-)collinear input.
pub fn circle_through(a: (f64, f64), b: (f64, f64), c: (f64, f64)) -> Option<((f64, f64), f64)> {
    let d = 2.0 * (a.0 * (b.1 - c.1) + b.0 * (c.1 - a.1) + c.0 * (a.1 - b.1));
    let scale = (b.0 - a.0).abs() + (b.1 - a.1).abs() + (c.0 - a.0).abs() + (c.1 - a.1).abs();
    if d.abs() <= 1e-9 * scale.max(1.0).powi(2) {
        return None;
    }
    let sa = a.0 * a.0 + a.1 * a.1;
    let sb = b.0 * b.0 + b.1 * b.1;
    let sc = c.0 * c.0 + c.1 * c.1;
    let ux = (sa * (b.1 - c.1) + sb * (c.1 - a.1) + sc * (a.1 - b.1)) / d;
    let uy = (sa * (c.0 - b.0) + sb * (a.0 - c.0) + sc * (b.0 - a.0)) / d;
    let r = (a.0 - ux).hypot(a.1 - uy);
    (r.is_finite() && r > 0.0).then_some(((ux, uy), r))
}

/// Algebraic (Kasa) least-squares circle fit.
pub fn fit_circle_lsq(points: &[(f64, f64)]) -> Option<((f64, f64), f64)> {
    if points.len() < 3 {
        return None;
    }
    // Center coordinates to keep the normal equations well conditioned.
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    // Solve [x y 1] . [D E F] = -(x^2 + y^2)
    let mut ata = [[0.0f64; 3]; 3];
    let mut atb = [0.0f64; 3];
    for &(px, py) in points {
        let (x, y) = (px - mx, py - my);
        let row = [x, y, 1.0];
        let rhs = -(x * x + y * y);
        for i in 0..3 {
            for j in 0..3 {
                ata[i][j] += row[i] * row[j];
            }
            atb[i] += row[i] * rhs;
        }
    }
    let sol = solve3(ata, atb)?;
    let (cx, cy) = (-sol[0] / 2.0, -sol[1] / 2.0);
    let r2 = cx * cx + cy * cy - sol[2];
    (r2 > 0.0).then(|| ((cx + mx, cy + my), r2.sqrt()))
}

fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let pivot = (col..3).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..3 {
            let f = a[row][col] / a[col][col];
            for k in col..3 {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let s: f64 = (row + 1..3).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Some(x)
}

/// Robust circle fit by random sample consensus.
///
/// Each iteration draws three distinct points, builds their circumcircle and
/// counts points within `tol` of it. The best consensus set is refit by
/// algebraic least squares. Identical inputs and seed give identical output.
pub fn ransac_circle(points: &[(f64, f64)], iterations: usize, tol: f64, seed: u64) -> Result<Circle> {
    if points.len() < 3 {
        return Err(Error::invalid(format!(
            "ransac_circle needs at least 3 points, got {}",
            points.len()
        )));
    }
    if iterations == 0 || !(tol > 0.0) {
        return Err(Error::invalid("ransac_circle needs iterations >= 1 and tol > 0"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = points.len();
    let mut best: Option<(usize, (f64, f64), f64)> = None;
    for _ in 0..iterations {
        let i = rng.random_range(0..n);
        let mut j = rng.random_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let mut k = rng.random_range(0..n - 2);
        for m in [i.min(j), i.max(j)] {
            if k >= m {
                k += 1;
            }
        }
        let Some((c, r)) = circle_through(points[i], points[j], points[k]) else {
            continue;
        };
        let count = points
            .iter()
            .filter(|p| ((p.0 - c.0).hypot(p.1 - c.1) - r).abs() <= tol)
            .count();
        if count >= 3 && best.is_none_or(|(b, _, _)| count > b) {
            best = Some((count, c, r));
        }
    }
    let (_, c, r) = best.ok_or_else(|| Error::FitFailure("no 3-point sample produced a circle".into()))?;

    let inliers: Vec<(f64, f64)> = points
        .iter()
        .copied()
        .filter(|p| ((p.0 - c.0).hypot(p.1 - c.1) - r).abs() <= tol)
        .collect();
    let (center, radius) = fit_circle_lsq(&inliers).unwrap_or((c, r));
    let mut circle = Circle {
        center,
        radius,
        inlier_ratio: 0.0,
    };
    let final_inliers = points.iter().filter(|&&p| circle.residual(p) <= tol).count();
    circle.inlier_ratio = final_inliers as f64 / n as f64;
    Ok(circle)
}
