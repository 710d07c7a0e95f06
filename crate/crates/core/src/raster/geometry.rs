use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Oriented rectangle.
///
/// `angle` is in degrees, counter-clockwise as seen on screen (image y axis
/// points down), normalized to `[-45, 45)`. `size.0` is the extent along the
/// `angle` direction and `size.1` the extent perpendicular to it, so a
/// vertical text line comes back as `angle = 0` with `size.1 > size.0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RotatedRect {
    pub center: (f64, f64),
    pub size: (f64, f64),
    pub angle: f64,
}

impl RotatedRect {
    pub fn area(&self) -> f64 {
        self.size.0 * self.size.1
    }

    /// Direction of the longer side in degrees, in `(-90, 90]`.
    pub fn long_side_angle(&self) -> f64 {
        if self.size.0 >= self.size.1 {
            self.angle
        } else {
            let a = self.angle + 90.0;
            if a > 90.0 {
                a - 180.0
            } else {
                a
            }
        }
    }
}

fn cross(o: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// Convex hull by Andrew's monotone chain; collinear points are dropped.
pub fn convex_hull(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut pts: Vec<(f64, f64)> = points.to_vec();
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut lower: Vec<(f64, f64)> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<(f64, f64)> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Minimum-area enclosing rectangle via rotating calipers over the hull.
pub fn min_bounding_rect(points: &[(f64, f64)]) -> Result<RotatedRect> {
    if points.is_empty() {
        return Err(Error::invalid("min_bounding_rect needs at least one point"));
    }
    let hull = convex_hull(points);
    if hull.len() == 1 {
        return Ok(RotatedRect {
            center: hull[0],
            size: (0.0, 0.0),
            angle: 0.0,
        });
    }

    let mut best: Option<(f64, RotatedRect)> = None;
    let n = hull.len();
    for i in 0..n {
        let a = hull[i];
        let b = hull[(i + 1) % n];
        let (dx, dy) = (b.0 - a.0, b.1 - a.1);
        let len = (dx * dx + dy * dy).sqrt();
        if len == 0.0 {
            continue;
        }
        let u = (dx / len, dy / len);
        let v = (-u.1, u.0);
        let (mut u_min, mut u_max, mut v_min, mut v_max) =
            (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for &p in &hull {
            let pu = p.0 * u.0 + p.1 * u.1;
            let pv = p.0 * v.0 + p.1 * v.1;
            u_min = u_min.min(pu);
            u_max = u_max.max(pu);
            v_min = v_min.min(pv);
            v_max = v_max.max(pv);
        }
        let (w, h) = (u_max - u_min, v_max - v_min);
        let area = w * h;
        let cu = (u_min + u_max) / 2.0;
        let cv = (v_min + v_max) / 2.0;
        let center = (cu * u.0 + cv * v.0, cu * u.1 + cv * v.1);
        // Screen angle: image y grows downward.
        let angle = (-u.1).atan2(u.0).to_degrees();
        let rect = normalize(RotatedRect {
            center,
            size: (w, h),
            angle,
        });
        let better = match &best {
            None => true,
            Some((best_area, best_rect)) => {
                area < best_area - 1e-9
                    || ((area - best_area).abs() <= 1e-9 && rect.angle.abs() < best_rect.angle.abs())
            }
        };
        if better {
            best = Some((area, rect));
        }
    }
    Ok(best.map(|(_, r)| r).expect("hull with two or more points has an edge"))
}

fn normalize(mut r: RotatedRect) -> RotatedRect {
    while r.angle >= 45.0 {
        r.angle -= 90.0;
        r.size = (r.size.1, r.size.0);
    }
    while r.angle < -45.0 {
        r.angle += 90.0;
        r.size = (r.size.1, r.size.0);
    }
    // Snap float noise so axis-aligned input reports exactly 0.
    if r.angle.abs() < 1e-9 {
        r.angle = 0.0;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(w: usize, h: usize) -> Vec<(f64, f64)> {
        let mut v = Vec::new();
        for y in 0..h {
            for x in 0..w {
                v.push((x as f64, y as f64));
            }
        }
        v
    }

    fn rotate(points: &[(f64, f64)], deg: f64) -> Vec<(f64, f64)> {
        let n = points.len() as f64;
        let cx = points.iter().map(|p| p.0).sum::<f64>() / n;
        let cy = points.iter().map(|p| p.1).sum::<f64>() / n;
        let (s, c) = deg.to_radians().sin_cos();
        points
            .iter()
            .map(|&(x, y)| {
                let (dx, dy) = (x - cx, y - cy);
                // counter-clockwise on screen
                (cx + dx * c + dy * s, cy - dx * s + dy * c)
            })
            .collect()
    }

    #[test]
    fn axis_aligned_grid() {
        let r = min_bounding_rect(&grid(10, 4)).unwrap();
        assert_eq!(r.angle, 0.0);
        assert!((r.size.0 - 9.0).abs() < 1e-9 && (r.size.1 - 3.0).abs() < 1e-9, "{r:?}");
        assert!((r.center.0 - 4.5).abs() < 1e-9 && (r.center.1 - 1.5).abs() < 1e-9);
    }

    #[test]
    fn rotated_grid_recovers_angle() {
        let pts = rotate(&grid(10, 4), 30.0);
        let r = min_bounding_rect(&pts).unwrap();
        assert!((r.angle - 30.0).abs() < 1.0, "{r:?}");
        assert!((r.size.0 - 9.0).abs() < 0.5);
    }

    #[test]
    fn tall_input_reports_perpendicular_extent() {
        let r = min_bounding_rect(&grid(3, 12)).unwrap();
        assert_eq!(r.angle, 0.0);
        assert!(r.size.1 > r.size.0);
        assert!((r.long_side_angle() - 90.0).abs() < 1e-9);
    }

    #[test]
    fn single_point_and_empty() {
        let r = min_bounding_rect(&[(3.0, 4.0)]).unwrap();
        assert_eq!(r.size, (0.0, 0.0));
        assert_eq!(r.angle, 0.0);
        assert!(min_bounding_rect(&[]).is_err());
    }

    #[test]
    fn hull_drops_interior_points() {
        let h = convex_hull(&grid(5, 5));
        assert_eq!(h.len(), 4);
    }
}
