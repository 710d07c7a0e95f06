use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::BinaryImage;
use crate::textdetect::AxisFrame;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
}

/// Linear map between pixel coordinates and chart units along one axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PixelScale {
    /// Chart units per pixel, always positive.
    pub ratio: f64,
    pub anchor_value: f64,
    pub anchor_px: f64,
    pub axis: Axis,
}

impl PixelScale {
    /// Chart value at pixel coordinate `px`. Values grow rightward on the x
    /// axis and upward on the y axis.
    pub fn value_at(&self, px: f64) -> f64 {
        let offset = match self.axis {
            Axis::X => px - self.anchor_px,
            Axis::Y => self.anchor_px - px,
        };
        self.anchor_value + offset * self.ratio
    }
}

pub fn pixels_to_value(px: f64, scale: &PixelScale) -> f64 {
    scale.value_at(px)
}

/// Parse a tick label such as `"40"`, `"-2.5"`, `"1,200"` or `"15%"`.
pub fn parse_number(s: &str) -> Option<f64> {
    let t = s.trim();
    let t = t.strip_suffix('%').unwrap_or(t).trim_end();
    let cleaned: String = t.chars().filter(|&c| c != ',').collect();
    if cleaned.is_empty() {
        return None;
    }
    cleaned.parse::<f64>().ok().filter(|v| v.is_finite())
}

/// Fit a scale from OCR'd tick labels given as `(text, centroid)` pairs,
/// the centroid being the coordinate along `axis`. Unparseable labels are
/// skipped; the ratio is the median over neighboring pairs, anchored at the
/// smallest value.
pub fn compute_pixel_scale<S: AsRef<str>>(ticks: &[(S, f64)], axis: Axis) -> Result<PixelScale> {
    let mut pts: Vec<(f64, f64, f64)> = ticks
        .iter()
        .filter_map(|(s, px)| {
            let u = match axis {
                Axis::X => *px,
                Axis::Y => -*px,
            };
            parse_number(s.as_ref()).map(|v| (u, v, *px))
        })
        .collect();
    if pts.len() < 2 {
        return Err(Error::ScaleUnavailable(format!("{} numeric ticks", pts.len())));
    }
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut ratios = Vec::with_capacity(pts.len() - 1);
    for w in pts.windows(2) {
        let (du, dv) = (w[1].0 - w[0].0, w[1].1 - w[0].1);
        if du <= 0.0 || dv <= 0.0 {
            return Err(Error::ScaleInconsistent(format!(
                "tick values {} and {} are not increasing along the axis",
                w[0].1, w[1].1
            )));
        }
        ratios.push(dv / du);
    }
    ratios.sort_by(f64::total_cmp);
    let m = ratios.len();
    let ratio = if m % 2 == 1 { ratios[m / 2] } else { (ratios[m / 2 - 1] + ratios[m / 2]) / 2.0 };
    let anchor = pts[0];
    Ok(PixelScale {
        ratio,
        anchor_value: anchor.1,
        anchor_px: anchor.2,
        axis,
    })
}

/// Centers of the tick marks hanging off an axis: runs of structure ink in
/// the column just left of the left axis (`Axis::Y`) or the row just below
/// the bottom axis (`Axis::X`).
pub fn tick_mark_centers(structure: &BinaryImage, frame: &AxisFrame, axis: Axis) -> Vec<f64> {
    let (len, probe): (usize, Box<dyn Fn(usize) -> bool>) = match axis {
        Axis::Y => {
            let x = frame.left - 1;
            if x < 0 {
                return Vec::new();
            }
            (structure.height(), Box::new(move |y| structure.get(x as usize, y)))
        }
        Axis::X => {
            let y = frame.bottom + 1;
            if y as usize >= structure.height() {
                return Vec::new();
            }
            (structure.width(), Box::new(move |x| structure.get(x, y as usize)))
        }
    };
    let mut out = Vec::new();
    let mut start = None;
    for i in 0..=len {
        let on = i < len && probe(i);
        match (on, start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                out.push((s + i) as f64 / 2.0);
                start = None;
            }
            _ => {}
        }
    }
    out
}

/// Move `center` onto the nearest mark within `tolerance`, if any.
pub fn snap_to_marks(center: f64, marks: &[f64], tolerance: f64) -> f64 {
    marks
        .iter()
        .copied()
        .filter(|m| (m - center).abs() <= tolerance)
        .min_by(|a, b| (a - center).abs().total_cmp(&(b - center).abs()))
        .unwrap_or(center)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_ticks_fifty_pixels_apart() {
        let s = compute_pixel_scale(&[("0", 10.0), ("10", 60.0)], Axis::X).unwrap();
        assert!((s.ratio - 0.2).abs() < 1e-12);
        assert_eq!((s.anchor_value, s.anchor_px), (0.0, 10.0));
    }

    #[test]
    fn equal_spacing_gives_the_common_ratio() {
        let ticks = [("0", 300.0), ("5", 250.0), ("10", 200.0), ("15", 150.0)];
        let s = compute_pixel_scale(&ticks, Axis::Y).unwrap();
        assert!((s.ratio - 0.1).abs() < 1e-12);
        assert!((s.value_at(100.0) - 20.0).abs() < 1e-9);
    }

    #[test]
    fn misread_tick_is_skipped() {
        let clean = [("0", 0.0), ("5", 40.0), ("10", 80.0), ("15", 120.0)];
        let faulty = [("0", 0.0), ("5", 40.0), ("1O", 80.0), ("15", 120.0)];
        let a = compute_pixel_scale(&clean, Axis::X).unwrap();
        let b = compute_pixel_scale(&faulty, Axis::X).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn one_corrupted_pair_is_outvoted() {
        let ticks = [("0", 0.0), ("5", 40.0), ("10", 80.0), ("15", 121.0), ("20", 160.0)];
        let s = compute_pixel_scale(&ticks, Axis::X).unwrap();
        assert!((s.ratio - 0.125).abs() < 1e-12);
    }

    #[test]
    fn too_few_ticks() {
        assert!(matches!(
            compute_pixel_scale(&[("5", 1.0), ("abc", 9.0)], Axis::X),
            Err(Error::ScaleUnavailable(_))
        ));
    }

    #[test]
    fn non_monotone_ticks() {
        assert!(matches!(
            compute_pixel_scale(&[("0", 0.0), ("10", 50.0), ("5", 100.0)], Axis::X),
            Err(Error::ScaleInconsistent(_))
        ));
    }

    #[test]
    fn value_conversion() {
        let s = PixelScale { ratio: 0.2, anchor_value: 0.0, anchor_px: 300.0, axis: Axis::Y };
        assert_eq!(pixels_to_value(300.0, &s), 0.0);
        assert!((pixels_to_value(200.0, &s) - 20.0).abs() < 1e-12);
    }

    #[test]
    fn number_formats() {
        assert_eq!(parse_number("40"), Some(40.0));
        assert_eq!(parse_number(" -2.5 "), Some(-2.5));
        assert_eq!(parse_number("1,200"), Some(1200.0));
        assert_eq!(parse_number("15%"), Some(15.0));
        assert_eq!(parse_number("1O"), None);
        assert_eq!(parse_number(""), None);
    }

    #[test]
    fn tick_runs_and_snapping() {
        let frame = AxisFrame { left: 5, bottom: 40, top: 0, right: 60 };
        let mut m = BinaryImage::filled(64, 48, false);
        for y in [9, 10, 29, 30] {
            m.set(4, y, true);
        }
        let centers = tick_mark_centers(&m, &frame, Axis::Y);
        assert_eq!(centers, vec![10.0, 30.0]);
        assert_eq!(snap_to_marks(10.5, &centers, 3.0), 10.0);
        assert_eq!(snap_to_marks(20.0, &centers, 3.0), 20.0);
    }
}
