use crate::error::{Error, Result};
use crate::font::render_text;
use crate::raster::{
    connected_components, rotate_nearest, rotate_quarter, BBox, BinaryImage, Connectivity, Rgb,
};
use crate::types::{ChartType, TextRole};

use super::{ChartSpec, LegendPosition};

/// Minimum distance between glyph centers of two different text items, in
/// font cells.
const ITEM_SEPARATION_CELLS: f64 = 2.75;
/// Clearance between text ink and any non-text mark.
const MARK_CLEARANCE: i32 = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct PlacedText {
    pub string: String,
    pub role: TextRole,
    /// Counter-clockwise rotation in degrees.
    pub rotation: u32,
    /// Ink mask, tight to the glyph pixels.
    pub ink: BinaryImage,
    /// Canvas position of `ink`.
    pub bbox: BBox,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BarGeom {
    pub category: usize,
    pub series: usize,
    pub bbox: BBox,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PieGeom {
    pub center: (f64, f64),
    pub radius: f64,
    /// `(start, end)` clockwise degrees from 12 o'clock, one per category.
    pub wedges: Vec<(f64, f64)>,
}

/// Every element of a chart in canvas coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Layout {
    pub width: usize,
    pub height: usize,
    pub texts: Vec<PlacedText>,
    /// Interior of the plot frame (bar charts).
    pub plot: BBox,
    pub bars: Vec<BarGeom>,
    /// Spines and tick marks, drawn in the text color.
    pub strokes: Vec<BBox>,
    pub grid_lines: Vec<BBox>,
    pub legend_patches: Vec<(BBox, Rgb)>,
    pub pie: Option<PieGeom>,
}

impl Layout {
    fn shift(&mut self, dx: i32, dy: i32) {
        let mv = |b: &mut BBox| {
            b.x += dx;
            b.y += dy;
        };
        self.texts.iter_mut().for_each(|t| mv(&mut t.bbox));
        mv(&mut self.plot);
        self.bars.iter_mut().for_each(|b| mv(&mut b.bbox));
        self.strokes.iter_mut().for_each(mv);
        self.grid_lines.iter_mut().for_each(mv);
        self.legend_patches.iter_mut().for_each(|(b, _)| mv(b));
        if let Some(p) = &mut self.pie {
            p.center.0 += dx as f64;
            p.center.1 += dy as f64;
        }
    }

    fn extent(&self) -> BBox {
        let mut b = BBox::default();
        for t in &self.texts {
            b = b.union(&t.bbox);
        }
        for r in self.bars.iter().map(|g| &g.bbox).chain(&self.strokes).chain(&self.grid_lines) {
            b = b.union(r);
        }
        for (r, _) in &self.legend_patches {
            b = b.union(r);
        }
        if let Some(p) = &self.pie {
            b = b.union(&pie_box(p));
        }
        b
    }
}

fn pie_box(p: &PieGeom) -> BBox {
    let r = p.radius.ceil() as i32 + 1;
    BBox::new(p.center.0 as i32 - r, p.center.1 as i32 - r, 2 * r, 2 * r)
}

/// Ink mask of `text` at `scale`, rotated counter-clockwise by `rotation`
/// degrees and cropped to its ink.
pub fn text_ink(text: &str, scale: usize, rotation: u32) -> BinaryImage {
    let flat = render_text(text, scale);
    let rotated = match rotation {
        0 => flat,
        90 => rotate_quarter(&flat, 1),
        r => rotate_nearest(&flat, r as f64, false),
    };
    match rotated.foreground_bbox() {
        Some(b) => rotated.crop(b).expect("ink box inside image"),
        None => BinaryImage::filled(1, 1, false),
    }
}

fn place(string: &str, role: TextRole, rotation: u32, scale: usize, x: i32, y: i32) -> PlacedText {
    let ink = text_ink(string, scale, rotation);
    let bbox = BBox::new(x, y, ink.width() as i32, ink.height() as i32);
    PlacedText {
        string: string.to_string(),
        role,
        rotation,
        ink,
        bbox,
    }
}

fn ink_size(string: &str, scale: usize, rotation: u32) -> (i32, i32) {
    let ink = text_ink(string, scale, rotation);
    (ink.width() as i32, ink.height() as i32)
}

fn format_tick(v: f64) -> String {
    format!("{}", v.round() as i64)
}

struct Ctx<'a> {
    spec: &'a ChartSpec,
    s: usize,
    cell: i32,
    out: Layout,
}

impl<'a> Ctx<'a> {
    fn new(spec: &'a ChartSpec) -> Self {
        let s = spec.aesthetics.font_scale as usize;
        Ctx {
            spec,
            s,
            cell: 8 * s as i32,
            out: Layout {
                width: 0,
                height: 0,
                texts: Vec::new(),
                plot: BBox::default(),
                bars: Vec::new(),
                strokes: Vec::new(),
                grid_lines: Vec::new(),
                legend_patches: Vec::new(),
                pie: None,
            },
        }
    }

    fn text(&mut self, string: &str, role: TextRole, rotation: u32, x: i32, y: i32) -> BBox {
        let t = place(string, role, rotation, self.s, x, y);
        let b = t.bbox;
        self.out.texts.push(t);
        b
    }

    fn size(&self, string: &str, rotation: u32) -> (i32, i32) {
        ink_size(string, self.s, rotation)
    }

    /// Legend entries in a row centered on `cx` with their top at `y`.
    fn legend_row(&mut self, cx: i32, y: i32) {
        let patch = 7 * self.s as i32;
        let gap = 2 * self.s as i32;
        let spacing = 2 * self.cell;
        let names = self.legend_names();
        let widths: Vec<i32> = names.iter().map(|n| self.size(n, 0).0).collect();
        let total: i32 = widths.iter().map(|w| patch + gap + w).sum::<i32>() + spacing * (names.len() as i32 - 1);
        let mut x = cx - total / 2;
        for (i, name) in names.iter().enumerate() {
            let color = self.spec.aesthetics.colors[i];
            self.out.legend_patches.push((BBox::new(x, y, patch, patch), color));
            self.text(name, TextRole::Legend, 0, x + patch + gap, y);
            x += patch + gap + widths[i] + spacing;
        }
    }

    /// Legend entries stacked in a column with the top-left at `(x, y)`.
    fn legend_column(&mut self, x: i32, y: i32) {
        let patch = 7 * self.s as i32;
        let gap = 2 * self.s as i32;
        let names = self.legend_names();
        for (i, name) in names.iter().enumerate() {
            let color = self.spec.aesthetics.colors[i];
            let yy = y + i as i32 * 3 * self.cell;
            self.out.legend_patches.push((BBox::new(x, yy, patch, patch), color));
            self.text(name, TextRole::Legend, 0, x + patch + gap, yy);
        }
    }

    fn legend_names(&self) -> Vec<String> {
        if self.spec.chart_type == ChartType::Pie {
            self.spec.categories.clone()
        } else {
            self.spec.series.clone()
        }
    }

    fn title_above(&mut self, cx: i32, top_of_content: i32) {
        let a = &self.spec.aesthetics;
        let (w, h) = self.size(&self.spec.title, 0);
        let y = top_of_content - a.title_gap as i32 - h;
        let title = self.spec.title.clone();
        self.text(&title, TextRole::ChartTitle, 0, cx - w / 2, y);
    }

    fn top_of_content(&self) -> i32 {
        self.out.extent().y
    }

    fn right_of_content(&self) -> i32 {
        self.out.extent().right()
    }
}

/// Position every element of the chart, or fail when texts would collide.
pub fn layout(spec: &ChartSpec) -> Result<Layout> {
    spec.validate()?;
    let mut ctx = Ctx::new(spec);
    match spec.chart_type {
        ChartType::Pie => pie_layout(&mut ctx),
        t if t.is_horizontal() => bar_layout(&mut ctx, true),
        _ => bar_layout(&mut ctx, false),
    }
    let mut out = ctx.out;
    let ext = out.extent();
    let m = spec.aesthetics.margin as i32;
    out.shift(m - ext.x, m - ext.y);
    out.width = (ext.w + 2 * m) as usize;
    out.height = (ext.h + 2 * m) as usize;
    check_separation(&out, 8 * spec.aesthetics.font_scale as usize)?;
    Ok(out)
}

fn bar_layout(ctx: &mut Ctx, horizontal: bool) {
    let spec = ctx.spec;
    let a = &spec.aesthetics;
    let n = spec.categories.len() as i32;
    let pitch = a.category_pitch as i32;
    let bw = ((a.bar_width_frac * pitch as f64 / 2.0).round() as i32 * 2).max(4);
    let ppu = a.pixels_per_unit as i32;
    let value_len = (spec.axis_max() as i32) * ppu;
    let tl = a.tick_length as i32;
    let tgap = 2 * ctx.s as i32;
    let (plot_w, plot_h) = if horizontal { (value_len, n * pitch) } else { (n * pitch, value_len) };
    ctx.out.plot = BBox::new(0, 0, plot_w, plot_h);

    // Spines: left column -1, bottom row plot_h.
    ctx.out.strokes.push(BBox::new(-1, 0, 1, plot_h + 1));
    ctx.out.strokes.push(BBox::new(-1, plot_h, plot_w + 1, 1));
    if a.box_spines {
        ctx.out.strokes.push(BBox::new(-1, -1, plot_w + 2, 1));
        ctx.out.strokes.push(BBox::new(plot_w, -1, 1, plot_h + 2));
    }

    // Bars.
    for (ci, row) in spec.values.iter().enumerate() {
        let center = ci as i32 * pitch + pitch / 2;
        let mut cum = 0i32;
        for (si, v) in row.iter().enumerate() {
            let len = (v * ppu as f64).round() as i32;
            let bbox = if horizontal {
                BBox::new(cum, center - bw / 2, len, bw)
            } else {
                BBox::new(center - bw / 2, plot_h - cum - len, bw, len)
            };
            cum += len;
            if len > 0 {
                ctx.out.bars.push(BarGeom {
                    category: ci,
                    series: si,
                    bbox,
                });
            }
        }
    }

    let values: Vec<f64> = (0..a.tick_count).map(|i| (i * a.tick_step) as f64).collect();
    let mut bottom_labels: Vec<BBox> = Vec::new();
    let mut left_labels: Vec<BBox> = Vec::new();
    let rot = a.tick_rotation;

    // Value axis ticks and labels.
    for &v in &values {
        let p = (v as i32) * ppu;
        let s = format_tick(v);
        if horizontal {
            let x = p;
            ctx.out.strokes.push(BBox::new(x - 1, plot_h + 1, 2, tl));
            if a.grid && p > 0 {
                ctx.out.grid_lines.push(BBox::new(x, 0, 1, plot_h));
            }
            let (w, _) = ctx.size(&s, rot);
            bottom_labels.push(ctx.text(&s, TextRole::XValue, rot, x - w / 2, plot_h + 1 + tl + tgap));
        } else {
            let y = plot_h - p;
            ctx.out.strokes.push(BBox::new(-1 - tl, y - 1, tl, 2));
            if a.grid && p > 0 {
                ctx.out.grid_lines.push(BBox::new(0, y, plot_w, 1));
            }
            let (w, h) = ctx.size(&s, 0);
            left_labels.push(ctx.text(&s, TextRole::YValue, 0, -1 - tl - tgap - w, y - h / 2));
        }
    }

    // Category ticks and labels.
    for (ci, name) in spec.categories.iter().enumerate() {
        let c = ci as i32 * pitch + pitch / 2;
        if horizontal {
            ctx.out.strokes.push(BBox::new(-1 - tl, c - 1, tl, 2));
            let (w, h) = ctx.size(name, 0);
            left_labels.push(ctx.text(name, TextRole::YValue, 0, -1 - tl - tgap - w, c - h / 2));
        } else {
            ctx.out.strokes.push(BBox::new(c - 1, plot_h + 1, 2, tl));
            let (w, _) = ctx.size(name, rot);
            bottom_labels.push(ctx.text(name, TextRole::XValue, rot, c - w / 2, plot_h + 1 + tl + tgap));
        }
    }

    // Axis labels.
    let label_gap = a.label_gap as i32;
    if let Some(yl) = &spec.y_label {
        let (w, h) = ctx.size(yl, 90);
        let left = left_labels.iter().map(|b| b.x).min().unwrap_or(-1 - tl);
        ctx.text(yl, TextRole::YLabel, 90, left - label_gap - w, (plot_h - h) / 2);
    }
    if let Some(xl) = &spec.x_label {
        let (w, _) = ctx.size(xl, 0);
        let below = bottom_labels.iter().map(|b| b.bottom()).max().unwrap_or(plot_h + 1 + tl);
        ctx.text(xl, TextRole::XLabel, 0, plot_w / 2 - w / 2, below + label_gap);
    }

    // Legend, then title above everything.
    match a.legend {
        Some(LegendPosition::Top) => {
            let top = ctx.top_of_content();
            let patch = 7 * ctx.s as i32;
            ctx.legend_row(plot_w / 2, top - label_gap - patch);
        }
        Some(LegendPosition::Right) => {
            let x = ctx.right_of_content() + 2 * ctx.cell;
            ctx.legend_column(x, 0);
        }
        None => {}
    }
    let top = ctx.top_of_content();
    ctx.title_above(plot_w / 2, top);
}

fn pie_layout(ctx: &mut Ctx) {
    let spec = ctx.spec;
    let a = &spec.aesthetics;
    let r = a.pie_radius as f64;
    let total: f64 = spec.values.iter().map(|row| row[0]).sum();
    let mut wedges = Vec::new();
    let mut start = 0.0;
    for (i, row) in spec.values.iter().enumerate() {
        let end = if i + 1 == spec.values.len() { 360.0 } else { start + row[0] / total * 360.0 };
        wedges.push((start, end));
        start = end;
    }
    let gap = 2.0 * ctx.s as f64 + 6.0;
    for (i, name) in spec.categories.iter().enumerate() {
        let (s0, e0) = wedges[i];
        let phi = ((s0 + e0) / 2.0).to_radians();
        let (dx, dy) = (phi.sin(), -phi.cos());
        let (w, h) = ctx.size(name, 0);
        let dist = r + gap + 0.5 * (w as f64 * dx.abs() + h as f64 * dy.abs());
        let cx = dx * dist;
        let cy = dy * dist;
        ctx.text(name, TextRole::PieLabel, 0, (cx - w as f64 / 2.0).round() as i32, (cy - h as f64 / 2.0).round() as i32);
    }
    ctx.out.pie = Some(PieGeom {
        center: (0.0, 0.0),
        radius: r,
        wedges,
    });
    if a.legend.is_some() {
        let x = ctx.right_of_content() + 2 * ctx.cell;
        ctx.legend_column(x, -(r as i32));
    }
    let top = ctx.top_of_content();
    ctx.title_above(0, top);
}

fn glyph_centers(t: &PlacedText) -> Vec<(f64, f64)> {
    connected_components(&t.ink, Connectivity::Eight)
        .iter()
        .map(|c| {
            let (x, y) = c.centroid();
            (x + t.bbox.x as f64, y + t.bbox.y as f64)
        })
        .collect()
}

fn check_separation(out: &Layout, cell: usize) -> Result<()> {
    let min_d = ITEM_SEPARATION_CELLS * cell as f64;
    let centers: Vec<Vec<(f64, f64)>> = out.texts.iter().map(glyph_centers).collect();
    for i in 0..out.texts.len() {
        for j in i + 1..out.texts.len() {
            let (a, b) = (&out.texts[i].bbox, &out.texts[j].bbox);
            if a.gap(b) as f64 > min_d {
                continue;
            }
            for p in &centers[i] {
                for q in &centers[j] {
                    if (p.0 - q.0).hypot(p.1 - q.1) < min_d {
                        return Err(Error::invalid(format!(
                            "texts {:?} and {:?} too close",
                            out.texts[i].string, out.texts[j].string
                        )));
                    }
                }
            }
        }
    }
    let mut marks: Vec<BBox> = out.bars.iter().map(|b| b.bbox).collect();
    marks.extend(out.strokes.iter().copied());
    marks.extend(out.legend_patches.iter().map(|(b, _)| *b));
    for t in &out.texts {
        let tb = t.bbox.inflate(MARK_CLEARANCE);
        if marks.iter().any(|m| m.overlaps(&tb)) || out.plot.overlaps(&tb) {
            return Err(Error::invalid(format!("text {:?} overlaps a mark", t.string)));
        }
        if let Some(p) = &out.pie {
            let nx = (p.center.0).clamp(tb.x as f64, tb.right() as f64);
            let ny = (p.center.1).clamp(tb.y as f64, tb.bottom() as f64);
            if (nx - p.center.0).hypot(ny - p.center.1) < p.radius + 2.0 {
                return Err(Error::invalid(format!("text {:?} overlaps the pie", t.string)));
            }
        }
    }
    Ok(())
}
