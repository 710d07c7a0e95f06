//! Fixed English templates, one per chart type.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extract::{ChartData, DataMark};
use crate::types::ChartType;

pub const TEMPLATE_VERSION: &str = "1";
pub const DISCLAIMER: &str = "(All Values estimated)";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AltText {
    pub text: String,
    pub chart_type: ChartType,
    pub template_version: String,
}

/// Integers print bare, anything else with one decimal.
pub fn format_value(v: Option<f64>) -> String {
    match v {
        Some(v) if v.is_finite() => {
            if (v - v.round()).abs() <= 1e-6 {
                format!("{}", v.round() as i64)
            } else {
                format!("{v:.1}")
            }
        }
        _ => "unknown".to_string(),
    }
}

fn or_blank(s: &Option<String>) -> &str {
    s.as_deref().unwrap_or("")
}

fn pairs<'a>(marks: impl Iterator<Item = &'a DataMark>, name: impl Fn(&DataMark) -> &str) -> String {
    marks
        .map(|m| format!("{} = {}", name(m), format_value(m.value)))
        .collect::<Vec<_>>()
        .join(", ")
}

/// Marks grouped by category, categories in first-seen order.
fn by_category(data: &ChartData) -> Vec<(&str, Vec<&DataMark>)> {
    let mut out: Vec<(&str, Vec<&DataMark>)> = Vec::new();
    for m in &data.marks {
        match out.iter_mut().find(|(c, _)| *c == m.category) {
            Some((_, v)) => v.push(m),
            None => out.push((&m.category, vec![m])),
        }
    }
    out
}

pub fn describe(data: &ChartData) -> Result<AltText> {
    if data.marks.is_empty() {
        return Err(Error::invalid("alt-text needs at least one mark"));
    }
    let title = or_blank(&data.title);
    let (xl, yl) = (or_blank(&data.x_label), or_blank(&data.y_label));
    let text = match data.chart_type {
        ChartType::Pie => {
            let labels: Vec<&str> = data.marks.iter().map(|m| m.category.as_str()).collect();
            let shares: Vec<String> = data
                .marks
                .iter()
                .map(|m| format!("{}: {}%", m.category, format_value(m.value)))
                .collect();
            format!(
                "The pie chart depicts '{title}'. It has {} parts ({}) to it and percentage for each are {}. {DISCLAIMER}",
                data.marks.len(),
                labels.join(", "),
                shares.join(", ")
            )
        }
        ChartType::VBar => format!(
            "The vertical bar graph depicts '{title}'. The graph is plot between '{yl}' y axis over '{xl}' x axis. \
             The {yl} for the corresponding {xl} are {}. {DISCLAIMER}",
            pairs(data.marks.iter(), |m| &m.category)
        ),
        ChartType::HBar => format!(
            "The horizontal bar graph depicts '{title}'. The graph is plot between '{xl}' x-axis over '{yl}' y-axis. \
             The {xl} for the corresponding {yl} are {}. {DISCLAIMER}",
            pairs(data.marks.iter(), |m| &m.category)
        ),
        ChartType::StackedVBar | ChartType::StackedHBar => {
            let (value_label, category_label, value_axis, category_axis, kind) = if data.chart_type.is_horizontal() {
                (xl, yl, "x", "y", "horizontal")
            } else {
                (yl, xl, "y", "x", "vertical")
            };
            let groups: Vec<String> = by_category(data)
                .into_iter()
                .map(|(c, ms)| format!("({c} {})", pairs(ms.into_iter(), |m| m.series.as_deref().unwrap_or(""))))
                .collect();
            format!(
                "The stacked {kind} bar graph depicts '{title}'. The graph is plot between '{value_label}' {value_axis} axis \
                 over '{category_label}' {category_axis} axis for '({})'. The {value_label} for the corresponding \
                 {category_label} are {}. {DISCLAIMER}",
                data.series.join(", "),
                groups.join(", ")
            )
        }
    };
    Ok(AltText {
        text,
        chart_type: data.chart_type,
        template_version: TEMPLATE_VERSION.to_string(),
    })
}
