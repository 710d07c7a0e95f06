use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// The five chart classes handled by the pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChartType {
    Pie,
    #[serde(rename = "hbar")]
    HBar,
    #[serde(rename = "vbar")]
    VBar,
    #[serde(rename = "stacked_hbar")]
    StackedHBar,
    #[serde(rename = "stacked_vbar")]
    StackedVBar,
}

impl ChartType {
    pub const ALL: [ChartType; 5] = [
        ChartType::Pie,
        ChartType::HBar,
        ChartType::VBar,
        ChartType::StackedHBar,
        ChartType::StackedVBar,
    ];

    pub fn is_stacked(self) -> bool {
        matches!(self, ChartType::StackedHBar | ChartType::StackedVBar)
    }

    /// Bars grow along the x axis.
    pub fn is_horizontal(self) -> bool {
        matches!(self, ChartType::HBar | ChartType::StackedHBar)
    }

    pub fn is_bar(self) -> bool {
        self != ChartType::Pie
    }

    pub fn index(self) -> usize {
        Self::ALL.iter().position(|&t| t == self).unwrap()
    }

    pub fn key(self) -> &'static str {
        match self {
            ChartType::Pie => "pie",
            ChartType::HBar => "hbar",
            ChartType::VBar => "vbar",
            ChartType::StackedHBar => "stacked_hbar",
            ChartType::StackedVBar => "stacked_vbar",
        }
    }

    /// Human-readable class name used in report tables.
    pub fn display_name(self) -> &'static str {
        match self {
            ChartType::Pie => "Pie chart",
            ChartType::HBar => "Horizontal bar chart",
            ChartType::VBar => "Vertical bar chart",
            ChartType::StackedHBar => "Stacked horizontal bar chart",
            ChartType::StackedVBar => "Stacked vertical bar chart",
        }
    }

    pub fn with_orientation(horizontal: bool, stacked: bool) -> ChartType {
        match (horizontal, stacked) {
            (true, true) => ChartType::StackedHBar,
            (true, false) => ChartType::HBar,
            (false, true) => ChartType::StackedVBar,
            (false, false) => ChartType::VBar,
        }
    }
}

impl fmt::Display for ChartType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for ChartType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ChartType::ALL
            .into_iter()
            .find(|t| t.key().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::invalid(format!("unknown chart type {s:?}")))
    }
}

/// Text classes found on a chart.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TextRole {
    ChartTitle,
    XValue,
    YValue,
    XLabel,
    YLabel,
    PieLabel,
    Legend,
}

impl TextRole {
    pub const ALL: [TextRole; 7] = [
        TextRole::ChartTitle,
        TextRole::PieLabel,
        TextRole::Legend,
        TextRole::XLabel,
        TextRole::XValue,
        TextRole::YLabel,
        TextRole::YValue,
    ];

    pub fn key(self) -> &'static str {
        match self {
            TextRole::ChartTitle => "chart_title",
            TextRole::XValue => "x_value",
            TextRole::YValue => "y_value",
            TextRole::XLabel => "x_label",
            TextRole::YLabel => "y_label",
            TextRole::PieLabel => "pie_label",
            TextRole::Legend => "legend",
        }
    }

    pub fn display_name(self) -> &'static str {
        match self {
            TextRole::ChartTitle => "Chart title",
            TextRole::XValue => "X value",
            TextRole::YValue => "Y value",
            TextRole::XLabel => "X label",
            TextRole::YLabel => "Y label",
            TextRole::PieLabel => "Pie label",
            TextRole::Legend => "Legend",
        }
    }

    /// Whether this role can occur on a chart of the given type.
    pub fn allowed_on(self, chart: ChartType) -> bool {
        match self {
            TextRole::ChartTitle => true,
            TextRole::PieLabel => chart == ChartType::Pie,
            TextRole::Legend => chart == ChartType::Pie || chart.is_stacked(),
            TextRole::XValue | TextRole::YValue | TextRole::XLabel | TextRole::YLabel => {
                chart != ChartType::Pie
            }
        }
    }

    /// Roles of which a chart has at most one.
    pub fn is_singleton(self) -> bool {
        matches!(self, TextRole::ChartTitle | TextRole::XLabel | TextRole::YLabel)
    }
}

impl fmt::Display for TextRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chart_type_round_trips_through_json() {
        for t in ChartType::ALL {
            let s = serde_json::to_string(&t).unwrap();
            assert_eq!(s, format!("\"{}\"", t.key()));
            assert_eq!(serde_json::from_str::<ChartType>(&s).unwrap(), t);
            assert_eq!(t.key().parse::<ChartType>().unwrap(), t);
        }
    }

    #[test]
    fn role_keys_match_serde() {
        for r in TextRole::ALL {
            assert_eq!(serde_json::to_string(&r).unwrap(), format!("\"{}\"", r.key()));
        }
    }

    #[test]
    fn role_presence_rules() {
        assert!(TextRole::PieLabel.allowed_on(ChartType::Pie));
        assert!(!TextRole::PieLabel.allowed_on(ChartType::VBar));
        assert!(!TextRole::XValue.allowed_on(ChartType::Pie));
        assert!(TextRole::Legend.allowed_on(ChartType::StackedHBar));
        assert!(!TextRole::Legend.allowed_on(ChartType::HBar));
    }
}
