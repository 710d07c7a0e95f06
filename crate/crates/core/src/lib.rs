pub mod alttext;
pub mod chartgen;
pub mod classify;
pub mod error;
pub mod eval;
pub mod extract;
pub mod font;
pub mod io;
pub mod ocr;
pub mod pipeline;
pub mod raster;
pub mod textdetect;
pub mod types;

pub use error::{Error, Result};
pub use types::{ChartType, TextRole};
