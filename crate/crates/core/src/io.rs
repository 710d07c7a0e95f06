//! PNG decode and encode.

use std::path::Path;

use crate::error::{Error, Result};
use crate::raster::{RasterImage, Rgb};

pub fn decode_png(bytes: &[u8]) -> Result<RasterImage> {
    let img = image::load_from_memory_with_format(bytes, image::ImageFormat::Png)
        .map_err(|e| Error::Decode(e.to_string()))?
        .to_rgb8();
    let (w, h) = img.dimensions();
    let pixels = img.pixels().map(|p| Rgb(p.0)).collect();
    RasterImage::new(w as usize, h as usize, pixels)
}

pub fn read_png(path: &Path) -> Result<RasterImage> {
    decode_png(&std::fs::read(path)?)
}

pub fn encode_png(img: &RasterImage) -> Result<Vec<u8>> {
    let raw: Vec<u8> = img.pixels().iter().flat_map(|p| p.0).collect();
    let buf = image::RgbImage::from_raw(img.width() as u32, img.height() as u32, raw)
        .ok_or_else(|| Error::invalid("pixel buffer does not match dimensions"))?;
    let mut out = Vec::new();
    buf.write_to(&mut std::io::Cursor::new(&mut out), image::ImageFormat::Png)
        .map_err(|e| Error::Decode(e.to_string()))?;
    Ok(out)
}

pub fn write_png(img: &RasterImage, path: &Path) -> Result<()> {
    std::fs::write(path, encode_png(img)?)?;
    Ok(())
}
