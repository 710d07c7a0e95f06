//! Image-processing primitives: pixel grids, filtering, thresholding,
//! morphology, geometric fitting, rotation and edge detection.

pub mod canny;
pub mod filter;
pub mod geometry;
pub mod image;
pub mod morph;
pub mod ransac;
pub mod rotate;
pub mod threshold;

pub use canny::canny;
pub use filter::{median_filter, to_grayscale};
pub use geometry::{convex_hull, min_bounding_rect, RotatedRect};
pub use image::{BBox, BinaryImage, GrayImage, Image, RasterImage, Rgb};
pub use morph::{area_open, connected_components, default_min_area, Component, Connectivity};
pub use ransac::{ransac_circle, Circle};
pub use rotate::{resize_bilinear, rotate_image, rotate_nearest, rotate_quarter, Interpolate};
pub use threshold::{otsu_threshold, histogram, between_class_variance};
