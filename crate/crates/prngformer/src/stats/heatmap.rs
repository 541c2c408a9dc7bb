//! Bitstream visualization: the first width·height bits rendered
//! row-major as a binary P5 portable graymap, zero bits black and one
//! bits white. The byte layout is fully determined by the inputs, so
//! repeated exports of the same stream are identical files.

use std::path::Path;

use super::{BitStream, StatsError};
use crate::util::atomic_write;

/// Renders the P5 graymap bytes for the leading width·height bits.
pub fn heatmap_bytes(
    stream: &BitStream,
    width: usize,
    height: usize,
) -> Result<Vec<u8>, StatsError> {
    if width == 0 || height == 0 || width.saturating_mul(height) > stream.len() {
        return Err(StatsError::BadGeometry { width, height, length: stream.len() });
    }
    let mut bytes = format!("P5\n{width} {height}\n255\n").into_bytes();
    bytes.reserve(width * height);
    for i in 0..width * height {
        bytes.push(if stream.get(i) { 255 } else { 0 });
    }
    Ok(bytes)
}

/// Writes the graymap to `path` atomically.
pub fn heatmap_export(
    stream: &BitStream,
    width: usize,
    height: usize,
    path: &Path,
) -> Result<(), StatsError> {
    let bytes = heatmap_bytes(stream, width, height)?;
    atomic_write(path, &bytes)?;
    Ok(())
}
