//! Binary PPM (P6) codec and conversion between 8-bit rasters and
//! [`PixelDataset`]s.

use std::io::Write;

use crate::error::{Error, PpmError, Result};
use crate::model::{CenterSet, Labeling, PixelDataset, COLOR_MAX};

/// An 8-bit RGB raster, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawImage {
    width: usize,
    height: usize,
    rgb8: Vec<u8>,
}

impl RawImage {
    pub fn new(width: usize, height: usize, rgb8: Vec<u8>) -> Result<Self> {
        let expected = width.checked_mul(height).and_then(|n| n.checked_mul(3));
        if width == 0 || height == 0 || expected != Some(rgb8.len()) {
            return Err(Error::InvalidArgument(format!(
                "{width}x{height} RGB image cannot hold {} bytes",
                rgb8.len()
            )));
        }
        Ok(Self { width, height, rgb8 })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.rgb8
    }

    pub fn pixel(&self, x: usize, y: usize) -> [u8; 3] {
        let i = 3 * (y * self.width + x);
        [self.rgb8[i], self.rgb8[i + 1], self.rgb8[i + 2]]
    }

    /// Number of distinct colors present.
    pub fn distinct_colors(&self) -> usize {
        let mut colors: Vec<[u8; 3]> =
            self.rgb8.chunks_exact(3).map(|p| [p[0], p[1], p[2]]).collect();
        colors.sort_unstable();
        colors.dedup();
        colors.len()
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn skip_whitespace_and_comments(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b.is_ascii_whitespace() {
                self.pos += 1;
            } else if b == b'#' {
                while let Some(&c) = self.bytes.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    fn header_number(&mut self) -> Result<u64, PpmError> {
        let start = self.pos;
        self.skip_whitespace_and_comments();
        if self.pos == start {
            return Err(PpmError::MalformedHeader("missing whitespace between header fields"));
        }
        let digits_start = self.pos;
        let mut value: u64 = 0;
        while let Some(&b) = self.bytes.get(self.pos) {
            if !b.is_ascii_digit() {
                break;
            }
            value = value
                .checked_mul(10)
                .and_then(|v| v.checked_add(u64::from(b - b'0')))
                .ok_or(PpmError::MalformedHeader("header number too large"))?;
            self.pos += 1;
        }
        if self.pos == digits_start {
            return Err(if self.pos >= self.bytes.len() {
                PpmError::MalformedHeader("header ended early")
            } else {
                PpmError::MalformedHeader("expected a decimal number")
            });
        }
        Ok(value)
    }
}

/// Decodes a binary PPM with maxval 255.
pub fn load_ppm(bytes: &[u8]) -> Result<RawImage, PpmError> {
    if !bytes.starts_with(b"P6") {
        return Err(PpmError::BadMagic);
    }
    let mut cur = Cursor { bytes, pos: 2 };
    let width = cur.header_number()?;
    let height = cur.header_number()?;
    let maxval = cur.header_number()?;
    if width == 0 || height == 0 {
        return Err(PpmError::InvalidDimensions { width, height });
    }
    if maxval != 255 {
        return Err(PpmError::UnsupportedMaxval(maxval));
    }
    let expected = usize::try_from(width)
        .ok()
        .zip(usize::try_from(height).ok())
        .and_then(|(w, h)| w.checked_mul(h))
        .and_then(|n| n.checked_mul(3))
        .ok_or(PpmError::InvalidDimensions { width, height })?;

    match bytes.get(cur.pos) {
        Some(b) if b.is_ascii_whitespace() => cur.pos += 1,
        Some(_) => return Err(PpmError::MalformedHeader("maxval must be followed by whitespace")),
        None => return Err(PpmError::TruncatedPayload { expected, actual: 0 }),
    }
    let payload = &bytes[cur.pos..];
    if payload.len() < expected {
        return Err(PpmError::TruncatedPayload { expected, actual: payload.len() });
    }
    Ok(RawImage {
        width: width as usize,
        height: height as usize,
        rgb8: payload[..expected].to_vec(),
    })
}

/// Encodes as `P6\n<w> <h>\n255\n` followed by the raw triples.
pub fn write_ppm(image: &RawImage) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", image.width, image.height).into_bytes();
    out.extend_from_slice(&image.rgb8);
    out
}

pub fn write_ppm_to<W: Write>(image: &RawImage, mut writer: W) -> std::io::Result<()> {
    writer.write_all(&write_ppm(image))?;
    writer.flush()
}

/// Converts to reals, optionally box-downscaling by the smallest integer
/// factor that brings the longer side to at most `max_side`.
///
/// Blocks that run past the right or bottom edge average only the pixels
/// they cover.
pub fn to_dataset(image: &RawImage, max_side: Option<usize>) -> Result<PixelDataset> {
    let factor = match max_side {
        Some(0) => return Err(Error::InvalidArgument("max_side must be positive".into())),
        Some(side) => image.width.max(image.height).div_ceil(side),
        None => 1,
    };
    if factor <= 1 {
        let data = image.rgb8.iter().map(|&b| f64::from(b)).collect();
        return PixelDataset::new(data, 3, image.width, image.height);
    }
    let out_w = image.width.div_ceil(factor);
    let out_h = image.height.div_ceil(factor);
    let mut data = Vec::with_capacity(out_w * out_h * 3);
    for by in 0..out_h {
        let rows = by * factor..((by + 1) * factor).min(image.height);
        for bx in 0..out_w {
            let cols = bx * factor..((bx + 1) * factor).min(image.width);
            let mut sum = [0u64; 3];
            for y in rows.clone() {
                for x in cols.clone() {
                    let px = image.pixel(x, y);
                    for c in 0..3 {
                        sum[c] += u64::from(px[c]);
                    }
                }
            }
            let count = (rows.len() * cols.len()) as f64;
            data.extend(sum.iter().map(|&s| s as f64 / count));
        }
    }
    PixelDataset::new(data, 3, out_w, out_h)
}

/// Renders each pixel as its cluster's prototype color, rounded half-up.
pub fn reconstruct_quantized(
    dataset: &PixelDataset,
    labels: &Labeling,
    centers: &CenterSet,
) -> Result<RawImage> {
    if dataset.dim() != 3 || centers.dim() != 3 {
        return Err(Error::InvalidArgument("quantized output requires RGB points".into()));
    }
    if labels.len() != dataset.len() {
        return Err(Error::InvalidArgument(format!(
            "{} labels for {} pixels",
            labels.len(),
            dataset.len()
        )));
    }
    let palette: Vec<[u8; 3]> = centers
        .iter()
        .map(|c| [to_byte(c[0]), to_byte(c[1]), to_byte(c[2])])
        .collect();
    let mut rgb8 = Vec::with_capacity(labels.len() * 3);
    for &l in labels.as_slice() {
        let color = palette.get(l).ok_or_else(|| {
            Error::InvalidArgument(format!("label {l} out of range for {} centers", palette.len()))
        })?;
        rgb8.extend_from_slice(color);
    }
    RawImage::new(dataset.width(), dataset.height(), rgb8)
}

fn to_byte(v: f64) -> u8 {
    (v + 0.5).floor().clamp(0.0, COLOR_MAX) as u8
}
