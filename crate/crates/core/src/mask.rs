//! Binary shape masks and their raster file formats.
//!
//! A [`ShapeMask`] is a row-major boolean grid where `true` marks the
//! segmented pattern. Pixel `(x, y)` has its center at the integer
//! coordinate `(x, y)`; `x` grows to the right and `y` grows downward.
//!
//! Masks are read from PGM (`P2`/`P5`) or PNG files. A pixel is foreground
//! when its gray value is at least half of the format's maximum (128 for
//! 8-bit images).

use std::fs;
use std::io::{BufReader, Read};
use std::path::Path;

use thiserror::Error;

/// Smallest accepted width/height for a [`ShapeMask`].
pub const MIN_SIDE: usize = 8;
/// Fewest foreground pixels a mask may have before it is considered degenerate.
pub const MIN_FOREGROUND: usize = 16;

#[derive(Debug, Error)]
pub enum MaskError {
    #[error("mask data has {got} cells, expected {width}x{height}")]
    DataLength {
        width: usize,
        height: usize,
        got: usize,
    },
    #[error("mask is {width}x{height}, both sides must be at least {MIN_SIDE}")]
    TooSmall { width: usize, height: usize },
    #[error("mask has {0} foreground pixels, at least {MIN_FOREGROUND} are required")]
    Degenerate(usize),
    #[error("mask has no foreground pixels")]
    EmptyMask,
    #[error("pixel scale must be positive and finite, got {0}")]
    PixelScale(f64),
    #[error("malformed image: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ShapeMask {
    width: usize,
    height: usize,
    data: Vec<bool>,
    pixel_scale: f64,
}

impl ShapeMask {
    /// Builds a mask and checks the size and foreground-count invariants.
    pub fn new(width: usize, height: usize, data: Vec<bool>) -> Result<Self, MaskError> {
        let mask = Self::raw(width, height, data)?;
        mask.validate()?;
        Ok(mask)
    }

    /// Builds a mask checking only that `data` matches the dimensions.
    ///
    /// Useful for intermediate rasters; [`ShapeMask::validate`] must pass
    /// before the mask is handed to the signature code.
    pub fn raw(width: usize, height: usize, data: Vec<bool>) -> Result<Self, MaskError> {
        if data.len() != width * height {
            return Err(MaskError::DataLength {
                width,
                height,
                got: data.len(),
            });
        }
        Ok(Self {
            width,
            height,
            data,
            pixel_scale: 1.0,
        })
    }

    pub fn from_fn(width: usize, height: usize, f: impl Fn(usize, usize) -> bool) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self {
            width,
            height,
            data,
            pixel_scale: 1.0,
        }
    }

    pub fn with_pixel_scale(mut self, meters_per_pixel: f64) -> Result<Self, MaskError> {
        if !(meters_per_pixel.is_finite() && meters_per_pixel > 0.0) {
            return Err(MaskError::PixelScale(meters_per_pixel));
        }
        self.pixel_scale = meters_per_pixel;
        Ok(self)
    }

    pub fn validate(&self) -> Result<(), MaskError> {
        if self.width < MIN_SIDE || self.height < MIN_SIDE {
            return Err(MaskError::TooSmall {
                width: self.width,
                height: self.height,
            });
        }
        let n = self.foreground_count();
        if n == 0 {
            return Err(MaskError::EmptyMask);
        }
        if n < MIN_FOREGROUND {
            return Err(MaskError::Degenerate(n));
        }
        Ok(())
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixel_scale(&self) -> f64 {
        self.pixel_scale
    }

    pub fn data(&self) -> &[bool] {
        &self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.data[y * self.width + x]
    }

    /// Foreground test that treats everything outside the grid as background.
    #[inline]
    pub fn get_signed(&self, x: i64, y: i64) -> bool {
        if x < 0 || y < 0 || x >= self.width as i64 || y >= self.height as i64 {
            return false;
        }
        self.data[y as usize * self.width + x as usize]
    }

    pub fn foreground_count(&self) -> usize {
        self.data.iter().filter(|&&b| b).count()
    }

    /// Iterates over the `(x, y)` coordinates of foreground pixels in row order.
    pub fn foreground(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let w = self.width;
        self.data
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(move |(i, _)| (i % w, i / w))
    }

    /// Inclusive bounding box `(x_min, y_min, x_max, y_max)` of the foreground.
    pub fn bounding_box(&self) -> Option<(usize, usize, usize, usize)> {
        let mut bbox: Option<(usize, usize, usize, usize)> = None;
        for (x, y) in self.foreground() {
            bbox = Some(match bbox {
                None => (x, y, x, y),
                Some((x0, y0, x1, y1)) => (x0.min(x), y0.min(y), x1.max(x), y1.max(y)),
            });
        }
        bbox
    }

    /// Bilinearly interpolated foreground coverage at a sub-pixel position.
    #[inline]
    pub fn coverage(&self, x: f64, y: f64) -> f64 {
        let x0 = x.floor();
        let y0 = y.floor();
        let fx = x - x0;
        let fy = y - y0;
        let (ix, iy) = (x0 as i64, y0 as i64);
        let v = |dx: i64, dy: i64| -> f64 {
            if self.get_signed(ix + dx, iy + dy) {
                1.0
            } else {
                0.0
            }
        };
        (1.0 - fy) * ((1.0 - fx) * v(0, 0) + fx * v(1, 0)) + fy * ((1.0 - fx) * v(0, 1) + fx * v(1, 1))
    }

    /// Number of 8-connected foreground components.
    pub fn component_count(&self) -> usize {
        let mut seen = vec![false; self.data.len()];
        let mut stack = Vec::new();
        let mut components = 0;
        for start in 0..self.data.len() {
            if !self.data[start] || seen[start] {
                continue;
            }
            components += 1;
            seen[start] = true;
            stack.push(start);
            while let Some(i) = stack.pop() {
                let (x, y) = ((i % self.width) as i64, (i / self.width) as i64);
                for dy in -1..=1 {
                    for dx in -1..=1 {
                        let (nx, ny) = (x + dx, y + dy);
                        if self.get_signed(nx, ny) {
                            let j = ny as usize * self.width + nx as usize;
                            if !seen[j] {
                                seen[j] = true;
                                stack.push(j);
                            }
                        }
                    }
                }
            }
        }
        components
    }

    /// Resamples the mask through an inverse affine map.
    ///
    /// `inverse` maps an output pixel center `(x, y)` to a source position;
    /// the output pixel is foreground when the bilinear coverage there is at
    /// least 0.5.
    pub fn resample(
        &self,
        width: usize,
        height: usize,
        inverse: impl Fn(f64, f64) -> (f64, f64),
    ) -> ShapeMask {
        let out = ShapeMask::from_fn(width, height, |x, y| {
            let (sx, sy) = inverse(x as f64, y as f64);
            self.coverage(sx, sy) >= 0.5
        });
        ShapeMask {
            pixel_scale: self.pixel_scale,
            ..out
        }
    }

    /// Encodes the mask as a binary PGM (`P5`, maxval 255).
    pub fn to_pgm(&self) -> Vec<u8> {
        let mut out = format!("P5\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend(self.data.iter().map(|&b| if b { 255u8 } else { 0 }));
        out
    }

    pub fn write_pgm(&self, path: impl AsRef<Path>) -> Result<(), MaskError> {
        fs::write(path, self.to_pgm())?;
        Ok(())
    }
}

/// Reads a mask from a `.pgm` or `.png` file, picking the decoder by the
/// file's magic bytes.
pub fn read_mask(path: impl AsRef<Path>) -> Result<ShapeMask, MaskError> {
    let bytes = fs::read(path.as_ref())?;
    if bytes.starts_with(b"\x89PNG") {
        decode_png(&bytes)
    } else {
        decode_pgm(&bytes)
    }
}

pub fn decode_pgm(bytes: &[u8]) -> Result<ShapeMask, MaskError> {
    let mut pos = 0usize;
    let magic = next_token(bytes, &mut pos)?;
    let binary = match magic.as_str() {
        "P5" => true,
        "P2" => false,
        other => return Err(MaskError::Format(format!("unsupported PGM magic {other:?}"))),
    };
    let width = parse_header_number(bytes, &mut pos, "width")?;
    let height = parse_header_number(bytes, &mut pos, "height")?;
    let maxval = parse_header_number(bytes, &mut pos, "maxval")?;
    if maxval == 0 || maxval > 65535 {
        return Err(MaskError::Format(format!("invalid maxval {maxval}")));
    }
    let n = width * height;
    let mut data = Vec::with_capacity(n);
    if binary {
        // exactly one whitespace byte separates the header from the raster
        pos += 1;
        let sample_bytes = if maxval < 256 { 1 } else { 2 };
        let raster = bytes
            .get(pos..pos + n * sample_bytes)
            .ok_or_else(|| MaskError::Format("truncated P5 raster".into()))?;
        for chunk in raster.chunks_exact(sample_bytes) {
            let v = if sample_bytes == 1 {
                chunk[0] as usize
            } else {
                u16::from_be_bytes([chunk[0], chunk[1]]) as usize
            };
            data.push(is_foreground(v, maxval));
        }
    } else {
        for _ in 0..n {
            let v = parse_header_number(bytes, &mut pos, "sample")?;
            data.push(is_foreground(v, maxval));
        }
    }
    ShapeMask::raw(width, height, data)
}

pub fn decode_png(bytes: &[u8]) -> Result<ShapeMask, MaskError> {
    let mut decoder = png::Decoder::new(std::io::Cursor::new(bytes));
    decoder.set_transformations(png::Transformations::EXPAND | png::Transformations::STRIP_16);
    let mut reader = decoder
        .read_info()
        .map_err(|e| MaskError::Format(e.to_string()))?;
    let size = reader
        .output_buffer_size()
        .ok_or_else(|| MaskError::Format("PNG too large".into()))?;
    let mut buf = vec![0u8; size];
    let info = reader
        .next_frame(&mut buf)
        .map_err(|e| MaskError::Format(e.to_string()))?;
    let (width, height) = (info.width as usize, info.height as usize);
    let channels = info.color_type.samples();
    let mut data = Vec::with_capacity(width * height);
    for y in 0..height {
        let row = &buf[y * info.line_size..y * info.line_size + width * channels];
        for px in row.chunks_exact(channels) {
            let gray = match channels {
                1 | 2 => px[0] as f64,
                _ => 0.299 * px[0] as f64 + 0.587 * px[1] as f64 + 0.114 * px[2] as f64,
            };
            data.push(gray >= 128.0);
        }
    }
    ShapeMask::raw(width, height, data)
}

/// Reads a PGM or PNG mask from any reader.
pub fn read_mask_from(mut reader: impl Read) -> Result<ShapeMask, MaskError> {
    let mut bytes = Vec::new();
    BufReader::new(&mut reader).read_to_end(&mut bytes)?;
    if bytes.starts_with(b"\x89PNG") {
        decode_png(&bytes)
    } else {
        decode_pgm(&bytes)
    }
}

fn is_foreground(value: usize, maxval: usize) -> bool {
    // 128 of 255; half of maxval in general
    2 * value > maxval
}

fn next_token(bytes: &[u8], pos: &mut usize) -> Result<String, MaskError> {
    loop {
        match bytes.get(*pos) {
            None => return Err(MaskError::Format("unexpected end of PGM header".into())),
            Some(b'#') => {
                while let Some(&c) = bytes.get(*pos) {
                    *pos += 1;
                    if c == b'\n' {
                        break;
                    }
                }
            }
            Some(c) if c.is_ascii_whitespace() => *pos += 1,
            Some(_) => break,
        }
    }
    let start = *pos;
    while let Some(c) = bytes.get(*pos) {
        if c.is_ascii_whitespace() {
            break;
        }
        *pos += 1;
    }
    Ok(String::from_utf8_lossy(&bytes[start..*pos]).into_owned())
}

fn parse_header_number(bytes: &[u8], pos: &mut usize, what: &str) -> Result<usize, MaskError> {
    let tok = next_token(bytes, pos)?;
    tok.parse()
        .map_err(|_| MaskError::Format(format!("bad PGM {what} {tok:?}")))
}
