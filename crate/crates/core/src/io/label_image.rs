use std::fs::File;
use std::io::{BufWriter, Cursor, Write};
use std::path::Path;

use png::{BitDepth, ColorType, Transformations};

use crate::error::{GlasError, Result};
use crate::grid::{GrayImage, Grid};
use crate::labelmap::LabelMap;

const PNG_MAGIC: &[u8] = b"\x89PNG\r\n\x1a\n";

/// Decoded single-channel samples, before interpretation.
struct Samples {
    width: usize,
    height: usize,
    depth: u8,
    color: ColorType,
    values: Vec<u32>,
}

fn decode_png(bytes: &[u8], what: &str) -> Result<Samples> {
    let mut decoder = png::Decoder::new(Cursor::new(bytes));
    decoder.set_transformations(Transformations::IDENTITY);
    let mut reader = decoder
        .read_info()
        .map_err(|e| GlasError::Format(format!("{what}: {e}")))?;
    let info = reader.info();
    let (color, depth) = (info.color_type, info.bit_depth);
    match color {
        ColorType::Grayscale | ColorType::Indexed => {}
        ColorType::Rgb | ColorType::Rgba | ColorType::GrayscaleAlpha => {
            return Err(GlasError::Format(format!(
                "{what}: {color:?} PNG is not a single-channel image; convert it to 8/16-bit \
                 grayscale (pixel value = label) or a palette PNG first"
            )))
        }
    }
    let size = reader
        .output_buffer_size()
        .ok_or_else(|| GlasError::Format(format!("{what}: image too large")))?;
    let mut buf = vec![0u8; size];
    let frame = reader
        .next_frame(&mut buf)
        .map_err(|e| GlasError::Format(format!("{what}: {e}")))?;
    let (w, h) = (frame.width as usize, frame.height as usize);
    let bits = match depth {
        BitDepth::One => 1,
        BitDepth::Two => 2,
        BitDepth::Four => 4,
        BitDepth::Eight => 8,
        BitDepth::Sixteen => 16,
    };
    let mut values = Vec::with_capacity(w * h);
    for row in buf.chunks(frame.line_size).take(h) {
        match bits {
            16 => values.extend(
                row.chunks_exact(2)
                    .take(w)
                    .map(|b| u32::from(u16::from_be_bytes([b[0], b[1]]))),
            ),
            8 => values.extend(row.iter().take(w).map(|&b| u32::from(b))),
            _ => {
                let per_byte = 8 / bits;
                let mask = (1u8 << bits) - 1;
                values.extend((0..w).map(|x| {
                    let shift = 8 - bits * (1 + x % per_byte);
                    u32::from((row[x / per_byte] >> shift) & mask)
                }));
            }
        }
    }
    // with identity transformations palette images yield indices, never colours
    Ok(Samples {
        width: w,
        height: h,
        depth: bits as u8,
        color,
        values,
    })
}

/// Parses a whitespace-separated integer grid, one row per line. Blank lines
/// are ignored.
pub fn parse_text_grid(text: &str) -> Result<LabelMap> {
    let mut rows: Vec<Vec<i64>> = Vec::new();
    for (n, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let row = line
            .split_whitespace()
            .map(|tok| {
                tok.parse::<i64>().map_err(|_| {
                    GlasError::Value(format!("line {}: `{tok}` is not an integer label", n + 1))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    LabelMap::from_grid(&rows)
}

fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| GlasError::io(path, e))
}

/// Reads a label PNG from memory.
pub fn read_label_png(bytes: &[u8]) -> Result<LabelMap> {
    let s = decode_png(bytes, "label image")?;
    LabelMap::from_raw(s.width, s.height, s.values)
}

/// Loads a label image, detecting PNG by its signature and treating anything
/// else as a text grid.
pub fn load_label_image(path: impl AsRef<Path>) -> Result<LabelMap> {
    let path = path.as_ref();
    let bytes = read_bytes(path)?;
    let located = |e: GlasError| match e {
        GlasError::Format(m) => GlasError::Format(format!("{}: {m}", path.display())),
        GlasError::Value(m) => GlasError::Value(format!("{}: {m}", path.display())),
        other => other,
    };
    if bytes.starts_with(PNG_MAGIC) {
        return read_label_png(&bytes).map_err(located);
    }
    let text = std::str::from_utf8(&bytes).map_err(|_| {
        GlasError::Format(format!(
            "{}: neither a PNG nor a UTF-8 text grid",
            path.display()
        ))
    })?;
    parse_text_grid(text).map_err(located)
}

/// Loads a single-channel intensity image. 16-bit PNGs are reduced to their
/// high byte; sub-byte gray depths are scaled to the full 8-bit range. Text
/// grids must hold values in `0..=255`.
pub fn load_gray_image(path: impl AsRef<Path>) -> Result<GrayImage> {
    let path = path.as_ref();
    let bytes = read_bytes(path)?;
    if bytes.starts_with(PNG_MAGIC) {
        let s = decode_png(&bytes, &path.display().to_string())?;
        if s.color != ColorType::Grayscale {
            return Err(GlasError::Format(format!(
                "{}: palette PNG; supply a single grayscale channel",
                path.display()
            )));
        }
        let max = (1u32 << s.depth) - 1;
        let data = s
            .values
            .iter()
            .map(|&v| match s.depth {
                16 => (v >> 8) as u8,
                8 => v as u8,
                _ => (v * 255 / max) as u8,
            })
            .collect();
        return Grid::from_vec(s.width, s.height, data);
    }
    let text = std::str::from_utf8(&bytes)
        .map_err(|_| GlasError::Format(format!("{}: not a PNG or text grid", path.display())))?;
    let map = parse_text_grid(text)?;
    let data = map
        .labels()
        .iter()
        .map(|&v| {
            u8::try_from(v).map_err(|_| {
                GlasError::Value(format!("{}: intensity {v} exceeds 255", path.display()))
            })
        })
        .collect::<Result<Vec<u8>>>()?;
    Grid::from_vec(map.width(), map.height(), data)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| GlasError::io(path, e))
}

fn png_error(path: &Path, e: png::EncodingError) -> GlasError {
    match e {
        png::EncodingError::IoError(io) => GlasError::io(path, io),
        other => GlasError::Format(format!("{}: {other}", path.display())),
    }
}

/// Writes a 16-bit grayscale PNG whose pixel values are the labels.
pub fn write_label_png(map: &LabelMap, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    if let Some(o) = map
        .objects()
        .last()
        .filter(|o| o.label > u32::from(u16::MAX))
    {
        return Err(GlasError::Value(format!(
            "label {} does not fit a 16-bit PNG",
            o.label
        )));
    }
    if map.width() == 0 || map.height() == 0 {
        return Err(GlasError::Shape(
            "cannot write an empty image as PNG".into(),
        ));
    }
    let data: Vec<u8> = map
        .labels()
        .iter()
        .flat_map(|&l| (l as u16).to_be_bytes())
        .collect();
    let mut enc = png::Encoder::new(create(path)?, map.width() as u32, map.height() as u32);
    enc.set_color(ColorType::Grayscale);
    enc.set_depth(BitDepth::Sixteen);
    let mut writer = enc.write_header().map_err(|e| png_error(path, e))?;
    writer
        .write_image_data(&data)
        .map_err(|e| png_error(path, e))?;
    writer.finish().map_err(|e| png_error(path, e))
}

/// Writes an 8-bit grayscale PNG.
pub fn write_gray_png(image: &GrayImage, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    if image.width() == 0 || image.height() == 0 {
        return Err(GlasError::Shape(
            "cannot write an empty image as PNG".into(),
        ));
    }
    let mut enc = png::Encoder::new(create(path)?, image.width() as u32, image.height() as u32);
    enc.set_color(ColorType::Grayscale);
    enc.set_depth(BitDepth::Eight);
    let mut writer = enc.write_header().map_err(|e| png_error(path, e))?;
    writer
        .write_image_data(image.as_slice())
        .map_err(|e| png_error(path, e))?;
    writer.finish().map_err(|e| png_error(path, e))
}

/// Writes a label map as a text grid.
pub fn write_text_grid(map: &LabelMap, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut out = create(path)?;
    for row in map.to_rows() {
        let line: Vec<String> = row.iter().map(u32::to_string).collect();
        writeln!(out, "{}", line.join(" ")).map_err(|e| GlasError::io(path, e))?;
    }
    out.flush().map_err(|e| GlasError::io(path, e))
}
