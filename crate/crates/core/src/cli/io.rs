//! PGM (P2/P5) and CSV image I/O plus atomic file writes.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::phasemap::Image;

/// Reads a `.pgm` or `.csv` image, chosen by extension.
pub fn read_image(path: &Path) -> Result<Image> {
    let bytes = fs::read(path)?;
    match extension(path).as_deref() {
        Some("pgm") => parse_pgm(&bytes),
        Some("csv") => parse_csv(std::str::from_utf8(&bytes).map_err(|e| Error::Parse(e.to_string()))?),
        _ => Err(Error::Parse(format!(
            "{}: expected a .pgm or .csv image",
            path.display()
        ))),
    }
}

fn extension(path: &Path) -> Option<String> {
    path.extension()
        .and_then(|e| e.to_str())
        .map(|e| e.to_ascii_lowercase())
}

/// Header tokens with `#` comments stripped; returns the tokens and the byte
/// offset just past the last one consumed.
fn pgm_header(bytes: &[u8], count: usize) -> Result<(Vec<String>, usize)> {
    let mut tokens = Vec::new();
    let mut i = 0;
    while tokens.len() < count {
        while i < bytes.len() && bytes[i].is_ascii_whitespace() {
            i += 1;
        }
        if i >= bytes.len() {
            return Err(Error::Parse("truncated PGM header".into()));
        }
        if bytes[i] == b'#' {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        let start = i;
        while i < bytes.len() && !bytes[i].is_ascii_whitespace() {
            i += 1;
        }
        tokens.push(String::from_utf8_lossy(&bytes[start..i]).into_owned());
    }
    Ok((tokens, i))
}

pub fn parse_pgm(bytes: &[u8]) -> Result<Image> {
    let (header, end) = pgm_header(bytes, 4)?;
    let num = |s: &str, what: &str| -> Result<usize> {
        s.parse()
            .map_err(|_| Error::Parse(format!("bad PGM {what} `{s}`")))
    };
    let magic = header[0].as_str();
    let width = num(&header[1], "width")?;
    let height = num(&header[2], "height")?;
    let maxval = num(&header[3], "maxval")?;
    if maxval == 0 || maxval > 65535 {
        return Err(Error::Parse(format!("PGM maxval {maxval} out of range")));
    }
    let count = width * height;
    let pixels: Vec<f64> = match magic {
        "P2" => {
            let body = std::str::from_utf8(&bytes[end..])
                .map_err(|e| Error::Parse(format!("PGM body: {e}")))?;
            let values = body
                .lines()
                .map(|l| l.split('#').next().unwrap_or(""))
                .flat_map(str::split_whitespace)
                .map(|t| num(t, "sample"))
                .collect::<Result<Vec<_>>>()?;
            values.into_iter().map(|v| v as f64).collect()
        }
        "P5" => {
            // exactly one whitespace byte separates the header from raster data
            let data = bytes.get(end + 1..).unwrap_or_default();
            if maxval < 256 {
                data.iter().map(|b| *b as f64).collect()
            } else {
                data.chunks_exact(2)
                    .map(|c| u16::from_be_bytes([c[0], c[1]]) as f64)
                    .collect()
            }
        }
        other => return Err(Error::Parse(format!("unsupported PGM magic `{other}`"))),
    };
    if pixels.len() != count {
        return Err(Error::Parse(format!(
            "PGM declares {count} samples, found {}",
            pixels.len()
        )));
    }
    if let Some(i) = pixels.iter().position(|v| *v > maxval as f64) {
        return Err(Error::Parse(format!("sample {i} exceeds maxval {maxval}")));
    }
    let image = Image::new(width, height, pixels).map_err(|e| Error::Parse(e.to_string()))?;
    // power-of-two ranges give an exact bit depth
    let levels = maxval + 1;
    Ok(if levels.is_power_of_two() {
        image.with_bit_depth(levels.trailing_zeros())
    } else {
        image
    })
}

/// Rows of comma-separated decimals; blank lines and `#` comments ignored.
pub fn parse_csv(text: &str) -> Result<Image> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row = line
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Parse(format!("line {}: bad value `{}`", lineno + 1, t.trim())))
            })
            .collect::<Result<Vec<_>>>()?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(Error::Parse(format!(
                    "line {}: expected {} columns, got {}",
                    lineno + 1,
                    first.len(),
                    row.len()
                )));
            }
        }
        rows.push(row);
    }
    let height = rows.len();
    let width = rows.first().map_or(0, Vec::len);
    Image::new(width, height, rows.concat()).map_err(|e| Error::Parse(e.to_string()))
}

/// ASCII PGM. Samples are rounded and clamped to `[0, maxval]`.
pub fn to_pgm(width: usize, height: usize, values: &[f64], maxval: u32) -> String {
    let mut out = format!("P2\n{width} {height}\n{maxval}\n");
    for row in values.chunks(width.max(1)).take(height) {
        let line: Vec<String> = row
            .iter()
            .map(|v| (v.round().clamp(0.0, maxval as f64) as u32).to_string())
            .collect();
        let _ = writeln!(out, "{}", line.join(" "));
    }
    out
}

pub fn to_csv(width: usize, values: &[f64]) -> String {
    let mut out = String::new();
    for row in values.chunks(width.max(1)) {
        let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        let _ = writeln!(out, "{}", line.join(","));
    }
    out
}

/// Writes through a temporary file in the target directory and renames it
/// into place, so a failed run leaves no partial output.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}
