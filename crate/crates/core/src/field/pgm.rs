//! 8-bit grayscale PGM, binary (P5) and ASCII (P2).

use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    /// Row-major, row 0 at the top.
    data: Vec<u8>,
}

impl GrayImage {
    pub fn from_raw(width: usize, height: usize, data: Vec<u8>) -> Result<Self> {
        if data.len() != width * height {
            return Err(Error::InvalidArgument(format!(
                "{width}x{height} image needs {} bytes, got {}",
                width * height,
                data.len()
            )));
        }
        Ok(Self { width, height, data })
    }

    pub fn filled(width: usize, height: usize, value: u8) -> Self {
        Self { width, height, data: vec![value; width * height] }
    }

    /// Builds an image by sampling `f(x, y)` at pixel centers, with `x, y` in
    /// `[0, 1]` and `y` pointing up.
    pub fn from_fn(width: usize, height: usize, f: impl Fn(f64, f64) -> u8) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for row in 0..height {
            for col in 0..width {
                let x = (col as f64 + 0.5) / width as f64;
                let y = 1.0 - (row as f64 + 0.5) / height as f64;
                data.push(f(x, y));
            }
        }
        Self { width, height, data }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.data[row * self.width + col]
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }
}

fn bad(msg: impl Into<String>) -> Error {
    Error::Parse { line: 0, msg: format!("pgm: {}", msg.into()) }
}

struct Header<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Header<'_> {
    fn skip_space_and_comments(&mut self) {
        while self.pos < self.bytes.len() {
            match self.bytes[self.pos] {
                b'#' => {
                    while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                c if c.is_ascii_whitespace() => self.pos += 1,
                _ => break,
            }
        }
    }

    fn token(&mut self) -> Result<&str> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.pos < self.bytes.len() && !self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(bad("unexpected end of header"));
        }
        std::str::from_utf8(&self.bytes[start..self.pos]).map_err(|_| bad("non-ascii header"))
    }

    fn number(&mut self) -> Result<usize> {
        let t = self.token()?;
        t.parse().map_err(|_| bad(format!("bad header number {t:?}")))
    }
}

pub fn parse_pgm(bytes: &[u8]) -> Result<GrayImage> {
    let mut h = Header { bytes, pos: 0 };
    let magic = h.token()?.to_owned();
    let (width, height, maxval) = (h.number()?, h.number()?, h.number()?);
    if width == 0 || height == 0 {
        return Err(bad("zero-sized image"));
    }
    if maxval == 0 || maxval > 255 {
        return Err(bad(format!("maxval {maxval} is not 8-bit")));
    }
    let n = width * height;
    let mut data = match magic.as_str() {
        "P5" => {
            // exactly one whitespace byte separates the header from the raster
            let start = h.pos + 1;
            if bytes.len() < start + n {
                return Err(bad("truncated raster"));
            }
            bytes[start..start + n].to_vec()
        }
        "P2" => {
            let mut v = Vec::with_capacity(n);
            for _ in 0..n {
                let x = h.number()?;
                if x > maxval {
                    return Err(bad(format!("sample {x} above maxval")));
                }
                v.push(x as u8);
            }
            v
        }
        other => return Err(bad(format!("unsupported magic {other:?}"))),
    };
    if maxval != 255 {
        for px in &mut data {
            *px = ((*px as usize * 255 + maxval / 2) / maxval) as u8;
        }
    }
    GrayImage::from_raw(width, height, data)
}

pub fn read_pgm(path: impl AsRef<Path>) -> Result<GrayImage> {
    parse_pgm(&std::fs::read(path)?)
}

/// Writes binary P5 with maxval 255.
pub fn write_pgm<W: Write>(mut w: W, img: &GrayImage) -> Result<()> {
    write!(w, "P5\n{} {}\n255\n", img.width, img.height)?;
    w.write_all(&img.data)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binary_and_ascii_agree() {
        let p5 = b"P5\n# comment\n3 2\n255\n\x00\x10\x20\x30\x40\xff".to_vec();
        let p2 = b"P2 3 2 255\n0 16 32\n48 64 255\n".to_vec();
        let a = parse_pgm(&p5).unwrap();
        let b = parse_pgm(&p2).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.get(1, 2), 255);
    }

    #[test]
    fn write_then_parse() {
        let img = GrayImage::from_fn(5, 4, |x, y| ((x + y) * 100.0) as u8);
        let mut buf = Vec::new();
        write_pgm(&mut buf, &img).unwrap();
        assert_eq!(parse_pgm(&buf).unwrap(), img);
    }

    #[test]
    fn rejects_malformed() {
        assert!(parse_pgm(b"P6 1 1 255\n\x00\x00\x00").is_err());
        assert!(parse_pgm(b"P5 2 2 255\n\x00").is_err());
        assert!(parse_pgm(b"P2 1 1 65535\n7").is_err());
        assert!(parse_pgm(b"P2 2 1 15\n3 20").is_err());
    }

    #[test]
    fn rescales_small_maxval() {
        let img = parse_pgm(b"P2 2 1 15\n0 15").unwrap();
        assert_eq!(img.data(), &[0, 255]);
    }
}
