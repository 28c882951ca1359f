//! Plain (P2) and raw (P5) PGM codec, 8-bit only.
//!
//! Pixel values are returned exactly as stored; a header `maxval` below 255
//! does not rescale them.

use super::GrayImage;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PgmFormat {
    /// P2
    Ascii,
    /// P5
    Binary,
}

const MAX_LINE: usize = 70;

struct Cursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_whitespace_and_comments(&mut self) {
        while self.pos < self.data.len() {
            let c = self.data[self.pos];
            if c == b'#' {
                while self.pos < self.data.len() && self.data[self.pos] != b'\n' {
                    self.pos += 1;
                }
            } else if c.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn token(&mut self) -> Option<&'a [u8]> {
        self.skip_whitespace_and_comments();
        let start = self.pos;
        while self.pos < self.data.len() && !self.data[self.pos].is_ascii_whitespace() {
            if self.data[self.pos] == b'#' {
                break;
            }
            self.pos += 1;
        }
        (self.pos > start).then(|| &self.data[start..self.pos])
    }

    fn header_number(&mut self, what: &str) -> Result<u32> {
        let tok = self
            .token()
            .ok_or_else(|| Error::PgmHeader(format!("missing {what}")))?;
        std::str::from_utf8(tok)
            .ok()
            .and_then(|s| s.parse::<u32>().ok())
            .ok_or_else(|| {
                Error::PgmHeader(format!("bad {what}: {:?}", String::from_utf8_lossy(tok)))
            })
    }
}

pub fn load_pgm(bytes: &[u8]) -> Result<GrayImage> {
    if bytes.len() < 2 {
        return Err(Error::PgmHeader("missing magic number".into()));
    }
    let format = match &bytes[..2] {
        b"P2" => PgmFormat::Ascii,
        b"P5" => PgmFormat::Binary,
        other => return Err(Error::PgmMagic(String::from_utf8_lossy(other).into_owned())),
    };
    let mut cur = Cursor {
        data: bytes,
        pos: 2,
    };
    if cur.pos < bytes.len() && !bytes[cur.pos].is_ascii_whitespace() && bytes[cur.pos] != b'#' {
        return Err(Error::PgmMagic(
            String::from_utf8_lossy(&bytes[..3]).into_owned(),
        ));
    }
    let width = cur.header_number("width")? as usize;
    let height = cur.header_number("height")? as usize;
    let maxval = cur.header_number("maxval")?;
    if width == 0 || height == 0 {
        return Err(Error::PgmHeader(format!("empty image {width}x{height}")));
    }
    if maxval == 0 {
        return Err(Error::PgmHeader("maxval must be positive".into()));
    }
    if maxval > 255 {
        return Err(Error::PgmMaxval(maxval));
    }
    let expected = width * height;

    let pixels = match format {
        PgmFormat::Binary => {
            // exactly one whitespace byte separates the header from the raster
            if cur.pos >= bytes.len() || !bytes[cur.pos].is_ascii_whitespace() {
                return Err(Error::PgmTruncated { expected, found: 0 });
            }
            let start = cur.pos + 1;
            let payload = &bytes[start..];
            if payload.len() < expected {
                return Err(Error::PgmTruncated {
                    expected,
                    found: payload.len(),
                });
            }
            let pixels = payload[..expected].to_vec();
            if let Some(&bad) = pixels.iter().find(|&&p| u32::from(p) > maxval) {
                return Err(Error::PgmHeader(format!(
                    "pixel {bad} exceeds maxval {maxval}"
                )));
            }
            pixels
        }
        PgmFormat::Ascii => {
            let mut pixels = Vec::with_capacity(expected);
            while pixels.len() < expected {
                let Some(tok) = cur.token() else {
                    return Err(Error::PgmTruncated {
                        expected,
                        found: pixels.len(),
                    });
                };
                let v = std::str::from_utf8(tok)
                    .ok()
                    .and_then(|s| s.parse::<u32>().ok())
                    .ok_or_else(|| {
                        Error::PgmHeader(format!(
                            "bad pixel value {:?}",
                            String::from_utf8_lossy(tok)
                        ))
                    })?;
                if v > maxval {
                    return Err(Error::PgmHeader(format!(
                        "pixel {v} exceeds maxval {maxval}"
                    )));
                }
                pixels.push(v as u8);
            }
            pixels
        }
    };
    GrayImage::new(width, height, pixels)
}

/// Encodes with maxval 255. ASCII output wraps lines at 70 characters.
pub fn save_pgm(image: &GrayImage, format: PgmFormat) -> Vec<u8> {
    let (w, h) = (image.width(), image.height());
    let mut out = Vec::with_capacity(w * h * 4 + 32);
    match format {
        PgmFormat::Binary => {
            out.extend_from_slice(format!("P5\n{w} {h}\n255\n").as_bytes());
            out.extend_from_slice(image.pixels());
        }
        PgmFormat::Ascii => {
            out.extend_from_slice(format!("P2\n{w} {h}\n255\n").as_bytes());
            for row in image.pixels().chunks(w) {
                let mut line = String::new();
                for p in row {
                    let tok = p.to_string();
                    if !line.is_empty() && line.len() + 1 + tok.len() > MAX_LINE {
                        out.extend_from_slice(line.as_bytes());
                        out.push(b'\n');
                        line.clear();
                    }
                    if !line.is_empty() {
                        line.push(' ');
                    }
                    line.push_str(&tok);
                }
                out.extend_from_slice(line.as_bytes());
                out.push(b'\n');
            }
        }
    }
    out
}
