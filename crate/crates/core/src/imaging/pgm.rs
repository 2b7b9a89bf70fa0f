//! Netpbm graymap (PGM) reading and writing.
//!
//! Both the ASCII (`P2`) and binary (`P5`) variants are read, with `maxval`
//! up to 255. Output is always `P5` with `maxval` 255.

use super::Image;
use crate::error::{Error, ParseErrorKind, Result};

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn err(&self, kind: ParseErrorKind) -> Error {
        Error::Parse { offset: self.pos, kind }
    }

    fn skip_whitespace_and_comments(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while let Some(&c) = self.bytes.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn token(&mut self) -> Result<&'a [u8]> {
        self.skip_whitespace_and_comments();
        let start = self.pos;
        while let Some(&b) = self.bytes.get(self.pos) {
            if b.is_ascii_whitespace() || b == b'#' {
                break;
            }
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err(ParseErrorKind::UnexpectedEof));
        }
        Ok(&self.bytes[start..self.pos])
    }

    /// Next decimal token and the byte offset where it starts.
    fn number(&mut self) -> Result<(u32, usize)> {
        let tok = self.token()?;
        let start = self.pos - tok.len();
        let value = std::str::from_utf8(tok).ok().and_then(|s| s.parse::<u32>().ok()).ok_or_else(|| {
            Error::Parse {
                offset: start,
                kind: ParseErrorKind::BadHeaderToken(String::from_utf8_lossy(tok).into_owned()),
            }
        })?;
        Ok((value, start))
    }
}

/// Decodes a `P2` or `P5` graymap. Pixels are copied verbatim, without
/// rescaling by `maxval`.
pub fn read_pgm(bytes: &[u8]) -> Result<Image> {
    let mut cur = Cursor { bytes, pos: 0 };
    let magic = cur.token()?;
    let binary = match magic {
        b"P5" => true,
        b"P2" => false,
        other => {
            return Err(Error::Parse {
                offset: 0,
                kind: ParseErrorKind::UnsupportedMagic(String::from_utf8_lossy(other).into_owned()),
            })
        }
    };
    let (width, width_offset) = cur.number()?;
    let (height, _) = cur.number()?;
    if width == 0 || height == 0 {
        return Err(Error::Parse { offset: width_offset, kind: ParseErrorKind::ZeroDimension });
    }
    let (width, height) = (width as usize, height as usize);
    let (maxval, maxval_offset) = cur.number()?;
    if maxval == 0 || maxval > 255 {
        return Err(Error::Parse { offset: maxval_offset, kind: ParseErrorKind::MaxvalOutOfRange(maxval) });
    }

    let count = width * height;
    let mut data = Vec::with_capacity(count);
    if binary {
        // Exactly one whitespace byte separates the header from the raster.
        match bytes.get(cur.pos) {
            Some(b) if b.is_ascii_whitespace() => cur.pos += 1,
            _ => return Err(cur.err(ParseErrorKind::UnexpectedEof)),
        }
        let raster = &bytes[cur.pos..];
        if raster.len() < count {
            return Err(Error::Parse { offset: bytes.len(), kind: ParseErrorKind::UnexpectedEof });
        }
        for (i, &b) in raster[..count].iter().enumerate() {
            if u32::from(b) > maxval {
                return Err(Error::Parse {
                    offset: cur.pos + i,
                    kind: ParseErrorKind::SampleOutOfRange(u32::from(b)),
                });
            }
            data.push(f64::from(b));
        }
    } else {
        for _ in 0..count {
            let (v, offset) = cur.number()?;
            if v > maxval {
                return Err(Error::Parse { offset, kind: ParseErrorKind::SampleOutOfRange(v) });
            }
            data.push(f64::from(v));
        }
    }
    Image::from_vec(height, width, data)
}

/// Encodes an image as binary `P5` with `maxval` 255. Each pixel is clamped
/// to `[0, 255]` and rounded to the nearest integer.
pub fn write_pgm(img: &Image) -> Vec<u8> {
    let header = format!("P5\n{} {}\n255\n", img.width(), img.height());
    let mut out = Vec::with_capacity(header.len() + img.len());
    out.extend_from_slice(header.as_bytes());
    out.extend(img.data().iter().map(|&p| p.clamp(0.0, 255.0).round() as u8));
    out
}
