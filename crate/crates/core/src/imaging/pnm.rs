//! PGM/PPM codecs: ASCII P2/P3 and binary P5/P6, maxval 255 only.
//! Saving always emits the binary form so that a save/load round trip is
//! bit-exact.

use std::fs;
use std::io::Write;
use std::path::Path;

use super::{ColorImage, GrayImage, Image};
use crate::error::{Error, Result};

pub fn load_image<P: AsRef<Path>>(path: P) -> Result<Image> {
    let bytes = fs::read(path.as_ref())?;
    decode(&bytes)
}

pub fn save_image<P: AsRef<Path>>(image: &Image, path: P) -> Result<()> {
    match image {
        Image::Gray(g) => save_gray(g, path),
        Image::Color(c) => save_color(c, path),
    }
}

pub fn save_gray<P: AsRef<Path>>(image: &GrayImage, path: P) -> Result<()> {
    let mut out = Vec::with_capacity(image.data().len() + 32);
    write!(out, "P5\n{} {}\n255\n", image.width(), image.height())?;
    out.extend_from_slice(image.data());
    fs::write(path.as_ref(), out)?;
    Ok(())
}

pub fn save_color<P: AsRef<Path>>(image: &ColorImage, path: P) -> Result<()> {
    let mut out = Vec::with_capacity(image.data().len() + 32);
    write!(out, "P6\n{} {}\n255\n", image.width(), image.height())?;
    out.extend_from_slice(image.data());
    fs::write(path.as_ref(), out)?;
    Ok(())
}

fn decode(bytes: &[u8]) -> Result<Image> {
    let mut cursor = Cursor { bytes, pos: 0 };
    let magic = cursor.token("magic")?;
    let (color, ascii) = match magic.as_str() {
        "P2" => (false, true),
        "P3" => (true, true),
        "P5" => (false, false),
        "P6" => (true, false),
        other => {
            return Err(Error::Format(format!(
                "magic: expected P2/P3/P5/P6, got {other:?}"
            )))
        }
    };
    let width = cursor.number("width")?;
    let height = cursor.number("height")?;
    if width == 0 {
        return Err(Error::Format("width: must be at least 1".into()));
    }
    if height == 0 {
        return Err(Error::Format("height: must be at least 1".into()));
    }
    let maxval = cursor.number("maxval")?;
    if maxval != 255 {
        return Err(Error::Format(format!("maxval: must be 255, got {maxval}")));
    }
    let channels = if color { 3 } else { 1 };
    let expected = width * height * channels;

    let data = if ascii {
        let mut data = Vec::with_capacity(expected);
        for _ in 0..expected {
            let v = cursor.number("payload")?;
            if v > 255 {
                return Err(Error::Format(format!(
                    "payload: sample {v} exceeds maxval 255"
                )));
            }
            data.push(v as u8);
        }
        data
    } else {
        // Exactly one whitespace byte separates maxval from the payload.
        cursor.expect_single_whitespace()?;
        let rest = &bytes[cursor.pos..];
        if rest.len() < expected {
            return Err(Error::Format(format!(
                "payload: truncated, got {} bytes, expected {expected}",
                rest.len()
            )));
        }
        rest[..expected].to_vec()
    };

    if color {
        Ok(Image::Color(ColorImage::new(width, height, data)?))
    } else {
        Ok(Image::Gray(GrayImage::new(width, height, data)?))
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    /// Skips whitespace and `#` comments, then reads one token.
    fn token(&mut self, field: &str) -> Result<String> {
        loop {
            while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
                self.pos += 1;
            }
            if self.pos < self.bytes.len() && self.bytes[self.pos] == b'#' {
                while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                    self.pos += 1;
                }
                continue;
            }
            break;
        }
        let start = self.pos;
        while self.pos < self.bytes.len() && !self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::Format(format!("{field}: unexpected end of file")));
        }
        String::from_utf8(self.bytes[start..self.pos].to_vec())
            .map_err(|_| Error::Format(format!("{field}: not valid ASCII")))
    }

    fn number(&mut self, field: &str) -> Result<usize> {
        let tok = self.token(field)?;
        tok.parse::<usize>()
            .map_err(|_| Error::Format(format!("{field}: expected a number, got {tok:?}")))
    }

    fn expect_single_whitespace(&mut self) -> Result<()> {
        if self.pos >= self.bytes.len() || !self.bytes[self.pos].is_ascii_whitespace() {
            return Err(Error::Format(
                "payload: missing whitespace after maxval".into(),
            ));
        }
        self.pos += 1;
        Ok(())
    }
}
