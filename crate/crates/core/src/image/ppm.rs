//! Binary PPM (P6, maxval 255) reader and writer.

use std::fs;
use std::path::Path;

use super::ImageF32;
use crate::error::{Error, Result};

pub fn load_ppm(path: impl AsRef<Path>) -> Result<ImageF32> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_ppm(&bytes)
}

pub fn save_ppm(img: &ImageF32, path: impl AsRef<Path>) -> Result<()> {
    let bytes = encode_ppm(img)?;
    let path = path.as_ref();
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// Writes the canonical `P6\n<w> <h>\n255\n` header followed by interleaved
/// RGB bytes. Samples are quantized with `round(s * 255)`, half away from zero.
pub fn encode_ppm(img: &ImageF32) -> Result<Vec<u8>> {
    if img.channels() != 3 {
        return Err(Error::GrayscaleUnsupported);
    }
    let header = format!("P6\n{} {}\n255\n", img.width(), img.height());
    let n = img.pixel_count();
    let mut out = Vec::with_capacity(header.len() + 3 * n);
    out.extend_from_slice(header.as_bytes());
    let (r, g, b) = (img.channel(0), img.channel(1), img.channel(2));
    for i in 0..n {
        out.extend_from_slice(&[quantize(r[i]), quantize(g[i]), quantize(b[i])]);
    }
    Ok(out)
}

#[inline]
fn quantize(s: f32) -> u8 {
    // f64::round rounds half away from zero
    (s as f64 * 255.0).round().clamp(0.0, 255.0) as u8
}

pub fn decode_ppm(bytes: &[u8]) -> Result<ImageF32> {
    let mut cursor = Cursor { bytes, pos: 0 };
    let magic = cursor.token()?;
    if magic != b"P6" {
        return Err(Error::MalformedHeader(format!(
            "magic {:?} is not P6",
            String::from_utf8_lossy(magic)
        )));
    }
    let width = cursor.number("width")?;
    let height = cursor.number("height")?;
    let maxval = cursor.number("maxval")?;
    if width == 0 || height == 0 {
        return Err(Error::MalformedHeader(format!("zero dimension {width}x{height}")));
    }
    if maxval != 255 {
        return Err(Error::UnsupportedMaxval(maxval));
    }
    // exactly one whitespace byte separates maxval from the payload
    match cursor.bytes.get(cursor.pos) {
        Some(b) if b.is_ascii_whitespace() => cursor.pos += 1,
        _ => return Err(Error::MalformedHeader("missing whitespace after maxval".into())),
    }

    let (width, height) = (width as usize, height as usize);
    let n = width * height;
    let payload = &bytes[cursor.pos..];
    if payload.len() < 3 * n {
        return Err(Error::TruncatedPayload { expected: 3 * n, found: payload.len() });
    }
    let mut samples = vec![0.0f32; 3 * n];
    for (i, px) in payload[..3 * n].chunks_exact(3).enumerate() {
        for c in 0..3 {
            samples[c * n + i] = px[c] as f32 / 255.0;
        }
    }
    ImageF32::new(width, height, 3, samples)
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_separators(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b.is_ascii_whitespace() {
                self.pos += 1;
            } else if b == b'#' {
                while let Some(&c) = self.bytes.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    fn token(&mut self) -> Result<&'a [u8]> {
        self.skip_separators();
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(|b| !b.is_ascii_whitespace()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::MalformedHeader("unexpected end of header".into()));
        }
        Ok(&self.bytes[start..self.pos])
    }

    fn number(&mut self, what: &str) -> Result<u32> {
        let tok = self.token()?;
        std::str::from_utf8(tok)
            .ok()
            .filter(|s| s.bytes().all(|b| b.is_ascii_digit()))
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| {
                Error::MalformedHeader(format!("{what} {:?} is not numeric", String::from_utf8_lossy(tok)))
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p6(header: &str, payload: &[u8]) -> Vec<u8> {
        let mut v = header.as_bytes().to_vec();
        v.extend_from_slice(payload);
        v
    }

    #[test]
    fn single_red_pixel() {
        let img = decode_ppm(&p6("P6\n1 1\n255\n", &[255, 0, 0])).unwrap();
        assert_eq!((img.width(), img.height(), img.channels()), (1, 1, 3));
        assert_eq!(img.samples(), &[1.0, 0.0, 0.0]);
    }

    #[test]
    fn two_pixels_planar() {
        let img = decode_ppm(&p6("P6\n2 1\n255\n", &[0, 0, 0, 255, 255, 255])).unwrap();
        assert_eq!(img.channel(0), &[0.0, 1.0]);
        assert_eq!(img.channel(1), &[0.0, 1.0]);
        assert_eq!(img.channel(2), &[0.0, 1.0]);
    }

    #[test]
    fn truncated_payload() {
        let err = decode_ppm(&p6("P6\n4 4\n255\n", &[0; 10])).unwrap_err();
        assert!(matches!(err, Error::TruncatedPayload { expected: 48, found: 10 }));
    }

    #[test]
    fn header_errors() {
        assert!(matches!(decode_ppm(b"P5\n1 1\n255\n\0"), Err(Error::MalformedHeader(_))));
        assert!(matches!(decode_ppm(b"P6\nx 1\n255\n\0\0\0"), Err(Error::MalformedHeader(_))));
        assert!(matches!(decode_ppm(b"P6\n1 1\n65535\n\0\0\0"), Err(Error::UnsupportedMaxval(65535))));
        assert!(matches!(decode_ppm(b"P6\n1"), Err(Error::MalformedHeader(_))));
    }

    #[test]
    fn lenient_separators_on_read() {
        let img = decode_ppm(&p6("P6 # comment\n 1\t1  255\n", &[1, 2, 3])).unwrap();
        assert_eq!(img.samples(), &[1.0 / 255.0, 2.0 / 255.0, 3.0 / 255.0]);
    }

    #[test]
    fn half_rounds_away_from_zero() {
        let img = ImageF32::filled(1, 1, 3, 0.5).unwrap();
        let bytes = encode_ppm(&img).unwrap();
        assert_eq!(&bytes[..11], b"P6\n1 1\n255\n");
        assert_eq!(&bytes[11..], &[128, 128, 128]);
    }

    #[test]
    fn grayscale_rejected() {
        let img = ImageF32::filled(2, 2, 1, 0.5).unwrap();
        assert!(matches!(encode_ppm(&img), Err(Error::GrayscaleUnsupported)));
    }

    #[test]
    fn quantizer_bound_is_exhaustive() {
        // Every byte value survives decode -> encode unchanged, and every
        // sample lands within half a quantization step of its byte.
        for v in 0..=255u8 {
            let s = v as f32 / 255.0;
            assert_eq!(quantize(s), v);
        }
        for i in 0..=10_000 {
            let s = i as f32 / 10_000.0;
            let back = quantize(s) as f32 / 255.0;
            assert!((back - s).abs() <= 1.0 / 510.0 + 1e-7, "{s}");
        }
    }
}
