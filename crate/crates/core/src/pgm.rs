//! Reading and writing 8-bit grayscale Netpbm files (`P2` ASCII and `P5` binary).
//!
//! Header comments (`#` to end of line) are accepted anywhere whitespace is.
//! Files with `maxval < 255` are decoded with their samples used as-is; no
//! rescaling to the full 8-bit range is done.

use std::fs;
use std::path::Path;

use thiserror::Error;

use crate::error::{Error, Result};
use crate::image::ImageU8;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PgmError {
    #[error("unsupported magic number {0:?} (expected P2 or P5)")]
    UnsupportedFormat(String),
    #[error("malformed header: {0}")]
    MalformedHeader(&'static str),
    #[error("maxval {0} exceeds 255")]
    MaxvalTooLarge(u32),
    #[error("image has a zero dimension ({width}x{height})")]
    ZeroDimension { width: usize, height: usize },
    #[error("truncated sample data: expected {expected} samples, found {found}")]
    Truncated { expected: usize, found: usize },
    #[error("sample {value} at index {index} exceeds maxval {maxval}")]
    SampleOutOfRange {
        index: usize,
        value: u32,
        maxval: u32,
    },
    #[error("invalid ASCII sample at index {0}")]
    InvalidSample(usize),
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Encoding {
    Ascii,
    Binary,
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_whitespace_and_comments(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while let Some(&b) = self.bytes.get(self.pos) {
                    self.pos += 1;
                    if b == b'\n' || b == b'\r' {
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

    fn token(&mut self) -> Option<&'a [u8]> {
        self.skip_whitespace_and_comments();
        let start = self.pos;
        while let Some(&b) = self.bytes.get(self.pos) {
            if b.is_ascii_whitespace() || b == b'#' {
                break;
            }
            self.pos += 1;
        }
        (self.pos > start).then(|| &self.bytes[start..self.pos])
    }

    fn header_number(&mut self, what: &'static str) -> Result<u32, PgmError> {
        let tok = self.token().ok_or(PgmError::MalformedHeader(what))?;
        parse_u32(tok).ok_or(PgmError::MalformedHeader(what))
    }
}

fn parse_u32(tok: &[u8]) -> Option<u32> {
    if tok.is_empty() || !tok.iter().all(u8::is_ascii_digit) {
        return None;
    }
    std::str::from_utf8(tok).ok()?.parse().ok()
}

/// Decodes a `P2` or `P5` stream.
pub fn load_pgm(bytes: &[u8]) -> Result<ImageU8, PgmError> {
    let magic = bytes.get(..2).unwrap_or(bytes);
    let encoding = match magic {
        b"P2" => Encoding::Ascii,
        b"P5" => Encoding::Binary,
        other => {
            return Err(PgmError::UnsupportedFormat(
                String::from_utf8_lossy(other).into_owned(),
            ))
        }
    };
    let mut cur = Cursor { bytes, pos: 2 };
    // The magic number must be followed by whitespace or a comment.
    match bytes.get(2) {
        Some(b) if b.is_ascii_whitespace() || *b == b'#' => {}
        _ => {
            return Err(PgmError::MalformedHeader(
                "missing separator after magic number",
            ))
        }
    }

    let width = cur.header_number("width")? as usize;
    let height = cur.header_number("height")? as usize;
    let maxval = cur.header_number("maxval")?;
    if width == 0 || height == 0 {
        return Err(PgmError::ZeroDimension { width, height });
    }
    if maxval > 255 {
        return Err(PgmError::MaxvalTooLarge(maxval));
    }
    if maxval == 0 {
        return Err(PgmError::MalformedHeader("maxval must be at least 1"));
    }
    let expected = width
        .checked_mul(height)
        .ok_or(PgmError::MalformedHeader("dimensions overflow"))?;

    let samples = match encoding {
        Encoding::Binary => {
            // Exactly one whitespace byte separates maxval from the raster.
            match bytes.get(cur.pos) {
                Some(b) if b.is_ascii_whitespace() => cur.pos += 1,
                Some(_) => return Err(PgmError::MalformedHeader("missing separator after maxval")),
                None => return Err(PgmError::Truncated { expected, found: 0 }),
            }
            let data = &bytes[cur.pos..];
            if data.len() < expected {
                return Err(PgmError::Truncated {
                    expected,
                    found: data.len(),
                });
            }
            data[..expected].to_vec()
        }
        Encoding::Ascii => {
            let mut samples = Vec::with_capacity(expected);
            while samples.len() < expected {
                let Some(tok) = cur.token() else {
                    return Err(PgmError::Truncated {
                        expected,
                        found: samples.len(),
                    });
                };
                let value = parse_u32(tok).ok_or(PgmError::InvalidSample(samples.len()))?;
                if value > 255 {
                    return Err(PgmError::SampleOutOfRange {
                        index: samples.len(),
                        value,
                        maxval,
                    });
                }
                samples.push(value as u8);
            }
            samples
        }
    };
    if let Some(index) = samples.iter().position(|&v| u32::from(v) > maxval) {
        return Err(PgmError::SampleOutOfRange {
            index,
            value: u32::from(samples[index]),
            maxval,
        });
    }
    Ok(ImageU8::new(width, height, samples).expect("dimensions validated above"))
}

/// Encodes `img` as `P5` when `binary` is set, else as `P2` with maxval 255.
pub fn save_pgm(img: &ImageU8, binary: bool) -> Vec<u8> {
    let (w, h) = img.dims();
    if binary {
        let mut out = format!("P5\n{w} {h}\n255\n").into_bytes();
        out.extend_from_slice(img.samples());
        out
    } else {
        let mut out = format!("P2\n{w} {h}\n255\n");
        for row in img.samples().chunks(w) {
            let line: Vec<String> = row.iter().map(u8::to_string).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out.into_bytes()
    }
}

pub fn read_pgm_file(path: impl AsRef<Path>) -> Result<ImageU8> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(load_pgm(&bytes)?)
}

/// Writes a binary (`P5`) file.
pub fn write_pgm_file(path: impl AsRef<Path>, img: &ImageU8) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, save_pgm(img, true)).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn decodes_binary() {
        let mut bytes = b"P5 2 2 255\n".to_vec();
        bytes.extend_from_slice(&[0, 255, 128, 64]);
        let img = load_pgm(&bytes).unwrap();
        assert_eq!(img.dims(), (2, 2));
        assert_eq!(img.samples(), &[0, 255, 128, 64]);
    }

    #[test]
    fn ascii_and_binary_agree() {
        let mut p5 = b"P5 2 2 255\n".to_vec();
        p5.extend_from_slice(&[0, 255, 128, 64]);
        let p2 = b"P2 2 2 255 0 255 128 64";
        assert_eq!(load_pgm(p2).unwrap(), load_pgm(&p5).unwrap());
    }

    #[test]
    fn header_comments() {
        let src = b"P2\n# made by hand\n2 # width\n1\n# maxval next\n255\n9 # trailing\n10\n";
        assert_eq!(load_pgm(src).unwrap().samples(), &[9, 10]);
    }

    #[test]
    fn maxval_below_255_is_kept_verbatim() {
        let img = load_pgm(b"P2 3 1 15 0 7 15").unwrap();
        assert_eq!(img.samples(), &[0, 7, 15]);
    }

    #[test]
    fn distinct_errors() {
        assert!(matches!(
            load_pgm(b"P6 1 1 255\n\0\0\0"),
            Err(PgmError::UnsupportedFormat(m)) if m == "P6"
        ));
        assert_eq!(
            load_pgm(b"P5 1 1 65535\n\0\0"),
            Err(PgmError::MaxvalTooLarge(65535))
        );
        assert_eq!(
            load_pgm(b"P5 2 2 255\n\x01\x02"),
            Err(PgmError::Truncated {
                expected: 4,
                found: 2
            })
        );
        assert_eq!(
            load_pgm(b"P2 2 2 255 1 2 3"),
            Err(PgmError::Truncated {
                expected: 4,
                found: 3
            })
        );
        assert_eq!(
            load_pgm(b"P2 0 2 255"),
            Err(PgmError::ZeroDimension {
                width: 0,
                height: 2
            })
        );
        assert!(matches!(
            load_pgm(b"P2 2 x 255"),
            Err(PgmError::MalformedHeader(_))
        ));
        assert!(matches!(
            load_pgm(b"P2 1 1 100 200"),
            Err(PgmError::SampleOutOfRange { value: 200, .. })
        ));
        assert!(matches!(load_pgm(b""), Err(PgmError::UnsupportedFormat(_))));
    }

    #[test]
    fn single_pixel_binary_round_trip() {
        let img = ImageU8::new(1, 1, vec![7]).unwrap();
        let bytes = save_pgm(&img, true);
        assert!(bytes.starts_with(b"P5"));
        assert_eq!(load_pgm(&bytes).unwrap(), img);
    }

    #[test]
    fn ascii_output_has_one_token_per_sample() {
        let img = ImageU8::new(2, 2, vec![1, 22, 133, 4]).unwrap();
        let text = String::from_utf8(save_pgm(&img, false)).unwrap();
        let tokens: Vec<&str> = text.split_whitespace().collect();
        assert_eq!(tokens, ["P2", "2", "2", "255", "1", "22", "133", "4"]);
        assert_eq!(load_pgm(text.as_bytes()).unwrap(), img);
    }

    #[test]
    fn random_256_square_round_trips() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let img = ImageU8::from_fn(256, 256, |_, _| rng.gen()).unwrap();
        for binary in [true, false] {
            assert_eq!(load_pgm(&save_pgm(&img, binary)).unwrap(), img);
        }
    }

    proptest! {
        #[test]
        fn round_trip(w in 1usize..12, h in 1usize..12, seed in any::<u64>(), binary in any::<bool>()) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let img = ImageU8::from_fn(w, h, |_, _| rng.gen()).unwrap();
            prop_assert_eq!(load_pgm(&save_pgm(&img, binary)).unwrap(), img);
        }
    }
}
