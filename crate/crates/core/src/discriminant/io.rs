//! `TQD1` binary and plain-text encodings of discriminant polynomials.
//!
//! Binary layout, little-endian:
//!
//! ```text
//! "TQD1" | degree u8 | nvars u8 | term count u64 | max exponent u8 × nvars
//! then per term: exponent u8 × nvars | coefficient i64
//! ```
//!
//! Terms appear in the canonical (descending lexicographic) order, so
//! re-encoding a decoded file reproduces it byte for byte.

use std::path::Path;

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::algebra::{monomial_count, Monomial, SparsePoly};
use crate::error::{Error, IoContext, Result};

pub const MAGIC: [u8; 4] = *b"TQD1";

#[derive(Clone, Debug, PartialEq)]
pub struct DiscPolyFile {
    pub degree: u32,
    pub poly: SparsePoly,
}

impl DiscPolyFile {
    pub fn new(degree: u32, poly: SparsePoly) -> Result<Self> {
        if poly.nvars() != monomial_count(degree) {
            return Err(Error::Arity(poly.nvars(), monomial_count(degree)));
        }
        Ok(DiscPolyFile { degree, poly })
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let n = self.poly.nvars();
        let degree = u8::try_from(self.degree).map_err(|_| Error::InvalidDegree(self.degree as i64))?;
        let nvars = u8::try_from(n).map_err(|_| Error::range("variable count", n, "0..=255"))?;
        let mut out = Vec::with_capacity(14 + n + self.poly.len() * (n + 8));
        out.extend_from_slice(&MAGIC);
        out.push(degree);
        out.push(nvars);
        out.extend_from_slice(&(self.poly.len() as u64).to_le_bytes());
        out.extend_from_slice(&self.poly.var_degrees());
        for (m, c) in self.poly.terms() {
            let v = c.to_i64().ok_or_else(|| Error::CoefficientOverflow(c.clone()))?;
            out.extend_from_slice(m);
            out.extend_from_slice(&v.to_le_bytes());
        }
        Ok(out)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let take = |at: usize, len: usize, what: &str| -> Result<&[u8]> {
            bytes
                .get(at..at + len)
                .ok_or_else(|| Error::Truncated(format!("{what} at byte {at}")))
        };
        let magic: [u8; 4] = take(0, 4, "magic")?.try_into().unwrap();
        if magic != MAGIC {
            return Err(Error::BadMagic {
                found: magic,
                expected: MAGIC,
            });
        }
        let degree = take(4, 1, "degree")?[0] as u32;
        let n = take(5, 1, "variable count")?[0] as usize;
        if n != monomial_count(degree) {
            return Err(Error::parse(
                "header",
                format!("degree {degree} needs {} variables, header says {n}", monomial_count(degree)),
            ));
        }
        let count = u64::from_le_bytes(take(6, 8, "term count")?.try_into().unwrap());
        let maxima = take(14, n, "exponent maxima")?;
        let record = n + 8;
        let body = &bytes[14 + n..];
        let expected_len = count
            .checked_mul(record as u64)
            .ok_or_else(|| Error::parse("header", "term count overflows"))?;
        if (body.len() as u64) < expected_len {
            return Err(Error::Truncated(format!(
                "header declares {count} terms, data holds {} complete records",
                body.len() / record
            )));
        }
        if body.len() as u64 > expected_len {
            return Err(Error::parse(
                "trailer",
                format!("{} bytes after the last declared term", body.len() as u64 - expected_len),
            ));
        }
        let mut terms: Vec<(Monomial, BigInt)> = Vec::with_capacity(count as usize);
        for (i, rec) in body.chunks_exact(record).enumerate() {
            let m = Monomial::from_slice(&rec[..n]);
            for (var, (&e, &max)) in m.iter().zip(maxima).enumerate() {
                if e > max {
                    return Err(Error::ExponentOutOfRange { var, exponent: e, max });
                }
            }
            let c = i64::from_le_bytes(rec[n..].try_into().unwrap());
            if c == 0 {
                return Err(Error::ZeroCoefficient(i));
            }
            terms.push((m, BigInt::from(c)));
        }
        let poly = SparsePoly::from_sorted_terms(n, terms)?;
        if poly.var_degrees() != maxima {
            return Err(Error::parse("header", "declared exponent maxima are not attained"));
        }
        Ok(DiscPolyFile { degree, poly })
    }

    /// One term per line, `coefficient e1 ... en`, preceded by a `# degree d`
    /// comment line.
    pub fn to_text(&self) -> String {
        format!("# degree {}\n{}", self.degree, self.poly.to_text())
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.splitn(2, '\n');
        let header = lines.next().unwrap_or("");
        let degree: u32 = header
            .strip_prefix("# degree ")
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| Error::parse("line 1", "expected `# degree d`"))?;
        let body = lines.next().unwrap_or("");
        // keep reported line numbers aligned with the file
        let poly = SparsePoly::from_text(body, Some(monomial_count(degree))).map_err(|e| match e {
            Error::Parse { location, message } => match location.strip_prefix("line ") {
                Some(k) => Error::parse(
                    format!("line {}", k.parse::<usize>().map_or(0, |k| k + 1)),
                    message,
                ),
                None => Error::Parse { location, message },
            },
            other => other,
        })?;
        DiscPolyFile::new(degree, poly)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let bytes = if is_text(path) {
            self.to_text().into_bytes()
        } else {
            self.to_bytes()?
        };
        std::fs::write(path, bytes).ctx(|| format!("writing {}", path.display()))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path).ctx(|| format!("reading {}", path.display()))?;
        if bytes.starts_with(b"#") {
            let text = String::from_utf8(bytes)
                .map_err(|_| Error::parse(path.display().to_string(), "not UTF-8"))?;
            DiscPolyFile::from_text(&text)
        } else {
            DiscPolyFile::from_bytes(&bytes)
        }
    }
}

/// Paths ending in `.txt` use the text encoding.
pub fn is_text(path: &Path) -> bool {
    path.extension().is_some_and(|e| e == "txt")
}
