//! File formats: mixture JSON, binary field dumps, CSV slices.
//!
//! A field dump is one JSON header line `{"dim":…,"L":…,"n":…,"t":…}`
//! terminated by `\n`, followed by `nᵈ` complex values as little-endian
//! `f64` pairs `(re, im)` in row-major order.

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::decompose::GaussianMixture;
use crate::error::{Error, Result};
use crate::grid::GridSpec;

/// Longest accepted header line in bytes.
pub const MAX_HEADER_LEN: usize = 4096;

pub fn mixture_to_json(mix: &GaussianMixture) -> String {
    serde_json::to_string_pretty(mix).expect("mixtures always serialize")
}

/// Parses and validates a mixture; deserialization errors carry the JSON path.
pub fn mixture_from_json(text: &str) -> Result<GaussianMixture> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let mix: GaussianMixture = serde_path_to_error::deserialize(de).map_err(|e| Error::Config {
        path: e.path().to_string(),
        message: e.inner().to_string(),
    })?;
    mix.validate()?;
    let cap = (mix.order + 1).checked_pow(mix.dim as u32);
    if cap.is_some_and(|c| mix.len() > c) {
        return Err(Error::Parameter(format!(
            "{} terms exceed (N+1)^dim for N = {}, dim = {}",
            mix.len(),
            mix.order,
            mix.dim
        )));
    }
    Ok(mix)
}

pub fn read_mixture(path: &Path) -> Result<GaussianMixture> {
    mixture_from_json(&fs::read_to_string(path)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldHeader {
    pub dim: usize,
    #[serde(rename = "L")]
    pub half_width: f64,
    pub n: usize,
    pub t: f64,
}

impl FieldHeader {
    pub fn new(grid: &GridSpec, t: f64) -> Self {
        FieldHeader {
            dim: grid.dim,
            half_width: grid.half_width,
            n: grid.points_per_dim,
            t,
        }
    }

    pub fn grid(&self) -> Result<GridSpec> {
        GridSpec::new(self.dim, self.half_width, self.n)
    }
}

pub fn encode_field(header: &FieldHeader, values: &[Complex64]) -> Vec<u8> {
    let mut out = serde_json::to_vec(header).expect("headers always serialize");
    out.push(b'\n');
    out.reserve(values.len() * 16);
    for z in values {
        out.extend_from_slice(&z.re.to_le_bytes());
        out.extend_from_slice(&z.im.to_le_bytes());
    }
    out
}

/// Inverse of [`encode_field`]; rejects malformed headers, wrong payload
/// sizes and non-finite values.
pub fn decode_field(bytes: &[u8]) -> Result<(FieldHeader, Vec<Complex64>)> {
    let end = bytes
        .iter()
        .take(MAX_HEADER_LEN)
        .position(|&b| b == b'\n')
        .ok_or_else(|| Error::Format("field dump has no header line".into()))?;
    let header: FieldHeader = serde_json::from_slice(&bytes[..end])
        .map_err(|e| Error::Format(format!("bad field header: {e}")))?;
    if !header.t.is_finite() {
        return Err(Error::Format("field time is not finite".into()));
    }
    let grid = header.grid().map_err(|e| Error::Format(e.to_string()))?;
    let payload = &bytes[end + 1..];
    let expected = grid
        .len()
        .checked_mul(16)
        .ok_or_else(|| Error::Format("field size overflows".into()))?;
    if payload.len() != expected {
        return Err(Error::Format(format!(
            "payload has {} bytes, header implies {expected}",
            payload.len()
        )));
    }
    let mut values = Vec::with_capacity(grid.len());
    for chunk in payload.chunks_exact(16) {
        let re = f64::from_le_bytes(chunk[..8].try_into().expect("8 bytes"));
        let im = f64::from_le_bytes(chunk[8..].try_into().expect("8 bytes"));
        if !re.is_finite() || !im.is_finite() {
            return Err(Error::Format("field contains non-finite values".into()));
        }
        values.push(Complex64::new(re, im));
    }
    Ok((header, values))
}

/// CSV `x,re,im,abs2` along the first axis; in higher dimensions the other
/// coordinates are fixed at the grid point nearest the origin.
pub fn field_slice_csv(grid: &GridSpec, values: &[Complex64]) -> String {
    let n = grid.points_per_dim;
    let coords = grid.coords();
    let mid = n / 2;
    let stride = n.pow(grid.dim as u32 - 1);
    let offset: usize = (1..grid.dim).map(|k| mid * n.pow((grid.dim - 1 - k) as u32)).sum();
    let mut out = String::from("x,re,im,abs2\n");
    for (j, x) in coords.iter().enumerate() {
        let z = values[j * stride + offset];
        out.push_str(&format!("{x:.17e},{:.17e},{:.17e},{:.17e}\n", z.re, z.im, z.norm_sqr()));
    }
    out
}

/// Writes `contents`, creating parent directories.
pub fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    fs::write(path, contents)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_roundtrip() {
        let grid = GridSpec::new(2, 3.0, 8).unwrap();
        let values = grid.sample(|x| Complex64::new(x[0], -x[1]));
        let bytes = encode_field(&FieldHeader::new(&grid, 0.25), &values);
        let (h, v) = decode_field(&bytes).unwrap();
        assert_eq!(h.t, 0.25);
        assert_eq!(v, values);
    }

    #[test]
    fn field_rejects_truncation_and_garbage() {
        let grid = GridSpec::new(1, 3.0, 8).unwrap();
        let values = vec![Complex64::new(1.0, 0.0); 8];
        let bytes = encode_field(&FieldHeader::new(&grid, 0.0), &values);
        assert!(decode_field(&bytes[..bytes.len() - 1]).is_err());
        assert!(decode_field(b"no newline").is_err());
        assert!(decode_field(b"{\"dim\":1,\"L\":1,\"n\":7,\"t\":0}\n").is_err());
        assert!(decode_field(b"{\"dim\":40,\"L\":1,\"n\":1024,\"t\":0}\n").is_err());
    }

    #[test]
    fn mixture_roundtrip_and_errors() {
        let mix = GaussianMixture::from_parts(2, vec![vec![0.0, 1.0]], vec![0.5]).unwrap();
        let back = mixture_from_json(&mixture_to_json(&mix)).unwrap();
        assert_eq!(back, mix);
        let err = mixture_from_json(r#"{"dim":1,"N":1,"eps0":0.1,"centers":[[0]],"coeffs":["x"],"eta":0,"tail":0}"#)
            .unwrap_err();
        match err {
            Error::Config { path, .. } => assert_eq!(path, "coeffs[0]"),
            other => panic!("unexpected {other:?}"),
        }
        assert!(mixture_from_json(r#"{"dim":1,"N":1,"eps0":0.1,"centers":[[0,1]],"coeffs":[1],"eta":0,"tail":0}"#).is_err());
    }

    #[test]
    fn slice_header() {
        let grid = GridSpec::new(1, 3.0, 8).unwrap();
        let csv = field_slice_csv(&grid, &vec![Complex64::new(1.0, 1.0); 8]);
        assert!(csv.starts_with("x,re,im,abs2\n"));
        assert_eq!(csv.lines().count(), 9);
    }
}
