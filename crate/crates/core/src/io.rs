//! On-disk formats.
//!
//! Field files are little-endian binary with a 48-byte header:
//!
//! ```text
//! offset  size  content
//!      0     4  magic "WPSF"
//!      4     4  format version, u32 (= 1)
//!      8     4  n_q, u32
//!     12     4  n_p, u32
//!     16     8  q_min, f64
//!     24     8  q_max, f64
//!     32     8  hbar, f64
//!     40     1  kind, u8 (0 = wigner, 1 = weyl-symbol)
//!     41     7  reserved, zero
//!     48        n_q·n_p real parts (f64, q-major), then n_q·n_p imaginary parts
//! ```
//!
//! Density kernels use the same layout with `n_p = n_q` and kind 0; readers
//! tell the two apart by the column count.
//!
//! Vector files are CSV with a `q,re,im` header (wavefunctions) or `x,value`
//! (marginals and axes); numbers carry 17 significant digits so every f64
//! survives a round trip.

use std::io::{Read, Write};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{FieldKind, PhaseSpaceField};
use crate::grid::GridSpec;
use crate::state::{DensityKernel, SampledWavefunction};

pub const MAGIC: &[u8; 4] = b"WPSF";
pub const FORMAT_VERSION: u32 = 1;
pub const HEADER_LEN: usize = 48;

#[derive(Debug, Clone, Copy, PartialEq)]
struct Header {
    n_q: u32,
    n_cols: u32,
    q_min: f64,
    q_max: f64,
    hbar: f64,
    kind: u8,
}

impl Header {
    fn encode(&self) -> [u8; HEADER_LEN] {
        let mut out = [0u8; HEADER_LEN];
        out[0..4].copy_from_slice(MAGIC);
        out[4..8].copy_from_slice(&FORMAT_VERSION.to_le_bytes());
        out[8..12].copy_from_slice(&self.n_q.to_le_bytes());
        out[12..16].copy_from_slice(&self.n_cols.to_le_bytes());
        out[16..24].copy_from_slice(&self.q_min.to_le_bytes());
        out[24..32].copy_from_slice(&self.q_max.to_le_bytes());
        out[32..40].copy_from_slice(&self.hbar.to_le_bytes());
        out[40] = self.kind;
        out
    }

    fn decode(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < HEADER_LEN {
            return Err(Error::Parse(format!(
                "file too short for header ({} bytes)",
                bytes.len()
            )));
        }
        if &bytes[0..4] != MAGIC {
            return Err(Error::Parse("bad magic bytes".into()));
        }
        let u32_at = |i: usize| u32::from_le_bytes(bytes[i..i + 4].try_into().unwrap());
        let f64_at = |i: usize| f64::from_le_bytes(bytes[i..i + 8].try_into().unwrap());
        let version = u32_at(4);
        if version != FORMAT_VERSION {
            return Err(Error::Parse(format!(
                "unsupported format version {version}"
            )));
        }
        if bytes[41..48].iter().any(|&b| b != 0) {
            return Err(Error::Parse("reserved header bytes are not zero".into()));
        }
        let header = Header {
            n_q: u32_at(8),
            n_cols: u32_at(12),
            q_min: f64_at(16),
            q_max: f64_at(24),
            hbar: f64_at(32),
            kind: bytes[40],
        };
        if FieldKind::from_code(header.kind).is_none() {
            return Err(Error::Parse(format!("unknown field kind {}", header.kind)));
        }
        Ok(header)
    }

    fn grid(&self) -> Result<GridSpec> {
        GridSpec::new(self.n_q as usize, self.q_min, self.q_max, self.hbar)
            .map_err(|e| Error::Parse(format!("header describes an invalid grid: {e}")))
    }
}

fn header_for(grid: &GridSpec, n_cols: usize, kind: FieldKind) -> Result<Header> {
    let to_u32 = |n: usize| {
        u32::try_from(n).map_err(|_| Error::InvalidState(format!("dimension {n} exceeds u32")))
    };
    Ok(Header {
        n_q: to_u32(grid.n_q())?,
        n_cols: to_u32(n_cols)?,
        q_min: grid.q_min(),
        q_max: grid.q_max(),
        hbar: grid.hbar(),
        kind: kind.code(),
    })
}

fn encode(header: &Header, values: &[Complex64]) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + 16 * values.len());
    out.extend_from_slice(&header.encode());
    for v in values {
        out.extend_from_slice(&v.re.to_le_bytes());
    }
    for v in values {
        out.extend_from_slice(&v.im.to_le_bytes());
    }
    out
}

fn decode_payload(bytes: &[u8], count: usize) -> Result<Vec<Complex64>> {
    let payload = &bytes[HEADER_LEN..];
    if payload.len() != 16 * count {
        return Err(Error::Parse(format!(
            "payload is {} bytes, header implies {}",
            payload.len(),
            16 * count
        )));
    }
    let (re, im) = payload.split_at(8 * count);
    Ok(re
        .chunks_exact(8)
        .zip(im.chunks_exact(8))
        .map(|(r, i)| {
            Complex64::new(
                f64::from_le_bytes(r.try_into().unwrap()),
                f64::from_le_bytes(i.try_into().unwrap()),
            )
        })
        .collect())
}

/// Contents of a WPSF file.
#[derive(Debug, Clone, PartialEq)]
pub enum FieldFile {
    Field(PhaseSpaceField),
    /// Raw density-kernel samples; validated only when turned into a
    /// [`DensityKernel`].
    Kernel {
        grid: GridSpec,
        values: Vec<Complex64>,
    },
}

impl FieldFile {
    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let header = Header::decode(bytes)?;
        let grid = header.grid()?;
        let n_q = grid.n_q();
        let n_cols = header.n_cols as usize;
        let kind = FieldKind::from_code(header.kind).expect("checked in decode");
        if n_cols == grid.n_p() {
            let values = decode_payload(bytes, n_q * n_cols)?;
            Ok(FieldFile::Field(PhaseSpaceField::from_values(
                grid, kind, values,
            )?))
        } else if n_cols == n_q && kind == FieldKind::Wigner {
            let values = decode_payload(bytes, n_q * n_q)?;
            Ok(FieldFile::Kernel { grid, values })
        } else {
            Err(Error::Parse(format!(
                "column count {n_cols} fits neither a field ({}) nor a kernel ({n_q})",
                grid.n_p()
            )))
        }
    }

    pub fn read_from(mut reader: impl Read) -> Result<Self> {
        let mut bytes = Vec::new();
        reader.read_to_end(&mut bytes)?;
        Self::from_bytes(&bytes)
    }

    pub fn into_field(self) -> Result<PhaseSpaceField> {
        match self {
            FieldFile::Field(f) => Ok(f),
            FieldFile::Kernel { .. } => {
                Err(Error::Parse("expected a field, found a kernel".into()))
            }
        }
    }
}

pub fn field_to_bytes(field: &PhaseSpaceField) -> Result<Vec<u8>> {
    let header = header_for(field.grid(), field.grid().n_p(), field.kind())?;
    Ok(encode(&header, field.values()))
}

pub fn kernel_to_bytes(rho: &DensityKernel) -> Result<Vec<u8>> {
    let header = header_for(rho.grid(), rho.grid().n_q(), FieldKind::Wigner)?;
    Ok(encode(&header, rho.values()))
}

pub fn write_field(mut writer: impl Write, field: &PhaseSpaceField) -> Result<()> {
    writer.write_all(&field_to_bytes(field)?)?;
    Ok(())
}

pub fn write_kernel(mut writer: impl Write, rho: &DensityKernel) -> Result<()> {
    writer.write_all(&kernel_to_bytes(rho)?)?;
    Ok(())
}

fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn parse_f64(s: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|e| Error::Parse(format!("bad number `{s}`: {e}")))
}

fn csv_error(e: csv::Error) -> Error {
    Error::Parse(e.to_string())
}

fn write_rows(
    writer: impl Write,
    header: &[&str],
    rows: impl Iterator<Item = Vec<f64>>,
) -> Result<()> {
    let mut csv = csv::Writer::from_writer(writer);
    csv.write_record(header).map_err(csv_error)?;
    for row in rows {
        csv.write_record(row.into_iter().map(fmt_f64))
            .map_err(csv_error)?;
    }
    csv.flush()?;
    Ok(())
}

fn read_rows(reader: impl Read, header: &[&str]) -> Result<Vec<Vec<f64>>> {
    let mut csv = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(reader);
    let found: Vec<String> = csv
        .headers()
        .map_err(csv_error)?
        .iter()
        .map(|s| s.trim().to_string())
        .collect();
    if found != header {
        return Err(Error::Parse(format!(
            "expected header {header:?}, found {found:?}"
        )));
    }
    csv.records()
        .map(|rec| {
            let rec = rec.map_err(csv_error)?;
            if rec.len() != header.len() {
                return Err(Error::Parse(format!("row has {} fields", rec.len())));
            }
            rec.iter().map(parse_f64).collect()
        })
        .collect()
}

/// Writes `q,re,im` rows.
pub fn write_wavefunction(writer: impl Write, psi: &SampledWavefunction) -> Result<()> {
    let grid = psi.grid();
    write_rows(
        writer,
        &["q", "re", "im"],
        psi.values()
            .iter()
            .enumerate()
            .map(|(j, v)| vec![grid.q(j), v.re, v.im]),
    )
}

/// Raw `q,re,im` samples as read from disk.
#[derive(Debug, Clone, PartialEq)]
pub struct WavefunctionSamples {
    pub q: Vec<f64>,
    pub values: Vec<Complex64>,
}

impl WavefunctionSamples {
    /// Infers the grid from the position column. The column must be uniform
    /// and match the reconstructed axis to within a tiny fraction of `dq`.
    pub fn infer_grid(&self, hbar: f64) -> Result<GridSpec> {
        let n = self.q.len();
        if n < 2 {
            return Err(Error::Parse(format!("only {n} samples")));
        }
        let dq = (self.q[n - 1] - self.q[0]) / (n - 1) as f64;
        let grid = GridSpec::new(n, self.q[0], self.q[0] + n as f64 * dq, hbar)
            .map_err(|e| Error::Parse(format!("position column: {e}")))?;
        self.check_axis(&grid)?;
        Ok(grid)
    }

    /// Verifies that the position column matches `grid`.
    pub fn check_axis(&self, grid: &GridSpec) -> Result<()> {
        if self.q.len() != grid.n_q() {
            return Err(Error::Parse(format!(
                "{} rows for a grid of {}",
                self.q.len(),
                grid.n_q()
            )));
        }
        for (j, &q) in self.q.iter().enumerate() {
            if (q - grid.q(j)).abs() > 1e-9 * grid.dq() {
                return Err(Error::Parse(format!(
                    "position {q} at row {j} is off the grid"
                )));
            }
        }
        Ok(())
    }
}

pub fn read_wavefunction(reader: impl Read) -> Result<WavefunctionSamples> {
    let rows = read_rows(reader, &["q", "re", "im"])?;
    Ok(WavefunctionSamples {
        q: rows.iter().map(|r| r[0]).collect(),
        values: rows.iter().map(|r| Complex64::new(r[1], r[2])).collect(),
    })
}

/// Writes `x,value` rows.
pub fn write_series(writer: impl Write, x: &[f64], values: &[f64]) -> Result<()> {
    if x.len() != values.len() {
        return Err(Error::InvalidState(format!(
            "{} abscissae for {} values",
            x.len(),
            values.len()
        )));
    }
    write_rows(
        writer,
        &["x", "value"],
        x.iter().zip(values).map(|(a, b)| vec![*a, *b]),
    )
}

pub fn read_series(reader: impl Read) -> Result<(Vec<f64>, Vec<f64>)> {
    let rows = read_rows(reader, &["x", "value"])?;
    Ok(rows.into_iter().map(|r| (r[0], r[1])).unzip())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{coherent_state, pure_projector, Oscillator};
    use crate::transform::{weyl_symbol, wigner_of_wavefunction};
    use proptest::prelude::*;

    fn grid() -> GridSpec {
        GridSpec::new(32, -8.0, 8.0, 1.0).unwrap()
    }

    #[test]
    fn header_layout() {
        let field = PhaseSpaceField::constant(grid(), FieldKind::WeylSymbol, 2.5);
        let bytes = field_to_bytes(&field).unwrap();
        assert_eq!(bytes.len(), HEADER_LEN + 16 * 32 * 64);
        assert_eq!(&bytes[0..4], b"WPSF");
        assert_eq!(u32::from_le_bytes(bytes[4..8].try_into().unwrap()), 1);
        assert_eq!(u32::from_le_bytes(bytes[8..12].try_into().unwrap()), 32);
        assert_eq!(u32::from_le_bytes(bytes[12..16].try_into().unwrap()), 64);
        assert_eq!(f64::from_le_bytes(bytes[16..24].try_into().unwrap()), -8.0);
        assert_eq!(f64::from_le_bytes(bytes[24..32].try_into().unwrap()), 8.0);
        assert_eq!(f64::from_le_bytes(bytes[32..40].try_into().unwrap()), 1.0);
        assert_eq!(bytes[40], 1);
        assert!(bytes[41..48].iter().all(|&b| b == 0));
        assert_eq!(f64::from_le_bytes(bytes[48..56].try_into().unwrap()), 2.5);
        let im_start = HEADER_LEN + 8 * 32 * 64;
        assert_eq!(
            f64::from_le_bytes(bytes[im_start..im_start + 8].try_into().unwrap()),
            0.0
        );
    }

    #[test]
    fn field_and_kernel_round_trip() {
        let psi = coherent_state(&grid(), 1.0, -0.5, &Oscillator::unit()).unwrap();
        let w = wigner_of_wavefunction(&psi).unwrap();
        let back = FieldFile::from_bytes(&field_to_bytes(&w).unwrap()).unwrap();
        assert_eq!(back, FieldFile::Field(w));
        let rho = pure_projector(&psi);
        let back = FieldFile::from_bytes(&kernel_to_bytes(&rho).unwrap()).unwrap();
        assert_eq!(
            back,
            FieldFile::Kernel {
                grid: grid(),
                values: rho.values().to_vec()
            }
        );
        let s = weyl_symbol(&rho.to_operator()).unwrap();
        let back = FieldFile::from_bytes(&field_to_bytes(&s).unwrap())
            .unwrap()
            .into_field()
            .unwrap();
        assert_eq!(back.kind(), FieldKind::WeylSymbol);
    }

    #[test]
    fn corrupt_files_rejected() {
        let field = PhaseSpaceField::constant(grid(), FieldKind::Wigner, 1.0);
        let good = field_to_bytes(&field).unwrap();
        let mut bad = good.clone();
        bad[0] = b'X';
        assert!(matches!(FieldFile::from_bytes(&bad), Err(Error::Parse(_))));
        let mut bad = good.clone();
        bad[4] = 2;
        assert!(FieldFile::from_bytes(&bad).is_err());
        let mut bad = good.clone();
        bad[40] = 7;
        assert!(FieldFile::from_bytes(&bad).is_err());
        let mut bad = good.clone();
        bad[45] = 1;
        assert!(FieldFile::from_bytes(&bad).is_err());
        assert!(FieldFile::from_bytes(&good[..good.len() - 8]).is_err());
        let mut long = good.clone();
        long.push(0);
        assert!(FieldFile::from_bytes(&long).is_err());
        assert!(FieldFile::from_bytes(&good[..20]).is_err());
        let mut bad = good;
        bad[12..16].copy_from_slice(&40u32.to_le_bytes());
        assert!(FieldFile::from_bytes(&bad).is_err());
    }

    #[test]
    fn wavefunction_csv_round_trip_and_grid_inference() {
        let psi = coherent_state(&grid(), 0.3, 1.1, &Oscillator::unit()).unwrap();
        let mut buf = Vec::new();
        write_wavefunction(&mut buf, &psi).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("q,re,im\n"));
        assert_eq!(text.lines().count(), 33);
        let back = read_wavefunction(buf.as_slice()).unwrap();
        assert_eq!(back.values, psi.values());
        assert_eq!(back.infer_grid(1.0).unwrap(), grid());
        assert!(read_series(buf.as_slice()).is_err());
    }

    #[test]
    fn csv_digit_count() {
        let mut buf = Vec::new();
        write_series(&mut buf, &[0.1], &[1.0 / 3.0]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let row = text.lines().nth(1).unwrap();
        for cell in row.split(',') {
            let mantissa = cell.split('e').next().unwrap().replace(['.', '-'], "");
            assert!(mantissa.len() >= 17, "{cell}");
        }
    }

    #[test]
    fn malformed_csv_rejected() {
        assert!(read_series("x,value\n1.0,abc\n".as_bytes()).is_err());
        assert!(read_series("x,y\n1.0,2.0\n".as_bytes()).is_err());
        assert!(read_wavefunction("q,re,im\n1.0,2.0\n".as_bytes()).is_err());
    }

    proptest! {
        #[test]
        fn series_round_trip_is_bit_exact(values in proptest::collection::vec(any::<f64>().prop_filter("finite", |v| v.is_finite()), 1..64)) {
            let x: Vec<f64> = (0..values.len()).map(|i| i as f64 * 0.1 - 3.0).collect();
            let mut buf = Vec::new();
            write_series(&mut buf, &x, &values).unwrap();
            let (x2, v2) = read_series(buf.as_slice()).unwrap();
            prop_assert_eq!(x2.iter().map(|v| v.to_bits()).collect::<Vec<_>>(), x.iter().map(|v| v.to_bits()).collect::<Vec<_>>());
            prop_assert_eq!(v2.iter().map(|v| v.to_bits()).collect::<Vec<_>>(), values.iter().map(|v| v.to_bits()).collect::<Vec<_>>());
        }

        #[test]
        fn field_round_trip_is_bit_exact(seed in proptest::collection::vec(any::<f64>(), 2)) {
            let g = GridSpec::new(8, -4.0, 4.0, 0.5).unwrap();
            let values: Vec<Complex64> = (0..8 * 16)
                .map(|i| Complex64::new(seed[0] * i as f64, seed[1] - i as f64))
                .collect();
            let field = PhaseSpaceField::from_values(g, FieldKind::Wigner, values).unwrap();
            let back = FieldFile::from_bytes(&field_to_bytes(&field).unwrap()).unwrap().into_field().unwrap();
            let bits = |f: &PhaseSpaceField| f.values().iter().flat_map(|v| [v.re.to_bits(), v.im.to_bits()]).collect::<Vec<_>>();
            prop_assert_eq!(bits(&back), bits(&field));
        }
    }
}
