//! Energy CSV, binary snapshots and PGM images.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use tfphase_core::energy::EnergyRecord;
use tfphase_core::fields::{write_snapshot, ScalarField2D};

pub const CSV_HEADER: &str = "t,E,E_tilde,D_term,stab_term,max_abs_u,mean_u";

/// 17 significant digits, scientific notation.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn csv_row(r: &EnergyRecord) -> String {
    [r.t, r.e, r.e_tilde, r.d_term, r.stab_term, r.max_abs_u, r.mean_u]
        .iter()
        .map(|v| format_float(*v))
        .collect::<Vec<_>>()
        .join(",")
}

/// Streams records to a CSV file as they arrive.
pub struct CsvWriter {
    path: PathBuf,
    out: BufWriter<File>,
}

impl CsvWriter {
    pub fn create(path: &Path) -> Result<Self> {
        let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
        let mut out = BufWriter::new(file);
        writeln!(out, "{CSV_HEADER}").with_context(|| format!("writing {}", path.display()))?;
        Ok(Self {
            path: path.to_path_buf(),
            out,
        })
    }

    pub fn write(&mut self, r: &EnergyRecord) -> Result<()> {
        writeln!(self.out, "{}", csv_row(r)).with_context(|| format!("writing {}", self.path.display()))
    }

    pub fn flush(&mut self) -> Result<()> {
        self.out.flush().with_context(|| format!("flushing {}", self.path.display()))
    }
}

pub fn emit_energy_csv(records: &[EnergyRecord], path: &Path) -> Result<()> {
    let mut w = CsvWriter::create(path)?;
    for r in records {
        w.write(r)?;
    }
    w.flush()
}

pub fn emit_snapshot(field: &ScalarField2D, path: &Path) -> Result<()> {
    Ok(write_snapshot(field, path)?)
}

/// Gray level of `u`: `[-1.05, 1.05]` maps linearly onto `[0, 255]`,
/// clamped, rounded half to even (so `u = 0`, at 127.5, becomes 128).
pub fn gray_level(u: f64) -> u8 {
    let x = (u + 1.05) / 2.1 * 255.0;
    x.clamp(0.0, 255.0).round_ties_even() as u8
}

/// Binary PGM (P5). The first image row is the largest `y`.
pub fn encode_pgm(field: &ScalarField2D) -> Vec<u8> {
    let g = field.grid();
    let mut out = format!("P5\n{} {}\n255\n", g.nx, g.ny).into_bytes();
    for iy in (0..g.ny).rev() {
        out.extend(field.values()[iy * g.nx..(iy + 1) * g.nx].iter().map(|&u| gray_level(u)));
    }
    out
}

pub fn emit_pgm(field: &ScalarField2D, path: &Path) -> Result<()> {
    std::fs::write(path, encode_pgm(field)).with_context(|| format!("writing {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use tfphase_core::fields::{read_snapshot, GridDescriptor};

    #[test]
    fn header_only_csv() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("e.csv");
        emit_energy_csv(&[], &p).unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), format!("{CSV_HEADER}\n"));
    }

    #[test]
    fn csv_rows_round_trip_exactly() {
        let r = EnergyRecord {
            t: 0.1,
            e: 1.0 / 3.0,
            e_tilde: 2.0f64.sqrt(),
            d_term: 1e-300,
            stab_term: 0.0,
            max_abs_u: 0.999_999_999_999_9,
            mean_u: -1.5e-17,
        };
        let row = csv_row(&r);
        let back: Vec<f64> = row.split(',').map(|s| s.parse().unwrap()).collect();
        assert_eq!(back, vec![r.t, r.e, r.e_tilde, r.d_term, r.stab_term, r.max_abs_u, r.mean_u]);
        assert!(row.starts_with("1.0000000000000001e-1,"));
    }

    #[test]
    fn snapshot_round_trip() {
        let g = GridDescriptor::square_2pi(8).unwrap();
        let u = ScalarField2D::from_fn(g, |x, y| (x * y).sin() / 3.0);
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("u.tfp");
        emit_snapshot(&u, &p).unwrap();
        assert_eq!(read_snapshot(&p).unwrap().values, u.values());
    }

    #[test]
    fn pgm_levels() {
        assert_eq!(gray_level(0.0), 128);
        assert_eq!(gray_level(-1.05), 0);
        assert_eq!(gray_level(1.05), 255);
        assert_eq!(gray_level(-7.0), 0);
        let g = GridDescriptor::square_2pi(4).unwrap();
        let img = encode_pgm(&ScalarField2D::constant(g, 0.0));
        let head = b"P5\n4 4\n255\n";
        assert_eq!(&img[..head.len()], head);
        assert!(img[head.len()..].iter().all(|&p| p == 128));
        assert_eq!(img.len(), head.len() + 16);
    }
}
