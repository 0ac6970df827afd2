use std::io::{Read, Write};

use anyhow::{bail, Context, Result};
use nalgebra::DVector;

use nhreduce::{DiscretePath, ParticleStage, PathPair};

use crate::config::Level;

fn matrix_columns(prefix: &str) -> Vec<String> {
    (0..3).flat_map(|i| (0..3).map(move |j| format!("{prefix}_{i}{j}"))).collect()
}

fn names(list: &[&str]) -> Vec<String> {
    list.iter().map(|s| s.to_string()).collect()
}

/// Column names of `(ε, m)` for a level, without the leading index column.
pub fn columns(level: Level) -> (Vec<String>, Vec<String>) {
    match level {
        Level::SuslovFull => (matrix_columns("g"), matrix_columns("gn")),
        Level::SuslovEta => (matrix_columns("W"), vec![]),
        Level::SuslovMomentum => (names(&["p1", "p2", "p3"]), vec![]),
        Level::Particle(ParticleStage::Full) => (names(&["x", "y", "z"]), names(&["xn", "yn", "zn"])),
        Level::Particle(ParticleStage::H) => (names(&["x", "y", "w"]), names(&["xn", "yn"])),
        Level::Particle(ParticleStage::G) => (names(&["y", "u", "w"]), names(&["yn"])),
        Level::Particle(ParticleStage::GOverH) => (names(&["y", "w", "u"]), names(&["yn"])),
    }
}

pub fn header(level: Level) -> Vec<String> {
    let (e, m) = columns(level);
    std::iter::once("k".to_string()).chain(e).chain(m).collect()
}

/// 17 significant digits, enough to round-trip every `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_path<W: Write>(out: W, level: Level, path: &DiscretePath) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header(level))?;
    for (k, p) in path.pairs.iter().enumerate() {
        let row = std::iter::once(k.to_string()).chain(p.eps.iter().chain(p.m_next.iter()).map(|x| fmt_f64(*x)));
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a path written by [`write_path`]. Any deviation from the level's
/// schema is an error.
pub fn read_path<R: Read>(input: R, level: Level) -> Result<DiscretePath> {
    let mut r = csv::Reader::from_reader(input);
    let got: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    let expected = header(level);
    if got != expected {
        bail!("CSV header {:?} does not match the {} schema {:?}", got, level.name(), expected);
    }
    let (ne, nm) = {
        let (e, m) = columns(level);
        (e.len(), m.len())
    };
    let mut pairs = Vec::new();
    for (row, rec) in r.records().enumerate() {
        let rec = rec?;
        let k: usize = rec[0].trim().parse().with_context(|| format!("row {row}: bad index"))?;
        if k != row {
            bail!("row {row}: index {k} is out of sequence");
        }
        let vals = rec
            .iter()
            .skip(1)
            .map(|s| s.trim().parse::<f64>().with_context(|| format!("row {row}: bad number {s:?}")))
            .collect::<Result<Vec<_>>>()?;
        pairs.push(PathPair::new(
            DVector::from_column_slice(&vals[..ne]),
            DVector::from_column_slice(&vals[ne..ne + nm]),
        ));
    }
    Ok(DiscretePath::new(pairs))
}
