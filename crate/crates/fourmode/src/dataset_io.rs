//! Plain-text dataset files.
//!
//! ```text
//! # fourmode-dataset v1 master_seed=7 config_digest=0123456789abcdef shots=2
//! 0 0.1 -0.2 25.3 0.4 0.0 -24.9
//! 1
//! ```
//! One line per shot: the shot index followed by `vx vy vz` of each detected
//! atom in mm/s. Floats use shortest round-trip formatting.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use fourmode_core::detection::{Dataset, Shot};
use fourmode_core::source::Velocity3;

use crate::error::CliError;

pub const HEADER_PREFIX: &str = "# fourmode-dataset v1";

pub fn write_dataset<W: Write>(dataset: &Dataset, mut w: W) -> std::io::Result<()> {
    writeln!(
        w,
        "{HEADER_PREFIX} master_seed={} config_digest={} shots={}",
        dataset.master_seed,
        if dataset.config_digest.is_empty() { "-" } else { &dataset.config_digest },
        dataset.len()
    )?;
    let mut line = String::new();
    for shot in &dataset.shots {
        line.clear();
        write!(line, "{}", shot.index).unwrap();
        for a in &shot.atoms {
            write!(line, " {:?} {:?} {:?}", a.x, a.y, a.z).unwrap();
        }
        line.push('\n');
        w.write_all(line.as_bytes())?;
    }
    w.flush()
}

fn bad(line: usize, msg: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("dataset line {line}: {msg}"))
}

pub fn read_dataset<R: BufRead>(r: R) -> Result<Dataset, CliError> {
    let mut lines = r.lines();
    let header = lines.next().ok_or_else(|| bad(1, "empty file"))??;
    let rest = header
        .strip_prefix(HEADER_PREFIX)
        .ok_or_else(|| bad(1, "missing dataset header"))?;
    let (mut seed, mut digest, mut count) = (None, None, None);
    for field in rest.split_whitespace() {
        let (k, v) = field.split_once('=').ok_or_else(|| bad(1, format!("bad field `{field}`")))?;
        match k {
            "master_seed" => seed = Some(v.parse::<u64>().map_err(|e| bad(1, e))?),
            "config_digest" => digest = Some(if v == "-" { String::new() } else { v.to_string() }),
            "shots" => count = Some(v.parse::<usize>().map_err(|e| bad(1, e))?),
            _ => return Err(bad(1, format!("unknown field `{k}`"))),
        }
    }
    let (Some(master_seed), Some(config_digest), Some(count)) = (seed, digest, count) else {
        return Err(bad(1, "header needs master_seed, config_digest and shots"));
    };
    let mut shots = Vec::with_capacity(count);
    for (i, line) in lines.enumerate() {
        let line = line?;
        let n = i + 2;
        if line.trim().is_empty() {
            continue;
        }
        let mut it = line.split_ascii_whitespace();
        let index = it.next().unwrap().parse::<u64>().map_err(|e| bad(n, e))?;
        let vals: Vec<f64> = it.map(|t| t.parse::<f64>().map_err(|e| bad(n, e))).collect::<Result<_, _>>()?;
        if !vals.len().is_multiple_of(3) {
            return Err(bad(n, "velocity components are not a multiple of 3"));
        }
        let atoms = vals.chunks(3).map(|c| Velocity3::new(c[0], c[1], c[2])).collect();
        shots.push(Shot { index, atoms });
    }
    if shots.len() != count {
        return Err(CliError::Io(format!("header announces {count} shots, found {}", shots.len())));
    }
    Ok(Dataset { master_seed, config_digest, shots })
}

pub fn save(dataset: &Dataset, path: &Path) -> Result<(), CliError> {
    let f = File::create(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    write_dataset(dataset, BufWriter::new(f)).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn load(path: &Path) -> Result<Dataset, CliError> {
    let f = File::open(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    read_dataset(BufReader::new(f))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_bit_exact() {
        let ds = Dataset {
            master_seed: u64::MAX,
            config_digest: "abc".into(),
            shots: vec![
                Shot { index: 0, atoms: vec![Velocity3::new(0.1, -1e-300, 25.000000000000004)] },
                Shot { index: 1, atoms: vec![] },
                Shot { index: 5, atoms: vec![Velocity3::new(f64::MIN_POSITIVE, -0.0, 1.0 / 3.0); 2] },
            ],
        };
        let mut buf = Vec::new();
        write_dataset(&ds, &mut buf).unwrap();
        let back = read_dataset(&buf[..]).unwrap();
        assert_eq!(back, ds);
        for (a, b) in back.shots[2].atoms.iter().zip(&ds.shots[2].atoms) {
            assert_eq!(a.y.to_bits(), b.y.to_bits());
        }
    }

    #[test]
    fn rejects_malformed_files() {
        assert!(read_dataset(&b"0 1 2 3\n"[..]).is_err());
        assert!(read_dataset(&b"# fourmode-dataset v1 master_seed=1 config_digest=- shots=2\n0\n"[..]).is_err());
        assert!(read_dataset(&b"# fourmode-dataset v1 master_seed=1 config_digest=- shots=1\n0 1 2\n"[..]).is_err());
    }
}
