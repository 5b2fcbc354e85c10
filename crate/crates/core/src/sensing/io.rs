//! Ensemble files.
//!
//! The first non-comment line is a header
//!
//! ```text
//! ensemble <n1> <n2> <m> <symmetric 0|1> <seed|-> <generator> <full|seed-only>
//! ```
//!
//! where `<generator>` is `gaussian`, `spiked_gaussian` or `custom`. A
//! `full` file is followed by the `m` sensing matrices in the plain-text
//! matrix format; a `seed-only` file carries no matrices and is regenerated
//! from the generator name and seed.

use std::io::{BufRead, Write};

use super::{generate, EnsembleKind, EnsembleOrigin, MeasurementOp};
use crate::error::{Error, Result};
use crate::linalg::io::{read_mat_tokens, write_mat, Tokens};

pub fn write_ensemble<W: Write>(out: &mut W, op: &MeasurementOp, include_matrices: bool) -> Result<()> {
    let (seed, generator) = match op.origin() {
        Some(EnsembleOrigin { kind, seed }) => (seed.to_string(), kind.name()),
        None => ("-".to_owned(), "custom"),
    };
    if !include_matrices && op.origin().is_none() {
        return Err(Error::InvalidInput(
            "custom ensembles must be written with their matrices".into(),
        ));
    }
    writeln!(
        out,
        "ensemble {} {} {} {} {} {} {}",
        op.n1(),
        op.n2(),
        op.m(),
        u8::from(op.is_symmetric()),
        seed,
        generator,
        if include_matrices { "full" } else { "seed-only" }
    )?;
    if include_matrices {
        for a in op.matrices() {
            write_mat(out, &a)?;
        }
    }
    Ok(())
}

pub fn read_ensemble<R: BufRead>(reader: R) -> Result<MeasurementOp> {
    let mut tokens = Tokens::new(reader);
    let tag: String = tokens.expect("header tag")?;
    if tag != "ensemble" {
        return Err(Error::Parse(format!("expected 'ensemble' header, got {tag:?}")));
    }
    let n1: usize = tokens.expect("n1")?;
    let n2: usize = tokens.expect("n2")?;
    let m: usize = tokens.expect("m")?;
    let symmetric: u8 = tokens.expect("symmetric flag")?;
    let seed: String = tokens.expect("seed")?;
    let generator: String = tokens.expect("generator")?;
    let layout: String = tokens.expect("layout")?;
    let kind = EnsembleKind::from_name(&generator);
    match layout.as_str() {
        "seed-only" => {
            let kind = kind.ok_or_else(|| {
                Error::Parse(format!("cannot regenerate ensemble {generator:?}"))
            })?;
            let seed: u64 = seed
                .parse()
                .map_err(|_| Error::Parse(format!("bad seed {seed:?}")))?;
            let op = generate(kind, n1, n2, m, seed)?;
            if u8::from(op.is_symmetric()) != symmetric {
                return Err(Error::Parse("symmetric flag disagrees with generator".into()));
            }
            Ok(op)
        }
        "full" => {
            let mut mats = Vec::with_capacity(m);
            for _ in 0..m {
                mats.push(read_mat_tokens(&mut tokens)?);
            }
            let op = MeasurementOp::from_matrices(n1, n2, &mats)
                .map_err(|e| Error::Parse(e.to_string()))?;
            let origin = match (kind, seed.parse::<u64>()) {
                (Some(kind), Ok(seed)) => Some(EnsembleOrigin { kind, seed }),
                _ => None,
            };
            let symmetric = symmetric == 1 && op.is_symmetric();
            Ok(MeasurementOp::from_raw(
                n1,
                n2,
                m,
                op.matrices().flat_map(|a| a.into_vec()).collect(),
                symmetric,
                origin,
            ))
        }
        other => Err(Error::Parse(format!("unknown ensemble layout {other:?}"))),
    }
}

pub fn save_ensemble(path: impl AsRef<std::path::Path>, op: &MeasurementOp, include_matrices: bool) -> Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    write_ensemble(&mut f, op, include_matrices)?;
    f.flush()?;
    Ok(())
}

pub fn load_ensemble(path: impl AsRef<std::path::Path>) -> Result<MeasurementOp> {
    read_ensemble(std::io::BufReader::new(std::fs::File::open(path)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Mat;
    use crate::sensing::spiked_gaussian_ensemble;

    fn same(a: &MeasurementOp, b: &MeasurementOp) -> bool {
        a.n1() == b.n1()
            && a.n2() == b.n2()
            && a.m() == b.m()
            && a.is_symmetric() == b.is_symmetric()
            && a.matrices().zip(b.matrices()).all(|(x, y)| x == y)
    }

    #[test]
    fn full_and_seed_only_files_reload() {
        let op = spiked_gaussian_ensemble(3, 4, 21).unwrap();
        for full in [true, false] {
            let mut buf = Vec::new();
            write_ensemble(&mut buf, &op, full).unwrap();
            let back = read_ensemble(buf.as_slice()).unwrap();
            assert!(same(&op, &back));
            assert_eq!(back.origin(), op.origin());
        }
    }

    #[test]
    fn custom_ensembles_need_matrices() {
        let op = MeasurementOp::from_matrices(1, 2, &[Mat::from_rows(&[[1.0, 2.0]]).unwrap()]).unwrap();
        assert!(write_ensemble(&mut Vec::new(), &op, false).is_err());
        let mut buf = Vec::new();
        write_ensemble(&mut buf, &op, true).unwrap();
        assert!(String::from_utf8_lossy(&buf).starts_with("ensemble 1 2 1 0 - custom full"));
        assert!(same(&op, &read_ensemble(buf.as_slice()).unwrap()));
    }
}
