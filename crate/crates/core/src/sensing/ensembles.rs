use super::op::{check_memory, EnsembleKind, EnsembleOrigin, MeasurementOp};
use crate::error::{invalid, Result};
use crate::rng::{Domain, Stream};

fn check_counts(counts: &[usize]) -> Result<()> {
    if counts.contains(&0) {
        return Err(invalid("ensemble dimensions and m must be at least 1"));
    }
    Ok(())
}

/// `m` sensing matrices with i.i.d. N(0, 1/m) entries. Matrix `k` is drawn
/// row-major from stream `(seed, Ensemble, k)`.
pub fn gaussian_ensemble(n1: usize, n2: usize, m: usize, seed: u64) -> Result<MeasurementOp> {
    check_counts(&[n1, n2, m])?;
    check_memory(n1, n2, m)?;
    let std_dev = (1.0 / m as f64).sqrt();
    let mut data = Vec::with_capacity(n1 * n2 * m);
    for k in 0..m {
        let mut stream = Stream::new(seed, Domain::Ensemble, k as u64);
        data.extend((0..n1 * n2).map(|_| std_dev * stream.normal()));
    }
    Ok(MeasurementOp::from_raw(
        n1,
        n2,
        m,
        data,
        false,
        Some(EnsembleOrigin {
            kind: EnsembleKind::Gaussian,
            seed,
        }),
    ))
}

/// `m` symmetric n×n sensing matrices with N(0, 1/m) diagonal entries and
/// N(0, 1/2m) off-diagonal entries, one draw shared by each `(i, j)`, `(j, i)`
/// pair. Matrix `k` draws its upper triangle row-major (diagonal included)
/// from stream `(seed, Ensemble, k)`.
pub fn spiked_gaussian_ensemble(n: usize, m: usize, seed: u64) -> Result<MeasurementOp> {
    check_counts(&[n, m])?;
    check_memory(n, n, m)?;
    let diag_sd = (1.0 / m as f64).sqrt();
    let off_sd = (1.0 / (2.0 * m as f64)).sqrt();
    let block = n * n;
    let mut data = vec![0.0; block * m];
    for (k, a) in data.chunks_exact_mut(block).enumerate() {
        let mut stream = Stream::new(seed, Domain::Ensemble, k as u64);
        for i in 0..n {
            for j in i..n {
                if i == j {
                    a[i * n + i] = diag_sd * stream.normal();
                } else {
                    let v = off_sd * stream.normal();
                    a[i * n + j] = v;
                    a[j * n + i] = v;
                }
            }
        }
    }
    Ok(MeasurementOp::from_raw(
        n,
        n,
        m,
        data,
        true,
        Some(EnsembleOrigin {
            kind: EnsembleKind::SpikedGaussian,
            seed,
        }),
    ))
}

/// Rebuilds an ensemble from its generator name and seed.
pub fn generate(kind: EnsembleKind, n1: usize, n2: usize, m: usize, seed: u64) -> Result<MeasurementOp> {
    match kind {
        EnsembleKind::Gaussian => gaussian_ensemble(n1, n2, m, seed),
        EnsembleKind::SpikedGaussian => {
            if n1 != n2 {
                return Err(invalid("spiked Gaussian ensemble needs n1 == n2"));
            }
            spiked_gaussian_ensemble(n1, m, seed)
        }
    }
}
