use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::metrics::MetricParams;
use crate::scalar::Real;

/// First eight bytes of the binary fixture format.
pub const FIXTURE_MAGIC: &[u8; 8] = b"KMECDF01";

/// Sorted Monte Carlo sample with the metadata needed to regenerate it.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalCdf<T> {
    samples: Vec<T>,
    seed: u64,
    config_digest: String,
}

fn bad(msg: impl Into<String>) -> Error {
    Error::Invalid(msg.into())
}

impl<T: Real> EmpiricalCdf<T> {
    pub fn new(mut samples: Vec<T>, seed: u64, config_digest: String) -> Result<Self> {
        if samples.is_empty() {
            return Err(bad("empirical CDF needs at least one sample"));
        }
        if samples.iter().any(|x| x.is_nan()) {
            return Err(bad("samples contain NaN"));
        }
        samples.sort_by(|a, b| a.partial_cmp(b).expect("NaN rejected above"));
        Ok(Self {
            samples,
            seed,
            config_digest,
        })
    }

    pub fn samples(&self) -> &[T] {
        &self.samples
    }

    pub fn n(&self) -> usize {
        self.samples.len()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn config_digest(&self) -> &str {
        &self.config_digest
    }

    /// Fraction of samples <= z.
    pub fn eval(&self, z: T) -> T {
        let count = self.samples.partition_point(|&x| x <= z);
        T::from_usize_lossy(count) / T::from_usize_lossy(self.n())
    }

    /// sup |F̂ − F|, checking both one-sided limits at every sample.
    pub fn ks_distance<F: FnMut(T) -> T>(&self, mut cdf: F) -> T {
        self.ks_core(|_, x| cdf(x))
    }

    /// [`ks_distance`](Self::ks_distance) with the CDF evaluated in parallel.
    pub fn ks_distance_par<F: Fn(T) -> T + Sync>(&self, cdf: F) -> T {
        use rayon::prelude::*;
        let values: Vec<T> = self.samples.par_iter().map(|&x| cdf(x)).collect();
        self.ks_core(|i, _| values[i])
    }

    // `cdf_at(i, x)` is F at x = samples[i], i the first index of a tie run
    fn ks_core<F: FnMut(usize, T) -> T>(&self, mut cdf_at: F) -> T {
        let n = T::from_usize_lossy(self.n());
        let mut d = T::zero();
        let mut i = 0;
        while i < self.samples.len() {
            let x = self.samples[i];
            let mut j = i;
            while j < self.samples.len() && self.samples[j] == x {
                j += 1;
            }
            let f = cdf_at(i, x);
            let below = T::from_usize_lossy(i) / n;
            let at = T::from_usize_lossy(j) / n;
            d = d.max((f - below).abs()).max((at - f).abs());
            i = j;
        }
        d
    }

    /// Sample mean and standard error of g over the samples.
    pub fn mean_with_stderr<G: Fn(T) -> T>(&self, g: G) -> (T, T) {
        let n = T::from_usize_lossy(self.n());
        let mean = self.samples.iter().map(|&x| g(x)).sum::<T>() / n;
        if self.n() < 2 {
            return (mean, T::zero());
        }
        let ss = self
            .samples
            .iter()
            .map(|&x| {
                let d = g(x) - mean;
                d * d
            })
            .sum::<T>();
        (mean, (ss / (n - T::one()) / n).sqrt())
    }

    /// CSV fixture: a `seed,n,config_digest` header and row, then a `sample`
    /// column in shortest round-trip form.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::WriterBuilder::new().flexible(true).from_writer(w);
        let io = |e: csv::Error| bad(format!("writing CSV fixture: {e}"));
        wtr.write_record(["seed", "n", "config_digest"]).map_err(io)?;
        wtr.write_record([self.seed.to_string(), self.n().to_string(), self.config_digest.clone()])
            .map_err(io)?;
        wtr.write_record(["sample"]).map_err(io)?;
        for x in &self.samples {
            wtr.write_record([x.to_string()]).map_err(io)?;
        }
        wtr.flush().map_err(|e| bad(format!("writing CSV fixture: {e}")))?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .from_reader(r);
        let mut records = rdr.records();
        let mut next = |what: &str| -> Result<csv::StringRecord> {
            records
                .next()
                .ok_or_else(|| bad(format!("CSV fixture ends before {what}")))?
                .map_err(|e| bad(format!("CSV fixture: {e}")))
        };
        let head = next("the header")?;
        if head.iter().collect::<Vec<_>>() != ["seed", "n", "config_digest"] {
            return Err(bad("CSV fixture header must be seed,n,config_digest"));
        }
        let meta = next("the metadata row")?;
        if meta.len() != 3 {
            return Err(bad("CSV fixture metadata row must have three fields"));
        }
        let seed: u64 = meta[0].parse().map_err(|_| bad("CSV fixture: bad seed"))?;
        let n: usize = meta[1].parse().map_err(|_| bad("CSV fixture: bad n"))?;
        let digest = meta[2].to_string();
        if &next("the sample header")?[0] != "sample" {
            return Err(bad("CSV fixture: expected `sample` column header"));
        }
        let mut samples = Vec::with_capacity(n);
        for rec in records {
            let rec = rec.map_err(|e| bad(format!("CSV fixture: {e}")))?;
            let v = rec[0]
                .parse::<T>()
                .map_err(|_| bad(format!("CSV fixture: bad sample `{}`", &rec[0])))?;
            samples.push(v);
        }
        if samples.len() != n {
            return Err(bad(format!("CSV fixture declares n = {n} but holds {}", samples.len())));
        }
        Self::checked(samples, seed, digest)
    }

    /// Binary fixture: magic, u64 seed, u64 n, u32 digest length, digest
    /// bytes, then n f64 samples, all little-endian.
    pub fn write_binary<W: Write>(&self, mut w: W) -> Result<()> {
        let io = |e: std::io::Error| bad(format!("writing binary fixture: {e}"));
        w.write_all(FIXTURE_MAGIC).map_err(io)?;
        w.write_all(&self.seed.to_le_bytes()).map_err(io)?;
        w.write_all(&(self.n() as u64).to_le_bytes()).map_err(io)?;
        let digest = self.config_digest.as_bytes();
        let len = u32::try_from(digest.len()).map_err(|_| bad("config digest too long"))?;
        w.write_all(&len.to_le_bytes()).map_err(io)?;
        w.write_all(digest).map_err(io)?;
        for x in &self.samples {
            w.write_all(&x.as_f64().to_le_bytes()).map_err(io)?;
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(mut r: R) -> Result<Self> {
        let mut buf = Vec::new();
        r.read_to_end(&mut buf)
            .map_err(|e| bad(format!("reading binary fixture: {e}")))?;
        let mut at = 0usize;
        let mut take = |len: usize| -> Result<&[u8]> {
            let s = buf
                .get(at..at + len)
                .ok_or_else(|| bad("binary fixture is truncated"))?;
            at += len;
            Ok(s)
        };
        if take(8)? != FIXTURE_MAGIC {
            return Err(bad("binary fixture has the wrong magic"));
        }
        let seed = u64::from_le_bytes(take(8)?.try_into().expect("8 bytes"));
        let n = u64::from_le_bytes(take(8)?.try_into().expect("8 bytes")) as usize;
        let len = u32::from_le_bytes(take(4)?.try_into().expect("4 bytes")) as usize;
        let digest = String::from_utf8(take(len)?.to_vec())
            .map_err(|_| bad("binary fixture digest is not UTF-8"))?;
        let body = take(n.checked_mul(8).ok_or_else(|| bad("binary fixture n overflows"))?)?;
        let samples = body
            .chunks_exact(8)
            .map(|b| T::c(f64::from_le_bytes(b.try_into().expect("8 bytes"))))
            .collect();
        if at != buf.len() {
            return Err(bad("binary fixture has trailing bytes"));
        }
        Self::checked(samples, seed, digest)
    }

    // fixtures must already be sorted; re-sorting would hide corruption
    fn checked(samples: Vec<T>, seed: u64, digest: String) -> Result<Self> {
        if samples.windows(2).any(|w| !(w[0] <= w[1])) {
            return Err(bad("fixture samples are not sorted ascending"));
        }
        Self::new(samples, seed, digest)
    }
}

/// Monte Carlo estimates of the receiver metrics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum McMetric {
    Outage,
    AvgRate,
    EffRate,
    Bep,
}

/// Plug-in estimate and standard error over γ = γ_s·Z.
pub fn mc_metric<T: Real>(ecdf: &EmpiricalCdf<T>, params: &MetricParams<T>, which: McMetric) -> Result<(T, T)> {
    if ecdf.n() < 100 {
        return Err(bad(format!("Monte Carlo metric needs n >= 100, got {}", ecdf.n())));
    }
    let g = params.gamma_s;
    Ok(match which {
        McMetric::Outage => {
            let th = params.z_th;
            ecdf.mean_with_stderr(|z| if g * z <= th { T::one() } else { T::zero() })
        }
        McMetric::AvgRate => ecdf.mean_with_stderr(|z| (g * z).ln_1p() / T::LN_2()),
        McMetric::EffRate => {
            let th = params.theta;
            let (m, se) = ecdf.mean_with_stderr(|z| (-th * (g * z).ln_1p()).exp());
            (-m.log2() / th, se / (th * m * T::LN_2()))
        }
        McMetric::Bep => {
            let s = params.bep_rho * g;
            if s == T::zero() {
                (params.bep_c, T::zero())
            } else {
                let (m, se) = ecdf.mean_with_stderr(|z| (-s * z).exp());
                (params.bep_c * m, params.bep_c * se)
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ecdf(v: Vec<f64>) -> EmpiricalCdf<f64> {
        EmpiricalCdf::new(v, 11, "d".into()).unwrap()
    }

    #[test]
    fn eval_and_ks() {
        let e = ecdf(vec![3.0, 1.0, 2.0, 2.0]);
        assert_eq!(e.samples(), &[1.0, 2.0, 2.0, 3.0]);
        assert_eq!(e.eval(0.5), 0.0);
        assert_eq!(e.eval(2.0), 0.75);
        assert_eq!(e.ks_distance(|_| 0.5), 0.5);
        let d = ecdf(vec![0.3, 0.1, 0.2, 0.9, 0.5]);
        let own = d.clone();
        assert!(d.ks_distance(|z| own.eval(z)) <= 0.2 + 1e-15);
        assert_eq!(e.ks_distance_par(|z| z / 4.0), e.ks_distance(|z| z / 4.0));
    }

    #[test]
    fn rejects_nan_and_empty() {
        assert!(EmpiricalCdf::<f64>::new(vec![], 0, String::new()).is_err());
        assert!(EmpiricalCdf::new(vec![1.0, f64::NAN], 0, String::new()).is_err());
    }

    #[test]
    fn csv_round_trip_is_bit_exact() {
        let v: Vec<f64> = (0..500).map(|i| (i as f64 * 0.37).sin() * 1e-3 + 1.0 / 3.0).collect();
        let e = EmpiricalCdf::new(v, u64::MAX, "a,b;\"q\"".into()).unwrap();
        let mut buf = Vec::new();
        e.write_csv(&mut buf).unwrap();
        let back = EmpiricalCdf::read_csv(buf.as_slice()).unwrap();
        assert_eq!(back, e);
        assert!(back.samples().iter().zip(e.samples()).all(|(a, b)| a.to_bits() == b.to_bits()));
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("seed,n,config_digest\n18446744073709551615,500,\"a,b;\"\"q\"\"\"\nsample\n"));
    }

    #[test]
    fn binary_round_trip_and_corruption() {
        let e = ecdf(vec![0.1, 0.2, 7.5e-300, 1e300]);
        let mut buf = Vec::new();
        e.write_binary(&mut buf).unwrap();
        assert_eq!(&buf[..8], FIXTURE_MAGIC);
        assert_eq!(EmpiricalCdf::<f64>::read_binary(buf.as_slice()).unwrap(), e);
        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(EmpiricalCdf::<f64>::read_binary(bad.as_slice()).is_err());
        assert!(EmpiricalCdf::<f64>::read_binary(&buf[..buf.len() - 1]).is_err());
        // swap two samples: no longer sorted
        let mut unsorted = buf.clone();
        let end = unsorted.len();
        let (a, b) = (end - 16, end - 8);
        let tail: Vec<u8> = unsorted[b..].to_vec();
        let prev: Vec<u8> = unsorted[a..b].to_vec();
        unsorted[a..b].copy_from_slice(&tail);
        unsorted[b..].copy_from_slice(&prev);
        assert!(EmpiricalCdf::<f64>::read_binary(unsorted.as_slice()).is_err());
    }

    #[test]
    fn f32_binary_round_trip() {
        let e = EmpiricalCdf::new(vec![0.1f32, 2.5, 1e-30], 5, "x".into()).unwrap();
        let mut buf = Vec::new();
        e.write_binary(&mut buf).unwrap();
        assert_eq!(EmpiricalCdf::<f32>::read_binary(buf.as_slice()).unwrap(), e);
    }

    #[test]
    fn metric_edge_cases() {
        let e = ecdf((1..=200).map(|i| i as f64).collect());
        let mut p = MetricParams::new(1.0, 0.5, 1.0, 0.3, 0.0).unwrap();
        assert_eq!(mc_metric(&e, &p, McMetric::Outage).unwrap(), (0.0, 0.0));
        assert_eq!(mc_metric(&e, &p, McMetric::Bep).unwrap(), (0.3, 0.0));
        p.z_th = 1e9;
        assert_eq!(mc_metric(&e, &p, McMetric::Outage).unwrap(), (1.0, 0.0));
        let (r, se) = mc_metric(&e, &p, McMetric::AvgRate).unwrap();
        assert!(r > 0.0 && se > 0.0);
        let (eff, _) = mc_metric(&e, &p, McMetric::EffRate).unwrap();
        assert!(eff < r);
        assert!(mc_metric(&ecdf(vec![1.0; 99]), &p, McMetric::AvgRate).is_err());
    }
}
