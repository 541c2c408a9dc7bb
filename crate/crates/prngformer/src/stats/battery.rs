//! The eight statistical tests. Each comes in two layers: a private
//! statistic function that evaluates the published formulas on any
//! stream, and a public wrapper that enforces the documented length and
//! parameter minimums before producing a [`TestReport`]. The private
//! layer exists so the standard's small worked examples can anchor the
//! unit tests at sizes the public preconditions would reject.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use super::{BitStream, StatsError, TestReport};
use crate::special::{erfc, igamc, normal_cdf};

const LN2: f64 = std::f64::consts::LN_2;

/// Frequency (monobit) test. Minimum length 100.
pub fn monobit(stream: &BitStream, alpha: f64) -> Result<TestReport, StatsError> {
    require_len("monobit", stream, 100)?;
    let (s_obs, p, s_n) = monobit_stat(stream);
    Ok(TestReport::from_p("monobit", s_obs, p, alpha).with_extras(&[("s_n", s_n)]))
}

fn monobit_stat(stream: &BitStream) -> (f64, f64, f64) {
    let n = stream.len() as f64;
    let s_n = 2.0 * stream.ones() as f64 - n;
    let s_obs = s_n.abs() / n.sqrt();
    (s_obs, erfc(s_obs / std::f64::consts::SQRT_2), s_n)
}

/// Block frequency test with block size `m`. Minimum length max(M, 100);
/// the standard recommends M ≥ 20 and M > n/100.
pub fn block_frequency(
    stream: &BitStream,
    m: usize,
    alpha: f64,
) -> Result<TestReport, StatsError> {
    if m < 2 {
        return Err(StatsError::BadParam {
            test: "block-frequency",
            message: format!("block size must be at least 2, got {m}"),
        });
    }
    require_len("block-frequency", stream, m.max(100))?;
    let (chi, p, blocks) = block_frequency_stat(stream, m);
    Ok(TestReport::from_p("block-frequency", chi, p, alpha)
        .with_extras(&[("blocks", blocks as f64), ("block_size", m as f64)]))
}

fn block_frequency_stat(stream: &BitStream, m: usize) -> (f64, f64, usize) {
    let blocks = stream.len() / m;
    let mut chi = 0.0;
    for b in 0..blocks {
        let ones = (b * m..(b + 1) * m).filter(|&i| stream.get(i)).count();
        let pi = ones as f64 / m as f64;
        chi += (pi - 0.5) * (pi - 0.5);
    }
    chi *= 4.0 * m as f64;
    (chi, igamc(blocks as f64 / 2.0, chi / 2.0), blocks)
}

/// Runs test. Minimum length 100. When the one-proportion pretest fails
/// the p-value is 0 by convention and the report fails.
pub fn runs(stream: &BitStream, alpha: f64) -> Result<TestReport, StatsError> {
    require_len("runs", stream, 100)?;
    let (v_obs, p) = runs_stat(stream);
    Ok(TestReport::from_p("runs", v_obs, p, alpha))
}

fn runs_stat(stream: &BitStream) -> (f64, f64) {
    let n = stream.len();
    let nf = n as f64;
    let pi = stream.ones() as f64 / nf;
    let v = 1 + (0..n - 1).filter(|&k| stream.get(k) != stream.get(k + 1)).count();
    if (pi - 0.5).abs() >= 2.0 / nf.sqrt() {
        return (v as f64, 0.0);
    }
    let num = (v as f64 - 2.0 * nf * pi * (1.0 - pi)).abs();
    let den = 2.0 * (2.0 * nf).sqrt() * pi * (1.0 - pi);
    (v as f64, erfc(num / den))
}

/// Longest run of ones test. Minimum length 128; the block size and
/// class probabilities switch at the standard's 6272- and 750000-bit
/// break points. The M=8 probabilities are the exact dyadic values whose
/// 4-decimal roundings appear in the standard's table.
pub fn longest_run(stream: &BitStream, alpha: f64) -> Result<TestReport, StatsError> {
    require_len("longest-run", stream, 128)?;
    let (chi, p, nu) = longest_run_stat(stream);
    let mut report = TestReport::from_p("longest-run", chi, p, alpha);
    for (j, &count) in nu.iter().enumerate() {
        report.extras.insert(format!("nu{j}"), count as f64);
    }
    Ok(report)
}

fn longest_run_stat(stream: &BitStream) -> (f64, f64, Vec<usize>) {
    let n = stream.len();
    let (m, lo, hi, piv): (usize, usize, usize, &[f64]) = if n < 6272 {
        (8, 1, 4, &[0.21484375, 0.3671875, 0.23046875, 0.1875])
    } else if n < 750_000 {
        (
            128,
            4,
            9,
            &[0.1174035788, 0.242955959, 0.249363483, 0.17517706, 0.102701071, 0.112398847],
        )
    } else {
        (
            10_000,
            10,
            16,
            &[0.0882, 0.2092, 0.2483, 0.1933, 0.1208, 0.0675, 0.0727],
        )
    };
    let blocks = n / m;
    let mut nu = vec![0usize; hi - lo + 1];
    for b in 0..blocks {
        let mut longest = 0usize;
        let mut cur = 0usize;
        for i in b * m..(b + 1) * m {
            cur = if stream.get(i) { cur + 1 } else { 0 };
            longest = longest.max(cur);
        }
        nu[longest.clamp(lo, hi) - lo] += 1;
    }
    let nf = blocks as f64;
    let chi: f64 = nu
        .iter()
        .zip(piv)
        .map(|(&count, &pr)| {
            let e = nf * pr;
            (count as f64 - e) * (count as f64 - e) / e
        })
        .sum();
    let k = (hi - lo) as f64;
    (chi, igamc(k / 2.0, chi / 2.0), nu)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CusumMode {
    Forward,
    Reverse,
}

/// Cumulative sums test in one direction. Minimum length 100. The
/// summation bounds use integer division truncating toward zero, the
/// convention of the standard's reference implementation.
pub fn cusum(stream: &BitStream, mode: CusumMode, alpha: f64) -> Result<TestReport, StatsError> {
    require_len("cusum", stream, 100)?;
    let (z, p) = cusum_stat(stream, mode);
    let name = match mode {
        CusumMode::Forward => "cusum-fwd",
        CusumMode::Reverse => "cusum-rev",
    };
    Ok(TestReport::from_p(name, z as f64, p, alpha))
}

fn cusum_stat(stream: &BitStream, mode: CusumMode) -> (i64, f64) {
    let n = stream.len();
    let mut s = 0i64;
    let mut z = 0i64;
    for k in 0..n {
        let i = match mode {
            CusumMode::Forward => k,
            CusumMode::Reverse => n - 1 - k,
        };
        s += if stream.get(i) { 1 } else { -1 };
        z = z.max(s.abs());
    }
    if z == 0 {
        return (0, 0.0);
    }
    let sq = (n as f64).sqrt();
    let zf = z as f64;
    let nz = n as i64 / z;
    let mut t1 = 0.0;
    for k in (-nz + 1) / 4..=(nz - 1) / 4 {
        let k = k as f64;
        t1 += normal_cdf((4.0 * k + 1.0) * zf / sq) - normal_cdf((4.0 * k - 1.0) * zf / sq);
    }
    let mut t2 = 0.0;
    for k in (-nz - 3) / 4..=(nz - 1) / 4 {
        let k = k as f64;
        t2 += normal_cdf((4.0 * k + 3.0) * zf / sq) - normal_cdf((4.0 * k + 1.0) * zf / sq);
    }
    // The three-term combination can land an ulp outside [0, 1].
    (z, (1.0 - t1 + t2).clamp(0.0, 1.0))
}

/// Serial test with pattern length `m`. Minimum length 100, and m must
/// lie in [2, min(16, log2(n) − 2)]. The reported p-value is the first
/// of the standard's pair; the second is in the extras under `p2`.
pub fn serial(stream: &BitStream, m: u32, alpha: f64) -> Result<TestReport, StatsError> {
    require_len("serial", stream, 100)?;
    if !(2..=16).contains(&m) || 1usize << (m + 2) > stream.len() {
        return Err(StatsError::BadParam {
            test: "serial",
            message: format!(
                "pattern length {m} outside [2, min(16, log2(n) - 2)] for n = {}",
                stream.len()
            ),
        });
    }
    let (d1, p1, d2, p2) = serial_stat(stream, m);
    Ok(TestReport::from_p("serial", d1, p1, alpha).with_extras(&[
        ("p2", p2),
        ("del2_psi2", d2),
        ("pattern_m", m as f64),
    ]))
}

fn serial_stat(stream: &BitStream, m: u32) -> (f64, f64, f64, f64) {
    let psi_m = psi_sq(stream, m);
    let psi_m1 = psi_sq(stream, m - 1);
    let psi_m2 = psi_sq(stream, m.saturating_sub(2));
    // Both differences are nonnegative by the nesting of pattern
    // frequencies; cancellation between the large ψ² sums can land an
    // ulp below zero, outside igamc's domain.
    let d1 = (psi_m - psi_m1).max(0.0);
    let d2 = (psi_m - 2.0 * psi_m1 + psi_m2).max(0.0);
    let p1 = igamc(2f64.powi(m as i32 - 2), d1 / 2.0);
    let p2 = igamc(2f64.powi(m as i32 - 3), d2 / 2.0);
    (d1, p1, d2, p2)
}

/// ψ²_m: the overlapping m-pattern frequency statistic, with the stream
/// treated as a cycle. ψ²_0 = 0 by definition.
fn psi_sq(stream: &BitStream, m: u32) -> f64 {
    if m == 0 {
        return 0.0;
    }
    let n = stream.len();
    let mut counts = vec![0u64; 1usize << m];
    for i in 0..n {
        let mut pat = 0usize;
        for j in 0..m as usize {
            pat = pat << 1 | stream.get((i + j) % n) as usize;
        }
        counts[pat] += 1;
    }
    let nf = n as f64;
    let sum_sq: f64 = counts.iter().map(|&c| c as f64 * c as f64).sum();
    2f64.powi(m as i32) / nf * sum_sq - nf
}

/// Approximate entropy test with pattern length `m`. Minimum length 100,
/// and m must satisfy 2^(m+5) < n per the standard's recommendation
/// m < log2(n) − 5.
pub fn approximate_entropy(
    stream: &BitStream,
    m: u32,
    alpha: f64,
) -> Result<TestReport, StatsError> {
    require_len("approximate-entropy", stream, 100)?;
    if m < 1 || m > 16 || 1usize << (m + 5) >= stream.len() {
        return Err(StatsError::BadParam {
            test: "approximate-entropy",
            message: format!(
                "pattern length {m} outside [1, log2(n) - 5) for n = {}",
                stream.len()
            ),
        });
    }
    let (chi, p, apen) = approximate_entropy_stat(stream, m);
    Ok(TestReport::from_p("approximate-entropy", chi, p, alpha)
        .with_extras(&[("apen", apen), ("pattern_m", m as f64)]))
}

fn approximate_entropy_stat(stream: &BitStream, m: u32) -> (f64, f64, f64) {
    let n = stream.len() as f64;
    let apen = pattern_entropy(stream, m) - pattern_entropy(stream, m + 1);
    // ApEn is at most ln 2, so chi is nonnegative; cancellation in the
    // entropy difference can land an ulp below zero, outside igamc's
    // domain.
    let chi = (2.0 * n * (LN2 - apen)).max(0.0);
    (chi, igamc(2f64.powi(m as i32 - 1), chi / 2.0), apen)
}

/// φ_m = Σ (c/n)·ln(c/n) over the cyclic overlapping m-pattern counts.
fn pattern_entropy(stream: &BitStream, m: u32) -> f64 {
    if m == 0 {
        return 0.0;
    }
    let n = stream.len();
    let mut counts = vec![0u64; 1usize << m];
    for i in 0..n {
        let mut pat = 0usize;
        for j in 0..m as usize {
            pat = pat << 1 | stream.get((i + j) % n) as usize;
        }
        counts[pat] += 1;
    }
    let nf = n as f64;
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let f = c as f64 / nf;
            f * f.ln()
        })
        .sum()
}

/// Spectral (discrete Fourier transform) test. Minimum length 1000. The
/// statistic is the normalized excess of sub-threshold DFT moduli over
/// the first half of the spectrum.
pub fn spectral_dft(stream: &BitStream, alpha: f64) -> Result<TestReport, StatsError> {
    require_len("spectral-dft", stream, 1000)?;
    let (d, p, n1, threshold) = spectral_stat(stream);
    Ok(TestReport::from_p("spectral-dft", d, p, alpha)
        .with_extras(&[("n1", n1 as f64), ("threshold", threshold)]))
}

fn spectral_stat(stream: &BitStream) -> (f64, f64, usize, f64) {
    let n = stream.len();
    let nf = n as f64;
    let mut buf: Vec<Complex<f64>> =
        stream.signs().into_iter().map(|x| Complex { re: x, im: 0.0 }).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let threshold = (nf * (1.0 / 0.05f64).ln()).sqrt();
    let n1 = buf[..n / 2].iter().filter(|c| c.norm() < threshold).count();
    let n0 = 0.95 * nf / 2.0;
    let d = (n1 as f64 - n0) / (nf * 0.95 * 0.05 / 4.0).sqrt();
    (d, erfc(d.abs() / std::f64::consts::SQRT_2), n1, threshold)
}

fn require_len(test: &'static str, stream: &BitStream, min: usize) -> Result<(), StatsError> {
    if stream.len() < min {
        return Err(StatsError::TooShort { test, min, got: stream.len() });
    }
    Ok(())
}
