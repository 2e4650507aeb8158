//! Discrete power-law fitting with bootstrap goodness of fit.
//!
//! The estimator follows the standard discrete MLE recipe: for each
//! candidate xmin among the distinct sample values, maximize the zeta-
//! normalized log likelihood in alpha, score the tail fit by KS distance,
//! and keep the minimizer. The goodness-of-fit p-value is a semi-parametric
//! bootstrap: synthetic datasets mix draws from the fitted tail with
//! resamples of the empirical body, are refitted from scratch, and the
//! p-value is the fraction fitting no better than the data.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::netbuild::CollocationNetwork;

#[derive(Debug, Error, PartialEq)]
pub enum PowerLawError {
    #[error("not applicable: {0}")]
    NotApplicable(&'static str),
    #[error("zero variance tail")]
    ZeroVarianceTail,
    #[error("need at least {need} samples >= xmin, have {have}")]
    TooFewSamples { need: usize, have: usize },
    #[error("fewer than 2 distinct values")]
    TooFewDistinct,
    #[error("invalid parameter: {0}")]
    BadParameter(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DegreeMode {
    In,
    Out,
    All,
}

/// Per-vertex degree counts for one network.
#[derive(Debug, Clone)]
pub struct DegreeSequence {
    pub mode: DegreeMode,
    pub counts: Vec<u64>,
}

/// Result of fitting a discrete power law to a sample's tail.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct PowerLawFit {
    pub xmin: u64,
    pub alpha: f64,
    pub ks_distance: f64,
    pub n_tail: usize,
    /// set when only two distinct values were available
    pub degenerate: bool,
}

/// Estimator variant for [`mle_alpha`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlphaEstimator {
    /// Exact discrete MLE via golden-section search over (1, 20].
    Exact,
    /// Closed-form continuous approximation 1 + n / Σ ln(x / (xmin - 0.5)).
    Approximate,
}

const ALPHA_LO: f64 = 1.0 + 1e-6;
const ALPHA_HI: f64 = 20.0;
const ALPHA_TOL: f64 = 1e-6;

/// Hurwitz zeta ζ(s, a) for s > 1, a ≥ 1, by direct summation with an
/// Euler-Maclaurin tail correction; absolute error well below 1e-10.
pub fn hurwitz_zeta(s: f64, a: f64) -> f64 {
    debug_assert!(s > 1.0 && a >= 1.0);
    // Bernoulli numbers B2, B4, ... B14
    const BERN: [f64; 7] = [
        1.0 / 6.0,
        -1.0 / 30.0,
        1.0 / 42.0,
        -1.0 / 30.0,
        5.0 / 66.0,
        -691.0 / 2730.0,
        7.0 / 6.0,
    ];
    let cutoff = 18.0f64.max(a);
    let n_terms = (cutoff - a).ceil() as usize;
    let mut sum = 0.0;
    for k in 0..n_terms {
        sum += (a + k as f64).powf(-s);
    }
    let big_a = a + n_terms as f64;
    sum += big_a.powf(1.0 - s) / (s - 1.0);
    sum += 0.5 * big_a.powf(-s);
    // Σ_j B_{2j}/(2j)! * s(s+1)...(s+2j-2) * A^{-s-2j+1}
    let mut poch = s; // rising factorial s(s+1)...
    let mut fact = 2.0; // (2j)!
    let mut power = big_a.powf(-s - 1.0);
    let inv_a2 = 1.0 / (big_a * big_a);
    for (j, &b) in BERN.iter().enumerate() {
        sum += b / fact * poch * power;
        // advance to next even order
        let two_j = 2.0 * (j as f64 + 1.0);
        poch *= (s + two_j - 1.0) * (s + two_j);
        fact *= (two_j + 1.0) * (two_j + 2.0);
        power *= inv_a2;
    }
    sum
}

/// Degree counts per vertex. Self-loops contribute 1 to in and 1 to out for
/// directed networks, and 2 to the degree for undirected ones.
pub fn degree_sequence(net: &CollocationNetwork, mode: DegreeMode) -> Result<DegreeSequence, PowerLawError> {
    if matches!(mode, DegreeMode::In | DegreeMode::Out) && !net.directed {
        return Err(PowerLawError::NotApplicable("in/out degree on undirected network"));
    }
    let mut counts = vec![0u64; net.n_vertices()];
    for (a, b) in net.edges() {
        match mode {
            DegreeMode::In => counts[b as usize] += 1,
            DegreeMode::Out => counts[a as usize] += 1,
            DegreeMode::All => {
                if net.directed {
                    counts[a as usize] += 1;
                    counts[b as usize] += 1;
                } else {
                    // undirected self-loop contributes 2 to its endpoint
                    counts[a as usize] += 1;
                    counts[b as usize] += 1;
                }
            }
        }
    }
    Ok(DegreeSequence { mode, counts })
}

fn tail_stats(sorted: &[u64], xmin: u64) -> (usize, f64) {
    let start = sorted.partition_point(|&x| x < xmin);
    let tail = &sorted[start..];
    let sum_ln: f64 = tail.iter().map(|&x| (x as f64).ln()).sum();
    (tail.len(), sum_ln)
}

fn log_likelihood(alpha: f64, xmin: u64, n_tail: usize, sum_ln: f64) -> f64 {
    -(n_tail as f64) * hurwitz_zeta(alpha, xmin as f64).ln() - alpha * sum_ln
}

fn golden_section_max(xmin: u64, n_tail: usize, sum_ln: f64) -> f64 {
    let inv_phi = (5.0f64.sqrt() - 1.0) / 2.0;
    let mut lo = ALPHA_LO;
    let mut hi = ALPHA_HI;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = log_likelihood(x1, xmin, n_tail, sum_ln);
    let mut f2 = log_likelihood(x2, xmin, n_tail, sum_ln);
    while hi - lo > ALPHA_TOL {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = log_likelihood(x2, xmin, n_tail, sum_ln);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = log_likelihood(x1, xmin, n_tail, sum_ln);
        }
    }
    (lo + hi) / 2.0
}

/// Fit alpha for a fixed xmin over the samples >= xmin.
pub fn mle_alpha(samples: &[u64], xmin: u64, estimator: AlphaEstimator) -> Result<f64, PowerLawError> {
    if xmin == 0 {
        return Err(PowerLawError::BadParameter("xmin must be >= 1"));
    }
    let mut sorted: Vec<u64> = samples.iter().copied().filter(|&x| x >= xmin).collect();
    sorted.sort_unstable();
    if sorted.len() < 2 {
        return Err(PowerLawError::TooFewSamples {
            need: 2,
            have: sorted.len(),
        });
    }
    if sorted.first() == sorted.last() {
        return Err(PowerLawError::ZeroVarianceTail);
    }
    match estimator {
        AlphaEstimator::Exact => {
            let (n_tail, sum_ln) = tail_stats(&sorted, xmin);
            Ok(golden_section_max(xmin, n_tail, sum_ln))
        }
        AlphaEstimator::Approximate => {
            let denom: f64 = sorted
                .iter()
                .map(|&x| (x as f64 / (xmin as f64 - 0.5)).ln())
                .sum();
            Ok(1.0 + sorted.len() as f64 / denom)
        }
    }
}

/// KS distance between the empirical tail CDF and the fitted discrete CDF,
/// evaluated at the distinct tail values.
fn ks_distance(sorted_tail: &[u64], xmin: u64, alpha: f64) -> f64 {
    let n = sorted_tail.len() as f64;
    let z_xmin = hurwitz_zeta(alpha, xmin as f64);
    let mut d: f64 = 0.0;
    let mut i = 0usize;
    while i < sorted_tail.len() {
        let x = sorted_tail[i];
        let mut j = i;
        while j + 1 < sorted_tail.len() && sorted_tail[j + 1] == x {
            j += 1;
        }
        // empirical and fitted P(X <= x) over the tail
        let emp = (j + 1) as f64 / n;
        let fit = 1.0 - hurwitz_zeta(alpha, x as f64 + 1.0) / z_xmin;
        let diff = (emp - fit).abs();
        if diff > d {
            d = diff;
        }
        // also check the lower step edge
        let emp_lo = i as f64 / n;
        let fit_lo = 1.0 - hurwitz_zeta(alpha, x as f64) / z_xmin;
        let diff_lo = (emp_lo - fit_lo).abs();
        if diff_lo > d {
            d = diff_lo;
        }
        i = j + 1;
    }
    d
}

/// Fit with a fixed xmin (the `--xmin-fixed` mode).
pub fn fit_fixed_xmin(samples: &[u64], xmin: u64) -> Result<PowerLawFit, PowerLawError> {
    let alpha = mle_alpha(samples, xmin, AlphaEstimator::Exact)?;
    let mut tail: Vec<u64> = samples.iter().copied().filter(|&x| x >= xmin).collect();
    tail.sort_unstable();
    let ks = ks_distance(&tail, xmin, alpha);
    let mut distinct = tail.clone();
    distinct.dedup();
    Ok(PowerLawFit {
        xmin,
        alpha,
        ks_distance: ks,
        n_tail: tail.len(),
        degenerate: distinct.len() == 2,
    })
}

/// Estimate xmin by scanning the distinct sample values and keeping the
/// candidate whose tail fit has the smallest KS distance. Ties break toward
/// the smaller xmin.
pub fn select_xmin(samples: &[u64]) -> Result<PowerLawFit, PowerLawError> {
    let mut sorted: Vec<u64> = samples.iter().copied().filter(|&x| x >= 1).collect();
    sorted.sort_unstable();
    let mut distinct = sorted.clone();
    distinct.dedup();
    if distinct.len() < 2 {
        return Err(PowerLawError::TooFewDistinct);
    }
    if distinct.len() == 2 {
        // degenerate: fit at the smaller value, flag it
        return fit_fixed_xmin(&sorted, distinct[0]);
    }
    let mut best: Option<PowerLawFit> = None;
    for &xmin in &distinct {
        let start = sorted.partition_point(|&x| x < xmin);
        let tail = &sorted[start..];
        if tail.len() < 2 || tail.first() == tail.last() {
            continue;
        }
        let (n_tail, sum_ln) = tail_stats(&sorted, xmin);
        let alpha = golden_section_max(xmin, n_tail, sum_ln);
        let ks = ks_distance(tail, xmin, alpha);
        let better = match &best {
            None => true,
            Some(b) => ks < b.ks_distance, // strict: ties keep the smaller xmin
        };
        if better {
            best = Some(PowerLawFit {
                xmin,
                alpha,
                ks_distance: ks,
                n_tail,
                degenerate: false,
            });
        }
    }
    best.ok_or(PowerLawError::ZeroVarianceTail)
}

/// Draws from the discrete power law P(x) ∝ x^-alpha, x >= xmin.
///
/// Inverse-CDF on the Hurwitz-zeta-normalized survival function; a
/// recursively extended table covers the common range and a doubling +
/// bisection search the extreme tail.
pub struct PowerLawSampler {
    alpha: f64,
    xmin: u64,
    z_xmin: f64,
    /// survival[i] = P(X >= xmin + i)
    survival: Vec<f64>,
}

impl PowerLawSampler {
    pub fn new(alpha: f64, xmin: u64) -> Result<Self, PowerLawError> {
        if alpha <= 1.0 {
            return Err(PowerLawError::BadParameter("alpha must be > 1"));
        }
        if xmin < 1 {
            return Err(PowerLawError::BadParameter("xmin must be >= 1"));
        }
        Ok(PowerLawSampler {
            alpha,
            xmin,
            z_xmin: hurwitz_zeta(alpha, xmin as f64),
            survival: vec![1.0],
        })
    }

    fn survival_at(&self, x: u64) -> f64 {
        hurwitz_zeta(self.alpha, x as f64) / self.z_xmin
    }

    fn extend_table(&mut self, len: usize) {
        while self.survival.len() < len {
            let i = self.survival.len();
            let x = self.xmin + i as u64 - 1;
            let step = (x as f64).powf(-self.alpha) / self.z_xmin;
            self.survival.push((self.survival[i - 1] - step).max(0.0));
        }
    }

    /// One draw given a uniform u in (0, 1): the largest x with P(X >= x) > u.
    pub fn draw_with(&mut self, u: f64) -> u64 {
        const TABLE_CAP: usize = 1 << 16;
        if self.survival.len() < TABLE_CAP {
            self.extend_table(TABLE_CAP.min(1024.max(self.survival.len() * 2)));
        }
        let last = *self.survival.last().unwrap();
        if u >= last {
            // table lookup: find first index with survival <= u, take previous
            let idx = self.survival.partition_point(|&s| s > u);
            return self.xmin + idx as u64 - 1;
        }
        if self.survival.len() < TABLE_CAP {
            self.extend_table(TABLE_CAP);
            let last = *self.survival.last().unwrap();
            if u >= last {
                let idx = self.survival.partition_point(|&s| s > u);
                return self.xmin + idx as u64 - 1;
            }
        }
        // extreme tail: doubling then bisection on the zeta survival
        let mut lo = self.xmin + self.survival.len() as u64 - 1; // S(lo) > u
        let mut hi = lo * 2;
        while self.survival_at(hi) > u {
            lo = hi;
            hi *= 2;
        }
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if self.survival_at(mid) > u {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }

    pub fn sample(&mut self, n: usize, rng: &mut impl Rng) -> Vec<u64> {
        (0..n).map(|_| self.draw_with(rng.gen_range(0.0..1.0))).collect()
    }
}

/// n i.i.d. draws from the discrete power law, deterministic per seed.
pub fn sample_powerlaw(alpha: f64, xmin: u64, n: usize, seed: u64) -> Result<Vec<u64>, PowerLawError> {
    let mut sampler = PowerLawSampler::new(alpha, xmin)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(sampler.sample(n, &mut rng))
}

fn derive_seed(seed: u64, tag: u64) -> u64 {
    // FNV-1a over the two words
    let mut h = 0xcbf29ce484222325u64;
    for b in seed.to_le_bytes().iter().chain(tag.to_le_bytes().iter()) {
        h ^= *b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

/// Semi-parametric bootstrap goodness-of-fit p-value.
///
/// Each replicate draws n values, from the fitted tail with probability
/// n_tail/n and uniformly from the empirical body otherwise, refits
/// (xmin, alpha) from scratch and records its KS distance. The p-value is
/// the fraction of replicates with KS >= the observed distance.
pub fn gof_pvalue(samples: &[u64], fit: &PowerLawFit, b: usize, seed: u64) -> Result<f64, PowerLawError> {
    if b == 0 {
        return Err(PowerLawError::BadParameter("bootstrap count must be >= 1"));
    }
    if fit.n_tail < 2 {
        return Err(PowerLawError::TooFewSamples { need: 2, have: fit.n_tail });
    }
    let positive: Vec<u64> = samples.iter().copied().filter(|&x| x >= 1).collect();
    let body: Vec<u64> = positive.iter().copied().filter(|&x| x < fit.xmin).collect();
    let n = positive.len();
    let p_tail = fit.n_tail as f64 / n as f64;
    let mut sampler = PowerLawSampler::new(fit.alpha, fit.xmin)?;
    let mut exceed = 0usize;
    for r in 0..b {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, r as u64));
        let replicate: Vec<u64> = (0..n)
            .map(|_| {
                if body.is_empty() || rng.gen_range(0.0..1.0) < p_tail {
                    sampler.draw_with(rng.gen_range(0.0..1.0))
                } else {
                    body[rng.gen_range(0..body.len())]
                }
            })
            .collect();
        match select_xmin(&replicate) {
            Ok(refit) if refit.ks_distance >= fit.ks_distance => exceed += 1,
            Ok(_) => {}
            // a degenerate replicate cannot fit better than the data
            Err(_) => exceed += 1,
        }
    }
    Ok(exceed as f64 / b as f64)
}
