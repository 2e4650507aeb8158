//! Significance tests and the special-function kernels behind them.
//!
//! All tests are two-sided. Ranks use midranks for ties. The CDF kernels
//! (regularized incomplete gamma and beta, asymptotic Kolmogorov) are
//! implemented with series/continued-fraction expansions accurate to
//! roughly 1e-12 on the tested domain.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("each group needs at least {0} values")]
    GroupTooSmall(usize),
    #[error("need at least two groups")]
    TooFewGroups,
    #[error("series too short: {0} < 2")]
    SeriesTooShort(usize),
    #[error("invalid distribution parameter: {0}")]
    BadParameter(&'static str),
    #[error("bonferroni family size {m} smaller than list length {len}")]
    BadFamilySize { m: usize, len: usize },
}

/// Outcome of a significance test.
#[derive(Debug, Clone, serde::Serialize)]
pub struct TestResult {
    pub test_name: String,
    pub statistic: f64,
    pub p_value: f64,
    pub group_sizes: Vec<usize>,
    pub notes: Vec<String>,
}

impl TestResult {
    fn new(name: &str, statistic: f64, p_value: f64, group_sizes: Vec<usize>) -> Self {
        TestResult {
            test_name: name.to_string(),
            statistic,
            p_value: p_value.clamp(0.0, 1.0),
            group_sizes,
            notes: Vec::new(),
        }
    }

    fn with_note(mut self, note: &str) -> Self {
        self.notes.push(note.to_string());
        self
    }
}

// ---------------------------------------------------------------------------
// special functions

fn ln_gamma(x: f64) -> f64 {
    // Lanczos, g=7, n=9
    const COEF: [f64; 9] = [
        0.99999999999980993,
        676.5203681218851,
        -1259.1392167224028,
        771.32342877765313,
        -176.61502916214059,
        12.507343278686905,
        -0.13857109526572012,
        9.9843695780195716e-6,
        1.5056327351493116e-7,
    ];
    if x < 0.5 {
        // reflection
        std::f64::consts::PI.ln() - (std::f64::consts::PI * x).sin().abs().ln() - ln_gamma(1.0 - x)
    } else {
        let x = x - 1.0;
        let mut a = COEF[0];
        let t = x + 7.5;
        for (i, &c) in COEF.iter().enumerate().skip(1) {
            a += c / (x + i as f64);
        }
        0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
    }
}

/// Regularized lower incomplete gamma P(a, x).
fn gamma_p(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x < a + 1.0 {
        // series
        let mut term = 1.0 / a;
        let mut sum = term;
        let mut n = a;
        for _ in 0..500 {
            n += 1.0;
            term *= x / n;
            sum += term;
            if term.abs() < sum.abs() * 1e-16 {
                break;
            }
        }
        sum * (-x + a * x.ln() - ln_gamma(a)).exp()
    } else {
        1.0 - gamma_q_cf(a, x)
    }
}

/// Regularized upper incomplete gamma Q(a, x) by Lentz continued fraction.
fn gamma_q_cf(a: f64, x: f64) -> f64 {
    let tiny = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..500 {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < tiny {
            d = tiny;
        }
        c = b + an / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            break;
        }
    }
    h * (-x + a * x.ln() - ln_gamma(a)).exp()
}

/// Regularized incomplete beta I_x(a, b) by Lentz continued fraction.
fn beta_inc(a: f64, b: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let ln_front = ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * (1.0 - x).ln();
    if x < (a + 1.0) / (a + b + 2.0) {
        ln_front.exp() * beta_cf(a, b, x) / a
    } else {
        // complement branch; the recursive call always takes the CF branch
        1.0 - ln_front.exp() * beta_cf(b, a, 1.0 - x) / b
    }
}

fn beta_cf(a: f64, b: f64, x: f64) -> f64 {
    let tiny = 1e-300;
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < tiny {
        d = tiny;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..500 {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = 1.0 + aa / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = 1.0 + aa / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            break;
        }
    }
    h
}

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    let half_q = 0.5 * gamma_q_cf_checked(0.5, x * x / 2.0);
    if x >= 0.0 {
        1.0 - half_q
    } else {
        half_q
    }
}

fn gamma_q_cf_checked(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        1.0
    } else if x < a + 1.0 {
        1.0 - gamma_p(a, x)
    } else {
        gamma_q_cf(a, x)
    }
}

/// Chi-square CDF with k degrees of freedom.
pub fn chi_square_cdf(x: f64, k: f64) -> Result<f64, StatsError> {
    if k <= 0.0 {
        return Err(StatsError::BadParameter("chi2 dof must be > 0"));
    }
    Ok(if x <= 0.0 { 0.0 } else { gamma_p(k / 2.0, x / 2.0) })
}

/// Student's t CDF with `dof` degrees of freedom.
pub fn t_cdf(t: f64, dof: f64) -> Result<f64, StatsError> {
    if dof <= 0.0 {
        return Err(StatsError::BadParameter("t dof must be > 0"));
    }
    let x = dof / (dof + t * t);
    let tail = 0.5 * beta_inc(dof / 2.0, 0.5, x);
    Ok(if t >= 0.0 { 1.0 - tail } else { tail })
}

/// F distribution CDF with (d1, d2) degrees of freedom.
pub fn f_cdf(f: f64, d1: f64, d2: f64) -> Result<f64, StatsError> {
    if d1 <= 0.0 || d2 <= 0.0 {
        return Err(StatsError::BadParameter("F dof must be > 0"));
    }
    if f <= 0.0 {
        return Ok(0.0);
    }
    Ok(beta_inc(d1 / 2.0, d2 / 2.0, d1 * f / (d1 * f + d2)))
}

/// Asymptotic Kolmogorov distribution CDF: P(K ≤ lambda).
pub fn kolmogorov_cdf(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 0.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let term = (-2.0 * (k as f64) * (k as f64) * lambda * lambda).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (1.0 - 2.0 * sum).clamp(0.0, 1.0)
}

// ---------------------------------------------------------------------------
// rank helpers

/// Midranks of `values` (1-based), plus the tie-group sizes.
fn midranks(values: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).expect("NaN in rank data"));
    let mut ranks = vec![0.0; n];
    let mut ties = Vec::new();
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            ranks[idx] = rank;
        }
        ties.push(j - i + 1);
        i = j + 1;
    }
    (ranks, ties)
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() as f64 - 1.0)
}

// ---------------------------------------------------------------------------
// omnibus tests

/// One-way ANOVA F test.
pub fn one_way_anova(groups: &[Vec<f64>]) -> Result<TestResult, StatsError> {
    if groups.len() < 2 {
        return Err(StatsError::TooFewGroups);
    }
    if groups.iter().any(|g| g.len() < 2) {
        return Err(StatsError::GroupTooSmall(2));
    }
    let k = groups.len() as f64;
    let n: usize = groups.iter().map(|g| g.len()).sum();
    let grand = groups.iter().flatten().sum::<f64>() / n as f64;
    let ssb: f64 = groups
        .iter()
        .map(|g| {
            let m = mean(g);
            g.len() as f64 * (m - grand) * (m - grand)
        })
        .sum();
    let ssw: f64 = groups
        .iter()
        .map(|g| {
            let m = mean(g);
            g.iter().map(|x| (x - m) * (x - m)).sum::<f64>()
        })
        .sum();
    let df_b = k - 1.0;
    let df_w = n as f64 - k;
    let sizes: Vec<usize> = groups.iter().map(|g| g.len()).collect();
    if ssw == 0.0 {
        return Ok(if ssb == 0.0 {
            TestResult::new("anova", 0.0, 1.0, sizes).with_note("zero variance everywhere")
        } else {
            TestResult::new("anova", f64::INFINITY, 0.0, sizes).with_note("zero within-group variance")
        });
    }
    let f = (ssb / df_b) / (ssw / df_w);
    let p = 1.0 - f_cdf(f, df_b, df_w)?;
    Ok(TestResult::new("anova", f, p, sizes))
}

/// Kruskal-Wallis H test with tie correction.
pub fn kruskal_wallis(groups: &[Vec<f64>]) -> Result<TestResult, StatsError> {
    if groups.len() < 2 {
        return Err(StatsError::TooFewGroups);
    }
    if groups.iter().any(|g| g.len() < 2) {
        return Err(StatsError::GroupTooSmall(2));
    }
    let all: Vec<f64> = groups.iter().flatten().copied().collect();
    let n = all.len() as f64;
    let (ranks, ties) = midranks(&all);
    let sizes: Vec<usize> = groups.iter().map(|g| g.len()).collect();
    if ties.len() == 1 {
        return Ok(TestResult::new("kruskal_wallis", 0.0, 1.0, sizes).with_note("all values identical"));
    }
    let mut h = 0.0;
    let mut offset = 0;
    for g in groups {
        let r_sum: f64 = ranks[offset..offset + g.len()].iter().sum();
        h += r_sum * r_sum / g.len() as f64;
        offset += g.len();
    }
    h = 12.0 / (n * (n + 1.0)) * h - 3.0 * (n + 1.0);
    let tie_corr = 1.0 - ties.iter().map(|&t| (t * t * t - t) as f64).sum::<f64>() / (n * n * n - n);
    h /= tie_corr;
    let p = 1.0 - chi_square_cdf(h, groups.len() as f64 - 1.0)?;
    Ok(TestResult::new("kruskal_wallis", h, p, sizes))
}

// ---------------------------------------------------------------------------
// two-sample tests

/// Welch's unequal-variance two-sided t test.
pub fn t_test(a: &[f64], b: &[f64]) -> Result<TestResult, StatsError> {
    if a.len() < 2 || b.len() < 2 {
        return Err(StatsError::GroupTooSmall(2));
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (va, vb) = (variance(a), variance(b));
    let sizes = vec![a.len(), b.len()];
    let se2 = va / na + vb / nb;
    if se2 == 0.0 {
        let identical = mean(a) == mean(b);
        return Ok(if identical {
            TestResult::new("t_welch", 0.0, 1.0, sizes).with_note("zero variance in both samples")
        } else {
            TestResult::new("t_welch", f64::INFINITY * (mean(a) - mean(b)).signum(), 0.0, sizes)
                .with_note("zero variance in both samples")
        });
    }
    let t = (mean(a) - mean(b)) / se2.sqrt();
    let dof = se2 * se2 / ((va / na).powi(2) / (na - 1.0) + (vb / nb).powi(2) / (nb - 1.0));
    let p = 2.0 * t_cdf(-t.abs(), dof)?;
    Ok(TestResult::new("t_welch", t, p, sizes))
}

/// Mann-Whitney U with normal approximation, continuity and tie correction.
pub fn mann_whitney_u(a: &[f64], b: &[f64]) -> Result<TestResult, StatsError> {
    if a.len() < 2 || b.len() < 2 {
        return Err(StatsError::GroupTooSmall(2));
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let all: Vec<f64> = a.iter().chain(b.iter()).copied().collect();
    let (ranks, ties) = midranks(&all);
    let r_a: f64 = ranks[..a.len()].iter().sum();
    let u_a = r_a - na * (na + 1.0) / 2.0;
    let sizes = vec![a.len(), b.len()];
    if ties.len() == 1 {
        return Ok(TestResult::new("mann_whitney_u", u_a, 1.0, sizes).with_note("all values identical"));
    }
    let n = na + nb;
    let mu = na * nb / 2.0;
    let tie_term = ties.iter().map(|&t| (t * t * t - t) as f64).sum::<f64>() / (n * (n - 1.0));
    let sigma2 = na * nb / 12.0 * ((n + 1.0) - tie_term);
    let sigma = sigma2.sqrt();
    if sigma == 0.0 {
        return Ok(TestResult::new("mann_whitney_u", u_a, 1.0, sizes).with_note("degenerate variance"));
    }
    let diff = u_a - mu;
    let z = (diff.abs() - 0.5).max(0.0) / sigma;
    let p = 2.0 * (1.0 - normal_cdf(z));
    Ok(TestResult::new("mann_whitney_u", u_a, p, sizes))
}

/// Two-sample Kolmogorov-Smirnov with asymptotic p.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<TestResult, StatsError> {
    if a.is_empty() || b.is_empty() {
        return Err(StatsError::GroupTooSmall(1));
    }
    let mut sa = a.to_vec();
    let mut sb = b.to_vec();
    sa.sort_by(|x, y| x.partial_cmp(y).expect("NaN"));
    sb.sort_by(|x, y| x.partial_cmp(y).expect("NaN"));
    let (na, nb) = (sa.len(), sb.len());
    let mut d: f64 = 0.0;
    let (mut i, mut j) = (0usize, 0usize);
    while i < na && j < nb {
        let x = sa[i].min(sb[j]);
        while i < na && sa[i] <= x {
            i += 1;
        }
        while j < nb && sb[j] <= x {
            j += 1;
        }
        let diff = (i as f64 / na as f64 - j as f64 / nb as f64).abs();
        if diff > d {
            d = diff;
        }
    }
    let en = (na as f64 * nb as f64 / (na + nb) as f64).sqrt();
    let lambda = (en + 0.12 + 0.11 / en) * d;
    let p = 1.0 - kolmogorov_cdf(lambda);
    Ok(TestResult::new("ks_two_sample", d, p, vec![na, nb]))
}

/// Bonferroni correction: p' = min(1, m·p).
pub fn bonferroni(p_values: &[f64], m: usize) -> Result<Vec<f64>, StatsError> {
    if m < p_values.len() {
        return Err(StatsError::BadFamilySize {
            m,
            len: p_values.len(),
        });
    }
    Ok(p_values.iter().map(|&p| (m as f64 * p).min(1.0)).collect())
}

// ---------------------------------------------------------------------------
// randomness / trend tests for series

/// Wald-Wolfowitz runs test on above/below-median indicators. Values equal
/// to the median are dropped.
pub fn runs_test(series: &[f64]) -> Result<TestResult, StatsError> {
    if series.len() < 2 {
        return Err(StatsError::SeriesTooShort(series.len()));
    }
    let mut sorted = series.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("NaN"));
    let median = if sorted.len() % 2 == 1 {
        sorted[sorted.len() / 2]
    } else {
        (sorted[sorted.len() / 2 - 1] + sorted[sorted.len() / 2]) / 2.0
    };
    let signs: Vec<bool> = series.iter().filter(|&&x| x != median).map(|&x| x > median).collect();
    let n1 = signs.iter().filter(|&&s| s).count() as f64;
    let n2 = signs.len() as f64 - n1;
    let mut result_notes = Vec::new();
    if signs.len() < series.len() {
        result_notes.push(format!("{} median-equal values dropped", series.len() - signs.len()));
    }
    if n1 == 0.0 || n2 == 0.0 {
        let mut r = TestResult::new("runs", f64::NAN, f64::NAN, vec![series.len()])
            .with_note("constant or one-sided series; p undefined");
        r.notes.extend(result_notes);
        return Ok(r);
    }
    let runs = 1 + signs.windows(2).filter(|w| w[0] != w[1]).count();
    let n = n1 + n2;
    let expected = 2.0 * n1 * n2 / n + 1.0;
    let var = 2.0 * n1 * n2 * (2.0 * n1 * n2 - n) / (n * n * (n - 1.0));
    if var <= 0.0 {
        let mut r = TestResult::new("runs", runs as f64, f64::NAN, vec![series.len()])
            .with_note("degenerate variance");
        r.notes.extend(result_notes);
        return Ok(r);
    }
    let z = (runs as f64 - expected) / var.sqrt();
    let p = 2.0 * (1.0 - normal_cdf(z.abs()));
    let mut r = TestResult::new("runs", z, p, vec![series.len()]);
    if series.len() < 10 {
        r.notes.push("short series; asymptotic p unreliable".into());
    }
    r.notes.extend(result_notes);
    Ok(r)
}

/// Bartels rank von Neumann ratio test. RVN < 2 indicates positive serial
/// correlation.
pub fn bartels_test(series: &[f64]) -> Result<TestResult, StatsError> {
    let n = series.len();
    if n < 4 {
        return Err(StatsError::SeriesTooShort(n));
    }
    let (ranks, ties) = midranks(series);
    if ties.len() == 1 {
        return Ok(TestResult::new("bartels", f64::NAN, f64::NAN, vec![n])
            .with_note("constant series; p undefined"));
    }
    let mean_rank = (n as f64 + 1.0) / 2.0;
    let num: f64 = ranks.windows(2).map(|w| (w[0] - w[1]) * (w[0] - w[1])).sum();
    let den: f64 = ranks.iter().map(|r| (r - mean_rank) * (r - mean_rank)).sum();
    if den == 0.0 {
        return Ok(TestResult::new("bartels", f64::NAN, f64::NAN, vec![n])
            .with_note("degenerate rank variance"));
    }
    let rvn = num / den;
    let nf = n as f64;
    let var = 4.0 * (nf - 2.0) * (5.0 * nf * nf - 2.0 * nf - 9.0) / (5.0 * nf * (nf + 1.0) * (nf - 1.0) * (nf - 1.0));
    let z = (rvn - 2.0) / var.sqrt();
    let p = 2.0 * (1.0 - normal_cdf(z.abs()));
    let mut r = TestResult::new("bartels", rvn, p, vec![n]);
    if n < 10 {
        r.notes.push("short series; asymptotic p unreliable".into());
    }
    Ok(r)
}

/// Mann-Kendall trend test with tie-corrected variance and continuity
/// correction; the statistic reported is Kendall's S, with tau in notes.
pub fn mann_kendall(series: &[f64]) -> Result<TestResult, StatsError> {
    let n = series.len();
    if n < 2 {
        return Err(StatsError::SeriesTooShort(n));
    }
    let mut s = 0i64;
    for i in 0..n {
        for j in i + 1..n {
            s += match series[j].partial_cmp(&series[i]).expect("NaN") {
                std::cmp::Ordering::Greater => 1,
                std::cmp::Ordering::Less => -1,
                std::cmp::Ordering::Equal => 0,
            };
        }
    }
    let (_, ties) = midranks(series);
    if ties.len() == 1 {
        return Ok(TestResult::new("mann_kendall", f64::NAN, f64::NAN, vec![n])
            .with_note("constant series; p undefined"));
    }
    let nf = n as f64;
    let tie_term: f64 = ties
        .iter()
        .map(|&t| {
            let t = t as f64;
            t * (t - 1.0) * (2.0 * t + 5.0)
        })
        .sum();
    let var = (nf * (nf - 1.0) * (2.0 * nf + 5.0) - tie_term) / 18.0;
    let tau = s as f64 / (nf * (nf - 1.0) / 2.0);
    let mut r = if var <= 0.0 {
        TestResult::new("mann_kendall", s as f64, f64::NAN, vec![n]).with_note("degenerate variance")
    } else {
        let z = if s > 0 {
            (s as f64 - 1.0) / var.sqrt()
        } else if s < 0 {
            (s as f64 + 1.0) / var.sqrt()
        } else {
            0.0
        };
        let p = 2.0 * (1.0 - normal_cdf(z.abs()));
        TestResult::new("mann_kendall", s as f64, p, vec![n])
    };
    r.notes.push(format!("tau={tau}"));
    if n < 10 {
        r.notes.push("short series; asymptotic p unreliable".into());
    }
    Ok(r)
}

/// Kendall tau for a series (S divided by the number of pairs).
pub fn kendall_tau(series: &[f64]) -> f64 {
    let n = series.len();
    let mut s = 0i64;
    for i in 0..n {
        for j in i + 1..n {
            s += match series[j].partial_cmp(&series[i]).expect("NaN") {
                std::cmp::Ordering::Greater => 1,
                std::cmp::Ordering::Less => -1,
                std::cmp::Ordering::Equal => 0,
            };
        }
    }
    s as f64 / (n as f64 * (n as f64 - 1.0) / 2.0)
}
