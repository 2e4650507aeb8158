//! Command-line driver: corpus → networks → properties → distribution,
//! comparison, and growth reports, all as CSV plus a JSON metadata file.
//!
//! Every flag can also be set through an environment variable with the
//! `COLNET_` prefix (e.g. `COLNET_SEED`). Outputs are deterministic for a
//! fixed corpus, config, and seed.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use thiserror::Error;

use crate::corpus::{load_corpus, Corpus};
use crate::graphalg::PRNG_NAME;
use crate::incremental::{growth_trace, trend_tests, EdgeStream, OrderingPolicy};
use crate::metrics::{
    compute_properties, derive_seed, BaselineMode, GlobalProperties, PropertyConfig,
    PROPERTY_NAMES,
};
use crate::netbuild::{build_collection_network, build_network, write_edge_list, NetType};
use crate::powerlaw::{self, DegreeMode};
use crate::stats::{
    bonferroni, kruskal_wallis, ks_two_sample, mann_whitney_u, one_way_anova, t_test, TestResult,
};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("corpus error: {0}")]
    Corpus(#[from] crate::corpus::CorpusError),
    #[error("network error: {0}")]
    Net(#[from] crate::netbuild::NetError),
    #[error("growth error: {0}")]
    Incremental(#[from] crate::incremental::IncrementalError),
    #[error("power-law error: {0}")]
    PowerLaw(#[from] crate::powerlaw::PowerLawError),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("{0}")]
    Config(String),
    #[error("no finite values to bin")]
    NoFiniteValues,
}

#[derive(Parser, Debug)]
#[command(name = "colnet", version, about = "Word collocation network analysis")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub cmd: Cmd,
}

#[derive(Args, Debug)]
pub struct Common {
    /// Corpus root directory (one subdirectory per genre)
    #[arg(long, env = "COLNET_CORPUS")]
    pub corpus: Option<PathBuf>,
    /// Optional manifest: lines of `path<TAB>genre` relative to the root
    #[arg(long, env = "COLNET_MANIFEST")]
    pub manifest: Option<PathBuf>,
    /// Output directory for artifacts
    #[arg(long, default_value = "out", env = "COLNET_OUT")]
    pub out: PathBuf,
    /// Network variant, or `all` for every variant
    #[arg(long, default_value = "all", env = "COLNET_NET_TYPE")]
    pub net_type: String,
    #[arg(long, default_value_t = 0, env = "COLNET_SEED")]
    pub seed: u64,
    /// Small-worldliness baseline: analytic | sampled
    #[arg(long, default_value = "analytic", env = "COLNET_BASELINE")]
    pub baseline: String,
    /// Random-graph draws for the sampled baseline
    #[arg(long, default_value_t = 10, env = "COLNET_BASELINE_SAMPLES")]
    pub baseline_samples: usize,
    /// Bootstrap replicates for goodness-of-fit p-values; 0 disables them
    #[arg(long, default_value_t = 100, env = "COLNET_BOOTSTRAP_B")]
    pub bootstrap_b: usize,
    /// Fix the power-law tail cutoff instead of estimating it
    #[arg(long, env = "COLNET_XMIN_FIXED")]
    pub xmin_fixed: Option<u64>,
    /// Edge replay order for growth runs: occurrence | frequency
    #[arg(long, default_value = "occurrence", env = "COLNET_ORDER")]
    pub order: String,
    /// Histogram bin count
    #[arg(long, default_value_t = 20, env = "COLNET_BINS")]
    pub bins: usize,
    /// Restrict `dist` to one genre and compare across net types instead
    #[arg(long, env = "COLNET_GENRE")]
    pub genre: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum Cmd {
    /// Serialize collection networks as edge lists
    Build,
    /// Per-document property records
    Props,
    /// Binned property distributions (histogram CSVs)
    Dist,
    /// Omnibus and pairwise genre comparisons per property
    Compare,
    /// Incremental growth trajectories with trend tests
    Grow {
        #[arg(long, default_value_t = 100)]
        checkpoints: u32,
        /// Bootstrap p-values at every checkpoint (slow)
        #[arg(long)]
        with_pvalues: bool,
    },
    /// Standalone power-law fit of a degree sequence
    Fit {
        /// File of positive integers, one per line; default is the collection
        /// network's degree sequence
        #[arg(long)]
        values: Option<PathBuf>,
        /// Degree mode when fitting a network: all | in | out
        #[arg(long, default_value = "all")]
        degree: String,
    },
}

impl Common {
    pub fn net_types(&self) -> Result<Vec<NetType>, CliError> {
        if self.net_type == "all" {
            return Ok(NetType::ALL.to_vec());
        }
        NetType::parse(&self.net_type)
            .map(|t| vec![t])
            .ok_or_else(|| CliError::Config(format!("unknown net type: {}", self.net_type)))
    }

    pub fn property_config(&self) -> Result<PropertyConfig, CliError> {
        let baseline = match self.baseline.as_str() {
            "analytic" => BaselineMode::Analytic,
            "sampled" => BaselineMode::Sampled {
                samples: self.baseline_samples,
            },
            other => return Err(CliError::Config(format!("unknown baseline: {other}"))),
        };
        Ok(PropertyConfig {
            baseline,
            seed: self.seed,
            bootstrap_b: self.bootstrap_b.max(1),
            xmin_fixed: self.xmin_fixed,
            compute_pvalues: self.bootstrap_b > 0,
        })
    }

    fn ordering(&self) -> Result<OrderingPolicy, CliError> {
        OrderingPolicy::parse(&self.order).map_err(|e| CliError::Config(e.to_string()))
    }

    fn load(&self) -> Result<Corpus, CliError> {
        let root = self
            .corpus
            .as_deref()
            .ok_or_else(|| CliError::Config("--corpus is required".to_string()))?;
        Ok(load_corpus(root, self.manifest.as_deref())?)
    }
}

// ---------------------------------------------------------------------------
// histograms

/// Shared-edge histogram over one or more value series.
#[derive(Debug, Clone, Serialize)]
pub struct Histogram {
    /// `bins + 1` edges covering the pooled finite range.
    pub bin_edges: Vec<f64>,
    pub labels: Vec<String>,
    /// Per-series percentage of that series' finite values in each bin.
    pub percentages: Vec<Vec<f64>>,
}

/// Bin every series over edges shared across the pool. Non-finite values are
/// ignored; each series' percentages sum to 100 over its finite values.
pub fn histogram(series: &[(String, Vec<f64>)], bins: usize) -> Result<Histogram, CliError> {
    let finite: Vec<Vec<f64>> = series
        .iter()
        .map(|(_, v)| v.iter().copied().filter(|x| x.is_finite()).collect())
        .collect();
    let pooled: Vec<f64> = finite.iter().flatten().copied().collect();
    if pooled.is_empty() || bins == 0 {
        return Err(CliError::NoFiniteValues);
    }
    let min = pooled.iter().copied().fold(f64::INFINITY, f64::min);
    let mut max = pooled.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == min {
        // degenerate range: widen so the single value lands in a real bin
        max = min + f64::EPSILON.max(min.abs() * f64::EPSILON) * bins as f64;
    }
    let width = (max - min) / bins as f64;
    let bin_edges: Vec<f64> = (0..=bins).map(|i| min + width * i as f64).collect();
    let mut percentages = Vec::with_capacity(series.len());
    for vals in &finite {
        let mut counts = vec![0usize; bins];
        for &x in vals {
            let mut b = ((x - min) / width) as usize;
            if b >= bins {
                b = bins - 1; // right edge is inclusive
            }
            counts[b] += 1;
        }
        let n = vals.len();
        percentages.push(
            counts
                .iter()
                .map(|&c| if n == 0 { 0.0 } else { 100.0 * c as f64 / n as f64 })
                .collect(),
        );
    }
    Ok(Histogram {
        bin_edges,
        labels: series.iter().map(|(l, _)| l.clone()).collect(),
        percentages,
    })
}

// ---------------------------------------------------------------------------
// shared artifact plumbing

fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        String::new()
    } else {
        format!("{x}")
    }
}

fn metadata(common: &Common, subcommand: &str) -> serde_json::Value {
    serde_json::json!({
        "tool": "colnet",
        "version": env!("CARGO_PKG_VERSION"),
        "subcommand": subcommand,
        "seed": common.seed,
        "prng": PRNG_NAME,
        "config": {
            "corpus": common.corpus,
            "manifest": common.manifest,
            "net_type": common.net_type,
            "baseline": common.baseline,
            "baseline_samples": common.baseline_samples,
            "bootstrap_b": common.bootstrap_b,
            "xmin_fixed": common.xmin_fixed,
            "order": common.order,
            "bins": common.bins,
            "genre": common.genre,
        },
    })
}

fn write_metadata(common: &Common, subcommand: &str) -> Result<(), CliError> {
    let path = common.out.join("metadata.json");
    let mut f = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut f, &metadata(common, subcommand))
        .map_err(|e| CliError::Config(e.to_string()))?;
    writeln!(f)?;
    Ok(())
}

fn property_header(prefix: &[&str]) -> Vec<String> {
    let mut cols: Vec<String> = prefix.iter().map(|s| s.to_string()).collect();
    for name in PROPERTY_NAMES {
        cols.push(name.to_string());
        if !matches!(name, "n_vertices" | "n_edges") {
            cols.push(format!("{name}_reason"));
        }
    }
    cols
}

fn property_row(prefix: &[String], props: &GlobalProperties) -> Vec<String> {
    let mut row = prefix.to_vec();
    for name in PROPERTY_NAMES {
        row.push(props.get(name).map(fmt_f64).unwrap_or_default());
        if !matches!(name, "n_vertices" | "n_edges") {
            row.push(props.reason(name).to_string());
        }
    }
    row
}

/// Per-document property records for the selected net types, in corpus order.
/// Degenerate documents still produce rows; their fields carry reason codes.
pub fn document_properties(
    corpus: &Corpus,
    net_types: &[NetType],
    config: &PropertyConfig,
) -> Vec<(String, String, NetType, GlobalProperties)> {
    let mut rows = Vec::new();
    for doc in &corpus.documents {
        for &t in net_types {
            let net = build_network(&doc.tokens, t);
            let doc_config = PropertyConfig {
                seed: derive_seed(config.seed, &format!("doc/{}/{}", doc.doc_id, t)),
                ..config.clone()
            };
            rows.push((
                doc.doc_id.clone(),
                doc.genre.clone(),
                t,
                compute_properties(&net, &doc_config),
            ));
        }
    }
    rows
}

// ---------------------------------------------------------------------------
// subcommands

fn run_build(common: &Common) -> Result<(), CliError> {
    let corpus = common.load()?;
    for t in common.net_types()? {
        let net = build_collection_network(&corpus, t)?;
        let path = common.out.join(format!("network_{t}.edges"));
        write_edge_list(&net, BufWriter::new(File::create(path)?))?;
        log::info!("{t}: |V|={} |E|={}", net.n_vertices(), net.n_edges());
    }
    Ok(())
}

fn run_props(common: &Common) -> Result<(), CliError> {
    let corpus = common.load()?;
    let config = common.property_config()?;
    let rows = document_properties(&corpus, &common.net_types()?, &config);
    let mut w = csv::Writer::from_path(common.out.join("properties.csv"))?;
    w.write_record(property_header(&["doc_id", "genre", "net_type"]))?;
    for (doc_id, genre, t, props) in &rows {
        w.write_record(property_row(
            &[doc_id.clone(), genre.clone(), t.to_string()],
            props,
        ))?;
    }
    w.flush()?;
    Ok(())
}

/// Defined values of one property, grouped by genre, from per-document rows.
fn values_by_genre(
    rows: &[(String, String, NetType, GlobalProperties)],
    net_type: NetType,
    property: &str,
) -> Vec<(String, Vec<f64>)> {
    let mut by_genre: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for (_, genre, t, props) in rows {
        if *t != net_type {
            continue;
        }
        if let Some(v) = props.get(property) {
            if v.is_finite() {
                by_genre.entry(genre.clone()).or_default().push(v);
            }
        }
    }
    by_genre.into_iter().collect()
}

fn write_histogram_csv(path: &Path, h: &Histogram) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec!["bin_lo".to_string(), "bin_hi".to_string()];
    header.extend(h.labels.iter().cloned());
    w.write_record(&header)?;
    for b in 0..h.percentages[0].len() {
        let mut row = vec![fmt_f64(h.bin_edges[b]), fmt_f64(h.bin_edges[b + 1])];
        for series in &h.percentages {
            row.push(fmt_f64(series[b]));
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

fn run_dist(common: &Common) -> Result<(), CliError> {
    let corpus = common.load()?;
    let config = common.property_config()?;
    let net_types = common.net_types()?;
    let rows = document_properties(&corpus, &net_types, &config);
    for property in PROPERTY_NAMES {
        if let Some(genre) = &common.genre {
            // one genre, series per net type
            let series: Vec<(String, Vec<f64>)> = net_types
                .iter()
                .map(|&t| {
                    let vals = values_by_genre(&rows, t, property)
                        .into_iter()
                        .filter(|(g, _)| g == genre)
                        .flat_map(|(_, v)| v)
                        .collect();
                    (t.to_string(), vals)
                })
                .filter(|(_, v): &(String, Vec<f64>)| !v.is_empty())
                .collect();
            match histogram(&series, common.bins) {
                Ok(h) => write_histogram_csv(
                    &common.out.join(format!("dist_genre_{genre}_{property}.csv")),
                    &h,
                )?,
                Err(CliError::NoFiniteValues) => {
                    log::warn!("{property}: no finite values for genre {genre}; skipped")
                }
                Err(e) => return Err(e),
            }
        } else {
            // per net type, series per genre
            for &t in &net_types {
                let series = values_by_genre(&rows, t, property);
                match histogram(&series, common.bins) {
                    Ok(h) => write_histogram_csv(
                        &common.out.join(format!("dist_{t}_{property}.csv")),
                        &h,
                    )?,
                    Err(CliError::NoFiniteValues) => {
                        log::warn!("{property}/{t}: no finite values; skipped")
                    }
                    Err(e) => return Err(e),
                }
            }
        }
    }
    Ok(())
}

fn compare_record(
    net_type: NetType,
    property: &str,
    group_a: &str,
    group_b: &str,
    result: &TestResult,
    family: usize,
) -> Vec<String> {
    vec![
        net_type.to_string(),
        property.to_string(),
        result.test_name.clone(),
        group_a.to_string(),
        group_b.to_string(),
        fmt_f64(result.statistic),
        fmt_f64(result.p_value),
        fmt_f64(
            bonferroni(&[result.p_value], family)
                .map(|v| v[0])
                .unwrap_or(f64::NAN),
        ),
        family.to_string(),
    ]
}

fn run_compare(common: &Common) -> Result<(), CliError> {
    let corpus = common.load()?;
    let config = common.property_config()?;
    let net_types = common.net_types()?;
    let rows = document_properties(&corpus, &net_types, &config);
    let mut w = csv::Writer::from_path(common.out.join("compare.csv"))?;
    w.write_record([
        "net_type",
        "property",
        "test",
        "group_a",
        "group_b",
        "statistic",
        "p_value",
        "p_bonferroni",
        "family",
    ])?;
    for &t in &net_types {
        for property in PROPERTY_NAMES {
            let groups = values_by_genre(&rows, t, property);
            if groups.len() < 2 {
                continue;
            }
            let data: Vec<Vec<f64>> = groups.iter().map(|(_, v)| v.clone()).collect();
            for omnibus in [one_way_anova(&data), kruskal_wallis(&data)] {
                match omnibus {
                    Ok(r) => w.write_record(compare_record(t, property, "omnibus", "omnibus", &r, 1))?,
                    Err(e) => log::warn!("{t}/{property}: omnibus skipped: {e}"),
                }
            }
            // pairwise family: every genre pair, corrected per property
            let family = groups.len() * (groups.len() - 1) / 2;
            for i in 0..groups.len() {
                for j in i + 1..groups.len() {
                    let (ga, va) = &groups[i];
                    let (gb, vb) = &groups[j];
                    for pair in [t_test(va, vb), mann_whitney_u(va, vb), ks_two_sample(va, vb)] {
                        match pair {
                            Ok(r) => w.write_record(compare_record(t, property, ga, gb, &r, family))?,
                            Err(e) => log::warn!("{t}/{property} {ga} vs {gb}: skipped: {e}"),
                        }
                    }
                }
            }
        }
    }
    w.flush()?;
    Ok(())
}

fn run_grow(common: &Common, checkpoints: u32, with_pvalues: bool) -> Result<(), CliError> {
    let corpus = common.load()?;
    let mut config = common.property_config()?;
    config.compute_pvalues = with_pvalues && common.bootstrap_b > 0;
    let policy = common.ordering()?;
    for t in common.net_types()? {
        let stream = EdgeStream::from_corpus(&corpus, t)?;
        let trace = growth_trace(&stream, policy, checkpoints, &config)?;

        let mut w = csv::Writer::from_path(common.out.join(format!("growth_{t}.csv")))?;
        w.write_record(property_header(&["k", "edges_seen"]))?;
        for p in &trace.points {
            w.write_record(property_row(
                &[p.k.to_string(), p.edges_seen.to_string()],
                &p.properties,
            ))?;
        }
        w.flush()?;

        let mut tw = csv::Writer::from_path(common.out.join(format!("trends_{t}.csv")))?;
        tw.write_record(["property", "test", "statistic", "p_value", "n_used", "n_dropped"])?;
        for property in PROPERTY_NAMES {
            match trend_tests(&trace, property) {
                Ok(summary) => {
                    for r in &summary.tests {
                        tw.write_record([
                            property.to_string(),
                            r.test_name.clone(),
                            fmt_f64(r.statistic),
                            fmt_f64(r.p_value),
                            summary.n_used.to_string(),
                            summary.n_dropped.to_string(),
                        ])?;
                    }
                }
                Err(e) => log::warn!("{t}/{property}: trend tests skipped: {e}"),
            }
        }
        tw.flush()?;
    }
    Ok(())
}

fn run_fit(common: &Common, values: Option<&Path>, degree: &str) -> Result<(), CliError> {
    let samples: Vec<u64> = match values {
        Some(path) => fs::read_to_string(path)?
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(|l| {
                l.parse::<u64>()
                    .map_err(|e| CliError::Config(format!("bad value {l:?}: {e}")))
            })
            .collect::<Result<_, _>>()?,
        None => {
            let corpus = common.load()?;
            let types = common.net_types()?;
            if types.len() != 1 {
                return Err(CliError::Config(
                    "fit needs a single --net-type (or --values)".to_string(),
                ));
            }
            let mode = match degree {
                "all" => DegreeMode::All,
                "in" => DegreeMode::In,
                "out" => DegreeMode::Out,
                other => return Err(CliError::Config(format!("unknown degree mode: {other}"))),
            };
            let net = build_collection_network(&corpus, types[0])?;
            powerlaw::degree_sequence(&net, mode)?
                .counts
                .into_iter()
                .filter(|&d| d > 0)
                .collect()
        }
    };
    let fit = match common.xmin_fixed {
        Some(xmin) => powerlaw::fit_fixed_xmin(&samples, xmin)?,
        None => powerlaw::select_xmin(&samples)?,
    };
    let gof = if common.bootstrap_b > 0 {
        Some(powerlaw::gof_pvalue(
            &samples,
            &fit,
            common.bootstrap_b,
            derive_seed(common.seed, "fit"),
        )?)
    } else {
        None
    };
    let out = serde_json::json!({
        "n": samples.len(),
        "fit": fit,
        "gof_pvalue": gof,
        "bootstrap_b": if gof.is_some() { Some(common.bootstrap_b) } else { None },
    });
    let mut f = BufWriter::new(File::create(common.out.join("fit.json"))?);
    serde_json::to_writer_pretty(&mut f, &out).map_err(|e| CliError::Config(e.to_string()))?;
    writeln!(f)?;
    Ok(())
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    fs::create_dir_all(&cli.common.out)?;
    let name = match &cli.cmd {
        Cmd::Build => "build",
        Cmd::Props => "props",
        Cmd::Dist => "dist",
        Cmd::Compare => "compare",
        Cmd::Grow { .. } => "grow",
        Cmd::Fit { .. } => "fit",
    };
    match &cli.cmd {
        Cmd::Build => run_build(&cli.common)?,
        Cmd::Props => run_props(&cli.common)?,
        Cmd::Dist => run_dist(&cli.common)?,
        Cmd::Compare => run_compare(&cli.common)?,
        Cmd::Grow {
            checkpoints,
            with_pvalues,
        } => run_grow(&cli.common, *checkpoints, *with_pvalues)?,
        Cmd::Fit { values, degree } => run_fit(&cli.common, values.as_deref(), degree)?,
    }
    write_metadata(&cli.common, name)?;
    Ok(())
}

pub fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    if let Err(e) = run(&cli) {
        log::error!("{e}");
        std::process::exit(1);
    }
}
