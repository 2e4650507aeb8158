//! Assembly of the full global property record for one network.
//!
//! Fields that cannot be computed carry an explicit reason code instead of a
//! silent zero, so downstream distribution statistics can work on partial
//! records.

use serde::Serialize;

use crate::graphalg::{
    self, clustering, components, undirected_simple_edge_count, ClusteringKind, ComponentMode,
};
use crate::netbuild::CollocationNetwork;
use crate::powerlaw::{self, degree_sequence, DegreeMode};

/// Why a property value is absent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Reason {
    NotApplicable,
    DegenerateSize,
    BaselineDegenerate,
    PathUndefined,
    ZeroVarianceTail,
    TooFewSamples,
    Disabled,
}

impl Reason {
    pub fn code(self) -> &'static str {
        match self {
            Reason::NotApplicable => "not applicable",
            Reason::DegenerateSize => "degenerate size",
            Reason::BaselineDegenerate => "baseline degenerate",
            Reason::PathUndefined => "path length undefined",
            Reason::ZeroVarianceTail => "zero variance tail",
            Reason::TooFewSamples => "too few samples",
            Reason::Disabled => "disabled",
        }
    }
}

/// A property value or the reason it is undefined.
pub type Prop<T> = Result<T, Reason>;

/// How the random baseline for small-worldliness is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BaselineMode {
    Analytic,
    Sampled { samples: usize },
}

/// Knobs for [`compute_properties`].
#[derive(Debug, Clone, Serialize)]
pub struct PropertyConfig {
    pub baseline: BaselineMode,
    pub seed: u64,
    pub bootstrap_b: usize,
    /// None estimates xmin; Some fixes it.
    pub xmin_fixed: Option<u64>,
    /// Bootstrap p-values are the dominant cost; growth runs can disable them.
    pub compute_pvalues: bool,
}

impl Default for PropertyConfig {
    fn default() -> Self {
        PropertyConfig {
            baseline: BaselineMode::Analytic,
            seed: 0,
            bootstrap_b: 100,
            xmin_fixed: None,
            compute_pvalues: true,
        }
    }
}

/// The full property record for one network.
#[derive(Debug, Clone, Serialize)]
pub struct GlobalProperties {
    pub n_vertices: usize,
    pub n_edges: usize,
    pub shrinkage: Prop<f64>,
    pub global_clustering: Prop<f64>,
    pub small_worldliness: Prop<f64>,
    pub diameter_directed: Prop<u32>,
    pub diameter_undirected: Prop<u32>,
    pub alpha: Prop<f64>,
    pub alpha_in: Prop<f64>,
    pub alpha_out: Prop<f64>,
    pub pvalue_alpha: Prop<f64>,
    pub pvalue_alpha_in: Prop<f64>,
    pub pvalue_alpha_out: Prop<f64>,
    pub n_cc: Prop<usize>,
    pub giant_cc: Prop<usize>,
    pub n_scc: Prop<usize>,
    pub giant_scc: Prop<usize>,
}

pub const PROPERTY_NAMES: [&str; 17] = [
    "n_vertices",
    "n_edges",
    "shrinkage",
    "global_clustering",
    "small_worldliness",
    "diameter_directed",
    "diameter_undirected",
    "alpha",
    "alpha_in",
    "alpha_out",
    "pvalue_alpha",
    "pvalue_alpha_in",
    "pvalue_alpha_out",
    "n_cc",
    "giant_cc",
    "n_scc",
    "giant_scc",
];

impl GlobalProperties {
    /// Numeric view of a property by name, None when undefined.
    pub fn get(&self, name: &str) -> Option<f64> {
        fn num<T: Copy + Into<f64>>(p: &Prop<T>) -> Option<f64> {
            p.as_ref().ok().map(|&v| v.into())
        }
        match name {
            "n_vertices" => Some(self.n_vertices as f64),
            "n_edges" => Some(self.n_edges as f64),
            "shrinkage" => num(&self.shrinkage),
            "global_clustering" => num(&self.global_clustering),
            "small_worldliness" => num(&self.small_worldliness),
            "diameter_directed" => num(&self.diameter_directed),
            "diameter_undirected" => num(&self.diameter_undirected),
            "alpha" => num(&self.alpha),
            "alpha_in" => num(&self.alpha_in),
            "alpha_out" => num(&self.alpha_out),
            "pvalue_alpha" => num(&self.pvalue_alpha),
            "pvalue_alpha_in" => num(&self.pvalue_alpha_in),
            "pvalue_alpha_out" => num(&self.pvalue_alpha_out),
            "n_cc" => self.n_cc.ok().map(|v| v as f64),
            "giant_cc" => self.giant_cc.ok().map(|v| v as f64),
            "n_scc" => self.n_scc.ok().map(|v| v as f64),
            "giant_scc" => self.giant_scc.ok().map(|v| v as f64),
            _ => None,
        }
    }

    /// Reason code for a property by name, empty string when defined.
    pub fn reason(&self, name: &str) -> &'static str {
        fn r<T>(p: &Prop<T>) -> &'static str {
            p.as_ref().err().map(|e| e.code()).unwrap_or("")
        }
        match name {
            "n_vertices" | "n_edges" => "",
            "shrinkage" => r(&self.shrinkage),
            "global_clustering" => r(&self.global_clustering),
            "small_worldliness" => r(&self.small_worldliness),
            "diameter_directed" => r(&self.diameter_directed),
            "diameter_undirected" => r(&self.diameter_undirected),
            "alpha" => r(&self.alpha),
            "alpha_in" => r(&self.alpha_in),
            "alpha_out" => r(&self.alpha_out),
            "pvalue_alpha" => r(&self.pvalue_alpha),
            "pvalue_alpha_in" => r(&self.pvalue_alpha_in),
            "pvalue_alpha_out" => r(&self.pvalue_alpha_out),
            "n_cc" => r(&self.n_cc),
            "giant_cc" => r(&self.giant_cc),
            "n_scc" => r(&self.n_scc),
            "giant_scc" => r(&self.giant_scc),
            _ => "",
        }
    }
}

/// log_|V| |E|, with |E| counted under the network's own loop policy.
pub fn shrinkage_exponent(net: &CollocationNetwork) -> Prop<f64> {
    if net.n_vertices() < 2 || net.n_edges() == 0 {
        return Err(Reason::DegenerateSize);
    }
    Ok((net.n_edges() as f64).ln() / (net.n_vertices() as f64).ln())
}

/// Stable per-purpose seed derivation (FNV-1a over seed bytes and a tag).
pub fn derive_seed(seed: u64, tag: &str) -> u64 {
    let mut h = 0xcbf29ce484222325u64;
    for b in seed.to_le_bytes().iter().chain(tag.as_bytes()) {
        h ^= *b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

/// Small-worldliness μ = (C̄/L) / (C̄_rand/L_rand), direction ignored.
///
/// Analytic baseline: C̄_rand = k̄/n, L_rand = ln n / ln k̄ with
/// k̄ = 2|E|/|V| over the simple undirected projection. Sampled baseline:
/// mean C̄ and L over seeded G(n, m) draws of the same size.
pub fn small_worldliness(net: &CollocationNetwork, baseline: BaselineMode, seed: u64) -> Prop<f64> {
    let n = net.n_vertices();
    let m = undirected_simple_edge_count(net);
    if n < 2 || m == 0 {
        return Err(Reason::DegenerateSize);
    }
    let c_bar = clustering(net, ClusteringKind::AvgLocal);
    let (_, apl) = graphalg::undirected_sweep(net);
    let l = apl.ok_or(Reason::PathUndefined)?;
    if c_bar == 0.0 {
        // zero numerator; the ratio is 0 regardless of baseline
        return Ok(0.0);
    }
    let (c_rand, l_rand) = match baseline {
        BaselineMode::Analytic => {
            let k_bar = 2.0 * m as f64 / n as f64;
            if k_bar <= 1.0 {
                return Err(Reason::BaselineDegenerate);
            }
            ((k_bar / n as f64), (n as f64).ln() / k_bar.ln())
        }
        BaselineMode::Sampled { samples } => {
            if samples == 0 {
                return Err(Reason::BaselineDegenerate);
            }
            let mut c_sum = 0.0;
            let mut l_sum = 0.0;
            let mut l_count = 0usize;
            for i in 0..samples {
                let g = graphalg::gnm_random(n, m, false, derive_seed(seed, &format!("baseline/{i}")))
                    .map_err(|_| Reason::BaselineDegenerate)?;
                c_sum += clustering(&g, ClusteringKind::AvgLocal);
                if let (_, Some(apl)) = graphalg::undirected_sweep(&g) {
                    l_sum += apl;
                    l_count += 1;
                }
            }
            if l_count == 0 {
                return Err(Reason::BaselineDegenerate);
            }
            (c_sum / samples as f64, l_sum / l_count as f64)
        }
    };
    if c_rand <= 0.0 || l_rand <= 0.0 {
        return Err(Reason::BaselineDegenerate);
    }
    Ok((c_bar / l) / (c_rand / l_rand))
}

fn alpha_and_pvalue(
    net: &CollocationNetwork,
    mode: DegreeMode,
    config: &PropertyConfig,
    tag: &str,
) -> (Prop<f64>, Prop<f64>) {
    let seq = match degree_sequence(net, mode) {
        Ok(s) => s,
        Err(_) => return (Err(Reason::NotApplicable), Err(Reason::NotApplicable)),
    };
    // zero-degree vertices are excluded (log undefined)
    let positive: Vec<u64> = seq.counts.iter().copied().filter(|&d| d > 0).collect();
    if positive.len() < 2 {
        return (Err(Reason::TooFewSamples), Err(Reason::TooFewSamples));
    }
    let fit = match config.xmin_fixed {
        Some(xmin) => powerlaw::fit_fixed_xmin(&positive, xmin),
        None => powerlaw::select_xmin(&positive),
    };
    match fit {
        Ok(fit) => {
            let alpha = Ok(fit.alpha);
            let pvalue = if !config.compute_pvalues {
                Err(Reason::Disabled)
            } else {
                powerlaw::gof_pvalue(&positive, &fit, config.bootstrap_b, derive_seed(config.seed, tag))
                    .map_err(|_| Reason::TooFewSamples)
            };
            (alpha, pvalue)
        }
        Err(powerlaw::PowerLawError::ZeroVarianceTail) => {
            (Err(Reason::ZeroVarianceTail), Err(Reason::ZeroVarianceTail))
        }
        Err(_) => (Err(Reason::TooFewSamples), Err(Reason::TooFewSamples)),
    }
}

/// Fill every applicable property field for one network.
pub fn compute_properties(net: &CollocationNetwork, config: &PropertyConfig) -> GlobalProperties {
    let n = net.n_vertices();
    let empty = n == 0;

    let (diameter_undirected, apl) = if empty {
        (Err(Reason::DegenerateSize), None)
    } else {
        let (d, apl) = graphalg::undirected_sweep(net);
        (Ok(d), apl)
    };
    let _ = apl;

    let diameter_directed = if !net.directed {
        Err(Reason::NotApplicable)
    } else if empty {
        Err(Reason::DegenerateSize)
    } else {
        Ok(graphalg::diameter(net, true).expect("nonempty"))
    };

    let global_clustering = if empty {
        Err(Reason::DegenerateSize)
    } else {
        Ok(clustering(net, ClusteringKind::Global))
    };

    let (n_cc, giant_cc) = if empty {
        (Err(Reason::DegenerateSize), Err(Reason::DegenerateSize))
    } else {
        let cc = components(net, ComponentMode::Weak);
        (Ok(cc.count), Ok(cc.giant_size))
    };

    let (n_scc, giant_scc) = if !net.directed {
        (Err(Reason::NotApplicable), Err(Reason::NotApplicable))
    } else if empty {
        (Err(Reason::DegenerateSize), Err(Reason::DegenerateSize))
    } else {
        let scc = components(net, ComponentMode::Strong);
        (Ok(scc.count), Ok(scc.giant_size))
    };

    let (alpha, pvalue_alpha) = if empty {
        (Err(Reason::DegenerateSize), Err(Reason::DegenerateSize))
    } else {
        alpha_and_pvalue(net, DegreeMode::All, config, "alpha/all")
    };
    let (alpha_in, pvalue_alpha_in) = if !net.directed {
        (Err(Reason::NotApplicable), Err(Reason::NotApplicable))
    } else if empty {
        (Err(Reason::DegenerateSize), Err(Reason::DegenerateSize))
    } else {
        alpha_and_pvalue(net, DegreeMode::In, config, "alpha/in")
    };
    let (alpha_out, pvalue_alpha_out) = if !net.directed {
        (Err(Reason::NotApplicable), Err(Reason::NotApplicable))
    } else if empty {
        (Err(Reason::DegenerateSize), Err(Reason::DegenerateSize))
    } else {
        alpha_and_pvalue(net, DegreeMode::Out, config, "alpha/out")
    };

    GlobalProperties {
        n_vertices: n,
        n_edges: net.n_edges(),
        shrinkage: shrinkage_exponent(net),
        global_clustering,
        small_worldliness: if empty {
            Err(Reason::DegenerateSize)
        } else {
            small_worldliness(net, config.baseline, config.seed)
        },
        diameter_directed,
        diameter_undirected,
        alpha,
        alpha_in,
        alpha_out,
        pvalue_alpha,
        pvalue_alpha_in,
        pvalue_alpha_out,
        n_cc,
        giant_cc,
        n_scc,
        giant_scc,
    }
}
