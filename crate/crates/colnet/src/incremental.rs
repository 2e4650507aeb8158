//! Incremental network growth: replay the edge stream of a collection in a
//! chosen order, snapshot the property record at percentage checkpoints, and
//! test the resulting trajectories for randomness and trend.

use indexmap::IndexMap;
use serde::Serialize;
use thiserror::Error;

use crate::corpus::{ngram_stream, Corpus};
use crate::metrics::{compute_properties, GlobalProperties, PropertyConfig};
use crate::netbuild::{CollocationNetwork, NetType};
use crate::stats::{bartels_test, mann_kendall, runs_test, TestResult};

#[derive(Debug, Error)]
pub enum IncrementalError {
    #[error("corpus produced no edges")]
    EmptyStream,
    #[error("trajectory has {0} defined points; at least {1} required")]
    TooFewPoints(usize, usize),
    #[error("unknown ordering policy: {0}")]
    BadPolicy(String),
}

/// Order in which stream edges are replayed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OrderingPolicy {
    /// First appearance in reading order.
    Occurrence,
    /// Most frequent n-gram edge first; ties broken by first appearance.
    Frequency,
}

impl OrderingPolicy {
    pub fn parse(s: &str) -> Result<Self, IncrementalError> {
        match s {
            "occurrence" => Ok(OrderingPolicy::Occurrence),
            "frequency" => Ok(OrderingPolicy::Frequency),
            other => Err(IncrementalError::BadPolicy(other.to_string())),
        }
    }
}

/// The distinct edges of a collection network together with the word table,
/// first-occurrence order, and window counts needed to reorder them.
#[derive(Debug, Clone)]
pub struct EdgeStream {
    pub net_type: NetType,
    pub words: Vec<String>,
    /// Distinct edges in first-occurrence order, with the number of n-gram
    /// windows that generated each.
    counts: IndexMap<(u32, u32), u64>,
}

impl EdgeStream {
    pub fn from_corpus(corpus: &Corpus, net_type: NetType) -> Result<EdgeStream, IncrementalError> {
        let mut net = CollocationNetwork::new(net_type.directed(), !net_type.simplified(), Some(net_type));
        let mut counts: IndexMap<(u32, u32), u64> = IndexMap::new();
        let mut record = |net: &mut CollocationNetwork, a: u32, b: u32| {
            if a == b && !net.allows_self_loops {
                return;
            }
            net.add_edge(a, b);
            let key = if !net.directed && a > b { (b, a) } else { (a, b) };
            *counts.entry(key).or_insert(0) += 1;
        };
        for doc in &corpus.documents {
            let tokens = &doc.tokens;
            for t in tokens {
                net.intern(t);
            }
            match net_type {
                NetType::Digraph
                | NetType::SimplifiedDigraph
                | NetType::Undigraph1
                | NetType::SimplifiedUndigraph1 => {
                    for gram in ngram_stream(tokens, 2).expect("bigram order") {
                        let a = net.intern(&gram[0]);
                        let b = net.intern(&gram[1]);
                        record(&mut net, a, b);
                    }
                }
                NetType::Undigraph2 | NetType::SimplifiedUndigraph2 => {
                    for gram in ngram_stream(tokens, 3).expect("trigram order") {
                        let a = net.intern(&gram[0]);
                        let b = net.intern(&gram[1]);
                        let c = net.intern(&gram[2]);
                        record(&mut net, a, b);
                        record(&mut net, b, c);
                        record(&mut net, a, c);
                    }
                }
            }
        }
        if counts.is_empty() {
            return Err(IncrementalError::EmptyStream);
        }
        debug_assert_eq!(counts.len(), net.n_edges());
        Ok(EdgeStream {
            net_type,
            words: net.words().to_vec(),
            counts,
        })
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Distinct edges under the given replay policy.
    pub fn ordered(&self, policy: OrderingPolicy) -> Vec<(u32, u32)> {
        match policy {
            OrderingPolicy::Occurrence => self.counts.keys().copied().collect(),
            OrderingPolicy::Frequency => {
                let mut ranked: Vec<(usize, (u32, u32), u64)> = self
                    .counts
                    .iter()
                    .enumerate()
                    .map(|(i, (&e, &c))| (i, e, c))
                    .collect();
                ranked.sort_by(|a, b| b.2.cmp(&a.2).then(a.0.cmp(&b.0)));
                ranked.into_iter().map(|(_, e, _)| e).collect()
            }
        }
    }

    /// Network over the first `k` edges of the replay order. Vertices appear
    /// only once an incident edge has arrived.
    pub fn prefix_network(&self, order: &[(u32, u32)], k: usize) -> CollocationNetwork {
        let mut net = CollocationNetwork::new(
            self.net_type.directed(),
            !self.net_type.simplified(),
            Some(self.net_type),
        );
        for &(a, b) in &order[..k] {
            let a = net.intern(&self.words[a as usize]);
            let b = net.intern(&self.words[b as usize]);
            net.add_edge(a, b);
        }
        net
    }
}

/// One snapshot along the growth trajectory.
#[derive(Debug, Clone, Serialize)]
pub struct GrowthPoint {
    /// Checkpoint percentage, 1..=100.
    pub k: u32,
    /// Number of edges in the prefix.
    pub edges_seen: usize,
    pub properties: GlobalProperties,
}

#[derive(Debug, Clone, Serialize)]
pub struct GrowthTrace {
    pub net_type: NetType,
    pub policy: OrderingPolicy,
    pub points: Vec<GrowthPoint>,
}

impl GrowthTrace {
    /// Numeric trajectory of one property; None marks undefined snapshots.
    pub fn trajectory(&self, property: &str) -> Vec<Option<f64>> {
        self.points.iter().map(|p| p.properties.get(property)).collect()
    }
}

/// Replay the stream and recompute the full property record at each of the
/// `checkpoints` evenly spaced percentage marks (the last one sees every edge).
pub fn growth_trace(
    stream: &EdgeStream,
    policy: OrderingPolicy,
    checkpoints: u32,
    config: &PropertyConfig,
) -> Result<GrowthTrace, IncrementalError> {
    if stream.is_empty() || checkpoints == 0 {
        return Err(IncrementalError::EmptyStream);
    }
    let order = stream.ordered(policy);
    let total = order.len();
    let mut points = Vec::with_capacity(checkpoints as usize);
    for k in 1..=checkpoints {
        // ceiling division: the first checkpoint is never empty
        let edges_seen = (total * k as usize).div_ceil(checkpoints as usize);
        let net = stream.prefix_network(&order, edges_seen);
        points.push(GrowthPoint {
            k,
            edges_seen,
            properties: compute_properties(&net, config),
        });
    }
    Ok(GrowthTrace {
        net_type: stream.net_type,
        policy,
        points,
    })
}

/// Randomness and trend tests for one property trajectory.
#[derive(Debug, Clone, Serialize)]
pub struct TrendSummary {
    pub property: String,
    /// Defined snapshots actually tested.
    pub n_used: usize,
    /// Undefined snapshots dropped before testing.
    pub n_dropped: usize,
    pub tests: Vec<TestResult>,
}

/// Minimum defined points before trend testing is meaningful.
pub const MIN_TREND_POINTS: usize = 10;

/// Run the runs test, Bartels rank test, and Mann-Kendall test on a property
/// trajectory, dropping undefined snapshots first.
pub fn trend_tests(trace: &GrowthTrace, property: &str) -> Result<TrendSummary, IncrementalError> {
    let raw = trace.trajectory(property);
    let series: Vec<f64> = raw.iter().filter_map(|v| *v).collect();
    let n_dropped = raw.len() - series.len();
    if series.len() < MIN_TREND_POINTS {
        return Err(IncrementalError::TooFewPoints(series.len(), MIN_TREND_POINTS));
    }
    let mut tests = Vec::new();
    for result in [runs_test(&series), bartels_test(&series), mann_kendall(&series)] {
        if let Ok(t) = result {
            tests.push(t);
        }
    }
    Ok(TrendSummary {
        property: property.to_string(),
        n_used: series.len(),
        n_dropped,
        tests,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Corpus, Document};
    use crate::netbuild::build_collection_network;

    fn corpus_of(texts: &[&str]) -> Corpus {
        let docs = texts
            .iter()
            .enumerate()
            .map(|(i, t)| Document {
                doc_id: format!("doc{i}"),
                genre: "test".to_string(),
                tokens: crate::corpus::tokenize(t),
            })
            .collect();
        Corpus::from_documents(docs)
    }

    fn fast_config() -> PropertyConfig {
        PropertyConfig {
            compute_pvalues: false,
            ..PropertyConfig::default()
        }
    }

    const FOX: &str = "the quick brown fox jumped over the lazy dog";

    #[test]
    fn occurrence_order_follows_reading_order() {
        let corpus = corpus_of(&[FOX]);
        let stream = EdgeStream::from_corpus(&corpus, NetType::Digraph).unwrap();
        let named: Vec<(String, String)> = stream
            .ordered(OrderingPolicy::Occurrence)
            .iter()
            .map(|&(a, b)| (stream.words[a as usize].clone(), stream.words[b as usize].clone()))
            .collect();
        assert_eq!(named[0], ("the".into(), "quick".into()));
        assert_eq!(named[1], ("quick".into(), "brown".into()));
        assert_eq!(named.last().unwrap(), &("lazy".into(), "dog".into()));
        assert_eq!(named.len(), 8);
    }

    #[test]
    fn frequency_order_puts_heavy_edges_first() {
        // bigrams: (a,b) x2, (b,a) x1, (a,c) x1
        let corpus = corpus_of(&["a b a b a c"]);
        let stream = EdgeStream::from_corpus(&corpus, NetType::Digraph).unwrap();
        let order = stream.ordered(OrderingPolicy::Frequency);
        let named: Vec<(String, String)> = order
            .iter()
            .map(|&(a, b)| (stream.words[a as usize].clone(), stream.words[b as usize].clone()))
            .collect();
        assert_eq!(named[0], ("a".into(), "b".into()));
        // tie between (b,a) and (a,c) broken by first occurrence
        assert_eq!(named[1], ("b".into(), "a".into()));
        assert_eq!(named[2], ("a".into(), "c".into()));

        // collapsed undirected counts: {a,b} x3 then {a,c} x1
        let u = EdgeStream::from_corpus(&corpus, NetType::Undigraph1).unwrap();
        assert_eq!(u.len(), 2);
        let first = u.ordered(OrderingPolicy::Frequency)[0];
        assert_eq!(u.words[first.0 as usize], "a");
        assert_eq!(u.words[first.1 as usize], "b");
    }

    #[test]
    fn stream_matches_collection_network() {
        let corpus = corpus_of(&[FOX, "the airplane took off off we go", "a b c a"]);
        for &t in NetType::ALL.iter() {
            let stream = EdgeStream::from_corpus(&corpus, t).unwrap();
            let full = build_collection_network(&corpus, t).unwrap();
            assert_eq!(stream.len(), full.n_edges(), "{t}");
            let order = stream.ordered(OrderingPolicy::Occurrence);
            let prefix = stream.prefix_network(&order, order.len());
            for (a, b) in prefix.edges() {
                let wa = prefix.word(a);
                let wb = prefix.word(b);
                let fa = full.vertex_id(wa).unwrap();
                let fb = full.vertex_id(wb).unwrap();
                assert!(full.has_edge(fa, fb), "{t}: missing {wa}->{wb}");
            }
        }
    }

    #[test]
    fn prefixes_are_consistent() {
        let corpus = corpus_of(&["one two three one three four two five one four six"]);
        let stream = EdgeStream::from_corpus(&corpus, NetType::Undigraph1).unwrap();
        for policy in [OrderingPolicy::Occurrence, OrderingPolicy::Frequency] {
            let order = stream.ordered(policy);
            for k in 1..order.len() {
                let small = stream.prefix_network(&order, k);
                let big = stream.prefix_network(&order, k + 1);
                assert_eq!(big.n_edges(), small.n_edges() + 1);
                for (a, b) in small.edges() {
                    let wa = small.word(a);
                    let wb = small.word(b);
                    assert!(big.has_edge(big.vertex_id(wa).unwrap(), big.vertex_id(wb).unwrap()));
                }
            }
        }
    }

    #[test]
    fn growth_is_monotone_and_final_point_matches_full_network() {
        let corpus = corpus_of(&[
            "the quick brown fox jumped over the lazy dog and the dog slept",
            "a stitch in time saves nine and nine lives has a cat",
            "over the river and through the woods to grandmother's house we go",
        ]);
        let config = fast_config();
        for &t in &[NetType::Digraph, NetType::Undigraph2] {
            let stream = EdgeStream::from_corpus(&corpus, t).unwrap();
            let trace = growth_trace(&stream, OrderingPolicy::Occurrence, 20, &config).unwrap();
            assert_eq!(trace.points.len(), 20);

            let mut prev_v = 0usize;
            let mut prev_e = 0usize;
            let mut prev_giant = 0usize;
            for p in &trace.points {
                assert!(p.properties.n_vertices >= prev_v);
                assert!(p.properties.n_edges >= prev_e);
                let giant = p.properties.giant_cc.unwrap();
                assert!(giant >= prev_giant);
                prev_v = p.properties.n_vertices;
                prev_e = p.properties.n_edges;
                prev_giant = giant;
            }

            // every vertex of this corpus is incident to an edge, so the final
            // checkpoint reproduces the full collection network record
            let full = build_collection_network(&corpus, t).unwrap();
            let want = compute_properties(&full, &config);
            let last = &trace.points.last().unwrap().properties;
            assert_eq!(p_json(last), p_json(&want), "{t}");
        }
    }

    fn p_json(p: &GlobalProperties) -> String {
        serde_json::to_string(p).unwrap()
    }

    #[test]
    fn checkpoints_recompute_from_scratch() {
        let corpus = corpus_of(&["b a c a d a e b c d e f g b f"]);
        let stream = EdgeStream::from_corpus(&corpus, NetType::Digraph).unwrap();
        let config = fast_config();
        let order = stream.ordered(OrderingPolicy::Frequency);
        let trace = growth_trace(&stream, OrderingPolicy::Frequency, 10, &config).unwrap();
        for p in &trace.points {
            let net = stream.prefix_network(&order, p.edges_seen);
            let fresh = compute_properties(&net, &config);
            assert_eq!(p_json(&p.properties), p_json(&fresh), "k={}", p.k);
        }
    }

    #[test]
    fn trend_tests_flag_monotone_growth() {
        let texts: Vec<String> = (0..40)
            .map(|i| format!("w{} w{} w{} w{}", i, i + 1, i + 2, i + 3))
            .collect();
        let refs: Vec<&str> = texts.iter().map(String::as_str).collect();
        let corpus = corpus_of(&refs);
        let stream = EdgeStream::from_corpus(&corpus, NetType::Undigraph1).unwrap();
        let trace = growth_trace(&stream, OrderingPolicy::Occurrence, 30, &fast_config()).unwrap();
        let summary = trend_tests(&trace, "n_vertices").unwrap();
        assert_eq!(summary.n_used, 30);
        assert_eq!(summary.n_dropped, 0);
        let mk = summary.tests.iter().find(|t| t.test_name == "mann_kendall").unwrap();
        assert!(mk.p_value < 0.01, "p = {}", mk.p_value);
        assert!(mk.notes.iter().any(|n| n.contains("tau")));

        // undefined p-value trajectories are dropped, not zero-filled
        let err = trend_tests(&trace, "pvalue_alpha");
        assert!(matches!(err, Err(IncrementalError::TooFewPoints(0, _))));
    }

    #[test]
    fn single_checkpoint_sees_everything() {
        let corpus = corpus_of(&[FOX]);
        let stream = EdgeStream::from_corpus(&corpus, NetType::SimplifiedDigraph).unwrap();
        let trace = growth_trace(&stream, OrderingPolicy::Occurrence, 1, &fast_config()).unwrap();
        assert_eq!(trace.points[0].edges_seen, stream.len());
    }
}
