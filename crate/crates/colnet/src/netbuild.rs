//! Construction of the six collocation network variants.
//!
//! All variants share one vertex set (the unique word types of the source
//! text) and differ only in their edges: directed or undirected bigram
//! adjacency, trigram co-membership, and self-loop removal. Parallel edges
//! are always collapsed; all networks are unweighted.

use std::collections::HashMap;
use std::fmt;
use std::io::{BufRead, Write};

use indexmap::IndexSet;
use thiserror::Error;

use crate::corpus::{ngram_stream, Corpus};

#[derive(Debug, Error)]
pub enum NetError {
    #[error("empty corpus")]
    EmptyCorpus,
    #[error("malformed edge list at line {0}")]
    MalformedEdgeList(usize),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// The six network variants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum NetType {
    Digraph,
    Undigraph1,
    Undigraph2,
    SimplifiedDigraph,
    SimplifiedUndigraph1,
    SimplifiedUndigraph2,
}

impl NetType {
    pub const ALL: [NetType; 6] = [
        NetType::Digraph,
        NetType::Undigraph1,
        NetType::Undigraph2,
        NetType::SimplifiedDigraph,
        NetType::SimplifiedUndigraph1,
        NetType::SimplifiedUndigraph2,
    ];

    pub fn directed(self) -> bool {
        matches!(self, NetType::Digraph | NetType::SimplifiedDigraph)
    }

    pub fn simplified(self) -> bool {
        matches!(
            self,
            NetType::SimplifiedDigraph | NetType::SimplifiedUndigraph1 | NetType::SimplifiedUndigraph2
        )
    }

    /// The loop-free counterpart of this variant.
    pub fn simplify(self) -> NetType {
        match self {
            NetType::Digraph => NetType::SimplifiedDigraph,
            NetType::Undigraph1 => NetType::SimplifiedUndigraph1,
            NetType::Undigraph2 => NetType::SimplifiedUndigraph2,
            s => s,
        }
    }

    pub fn parse(s: &str) -> Option<NetType> {
        match s.to_ascii_lowercase().as_str() {
            "digraph" => Some(NetType::Digraph),
            "undigraph1" => Some(NetType::Undigraph1),
            "undigraph2" => Some(NetType::Undigraph2),
            "sdigraph" => Some(NetType::SimplifiedDigraph),
            "sundigraph1" => Some(NetType::SimplifiedUndigraph1),
            "sundigraph2" => Some(NetType::SimplifiedUndigraph2),
            _ => None,
        }
    }
}

impl fmt::Display for NetType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            NetType::Digraph => "digraph",
            NetType::Undigraph1 => "undigraph1",
            NetType::Undigraph2 => "undigraph2",
            NetType::SimplifiedDigraph => "sdigraph",
            NetType::SimplifiedUndigraph1 => "sundigraph1",
            NetType::SimplifiedUndigraph2 => "sundigraph2",
        };
        f.write_str(s)
    }
}

/// An unweighted collocation network with a word ↔ vertex-id table.
///
/// Vertex ids are dense integers assigned by first occurrence in the token
/// stream. Undirected edges are stored with source ≤ target. Edge insertion
/// order is preserved, which downstream incremental analysis relies on.
#[derive(Debug, Clone)]
pub struct CollocationNetwork {
    words: Vec<String>,
    index: HashMap<String, u32>,
    edges: IndexSet<(u32, u32)>,
    pub directed: bool,
    pub allows_self_loops: bool,
    pub net_type: Option<NetType>,
}

impl CollocationNetwork {
    pub fn new(directed: bool, allows_self_loops: bool, net_type: Option<NetType>) -> Self {
        CollocationNetwork {
            words: Vec::new(),
            index: HashMap::new(),
            edges: IndexSet::new(),
            directed,
            allows_self_loops,
            net_type,
        }
    }

    pub fn n_vertices(&self) -> usize {
        self.words.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn word(&self, id: u32) -> &str {
        &self.words[id as usize]
    }

    pub fn vertex_id(&self, word: &str) -> Option<u32> {
        self.index.get(word).copied()
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.edges.iter().copied()
    }

    pub fn has_edge(&self, a: u32, b: u32) -> bool {
        self.edges.contains(&self.canonical(a, b))
    }

    pub fn intern(&mut self, word: &str) -> u32 {
        if let Some(&id) = self.index.get(word) {
            return id;
        }
        let id = self.words.len() as u32;
        self.words.push(word.to_string());
        self.index.insert(word.to_string(), id);
        id
    }

    fn canonical(&self, a: u32, b: u32) -> (u32, u32) {
        if self.directed || a <= b {
            (a, b)
        } else {
            (b, a)
        }
    }

    /// Insert an edge; returns false if it was a duplicate or a rejected
    /// self-loop.
    pub fn add_edge(&mut self, a: u32, b: u32) -> bool {
        if a == b && !self.allows_self_loops {
            return false;
        }
        self.edges.insert(self.canonical(a, b))
    }

    pub fn self_loop_count(&self) -> usize {
        self.edges.iter().filter(|(a, b)| a == b).count()
    }
}

fn add_token_run(net: &mut CollocationNetwork, tokens: &[String], net_type: NetType) {
    for t in tokens {
        net.intern(t);
    }
    match net_type {
        NetType::Digraph | NetType::SimplifiedDigraph | NetType::Undigraph1 | NetType::SimplifiedUndigraph1 => {
            for gram in ngram_stream(tokens, 2).expect("bigram order") {
                let a = net.intern(&gram[0]);
                let b = net.intern(&gram[1]);
                net.add_edge(a, b);
            }
        }
        NetType::Undigraph2 | NetType::SimplifiedUndigraph2 => {
            for gram in ngram_stream(tokens, 3).expect("trigram order") {
                let a = net.intern(&gram[0]);
                let b = net.intern(&gram[1]);
                let c = net.intern(&gram[2]);
                net.add_edge(a, b);
                net.add_edge(b, c);
                net.add_edge(a, c);
            }
        }
    }
}

/// Build one network variant from a single token sequence.
pub fn build_network(tokens: &[String], net_type: NetType) -> CollocationNetwork {
    let mut net = CollocationNetwork::new(net_type.directed(), !net_type.simplified(), Some(net_type));
    add_token_run(&mut net, tokens, net_type);
    net
}

/// Build one network variant over a whole collection treated as a
/// super-document. N-gram windows never cross document boundaries.
pub fn build_collection_network(corpus: &Corpus, net_type: NetType) -> Result<CollocationNetwork, NetError> {
    if corpus.is_empty() {
        return Err(NetError::EmptyCorpus);
    }
    let mut net = CollocationNetwork::new(net_type.directed(), !net_type.simplified(), Some(net_type));
    for doc in &corpus.documents {
        add_token_run(&mut net, &doc.tokens, net_type);
    }
    Ok(net)
}

/// Copy of the network with all self-loops removed; vertex set unchanged.
pub fn remove_self_loops(net: &CollocationNetwork) -> CollocationNetwork {
    let mut out = CollocationNetwork {
        words: net.words.clone(),
        index: net.index.clone(),
        edges: net.edges.iter().copied().filter(|(a, b)| a != b).collect(),
        directed: net.directed,
        allows_self_loops: false,
        net_type: net.net_type.map(NetType::simplify),
    };
    out.edges.shrink_to_fit();
    out
}

/// Serialize to edge-list text: header `directed=<bool> loops=<bool> n=<|V|>`,
/// one `source<TAB>target` line per edge. Vertices without incident edges are
/// written as a bare `word` line so the round trip is lossless.
pub fn write_edge_list<W: Write>(net: &CollocationNetwork, mut w: W) -> Result<(), NetError> {
    writeln!(
        w,
        "directed={} loops={} n={}",
        net.directed,
        net.allows_self_loops,
        net.n_vertices()
    )?;
    let mut touched = vec![false; net.n_vertices()];
    for (a, b) in net.edges() {
        touched[a as usize] = true;
        touched[b as usize] = true;
        writeln!(w, "{}\t{}", net.word(a), net.word(b))?;
    }
    for (id, t) in touched.iter().enumerate() {
        if !t {
            writeln!(w, "{}", net.words[id])?;
        }
    }
    Ok(())
}

/// Inverse of [`write_edge_list`], up to vertex-id renumbering.
pub fn read_edge_list<R: BufRead>(r: R) -> Result<CollocationNetwork, NetError> {
    let mut lines = r.lines();
    let header = lines.next().ok_or(NetError::MalformedEdgeList(1))??;
    let mut directed = None;
    let mut loops = None;
    let mut n = None;
    for field in header.split_whitespace() {
        match field.split_once('=') {
            Some(("directed", v)) => directed = v.parse().ok(),
            Some(("loops", v)) => loops = v.parse().ok(),
            Some(("n", v)) => n = v.parse::<usize>().ok(),
            _ => return Err(NetError::MalformedEdgeList(1)),
        }
    }
    let (directed, loops, n) = match (directed, loops, n) {
        (Some(d), Some(l), Some(n)) => (d, l, n),
        _ => return Err(NetError::MalformedEdgeList(1)),
    };
    let mut net = CollocationNetwork::new(directed, loops, None);
    for (i, line) in lines.enumerate() {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        match line.split_once('\t') {
            Some((src, tgt)) => {
                let a = net.intern(src);
                let b = net.intern(tgt);
                net.add_edge(a, b);
            }
            None => {
                net.intern(&line);
            }
        }
        if net.n_vertices() > n {
            return Err(NetError::MalformedEdgeList(i + 2));
        }
    }
    Ok(net)
}
