//! Interaction graphs around the scored account and their statistics.
//!
//! Nodes are the endpoints of edges; an account with no interactions of a
//! kind yields an empty graph. Self-loops are dropped in every graph.

use std::collections::{BTreeMap, BTreeSet};

use crate::account::AccountSnapshot;
use crate::stats::describe;

use super::{Block, FeatureClass};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GraphKind {
    Retweet,
    Mention,
    HashtagCooccurrence,
}

impl GraphKind {
    pub fn as_str(self) -> &'static str {
        match self {
            GraphKind::Retweet => "retweet",
            GraphKind::Mention => "mention",
            GraphKind::HashtagCooccurrence => "hashtag",
        }
    }

    pub fn directed(self) -> bool {
        !matches!(self, GraphKind::HashtagCooccurrence)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InteractionGraph {
    pub kind: GraphKind,
    pub nodes: BTreeSet<String>,
    /// Directed graphs key by (source, target); undirected by the ordered pair.
    pub edges: BTreeMap<(String, String), u32>,
    pub ego: Option<String>,
}

impl InteractionGraph {
    pub fn new(kind: GraphKind, ego: Option<String>) -> Self {
        InteractionGraph {
            kind,
            nodes: BTreeSet::new(),
            edges: BTreeMap::new(),
            ego,
        }
    }

    pub fn add_edge(&mut self, a: &str, b: &str) {
        if a == b {
            return;
        }
        let key = if !self.kind.directed() && b < a {
            (b.to_string(), a.to_string())
        } else {
            (a.to_string(), b.to_string())
        };
        self.nodes.insert(a.to_string());
        self.nodes.insert(b.to_string());
        *self.edges.entry(key).or_insert(0) += 1;
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edge count over the number of possible edges for the graph's direction.
    pub fn density(&self) -> f64 {
        let n = self.nodes.len() as f64;
        if n < 2.0 {
            return 0.0;
        }
        let possible = if self.kind.directed() {
            n * (n - 1.0)
        } else {
            n * (n - 1.0) / 2.0
        };
        self.edges.len() as f64 / possible
    }

    /// Simple undirected neighbor sets (directions and weights dropped).
    pub fn undirected_adjacency(&self) -> BTreeMap<&str, BTreeSet<&str>> {
        let mut adj: BTreeMap<&str, BTreeSet<&str>> =
            self.nodes.iter().map(|n| (n.as_str(), BTreeSet::new())).collect();
        for (a, b) in self.edges.keys() {
            adj.get_mut(a.as_str()).unwrap().insert(b.as_str());
            adj.get_mut(b.as_str()).unwrap().insert(a.as_str());
        }
        adj
    }

    /// Per node, in node order: (undirected degree, total incident weight).
    pub fn degree_and_strength(&self) -> Vec<(usize, u64)> {
        let adj = self.undirected_adjacency();
        let mut strength: BTreeMap<&str, u64> = BTreeMap::new();
        for ((a, b), w) in &self.edges {
            *strength.entry(a.as_str()).or_default() += u64::from(*w);
            *strength.entry(b.as_str()).or_default() += u64::from(*w);
        }
        self.nodes
            .iter()
            .map(|n| (adj[n.as_str()].len(), strength.get(n.as_str()).copied().unwrap_or(0)))
            .collect()
    }

    pub fn out_strength(&self, node: &str) -> u64 {
        self.edges
            .iter()
            .filter(|((a, _), _)| a == node)
            .map(|(_, w)| u64::from(*w))
            .sum()
    }

    pub fn in_strength(&self, node: &str) -> u64 {
        self.edges
            .iter()
            .filter(|((_, b), _)| b == node)
            .map(|(_, w)| u64::from(*w))
            .sum()
    }

    /// Undirected degree over `n − 1`; 0 for graphs of one node or fewer.
    pub fn degree_centrality(&self, node: &str) -> f64 {
        let n = self.nodes.len();
        if n <= 1 {
            return 0.0;
        }
        let adj = self.undirected_adjacency();
        adj.get(node).map_or(0.0, |s| s.len() as f64 / (n - 1) as f64)
    }
}

/// Retweet, mention and hashtag co-occurrence graphs, in that order.
pub fn build_graphs(snapshot: &AccountSnapshot) -> [InteractionGraph; 3] {
    let ego = snapshot.user.user_id.as_str();
    let mut retweet = InteractionGraph::new(GraphKind::Retweet, Some(ego.to_string()));
    let mut mention = InteractionGraph::new(GraphKind::Mention, Some(ego.to_string()));
    let mut hashtag = InteractionGraph::new(GraphKind::HashtagCooccurrence, None);

    for t in &snapshot.tweets {
        if let Some(author) = &t.retweeted_author {
            retweet.add_edge(ego, &author.user_id);
        }
        let targets: BTreeSet<&str> = t.mentioned_users.iter().map(|m| m.user_id.as_str()).collect();
        for target in targets {
            mention.add_edge(ego, target);
        }
        for (i, a) in t.hashtags.iter().enumerate() {
            for b in &t.hashtags[i + 1..] {
                hashtag.add_edge(a, b);
            }
        }
    }
    for m in &snapshot.mentions {
        mention.add_edge(&m.author_id, ego);
    }
    [retweet, mention, hashtag]
}

/// Transitivity: closed connected triples over all connected triples, on the
/// undirected unweighted projection. 0 when there are no triples.
pub fn global_clustering(graph: &InteractionGraph) -> f64 {
    let adj = graph.undirected_adjacency();
    let mut triples = 0u64;
    let mut closed = 0u64;
    for nbrs in adj.values() {
        let d = nbrs.len() as u64;
        triples += d * d.saturating_sub(1) / 2;
        let list: Vec<&&str> = nbrs.iter().collect();
        for (i, u) in list.iter().enumerate() {
            for v in &list[i + 1..] {
                if adj[**u].contains(**v) {
                    closed += 1;
                }
            }
        }
    }
    if triples == 0 {
        0.0
    } else {
        closed as f64 / triples as f64
    }
}

pub fn network_features(graphs: &[InteractionGraph; 3]) -> Block {
    let mut block = Block::new(FeatureClass::Network, "network");
    for g in graphs {
        let kind = g.kind.as_str();
        let p = |stat: &str| format!("net.{kind}.{stat}");
        block.push(p("nodes"), format!("nodes in the {kind} graph"), g.node_count() as f64);
        block.push(p("edges"), format!("distinct edges in the {kind} graph"), g.edge_count() as f64);
        block.push(p("density"), format!("edge density of the {kind} graph"), g.density());
        if let Some(ego) = &g.ego {
            block.push(
                p("ego_out_strength"),
                "total weight of edges leaving the account",
                g.out_strength(ego) as f64,
            );
            block.push(
                p("ego_in_strength"),
                "total weight of edges entering the account",
                g.in_strength(ego) as f64,
            );
            block.push(
                p("ego_degree_centrality"),
                "account degree over n - 1",
                g.degree_centrality(ego),
            );
        }
        block.push(p("clustering"), "global clustering coefficient (transitivity)", global_clustering(g));
        let ds = g.degree_and_strength();
        let degrees: Vec<f64> = ds.iter().map(|(d, _)| *d as f64).collect();
        let strengths: Vec<f64> = ds.iter().map(|(_, s)| *s as f64).collect();
        block.push_stats(&p("degree"), &format!("{kind} graph node degrees"), "bins=10;scale=linear", &describe(&degrees));
        block.push_stats(&p("strength"), &format!("{kind} graph node strengths"), "bins=10;scale=linear", &describe(&strengths));
    }
    block
}
