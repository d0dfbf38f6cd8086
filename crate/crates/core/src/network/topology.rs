use std::collections::{BTreeMap, VecDeque};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::physics::{AmplifierSpec, Amplifiers};
use crate::qot::PenaltyConfig;

/// Allowed mismatch between a link length and the sum of its spans, km.
pub const SPAN_SUM_TOLERANCE_KM: f64 = 1.0;

/// On-disk topology document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TopologyFile {
    pub nodes: Vec<NodeRecord>,
    pub links: Vec<LinkRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeRecord {
    pub id: u32,
    #[serde(default)]
    pub name: String,
    pub core: bool,
    #[serde(default = "one")]
    pub population: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkRecord {
    pub a: u32,
    pub b: u32,
    pub length_km: f64,
    pub spans_km: Vec<f64>,
    /// Per-band overrides of the default amplifiers.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub amplifiers: Vec<AmplifierSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Node {
    pub id: u32,
    pub name: String,
    pub is_core: bool,
    pub population: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FiberSpan {
    pub length_km: f64,
    /// Connector and splice losses drawn at load time, dB.
    pub lumped_loss_db: f64,
}

/// Bidirectional link between two node indices.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Link {
    pub a: usize,
    pub b: usize,
    pub length_km: f64,
    pub spans: Vec<FiberSpan>,
    pub amplifiers: Amplifiers,
}

impl Link {
    pub fn average_span_km(&self) -> f64 {
        self.spans.iter().map(|s| s.length_km).sum::<f64>() / self.spans.len() as f64
    }

    pub fn mean_lumped_loss_db(&self) -> f64 {
        self.spans.iter().map(|s| s.lumped_loss_db).sum::<f64>() / self.spans.len() as f64
    }

    pub fn other(&self, node: usize) -> usize {
        if node == self.a {
            self.b
        } else {
            self.a
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Topology {
    nodes: Vec<Node>,
    links: Vec<Link>,
    /// `(neighbour, link)` per node, sorted by neighbour id.
    #[serde(skip)]
    adjacency: Vec<Vec<(usize, usize)>>,
}

impl Topology {
    /// Parses and validates a topology, drawing lumped span losses from `seed`.
    pub fn from_file(file: &TopologyFile, penalties: &PenaltyConfig, seed: u64) -> Result<Self> {
        penalties.validate()?;
        let mut index = BTreeMap::new();
        let mut nodes = Vec::with_capacity(file.nodes.len());
        for (k, n) in file.nodes.iter().enumerate() {
            if index.insert(n.id, k).is_some() {
                return Err(Error::TopologySchema(format!("duplicate node id {}", n.id)));
            }
            if !(n.population >= 0.0 && n.population.is_finite()) {
                return Err(Error::TopologySchema(format!("node {} has invalid population {}", n.id, n.population)));
            }
            nodes.push(Node {
                id: n.id,
                name: if n.name.is_empty() { n.id.to_string() } else { n.name.clone() },
                is_core: n.core,
                population: n.population,
            });
        }
        let cores = nodes.iter().filter(|n| n.is_core).count();
        if cores < 2 {
            return Err(Error::TooFewCoreNodes(cores));
        }

        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut links = Vec::with_capacity(file.links.len());
        let mut seen = BTreeMap::new();
        for l in &file.links {
            let lookup = |id: u32| {
                index
                    .get(&id)
                    .copied()
                    .ok_or_else(|| Error::TopologySchema(format!("link refers to unknown node {id}")))
            };
            let (a, b) = (lookup(l.a)?, lookup(l.b)?);
            if a == b {
                return Err(Error::TopologySchema(format!("self-loop at node {}", l.a)));
            }
            if seen.insert((a.min(b), a.max(b)), ()).is_some() {
                return Err(Error::TopologySchema(format!("duplicate link {}-{}", l.a, l.b)));
            }
            if !(l.length_km > 0.0) || l.spans_km.iter().any(|&s| !(s > 0.0)) {
                return Err(Error::ZeroLengthLink { a: l.a, b: l.b });
            }
            if l.spans_km.is_empty() {
                return Err(Error::TopologySchema(format!("link {}-{} has no spans", l.a, l.b)));
            }
            let span_sum_km: f64 = l.spans_km.iter().sum();
            if (span_sum_km - l.length_km).abs() > SPAN_SUM_TOLERANCE_KM {
                return Err(Error::SpanLengthMismatch { a: l.a, b: l.b, span_sum_km, length_km: l.length_km });
            }
            let spans = l
                .spans_km
                .iter()
                .map(|&length_km| FiberSpan {
                    length_km,
                    lumped_loss_db: penalties.draw_lumped_loss_db(&mut rng, length_km),
                })
                .collect();
            links.push(Link {
                a,
                b,
                length_km: l.length_km,
                spans,
                amplifiers: Amplifiers::new(l.amplifiers.iter().cloned())?,
            });
        }

        let topo = Self::assemble(nodes, links);
        topo.check_core_connected()?;
        Ok(topo)
    }

    pub fn from_json_str(json: &str, penalties: &PenaltyConfig, seed: u64) -> Result<Self> {
        let file: TopologyFile = serde_json::from_str(json).map_err(|e| Error::TopologySchema(e.to_string()))?;
        Self::from_file(&file, penalties, seed)
    }

    fn assemble(nodes: Vec<Node>, links: Vec<Link>) -> Self {
        let mut adjacency = vec![Vec::new(); nodes.len()];
        for (k, l) in links.iter().enumerate() {
            adjacency[l.a].push((l.b, k));
            adjacency[l.b].push((l.a, k));
        }
        for adj in &mut adjacency {
            adj.sort_by_key(|&(n, _)| nodes[n].id);
        }
        Topology { nodes, links, adjacency }
    }

    fn check_core_connected(&self) -> Result<()> {
        let cores: Vec<usize> = self.core_nodes().collect();
        let mut reached = vec![false; self.nodes.len()];
        let mut queue = VecDeque::from([cores[0]]);
        reached[cores[0]] = true;
        while let Some(u) = queue.pop_front() {
            for &(v, _) in &self.adjacency[u] {
                if !reached[v] {
                    reached[v] = true;
                    queue.push_back(v);
                }
            }
        }
        match cores.iter().find(|&&c| !reached[c]) {
            Some(&c) => Err(Error::DisconnectedCore(format!(
                "node {} unreachable from node {}",
                self.nodes[c].id, self.nodes[cores[0]].id
            ))),
            None => Ok(()),
        }
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn node(&self, idx: usize) -> &Node {
        &self.nodes[idx]
    }

    pub fn link(&self, idx: usize) -> &Link {
        &self.links[idx]
    }

    pub fn node_index(&self, id: u32) -> Option<usize> {
        self.nodes.iter().position(|n| n.id == id)
    }

    pub fn neighbors(&self, idx: usize) -> &[(usize, usize)] {
        &self.adjacency[idx]
    }

    pub fn degree(&self, idx: usize) -> usize {
        self.adjacency[idx].len()
    }

    pub fn core_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.nodes.len()).filter(|&i| self.nodes[i].is_core)
    }

    /// Unordered core pairs `(s, d)` with `id(s) < id(d)`, in id order.
    pub fn core_pairs(&self) -> Vec<(usize, usize)> {
        let mut cores: Vec<usize> = self.core_nodes().collect();
        cores.sort_by_key(|&i| self.nodes[i].id);
        let mut out = Vec::new();
        for (k, &s) in cores.iter().enumerate() {
            for &d in &cores[k + 1..] {
                out.push((s, d));
            }
        }
        out
    }

    /// Clone with every span length replaced by `length_km` (link lengths
    /// follow). Lumped losses are kept.
    pub fn with_uniform_spans(&self, length_km: f64) -> Topology {
        let links = self
            .links
            .iter()
            .map(|l| {
                let spans: Vec<FiberSpan> = l.spans.iter().map(|s| FiberSpan { length_km, ..*s }).collect();
                Link { length_km: length_km * spans.len() as f64, spans, ..l.clone() }
            })
            .collect();
        Self::assemble(self.nodes.clone(), links)
    }
}

/// Reads and validates a topology file.
pub fn load_topology(path: impl AsRef<Path>, penalties: &PenaltyConfig, seed: u64) -> Result<Topology> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Topology::from_json_str(&text, penalties, seed)
}

/// Six-node, eight-link test network with 80 km spans.
pub const FIXTURE_6NODE: &str = include_str!("../../data/fixture_6node.json");

/// Parameters of [`random_topology`].
#[derive(Debug, Clone, PartialEq)]
pub struct RandomTopologyParams {
    pub nodes: usize,
    /// Extra links beyond the spanning tree.
    pub extra_links: usize,
    /// Side of the square the nodes are scattered over, km.
    pub area_km: f64,
    pub span_km: f64,
    pub core_fraction: f64,
}

impl Default for RandomTopologyParams {
    fn default() -> Self {
        RandomTopologyParams { nodes: 10, extra_links: 6, area_km: 1200.0, span_km: 80.0, core_fraction: 0.7 }
    }
}

/// Random connected topology: nodes scattered uniformly, a Euclidean minimum
/// spanning tree, then the shortest remaining node pairs as extra links.
pub fn random_topology(params: &RandomTopologyParams, seed: u64) -> Result<TopologyFile> {
    if params.nodes < 2 {
        return Err(Error::InvalidParameter("need at least two nodes".into()));
    }
    if !(params.span_km > 0.0 && params.area_km > 0.0) {
        return Err(Error::InvalidParameter("area and span length must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = params.nodes;
    let pos: Vec<(f64, f64)> =
        (0..n).map(|_| (rng.gen_range(0.0..params.area_km), rng.gen_range(0.0..params.area_km))).collect();
    let dist = |i: usize, j: usize| ((pos[i].0 - pos[j].0).powi(2) + (pos[i].1 - pos[j].1).powi(2)).sqrt();

    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut in_tree = vec![false; n];
    in_tree[0] = true;
    for _ in 1..n {
        let (i, j) = (0..n)
            .filter(|&i| in_tree[i])
            .flat_map(|i| (0..n).filter(|&j| !in_tree[j]).map(move |j| (i, j)))
            .min_by(|x, y| dist(x.0, x.1).total_cmp(&dist(y.0, y.1)))
            .expect("some node is outside the tree");
        in_tree[j] = true;
        edges.push((i.min(j), i.max(j)));
    }
    let mut rest: Vec<(usize, usize)> =
        (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|e| !edges.contains(e)).collect();
    rest.sort_by(|x, y| dist(x.0, x.1).total_cmp(&dist(y.0, y.1)));
    edges.extend(rest.into_iter().take(params.extra_links));

    let mut core: Vec<bool> = (0..n).map(|_| rng.gen_bool(params.core_fraction.clamp(0.0, 1.0))).collect();
    core[0] = true;
    core[n - 1] = true;
    let nodes = (0..n)
        .map(|i| NodeRecord {
            id: i as u32 + 1,
            name: format!("N{}", i + 1),
            core: core[i],
            population: rng.gen_range(0.5..2.0),
        })
        .collect();
    let links = edges
        .into_iter()
        .map(|(i, j)| {
            let spans = (dist(i, j) / params.span_km).ceil().max(1.0) as usize;
            LinkRecord {
                a: i as u32 + 1,
                b: j as u32 + 1,
                length_km: spans as f64 * params.span_km,
                spans_km: vec![params.span_km; spans],
                amplifiers: Vec::new(),
            }
        })
        .collect();
    Ok(TopologyFile { nodes, links })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn load(json: &str) -> Result<Topology> {
        Topology::from_json_str(json, &PenaltyConfig::default(), 1)
    }

    #[test]
    fn fixture_shape() {
        let t = load(FIXTURE_6NODE).unwrap();
        assert_eq!(t.nodes().len(), 6);
        assert_eq!(t.links().len(), 8);
        assert_eq!(t.links().iter().map(|l| l.a).chain(t.links().iter().map(|l| l.b)).count(), 16);
        let degrees: usize = (0..6).map(|i| t.degree(i)).sum();
        assert_eq!(degrees, 16);
        for l in t.links() {
            assert!(l.spans.iter().all(|s| s.length_km == 80.0));
            assert!(l.spans.iter().all(|s| s.lumped_loss_db > 0.4));
        }
    }

    #[test]
    fn lumped_losses_follow_the_seed() {
        let p = PenaltyConfig::default();
        let a = Topology::from_json_str(FIXTURE_6NODE, &p, 7).unwrap();
        let b = Topology::from_json_str(FIXTURE_6NODE, &p, 7).unwrap();
        let c = Topology::from_json_str(FIXTURE_6NODE, &p, 8).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn span_mismatch_rejected() {
        let json = r#"{"nodes":[{"id":1,"core":true},{"id":2,"core":true}],
            "links":[{"a":1,"b":2,"length_km":100,"spans_km":[50,45]}]}"#;
        assert!(matches!(load(json), Err(Error::SpanLengthMismatch { .. })));
        let ok = json.replace("45]", "49.5]");
        assert!(load(&ok).is_ok());
    }

    #[test]
    fn zero_length_rejected() {
        let json = r#"{"nodes":[{"id":1,"core":true},{"id":2,"core":true}],
            "links":[{"a":1,"b":2,"length_km":0,"spans_km":[0]}]}"#;
        assert!(matches!(load(json), Err(Error::ZeroLengthLink { a: 1, b: 2 })));
    }

    #[test]
    fn single_node_rejected() {
        let json = r#"{"nodes":[{"id":1,"core":true}],"links":[]}"#;
        assert!(matches!(load(json), Err(Error::TooFewCoreNodes(1))));
    }

    #[test]
    fn disconnected_core_rejected() {
        let json = r#"{"nodes":[{"id":1,"core":true},{"id":2,"core":true},{"id":3,"core":true}],
            "links":[{"a":1,"b":2,"length_km":80,"spans_km":[80]}]}"#;
        assert!(matches!(load(json), Err(Error::DisconnectedCore(_))));
    }

    #[test]
    fn schema_errors_are_distinct() {
        assert!(matches!(load("{\"nodes\":[]}"), Err(Error::TopologySchema(_))));
        let unknown = r#"{"nodes":[{"id":1,"core":true},{"id":2,"core":true}],
            "links":[{"a":1,"b":9,"length_km":80,"spans_km":[80]}]}"#;
        assert!(matches!(load(unknown), Err(Error::TopologySchema(_))));
    }

    #[test]
    fn random_topologies_load() {
        for seed in 0..5 {
            let file = random_topology(&RandomTopologyParams::default(), seed).unwrap();
            assert_eq!(file.links.len(), 9 + 6);
            let t = Topology::from_file(&file, &PenaltyConfig::default(), seed).unwrap();
            assert_eq!(t.nodes().len(), 10);
        }
        assert_eq!(
            random_topology(&RandomTopologyParams::default(), 3).unwrap(),
            random_topology(&RandomTopologyParams::default(), 3).unwrap()
        );
    }

    #[test]
    fn uniform_spans_rewrite() {
        let t = load(FIXTURE_6NODE).unwrap().with_uniform_spans(50.0);
        assert!(t.links().iter().all(|l| l.average_span_km() == 50.0));
        assert_eq!(t.neighbors(0).len(), t.degree(0));
    }
}
