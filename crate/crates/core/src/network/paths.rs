use std::cmp::Ordering;
use std::collections::{BTreeSet, BinaryHeap};

use serde::Serialize;

use super::Topology;

/// Loop-free route through the topology.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CandidatePath {
    /// Node indices from source to destination.
    pub nodes: Vec<usize>,
    /// Link indices, `links[k]` joins `nodes[k]` and `nodes[k + 1]`.
    pub links: Vec<usize>,
    pub length_km: f64,
    /// ROADMs traversed, add/drop nodes included.
    pub roadm_hops: usize,
}

impl CandidatePath {
    fn from_nodes(topo: &Topology, nodes: Vec<usize>) -> Self {
        let links: Vec<usize> =
            nodes.windows(2).map(|w| link_between(topo, w[0], w[1]).expect("consecutive nodes are adjacent")).collect();
        let length_km = links.iter().map(|&l| topo.link(l).length_km).sum();
        CandidatePath { roadm_hops: nodes.len(), nodes, links, length_km }
    }

    pub fn node_ids(&self, topo: &Topology) -> Vec<u32> {
        self.nodes.iter().map(|&n| topo.node(n).id).collect()
    }

    pub fn span_count(&self, topo: &Topology) -> usize {
        self.links.iter().map(|&l| topo.link(l).spans.len()).sum()
    }
}

fn link_between(topo: &Topology, u: usize, v: usize) -> Option<usize> {
    topo.neighbors(u).iter().find(|&&(n, _)| n == v).map(|&(_, l)| l)
}

/// Orders by length, then by the node-id sequence.
#[derive(Debug, Clone, PartialEq)]
struct Ranked {
    length: f64,
    ids: Vec<u32>,
    nodes: Vec<usize>,
}

impl Eq for Ranked {}

impl Ord for Ranked {
    fn cmp(&self, other: &Self) -> Ordering {
        self.length.total_cmp(&other.length).then_with(|| self.ids.cmp(&other.ids))
    }
}

impl PartialOrd for Ranked {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn ranked(topo: &Topology, nodes: Vec<usize>, length: f64) -> Ranked {
    Ranked { length, ids: nodes.iter().map(|&n| topo.node(n).id).collect(), nodes }
}

/// Shortest path avoiding `blocked_nodes` and `blocked_links`; among equal
/// lengths the lexicographically smallest node-id sequence wins.
fn shortest(
    topo: &Topology,
    s: usize,
    d: usize,
    blocked_nodes: &[bool],
    blocked_links: &BTreeSet<usize>,
) -> Option<Ranked> {
    let n = topo.nodes().len();
    let mut settled = vec![false; n];
    let mut heap = BinaryHeap::new();
    heap.push(std::cmp::Reverse(ranked(topo, vec![s], 0.0)));
    while let Some(std::cmp::Reverse(cur)) = heap.pop() {
        let u = *cur.nodes.last().expect("paths are nonempty");
        if settled[u] {
            continue;
        }
        settled[u] = true;
        if u == d {
            return Some(cur);
        }
        for &(v, l) in topo.neighbors(u) {
            if settled[v] || blocked_nodes[v] || blocked_links.contains(&l) {
                continue;
            }
            let mut nodes = cur.nodes.clone();
            nodes.push(v);
            heap.push(std::cmp::Reverse(ranked(topo, nodes, cur.length + topo.link(l).length_km)));
        }
    }
    None
}

/// Up to `k` loop-free paths from `s` to `d` in ascending length (Yen's
/// deviation algorithm). Ties are broken by node-id sequence.
pub fn k_shortest_paths(topo: &Topology, s: usize, d: usize, k: usize) -> Vec<CandidatePath> {
    let n = topo.nodes().len();
    if s == d || s >= n || d >= n || k == 0 {
        return Vec::new();
    }
    let no_nodes = vec![false; n];
    let Some(first) = shortest(topo, s, d, &no_nodes, &BTreeSet::new()) else {
        return Vec::new();
    };
    let mut accepted: Vec<Ranked> = vec![first];
    let mut candidates: BTreeSet<Ranked> = BTreeSet::new();

    while accepted.len() < k {
        let last = accepted.last().expect("nonempty").nodes.clone();
        for i in 0..last.len() - 1 {
            let root = &last[..=i];
            let root_len: f64 =
                root.windows(2).map(|w| topo.link(link_between(topo, w[0], w[1]).expect("adjacent")).length_km).sum();
            let mut blocked_links = BTreeSet::new();
            for p in &accepted {
                if p.nodes.len() > i + 1 && &p.nodes[..=i] == root {
                    blocked_links.insert(link_between(topo, p.nodes[i], p.nodes[i + 1]).expect("adjacent"));
                }
            }
            let mut blocked_nodes = vec![false; n];
            for &r in &root[..i] {
                blocked_nodes[r] = true;
            }
            if let Some(spur) = shortest(topo, root[i], d, &blocked_nodes, &blocked_links) {
                let mut nodes = root[..i].to_vec();
                nodes.extend_from_slice(&spur.nodes);
                let cand = ranked(topo, nodes, root_len + spur.length);
                if !accepted.iter().any(|p| p.nodes == cand.nodes) {
                    candidates.insert(cand);
                }
            }
        }
        match candidates.pop_first() {
            Some(next) => accepted.push(next),
            None => break,
        }
    }
    accepted.into_iter().map(|r| CandidatePath::from_nodes(topo, r.nodes)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::FIXTURE_6NODE;
    use crate::qot::PenaltyConfig;

    fn triangle() -> Topology {
        let json = r#"{"nodes":[{"id":1,"core":true},{"id":2,"core":true},{"id":3,"core":true}],
            "links":[{"a":1,"b":2,"length_km":1,"spans_km":[1]},
                     {"a":2,"b":3,"length_km":1,"spans_km":[1]},
                     {"a":1,"b":3,"length_km":3,"spans_km":[3]}]}"#;
        Topology::from_json_str(json, &PenaltyConfig::none(), 0).unwrap()
    }

    /// Every simple path by depth-first enumeration, sorted like the solver.
    pub(crate) fn brute_force(topo: &Topology, s: usize, d: usize) -> Vec<(f64, Vec<u32>)> {
        fn walk(topo: &Topology, d: usize, path: &mut Vec<usize>, len: f64, out: &mut Vec<(f64, Vec<u32>)>) {
            let u = *path.last().unwrap();
            if u == d {
                out.push((len, path.iter().map(|&n| topo.node(n).id).collect()));
                return;
            }
            for &(v, l) in topo.neighbors(u) {
                if !path.contains(&v) {
                    path.push(v);
                    walk(topo, d, path, len + topo.link(l).length_km, out);
                    path.pop();
                }
            }
        }
        let mut out = Vec::new();
        walk(topo, d, &mut vec![s], 0.0, &mut out);
        out.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
        out
    }

    #[test]
    fn triangle_two_paths() {
        let t = triangle();
        let p = k_shortest_paths(&t, 0, 2, 2);
        assert_eq!(p.len(), 2);
        assert_eq!(p[0].node_ids(&t), vec![1, 2, 3]);
        assert_eq!(p[0].length_km, 2.0);
        assert_eq!(p[1].node_ids(&t), vec![1, 3]);
        assert_eq!(p[1].length_km, 3.0);
        assert_eq!(p[0].roadm_hops, 3);
        assert_eq!(k_shortest_paths(&t, 0, 2, 10).len(), 2);
    }

    #[test]
    fn fixture_matches_enumeration() {
        let t = Topology::from_json_str(FIXTURE_6NODE, &PenaltyConfig::none(), 0).unwrap();
        for s in 0..6 {
            for d in 0..6 {
                if s == d {
                    continue;
                }
                let all = brute_force(&t, s, d);
                for k in [1, 3, 6] {
                    let got: Vec<(f64, Vec<u32>)> =
                        k_shortest_paths(&t, s, d, k).iter().map(|p| (p.length_km, p.node_ids(&t))).collect();
                    assert_eq!(got, all[..k.min(all.len())].to_vec(), "{s}->{d} k={k}");
                }
            }
        }
    }

    #[test]
    fn ties_resolved_by_node_ids() {
        // square 1-2-4 and 1-3-4 with equal lengths
        let json = r#"{"nodes":[{"id":1,"core":true},{"id":3,"core":true},{"id":2,"core":true},{"id":4,"core":true}],
            "links":[{"a":1,"b":3,"length_km":5,"spans_km":[5]},
                     {"a":3,"b":4,"length_km":5,"spans_km":[5]},
                     {"a":1,"b":2,"length_km":5,"spans_km":[5]},
                     {"a":2,"b":4,"length_km":5,"spans_km":[5]}]}"#;
        let t = Topology::from_json_str(json, &PenaltyConfig::none(), 0).unwrap();
        let p = k_shortest_paths(&t, 0, 3, 2);
        assert_eq!(p[0].node_ids(&t), vec![1, 2, 4]);
        assert_eq!(p[1].node_ids(&t), vec![1, 3, 4]);
    }

    #[test]
    fn same_endpoints_give_nothing() {
        let t = triangle();
        assert!(k_shortest_paths(&t, 1, 1, 3).is_empty());
    }
}
