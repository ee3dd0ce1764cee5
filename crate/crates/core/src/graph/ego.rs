use std::collections::HashMap;

use rand::Rng;

use super::{AdjacencyGraph, AdjacencySource, GraphOracle, NodeId};
use crate::{Error, Result};

/// Induced subgraph around a center node, indexed locally `0..len()`.
///
/// Local index 0 is always the center. Nodes are ordered by hop distance,
/// then by discovery order within a hop layer.
#[derive(Clone, Debug)]
pub struct EgoNet {
    center: NodeId,
    nodes: Vec<NodeId>,
    hops: Vec<usize>,
    local: HashMap<NodeId, usize>,
    adjacency: AdjacencyGraph,
}

impl EgoNet {
    pub fn center(&self) -> NodeId {
        self.center
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Global ids, indexed by local index.
    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn hops(&self) -> &[usize] {
        &self.hops
    }

    pub fn global(&self, local: usize) -> NodeId {
        self.nodes[local]
    }

    pub fn local(&self, global: NodeId) -> Option<usize> {
        self.local.get(&global).copied()
    }

    pub fn contains(&self, global: NodeId) -> bool {
        self.local.contains_key(&global)
    }

    /// Adjacency over local indices.
    pub fn adjacency(&self) -> &AdjacencyGraph {
        &self.adjacency
    }

    /// Ego-net covering a whole (known) graph, centered on `center`. Used
    /// where a surrogate over the full graph is wanted.
    pub fn whole_graph(g: &AdjacencyGraph, center: NodeId) -> Result<Self> {
        let mut oracle = GraphOracle::new(g);
        // q = n never overflows a layer, so the rng is never consulted
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(0);
        let ego = ego_subgraph(&mut oracle, center, g.node_count(), &mut rng)?;
        if ego.len() != g.node_count() {
            return Err(Error::Graph("graph is not connected".into()));
        }
        Ok(ego)
    }
}

/// Grows hop layers around `center` until `q` nodes are collected.
///
/// Complete layers are added while they fit; the first layer that would
/// overflow contributes a uniform random subset that brings the total to
/// exactly `q`. If the center's component has fewer than `q` nodes the whole
/// component is returned. Topology is read only through `oracle`, and only
/// for nodes that end up in the result.
pub fn ego_subgraph<S, R>(oracle: &mut GraphOracle<S>, center: NodeId, q: usize, rng: &mut R) -> Result<EgoNet>
where
    S: AdjacencySource,
    R: Rng + ?Sized,
{
    if q == 0 {
        return Err(Error::Input("ego-net size must be at least 1".into()));
    }
    if center.index() >= oracle.node_count() {
        return Err(Error::Input(format!("center {center} outside node universe")));
    }
    let mut nodes = vec![center];
    let mut hops = vec![0];
    let mut local: HashMap<NodeId, usize> = HashMap::from([(center, 0)]);
    // adjacency of nodes whose neighbours were fetched while layering
    let mut fetched: HashMap<NodeId, std::sync::Arc<[NodeId]>> = HashMap::new();
    let mut frontier = vec![center];
    let mut hop = 1;

    while nodes.len() < q {
        let mut layer = Vec::new();
        let mut seen_in_layer = std::collections::HashSet::new();
        for &u in &frontier {
            let nb = oracle.neighbors(u)?;
            for &w in nb.iter() {
                if !local.contains_key(&w) && seen_in_layer.insert(w) {
                    layer.push(w);
                }
            }
            fetched.insert(u, nb);
        }
        if layer.is_empty() {
            break;
        }
        if nodes.len() + layer.len() <= q {
            for &w in &layer {
                local.insert(w, nodes.len());
                nodes.push(w);
                hops.push(hop);
            }
            frontier = layer;
            hop += 1;
        } else {
            let need = q - nodes.len();
            let mut picks = rand::seq::index::sample(rng, layer.len(), need).into_vec();
            picks.sort_unstable();
            for i in picks {
                let w = layer[i];
                local.insert(w, nodes.len());
                nodes.push(w);
                hops.push(hop);
            }
            break;
        }
    }

    let mut lists = Vec::with_capacity(nodes.len());
    for &u in &nodes {
        let nb = match fetched.get(&u) {
            Some(nb) => std::sync::Arc::clone(nb),
            None => oracle.neighbors(u)?,
        };
        lists.push(nb.iter().filter_map(|w| local.get(w).map(|&i| NodeId::from(i))).collect::<Vec<_>>());
    }
    Ok(EgoNet { center, nodes, hops, local, adjacency: AdjacencyGraph::from_raw_lists(lists) })
}
