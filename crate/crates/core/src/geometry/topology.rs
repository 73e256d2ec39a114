use std::collections::{BTreeMap, VecDeque};

use super::curve::{CurveEnd, CurveEnds, CurveId};
use super::network::{Network, VertexKind};
use crate::error::{Error, Result};

/// Tree test on an abstract multigraph with vertices `0..vertex_count`.
pub fn graph_is_tree(vertex_count: usize, edges: &[(usize, usize)]) -> Result<bool> {
    if vertex_count == 0 {
        return Ok(false);
    }
    let mut adj = vec![Vec::new(); vertex_count];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut seen = vec![false; vertex_count];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(v) = stack.pop() {
        for &w in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    if seen.iter().any(|s| !s) {
        return Err(Error::NotConnected);
    }
    Ok(edges.len() + 1 == vertex_count)
}

/// True when the network contains no loop.
pub fn is_tree(n: &Network) -> Result<bool> {
    if n.curves().any(|c| c.is_closed()) {
        return Ok(false);
    }
    let index: BTreeMap<_, _> = n.vertices().enumerate().map(|(i, v)| (v.id, i)).collect();
    let edges: Vec<(usize, usize)> = n
        .curves()
        .filter_map(|c| match c.ends() {
            CurveEnds::Open { start, end } => Some((index[&start], index[&end])),
            CurveEnds::Closed => None,
        })
        .collect();
    graph_is_tree(index.len(), &edges)
}

/// Largest, over curves, of the fewest curves on a path from that curve to a
/// fixed endpoint (the curve itself included).
pub fn path_depth(n: &Network) -> Result<usize> {
    let depths = curve_depths(n)?;
    Ok(depths.values().copied().max().unwrap_or(0))
}

pub(crate) fn curve_depths(n: &Network) -> Result<BTreeMap<CurveId, usize>> {
    let fixed = n.vertices_of_kind(VertexKind::FixedEndpoint);
    if fixed.is_empty() {
        return Err(Error::NoEndpoint);
    }
    let mut depth: BTreeMap<CurveId, usize> = BTreeMap::new();
    let mut queue = VecDeque::new();
    for f in &fixed {
        for inc in n.incident(*f) {
            if let std::collections::btree_map::Entry::Vacant(e) = depth.entry(inc.curve) {
                e.insert(1);
                queue.push_back(inc.curve);
            }
        }
    }
    while let Some(cid) = queue.pop_front() {
        let d = depth[&cid];
        let c = n.curve(cid)?;
        for end in [CurveEnd::Start, CurveEnd::End] {
            let Some(v) = c.vertex_at(end) else { continue };
            if n.vertex(v)?.kind == VertexKind::FixedEndpoint {
                continue;
            }
            for inc in n.incident(v) {
                if let std::collections::btree_map::Entry::Vacant(e) = depth.entry(inc.curve) {
                    e.insert(d + 1);
                    queue.push_back(inc.curve);
                }
            }
        }
    }
    Ok(depth)
}
