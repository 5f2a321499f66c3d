//! Dependency DAG over uncertainty sources.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};

use crate::error::{Error, Result};

/// Problems found while assembling a [`DependencyGraph`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GraphIssue {
    SelfLoop(String),
    DuplicateEdge(String, String),
    UnknownNode(String),
    Cycle(Vec<String>),
}

impl std::fmt::Display for GraphIssue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GraphIssue::SelfLoop(n) => write!(f, "self-loop on `{n}`"),
            GraphIssue::DuplicateEdge(a, b) => write!(f, "duplicate edge {a}->{b}"),
            GraphIssue::UnknownNode(n) => write!(f, "edge endpoint `{n}` is not a declared source"),
            GraphIssue::Cycle(c) => write!(f, "cycle {}", c.join("->")),
        }
    }
}

/// Acyclic graph of `parent -> child` dependencies between sources.
///
/// The deterministic topological order is computed once at construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DependencyGraph {
    nodes: BTreeSet<String>,
    edges: BTreeSet<(String, String)>,
    order: Vec<String>,
}

impl DependencyGraph {
    pub fn new<N, E>(nodes: N, edges: E) -> std::result::Result<Self, Vec<GraphIssue>>
    where
        N: IntoIterator<Item = String>,
        E: IntoIterator<Item = (String, String)>,
    {
        let nodes: BTreeSet<String> = nodes.into_iter().collect();
        let mut issues = Vec::new();
        let mut edge_set = BTreeSet::new();
        for (parent, child) in edges {
            for end in [&parent, &child] {
                if !nodes.contains(end) {
                    issues.push(GraphIssue::UnknownNode(end.clone()));
                }
            }
            if parent == child {
                issues.push(GraphIssue::SelfLoop(parent));
                continue;
            }
            if edge_set.contains(&(parent.clone(), child.clone())) {
                issues.push(GraphIssue::DuplicateEdge(parent, child));
                continue;
            }
            edge_set.insert((parent, child));
        }
        if !issues.is_empty() {
            return Err(issues);
        }
        if let Err(cycle) = validate_dag(&nodes, &edge_set) {
            return Err(vec![GraphIssue::Cycle(cycle)]);
        }
        let order = topological_order(&nodes, &edge_set).map_err(|e| match e {
            Error::CyclicGraph(c) => vec![GraphIssue::Cycle(c)],
            _ => unreachable!("topological_order only fails on cycles"),
        })?;
        Ok(Self {
            nodes,
            edges: edge_set,
            order,
        })
    }

    pub fn nodes(&self) -> &BTreeSet<String> {
        &self.nodes
    }

    pub fn edges(&self) -> &BTreeSet<(String, String)> {
        &self.edges
    }

    /// Kahn order with lexicographic tie-breaking.
    pub fn order(&self) -> &[String] {
        &self.order
    }

    pub fn parents<'a>(&'a self, node: &'a str) -> impl Iterator<Item = &'a str> + 'a {
        self.edges
            .iter()
            .filter(move |(_, c)| c == node)
            .map(|(p, _)| p.as_str())
    }
}

fn adjacency<'a>(
    nodes: &'a BTreeSet<String>,
    edges: &'a BTreeSet<(String, String)>,
) -> BTreeMap<&'a str, Vec<&'a str>> {
    let mut adj: BTreeMap<&str, Vec<&str>> =
        nodes.iter().map(|n| (n.as_str(), Vec::new())).collect();
    for (p, c) in edges {
        adj.entry(p.as_str()).or_default().push(c.as_str());
        adj.entry(c.as_str()).or_default();
    }
    adj
}

/// Checks acyclicity. On failure returns one cycle as a closed node sequence
/// (`[A, B, A]`), rotated to start at its lexicographically smallest node.
pub fn validate_dag(
    nodes: &BTreeSet<String>,
    edges: &BTreeSet<(String, String)>,
) -> std::result::Result<(), Vec<String>> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        New,
        Active,
        Done,
    }

    let adj = adjacency(nodes, edges);
    let mut marks: BTreeMap<&str, Mark> = adj.keys().map(|&n| (n, Mark::New)).collect();

    for &root in adj.keys() {
        if marks[root] != Mark::New {
            continue;
        }
        // Iterative DFS; `path` mirrors the active stack.
        let mut stack: Vec<(&str, usize)> = vec![(root, 0)];
        let mut path: Vec<&str> = vec![root];
        marks.insert(root, Mark::Active);
        while let Some((node, next)) = stack.last_mut() {
            let children = &adj[*node];
            if *next < children.len() {
                let child = children[*next];
                *next += 1;
                match marks[child] {
                    Mark::New => {
                        marks.insert(child, Mark::Active);
                        stack.push((child, 0));
                        path.push(child);
                    }
                    Mark::Active => {
                        let start = path.iter().position(|&n| n == child).unwrap();
                        return Err(canonical_cycle(&path[start..]));
                    }
                    Mark::Done => {}
                }
            } else {
                marks.insert(node, Mark::Done);
                stack.pop();
                path.pop();
            }
        }
    }
    Ok(())
}

fn canonical_cycle(cycle: &[&str]) -> Vec<String> {
    let min = cycle
        .iter()
        .enumerate()
        .min_by_key(|(_, n)| **n)
        .map(|(i, _)| i)
        .unwrap_or(0);
    let mut out: Vec<String> = cycle[min..]
        .iter()
        .chain(&cycle[..min])
        .map(|s| s.to_string())
        .collect();
    if let Some(first) = out.first().cloned() {
        out.push(first);
    }
    out
}

/// Kahn's algorithm; among simultaneously ready nodes the lexicographically
/// smallest goes first.
pub fn topological_order(
    nodes: &BTreeSet<String>,
    edges: &BTreeSet<(String, String)>,
) -> Result<Vec<String>> {
    let adj = adjacency(nodes, edges);
    let mut indegree: BTreeMap<&str, usize> = adj.keys().map(|&n| (n, 0)).collect();
    for children in adj.values() {
        for c in children {
            *indegree.get_mut(c).unwrap() += 1;
        }
    }
    let mut ready: BinaryHeap<Reverse<&str>> = indegree
        .iter()
        .filter(|(_, &d)| d == 0)
        .map(|(&n, _)| Reverse(n))
        .collect();
    let mut order = Vec::with_capacity(adj.len());
    while let Some(Reverse(node)) = ready.pop() {
        order.push(node.to_string());
        for c in &adj[node] {
            let d = indegree.get_mut(c).unwrap();
            *d -= 1;
            if *d == 0 {
                ready.push(Reverse(c));
            }
        }
    }
    if order.len() != adj.len() {
        let cycle = validate_dag(nodes, edges).err().unwrap_or_default();
        return Err(Error::CyclicGraph(cycle));
    }
    Ok(order)
}

/// Parses `Parent->Child`.
pub fn parse_edge(s: &str) -> Option<(String, String)> {
    let (p, c) = s.split_once("->")?;
    let (p, c) = (p.trim(), c.trim());
    if p.is_empty() || c.is_empty() || c.contains("->") {
        return None;
    }
    Some((p.to_string(), c.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(nodes: &[&str]) -> BTreeSet<String> {
        nodes.iter().map(|s| s.to_string()).collect()
    }

    fn edges(e: &[(&str, &str)]) -> BTreeSet<(String, String)> {
        e.iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect()
    }

    #[test]
    fn two_cycle_is_reported_closed() {
        let r = validate_dag(&set(&["A", "B"]), &edges(&[("A", "B"), ("B", "A")]));
        assert_eq!(r, Err(vec!["A".into(), "B".into(), "A".into()]));
    }

    #[test]
    fn empty_graph_is_acyclic() {
        assert_eq!(validate_dag(&BTreeSet::new(), &BTreeSet::new()), Ok(()));
        assert_eq!(
            topological_order(&BTreeSet::new(), &BTreeSet::new()),
            Ok(vec![])
        );
    }

    #[test]
    fn cycle_rotated_to_smallest_node() {
        let r = validate_dag(
            &set(&["Fog", "WetRoad", "Rain"]),
            &edges(&[("Fog", "WetRoad"), ("WetRoad", "Rain"), ("Rain", "WetRoad")]),
        );
        assert_eq!(r, Err(vec!["Rain".into(), "WetRoad".into(), "Rain".into()]));
    }

    #[test]
    fn kahn_lexicographic_tie_break() {
        let order = topological_order(
            &set(&["Rain", "Fog", "WetRoad"]),
            &edges(&[("Rain", "WetRoad"), ("Fog", "WetRoad")]),
        )
        .unwrap();
        assert_eq!(order, ["Fog", "Rain", "WetRoad"]);

        let order = topological_order(&set(&["B", "A", "C"]), &BTreeSet::new()).unwrap();
        assert_eq!(order, ["A", "B", "C"]);

        let order =
            topological_order(&set(&["C", "B", "A"]), &edges(&[("A", "B"), ("B", "C")])).unwrap();
        assert_eq!(order, ["A", "B", "C"]);
    }

    #[test]
    fn ready_set_is_reconsidered_after_each_pop() {
        // Z unlocks B, which must then precede Y.
        let order = topological_order(
            &set(&["A", "B", "Y", "Z"]),
            &edges(&[("A", "Z"), ("Z", "B")]),
        )
        .unwrap();
        assert_eq!(order, ["A", "Y", "Z", "B"]);
    }

    #[test]
    fn topological_order_rejects_cycles() {
        assert!(matches!(
            topological_order(&set(&["A", "B"]), &edges(&[("A", "B"), ("B", "A")])),
            Err(Error::CyclicGraph(_))
        ));
    }

    #[test]
    fn graph_construction_checks() {
        let nodes = || ["A".to_string(), "B".to_string()];
        let e = |a: &str, b: &str| (a.to_string(), b.to_string());
        assert_eq!(
            DependencyGraph::new(nodes(), [e("A", "A")]).unwrap_err(),
            vec![GraphIssue::SelfLoop("A".into())]
        );
        assert_eq!(
            DependencyGraph::new(nodes(), [e("A", "B"), e("A", "B")]).unwrap_err(),
            vec![GraphIssue::DuplicateEdge("A".into(), "B".into())]
        );
        assert_eq!(
            DependencyGraph::new(nodes(), [e("A", "C")]).unwrap_err(),
            vec![GraphIssue::UnknownNode("C".into())]
        );
        assert!(matches!(
            DependencyGraph::new(nodes(), [e("A", "B"), e("B", "A")]).unwrap_err()[..],
            [GraphIssue::Cycle(_)]
        ));
        let g = DependencyGraph::new(nodes(), [e("B", "A")]).unwrap();
        assert_eq!(g.order(), ["B", "A"]);
        assert_eq!(g.parents("A").collect::<Vec<_>>(), ["B"]);
    }

    #[test]
    fn edge_syntax() {
        assert_eq!(
            parse_edge("Rain -> WetRoad"),
            Some(("Rain".into(), "WetRoad".into()))
        );
        assert_eq!(parse_edge("Rain"), None);
        assert_eq!(parse_edge("->B"), None);
        assert_eq!(parse_edge("A->B->C"), None);
    }
}
