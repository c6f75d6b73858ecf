//! Structural queries over the annotation graph layers.
//!
//! Every output is sorted lexicographically by node id or relation name so
//! exported tables diff cleanly between runs.

use std::collections::{BTreeMap, BTreeSet};

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use petgraph::unionfind::UnionFind;

use crate::model::{
    ConnectivityGraph, Diagram, DiagramParseGraph, GroupingGraph, RstGraph, MIXED,
};

/// Undirected view of a graph: declared nodes plus adjacency pairs.
pub trait UndirectedLinks {
    fn node_ids(&self) -> Vec<&str>;
    fn links(&self) -> Vec<(&str, &str)>;
}

impl UndirectedLinks for DiagramParseGraph {
    fn node_ids(&self) -> Vec<&str> {
        self.nodes.iter().map(String::as_str).collect()
    }

    /// A relation carried by a connector links both endpoints to it.
    fn links(&self) -> Vec<(&str, &str)> {
        let mut out = Vec::with_capacity(self.edges.len());
        for e in &self.edges {
            match e.via.as_deref() {
                Some(via) => {
                    out.push((e.src.as_str(), via));
                    out.push((via, e.dst.as_str()));
                }
                None => out.push((e.src.as_str(), e.dst.as_str())),
            }
        }
        out
    }
}

impl UndirectedLinks for ConnectivityGraph {
    fn node_ids(&self) -> Vec<&str> {
        self.nodes.iter().map(String::as_str).collect()
    }

    fn links(&self) -> Vec<(&str, &str)> {
        self.edges
            .iter()
            .map(|e| (e.src.as_str(), e.dst.as_str()))
            .collect()
    }
}

/// Parent → child view of a hierarchical graph.
pub trait TreeLinks {
    fn tree_nodes(&self) -> Vec<&str>;
    fn tree_edges(&self) -> Vec<(&str, &str)>;
}

impl TreeLinks for GroupingGraph {
    fn tree_nodes(&self) -> Vec<&str> {
        self.nodes.iter().map(String::as_str).collect()
    }

    fn tree_edges(&self) -> Vec<(&str, &str)> {
        self.edges
            .iter()
            .map(|e| (e.parent.as_str(), e.child.as_str()))
            .collect()
    }
}

impl TreeLinks for RstGraph {
    fn tree_nodes(&self) -> Vec<&str> {
        self.nodes.iter().map(|n| n.id.as_str()).collect()
    }

    fn tree_edges(&self) -> Vec<(&str, &str)> {
        self.edges
            .iter()
            .map(|e| (e.src.as_str(), e.dst.as_str()))
            .collect()
    }
}

fn sorted_nodes<'a>(ids: Vec<&'a str>) -> Vec<&'a str> {
    let set: BTreeSet<&str> = ids.into_iter().collect();
    set.into_iter().collect()
}

/// Partition of the declared nodes into connected components, ignoring
/// edge direction. Links touching undeclared nodes are ignored.
pub fn connected_components<G: UndirectedLinks + ?Sized>(graph: &G) -> Vec<Vec<String>> {
    let nodes = sorted_nodes(graph.node_ids());
    let index: BTreeMap<&str, usize> = nodes.iter().enumerate().map(|(i, n)| (*n, i)).collect();
    let mut uf = UnionFind::<usize>::new(nodes.len());
    for (a, b) in graph.links() {
        if let (Some(&i), Some(&j)) = (index.get(a), index.get(b)) {
            uf.union(i, j);
        }
    }
    let mut groups: BTreeMap<usize, Vec<String>> = BTreeMap::new();
    for (i, n) in nodes.iter().enumerate() {
        groups.entry(uf.find(i)).or_default().push(n.to_string());
    }
    let mut comps: Vec<Vec<String>> = groups.into_values().collect();
    // members are already sorted since nodes were visited in order
    comps.sort_by(|a, b| a[0].cmp(&b[0]));
    comps
}

/// Declared nodes with no incident link.
pub fn isolates<G: UndirectedLinks + ?Sized>(graph: &G) -> Vec<String> {
    let nodes = sorted_nodes(graph.node_ids());
    let declared: BTreeSet<&str> = nodes.iter().copied().collect();
    let mut touched: BTreeSet<&str> = BTreeSet::new();
    for (a, b) in graph.links() {
        if declared.contains(a) && declared.contains(b) {
            touched.insert(a);
            touched.insert(b);
        }
    }
    nodes
        .into_iter()
        .filter(|n| !touched.contains(n))
        .map(str::to_string)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TreeViolation {
    Empty,
    UnknownEndpoint { parent: String, child: String },
    MultipleParents { node: String, parents: Vec<String> },
    NoRoot,
    MultipleRoots(Vec<String>),
    Cycle(Vec<String>),
}

impl std::fmt::Display for TreeViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TreeViolation::Empty => write!(f, "graph has no nodes"),
            TreeViolation::UnknownEndpoint { parent, child } => {
                write!(f, "edge {parent}->{child} references an undeclared node")
            }
            TreeViolation::MultipleParents { node, parents } => {
                write!(f, "node {node} has multiple parents: {}", parents.join(", "))
            }
            TreeViolation::NoRoot => write!(f, "graph has no root"),
            TreeViolation::MultipleRoots(r) => write!(f, "graph has multiple roots: {}", r.join(", ")),
            TreeViolation::Cycle(c) => write!(f, "graph not acyclic: cycle through {}", c.join(", ")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeCheck {
    pub is_tree: bool,
    pub violations: Vec<TreeViolation>,
}

/// A graph is a tree iff it has a single root, no cycles and every node
/// has at most one parent.
pub fn tree_check<G: TreeLinks + ?Sized>(graph: &G) -> TreeCheck {
    let nodes = sorted_nodes(graph.tree_nodes());
    let mut violations = Vec::new();
    if nodes.is_empty() {
        violations.push(TreeViolation::Empty);
        return TreeCheck {
            is_tree: false,
            violations,
        };
    }

    let index: BTreeMap<&str, usize> = nodes.iter().enumerate().map(|(i, n)| (*n, i)).collect();
    let mut dag = DiGraph::<(), ()>::with_capacity(nodes.len(), 0);
    let handles: Vec<_> = nodes.iter().map(|_| dag.add_node(())).collect();
    let mut parents: BTreeMap<&str, Vec<String>> = BTreeMap::new();

    for (p, c) in graph.tree_edges() {
        match (index.get(p), index.get(c)) {
            (Some(&i), Some(&j)) => {
                dag.add_edge(handles[i], handles[j], ());
                parents.entry(c).or_default().push(p.to_string());
            }
            _ => violations.push(TreeViolation::UnknownEndpoint {
                parent: p.to_string(),
                child: c.to_string(),
            }),
        }
    }

    for (node, ps) in &parents {
        if ps.len() > 1 {
            let mut ps = ps.clone();
            ps.sort();
            violations.push(TreeViolation::MultipleParents {
                node: node.to_string(),
                parents: ps,
            });
        }
    }

    let roots: Vec<String> = nodes
        .iter()
        .filter(|n| !parents.contains_key(*n))
        .map(|n| n.to_string())
        .collect();
    match roots.len() {
        0 => violations.push(TreeViolation::NoRoot),
        1 => {}
        _ => violations.push(TreeViolation::MultipleRoots(roots)),
    }

    let mut cycles: Vec<Vec<String>> = tarjan_scc(&dag)
        .into_iter()
        .filter(|scc| scc.len() > 1 || dag.contains_edge(scc[0], scc[0]))
        .map(|scc| {
            let mut members: Vec<String> =
                scc.iter().map(|h| nodes[h.index()].to_string()).collect();
            members.sort();
            members
        })
        .collect();
    cycles.sort();
    violations.extend(cycles.into_iter().map(TreeViolation::Cycle));

    TreeCheck {
        is_tree: violations.is_empty(),
        violations,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelationLayer {
    Dpg,
    Rst,
}

impl RelationLayer {
    pub fn as_str(self) -> &'static str {
        match self {
            RelationLayer::Dpg => "dpg",
            RelationLayer::Rst => "rst",
        }
    }
}

/// Relation usage counts: one per DPG edge, or one per RST relation node.
pub fn relation_histogram(diagrams: &[Diagram], layer: RelationLayer) -> BTreeMap<String, usize> {
    let mut out = BTreeMap::new();
    for d in diagrams {
        match layer {
            RelationLayer::Dpg => {
                for e in &d.dpg.edges {
                    *out.entry(e.relation.clone()).or_insert(0) += 1;
                }
            }
            RelationLayer::Rst => {
                if let Some(rst) = &d.rst {
                    for (_, name) in rst.relations() {
                        *out.entry(name.to_string()).or_insert(0) += 1;
                    }
                }
            }
        }
    }
    out
}

/// Row/column label for diagrams lacking a category.
pub const UNLABELED: &str = "unlabeled";

/// Structural (rows) × semantic (columns) diagram counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Crosstab {
    pub rows: Vec<String>,
    pub cols: Vec<String>,
    /// `counts[r][c]`
    pub counts: Vec<Vec<usize>>,
    pub row_totals: Vec<usize>,
    pub col_totals: Vec<usize>,
    pub total: usize,
}

impl Crosstab {
    pub fn get(&self, structural: &str, semantic: &str) -> usize {
        let r = self.rows.iter().position(|x| x == structural);
        let c = self.cols.iter().position(|x| x == semantic);
        match (r, c) {
            (Some(r), Some(c)) => self.counts[r][c],
            _ => 0,
        }
    }
}

pub fn category_crosstab(diagrams: &[Diagram]) -> Crosstab {
    let mut cells: BTreeMap<(String, String), usize> = BTreeMap::new();
    for d in diagrams {
        let row = d.categories.structural.clone().unwrap_or_else(|| UNLABELED.into());
        let col = d.categories.semantic.clone().unwrap_or_else(|| UNLABELED.into());
        *cells.entry((row, col)).or_insert(0) += 1;
    }
    let rows: Vec<String> = cells
        .keys()
        .map(|(r, _)| r.clone())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let cols: Vec<String> = cells
        .keys()
        .map(|(_, c)| c.clone())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let mut counts = vec![vec![0; cols.len()]; rows.len()];
    for ((r, c), n) in &cells {
        let ri = rows.binary_search(r).expect("row collected above");
        let ci = cols.binary_search(c).expect("col collected above");
        counts[ri][ci] = *n;
    }
    let row_totals = counts.iter().map(|row| row.iter().sum()).collect();
    let col_totals = (0..cols.len())
        .map(|c| counts.iter().map(|row| row[c]).sum())
        .collect();
    Crosstab {
        rows,
        cols,
        counts,
        row_totals,
        col_totals,
        total: diagrams.len(),
    }
}

/// Whether a structural label is the multi-category sentinel.
pub fn is_mixed(label: &str) -> bool {
    label == MIXED
}

/// One `components.csv` row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentSummary {
    pub diagram_id: String,
    pub layer: &'static str,
    pub n_components: usize,
    pub n_isolates: usize,
}

pub fn component_summaries(diagrams: &[Diagram]) -> Vec<ComponentSummary> {
    let mut out = Vec::new();
    for d in diagrams {
        out.push(ComponentSummary {
            diagram_id: d.id.clone(),
            layer: "dpg",
            n_components: connected_components(&d.dpg).len(),
            n_isolates: isolates(&d.dpg).len(),
        });
        if let Some(conn) = &d.connectivity {
            out.push(ComponentSummary {
                diagram_id: d.id.clone(),
                layer: "connectivity",
                n_components: connected_components(conn).len(),
                n_isolates: isolates(conn).len(),
            });
        }
    }
    out.sort_by(|a, b| (&a.diagram_id, a.layer).cmp(&(&b.diagram_id, b.layer)));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{CategoryLabels, DpgEdge, GroupEdge};

    fn dpg(nodes: &[&str], edges: &[(&str, &str)]) -> DiagramParseGraph {
        DiagramParseGraph {
            nodes: nodes.iter().map(|s| s.to_string()).collect(),
            edges: edges
                .iter()
                .map(|(a, b)| DpgEdge {
                    src: a.to_string(),
                    dst: b.to_string(),
                    relation: "interObjectLinkage".into(),
                    via: None,
                })
                .collect(),
        }
    }

    fn grouping(nodes: &[&str], edges: &[(&str, &str)]) -> GroupingGraph {
        GroupingGraph {
            nodes: nodes.iter().map(|s| s.to_string()).collect(),
            edges: edges
                .iter()
                .map(|(p, c)| GroupEdge {
                    parent: p.to_string(),
                    child: c.to_string(),
                })
                .collect(),
        }
    }

    #[test]
    fn empty_graph_has_no_components() {
        assert!(connected_components(&DiagramParseGraph::default()).is_empty());
    }

    #[test]
    fn path_is_one_component() {
        let g = dpg(&["A", "B", "C"], &[("A", "B"), ("B", "C")]);
        assert_eq!(connected_components(&g), vec![vec!["A", "B", "C"]]);
    }

    #[test]
    fn components_ordered_by_smallest_member() {
        let g = dpg(&["T3", "B0", "T1", "A0"], &[("T3", "T1")]);
        let c = connected_components(&g);
        assert_eq!(c, vec![vec!["A0"], vec!["B0"], vec!["T1", "T3"]]);
    }

    #[test]
    fn via_connects_endpoints_through_connector() {
        let mut g = dpg(&["T1", "T2", "A2"], &[]);
        g.edges.push(DpgEdge {
            src: "T1".into(),
            dst: "T2".into(),
            relation: "interObjectLinkage".into(),
            via: Some("A2".into()),
        });
        assert_eq!(connected_components(&g).len(), 1);
        assert!(isolates(&g).is_empty());
    }

    #[test]
    fn isolates_of_triangle_and_edgeless() {
        let k3 = dpg(&["A", "B", "C"], &[("A", "B"), ("B", "C"), ("C", "A")]);
        assert!(isolates(&k3).is_empty());
        let bare = dpg(&["X", "Y"], &[]);
        assert_eq!(isolates(&bare), vec!["X", "Y"]);
    }

    #[test]
    fn tree_check_detects_two_parents() {
        let g = grouping(&["G0", "G1", "T0"], &[("G0", "G1"), ("G0", "T0"), ("G1", "T0")]);
        let tc = tree_check(&g);
        assert!(!tc.is_tree);
        assert!(tc.violations.iter().any(|v| matches!(
            v,
            TreeViolation::MultipleParents { node, .. } if node == "T0"
        )));
    }

    #[test]
    fn tree_check_detects_two_roots() {
        let g = grouping(&["G0", "G1", "T0", "T1"], &[("G0", "T0"), ("G1", "T1")]);
        let tc = tree_check(&g);
        assert!(!tc.is_tree);
        assert!(matches!(tc.violations[0], TreeViolation::MultipleRoots(_)));
    }

    #[test]
    fn tree_check_detects_two_cycle() {
        let g = grouping(&["G0", "G1", "G2"], &[("G0", "G1"), ("G1", "G2"), ("G2", "G1")]);
        let tc = tree_check(&g);
        assert!(tc
            .violations
            .contains(&TreeViolation::Cycle(vec!["G1".into(), "G2".into()])));
    }

    #[test]
    fn tree_check_accepts_tree() {
        let g = grouping(&["G0", "G1", "T0", "T1"], &[("G0", "G1"), ("G1", "T0"), ("G0", "T1")]);
        assert!(tree_check(&g).is_tree);
    }

    #[test]
    fn crosstab_counts_mixed_and_unlabeled() {
        let mut ds = Vec::new();
        for (sem, st) in [(Some("life cycles"), Some("cycle")), (Some("life cycles"), Some("cycle")), (Some("volcano"), Some(MIXED)), (None, Some("cycle"))] {
            ds.push(Diagram {
                id: format!("d{}", ds.len()),
                image_path: None,
                image_size: [10, 10].into(),
                elements: vec![],
                dpg: Default::default(),
                grouping: None,
                connectivity: None,
                rst: None,
                categories: CategoryLabels {
                    semantic: sem.map(Into::into),
                    structural: st.map(Into::into),
                },
            });
        }
        let ct = category_crosstab(&ds);
        assert_eq!(ct.total, 4);
        assert_eq!(ct.get("cycle", "life cycles"), 2);
        assert_eq!(ct.get(MIXED, "volcano"), 1);
        assert_eq!(ct.get("cycle", UNLABELED), 1);
        assert_eq!(ct.row_totals.iter().sum::<usize>(), 4);
        assert_eq!(ct.col_totals.iter().sum::<usize>(), 4);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn random_graph() -> impl Strategy<Value = (usize, Vec<(usize, usize)>)> {
            (1usize..20).prop_flat_map(|n| (Just(n), prop::collection::vec((0..n, 0..n), 0..30)))
        }

        fn build(n: usize, edges: &[(usize, usize)]) -> DiagramParseGraph {
            let names: Vec<String> = (0..n).map(|i| format!("T{i}")).collect();
            let refs: Vec<&str> = names.iter().map(String::as_str).collect();
            let pairs: Vec<(&str, &str)> = edges.iter().map(|(a, b)| (refs[*a], refs[*b])).collect();
            dpg(&refs, &pairs)
        }

        proptest! {
            #[test]
            fn components_partition_nodes((n, edges) in random_graph()) {
                let g = build(n, &edges);
                let comps = connected_components(&g);
                prop_assert_eq!(comps.iter().map(Vec::len).sum::<usize>(), n);
                let mut all: Vec<String> = comps.concat();
                all.sort();
                all.dedup();
                prop_assert_eq!(all.len(), n);
            }

            #[test]
            fn isolates_are_degree_zero((n, edges) in random_graph()) {
                let g = build(n, &edges);
                let mut degree = vec![0usize; n];
                for (a, b) in &edges {
                    degree[*a] += 1;
                    degree[*b] += 1;
                }
                let mut want: Vec<String> = (0..n).filter(|i| degree[*i] == 0).map(|i| format!("T{i}")).collect();
                want.sort();
                prop_assert_eq!(isolates(&g), want);
            }

            #[test]
            fn tree_has_one_fewer_edge((n, edges) in random_graph()) {
                let names: Vec<String> = (0..n).map(|i| format!("G{i}")).collect();
                let refs: Vec<&str> = names.iter().map(String::as_str).collect();
                let pairs: Vec<(&str, &str)> = edges.iter().map(|(a, b)| (refs[*a], refs[*b])).collect();
                let g = grouping(&refs, &pairs);
                if tree_check(&g).is_tree {
                    prop_assert_eq!(g.edges.len(), n - 1);
                }
            }

            #[test]
            fn random_parent_lists_are_trees(parents in prop::collection::vec(any::<prop::sample::Index>(), 0..20)) {
                let n = parents.len() + 1;
                let names: Vec<String> = (0..n).map(|i| format!("G{i}")).collect();
                let refs: Vec<&str> = names.iter().map(String::as_str).collect();
                let pairs: Vec<(&str, &str)> = parents.iter().enumerate().map(|(i, p)| (refs[p.index(i + 1)], refs[i + 1])).collect();
                prop_assert!(tree_check(&grouping(&refs, &pairs)).is_tree);
            }

            #[test]
            fn crosstab_ignores_order(labels in prop::collection::vec((0usize..3, 0usize..4), 1..30), seed in any::<u64>()) {
                use rand::{seq::SliceRandom, SeedableRng};
                let sem = ["volcano", "life cycles", "rock cycle", "parts of"];
                let st = ["cycle", "network", MIXED];
                let mut ds: Vec<Diagram> = labels.iter().enumerate().map(|(i, (a, b))| Diagram {
                    id: format!("d{i}"),
                    image_path: None,
                    image_size: [10, 10].into(),
                    elements: vec![],
                    dpg: Default::default(),
                    grouping: None,
                    connectivity: None,
                    rst: None,
                    categories: CategoryLabels::new(sem[*b], st[*a]),
                }).collect();
                let before = category_crosstab(&ds);
                ds.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
                prop_assert_eq!(before, category_crosstab(&ds));
            }
        }
    }
}
