use std::collections::BTreeMap;
use std::path::PathBuf;

use diagscope::corpus::{load_corpus, write_corpus, LoadOptions, Schema};
use diagscope::graph::{connected_components, isolates, relation_histogram, tree_check, RelationLayer};
use diagscope::model::{validate, Diagram, ValidationOptions};

fn fixture_root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/ai2d")
}

fn load(schema: Schema) -> Diagram {
    let corpus = load_corpus(&fixture_root(), &LoadOptions::with_schema(schema)).unwrap();
    assert!(corpus.skipped.is_empty(), "{:?}", corpus.skipped);
    assert_eq!(corpus.diagrams.len(), 1);
    corpus.diagrams.into_iter().next().unwrap()
}

#[test]
fn element_inventory() {
    let d = load(Schema::Ai2d);
    assert_eq!(d.id, "4210");
    let ids: Vec<&str> = d.elements.iter().map(|e| e.id.as_str()).collect();
    for want in ["T0", "T8", "B0", "A0", "A5", "H0", "H5"] {
        assert!(ids.contains(&want), "missing {want}");
    }
    assert_eq!(d.elements.len(), 9 + 1 + 6 + 6);
    assert_eq!(d.categories.semantic.as_deref(), Some("rock cycle"));
    assert_eq!(d.image_size.width, 780);
}

#[test]
fn parse_graph_edges_from_narrative() {
    let d = load(Schema::Ai2d);
    let has = |rel: &str, a: &str, b: &str, via: Option<&str>| {
        d.dpg.edges.iter().any(|e| e.relation == rel && e.src == a && e.dst == b && e.via.as_deref() == via)
    };
    assert!(has("arrowHeadTail", "A2", "H2", None));
    assert!(has("interObjectLinkage", "T1", "T2", Some("A2")));
    assert!(has("intraObjectRegionLabel", "T5", "B0", None));
}

#[test]
fn parse_graph_has_five_components_and_isolate_t6() {
    let d = load(Schema::Ai2d);
    assert_eq!(connected_components(&d.dpg).len(), 5);
    assert_eq!(isolates(&d.dpg), vec!["T6".to_string()]);
}

#[test]
fn discourse_relations() {
    let d = load(Schema::Ai2dRst);
    let hist = relation_histogram(std::slice::from_ref(&d), RelationLayer::Rst);
    let want: BTreeMap<String, usize> = [("identification", 6), ("cyclic sequence", 1), ("background", 1)]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect();
    assert_eq!(hist, want);
    let rst = d.rst.as_ref().unwrap();
    assert!(tree_check(rst).is_tree);
    assert!(tree_check(d.grouping.as_ref().unwrap()).is_tree);
    assert_eq!(d.categories.structural.as_deref(), Some("cycle"));
}

#[test]
fn validates_cleanly() {
    let d = load(Schema::Ai2dRst);
    let report = validate(&d, &ValidationOptions::default());
    assert!(!report.has_errors(), "{report:?}");
}

#[test]
fn canonical_round_trip_preserves_graphs() {
    let d = load(Schema::Ai2dRst);
    let corpus = load_corpus(&fixture_root(), &LoadOptions::with_schema(Schema::Ai2dRst)).unwrap();
    let dir = tempfile::tempdir().unwrap();
    write_corpus(&corpus, dir.path()).unwrap();
    let back = load_corpus(dir.path(), &LoadOptions::default()).unwrap();
    let e = &back.diagrams[0];
    assert_eq!(e.elements, d.elements);
    assert_eq!(e.dpg, d.dpg);
    assert_eq!(e.grouping, d.grouping);
    assert_eq!(e.connectivity, d.connectivity);
    assert_eq!(e.rst, d.rst);
    assert_eq!(e.categories, d.categories);
}
