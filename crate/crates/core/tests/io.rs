use std::collections::BTreeMap;

use polydisc::constructions::{hexagon6, kite4, regular_ngon, triwave};
use polydisc::diamgraph;
use polydisc::geometry;
use polydisc::io::*;
use polydisc::Error;

fn count(doc: &roxmltree::Document, tag: &str, class: &str) -> usize {
    doc.descendants()
        .filter(|n| n.has_tag_name(tag) && n.attribute("class") == Some(class))
        .count()
}

#[test]
fn svg_is_valid_and_complete() {
    for cfg in [kite4(), hexagon6(), regular_ngon(7).unwrap(), triwave(16, 3, None).unwrap().config] {
        let text = svg(&cfg, 1e-9).unwrap();
        let doc = roxmltree::Document::parse(&text).expect("well-formed SVG");
        let root = doc.root_element();
        assert_eq!(root.tag_name().name(), "svg");
        assert_eq!(root.attribute("width"), Some("800"));
        assert_eq!(root.attribute("viewBox"), Some("0 0 800 800"));
        let edges = diamgraph::extract(&cfg, 1e-9).unwrap().graph.edge_count();
        assert_eq!(count(&doc, "circle", "point"), cfg.len());
        assert_eq!(count(&doc, "line", "diameter"), edges);
        assert_eq!(count(&doc, "polygon", "hull"), 1);
        assert_eq!(count(&doc, "circle", "guide"), 1);
        // every marker inside the 5% margin
        for c in doc.descendants().filter(|n| n.attribute("class") == Some("point")) {
            for attr in ["cx", "cy"] {
                let v: f64 = c.attribute(attr).unwrap().parse().unwrap();
                assert!((40.0 - 1e-6..=760.0 + 1e-6).contains(&v), "{attr}={v}");
            }
        }
    }
    assert!(svg(&polydisc::PointConfig::new(vec![]).unwrap(), 1e-9).is_err());
}

#[test]
fn config_file_round_trip_on_disk() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("kite.json");
    let cfg = kite4();
    let mut meta = BTreeMap::new();
    meta.insert("family".to_string(), serde_json::json!("kite4"));
    let dbar = geometry::normalized_discriminant(&cfg, true).unwrap();
    meta.insert("delta_bar".to_string(), serde_json::json!(dbar));
    ConfigFile::from_config(&cfg, meta).write(&path).unwrap();
    let back = ConfigFile::read(&path).unwrap();
    assert_eq!(back.n, 4);
    assert_eq!(back.meta["delta_bar"].as_f64().unwrap(), dbar);
    let again = back.to_config().unwrap();
    assert_eq!(again, cfg);
    assert_eq!(geometry::normalized_discriminant(&again, true).unwrap(), dbar);
    assert!(matches!(ConfigFile::read(dir.path().join("missing.json")), Err(Error::Io(_))));
}

#[test]
fn table_csv_consistency() {
    let rows: Vec<TableRow> = [(6usize, Some(1.310854)), (8, None), (12, Some(1.290138))]
        .iter()
        .map(|&(n, s4)| TableRow::new(n, (n as f64) * (n as f64).ln() + 0.25, s4))
        .collect();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.csv");
    write_table_file(&rows, &path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "n,log_delta,delta_bar,delta_bar_section4");
    assert!(lines[2].ends_with(','), "blank section-4 column: {}", lines[2]);
    let back = read_table(text.as_bytes()).unwrap();
    assert_eq!(back, rows);
    for r in &back {
        assert!(r.consistency_error() < 1e-9);
    }
    assert!(read_table("n,log_delta,delta_bar,delta_bar_section4\nx,1,2,\n".as_bytes()).is_err());
}
