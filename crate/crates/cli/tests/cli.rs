use std::path::{Path, PathBuf};
use std::process::Command;

use hypertree::combinat::binomial;
use hypertree::extremal::verify_embedding;
use hypertree::hypercore::{parse_hypergraph, random_hypergraph, write_hypergraph};
use hypertree::treekit::{expand, write_tree};
use hypertree::{Hypergraph, Tree};
use serde_json::Value;

struct Dir(PathBuf);

impl Dir {
    fn new(tag: &str) -> Self {
        let p = std::env::temp_dir().join(format!("hypertree-cli-{tag}-{}", std::process::id()));
        let _ = std::fs::remove_dir_all(&p);
        std::fs::create_dir_all(&p).unwrap();
        Dir(p)
    }

    fn write(&self, name: &str, text: &str) {
        std::fs::write(self.0.join(name), text).unwrap();
    }

    fn read(&self, name: &str) -> String {
        std::fs::read_to_string(self.0.join(name)).unwrap()
    }

    fn run(&self, args: &[&str]) -> (i32, String) {
        run_in(&self.0, args)
    }
}

impl Drop for Dir {
    fn drop(&mut self) {
        let _ = std::fs::remove_dir_all(&self.0);
    }
}

fn run_in(dir: &Path, args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_hypertree")).current_dir(dir).args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

fn json(text: &str) -> Value {
    serde_json::from_str(text).unwrap()
}

/// Data lines of a CSV artifact: everything after the provenance comment and header.
fn csv_rows(text: &str) -> Vec<Vec<String>> {
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()).collect()
}

fn construct_parity(d: &Dir) {
    assert_eq!(d.run(&["construct", "--kind", "parity", "--k", "3", "--tree-n", "6", "--out", "par"]).0, 0);
}

#[test]
fn construct_examples() {
    let d = Dir::new("construct");
    construct_parity(&d);
    let h = parse_hypergraph(&d.read("par/host.txt")).unwrap();
    assert_eq!((h.n(), h.num_edges()), (11, 80));
    assert_eq!(d.read("par/partition.txt").lines().nth(1), Some("AAAAAABBBBB"));
    let profile = json(&d.read("par/profile.json"));
    assert_eq!(profile["result"]["descriptor"]["kind"], "parity");
    assert_eq!(profile["result"]["profiles"][0]["min_degree"], 20);
    assert_eq!(profile["provenance"]["command"]["construct"]["tree_n"], 6);

    assert_eq!(d.run(&["construct", "--kind", "modq", "--k", "3", "--tree-n", "5", "--q", "3", "--out", "mq"]).0, 0);
    assert_eq!(parse_hypergraph(&d.read("mq/host.txt")).unwrap().n(), 9);
    assert_eq!(json(&d.read("mq/profile.json"))["result"]["descriptor"]["q"], 3);

    assert_eq!(d.run(&["construct", "--kind", "parity", "--tree-n", "5", "--out", "odd"]).0, 2);
    assert_eq!(d.run(&["construct", "--kind", "modq", "--tree-n", "5", "--out", "noq"]).0, 2);
    assert_eq!(d.run(&["construct", "--kind", "parity", "--tree-n", "6", "--out", "w", "--workers", "0"]).0, 2);
}

#[test]
fn verify_nonembed_examples() {
    let d = Dir::new("verify");
    construct_parity(&d);
    let (code, out) = d.run(&["verify-nonembed", "--host", "par/host.txt", "--partition", "par/partition.txt"]);
    assert_eq!(code, 0);
    let rows = csv_rows(&out);
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r[3] == "blocked" && r[4] == "true" && r[5] == "none" && r[7] == "true"));

    let (code, out) = d.run(&[
        "verify-nonembed",
        "--host",
        "par/host.txt",
        "--partition",
        "par/partition.txt",
        "--class",
        "has-even",
    ]);
    assert_eq!(code, 0);
    let rows = csv_rows(&out);
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r[3] == "inconclusive" && r[4].is_empty()));

    let (code, out) =
        d.run(&["verify-nonembed", "--host", "par/host.txt", "--partition", "par/partition.txt", "--format", "json"]);
    assert_eq!(code, 0);
    assert_eq!(json(&out)["result"].as_array().unwrap().len(), 2);

    let host = d.read("par/host.txt");
    d.write("trunc.txt", &host[..host.len() / 2]);
    assert_eq!(d.run(&["verify-nonembed", "--host", "trunc.txt", "--partition", "par/partition.txt"]).0, 2);
    d.write("cut.txt", &host[..host.find("\n3 11").unwrap()]);
    assert_eq!(d.run(&["verify-nonembed", "--host", "cut.txt", "--partition", "par/partition.txt"]).0, 2);
    assert_eq!(d.run(&["verify-nonembed", "--host", "missing.txt", "--partition", "par/partition.txt"]).0, 2);
}

#[test]
fn scan_threshold_examples() {
    let d = Dir::new("scan");
    let (code, out) =
        d.run(&["scan-threshold", "--k", "3", "--host-n", "11", "--densities", "0.3:0.7:0.1", "--trials", "20"]);
    assert_eq!(code, 0);
    let rows = csv_rows(&out);
    assert_eq!(rows.len(), 100);
    let densities: std::collections::BTreeSet<&str> = rows.iter().map(|r| r[0].as_str()).collect();
    assert_eq!(densities.len(), 5);
    // every tree is classified and decided
    assert!(rows.iter().all(|r| r[6] == "2" && r[10] == "4" && r[9] == "0" && r[13] == "0"));

    let (code, out) = d.run(&["scan-threshold", "--host-n", "11", "--trials", "0"]);
    assert_eq!(code, 0);
    assert!(csv_rows(&out).is_empty());
    assert!(out.lines().nth(1).unwrap().starts_with("density,trial,seed,edges,delta_1,delta_2"));

    assert_eq!(d.run(&["scan-threshold", "--host-n", "30"]).0, 2);
    assert_eq!(d.run(&["scan-threshold", "--host-n", "11", "--densities", "0.5:0.1:0.1"]).0, 2);
    let (code, out) = d.run(&["scan-threshold", "--host-n", "7", "--densities", "1", "--trials", "1"]);
    assert_eq!(code, 0);
    let r = &csv_rows(&out)[0];
    assert_eq!((r[3].as_str(), r[4].as_str(), r[5].as_str()), ("35", "1", "1"));
}

#[test]
fn gadget_census_examples() {
    let d = Dir::new("census");
    construct_parity(&d);
    let (code, out) = d.run(&["gadget-census", "--host", "par/host.txt", "--partition", "par/partition.txt"]);
    assert_eq!(code, 0);
    let c = &json(&out)["result"];
    assert_eq!(c["cross_diamonds"], 0);
    assert_eq!(c["pi"]["matches_side"], 11);
    assert_eq!((c["pi"]["zeros"].as_u64(), c["pi"]["ones"].as_u64()), (Some(6), Some(5)));

    d.write("k8.txt", &write_hypergraph(&Hypergraph::complete(8, 3).unwrap()));
    let (_, out) = d.run(&["gadget-census", "--host", "k8.txt", "--gamma", "0.05"]);
    // a diamond is a shared pair plus two of the remaining six vertices
    assert_eq!(json(&out)["result"]["total_diamonds"], binomial(8, 2) * binomial(6, 2));

    d.write("empty.txt", "3 8\n");
    let (code, out) = d.run(&["gadget-census", "--host", "empty.txt"]);
    assert_eq!(code, 0);
    let c = &json(&out)["result"];
    assert_eq!((c["edges"].as_u64(), c["total_diamonds"].as_u64()), (Some(0), Some(0)));
    assert_eq!(c["diamond_graph"]["edges"], 0);
    assert_eq!((c["proto_balancers_ab"].as_u64(), c["proto_balancers_ba"].as_u64()), (Some(0), Some(0)));
}

#[test]
fn embed_examples() {
    let d = Dir::new("embed");
    construct_parity(&d);
    d.write("star5.txt", &write_tree(&Tree::star(5).unwrap()));
    d.write("path10.txt", &write_tree(&Tree::path(10).unwrap()));
    d.write("path6.txt", &write_tree(&Tree::path(6).unwrap()));
    d.write("k19.txt", &write_hypergraph(&Hypergraph::complete(19, 3).unwrap()));
    let dense = random_hypergraph(22, 3, 0.9, 3).unwrap();
    d.write("dense.txt", &write_hypergraph(&dense));

    let (code, out) = d.run(&["embed", "--host", "par/host.txt", "--tree", "star5.txt", "--mode", "oracle"]);
    assert_eq!(code, 4);
    assert_eq!(json(&out)["result"]["status"], "none");

    for mode in ["pipeline1", "pipeline2"] {
        let (code, out) = d.run(&["embed", "--host", "k19.txt", "--tree", "path10.txt", "--mode", mode]);
        assert_eq!(code, 0, "{mode}");
        let r = &json(&out)["result"];
        assert_eq!(r["verified"], true);
        assert_eq!(r["embedding"].as_array().unwrap().len(), 19);
    }
    assert_eq!(d.run(&["embed", "--host", "k19.txt", "--tree", "star5.txt", "--mode", "pipeline2"]).0, 2);
    assert_eq!(d.run(&["embed", "--host", "k19.txt", "--tree", "path6.txt", "--mode", "pipeline1"]).0, 2);

    let (code, out) =
        d.run(&["embed", "--host", "dense.txt", "--tree", "path6.txt", "--mode", "almost", "--seed", "9"]);
    assert_eq!(code, 0);
    let r = &json(&out)["result"];
    let subset: Vec<usize> = serde_json::from_value(r["subset"].clone()).unwrap();
    let pairs: Vec<[usize; 2]> = serde_json::from_value(r["embedding"].clone()).unwrap();
    let map: Vec<usize> = pairs.iter().map(|p| p[1]).collect();
    assert_eq!(subset.len(), 11);
    assert!(map.iter().all(|v| subset.contains(v)));
    assert!(verify_embedding(&dense, &expand(&Tree::path(6).unwrap(), 3).unwrap(), &map));
    assert_eq!(d.run(&["embed", "--host", "k19.txt", "--tree", "path10.txt", "--mode", "almost"]).0, 2);
}
