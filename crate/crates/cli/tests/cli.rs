use std::path::Path;
use std::process::{Command, Output};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use weylh1::lattice::DelPezzoLattice;
use weylh1::perm::Perm;
use weylh1::weyl::{GroupFile, WeylGroup};

fn weylh1(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_weylh1")).args(args).output().unwrap()
}

fn weylh1_env(args: &[&str], data_dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_weylh1")).args(args).env("WEYLH1_DATA_DIR", data_dir).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write_group(dir: &Path, name: &str, file: &GroupFile) -> String {
    let p = dir.join(name);
    std::fs::write(&p, serde_json::to_string(file).unwrap()).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn degree_3_report_has_no_minimal_class() {
    let o = weylh1(&["enumerate", "--degree", "3", "--mode", "full"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("minimal=0 "), "{out}");
    assert!(out.contains("complete=true"));
    assert!(out.lines().any(|l| l.starts_with("type\tgroup\torder")));
}

#[test]
fn degree_4_report_contains_the_s3_conic_bundle() {
    let o = weylh1(&["enumerate", "--degree", "4", "--format", "md"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.lines().any(|l| l.contains("| S3 | 6 |") && l.ends_with("| true | true | 1+3 |")), "{out}");
}

fn strip_runtime(mut v: Value) -> Value {
    v["provenance"].as_object_mut().unwrap().remove("runtime_secs");
    v
}

#[test]
fn json_output_is_identical_across_worker_counts() {
    let a = weylh1(&["enumerate", "--degree", "4", "--format", "json", "--workers", "1", "--seed", "9"]);
    let b = weylh1(&["enumerate", "--degree", "4", "--format", "json", "--workers", "3", "--seed", "9"]);
    let a: Value = serde_json::from_slice(&a.stdout).unwrap();
    let b: Value = serde_json::from_slice(&b.stdout).unwrap();
    assert_eq!(strip_runtime(a), strip_runtime(b));
}

#[test]
fn result_file_embeds_provenance() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let o = weylh1(&["enumerate", "--degree", "4", "--seed", "17", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let p = &v["provenance"];
    assert_eq!(p["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(p["seed"], 17);
    assert_eq!(p["mode"], "full");
    assert!(p["runtime_secs"].is_number());
    assert_eq!(v["records"].as_array().unwrap().len(), 53);
    assert!(stdout(&o).starts_with("# weylh1 0.1.0 degree=4 mode=full seed=17 runtime="));
}

#[test]
fn h1_of_trivial_group_is_zero() {
    let dir = tempfile::tempdir().unwrap();
    let f = write_group(dir.path(), "t.json", &GroupFile { degree: 3, generators: vec![], name: None });
    let o = weylh1(&["h1", &f]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("H1 = 0\n"));
    assert!(stdout(&o).contains("admissible"));
}

#[test]
fn h1_of_an_order_7_element_in_degree_2_vanishes() {
    // elements of order 7 in W(E7) form one class, which meets the D7 of
    // the first minimal degree 2 type, so each generates an admissible C7
    let w = WeylGroup::for_degree(2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let x = loop {
        let g = w.group().chain().random_element(&mut rng);
        if g.order() % 7 == 0 {
            break g.pow(g.order() / 7);
        }
    };
    let dir = tempfile::tempdir().unwrap();
    let f = write_group(dir.path(), "c7.json", &GroupFile::from_perms(2, &[x], Some("C7".into())));
    let o = weylh1(&["h1", &f]);
    let out = stdout(&o);
    assert!(out.contains("group of order 7"));
    assert!(out.contains("H1 = 0\n"));
    assert!(out.contains("admissible: every subgroup"));
}

#[test]
fn h1_of_the_geiser_involution_is_nonzero() {
    let w = WeylGroup::for_degree(2).unwrap();
    let cfg = w.config();
    let k = w.lattice().canonical();
    let imgs: Vec<usize> = cfg.classes().iter().map(|e| cfg.index_of(&k.scale(-1).sub(e)).unwrap()).collect();
    let g = Perm::from_images(&imgs).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let f = write_group(dir.path(), "g.json", &GroupFile::from_perms(2, &[g], None));
    let o = weylh1(&["h1", &f]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("H1 = Z/2"), "{out}");
    assert!(out.contains("inadmissible: subgroup generated by"));
}

#[test]
fn h1_rejects_a_permutation_outside_the_weyl_group() {
    // swapping two exceptional classes alone does not preserve intersections
    let n = DelPezzoLattice::new(3).unwrap().exceptional_config().len();
    let mut imgs: Vec<usize> = (0..n).collect();
    imgs.swap(0, 1);
    let dir = tempfile::tempdir().unwrap();
    let f = write_group(dir.path(), "bad.json", &GroupFile { degree: 3, generators: vec![imgs], name: None });
    let o = weylh1(&["h1", &f]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("not an element"), "{}", stderr(&o));
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(weylh1(&["enumerate"]).status.code(), Some(1));
    assert_eq!(weylh1(&["enumerate", "--degree", "5"]).status.code(), Some(1));
    assert_eq!(weylh1(&["enumerate", "--degree", "4", "--budget-secs", "0"]).status.code(), Some(1));
    assert_eq!(weylh1(&["enumerate", "--degree", "4", "--format", "xml"]).status.code(), Some(1));
    assert_eq!(weylh1(&["--help"]).status.code(), Some(0));
}

#[test]
fn frontier_cap_gives_partial_exit() {
    let o = weylh1(&["enumerate", "--degree", "3", "--frontier-cap", "2"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("complete=false"));
    let o = weylh1(&["enumerate", "--degree", "3", "--frontier-cap", "2", "--allow-partial"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn corrupted_reference_is_a_schema_error() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.json");
    std::fs::write(&p, r#"{"degree": 2, "records": [{"type_id": "x", "group_name": "S3", "group_order": -1}]}"#).unwrap();
    let o = weylh1(&["verify", "--degree", "2", "--golden", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("records[0].group_order"), "{}", stderr(&o));
}

#[test]
fn verify_without_reference_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = weylh1_env(&["verify", "--degree", "4"], dir.path());
    assert_eq!(o.status.code(), Some(1));
}

/// Reference records for degree 4 taken from a full run.
fn degree_4_reference(dir: &Path) -> Value {
    let o = weylh1(&["enumerate", "--degree", "4", "--format", "json"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let mut records = Vec::new();
    let (mut conic, mut other) = (0, 0);
    for r in v["records"].as_array().unwrap().iter().filter(|r| r["minimal"] == true) {
        let id = if r["conic_bundle"] == true {
            conic += 1;
            format!("C({conic})")
        } else {
            other += 1;
            format!("I({other})")
        };
        let orbits: Vec<Value> = r["orbits"]
            .as_array()
            .unwrap()
            .iter()
            .map(|o| serde_json::json!({"name": o["name"], "multiplicity": o["multiplicity"], "stabilizer": o["stabilizer"]}))
            .collect();
        records.push(serde_json::json!({
            "type_id": id,
            "group_name": r["group_name"],
            "group_order": r["group_order"],
            "orbits": orbits,
            "minimal": true,
            "conic_bundle": r["conic_bundle"],
            "fiber_partition": r["fiber_partition"],
        }));
    }
    let g = serde_json::json!({"degree": 4, "records": records});
    std::fs::write(dir.join("d4.json"), g.to_string()).unwrap();
    g
}

#[test]
fn data_dir_override_and_diff_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let mut g = degree_4_reference(dir.path());
    // without edges the computed specializations inside a family show up
    let o = weylh1_env(&["verify", "--degree", "4", "--format", "json"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let lines = v["diff"]["lines"].as_array().unwrap();
    assert!(!lines.is_empty() && lines.iter().all(|l| l.as_str().unwrap().ends_with("not in reference")));
    let edges: Vec<Value> = v["edges"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|e| e[0].as_str().unwrap()[..1] == e[1].as_str().unwrap()[..1])
        .cloned()
        .collect();
    g["edges"] = Value::Array(edges);
    std::fs::write(dir.path().join("d4.json"), g.to_string()).unwrap();

    let o = weylh1_env(&["verify", "--degree", "4"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("# diff: empty"));
    let o = weylh1_env(&["enumerate", "--degree", "4"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("# diff: empty"));

    g["records"][0]["orbits"][0]["stabilizer"] = Value::String("C7".into());
    std::fs::write(dir.path().join("d4.json"), g.to_string()).unwrap();
    let o = weylh1_env(&["verify", "--degree", "4"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let out = stdout(&o);
    assert!(out.contains("# diff: 1 lines"), "{out}");
    assert!(out.contains("expected C7"));
}
