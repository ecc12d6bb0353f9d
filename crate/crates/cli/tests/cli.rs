use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures")
}

fn fx(name: &str) -> PathBuf {
    fixtures().join(name)
}

fn vblend(args: &[&dyn AsRef<std::ffi::OsStr>]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vblend"))
        .args(args.iter().map(|a| a.as_ref()))
        .env_remove("BLEND_SEED")
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn map_pig_cactus(dir: &Path) -> PathBuf {
    let out = dir.join("analogies.json");
    let o = vblend(&[&"map", &fx("pig.triples"), &fx("cactus.triples"), &"-o", &out]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    out
}

fn files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap())
        })
        .collect();
    v.sort();
    v
}

#[test]
fn map_writes_analogies() {
    let tmp = tempfile::tempdir().unwrap();
    let out = map_pig_cactus(tmp.path());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(v["left"], "pig");
    assert_eq!(v["right"], "cactus");
    assert_eq!(v["analogies"].as_array().unwrap().len(), 1);
    assert_eq!(v["analogies"][0]["root"], serde_json::json!(["animal", "plant"]));
}

#[test]
fn map_exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let missing = vblend(&[&"map", &tmp.path().join("nope.triples"), &fx("cactus.triples")]);
    assert_eq!(code(&missing), 2);
    assert!(stderr(&missing).contains("nope.triples"));

    let bad = tmp.path().join("bad.triples");
    std::fs::write(&bad, "only two\n").unwrap();
    assert_eq!(code(&vblend(&[&"map", &bad, &fx("cactus.triples")])), 2);

    let (a, b) = (tmp.path().join("a.triples"), tmp.path().join("b.triples"));
    std::fs::write(&a, "x r y\n").unwrap();
    std::fs::write(&b, "u s v\n").unwrap();
    assert_eq!(code(&vblend(&[&"map", &a, &b])), 3);
}

#[test]
fn blend_is_seeded_and_reads_the_environment() {
    let tmp = tempfile::tempdir().unwrap();
    let analogies = map_pig_cactus(tmp.path());
    let (a, b, c) = (tmp.path().join("a"), tmp.path().join("b"), tmp.path().join("c"));
    for out in [&a, &b] {
        let o = vblend(&[&"blend", &analogies, &fixtures(), out, &"--seed", &"9"]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
    }
    let o = Command::new(env!("CARGO_BIN_EXE_vblend"))
        .args(["blend".as_ref(), analogies.as_os_str(), fixtures().as_os_str(), c.as_os_str()])
        .env("BLEND_SEED", "9")
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    let fa = files(&a);
    assert!(fa.iter().any(|(n, _)| n.ends_with(".svg")));
    assert!(fa.iter().any(|(n, _)| n.ends_with(".json")));
    assert_eq!(fa, files(&b));
    assert_eq!(fa, files(&c));
    for (n, bytes) in &fa {
        if n.ends_with(".json") {
            let v: serde_json::Value = serde_json::from_slice(bytes).unwrap();
            assert!(v["provenance"]["replacements"].as_array().is_some_and(|r| !r.is_empty()));
            assert!(v["fitness"].as_f64().is_some());
        }
    }
}

#[test]
fn blend_input_errors() {
    let tmp = tempfile::tempdir().unwrap();
    let empty = tmp.path().join("empty.json");
    std::fs::write(&empty, r#"{"left":"pig","right":"cactus","analogies":[]}"#).unwrap();
    let o = vblend(&[&"blend", &empty, &fixtures(), &tmp.path().join("out")]);
    assert_eq!(code(&o), 0);
    assert!(stderr(&o).contains("warning"));

    let broken = tmp.path().join("broken.json");
    std::fs::write(&broken, r#"{"left":"pig"}"#).unwrap();
    assert_eq!(code(&vblend(&[&"blend", &broken, &fixtures(), &tmp.path().join("out")])), 2);

    let analogies = map_pig_cactus(tmp.path());
    let o = vblend(&[&"blend", &analogies, &tmp.path(), &tmp.path().join("out")]);
    assert_eq!(code(&o), 2, "scenes are missing from this directory");
    let o = vblend(&[&"blend", &analogies, &fixtures(), &tmp.path().join("out"), &"--raster", &"12"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn evolve_writes_a_gallery() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("run");
    let o = vblend(&[
        &"evolve",
        &fx("pig.triples"),
        &fx("cactus.triples"),
        &"--scenes",
        &fixtures(),
        &"--out",
        &out,
        &"--generations",
        &"5",
        &"--pop-size",
        &"10",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let mut rdr = csv::Reader::from_path(out.join("elite.csv")).unwrap();
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 6);
    let best: Vec<f64> = rows.iter().map(|r| r[2].parse().unwrap()).collect();
    assert!(best.windows(2).all(|w| w[1] >= w[0]));
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    let pops = manifest["populations"].as_array().unwrap();
    assert_eq!(pops.len(), 1);
    for f in pops[0]["files"].as_array().unwrap() {
        assert!(out.join(f.as_str().unwrap()).exists());
    }
}

#[test]
fn evolve_with_zero_generations_and_bad_params() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("run");
    let base: [&dyn AsRef<std::ffi::OsStr>; 6] =
        [&"evolve", &fx("pig.triples"), &fx("angel.triples"), &"--scenes", &fixtures(), &"--out"];
    let mut args = base.to_vec();
    args.extend([&out as &dyn AsRef<std::ffi::OsStr>, &"--generations", &"0", &"--pop-size", &"6"]);
    let o = vblend(&args);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = std::fs::read_to_string(out.join("elite.csv")).unwrap();
    assert!(text.lines().skip(1).all(|l| l.starts_with("0,")));

    let mut args = base.to_vec();
    args.extend([&out as &dyn AsRef<std::ffi::OsStr>, &"--mutation", &"2"]);
    assert_eq!(code(&vblend(&args)), 2);
    assert_eq!(code(&vblend(&[&"evolve", &fx("pig.triples")])), 2);
}

#[test]
fn score_reports_fitness() {
    let o = vblend(&[&"score", &fx("pig.json")]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains("fitness 1.000000"));
    assert_eq!(code(&vblend(&[&"score", &fx("missing.json")])), 2);
}
