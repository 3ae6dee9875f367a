use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rdfview::fixtures;
use rdfview::rdf::parse_nquads;
use tempfile::TempDir;

fn fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/musicbrainz")
}

fn copy_tree(from: &Path, to: &Path) {
    fs::create_dir_all(to).unwrap();
    for entry in fs::read_dir(from).unwrap() {
        let entry = entry.unwrap();
        let dest = to.join(entry.file_name());
        if entry.file_type().unwrap().is_dir() {
            copy_tree(&entry.path(), &dest);
        } else {
            fs::copy(entry.path(), dest).unwrap();
        }
    }
}

fn workspace() -> TempDir {
    let dir = tempfile::tempdir().unwrap();
    copy_tree(&fixture_dir(), dir.path());
    dir
}

fn rdfview(ws: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rdfview"))
        .arg("--workspace")
        .arg(ws)
        .args(args)
        .output()
        .unwrap()
}

fn read(path: impl AsRef<Path>) -> String {
    fs::read_to_string(path).unwrap()
}

#[test]
fn apply_writes_the_published_changeset() {
    let ws = workspace();
    let update = ws.path().join("updates/example-track-credit.json");
    let out = rdfview(ws.path(), &["apply", update.to_str().unwrap()]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let folder = ws.path().join("out/changesets/1");
    assert_eq!(read(folder.join("removed.nq")), fixtures::DELTA_MINUS_NQ);
    assert_eq!(read(folder.join("added.nq")), fixtures::DELTA_PLUS_NQ);
    assert!(read(ws.path().join("data/Track.csv")).contains("Cookin' On 3 B."));
}

#[test]
fn sequential_applies_compose_with_materialize() {
    let ws = workspace();
    assert!(rdfview(ws.path(), &["materialize"]).status.success());
    let view0 = parse_nquads(&read(ws.path().join("out/view.nq"))).unwrap();

    let update = ws.path().join("updates/example-track-credit.json");
    let second = ws.path().join("updates/rename-a1.json");
    fs::write(
        &second,
        r#"{"relation": "Artist",
            "delete": [{"aid": "a1", "gid": "ga1", "name": "Kungs", "type": 1}],
            "insert": [{"aid": "a1", "gid": "ga1", "name": "Valentin Brunel", "type": 1}]}"#,
    )
    .unwrap();
    for u in [&update, &second] {
        let out = rdfview(ws.path(), &["apply", u.to_str().unwrap()]);
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
    }

    let mut view = view0;
    for seq in ["1", "2"] {
        let dir = ws.path().join("out/changesets").join(seq);
        let minus = parse_nquads(&read(dir.join("removed.nq"))).unwrap();
        let plus = parse_nquads(&read(dir.join("added.nq"))).unwrap();
        view = view.difference(&minus).union(&plus);
    }
    assert!(rdfview(ws.path(), &["materialize"]).status.success());
    assert_eq!(view.to_nquads(), read(ws.path().join("out/view.nq")));
    assert!(view.to_nquads().contains("\"Valentin Brunel\""));
}

#[test]
fn reapplying_an_update_yields_an_empty_changeset() {
    let ws = workspace();
    let update = ws.path().join("updates/example-track-credit.json");
    for _ in 0..2 {
        assert!(rdfview(ws.path(), &["apply", update.to_str().unwrap()])
            .status
            .success());
    }
    let dir = ws.path().join("out/changesets/2");
    assert_eq!(read(dir.join("removed.nq")), "");
    assert_eq!(read(dir.join("added.nq")), "");
}

#[test]
fn minimize_flag_drops_shared_quads() {
    let ws = workspace();
    let update = ws.path().join("updates/example-track-credit.json");
    let out = rdfview(
        ws.path(),
        &["apply", "--minimize", update.to_str().unwrap()],
    );
    assert!(out.status.success());
    let dir = ws.path().join("out/changesets/1");
    let minus = parse_nquads(&read(dir.join("removed.nq"))).unwrap();
    let plus = parse_nquads(&read(dir.join("added.nq"))).unwrap();
    assert!(minus.intersection(&plus).is_empty());
    assert!(minus.len() < 22);
}

#[test]
fn unknown_relation_in_update_exits_with_2() {
    let ws = workspace();
    let bad = ws.path().join("bad.json");
    fs::write(&bad, r#"{"relation": "Nope", "delete": [], "insert": []}"#).unwrap();
    let out = rdfview(ws.path(), &["apply", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
    assert!(!ws.path().join("out/changesets/1").exists());
}

#[test]
fn missing_workspace_exits_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = rdfview(dir.path(), &["materialize"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn empty_data_directory_gives_an_empty_view() {
    let ws = workspace();
    fs::remove_dir_all(ws.path().join("data")).unwrap();
    fs::create_dir(ws.path().join("data")).unwrap();
    let out = rdfview(ws.path(), &["materialize"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(read(ws.path().join("out/view.nq")), "");
}

#[test]
fn verify_reports_json_and_exit_status() {
    let ws = workspace();
    let out = rdfview(
        ws.path(),
        &["verify", "--fixtures", "--random", "20", "--seed", "3"],
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(report.is_object());
}

#[test]
fn emit_trigger_prints_and_writes() {
    let ws = workspace();
    let out = rdfview(ws.path(), &["emit-trigger", "Track"]);
    assert!(out.status.success());
    let sql = String::from_utf8(out.stdout).unwrap();
    assert!(sql.contains("AFTER INSERT OR UPDATE OR DELETE ON Track"));

    let file = ws.path().join("track.sql");
    let out = rdfview(
        ws.path(),
        &["emit-trigger", "Track", "--out", file.to_str().unwrap()],
    );
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    assert_eq!(read(file), sql);

    let out = rdfview(ws.path(), &["emit-trigger", "Nope"]);
    assert_eq!(out.status.code(), Some(2));
}
