use std::path::Path;
use std::process::{Command, Output};

use maxtda::cli::RunManifest;
use maxtda::inference::parse_band;
use maxtda::PersistenceDiagram;

fn maxtda(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_maxtda")).current_dir(dir).args(args).env_remove("MAXTDA_SEED").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn manifest(path: &Path) -> RunManifest {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn gen_two_circles_writes_rows_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = maxtda(dir.path(), &["gen", "two-circles", "--seed", "7", "--out", "pts.csv"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = std::fs::read_to_string(dir.path().join("pts.csv")).unwrap();
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 1000);
    let m = manifest(&dir.path().join("pts.csv.manifest.json"));
    assert_eq!(m.command, "gen");
    assert_eq!(m.seed, 7);
    assert_eq!(m.outputs, vec![Path::new("pts.csv").to_path_buf()]);
}

#[test]
fn manifest_replays_bit_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert!(maxtda(d, &["gen", "two-circles", "--seed", "3", "--scale", "0.2", "--out", "pts.csv"]).status.success());
    let first = maxtda(d, &["sample", "--input", "pts.csv", "--lambda", "0.3", "--sigma", "0.1", "--seed", "5", "--out", "s.csv"]);
    assert!(first.status.success(), "{}", stderr(&first));
    let before = std::fs::read(d.join("s.csv")).unwrap();
    let m = manifest(&d.join("s.csv.manifest.json"));
    std::fs::remove_file(d.join("s.csv")).unwrap();
    let argv: Vec<&str> = m.argv.iter().map(String::as_str).collect();
    assert!(maxtda(d, &argv).status.success());
    assert_eq!(std::fs::read(d.join("s.csv")).unwrap(), before);
}

#[test]
fn seed_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let env = Command::new(env!("CARGO_BIN_EXE_maxtda"))
        .current_dir(d)
        .args(["gen", "ellipses3d", "--scale", "0.3", "--out", "env.csv"])
        .env("MAXTDA_SEED", "11")
        .output()
        .unwrap();
    assert!(env.status.success());
    assert!(maxtda(d, &["gen", "ellipses3d", "--scale", "0.3", "--seed", "11", "--out", "flag.csv"]).status.success());
    assert!(maxtda(d, &["gen", "ellipses3d", "--scale", "0.3", "--seed", "12", "--out", "other.csv"]).status.success());
    let read = |n: &str| std::fs::read(d.join(n)).unwrap();
    assert_eq!(read("env.csv"), read("flag.csv"));
    assert_ne!(read("env.csv"), read("other.csv"));
}

#[test]
fn bottleneck_of_identical_files_prints_zero() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert!(maxtda(d, &["gen", "two-circles", "--seed", "1", "--scale", "0.1", "--out", "pts.csv"]).status.success());
    let out = maxtda(d, &["diagram", "--input", "pts.csv", "--pipeline", "vr", "--out", "a.json"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let out = maxtda(d, &["bottleneck", "a.json", "a.json", "--dim", "1"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "0.0\n");

    let mp: f64 = stdout(&maxtda(d, &["mp", "a.json"])).trim().parse().unwrap();
    let score: f64 = stdout(&maxtda(d, &["score", "a.json"])).trim().parse().unwrap();
    let normalized: f64 = stdout(&maxtda(d, &["score", "a.json", "--normalized"])).trim().parse().unwrap();
    assert_eq!(mp, score);
    assert_eq!(normalized, score / 3f64.sqrt());
}

#[test]
fn infer_on_ellipses_gives_positive_band() {
    // the reference settings (λ = 12.22, σ = 0.02) with fewer replicates and
    // a coarser grid to keep the test short
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert!(maxtda(d, &["gen", "ellipses3d", "--seed", "1", "--out", "pts.csv"]).status.success());
    let out = maxtda(
        d,
        &[
            "infer", "--input", "pts.csv", "--pipeline", "kde", "--lambda", "12.22", "--sigma", "0.02", "--N", "20", "--alpha",
            "0.05", "--seed", "1", "--grid-res", "16", "--out", "band.json",
        ],
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let band = parse_band(&std::fs::read_to_string(d.join("band.json")).unwrap()).unwrap();
    assert!(band.t_alpha > 0.0);
    assert_eq!(band.n, 20);
    assert!(stdout(&out).starts_with("t_alpha "));
}

#[test]
fn diagram_pipelines_and_plot() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert!(maxtda(d, &["gen", "two-circles", "--seed", "2", "--scale", "0.2", "--out", "pts.csv"]).status.success());
    for (pipe, extra) in [("vr", vec!["--delta-max", "0.5"]), ("dtm", vec!["--grid-res", "24"]), ("kde", vec!["--grid-res", "24", "--bandwidth", "0.1"])] {
        let mut args = vec!["diagram", "--input", "pts.csv", "--pipeline", pipe, "--out"];
        let name = format!("{pipe}.json");
        args.push(&name);
        args.extend(extra.iter().copied());
        let out = maxtda(d, &args);
        assert!(out.status.success(), "{pipe}: {}", stderr(&out));
        PersistenceDiagram::read(d.join(&name)).unwrap();
    }
    let out = maxtda(d, &["plot", "kde.json", "--out", "kde.svg"]);
    assert!(out.status.success());
    let svg = std::fs::read_to_string(d.join("kde.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("diagonal"));
}

#[test]
fn select_params_reports_choice() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert!(maxtda(d, &["gen", "two-circles", "--seed", "4", "--scale", "0.2", "--out", "pts.csv"]).status.success());
    let out = maxtda(
        d,
        &[
            "select-params", "--input", "pts.csv", "--pipeline", "kde", "--bandwidth", "0.1", "--grid-res", "24", "--lambdas",
            "0.2,0.5", "--ks", "2,5", "--out", "sel.json",
        ],
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let sel: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(d.join("sel.json")).unwrap()).unwrap();
    assert_eq!(sel["table"].as_array().unwrap().len(), 4);
    assert!(stdout(&out).starts_with("lambda "));
}

#[test]
fn tde_auto_and_fixed() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let out = maxtda(
        d,
        &["gen", "rv", "--signal", "planet", "--cadence", "0.25", "--samples", "400", "--seed", "1", "--out", "planet.csv"],
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let out = maxtda(d, &["tde", "--input", "planet.csv", "--tau", "4", "--dim", "16", "--pca", "2", "--out", "emb.csv"]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(stdout(&out), "tau 4\ndim 16\n");
    let emb = maxtda::PointCloud::read_csv(d.join("emb.csv")).unwrap();
    assert_eq!((emb.len(), emb.dim()), (400 - 60, 2));

    let out = maxtda(d, &["tde", "--input", "planet.csv", "--tau", "auto", "--dim", "auto", "--out", "auto.csv"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let m = manifest(&d.join("auto.csv.manifest.json"));
    assert!(m.results["ami"].is_array() && m.results["cao_e1"].is_array());
}

#[test]
fn config_file_fills_flags_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("cfg.json"), r#"{"seed": 9, "scale": 0.1, "out": "cfg.csv"}"#).unwrap();
    assert!(maxtda(d, &["gen", "two-circles", "--config", "cfg.json"]).status.success());
    assert!(maxtda(d, &["gen", "two-circles", "--config", "cfg.json", "--out", "flag.csv", "--seed", "10"]).status.success());
    assert!(maxtda(d, &["gen", "two-circles", "--seed", "9", "--scale", "0.1", "--out", "plain.csv"]).status.success());
    assert!(maxtda(d, &["gen", "two-circles", "--seed", "10", "--scale", "0.1", "--out", "plain10.csv"]).status.success());
    let read = |n: &str| std::fs::read(d.join(n)).unwrap();
    assert_eq!(read("cfg.csv"), read("plain.csv"));
    assert_eq!(read("flag.csv"), read("plain10.csv"));
}

#[test]
fn usage_errors_exit_one_with_one_line() {
    let dir = tempfile::tempdir().unwrap();
    for args in [vec!["frobnicate"], vec!["mp"], vec!["mp", "x.json", "--bogus"], vec!["tde", "--input", "s.csv", "--tau", "zero", "--out", "o"]] {
        let out = maxtda(dir.path(), &args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        let err = stderr(&out);
        assert_eq!(err.lines().count(), 1, "{err}");
        assert!(err.starts_with("error"));
    }
    let out = maxtda(dir.path(), &["infer", "--input", "p.csv", "--lambda", "1", "--N", "5"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn runtime_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("bad.csv"), "1.0,2.0\n3.0,abc\n").unwrap();
    std::fs::write(d.join("bad.json"), "{\"not\": \"a diagram\"}").unwrap();
    std::fs::write(d.join("uneven.csv"), "time,value\n0,1\n1,2\n3,1\n4,0\n").unwrap();
    for args in [
        vec!["diagram", "--input", "bad.csv", "--pipeline", "vr"],
        vec!["mp", "bad.json"],
        vec!["mp", "missing.json"],
        vec!["tde", "--input", "uneven.csv", "--tau", "1", "--dim", "2", "--out", "o.csv"],
    ] {
        let out = maxtda(d, &args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert_eq!(stderr(&out).lines().count(), 1);
    }
    // threshold above the density envelope
    assert!(maxtda(d, &["gen", "two-circles", "--scale", "0.1", "--out", "pts.csv"]).status.success());
    let out = maxtda(d, &["sample", "--input", "pts.csv", "--lambda", "1000", "--sigma", "0.1", "--out", "s.csv"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("threshold"));
}

#[test]
fn help_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = maxtda(dir.path(), &["--help"]);
    assert_eq!(out.status.code(), Some(0));
    for sub in ["gen", "sample", "diagram", "bottleneck", "mp", "select-params", "infer", "tde", "score", "plot", "reproduce"] {
        assert!(stdout(&out).contains(sub), "{sub}");
    }
}
