//! Black-box tests of the `solwave` binary: flag plumbing, exit codes and
//! a short end-to-end run against a generated input archive.

use std::path::Path;
use std::process::{Command, Output};

use solwave::pipeline::RunConfig;
use solwave::sampledata;

fn solwave(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_solwave"))
        .args(args)
        .output()
        .expect("binary should spawn")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn config_prints_resolved_settings_and_digest() {
    let out = solwave(&["config", "--seed", "7", "--dj", "0.125", "--corrected-is-not-a-flag"]);
    assert!(!out.status.success()); // unknown flag is a usage error
    assert_eq!(out.status.code(), Some(2));

    let out = solwave(&["config", "--seed", "7", "--dj", "0.125"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    let cfg = RunConfig::from_text(&text).unwrap();
    assert_eq!(cfg.seed, 7);
    assert_eq!(cfg.dj, 0.125);
    assert!(text.contains(&format!("# digest {}", cfg.digest())));
}

#[test]
fn config_file_and_flag_overrides_compose_in_order() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("run.cfg");
    std::fs::write(&path, "seed = 5\nsurrogates = 123\n").unwrap();
    let out = solwave(&["config", "--config", path.to_str().unwrap(), "--seed", "9"]);
    assert!(out.status.success());
    let cfg = RunConfig::from_text(&stdout(&out)).unwrap();
    assert_eq!(cfg.seed, 9, "flag should override the file");
    assert_eq!(cfg.surrogates, 123, "file should override the default");
}

#[test]
fn error_categories_map_to_stable_exit_codes() {
    // bad parameter value -> 2
    let out = solwave(&["config", "--surrogates", "many"]);
    assert_eq!(out.status.code(), Some(2));

    // unknown key in a config file -> 2
    let tmp = tempfile::tempdir().unwrap();
    let bad_key = tmp.path().join("bad_key.cfg");
    std::fs::write(&bad_key, "no_such_key = 1\n").unwrap();
    let out = solwave(&["config", "--config", bad_key.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    // malformed config line -> 3
    let bad_line = tmp.path().join("bad_line.cfg");
    std::fs::write(&bad_line, "just words\n").unwrap();
    let out = solwave(&["config", "--config", bad_line.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));

    // missing input file -> 8
    let out = solwave(&["ingest", "--sunspots", "/nonexistent/sun.txt"]);
    assert_eq!(out.status.code(), Some(8));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error:"));
}

#[test]
fn ingest_and_granger_run_against_a_generated_archive() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("data");
    std::fs::create_dir_all(&data).unwrap();
    sampledata::write_archive(&sampledata::generate(3), &data).unwrap();

    let outdir = tmp.path().join("out");
    let cfg = RunConfig::for_data_dir(&data, &outdir);
    let cfg_path = tmp.path().join("run.cfg");
    std::fs::write(&cfg_path, cfg.to_text()).unwrap();
    let cfg_arg = cfg_path.to_str().unwrap();

    let out = solwave(&["ingest", "--config", cfg_arg]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let listing = stdout(&out);
    assert!(listing.contains("summary.txt"));
    assert!(outdir.join("ingest/sunspots.csv").is_file());
    let summary = std::fs::read_to_string(outdir.join("ingest/summary.txt")).unwrap();
    assert!(summary.contains("n = 1637"), "unexpected summary: {summary}");

    // keep the causality stage quick: fewer bootstrap replications
    let out = solwave(&["granger", "--config", cfg_arg, "--bootstrap", "40"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let table = std::fs::read_to_string(outdir.join("granger/tests.txt")).unwrap();
    assert!(table.contains("frequency-band causality"));
    assert!(table.contains("corrected"));

    // the run reports the overridden configuration's digest
    let mut quick = cfg.clone();
    quick.bootstrap = 40;
    assert!(table.contains(&quick.digest()));
    drop(tmp);
}

#[test]
fn outputs_land_in_the_requested_outdir(){
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("data");
    std::fs::create_dir_all(&data).unwrap();
    sampledata::write_archive(&sampledata::generate(3), &data).unwrap();
    let cfg = RunConfig::for_data_dir(&data, tmp.path().join("ignored"));
    let cfg_path = tmp.path().join("run.cfg");
    std::fs::write(&cfg_path, cfg.to_text()).unwrap();

    let other = tmp.path().join("elsewhere");
    let out = solwave(&[
        "ingest",
        "--config",
        cfg_path.to_str().unwrap(),
        "--outdir",
        other.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(other.join("ingest/summary.txt").is_file());
    assert!(!Path::new(&cfg.outdir).join("ingest/summary.txt").exists());
}
