use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_momentfuse"))
}

fn run(args: &[&str], cwd: &Path) -> Output {
    bin()
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn synth(dir: &Path, pairs: &str) {
    let out = run(
        &[
            "synth",
            "--out-dir",
            "set",
            "--pairs",
            pairs,
            "--sigma",
            "2",
            "--seed",
            "7",
            "--width",
            "48",
            "--height",
            "40",
        ],
        dir,
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn fuse_eval_round_trip() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    synth(dir, "1");
    let out = run(
        &[
            "fuse",
            "--in-a",
            "set/pair000_a.pgm",
            "--in-b",
            "set/pair000_b.pgm",
            "--out",
            "f.pgm",
            "--dump-decision",
            "d.pgm",
        ],
        dir,
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));

    let decision = momentfuse::pgm::read_pgm_file(dir.join("d.pgm")).unwrap();
    assert!(decision.samples().iter().all(|&v| v == 0 || v == 255));
    assert_eq!(decision.dims(), (48, 40));

    let out = run(
        &[
            "eval",
            "--in-a",
            "set/pair000_a.pgm",
            "--in-b",
            "set/pair000_b.pgm",
            "--fused",
            "f.pgm",
            "--json",
        ],
        dir,
    );
    assert_eq!(code(&out), 0);
    let rec: momentfuse::MetricsRecord = serde_json::from_slice(&out.stdout).unwrap();
    assert!(rec.qabf > 0.0 && rec.qabf <= 1.0);
}

#[test]
fn batch_reports_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    synth(dir, "4");
    for report in ["one.csv", "two.csv"] {
        let out = run(
            &[
                "batch",
                "--dir",
                "set",
                "--methods",
                "moment,average,pca",
                "--report",
                report,
            ],
            dir,
        );
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    }
    let one = std::fs::read(dir.join("one.csv")).unwrap();
    assert_eq!(one, std::fs::read(dir.join("two.csv")).unwrap());
    let text = String::from_utf8(one).unwrap();
    assert_eq!(text.lines().count(), 1 + 4 * 3);
    assert!(text.starts_with("pair_id,method,mim,sd,entropy,qabf,degenerate\n"));
}

#[test]
fn json_report_and_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    synth(dir, "2");
    std::fs::write(
        dir.join("pairs.txt"),
        "first set/pair001_a.pgm set/pair001_b.pgm\n",
    )
    .unwrap();
    let out = run(
        &[
            "batch",
            "--manifest",
            "pairs.txt",
            "--methods",
            "moment",
            "--report",
            "r.json",
            "--format",
            "json",
        ],
        dir,
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report: momentfuse::harness::BatchReport =
        serde_json::from_slice(&std::fs::read(dir.join("r.json")).unwrap()).unwrap();
    assert_eq!(report.rows.len(), 1);
    assert_eq!(report.rows[0].pair_id, "first");
}

#[test]
fn config_file_defaults_and_flag_precedence() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    synth(dir, "1");
    std::fs::write(
        dir.join("run.conf"),
        "# defaults\nmethods = average\nformat = json\n",
    )
    .unwrap();
    let out = run(
        &[
            "--config", "run.conf", "batch", "--dir", "set", "--report", "a.json",
        ],
        dir,
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(dir.join("a.json")).unwrap();
    assert!(text.contains("\"average\"") && !text.contains("\"moment\""));

    let out = run(
        &[
            "--config", "run.conf", "batch", "--dir", "set", "--report", "b.csv", "--format", "csv",
        ],
        dir,
    );
    assert_eq!(code(&out), 0);
    assert!(std::fs::read_to_string(dir.join("b.csv"))
        .unwrap()
        .starts_with("pair_id,"));

    std::fs::write(dir.join("bad.conf"), "windo = 5\n").unwrap();
    let out = run(
        &[
            "--config", "bad.conf", "batch", "--dir", "set", "--report", "c.csv",
        ],
        dir,
    );
    assert_eq!(code(&out), 1);
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    synth(dir, "1");

    // Usage: missing arguments, bad values, invalid configuration.
    assert_eq!(code(&run(&["fuse"], dir)), 1);
    assert_eq!(
        code(&run(
            &["batch", "--dir", "set", "--methods", "dwt", "--report", "r"],
            dir
        )),
        1
    );
    let fuse = [
        "fuse",
        "--in-a",
        "set/pair000_a.pgm",
        "--in-b",
        "set/pair000_b.pgm",
        "--out",
        "f.pgm",
    ];
    assert_eq!(
        code(&run(&[&fuse[..], &["--window", "4"]].concat(), dir)),
        1
    );
    assert_eq!(
        code(&run(
            &[
                &fuse[..],
                &["--method", "average", "--dump-decision", "d.pgm"]
            ]
            .concat(),
            dir
        )),
        1
    );

    // Data: unreadable or mismatched inputs.
    assert_eq!(
        code(&run(
            &[
                "fuse",
                "--in-a",
                "nope.pgm",
                "--in-b",
                "set/pair000_b.pgm",
                "--out",
                "f.pgm"
            ],
            dir
        )),
        2
    );
    std::fs::write(dir.join("junk.pgm"), b"P7\n1 1\n255\n\0").unwrap();
    assert_eq!(
        code(&run(
            &[
                "fuse",
                "--in-a",
                "junk.pgm",
                "--in-b",
                "set/pair000_b.pgm",
                "--out",
                "f.pgm"
            ],
            dir
        )),
        2
    );
    let small = momentfuse::ImageU8::filled(5, 5, 9).unwrap();
    momentfuse::pgm::write_pgm_file(dir.join("small.pgm"), &small).unwrap();
    assert_eq!(
        code(&run(
            &[
                "fuse",
                "--in-a",
                "small.pgm",
                "--in-b",
                "set/pair000_b.pgm",
                "--out",
                "f.pgm"
            ],
            dir
        )),
        2
    );

    // Empty batch.
    std::fs::create_dir(dir.join("empty")).unwrap();
    assert_eq!(
        code(&run(&["batch", "--dir", "empty", "--report", "r.csv"], dir)),
        3
    );
}
