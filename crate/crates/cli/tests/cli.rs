use std::path::Path;
use std::process::{Command, Output};

fn glas(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_glas"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn error_json(out: &Output) -> serde_json::Value {
    let stderr = String::from_utf8_lossy(&out.stderr);
    serde_json::from_str(stderr.trim())
        .unwrap_or_else(|e| panic!("stderr is not JSON ({e}): {stderr}"))
}

#[test]
fn synth_segment_evaluate_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("spec.json"), r#"{"glands": 4, "seed": 11}"#).unwrap();
    let out = glas(
        &[
            "synth",
            "--spec",
            "spec.json",
            "--out-dir",
            "data",
            "--count",
            "2",
        ],
        d,
    );
    assert!(out.status.success(), "{out:?}");
    for seed in ["000011", "000012"] {
        let out = glas(
            &[
                "segment",
                "--image",
                &format!("data/synth_{seed}_image.png"),
                "--out",
                &format!("data/synth_{seed}_seg.png"),
            ],
            d,
        );
        assert!(out.status.success(), "{out:?}");
    }
    std::fs::write(
        d.join("manifest.json"),
        r#"{"images":[
            {"id":"s11","ground_truth":"data/synth_000011_truth.png","prediction":"data/synth_000011_seg.png"},
            {"id":"s12","ground_truth":"data/synth_000012_truth.png","prediction":"data/synth_000012_seg.png"}]}"#,
    )
    .unwrap();
    let out = glas(
        &[
            "evaluate",
            "--manifest",
            "manifest.json",
            "--out",
            "report.json",
            "--hausdorff",
            "full",
            "--ari",
            "exclude",
        ],
        d,
    );
    assert!(out.status.success(), "{out:?}");
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(d.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["pooled"]["f1"], 1.0);
    assert_eq!(report["config"]["hausdorff"], "full");
    assert_eq!(report["config"]["ari"], "exclude");
    assert_eq!(report["per_image"].as_array().unwrap().len(), 2);
}

#[test]
fn validation_errors_exit_2_with_json() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(
        d.join("scores.csv"),
        "entry,f1:A,f1:B\ndirection,higher,higher\nx,0.9,\n",
    )
    .unwrap();
    let out = glas(&["rank", "--scores", "scores.csv", "--out", "lb.json"], d);
    assert_eq!(out.status.code(), Some(2));
    let err = error_json(&out);
    assert_eq!(err["error"]["kind"], "validation");
    assert!(err["error"]["message"].as_str().unwrap().contains("f1:B"));

    let out = glas(
        &["evaluate", "--manifest", "missing.json", "--out", "r.json"],
        d,
    );
    assert_eq!(out.status.code(), Some(2));

    std::fs::write(d.join("m.json"), r#"{"images":[]}"#).unwrap();
    let out = glas(
        &[
            "evaluate",
            "--manifest",
            "m.json",
            "--out",
            "r.json",
            "--tp-threshold",
            "1.5",
        ],
        d,
    );
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_json(&out)["error"]["kind"], "validation");
}

#[test]
fn rgb_label_image_is_a_format_error() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let mut bytes = Vec::new();
    {
        let mut enc = png::Encoder::new(&mut bytes, 1, 1);
        enc.set_color(png::ColorType::Rgb);
        enc.set_depth(png::BitDepth::Eight);
        enc.write_header()
            .unwrap()
            .write_image_data(&[10, 20, 30])
            .unwrap();
    }
    std::fs::write(d.join("rgb.png"), &bytes).unwrap();
    std::fs::write(
        d.join("m.json"),
        r#"{"images":[{"id":"x","ground_truth":"rgb.png","prediction":"rgb.png"}]}"#,
    )
    .unwrap();
    let out = glas(&["evaluate", "--manifest", "m.json", "--out", "r.json"], d);
    assert_eq!(out.status.code(), Some(2));
    let err = error_json(&out);
    assert_eq!(err["error"]["kind"], "format");
    assert!(err["error"]["message"]
        .as_str()
        .unwrap()
        .contains("convert"));
}

#[test]
fn infeasible_synthesis_is_a_computation_error() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(
        d.join("spec.json"),
        r#"{"width": 80, "height": 80, "glands": 12}"#,
    )
    .unwrap();
    let out = glas(&["synth", "--spec", "spec.json", "--out-dir", "o"], d);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(error_json(&out)["error"]["kind"], "placement");
}

#[test]
fn oracle_suites_pass() {
    let dir = tempfile::tempdir().unwrap();
    for suite in ["hausdorff", "ari", "objdice"] {
        let out = glas(&["oracle", "--suite", suite, "--cases", "20"], dir.path());
        assert!(out.status.success(), "{suite}: {out:?}");
        let r: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(r["failures"], 0);
    }
}
