use proptest::prelude::*;

use glas_core::io::{
    load_label_image, load_scores, parse_scores, report_to_csv, report_to_json, write_label_png,
    write_report, write_text_grid, DatasetInfo, OutputFormat, ReportDocument,
};
use glas_core::metrics::{evaluate, ImagePair};
use glas_core::ranking::rank_sum;
use glas_core::{EvalConfig, GlasError, LabelMap};

fn fixture(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn png_round_trip(
        (w, h, labels) in (1usize..20, 1usize..20).prop_flat_map(|(w, h)| {
            (Just(w), Just(h), proptest::collection::vec(prop_oneof![Just(0u32), 1u32..=65535], w * h))
        })
    ) {
        let map = LabelMap::from_raw(w, h, labels).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.png");
        write_label_png(&map, &path).unwrap();
        prop_assert_eq!(load_label_image(&path).unwrap(), map.clone());
        let text = dir.path().join("m.txt");
        write_text_grid(&map, &text).unwrap();
        prop_assert_eq!(load_label_image(&text).unwrap(), map);
    }
}

#[test]
fn png_rejects_labels_beyond_sixteen_bits() {
    let map = LabelMap::from_raw(2, 1, vec![0, 70_000]).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let err = write_label_png(&map, dir.path().join("x.png")).unwrap_err();
    assert!(matches!(err, GlasError::Value(_)));
}

#[test]
fn score_fixture_shape() {
    let t = load_scores(fixture("table2.csv")).unwrap();
    assert_eq!(t.entries().len(), 10);
    assert_eq!(t.columns().len(), 6);
}

#[test]
fn leaderboard_follows_fixture_row_order() {
    let t = load_scores(fixture("table2.csv")).unwrap();
    let board = rank_sum(&t).unwrap();
    assert_eq!(
        board.ordered_names(),
        t.entries().iter().map(String::as_str).collect::<Vec<_>>()
    );
    assert_eq!(
        board
            .final_order
            .iter()
            .map(|&i| board.rank_sums[i])
            .collect::<Vec<_>>(),
        vec![17, 21, 22, 24, 26, 29, 30, 52, 53, 56]
    );
    assert!(board.tied.iter().all(|&t| !t));
}

#[test]
fn three_decimal_scores_tie_in_part_b_dice() {
    // As printed, ExB1 and Freiburg2 share 0.786 in the part B Dice column.
    let printed = std::fs::read_to_string(fixture("table2.csv"))
        .unwrap()
        .replace("0.7863", "0.786")
        .replace("0.7857", "0.786");
    let t = parse_scores(&printed).unwrap();
    let board = rank_sum(&t).unwrap();
    let idx = |name: &str| t.entries().iter().position(|e| e == name).unwrap();
    let col = t
        .columns()
        .iter()
        .position(|c| c.name() == "dice_obj:B")
        .unwrap();
    assert_eq!(board.per_column_ranks[idx("ExB1")][col], 2);
    assert_eq!(board.per_column_ranks[idx("Freiburg2")][col], 2);
    assert_eq!(board.rank_sums[idx("Freiburg2")], 23);
    assert_eq!(board.rank_sums[idx("ExB1")], 21);
}

fn identity_report() -> ReportDocument {
    let m = LabelMap::from_grid(&[vec![1, 1, 0], vec![0, 2, 2], vec![3, 0, 0]]).unwrap();
    let pairs = vec![
        ImagePair {
            id: "a".into(),
            gt: m.clone(),
            seg: m.clone(),
        },
        ImagePair {
            id: "b".into(),
            gt: m.clone(),
            seg: m,
        },
    ];
    let report = evaluate(&pairs, &EvalConfig::default(), 1).unwrap();
    ReportDocument::new(report, DatasetInfo::default(), "2000-01-01T00:00:00Z")
}

#[test]
fn identity_report_pooled_row() {
    let doc = identity_report();
    let p = &doc.pooled.scores;
    assert_eq!(
        (p.f1, p.dice_obj, p.hausdorff_obj, p.ari),
        (1.0, 1.0, 0.0, Some(1.0))
    );
    let csv = report_to_csv(&doc).unwrap();
    let pooled = csv.lines().last().unwrap();
    assert!(
        pooled.starts_with("pooled,,6,6,6,0,0,1,1,1,1,1,0,1,1.000,1.000,0.000,1.000,1.000"),
        "{pooled}"
    );
    let json: serde_json::Value = serde_json::from_str(&report_to_json(&doc).unwrap()).unwrap();
    assert_eq!(json["pooled"]["display"]["hausdorff_obj"], "0.000");
    assert_eq!(json["config"]["hausdorff"], "boundary");
}

#[test]
fn reports_differ_only_in_timestamp() {
    let dir = tempfile::tempdir().unwrap();
    for format in [OutputFormat::Json, OutputFormat::Csv] {
        let a = identity_report();
        let mut b = identity_report();
        b.generated_at = "2030-06-30T12:00:00Z".into();
        let (pa, pb) = (dir.path().join("a"), dir.path().join("b"));
        write_report(&a, format, &pa).unwrap();
        write_report(&b, format, &pb).unwrap();
        let strip = |p: &std::path::Path| {
            std::fs::read_to_string(p)
                .unwrap()
                .lines()
                .filter(|l| !l.contains("generated_at"))
                .collect::<Vec<_>>()
                .join("\n")
        };
        assert_eq!(strip(&pa), strip(&pb));
        assert_ne!(std::fs::read(&pa).unwrap(), std::fs::read(&pb).unwrap());
    }
}

#[test]
fn unwritable_path_is_io_error() {
    let err = write_report(
        &identity_report(),
        OutputFormat::Json,
        "/nonexistent-dir/r.json",
    )
    .unwrap_err();
    assert!(matches!(err, GlasError::Io { .. }));
}
