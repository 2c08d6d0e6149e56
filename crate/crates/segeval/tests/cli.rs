use std::path::{Path, PathBuf};
use std::process::Command;

use segeval::{read_nifti, write_nifti};
use segeval_core::phantom::{gen_box, gen_ellipsoid};
use segeval_core::{Mask, VoxelData};
use serde_json::Value;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn segeval(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_segeval")).args(args).output().unwrap();
    Run {
        code: out.status.code().unwrap(),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn save(m: &Mask, dir: &Path, name: &str) -> PathBuf {
    let p = dir.join(name);
    write_nifti(&m.to_volume(), &p).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn record(report: &Value, case: &str, method: &str, metric: &str) -> f64 {
    report["records"]
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["case_id"] == case && r["method"] == method && r["metric"] == metric)
        .unwrap_or_else(|| panic!("no record {case}/{method}/{metric}"))["value"]
        .as_f64()
        .unwrap()
}

fn sphere(dims: usize, r: f64) -> Mask {
    let c = (dims / 2) as f64;
    gen_ellipsoid([dims; 3], [1.0; 3], [c; 3], [r; 3]).unwrap()
}

#[test]
fn pair_identical_masks() {
    let dir = tempfile::tempdir().unwrap();
    let m = save(&sphere(20, 5.0), dir.path(), "m.nii");
    let r = segeval(&["pair", "--ref", s(&m), "--test", s(&m), "--label", "1", "--no-timestamp"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let report: Value = serde_json::from_str(&r.stdout).unwrap();
    for key in ["schema_version", "metadata", "records", "comparisons", "warnings"] {
        assert!(report.get(key).is_some(), "{key}");
    }
    assert_eq!(record(&report, "pair", "test", "dice"), 1.0);
    assert_eq!(record(&report, "pair", "test", "hausdorff"), 0.0);
    assert!(report["metadata"].get("generated_at").is_none());
}

#[test]
fn pair_grid_mismatch_names_both_shapes() {
    let dir = tempfile::tempdir().unwrap();
    let a = save(&sphere(64, 5.0), dir.path(), "a.nii");
    let b = save(&sphere(32, 5.0), dir.path(), "b.nii");
    let r = segeval(&["pair", "--ref", s(&a), "--test", s(&b), "--threshold", "0.5"]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("64x64x64") && r.stderr.contains("32x32x32"), "{}", r.stderr);
}

#[test]
fn pair_needs_a_selector_and_existing_files() {
    let dir = tempfile::tempdir().unwrap();
    let m = save(&sphere(10, 3.0), dir.path(), "m.nii");
    assert_eq!(segeval(&["pair", "--ref", s(&m), "--test", s(&m)]).code, 2);
    assert_eq!(segeval(&["pair", "--ref", s(&m), "--test", s(&m), "--label", "1", "--threshold", "1"]).code, 2);
    let missing = dir.path().join("missing.nii");
    assert_eq!(segeval(&["pair", "--ref", s(&m), "--test", s(&missing), "--label", "1"]).code, 3);
}

#[test]
fn pair_csv_shifted_box() {
    let dir = tempfile::tempdir().unwrap();
    let a = save(&gen_box([10; 3], [1.0; 3], [2, 2, 2], [4, 4, 4]).unwrap(), dir.path(), "a.nii");
    let b = save(&gen_box([10; 3], [1.0; 3], [3, 2, 2], [5, 4, 4]).unwrap(), dir.path(), "b.nii");
    let out = dir.path().join("pair.csv");
    let r = segeval(&["pair", "--ref", s(&a), "--test", s(&b), "--label", "1", "--format", "csv", "--out", s(&out)]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("case_id,method,metric,value\n"));
    assert!(text.contains("pair,test,dice,0.666667\n"), "{text}");
}

fn write_manifest(dir: &Path, rows: &[(String, String, PathBuf)]) -> PathBuf {
    let mut text = String::from("case_id,role,path\n");
    for (case, role, path) in rows {
        text.push_str(&format!("{case},{role},{}\n", path.display()));
    }
    let p = dir.join("manifest.csv");
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn cohort_records_and_warnings() {
    let dir = tempfile::tempdir().unwrap();
    let mut rows = Vec::new();
    for c in 0..3 {
        let r = sphere(16, 4.0 + c as f64 * 0.5);
        let case = format!("c{c}");
        rows.push((case.clone(), "reference".into(), save(&r, dir.path(), &format!("{case}_ref.nii"))));
        let a = segeval_core::phantom::translate(&r, [1, 0, 0]);
        let b = segeval_core::phantom::dilate_ball(&r, 1.0).unwrap();
        rows.push((case.clone(), "method:A".into(), save(&a, dir.path(), &format!("{case}_a.nii"))));
        rows.push((case.clone(), "method:B".into(), save(&b, dir.path(), &format!("{case}_b.nii.gz"))));
    }
    // a case without reference is skipped with a warning
    rows.push(("c9".into(), "method:A".into(), rows[1].2.clone()));
    let manifest = write_manifest(dir.path(), &rows);
    let out = dir.path().join("out");
    let r = segeval(&["cohort", "--manifest", s(&manifest), "--out", s(&out), "--format", "csv", "--no-timestamp"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let report: Value = serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["records"].as_array().unwrap().len(), 60);
    let warnings = report["warnings"].as_array().unwrap();
    assert!(warnings.iter().any(|w| w.as_str().unwrap().contains("c9")));
    let csv = std::fs::read_to_string(out.join("records.csv")).unwrap();
    assert_eq!(csv.lines().count(), 61);
}

#[test]
fn cohort_rejects_empty_manifest_and_missing_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = write_manifest(dir.path(), &[]);
    let out = dir.path().join("out");
    assert_eq!(segeval(&["cohort", "--manifest", s(&manifest), "--out", s(&out)]).code, 2);
    let missing = dir.path().join("nope.csv");
    assert_eq!(segeval(&["cohort", "--manifest", s(&missing), "--out", s(&out)]).code, 3);
}

fn write_records(dir: &Path, rows: &[(&str, &str, &str, f64)]) -> PathBuf {
    let mut text = String::from("case_id,method,metric,value\n");
    for (c, m, k, v) in rows {
        text.push_str(&format!("{c},{m},{k},{v}\n"));
    }
    let p = dir.join("records.csv");
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn compare_reports_percent_and_sentence() {
    let dir = tempfile::tempdir().unwrap();
    let records = write_records(
        dir.path(),
        &[
            ("c1", "A", "dice", 0.8),
            ("c2", "A", "dice", 0.8),
            ("c3", "A", "dice", 0.8),
            ("c1", "B", "dice", 0.7),
            ("c2", "B", "dice", 0.7),
            ("c3", "B", "dice", 0.7),
        ],
    );
    let out = dir.path().join("cmp.json");
    let r = segeval(&["compare", "--records", s(&records), "--method-a", "A", "--method-b", "B", "--out", s(&out)]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let row = &report["comparisons"][0];
    assert_eq!(row["percent_label"], "+14.2857%");
    assert_eq!(row["direction"], "higher");
    assert_eq!(row["wilcoxon"]["p_two_sided"], 0.25);
    assert_eq!(row["paired_t"]["flag"], "degenerate_variance");
    assert!(r.stdout.contains("dice for A is 14.2857%"), "{}", r.stdout);
    assert!(r.stdout.contains("higher compared to B"));

    let missing =
        segeval(&["compare", "--records", s(&records), "--method-a", "A", "--method-b", "C", "--out", s(&out)]);
    assert_eq!(missing.code, 2);
}

#[test]
fn compare_identical_methods() {
    let dir = tempfile::tempdir().unwrap();
    let records = write_records(
        dir.path(),
        &[("c1", "A", "rms", 1.5), ("c2", "A", "rms", 2.0), ("c1", "B", "rms", 1.5), ("c2", "B", "rms", 2.0)],
    );
    let out = dir.path().join("cmp.json");
    let r = segeval(&["compare", "--records", s(&records), "--method-a", "A", "--method-b", "B", "--out", s(&out)]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report["comparisons"][0]["percent_diff"], 0.0);
    assert_eq!(report["comparisons"][0]["wilcoxon"]["flag"], "all_zero_differences");
}

fn occupancy(path: &Path) -> Vec<u8> {
    match read_nifti(path).unwrap().into_data() {
        VoxelData::U8(d) => d,
        other => panic!("{other:?}"),
    }
}

#[test]
fn phantom_box_and_derive() {
    let dir = tempfile::tempdir().unwrap();
    let b = dir.path().join("box.nii");
    let r = segeval(&["phantom", "box", "--dims", "8,8,8", "--lo", "2,2,2", "--hi", "4,4,4", "--out", s(&b)]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(occupancy(&b).iter().filter(|&&v| v == 1).count(), 27);

    let sph = dir.path().join("sphere.nii");
    let r = segeval(&[
        "phantom",
        "ellipsoid",
        "--dims",
        "32,32,32",
        "--center",
        "16,16,16",
        "--radii",
        "6,6,6",
        "--out",
        s(&sph),
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);

    let same = dir.path().join("same.nii");
    assert_eq!(segeval(&["phantom", "derive", "--input", s(&sph), "--out", s(&same)]).code, 0);
    assert_eq!(occupancy(&same), occupancy(&sph));

    let grown = dir.path().join("grown.nii");
    assert_eq!(segeval(&["phantom", "derive", "--input", s(&sph), "--dilate", "2", "--out", s(&grown)]).code, 0);
    let r = segeval(&["pair", "--ref", s(&sph), "--test", s(&grown), "--label", "1"]);
    let report: Value = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(record(&report, "pair", "test", "hausdorff"), 2.0);

    let noisy1 = dir.path().join("n1.nii");
    let noisy2 = dir.path().join("n2.nii");
    for p in [&noisy1, &noisy2] {
        let args = ["phantom", "derive", "--input", s(&sph), "--noise", "0.01", "--seed", "9", "--out", s(p)];
        assert_eq!(segeval(&args).code, 0);
    }
    assert_eq!(std::fs::read(&noisy1).unwrap(), std::fs::read(&noisy2).unwrap());

    let bad = segeval(&["phantom", "box", "--dims", "4,4,4", "--lo", "1,1,1", "--hi", "4,4,4", "--out", s(&b)]);
    assert_eq!(bad.code, 2);
}

#[test]
fn output_is_deterministic_without_timestamp() {
    let dir = tempfile::tempdir().unwrap();
    let a = save(&sphere(16, 5.0), dir.path(), "a.nii");
    let b = save(&sphere(16, 4.0), dir.path(), "b.nii");
    let args = ["pair", "--ref", s(&a), "--test", s(&b), "--label", "1", "--no-timestamp"];
    assert_eq!(segeval(&args).stdout, segeval(&args).stdout);
}
