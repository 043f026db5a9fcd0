use std::process::{Command, Output};

use mlco2::report::{ComparisonReport, EstimateReport, HardwareReport, RegionsReport, Render, StatsReport};

fn mlco2(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mlco2"))
        .args(args)
        .env_remove("MLCO2_DATA_DIR")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

const ESTIMATE: [&str; 13] = [
    "estimate",
    "--provider",
    "aws",
    "--region",
    "ca-central-1",
    "--hardware",
    "Tesla V100",
    "--hours",
    "100",
    "--pue",
    "1.0",
    "--format",
    "json",
];

#[test]
fn estimate_json_document() {
    let out = mlco2(&ESTIMATE);
    assert!(out.status.success());
    assert!(out.stderr.is_empty());
    let report: EstimateReport = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report.emissions.gross_gco2eq, 600.0);
    assert_eq!(report.emissions.net_gco2eq, report.emissions.gross_gco2eq);
}

#[test]
fn output_is_deterministic() {
    for args in [
        &ESTIMATE[..],
        &["compare", "--hardware", "TPU3", "--hours", "12", "--count", "4"],
        &["stats", "--format", "csv"],
        &["hardware", "--efficiency", "--format", "json"],
    ] {
        let a = mlco2(args);
        let b = mlco2(args);
        assert!(a.status.success(), "{args:?}");
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

fn typed_round_trip<T: serde::de::DeserializeOwned + Render>(args: &[&str]) {
    let out = stdout(&mlco2(args));
    let report: T = serde_json::from_str(&out).unwrap();
    assert_eq!(report.json(), out, "{args:?}");
}

#[test]
fn json_round_trips() {
    typed_round_trip::<EstimateReport>(&ESTIMATE);
    typed_round_trip::<ComparisonReport>(&["compare", "--hardware", "Tesla V100", "--hours", "3", "--format", "json"]);
    typed_round_trip::<ComparisonReport>(&[
        "compare", "--hardware", "TPU2", "--hours", "3", "--provider", "gcp", "--metric", "net", "--format", "json",
    ]);
    typed_round_trip::<RegionsReport>(&["regions", "--format", "json"]);
    typed_round_trip::<HardwareReport>(&["hardware", "--efficiency", "--format", "json"]);
    typed_round_trip::<HardwareReport>(&["hardware", "--format", "json"]);
    typed_round_trip::<StatsReport>(&["stats", "--format", "json"]);
}

#[test]
fn errors_go_to_stderr_with_exit_codes() {
    let mut args = ESTIMATE.to_vec();
    args[8] = "0";
    let out = mlco2(&args);
    assert_eq!(out.status.code(), Some(4));
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("hours"));

    let mut args = ESTIMATE.to_vec();
    args[4] = "qc-central-9";
    let out = mlco2(&args);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("ca-central-1"));

    let out = mlco2(&["compare", "--hardware", "Tesla V100", "--hours", "1", "--top", "0"]);
    assert_eq!(out.status.code(), Some(2));

    let out = mlco2(&["estimate", "--hardware", "Tesla V100"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn compare_top_and_footer() {
    let out = stdout(&mlco2(&[
        "compare",
        "--hardware",
        "Tesla V100",
        "--hours",
        "100",
        "--provider",
        "azure",
        "--top",
        "1",
    ]));
    let lines: Vec<_> = out.lines().collect();
    assert_eq!(lines.len(), 3, "{out}");
    assert!(lines[1].contains("canadaeast"));
    assert!(lines[2].contains("1 of 32 regions"));
    assert!(lines[2].contains("ratio: 50.45"), "{}", lines[2]);
}

#[test]
fn data_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("regions.csv"),
        "provider,region_code,country,city,intensity_gco2_per_kwh,offset_ratio,default_pue,source\n\
         aws,test-1,Canada,Nowhere,10,0,1,test\n",
    )
    .unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_mlco2"))
        .args(["regions", "--format", "csv"])
        .env("MLCO2_DATA_DIR", dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 2);
    assert!(text.contains("test-1"));
}
