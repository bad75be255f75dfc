//! CLI round-trips: document generation, command outputs, exit codes and
//! byte-level reproducibility of result payloads.

use std::path::Path;

use switched_mac::cli;

fn run(args: &[&str]) -> i32 {
    cli::run(std::iter::once("switched-mac").chain(args.iter().copied()))
}

fn payload(path: &Path) -> serde_json::Value {
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    doc["payload"].clone()
}

struct Files {
    dir: tempfile::TempDir,
}

impl Files {
    fn new() -> Self {
        let dir = tempfile::tempdir().unwrap();
        let f = Files { dir };
        assert_eq!(
            run(&["gen", "--preset", "adder", "--out-file", f.p("adder.json")]),
            0
        );
        assert_eq!(
            run(&[
                "gen",
                "--preset",
                "constant",
                "--p",
                "0.5",
                "--out-file",
                f.p("p05.json")
            ]),
            0
        );
        f
    }

    fn path(&self, name: &str) -> std::path::PathBuf {
        self.dir.path().join(name)
    }

    fn p(&self, name: &str) -> &str {
        // leak is fine in tests; keeps call sites readable
        Box::leak(
            self.dir
                .path()
                .join(name)
                .to_str()
                .unwrap()
                .to_owned()
                .into_boxed_str(),
        )
    }
}

#[test]
fn capacity_of_generated_example2_spec() {
    let f = Files::new();
    assert_eq!(
        run(&[
            "gen",
            "--preset",
            "example2",
            "--alpha",
            "2",
            "--out-file",
            f.p("ex2.json")
        ]),
        0
    );
    assert_eq!(
        run(&[
            "capacity",
            "--channel",
            f.p("ex2.json"),
            "--out",
            f.p("out")
        ]),
        0
    );
    let v = payload(&f.path("out/capacity.json"))["value_bits"]
        .as_f64()
        .unwrap();
    assert!((v - 24f64.log2()).abs() < 1e-6, "example2 capacity {v}");
}

#[test]
fn useless_channel_capacity_is_zero() {
    let f = Files::new();
    let useless = switched_mac::MacChannel::useless();
    std::fs::write(
        f.path("useless.json"),
        serde_json::to_string(&useless.to_doc()).unwrap(),
    )
    .unwrap();
    assert_eq!(
        run(&[
            "capacity",
            "--channel",
            f.p("useless.json"),
            "--out",
            f.p("out")
        ]),
        0
    );
    let v = payload(&f.path("out/capacity.json"))["value_bits"]
        .as_f64()
        .unwrap();
    assert!(v.abs() < 1e-9);
}

#[test]
fn region_cross_path_and_csv_export() {
    let f = Files::new();
    // thm1 on adder at p = 0.5 (exact, sum = 0.5 log2 3)
    assert_eq!(
        run(&[
            "region",
            "--channel",
            f.p("adder.json"),
            "--profile",
            f.p("p05.json"),
            "--which",
            "thm1",
            "--out",
            f.p("thm1")
        ]),
        0
    );
    let thm1 = payload(&f.path("thm1/region.json"));
    assert_eq!(thm1["condition"]["holds"], serde_json::Value::Bool(true));
    let threshold = thm1["threshold"].as_f64().unwrap();
    assert!((threshold - 0.5794).abs() < 1e-3);

    // corollary on the same input: sum must agree within 1e-6
    assert_eq!(
        run(&[
            "region",
            "--channel",
            f.p("adder.json"),
            "--profile",
            f.p("p05.json"),
            "--which",
            "corollary",
            "--angles",
            "9",
            "--restarts",
            "8",
            "--out",
            f.p("cor")
        ]),
        0
    );
    let cor = payload(&f.path("cor/region.json"));
    let kind = cor["regions"][0]["kind"].as_str().unwrap();
    assert_eq!(kind, "exact");
    // the sum support angle is the middle constraint of the 9-angle sweep
    let c = cor["regions"][0]["constraints"][4].clone();
    let sum = c["c"].as_f64().unwrap() / c["a"].as_f64().unwrap();
    assert!(
        (sum - 0.5 * 3f64.log2()).abs() < 1e-6,
        "corollary sum {sum}"
    );

    // CSV export carries frontier rows with kind and label
    assert_eq!(
        run(&[
            "region",
            "--channel",
            f.p("adder.json"),
            "--profile",
            f.p("p05.json"),
            "--which",
            "prop1",
            "--format",
            "csv",
            "--out",
            f.p("csv")
        ]),
        0
    );
    let text = std::fs::read_to_string(f.path("csv/region.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "R1,R2,kind,label");
    let first = lines.next().unwrap();
    assert!(first.ends_with(",outer,prop1"), "row: {first}");
    assert!(f.path("csv/region.csv.manifest.json").exists());
}

#[test]
fn prop2_with_zero_feedforward_is_a_point() {
    let f = Files::new();
    assert_eq!(
        run(&[
            "gen",
            "--preset",
            "constant",
            "--p",
            "0.0",
            "--out-file",
            f.p("p0.json")
        ]),
        0
    );
    assert_eq!(
        run(&[
            "region",
            "--channel",
            f.p("adder.json"),
            "--profile",
            f.p("p0.json"),
            "--which",
            "prop2",
            "--out",
            f.p("out")
        ]),
        0
    );
    let doc = payload(&f.path("out/region.json"));
    let frontier = doc["regions"][0]["frontier"].as_array().unwrap();
    assert_eq!(frontier.len(), 1);
    assert_eq!(frontier[0][0].as_f64().unwrap(), 0.0);
    assert_eq!(frontier[0][1].as_f64().unwrap(), 0.0);
}

#[test]
fn simulate_payloads_are_reproducible_byte_for_byte() {
    let f = Files::new();
    let args = |out: &str| {
        vec![
            "simulate".to_string(),
            "--channel".into(),
            f.p("adder.json").to_string(),
            "--p".into(),
            "0.5".into(),
            "--n".into(),
            "40".into(),
            "--b-blocks".into(),
            "3".into(),
            "--r1".into(),
            "0.25".into(),
            "--trials".into(),
            "50".into(),
            "--seed".into(),
            "33".into(),
            "--out".into(),
            f.p(out).to_string(),
        ]
    };
    for out in ["rep1", "rep2"] {
        let argv: Vec<String> = std::iter::once("switched-mac".to_string())
            .chain(args(out))
            .collect();
        assert_eq!(cli::run(argv), 0);
    }
    let a = payload(&f.path("rep1/simulate.json"));
    let b = payload(&f.path("rep2/simulate.json"));
    assert_eq!(
        serde_json::to_string(&a).unwrap(),
        serde_json::to_string(&b).unwrap()
    );
}

#[test]
fn sweep_csv_has_the_contracted_columns() {
    let f = Files::new();
    assert_eq!(
        run(&[
            "simulate",
            "--channel",
            f.p("adder.json"),
            "--p",
            "0.5",
            "--n",
            "30",
            "--b-blocks",
            "3",
            "--r1",
            "0.2",
            "--trials",
            "20",
            "--sweep-axis",
            "n",
            "--sweep-values",
            "24,48",
            "--format",
            "csv",
            "--out",
            f.p("sw")
        ]),
        0
    );
    let text = std::fs::read_to_string(f.path("sw/sweep.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "axis_value,trials,errors,error_rate,ci_low,ci_high,stage1_errors,stage2_errors,seed"
    );
    assert_eq!(lines.count(), 2);
}

#[test]
fn exit_codes_follow_the_contract() {
    let f = Files::new();
    // trials = 0 -> usage/validation error
    assert_eq!(
        run(&[
            "simulate",
            "--channel",
            f.p("adder.json"),
            "--p",
            "0.5",
            "--n",
            "30",
            "--b-blocks",
            "3",
            "--r1",
            "0.2",
            "--trials",
            "0",
        ]),
        2
    );
    // malformed channel -> validation error
    std::fs::write(f.path("bad.json"), "{\"x1_size\": 2}").unwrap();
    assert_eq!(
        run(&["capacity", "--channel", f.p("bad.json")]),
        2
    );
    // oversized exact decoding -> resource cap
    assert_eq!(
        run(&[
            "simulate",
            "--channel",
            f.p("adder.json"),
            "--p",
            "0.5",
            "--n",
            "200",
            "--b-blocks",
            "4",
            "--r1",
            "0.6",
            "--decoder",
            "exact",
            "--trials",
            "10",
        ]),
        4
    );
    // example2 alpha too large -> resource cap
    assert_eq!(
        run(&[
            "gen",
            "--preset",
            "example2",
            "--alpha",
            "9",
            "--out-file",
            f.p("huge.json")
        ]),
        4
    );
}

#[test]
fn ksp_outputs_a_bracketing_interval() {
    let f = Files::new();
    assert_eq!(
        run(&[
            "gen",
            "--preset",
            "step",
            "--p",
            "0.5",
            "--out-file",
            f.p("step.json")
        ]),
        0
    );
    assert_eq!(
        run(&[
            "ksp",
            "--channel",
            f.p("adder.json"),
            "--profile",
            f.p("step.json"),
            "--b-blocks",
            "8",
            "--restarts",
            "8",
            "--out",
            f.p("out")
        ]),
        0
    );
    let doc = payload(&f.path("out/ksp.json"));
    let inner = doc["sum_value_inner"].as_f64().unwrap();
    let outer = doc["sum_value_outer"].as_f64().unwrap();
    let target = 0.5 * 3f64.log2();
    assert!(inner <= target + 1e-6 && outer >= target - 1e-6);
    assert!((inner - target).abs() < 1e-4);
}

#[test]
fn generated_documents_round_trip() {
    let f = Files::new();
    let text = std::fs::read_to_string(f.path("adder.json")).unwrap();
    let ch = switched_mac::MacChannel::from_json(&text).unwrap();
    assert_eq!(ch, switched_mac::MacChannel::binary_adder());
    let text = std::fs::read_to_string(f.path("p05.json")).unwrap();
    let pr = switched_mac::FeedforwardProfile::from_json(&text).unwrap();
    assert_eq!(pr.p_avg(), 0.5);
}
