//! End-to-end tests of the command-line surface.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_depsrl"))
}

fn fixture() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/fixture_en.full")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("command runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn pipeline_matches_the_oracle_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let joint = dir.path().join("fix.joint");
    let decoded = dir.path().join("fix.decoded.full");
    let fixture = fixture();

    let out = run(&[
        "encode",
        "--input",
        path_str(&fixture),
        "--output",
        path_str(&joint),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stderr(&out).contains("0 unconverted"), "{}", stderr(&out));

    let out = run(&[
        "decode",
        "--input",
        path_str(&joint),
        "--output",
        path_str(&decoded),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));

    let out = run(&[
        "eval",
        "--gold",
        path_str(&fixture),
        "--pred",
        path_str(&decoded),
        "--report-format",
        "kv",
    ]);
    assert!(out.status.success());
    let eval_text = stdout(&out);
    assert!(eval_text.contains("srl.f1=100.0000"), "{eval_text}");

    let out = run(&[
        "oracle",
        "--input",
        path_str(&fixture),
        "--report-format",
        "kv",
    ]);
    assert!(out.status.success());
    let oracle_text = stdout(&out);
    assert!(oracle_text.contains("oracle.f1=100.0000"), "{oracle_text}");
}

#[test]
fn encode_counts_unconvertible_relations_without_failing() {
    // A grandparent-pattern argument that no slot can carry.
    let text = "\
# predicates = 1
1\tlisted\tVBN\t0\troot\tV
2\tin\tIN\t1\tprep\t_
3\tMuseum\tNNP\t2\tpobj\tB-ARGM-LOC

";
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("other.full");
    std::fs::write(&input, text).unwrap();
    let out = run(&[
        "encode",
        "--input",
        path_str(&input),
        "--output",
        path_str(&dir.path().join("other.joint")),
        "--report-format",
        "kv",
    ]);
    assert!(out.status.success(), "warnings must not change the exit code");
    let report = stderr(&out);
    assert!(report.contains("unconverted=1"), "{report}");
    assert!(report.contains("reason.other_pattern=1"), "{report}");
}

#[test]
fn decode_ignores_invalid_c_labels_with_a_warning() {
    let text = "\
# predicates = 3
1\tshe\tPRP\t2\tnsubj|_|_|_
2\tnodded\tVBD\t0\troot|_|_|_
3\tsmiling\tVBG\t2\tvmod|_|(ARG3,ARG0)|_

";
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("bad.joint");
    std::fs::write(&input, text).unwrap();
    let output = dir.path().join("bad.full");
    let out = run(&[
        "decode",
        "--input",
        path_str(&input),
        "--output",
        path_str(&output),
    ]);
    assert!(out.status.success());
    assert!(stderr(&out).contains("1 invalid (C) labels ignored"), "{}", stderr(&out));
    let decoded = std::fs::read_to_string(&output).unwrap();
    // The predicate column exists but carries no arguments.
    assert!(decoded.contains("# predicates = 3"));
    assert!(decoded.lines().any(|l| l.ends_with("\tV")), "{decoded}");
    assert!(!decoded.contains("B-ARG0"), "{decoded}");
}

#[test]
fn decode_of_blank_joint_file_yields_empty_columns() {
    let text = "\
# predicates = 2
1\tit\tPRP\t2\texpl|_|_|_
2\trained\tVBD\t0\troot|_|_|_

";
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("blank.joint");
    std::fs::write(&input, text).unwrap();
    let output = dir.path().join("blank.full");
    let out = run(&[
        "decode",
        "--input",
        path_str(&input),
        "--output",
        path_str(&output),
    ]);
    assert!(out.status.success());
    let decoded = std::fs::read_to_string(&output).unwrap();
    let expected = "\
# predicates = 2
1\tit\tPRP\t2\texpl\t_
2\trained\tVBD\t0\troot\tV

";
    assert_eq!(decoded, expected);
}

#[test]
fn analyze_reports_the_distribution() {
    let out = run(&[
        "analyze",
        "--input",
        path_str(&fixture()),
        "--report-format",
        "kv",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("total=88"), "{text}");
    assert!(text.contains("d.count=61"), "{text}");
    assert!(text.contains("r_two_hop.count=2"), "{text}");
}

#[test]
fn train_parse_eval_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("tiny.toml");
    std::fs::write(
        &config,
        "\
[encoder]
word_emb_dim = 16
predicate_indicator_dim = 4
positional_dim = 8
max_positions = 64
layers = 1
heads = 2
ffn_dim = 32
model_dim = 16
seed = 42

[dba]
attachment_dim = 8
label_dim = 8

[train]
batch_size = 8
learning_rate = 0.005
max_epochs = 3
",
    )
    .unwrap();
    let fixture = fixture();
    let model_a = dir.path().join("a.ckpt");
    let model_b = dir.path().join("b.ckpt");
    for model in [&model_a, &model_b] {
        let out = run(&[
            "train",
            "--input",
            path_str(&fixture),
            "--dev",
            path_str(&fixture),
            "--model",
            path_str(model),
            "--config",
            path_str(&config),
            "--seed",
            "7",
        ]);
        assert!(out.status.success(), "{}", stderr(&out));
    }
    let a = std::fs::read(&model_a).unwrap();
    let b = std::fs::read(&model_b).unwrap();
    assert_eq!(a, b, "training must be deterministic under a fixed seed");

    let parsed = dir.path().join("parsed.full");
    let out = run(&[
        "parse",
        "--model",
        path_str(&model_a),
        "--input",
        path_str(&fixture),
        "--output",
        path_str(&parsed),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let out = run(&[
        "eval",
        "--gold",
        path_str(&fixture),
        "--pred",
        path_str(&parsed),
        "--per-label",
        "--per-pattern",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).contains("UAS"), "{}", stdout(&out));

    // Oracle-syntax parsing of the same under-trained model must not score
    // worse than the fully predicted run.
    let f1_of = |text: &str| -> f64 {
        text.lines()
            .find_map(|l| l.strip_prefix("srl.f1="))
            .unwrap()
            .parse()
            .unwrap()
    };
    let eval_kv = |pred: &Path| -> f64 {
        let out = run(&[
            "eval",
            "--gold",
            path_str(&fixture),
            "--pred",
            path_str(pred),
            "--report-format",
            "kv",
        ]);
        assert!(out.status.success());
        f1_of(&stdout(&out))
    };
    let ablated = dir.path().join("ablated.full");
    let out = run(&[
        "parse",
        "--model",
        path_str(&model_a),
        "--input",
        path_str(&fixture),
        "--output",
        path_str(&ablated),
        "--gold-syntax",
        "--gold-d",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let plain_f1 = eval_kv(&parsed);
    let ablated_f1 = eval_kv(&ablated);
    assert!(
        ablated_f1 >= plain_f1,
        "gold syntax + gold (D) scored {ablated_f1} below the plain {plain_f1}"
    );
}

#[test]
fn gold_ablation_flags_are_validated() {
    let out = run(&[
        "parse",
        "--model",
        "/nonexistent.ckpt",
        "--input",
        "x",
        "--output",
        "y",
        "--gold-d",
        "--gold-rc",
    ]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("cannot be used with"), "{}", stderr(&out));
}

#[test]
fn gradcheck_prints_the_error_and_exits_clean() {
    let out = run(&["gradcheck"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("max_relative_error="), "{text}");
    let err: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("max_relative_error="))
        .unwrap()
        .parse()
        .unwrap();
    assert!(err < 1e-4);
}

#[test]
fn io_errors_carry_locations() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("cycle.full");
    std::fs::write(
        &input,
        "\
# predicates =
1\ta\t_\t2\tdep
2\tb\t_\t1\tdep

",
    )
    .unwrap();
    let out = run(&["analyze", "--input", path_str(&input)]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("cycle.full:1"), "{}", stderr(&out));
}
