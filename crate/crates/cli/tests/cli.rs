use std::process::{Command, Output};

fn wavecv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wavecv")).args(args).output().expect("run wavecv")
}

#[test]
fn gen_signals_writes_one_row_per_sample() {
    let out = wavecv(&["gen-signals", "--function", "wave", "--n", "512", "--noise", "t3", "--snr", "5"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,f,y"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 512);
    assert!(rows[511].starts_with("1,"));
}

#[test]
fn gen_signals_is_reproducible() {
    let args = ["gen-signals", "--function", "blocks", "--n", "64", "--noise", "lognormal", "--seed", "9"];
    assert_eq!(wavecv(&args).stdout, wavecv(&args).stdout);
}

#[test]
fn denoise_pads_non_dyadic_input() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("series.txt");
    let body: String = (0..314).map(|i| format!("{}\n", (i as f64 * 0.1).sin() + if i % 7 == 0 { 0.3 } else { 0.0 })).collect();
    std::fs::write(&input, format!("value\n{body}")).unwrap();
    let out = dir.path().join("est.csv");
    let diag = dir.path().join("diag.json");
    for method in ["ld_block", "nason", "sureshrink"] {
        let res = wavecv(&[
            "denoise", "--in", input.to_str().unwrap(), "--method", method, "--out", out.to_str().unwrap(),
            "--diagnostics", diag.to_str().unwrap(),
        ]);
        assert!(res.status.success(), "{method}: {}", String::from_utf8_lossy(&res.stderr));
        let text = std::fs::read_to_string(&out).unwrap();
        assert_eq!(text.lines().count(), 315);
        let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&diag).unwrap()).unwrap();
        assert_eq!(json["n_original"], 314);
        assert_eq!(json["n_padded"], 512);
    }
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let out = wavecv(&["simulate", "--bogus"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bad_input_reports_one_line_error() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("bad.txt");
    std::fs::write(&input, "1\n2\nthree\n").unwrap();
    let out = wavecv(&["denoise", "--in", input.to_str().unwrap(), "--method", "nason", "--out", "/dev/null"]);
    assert!(!out.status.success());
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.starts_with("error:"), "{err}");
    assert_eq!(err.trim_end().lines().count(), 1);
}

#[test]
fn bad_config_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "functions = corner\nsizes = 1000\n").unwrap();
    let out = wavecv(&["simulate", "--config", cfg.to_str().unwrap(), "--out", "/dev/null"]);
    assert!(!out.status.success());
    assert!(String::from_utf8(out.stderr).unwrap().starts_with("error:"));
}

#[test]
fn markdown_table_via_cli() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("small.cfg");
    std::fs::write(&cfg, "functions = heavisine\nsizes = 256\nsnrs = 5\nnoise = t3\nmethods = ld_block, visushrink_hard\nreps = 4\n").unwrap();
    let out = dir.path().join("t.md");
    let res = wavecv(&["simulate", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--format", "md"]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("| Function | n | SNR | Noise | ld_block | visushrink_hard |"));
}
