use std::path::Path;
use std::process::{Command, Output};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use usable_speech::eval::ReportRow;
use usable_speech::signal_io::{read_csv, write_csv};
use usable_speech::synth::vowel;
use usable_speech::{write_wav, DecisionRow, FrameLabel, Signal, SweepRow, WavFormat};

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_usable-speech"))
        .current_dir(dir)
        .args(args)
        .output()
        .unwrap()
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = run(dir, args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn code(dir: &Path, args: &[&str]) -> i32 {
    run(dir, args).status.code().unwrap()
}

fn wav(dir: &Path, name: &str, samples: Vec<f64>) {
    write_wav(
        &Signal::new(samples, 8000).unwrap(),
        dir.join(name),
        WavFormat::Float32,
    )
    .unwrap();
}

fn vowel_wav(dir: &Path, name: &str, f0: f64, seed: u64) {
    let v = vowel(
        f0,
        f0 * 0.97,
        [730.0, 1090.0, 2440.0],
        16000,
        8000,
        &mut ChaCha8Rng::seed_from_u64(seed),
    );
    wav(dir, name, v.iter().map(|x| 0.3 * x).collect());
}

fn noise(len: usize, seed: u64) -> Vec<f64> {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    (0..len).map(|_| r.random_range(-0.3..0.3)).collect()
}

fn manifest(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn detect_vowel_mostly_usable() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    vowel_wav(d, "v.wav", 140.0, 1);
    ok(d, &["detect", "v.wav", "-o", "d.csv"]);
    let rows: Vec<DecisionRow> = read_csv(d.join("d.csv")).unwrap();
    let voiced = rows.iter().filter(|r| r.voiced).count();
    let usable = rows.iter().filter(|r| r.voiced && r.usable).count();
    assert!(
        voiced > 0 && usable * 100 >= voiced * 95,
        "{usable}/{voiced}"
    );
}

#[test]
fn detect_silence_is_unvoiced_and_echoes_config() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    wav(d, "s.wav", vec![0.0; 4096]);
    ok(
        d,
        &[
            "detect",
            "s.wav",
            "-o",
            "d.csv",
            "--frame-ms",
            "64",
            "--max-scale",
            "4",
            "--trace",
            "t.txt",
        ],
    );
    let rows: Vec<DecisionRow> = read_csv(d.join("d.csv")).unwrap();
    assert_eq!(rows.len(), 8);
    assert!(rows.iter().all(|r| !r.voiced && !r.usable));
    let m = manifest(&d.join("d.csv.manifest.json"));
    assert_eq!(m["command"], "detect");
    assert_eq!(m["config"]["detector"]["frame_ms"], 64);
    assert_eq!(m["config"]["detector"]["max_scale"], 4);
    assert_eq!(m["config"]["detector"]["lag_threshold"], 8);
    assert_eq!(m["outputs"].as_array().unwrap().len(), 2);
    assert!(std::fs::read_to_string(d.join("t.txt"))
        .unwrap()
        .lines()
        .all(|l| l.contains("unvoiced")));
}

#[test]
fn config_file_and_flags_layer() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    wav(d, "s.wav", vec![0.0; 4096]);
    std::fs::write(d.join("c.toml"), "lag_threshold = 12\namp_fraction = 0.4\n").unwrap();
    ok(
        d,
        &[
            "detect",
            "s.wav",
            "-o",
            "d.csv",
            "--config",
            "c.toml",
            "--amp-fraction",
            "0.3",
        ],
    );
    let m = manifest(&d.join("d.csv.manifest.json"));
    assert_eq!(m["config"]["detector"]["lag_threshold"], 12);
    assert_eq!(m["config"]["detector"]["amp_fraction"], 0.3);
    std::fs::write(d.join("bad.toml"), "lag_threshold = 12\nbogus = 1\n").unwrap();
    assert_eq!(
        code(
            d,
            &["detect", "s.wav", "-o", "d.csv", "--config", "bad.toml"]
        ),
        1
    );
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(code(d, &["detect"]), 1);
    assert_eq!(code(d, &["detect", "missing.wav", "-o", "d.csv"]), 2);
    std::fs::write(d.join("junk.wav"), b"not audio at all").unwrap();
    assert_eq!(code(d, &["detect", "junk.wav", "-o", "d.csv"]), 3);
    write_wav(
        &Signal::new(vec![0.1; 4410], 44100).unwrap(),
        d.join("cd.wav"),
        WavFormat::Pcm16,
    )
    .unwrap();
    assert_eq!(code(d, &["detect", "cd.wav", "-o", "d.csv"]), 3);
    wav(d, "s.wav", vec![0.0; 4096]);
    assert_eq!(
        code(d, &["detect", "s.wav", "-o", "d.csv", "--max-scale", "0"]),
        1
    );
    assert_eq!(code(d, &["detect", "s.wav", "-o", "no/such/dir/d.csv"]), 2);
}

#[test]
fn mix_records_gain_and_tir() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let a = noise(8192, 1);
    let scale = (a.iter().map(|x| x * x).sum::<f64>()
        / noise(8192, 2).iter().map(|x| x * x).sum::<f64>())
    .sqrt();
    wav(d, "a.wav", a);
    wav(
        d,
        "b.wav",
        noise(8192, 2).iter().map(|x| x * scale).collect(),
    );
    ok(
        d,
        &[
            "mix",
            "a.wav",
            "b.wav",
            "--tir-db",
            "0",
            "--out-prefix",
            "m0",
            "--category",
            "male-male",
        ],
    );
    let m = manifest(&d.join("m0_manifest.json"));
    assert!(m["results"]["measured_tir_db"].as_f64().unwrap().abs() < 1e-6);
    assert_eq!(m["results"]["category"], "male-male");
    for f in [
        "m0_mixed.wav",
        "m0_target.wav",
        "m0_interferer.wav",
        "m0_labels.csv",
    ] {
        assert!(d.join(f).exists(), "{f}");
    }
    let labels: Vec<FrameLabel> = read_csv(d.join("m0_labels.csv")).unwrap();
    assert_eq!(labels.len(), 16);

    ok(
        d,
        &[
            "mix",
            "a.wav",
            "b.wav",
            "--tir-db",
            "20",
            "--out-prefix",
            "m20",
        ],
    );
    let gain = manifest(&d.join("m20_manifest.json"))["results"]["interferer_gain"]
        .as_f64()
        .unwrap();
    assert!((gain - 0.1).abs() < 1e-6, "{gain}");

    ok(
        d,
        &[
            "mix",
            "a.wav",
            "b.wav",
            "--tir-db",
            "-10",
            "--out-prefix",
            "mneg",
        ],
    );
    wav(d, "z.wav", vec![0.0; 8192]);
    let out = run(d, &["mix", "a.wav", "z.wav", "--out-prefix", "mz"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("energy"));
}

fn fixture(d: &Path, name: &str, hits: usize, usable: usize, fas: usize, unusable: usize) {
    let mut dec = Vec::new();
    let mut lab = Vec::new();
    for k in 0..usable + unusable {
        let truth = k < usable;
        let detected = if truth { k < hits } else { k - usable < fas };
        dec.push(DecisionRow {
            index: k,
            voiced: true,
            detected_scale: detected.then_some(1),
            usable: detected,
        });
        lab.push(FrameLabel {
            index: k,
            frame_tir_db: Some(if truth { 30.0 } else { 0.0 }),
            usable_truth: truth,
        });
    }
    write_csv(&dec, d.join(format!("{name}_d.csv"))).unwrap();
    write_csv(&lab, d.join(format!("{name}_l.csv"))).unwrap();
}

#[test]
fn evaluate_perfect_detector() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fixture(d, "p", 40, 40, 0, 60);
    let stdout = ok(
        d,
        &[
            "evaluate",
            "--decisions",
            "p_d.csv",
            "--labels",
            "p_l.csv",
            "-o",
            "r.csv",
        ],
    );
    assert!(stdout.contains("100.00"));
    let rows: Vec<ReportRow> = read_csv(d.join("r.csv")).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!((rows[0].hit_pct, rows[0].false_alarm_pct), (100.0, 0.0));
}

#[test]
fn evaluate_category_average() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    // counts whose per-category rates round to 93.02/32.37, 98.46/28.93, 95.80/27.66
    fixture(d, "ff", 4000, 4300, 3237, 10000);
    fixture(d, "mm", 6400, 6500, 2893, 10000);
    fixture(d, "mf", 479, 500, 2766, 10000);
    #[rustfmt::skip]
    let args = [
        "evaluate",
        "--decisions", "ff_d.csv", "--labels", "ff_l.csv", "--category", "female-female",
        "--decisions", "mm_d.csv", "--labels", "mm_l.csv", "--category", "male-male",
        "--decisions", "mf_d.csv", "--labels", "mf_l.csv", "--category", "male-female",
        "-o", "r.csv",
    ];
    let stdout = ok(d, &args);
    let rows: Vec<ReportRow> = read_csv(d.join("r.csv")).unwrap();
    let names: Vec<&str> = rows.iter().map(|r| r.category.as_str()).collect();
    assert_eq!(
        names,
        [
            "female-female",
            "male-male",
            "male-female",
            "pooled",
            "average"
        ]
    );
    let avg = &rows[4];
    assert!(
        (avg.hit_pct - 95.76).abs() <= 0.01 && (avg.false_alarm_pct - 29.65).abs() <= 0.01,
        "{avg:?}"
    );
    assert!(stdout.contains("average") && stdout.contains("95.76") && stdout.contains("29.65"));
}

#[test]
fn evaluate_rejects_bad_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fixture(d, "p", 4, 4, 0, 6);
    fixture(d, "q", 2, 3, 0, 1);
    write_csv::<FrameLabel>(&[], d.join("empty.csv")).unwrap();
    let out = run(
        d,
        &[
            "evaluate",
            "--decisions",
            "p_d.csv",
            "--labels",
            "empty.csv",
            "-o",
            "r.csv",
        ],
    );
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no rows"));
    assert_eq!(
        code(
            d,
            &[
                "evaluate",
                "--decisions",
                "p_d.csv",
                "--labels",
                "q_l.csv",
                "-o",
                "r.csv"
            ]
        ),
        3
    );
    assert_eq!(
        code(d, &["evaluate", "--decisions", "p_d.csv", "-o", "r.csv"]),
        1
    );
    assert_eq!(
        code(
            d,
            &[
                "evaluate",
                "--decisions",
                "p_d.csv",
                "--labels",
                "p_l.csv",
                "--category",
                "cat-dog",
                "-o",
                "r.csv"
            ]
        ),
        1
    );
}

#[test]
fn sweep_rows() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    vowel_wav(d, "a.wav", 110.0, 3);
    vowel_wav(d, "b.wav", 190.0, 4);
    ok(
        d,
        &[
            "sweep",
            "a.wav",
            "b.wav",
            "--thresholds",
            "0,4,8,12,16",
            "-o",
            "s.csv",
        ],
    );
    let rows: Vec<SweepRow> = read_csv(d.join("s.csv")).unwrap();
    assert_eq!(
        rows.iter().map(|r| r.threshold).collect::<Vec<_>>(),
        [0, 4, 8, 12, 16]
    );
    assert!(rows
        .windows(2)
        .all(|w| w[0].hit_pct <= w[1].hit_pct && w[0].false_alarm_pct <= w[1].false_alarm_pct));
    ok(
        d,
        &[
            "sweep",
            "a.wav",
            "b.wav",
            "--thresholds",
            "8",
            "-o",
            "one.csv",
        ],
    );
    assert_eq!(read_csv::<SweepRow>(d.join("one.csv")).unwrap().len(), 1);
    assert_eq!(
        code(
            d,
            &[
                "sweep",
                "a.wav",
                "b.wav",
                "--thresholds",
                "8,4",
                "-o",
                "x.csv"
            ]
        ),
        1
    );
    assert!(!d.join("x.csv").exists());
}

#[test]
fn replay_reproduces_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    vowel_wav(d, "a.wav", 120.0, 5);
    vowel_wav(d, "b.wav", 210.0, 6);
    ok(
        d,
        &[
            "mix",
            "a.wav",
            "b.wav",
            "--out-prefix",
            "m",
            "--lag-threshold",
            "12",
            "--absolute-tir",
        ],
    );
    ok(
        d,
        &[
            "detect",
            "m_mixed.wav",
            "-o",
            "d.csv",
            "--lag-threshold",
            "12",
            "--trace",
            "t.txt",
        ],
    );
    ok(
        d,
        &[
            "evaluate",
            "--decisions",
            "d.csv",
            "--labels",
            "m_labels.csv",
            "-o",
            "r.csv",
        ],
    );
    for (manifest, files) in [
        ("m_manifest.json", vec!["m_mixed.wav", "m_labels.csv"]),
        ("d.csv.manifest.json", vec!["d.csv", "t.txt"]),
        ("r.csv.manifest.json", vec!["r.csv"]),
    ] {
        ok(d, &["replay", manifest, "--out-dir", "again"]);
        for f in files {
            assert_eq!(
                std::fs::read(d.join(f)).unwrap(),
                std::fs::read(d.join("again").join(f)).unwrap(),
                "{f}"
            );
        }
    }
    let m = manifest(&d.join("again/m_manifest.json"));
    assert_eq!(m["config"]["labels"]["mode"], "absolute");
    assert_eq!(m["config"]["detector"]["lag_threshold"], 12);
}

#[test]
fn synth_writes_corpus() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["synth", "--out-dir", "c", "--duration-secs", "0.5"]);
    for id in ["m1", "m2", "m3", "f1", "f2", "f3"] {
        assert!(d.join(format!("c/{id}.wav")).exists());
    }
    let pairs = std::fs::read_to_string(d.join("c/pairs.csv")).unwrap();
    assert_eq!(pairs.lines().count(), 31);
    assert!(pairs.starts_with("target,interferer,category\nm1.wav,m2.wav,male-male\n"));
}
