use std::path::Path;
use std::process::{Command, Output};

fn kthmax(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kthmax"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn ok(args: &[&str]) -> String {
    let o = kthmax(args);
    assert_eq!(o.status.code(), Some(0), "{args:?}: {}", stderr(&o));
    stdout(&o)
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

struct Csv {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Csv {
    fn parse(text: &str) -> Self {
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let header = r.headers().unwrap().iter().map(String::from).collect();
        let rows = r.records().map(|x| x.unwrap().iter().map(String::from).collect()).collect();
        Csv { header, rows }
    }

    fn col(&self, name: &str) -> usize {
        self.header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"))
    }

    fn num(&self, row: &[String], name: &str) -> f64 {
        row[self.col(name)].parse().unwrap()
    }
}

#[test]
fn golden_headers() {
    let cdf = ok(&["cdf", "--preset", "fig1", "--samples", "1000"]);
    assert_eq!(
        cdf.lines().next().unwrap(),
        "m,k,z,z_normalized,theory_normalized,theory_unnormalized,finite_m,exact,empirical"
    );
    let cdf = ok(&["cdf", "--preset", "fig1", "--samples", "0", "--mode", "finite_m"]);
    assert_eq!(cdf.lines().next().unwrap(), "m,k,z,finite_m,exact");

    let metric = ok(&["metric", "--preset", "fig6", "--samples", "1000"]);
    assert_eq!(
        metric.lines().next().unwrap(),
        "metric,m,k,law,theory,method,mc_estimate,mc_stderr,rel_diff,status"
    );
    let metric = ok(&["metric", "--preset", "fig6", "--samples", "0"]);
    assert_eq!(metric.lines().next().unwrap(), "metric,m,k,law,theory,method,status");

    let json: serde_json::Value =
        serde_json::from_str(&ok(&["metric", "--preset", "fig6", "--samples", "0", "--format", "json"])).unwrap();
    let keys: Vec<&str> = json.as_object().unwrap().keys().map(String::as_str).collect();
    assert_eq!(keys, ["columns", "command", "meta", "rows", "schema_version"]);
    assert_eq!(json["schema_version"], 1);
    assert_eq!(json["command"], "metric");
    assert_eq!(json["columns"][6], "status");
}

#[test]
fn cdf_figures_match_the_empirical_curves() {
    // grid KS against the exact column; 1.95/√n is the 0.1% Kolmogorov point
    let band = 1.95 / 20000f64.sqrt();
    for preset in ["fig1", "fig2", "fig3"] {
        let t = Csv::parse(&ok(&["cdf", "--preset", preset, "--samples", "20000"]));
        for k in ["1", "2", "5"] {
            let rows: Vec<&Vec<String>> = t.rows.iter().filter(|r| r[t.col("k")] == k).collect();
            assert_eq!(rows.len(), 512, "{preset} k={k}");
            let mut ks = 0.0f64;
            let mut prev = [f64::NEG_INFINITY; 3];
            for r in &rows {
                let cur = [
                    t.num(r, "theory_unnormalized"),
                    t.num(r, "finite_m"),
                    t.num(r, "exact"),
                ];
                for (c, p) in cur.iter().zip(&prev) {
                    assert!(c >= p, "{preset} k={k}: theory column not monotone");
                }
                prev = cur;
                ks = ks.max((t.num(r, "empirical") - t.num(r, "exact")).abs());
            }
            assert!(ks <= band, "{preset} k={k}: grid KS {ks}");
        }
    }
}

#[test]
fn same_seed_same_bytes() {
    let dir = tempfile::tempdir().unwrap();
    for cmd in [["cdf", "fig2"], ["metric", "fig4"]] {
        let mut outs = Vec::new();
        for i in 0..2 {
            let out = dir.path().join(format!("{}-{i}.csv", cmd[0]));
            let out = out.to_str().unwrap();
            ok(&[cmd[0], "--preset", cmd[1], "--samples", "5000", "--seed", "77", "--out", out]);
            outs.push(std::fs::read(out).unwrap());
        }
        assert_eq!(outs[0], outs[1], "{cmd:?}");
        assert!(!outs[0].is_empty());
    }
    let a = ok(&["cdf", "--preset", "fig1", "--samples", "5000", "--seed", "1"]);
    let b = ok(&["cdf", "--preset", "fig1", "--samples", "5000", "--seed", "2"]);
    assert_ne!(a, b);
}

#[test]
fn dumped_presets_reproduce_their_output() {
    let dir = tempfile::tempdir().unwrap();
    for (cmd, preset) in [("cdf", "fig3"), ("metric", "fig5")] {
        let cfg = dir.path().join(format!("{preset}.toml"));
        let cfg = cfg.to_str().unwrap();
        ok(&["preset", "dump", preset, "--out", cfg]);
        let direct = ok(&[cmd, "--preset", preset, "--samples", "2000"]);
        let via_file = ok(&[cmd, "--config", cfg, "--samples", "2000"]);
        assert_eq!(direct, via_file, "{preset}");
    }
    let listed = ok(&["preset", "list"]);
    assert_eq!(listed.lines().count(), 6);
    assert!(listed.starts_with("fig1"));
}

#[test]
fn metric_rows_for_figure_four() {
    let t = Csv::parse(&ok(&["metric", "--preset", "fig4", "--samples", "200000"]));
    assert_eq!(t.rows.len(), 2 * 5 * 2);
    for r in &t.rows {
        let law = &r[t.col("law")];
        let method = &r[t.col("method")];
        if law == "asymptotic" {
            // the series cannot resolve these constants and falls back
            assert_eq!(method, "quadrature");
            assert_eq!(r[t.col("status")], "series_not_converged");
        } else {
            assert!(t.num(r, "rel_diff") <= 0.01, "{r:?}");
        }
    }
}

#[test]
fn order_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let same = write(dir.path(), "same.toml", "[ensemble]\nm = [20]\n[ensemble2]\nm = [20]\n");
    let o = kthmax(&["order", "--config", &same]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("second_dominates"));

    let cross = write(
        dir.path(),
        "cross.toml",
        "[ensemble]\nm = [20]\n[ensemble2]\nsigma = 3.0\nm = [3]\n[grid]\ncount = 41\n",
    );
    let json: serde_json::Value =
        serde_json::from_str(&ok(&["order", "--config", &cross, "--format", "json"])).unwrap();
    assert_eq!(json["meta"]["verdict"], "crossing");
    let idx = json["meta"]["crossing_index"].as_u64().unwrap() as usize;
    let (a1, b1) = (json["meta"]["first"]["a_m"].as_f64().unwrap(), json["meta"]["first"]["b_m"].as_f64().unwrap());
    let (a2, b2) = (json["meta"]["second"]["a_m"].as_f64().unwrap(), json["meta"]["second"]["b_m"].as_f64().unwrap());
    // the affine condition changes sign where (z − b1)/a1 = (z − b2)/a2
    let z_cross = (b1 * a2 - b2 * a1) / (a2 - a1);
    let z = |i: usize| json["rows"][i][1].as_f64().unwrap();
    assert!(z(idx - 1) < z_cross && z_cross <= z(idx), "index {idx}, z̃ = {z_cross}");

    let mismatch = write(
        dir.path(),
        "p.toml",
        "[ensemble]\nm = [20]\ngroups = [{ nu = 1.0 }, { nu = 0.5 }]\n[ensemble2]\nm = [20]\n",
    );
    let o = kthmax(&["order", "--config", &mismatch]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("mixture weights differ"));
}

#[test]
fn validation_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let typo = write(dir.path(), "typo.toml", "k = [1]\n\n[mc]\nsamples = 1000\nsede = 3\n");
    let o = kthmax(&["cdf", "--config", &typo]);
    assert_eq!(o.status.code(), Some(1));
    let msg = stderr(&o);
    assert!(msg.contains("line 5") && msg.contains("sede"), "{msg}");

    let bad = write(dir.path(), "bad.toml", "[ensemble]\nsigma = -2.0\n");
    let o = kthmax(&["cdf", "--config", &bad]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("ensemble.sigma"));

    for args in [
        vec!["cdf", "--preset", "fig9"],
        vec!["cdf", "--preset", "fig1", "--config", &bad],
        vec!["cdf", "--format", "xml"],
        vec!["frobnicate"],
        vec!["selftest", "--seed", "3"],
        vec!["order"],
        vec!["cdf", "--config", "/no/such/file.toml"],
    ] {
        let o = kthmax(&args);
        assert_eq!(o.status.code(), Some(1), "{args:?}: {}", stderr(&o));
    }
    assert_eq!(kthmax(&["--help"]).status.code(), Some(0));
}

#[test]
fn numerical_failures_are_row_level_and_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    // (γZ)^{−θ} overflows near the bottom of the window for θ = 1000
    let cfg = write(
        dir.path(),
        "theta.toml",
        "k = [1, 2]\n[metric]\nwhich = [\"eff_rate\", \"rate\"]\neff_mode = \"approx\"\ntheta = 1000.0\n",
    );
    let o = kthmax(&["metric", "--config", &cfg, "--samples", "0", "--mode", "finite_m"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    let t = Csv::parse(&stdout(&o));
    assert_eq!(t.rows.len(), 4);
    for r in &t.rows {
        let status = &r[t.col("status")];
        if r[t.col("metric")] == "eff_rate" {
            assert!(status.starts_with("error:"), "{status}");
            assert_eq!(r[t.col("theory")], "");
        } else {
            assert_eq!(status, "ok");
        }
    }
}

#[test]
fn selftest_names_a_corrupted_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let mut bytes = kthmax::acceptance::GOLDEN_FIXTURE.to_vec();
    let last = bytes.len() - 1;
    bytes[last] ^= 0x40;
    let path = dir.path().join("bad.kmecdf");
    std::fs::write(&path, &bytes).unwrap();
    let o = kthmax(&["selftest", "--quick", "--fixture", path.to_str().unwrap(), "--format", "csv"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("[2] sampler matches exact law"), "{}", stderr(&o));
    let t = Csv::parse(&stdout(&o));
    let row = t.rows.iter().find(|r| r[t.col("id")] == "2").unwrap();
    assert_eq!(row[t.col("result")], "fail");
    assert!(row[t.col("detail")].contains("golden fixture"));
}

#[test]
fn selftest_quick_reports_every_criterion() {
    let o = kthmax(&["selftest", "--quick"]);
    let text = stdout(&o);
    for id in 1..=10 {
        assert!(text.contains(&format!("[{id:>2}]")), "criterion {id} missing");
    }
    let passed = text.lines().filter(|l| l.starts_with("PASS")).count();
    let failed = text.lines().filter(|l| l.starts_with("FAIL")).count();
    assert_eq!(passed + failed, 10);
    assert_eq!(o.status.code(), Some(if failed == 0 { 0 } else { 3 }));
    assert!(text.contains(&format!("{passed}/10 criteria passed")));
}
