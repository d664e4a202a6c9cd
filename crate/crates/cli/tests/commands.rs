use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn flevy(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_flevy")).args(args).output().expect("run flevy")
}

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn rows(csv: &str) -> Vec<(f64, f64)> {
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t,value"));
    lines
        .map(|l| {
            let (t, v) = l.split_once(',').unwrap();
            (t.parse().unwrap(), v.parse().unwrap())
        })
        .collect()
}

const SPARSE_JUMPS: &str = "ensemble.seed = 42\nflp.d = 0.35\nfloup.lambda = 2.5\ndriver.intensity = 0.5\noutput.t_max = 20\n";

#[test]
fn simulate_floup_writes_monotone_finite_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "f.cfg", SPARSE_JUMPS);
    let out = dir.path().join("floup.csv");
    let o = flevy(&["simulate", "floup", "--config", s(&cfg), "--out", s(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = rows(&std::fs::read_to_string(&out).unwrap());
    assert_eq!(r.len(), 2001);
    assert!(r.windows(2).all(|w| w[1].0 > w[0].0));
    assert!(r.iter().all(|x| x.1.is_finite()));
}

#[test]
fn same_seed_gives_identical_bytes_and_seed_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "f.cfg", SPARSE_JUMPS);
    let run = |name: &str, extra: &[&str]| {
        let out = dir.path().join(name);
        let mut args = vec!["simulate", "flp", "--config", s(&cfg), "--out", s(&out)];
        args.extend_from_slice(extra);
        assert!(flevy(&args).status.success());
        std::fs::read(out).unwrap()
    };
    let a = run("a.csv", &[]);
    assert_eq!(a, run("b.csv", &[]));
    assert_ne!(a, run("c.csv", &["--seed", "43"]));
    assert_eq!(run("d.csv", &["--seed", "42"]), a);
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.csv");
    let cases = [
        "ensemble.seed = 1\ndriver.intensity = 0\n",
        "ensemble.seed = 1\nflp.bogus = 3\n",
        "flp.d = 0.3\n",
        "ensemble.seed = 1\nflp.d = 0.7\n",
        "ensemble.seed = 1\nflp.d = zero\n",
    ];
    for (i, body) in cases.iter().enumerate() {
        let cfg = write(dir.path(), &format!("bad{i}.cfg"), body);
        let o = flevy(&["simulate", "driver", "--config", s(&cfg), "--out", s(&out)]);
        assert_eq!(o.status.code(), Some(2), "case {i}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(!o.stderr.is_empty());
    }
    let cfg = write(dir.path(), "mm.cfg", "ensemble.seed = 1\nmodel.id = log\nfloup.lambda = 2\n");
    let o = flevy(&["simulate", "sde", "--config", s(&cfg), "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("rate mismatch"));
}

#[test]
fn numerical_failure_exits_with_three() {
    let dir = tempfile::tempdir().unwrap();
    // three replicates leave every autocovariance estimate negative
    let cfg = write(
        dir.path(),
        "lrd.cfg",
        "ensemble.seed = 4\nflp.d = 0.25\nflp.n = 10\nflp.window_exponent = 4\nensemble.replicates = 3\n",
    );
    let o = flevy(&["verify", "lrd", "--config", s(&cfg)]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn verify_prints_table_and_passes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "g.cfg", "ensemble.seed = 8\n");
    let o = flevy(&["verify", "gamma-identities", "--config", s(&cfg)]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split_whitespace().collect();
    assert_eq!(header, ["check", "expected", "observed", "tolerance", "status"]);
    assert!(lines.all(|l| l.ends_with("PASS")));

    let o = flevy(&["verify", "appendix-calculus", "--config", s(&cfg)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8(o.stdout).unwrap().contains("density formula"));
}

#[test]
fn wrong_reference_exponent_fails_covariance() {
    let dir = tempfile::tempdir().unwrap();
    let body = "ensemble.seed = 5\nensemble.replicates = 4000\nflp.n = 50\nflp.d = 0.25\n";
    let good = write(dir.path(), "good.cfg", body);
    assert_eq!(flevy(&["verify", "covariance", "--config", s(&good)]).status.code(), Some(0));
    let bad = write(dir.path(), "bad.cfg", &format!("{body}ensemble.reference_d = 0.35\n"));
    let o = flevy(&["verify", "covariance", "--config", s(&bad)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8(o.stdout).unwrap().contains("FAIL"));
}

#[test]
fn plotdata_merges_series_without_resampling() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "coarse.csv", "t,value\n0,1\n0.5,2\n");
    let b = write(dir.path(), "fine.csv", "t,value\n0,3\n0.25,4\n0.5,5\n");
    let out = dir.path().join("merged.csv");
    let o = flevy(&["plotdata", s(&a), s(&b), "--out", s(&out)]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "series,t,value");
    assert_eq!(lines.len(), 6);
    assert_eq!(lines.iter().filter(|l| l.starts_with("coarse,")).count(), 2);
    assert_eq!(lines.iter().filter(|l| l.starts_with("fine,")).count(), 3);

    let one = dir.path().join("one.csv");
    assert!(flevy(&["plotdata", s(&a), "--out", s(&one)]).status.success());
    assert!(std::fs::read_to_string(&one).unwrap().starts_with("series,t,value\ncoarse,0.0000000000000000e0,1.0000000000000000e0\n"));

    let bad = write(dir.path(), "bad.csv", "t,value\n1;2\n");
    assert_eq!(flevy(&["plotdata", s(&bad), "--out", s(&out)]).status.code(), Some(2));
}

#[test]
fn varying_sigma_log_model_gives_three_series() {
    let dir = tempfile::tempdir().unwrap();
    let mut inputs = Vec::new();
    for sigma in ["0.5", "1", "2"] {
        let cfg = write(
            dir.path(),
            &format!("s{sigma}.cfg"),
            &format!("ensemble.seed = 42\nflp.d = 0.35\nmodel.id = log\nmodel.lambda = 2.5\nmodel.sigma = {sigma}\n"),
        );
        let out = dir.path().join(format!("sigma{sigma}.csv"));
        let o = flevy(&["simulate", "sde", "--config", s(&cfg), "--out", s(&out)]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        assert!(rows(&std::fs::read_to_string(&out).unwrap()).iter().all(|r| r.1 > 0.0));
        inputs.push(out);
    }
    let merged = dir.path().join("merged.csv");
    let mut args = vec!["plotdata"];
    args.extend(inputs.iter().map(|p| s(p)));
    args.extend(["--out", s(&merged)]);
    assert!(flevy(&args).status.success());
    let text = std::fs::read_to_string(&merged).unwrap();
    let mut labels: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    labels.dedup();
    assert_eq!(labels, ["sigma0.5", "sigma1", "sigma2"]);
}

#[test]
fn simulate_every_kind() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "k.cfg",
        "ensemble.seed = 3\nflp.d = 0.3\nflp.n = 50\nfloup.lambda = 1\noutput.t_min = -1\noutput.t_max = 2\n",
    );
    for kind in ["driver", "flp", "floup"] {
        let out = dir.path().join(format!("{kind}.csv"));
        let o = flevy(&["simulate", kind, "--config", s(&cfg), "--out", s(&out)]);
        assert!(o.status.success(), "{kind}: {}", String::from_utf8_lossy(&o.stderr));
        let r = rows(&std::fs::read_to_string(&out).unwrap());
        assert_eq!(r.len(), 151);
        assert_eq!(r[0].0, -1.0);
        if kind != "floup" {
            assert_eq!(r[50].1, 0.0, "{kind} vanishes at the origin");
        }
    }
    let sde = write(
        dir.path(),
        "sde.cfg",
        "ensemble.seed = 3\nflp.d = 0.3\nmodel.id = cir\nmodel.tau = 1\nmodel.z = 0.5\noutput.t_max = 3\n",
    );
    let out = dir.path().join("sde.csv");
    let o = flevy(&["simulate", "sde", "--config", s(&sde), "--out", s(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = rows(&std::fs::read_to_string(&out).unwrap());
    assert_eq!(r[0], (1.0, 0.5));
}
