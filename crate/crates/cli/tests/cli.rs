use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn decaylab(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_decaylab"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("DECAYLAB_OUT")
        .output()
        .expect("binary runs")
}

fn config(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn read(p: impl AsRef<Path>) -> String {
    fs::read_to_string(p).unwrap()
}

#[test]
fn help_and_bad_usage() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(decaylab(&["--help"], tmp.path()).status.code(), Some(0));
    assert_eq!(decaylab(&["frobnicate"], tmp.path()).status.code(), Some(3));
    assert_eq!(decaylab(&["gd", "--threads", "0"], tmp.path()).status.code(), Some(3));
    assert_eq!(decaylab(&["gd", "--tolerance-profile", "loose"], tmp.path()).status.code(), Some(3));
}

#[test]
fn gd_defaults_pass() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("gd");
    let o = decaylab(&["gd"], &out);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let reports = read(out.join("reports.csv"));
    assert!(reports.starts_with("name,verdict,worst_margin,tolerance\n"));
    assert!(reports.lines().skip(1).all(|l| l.split(',').nth(1) == Some("pass")), "{reports}");
    let traj = read(out.join("trajectory.csv"));
    assert_eq!(traj.lines().next(), Some("t,x0,f,gnorm"));
    assert_eq!(traj.lines().count(), 62);
    let meta: serde_json::Value = serde_json::from_str(&read(out.join("trajectory.json"))).unwrap();
    assert_eq!(meta["params"]["eta"], 0.5);
}

#[test]
fn config_errors_exit_3() {
    let tmp = tempfile::tempdir().unwrap();
    let missing = config(tmp.path(), "a.toml", "eta = 0.1\n");
    let o = decaylab(&["gd", "--config", &missing], tmp.path());
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("schema_version"));

    let typo = config(tmp.path(), "b.toml", "schema_version = 1\nsteps = 3\netta = 0.1\n");
    let o = decaylab(&["gd", "--config", &typo], tmp.path());
    assert_eq!(o.status.code(), Some(3));
    let e = stderr(&o);
    assert!(e.contains("line 3") && e.contains("etta"), "{e}");

    let unstable = config(tmp.path(), "c.toml", "schema_version = 1\neta = 2.5\n");
    let o = decaylab(&["gd", "--config", &unstable], tmp.path());
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("`eta`"));

    let family = config(
        tmp.path(),
        "d.toml",
        "schema_version = 1\n[objective]\nkind = \"realized\"\ncurve = { kind = \"named\", family = \"nope\" }\n",
    );
    let o = decaylab(&["flow", "--config", &family], tmp.path());
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("objective.curve"));

    let o = decaylab(&["flow", "--config", "/definitely/not/here.toml"], tmp.path());
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn failed_and_inconclusive_exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let bad = config(tmp.path(), "m.toml", "schema_version = 1\na = [1, 1]\nb = [2, 0]\n");
    let o = decaylab(&["majorize", "--config", &bad], &tmp.path().join("m"));
    assert_eq!(o.status.code(), Some(1));
    assert!(read(tmp.path().join("m/reports.csv")).contains("tail_dominance,fail"));

    let short = config(tmp.path(), "g.toml", "schema_version = 1\nsteps = 5\n");
    let o = decaylab(&["gd", "--config", &short], &tmp.path().join("g"));
    assert_eq!(o.status.code(), Some(2));
    let r = read(tmp.path().join("g/reports.csv"));
    assert!(r.contains("inconclusive") && !r.contains(",fail,"), "{r}");
}

#[test]
fn majorize_writes_the_map() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = config(tmp.path(), "m.toml", "schema_version = 1\na = [\"3/2\", 0.5]\nb = [1, 1]\n");
    let o = decaylab(&["majorize", "--config", &cfg], tmp.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = read(tmp.path().join("map.txt"));
    assert!(text.starts_with("n = 2\n"));
    assert!(text.contains("1/2: 1 2") && text.contains("1/2: 2 1"), "{text}");
}

#[test]
fn empty_fig1_list_writes_nothing() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = config(tmp.path(), "f.toml", "schema_version = 1\nalphas = []\n");
    let out = tmp.path().join("fig");
    let o = decaylab(&["reproduce-fig1", "--config", &cfg], &out);
    assert_eq!(o.status.code(), Some(0));
    assert!(!out.exists());
}

#[test]
fn fig1_is_thread_count_invariant() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = config(tmp.path(), "f.toml", "schema_version = 1\nalphas = [3.0, 10.0]\nmus = [10.0]\n");
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    assert_eq!(decaylab(&["reproduce-fig1", "--config", &cfg, "--threads", "1"], &a).status.code(), Some(0));
    assert_eq!(decaylab(&["reproduce-fig1", "--config", &cfg, "--threads", "4"], &b).status.code(), Some(0));
    for name in ["fig1_alpha3_mu10.csv", "fig1_alpha10_mu10.csv", "markers.csv", "reports.csv"] {
        assert_eq!(fs::read(a.join(name)).unwrap(), fs::read(b.join(name)).unwrap(), "{name}");
    }
    let markers = read(a.join("markers.csv"));
    let rows: Vec<Vec<f64>> = markers
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(markers.lines().next(), Some("alpha,mu,t_transition"));
    for r in &rows {
        assert!((r[2] - r[0] / (2.0 * r[1].sqrt())).abs() < 1e-15);
    }
}

#[test]
fn sgd_depends_on_seed_not_threads() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = config(tmp.path(), "s.toml", "schema_version = 1\nreplicas = 400\nsteps = 50\n");
    let run = |dir: &str, extra: &[&str]| {
        let out = tmp.path().join(dir);
        let mut args = vec!["sgd", "--config", &cfg];
        args.extend_from_slice(extra);
        let o = decaylab(&args, &out);
        assert!(matches!(o.status.code(), Some(0) | Some(2)), "{}", stderr(&o));
        fs::read(out.join("replicas.csv")).unwrap()
    };
    let one = run("one", &["--threads", "1", "--seed", "7"]);
    let many = run("many", &["--threads", "3", "--seed", "7"]);
    let other = run("other", &["--threads", "3", "--seed", "8"]);
    assert_eq!(one, many);
    assert_ne!(one, other);
}

#[test]
fn construct_then_flow_on_the_document() {
    let tmp = tempfile::tempdir().unwrap();
    let c = config(
        tmp.path(),
        "c.toml",
        "schema_version = 1\ncurve = { kind = \"named\", family = \"inverse_square\" }\ngrid = { t_end = 10.0, cells = 200 }\n",
    );
    let built = tmp.path().join("built");
    let o = decaylab(&["construct", "--config", &c], &built);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    for f in ["objective.csv", "objective.json", "curve.json", "flow.csv", "reports.csv"] {
        assert!(built.join(f).exists(), "{f}");
    }
    let doc = built.join("objective.json");
    let f = config(
        tmp.path(),
        "f.toml",
        &format!("schema_version = 1\nt_end = 10.0\n[objective]\nkind = \"document\"\npath = {:?}\n", doc.to_str().unwrap()),
    );
    let o = decaylab(&["flow", "--config", &f], &tmp.path().join("flow"));
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let traj = read(tmp.path().join("flow/trajectory.csv"));
    let last: Vec<f64> = traj.lines().last().unwrap().split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!(last[0], 10.0);
    let g = 1.0 / 121.0;
    assert!((last[2] - g).abs() < 1e-5 * g, "f = {} vs g = {g}", last[2]);
}

#[test]
fn out_dir_from_environment() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("env-out");
    let o = Command::new(env!("CARGO_BIN_EXE_decaylab"))
        .arg("majorize")
        .env("DECAYLAB_OUT", &out)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(out.join("map.txt").exists());
}

#[test]
fn verify_all_subset() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = config(tmp.path(), "v.toml", "schema_version = 1\nonly = [\"gd\", \"realization\"]\n");
    let o = decaylab(&["verify-all", "--config", &cfg], tmp.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let s = read(tmp.path().join("summary.csv"));
    let ids: Vec<&str> = s.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(ids, ["realization", "gd"]);
    assert!(s.lines().skip(1).all(|l| l.split(',').nth(1) == Some("pass")));

    let bad = config(tmp.path(), "w.toml", "schema_version = 1\nonly = [\"nope\"]\n");
    assert_eq!(decaylab(&["verify-all", "--config", &bad], tmp.path()).status.code(), Some(3));
}

#[test]
fn heavy_ball_no_minimizer_lower_bound() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = config(
        tmp.path(),
        "h.toml",
        r#"schema_version = 1
alpha = 3.0
[objective]
kind = "realized"
construction = "heavy_ball"
curve = { kind = "named", family = "shifted_power", params = { power = 1.0 } }
grid = { t_end = 200.0, cells = 4000 }
[method]
kind = "ode"
t_start = 1e-6
t_end = 50.0
schedule = { kind = "uniform", dt = 0.05 }
"#,
    );
    let o = decaylab(&["heavyball", "--config", &cfg], tmp.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let r = read(tmp.path().join("reports.csv"));
    assert!(r.contains("hb_speed,pass") && r.contains("hb_travel_lower_bound,pass"), "{r}");
}
