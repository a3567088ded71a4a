use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn cone2d(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cone2d")).args(args).env_remove("CONE2D_TOL").output().unwrap()
}

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("stdout is not a report ({e}): {}", String::from_utf8_lossy(&out.stdout)))
}

struct Fixture {
    dir: TempDir,
}

impl Fixture {
    fn new() -> Self {
        Fixture { dir: TempDir::new().unwrap() }
    }

    fn file(&self, name: &str, body: &str) -> String {
        write(self.dir.path(), name, body).display().to_string()
    }
}

const PARABOLA: &str = r#"{"n":1,"terms":[{"coeff":"1","exp":[0]},{"coeff":"-1","exp":[2]}]}"#;

#[test]
fn valid_polynomial_is_accepted() {
    let fx = Fixture::new();
    let f = fx.file("f.json", PARABOLA);
    let out = cone2d(&["norms", "--poly", &f, "--point", "0.5", "--point", "-2"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&out);
    assert_eq!(r["result"]["rho"][0]["rho"], 0.75);
    assert_eq!(r["result"]["rho"][1]["rho"], 3.0);
    assert_eq!(r["inputs"][0]["sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn duplicate_exponent_is_a_named_parse_error() {
    let fx = Fixture::new();
    let f = fx.file("dup.json", r#"{"n":1,"terms":[{"coeff":1.0,"exp":[2]},{"coeff":2.0,"exp":[2]}]}"#);
    let out = cone2d(&["norms", "--poly", &f, "--point", "0"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("duplicate exponent vector [2]"), "{err}");
    assert!(out.stdout.is_empty());
}

#[test]
fn malformed_json_reports_position() {
    let fx = Fixture::new();
    let f = fx.file("bad.json", "{\"n\":1,\n\"terms\":[}");
    let out = cone2d(&["norms", "--poly", &f]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2"), "{err}");
}

#[test]
fn region_sample_outside_inequality_is_an_invariant_error() {
    let fx = Fixture::new();
    let f = fx.file("f.json", PARABOLA);
    let ok =
        fx.file("ok.json", &format!(r#"{{"n":1,"box":[[-2,2]],"ineqs":[{PARABOLA}],"points":[[0.0],[0.5],[-1.0]]}}"#));
    let out = cone2d(&["norms", "--poly", &f, "--region", &ok]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(report(&out)["result"]["sup"]["value"], 1.0);

    let bad = fx.file("bad.json", &format!(r#"{{"n":1,"box":[[-2,2]],"ineqs":[{PARABOLA}],"points":[[0.0],[1.5]]}}"#));
    let out = cone2d(&["norms", "--poly", &f, "--region", &bad]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("samples satisfy every inequality"), "{err}");
    assert!(err.contains("bad.json"), "{err}");
}

#[test]
fn tk_on_nonnegative_instance_succeeds() {
    let fx = Fixture::new();
    let f = fx.file("f.json", PARABOLA);
    let pts = fx.file("pts.json", "[[0.0],[0.5],[-0.25]]");
    let out = cone2d(&["approx", "tk", "--poly", &f, "--points", &pts, "--d", "2", "--eps", "1e-3"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&out);
    let cert = &r["result"]["certificate"];
    assert_eq!(cert["kind"], "tk");
    assert_eq!(cert["success"], true);
    assert_eq!(cert["decomposition"]["form"], "scaled_power");
    for p in cert["residuals"]["points"].as_array().unwrap() {
        assert!(p["residual"].as_f64().unwrap() < 1e-3);
    }
}

#[test]
fn tk_on_negative_point_exits_one_with_witness() {
    let fx = Fixture::new();
    let f = fx.file("f.json", PARABOLA);
    let pts = fx.file("pts.json", "[[0.0],[2.0]]");
    let out = cone2d(&["approx", "tk", "--poly", &f, "--points", &pts, "--d", "1", "--eps", "1e-3"]);
    assert_eq!(out.status.code(), Some(1));
    let r = report(&out);
    assert_eq!(r["exit_code"], 1);
    assert_eq!(r["result"]["verdict"], "non-membership");
    assert_eq!(r["result"]["witness"]["point"][0], 2.0);
    assert_eq!(r["result"]["witness"]["value"], -3.0);
}

#[test]
fn missing_file_exits_two() {
    let out = cone2d(&[
        "approx",
        "tk",
        "--poly",
        "/no/such/f.json",
        "--points",
        "/no/such/p.json",
        "--d",
        "1",
        "--eps",
        "0.1",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("/no/such/f.json"));
}

#[test]
fn reports_are_byte_identical_without_timestamps() {
    let fx = Fixture::new();
    let m = fx.file(
        "l.json",
        r#"{"n":1,"D":4,"moments":[{"exp":[0],"val":1.0},{"exp":[1],"val":0.0},{"exp":[2],"val":0.5},{"exp":[3],"val":0.0},{"exp":[4],"val":0.4}]}"#,
    );
    let args = ["--no-timestamp", "--seed", "7", "moments", "check", "--moments", &m, "--d", "1", "--trials", "50"];
    let a = cone2d(&args);
    let b = cone2d(&args);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let r = report(&a);
    assert!(r.get("wall_time_ms").is_none());
    assert_eq!(r["seed"], 7);

    let timed = cone2d(&["moments", "check", "--moments", &m]);
    assert!(report(&timed).get("wall_time_ms").is_some());
}

#[test]
fn env_tolerance_is_reported() {
    let fx = Fixture::new();
    let pts = fx.file("pts.json", "[[1,0],[0,1],[-1,0],[0,-1],[0.6,0.8],[0.8,-0.6]]");
    let out = Command::new(env!("CARGO_BIN_EXE_cone2d"))
        .args(["--no-timestamp", "spectrum", "hausdorff", "--points", &pts, "--degree", "2"])
        .env("CONE2D_TOL", "1e-7")
        .output()
        .unwrap();
    // six points on the circle all lie on x^2 + y^2 - 1
    assert_eq!(out.status.code(), Some(1));
    let r = report(&out);
    assert_eq!(r["tolerance"], 1e-7);
    assert_eq!(r["result"]["kernel_dimension"], 1);

    let bad = Command::new(env!("CARGO_BIN_EXE_cone2d"))
        .args(["spectrum", "hausdorff", "--points", &pts, "--degree", "2"])
        .env("CONE2D_TOL", "lots")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn summary_goes_to_stderr() {
    let fx = Fixture::new();
    let k = fx.file("k.json", r#"{"n":1,"box":[[-3,3]]}"#);
    let out = cone2d(&["--summary", "compare", "--region", &k]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("from k = 7"));
    assert_eq!(report(&out)["result"]["threshold"], 7);
}

#[test]
fn moment_subcommands() {
    let fx = Fixture::new();
    let mu = fx.file("mu.json", r#"{"kind":"uniform","box":[[-1,1]]}"#);
    let out = cone2d(&["moments", "from-measure", "--measure", &mu, "--degree", "8"]);
    assert_eq!(out.status.code(), Some(0));
    let l = fx.file("l.json", &report(&out)["result"].to_string());
    let k = fx.file("k.json", r#"{"n":1,"box":[[-1,1]],"resolution":0.01}"#);
    let out = cone2d(&["moments", "recover", "--moments", &l, "--region", &k, "--tol", "1e-6"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(report(&out)["result"]["residual"].as_f64().unwrap() < 1e-6);

    let phi = fx.file("phi.json", r#"{"kind":"constant"}"#);
    let out = cone2d(&["moments", "continuity", "--moments", &l, "--phi", &phi]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["result"]["constant"], 1.0);

    let neg = fx.file(
        "neg.json",
        r#"{"n":1,"D":2,"moments":[{"exp":[0],"val":1.0},{"exp":[1],"val":0.0},{"exp":[2],"val":-1.0}]}"#,
    );
    let out = cone2d(&["moments", "check", "--moments", &neg]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(report(&out)["result"]["hankel"]["psd"], false);
}

#[test]
fn approx_and_witness_subcommands() {
    let fx = Fixture::new();
    let x = fx.file("x.json", r#"{"n":1,"terms":[{"coeff":"1","exp":[1]}]}"#);
    let pts = fx.file("pts.json", "[[-1],[1],[2]]");
    let out = cone2d(&["approx", "module", "--poly", &x, "--generator", &x, "--points", &pts, "--d", "1"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));

    let out = cone2d(&["approx", "module", "--poly", &x, "--points", &pts, "--d", "1"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(report(&out)["result"]["verdict"], "module-contradiction");

    let phi = fx.file("phi.json", r#"{"kind":"constant"}"#);
    let out = cone2d(&["approx", "series", "--poly", &x, "--r", "2", "--d", "1", "--terms", "20", "--phi", &phi]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let out = cone2d(&["approx", "series", "--poly", &x, "--r", "1", "--d", "1", "--terms", "20", "--phi", &phi]);
    assert_eq!(out.status.code(), Some(2));

    let k = fx.file("k.json", r#"{"n":1,"box":[[0,1]],"resolution":0.001}"#);
    let wp = fx.file("wp.json", "[[0.1],[0.2],[0.3],[0.4],[0.5]]");
    let out = cone2d(&["witness", "--points", &wp, "--region", &k, "--eps", "0.01", "--degree", "15"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));

    let sq = fx.file("sq.json", r#"{"n":1,"terms":[{"coeff":"1","exp":[2]}]}"#);
    let k0 = fx.file("k0.json", r#"{"n":1,"box":[[0,0]]}"#);
    let out = cone2d(&["approx", "fattening", "--poly", &sq, "--region", &k0, "--eps", "0.1,0.01"]);
    assert_eq!(out.status.code(), Some(2));
    let out = cone2d(&["approx", "fattening", "--poly", &x, "--region", &k0, "--eps", "0.01,0.1"]);
    assert_eq!(out.status.code(), Some(1));
    let out = cone2d(&["approx", "fattening", "--poly", &sq, "--region", &k0, "--eps", "0.01,0.1"]);
    assert_eq!(out.status.code(), Some(0));

    let out = cone2d(&["spectrum", "kphi-box", "--phi", &phi, "--degree", "4", "--n", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let out = cone2d(&["spectrum", "kphi-contains", "--phi", &phi, "--point", "2,0", "--degree", "3"]);
    assert_eq!(out.status.code(), Some(1));
}
