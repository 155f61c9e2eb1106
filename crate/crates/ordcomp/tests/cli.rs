use std::path::{Path, PathBuf};
use std::process::Command;

use ordcomp::format::{read_function, Function};
use ordcomp_core::pw::Piecewise;
use serde_json::Value;
use tempfile::TempDir;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn run_in(dir: &Path, args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_ordcomp"))
        .args(args)
        .current_dir(dir)
        .env_remove("ORDCOMP_THREADS")
        .output()
        .expect("binary runs");
    Run {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn json(s: &str) -> Value {
    serde_json::from_str(s).unwrap_or_else(|e| panic!("not JSON ({e}): {s}"))
}

fn num(v: &Value) -> f64 {
    v.as_f64().unwrap_or_else(|| panic!("not a number: {v}"))
}

fn put(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn grid_csv(lo: f64, hi: f64, values: &[String]) -> String {
    format!("1,{},{lo},{hi}\n{}\n", values.len(), values.join("\n"))
}

fn grid_values(path: &Path) -> Vec<f64> {
    let Function::Grid(g) = read_function(path).unwrap() else { panic!("expected grid") };
    g.values().iter().map(|v| v.get()).collect()
}

/// `max(0, 1 - n|x|)` on [-1, 1] as piecewise linear JSON.
fn tent_json(n: f64) -> String {
    let w = 1.0 / n;
    let mut cuts = vec![-1.0, -w, 0.0, w, 1.0];
    cuts.dedup();
    let cells: Vec<String> = cuts
        .windows(2)
        .map(|c| {
            let m = 0.5 * (c[0] + c[1]);
            let (a, b) = if m.abs() >= w {
                (0.0, 0.0)
            } else if m < 0.0 {
                (1.0, n)
            } else {
                (1.0, -n)
            };
            format!(r#"{{"lo":[{}],"hi":[{}],"center":[0],"coeffs":{{"0":{a},"1":{b}}}}}"#, c[0], c[1])
        })
        .collect();
    format!(r#"{{"domain":{{"lo":[-1],"hi":[1]}},"cells":[{}]}}"#, cells.join(","))
}

/// `c x^k` on [0, 1].
fn monomial_json(c: f64, k: u32) -> String {
    format!(r#"{{"domain":{{"lo":[0],"hi":[1]}},"cells":[{{"lo":[0],"hi":[1],"center":[0],"coeffs":{{"{k}":{c}}}}}]}}"#)
}

fn eval_file(path: &Path, x: f64) -> f64 {
    match read_function(path).unwrap() {
        Function::Poly(p) => p.eval_nlsc(&[x]).unwrap(),
        Function::Expr(e) => e.eval_nlsc(&[x]).unwrap(),
        Function::Grid(_) => panic!("expected a piecewise function"),
    }
}

#[test]
fn regularize_removes_a_spike() {
    let d = TempDir::new().unwrap();
    put(d.path(), "spike.csv", "1,5,0,4\n0\n0\n5\n0\n0\n");
    let r = run_in(
        d.path(),
        &["regularize", "--input", "spike.csv", "--out", "out.csv", "--r-inner", "1", "--r-outer", "2"],
    );
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(r.stdout.trim(), "changed 1 of 5 nodes");
    assert_eq!(grid_values(&d.path().join("out.csv")), vec![0.0; 5]);
}

#[test]
fn regularize_keeps_constants_byte_for_byte() {
    let d = TempDir::new().unwrap();
    put(d.path(), "c.csv", &grid_csv(0.0, 1.0, &vec!["0.1".to_string(); 7]));
    let r = run_in(d.path(), &["regularize", "--input", "c.csv", "--out", "a.csv"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(r.stdout.trim(), "changed 0 of 7 nodes");
    assert_eq!(grid_values(&d.path().join("a.csv")), vec![0.1; 7]);
    let r = run_in(d.path(), &["regularize", "--input", "a.csv", "--out", "b.csv"]);
    assert_eq!(r.code, 0);
    let a = std::fs::read(d.path().join("a.csv")).unwrap();
    assert_eq!(a, std::fs::read(d.path().join("b.csv")).unwrap());
}

#[test]
fn malformed_header_is_an_input_error_on_line_one() {
    let d = TempDir::new().unwrap();
    put(d.path(), "bad.csv", "one,5,0,4\n0\n0\n0\n0\n0\n");
    let r = run_in(d.path(), &["regularize", "--input", "bad.csv", "--out", "out.csv"]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("line 1"), "{}", r.stderr);
    assert!(!d.path().join("out.csv").exists());
}

#[test]
fn missing_value_line_is_reported() {
    let d = TempDir::new().unwrap();
    put(d.path(), "bad.csv", "1,3,0,1\n0\nx\n0\n");
    let r = run_in(d.path(), &["regularize", "--input", "bad.csv", "--out", "out.csv"]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("line 3"), "{}", r.stderr);
}

#[test]
fn sup_of_tents_from_files_is_the_widest_tent() {
    let d = TempDir::new().unwrap();
    for n in [1, 2, 4] {
        put(d.path(), &format!("t{n}.json"), &tent_json(n as f64));
    }
    let r = run_in(d.path(), &["sup", "--inputs", "t1.json,t2.json,t4.json", "--out", "s.json"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let rep = json(&r.stdout);
    assert_eq!(rep["mode"], "exact");
    assert_eq!(rep["op"], "sup");
    assert_eq!(num(&rep["max_above_envelope"]), 0.0);
    assert_eq!(num(&rep["max_below_envelope"]), 0.0);
    for k in 0..=200 {
        let x = -1.0 + k as f64 / 100.0;
        assert_eq!(eval_file(&d.path().join("s.json"), x), (1.0 - x.abs()).max(0.0), "x = {x}");
    }
}

#[test]
fn singleton_sup_and_inf() {
    let d = TempDir::new().unwrap();
    put(d.path(), "c.json", &monomial_json(2.5, 0));
    for op in ["sup", "inf"] {
        let r = run_in(d.path(), &[op, "--inputs", "c.json", "--out", "o.json"]);
        assert_eq!(r.code, 0, "{}", r.stderr);
        assert_eq!(eval_file(&d.path().join("o.json"), 0.3), 2.5);
    }
}

#[test]
fn grid_sup_with_an_infinite_member_is_rejected() {
    let d = TempDir::new().unwrap();
    let mut names = Vec::new();
    for c in 1..=3 {
        let name = format!("c{c}.csv");
        put(d.path(), &name, &grid_csv(0.0, 1.0, &vec![c.to_string(); 9]));
        names.push(name);
    }
    put(d.path(), "cap.csv", &grid_csv(0.0, 1.0, &vec!["inf".to_string(); 9]));
    let r = run_in(d.path(), &["sup", "--inputs", &names.join(","), "--out", "ok.csv"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(json(&r.stdout)["mode"], "grid");
    assert_eq!(grid_values(&d.path().join("ok.csv")), vec![3.0; 9]);
    names.push("cap.csv".into());
    let r = run_in(d.path(), &["sup", "--inputs", &names.join(","), "--out", "bad.csv"]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("nearly finite"), "{}", r.stderr);
}

#[test]
fn grid_inf_of_shrinking_tents_is_zero() {
    let d = TempDir::new().unwrap();
    let mut names = Vec::new();
    for n in [1.0f64, 2.0, 4.0, 8.0] {
        let vals: Vec<String> =
            (0..9).map(|i| (1.0 - n * (-1.0 + i as f64 / 4.0).abs()).max(0.0).to_string()).collect();
        let name = format!("t{n}.csv");
        put(d.path(), &name, &grid_csv(-1.0, 1.0, &vals));
        names.push(name);
    }
    let r = run_in(d.path(), &["inf", "--inputs", &names.join(","), "--out", "i.csv"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(grid_values(&d.path().join("i.csv")), vec![0.0; 9]);
}

#[test]
fn inf_of_x_and_x_squared_is_x_squared() {
    let d = TempDir::new().unwrap();
    put(d.path(), "x.json", &monomial_json(1.0, 1));
    put(d.path(), "x2.json", &monomial_json(1.0, 2));
    let r = run_in(d.path(), &["inf", "--inputs", "x.json,x2.json", "--out", "i.json"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    for k in 0..=10 {
        let t = k as f64 / 10.0;
        assert_eq!(eval_file(&d.path().join("i.json"), t), t * t);
    }
}

#[test]
fn mixed_formats_are_rejected() {
    let d = TempDir::new().unwrap();
    put(d.path(), "x.json", &monomial_json(1.0, 1));
    put(d.path(), "g.csv", &grid_csv(0.0, 1.0, &vec!["0".to_string(); 3]));
    let r = run_in(d.path(), &["sup", "--inputs", "x.json,g.csv", "--out", "o"]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("mix"), "{}", r.stderr);
}

#[test]
fn leq_verdicts() {
    let d = TempDir::new().unwrap();
    put(d.path(), "x.json", &monomial_json(1.0, 1));
    put(d.path(), "x2.json", &monomial_json(1.0, 2));
    let r = run_in(d.path(), &["leq", "--f", "x2.json", "--g", "x.json", "--density", "7"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(json(&r.stdout)["verdict"], "holds");
    let r = run_in(d.path(), &["leq", "--f", "x.json", "--g", "x2.json", "--density", "1"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v = json(&r.stdout);
    assert_eq!(v["verdict"], "counterexample");
    assert_eq!(num(&v["point"][0]), 0.5);
    assert_eq!(num(&v["gap"]), 0.25);
}

#[test]
fn converge_verdicts_from_files() {
    let d = TempDir::new().unwrap();
    let powers: Vec<String> = (1..=32)
        .map(|k| {
            let n = format!("p{k}.json");
            put(d.path(), &n, &monomial_json(1.0, k));
            n
        })
        .collect();
    put(d.path(), "zero.json", &monomial_json(0.0, 0));
    let r = run_in(d.path(), &["converge", "--inputs", &powers.join(","), "--candidate", "zero.json"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v = json(&r.stdout);
    assert_eq!(v["verdict"], "converged", "{v}");
    assert_eq!(v["truncation"], 32);
    assert!(num(&v["limit_gap"]) <= 1e-7);

    let consts: Vec<String> = (0..5)
        .map(|i| {
            let n = format!("c{i}.json");
            put(d.path(), &n, &monomial_json(1.5, 0));
            n
        })
        .collect();
    let r = run_in(d.path(), &["converge", "--inputs", &consts.join(","), "--candidate", "c0.json"]);
    let v = json(&r.stdout);
    assert_eq!(v["verdict"], "converged");
    assert_eq!(num(&v["residual"]), 0.0);

    put(d.path(), "plus.json", &monomial_json(1.0, 0));
    put(d.path(), "minus.json", &monomial_json(-1.0, 0));
    let alt: Vec<&str> = (1..=16).map(|n| if n % 2 == 0 { "plus.json" } else { "minus.json" }).collect();
    let r = run_in(d.path(), &["converge", "--inputs", &alt.join(","), "--candidate", "zero.json"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v = json(&r.stdout);
    assert_eq!(v["verdict"], "not_converged");
    assert_eq!(v["reason"], "gap_too_large");
    assert_eq!(num(&v["limit_gap"]), 2.0);
}

#[test]
fn grid_powers_converge_with_a_discretization_slack() {
    let d = TempDir::new().unwrap();
    let names: Vec<String> = (1..=32)
        .map(|k| {
            let vals: Vec<String> = (0..=512).map(|i| (i as f64 / 512.0).powi(k).to_string()).collect();
            let n = format!("p{k}.csv");
            put(d.path(), &n, &grid_csv(0.0, 1.0, &vals));
            n
        })
        .collect();
    put(d.path(), "zero.csv", &grid_csv(0.0, 1.0, &vec!["0".to_string(); 513]));
    let r = run_in(d.path(), &["converge", "--inputs", &names.join(","), "--candidate", "zero.csv", "--slack", "0.25"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v = json(&r.stdout);
    assert_eq!(v["verdict"], "converged", "{v}");
    assert_eq!(v["mode"], "grid");
}

#[test]
fn chain_check_from_files() {
    let d = TempDir::new().unwrap();
    let n = 64;
    let mut lo = Vec::new();
    let mut hi = Vec::new();
    let mut hi2 = Vec::new();
    let mut zero = Vec::new();
    for k in 1..=n {
        let k = k as f64;
        lo.push(put(d.path(), &format!("l{k}.json"), &monomial_json(-1.0 / k, 0)).display().to_string());
        hi.push(put(d.path(), &format!("h{k}.json"), &monomial_json(1.0 / k, 0)).display().to_string());
        hi2.push(put(d.path(), &format!("g{k}.json"), &monomial_json(1.0 + 1.0 / k, 0)).display().to_string());
        zero.push(put(d.path(), "z.json", &monomial_json(0.0, 0)).display().to_string());
    }
    let r = run_in(
        d.path(),
        &["chain-check", "--lo", &lo.join(","), "--hi", &hi.join(","), "--box", "0:0.5", "--box", "0.25:1"],
    );
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v = json(&r.stdout);
    for b in v["boxes"].as_array().unwrap() {
        assert_eq!(b["verdict"], "pinched", "{b}");
        assert!(num(&b["raw_gap"]) <= 2.0 / n as f64 + 1e-12);
        assert!(b["values"].as_array().unwrap().iter().all(|x| num(x).abs() <= 1e-7));
    }
    let r = run_in(d.path(), &["chain-check", "--lo", &zero.join(","), "--hi", &hi2.join(",")]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v = json(&r.stdout);
    let b = &v["boxes"][0];
    assert_eq!(b["verdict"], "gap");
    assert!((num(&b["limit_gap"]) - 1.0).abs() <= 1e-9, "{b}");
}

#[test]
fn solve_constant_target_has_margin_one_twentieth() {
    let d = TempDir::new().unwrap();
    let r = run_in(
        d.path(),
        &[
            "solve",
            "--equations",
            "dx(u) = g",
            "--rhs",
            "g=1",
            "--domain",
            "0:1",
            "--eps",
            "0.1",
            "--out",
            "s.json",
            "--dump",
            "d.csv",
        ],
    );
    assert_eq!(r.code, 0, "{}", r.stderr);
    let s = json(&std::fs::read_to_string(d.path().join("s.json")).unwrap());
    assert_eq!(s["certificate"]["pass"], true);
    assert!((num(&s["certificate"]["worst_margin"]) - 0.05).abs() < 1e-12);
    assert_eq!(s["config"]["eps"], 0.1);
    let dump = std::fs::read_to_string(d.path().join("d.csv")).unwrap();
    let mut lines = dump.lines();
    assert_eq!(lines.next(), Some("x1,component,residual,band_lo,band_hi"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|t| t.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), s["certificate"]["total_samples"].as_u64().unwrap() as usize);
    for row in rows {
        assert!(row[3] < row[2] && row[2] < row[4], "{row:?}");
    }
}

#[test]
fn solve_with_an_unreachable_target_fails_with_the_cell() {
    let d = TempDir::new().unwrap();
    let r = run_in(
        d.path(),
        &["solve", "--equations", "(dx(u))^2 = g", "--rhs", "g=-1", "--domain", "0:1", "--eps", "0.1"],
    );
    assert_eq!(r.code, 3, "{}", r.stderr);
    let v = json(&r.stdout);
    assert_eq!(v["error"], "no_jet_found");
    assert_eq!(num(&v["point"][0]), 0.5);
}

#[test]
fn solve_without_eps_is_an_input_error() {
    let d = TempDir::new().unwrap();
    let r = run_in(d.path(), &["solve", "--equations", "dx(u) = g", "--rhs", "g=1", "--domain", "0:1"]);
    assert_eq!(r.code, 2);
    let r = run_in(d.path(), &["solve", "--equations", "dx(u) +", "--domain", "0:1", "--eps", "0.1"]);
    assert_eq!(r.code, 2);
    let r = run_in(d.path(), &["solve", "--equations", "dx(u) = g", "--domain", "0:1", "--eps", "0.1"]);
    assert_eq!(r.code, 2, "unbound right-hand side");
}

#[test]
fn solution_sequence_emits_every_term_and_a_witness() {
    let d = TempDir::new().unwrap();
    let r = run_in(
        d.path(),
        &[
            "solve",
            "--equations",
            "dx(u) = g",
            "--rhs",
            "g=cos(5*x1)",
            "--domain",
            "0:1",
            "--n-list",
            "2,4,8,16",
            "--out",
            "seq.json",
        ],
    );
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v = json(&std::fs::read_to_string(d.path().join("seq.json")).unwrap());
    let sols = v["solutions"].as_array().unwrap();
    assert_eq!(sols.len(), 4);
    for (s, n) in sols.iter().zip([2.0, 4.0, 8.0, 16.0]) {
        assert_eq!(num(&s["eps"]), 1.0 / n);
        assert_eq!(s["certificate"]["pass"], true);
    }
    assert_eq!(v["convergence"][0]["verdict"], "converged", "{}", v["convergence"]);
    assert_eq!(v["chains"][0]["verdict"], "pinched");
}

#[test]
fn verify_rechecks_a_written_solution() {
    let d = TempDir::new().unwrap();
    let r = run_in(
        d.path(),
        &[
            "solve",
            "--equations",
            "dx(u) = g",
            "--rhs",
            "g=cos(5*x1)",
            "--domain",
            "0:1",
            "--eps",
            "0.05",
            "--out",
            "s.json",
        ],
    );
    assert_eq!(r.code, 0, "{}", r.stderr);
    let r = run_in(d.path(), &["verify", "--solution", "s.json", "--density", "16", "--seed", "99"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(json(&r.stdout)["pass"], true);
    let r = run_in(d.path(), &["verify", "--solution", "s.json", "--eps", "0.001"]);
    assert_eq!(r.code, 3);
    assert_eq!(json(&r.stdout)["pass"], false);
    put(d.path(), "broken.json", "{\n  \"problem\": 3\n}\n");
    let r = run_in(d.path(), &["verify", "--solution", "broken.json"]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("line 2"), "{}", r.stderr);
}

#[test]
fn demo_ns_passes_with_residuals_in_the_band() {
    let d = TempDir::new().unwrap();
    let r =
        run_in(d.path(), &["demo-ns", "--out", "ns.json", "--dump", "ns.csv", "--verify-density", "3", "--seed", "7"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v = json(&r.stdout);
    assert_eq!(v["pass"], true);
    assert_eq!(v["cells"], 16);
    assert_eq!(num(&v["initial_defect"]), 0.0);
    assert_eq!(v["verification_pass"], true);
    for band in v["momentum"].as_array().unwrap().iter().chain([&v["divergence"]]) {
        assert!(num(&band[0]) > -0.25 && num(&band[1]) < 0.0, "{band}");
    }
    assert!(r.stderr.contains("cells in"));
    let dump = std::fs::read_to_string(d.path().join("ns.csv")).unwrap();
    assert!(dump.starts_with("x1,x2,x3,t,component,residual,band_lo,band_hi\n"));
    for line in dump.lines().skip(1) {
        let r: f64 = line.split(',').nth(5).unwrap().parse().unwrap();
        assert!(-0.25 < r && r < 0.0, "{line}");
    }
}

#[test]
fn demo_ns_with_a_thin_band_exhausts_depth() {
    let d = TempDir::new().unwrap();
    let r = run_in(d.path(), &["demo-ns", "--eps", "1e-6", "--max-depth", "2"]);
    assert_eq!(r.code, 3, "{}", r.stderr);
    assert_eq!(json(&r.stdout)["error"], "depth_exhausted");
}

#[test]
fn demo_ns_rejects_compressible_initial_data() {
    let d = TempDir::new().unwrap();
    let r = run_in(d.path(), &["demo-ns", "--u0", "u1=x1,u2=0,u3=0"]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("divergence"), "{}", r.stderr);
}

#[test]
fn quiescent_demo_uses_the_zero_target_jet_away_from_t0() {
    let d = TempDir::new().unwrap();
    let r = run_in(d.path(), &["demo-ns", "--u0", "u1=0,u2=0,u3=0", "--out", "q.json"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v = json(&std::fs::read_to_string(d.path().join("q.json")).unwrap());
    let labels: Vec<&str> = v["jet_labels"].as_array().unwrap().iter().map(|l| l.as_str().unwrap()).collect();
    let expected = ["u1:0,0,0,1", "u2:0,0,0,1", "u3:0,0,0,1", "u1:1,0,0,0"];
    let mut later = 0;
    for cell in v["certificate"]["cells"].as_array().unwrap() {
        if cell["initial"] == true {
            continue;
        }
        later += 1;
        for (label, x) in labels.iter().zip(cell["jet"].as_array().unwrap()) {
            let want = if expected.contains(label) { -0.125 } else { 0.0 };
            assert_eq!(num(x), want, "{label}");
        }
    }
    assert_eq!(later, 8);
}

#[test]
fn output_does_not_depend_on_thread_count() {
    let d = TempDir::new().unwrap();
    let mut outs = Vec::new();
    for t in ["1", "3"] {
        let r = run_in(
            d.path(),
            &["--threads", t, "demo-ns", "--max-depth", "4", "--eps", "0.1", "--out", "ns.json", "--dump", "ns.csv"],
        );
        assert_eq!(r.code, 0, "{}", r.stderr);
        outs.push((
            std::fs::read(d.path().join("ns.json")).unwrap(),
            std::fs::read(d.path().join("ns.csv")).unwrap(),
            r.stdout,
        ));
    }
    let solve = [
        "solve",
        "--equations",
        "dx(u) = g",
        "--rhs",
        "g=cos(5*x1)",
        "--domain",
        "0:1",
        "--eps",
        "0.01",
        "--out",
        "s.json",
    ];
    let status = Command::new(env!("CARGO_BIN_EXE_ordcomp"))
        .args(solve)
        .current_dir(d.path())
        .env("ORDCOMP_THREADS", "2")
        .stdout(std::process::Stdio::null())
        .status()
        .unwrap();
    assert!(status.success());
    let first = std::fs::read(d.path().join("s.json")).unwrap();
    let mut single = vec!["--threads", "1"];
    single.extend(solve);
    assert_eq!(run_in(d.path(), &single).code, 0);
    assert_eq!(first, std::fs::read(d.path().join("s.json")).unwrap());
    assert!(outs[0] == outs[1], "thread count changed the output");
}

#[test]
fn config_file_is_overridden_by_flags() {
    let d = TempDir::new().unwrap();
    put(d.path(), "run.cfg", "# a 1D run\nequations = dx(u) = g\nrhs = g=1\ndomain = 0:1\neps = 0.5\nout = cfg.json\n");
    let r = run_in(d.path(), &["solve", "--config", "run.cfg", "--eps", "0.1"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let s = json(&std::fs::read_to_string(d.path().join("cfg.json")).unwrap());
    assert_eq!(num(&s["eps"]), 0.1);
    let r = run_in(d.path(), &["solve", "--config", "run.cfg"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let s = json(&std::fs::read_to_string(d.path().join("cfg.json")).unwrap());
    assert_eq!(num(&s["eps"]), 0.5);
    put(d.path(), "bad.cfg", "eps 0.1\n");
    let r = run_in(d.path(), &["solve", "--config", "bad.cfg"]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("line 1"), "{}", r.stderr);
}

#[test]
fn reruns_are_bitwise_identical() {
    let d = TempDir::new().unwrap();
    let args = [
        "solve",
        "--equations",
        "dxx1(u) + dxx2(u) = g",
        "--rhs",
        "g=sin(x1)*x2",
        "--domain",
        "0,0:1,1",
        "--eps",
        "0.2",
        "--out",
        "o.json",
    ];
    assert_eq!(run_in(d.path(), &args).code, 0);
    let first = std::fs::read(d.path().join("o.json")).unwrap();
    assert_eq!(run_in(d.path(), &args).code, 0);
    assert_eq!(first, std::fs::read(d.path().join("o.json")).unwrap());
}
