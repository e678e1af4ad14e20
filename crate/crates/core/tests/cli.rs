use std::process::Command;

use primroot::cli::run;

fn bin(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_primroot")).args(args).output().unwrap();
    (out.status.code().unwrap_or(-1), String::from_utf8(out.stdout).unwrap())
}

#[test]
fn spectrum_lines() {
    let (code, out) = bin(&["spectrum", "45"]);
    assert_eq!(code, 0);
    assert_eq!(out, "1 1\n2 3\n3 2\n4 4\n6 6\n12 8\n");
}

#[test]
fn certificate_round_trip_through_files() {
    let dir = std::env::temp_dir().join(format!("primroot-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("cert.txt");
    let path_s = path.to_str().unwrap();
    let (code, out) = bin(&["lucas", "1000003", "--seed", "3", "--cert-out", path_s]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("prime"));
    let (code, out) = bin(&["verify-cert", path_s, "--strict"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("valid"));

    let text = std::fs::read_to_string(&path).unwrap().replace("a = ", "a = 1\n# ");
    let bad = dir.join("bad.txt");
    std::fs::write(&bad, text).unwrap();
    let (code, _) = bin(&["verify-cert", bad.to_str().unwrap()]);
    assert_ne!(code, 0);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn composite_exit_codes() {
    assert_eq!(bin(&["lucas", "91", "--seed", "1"]).0, 2);
    let (code, _) = bin(&["lucas", "1729", "--seed", "5"]);
    assert!(code == 2 || code == 3);
}

#[test]
fn primroot_algorithms_and_formats() {
    for alg in ["algorithm1", "heuristic2", "algorithm3"] {
        let (code, out, err) = run(&["primroot", "1000003", "--algorithm", alg, "--seed", "2"]);
        assert_eq!(code, 0, "{alg}: {err}");
        assert!(out.contains("g = "), "{out}");
    }
    let (code, out, _) = run(&["primroot", "1000003", "--seed", "2", "--output", "csv"]);
    assert_eq!(code, 0);
    let mut lines = out.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert!(header.contains(&"certified_success") && header.contains(&"seed"));
    assert!(lines.next().is_some());
}

#[test]
fn genparam_and_bench() {
    let (code, out, err) = run(&["genparam", "64", "--seed", "1", "--output", "structured"]);
    assert_eq!(code, 0, "{err}");
    let v: serde_json::Value = serde_json::from_str(out.trim()).unwrap();
    assert!(v.get("p").is_some() && v.get("g").is_some());

    let (code, out, _) = run(&["bench", "sweep", "--floor-bits", "20", "--max-omega", "2", "--samples", "2"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("bits_of_q,omega,exact_failure,bound_failure\n"));
    assert_eq!(out.lines().count(), 5);

    let (code, out, _) = run(&["bench", "timing", "--bits", "32", "--algorithms", "heuristic2", "--reps", "2"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("bits,algorithm,median_ms,p90_ms\n32,heuristic2,"));
}
