use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn tripipe(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tripipe")).args(args).output().expect("spawn tripipe")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn count_generated_complete() {
    let out = tripipe(&["count", "--gen", "complete", "--n", "5"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "triangles: 10\n");
}

#[test]
fn count_file_per_responsible() {
    let dir = tempfile::tempdir().unwrap();
    let k3 = write(dir.path(), "k3.txt", "# triangle\n1 2\n2 3\n\n1 3\n");
    let out = tripipe(&["count", "--input", &k3, "--per-responsible"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "1: 1\n2: 0\ntotal: 1\n");
}

#[test]
fn count_is_scheduler_independent() {
    let expected = stdout(&tripipe(&["count", "--gen", "gnp", "--n", "60", "--p", "0.2", "--seed", "3"]));
    for extra in [["--threads", "3"], ["--capacity", "1"], ["--capacity", "unbounded"]] {
        let mut args = vec!["count", "--gen", "gnp", "--n", "60", "--p", "0.2", "--seed", "3"];
        args.extend(extra);
        assert_eq!(stdout(&tripipe(&args)), expected, "{extra:?}");
    }
}

#[test]
fn multiset_counts_repeated_lines() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "multi.txt", "a b\nb a\nb c\na c\n");
    let product = tripipe(&["count", "--input", &g, "--mode", "multiset"]);
    assert_eq!(stdout(&product), "triangles: 2\n");
    let set = tripipe(&["count", "--input", &g]);
    assert_eq!(stdout(&set), "triangles: 1\n");
}

#[test]
fn malformed_input_exits_2_with_line_number() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.txt", "1 2\n2 3 4\n");
    let out = tripipe(&["count", "--input", &bad]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("MalformedLine 2"));
}

#[test]
fn self_loop_rejected_in_set_mode() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "loop.txt", "1 2\n3 3\n");
    assert_eq!(tripipe(&["count", "--input", &bad]).status.code(), Some(2));
}

#[test]
fn missing_file_and_bad_usage_exit_2() {
    assert_eq!(tripipe(&["count", "--input", "/nonexistent/graph.txt"]).status.code(), Some(2));
    assert_eq!(tripipe(&["count"]).status.code(), Some(2));
    assert_eq!(tripipe(&["count", "--gen", "cycle", "--n", "2"]).status.code(), Some(2));
    assert_eq!(tripipe(&["count", "--gen", "gnp", "--n", "5", "--p", "1.5"]).status.code(), Some(2));
    assert_eq!(tripipe(&["count", "--gen", "path", "--n", "5", "--threads", "0"]).status.code(), Some(2));
}

#[test]
fn verify_passes_on_generated_graphs() {
    for args in [
        &["verify", "--gen", "complete", "--n", "8"][..],
        &["verify", "--gen", "gnp", "--n", "200", "--p", "0.05", "--seed", "42"][..],
    ] {
        let out = tripipe(args);
        let text = stdout(&out);
        assert!(out.status.success(), "{text}");
        assert!(!text.contains("FAIL"), "{text}");
        for check in ["lemma1", "lemma2", "lemma3", "oracle", "determinism"] {
            assert!(text.lines().any(|l| l.starts_with(check) && l.contains("PASS")), "{check} in {text}");
        }
    }
    assert!(stdout(&tripipe(&["verify", "--gen", "complete", "--n", "8"])).ends_with("total: 56\n"));
}

#[test]
fn baseline_closed_forms() {
    for (args, row) in [
        (["--gen", "star", "--n", "51"], ",51,50,1225,50,0"),
        (["--gen", "complete", "--n", "10"], ",10,45,360,45,120"),
        (["--gen", "path", "--n", "100"], ",100,99,98,99,0"),
    ] {
        let mut full = vec!["baseline"];
        full.extend(args);
        let text = stdout(&tripipe(&full));
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("graph,vertices,edges,mr_two_paths,pipeline_storage,triangles"));
        assert!(lines.next().unwrap().ends_with(row), "{text}");
    }
}

#[test]
fn generate_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.txt");
    let b = dir.path().join("b.txt");
    for path in [&a, &b] {
        let out = tripipe(&["generate", "--model", "gnp", "--n", "50", "--p", "0.1", "--seed", "9", "-o", path.to_str().unwrap()]);
        assert!(out.status.success());
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());

    let k4 = stdout(&tripipe(&["generate", "--model", "complete", "--n", "4"]));
    assert_eq!(k4.lines().count(), 6);
    assert_eq!(stdout(&tripipe(&["generate", "--model", "path", "--n", "1"])), "");
}

#[test]
fn generated_file_counts_like_generator() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.txt");
    tripipe(&["generate", "--model", "gnp", "--n", "40", "--p", "0.3", "--seed", "1", "-o", g.to_str().unwrap()]);
    assert_eq!(
        stdout(&tripipe(&["count", "--input", g.to_str().unwrap()])),
        stdout(&tripipe(&["count", "--gen", "gnp", "--n", "40", "--p", "0.3", "--seed", "1"])),
    );
}

#[test]
fn profile_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("profile.csv");
    let out = tripipe(&["profile", "--gen", "complete", "--n", "8", "-o", csv.to_str().unwrap()]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("max_fireable: 7") && text.contains("triangles: 56"), "{text}");
    let body = fs::read_to_string(&csv).unwrap();
    let mut lines = body.lines();
    assert_eq!(lines.next(), Some("step,fireable,live,round"));
    for (i, line) in lines.enumerate() {
        let fields: Vec<usize> = line.split(',').map(|f| f.parse().unwrap()).collect();
        assert_eq!(fields[0], i);
        assert!(fields[1] <= fields[2] && fields[1] <= 7);
    }

    let counted = dir.path().join("count.csv");
    let out = tripipe(&["count", "--gen", "complete", "--n", "8", "--profile", counted.to_str().unwrap()]);
    assert_eq!(stdout(&out), "triangles: 56\n");
    assert_eq!(fs::read_to_string(&counted).unwrap(), body);
}
