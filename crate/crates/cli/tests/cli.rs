use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn autinv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_autinv")).args(args).output().expect("run autinv")
}

fn corpus() -> Vec<PathBuf> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/corpus");
    let mut files: Vec<PathBuf> = fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect();
    files.sort();
    files
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn corpus_invert_then_verify() {
    let tmp = tempfile::tempdir().unwrap();
    for f in corpus() {
        let inv = tmp.path().join("inv.aut");
        let o = autinv(&["invert", "--aut", f.to_str().unwrap(), "--out", inv.to_str().unwrap()]);
        assert!(o.status.success(), "{}: {}", f.display(), String::from_utf8_lossy(&o.stderr));
        let again = autinv(&["invert", "--aut", f.to_str().unwrap()]);
        assert_eq!(stdout(&again), fs::read_to_string(&inv).unwrap(), "nondeterministic output for {}", f.display());
        let v = autinv(&["verify", "--aut", f.to_str().unwrap(), "--aut", inv.to_str().unwrap(), "--seed", "5"]);
        assert!(v.status.success(), "{}: {}", f.display(), stdout(&v));
        assert!(stdout(&v).lines().all(|l| l.ends_with(": pass")));
    }
}

#[test]
fn double_inverse_is_original() {
    let tmp = tempfile::tempdir().unwrap();
    for f in corpus() {
        let (a, b) = (tmp.path().join("a.aut"), tmp.path().join("b.aut"));
        assert!(autinv(&["invert", "--aut", f.to_str().unwrap(), "--out", a.to_str().unwrap()]).status.success());
        assert!(autinv(&["invert", "--aut", a.to_str().unwrap(), "--out", b.to_str().unwrap()]).status.success());
        let canon = autinv(&["compose", "--aut", f.to_str().unwrap(), "--aut", a.to_str().unwrap()]);
        assert!(canon.status.success());
        let orig = autinv::cli::parse_automorphism(&fs::read_to_string(&f).unwrap()).unwrap();
        assert_eq!(fs::read_to_string(&b).unwrap(), orig.render(), "{}", f.display());
        assert!(autinv::cli::parse_automorphism(&stdout(&canon)).unwrap().is_identity());
    }
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let write = |name: &str, text: &str| {
        let p = tmp.path().join(name);
        fs::write(&p, text).unwrap();
        p.to_str().unwrap().to_string()
    };
    let shear = write("shear.aut", "poly 3 2 0\nx1 -> x1\nx2 -> x2 + x1^2\n");
    let o = autinv(&["invert", "--aut", &shear]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("x2 -> x2 + 2*x1^2"));

    let o = autinv(&["verify", "--aut", &shear, "--aut", &shear]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("x2"));

    let o = autinv(&["invert", "--aut", &write("parse.aut", "poly 3 2 0\nx1 -> x1 +\nx2 -> x2\n")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));

    let o = autinv(&["invert", "--aut", &write("unit.aut", "series 5 1 0 D=8\nx1 -> 2*x1^2\n")]);
    assert_eq!(o.status.code(), Some(2));

    let o = autinv(&["invert", "--aut", &write("weyl.aut", "weyl 3 1 0\nq1 -> q1\np1 -> 2*p1\n")]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("[p1', q1'] != 1"));

    let o = autinv(&["taylor", "--kind", "tk", "--p", "3", "--n", "1", "--k", "1", "--element", "D1[3]"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn apply_and_taylor() {
    let o = autinv(&["apply", "--aut", corpus().iter().find(|f| f.ends_with("weyl_shear_p3.aut")).unwrap().to_str().unwrap(), "--element", "p1*q1"]);
    assert_eq!(stdout(&o), "1 + q1*p1 + q1^3\n");
    let o = autinv(&["taylor", "--kind", "series", "--p", "5", "--n", "1", "--degree-bound", "3", "--element", "x1^5 + 2*x1 - 1"]);
    assert_eq!(stdout(&o), "alpha=(0) : 4\nalpha=(1) : 2\n");
    let o = autinv(&["taylor", "--kind", "diffop", "--p", "5", "--n", "1", "--kmax", "1", "--element", "D1[3]*x1"]);
    assert_eq!(stdout(&o), "alpha=(0) beta=(2) gamma=() : 1\nalpha=(1) beta=(3) gamma=() : 1\n");
}
