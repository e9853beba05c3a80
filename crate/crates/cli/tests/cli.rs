use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn p1nc(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_p1nc"))
        .args(args)
        .env_remove("P1NC_OUTPUT_DIR")
        .arg("--output-dir")
        .arg(out)
        .output()
        .expect("run p1nc")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn sorted_files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect();
    v.sort();
    v
}

#[test]
fn dims_periodic_square() {
    let tmp = tempfile::tempdir().unwrap();
    let o = p1nc(&["dims", "--2d", "4", "4", "--bc", "periodic", "--verify"], tmp.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let s = stdout(&o);
    let row = s.lines().nth(1).unwrap();
    assert_eq!(row, "4,4,periodic,17,1,2,15,17,1,2,15,match");
}

#[test]
fn dims_3d_kernel() {
    let tmp = tempfile::tempdir().unwrap();
    let o = p1nc(&["dims", "--3d", "2", "2", "2", "--verify"], tmp.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let s = stdout(&o);
    let fields: Vec<&str> = s.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(fields[6], "5");
    assert_eq!(fields.last(), Some(&"match"));
}

#[test]
fn dims_all_bcs_sweep() {
    let tmp = tempfile::tempdir().unwrap();
    let o = p1nc(&["dims", "--sweep-2d", "3", "--bc", "all", "--verify", "--save"], tmp.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o).lines().count(), 1 + 9 * 3);
    assert_eq!(sorted_files(tmp.path()).len(), 1);
}

#[test]
fn usage_errors_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    for args in [
        &["dims", "--2d", "0", "4"][..],
        &["dims"],
        &["dims", "--2d", "4", "4", "--bc", "robin"],
        &["solve", "--example", "ex3", "--h", "1/4", "--option", "1"],
        &["solve", "--example", "ex1", "--h", "1/9", "--option", "2"],
        &["solve", "--example", "ex1", "--h", "1/x"],
        &["solve", "--example", "ex4", "--h", "1/8"],
        &["convergence", "--example", "ex1", "--h", "1/8:1/12"],
        &["equivalence", "--example", "ex3", "--h", "1/4"],
        &["dims", "--3d", "20", "20", "20", "--verify"],
    ] {
        let o = p1nc(args, tmp.path());
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn guarded_paths_explain_themselves() {
    let tmp = tempfile::tempdir().unwrap();
    let o = p1nc(&["solve", "--example", "ex3", "--h", "1/4", "--option", "1"], tmp.path());
    assert!(stderr(&o).contains("3D supports option 4"), "{}", stderr(&o));
    let o = p1nc(&["solve", "--example", "ex1", "--h", "1/9", "--option", "2"], tmp.path());
    assert!(stderr(&o).contains("even cell counts"), "{}", stderr(&o));
}

#[test]
fn solve_writes_report_and_files() {
    let tmp = tempfile::tempdir().unwrap();
    let o = p1nc(&["solve", "--example", "ex1", "--h", "1/16", "--option", "4", "--save-matrix"], tmp.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let s = stdout(&o);
    assert!(s.contains("converged=true"), "{s}");
    let files = sorted_files(tmp.path());
    let names: Vec<&str> = files.iter().map(|(n, _)| n.as_str()).collect();
    assert_eq!(names.len(), 3, "{names:?}");
    assert!(names.iter().any(|n| n.ends_with(".vtk")));
    assert!(names.iter().any(|n| n.ends_with("_faces.csv")));
    assert!(names.iter().any(|n| n.ends_with(".mtx")));
    let vtk = &files.iter().find(|(n, _)| n.ends_with(".vtk")).unwrap().1;
    assert!(String::from_utf8_lossy(vtk).starts_with("# vtk DataFile"));
}

#[test]
fn identical_runs_give_identical_files() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [a.path(), b.path()] {
        let o = p1nc(&["solve", "--example", "ex2", "--h", "1/8", "--option", "3"], dir);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        let o = p1nc(&["convergence", "--example", "ex1", "--option", "all", "--h", "1/8:1/16"], dir);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    let fa = sorted_files(a.path());
    assert_eq!(fa.len(), 2 + 4 * 2);
    assert_eq!(fa, sorted_files(b.path()));
}

#[test]
fn different_settings_give_different_names() {
    let tmp = tempfile::tempdir().unwrap();
    for tol in ["1e-10", "1e-8"] {
        let o = p1nc(&["solve", "--example", "ex1", "--h", "1/8", "--tolerance", tol], tmp.path());
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    assert_eq!(sorted_files(tmp.path()).len(), 4);
}

#[test]
fn convergence_check_published() {
    let tmp = tempfile::tempdir().unwrap();
    let o = p1nc(&["convergence", "--example", "ex1", "--option", "4", "--h", "1/8:1/32", "--check-paper"], tmp.path());
    assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));
    assert!(stdout(&o).contains("pass"));

    // A one-point load rule misses the published values.
    let o = p1nc(
        &[
            "convergence",
            "--example",
            "ex1",
            "--h",
            "1/8:1/16",
            "--quadrature",
            "1",
            "--check-paper",
            "--rel-tol",
            "1e-4",
        ],
        tmp.path(),
    );
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
    assert!(stdout(&o).contains("FAIL"));
}

#[test]
fn rankdef_check_published() {
    let tmp = tempfile::tempdir().unwrap();
    let o = p1nc(&["rankdef", "--max", "4", "--check-paper"], tmp.path());
    assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));
    assert!(stdout(&o).contains("pass"));
    assert_eq!(sorted_files(tmp.path()).len(), 2);
}

#[test]
fn equivalence_reports_slopes() {
    let tmp = tempfile::tempdir().unwrap();
    let o = p1nc(&["equivalence", "--example", "ex2", "--h", "1/8:1/32"], tmp.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("fitted slopes"));
}

#[test]
fn config_file_and_env_precedence() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg_dir = tmp.path().join("from_config");
    let env_dir = tmp.path().join("from_env");
    let flag_dir = tmp.path().join("from_flag");
    let cfg = tmp.path().join("run.cfg");
    fs::write(
        &cfg,
        format!("# archived run\nexample = ex1\nh = 1/8\noption = 3\noutput-dir = {}\n", cfg_dir.display()),
    )
    .unwrap();
    let bin = env!("CARGO_BIN_EXE_p1nc");

    let o = Command::new(bin).env_remove("P1NC_OUTPUT_DIR").args(["solve", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("option=3"));
    assert_eq!(sorted_files(&cfg_dir).len(), 2);

    let o = Command::new(bin)
        .env("P1NC_OUTPUT_DIR", &env_dir)
        .args(["solve", "--config"])
        .arg(&cfg)
        .args(["--option", "4"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("option=4"));
    assert_eq!(sorted_files(&env_dir).len(), 2);

    let o = Command::new(bin)
        .env("P1NC_OUTPUT_DIR", &env_dir)
        .args(["solve", "--config"])
        .arg(&cfg)
        .arg("--output-dir")
        .arg(&flag_dir)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(sorted_files(&flag_dir).len(), 2);
    assert_eq!(sorted_files(&env_dir).len(), 2);
}
