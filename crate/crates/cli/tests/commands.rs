use std::process::Command as Process;

use gkm_cli::config::parse_matrix;
use gkm_cli::{parse_config, run, Command, SessionConfig};

fn config(matrix: &str) -> SessionConfig {
    SessionConfig::new(parse_matrix(matrix).unwrap(), None).unwrap()
}

fn table<'a>(text: &'a str, name: &str) -> Vec<Vec<&'a str>> {
    let header = format!("# table\t{}", name);
    text.lines()
        .skip_while(|l| *l != header)
        .skip(2)
        .take_while(|l| !l.starts_with('#'))
        .map(|l| l.split('\t').collect())
        .collect()
}

#[test]
fn relations_sl3_kernel_at_serre_degrees() {
    let mut c = config("2 -1; -1 2");
    c.degree_cap = 4;
    let report = run(Command::Relations, &c).unwrap();
    assert!(report.passed());
    let text = report.render();
    let rows = table(&text, "relations");
    let kernel = |deg: &str| rows.iter().find(|r| r[0] == deg).unwrap()[3];
    assert_eq!(kernel("(2,1)"), "1");
    assert_eq!(kernel("(1,2)"), "1");
    assert_eq!(kernel("(1,1)"), "0");
}

#[test]
fn dims_affine_multiplicities() {
    let mut c = config("2 -2; -2 2");
    c.degree_cap = 6;
    let report = run(Command::Dims, &c).unwrap();
    assert!(report.passed(), "{}", report.render());
    let text = report.render();
    for row in table(&text, "dims") {
        assert!(row[5] == "0" || row[5] == "1", "{:?}", row);
        assert_eq!(row[5], row[6]);
    }
}

#[test]
fn exact_commands_are_deterministic() {
    let text = "matrix = 2 -1; -1 2\ndegree_cap = 4\ndepth = 3\nhighest_weights = 1 0; 1 1\n";
    let c = parse_config(text).unwrap();
    for cmd in Command::ALL.into_iter().filter(|c| !c.is_numeric()) {
        let first = run(cmd, &c).unwrap().render();
        let second = run(cmd, &parse_config(text).unwrap()).unwrap().render();
        assert_eq!(first, second, "{}", cmd.name());
    }
}

#[test]
fn digest_depends_on_configuration() {
    let a = run(Command::Symmetrize, &config("2 -2; -1 2")).unwrap();
    let b = run(Command::Symmetrize, &config("2 -1; -2 2")).unwrap();
    assert_ne!(a.digest, b.digest);
    let rows = a.render();
    assert_eq!(table(&rows, "symmetrizers"), vec![vec!["1", "1"], vec!["2", "2"]]);
}

#[test]
fn dk_sl2_doublet_passes() {
    let mut c = config("2");
    c.highest_weights = vec![parse_matrix("1").unwrap().remove(0)];
    c.depth = 2;
    let report = run(Command::Dk, &c).unwrap();
    assert!(report.passed(), "{}", report.render());
    assert_eq!(table(&report.render(), "traces").len(), 340);
}

#[test]
fn commands_without_weight_fail_cleanly() {
    assert!(run(Command::Ybe, &config("2")).is_err());
}

fn gkm(args: &[&str]) -> (i32, String, String) {
    let out = Process::new(env!("CARGO_BIN_EXE_gkm")).args(args).output().unwrap();
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

#[test]
fn exit_codes() {
    let (code, out, _) = gkm(&["symmetrize", "--matrix", "2 -2; -1 2"]);
    assert_eq!(code, 0);
    assert!(out.contains("# verdict\tpass"));

    let (code, _, err) = gkm(&["symmetrize", "--matrix", "2 -1; 0 2"]);
    assert_eq!(code, 2);
    assert!(err.starts_with("error [config/symmetrize]"), "{}", err);
    assert!(err.contains("not symmetrizable"));

    let (code, _, err) = gkm(&["relations", "--matrix", "2 -1; -1"]);
    assert_eq!(code, 2, "{}", err);

    let (code, _, _) = gkm(&["relations"]);
    assert_eq!(code, 2);

    let (code, _, _) = gkm(&["dims", "--matrix", "2 -1; -1 2", "--max-degree", "0"]);
    assert_eq!(code, 2);

    // the affine fundamental module is infinite, so no finite depth completes it
    let (code, _, _) = gkm(&["dk", "--matrix", "2 -2; -2 2", "--hw", "1 0", "--depth", "2"]);
    assert_eq!(code, 3);
}

#[test]
fn config_file_and_flags() {
    let dir = std::env::temp_dir().join(format!("gkm-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("sl2.cfg");
    std::fs::write(&path, "# sl2\nmatrix = 2\nhighest_weights = 3\ndepth = 5\n").unwrap();
    let out_path = dir.join("report.tsv");
    let (code, _, err) = gkm(&[
        "compare-characters",
        "--config",
        path.to_str().unwrap(),
        "--output",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{}", err);
    let text = std::fs::read_to_string(&out_path).unwrap();
    assert!(text.contains("# check\tcharacters agree for weight 1\tpass"));
    let (code, out, _) = gkm(&["character", "--config", path.to_str().unwrap(), "--hw", "1", "--verma"]);
    assert_eq!(code, 0);
    assert!(out.contains("verma"));
    std::fs::remove_dir_all(&dir).unwrap();
}
