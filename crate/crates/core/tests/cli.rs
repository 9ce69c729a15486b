use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bodyplate"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("bodyplate-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

#[test]
fn missing_subcommand_prints_usage_and_exits_2() {
    let out = run(&[]);
    assert_eq!(out.status.code(), Some(2));
    let text = String::from_utf8_lossy(&out.stderr) + String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("Usage"));
}

#[test]
fn argument_errors_exit_2() {
    let csv = scratch("bad.csv");
    let csv = csv.to_str().unwrap();
    for args in [
        vec!["solve", "--method", "bogus", "--body-level", "1", "--plate-level", "4", "--out", csv],
        vec!["solve", "--method", "mixed-nc", "--body-level", "1", "--plate-level", "6", "--out", csv],
        vec!["convergence", "--method", "displacement", "--levels", "2", "--matching", "no", "--out", csv],
        vec!["convergence", "--method", "mixed-nc", "--levels", "1", "--matching", "yes", "--out", csv],
    ] {
        assert_eq!(run(&args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn bad_config_line_exits_2() {
    let cfg = scratch("bad.cfg");
    std::fs::write(&cfg, "e_alpha = 100\nnot_a_key = 1\n").unwrap();
    let csv = scratch("cfg.csv");
    let out = run(&[
        "solve", "--method", "mixed-nc", "--body-level", "1", "--plate-level", "4",
        "--out", csv.to_str().unwrap(), "--config", cfg.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn cg_without_enough_iterations_exits_1() {
    let cfg = scratch("short.cfg");
    std::fs::write(&cfg, "cg_max_it = 1\n").unwrap();
    let csv = scratch("short.csv");
    let out = run(&[
        "dd-solve", "--body-level", "2", "--plate-level", "4",
        "--out", csv.to_str().unwrap(), "--config", cfg.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn dd_solve_writes_history() {
    let csv = scratch("dd.csv");
    let out = run(&["dd-solve", "--body-level", "2", "--plate-level", "4", "--tol", "1e-6", "--out", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("iter,res_rel"));
    let rows: Vec<(usize, f64)> = lines
        .map(|l| {
            let (i, r) = l.split_once(',').unwrap();
            (i.parse().unwrap(), r.parse().unwrap())
        })
        .collect();
    let iterations = rows.len() - 1;
    assert!((3..=7).contains(&iterations), "{iterations}");
    assert_eq!(rows[0], (0, 1.0));
    assert!(rows.last().unwrap().1 <= 1e-6);
}

#[test]
fn convergence_csv_has_one_row_per_level() {
    let csv = scratch("conv.csv");
    let out = run(&["convergence", "--method", "mixed-nc", "--levels", "3", "--matching", "yes", "--out", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 4);
    let header: Vec<&str> = lines[0].split(',').collect();
    assert_eq!(&header[..6], &["level", "body_n", "plate_n", "h_alpha", "h_beta", "dofs"]);
    for name in ["sigma_l2", "u_alpha_l2", "u_star_h1", "u_star_l2", "u3_h2", "u3_h1", "u3_l2"] {
        assert!(header.contains(&name) && header.contains(&format!("{name}_rate").as_str()));
    }
    for row in &lines[1..] {
        assert_eq!(row.split(',').count(), header.len());
    }
    // Rates are blank on the first level only.
    assert!(lines[1].ends_with(','));
    assert!(!lines[3].ends_with(','));
    // The aligned table goes to stdout.
    assert!(String::from_utf8_lossy(&out.stdout).contains("sigma_l2"));
}

#[test]
fn identical_runs_give_identical_csv() {
    let (a, b) = (scratch("det_a.csv"), scratch("det_b.csv"));
    for path in [&a, &b] {
        let out = run(&["convergence", "--method", "mixed-nc", "--levels", "2", "--matching", "no", "--out", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn displacement_solve_runs() {
    let csv = scratch("disp.csv");
    let out = run(&["solve", "--method", "displacement", "--body-level", "2", "--plate-level", "4", "--out", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(&csv).unwrap().lines().count(), 2);
}
