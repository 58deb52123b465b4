use std::path::Path;
use std::process::{Command, Output};

use xlap::xlap::LearnedDiag;

fn xlap(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_xlap")).current_dir(dir).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// Non-comment lines.
fn rows(text: &str) -> Vec<&str> {
    text.lines().filter(|l| !l.starts_with('#')).collect()
}

fn write(dir: &Path, name: &str, text: &str) {
    std::fs::write(dir.join(name), text).unwrap();
}

#[test]
fn triangle_spectrum() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "k3.txt", "0 1\n1 2\n2 0\n");
    let text = stdout(&xlap(dir.path(), &["--no-timestamp", "spectrum", "input=k3.txt", "k=3"]));
    let rows = rows(&text);
    assert_eq!(rows[0], "rank,eigenvalue,ipr");
    let first: Vec<f64> = rows[1].split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!(first[0], 1.0);
    assert!((first[1] - 2.0).abs() < 1e-12);
    assert!((first[2] - 1.0 / 3.0).abs() < 1e-12);
}

#[test]
fn header_echoes_config_and_version() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "k3.txt", "0 1\n1 2\n2 0\n");
    write(dir.path(), "run.cfg", "# triangle\nk = 2\ninput = k3.txt\n");
    let text = stdout(&xlap(dir.path(), &["--config", "run.cfg", "--seed", "9", "spectrum"]));
    assert!(text.starts_with(&format!("# xlap {}\n", env!("CARGO_PKG_VERSION"))));
    for line in ["# command: spectrum", "# k = 2", "# seed = 9", "# input = k3.txt"] {
        assert!(text.lines().any(|l| l == line), "missing {line:?}");
    }
    assert!(text.lines().any(|l| l.starts_with("# timestamp: ")));
    assert_eq!(rows(&text).len(), 3);

    let quiet = stdout(&xlap(dir.path(), &["--config", "run.cfg", "--no-timestamp", "spectrum", "k=1"]));
    assert!(!quiet.contains("timestamp"));
    assert!(quiet.lines().any(|l| l == "# k = 1"), "overrides beat the file");
}

#[test]
fn config_errors_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["detect", "alpha=1"],
        vec!["detect", "n_seeds"],
        vec!["detect", "n=many"],
        vec!["detect", "method=spectral"],
        vec!["blogs"],
        vec!["blogs", "input=missing.gml"],
        vec!["gen"],
        vec!["--config", "nope.cfg", "spectrum"],
    ] {
        let out = xlap(dir.path(), &args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn gen_is_deterministic_and_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let read = |ext: &str| std::fs::read(dir.path().join(format!("g{ext}"))).unwrap();
    let args = ["--no-timestamp", "--output", "g", "gen", "n=300", "c=4", "cliques=2", "seed=5"];
    stdout(&xlap(dir.path(), &args));
    let (edges, labels) = (read(".edges"), read(".labels"));
    stdout(&xlap(dir.path(), &args));
    assert_eq!(edges, read(".edges"));
    assert_eq!(labels, read(".labels"));
    assert!(String::from_utf8(read(".manifest")).unwrap().contains("\nedges="));

    let text = stdout(&xlap(dir.path(), &["spectrum", "input=g.edges", "k=2"]));
    assert_eq!(rows(&text).len(), 3);
}

#[test]
fn pairwise_and_completion_instances() {
    let dir = tempfile::tempdir().unwrap();
    stdout(&xlap(dir.path(), &["--output", "p", "gen", "model=pairwise", "n=200", "c=4"]));
    let edges = std::fs::read_to_string(dir.path().join("p.edges")).unwrap();
    let data = rows(&edges);
    assert!(!data.is_empty());
    assert!(data.iter().all(|l| l.split_whitespace().count() == 3), "weighted edge list");

    stdout(&xlap(dir.path(), &["--output", "m", "gen", "model=completion", "n=30", "m=20", "r=2", "c=5"]));
    let entries = std::fs::read_to_string(dir.path().join("m.entries")).unwrap();
    assert!(rows(&entries).iter().all(|l| l.split_whitespace().count() == 3));
    let factors = std::fs::read_to_string(dir.path().join("m.factors")).unwrap();
    assert_eq!(rows(&factors).len(), 50);
}

#[test]
fn learning_on_a_cycle_is_immediate() {
    let dir = tempfile::tempdir().unwrap();
    let cycle: String = (0..20).map(|i| format!("{i} {}\n", (i + 1) % 20)).collect();
    write(dir.path(), "c20.txt", &cycle);
    stdout(&xlap(dir.path(), &["--output", "traj.csv", "learn", "input=c20.txt"]));
    let traj = std::fs::read_to_string(dir.path().join("traj.csv")).unwrap();
    assert_eq!(rows(&traj), ["step,selected_ipr,lambda_1,lambda_2,ipr_1,ipr_2"]);
    let diag = LearnedDiag::read(&dir.path().join("traj.csv.diag")).unwrap();
    assert_eq!(diag.steps, 0);
    assert!(diag.converged && diag.x_diag.iter().all(|&x| x == 0.0));
}

#[test]
fn learning_trajectory_matches_the_learned_diagonal() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["--output", "traj.csv", "learn", "n=600", "c=3", "eps=0.1", "cliques=3", "q=3", "eta=5", "diag_output=x.diag"];
    stdout(&xlap(dir.path(), &args));
    let traj = std::fs::read_to_string(dir.path().join("traj.csv")).unwrap();
    let rows = rows(&traj);
    assert_eq!(rows[0], "step,selected_ipr,lambda_1,lambda_2,lambda_3,ipr_1,ipr_2,ipr_3");
    let diag = LearnedDiag::read(&dir.path().join("x.diag")).unwrap();
    assert!(diag.converged);
    assert!(diag.steps > 0, "cliques should trigger learning");
    assert_eq!(rows.len() - 1, diag.steps);
    let trace: f64 = diag.x_diag.iter().sum();
    assert!((trace + diag.eta * diag.steps as f64).abs() <= 1e-9 * diag.eta * diag.steps as f64);
    for (k, row) in rows[1..].iter().enumerate() {
        let cells: Vec<f64> = row.split(',').map(|x| x.parse().unwrap()).collect();
        assert_eq!(cells[0] as usize, k);
        assert!(cells[1] >= diag.delta, "every recorded step acted on a localized vector");
        assert!(cells[2] >= cells[3] && cells[3] >= cells[4]);
    }
}

#[test]
fn detection_sweep_is_sorted_and_thread_count_independent() {
    let dir = tempfile::tempdir().unwrap();
    let run = |jobs: &str| {
        stdout(&xlap(
            dir.path(),
            &["--no-timestamp", "--jobs", jobs, "detect", "n=400", "c=6", "eps=0.2,0", "n_seeds=3", "method=xlaplacian,adjacency,bethe-hessian,norm-laplacian"],
        ))
    };
    let serial = run("1");
    assert_eq!(serial, run("4"));
    let rows = rows(&serial);
    assert_eq!(rows[0], "epsilon,method,overlap_mean,overlap_stderr,n_seeds");
    assert!(rows[1].ends_with(",threshold,NaN,NaN,0"));
    let body: Vec<Vec<&str>> = rows[2..].iter().map(|r| r.split(',').collect()).collect();
    assert_eq!(body.len(), 8);
    let keys: Vec<(f64, &str)> = body.iter().map(|r| (r[0].parse().unwrap(), r[1])).collect();
    let mut sorted = keys.clone();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(b.1)));
    assert_eq!(keys, sorted);
    for r in body.iter().filter(|r| r[0] == "0.0") {
        assert!(r[2].parse::<f64>().unwrap() > 0.99, "{r:?}");
        assert_eq!(r[4], "3");
    }
}

#[test]
fn pairwise_sweep_accepts_noise_flags() {
    let dir = tempfile::tempdir().unwrap();
    let text = stdout(&xlap(
        dir.path(),
        &["--no-timestamp", "cluster-pairwise", "--perturb-neighbors", "5", "n=300", "c=8", "n_seeds=2", "method=bethe-hessian,xlaplacian"],
    ));
    assert!(text.lines().any(|l| l == "# perturb_neighbors = 5"));
    let rows = rows(&text);
    assert_eq!(rows[0], "c,method,overlap_mean,overlap_stderr,n_seeds");
    let limit: f64 = rows[1].split(',').next().unwrap().parse().unwrap();
    assert!(limit > 1.0 && limit < 5.0);
    assert_eq!(rows.len(), 4);
    let ov: f64 = rows[3].split(',').nth(2).unwrap().parse().unwrap();
    assert!(ov > 0.8, "{}", rows[3]);
}

#[test]
fn fully_revealed_completion_always_succeeds() {
    // The X-Laplacian is left out: with every entry revealed the embedding has
    // an exactly degenerate null space and learning chases arbitrary basis
    // vectors inside it.
    let dir = tempfile::tempdir().unwrap();
    let text = stdout(&xlap(
        dir.path(),
        &["--no-timestamp", "complete", "n=40", "m=40", "r=2", "c=40", "n_seeds=2", "method=bethe-hessian,trimmed-svd", "r_max=4"],
    ));
    let rows = rows(&text);
    assert_eq!(rows[0], "c,method,estimated_rank,rmse,success");
    assert_eq!(rows.len(), 5);
    for row in &rows[1..] {
        let cells: Vec<&str> = row.split(',').collect();
        assert_eq!(cells[2], "2", "{row}");
        assert_eq!(cells[4], "true", "{row}");
    }
}

#[test]
fn blogs_reports_misclassifications_on_a_labelled_edge_list() {
    let dir = tempfile::tempdir().unwrap();
    stdout(&xlap(dir.path(), &["--output", "g", "gen", "n=1000", "c=6", "eps=0.1", "seed=2"]));
    let text = stdout(&xlap(dir.path(), &["--no-timestamp", "blogs", "input=g.edges", "labels=g.labels"]));
    let rows = rows(&text);
    assert_eq!(rows[0], "method,nodes,misclassified");
    let counts: Vec<(String, usize, usize)> = rows[1..]
        .iter()
        .map(|r| {
            let c: Vec<&str> = r.split(',').collect();
            (c[0].to_string(), c[1].parse().unwrap(), c[2].parse().unwrap())
        })
        .collect();
    assert_eq!(counts.len(), 2);
    for (_, nodes, wrong) in &counts {
        assert!(*nodes > 900 && *wrong < nodes / 4);
    }
}

#[test]
fn blogs_reads_gml() {
    let dir = tempfile::tempdir().unwrap();
    let mut gml = String::from("graph [\n  directed 1\n");
    for i in 0..40 {
        gml.push_str(&format!("  node [ id {} label \"b{i}\" value {} ]\n", 100 + i, i / 20));
    }
    // Two dense blocks joined by one edge, plus a stray pair outside the giant component.
    for i in 0..40 {
        for j in i + 1..40 {
            if i / 20 == j / 20 && (i + j) % 3 != 0 {
                gml.push_str(&format!("  edge [ source {} target {} ]\n", 100 + i, 100 + j));
            }
        }
    }
    gml.push_str("  edge [ source 100 target 120 ]\n");
    gml.push_str("  node [ id 900 value 0 ]\n  node [ id 901 value 1 ]\n  edge [ source 900 target 901 ]\n]\n");
    write(dir.path(), "toy.gml", &gml);
    let text = stdout(&xlap(dir.path(), &["blogs", "input=toy.gml"]));
    for row in &rows(&text)[1..] {
        assert!(row.ends_with(",40,0"), "{row}");
    }
}
