use oddcolor_cli::commands::{run, Output};

fn data(name: &str) -> String {
    format!("{}/tests/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn oddcolor(args: &[&str]) -> Output {
    run(std::iter::once("oddcolor").chain(args.iter().copied()))
}

#[test]
fn verify_lists_every_odd_violation() {
    let out = oddcolor(&["verify", "--graph", &data("c4.g6"), "--coloring", &data("c4-1212.txt")]);
    assert_eq!(out.code, 1);
    let violations: Vec<&str> = out.stdout.lines().filter(|l| l.starts_with("odd-violation")).collect();
    assert_eq!(violations, ["odd-violation 0", "odd-violation 1", "odd-violation 2", "odd-violation 3"]);
}

#[test]
fn k7_needs_seven_colors() {
    let out = oddcolor(&["solve", "--graph", &data("k7.g6"), "--chromatic"]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.starts_with("χ_o = 7\n"), "{}", out.stdout);

    let six = oddcolor(&["solve", "--graph", &data("k7.g6"), "--k", "6", "--format", "tsv"]);
    assert_eq!(six.code, 1);
    assert!(six.stdout.starts_with("status\tk\tnodes\tcoloring\nnot-colorable\t6\t"));
}

#[test]
fn solver_witness_passes_verify() {
    let out = oddcolor(&["solve", "--graph", &data("petersen.g6"), "--k", "4"]);
    assert_eq!(out.code, 0);
    let coloring: String = out.stdout.lines().skip(2).map(|l| format!("{l}\n")).collect();
    let path = std::env::temp_dir().join(format!("oddcolor-petersen-{}.txt", std::process::id()));
    std::fs::write(&path, coloring).unwrap();
    let check = oddcolor(&["verify", "--graph", &data("petersen.g6"), "--coloring", path.to_str().unwrap(), "--k", "4"]);
    std::fs::remove_file(&path).unwrap();
    assert_eq!(check.code, 0, "{}", check.stdout);
}

#[test]
fn grid_generator_matches_fixture() {
    let out = oddcolor(&["gen", "torus-grid", "4", "4", "--triangle-free"]);
    assert_eq!(out.stdout, std::fs::read_to_string(data("grid44.rot")).unwrap());
}

#[test]
fn seeded_subdivision_is_frozen() {
    let out = oddcolor(&["gen", "subdivide", "--rot", &data("grid44.rot"), "--fraction", "1/4", "--seed", "7"]);
    assert_eq!(out.code, 0);
    assert_eq!(out.stdout, std::fs::read_to_string(data("grid44-quarter-s7.rot")).unwrap());
}

#[test]
fn grid_discharges_cleanly() {
    let out = oddcolor(&["discharge", "--rot", &data("grid44.rot")]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.starts_with("total = 0/1 (χ=0); negatives: none\n"));
}

#[test]
fn findings_exit_with_one() {
    let quarter = data("grid44-quarter-s7.rot");
    let discharge = oddcolor(&["discharge", "--rot", &quarter]);
    assert_eq!(discharge.code, 1);
    assert!(discharge.stdout.contains("[overloaded-k-vertex]"));

    let screen = oddcolor(&["screen", "--rot", &quarter]);
    assert_eq!(screen.code, 1);
    assert!(screen.stdout.starts_with("21 screen matches\n"));

    // Every grid face is a 4-face on four non-convenient 4-vertices.
    let grid = oddcolor(&["screen", "--rot", &data("grid44.rot")]);
    assert_eq!(grid.code, 1);
    assert!(grid.stdout.starts_with("16 screen matches\n4_0-quad-face f0: v0 v1 v13 v12\n"));
}

#[test]
fn lemma_summary_line() {
    let out = oddcolor(&["lemma", "--id", "L-no3v", "--graph", &data("petersen.g6"), "--trials", "3", "--seed", "1"]);
    assert_eq!(out.code, 0);
    assert_eq!(out.stdout.lines().next(), Some("L-no3v: matched 10, sampled 3, passed 3 (scripted 3, search 0), failed 0, skipped 0"));
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(oddcolor(&["lemma", "--id", "L-nope", "--graph", &data("petersen.g6")]).code, 2);
    assert_eq!(oddcolor(&["verify", "--graph", "/nonexistent.g6"]).code, 2);
    assert_eq!(oddcolor(&["solve", "--graph", &data("k7.g6")]).code, 2);
    assert_eq!(oddcolor(&["faces", "--bogus"]).code, 2);
    assert_eq!(oddcolor(&["--help"]).code, 0);
}
