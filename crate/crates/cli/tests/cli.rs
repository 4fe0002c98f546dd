use std::path::Path;
use std::process::{Command, Output, Stdio};
use std::time::Duration;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tqf_core::algebra::TernaryForm;
use tqf_core::discriminant::disc_eval;
use tqf_core::reduce::{norm, GeneratorAction};
use tqf_core::search::CurveRecord;

fn tqf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tqf"))
        .args(args)
        .env_remove("TQF_TREE_CACHE")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn quartic_record(s: &str) -> String {
    let f = TernaryForm::parse(4, s).unwrap();
    CurveRecord {
        disc: disc_eval(&f).unwrap(),
        coeffs: f.to_i64().unwrap(),
    }
    .to_string()
}

#[test]
fn disc_eval_prints_the_discriminant() {
    let o = tqf(&["disc", "eval", "-d", "2", "1", "0", "0", "1", "0", "1"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o).trim(), "-4");
    let o = tqf(&["disc", "eval", "--form", "x^3z + x^2z^2 + xy^3 - xy^2z + y^2z^2 - yz^3"]);
    assert_eq!(stdout(&o).trim().trim_start_matches('-'), "4727");
}

#[test]
fn disc_eval_usage_errors_exit_2() {
    let fourteen: Vec<String> = (0..14).map(|i| i.to_string()).collect();
    let mut args = vec!["disc", "eval", "-d", "4"];
    args.extend(fourteen.iter().map(String::as_str));
    assert_eq!(tqf(&args).status.code(), Some(2));
    assert_eq!(tqf(&["disc", "eval", "--form", "x^4 + y^3"]).status.code(), Some(2));
    assert_eq!(tqf(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn disc_poly_and_convert() {
    let dir = tempfile::tempdir().unwrap();
    let bin = dir.path().join("d3.tqd");
    let o = tqf(&["disc", "poly", "-d", "3", "-o", p(&bin)]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o).trim(), "terms 2040");
    let txt = dir.path().join("d3.txt");
    assert!(tqf(&["disc", "convert", p(&bin), p(&txt)]).status.success());
    assert!(std::fs::read_to_string(&txt).unwrap().starts_with("# degree 3"));
    let back = dir.path().join("back.tqd");
    assert!(tqf(&["disc", "convert", p(&txt), p(&back)]).status.success());
    assert_eq!(std::fs::read(&bin).unwrap(), std::fs::read(&back).unwrap());
    std::fs::write(&txt, "# degree 3\n1 0 0\n").unwrap();
    assert_eq!(tqf(&["disc", "convert", p(&txt), p(&back)]).status.code(), Some(2));
}

#[test]
fn jobs_listing() {
    let o = tqf(&["jobs", "--cmax", "9"]);
    assert_eq!(stdout(&o).lines().count(), 79_420);
    assert_eq!(stdout(&tqf(&["jobs", "--cmax", "9", "--count"])).trim(), "79420");
    let o = tqf(&["jobs", "--cmax", "1"]);
    assert_eq!(stdout(&o).lines().next(), Some("0 0,0,0,-1,-1"));
    assert_eq!(stdout(&o).lines().count(), 36);
}

#[test]
fn search_errors() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = tqf(&["search", "--cmax", "1", "--engine", "direct", "--job", "36", "--out", p(&out)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("job index"));
    let o = tqf(&["search", "--degree", "3", "--cmax", "1", "--job", "0", "--out", p(&out), "--tree-cache", p(dir.path())]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("tqf tree build --degree 3"), "{}", stderr(&o));
}

fn merged(dir: &Path, name: &str) -> Vec<u8> {
    let out = dir.join(name);
    let o = tqf(&["merge", p(&dir.join(format!("{name}-search"))), "-o", p(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    std::fs::read(out).unwrap()
}

#[test]
fn cubic_tree_and_direct_searches_agree() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let o = Command::new(env!("CARGO_BIN_EXE_tqf"))
        .args(["tree", "build", "--degree", "3"])
        .env("TQF_TREE_CACHE", &cache)
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    let info = tqf(&["tree", "info", "--degree", "3", "--cache", p(&cache)]);
    assert!(stdout(&info).contains("nodes 10394"));
    for (engine, shards) in [("tree", "1"), ("direct", "1"), ("tree", "4")] {
        let out = dir.path().join(format!("{engine}{shards}-search"));
        let o = tqf(&[
            "search", "--degree", "3", "--cmax", "1", "--dmax", "100000", "--engine", engine, "--job", "0..242",
            "--shards", shards, "--out", p(&out), "--tree-cache", p(&cache),
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let a = merged(dir.path(), "tree1");
    assert!(!a.is_empty());
    assert_eq!(a, merged(dir.path(), "direct1"));
    assert_eq!(a, merged(dir.path(), "tree4"));
}

#[test]
fn killed_search_resumes_to_identical_output() {
    let dir = tempfile::tempdir().unwrap();
    let args = |out: &Path| -> Vec<String> {
        [
            "search", "--cmax", "1", "--dmax", "10000", "--engine", "direct", "--job", "0..5", "--interval", "1",
            "--out", p(out),
        ]
        .iter()
        .map(|s| s.to_string())
        .collect()
    };
    let reference = dir.path().join("ref-search");
    assert!(tqf(&args(&reference).iter().map(String::as_str).collect::<Vec<_>>()).status.success());

    let resumed = dir.path().join("resumed-search");
    let mut child = Command::new(env!("CARGO_BIN_EXE_tqf"))
        .args(args(&resumed))
        .stdout(Stdio::null())
        .spawn()
        .unwrap();
    std::thread::sleep(Duration::from_millis(700));
    child.kill().ok();
    child.wait().unwrap();
    let o = tqf(&args(&resumed).iter().map(String::as_str).collect::<Vec<_>>());
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(merged(dir.path(), "resumed"), merged(dir.path(), "ref"));
}

#[test]
fn reduce_collapses_an_orbit_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let a = GeneratorAction::new(4).unwrap();
    let base = TernaryForm::parse(4, "x^3z + x^2yz + x^2z^2 + xy^3 - xy^2z + y^4 - y^3z - yz^3").unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut forms = std::collections::BTreeSet::new();
    while forms.len() < 12 {
        let mut g = base.to_i64().unwrap();
        for _ in 0..rng.gen_range(1..8) {
            let img = a.apply(rng.gen_range(0..4), &g);
            if norm(&img) <= 2 {
                g = img;
            }
        }
        forms.insert(g);
    }
    let text: String = forms
        .iter()
        .map(|c| {
            let r = CurveRecord {
                disc: disc_eval(&TernaryForm::from_i64(4, c).unwrap()).unwrap(),
                coeffs: c.clone(),
            };
            format!("{r}\n")
        })
        .collect();
    let input = dir.path().join("orbit.txt");
    std::fs::write(&input, text).unwrap();
    let out = dir.path().join("reduced.txt");
    let audit = dir.path().join("audit.txt");
    let o = tqf(&["reduce", p(&input), "-o", p(&out), "--bound", "2", "--audit", p(&audit)]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(std::fs::read_to_string(&out).unwrap().lines().count(), 1);
    assert_eq!(std::fs::read_to_string(&audit).unwrap().lines().count(), 11);
}

#[test]
fn reduce_keeps_the_two_492075_classes() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("pair.txt");
    std::fs::write(
        &input,
        format!(
            "{}\n{}\n",
            quartic_record("x^3z + x^2z^2 + xy^3 - xz^3 + y^3z"),
            quartic_record("x^3z + y^4 + 2y^3z - yz^3")
        ),
    )
    .unwrap();
    let out = dir.path().join("r.txt");
    let o = tqf(&["reduce", p(&input), "-o", p(&out), "--bound", "9", "--bound", "81"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(std::fs::read_to_string(&out).unwrap().lines().count(), 2);
}

#[test]
fn fingerprint_reports_the_324480_collision() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("pair.txt");
    std::fs::write(
        &input,
        format!(
            "{}\n{}\n{}\n",
            quartic_record("x^3y + x^3z + x^2y^2 - 2x^2yz - 4x^2z^2 - 4xy^3 + xz^3 + 2y^4 - 2yz^3 + z^4"),
            quartic_record("x^4 + x^3y + 2x^3z + 4x^2y^2 - xy^3 - 2xy^2z + y^4 + 3y^3z + 5y^2z^2 + 4yz^3 + 2z^4"),
            quartic_record("x^3z + x^2z^2 + xy^3 - xy^2z + y^2z^2 - yz^3"),
        ),
    )
    .unwrap();
    let out = dir.path().join("fp.txt");
    let report = dir.path().join("collisions.txt");
    let o = tqf(&["fingerprint", p(&input), "-o", p(&out), "--report", p(&report)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let r = std::fs::read_to_string(&report).unwrap();
    assert!(r.contains("collisions 1\n"), "{r}");
    assert!(r.contains("class 1 size 2\n"), "{r}");
    let fps = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = fps.lines().collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[0], lines[1]);
    assert!(lines[0].starts_with("324480 ; 7:"), "{}", lines[0]);
}

#[test]
fn malformed_records_report_their_location() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("bad.txt");
    std::fs::write(&input, format!("{}\n+12:1,2\n", quartic_record("x^4 + y^4 + z^4"))).unwrap();
    let o = tqf(&["reduce", p(&input), "-o", p(&dir.path().join("o.txt")), "--bound", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("bad.txt:2"), "{}", stderr(&o));
}

#[test]
fn cubic_pipeline_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let mut manifests = Vec::new();
    for run in ["a", "b"] {
        let work = dir.path().join(run);
        let o = tqf(&["pipeline", "--degree", "3", "--cmax", "1", "--dmax", "2000", "--work", p(&work), "--pmax", "50"]);
        assert!(o.status.success(), "{}", stderr(&o));
        let v = tqf(&["verify", p(&work.join("manifest.toml"))]);
        assert!(v.status.success(), "{}", stdout(&v));
        manifests.push(std::fs::read_to_string(work.join("manifest.toml")).unwrap());
    }
    assert_eq!(manifests[0], manifests[1]);
    let counts: Vec<u64> = manifests[0]
        .lines()
        .filter_map(|l| l.strip_prefix("records = "))
        .map(|v| v.parse().unwrap())
        .collect();
    assert_eq!(counts.len(), 4);
    assert!(counts[1] <= counts[0] && counts[2] <= counts[1]);

    std::fs::write(dir.path().join("a/reduced.txt"), "").unwrap();
    assert_eq!(tqf(&["verify", p(&dir.path().join("a/manifest.toml"))]).status.code(), Some(1));
}
