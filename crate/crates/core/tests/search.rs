use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};

use tqf_core::discriminant::{disc_poly, DiscEvaluator};
use tqf_core::search::{
    enumerate_jobs_for, merge_records, parse_records, run_job, Checkpoint, CurveRecord, Engine, Layout, RunContext,
    SearchConfig, SearchJob, CUBIC_ORDER,
};
use tqf_core::tree::MonomialTree;
use tqf_core::Error;

fn cubic_tree() -> MonomialTree {
    MonomialTree::build(&disc_poly(3).unwrap(), &CUBIC_ORDER).unwrap()
}

fn config(degree: u32, engine: Engine, bound: i64, disc_bound: u64) -> SearchConfig {
    let mut c = SearchConfig::new(degree);
    c.engine = engine;
    c.coeff_bound = bound;
    c.disc_bound = disc_bound;
    c
}

fn read(path: &Path) -> Vec<CurveRecord> {
    parse_records(&std::fs::read_to_string(path).unwrap(), "out").unwrap()
}

fn run(job: SearchJob, cfg: &SearchConfig, shard: u32, tree: Option<&MonomialTree>, out: &Path) -> Vec<CurveRecord> {
    let ctx = RunContext {
        tree,
        output: out,
        checkpoint: None,
        stop: None,
    };
    let o = run_job(&job, cfg, shard, &ctx).unwrap();
    assert!(o.complete);
    read(out)
}

/// Every form of `job`, evaluated exactly one at a time.
fn brute_force(job: SearchJob, cfg: &SearchConfig) -> Vec<CurveRecord> {
    let layout = Layout::for_degree(cfg.degree).unwrap();
    let ev = DiscEvaluator::new(cfg.degree).unwrap();
    let n = layout.levels();
    let free = n - 5;
    let b = cfg.coeff_bound;
    let w = (2 * b + 1) as usize;
    let mut out = Vec::new();
    let mut c = vec![0i64; n + 1];
    for (k, &v) in job.0.iter().enumerate() {
        c[n - k] = v;
    }
    for mut idx in 0..w.pow(free as u32) {
        for level in 1..=free {
            c[level] = (idx % w) as i64 - b;
            idx /= w;
        }
        let coeffs = layout.coefficients(&c);
        let d = ev.eval(&coeffs).unwrap();
        let mag: u64 = d.magnitude().try_into().unwrap_or(u64::MAX);
        if mag != 0 && mag <= cfg.disc_bound {
            out.push(CurveRecord { disc: d, coeffs });
        }
    }
    merge_records(out)
}

#[test]
fn cubic_engines_agree_with_brute_force() {
    let dir = tempfile::tempdir().unwrap();
    let tree = cubic_tree();
    let jobs = enumerate_jobs_for(3, 1).unwrap();
    assert_eq!(jobs.len(), 243);
    let mut total = 0;
    for job in jobs.iter().step_by(7) {
        let t = config(3, Engine::Tree, 1, 10_000);
        let d = config(3, Engine::Direct, 1, 10_000);
        let a = run(*job, &t, 0, Some(&tree), &dir.path().join("t.txt"));
        let b = run(*job, &d, 0, None, &dir.path().join("d.txt"));
        let expect = brute_force(*job, &t);
        assert_eq!(merge_records(a), expect, "tree engine, job {job}");
        assert_eq!(merge_records(b), expect, "direct engine, job {job}");
        total += expect.len();
    }
    assert!(total > 0);
}

#[test]
fn quartic_direct_engine_matches_brute_force() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(4, Engine::Direct, 1, 1_000_000);
    let job = SearchJob([0, 1, 1, -1, 0]);
    let got = run(job, &cfg, 0, None, &dir.path().join("q.txt"));
    assert_eq!(merge_records(got), brute_force(job, &cfg));
}

#[test]
fn shard_union_equals_single_shard() {
    let dir = tempfile::tempdir().unwrap();
    let tree = cubic_tree();
    for engine in [Engine::Tree, Engine::Direct] {
        for job in [SearchJob([1, 0, -1, 1, 0]), SearchJob([0, 0, 0, 0, 0])] {
            let single = config(3, engine, 1, 1_000_000);
            let whole = run(job, &single, 0, Some(&tree), &dir.path().join("all.txt"));
            let mut union = Vec::new();
            let mut sharded = single.clone();
            sharded.shard_count = 8;
            for s in 0..8 {
                let part = run(job, &sharded, s, Some(&tree), &dir.path().join(format!("s{s}.txt")));
                union.extend(part);
            }
            assert_eq!(union.len(), whole.len(), "shards overlap or miss forms");
            assert_eq!(merge_records(union), merge_records(whole));
        }
    }
}

#[test]
fn zero_discriminant_bound_gives_empty_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("e.txt");
    let cfg = config(3, Engine::Tree, 1, 0);
    let tree = cubic_tree();
    assert!(run(SearchJob([0, 1, 0, -1, 1]), &cfg, 0, Some(&tree), &out).is_empty());
    assert_eq!(std::fs::metadata(&out).unwrap().len(), 0);
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let tree = cubic_tree();
    let cfg = config(3, Engine::Tree, 1, 1_000_000);
    let job = SearchJob([1, 1, 0, -1, 0]);
    run(job, &cfg, 0, Some(&tree), &dir.path().join("a.txt"));
    run(job, &cfg, 0, Some(&tree), &dir.path().join("b.txt"));
    let a = std::fs::read(dir.path().join("a.txt")).unwrap();
    assert!(!a.is_empty());
    assert_eq!(a, std::fs::read(dir.path().join("b.txt")).unwrap());
}

fn kill_and_resume(cfg: &SearchConfig, job: SearchJob, tree: Option<&MonomialTree>, stop_after: usize) {
    let dir = tempfile::tempdir().unwrap();
    let reference = dir.path().join("ref.txt");
    run(job, cfg, 0, tree, &reference);

    let out = dir.path().join("out.txt");
    let ckpt = dir.path().join("job.ckpt");
    let seen = AtomicUsize::new(0);
    let stop = |_: &Checkpoint| seen.fetch_add(1, Ordering::SeqCst) + 1 == stop_after;
    let ctx = RunContext {
        tree,
        output: &out,
        checkpoint: Some(&ckpt),
        stop: Some(&stop),
    };
    let first = run_job(&job, cfg, 0, &ctx).unwrap();
    assert!(!first.complete, "run finished before the stop point");
    // garbage past the recorded length, as left by a crash mid-write
    let mut partial = std::fs::read(&out).unwrap();
    partial.extend_from_slice(b"+12:1,2,3");
    std::fs::write(&out, partial).unwrap();

    let ctx = RunContext { stop: None, ..ctx };
    let second = run_job(&job, cfg, 0, &ctx).unwrap();
    assert!(second.complete);
    assert_eq!(std::fs::read(&out).unwrap(), std::fs::read(&reference).unwrap());

    let ck = Checkpoint::read(&ckpt).unwrap();
    assert_eq!(ck.output_bytes, std::fs::metadata(&out).unwrap().len());
    assert_eq!(ck.hits as usize, read(&out).len());
    let again = run_job(&job, cfg, 0, &ctx).unwrap();
    assert_eq!(again, second);
}

#[test]
fn quartic_kill_and_resume() {
    let mut cfg = config(4, Engine::Direct, 1, 1_000_000);
    cfg.checkpoint_every = 1;
    kill_and_resume(&cfg, SearchJob([0, 0, 1, 1, -1]), None, 4);
}

#[test]
fn cubic_kill_and_resume_at_each_interval() {
    let tree = cubic_tree();
    for every in [1, 2, 5] {
        let mut cfg = config(3, Engine::Tree, 1, 1_000_000);
        cfg.checkpoint_every = every;
        for stop_after in [1, 2] {
            kill_and_resume(&cfg, SearchJob([0, -1, 1, 0, 1]), Some(&tree), stop_after);
        }
    }
}

#[test]
fn checkpoint_for_another_configuration_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let tree = cubic_tree();
    let out = dir.path().join("o.txt");
    let ckpt = dir.path().join("o.ckpt");
    let cfg = config(3, Engine::Tree, 1, 1000);
    let job = SearchJob([0, 0, 0, 0, 1]);
    let ctx = RunContext {
        tree: Some(&tree),
        output: &out,
        checkpoint: Some(&ckpt),
        stop: None,
    };
    run_job(&job, &cfg, 0, &ctx).unwrap();
    let other = config(3, Engine::Tree, 1, 2000);
    assert!(matches!(run_job(&job, &other, 0, &ctx), Err(Error::State(_))));
    assert!(run_job(&SearchJob([0, 0, 0, 1, 1]), &cfg, 0, &ctx).is_err());
}

#[test]
fn invalid_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o.txt");
    let ctx = RunContext {
        tree: None,
        output: &out,
        checkpoint: None,
        stop: None,
    };
    let cfg = config(4, Engine::Direct, 1, 1000);
    assert!(run_job(&SearchJob([1, 0, 0, 0, 0]), &cfg, 0, &ctx).is_err());
    assert!(run_job(&SearchJob([0, 0, 0, 0, 0]), &cfg, 1, &ctx).is_err());
    let tree_cfg = config(3, Engine::Tree, 1, 1000);
    assert!(matches!(
        run_job(&SearchJob([0; 5]), &tree_cfg, 0, &ctx),
        Err(Error::State(_))
    ));
}
