use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use rayon::prelude::*;
use tqf_core::algebra::{monomial_count, TernaryForm};
use tqf_core::discriminant::{disc_eval, disc_poly, DiscPolyFile};
use tqf_core::fingerprint::group;
use tqf_core::reduce::dedup;
use tqf_core::search::{
    enumerate_jobs_for, job_count, merge_files, parse_records, run_job, CurveRecord, Engine, Layout, RunContext,
    SearchConfig, SearchJob,
};
use tqf_core::tree::MonomialTree;

use crate::manifest::{self, ConfigEcho};
use crate::{
    CliError, CliResult, DiscCommand, FingerprintArgs, JobsArgs, MergeArgs, ReduceArgs, SearchArgs, SearchBounds,
    TreeCommand,
};

fn write_file(path: &Path, text: &str) -> CliResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(format!("creating {}", dir.display()), e))?;
    }
    std::fs::write(path, text).map_err(|e| CliError::io(format!("writing {}", path.display()), e))
}

fn read_records(path: &Path) -> CliResult<Vec<CurveRecord>> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(format!("reading {}", path.display()), e))?;
    Ok(parse_records(&text, &path.display().to_string())?)
}

fn records_text(records: &[CurveRecord]) -> String {
    records.iter().map(|r| format!("{r}\n")).collect()
}

pub fn disc(cmd: DiscCommand) -> CliResult<()> {
    match cmd {
        DiscCommand::Eval { degree, form, coeffs } => {
            let f = match form {
                Some(text) => TernaryForm::parse(degree, &text)?,
                None => {
                    let n = monomial_count(degree);
                    if coeffs.len() != n {
                        return Err(CliError::Usage(format!(
                            "a degree {degree} form needs {n} coefficients, got {}",
                            coeffs.len()
                        )));
                    }
                    TernaryForm::from_i64(degree, &coeffs)?
                }
            };
            println!("{}", disc_eval(&f)?);
        }
        DiscCommand::Poly { degree, output, text } => {
            let file = DiscPolyFile::new(degree, disc_poly(degree)?)?;
            if text {
                write_file(&output, &file.to_text())?;
            } else {
                file.write(&output)?;
            }
            println!("terms {}", file.poly.len());
        }
        DiscCommand::Convert { input, output, text } => {
            let file = DiscPolyFile::read(&input)?;
            if text {
                write_file(&output, &file.to_text())?;
            } else {
                file.write(&output)?;
            }
            println!("terms {}", file.poly.len());
        }
    }
    Ok(())
}

pub fn tree_cache_dir(arg: Option<&Path>) -> PathBuf {
    arg.map(Path::to_path_buf)
        .or_else(|| std::env::var_os("TQF_TREE_CACHE").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("tqf-cache"))
}

fn tree_path(cache: &Path, degree: u32) -> PathBuf {
    cache.join(format!("disc{degree}.tqt"))
}

fn load_tree(cache: Option<&Path>, degree: u32) -> CliResult<MonomialTree> {
    let path = tree_path(&tree_cache_dir(cache), degree);
    if !path.exists() {
        return Err(tqf_core::Error::TreeCacheMissing { path, degree }.into());
    }
    Ok(MonomialTree::load(&path)?)
}

pub fn tree(cmd: TreeCommand) -> CliResult<()> {
    match cmd {
        TreeCommand::Build { degree, cache } => {
            let layout = Layout::for_degree(degree)?;
            let dir = tree_cache_dir(cache.as_deref());
            std::fs::create_dir_all(&dir).map_err(|e| CliError::io(format!("creating {}", dir.display()), e))?;
            let tree = MonomialTree::build(&disc_poly(degree)?, &layout.order)?;
            let path = tree_path(&dir, degree);
            tree.save(&path)?;
            println!("{} nodes -> {}", tree.shape().node_count(), path.display());
        }
        TreeCommand::Info { degree, cache } => {
            let tree = load_tree(cache.as_deref(), degree)?;
            let sizes: Vec<String> = tree.shape().level_sizes().iter().map(|s| s.to_string()).collect();
            println!("nodes {}", tree.shape().node_count());
            println!("levels {}", sizes.join(" "));
        }
    }
    Ok(())
}

pub fn jobs(args: JobsArgs) -> CliResult<()> {
    let SearchBounds { degree, cmax, .. } = args.bounds;
    if !(0..=1000).contains(&cmax) {
        return Err(CliError::Usage(format!("--cmax {cmax} outside 0..=1000")));
    }
    if args.count {
        Layout::for_degree(degree)?;
        println!("{}", job_count(degree, cmax));
        return Ok(());
    }
    let mut out = String::new();
    for (i, j) in enumerate_jobs_for(degree, cmax)?.iter().enumerate() {
        writeln!(out, "{i} {j}").unwrap();
    }
    print!("{out}");
    Ok(())
}

/// Parses `7`, `0..35` (inclusive) and comma lists of both.
pub fn parse_job_ranges(spec: &str, count: u64) -> CliResult<Vec<u64>> {
    let bad = || CliError::Usage(format!("bad --job `{spec}`: use `i`, `a..b` or a comma list"));
    let mut out = Vec::new();
    for part in spec.split(',') {
        let part = part.trim();
        let (a, b) = match part.split_once("..") {
            Some((a, b)) => (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?),
            None => {
                let v: u64 = part.parse().map_err(|_| bad())?;
                (v, v)
            }
        };
        if a > b {
            return Err(bad());
        }
        if b >= count {
            return Err(tqf_core::Error::Range {
                what: "job index",
                value: b.to_string(),
                allowed: format!("0..{count}"),
            }
            .into());
        }
        out.extend(a..=b);
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

pub fn job_file(out: &Path, index: u64, shard: u32, shards: u32, ext: &str) -> PathBuf {
    out.join(format!("job-{index:06}.s{shard}of{shards}.{ext}"))
}

fn config_from(args: &SearchArgs) -> CliResult<SearchConfig> {
    let mut cfg = SearchConfig::new(args.bounds.degree);
    cfg.coeff_bound = args.bounds.cmax;
    cfg.disc_bound = args.bounds.dmax;
    cfg.engine = args.engine.parse::<Engine>()?;
    cfg.shard_count = args.shards;
    cfg.checkpoint_every = args.interval;
    cfg.validate()?;
    Ok(cfg)
}

pub fn echo(cfg: &SearchConfig) -> ConfigEcho {
    ConfigEcho {
        degree: cfg.degree,
        cmax: cfg.coeff_bound,
        dmax: cfg.disc_bound,
        engine: cfg.engine.to_string(),
        shards: cfg.shard_count,
    }
}

pub fn search(args: SearchArgs) -> CliResult<()> {
    let cfg = config_from(&args)?;
    let jobs = enumerate_jobs_for(cfg.degree, cfg.coeff_bound)?;
    let indices = parse_job_ranges(&args.job, jobs.len() as u64)?;
    let shards: Vec<u32> = match args.shard {
        Some(s) if s >= cfg.shard_count => {
            return Err(CliError::Usage(format!("--shard {s} needs --shards > {s}")));
        }
        Some(s) => vec![s],
        None => (0..cfg.shard_count).collect(),
    };
    let tree = match cfg.engine {
        Engine::Tree => Some(load_tree(args.tree_cache.as_deref(), cfg.degree)?),
        Engine::Direct => None,
    };
    let ckpt_dir = args.checkpoint_dir.clone().unwrap_or_else(|| args.out.clone());
    for d in [&args.out, &ckpt_dir] {
        std::fs::create_dir_all(d).map_err(|e| CliError::io(format!("creating {}", d.display()), e))?;
    }
    let units: Vec<(u64, SearchJob, u32)> = indices
        .iter()
        .flat_map(|&i| {
            let job = jobs[i as usize];
            shards.iter().map(move |&s| (i, job, s))
        })
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.threads.max(1))
        .build()
        .map_err(|e| CliError::Internal(e.to_string()))?;
    let totals = Mutex::new((0u64, 0u64));
    pool.install(|| {
        units.par_iter().try_for_each(|&(i, job, s)| -> CliResult<()> {
            let output = job_file(&args.out, i, s, cfg.shard_count, "txt");
            let ckpt = job_file(&ckpt_dir, i, s, cfg.shard_count, "ckpt");
            let ctx = RunContext {
                tree: tree.as_ref(),
                output: &output,
                checkpoint: Some(&ckpt),
                stop: None,
            };
            let o = run_job(&job, &cfg, s, &ctx)?;
            let mut t = totals.lock().unwrap();
            t.0 += o.forms;
            t.1 += o.hits;
            Ok(())
        })
    })?;
    let (forms, hits) = totals.into_inner().unwrap();
    let outputs: Vec<PathBuf> = units
        .iter()
        .map(|&(i, _, s)| job_file(&args.out, i, s, cfg.shard_count, "txt"))
        .collect();
    println!("jobs {} forms {forms} hits {hits}", indices.len());
    manifest::update(args.manifest.as_deref(), Some(echo(&cfg)), "search", hits, &[], &outputs)?;
    Ok(())
}

/// Files named directly, then the `.txt` files of named directories in
/// sorted order.
fn expand_inputs(inputs: &[PathBuf]) -> CliResult<Vec<PathBuf>> {
    let mut out = Vec::new();
    for p in inputs {
        if p.is_dir() {
            let rd = std::fs::read_dir(p).map_err(|e| CliError::io(format!("listing {}", p.display()), e))?;
            let mut files: Vec<PathBuf> = rd
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| f.extension().is_some_and(|x| x == "txt"))
                .collect();
            files.sort();
            out.extend(files);
        } else {
            out.push(p.clone());
        }
    }
    Ok(out)
}

pub fn merge(args: MergeArgs) -> CliResult<usize> {
    let inputs = expand_inputs(&args.inputs)?;
    let n = merge_files(&inputs, &args.output)?;
    println!("records {n}");
    manifest::update(args.manifest.as_deref(), None, "merge", n as u64, &inputs, std::slice::from_ref(&args.output))?;
    Ok(n)
}

pub fn reduce(args: ReduceArgs) -> CliResult<usize> {
    let mut records = read_records(&args.input)?;
    let before = records.len();
    let mut audit = String::new();
    for &b in &args.bounds {
        let out = dedup(records, b)?;
        for m in &out.merges {
            writeln!(audit, "{b} ; {} ; {} ; {}", m.removed, m.kept, m.word).unwrap();
        }
        if out.over_bound > 0 {
            eprintln!("bound {b}: {} records exceed the bound and were kept as is", out.over_bound);
        }
        records = out.kept;
    }
    write_file(&args.output, &records_text(&records))?;
    let mut outputs = vec![args.output.clone()];
    if let Some(a) = &args.audit {
        write_file(a, &audit)?;
        outputs.push(a.clone());
    }
    println!("records {before} kept {}", records.len());
    manifest::update(
        args.manifest.as_deref(),
        None,
        "reduce",
        records.len() as u64,
        std::slice::from_ref(&args.input),
        &outputs,
    )?;
    Ok(records.len())
}

pub fn fingerprint(args: FingerprintArgs) -> CliResult<usize> {
    let records = read_records(&args.input)?;
    let g = group(&records, args.pmax)?;
    let lines: String = g.fingerprints.iter().map(|f| format!("{f}\n")).collect();
    write_file(&args.output, &lines)?;
    let collisions: Vec<&Vec<usize>> = g.collisions().collect();
    let mut report = String::new();
    writeln!(report, "classes {}", g.classes.len()).unwrap();
    writeln!(report, "collisions {}", collisions.len()).unwrap();
    for (k, class) in collisions.iter().enumerate() {
        writeln!(report, "class {} size {}", k + 1, class.len()).unwrap();
        for &i in class.iter() {
            writeln!(report, "  {}", records[i]).unwrap();
        }
    }
    write_file(&args.report, &report)?;
    println!("records {} classes {} collisions {}", records.len(), g.classes.len(), collisions.len());
    manifest::update(
        args.manifest.as_deref(),
        None,
        "fingerprint",
        g.classes.len() as u64,
        std::slice::from_ref(&args.input),
        &[args.output.clone(), args.report.clone()],
    )?;
    Ok(g.classes.len())
}

pub fn verify(path: &Path) -> CliResult<()> {
    let m = manifest::Manifest::load_or_default(path)?;
    let stale = m.verify(path.parent().unwrap_or(Path::new("")))?;
    for p in &stale {
        println!("stale {}", p.display());
    }
    if stale.is_empty() {
        println!("ok {} stages", m.stages.len());
        Ok(())
    } else {
        Err(CliError::Internal(format!("{} output files differ from the manifest", stale.len())))
    }
}
