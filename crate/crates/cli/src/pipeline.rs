//! Search, merge, reduce and fingerprint in one working directory, with a
//! manifest beside the outputs.

use tqf_core::search::job_count;

use crate::commands;
use crate::{CliError, CliResult, FingerprintArgs, MergeArgs, PipelineArgs, ReduceArgs, SearchArgs};

pub const MANIFEST: &str = "manifest.toml";

pub fn run(args: PipelineArgs) -> CliResult<()> {
    let work = &args.work;
    std::fs::create_dir_all(work).map_err(|e| CliError::io(format!("creating {}", work.display()), e))?;
    let manifest = work.join(MANIFEST);
    let at = |name: &str| work.join(name);
    let jobs = job_count(args.bounds.degree, args.bounds.cmax.max(0));
    if jobs == 0 {
        return Err(CliError::Usage("the search has no jobs".into()));
    }
    let cmax = args.bounds.cmax;
    let bounds = if args.bounds_reduce.is_empty() {
        vec![cmax.max(1), (cmax * cmax).max(1)]
    } else {
        args.bounds_reduce.clone()
    };

    commands::search(SearchArgs {
        bounds: args.bounds.clone(),
        job: format!("0..{}", jobs - 1),
        shard: None,
        shards: 1,
        engine: args.engine.clone(),
        checkpoint_dir: None,
        interval: 64,
        out: at("search"),
        threads: args.threads,
        tree_cache: args.tree_cache.clone(),
        manifest: Some(manifest.clone()),
    })?;
    commands::merge(MergeArgs {
        inputs: vec![at("search")],
        output: at("merged.txt"),
        manifest: Some(manifest.clone()),
    })?;
    commands::reduce(ReduceArgs {
        input: at("merged.txt"),
        output: at("reduced.txt"),
        bounds,
        audit: Some(at("reduce-audit.txt")),
        manifest: Some(manifest.clone()),
    })?;
    commands::fingerprint(FingerprintArgs {
        input: at("reduced.txt"),
        output: at("fingerprints.txt"),
        report: at("collisions.txt"),
        pmax: args.pmax,
        manifest: Some(manifest.clone()),
    })?;
    println!("manifest {}", manifest.display());
    Ok(())
}
