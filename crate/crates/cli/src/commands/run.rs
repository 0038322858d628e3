use std::collections::{HashMap, HashSet};
use std::fs::{self, OpenOptions};
use std::io::{BufReader, Write};
use std::path::Path;
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::{mpsc, Arc};
use std::thread;

use anyhow::Context;
use nestbench_core::dataset::read_jsonl;
use nestbench_core::prompt::{build_prompt_with, PromptDump, PromptOptions};
use nestbench_core::{DatasetRecord, PromptMethod};
use nestbench_gateway::mock::{NoisyMock, OracleMock};
use nestbench_gateway::{
    ApiKey, ChatCompletionsProvider, Gateway, GatewayConfig, GatewayError, GatewayStats, Provider, ResponseCache, SystemClock,
};

use crate::args::{ProviderSpec, RunArgs};
use crate::config::RunConfig;
use crate::error::usage;
use crate::io::{jsonl_bytes, sha256_file, write_atomic};
use crate::manifest::RunManifest;
use crate::predictions::{read_partial, Prediction, PREDICTIONS_FILE};

pub const PROMPTS_FILE: &str = "prompts.jsonl";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOutcome {
    /// Records answered by this invocation.
    pub answered: usize,
    /// Records already present from an earlier invocation.
    pub reused: usize,
    pub stats: GatewayStats,
}

pub fn build_gateway(spec: &ProviderSpec, cfg: &GatewayConfig, cache: Option<&Path>) -> anyhow::Result<Gateway> {
    let provider: Arc<dyn Provider> = match spec {
        ProviderSpec::ChatCompletions => {
            let key = ApiKey::from_env(&cfg.api_key_env).map_err(|e| usage(e.to_string()))?;
            Arc::new(ChatCompletionsProvider::new(
                cfg.base_url.clone(),
                key,
                std::time::Duration::from_secs(cfg.timeout_secs),
            ))
        }
        ProviderSpec::MockOracle => Arc::new(OracleMock),
        ProviderSpec::MockNoisy { error_rate, seed } => Arc::new(NoisyMock { error_rate: *error_rate, seed: *seed }),
    };
    let mut cfg = cfg.clone();
    if *spec != ProviderSpec::ChatCompletions {
        // local mocks have no request quota
        cfg.requests_per_minute = None;
    }
    Ok(Gateway::new(provider, &cfg, Arc::new(SystemClock::default()), cache.map(ResponseCache::new)))
}

fn load_dataset(path: &Path) -> anyhow::Result<Vec<DatasetRecord>> {
    let file = fs::File::open(path).with_context(|| format!("opening dataset {}", path.display()))?;
    let records = read_jsonl(BufReader::new(file)).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    if records.is_empty() {
        return Err(usage(format!("dataset {} is empty", path.display())));
    }
    let mut seen = HashSet::new();
    for r in &records {
        if !seen.insert(r.id.as_str()) {
            return Err(usage(format!("duplicate record id `{}` in {}", r.id, path.display())));
        }
        if r.task != records[0].task {
            return Err(usage(format!("dataset {} mixes tasks {} and {}", path.display(), records[0].task, r.task)));
        }
    }
    Ok(records)
}

fn samples_per_record(method: PromptMethod, opts: &PromptOptions) -> u32 {
    if method == PromptMethod::SelfConsistency {
        opts.self_consistency_samples.max(1)
    } else {
        1
    }
}

fn now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

pub fn run(args: &RunArgs) -> anyhow::Result<RunOutcome> {
    let config = RunConfig::load(args.config.as_deref())?;
    let opts = config.prompt.options();
    let records = load_dataset(&args.dataset)?;
    let task = records[0].task;
    fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;

    let stamp = now();
    let mut manifest = RunManifest {
        task,
        method: args.method,
        model: args.model.clone(),
        provider: args.provider.to_string(),
        dataset: args.dataset.clone(),
        dataset_sha256: sha256_file(&args.dataset)?,
        seed: records[0].seed,
        records: records.len(),
        samples_per_record: samples_per_record(args.method, &opts),
        config_hash: config.hash(),
        cache_dir: args.cache.clone(),
        created_at: stamp.clone(),
        updated_at: stamp,
        completed: false,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
    };
    let previous = RunManifest::load(&args.out)?;
    if let Some(prev) = &previous {
        if !prev.same_run(&manifest) {
            return Err(usage(format!(
                "{} already holds a different run ({} / {} / {}); use a fresh --out",
                args.out.display(),
                prev.task,
                prev.method,
                prev.model
            )));
        }
        manifest.created_at = prev.created_at.clone();
    }

    let pred_path = args.out.join(PREDICTIONS_FILE);
    let known: HashSet<&str> = records.iter().map(|r| r.id.as_str()).collect();
    let mut done: HashMap<String, Prediction> = read_partial(&pred_path)?
        .into_iter()
        .filter(|p| known.contains(p.id.as_str()) && p.outputs().len() == manifest.samples_per_record as usize)
        .map(|p| (p.id.clone(), p))
        .collect();
    let reused = done.len();
    let pending: Vec<&DatasetRecord> = records.iter().filter(|r| !done.contains_key(&r.id)).collect();
    let ordered = |done: &HashMap<String, Prediction>| -> Vec<Prediction> {
        records.iter().filter_map(|r| done.get(&r.id).cloned()).collect()
    };

    if args.dump_prompts {
        let dumps = records
            .iter()
            .map(|r| {
                let b = build_prompt_with(task, args.method, r, &opts)?;
                Ok(PromptDump { id: r.id.clone(), method: args.method, messages: b.messages, followup: b.followup })
            })
            .collect::<anyhow::Result<Vec<_>>>()?;
        let bytes = jsonl_bytes(&dumps)?;
        let path = args.out.join(PROMPTS_FILE);
        if fs::read(&path).ok().as_deref() != Some(bytes.as_slice()) {
            write_atomic(&path, &bytes)?;
        }
    }

    if pending.is_empty() {
        let bytes = jsonl_bytes(&ordered(&done))?;
        let clean = fs::read(&pred_path).ok().as_deref() == Some(bytes.as_slice());
        if !(clean && previous.as_ref().is_some_and(|p| p.completed)) {
            write_atomic(&pred_path, &bytes)?;
            manifest.completed = true;
            manifest.save(&args.out)?;
        }
        log::info!("nothing to do: all {} records already answered", records.len());
        return Ok(RunOutcome { answered: 0, reused, stats: GatewayStats::default() });
    }

    let gateway = build_gateway(&args.provider, &config.gateway, args.cache.as_deref())?;
    log::info!(
        "{} records pending ({} reused) for {task} / {} on {} via {}",
        pending.len(),
        reused,
        args.method,
        args.model,
        gateway.provider_id()
    );
    // restart the append log from the readable lines only
    write_atomic(&pred_path, &jsonl_bytes(&ordered(&done))?)?;
    manifest.save(&args.out)?;

    let next = AtomicUsize::new(0);
    let failed = AtomicBool::new(false);
    let workers = config.gateway.max_concurrency.clamp(1, pending.len());
    let mut first_error: Option<GatewayError> = None;
    let mut write_error: Option<anyhow::Error> = None;
    let mut answered = 0usize;
    thread::scope(|s| {
        let (tx, rx) = mpsc::channel::<Result<Prediction, anyhow::Error>>();
        for _ in 0..workers {
            let tx = tx.clone();
            let (next, failed, pending, gateway, opts) = (&next, &failed, &pending, &gateway, &opts);
            s.spawn(move || loop {
                if failed.load(Ordering::SeqCst) {
                    break;
                }
                let i = next.fetch_add(1, Ordering::SeqCst);
                let Some(rec) = pending.get(i) else { break };
                let result = build_prompt_with(task, args.method, rec, opts)
                    .map_err(anyhow::Error::from)
                    .and_then(|bundle| {
                        gateway
                            .run_bundle(&args.model, &bundle, config.gateway.max_output_tokens)
                            .map_err(anyhow::Error::from)
                    })
                    .map(|outs| Prediction::new(rec.id.clone(), outs));
                if result.is_err() {
                    failed.store(true, Ordering::SeqCst);
                }
                if tx.send(result).is_err() {
                    break;
                }
            });
        }
        drop(tx);
        let mut log_file = match OpenOptions::new().append(true).open(&pred_path) {
            Ok(f) => Some(f),
            Err(e) => {
                write_error = Some(e.into());
                failed.store(true, Ordering::SeqCst);
                None
            }
        };
        let step = (pending.len() / 10).max(1);
        for msg in rx {
            match msg {
                Ok(p) => {
                    if let Some(f) = log_file.as_mut() {
                        let line = serde_json::to_string(&p).expect("prediction serializes");
                        if let Err(e) = writeln!(f, "{line}").and_then(|_| f.flush()) {
                            write_error.get_or_insert(e.into());
                            failed.store(true, Ordering::SeqCst);
                        }
                    }
                    done.insert(p.id.clone(), p);
                    answered += 1;
                    if answered.is_multiple_of(step) {
                        log::info!("{answered}/{} records answered", pending.len());
                    }
                }
                Err(e) => {
                    if first_error.is_none() && write_error.is_none() {
                        match e.downcast::<GatewayError>() {
                            Ok(g) => first_error = Some(g),
                            Err(other) => write_error = Some(other),
                        }
                    }
                }
            }
        }
    });

    if let Some(e) = write_error {
        return Err(e.context(format!("run stopped after {answered} new records; progress kept in {}", pred_path.display())));
    }
    if let Some(e) = first_error {
        let hint = if matches!(e, GatewayError::MissingCredential(_)) { Some(usage(e.to_string())) } else { None };
        return Err(hint.unwrap_or_else(|| anyhow::Error::from(e)).context(format!(
            "run stopped after {answered} new records; progress kept in {}",
            pred_path.display()
        )));
    }
    write_atomic(&pred_path, &jsonl_bytes(&ordered(&done))?)?;
    manifest.completed = true;
    manifest.updated_at = now();
    manifest.save(&args.out)?;
    Ok(RunOutcome { answered, reused, stats: gateway.stats() })
}
