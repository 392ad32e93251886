use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rfdna_core::featsel::{FeatureTransform, SelectionMethod};
use rfdna_core::harness::{
    assemble_training, default_cohort, emit_report, evaluate_trial, fit_transform, read_cohort,
    read_report_json, snr_sweep, synthesize_cohort, train_best_model, write_cohort, CohortManifest,
    ExperimentConfig, FingerprintStore, ModelSelection, StoreView, TrialConfig, VerificationReport,
};
use rfdna_core::io::{write_ranking_csv, write_store_csv};
use rfdna_core::modelsel::write_candidate_ledger;
use rfdna_core::signal::Snr;

#[derive(Parser, Debug)]
#[command(name = "rfdna", version, about = "RF-DNA fingerprint identity verification")]
struct Cli {
    /// Directory holding the cohort, fingerprint stores, models and reports.
    #[arg(long, env = "RFDNA_DATA_ROOT", default_value = "data", global = true)]
    data_root: PathBuf,

    /// Experiment configuration (JSON). Flags below override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(flatten)]
    overrides: Overrides,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct Overrides {
    /// SNR grid in dB, comma separated.
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    snr_grid: Option<Vec<f64>>,
    #[arg(long, global = true)]
    n_z: Option<usize>,
    #[arg(long, global = true)]
    eval_realizations: Option<usize>,
    #[arg(long, global = true)]
    k_folds: Option<usize>,
    #[arg(long, global = true)]
    n_b: Option<usize>,
    #[arg(long, global = true)]
    others_per_radio: Option<usize>,
    /// Comma list (`1,5,10`) or range `start:end:step` (inclusive end).
    #[arg(long, global = true)]
    nr_grid: Option<String>,
    /// Selection methods, comma separated (dra, lda, pca, nca, poeacc, bc, ttest, relieff).
    #[arg(long, global = true, value_delimiter = ',')]
    methods: Option<Vec<String>>,
    #[arg(long, global = true)]
    master_seed: Option<u64>,
    #[arg(long, global = true)]
    pmf_bins: Option<usize>,
    /// SVM cost C.
    #[arg(long, global = true)]
    cost: Option<f64>,
    /// RBF width; default 1/N_r.
    #[arg(long, global = true)]
    zeta: Option<f64>,
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    #[arg(long, global = true)]
    relieff_neighbors: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Synthesize the emitter cohort into IQ files.
    Synth {
        /// Cohort manifest (JSON); the built-in 18-radio cohort when absent.
        #[arg(long)]
        manifest: Option<PathBuf>,
        #[arg(long, default_value_t = 1000)]
        bursts: usize,
        #[arg(long, default_value_t = 0)]
        cohort_seed: u64,
    },
    /// Build one fingerprint store per SNR on the grid.
    Fingerprint {
        /// Also write a CSV copy of each store.
        #[arg(long)]
        csv: bool,
    },
    /// Export the feature ranking (or projection) per claimed radio.
    Select(Scope),
    /// Train and select a verifier per authorized radio.
    Train(Scope),
    /// Score held-out fingerprints against trained verifiers.
    Evaluate(Scope),
    /// Synthesize noise, train and evaluate across the whole SNR grid.
    Sweep {
        #[arg(long, value_delimiter = ',')]
        trials: Option<Vec<u32>>,
    },
    /// Collect evaluation results into CSV, JSON and plot-data files.
    Report,
}

#[derive(Args, Debug)]
struct Scope {
    /// SNR values (dB) to process; default is the whole grid.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    snr: Option<Vec<f64>>,
    /// Trial ids; default 1,2,3.
    #[arg(long, value_delimiter = ',')]
    trials: Option<Vec<u32>>,
}

fn parse_nr_grid(text: &str) -> Result<Vec<usize>> {
    let text = text.trim();
    if let Some((a, rest)) = text.split_once(':') {
        let (b, step) = rest.split_once(':').unwrap_or((rest, "1"));
        let (a, b, step): (usize, usize, usize) = (a.trim().parse()?, b.trim().parse()?, step.trim().parse()?);
        if step == 0 || a > b {
            bail!("bad N_r range {text}");
        }
        return Ok((a..=b).step_by(step).collect());
    }
    text.split(',')
        .map(|t| t.trim().parse().with_context(|| format!("bad N_r value {t:?}")))
        .collect()
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig> {
    let mut c = match &cli.config {
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            // validated after flags are merged
            serde_json::from_str::<ExperimentConfig>(&text).with_context(|| format!("parsing {}", p.display()))?
        }
        None => ExperimentConfig::default(),
    };
    let o = &cli.overrides;
    if let Some(v) = &o.snr_grid {
        c.snr_grid = v.clone();
    }
    macro_rules! set {
        ($($field:ident => $target:expr),*) => {$(
            if let Some(v) = o.$field { $target = v; }
        )*};
    }
    set!(n_z => c.n_z, eval_realizations => c.eval_realizations, k_folds => c.k_folds,
         n_b => c.n_b, master_seed => c.master_seed, pmf_bins => c.pmf_bins,
         cost => c.svm.cost, tolerance => c.svm.tolerance,
         relieff_neighbors => c.selection.relieff_neighbors);
    if o.others_per_radio.is_some() {
        c.others_per_radio = o.others_per_radio;
    }
    if o.zeta.is_some() {
        c.svm.zeta = o.zeta;
    }
    if let Some(g) = &o.nr_grid {
        c.nr_grid = parse_nr_grid(g)?;
    }
    if let Some(m) = &o.methods {
        c.methods = m.iter().map(|s| SelectionMethod::parse(s)).collect::<rfdna_core::Result<_>>()?;
    }
    c.validate()?;
    Ok(c)
}

fn pick_trials(ids: &Option<Vec<u32>>) -> Result<Vec<TrialConfig>> {
    let all = TrialConfig::reference_trials();
    match ids {
        None => Ok(all),
        Some(ids) => ids
            .iter()
            .map(|id| {
                all.iter()
                    .find(|t| t.trial_id == *id)
                    .cloned()
                    .with_context(|| format!("no trial {id}"))
            })
            .collect(),
    }
}

fn pick_snrs(scope: &Scope, config: &ExperimentConfig) -> Vec<f64> {
    scope.snr.clone().unwrap_or_else(|| config.snr_grid.clone())
}

struct Layout(PathBuf);

impl Layout {
    fn cohort(&self) -> PathBuf {
        self.0.join("cohort")
    }
    fn store(&self, snr: f64) -> PathBuf {
        self.0.join("stores").join(format!("snr_{snr}.rfdn"))
    }
    fn models(&self, snr: f64, trial: u32, method: SelectionMethod) -> PathBuf {
        self.0
            .join("models")
            .join(format!("snr_{snr}"))
            .join(format!("trial{trial}"))
            .join(method.name())
    }
    fn rankings(&self, snr: f64, trial: u32) -> PathBuf {
        self.0.join("rankings").join(format!("snr_{snr}")).join(format!("trial{trial}"))
    }
    fn evaluations(&self) -> PathBuf {
        self.0.join("evaluations")
    }
    fn reports(&self) -> PathBuf {
        self.0.join("reports")
    }
}

fn read_store(layout: &Layout, snr: f64) -> Result<FingerprintStore> {
    let path = layout.store(snr);
    FingerprintStore::read(&path)
        .with_context(|| format!("loading {} (run `rfdna fingerprint` first)", path.display()))
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, serde_json::to_string_pretty(value)?).with_context(|| format!("writing {}", path.display()))
}

fn summary(r: &VerificationReport) {
    let worst = r
        .claims
        .iter()
        .flat_map(|c| c.attacks.iter().map(|a| a.fvr))
        .fold(0.0, f64::max);
    println!(
        "trial {} snr {} {}: mean TVR {:.3}, worst rogue FVR {:.3}, gates {}{}",
        r.trial_id,
        r.snr_db,
        r.method,
        r.mean_tvr(),
        worst,
        if r.gates_passed { "pass" } else { "FAIL" },
        if r.eliminated { " (eliminated)" } else { "" }
    );
}

/// Returns whether every requested gate passed.
fn run(cli: &Cli) -> Result<bool> {
    let config = load_config(cli)?;
    let layout = Layout(cli.data_root.clone());
    match &cli.command {
        Command::Synth {
            manifest,
            bursts,
            cohort_seed,
        } => {
            let manifest = match manifest {
                Some(p) => CohortManifest::from_json(&fs::read_to_string(p)?)?,
                None => default_cohort(*bursts, *cohort_seed),
            };
            let cohort = synthesize_cohort(&manifest, &config.pipeline)?;
            write_cohort(&layout.cohort(), &cohort)?;
            println!(
                "wrote {} radios x {} bursts to {}",
                cohort.bursts.len(),
                manifest.bursts_per_radio,
                layout.cohort().display()
            );
            Ok(true)
        }
        Command::Fingerprint { csv } => {
            let cohort = read_cohort(&layout.cohort())?;
            for &snr in &config.snr_grid {
                let store = rfdna_core::harness::generate_dataset(
                    &cohort,
                    Snr::Db(snr),
                    config.total_realizations() as u32,
                    config.master_seed,
                    &config.pipeline,
                )?;
                let path = layout.store(snr);
                store.write(&path)?;
                if *csv {
                    let file = fs::File::create(path.with_extension("csv"))?;
                    write_store_csv(std::io::BufWriter::new(file), store.records())?;
                }
                println!("snr {snr}: {} fingerprints -> {}", store.records().len(), path.display());
            }
            Ok(true)
        }
        Command::Select(scope) => {
            for snr in pick_snrs(scope, &config) {
                let store = read_store(&layout, snr)?;
                for trial in pick_trials(&scope.trials)? {
                    let view = StoreView::restricted(&store, &trial.authorized_ids);
                    let dir = layout.rankings(snr, trial.trial_id);
                    fs::create_dir_all(&dir)?;
                    for claimed in &trial.authorized_ids {
                        let data = assemble_training(&view, &trial, claimed, &config)?;
                        for &method in &config.methods {
                            match fit_transform(&data, method, &config)? {
                                FeatureTransform::Ranked(r) => {
                                    let f = fs::File::create(dir.join(format!("{claimed}_{}.csv", method.name())))?;
                                    write_ranking_csv(std::io::BufWriter::new(f), &r)?;
                                }
                                t @ FeatureTransform::Projection(_) => {
                                    write_json(&dir.join(format!("{claimed}_{}.json", method.name())), &t)?;
                                }
                            }
                        }
                    }
                    println!("snr {snr} trial {}: rankings in {}", trial.trial_id, dir.display());
                }
            }
            Ok(true)
        }
        Command::Train(scope) => {
            let mut all_passed = true;
            for snr in pick_snrs(scope, &config) {
                let store = read_store(&layout, snr)?;
                for trial in pick_trials(&scope.trials)? {
                    let view = StoreView::restricted(&store, &trial.authorized_ids);
                    for &method in &config.methods {
                        let dir = layout.models(snr, trial.trial_id, method);
                        fs::create_dir_all(&dir)?;
                        for claimed in &trial.authorized_ids {
                            let sel = train_best_model(&view, &trial, claimed, method, &config)?;
                            let best = sel.best();
                            all_passed &= best.passes_gates();
                            best.model.save(&dir.join(format!("{claimed}.model.json")))?;
                            write_json(&dir.join(format!("{claimed}.selection.json")), &sel)?;
                            let f = fs::File::create(dir.join(format!("{claimed}.candidates.csv")))?;
                            write_candidate_ledger(std::io::BufWriter::new(f), &sel.candidates, Some(sel.selected))?;
                            println!(
                                "snr {snr} trial {} {method} {claimed}: N_r {} train TVR {:.3} others FVR {:.3}",
                                trial.trial_id, best.n_r, best.tvr_train, best.fvr_others_train
                            );
                        }
                    }
                }
            }
            Ok(all_passed)
        }
        Command::Evaluate(scope) => {
            let mut all_passed = true;
            for snr in pick_snrs(scope, &config) {
                let store = read_store(&layout, snr)?;
                let view = StoreView::unrestricted(&store);
                for trial in pick_trials(&scope.trials)? {
                    for &method in &config.methods {
                        let dir = layout.models(snr, trial.trial_id, method);
                        let models = trial
                            .authorized_ids
                            .iter()
                            .map(|claimed| {
                                let p = dir.join(format!("{claimed}.selection.json"));
                                let text = fs::read_to_string(&p)
                                    .with_context(|| format!("reading {} (run `rfdna train` first)", p.display()))?;
                                Ok(serde_json::from_str::<ModelSelection>(&text)?)
                            })
                            .collect::<Result<Vec<_>>>()?;
                        let report = evaluate_trial(&view, &trial, method, &models, &config)?;
                        summary(&report);
                        all_passed &= report.gates_passed;
                        let name = format!("snr_{snr}_trial{}_{}.json", trial.trial_id, method.name());
                        write_json(&layout.evaluations().join(name), &vec![report])?;
                    }
                }
            }
            Ok(all_passed)
        }
        Command::Sweep { trials } => {
            let cohort = read_cohort(&layout.cohort())?;
            let reports = snr_sweep(&cohort, &pick_trials(trials)?, &config)?;
            reports.iter().for_each(summary);
            let files = emit_report(&reports, &layout.reports())?;
            println!("report: {}", files.csv.display());
            Ok(reports.iter().all(|r| r.gates_passed))
        }
        Command::Report => {
            let dir = layout.evaluations();
            let mut reports = Vec::new();
            let mut paths: Vec<PathBuf> = fs::read_dir(&dir)
                .with_context(|| format!("reading {} (run `rfdna evaluate` first)", dir.display()))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "json"))
                .collect();
            paths.sort();
            for p in &paths {
                reports.extend(read_report_json(p)?);
            }
            if reports.is_empty() {
                bail!("no evaluation results in {}", dir.display());
            }
            reports.sort_by(|a, b| {
                (a.trial_id, a.method.name())
                    .cmp(&(b.trial_id, b.method.name()))
                    .then(b.snr_db.total_cmp(&a.snr_db))
            });
            let files = emit_report(&reports, &layout.reports())?;
            println!(
                "{} reports -> {}, {}, {} plot files",
                reports.len(),
                files.csv.display(),
                files.json.display(),
                files.plots.len()
            );
            Ok(reports.iter().all(|r| r.gates_passed))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
