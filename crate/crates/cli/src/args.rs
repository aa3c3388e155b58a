use std::net::SocketAddr;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use schemamatch::config::{MatchConfig, MatcherKind, SelectionMode, TableStrategy, TopN};
use schemamatch::embedding::LabelAggregation;
use schemamatch::exec::Execution;
use schemamatch::sampling::SamplingStrategy;
use schemamatch::Error;

use crate::inputs::InstancesSpec;
use crate::settings::{FileConfig, ProviderSettings, ProviderSpec};

#[derive(Debug, Parser)]
#[command(name = "schemamatch", version, about = "Embedding-based schema matching")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Create a run and propose table candidates.
    MatchTables {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        settings: SettingsArgs,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Confirm or reject the proposed table candidates of a run.
    Review {
        #[command(flatten)]
        run: RunArgs,
    },
    /// Match attributes of the surviving candidates and report.
    MatchAttributes {
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        provider: ProviderArgs,
        /// Write correspondences (JSON lines) here instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Complete pipeline without review.
    E2e {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        settings: SettingsArgs,
        /// Directory for candidates.jsonl, correspondences.jsonl and report.json.
        #[arg(long)]
        output_dir: PathBuf,
        #[arg(long, default_value = "e2e")]
        run_id: String,
    },
    /// Run a benchmark suite and write per-problem and averaged scores.
    Eval {
        /// Suite manifest (JSON).
        #[arg(long)]
        suite: PathBuf,
        #[command(flatten)]
        settings: SettingsArgs,
        #[arg(long)]
        output: Option<PathBuf>,
        /// Record wall-clock time per problem.
        #[arg(long)]
        timings: bool,
    },
    /// Serve the review API.
    Serve {
        #[arg(long, env = "SCHEMAMATCH_RUNS", default_value = "runs")]
        runs: PathBuf,
        #[arg(long, default_value = "127.0.0.1:8080")]
        addr: SocketAddr,
        #[command(flatten)]
        settings: SettingsArgs,
    },
    /// Precompute column representations of a schema (JSON lines).
    EmbedCache {
        #[arg(long)]
        schema: PathBuf,
        #[arg(long)]
        instances: PathBuf,
        #[command(flatten)]
        settings: SettingsArgs,
        #[arg(long)]
        output: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Jsonl,
}

#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    #[arg(long)]
    pub source: PathBuf,
    #[arg(long)]
    pub target: PathBuf,
    /// Directory holding `<table>.csv` or `<schema>.<table>.csv` files.
    #[arg(long)]
    pub source_instances: Option<PathBuf>,
    #[arg(long)]
    pub target_instances: Option<PathBuf>,
    /// Gold alignment for scoring.
    #[arg(long)]
    pub gold: Option<PathBuf>,
}

impl InputArgs {
    pub fn source_spec(&self) -> Option<InstancesSpec> {
        self.source_instances.clone().map(InstancesSpec::Dir)
    }

    pub fn target_spec(&self) -> Option<InstancesSpec> {
        self.target_instances.clone().map(InstancesSpec::Dir)
    }
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[arg(long, env = "SCHEMAMATCH_RUNS", default_value = "runs")]
    pub runs: PathBuf,
    /// Defaults to a fresh id for new runs.
    #[arg(long)]
    pub run_id: Option<String>,
}

/// Config file and embedding provider selection.
#[derive(Debug, Clone, Default, Args)]
pub struct ProviderArgs {
    /// TOML file with `[match]` and `[provider]` sections.
    #[arg(long, env = "SCHEMAMATCH_CONFIG")]
    pub config: Option<PathBuf>,
    /// hash[:D], fixture:PATH or remote[:URL].
    #[arg(long, env = "SCHEMAMATCH_PROVIDER")]
    pub provider: Option<ProviderSpec>,
    #[arg(long, env = "SCHEMAMATCH_PROVIDER_URL")]
    pub provider_url: Option<String>,
    /// Seconds.
    #[arg(long, env = "SCHEMAMATCH_PROVIDER_TIMEOUT")]
    pub provider_timeout: Option<f64>,
}

impl ProviderArgs {
    pub fn file(&self) -> Result<FileConfig, Error> {
        match &self.config {
            Some(p) => FileConfig::load(p),
            None => Ok(FileConfig::default()),
        }
    }

    pub fn resolve(&self, file: &FileConfig) -> Result<ProviderSettings, Error> {
        let mut provider = ProviderSettings {
            spec: match &file.provider.spec {
                Some(s) => s.parse()?,
                None => ProviderSpec::default(),
            },
            remote: file.provider.remote.clone(),
        };
        if let Some(spec) = &self.provider {
            provider.spec = spec.clone();
        }
        if let Some(url) = &self.provider_url {
            provider.remote.url = url.clone();
        }
        if let Some(t) = self.provider_timeout {
            if !(t > 0.0) {
                return Err(Error::validation(format!("provider timeout must be positive, got {t}")));
            }
            provider.remote.timeout_secs = t;
        }
        Ok(provider)
    }
}

/// Flags mirroring the matching configuration. Unset flags keep the value
/// from the config file or the built-in default.
#[derive(Debug, Clone, Default, Args)]
pub struct SettingsArgs {
    #[command(flatten)]
    pub provider: ProviderArgs,
    #[arg(long)]
    pub t: Option<f64>,
    /// Integer or `unlimited`.
    #[arg(long)]
    pub n: Option<TopN>,
    #[arg(long = "t-a")]
    pub t_a: Option<f64>,
    #[arg(long)]
    pub col_ratio: Option<f64>,
    #[arg(long)]
    pub attr_threshold: Option<f64>,
    /// none, distinct, n_random, n_most_common or adaptive, optionally `:N`.
    #[arg(long)]
    pub sampling: Option<String>,
    /// threshold, top-k:K or one-to-one.
    #[arg(long)]
    pub selection: Option<SelectionMode>,
    #[arg(long)]
    pub strategy: Option<TableStrategy>,
    /// Comma-separated: nb, cb, ib.
    #[arg(long, value_delimiter = ',')]
    pub matchers: Option<Vec<MatcherKind>>,
    /// whole, sum, mean or coherent_groups.
    #[arg(long)]
    pub label_aggregation: Option<LabelAggregation>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Disable data parallelism.
    #[arg(long)]
    pub sequential: bool,
}

#[derive(Debug)]
pub struct Settings {
    pub matching: MatchConfig,
    pub provider: ProviderSettings,
}

fn parse_sampling(s: &str, cfg: &mut MatchConfig) -> Result<(), Error> {
    let (strategy, n) = match s.split_once(':') {
        Some((a, b)) => (a, Some(b)),
        None => (s, None),
    };
    cfg.sampling.strategy = strategy.parse::<SamplingStrategy>()?;
    if let Some(n) = n {
        let n = n
            .parse::<usize>()
            .map_err(|_| Error::validation(format!("invalid sample size in `{s}`")))?;
        cfg.sampling.n = n;
        cfg.sampling.n_max_cap = n;
    }
    Ok(())
}

impl SettingsArgs {
    /// Defaults, then the config file, then flags and environment.
    pub fn resolve(&self) -> Result<Settings, Error> {
        let file = self.provider.file()?;
        let provider = self.provider.resolve(&file)?;
        let mut m = file.matching;
        if let Some(v) = self.t {
            m.t = v;
        }
        if let Some(v) = self.n {
            m.n = v;
        }
        if let Some(v) = self.t_a {
            m.t_a = v;
        }
        if let Some(v) = self.col_ratio {
            m.col_ratio = v;
        }
        if let Some(v) = self.attr_threshold {
            m.attr_threshold = v;
        }
        if let Some(s) = &self.sampling {
            parse_sampling(s, &mut m)?;
        }
        if let Some(v) = self.selection {
            m.selection_mode = v;
        }
        if let Some(v) = self.strategy {
            m.strategy = v;
        }
        if let Some(v) = &self.matchers {
            m.matchers = v.clone();
        }
        if let Some(v) = self.label_aggregation {
            m.label_aggregation = v;
        }
        if let Some(v) = self.seed {
            m.sampling.seed = v;
        }
        if self.sequential {
            m.execution = Execution::Sequential;
        }
        m.validate()?;
        Ok(Settings { matching: m, provider })
    }
}
