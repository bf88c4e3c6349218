//! Command-line front end. `main.rs` only forwards to [`main`].

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::acceptance::{self, SuiteOptions};
use crate::adversaries::{self, RegistryError};
use crate::bbf::BbfFamily;
use crate::games::{
    self, ClassicalGameConfig, GameError, GameReport, IndGameConfig, OracleProfile, QcpGameConfig, QcpGameKind,
    RunOptions, UdGameConfig, Verdict,
};
use crate::kat;
use crate::qcp::BackendTag;
use crate::schemes::{self, SchemeSpecError};
use crate::signatures::SigSchemeTag;

pub const GAMES: &[&str] = &[
    "weak_qcp", "flip_qcp", "lor_qcp", "weak_qcp_ria", "flip_qcp_ria", "lor_qcp_ria", "ud", "ud1", "ind", "lor_cpa",
    "wprf", "ul", "flip_ul", "seuf_cma",
];

pub const EXIT_WITHIN: u8 = 0;
pub const EXIT_EXCEEDS: u8 = 1;
pub const EXIT_INCONCLUSIVE: u8 = 2;
pub const EXIT_UNKNOWN_NAME: u8 = 3;
pub const EXIT_INVALID: u8 = 4;
pub const EXIT_IO: u8 = 5;

#[derive(Debug, Parser)]
#[command(name = "udlab", version, about = "Run uncloneable-decryptor and copy-protection security games")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
#[allow(clippy::large_enum_variant)]
pub enum Command {
    /// Run one game and print its JSON report.
    Run(RunArgs),
    /// Check (or rewrite) the known-answer vectors.
    Kat {
        /// Rewrite the vector files instead of checking them.
        #[arg(long)]
        regenerate: bool,
        /// Vector directory; defaults to the embedded copies when checking.
        #[arg(long)]
        dir: Option<PathBuf>,
    },
    /// Run a fixed test suite.
    Suite {
        #[arg(value_enum)]
        suite: SuiteName,
        /// Only criteria whose id, name or keyword contains this string.
        #[arg(long)]
        filter: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 1)]
        threads: usize,
    },
    /// List games, schemes, backends and adversaries.
    List,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SuiteName {
    Acceptance,
}

#[derive(Debug, Default, Clone, Args)]
pub struct RunArgs {
    /// Key=value or JSON file with any of the options below; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub game: Option<String>,
    #[arg(long)]
    pub scheme: Option<String>,
    #[arg(long)]
    pub backend: Option<String>,
    #[arg(long)]
    pub adversary: Option<String>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub trials: Option<u64>,
    /// Master seed; drawn from OS entropy and reported when absent.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub profile: Option<String>,
    #[arg(long)]
    pub slack: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long)]
    pub lambda: Option<usize>,
    #[arg(long)]
    pub family: Option<String>,
    /// Signature scheme for seuf_cma.
    #[arg(long)]
    pub sig: Option<String>,
    /// Signing-query budget for seuf_cma.
    #[arg(long)]
    pub max_queries: Option<usize>,
    /// Shadow the decryption oracle with the simulated one (ud games).
    #[arg(long)]
    pub shadow_sim: bool,
    /// Include wall-clock time in the report.
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("unknown {kind} `{name}`")]
    Unknown { kind: &'static str, name: String },
    #[error("invalid parameters: {0}")]
    Invalid(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Unknown { .. } => EXIT_UNKNOWN_NAME,
            CliError::Invalid(_) => EXIT_INVALID,
            CliError::Io(_) => EXIT_IO,
        }
    }
}

impl From<GameError> for CliError {
    fn from(e: GameError) -> Self {
        match e {
            GameError::InvalidParams(s) => CliError::Invalid(s),
            other => CliError::Invalid(other.to_string()),
        }
    }
}

impl From<RegistryError> for CliError {
    fn from(e: RegistryError) -> Self {
        match e {
            RegistryError::Unknown(name) => CliError::Unknown { kind: "adversary", name },
            other => CliError::Invalid(other.to_string()),
        }
    }
}

impl From<SchemeSpecError> for CliError {
    fn from(e: SchemeSpecError) -> Self {
        match e {
            SchemeSpecError::UnknownName(name) => CliError::Unknown { kind: "scheme component", name },
            other => CliError::Invalid(other.to_string()),
        }
    }
}

impl From<kat::KatError> for CliError {
    fn from(e: kat::KatError) -> Self {
        CliError::Io(e.to_string())
    }
}

pub fn verdict_code(v: Verdict) -> u8 {
    match v {
        Verdict::WithinBound => EXIT_WITHIN,
        Verdict::ExceedsBound => EXIT_EXCEEDS,
        Verdict::Inconclusive => EXIT_INCONCLUSIVE,
    }
}

/// Reads a config file: a JSON object, or `key = value` lines with `#` comments.
pub fn read_config(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    parse_config(&text)
}

pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut out = BTreeMap::new();
    if text.trim_start().starts_with('{') {
        let map: serde_json::Map<String, serde_json::Value> =
            serde_json::from_str(text).map_err(|e| CliError::Invalid(format!("config: {e}")))?;
        for (k, v) in map {
            let v = match v {
                serde_json::Value::String(s) => s,
                other => other.to_string(),
            };
            out.insert(k.replace('-', "_"), v);
        }
        return Ok(out);
    }
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| CliError::Invalid(format!("config line {}: {line:?}", i + 1)))?;
        out.insert(k.trim().replace('-', "_"), v.trim().trim_matches('"').to_string());
    }
    Ok(out)
}

fn parse_value<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, CliError> {
    v.parse().map_err(|_| CliError::Invalid(format!("{key} = {v:?}")))
}

fn parse_flag(key: &str, v: &str) -> Result<bool, CliError> {
    match v {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(CliError::Invalid(format!("{key} = {v:?}"))),
    }
}

impl RunArgs {
    /// Fills unset fields from `config`; flags already given win.
    pub fn merge_config(mut self, config: &BTreeMap<String, String>) -> Result<Self, CliError> {
        macro_rules! fill {
            ($($field:ident),*) => {$(
                if self.$field.is_none() {
                    if let Some(v) = config.get(stringify!($field)) {
                        self.$field = Some(parse_value(stringify!($field), v)?);
                    }
                }
            )*};
        }
        fill!(game, scheme, backend, adversary, n, k, trials, seed, profile, slack, out, threads, lambda, family, sig, max_queries);
        for (key, flag) in [("shadow_sim", &mut self.shadow_sim), ("timing", &mut self.timing)] {
            if let Some(v) = config.get(key) {
                *flag |= parse_flag(key, v)?;
            }
        }
        const KNOWN: &[&str] = &[
            "game", "scheme", "backend", "adversary", "n", "k", "trials", "seed", "profile", "slack", "out", "threads",
            "lambda", "family", "sig", "max_queries", "shadow_sim", "timing",
        ];
        if let Some(bad) = config.keys().find(|k| !KNOWN.contains(&k.as_str())) {
            return Err(CliError::Unknown { kind: "config key", name: bad.clone() });
        }
        Ok(self)
    }
}

fn unknown(kind: &'static str, name: &str) -> CliError {
    CliError::Unknown { kind, name: name.to_string() }
}

/// Runs the configured game. The report's `seed` is the one actually used.
pub fn run_game(args: &RunArgs) -> Result<GameReport, CliError> {
    let game = args.game.as_deref().ok_or_else(|| CliError::Invalid("--game is required".into()))?;
    let backend_name = args.backend.as_deref().unwrap_or("ideal_token");
    let backend = BackendTag::parse(backend_name).ok_or_else(|| unknown("backend", backend_name))?;
    let family = match args.family.as_deref() {
        None => BbfFamily::KeyedMix,
        Some(f) => BbfFamily::parse(f).ok_or_else(|| unknown("family", f))?,
    };
    let profile = |default: &str| -> Result<OracleProfile, CliError> {
        let p = args.profile.as_deref().unwrap_or(default);
        OracleProfile::parse(p).ok_or_else(|| unknown("oracle profile", p))
    };
    let scheme = |default: &str| schemes::parse_scheme(args.scheme.as_deref().unwrap_or(default), backend);
    let adversary = |default: &'static str| args.adversary.clone().unwrap_or_else(|| default.to_string());
    let (n, k) = (args.n.unwrap_or(1), args.k.unwrap_or(1));
    let mut run = RunOptions::new(args.trials.unwrap_or(1000), args.seed.unwrap_or_else(rand::random))
        .threads(args.threads.unwrap_or(1))
        .timing(args.timing);
    if let Some(s) = args.slack {
        run = run.slack(s);
    }
    // The tabulating learners cap the input length, so the learning games default to 8 bits.
    let learning = matches!(game, "ul" | "flip_ul");
    let classical = || {
        let cfg = ClassicalGameConfig::new(run).family(family);
        match args.lambda {
            Some(l) => cfg.lambda(l),
            None if learning => cfg.lambda(8),
            None => cfg,
        }
    };

    let report = match game {
        "weak_qcp" | "flip_qcp" | "lor_qcp" | "weak_qcp_ria" | "flip_qcp_ria" | "lor_qcp_ria" => {
            let kind = match &game[..game.find('_').unwrap_or(game.len())] {
                "weak" => QcpGameKind::Weak,
                "flip" => QcpGameKind::Flip,
                _ => QcpGameKind::Lor,
            };
            let mut cfg = QcpGameConfig::new(backend, n, k, run).family(family).ria(game.ends_with("_ria"));
            if let Some(l) = args.lambda {
                cfg = cfg.lambda(l);
            }
            games::run_qcp_game(kind, &cfg, adversaries::qcp_adversary(&adversary("honest"))?.as_ref())?
        }
        "ud" | "ud1" => {
            let bit = game == "ud1";
            let s = scheme(if bit { "ud1_cpa" } else { "extend(ud1_cpa)" })?;
            let mut cfg = UdGameConfig::new(s, n, k, profile("cpa")?, run).bit_variant(bit).shadow_sim(args.shadow_sim);
            if let Some(l) = args.lambda {
                cfg = cfg.lambda(l);
            }
            games::run_ud(&cfg, adversaries::ud_adversary(&adversary("honest"))?.as_ref())?
        }
        "ind" => {
            let mut cfg = IndGameConfig::new(scheme("ud1_cpa")?, profile("cpa")?, run);
            if let Some(l) = args.lambda {
                cfg = cfg.lambda(l);
            }
            games::run_ind(&cfg, adversaries::ind_adversary(&adversary("random"))?.as_ref())?
        }
        "lor_cpa" => games::run_lor_cpa(
            &scheme("se_bbf")?,
            &classical(),
            adversaries::lor_cpa_adversary(&adversary("always_zero"))?.as_ref(),
        )?,
        "wprf" => games::run_wprf(&classical(), adversaries::wprf_distinguisher(&adversary("majority"))?.as_ref())?,
        "ul" => games::run_ul(&classical(), adversaries::ul_learner(&adversary("memorizer"))?.as_ref())?,
        "flip_ul" => games::run_flip_ul(&classical(), adversaries::flip_ul_learner(&adversary("half_table"))?.as_ref())?,
        "seuf_cma" => {
            let name = args.sig.as_deref().unwrap_or("lamport_merkle");
            let sig = SigSchemeTag::parse(name).ok_or_else(|| unknown("signature scheme", name))?;
            let forger = adversaries::forger(&adversary("replay"))?;
            games::run_seuf_cma(sig, args.max_queries.unwrap_or(8), &classical(), forger.as_ref())?
        }
        other => return Err(unknown("game", other)),
    };
    Ok(report)
}

fn write_or_print(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn cmd_run(args: RunArgs) -> Result<u8, CliError> {
    let args = match &args.config {
        Some(path) => args.clone().merge_config(&read_config(path)?)?,
        None => args,
    };
    let report = run_game(&args)?;
    if args.seed.is_none() {
        eprintln!("seed: {} (drawn from entropy)", report.seed);
    }
    write_or_print(args.out.as_deref(), &report.to_json())?;
    eprintln!(
        "{}: mean {:.4} ± {:.4}, threshold {} -> {:?}",
        report.game, report.mean, report.ci.half_width, report.threshold, report.verdict
    );
    Ok(verdict_code(report.verdict))
}

fn cmd_kat(regenerate: bool, dir: Option<PathBuf>) -> Result<u8, CliError> {
    if regenerate {
        let dir = dir.unwrap_or_else(|| kat::default_dir().to_path_buf());
        kat::regenerate(&dir)?;
        println!("wrote vectors to {}", dir.display());
        return Ok(0);
    }
    let count = match dir {
        Some(d) => kat::verify_dir(&d)?,
        None => kat::verify_embedded()?,
    };
    println!("{count} known-answer vectors match");
    Ok(0)
}

fn cmd_suite(filter: Option<String>, seed: Option<u64>, threads: usize) -> u8 {
    let mut opts = SuiteOptions { threads, ..SuiteOptions::default() };
    if let Some(s) = seed {
        opts.seed = s;
    }
    let results = acceptance::run_suite(filter.as_deref(), &opts, |r| println!("{}", r.line()));
    let failed = results.iter().filter(|r| !r.passed).count();
    println!("{} passed, {failed} failed", results.len() - failed);
    u8::from(failed > 0)
}

fn listing() -> String {
    let mut out = String::new();
    let mut section = |title: &str, items: &[&str]| out.push_str(&format!("{title}:\n  {}\n", items.join("\n  ")));
    section("games", GAMES);
    section("backends", &BackendTag::ALL.map(|b| b.name()));
    section("oracle profiles", &OracleProfile::ALL.map(|p| p.name()));
    section("schemes", &[schemes::SCHEME_GRAMMAR]);
    section("bbf families", &["keyed_mix", "constant_zero"]);
    section("signature schemes", &["lamport_merkle", "malleable"]);
    section("qcp adversaries", adversaries::QCP_ADVERSARIES);
    section("ud adversaries", adversaries::UD_ADVERSARIES);
    section("ind adversaries", adversaries::IND_ADVERSARIES);
    section("lor_cpa adversaries", adversaries::LOR_CPA_ADVERSARIES);
    section("wprf distinguishers", adversaries::WPRF_DISTINGUISHERS);
    section("ul learners", adversaries::UL_LEARNERS);
    section("flip_ul learners", adversaries::FLIP_UL_LEARNERS);
    section("forgers", adversaries::FORGERS);
    out
}

pub fn dispatch(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Kat { regenerate, dir } => cmd_kat(regenerate, dir),
        Command::Suite { suite: SuiteName::Acceptance, filter, seed, threads } => Ok(cmd_suite(filter, seed, threads)),
        Command::List => {
            // A closed pipe (e.g. `udlab list | head`) is not an error.
            let _ = std::io::stdout().write_all(listing().as_bytes());
            Ok(0)
        }
    }
}

pub fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn key_value_and_json_configs_agree() {
        let kv = parse_config("game = flip_qcp # comment\n\nn=2\nshadow-sim = true\n").unwrap();
        let js = parse_config(r#"{"game": "flip_qcp", "n": 2, "shadow_sim": true}"#).unwrap();
        assert_eq!(kv, js);
    }

    #[test]
    fn flags_override_config() {
        let cfg = parse_config("game = ud\nn = 3\nk = 4").unwrap();
        let args = RunArgs { n: Some(1), ..RunArgs::default() }.merge_config(&cfg).unwrap();
        assert_eq!((args.game.as_deref(), args.n, args.k), (Some("ud"), Some(1), Some(4)));
    }

    #[test]
    fn bad_config_keys_and_values_are_rejected() {
        let err = RunArgs::default().merge_config(&parse_config("colour = red").unwrap()).unwrap_err();
        assert_eq!(err.exit_code(), EXIT_UNKNOWN_NAME);
        let err = RunArgs::default().merge_config(&parse_config("n = many").unwrap()).unwrap_err();
        assert_eq!(err.exit_code(), EXIT_INVALID);
    }

    #[test]
    fn unknown_names_map_to_exit_three() {
        let base = RunArgs { game: Some("flip_qcp".into()), trials: Some(5), seed: Some(1), ..RunArgs::default() };
        for args in [
            RunArgs { game: Some("nope".into()), ..base.clone() },
            RunArgs { backend: Some("nope".into()), ..base.clone() },
            RunArgs { adversary: Some("nope".into()), ..base.clone() },
            RunArgs { game: Some("ud".into()), scheme: Some("nope".into()), ..base.clone() },
        ] {
            assert_eq!(run_game(&args).unwrap_err().exit_code(), EXIT_UNKNOWN_NAME, "{args:?}");
        }
        let zero = RunArgs { n: Some(0), ..base };
        assert_eq!(run_game(&zero).unwrap_err().exit_code(), EXIT_INVALID);
    }

    #[test]
    fn every_listed_game_runs_with_defaults() {
        for game in GAMES {
            let args = RunArgs { game: Some(game.to_string()), trials: Some(4), seed: Some(3), ..RunArgs::default() };
            let r = run_game(&args).unwrap_or_else(|e| panic!("{game}: {e}"));
            assert_eq!(r.seed, 3);
        }
    }
}
