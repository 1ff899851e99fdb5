use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use twistcode::dense::MAX_QUBITS;
use twistcode::{LatticeSpec, Segment};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("malformed config: {0}")]
    Parse(String),
    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Derive,
    Verify,
    Mbb,
    Stats,
    OracleCheck,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Derive => "derive",
            Kind::Verify => "verify",
            Kind::Mbb => "mbb",
            Kind::Stats => "stats",
            Kind::OracleCheck => "oracle-check",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Json,
    Csv,
    /// Plain text; `derive` only.
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum BackendChoice {
    Anyon,
    Fock,
    Lattice,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ReadoutChoice {
    Direct,
    Ideal,
}

/// Contents of a `--config` file. Every field is optional; command-line
/// flags override it and per-kind defaults fill the rest.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct ExperimentConfig {
    pub kind: Option<Kind>,
    pub seed: Option<u64>,
    pub shots: Option<usize>,
    pub n_braids: Option<Vec<usize>>,
    pub backend: Option<BackendChoice>,
    pub readout: Option<ReadoutChoice>,
    pub sequence_length: Option<usize>,
    pub lattice: Option<LatticeSpec>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read { path: path.into(), source })?;
        toml::from_str(&text).map_err(|e| ConfigError::Parse(e.to_string()))
    }

    /// Fields set in `over` win.
    pub fn merge(self, over: ExperimentConfig) -> ExperimentConfig {
        ExperimentConfig {
            kind: over.kind.or(self.kind),
            seed: over.seed.or(self.seed),
            shots: over.shots.or(self.shots),
            n_braids: over.n_braids.or(self.n_braids),
            backend: over.backend.or(self.backend),
            readout: over.readout.or(self.readout),
            sequence_length: over.sequence_length.or(self.sequence_length),
            lattice: over.lattice.or(self.lattice),
            out: over.out.or(self.out),
            format: over.format.or(self.format),
        }
    }
}

/// Fully specified experiment. This is what reports echo and hash; the
/// output path is left out so the body does not depend on it.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct Resolved {
    pub kind: Kind,
    pub seed: u64,
    pub shots: usize,
    pub n_braids: Vec<usize>,
    pub backend: BackendChoice,
    pub readout: ReadoutChoice,
    pub sequence_length: usize,
    pub lattice: LatticeSpec,
    pub format: Format,
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

pub fn fig1_lattice() -> LatticeSpec {
    LatticeSpec::new(8, 6, vec![Segment::new(1, 1, 5)])
}

pub fn three_pair_lattice() -> LatticeSpec {
    LatticeSpec::new(14, 4, vec![Segment::new(1, 1, 3), Segment::new(1, 5, 7), Segment::new(1, 9, 11)])
}

pub fn resolve(kind: Kind, cfg: ExperimentConfig) -> Result<Resolved, ConfigError> {
    if let Some(k) = cfg.kind {
        if k != kind {
            return Err(ConfigError::Invalid(format!("config is for `{}`, not `{}`", k.name(), kind.name())));
        }
    }
    let backend = cfg.backend.unwrap_or(BackendChoice::Anyon);
    let default_lattice = match kind {
        Kind::Stats if backend == BackendChoice::Lattice => three_pair_lattice(),
        Kind::OracleCheck => LatticeSpec::new(4, 4, vec![]),
        _ => fig1_lattice(),
    };
    let (seed, shots) = match kind {
        Kind::Derive => (0, 1),
        Kind::Verify => (1, 20),
        Kind::Mbb => (0, 1),
        Kind::Stats => (42, 10_000),
        Kind::OracleCheck => (17, 1000),
    };
    let r = Resolved {
        kind,
        seed: cfg.seed.unwrap_or(seed),
        shots: cfg.shots.unwrap_or(shots),
        n_braids: cfg.n_braids.unwrap_or_else(|| vec![0, 1, 2, 3]),
        backend,
        readout: cfg.readout.unwrap_or(ReadoutChoice::Direct),
        sequence_length: cfg.sequence_length.unwrap_or(12),
        lattice: cfg.lattice.unwrap_or(default_lattice),
        format: cfg.format.unwrap_or(Format::Json),
        out: cfg.out,
    };
    validate(&r)?;
    Ok(r)
}

fn validate(r: &Resolved) -> Result<(), ConfigError> {
    let bad = |m: String| Err(ConfigError::Invalid(m));
    if r.shots == 0 {
        return bad("shots must be positive".into());
    }
    if r.format == Format::Text && r.kind != Kind::Derive {
        return bad("text output is only available for `derive`".into());
    }
    let lat = r.lattice.build().map_err(|e| ConfigError::Invalid(e.to_string()))?;
    match r.kind {
        Kind::Mbb if r.backend == BackendChoice::Lattice => bad("`mbb` traces states and needs the anyon or fock backend".into()),
        Kind::Stats if r.backend == BackendChoice::Lattice && lat.n_pairs() != 3 => {
            bad(format!("the lattice backend needs 3 twist pairs, the lattice has {}", lat.n_pairs()))
        }
        Kind::Stats if r.n_braids.is_empty() => bad("n-braids is empty".into()),
        Kind::OracleCheck if lat.n_sites() > MAX_QUBITS => {
            bad(format!("oracle-check needs at most {MAX_QUBITS} sites, the lattice has {}", lat.n_sites()))
        }
        Kind::OracleCheck if r.sequence_length == 0 => bad("sequence-length must be positive".into()),
        _ => Ok(()),
    }
}

/// SHA-256 of the canonical JSON form of the resolved config.
pub fn config_hash(r: &Resolved) -> String {
    let json = serde_json::to_string(r).expect("config serializes");
    Sha256::digest(json.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}
