//! Scenario files, preset expansion and the scenario hash.

use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use shiftlab::config::{Exponent, SpaceConfig};
use shiftlab::presets;
use shiftlab::sequences::SequenceTriple;
use shiftlab::C;

/// Task ids in the order they are documented.
pub const TASKS: [&str; 8] = ["space", "matrix", "norm", "decompose", "dynamics", "orbit", "orbit-demo", "rank-one"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> anyhow::Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            _ => bail!("unknown format {s:?} (json or csv)"),
        }
    }
}

/// `2`, `1.5`, or `"c0"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PSpec {
    Num(f64),
    Name(String),
}

impl PSpec {
    pub fn exponent(&self) -> anyhow::Result<Exponent> {
        match self {
            PSpec::Num(p) => Ok(Exponent::P(*p)),
            PSpec::Name(s) if s.eq_ignore_ascii_case("c0") => Ok(Exponent::C0),
            PSpec::Name(s) => s.parse::<f64>().map(Exponent::P).map_err(|_| anyhow!("p must be a number or \"c0\", got {s:?}")),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceSpec {
    pub p: Option<PSpec>,
    pub n: Option<usize>,
    pub series_cap: Option<usize>,
    pub tol: Option<f64>,
}

impl SpaceSpec {
    pub fn config(&self) -> anyhow::Result<SpaceConfig> {
        let mut cfg = SpaceConfig::default();
        if let Some(p) = &self.p {
            cfg.p = p.exponent()?;
        }
        cfg.n = self.n.unwrap_or(cfg.n);
        cfg.series_cap = self.series_cap.unwrap_or(cfg.series_cap);
        cfg.tol = self.tol.unwrap_or(cfg.tol);
        cfg.validate().map_err(|e| anyhow!("{e}"))?;
        Ok(cfg)
    }

    /// Fields set in `o` win.
    pub fn overlay(&mut self, o: &SpaceSpec) {
        if o.p.is_some() {
            self.p = o.p.clone();
        }
        self.n = o.n.or(self.n);
        self.series_cap = o.series_cap.or(self.series_cap);
        self.tol = o.tol.or(self.tol);
    }
}

/// Per-task knobs; every field has a default.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    /// Power of `F_w` for `matrix`.
    pub nu: usize,
    /// Rows of the monomial-norm table.
    pub monomials: usize,
    /// Orbit length for `orbit`, `orbit-demo` and `rank-one`.
    pub steps: usize,
    /// Start of `orbit`: `k:N`, `e:N` or `ev:<complex>`.
    pub vector: String,
    pub target: Option<String>,
    /// `orbit-demo`: the inner point and the boundary eigenvalue.
    pub z: Option<String>,
    pub lambda: Option<String>,
    /// `rank-one`: unimodular lambda and the starting sequence.
    pub rank_one_lambda: String,
    pub x: Vec<String>,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            nu: 1,
            monomials: 8,
            steps: 20,
            vector: "k:8".into(),
            target: None,
            z: None,
            lambda: None,
            rank_one_lambda: "1".into(),
            x: vec!["1".into()],
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub path: Option<PathBuf>,
    pub format: Option<Format>,
}

/// A scenario file as written by the user.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub preset: Option<String>,
    pub triple: Option<SequenceTriple>,
    #[serde(default)]
    pub space: SpaceSpec,
    #[serde(default)]
    pub tasks: Vec<String>,
    #[serde(default)]
    pub params: Params,
    #[serde(default)]
    pub output: OutputSpec,
}

/// A validated scenario: presets expanded, tasks checked, space resolved.
#[derive(Clone, Debug, Serialize)]
pub struct Scenario {
    pub preset: Option<String>,
    pub triple: Option<SequenceTriple>,
    pub space: SpaceConfig,
    pub tasks: Vec<String>,
    pub params: Params,
}

impl Scenario {
    pub fn resolve(file: ScenarioFile) -> anyhow::Result<Scenario> {
        let triple = match (&file.preset, file.triple) {
            (Some(_), Some(_)) => bail!("give either a preset or a triple, not both"),
            (Some(p), None) => Some(expand_preset(p)?),
            (None, Some(t)) => {
                t.validate().map_err(|e| anyhow!("invalid triple: {e}"))?;
                Some(t)
            }
            (None, None) => None,
        };
        let tasks: Vec<String> = file.tasks.iter().map(|t| t.trim().to_ascii_lowercase()).filter(|t| !t.is_empty()).collect();
        for t in &tasks {
            if !TASKS.contains(&t.as_str()) {
                bail!("unknown task {t:?}; known: {}", TASKS.join(", "));
            }
            if triple.is_none() && t != "rank-one" {
                bail!("task {t:?} needs a preset or a triple");
            }
        }
        let space = file.space.config()?;
        Ok(Scenario { preset: file.preset, triple, space, tasks, params: file.params })
    }

    /// SHA-256 of the canonical JSON of everything that affects results.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("scenarios serialize");
        hex::encode(Sha256::digest(bytes))
    }

    /// The unimodular lambda of an `EX-TRIDIAG(lambda)` preset.
    pub fn tridiag_lambda(&self) -> Option<C> {
        let p = self.preset.as_deref()?;
        let (name, arg) = split_preset(p).ok()?;
        (name == "EX-TRIDIAG").then(|| arg.map_or(Ok(C::new(1.0, 0.0)), parse_complex).ok()).flatten()
    }
}

pub fn load(path: &std::path::Path) -> anyhow::Result<ScenarioFile> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn split_preset(p: &str) -> anyhow::Result<(String, Option<&str>)> {
    match p.find('(') {
        Some(i) => {
            let arg = p[i + 1..].strip_suffix(')').ok_or_else(|| anyhow!("unbalanced parenthesis in preset {p:?}"))?;
            Ok((p[..i].trim().to_ascii_uppercase(), Some(arg)))
        }
        None => Ok((p.trim().to_ascii_uppercase(), None)),
    }
}

/// `EX-CHAOS`, `EX-HC`, `EX-DECAY`, `EX-TRIDIAG` or `EX-TRIDIAG(<lambda>)`.
pub fn expand_preset(p: &str) -> anyhow::Result<SequenceTriple> {
    let (name, arg) = split_preset(p)?;
    match (name.as_str(), arg) {
        ("EX-TRIDIAG", Some(a)) => presets::tridiag(parse_complex(a)?).map_err(|e| anyhow!("{e}")),
        (_, Some(_)) => bail!("preset {name} takes no parameter"),
        _ => presets::preset(&name).map_err(|e| anyhow!("{e}")),
    }
}

/// `1.5`, `-i`, `2i`, `0.5-0.25i`, `3e-2+1e-1i`.
pub fn parse_complex(s: &str) -> anyhow::Result<C> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || anyhow!("cannot read {s:?} as a complex number");
    if t.is_empty() {
        return Err(bad());
    }
    let imag = |x: &str| -> anyhow::Result<f64> {
        match x {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => x.parse::<f64>().map_err(|_| bad()),
        }
    };
    let Some(body) = t.strip_suffix('i') else {
        return t.parse::<f64>().map(|x| C::new(x, 0.0)).map_err(|_| bad());
    };
    // the split is the last sign that does not follow an exponent marker
    let bytes = body.as_bytes();
    let split = (1..bytes.len()).rev().find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    match split {
        Some(k) => Ok(C::new(body[..k].parse::<f64>().map_err(|_| bad())?, imag(&body[k..])?)),
        None => Ok(C::new(0.0, imag(body)?)),
    }
}
