use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::certify::{CaloricOptions, EpsilonBudget};
use crate::constants::{K2Variant, DEFAULT_SAFETY};
use crate::solver::{ForcedMode, Forcing, SolverConfig};
use crate::spectral::{snapshot, BoxSpec, SpectralField, Wave};
use crate::{Error, Result};

/// Environment variable naming the default constant table.
pub const CONSTANTS_ENV: &str = "NSCERT_CONSTANTS";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(rename = "box")]
    pub box_spec: BoxSpec,
    #[serde(default)]
    pub budget: Option<EpsilonBudget>,
    #[serde(default)]
    pub solver: Option<SolverConfig>,
    #[serde(default)]
    pub constants: ConstantsConfig,
    #[serde(default)]
    pub data: DataConfig,
    #[serde(default)]
    pub certify: CertifyConfig,
    #[serde(default)]
    pub caloric: Option<CaloricOptions>,
    #[serde(default)]
    pub aposteriori: AposterioriConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConstantsConfig {
    /// Table file; falls back to `$NSCERT_CONSTANTS`, then to an empty table.
    #[serde(default)]
    pub table: Option<PathBuf>,
    /// Iteration budget for estimating missing `C_S` entries.
    pub budget: usize,
    pub seed: u64,
    pub safety: f64,
    pub variant: K2Variant,
    /// Fixed interpolation constant; estimated when `interp_budget` is set instead.
    #[serde(default)]
    pub c_i: Option<f64>,
    #[serde(default)]
    pub interp_budget: Option<usize>,
}

impl Default for ConstantsConfig {
    fn default() -> Self {
        ConstantsConfig {
            table: None,
            budget: 400,
            seed: 0,
            safety: DEFAULT_SAFETY,
            variant: K2Variant::default(),
            c_i: None,
            interp_budget: None,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataConfig {
    #[serde(default)]
    pub u0: Option<Datum>,
    #[serde(default)]
    pub forcing: Option<ForcingSpec>,
    /// Perturbed datum; with `a1_fraction` set it is a perturbation direction.
    #[serde(default)]
    pub v0: Option<Datum>,
    #[serde(default)]
    pub g: Option<ForcingSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Datum {
    #[serde(flatten)]
    pub source: Source,
    /// Rescale so that `|u|_{α,L}` equals this.
    #[serde(default)]
    pub norm_alpha: Option<f64>,
    /// Rescale so that the small-data condition has `lhs = a4_fraction · rhs`.
    #[serde(default)]
    pub a4_fraction: Option<f64>,
    /// For `v0`: choose `v0 = u0 + s·direction` with `lhs(A1) = a1_fraction · rhs`.
    #[serde(default)]
    pub a1_fraction: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Source {
    Zero {
        m: usize,
    },
    Snapshot {
        path: PathBuf,
    },
    /// Explicit coefficients `u = [[re, im]; 3]` at wave vectors `k`.
    Modes {
        m: usize,
        modes: Vec<ModeValue>,
    },
    /// Gaussian coefficients with amplitude `|k|^{-decay} exp(-|k|/width)`, Leray projected.
    Random {
        m: usize,
        seed: u64,
        #[serde(default)]
        decay: f64,
        #[serde(default)]
        width: Option<f64>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModeValue {
    pub k: Wave,
    pub u: [[f64; 2]; 3],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ForcingSpec {
    Zero,
    Constant { field: Datum },
    /// Polynomial amplitudes `Σ_p c_p t^p`, one `[re, im]` triple per power.
    Modes { modes: Vec<PolyMode> },
    Snapshots { times: Vec<f64>, paths: Vec<PathBuf> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolyMode {
    pub k: Wave,
    pub coefficients: Vec<[[f64; 2]; 3]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CertifyConfig {
    /// Time horizon `T`; defaults to the solver's `t_end`.
    #[serde(default)]
    pub t_end: Option<f64>,
    /// Tolerance of the Grönwall envelope comparison.
    pub gronwall_tolerance: f64,
    /// Run the solver to `T0` and check the accompanying bound.
    pub verify_caloric_run: bool,
}

impl Default for CertifyConfig {
    fn default() -> Self {
        CertifyConfig {
            t_end: None,
            gronwall_tolerance: 0.05,
            verify_caloric_run: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AposterioriConfig {
    pub schedule: Vec<usize>,
}

impl Default for AposterioriConfig {
    fn default() -> Self {
        AposterioriConfig { schedule: vec![8, 16, 32] }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
    /// Write a binary snapshot at every sample of `simulate`.
    pub snapshots: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            dir: PathBuf::from("."),
            snapshots: false,
        }
    }
}

/// Parses `--a.b.c=value`; the value is read as JSON when possible, else as a string.
pub fn parse_override(arg: &str) -> Result<(Vec<String>, Value)> {
    let body = arg
        .strip_prefix("--")
        .ok_or_else(|| Error::invalid(format!("override `{arg}` must look like --key.path=value")))?;
    let (key, raw) = body
        .split_once('=')
        .ok_or_else(|| Error::invalid(format!("override `{arg}` has no `=`")))?;
    if key.is_empty() || key.split('.').any(str::is_empty) {
        return Err(Error::invalid(format!("override `{arg}` has an empty key segment")));
    }
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    Ok((key.split('.').map(String::from).collect(), value))
}

pub fn apply_override(doc: &mut Value, path: &[String], value: Value) -> Result<()> {
    let mut node = doc;
    for (i, seg) in path.iter().enumerate() {
        if node.is_null() {
            *node = Value::Object(Default::default());
        }
        let obj = node
            .as_object_mut()
            .ok_or_else(|| Error::invalid(format!("`{}` is not an object", path[..i].join("."))))?;
        if i + 1 == path.len() {
            obj.insert(seg.clone(), value);
            return Ok(());
        }
        node = obj.entry(seg.clone()).or_insert(Value::Null);
    }
    Ok(())
}

/// A parsed configuration together with its canonical JSON and hash.
#[derive(Clone, Debug)]
pub struct LoadedConfig {
    pub config: RunConfig,
    pub canonical: Value,
    pub hash: String,
    /// Directory that relative paths in the document refer to.
    pub base: PathBuf,
}

pub fn load_config(path: Option<&Path>, overrides: &[String]) -> Result<LoadedConfig> {
    let (mut doc, base) = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| Error::invalid(format!("cannot read config {}: {e}", p.display())))?;
            let doc: Value = serde_json::from_str(&text)
                .map_err(|e| Error::invalid(format!("config {} is not valid JSON: {e}", p.display())))?;
            let base = p.parent().map(Path::to_path_buf).unwrap_or_default();
            (doc, base)
        }
        None => (Value::Object(Default::default()), PathBuf::new()),
    };
    for o in overrides {
        let (key, value) = parse_override(o)?;
        apply_override(&mut doc, &key, value)?;
    }
    let config: RunConfig =
        serde_json::from_value(doc.clone()).map_err(|e| Error::invalid(format!("config: {e}")))?;
    config.validate()?;
    let canonical = serde_json::to_value(&config)?;
    let hash = hex::encode(Sha256::digest(serde_json::to_vec(&canonical)?));
    Ok(LoadedConfig {
        config,
        canonical,
        hash,
        base,
    })
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        self.box_spec.validate()?;
        let budget = self.budget();
        budget.check_small_data(self.box_spec.nu)?;
        if let Some(s) = &self.solver {
            s.validate()?;
        }
        if !(self.constants.safety >= 1.0) {
            return Err(Error::invalid("constants.safety must be at least 1"));
        }
        if self.constants.budget == 0 {
            return Err(Error::invalid("constants.budget must be positive"));
        }
        if !(self.certify.gronwall_tolerance >= 0.0) {
            return Err(Error::invalid("certify.gronwall_tolerance must be nonnegative"));
        }
        if let Some(t) = self.certify.t_end {
            if !(t.is_finite() && t > 0.0) {
                return Err(Error::invalid("certify.t_end must be positive"));
            }
        }
        if self.aposteriori.schedule.iter().any(|&n| n == 0) {
            return Err(Error::invalid("aposteriori.schedule entries must be positive"));
        }
        Ok(())
    }

    pub fn budget(&self) -> EpsilonBudget {
        self.budget.unwrap_or_else(|| EpsilonBudget::default_for(self.box_spec.nu))
    }

    pub fn solver(&self) -> Result<&SolverConfig> {
        self.solver
            .as_ref()
            .ok_or_else(|| Error::invalid("this command needs a `solver` block"))
    }

    pub fn t_end(&self) -> Result<f64> {
        match self.certify.t_end {
            Some(t) => Ok(t),
            None => Ok(self.solver()?.t_end),
        }
    }
}

fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

impl Source {
    /// The unscaled field on the box of side `side`.
    pub fn build(&self, side: f64, base: &Path) -> Result<SpectralField> {
        match self {
            Source::Zero { m } => SpectralField::zeros(side, *m),
            Source::Snapshot { path } => {
                let f = snapshot::load(resolve(base, path))?;
                if f.side() != side {
                    return Err(Error::BoxMismatch {
                        left: side,
                        right: f.side(),
                    });
                }
                Ok(f)
            }
            Source::Modes { m, modes } => {
                let mut f = SpectralField::zeros(side, *m)?;
                for mv in modes {
                    f.set_coefficient(mv.k, mv.u.map(|[re, im]| Complex64::new(re, im)))?;
                }
                Ok(f)
            }
            Source::Random { m, seed, decay, width } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                let (decay, width) = (*decay, *width);
                let f = SpectralField::random(side, *m, &mut rng, |k| {
                    let r = (k.iter().map(|&c| (c * c) as f64).sum::<f64>()).sqrt();
                    r.powf(-decay) * width.map_or(1.0, |w| (-r / w).exp())
                })?;
                Ok(f.leray_project())
            }
        }
    }
}

impl ForcingSpec {
    pub fn build(&self, side: f64, base: &Path) -> Result<Forcing> {
        let c = |[re, im]: [f64; 2]| Complex64::new(re, im);
        let f = match self {
            ForcingSpec::Zero => Forcing::Zero,
            ForcingSpec::Constant { field } => {
                let mut f = field.source.build(side, base)?;
                if let Some(n) = field.norm_alpha {
                    f = rescale(&f, n, 0.0)?;
                }
                Forcing::Constant(f)
            }
            ForcingSpec::Modes { modes } => Forcing::Modes {
                side,
                modes: modes
                    .iter()
                    .map(|m| ForcedMode {
                        k: m.k,
                        coefficients: m.coefficients.iter().map(|v| v.map(c)).collect(),
                    })
                    .collect(),
            },
            ForcingSpec::Snapshots { times, paths } => Forcing::Snapshots {
                times: times.clone(),
                fields: paths
                    .iter()
                    .map(|p| snapshot::load(resolve(base, p)))
                    .collect::<Result<_>>()?,
            },
        };
        f.validate(side)?;
        Ok(f)
    }
}

/// `f` scaled to `|f|_{s,L} = target`.
pub fn rescale(f: &SpectralField, target: f64, s: f64) -> Result<SpectralField> {
    let n = f.hs_norm(s);
    if n == 0.0 {
        return Err(Error::invalid("cannot rescale a zero field"));
    }
    Ok(f.scaled(target / n))
}
