use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};

use qbb::free_algebra::Form;
use qbb::scalar::parse_rational_function;
use qbb::{BorcherdsCartanDatum, Scalar};

pub const CACHE_ENV: &str = "QBB_CACHE_DIR";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProjectConfig {
    pub datum: BorcherdsCartanDatum,
    #[serde(default)]
    pub form: FormConfig,
    #[serde(default)]
    pub limits: Limits,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cache_dir: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormConfig {
    /// `ν_il` for every pair without an override.
    #[serde(default = "one")]
    pub nu_default: String,
    #[serde(default, rename = "override", skip_serializing_if = "Vec::is_empty")]
    pub overrides: Vec<NuOverride>,
}

impl Default for FormConfig {
    fn default() -> Self {
        FormConfig { nu_default: one(), overrides: Vec::new() }
    }
}

fn one() -> String {
    "1".into()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NuOverride {
    pub index: String,
    pub level: u32,
    pub value: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Limits {
    #[serde(default = "four")]
    pub max_height: u32,
    #[serde(default = "four")]
    pub max_depth: u32,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_height: 4, max_depth: 4 }
    }
}

fn four() -> u32 {
    4
}

impl ProjectConfig {
    /// Reads TOML, or JSON when the file starts with `{`.
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn parse(text: &str) -> anyhow::Result<Self> {
        let cfg: ProjectConfig = if text.trim_start().starts_with('{') {
            serde_json::from_str(text).map_err(|e| anyhow::anyhow!("{}:{}: {}", e.line(), e.column(), e))?
        } else {
            toml::from_str(text).map_err(|e| anyhow::anyhow!("{}", toml_error(text, &e)))?
        };
        cfg.datum.validate()?;
        if cfg.limits.max_height < 1 {
            bail!("limits.max_height must be at least 1");
        }
        cfg.nu_table()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// The explicit `ν` values: the default (when not 1) on every pair up to
    /// the height bound, then the overrides.
    pub fn nu_table(&self) -> anyhow::Result<BTreeMap<(usize, u32), Scalar>> {
        let d = &self.datum;
        let mut out = BTreeMap::new();
        let default = parse_scalar("form.nu_default", &self.form.nu_default)?;
        if default != Scalar::from_int(1) {
            let top = self.limits.max_height.max(self.limits.max_depth);
            for i in 0..d.rank() {
                let levels = if d.is_real(i) { 1 } else { top };
                for l in 1..=levels {
                    out.insert((i, l), default.clone());
                }
            }
        }
        for o in &self.form.overrides {
            let i = d.index_of(&o.index)?;
            if o.level == 0 || (d.is_real(i) && o.level != 1) {
                bail!("form override for {} has invalid level {}", o.index, o.level);
            }
            out.insert((i, o.level), parse_scalar(&format!("form override ({}, {})", o.index, o.level), &o.value)?);
        }
        Ok(out)
    }

    pub fn form(&self) -> anyhow::Result<Arc<Form>> {
        Ok(Arc::new(Form::with_nu(Arc::new(self.datum.clone()), self.nu_table()?)?))
    }

    /// Cache directory: the environment override, then the config, else none.
    pub fn cache_dir(&self) -> Option<PathBuf> {
        match std::env::var_os(CACHE_ENV) {
            Some(v) if !v.is_empty() => Some(PathBuf::from(v)),
            _ => self.cache_dir.clone(),
        }
    }
}

fn parse_scalar(what: &str, src: &str) -> anyhow::Result<Scalar> {
    parse_rational_function(src).map_err(|e| anyhow::anyhow!("{what}: {e}"))
}

fn toml_error(text: &str, e: &toml::de::Error) -> String {
    match e.span() {
        Some(span) => {
            let before = &text[..span.start.min(text.len())];
            let line = before.matches('\n').count() + 1;
            let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
            format!("{line}:{column}: {}", e.message())
        }
        None => e.message().to_string(),
    }
}
