//! Framework cost configurations and the registry that resolves them.
//!
//! A configuration maps basic-operation names to formulas producing a
//! [`CostTuple`]. Formulas are either native (the built-in frameworks), a
//! parsed cost expression per component (user files), or one of the two
//! packing procedures that cannot be written as a closed-form expression.

use crate::cost::{
    slice_sum, CostTuple, EvalScope, OpExtras, SecurityParams,
};
use crate::counting;
use crate::dsl::{finalize_component, Expr};
use crate::error::{Error, Result};
use indexmap::IndexMap;
use serde::Deserialize;
use std::path::Path;

/// How many parties a framework supports.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PartyConstraint {
    Exactly(u64),
    AtLeast(u64),
}

impl PartyConstraint {
    pub fn default_parties(&self) -> u64 {
        match self {
            PartyConstraint::Exactly(m) => *m,
            PartyConstraint::AtLeast(m) => *m,
        }
    }

    pub fn accepts(&self, m: u64) -> bool {
        match self {
            PartyConstraint::Exactly(n) => m == *n,
            PartyConstraint::AtLeast(n) => m >= *n,
        }
    }
}

/// Built-in counting procedures referenced by name from config files.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Procedure {
    CheetahMatmul,
    Semi2kMatmul,
}

impl Procedure {
    pub fn from_name(name: &str) -> Option<Procedure> {
        match name {
            "cheetah_matmul" => Some(Procedure::CheetahMatmul),
            "semi2k_matmul" => Some(Procedure::Semi2kMatmul),
            _ => None,
        }
    }

    pub fn evaluate(&self, scope: &EvalScope) -> Result<CostTuple> {
        match self {
            Procedure::CheetahMatmul => {
                let (p, q, r) = (scope.p()?, scope.q()?, scope.r()?);
                let deg = scope.deg()?;
                let modulus = scope.modulus()?;
                let (s_ct, r_ct) =
                    counting::cheetah_matmul_ct_count(p, q, r, deg, scope.lp(), scope.bp())?;
                let ob = 2u128
                    * (s_ct as u128 * deg as u128 * slice_sum(modulus, 0, -1)
                        + r_ct as u128 * deg as u128 * slice_sum(modulus, 0, -2))
                    * scope.size() as u128;
                CostTuple::from_u128(ob, 4, 0, 0)
            }
            Procedure::Semi2kMatmul => {
                let count =
                    counting::semi2k_matmul_msg_count(scope.p()?, scope.q()?, scope.r()?, scope.k());
                let ob = scope.m() as u128 * scope.k() as u128 * count * scope.size() as u128;
                CostTuple::from_u128(ob, 1, 0, 0)
            }
        }
    }
}

/// Four parsed component expressions.
#[derive(Clone, Debug, PartialEq)]
pub struct FormulaExprs {
    pub online_bits: Expr,
    pub online_rounds: Expr,
    pub offline_bits: Expr,
    pub offline_rounds: Expr,
}

/// One operation's cost formula.
#[derive(Clone)]
pub enum CostFormula {
    Native(fn(&EvalScope) -> Result<CostTuple>),
    Exprs(Box<FormulaExprs>),
    Procedure(Procedure),
}

impl std::fmt::Debug for CostFormula {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CostFormula::Native(_) => write!(f, "Native"),
            CostFormula::Exprs(_) => write!(f, "Exprs"),
            CostFormula::Procedure(p) => write!(f, "Procedure({p:?})"),
        }
    }
}

impl CostFormula {
    fn evaluate(&self, scope: &EvalScope) -> Result<CostTuple> {
        match self {
            CostFormula::Native(f) => f(scope),
            CostFormula::Procedure(p) => p.evaluate(scope),
            CostFormula::Exprs(e) => Ok(CostTuple {
                online_bits: finalize_component(&e.online_bits.eval(scope)?, "online_bits")?,
                online_rounds: finalize_component(&e.online_rounds.eval(scope)?, "online_rounds")?,
                offline_bits: finalize_component(&e.offline_bits.eval(scope)?, "offline_bits")?,
                offline_rounds: finalize_component(
                    &e.offline_rounds.eval(scope)?,
                    "offline_rounds",
                )?,
            }),
        }
    }
}

/// A framework's complete cost configuration.
#[derive(Clone, Debug)]
pub struct FrameworkConfig {
    pub name: String,
    pub parties: PartyConstraint,
    pub formulas: IndexMap<String, CostFormula>,
    /// Default HE parameters merged into extras when an instruction carries none.
    pub he_deg: Option<u64>,
    pub he_modulus: Option<Vec<u64>>,
    /// Reject parameter sets with k < kappa_s (preprocessing assumes k >= kappa_s).
    pub requires_k_ge_kappa_s: bool,
}

impl FrameworkConfig {
    pub fn new(name: &str, parties: PartyConstraint) -> Self {
        FrameworkConfig {
            name: name.to_string(),
            parties,
            formulas: IndexMap::new(),
            he_deg: None,
            he_modulus: None,
            requires_k_ge_kappa_s: false,
        }
    }

    pub fn declared_ops(&self) -> impl Iterator<Item = &str> {
        self.formulas.keys().map(|s| s.as_str())
    }

    pub fn declares(&self, op: &str) -> bool {
        self.formulas.contains_key(op)
    }

    /// Structural invariants: share, reveal and muls must always be present.
    pub fn validate(&self) -> Result<()> {
        if self.name.is_empty() {
            return Err(Error::InvalidConfig {
                name: self.name.clone(),
                reason: "framework name must not be empty".into(),
            });
        }
        for required in ["share", "reveal", "muls"] {
            if !self.declares(required) {
                return Err(Error::InvalidConfig {
                    name: self.name.clone(),
                    reason: format!("missing required operation `{required}`"),
                });
            }
        }
        if self.parties.default_parties() < 2 {
            return Err(Error::InvalidConfig {
                name: self.name.clone(),
                reason: "party constraint must allow at least 2 parties".into(),
            });
        }
        Ok(())
    }

    pub fn check_params(&self, params: &SecurityParams) -> Result<()> {
        params.validate()?;
        if !self.parties.accepts(params.m) {
            return Err(Error::InvalidParams(format!(
                "framework `{}` expects {} parties, got {}",
                self.name,
                match self.parties {
                    PartyConstraint::Exactly(n) => format!("exactly {n}"),
                    PartyConstraint::AtLeast(n) => format!("at least {n}"),
                },
                params.m
            )));
        }
        if self.requires_k_ge_kappa_s && params.k < params.kappa_s {
            return Err(Error::InvalidParams(format!(
                "framework `{}` assumes k >= kappa_s, got k = {} and kappa_s = {}",
                self.name, params.k, params.kappa_s
            )));
        }
        Ok(())
    }

    fn he_extras(&self) -> OpExtras {
        OpExtras {
            deg: self.he_deg,
            modulus: self.he_modulus.clone(),
            ..Default::default()
        }
    }

    /// Evaluates one declared operation. A `size` of 0 is the empty batch and
    /// always yields the zero tuple.
    pub fn evaluate(
        &self,
        op: &str,
        params: &SecurityParams,
        extras: &OpExtras,
    ) -> Result<CostTuple> {
        self.check_params(params)?;
        let formula = self.formulas.get(op).ok_or_else(|| Error::UnknownOp {
            framework: self.name.clone(),
            op: op.to_string(),
        })?;
        let merged = extras.merged_with(&self.he_extras());
        merged.validate()?;
        if merged.size == Some(0) {
            return Ok(CostTuple::ZERO);
        }
        formula.evaluate(&EvalScope::new(params, &merged))
    }

    pub fn load_toml(text: &str) -> Result<FrameworkConfig> {
        let file: ConfigFile =
            toml::from_str(text).map_err(|e| Error::ConfigFile(e.to_string()))?;
        file.into_config()
    }

    pub fn load_path(path: &Path) -> Result<FrameworkConfig> {
        let text = std::fs::read_to_string(path)?;
        Self::load_toml(&text)
    }
}

// ---------------------------------------------------------------------------
// configuration files
// ---------------------------------------------------------------------------

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    name: String,
    parties: Option<u64>,
    parties_min: Option<u64>,
    requires_k_ge_kappa_s: Option<bool>,
    he: Option<HeSection>,
    ops: IndexMap<String, OpSection>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct HeSection {
    deg: u64,
    #[serde(rename = "mod")]
    modulus: Vec<u64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct OpSection {
    builtin: Option<String>,
    online_bits: Option<String>,
    online_rounds: Option<String>,
    offline_bits: Option<String>,
    offline_rounds: Option<String>,
}

impl ConfigFile {
    fn into_config(self) -> Result<FrameworkConfig> {
        let parties = match (self.parties, self.parties_min) {
            (Some(n), None) => PartyConstraint::Exactly(n),
            (None, Some(n)) => PartyConstraint::AtLeast(n),
            (None, None) => PartyConstraint::AtLeast(2),
            (Some(_), Some(_)) => {
                return Err(Error::ConfigFile(
                    "set either `parties` or `parties_min`, not both".into(),
                ))
            }
        };
        let mut config = FrameworkConfig::new(&self.name, parties);
        config.requires_k_ge_kappa_s = self.requires_k_ge_kappa_s.unwrap_or(false);
        if let Some(he) = self.he {
            config.he_deg = Some(he.deg);
            config.he_modulus = Some(he.modulus);
        }
        for (op, section) in self.ops {
            let formula = if let Some(name) = &section.builtin {
                if section.online_bits.is_some()
                    || section.online_rounds.is_some()
                    || section.offline_bits.is_some()
                    || section.offline_rounds.is_some()
                {
                    return Err(Error::ConfigFile(format!(
                        "op `{op}` sets both `builtin` and component expressions"
                    )));
                }
                CostFormula::Procedure(Procedure::from_name(name).ok_or_else(|| {
                    Error::ConfigFile(format!("unknown builtin procedure `{name}`"))
                })?)
            } else {
                let component = |field: &Option<String>, which: &str| -> Result<Expr> {
                    let text = field.as_ref().ok_or_else(|| {
                        Error::ConfigFile(format!("op `{op}` is missing `{which}`"))
                    })?;
                    Expr::parse(text)
                };
                CostFormula::Exprs(Box::new(FormulaExprs {
                    online_bits: component(&section.online_bits, "online_bits")?,
                    online_rounds: component(&section.online_rounds, "online_rounds")?,
                    offline_bits: component(&section.offline_bits, "offline_bits")?,
                    offline_rounds: component(&section.offline_rounds, "offline_rounds")?,
                }))
            };
            config.formulas.insert(op, formula);
        }
        config.validate()?;
        Ok(config)
    }
}

// ---------------------------------------------------------------------------
// registry
// ---------------------------------------------------------------------------

/// Write-once registry of framework configurations. Lookups are insensitive
/// to case, `-` and `_`, with a few published aliases on top.
pub struct FrameworkRegistry {
    map: IndexMap<String, FrameworkConfig>,
}

fn normalize(name: &str) -> String {
    name.chars()
        .filter(|c| *c != '-' && *c != '_')
        .flat_map(|c| c.to_lowercase())
        .collect()
}

fn canonical(name: &str) -> String {
    let n = normalize(name);
    match n.as_str() {
        "secretflowsemi2k" => "semi2k".to_string(),
        _ => n,
    }
}

impl FrameworkRegistry {
    pub fn empty() -> Self {
        FrameworkRegistry { map: IndexMap::new() }
    }

    /// Registry pre-populated with the ten built-in configurations.
    pub fn with_builtins() -> Self {
        let mut reg = Self::empty();
        for config in crate::builtins::builtin_configs() {
            reg.register(config, false).expect("built-in configs are valid");
        }
        reg
    }

    pub fn register(&mut self, config: FrameworkConfig, overwrite: bool) -> Result<()> {
        config.validate()?;
        let key = canonical(&config.name);
        if self.map.contains_key(&key) && !overwrite {
            return Err(Error::DuplicateFramework(config.name));
        }
        self.map.insert(key, config);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Result<&FrameworkConfig> {
        self.map
            .get(&canonical(name))
            .ok_or_else(|| Error::UnknownFramework(name.to_string()))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.map.values().map(|c| c.name.as_str())
    }
}

/// Formula lookup and evaluation; a pure function of its arguments.
pub fn evaluate_cost(
    registry: &FrameworkRegistry,
    framework: &str,
    op: &str,
    params: &SecurityParams,
    extras: &OpExtras,
) -> Result<CostTuple> {
    registry.get(framework)?.evaluate(op, params, extras)
}
