//! Project definitions read from a JSON document.

use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};
use treslev::{Combination, CostModel, Expansion, Transformation};

use crate::error::CliError;

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ProjectConfig {
    pub projects: Vec<ProjectEntry>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ProjectEntry {
    pub name: String,
    pub unit_price: f64,
    pub unit_variable_cost: f64,
    pub fixed_cash: f64,
    pub fixed_noncash: f64,
    pub capacity: f64,
    #[serde(default)]
    pub investment_life: Option<f64>,
    /// Volume the critical margins and leverages are read at; defaults to
    /// capacity.
    #[serde(default)]
    pub reference_volume: Option<f64>,
    #[serde(default)]
    pub cost_behavior: Option<CostBehaviorEntry>,
    #[serde(default)]
    pub transformation: Option<TransformationEntry>,
    #[serde(default)]
    pub expansion: Option<ExpansionEntry>,
}

/// `v = a·f + b`.
#[derive(Debug, Clone, Copy, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct CostBehaviorEntry {
    pub a: f64,
    pub b: f64,
}

#[derive(Debug, Clone, Copy, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct TransformationEntry {
    #[serde(default)]
    pub delta_fixed_cash: f64,
    #[serde(default)]
    pub delta_fixed_noncash: f64,
    #[serde(default)]
    pub new_unit_variable_cost: Option<f64>,
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ExpansionEntry {
    pub new_capacity: f64,
    pub new_fixed_cash: f64,
    pub new_fixed_noncash: f64,
    pub new_unit_variable_cost: f64,
    /// Defaults to the current price.
    #[serde(default)]
    pub new_unit_price: Option<f64>,
}

/// A validated project.
#[derive(Debug, Clone)]
pub struct Project {
    pub name: String,
    pub combination: Combination,
    pub reference_volume: f64,
    pub cost_model: Option<CostModel>,
    pub transformation: Option<TransformationEntry>,
    pub expansion: Option<Expansion>,
}

impl Project {
    pub fn transformation_plan(
        &self,
        entry: TransformationEntry,
    ) -> Result<Transformation, treslev::Error> {
        Transformation::new(
            self.combination,
            entry.delta_fixed_cash,
            entry.delta_fixed_noncash,
            entry.new_unit_variable_cost,
        )
    }
}

#[derive(Debug, Clone)]
pub struct Projects {
    pub origin: String,
    pub projects: Vec<Project>,
}

impl Projects {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let origin = path.display().to_string();
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{origin}: {e}")))?;
        Self::parse(&text, &origin)
    }

    pub fn parse(text: &str, origin: &str) -> Result<Self, CliError> {
        let raw: ProjectConfig =
            serde_json::from_str(text).map_err(|e| CliError::Config(format!("{origin}: {e}")))?;
        let mut seen = HashSet::new();
        let mut projects = Vec::with_capacity(raw.projects.len());
        for (i, entry) in raw.projects.into_iter().enumerate() {
            let at = format!("{origin}: projects[{i}] ({:?})", entry.name);
            if entry.name.trim().is_empty() {
                return Err(CliError::Config(format!("{at}.name: must not be empty")));
            }
            if !seen.insert(entry.name.clone()) {
                return Err(CliError::Config(format!(
                    "{at}.name: duplicate project name"
                )));
            }
            projects.push(
                validate(entry)
                    .map_err(|(field, msg)| CliError::Config(format!("{at}.{field}: {msg}")))?,
            );
        }
        Ok(Self {
            origin: origin.to_string(),
            projects,
        })
    }

    pub fn get(&self, name: &str) -> Result<&Project, CliError> {
        self.projects
            .iter()
            .find(|p| p.name == name)
            .ok_or_else(|| CliError::UnknownProject(name.to_string()))
    }
}

type FieldError = (&'static str, String);

fn field<E: std::fmt::Display>(name: &'static str) -> impl Fn(E) -> FieldError {
    move |e| (name, e.to_string())
}

fn validate(entry: ProjectEntry) -> Result<Project, FieldError> {
    let mut combination = Combination::new(
        entry.unit_price,
        entry.unit_variable_cost,
        entry.fixed_cash,
        entry.fixed_noncash,
        entry.capacity,
    )
    .map_err(|e| match e {
        treslev::Error::InvalidParameter { name, reason } => (name, reason.to_string()),
        other => ("combination", other.to_string()),
    })?;
    if let Some(life) = entry.investment_life {
        combination = combination
            .with_investment_life(life)
            .map_err(field("investment_life"))?;
    }
    let reference_volume = entry.reference_volume.unwrap_or(entry.capacity);
    if !(reference_volume > 0.0 && reference_volume <= entry.capacity) {
        return Err((
            "reference_volume",
            format!("must lie in (0, capacity = {}]", entry.capacity),
        ));
    }
    let cost_model = entry
        .cost_behavior
        .map(|cb| CostModel::new(cb.a, cb.b))
        .transpose()
        .map_err(field("cost_behavior"))?;
    if let Some(t) = entry.transformation {
        Transformation::new(
            combination,
            t.delta_fixed_cash,
            t.delta_fixed_noncash,
            t.new_unit_variable_cost,
        )
        .map_err(field("transformation"))?;
    }
    let expansion = entry
        .expansion
        .map(|x| {
            Expansion::new(
                combination,
                x.new_capacity,
                x.new_fixed_cash,
                x.new_fixed_noncash,
                x.new_unit_variable_cost,
                x.new_unit_price.unwrap_or(entry.unit_price),
            )
        })
        .transpose()
        .map_err(field("expansion"))?;
    Ok(Project {
        name: entry.name,
        combination,
        reference_volume,
        cost_model,
        transformation: entry.transformation,
        expansion,
    })
}
