use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evaluator::{OutputKind, PerformanceRecord};

use super::Sense;

/// Target scale used when a spec string gives none, as a fraction of |value|.
const DEFAULT_TARGET_SCALE: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Directive {
    Ignore,
    Minimize,
    Maximize,
    Target { value: f64, scale: f64 },
}

/// Where objective values come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    Surrogate,
    Proxy,
}

impl FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "proxy" => Ok(Backend::Proxy),
            "surrogate" => Ok(Backend::Surrogate),
            _ => Err(Error::Config(format!("unknown backend `{s}`"))),
        }
    }
}

/// Per-output directives, e.g. `target:rft=12000,target:rfc=1000,min:sedt`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveSpec {
    pub directives: [Directive; 5],
    pub backend: Backend,
}

impl ObjectiveSpec {
    pub fn new(directives: [Directive; 5], backend: Backend) -> Result<Self> {
        let spec = Self { directives, backend };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.directives.iter().all(|d| *d == Directive::Ignore) {
            return Err(Error::Config("objective has no active directive".into()));
        }
        for (kind, d) in OutputKind::ALL.iter().zip(&self.directives) {
            if let Directive::Target { value, scale } = d {
                if !value.is_finite() || !(*scale > 0.0 && scale.is_finite()) {
                    return Err(Error::Config(format!(
                        "target for {kind} needs a finite value and positive scale"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn directive(&self, kind: OutputKind) -> Directive {
        self.directives[kind.index()]
    }

    pub fn with_backend(mut self, backend: Backend) -> Self {
        self.backend = backend;
        self
    }

    /// Active outputs in canonical order.
    pub fn active(&self) -> Vec<(OutputKind, Directive)> {
        OutputKind::ALL
            .into_iter()
            .zip(self.directives)
            .filter(|(_, d)| *d != Directive::Ignore)
            .collect()
    }

    pub fn has_targets(&self) -> bool {
        self.directives
            .iter()
            .any(|d| matches!(d, Directive::Target { .. }))
    }

    /// Objective vector in minimization form: maximized outputs are negated,
    /// targets become squared scaled deviations.
    pub fn objective_vector(&self, record: &PerformanceRecord) -> Vec<f64> {
        self.active()
            .into_iter()
            .map(|(kind, d)| {
                let y = record.get(kind);
                match d {
                    Directive::Minimize => y,
                    Directive::Maximize => -y,
                    Directive::Target { value, scale } => ((y - value) / scale).powi(2),
                    Directive::Ignore => unreachable!(),
                }
            })
            .collect()
    }

    /// Senses of [`ObjectiveSpec::objective_vector`], all minimization.
    pub fn senses(&self) -> Vec<Sense> {
        vec![Sense::Minimize; self.active().len()]
    }

    /// Short tag for file names, e.g. `max_rft`.
    pub fn tag(&self) -> String {
        self.active()
            .into_iter()
            .map(|(k, d)| match d {
                Directive::Minimize => format!("min_{k}"),
                Directive::Maximize => format!("max_{k}"),
                Directive::Target { .. } => format!("target_{k}"),
                Directive::Ignore => unreachable!(),
            })
            .collect::<Vec<_>>()
            .join("-")
    }
}

impl FromStr for ObjectiveSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut directives = [Directive::Ignore; 5];
        for term in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let (verb, rest) = term
                .split_once(':')
                .ok_or_else(|| Error::Config(format!("objective term `{term}` lacks `:`")))?;
            let (kind, directive) = match verb {
                "min" => (rest.parse::<OutputKind>()?, Directive::Minimize),
                "max" => (rest.parse::<OutputKind>()?, Directive::Maximize),
                "target" => {
                    let (name, amount) = rest
                        .split_once('=')
                        .ok_or_else(|| Error::Config(format!("target `{term}` lacks `=`")))?;
                    let (value, scale) = match amount.split_once('/') {
                        Some((v, s)) => (parse_number(v, term)?, Some(parse_number(s, term)?)),
                        None => (parse_number(amount, term)?, None),
                    };
                    let scale = scale.unwrap_or(DEFAULT_TARGET_SCALE * value.abs());
                    (name.parse::<OutputKind>()?, Directive::Target { value, scale })
                }
                _ => return Err(Error::Config(format!("unknown objective verb `{verb}`"))),
            };
            if directives[kind.index()] != Directive::Ignore {
                return Err(Error::Config(format!("{kind} appears twice in objective")));
            }
            directives[kind.index()] = directive;
        }
        ObjectiveSpec::new(directives, Backend::Proxy)
    }
}

fn parse_number(s: &str, term: &str) -> Result<f64> {
    s.trim()
        .parse()
        .map_err(|_| Error::Config(format!("bad number `{s}` in `{term}`")))
}

impl fmt::Display for ObjectiveSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .active()
            .into_iter()
            .map(|(k, d)| match d {
                Directive::Minimize => format!("min:{k}"),
                Directive::Maximize => format!("max:{k}"),
                Directive::Target { value, scale } => format!("target:{k}={value}/{scale}"),
                Directive::Ignore => unreachable!(),
            })
            .collect();
        f.write_str(&terms.join(","))
    }
}

/// Scalar loss, lower is better:
/// `Σ_targets ((y-τ)/s)² + Σ_min y/y_base - Σ_max y/y_base`.
pub fn scalarize_targeted(record: &PerformanceRecord, spec: &ObjectiveSpec, base: &PerformanceRecord) -> f64 {
    spec.active()
        .into_iter()
        .map(|(kind, d)| {
            let y = record.get(kind);
            let reference = base.get(kind);
            match d {
                Directive::Target { value, scale } => ((y - value) / scale).powi(2),
                Directive::Minimize => y / reference,
                Directive::Maximize => -y / reference,
                Directive::Ignore => 0.0,
            }
        })
        .sum()
}
