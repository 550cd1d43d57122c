//! Job files: TOML documents naming a curve, points, an optional
//! parametrization and a route. Expression strings keep their byte spans
//! so parse errors can point at a line and column of the file.

use std::collections::BTreeMap;
use std::ops::Range;

use serde::{Deserialize, Serialize};
use toml::Spanned;

use crate::error::CliError;

/// An expression string, with or without its position in a source file.
pub trait Text {
    fn text(&self) -> &str;
    fn span(&self) -> Option<Range<usize>>;
}

impl Text for String {
    fn text(&self) -> &str {
        self
    }

    fn span(&self) -> Option<Range<usize>> {
        None
    }
}

impl Text for Spanned<String> {
    fn text(&self) -> &str {
        self.get_ref()
    }

    fn span(&self) -> Option<Range<usize>> {
        Some(Spanned::span(self))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound(deserialize = "S: Deserialize<'de>"))]
pub struct Job<S> {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub curve: Option<CurveSection<S>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub points: BTreeMap<String, S>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parametrization: Option<ParamSection<S>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generators: Option<GeneratorSection>,
    pub job: JobSection<S>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveSection<S> {
    #[serde(default = "default_field")]
    pub field: String,
    #[serde(default = "default_model")]
    pub model: String,
    pub a: S,
    pub b: S,
}

fn default_field() -> String {
    "Q(t)".into()
}

fn default_model() -> String {
    "short".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound(deserialize = "S: Deserialize<'de>"))]
pub struct ParamSection<S> {
    pub u: S,
    pub v: S,
    /// `"two-torsion"` or a polynomial in `t` and `a`.
    pub target: S,
    /// Name of the point being halved.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point: Option<String>,
    /// `(x, y)` with coordinates in `t` and `a`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub halving_point: Option<S>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSection {
    pub names: Vec<String>,
    #[serde(default)]
    pub independent: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound(deserialize = "S: Deserialize<'de>"))]
pub struct JobSection<S> {
    pub route: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub t0: Vec<S>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub alpha0: Vec<S>,
    /// `"discriminant"` (default) or `"isogeny"`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<String>,
    /// Polynomial for the `factor` route.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub poly: Option<S>,
}

impl<S: Text> Job<S> {
    /// The same job without source positions.
    pub fn plain(&self) -> Job<String> {
        let p = |s: &S| s.text().to_string();
        Job {
            curve: self.curve.as_ref().map(|c| CurveSection {
                field: c.field.clone(),
                model: c.model.clone(),
                a: p(&c.a),
                b: p(&c.b),
            }),
            points: self.points.iter().map(|(k, v)| (k.clone(), p(v))).collect(),
            parametrization: self.parametrization.as_ref().map(|q| ParamSection {
                u: p(&q.u),
                v: p(&q.v),
                target: p(&q.target),
                point: q.point.clone(),
                halving_point: q.halving_point.as_ref().map(p),
            }),
            generators: self.generators.clone(),
            job: JobSection {
                route: self.job.route.clone(),
                t0: self.job.t0.iter().map(p).collect(),
                alpha0: self.job.alpha0.iter().map(p).collect(),
                base: self.job.base.clone(),
                poly: self.job.poly.as_ref().map(p),
            },
        }
    }
}

/// Where expressions came from, for error positions.
#[derive(Debug, Clone)]
pub struct Source {
    pub name: String,
    pub text: Option<String>,
}

impl Source {
    pub fn detached(name: &str) -> Self {
        Source {
            name: name.into(),
            text: None,
        }
    }

    /// `name:line:column` of the 1-based `column` inside the expression,
    /// or `name (key)` when positions are unknown.
    pub fn locate<S: Text>(&self, expr: &S, key: &str, column: usize) -> String {
        let (Some(text), Some(span)) = (&self.text, expr.span()) else {
            return format!("{} ({key}), column {column}", self.name);
        };
        let raw = &text[span.start..];
        let quote = if raw.starts_with("\"\"\"") || raw.starts_with("'''") {
            3
        } else {
            1
        };
        let offset = (span.start + quote + column.saturating_sub(1)).min(text.len());
        let before = &text[..offset];
        let line = before.matches('\n').count() + 1;
        let col = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
        format!("{}:{line}:{col} ({key})", self.name)
    }
}

pub fn load_toml(name: &str, text: &str) -> Result<(Job<Spanned<String>>, Source), CliError> {
    let job: Job<Spanned<String>> = toml::from_str(text).map_err(|e| {
        let at = e
            .span()
            .map(|s| {
                let before = &text[..s.start.min(text.len())];
                let line = before.matches('\n').count() + 1;
                let col = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
                format!("{name}:{line}:{col}")
            })
            .unwrap_or_else(|| name.to_string());
        CliError::new("E-TOML", format!("{at}: {}", e.message()))
    })?;
    Ok((
        job,
        Source {
            name: name.into(),
            text: Some(text.into()),
        },
    ))
}
