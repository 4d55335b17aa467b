//! JSON frame documents: `{"d": 3, "n": 2, "fields": [{"label": "X1",
//! "components": ["1", "0", "0.5*x2"]}, ...], "points": [[0, 0, 0]]}`.

use serde::{Deserialize, Serialize};
use srheat_core::vf_analyzer::{Frame, PolyVectorField, Polynomial};
use thiserror::Error;

use crate::parser::{parse_polynomial, ParseError};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub components: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameSpec {
    pub d: usize,
    pub n: usize,
    pub fields: Vec<FieldSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub points: Vec<Vec<f64>>,
}

/// One problem in a frame document, located by field and component.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrameIssue {
    /// 1-based field index, if the issue belongs to a field.
    pub field: Option<usize>,
    pub component: Option<usize>,
    pub message: String,
}

impl std::fmt::Display for FrameIssue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match (self.field, self.component) {
            (Some(i), Some(j)) => write!(f, "field {i}, component {j}: {}", self.message),
            (Some(i), None) => write!(f, "field {i}: {}", self.message),
            _ => write!(f, "{}", self.message),
        }
    }
}

/// All problems found in a frame document.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("invalid frame document:\n  {}", .issues.iter().map(ToString::to_string).collect::<Vec<_>>().join("\n  "))]
pub struct FrameError {
    pub issues: Vec<FrameIssue>,
}

impl FrameSpec {
    pub fn from_json(text: &str) -> Result<Self, FrameError> {
        serde_json::from_str(text).map_err(|e| FrameError {
            issues: vec![FrameIssue {
                field: None,
                component: None,
                message: format!("malformed JSON: {e}"),
            }],
        })
    }

    /// Canonical document for `frame`; coefficients are printed in shortest
    /// round-trip form so that parsing reproduces the frame exactly.
    pub fn from_frame(frame: &Frame<f64>, labels: Option<&[String]>) -> Self {
        FrameSpec {
            d: frame.dim(),
            n: frame.n(),
            fields: frame
                .fields()
                .iter()
                .enumerate()
                .map(|(i, v)| FieldSpec {
                    label: labels.and_then(|l| l.get(i).cloned()),
                    components: v.components().iter().map(ToString::to_string).collect(),
                })
                .collect(),
            points: Vec::new(),
        }
    }
}

/// Builds the frame described by `spec`, collecting every problem.
pub fn parse_frame(spec: &FrameSpec) -> Result<Frame<f64>, FrameError> {
    let mut issues = Vec::new();
    let issue = |field, component, message: String| FrameIssue {
        field,
        component,
        message,
    };
    if spec.n == 0 {
        issues.push(issue(None, None, "n must be at least 1".into()));
    }
    if spec.d == 0 {
        issues.push(issue(None, None, "d must be at least 1".into()));
    }
    if spec.fields.len() != spec.n {
        issues.push(issue(
            None,
            None,
            format!("n = {} but {} fields are given", spec.n, spec.fields.len()),
        ));
    }
    let mut fields = Vec::new();
    for (i, f) in spec.fields.iter().enumerate() {
        if f.components.len() != spec.d {
            issues.push(issue(
                Some(i + 1),
                None,
                format!("{} components given, expected d = {}", f.components.len(), spec.d),
            ));
            continue;
        }
        let mut comps: Vec<Polynomial<f64>> = Vec::new();
        for (j, src) in f.components.iter().enumerate() {
            match parse_polynomial(src, spec.d) {
                Ok(p) => comps.push(p),
                Err(ParseError {
                    line,
                    column,
                    message,
                }) => issues.push(issue(
                    Some(i + 1),
                    Some(j + 1),
                    format!("{line}:{column}: {message} in \"{src}\""),
                )),
            }
        }
        if comps.len() == spec.d {
            fields.push(PolyVectorField::new(comps).expect("components share d"));
        }
    }
    for (k, x) in spec.points.iter().enumerate() {
        if x.len() != spec.d {
            issues.push(issue(
                None,
                None,
                format!("point {} has {} coordinates, expected {}", k + 1, x.len(), spec.d),
            ));
        }
    }
    if !issues.is_empty() {
        return Err(FrameError { issues });
    }
    Frame::new(fields).map_err(|e| FrameError {
        issues: vec![issue(None, None, e.to_string())],
    })
}
