//! Line-based scene configuration.
//!
//! ```text
//! # comment
//! [medium]
//! k = 6.283185307179586
//! alpha = 0
//! h = 1
//! r_meas = 2
//!
//! [shape]
//! type = ellipse        # ellipse | kite | cross | sinusoid
//! cx = 0
//! cy = 0
//! ax = 0.6
//! ay = 0.3
//! rot = 0
//! q_re = 1
//! q_im = 0
//! ```
//!
//! Shape keys: ellipse `cx cy ax ay [rot]`, kite `cx cy scale`, cross
//! `cx cy arm_len arm_wid`, sinusoid `amp thick [phase]`. Every shape accepts
//! `q_re` (default 1) and `q_im` (default 0). In `[medium]`, `k` and `h` are
//! required, `alpha` defaults to 0, `r_meas` to `max(2, h)`, and the optional
//! `wood_tol` overrides the relative Wood-anomaly guard.

use std::collections::BTreeMap;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::medium::{MediumParams, DEFAULT_WOOD_TOL};
use crate::real::{lit, Real};
use crate::scatterers::{Scene, Shape};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Section {
    Medium,
    Shape,
}

struct Entry {
    value: f64,
    text: String,
    line: usize,
}

struct Block {
    kind: Section,
    line: usize,
    entries: BTreeMap<String, Entry>,
}

const MEDIUM_KEYS: &[&str] = &["k", "alpha", "h", "r_meas", "wood_tol"];
const SHAPE_KEYS: &[&str] = &[
    "type", "cx", "cy", "ax", "ay", "rot", "scale", "arm_len", "arm_wid", "amp", "thick", "phase",
    "q_re", "q_im",
];

fn parse_error(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

fn validation(message: impl Into<String>) -> Error {
    Error::Validation {
        message: message.into(),
        cause: None,
    }
}

fn tokenize(text: &str) -> Result<Vec<Block>> {
    let mut blocks: Vec<Block> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let content = raw.split('#').next().unwrap_or("");
        let trimmed = content.trim();
        if trimmed.is_empty() {
            continue;
        }
        let indent = content.len() - content.trim_start().len();
        if trimmed.starts_with('[') {
            let kind = match trimmed {
                "[medium]" => Section::Medium,
                "[shape]" => Section::Shape,
                _ => {
                    return Err(parse_error(
                        line_no,
                        indent + 1,
                        format!("unknown section header `{trimmed}`"),
                    ))
                }
            };
            if kind == Section::Medium && blocks.iter().any(|b| b.kind == Section::Medium) {
                return Err(parse_error(line_no, indent + 1, "duplicate [medium] section"));
            }
            blocks.push(Block {
                kind,
                line: line_no,
                entries: BTreeMap::new(),
            });
            continue;
        }
        let Some(eq) = content.find('=') else {
            return Err(parse_error(line_no, indent + 1, "expected `name = value`"));
        };
        let key = content[..eq].trim();
        let value_part = &content[eq + 1..];
        let value_text = value_part.trim();
        let value_col = eq + 2 + (value_part.len() - value_part.trim_start().len());
        let Some(block) = blocks.last_mut() else {
            return Err(parse_error(line_no, indent + 1, "key outside of any section"));
        };
        let allowed = match block.kind {
            Section::Medium => MEDIUM_KEYS,
            Section::Shape => SHAPE_KEYS,
        };
        if !allowed.contains(&key) {
            return Err(parse_error(line_no, indent + 1, format!("unknown key `{key}`")));
        }
        if block.entries.contains_key(key) {
            return Err(parse_error(line_no, indent + 1, format!("duplicate key `{key}`")));
        }
        if value_text.is_empty() {
            return Err(parse_error(line_no, value_col, format!("missing value for `{key}`")));
        }
        let value = if key == "type" {
            f64::NAN
        } else {
            match value_text.parse::<f64>() {
                Ok(v) if v.is_finite() => v,
                _ => {
                    return Err(parse_error(
                        line_no,
                        value_col,
                        format!("`{value_text}` is not a finite number"),
                    ))
                }
            }
        };
        block.entries.insert(
            key.to_string(),
            Entry {
                value,
                text: value_text.to_string(),
                line: line_no,
            },
        );
    }
    Ok(blocks)
}

impl Block {
    fn get(&self, key: &str) -> Option<f64> {
        self.entries.get(key).map(|e| e.value)
    }

    fn require(&self, key: &str) -> Result<f64> {
        self.get(key).ok_or_else(|| {
            validation(format!(
                "section starting at line {} is missing required key `{key}`",
                self.line
            ))
        })
    }
}

/// Parses a scene document into a validated [`Scene`].
pub fn parse_scene<T: Real>(text: &str) -> Result<Scene<T>> {
    let blocks = tokenize(text)?;
    let medium = blocks
        .iter()
        .find(|b| b.kind == Section::Medium)
        .ok_or_else(|| validation("missing [medium] section"))?;
    let k = medium.require("k")?;
    let h = medium.require("h")?;
    let alpha = medium.get("alpha").unwrap_or(0.0);
    let r_meas = medium.get("r_meas").unwrap_or(h.max(2.0));
    let wood_tol = medium.get("wood_tol").unwrap_or(DEFAULT_WOOD_TOL);
    let params = MediumParams::with_wood_tol(lit(k), lit(alpha), lit(h), lit(r_meas), lit(wood_tol))
        .map_err(|e| Error::Validation {
            message: format!("invalid [medium]: {e}"),
            cause: Some(Box::new(e)),
        })?;

    let mut shapes = Vec::new();
    for block in blocks.iter().filter(|b| b.kind == Section::Shape) {
        let ty = block
            .entries
            .get("type")
            .ok_or_else(|| validation(format!("[shape] at line {} has no `type`", block.line)))?;
        let f = |key: &str| block.require(key).map(lit::<T>);
        let opt = |key: &str, default: f64| lit::<T>(block.get(key).unwrap_or(default));
        let allowed: &[&str] = match ty.text.as_str() {
            "ellipse" => &["cx", "cy", "ax", "ay", "rot"],
            "kite" => &["cx", "cy", "scale"],
            "cross" => &["cx", "cy", "arm_len", "arm_wid"],
            "sinusoid" => &["amp", "thick", "phase"],
            other => {
                return Err(parse_error(ty.line, 1, format!("unknown shape type `{other}`")));
            }
        };
        for (key, entry) in &block.entries {
            let common = matches!(key.as_str(), "type" | "q_re" | "q_im");
            if !common && !allowed.contains(&key.as_str()) {
                return Err(parse_error(
                    entry.line,
                    1,
                    format!("key `{key}` does not apply to a {} shape", ty.text),
                ));
            }
        }
        let shape = match ty.text.as_str() {
            "ellipse" => Shape::Ellipse {
                center: [f("cx")?, f("cy")?],
                semi_axes: [f("ax")?, f("ay")?],
                rotation: opt("rot", 0.0),
            },
            "kite" => Shape::Kite {
                center: [f("cx")?, f("cy")?],
                scale: f("scale")?,
            },
            "cross" => Shape::Cross {
                center: [f("cx")?, f("cy")?],
                arm_length: f("arm_len")?,
                arm_width: f("arm_wid")?,
            },
            _ => Shape::SinusoidBand {
                amplitude: f("amp")?,
                half_thickness: f("thick")?,
                phase: opt("phase", 0.0),
            },
        };
        let q = Complex::new(opt("q_re", 1.0), opt("q_im", 0.0));
        shapes.push((shape, q));
    }
    Scene::new(params, shapes)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "\
# one ellipse
[medium]
k = 6.283185307179586
alpha = 0
h = 1
r_meas = 2

[shape]
type = ellipse
cx = 0
cy = 0
ax = 0.6   # semi-axis along x1
ay = 0.3
q_re = 1
q_im = 0
";

    #[test]
    fn minimal_document() {
        let scene: Scene<f64> = parse_scene(MINIMAL).unwrap();
        assert_eq!(scene.shapes.len(), 1);
        assert_eq!(scene.params.h(), 1.0);
        assert_eq!(scene.shapes[0].1, Complex::new(1.0, 0.0));
    }

    #[test]
    fn all_shape_types() {
        let doc = "[medium]\nk = 6.283185307179586\nh = 1\n\
            [shape]\ntype = kite\ncx = -1.5\ncy = 0\nscale = 0.4\n\
            [shape]\ntype = cross\ncx = 1.5\ncy = 0\narm_len = 1.2\narm_wid = 0.3\n\
            [shape]\ntype = sinusoid\namp = 0.5\nthick = 0.15\nphase = 0.3\nq_re = 0.5\nq_im = 0.1\n";
        let scene: Scene<f64> = parse_scene(doc).unwrap();
        assert_eq!(scene.shapes.len(), 3);
        assert_eq!(scene.params.r_meas(), 2.0);
        assert!(matches!(scene.shapes[2].0, Shape::SinusoidBand { .. }));
    }

    #[test]
    fn shape_escaping_slab_fails_validation() {
        let doc = MINIMAL.replace("h = 1", "h = 0.25");
        match parse_scene::<f64>(&doc) {
            Err(Error::Validation { .. }) => {}
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn wood_anomaly_is_a_validation_error_with_cause() {
        let doc = MINIMAL.replace("k = 6.283185307179586", "k = 1");
        match parse_scene::<f64>(&doc) {
            Err(Error::Validation { cause: Some(cause), .. }) => {
                assert!(matches!(*cause, Error::WoodAnomalyProximity { .. }))
            }
            other => panic!("expected Wood anomaly cause, got {other:?}"),
        }
    }

    #[test]
    fn parse_errors_carry_position() {
        let doc = MINIMAL.replace("ay = 0.3", "ay = zero");
        match parse_scene::<f64>(&doc) {
            Err(Error::Parse { line, column, .. }) => {
                assert_eq!(line, 13);
                assert_eq!(column, 6);
            }
            other => panic!("expected parse error, got {other:?}"),
        }
        let doc = "k = 1\n";
        assert!(matches!(parse_scene::<f64>(doc), Err(Error::Parse { line: 1, .. })));
        let doc = MINIMAL.replace("[shape]", "[shapes]");
        assert!(matches!(parse_scene::<f64>(&doc), Err(Error::Parse { line: 8, .. })));
        let doc = MINIMAL.replace("rot", "rho").replace("q_im = 0", "q_im = 0\nspin = 2");
        assert!(matches!(parse_scene::<f64>(&doc), Err(Error::Parse { .. })));
    }

    #[test]
    fn missing_keys() {
        let doc = MINIMAL.replace("ax = 0.6   # semi-axis along x1\n", "");
        assert!(matches!(parse_scene::<f64>(&doc), Err(Error::Validation { .. })));
        assert!(matches!(parse_scene::<f64>("[shape]\ntype = kite\n"), Err(Error::Validation { .. })));
        let doc = MINIMAL.replace("type = ellipse", "type = ellipse\nscale = 2");
        assert!(matches!(parse_scene::<f64>(&doc), Err(Error::Parse { .. })));
    }
}
