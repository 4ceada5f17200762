//! Parser for the plain-text dispersion-data format.
//!
//! The format is line oriented. `#` starts a comment, blank lines are
//! ignored, and every other line is `key = value`. An optional `source =`
//! line may precede the first mode block. Each mode block is:
//!
//! ```text
//! mode = 00
//! kind = constant | sellmeier | table
//! range_um = <lo> <hi>
//! n = <value>                  # constant only
//! coeffs = <c0> <b1> <c1> ...  # sellmeier only
//! point = <lambda_um> <n>      # table only, one line per sample
//! offset = <a0> [a1 a2 ...]    # optional polynomial in lambda_um
//! ```
//!
//! All diagnostics carry 1-based line numbers.

use super::{
    DispersionError, DispersionProvider, IndexBase, ModeDispersionModel, ModeLabel,
    SellmeierForm, SellmeierModel, TabulatedIndex,
};

/// Parse the dispersion file format into a provider.
pub fn parse_dispersion_file(content: &str) -> Result<DispersionProvider, DispersionError> {
    let mut metadata = String::new();
    let mut blocks: Vec<Block> = Vec::new();
    let mut seen: Vec<(ModeLabel, usize)> = Vec::new();

    for (idx, raw) in content.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| DispersionError::Parse {
            line: line_no,
            message: format!("expected \"key = value\", got \"{line}\""),
        })?;
        let key = key.trim();
        let value = value.trim();

        match key {
            "source" => {
                if !blocks.is_empty() {
                    return Err(DispersionError::Parse {
                        line: line_no,
                        message: "\"source\" must precede the first mode block".into(),
                    });
                }
                metadata = value.to_string();
            }
            "mode" => {
                let label: ModeLabel = value.parse().map_err(|e| DispersionError::Parse {
                    line: line_no,
                    message: e,
                })?;
                if let Some((_, first)) = seen.iter().find(|(l, _)| *l == label) {
                    return Err(DispersionError::Schema {
                        message: format!(
                            "duplicate mode label \"{label}\" at line {line_no} (first declared at line {first})"
                        ),
                    });
                }
                seen.push((label, line_no));
                blocks.push(Block::new(label, line_no));
            }
            _ => {
                let block = blocks.last_mut().ok_or_else(|| DispersionError::Parse {
                    line: line_no,
                    message: format!("\"{key}\" appears before any \"mode =\" line"),
                })?;
                block.add(key, value, line_no)?;
            }
        }
    }

    if blocks.is_empty() {
        return Err(DispersionError::Schema {
            message: "dispersion data declares no modes".into(),
        });
    }

    let models = blocks
        .into_iter()
        .map(Block::finish)
        .collect::<Result<Vec<_>, _>>()?;
    DispersionProvider::new(models, metadata)
}

struct Block {
    label: ModeLabel,
    start_line: usize,
    kind: Option<(String, usize)>,
    range: Option<((f64, f64), usize)>,
    n: Option<(f64, usize)>,
    coeffs: Option<(Vec<f64>, usize)>,
    points: Vec<(f64, f64)>,
    last_point_line: usize,
    offset: Option<(Vec<f64>, usize)>,
}

impl Block {
    fn new(label: ModeLabel, start_line: usize) -> Self {
        Self {
            label,
            start_line,
            kind: None,
            range: None,
            n: None,
            coeffs: None,
            points: Vec::new(),
            last_point_line: start_line,
            offset: None,
        }
    }

    fn add(&mut self, key: &str, value: &str, line: usize) -> Result<(), DispersionError> {
        match key {
            "kind" => {
                set_once(&mut self.kind, (value.to_string(), line), "kind", line)?;
                if !matches!(value, "constant" | "sellmeier" | "table") {
                    return Err(DispersionError::Parse {
                        line,
                        message: format!(
                            "unknown kind \"{value}\" (expected constant, sellmeier, or table)"
                        ),
                    });
                }
            }
            "range_um" => {
                let vals = parse_floats(value, line)?;
                if vals.len() != 2 {
                    return Err(DispersionError::Parse {
                        line,
                        message: "range_um takes exactly two values: <lo> <hi>".into(),
                    });
                }
                set_once(&mut self.range, ((vals[0], vals[1]), line), "range_um", line)?;
            }
            "n" => {
                let vals = parse_floats(value, line)?;
                if vals.len() != 1 {
                    return Err(DispersionError::Parse {
                        line,
                        message: "n takes exactly one value".into(),
                    });
                }
                set_once(&mut self.n, (vals[0], line), "n", line)?;
            }
            "coeffs" => {
                let vals = parse_floats(value, line)?;
                set_once(&mut self.coeffs, (vals, line), "coeffs", line)?;
            }
            "point" => {
                let vals = parse_floats(value, line)?;
                if vals.len() != 2 {
                    return Err(DispersionError::Parse {
                        line,
                        message: "point takes exactly two values: <lambda_um> <n>".into(),
                    });
                }
                self.points.push((vals[0], vals[1]));
                self.last_point_line = line;
            }
            "offset" => {
                let vals = parse_floats(value, line)?;
                set_once(&mut self.offset, (vals, line), "offset", line)?;
            }
            _ => {
                return Err(DispersionError::Parse {
                    line,
                    message: format!("unknown key \"{key}\""),
                })
            }
        }
        Ok(())
    }

    fn finish(self) -> Result<ModeDispersionModel, DispersionError> {
        let line = self.start_line;
        let missing = |what: &str| DispersionError::Parse {
            line,
            message: format!("mode \"{}\" is missing \"{what}\"", self.label),
        };
        let (kind, _) = self.kind.ok_or_else(|| missing("kind"))?;
        let (range, _) = self.range.ok_or_else(|| missing("range_um"))?;

        let reject = |field: Option<usize>, name: &str| -> Result<(), DispersionError> {
            if let Some(l) = field {
                return Err(DispersionError::Parse {
                    line: l,
                    message: format!("\"{name}\" is not valid for kind = {kind}"),
                });
            }
            Ok(())
        };

        let lift = |e: DispersionError, at: usize| match e {
            DispersionError::InvalidModel(message) => DispersionError::Parse { line: at, message },
            other => other,
        };

        let base = match kind.as_str() {
            "constant" => {
                reject(self.coeffs.as_ref().map(|c| c.1), "coeffs")?;
                if !self.points.is_empty() {
                    reject(Some(self.last_point_line), "point")?;
                }
                let (n, n_line) = self.n.ok_or_else(|| missing("n"))?;
                IndexBase::Analytic(
                    SellmeierModel::constant(n, range).map_err(|e| lift(e, n_line))?,
                )
            }
            "sellmeier" => {
                reject(self.n.as_ref().map(|c| c.1), "n")?;
                if !self.points.is_empty() {
                    reject(Some(self.last_point_line), "point")?;
                }
                let (coeffs, c_line) = self.coeffs.ok_or_else(|| missing("coeffs"))?;
                IndexBase::Analytic(
                    SellmeierModel::new(SellmeierForm::Standard, coeffs, range)
                        .map_err(|e| lift(e, c_line))?,
                )
            }
            "table" => {
                reject(self.n.as_ref().map(|c| c.1), "n")?;
                reject(self.coeffs.as_ref().map(|c| c.1), "coeffs")?;
                if self.points.is_empty() {
                    return Err(missing("point"));
                }
                IndexBase::Table(
                    TabulatedIndex::new(self.points, range)
                        .map_err(|e| lift(e, self.last_point_line))?,
                )
            }
            _ => unreachable!("kind validated on add"),
        };

        let offset = self.offset.map(|(v, _)| v).unwrap_or_default();
        ModeDispersionModel::new(self.label, base, offset).map_err(|e| lift(e, line))
    }
}

fn set_once<T>(
    slot: &mut Option<T>,
    value: T,
    name: &str,
    line: usize,
) -> Result<(), DispersionError> {
    if slot.is_some() {
        return Err(DispersionError::Parse {
            line,
            message: format!("\"{name}\" given twice in one mode block"),
        });
    }
    *slot = Some(value);
    Ok(())
}

fn parse_floats(value: &str, line: usize) -> Result<Vec<f64>, DispersionError> {
    value
        .split_whitespace()
        .map(|tok| {
            tok.parse::<f64>().map_err(|_| DispersionError::Parse {
                line,
                message: format!("\"{tok}\" is not a number"),
            })
        })
        .collect()
}
