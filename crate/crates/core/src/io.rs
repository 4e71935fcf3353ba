//! Textual field files.
//!
//! A field file is one JSON object. One-dimensional fields carry `grid`,
//! two-dimensional fields carry `xgrid` and `ygrid`; each grid is
//! `{start, step, count}`. `values` is a flat array of `[re, im]` pairs in
//! row-major order with x fast. Spectra add `"domain": "frequency"` and the
//! dual spatial grid(s) under `space` (1-D) or `xspace`/`yspace` (2-D,
//! `null` for an axis still in the spatial domain).
//!
//! Floats are written in shortest round-trip form, so a write/read cycle
//! reproduces every sample bit for bit.

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::{Spectrum1D, Spectrum2D};
use crate::grid::{Field1D, Field2D, UniformGrid1D};

const FREQUENCY: &str = "frequency";

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    start: f64,
    step: f64,
    count: usize,
}

impl From<&UniformGrid1D> for RawGrid {
    fn from(g: &UniformGrid1D) -> Self {
        Self {
            start: g.start(),
            step: g.step(),
            count: g.count(),
        }
    }
}

impl RawGrid {
    fn build(&self, name: &str) -> Result<UniformGrid1D> {
        UniformGrid1D::new(self.start, self.step, self.count)
            .map_err(|e| Error::Format(format!("{name}: {e}")))
    }
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawField {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    domain: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    grid: Option<RawGrid>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    xgrid: Option<RawGrid>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    ygrid: Option<RawGrid>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    space: Option<RawGrid>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    xspace: Option<Option<RawGrid>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    yspace: Option<Option<RawGrid>>,
    values: Vec<[f64; 2]>,
}

/// Any object a field file can hold.
#[derive(Debug, Clone, PartialEq)]
pub enum FieldData {
    One(Field1D),
    Two(Field2D),
    Spectrum1(Spectrum1D),
    Spectrum2(Spectrum2D),
}

fn pack(values: &[Complex64]) -> Vec<[f64; 2]> {
    values.iter().map(|v| [v.re, v.im]).collect()
}

fn unpack(values: &[[f64; 2]]) -> Result<Vec<Complex64>> {
    values
        .iter()
        .enumerate()
        .map(|(k, &[re, im])| {
            if re.is_finite() && im.is_finite() {
                Ok(Complex64::new(re, im))
            } else {
                Err(Error::Format(format!("value {k} is not finite")))
            }
        })
        .collect()
}

fn raw_of(data: &FieldData) -> RawField {
    match data {
        FieldData::One(f) => RawField {
            grid: Some(f.grid().into()),
            values: pack(f.values()),
            ..Default::default()
        },
        FieldData::Two(f) => RawField {
            xgrid: Some(f.xgrid().into()),
            ygrid: Some(f.ygrid().into()),
            values: pack(f.values()),
            ..Default::default()
        },
        FieldData::Spectrum1(s) => RawField {
            domain: Some(FREQUENCY.into()),
            grid: Some(s.freq().into()),
            space: Some((&s.space).into()),
            values: pack(s.values()),
            ..Default::default()
        },
        FieldData::Spectrum2(s) => RawField {
            domain: Some(FREQUENCY.into()),
            xgrid: Some(s.field.xgrid().into()),
            ygrid: Some(s.field.ygrid().into()),
            xspace: Some(s.x_space.as_ref().map(RawGrid::from)),
            yspace: Some(s.y_space.as_ref().map(RawGrid::from)),
            values: pack(s.values()),
            ..Default::default()
        },
    }
}

fn data_of(raw: RawField) -> Result<FieldData> {
    let values = unpack(&raw.values)?;
    let frequency = match raw.domain.as_deref() {
        None | Some("space") => false,
        Some(FREQUENCY) => true,
        Some(other) => return Err(Error::Format(format!("unknown domain '{other}'"))),
    };
    let fmt = |e: Error| Error::Format(e.to_string());
    match (&raw.grid, &raw.xgrid, &raw.ygrid) {
        (Some(g), None, None) => {
            let field = Field1D::new(g.build("grid")?, values).map_err(fmt)?;
            if frequency {
                let space = raw
                    .space
                    .as_ref()
                    .ok_or_else(|| Error::Format("spectrum is missing 'space'".into()))?
                    .build("space")?;
                Ok(FieldData::Spectrum1(Spectrum1D::new(field, space).map_err(fmt)?))
            } else {
                Ok(FieldData::One(field))
            }
        }
        (None, Some(xg), Some(yg)) => {
            let field = Field2D::new(xg.build("xgrid")?, yg.build("ygrid")?, values).map_err(fmt)?;
            if frequency {
                let dual = |g: &Option<Option<RawGrid>>, name: &str| -> Result<Option<UniformGrid1D>> {
                    match g {
                        Some(Some(g)) => g.build(name).map(Some),
                        _ => Ok(None),
                    }
                };
                let xs = dual(&raw.xspace, "xspace")?;
                let ys = dual(&raw.yspace, "yspace")?;
                Ok(FieldData::Spectrum2(Spectrum2D::new(field, xs, ys).map_err(fmt)?))
            } else {
                Ok(FieldData::Two(field))
            }
        }
        _ => Err(Error::Format(
            "expected either 'grid' or both 'xgrid' and 'ygrid'".into(),
        )),
    }
}

pub fn to_string(data: &FieldData) -> Result<String> {
    Ok(serde_json::to_string(&raw_of(data))?)
}

pub fn from_str(text: &str) -> Result<FieldData> {
    let raw: RawField = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
    data_of(raw)
}

pub fn write_field(path: impl AsRef<Path>, data: &FieldData) -> Result<()> {
    let mut text = to_string(data)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

pub fn read_field(path: impl AsRef<Path>) -> Result<FieldData> {
    from_str(&fs::read_to_string(path)?)
}
