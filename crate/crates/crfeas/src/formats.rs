//! Filter JSON files and cascade CSV files.

use std::fs;
use std::io::Write;
use std::path::Path;

use crfeas_core::wavelet::{CascadeSamples, Complex64, ConstraintResiduals, FilterPair};
use serde::{Deserialize, Serialize};

use crate::{HarnessError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualsJson {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
}

impl From<ConstraintResiduals> for ResidualsJson {
    fn from(r: ConstraintResiduals) -> Self {
        Self {
            c1: r.c1,
            c2: r.c2,
            c3: r.c3,
            c4: r.c4,
        }
    }
}

/// Filter coefficients as `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterFile {
    #[serde(rename = "M")]
    pub m: usize,
    #[serde(rename = "D")]
    pub d: u32,
    pub variant: String,
    pub h: Vec<[f64; 2]>,
    pub g: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residuals: Option<ResidualsJson>,
}

fn pairs(z: &[Complex64]) -> Vec<[f64; 2]> {
    z.iter().map(|c| [c.re, c.im]).collect()
}

fn complex(p: &[[f64; 2]]) -> Vec<Complex64> {
    p.iter().map(|[re, im]| Complex64::new(*re, *im)).collect()
}

impl FilterFile {
    pub fn new(m: usize, d: u32, variant: &str, filters: &FilterPair, residuals: Option<ConstraintResiduals>) -> Self {
        Self {
            m,
            d,
            variant: variant.to_string(),
            h: pairs(&filters.h),
            g: pairs(&filters.g),
            residuals: residuals.map(Into::into),
        }
    }

    pub fn filters(&self) -> Result<FilterPair> {
        if self.h.len() != self.g.len() || self.h.len() < 2 {
            return Err(HarnessError::Invalid(format!(
                "filters must have equal length >= 2, got {} and {}",
                self.h.len(),
                self.g.len()
            )));
        }
        Ok(FilterPair {
            h: complex(&self.h),
            g: complex(&self.g),
        })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        fs::write(path, text).map_err(|e| HarnessError::io(path, e))
    }
}

/// Writes `# <json>` followed by a newline.
pub fn write_comment_header<W: Write>(out: &mut W, config: &impl Serialize) -> std::io::Result<()> {
    let json = serde_json::to_string(config).map_err(std::io::Error::other)?;
    writeln!(out, "# {json}")
}

#[derive(Serialize)]
struct CascadeRow {
    t: f64,
    phi_re: f64,
    phi_im: f64,
    psi_re: f64,
    psi_im: f64,
}

pub fn write_cascade_csv(path: &Path, samples: &CascadeSamples, config: &impl Serialize) -> Result<()> {
    let mut file = fs::File::create(path).map_err(|e| HarnessError::io(path, e))?;
    write_comment_header(&mut file, config).map_err(|e| HarnessError::io(path, e))?;
    let mut w = csv::Writer::from_writer(file);
    for ((t, phi), psi) in samples.t.iter().zip(&samples.phi).zip(&samples.psi) {
        w.serialize(CascadeRow {
            t: *t,
            phi_re: phi.re,
            phi_im: phi.im,
            psi_re: psi.re,
            psi_im: psi.im,
        })?;
    }
    w.flush().map_err(|e| HarnessError::io(path, e))
}

/// Opens a CSV written by this crate, skipping `#` comment lines.
pub fn csv_reader(path: &Path) -> Result<csv::Reader<fs::File>> {
    let file = fs::File::open(path).map_err(|e| HarnessError::io(path, e))?;
    Ok(csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(file))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn filter_file_round_trip() {
        let f = FilterPair {
            h: vec![Complex64::new(0.5, 0.0), Complex64::new(0.5, -0.25)],
            g: vec![Complex64::new(0.5, 0.0), Complex64::new(-0.5, 0.0)],
        };
        let file = FilterFile::new(2, 0, "real", &f, None);
        let text = serde_json::to_string(&file).unwrap();
        assert!(text.contains("\"M\":2"));
        let back: FilterFile = serde_json::from_str(&text).unwrap();
        assert_eq!(back.filters().unwrap(), f);
    }
}
