//! Job specifications: a JSON file, command-line flags, or both (flags
//! override file fields).

use std::fmt;
use std::path::PathBuf;

use confmap::diffops::{default_vars, Frame, SmoothMap};
use confmap::expr::parse;
use confmap::metric::Signature;
use serde::{Deserialize, Serialize};

/// A usage-level error: the job never reached numerical checks. Exit 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

fn default_grid() -> usize {
    17
}

fn default_tol() -> f64 {
    1e-8
}

fn default_frame() -> Frame {
    Frame::Cartesian
}

/// One (x, y) pair for `conf fit`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FitSample {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

/// Everything a run needs; serialized back into the report verbatim.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct JobSpec {
    pub signature: Signature,
    #[serde(default = "default_frame")]
    pub frame: Frame,
    #[serde(default)]
    pub components: Vec<String>,
    #[serde(default)]
    pub region: Vec<[f64; 2]>,
    #[serde(default = "default_grid")]
    pub grid: usize,
    #[serde(default = "default_tol")]
    pub tolerance: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<Vec<FitSample>>,
}

/// Raw command-line flags, merged over the job file.
#[derive(Clone, Debug, Default)]
pub struct JobFlags {
    pub job: Option<PathBuf>,
    pub sig: Option<String>,
    pub frame: Option<String>,
    pub comp: Vec<String>,
    pub region: Vec<String>,
    pub grid: Option<usize>,
    pub tol: Option<f64>,
    pub preset: Option<String>,
    pub samples: Option<PathBuf>,
}

fn parse_sig(text: &str) -> Result<Signature, UsageError> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 2 {
        return Err(UsageError(format!("--sig expects N,NU, got `{text}`")));
    }
    let n = parts[0]
        .trim()
        .parse::<usize>()
        .map_err(|_| UsageError(format!("bad dimension in --sig `{text}`")))?;
    let nu = parts[1]
        .trim()
        .parse::<usize>()
        .map_err(|_| UsageError(format!("bad index in --sig `{text}`")))?;
    Signature::new(n, nu).map_err(|e| UsageError(e.to_string()))
}

fn parse_region(text: &str) -> Result<[f64; 2], UsageError> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 2 {
        return Err(UsageError(format!("--region expects LO:HI, got `{text}`")));
    }
    let lo = parts[0]
        .trim()
        .parse::<f64>()
        .map_err(|_| UsageError(format!("bad bound in --region `{text}`")))?;
    let hi = parts[1]
        .trim()
        .parse::<f64>()
        .map_err(|_| UsageError(format!("bad bound in --region `{text}`")))?;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(UsageError(format!(
            "region bounds must be finite with LO < HI, got `{text}`"
        )));
    }
    Ok([lo, hi])
}

impl JobSpec {
    /// Loads the job file (if any), applies flag overrides and
    /// materializes presets.
    pub fn resolve(flags: &JobFlags) -> Result<JobSpec, UsageError> {
        let mut job: Option<JobSpec> = match &flags.job {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| {
                    UsageError(format!("cannot read job file {}: {e}", path.display()))
                })?;
                Some(
                    serde_json::from_str(&text)
                        .map_err(|e| UsageError(format!("bad job file {}: {e}", path.display())))?,
                )
            }
            None => None,
        };

        if let Some(sig_text) = &flags.sig {
            let signature = parse_sig(sig_text)?;
            match &mut job {
                Some(j) => j.signature = signature,
                None => {
                    job = Some(JobSpec {
                        signature,
                        frame: default_frame(),
                        components: vec![],
                        region: vec![],
                        grid: default_grid(),
                        tolerance: default_tol(),
                        preset: None,
                        samples: None,
                    })
                }
            }
        }
        if job.is_none() && flags.preset.is_some() {
            job = Some(JobSpec {
                signature: Signature::new(2, 1).expect("valid"),
                frame: Frame::Null,
                components: vec![],
                region: vec![],
                grid: default_grid(),
                tolerance: default_tol(),
                preset: None,
                samples: None,
            });
        }
        let mut job = job.ok_or_else(|| {
            UsageError("no job: pass --job FILE, --sig N,NU or --preset".to_string())
        })?;

        if let Some(frame) = &flags.frame {
            job.frame = match frame.as_str() {
                "cartesian" => Frame::Cartesian,
                "null" => Frame::Null,
                other => {
                    return Err(UsageError(format!(
                        "--frame must be `cartesian` or `null`, got `{other}`"
                    )))
                }
            };
        }
        if !flags.comp.is_empty() {
            job.components = flags.comp.clone();
        }
        if !flags.region.is_empty() {
            job.region = flags
                .region
                .iter()
                .map(|r| parse_region(r))
                .collect::<Result<_, _>>()?;
        }
        if let Some(grid) = flags.grid {
            job.grid = grid;
        }
        if let Some(tol) = flags.tol {
            job.tolerance = tol;
        }
        if let Some(preset) = &flags.preset {
            job.preset = Some(preset.clone());
        }
        if let Some(path) = &flags.samples {
            let text = std::fs::read_to_string(path).map_err(|e| {
                UsageError(format!("cannot read samples file {}: {e}", path.display()))
            })?;
            job.samples =
                Some(serde_json::from_str(&text).map_err(|e| {
                    UsageError(format!("bad samples file {}: {e}", path.display()))
                })?);
        }

        job.apply_preset()?;
        job.validate()?;
        Ok(job)
    }

    /// Fills signature, frame, components and a default region from a
    /// named preset.
    fn apply_preset(&mut self) -> Result<(), UsageError> {
        match self.preset.as_deref() {
            None => Ok(()),
            Some("compactification") => {
                self.signature = Signature::new(2, 1).expect("valid");
                self.frame = Frame::Null;
                self.components = vec!["2/pi*atan(u)".to_string(), "2/pi*atan(v)".to_string()];
                if self.region.is_empty() {
                    self.region = vec![[-100.0, 100.0], [-100.0, 100.0]];
                }
                Ok(())
            }
            Some(other) => Err(UsageError(format!(
                "unknown preset `{other}` (available: compactification)"
            ))),
        }
    }

    // Component counts are command-specific (check/factor/grid take n,
    // decompose takes one scalar) and are validated there.
    fn validate(&self) -> Result<(), UsageError> {
        let n = self.signature.n();
        if self.grid < 2 {
            return Err(UsageError("grid must be at least 2".to_string()));
        }
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(UsageError(
                "tolerance must be a positive number".to_string(),
            ));
        }
        if !self.region.is_empty() {
            if self.region.len() != n {
                return Err(UsageError(format!(
                    "region needs one LO:HI pair per coordinate ({n}), got {}",
                    self.region.len()
                )));
            }
            for r in &self.region {
                if !(r[0].is_finite() && r[1].is_finite() && r[0] < r[1]) {
                    return Err(UsageError(format!(
                        "region bounds must be finite with LO < HI, got {r:?}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Coordinate names the components are parsed over.
    pub fn vars(&self) -> Vec<String> {
        default_vars(self.signature, self.frame)
    }

    /// Parses the components into a map. Parse failures are usage errors
    /// carrying the offset.
    pub fn build_map(&self) -> Result<SmoothMap, UsageError> {
        if self.components.is_empty() {
            return Err(UsageError(
                "no components: pass --comp once per coordinate or use a preset".to_string(),
            ));
        }
        let vars = self.vars();
        let comps = self
            .components
            .iter()
            .map(|src| parse(src, &vars).map_err(|e| UsageError(format!("component `{src}`: {e}"))))
            .collect::<Result<Vec<_>, _>>()?;
        SmoothMap::new(self.signature, self.frame, comps).map_err(|e| UsageError(e.to_string()))
    }

    /// The region as (lo, hi) pairs, required for sampling commands.
    pub fn bounds(&self) -> Result<Vec<(f64, f64)>, UsageError> {
        if self.region.is_empty() {
            return Err(UsageError(
                "no region: pass --region LO:HI once per coordinate".to_string(),
            ));
        }
        Ok(self.region.iter().map(|r| (r[0], r[1])).collect())
    }
}
