//! Run configuration: defaults, an optional `key = value` file, and
//! command-line overrides, applied in that order.

use std::path::{Path, PathBuf};

use qda_core::fitting::FitOptions;
use qda_core::{OmegaGrid, OmegaMode, PipelineConfig, ZeroPolicy};

use crate::error::AppError;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub bins: usize,
    pub degree: usize,
    pub omega: Option<f64>,
    pub grid: OmegaGrid,
    /// Uniform curve samples; `None` means 16 per bin.
    pub samples: Option<usize>,
    pub zero_policy: ZeroPolicy,
    pub output_dir: PathBuf,
    /// Worker threads; 0 lets the pool pick.
    pub threads: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            bins: qda_core::histogram::DEFAULT_BINS,
            degree: qda_core::bezier::DEFAULT_DEGREE,
            omega: None,
            grid: OmegaGrid::default(),
            samples: None,
            zero_policy: ZeroPolicy::Include,
            output_dir: PathBuf::from("."),
            threads: 0,
        }
    }
}

/// Values that may come from a config file or from flags.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub bins: Option<usize>,
    pub degree: Option<usize>,
    pub omega: Option<OmegaArg>,
    pub omega_lo: Option<f64>,
    pub omega_hi: Option<f64>,
    pub omega_step: Option<f64>,
    pub samples: Option<usize>,
    pub zero_policy: Option<ZeroPolicy>,
    pub output_dir: Option<PathBuf>,
    pub threads: Option<usize>,
}

/// The `omega` setting: grid search or a fixed value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OmegaArg {
    Auto,
    Fixed(f64),
}

impl std::str::FromStr for OmegaArg {
    type Err = String;

    fn from_str(value: &str) -> Result<Self, String> {
        if value.eq_ignore_ascii_case("auto") {
            return Ok(OmegaArg::Auto);
        }
        value
            .parse::<f64>()
            .map(OmegaArg::Fixed)
            .map_err(|_| format!("omega must be `auto` or a number, got `{value}`"))
    }
}

impl Overrides {
    /// Parses `key = value` lines; blank lines and `#` comments are ignored.
    pub fn from_config_text(text: &str) -> Result<Self, String> {
        let mut o = Overrides::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected key = value", i + 1))?;
            let (key, value) = (key.trim().replace('-', "_"), value.trim());
            let bad = |what: &str| format!("line {}: invalid {what} `{value}`", i + 1);
            match key.as_str() {
                "bins" => o.bins = Some(value.parse().map_err(|_| bad("bins"))?),
                "degree" => o.degree = Some(value.parse().map_err(|_| bad("degree"))?),
                "omega" => o.omega = Some(value.parse().map_err(|e| format!("line {}: {e}", i + 1))?),
                "omega_lo" => o.omega_lo = Some(value.parse().map_err(|_| bad("omega_lo"))?),
                "omega_hi" => o.omega_hi = Some(value.parse().map_err(|_| bad("omega_hi"))?),
                "omega_step" => o.omega_step = Some(value.parse().map_err(|_| bad("omega_step"))?),
                "samples" => o.samples = Some(value.parse().map_err(|_| bad("samples"))?),
                "zero_policy" => o.zero_policy = Some(value.parse().map_err(|_| bad("zero_policy"))?),
                "output_dir" => o.output_dir = Some(PathBuf::from(value)),
                "threads" => o.threads = Some(value.parse().map_err(|_| bad("threads"))?),
                other => return Err(format!("line {}: unknown key `{other}`", i + 1)),
            }
        }
        Ok(o)
    }

    pub fn apply(&self, cfg: &mut RunConfig) {
        if let Some(v) = self.bins {
            cfg.bins = v;
        }
        if let Some(v) = self.degree {
            cfg.degree = v;
        }
        match self.omega {
            Some(OmegaArg::Auto) => cfg.omega = None,
            Some(OmegaArg::Fixed(w)) => cfg.omega = Some(w),
            None => {}
        }
        if let Some(v) = self.omega_lo {
            cfg.grid.lo = v;
        }
        if let Some(v) = self.omega_hi {
            cfg.grid.hi = v;
        }
        if let Some(v) = self.omega_step {
            cfg.grid.step = v;
        }
        if let Some(v) = self.samples {
            cfg.samples = Some(v);
        }
        if let Some(v) = self.zero_policy {
            cfg.zero_policy = v;
        }
        if let Some(v) = &self.output_dir {
            cfg.output_dir = v.clone();
        }
        if let Some(v) = self.threads {
            cfg.threads = v;
        }
    }
}

impl RunConfig {
    /// Defaults, then the config file (if any), then flag overrides.
    pub fn resolve(config_file: Option<&Path>, flags: &Overrides) -> Result<Self, AppError> {
        let mut cfg = RunConfig::default();
        if let Some(path) = config_file {
            let text = std::fs::read_to_string(path).map_err(|e| AppError::io(path, e))?;
            let file = Overrides::from_config_text(&text)
                .map_err(|e| AppError::Usage(format!("{}: {e}", path.display())))?;
            file.apply(&mut cfg);
        }
        flags.apply(&mut cfg);
        cfg.pipeline().validate().map_err(|e| AppError::Usage(e.to_string()))?;
        Ok(cfg)
    }

    pub fn pipeline(&self) -> PipelineConfig {
        PipelineConfig {
            k_bins: self.bins,
            fit: FitOptions {
                degree: self.degree,
                samples: self.samples,
            },
            omega: match self.omega {
                Some(w) => OmegaMode::Fixed(w),
                None => OmegaMode::Auto(self.grid),
            },
            zero_policy: self.zero_policy,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_then_flags() {
        let file = Overrides::from_config_text("# run\nbins = 200\nomega=0.608\nzero-policy = exclude\n\n").unwrap();
        let flags = Overrides {
            bins: Some(100),
            ..Default::default()
        };
        let mut cfg = RunConfig::default();
        file.apply(&mut cfg);
        flags.apply(&mut cfg);
        assert_eq!(cfg.bins, 100);
        assert_eq!(cfg.omega, Some(0.608));
        assert_eq!(cfg.zero_policy, ZeroPolicy::Exclude);
        assert_eq!(cfg.degree, 5);
    }

    #[test]
    fn bad_config_lines() {
        assert!(Overrides::from_config_text("bins 3").is_err());
        assert!(Overrides::from_config_text("colour = red").is_err());
        assert!(Overrides::from_config_text("bins = many").is_err());
        assert_eq!(Overrides::from_config_text("omega = auto").unwrap().omega, Some(OmegaArg::Auto));
    }

    #[test]
    fn defaults_mirror_pipeline_defaults() {
        let p = RunConfig::default().pipeline();
        assert_eq!(p, PipelineConfig::default());
    }
}
