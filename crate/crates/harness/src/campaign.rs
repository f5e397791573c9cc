//! Monte-Carlo accuracy campaign.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use tiltalloc::aero::{FlightCondition, PlanarForce};
use tiltalloc::alloc::{AllocRequest, Allocator, BlendPolicy};

use crate::stats::Summary;
use crate::HarnessError;

pub const CSV_VERSION: &str = "# tiltalloc montecarlo v1";

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Range {
    pub min: f64,
    pub max: f64,
}

impl Range {
    pub const fn new(min: f64, max: f64) -> Self {
        Range { min, max }
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> f64 {
        if self.max > self.min {
            rng.gen_range(self.min..=self.max)
        } else {
            self.min
        }
    }

    fn validate(&self, what: &str) -> Result<(), HarnessError> {
        if self.min.is_finite() && self.max.is_finite() && self.min <= self.max {
            Ok(())
        } else {
            Err(HarnessError::Invalid(format!(
                "{what}: empty or non-finite range [{}, {}]",
                self.min, self.max
            )))
        }
    }
}

/// Sampling ranges of a campaign. The angle of attack is given either in
/// radians (`alpha_inf`) or degrees (`alpha_inf_deg`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignSpec {
    pub n_samples: usize,
    pub v_inf: Range,
    pub rho: Range,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_inf: Option<Range>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_inf_deg: Option<Range>,
    #[serde(rename = "F_x")]
    pub f_x: Range,
    #[serde(rename = "F_z")]
    pub f_z: Range,
    #[serde(default)]
    pub seed: u64,
}

impl CampaignSpec {
    /// The envelope of the published validation campaign at desk scale.
    pub fn reference_envelope(n_samples: usize, seed: u64) -> Self {
        CampaignSpec {
            n_samples,
            v_inf: Range::new(15.0, 20.0),
            rho: Range::new(0.5, 1.225),
            alpha_inf: None,
            alpha_inf_deg: Some(Range::new(5.0, 10.0)),
            f_x: Range::new(40.0, 80.0),
            f_z: Range::new(70.0, 140.0),
            seed,
        }
    }

    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        let spec: CampaignSpec = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    /// Angle of attack range in radians.
    pub fn alpha_range(&self) -> Result<Range, HarnessError> {
        match (self.alpha_inf, self.alpha_inf_deg) {
            (Some(r), None) => Ok(r),
            (None, Some(d)) => Ok(Range::new(d.min.to_radians(), d.max.to_radians())),
            _ => Err(HarnessError::Invalid(
                "give exactly one of alpha_inf and alpha_inf_deg".into(),
            )),
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.n_samples == 0 {
            return Err(HarnessError::Invalid("n_samples must be at least 1".into()));
        }
        self.v_inf.validate("v_inf")?;
        self.rho.validate("rho")?;
        self.alpha_range()?.validate("alpha_inf")?;
        self.f_x.validate("F_x")?;
        self.f_z.validate("F_z")
    }

    /// Request `index`, drawn from its own stream seeded with `seed + index`.
    pub fn request(&self, index: usize) -> Result<AllocRequest, HarnessError> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed.wrapping_add(index as u64));
        let v = self.v_inf.sample(&mut rng);
        let rho = self.rho.sample(&mut rng);
        let alpha = self.alpha_range()?.sample(&mut rng);
        let fx = self.f_x.sample(&mut rng);
        let fz = self.f_z.sample(&mut rng);
        Ok(AllocRequest::new(
            FlightCondition::new(v, rho, alpha)?,
            PlanarForce::new(fx, fz),
        ))
    }
}

/// Which allocation entry point a campaign exercises.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    #[default]
    Blend,
    Coupled,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampleRow {
    pub index: usize,
    pub v_inf: f64,
    pub rho: f64,
    pub alpha_inf: f64,
    #[serde(rename = "F_x")]
    pub f_x: f64,
    #[serde(rename = "F_z")]
    pub f_z: f64,
    #[serde(rename = "T")]
    pub thrust: Option<f64>,
    pub delta: Option<f64>,
    pub residual_design: Option<f64>,
    pub residual_full: Option<f64>,
    pub branch: Option<String>,
    pub path: Option<String>,
    pub n_candidates: Option<usize>,
    pub error: Option<String>,
    pub latency: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CampaignSummary {
    pub n_samples: usize,
    pub failures: usize,
    pub residual_full: Summary,
    pub residual_design: Summary,
    pub latency: Summary,
    pub warm_samples: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CampaignReport {
    pub spec: CampaignSpec,
    pub mode: Mode,
    pub summary: CampaignSummary,
    #[serde(skip)]
    pub rows: Vec<SampleRow>,
}

fn run_one(spec: &CampaignSpec, alloc: &Allocator, mode: Mode, index: usize) -> SampleRow {
    let req = match spec.request(index) {
        Ok(r) => r,
        Err(e) => {
            return SampleRow {
                index,
                v_inf: f64::NAN,
                rho: f64::NAN,
                alpha_inf: f64::NAN,
                f_x: f64::NAN,
                f_z: f64::NAN,
                thrust: None,
                delta: None,
                residual_design: None,
                residual_full: None,
                branch: None,
                path: None,
                n_candidates: None,
                error: Some(e.to_string()),
                latency: None,
            }
        }
    };
    let result = match mode {
        Mode::Blend => alloc.allocate(&req, &BlendPolicy::default()),
        Mode::Coupled => alloc.allocate_coupled(&req),
    };
    let mut row = SampleRow {
        index,
        v_inf: req.cond.v_inf,
        rho: req.cond.rho,
        alpha_inf: req.cond.alpha_inf,
        f_x: req.force.fx,
        f_z: req.force.fz,
        thrust: None,
        delta: None,
        residual_design: None,
        residual_full: None,
        branch: None,
        path: None,
        n_candidates: None,
        error: None,
        latency: None,
    };
    match result {
        Ok(r) => {
            row.thrust = Some(r.command.thrust);
            row.delta = Some(r.command.delta);
            row.residual_design = r.residual_design;
            row.residual_full = Some(r.residual_full);
            row.branch = Some(r.branch.as_str().into());
            row.path = Some(r.path.as_str().into());
            row.n_candidates = Some(r.n_candidates);
            row.latency = Some(r.latency);
        }
        Err(e) => row.error = Some(e.to_string()),
    }
    row
}

/// Allocates every sample of `spec` on the rayon pool. Rows come back in
/// sample order; a failed sample is recorded in its row.
pub fn run_montecarlo(
    spec: &CampaignSpec,
    alloc: &Allocator,
    mode: Mode,
) -> Result<CampaignReport, HarnessError> {
    spec.validate()?;
    let rows: Vec<SampleRow> = (0..spec.n_samples)
        .into_par_iter()
        .map(|i| run_one(spec, alloc, mode, i))
        .collect();
    let summary = summarize(&rows);
    Ok(CampaignReport {
        spec: spec.clone(),
        mode,
        summary,
        rows,
    })
}

pub fn summarize(rows: &[SampleRow]) -> CampaignSummary {
    let ok = || rows.iter().filter(|r| r.error.is_none());
    CampaignSummary {
        n_samples: rows.len(),
        failures: rows.iter().filter(|r| r.error.is_some()).count(),
        residual_full: Summary::of(ok().filter_map(|r| r.residual_full)),
        residual_design: Summary::of(ok().filter_map(|r| r.residual_design)),
        latency: Summary::of(ok().filter_map(|r| r.latency)),
        warm_samples: rows
            .iter()
            .filter(|r| r.path.as_deref() == Some("warm"))
            .count(),
    }
}

/// Writes the versioned CSV: a comment line, the header, one row per sample.
pub fn write_csv<W: Write>(rows: &[SampleRow], mut out: W) -> Result<(), HarnessError> {
    writeln!(out, "{CSV_VERSION}")?;
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use tiltalloc::aero::AircraftConfig;

    #[test]
    fn spec_parsing() {
        let text = r#"{"n_samples": 3, "v_inf": {"min": 15, "max": 20}, "rho": {"min": 0.5, "max": 1.225},
            "alpha_inf_deg": {"min": 5, "max": 10}, "F_x": {"min": 40, "max": 80}, "F_z": {"min": 70, "max": 140}, "seed": 9}"#;
        let spec = CampaignSpec::from_json(text).unwrap();
        assert_eq!(spec, CampaignSpec::reference_envelope(3, 9));
        let r = spec.alpha_range().unwrap();
        assert!((r.max - 10f64.to_radians()).abs() < 1e-15);
        assert!(CampaignSpec::from_json(&text.replace("\"seed\"", "\"bogus\"")).is_err());
        let mut bad = spec.clone();
        bad.alpha_inf = Some(Range::new(0.0, 0.1));
        assert!(bad.validate().is_err());
        bad = spec.clone();
        bad.n_samples = 0;
        assert!(bad.validate().is_err());
    }

    #[test]
    fn single_sample_campaign() {
        let spec = CampaignSpec::reference_envelope(1, 4);
        let alloc = Allocator::new(AircraftConfig::reference());
        let report = run_montecarlo(&spec, &alloc, Mode::Blend).unwrap();
        assert_eq!(report.rows.len(), 1);
        assert_eq!(report.summary.failures, 0);
        let mut buf = Vec::new();
        write_csv(&report.rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with(CSV_VERSION));
        assert_eq!(text.lines().count(), 3);
    }
}
