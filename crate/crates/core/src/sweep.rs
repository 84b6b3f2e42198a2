//! Parameter sweeps over field, density or second wavelength, with CSV
//! emission, resonance-edge handling and jump location.
//!
//! Each grid point runs the full pipeline (roots → transform → amplitudes →
//! measure). Points whose ω₀ lands inside the resonance guard band are
//! evaluated at the band edge and flagged instead of failing; any other
//! per-point failure is recorded in its row without aborting the sweep.
//! Rows are assembled in grid order whether the evaluation ran serial or
//! parallel, so identical specs produce byte-identical CSV bodies.

use crate::bogoliubov::closed_form_transform;
use crate::entangle::{measure, two_photon_amplitudes};
use crate::params::{build_params, FieldStrength, ModelParams, PhysicalInput};
use crate::spectrum::{resonant_fields, solve_roots, RESONANCE_GUARD_REL};
use crate::units;
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum SweepError {
    #[error("sweep range must satisfy lo < hi, got [{0}, {1}]")]
    BadRange(f64, f64),
    #[error("log spacing needs a positive range, got [{0}, {1}]")]
    LogRangeNotPositive(f64, f64),
    #[error("sweep needs at least 2 points, got {0}")]
    TooFewPoints(usize),
    #[error("every grid point failed; first error: {0}")]
    AllPointsFailed(String),
}

/// Which input the sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    /// Magnetic field strength H in A/m.
    Field,
    /// Electron density in m⁻³.
    Density,
    /// Second photon wavelength in nm.
    Wavelength2,
}

impl SweepAxis {
    pub fn name(&self) -> &'static str {
        match self {
            SweepAxis::Field => "field_am",
            SweepAxis::Density => "density_m3",
            SweepAxis::Wavelength2 => "wavelength2_nm",
        }
    }

    pub fn parse(s: &str) -> Option<SweepAxis> {
        match s {
            "field" | "field_am" => Some(SweepAxis::Field),
            "density" | "density_m3" => Some(SweepAxis::Density),
            "wavelength2" | "wavelength2_nm" => Some(SweepAxis::Wavelength2),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    Log,
}

impl Spacing {
    pub fn parse(s: &str) -> Option<Spacing> {
        match s {
            "linear" => Some(Spacing::Linear),
            "log" => Some(Spacing::Log),
            _ => None,
        }
    }
}

/// Full description of a sweep.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
    pub spacing: Spacing,
    /// Template configuration; the axis field is overwritten per point.
    pub fixed: PhysicalInput,
    /// Polarization pair (λ₁, λ₂) of the measured photons.
    pub lambda: (usize, usize),
    /// Evaluate rows on a single thread (results are identical either way).
    pub serial: bool,
}

/// One evaluated grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub y: f64,
    pub one_minus_y: f64,
    pub m: f64,
    pub taus: [f64; 5],
    /// "" for clean points, "res-edge" for guard-band displacements,
    /// "error:..." for failed points (numeric fields are NaN there).
    pub flag: String,
}

/// Sweep output: ordered rows plus resonance metadata.
#[derive(Debug, Clone)]
pub struct SweepResult {
    pub spec_axis: SweepAxis,
    pub rows: Vec<SweepRow>,
    /// Resonant eB values (eV²) for the fixed configuration, when defined.
    pub resonant_eb: Option<[f64; 2]>,
    pub convention: &'static str,
    pub timestamp_unix: u64,
    pub code_version: &'static str,
}

fn grid(spec: &SweepSpec) -> Result<Vec<f64>, SweepError> {
    if !(spec.lo < spec.hi) {
        return Err(SweepError::BadRange(spec.lo, spec.hi));
    }
    if spec.points < 2 {
        return Err(SweepError::TooFewPoints(spec.points));
    }
    let n = spec.points;
    let pts = match spec.spacing {
        Spacing::Linear => (0..n)
            .map(|i| spec.lo + (spec.hi - spec.lo) * i as f64 / (n - 1) as f64)
            .collect(),
        Spacing::Log => {
            if !(spec.lo > 0.0) {
                return Err(SweepError::LogRangeNotPositive(spec.lo, spec.hi));
            }
            let (a, b) = (spec.lo.ln(), spec.hi.ln());
            (0..n)
                .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
                .collect()
        }
    };
    Ok(pts)
}

fn input_at(spec: &SweepSpec, value: f64) -> PhysicalInput {
    let mut input = spec.fixed.clone();
    match spec.axis {
        SweepAxis::Field => input.field = FieldStrength::AmperePerMeter(value),
        SweepAxis::Density => input.density_m3 = value,
        SweepAxis::Wavelength2 => input.wavelength_2_nm = value,
    }
    input
}

fn evaluate_point(p: &ModelParams, lambda: (usize, usize)) -> Result<SweepRow, String> {
    let roots = solve_roots(p).map_err(|e| e.to_string())?;
    let t = closed_form_transform(&roots, p).map_err(|e| e.to_string())?;
    let a = two_photon_amplitudes(&t, lambda.0, lambda.1).map_err(|e| e.to_string())?;
    let r = measure(&a).map_err(|e| e.to_string())?;
    Ok(SweepRow {
        value: f64::NAN,
        y: r.y,
        one_minus_y: r.one_minus_y,
        m: r.measure,
        taus: roots.taus_canonical(),
        flag: String::new(),
    })
}

fn evaluate_value(spec: &SweepSpec, value: f64) -> SweepRow {
    let fail = |msg: String| SweepRow {
        value,
        y: f64::NAN,
        one_minus_y: f64::NAN,
        m: f64::NAN,
        taus: [f64::NAN; 5],
        flag: format!("error:{msg}"),
    };
    let input = input_at(spec, value);
    let p = match build_params(&input) {
        Ok(p) => p,
        Err(e) => return fail(e.to_string()),
    };
    // guard band: displace ω₀ to the band edge and flag
    let mut flag = String::new();
    let p = if p.resonance_distance() < RESONANCE_GUARD_REL {
        let k_near = if (p.omega0 - p.kappa1).abs() / p.kappa1
            < (p.omega0 - p.kappa2).abs() / p.kappa2
        {
            p.kappa1
        } else {
            p.kappa2
        };
        let edge = k_near * (1.0 + RESONANCE_GUARD_REL);
        let eb_edge = crate::spectrum::resonant_field_closed_form(edge, p.mass, p.landau_level);
        flag = "res-edge".to_string();
        match ModelParams::from_natural(
            p.kappa1,
            p.kappa2,
            eb_edge,
            p.mass,
            p.epsilon,
            p.landau_level,
            p.p3,
        ) {
            Ok(q) => q,
            Err(e) => return fail(e.to_string()),
        }
    } else {
        p
    };
    match evaluate_point(&p, spec.lambda) {
        Ok(mut row) => {
            row.value = value;
            row.flag = flag;
            row
        }
        Err(msg) => fail(msg),
    }
}

/// Run the sweep. Per-point failures stay in their rows; only a sweep in
/// which every point failed is an error.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult, SweepError> {
    let values = grid(spec)?;
    let rows: Vec<SweepRow> = if spec.serial {
        values.iter().map(|v| evaluate_value(spec, *v)).collect()
    } else {
        values.par_iter().map(|v| evaluate_value(spec, *v)).collect()
    };
    if rows.iter().all(|r| r.flag.starts_with("error:")) {
        return Err(SweepError::AllPointsFailed(rows[0].flag.clone()));
    }
    let resonant_eb = build_params(&spec.fixed)
        .ok()
        .and_then(|p| resonant_fields(&p).ok())
        .map(|info| info.e_b);
    Ok(SweepResult {
        spec_axis: spec.axis,
        rows,
        resonant_eb,
        convention: spec.fixed.convention.name(),
        timestamp_unix: std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
        code_version: env!("CARGO_PKG_VERSION"),
    })
}

/// Locate the jump in M: the largest |ΔM| between adjacent clean rows,
/// refined by one bisection pass (three extra evaluations inside the
/// winning cell). Returns the refined axis value, or `None` when the
/// profile has no jump-like feature (flat or off-resonance windows).
pub fn locate_jump(spec: &SweepSpec, result: &SweepResult) -> Option<f64> {
    let rows: Vec<&SweepRow> =
        result.rows.iter().filter(|r| !r.flag.starts_with("error:")).collect();
    if rows.len() < 4 {
        return None;
    }
    let mut diffs: Vec<f64> = Vec::with_capacity(rows.len() - 1);
    for w in rows.windows(2) {
        diffs.push(w[1].m - w[0].m);
    }
    let mut best = 0usize;
    let mut best_mag = 0.0f64;
    for (i, d) in diffs.iter().enumerate() {
        if d.abs() > best_mag {
            best_mag = d.abs();
            best = i;
        }
    }
    if best_mag == 0.0 {
        return None;
    }
    // dominant step plus a second-difference sign change around it
    let mut sorted: Vec<f64> = diffs.iter().map(|d| d.abs()).collect();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = sorted[sorted.len() / 2];
    if best_mag < 8.0 * median.max(f64::MIN_POSITIVE) {
        return None;
    }
    let has_sign_change = diffs
        .windows(2)
        .map(|w| w[1] - w[0])
        .scan(None::<f64>, |prev, d2| {
            let flip = prev.map(|p| p.signum() != d2.signum() && d2 != 0.0 && p != 0.0);
            *prev = Some(d2);
            Some(flip.unwrap_or(false))
        })
        .any(|f| f);
    if !has_sign_change {
        return None;
    }

    // one bisection refinement pass inside the winning cell
    let (a, b) = (rows[best].value, rows[best + 1].value);
    let mut pts = vec![(a, rows[best].m)];
    for f in [0.25, 0.5, 0.75] {
        let q = a + (b - a) * f;
        let row = evaluate_value(spec, q);
        if !row.flag.starts_with("error:") {
            pts.push((q, row.m));
        }
    }
    pts.push((b, rows[best + 1].m));
    let mut refined = 0.5 * (a + b);
    let mut mag = 0.0;
    for w in pts.windows(2) {
        let d = (w[1].1 - w[0].1).abs();
        if d > mag {
            mag = d;
            refined = 0.5 * (w[0].0 + w[1].0);
        }
    }
    Some(refined)
}

/// Serialize a sweep to CSV. `#`-prefixed metadata lines carry the fixed
/// parameters, convention, timestamp and code version; the body uses
/// shortest round-trip decimals, UTF-8 and LF endings.
pub fn to_csv(spec: &SweepSpec, result: &SweepResult) -> String {
    let mut out = String::new();
    out.push_str(&format!("# code_version={}\n", result.code_version));
    out.push_str(&format!("# timestamp_unix={}\n", result.timestamp_unix));
    out.push_str(&format!("# convention={}\n", result.convention));
    out.push_str(&format!(
        "# fixed wavelength_1_nm={} wavelength_2_nm={} density_m3={} field={:?} landau_level={} p3={}\n",
        spec.fixed.wavelength_1_nm,
        spec.fixed.wavelength_2_nm,
        spec.fixed.density_m3,
        spec.fixed.field,
        spec.fixed.landau_level,
        spec.fixed.p3_ev,
    ));
    out.push_str(&format!("# lambda1={} lambda2={}\n", spec.lambda.0, spec.lambda.1));
    if let Some(eb) = result.resonant_eb {
        out.push_str(&format!(
            "# resonant_eb_ev2={},{} resonant_field_am={},{}\n",
            eb[0],
            eb[1],
            units::eb_ev2_to_ampere_per_meter(eb[0]),
            units::eb_ev2_to_ampere_per_meter(eb[1]),
        ));
    }
    out.push_str("axis,value,y,M,tau0,tau11,tau12,tau21,tau22,flag\n");
    for row in &result.rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            result.spec_axis.name(),
            row.value,
            row.y,
            row.m,
            row.taus[0],
            row.taus[1],
            row.taus[2],
            row.taus[3],
            row.taus[4],
            row.flag
        ));
    }
    out
}

/// CSV body only (metadata lines stripped); the byte-identical unit of
/// comparison for determinism checks.
pub fn csv_body(csv: &str) -> String {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| format!("{l}\n"))
        .collect()
}
