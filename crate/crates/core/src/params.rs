//! Physical inputs and the derived model parameters shared by every module.
//!
//! [`PhysicalInput`] carries laboratory quantities (wavelengths in nm, density
//! in m⁻³, field in A/m, tesla or natural eV²). [`ModelParams`] carries the
//! natural-unit quantities the solver actually consumes: the two photon
//! wavenumbers κ₁ < κ₂, the field–charge product eB, the mass m, the coupling
//! ε (eV², sitting directly in the quadratic form and the secular equation),
//! the Landau level N₀ and longitudinal momentum p₃, plus the derived free
//! quasi-electron energy p̄₀ and the frequencies ω and ω₀.
//!
//! With the light-front normalization fixed at (ng) = p̄₀ + p₃, ω and ω₀ are
//! the same number; both fields are kept because downstream formulas quote
//! them in different roles (ω in the quadratic form, ω₀ in the perturbative
//! expansions).

use crate::units;
use thiserror::Error;

/// How a density in m⁻³ becomes the eV² coupling ε of the quadratic form.
///
/// The raw density coupling αρ(ħc)³ carries eV³, one power of energy too
/// many, so a documented choice is required:
///
/// * [`UnitConvention::Scaled`] — divide by κ₁: ε = αρ(ħc)³/κ₁. Closed under
///   the dimensionless rescaling, the default.
/// * [`UnitConvention::Fiat`] — keep the number and read it as eV² by fiat:
///   ε = αρ(ħc)³. Mirrors axis conventions seen in plotted data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum UnitConvention {
    #[default]
    Scaled,
    Fiat,
}

impl UnitConvention {
    pub fn parse(s: &str) -> Result<Self, ParamsError> {
        match s {
            "scaled" => Ok(UnitConvention::Scaled),
            "fiat" => Ok(UnitConvention::Fiat),
            other => Err(ParamsError::UnknownConvention(other.to_string())),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            UnitConvention::Scaled => "scaled",
            UnitConvention::Fiat => "fiat",
        }
    }
}

/// Magnetic field input with its unit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FieldStrength {
    /// H in A/m, read as B = μ₀H.
    AmperePerMeter(f64),
    /// B in tesla.
    Tesla(f64),
    /// eB directly in eV².
    NaturalEv2(f64),
}

impl FieldStrength {
    pub fn to_eb_ev2(self) -> f64 {
        match self {
            FieldStrength::AmperePerMeter(h) => units::ampere_per_meter_to_eb_ev2(h),
            FieldStrength::Tesla(b) => units::tesla_to_eb_ev2(b),
            FieldStrength::NaturalEv2(eb) => eb,
        }
    }

    pub fn value(self) -> f64 {
        match self {
            FieldStrength::AmperePerMeter(v)
            | FieldStrength::Tesla(v)
            | FieldStrength::NaturalEv2(v) => v,
        }
    }
}

/// Laboratory-unit description of a configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalInput {
    /// First photon wavelength (nm).
    pub wavelength_1_nm: f64,
    /// Second photon wavelength (nm); must differ from the first.
    pub wavelength_2_nm: f64,
    /// Electron medium density ρ (m⁻³).
    pub density_m3: f64,
    /// External magnetic field.
    pub field: FieldStrength,
    /// Landau level N₀ of the medium electrons.
    pub landau_level: u32,
    /// Longitudinal electron momentum p₃ (eV); 0 in the reference frame used
    /// throughout.
    pub p3_ev: f64,
    /// Density → ε conversion rule.
    pub convention: UnitConvention,
}

impl PhysicalInput {
    /// Input with the sweep-friendly defaults: N₀ = 0, p₃ = 0, scaled
    /// convention.
    pub fn new(wavelength_1_nm: f64, wavelength_2_nm: f64, density_m3: f64, field: FieldStrength) -> Self {
        PhysicalInput {
            wavelength_1_nm,
            wavelength_2_nm,
            density_m3,
            field,
            landau_level: 0,
            p3_ev: 0.0,
            convention: UnitConvention::default(),
        }
    }
}

/// Errors from parameter construction.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum ParamsError {
    #[error("photon wavelengths must differ (both are {0} nm)")]
    EqualWavelengths(f64),
    #[error("wavelengths must be positive, got {0} nm")]
    NonPositiveWavelength(f64),
    #[error("electron density must be positive, got {0} m^-3")]
    NonPositiveDensity(f64),
    #[error("field must be non-negative, got eB = {0} eV^2")]
    NegativeField(f64),
    #[error("mass must be positive, got {0} eV")]
    NonPositiveMass(f64),
    #[error("coupling must be non-negative, got {0} eV^2")]
    NegativeCoupling(f64),
    #[error("wavenumbers must be positive and distinct, got ({0}, {1}) eV")]
    BadWavenumbers(f64, f64),
    #[error("unknown unit convention `{0}` (expected `scaled` or `fiat`)")]
    UnknownConvention(String),
}

/// Natural-unit model parameters; immutable once built.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Lower photon wavenumber (eV).
    pub kappa1: f64,
    /// Upper photon wavenumber (eV), κ₂ > κ₁.
    pub kappa2: f64,
    /// Field–charge product eB (eV²).
    pub e_b: f64,
    /// Scalar-electron mass (eV).
    pub mass: f64,
    /// Coupling ε (eV²) as it enters the quadratic form and secular equation.
    pub epsilon: f64,
    /// Landau level N₀.
    pub landau_level: u32,
    /// Longitudinal momentum p₃ (eV).
    pub p3: f64,
    /// Free quasi-electron energy p̄₀ = √(2eB(N₀+½) + p₃² + m²) (eV).
    pub pbar0: f64,
    /// ω = eB/(ng) with (ng) = p̄₀ + p₃ (eV).
    pub omega: f64,
    /// ω₀ = eB/(p̄₀ + p₃) (eV); numerically equal to ω at this normalization.
    pub omega0: f64,
    /// Multiply internal energies by this factor to restore the units the
    /// parameters were built in; 1 unless rescaled.
    pub energy_scale: f64,
}

impl ModelParams {
    /// Build directly from natural-unit values. The wavenumbers are sorted
    /// ascending on entry.
    pub fn from_natural(
        kappa_a: f64,
        kappa_b: f64,
        e_b: f64,
        mass: f64,
        epsilon: f64,
        landau_level: u32,
        p3: f64,
    ) -> Result<Self, ParamsError> {
        let (kappa1, kappa2) = if kappa_a <= kappa_b { (kappa_a, kappa_b) } else { (kappa_b, kappa_a) };
        if !(kappa1 > 0.0) || !(kappa2 > kappa1) {
            return Err(ParamsError::BadWavenumbers(kappa1, kappa2));
        }
        if !(e_b >= 0.0) {
            return Err(ParamsError::NegativeField(e_b));
        }
        if !(mass > 0.0) {
            return Err(ParamsError::NonPositiveMass(mass));
        }
        if !(epsilon >= 0.0) {
            return Err(ParamsError::NegativeCoupling(epsilon));
        }
        let pbar0 =
            (2.0 * e_b * (landau_level as f64 + 0.5) + p3 * p3 + mass * mass).sqrt();
        let ng = pbar0 + p3;
        let omega = if e_b == 0.0 { 0.0 } else { e_b / ng };
        Ok(ModelParams {
            kappa1,
            kappa2,
            e_b,
            mass,
            epsilon,
            landau_level,
            p3,
            pbar0,
            omega,
            omega0: omega,
            energy_scale: 1.0,
        })
    }

    /// κ₂ − κ₁ (eV).
    pub fn delta_kappa(&self) -> f64 {
        self.kappa2 - self.kappa1
    }

    /// (ng) = p̄₀ + p₃ (eV); positive for every valid parameter set.
    pub fn ng(&self) -> f64 {
        self.pbar0 + self.p3
    }

    /// The photon wavenumbers as an array, index 0 ↦ κ₁.
    pub fn kappas(&self) -> [f64; 2] {
        [self.kappa1, self.kappa2]
    }

    /// Relative distance of ω₀ from the nearest photon wavenumber.
    pub fn resonance_distance(&self) -> f64 {
        let d1 = (self.omega0 - self.kappa1).abs() / self.kappa1;
        let d2 = (self.omega0 - self.kappa2).abs() / self.kappa2;
        d1.min(d2)
    }
}

/// Derive natural-unit model parameters from a laboratory-unit input.
pub fn build_params(input: &PhysicalInput) -> Result<ModelParams, ParamsError> {
    if !(input.wavelength_1_nm > 0.0) {
        return Err(ParamsError::NonPositiveWavelength(input.wavelength_1_nm));
    }
    if !(input.wavelength_2_nm > 0.0) {
        return Err(ParamsError::NonPositiveWavelength(input.wavelength_2_nm));
    }
    if input.wavelength_1_nm == input.wavelength_2_nm {
        return Err(ParamsError::EqualWavelengths(input.wavelength_1_nm));
    }
    if !(input.density_m3 > 0.0) {
        return Err(ParamsError::NonPositiveDensity(input.density_m3));
    }
    let ka = units::wavelength_nm_to_kappa_ev(input.wavelength_1_nm);
    let kb = units::wavelength_nm_to_kappa_ev(input.wavelength_2_nm);
    let kappa1 = ka.min(kb);
    let e_b = input.field.to_eb_ev2();
    if !(e_b >= 0.0) {
        return Err(ParamsError::NegativeField(e_b));
    }
    let raw = units::density_coupling_ev3(input.density_m3);
    let epsilon = match input.convention {
        UnitConvention::Scaled => raw / kappa1,
        UnitConvention::Fiat => raw,
    };
    ModelParams::from_natural(
        ka,
        kb,
        e_b,
        units::ELECTRON_MASS_EV,
        epsilon,
        input.landau_level,
        input.p3_ev,
    )
}

/// Rescale so that κ₁ = 1: energies divide by κ₁, energy² quantities by κ₁².
///
/// The secular roots scale linearly with κ₁ and the dimensionless outputs
/// (y, z, M) are invariant, so this is purely a conditioning step. The factor
/// needed to restore the original units accumulates in `energy_scale`.
pub fn dimensionless_rescale(p: &ModelParams) -> ModelParams {
    let s = p.kappa1;
    ModelParams {
        kappa1: 1.0,
        kappa2: p.kappa2 / s,
        e_b: p.e_b / (s * s),
        mass: p.mass / s,
        epsilon: p.epsilon / (s * s),
        landau_level: p.landau_level,
        p3: p.p3 / s,
        pbar0: p.pbar0 / s,
        omega: p.omega / s,
        omega0: p.omega0 / s,
        energy_scale: p.energy_scale * s,
    }
}
