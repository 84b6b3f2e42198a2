//! Physical constants and unit conversions.
//!
//! Internal unit system: natural units ħ = c = 1 with all energies in eV.
//! Energy-squared quantities (the field–charge product eB and the coupling ε)
//! are in eV². External inputs arrive in laboratory units (nm, m⁻³, A/m or
//! tesla) and are converted on construction.

/// ħc in eV·nm; the anchor constant for wavelength ↔ energy conversion.
pub const HBAR_C_EV_NM: f64 = 197.326_980_4;

/// Reduced Planck constant (J·s), CODATA 2018.
pub const HBAR_JS: f64 = 1.054_571_817e-34;

/// Speed of light (m/s), exact.
pub const SPEED_OF_LIGHT_M_S: f64 = 299_792_458.0;

/// Elementary charge (C), exact.
pub const ELEMENTARY_CHARGE_C: f64 = 1.602_176_634e-19;

/// Vacuum permeability μ₀ (N/A²), CODATA 2018.
pub const MU_0: f64 = 1.256_637_062_12e-6;

/// Fine-structure constant α, CODATA 2018.
pub const FINE_STRUCTURE: f64 = 7.297_352_569_3e-3;

/// Electron rest energy m c² (eV), CODATA 2018.
pub const ELECTRON_MASS_EV: f64 = 510_998.950_00;

/// Field–charge product eB in eV² for a 1 T field: ħc²/e · B.
pub const EB_EV2_PER_TESLA: f64 =
    HBAR_JS * SPEED_OF_LIGHT_M_S * SPEED_OF_LIGHT_M_S / ELEMENTARY_CHARGE_C;

/// Photon wavenumber κ = 2π/λ in eV for a wavelength in nm.
pub fn wavelength_nm_to_kappa_ev(lambda_nm: f64) -> f64 {
    2.0 * std::f64::consts::PI * HBAR_C_EV_NM / lambda_nm
}

/// Inverse of [`wavelength_nm_to_kappa_ev`].
pub fn kappa_ev_to_wavelength_nm(kappa_ev: f64) -> f64 {
    2.0 * std::f64::consts::PI * HBAR_C_EV_NM / kappa_ev
}

/// eB (eV²) for a magnetic flux density B in tesla.
pub fn tesla_to_eb_ev2(b_tesla: f64) -> f64 {
    b_tesla * EB_EV2_PER_TESLA
}

/// Flux density in tesla for an eB value in eV².
pub fn eb_ev2_to_tesla(eb_ev2: f64) -> f64 {
    eb_ev2 / EB_EV2_PER_TESLA
}

/// eB (eV²) for a magnetic field strength H in A/m, reading H as B = μ₀H.
///
/// This is the documented best-effort chain for inputs quoted in A/m; the
/// number it produces is a plain vacuum conversion and makes no attempt to
/// match any particular published axis scale.
pub fn ampere_per_meter_to_eb_ev2(h_am: f64) -> f64 {
    tesla_to_eb_ev2(MU_0 * h_am)
}

/// Field strength in A/m for an eB value in eV² (inverse of the μ₀ chain).
pub fn eb_ev2_to_ampere_per_meter(eb_ev2: f64) -> f64 {
    eb_ev2_to_tesla(eb_ev2) / MU_0
}

/// αρ(ħc)³ in eV³ for an electron density in m⁻³.
///
/// This is the raw density coupling before the convention-dependent step that
/// turns it into the eV² coupling of the quadratic form.
pub fn density_coupling_ev3(density_m3: f64) -> f64 {
    let hbar_c_ev_m = HBAR_C_EV_NM * 1e-9;
    FINE_STRUCTURE * density_m3 * hbar_c_ev_m * hbar_c_ev_m * hbar_c_ev_m
}
