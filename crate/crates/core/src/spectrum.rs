//! Quasi-particle frequencies: the secular equation, its perturbative and
//! resonant expansions, the resonant field values, and the quasi-electron /
//! quasi-photon energies.
//!
//! The five mode frequencies are the positive roots of
//!
//! ```text
//!   ε/(τ² − κ₁²) + ε/(τ² − κ₂²) = 1 + (−1)^λ ω/τ
//! ```
//!
//! with ε → 0 limits τ₀ → ω, τ_{s,λ} → κ_s. For each branch λ the residual
//! diverges at the poles κ₁, κ₂ and changes sign exactly once inside each of
//! the pole-separated intervals, so every root is found by bracketed
//! iteration inside its own interval and then polished in the offset
//! variable δ = τ − κ_nearest, which keeps the offset accurate to its own
//! relative precision rather than to the absolute precision of τ. That
//! offset is what the canonical transformation divides by, so it is carried
//! in [`Root`] alongside the frequency itself.

use crate::bogoliubov::ModeIndex;
use crate::params::ModelParams;
use crate::solve::{brent, SolveError};
use thiserror::Error;

/// Relative guard band around a pole inside which residual evaluation is
/// refused (callers shrink their brackets instead).
pub const POLE_GUARD_REL: f64 = 1e-13;

/// Relative distance of ω₀ from a photon wavenumber below which the
/// perturbative formulas are singular and refused.
pub const RESONANCE_GUARD_REL: f64 = 1e-10;

/// Two roots closer than this (relative) raise the root-collision flag.
pub const COLLISION_REL: f64 = 1e-13;

const MAX_ITER: usize = 200;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum SpectrumError {
    #[error("tau = {tau} is within the guard band of the pole at kappa = {kappa}")]
    PoleProximity { tau: f64, kappa: f64 },
    #[error("polarization index must be 1 or 2, got {0}")]
    BadPolarization(usize),
    #[error("secular equation needs omega > 0 (field-free parameters)")]
    FieldFree,
    #[error("bracketing failed: {0}")]
    Bracket(#[from] SolveError),
    #[error("could not establish a sign change near the pole at {kappa}")]
    NoSignChange { kappa: f64 },
    #[error("root at tau = {tau} has residual {residual:e}, above 1e-10")]
    ResidualTooLarge { tau: f64, residual: f64 },
    #[error("omega0 = {omega0} is resonance-singular against kappa = {kappa}")]
    ResonanceSingular { omega0: f64, kappa: f64 },
    #[error("expansion requested at eB = {e_b}, but omega0 = {omega0} is not at the resonant value for kappa_{which}")]
    NotAtResonantField { e_b: f64, omega0: f64, which: usize },
    #[error("p3 must be 0 for resonant-field location, got {0}")]
    P3NotZero(f64),
    #[error("numeric resonant field {numeric} disagrees with closed form {closed} beyond 1e-10")]
    ClosedFormMismatch { numeric: f64, closed: f64 },
}

/// How a [`RootSet`] was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMethod {
    ExactNumeric,
    Perturbative,
}

/// One secular root, carrying its offsets from both photon poles.
///
/// `d_kappa[i]` is τ − κ_{i+1}; the entry for the nearest pole is accurate to
/// the relative precision of the offset itself.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub tau: f64,
    pub d_kappa: [f64; 2],
}

impl Root {
    fn from_tau(tau: f64, p: &ModelParams) -> Root {
        Root { tau, d_kappa: [tau - p.kappa1, tau - p.kappa2] }
    }

    /// τ² − κ_s² (s is 1-based), built from the stored offset so it stays
    /// accurate when τ sits next to the pole.
    pub fn tau2_minus_kappa2(&self, s: usize, p: &ModelParams) -> f64 {
        let k = p.kappas()[s - 1];
        self.d_kappa[s - 1] * (self.tau + k)
    }
}

/// The five positive secular roots.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootSet {
    pub tau0: Root,
    photon: [[Root; 2]; 2],
    pub method: SolveMethod,
    /// Set when two roots fall within [`COLLISION_REL`] of each other
    /// (exact resonance); never silently merged.
    pub collision: bool,
}

impl RootSet {
    /// Root for photon mode `s` ∈ {1,2}, polarization `lambda` ∈ {1,2}.
    pub fn photon_root(&self, s: usize, lambda: usize) -> &Root {
        &self.photon[s - 1][lambda - 1]
    }

    /// Root for any mode in the five-mode set.
    pub fn root(&self, m: ModeIndex) -> &Root {
        if m.s == 0 {
            &self.tau0
        } else {
            self.photon_root(m.s, m.lambda)
        }
    }

    /// The five frequencies in canonical mode order
    /// [(0,1), (1,1), (1,2), (2,1), (2,2)].
    pub fn taus_canonical(&self) -> [f64; 5] {
        let mut out = [0.0; 5];
        for (i, m) in ModeIndex::ALL.iter().enumerate() {
            out[i] = self.root(*m).tau;
        }
        out
    }

    fn flag_collisions(&mut self) {
        // only same-branch roots can collide; the λ=1 set {τ₀, τ₁,₁, τ₂,₁}
        // degenerates at exact resonance (the ε=0 coincidence of the two
        // polarizations of one photon mode is a benign cross-branch fact)
        let set = [self.tau0.tau, self.photon[0][0].tau, self.photon[1][0].tau];
        for i in 0..3 {
            for j in (i + 1)..3 {
                let scale = set[i].abs().max(set[j].abs()).max(f64::MIN_POSITIVE);
                if (set[i] - set[j]).abs() < COLLISION_REL * scale {
                    self.collision = true;
                }
            }
        }
    }
}

fn branch_sign(lambda: usize) -> Result<f64, SpectrumError> {
    match lambda {
        1 => Ok(-1.0),
        2 => Ok(1.0),
        other => Err(SpectrumError::BadPolarization(other)),
    }
}

/// Signed residual of the secular equation at `tau` on branch `lambda`:
/// Σ_s ε/(τ² − κ_s²) − 1 − (−1)^λ ω/τ. Exactly zero characterizes a root.
pub fn characteristic_residual(
    tau: f64,
    lambda: usize,
    p: &ModelParams,
) -> Result<f64, SpectrumError> {
    let sl = branch_sign(lambda)?;
    if p.epsilon > 0.0 {
        for k in p.kappas() {
            if (tau - k).abs() < POLE_GUARD_REL * k {
                return Err(SpectrumError::PoleProximity { tau, kappa: k });
            }
        }
    }
    Ok(residual_tau(tau, sl, p))
}

fn residual_tau(tau: f64, sl: f64, p: &ModelParams) -> f64 {
    let mut sum = 0.0;
    if p.epsilon > 0.0 {
        for k in p.kappas() {
            sum += p.epsilon / ((tau - k) * (tau + k));
        }
    }
    sum - 1.0 - sl * p.omega / tau
}

/// Residual in the offset variable δ = τ − κ_anchor (anchor is 1-based).
fn residual_delta(delta: f64, anchor: usize, sl: f64, p: &ModelParams) -> f64 {
    let k = p.kappas()[anchor - 1];
    let k_other = p.kappas()[2 - anchor];
    let tau = k + delta;
    let pole = p.epsilon / (delta * (tau + k));
    let cross = p.epsilon / (((k - k_other) + delta) * (tau + k_other));
    pole + cross - 1.0 - sl * p.omega / tau
}

fn residual_delta_deriv(delta: f64, anchor: usize, sl: f64, p: &ModelParams) -> f64 {
    let k = p.kappas()[anchor - 1];
    let k_other = p.kappas()[2 - anchor];
    let tau = k + delta;
    let d_pole = -p.epsilon * (2.0 * tau) / (delta * (tau + k)).powi(2);
    let cross_den = ((k - k_other) + delta) * (tau + k_other);
    let d_cross = -p.epsilon * (2.0 * tau) / (cross_den * cross_den);
    d_pole + d_cross + sl * p.omega / (tau * tau)
}

/// Polish a root against its nearest pole in δ-space; returns the refined
/// offset. Falls back to the unrefined offset if Newton stalls.
fn refine_delta(delta0: f64, anchor: usize, sl: f64, p: &ModelParams) -> f64 {
    let mut d = delta0;
    for _ in 0..6 {
        let g = residual_delta(d, anchor, sl, p);
        let gp = residual_delta_deriv(d, anchor, sl, p);
        if gp == 0.0 || !g.is_finite() {
            break;
        }
        let step = g / gp;
        let next = d - step;
        // keep the sign and stay within a factor-8 trust region
        if next.signum() != d.signum() || !(next.abs() > d.abs() / 8.0 && next.abs() < d.abs() * 8.0)
        {
            break;
        }
        d = next;
        if step.abs() <= 2.0 * f64::EPSILON * d.abs() {
            break;
        }
    }
    d
}

struct IntervalSpec {
    lo: f64,
    hi: f64,
    pole_lo: Option<usize>,
    pole_hi: Option<usize>,
}

fn find_in_interval(spec: &IntervalSpec, sl: f64, p: &ModelParams) -> Result<Root, SpectrumError> {
    let span = if spec.hi.is_finite() {
        spec.hi - spec.lo
    } else {
        (p.kappa2 + p.omega).max(spec.lo)
    };

    // Endpoint with the pole-dominated (or asymptotic) sign; shrink the gap
    // geometrically until the analytic sign shows up.
    let mut lo = match spec.pole_lo {
        Some(k_idx) => {
            let k = p.kappas()[k_idx - 1];
            let mut g = span * 1e-3;
            loop {
                let t = k + g;
                if residual_tau(t, sl, p) > 0.0 {
                    break t;
                }
                g *= 1e-3;
                if g < k * 1e-18 {
                    return Err(SpectrumError::NoSignChange { kappa: k });
                }
            }
        }
        None => {
            // λ = 1 interval (0, κ₁): +ω/τ dominates as τ → 0⁺.
            let mut t = spec.hi * 0.5;
            while residual_tau(t, sl, p) <= 0.0 {
                t *= 0.25;
                if t < 1e-280 {
                    return Err(SpectrumError::NoSignChange { kappa: 0.0 });
                }
            }
            t
        }
    };
    let mut hi = match spec.pole_hi {
        Some(k_idx) => {
            let k = p.kappas()[k_idx - 1];
            let mut g = span * 1e-3;
            loop {
                let t = k - g;
                if residual_tau(t, sl, p) < 0.0 {
                    break t;
                }
                g *= 1e-3;
                if g < k * 1e-18 {
                    return Err(SpectrumError::NoSignChange { kappa: k });
                }
            }
        }
        None => {
            // open interval (κ₂, ∞): residual → −1 at large τ
            let mut t = spec.lo.max(p.omega) * 2.0 + p.kappa2;
            while residual_tau(t, sl, p) >= 0.0 {
                t *= 2.0;
                if !t.is_finite() {
                    return Err(SpectrumError::NoSignChange { kappa: f64::INFINITY });
                }
            }
            t
        }
    };
    if lo > hi {
        std::mem::swap(&mut lo, &mut hi);
    }
    let tau = brent(|t| residual_tau(t, sl, p), lo, hi, 1e-15, MAX_ITER)?;

    // Polish the offset against the nearest pole when the root actually sits
    // near one; otherwise plain subtraction is already accurate.
    let d1 = tau - p.kappa1;
    let d2 = tau - p.kappa2;
    let (anchor, d_near) = if d1.abs() <= d2.abs() { (1, d1) } else { (2, d2) };
    let mut root = if d_near.abs() < 0.3 * span && d_near != 0.0 && p.epsilon > 0.0 {
        let d = refine_delta(d_near, anchor, sl, p);
        let k = p.kappas()[anchor - 1];
        let k_other = p.kappas()[2 - anchor];
        let mut dk = [0.0; 2];
        dk[anchor - 1] = d;
        dk[2 - anchor] = d + (k - k_other);
        Root { tau: k + d, d_kappa: dk }
    } else {
        Root::from_tau(tau, p)
    };

    // final residual audit in the stable variable
    let res = if root.d_kappa[anchor - 1].abs() < 0.3 * span && p.epsilon > 0.0 {
        residual_delta(root.d_kappa[anchor - 1], anchor, sl, p)
    } else {
        residual_tau(root.tau, sl, p)
    };
    if !(res.abs() < 1e-10) {
        return Err(SpectrumError::ResidualTooLarge { tau: root.tau, residual: res });
    }
    // keep tau bit-consistent with the anchored offset
    root.tau = p.kappas()[anchor - 1] + root.d_kappa[anchor - 1];
    Ok(root)
}

/// Solve the secular equation for all five positive roots.
///
/// Each root is continuously connected to its ε = 0 limit; near an exact
/// resonance (ω on a photon wavenumber) the colliding pair keeps the
/// convention that the photon label takes the lower branch.
pub fn solve_roots(p: &ModelParams) -> Result<RootSet, SpectrumError> {
    if !(p.omega > 0.0) {
        return Err(SpectrumError::FieldFree);
    }
    if p.epsilon == 0.0 {
        let mk = |tau: f64| Root::from_tau(tau, p);
        let mut set = RootSet {
            tau0: mk(p.omega),
            photon: [
                [Root { tau: p.kappa1, d_kappa: [0.0, p.kappa1 - p.kappa2] }; 2],
                [Root { tau: p.kappa2, d_kappa: [p.kappa2 - p.kappa1, 0.0] }; 2],
            ],
            method: SolveMethod::ExactNumeric,
            collision: false,
        };
        set.flag_collisions();
        return Ok(set);
    }

    let (k1, k2) = (p.kappa1, p.kappa2);
    let low = IntervalSpec { lo: 0.0, hi: k1, pole_lo: None, pole_hi: Some(1) };
    let mid = IntervalSpec { lo: k1, hi: k2, pole_lo: Some(1), pole_hi: Some(2) };
    let high = IntervalSpec { lo: k2, hi: f64::INFINITY, pole_lo: Some(2), pole_hi: None };

    let sl1 = -1.0;
    let r_low = find_in_interval(&low, sl1, p)?;
    let r_mid = find_in_interval(&mid, sl1, p)?;
    let r_high = find_in_interval(&high, sl1, p)?;

    let sl2 = 1.0;
    let t12 = find_in_interval(&mid, sl2, p)?;
    let t22 = find_in_interval(&high, sl2, p)?;

    // Label the λ = 1 roots by where ω sits relative to the poles.
    let (tau0, t11, t21) = if p.omega < k1 {
        (r_low, r_mid, r_high)
    } else if p.omega < k2 {
        (r_mid, r_low, r_high)
    } else {
        (r_high, r_low, r_mid)
    };

    let mut set = RootSet {
        tau0,
        photon: [[t11, t12], [t21, t22]],
        method: SolveMethod::ExactNumeric,
        collision: false,
    };
    set.flag_collisions();
    Ok(set)
}

fn check_off_resonance(p: &ModelParams) -> Result<(), SpectrumError> {
    for k in p.kappas() {
        if (p.omega0 - k).abs() < RESONANCE_GUARD_REL * k {
            return Err(SpectrumError::ResonanceSingular { omega0: p.omega0, kappa: k });
        }
    }
    Ok(())
}

/// First-order roots: τ_{k,λ} = κ_k + ε/[2(κ_k + (−1)^λ ω₀)] and
/// τ₀ = ω₀{1 − ε(ω₀N₀/p̄₀ − 1) Σ_s (ω₀² − κ_s²)⁻¹}.
///
/// In the density-coupling variable ε̃ = ε(p̄₀+p₃) these are the familiar
/// small-coupling expansions τ = κ + ω₀ε̃/[2eB(κ + (−1)^λω₀)]; the stored
/// eV² coupling absorbs ω₀/eB.
pub fn perturbative_roots(p: &ModelParams) -> Result<RootSet, SpectrumError> {
    if !(p.omega0 > 0.0) {
        return Err(SpectrumError::FieldFree);
    }
    check_off_resonance(p)?;
    let mut photon = [[Root { tau: 0.0, d_kappa: [0.0; 2] }; 2]; 2];
    for s in 1..=2usize {
        let k = p.kappas()[s - 1];
        for lambda in 1..=2usize {
            let sl = if lambda == 1 { -1.0 } else { 1.0 };
            let delta = p.epsilon / (2.0 * (k + sl * p.omega0));
            let tau = k + delta;
            let mut dk = [0.0; 2];
            dk[s - 1] = delta;
            dk[2 - s] = delta + (k - p.kappas()[2 - s]);
            photon[s - 1][lambda - 1] = Root { tau, d_kappa: dk };
        }
    }
    let sum: f64 = p
        .kappas()
        .iter()
        .map(|k| 1.0 / ((p.omega0 - k) * (p.omega0 + k)))
        .sum();
    let n0 = p.landau_level as f64;
    let tau0 =
        p.omega0 * (1.0 - p.epsilon * (p.omega0 * n0 / p.pbar0 - 1.0) * sum);
    Ok(RootSet {
        tau0: Root::from_tau(tau0, p),
        photon,
        method: SolveMethod::Perturbative,
        collision: false,
    })
}

/// Which resonant field an expansion refers to: eB_j makes ω₀ = κ_j.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResonantBranch {
    B1,
    B2,
}

impl ResonantBranch {
    pub fn index(self) -> usize {
        match self {
            ResonantBranch::B1 => 1,
            ResonantBranch::B2 => 2,
        }
    }
}

/// Leading behaviour of the two interesting roots at a resonant field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResonantExpansion {
    /// Mode whose root keeps the regular linear-in-ε shift.
    pub regular_mode: ModeIndex,
    pub regular_tau: f64,
    /// Mode whose root picks up the √ε deviation at this resonance.
    pub resonant_mode: ModeIndex,
    pub resonant_tau: f64,
}

/// Root expansions at eB = eB_j (ω₀ = κ_j).
///
/// At eB_j the colliding pair sits at κ_j and splits by ±√(ε/2); the label
/// κ_j keeps the lower branch. The λ = 2 root of the *other* photon keeps
/// its regular shift ε/[2(κ₁+κ₂)]. In the density-coupling variable these
/// read κ_j′ + κ_jε̃/[2(κ₁+κ₂)eB_j] and κ_j − √(κ_jε̃/2eB_j).
pub fn resonant_root_expansion(
    p: &ModelParams,
    which: ResonantBranch,
) -> Result<ResonantExpansion, SpectrumError> {
    let j = which.index();
    let kj = p.kappas()[j - 1];
    if (p.omega0 - kj).abs() > 1e-6 * kj {
        return Err(SpectrumError::NotAtResonantField { e_b: p.e_b, omega0: p.omega0, which: j });
    }
    let other = 3 - j;
    let k_other = p.kappas()[other - 1];
    Ok(ResonantExpansion {
        regular_mode: ModeIndex::photon(other, 2),
        regular_tau: k_other + p.epsilon / (2.0 * (p.kappa1 + p.kappa2)),
        resonant_mode: ModeIndex::photon(j, 1),
        resonant_tau: kj - (p.epsilon / 2.0).sqrt(),
    })
}

/// Resonant field–charge products eB₁, eB₂ and the polarization pairs they
/// affect.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResonanceInfo {
    /// eB_s solving ω₀(eB) = κ_s, s = 1, 2 (eV²).
    pub e_b: [f64; 2],
    /// (λ₁, λ₂) pairing whose measure is singular at the matching field.
    pub resonant_polarization: [(usize, usize); 2],
}

/// Closed-form resonant field: eB_s = κ_s[√((N₀+½)²κ_s² + m²) + (N₀+½)κ_s].
pub fn resonant_field_closed_form(kappa: f64, mass: f64, landau_level: u32) -> f64 {
    let h = landau_level as f64 + 0.5;
    kappa * ((h * h * kappa * kappa + mass * mass).sqrt() + h * kappa)
}

/// Locate both resonant fields by a monotone bracketed solve of ω₀(eB) = κ_s,
/// cross-checked against the closed form to 1e-10.
pub fn resonant_fields(p: &ModelParams) -> Result<ResonanceInfo, SpectrumError> {
    if p.p3 != 0.0 {
        return Err(SpectrumError::P3NotZero(p.p3));
    }
    let h = p.landau_level as f64 + 0.5;
    let omega0_of = |eb: f64| eb / (2.0 * eb * h + p.mass * p.mass).sqrt();
    let mut e_b = [0.0; 2];
    for (i, k) in p.kappas().iter().enumerate() {
        let closed = resonant_field_closed_form(*k, p.mass, p.landau_level);
        let numeric = brent(
            |eb| omega0_of(eb) - k,
            closed * 0.5,
            closed * 2.0,
            1e-14,
            MAX_ITER,
        )?;
        if (numeric - closed).abs() > 1e-10 * closed {
            return Err(SpectrumError::ClosedFormMismatch { numeric, closed });
        }
        e_b[i] = numeric;
    }
    Ok(ResonanceInfo { e_b, resonant_polarization: [(1, 2), (2, 1)] })
}

/// Quasi-electron energy p₀.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuasiElectronEnergy {
    /// From p₀² = 2eB(τ₀N₀/ω + ½) + p₃² + m² at the solved τ₀.
    pub exact: f64,
    /// First-order form p̄₀ + eB N₀ ε Σ_s(ω₀² − κ_s²)⁻¹ / p̄₀.
    pub first_order: f64,
}

/// Quasi-electron spectrum from the solved roots, with its first-order form
/// for comparison.
pub fn quasi_electron_energy(p: &ModelParams, roots: &RootSet) -> QuasiElectronEnergy {
    let n0 = p.landau_level as f64;
    let exact = (2.0 * p.e_b * (roots.tau0.tau / p.omega * n0 + 0.5)
        + p.p3 * p.p3
        + p.mass * p.mass)
        .sqrt();
    let sum: f64 = p
        .kappas()
        .iter()
        .map(|k| 1.0 / ((p.omega0 - k) * (p.omega0 + k)))
        .sum();
    let first_order = p.pbar0 + p.e_b * n0 * p.epsilon * sum / p.pbar0;
    QuasiElectronEnergy { exact, first_order }
}

/// Occupation numbers N_{s,λ} of the four photonic quasi-modes,
/// indexed [s−1][λ−1].
pub type Occupations = [[u32; 2]; 2];

/// Quasi-photon energy
/// Σ τ_{s,λ}N_{s,λ} − Σ_j τ_j ‖v_j‖² + (ε/2)Σ_s κ_s⁻¹,
/// where the middle sum runs over all five columns of the transform's v.
pub fn quasi_photon_energy(
    p: &ModelParams,
    roots: &RootSet,
    transform: &crate::bogoliubov::CanonicalTransform,
    occupations: &Occupations,
) -> f64 {
    let mut e = 0.0;
    for s in 1..=2usize {
        for lambda in 1..=2usize {
            e += roots.photon_root(s, lambda).tau * occupations[s - 1][lambda - 1] as f64;
        }
    }
    e -= transform.v_energy_sum(&roots.taus_canonical());
    e += 0.5 * p.epsilon * (1.0 / p.kappa1 + 1.0 / p.kappa2);
    e
}
