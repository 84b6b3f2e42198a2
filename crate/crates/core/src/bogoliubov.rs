//! The quadratic Hamiltonian, the canonical (Bogoliubov) transformation that
//! diagonalizes it, and an independent dynamical-matrix oracle.
//!
//! The five coupled modes (one electron oscillator, four photon
//! polarization modes) enter a quadratic form
//!
//! ```text
//!   H = Σ A_{ab} a†_a a_b + ½ Σ (B_{ab} a†_a a†_b + B*_{ab} a_a a_b) + const,
//! ```
//!
//! with A Hermitian and B symmetric. A canonical transformation
//! c_j = Σ_a (ū_{a,j} a_a + v_{a,j} a†_a) diagonalizes it when the columns
//! satisfy (A − τ_j)u_j = B v̄_j and (A + τ_j)v_j = B ū_j together with the
//! symplectic constraints uu† − vv† = 1 and vuᵀ = uvᵀ.
//!
//! Two independent routes produce the transform:
//! * [`closed_form_transform`] evaluates the explicit solution of the linear
//!   system at the secular roots,
//! * [`oracle_diagonalize`] never touches the secular equation: it builds
//!   the 10×10 dynamical matrix [[A, B], [−B*, −A*]] and extracts its
//!   positive-frequency eigenvectors through a Cholesky-split Hermitian
//!   eigenproblem.

use crate::params::ModelParams;
use crate::spectrum::{RootSet, SolveMethod};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use thiserror::Error;

pub type CMat = DMatrix<C64>;

/// Mode label (s, λ): s = 0 is the electron oscillator (single polarization
/// slot λ = 1), s = 1, 2 the photon modes with polarization λ ∈ {1, 2}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ModeIndex {
    pub s: usize,
    pub lambda: usize,
}

impl ModeIndex {
    pub const ELECTRON: ModeIndex = ModeIndex { s: 0, lambda: 1 };

    /// Canonical ordering of the five modes.
    pub const ALL: [ModeIndex; 5] = [
        ModeIndex { s: 0, lambda: 1 },
        ModeIndex { s: 1, lambda: 1 },
        ModeIndex { s: 1, lambda: 2 },
        ModeIndex { s: 2, lambda: 1 },
        ModeIndex { s: 2, lambda: 2 },
    ];

    /// The four photonic modes in canonical order.
    pub const PHOTONS: [ModeIndex; 4] = [
        ModeIndex { s: 1, lambda: 1 },
        ModeIndex { s: 1, lambda: 2 },
        ModeIndex { s: 2, lambda: 1 },
        ModeIndex { s: 2, lambda: 2 },
    ];

    pub fn photon(s: usize, lambda: usize) -> ModeIndex {
        assert!((1..=2).contains(&s) && (1..=2).contains(&lambda));
        ModeIndex { s, lambda }
    }

    /// Position in the canonical ordering.
    pub fn flat(&self) -> usize {
        if self.s == 0 {
            0
        } else {
            1 + 2 * (self.s - 1) + (self.lambda - 1)
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum BogoliubovError {
    #[error("root set carries the resonance/collision flag; closed form is degenerate there")]
    ResonanceFlagged,
    #[error("normalizer q² = {0} is non-positive; outside the canonical regime")]
    NormalizerDomain(f64),
    #[error("canonical constraints violated: |uu†-vv†-1| = {uv1_a:e}, |vuᵀ-uvᵀ| = {uv1_b:e}, eigen residual = {eigen:e}")]
    ConstraintViolation { uv1_a: f64, uv1_b: f64, eigen: f64 },
    #[error("quadratic form is not dynamically stable (non-positive Cholesky pivot or complex frequency)")]
    Unstable,
    #[error("spectrum error: {0}")]
    Spectrum(#[from] crate::spectrum::SpectrumError),
}

/// Coefficient matrices of the quadratic form plus its scalar offset.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticForm {
    /// Hermitian 5×5 matrix of a†a couplings (canonical mode order).
    pub a: CMat,
    /// Symmetric 5×5 matrix of a†a† couplings.
    pub b: CMat,
    /// Scalar part m²/2(ng) + ω/2 + (ε/2)Σκ⁻¹ (eV).
    pub offset: f64,
}

/// Build A, B and the offset from the model parameters.
pub fn build_quadratic_form(p: &ModelParams) -> QuadraticForm {
    let ng = p.ng();
    assert!(ng > 0.0, "light-front normalization (ng) must be positive");
    let n = 5;
    let mut a = CMat::zeros(n, n);
    let mut b = CMat::zeros(n, n);
    let g = (p.epsilon * p.omega).sqrt() / 2.0;
    // (+i)^(λ-1) and (−i)^(λ-1) phase ladders
    let plus_i = |lambda: usize| if lambda == 1 { C64::new(1.0, 0.0) } else { C64::new(0.0, 1.0) };
    let minus_i = |lambda: usize| if lambda == 1 { C64::new(1.0, 0.0) } else { C64::new(0.0, -1.0) };

    a[(0, 0)] = C64::new(p.omega, 0.0);
    for row in ModeIndex::PHOTONS {
        let r = row.flat();
        let ks = p.kappas()[row.s - 1];
        for col in ModeIndex::PHOTONS {
            let c = col.flat();
            let ks2 = p.kappas()[col.s - 1];
            if row.lambda == col.lambda {
                let coupling = p.epsilon / (2.0 * (ks * ks2).sqrt());
                a[(r, c)] += C64::new(coupling, 0.0);
                b[(r, c)] += C64::new(coupling, 0.0);
            }
            if r == c {
                a[(r, c)] += C64::new(ks, 0.0);
            }
        }
        // electron couplings; (ng) > 0 so the sign factor |ng|/ng is +1
        a[(r, 0)] = -plus_i(row.lambda) * g / ks.sqrt();
        a[(0, r)] = -minus_i(row.lambda) * g / ks.sqrt();
        b[(r, 0)] = -minus_i(row.lambda) * g / ks.sqrt();
        b[(0, r)] = -minus_i(row.lambda) * g / ks.sqrt();
    }
    let offset = p.mass * p.mass / (2.0 * ng)
        + p.omega / 2.0
        + 0.5 * p.epsilon * (1.0 / p.kappa1 + 1.0 / p.kappa2);
    QuadraticForm { a, b, offset }
}

/// How a transform was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransformMethod {
    ClosedForm,
    Perturbative,
    Oracle,
}

/// The matrices (u, v) of a canonical transformation, columns in the same
/// order as `taus`.
#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalTransform {
    pub u: CMat,
    pub v: CMat,
    /// Per-column normalizers q_{k,σ} where the closed form defines them.
    pub q: Option<[f64; 5]>,
    /// Mode frequency attached to each column.
    pub taus: [f64; 5],
    pub method: TransformMethod,
}

impl CanonicalTransform {
    pub fn u_entry(&self, row: ModeIndex, col: ModeIndex) -> C64 {
        self.u[(row.flat(), col.flat())]
    }

    pub fn v_entry(&self, row: ModeIndex, col: ModeIndex) -> C64 {
        self.v[(row.flat(), col.flat())]
    }

    /// Σ_j τ_j ‖v_j‖² over the transform's own columns.
    pub fn v_energy_sum_own(&self) -> f64 {
        let mut sum = 0.0;
        for j in 0..5 {
            let col = self.v.column(j);
            sum += self.taus[j] * col.iter().map(|z| z.norm_sqr()).sum::<f64>();
        }
        sum
    }

    /// Σ_j τ_j ‖v_j‖² with caller-supplied frequencies (canonical order).
    pub fn v_energy_sum(&self, taus: &[f64; 5]) -> f64 {
        let mut sum = 0.0;
        for j in 0..5 {
            let col = self.v.column(j);
            sum += taus[j] * col.iter().map(|z| z.norm_sqr()).sum::<f64>();
        }
        sum
    }

    /// Rotate each column so that its largest-|u| entry is real positive.
    /// Physics outputs are phase-insensitive; this is for comparisons only.
    pub fn phase_fixed(&self) -> CanonicalTransform {
        let mut out = self.clone();
        for j in 0..5 {
            let mut best = 0usize;
            let mut mag = -1.0;
            for i in 0..5 {
                let m = out.u[(i, j)].norm();
                if m > mag {
                    mag = m;
                    best = i;
                }
            }
            let z = out.u[(best, j)];
            if z.norm() > 0.0 {
                let phase = z / z.norm();
                for i in 0..5 {
                    out.u[(i, j)] /= phase;
                    out.v[(i, j)] *= phase;
                }
            }
        }
        out
    }
}

/// Max-entry residuals of the symplectic constraints:
/// (‖uu† − vv† − 1‖_max, ‖vuᵀ − uvᵀ‖_max).
pub fn verify_canonical(t: &CanonicalTransform) -> (f64, f64) {
    let id = CMat::identity(5, 5);
    let r1 = &t.u * t.u.adjoint() - &t.v * t.v.adjoint() - id;
    let r2 = &t.v * t.u.transpose() - &t.u * t.v.transpose();
    (max_abs(&r1), max_abs(&r2))
}

/// Max per-column residual of the eigen-system
/// (A − τ_j)u_j = B v̄_j, (A + τ_j)v_j = B ū_j.
pub fn verify_diagonalization(t: &CanonicalTransform, qf: &QuadraticForm) -> f64 {
    let mut worst: f64 = 0.0;
    for j in 0..5 {
        let u_j = t.u.column(j).into_owned();
        let v_j = t.v.column(j).into_owned();
        let tau = C64::new(t.taus[j], 0.0);
        let r1 = &qf.a * &u_j - &u_j * tau - &qf.b * v_j.conjugate();
        let r2 = &qf.a * &v_j + &v_j * tau - &qf.b * u_j.conjugate();
        worst = worst.max(max_abs_vec(&r1)).max(max_abs_vec(&r2));
    }
    worst
}

fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn max_abs_vec(v: &DVector<C64>) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Build (u, v) from the explicit per-column solution at the given roots.
///
/// For a column with root τ and polarization index σ the photon rows carry
///
/// ```text
///   u_{s,λ} = q (δ_{λ,1} − i(−1)^σ δ_{λ,2}) / [2√(τκ_s)(τ − κ_s)]
///   v_{s,λ} = q (δ_{λ,1} + i(−1)^σ δ_{λ,2}) / [2√(τκ_s)(τ + κ_s)]
/// ```
///
/// and the electron row carries −q√(ω/(ετ³)) in u for σ = 1 columns and in
/// v for σ = 2 columns, with q⁻² = (−1)^{σ−1}ω/(ετ³) + 2Σ_s(τ²−κ_s²)⁻².
pub fn closed_form_transform(
    roots: &RootSet,
    p: &ModelParams,
) -> Result<CanonicalTransform, BogoliubovError> {
    if roots.collision {
        return Err(BogoliubovError::ResonanceFlagged);
    }
    let t = build_transform_at_roots(roots, p, TransformMethod::ClosedForm)?;
    if roots.method == SolveMethod::ExactNumeric {
        let (r1, r2) = verify_canonical(&t);
        let qf = build_quadratic_form(p);
        let re = verify_diagonalization(&t, &qf);
        if !(r1 < 1e-8 && r2 < 1e-8 && re < 1e-8 * scale_of(&qf)) {
            return Err(BogoliubovError::ConstraintViolation { uv1_a: r1, uv1_b: r2, eigen: re });
        }
    }
    Ok(t)
}

fn scale_of(qf: &QuadraticForm) -> f64 {
    max_abs(&qf.a).max(1.0)
}

/// Transform truncated at the small-coupling order: the closed-form map
/// evaluated on the first-order roots. Keeps every O(√ε) entry, so the
/// symplectic residuals shrink as O(ε).
pub fn perturbative_transform(p: &ModelParams) -> Result<CanonicalTransform, BogoliubovError> {
    let roots = crate::spectrum::perturbative_roots(p)?;
    build_transform_at_roots(&roots, p, TransformMethod::Perturbative)
}

fn build_transform_at_roots(
    roots: &RootSet,
    p: &ModelParams,
    method: TransformMethod,
) -> Result<CanonicalTransform, BogoliubovError> {
    let mut u = CMat::zeros(5, 5);
    let mut v = CMat::zeros(5, 5);
    let mut qs = [0.0; 5];
    let taus = roots.taus_canonical();

    if p.epsilon == 0.0 {
        u[(0, 0)] = C64::new(-1.0, 0.0);
        qs[0] = 1.0;
        let inv_sqrt2 = 1.0 / 2f64.sqrt();
        for col in ModeIndex::PHOTONS {
            let j = col.flat();
            let k = p.kappas()[col.s - 1];
            let sgn = if col.lambda == 1 { (k - p.omega).signum() } else { 1.0 };
            let sig = if col.lambda == 1 { 1.0 } else { -1.0 }; // −(−1)^σ
            u[(ModeIndex::photon(col.s, 1).flat(), j)] = C64::new(sgn * inv_sqrt2, 0.0);
            u[(ModeIndex::photon(col.s, 2).flat(), j)] = C64::new(0.0, sig * sgn * inv_sqrt2);
            qs[j] = 1.0;
        }
        return Ok(CanonicalTransform { u, v, q: Some(qs), taus, method });
    }

    for col in ModeIndex::ALL {
        let j = col.flat();
        let root = roots.root(col);
        let tau = root.tau;
        let sigma = col.lambda; // electron column behaves as σ = 1
        let sign_sigma = if sigma == 1 { 1.0 } else { -1.0 }; // (−1)^(σ−1)

        let mut inv_q2 = sign_sigma * p.omega / (p.epsilon * tau.powi(3));
        for s in 1..=2usize {
            let t2k2 = root.tau2_minus_kappa2(s, p);
            inv_q2 += 2.0 / (t2k2 * t2k2);
        }
        if !(inv_q2 > 0.0) {
            return Err(BogoliubovError::NormalizerDomain(inv_q2));
        }
        let q = inv_q2.sqrt().recip();
        qs[j] = q;

        let electron_mag = (p.omega / (p.epsilon * tau.powi(3))).sqrt() * q;
        if sigma == 1 {
            u[(0, j)] = C64::new(-electron_mag, 0.0);
        } else {
            v[(0, j)] = C64::new(-electron_mag, 0.0);
        }
        for s in 1..=2usize {
            let k = p.kappas()[s - 1];
            let sq = (tau * k).sqrt();
            let p_s = 1.0 / (2.0 * sq * root.d_kappa[s - 1]);
            let m_s = 1.0 / (2.0 * sq * (tau + k));
            // φ_λ = δ_{λ1} − i(−1)^σ δ_{λ2}; ψ_λ = δ_{λ1} + i(−1)^σ δ_{λ2}
            let phi2 = C64::new(0.0, sign_sigma); // −i(−1)^σ
            let psi2 = C64::new(0.0, -sign_sigma);
            u[(ModeIndex::photon(s, 1).flat(), j)] = C64::new(p_s * q, 0.0);
            u[(ModeIndex::photon(s, 2).flat(), j)] = phi2 * (p_s * q);
            v[(ModeIndex::photon(s, 1).flat(), j)] = C64::new(m_s * q, 0.0);
            v[(ModeIndex::photon(s, 2).flat(), j)] = psi2 * (m_s * q);
        }
    }
    Ok(CanonicalTransform { u, v, q: Some(qs), taus, method })
}

/// Diagonalize through the 10×10 dynamical matrix, never touching the
/// secular equation.
///
/// The Hermitian companion H₂ = [[A, B], [B*, A*]] is split as H₂ = K†K;
/// the Hermitian matrix K J K† (J = diag(1, −1)) then carries the mode
/// frequencies ±τ as eigenvalues, and T = K⁻¹U|Λ|^{1/2} is symplectic with
/// T†H₂T diagonal. Positive-frequency columns give (u, v).
///
/// Returns the five positive frequencies in ascending order together with
/// the transform (columns in the same order).
pub fn oracle_diagonalize(
    qf: &QuadraticForm,
) -> Result<(Vec<f64>, CanonicalTransform), BogoliubovError> {
    let n = 5;
    let mut h2 = CMat::zeros(2 * n, 2 * n);
    for r in 0..n {
        for c in 0..n {
            h2[(r, c)] = qf.a[(r, c)];
            h2[(r, c + n)] = qf.b[(r, c)];
            h2[(r + n, c)] = qf.b[(r, c)].conj();
            h2[(r + n, c + n)] = qf.a[(r, c)].conj();
        }
    }
    let chol = nalgebra::linalg::Cholesky::new(h2).ok_or(BogoliubovError::Unstable)?;
    let k = chol.l().adjoint(); // upper-triangular K with H₂ = K†K

    let mut j_mat = CMat::zeros(2 * n, 2 * n);
    for i in 0..n {
        j_mat[(i, i)] = C64::new(1.0, 0.0);
        j_mat[(i + n, i + n)] = C64::new(-1.0, 0.0);
    }
    let w = &k * &j_mat * k.adjoint();
    let eig = nalgebra::linalg::SymmetricEigen::new(w);

    let mut order: Vec<usize> = (0..2 * n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
    let neg: Vec<usize> = order.iter().copied().filter(|&i| eig.eigenvalues[i] < 0.0).collect();
    let pos: Vec<usize> = order.iter().copied().filter(|&i| eig.eigenvalues[i] > 0.0).collect();
    if neg.len() != n || pos.len() != n {
        return Err(BogoliubovError::Unstable);
    }

    // columns: positive frequencies ascending, then the negative partners
    let mut us = CMat::zeros(2 * n, 2 * n);
    let mut lam_sqrt = DVector::<C64>::zeros(2 * n);
    for (slot, &i) in pos.iter().chain(neg.iter()).enumerate() {
        us.set_column(slot, &eig.eigenvectors.column(i));
        lam_sqrt[slot] = C64::new(eig.eigenvalues[i].abs().sqrt(), 0.0);
    }
    for slot in 0..2 * n {
        let s = lam_sqrt[slot];
        for r in 0..2 * n {
            us[(r, slot)] *= s;
        }
    }
    let t_full = k
        .lu()
        .solve(&us)
        .ok_or(BogoliubovError::Unstable)?;

    let mut u = CMat::zeros(n, n);
    let mut v = CMat::zeros(n, n);
    let mut taus = [0.0; 5];
    for j in 0..n {
        taus[j] = eig.eigenvalues[pos[j]];
        for r in 0..n {
            u[(r, j)] = t_full[(r, j)];
            v[(r, j)] = -t_full[(r + n, j)].conj();
        }
    }
    let freqs = taus.to_vec();
    Ok((freqs, CanonicalTransform { u, v, q: None, taus, method: TransformMethod::Oracle }))
}

/// Ground constant H̃₀ and the two vacuum means it must tie together.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroundReport {
    /// H̃₀ = m²/2(ng) + ω/2 − Σ_j τ_j‖v_j‖² + (ε/2)Σκ⁻¹.
    pub h_tilde0: f64,
    /// Free-vacuum mean of H (the quadratic-form offset).
    pub free_vacuum_mean: f64,
    /// Dressed-vacuum mean of H computed through the inverse transform.
    pub dressed_vacuum_mean: f64,
}

/// Compute H̃₀ and verify that it matches the dressed-vacuum mean of the
/// quadratic form to 1e-10 (relative to the form's scale).
pub fn ground_constant(
    roots: &RootSet,
    t: &CanonicalTransform,
    p: &ModelParams,
) -> Result<GroundReport, BogoliubovError> {
    let qf = build_quadratic_form(p);
    let vsum = t.v_energy_sum(&roots.taus_canonical());
    let h_tilde0 = p.mass * p.mass / (2.0 * p.ng()) + p.omega / 2.0 - vsum
        + 0.5 * p.epsilon * (1.0 / p.kappa1 + 1.0 / p.kappa2);
    let dressed = dressed_vacuum_mean(&qf, t);
    let report = GroundReport {
        h_tilde0,
        free_vacuum_mean: qf.offset,
        dressed_vacuum_mean: dressed,
    };
    let scale = qf.offset.abs().max(vsum.abs()).max(1.0);
    if (h_tilde0 - dressed).abs() > 1e-10 * scale {
        return Err(BogoliubovError::ConstraintViolation {
            uv1_a: (h_tilde0 - dressed).abs(),
            uv1_b: 0.0,
            eigen: 0.0,
        });
    }
    Ok(report)
}

/// ⟨H⟩ in the dressed vacuum, via a_a = Σ_j (u_{a,j} c_j − v_{a,j} c†_j):
/// offset + Σ A_{ab}(v̄vᵀ)_{ab} − ½Σ B_{ab}(v̄ūᵀ)_{ab} − ½Σ B̄_{ab}(uvᵀ)_{ab}.
pub fn dressed_vacuum_mean(qf: &QuadraticForm, t: &CanonicalTransform) -> f64 {
    let n_mat = t.v.conjugate() * t.v.transpose(); // ⟨a†_a a_b⟩
    let anom_up = -(t.v.conjugate() * t.u.adjoint()); // ⟨a†_a a†_b⟩ = −(v̄ūᵀ)
    let anom_down = -(t.u.clone() * t.v.transpose()); // ⟨a_a a_b⟩ = −(uvᵀ)
    let term1 = (qf.a.transpose() * &n_mat).trace();
    let term2 = (qf.b.transpose() * &anom_up).trace() * C64::new(0.5, 0.0);
    let term3 = (qf.b.conjugate().transpose() * &anom_down).trace() * C64::new(0.5, 0.0);
    qf.offset + (term1 + term2 + term3).re
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::solve_roots;

    fn benchmark(epsilon: f64) -> ModelParams {
        ModelParams::from_natural(1.0, 2.0, 0.5, 1.0, epsilon, 0, 0.0).unwrap()
    }

    /// Literal transcription of the coefficient matrices, kept separate from
    /// the production builder on purpose.
    fn quadratic_form_by_hand(p: &ModelParams) -> (CMat, CMat) {
        let n = 5;
        let modes = ModeIndex::ALL;
        let kap = |s: usize| if s == 1 { p.kappa1 } else { p.kappa2 };
        let mut a = CMat::zeros(n, n);
        let mut b = CMat::zeros(n, n);
        let i_pow = |k: i32| match k.rem_euclid(4) {
            0 => C64::new(1.0, 0.0),
            1 => C64::new(0.0, 1.0),
            2 => C64::new(-1.0, 0.0),
            _ => C64::new(0.0, -1.0),
        };
        for (r, m1) in modes.iter().enumerate() {
            for (c, m2) in modes.iter().enumerate() {
                let (s, l) = (m1.s, m1.lambda as i32);
                let (sp, lp) = (m2.s, m2.lambda as i32);
                let d0s = if s == 0 { 1.0 } else { 0.0 };
                let d0sp = if sp == 0 { 1.0 } else { 0.0 };
                let dss = if s == sp { 1.0 } else { 0.0 };
                let dll = if l == lp { 1.0 } else { 0.0 };
                let diag = (p.omega * (2.0 - l as f64) * d0s
                    + if s > 0 { kap(s) } else { 0.0 })
                    * dss
                    * dll;
                let phot = if s > 0 && sp > 0 {
                    p.epsilon / (2.0 * (kap(s) * kap(sp)).sqrt()) * dll
                } else {
                    0.0
                };
                let se = (p.epsilon * p.omega).sqrt() / 2.0;
                let mut a_el = C64::new(0.0, 0.0);
                let mut b_el = C64::new(0.0, 0.0);
                if s > 0 && sp == 0 && lp == 1 {
                    a_el += i_pow(l - 1) / kap(s).sqrt();
                    b_el += i_pow(-(l - 1)) / kap(s).sqrt();
                }
                if sp > 0 && s == 0 && l == 1 {
                    a_el += i_pow(-(lp - 1)) / kap(sp).sqrt();
                    b_el += i_pow(-(lp - 1)) / kap(sp).sqrt();
                }
                a[(r, c)] = C64::new(diag + phot, 0.0) - a_el * se;
                b[(r, c)] = C64::new(phot, 0.0) - b_el * se;
            }
        }
        (a, b)
    }

    #[test]
    fn quadratic_form_free_limit() {
        let p = benchmark(0.0);
        let qf = build_quadratic_form(&p);
        let expect = [p.omega, p.kappa1, p.kappa1, p.kappa2, p.kappa2];
        for r in 0..5 {
            for c in 0..5 {
                let want = if r == c { C64::new(expect[r], 0.0) } else { C64::new(0.0, 0.0) };
                assert_eq!(qf.a[(r, c)], want);
                assert_eq!(qf.b[(r, c)], C64::new(0.0, 0.0));
            }
        }
        assert!((qf.offset - (0.5 / p.ng() + p.omega / 2.0)).abs() < 1e-15);
    }

    #[test]
    fn quadratic_form_matches_independent_transcription() {
        let mut p = benchmark(0.01);
        p.omega = 0.5;
        p.omega0 = 0.5;
        let qf = build_quadratic_form(&p);
        let (a2, b2) = quadratic_form_by_hand(&p);
        assert!(max_abs(&(qf.a.clone() - a2)) < 1e-15);
        assert!(max_abs(&(qf.b.clone() - b2)) < 1e-15);
    }

    #[test]
    fn quadratic_form_symmetries() {
        let p = benchmark(0.02);
        let qf = build_quadratic_form(&p);
        assert!(max_abs(&(qf.a.clone() - qf.a.adjoint())) < 1e-14);
        assert!(max_abs(&(qf.b.clone() - qf.b.transpose())) < 1e-14);
        // photon–photon block of B equals the ε-part of A's photon block
        for m1 in ModeIndex::PHOTONS {
            for m2 in ModeIndex::PHOTONS {
                let (r, c) = (m1.flat(), m2.flat());
                let eps_part = if r == c {
                    qf.a[(r, c)] - C64::new(p.kappas()[m1.s - 1], 0.0)
                } else {
                    qf.a[(r, c)]
                };
                assert!((qf.b[(r, c)] - eps_part).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn closed_form_satisfies_constraints() {
        let p = benchmark(0.01);
        let roots = solve_roots(&p).unwrap();
        let t = closed_form_transform(&roots, &p).unwrap();
        let (r1, r2) = verify_canonical(&t);
        assert!(r1 < 1e-12, "uv1 residual {r1:e}");
        assert!(r2 < 1e-12, "symmetry residual {r2:e}");
        let qf = build_quadratic_form(&p);
        let re = verify_diagonalization(&t, &qf);
        assert!(re < 1e-12, "eigen residual {re:e}");
    }

    #[test]
    fn closed_form_free_limit() {
        let p = benchmark(0.0);
        let roots = solve_roots(&p).unwrap();
        let t = closed_form_transform(&roots, &p).unwrap();
        assert!(max_abs(&t.v) == 0.0);
        let (r1, r2) = verify_canonical(&t);
        assert!(r1 < 1e-15 && r2 < 1e-15);
        // unit-modulus mixing entries in the photon block
        for col in ModeIndex::PHOTONS {
            for l in 1..=2 {
                let e = t.u_entry(ModeIndex::photon(col.s, l), col);
                assert!((e.norm() - 1.0 / 2f64.sqrt()).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn identity_transform_verifies_cleanly() {
        let t = CanonicalTransform {
            u: CMat::identity(5, 5),
            v: CMat::zeros(5, 5),
            q: None,
            taus: [1.0; 5],
            method: TransformMethod::Oracle,
        };
        assert_eq!(verify_canonical(&t), (0.0, 0.0));
    }

    #[test]
    fn oracle_free_limit_eigenvalues() {
        let p = benchmark(0.0);
        let qf = build_quadratic_form(&p);
        let (freqs, t) = oracle_diagonalize(&qf).unwrap();
        let mut expect = [p.omega, p.kappa1, p.kappa1, p.kappa2, p.kappa2];
        expect.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (f, e) in freqs.iter().zip(expect.iter()) {
            assert!((f - e).abs() < 1e-12);
        }
        let (r1, r2) = verify_canonical(&t);
        assert!(r1 < 1e-10 && r2 < 1e-10);
    }

    #[test]
    fn oracle_matches_secular_roots() {
        let p = benchmark(0.01);
        let qf = build_quadratic_form(&p);
        let (freqs, t) = oracle_diagonalize(&qf).unwrap();
        let mut taus = solve_roots(&p).unwrap().taus_canonical();
        taus.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (f, e) in freqs.iter().zip(taus.iter()) {
            assert!((f - e).abs() < 1e-10 * e, "oracle {f} vs secular {e}");
        }
        let (r1, r2) = verify_canonical(&t);
        assert!(r1 < 1e-10 && r2 < 1e-10, "{r1:e} {r2:e}");
        assert!(verify_diagonalization(&t, &qf) < 1e-10);
    }

    #[test]
    fn oracle_scales_linearly_with_rescale() {
        let p = ModelParams::from_natural(2.0, 4.0, 8.0, 2.0, 0.04, 0, 0.0).unwrap();
        let r = crate::params::dimensionless_rescale(&p);
        let (f1, _) = oracle_diagonalize(&build_quadratic_form(&p)).unwrap();
        let (f2, _) = oracle_diagonalize(&build_quadratic_form(&r)).unwrap();
        for (a, b) in f1.iter().zip(f2.iter()) {
            assert!((a - b * p.kappa1).abs() < 1e-12 * a.abs());
        }
    }

    #[test]
    fn closed_form_matches_oracle_entrywise() {
        let p = benchmark(0.01);
        let roots = solve_roots(&p).unwrap();
        let t = closed_form_transform(&roots, &p).unwrap();
        let (freqs, o) = oracle_diagonalize(&build_quadratic_form(&p)).unwrap();
        // pair columns by frequency
        for j in 0..5 {
            let tau = t.taus[j];
            let oj = freqs
                .iter()
                .enumerate()
                .min_by(|a, b| {
                    (a.1 - tau).abs().partial_cmp(&(b.1 - tau).abs()).unwrap()
                })
                .unwrap()
                .0;
            for r in 0..5 {
                assert!(
                    (t.u[(r, j)].norm() - o.u[(r, oj)].norm()).abs() < 1e-8,
                    "u mismatch at ({r},{j})"
                );
                assert!(
                    (t.v[(r, j)].norm() - o.v[(r, oj)].norm()).abs() < 1e-8,
                    "v mismatch at ({r},{j})"
                );
            }
        }
    }

    #[test]
    fn perturbative_transform_structure() {
        let p = benchmark(1e-4);
        let t = perturbative_transform(&p).unwrap();
        // photon-row electron-column v mixing: √(ω₀ε/κ₁)/[2(ω₀+κ₁)] at
        // leading order; the electron-row photon-column u mixing carries the
        // √2 normalization instead.
        let got = t.v_entry(ModeIndex::photon(1, 1), ModeIndex::ELECTRON).norm();
        let expect = (p.omega0 * p.epsilon / p.kappa1).sqrt() / (2.0 * (p.omega0 + p.kappa1));
        assert!((got - expect).abs() < 0.05 * expect, "got {got}, expect {expect}");

        let got_u = t.u_entry(ModeIndex::ELECTRON, ModeIndex::photon(1, 1)).norm();
        let expect_u = (p.omega0 * p.epsilon / p.kappa1).sqrt()
            / (2f64.sqrt() * (p.kappa1 - p.omega0).abs());
        assert!((got_u - expect_u).abs() < 0.05 * expect_u, "got {got_u}, expect {expect_u}");

        let (r1, r2) = verify_canonical(&t);
        assert!(r1 < 1e-3 && r2 < 1e-3);
    }

    #[test]
    fn perturbative_residuals_vanish_with_eps() {
        // O(ε) or better (measured ε^1.5), never O(1)
        let res = |eps: f64| {
            let p = benchmark(eps);
            let t = perturbative_transform(&p).unwrap();
            let (r1, r2) = verify_canonical(&t);
            r1.max(r2)
        };
        let r3 = res(1e-3);
        let r5 = res(1e-5);
        let slope = (r3 / r5).log10() / 2.0;
        assert!(slope > 0.9, "uv1 residual slope {slope}");
        assert!(r3 < 1e-3, "residual at eps=1e-3 is {r3:e}");
    }

    #[test]
    fn perturbative_approaches_closed_form() {
        let gap = |eps: f64| {
            let p = benchmark(eps);
            let roots = solve_roots(&p).unwrap();
            let c = closed_form_transform(&roots, &p).unwrap();
            let q = perturbative_transform(&p).unwrap();
            let mut worst: f64 = 0.0;
            for r in 0..5 {
                for j in 0..5 {
                    worst = worst.max((c.u[(r, j)].norm() - q.u[(r, j)].norm()).abs());
                    worst = worst.max((c.v[(r, j)].norm() - q.v[(r, j)].norm()).abs());
                }
            }
            worst
        };
        let g3 = gap(1e-3);
        let g5 = gap(1e-5);
        let slope = (g3 / g5).log10() / 2.0;
        assert!(slope > 0.4, "|u - u_closed| slope {slope}");
        assert!(g5 < 1e-4);
    }

    #[test]
    fn ground_constant_identities() {
        let p = benchmark(0.01);
        let roots = solve_roots(&p).unwrap();
        let t = closed_form_transform(&roots, &p).unwrap();
        let g = ground_constant(&roots, &t, &p).unwrap();
        // free-vacuum mean equals H̃₀ + Σ τ|v|² by the energy-sum identity
        let vsum = t.v_energy_sum(&roots.taus_canonical());
        assert!((g.free_vacuum_mean - (g.h_tilde0 + vsum)).abs() < 1e-12);
        assert!((g.h_tilde0 - g.dressed_vacuum_mean).abs() < 1e-10);

        // ε = 0: H̃₀ = m²/2(ng) + ω/2
        let p0 = benchmark(0.0);
        let r0 = solve_roots(&p0).unwrap();
        let t0 = closed_form_transform(&r0, &p0).unwrap();
        let g0 = ground_constant(&r0, &t0, &p0).unwrap();
        assert!((g0.h_tilde0 - (0.5 / p0.ng() + p0.omega / 2.0)).abs() < 1e-14);
    }

    #[test]
    fn ground_constant_scales_linearly() {
        let p = ModelParams::from_natural(2.0, 4.0, 8.0, 2.0, 0.04, 0, 0.0).unwrap();
        let r = crate::params::dimensionless_rescale(&p);
        let g_full = {
            let roots = solve_roots(&p).unwrap();
            let t = closed_form_transform(&roots, &p).unwrap();
            ground_constant(&roots, &t, &p).unwrap().h_tilde0
        };
        let g_resc = {
            let roots = solve_roots(&r).unwrap();
            let t = closed_form_transform(&roots, &r).unwrap();
            ground_constant(&roots, &t, &r).unwrap().h_tilde0
        };
        assert!((g_full - 2.0 * g_resc).abs() < 1e-12 * g_full.abs());
    }
}
