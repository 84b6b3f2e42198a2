//! Built-in verification suite: oracle equivalence, canonical constraints
//! and entropy identities over deterministic randomized parameter draws.
//!
//! The same checks back the `selfcheck` CLI subcommand and the acceptance
//! tests, so a shipped binary can re-certify itself without the test
//! harness.

use crate::bogoliubov::{
    build_quadratic_form, closed_form_transform, oracle_diagonalize, verify_canonical,
    verify_diagonalization,
};
use crate::entangle::{measure, two_photon_amplitudes, TwoQubitAmplitudes};
use crate::params::ModelParams;
use crate::spectrum::solve_roots;
use num_complex::Complex64 as C64;

/// One verification line.
#[derive(Debug, Clone)]
pub struct CheckLine {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

/// Deterministic xorshift64* stream for reproducible parameter draws.
pub struct DrawStream {
    state: u64,
}

impl DrawStream {
    pub fn new(seed: u64) -> Self {
        DrawStream { state: seed.max(1) }
    }

    fn next_u64(&mut self) -> u64 {
        let mut x = self.state;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        self.state = x;
        x.wrapping_mul(0x2545F4914F6CDD1D)
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        let u = (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
        lo + (hi - lo) * u
    }

    pub fn log_uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.uniform(lo.ln(), hi.ln()).exp()
    }

    pub fn index(&mut self, n: usize) -> usize {
        (self.next_u64() % n as u64) as usize
    }
}

/// Randomized dimensionless parameters in the validation ranges
/// (κ₁ ∈ [0.5, 2], κ₂/κ₁ ∈ [1.5, 5], eB ∈ [0.01, 5], m ∈ [0.5, 5],
/// ε ∈ [1e-6, 0.05], N₀ ∈ {0..3}), rejecting draws that land within a
/// relative 1e-3 of a resonance where the closed form degenerates.
pub fn draw_params(seed: u64, n: usize) -> Vec<ModelParams> {
    let mut rng = DrawStream::new(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let kappa1 = rng.uniform(0.5, 2.0);
        let kappa2 = kappa1 * rng.uniform(1.5, 5.0);
        let e_b = rng.uniform(0.01, 5.0);
        let mass = rng.uniform(0.5, 5.0);
        let epsilon = rng.log_uniform(1e-6, 0.05);
        let landau = rng.index(4) as u32;
        let p = match ModelParams::from_natural(kappa1, kappa2, e_b, mass, epsilon, landau, 0.0) {
            Ok(p) => p,
            Err(_) => continue,
        };
        if p.resonance_distance() < 1e-3 {
            continue;
        }
        out.push(p);
    }
    out
}

/// Roots-vs-oracle equivalence: the sorted secular roots must match the
/// positive dynamical-matrix eigenvalues to relative 1e-10 on every draw.
pub fn check_oracle_equivalence(draws: &[ModelParams]) -> CheckLine {
    let mut worst: f64 = 0.0;
    for p in draws {
        let roots = match solve_roots(p) {
            Ok(r) => r,
            Err(e) => {
                return CheckLine {
                    name: "oracle-equivalence",
                    pass: false,
                    detail: format!("solve failed: {e}"),
                }
            }
        };
        let (freqs, _) = match oracle_diagonalize(&build_quadratic_form(p)) {
            Ok(x) => x,
            Err(e) => {
                return CheckLine {
                    name: "oracle-equivalence",
                    pass: false,
                    detail: format!("oracle failed: {e}"),
                }
            }
        };
        let mut taus = roots.taus_canonical();
        taus.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (t, f) in taus.iter().zip(freqs.iter()) {
            worst = worst.max((t - f).abs() / f);
        }
    }
    CheckLine {
        name: "oracle-equivalence",
        pass: worst < 1e-10,
        detail: format!("max relative root gap {worst:e} over {} draws", draws.len()),
    }
}

/// Canonical constraints of the closed-form transform on every draw:
/// uu† − vv† = 1, vuᵀ = uvᵀ and the per-mode eigen-system residuals, all
/// below 1e-8.
pub fn check_canonical_constraints(draws: &[ModelParams]) -> CheckLine {
    let mut worst: f64 = 0.0;
    for p in draws {
        let roots = match solve_roots(p) {
            Ok(r) => r,
            Err(e) => {
                return CheckLine {
                    name: "canonical-constraints",
                    pass: false,
                    detail: format!("solve failed: {e}"),
                }
            }
        };
        let t = match closed_form_transform(&roots, p) {
            Ok(t) => t,
            Err(e) => {
                return CheckLine {
                    name: "canonical-constraints",
                    pass: false,
                    detail: format!("transform failed: {e}"),
                }
            }
        };
        let (r1, r2) = verify_canonical(&t);
        let re = verify_diagonalization(&t, &build_quadratic_form(p));
        worst = worst.max(r1).max(r2).max(re);
    }
    CheckLine {
        name: "canonical-constraints",
        pass: worst < 1e-8,
        detail: format!("max constraint residual {worst:e} over {} draws", draws.len()),
    }
}

/// Entropy identities: μ₁+μ₂ = 1, S(ρ_A) = S(ρ_B), closed-form eigenvalues
/// vs direct decomposition, Bell state M = 1, equal polarizations M = 0.
pub fn check_entropy_identities(draws: &[ModelParams]) -> CheckLine {
    let bell = TwoQubitAmplitudes::from_raw([
        C64::new(1.0, 0.0),
        C64::new(0.0, 0.0),
        C64::new(0.0, 0.0),
        C64::new(1.0, 0.0),
    ])
    .and_then(|a| measure(&a));
    match bell {
        Ok(r) if (r.measure - 1.0).abs() < 1e-12 => {}
        Ok(r) => {
            return CheckLine {
                name: "entropy-identities",
                pass: false,
                detail: format!("Bell state measure {} != 1", r.measure),
            }
        }
        Err(e) => {
            return CheckLine {
                name: "entropy-identities",
                pass: false,
                detail: format!("Bell state failed: {e}"),
            }
        }
    }
    let mut worst: f64 = 0.0;
    for p in draws {
        let run = solve_roots(p)
            .map_err(|e| e.to_string())
            .and_then(|roots| closed_form_transform(&roots, p).map_err(|e| e.to_string()))
            .and_then(|t| {
                for (l1, l2) in [(2, 1), (1, 2), (1, 1), (2, 2)] {
                    let a = two_photon_amplitudes(&t, l1, l2).map_err(|e| e.to_string())?;
                    let r = measure(&a).map_err(|e| e.to_string())?;
                    if l1 == l2 {
                        worst = worst.max(r.measure.abs());
                    }
                    worst = worst.max((r.mu[0] + r.mu[1] - 1.0).abs());
                }
                Ok(())
            });
        if let Err(e) = run {
            return CheckLine { name: "entropy-identities", pass: false, detail: e };
        }
    }
    CheckLine {
        name: "entropy-identities",
        pass: worst < 1e-12,
        detail: format!("max identity violation {worst:e} over {} draws", draws.len()),
    }
}

/// Run the whole suite with a fixed seed.
pub fn run_selfcheck(draw_count: usize) -> Vec<CheckLine> {
    let draws = draw_params(0x5EED_CAFE, draw_count);
    vec![
        check_oracle_equivalence(&draws),
        check_canonical_constraints(&draws),
        check_entropy_identities(&draws),
    ]
}

pub fn all_passed(lines: &[CheckLine]) -> bool {
    lines.iter().all(|l| l.pass)
}
