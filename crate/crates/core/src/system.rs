//! Physical parameters, mode-function profiles and the dressed-frame scalar
//! relations used by every other module.
//!
//! Conventions (fixed once, here):
//! - hbar = 1 throughout.
//! - Energy reference frame: the constant (n+1)ω − δ is subtracted from all
//!   channel energies, so the incoming excited channel |a,n> sits at
//!   asymptotic potential 0 and the de-excited channel |b,n+1> at δ. This
//!   removes the cavity frequency ω from the dynamics entirely (global
//!   phase); the detuning δ = ω − ω₀ is the only spectral parameter left.
//! - Mixing angle θ restricted to [0, π/2] with sin 2θ >= 0.

use crate::error::{Error, Result};

/// Physical parameters of one (n, n+1) photon block. Single source of truth
/// for all modules; immutable after construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemConfig {
    /// Atom-field coupling strength g (angular frequency).
    pub g: f64,
    /// Detuning δ = ω − ω₀ (signed angular frequency).
    pub delta: f64,
    /// Photon occupation of the relevant block.
    pub n: u32,
    /// Atomic mass (hbar = 1 units).
    pub m: f64,
    /// Cavity length.
    pub l: f64,
}

impl SystemConfig {
    /// Validated constructor. `g = 0` is accepted as the free-particle limit
    /// (the coupling can equally be switched off through u ≡ 0).
    pub fn new(g: f64, delta: f64, n: u32, m: f64, l: f64) -> Result<Self> {
        if !g.is_finite() || g < 0.0 {
            return Err(Error::InvalidConfig(format!("g = {g} must be >= 0")));
        }
        if !delta.is_finite() {
            return Err(Error::InvalidConfig("delta must be finite".into()));
        }
        if !m.is_finite() || m <= 0.0 {
            return Err(Error::InvalidConfig(format!("m = {m} must be > 0")));
        }
        if !l.is_finite() || l <= 0.0 {
            return Err(Error::InvalidConfig(format!("L = {l} must be > 0")));
        }
        Ok(Self { g, delta, n, m, l })
    }

    /// Reference momentum scale κ = sqrt(2 m g).
    pub fn kappa(&self) -> f64 {
        (2.0 * self.m * self.g).sqrt()
    }

    /// Vacuum Rabi frequency of the block, Ωₙ = 2 g sqrt(n+1).
    pub fn omega_n(&self) -> f64 {
        2.0 * self.g * ((self.n as f64) + 1.0).sqrt()
    }

    /// Off-diagonal coupling g·u·sqrt(n+1) at local mode amplitude u.
    pub fn coupling_at(&self, u: f64) -> f64 {
        self.g * u * ((self.n as f64) + 1.0).sqrt()
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = delta;
        self
    }
}

impl Default for SystemConfig {
    /// m = 1/2 so the kinetic operator is −∂²/∂z², g = 1 so κ = 1, L = 10.
    fn default() -> Self {
        Self {
            g: 1.0,
            delta: 0.0,
            n: 0,
            m: 0.5,
            l: 10.0,
        }
    }
}

/// One piecewise-constant segment of a cavity mode function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub length: f64,
    pub u: f64,
}

/// Piecewise-constant representation of the mode function u(z) on [0, L],
/// with u = 0 on both unbounded exteriors. The mesa mode is the one-segment
/// special case; smooth modes enter as staircases.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeProfile {
    segments: Vec<Segment>,
}

impl ModeProfile {
    /// The mesa mode: u = 1 for 0 < z < L, 0 elsewhere.
    pub fn mesa(l: f64) -> Self {
        Self {
            segments: vec![Segment { length: l, u: 1.0 }],
        }
    }

    pub fn from_segments(segments: Vec<Segment>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::InvalidProfile("no segments".into()));
        }
        for (i, s) in segments.iter().enumerate() {
            if !s.length.is_finite() || s.length <= 0.0 {
                return Err(Error::InvalidProfile(format!(
                    "segment {i}: length = {} must be > 0",
                    s.length
                )));
            }
            if !s.u.is_finite() || s.u < 0.0 {
                return Err(Error::InvalidProfile(format!(
                    "segment {i}: u = {} must be >= 0",
                    s.u
                )));
            }
        }
        Ok(Self { segments })
    }

    /// Midpoint-sampled staircase of a smooth mode function on [0, l].
    pub fn staircase(u_of_z: impl Fn(f64) -> f64, l: f64, n_segments: usize) -> Result<Self> {
        if n_segments == 0 || l <= 0.0 {
            return Err(Error::InvalidProfile(
                "staircase needs l > 0 and at least one segment".into(),
            ));
        }
        let dz = l / n_segments as f64;
        let segments = (0..n_segments)
            .map(|i| {
                let z_mid = (i as f64 + 0.5) * dz;
                Segment {
                    length: dz,
                    u: u_of_z(z_mid).max(0.0),
                }
            })
            .collect();
        Self::from_segments(segments)
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn total_length(&self) -> f64 {
        self.segments.iter().map(|s| s.length).sum()
    }

    /// Spatially mirrored profile (segment order reversed).
    pub fn mirrored(&self) -> Self {
        let mut segments = self.segments.clone();
        segments.reverse();
        Self { segments }
    }

    /// u at absolute position z, with the cavity on [0, total_length].
    pub fn u_at(&self, z: f64) -> f64 {
        if z < 0.0 {
            return 0.0;
        }
        let mut left = 0.0;
        for s in &self.segments {
            let right = left + s.length;
            if z < right {
                return s.u;
            }
            left = right;
        }
        0.0
    }

    /// Checks the profile against the owning configuration.
    pub fn validate_against(&self, config: &SystemConfig) -> Result<()> {
        let total = self.total_length();
        if (total - config.l).abs() > 1e-9 * config.l.max(1.0) {
            return Err(Error::InvalidProfile(format!(
                "profile length {total} does not match config L = {}",
                config.l
            )));
        }
        Ok(())
    }
}

/// Mixing angle θₙ ∈ [0, π/2] defined by cot 2θₙ = −δ / (Ωₙ u), resolved on
/// the branch with sin 2θ = Ωₙu/Λ >= 0 and cos 2θ = −δ/Λ.
///
/// At u = 0 this gives exactly 0 (δ < 0) or π/2 (δ > 0). The point
/// δ = 0, u = 0 leaves the frame undefined and is reported as an error so the
/// caller picks a convention explicitly.
pub fn mixing_angle(delta: f64, g: f64, n: u32, u: f64) -> Result<f64> {
    if g < 0.0 || u < 0.0 {
        return Err(Error::InvalidConfig(format!(
            "mixing_angle needs g >= 0 and u >= 0, got g = {g}, u = {u}"
        )));
    }
    let omega_u = 2.0 * g * ((n as f64) + 1.0).sqrt() * u;
    if omega_u == 0.0 && delta == 0.0 {
        return Err(Error::DegenerateFrame);
    }
    // atan2(sin 2θ, cos 2θ) lands in [0, π] because sin 2θ >= 0.
    Ok(0.5 * omega_u.atan2(-delta))
}

/// Like [`mixing_angle`] but resolving the degenerate point δ = 0, u = 0 to
/// the bare basis (θ = 0), the convention used by the propagation modules.
pub fn mixing_angle_or_bare(delta: f64, g: f64, n: u32, u: f64) -> f64 {
    mixing_angle(delta, g, n, u).unwrap_or(0.0)
}

/// Generalized Rabi frequency Λₙ(u) = sqrt(δ² + Ωₙ² u²).
pub fn generalized_rabi(delta: f64, g: f64, n: u32, u: f64) -> f64 {
    let omega_u = 2.0 * g * ((n as f64) + 1.0).sqrt() * u;
    delta.hypot(omega_u)
}

/// Dressed potentials relative to the incoming excited-channel asymptote:
/// V± = (δ ± Λ)/2. At u = 0 these are exactly the two bare channel offsets
/// {0, δ} (ordering set by the sign of δ).
pub fn channel_energies(config: &SystemConfig, u: f64) -> (f64, f64) {
    let lambda = generalized_rabi(config.delta, config.g, config.n, u);
    (
        0.5 * (config.delta + lambda),
        0.5 * (config.delta - lambda),
    )
}

/// Asymptotic wavenumbers of the two bare channels at total energy E.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticWavenumbers {
    /// Excited channel |a,n>, asymptotic potential 0.
    pub k_a: f64,
    /// De-excited channel |b,n+1>, asymptotic potential δ. Propagating
    /// wavenumber when `b_open`, otherwise the evanescent decay rate.
    pub k_b: f64,
    pub b_open: bool,
}

/// Energy conservation across the δ step: k_a = sqrt(2mE) and
/// k_b = sqrt(2m(E−δ)) when E > δ; for E <= δ the b channel is closed and
/// `k_b` holds the decay rate sqrt(2m(δ−E)).
pub fn asymptotic_wavenumbers(config: &SystemConfig, e: f64) -> Result<AsymptoticWavenumbers> {
    if !(e > 0.0) {
        return Err(Error::NoIncidentChannel { energy: e });
    }
    let k_a = (2.0 * config.m * e).sqrt();
    let gap = e - config.delta;
    if gap > 0.0 {
        Ok(AsymptoticWavenumbers {
            k_a,
            k_b: (2.0 * config.m * gap).sqrt(),
            b_open: true,
        })
    } else {
        Ok(AsymptoticWavenumbers {
            k_a,
            k_b: (2.0 * config.m * (-gap)).sqrt(),
            b_open: false,
        })
    }
}

/// Per-segment dressed frame: mixing angle, local Rabi scales and the 2x2
/// bare <-> dressed rotation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DressedFrame {
    /// Mixing angle θ ∈ [0, π/2].
    pub theta: f64,
    /// Vacuum Rabi frequency Ωₙ = 2g sqrt(n+1).
    pub omega_n: f64,
    /// Generalized Rabi frequency Λₙ(u) = sqrt(δ² + Ωₙ²u²).
    pub lambda_n: f64,
    /// Local mode amplitude the frame was built from.
    pub u: f64,
}

impl DressedFrame {
    /// Errors at the degenerate point δ = 0, u = 0.
    pub fn new(config: &SystemConfig, u: f64) -> Result<Self> {
        let theta = mixing_angle(config.delta, config.g, config.n, u)?;
        Ok(Self::with_theta(config, u, theta))
    }

    /// Degenerate point resolved to the bare basis (θ = 0).
    pub fn new_or_bare(config: &SystemConfig, u: f64) -> Self {
        let theta = mixing_angle_or_bare(config.delta, config.g, config.n, u);
        Self::with_theta(config, u, theta)
    }

    fn with_theta(config: &SystemConfig, u: f64, theta: f64) -> Self {
        Self {
            theta,
            omega_n: config.omega_n(),
            lambda_n: generalized_rabi(config.delta, config.g, config.n, u),
            u,
        }
    }

    /// Rotation R(θ) with the dressed vectors as columns:
    /// bare (ψ_a, ψ_b) = R · dressed (φ₊, φ₋).
    pub fn rotation(&self) -> [[f64; 2]; 2] {
        let (s, c) = self.theta.sin_cos();
        [[c, -s], [s, c]]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_8};

    /// Independent oracle: eigenvalues of a real symmetric 2x2 matrix from
    /// the characteristic polynomial (trace/determinant route).
    fn eig2_symmetric(m: [[f64; 2]; 2]) -> (f64, f64) {
        let tr = m[0][0] + m[1][1];
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        let disc = (tr * tr - 4.0 * det).max(0.0).sqrt();
        (0.5 * (tr + disc), 0.5 * (tr - disc))
    }

    #[test]
    fn mixing_angle_resonance_is_pi_over_4() {
        assert_abs_diff_eq!(
            mixing_angle(0.0, 1.0, 0, 1.0).unwrap(),
            FRAC_PI_4,
            epsilon = 1e-15
        );
    }

    #[test]
    fn mixing_angle_outside_cavity_limits() {
        assert_abs_diff_eq!(
            mixing_angle(3.0, 1.0, 0, 0.0).unwrap(),
            FRAC_PI_2,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(mixing_angle(-3.0, 1.0, 0, 0.0).unwrap(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn mixing_angle_cot_one_gives_pi_over_8() {
        // δ = −2, Ω₀ = 2: cot 2θ = −δ/Ω₀ = 1, so θ = π/8.
        assert_abs_diff_eq!(
            mixing_angle(-2.0, 1.0, 0, 1.0).unwrap(),
            FRAC_PI_8,
            epsilon = 1e-15
        );
    }

    #[test]
    fn mixing_angle_degenerate_point_is_reported() {
        assert!(matches!(
            mixing_angle(0.0, 1.0, 0, 0.0),
            Err(Error::DegenerateFrame)
        ));
        assert_eq!(mixing_angle_or_bare(0.0, 1.0, 0, 0.0), 0.0);
    }

    #[test]
    fn mixing_angle_closed_forms_are_consistent() {
        // sin²2θ + cos²2θ = 1 with sin 2θ = Ωu/Λ and cos 2θ = −δ/Λ, and the
        // returned angle reproduces both closed forms.
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..500 {
            let delta: f64 = rng.gen_range(-6.0..6.0);
            let g: f64 = rng.gen_range(0.1..3.0);
            let n: u32 = rng.gen_range(0..6);
            let u: f64 = rng.gen_range(1e-3..1.5);
            let lambda = generalized_rabi(delta, g, n, u);
            let omega_u = 2.0 * g * ((n as f64) + 1.0).sqrt() * u;
            let s = omega_u / lambda;
            let c = -delta / lambda;
            assert_abs_diff_eq!(s * s + c * c, 1.0, epsilon = 1e-12);

            let theta = mixing_angle(delta, g, n, u).unwrap();
            assert!((0.0..=FRAC_PI_2).contains(&theta));
            assert_abs_diff_eq!((2.0 * theta).sin(), s, epsilon = 1e-12);
            assert_abs_diff_eq!((2.0 * theta).cos(), c, epsilon = 1e-12);
        }
    }

    #[test]
    fn mixing_angle_monotone_in_delta() {
        let deltas: Vec<f64> = (-60..=60).map(|i| i as f64 * 0.1).collect();
        let mut prev = -1.0;
        for d in deltas {
            let theta = mixing_angle(d, 1.0, 0, 0.7).unwrap();
            assert!(theta > prev, "θ must increase with δ at fixed u > 0");
            prev = theta;
        }
    }

    #[test]
    fn generalized_rabi_examples() {
        // 3-4-5 triangle: δ = 3, Ωu = 4.
        assert_abs_diff_eq!(generalized_rabi(3.0, 1.0, 0, 2.0), 5.0, epsilon = 1e-15);
        // Ω₀ = 2g sqrt(1) at resonance.
        assert_abs_diff_eq!(generalized_rabi(0.0, 1.0, 0, 1.0), 2.0, epsilon = 1e-15);
        // Λ = |δ| at u = 0.
        assert_abs_diff_eq!(generalized_rabi(2.0, 1.0, 0, 0.0), 2.0, epsilon = 1e-15);
    }

    #[test]
    fn generalized_rabi_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..200 {
            let delta: f64 = rng.gen_range(-5.0..5.0);
            let u: f64 = rng.gen_range(0.0..2.0);
            let lambda = generalized_rabi(delta, 1.3, 1, u);
            assert!(lambda >= delta.abs() - 1e-15);
            if u == 0.0 {
                assert_abs_diff_eq!(lambda, delta.abs(), epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn channel_energies_resonant_mesa() {
        let config = SystemConfig::new(1.0, 0.0, 0, 0.5, 10.0).unwrap();
        let (vp, vm) = channel_energies(&config, 1.0);
        assert_abs_diff_eq!(vp, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(vm, -1.0, epsilon = 1e-15);
    }

    #[test]
    fn channel_energies_bare_limits() {
        let config = SystemConfig::default().with_delta(2.0);
        let (vp, vm) = channel_energies(&config, 0.0);
        assert_abs_diff_eq!(vp, 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(vm, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn channel_energies_match_brute_force_diagonalization() {
        // Independent route: eigensolve of the interaction block
        // [[0, c], [c, δ]] in the offset-removed frame.
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..300 {
            let config = SystemConfig::new(
                rng.gen_range(0.1..2.5),
                rng.gen_range(-5.0..5.0),
                rng.gen_range(0..4),
                rng.gen_range(0.2..2.0),
                10.0,
            )
            .unwrap();
            let u: f64 = rng.gen_range(0.0..1.5);
            let c = config.coupling_at(u);
            let (vp, vm) = channel_energies(&config, u);
            let (e_hi, e_lo) = eig2_symmetric([[0.0, c], [c, config.delta]]);
            assert_abs_diff_eq!(vp, e_hi, epsilon = 1e-12);
            assert_abs_diff_eq!(vm, e_lo, epsilon = 1e-12);
        }

        // The δ = 3, u = 1 point: ((3+√13)/2, (3−√13)/2).
        let config = SystemConfig::default().with_delta(3.0);
        let (vp, vm) = channel_energies(&config, 1.0);
        let s13 = 13.0_f64.sqrt();
        assert_abs_diff_eq!(vp, 0.5 * (3.0 + s13), epsilon = 1e-14);
        assert_abs_diff_eq!(vm, 0.5 * (3.0 - s13), epsilon = 1e-14);
    }

    #[test]
    fn channel_energies_sum_and_gap_identities() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for _ in 0..300 {
            let config = SystemConfig::new(
                rng.gen_range(0.1..2.5),
                rng.gen_range(-5.0..5.0),
                rng.gen_range(0..4),
                0.5,
                10.0,
            )
            .unwrap();
            let u: f64 = rng.gen_range(0.0..1.5);
            let (vp, vm) = channel_energies(&config, u);
            let lambda = generalized_rabi(config.delta, config.g, config.n, u);
            assert_abs_diff_eq!(vp + vm, config.delta, epsilon = 1e-14);
            assert_abs_diff_eq!(vp - vm, lambda, epsilon = 1e-14);
        }
    }

    #[test]
    fn wavenumbers_energy_conservation() {
        let config = SystemConfig::new(1.0, 3.0, 0, 0.5, 10.0).unwrap();
        let w = asymptotic_wavenumbers(&config, 4.0).unwrap();
        assert_abs_diff_eq!(w.k_a, 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(w.k_b, 1.0, epsilon = 1e-15);
        assert!(w.b_open);
    }

    #[test]
    fn wavenumbers_evanescent_below_threshold() {
        let config = SystemConfig::new(1.0, 2.0, 0, 0.5, 10.0).unwrap();
        let w = asymptotic_wavenumbers(&config, 1.0).unwrap();
        assert_abs_diff_eq!(w.k_b, 1.0, epsilon = 1e-15);
        assert!(!w.b_open);
    }

    #[test]
    fn wavenumbers_acceleration_on_emission() {
        // Negative detuning accelerates the emitting atom: k_b > k_a.
        let config = SystemConfig::new(1.0, -5.0, 0, 0.5, 10.0).unwrap();
        let w = asymptotic_wavenumbers(&config, 4.0).unwrap();
        assert_abs_diff_eq!(w.k_a, 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(w.k_b, 3.0, epsilon = 1e-15);
        assert!(w.b_open);
    }

    #[test]
    fn wavenumbers_reject_nonpositive_energy() {
        let config = SystemConfig::default();
        assert!(asymptotic_wavenumbers(&config, 0.0).is_err());
        assert!(asymptotic_wavenumbers(&config, -1.0).is_err());
    }

    #[test]
    fn wavenumbers_potential_step_identity() {
        // k_b² − k_a² = −2mδ whenever both channels are open.
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        for _ in 0..300 {
            let config = SystemConfig::new(
                1.0,
                rng.gen_range(-5.0..5.0),
                0,
                rng.gen_range(0.2..2.0),
                10.0,
            )
            .unwrap();
            let e = rng.gen_range(0.1..30.0);
            let w = asymptotic_wavenumbers(&config, e).unwrap();
            if w.b_open {
                assert_abs_diff_eq!(
                    w.k_b * w.k_b - w.k_a * w.k_a,
                    -2.0 * config.m * config.delta,
                    epsilon = 1e-10
                );
            }
        }
    }

    #[test]
    fn dressed_frame_outside_cavity_values() {
        let config = SystemConfig::default().with_delta(3.0);
        let f = DressedFrame::new(&config, 0.0).unwrap();
        assert_abs_diff_eq!(f.theta, FRAC_PI_2, epsilon = 1e-15);
        assert_abs_diff_eq!(f.lambda_n, 3.0, epsilon = 1e-15);

        let config = config.with_delta(-3.0);
        let f = DressedFrame::new(&config, 0.0).unwrap();
        assert_abs_diff_eq!(f.theta, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn dressed_frame_rotation_is_orthogonal() {
        let config = SystemConfig::default().with_delta(1.7);
        let f = DressedFrame::new(&config, 0.8).unwrap();
        let r = f.rotation();
        // R^T R = I
        assert_abs_diff_eq!(r[0][0] * r[0][0] + r[1][0] * r[1][0], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r[0][1] * r[0][1] + r[1][1] * r[1][1], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r[0][0] * r[0][1] + r[1][0] * r[1][1], 0.0, epsilon = 1e-15);
    }

    #[test]
    fn mode_profile_mesa_is_single_segment() {
        let p = ModeProfile::mesa(10.0);
        assert_eq!(p.segments().len(), 1);
        assert_eq!(p.segments()[0].u, 1.0);
        assert_abs_diff_eq!(p.total_length(), 10.0, epsilon = 1e-15);
        assert_eq!(p.u_at(-1.0), 0.0);
        assert_eq!(p.u_at(5.0), 1.0);
        assert_eq!(p.u_at(10.5), 0.0);
    }

    #[test]
    fn mode_profile_rejects_bad_segments() {
        assert!(ModeProfile::from_segments(vec![]).is_err());
        assert!(ModeProfile::from_segments(vec![Segment { length: 0.0, u: 1.0 }]).is_err());
        assert!(ModeProfile::from_segments(vec![Segment {
            length: 1.0,
            u: -0.1
        }])
        .is_err());
    }

    #[test]
    fn mode_profile_length_must_match_config() {
        let config = SystemConfig::default(); // L = 10
        assert!(ModeProfile::mesa(10.0).validate_against(&config).is_ok());
        assert!(ModeProfile::mesa(9.0).validate_against(&config).is_err());
    }

    #[test]
    fn staircase_samples_midpoints() {
        let p = ModeProfile::staircase(|z| z, 1.0, 4).unwrap();
        let us: Vec<f64> = p.segments().iter().map(|s| s.u).collect();
        assert_abs_diff_eq!(us[0], 0.125, epsilon = 1e-15);
        assert_abs_diff_eq!(us[3], 0.875, epsilon = 1e-15);
    }

    #[test]
    fn config_rejects_bad_parameters() {
        assert!(SystemConfig::new(-1.0, 0.0, 0, 0.5, 10.0).is_err());
        assert!(SystemConfig::new(1.0, f64::NAN, 0, 0.5, 10.0).is_err());
        assert!(SystemConfig::new(1.0, 0.0, 0, 0.0, 10.0).is_err());
        assert!(SystemConfig::new(1.0, 0.0, 0, 0.5, -1.0).is_err());
        // κ = sqrt(2mg) = 1 for the defaults.
        assert_abs_diff_eq!(SystemConfig::default().kappa(), 1.0, epsilon = 1e-15);
    }
}
