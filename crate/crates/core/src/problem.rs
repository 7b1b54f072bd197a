//! Joint beamforming problem: maximize `|(h_rᴴ Θ G + h_dᴴ) w|²` subject to
//! `‖w‖² ≤ P_AP`, searched over the real vector `x = [ψ, φ, θ]` with
//! `w_m = ψ_m e^{jφ_m}` and the power constraint folded into the fitness as a
//! linear penalty.

use crate::channel::{ChannelSet, C64};
use crate::error::{Error, Result};
use crate::hho::{Bounds, Objective};
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

pub const DEFAULT_MU: f64 = 1.0;

/// Transmit beamformer and IRS phase shifts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeamformingSolution {
    pub w: Vec<C64>,
    pub theta: Vec<f64>,
}

impl BeamformingSolution {
    pub fn transmit_power(&self) -> f64 {
        norm_sqr(&self.w)
    }

    /// Diagonal of `Θ`.
    pub fn reflection(&self) -> Vec<C64> {
        self.theta.iter().map(|&t| C64::from_polar(1.0, t)).collect()
    }

    pub fn is_feasible(&self, p_ap: f64) -> bool {
        self.transmit_power() <= p_ap
    }

    /// Scales `w` down onto the power budget if it exceeds it.
    pub fn project_feasible(mut self, p_ap: f64) -> Self {
        let power = self.transmit_power();
        if power > p_ap {
            let s = (p_ap / power).sqrt();
            self.w.iter_mut().for_each(|z| *z *= s);
            // rounding can leave the norm a hair above the budget
            while self.transmit_power() > p_ap {
                self.w.iter_mut().for_each(|z| *z *= 1.0 - f64::EPSILON);
            }
        }
        self
    }
}

/// Real search vector split into magnitudes `ψ`, arguments `φ` and phases `θ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncodedSolution {
    pub psi: Vec<f64>,
    pub phi: Vec<f64>,
    pub theta: Vec<f64>,
}

impl EncodedSolution {
    pub fn from_slice(x: &[f64], m: usize, n: usize) -> Result<Self> {
        if x.len() != 2 * m + n {
            return Err(Error::DimensionMismatch {
                what: "encoded solution",
                expected: 2 * m + n,
                actual: x.len(),
            });
        }
        Ok(Self {
            psi: x[..m].to_vec(),
            phi: x[m..2 * m].to_vec(),
            theta: x[2 * m..].to_vec(),
        })
    }

    pub fn to_vec(&self) -> Vec<f64> {
        let mut x = Vec::with_capacity(2 * self.psi.len() + self.theta.len());
        x.extend_from_slice(&self.psi);
        x.extend_from_slice(&self.phi);
        x.extend_from_slice(&self.theta);
        x
    }

    pub fn decode(&self) -> Result<BeamformingSolution> {
        if self.phi.len() != self.psi.len() {
            return Err(Error::DimensionMismatch {
                what: "argument block",
                expected: self.psi.len(),
                actual: self.phi.len(),
            });
        }
        Ok(BeamformingSolution {
            w: self
                .psi
                .iter()
                .zip(&self.phi)
                .map(|(&r, &a)| C64::from_polar(r, a))
                .collect(),
            theta: self.theta.clone(),
        })
    }

    /// Polar form of `w` with arguments wrapped into `[0, 2π)`.
    pub fn encode(solution: &BeamformingSolution) -> Self {
        Self {
            psi: solution.w.iter().map(|z| z.norm()).collect(),
            phi: solution.w.iter().map(|z| wrap_phase(z.arg())).collect(),
            theta: solution.theta.iter().map(|&t| wrap_phase(t)).collect(),
        }
    }
}

/// Decodes `x = [ψ, φ, θ]` for `m` antennas and `n` elements.
pub fn decode(x: &[f64], m: usize, n: usize) -> Result<BeamformingSolution> {
    EncodedSolution::from_slice(x, m, n)?.decode()
}

pub fn wrap_phase(a: f64) -> f64 {
    let w = a.rem_euclid(TAU);
    // rem_euclid can return TAU itself for tiny negative inputs
    if w >= TAU {
        0.0
    } else {
        w
    }
}

pub fn norm_sqr(v: &[C64]) -> f64 {
    v.iter().map(C64::norm_sqr).sum()
}

/// Conjugated inner product `aᴴ b`.
pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Combined scalar gain `(h_rᴴ Θ G + h_dᴴ) w`.
pub fn combined_gain(channels: &ChannelSet, w: &[C64], theta: &[f64]) -> C64 {
    let direct = inner(&channels.h_d, w);
    let reflected: C64 = channels
        .h_r
        .iter()
        .zip(theta)
        .enumerate()
        .map(|(n, (h, &t))| {
            let gw: C64 = channels.g.row(n).iter().zip(w).map(|(g, x)| g * x).sum();
            h.conj() * C64::from_polar(1.0, t) * gw
        })
        .sum();
    direct + reflected
}

fn check_dims(channels: &ChannelSet, solution: &BeamformingSolution) -> Result<()> {
    if solution.w.len() != channels.m() {
        return Err(Error::DimensionMismatch {
            what: "beamformer",
            expected: channels.m(),
            actual: solution.w.len(),
        });
    }
    if solution.theta.len() != channels.n() {
        return Err(Error::DimensionMismatch {
            what: "phase shifts",
            expected: channels.n(),
            actual: solution.theta.len(),
        });
    }
    Ok(())
}

/// Received signal power `|(h_rᴴ Θ G + h_dᴴ) w|²` in watts.
pub fn received_power(channels: &ChannelSet, solution: &BeamformingSolution) -> Result<f64> {
    check_dims(channels, solution)?;
    Ok(combined_gain(channels, &solution.w, &solution.theta).norm_sqr())
}

/// Zero when `‖w‖² ≤ p_ap`, otherwise `−μ (‖w‖² − p_ap)`.
pub fn penalty(w: &[C64], p_ap: f64, mu: f64) -> f64 {
    let power = norm_sqr(w);
    if power <= p_ap {
        0.0
    } else {
        -mu * (power - p_ap)
    }
}

/// `10·log10(power / σ²)`; non-positive power maps to `-∞`.
pub fn snr_db(power_watts: f64, sigma2_watts: f64) -> f64 {
    assert!(sigma2_watts > 0.0, "noise power must be positive");
    if power_watts <= 0.0 {
        f64::NEG_INFINITY
    } else {
        10.0 * (power_watts / sigma2_watts).log10()
    }
}

/// A channel realization together with the power budget, noise power and
/// penalty factor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemInstance {
    pub channels: ChannelSet,
    pub p_ap: f64,
    pub sigma2: f64,
    pub mu: f64,
}

impl ProblemInstance {
    pub fn new(channels: ChannelSet, p_ap: f64, sigma2: f64, mu: f64) -> Result<Self> {
        for (name, v) in [("P_AP", p_ap), ("sigma2", sigma2), ("mu", mu)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        channels.validate()?;
        Ok(Self {
            channels,
            p_ap,
            sigma2,
            mu,
        })
    }

    pub fn m(&self) -> usize {
        self.channels.m()
    }

    pub fn n(&self) -> usize {
        self.channels.n()
    }

    /// Length of the search vector, `2M + N`.
    pub fn dim(&self) -> usize {
        2 * self.m() + self.n()
    }

    pub fn decode(&self, x: &[f64]) -> Result<BeamformingSolution> {
        decode(x, self.m(), self.n())
    }

    pub fn received_power(&self, solution: &BeamformingSolution) -> Result<f64> {
        received_power(&self.channels, solution)
    }

    /// Received power plus the power-budget penalty.
    pub fn fitness(&self, x: &[f64]) -> Result<f64> {
        let sol = self.decode(x)?;
        Ok(self.received_power(&sol)? + penalty(&sol.w, self.p_ap, self.mu))
    }

    /// `ψ ∈ [0, √P_AP]`, `φ ∈ [0, 2π]`, `θ ∈ [0, 2π]`.
    pub fn search_bounds(&self) -> Bounds {
        let (m, n) = (self.m(), self.n());
        let mut upper = vec![self.p_ap.sqrt(); m];
        upper.extend(std::iter::repeat_n(TAU, m + n));
        Bounds::new(vec![0.0; 2 * m + n], upper).expect("P_AP is positive")
    }

    /// Encodes `w = √P_AP h_d / ‖h_d‖` with all IRS phases at zero.
    pub fn mrt_seed(&self) -> Result<Vec<f64>> {
        let w = mrt(&self.channels.h_d, self.p_ap)?;
        let mut x = EncodedSolution::encode(&BeamformingSolution {
            w,
            theta: vec![0.0; self.n()],
        });
        // |w_m| can round a few ulps past √P_AP
        let cap = self.p_ap.sqrt();
        x.psi.iter_mut().for_each(|p| *p = p.min(cap));
        Ok(x.to_vec())
    }

    pub fn snr_db(&self, power_watts: f64) -> f64 {
        snr_db(power_watts, self.sigma2)
    }
}

impl Objective for ProblemInstance {
    fn evaluate(&self, x: &[f64]) -> f64 {
        let (m, n) = (self.m(), self.n());
        if x.len() != 2 * m + n {
            return f64::NEG_INFINITY;
        }
        let w: Vec<C64> = x[..m]
            .iter()
            .zip(&x[m..2 * m])
            .map(|(&r, &a)| C64::from_polar(r, a))
            .collect();
        combined_gain(&self.channels, &w, &x[2 * m..]).norm_sqr() + penalty(&w, self.p_ap, self.mu)
    }
}

/// Maximum-ratio beamformer `√p · h / ‖h‖` for the scalar channel `hᴴ w`.
pub fn mrt(h: &[C64], p: f64) -> Result<Vec<C64>> {
    let norm = norm_sqr(h).sqrt();
    if norm == 0.0 {
        return Err(Error::ZeroChannel);
    }
    let s = p.sqrt() / norm;
    Ok(h.iter().map(|z| z * s).collect())
}
