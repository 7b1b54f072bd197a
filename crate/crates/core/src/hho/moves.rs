//! Position-update rules of the optimizer.
//!
//! Each rule is a pure function of the positions involved and of the scalar
//! draws it consumes, so it can be exercised with hand-picked draws. All rules
//! clamp their output into the search box.

use super::{Bounds, LevyFlight, Objective};
use rand::Rng;

/// `2·E0·(1 − t/T)`.
#[inline]
pub fn escaping_energy(e0: f64, t: usize, max_iterations: usize) -> f64 {
    2.0 * e0 * (1.0 - t as f64 / max_iterations as f64)
}

/// Jump strength `J = 2(1 − r5)`.
#[inline]
pub fn jump_strength(r5: f64) -> f64 {
    2.0 * (1.0 - r5)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    Exploration,
    SoftBesiege,
    HardBesiege,
    SoftDive,
    HardDive,
}

impl Branch {
    pub const ALL: [Branch; 5] = [
        Branch::Exploration,
        Branch::SoftBesiege,
        Branch::HardBesiege,
        Branch::SoftDive,
        Branch::HardDive,
    ];

    /// Selects the update rule from escaping energy `e` and escape probability `r`.
    pub fn select(e: f64, r: f64) -> Branch {
        let energy = e.abs();
        if energy >= 1.0 {
            Branch::Exploration
        } else if r >= 0.5 {
            if energy >= 0.5 {
                Branch::SoftBesiege
            } else {
                Branch::HardBesiege
            }
        } else if energy >= 0.5 {
            Branch::SoftDive
        } else {
            Branch::HardDive
        }
    }
}

/// Uniform draws consumed by the exploration rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExplorationDraws {
    pub q: f64,
    pub r1: f64,
    pub r2: f64,
    pub r3: f64,
    pub r4: f64,
}

impl ExplorationDraws {
    pub fn sample<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Self {
            q: rng.random(),
            r1: rng.random(),
            r2: rng.random(),
            r3: rng.random(),
            r4: rng.random(),
        }
    }
}

/// Perching step used while `|E| ≥ 1`.
///
/// With `q ≥ 0.5` the hawk moves relative to a random peer, otherwise relative
/// to the rabbit and the population mean, offset by a random point of the box.
pub fn exploration_step(
    position: &[f64],
    random_peer: &[f64],
    mean_position: &[f64],
    rabbit: &[f64],
    bounds: &Bounds,
    draws: ExplorationDraws,
) -> Vec<f64> {
    let mut next: Vec<f64> = if draws.q >= 0.5 {
        random_peer
            .iter()
            .zip(position)
            .map(|(&xr, &x)| xr - draws.r1 * (xr - 2.0 * draws.r2 * x).abs())
            .collect()
    } else {
        rabbit
            .iter()
            .zip(mean_position)
            .zip(bounds.lower().iter().zip(bounds.upper()))
            .map(|((&xb, &xm), (&lb, &ub))| (xb - xm) - draws.r3 * (lb + draws.r4 * (ub - lb)))
            .collect()
    };
    bounds.clamp(&mut next);
    next
}

/// `ΔX − E·|J·X_rabbit − X|` with `ΔX = X_rabbit − X`.
pub fn soft_besiege(position: &[f64], rabbit: &[f64], e: f64, j: f64, bounds: &Bounds) -> Vec<f64> {
    let mut next: Vec<f64> = rabbit
        .iter()
        .zip(position)
        .map(|(&xb, &x)| (xb - x) - e * (j * xb - x).abs())
        .collect();
    bounds.clamp(&mut next);
    next
}

/// `X_rabbit − E·|X_rabbit − X|`.
pub fn hard_besiege(position: &[f64], rabbit: &[f64], e: f64, bounds: &Bounds) -> Vec<f64> {
    let mut next: Vec<f64> = rabbit
        .iter()
        .zip(position)
        .map(|(&xb, &x)| xb - e * (xb - x).abs())
        .collect();
    bounds.clamp(&mut next);
    next
}

/// Result of a progressive rapid dive.
#[derive(Debug, Clone, PartialEq)]
pub struct DiveOutcome {
    pub position: Vec<f64>,
    pub fitness: f64,
    pub evaluations: usize,
    pub accepted: DiveChoice,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiveChoice {
    Y,
    Z,
    Retained,
}

/// Progressive rapid dive around the rabbit.
///
/// `reference` is the hawk's own position for the soft variant and the
/// population mean for the hard variant. The probe `Y` is tried first, then
/// the Lévy-perturbed `Z`; a probe is accepted only if it strictly beats
/// `fitness`, otherwise the hawk stays where it is.
#[allow(clippy::too_many_arguments)]
pub fn dive_step<O, R>(
    position: &[f64],
    fitness: f64,
    rabbit: &[f64],
    reference: &[f64],
    e: f64,
    j: f64,
    objective: &O,
    bounds: &Bounds,
    levy: &LevyFlight,
    rng: &mut R,
) -> DiveOutcome
where
    O: Objective + ?Sized,
    R: Rng + ?Sized,
{
    let mut y: Vec<f64> = rabbit
        .iter()
        .zip(reference)
        .map(|(&xb, &xr)| xb - e * (j * xb - xr).abs())
        .collect();
    bounds.clamp(&mut y);
    let fy = objective.evaluate(&y);
    if fy > fitness {
        return DiveOutcome {
            position: y,
            fitness: fy,
            evaluations: 1,
            accepted: DiveChoice::Y,
        };
    }

    let mut z: Vec<f64> = y
        .iter()
        .map(|&yi| {
            let v: f64 = rng.random();
            yi + v * levy.sample(rng)
        })
        .collect();
    bounds.clamp(&mut z);
    let fz = objective.evaluate(&z);
    if fz > fitness {
        return DiveOutcome {
            position: z,
            fitness: fz,
            evaluations: 2,
            accepted: DiveChoice::Z,
        };
    }

    DiveOutcome {
        position: position.to_vec(),
        fitness,
        evaluations: 2,
        accepted: DiveChoice::Retained,
    }
}
