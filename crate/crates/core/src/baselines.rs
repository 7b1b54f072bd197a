//! Reference solvers: MRT without the IRS, alternating optimization, the
//! single-antenna closed form, and grid search over quantized phases.

use crate::channel::{ChannelSet, C64};
use crate::error::{Error, Result};
use crate::problem::{combined_gain, inner, mrt, norm_sqr, wrap_phase};
use serde::Serialize;
use std::f64::consts::TAU;

pub const DEFAULT_AO_TOL: f64 = 1e-8;
pub const DEFAULT_AO_MAX_ITER: usize = 1000;
/// Largest amount of work `brute_force` will take on.
pub const ENUMERATION_LIMIT: u128 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BaselineResult {
    pub scheme: &'static str,
    pub w: Vec<C64>,
    /// Empty when the scheme does not use the IRS.
    pub theta: Vec<f64>,
    pub power: f64,
    pub iterations: usize,
    /// Received power before the first round and after each round.
    pub trace: Vec<f64>,
}

/// MRT on the direct link, IRS absent.
pub fn no_irs(channels: &ChannelSet, p_ap: f64) -> Result<BaselineResult> {
    let w = mrt(&channels.h_d, p_ap)?;
    let power = inner(&channels.h_d, &w).norm_sqr();
    Ok(BaselineResult {
        scheme: "no-irs",
        w,
        theta: Vec::new(),
        power,
        iterations: 0,
        trace: Vec::new(),
    })
}

/// Reflected contributions `conj(h_{r,n}) (G w)_n`, one per element.
pub fn reflected_terms(channels: &ChannelSet, w: &[C64]) -> Vec<C64> {
    let gw = if channels.n() == 0 {
        Vec::new()
    } else {
        channels.g.mul_vec(w)
    };
    channels
        .h_r
        .iter()
        .zip(gw)
        .map(|(h, x)| h.conj() * x)
        .collect()
}

/// Phases that rotate every reflected term onto the direct term's phase.
/// Terms of zero magnitude get phase 0.
pub fn optimal_phases_given_w(channels: &ChannelSet, w: &[C64]) -> Vec<f64> {
    let direct = inner(&channels.h_d, w);
    let target = if direct.norm_sqr() > 0.0 { direct.arg() } else { 0.0 };
    reflected_terms(channels, w)
        .into_iter()
        .map(|t| {
            if t.norm_sqr() > 0.0 {
                wrap_phase(target - t.arg())
            } else {
                0.0
            }
        })
        .collect()
}

/// Effective channel `h_eff = Gᴴ Θᴴ h_r + h_d`, so that the received gain is `h_effᴴ w`.
pub fn effective_channel(channels: &ChannelSet, theta: &[f64]) -> Vec<C64> {
    let mut h = channels.h_d.clone();
    for (n, (hr, &t)) in channels.h_r.iter().zip(theta).enumerate() {
        let coef = C64::from_polar(1.0, -t) * hr;
        for (hm, g) in h.iter_mut().zip(channels.g.row(n)) {
            *hm += g.conj() * coef;
        }
    }
    h
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AoOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for AoOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_AO_TOL,
            max_iter: DEFAULT_AO_MAX_ITER,
        }
    }
}

/// Alternates phase alignment for fixed `w` with MRT for fixed `θ` until the
/// relative power gain of a round drops below `tol`.
pub fn alternating_optimize(
    channels: &ChannelSet,
    p_ap: f64,
    options: AoOptions,
) -> Result<BaselineResult> {
    if !(options.tol > 0.0) {
        return Err(Error::Config(format!("tolerance must be positive, got {}", options.tol)));
    }
    let m = channels.m();
    let mut theta = vec![0.0; channels.n()];
    let mut w = match mrt(&channels.h_d, p_ap) {
        Ok(w) => w,
        Err(_) => match mrt(&effective_channel(channels, &theta), p_ap) {
            Ok(w) => w,
            Err(_) => {
                let mut w = vec![C64::new(0.0, 0.0); m];
                if let Some(first) = w.first_mut() {
                    *first = C64::new(p_ap.sqrt(), 0.0);
                }
                w
            }
        },
    };
    let mut power = combined_gain(channels, &w, &theta).norm_sqr();
    let mut trace = vec![power];
    let mut iterations = 0;

    while iterations < options.max_iter {
        theta = optimal_phases_given_w(channels, &w);
        let h_eff = effective_channel(channels, &theta);
        if let Ok(next) = mrt(&h_eff, p_ap) {
            w = next;
        }
        let next_power = combined_gain(channels, &w, &theta).norm_sqr();
        iterations += 1;
        debug_assert!(
            next_power >= power * (1.0 - 1e-12),
            "alternating optimization decreased power: {power} -> {next_power}"
        );
        let gain = if power > 0.0 {
            (next_power - power) / power
        } else {
            f64::INFINITY
        };
        power = next_power;
        trace.push(next_power);
        if gain < options.tol {
            break;
        }
    }

    Ok(BaselineResult {
        scheme: "ao",
        power: combined_gain(channels, &w, &theta).norm_sqr(),
        w,
        theta,
        iterations,
        trace,
    })
}

/// Global optimum for a single transmit antenna:
/// `p_ap (|h_d| + Σ |h_{r,n}| |g_n|)²`.
pub fn closed_form_optimum_m1(channels: &ChannelSet, p_ap: f64) -> Result<f64> {
    if channels.m() != 1 {
        return Err(Error::RequiresSingleAntenna(channels.m()));
    }
    let reflected: f64 = channels
        .h_r
        .iter()
        .enumerate()
        .map(|(n, h)| h.norm() * channels.g.get(n, 0).norm())
        .sum();
    Ok(p_ap * (channels.h_d[0].norm() + reflected).powi(2))
}

/// Full-power beamformers on the search grid: a single `√p` for one antenna;
/// for two antennas, power split `s/L` (s = 0..=L) and a relative phase
/// `2πk/L` on the second antenna. The first antenna's phase is fixed at 0,
/// which loses nothing since the received power ignores a common phase.
fn beamformer_grid(m: usize, p_ap: f64, levels: usize) -> Result<Vec<Vec<C64>>> {
    let amp = p_ap.sqrt();
    match m {
        1 => Ok(vec![vec![C64::new(amp, 0.0)]]),
        2 => {
            let mut grid = Vec::with_capacity((levels + 1) * levels);
            for s in 0..=levels {
                let a = s as f64 / levels as f64;
                for k in 0..levels {
                    grid.push(vec![
                        C64::new(amp * a.sqrt(), 0.0),
                        C64::from_polar(amp * (1.0 - a).sqrt(), TAU * k as f64 / levels as f64),
                    ]);
                }
            }
            Ok(grid)
        }
        0 => Err(Error::Config("no transmit antennas".into())),
        actual => Err(Error::TooManyAntennas { max: 2, actual }),
    }
}

fn check_levels(levels: usize) -> Result<()> {
    if levels == 0 {
        return Err(Error::Config("phase_levels must be at least 1".into()));
    }
    Ok(())
}

fn grid_phase(k: usize, levels: usize) -> C64 {
    C64::from_polar(1.0, TAU * k as f64 / levels as f64)
}

/// Exact maximum of `|a + Σ b_n e^{j 2π k_n / L}|²` over all `k ∈ {0..L}^N`.
///
/// At an optimum `s*`, every term must maximize its projection onto
/// `arg(s*)`, otherwise switching that term would lengthen `s`. So it is
/// enough to sweep a common direction `α` over the circle: the projection
/// maximizing choice of `k_n` only changes at `N·L` breakpoints, and one
/// representative per arc between breakpoints covers every candidate.
pub fn quantized_phase_max(a: C64, b: &[C64], levels: usize) -> f64 {
    let all_zero: C64 = a + b.iter().sum::<C64>();
    let mut best = all_zero.norm_sqr();
    if levels == 1 {
        return best;
    }
    let step = TAU / levels as f64;
    let mut breaks: Vec<f64> = b
        .iter()
        .filter(|z| z.norm_sqr() > 0.0)
        .flat_map(|z| {
            let base = z.arg();
            (0..levels).map(move |k| (base + step * (k as f64 + 0.5)).rem_euclid(TAU))
        })
        .collect();
    if breaks.is_empty() {
        return best;
    }
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    for (i, &lo) in breaks.iter().enumerate() {
        let hi = breaks.get(i + 1).copied().unwrap_or(breaks[0] + TAU);
        let alpha = 0.5 * (lo + hi);
        let s: C64 = a + b
            .iter()
            .map(|z| {
                if z.norm_sqr() == 0.0 {
                    return *z;
                }
                let k = ((alpha - z.arg()) / step).round().rem_euclid(levels as f64) as usize;
                z * grid_phase(k % levels, levels)
            })
            .sum::<C64>();
        best = best.max(s.norm_sqr());
    }
    best
}

/// Best received power over full-power beamformers and IRS phases on a grid
/// with `phase_levels` points per phase (M ≤ 2). A lower bound on the true
/// optimum that tightens as the grid is refined.
pub fn brute_force(channels: &ChannelSet, p_ap: f64, phase_levels: usize) -> Result<f64> {
    check_levels(phase_levels)?;
    let grid = beamformer_grid(channels.m(), p_ap, phase_levels)?;
    let per_w = (channels.n() as u128 * phase_levels as u128).max(1);
    let work = grid.len() as u128 * per_w;
    if work > ENUMERATION_LIMIT {
        return Err(Error::EnumerationLimit {
            candidates: work,
            limit: ENUMERATION_LIMIT,
        });
    }
    Ok(grid
        .iter()
        .map(|w| {
            let a = inner(&channels.h_d, w);
            quantized_phase_max(a, &reflected_terms(channels, w), phase_levels)
        })
        .fold(0.0, f64::max))
}

/// Same grid as [`brute_force`], enumerated point by point.
pub fn brute_force_exhaustive(channels: &ChannelSet, p_ap: f64, phase_levels: usize) -> Result<f64> {
    check_levels(phase_levels)?;
    let grid = beamformer_grid(channels.m(), p_ap, phase_levels)?;
    let n = channels.n();
    let candidates = grid.len() as u128 * (phase_levels as u128).pow(n as u32);
    if candidates > ENUMERATION_LIMIT {
        return Err(Error::EnumerationLimit {
            candidates,
            limit: ENUMERATION_LIMIT,
        });
    }
    let phasors: Vec<C64> = (0..phase_levels).map(|k| grid_phase(k, phase_levels)).collect();
    let mut best = 0.0f64;
    for w in &grid {
        let a = inner(&channels.h_d, w);
        let b = reflected_terms(channels, w);
        let mut ks = vec![0usize; n];
        loop {
            let s: C64 = a + b.iter().zip(&ks).map(|(z, &k)| z * phasors[k]).sum::<C64>();
            best = best.max(s.norm_sqr());
            // odometer increment
            let mut i = 0;
            while i < n {
                ks[i] += 1;
                if ks[i] < phase_levels {
                    break;
                }
                ks[i] = 0;
                i += 1;
            }
            if i == n {
                break;
            }
        }
    }
    Ok(best)
}

/// Transmit power of a baseline's beamformer, for feasibility checks.
pub fn transmit_power(result: &BaselineResult) -> f64 {
    norm_sqr(&result.w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::CMatrix;
    use crate::rng::substream;
    use rand::Rng;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn random_channels(m: usize, n: usize, seed: u64) -> ChannelSet {
        let mut rng = substream(seed, &[]);
        let mut z = || c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let h_d = (0..m).map(|_| z()).collect();
        let g = CMatrix::from_fn(n, m, |_, _| z());
        let h_r = (0..n).map(|_| z()).collect();
        ChannelSet::new(h_d, g, h_r).unwrap()
    }

    #[test]
    fn no_irs_examples() {
        let ch = ChannelSet::new(vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)], CMatrix::zeros(0, 0), vec![]).unwrap();
        let r = no_irs(&ch, 1.0).unwrap();
        assert!((r.power - 1.0).abs() < 1e-15);
        assert!(r.theta.is_empty());

        let ch = random_channels(2, 0, 1);
        let base = no_irs(&ch, 0.5).unwrap().power;
        // 2×2 unitary: rotation times phase
        let (s, k) = (0.3f64.sin(), 0.3f64.cos());
        let u = C64::from_polar(1.0, 1.1);
        let h = &ch.h_d;
        let rotated = vec![u * (h[0] * k - h[1] * s), u * (h[0] * s + h[1] * k)];
        let ch2 = ChannelSet::new(rotated, CMatrix::zeros(0, 0), vec![]).unwrap();
        assert!((no_irs(&ch2, 0.5).unwrap().power - base).abs() < 1e-12 * base);

        let mut rng = substream(2, &[]);
        for _ in 0..100 {
            let w: Vec<C64> = (0..2).map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
            let w = mrt(&w, 0.5 * rng.random::<f64>()).unwrap();
            assert!(inner(&ch.h_d, &w).norm_sqr() <= base * (1.0 + 1e-12));
        }

        let dead = ChannelSet::new(vec![c(0.0, 0.0)], CMatrix::zeros(0, 0), vec![]).unwrap();
        assert!(matches!(no_irs(&dead, 1.0), Err(Error::ZeroChannel)));
    }

    #[test]
    fn phases_already_aligned() {
        let ch = ChannelSet::new(
            vec![c(2.0, 0.0)],
            CMatrix::from_rows(vec![vec![c(1.0, 0.0)], vec![c(0.5, 0.0)]]).unwrap(),
            vec![c(1.0, 0.0), c(3.0, 0.0)],
        )
        .unwrap();
        assert_eq!(optimal_phases_given_w(&ch, &[c(1.0, 0.0)]), vec![0.0, 0.0]);
    }

    #[test]
    fn phase_flip_for_opposing_term() {
        let ch = ChannelSet::new(
            vec![c(1.0, 0.0)],
            CMatrix::from_rows(vec![vec![c(-1.0, 0.0)]]).unwrap(),
            vec![c(1.0, 0.0)],
        )
        .unwrap();
        let theta = optimal_phases_given_w(&ch, &[c(1.0, 0.0)]);
        assert!((theta[0] - PI).abs() < 1e-12);
        assert!((combined_gain(&ch, &[c(1.0, 0.0)], &theta).norm() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn aligned_phases_reach_triangle_bound() {
        for seed in 0..20 {
            let ch = random_channels(3, 6, seed);
            let w = vec![c(0.2, -0.4), c(1.0, 0.1), c(-0.3, 0.3)];
            let theta = optimal_phases_given_w(&ch, &w);
            let bound = inner(&ch.h_d, &w).norm()
                + reflected_terms(&ch, &w).iter().map(|t| t.norm()).sum::<f64>();
            let got = combined_gain(&ch, &w, &theta).norm();
            assert!((got - bound).abs() < 1e-9 * bound);
        }
    }

    #[test]
    fn zero_reflected_term_gets_zero_phase() {
        let ch = ChannelSet::new(
            vec![c(0.0, 1.0)],
            CMatrix::from_rows(vec![vec![c(0.0, 0.0)], vec![c(1.0, 0.0)]]).unwrap(),
            vec![c(1.0, 0.0), c(0.0, 0.0)],
        )
        .unwrap();
        assert_eq!(optimal_phases_given_w(&ch, &[c(1.0, 0.0)]), vec![0.0, 0.0]);
    }

    #[test]
    fn ao_without_irs_is_mrt() {
        let ch = random_channels(4, 0, 3);
        let ao = alternating_optimize(&ch, 2.0, AoOptions::default()).unwrap();
        let base = no_irs(&ch, 2.0).unwrap();
        assert!((ao.power - base.power).abs() < 1e-12 * base.power);
        assert!(ao.theta.is_empty());
    }

    #[test]
    fn ao_is_monotone_and_feasible() {
        for seed in 0..30 {
            let ch = random_channels(4, 12, seed);
            let ao = alternating_optimize(&ch, 0.7, AoOptions::default()).unwrap();
            for pair in ao.trace.windows(2) {
                assert!(pair[1] >= pair[0] * (1.0 - 1e-12), "{pair:?}");
            }
            assert!(transmit_power(&ao) <= 0.7 * (1.0 + 1e-9));
            assert!(ao.power >= no_irs(&ch, 0.7).unwrap().power * (1.0 - 1e-12));
            assert!(ao.iterations >= 1 && ao.iterations <= DEFAULT_AO_MAX_ITER);
        }
    }

    #[test]
    fn ao_rejects_bad_tolerance() {
        let ch = random_channels(1, 1, 0);
        assert!(alternating_optimize(&ch, 1.0, AoOptions { tol: 0.0, max_iter: 5 }).is_err());
    }

    #[test]
    fn ao_exact_for_single_antenna() {
        for n in 0..=3 {
            for seed in 0..10 {
                let ch = random_channels(1, n, 100 + seed);
                let opt = closed_form_optimum_m1(&ch, 0.3).unwrap();
                let ao = alternating_optimize(&ch, 0.3, AoOptions::default()).unwrap();
                assert!(((ao.power - opt) / opt).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn closed_form_examples() {
        let ch = ChannelSet::new(
            vec![c(1.0, 0.0)],
            CMatrix::from_rows(vec![vec![c(0.0, 1.0)]]).unwrap(),
            vec![c(1.0, 0.0)],
        )
        .unwrap();
        assert!((closed_form_optimum_m1(&ch, 1.0).unwrap() - 4.0).abs() < 1e-12);

        let ch = ChannelSet::new(
            vec![c(0.6, 0.8)],
            CMatrix::from_rows(vec![vec![c(3.0, 1.0)], vec![c(1.0, 1.0)]]).unwrap(),
            vec![c(0.0, 0.0); 2],
        )
        .unwrap();
        assert!((closed_form_optimum_m1(&ch, 2.5).unwrap() - 2.5).abs() < 1e-12);

        let ch = random_channels(2, 2, 0);
        assert!(matches!(closed_form_optimum_m1(&ch, 1.0), Err(Error::RequiresSingleAntenna(2))));
    }

    #[test]
    fn brute_force_close_to_closed_form() {
        for seed in 0..10 {
            let ch = random_channels(1, 2, 200 + seed);
            let opt = closed_form_optimum_m1(&ch, 1.0).unwrap();
            let bf = brute_force(&ch, 1.0, 64).unwrap();
            assert!(bf <= opt * (1.0 + 1e-12));
            assert!(bf >= opt * 0.995, "{bf} vs {opt}");
        }
    }

    #[test]
    fn single_level_is_zero_phase_power() {
        let ch = random_channels(1, 4, 7);
        let w = [c(2f64.sqrt(), 0.0)];
        let zero = combined_gain(&ch, &w, &[0.0; 4]).norm_sqr();
        assert_eq!(brute_force(&ch, 2.0, 1).unwrap(), zero);
        assert_eq!(brute_force_exhaustive(&ch, 2.0, 1).unwrap(), zero);
    }

    #[test]
    fn nested_grids_are_monotone() {
        for seed in 0..10 {
            for m in [1, 2] {
                let ch = random_channels(m, 3, 300 + seed);
                let mut prev = 0.0;
                for levels in [1, 2, 4, 8, 16, 32] {
                    let p = brute_force(&ch, 1.0, levels).unwrap();
                    assert!(p >= prev * (1.0 - 1e-12), "L={levels}: {p} < {prev}");
                    prev = p;
                }
            }
        }
    }

    #[test]
    fn sweep_matches_exhaustive_enumeration() {
        for seed in 0..40 {
            for (m, n, levels) in [(1, 1, 3), (1, 3, 8), (2, 2, 4), (1, 4, 5), (2, 3, 3), (1, 0, 4)] {
                let ch = random_channels(m, n, 400 + seed);
                let fast = brute_force(&ch, 1.3, levels).unwrap();
                let slow = brute_force_exhaustive(&ch, 1.3, levels).unwrap();
                assert!((fast - slow).abs() <= 1e-12 * slow, "m={m} n={n} L={levels}: {fast} vs {slow}");
            }
        }
    }

    #[test]
    fn brute_force_is_a_lower_bound_for_two_antennas() {
        for seed in 0..10 {
            let ch = random_channels(2, 3, 500 + seed);
            let ao = alternating_optimize(&ch, 1.0, AoOptions::default()).unwrap();
            let bf = brute_force(&ch, 1.0, 16).unwrap();
            // AO is only locally optimal, so compare against the fine grid loosely
            assert!(bf <= ao.power * 1.05);
            assert!(bf >= ao.power * 0.9);
        }
    }

    #[test]
    fn brute_force_guards() {
        let ch = random_channels(3, 2, 0);
        assert!(matches!(brute_force(&ch, 1.0, 4), Err(Error::TooManyAntennas { .. })));
        let ch = random_channels(1, 12, 0);
        assert!(matches!(brute_force_exhaustive(&ch, 1.0, 64), Err(Error::EnumerationLimit { .. })));
        assert!(brute_force(&ch, 1.0, 64).is_ok());
        assert!(brute_force(&ch, 1.0, 0).is_err());
    }
}
