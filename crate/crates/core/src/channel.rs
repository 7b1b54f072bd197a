//! Channel realizations for the AP → user, AP → IRS and IRS → user links.
//!
//! Powers are linear watts internally; dB quantities only appear in the link
//! parameters and in the unit helpers below.

use crate::error::{Error, Result};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

pub type C64 = Complex64;

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    db_to_linear(dbm - 30.0)
}

pub fn watts_to_dbm(w: f64) -> f64 {
    linear_to_db(w) + 30.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance_to(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Horizontal position of the IRS in the reference layout.
pub const REFERENCE_IRS_X: f64 = 51.0;
/// Vertical offset of the user's track in the reference layout.
pub const REFERENCE_USER_Y: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Geometry {
    pub ap: Point,
    pub irs: Point,
    pub user: Point,
}

impl Geometry {
    pub fn new(ap: Point, irs: Point, user: Point) -> Result<Self> {
        for d in [ap.distance_to(&irs), ap.distance_to(&user), irs.distance_to(&user)] {
            if !(d > 0.0) {
                return Err(Error::NonPositiveDistance(d));
            }
        }
        Ok(Self { ap, irs, user })
    }

    /// AP at the origin, IRS at (51, 0), user at (d, 2).
    pub fn reference(d: f64) -> Result<Self> {
        Self::new(
            Point::new(0.0, 0.0),
            Point::new(REFERENCE_IRS_X, 0.0),
            Point::new(d, REFERENCE_USER_Y),
        )
    }

    pub fn ap_user(&self) -> f64 {
        self.ap.distance_to(&self.user)
    }

    pub fn ap_irs(&self) -> f64 {
        self.ap.distance_to(&self.irs)
    }

    pub fn irs_user(&self) -> f64 {
        self.irs.distance_to(&self.user)
    }
}

/// Log-distance link budget: reference loss at 1 m, exponent, extra
/// penetration loss and antenna gains at both ends.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkParams {
    pub reference_loss_db: f64,
    pub pathloss_exponent: f64,
    pub penetration_loss_db: f64,
    pub tx_gain_dbi: f64,
    pub rx_gain_dbi: f64,
}

impl LinkParams {
    pub fn new(reference_loss_db: f64, pathloss_exponent: f64) -> Self {
        Self {
            reference_loss_db,
            pathloss_exponent,
            penetration_loss_db: 0.0,
            tx_gain_dbi: 0.0,
            rx_gain_dbi: 0.0,
        }
    }

    pub fn with_penetration(mut self, db: f64) -> Self {
        self.penetration_loss_db = db;
        self
    }

    pub fn with_gains(mut self, tx_dbi: f64, rx_dbi: f64) -> Self {
        self.tx_gain_dbi = tx_dbi;
        self.rx_gain_dbi = rx_dbi;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.reference_loss_db >= 0.0) {
            return Err(Error::Config(format!(
                "reference loss must be non-negative, got {} dB",
                self.reference_loss_db
            )));
        }
        if !(self.pathloss_exponent >= 1.0) {
            return Err(Error::Config(format!(
                "path-loss exponent must be at least 1, got {}",
                self.pathloss_exponent
            )));
        }
        if !(self.penetration_loss_db >= 0.0) {
            return Err(Error::Config(format!(
                "penetration loss must be non-negative, got {} dB",
                self.penetration_loss_db
            )));
        }
        Ok(())
    }
}

/// Linear power gain of a link at `distance_m`.
pub fn path_gain_linear(distance_m: f64, params: &LinkParams) -> Result<f64> {
    if !(distance_m > 0.0) {
        return Err(Error::NonPositiveDistance(distance_m));
    }
    let fixed_db = params.reference_loss_db + params.penetration_loss_db
        - params.tx_gain_dbi
        - params.rx_gain_dbi;
    Ok(db_to_linear(-fixed_db) * distance_m.powf(-params.pathloss_exponent))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LosMode {
    /// Rank-one product of array responses with angles from the geometry.
    #[default]
    ArrayResponse,
    /// Rank-one product of unit-modulus vectors with uniformly random phases.
    RandomPhase,
}

/// Per-link parameters for a full channel realization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    pub ap_user: LinkParams,
    pub ap_irs: LinkParams,
    pub irs_user: LinkParams,
    pub los_mode: LosMode,
}

pub const DEFAULT_REFERENCE_LOSS_DB: f64 = 30.0;
pub const DEFAULT_PENETRATION_LOSS_DB: f64 = 10.0;
pub const DEFAULT_IRS_ELEMENT_GAIN_DBI: f64 = 5.0;
pub const DEFAULT_EXPONENT_AP_USER: f64 = 3.5;
pub const DEFAULT_EXPONENT_AP_IRS: f64 = 2.2;
pub const DEFAULT_EXPONENT_IRS_USER: f64 = 2.8;

impl ChannelParams {
    /// Reference link budget with the given path-loss exponents
    /// (AP–user, AP–IRS, IRS–user).
    pub fn with_exponents(ap_user: f64, ap_irs: f64, irs_user: f64) -> Self {
        Self {
            ap_user: LinkParams::new(DEFAULT_REFERENCE_LOSS_DB, ap_user)
                .with_penetration(DEFAULT_PENETRATION_LOSS_DB),
            ap_irs: LinkParams::new(DEFAULT_REFERENCE_LOSS_DB, ap_irs),
            // element gain counted once, on the reflecting side of the second hop
            irs_user: LinkParams::new(DEFAULT_REFERENCE_LOSS_DB, irs_user)
                .with_penetration(DEFAULT_PENETRATION_LOSS_DB)
                .with_gains(DEFAULT_IRS_ELEMENT_GAIN_DBI, 0.0),
            los_mode: LosMode::ArrayResponse,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.ap_user.validate()?;
        self.ap_irs.validate()?;
        self.irs_user.validate()
    }
}

impl Default for ChannelParams {
    fn default() -> Self {
        Self::with_exponents(
            DEFAULT_EXPONENT_AP_USER,
            DEFAULT_EXPONENT_AP_IRS,
            DEFAULT_EXPONENT_IRS_USER,
        )
    }
}

/// Rectangular reflecting array of `nx × ny` elements, indexed row-major
/// (`n = ix·ny + iy`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IrsLayout {
    pub nx: usize,
    pub ny: usize,
}

impl IrsLayout {
    pub const fn new(nx: usize, ny: usize) -> Self {
        Self { nx, ny }
    }

    pub const fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub const fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<C64>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch {
                what: "matrix row",
                expected: cols,
                actual: bad.len(),
            });
        }
        let n = rows.len();
        Ok(Self {
            rows: n,
            cols,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.data[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[C64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn iter(&self) -> impl Iterator<Item = &C64> {
        self.data.iter()
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.cols, "matrix-vector dimension mismatch");
        (0..self.rows)
            .map(|r| self.row(r).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn frobenius_norm_sqr(&self) -> f64 {
        self.data.iter().map(C64::norm_sqr).sum()
    }

    fn to_rows(&self) -> Vec<Vec<C64>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }
}

impl Serialize for CMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_rows().serialize(s)
    }
}

impl<'de> Deserialize<'de> for CMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<C64>>::deserialize(d)?;
        CMatrix::from_rows(rows).map_err(serde::de::Error::custom)
    }
}

/// `h_d` (AP → user, length M), `G` (AP → IRS, N × M), `h_r` (IRS → user, length N).
///
/// The received baseband gain for beamformer `w` and phases `θ` is
/// `(h_rᴴ Θ G + h_dᴴ) w`. In JSON every complex number is an `[re, im]` pair
/// and `g` is a list of rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelSet {
    pub h_d: Vec<C64>,
    pub g: CMatrix,
    pub h_r: Vec<C64>,
}

impl ChannelSet {
    pub fn new(h_d: Vec<C64>, g: CMatrix, h_r: Vec<C64>) -> Result<Self> {
        let set = Self { h_d, g, h_r };
        set.validate()?;
        Ok(set)
    }

    /// Transmit antennas.
    pub fn m(&self) -> usize {
        self.h_d.len()
    }

    /// Reflecting elements.
    pub fn n(&self) -> usize {
        self.h_r.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.g.rows() != self.n() {
            return Err(Error::DimensionMismatch {
                what: "G rows vs h_r",
                expected: self.n(),
                actual: self.g.rows(),
            });
        }
        if self.n() > 0 && self.g.cols() != self.m() {
            return Err(Error::DimensionMismatch {
                what: "G columns vs h_d",
                expected: self.m(),
                actual: self.g.cols(),
            });
        }
        let finite = self
            .h_d
            .iter()
            .chain(self.g.iter())
            .chain(&self.h_r)
            .all(|z| z.re.is_finite() && z.im.is_finite());
        if !finite {
            return Err(Error::Config("channel contains non-finite entries".into()));
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let set: ChannelSet = serde_json::from_str(s)?;
        set.validate()?;
        Ok(set)
    }
}

/// One circularly-symmetric complex Gaussian with `E|z|² = power`.
fn complex_gaussian<R: Rng + ?Sized>(power: f64, rng: &mut R) -> C64 {
    let s = (power / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(s * re, s * im)
}

pub fn rayleigh_vector<R: Rng + ?Sized>(len: usize, power_gain: f64, rng: &mut R) -> Vec<C64> {
    assert!(power_gain >= 0.0, "power gain must be non-negative, got {power_gain}");
    (0..len).map(|_| complex_gaussian(power_gain, rng)).collect()
}

/// i.i.d. `CN(0, power_gain)` entries.
pub fn rayleigh_matrix<R: Rng + ?Sized>(
    rows: usize,
    cols: usize,
    power_gain: f64,
    rng: &mut R,
) -> CMatrix {
    assert!(power_gain >= 0.0, "power gain must be non-negative, got {power_gain}");
    CMatrix::from_fn(rows, cols, |_, _| complex_gaussian(power_gain, rng))
}

/// Half-wavelength ULA response, `a[k] = exp(jπ k sin φ)`, with `φ` measured
/// from broadside.
pub fn ula_response(len: usize, angle: f64) -> Vec<C64> {
    let step = PI * angle.sin();
    (0..len).map(|k| C64::from_polar(1.0, step * k as f64)).collect()
}

/// Half-wavelength planar response for a wall along the x axis. `azimuth` is
/// the arrival direction in the horizontal plane; elevation is zero in the
/// planar geometry, so the vertical index contributes no phase.
pub fn upa_response(layout: IrsLayout, azimuth: f64) -> Vec<C64> {
    let ux = azimuth.cos();
    let uz = 0.0;
    let mut a = Vec::with_capacity(layout.len());
    for ix in 0..layout.nx {
        for iy in 0..layout.ny {
            a.push(C64::from_polar(1.0, PI * (ix as f64 * ux + iy as f64 * uz)));
        }
    }
    a
}

/// Rank-one line-of-sight AP → IRS channel `√p · a_r a_tᴴ`.
pub fn los_matrix<R: Rng + ?Sized>(
    layout: IrsLayout,
    m: usize,
    power_gain: f64,
    geometry: &Geometry,
    mode: LosMode,
    rng: &mut R,
) -> CMatrix {
    let (a_r, a_t) = match mode {
        LosMode::ArrayResponse => {
            let (dx, dy) = (geometry.irs.x - geometry.ap.x, geometry.irs.y - geometry.ap.y);
            // AP array lies along y, so broadside is the x axis.
            let departure = dy.atan2(dx);
            let arrival = (-dy).atan2(-dx);
            (upa_response(layout, arrival), ula_response(m, departure))
        }
        LosMode::RandomPhase => {
            let mut unit = |len: usize| -> Vec<C64> {
                (0..len)
                    .map(|_| C64::from_polar(1.0, rng.random_range(0.0..2.0 * PI)))
                    .collect()
            };
            let a_r = unit(layout.len());
            let a_t = unit(m);
            (a_r, a_t)
        }
    };
    let amp = power_gain.sqrt();
    CMatrix::from_fn(layout.len(), m, |n, k| a_r[n] * a_t[k].conj() * amp)
}

/// Draws `h_d` (Rayleigh), `G` (line of sight) and `h_r` (Rayleigh), in that
/// order, from `rng`.
pub fn realize_channels<R: Rng + ?Sized>(
    geometry: &Geometry,
    m: usize,
    layout: IrsLayout,
    params: &ChannelParams,
    rng: &mut R,
) -> Result<ChannelSet> {
    params.validate()?;
    let g_direct = path_gain_linear(geometry.ap_user(), &params.ap_user)?;
    let g_ap_irs = path_gain_linear(geometry.ap_irs(), &params.ap_irs)?;
    let g_irs_user = path_gain_linear(geometry.irs_user(), &params.irs_user)?;

    let h_d = rayleigh_vector(m, g_direct, rng);
    let g = los_matrix(layout, m, g_ap_irs, geometry, params.los_mode, rng);
    let h_r = rayleigh_vector(layout.len(), g_irs_user, rng);
    ChannelSet::new(h_d, g, h_r)
}
