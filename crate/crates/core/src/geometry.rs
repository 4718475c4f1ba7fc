//! Measure geometry of the unit sphere S^d ⊂ R^{d+1}.
//!
//! Polar coordinates are recursive and colatitude first: `angles[0]` is the
//! angle from the +e₁ axis, each further colatitude is measured inside the
//! remaining lower-dimensional sphere, and the last angle is an azimuth in
//! `[0, 2π)`. Zones of the partition are colatitude intervals in this
//! convention, so every region is a product of per-level intervals.

use std::f64::consts::{PI, TAU};
use std::fmt;

use serde::{Deserialize, Serialize};
use statrs::function::beta::beta_reg;

use crate::error::{Error, Result};

/// Tolerance on the Euclidean norm accepted for points fed to
/// [`from_cartesian`] and the lookup routines.
pub const UNIT_NORM_TOLERANCE: f64 = 1e-9;

/// Dimension `d ≥ 1` of the sphere S^d.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct Dimension(usize);

impl Dimension {
    pub fn new(d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::domain("sphere dimension must be at least 1"));
        }
        Ok(Dimension(d))
    }

    #[inline]
    pub fn get(self) -> usize {
        self.0
    }

    /// Dimension of the ambient Euclidean space, `d + 1`.
    #[inline]
    pub fn ambient(self) -> usize {
        self.0 + 1
    }

    /// The sphere one dimension down, if there is one.
    pub fn lower(self) -> Option<Dimension> {
        (self.0 > 1).then(|| Dimension(self.0 - 1))
    }
}

impl TryFrom<usize> for Dimension {
    type Error = Error;

    fn try_from(d: usize) -> Result<Self> {
        Dimension::new(d)
    }
}

impl From<Dimension> for usize {
    fn from(d: Dimension) -> usize {
        d.0
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Recursive polar coordinates of a point of S^d.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarPoint {
    angles: Vec<f64>,
}

impl PolarPoint {
    /// Validates that there are `d` angles, colatitudes in `[0, π]` and the
    /// azimuth in `[0, 2π)`.
    pub fn new(d: Dimension, angles: Vec<f64>) -> Result<Self> {
        if angles.len() != d.get() {
            return Err(Error::domain(format!(
                "expected {} polar angles, got {}",
                d.get(),
                angles.len()
            )));
        }
        let (azimuth, colatitudes) = angles.split_last().expect("d >= 1");
        if let Some(bad) = colatitudes.iter().find(|a| !(0.0..=PI).contains(*a)) {
            return Err(Error::domain(format!("colatitude {bad} outside [0, π]")));
        }
        if !(0.0..TAU).contains(azimuth) {
            return Err(Error::domain(format!("azimuth {azimuth} outside [0, 2π)")));
        }
        Ok(PolarPoint { angles })
    }

    pub(crate) fn from_vec_unchecked(angles: Vec<f64>) -> Self {
        PolarPoint { angles }
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn dim(&self) -> Dimension {
        Dimension(self.angles.len())
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.angles
    }
}

/// A unit vector in R^{d+1}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CartesianPoint {
    coords: Vec<f64>,
}

impl CartesianPoint {
    /// Accepts any vector of length ≥ 2 whose norm is 1 within
    /// [`UNIT_NORM_TOLERANCE`].
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::domain("a point of S^d needs at least 2 coordinates"));
        }
        let p = CartesianPoint { coords };
        p.check_unit()?;
        Ok(p)
    }

    pub(crate) fn from_vec_unchecked(coords: Vec<f64>) -> Self {
        CartesianPoint { coords }
    }

    /// Scales `coords` to unit length. Fails on the zero vector.
    pub fn normalized(mut coords: Vec<f64>) -> Result<Self> {
        let n = norm(&coords);
        if coords.len() < 2 || n.is_nan() || n <= 0.0 || n.is_infinite() {
            return Err(Error::domain(
                "cannot normalize a zero or non-finite vector",
            ));
        }
        coords.iter_mut().for_each(|c| *c /= n);
        Ok(CartesianPoint { coords })
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dim(&self) -> Dimension {
        Dimension(self.coords.len() - 1)
    }

    pub fn norm(&self) -> f64 {
        norm(&self.coords)
    }

    pub fn dot(&self, other: &CartesianPoint) -> f64 {
        dot(&self.coords, &other.coords)
    }

    /// Euclidean (chord) distance.
    pub fn distance(&self, other: &CartesianPoint) -> f64 {
        distance(&self.coords, &other.coords)
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.coords
    }

    pub(crate) fn check_unit(&self) -> Result<()> {
        let n = self.norm();
        if (n - 1.0).abs() > UNIT_NORM_TOLERANCE || !n.is_finite() {
            return Err(Error::domain(format!("point has norm {n}, expected 1")));
        }
        Ok(())
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub(crate) fn norm(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

#[inline]
pub(crate) fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Angle subtended at the origin by a chord of length `chord`.
#[inline]
pub fn chord_to_angle(chord: f64) -> f64 {
    2.0 * (chord / 2.0).clamp(-1.0, 1.0).asin()
}

/// Chord length of the angle `angle`.
#[inline]
pub fn angle_to_chord(angle: f64) -> f64 {
    2.0 * (angle / 2.0).sin()
}

/// ω_k, the area of S^k, for any `k ≥ 0` (ω₀ = 2 counts the two points of S⁰).
pub(crate) fn sphere_area_raw(k: usize) -> f64 {
    // ω_k = ω_{k-2} · 2π / (k - 1)
    let mut area = if k % 2 == 0 { 2.0 } else { TAU };
    let mut j = if k % 2 == 0 { 2 } else { 3 };
    while j <= k {
        area *= TAU / (j - 1) as f64;
        j += 2;
    }
    area
}

/// Surface area ω_d = 2π^{(d+1)/2} / Γ((d+1)/2) of S^d.
pub fn sphere_area(d: Dimension) -> f64 {
    sphere_area_raw(d.get())
}

/// Taylor series of `(x - sin x) / 2` at `x = 2θ`, for small θ where the
/// direct difference cancels.
fn half_x_minus_sin(x: f64) -> f64 {
    let x2 = x * x;
    let mut term = x * x2 / 6.0;
    let mut sum = 0.0;
    let mut n = 3.0;
    loop {
        sum += term;
        term *= -x2 / ((n + 1.0) * (n + 2.0));
        n += 2.0;
        if term.abs() <= f64::EPSILON * sum.abs() * 0.25 {
            break;
        }
    }
    sum / 2.0
}

/// Normalized cap area F_d(θ) = area(cap of radius θ) / ω_d for θ ∈ [0, π/2].
fn cap_fraction_north(d: usize, theta: f64) -> f64 {
    match d {
        1 => theta / PI,
        2 => {
            let s = (theta / 2.0).sin();
            s * s
        }
        3 => {
            let x = 2.0 * theta;
            let numer = if theta < 0.25 {
                half_x_minus_sin(x)
            } else {
                (x - x.sin()) / 2.0
            };
            numer / PI
        }
        _ => {
            let s = (theta / 2.0).sin();
            let half = d as f64 / 2.0;
            beta_reg(half, half, s * s)
        }
    }
}

/// Normalized cap area F_d(θ) ∈ [0, 1] for θ ∈ [0, π].
///
/// The southern half is evaluated through the complement so that caps near
/// either pole keep full relative precision.
pub(crate) fn cap_fraction(d: usize, theta: f64) -> f64 {
    if theta <= PI / 2.0 {
        cap_fraction_north(d, theta)
    } else {
        1.0 - cap_fraction_north(d, PI - theta)
    }
}

/// d F_d / dθ.
fn cap_fraction_derivative(d: usize, theta: f64) -> f64 {
    sphere_area_raw(d - 1) / sphere_area_raw(d) * theta.sin().powi(d as i32 - 1)
}

/// Area of the spherical cap of angular radius `theta` about a pole.
pub fn cap_area(d: Dimension, theta: f64) -> Result<f64> {
    if !(0.0..=PI).contains(&theta) {
        return Err(Error::domain(format!("cap radius {theta} outside [0, π]")));
    }
    Ok(sphere_area(d) * cap_fraction(d.get(), theta))
}

/// Colatitude θ with `cap_area(d, θ) = area`.
pub fn cap_colatitude(d: Dimension, area: f64) -> Result<f64> {
    let total = sphere_area(d);
    let slack = 1e-12 * total;
    if !(area >= -slack && area <= total + slack) {
        return Err(Error::domain(format!(
            "cap area {area} outside [0, {total}]"
        )));
    }
    Ok(colatitude_for_fraction(
        d.get(),
        (area / total).clamp(0.0, 1.0),
    ))
}

/// Inverse of [`cap_fraction`]. Fractions above one half are reflected so
/// that the solve always happens on the northern hemisphere.
pub(crate) fn colatitude_for_fraction(d: usize, fraction: f64) -> f64 {
    if fraction <= 0.0 {
        0.0
    } else if fraction >= 1.0 {
        PI
    } else if fraction > 0.5 {
        PI - solve_north(d, 1.0 - fraction)
    } else {
        solve_north(d, fraction)
    }
}

/// Colatitude of the cap enclosing `c` of `n` equal parts, computed from
/// whichever end of the sphere is closer so that the boundary list of a
/// partition is reflection symmetric.
pub(crate) fn colatitude_for_count(d: usize, c: usize, n: usize) -> f64 {
    if 2 * c <= n {
        colatitude_for_fraction(d, c as f64 / n as f64)
    } else {
        PI - colatitude_for_fraction(d, (n - c) as f64 / n as f64)
    }
}

/// Safeguarded Newton iteration for F_d(θ) = target on [0, π/2].
fn solve_north(d: usize, target: f64) -> f64 {
    if d == 1 {
        return target * PI;
    }
    let mut lo = 0.0_f64;
    let mut hi = PI / 2.0;
    // Small-cap power law F ≈ c θ^d / d as a starting guess.
    let c = sphere_area_raw(d - 1) / sphere_area_raw(d);
    let mut theta = (d as f64 * target / c).powf(1.0 / d as f64);
    if !(theta > lo && theta < hi) {
        theta = 0.5 * (lo + hi);
    }
    for _ in 0..200 {
        let residual = cap_fraction_north(d, theta) - target;
        if residual == 0.0 {
            return theta;
        }
        if residual > 0.0 {
            hi = theta;
        } else {
            lo = theta;
        }
        let slope = cap_fraction_derivative(d, theta);
        let mut next = theta - residual / slope;
        if !(next > lo && next < hi) || !next.is_finite() {
            next = 0.5 * (lo + hi);
        }
        let step = (next - theta).abs();
        theta = next;
        if step <= 2.0 * f64::EPSILON * theta || hi - lo <= 2.0 * f64::EPSILON * hi {
            break;
        }
    }
    theta
}

/// Recursive embedding of polar coordinates into R^{d+1}.
pub fn to_cartesian(p: &PolarPoint) -> CartesianPoint {
    CartesianPoint::from_vec_unchecked(polar_to_coords(p.angles()))
}

pub(crate) fn polar_to_coords(angles: &[f64]) -> Vec<f64> {
    let d = angles.len();
    let mut coords = Vec::with_capacity(d + 1);
    let mut scale = 1.0;
    for &a in &angles[..d - 1] {
        coords.push(scale * a.cos());
        scale *= a.sin();
    }
    let phi = angles[d - 1];
    coords.push(scale * phi.cos());
    coords.push(scale * phi.sin());
    coords
}

/// Inverse of [`to_cartesian`]. Angles left undetermined at a pole are 0.
pub fn from_cartesian(x: &CartesianPoint) -> Result<PolarPoint> {
    x.check_unit()?;
    Ok(PolarPoint::from_vec_unchecked(coords_to_polar(x.coords())))
}

pub(crate) fn coords_to_polar(x: &[f64]) -> Vec<f64> {
    let d = x.len() - 1;
    // tail[k] = ‖x[k..]‖, accumulated from the end
    let mut tail = vec![0.0_f64; d + 2];
    for k in (0..=d).rev() {
        tail[k] = tail[k + 1].hypot(x[k]);
    }
    let mut angles = vec![0.0; d];
    for k in 0..d - 1 {
        let r = tail[k + 1];
        if r == 0.0 {
            angles[k] = if x[k] < 0.0 { PI } else { 0.0 };
            return angles;
        }
        angles[k] = r.atan2(x[k]);
    }
    let mut phi = x[d].atan2(x[d - 1]);
    if phi < 0.0 {
        phi += TAU;
    }
    if phi >= TAU {
        phi = 0.0;
    }
    angles[d - 1] = phi;
    angles
}
