//! Finite sample sets in the open disk.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::symbol::DiskPoint;

/// Default sampling radius for Gram matrices.
pub const DEFAULT_RHO_MAX: f64 = 0.9;
/// Separation enforced by [`random_points`].
pub const RANDOM_MIN_SEPARATION: f64 = 1e-3;
const MAX_ATTEMPTS: usize = 1_000_000;

/// SplitMix64, the generator behind every seeded sample in this crate.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1) with 53 random bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in [lo, hi).
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Uniform on the disk of radius `rho`.
    pub fn disk(&mut self, rho: f64) -> C64 {
        let r = rho * self.next_f64().sqrt();
        let theta = 2.0 * PI * self.next_f64();
        C64::from_polar(r, theta)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointSet {
    #[serde(serialize_with = "ser_points")]
    points: Vec<DiskPoint>,
    pub rho_max: f64,
    pub min_separation: f64,
    pub seed: u64,
}

fn ser_points<S: serde::Serializer>(pts: &[DiskPoint], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(pts.len()))?;
    for p in pts {
        seq.serialize_element(&[p.value().re, p.value().im])?;
    }
    seq.end()
}

fn min_pairwise_distance(pts: &[DiskPoint]) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..pts.len() {
        for j in 0..i {
            best = best.min((pts[i].value() - pts[j].value()).norm());
        }
    }
    best
}

impl PointSet {
    /// Wraps an explicit list; rejects duplicates and points beyond `rho_max`.
    pub fn from_points(points: Vec<C64>, rho_max: f64) -> Result<Self> {
        if !(rho_max > 0.0 && rho_max < 1.0) {
            return Err(Error::Parameter(format!("rho_max = {rho_max} must lie in (0, 1)")));
        }
        if points.is_empty() {
            return Err(Error::Parameter("point set must be nonempty".into()));
        }
        let pts = points
            .into_iter()
            .map(|z| {
                if z.norm() > rho_max {
                    Err(Error::Domain(format!("|{z}| exceeds rho_max = {rho_max}")))
                } else {
                    DiskPoint::new(z)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let min_separation = min_pairwise_distance(&pts);
        if min_separation == 0.0 {
            return Err(Error::Parameter("duplicate points".into()));
        }
        Ok(PointSet {
            points: pts,
            rho_max,
            min_separation: if min_separation.is_finite() { min_separation } else { 0.0 },
            seed: 0,
        })
    }

    pub fn points(&self) -> &[DiskPoint] {
        &self.points
    }

    pub fn values(&self) -> Vec<C64> {
        self.points.iter().map(|p| p.value()).collect()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Sub-selection by index, keeping the metadata.
    pub fn subset(&self, idx: &[usize]) -> PointSet {
        let points: Vec<DiskPoint> = idx.iter().map(|&i| self.points[i]).collect();
        let min_separation = min_pairwise_distance(&points);
        PointSet {
            points,
            rho_max: self.rho_max,
            min_separation: if min_separation.is_finite() { min_separation } else { 0.0 },
            seed: self.seed,
        }
    }
}

/// Origin plus `n_radii` rings of `n_angles` equispaced points at radii j·rho_max/n_radii.
pub fn polar_grid(n_radii: usize, n_angles: usize, rho_max: f64) -> Result<PointSet> {
    if n_radii == 0 || n_angles == 0 {
        return Err(Error::Parameter("n_radii and n_angles must be >= 1".into()));
    }
    if !(rho_max > 0.0 && rho_max < 1.0) {
        return Err(Error::Parameter(format!("rho_max = {rho_max} must lie in (0, 1)")));
    }
    let mut pts = vec![DiskPoint::origin()];
    for j in 1..=n_radii {
        let r = j as f64 * rho_max / n_radii as f64;
        for k in 0..n_angles {
            let theta = 2.0 * PI * k as f64 / n_angles as f64;
            pts.push(DiskPoint::new(C64::from_polar(r, theta))?);
        }
    }
    let min_separation = min_pairwise_distance(&pts);
    Ok(PointSet {
        points: pts,
        rho_max,
        min_separation,
        seed: 0,
    })
}

/// `n` seeded uniform points on the disk of radius `rho_max`, at least
/// [`RANDOM_MIN_SEPARATION`] apart.
pub fn random_points(n: usize, rho_max: f64, seed: u64) -> Result<PointSet> {
    if n == 0 {
        return Err(Error::Parameter("n must be >= 1".into()));
    }
    if !(rho_max > 0.0 && rho_max < 1.0) {
        return Err(Error::Parameter(format!("rho_max = {rho_max} must lie in (0, 1)")));
    }
    let mut rng = SplitMix64::new(seed);
    let mut pts: Vec<DiskPoint> = Vec::with_capacity(n);
    let mut attempts = 0;
    while pts.len() < n {
        attempts += 1;
        if attempts > MAX_ATTEMPTS {
            return Err(Error::Sampling(format!(
                "could not place {n} points with separation {RANDOM_MIN_SEPARATION} in radius {rho_max}"
            )));
        }
        let z = rng.disk(rho_max);
        if pts.iter().all(|p| (p.value() - z).norm() >= RANDOM_MIN_SEPARATION) {
            pts.push(DiskPoint::new(z)?);
        }
    }
    Ok(PointSet {
        points: pts,
        rho_max,
        min_separation: RANDOM_MIN_SEPARATION,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: C64, b: C64) -> bool {
        (a - b).norm() < 1e-15
    }

    #[test]
    fn grid_examples() {
        let g = polar_grid(1, 1, 0.5).unwrap();
        assert_eq!(g.values(), vec![C64::new(0.0, 0.0), C64::new(0.5, 0.0)]);

        let g = polar_grid(1, 4, 0.8).unwrap().values();
        let want = [0.0, 0.8, 0.0, -0.8, 0.0];
        let want_im = [0.0, 0.0, 0.8, 0.0, -0.8];
        assert_eq!(g.len(), 5);
        for k in 0..5 {
            assert!(close(g[k], C64::new(want[k], want_im[k])), "{k}: {}", g[k]);
        }

        let g = polar_grid(2, 2, 0.9).unwrap().values();
        let want = [0.0, 0.45, -0.45, 0.9, -0.9];
        assert_eq!(g.len(), 5);
        for k in 0..5 {
            assert!(close(g[k], C64::new(want[k], 0.0)));
        }
    }

    #[test]
    fn grid_rejects_bad_parameters() {
        assert!(polar_grid(0, 3, 0.5).is_err());
        assert!(polar_grid(1, 0, 0.5).is_err());
        assert!(polar_grid(1, 1, 1.0).is_err());
        assert!(polar_grid(1, 1, 0.0).is_err());
    }

    #[test]
    fn random_examples() {
        let one = random_points(1, 0.9, 12345).unwrap();
        assert_eq!(one.len(), 1);
        assert!(one.values()[0].norm() <= 0.9);

        let a = random_points(50, 0.9, 42).unwrap();
        let b = random_points(50, 0.9, 42).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, random_points(50, 0.9, 43).unwrap());

        let c = random_points(3, 0.9, 7).unwrap().values();
        for i in 0..3 {
            for j in 0..i {
                assert!((c[i] - c[j]).norm() >= 1e-3);
            }
        }
    }

    #[test]
    fn random_sampling_gives_up() {
        // far more points than fit at separation 1e-3 in radius 1e-3
        assert!(matches!(random_points(1000, 1e-3, 1), Err(Error::Sampling(_))));
    }

    #[test]
    fn splitmix_reference_values() {
        // reference outputs of SplitMix64 seeded with 1234567
        let mut r = SplitMix64::new(1234567);
        assert_eq!(r.next_u64(), 6457827717110365317);
        assert_eq!(r.next_u64(), 3203168211198807973);
    }
}
