//! Random placements on the unit square and the radius-based adjacency
//! between users and base stations.
//!
//! The deployment area is the square `[-1/2, 1/2]^2`. A user and a base
//! station are adjacent when their Euclidean distance is at most the
//! communication radius `r` (closed disc, so ties at exactly `r` count).

use rand::Rng;

use crate::error::{Error, Result};

/// A point in the plane. Deployments live on `[-1/2, 1/2]^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point2D {
    pub x: f64,
    pub y: f64,
}

impl Point2D {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    /// Euclidean distance to `other`.
    pub fn distance(&self, other: &Point2D) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// User and base-station positions plus the radius-`r` adjacency structure.
///
/// Immutable once built; safe to share read-only across workers.
#[derive(Debug, Clone)]
pub struct Deployment {
    pub user_positions: Vec<Point2D>,
    pub station_positions: Vec<Point2D>,
    pub radius: f64,
    /// For each user, the ascending list of station indices within distance
    /// `radius` of it.
    adjacency: Vec<Vec<usize>>,
}

impl Deployment {
    /// Builds a deployment from explicit positions, computing the adjacency
    /// by exhaustive pairwise distance tests.
    pub fn with_positions(
        users: Vec<Point2D>,
        stations: Vec<Point2D>,
        radius: f64,
    ) -> Result<Self> {
        if !(radius > 0.0 && radius < 0.5) {
            return Err(Error::invalid(format!(
                "radius must lie in (0, 1/2), got {radius}"
            )));
        }
        let adjacency = users
            .iter()
            .map(|u| {
                stations
                    .iter()
                    .enumerate()
                    .filter(|(_, b)| u.distance(b) <= radius)
                    .map(|(l, _)| l)
                    .collect()
            })
            .collect();
        Ok(Self {
            user_positions: users,
            station_positions: stations,
            radius,
            adjacency,
        })
    }

    pub fn n_users(&self) -> usize {
        self.user_positions.len()
    }

    pub fn m_stations(&self) -> usize {
        self.station_positions.len()
    }

    /// Station indices adjacent to `user`, ascending and duplicate-free.
    pub fn adjacency(&self, user: usize) -> &[usize] {
        &self.adjacency[user]
    }

    /// Number of stations adjacent to `user` (its spatial degree).
    pub fn spatial_degree(&self, user: usize) -> usize {
        self.adjacency[user].len()
    }

    /// Number of users with at least one adjacent station.
    pub fn covered_users(&self) -> usize {
        self.adjacency.iter().filter(|a| !a.is_empty()).count()
    }
}

/// Samples `count` independent uniform points on the square
/// `[-half_side, half_side]^2`.
pub fn place_uniform<R: Rng + ?Sized>(
    count: usize,
    half_side: f64,
    rng: &mut R,
) -> Result<Vec<Point2D>> {
    if count == 0 {
        return Err(Error::invalid("count must be at least 1"));
    }
    if !(half_side > 0.0 && half_side.is_finite()) {
        return Err(Error::invalid(format!(
            "half_side must be positive and finite, got {half_side}"
        )));
    }
    Ok((0..count)
        .map(|_| {
            let x = rng.gen_range(-half_side..=half_side);
            let y = rng.gen_range(-half_side..=half_side);
            Point2D::new(x, y)
        })
        .collect())
}

/// Places `n` users and `m` stations uniformly on the unit square and
/// computes their adjacency for communication radius `radius`.
pub fn build_deployment<R: Rng + ?Sized>(
    n: usize,
    m: usize,
    radius: f64,
    rng: &mut R,
) -> Result<Deployment> {
    if n == 0 || m == 0 {
        return Err(Error::invalid("n and m must be at least 1"));
    }
    let users = place_uniform(n, 0.5, rng)?;
    let stations = place_uniform(m, 0.5, rng)?;
    Deployment::with_positions(users, stations, radius)
}

/// True when `p` lies in the interior of the square at margin `2r` from the
/// boundary, i.e. `|x| <= 1/2 - 2r` and `|y| <= 1/2 - 2r`. Such placements
/// are called nominal; all others sit in the boundary strip.
pub fn is_nominal(p: Point2D, radius: f64) -> bool {
    let margin = 0.5 - 2.0 * radius;
    p.x.abs() <= margin && p.y.abs() <= margin
}

/// Radius giving mean spatial degree `delta` with `m` stations on the unit
/// square: `m * r^2 * pi = delta`, i.e. `r = sqrt(delta / (m * pi))`.
pub fn radius_for_mean_degree(delta: f64, m: usize) -> Result<f64> {
    if !(delta > 0.0) || m == 0 {
        return Err(Error::invalid(format!(
            "need delta > 0 and m >= 1, got delta={delta}, m={m}"
        )));
    }
    let r = (delta / (m as f64 * std::f64::consts::PI)).sqrt();
    if r >= 0.5 {
        return Err(Error::invalid(format!(
            "delta={delta} with m={m} gives radius {r:.4} >= 1/2; geometry breaks down"
        )));
    }
    Ok(r)
}
