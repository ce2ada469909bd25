use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Radius of the unit-area disk, km.
pub fn disk_radius() -> f64 {
    1.0 / PI.sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn norm(&self) -> f64 {
        self.x.hypot(self.y)
    }
}

/// Node positions in the unit-area disk and each node's destination.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Deployment {
    pub positions: Vec<Point>,
    pub dest: Vec<usize>,
}

impl Deployment {
    pub fn new(positions: Vec<Point>, dest: Vec<usize>) -> Result<Self> {
        let d = Self { positions, dest };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        let r = disk_radius() * (1.0 + 1e-12);
        if self.positions.len() != self.dest.len() {
            return Err(Error::domain("every node needs exactly one destination"));
        }
        if let Some(p) = self.positions.iter().find(|p| p.norm() > r) {
            return Err(Error::domain(format!(
                "node at ({}, {}) lies outside the disk",
                p.x, p.y
            )));
        }
        for (i, &j) in self.dest.iter().enumerate() {
            if j == i || j >= self.positions.len() {
                return Err(Error::domain(format!(
                    "node {i} has invalid destination {j}"
                )));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn distance(&self, a: usize, b: usize) -> f64 {
        self.positions[a].distance(&self.positions[b])
    }

    /// Distance from node `i` to its destination.
    pub fn link_length(&self, i: usize) -> f64 {
        self.distance(i, self.dest[i])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DeployMode {
    UniformRandom,
    Grid,
    /// Equally spaced along a diameter, endpoints on the rim.
    AdversarialLine,
}

impl FromStr for DeployMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform-random" => Ok(Self::UniformRandom),
            "grid" => Ok(Self::Grid),
            "adversarial-line" => Ok(Self::AdversarialLine),
            other => Err(Error::domain(format!("unknown deployment mode {other:?}"))),
        }
    }
}

impl fmt::Display for DeployMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::UniformRandom => "uniform-random",
            Self::Grid => "grid",
            Self::AdversarialLine => "adversarial-line",
        })
    }
}

/// Place `n ≥ 2` nodes. Deterministic for a given seed; the grid and line
/// modes ignore it.
pub fn deploy(n: usize, mode: DeployMode, seed: u64) -> Result<Deployment> {
    if n < 2 {
        return Err(Error::domain(format!(
            "deployment needs at least 2 nodes, got {n}"
        )));
    }
    let r = disk_radius();
    let (positions, dest) = match mode {
        DeployMode::UniformRandom => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut pts = Vec::with_capacity(n);
            while pts.len() < n {
                let p = Point {
                    x: rng.gen_range(-r..r),
                    y: rng.gen_range(-r..r),
                };
                if p.norm() <= r {
                    pts.push(p);
                }
            }
            let dest = (0..n)
                .map(|i| {
                    let j = rng.gen_range(0..n - 1);
                    if j >= i {
                        j + 1
                    } else {
                        j
                    }
                })
                .collect();
            (pts, dest)
        }
        DeployMode::Grid => {
            let k = (n as f64).sqrt().ceil() as usize;
            // square inscribed in the disk, cell centers
            let side = r * std::f64::consts::SQRT_2;
            let coord = |i: usize| -0.5 * side + side * (i as f64 + 0.5) / k as f64;
            let pts = (0..n)
                .map(|i| Point {
                    x: coord(i % k),
                    y: coord(i / k),
                })
                .collect();
            (pts, half_shift(n))
        }
        DeployMode::AdversarialLine => {
            let pts = (0..n)
                .map(|i| Point {
                    x: -r + 2.0 * r * i as f64 / (n - 1) as f64,
                    y: 0.0,
                })
                .collect();
            (pts, half_shift(n))
        }
    };
    Deployment::new(positions, dest)
}

fn half_shift(n: usize) -> Vec<usize> {
    let shift = (n / 2).max(1);
    (0..n).map(|i| (i + shift) % n).collect()
}
