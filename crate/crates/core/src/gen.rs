//! Instance generators, addressed by specs such as `basis:8` or
//! `random-box:12,12`.

use std::path::Path;
use std::str::FromStr;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::read_point_set;
use crate::rng;
use crate::space::{norm2, PointSet};

/// Largest `n` accepted by the `cube` generator.
pub const CUBE_LIMIT: usize = 12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum GenSpec {
    /// `m` points uniform in `[-1, 1]^n`.
    RandomBox { m: usize, n: usize },
    /// `m` points uniform in `{-1, 1}^n`.
    RandomSigns { m: usize, n: usize },
    /// `m` points uniform on the unit sphere of `ℝ^d`.
    RandomSphere { m: usize, d: usize },
    /// The `n` standard basis vectors.
    Basis { n: usize },
    /// All of `{-1, 1}^n`.
    Cube { n: usize },
    /// `m` initial-segment indicators `1_{[1, b]}` on `n` points.
    Intervals { n: usize, m: usize },
    Csv { path: String },
}

fn numbers(args: &str, want: usize, spec: &str) -> Result<Vec<usize>> {
    let parts: Vec<&str> = args.split(',').map(str::trim).collect();
    if parts.len() != want {
        return Err(Error::Parse(format!("generator {spec:?} expects {want} parameter(s)")));
    }
    parts
        .iter()
        .map(|p| {
            p.parse::<usize>()
                .map_err(|e| Error::Parse(format!("generator {spec:?}: {e}")))
        })
        .collect()
}

impl FromStr for GenSpec {
    type Err = Error;

    fn from_str(spec: &str) -> Result<Self> {
        let (kind, args) = spec.split_once(':').unwrap_or((spec, ""));
        let g = match kind {
            "random-box" => {
                let v = numbers(args, 2, spec)?;
                GenSpec::RandomBox { m: v[0], n: v[1] }
            }
            "random-signs" => {
                let v = numbers(args, 2, spec)?;
                GenSpec::RandomSigns { m: v[0], n: v[1] }
            }
            "random-sphere" => {
                let v = numbers(args, 2, spec)?;
                GenSpec::RandomSphere { m: v[0], d: v[1] }
            }
            "basis" => GenSpec::Basis { n: numbers(args, 1, spec)?[0] },
            "cube" => GenSpec::Cube { n: numbers(args, 1, spec)?[0] },
            "intervals" => {
                let v = numbers(args, 2, spec)?;
                GenSpec::Intervals { n: v[0], m: v[1] }
            }
            "csv" if !args.is_empty() => GenSpec::Csv { path: args.to_string() },
            _ => return Err(Error::Parse(format!("unknown generator {spec:?}"))),
        };
        Ok(g)
    }
}

fn positive(name: &str, v: usize) -> Result<()> {
    if v == 0 {
        return Err(Error::Invalid(format!("generator parameter {name} must be positive")));
    }
    Ok(())
}

pub fn generate(spec: &GenSpec, seed: u64) -> Result<PointSet> {
    let mut r = rng::stream(seed, 0);
    match *spec {
        GenSpec::RandomBox { m, n } => {
            positive("m", m)?;
            positive("n", n)?;
            PointSet::new(
                (0..m)
                    .map(|_| (0..n).map(|_| r.random_range(-1.0..=1.0)).collect())
                    .collect(),
            )
        }
        GenSpec::RandomSigns { m, n } => {
            positive("m", m)?;
            positive("n", n)?;
            PointSet::new(
                (0..m)
                    .map(|_| rng::random_signs(&mut r, n).into_iter().map(f64::from).collect())
                    .collect(),
            )
        }
        GenSpec::RandomSphere { m, d } => {
            positive("m", m)?;
            positive("d", d)?;
            PointSet::new((0..m).map(|_| sphere_point(&mut r, d)).collect())
        }
        GenSpec::Basis { n } => {
            positive("n", n)?;
            PointSet::new(
                (0..n)
                    .map(|j| (0..n).map(|i| if i == j { 1.0 } else { 0.0 }).collect())
                    .collect(),
            )
        }
        GenSpec::Cube { n } => {
            positive("n", n)?;
            if n > CUBE_LIMIT {
                return Err(Error::size("cube generator", n, CUBE_LIMIT));
            }
            PointSet::new(
                (0..1u32 << n)
                    .map(|mask| {
                        (0..n)
                            .map(|i| if mask >> i & 1 == 1 { 1.0 } else { -1.0 })
                            .collect()
                    })
                    .collect(),
            )
        }
        GenSpec::Intervals { n, m } => {
            positive("n", n)?;
            positive("m", m)?;
            PointSet::new(
                (0..m)
                    .map(|_| {
                        let b = r.random_range(1..=n);
                        (0..n).map(|i| if i < b { 1.0 } else { 0.0 }).collect()
                    })
                    .collect(),
            )
        }
        GenSpec::Csv { ref path } => Ok(read_point_set(Path::new(path))?.0),
    }
}

/// A uniform point on the unit sphere of `ℝ^d`.
pub fn sphere_point<R: Rng>(r: &mut R, d: usize) -> Vec<f64> {
    loop {
        let g: Vec<f64> = (0..d).map(|_| r.sample(StandardNormal)).collect();
        let len = norm2(&g);
        if len > 1e-12 {
            return g.into_iter().map(|x| x / len).collect();
        }
    }
}
