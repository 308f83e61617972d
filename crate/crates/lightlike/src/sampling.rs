//! Seeded sample grids and point-parallel reductions.
//!
//! With the `parallel` feature (on by default) the map helpers fan out over
//! rayon's pool; without it they run on the calling thread. Results come back
//! in input order either way, so reductions are reproducible.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub const DEFAULT_SAMPLES: usize = 100;
pub const DEFAULT_TOL: f64 = 1e-9;
pub const FD_TOL: f64 = 1e-6;

/// Axis-aligned box `[lo_k, hi_k]` in `R^m`.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl SampleBox {
    pub fn new(bounds: &[(f64, f64)]) -> Result<Self> {
        for (k, &(a, b)) in bounds.iter().enumerate() {
            if !(a.is_finite() && b.is_finite() && a < b) {
                return Err(Error::Precondition(format!("box axis {} has bounds [{a}, {b}]", k + 1)));
            }
        }
        Ok(SampleBox { lo: bounds.iter().map(|b| b.0).collect(), hi: bounds.iter().map(|b| b.1).collect() })
    }

    /// The cube `[-1, 1]^m`.
    pub fn unit(m: usize) -> Self {
        SampleBox { lo: vec![-1.0; m], hi: vec![1.0; m] }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    /// `count` points drawn uniformly with a ChaCha stream seeded by `seed`.
    pub fn sample(&self, count: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count).map(|_| self.lo.iter().zip(&self.hi).map(|(&a, &b)| rng.gen_range(a..b)).collect()).collect()
    }
}

/// Map `f` over `items`, keeping order.
pub fn map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        map_par(items, f)
    }
    #[cfg(not(feature = "parallel"))]
    {
        map_seq(items, f)
    }
}

pub fn map_seq<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}

#[cfg(feature = "parallel")]
pub fn map_par<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

/// Fallible map; the error reported is the first one in input order.
pub fn try_map<T, U, F>(items: &[T], f: F) -> Result<Vec<U>>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> Result<U> + Sync + Send,
{
    map(items, f).into_iter().collect()
}

/// Largest value returned by `f` over `items` (0 for an empty slice).
pub fn try_max<T, F>(items: &[T], f: F) -> Result<f64>
where
    T: Sync,
    F: Fn(&T) -> Result<f64> + Sync + Send,
{
    Ok(try_map(items, f)?.into_iter().fold(0.0, f64::max))
}
