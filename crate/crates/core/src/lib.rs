//! Reeb graphs of the height function on planar strips.
//!
//! Given two functions `c1 < c2` of one variable, the strip
//! `D = {(t, s) : c1(s) < t < c2(s)}` carries the height function
//! `(t, s) ↦ t`. This crate computes the Reeb graph of that height function
//! over a finite window of `s` by an event-driven sweep, cross-checks it
//! against a brute-force grid quotient, and certifies the surrounding
//! numerical claims: regularity of the hypersurface
//! `(x1 - c1(x2))(c2(x2) - x1) = |y|^2`, critical-point structure, vertex
//! degrees, rotation and catalogue constructions, and stability verdicts.
//!
//! Module map:
//! - [`expr`]: expression parser/printer and order-2 jets.
//! - [`critical`]: critical sets of one function on a window.
//! - [`strip`]: functions, strip regions and level slices.
//! - [`reeb`]: sweep construction, degree prediction, CW checks, export.
//! - [`constructions`]: catalogue functions, rotation, asymptotic checks.
//! - [`stability`]: Morse and stability verdicts.
//! - [`manifold`]: the defining function and its zero set.
//! - [`oracle`]: grid quotient and graph equivalence.

pub mod constructions;
pub mod critical;
pub mod expr;
pub mod manifold;
pub mod oracle;
pub mod reeb;
mod roots;
pub mod stability;
pub mod strip;

use serde::{Deserialize, Serialize};

pub use critical::{find_critical_set, is_extremum, CriticalItem, CriticalKind, CriticalSet, Locus};
pub use expr::{eval_jet2, parse, Expr, Jet2};
pub use reeb::{build_reeb_graph, ReebGraph, SweepOptions};
pub use strip::{make_region, slice, LevelSlice, StripRegion, TsFunction};

/// Crate version, embedded into every artifact the CLI writes.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// A closed interval `[lo, hi]` of the real line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub lo: f64,
    pub hi: f64,
}

impl Window {
    pub fn new(lo: f64, hi: f64) -> Window {
        assert!(lo < hi, "window must satisfy lo < hi (got [{lo}, {hi}])");
        Window { lo, hi }
    }

    pub fn symmetric(half: f64) -> Window {
        Window::new(-half, half)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, s: f64) -> bool {
        self.lo <= s && s <= self.hi
    }

    /// `n + 1` uniformly spaced points covering the window, endpoints exact.
    pub fn lattice(&self, n: usize) -> Vec<f64> {
        let h = self.width() / n as f64;
        (0..=n)
            .map(|i| if i == n { self.hi } else { self.lo + h * i as f64 })
            .collect()
    }
}

/// Numerical tolerances shared by critical-set detection and the modules
/// built on it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Bracket width for derivative roots.
    pub root: f64,
    /// `|c'|` threshold for flat runs.
    pub flat: f64,
    /// Offset at which derivative signs are sampled around a locus.
    pub side: f64,
    /// Minimum length of a flat run.
    pub flat_len: f64,
    /// `|c''|` threshold separating degenerate from nondegenerate points.
    pub hess: f64,
    /// More items than this is reported as a possible accumulation.
    pub max_items: usize,
    /// Number of lattice cells per window.
    pub lattice: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            root: 1e-12,
            flat: 1e-9,
            side: 1e-6,
            flat_len: 1e-4,
            hess: 1e-6,
            max_items: 4096,
            lattice: 1 << 14,
        }
    }
}
