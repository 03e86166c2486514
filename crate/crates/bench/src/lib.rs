//! Fixtures shared by the criterion benches.

use minreg::ProblemInstance;

/// Reference configuration (constants 1.5 and 1, bound 10) with the
/// minimizers `2r` apart, in dimension `n`.
pub fn reference(n: usize, r: f64) -> ProblemInstance {
    ProblemInstance::canonical(n, r, 1.5, 1.0, 10.0).expect("valid reference instance")
}

/// Half-distances hitting the three curve regimes of the reference.
pub const REGIMES: [(&str, f64); 3] = [("two_cusps", 2.0), ("one_cusp", 4.0), ("three_arcs", 6.0)];
