//! Report shared by the iterative allocators.

/// Outcome of an allocation run.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverReport {
    /// Newton steps taken (0 for closed forms that needed no refinement).
    pub iterations: usize,
    /// `‖√p − √r‖²` at the returned point, or the negated sum rate for water-filling.
    pub final_objective: f64,
    /// Equality problems: `‖Ax − b‖_∞`. Inequality problems: largest constraint excess, clipped at 0.
    pub equality_residual: f64,
    pub min_x: f64,
    pub converged: bool,
}
