/// Numerical tolerances used when validating states and spectral results.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Max entrywise deviation from Hermiticity.
    pub herm: f64,
    /// Allowed negative eigenvalue magnitude for PSD checks.
    pub psd: f64,
    /// Allowed deviation of the trace (or squared norm) from one.
    pub trace: f64,
    /// Eigendecomposition reconstruction tolerance.
    pub eig: f64,
    /// Frobenius tolerance for reconstructing a density matrix from a decomposition.
    pub reconstruction: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            herm: 1e-9,
            psd: 1e-9,
            trace: 1e-10,
            eig: 1e-9,
            reconstruction: 1e-9,
        }
    }
}
