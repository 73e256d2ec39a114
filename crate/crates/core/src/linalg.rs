//! Tridiagonal solvers used by the implicit diffusion step.

/// LU factors of a tridiagonal matrix (no pivoting).
///
/// Intended for diagonally dominant systems such as I − dt·D2/h².
#[derive(Debug, Clone)]
pub struct Tridiagonal {
    lower: Vec<f64>,
    upper_mod: Vec<f64>,
    pivot: Vec<f64>,
}

impl Tridiagonal {
    /// `lower[i]` multiplies x[i-1] in row i (lower[0] unused), `upper[i]`
    /// multiplies x[i+1] in row i (last entry unused).
    pub fn factor(lower: &[f64], diag: &[f64], upper: &[f64]) -> Option<Self> {
        let n = diag.len();
        let mut pivot = vec![0.0; n];
        let mut upper_mod = vec![0.0; n];
        let mut p = diag[0];
        for i in 0..n {
            if i > 0 {
                p = diag[i] - lower[i] * upper_mod[i - 1];
            }
            if p == 0.0 || !p.is_finite() {
                return None;
            }
            pivot[i] = p;
            upper_mod[i] = if i + 1 < n { upper[i] / p } else { 0.0 };
        }
        Some(Self { lower: lower.to_vec(), upper_mod, pivot })
    }

    pub fn len(&self) -> usize {
        self.pivot.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pivot.is_empty()
    }

    pub fn solve_in_place(&self, rhs: &mut [f64]) {
        let n = self.pivot.len();
        rhs[0] /= self.pivot[0];
        for i in 1..n {
            rhs[i] = (rhs[i] - self.lower[i] * rhs[i - 1]) / self.pivot[i];
        }
        for i in (0..n - 1).rev() {
            rhs[i] -= self.upper_mod[i] * rhs[i + 1];
        }
    }
}

/// Periodic tridiagonal system via Sherman-Morrison.
///
/// Row i reads `lower[i]·x[i-1] + diag[i]·x[i] + upper[i]·x[i+1] = r[i]`
/// with indices taken modulo n.
#[derive(Debug, Clone)]
pub struct CyclicTridiagonal {
    inner: Tridiagonal,
    z: Vec<f64>,
    gamma: f64,
    corner_lower: f64,
    denom: f64,
}

impl CyclicTridiagonal {
    pub fn factor(lower: &[f64], diag: &[f64], upper: &[f64]) -> Option<Self> {
        let n = diag.len();
        if n < 3 {
            return None;
        }
        let corner_lower = lower[0];
        let corner_upper = upper[n - 1];
        let gamma = -diag[0];
        let mut d = diag.to_vec();
        d[0] -= gamma;
        d[n - 1] -= corner_lower * corner_upper / gamma;
        let inner = Tridiagonal::factor(lower, &d, upper)?;
        let mut z = vec![0.0; n];
        z[0] = gamma;
        z[n - 1] = corner_upper;
        inner.solve_in_place(&mut z);
        let denom = 1.0 + z[0] + corner_lower * z[n - 1] / gamma;
        if denom == 0.0 || !denom.is_finite() {
            return None;
        }
        Some(Self { inner, z, gamma, corner_lower, denom })
    }

    pub fn solve_in_place(&self, rhs: &mut [f64]) {
        let n = rhs.len();
        self.inner.solve_in_place(rhs);
        let fact = (rhs[0] + self.corner_lower * rhs[n - 1] / self.gamma) / self.denom;
        for (r, z) in rhs.iter_mut().zip(&self.z) {
            *r -= fact * z;
        }
    }
}
