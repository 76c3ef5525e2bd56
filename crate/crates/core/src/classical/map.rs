use crate::{Error, Result};

pub type IntMatrix = [[i64; 2]; 2];

/// Integer unimodular hyperbolic matrix acting on the 2-torus.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperbolicToralMap {
    matrix: IntMatrix,
    lambda: f64,
    log_lambda: f64,
}

impl HyperbolicToralMap {
    pub fn new(matrix: IntMatrix) -> Result<Self> {
        let det = det(&matrix);
        let trace = matrix[0][0] + matrix[1][1];
        if det.abs() != 1 {
            return Err(Error::InvalidMap {
                matrix,
                reason: format!("|det| = {} ≠ 1", det.abs()),
            });
        }
        if trace.abs() <= 2 {
            return Err(Error::InvalidMap {
                matrix,
                reason: format!("|trace| = {} ≤ 2, not hyperbolic", trace.abs()),
            });
        }
        let t = trace as f64;
        let lambda = 0.5 * (t.abs() + (t * t - 4.0 * det as f64).sqrt());
        Ok(Self {
            matrix,
            lambda,
            log_lambda: lambda.ln(),
        })
    }

    /// The standard cat map [[2,1],[1,1]].
    pub fn cat() -> Self {
        Self::new([[2, 1], [1, 1]]).expect("cat map is hyperbolic")
    }

    pub fn matrix(&self) -> IntMatrix {
        self.matrix
    }

    pub fn det(&self) -> i64 {
        det(&self.matrix)
    }

    pub fn trace(&self) -> i64 {
        self.matrix[0][0] + self.matrix[1][1]
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn log_lambda(&self) -> f64 {
        self.log_lambda
    }

    /// Maximal expansion rate per step.
    pub fn chi_max(&self) -> f64 {
        self.log_lambda
    }

    /// The (constant) unstable Jacobian potential −log λ.
    pub fn unstable_jacobian(&self) -> f64 {
        -self.log_lambda
    }

    pub fn power(&self, n: u32) -> Result<Self> {
        Self::new(matrix_power(&self.matrix, n))
    }

    pub fn inverse_matrix(&self) -> IntMatrix {
        let [[a, b], [c, d]] = self.matrix;
        let s = self.det();
        [[d * s, -b * s], [-c * s, a * s]]
    }

    /// A·x mod 1.
    pub fn apply(&self, (x, y): (f64, f64)) -> (f64, f64) {
        let [[a, b], [c, d]] = self.matrix;
        (
            wrap(a as f64 * x + b as f64 * y),
            wrap(c as f64 * x + d as f64 * y),
        )
    }

    /// Aᵀ·k, the frequency map for composition.
    pub fn transpose_apply(&self, (k1, k2): (i64, i64)) -> (i64, i64) {
        let [[a, b], [c, d]] = self.matrix;
        (a * k1 + c * k2, b * k1 + d * k2)
    }
}

pub fn det(m: &IntMatrix) -> i64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

pub fn matmul(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    let mut out = [[0i64; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub fn matrix_power(m: &IntMatrix, n: u32) -> IntMatrix {
    let mut out = [[1, 0], [0, 1]];
    for _ in 0..n {
        out = matmul(&out, m);
    }
    out
}

pub fn wrap(x: f64) -> f64 {
    let r = x - x.floor();
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}
