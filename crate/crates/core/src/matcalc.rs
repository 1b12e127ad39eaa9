//! Normalized symmetric functions of the eigenvalues of symmetric matrices.
//!
//! `S_k(M) = C(n,k)^{-1} Σ_{i_1<…<i_k} μ_{i_1}⋯μ_{i_k}`, so `S_1 = tr/n` and `S_n = det`.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

pub const MAX_DIM: usize = 8;

/// Symmetric `n × n` matrix in packed upper-triangular storage.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl SymMatrix {
    fn index(n: usize, i: usize, j: usize) -> usize {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        i * n - i * (i + 1) / 2 + j
    }

    pub fn zeros(n: usize) -> Result<Self> {
        if !(2..=MAX_DIM).contains(&n) {
            return Err(Error::InvalidArgument(format!(
                "dimension {n} outside 2..={MAX_DIM}"
            )));
        }
        Ok(Self {
            n,
            entries: vec![0.0; n * (n + 1) / 2],
        })
    }

    pub fn identity(n: usize) -> Result<Self> {
        let mut m = Self::zeros(n)?;
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        Ok(m)
    }

    pub fn diag(values: &[f64]) -> Result<Self> {
        let mut m = Self::zeros(values.len())?;
        for (i, v) in values.iter().enumerate() {
            m.set(i, i, *v);
        }
        Ok(m)
    }

    /// Symmetrizes `(A + Aᵀ)/2` of a row-major square matrix.
    pub fn from_full(n: usize, rows: &[f64]) -> Result<Self> {
        if rows.len() != n * n {
            return Err(Error::InvalidArgument("expected n*n entries".into()));
        }
        let mut m = Self::zeros(n)?;
        for i in 0..n {
            for j in i..n {
                m.set(i, j, 0.5 * (rows[i * n + j] + rows[j * n + i]));
            }
        }
        if m.entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("matrix entries must be finite".into()));
        }
        Ok(m)
    }

    pub fn from_matrix(m: &DMatrix<f64>) -> Result<Self> {
        let n = m.nrows();
        if m.ncols() != n {
            return Err(Error::InvalidArgument("matrix must be square".into()));
        }
        let rows: Vec<f64> = (0..n * n).map(|k| m[(k / n, k % n)]).collect();
        Self::from_full(n, &rows)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[Self::index(self.n, i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let k = Self::index(self.n, i, j);
        self.entries[k] = v;
    }

    pub fn to_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self.get(i, j))
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    /// `Σ_{ij} a_ij b_ij` over all `n²` entries.
    pub fn contract(&self, other: &SymMatrix) -> f64 {
        let mut s = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                s += self.get(i, j) * other.get(i, j);
            }
        }
        s
    }

    pub fn frobenius_sq(&self) -> f64 {
        self.contract(self)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = SymmetricEigen::new(self.to_matrix())
            .eigenvalues
            .iter()
            .cloned()
            .collect();
        ev.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
        ev
    }
}

pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut c = 1.0;
    for i in 0..k {
        c = c * (n - i) as f64 / (i + 1) as f64;
    }
    c.round()
}

/// Elementary symmetric polynomials `e_0..=e_n` of `values`.
pub fn elementary_symmetric(values: &[f64]) -> Vec<f64> {
    let mut e = vec![0.0; values.len() + 1];
    e[0] = 1.0;
    for (count, &x) in values.iter().enumerate() {
        for k in (1..=count + 1).rev() {
            e[k] += x * e[k - 1];
        }
    }
    e
}

/// Normalized `S_k` computed from the eigenvalues.
pub fn symmetric_function(m: &SymMatrix, k: usize) -> Result<f64> {
    let n = m.dim();
    if k < 1 || k > n {
        return Err(Error::InvalidArgument(format!("k = {k} outside 1..={n}")));
    }
    let e = elementary_symmetric(&m.eigenvalues());
    Ok(e[k] / binomial(n, k))
}

/// All normalized `S_1..=S_n`.
pub fn symmetric_functions(m: &SymMatrix) -> Vec<f64> {
    let n = m.dim();
    let e = elementary_symmetric(&m.eigenvalues());
    (1..=n).map(|k| e[k] / binomial(n, k)).collect()
}

/// `S_2` from the trace invariants, `((tr M)² - tr M²) / (2 C(n,2))`.
pub fn s2(m: &SymMatrix) -> f64 {
    let n = m.dim();
    let t = m.trace();
    (t * t - m.frobenius_sq()) / (2.0 * binomial(n, 2))
}

/// `S_2^{ij} = ∂S_2/∂m_ij` with entries treated independently:
/// `(tr M δ_ij - m_ij) / C(n,2)`.
pub fn s2_gradient(m: &SymMatrix) -> SymMatrix {
    let n = m.dim();
    let c = binomial(n, 2);
    let t = m.trace();
    let mut g = SymMatrix::zeros(n).expect("dimension already validated");
    for i in 0..n {
        for j in i..n {
            let delta = if i == j { t } else { 0.0 };
            g.set(i, j, (delta - m.get(i, j)) / c);
        }
    }
    g
}

/// Degree-2 homogeneity residual `½ S_2^{ij} m_ij - S_2`.
pub fn s2_homogeneity_residual(m: &SymMatrix) -> f64 {
    0.5 * s2_gradient(m).contract(m) - s2(m)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GrowthRatio {
    Value(f64),
    /// Both the gap and the deviation vanish (all eigenvalues equal).
    DegenerateEqual,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthCheck {
    /// `S_1² - S_2`.
    pub gap: f64,
    /// `|M - S_1 Id|²`.
    pub dev: f64,
    pub ratio: GrowthRatio,
}

/// Exact zero threshold for the degenerate case, relative to `|M|²`.
const DEGENERATE_REL: f64 = 1e-28;

pub fn quadratic_growth_check(m: &SymMatrix) -> GrowthCheck {
    let n = m.dim();
    let s1 = m.trace() / n as f64;
    let gap = s1 * s1 - s2(m);
    let mut dev = 0.0;
    for i in 0..n {
        for j in 0..n {
            let v = m.get(i, j) - if i == j { s1 } else { 0.0 };
            dev += v * v;
        }
    }
    let scale = m.frobenius_sq().max(f64::MIN_POSITIVE);
    let ratio = if dev <= DEGENERATE_REL * scale {
        GrowthRatio::DegenerateEqual
    } else {
        GrowthRatio::Value(gap / dev)
    };
    GrowthCheck { gap, dev, ratio }
}

/// `c_n = 1/(n(n-1))`: `S_1² - S_2 = c_n |M - S_1 Id|²` holds with equality for every matrix.
pub fn growth_constant(n: usize) -> f64 {
    1.0 / (n * (n - 1)) as f64
}

/// Gaps `S_1 - S_2^{1/2}, S_2^{1/2} - S_3^{1/3}, …` of the Maclaurin chain.
pub fn maclaurin_gaps(m: &SymMatrix) -> Vec<f64> {
    let s = symmetric_functions(m);
    let roots: Vec<f64> = s
        .iter()
        .enumerate()
        .map(|(i, v)| v.max(0.0).powf(1.0 / (i + 1) as f64))
        .collect();
    roots.windows(2).map(|w| w[0] - w[1]).collect()
}
