//! Seeded generators for the five simulation designs.
//!
//! Replication `r` of a spec draws from stream `r` of the generator keyed by the
//! spec's seed (see [`crate::rng`]); draws are consumed row by row in a fixed order,
//! so every generator is a pure function of `(spec, replication)`. The `gen_example*`
//! functions return replication 1, the first replication of a benchmark run.

use crate::dataset::{default_names, Dataset, LongitudinalDataset, Subject};
use crate::error::{Error, Result};
use crate::rng::SimRng;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Example {
    Ex1,
    Ex2,
    Ex3,
    Ex4,
    Ex5,
}

impl Example {
    pub fn from_number(k: u32) -> Result<Example> {
        match k {
            1 => Ok(Example::Ex1),
            2 => Ok(Example::Ex2),
            3 => Ok(Example::Ex3),
            4 => Ok(Example::Ex4),
            5 => Ok(Example::Ex5),
            _ => Err(Error::InvalidArgument(format!("unknown example {k} (expected 1..5)"))),
        }
    }

    pub fn number(&self) -> u32 {
        match self {
            Example::Ex1 => 1,
            Example::Ex2 => 2,
            Example::Ex3 => 3,
            Example::Ex4 => 4,
            Example::Ex5 => 5,
        }
    }

    /// Zero-based indices of the features with nonzero true coefficients.
    pub fn true_support(&self) -> Vec<usize> {
        match self {
            Example::Ex1 | Example::Ex3 => vec![0, 1, 2],
            Example::Ex2 | Example::Ex5 => vec![0, 1, 2, 3],
            Example::Ex4 => vec![0, 1, 4],
        }
    }

    pub fn is_longitudinal(&self) -> bool {
        *self == Example::Ex4
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ErrorDist {
    Normal { sd: f64 },
    T4,
}

impl ErrorDist {
    fn draw(&self, rng: &mut SimRng) -> f64 {
        match *self {
            ErrorDist::Normal { sd } => sd * rng.normal(),
            ErrorDist::T4 => rng.student_t4(),
        }
    }

    pub fn label(&self) -> String {
        match self {
            ErrorDist::Normal { sd } => format!("N(0,{})", sd * sd),
            ErrorDist::T4 => "t4".to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationSpec {
    pub example: Example,
    pub n: usize,
    pub p: usize,
    /// Signal multiplier (examples 3 and 4).
    pub c: f64,
    /// Error law (examples 1 and 2).
    pub error_dist: ErrorDist,
    /// Measurements per subject (example 4).
    pub m: usize,
    /// AR(1) correlation of the within-subject errors (example 4).
    pub ar1_rho: f64,
    pub seed: u64,
}

impl SimulationSpec {
    pub fn new(example: Example, n: usize, p: usize, seed: u64) -> Self {
        SimulationSpec {
            example,
            n,
            p,
            c: 1.0,
            error_dist: ErrorDist::Normal { sd: 1.0 },
            m: 4,
            ar1_rho: 0.8,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidArgument(format!("n must be >= 2, got {}", self.n)));
        }
        if self.p < 5 {
            return Err(Error::InvalidArgument(format!("p must be >= 5, got {}", self.p)));
        }
        if matches!(self.example, Example::Ex3 | Example::Ex4) && !(self.c > 0.0) {
            return Err(Error::InvalidArgument(format!("c must be positive, got {}", self.c)));
        }
        if !(0.0..1.0).contains(&self.ar1_rho) {
            return Err(Error::InvalidArgument(format!("ar1_rho must lie in [0, 1), got {}", self.ar1_rho)));
        }
        if self.example == Example::Ex4 && self.m == 0 {
            return Err(Error::InvalidArgument("m must be >= 1".into()));
        }
        if let ErrorDist::Normal { sd } = self.error_dist {
            if !(sd >= 0.0) {
                return Err(Error::InvalidArgument(format!("error sd must be >= 0, got {sd}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SimData {
    CrossSection(Dataset),
    Longitudinal(LongitudinalDataset),
}

/// Replication `replication` of `spec`.
pub fn generate(spec: &SimulationSpec, replication: u64) -> Result<SimData> {
    spec.validate()?;
    let mut rng = SimRng::new(spec.seed, replication);
    Ok(match spec.example {
        Example::Ex1 => SimData::CrossSection(example1(spec, &mut rng)?),
        Example::Ex2 => SimData::CrossSection(example2(spec, &mut rng)?),
        Example::Ex3 => SimData::CrossSection(example3(spec, &mut rng)?),
        Example::Ex4 => SimData::Longitudinal(example4(spec, &mut rng)?),
        Example::Ex5 => SimData::CrossSection(example5(spec, &mut rng)?),
    })
}

fn expect_example(spec: &SimulationSpec, ex: Example) -> Result<()> {
    spec.validate()?;
    if spec.example != ex {
        return Err(Error::InvalidArgument(format!("spec is for {:?}, not {ex:?}", spec.example)));
    }
    Ok(())
}

/// Equicorrelated (0.3) Gaussian covariates; `Y = 5 X1 + 5 X2 + 5 X3 + e`.
pub fn gen_example1(spec: &SimulationSpec) -> Result<Dataset> {
    expect_example(spec, Example::Ex1)?;
    example1(spec, &mut SimRng::new(spec.seed, 1))
}

/// Example 1 with a hidden feature X4 correlated sqrt(0.3) with the rest and
/// marginally uncorrelated with the response.
pub fn gen_example2(spec: &SimulationSpec) -> Result<Dataset> {
    expect_example(spec, Example::Ex2)?;
    example2(spec, &mut SimRng::new(spec.seed, 1))
}

/// Independent covariates with heteroscedastic noise:
/// `Y = c (X1 - X2 + X3) + e / (X1^2 + X2^2 + X3^2)`.
pub fn gen_example3(spec: &SimulationSpec) -> Result<Dataset> {
    expect_example(spec, Example::Ex3)?;
    example3(spec, &mut SimRng::new(spec.seed, 1))
}

/// Longitudinal design with AR(1) within-subject errors.
pub fn gen_example4(spec: &SimulationSpec) -> Result<LongitudinalDataset> {
    expect_example(spec, Example::Ex4)?;
    example4(spec, &mut SimRng::new(spec.seed, 1))
}

/// Logistic version of example 2.
pub fn gen_example5(spec: &SimulationSpec) -> Result<Dataset> {
    expect_example(spec, Example::Ex5)?;
    example5(spec, &mut SimRng::new(spec.seed, 1))
}

const RHO: f64 = 0.3;

fn example1(spec: &SimulationSpec, rng: &mut SimRng) -> Result<Dataset> {
    let (n, p) = (spec.n, spec.p);
    // Symmetric square root of (1-rho) I + rho 11': a I + b 11'.
    let a = (1.0 - RHO).sqrt();
    let b = ((1.0 - RHO + p as f64 * RHO).sqrt() - a) / p as f64;
    let mut x = DMatrix::zeros(n, p);
    let mut y = DVector::zeros(n);
    let mut z = vec![0.0; p];
    for i in 0..n {
        z.iter_mut().for_each(|v| *v = rng.normal());
        let shift = b * z.iter().sum::<f64>();
        for j in 0..p {
            x[(i, j)] = a * z[j] + shift;
        }
        let e = spec.error_dist.draw(rng);
        y[i] = 5.0 * (x[(i, 0)] + x[(i, 1)] + x[(i, 2)]) + e;
    }
    Dataset::new(x, y, default_names(p))
}

/// Covariance of examples 2 and 5.
pub fn hidden_covariance(p: usize) -> DMatrix<f64> {
    let s = RHO.sqrt();
    DMatrix::from_fn(p, p, |i, j| {
        if i == j {
            1.0
        } else if i == 3 || j == 3 {
            s
        } else {
            RHO
        }
    })
}

/// Square root of `hidden_covariance(p)`: the dense eigen root plus, when it
/// reproduces the root to 1e-12, its coefficients on `I`, `11'`,
/// `e4 1' + 1 e4'` and `e4 e4'` for O(p) row mixing.
#[derive(Debug)]
pub struct HiddenRoot {
    pub dense: DMatrix<f64>,
    structured: Option<[f64; 4]>,
}

impl HiddenRoot {
    fn new(dense: DMatrix<f64>) -> Self {
        let p = dense.nrows();
        let beta = dense[(0, 1)];
        let alpha = dense[(0, 0)] - beta;
        let gamma = dense[(3, 0)] - beta;
        let delta = dense[(3, 3)] - alpha - beta - 2.0 * gamma;
        let coef = [alpha, beta, gamma, delta];
        let recon = |i: usize, j: usize| {
            let mut v = beta;
            if i == j {
                v += alpha;
            }
            if i == 3 || j == 3 {
                v += gamma;
            }
            if i == 3 && j == 3 {
                v += gamma + delta;
            }
            v
        };
        let ok = (0..p).all(|i| (0..p).all(|j| (dense[(i, j)] - recon(i, j)).abs() <= 1e-12));
        HiddenRoot { dense, structured: ok.then_some(coef) }
    }

    /// `z' S` for one row `z`.
    fn mix(&self, z: &[f64], out: &mut [f64]) {
        match self.structured {
            Some([alpha, beta, gamma, delta]) => {
                let total: f64 = z.iter().sum();
                let base = beta * total + gamma * z[3];
                for (o, &zj) in out.iter_mut().zip(z) {
                    *o = alpha * zj + base;
                }
                out[3] += gamma * total + delta * z[3];
            }
            None => {
                for (j, o) in out.iter_mut().enumerate() {
                    *o = self.dense.column(j).iter().zip(z).map(|(s, v)| s * v).sum();
                }
            }
        }
    }
}

type RootCache = Mutex<HashMap<usize, Arc<HiddenRoot>>>;

/// Symmetric square root of `hidden_covariance(p)` by dense eigendecomposition,
/// cached per `p`.
pub fn hidden_covariance_root(p: usize) -> Result<Arc<HiddenRoot>> {
    static CACHE: OnceLock<RootCache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(root) = cache.lock().expect("covariance cache poisoned").get(&p) {
        return Ok(root.clone());
    }
    let eig = hidden_covariance(p).symmetric_eigen();
    let min = eig.eigenvalues.min();
    if !(min > 0.0) {
        return Err(Error::InvalidCovariance(min));
    }
    let d = DMatrix::from_diagonal(&eig.eigenvalues.map(f64::sqrt));
    let root = Arc::new(HiddenRoot::new(&eig.eigenvectors * d * eig.eigenvectors.transpose()));
    cache.lock().expect("covariance cache poisoned").insert(p, root.clone());
    Ok(root)
}

/// Draws `n` covariate rows `z' S` and one extra scalar per row via `extra`.
fn hidden_rows(n: usize, p: usize, rng: &mut SimRng, mut extra: impl FnMut(&mut SimRng) -> f64) -> Result<(DMatrix<f64>, Vec<f64>)> {
    let root = hidden_covariance_root(p)?;
    let mut x = DMatrix::zeros(n, p);
    let mut z = vec![0.0; p];
    let mut row = vec![0.0; p];
    let mut draws = Vec::with_capacity(n);
    for i in 0..n {
        z.iter_mut().for_each(|v| *v = rng.normal());
        draws.push(extra(rng));
        root.mix(&z, &mut row);
        for (j, &v) in row.iter().enumerate() {
            x[(i, j)] = v;
        }
    }
    Ok((x, draws))
}

fn example2(spec: &SimulationSpec, rng: &mut SimRng) -> Result<Dataset> {
    let dist = spec.error_dist;
    let (x, errs) = hidden_rows(spec.n, spec.p, rng, |r| dist.draw(r))?;
    let coef = 15.0 * RHO.sqrt();
    let y = DVector::from_fn(spec.n, |i, _| {
        5.0 * (x[(i, 0)] + x[(i, 1)] + x[(i, 2)]) - coef * x[(i, 3)] + errs[i]
    });
    Dataset::new(x, y, default_names(spec.p))
}

fn example5(spec: &SimulationSpec, rng: &mut SimRng) -> Result<Dataset> {
    let (x, unif) = hidden_rows(spec.n, spec.p, rng, |r| r.uniform())?;
    let coef = 12.0 * RHO.sqrt();
    let y = DVector::from_fn(spec.n, |i, _| {
        let eta = 4.0 * (x[(i, 0)] + x[(i, 1)] + x[(i, 2)]) - coef * x[(i, 3)];
        let prob = 1.0 / (1.0 + (-eta).exp());
        if unif[i] < prob {
            1.0
        } else {
            0.0
        }
    });
    Dataset::new(x, y, default_names(spec.p))
}

fn example3(spec: &SimulationSpec, rng: &mut SimRng) -> Result<Dataset> {
    let (n, p) = (spec.n, spec.p);
    let mut x = DMatrix::zeros(n, p);
    let mut y = DVector::zeros(n);
    for i in 0..n {
        loop {
            for j in 0..p {
                x[(i, j)] = rng.normal();
            }
            let e = rng.normal();
            let denom = x[(i, 0)].powi(2) + x[(i, 1)].powi(2) + x[(i, 2)].powi(2);
            if denom >= 1e-12 {
                y[i] = spec.c * (x[(i, 0)] - x[(i, 1)] + x[(i, 2)]) + e / denom;
                break;
            }
        }
    }
    Dataset::new(x, y, default_names(p))
}

/// Nonzero coefficients of example 4: `c (2, -2, 0, 0, 2)` on the first five features.
pub fn example4_beta(c: f64, p: usize) -> DVector<f64> {
    let mut beta = DVector::zeros(p);
    for (j, v) in [2.0, -2.0, 0.0, 0.0, 2.0].into_iter().enumerate().take(p) {
        beta[j] = c * v;
    }
    beta
}

fn example4(spec: &SimulationSpec, rng: &mut SimRng) -> Result<LongitudinalDataset> {
    let (n, p, m) = (spec.n, spec.p, spec.m);
    let beta = example4_beta(spec.c, p);
    let innov_x = (1.0 - 0.25f64).sqrt();
    let rho = spec.ar1_rho;
    let innov_e = (1.0 - rho * rho).sqrt();
    let subjects = (0..n)
        .map(|i| {
            let mut x = DMatrix::zeros(m, p);
            for l in 0..m {
                let mut prev = rng.normal();
                x[(l, 0)] = prev;
                for j in 1..p {
                    prev = 0.5 * prev + innov_x * rng.normal();
                    x[(l, j)] = prev;
                }
            }
            let mut eps = DVector::zeros(m);
            let mut prev = rng.normal();
            eps[0] = prev;
            for l in 1..m {
                prev = rho * prev + innov_e * rng.normal();
                eps[l] = prev;
            }
            let y = &x * &beta + eps;
            Subject { id: (i + 1).to_string(), x, y }
        })
        .collect();
    LongitudinalDataset::new(subjects, default_names(p))
}
