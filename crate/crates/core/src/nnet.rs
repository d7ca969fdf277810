//! Single-hidden-layer network trained in one shot by a structured solve.
//!
//! Input weights and biases are random and fixed. The hidden-output matrix
//! `G[j][i] = Z(w_i · x_j + b_i)` is pruned to the almost-tridiagonal
//! pattern, its diagonal is strengthened where needed, and the output
//! weights come from `G α = T`, one solve per target column. No gradient
//! steps are taken.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::factor::factorize_extended;
use crate::linalg::solve;
use crate::matrix::StructuredMatrix;
use crate::oracle;

/// Minimum dominance margin enforced on the pruned hidden matrix.
pub const PRUNED_MARGIN: f64 = 0.1;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Activation {
    #[default]
    Tanh,
    Identity,
}

impl Activation {
    pub fn apply(self, v: f64) -> f64 {
        match self {
            Activation::Tanh => v.tanh(),
            Activation::Identity => v,
        }
    }
}

impl std::str::FromStr for Activation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tanh" => Ok(Activation::Tanh),
            "identity" => Ok(Activation::Identity),
            other => Err(Error::Structure(format!(
                "unknown activation {other:?} (expected tanh or identity)"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainingProblem {
    /// `N x n_in` samples.
    pub x: DenseMatrix,
    /// `N x m_out` targets.
    pub t: DenseMatrix,
    pub hidden: usize,
    pub activation: Activation,
    pub seed: u64,
}

impl TrainingProblem {
    /// Square problem (`hidden = N`) with the default activation.
    pub fn new(x: DenseMatrix, t: DenseMatrix, seed: u64) -> Result<Self> {
        let hidden = x.rows();
        let p = Self {
            x,
            t,
            hidden,
            activation: Activation::default(),
            seed,
        };
        p.check()?;
        Ok(p)
    }

    pub fn samples(&self) -> usize {
        self.x.rows()
    }

    fn check(&self) -> Result<()> {
        if self.x.rows() == 0 || self.x.cols() == 0 {
            return Err(Error::Shape(
                "training set needs at least one sample and one feature".into(),
            ));
        }
        if self.t.rows() != self.x.rows() {
            return Err(Error::Shape(format!(
                "{} samples but {} target rows",
                self.x.rows(),
                self.t.rows()
            )));
        }
        if self.hidden == 0 {
            return Err(Error::Shape("hidden layer needs at least one unit".into()));
        }
        Ok(())
    }
}

/// How the output weights were obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolverPath {
    /// Pruned square system through the structured factorization.
    Structured,
    /// Pruned square system through dense LU (reference run).
    DenseLu,
    /// Unpruned rectangular system through the normal equations.
    NormalEquations,
}

impl SolverPath {
    pub fn label(self) -> &'static str {
        match self {
            SolverPath::Structured => "structured",
            SolverPath::DenseLu => "dense-lu",
            SolverPath::NormalEquations => "normal-equations (unstructured fallback)",
        }
    }
}

/// Random input layer shared by every solver path.
#[derive(Clone, Debug, PartialEq)]
pub struct HiddenLayer {
    /// `M x n_in`, row `i` is `w_i`.
    pub w_in: DenseMatrix,
    pub bias: Vec<f64>,
    pub activation: Activation,
}

impl HiddenLayer {
    /// `W_in` row-major then the biases, uniform on `[-1, 1]`.
    pub fn sample(hidden: usize, inputs: usize, activation: Activation, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w_in = DenseMatrix::from_fn(hidden, inputs, |_, _| rng.random_range(-1.0..=1.0));
        let bias = (0..hidden).map(|_| rng.random_range(-1.0..=1.0)).collect();
        Self {
            w_in,
            bias,
            activation,
        }
    }

    pub fn units(&self) -> usize {
        self.w_in.rows()
    }

    /// Dense `G[j][i] = Z(w_i · x_j + b_i)`.
    pub fn activations(&self, x: &DenseMatrix) -> Result<DenseMatrix> {
        if x.cols() != self.w_in.cols() {
            return Err(Error::Shape(format!(
                "{} input features, model expects {}",
                x.cols(),
                self.w_in.cols()
            )));
        }
        Ok(DenseMatrix::from_fn(x.rows(), self.units(), |j, i| {
            let dot: f64 = x
                .row(j)
                .iter()
                .zip(self.w_in.row(i))
                .map(|(a, b)| a * b)
                .sum();
            self.activation.apply(dot + self.bias[i])
        }))
    }
}

/// The pruning pattern: `|i - j| <= 1` plus the corners `(0, M-1)` and `(M-1, 0)`.
pub fn keep_entry(order: usize, j: usize, i: usize) -> bool {
    j.abs_diff(i) <= 1 || (order >= 3 && ((j == 0 && i == order - 1) || (j == order - 1 && i == 0)))
}

/// Pruned structured matrix and the diagonal shift applied to it.
fn prune(g: &DenseMatrix) -> Result<(StructuredMatrix, Vec<f64>)> {
    let n = g.rows();
    let a: Vec<f64> = (0..n).map(|i| g[(i, i)]).collect();
    let b = (0..n - 1).map(|i| g[(i + 1, i)]).collect();
    let c = (0..n - 1).map(|i| g[(i, i + 1)]).collect();
    let (d1, d2) = if n >= 3 {
        (g[(n - 1, 0)], g[(0, n - 1)])
    } else {
        (0.0, 0.0)
    };
    let raw = StructuredMatrix::new(a.clone(), b, c, d1, d2)?;

    let dense = raw.to_dense();
    let mut shift = vec![0.0; n];
    let mut strengthened = a.clone();
    for i in 0..n {
        let off: f64 = (0..n)
            .filter(|&k| k != i)
            .map(|k| dense[(i, k)].abs())
            .sum();
        if a[i].abs() - off >= PRUNED_MARGIN {
            continue;
        }
        let mut mag = off + PRUNED_MARGIN;
        while mag - off < PRUNED_MARGIN {
            mag = f64::from_bits(mag.to_bits() + 1);
        }
        let target = if a[i] < 0.0 { -mag } else { mag };
        shift[i] = target - a[i];
        strengthened[i] = target;
    }
    let pruned = StructuredMatrix::new(
        strengthened,
        raw.b().to_vec(),
        raw.c().to_vec(),
        raw.d1(),
        raw.d2(),
    )?;
    Ok((pruned, shift))
}

/// Dense hidden matrix and its pruned, strengthened structured form.
pub fn build_hidden_matrix(p: &TrainingProblem) -> Result<(DenseMatrix, StructuredMatrix)> {
    let (g, pruned, _, _) = build_parts(p)?;
    Ok((g, pruned))
}

fn build_parts(
    p: &TrainingProblem,
) -> Result<(DenseMatrix, StructuredMatrix, Vec<f64>, HiddenLayer)> {
    p.check()?;
    if p.hidden != p.samples() {
        return Err(Error::Shape(format!(
            "pruned system needs hidden units = samples, got {} and {}",
            p.hidden,
            p.samples()
        )));
    }
    let layer = HiddenLayer::sample(p.hidden, p.x.cols(), p.activation, p.seed);
    let g = layer.activations(&p.x)?;
    let (pruned, shift) = prune(&g)?;
    Ok((g, pruned, shift, layer))
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainedModel {
    pub layer: HiddenLayer,
    /// `M x m_out`.
    pub w_out: DenseMatrix,
    /// Pruned system matrix; absent on the normal-equations fallback.
    pub g_structured: Option<StructuredMatrix>,
    /// Additive diagonal correction applied after pruning.
    pub diag_shift: Vec<f64>,
    pub train_loss: f64,
    pub solver: SolverPath,
    pub structured_solves: usize,
    pub gradient_steps: usize,
}

impl TrainedModel {
    /// Hidden activations under the training-time mask and diagonal shift.
    pub fn hidden(&self, x: &DenseMatrix) -> Result<DenseMatrix> {
        let mut h = self.layer.activations(x)?;
        if self.g_structured.is_some() {
            let order = self.layer.units();
            for j in 0..h.rows() {
                for i in 0..order {
                    if !keep_entry(order, j, i) {
                        h[(j, i)] = 0.0;
                    } else if i == j {
                        h[(j, i)] += self.diag_shift[i];
                    }
                }
            }
        }
        Ok(h)
    }

    pub fn predict(&self, x: &DenseMatrix) -> Result<DenseMatrix> {
        self.hidden(x)?.matmul(&self.w_out)
    }
}

/// Mean squared error over every entry.
pub fn mse(pred: &DenseMatrix, target: &DenseMatrix) -> Result<f64> {
    let diff = pred.sub(target)?;
    let count = diff.as_slice().len().max(1) as f64;
    Ok(diff.as_slice().iter().map(|v| v * v).sum::<f64>() / count)
}

/// Output weights `α` with `G α = T` through the structured solver.
pub fn train_on_hidden_matrix(g: &StructuredMatrix, t: &DenseMatrix) -> Result<DenseMatrix> {
    if t.rows() != g.n() {
        return Err(Error::Shape(format!(
            "{} target rows for order {}",
            t.rows(),
            g.n()
        )));
    }
    let f = factorize_extended(g)?;
    let mut w = DenseMatrix::zeros(g.n(), t.cols());
    for k in 0..t.cols() {
        let x = solve(&f, &t.column(k))?.x;
        for (i, v) in x.into_iter().enumerate() {
            w[(i, k)] = v;
        }
    }
    Ok(w)
}

/// One-shot training. Square problems use the structured solver on the
/// pruned matrix; other shapes fall back to the normal equations on the
/// unpruned activations.
pub fn train(p: &TrainingProblem) -> Result<TrainedModel> {
    if p.hidden == p.samples() {
        train_square(p, SolverPath::Structured)
    } else {
        train_fallback(p)
    }
}

/// The square path with dense LU in place of the structured solver.
pub fn train_dense(p: &TrainingProblem) -> Result<TrainedModel> {
    train_square(p, SolverPath::DenseLu)
}

fn train_square(p: &TrainingProblem, path: SolverPath) -> Result<TrainedModel> {
    let (_, pruned, diag_shift, layer) = build_parts(p)?;
    let (w_out, structured_solves) = match path {
        SolverPath::Structured => (train_on_hidden_matrix(&pruned, &p.t)?, p.t.cols()),
        _ => {
            let lu = oracle::lu_decompose(&pruned.to_dense())?;
            let mut w = DenseMatrix::zeros(pruned.n(), p.t.cols());
            for k in 0..p.t.cols() {
                for (i, v) in oracle::lu_solve(&lu, &p.t.column(k))?
                    .into_iter()
                    .enumerate()
                {
                    w[(i, k)] = v;
                }
            }
            (w, 0)
        }
    };
    let mut model = TrainedModel {
        layer,
        w_out,
        g_structured: Some(pruned),
        diag_shift,
        train_loss: 0.0,
        solver: path,
        structured_solves,
        gradient_steps: 0,
    };
    model.train_loss = mse(&model.predict(&p.x)?, &p.t)?;
    Ok(model)
}

fn train_fallback(p: &TrainingProblem) -> Result<TrainedModel> {
    p.check()?;
    let layer = HiddenLayer::sample(p.hidden, p.x.cols(), p.activation, p.seed);
    let g = layer.activations(&p.x)?;
    let mut w_out = DenseMatrix::zeros(p.hidden, p.t.cols());
    for k in 0..p.t.cols() {
        for (i, v) in oracle::normal_eq_lsq(&g, &p.t.column(k))?
            .into_iter()
            .enumerate()
        {
            w_out[(i, k)] = v;
        }
    }
    let mut model = TrainedModel {
        layer,
        w_out,
        g_structured: None,
        diag_shift: vec![0.0; p.hidden],
        train_loss: 0.0,
        solver: SolverPath::NormalEquations,
        structured_solves: 0,
        gradient_steps: 0,
    };
    model.train_loss = mse(&model.predict(&p.x)?, &p.t)?;
    Ok(model)
}
