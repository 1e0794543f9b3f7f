use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::Label;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LogRegConfig {
    /// Inverse regularisation strength; the penalty is `|w|^2 / (2C)`.
    pub c: f64,
    pub max_iter: usize,
    /// Stop once the largest gradient component of the mean loss is below this.
    pub tol: f64,
    /// Z-score features before fitting. Off by default.
    pub standardize: bool,
    pub seed: u64,
}

impl Default for LogRegConfig {
    fn default() -> Self {
        Self {
            c: 1.0,
            max_iter: 100,
            tol: 1e-4,
            standardize: false,
            seed: 0,
        }
    }
}

impl LogRegConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.c > 0.0) {
            return Err(Error::InvalidParameter(format!("C must be > 0, got {}", self.c)));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidParameter("max_iter must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scaler {
    pub mean: Vec<f64>,
    pub scale: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticRegression {
    pub weights: Vec<f64>,
    pub intercept: f64,
    pub scaler: Option<Scaler>,
    pub n_iter: usize,
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `log(1 + exp(z))` without overflow.
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

fn dot(w: &[f64], x: &[f64]) -> f64 {
    w.iter().zip(x).map(|(a, b)| a * b).sum()
}

impl LogisticRegression {
    pub fn n_features(&self) -> usize {
        self.weights.len()
    }

    pub fn score(&self, x: &[f64]) -> f64 {
        let z = match &self.scaler {
            Some(s) => {
                self.intercept
                    + x.iter()
                        .enumerate()
                        .map(|(j, v)| self.weights[j] * (v - s.mean[j]) / s.scale[j])
                        .sum::<f64>()
            }
            None => self.intercept + dot(&self.weights, x),
        };
        sigmoid(z)
    }
}

struct Problem<'a> {
    x: &'a [Vec<f64>],
    y: Vec<f64>,
    inv_c: f64,
}

impl Problem<'_> {
    fn objective(&self, w: &[f64], b: f64) -> f64 {
        let loss: f64 = self
            .x
            .iter()
            .zip(&self.y)
            .map(|(xi, &yi)| {
                let z = b + dot(w, xi);
                // -[y log s(z) + (1-y) log(1-s(z))]
                softplus(z) - yi * z
            })
            .sum();
        loss + 0.5 * self.inv_c * dot(w, w)
    }

    fn gradient(&self, w: &[f64], b: f64) -> (Vec<f64>, f64) {
        let mut g: Vec<f64> = w.iter().map(|v| v * self.inv_c).collect();
        let mut gb = 0.0;
        for (xi, &yi) in self.x.iter().zip(&self.y) {
            let r = sigmoid(b + dot(w, xi)) - yi;
            gb += r;
            for (gj, xj) in g.iter_mut().zip(xi) {
                *gj += r * xj;
            }
        }
        (g, gb)
    }
}

/// Full-batch gradient descent with Armijo backtracking.
///
/// Minimises the summed logistic loss plus `|w|^2 / (2C)`; the intercept is
/// not penalised. Deterministic: no randomness is involved.
pub fn fit(x: &[Vec<f64>], y: &[Label], cfg: &LogRegConfig) -> Result<LogisticRegression> {
    cfg.validate()?;
    let d = super::check_design(x, y)?;
    if !super::has_both_classes(y) {
        return Err(Error::SingleClass);
    }

    let scaler = cfg.standardize.then(|| {
        let n = x.len() as f64;
        let mean: Vec<f64> = (0..d).map(|j| x.iter().map(|r| r[j]).sum::<f64>() / n).collect();
        let scale = (0..d)
            .map(|j| {
                let v = x.iter().map(|r| (r[j] - mean[j]).powi(2)).sum::<f64>() / n;
                if v > 0.0 {
                    v.sqrt()
                } else {
                    1.0
                }
            })
            .collect();
        Scaler { mean, scale }
    });
    let scaled: Vec<Vec<f64>>;
    let xs = match &scaler {
        Some(s) => {
            scaled = x
                .iter()
                .map(|r| r.iter().enumerate().map(|(j, v)| (v - s.mean[j]) / s.scale[j]).collect())
                .collect();
            &scaled[..]
        }
        None => x,
    };

    let p = Problem {
        x: xs,
        y: y.iter().map(|l| l.as_u8() as f64).collect(),
        inv_c: 1.0 / cfg.c,
    };
    let n = x.len() as f64;
    let mut w = vec![0.0; d];
    let mut b = 0.0;
    let mut f = p.objective(&w, b);
    let mut step: f64 = 1.0;
    let mut iters = 0;
    for _ in 0..cfg.max_iter {
        let (g, gb) = p.gradient(&w, b);
        let gmax = g.iter().fold(gb.abs(), |m, v| m.max(v.abs()));
        if gmax / n <= cfg.tol {
            break;
        }
        iters += 1;
        let gg = dot(&g, &g) + gb * gb;
        let mut t = (step * 2.0).min(1e6);
        let mut accepted = false;
        for _ in 0..80 {
            let wn: Vec<f64> = w.iter().zip(&g).map(|(a, b)| a - t * b).collect();
            let bn = b - t * gb;
            let fnew = p.objective(&wn, bn);
            if fnew <= f - 0.5 * t * gg {
                w = wn;
                b = bn;
                f = fnew;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
        step = t;
    }

    Ok(LogisticRegression {
        weights: w,
        intercept: b,
        scaler,
        n_iter: iters,
    })
}
