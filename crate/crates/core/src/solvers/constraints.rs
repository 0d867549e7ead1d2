use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::{eigendecompose, inner, HermitianMatrix};

/// Spectral slack allowed when verifying a declared normalization.
pub const NORMALIZATION_SLACK: f64 = 1e-9;

/// How the constraint operators are scaled. Variants are ordered by
/// strength: a POVM-style set is also summed-normalized, and a summed set is
/// also per-item normalized.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// No scaling requirement; only the exact projection accepts this.
    Free,
    /// `|F_j| ≤ I` for every `j`.
    PerItem,
    /// `Σ_j |F_j| ≤ I`.
    Summed,
    /// `F_j ⪰ 0` and `Σ_j F_j ≤ I`.
    Povm,
}

impl Normalization {
    pub fn as_str(&self) -> &'static str {
        match self {
            Normalization::Free => "free",
            Normalization::PerItem => "per_item",
            Normalization::Summed => "summed",
            Normalization::Povm => "povm",
        }
    }
}

impl fmt::Display for Normalization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Normalization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "free" | "none" => Ok(Normalization::Free),
            "per_item" => Ok(Normalization::PerItem),
            "summed" => Ok(Normalization::Summed),
            "povm" => Ok(Normalization::Povm),
            other => Err(Error::InvalidInput(format!("unknown normalization '{other}'"))),
        }
    }
}

/// Constraint operators `F_1..F_k` with targets `α_j = ⟨F_j, X0⟩`.
///
/// The reference matrix `X0` is optional: maximum-entropy problems only know
/// the moments `α`.
#[derive(Clone, Debug)]
pub struct ConstraintSystem {
    operators: Vec<HermitianMatrix>,
    positive: Vec<HermitianMatrix>,
    negative: Vec<HermitianMatrix>,
    x0: Option<HermitianMatrix>,
    targets: Vec<f64>,
    normalization: Normalization,
}

impl ConstraintSystem {
    pub fn new(
        operators: Vec<HermitianMatrix>,
        x0: HermitianMatrix,
        normalization: Normalization,
    ) -> Result<Self> {
        check_dims(&operators, Some(&x0))?;
        let targets = operators
            .iter()
            .map(|f| inner(f, &x0))
            .collect::<Result<Vec<_>>>()?;
        Self::build(operators, Some(x0), targets, normalization)
    }

    pub fn from_targets(
        operators: Vec<HermitianMatrix>,
        targets: Vec<f64>,
        normalization: Normalization,
    ) -> Result<Self> {
        if targets.len() != operators.len() {
            return Err(Error::DimensionMismatch {
                context: "target vector".into(),
                expected: operators.len(),
                found: targets.len(),
            });
        }
        Self::build(operators, None, targets, normalization)
    }

    fn build(
        operators: Vec<HermitianMatrix>,
        x0: Option<HermitianMatrix>,
        targets: Vec<f64>,
        normalization: Normalization,
    ) -> Result<Self> {
        check_dims(&operators, x0.as_ref())?;
        if targets.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidInput("targets must be finite".into()));
        }
        let mut positive = Vec::with_capacity(operators.len());
        let mut negative = Vec::with_capacity(operators.len());
        for f in &operators {
            let eig = eigendecompose(f)?;
            let scale = eig.eigenvalues.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
            let cut = 1e-14 * scale.max(1e-300);
            positive.push(eig.map(|x| if x > cut { x } else { 0.0 }));
            negative.push(eig.map(|x| if x < -cut { -x } else { 0.0 }));
        }
        let cs = ConstraintSystem {
            operators,
            positive,
            negative,
            x0,
            targets,
            normalization,
        };
        cs.verify(normalization)?;
        Ok(cs)
    }

    /// Checks that the operators actually satisfy `n`.
    pub fn verify(&self, n: Normalization) -> Result<()> {
        let top = |m: &HermitianMatrix| -> Result<f64> {
            Ok(*eigendecompose(m)?.eigenvalues.last().unwrap())
        };
        match n {
            Normalization::Free => Ok(()),
            Normalization::PerItem => {
                for (j, f) in self.operators.iter().enumerate() {
                    let norm = f.spectral_norm()?;
                    if norm > 1.0 + NORMALIZATION_SLACK {
                        return Err(Error::Normalization(format!(
                            "|F_{}| has spectral norm {norm}, expected at most 1",
                            j + 1
                        )));
                    }
                }
                Ok(())
            }
            Normalization::Summed => {
                let abs: Vec<HermitianMatrix> = self
                    .positive
                    .iter()
                    .zip(&self.negative)
                    .map(|(p, m)| p.checked_add(m))
                    .collect::<Result<_>>()?;
                let total = HermitianMatrix::linear_combination(&vec![1.0; abs.len()], &abs)?;
                let t = top(&total)?;
                if t > 1.0 + NORMALIZATION_SLACK {
                    return Err(Error::Normalization(format!(
                        "largest eigenvalue of sum |F_j| is {t}, expected at most 1"
                    )));
                }
                Ok(())
            }
            Normalization::Povm => {
                for (j, f) in self.operators.iter().enumerate() {
                    let low = eigendecompose(f)?.eigenvalues[0];
                    if low < -NORMALIZATION_SLACK {
                        return Err(Error::Normalization(format!(
                            "F_{} has eigenvalue {low}, expected positive semidefinite",
                            j + 1
                        )));
                    }
                }
                let total = HermitianMatrix::linear_combination(&vec![1.0; self.k()], &self.operators)?;
                let t = top(&total)?;
                if t > 1.0 + NORMALIZATION_SLACK {
                    return Err(Error::Normalization(format!(
                        "largest eigenvalue of sum F_j is {t}, expected at most 1"
                    )));
                }
                Ok(())
            }
        }
    }

    /// Fails unless the declared normalization is at least `n`.
    pub fn require(&self, n: Normalization, algorithm: &str) -> Result<()> {
        if self.normalization >= n {
            Ok(())
        } else {
            Err(Error::Normalization(format!(
                "{algorithm} needs {n} normalization, constraint system declares {}",
                self.normalization
            )))
        }
    }

    pub fn operators(&self) -> &[HermitianMatrix] {
        &self.operators
    }

    pub fn positive_parts(&self) -> &[HermitianMatrix] {
        &self.positive
    }

    pub fn negative_parts(&self) -> &[HermitianMatrix] {
        &self.negative
    }

    pub fn x0(&self) -> Option<&HermitianMatrix> {
        self.x0.as_ref()
    }

    pub fn targets(&self) -> &[f64] {
        &self.targets
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }

    pub fn k(&self) -> usize {
        self.operators.len()
    }

    pub fn dim(&self) -> usize {
        self.operators[0].dim()
    }

    /// `λ·F = Σ_j λ_j F_j`.
    pub fn combination(&self, lambda: &[f64]) -> Result<HermitianMatrix> {
        HermitianMatrix::linear_combination(lambda, &self.operators)
    }

    /// `⟨F_j, Y⟩ − α_j` for every `j`.
    pub fn violation(&self, y: &HermitianMatrix) -> Result<Vec<f64>> {
        self.operators
            .iter()
            .zip(&self.targets)
            .map(|(f, a)| Ok(inner(f, y)? - a))
            .collect()
    }
}

fn check_dims(operators: &[HermitianMatrix], x0: Option<&HermitianMatrix>) -> Result<()> {
    let first = operators
        .first()
        .ok_or_else(|| Error::InvalidInput("at least one constraint operator is required".into()))?;
    let dim = first.dim();
    for (j, f) in operators.iter().enumerate() {
        if f.dim() != dim {
            return Err(Error::DimensionMismatch {
                context: format!("constraint operator F_{}", j + 1),
                expected: dim,
                found: f.dim(),
            });
        }
    }
    if let Some(x) = x0 {
        if x.dim() != dim {
            return Err(Error::DimensionMismatch {
                context: "reference matrix X0".into(),
                expected: dim,
                found: x.dim(),
            });
        }
    }
    Ok(())
}
