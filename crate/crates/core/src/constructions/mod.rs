//! Builders for quadratic Lie algebras: double extensions (oscillators
//! among them), corank-0 two-step nilpotent algebras `V + V*` with their
//! flat metric family, and flat structures from f-derivations.

mod catalog;
mod fderiv;
mod oracles;

pub use catalog::{catalog, catalog_names, dim4b_iso_family, dim4b_printed_product, CatalogEntry, CatalogParams, Oracle};
pub use fderiv::{build_f_derivation, FDerivation, FDerivationSpec};
pub use fderiv::{build_f_derivation_with, grading_span};
pub use oracles::{
    dim5_curve, dim5_curve_derivative, dim5_curve_momentum, dim5_curve_momentum_derivative, e2_exp, e2_geodesic, e2_geodesic_printed,
    e2_group_curve, e2_group_curve_printed, oscillator_candidates, Candidates, OscillatorClosedForm,
};

use serde::Serialize;

use crate::algebra::LieAlgebra;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::metric::{metric_from_iso, SymBilinearForm, SymmetricIso};
use crate::poly::{characteristic_polynomial, invariant_factors, Polynomial};
use crate::scalar::Scalar;

/// Frequencies of an oscillator algebra; all must be positive.
#[derive(Debug, Clone, PartialEq)]
pub struct OscillatorSpec<T> {
    pub lambda: Vec<T>,
}

/// Basis labels of the oscillator on `(e-1, e0, e1..en, e1'..en')`.
pub fn oscillator_labels(n: usize) -> Vec<String> {
    let mut l = vec!["e-1".to_string(), "e0".to_string()];
    l.extend((1..=n).map(|j| format!("e{j}")));
    l.extend((1..=n).map(|j| format!("e{j}'")));
    l
}

/// The skew map `theta e_j = lambda_j e_j'`, `theta e_j' = -lambda_j e_j` on `R^2n`.
pub fn oscillator_theta<T: Scalar>(lambda: &[T]) -> Matrix<T> {
    let n = lambda.len();
    let mut th = Matrix::zeros(2 * n, 2 * n);
    for (j, l) in lambda.iter().enumerate() {
        th[(n + j, j)] = l.clone();
        th[(j, n + j)] = -l.clone();
    }
    th
}

/// Oscillator algebra of dimension `2n + 2` with its Lorentzian
/// ad-invariant form.
pub fn build_oscillator<T: Scalar>(spec: &OscillatorSpec<T>) -> Result<(LieAlgebra<T>, SymBilinearForm<T>)> {
    if spec.lambda.is_empty() {
        return Err(Error::Validation("at least one frequency is required".into()));
    }
    for (index, l) in spec.lambda.iter().enumerate() {
        if !(*l > T::zero()) {
            return Err(Error::InvalidLambda { index, value: l.render() });
        }
    }
    let n = spec.lambda.len();
    let k0 = SymBilinearForm::identity(2 * n);
    let (alg, k) = build_double_extension(&k0, &oscillator_theta(&spec.lambda))?;
    Ok((alg.with_labels(oscillator_labels(n))?, k))
}

/// Double extension of the abelian quadratic space `(W, k0)` by a
/// `k0`-antisymmetric `theta`, on the basis `(e-1, e0, w_1..w_m)`:
/// `[e-1, x] = theta x`, `[x, y] = k0(theta x, y) e0`, `k(e-1, e0) = 1`.
pub fn build_double_extension<T: Scalar>(k0: &SymBilinearForm<T>, theta: &Matrix<T>) -> Result<(LieAlgebra<T>, SymBilinearForm<T>)> {
    let m = k0.dim();
    if theta.rows() != m || theta.cols() != m {
        return Err(Error::DimensionMismatch { expected: m, found: theta.rows() });
    }
    let k0m = k0.matrix();
    let skew = theta.transpose().mul(k0m).add(&k0m.mul(theta));
    if !skew.is_negligible(k0m.max_magnitude() * theta.max_magnitude()) {
        return Err(Error::NotAntisymmetric);
    }
    let n = m + 2;
    // omega(w_a, w_b) = (theta^T K0)_ab
    let omega = theta.transpose().mul(k0m);
    let mut entries = Vec::new();
    for a in 0..m {
        let terms: Vec<(usize, T)> = (0..m).map(|b| (b + 2, theta[(b, a)].clone())).filter(|(_, c)| !c.is_zero()).collect();
        if !terms.is_empty() {
            entries.push((0, a + 2, terms));
        }
        for b in (a + 1)..m {
            if !omega[(a, b)].is_zero() {
                entries.push((a + 2, b + 2, vec![(1, omega[(a, b)].clone())]));
            }
        }
    }
    let mut labels = vec!["e-1".to_string(), "e0".to_string()];
    labels.extend((1..=m).map(|j| format!("w{j}")));
    let alg = LieAlgebra::from_brackets(n, Some(labels), &entries)?;
    let mut k = Matrix::zeros(n, n);
    k[(0, 1)] = T::one();
    k[(1, 0)] = T::one();
    for a in 0..m {
        for b in 0..m {
            k[(a + 2, b + 2)] = k0m[(a, b)].clone();
        }
    }
    Ok((alg, SymBilinearForm::new(k)?))
}

/// Cotangent double `g + g*`: `[x, y]` on `g`, `[x, a] = -a o ad_x`, `g*`
/// abelian, with the pairing `k((x, a), (y, b)) = a(y) + b(x)`.
pub fn cotangent_double<T: Scalar>(alg: &LieAlgebra<T>) -> Result<(LieAlgebra<T>, SymBilinearForm<T>)> {
    let n = alg.dim();
    let mut entries = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let terms: Vec<(usize, T)> =
                (0..n).map(|k| (k, alg.constant(i, j, k).clone())).filter(|(_, c)| !c.is_zero()).collect();
            if !terms.is_empty() {
                entries.push((i, j, terms));
            }
        }
        for a in 0..n {
            // [e_i, e*_a] = -sum_j c^a_ij e*_j
            let terms: Vec<(usize, T)> =
                (0..n).map(|j| (n + j, -alg.constant(i, j, a).clone())).filter(|(_, c)| !c.is_zero()).collect();
            if !terms.is_empty() {
                entries.push((i, n + a, terms));
            }
        }
    }
    let mut labels = alg.labels().to_vec();
    labels.extend(alg.labels().iter().map(|l| format!("{l}*")));
    let double = LieAlgebra::from_brackets(2 * n, Some(labels), &entries)?;
    Ok((double, SymBilinearForm::new(pairing(n))?))
}

/// Input of the corank-0 two-step construction on `V + V*`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoStepSpec<T> {
    pub dim_v: usize,
    /// Full alternating tensor `theta_abc` at `(a * m + b) * m + c`.
    pub theta: Vec<T>,
    pub phi: Option<Matrix<T>>,
}

impl<T: Scalar> TwoStepSpec<T> {
    /// Expand `(a, b, c, value)` triples (`a < b < c` not required) into the
    /// alternating tensor.
    pub fn from_triples(dim_v: usize, triples: &[(usize, usize, usize, T)]) -> Result<Self> {
        let m = dim_v;
        let mut theta = vec![T::zero(); m * m * m];
        for (a, b, c, v) in triples {
            let (a, b, c) = (*a, *b, *c);
            if a >= m || b >= m || c >= m {
                return Err(Error::DimensionMismatch { expected: m, found: a.max(b).max(c) + 1 });
            }
            if a == b || b == c || a == c {
                return Err(Error::Validation("theta entries need three distinct indices".into()));
            }
            let perms = [(a, b, c, 1), (b, c, a, 1), (c, a, b, 1), (b, a, c, -1), (a, c, b, -1), (c, b, a, -1)];
            for (x, y, z, s) in perms {
                theta[(x * m + y) * m + z] = v.clone() * T::from_int(s);
            }
        }
        Ok(TwoStepSpec { dim_v, theta, phi: None })
    }

    /// `theta = e1 ^ e2 ^ e3` on a three-dimensional `V`.
    pub fn volume_form() -> Self {
        Self::from_triples(3, &[(0, 1, 2, T::one())]).expect("valid indices")
    }

    pub fn with_phi(mut self, phi: Matrix<T>) -> Self {
        self.phi = Some(phi);
        self
    }

    pub fn theta_at(&self, a: usize, b: usize, c: usize) -> &T {
        let m = self.dim_v;
        &self.theta[(a * m + b) * m + c]
    }

    /// Rank of `x -> theta(x, ., .)`.
    pub fn theta_rank(&self) -> usize {
        let m = self.dim_v;
        let mat = Matrix::from_fn(m, m * m, |a, bc| self.theta[a * m * m + bc].clone());
        mat.rank()
    }

    fn check_alternating(&self) -> Result<()> {
        let m = self.dim_v;
        if self.theta.len() != m * m * m {
            return Err(Error::DimensionMismatch { expected: m * m * m, found: self.theta.len() });
        }
        let scale = crate::scalar::max_magnitude(&self.theta);
        for a in 0..m {
            for b in 0..m {
                for c in 0..m {
                    let t = self.theta_at(a, b, c).clone();
                    let ok = (t.clone() + self.theta_at(b, a, c).clone()).is_negligible(scale)
                        && (t + self.theta_at(a, c, b).clone()).is_negligible(scale);
                    if !ok {
                        return Err(Error::Validation(format!("theta is not alternating at ({a},{b},{c})")));
                    }
                }
            }
        }
        Ok(())
    }
}

pub fn two_step_labels(m: usize) -> Vec<String> {
    let mut l: Vec<String> = (1..=m).map(|a| format!("e{a}")).collect();
    l.extend((1..=m).map(|a| format!("f{a}")));
    l
}

/// `V + V*` with `[e_a, e_b] = sum_c theta_abc f_c` and the duality pairing
/// `k(e_a, f_b) = delta_ab`.
pub fn build_two_step<T: Scalar>(spec: &TwoStepSpec<T>) -> Result<(LieAlgebra<T>, SymBilinearForm<T>)> {
    spec.check_alternating()?;
    let m = spec.dim_v;
    let rank = spec.theta_rank();
    if rank < m {
        return Err(Error::RankDeficientTheta { rank, dim: m });
    }
    let mut entries = Vec::new();
    for a in 0..m {
        for b in (a + 1)..m {
            let terms: Vec<(usize, T)> =
                (0..m).map(|c| (m + c, spec.theta_at(a, b, c).clone())).filter(|(_, v)| !v.is_zero()).collect();
            if !terms.is_empty() {
                entries.push((a, b, terms));
            }
        }
    }
    let alg = LieAlgebra::from_brackets(2 * m, Some(two_step_labels(m)), &entries)?;
    Ok((alg, SymBilinearForm::new(pairing(m))?))
}

fn pairing<T: Scalar>(m: usize) -> Matrix<T> {
    Matrix::from_fn(2 * m, 2 * m, |i, j| if i + m == j || j + m == i { T::one() } else { T::zero() })
}

/// Similarity invariants of a matrix: characteristic polynomial and
/// invariant factors.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityInvariants<T> {
    pub characteristic: Polynomial<T>,
    pub invariant_factors: Vec<Polynomial<T>>,
}

impl<T: Scalar> SimilarityInvariants<T> {
    pub fn of(phi: &Matrix<T>) -> Self {
        SimilarityInvariants { characteristic: characteristic_polynomial(phi), invariant_factors: invariant_factors(phi) }
    }

    /// Degrees of the nontrivial invariant factors.
    pub fn degrees(&self) -> Vec<usize> {
        self.invariant_factors.iter().filter_map(|p| p.degree()).filter(|&d| d > 0).collect()
    }

    pub fn summary(&self) -> InvariantSummary {
        InvariantSummary {
            characteristic: self.characteristic.coeffs().iter().map(Scalar::render).collect(),
            invariant_factor_degrees: self.degrees(),
            invariant_factors: self.invariant_factors.iter().map(|p| p.to_string()).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvariantSummary {
    /// Coefficients from the constant term up.
    pub characteristic: Vec<String>,
    pub invariant_factor_degrees: Vec<usize>,
    pub invariant_factors: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwoStepMetric<T> {
    pub iso: SymmetricIso<T>,
    pub metric: SymBilinearForm<T>,
    pub invariants: SimilarityInvariants<T>,
}

/// `u(x, alpha) = (phi x, alpha o phi)` and the metric `k(u ., .)`.
pub fn two_step_metric<T: Scalar>(spec: &TwoStepSpec<T>) -> Result<TwoStepMetric<T>> {
    let m = spec.dim_v;
    let phi = spec.phi.clone().unwrap_or_else(|| Matrix::identity(m));
    if phi.rows() != m || phi.cols() != m {
        return Err(Error::DimensionMismatch { expected: m, found: phi.rows() });
    }
    if !T::null_space(&phi).is_empty() {
        return Err(Error::Singular);
    }
    let pt = phi.transpose();
    let u = Matrix::from_fn(2 * m, 2 * m, |i, j| match (i < m, j < m) {
        (true, true) => phi[(i, j)].clone(),
        (false, false) => pt[(i - m, j - m)].clone(),
        _ => T::zero(),
    });
    let k = SymBilinearForm::new(pairing(m))?;
    let (iso, metric) = metric_from_iso(&k, u)?;
    Ok(TwoStepMetric { iso, metric, invariants: SimilarityInvariants::of(&phi) })
}
