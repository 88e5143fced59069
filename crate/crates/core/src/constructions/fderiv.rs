use crate::algebra::{LieAlgebra, Subspace};
use crate::connection::ProductTensor;
use crate::error::{Error, Result};
use crate::linalg::{solve_system, unit, LinearSolution, Matrix};
use crate::metric::SymBilinearForm;
use crate::scalar::Scalar;

/// Grading `G = G0 + G1 + G2` of a three-step nilpotent algebra with the
/// diagonal maps `f = a_i` and `d = alpha_i` on `G_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct FDerivationSpec<T> {
    /// Bases of `G0 = [G,[G,G]]`, `G1` (complement of `G0` in `[G,G]`) and
    /// `G2` (complement of `[G,G]`).
    pub grading: [Vec<Vec<T>>; 3],
    pub f_diag: [T; 3],
    pub d_diag: [T; 3],
    pub f: Matrix<T>,
    pub d: Matrix<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FDerivation<T> {
    pub spec: FDerivationSpec<T>,
    /// `x y = d^{-1} [f x, d y]`.
    pub product: ProductTensor<T>,
    /// `k(d ., d .)` when an ad-invariant `k` was supplied.
    pub metric: Option<SymBilinearForm<T>>,
}

/// Invertible f-derivation of a three-step nilpotent algebra and the flat
/// product it induces. `a1 = 4/9`, `a2 = 2/3`, `alpha2 = 1/3`; `alpha0` and
/// `alpha1` are solved from `d[x,y] = [dx, fy] + [fx, dy]` on graded basis
/// pairs. `a0` does not enter any equation (`G0` is central) and is set to
/// `a1`.
pub fn build_f_derivation<T: Scalar>(alg: &LieAlgebra<T>, k: Option<&SymBilinearForm<T>>) -> Result<FDerivation<T>> {
    build_f_derivation_with(alg, k, T::from_ratio(4, 9))
}

pub fn build_f_derivation_with<T: Scalar>(alg: &LieAlgebra<T>, k: Option<&SymBilinearForm<T>>, a0: T) -> Result<FDerivation<T>> {
    let n = alg.dim();
    let series = alg.lower_central_series();
    let class = alg.nilpotency_class();
    if class != Some(3) {
        let found = class.map_or_else(|| "not nilpotent".to_string(), |c| c.to_string());
        return Err(Error::WrongClass { expected: 3, found });
    }
    let (c2, c3) = (&series[1], &series[2]);
    let g0 = c3.basis().to_vec();
    let g1 = c3.complement_in(c2.basis());
    let units: Vec<Vec<T>> = (0..n).map(|i| unit(n, i)).collect();
    let g2 = c2.complement_in(&units);

    let a = [a0, T::from_ratio(4, 9), T::from_ratio(2, 3)];
    let alpha2 = T::from_ratio(1, 3);

    let mut cols = Vec::new();
    let mut grade = Vec::new();
    for (g, basis) in [&g0, &g1, &g2].into_iter().enumerate() {
        for v in basis {
            cols.push(v.clone());
            grade.push(g);
        }
    }
    let b = Matrix::from_columns(&cols)?;
    let binv = b.inverse()?;

    // One equation alpha_s = a_q alpha_p + a_p alpha_q per nonzero graded
    // component of [b_p, b_q]; unknowns (alpha0, alpha1).
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    let scale = alg.max_constant();
    for p in 0..n {
        for q in (p + 1)..n {
            let coords = binv.mul_vec(&alg.bracket_unchecked(&cols[p], &cols[q]));
            for s in 0..3 {
                let present = (0..n).any(|i| grade[i] == s && !coords[i].is_negligible(scale));
                if !present {
                    continue;
                }
                let mut coef = [T::zero(), T::zero(), T::zero()];
                coef[s] = coef[s].clone() + T::one();
                let (gp, gq) = (grade[p], grade[q]);
                coef[gp] = coef[gp].clone() - a[gq].clone();
                coef[gq] = coef[gq].clone() - a[gp].clone();
                rows.push(vec![coef[0].clone(), coef[1].clone()]);
                rhs.push(-coef[2].clone() * alpha2.clone());
            }
        }
    }
    let (alpha0, alpha1) = match solve_system(&Matrix::from_rows(&rows)?, &rhs) {
        LinearSolution::Unique(x) => (x[0].clone(), x[1].clone()),
        LinearSolution::Inconsistent => return Err(Error::NoSolution("graded f-derivation equations are inconsistent".into())),
        LinearSolution::Underdetermined => return Err(Error::NoSolution("graded f-derivation equations do not fix alpha".into())),
    };
    if alpha0.is_zero() || alpha1.is_zero() {
        return Err(Error::NoSolution("solved d is not invertible".into()));
    }
    let alpha = [alpha0, alpha1, alpha2];

    let diag = |vals: &[T; 3]| Matrix::diagonal(&grade.iter().map(|&g| vals[g].clone()).collect::<Vec<_>>());
    let d = b.mul(&diag(&alpha)).mul(&binv);
    let f = b.mul(&diag(&a)).mul(&binv);
    let dinv = d.inverse()?;

    let center = alg.center();
    let e: Vec<Vec<T>> = units;
    let scale2 = scale * scale.max(1.0);
    for i in 0..n {
        for j in 0..n {
            let br = alg.bracket_unchecked(&e[i], &e[j]);
            let lhs = d.mul_vec(&br);
            let r1 = alg.bracket_unchecked(&d.mul_vec(&e[i]), &f.mul_vec(&e[j]));
            let r2 = alg.bracket_unchecked(&f.mul_vec(&e[i]), &d.mul_vec(&e[j]));
            if (0..n).any(|s| !(lhs[s].clone() - r1[s].clone() - r2[s].clone()).is_negligible(scale2)) {
                return Err(Error::NoSolution(format!("f-derivation identity fails on (e{i}, e{j})")));
            }
            let fb = f.mul_vec(&br);
            let bf = alg.bracket_unchecked(&f.mul_vec(&e[i]), &f.mul_vec(&e[j]));
            let defect: Vec<T> = fb.iter().zip(&bf).map(|(x, y)| x.clone() - y.clone()).collect();
            if !center.contains(&defect) {
                return Err(Error::NoSolution(format!("f is not a q-homomorphism on (e{i}, e{j})")));
            }
        }
    }

    let mut gamma = vec![T::zero(); n * n * n];
    for i in 0..n {
        let fx = f.mul_vec(&e[i]);
        for j in 0..n {
            let v = dinv.mul_vec(&alg.bracket_unchecked(&fx, &d.mul_vec(&e[j])));
            gamma[(i * n + j) * n..(i * n + j + 1) * n].clone_from_slice(&v);
        }
    }
    let metric = match k {
        Some(k) => Some(SymBilinearForm::new(d.transpose().mul(k.matrix()).mul(&d))?),
        None => None,
    };
    let product = ProductTensor::from_coefficients(alg.clone(), metric.clone(), gamma)?;
    Ok(FDerivation {
        spec: FDerivationSpec { grading: [g0, g1, g2], f_diag: a, d_diag: alpha, f, d },
        product,
        metric,
    })
}

/// Sum of the grading pieces, for checks.
pub fn grading_span<T: Scalar>(spec: &FDerivationSpec<T>, n: usize) -> Subspace<T> {
    let all: Vec<Vec<T>> = spec.grading.iter().flatten().cloned().collect();
    Subspace::span(n, &all)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{build_two_step, catalog, CatalogParams, TwoStepSpec};
    use crate::scalar::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    #[test]
    fn dim5_grading_and_diagonal() {
        let cat = catalog("dim5-nilpotent", &CatalogParams::default()).unwrap();
        let fd = build_f_derivation(&cat.algebra, cat.quadratic_form.as_ref()).unwrap();
        let e = |i| unit::<Rational>(5, i);
        assert_eq!(fd.spec.grading[0], vec![e(0), e(3)]);
        assert_eq!(fd.spec.grading[1], vec![e(2)]);
        assert_eq!(fd.spec.grading[2], vec![e(1), e(4)]);
        assert_eq!(fd.spec.d_diag, [q(4, 9), q(4, 9), q(1, 3)]);
        assert_eq!(grading_span(&fd.spec, 5).dim(), 5);

        let p = &fd.product;
        assert_eq!(p.torsion_residual(), q(0, 1));
        assert_eq!(p.left_symmetry_residual(), q(0, 1));
        assert!(p.curvature().is_zero());
        assert_eq!(p.metric_skew_residual(), Some(q(0, 1)));
        let g = fd.metric.unwrap();
        assert_eq!(g.signature().index, 2);
        // The induced product is the Levi-Civita product of k(d., d.).
        assert_eq!(crate::connection::levi_civita(&cat.algebra, &g).unwrap().coefficients(), p.coefficients());
    }

    #[test]
    fn a0_is_irrelevant() {
        let cat = catalog("dim5-nilpotent", &CatalogParams::default()).unwrap();
        let a = build_f_derivation_with(&cat.algebra, None, q(1, 1)).unwrap();
        let b = build_f_derivation_with(&cat.algebra, None, q(-7, 3)).unwrap();
        assert_eq!(a.product, b.product);
    }

    #[test]
    fn class_two_is_rejected() {
        let (g, _) = build_two_step(&TwoStepSpec::<Rational>::volume_form()).unwrap();
        assert!(matches!(build_f_derivation(&g, None), Err(Error::WrongClass { expected: 3, .. })));
    }

    #[test]
    fn four_dim_filiform_class_three() {
        // [e3,e0]=e1, [e3,e1]=e2: class 3, not quadratic; product still flat.
        let g = LieAlgebra::from_brackets(4, None, &[(3, 0, vec![(1, q(1, 1))]), (3, 1, vec![(2, q(1, 1))])]).unwrap();
        let fd = build_f_derivation(&g, None).unwrap();
        assert!(fd.product.curvature().is_zero());
        assert_eq!(fd.product.left_symmetry_residual(), q(0, 1));
    }
}
