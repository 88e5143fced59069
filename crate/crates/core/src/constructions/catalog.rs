//! Named example algebras with their forms, metrics and closed-form oracles.
//! Everything is stored in exact rationals; convert with `to_f64` for
//! integration.

use num_traits::{Signed, Zero};

use super::{build_oscillator, build_two_step, cotangent_double, OscillatorSpec, TwoStepSpec};
use crate::algebra::LieAlgebra;
use crate::connection::ProductTensor;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::metric::{check_ad_invariance, metric_from_iso, SymBilinearForm, SymmetricIso};
use crate::scalar::{parse_rational, Rational, Scalar};

/// Parameters for the parameterized entries. A name such as
/// `oscillator(1,2)` or `a-d(3)` overrides the matching field.
#[derive(Debug, Clone, PartialEq)]
pub struct CatalogParams {
    pub lambda: Vec<Rational>,
    pub d: Rational,
    /// Constant of the dim-5 solution family.
    pub c: Rational,
}

impl Default for CatalogParams {
    fn default() -> Self {
        CatalogParams { lambda: vec![Rational::from_int(1)], d: Rational::from_int(2), c: Rational::zero() }
    }
}

/// Which closed forms come with an entry.
#[derive(Debug, Clone, PartialEq)]
pub enum Oracle {
    /// Rotating Euler solution, group curve and exponential map.
    E2,
    /// Jacobi fields along one-parameter subgroups.
    Oscillator { lambda: Vec<f64> },
    /// The incomplete solution; `c` parameterizes the family.
    Dim5 { c: f64 },
    /// The printed left-symmetric product.
    Dim4B,
    None,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CatalogEntry {
    pub name: String,
    pub algebra: LieAlgebra<Rational>,
    /// Ad-invariant form, when the algebra is quadratic.
    pub quadratic_form: Option<SymBilinearForm<Rational>>,
    /// `u` with `metric = k(u ., .)`.
    pub iso: Option<SymmetricIso<Rational>>,
    /// Left-invariant metric of the example.
    pub metric: Option<SymBilinearForm<Rational>>,
    pub oracle: Oracle,
    pub notes: Vec<String>,
}

pub fn catalog_names() -> &'static [&'static str] {
    &["e2-motion", "dim4-b", "dim5-nilpotent", "oscillator", "two-step-volume", "a-d", "a-d-double"]
}

fn q(n: i64) -> Rational {
    Rational::from_int(n)
}

/// Split `name(1,2/3)` into `("name", Some([1, 2/3]))`.
fn split_args(name: &str) -> Result<(&str, Option<Vec<Rational>>)> {
    let name = name.trim();
    let Some(open) = name.find('(') else {
        return Ok((name, None));
    };
    let Some(inner) = name[open + 1..].strip_suffix(')') else {
        return Err(Error::UnknownName(name.to_string()));
    };
    let args = inner
        .split(',')
        .map(|s| parse_rational(s.trim()).ok_or_else(|| Error::Validation(format!("bad catalog argument {s:?}"))))
        .collect::<Result<Vec<_>>>()?;
    Ok((&name[..open], Some(args)))
}

pub fn catalog(name: &str, params: &CatalogParams) -> Result<CatalogEntry> {
    let (base, args) = split_args(name)?;
    let entry = match base {
        "e2-motion" | "e2" => e2_motion(),
        "dim4-b" => dim4b(),
        "dim5-nilpotent" => dim5(&params.c),
        "oscillator" => oscillator(args.as_deref().unwrap_or(&params.lambda))?,
        "two-step-volume" => two_step_volume()?,
        "a-d" | "a-d-double" => {
            let d = match args.as_deref() {
                Some([d]) => d.clone(),
                Some(_) => return Err(Error::Validation("a-d takes exactly one argument".into())),
                None => params.d.clone(),
            };
            let ad = a_d(&d)?;
            if base == "a-d" {
                ad
            } else {
                a_d_double(ad)?
            }
        }
        _ => return Err(Error::UnknownName(name.to_string())),
    };
    if let Some(k) = &entry.quadratic_form {
        let inv = check_ad_invariance(&entry.algebra, k)?;
        if !inv.invariant {
            return Err(Error::Validation(format!("{}: stored form is not ad-invariant", entry.name)));
        }
    }
    Ok(entry)
}

fn e2_algebra() -> LieAlgebra<Rational> {
    let labels = ["e1", "e2", "e3"].map(String::from).to_vec();
    LieAlgebra::from_brackets(3, Some(labels), &[(2, 0, vec![(1, q(1))]), (2, 1, vec![(0, q(-1))])]).expect("valid")
}

fn e2_motion() -> CatalogEntry {
    CatalogEntry {
        name: "e2-motion".into(),
        algebra: e2_algebra(),
        quadratic_form: None,
        iso: None,
        metric: Some(SymBilinearForm::diagonal(&[q(1), q(1), q(-1)]).expect("nondegenerate")),
        oracle: Oracle::E2,
        notes: vec!["flat Lorentzian metric on the rigid motions of the plane; exp is a global isometry".into()],
    }
}

fn k_dim4() -> Matrix<Rational> {
    Matrix::from_rows(&[
        vec![q(0), q(1), q(0), q(0)],
        vec![q(1), q(0), q(0), q(0)],
        vec![q(0), q(0), q(1), q(0)],
        vec![q(0), q(0), q(0), q(-1)],
    ])
    .expect("square")
}

fn dim4b_algebra() -> LieAlgebra<Rational> {
    let labels = ["e-1", "e0", "e1", "e2"].map(String::from).to_vec();
    LieAlgebra::from_brackets(
        4,
        Some(labels),
        &[(0, 2, vec![(3, q(1))]), (0, 3, vec![(2, q(1))]), (2, 3, vec![(1, q(-1))])],
    )
    .expect("valid")
}

fn dim4b() -> CatalogEntry {
    let k = SymBilinearForm::new(k_dim4()).expect("nondegenerate");
    CatalogEntry {
        name: "dim4-b".into(),
        algebra: dim4b_algebra(),
        quadratic_form: Some(k.clone()),
        iso: None,
        metric: Some(k),
        oracle: Oracle::Dim4B,
        notes: vec!["double extension of the Minkowski plane; metrics with u(e0) = e0 via dim4b_iso_family".into()],
    }
}

/// The metrics `k(u ., .)` on `dim4-b` with `u(e0) = e0`, written through
/// their Gram matrix on `(e-1, e0, e1, e2)`:
///
/// ```text
/// [[p, 1, q1, q2], [1, 0, 0, 0], [q1, 0, a, b], [q2, 0, b, -d]]
/// ```
///
/// so that `a = k(u e1, e1)`, `b = k(u e2, e1)`, `d = -k(u e2, e2)`.
/// Every `k`-symmetric `u` fixing `e0` has this form.
pub fn dim4b_iso_family(
    a: &Rational,
    b: &Rational,
    d: &Rational,
    p: &Rational,
    q1: &Rational,
    q2: &Rational,
) -> Result<(SymmetricIso<Rational>, SymBilinearForm<Rational>)> {
    let g = Matrix::from_rows(&[
        vec![p.clone(), q(1), q1.clone(), q2.clone()],
        vec![q(1), q(0), q(0), q(0)],
        vec![q1.clone(), q(0), a.clone(), b.clone()],
        vec![q2.clone(), q(0), b.clone(), -d.clone()],
    ])?;
    let k = SymBilinearForm::new(k_dim4())?;
    let u = k_dim4().inverse()?.mul(&g);
    metric_from_iso(&k, u)
}

/// The displayed left multiplications on `dim4-b`:
/// `L_x = 1/2 [[0,0,0,0],[0,0,x2,-x1],[0,0,0,2x-1],[0,0,2x-1,0]]`.
pub fn dim4b_printed_product() -> ProductTensor<Rational> {
    let h = Rational::from_ratio(1, 2);
    let ls: Vec<Matrix<Rational>> = (0..4)
        .map(|i| {
            let x: Vec<Rational> = (0..4).map(|j| if i == j { q(1) } else { q(0) }).collect();
            Matrix::from_rows(&[
                vec![q(0), q(0), q(0), q(0)],
                vec![q(0), q(0), x[3].clone() * h.clone(), -x[2].clone() * h.clone()],
                vec![q(0), q(0), q(0), x[0].clone()],
                vec![q(0), q(0), x[0].clone(), q(0)],
            ])
            .expect("square")
        })
        .collect();
    ProductTensor::from_left_multiplications(dim4b_algebra(), None, &ls).expect("dimensions agree")
}

fn dim5(c: &Rational) -> CatalogEntry {
    let labels = (0..5).map(|i| format!("e{i}")).collect();
    let alg = LieAlgebra::from_brackets(
        5,
        Some(labels),
        &[(4, 1, vec![(2, q(1))]), (4, 2, vec![(3, q(1))]), (1, 2, vec![(0, q(1))])],
    )
    .expect("valid");
    let mut k = Matrix::zeros(5, 5);
    k[(0, 4)] = q(1);
    k[(4, 0)] = q(1);
    k[(1, 3)] = q(-1);
    k[(3, 1)] = q(-1);
    k[(2, 2)] = q(1);
    let k = SymBilinearForm::new(k).expect("nondegenerate");
    let u = Matrix::from_rows(&[
        vec![q(0), q(1), q(0), q(0), q(0)],
        vec![q(1), q(0), q(0), q(0), q(0)],
        vec![q(0), q(0), q(1), q(0), q(0)],
        vec![q(0), q(0), q(0), q(0), q(-1)],
        vec![q(0), q(0), q(0), q(-1), q(0)],
    ])
    .expect("square");
    let (iso, metric) = metric_from_iso(&k, u).expect("k-symmetric");
    CatalogEntry {
        name: "dim5-nilpotent".into(),
        algebra: alg,
        quadratic_form: Some(k),
        iso: Some(iso),
        metric: Some(metric),
        oracle: Oracle::Dim5 { c: Scalar::to_f64(c) },
        notes: vec![
            "momentum curve p(t) = (-2/(1+t)^2, 0, 2/(1+t), c(1+t)^2 - 1, 1) blows up at t = -1".into(),
            "u does not preserve the lower central series".into(),
        ],
    }
}

fn oscillator(lambda: &[Rational]) -> Result<CatalogEntry> {
    let (alg, k) = build_oscillator(&OscillatorSpec { lambda: lambda.to_vec() })?;
    let shown: Vec<String> = lambda.iter().map(Scalar::render).collect();
    Ok(CatalogEntry {
        name: format!("oscillator({})", shown.join(",")),
        algebra: alg,
        quadratic_form: Some(k.clone()),
        iso: None,
        metric: Some(k),
        oracle: Oracle::Oscillator { lambda: lambda.iter().map(|l| Scalar::to_f64(l)).collect() },
        notes: vec!["bi-invariant Lorentzian metric; conjugate points at 2 pi k / (x_-1 lambda_i)".into()],
    })
}

fn two_step_volume() -> Result<CatalogEntry> {
    let (alg, k) = build_two_step(&TwoStepSpec::<Rational>::volume_form())?;
    Ok(CatalogEntry {
        name: "two-step-volume".into(),
        algebra: alg,
        quadratic_form: Some(k.clone()),
        iso: None,
        metric: Some(k),
        oracle: Oracle::None,
        notes: vec!["V + V* with theta = e1^e2^e3; flat metric family through two_step_metric".into()],
    })
}

fn is_square_free(d: &Rational) -> bool {
    if !d.is_integer() || d.is_zero() {
        return false;
    }
    let n = d.to_integer().abs();
    let mut p = num_bigint::BigInt::from(2);
    while &p * &p <= n {
        if (&n % (&p * &p)).is_zero() {
            return false;
        }
        p += 1;
    }
    true
}

/// `[e1,e2] = f2`, `[e3,e4] = f2`, `[e1,e3] = f1`, `[e2,e4] = d f2` on
/// `(e1, e2, e3, e4, f1, f2)`.
fn a_d(d: &Rational) -> Result<CatalogEntry> {
    if !is_square_free(d) {
        return Err(Error::Validation(format!("d = {} is not a square-free integer", Scalar::render(d))));
    }
    let labels = ["e1", "e2", "e3", "e4", "f1", "f2"].map(String::from).to_vec();
    let alg = LieAlgebra::from_brackets(
        6,
        Some(labels),
        &[
            (0, 1, vec![(5, q(1))]),
            (2, 3, vec![(5, q(1))]),
            (0, 2, vec![(4, q(1))]),
            (1, 3, vec![(5, d.clone())]),
        ],
    )?;
    Ok(CatalogEntry {
        name: format!("a-d({})", Scalar::render(d)),
        algebra: alg,
        quadratic_form: None,
        iso: None,
        metric: None,
        oracle: Oracle::None,
        notes: vec![
            "the basis is listed as {e1,e2,e3,f1,f2} while the brackets use e4; stored as the 6-dimensional reading".into(),
            "not quadratic (the center is 2-dimensional); see a-d-double for its cotangent double".into(),
        ],
    })
}

fn a_d_double(ad: CatalogEntry) -> Result<CatalogEntry> {
    let (alg, k) = cotangent_double(&ad.algebra)?;
    Ok(CatalogEntry {
        name: ad.name.replacen("a-d", "a-d-double", 1),
        algebra: alg,
        quadratic_form: Some(k.clone()),
        iso: None,
        metric: Some(k),
        oracle: Oracle::None,
        notes: vec!["cotangent double g + g* with the duality pairing".into()],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::connection::{dim4_obstruction, levi_civita};
    use crate::linalg::unit;

    #[test]
    fn every_name_loads() {
        for name in catalog_names() {
            let e = catalog(name, &CatalogParams::default()).unwrap();
            if e.quadratic_form.is_some() {
                assert!(e.algebra.is_unimodular(), "{name}");
            }
        }
        assert!(matches!(catalog("nope", &CatalogParams::default()), Err(Error::UnknownName(_))));
    }

    #[test]
    fn named_arguments() {
        let e = catalog("oscillator(1,2)", &CatalogParams::default()).unwrap();
        assert_eq!(e.algebra.dim(), 6);
        assert_eq!(e.name, "oscillator(1,2)");
        let a = catalog("a-d(3)", &CatalogParams::default()).unwrap();
        assert_eq!(a.algebra.basis_bracket(1, 3), vec![q(0), q(0), q(0), q(0), q(0), q(3)]);
        assert!(catalog("a-d(4)", &CatalogParams::default()).is_err());
        assert!(catalog("a-d(-1)", &CatalogParams::default()).is_ok());
    }

    #[test]
    fn e2_is_flat_and_not_quadratic() {
        let e = catalog("e2", &CatalogParams::default()).unwrap();
        let p = levi_civita(&e.algebra, e.metric.as_ref().unwrap()).unwrap();
        assert!(p.curvature().is_zero());
        assert!(p.left_mult_basis(0).as_slice().iter().all(Zero::is_zero));
        assert!(p.left_mult_basis(1).as_slice().iter().all(Zero::is_zero));
        assert_eq!(p.left_mult_basis(2), e.algebra.ad_basis(2));
    }

    #[test]
    fn dim5_structure() {
        let e = catalog("dim5-nilpotent", &CatalogParams::default()).unwrap();
        let r = e.algebra.structure_report();
        assert_eq!(r.nilpotency_class, Some(3));
        assert_eq!(r.center.basis(), &[unit::<Rational>(5, 0), unit(5, 3)]);
        assert_eq!(e.metric.unwrap().signature().index, 2);
        let k = e.quadratic_form.unwrap();
        let x = vec![q(1), q(2), q(3), q(4), q(5)];
        assert_eq!(k.eval(&x, &x), q(2 * (5 - 2 * 4) + 9));
    }

    #[test]
    fn dim4b_family_matches_obstruction() {
        let e = catalog("dim4-b", &CatalogParams::default()).unwrap();
        let cases = [(2, 1, 3, 5, -1, 2), (1, 0, 1, 0, 0, 0), (-3, 2, 1, 1, 1, 1), (1, 1, 1, 0, 0, 0)];
        for (a, b, d, p, q1, q2) in cases {
            let (iso, g) = dim4b_iso_family(&q(a), &q(b), &q(d), &q(p), &q(q1), &q(q2)).unwrap();
            assert_eq!(iso.apply(&unit(4, 1)), unit::<Rational>(4, 1));
            let r = levi_civita(&e.algebra, &g).unwrap().curvature();
            // k(R(e1,e-1)e-1, e2), k(R(e1,e-1)e-1, e1), k(R(e2,e-1)e-1, e2); the
            // last two expressions hold only once b = 0.
            let k = e.quadratic_form.as_ref().unwrap();
            let comp = |x: usize, z: usize| k.eval(&r.apply(&unit(4, x), &unit(4, 0), &unit(4, 0)), &unit(4, z));
            let f = dim4_obstruction(&q(a), &q(b), &q(d)).unwrap();
            assert_eq!(comp(2, 3), f[0]);
            if b == 0 {
                assert_eq!(comp(2, 2), f[1]);
                assert_eq!(comp(3, 3), f[2]);
            }
        }
    }

    #[test]
    fn printed_product_is_left_symmetric() {
        let p = dim4b_printed_product();
        assert_eq!(p.torsion_residual(), q(0));
        assert_eq!(p.left_symmetry_residual(), q(0));
        assert!(p.curvature().is_zero());
    }

    #[test]
    fn a_d_double_is_two_step_quadratic() {
        let e = catalog("a-d-double", &CatalogParams::default()).unwrap();
        assert_eq!(e.algebra.dim(), 12);
        assert_eq!(e.algebra.nilpotency_class(), Some(2));
        assert!(crate::connection::biinvariant_connection(&e.algebra).curvature().is_zero());
    }
}
