//! The JSON algebra file and the text artifacts written by the commands.

use std::path::Path;

use quadlie::constructions::{
    build_double_extension, build_oscillator, build_two_step, catalog, two_step_metric, CatalogEntry, CatalogParams,
    Oracle, OscillatorSpec, TwoStepSpec,
};
use quadlie::metric::{check_ad_invariance, metric_from_iso};
use quadlie::scalar::parse_rational;
use quadlie::{Error, LieAlgebra, Matrix, Rational, Result, Scalar, SymBilinearForm, SymmetricIso, Trajectory};
use serde::{Deserialize, Serialize};

/// A coefficient as written in a file: an integer, a decimal, or a string
/// holding either `"p/q"` or a decimal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RawCoef {
    Int(i64),
    Float(f64),
    Text(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub k: usize,
    pub coef: RawCoef,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BracketEntry {
    pub i: usize,
    pub j: usize,
    pub terms: Vec<Term>,
}

/// `theta(e_a, e_b, e_c) = coef`, extended by antisymmetry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaEntry {
    pub a: usize,
    pub b: usize,
    pub c: usize,
    pub coef: RawCoef,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub brackets: Option<Vec<BracketEntry>>,
    /// Lower triangle, row by row: `[[g00], [g10, g11], ...]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub form: Option<Vec<Vec<RawCoef>>>,
    /// Row-major.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iso: Option<Vec<Vec<RawCoef>>>,
    /// One of `oscillator`, `two-step`, `double-extension`, `catalog`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub construct: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<Vec<RawCoef>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim_v: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<Vec<ThetaEntry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<Vec<Vec<RawCoef>>>,
    /// Lower triangle of `k0` for `double-extension`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k0: Option<Vec<Vec<RawCoef>>>,
    /// Row-major skew map for `double-extension`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub skew: Option<Vec<Vec<RawCoef>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<RawCoef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<RawCoef>,
}

/// An algebra with its optional form `k` and iso `u`. `metric` is `k(u., .)`
/// when `u` is present and `k` otherwise.
#[derive(Debug, Clone, PartialEq)]
pub struct Model<T> {
    pub name: String,
    pub algebra: LieAlgebra<T>,
    pub form: Option<SymBilinearForm<T>>,
    pub iso: Option<SymmetricIso<T>>,
    pub metric: Option<SymBilinearForm<T>>,
    pub oracle: Oracle,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Loaded {
    Exact(Model<Rational>),
    Float(Model<f64>),
}

impl Loaded {
    pub fn name(&self) -> &str {
        match self {
            Loaded::Exact(m) => &m.name,
            Loaded::Float(m) => &m.name,
        }
    }
}

#[derive(Debug, Clone)]
enum Coef {
    Exact(Rational),
    Float(f64),
}

/// Scalars a file can be read into.
trait FileScalar: Scalar {
    fn from_coef(c: Coef) -> Self;
}

impl FileScalar for Rational {
    fn from_coef(c: Coef) -> Self {
        match c {
            Coef::Exact(r) => r,
            Coef::Float(_) => unreachable!("exact files hold no decimals"),
        }
    }
}

impl FileScalar for f64 {
    fn from_coef(c: Coef) -> Self {
        match c {
            Coef::Exact(r) => Scalar::to_f64(&r),
            Coef::Float(v) => v,
        }
    }
}

fn line_of(text: &str, needle: &str) -> usize {
    text.lines().position(|l| l.contains(needle)).map_or(0, |p| p + 1)
}

fn parse_error(text: &str, needle: &str, msg: impl Into<String>) -> Error {
    Error::Parse { line: line_of(text, needle), msg: msg.into() }
}

fn coef(text: &str, raw: &RawCoef) -> Result<Coef> {
    match raw {
        RawCoef::Int(v) => Ok(Coef::Exact(Rational::from_int(*v))),
        RawCoef::Float(v) => Ok(Coef::Float(*v)),
        RawCoef::Text(s) => {
            if let Some(r) = parse_rational(s) {
                return Ok(Coef::Exact(r));
            }
            match s.trim().parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(Coef::Float(v)),
                _ => Err(parse_error(text, &format!("\"{s}\""), format!("bad coefficient {s:?}"))),
            }
        }
    }
}

impl AlgebraFile {
    fn coefficients(&self) -> Vec<&RawCoef> {
        let mut out: Vec<&RawCoef> = Vec::new();
        for b in self.brackets.iter().flatten() {
            out.extend(b.terms.iter().map(|t| &t.coef));
        }
        for m in [&self.form, &self.iso, &self.phi, &self.k0, &self.skew].into_iter().flatten() {
            out.extend(m.iter().flatten());
        }
        out.extend(self.lambda.iter().flatten());
        out.extend(self.theta.iter().flatten().map(|t| &t.coef));
        out.extend(self.d.iter().chain(self.c.iter()));
        out
    }
}

struct Reader<'a> {
    text: &'a str,
    file: &'a AlgebraFile,
}

impl Reader<'_> {
    fn scalar<T: FileScalar>(&self, raw: &RawCoef) -> Result<T> {
        Ok(T::from_coef(coef(self.text, raw)?))
    }

    fn vector<T: FileScalar>(&self, raw: &[RawCoef]) -> Result<Vec<T>> {
        raw.iter().map(|c| self.scalar(c)).collect()
    }

    fn matrix<T: FileScalar>(&self, rows: &[Vec<RawCoef>], key: &str) -> Result<Matrix<T>> {
        let rows = rows.iter().map(|r| self.vector(r)).collect::<Result<Vec<Vec<T>>>>()?;
        Matrix::from_rows(&rows).map_err(|_| parse_error(self.text, key, format!("\"{key}\" is not a rectangular matrix")))
    }

    /// Symmetric matrix from its lower triangle.
    fn lower<T: FileScalar>(&self, rows: &[Vec<RawCoef>], n: usize, key: &str) -> Result<Matrix<T>> {
        let shape_ok = rows.len() == n && rows.iter().enumerate().all(|(i, r)| r.len() == i + 1);
        if !shape_ok {
            return Err(parse_error(self.text, &format!("\"{key}\""), format!("\"{key}\" must list the lower triangle of a {n}x{n} matrix")));
        }
        let rows = rows.iter().map(|r| self.vector(r)).collect::<Result<Vec<Vec<T>>>>()?;
        Ok(Matrix::from_fn(n, n, |i, j| if j <= i { rows[i][j].clone() } else { rows[j][i].clone() }))
    }

    fn forbid(&self, keys: &[(&str, bool)]) -> Result<()> {
        for (key, present) in keys {
            if *present {
                return Err(parse_error(self.text, &format!("\"{key}\""), format!("\"{key}\" is not allowed here")));
            }
        }
        Ok(())
    }

    fn explicit<T: FileScalar>(&self) -> Result<Model<T>> {
        let f = self.file;
        let n = f.dim.ok_or_else(|| parse_error(self.text, "{", "missing \"dim\""))?;
        let mut entries = Vec::new();
        for b in f.brackets.iter().flatten() {
            let terms = b.terms.iter().map(|t| Ok((t.k, self.scalar(&t.coef)?))).collect::<Result<Vec<(usize, T)>>>()?;
            entries.push((b.i, b.j, terms));
        }
        let algebra = LieAlgebra::from_brackets(n, f.basis.clone(), &entries)?;
        let form = match &f.form {
            Some(rows) => Some(SymBilinearForm::new(self.lower(rows, n, "form")?)?),
            None => None,
        };
        let (iso, metric) = match (&f.iso, &form) {
            (Some(rows), Some(k)) => {
                let (iso, metric) = metric_from_iso(k, self.matrix(rows, "iso")?)?;
                (Some(iso), Some(metric))
            }
            (Some(_), None) => return Err(Error::Validation("\"iso\" needs a \"form\"".into())),
            (None, form) => (None, form.clone()),
        };
        Ok(Model { name: "file".into(), algebra, form, iso, metric, oracle: Oracle::None, notes: Vec::new() })
    }

    fn constructed<T: FileScalar>(&self, kind: &str) -> Result<Model<T>> {
        let f = self.file;
        self.forbid(&[("dim", f.dim.is_some()), ("basis", f.basis.is_some()), ("form", f.form.is_some()), ("iso", f.iso.is_some())])?;
        match kind {
            "oscillator" => {
                let raw = f.lambda.as_ref().ok_or_else(|| parse_error(self.text, "oscillator", "missing \"lambda\""))?;
                let lambda: Vec<T> = self.vector(raw)?;
                let oracle = Oracle::Oscillator { lambda: lambda.iter().map(Scalar::to_f64).collect() };
                let (algebra, k) = build_oscillator(&OscillatorSpec { lambda })?;
                Ok(Model { name: "oscillator".into(), algebra, form: Some(k.clone()), iso: None, metric: Some(k), oracle, notes: Vec::new() })
            }
            "two-step" => {
                let m = f.dim_v.ok_or_else(|| parse_error(self.text, "two-step", "missing \"dim_v\""))?;
                let mut spec = match &f.theta {
                    Some(entries) => {
                        let triples = entries.iter().map(|e| Ok((e.a, e.b, e.c, self.scalar(&e.coef)?))).collect::<Result<Vec<_>>>()?;
                        TwoStepSpec::from_triples(m, &triples)?
                    }
                    None if m == 3 => TwoStepSpec::volume_form(),
                    None => return Err(parse_error(self.text, "two-step", "missing \"theta\"")),
                };
                if let Some(rows) = &f.phi {
                    spec = spec.with_phi(self.matrix(rows, "phi")?);
                }
                let (algebra, k) = build_two_step(&spec)?;
                let (iso, metric) = if spec.phi.is_some() {
                    let tm = two_step_metric(&spec)?;
                    (Some(tm.iso), tm.metric)
                } else {
                    (None, k.clone())
                };
                Ok(Model { name: "two-step".into(), algebra, form: Some(k), iso, metric: Some(metric), oracle: Oracle::None, notes: Vec::new() })
            }
            "double-extension" => {
                let skew = f.skew.as_ref().ok_or_else(|| parse_error(self.text, "double-extension", "missing \"skew\""))?;
                let theta: Matrix<T> = self.matrix(skew, "skew")?;
                let k0rows = f.k0.as_ref().ok_or_else(|| parse_error(self.text, "double-extension", "missing \"k0\""))?;
                let k0 = SymBilinearForm::new(self.lower(k0rows, theta.rows(), "k0")?)?;
                let (algebra, k) = build_double_extension(&k0, &theta)?;
                Ok(Model { name: "double-extension".into(), algebra, form: Some(k.clone()), iso: None, metric: Some(k), oracle: Oracle::None, notes: Vec::new() })
            }
            other => Err(parse_error(self.text, other, format!("unknown construct {other:?}"))),
        }
    }
}

/// Parse catalog parameters; only exact values are accepted.
fn catalog_params(text: &str, f: &AlgebraFile) -> Result<CatalogParams> {
    let exact = |raw: &RawCoef| match coef(text, raw)? {
        Coef::Exact(r) => Ok(r),
        Coef::Float(v) => Err(Error::Validation(format!("catalog parameters must be exact, got {v}"))),
    };
    let mut p = CatalogParams::default();
    if let Some(l) = &f.lambda {
        p.lambda = l.iter().map(exact).collect::<Result<_>>()?;
    }
    if let Some(d) = &f.d {
        p.d = exact(d)?;
    }
    if let Some(c) = &f.c {
        p.c = exact(c)?;
    }
    Ok(p)
}

pub fn model_from_entry(e: CatalogEntry) -> Model<Rational> {
    Model { name: e.name, algebra: e.algebra, form: e.quadratic_form, iso: e.iso, metric: e.metric, oracle: e.oracle, notes: e.notes }
}

/// Parse an algebra file held in memory.
pub fn parse_algebra_str(text: &str) -> Result<Loaded> {
    let file: AlgebraFile = serde_json::from_str(text).map_err(|e| Error::Parse { line: e.line(), msg: e.to_string() })?;
    if file.construct.is_some() && file.brackets.is_some() {
        return Err(parse_error(text, "\"construct\"", "\"construct\" and \"brackets\" are mutually exclusive"));
    }
    let mut exact = true;
    for c in file.coefficients() {
        if let Coef::Float(_) = coef(text, c)? {
            exact = false;
        }
    }
    let reader = Reader { text, file: &file };
    let loaded = match file.construct.as_deref() {
        Some("catalog") => {
            let name = file.name.as_deref().ok_or_else(|| parse_error(text, "catalog", "missing \"name\""))?;
            Loaded::Exact(model_from_entry(catalog(name, &catalog_params(text, &file)?)?))
        }
        Some(kind) if exact => Loaded::Exact(reader.constructed(kind)?),
        Some(kind) => Loaded::Float(reader.constructed(kind)?),
        None if exact => Loaded::Exact(reader.explicit()?),
        None => Loaded::Float(reader.explicit()?),
    };
    if let Loaded::Exact(m) = &loaded {
        check_form(m)?;
    }
    Ok(loaded)
}

/// A construction must yield an ad-invariant form; explicit files may carry
/// any metric.
fn check_form(m: &Model<Rational>) -> Result<()> {
    if m.name == "file" {
        return Ok(());
    }
    if let Some(k) = &m.form {
        let inv = check_ad_invariance(&m.algebra, k)?;
        if !inv.invariant {
            return Err(Error::Validation(format!("{} form is not ad-invariant", m.name)));
        }
    }
    Ok(())
}

pub fn parse_algebra_file(path: &Path) -> Result<Loaded> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse { line: 0, msg: format!("{}: {e}", path.display()) })?;
    parse_algebra_str(&text)
}

fn raw<T: Scalar>(v: &T) -> RawCoef {
    RawCoef::Text(v.render())
}

fn raw_rows<T: Scalar>(m: &Matrix<T>) -> Vec<Vec<RawCoef>> {
    m.to_rows().iter().map(|r| r.iter().map(raw).collect()).collect()
}

/// Explicit-bracket file for a model. Exact values are written as `"p/q"`
/// strings, floats with 17 significant digits.
pub fn to_algebra_file<T: Scalar>(m: &Model<T>) -> AlgebraFile {
    let alg = &m.algebra;
    let n = alg.dim();
    let mut brackets = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let terms: Vec<Term> = (0..n)
                .filter(|&k| !alg.constant(i, j, k).is_zero())
                .map(|k| Term { k, coef: raw(alg.constant(i, j, k)) })
                .collect();
            if !terms.is_empty() {
                brackets.push(BracketEntry { i, j, terms });
            }
        }
    }
    let form = m.form.as_ref().or(m.metric.as_ref().filter(|_| m.iso.is_none())).map(|k| {
        let g = k.matrix();
        (0..n).map(|i| (0..=i).map(|j| raw(&g[(i, j)])).collect()).collect()
    });
    AlgebraFile {
        dim: Some(n),
        basis: Some(alg.labels().to_vec()),
        brackets: Some(brackets),
        form,
        iso: m.iso.as_ref().map(|u| raw_rows(u.matrix())),
        ..AlgebraFile::default()
    }
}

pub fn loaded_to_file(l: &Loaded) -> AlgebraFile {
    match l {
        Loaded::Exact(m) => to_algebra_file(m),
        Loaded::Float(m) => to_algebra_file(m),
    }
}

/// CSV with header `t,<names>`, one row per sample.
pub fn trajectory_csv(tr: &Trajectory, names: &[String]) -> String {
    let mut out = String::from("t");
    for n in names {
        out.push(',');
        out.push_str(n);
    }
    out.push('\n');
    for (t, s) in tr.times.iter().zip(&tr.states) {
        out.push_str(&format!("{t:.16e}"));
        for v in s {
            out.push_str(&format!(",{v:.16e}"));
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const E2: &str = r#"{
  "dim": 3,
  "basis": ["e1", "e2", "e3"],
  "brackets": [
    {"i": 2, "j": 0, "terms": [{"k": 1, "coef": "1"}]},
    {"i": 2, "j": 1, "terms": [{"k": 0, "coef": "-1"}]}
  ],
  "form": [["1"], ["0", "1"], ["0", "0", "-1"]]
}"#;

    fn exact(l: Loaded) -> Model<Rational> {
        match l {
            Loaded::Exact(m) => m,
            Loaded::Float(_) => panic!("expected exact"),
        }
    }

    #[test]
    fn explicit_e2_matches_catalog() {
        let m = exact(parse_algebra_str(E2).unwrap());
        let e = catalog("e2-motion", &CatalogParams::default()).unwrap();
        assert_eq!(m.algebra, e.algebra);
        assert_eq!(m.metric, e.metric);
    }

    #[test]
    fn decimals_switch_to_float() {
        let text = E2.replace("\"-1\"]]", "-1.5]]");
        match parse_algebra_str(&text).unwrap() {
            Loaded::Float(m) => assert_eq!(m.metric.unwrap().matrix()[(2, 2)], -1.5),
            Loaded::Exact(_) => panic!("expected float"),
        }
    }

    #[test]
    fn oscillator_construct() {
        let m = exact(parse_algebra_str(r#"{"construct": "oscillator", "lambda": ["1"]}"#).unwrap());
        let (alg, k) = build_oscillator(&OscillatorSpec { lambda: vec![Rational::from_int(1)] }).unwrap();
        assert_eq!(m.algebra, alg);
        assert_eq!(m.form, Some(k));
    }

    #[test]
    fn jacobi_violation_is_rejected() {
        // [e0,e1]=e1, [e0,e2]=e2, [e1,e2]=e0 fails the Jacobi identity
        let text = r#"{"dim": 3, "brackets": [
            {"i": 0, "j": 1, "terms": [{"k": 1, "coef": 1}]},
            {"i": 0, "j": 2, "terms": [{"k": 2, "coef": 1}]},
            {"i": 1, "j": 2, "terms": [{"k": 0, "coef": 1}]}]}"#;
        assert!(matches!(parse_algebra_str(text), Err(Error::JacobiViolation { .. })));
    }

    #[test]
    fn parse_errors_carry_lines() {
        let bad = "{\n  \"dim\": 3,\n  \"brackets\": [\n    {\"i\": 0 \"j\": 1}\n  ]\n}";
        assert!(matches!(parse_algebra_str(bad), Err(Error::Parse { line: 4, .. })));
        let coef = "{\n \"dim\": 2,\n \"brackets\": [{\"i\": 0, \"j\": 1, \"terms\": [{\"k\": 0, \"coef\": \"one\"}]}]\n}";
        assert!(matches!(parse_algebra_str(coef), Err(Error::Parse { line: 3, .. })));
        let both = r#"{"construct": "oscillator", "lambda": [1], "brackets": []}"#;
        assert!(matches!(parse_algebra_str(both), Err(Error::Parse { .. })));
    }

    #[test]
    fn round_trip_keeps_exact_values() {
        for name in ["dim5-nilpotent", "oscillator(1,2)", "e2-motion", "two-step-volume"] {
            let m = model_from_entry(catalog(name, &CatalogParams::default()).unwrap());
            let text = serde_json::to_string_pretty(&to_algebra_file(&m)).unwrap();
            let back = exact(parse_algebra_str(&text).unwrap());
            assert_eq!(back.algebra, m.algebra, "{name}");
            assert_eq!(back.metric, m.metric, "{name}");
            assert_eq!(back.iso, m.iso, "{name}");
        }
        let m = model_from_entry(catalog("oscillator(1/3)", &CatalogParams::default()).unwrap());
        let text = serde_json::to_string(&to_algebra_file(&m)).unwrap();
        assert!(text.contains("\"1/3\""));
    }

    #[test]
    fn float_round_trip_is_bitwise() {
        let text = E2.replace("\"-1\"]]", "-0.1]]");
        let Loaded::Float(m) = parse_algebra_str(&text).unwrap() else { panic!() };
        let again = serde_json::to_string(&to_algebra_file(&m)).unwrap();
        let Loaded::Float(back) = parse_algebra_str(&again).unwrap() else { panic!() };
        assert_eq!(back.metric, m.metric);
        assert_eq!(back.algebra, m.algebra);
    }

    #[test]
    fn csv_header() {
        let tr = Trajectory { times: vec![0.0, 1.0], states: vec![vec![1.0, 2.0], vec![3.0, 4.0]], status: quadlie::Status::Completed(1.0) };
        let csv = trajectory_csv(&tr, &["x0".into(), "x1".into()]);
        assert!(csv.starts_with("t,x0,x1\n0.0000000000000000e0,1.0000000000000000e0,2.0000000000000000e0\n"));
        assert_eq!(csv.lines().count(), 3);
    }
}
