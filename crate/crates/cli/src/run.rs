//! Command dispatch.

use std::path::Path;

use quadlie::connection::{biinvariant_connection, levi_civita};
use quadlie::constructions::{
    build_two_step, catalog, catalog_names, dim5_curve, oscillator_candidates, two_step_labels, two_step_metric, CatalogParams,
    Oracle, TwoStepSpec,
};
use quadlie::dynamics::{
    completeness_probe, conjugate_scan, energy_drift, integrate_geodesic, integrate_jacobi, polynomial_geodesic_check,
    right_invariant_reflection, standard_seeds, ScanOptions,
};
use quadlie::metric::check_ad_invariance;
use quadlie::scalar::parse_rational;
use quadlie::{Error, IntegratorOptions, Matrix, ProductTensor, Rational, Result, Scalar, SymmetricIso};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::args::{Command, Format, Opts};
use crate::format::{loaded_to_file, model_from_entry, parse_algebra_str, trajectory_csv, Loaded, Model};
use crate::report::{digest, to_json, RunReport};

/// Right-invariant fields must satisfy the Jacobi equation to this relative
/// residual.
pub const REFLECTION_BOUND: f64 = 1e-8;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_UNCERTIFIED: i32 = 2;

/// What a command produced: the report, optional CSV artifacts
/// `(file name, contents)`, and the exit code.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: RunReport,
    pub csv: Vec<(String, String)>,
    pub exit: i32,
}

impl Outcome {
    /// Text for standard output.
    pub fn stdout(&self, format: Format) -> String {
        match (format, self.csv.first()) {
            (Format::Csv, Some((_, body))) => body.clone(),
            _ => to_json(&self.report),
        }
    }

    /// Write report.json and CSV artifacts to `dir`, recording their paths.
    pub fn write_to(&mut self, dir: &Path) -> std::io::Result<()> {
        std::fs::create_dir_all(dir)?;
        for (name, body) in &self.csv {
            let path = dir.join(name);
            std::fs::write(&path, body)?;
            self.report.artifacts.push(path.display().to_string());
        }
        let path = dir.join("report.json");
        self.report.artifacts.push(path.display().to_string());
        std::fs::write(&path, to_json(&self.report))
    }
}

struct Verdict {
    value: Value,
    csv: Vec<(String, String)>,
    exit: i32,
}

impl Verdict {
    fn ok(value: Value) -> Self {
        Verdict { value, csv: Vec::new(), exit: EXIT_OK }
    }
}

fn split_pair(s: &str, what: &str) -> Result<(f64, f64)> {
    let bad = || Error::Validation(format!("{what} must look like A:B, got {s:?}"));
    let (a, b) = s.split_once(':').ok_or_else(bad)?;
    Ok((number(a).ok_or_else(bad)?, number(b).ok_or_else(bad)?))
}

fn number(s: &str) -> Option<f64> {
    let s = s.trim();
    parse_rational(s).map(|r| Scalar::to_f64(&r)).or_else(|| s.parse().ok()).filter(|v: &f64| v.is_finite())
}

fn rationals(s: &str, what: &str) -> Result<Vec<Rational>> {
    s.split(',')
        .map(|p| parse_rational(p).ok_or_else(|| Error::Validation(format!("{what}: {p:?} is not a rational"))))
        .collect()
}

fn params(o: &Opts) -> Result<CatalogParams> {
    let mut p = CatalogParams::default();
    if let Some(l) = &o.lambda {
        p.lambda = rationals(l, "--lambda")?;
    }
    if let Some(d) = &o.d {
        p.d = rationals(d, "--d")?.remove(0);
    }
    if let Some(c) = &o.c {
        p.c = rationals(c, "--c")?.remove(0);
    }
    Ok(p)
}

/// Load the model named by --input or --catalog; returns it with the input
/// digest.
pub fn load(o: &Opts) -> Result<(Loaded, String)> {
    match (&o.input, &o.catalog) {
        (Some(_), Some(_)) => Err(Error::Validation("give either --input or --catalog".into())),
        (Some(path), None) => {
            let bytes = std::fs::read(path).map_err(|e| Error::Parse { line: 0, msg: format!("{}: {e}", path.display()) })?;
            let text = String::from_utf8(bytes.clone()).map_err(|_| Error::Parse { line: 0, msg: "input is not UTF-8".into() })?;
            Ok((parse_algebra_str(&text)?, digest(&bytes)))
        }
        (None, Some(name)) => {
            let loaded = Loaded::Exact(model_from_entry(catalog(name, &params(o)?)?));
            let canonical = to_json(&loaded_to_file(&loaded));
            Ok((loaded, digest(canonical.as_bytes())))
        }
        (None, None) => Err(Error::Validation("one of --input or --catalog is required".into())),
    }
}

/// Parse `label:value,...` (or plain values) into a vector of length `n`.
pub fn parse_vector(s: &str, labels: &[String]) -> Result<Vec<f64>> {
    let n = labels.len();
    let parts: Vec<&str> = s.split(',').map(str::trim).filter(|p| !p.is_empty()).collect();
    let labelled = parts.iter().any(|p| p.contains(':'));
    if !labelled {
        let v: Vec<f64> = parts
            .iter()
            .map(|p| number(p).ok_or_else(|| Error::Validation(format!("{p:?} is not a number"))))
            .collect::<Result<_>>()?;
        if v.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: v.len() });
        }
        return Ok(v);
    }
    let mut v = vec![0.0; n];
    for p in parts {
        let (label, value) = p.rsplit_once(':').ok_or_else(|| Error::Validation(format!("expected label:value, got {p:?}")))?;
        let idx = labels
            .iter()
            .position(|l| l == label)
            .or_else(|| labels.iter().position(|l| *l == format!("e{label}")))
            .ok_or_else(|| Error::Validation(format!("unknown basis label {label:?}; labels are {labels:?}")))?;
        v[idx] = number(value).ok_or_else(|| Error::Validation(format!("{value:?} is not a number")))?;
    }
    Ok(v)
}

fn options(o: &Opts) -> Result<IntegratorOptions> {
    IntegratorOptions::with_tol(o.tol)
}

fn product<T: Scalar>(m: &Model<T>, o: &Opts) -> Result<ProductTensor<T>> {
    if o.biinvariant {
        let k = m.form.as_ref().ok_or_else(|| Error::Validation("--biinvariant needs an ad-invariant form".into()))?;
        if !check_ad_invariance(&m.algebra, k)?.invariant {
            return Err(Error::Validation("--biinvariant needs an ad-invariant form".into()));
        }
        return Ok(biinvariant_connection(&m.algebra));
    }
    let g = m.metric.as_ref().ok_or_else(|| Error::Validation("this command needs a metric (\"form\" in the file)".into()))?;
    levi_civita(&m.algebra, g)
}

fn required<'a>(v: &'a Option<String>, flag: &str) -> Result<&'a str> {
    v.as_deref().ok_or_else(|| Error::Validation(format!("{flag} is required")))
}

fn rendered<T: Scalar>(v: &[T]) -> Vec<String> {
    v.iter().map(Scalar::render).collect()
}

/// CSV column names `x0, x1, ...`.
fn names(prefix: &str, labels: &[String]) -> Vec<String> {
    (0..labels.len()).map(|i| format!("{prefix}{i}")).collect()
}

fn validate<T: Scalar>(m: &Model<T>) -> Result<Verdict> {
    let form = match &m.form {
        Some(k) => {
            let inv = check_ad_invariance(&m.algebra, k)?;
            json!({
                "signature": k.signature(),
                "ad_invariant": inv.invariant,
                "ad_invariance_residual": inv.worst_residual.render(),
                "ad_invariance_tolerance": inv.tolerance,
            })
        }
        None => Value::Null,
    };
    Ok(Verdict::ok(json!({
        "valid": true,
        "dim": m.algebra.dim(),
        "basis": m.algebra.labels(),
        "form": form,
        "iso": m.iso.is_some(),
        "metric_signature": m.metric.as_ref().map(|g| g.signature()),
        "notes": m.notes,
    })))
}

fn analyze<T: Scalar>(m: &Model<T>) -> Result<Verdict> {
    let r = m.algebra.structure_report();
    let basis = |s: &quadlie::Subspace<T>| s.basis().iter().map(|v| rendered(v)).collect::<Vec<_>>();
    let polynomial = match (r.nilpotency_class, &m.form) {
        (Some(_), Some(k)) => {
            let u = match &m.iso {
                Some(u) => u.clone(),
                None => SymmetricIso::new(k, Matrix::identity(m.algebra.dim()))?,
            };
            match polynomial_geodesic_check(&m.algebra, &u, 3) {
                Ok(v) => serde_json::to_value(v).expect("serializable"),
                Err(e) => json!({ "error": e.to_string() }),
            }
        }
        _ => Value::Null,
    };
    Ok(Verdict::ok(json!({
        "dim": m.algebra.dim(),
        "center": basis(&r.center),
        "center_dim": r.center.dim(),
        "derived_dim": r.derived.dim(),
        "lower_central_dims": r.lower_central.iter().map(|s| s.dim()).collect::<Vec<_>>(),
        "nilpotency_class": r.nilpotency_class,
        "solvable": r.solvable,
        "unimodular": r.unimodular,
        "abelian": r.abelian,
        "metric_signature": m.metric.as_ref().map(|g| g.signature()),
        "polynomial_geodesics": polynomial,
    })))
}

fn connection<T: Scalar>(m: &Model<T>, o: &Opts) -> Result<Verdict> {
    let p = product(m, o)?;
    let n = p.dim();
    let mut entries = Vec::new();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let g = p.coefficient(i, j, k);
                if !g.is_zero() {
                    entries.push(json!({"i": i, "j": j, "k": k, "value": g.render()}));
                }
            }
        }
    }
    Ok(Verdict::ok(json!({
        "convention": "e_i e_j = sum_k Gamma^k_ij e_k",
        "gamma": entries,
        "torsion_free": p.torsion_residual().is_negligible(1.0 + p.max_coefficient()),
        "metric_skew": p.metric_skew_residual().map(|r| r.is_negligible(1.0 + p.max_coefficient())),
    })))
}

fn curvature<T: Scalar>(m: &Model<T>, o: &Opts) -> Result<Verdict> {
    let p = product(m, o)?;
    let r = p.curvature();
    let tol = p.curvature_tolerance();
    let n = p.dim();
    let mut entries = Vec::new();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let v = r.component(i, j, k, l);
                    if !v.is_negligible(1.0) || (!T::is_exact() && v.magnitude() > tol) {
                        entries.push(json!({"i": i, "j": j, "k": k, "l": l, "value": v.render()}));
                    }
                }
            }
        }
    }
    Ok(Verdict::ok(json!({
        "convention": "R(x,y)z = [x,y]z - x(yz) + y(xz); R(e_i,e_j)e_k = sum_l R^l_ijk e_l",
        "entries": entries,
        "max_entry": r.max_entry().render(),
        "tolerance": tol,
    })))
}

fn flat<T: Scalar>(m: &Model<T>, o: &Opts) -> Result<Verdict> {
    let rep = product(m, o)?.flatness_report();
    let exit = if rep.flat { EXIT_OK } else { EXIT_UNCERTIFIED };
    Ok(Verdict { value: serde_json::to_value(rep).expect("serializable"), csv: Vec::new(), exit })
}

fn geodesic<T: Scalar>(m: &Model<T>, o: &Opts) -> Result<Verdict> {
    let p = product(m, o)?;
    let labels = m.algebra.labels();
    let x0 = parse_vector(required(&o.x, "--x")?, labels)?;
    let span = split_pair(o.span.as_deref().unwrap_or("0:10"), "--span")?;
    let tr = integrate_geodesic(&p, &x0, span, options(o)?)?;
    let drift = p.metric().filter(|_| tr.status.is_completed()).map(|g| energy_drift(&tr, &g.to_f64()));
    let (t_end, last) = tr.last().map(|(t, s)| (t, s.to_vec())).unwrap_or((span.0, x0.clone()));
    let csv = trajectory_csv(&tr, &names("x", labels));
    Ok(Verdict {
        value: json!({
            "status": tr.status,
            "samples": tr.len(),
            "t_end": t_end,
            "final_state": last,
            "energy_drift": drift,
        }),
        csv: vec![("geodesic.csv".into(), csv)],
        exit: EXIT_OK,
    })
}

fn jacobi<T: Scalar>(m: &Model<T>, o: &Opts) -> Result<Verdict> {
    let p = product(m, o)?;
    let labels = m.algebra.labels();
    let n = labels.len();
    let x0 = parse_vector(required(&o.x, "--x")?, labels)?;
    let y0 = match &o.y {
        Some(s) => parse_vector(s, labels)?,
        None => vec![0.0; n],
    };
    let span = split_pair(o.span.as_deref().unwrap_or("0:10"), "--span")?;
    if o.right_invariant {
        let chk = right_invariant_reflection(&p, &x0, &y0, span, options(o)?)?;
        let mut cols = names("x", labels);
        cols.extend(names("y", labels));
        let exit = if chk.residual <= REFLECTION_BOUND { EXIT_OK } else { EXIT_UNCERTIFIED };
        return Ok(Verdict {
            value: json!({
                "status": chk.trajectory.status,
                "residual": chk.residual,
                "bound": REFLECTION_BOUND,
                "samples": chk.trajectory.len(),
            }),
            csv: vec![("jacobi.csv".into(), trajectory_csv(&chk.trajectory, &cols))],
            exit,
        });
    }
    let v0 = parse_vector(required(&o.ydot, "--ydot")?, labels)?;
    let tr = integrate_jacobi(&p, &x0, &y0, &v0, span, options(o)?)?;
    let mut cols = names("x", labels);
    cols.extend(names("y", labels));
    cols.extend(names("ydot", labels));
    let last = tr.last().map(|(t, s)| json!({"t": t, "y": &s[n..2 * n], "ydot": &s[2 * n..]}));
    Ok(Verdict {
        value: json!({ "status": tr.status, "samples": tr.len(), "final": last }),
        csv: vec![("jacobi.csv".into(), trajectory_csv(&tr, &cols))],
        exit: EXIT_OK,
    })
}

fn conjugate<T: Scalar>(m: &Model<T>, o: &Opts) -> Result<Verdict> {
    let p = product(m, o)?;
    let x0 = parse_vector(required(&o.x, "--x")?, m.algebra.labels())?;
    let window = split_pair(o.window.as_deref().unwrap_or("0:10"), "--window")?;
    let candidates = match &m.oracle {
        Oracle::Oscillator { lambda } if x0[0] != 0.0 => Some(oscillator_candidates(lambda, x0[0], window.0, window.1)),
        _ => None,
    };
    let opts = ScanOptions { grid: o.grid, integrator: options(o)?, ..ScanOptions::default() };
    let rep = conjugate_scan(&p, &x0, window, opts, candidates.as_ref())?;
    Ok(Verdict::ok(json!({
        "root_count": rep.roots.len(),
        "root_times": rep.times(),
        "report": rep,
    })))
}

fn probe<T: Scalar>(m: &Model<T>, o: &Opts) -> Result<Verdict> {
    let p = product(m, o)?;
    let n = m.algebra.dim();
    let seeds: Vec<Vec<f64>> = match (o.seed.as_deref(), &o.x) {
        (Some(_), Some(_)) => return Err(Error::Validation("give either --seed or --x".into())),
        (None, Some(x)) => vec![parse_vector(x, m.algebra.labels())?],
        (Some("paper"), None) => match &m.oracle {
            Oracle::Dim5 { c } => vec![dim5_curve(*c, 0.0).to_vec()],
            _ => return Err(Error::Validation("--seed paper is defined for dim5-nilpotent only".into())),
        },
        (Some("standard") | None, None) => standard_seeds(n),
        (Some(s), None) => {
            let count: usize = s
                .strip_prefix("random:")
                .and_then(|c| c.parse().ok())
                .ok_or_else(|| Error::Validation(format!("unknown seed spec {s:?}")))?;
            let mut rng = ChaCha8Rng::seed_from_u64(o.rng_seed);
            (0..count).map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect()
        }
    };
    let t_max = match (o.t_max, &o.span) {
        (Some(t), _) => t,
        (None, Some(s)) => {
            let (a, b) = split_pair(s, "--span")?;
            a.abs().max(b.abs())
        }
        (None, None) => 100.0,
    };
    let rep = completeness_probe(&p, &seeds, t_max, options(o)?)?;
    Ok(Verdict::ok(json!({
        "incomplete": rep.incomplete,
        "t_max": rep.t_max,
        "results": rep.results,
    })))
}

fn dispatch<T: Scalar>(cmd: &Command, m: &Model<T>) -> Result<Verdict> {
    let o = cmd.opts();
    match cmd {
        Command::Validate(_) => validate(m),
        Command::Analyze(_) => analyze(m),
        Command::Connection(_) => connection(m, o),
        Command::Curvature(_) => curvature(m, o),
        Command::Flat(_) => flat(m, o),
        Command::Geodesic(_) => geodesic(m, o),
        Command::Jacobi(_) => jacobi(m, o),
        Command::Conjugate(_) => conjugate(m, o),
        Command::Probe(_) => probe(m, o),
        Command::Build(_) | Command::Catalog(_) | Command::FamilySweep(_) => unreachable!("handled without a model"),
    }
}

fn catalog_command(o: &Opts) -> Result<(Verdict, String, String)> {
    let Some(_) = &o.catalog else {
        let v = json!({ "names": catalog_names() });
        return Ok((Verdict::ok(v), digest(b""), "catalog".into()));
    };
    let (loaded, dig) = load(o)?;
    let Loaded::Exact(m) = &loaded else { unreachable!("catalog entries are exact") };
    let r = m.algebra.structure_report();
    let oracle = match &m.oracle {
        Oracle::E2 => "e2 closed-form geodesics and exponential map".to_string(),
        Oracle::Oscillator { lambda } => format!("oscillator Jacobi fields, lambda = {lambda:?}"),
        Oracle::Dim5 { c } => format!("incomplete solution with c = {c}"),
        Oracle::Dim4B => "explicit left-symmetric product".to_string(),
        Oracle::None => "none".to_string(),
    };
    let v = json!({
        "name": m.name,
        "dim": m.algebra.dim(),
        "basis": m.algebra.labels(),
        "quadratic": m.form.is_some(),
        "nilpotency_class": r.nilpotency_class,
        "unimodular": r.unimodular,
        "oracle": oracle,
        "notes": m.notes,
        "file": loaded_to_file(&loaded),
    });
    Ok((Verdict::ok(v), dig, m.name.clone()))
}

fn random_phi(rng: &mut ChaCha8Rng, m: usize) -> Matrix<Rational> {
    loop {
        let phi = Matrix::from_fn(m, m, |_, _| Rational::from_ratio(rng.gen_range(-3..=3), rng.gen_range(1..=2)));
        if phi.determinant() != Rational::from_int(0) {
            return phi;
        }
    }
}

fn family_sweep(o: &Opts) -> Result<Verdict> {
    let mut rng = ChaCha8Rng::seed_from_u64(o.rng_seed);
    let spec = TwoStepSpec::<Rational>::volume_form();
    let (alg, _) = build_two_step(&spec)?;
    let mut rows = Vec::new();
    let mut csv = String::from("index,flat,characteristic,invariant_factor_degrees\n");
    let mut all_flat = true;
    for idx in 0..o.samples {
        let phi = random_phi(&mut rng, spec.dim_v);
        let s = spec.clone().with_phi(phi.clone());
        let tm = two_step_metric(&s)?;
        let rep = levi_civita(&alg, &tm.metric)?.flatness_report();
        all_flat &= rep.flat;
        let inv = tm.invariants.summary();
        csv.push_str(&format!(
            "{idx},{},{},{}\n",
            rep.flat,
            inv.characteristic.join(" "),
            inv.invariant_factor_degrees.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(" ")
        ));
        rows.push(json!({
            "index": idx,
            "phi": phi.to_rows().iter().map(|r| rendered(r)).collect::<Vec<_>>(),
            "flat": rep.flat,
            "invariants": inv,
        }));
    }
    Ok(Verdict {
        value: json!({ "basis": two_step_labels(spec.dim_v), "all_flat": all_flat, "samples": rows }),
        csv: vec![("family.csv".into(), csv)],
        exit: if all_flat { EXIT_OK } else { EXIT_UNCERTIFIED },
    })
}

fn execute(cmd: &Command) -> Result<(Verdict, String, String, String)> {
    let o = cmd.opts();
    match cmd {
        Command::Catalog(_) => {
            let (v, d, name) = catalog_command(o)?;
            Ok((v, d, name, "exact".into()))
        }
        Command::FamilySweep(_) => Ok((family_sweep(o)?, digest(format!("family-sweep:{}", o.rng_seed).as_bytes()), "two-step".into(), "exact".into())),
        Command::Build(_) => {
            let (loaded, d) = load(o)?;
            let file = serde_json::to_value(loaded_to_file(&loaded)).expect("serializable");
            let mode = match loaded {
                Loaded::Exact(_) => "exact",
                Loaded::Float(_) => "float",
            };
            Ok((Verdict::ok(file), d, loaded.name().to_string(), mode.into()))
        }
        _ => {
            let (loaded, d) = load(o)?;
            match &loaded {
                Loaded::Exact(m) => Ok((dispatch(cmd, m)?, d, m.name.clone(), "exact".into())),
                Loaded::Float(m) => Ok((dispatch(cmd, m)?, d, m.name.clone(), "float".into())),
            }
        }
    }
}

/// Run a parsed command. `args` is echoed into the report.
pub fn run(cmd: &Command, args: &[String]) -> Outcome {
    let (verdict, input_digest, model, mode) = match execute(cmd) {
        Ok(r) => r,
        Err(e) => (
            Verdict { value: json!({ "error": e.to_string() }), csv: Vec::new(), exit: EXIT_INVALID },
            String::new(),
            String::new(),
            String::new(),
        ),
    };
    let report = RunReport {
        command: cmd.name().to_string(),
        args: args.to_vec(),
        input_digest,
        model,
        mode,
        tolerance: cmd.opts().tol,
        verdicts: verdict.value,
        artifacts: Vec::new(),
    };
    Outcome { report, csv: verdict.csv, exit: verdict.exit }
}
