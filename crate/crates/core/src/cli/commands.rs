use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;
use serde_json::{json, Value};

use crate::alf::{sample_directions, AlfError, HomogenizedLyapunov};
use crate::certs::{
    gram_euler_identity, verify_gram, verify_multiplier, GramCertificate, GramSpec,
    MultiplierCertificate, MultiplierSpec, SampleGrid,
};
use crate::dynsys::{check_decrease, check_invariance, rk4, DecreaseOptions, PolyVectorField};
use crate::homogenize::{homogeneous_parts, homogenize, HomogenizeError};
use crate::poly::MultiPoly;

use super::problem::{
    ProblemFile, DEFAULT_H, DEFAULT_INVARIANCE_DIRS, DEFAULT_LEVELS, DEFAULT_N_THETA, DEFAULT_T,
};
use super::{Cli, Exit, Outcome};

/// Number of random starts for the decrease check when no `x0` is given.
const RANDOM_STARTS: usize = 8;
const START_RADIUS: (f64, f64) = (0.5, 5.0);

pub(super) struct Context<'a> {
    pub cli: &'a Cli,
    pub problem: &'a ProblemFile,
    pub seed: u64,
}

impl Context<'_> {
    fn h(&self) -> f64 {
        self.cli.h.or(self.problem.options.h).unwrap_or(DEFAULT_H)
    }

    fn t_end(&self) -> f64 {
        self.cli.t_end.or(self.problem.options.t_end).unwrap_or(DEFAULT_T)
    }

    fn polynomial(&self) -> Result<MultiPoly, Outcome> {
        self.problem
            .polynomial()
            .map_err(|e| Outcome::error(Exit::Parse, e))
    }

    fn lyapunov(&self, p: MultiPoly) -> Result<HomogenizedLyapunov, Outcome> {
        HomogenizedLyapunov::new(p, self.problem.lyapunov_options(self.seed))
            .map_err(|e| alf_failure(&e))
    }

    fn field(&self) -> Result<PolyVectorField, Outcome> {
        let comps = self
            .problem
            .field_components()
            .map_err(|e| Outcome::error(Exit::Parse, e))?
            .ok_or_else(|| Outcome::error(Exit::Parse, "problem file has no field"))?;
        PolyVectorField::new(comps).map_err(|e| Outcome::error(Exit::CheckFailed, format!("field: {e}")))
    }

    /// `--x`, falling back to `x0` from the file.
    fn point(&self, what: &str) -> Result<Vec<f64>, Outcome> {
        let x = self
            .cli
            .x
            .clone()
            .or_else(|| self.problem.x0.clone())
            .ok_or_else(|| Outcome::error(Exit::Parse, format!("{what} needs --x or x0")))?;
        if x.len() != self.problem.nvars {
            return Err(Outcome::error(
                Exit::Parse,
                format!("--x has {} entries, nvars is {}", x.len(), self.problem.nvars),
            ));
        }
        Ok(x)
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    s
}

fn alf_exit(e: &AlfError) -> Exit {
    match e {
        AlfError::NoPositiveRoot { .. } => Exit::NoRoot,
        AlfError::MultiplePositiveRoots { .. } => Exit::MultiRoot,
        AlfError::Poly(_) => Exit::Parse,
        _ => Exit::CheckFailed,
    }
}

fn alf_json(e: &AlfError) -> Value {
    let mut v = json!({ "message": e.to_string() });
    let kind = match e {
        AlfError::ZeroPolynomial => "zero_polynomial",
        AlfError::ConstantPolynomial => "constant_polynomial",
        AlfError::OriginNotInterior { value } => {
            v["p_at_origin"] = json!(value);
            "origin_not_interior"
        }
        AlfError::NoPositiveRoot { x } => {
            v["x"] = json!(x);
            "no_positive_root"
        }
        AlfError::MultiplePositiveRoots { x, roots } => {
            v["x"] = json!(x);
            v["roots"] = json!(roots);
            "multiple_positive_roots"
        }
        AlfError::DegenerateGradient { y, value } => {
            v["y"] = json!(y);
            v["radial_derivative"] = json!(value);
            "degenerate_gradient"
        }
        AlfError::Overflow { x } => {
            v["x"] = json!(x);
            "overflow"
        }
        AlfError::ZeroState => "zero_state",
        AlfError::FieldDimension { .. } => "field_dimension",
        AlfError::Poly(_) => "dimension",
    };
    v["error"] = json!(kind);
    v
}

fn alf_failure(e: &AlfError) -> Outcome {
    Outcome {
        exit: alf_exit(e),
        stdout: to_json(&alf_json(e)),
        stderr: format!("algly: {e}\n"),
    }
}

fn names(n: usize) -> impl Fn(usize) -> String {
    move |i| if i < n { format!("x{}", i + 1) } else { format!("x{}", n + 1) }
}

pub(super) fn decompose(ctx: &Context) -> Outcome {
    let p = match ctx.polynomial() {
        Ok(p) => p,
        Err(o) => return o,
    };
    let d = match homogeneous_parts(&p) {
        Ok(d) => d,
        Err(HomogenizeError::ZeroPolynomial) => {
            return Outcome::error(Exit::Parse, "P is identically zero")
        }
        Err(e) => return Outcome::error(Exit::Parse, e),
    };
    let n = p.nvars();
    let mut warnings = Vec::new();
    if d.degree() == 0 {
        warnings.push("P is constant: no level set to scale, no Lyapunov function".to_string());
    } else if d.constant_term() >= 0.0 {
        warnings.push(format!(
            "P(0) = {} >= 0: the origin is not interior to {{P <= 0}}",
            d.constant_term()
        ));
    }
    let h = homogenize(&d);
    let tau_name = format!("x{}", n + 1);
    Outcome::ok(
        Exit::Pass,
        to_json(&json!({
            "nvars": n,
            "degree": d.degree(),
            "parts": d.parts().iter().map(|m| m.to_string()).collect::<Vec<_>>(),
            "homogenized": h.display_with(&names(n)).to_string(),
            "tau_variable": tau_name,
            "warnings": warnings,
        })),
    )
}

pub(super) fn tau(ctx: &Context) -> Outcome {
    let run = || -> Result<Outcome, Outcome> {
        let x = ctx.point("tau")?;
        let lyap = ctx.lyapunov(ctx.polynomial()?)?;
        if x.iter().all(|&v| v == 0.0) {
            return Ok(Outcome::ok(
                Exit::Pass,
                to_json(&json!({
                    "x": x,
                    "tau": 0.0,
                    "residual": 0.0,
                    "note": "tau(0) = 0 by convention",
                })),
            ));
        }
        let t = lyap.tau(&x).map_err(|e| alf_failure(&e))?;
        let y: Vec<f64> = x.iter().map(|v| v / t).collect();
        let residual = lyap.polynomial().eval(&y).expect("dimension checked").abs();
        Ok(Outcome::ok(
            Exit::Pass,
            to_json(&json!({ "x": x, "tau": t, "residual": residual })),
        ))
    };
    run().unwrap_or_else(|o| o)
}

#[derive(Serialize)]
#[serde(rename_all = "snake_case")]
enum Status {
    Pass,
    Fail,
    Blocked,
    Skipped,
}

#[derive(Serialize)]
struct CheckEntry {
    name: &'static str,
    status: Status,
    detail: Value,
}

fn entry(name: &'static str, pass: bool, detail: Value) -> CheckEntry {
    CheckEntry {
        name,
        status: if pass { Status::Pass } else { Status::Fail },
        detail,
    }
}

fn blocked(name: &'static str, by: &str) -> CheckEntry {
    CheckEntry {
        name,
        status: Status::Blocked,
        detail: json!({ "blocked_by": by }),
    }
}

/// Random starts with norm uniform in `START_RADIUS`.
pub fn random_starts(nvars: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let v: Vec<f64> = (0..nvars).map(|_| StandardNormal.sample(&mut rng)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let r = rng.random_range(START_RADIUS.0..=START_RADIUS.1);
        if norm > 1e-12 {
            out.push(v.iter().map(|x| r * x / norm).collect());
        }
    }
    out
}

pub(super) fn verify(ctx: &Context) -> Outcome {
    let p = match ctx.polynomial() {
        Ok(p) => p,
        Err(o) => return o,
    };
    let comps = match ctx.problem.field_components() {
        Ok(Some(c)) => c,
        Ok(None) => return Outcome::error(Exit::Parse, "verify needs a field"),
        Err(e) => return Outcome::error(Exit::Parse, e),
    };
    let multiplier = match &ctx.problem.multiplier {
        Some(spec) => match MultiplierCertificate::from_spec(spec, p.nvars()) {
            Ok(c) => Some(c),
            Err(e) => return Outcome::error(Exit::Parse, format!("multiplier: {e}")),
        },
        None => None,
    };
    let mut checks = Vec::new();

    let lyap = HomogenizedLyapunov::new(p.clone(), ctx.problem.lyapunov_options(ctx.seed));
    checks.push(match &lyap {
        Ok(l) => entry(
            "origin_interior",
            true,
            json!({ "p_at_origin": l.decomposition().constant_term() }),
        ),
        Err(e) => entry("origin_interior", false, alf_json(e)),
    });
    if let Some(x0) = &ctx.problem.x0 {
        let v = p.eval(x0).expect("x0 length checked on load");
        checks.push(entry("containment", v <= 0.0, json!({ "x0": x0, "p_at_x0": v })));
    }
    let field = PolyVectorField::new(comps);
    checks.push(match &field {
        Ok(f) => entry("homogeneity", true, json!({ "nu": f.nu() })),
        Err(e) => entry("homogeneity", false, json!({ "message": e.to_string() })),
    });
    let star = lyap.as_ref().ok().map(|l| l.check_star_convex());
    checks.push(match &star {
        Some(r) => entry("star_convexity", r.pass, serde_json::to_value(r).unwrap()),
        None => blocked("star_convexity", "origin_interior"),
    });

    let ready = match (&lyap, &field, &star) {
        (Ok(l), Ok(f), Some(s)) if s.pass => Ok((l, f)),
        (Err(_), _, _) => Err("origin_interior"),
        (_, Err(_), _) => Err("homogeneity"),
        _ => Err("star_convexity"),
    };
    match ready {
        Ok((l, f)) => {
            let dirs = ctx.problem.options.invariance_dirs.unwrap_or(DEFAULT_INVARIANCE_DIRS);
            let strict = ctx.cli.strict_tol.or(ctx.problem.options.strict_tol).unwrap_or(0.0);
            checks.push(match check_invariance(&p, f, l, dirs, strict) {
                Ok(r) => entry("invariance", r.pass, serde_json::to_value(&r).unwrap()),
                Err(e) => entry("invariance", false, json!({ "message": e.to_string() })),
            });
            let (starts, source) = match &ctx.problem.x0 {
                Some(x0) => (vec![x0.clone()], "x0"),
                None => (random_starts(p.nvars(), RANDOM_STARTS, ctx.seed), "random"),
            };
            let opts = DecreaseOptions { h: ctx.h(), t_end: ctx.t_end() };
            checks.push(match check_decrease(l, f, &starts, opts) {
                Ok(r) => {
                    let mut v = serde_json::to_value(&r).unwrap();
                    v["starts"] = json!(starts);
                    v["start_source"] = json!(source);
                    v["h"] = json!(opts.h);
                    v["T"] = json!(opts.t_end);
                    entry("decrease", r.pass, v)
                }
                Err(e) => entry("decrease", false, json!({ "message": e.to_string(), "starts": starts })),
            });
        }
        Err(by) => {
            checks.push(blocked("invariance", by));
            checks.push(blocked("decrease", by));
        }
    }

    checks.push(match (&multiplier, &field) {
        (None, _) => CheckEntry {
            name: "multiplier",
            status: Status::Skipped,
            detail: json!({ "reason": "no multiplier certificate supplied" }),
        },
        (Some(_), Err(_)) => blocked("multiplier", "homogeneity"),
        (Some(c), Ok(f)) => {
            let grid = SampleGrid::default_for(p.nvars(), ctx.seed);
            match verify_multiplier(&p, f, c, &grid) {
                Ok(r) => entry("multiplier", r.pass, serde_json::to_value(&r).unwrap()),
                Err(e) => entry("multiplier", false, json!({ "message": e.to_string() })),
            }
        }
    });

    let pass = checks
        .iter()
        .all(|c| matches!(c.status, Status::Pass | Status::Skipped));
    Outcome::ok(
        if pass { Exit::Pass } else { Exit::CheckFailed },
        to_json(&json!({ "pass": pass, "seed": ctx.seed, "checks": checks })),
    )
}

pub(super) fn contour(ctx: &Context) -> Outcome {
    if ctx.problem.nvars != 2 {
        return Outcome::error(
            Exit::UnsupportedDimension,
            format!("contour needs 2 variables, problem has {}", ctx.problem.nvars),
        );
    }
    let mut levels = ctx
        .cli
        .levels
        .clone()
        .or_else(|| ctx.problem.options.levels.clone())
        .unwrap_or_else(|| DEFAULT_LEVELS.to_vec());
    if let Some(bad) = levels.iter().find(|c| !(c.is_finite() && **c > 0.0)) {
        return Outcome::error(Exit::Parse, format!("level {bad} is not a positive number"));
    }
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    let n_theta = ctx.cli.n_theta.or(ctx.problem.options.n_theta).unwrap_or(DEFAULT_N_THETA);
    if n_theta == 0 {
        return Outcome::error(Exit::Parse, "n-theta must be positive");
    }
    let lyap = match ctx.polynomial().and_then(|p| ctx.lyapunov(p)) {
        Ok(l) => l,
        Err(o) => return o,
    };
    let mut base = Vec::with_capacity(n_theta);
    for d in sample_directions(2, n_theta, 0) {
        match lyap.boundary_point(&d) {
            Ok(b) => base.push(b),
            Err(e) => return alf_failure(&e),
        }
    }
    let mut out = String::from("level,theta,x1,x2\n");
    for &c in &levels {
        for (k, b) in base.iter().enumerate() {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / n_theta as f64;
            writeln!(out, "{c},{theta},{},{}", c * b[0], c * b[1]).unwrap();
        }
    }
    Outcome::ok(Exit::Pass, out)
}

pub(super) fn simulate(ctx: &Context) -> Outcome {
    let run = || -> Result<Outcome, Outcome> {
        let x0 = ctx.point("simulate")?;
        let lyap = ctx.lyapunov(ctx.polynomial()?)?;
        let f = ctx.field()?;
        let tr = rk4(&f, &x0, ctx.h(), ctx.t_end()).map_err(|e| Outcome::error(Exit::Parse, e))?;
        let n = x0.len();
        let mut out = String::from("t");
        for i in 1..=n {
            write!(out, ",x{i}").unwrap();
        }
        out.push_str(",tau,tau_dot\n");
        let tau_at = |x: &[f64]| -> Result<(f64, f64), AlfError> {
            if x.iter().all(|&v| v == 0.0) {
                return Ok((0.0, 0.0));
            }
            Ok((lyap.tau(x)?, lyap.tau_dot(&f, x)?))
        };
        for (t, x) in tr.times.iter().zip(&tr.states) {
            let (tau, tau_dot) = match tau_at(x) {
                Ok(v) => v,
                Err(e) => {
                    writeln!(out, "# stopped at t = {t}: {e}").unwrap();
                    if tr.diverged {
                        writeln!(out, "# diverged after t = {}", tr.times.last().unwrap()).unwrap();
                    }
                    return Ok(Outcome {
                        exit: alf_exit(&e),
                        stdout: out,
                        stderr: format!("algly: {e}\n"),
                    });
                }
            };
            write!(out, "{t}").unwrap();
            for v in x {
                write!(out, ",{v}").unwrap();
            }
            writeln!(out, ",{tau},{tau_dot}").unwrap();
        }
        if tr.diverged {
            writeln!(out, "# diverged after t = {}", tr.times.last().unwrap()).unwrap();
            return Ok(Outcome::ok(Exit::CheckFailed, out));
        }
        Ok(Outcome::ok(Exit::Pass, out))
    };
    run().unwrap_or_else(|o| o)
}

pub(super) fn cert(ctx: &Context) -> Outcome {
    let n = ctx.problem.nvars;
    let value = match &ctx.cli.cert {
        Some(path) => match std::fs::read_to_string(path)
            .map_err(|e| e.to_string())
            .and_then(|t| serde_json::from_str::<Value>(&t).map_err(|e| e.to_string()))
        {
            Ok(v) => v,
            Err(e) => return Outcome::error(Exit::Parse, format!("{}: {e}", path.display())),
        },
        None => match &ctx.problem.multiplier {
            Some(m) => serde_json::to_value(m).unwrap(),
            None => return Outcome::error(Exit::Parse, "no certificate: pass --cert or add multiplier"),
        },
    };
    if value.get("basis").is_some() {
        let cert = match serde_json::from_value::<GramSpec>(value)
            .map_err(|e| e.to_string())
            .and_then(|s| GramCertificate::from_spec(&s, n).map_err(|e| e.to_string()))
        {
            Ok(c) => c,
            Err(e) => return Outcome::error(Exit::Parse, format!("gram certificate: {e}")),
        };
        let report = verify_gram(&cert, None);
        let euler = gram_euler_identity(&cert).ok().map(|r| r.to_string());
        let exit = if report.pass { Exit::Pass } else { Exit::CheckFailed };
        return Outcome::ok(
            exit,
            to_json(&json!({ "kind": "gram", "report": report, "euler_residual": euler })),
        );
    }
    let cert = match serde_json::from_value::<MultiplierSpec>(value)
        .map_err(|e| e.to_string())
        .and_then(|s| MultiplierCertificate::from_spec(&s, n).map_err(|e| e.to_string()))
    {
        Ok(c) => c,
        Err(e) => return Outcome::error(Exit::Parse, format!("multiplier certificate: {e}")),
    };
    let run = || -> Result<Outcome, Outcome> {
        let p = ctx.polynomial()?;
        let f = ctx.field()?;
        let grid = SampleGrid::default_for(n, ctx.seed);
        let report =
            verify_multiplier(&p, &f, &cert, &grid).map_err(|e| Outcome::error(Exit::Parse, e))?;
        let exit = if report.pass { Exit::Pass } else { Exit::CheckFailed };
        Ok(Outcome::ok(
            exit,
            to_json(&json!({ "kind": "multiplier", "report": report })),
        ))
    };
    run().unwrap_or_else(|o| o)
}
