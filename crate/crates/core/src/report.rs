//! Commands run on a problem, producing a JSON report and a text rendering.

use std::fmt::Write as _;
use std::str::FromStr;

use serde_json::{json, Value};

use crate::complexes::{ext_space, reduce_mod_homotopy, ChainComplex, ExtAlgebra, GradedMap};
use crate::error::Error;
use crate::field::Field;
use crate::freealg::abelianize;
use crate::lifting::{extend_one_order, first_order_lift, verify_lift, LiftState};
use crate::linalg::{unit_vec, Subspace};
use crate::modcomp::{h0_family, rho_report};
use crate::problem::{FieldSpec, Problem, ProblemError};
use crate::smallext::{alpha_matrix, injectivity_report, small_ext_space, square_iso_report};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Ext,
    Lift,
    Relations,
    Abelianize,
    Family,
    Smallext,
    Rho,
    Selfcheck,
}

impl Command {
    pub const ALL: [Command; 8] = [
        Command::Ext,
        Command::Lift,
        Command::Relations,
        Command::Abelianize,
        Command::Family,
        Command::Smallext,
        Command::Rho,
        Command::Selfcheck,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Command::Ext => "ext",
            Command::Lift => "lift",
            Command::Relations => "relations",
            Command::Abelianize => "abelianize",
            Command::Family => "family",
            Command::Smallext => "smallext",
            Command::Rho => "rho",
            Command::Selfcheck => "selfcheck",
        }
    }
}

impl FromStr for Command {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Command::ALL.iter().copied().find(|c| c.name() == s).ok_or_else(|| format!("unknown command {s:?}"))
    }
}

/// Settings after combining command-line flags with the problem's options.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RunOptions {
    pub field: FieldSpec,
    pub order: usize,
    pub guard: usize,
}

impl RunOptions {
    pub fn resolve(problem: &Problem, field: Option<&str>, order: Option<usize>, guard: Option<usize>) -> Result<Self, RunError> {
        let field = match field {
            Some(f) => FieldSpec::parse(f)?,
            None => problem.field_spec()?,
        };
        let order = order.or(problem.options.order).unwrap_or(4);
        if order == 0 {
            return Err(RunError::Compute(Error::Invalid("order must be at least 1".into())));
        }
        let guard = guard.or(problem.options.guard).unwrap_or(order + 2);
        if guard < order + 2 {
            return Err(RunError::Compute(Error::GuardTooSmall { guard, needed: order + 2 }));
        }
        Ok(RunOptions { field, order, guard })
    }
}

#[derive(Clone, Debug)]
pub struct Report {
    pub json: Value,
    pub text: String,
    /// False when a check failed; the process should exit with status 2.
    pub ok: bool,
}

#[derive(Debug)]
pub enum RunError {
    Problem(ProblemError),
    Compute(Error),
}

impl RunError {
    /// 1 for bad input, 2 for a broken invariant.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Problem(_) => 1,
            RunError::Compute(e) if e.is_invariant_violation() => 2,
            RunError::Compute(_) => 1,
        }
    }

    pub fn code(&self) -> &'static str {
        match self {
            RunError::Problem(e) => e.code.as_str(),
            RunError::Compute(Error::GuardTooSmall { .. }) => "GUARD_TOO_SMALL",
            RunError::Compute(Error::TooManyRelations { .. }) => "TOO_MANY_RELATIONS",
            RunError::Compute(e) if e.is_invariant_violation() => "INVARIANT_VIOLATION",
            RunError::Compute(_) => "INVALID_ARGUMENT",
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            RunError::Problem(e) => json!({"code": self.code(), "location": e.location, "message": e.message}),
            RunError::Compute(e) => json!({"code": self.code(), "message": e.to_string()}),
        }
    }
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Problem(e) => write!(f, "{e}"),
            RunError::Compute(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for RunError {}

impl From<ProblemError> for RunError {
    fn from(e: ProblemError) -> Self {
        RunError::Problem(e)
    }
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        RunError::Compute(e)
    }
}

/// Runs `command` with the field selected in `opts`.
pub fn run(command: Command, problem: &Problem, opts: &RunOptions) -> Result<Report, RunError> {
    crate::with_field!(opts.field, F => run_in::<F>(command, problem, opts))
}

pub fn run_in<F: Field>(command: Command, problem: &Problem, opts: &RunOptions) -> Result<Report, RunError> {
    let (_, complex) = problem.build::<F>()?;
    let (body, text, ok) = match command {
        Command::Ext => ext_cmd(&complex)?,
        Command::Lift => lift_cmd(&complex, opts)?,
        Command::Relations => relations_cmd(&complex, opts)?,
        Command::Abelianize => abelianize_cmd(&complex, opts)?,
        Command::Family => family_cmd(&complex, problem, opts)?,
        Command::Smallext => smallext_cmd(&complex, opts)?,
        Command::Rho => rho_cmd(&complex, opts)?,
        Command::Selfcheck => selfcheck_cmd(&complex, opts)?,
    };
    let mut json = json!({
        "command": command.name(),
        "field": opts.field.name(),
        "order": opts.order,
        "guard": opts.guard,
        "problem": problem.to_json(),
        "ok": ok,
    });
    if let (Value::Object(m), Value::Object(b)) = (&mut json, body) {
        m.extend(b);
    }
    Ok(Report { json, text, ok })
}

type CmdResult = Result<(Value, String, bool), Error>;

pub fn graded_map_json<F: Field>(c: &ChainComplex<F>, f: &GradedMap<F>) -> Value {
    let comps: Vec<Value> = (0..c.len())
        .filter_map(|k| {
            let from = c.lo() + k as i32;
            let m = f.component(k);
            (m.rows() > 0 && m.cols() > 0).then(|| json!({"from": from, "to": from + f.degree(), "matrix": m.format(c.algebra())}))
        })
        .collect();
    json!({"degree": f.degree(), "components": comps})
}

fn lift_to<F: Field>(complex: &ChainComplex<F>, order: usize) -> Result<Vec<LiftState<F>>, Error> {
    let mut states = vec![first_order_lift(complex)?];
    while states.last().expect("nonempty").order() < order {
        let next = extend_one_order(states.last().expect("nonempty"))?;
        let check = verify_lift(&next);
        if !check.passed() {
            return Err(Error::Invariant(format!("order {}: {}", next.order(), check.failures.join("; "))));
        }
        states.push(next);
    }
    Ok(states)
}

fn relations_json<F: Field>(s: &LiftState<F>) -> Value {
    Value::Array(s.relations().iter().map(|r| json!({"series": r.series.format(), "leading_order": r.leading_order})).collect())
}

fn dims_text(d: &[usize]) -> String {
    d.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

fn ext_cmd<F: Field>(complex: &ChainComplex<F>) -> CmdResult {
    let mut dims = serde_json::Map::new();
    let mut reps = serde_json::Map::new();
    let mut text = String::new();
    for i in 0..=2 {
        let e = ext_space(complex, i);
        dims.insert(i.to_string(), json!(e.dim()));
        reps.insert(i.to_string(), Value::Array(e.reps().iter().map(|f| graded_map_json(complex, f)).collect()));
        let _ = writeln!(text, "Ext^{i}: {}", e.dim());
    }
    Ok((json!({"dims": dims, "representatives": reps}), text, true))
}

fn lift_cmd<F: Field>(complex: &ChainComplex<F>, opts: &RunOptions) -> CmdResult {
    let states = lift_to(complex, opts.order)?;
    let s = states.last().expect("nonempty");
    let check = verify_lift(s);
    let sp = s.quotient();
    let coeffs: Vec<Value> = s
        .lift()
        .terms()
        .filter(|(_, g)| !g.is_zero())
        .map(|(w, g)| json!({"monomial": w.format(s.vars()), "map": graded_map_json(complex, g)}))
        .collect();
    let json = json!({
        "vars": s.vars(),
        "ext2_dim": s.ext2().dim(),
        "relations": relations_json(s),
        "quotient_dims": sp.dims_per_degree(),
        "ladder": s.ladder(),
        "normal_monomials": sp.normal_monomials().iter().map(|m| m.format(s.vars())).collect::<Vec<_>>(),
        "coefficients": coeffs,
        "log": s.log(),
        "verify": check,
    });
    let mut text = format!("parameters: {}\nExt^2: {}\n", s.vars(), s.ext2().dim());
    let _ = writeln!(text, "quotient dims: ({})", dims_text(&sp.dims_per_degree()));
    let _ = writeln!(text, "relations: {}", s.relations().len());
    for r in s.relations() {
        let _ = writeln!(text, "  {}", r.series);
    }
    let _ = writeln!(text, "verify: {}", if check.passed() { "pass" } else { "FAIL" });
    Ok((json, text, check.passed()))
}

fn relations_cmd<F: Field>(complex: &ChainComplex<F>, opts: &RunOptions) -> CmdResult {
    let states = lift_to(complex, opts.order)?;
    let s = states.last().expect("nonempty");
    let per_order: Vec<Value> = states.iter().map(|t| json!({"order": t.order(), "relations": t.relations().len()})).collect();
    let json = json!({
        "ext2_dim": s.ext2().dim(),
        "relations": relations_json(s),
        "ladder": s.ladder(),
        "per_order": per_order,
    });
    let mut text = format!("relations (Ext^2 dimension {}):\n", s.ext2().dim());
    for r in s.relations() {
        let _ = writeln!(text, "  {}    [order {}]", r.series, r.leading_order);
    }
    if s.relations().is_empty() {
        text.push_str("  none\n");
    }
    Ok((json, text, true))
}

fn abelianize_cmd<F: Field>(complex: &ChainComplex<F>, opts: &RunOptions) -> CmdResult {
    let states = lift_to(complex, opts.order)?;
    let s = states.last().expect("nonempty");
    let ab = abelianize(s.ideal());
    let dims = ab.dims_per_degree();
    let json = json!({
        "quotient_dims": dims,
        "normal_monomials": ab.normal_monomials().iter().map(|m| m.format(s.vars())).collect::<Vec<_>>(),
        "noncommutative_dims": s.quotient_dims(),
    });
    let text = format!("abelianized dims: ({})\n", dims_text(&dims));
    Ok((json, text, true))
}

fn family_cmd<F: Field>(complex: &ChainComplex<F>, problem: &Problem, opts: &RunOptions) -> CmdResult {
    let degree = problem
        .options
        .presentation_degree
        .ok_or_else(|| Error::Invalid("family needs options.presentation_degree in the problem".into()))?;
    let states = lift_to(complex, opts.order)?;
    let s = states.last().expect("nonempty");
    let fam = h0_family(s, degree)?;
    let specializes = Some(&fam.specialize_zero()) == complex.differential(degree);
    let companion = fam.companion().ok();
    let entries = fam.format();
    let json = json!({
        "presentation_degree": degree,
        "entries": entries,
        "companion": companion,
        "specializes_to_d": specializes,
    });
    let mut text = String::new();
    for row in &entries {
        let _ = writeln!(text, "[ {} ]", row.join(" , "));
    }
    if let Some(c) = &companion {
        text.push_str("companion:\n");
        text.push_str(&aligned(c));
    }
    Ok((json, text, specializes))
}

fn aligned(rows: &[Vec<String>]) -> String {
    let cols = rows.iter().map(|r| r.len()).max().unwrap_or(0);
    let widths: Vec<usize> =
        (0..cols).map(|j| rows.iter().filter_map(|r| r.get(j)).map(|s| s.chars().count()).max().unwrap_or(0)).collect();
    let mut out = String::new();
    for r in rows {
        let cells: Vec<String> = r.iter().enumerate().map(|(j, s)| format!("{s:>w$}", w = widths[j])).collect();
        let _ = writeln!(out, "  {}", cells.join("  "));
    }
    out
}

fn smallext_cmd<F: Field>(complex: &ChainComplex<F>, opts: &RunOptions) -> CmdResult {
    let states = lift_to(complex, opts.order)?;
    let s = states.last().expect("nonempty");
    let space = small_ext_space(s.quotient(), opts.guard)?;
    let alpha = alpha_matrix(s.lift(), s.ext2(), opts.guard)?;
    let inj = injectivity_report(s.lift(), s.ext2(), opts.guard)?;
    let square = if s.order() >= 3 { Some(square_iso_report(s)?) } else { None };
    let alpha_rows: Vec<Vec<String>> = (0..alpha.rows()).map(|i| alpha.row(i).iter().map(|x| x.to_string()).collect()).collect();
    let directions: Vec<String> = (0..space.dim()).map(|q| space.direction(q).format()).collect();
    let ok = inj.injective && square.as_ref().is_none_or(|r| r.passed);
    let json = json!({
        "small_ext_dim": space.dim(),
        "directions": directions,
        "alpha": alpha_rows,
        "injectivity": inj,
        "square_iso": square,
    });
    let mut text = format!(
        "small extensions: {} ({} artifact, {} relation)\nalpha rank on relations: {} of {}\n",
        space.dim(),
        inj.artifact_dim,
        inj.relation_dim,
        inj.alpha_rank_on_relations,
        inj.relation_dim
    );
    if let Some(r) = &square {
        let _ = writeln!(text, "(Ext^1)^2: {}  quadratic relations: {}", r.ext1_squared_dim, r.quadratic_relations_dim);
    }
    Ok((json, text, ok))
}

fn rho_cmd<F: Field>(complex: &ChainComplex<F>, opts: &RunOptions) -> CmdResult {
    let states = lift_to(complex, opts.order)?;
    let s = states.last().expect("nonempty");
    let r = rho_report(s)?;
    let mut rows = vec![["n", "Ext2(k,k)", "syzygy", "small ext", "artifact", "relations", "alpha rank", "artifact image", "ok"]
        .iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()];
    for row in &r.rows {
        rows.push(vec![
            row.n.to_string(),
            row.ext2_k_k.to_string(),
            row.second_syzygy.to_string(),
            row.small_ext_dim.to_string(),
            row.artifact_dim.to_string(),
            row.relation_dim.to_string(),
            row.alpha_rank_on_relations.to_string(),
            row.artifact_image_dim.to_string(),
            if row.dims_agree && row.injective && row.artifact_matches_next_order { "yes" } else { "NO" }.to_string(),
        ]);
    }
    let text = aligned(&rows);
    let ok = r.passed();
    Ok((serde_json::to_value(&r).expect("serializes"), text, ok))
}

struct Checks {
    items: Vec<Value>,
    text: String,
    ok: bool,
}

impl Checks {
    fn add(&mut self, name: &str, passed: bool, detail: String) {
        self.ok &= passed;
        let _ = writeln!(self.text, "{} {name}: {detail}", if passed { "PASS" } else { "FAIL" });
        self.items.push(json!({"name": name, "passed": passed, "detail": detail}));
    }
}

fn selfcheck_cmd<F: Field>(complex: &ChainComplex<F>, opts: &RunOptions) -> CmdResult {
    let mut c = Checks { items: Vec::new(), text: String::new(), ok: true };
    c.add("d_squared", complex.check_d_squared().is_ok(), "d·d = 0".into());

    for i in 1..=2 {
        let e = ext_space(complex, i);
        let good = e.reps().iter().enumerate().all(|(a, rep)| {
            complex.is_chain_map(rep).unwrap_or(false)
                && matches!(reduce_mod_homotopy(complex, &e, rep), Ok((x, h)) if x == unit_vec(e.dim(), a) && h.is_zero())
        });
        c.add(&format!("ext{i}_representatives"), good, format!("{} chain maps reduce to unit vectors", e.dim()));
    }

    let states = lift_to(complex, opts.order)?;
    let s = states.last().expect("nonempty");
    let ell = s.ext2().dim();
    let verified = states.iter().all(|t| verify_lift(t).passed());
    c.add("lift_verified", verified, format!("Δ² = 0 and d, Ext^1 terms at orders 1..={}", s.order()));
    let counts: Vec<usize> = states.iter().map(|t| t.relations().len()).collect();
    c.add("relation_bound", counts.iter().all(|&n| n <= ell), format!("relations per order {counts:?} against Ext^2 dimension {ell}"));
    let dims = s.quotient_dims();
    c.add("linear_part", dims[0] == 1 && dims.get(1).copied().unwrap_or(0) == s.vars(), format!("quotient dims {dims:?}"));
    let ab = abelianize(s.ideal()).dims_per_degree();
    c.add(
        "abelianization",
        ab[0] == 1 && ab.get(1).copied().unwrap_or(0) == s.vars() && ab.iter().zip(&dims).all(|(a, b)| a <= b),
        format!("abelianized dims {ab:?}"),
    );
    if s.order() >= 3 {
        let r = square_iso_report(s)?;
        c.add("square_iso", r.passed, format!("(Ext^1)^2 {} vs quadratic relations {}", r.ext1_squared_dim, r.quadratic_relations_dim));
    }
    let inj = injectivity_report(s.lift(), s.ext2(), opts.guard)?;
    c.add("alpha_injective", inj.injective, format!("rank {} on {} relation directions", inj.alpha_rank_on_relations, inj.relation_dim));

    let first = &states[0];
    let m = alpha_matrix(first.lift(), first.ext2(), 3)?;
    let image = Subspace::span(m.rows(), (0..m.cols()).map(|j| m.col(j)));
    let squared = ExtAlgebra::new(complex, 2).ext1_squared()?;
    c.add("first_order_image", image == squared, format!("alpha image dimension {} vs (Ext^1)^2 {}", image.dim(), squared.dim()));

    if s.order() >= 2 {
        let r = rho_report(s)?;
        c.add("rho", r.passed(), format!("Ext^2(k,k), second syzygy, small extensions and alpha rank at n = 2..={}", s.order()));
    }
    let ok = c.ok;
    Ok((json!({"checks": c.items}), c.text, ok))
}
