//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Runs without the libtest harness so the lines always print.

use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

use nclift::complexes::{ext_space, ChainComplex, ExtAlgebra};
use nclift::error::Error;
use nclift::freealg::{abelianize, ideal_span, Monomial, QuotientBasis, TruncSeries};
use nclift::lifting::{change_of_basis, extend_one_order, first_order_lift, first_order_lift_with_basis, verify_lift, LiftState};
use nclift::linalg::{KMatrix, Subspace};
use nclift::modcomp::{ext_k_k, h0_family, rho_report, second_syzygy_dim};
use nclift::problem::{FieldSpec, Problem};
use nclift::report::RunError;
use nclift::smallext::{alpha_matrix, artifact_report, injectivity_report, small_ext_space, square_iso_report};
use nclift::{fixtures, Algebra, Field, Gf10007, Gf5, RMatrix, Rational};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Q = Rational;

/// Every lift in the suite goes through here, so criterion 8 sees them all.
#[derive(Default)]
struct Ledger {
    runs: usize,
    steps: usize,
    failures: Vec<String>,
}

impl Ledger {
    fn lift<F: Field>(&mut self, what: &str, complex: &ChainComplex<F>, order: usize) -> Result<Vec<LiftState<F>>, Error> {
        let first = first_order_lift(complex)?;
        self.lift_from(what, complex, first, order)
    }

    fn lift_from<F: Field>(
        &mut self,
        what: &str,
        complex: &ChainComplex<F>,
        first: LiftState<F>,
        order: usize,
    ) -> Result<Vec<LiftState<F>>, Error> {
        self.runs += 1;
        if let Err(e) = complex.check_d_squared() {
            self.failures.push(format!("{what}: {e}"));
        }
        let mut states = vec![first];
        loop {
            let s = states.last().expect("nonempty");
            self.steps += 1;
            let check = verify_lift(s);
            if !check.passed() {
                self.failures.push(format!("{what} order {}: {}", s.order(), check.failures.join("; ")));
            }
            if s.order() >= order {
                break;
            }
            let next = extend_one_order(s)?;
            states.push(next);
        }
        Ok(states)
    }
}

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(failures: Vec<String>, ok_detail: String) -> Outcome {
    if failures.is_empty() {
        Outcome { passed: true, detail: ok_detail }
    } else {
        Outcome { passed: false, detail: failures.join(" | ") }
    }
}

fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

/// Shipped problem files that are meant to parse.
fn shipped() -> Vec<(String, Problem)> {
    let mut out: Vec<(String, Problem)> = std::fs::read_dir(fixture_dir())
        .expect("fixtures directory")
        .map(|e| e.expect("entry").path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .filter(|p| !p.file_name().unwrap().to_string_lossy().starts_with("bad_"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), Problem::from_path(&p).expect("fixture parses")))
        .collect();
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

fn binom(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn expected_family(n: usize) -> String {
    let mut parts = vec![format!("x^{n}")];
    for k in (0..n).rev() {
        parts.push(match k {
            0 => "t0".to_string(),
            1 => "t1*x".to_string(),
            _ => format!("t{k}*x^{k}"),
        });
    }
    parts.join(" + ")
}

fn criterion_1(ledger: &mut Ledger) -> Outcome {
    let mut fails = Vec::new();
    for n in [2usize, 3] {
        let j = fixtures::jordan::<Q>(n, 2 * n);
        let tag = format!("J({n},{})", 2 * n);
        let (e1, e2) = (ext_space(&j, 1).dim(), ext_space(&j, 2).dim());
        if (e1, e2) != (n, 0) {
            fails.push(format!("{tag}: Ext dims ({e1}, {e2})"));
        }
        let states = match ledger.lift(&tag, &j, 4) {
            Ok(s) => s,
            Err(e) => {
                fails.push(format!("{tag}: {e}"));
                continue;
            }
        };
        let s = states.last().unwrap();
        if !s.relations().is_empty() {
            fails.push(format!("{tag}: {} relations", s.relations().len()));
        }
        let free: Vec<usize> = (0..=4).map(|d| n.pow(d as u32)).collect();
        if s.quotient_dims() != free {
            fails.push(format!("{tag}: quotient dims {:?}", s.quotient_dims()));
        }
        let comm: Vec<usize> = (0..=4).map(|d| binom(n + d - 1, d)).collect();
        let ab = abelianize(s.ideal()).dims_per_degree();
        if ab != comm {
            fails.push(format!("{tag}: abelianized dims {ab:?}, expected {comm:?}"));
        }
        match h0_family(s, 1) {
            Ok(f) if f.format_entry(0, 0) == expected_family(n) => {}
            Ok(f) => fails.push(format!("{tag}: family {:?}", f.format_entry(0, 0))),
            Err(e) => fails.push(format!("{tag}: family {e}")),
        }
    }
    outcome(fails, format!("J(2,4), J(3,6): free lifts, commutative dims and families {:?}, {:?}", expected_family(2), expected_family(3)))
}

fn criterion_2(ledger: &mut Ledger) -> Outcome {
    let k = fixtures::obstructed_k::<Q>();
    let mut fails = Vec::new();
    let dims = (ext_space(&k, 1).dim(), ext_space(&k, 2).dim());
    if dims != (1, 1) {
        fails.push(format!("Ext dims {dims:?}"));
    }
    match ledger.lift("K", &k, 4) {
        Ok(states) => {
            let s = states.last().unwrap();
            let rels = s.relations();
            let tt = Monomial(vec![0, 0]);
            if rels.len() != 1 || rels[0].leading_order != 2 || rels[0].series.coeff(&tt) == Q::from_i64(0) {
                fails.push(format!("relations {:?}", rels.iter().map(|r| r.series.format()).collect::<Vec<_>>()));
            }
            match square_iso_report(s) {
                Ok(r) if r.passed && r.ext1_squared_dim == 1 && r.quadratic_relations_dim == 1 => {}
                Ok(r) => fails.push(format!("square iso {} vs {}", r.ext1_squared_dim, r.quadratic_relations_dim)),
                Err(e) => fails.push(format!("square iso: {e}")),
            }
            if !verify_lift(s).passed() {
                fails.push("verify_lift failed".into());
            }
        }
        Err(e) => fails.push(e.to_string()),
    }
    outcome(fails, "K: Ext dims (1, 1), one relation t.t, square iso 1 = 1, lift verified".into())
}

fn random_elem<F: Field>(rng: &mut ChaCha8Rng, dim: usize, p_unit: f64) -> Vec<F> {
    (0..dim).map(|b| if b == 0 && !rng.gen_bool(p_unit) { F::from_i64(0) } else { F::from_i64(rng.gen_range(0..5)) }).collect()
}

/// A random complex `F_2 → F_1 → F_0` over `k[x]/(x^m)` with ranks in
/// 1..=3 and `d·d = 0`: the rows of `d_2` are drawn from the kernel of `d_1`.
fn random_complex<F: Field>(rng: &mut ChaCha8Rng) -> ChainComplex<F> {
    let m = rng.gen_range(2..=3);
    let alg = Arc::new(Algebra::<F>::truncated_poly(m).unwrap());
    let ranks: Vec<usize> = (0..3).map(|_| rng.gen_range(1..=3)).collect();
    let entries1 = (0..ranks[1] * ranks[0]).map(|_| random_elem(rng, m, 0.2)).collect();
    let d1 = RMatrix::from_entries(ranks[1], ranks[0], m, entries1).unwrap();
    let kernel = d1.k_linear(&alg).kernel();
    let mut flat = Vec::new();
    for _ in 0..ranks[2] {
        let mut row = vec![F::from_i64(0); ranks[1] * m];
        for v in &kernel {
            let c = F::from_i64(rng.gen_range(0..5));
            for (x, y) in row.iter_mut().zip(v) {
                *x += c.clone() * y.clone();
            }
        }
        flat.extend(row);
    }
    let d2 = RMatrix::from_flat(ranks[2], ranks[1], m, flat);
    ChainComplex::new(alg, 0, ranks, vec![d1, d2]).unwrap()
}

fn bound_holds<F: Field>(ledger: &mut Ledger, what: &str, complex: &ChainComplex<F>, fails: &mut Vec<String>) -> usize {
    let ell = ext_space(complex, 2).dim();
    match ledger.lift(what, complex, 4) {
        Ok(states) => {
            for s in &states {
                if s.relations().len() > ell {
                    fails.push(format!("{what}: {} relations at order {} > Ext^2 {ell}", s.relations().len(), s.order()));
                }
            }
            states.last().unwrap().relations().len()
        }
        Err(e) => {
            fails.push(format!("{what}: {e}"));
            0
        }
    }
}

fn criterion_3(ledger: &mut Ledger) -> Outcome {
    let mut fails = Vec::new();
    let mut n_fixtures = 0;
    for (name, p) in shipped() {
        n_fixtures += 1;
        let spec = p.field_spec().unwrap();
        nclift::with_field!(spec, F => {
            let (_, c) = p.build::<F>().unwrap();
            bound_holds(ledger, &name, &c, &mut fails);
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0005);
    let (mut accepted, mut drawn, mut with_relations) = (0, 0, 0);
    while accepted < 20 {
        drawn += 1;
        let c = random_complex::<Gf5>(&mut rng);
        let e1 = ext_space(&c, 1).dim();
        if !(1..=3).contains(&e1) {
            continue;
        }
        accepted += 1;
        if bound_holds(ledger, &format!("random #{accepted} ranks {:?}", c.ranks()), &c, &mut fails) > 0 {
            with_relations += 1;
        }
    }
    outcome(
        fails,
        format!("{n_fixtures} fixtures and 20 random GF(5) complexes ({drawn} drawn, {with_relations} with relations): relations ≤ dim Ext^2 at orders 1..=4"),
    )
}

fn criterion_4(ledger: &mut Ledger) -> Outcome {
    let mut fails = Vec::new();
    let mut summary = Vec::new();
    for (name, p) in shipped() {
        let (_, c) = p.build::<Q>().unwrap();
        let order = p.options.order.unwrap_or(4);
        match ledger.lift(&name, &c, order).and_then(|st| {
            let s = st.last().unwrap();
            Ok((injectivity_report(s.lift(), s.ext2(), order + 2)?, artifact_report(s.lift(), s.ext2(), order + 2)?))
        }) {
            Ok((r, a)) if r.injective && a.matches => summary.push(format!("{name} {}/{}", r.alpha_rank_on_relations, r.relation_dim)),
            Ok((r, a)) => fails.push(format!(
                "{name}: rank {} on {} relation directions, artifact image {} vs next order {}",
                r.alpha_rank_on_relations, r.relation_dim, a.alpha_image_dim, a.next_order_image_dim
            )),
            Err(e) => fails.push(format!("{name}: {e}")),
        }
    }
    outcome(fails, format!("alpha injective off the artifact span, artifact images = next-order obstructions ({})", summary.join(", ")))
}

fn criterion_5(ledger: &mut Ledger) -> Outcome {
    let mut corpus: Vec<(String, QuotientBasis<Q>)> = Vec::new();
    let gens = ["t0.t1 - t1.t0", "t0.t0", "t1.t1.t1"];
    for cap in 1..=3 {
        for k in 0..=gens.len() {
            let g: Vec<TruncSeries<Q>> = gens[..k].iter().map(|s| TruncSeries::parse(s, 2, cap).unwrap()).collect();
            corpus.push((format!("r=2 cap {cap} gens {:?}", &gens[..k]), QuotientBasis::new(ideal_span(2, &g, cap))));
        }
    }
    corpus.push(("k[t]/(t^2)".into(), QuotientBasis::free(1, 1)));
    corpus.push(("k[t]/(t^3)".into(), QuotientBasis::free(1, 2)));
    corpus.push(("T/m^2, r=3".into(), QuotientBasis::free(3, 1)));
    corpus.push((
        "k<a,b>/(ab, ba, a^2 - b^2)".into(),
        QuotientBasis::new(ideal_span(2, &["t0.t1", "t1.t0", "t0.t0 - t1.t1"].map(|s| TruncSeries::<Q>::parse(s, 2, 3).unwrap()), 3)),
    ));
    if let Ok(states) = ledger.lift("K", &fixtures::obstructed_k::<Q>(), 4) {
        for s in states.iter().skip(1) {
            corpus.push((format!("K's parameter algebra at order {}", s.order()), s.quotient().clone()));
        }
    }
    let kk = fixtures::obstructed_k::<Q>().direct_sum(&fixtures::obstructed_k()).unwrap();
    if let Ok(states) = ledger.lift("K+K", &kk, 2) {
        corpus.push(("K+K's parameter algebra at order 2".into(), states[1].quotient().clone()));
    }

    let mut fails = Vec::new();
    for (name, a) in &corpus {
        let guard = a.order_cap() + 2;
        let e = a.to_algebra().map(Arc::new).and_then(|alg| ext_k_k(alg, 2));
        let s = second_syzygy_dim(a.ideal(), guard);
        let t = small_ext_space(a, guard).map(|x| x.dim());
        match (e, s, t) {
            (Ok(e), Ok(s), Ok(t)) if e == s && s == t => {}
            (e, s, t) => fails.push(format!("{name}: Ext^2(k,k) {e:?}, syzygy {s:?}, small ext {t:?}")),
        }
    }
    outcome(fails, format!("{} artinian quotients: Ext^2(k,k) = second syzygy = small extensions", corpus.len()))
}

fn criterion_6(ledger: &mut Ledger) -> Outcome {
    let mut fails = Vec::new();
    let mut dims = Vec::new();
    for (name, p) in shipped() {
        let (_, c) = p.build::<Q>().unwrap();
        let res = ledger.lift(&name, &c, 1).and_then(|st| {
            let s = &st[0];
            let m = alpha_matrix(s.lift(), s.ext2(), 3)?;
            let image = Subspace::span(m.rows(), (0..m.cols()).map(|j| m.col(j)));
            let squared = ExtAlgebra::new(&c, 2).ext1_squared()?;
            Ok((image, squared))
        });
        match res {
            Ok((image, squared)) if image == squared => dims.push(format!("{name} {}", image.dim())),
            Ok((image, squared)) => fails.push(format!("{name}: image dim {} vs (Ext^1)^2 dim {}", image.dim(), squared.dim())),
            Err(e) => fails.push(format!("{name}: {e}")),
        }
    }
    outcome(fails, format!("alpha image over T/m^2 equals (Ext^1)^2 ({})", dims.join(", ")))
}

fn random_invertible(rng: &mut ChaCha8Rng, r: usize) -> KMatrix<Q> {
    loop {
        let rows = (0..r).map(|_| (0..r).map(|_| Q::from_i64(rng.gen_range(-3..=3))).collect()).collect();
        let p = KMatrix::from_rows(r, rows).unwrap();
        if p.rank() == r {
            return p;
        }
    }
}

fn criterion_7(ledger: &mut Ledger) -> Outcome {
    let mut fails = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(0xba5e_0007);
    let mut cases: Vec<(String, ChainComplex<Q>, usize)> = vec![
        ("K".into(), fixtures::obstructed_k(), 4),
        ("J(2,4)".into(), fixtures::jordan(2, 4), 4),
        ("J(3,6)".into(), fixtures::jordan(3, 6), 4),
    ];
    let kk = fixtures::obstructed_k::<Q>().direct_sum(&fixtures::obstructed_k()).unwrap();
    cases.push(("K+K".into(), kk, 3));
    for (name, c, order) in &cases {
        let base = match ledger.lift(name, c, *order) {
            Ok(st) => st.last().map(|s| (s.quotient_dims(), s.ladder())).unwrap(),
            Err(e) => {
                fails.push(format!("{name}: {e}"));
                continue;
            }
        };
        let r = ext_space(c, 1).dim();
        for trial in 0..5 {
            let p = random_invertible(&mut rng, r);
            let got = change_of_basis(c, &p)
                .and_then(|reps| first_order_lift_with_basis(c, reps))
                .and_then(|first| ledger.lift_from(name, c, first, *order))
                .map(|st| st.last().map(|s| (s.quotient_dims(), s.ladder())).unwrap());
            match got {
                Ok(g) if g == base => {}
                Ok(g) => fails.push(format!("{name} trial {trial}: {g:?} vs {base:?}")),
                Err(e) => fails.push(format!("{name} trial {trial}: {e}")),
            }
        }
    }
    let orders: Vec<String> = cases.iter().map(|(n, _, o)| format!("{n} to order {o}")).collect();
    outcome(fails, format!("5 random Ext^1 bases each for {}: identical dims and ladders", orders.join(", ")))
}

fn criterion_8(ledger: &Ledger) -> Outcome {
    let mut fails = ledger.failures.clone();
    let code = RunError::Compute(Error::Invariant("test".into())).exit_code();
    if code != 2 {
        fails.push(format!("invariant violation maps to exit code {code}"));
    }
    outcome(fails, format!("d·d = 0 and lift verification at all {} orders of {} runs; violations exit 2", ledger.steps, ledger.runs))
}

/// Dimension data that must not depend on the ground field.
fn profile<F: Field>(ledger: &mut Ledger, what: &str, p: &Problem) -> Result<Vec<Vec<usize>>, Error> {
    let (_, c) = p.build::<F>().map_err(|e| Error::Invalid(e.to_string()))?;
    let order = p.options.order.unwrap_or(4);
    let states = ledger.lift(what, &c, order)?;
    let s = states.last().unwrap();
    let mut out = vec![(0..=2).map(|i| ext_space(&c, i).dim()).collect::<Vec<_>>()];
    out.push(s.quotient_dims());
    out.push(s.ladder());
    out.push(states.iter().map(|t| t.relations().len()).collect());
    out.push(s.relations().iter().map(|r| r.leading_order).collect());
    out.push(abelianize(s.ideal()).dims_per_degree());
    let inj = injectivity_report(s.lift(), s.ext2(), order + 2)?;
    out.push(vec![inj.small_ext_dim, inj.artifact_dim, inj.relation_dim, inj.alpha_rank_on_relations]);
    if order >= 2 {
        let rho = rho_report(s)?;
        for row in rho.rows {
            out.push(vec![
                row.n,
                row.ext2_k_k,
                row.second_syzygy,
                row.small_ext_dim,
                row.artifact_dim,
                row.relation_dim,
                row.artifact_image_dim,
            ]);
        }
    }
    Ok(out)
}

fn criterion_9(ledger: &mut Ledger) -> Outcome {
    let mut fails = Vec::new();
    let fixtures = shipped();
    for (name, p) in &fixtures {
        let a = profile::<Q>(ledger, name, p);
        let b = profile::<Gf10007>(ledger, name, p);
        match (a, b) {
            (Ok(a), Ok(b)) if a == b => {}
            (a, b) => fails.push(format!("{name}: Q {a:?} vs GF(10007) {b:?}")),
        }
    }
    let spec_ok = FieldSpec::parse("gf10007").ok() == Some(FieldSpec::Prime(10007));
    if !spec_ok {
        fails.push("gf10007 is not a selectable field".into());
    }
    outcome(fails, format!("{} fixtures: identical dimension data over Q and GF(10007)", fixtures.len()))
}

fn main() {
    let mut ledger = Ledger::default();
    let mut results: Vec<(usize, Outcome, f64)> = Vec::new();
    let mut timed = |n: usize, f: &mut dyn FnMut() -> Outcome| {
        let t = Instant::now();
        let o = f();
        results.push((n, o, t.elapsed().as_secs_f64()));
    };
    timed(1, &mut || criterion_1(&mut ledger));
    timed(2, &mut || criterion_2(&mut ledger));
    timed(3, &mut || criterion_3(&mut ledger));
    timed(4, &mut || criterion_4(&mut ledger));
    timed(5, &mut || criterion_5(&mut ledger));
    timed(6, &mut || criterion_6(&mut ledger));
    timed(7, &mut || criterion_7(&mut ledger));
    timed(9, &mut || criterion_9(&mut ledger));
    // Last, so it audits every lift above.
    timed(8, &mut || criterion_8(&ledger));
    results.sort_by_key(|r| r.0);
    let mut all = true;
    for (n, o, secs) in &results {
        all &= o.passed;
        println!("{} criterion {n}: {} [{secs:.1}s]", if o.passed { "PASS" } else { "FAIL" }, o.detail);
    }
    if !all {
        std::process::exit(1);
    }
}
