//! Acceptance suite: one PASS/FAIL line per criterion. Runs without the
//! libtest harness so the lines are always printed.

mod common;

use std::time::{Duration, Instant};

use common::{random_point, record_error, s};
use foliage::action::PreMomentumMap;
use foliage::dirac::{verify_g_invariance, DiracData};
use foliage::foliation::Connection;
use foliage::geom::{DiffForm, VectorField};
use foliage::hamcurv::{
    adiabatic_check, adiabatic_fix, averaged_sigma, averaging_identities, cv2_check, verify_admissible, verify_conn_h,
};
use foliage::pipeline::{run_checks, Selection};
use foliage::poisson::SharpConvention;
use foliage::scenario::{bundled, bundled_names, Scenario};
use foliage::symcalc::audit;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

type Outcome = Result<String, String>;
type Criterion = (&'static str, Box<dyn Fn() -> Outcome>);

/// Pinned numerical tolerance of the quadrature oracle.
const ORACLE_TOL: f64 = 1e-10;
const ORACLE_POINTS: usize = 10;
const PERTURBATIONS: usize = 10;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn load(name: &str, conv: SharpConvention) -> Scenario {
    let mut sc = bundled(name).unwrap();
    sc.poisson = sc.poisson.clone().with_convention(conv);
    sc
}

fn verdict(v: &foliage::Verdict, sc: &Scenario, what: &str) -> Result<(), String> {
    match v.witness() {
        None => Ok(()),
        Some(w) => Err(format!("{}: {what} fails at {}", sc.name(), w.render(&sc.chart))),
    }
}

fn within(limit: Duration, start: Instant) -> Result<(), String> {
    let t = start.elapsed();
    ensure(t < limit, || format!("took {t:?}, limit {limit:?}"))
}

fn err(e: foliage::Error) -> String {
    e.to_string()
}

/// `Ξ(h_i) − P♯dQ(h_i) = 0` on hb4d, with `Q` from the double integral.
fn criterion_1(conv: SharpConvention) -> Outcome {
    let start = Instant::now();
    let sc = load("hb4d", conv);
    let mu = sc.premomentum.as_ref().unwrap();
    let q = sc.action.compute_q(&sc.connection, &sc.poisson, mu).map_err(err)?.q;
    let xi = sc.action.connection_difference(&sc.connection).map_err(err)?;
    for (i, h) in sc.connection.frame().iter().enumerate() {
        let r = &xi.eval(std::slice::from_ref(h)).map_err(err)? - &sc.poisson.hamiltonian_vf(&q.component(1 << i));
        ensure(r.is_zero(), || format!("residue on h{}: {}", i + 1, r.render()))?;
    }
    within(Duration::from_secs(5), start)?;
    Ok(format!("Q = {}", q.render()))
}

/// The averaged-curvature identity on hb4d and hb4d_inv.
fn criterion_2() -> Outcome {
    let start = Instant::now();
    for name in ["hb4d", "hb4d_inv"] {
        let sc = load(name, SharpConvention::Standard);
        let q = sc
            .action
            .compute_q(&sc.connection, &sc.poisson, sc.premomentum.as_ref().unwrap())
            .map_err(err)?
            .q;
        let bar = sc.action.hannay_berry(&sc.connection).map_err(err)?;
        verdict(
            &cv2_check(&sc.connection, &bar, &q, &sc.poisson).map_err(err)?,
            &sc,
            "averaged curvature",
        )?;
    }
    within(Duration::from_secs(5), start)?;
    Ok("hb4d, hb4d_inv".into())
}

/// Averaging preserves Hamiltonian curvature on hb4d; `⟨γ⟩` is flat and
/// `σ̄` Casimir-valued; the three identities hold.
fn criterion_3() -> Outcome {
    let sc = load("hb4d", SharpConvention::Standard);
    let (conn, p) = (&sc.connection, &sc.poisson);
    let sigma = sc.sigma.as_ref().unwrap();
    let q = sc
        .action
        .compute_q(conn, p, sc.premomentum.as_ref().unwrap())
        .map_err(err)?
        .q;
    let bar = sc.action.hannay_berry(conn).map_err(err)?;
    let sigma_bar = averaged_sigma(conn, sigma, &q, p).map_err(err)?;
    verdict(
        &verify_conn_h(&bar, &sigma_bar, p).map_err(err)?,
        &sc,
        "averaged Hamiltonian curvature",
    )?;
    let curv = bar.curvature().map_err(err)?;
    ensure(curv.is_zero(), || format!("averaged curvature {}", curv.render()))?;
    verdict(&p.is_casimir_form(&sigma_bar), &sc, "averaged sigma Casimir")?;
    let ids = averaging_identities(conn, sigma, &q, p).map_err(err)?;
    verdict(&ids.shifted_derivative, &sc, "shifted derivative identity")?;
    verdict(&ids.square, &sc, "square identity")?;
    verdict(&ids.quadratic, &sc, "quadratic identity")?;
    Ok(format!("sigma_bar = {}", sigma_bar.render()))
}

/// Admissibility survives averaging on the three-base scenario.
fn criterion_4() -> Outcome {
    let sc = load("ext5", SharpConvention::Standard);
    let (conn, p) = (&sc.connection, &sc.poisson);
    let sigma = sc.sigma.as_ref().unwrap();
    ensure(sc.chart.n_h() == 3, || "expected three horizontal coordinates".into())?;
    verdict(
        &verify_conn_h(conn, sigma, p).map_err(err)?,
        &sc,
        "input Hamiltonian curvature",
    )?;
    verdict(
        &verify_admissible(conn, sigma).map_err(err)?,
        &sc,
        "input admissibility",
    )?;
    let q = sc
        .action
        .compute_q(conn, p, sc.premomentum.as_ref().unwrap())
        .map_err(err)?
        .q;
    let bar = sc.action.hannay_berry(conn).map_err(err)?;
    let sigma_bar = averaged_sigma(conn, sigma, &q, p).map_err(err)?;
    let d = bar.covariant_derivative(&sigma_bar).map_err(err)?;
    ensure(d.is_zero(), || format!("d10(bar) sigma_bar = {}", d.render()))?;
    ensure(
        !sc.action.invariance_criteria(conn).map_err(err)?.averaged_equal.holds(),
        || "ext5 connection is already invariant".into(),
    )?;
    Ok("ext5".into())
}

/// Lagrangian and involutive on triv and hb4d_inv; a wrong `σ` is rejected.
fn criterion_5(conv: SharpConvention) -> Outcome {
    for name in ["triv", "hb4d_inv"] {
        let sc = load(name, conv);
        let d = DiracData::build(&sc.connection, sc.sigma.as_ref().unwrap(), &sc.poisson).map_err(err)?;
        verdict(&d.verify_lagrangian().map_err(err)?, &sc, "Lagrangian")?;
        verdict(&d.verify_involutive().map_err(err)?, &sc, "involutive")?;
    }
    let sc = load("hb4d_inv", conv);
    let bad = DiffForm::zero(&sc.chart, 2);
    ensure(
        !verify_conn_h(&sc.connection, &bad, &sc.poisson).map_err(err)?.holds(),
        || "zero sigma unexpectedly has Hamiltonian curvature".into(),
    )?;
    let d = DiracData::build(&sc.connection, &bad, &sc.poisson).map_err(err)?;
    let v = d.verify_involutive().map_err(err)?;
    let w = v.witness().ok_or("wrong sigma was accepted as involutive")?;
    ensure(!w.residue.is_zero(), || "zero witness".into())?;
    Ok(format!("wrong sigma rejected at {}", w.render(&sc.chart)))
}

/// G-invariance of the averaged Dirac structure for every bundled Casimir
/// cocycle on the hb4d chart; the un-averaged one is not invariant.
fn criterion_6() -> Outcome {
    let sc = load("hb4d", SharpConvention::Standard);
    let (conn, p) = (&sc.connection, &sc.poisson);
    let sigma = sc.sigma.as_ref().unwrap();
    let q = sc
        .action
        .compute_q(conn, p, sc.premomentum.as_ref().unwrap())
        .map_err(err)?
        .q;
    let bar = sc.action.hannay_berry(conn).map_err(err)?;
    let sigma_bar = averaged_sigma(conn, sigma, &q, p).map_err(err)?;

    let mut cocycles = vec![("zero".to_string(), DiffForm::zero(&sc.chart, 2))];
    for name in bundled_names() {
        let other = bundled(name).unwrap();
        if let Some(c) = other.casimir.filter(|_| other.file.chart == sc.file.chart) {
            let c = DiffForm::from_terms(&sc.chart, 2, &[(&[0, 1], c.component(0b11))]).map_err(err)?;
            cocycles.push((format!("{name} casimir"), c));
        }
    }
    ensure(cocycles.len() >= 2, || {
        "no bundled Casimir cocycle on this chart".into()
    })?;
    for (label, c) in &cocycles {
        verdict(&p.is_casimir_form(c), &sc, "Casimir cocycle")?;
        let d = DiracData::build(&bar, &sigma_bar.try_add(c).map_err(err)?, p).map_err(err)?;
        let g = verify_g_invariance(&sc.action, &d).map_err(err)?;
        verdict(&g.pullback, &sc, &format!("invariance with C = {label}"))?;
        ensure(g.routes_agree(), || {
            format!("pullback and Lie routes disagree for {label}")
        })?;
    }
    let d = DiracData::build(conn, sigma, p).map_err(err)?;
    let g = verify_g_invariance(&sc.action, &d).map_err(err)?;
    ensure(!g.pullback.holds(), || "un-averaged structure is invariant".into())?;
    ensure(g.routes_agree(), || {
        "routes disagree on the un-averaged structure".into()
    })?;
    Ok(format!("{} cocycles", cocycles.len()))
}

/// Adiabatic two-route equality everywhere; the primitive repair on
/// triv_dx1 yields an adiabatic map whose generators lie in the structure.
fn criterion_7() -> Outcome {
    for name in bundled_names() {
        let sc = load(name, SharpConvention::Standard);
        let mu = sc.premomentum.as_ref().unwrap();
        verdict(
            &adiabatic_check(&sc.action, &sc.connection, mu)
                .map_err(err)?
                .routes_agree,
            &sc,
            "adiabatic routes",
        )?;
    }
    let sc = load("triv_dx1", SharpConvention::Standard);
    let (conn, p, action) = (&sc.connection, &sc.poisson, &sc.action);
    let mu = sc.premomentum.as_ref().unwrap();
    ensure(
        !adiabatic_check(action, conn, mu).map_err(err)?.adiabatic.holds(),
        || "dJ + dx1 is already adiabatic".into(),
    )?;
    let fixed: PreMomentumMap = adiabatic_fix(action, conn, mu, sc.primitives.as_ref().unwrap(), p).map_err(err)?;
    verdict(&fixed.verify(action, p).map_err(err)?, &sc, "repaired pre-momentum")?;
    verdict(
        &adiabatic_check(action, conn, &fixed).map_err(err)?.adiabatic,
        &sc,
        "repaired adiabatic",
    )?;
    let bar = action.hannay_berry(conn).map_err(err)?;
    let q = action.compute_q(conn, p, &fixed).map_err(err)?.q;
    let sigma_bar = averaged_sigma(conn, sc.sigma.as_ref().unwrap(), &q, p).map_err(err)?;
    let d = DiracData::build(&bar, &sigma_bar, p).map_err(err)?;
    verdict(
        &d.hamiltonian_generator_check(action, &fixed).map_err(err)?,
        &sc,
        "generator membership",
    )?;
    Ok(format!("repaired mu = {}", fixed.forms[0].render()))
}

/// The three invariance conditions agree on randomized perturbations of the
/// flat frame, with both verdicts represented.
fn criterion_8() -> Outcome {
    let base = load("triv", SharpConvention::Standard);
    let c = &base.chart;
    let mut rng = StdRng::seed_from_u64(0x5eed_0008);
    let mut counts = [0usize; 2];
    let coef = |rng: &mut StdRng| rng.gen_range(-3i64..=3);
    for k in 0..PERTURBATIONS {
        let mut parts = Vec::new();
        for _ in 0..2 {
            let (a, b, e) = (coef(&mut rng), coef(&mut rng), coef(&mut rng));
            // Even perturbations commute with the rotation, odd ones generally not.
            let v = if k % 2 == 0 {
                let f = format!("{a}*x1 + {b}*x2^2");
                let g = format!("{e}*x2");
                [s(c, &format!("({f})*q - ({g})*p")), s(c, &format!("({f})*p + ({g})*q"))]
            } else {
                [
                    s(c, &format!("{a}*x2*q^2 + {b}*p + {e}")),
                    s(c, &format!("{b}*x1*q*p + {a}*q + 1")),
                ]
            };
            parts.push(v.to_vec());
        }
        let conn = Connection::from_vertical_parts(c, &parts).map_err(err)?;
        let crit = base.action.invariance_criteria(&conn).map_err(err)?;
        let verdicts = [
            crit.averaged_equal.holds(),
            crit.fn_bracket_zero.holds(),
            crit.difference_zero.holds(),
        ];
        ensure(crit.consistent(), || format!("perturbation {k}: verdicts {verdicts:?}"))?;
        counts[verdicts[0] as usize] += 1;
    }
    ensure(counts[0] > 0 && counts[1] > 0, || {
        format!("only one verdict seen: {counts:?}")
    })?;
    Ok(format!("{} invariant, {} not", counts[1], counts[0]))
}

/// Every exact average performed by the full pipeline on every bundled
/// scenario matches the numerical oracle at random rational points.
fn criterion_9() -> Outcome {
    let start = Instant::now();
    let mut records = Vec::new();
    let mut charts = Vec::new();
    for name in bundled_names() {
        let sc = load(name, SharpConvention::Standard);
        let (report, recs) = audit::capture(|| run_checks(&sc, &Selection::all()));
        ensure(report.map_err(err)?.passed(), || format!("{name}: pipeline failed"))?;
        charts.push((sc.chart.clone(), records.len(), records.len() + recs.len()));
        records.extend(recs);
    }
    ensure(!records.is_empty(), || "no averages recorded".into())?;
    let mut rng = StdRng::seed_from_u64(0x5eed_0009);
    let mut worst = 0.0f64;
    for (chart, lo, hi) in &charts {
        for _ in 0..ORACLE_POINTS {
            let (vars, angles) = random_point(chart, &mut rng);
            for r in &records[*lo..*hi] {
                let e = record_error(r, &vars, &angles);
                ensure(e.is_finite() && e < ORACLE_TOL, || {
                    format!("oracle error {e:e} on {r:?}")
                })?;
                worst = worst.max(e);
            }
        }
    }
    within(Duration::from_secs(30), start)?;
    Ok(format!("{} averages, max error {worst:.1e}", records.len()))
}

/// `X_J` equals the rotation generator; flipping the sharp map breaks
/// criteria 1 and 5.
fn criterion_10() -> Outcome {
    let sc = load("triv", SharpConvention::Standard);
    let xj = sc.poisson.hamiltonian_vf(&s(&sc.chart, "(q^2 + p^2)/2"));
    let gen: VectorField = sc.action.infinitesimal_generator(0);
    ensure(xj == gen, || {
        format!("X_J = {}, generator = {}", xj.render(), gen.render())
    })?;
    let flipped = sc.poisson.clone().with_convention(SharpConvention::Flipped);
    ensure(flipped.hamiltonian_vf(&s(&sc.chart, "(q^2 + p^2)/2")) != gen, || {
        "flipped convention still matches the generator".into()
    })?;
    let c1 = criterion_1(SharpConvention::Flipped);
    let c5 = criterion_5(SharpConvention::Flipped);
    ensure(c1.is_err(), || "criterion 1 passes with the flipped convention".into())?;
    ensure(c5.is_err(), || "criterion 5 passes with the flipped convention".into())?;
    Ok("flipped: criteria 1 and 5 fail".into())
}

fn main() {
    let suite = Instant::now();
    let criteria: Vec<Criterion> = vec![
        (
            "difference form is Hamiltonian (hb4d)",
            Box::new(|| criterion_1(SharpConvention::Standard)),
        ),
        ("averaged curvature identity", Box::new(criterion_2)),
        ("averaging preserves Hamiltonian curvature", Box::new(criterion_3)),
        ("admissibility preservation (ext5)", Box::new(criterion_4)),
        (
            "coupling Dirac structures",
            Box::new(|| criterion_5(SharpConvention::Standard)),
        ),
        ("G-invariance of the averaged Dirac structure", Box::new(criterion_6)),
        ("adiabatic suite", Box::new(criterion_7)),
        ("invariance criteria equivalence", Box::new(criterion_8)),
        ("quadrature oracle agreement", Box::new(criterion_9)),
        ("sign-charter guard", Box::new(criterion_10)),
    ];
    let mut failed = 0;
    for (k, (label, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let t = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2}: PASS  {label} [{t:.2}s] {detail}", k + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2}: FAIL  {label} [{t:.2}s] {why}", k + 1);
            }
        }
    }
    let total = suite.elapsed();
    println!(
        "acceptance: {} of {} criteria pass in {:.2}s",
        criteria.len() - failed,
        criteria.len(),
        total.as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
