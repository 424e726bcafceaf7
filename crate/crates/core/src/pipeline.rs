//! Staged verification of a [`Scenario`] and its report.
//!
//! Stages run in dependency order; intermediate artifacts (`⟨γ⟩`, `Q`, `σ̄`,
//! the repaired pre-momentum map) are computed once and shared. A stage whose
//! inputs are absent from the scenario is skipped in a full run and is a
//! schema error when selected explicitly.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};

use crate::action::{PreMomentumMap, QForm};
use crate::dirac::{presymplectic_comparison, verify_g_invariance, DiracData};
use crate::error::{Error, Result};
use crate::foliation::{verify_connection, Connection};
use crate::geom::{DiffForm, Tensor};
use crate::hamcurv::{
    adiabatic_check, adiabatic_fix, averaged_sigma, averaging_identities, cv2_check, lie_sigma_is_casimir,
    shifted_by_q, verify_admissible, verify_conn_h,
};
use crate::scenario::{connection_lifts, two_form_entries, Scenario, ScenarioFile};
use crate::symcalc::Chart;
use crate::Verdict;

/// Report schema version.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Connection,
    Poisson,
    Action,
    Premomentum,
    Averaging,
    ConnH,
    AveragedSigma,
    Adiabatic,
    Dirac,
}

impl Stage {
    pub const ALL: [Stage; 9] = [
        Stage::Connection,
        Stage::Poisson,
        Stage::Action,
        Stage::Premomentum,
        Stage::Averaging,
        Stage::ConnH,
        Stage::AveragedSigma,
        Stage::Adiabatic,
        Stage::Dirac,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Connection => "connection",
            Stage::Poisson => "poisson",
            Stage::Action => "action",
            Stage::Premomentum => "premomentum",
            Stage::Averaging => "averaging",
            Stage::ConnH => "conn_h",
            Stage::AveragedSigma => "averaged_sigma",
            Stage::Adiabatic => "adiabatic",
            Stage::Dirac => "dirac",
        }
    }

    fn needs_sigma(self) -> bool {
        matches!(self, Stage::ConnH | Stage::AveragedSigma | Stage::Dirac)
    }

    fn needs_premomentum(self) -> bool {
        matches!(
            self,
            Stage::Premomentum | Stage::Averaging | Stage::AveragedSigma | Stage::Adiabatic | Stage::Dirac
        )
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Stage {
    type Err = Error;

    fn from_str(s: &str) -> Result<Stage> {
        Stage::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| Error::Schema(format!("unknown stage `{s}`")))
    }
}

/// Which stages to run. An empty selection means all of them.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Selection(BTreeSet<Stage>);

impl Selection {
    pub fn all() -> Selection {
        Selection::default()
    }

    pub fn only(stages: impl IntoIterator<Item = Stage>) -> Selection {
        Selection(stages.into_iter().collect())
    }

    fn explicit(&self, stage: Stage) -> bool {
        self.0.contains(&stage)
    }

    fn includes(&self, stage: Stage) -> bool {
        self.0.is_empty() || self.0.contains(&stage)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub status: Status,
    /// Rendered failing expression; present exactly when `status` is `Fail`.
    pub witness: Option<String>,
    pub note: Option<String>,
}

impl Check {
    fn from_verdict(name: &str, v: &Verdict, chart: &Chart) -> Check {
        Check {
            name: name.to_string(),
            status: if v.holds() { Status::Pass } else { Status::Fail },
            witness: v.witness().map(|w| w.render(chart)),
            note: None,
        }
    }

    fn skipped(name: &str, why: &str) -> Check {
        Check {
            name: name.to_string(),
            status: Status::Skipped,
            witness: None,
            note: Some(why.to_string()),
        }
    }

    fn with_note(mut self, note: String) -> Check {
        self.note = Some(note);
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StageReport {
    pub stage: Stage,
    pub checks: Vec<Check>,
    pub elapsed_us: u128,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report {
    pub scenario: String,
    pub stages: Vec<StageReport>,
}

impl Report {
    pub fn checks(&self) -> impl Iterator<Item = (Stage, &Check)> {
        self.stages
            .iter()
            .flat_map(|s| s.checks.iter().map(move |c| (s.stage, c)))
    }

    pub fn passed(&self) -> bool {
        self.checks().all(|(_, c)| c.status != Status::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = (Stage, &Check)> {
        self.checks().filter(|(_, c)| c.status == Status::Fail)
    }

    pub fn check(&self, stage: Stage, name: &str) -> Option<&Check> {
        self.stages
            .iter()
            .find(|s| s.stage == stage)
            .and_then(|s| s.checks.iter().find(|c| c.name == name))
    }

    /// Stable-keyed JSON. Witnesses are included only on request; timing is
    /// confined to the `elapsed_us` fields.
    pub fn to_json(&self, witness: bool) -> Value {
        let stages: Vec<Value> = self
            .stages
            .iter()
            .map(|s| {
                let checks: Vec<Value> = s
                    .checks
                    .iter()
                    .map(|c| {
                        let mut obj = json!({ "name": c.name, "status": c.status });
                        if let Some(n) = &c.note {
                            obj["note"] = json!(n);
                        }
                        if witness {
                            if let Some(w) = &c.witness {
                                obj["witness"] = json!(w);
                            }
                        }
                        obj
                    })
                    .collect();
                json!({ "stage": s.stage, "checks": checks, "elapsed_us": s.elapsed_us as u64 })
            })
            .collect();
        json!({
            "schema": SCHEMA_VERSION,
            "scenario": self.scenario,
            "passed": self.passed(),
            "stages": stages,
        })
    }

    pub fn to_text(&self, witness: bool) -> String {
        let mut out = format!("scenario {}\n", self.scenario);
        for s in &self.stages {
            out.push_str(&format!("[{}]\n", s.stage));
            for c in &s.checks {
                let mark = match c.status {
                    Status::Pass => "✓",
                    Status::Fail => "✗",
                    Status::Skipped => "-",
                };
                out.push_str(&format!("  {mark} {}", c.name));
                if let Some(n) = &c.note {
                    out.push_str(&format!(" ({n})"));
                }
                out.push('\n');
                if witness {
                    if let Some(w) = &c.witness {
                        out.push_str(&format!("      witness: {w}\n"));
                    }
                }
            }
        }
        let failed = self.failures().count();
        if failed == 0 {
            out.push_str("all checks passed\n");
        } else {
            out.push_str(&format!("{failed} check(s) failed\n"));
        }
        out
    }

    pub fn render(&self, format: Format, witness: bool) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.to_json(witness)).expect("report serializes");
                s.push('\n');
                s
            }
            Format::Text => self.to_text(witness),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Text,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Format> {
        match s {
            "json" => Ok(Format::Json),
            "text" => Ok(Format::Text),
            other => Err(Error::UnknownFormat(other.to_string())),
        }
    }
}

/// Artifacts shared between stages, computed on first use.
struct Artifacts<'a> {
    s: &'a Scenario,
    averaged: Option<Connection>,
    q: Option<QForm>,
    sigma_bar: Option<DiffForm>,
    mu_eff: Option<PreMomentumMap>,
}

impl<'a> Artifacts<'a> {
    fn new(s: &'a Scenario) -> Self {
        Artifacts {
            s,
            averaged: None,
            q: None,
            sigma_bar: None,
            mu_eff: None,
        }
    }

    fn averaged(&mut self) -> Result<Connection> {
        if self.averaged.is_none() {
            self.averaged = Some(self.s.action.hannay_berry(&self.s.connection)?);
        }
        Ok(self.averaged.clone().expect("set"))
    }

    fn q(&mut self, stage: &str) -> Result<QForm> {
        if self.q.is_none() {
            let mu = self.s.require_premomentum(stage)?;
            self.q = Some(self.s.action.compute_q(&self.s.connection, &self.s.poisson, mu)?);
        }
        Ok(self.q.clone().expect("set"))
    }

    fn sigma_bar(&mut self, stage: &str) -> Result<DiffForm> {
        if self.sigma_bar.is_none() {
            let sigma = self.s.require_sigma(stage)?;
            let q = self.q(stage)?.q;
            self.sigma_bar = Some(averaged_sigma(&self.s.connection, sigma, &q, &self.s.poisson)?);
        }
        Ok(self.sigma_bar.clone().expect("set"))
    }

    /// The pre-momentum map after the primitive repair, if primitives are given.
    fn mu_eff(&mut self, stage: &str) -> Result<PreMomentumMap> {
        if self.mu_eff.is_none() {
            let s = self.s;
            let mu = s.require_premomentum(stage)?;
            self.mu_eff = Some(match &s.primitives {
                Some(k) => adiabatic_fix(&s.action, &s.connection, mu, k, &s.poisson)?,
                None => mu.clone(),
            });
        }
        Ok(self.mu_eff.clone().expect("set"))
    }
}

/// Runs the selected stages in dependency order.
pub fn run_checks(s: &Scenario, selection: &Selection) -> Result<Report> {
    let mut art = Artifacts::new(s);
    let mut stages = Vec::new();
    for stage in Stage::ALL {
        if !selection.includes(stage) {
            continue;
        }
        let missing = if stage.needs_sigma() && s.sigma.is_none() {
            Some("sigma")
        } else if stage.needs_premomentum() && s.premomentum.is_none() {
            Some("premomentum")
        } else {
            None
        };
        if let Some(what) = missing {
            if selection.explicit(stage) {
                return Err(Error::Schema(format!("stage `{stage}` needs `{what}`")));
            }
            stages.push(StageReport {
                stage,
                checks: vec![Check::skipped(stage.name(), &format!("scenario has no {what}"))],
                elapsed_us: 0,
            });
            continue;
        }
        let start = Instant::now();
        let checks = run_stage(stage, &mut art)?;
        stages.push(StageReport {
            stage,
            checks,
            elapsed_us: start.elapsed().as_micros(),
        });
    }
    Ok(Report {
        scenario: s.name().to_string(),
        stages,
    })
}

fn run_stage(stage: Stage, art: &mut Artifacts<'_>) -> Result<Vec<Check>> {
    let s = art.s;
    let chart = &s.chart;
    let conn = &s.connection;
    let p = &s.poisson;
    let action = &s.action;
    let name = stage.name();
    let check = |n: &str, v: &Verdict| Check::from_verdict(n, v, chart);
    let mut out = Vec::new();
    match stage {
        Stage::Connection => {
            out.push(check("projection", &verify_connection(conn.gamma())));
            out.push(check("curvature_routes_agree", &conn.curvature_routes_agree()?));
        }
        Stage::Poisson => {
            out.push(check("jacobi", &p.verify_jacobi()));
            out.push(check("poisson_connection", &p.verify_poisson_connection(conn)?));
        }
        Stage::Action => {
            let v = action.verify_action(p)?;
            out.push(check("foliation_preserving", &v.foliation_preserving));
            out.push(check("leaf_tangent", &v.leaf_tangent));
            out.push(check("canonical", &v.canonical));
            let ic = action.invariance_criteria(conn)?;
            let c = check(
                "invariance_criteria_agree",
                &Verdict::from_bool(ic.consistent(), "invariance criteria disagree"),
            );
            out.push(match ic.invariant() {
                Some(true) => c.with_note("connection is invariant".into()),
                Some(false) => c.with_note("connection is not invariant".into()),
                None => c,
            });
        }
        Stage::Premomentum => {
            out.push(check("premomentum", &s.require_premomentum(name)?.verify(action, p)?));
        }
        Stage::Averaging => {
            let bar = art.averaged()?;
            let qf = art.q(name)?;
            let q = &qf.q;
            out.push(check(
                "averaged_poisson_connection",
                &p.verify_poisson_connection(&bar)?,
            ));
            out.push(check(
                "averaged_invariant",
                &action.is_invariant(bar.gamma(), "<gamma>")?,
            ));
            let diff = action.connection_difference(conn)?;
            let mut routes = Verdict::pass();
            let mut hamiltonian = Verdict::pass();
            for (i, h) in conn.frame().iter().enumerate() {
                let direct = diff.eval(std::slice::from_ref(h))?;
                let integral = action.xi_via_double_integral(h)?;
                routes = routes.and(|| Verdict::vanishes(&format!("Xi(h{}) routes", i + 1), &(&direct - &integral)));
                let ham = &direct - &p.hamiltonian_vf(&q.component(1 << i));
                hamiltonian = hamiltonian.and(|| Verdict::vanishes(&format!("Xi(h{0}) - P#dQ(h{0})", i + 1), &ham));
            }
            out.push(check("difference_routes_agree", &routes));
            let c = check("difference_is_hamiltonian", &hamiltonian);
            out.push(if qf.dropped_casimir_pi.is_zero() {
                c
            } else {
                c.with_note(format!("dropped Casimir pi-part {}", qf.dropped_casimir_pi.render()))
            });
            out.push(check(
                "averaged_equals_shift",
                &Verdict::equal(
                    "<gamma> - shifted gamma",
                    bar.gamma(),
                    shifted_by_q(conn, q, p)?.gamma(),
                )?,
            ));
            out.push(check("averaged_curvature", &cv2_check(conn, &bar, q, p)?));
            out.push(check(
                "averaged_curvature_invariant",
                &action.is_invariant(&bar.curvature()?, "Curv <gamma>")?,
            ));
        }
        Stage::ConnH => {
            let sigma = s.require_sigma(name)?;
            out.push(check("hamiltonian_curvature", &verify_conn_h(conn, sigma, p)?));
            out.push(check("admissible", &verify_admissible(conn, sigma)?));
        }
        Stage::AveragedSigma => {
            let sigma = s.require_sigma(name)?;
            let bar = art.averaged()?;
            let q = art.q(name)?.q;
            let sigma_bar = art.sigma_bar(name)?;
            out.push(check(
                "averaged_hamiltonian_curvature",
                &verify_conn_h(&bar, &sigma_bar, p)?,
            ));
            // σ̄ is Casimir-valued exactly when ⟨γ⟩ is flat.
            if bar.curvature()?.is_zero() {
                out.push(check("averaged_sigma_casimir", &p.is_casimir_form(&sigma_bar)));
            } else {
                out.push(Check::skipped(
                    "averaged_sigma_casimir",
                    "averaged connection is curved",
                ));
            }
            let ids = averaging_identities(conn, sigma, &q, p)?;
            out.push(check("shifted_derivative", &ids.shifted_derivative));
            out.push(check("derivative_square", &ids.square));
            out.push(check("quadratic_term", &ids.quadratic));
            if verify_admissible(conn, sigma)?.holds() {
                out.push(check("admissibility_preserved", &verify_admissible(&bar, &sigma_bar)?));
            } else {
                out.push(Check::skipped("admissibility_preserved", "input is not admissible"));
            }
            out.push(check(
                "lie_averaged_sigma_casimir",
                &lie_sigma_is_casimir(action, &sigma_bar, p)?,
            ));
        }
        Stage::Adiabatic => {
            let mu = s.require_premomentum(name)?;
            let raw = adiabatic_check(action, conn, mu)?;
            out.push(check("routes_agree", &raw.routes_agree));
            if s.primitives.is_some() {
                let fixed = art.mu_eff(name)?;
                out.push(check("repaired_premomentum", &fixed.verify(action, p)?));
                let after = adiabatic_check(action, conn, &fixed)?;
                out.push(check("repaired_routes_agree", &after.routes_agree));
                out.push(check("adiabatic", &after.adiabatic).with_note("after primitive repair".into()));
            } else {
                out.push(check("adiabatic", &raw.adiabatic));
            }
        }
        Stage::Dirac => {
            let sigma = s.require_sigma(name)?;
            let d = DiracData::build(conn, sigma, p)?;
            out.push(check("lagrangian", &d.verify_lagrangian()?));
            out.push(check("involutive", &d.verify_involutive()?));
            let table = d.bracket_table()?;
            let table_v = table
                .coframes
                .clone()
                .and(|| table.mixed.clone())
                .and(|| table.lifts.clone())
                .and(|| table.lifts_admissible.clone());
            out.push(check("bracket_table", &table_v));

            let bar = art.averaged()?;
            let q = art.q(name)?.q;
            let sigma_bar = art.sigma_bar(name)?;
            let c = s.casimir.clone().unwrap_or_else(|| DiffForm::zero(chart, 2));
            let d_bar = DiracData::build(&bar, &sigma_bar.try_add(&c)?, p)?;
            out.push(check("averaged_lagrangian", &d_bar.verify_lagrangian()?));
            out.push(check("averaged_involutive", &d_bar.verify_involutive()?));
            let inv = verify_g_invariance(action, &d_bar)?;
            out.push(check("averaged_invariant", &inv.pullback));
            out.push(check(
                "invariance_routes_agree",
                &Verdict::from_bool(inv.routes_agree(), "pullback and Lie routes disagree"),
            ));
            let b = q.exterior_derivative().try_sub(&c)?;
            let mut gauge = Verdict::pass();
            for (g, section) in d.generators().iter().zip(d.gauge_sections(&b)?) {
                let label = format!("gauge image of {}", g.label(chart));
                gauge = gauge.and(|| d_bar.contains(&section, &label).expect("same chart"));
            }
            out.push(check("gauge_equivalent", &gauge));
            let d_bar0 = DiracData::build(&bar, &sigma_bar, p)?;
            out.push(check(
                "presymplectic_shift",
                &presymplectic_comparison(&d, &d_bar0, &q)?,
            ));
            let mu = art.mu_eff(name)?;
            out.push(check(
                "hamiltonian_generators",
                &d_bar.hamiltonian_generator_check(action, &mu)?,
            ));
        }
    }
    Ok(out)
}

/// `⟨γ⟩`, `Q` and `σ̄` packaged as a new scenario file; the pre-momentum
/// map and Casimir cocycle carry over.
pub fn averaged_scenario(s: &Scenario) -> Result<ScenarioFile> {
    let mut art = Artifacts::new(s);
    let bar = art.averaged()?;
    let q = art.q("average")?.q;
    let sigma_bar = match &s.sigma {
        Some(_) => Some(two_form_entries(&art.sigma_bar("average")?)),
        None => None,
    };
    let chart = &s.chart;
    let q_map = chart
        .horizontal()
        .map(|i| (chart.coord_name(i).to_string(), q.component(1 << i).render(chart)))
        .collect();
    Ok(ScenarioFile {
        name: format!("{}_averaged", s.name()),
        description: Some(format!("Averaged connection, Q and averaged sigma of `{}`.", s.name())),
        connection: connection_lifts(&bar),
        sigma: sigma_bar,
        q: Some(q_map),
        primitives: None,
        premomentum: s.file.premomentum.clone(),
        ..s.file.clone()
    })
}

/// One row of the generator table of `D^{γ,σ}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GeneratorRow {
    pub label: String,
    pub vector: String,
    pub form: String,
}

pub fn generator_table(s: &Scenario) -> Result<Vec<GeneratorRow>> {
    let sigma = s.require_sigma("dirac")?;
    let d = DiracData::build(&s.connection, sigma, &s.poisson)?;
    Ok(d.generators()
        .iter()
        .map(|g| GeneratorRow {
            label: g.label(&s.chart),
            vector: g.section.x.render(),
            form: g.section.alpha.render(),
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{bundled, bundled_names};

    #[test]
    fn bundled_scenarios_pass() {
        for name in bundled_names() {
            let s = bundled(name).unwrap();
            let r = run_checks(&s, &Selection::all()).unwrap();
            let failed: Vec<_> = r
                .failures()
                .map(|(st, c)| format!("{st}/{}: {:?}", c.name, c.witness))
                .collect();
            assert!(failed.is_empty(), "{name}: {failed:?}");
        }
    }

    #[test]
    fn wrong_sigma_fails_with_witness() {
        let mut s = bundled("hb4d").unwrap();
        s.sigma = Some(DiffForm::zero(&s.chart, 2));
        let r = run_checks(&s, &Selection::only([Stage::ConnH])).unwrap();
        assert!(!r.passed());
        let c = r.check(Stage::ConnH, "hamiltonian_curvature").unwrap();
        assert_eq!(c.status, Status::Fail);
        let w = c.witness.as_ref().unwrap();
        assert!(!w.ends_with(": 0"), "{w}");
    }

    #[test]
    fn missing_inputs() {
        let mut s = bundled("triv").unwrap();
        s.premomentum = None;
        assert!(matches!(
            run_checks(&s, &Selection::only([Stage::Premomentum])),
            Err(Error::Schema(_))
        ));
        let r = run_checks(&s, &Selection::all()).unwrap();
        assert_eq!(
            r.check(Stage::Premomentum, "premomentum").unwrap().status,
            Status::Skipped
        );
        assert!(r.passed());
    }

    #[test]
    fn stage_and_format_parsing() {
        for st in Stage::ALL {
            assert_eq!(st.name().parse::<Stage>().unwrap(), st);
        }
        assert!("everything".parse::<Stage>().is_err());
        assert_eq!("json".parse::<Format>().unwrap(), Format::Json);
        assert!(matches!("yaml".parse::<Format>(), Err(Error::UnknownFormat(_))));
    }

    #[test]
    fn json_is_deterministic_modulo_timing() {
        let s = bundled("hb4d").unwrap();
        let strip = |mut v: Value| {
            for st in v["stages"].as_array_mut().unwrap() {
                st["elapsed_us"] = json!(0);
            }
            v
        };
        let a = strip(run_checks(&s, &Selection::all()).unwrap().to_json(true));
        let b = strip(run_checks(&s, &Selection::all()).unwrap().to_json(true));
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        assert_eq!(a["schema"], json!(1));
    }

    #[test]
    fn averaged_scenario_is_invariant_and_reloads() {
        let s = bundled("hb4d").unwrap();
        let file = averaged_scenario(&s).unwrap();
        assert_eq!(file.q.as_ref().unwrap()["x1"], "-x2*q");
        let again = Scenario::from_json(&file.to_json()).unwrap();
        assert!(again
            .action
            .invariance_criteria(&again.connection)
            .unwrap()
            .invariant()
            .unwrap());
        assert!(again.connection.curvature().unwrap().is_zero());
        let r = run_checks(&again, &Selection::all()).unwrap();
        assert!(r.passed());
    }

    #[test]
    fn generator_table_lists_every_generator() {
        let s = bundled("hb4d").unwrap();
        let rows = generator_table(&s).unwrap();
        assert_eq!(rows.len(), s.chart.dim());
        assert_eq!(rows[0].label, "e_h1");
    }
}
