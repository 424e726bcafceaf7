//! JSON scenario files.
//!
//! Expressions are strings in the [`crate::symcalc`] grammar. Coordinates are
//! referred to by name; every name must belong to the declared chart. A file
//! looks like
//!
//! ```json
//! {
//!   "name": "hb4d",
//!   "chart": { "horizontal": ["x1", "x2"], "vertical": ["q", "p"], "angles": ["theta"] },
//!   "connection": { "lifts": { "x1": { "p": "x2" } } },
//!   "poisson": [["q", "p", "1"]],
//!   "action": [{ "angle": "theta", "map": { "q": "q*cos(theta) - p*sin(theta)",
//!                                          "p": "q*sin(theta) + p*cos(theta)" } }],
//!   "premomentum": [{ "potential": "(q^2 + p^2)/2" }],
//!   "sigma": [["x1", "x2", "q"]],
//!   "casimir": [["x1", "x2", "x1"]]
//! }
//! ```
//!
//! `connection` is either `lifts` (the vertical part of `h_i = ∂x_i + …` per
//! horizontal coordinate; omitted coordinates lift flatly) or `form` (the
//! components `γ(∂_a) = Σ_b c ∂_b`, checked to be a projection onto the
//! vertical distribution). Flow maps omit coordinates they fix.
//! `premomentum` entries are either exact (`potential`) or explicit 1-forms
//! (`form`). `q` is informational and written by `average`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::action::{PreMomentumMap, TorusAction};
use crate::error::{Error, Result};
use crate::foliation::{require_horizontal, Connection};
use crate::geom::{DiffForm, VecValuedForm};
use crate::poisson::PoissonBivector;
use crate::symcalc::{Chart, Scalar};

/// `[coord, coord, expr]`.
pub type Entry = (String, String, String);

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub chart: ChartSpec,
    pub connection: ConnectionSpec,
    pub poisson: Vec<Entry>,
    #[serde(default)]
    pub action: Vec<FlowSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub premomentum: Option<Vec<MomentumSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<Vec<Entry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub casimir: Option<Vec<Entry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub primitives: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<BTreeMap<String, String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChartSpec {
    pub horizontal: Vec<String>,
    pub vertical: Vec<String>,
    #[serde(default)]
    pub angles: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ConnectionSpec {
    Lifts(BTreeMap<String, BTreeMap<String, String>>),
    Form(BTreeMap<String, BTreeMap<String, String>>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowSpec {
    pub angle: String,
    #[serde(default)]
    pub map: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum MomentumSpec {
    Potential(String),
    Form(BTreeMap<String, String>),
}

/// A loaded scenario; every constituent has passed its constructor checks.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub file: ScenarioFile,
    pub chart: Chart,
    pub connection: Connection,
    pub poisson: PoissonBivector,
    pub action: TorusAction,
    pub premomentum: Option<PreMomentumMap>,
    pub sigma: Option<DiffForm>,
    pub casimir: Option<DiffForm>,
    pub primitives: Option<Vec<Scalar>>,
}

const BUNDLED: &[(&str, &str)] = &[
    ("triv", include_str!("../scenarios/triv.json")),
    ("triv_dx1", include_str!("../scenarios/triv_dx1.json")),
    ("hb4d", include_str!("../scenarios/hb4d.json")),
    ("hb4d_inv", include_str!("../scenarios/hb4d_inv.json")),
    ("ext5", include_str!("../scenarios/ext5.json")),
];

/// Names of the scenarios compiled into the crate.
pub fn bundled_names() -> impl Iterator<Item = &'static str> {
    BUNDLED.iter().map(|(n, _)| *n)
}

/// Source text of a bundled scenario; `name` may carry a `.json` suffix.
pub fn bundled_source(name: &str) -> Option<&'static str> {
    let stem = name.strip_suffix(".json").unwrap_or(name);
    BUNDLED.iter().find(|(n, _)| *n == stem).map(|(_, s)| *s)
}

pub fn bundled(name: &str) -> Result<Scenario> {
    let src = bundled_source(name).ok_or_else(|| Error::Schema(format!("no bundled scenario `{name}`")))?;
    Scenario::from_json(src)
}

impl ScenarioFile {
    pub fn from_json(source: &str) -> Result<ScenarioFile> {
        serde_json::from_str(source).map_err(|e| {
            let message = e.to_string();
            if e.is_data() {
                Error::Schema(message)
            } else {
                Error::Parse {
                    line: e.line(),
                    column: e.column(),
                    message,
                }
            }
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario files serialize")
    }
}

impl Scenario {
    pub fn from_json(source: &str) -> Result<Scenario> {
        Scenario::from_file(ScenarioFile::from_json(source)?)
    }

    pub fn from_file(file: ScenarioFile) -> Result<Scenario> {
        let spec = &file.chart;
        let chart = Chart::new(&spec.horizontal, &spec.vertical, &spec.angles)?;
        let ctx = Ctx { chart: &chart };

        let connection = ctx.connection(&file.connection)?;

        let entries = file
            .poisson
            .iter()
            .enumerate()
            .map(|(k, (a, b, e))| {
                let field = format!("poisson[{k}]");
                Ok((ctx.coord(a, &field)?, ctx.coord(b, &field)?, ctx.expr(e, &field)?))
            })
            .collect::<Result<Vec<_>>>()?;
        let poisson = PoissonBivector::from_entries(&chart, &entries)?;

        let flows = file
            .action
            .iter()
            .enumerate()
            .map(|(k, f)| ctx.flow(f, &format!("action[{k}]")))
            .collect::<Result<Vec<_>>>()?;
        let action = TorusAction::new(&chart, flows)?;

        let premomentum = match &file.premomentum {
            None => None,
            Some(list) => {
                if list.len() != action.rank() {
                    return Err(Error::Schema(format!(
                        "premomentum has {} entries for {} circle factors",
                        list.len(),
                        action.rank()
                    )));
                }
                let forms = list
                    .iter()
                    .enumerate()
                    .map(|(k, m)| ctx.momentum(m, &format!("premomentum[{k}]")))
                    .collect::<Result<Vec<_>>>()?;
                Some(PreMomentumMap::new(forms)?)
            }
        };

        let sigma = file.sigma.as_ref().map(|e| ctx.two_form(e, "sigma")).transpose()?;
        let casimir = file.casimir.as_ref().map(|e| ctx.two_form(e, "casimir")).transpose()?;

        let primitives = match &file.primitives {
            None => None,
            Some(list) => {
                let n = premomentum.as_ref().map_or(0, |m| m.forms.len());
                if list.len() != n {
                    return Err(Error::Schema(format!(
                        "{} primitives for {n} premomentum forms",
                        list.len()
                    )));
                }
                Some(
                    list.iter()
                        .enumerate()
                        .map(|(k, e)| ctx.expr(e, &format!("primitives[{k}]")))
                        .collect::<Result<Vec<_>>>()?,
                )
            }
        };

        if let Some(q) = &file.q {
            for (coord, e) in q {
                let field = format!("q.{coord}");
                let i = ctx.coord(coord, &field)?;
                if !chart.is_horizontal(i) {
                    return Err(Error::Schema(format!("{field}: `{coord}` is not horizontal")));
                }
                ctx.expr(e, &field)?;
            }
        }

        Ok(Scenario {
            file,
            chart,
            connection,
            poisson,
            action,
            premomentum,
            sigma,
            casimir,
            primitives,
        })
    }

    pub fn name(&self) -> &str {
        &self.file.name
    }

    /// `σ`, or a schema error naming the stage that needs it.
    pub fn require_sigma(&self, stage: &str) -> Result<&DiffForm> {
        self.sigma
            .as_ref()
            .ok_or_else(|| Error::Schema(format!("stage `{stage}` needs `sigma`")))
    }

    pub fn require_premomentum(&self, stage: &str) -> Result<&PreMomentumMap> {
        self.premomentum
            .as_ref()
            .ok_or_else(|| Error::Schema(format!("stage `{stage}` needs `premomentum`")))
    }
}

struct Ctx<'a> {
    chart: &'a Chart,
}

impl Ctx<'_> {
    fn coord(&self, name: &str, field: &str) -> Result<usize> {
        self.chart
            .coord(name)
            .map_err(|_| Error::Schema(format!("{field}: unknown coordinate `{name}`")))
    }

    fn expr(&self, src: &str, field: &str) -> Result<Scalar> {
        self.chart.parse(src).map_err(|e| match e {
            Error::Parse { line, column, message } => Error::Parse {
                line,
                column,
                message: format!("field `{field}`: {message}"),
            },
            Error::UnknownSymbol(s) => Error::Parse {
                line: 1,
                column: src.find(s.as_str()).map_or(1, |c| c + 1),
                message: format!("field `{field}`: unknown symbol `{s}`"),
            },
            other => Error::Parse {
                line: 1,
                column: 1,
                message: format!("field `{field}`: {other}"),
            },
        })
    }

    fn connection(&self, spec: &ConnectionSpec) -> Result<Connection> {
        let chart = self.chart;
        match spec {
            ConnectionSpec::Lifts(lifts) => {
                let mut parts = vec![vec![Scalar::zero(); chart.n_v()]; chart.n_h()];
                for (h, comps) in lifts {
                    let field = format!("connection.lifts.{h}");
                    let i = self.coord(h, &field)?;
                    if !chart.is_horizontal(i) {
                        return Err(Error::Schema(format!("{field}: `{h}` is not horizontal")));
                    }
                    for (v, e) in comps {
                        let field = format!("{field}.{v}");
                        let a = self.coord(v, &field)?;
                        if chart.is_horizontal(a) {
                            return Err(Error::Schema(format!("{field}: `{v}` is not vertical")));
                        }
                        parts[i][a - chart.n_h()] = self.expr(e, &field)?;
                    }
                }
                Connection::from_vertical_parts(chart, &parts)
            }
            ConnectionSpec::Form(rows) => {
                // comps[b] is the 1-form whose value on ∂_a is the ∂_b component of γ(∂_a).
                let mut comps = vec![DiffForm::zero(chart, 1); chart.dim()];
                for (a_name, image) in rows {
                    let field = format!("connection.form.{a_name}");
                    let a = self.coord(a_name, &field)?;
                    for (b_name, e) in image {
                        let field = format!("{field}.{b_name}");
                        let b = self.coord(b_name, &field)?;
                        comps[b].set(1 << a, self.expr(e, &field)?);
                    }
                }
                Connection::from_form(&VecValuedForm::new(chart, 1, comps)?)
            }
        }
    }

    fn flow(&self, spec: &FlowSpec, field: &str) -> Result<(crate::symcalc::Angle, Vec<Scalar>)> {
        let chart = self.chart;
        let angle = chart
            .angle(&spec.angle)
            .map_err(|_| Error::Schema(format!("{field}: unknown angle `{}`", spec.angle)))?;
        let mut images: Vec<Scalar> = (0..chart.dim()).map(|i| chart.coord_fn(i)).collect();
        for (c, e) in &spec.map {
            let f = format!("{field}.map.{c}");
            images[self.coord(c, &f)?] = self.expr(e, &f)?;
        }
        Ok((angle, images))
    }

    fn momentum(&self, spec: &MomentumSpec, field: &str) -> Result<DiffForm> {
        match spec {
            MomentumSpec::Potential(e) => {
                let f = self.expr(e, &format!("{field}.potential"))?;
                Ok(DiffForm::differential(self.chart, &f))
            }
            MomentumSpec::Form(comps) => {
                let mut out = DiffForm::zero(self.chart, 1);
                for (c, e) in comps {
                    let f = format!("{field}.form.{c}");
                    out.set(1 << self.coord(c, &f)?, self.expr(e, &f)?);
                }
                Ok(out)
            }
        }
    }

    fn two_form(&self, entries: &[Entry], field: &str) -> Result<DiffForm> {
        let mut terms = Vec::with_capacity(entries.len());
        for (k, (a, b, e)) in entries.iter().enumerate() {
            let f = format!("{field}[{k}]");
            let (i, j) = (self.coord(a, &f)?, self.coord(b, &f)?);
            if i == j {
                return Err(Error::Schema(format!("{f}: repeated coordinate `{a}`")));
            }
            terms.push(([i, j], self.expr(e, &f)?));
        }
        let refs: Vec<(&[usize], Scalar)> = terms.iter().map(|(ij, c)| (&ij[..], c.clone())).collect();
        let form = DiffForm::from_terms(self.chart, 2, &refs)?;
        require_horizontal(&form, field)?;
        Ok(form)
    }
}

/// `[coord, coord, expr]` entries of a horizontal 2-form, one per nonzero
/// component.
pub fn two_form_entries(form: &DiffForm) -> Vec<Entry> {
    let chart = form.chart();
    form.terms()
        .map(|(b, c)| {
            let mut idx = crate::geom::blade_indices(b);
            let i = idx.next().expect("degree 2");
            let j = idx.next().expect("degree 2");
            (
                chart.coord_name(i).to_string(),
                chart.coord_name(j).to_string(),
                c.render(chart),
            )
        })
        .collect()
}

/// The `lifts` description of a connection, omitting flat directions.
pub fn connection_lifts(conn: &Connection) -> ConnectionSpec {
    let chart = conn.chart();
    let mut lifts = BTreeMap::new();
    for (i, h) in conn.frame().iter().enumerate() {
        let mut comps = BTreeMap::new();
        for a in chart.vertical() {
            let c = h.comp(a);
            if !c.is_zero() {
                comps.insert(chart.coord_name(a).to_string(), c.render(chart));
            }
        }
        if !comps.is_empty() {
            lifts.insert(chart.coord_name(i).to_string(), comps);
        }
    }
    ConnectionSpec::Lifts(lifts)
}
