//! Torus actions given by explicit trigonometric flows, Haar averaging, the
//! connection difference form and the Hannay–Berry connection.
//!
//! Each circle factor `j` owns one chart angle `θ_j`; its flow `Φ^{(j)}_θ`
//! maps every coordinate to a scalar depending on `θ_j` only through
//! harmonics. The inverse flow is obtained by `θ_j ↦ −θ_j`.
//!
//! Double integrals over `G × [0,1]` are evaluated per factor through the
//! substitution `s = tθ`:
//! `∫_G∫₀¹ Φ*_{exp(ta)} (θ f) dt dg = (1/2π)∫₀^{2π}∫₀^θ Φ*_s f ds dθ`,
//! which is [`Scalar::iterated_mean`] of the pulled-back integrand. For a
//! torus the factors are combined as `D(Z) = Σ_j ⟨D_j(Z)⟩_{<j}` where
//! `⟨·⟩_{<j}` averages over the factors preceding `j`; this is the exact
//! telescoping of `⟨·⟩ = ⟨·⟩_k ∘ … ∘ ⟨·⟩_1`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::foliation::Connection;
use crate::geom::{CoordMap, DiffForm, Tensor, VecValuedForm, VectorField};
use crate::poisson::PoissonBivector;
use crate::symcalc::{Angle, Chart, IteratedMean, Scalar};
use crate::Verdict;

/// One circle factor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Flow {
    angle: Angle,
    map: CoordMap,
}

impl Flow {
    pub fn angle(&self) -> Angle {
        self.angle
    }

    /// `Φ_θ` with symbolic `θ`, inverse `Φ_{−θ}`.
    pub fn map(&self) -> &CoordMap {
        &self.map
    }

    /// `ξ^i = ∂_θ Φ^i |_{θ=0}`.
    pub fn generator(&self) -> VectorField {
        let comps = self
            .map
            .forward()
            .iter()
            .map(|c| c.partial_angle(self.angle).at_angle_zero(self.angle))
            .collect();
        VectorField::new(self.map.chart(), comps).expect("flow has one component per coordinate")
    }

    /// The flow with `θ` replaced by `Σ k_j φ_j`.
    fn reparametrized(&self, image: Vec<(Angle, i64)>) -> CoordMap {
        let mut sub = BTreeMap::new();
        sub.insert(self.angle, image);
        self.map.map_components(|c| c.substitute_angles(&sub))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorusAction {
    chart: Chart,
    flows: Vec<Flow>,
}

/// Structured result of [`TorusAction::verify_action`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActionVerdict {
    pub foliation_preserving: Verdict,
    pub leaf_tangent: Verdict,
    pub canonical: Verdict,
}

impl ActionVerdict {
    pub fn all(&self) -> bool {
        self.foliation_preserving.holds() && self.leaf_tangent.holds() && self.canonical.holds()
    }
}

impl TorusAction {
    /// Builds and validates the action: each flow is the identity at `θ = 0`,
    /// satisfies the one-parameter group law, depends on no other angle, and
    /// flows commute pairwise.
    pub fn new(chart: &Chart, flows: Vec<(Angle, Vec<Scalar>)>) -> Result<TorusAction> {
        let mut built = Vec::with_capacity(flows.len());
        for (angle, forward) in flows {
            if angle.0 as usize >= chart.n_angles() {
                return Err(Error::InvalidChart(format!("angle index {} out of range", angle.0)));
            }
            if built.iter().any(|f: &Flow| f.angle == angle) {
                return Err(Error::InvalidChart(format!(
                    "angle {} drives two flows",
                    chart.angle_name(angle)
                )));
            }
            for c in &forward {
                if let Some(other) = chart.angles().find(|a| *a != angle && c.depends_on_angle(*a)) {
                    return Err(Error::InvariantViolation {
                        law: "flow".into(),
                        detail: format!(
                            "flow of {} depends on {}",
                            chart.angle_name(angle),
                            chart.angle_name(other)
                        ),
                    });
                }
            }
            let mut neg = BTreeMap::new();
            neg.insert(angle, vec![(angle, -1)]);
            let inverse = forward.iter().map(|c| c.substitute_angles(&neg)).collect();
            let map = CoordMap::new(chart, forward, Some(inverse))?;
            built.push(Flow { angle, map });
        }
        let action = TorusAction {
            chart: chart.clone(),
            flows: built,
        };
        action.validate()?;
        Ok(action)
    }

    /// The action with no circle factors.
    pub fn trivial(chart: &Chart) -> TorusAction {
        TorusAction {
            chart: chart.clone(),
            flows: Vec::new(),
        }
    }

    fn validate(&self) -> Result<()> {
        let fresh = Angle(self.chart.n_angles() as u16);
        let violation = |law: &str, detail: String| Error::InvariantViolation {
            law: law.into(),
            detail,
        };
        for f in &self.flows {
            let name = self.chart.angle_name(f.angle);
            for (i, c) in f.map.forward().iter().enumerate() {
                if c.at_angle_zero(f.angle) != self.chart.coord_fn(i) {
                    return Err(violation(
                        "flow identity",
                        format!("flow of {name} at 0 moves {}", self.chart.coord_name(i)),
                    ));
                }
            }
            let composed = f.map.compose(&f.reparametrized(vec![(fresh, 1)]))?;
            let sum = f.reparametrized(vec![(f.angle, 1), (fresh, 1)]);
            if composed.forward() != sum.forward() {
                return Err(violation("flow group law", format!("flow of {name}")));
            }
        }
        for (a, f) in self.flows.iter().enumerate() {
            for g in &self.flows[a + 1..] {
                let fg = f.map.compose(&g.map)?;
                let gf = g.map.compose(&f.map)?;
                if fg.forward() != gf.forward() {
                    return Err(violation(
                        "commuting flows",
                        format!(
                            "flows of {} and {}",
                            self.chart.angle_name(f.angle),
                            self.chart.angle_name(g.angle)
                        ),
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn flows(&self) -> &[Flow] {
        &self.flows
    }

    pub fn rank(&self) -> usize {
        self.flows.len()
    }

    /// Generator of factor `j`.
    pub fn infinitesimal_generator(&self, j: usize) -> VectorField {
        self.flows[j].generator()
    }

    pub fn generators(&self) -> Vec<VectorField> {
        self.flows.iter().map(Flow::generator).collect()
    }

    /// Foliation preservation (`Φ^*∂_v` vertical), leaf tangency (`ξ`
    /// vertical) and canonicity (`L_ξ P = 0`).
    pub fn verify_action(&self, p: &PoissonBivector) -> Result<ActionVerdict> {
        let mut fp = Verdict::pass();
        let mut lt = Verdict::pass();
        let mut can = Verdict::pass();
        for f in &self.flows {
            let name = self.chart.angle_name(f.angle).to_string();
            for v in self.chart.vertical() {
                let pulled = f.map.pull_vector(&VectorField::coordinate(&self.chart, v))?;
                fp = fp.and(|| {
                    let h = pulled.horizontal_part();
                    Verdict::vanishes(
                        &format!(
                            "flow {name}: pullback of d_{} horizontal part",
                            self.chart.coord_name(v)
                        ),
                        &h,
                    )
                });
            }
            let xi = f.generator();
            lt = lt.and(|| Verdict::vanishes(&format!("generator {name} horizontal part"), &xi.horizontal_part()));
            let lie = p.lie_along(&xi)?;
            can = can.and(|| Verdict::vanishes(&format!("L_xi({name}) P"), &lie));
        }
        Ok(ActionVerdict {
            foliation_preserving: fp,
            leaf_tangent: lt,
            canonical: can,
        })
    }

    /// Haar average over the factors listed in `factors`, in order.
    pub fn average_over<T: Tensor>(&self, t: &T, factors: impl IntoIterator<Item = usize>) -> Result<T> {
        let mut cur = t.clone();
        for j in factors {
            let f = &self.flows[j];
            let pulled = cur.pullback(&f.map)?;
            cur = pulled.map_coefficients(&mut |c| c.average_over_angle(f.angle));
        }
        Ok(cur)
    }

    /// `⟨T⟩ = ∫_G Φ_g^* T dg`.
    pub fn average_tensor<T: Tensor>(&self, t: &T) -> Result<T> {
        self.average_over(t, 0..self.flows.len())
    }

    /// `⟨f⟩` for a function.
    pub fn average_scalar(&self, f: &Scalar) -> Scalar {
        self.average_scalar_over(f, 0..self.flows.len())
    }

    fn average_scalar_over(&self, f: &Scalar, factors: impl IntoIterator<Item = usize>) -> Scalar {
        let mut cur = f.clone();
        for j in factors {
            let fl = &self.flows[j];
            cur = fl.map.pull_function(&cur).average_over_angle(fl.angle);
        }
        cur
    }

    /// `Φ_θ^* T = T` for every factor, with symbolic angle.
    pub fn is_invariant<T: Tensor>(&self, t: &T, what: &str) -> Result<Verdict> {
        let mut verdict = Verdict::pass();
        for f in &self.flows {
            let diff = t.pullback(&f.map)?.try_sub(t)?;
            verdict = verdict.and(|| {
                Verdict::vanishes(
                    &format!("{what}: pullback by {} minus original", self.chart.angle_name(f.angle)),
                    &diff,
                )
            });
        }
        Ok(verdict)
    }

    pub fn is_invariant_scalar(&self, f: &Scalar, what: &str) -> Verdict {
        for fl in &self.flows {
            let diff = &fl.map.pull_function(f) - f;
            if !diff.is_zero() {
                return Verdict::fail(format!("{what}: pullback by {}", self.chart.angle_name(fl.angle)), diff);
            }
        }
        Verdict::pass()
    }

    /// `⟨γ⟩`.
    pub fn hannay_berry(&self, conn: &Connection) -> Result<Connection> {
        Connection::from_form(&self.average_tensor(conn.gamma())?)
    }

    /// `Ξ^G = γ − ⟨γ⟩`.
    pub fn connection_difference(&self, conn: &Connection) -> Result<VecValuedForm> {
        Ok(conn.gamma() - &self.average_tensor(conn.gamma())?)
    }

    /// `Ξ^G(Z) = −∫_G∫₀¹ Φ*_{exp(tξ)}[Z, ξ_M] dt dg`, exactly.
    pub fn xi_via_double_integral(&self, z: &VectorField) -> Result<VectorField> {
        let mut total = VectorField::zero(&self.chart);
        for (j, f) in self.flows.iter().enumerate() {
            let integrand = f.map.pull_vector(&z.bracket(&f.generator()))?;
            let mut rational = Vec::with_capacity(self.chart.dim());
            for (i, c) in integrand.comps().iter().enumerate() {
                let IteratedMean {
                    rational: r,
                    pi_coefficient,
                } = c.iterated_mean(f.angle);
                if !pi_coefficient.is_zero() {
                    return Err(Error::NonClosedOrbitCoefficients(format!(
                        "d_{} component of the bracket with the {} generator has nonzero mean {}",
                        self.chart.coord_name(i),
                        self.chart.angle_name(f.angle),
                        pi_coefficient.render(&self.chart)
                    )));
                }
                rational.push(-r);
            }
            let dj = VectorField::new(&self.chart, rational)?;
            total = &total + &self.average_over(&dj, 0..j)?;
        }
        Ok(total)
    }

    /// `Q(h_i) = −∫_G∫₀¹ Φ*_{exp(ta)} i_{h_i}(μ_a)_{1,0} dt dg` on every frame
    /// field. The constant-in-angle part of each integrand contributes
    /// `−π⟨μ(h_i)⟩`, which must be a Casimir and is dropped.
    pub fn compute_q(&self, conn: &Connection, p: &PoissonBivector, mu: &PreMomentumMap) -> Result<QForm> {
        if mu.forms.len() != self.flows.len() {
            return Err(Error::Schema(format!(
                "pre-momentum map has {} forms for {} generators",
                mu.forms.len(),
                self.flows.len()
            )));
        }
        let mut q = DiffForm::zero(&self.chart, 1);
        let mut dropped = DiffForm::zero(&self.chart, 1);
        for (i, h) in conn.frame().iter().enumerate() {
            let mut qi = Scalar::zero();
            let mut pi_part = Scalar::zero();
            for (j, f) in self.flows.iter().enumerate() {
                let integrand = f.map.pull_function(&mu.forms[j].eval(std::slice::from_ref(h))?);
                let IteratedMean {
                    rational,
                    pi_coefficient,
                } = integrand.iterated_mean(f.angle);
                qi -= &self.average_scalar_over(&rational, 0..j);
                pi_part -= &self.average_scalar_over(&pi_coefficient, 0..j);
            }
            let cas = p.is_casimir(&pi_part);
            if let Some(w) = cas.witness() {
                return Err(Error::NonClosedOrbitCoefficients(format!(
                    "mean of mu(h{}) is not a Casimir: {}",
                    i + 1,
                    w.render(&self.chart)
                )));
            }
            q.set(1 << i, qi);
            dropped.set(1 << i, pi_part);
        }
        Ok(QForm {
            q,
            dropped_casimir_pi: dropped,
        })
    }

    /// Conditions (ii) `⟨γ⟩ = γ`, (iii) `[γ, ξ]_FN = 0`, (v) `Ξ^G = 0`.
    pub fn invariance_criteria(&self, conn: &Connection) -> Result<InvarianceCriteria> {
        let avg = self.average_tensor(conn.gamma())?;
        let averaged_equal = Verdict::equal("<gamma> - gamma", &avg, conn.gamma())?;
        let mut fn_zero = Verdict::pass();
        for (j, xi) in self.generators().iter().enumerate() {
            let br = conn.gamma().fn_bracket(&VecValuedForm::from_vector(xi))?;
            fn_zero = fn_zero.and(|| Verdict::vanishes(&format!("[gamma, xi{}]_FN", j + 1), &br));
        }
        let xi = self.connection_difference(conn)?;
        let difference_zero = Verdict::vanishes("Xi^G", &xi);
        Ok(InvarianceCriteria {
            averaged_equal,
            fn_bracket_zero: fn_zero,
            difference_zero,
        })
    }

    /// `[γ, ξ]_FN(Z̃) = [γ, ξ]_FN(Z)` for `Z̃ = Z + Ξ^G(Z)` on the frame.
    pub fn fn_bracket_shift_check(&self, conn: &Connection) -> Result<Verdict> {
        let xi_form = self.connection_difference(conn)?;
        let mut verdict = Verdict::pass();
        for (j, g) in self.generators().iter().enumerate() {
            let br = conn.gamma().fn_bracket(&VecValuedForm::from_vector(g))?;
            for (i, h) in conn.frame().iter().enumerate() {
                let tilde = h + &xi_form.eval(std::slice::from_ref(h))?;
                let diff = &br.eval(&[tilde])? - &br.eval(std::slice::from_ref(h))?;
                verdict =
                    verdict.and(|| Verdict::vanishes(&format!("[gamma, xi{}]_FN shift on h{}", j + 1, i + 1), &diff));
            }
        }
        Ok(verdict)
    }
}

/// Output of [`TorusAction::compute_q`]: the horizontal form `Q` and the
/// Casimir-valued coefficient of `π` removed from it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QForm {
    pub q: DiffForm,
    pub dropped_casimir_pi: DiffForm,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvarianceCriteria {
    pub averaged_equal: Verdict,
    pub fn_bracket_zero: Verdict,
    pub difference_zero: Verdict,
}

impl InvarianceCriteria {
    /// All three conditions agree.
    pub fn consistent(&self) -> bool {
        let a = self.averaged_equal.holds();
        a == self.fn_bracket_zero.holds() && a == self.difference_zero.holds()
    }

    /// The shared verdict when consistent.
    pub fn invariant(&self) -> Option<bool> {
        self.consistent().then(|| self.averaged_equal.holds())
    }
}

/// One 1-form per torus generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PreMomentumMap {
    pub forms: Vec<DiffForm>,
}

impl PreMomentumMap {
    pub fn new(forms: Vec<DiffForm>) -> Result<Self> {
        for f in &forms {
            if f.degree() != 1 {
                return Err(Error::DegreeMismatch {
                    expected: 1,
                    found: f.degree(),
                });
            }
        }
        Ok(PreMomentumMap { forms })
    }

    /// `μ^ξ = dJ^ξ`.
    pub fn exact(chart: &Chart, potentials: &[Scalar]) -> Self {
        PreMomentumMap {
            forms: potentials.iter().map(|j| DiffForm::differential(chart, j)).collect(),
        }
    }

    /// Checks `ξ_j = P♯μ_j` and `i_{P♯α} dμ_j = 0` on the coordinate coframe.
    pub fn verify(&self, action: &TorusAction, p: &PoissonBivector) -> Result<Verdict> {
        if self.forms.len() != action.rank() {
            return Ok(Verdict::fail(
                format!("{} forms for {} generators", self.forms.len(), action.rank()),
                Scalar::one(),
            ));
        }
        let chart = action.chart();
        let mut verdict = Verdict::pass();
        for (j, (mu, xi)) in self.forms.iter().zip(action.generators()).enumerate() {
            let c1 = &xi - &p.sharp(mu)?;
            verdict = verdict.and(|| Verdict::vanishes(&format!("xi{} - P#mu{}", j + 1, j + 1), &c1));
            let dmu = mu.exterior_derivative();
            for a in 0..chart.dim() {
                let v = p.sharp(&DiffForm::coordinate(chart, a))?;
                let c2 = dmu.interior(&v)?;
                verdict =
                    verdict.and(|| Verdict::vanishes(&format!("i_(P#d{}) dmu{}", chart.coord_name(a), j + 1), &c2));
            }
        }
        Ok(verdict)
    }
}
