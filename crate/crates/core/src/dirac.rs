//! Courant calculus on `TM ⊕ T*M` and the coupling distribution
//! `D^{γ,σ} = {(X + P♯α, α − i_Xσ) | X ∈ ℍ^γ, α ∈ (ℍ^γ)⁰}`.
//!
//! `D^{γ,σ}` is Lagrangian, so a section lies in it iff it pairs to zero with
//! every generator. All membership tests below use that criterion.
//!
//! The leafwise presymplectic form of a Dirac structure is read off as
//! `ω(X, Y) = −α(Y)` for `(X, α) ∈ D`, which makes `ω = σ ⊕ τ` on
//! `ℍ^γ ⊕ P♯(T*M)`.

use crate::action::{PreMomentumMap, TorusAction};
use crate::error::{Error, Result};
use crate::foliation::{require_horizontal, Connection};
use crate::geom::{check_chart, CoordMap, DiffForm, Tensor, VectorField};
use crate::poisson::PoissonBivector;
use crate::symcalc::{Chart, Scalar};
use crate::Verdict;

/// A section `(X, α)` of `TM ⊕ T*M`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Section {
    pub x: VectorField,
    pub alpha: DiffForm,
}

impl Section {
    pub fn new(x: VectorField, alpha: DiffForm) -> Result<Section> {
        check_chart(x.chart(), alpha.chart())?;
        if alpha.degree() != 1 {
            return Err(Error::DegreeMismatch {
                expected: 1,
                found: alpha.degree(),
            });
        }
        Ok(Section { x, alpha })
    }

    pub fn zero(chart: &Chart) -> Section {
        Section {
            x: VectorField::zero(chart),
            alpha: DiffForm::zero(chart, 1),
        }
    }

    pub fn chart(&self) -> &Chart {
        self.x.chart()
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.alpha.is_zero()
    }

    pub fn scale(&self, f: &Scalar) -> Section {
        Section {
            x: self.x.scale(f),
            alpha: self.alpha.scale(f),
        }
    }

    pub fn try_add(&self, other: &Section) -> Result<Section> {
        Ok(Section {
            x: self.x.try_add(&other.x)?,
            alpha: self.alpha.try_add(&other.alpha)?,
        })
    }

    pub fn try_sub(&self, other: &Section) -> Result<Section> {
        Ok(Section {
            x: self.x.try_sub(&other.x)?,
            alpha: self.alpha.try_sub(&other.alpha)?,
        })
    }

    /// `(Φ^*X, Φ^*α)`.
    pub fn pullback(&self, map: &CoordMap) -> Result<Section> {
        Ok(Section {
            x: map.pull_vector(&self.x)?,
            alpha: map.pull_form(&self.alpha)?,
        })
    }

    /// `(X, α + i_X B)`.
    pub fn gauge(&self, b: &DiffForm) -> Result<Section> {
        if b.degree() != 2 {
            return Err(Error::DegreeMismatch {
                expected: 2,
                found: b.degree(),
            });
        }
        Ok(Section {
            x: self.x.clone(),
            alpha: self.alpha.try_add(&b.interior(&self.x)?)?,
        })
    }

    pub fn render(&self) -> String {
        format!("({}, {})", self.x.render(), self.alpha.render())
    }
}

/// `⟨(X,α),(Y,β)⟩ = β(X) + α(Y)`.
pub fn pairing(s: &Section, t: &Section) -> Result<Scalar> {
    check_chart(s.chart(), t.chart())?;
    Ok(&t.alpha.eval(std::slice::from_ref(&s.x))? + &s.alpha.eval(std::slice::from_ref(&t.x))?)
}

/// `[(X,α),(Y,β)] = ([X,Y], L_Xβ − L_Yα + ½d(α(Y) − β(X)))`.
pub fn courant_bracket(s: &Section, t: &Section) -> Result<Section> {
    check_chart(s.chart(), t.chart())?;
    let chart = s.chart();
    let skew = &s.alpha.eval(std::slice::from_ref(&t.x))? - &t.alpha.eval(std::slice::from_ref(&s.x))?;
    let half_d = DiffForm::differential(chart, &skew).scale(&Scalar::rat(1, 2));
    let alpha = t.alpha.lie(&s.x)?.try_sub(&s.alpha.lie(&t.x)?)?.try_add(&half_d)?;
    Ok(Section {
        x: s.x.bracket(&t.x),
        alpha,
    })
}

/// Which family a generator of `D^{γ,σ}` belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GeneratorKind {
    /// `e_α = (P♯α, α)` for `α` in the vertical coframe `θ^v`.
    Coframe(usize),
    /// `e_X = (X, −i_Xσ)` for `X` a horizontal lift `h_i`.
    Lift(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub kind: GeneratorKind,
    pub section: Section,
}

impl Generator {
    pub fn label(&self, chart: &Chart) -> String {
        match self.kind {
            GeneratorKind::Coframe(v) => format!("e_theta_{}", chart.coord_name(v)),
            GeneratorKind::Lift(i) => format!("e_h{}", i + 1),
        }
    }
}

/// `D^{γ,σ}` with its generator family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiracData {
    conn: Connection,
    sigma: DiffForm,
    p: PoissonBivector,
    generators: Vec<Generator>,
}

impl DiracData {
    pub fn build(conn: &Connection, sigma: &DiffForm, p: &PoissonBivector) -> Result<DiracData> {
        require_horizontal(sigma, "sigma")?;
        if sigma.degree() != 2 {
            return Err(Error::DegreeMismatch {
                expected: 2,
                found: sigma.degree(),
            });
        }
        check_chart(conn.chart(), p.chart())?;
        let chart = conn.chart();
        let mut generators = Vec::with_capacity(chart.dim());
        for (i, h) in conn.frame().iter().enumerate() {
            generators.push(Generator {
                kind: GeneratorKind::Lift(i),
                section: Section::new(h.clone(), -&sigma.interior(h)?)?,
            });
        }
        for (k, theta) in conn.vertical_coframe().iter().enumerate() {
            generators.push(Generator {
                kind: GeneratorKind::Coframe(chart.n_h() + k),
                section: Section::new(p.sharp(theta)?, theta.clone())?,
            });
        }
        Ok(DiracData {
            conn: conn.clone(),
            sigma: sigma.clone(),
            p: p.clone(),
            generators,
        })
    }

    pub fn connection(&self) -> &Connection {
        &self.conn
    }

    pub fn sigma(&self) -> &DiffForm {
        &self.sigma
    }

    pub fn poisson(&self) -> &PoissonBivector {
        &self.p
    }

    pub fn chart(&self) -> &Chart {
        self.conn.chart()
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    /// Replaces one generator; used to probe the verifiers with broken data.
    pub fn with_generator(mut self, index: usize, section: Section) -> DiracData {
        self.generators[index].section = section;
        self
    }

    /// Pairing-based membership: `⟨s, e⟩ = 0` for every generator `e`.
    pub fn contains(&self, s: &Section, what: &str) -> Result<Verdict> {
        let mut verdict = Verdict::pass();
        for g in &self.generators {
            let v = pairing(s, &g.section)?;
            verdict = verdict.and(|| Verdict::zero(format!("<{what}, {}>", g.label(self.chart())), &v));
        }
        Ok(verdict)
    }

    /// Isotropy of every generator pair plus a rank certificate: `θ^v(∂_w) = δ`,
    /// `dx_i(h_j) = δ` and the `e_X` forms annihilate `𝕍`, so the
    /// `dim M` generators are pointwise independent.
    pub fn verify_lagrangian(&self) -> Result<Verdict> {
        let chart = self.chart().clone();
        let mut verdict = Verdict::from_bool(
            self.generators.len() == chart.dim(),
            format!("{} generators for dimension {}", self.generators.len(), chart.dim()),
        );
        for (a, ga) in self.generators.iter().enumerate() {
            for gb in &self.generators[a..] {
                let v = pairing(&ga.section, &gb.section)?;
                verdict = verdict.and(|| Verdict::zero(format!("<{}, {}>", ga.label(&chart), gb.label(&chart)), &v));
            }
        }
        for g in &self.generators {
            match g.kind {
                GeneratorKind::Coframe(v) => {
                    for w in chart.vertical() {
                        let val = g.section.alpha.eval(&[VectorField::coordinate(&chart, w)])?;
                        let expected = if v == w { Scalar::one() } else { Scalar::zero() };
                        let r = &val - &expected;
                        verdict = verdict
                            .and(|| Verdict::zero(format!("{} on d_{}", g.label(&chart), chart.coord_name(w)), &r));
                    }
                }
                GeneratorKind::Lift(i) => {
                    for j in chart.horizontal() {
                        let val = g.section.x.comp(j).clone();
                        let expected = if i == j { Scalar::one() } else { Scalar::zero() };
                        let r = &val - &expected;
                        verdict = verdict.and(|| Verdict::zero(format!("dx{}({})", j + 1, g.label(&chart)), &r));
                    }
                    for w in chart.vertical() {
                        let val = g.section.alpha.component(1 << w);
                        verdict = verdict.and(|| {
                            Verdict::zero(format!("{} form on d_{}", g.label(&chart), chart.coord_name(w)), &val)
                        });
                    }
                }
            }
        }
        Ok(verdict)
    }

    /// Every Courant bracket of generators pairs to zero with every generator.
    pub fn verify_involutive(&self) -> Result<Verdict> {
        let chart = self.chart().clone();
        let mut verdict = Verdict::pass();
        for (a, ga) in self.generators.iter().enumerate() {
            for gb in &self.generators[a + 1..] {
                let br = courant_bracket(&ga.section, &gb.section)?;
                let name = format!("[{}, {}]", ga.label(&chart), gb.label(&chart));
                verdict = verdict.and(|| self.contains(&br, &name).expect("same chart"));
                if !verdict.holds() {
                    return Ok(verdict);
                }
            }
        }
        Ok(verdict)
    }

    /// The section-wise gauge transformation by a horizontal `B`, returned as
    /// `D^{γ,σ−B}`.
    pub fn gauge_transform(&self, b: &DiffForm) -> Result<DiracData> {
        require_horizontal(b, "B")?;
        let generators = self
            .generators
            .iter()
            .map(|g| {
                Ok(Generator {
                    kind: g.kind,
                    section: g.section.gauge(b)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(DiracData {
            conn: self.conn.clone(),
            sigma: self.sigma.try_sub(b)?,
            p: self.p.clone(),
            generators,
        })
    }

    /// Gauge-transformed generators for an arbitrary 2-form `B`.
    pub fn gauge_sections(&self, b: &DiffForm) -> Result<Vec<Section>> {
        self.generators.iter().map(|g| g.section.gauge(b)).collect()
    }

    /// Each generator pulled back along every flow (with symbolic angle) stays
    /// in `D`.
    pub fn pullback_invariance(&self, action: &TorusAction) -> Result<Verdict> {
        let chart = self.chart().clone();
        let mut verdict = Verdict::pass();
        for f in action.flows() {
            for g in &self.generators {
                let pulled = g.section.pullback(f.map())?;
                let name = format!("pullback of {} by {}", g.label(&chart), chart.angle_name(f.angle()));
                verdict = verdict.and(|| self.contains(&pulled, &name).expect("same chart"));
                if !verdict.holds() {
                    return Ok(verdict);
                }
            }
        }
        Ok(verdict)
    }

    /// `(ξ, μ^ξ) ∈ D` for every generator of the action.
    pub fn hamiltonian_generator_check(&self, action: &TorusAction, mu: &PreMomentumMap) -> Result<Verdict> {
        if mu.forms.len() != action.rank() {
            return Err(Error::Schema(format!(
                "pre-momentum map has {} forms for {} generators",
                mu.forms.len(),
                action.rank()
            )));
        }
        let mut verdict = Verdict::pass();
        for (j, (xi, m)) in action.generators().into_iter().zip(&mu.forms).enumerate() {
            let s = Section::new(xi, m.clone())?;
            verdict = verdict.and(|| {
                self.contains(&s, &format!("(xi{0}, mu{0})", j + 1))
                    .expect("same chart")
            });
        }
        Ok(verdict)
    }

    /// The closed-form bracket table of the generators:
    /// `[e_α,e_β] = (P♯ω, ω)` with `ω = L_{P♯α}β − i_{P♯β}dα`,
    /// `[e_X,e_α] = (P♯L_Xα, L_Xα + i_{P♯α}d i_Xσ)`,
    /// `[e_X,e_Y] = ([X,Y], −L_X i_Yσ + i_Y d i_Xσ)`. With `d^γ_{1,0}σ = 0`
    /// the last is `e_{[X,Y]_h} + e_α` for `α = −γ*dσ(X,Y)`, i.e. the form
    /// part is `−i_{[X,Y]_h}σ − γ*dσ(X,Y)`; the Graph(P) summand carries the
    /// curvature `[X,Y]_v = −P♯dσ(X,Y)`.
    pub fn bracket_table(&self) -> Result<BracketTable> {
        let chart = self.chart().clone();
        let p = &self.p;
        let sigma = &self.sigma;
        let (mut coframes, mut mixed, mut lifts, mut lifts_admissible) =
            (Verdict::pass(), Verdict::pass(), Verdict::pass(), Verdict::pass());
        for (a, ga) in self.generators.iter().enumerate() {
            for gb in &self.generators[a + 1..] {
                let br = courant_bracket(&ga.section, &gb.section)?;
                let name = format!("[{}, {}]", ga.label(&chart), gb.label(&chart));
                match (ga.kind, gb.kind) {
                    (GeneratorKind::Coframe(_), GeneratorKind::Coframe(_)) => {
                        let (alpha, beta) = (&ga.section.alpha, &gb.section.alpha);
                        let omega = beta
                            .lie(&p.sharp(alpha)?)?
                            .try_sub(&alpha.exterior_derivative().interior(&p.sharp(beta)?)?)?;
                        let expected = Section::new(p.sharp(&omega)?, omega)?;
                        coframes = coframes.and(|| section_vanishes(&name, &br, &expected));
                    }
                    (GeneratorKind::Lift(_), GeneratorKind::Coframe(_)) => {
                        let x = &ga.section.x;
                        let alpha = &gb.section.alpha;
                        let lxa = alpha.lie(x)?;
                        let form =
                            lxa.try_add(&sigma.interior(x)?.exterior_derivative().interior(&p.sharp(alpha)?)?)?;
                        let expected = Section::new(p.sharp(&lxa)?, form)?;
                        mixed = mixed.and(|| section_vanishes(&name, &br, &expected));
                    }
                    (GeneratorKind::Lift(_), GeneratorKind::Lift(_)) => {
                        let (x, y) = (&ga.section.x, &gb.section.x);
                        let xy = x.bracket(y);
                        let form = sigma
                            .interior(x)?
                            .exterior_derivative()
                            .interior(y)?
                            .try_sub(&sigma.interior(y)?.lie(x)?)?;
                        let expected = Section::new(xy.clone(), form)?;
                        lifts = lifts.and(|| section_vanishes(&name, &br, &expected));
                        let sxy = sigma.eval(&[x.clone(), y.clone()])?;
                        let vert = self.conn.vertical_component(&DiffForm::differential(&chart, &sxy))?;
                        let hor = self.conn.horizontal_part(&xy);
                        let adm = Section::new(xy.clone(), (-&sigma.interior(&hor)?).try_sub(&vert)?)?;
                        lifts_admissible = lifts_admissible.and(|| section_vanishes(&name, &br, &adm));
                    }
                    (GeneratorKind::Coframe(_), GeneratorKind::Lift(_)) => {}
                }
            }
        }
        Ok(BracketTable {
            coframes,
            mixed,
            lifts,
            lifts_admissible,
        })
    }
}

fn section_vanishes(location: &str, a: &Section, b: &Section) -> Verdict {
    let d = a.try_sub(b).expect("same chart");
    Verdict::vanishes(&format!("{location} vector part"), &d.x)
        .and(|| Verdict::vanishes(&format!("{location} form part"), &d.alpha))
}

/// Verdicts of [`DiracData::bracket_table`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BracketTable {
    pub coframes: Verdict,
    pub mixed: Verdict,
    pub lifts: Verdict,
    pub lifts_admissible: Verdict,
}

/// Result of [`verify_g_invariance`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GInvariance {
    /// Generators pulled back by every flow stay in `D`.
    pub pullback: Verdict,
    /// `L_ξ σ = 0` for every generator of the action.
    pub lie_sigma: Verdict,
}

impl GInvariance {
    pub fn routes_agree(&self) -> bool {
        self.pullback.holds() == self.lie_sigma.holds()
    }
}

pub fn verify_g_invariance(action: &TorusAction, d: &DiracData) -> Result<GInvariance> {
    let pullback = d.pullback_invariance(action)?;
    let mut lie_sigma = Verdict::pass();
    for (j, xi) in action.generators().iter().enumerate() {
        let l = d.sigma().lie(xi)?;
        lie_sigma = lie_sigma.and(|| Verdict::vanishes(&format!("L_xi{} sigma", j + 1), &l));
    }
    Ok(GInvariance { pullback, lie_sigma })
}

/// `ω̄ = ω − dQ` on the generating family `{h̄_i, P♯θ^v}` of `TS`, where
/// `ω`, `ω̄` are the presymplectic forms of `D^{γ,σ}` and `D^{γ̄,σ̄}` and
/// `h̄_i = h_i + P♯d(Q(h_i))`.
pub fn presymplectic_comparison(original: &DiracData, averaged: &DiracData, q: &DiffForm) -> Result<Verdict> {
    let chart = original.chart().clone();
    let p = original.poisson();
    let conn = original.connection();
    let dq = q.exterior_derivative();
    // Sections (U, α) ∈ D and (U, ᾱ) ∈ D̄ over each family member U.
    let mut family: Vec<(String, Section, Section)> = Vec::new();
    for (i, h) in conn.frame().iter().enumerate() {
        let qi = q.component(1 << i);
        let dqi = DiffForm::differential(&chart, &qi);
        let hbar = h + &p.sharp(&dqi)?;
        let alpha = (-&original.sigma().interior(h)?).try_add(&conn.vertical_component(&dqi)?)?;
        let alpha_bar = -&averaged.sigma().interior(&hbar)?;
        let s = Section::new(hbar.clone(), alpha)?;
        let sb = Section::new(hbar, alpha_bar)?;
        family.push((format!("bar h{}", i + 1), s, sb));
    }
    for (k, (theta, theta_bar)) in conn
        .vertical_coframe()
        .iter()
        .zip(averaged.connection().vertical_coframe())
        .enumerate()
    {
        let x = p.sharp(theta)?;
        let s = Section::new(x.clone(), theta.clone())?;
        let sb = Section::new(x, theta_bar.clone())?;
        family.push((format!("P#theta_{}", chart.coord_name(chart.n_h() + k)), s, sb));
    }
    for (name, s, sb) in &family {
        original
            .contains(s, name)?
            .context("original")
            .witness()
            .map_or(Ok(()), |w| {
                Err(Error::InvariantViolation {
                    law: "presymplectic family".into(),
                    detail: format!("{}: {}", w.location, w.render(&chart)),
                })
            })?;
        averaged.contains(sb, name)?.witness().map_or(Ok(()), |w| {
            Err(Error::InvariantViolation {
                law: "presymplectic family".into(),
                detail: format!("averaged {}: {}", w.location, w.render(&chart)),
            })
        })?;
    }
    let mut verdict = Verdict::pass();
    for (nu, su, sbu) in &family {
        for (nv, sv, _) in &family {
            let omega = -&su.alpha.eval(std::slice::from_ref(&sv.x))?;
            let omega_bar = -&sbu.alpha.eval(std::slice::from_ref(&sv.x))?;
            let dq_uv = dq.eval(&[su.x.clone(), sv.x.clone()])?;
            let r = &(&omega_bar - &omega) + &dq_uv;
            verdict = verdict.and(|| Verdict::zero(format!("bar omega - omega + dQ on ({nu}, {nv})"), &r));
        }
    }
    Ok(verdict)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::blade_of;

    fn chart() -> Chart {
        Chart::new(&["x1", "x2"], &["q", "p"], &["theta"]).unwrap()
    }

    fn s(c: &Chart, src: &str) -> Scalar {
        c.parse(src).unwrap()
    }

    fn canonical(c: &Chart) -> PoissonBivector {
        PoissonBivector::from_entries(c, &[(2, 3, Scalar::one())]).unwrap()
    }

    fn conn(c: &Chart, parts: &[[&str; 2]]) -> Connection {
        let parts: Vec<Vec<Scalar>> = parts.iter().map(|v| v.iter().map(|e| s(c, e)).collect()).collect();
        Connection::from_vertical_parts(c, &parts).unwrap()
    }

    fn sigma12(c: &Chart, e: &str) -> DiffForm {
        let mut f = DiffForm::zero(c, 2);
        f.set(blade_of(&[0, 1]), s(c, e));
        f
    }

    fn rotation(c: &Chart) -> TorusAction {
        let fwd = ["x1", "x2", "q*cos(theta) - p*sin(theta)", "q*sin(theta) + p*cos(theta)"]
            .iter()
            .map(|x| s(c, x))
            .collect();
        TorusAction::new(c, vec![(c.angle("theta").unwrap(), fwd)]).unwrap()
    }

    fn sec(c: &Chart, x: &[&str], a: &[&str]) -> Section {
        let x = VectorField::new(c, x.iter().map(|e| s(c, e)).collect()).unwrap();
        let a = DiffForm::from_covector(c, &a.iter().map(|e| s(c, e)).collect::<Vec<_>>()).unwrap();
        Section::new(x, a).unwrap()
    }

    #[test]
    fn pairing_examples() {
        let c = chart();
        let dq_only = sec(&c, &["0", "0", "0", "0"], &["0", "0", "1", "0"]);
        let dq_dir = sec(&c, &["0", "0", "1", "0"], &["0", "0", "0", "0"]);
        assert_eq!(pairing(&dq_dir, &dq_only).unwrap(), Scalar::one());
        let a = sec(&c, &["0", "0", "1", "0"], &["0", "0", "1", "0"]);
        let b = sec(&c, &["0", "0", "1", "0"], &["0", "0", "-1", "0"]);
        assert!(pairing(&a, &b).unwrap().is_zero());
        let p = canonical(&c);
        let e = |i: usize| {
            let al = DiffForm::coordinate(&c, i);
            Section::new(p.sharp(&al).unwrap(), al).unwrap()
        };
        assert!(pairing(&e(2), &e(3)).unwrap().is_zero());
    }

    #[test]
    fn courant_examples() {
        let c = chart();
        let dq = sec(&c, &["0", "0", "1", "0"], &["0", "0", "0", "0"]);
        let dp = sec(&c, &["0", "0", "0", "1"], &["0", "0", "0", "0"]);
        assert!(courant_bracket(&dq, &dp).unwrap().is_zero());
        let p = canonical(&c);
        let graph = |f: &str| {
            let f = s(&c, f);
            Section::new(p.hamiltonian_vf(&f), DiffForm::differential(&c, &f)).unwrap()
        };
        let br = courant_bracket(&graph("q^2*p"), &graph("p*x1")).unwrap();
        let fg = p.bracket(&s(&c, "q^2*p"), &s(&c, "p*x1"));
        assert_eq!(
            br,
            Section::new(p.hamiltonian_vf(&fg), DiffForm::differential(&c, &fg)).unwrap()
        );
        let flat = sec(&c, &["1", "0", "0", "0"], &["0", "0", "0", "0"]);
        let form = sec(&c, &["0", "0", "0", "0"], &["0", "0", "1", "0"]);
        assert!(courant_bracket(&flat, &form).unwrap().is_zero());
    }

    #[test]
    fn trivial_generators() {
        let c = chart();
        let p = canonical(&c);
        let d = DiracData::build(&Connection::flat(&c), &DiffForm::zero(&c, 2), &p).unwrap();
        let got: Vec<Section> = d.generators().iter().map(|g| g.section.clone()).collect();
        assert_eq!(
            got,
            vec![
                sec(&c, &["1", "0", "0", "0"], &["0", "0", "0", "0"]),
                sec(&c, &["0", "1", "0", "0"], &["0", "0", "0", "0"]),
                sec(&c, &["0", "0", "0", "1"], &["0", "0", "1", "0"]),
                sec(&c, &["0", "0", "-1", "0"], &["0", "0", "0", "1"]),
            ]
        );
        assert!(d.verify_lagrangian().unwrap().holds());
        assert!(d.verify_involutive().unwrap().holds());
        let zero_p = PoissonBivector::new(crate::geom::Multivector::zero(&c, 2)).unwrap();
        let dz = DiracData::build(&Connection::flat(&c), &DiffForm::zero(&c, 2), &zero_p).unwrap();
        assert!(dz.verify_lagrangian().unwrap().holds());
    }

    #[test]
    fn coupling_structure_on_invariant_connection() {
        let c = chart();
        let p = canonical(&c);
        let g = conn(&c, &[["-x2*p", "x2*q"], ["0", "0"]]);
        let sigma = sigma12(&c, "(q^2+p^2)/2");
        let d = DiracData::build(&g, &sigma, &p).unwrap();
        assert_eq!(
            d.generators()[0].section.alpha,
            DiffForm::coordinate(&c, 1).scale(&s(&c, "-(q^2+p^2)/2"))
        );
        assert!(d.verify_lagrangian().unwrap().holds());
        assert!(d.verify_involutive().unwrap().holds());
        let table = d.bracket_table().unwrap();
        assert!(
            table.coframes.holds() && table.mixed.holds() && table.lifts.holds() && table.lifts_admissible.holds(),
            "{table:?}"
        );
        let bad = DiracData::build(&g, &sigma12(&c, "q"), &p).unwrap();
        let v = bad.verify_involutive().unwrap();
        assert!(!v.holds());
        assert!(!v.witness().unwrap().residue.is_zero());
        let flipped = d.generators()[0].section.alpha.scale(&Scalar::int(-1));
        let broken = d
            .clone()
            .with_generator(0, Section::new(g.frame()[0].clone(), flipped).unwrap());
        assert!(!broken.verify_lagrangian().unwrap().holds());
        assert!(!d
            .contains(&sec(&c, &["0", "0", "1", "0"], &["0", "0", "0", "0"]), "d_q")
            .unwrap()
            .holds());
        let member = d.generators()[0]
            .section
            .scale(&s(&c, "q*x1"))
            .try_add(&d.generators()[3].section.scale(&s(&c, "p^2")))
            .unwrap();
        assert!(d.contains(&member, "combination").unwrap().holds());
    }

    #[test]
    fn gauge_and_invariance() {
        let c = chart();
        let p = canonical(&c);
        let a = rotation(&c);
        let mu = PreMomentumMap::exact(&c, &[s(&c, "(q^2+p^2)/2")]);
        let g = conn(&c, &[["0", "x2"], ["0", "0"]]);
        let sigma = sigma12(&c, "q");
        let d = DiracData::build(&g, &sigma, &p).unwrap();
        assert_eq!(d.gauge_transform(&DiffForm::zero(&c, 2)).unwrap(), d);
        let b = sigma12(&c, "x1");
        let gauged = d.gauge_transform(&b).unwrap();
        assert_eq!(gauged, DiracData::build(&g, &sigma12(&c, "q - x1"), &p).unwrap());

        let q = a.compute_q(&g, &p, &mu).unwrap().q;
        let bar = a.hannay_berry(&g).unwrap();
        let sbar = crate::hamcurv::averaged_sigma(&g, &sigma, &q, &p).unwrap();
        let cas = sigma12(&c, "x1");
        let dbar = DiracData::build(&bar, &sbar.try_add(&cas).unwrap(), &p).unwrap();
        let inv = verify_g_invariance(&a, &dbar).unwrap();
        assert!(inv.pullback.holds() && inv.routes_agree());
        let raw = verify_g_invariance(&a, &d).unwrap();
        assert!(!raw.pullback.holds() && raw.routes_agree());
        assert!(dbar.hamiltonian_generator_check(&a, &mu).unwrap().holds());

        let plain = DiracData::build(&bar, &sbar, &p).unwrap();
        assert!(presymplectic_comparison(&d, &plain, &q).unwrap().holds());
        // D^{γ,σ} gauged by dQ − C lands in D^{γ̄,σ̄+C}.
        let b = q.exterior_derivative().try_sub(&cas).unwrap();
        for (k, sct) in d.gauge_sections(&b).unwrap().iter().enumerate() {
            assert!(dbar.contains(sct, &format!("gauged generator {k}")).unwrap().holds());
        }
    }

    #[test]
    fn hamiltonian_generators_need_adiabatic_mu() {
        let c = chart();
        let p = canonical(&c);
        let a = rotation(&c);
        let d = DiracData::build(&Connection::flat(&c), &DiffForm::zero(&c, 2), &p).unwrap();
        let mu = PreMomentumMap::exact(&c, &[s(&c, "(q^2+p^2)/2")]);
        assert!(d.hamiltonian_generator_check(&a, &mu).unwrap().holds());
        let shifted = PreMomentumMap::exact(&c, &[s(&c, "(q^2+p^2)/2 + x1")]);
        assert!(!d.hamiltonian_generator_check(&a, &shifted).unwrap().holds());
        let none = TorusAction::trivial(&c);
        assert!(d
            .hamiltonian_generator_check(&none, &PreMomentumMap::new(vec![]).unwrap())
            .unwrap()
            .holds());
    }
}
