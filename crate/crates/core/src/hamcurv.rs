//! Hamiltonian curvature forms, admissibility, the de Rham–Casimir complex,
//! the averaged curvature form and the adiabatic condition.
//!
//! Horizontal forms are stored on `dx` blades; their coefficients are the
//! values on the horizontal lifts `h_I` of any connection. `d^γ_{1,0}` on
//! horizontal forms is [`Connection::covariant_derivative`].

use crate::action::{PreMomentumMap, TorusAction};
use crate::error::{Error, Result};
use crate::foliation::{require_horizontal, Connection};
use crate::geom::{blade_of, DiffForm, Tensor, VectorField};
use crate::poisson::PoissonBivector;
use crate::symcalc::Scalar;
use crate::Verdict;

fn require_degree(alpha: &DiffForm, expected: usize) -> Result<()> {
    if alpha.degree() != expected {
        return Err(Error::DegreeMismatch {
            expected,
            found: alpha.degree(),
        });
    }
    Ok(())
}

/// `σ(h_i, h_j)`.
fn on_pair(sigma: &DiffForm, i: usize, j: usize) -> Scalar {
    sigma.component(blade_of(&[i, j]))
}

/// `Curv^γ(h_i, h_j) = −P♯dσ(h_i, h_j)` on every frame pair.
pub fn verify_conn_h(conn: &Connection, sigma: &DiffForm, p: &PoissonBivector) -> Result<Verdict> {
    require_horizontal(sigma, "sigma")?;
    require_degree(sigma, 2)?;
    let n = conn.frame().len();
    let mut verdict = Verdict::pass();
    for i in 0..n {
        for j in i + 1..n {
            let residue = &conn.curvature_on_frame(i, j) + &p.hamiltonian_vf(&on_pair(sigma, i, j));
            verdict = verdict.and(|| Verdict::vanishes(&format!("Curv(h{},h{}) + P#d sigma", i + 1, j + 1), &residue));
        }
    }
    Ok(verdict)
}

/// `σ′ − σ` is a Casimir-valued horizontal 2-form.
pub fn sigma_freedom_check(sigma: &DiffForm, sigma2: &DiffForm, p: &PoissonBivector) -> Result<Verdict> {
    require_horizontal(sigma, "sigma")?;
    require_horizontal(sigma2, "sigma'")?;
    Ok(p.is_casimir_form(&sigma2.try_sub(sigma)?).context("sigma' - sigma"))
}

/// `d^γ_{1,0}σ = 0`.
pub fn verify_admissible(conn: &Connection, sigma: &DiffForm) -> Result<Verdict> {
    require_horizontal(sigma, "sigma")?;
    Ok(Verdict::vanishes("d10 sigma", &conn.covariant_derivative(sigma)?))
}

/// `d^γ_{1,0}σ`, which the Bianchi identity makes Casimir-valued.
pub fn bianchi_residue(conn: &Connection, sigma: &DiffForm, p: &PoissonBivector) -> Result<DiffForm> {
    require_horizontal(sigma, "sigma")?;
    let r = conn.covariant_derivative(sigma)?;
    if let Some(w) = p.is_casimir_form(&r).witness() {
        return Err(Error::NotCasimirResidue(format!(
            "{}: {}",
            w.location,
            w.render(conn.chart())
        )));
    }
    Ok(r)
}

/// `d̄^γ = d^γ_{1,0}` restricted to Casimir-valued horizontal forms.
pub fn casimir_complex_d(conn: &Connection, beta: &DiffForm, p: &PoissonBivector) -> Result<DiffForm> {
    require_casimir_form(beta, p)?;
    conn.covariant_derivative(beta)
}

fn require_casimir_form(beta: &DiffForm, p: &PoissonBivector) -> Result<()> {
    require_horizontal(beta, "beta")?;
    if let Some(w) = p.is_casimir_form(beta).witness() {
        return Err(Error::NotCasimir(format!("{}: {}", w.location, w.render(beta.chart()))));
    }
    Ok(())
}

/// `½{Q∧Q}_P`.
pub fn half_q_wedge_q(q: &DiffForm, p: &PoissonBivector) -> Result<DiffForm> {
    Ok(p.braided_wedge(q, q)?.scale(&Scalar::rat(1, 2)))
}

/// `σ̄ = σ − (d^γ_{1,0}Q + ½{Q∧Q}_P)`.
pub fn averaged_sigma(conn: &Connection, sigma: &DiffForm, q: &DiffForm, p: &PoissonBivector) -> Result<DiffForm> {
    require_horizontal(sigma, "sigma")?;
    require_horizontal(q, "Q")?;
    let correction = conn.covariant_derivative(q)?.try_add(&half_q_wedge_q(q, p)?)?;
    sigma.try_sub(&correction)
}

/// The connection with lifts `h_i + P♯d(Q(h_i))`, which is `⟨γ⟩` whenever
/// `Ξ^G = P♯dQ`.
pub fn shifted_by_q(conn: &Connection, q: &DiffForm, p: &PoissonBivector) -> Result<Connection> {
    require_horizontal(q, "Q")?;
    require_degree(q, 1)?;
    let frame = conn
        .frame()
        .iter()
        .enumerate()
        .map(|(i, h)| h + &p.hamiltonian_vf(&q.component(1 << i)))
        .collect();
    Connection::from_frame(conn.chart(), frame)
}

/// `Curv^{γ̄}(h_i,h_j) = Curv^γ(h_i,h_j) + P♯d(d^γ_{1,0}Q + ½{Q∧Q}_P)(h_i,h_j)`
/// with the left side from the Frölicher–Nijenhuis curvature of `averaged`.
pub fn cv2_check(conn: &Connection, averaged: &Connection, q: &DiffForm, p: &PoissonBivector) -> Result<Verdict> {
    let correction = conn.covariant_derivative(q)?.try_add(&half_q_wedge_q(q, p)?)?;
    let curv_bar = averaged.curvature()?;
    let n = conn.frame().len();
    let mut verdict = Verdict::pass();
    for i in 0..n {
        for j in i + 1..n {
            let lhs = curv_bar.eval(&[conn.frame()[i].clone(), conn.frame()[j].clone()])?;
            let rhs = &conn.curvature_on_frame(i, j) + &p.hamiltonian_vf(&on_pair(&correction, i, j));
            verdict = verdict.and(|| {
                Verdict::vanishes(
                    &format!("averaged curvature on (h{},h{})", i + 1, j + 1),
                    &(&lhs - &rhs),
                )
            });
        }
    }
    Ok(verdict)
}

/// The three identities used to show that averaging preserves admissibility.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AveragingIdentities {
    /// `d^{γ̄}_{1,0}σ = d^γ_{1,0}σ + {Q∧σ}_P`.
    pub shifted_derivative: Verdict,
    /// `(d^γ_{1,0})²Q = {Q∧σ}_P`.
    pub square: Verdict,
    /// `d^γ_{1,0}(½{Q∧Q}_P) = −{Q∧d^γ_{1,0}Q}_P`.
    pub quadratic: Verdict,
}

impl AveragingIdentities {
    pub fn all(&self) -> bool {
        self.shifted_derivative.holds() && self.square.holds() && self.quadratic.holds()
    }
}

/// Evaluates [`AveragingIdentities`] with `γ̄` built from `Q`.
pub fn averaging_identities(
    conn: &Connection,
    sigma: &DiffForm,
    q: &DiffForm,
    p: &PoissonBivector,
) -> Result<AveragingIdentities> {
    let bar = shifted_by_q(conn, q, p)?;
    let q_sigma = p.braided_wedge(q, sigma)?;
    let lhs1 = bar.covariant_derivative(sigma)?;
    let rhs1 = conn.covariant_derivative(sigma)?.try_add(&q_sigma)?;
    let dq = conn.covariant_derivative(q)?;
    let lhs2 = conn.covariant_derivative(&dq)?;
    let lhs3 = conn.covariant_derivative(&half_q_wedge_q(q, p)?)?;
    let rhs3 = p.braided_wedge(q, &dq)?.scale(&Scalar::int(-1));
    Ok(AveragingIdentities {
        shifted_derivative: Verdict::equal("d10(bar) sigma - d10 sigma - {Q^sigma}", &lhs1, &rhs1)?,
        square: Verdict::equal("d10^2 Q - {Q^sigma}", &lhs2, &q_sigma)?,
        quadratic: Verdict::equal("d10 1/2{Q^Q} + {Q^d10 Q}", &lhs3, &rhs3)?,
    })
}

/// `L_ξ σ̄` is Casimir-valued for every generator.
pub fn lie_sigma_is_casimir(action: &TorusAction, sigma: &DiffForm, p: &PoissonBivector) -> Result<Verdict> {
    let mut verdict = Verdict::pass();
    for (j, xi) in action.generators().iter().enumerate() {
        let lie = sigma.lie(xi)?;
        verdict = verdict.and(|| p.is_casimir_form(&lie).context(&format!("L_xi{} sigma", j + 1)));
    }
    Ok(verdict)
}

/// `⟨(id − γ*)μ⟩` for one pre-momentum form.
pub fn adiabatic_form(action: &TorusAction, conn: &Connection, mu: &DiffForm) -> Result<DiffForm> {
    action.average_tensor(&conn.horizontal_component(mu)?)
}

/// Result of [`adiabatic_check`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdiabaticVerdict {
    /// `⟨(id − γ*)μ^ξ⟩ = 0` for every generator.
    pub adiabatic: Verdict,
    /// `(id − γ̄*)μ^ξ = ⟨(id − γ*)μ^ξ⟩` for every generator.
    pub routes_agree: Verdict,
}

pub fn adiabatic_check(action: &TorusAction, conn: &Connection, mu: &PreMomentumMap) -> Result<AdiabaticVerdict> {
    let bar = action.hannay_berry(conn)?;
    let mut adiabatic = Verdict::pass();
    let mut routes = Verdict::pass();
    for (j, m) in mu.forms.iter().enumerate() {
        let averaged = adiabatic_form(action, conn, m)?;
        let direct = bar.horizontal_component(m)?;
        adiabatic = adiabatic.and(|| Verdict::vanishes(&format!("<(id - gamma*) mu{}>", j + 1), &averaged));
        routes = routes.and(|| {
            Verdict::vanishes(
                &format!("(id - bar gamma*) mu{} - <(id - gamma*) mu{}>", j + 1, j + 1),
                &direct.try_sub(&averaged).expect("same chart"),
            )
        });
    }
    Ok(AdiabaticVerdict {
        adiabatic,
        routes_agree: routes,
    })
}

/// `μ̃^ξ = μ^ξ − dK^ξ` after verifying that each `⟨(id − γ*)μ^ξ⟩` is a
/// `d^γ_{1,0}`-cocycle and that `K^ξ` is a Casimir primitive of it.
pub fn adiabatic_fix(
    action: &TorusAction,
    conn: &Connection,
    mu: &PreMomentumMap,
    primitives: &[Scalar],
    p: &PoissonBivector,
) -> Result<PreMomentumMap> {
    if primitives.len() != mu.forms.len() {
        return Err(Error::Schema(format!(
            "{} primitives for {} pre-momentum forms",
            primitives.len(),
            mu.forms.len()
        )));
    }
    let chart = conn.chart();
    let mut forms = Vec::with_capacity(mu.forms.len());
    for (j, (m, k)) in mu.forms.iter().zip(primitives).enumerate() {
        let a = adiabatic_form(action, conn, m)?;
        let da = conn.covariant_derivative(&a)?;
        if !da.is_zero() {
            return Err(Error::NotACocycle(format!(
                "d10 <(id - gamma*) mu{}> = {}",
                j + 1,
                da.render()
            )));
        }
        if let Some(w) = p.is_casimir(k).witness() {
            return Err(Error::NotCasimir(format!("K{}: {}", j + 1, w.render(chart))));
        }
        let dk = conn.covariant_derivative(&DiffForm::function(chart, k.clone()))?;
        let diff = dk.try_sub(&a)?;
        if !diff.is_zero() {
            return Err(Error::PrimitiveMismatch(format!(
                "d10 K{} - <(id - gamma*) mu{}> = {}",
                j + 1,
                j + 1,
                diff.render()
            )));
        }
        forms.push(m.try_sub(&DiffForm::differential(chart, k))?);
    }
    PreMomentumMap::new(forms)
}

/// Conditions characterising the Hannay–Berry connection axiomatically,
/// evaluated on the projectable fields `∂x_i` (vertical fields satisfy all
/// of them trivially).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxiomaticVerdict {
    /// `i_{(id − γ̃)X} μ = 0`.
    pub h1: Verdict,
    /// `(γ − γ̃)(X) = P♯d(Q(X))`.
    pub h2: Verdict,
    /// `⟨Q(X)⟩` is a Casimir.
    pub h3: Verdict,
    /// `⟨i_{(id − γ)X} μ⟩ = 0`.
    pub h4: Verdict,
}

impl AxiomaticVerdict {
    pub fn h1_to_h3(&self) -> bool {
        self.h1.holds() && self.h2.holds() && self.h3.holds()
    }
}

pub fn axiomatic_verify(
    action: &TorusAction,
    gamma: &Connection,
    gamma_t: &Connection,
    q: &DiffForm,
    mu: &PreMomentumMap,
    p: &PoissonBivector,
) -> Result<AxiomaticVerdict> {
    require_horizontal(q, "Q")?;
    let chart = gamma.chart();
    let (mut h1, mut h2, mut h3, mut h4) = (Verdict::pass(), Verdict::pass(), Verdict::pass(), Verdict::pass());
    for i in chart.horizontal() {
        let x = VectorField::coordinate(chart, i);
        let name = chart.coord_name(i);
        let lift_t = gamma_t.horizontal_part(&x);
        let lift = gamma.horizontal_part(&x);
        for (j, m) in mu.forms.iter().enumerate() {
            let v1 = m.eval(std::slice::from_ref(&lift_t))?;
            h1 = h1.and(|| Verdict::zero(format!("mu{}((id - tilde gamma) d_{name})", j + 1), &v1));
            let v4 = action.average_scalar(&m.eval(std::slice::from_ref(&lift))?);
            h4 = h4.and(|| Verdict::zero(format!("<mu{}((id - gamma) d_{name})>", j + 1), &v4));
        }
        let qi = q.component(1 << i);
        let xi = &gamma.vertical_part(&x) - &gamma_t.vertical_part(&x);
        let r2 = &xi - &p.hamiltonian_vf(&qi);
        h2 = h2.and(|| Verdict::vanishes(&format!("Xi(d_{name}) - P#dQ(d_{name})"), &r2));
        h3 = h3.and(|| {
            p.is_casimir(&action.average_scalar(&qi))
                .context(&format!("<Q(d_{name})>"))
        });
    }
    Ok(AxiomaticVerdict { h1, h2, h3, h4 })
}

/// Two candidates satisfying (H1)–(H3) must coincide. Returns a failing
/// verdict only if both satisfy the axioms and still differ.
pub fn uniqueness_check(
    action: &TorusAction,
    gamma: &Connection,
    candidates: [(&Connection, &DiffForm); 2],
    mu: &PreMomentumMap,
    p: &PoissonBivector,
) -> Result<Verdict> {
    let [(g1, q1), (g2, q2)] = candidates;
    let a1 = axiomatic_verify(action, gamma, g1, q1, mu, p)?;
    let a2 = axiomatic_verify(action, gamma, g2, q2, mu, p)?;
    if !(a1.h1_to_h3() && a2.h1_to_h3()) {
        return Ok(Verdict::pass());
    }
    Verdict::equal("tilde gamma_1 - tilde gamma_2", g1.gamma(), g2.gamma())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symcalc::Chart;

    fn chart() -> Chart {
        Chart::new(&["x1", "x2"], &["q", "p"], &["theta"]).unwrap()
    }

    fn s(c: &Chart, src: &str) -> Scalar {
        c.parse(src).unwrap()
    }

    fn canonical(c: &Chart) -> PoissonBivector {
        PoissonBivector::from_entries(c, &[(c.horizontal().len(), c.horizontal().len() + 1, Scalar::one())]).unwrap()
    }

    fn rotation(c: &Chart) -> TorusAction {
        let n = c.n_h();
        let mut fwd: Vec<Scalar> = (0..c.dim()).map(|i| c.coord_fn(i)).collect();
        fwd[n] = s(c, "q*cos(theta) - p*sin(theta)");
        fwd[n + 1] = s(c, "q*sin(theta) + p*cos(theta)");
        TorusAction::new(c, vec![(c.angle("theta").unwrap(), fwd)]).unwrap()
    }

    fn conn(c: &Chart, parts: &[[&str; 2]]) -> Connection {
        let parts: Vec<Vec<Scalar>> = parts.iter().map(|v| v.iter().map(|e| s(c, e)).collect()).collect();
        Connection::from_vertical_parts(c, &parts).unwrap()
    }

    fn two_form(c: &Chart, entries: &[(usize, usize, &str)]) -> DiffForm {
        let mut f = DiffForm::zero(c, 2);
        for (i, j, e) in entries {
            f.set(blade_of(&[*i, *j]), s(c, e));
        }
        f
    }

    fn mu_j(c: &Chart) -> PreMomentumMap {
        PreMomentumMap::exact(c, &[s(c, "(q^2+p^2)/2")])
    }

    #[test]
    fn conn_h_examples() {
        let c = chart();
        let p = canonical(&c);
        let hb4d = conn(&c, &[["0", "x2"], ["0", "0"]]);
        assert!(verify_conn_h(&hb4d, &two_form(&c, &[(0, 1, "q")]), &p).unwrap().holds());
        let wrong = verify_conn_h(&hb4d, &two_form(&c, &[(0, 1, "p")]), &p).unwrap();
        assert!(!wrong.holds());
        assert!(!wrong.witness().unwrap().residue.is_zero());
        let inv = conn(&c, &[["-x2*p", "x2*q"], ["0", "0"]]);
        assert!(verify_conn_h(&inv, &two_form(&c, &[(0, 1, "(q^2+p^2)/2")]), &p)
            .unwrap()
            .holds());
        assert!(verify_conn_h(&Connection::flat(&c), &DiffForm::zero(&c, 2), &p)
            .unwrap()
            .holds());
        assert!(matches!(
            verify_conn_h(
                &hb4d,
                &DiffForm::coordinate(&c, 2).wedge(&DiffForm::coordinate(&c, 0)).unwrap(),
                &p
            ),
            Err(Error::NotHorizontal(_))
        ));
    }

    #[test]
    fn sigma_freedom() {
        let c = chart();
        let p = canonical(&c);
        let sigma = two_form(&c, &[(0, 1, "q")]);
        assert!(sigma_freedom_check(&sigma, &sigma, &p).unwrap().holds());
        assert!(sigma_freedom_check(&sigma, &two_form(&c, &[(0, 1, "q + x1")]), &p)
            .unwrap()
            .holds());
        assert!(!sigma_freedom_check(&sigma, &two_form(&c, &[(0, 1, "2*q")]), &p)
            .unwrap()
            .holds());
    }

    #[test]
    fn casimir_complex_on_three_base() {
        let c = Chart::new(&["x1", "x2", "x3"], &["q", "p"], &[] as &[&str]).unwrap();
        let p = canonical(&c);
        let flat = Connection::flat(&c);
        let d_x1 = casimir_complex_d(&flat, &DiffForm::function(&c, s(&c, "x1")), &p).unwrap();
        assert_eq!(d_x1, DiffForm::coordinate(&c, 0));
        assert!(casimir_complex_d(&flat, &DiffForm::coordinate(&c, 0), &p)
            .unwrap()
            .is_zero());
        let x2dx1 = DiffForm::coordinate(&c, 0).scale(&s(&c, "x2"));
        assert_eq!(
            casimir_complex_d(&flat, &x2dx1, &p).unwrap(),
            two_form(&c, &[(0, 1, "-1")])
        );
        assert!(matches!(
            casimir_complex_d(&flat, &DiffForm::coordinate(&c, 0).scale(&s(&c, "q")), &p),
            Err(Error::NotCasimir(_))
        ));
        // d10 of a Casimir 1-form under a Poisson connection squares to zero.
        let g = Connection::from_vertical_parts(
            &c,
            &[
                vec![Scalar::zero(), s(&c, "x2")],
                vec![Scalar::zero(), Scalar::zero()],
                vec![s(&c, "-x1"), Scalar::zero()],
            ],
        )
        .unwrap();
        let beta = DiffForm::from_covector(
            &c,
            &[
                s(&c, "x2*x3"),
                s(&c, "x1^2"),
                s(&c, "x1*x2*x3"),
                Scalar::zero(),
                Scalar::zero(),
            ],
        )
        .unwrap();
        let once = casimir_complex_d(&g, &beta, &p).unwrap();
        assert!(casimir_complex_d(&g, &once, &p).unwrap().is_zero());
        assert!(verify_admissible(&flat, &two_form(&c, &[(0, 1, "q")])).unwrap().holds());
        assert!(bianchi_residue(&flat, &DiffForm::zero(&c, 2), &p).unwrap().is_zero());
        let r = bianchi_residue(&flat, &two_form(&c, &[(0, 1, "x3")]), &p).unwrap();
        assert!(!r.is_zero());
    }

    #[test]
    fn averaged_sigma_of_hb4d() {
        let c = chart();
        let p = canonical(&c);
        let a = rotation(&c);
        let g = conn(&c, &[["0", "x2"], ["0", "0"]]);
        let sigma = two_form(&c, &[(0, 1, "q")]);
        let q = a.compute_q(&g, &p, &mu_j(&c)).unwrap().q;
        let bar = a.hannay_berry(&g).unwrap();
        assert_eq!(shifted_by_q(&g, &q, &p).unwrap(), bar);
        let sb = averaged_sigma(&g, &sigma, &q, &p).unwrap();
        assert!(sb.is_zero());
        assert!(verify_conn_h(&bar, &sb, &p).unwrap().holds());
        assert!(cv2_check(&g, &bar, &q, &p).unwrap().holds());
        assert!(averaging_identities(&g, &sigma, &q, &p).unwrap().all());
        assert!(lie_sigma_is_casimir(&a, &sb, &p).unwrap().holds());
    }

    #[test]
    fn identities_on_three_base() {
        let c = Chart::new(&["x1", "x2", "x3"], &["q", "p"], &["theta"]).unwrap();
        let p = canonical(&c);
        let a = rotation(&c);
        // h_i = d_xi + X_(A_i) with A = (x2 q + x3 q p, x1 p, x2 (q^2+p^2)/2).
        let pots = ["x2*q + x3*q*p", "x1*p", "x2*(q^2+p^2)/2"];
        let frame: Vec<VectorField> = (0..3)
            .map(|i| &VectorField::coordinate(&c, i) + &p.hamiltonian_vf(&s(&c, pots[i])))
            .collect();
        let g = Connection::from_frame(&c, frame).unwrap();
        let mut sigma = DiffForm::zero(&c, 2);
        for i in 0..3 {
            for j in i + 1..3 {
                let f = &(&s(&c, pots[j]).partial(crate::symcalc::Var(i as u16))
                    - &s(&c, pots[i]).partial(crate::symcalc::Var(j as u16)))
                    + &p.bracket(&s(&c, pots[i]), &s(&c, pots[j]));
                sigma.set(blade_of(&[i, j]), -f);
            }
        }
        assert!(verify_conn_h(&g, &sigma, &p).unwrap().holds());
        assert!(verify_admissible(&g, &sigma).unwrap().holds());
        let q = a.compute_q(&g, &p, &mu_j(&c)).unwrap().q;
        let ids = averaging_identities(&g, &sigma, &q, &p).unwrap();
        assert!(ids.all(), "{ids:?}");
        let bar = a.hannay_berry(&g).unwrap();
        let sb = averaged_sigma(&g, &sigma, &q, &p).unwrap();
        assert!(verify_conn_h(&bar, &sb, &p).unwrap().holds());
        assert!(verify_admissible(&bar, &sb).unwrap().holds());
        assert!(cv2_check(&g, &bar, &q, &p).unwrap().holds());
    }

    #[test]
    fn adiabatic_examples() {
        let c = chart();
        let p = canonical(&c);
        let a = rotation(&c);
        let mu = mu_j(&c);
        for g in [
            Connection::flat(&c),
            conn(&c, &[["0", "x2"], ["0", "0"]]),
            conn(&c, &[["-x2*p", "x2*q"], ["0", "0"]]),
        ] {
            let v = adiabatic_check(&a, &g, &mu).unwrap();
            assert!(v.adiabatic.holds() && v.routes_agree.holds());
        }
        let flat = Connection::flat(&c);
        let shifted = PreMomentumMap::exact(&c, &[s(&c, "(q^2+p^2)/2 + x1")]);
        let v = adiabatic_check(&a, &flat, &shifted).unwrap();
        assert!(!v.adiabatic.holds());
        assert!(v.routes_agree.holds());
        let fixed = adiabatic_fix(&a, &flat, &shifted, &[s(&c, "x1")], &p).unwrap();
        assert_eq!(fixed, mu);
        assert!(fixed.verify(&a, &p).unwrap().holds());
        assert!(adiabatic_check(&a, &flat, &fixed).unwrap().adiabatic.holds());
        assert_eq!(adiabatic_fix(&a, &flat, &mu, &[Scalar::zero()], &p).unwrap(), mu);
        assert!(matches!(
            adiabatic_fix(&a, &flat, &shifted, &[s(&c, "x2")], &p),
            Err(Error::PrimitiveMismatch(_))
        ));
        assert!(matches!(
            adiabatic_fix(&a, &flat, &shifted, &[s(&c, "x1 + q")], &p),
            Err(Error::NotCasimir(_))
        ));
        let non_cocycle = PreMomentumMap::new(vec![
            &DiffForm::differential(&c, &s(&c, "(q^2+p^2)/2")) + &DiffForm::coordinate(&c, 0).scale(&s(&c, "x2")),
        ])
        .unwrap();
        assert!(matches!(
            adiabatic_fix(&a, &flat, &non_cocycle, &[Scalar::zero()], &p),
            Err(Error::NotACocycle(_))
        ));
    }

    #[test]
    fn axioms_and_uniqueness() {
        let c = chart();
        let p = canonical(&c);
        let a = rotation(&c);
        let mu = mu_j(&c);
        let g = conn(&c, &[["0", "x2"], ["0", "0"]]);
        let q = a.compute_q(&g, &p, &mu).unwrap().q;
        let bar = a.hannay_berry(&g).unwrap();
        let ax = axiomatic_verify(&a, &g, &bar, &q, &mu, &p).unwrap();
        assert!(ax.h1_to_h3() && ax.h4.holds());
        let self_pair = axiomatic_verify(&a, &g, &g, &DiffForm::zero(&c, 1), &mu, &p).unwrap();
        assert!(self_pair.h2.holds());
        assert!(!self_pair.h1.holds());
        let flat = Connection::flat(&c);
        let triv = axiomatic_verify(
            &a,
            &flat,
            &flat,
            &DiffForm::coordinate(&c, 0).scale(&s(&c, "x2")),
            &mu,
            &p,
        )
        .unwrap();
        assert!(triv.h1_to_h3() && triv.h4.holds());
        // A Casimir shift of Q leaves the connection unchanged.
        let q2 = &q + &DiffForm::coordinate(&c, 1).scale(&s(&c, "x1"));
        let bar2 = shifted_by_q(&g, &q2, &p).unwrap();
        assert!(uniqueness_check(&a, &g, [(&bar, &q), (&bar2, &q2)], &mu, &p)
            .unwrap()
            .holds());
        // An invariant non-Casimir shift breaks (H3).
        let q3 = &q + &DiffForm::coordinate(&c, 0).scale(&s(&c, "x2*(q^2+p^2)"));
        let bar3 = shifted_by_q(&g, &q3, &p).unwrap();
        let ax3 = axiomatic_verify(&a, &g, &bar3, &q3, &mu, &p).unwrap();
        assert!(ax3.h1.holds() && ax3.h2.holds() && !ax3.h3.holds());
    }
}
