//! Vertical Poisson bivectors.
//!
//! Convention: `β(P♯α) = P(α, β)`, `{f, g} = P(df, dg)`, `X_f = P♯df`.
//! With `P = ∂q∧∂p` this gives `P♯dq = ∂p` and `X_J = −p∂q + q∂p` for
//! `J = (q² + p²)/2`, the generator of the standard rotation.

use crate::error::{Error, Result};
use crate::foliation::{require_horizontal, Connection};
use crate::geom::{blade_indices, blades_of_degree, DiffForm, Multivector, Tensor, VectorField};
use crate::symcalc::{Chart, Scalar};
use crate::Verdict;

/// Orientation of the musical map. `Flipped` negates `P♯` while keeping
/// `{f, g} = P(df, dg)`; it exists so tests can show that the verified
/// identities are sensitive to the convention.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SharpConvention {
    #[default]
    Standard,
    Flipped,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PoissonBivector {
    p: Multivector,
    convention: SharpConvention,
}

impl PoissonBivector {
    /// Rejects bivectors with a horizontal leg. Jacobi is checked separately
    /// by [`PoissonBivector::verify_jacobi`].
    pub fn new(p: Multivector) -> Result<Self> {
        if p.degree() != 2 {
            return Err(Error::NotVerticalBivector(format!("degree {}", p.degree())));
        }
        let chart = p.chart();
        for (b, _) in p.terms() {
            if blade_indices(b).any(|i| chart.is_horizontal(i)) {
                return Err(Error::NotVerticalBivector(p.blade_name(b)));
            }
        }
        Ok(PoissonBivector {
            p,
            convention: SharpConvention::Standard,
        })
    }

    /// `Σ c ∂_i ∧ ∂_j` from `(i, j, c)` triples.
    pub fn from_entries(chart: &Chart, entries: &[(usize, usize, Scalar)]) -> Result<Self> {
        let terms: Vec<([usize; 2], Scalar)> = entries.iter().map(|(i, j, c)| ([*i, *j], c.clone())).collect();
        let refs: Vec<(&[usize], Scalar)> = terms.iter().map(|(ij, c)| (&ij[..], c.clone())).collect();
        PoissonBivector::new(Multivector::from_terms(chart, 2, &refs)?)
    }

    pub fn with_convention(mut self, convention: SharpConvention) -> Self {
        self.convention = convention;
        self
    }

    pub fn convention(&self) -> SharpConvention {
        self.convention
    }

    pub fn bivector(&self) -> &Multivector {
        &self.p
    }

    pub fn chart(&self) -> &Chart {
        self.p.chart()
    }

    /// `[P, P]_SCH = 0`.
    pub fn verify_jacobi(&self) -> Verdict {
        match self.p.schouten(&self.p) {
            Ok(pp) => Verdict::vanishes("[P,P]", &pp),
            Err(e) => Verdict::fail(format!("[P,P]: {e}"), Scalar::one()),
        }
    }

    /// `P♯α`, with `β(P♯α) = P(α, β)` under the standard convention.
    pub fn sharp(&self, alpha: &DiffForm) -> Result<VectorField> {
        let v = self.p.contract(alpha)?.to_vector()?;
        Ok(match self.convention {
            SharpConvention::Standard => v,
            SharpConvention::Flipped => -&v,
        })
    }

    /// `X_f = P♯df`.
    pub fn hamiltonian_vf(&self, f: &Scalar) -> VectorField {
        self.sharp(&DiffForm::differential(self.chart(), f))
            .expect("exact 1-form on the bivector chart")
    }

    /// `{f, g} = P(df, dg)`.
    pub fn bracket(&self, f: &Scalar, g: &Scalar) -> Scalar {
        let c = self.chart();
        self.p
            .eval_bivector(&DiffForm::differential(c, f), &DiffForm::differential(c, g))
            .expect("bivector evaluation")
    }

    /// `P♯df = 0`.
    pub fn is_casimir(&self, f: &Scalar) -> Verdict {
        Verdict::vanishes("P#df", &self.hamiltonian_vf(f))
    }

    /// Every coefficient of a form is a Casimir.
    pub fn is_casimir_form(&self, beta: &DiffForm) -> Verdict {
        for (b, c) in beta.terms() {
            let v = self
                .is_casimir(c)
                .context(&format!("coefficient of {}", beta.blade_name(b)));
            if !v.holds() {
                return v;
            }
        }
        Verdict::pass()
    }

    /// `L_{h_i} P = 0` for every frame field; enough since projectable
    /// horizontal fields are basic-function combinations of the frame.
    pub fn verify_poisson_connection(&self, conn: &Connection) -> Result<Verdict> {
        let mut verdict = Verdict::pass();
        for (i, h) in conn.frame().iter().enumerate() {
            let lie = self.p.lie_derivative(h)?;
            verdict = verdict.and(|| Verdict::vanishes(&format!("L_h{} P", i + 1), &lie));
        }
        Ok(verdict)
    }

    /// `L_X P`.
    pub fn lie_along(&self, x: &VectorField) -> Result<Multivector> {
        self.p.lie_derivative(x)
    }

    /// `{Q∧β}_P(Z₀,…,Z_q) = Σ_i (−1)^i {Q(Z_i), β(Z₀,…,Ẑ_i,…,Z_q)}` for
    /// horizontal `Q` (degree 1) and `β`; the result is horizontal.
    pub fn braided_wedge(&self, q_form: &DiffForm, beta: &DiffForm) -> Result<DiffForm> {
        require_horizontal(q_form, "Q")?;
        require_horizontal(beta, "beta")?;
        if q_form.degree() != 1 {
            return Err(Error::DegreeMismatch {
                expected: 1,
                found: q_form.degree(),
            });
        }
        let chart = self.chart();
        let k = beta.degree() + 1;
        let mut out = DiffForm::zero(chart, k);
        if k > chart.n_h() {
            return Ok(out);
        }
        for blade in blades_of_degree(chart.n_h(), k) {
            let mut value = Scalar::zero();
            for (pos, i) in blade_indices(blade).enumerate() {
                let qi = q_form.component(1 << i);
                let rest = beta.component(blade & !(1 << i));
                let term = self.bracket(&qi, &rest);
                if pos % 2 == 0 {
                    value += &term;
                } else {
                    value -= &term;
                }
            }
            out.set(blade, value);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chart() -> Chart {
        Chart::new(&["x1", "x2"], &["q", "p"], &[] as &[&str]).unwrap()
    }

    fn canonical(c: &Chart) -> PoissonBivector {
        PoissonBivector::from_entries(c, &[(2, 3, Scalar::one())]).unwrap()
    }

    fn s(c: &Chart, src: &str) -> Scalar {
        c.parse(src).unwrap()
    }

    #[test]
    fn jacobi_examples() {
        let c = chart();
        assert!(canonical(&c).verify_jacobi().holds());
        let qp = PoissonBivector::from_entries(&c, &[(2, 3, s(&c, "q"))]).unwrap();
        assert!(qp.verify_jacobi().holds());
        let c4 = Chart::new(&["x"], &["q1", "p1", "q2", "p2"], &[] as &[&str]).unwrap();
        let p = PoissonBivector::from_entries(&c4, &[(1, 2, Scalar::one()), (1, 3, s(&c4, "q1"))]).unwrap();
        // {p1, {q2, q1}} = 1 is the only nonzero cyclic term for (q1, p1, q2).
        let cyc = |f: &str, g: &str, h: &str| {
            let (f, g, h) = (s(&c4, f), s(&c4, g), s(&c4, h));
            &(&p.bracket(&f, &p.bracket(&g, &h)) + &p.bracket(&g, &p.bracket(&h, &f)))
                + &p.bracket(&h, &p.bracket(&f, &g))
        };
        let brute_ok = cyc("q1", "p1", "q2").is_zero();
        assert_eq!(p.verify_jacobi().holds(), brute_ok);
        assert!(!brute_ok);
    }

    #[test]
    fn sharp_convention() {
        let c = chart();
        let p = canonical(&c);
        assert_eq!(
            p.sharp(&DiffForm::coordinate(&c, 2)).unwrap(),
            VectorField::coordinate(&c, 3)
        );
        assert_eq!(
            p.sharp(&DiffForm::coordinate(&c, 3)).unwrap(),
            -&VectorField::coordinate(&c, 2)
        );
        assert!(p.sharp(&DiffForm::coordinate(&c, 0)).unwrap().is_zero());
        let xj = p.hamiltonian_vf(&s(&c, "(q^2+p^2)/2"));
        let rot = VectorField::new(&c, vec![Scalar::zero(), Scalar::zero(), s(&c, "-p"), s(&c, "q")]).unwrap();
        assert_eq!(xj, rot);
        assert!(p.hamiltonian_vf(&s(&c, "x1")).is_zero());
        assert_eq!(p.hamiltonian_vf(&s(&c, "q")), VectorField::coordinate(&c, 3));
        let flipped = p.clone().with_convention(SharpConvention::Flipped);
        assert_eq!(flipped.hamiltonian_vf(&s(&c, "q")), -&VectorField::coordinate(&c, 3));
    }

    #[test]
    fn brackets() {
        let c = chart();
        let p = canonical(&c);
        assert_eq!(p.bracket(&s(&c, "q"), &s(&c, "p")), Scalar::one());
        // {J, q} = dq(X_J) = -p.
        let j = s(&c, "(q^2+p^2)/2");
        let q = s(&c, "q");
        assert_eq!(p.bracket(&j, &q), s(&c, "-p"));
        assert_eq!(p.bracket(&j, &q), p.hamiltonian_vf(&j).apply(&q));
        assert!(p.bracket(&s(&c, "x1"), &s(&c, "q^3*p")).is_zero());
    }

    #[test]
    fn casimirs() {
        let c = chart();
        let p = canonical(&c);
        assert!(p.is_casimir(&s(&c, "x1")).holds());
        assert!(!p.is_casimir(&s(&c, "q")).holds());
        assert!(!p.is_casimir(&s(&c, "q^2+p^2")).holds());
    }

    #[test]
    fn poisson_connections() {
        let c = chart();
        let p = canonical(&c);
        assert!(p.verify_poisson_connection(&Connection::flat(&c)).unwrap().holds());
        let frame = |v: [&str; 2]| {
            Connection::from_vertical_parts(
                &c,
                &[vec![s(&c, v[0]), s(&c, v[1])], vec![Scalar::zero(), Scalar::zero()]],
            )
            .unwrap()
        };
        assert!(p.verify_poisson_connection(&frame(["0", "x2"])).unwrap().holds());
        assert!(!p.verify_poisson_connection(&frame(["q", "0"])).unwrap().holds());
    }

    #[test]
    fn braided_wedge_examples() {
        let c = chart();
        let p = canonical(&c);
        let q1 = DiffForm::from_covector(&c, &[s(&c, "x2*q"), Scalar::zero(), Scalar::zero(), Scalar::zero()]).unwrap();
        assert!(p.braided_wedge(&q1, &q1).unwrap().is_zero());
        let q2 = DiffForm::from_covector(&c, &[s(&c, "q"), s(&c, "p"), Scalar::zero(), Scalar::zero()]).unwrap();
        assert_eq!(p.braided_wedge(&q2, &q2).unwrap().component(0b11), Scalar::int(2));
        let cas = DiffForm::zero(&c, 2);
        assert!(p.braided_wedge(&q2, &cas).unwrap().is_zero());
        assert!(matches!(
            p.braided_wedge(&DiffForm::coordinate(&c, 2), &q2),
            Err(Error::NotHorizontal(_))
        ));
    }

    #[test]
    fn rejects_horizontal_legs() {
        let c = chart();
        assert!(matches!(
            PoissonBivector::from_entries(&c, &[(0, 2, Scalar::one())]),
            Err(Error::NotVerticalBivector(_))
        ));
    }
}
