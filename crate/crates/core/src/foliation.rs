//! Ehresmann connections on a foliated chart.
//!
//! Leaves are the level sets of the horizontal coordinates, so the vertical
//! distribution is spanned by the vertical coordinate fields. A connection is
//! stored through its horizontal frame `h_i = ∂x_i + Σ_v H_i^v ∂_v`, which
//! determines `γ = Σ_v (dv − Σ_i H_i^v dx_i) ⊗ ∂_v`. Forms are bigraded in the
//! adapted coframe `{dx_i, θ^v = dv − Σ_i H_i^v dx_i}` dual to `{h_i, ∂_v}`;
//! bidegree `(p, q)` counts `dx` and `θ` factors.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::geom::{blade_indices, blades_of_degree, Blade, DiffForm, VecValuedForm, VectorField};
use crate::symcalc::{Chart, Scalar, Var};
use crate::Verdict;

/// Bitmask of the horizontal coordinates.
pub fn horizontal_mask(chart: &Chart) -> Blade {
    chart.horizontal().fold(0, |m, i| m | 1 << i)
}

/// True iff `alpha` only involves the `dx_i`, i.e. annihilates the leaves.
pub fn is_horizontal_form(alpha: &DiffForm) -> bool {
    let mask = horizontal_mask(alpha.chart());
    alpha.terms().all(|(b, _)| b & !mask == 0)
}

pub fn require_horizontal(alpha: &DiffForm, what: &str) -> Result<()> {
    if is_horizontal_form(alpha) {
        Ok(())
    } else {
        Err(Error::NotHorizontal(what.to_string()))
    }
}

/// Horizontal form with the given values on coordinate multi-indices of the
/// base, i.e. on the frame.
pub fn horizontal_form(chart: &Chart, degree: usize, values: &[(Blade, Scalar)]) -> DiffForm {
    let mut f = DiffForm::zero(chart, degree);
    for (b, v) in values {
        f.set(*b, v.clone());
    }
    f
}

/// `Z` is projectable iff `[Z, ∂_v]` is vertical for every vertical `v`.
pub fn is_projectable(z: &VectorField) -> Verdict {
    let chart = z.chart();
    for v in chart.vertical() {
        let br = z.bracket(&VectorField::coordinate(chart, v));
        for i in chart.horizontal() {
            if !br.comp(i).is_zero() {
                return Verdict::fail(
                    format!("[Z, d_{}] has d_{} component", chart.coord_name(v), chart.coord_name(i)),
                    br.comp(i).clone(),
                );
            }
        }
    }
    Verdict::pass()
}

/// Checks that a vector-valued 1-form is a connection: `Im γ ⊆ 𝕍`,
/// `γ(∂_v) = ∂_v` on vertical coordinates, and `γ∘γ = γ`.
pub fn verify_connection(gamma: &VecValuedForm) -> Verdict {
    let chart = gamma.chart();
    if gamma.degree() != 1 {
        return Verdict::fail("gamma degree", Scalar::int(gamma.degree() as i64));
    }
    for i in chart.horizontal() {
        if let Some((b, c)) = gamma.component(i).terms().next() {
            return Verdict::fail(
                format!(
                    "image not vertical: d_{} component on {}",
                    chart.coord_name(i),
                    gamma.component(i).blade_name(b)
                ),
                c.clone(),
            );
        }
    }
    for v in chart.vertical() {
        let dv = VectorField::coordinate(chart, v);
        let img = gamma.eval(std::slice::from_ref(&dv)).expect("degree 1");
        let diff = &img - &dv;
        let verdict = Verdict::vanishes(
            &format!("gamma(d_{}) - d_{}", chart.coord_name(v), chart.coord_name(v)),
            &diff,
        );
        if !verdict.holds() {
            return verdict;
        }
    }
    for a in 0..chart.dim() {
        let e = VectorField::coordinate(chart, a);
        let once = gamma.eval(&[e]).expect("degree 1");
        let twice = gamma.eval(std::slice::from_ref(&once)).expect("degree 1");
        let verdict = Verdict::vanishes(
            &format!("(gamma∘gamma - gamma)(d_{})", chart.coord_name(a)),
            &(&twice - &once),
        );
        if !verdict.holds() {
            return verdict;
        }
    }
    Verdict::pass()
}

/// The splitting `d = d_{1,0} + d_{0,1} + d_{2,-1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shift {
    D10,
    D01,
    D2m1,
}

impl Shift {
    fn apply(self, (p, q): (usize, usize)) -> Option<(usize, usize)> {
        match self {
            Shift::D10 => Some((p + 1, q)),
            Shift::D01 => Some((p, q + 1)),
            Shift::D2m1 => q.checked_sub(1).map(|q| (p + 2, q)),
        }
    }
}

/// Bidegree components of a form; they sum to the original.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BigradedForm {
    chart: Chart,
    degree: usize,
    parts: BTreeMap<(usize, usize), DiffForm>,
}

impl BigradedForm {
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// The `(p, q)` component, zero when absent.
    pub fn component(&self, p: usize, q: usize) -> Option<&DiffForm> {
        self.parts.get(&(p, q))
    }

    pub fn parts(&self) -> impl Iterator<Item = ((usize, usize), &DiffForm)> {
        self.parts.iter().map(|(k, v)| (*k, v))
    }

    pub fn total(&self) -> DiffForm {
        self.parts
            .values()
            .fold(DiffForm::zero(&self.chart, self.degree), |acc, f| &acc + f)
    }
}

/// Connection given by a horizontal frame.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Connection {
    chart: Chart,
    frame: Vec<VectorField>,
    gamma: VecValuedForm,
    coframe: Vec<DiffForm>,
}

impl Connection {
    /// `frame[i]` must be `∂x_i` plus a vertical field.
    pub fn from_frame(chart: &Chart, frame: Vec<VectorField>) -> Result<Connection> {
        if frame.len() != chart.n_h() {
            return Err(Error::NotComplementary(format!(
                "expected {} frame fields, found {}",
                chart.n_h(),
                frame.len()
            )));
        }
        for (i, h) in frame.iter().enumerate() {
            if h.chart() != chart {
                return Err(Error::ChartMismatch);
            }
            for j in chart.horizontal() {
                let expected = if i == j { Scalar::one() } else { Scalar::zero() };
                if h.comp(j) != &expected {
                    return Err(Error::NotComplementary(format!(
                        "frame field {} has d_{} component {}",
                        i,
                        chart.coord_name(j),
                        h.comp(j).render(chart)
                    )));
                }
            }
        }
        let mut comps = vec![DiffForm::zero(chart, 1); chart.dim()];
        let mut coframe = Vec::with_capacity(chart.n_v());
        for v in chart.vertical() {
            let mut theta = DiffForm::coordinate(chart, v);
            for (i, h) in frame.iter().enumerate() {
                theta.add_at(1 << i, &-h.comp(v));
            }
            comps[v] = theta.clone();
            coframe.push(theta);
        }
        let gamma = VecValuedForm::new(chart, 1, comps)?;
        Ok(Connection {
            chart: chart.clone(),
            frame,
            gamma,
            coframe,
        })
    }

    /// Frame from the vertical parts `H_i^v`, indexed `[i][v - n_h]`.
    pub fn from_vertical_parts(chart: &Chart, parts: &[Vec<Scalar>]) -> Result<Connection> {
        let frame = parts
            .iter()
            .enumerate()
            .map(|(i, vp)| {
                let mut h = VectorField::coordinate(chart, i);
                for (k, c) in vp.iter().enumerate() {
                    h.set_comp(chart.n_h() + k, c.clone());
                }
                h
            })
            .collect();
        Connection::from_frame(chart, frame)
    }

    /// The trivial connection `h_i = ∂x_i`.
    pub fn flat(chart: &Chart) -> Connection {
        let frame = chart.horizontal().map(|i| VectorField::coordinate(chart, i)).collect();
        Connection::from_frame(chart, frame).expect("coordinate frame is complementary")
    }

    /// Recovers the frame `h_i = ∂x_i − γ(∂x_i)` after checking `γ`.
    pub fn from_form(gamma: &VecValuedForm) -> Result<Connection> {
        let verdict = verify_connection(gamma);
        if let Some(w) = verdict.witness() {
            return Err(Error::InvariantViolation {
                law: "connection".into(),
                detail: w.render(gamma.chart()),
            });
        }
        let chart = gamma.chart();
        let frame = chart
            .horizontal()
            .map(|i| {
                let e = VectorField::coordinate(chart, i);
                &e - &gamma.eval(std::slice::from_ref(&e)).expect("degree 1")
            })
            .collect();
        Connection::from_frame(chart, frame)
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn frame(&self) -> &[VectorField] {
        &self.frame
    }

    pub fn gamma(&self) -> &VecValuedForm {
        &self.gamma
    }

    /// `θ^v` for each vertical coordinate, in order.
    pub fn vertical_coframe(&self) -> &[DiffForm] {
        &self.coframe
    }

    /// `γ(X)`.
    pub fn vertical_part(&self, x: &VectorField) -> VectorField {
        self.gamma.eval(std::slice::from_ref(x)).expect("degree 1")
    }

    /// `(id − γ)X = Σ_i dx_i(X) h_i`.
    pub fn horizontal_part(&self, x: &VectorField) -> VectorField {
        x - &self.vertical_part(x)
    }

    /// Frame field `h_i` scaled by nothing: the `(id−γ)`-image of `∂x_i`.
    pub fn lift(&self, i: usize) -> &VectorField {
        &self.frame[i]
    }

    /// Adapted frame `(h_1, …, h_{n_h}, ∂_{v_1}, …)`.
    pub fn adapted_frame(&self) -> Vec<VectorField> {
        let mut f = self.frame.clone();
        f.extend(self.chart.vertical().map(|v| VectorField::coordinate(&self.chart, v)));
        f
    }

    /// Adapted coframe `(dx_1, …, θ^{v_1}, …)`, dual to the adapted frame.
    pub fn adapted_coframe(&self) -> Vec<DiffForm> {
        let mut f: Vec<DiffForm> = self
            .chart
            .horizontal()
            .map(|i| DiffForm::coordinate(&self.chart, i))
            .collect();
        f.extend(self.coframe.iter().cloned());
        f
    }

    fn adapted_blade_parts(&self, blade: Blade) -> (Vec<VectorField>, DiffForm, (usize, usize)) {
        let frame = self.adapted_frame();
        let coframe = self.adapted_coframe();
        let mut args = Vec::new();
        let mut basis = DiffForm::function(&self.chart, Scalar::one());
        let (mut p, mut q) = (0, 0);
        for k in blade_indices(blade) {
            args.push(frame[k].clone());
            basis = basis.wedge(&coframe[k]).expect("degree within dimension");
            if self.chart.is_horizontal(k) {
                p += 1;
            } else {
                q += 1;
            }
        }
        (args, basis, (p, q))
    }

    /// Bidegree decomposition of `alpha`.
    pub fn bigrade(&self, alpha: &DiffForm) -> Result<BigradedForm> {
        if alpha.chart() != &self.chart {
            return Err(Error::ChartMismatch);
        }
        let k = alpha.degree();
        let mut parts: BTreeMap<(usize, usize), DiffForm> = BTreeMap::new();
        for blade in blades_of_degree(self.chart.dim(), k) {
            let (args, basis, bideg) = self.adapted_blade_parts(blade);
            let c = alpha.eval(&args)?;
            if c.is_zero() {
                continue;
            }
            let entry = parts.entry(bideg).or_insert_with(|| DiffForm::zero(&self.chart, k));
            *entry = &*entry + &basis.scale(&c);
        }
        Ok(BigradedForm {
            chart: self.chart.clone(),
            degree: k,
            parts,
        })
    }

    /// `α_{1,0} = (id − γ*)α` for a 1-form: the part in the `dx_i`.
    pub fn horizontal_component(&self, alpha: &DiffForm) -> Result<DiffForm> {
        if alpha.degree() != 1 {
            return Err(Error::DegreeMismatch {
                expected: 1,
                found: alpha.degree(),
            });
        }
        let mut out = DiffForm::zero(&self.chart, 1);
        for (i, h) in self.frame.iter().enumerate() {
            out.set(1 << i, alpha.eval(std::slice::from_ref(h))?);
        }
        Ok(out)
    }

    /// `γ*α = α ∘ γ`.
    pub fn vertical_component(&self, alpha: &DiffForm) -> Result<DiffForm> {
        Ok(alpha - &self.horizontal_component(alpha)?)
    }

    /// Bigraded piece `d_{a,b} α`.
    pub fn d_shift(&self, alpha: &DiffForm, shift: Shift) -> Result<DiffForm> {
        let bg = self.bigrade(alpha)?;
        let mut out = DiffForm::zero(&self.chart, alpha.degree() + 1);
        if alpha.degree() + 1 > self.chart.dim() {
            return Ok(out);
        }
        for (bideg, part) in bg.parts() {
            let Some(target) = shift.apply(bideg) else {
                continue;
            };
            let dpart = self.bigrade(&part.exterior_derivative())?;
            if let Some(piece) = dpart.component(target.0, target.1) {
                out = &out + piece;
            }
        }
        Ok(out)
    }

    /// `d^γ_{1,0}α(X₀,…,X_k) = dα((id−γ)X₀,…,(id−γ)X_k)`, a horizontal form.
    pub fn covariant_derivative(&self, alpha: &DiffForm) -> Result<DiffForm> {
        if alpha.chart() != &self.chart {
            return Err(Error::ChartMismatch);
        }
        let k = alpha.degree() + 1;
        let mut out = DiffForm::zero(&self.chart, k);
        if k > self.chart.n_h() {
            return Ok(out);
        }
        let da = alpha.exterior_derivative();
        for blade in blades_of_degree(self.chart.n_h(), k) {
            let args: Vec<VectorField> = blade_indices(blade).map(|i| self.frame[i].clone()).collect();
            out.set(blade, da.eval(&args)?);
        }
        Ok(out)
    }

    /// `Curv^γ = ½[γ, γ]_FN`.
    pub fn curvature(&self) -> Result<VecValuedForm> {
        let br = self.gamma.fn_bracket(&self.gamma)?;
        Ok(br.map(|c| c * &Scalar::rat(1, 2)))
    }

    /// `γ([h_i, h_j])`.
    pub fn curvature_on_frame(&self, i: usize, j: usize) -> VectorField {
        self.vertical_part(&self.frame[i].bracket(&self.frame[j]))
    }

    /// The two curvature routes agree on every frame pair.
    pub fn curvature_routes_agree(&self) -> Result<Verdict> {
        let curv = self.curvature()?;
        let mut verdict = Verdict::pass();
        for i in 0..self.frame.len() {
            for j in i + 1..self.frame.len() {
                let fn_route = curv.eval(&[self.frame[i].clone(), self.frame[j].clone()])?;
                let direct = self.curvature_on_frame(i, j);
                verdict = verdict.and(|| {
                    Verdict::vanishes(
                        &format!("Curv(h{},h{}) FN vs bracket", i + 1, j + 1),
                        &(&fn_route - &direct),
                    )
                });
            }
        }
        Ok(verdict)
    }

    /// `γ − Ξ` for a connection difference form `Ξ`.
    pub fn shifted(&self, xi: &VecValuedForm) -> Result<Connection> {
        check_difference_form(xi)?;
        Connection::from_form(&(&self.gamma - xi))
    }

    /// Checks the curvature transition rule for `γ̃ = γ − Ξ` on the frame:
    /// `Curv^γ̃(Z₁,Z₂) = Curv^γ(Z₁,Z₂) + [ΞZ₁,ΞZ₂] + [ΞZ₁,Z₂] − [ΞZ₂,Z₁] − Ξ[Z₁,Z₂]`.
    pub fn curvature_transition_check(&self, xi: &VecValuedForm) -> Result<Verdict> {
        let shifted = self.shifted(xi)?;
        let curv_new = shifted.curvature()?;
        let curv_old = self.curvature()?;
        let mut verdict = Verdict::pass();
        for i in 0..self.frame.len() {
            for j in i + 1..self.frame.len() {
                let (z1, z2) = (&self.frame[i], &self.frame[j]);
                let lhs = curv_new.eval(&[z1.clone(), z2.clone()])?;
                let x1 = xi.eval(std::slice::from_ref(z1))?;
                let x2 = xi.eval(std::slice::from_ref(z2))?;
                let rhs = &(&(&(&curv_old.eval(&[z1.clone(), z2.clone()])? + &x1.bracket(&x2)) + &x1.bracket(z2))
                    - &x2.bracket(z1))
                    - &xi.eval(&[z1.bracket(z2)])?;
                verdict = verdict
                    .and(|| Verdict::vanishes(&format!("transition rule on (h{},h{})", i + 1, j + 1), &(&lhs - &rhs)));
            }
        }
        Ok(verdict)
    }

    /// Horizontal form `β` evaluated on frame fields with indices `idx`.
    pub fn on_frame(&self, beta: &DiffForm, idx: &[usize]) -> Result<Scalar> {
        let args: Vec<VectorField> = idx.iter().map(|&i| self.frame[i].clone()).collect();
        beta.eval(&args)
    }
}

/// `im Ξ ⊆ 𝕍 ⊆ ker Ξ`.
pub fn check_difference_form(xi: &VecValuedForm) -> Result<()> {
    let chart = xi.chart();
    if xi.degree() != 1 {
        return Err(Error::NotVertical("difference form must have degree 1".into()));
    }
    for i in chart.horizontal() {
        if !xi.component(i).is_zero() {
            return Err(Error::NotVertical(format!(
                "difference form has a d_{} component",
                chart.coord_name(i)
            )));
        }
    }
    for (a, c) in xi.components().iter().enumerate() {
        if !is_horizontal_form(c) {
            return Err(Error::NotVertical(format!(
                "difference form does not vanish on vertical fields (d_{} component)",
                chart.coord_name(a)
            )));
        }
    }
    Ok(())
}

/// Difference form with prescribed vertical values on the frame:
/// `Ξ = Σ_i dx_i ⊗ values[i]`.
pub fn difference_form(chart: &Chart, values: &[VectorField]) -> Result<VecValuedForm> {
    let mut out = VecValuedForm::zero(chart, 1);
    for (i, v) in values.iter().enumerate() {
        if !v.is_vertical() {
            return Err(Error::NotVertical(format!("value on h{} is not vertical", i + 1)));
        }
        out = &out + &VecValuedForm::tensor(&DiffForm::coordinate(chart, i), v)?;
    }
    Ok(out)
}

/// `∂_v` of a scalar for each vertical coordinate.
pub fn vertical_gradient(chart: &Chart, f: &Scalar) -> Vec<Scalar> {
    chart.vertical().map(|v| f.partial(Var(v as u16))).collect()
}
