use std::ops::{Add, Neg, Sub};

use super::{blades_of_degree, check_chart, Blade, CoordMap, DiffForm, Tensor, VectorField};
use crate::error::{Error, Result};
use crate::symcalc::{Chart, Scalar, Var};

/// Vector-valued form `K = Σ_a K^a ⊗ ∂_a`, stored as one form per target
/// coordinate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VecValuedForm {
    chart: Chart,
    degree: usize,
    comps: Vec<DiffForm>,
}

impl VecValuedForm {
    pub fn zero(chart: &Chart, degree: usize) -> Self {
        VecValuedForm {
            chart: chart.clone(),
            degree,
            comps: vec![DiffForm::zero(chart, degree); chart.dim()],
        }
    }

    pub fn new(chart: &Chart, degree: usize, comps: Vec<DiffForm>) -> Result<Self> {
        if comps.len() != chart.dim() {
            return Err(Error::DegreeMismatch {
                expected: chart.dim(),
                found: comps.len(),
            });
        }
        for c in &comps {
            check_chart(chart, c.chart())?;
            if c.degree() != degree {
                return Err(Error::DegreeMismatch {
                    expected: degree,
                    found: c.degree(),
                });
            }
        }
        if degree > chart.dim() {
            return Err(Error::DegreeOverflow(degree, 0, chart.dim()));
        }
        Ok(VecValuedForm {
            chart: chart.clone(),
            degree,
            comps,
        })
    }

    /// A vector field as a degree-0 vector-valued form.
    pub fn from_vector(x: &VectorField) -> Self {
        let comps = x
            .comps()
            .iter()
            .map(|c| DiffForm::function(x.chart(), c.clone()))
            .collect();
        VecValuedForm {
            chart: x.chart().clone(),
            degree: 0,
            comps,
        }
    }

    /// `Σ dx^a ⊗ ∂_a`.
    pub fn identity(chart: &Chart) -> Self {
        let comps = (0..chart.dim()).map(|a| DiffForm::coordinate(chart, a)).collect();
        VecValuedForm {
            chart: chart.clone(),
            degree: 1,
            comps,
        }
    }

    /// `α ⊗ X`.
    pub fn tensor(alpha: &DiffForm, x: &VectorField) -> Result<Self> {
        check_chart(alpha.chart(), x.chart())?;
        let comps = x.comps().iter().map(|c| alpha.scale(c)).collect();
        VecValuedForm::new(alpha.chart(), alpha.degree(), comps)
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// The form `K^a`.
    pub fn component(&self, a: usize) -> &DiffForm {
        &self.comps[a]
    }

    pub fn components(&self) -> &[DiffForm] {
        &self.comps
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(DiffForm::is_zero)
    }

    pub fn to_vector(&self) -> Result<VectorField> {
        if self.degree != 0 {
            return Err(Error::DegreeMismatch {
                expected: 0,
                found: self.degree,
            });
        }
        VectorField::new(&self.chart, self.comps.iter().map(|c| c.component(0)).collect())
    }

    /// Value on the coordinate multi-index `blade`.
    pub fn on_blade(&self, blade: Blade) -> VectorField {
        let comps = self.comps.iter().map(|c| c.component(blade)).collect();
        VectorField::new(&self.chart, comps).expect("component count matches chart")
    }

    /// `K(X₁, …, X_k)`.
    pub fn eval(&self, args: &[VectorField]) -> Result<VectorField> {
        let comps = self.comps.iter().map(|c| c.eval(args)).collect::<Result<Vec<_>>>()?;
        VectorField::new(&self.chart, comps)
    }

    /// `i_X K`, contracting each component form.
    pub fn interior(&self, x: &VectorField) -> Result<VecValuedForm> {
        let comps = self.comps.iter().map(|c| c.interior(x)).collect::<Result<Vec<_>>>()?;
        VecValuedForm::new(&self.chart, self.degree - 1, comps)
    }

    pub fn map(&self, mut f: impl FnMut(&Scalar) -> Scalar) -> Self {
        VecValuedForm {
            chart: self.chart.clone(),
            degree: self.degree,
            comps: self.comps.iter().map(|c| c.map(&mut f)).collect(),
        }
    }

    /// `(ω ∧ K)^a = ω ∧ K^a`.
    pub fn wedge_left(&self, omega: &DiffForm) -> Result<VecValuedForm> {
        let comps = self.comps.iter().map(|c| omega.wedge(c)).collect::<Result<Vec<_>>>()?;
        VecValuedForm::new(&self.chart, self.degree + omega.degree(), comps)
    }

    /// Frölicher–Nijenhuis bracket in coordinates:
    ///
    /// `[K, L] = K^a∧∂_aL^b⊗∂_b − ∂_bK^a∧L^b⊗∂_a
    ///   + (−1)^k (dK^a∧i_{∂_a}L^b⊗∂_b + i_{∂_b}K^a∧dL^b⊗∂_a)`.
    ///
    /// Implemented for a degree-0 operand or total degree ≤ 3.
    #[allow(clippy::needless_range_loop)] // indices mirror the component formula
    pub fn fn_bracket(&self, other: &VecValuedForm) -> Result<VecValuedForm> {
        check_chart(&self.chart, &other.chart)?;
        let (k, l) = (self.degree, other.degree);
        if !(k == 0 || l == 0 || k + l <= 3) {
            return Err(Error::UnsupportedDegree(k, l));
        }
        let n = self.chart.dim();
        let degree = k + l;
        let mut out = VecValuedForm::zero(&self.chart, degree);
        if degree > n {
            return Ok(out);
        }
        let sign = if k % 2 == 0 { Scalar::one() } else { Scalar::int(-1) };
        let dk: Vec<DiffForm> = self.comps.iter().map(DiffForm::exterior_derivative).collect();
        let dl: Vec<DiffForm> = other.comps.iter().map(DiffForm::exterior_derivative).collect();
        for a in 0..n {
            let ka = &self.comps[a];
            if ka.is_zero() {
                continue;
            }
            let da = VectorField::coordinate(&self.chart, a);
            for b in 0..n {
                let lb = &other.comps[b];
                if lb.is_zero() {
                    continue;
                }
                let db = VectorField::coordinate(&self.chart, b);
                let t = wedge_or_zero(ka, &partial_form(lb, a), degree);
                out.comps[b] = &out.comps[b] + &t;
                let t = wedge_or_zero(&partial_form(ka, b), lb, degree);
                out.comps[a] = &out.comps[a] - &t;
                if l > 0 {
                    let t = wedge_or_zero(&dk[a], &lb.interior(&da)?, degree);
                    out.comps[b] = &out.comps[b] + &t.scale(&sign);
                }
                if k > 0 {
                    let t = wedge_or_zero(&ka.interior(&db)?, &dl[b], degree);
                    out.comps[a] = &out.comps[a] + &t.scale(&sign);
                }
            }
        }
        Ok(out)
    }

    /// `(L_X K)^b = L_X K^b − Σ_a K^a ∂_a X^b`.
    pub fn lie(&self, x: &VectorField) -> Result<VecValuedForm> {
        check_chart(&self.chart, x.chart())?;
        let n = self.chart.dim();
        let mut comps = self.comps.iter().map(|c| c.lie(x)).collect::<Result<Vec<_>>>()?;
        for (b, comp) in comps.iter_mut().enumerate() {
            for a in 0..n {
                let dxb = x.comp(b).partial(Var(a as u16));
                if !dxb.is_zero() {
                    *comp = &*comp - &self.comps[a].scale(&dxb);
                }
            }
        }
        VecValuedForm::new(&self.chart, self.degree, comps)
    }

    pub fn try_add(&self, other: &VecValuedForm) -> Result<VecValuedForm> {
        check_chart(&self.chart, &other.chart)?;
        let comps = self
            .comps
            .iter()
            .zip(&other.comps)
            .map(|(a, b)| a.try_add(b))
            .collect::<Result<Vec<_>>>()?;
        VecValuedForm::new(&self.chart, self.degree, comps)
    }

    pub fn render(&self) -> String {
        let parts: Vec<String> = self
            .comps
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(a, c)| format!("[{}] (x) d_{}", c.render(), self.chart.coord_name(a)))
            .collect();
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}

/// Componentwise `∂_a` of a form, i.e. `L_{∂_a}`.
fn partial_form(f: &DiffForm, a: usize) -> DiffForm {
    f.map(|c| c.partial(Var(a as u16)))
}

fn wedge_or_zero(a: &DiffForm, b: &DiffForm, degree: usize) -> DiffForm {
    a.wedge(b).unwrap_or_else(|_| DiffForm::zero(a.chart(), degree))
}

impl Add<&VecValuedForm> for &VecValuedForm {
    type Output = VecValuedForm;
    /// Panics on chart or degree mismatch.
    fn add(self, rhs: &VecValuedForm) -> VecValuedForm {
        self.try_add(rhs).expect("vector-valued form operands must agree")
    }
}

impl Sub<&VecValuedForm> for &VecValuedForm {
    type Output = VecValuedForm;
    fn sub(self, rhs: &VecValuedForm) -> VecValuedForm {
        self + &-rhs
    }
}

impl Neg for &VecValuedForm {
    type Output = VecValuedForm;
    fn neg(self) -> VecValuedForm {
        self.map(|c| -c)
    }
}

impl Tensor for VecValuedForm {
    fn chart(&self) -> &Chart {
        &self.chart
    }

    fn map_coefficients(&self, f: &mut dyn FnMut(&Scalar) -> Scalar) -> Self {
        self.map(f)
    }

    fn coefficients(&self) -> Vec<(String, Scalar)> {
        let mut out = Vec::new();
        for (a, c) in self.comps.iter().enumerate() {
            for blade in blades_of_degree(self.chart.dim(), self.degree) {
                let v = c.component(blade);
                if !v.is_zero() {
                    out.push((format!("{} (x) d_{}", c.blade_name(blade), self.chart.coord_name(a)), v));
                }
            }
        }
        out
    }

    fn pullback(&self, map: &CoordMap) -> Result<Self> {
        map.pull_vv_form(self)
    }

    fn lie_derivative(&self, x: &VectorField) -> Result<Self> {
        self.lie(x)
    }

    fn try_add(&self, other: &Self) -> Result<Self> {
        VecValuedForm::try_add(self, other)
    }
}
