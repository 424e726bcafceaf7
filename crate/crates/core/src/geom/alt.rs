use std::collections::BTreeMap;
use std::fmt;
use std::marker::PhantomData;
use std::ops::{Add, Neg, Sub};

use super::{
    blade_degree, blade_indices, blades_of_degree, check_chart, removal_sign, wedge_sign, Blade, CoordMap, Tensor,
    VectorField,
};
use crate::error::{Error, Result};
use crate::symcalc::{Chart, Scalar, Var};

/// Distinguishes covariant (forms) from contravariant (multivectors)
/// alternating tensors; the storage and exterior algebra are shared.
pub trait AltKind: Clone + fmt::Debug + PartialEq + Eq + Send + Sync + 'static {
    fn basis_name(chart: &Chart, coord: usize) -> String;
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormKind;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiKind;

impl AltKind for FormKind {
    fn basis_name(chart: &Chart, coord: usize) -> String {
        format!("d{}", chart.coord_name(coord))
    }
}

impl AltKind for MultiKind {
    fn basis_name(chart: &Chart, coord: usize) -> String {
        format!("d_{}", chart.coord_name(coord))
    }
}

/// Alternating tensor of fixed degree, stored on increasing multi-indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alt<K: AltKind> {
    chart: Chart,
    degree: usize,
    comps: BTreeMap<Blade, Scalar>,
    _kind: PhantomData<K>,
}

pub type DiffForm = Alt<FormKind>;
pub type Multivector = Alt<MultiKind>;

impl<K: AltKind> Alt<K> {
    pub fn zero(chart: &Chart, degree: usize) -> Self {
        Alt {
            chart: chart.clone(),
            degree,
            comps: BTreeMap::new(),
            _kind: PhantomData,
        }
    }

    /// Degree-0 element.
    pub fn function(chart: &Chart, f: Scalar) -> Self {
        let mut a = Alt::zero(chart, 0);
        a.set(0, f);
        a
    }

    /// `d x_i` or `∂_i`.
    pub fn coordinate(chart: &Chart, i: usize) -> Self {
        let mut a = Alt::zero(chart, 1);
        a.set(1 << i, Scalar::one());
        a
    }

    /// Builds from `(indices, coefficient)` pairs; indices in any order,
    /// with the permutation sign applied.
    pub fn from_terms(chart: &Chart, degree: usize, terms: &[(&[usize], Scalar)]) -> Result<Self> {
        let mut a = Alt::zero(chart, degree);
        for (idx, c) in terms {
            if idx.len() != degree {
                return Err(Error::DegreeMismatch {
                    expected: degree,
                    found: idx.len(),
                });
            }
            let mut blade = 0;
            let mut sign = 1;
            for &i in *idx {
                if i >= chart.dim() {
                    return Err(Error::InvalidChart(format!("coordinate index {i} out of range")));
                }
                sign *= wedge_sign(blade, 1 << i);
                blade |= 1 << i;
            }
            if sign != 0 {
                a.add_at(blade, &(c * &Scalar::int(sign)));
            }
        }
        Ok(a)
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn component(&self, blade: Blade) -> Scalar {
        self.comps.get(&blade).cloned().unwrap_or_default()
    }

    pub fn set(&mut self, blade: Blade, value: Scalar) {
        assert_eq!(blade_degree(blade), self.degree, "blade degree");
        if value.is_zero() {
            self.comps.remove(&blade);
        } else {
            self.comps.insert(blade, value);
        }
    }

    pub(crate) fn add_at(&mut self, blade: Blade, value: &Scalar) {
        if value.is_zero() {
            return;
        }
        let slot = self.comps.entry(blade).or_default();
        *slot += value;
        if slot.is_zero() {
            self.comps.remove(&blade);
        }
    }

    /// Nonzero components.
    pub fn terms(&self) -> impl Iterator<Item = (Blade, &Scalar)> {
        self.comps.iter().map(|(b, c)| (*b, c))
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    /// Value of a degree-0 element.
    pub fn as_function(&self) -> Option<Scalar> {
        (self.degree == 0).then(|| self.component(0))
    }

    pub fn map(&self, mut f: impl FnMut(&Scalar) -> Scalar) -> Self {
        let mut out = Alt::zero(&self.chart, self.degree);
        for (b, c) in &self.comps {
            out.set(*b, f(c));
        }
        out
    }

    pub fn scale(&self, f: &Scalar) -> Self {
        self.map(|c| c * f)
    }

    pub fn wedge(&self, other: &Self) -> Result<Self> {
        check_chart(&self.chart, &other.chart)?;
        let degree = self.degree + other.degree;
        if degree > self.chart.dim() {
            return Err(Error::DegreeOverflow(self.degree, other.degree, self.chart.dim()));
        }
        let mut out = Alt::zero(&self.chart, degree);
        for (a, ca) in &self.comps {
            for (b, cb) in &other.comps {
                let s = wedge_sign(*a, *b);
                if s != 0 {
                    out.add_at(a | b, &(&(ca * cb) * &Scalar::int(s)));
                }
            }
        }
        Ok(out)
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        check_chart(&self.chart, &other.chart)?;
        if self.degree != other.degree {
            return Err(Error::DegreeMismatch {
                expected: self.degree,
                found: other.degree,
            });
        }
        let mut out = self.clone();
        for (b, c) in &other.comps {
            out.add_at(*b, c);
        }
        Ok(out)
    }

    pub fn blade_name(&self, blade: Blade) -> String {
        if blade == 0 {
            return "1".into();
        }
        blade_indices(blade)
            .map(|i| K::basis_name(&self.chart, i))
            .collect::<Vec<_>>()
            .join("^")
    }

    pub fn render(&self) -> String {
        if self.comps.is_empty() {
            return "0".into();
        }
        self.comps
            .iter()
            .map(|(b, c)| format!("({})*{}", c.render(&self.chart), self.blade_name(*b)))
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

impl<K: AltKind> Add<&Alt<K>> for &Alt<K> {
    type Output = Alt<K>;
    /// Panics on chart or degree mismatch; use `try_add` for unchecked input.
    fn add(self, rhs: &Alt<K>) -> Alt<K> {
        self.try_add(rhs).expect("Alt addition operands must agree")
    }
}

impl<K: AltKind> Sub<&Alt<K>> for &Alt<K> {
    type Output = Alt<K>;
    fn sub(self, rhs: &Alt<K>) -> Alt<K> {
        self.try_add(&-rhs).expect("Alt subtraction operands must agree")
    }
}

impl<K: AltKind> Neg for &Alt<K> {
    type Output = Alt<K>;
    fn neg(self) -> Alt<K> {
        self.map(|c| -c)
    }
}

impl DiffForm {
    /// `df`.
    pub fn differential(chart: &Chart, f: &Scalar) -> DiffForm {
        DiffForm::function(chart, f.clone()).exterior_derivative()
    }

    pub fn exterior_derivative(&self) -> DiffForm {
        let n = self.chart.dim();
        let mut out = DiffForm::zero(&self.chart, self.degree + 1);
        for (b, c) in &self.comps {
            for j in 0..n {
                let s = wedge_sign(1 << j, *b);
                if s == 0 {
                    continue;
                }
                let dc = c.partial(Var(j as u16));
                if !dc.is_zero() {
                    out.add_at(b | 1 << j, &(&dc * &Scalar::int(s)));
                }
            }
        }
        out
    }

    /// `i_X α`, contracting the first slot.
    pub fn interior(&self, x: &VectorField) -> Result<DiffForm> {
        check_chart(&self.chart, x.chart())?;
        if self.degree == 0 {
            return Err(Error::DegreeUnderflow);
        }
        let mut out = DiffForm::zero(&self.chart, self.degree - 1);
        for (b, c) in &self.comps {
            for j in blade_indices(*b) {
                let xj = x.comp(j);
                if xj.is_zero() {
                    continue;
                }
                let s = removal_sign(*b, j);
                out.add_at(b & !(1 << j), &(&(c * xj) * &Scalar::int(s)));
            }
        }
        Ok(out)
    }

    /// `α(X₁, …, X_k)`.
    pub fn eval(&self, args: &[VectorField]) -> Result<Scalar> {
        if args.len() != self.degree {
            return Err(Error::DegreeMismatch {
                expected: self.degree,
                found: args.len(),
            });
        }
        let mut cur = self.clone();
        for x in args {
            cur = cur.interior(x)?;
        }
        Ok(cur.component(0))
    }

    /// `⟨α, A⟩ = Σ_I α_I A^I`.
    pub fn pair(&self, a: &Multivector) -> Result<Scalar> {
        check_chart(&self.chart, a.chart())?;
        if self.degree != a.degree() {
            return Err(Error::DegreeMismatch {
                expected: self.degree,
                found: a.degree(),
            });
        }
        Ok(self.comps.iter().map(|(b, c)| c * &a.component(*b)).sum())
    }

    /// The 1-form with the given coordinate components.
    pub fn from_covector(chart: &Chart, comps: &[Scalar]) -> Result<DiffForm> {
        if comps.len() != chart.dim() {
            return Err(Error::DegreeMismatch {
                expected: chart.dim(),
                found: comps.len(),
            });
        }
        let mut a = DiffForm::zero(chart, 1);
        for (i, c) in comps.iter().enumerate() {
            a.set(1 << i, c.clone());
        }
        Ok(a)
    }

    /// Cartan formula `L_X = i_X d + d i_X`.
    pub fn lie(&self, x: &VectorField) -> Result<DiffForm> {
        check_chart(&self.chart, x.chart())?;
        if self.degree == 0 {
            return Ok(DiffForm::function(&self.chart, x.apply(&self.component(0))));
        }
        let d_then_i = if self.degree < self.chart.dim() {
            self.exterior_derivative().interior(x)?
        } else {
            DiffForm::zero(&self.chart, self.degree)
        };
        Ok(&d_then_i + &self.interior(x)?.exterior_derivative())
    }
}

impl Multivector {
    pub fn from_vector(x: &VectorField) -> Multivector {
        let mut a = Multivector::zero(x.chart(), 1);
        for (i, c) in x.comps().iter().enumerate() {
            a.set(1 << i, c.clone());
        }
        a
    }

    pub fn to_vector(&self) -> Result<VectorField> {
        if self.degree != 1 {
            return Err(Error::DegreeMismatch {
                expected: 1,
                found: self.degree,
            });
        }
        let comps = (0..self.chart.dim()).map(|i| self.component(1 << i)).collect();
        VectorField::new(&self.chart, comps)
    }

    /// Contraction of the first slot with a 1-form: `i_{dx_j} ∂_I = ±∂_{I∖j}`.
    pub fn contract(&self, alpha: &DiffForm) -> Result<Multivector> {
        check_chart(&self.chart, alpha.chart())?;
        if alpha.degree() != 1 {
            return Err(Error::DegreeMismatch {
                expected: 1,
                found: alpha.degree(),
            });
        }
        if self.degree == 0 {
            return Err(Error::DegreeUnderflow);
        }
        let mut out = Multivector::zero(&self.chart, self.degree - 1);
        for (b, c) in &self.comps {
            for j in blade_indices(*b) {
                let aj = alpha.component(1 << j);
                if aj.is_zero() {
                    continue;
                }
                let s = removal_sign(*b, j);
                out.add_at(b & !(1 << j), &(&(c * &aj) * &Scalar::int(s)));
            }
        }
        Ok(out)
    }

    /// Bivector evaluation `P(α, β) = Σ P^{ij} α_i β_j`.
    pub fn eval_bivector(&self, alpha: &DiffForm, beta: &DiffForm) -> Result<Scalar> {
        if self.degree != 2 {
            return Err(Error::DegreeMismatch {
                expected: 2,
                found: self.degree,
            });
        }
        let v = self.contract(alpha)?.to_vector()?;
        beta.eval(&[v])
    }

    /// Schouten–Nijenhuis bracket. Degree-0 operands are functions:
    /// `[A, f] = Σ (−1)^{p−i} X_i(f) X₁∧…X̂_i…∧X_p`, `[f, A] = (−1)^p [A, f]`.
    pub fn schouten(&self, other: &Multivector) -> Result<Multivector> {
        check_chart(&self.chart, other.chart())?;
        let (p, q) = (self.degree, other.degree);
        if p == 0 && q == 0 {
            return Ok(Multivector::zero(&self.chart, 0));
        }
        if q == 0 {
            return Ok(self.bracket_function(&other.component(0)));
        }
        if p == 0 {
            let r = other.bracket_function(&self.component(0));
            return Ok(if q % 2 == 0 { r } else { -&r });
        }
        let degree = p + q - 1;
        if degree > self.chart.dim() {
            return Ok(Multivector::zero(&self.chart, degree));
        }
        let mut out = Multivector::zero(&self.chart, degree);
        for (a, ca) in &self.comps {
            let xs = factors(&self.chart, *a, ca);
            for (b, cb) in &other.comps {
                let ys = factors(&self.chart, *b, cb);
                for i in 0..p {
                    for j in 0..q {
                        // Brackets of two bare coordinate fields vanish.
                        if i > 0 && j > 0 {
                            continue;
                        }
                        let br = xs[i].bracket(&ys[j]);
                        if br.is_zero() {
                            continue;
                        }
                        let mut term = Multivector::from_vector(&br);
                        for (k, x) in xs.iter().enumerate() {
                            if k != i {
                                term = term.wedge_unchecked(&Multivector::from_vector(x));
                            }
                        }
                        for (k, y) in ys.iter().enumerate() {
                            if k != j {
                                term = term.wedge_unchecked(&Multivector::from_vector(y));
                            }
                        }
                        if (i + j) % 2 == 1 {
                            term = -&term;
                        }
                        out = &out + &term;
                    }
                }
            }
        }
        Ok(out)
    }

    fn bracket_function(&self, f: &Scalar) -> Multivector {
        let p = self.degree;
        let mut out = Multivector::zero(&self.chart, p - 1);
        for (a, ca) in &self.comps {
            let xs = factors(&self.chart, *a, ca);
            for i in 0..p {
                let xf = xs[i].apply(f);
                if xf.is_zero() {
                    continue;
                }
                let mut term = Multivector::function(&self.chart, xf);
                for (k, x) in xs.iter().enumerate() {
                    if k != i {
                        term = term.wedge_unchecked(&Multivector::from_vector(x));
                    }
                }
                if (p - 1 - i) % 2 == 1 {
                    term = -&term;
                }
                out = &out + &term;
            }
        }
        out
    }

    /// Wedge without the degree bound; excess degree yields zero.
    fn wedge_unchecked(&self, other: &Multivector) -> Multivector {
        self.wedge(other)
            .unwrap_or_else(|_| Multivector::zero(&self.chart, self.degree + other.degree))
    }
}

/// `c ∂_{i₁} ∧ ∂_{i₂} ∧ …` as the vector list `(c∂_{i₁}, ∂_{i₂}, …)`.
fn factors(chart: &Chart, blade: Blade, c: &Scalar) -> Vec<VectorField> {
    blade_indices(blade)
        .enumerate()
        .map(|(k, i)| {
            let v = VectorField::coordinate(chart, i);
            if k == 0 {
                v.scale(c)
            } else {
                v
            }
        })
        .collect()
}

impl<K: AltKind> Alt<K> {
    fn named_coefficients(&self) -> Vec<(String, Scalar)> {
        self.comps
            .iter()
            .map(|(b, c)| (self.blade_name(*b), c.clone()))
            .collect()
    }

    pub fn blades(&self) -> Vec<Blade> {
        blades_of_degree(self.chart.dim(), self.degree)
    }
}

impl Tensor for DiffForm {
    fn chart(&self) -> &Chart {
        &self.chart
    }

    fn map_coefficients(&self, f: &mut dyn FnMut(&Scalar) -> Scalar) -> Self {
        self.map(f)
    }

    fn coefficients(&self) -> Vec<(String, Scalar)> {
        self.named_coefficients()
    }

    fn pullback(&self, map: &CoordMap) -> Result<Self> {
        map.pull_form(self)
    }

    fn lie_derivative(&self, x: &VectorField) -> Result<Self> {
        self.lie(x)
    }

    fn try_add(&self, other: &Self) -> Result<Self> {
        Alt::try_add(self, other)
    }
}

impl Tensor for Multivector {
    fn chart(&self) -> &Chart {
        &self.chart
    }

    fn map_coefficients(&self, f: &mut dyn FnMut(&Scalar) -> Scalar) -> Self {
        self.map(f)
    }

    fn coefficients(&self) -> Vec<(String, Scalar)> {
        self.named_coefficients()
    }

    fn pullback(&self, map: &CoordMap) -> Result<Self> {
        map.pull_multivector(self)
    }

    fn lie_derivative(&self, x: &VectorField) -> Result<Self> {
        Multivector::from_vector(x).schouten(self)
    }

    fn try_add(&self, other: &Self) -> Result<Self> {
        Alt::try_add(self, other)
    }
}
