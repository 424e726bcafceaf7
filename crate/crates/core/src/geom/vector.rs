use std::ops::{Add, Neg, Sub};

use crate::error::{Error, Result};
use crate::symcalc::{Chart, Scalar, Var};

/// Vector field in the coordinate frame `∂_0, …, ∂_{n-1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VectorField {
    chart: Chart,
    comps: Vec<Scalar>,
}

impl VectorField {
    pub fn zero(chart: &Chart) -> Self {
        VectorField {
            chart: chart.clone(),
            comps: vec![Scalar::zero(); chart.dim()],
        }
    }

    pub fn new(chart: &Chart, comps: Vec<Scalar>) -> Result<Self> {
        if comps.len() != chart.dim() {
            return Err(Error::DegreeMismatch {
                expected: chart.dim(),
                found: comps.len(),
            });
        }
        Ok(VectorField {
            chart: chart.clone(),
            comps,
        })
    }

    /// The coordinate field `∂_i`.
    pub fn coordinate(chart: &Chart, i: usize) -> Self {
        let mut v = VectorField::zero(chart);
        v.comps[i] = Scalar::one();
        v
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn comps(&self) -> &[Scalar] {
        &self.comps
    }

    pub fn comp(&self, i: usize) -> &Scalar {
        &self.comps[i]
    }

    pub fn set_comp(&mut self, i: usize, s: Scalar) {
        self.comps[i] = s;
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(Scalar::is_zero)
    }

    /// `X(f) = Σ Xⁱ ∂ᵢ f`.
    pub fn apply(&self, f: &Scalar) -> Scalar {
        self.comps
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| c * &f.partial(Var(i as u16)))
            .sum()
    }

    /// Lie bracket `[X, Y]ⁱ = X(Yⁱ) − Y(Xⁱ)`.
    pub fn bracket(&self, other: &VectorField) -> VectorField {
        let comps = (0..self.comps.len())
            .map(|i| self.apply(&other.comps[i]) - other.apply(&self.comps[i]))
            .collect();
        VectorField {
            chart: self.chart.clone(),
            comps,
        }
    }

    pub fn scale(&self, f: &Scalar) -> VectorField {
        self.map(|c| c * f)
    }

    pub fn map(&self, mut f: impl FnMut(&Scalar) -> Scalar) -> VectorField {
        VectorField {
            chart: self.chart.clone(),
            comps: self.comps.iter().map(&mut f).collect(),
        }
    }

    /// Horizontal components vanish.
    pub fn is_vertical(&self) -> bool {
        self.chart.horizontal().all(|i| self.comps[i].is_zero())
    }

    /// Vertical components vanish.
    pub fn is_horizontal_coordinate_span(&self) -> bool {
        self.chart.vertical().all(|i| self.comps[i].is_zero())
    }

    pub fn vertical_part(&self) -> VectorField {
        let mut v = self.clone();
        for i in self.chart.horizontal() {
            v.comps[i] = Scalar::zero();
        }
        v
    }

    pub fn horizontal_part(&self) -> VectorField {
        let mut v = self.clone();
        for i in self.chart.vertical() {
            v.comps[i] = Scalar::zero();
        }
        v
    }

    pub fn render(&self) -> String {
        let parts: Vec<String> = self
            .comps
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| format!("({})*d_{}", c.render(&self.chart), self.chart.coord_name(i)))
            .collect();
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}

impl Add<&VectorField> for &VectorField {
    type Output = VectorField;
    fn add(self, rhs: &VectorField) -> VectorField {
        VectorField {
            chart: self.chart.clone(),
            comps: self.comps.iter().zip(&rhs.comps).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub<&VectorField> for &VectorField {
    type Output = VectorField;
    fn sub(self, rhs: &VectorField) -> VectorField {
        VectorField {
            chart: self.chart.clone(),
            comps: self.comps.iter().zip(&rhs.comps).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &VectorField {
    type Output = VectorField;
    fn neg(self) -> VectorField {
        self.map(|c| -c)
    }
}
