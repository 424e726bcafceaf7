use std::collections::BTreeMap;

use super::{blade_indices, check_chart, DiffForm, Multivector, VecValuedForm, VectorField};
use crate::error::{Error, Result};
use crate::symcalc::{Chart, Scalar, Var};

/// Coordinate map `Φ` given by its component functions, with optional
/// inverse `Ψ`. Forms and functions pull back through `Φ` alone; vectors
/// need `Ψ` to be pushed forward.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoordMap {
    chart: Chart,
    forward: Vec<Scalar>,
    inverse: Option<Vec<Scalar>>,
}

impl CoordMap {
    pub fn new(chart: &Chart, forward: Vec<Scalar>, inverse: Option<Vec<Scalar>>) -> Result<Self> {
        let n = chart.dim();
        if forward.len() != n || inverse.as_ref().is_some_and(|i| i.len() != n) {
            return Err(Error::InvalidChart(format!("coordinate map needs {n} components")));
        }
        Ok(CoordMap {
            chart: chart.clone(),
            forward,
            inverse,
        })
    }

    pub fn identity(chart: &Chart) -> Self {
        let id: Vec<Scalar> = (0..chart.dim()).map(|i| chart.coord_fn(i)).collect();
        CoordMap {
            chart: chart.clone(),
            forward: id.clone(),
            inverse: Some(id),
        }
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn forward(&self) -> &[Scalar] {
        &self.forward
    }

    pub fn inverse(&self) -> Option<&[Scalar]> {
        self.inverse.as_deref()
    }

    /// `Φ` and `Ψ` swapped.
    pub fn inverted(&self) -> Result<CoordMap> {
        let inv = self.inverse.clone().ok_or(Error::MissingInverse)?;
        Ok(CoordMap {
            chart: self.chart.clone(),
            forward: inv,
            inverse: Some(self.forward.clone()),
        })
    }

    /// Applies `f` to every component of both directions.
    pub fn map_components(&self, mut f: impl FnMut(&Scalar) -> Scalar) -> CoordMap {
        CoordMap {
            chart: self.chart.clone(),
            forward: self.forward.iter().map(&mut f).collect(),
            inverse: self.inverse.as_ref().map(|v| v.iter().map(&mut f).collect()),
        }
    }

    /// `self ∘ other` (apply `other` first): components `Φ^i ∘ Φ'`.
    pub fn compose(&self, other: &CoordMap) -> Result<CoordMap> {
        check_chart(&self.chart, &other.chart)?;
        let forward = self.forward.iter().map(|c| other.pull_function(c)).collect();
        let inverse = match (&self.inverse, &other.inverse) {
            (Some(a), Some(b)) => {
                let inv_self = self.substitution(a);
                Some(b.iter().map(|c| c.substitute(&inv_self)).collect())
            }
            _ => None,
        };
        Ok(CoordMap {
            chart: self.chart.clone(),
            forward,
            inverse,
        })
    }

    fn substitution(&self, comps: &[Scalar]) -> BTreeMap<Var, Scalar> {
        comps
            .iter()
            .enumerate()
            .map(|(i, c)| (Var(i as u16), c.clone()))
            .collect()
    }

    /// `f ∘ Φ`.
    pub fn pull_function(&self, f: &Scalar) -> Scalar {
        f.substitute(&self.substitution(&self.forward))
    }

    pub fn pull_form(&self, alpha: &DiffForm) -> Result<DiffForm> {
        check_chart(&self.chart, alpha.chart())?;
        let dphi: Vec<DiffForm> = self
            .forward
            .iter()
            .map(|c| DiffForm::differential(&self.chart, c))
            .collect();
        let mut out = DiffForm::zero(&self.chart, alpha.degree());
        for (blade, c) in alpha.terms() {
            let mut term = DiffForm::function(&self.chart, self.pull_function(c));
            for i in blade_indices(blade) {
                term = term.wedge(&dphi[i])?;
            }
            out = &out + &term;
        }
        Ok(out)
    }

    /// `Φ^*∂_j = (∂_jΨ^i ∘ Φ) ∂_i`.
    fn pulled_frame(&self) -> Result<Vec<VectorField>> {
        let inv = self.inverse.as_ref().ok_or(Error::MissingInverse)?;
        let n = self.chart.dim();
        (0..n)
            .map(|j| {
                let comps = inv
                    .iter()
                    .map(|psi| self.pull_function(&psi.partial(Var(j as u16))))
                    .collect();
                VectorField::new(&self.chart, comps)
            })
            .collect()
    }

    /// `Φ^*Y = TΨ ∘ Y ∘ Φ`.
    pub fn pull_vector(&self, y: &VectorField) -> Result<VectorField> {
        check_chart(&self.chart, y.chart())?;
        let frame = self.pulled_frame()?;
        let mut out = VectorField::zero(&self.chart);
        for (j, c) in y.comps().iter().enumerate() {
            if !c.is_zero() {
                out = &out + &frame[j].scale(&self.pull_function(c));
            }
        }
        Ok(out)
    }

    pub fn pull_multivector(&self, a: &Multivector) -> Result<Multivector> {
        check_chart(&self.chart, a.chart())?;
        let frame: Vec<Multivector> = self.pulled_frame()?.iter().map(Multivector::from_vector).collect();
        let mut out = Multivector::zero(&self.chart, a.degree());
        for (blade, c) in a.terms() {
            let mut term = Multivector::function(&self.chart, self.pull_function(c));
            for i in blade_indices(blade) {
                term = term.wedge(&frame[i])?;
            }
            out = &out + &term;
        }
        Ok(out)
    }

    pub fn pull_vv_form(&self, k: &VecValuedForm) -> Result<VecValuedForm> {
        check_chart(&self.chart, k.chart())?;
        let frame = self.pulled_frame()?;
        let mut out = VecValuedForm::zero(&self.chart, k.degree());
        for (a, comp) in k.components().iter().enumerate() {
            if comp.is_zero() {
                continue;
            }
            let pulled = self.pull_form(comp)?;
            out = &out + &VecValuedForm::tensor(&pulled, &frame[a])?;
        }
        Ok(out)
    }
}
