use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

use super::Scalar;

/// Index of a polynomial variable: a chart coordinate or an auxiliary
/// parameter. Coordinates come first (horizontal, then vertical).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(pub u16);

/// Index of a group angle. Angles only ever appear inside `sin`/`cos`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Angle(pub u16);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Symbol {
    Var(Var),
    Angle(Angle),
}

#[derive(Debug, PartialEq, Eq)]
struct ChartData {
    horizontal: Vec<String>,
    vertical: Vec<String>,
    params: Vec<String>,
    angles: Vec<String>,
}

/// Coordinate chart with a horizontal/vertical split, auxiliary polynomial
/// parameters and group-angle names. Cheap to clone.
#[derive(Clone)]
pub struct Chart(Arc<ChartData>);

impl PartialEq for Chart {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }
}

impl Eq for Chart {}

impl fmt::Debug for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Chart(h={:?}, v={:?}, params={:?}, angles={:?})",
            self.0.horizontal, self.0.vertical, self.0.params, self.0.angles
        )
    }
}

fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

const RESERVED: [&str; 2] = ["sin", "cos"];

impl Chart {
    pub fn new<S: AsRef<str>>(horizontal: &[S], vertical: &[S], angles: &[S]) -> Result<Self> {
        Self::with_params(horizontal, vertical, &[] as &[&str], angles)
    }

    pub fn with_params<S: AsRef<str>, T: AsRef<str>>(
        horizontal: &[S],
        vertical: &[S],
        params: &[T],
        angles: &[S],
    ) -> Result<Self> {
        let own = |xs: &[S]| xs.iter().map(|s| s.as_ref().to_string()).collect::<Vec<_>>();
        let data = ChartData {
            horizontal: own(horizontal),
            vertical: own(vertical),
            params: params.iter().map(|s| s.as_ref().to_string()).collect(),
            angles: own(angles),
        };
        let mut seen = HashSet::new();
        for name in data
            .horizontal
            .iter()
            .chain(&data.vertical)
            .chain(&data.params)
            .chain(&data.angles)
        {
            if !is_identifier(name) || RESERVED.contains(&name.as_str()) {
                return Err(Error::InvalidChart(format!("`{name}` is not a valid symbol name")));
            }
            if !seen.insert(name.clone()) {
                return Err(Error::InvalidChart(format!("duplicate symbol `{name}`")));
            }
        }
        let dim = data.horizontal.len() + data.vertical.len();
        if dim == 0 {
            return Err(Error::InvalidChart("chart has no coordinates".into()));
        }
        if dim > 64 {
            return Err(Error::InvalidChart("at most 64 coordinates are supported".into()));
        }
        if data.params.len() + dim > u16::MAX as usize || data.angles.len() > u16::MAX as usize {
            return Err(Error::InvalidChart("too many symbols".into()));
        }
        Ok(Chart(Arc::new(data)))
    }

    /// Same coordinates, with extra auxiliary parameters and angles appended.
    pub fn extended<S: AsRef<str>>(&self, params: &[S], angles: &[S]) -> Result<Self> {
        let mut p: Vec<String> = self.0.params.clone();
        p.extend(params.iter().map(|s| s.as_ref().to_string()));
        let mut a: Vec<String> = self.0.angles.clone();
        a.extend(angles.iter().map(|s| s.as_ref().to_string()));
        Self::with_params(&self.0.horizontal, &self.0.vertical, &p, &a)
    }

    /// Number of manifold coordinates.
    pub fn dim(&self) -> usize {
        self.0.horizontal.len() + self.0.vertical.len()
    }

    pub fn n_h(&self) -> usize {
        self.0.horizontal.len()
    }

    pub fn n_v(&self) -> usize {
        self.0.vertical.len()
    }

    pub fn n_angles(&self) -> usize {
        self.0.angles.len()
    }

    pub fn horizontal(&self) -> std::ops::Range<usize> {
        0..self.n_h()
    }

    pub fn vertical(&self) -> std::ops::Range<usize> {
        self.n_h()..self.dim()
    }

    pub fn is_horizontal(&self, coord: usize) -> bool {
        coord < self.n_h()
    }

    pub fn horizontal_names(&self) -> &[String] {
        &self.0.horizontal
    }

    pub fn vertical_names(&self) -> &[String] {
        &self.0.vertical
    }

    pub fn angle_names(&self) -> &[String] {
        &self.0.angles
    }

    pub fn param_names(&self) -> &[String] {
        &self.0.params
    }

    pub fn angles(&self) -> impl Iterator<Item = Angle> {
        (0..self.n_angles() as u16).map(Angle)
    }

    pub fn var_name(&self, v: Var) -> &str {
        let i = v.0 as usize;
        let nh = self.n_h();
        let dim = self.dim();
        if i < nh {
            &self.0.horizontal[i]
        } else if i < dim {
            &self.0.vertical[i - nh]
        } else {
            &self.0.params[i - dim]
        }
    }

    pub fn coord_name(&self, coord: usize) -> &str {
        self.var_name(Var(coord as u16))
    }

    pub fn angle_name(&self, a: Angle) -> &str {
        &self.0.angles[a.0 as usize]
    }

    pub fn symbol(&self, name: &str) -> Result<Symbol> {
        let position = |xs: &[String]| xs.iter().position(|x| x == name);
        if let Some(i) = position(&self.0.horizontal) {
            return Ok(Symbol::Var(Var(i as u16)));
        }
        if let Some(i) = position(&self.0.vertical) {
            return Ok(Symbol::Var(Var((self.n_h() + i) as u16)));
        }
        if let Some(i) = position(&self.0.params) {
            return Ok(Symbol::Var(Var((self.dim() + i) as u16)));
        }
        if let Some(i) = position(&self.0.angles) {
            return Ok(Symbol::Angle(Angle(i as u16)));
        }
        Err(Error::UnknownSymbol(name.to_string()))
    }

    pub fn var(&self, name: &str) -> Result<Var> {
        match self.symbol(name)? {
            Symbol::Var(v) => Ok(v),
            Symbol::Angle(_) => Err(Error::UnknownSymbol(format!("{name} (an angle, not a variable)"))),
        }
    }

    /// Index of a manifold coordinate (parameters and angles are rejected).
    pub fn coord(&self, name: &str) -> Result<usize> {
        let v = self.var(name)?;
        if (v.0 as usize) < self.dim() {
            Ok(v.0 as usize)
        } else {
            Err(Error::UnknownSymbol(format!("{name} (a parameter, not a coordinate)")))
        }
    }

    pub fn angle(&self, name: &str) -> Result<Angle> {
        match self.symbol(name)? {
            Symbol::Angle(a) => Ok(a),
            Symbol::Var(_) => Err(Error::UnknownSymbol(format!("{name} (not an angle)"))),
        }
    }

    /// The coordinate function with the given index.
    pub fn coord_fn(&self, coord: usize) -> Scalar {
        Scalar::var(Var(coord as u16))
    }

    /// Parses an expression in the chart's symbols into canonical form.
    pub fn parse(&self, source: &str) -> Result<Scalar> {
        super::parse_scalar(source, self)
    }

    pub fn render(&self, s: &Scalar) -> String {
        s.render(self)
    }
}
