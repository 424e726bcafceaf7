use crate::symcalc::{Chart, Scalar};

/// The expression that failed to vanish, and where.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub location: String,
    pub residue: Scalar,
}

impl Witness {
    pub fn render(&self, chart: &Chart) -> String {
        format!("{}: {}", self.location, self.residue.render(chart))
    }
}

/// Outcome of an exact identity check. A failure always carries a nonzero
/// residue.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Verdict {
    witness: Option<Witness>,
}

impl Verdict {
    pub fn pass() -> Self {
        Verdict { witness: None }
    }

    /// A failure; a zero residue is replaced by the constant 1 so the
    /// witness is never the zero expression.
    pub fn fail(location: impl Into<String>, residue: Scalar) -> Self {
        let residue = if residue.is_zero() { Scalar::one() } else { residue };
        Verdict {
            witness: Some(Witness {
                location: location.into(),
                residue,
            }),
        }
    }

    pub fn zero(location: impl Into<String>, residue: &Scalar) -> Self {
        if residue.is_zero() {
            Verdict::pass()
        } else {
            Verdict::fail(location, residue.clone())
        }
    }

    /// Passes iff every residue vanishes; reports the first that does not.
    pub fn all_zero<'a, L: Into<String>>(residues: impl IntoIterator<Item = (L, &'a Scalar)>) -> Self {
        for (loc, r) in residues {
            if !r.is_zero() {
                return Verdict::fail(loc, r.clone());
            }
        }
        Verdict::pass()
    }

    pub fn from_bool(ok: bool, location: impl Into<String>) -> Self {
        if ok {
            Verdict::pass()
        } else {
            Verdict::fail(location, Scalar::one())
        }
    }

    pub fn holds(&self) -> bool {
        self.witness.is_none()
    }

    pub fn witness(&self) -> Option<&Witness> {
        self.witness.as_ref()
    }

    /// Keeps the first failure.
    pub fn and(self, other: impl FnOnce() -> Verdict) -> Verdict {
        if self.holds() {
            other()
        } else {
            self
        }
    }

    pub fn context(self, prefix: &str) -> Verdict {
        match self.witness {
            None => self,
            Some(w) => Verdict {
                witness: Some(Witness {
                    location: format!("{prefix}: {}", w.location),
                    residue: w.residue,
                }),
            },
        }
    }
}

impl Verdict {
    /// Passes iff every coefficient of `t` vanishes.
    pub fn vanishes<T: crate::geom::Tensor>(location: &str, t: &T) -> Verdict {
        match t.coefficients().into_iter().next() {
            None => Verdict::pass(),
            Some((name, c)) => Verdict::fail(format!("{location} [{name}]"), c),
        }
    }

    /// Passes iff `a == b`, reporting the first differing coefficient.
    pub fn equal<T: crate::geom::Tensor>(location: &str, a: &T, b: &T) -> crate::Result<Verdict> {
        Ok(Verdict::vanishes(location, &a.try_sub(b)?))
    }
}
