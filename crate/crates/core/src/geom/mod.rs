//! Coordinate-frame tensor calculus.
//!
//! Multi-indices are `u64` bitmasks over coordinate positions; the
//! increasing ordering of set bits is the canonical orientation.
//!
//! Sign charter, tested in `vvform` and `alt`:
//! - `[X, Y]_FN` on degree-0 operands is the Lie bracket.
//! - `[X, K]_FN = L_X K`, hence `L_X γ = −[γ, X]_FN` for 1-forms.
//! - `[X, A]_SCH = L_X A` for a vector field `X`.

mod alt;
mod pullback;
mod vector;
mod vvform;

pub use alt::{Alt, AltKind, DiffForm, FormKind, MultiKind, Multivector};
pub use pullback::CoordMap;
pub use vector::VectorField;
pub use vvform::VecValuedForm;

use crate::error::{Error, Result};
use crate::symcalc::{Chart, Scalar};

/// Multi-index bitmask.
pub type Blade = u64;

/// Bits of `b` in increasing order.
pub fn blade_indices(b: Blade) -> impl Iterator<Item = usize> {
    (0..64).filter(move |i| b >> i & 1 == 1)
}

pub fn blade_of(indices: &[usize]) -> Blade {
    indices.iter().fold(0, |b, &i| b | 1 << i)
}

pub fn blade_degree(b: Blade) -> usize {
    b.count_ones() as usize
}

/// Sign of `e_a ∧ e_b` relative to `e_{a∪b}`; zero when they overlap.
pub fn wedge_sign(a: Blade, b: Blade) -> i64 {
    if a & b != 0 {
        return 0;
    }
    let swaps: u32 = blade_indices(b).map(|j| (a >> (j + 1)).count_ones()).sum();
    if swaps.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Sign of removing index `j` from the front of `b`: `(−1)^{#{i ∈ b : i < j}}`.
pub fn removal_sign(b: Blade, j: usize) -> i64 {
    if (b & ((1u64 << j) - 1)).count_ones().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// All `k`-subsets of `0..n` in increasing bitmask order.
pub fn blades_of_degree(n: usize, k: usize) -> Vec<Blade> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let top: u64 = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut b: u64 = if k == 0 { 0 } else { (1u64 << k) - 1 };
    if k == 0 {
        return vec![0];
    }
    loop {
        out.push(b);
        // Gosper's hack.
        let c = b & b.wrapping_neg();
        let r = b.wrapping_add(c);
        if r == 0 || r & !top != 0 {
            break;
        }
        b = (((r ^ b) >> 2) / c) | r;
        if b & !top != 0 {
            break;
        }
    }
    out
}

pub(crate) fn check_chart(a: &Chart, b: &Chart) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::ChartMismatch)
    }
}

/// Operations shared by every tensor kind.
pub trait Tensor: Clone + Sized {
    fn chart(&self) -> &Chart;

    fn map_coefficients(&self, f: &mut dyn FnMut(&Scalar) -> Scalar) -> Self;

    /// Named nonzero coefficients, used for witnesses.
    fn coefficients(&self) -> Vec<(String, Scalar)>;

    fn pullback(&self, map: &CoordMap) -> Result<Self>;

    fn lie_derivative(&self, x: &VectorField) -> Result<Self>;

    fn try_add(&self, other: &Self) -> Result<Self>;

    fn is_zero(&self) -> bool {
        self.coefficients().is_empty()
    }

    fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&other.map_coefficients(&mut |c| -c))
    }

    fn scaled(&self, f: &Scalar) -> Self {
        self.map_coefficients(&mut |c| c * f)
    }
}

impl Tensor for VectorField {
    fn chart(&self) -> &Chart {
        VectorField::chart(self)
    }

    fn map_coefficients(&self, f: &mut dyn FnMut(&Scalar) -> Scalar) -> Self {
        self.map(f)
    }

    fn coefficients(&self) -> Vec<(String, Scalar)> {
        self.comps()
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (format!("d_{}", self.chart().coord_name(i)), c.clone()))
            .collect()
    }

    fn pullback(&self, map: &CoordMap) -> Result<Self> {
        map.pull_vector(self)
    }

    fn lie_derivative(&self, x: &VectorField) -> Result<Self> {
        check_chart(x.chart(), self.chart())?;
        Ok(x.bracket(self))
    }

    fn try_add(&self, other: &Self) -> Result<Self> {
        check_chart(self.chart(), other.chart())?;
        Ok(self + other)
    }
}
