//! Helpers shared by the integration tests: expression generators and an
//! independent floating-point oracle for the exact angle averages.

#![allow(dead_code)]

use std::f64::consts::PI;
use std::num::NonZeroUsize;

use foliage::symcalc::audit::AverageRecord;
use foliage::symcalc::{Chart, Scalar};
use gauss_quad::GaussLegendre;
use proptest::prelude::*;
use rand::Rng;

/// Number of trapezoid nodes for periodic averages.
pub const TRAPEZOID_NODES: usize = 64;

pub fn chart() -> Chart {
    Chart::new(&["x1", "x2"], &["q", "p"], &["theta"]).unwrap()
}

pub fn s(c: &Chart, src: &str) -> Scalar {
    c.parse(src).unwrap_or_else(|e| panic!("{src}: {e}"))
}

/// `q ↦ q cosθ − p sinθ, p ↦ q sinθ + p cosθ` on the last two coordinates.
pub fn rotation_images(c: &Chart, angle: &str) -> Vec<Scalar> {
    let n = c.n_h();
    let (q, p) = (c.coord_name(n).to_string(), c.coord_name(n + 1).to_string());
    let mut out: Vec<Scalar> = (0..c.dim()).map(|i| c.coord_fn(i)).collect();
    out[n] = s(c, &format!("{q}*cos({angle}) - {p}*sin({angle})"));
    out[n + 1] = s(c, &format!("{q}*sin({angle}) + {p}*cos({angle})"));
    out
}

/// One monomial term as source text.
fn term(coef: i64, exps: &[u32], names: &[&str], trig: u8, angle: &str) -> String {
    let mut parts = vec![coef.to_string()];
    for (e, n) in exps.iter().zip(names) {
        if *e > 0 {
            parts.push(format!("{n}^{e}"));
        }
    }
    match trig {
        1 => parts.push(format!("cos({angle})")),
        2 => parts.push(format!("sin({angle})")),
        3 => parts.push(format!("cos(2*{angle})")),
        _ => {}
    }
    parts.join("*")
}

/// Polynomial in `names` with up to `max_terms` terms, exponents at most
/// `max_exp`, optionally times low harmonics of `angle`.
pub fn poly_src(
    names: &'static [&'static str],
    max_terms: usize,
    max_exp: u32,
    angle: Option<&'static str>,
) -> impl Strategy<Value = String> {
    let n = names.len();
    let trig_max = if angle.is_some() { 3u8 } else { 0 };
    prop::collection::vec(
        (-3i64..=3, prop::collection::vec(0..=max_exp, n), 0..=trig_max),
        0..=max_terms,
    )
    .prop_map(move |terms| {
        if terms.is_empty() {
            return "0".to_string();
        }
        terms
            .iter()
            .map(|(c, e, t)| term(*c, e, names, *t, angle.unwrap_or("")))
            .collect::<Vec<_>>()
            .join(" + ")
    })
}

/// A random rational in `[-2, 2]` with denominator at most 7, as `f64`.
pub fn random_rational(rng: &mut impl Rng) -> f64 {
    let den: i64 = rng.gen_range(1..=7);
    let num: i64 = rng.gen_range(-2 * den..=2 * den);
    num as f64 / den as f64
}

/// Values for every chart variable (coordinates then parameters) and angle.
pub fn random_point(c: &Chart, rng: &mut impl Rng) -> (Vec<f64>, Vec<f64>) {
    let n_vars = c.dim() + c.param_names().len();
    let vars = (0..n_vars).map(|_| random_rational(rng)).collect();
    let angles = (0..c.n_angles()).map(|_| random_rational(rng) * PI).collect();
    (vars, angles)
}

/// `(1/N) Σ f(θ_k)` over equispaced nodes; exact for frequencies below `N`.
pub fn trapezoid_mean(f: impl Fn(f64) -> f64) -> f64 {
    let n = TRAPEZOID_NODES;
    (0..n).map(|k| f(2.0 * PI * k as f64 / n as f64)).sum::<f64>() / n as f64
}

/// `(1/2π)∫₀^{2π}∫₀^θ f(s) ds dθ = (1/2π)∫₀^{2π}(2π − s) f(s) ds`; the
/// integrand is not periodic, so Gauss–Legendre is used instead.
pub fn iterated_mean_numeric(f: impl Fn(f64) -> f64) -> f64 {
    let gl = GaussLegendre::new(NonZeroUsize::new(64).unwrap());
    gl.integrate(0.0, 2.0 * PI, |s| (2.0 * PI - s) * f(s)) / (2.0 * PI)
}

/// Largest deviation between a recorded exact average and its numerical
/// oracle at the given point.
pub fn record_error(rec: &AverageRecord, vars: &[f64], angles: &[f64]) -> f64 {
    match rec {
        AverageRecord::Mean { input, angle, output } => {
            let a = angle.0 as usize;
            let numeric = trapezoid_mean(|t| {
                let mut th = angles.to_vec();
                th[a] = t;
                input.eval(vars, &th)
            });
            (numeric - output.eval(vars, angles)).abs()
        }
        AverageRecord::Iterated { input, angle, output } => {
            let a = angle.0 as usize;
            let numeric = iterated_mean_numeric(|t| {
                let mut th = angles.to_vec();
                th[a] = t;
                input.eval(vars, &th)
            });
            let exact = output.rational.eval(vars, angles) + PI * output.pi_coefficient.eval(vars, angles);
            (numeric - exact).abs()
        }
    }
}

/// Relative form of [`record_error`], scaled by the size of the values.
pub fn record_relative_error(rec: &AverageRecord, vars: &[f64], angles: &[f64]) -> f64 {
    let scale = match rec {
        AverageRecord::Mean { output, .. } => output.eval(vars, angles).abs(),
        AverageRecord::Iterated { output, .. } => {
            output.rational.eval(vars, angles).abs() + PI * output.pi_coefficient.eval(vars, angles).abs()
        }
    };
    record_error(rec, vars, angles) / scale.max(1.0)
}
