use std::f64::consts::PI;

use crate::{Error, Result};

/// One-dimensional factor of a product test function. Every factor vanishes
/// at 0 and 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Factor {
    /// `x(1 − x)`
    Quadratic,
    /// `sin(πx)`
    Sine,
    /// `x²(1 − x)`
    Cubic,
    /// `x³(1 − x)²`
    Quintic,
}

impl Factor {
    pub fn value(self, t: f64) -> f64 {
        match self {
            Factor::Quadratic => t * (1.0 - t),
            Factor::Sine => (PI * t).sin(),
            Factor::Cubic => t * t * (1.0 - t),
            Factor::Quintic => t * t * t * (1.0 - t) * (1.0 - t),
        }
    }

    pub fn second_derivative(self, t: f64) -> f64 {
        match self {
            Factor::Quadratic => -2.0,
            Factor::Sine => -PI * PI * (PI * t).sin(),
            Factor::Cubic => 2.0 - 6.0 * t,
            Factor::Quintic => 6.0 * t - 24.0 * t * t + 20.0 * t * t * t,
        }
    }

    /// `sup |g''|` on `[0, 1]`.
    pub fn sup_second(self) -> f64 {
        match self {
            Factor::Quadratic => 2.0,
            Factor::Sine => PI * PI,
            Factor::Cubic => 4.0,
            // |g''| peaks at t = 1; the interior extrema are 0.43 and 0.75
            Factor::Quintic => 2.0,
        }
    }

    /// `‖g''‖_{L²(0,1)}`.
    pub fn l2_second(self) -> f64 {
        match self {
            Factor::Quadratic => 2.0,
            Factor::Sine => PI * PI / 2f64.sqrt(),
            Factor::Cubic => 2.0,
            Factor::Quintic => (12.0f64 / 35.0).sqrt(),
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Factor::Quadratic => "x(1-x)",
            Factor::Sine => "sin(pi x)",
            Factor::Cubic => "x^2(1-x)",
            Factor::Quintic => "x^3(1-x)^2",
        }
    }

    fn parse(token: &str) -> Option<Self> {
        let t: String = token.chars().filter(|c| !c.is_whitespace()).collect();
        match t.as_str() {
            "x(1-x)" => Some(Factor::Quadratic),
            "sin(pix)" | "sin(pi*x)" => Some(Factor::Sine),
            "x^2(1-x)" => Some(Factor::Cubic),
            "x^3(1-x)^2" => Some(Factor::Quintic),
            _ => None,
        }
    }
}

/// A product function `f(x) = ∏_j g_j(x_j)` in the Korobov space, with its
/// mixed derivative `∂^{2d}f/∂x₁²⋯∂x_d² = ∏_j g_j''(x_j)` and exact
/// semi-norms. An empty factor list with `d > 0` is the zero function.
#[derive(Debug, Clone, PartialEq)]
pub struct KorobovTestFunction {
    name: String,
    d: usize,
    factors: Vec<Factor>,
}

impl KorobovTestFunction {
    pub fn product(name: impl Into<String>, factors: Vec<Factor>) -> Self {
        Self {
            name: name.into(),
            d: factors.len(),
            factors,
        }
    }

    pub fn zero(d: usize) -> Self {
        Self {
            name: "zero".into(),
            d,
            factors: Vec::new(),
        }
    }

    /// Corpus entry by name: `prod-quad`, `prod-sin`, `prod-cubic` and `zero`
    /// take any `d ≥ 1`; `asym` is one-dimensional and `mixed` two-dimensional.
    pub fn by_name(name: &str, d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::DimensionMismatch { expected: 1, found: 0 });
        }
        let fixed = |expected: usize, factors: Vec<Factor>| {
            if d == expected {
                Ok(Self::product(name, factors))
            } else {
                Err(Error::DimensionMismatch { expected, found: d })
            }
        };
        match name {
            "prod-quad" => Ok(Self::product(name, vec![Factor::Quadratic; d])),
            "prod-sin" => Ok(Self::product(name, vec![Factor::Sine; d])),
            "prod-cubic" => Ok(Self::product(name, vec![Factor::Cubic; d])),
            "asym" => fixed(1, vec![Factor::Quintic]),
            "mixed" => fixed(2, vec![Factor::Quadratic, Factor::Cubic]),
            "zero" => Ok(Self::zero(d)),
            other => Err(Error::UnknownFunction(other.to_string())),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn is_zero(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        self.factors.iter().zip(x).map(|(g, &t)| g.value(t)).product()
    }

    pub fn mixed_derivative(&self, x: &[f64]) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        self.factors
            .iter()
            .zip(x)
            .map(|(g, &t)| g.second_derivative(t))
            .product()
    }

    /// `|f|_{2,∞}`.
    pub fn seminorm_inf(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        self.factors.iter().map(|g| g.sup_second()).product()
    }

    /// `|f|_{2,2}`.
    pub fn seminorm_2(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        self.factors.iter().map(|g| g.l2_second()).product()
    }
}

/// Parse a product such as `x(1-x)*sin(pi x)`: one factor per dimension.
pub fn parse_expr(spec: &str) -> Result<KorobovTestFunction> {
    let factors = spec
        .split('*')
        .map(|tok| Factor::parse(tok).ok_or_else(|| Error::BadExpression(spec.to_string())))
        .collect::<Result<Vec<_>>>()?;
    if factors.is_empty() {
        return Err(Error::BadExpression(spec.to_string()));
    }
    let name: String = spec.chars().filter(|c| !c.is_whitespace()).collect();
    Ok(KorobovTestFunction::product(name, factors))
}

/// The standard test set.
pub fn corpus() -> Vec<KorobovTestFunction> {
    let mut out = Vec::new();
    for d in 1..=3 {
        out.push(KorobovTestFunction::by_name("prod-quad", d).expect("valid"));
    }
    for d in 1..=2 {
        out.push(KorobovTestFunction::by_name("prod-sin", d).expect("valid"));
    }
    out.push(KorobovTestFunction::by_name("asym", 1).expect("valid"));
    out.push(KorobovTestFunction::by_name("mixed", 2).expect("valid"));
    out
}
