use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::levy::LevyMeasure;

/// A coordinate of the statistical manifold.
///
/// Equivalent processes may differ only in their exponential tempering, so
/// the charts used throughout are built from the tempering rates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Coordinate {
    LambdaPlus,
    LambdaMinus,
}

impl Coordinate {
    pub fn name(self) -> &'static str {
        match self {
            Coordinate::LambdaPlus => "lambda_plus",
            Coordinate::LambdaMinus => "lambda_minus",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "lambda_plus" | "lambda+" | "λ+" => Some(Coordinate::LambdaPlus),
            "lambda_minus" | "lambda-" | "λ-" => Some(Coordinate::LambdaMinus),
            _ => None,
        }
    }

    /// `∂ log(dν/dx)` with respect to this coordinate at jump size `x`.
    ///
    /// Exponential tempering makes this linear in `x` and second derivatives
    /// vanish identically.
    #[inline]
    pub fn score(self, x: f64) -> f64 {
        match self {
            Coordinate::LambdaPlus if x > 0.0 => -x,
            Coordinate::LambdaMinus if x < 0.0 => x,
            _ => 0.0,
        }
    }

    pub(crate) fn index(self) -> usize {
        match self {
            Coordinate::LambdaPlus => 0,
            Coordinate::LambdaMinus => 1,
        }
    }
}

impl fmt::Display for Coordinate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A point of the manifold in an ordered coordinate system.
#[derive(Debug, Clone, PartialEq)]
pub struct CoordinateChart {
    names: Vec<Coordinate>,
    point: Vec<f64>,
    bounds: Vec<(f64, f64)>,
}

impl CoordinateChart {
    pub fn new(names: Vec<Coordinate>, point: Vec<f64>, bounds: Vec<(f64, f64)>) -> Result<Self> {
        if names.is_empty() {
            return Err(Error::domain("a chart needs at least one coordinate"));
        }
        if point.len() != names.len() || bounds.len() != names.len() {
            return Err(Error::domain(
                "chart names, point and bounds must have equal length",
            ));
        }
        for (i, name) in names.iter().enumerate() {
            if names[..i].contains(name) {
                return Err(Error::domain(alloc::format!(
                    "coordinate {name} appears twice"
                )));
            }
        }
        let chart = Self {
            names,
            point,
            bounds,
        };
        chart.check_inside(&chart.point)?;
        Ok(chart)
    }

    /// The `(λ+, λ-)` chart at the measure's current tempering rates.
    pub fn lambda(measure: &LevyMeasure) -> Result<Self> {
        let (lp, lm) = measure
            .lambdas()
            .ok_or(Error::UnsupportedCoordinate("lambda_plus"))?;
        Self::new(
            alloc::vec![Coordinate::LambdaPlus, Coordinate::LambdaMinus],
            alloc::vec![lp, lm],
            alloc::vec![(0.0, f64::INFINITY); 2],
        )
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[Coordinate] {
        &self.names
    }

    pub fn point(&self) -> &[f64] {
        &self.point
    }

    pub fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }

    pub fn check_inside(&self, point: &[f64]) -> Result<()> {
        for ((&x, &(lo, hi)), name) in point.iter().zip(&self.bounds).zip(&self.names) {
            if !(x > lo && x < hi) {
                return Err(Error::domain(alloc::format!(
                    "coordinate {name} = {x} lies outside its open interval ({lo}, {hi})"
                )));
            }
        }
        Ok(())
    }

    pub fn with_point(&self, point: Vec<f64>) -> Result<Self> {
        Self::new(self.names.clone(), point, self.bounds.clone())
    }

    /// The measure whose charted coordinates are set to `point`.
    pub fn apply(&self, measure: &LevyMeasure, point: &[f64]) -> Result<LevyMeasure> {
        let (mut lp, mut lm) = measure
            .lambdas()
            .ok_or(Error::UnsupportedCoordinate(self.names[0].name()))?;
        for (name, &x) in self.names.iter().zip(point) {
            match name {
                Coordinate::LambdaPlus => lp = x,
                Coordinate::LambdaMinus => lm = x,
            }
        }
        measure.with_lambdas(lp, lm)
    }
}
