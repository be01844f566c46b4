use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::Real;

/// A point of the compactified line: a real number or the added point at infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtPoint<S> {
    Finite(S),
    Infinity,
}

/// The doubling map `x -> 2x` on the line, with its one-point compactification
/// drawn as a circle through the chart `x = tan(theta / 2)`: `theta = 0` is
/// the origin and `theta = +-pi` is the point at infinity.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LineDoublingModel;

impl LineDoublingModel {
    pub fn map<S: Real>(&self, p: ExtPoint<S>) -> ExtPoint<S> {
        match p {
            ExtPoint::Finite(x) => ExtPoint::Finite(x + x),
            ExtPoint::Infinity => ExtPoint::Infinity,
        }
    }

    /// Angle of a point in `(-pi, pi]`.
    pub fn angle<S: Real>(&self, p: ExtPoint<S>) -> S {
        match p {
            ExtPoint::Finite(x) => S::lit(2.0) * x.atan(),
            ExtPoint::Infinity => S::PI(),
        }
    }

    pub fn point<S: Real>(&self, theta: S) -> ExtPoint<S> {
        if theta.abs() >= S::PI() {
            ExtPoint::Infinity
        } else {
            ExtPoint::Finite((theta / S::lit(2.0)).tan())
        }
    }

    /// The compactified map in the angle chart.
    pub fn circle_map<S: Real>(&self, theta: S) -> S {
        self.angle(self.map(self.point(theta)))
    }

    /// Preimage of the compact interval `[a, b]`, again a compact interval.
    pub fn preimage_interval<S: Real>(&self, a: S, b: S) -> (S, S) {
        (a / S::lit(2.0), b / S::lit(2.0))
    }

    /// Fixed points of the compactified map.
    pub fn fixed_points<S: Real>(&self) -> [ExtPoint<S>; 2] {
        [ExtPoint::Finite(S::zero()), ExtPoint::Infinity]
    }
}

/// A potential `phi(x) = g(|x|)` on the line with `g` monotone and a limit at infinity.
#[derive(Clone)]
pub struct RadialPotential<S> {
    name: String,
    profile: Arc<dyn Fn(S) -> S + Send + Sync>,
    at_infinity: S,
}

impl<S: Real> fmt::Debug for RadialPotential<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialPotential")
            .field("name", &self.name)
            .field("at_zero", &self.at_zero())
            .field("at_infinity", &self.at_infinity)
            .finish()
    }
}

impl<S: Real> RadialPotential<S> {
    /// `g` must be monotone on `[0, inf)` with `g(r) -> at_infinity`.
    pub fn new(
        name: impl Into<String>,
        at_infinity: S,
        profile: impl Fn(S) -> S + Send + Sync + 'static,
    ) -> Result<Self> {
        let p = Self { name: name.into(), profile: Arc::new(profile), at_infinity };
        p.check()?;
        Ok(p)
    }

    /// `arccot(x)` for `x < 0` and `arccot(-x)` for `x >= 0`, i.e. `pi/2 + atan|x|`, with value `pi` at infinity.
    pub fn arccot() -> Self {
        Self {
            name: "arccot".into(),
            profile: Arc::new(|r: S| S::FRAC_PI_2() + r.atan()),
            at_infinity: S::PI(),
        }
    }

    pub fn constant(c: S) -> Self {
        Self { name: format!("constant {c}"), profile: Arc::new(move |_| c), at_infinity: c }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    fn check(&self) -> Result<()> {
        let samples: Vec<S> = (0..64).map(|i| self.radial(S::lit(2f64.powi(i - 32)))).collect();
        let all = std::iter::once(self.at_zero()).chain(samples).chain(std::iter::once(self.at_infinity));
        let vals: Vec<S> = all.collect();
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidPotential(format!("{} is not finite", self.name)));
        }
        let up = vals.windows(2).all(|w| w[1] >= w[0] - S::epsilon());
        let down = vals.windows(2).all(|w| w[1] <= w[0] + S::epsilon());
        if !(up || down) {
            return Err(Error::InvalidPotential(format!("{} is not monotone in |x|", self.name)));
        }
        Ok(())
    }

    pub fn radial(&self, r: S) -> S {
        (self.profile)(r)
    }

    pub fn at_zero(&self) -> S {
        self.radial(S::zero())
    }

    pub fn at_infinity(&self) -> S {
        self.at_infinity
    }

    pub fn value(&self, p: ExtPoint<S>) -> S {
        match p {
            ExtPoint::Finite(x) => self.radial(x.abs()),
            ExtPoint::Infinity => self.at_infinity,
        }
    }

    /// The same potential in the angle chart.
    pub fn on_circle(&self, theta: S) -> S {
        self.value(LineDoublingModel.point(theta))
    }

    /// `sup phi` and `inf phi` over the compactification.
    pub fn range(&self) -> (S, S) {
        let (a, b) = (self.at_zero(), self.at_infinity);
        (a.min(b), a.max(b))
    }
}
