//! Symmetric, compactly supported kernel densities on `[-1, 1]`.
//!
//! Every kernel here is piecewise polynomial, so its CDF has a closed form and
//! products with a piecewise-linear function can be integrated exactly by
//! Gauss–Legendre quadrature on each polynomial piece.

use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::float::ceil;

/// Kernel density `K` with support `[-1, 1]`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Kernel {
    /// `K(u) = 3/4 (1 - u²)`
    #[default]
    Epanechnikov,
    /// `K(u) = 1 - |u|`
    Triangular,
    /// `K(u) = 15/16 (1 - u²)²`
    Biweight,
}

impl Kernel {
    pub const ALL: [Kernel; 3] = [Kernel::Epanechnikov, Kernel::Triangular, Kernel::Biweight];

    /// Half-width of the support. Always 1.
    pub const SUPPORT_RADIUS: f64 = 1.0;

    pub fn name(self) -> &'static str {
        match self {
            Kernel::Epanechnikov => "epanechnikov",
            Kernel::Triangular => "triangular",
            Kernel::Biweight => "biweight",
        }
    }

    /// Highest polynomial degree of `K` on any of its pieces.
    pub fn poly_degree(self) -> usize {
        match self {
            Kernel::Epanechnikov => 2,
            Kernel::Triangular => 1,
            Kernel::Biweight => 4,
        }
    }

    /// Points strictly inside `(-1, 1)` where the polynomial form of `K` changes.
    pub fn breakpoints(self) -> &'static [f64] {
        match self {
            Kernel::Triangular => &[0.0],
            Kernel::Epanechnikov | Kernel::Biweight => &[],
        }
    }

    /// `K(u)`; zero outside `[-1, 1]`.
    pub fn eval(self, u: f64) -> f64 {
        if !(-1.0..=1.0).contains(&u) {
            return 0.0;
        }
        match self {
            Kernel::Epanechnikov => 0.75 * (1.0 - u * u),
            Kernel::Triangular => 1.0 - if u < 0.0 { -u } else { u },
            Kernel::Biweight => {
                let s = 1.0 - u * u;
                0.9375 * s * s
            }
        }
    }

    /// Scaled kernel `K_h(x) = K(x / h) / h`.
    #[inline]
    pub fn eval_scaled(self, x: f64, h: f64) -> f64 {
        self.eval(x / h) / h
    }

    /// `F(u) = ∫_{-1}^{u} K(v) dv`, clamped to `[0, 1]`.
    pub fn cdf(self, u: f64) -> f64 {
        if u <= -1.0 {
            return 0.0;
        }
        if u >= 1.0 {
            return 1.0;
        }
        let f = match self {
            Kernel::Epanechnikov => 0.5 + 0.75 * (u - u * u * u / 3.0),
            Kernel::Triangular => {
                if u < 0.0 {
                    0.5 * (1.0 + u) * (1.0 + u)
                } else {
                    1.0 - 0.5 * (1.0 - u) * (1.0 - u)
                }
            }
            Kernel::Biweight => {
                let u2 = u * u;
                0.5 + 0.9375 * u * (1.0 - 2.0 * u2 / 3.0 + u2 * u2 / 5.0)
            }
        };
        f.clamp(0.0, 1.0)
    }

    /// Second moment `∫ u² K(u) du`.
    pub fn second_moment(self) -> f64 {
        match self {
            Kernel::Epanechnikov => 0.2,
            Kernel::Triangular => 1.0 / 6.0,
            Kernel::Biweight => 1.0 / 7.0,
        }
    }

    /// Mass of `K_h(t - ·)` falling inside `[0, horizon]`:
    /// `F(t/h) - F((t - horizon)/h)`.
    ///
    /// Equal to 1 whenever `h <= min(t, horizon - t)`.
    pub fn boundary_norm(self, t: f64, h: f64, horizon: f64) -> Result<f64> {
        if !(h > 0.0) || !h.is_finite() {
            return Err(Error::InvalidBandwidth(h));
        }
        if !(0.0..=horizon).contains(&t) {
            return Err(Error::Domain { t, horizon });
        }
        Ok(self.cdf(t / h) - self.cdf((t - horizon) / h))
    }

    /// Gauss–Legendre order exact for `K` times a linear function.
    pub(crate) fn quadrature_order(self) -> usize {
        ceil((self.poly_degree() as f64 + 2.0) / 2.0) as usize
    }
}

impl fmt::Display for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Kernel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "epanechnikov" => Ok(Kernel::Epanechnikov),
            "triangular" => Ok(Kernel::Triangular),
            "biweight" => Ok(Kernel::Biweight),
            other => Err(Error::InvalidArgument(alloc::format!(
                "unknown kernel '{other}' (expected epanechnikov, triangular or biweight)"
            ))),
        }
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`, orders 1 through 4.
pub(crate) fn gauss_legendre(order: usize) -> (&'static [f64], &'static [f64]) {
    const N1: [f64; 1] = [0.0];
    const W1: [f64; 1] = [2.0];
    // ±1/√3
    const N2: [f64; 2] = [-0.577_350_269_189_625_8, 0.577_350_269_189_625_8];
    const W2: [f64; 2] = [1.0, 1.0];
    // ±√(3/5), 0
    const N3: [f64; 3] = [-0.774_596_669_241_483_4, 0.0, 0.774_596_669_241_483_4];
    const W3: [f64; 3] = [5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0];
    const N4: [f64; 4] = [
        -0.861_136_311_594_052_6,
        -0.339_981_043_584_856_3,
        0.339_981_043_584_856_3,
        0.861_136_311_594_052_6,
    ];
    const W4: [f64; 4] = [
        0.347_854_845_137_453_85,
        0.652_145_154_862_546_1,
        0.652_145_154_862_546_1,
        0.347_854_845_137_453_85,
    ];
    match order {
        0 | 1 => (&N1, &W1),
        2 => (&N2, &W2),
        3 => (&N3, &W3),
        _ => (&N4, &W4),
    }
}
