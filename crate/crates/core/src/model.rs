//! The bivariate Rayleigh / exponential model.
//!
//! Two zero-mean complex Gaussians `X = X_I + jX_Q`, `Y = Y_I + jY_Q` with the
//! circular 4x4 covariance built by [`build_covariance`] give Rayleigh
//! envelopes `V = |X|`, `Z = |Y|` and exponential powers `U = V²`, `W = Z²`.
//! The joint laws depend on the Gaussian-layer correlations only through
//! `r = ρ_c² + ρ_s²`, which is also the Pearson correlation of `(U, W)`.

use crate::linalg::{self, Matrix};
use crate::math::{cos, ln, sin, sqrt, PI};
use crate::specfun::{bessel_i0_log, ellip_e, ellip_k, Modulus};
use crate::{Error, Result};

/// `(r, σ²_X, σ²_Y)` with `0 <= r <= 1` and positive variances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    r: f64,
    sigma2_x: f64,
    sigma2_y: f64,
}

impl ModelParams {
    pub fn new(r: f64, sigma2_x: f64, sigma2_y: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&r) {
            return Err(Error::InvalidParams("r must lie in [0, 1]"));
        }
        if !(sigma2_x > 0.0 && sigma2_x.is_finite()) {
            return Err(Error::InvalidParams("sigma2_x must be positive and finite"));
        }
        if !(sigma2_y > 0.0 && sigma2_y.is_finite()) {
            return Err(Error::InvalidParams("sigma2_y must be positive and finite"));
        }
        Ok(Self {
            r,
            sigma2_x,
            sigma2_y,
        })
    }

    /// Unit variances.
    pub fn unit(r: f64) -> Result<Self> {
        Self::new(r, 1.0, 1.0)
    }

    #[inline]
    pub fn r(&self) -> f64 {
        self.r
    }

    /// Gaussian-layer correlation magnitude `ρ = √r`.
    #[inline]
    pub fn rho(&self) -> f64 {
        sqrt(self.r)
    }

    #[inline]
    pub fn sigma2_x(&self) -> f64 {
        self.sigma2_x
    }

    #[inline]
    pub fn sigma2_y(&self) -> f64 {
        self.sigma2_y
    }

    /// Same variances, different `r`.
    pub fn with_r(&self, r: f64) -> Result<Self> {
        Self::new(r, self.sigma2_x, self.sigma2_y)
    }
}

/// Covariance of `(X_I, X_Q, Y_I, Y_Q)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussCovariance {
    matrix: Matrix<4>,
    sigma_x: f64,
    sigma_y: f64,
    rho_c: f64,
    rho_s: f64,
}

impl GaussCovariance {
    pub fn matrix(&self) -> &[[f64; 4]; 4] {
        &self.matrix
    }

    pub fn rho_c(&self) -> f64 {
        self.rho_c
    }

    pub fn rho_s(&self) -> f64 {
        self.rho_s
    }

    pub fn sigma_x(&self) -> f64 {
        self.sigma_x
    }

    pub fn sigma_y(&self) -> f64 {
        self.sigma_y
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> [f64; 4] {
        linalg::symmetric_eigenvalues(self.matrix)
    }

    /// Lower-triangular factor `L` with `L Lᵀ = C`. Valid (rank-deficient)
    /// at `r = 1`.
    pub fn cholesky(&self) -> Result<[[f64; 4]; 4]> {
        linalg::cholesky(&self.matrix).ok_or(Error::Internal("covariance is not positive semidefinite"))
    }
}

/// Builds the circular covariance with `ρ_c = √r cos(angle)`,
/// `ρ_s = √r sin(angle)`. The envelope laws do not depend on `angle`.
pub fn build_covariance(p: &ModelParams, angle: f64) -> GaussCovariance {
    let rho = p.rho();
    let (rho_c, rho_s) = if angle == 0.0 {
        (rho, 0.0)
    } else {
        (rho * cos(angle), rho * sin(angle))
    };
    let sx2 = p.sigma2_x;
    let sy2 = p.sigma2_y;
    let sxy = sqrt(sx2 * sy2);
    let c = sxy * rho_c;
    let s = sxy * rho_s;
    let matrix = [
        [sx2, 0.0, c, s],
        [0.0, sx2, -s, c],
        [c, -s, sy2, 0.0],
        [s, c, 0.0, sy2],
    ];
    GaussCovariance {
        matrix,
        sigma_x: sqrt(sx2),
        sigma_y: sqrt(sy2),
        rho_c,
        rho_s,
    }
}

/// First and second joint moments `E{A^κ B^ν}`, `κ + ν ∈ {1, 2}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentSet {
    pub m10: f64,
    pub m01: f64,
    pub m20: f64,
    pub m02: f64,
    pub m11: f64,
}

impl MomentSet {
    pub fn var_a(&self) -> f64 {
        self.m20 - self.m10 * self.m10
    }

    pub fn var_b(&self) -> f64 {
        self.m02 - self.m01 * self.m01
    }

    pub fn cov(&self) -> f64 {
        self.m11 - self.m10 * self.m01
    }

    /// Pearson correlation `cov / √(var_a var_b)` without degeneracy checks.
    pub fn pearson(&self) -> f64 {
        self.cov() / sqrt(self.var_a() * self.var_b())
    }
}

/// `2E(ρ) − (1 − ρ²)K(ρ)` at `ρ = √r`; finite on all of `[0, 1]`.
fn rayleigh_cross_factor(r: f64) -> f64 {
    if r >= 1.0 {
        return 2.0;
    }
    let k = Modulus::new(sqrt(r)).expect("sqrt of r in [0,1) is a valid modulus");
    let big_k = ellip_k(k).expect("K is finite below modulus 1");
    2.0 * ellip_e(k) - (1.0 - r) * big_k
}

pub fn pop_moments_rayleigh(p: &ModelParams) -> MomentSet {
    let sx = sqrt(p.sigma2_x);
    let sy = sqrt(p.sigma2_y);
    let half_pi_root = sqrt(PI / 2.0);
    MomentSet {
        m10: sx * half_pi_root,
        m01: sy * half_pi_root,
        m20: 2.0 * p.sigma2_x,
        m02: 2.0 * p.sigma2_y,
        m11: sx * sy * rayleigh_cross_factor(p.r),
    }
}

pub fn pop_moments_exp(p: &ModelParams) -> MomentSet {
    MomentSet {
        m10: 2.0 * p.sigma2_x,
        m01: 2.0 * p.sigma2_y,
        m20: 8.0 * p.sigma2_x * p.sigma2_x,
        m02: 8.0 * p.sigma2_y * p.sigma2_y,
        m11: 4.0 * (p.r + 1.0) * p.sigma2_x * p.sigma2_y,
    }
}

/// `ln p_UW(u, w)`, computed in log space throughout so the Bessel term
/// cannot overflow when `r` is close to one.
pub fn logpdf_exp(p: &ModelParams, u: f64, w: f64) -> Result<f64> {
    if !(u >= 0.0) || !(w >= 0.0) {
        return Err(Error::Domain {
            what: "logpdf_exp",
            value: if u >= 0.0 { w } else { u },
        });
    }
    if p.r >= 1.0 {
        return Err(Error::DegenerateDistribution);
    }
    let one_minus_r = 1.0 - p.r;
    let ut = u / p.sigma2_x;
    let wt = w / p.sigma2_y;
    let zeta = sqrt(p.r * ut * wt) / one_minus_r;
    Ok(-ln(4.0 * p.sigma2_x * p.sigma2_y * one_minus_r) - (ut + wt) / (2.0 * one_minus_r)
        + bessel_i0_log(zeta)?)
}

/// `ln p_VZ(v, z)`; `-inf` on the axes where the density vanishes.
pub fn logpdf_rayleigh(p: &ModelParams, v: f64, z: f64) -> Result<f64> {
    if !(v >= 0.0) || !(z >= 0.0) {
        return Err(Error::Domain {
            what: "logpdf_rayleigh",
            value: if v >= 0.0 { z } else { v },
        });
    }
    if p.r >= 1.0 {
        return Err(Error::DegenerateDistribution);
    }
    let one_minus_r = 1.0 - p.r;
    let sxy = sqrt(p.sigma2_x * p.sigma2_y);
    let zeta = p.rho() * v * z / (sxy * one_minus_r);
    Ok(ln(v * z) - ln(p.sigma2_x * p.sigma2_y * one_minus_r)
        - (v * v / p.sigma2_x + z * z / p.sigma2_y) / (2.0 * one_minus_r)
        + bessel_i0_log(zeta)?)
}

fn check_unit_interval(what: &'static str, r: f64) -> Result<()> {
    if (0.0..=1.0).contains(&r) {
        Ok(())
    } else {
        Err(Error::Domain { what, value: r })
    }
}

/// Population Pearson correlation of the Rayleigh pair as a function of `r`.
pub fn pearson_rayleigh_pop(r: f64) -> Result<f64> {
    check_unit_interval("pearson_rayleigh_pop", r)?;
    Ok((2.0 * rayleigh_cross_factor(r) - PI) / (4.0 - PI))
}

/// Large-sample limit of the squared cosine similarity of Rayleigh samples,
/// `[E(√r) − (1 − r)K(√r)/2]²`.
pub fn cos2_limit(r: f64) -> Result<f64> {
    check_unit_interval("cos2_limit", r)?;
    let half = 0.5 * rayleigh_cross_factor(r);
    Ok(half * half)
}
