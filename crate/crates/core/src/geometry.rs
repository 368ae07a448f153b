//! Node placement and distance-based path loss.

use serde::{Deserialize, Serialize};

use crate::error::{check_finite, Error, Result};
use crate::fading::KappaMuParams;

/// Source at the origin, destination at `(sd_distance, 0)`, IRS (or relay)
/// at `(d, height)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeometryConfig {
    pub sd_distance: f64,
    pub d: f64,
    pub height: f64,
    pub path_loss_exponent: f64,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        GeometryConfig {
            sd_distance: 90.0,
            d: 30.0,
            height: 10.0,
            path_loss_exponent: 4.0,
        }
    }
}

/// Small-scale fading shape of one link, before path loss is applied.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FadingShape {
    pub kappa: f64,
    pub mu: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkDistances {
    pub sd: f64,
    pub sr: f64,
    pub rd: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Links {
    pub sd: KappaMuParams,
    pub sr: KappaMuParams,
    pub rd: KappaMuParams,
}

impl GeometryConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("sd_distance", self.sd_distance),
            ("d", self.d),
            ("height", self.height),
            ("path_loss_exponent", self.path_loss_exponent),
        ] {
            check_finite("GeometryConfig", name, v)?;
        }
        if self.sd_distance <= 0.0 || !(0.0..=self.sd_distance).contains(&self.d) {
            return Err(Error::domain(
                "GeometryConfig",
                format!("d = {} must lie in [0, {}]", self.d, self.sd_distance),
            ));
        }
        if self.height <= 0.0 || self.path_loss_exponent <= 0.0 {
            return Err(Error::domain("GeometryConfig", "height and path loss exponent must be positive"));
        }
        Ok(())
    }

    pub fn distances(&self) -> LinkDistances {
        LinkDistances {
            sd: self.sd_distance,
            sr: self.d.hypot(self.height),
            rd: (self.sd_distance - self.d).hypot(self.height),
        }
    }

    /// Mean power `distance^-beta` of a link.
    pub fn power(&self, distance: f64) -> f64 {
        distance.powf(-self.path_loss_exponent)
    }
}

/// Fading laws of the three links with powers set by path loss.
pub fn derive_links(g: &GeometryConfig, sd: FadingShape, sr: FadingShape, rd: FadingShape) -> Result<Links> {
    g.validate()?;
    let dist = g.distances();
    Ok(Links {
        sd: KappaMuParams::new(sd.kappa, sd.mu, g.power(dist.sd))?,
        sr: KappaMuParams::new(sr.kappa, sr.mu, g.power(dist.sr))?,
        rd: KappaMuParams::new(rd.kappa, rd.mu, g.power(dist.rd))?,
    })
}
