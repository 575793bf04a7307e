//! Gradient-based edge-preservation score Q^AB/F.
//!
//! For each source `A` and the fused image `F`, Sobel strength `g` and
//! orientation `α` give a relative strength `G = min(g_A, g_F) / max(g_A, g_F)`
//! and an orientation agreement `A = 1 - d / (π/2)`, where `d` is the axial
//! angle difference. Each passes through a sigmoid
//! `Γ / (1 + e^{κ(x - σ)})`; their product `Q^AF ∈ [0, 1]` is the per-pixel
//! preservation. The score is the `g^L`-weighted mean of `Q^AF` and `Q^BF`:
//!
//! ```text
//!            Σ Q^AF·W^A + Q^BF·W^B
//! Q^AB/F = -------------------------
//!              Σ W^A + W^B
//! ```

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::image::{ensure_same_dims, ImageU8};

/// Sigmoid parameters and the weight exponent.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QabfConstants {
    pub gamma_g: f64,
    pub kappa_g: f64,
    pub sigma_g: f64,
    pub gamma_a: f64,
    pub kappa_a: f64,
    pub sigma_a: f64,
    /// Exponent `L` in `W = g^L`.
    pub l: f64,
}

impl Default for QabfConstants {
    fn default() -> Self {
        QabfConstants {
            gamma_g: 0.9994,
            kappa_g: -15.0,
            sigma_g: 0.5,
            gamma_a: 0.9879,
            kappa_a: -22.0,
            sigma_a: 0.8,
            l: 1.0,
        }
    }
}

impl QabfConstants {
    pub fn validate(&self) -> Result<()> {
        let all = [
            self.gamma_g,
            self.kappa_g,
            self.sigma_g,
            self.gamma_a,
            self.kappa_a,
            self.sigma_a,
            self.l,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidConfig(
                "Q^AB/F constants must be finite".into(),
            ));
        }
        if !(self.gamma_g > 0.0 && self.gamma_g <= 1.0 && self.gamma_a > 0.0 && self.gamma_a <= 1.0)
        {
            return Err(Error::InvalidConfig(
                "Q^AB/F gammas must lie in (0, 1]".into(),
            ));
        }
        if self.l < 0.0 {
            return Err(Error::InvalidConfig(
                "Q^AB/F weight exponent must be non-negative".into(),
            ));
        }
        Ok(())
    }

    #[inline]
    fn strength_factor(&self, g: f64) -> f64 {
        self.gamma_g / (1.0 + (self.kappa_g * (g - self.sigma_g)).exp())
    }

    #[inline]
    fn orientation_factor(&self, a: f64) -> f64 {
        self.gamma_a / (1.0 + (self.kappa_a * (a - self.sigma_a)).exp())
    }

    /// Per-pixel preservation when strength and orientation both match exactly.
    pub fn q_max(&self) -> f64 {
        self.strength_factor(1.0) * self.orientation_factor(1.0)
    }
}

/// Sobel gradient strength and orientation per pixel.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeMap {
    width: usize,
    height: usize,
    /// `sqrt(s_x² + s_y²)`.
    pub strength: Vec<f64>,
    /// `atan(s_y / s_x)` in `(-π/2, π/2]`; `π/2` where `s_x = 0`.
    pub orientation: Vec<f64>,
}

impl EdgeMap {
    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }
}

/// Per-pixel reference for [`sobel_edges`]: the two Sobel responses `(s_x, s_y)`. `s_x` responds to
/// intensity change along a row, `s_y` along a column.
#[cfg(test)]
fn sobel_at(img: &ImageU8, r: usize, c: usize) -> (f64, f64) {
    let (w, h) = img.dims();
    let p = crate::image::BorderPolicy::Replicate;
    let (r, c) = (r as isize, c as isize);
    let at = |dr: isize, dc: isize| -> f64 {
        f64::from(img.get(p.resolve(r + dr, h), p.resolve(c + dc, w)))
    };
    let sx = (at(-1, 1) + 2.0 * at(0, 1) + at(1, 1)) - (at(-1, -1) + 2.0 * at(0, -1) + at(1, -1));
    let sy = (at(1, -1) + 2.0 * at(1, 0) + at(1, 1)) - (at(-1, -1) + 2.0 * at(-1, 0) + at(-1, 1));
    (sx, sy)
}

#[inline]
fn orientation(sx: f64, sy: f64) -> f64 {
    if sx == 0.0 {
        FRAC_PI_2
    } else {
        (sy / sx).atan()
    }
}

pub fn sobel_edges(img: &ImageU8) -> EdgeMap {
    let (width, height) = img.dims();
    let mut strength = Vec::with_capacity(img.len());
    let mut orient = Vec::with_capacity(img.len());
    let src = img.samples();
    for r in 0..height {
        let up = r.saturating_sub(1) * width;
        let mid = r * width;
        let down = (r + 1).min(height - 1) * width;
        for c in 0..width {
            let l = c.saturating_sub(1);
            let rt = (c + 1).min(width - 1);
            let v = |row: usize, col: usize| f64::from(src[row + col]);
            let sx = (v(up, rt) + 2.0 * v(mid, rt) + v(down, rt))
                - (v(up, l) + 2.0 * v(mid, l) + v(down, l));
            let sy = (v(down, l) + 2.0 * v(down, c) + v(down, rt))
                - (v(up, l) + 2.0 * v(up, c) + v(up, rt));
            strength.push(sx.hypot(sy));
            orient.push(orientation(sx, sy));
        }
    }
    EdgeMap {
        width,
        height,
        strength,
        orientation: orient,
    }
}

/// Per-pixel preservation of source edges in the fused image.
fn preservation(k: &QabfConstants, g_src: f64, a_src: f64, g_f: f64, a_f: f64) -> f64 {
    if g_src == 0.0 {
        return 0.0;
    }
    let rel_strength = g_src.min(g_f) / g_src.max(g_f);
    let mut d = (a_src - a_f).abs();
    d = d.min(PI - d).clamp(0.0, FRAC_PI_2);
    let agreement = 1.0 - d / FRAC_PI_2;
    k.strength_factor(rel_strength) * k.orientation_factor(agreement)
}

/// Result of [`qabf`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QabfScore {
    pub value: f64,
    /// Both sources have no gradient anywhere, so the weights sum to zero
    /// and `value` is reported as 0.
    pub degenerate: bool,
}

pub fn qabf(a: &ImageU8, b: &ImageU8, f: &ImageU8, k: &QabfConstants) -> Result<QabfScore> {
    ensure_same_dims(a.dims(), b.dims())?;
    ensure_same_dims(a.dims(), f.dims())?;
    k.validate()?;
    let ea = sobel_edges(a);
    let eb = sobel_edges(b);
    let ef = sobel_edges(f);

    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..a.len() {
        let (gf, af) = (ef.strength[i], ef.orientation[i]);
        let (ga, gb) = (ea.strength[i], eb.strength[i]);
        let wa = ga.powf(k.l);
        let wb = gb.powf(k.l);
        num += preservation(k, ga, ea.orientation[i], gf, af) * wa
            + preservation(k, gb, eb.orientation[i], gf, af) * wb;
        den += wa + wb;
    }
    if den == 0.0 {
        return Ok(QabfScore {
            value: 0.0,
            degenerate: true,
        });
    }
    Ok(QabfScore {
        value: num / den,
        degenerate: false,
    })
}
