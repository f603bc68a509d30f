//! Checkerboard pushforward images and CSV dumps of a map.

use std::collections::VecDeque;
use std::io::Write;

use crate::error::{Error, Result};
use crate::grid::{ComplexField, DerivativeMode};
use crate::solution::QCMapSolution;

const LIGHT: [u8; 3] = [235, 235, 225];
const DARK: [u8; 3] = [40, 60, 110];
const BACKGROUND: [u8; 3] = [128, 128, 128];

#[derive(Clone, Debug)]
pub struct Image {
    pub width: usize,
    pub height: usize,
    /// Row-major RGB, top row first.
    pub rgb: Vec<u8>,
}

impl Image {
    pub fn pixel(&self, x: usize, y: usize) -> [u8; 3] {
        let i = 3 * (y * self.width + x);
        [self.rgb[i], self.rgb[i + 1], self.rgb[i + 2]]
    }

    /// Binary `P6` with 8-bit channels.
    pub fn write_ppm<W: Write>(&self, mut w: W) -> Result<()> {
        write!(w, "P6\n{} {}\n255\n", self.width, self.height)?;
        w.write_all(&self.rgb)?;
        Ok(())
    }
}

/// Colors the image of `Φ` by the checkerboard parity of the source cell.
///
/// Each grid sample is splatted to the pixel under `Φ(z)` with the parity of
/// `z` in a `cells × cells` board over the box; uncovered pixels take the
/// color of the nearest splatted pixel within `reach` pixels, where `reach`
/// is twice the largest image-space step between neighbouring samples.
pub fn render_checkerboard(phi: &ComplexField, cells: usize, size: usize) -> Result<Image> {
    if cells == 0 || size < 2 {
        return Err(Error::DomainError("need cells >= 1 and size >= 2".into()));
    }
    phi.ensure_finite()?;
    let spec = *phi.spec();
    let n = spec.n();
    let l = spec.half_width();
    let data = phi.as_slice();
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for c in data {
        x0 = x0.min(c.re);
        x1 = x1.max(c.re);
        y0 = y0.min(c.im);
        y1 = y1.max(c.im);
    }
    let span = (x1 - x0).max(y1 - y0).max(f64::MIN_POSITIVE);
    let (cx, cy) = (0.5 * (x0 + x1), 0.5 * (y0 + y1));
    let scale = (size - 1) as f64 / span;
    let to_px = |re: f64, im: f64| -> (f64, f64) {
        (
            (re - cx) * scale + 0.5 * (size - 1) as f64,
            0.5 * (size - 1) as f64 - (im - cy) * scale,
        )
    };

    let mut owner: Vec<Option<bool>> = vec![None; size * size];
    let mut dist = vec![usize::MAX; size * size];
    let mut queue = VecDeque::new();
    let mut step: f64 = 1.0;
    for k in 0..n {
        for j in 0..n {
            let v = data[spec.index(j, k)];
            let (px, py) = to_px(v.re, v.im);
            if j + 1 < n {
                let w = data[spec.index(j + 1, k)];
                step = step.max((w - v).norm() * scale);
            }
            if k + 1 < n {
                let w = data[spec.index(j, k + 1)];
                step = step.max((w - v).norm() * scale);
            }
            let (x, y) = (px.round() as usize, py.round() as usize);
            let z = spec.point(j, k);
            let a = ((z.re + l) / (2.0 * l) * cells as f64).floor() as i64;
            let b = ((z.im + l) / (2.0 * l) * cells as f64).floor() as i64;
            let i = y * size + x;
            if owner[i].is_none() {
                owner[i] = Some((a + b).rem_euclid(2) == 0);
                dist[i] = 0;
                queue.push_back(i);
            }
        }
    }
    let reach = (2.0 * step).ceil() as usize;
    while let Some(i) = queue.pop_front() {
        if dist[i] >= reach {
            continue;
        }
        let (x, y) = (i % size, i / size);
        let nbrs = [
            (x > 0).then(|| i - 1),
            (x + 1 < size).then(|| i + 1),
            (y > 0).then(|| i - size),
            (y + 1 < size).then(|| i + size),
        ];
        for m in nbrs.into_iter().flatten() {
            if owner[m].is_none() {
                owner[m] = owner[i];
                dist[m] = dist[i] + 1;
                queue.push_back(m);
            }
        }
    }
    let mut rgb = Vec::with_capacity(3 * size * size);
    for o in &owner {
        rgb.extend_from_slice(match o {
            Some(true) => &LIGHT,
            Some(false) => &DARK,
            None => &BACKGROUND,
        });
    }
    Ok(Image {
        width: size,
        height: size,
        rgb,
    })
}

/// `x,y,re,im` rows in storage order.
pub fn write_csv<W: Write>(phi: &ComplexField, mut w: W) -> Result<()> {
    writeln!(w, "x,y,re,im")?;
    let spec = phi.spec();
    for (i, v) in phi.as_slice().iter().enumerate() {
        let z = spec.point_at(i);
        writeln!(w, "{:e},{:e},{:e},{:e}", z.re, z.im, v.re, v.im)?;
    }
    Ok(())
}

#[derive(Clone, Copy, Debug)]
pub struct Orientation {
    pub min_jacobian: f64,
    pub max_jacobian: f64,
    /// Fraction of cells with negative numerical Jacobian.
    pub reversed_fraction: f64,
}

impl Orientation {
    pub fn is_reversing(&self) -> bool {
        self.reversed_fraction > 0.0
    }
}

pub fn orientation(phi: &ComplexField) -> Result<Orientation> {
    let sol = QCMapSolution::from_phi(phi.clone(), DerivativeMode::Central)?;
    let j = sol.jacobian.as_slice();
    let neg = j.iter().filter(|v| **v < 0.0).count();
    Ok(Orientation {
        min_jacobian: sol.jacobian.min(),
        max_jacobian: sol.jacobian.max(),
        reversed_fraction: neg as f64 / j.len() as f64,
    })
}
