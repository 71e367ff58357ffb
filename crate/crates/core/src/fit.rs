//! Least-squares helpers for scaling fits.

use crate::{Error, Result};

/// Ordinary least-squares line `y = slope·x + intercept`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<(f64, f64)> {
    if xs.len() != ys.len() {
        return Err(Error::domain(
            "linear_fit",
            format!("{} abscissae but {} ordinates", xs.len(), ys.len()),
        ));
    }
    if xs.len() < 2 {
        return Err(Error::InsufficientPoints {
            found: xs.len(),
            required: 2,
        });
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if sxx == 0.0 {
        return Err(Error::domain("linear_fit", "all abscissae coincide"));
    }
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}

/// Slope of `log y` against `log x`; non-positive points are rejected.
pub fn loglog_slope(points: &[(f64, f64)]) -> Result<f64> {
    if let Some(&(x, y)) = points.iter().find(|&&(x, y)| !(x > 0.0 && y > 0.0)) {
        return Err(Error::domain(
            "loglog_slope",
            format!("point ({x}, {y}) is not in the positive quadrant"),
        ));
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = points.iter().map(|&(x, y)| (x.ln(), y.ln())).unzip();
    Ok(linear_fit(&xs, &ys)?.0)
}
