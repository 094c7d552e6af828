//! Smooth cutoff functions.
//!
//! `step` rises from 0 on `r <= 1` to 1 on `r >= 2` and is `C^∞`, built from
//! `g(x) = exp(-1/x)`. It supplies the tail switches of the boundary-layer
//! functions and, via `blend`, the inner/outer matching weight.

/// `(value, first derivative, second derivative)`.
pub type Jet = (f64, f64, f64);

fn g(x: f64) -> Jet {
    if x <= 0.0 {
        return (0.0, 0.0, 0.0);
    }
    let v = (-1.0 / x).exp();
    let x2 = x * x;
    (v, v / x2, v * (1.0 / (x2 * x2) - 2.0 / (x2 * x)))
}

/// Smooth monotone step: 0 for `r <= 1`, 1 for `r >= 2`.
pub fn step(r: f64) -> Jet {
    if r <= 1.0 {
        return (0.0, 0.0, 0.0);
    }
    if r >= 2.0 {
        return (1.0, 0.0, 0.0);
    }
    let (a, a1, a2) = g(r - 1.0);
    // d/dr g(2 - r) = -g'(2 - r), second derivative keeps its sign.
    let (b, b1, b2) = g(2.0 - r);
    let (b1, b2) = (-b1, b2);
    let sum = a + b;
    let sum1 = a1 + b1;
    let num = a1 * b - a * b1;
    let num1 = a2 * b - a * b2;
    let v = a / sum;
    let d1 = num / (sum * sum);
    let d2 = (num1 * sum - 2.0 * num * sum1) / (sum * sum * sum);
    (v, d1, d2)
}

/// Even blending weight: 1 for `|r| <= 1`, 0 for `|r| >= 2`.
pub fn blend(r: f64) -> Jet {
    let (v, d1, d2) = step(r.abs());
    let sign = if r < 0.0 { -1.0 } else { 1.0 };
    (1.0 - v, -sign * d1, -d2)
}
