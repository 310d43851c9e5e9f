/// `1 / (1 + exp(-scale·x))`, evaluated without overflow for either sign.
pub fn sigmoid(x: f64, scale: f64) -> f64 {
    let z = scale * x;
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Derivative of [`sigmoid`] with respect to `x`.
pub(crate) fn sigmoid_grad(x: f64, scale: f64) -> f64 {
    let s = sigmoid(x, scale);
    scale * s * (1.0 - s)
}
