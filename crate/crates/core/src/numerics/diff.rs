use crate::error::EvalError;
use crate::scalar::Scalar;

/// Central difference with step `eps^(1/3)·max(1, |x|)`.
pub fn numeric_derivative<T, F>(f: F, x: T) -> Result<T, EvalError>
where
    T: Scalar,
    F: Fn(T) -> Result<T, EvalError>,
{
    let h = T::epsilon().cbrt() * T::one().max(x.abs());
    let (xp, xm) = (x + h, x - h);
    let (fp, fm) = (f(xp)?, f(xm)?);
    let d = (fp - fm) / (xp - xm);
    if d.is_finite() {
        Ok(d)
    } else {
        Err(EvalError::NonFinite { x: x.as_f64() })
    }
}
