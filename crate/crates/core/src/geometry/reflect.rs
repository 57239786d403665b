use super::vector::{axpy, check_dims, dot, norm, sub, UnitVector, UNIT_TOL};
use crate::base::Point;
use crate::error::{Error, Result};

/// Reflection of `x` through the line spanned by `x0`: `2⟨x0,x⟩x0 − x`.
pub fn reflect_axis(x: &UnitVector, x0: &UnitVector) -> Result<UnitVector> {
    check_dims(x0.dim(), x.dim())?;
    let out = reflect_through_line(x.coords(), &vec![0.0; x.dim()], x0.coords());
    UnitVector::normalize(&out)
}

/// Reflection of `x` through the line `{origin + s·direction}`.
///
/// `direction` must be unit norm.
pub fn reflect_through_line(x: &[f64], origin: &[f64], direction: &[f64]) -> Vec<f64> {
    let rel = sub(x, origin);
    let c = 2.0 * dot(direction, &rel);
    origin.iter().zip(direction).zip(&rel).map(|((o, d), r)| o + c * d - r).collect()
}

/// Reflection through the hyperplane-like set that fixes the orthogonal
/// complement of `span{v1, v2}` and mirrors that plane across the line
/// through `x0`, where `v2` is the unit component of `x0` orthogonal to `v1`.
///
/// `x0` only needs to be nonzero; it is not required to be unit norm.
pub fn reflect_span_plane(x: &Point, x0: &Point, v1: &UnitVector) -> Result<Point> {
    let n = v1.dim();
    check_dims(n, x.dim())?;
    check_dims(n, x0.dim())?;
    let x0c = x0.coords();
    let x0_norm2 = dot(x0c, x0c);
    let v2 = span_partner(x0c, v1)?;
    let xc = x.coords();
    let a1 = dot(xc, v1.coords());
    let a2 = dot(xc, &v2);
    let par: Vec<f64> = v1.coords().iter().zip(&v2).map(|(p, q)| a1 * p + a2 * q).collect();
    let perp = sub(xc, &par);
    let coef = 2.0 * dot(&par, x0c) / x0_norm2;
    let out: Vec<f64> = perp.iter().zip(x0c).zip(&par).map(|((u, z), p)| u + coef * z - p).collect();
    Point::new(out)
}

/// Unit component of `x0` orthogonal to `v1`.
pub fn span_partner(x0: &[f64], v1: &UnitVector) -> Result<Vec<f64>> {
    let along = dot(x0, v1.coords());
    let rest = axpy(x0, -along, v1.coords());
    let r = norm(&rest);
    let scale = norm(x0).max(1.0);
    if r <= UNIT_TOL * scale {
        return Err(Error::Degenerate("x0 is parallel to v1".into()));
    }
    Ok(rest.iter().map(|c| c / r).collect())
}
