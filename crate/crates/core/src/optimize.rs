//! One-dimensional search helpers: golden-section minimization and bisection.

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section search for a minimum of `f` on `[a, b]`, stopping when the
/// bracket is narrower than `tol`. Returns `(x_min, f(x_min))`.
pub fn golden_section_min<F, E>(mut f: F, mut a: f64, mut b: f64, tol: f64) -> Result<(f64, f64), E>
where
    F: FnMut(f64) -> Result<f64, E>,
{
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d)?;
        }
    }
    Ok(if fc < fd { (c, fc) } else { (d, fd) })
}

/// Bisection for an increasing crossing: `f(lo) < 0 <= f(hi)` is assumed.
/// Stops when `hi - lo <= rel_tol * |lo|` (or hits the floating-point floor).
pub fn bisect_increasing<F, E>(mut f: F, mut lo: f64, mut hi: f64, rel_tol: f64) -> Result<f64, E>
where
    F: FnMut(f64) -> Result<f64, E>,
{
    for _ in 0..200 {
        if hi - lo <= rel_tol * lo.abs().max(f64::MIN_POSITIVE) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::convert::Infallible;

    #[test]
    fn golden_finds_parabola_vertex() {
        let (x, fx) = golden_section_min(|x| Ok::<_, Infallible>((x - 0.3).powi(2) + 1.0), 0.0, 1.0, 1e-9).unwrap();
        // f is flat to rounding within ~√ε of the vertex
        assert!((x - 0.3).abs() < 1e-7);
        assert!((fx - 1.0).abs() < 1e-15);
    }

    #[test]
    fn golden_at_bracket_edge() {
        let (x, _) = golden_section_min(Ok::<_, Infallible>, 0.0, 1.0, 1e-9).unwrap();
        assert!(x < 1e-8);
    }

    #[test]
    fn bisection_hits_sqrt2() {
        let r = bisect_increasing(|x| Ok::<_, Infallible>(x * x - 2.0), 1.0, 2.0, 1e-12).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-11);
    }

    #[test]
    fn errors_propagate() {
        let r = golden_section_min(|_| Err::<f64, _>("boom"), 0.0, 1.0, 1e-3);
        assert_eq!(r, Err("boom"));
    }
}
