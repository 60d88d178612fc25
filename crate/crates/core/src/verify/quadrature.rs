//! Globally adaptive Gauss–Kronrod (7/15) quadrature with endpoint substitutions.

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Gauss weights for the odd-indexed Kronrod nodes and the centre.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const MAX_INTERVALS: usize = 4000;

#[derive(Debug, Clone, Copy)]
struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Piece {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(centre);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(centre - dx) + f(centre + dx);
        kron += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    Piece { a, b, value: kron * half, error: ((kron - gauss) * half).abs() }
}

/// Integrate `f` over the finite interval `[a, b]` to absolute tolerance `tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    if !(a.is_finite() && b.is_finite()) || b < a {
        return Err(Error::Oracle(format!("bad integration interval [{a}, {b}]")));
    }
    if a == b {
        return Ok(0.0);
    }
    let mut pieces = vec![kronrod(&f, a, b)];
    loop {
        let (value, error) = pieces.iter().fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error));
        if !value.is_finite() {
            return Err(Error::Oracle(format!("non-finite integrand on [{a}, {b}]")));
        }
        if error <= tol {
            return Ok(value);
        }
        if pieces.len() >= MAX_INTERVALS {
            return Err(Error::Oracle(format!(
                "quadrature on [{a}, {b}] did not converge: error estimate {error:e} above {tol:e}"
            )));
        }
        let worst = pieces
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(i, _)| i)
            .expect("non-empty");
        let p = pieces.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        if mid <= p.a || mid >= p.b {
            return Err(Error::Oracle(format!("quadrature interval collapsed near {mid}")));
        }
        pieces.push(kronrod(&f, p.a, mid));
        pieces.push(kronrod(&f, mid, p.b));
    }
}

/// Power `q` for `x = u^q` near an endpoint factor `x^e`: the mapped integrand behaves like
/// `u^{q(e+1)−1}`, pushed to at least cubic so the Kronrod rule sees a smooth function.
fn substitution_power(exponent: f64) -> f64 {
    if exponent >= 0.0 && exponent.fract() == 0.0 {
        1.0
    } else {
        (4.0 / (exponent + 1.0)).ceil().max(1.0)
    }
}

/// Integrate over `[a, b]` where `f` behaves like `(x−a)^{ea}` near `a` and `(b−x)^{eb}` near `b`
/// (both exponents `> −1`). Each half gets a `u^q` substitution that flattens the singularity.
///
/// `f` receives both `x` and `b − x`, the latter computed without cancellation.
pub fn integrate_endpoint_singular<F: Fn(f64, f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    ea: f64,
    eb: f64,
    tol: f64,
) -> Result<f64> {
    if ea <= -1.0 || eb <= -1.0 {
        return Err(Error::Oracle("endpoint singularity is not integrable".into()));
    }
    let half = 0.5 * (b - a);
    let qa = substitution_power(ea);
    let qb = substitution_power(eb);
    let left = integrate(
        |u: f64| {
            let d = half * u.powf(qa);
            if d == 0.0 {
                return 0.0;
            }
            f(a + d, b - a - d) * half * qa * u.powf(qa - 1.0)
        },
        0.0,
        1.0,
        0.5 * tol,
    )?;
    let right = integrate(
        |u: f64| {
            let d = half * u.powf(qb);
            if d == 0.0 {
                return 0.0;
            }
            f(b - d, d) * half * qb * u.powf(qb - 1.0)
        },
        0.0,
        1.0,
        0.5 * tol,
    )?;
    Ok(left + right)
}

/// Integrate over `(0, ∞)` for `f ~ x^{e0}` at the origin and exponential decay with length scale `scale`.
pub fn integrate_half_line<F: Fn(f64) -> f64>(f: F, e0: f64, scale: f64, tol: f64) -> Result<f64> {
    if e0 <= -1.0 {
        return Err(Error::Oracle("origin singularity is not integrable".into()));
    }
    let q = substitution_power(e0);
    let near = integrate(
        |u: f64| {
            let x = scale * u.powf(q);
            if x == 0.0 {
                return 0.0;
            }
            f(x) * scale * q * u.powf(q - 1.0)
        },
        0.0,
        1.0,
        0.5 * tol,
    )?;
    let far = integrate(
        |t: f64| {
            let s = 1.0 - t;
            let x = scale + scale * t / s;
            let v = f(x);
            if v == 0.0 {
                0.0
            } else {
                v * scale / (s * s)
            }
        },
        0.0,
        1.0,
        0.5 * tol,
    )?;
    Ok(near + far)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn polynomial_is_exact() {
        let v = integrate(|x| x.powi(5) - 3.0 * x * x, -1.0, 2.0, 1e-12).unwrap();
        assert_relative_eq!(v, 64.0 / 6.0 - 1.0 / 6.0 - 9.0, epsilon = 1e-12);
    }

    #[test]
    fn singular_endpoints() {
        // ∫₀¹ x^{-1/2} (1−x)^{-1/2} dx = π
        let v = integrate_endpoint_singular(|x, y| 1.0 / (x * y).sqrt(), 0.0, 1.0, -0.5, -0.5, 1e-10).unwrap();
        assert_relative_eq!(v, std::f64::consts::PI, epsilon = 1e-9);
        // ∫₀¹ x^{-0.9} dx = 10
        let v = integrate_endpoint_singular(|x, _| x.powf(-0.9), 0.0, 1.0, -0.9, 0.0, 1e-10).unwrap();
        assert_relative_eq!(v, 10.0, epsilon = 1e-8);
    }

    #[test]
    fn half_line() {
        // ∫₀^∞ x^{-1/2} e^{-x/3} dx = Γ(1/2) √3
        let v = integrate_half_line(|x| x.powf(-0.5) * (-x / 3.0).exp(), -0.5, 3.0, 1e-10).unwrap();
        assert_relative_eq!(v, std::f64::consts::PI.sqrt() * 3f64.sqrt(), epsilon = 1e-9);
        let v = integrate_half_line(|x| x * x * (-x).exp(), 2.0, 1.0, 1e-10).unwrap();
        assert_relative_eq!(v, 2.0, epsilon = 1e-9);
    }

    #[test]
    fn non_convergence_is_an_error() {
        assert!(matches!(
            integrate(|x| (1.0 / x).sin() / x, 1e-300, 1.0, 1e-14),
            Err(Error::Oracle(_))
        ));
    }
}
