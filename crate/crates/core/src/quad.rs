//! Adaptive Gauss-Kronrod (7/15) quadrature on finite and half-infinite intervals.

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
const WG: [f64; 4] =
    [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

#[derive(Debug, Clone, Copy)]
pub struct QuadConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self { abs_tol: 1e-10, rel_tol: 1e-10, max_intervals: 4000 }
    }
}

impl QuadConfig {
    pub fn new(abs_tol: f64, rel_tol: f64) -> Self {
        Self { abs_tol, rel_tol, ..Self::default() }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Quadrature {
    pub value: f64,
    pub error: f64,
    /// Integral of |f|, used to judge cancellation.
    pub magnitude: f64,
}

struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    magnitude: f64,
}

fn kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Piece {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kron = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    let mut mag = WGK[7] * fc.abs();
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        kron += WGK[j] * (f1 + f2);
        mag += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let value = kron * half;
    let mut error = ((kron - gauss) * half).abs();
    let magnitude = mag * half.abs();
    if !value.is_finite() {
        error = f64::INFINITY;
    }
    error = error.max(50.0 * f64::EPSILON * magnitude);
    Piece { a, b, value, error, magnitude }
}

/// Integrates `f` over `[a, b]` adaptively, bisecting the worst interval until
/// the summed error estimate meets `max(abs_tol, rel_tol * |value|)`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, cfg: QuadConfig) -> Result<Quadrature> {
    if a == b {
        return Ok(Quadrature { value: 0.0, error: 0.0, magnitude: 0.0 });
    }
    let mut pieces = vec![kronrod(&f, a, b)];
    loop {
        let value: f64 = pieces.iter().map(|p| p.value).sum();
        let error: f64 = pieces.iter().map(|p| p.error).sum();
        let magnitude: f64 = pieces.iter().map(|p| p.magnitude).sum();
        let target = cfg.abs_tol.max(cfg.rel_tol * value.abs());
        if error <= target {
            return Ok(Quadrature { value, error, magnitude });
        }
        let worst = pieces
            .iter()
            .enumerate()
            .filter(|(_, p)| {
                let mid = 0.5 * (p.a + p.b);
                mid != p.a && mid != p.b
            })
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(i, _)| i);
        let stop = pieces.len() >= cfg.max_intervals || !error.is_finite() && worst.is_none();
        match worst {
            Some(i) if !stop => {
                let p = pieces.swap_remove(i);
                let mid = 0.5 * (p.a + p.b);
                pieces.push(kronrod(&f, p.a, mid));
                pieces.push(kronrod(&f, mid, p.b));
            }
            _ => return Err(Error::Quadrature { tolerance: target, estimate: error }),
        }
    }
}

/// Integrates over `[a, inf)` through `x = a + u / (1 - u)`.
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(f: F, a: f64, cfg: QuadConfig) -> Result<Quadrature> {
    integrate(
        |u: f64| {
            if u >= 1.0 {
                return 0.0;
            }
            let w = 1.0 - u;
            let x = a + u / w;
            let v = f(x) / (w * w);
            if v.is_finite() {
                v
            } else {
                0.0
            }
        },
        0.0,
        1.0,
        cfg,
    )
}

/// Integrates over `[0, b]` an integrand behaving like `x^power` at the origin
/// (`power > -1`), after the substitution `x = u^(1/(1+power))`.
pub fn integrate_power_singular<F: Fn(f64) -> f64>(f: F, power: f64, b: f64, cfg: QuadConfig) -> Result<Quadrature> {
    if power >= 0.0 {
        return integrate(f, 0.0, b, cfg);
    }
    let m = 1.0 / (1.0 + power);
    integrate(
        |u: f64| {
            if u == 0.0 {
                return 0.0;
            }
            let x = u.powf(m);
            f(x) * m * u.powf(m - 1.0)
        },
        0.0,
        b.powf(1.0 / m),
        cfg,
    )
}

/// Sums several quadrature results.
pub fn combine(parts: &[Quadrature]) -> Quadrature {
    Quadrature {
        value: parts.iter().map(|p| p.value).sum(),
        error: parts.iter().map(|p| p.error).sum(),
        magnitude: parts.iter().map(|p| p.magnitude).sum(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact() {
        let r = integrate(|x| 3.0 * x * x, 0.0, 2.0, QuadConfig::default()).unwrap();
        assert!((r.value - 8.0).abs() < 1e-13);
    }

    #[test]
    fn oscillatory_and_magnitude() {
        let r = integrate(|x: f64| x.sin(), 0.0, 2.0 * std::f64::consts::PI, QuadConfig::new(1e-12, 0.0)).unwrap();
        assert!(r.value.abs() < 1e-12);
        // |sin| has a kink, so the magnitude is only a rough estimate.
        assert!((r.magnitude - 4.0).abs() < 0.4);
    }

    #[test]
    fn half_line() {
        let r = integrate_to_infinity(|x: f64| (-x).exp(), 0.0, QuadConfig::new(1e-12, 1e-12)).unwrap();
        assert!((r.value - 1.0).abs() < 1e-11);
    }

    #[test]
    fn endpoint_singularity() {
        let r = integrate_power_singular(|x: f64| x.powf(-0.7), -0.7, 1.0, QuadConfig::new(1e-12, 1e-12)).unwrap();
        assert!((r.value - 1.0 / 0.3).abs() < 1e-10);
    }

    #[test]
    fn reports_failure() {
        let cfg = QuadConfig { abs_tol: 1e-14, rel_tol: 0.0, max_intervals: 3 };
        assert!(integrate(|x: f64| (50.0 * x).sin(), 0.0, 10.0, cfg).is_err());
    }
}
