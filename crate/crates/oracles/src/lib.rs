//! Reference computations that share no code with the `ingham` crate.
//!
//! Everything here is deliberately naive: adaptive quadrature for integrals that the
//! library evaluates in closed form, brute-force characteristic polynomials for pencil
//! eigenvalues, and direct loops for sums the library assembles from closed forms.

use num_complex::Complex64;

const GK_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const GK_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const GAUSS_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn kronrod_15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * GK_WEIGHTS[7];
    let mut g = fc * GAUSS_WEIGHTS[3];
    for i in 0..7 {
        let x = h * GK_NODES[i];
        let s = f(c - x) + f(c + x);
        k += GK_WEIGHTS[i] * s;
        if i % 2 == 1 {
            g += GAUSS_WEIGHTS[i / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Adaptive Gauss–Kronrod (7/15) quadrature to an absolute tolerance.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    fn recurse<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
        let (val, err) = kronrod_15(f, a, b);
        if err <= tol || depth >= 50 || (b - a).abs() < 1e-14 {
            return val;
        }
        let m = 0.5 * (a + b);
        recurse(f, a, m, 0.5 * tol, depth + 1) + recurse(f, m, b, 0.5 * tol, depth + 1)
    }
    recurse(&f, a, b, tol, 0)
}

/// Same as [`integrate`], splitting `[a, b]` into `pieces` equal panels first.
/// Useful for oscillatory integrands where a single panel would under-sample.
pub fn integrate_panels<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, pieces: usize, tol: f64) -> f64 {
    let w = (b - a) / pieces as f64;
    let mut total = 0.0;
    for i in 0..pieces {
        let lo = a + w * i as f64;
        total += integrate(&f, lo, lo + w, tol / pieces as f64);
    }
    total
}

/// ∫_{-w}^{w} cos²(πx/2w) e^{-itx} dx by quadrature (the imaginary part vanishes by symmetry).
pub fn raised_cosine_transform(half_width: f64, t: f64) -> f64 {
    let w = half_width;
    let pieces = 8 + (t.abs() * w) as usize;
    integrate_panels(
        |x| (std::f64::consts::PI * x / (2.0 * w)).cos().powi(2) * (t * x).cos(),
        -w,
        w,
        pieces,
        1e-14,
    )
}

/// (f*g)(x) = ∫ f(y) g(x-y) dy for functions supported on [-w, w].
pub fn convolve<F, G>(f: F, g: G, half_width: f64, x: f64) -> f64
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    let lo = (-half_width).max(x - half_width);
    let hi = half_width.min(x + half_width);
    if hi <= lo {
        return 0.0;
    }
    integrate_panels(|y| f(y) * g(x - y), lo, hi, 16, 1e-14)
}

/// Direct loop Σ_{j=-J}^{J} e^{iθj}.
pub fn dirichlet_direct(theta: f64, j: usize) -> Complex64 {
    let j = j as i64;
    (-j..=j).map(|k| Complex64::from_polar(1.0, theta * k as f64)).sum()
}

/// Average (1/2J') Σ_{n=-J'}^{J'-1} e^{iθn} by direct summation.
pub fn backward_average(theta: f64, j_prime: usize) -> Complex64 {
    let jp = j_prime as i64;
    let s: Complex64 = (-jp..jp).map(|n| Complex64::from_polar(1.0, theta * n as f64)).sum();
    s / (2.0 * j_prime as f64)
}

/// Root of sin(x)/x = level on (0, π) by Newton iteration from the midpoint.
pub fn sinc_level_root(level: f64) -> f64 {
    let mut x = std::f64::consts::FRAC_PI_2;
    for _ in 0..100 {
        let f = x.sin() / x - level;
        let df = (x * x.cos() - x.sin()) / (x * x);
        let step = f / df;
        x -= step;
        x = x.clamp(1e-6, std::f64::consts::PI - 1e-9);
        if step.abs() < 1e-15 {
            break;
        }
    }
    x
}

fn det(m: &[Vec<Complex64>]) -> Complex64 {
    match m.len() {
        0 => Complex64::new(1.0, 0.0),
        1 => m[0][0],
        2 => m[0][0] * m[1][1] - m[0][1] * m[1][0],
        n => {
            let mut total = Complex64::new(0.0, 0.0);
            for col in 0..n {
                let minor: Vec<Vec<Complex64>> = m[1..]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|(c, _)| *c != col)
                            .map(|(_, v)| *v)
                            .collect()
                    })
                    .collect();
                let sign = if col % 2 == 0 { 1.0 } else { -1.0 };
                total += m[0][col] * det(&minor) * sign;
            }
            total
        }
    }
}

/// det(S - λQ) by cofactor expansion; real for Hermitian S, Q.
pub fn pencil_char_poly(s: &[Vec<Complex64>], q: &[Vec<Complex64>], lambda: f64) -> f64 {
    let m: Vec<Vec<Complex64>> = s
        .iter()
        .zip(q)
        .map(|(rs, rq)| rs.iter().zip(rq).map(|(a, b)| a - b * lambda).collect())
        .collect();
    det(&m).re
}

/// Generalized eigenvalues of a Hermitian-definite pencil of dimension ≤ 3, found by
/// scanning the characteristic polynomial for sign changes and bisecting.
pub fn pencil_eigenvalues_bruteforce(s: &[Vec<Complex64>], q: &[Vec<Complex64>]) -> Vec<f64> {
    let n = s.len();
    assert!(n <= 3 && n >= 1);
    let norm_s: f64 = s.iter().flatten().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    // crude lower bound on λ_min(Q) via its own characteristic polynomial is overkill;
    // scan a generous symmetric range instead.
    let q_min = {
        let ident: Vec<Vec<Complex64>> = (0..n)
            .map(|i| (0..n).map(|j| Complex64::new(if i == j { 1.0 } else { 0.0 }, 0.0)).collect())
            .collect();
        let trace: f64 = (0..n).map(|i| q[i][i].re).sum();
        let mut lo = 0.0;
        let mut hi = trace;
        // smallest root of det(Q - μI) by bisection on [0, trace]
        let sign0 = pencil_char_poly(q, &ident, 0.0).signum();
        let steps = 20_000;
        let mut found = hi;
        for k in 1..=steps {
            let mu = hi * k as f64 / steps as f64;
            if pencil_char_poly(q, &ident, mu).signum() != sign0 {
                found = mu;
                lo = hi * (k - 1) as f64 / steps as f64;
                break;
            }
        }
        hi = found;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if pencil_char_poly(q, &ident, mid).signum() == sign0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo.max(1e-300)
    };
    let bound = 1.5 * norm_s / q_min + 1.0;
    let steps = 200_000;
    let mut roots = Vec::new();
    let mut prev_l = -bound;
    let mut prev_v = pencil_char_poly(s, q, prev_l);
    for k in 1..=steps {
        let l = -bound + 2.0 * bound * k as f64 / steps as f64;
        let v = pencil_char_poly(s, q, l);
        if v == 0.0 {
            roots.push(l);
        } else if prev_v != 0.0 && v.signum() != prev_v.signum() {
            let (mut lo, mut hi) = (prev_l, l);
            let slo = prev_v.signum();
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if pencil_char_poly(s, q, mid).signum() == slo {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
        prev_l = l;
        prev_v = v;
    }
    roots
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadrature_polynomial() {
        let v = integrate(|x| x * x, 0.0, 3.0, 1e-13);
        assert!((v - 9.0).abs() < 1e-12);
    }

    #[test]
    fn transform_at_zero_is_width() {
        assert!((raised_cosine_transform(1.3, 0.0) - 1.3).abs() < 1e-12);
    }

    #[test]
    fn bruteforce_diagonal_pencil() {
        let c = |v: f64| Complex64::new(v, 0.0);
        let s = vec![vec![c(1.0), c(0.0)], vec![c(0.0), c(4.0)]];
        let q = vec![vec![c(1.0), c(0.0)], vec![c(0.0), c(2.0)]];
        let e = pencil_eigenvalues_bruteforce(&s, &q);
        assert_eq!(e.len(), 2);
        assert!((e[0] - 1.0).abs() < 1e-9 && (e[1] - 2.0).abs() < 1e-9);
    }
}
