//! Fresnel integrals and closed-form clothoid integration.
//!
//! `C(x) = ∫₀ˣ cos(πu²/2) du`, `S(x) = ∫₀ˣ sin(πu²/2) du`.
//! Power series below `SERIES_LIMIT`, complex continued fraction for the
//! complementary error function above it. Both branches are accurate to a few
//! ulps of 0.5 across the real line.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

const SERIES_LIMIT: f64 = 1.5;
const MAX_TERMS: usize = 200;
const EPS: f64 = 1e-17;
const FPMIN: f64 = 1e-300;

/// Returns `(C(x), S(x))`. Odd in `x`.
pub fn fresnel(x: f64) -> (f64, f64) {
    if x == 0.0 {
        return (0.0, 0.0);
    }
    let ax = x.abs();
    let (c, s) = if ax < SERIES_LIMIT {
        series(ax)
    } else {
        continued_fraction(ax)
    };
    if x < 0.0 {
        (-c, -s)
    } else {
        (c, s)
    }
}

fn series(x: f64) -> (f64, f64) {
    // With t = πx²/2, both series share the terms x·tᵏ/(k!·(2k+1)):
    // even k feed C, odd k feed S, each with alternating sign.
    let t = FRAC_PI_2 * x * x;
    let mut c = 0.0;
    let mut s = 0.0;
    let mut fact = x; // x·t^k/k!
    let mut sign_c = 1.0;
    let mut sign_s = 1.0;
    for k in 0..MAX_TERMS {
        let denom = (2 * k + 1) as f64;
        let term = fact / denom;
        if k % 2 == 0 {
            c += sign_c * term;
            sign_c = -sign_c;
        } else {
            s += sign_s * term;
            sign_s = -sign_s;
        }
        if term < EPS * c.abs().max(s.abs()).max(1e-300) && k > 2 {
            break;
        }
        fact *= t / (k + 1) as f64;
    }
    (c, s)
}

fn continued_fraction(x: f64) -> (f64, f64) {
    let pix2 = PI * x * x;
    let one = Complex64::new(1.0, 0.0);
    let mut b = Complex64::new(1.0, -pix2);
    let mut cc = Complex64::new(1.0 / FPMIN, 0.0);
    let mut d = one / b;
    let mut h = d;
    let mut n = -1.0f64;
    for _ in 2..MAX_TERMS {
        n += 2.0;
        let a = -n * (n + 1.0);
        b += Complex64::new(4.0, 0.0);
        d = one / (d * a + b);
        cc = b + cc.inv() * a;
        let del = cc * d;
        h *= del;
        if (del.re - 1.0).abs() + del.im.abs() < 1e-16 {
            break;
        }
    }
    h *= Complex64::new(x, -x);
    let phase = Complex64::new((0.5 * pix2).cos(), (0.5 * pix2).sin());
    let cs = Complex64::new(0.5, 0.5) * (one - phase * h);
    (cs.re, cs.im)
}

/// `(∫₀ˢ cos φ(u) du, ∫₀ˢ sin φ(u) du)` for the quadratic phase
/// `φ(u) = θ₀ + a·u + b·u²`.
pub fn clothoid_integrals(theta0: f64, a: f64, b: f64, s: f64) -> (f64, f64) {
    if s == 0.0 {
        return (0.0, 0.0);
    }
    if b.abs() * s * s < 1e-9 || b.abs() < 1e-7 {
        return gauss_legendre(theta0, a, b, s);
    }
    if b < 0.0 {
        // φ = −(−θ₀ − a·u + |b|·u²): the integral is the complex conjugate.
        let (c, si) = clothoid_integrals(-theta0, -a, -b, s);
        return (c, -si);
    }
    // Complete the square: φ = θ₀ − a²/(4b) + b(u + a/(2b))²,
    // substitute t = (u + a/(2b))·√(2b/π).
    let k = (2.0 * b / PI).sqrt();
    let phi = theta0 - a * a / (4.0 * b);
    let t0 = a / (2.0 * b) * k;
    let t1 = (s + a / (2.0 * b)) * k;
    let (c0, s0) = fresnel(t0);
    let (c1, s1) = fresnel(t1);
    let dc = c1 - c0;
    let ds = s1 - s0;
    let (sp, cp) = phi.sin_cos();
    let scale = 1.0 / k;
    (scale * (cp * dc - sp * ds), scale * (sp * dc + cp * ds))
}

// Nodes and weights of the 10-point Gauss–Legendre rule on [−1, 1].
const GL_NODES: [f64; 5] = [
    0.148_874_338_981_631_2,
    0.433_395_394_129_247_2,
    0.679_409_568_299_024_4,
    0.865_063_366_688_984_5,
    0.973_906_528_517_171_7,
];
const GL_WEIGHTS: [f64; 5] = [
    0.295_524_224_714_752_9,
    0.269_266_719_309_996_4,
    0.219_086_362_515_982,
    0.149_451_349_150_580_6,
    0.066_671_344_308_688_1,
];

/// Composite Gauss–Legendre for nearly-linear phases where the Fresnel
/// difference would cancel catastrophically.
fn gauss_legendre(theta0: f64, a: f64, b: f64, s: f64) -> (f64, f64) {
    let phase_span = a.abs() * s + b.abs() * s * s;
    let panels = ((phase_span / 0.25).ceil() as usize).clamp(1, 100_000);
    let h = s / panels as f64;
    let mut cx = 0.0;
    let mut sx = 0.0;
    for p in 0..panels {
        let mid = (p as f64 + 0.5) * h;
        for (node, w) in GL_NODES.iter().zip(GL_WEIGHTS.iter()) {
            for sign in [-1.0, 1.0] {
                let u = mid + sign * node * 0.5 * h;
                let phi = theta0 + a * u + b * u * u;
                let (sn, cs) = phi.sin_cos();
                cx += w * cs;
                sx += w * sn;
            }
        }
    }
    (cx * 0.5 * h, sx * 0.5 * h)
}
