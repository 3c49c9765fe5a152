//! Independent reference evaluations shared by the integration suites.
#![allow(dead_code)]

/// Composite Simpson rule on `[a, b]` with `n` (even) panels.
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    assert!(n.is_multiple_of(2));
    if a == b {
        return 0.0;
    }
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let x = a + h * i as f64;
        s += if i % 2 == 1 { 4.0 * f(x) } else { 2.0 * f(x) };
    }
    s * h / 3.0
}

/// Testing-fingertip drop as the integral of the tip's vertical velocity.
pub fn oracle_testing_drop(alpha_deg: f64, a1: f64) -> f64 {
    simpson(|t: f64| a1 * t.sin(), 0.0, alpha_deg.to_radians(), 4000)
}

/// Working-fingertip drop as the same integral over `[beta, beta + alpha]`.
pub fn oracle_finger_drop(alpha_deg: f64, beta_deg: f64, d1: f64) -> f64 {
    simpson(
        |t: f64| d1 * t.sin(),
        beta_deg.to_radians(),
        (beta_deg + alpha_deg).to_radians(),
        4000,
    )
}

fn rot(theta: f64) -> [[f64; 2]; 2] {
    let (s, c) = theta.sin_cos();
    [[c, -s], [s, c]]
}

fn apply(m: [[f64; 2]; 2], v: [f64; 2]) -> [f64; 2] {
    [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
}

/// Contact point by rotating the hanging link `(0, -d1)` by beta, then alpha.
pub fn oracle_contact_point(alpha_deg: f64, beta_deg: f64, d1: f64) -> (f64, f64) {
    let v = apply(rot(beta_deg.to_radians()), [0.0, -d1]);
    let v = apply(rot(alpha_deg.to_radians()), v);
    (v[0], v[1])
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    let scale = a.abs().max(b.abs());
    scale == 0.0 || (a - b).abs() <= tol * scale || (a - b).abs() <= 1e-14
}

/// Wilson 95% intervals from an independent statistics package:
/// `(n, k, lo, hi)`.
pub const WILSON_REFERENCE: [(u64, u64, f64, f64); 20] = [
    (1, 0, 0.0, 0.7934506856227627),
    (1, 1, 0.2065493143772374, 1.0),
    (2, 1, 0.09453120573423068, 0.9054687942657693),
    (5, 0, 0.0, 0.43448246478317487),
    (5, 5, 0.5655175352168252, 1.0),
    (7, 3, 0.15821985525146964, 0.7495416354723428),
    (10, 0, 0.0, 0.27753279986288926),
    (10, 1, 0.017876213095072924, 0.40415002679523854),
    (10, 5, 0.23659309051256394, 0.7634069094874361),
    (10, 9, 0.5958499732047614, 0.982123786904927),
    (10, 10, 0.7224672001371106, 1.0),
    (20, 13, 0.43285427668523624, 0.818808175898918),
    (37, 2, 0.014950976833157673, 0.17704654350813104),
    (50, 49, 0.8950455641036218, 0.9964607407283538),
    (100, 50, 0.4038315303659956, 0.5961684696340044),
    (100, 97, 0.9154806357094724, 0.9897454759759611),
    (250, 1, 0.0007064475340650966, 0.022305785565415927),
    (1000, 0, 2.168404344971009e-19, 0.003826758485555125),
    (1000, 914, 0.8949999687497208, 0.9298314752242396),
    (1000, 1000, 0.996173241514445, 1.0),
];
