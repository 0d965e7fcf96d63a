//! Quadrature rules shared by the special functions, the datum library and
//! the observables.

use num_complex::Complex64;

/// Gauss-Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = (n + 1) / 2;
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, 0.0);
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// A composite rule: absolute nodes and weights.
#[derive(Debug, Clone, Default)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    /// Gauss-Legendre panels between consecutive breakpoints.
    pub fn panels(breaks: &[f64], order: usize) -> Self {
        let (gx, gw) = gauss_legendre(order);
        let mut rule = Rule::default();
        for p in breaks.windows(2) {
            let (a, b) = (p[0], p[1]);
            let half = 0.5 * (b - a);
            let mid = 0.5 * (a + b);
            for (x, w) in gx.iter().zip(&gw) {
                rule.nodes.push(mid + half * x);
                rule.weights.push(half * w);
            }
        }
        rule
    }

    /// Panels on (0, r_max] graded geometrically toward the origin, then uniform.
    pub fn radial(r_max: f64, panel: f64, order: usize) -> Self {
        let mut breaks = vec![0.0];
        let mut r = 1e-12;
        while r < panel.min(1.0) {
            breaks.push(r);
            r *= 4.0;
        }
        let mut r = panel.min(1.0);
        while r < r_max {
            breaks.push(r);
            r += panel;
        }
        breaks.push(r_max);
        Rule::panels(&breaks, order)
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(x, w)| w * f(*x)).sum()
    }
}

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// One Gauss-Kronrod 7/15 panel: (kronrod estimate, |kronrod - gauss|).
fn gk15<T, F>(f: &F, a: f64, b: f64) -> (T, f64)
where
    T: Copy + std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T> + std::ops::Sub<Output = T> + Norm,
    F: Fn(f64) -> T,
{
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        k = k + s * WGK[j];
        if j % 2 == 1 {
            g = g + s * WG[j / 2];
        }
    }
    (k * h, (k * h - g * h).norm())
}

pub trait Norm {
    fn norm(self) -> f64;
}
impl Norm for f64 {
    fn norm(self) -> f64 {
        self.abs()
    }
}
impl Norm for Complex64 {
    fn norm(self) -> f64 {
        Complex64::norm(self)
    }
}

/// Adaptive Gauss-Kronrod on [a, b] to `abs + rel*|I|`: the panel with the
/// largest error estimate is bisected until the summed estimate meets the
/// tolerance, or after a fixed budget of subdivisions.
pub fn adaptive<T, F>(f: F, a: f64, b: f64, abs: f64, rel: f64) -> T
where
    T: Copy + std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T> + std::ops::Sub<Output = T> + Norm,
    F: Fn(f64) -> T,
{
    const MAX_SPLITS: usize = 2000;
    let (whole, err) = gk15(&f, a, b);
    let mut panels = vec![(a, b, whole, err)];
    let mut total_err = err;
    for _ in 0..MAX_SPLITS {
        let sum = panels.iter().skip(1).fold(panels[0].2, |s, p| s + p.2);
        // panels whose error sits at round-off level cannot improve
        let floor = 1e2 * f64::EPSILON * sum.norm();
        if total_err <= (abs + rel * sum.norm()).max(floor) {
            return sum;
        }
        let (worst, _) = panels
            .iter()
            .enumerate()
            .fold((0, -1.0), |best, (i, p)| if p.3 > best.1 { (i, p.3) } else { best });
        let (a, b, _, e) = panels.swap_remove(worst);
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            panels.push((a, b, gk15(&f, a, b).0, 0.0));
            total_err -= e;
            continue;
        }
        let (v1, e1) = gk15(&f, a, m);
        let (v2, e2) = gk15(&f, m, b);
        total_err += e1 + e2 - e;
        panels.push((a, m, v1, e1));
        panels.push((m, b, v2, e2));
    }
    panels.iter().skip(1).fold(panels[0].2, |s, p| s + p.2)
}
