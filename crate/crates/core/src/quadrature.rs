//! Gauss–Legendre rules and composite integration on explicit breakpoints.

use std::sync::OnceLock;

/// Nodes and weights on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    fn compute(n: usize) -> Self {
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            // Tricomi initial guess, then Newton on P_n.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussRule { nodes, weights }
    }

    /// Integrate `f` over `[a, b]` with this rule.
    pub fn integrate(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(mid + half * x))
            .sum::<f64>()
            * half
    }

    /// Mapped nodes/weights for `[a, b]`, appended to the output buffers.
    pub fn push_mapped(&self, a: f64, b: f64, xs: &mut Vec<f64>, ws: &mut Vec<f64>) {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            xs.push(mid + half * x);
            ws.push(w * half);
        }
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Cached rule with `n` nodes for the sizes the crate uses (8, 16, 24, 32).
pub fn gauss_legendre(n: usize) -> &'static GaussRule {
    static RULES: [OnceLock<GaussRule>; 4] = [
        OnceLock::new(),
        OnceLock::new(),
        OnceLock::new(),
        OnceLock::new(),
    ];
    let slot = match n {
        8 => 0,
        16 => 1,
        24 => 2,
        32 => 3,
        _ => panic!("unsupported Gauss-Legendre size {n}"),
    };
    RULES[slot].get_or_init(|| GaussRule::compute(n))
}

/// Composite rule: `rule` applied on every consecutive pair of sorted breakpoints.
pub fn composite(breaks: &[f64], rule: &GaussRule) -> (Vec<f64>, Vec<f64>) {
    let mut xs = Vec::with_capacity(breaks.len() * rule.nodes.len());
    let mut ws = Vec::with_capacity(breaks.len() * rule.nodes.len());
    for w in breaks.windows(2) {
        if w[1] > w[0] {
            rule.push_mapped(w[0], w[1], &mut xs, &mut ws);
        }
    }
    (xs, ws)
}

/// Sorted, deduplicated breakpoints: `panels` uniform panels over `[a, b]`
/// plus panels of width `fine` over `[s - reach, s + reach]` around each
/// point in `focus`, clipped to `[a, b]`.
pub fn breakpoints(a: f64, b: f64, panels: usize, focus: &[f64], fine: f64, reach: f64) -> Vec<f64> {
    let mut pts: Vec<f64> = (0..=panels)
        .map(|i| a + (b - a) * i as f64 / panels as f64)
        .collect();
    if fine > 0.0 {
        for &s in focus {
            if s + reach < a || s - reach > b {
                continue;
            }
            let n = (reach / fine).round() as i64;
            for j in -n..=n {
                let x = s + j as f64 * fine;
                if x > a && x < b {
                    pts.push(x);
                }
            }
        }
    }
    pts.sort_by(|x, y| x.total_cmp(y));
    pts.dedup_by(|x, y| (*x - *y).abs() <= 1e-15 * (1.0 + y.abs()));
    pts
}
