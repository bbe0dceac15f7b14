//! Adaptive Simpson quadrature on finite intervals.

/// Result of a quadrature with an estimate of its absolute error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
}

const MAX_DEPTH: u32 = 48;
const INITIAL_PANELS: usize = 64;

struct Panel {
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

fn refine<F: Fn(f64) -> f64>(f: &F, p: Panel, tol: f64, depth: u32, acc: &mut Integral) {
    let m = 0.5 * (p.a + p.b);
    let lm = 0.5 * (p.a + m);
    let rm = 0.5 * (m + p.b);
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(p.a, m, p.fa, flm, p.fm);
    let right = simpson(m, p.b, p.fm, frm, p.fb);
    let diff = left + right - p.whole;
    if depth == 0 || diff.abs() <= 15.0 * tol {
        acc.value += left + right + diff / 15.0;
        acc.error += diff.abs() / 15.0;
        return;
    }
    refine(f, Panel { a: p.a, b: m, fa: p.fa, fm: flm, fb: p.fm, whole: left }, tol / 2.0, depth - 1, acc);
    refine(f, Panel { a: m, b: p.b, fa: p.fm, fm: frm, fb: p.fb, whole: right }, tol / 2.0, depth - 1, acc);
}

/// `∫_a^b f` to absolute tolerance `tol`. The interval is first cut into
/// uniform panels so narrow features are not skipped by the initial rule.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Integral {
    let mut acc = Integral { value: 0.0, error: 0.0 };
    if !(b > a) {
        return acc;
    }
    let h = (b - a) / INITIAL_PANELS as f64;
    let panel_tol = tol / INITIAL_PANELS as f64;
    for k in 0..INITIAL_PANELS {
        let pa = a + k as f64 * h;
        let pb = if k + 1 == INITIAL_PANELS { b } else { a + (k + 1) as f64 * h };
        let (fa, fm, fb) = (f(pa), f(0.5 * (pa + pb)), f(pb));
        let whole = simpson(pa, pb, fa, fm, fb);
        refine(&f, Panel { a: pa, b: pb, fa, fm, fb, whole }, panel_tol, MAX_DEPTH, &mut acc);
    }
    acc
}

/// Integrates over `[a, b]` split at every breakpoint inside it; use it to
/// keep kinks and jumps of the integrand on panel boundaries.
pub fn integrate_with_breaks<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    tol: f64,
) -> Integral {
    let mut cuts: Vec<f64> = breaks.iter().copied().filter(|&t| t > a && t < b).collect();
    cuts.push(a);
    cuts.push(b);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let pieces = (cuts.len() - 1).max(1) as f64;
    let mut total = Integral { value: 0.0, error: 0.0 };
    for w in cuts.windows(2) {
        let part = adaptive_simpson(&f, w[0], w[1], tol / pieces);
        total.value += part.value;
        total.error += part.error;
    }
    total
}
