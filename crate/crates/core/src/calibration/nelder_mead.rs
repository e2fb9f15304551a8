//! Nelder–Mead simplex search with dimension-adaptive coefficients and
//! restarts from the best vertex.

/// Outcome of a simplex search.
#[derive(Debug, Clone, PartialEq)]
pub struct Minimum<const N: usize> {
    pub x: [f64; N],
    pub value: f64,
    pub evaluations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexOptions {
    /// Converged when `f_max - f_min <= f_tolerance·|f_min|`.
    pub f_tolerance: f64,
    /// Converged when every vertex lies within this distance of the best.
    pub x_tolerance: f64,
    pub max_evaluations: usize,
    pub initial_step: f64,
    /// Simplex rebuilds around the best vertex after convergence; stops early
    /// once a rebuild fails to improve the value.
    pub max_rebuilds: usize,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self {
            f_tolerance: 1e-10,
            x_tolerance: 1e-8,
            max_evaluations: 6000,
            initial_step: 0.25,
            max_rebuilds: 4,
        }
    }
}

struct Counter<'f, F> {
    f: &'f F,
    used: usize,
    budget: usize,
}

impl<F: Fn(&[f64]) -> f64> Counter<'_, F> {
    fn exhausted(&self) -> bool {
        self.used >= self.budget
    }

    fn eval(&mut self, x: &[f64]) -> f64 {
        self.used += 1;
        let v = (self.f)(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    }
}

/// Minimizes `f` from `x0`. Non-finite values are treated as `+∞`, so the
/// objective may signal infeasible points that way.
pub fn minimize<const N: usize, F>(f: &F, x0: [f64; N], opts: &SimplexOptions) -> Minimum<N>
where
    F: Fn(&[f64]) -> f64,
{
    let mut counter = Counter {
        f,
        used: 0,
        budget: opts.max_evaluations.max(1),
    };
    let mut best_x = x0;
    let mut best_v = counter.eval(&x0);
    let mut step = opts.initial_step;
    let mut converged = false;

    for _ in 0..=opts.max_rebuilds {
        if counter.exhausted() {
            break;
        }
        let before = best_v;
        let (x, v, done) = run_simplex(&mut counter, best_x, best_v, step, opts);
        if v < best_v {
            best_x = x;
            best_v = v;
        }
        converged = done;
        let improved = best_v < before - opts.f_tolerance * before.abs();
        if !done || !improved {
            break;
        }
        // restart on a smaller simplex to shake off a collapsed search
        step = (step * 0.5).max(100.0 * opts.x_tolerance);
    }

    Minimum {
        x: best_x,
        value: best_v,
        evaluations: counter.used,
        converged,
    }
}

fn run_simplex<const N: usize, F>(
    counter: &mut Counter<'_, F>,
    x0: [f64; N],
    f0: f64,
    step: f64,
    opts: &SimplexOptions,
) -> ([f64; N], f64, bool)
where
    F: Fn(&[f64]) -> f64,
{
    let n = N as f64;
    let (reflect, expand, contract, shrink) = (1.0, 1.0 + 2.0 / n, 0.75 - 0.5 / n, 1.0 - 1.0 / n);

    let mut pts: Vec<[f64; N]> = Vec::with_capacity(N + 1);
    let mut vals: Vec<f64> = Vec::with_capacity(N + 1);
    pts.push(x0);
    vals.push(f0);
    for i in 0..N {
        if counter.exhausted() {
            break;
        }
        let mut p = x0;
        p[i] += step;
        vals.push(counter.eval(&p));
        pts.push(p);
    }
    if pts.len() < N + 1 {
        return best_of(&pts, &vals, false);
    }

    loop {
        let mut order: Vec<usize> = (0..=N).collect();
        order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]).then(a.cmp(&b)));
        pts = order.iter().map(|&i| pts[i]).collect();
        vals = order.iter().map(|&i| vals[i]).collect();

        let (f_best, f_worst) = (vals[0], vals[N]);
        let spread_ok = f_best.is_finite() && f_worst - f_best <= opts.f_tolerance * f_best.abs();
        let diameter = pts[1..]
            .iter()
            .map(|p| {
                p.iter()
                    .zip(&pts[0])
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if spread_ok || diameter <= opts.x_tolerance {
            return (pts[0], vals[0], true);
        }
        if counter.exhausted() {
            return (pts[0], vals[0], false);
        }

        let mut centroid = [0.0; N];
        for p in &pts[..N] {
            for (c, v) in centroid.iter_mut().zip(p) {
                *c += v / n;
            }
        }
        let along = |t: f64| -> [f64; N] {
            std::array::from_fn(|i| centroid[i] + t * (pts[N][i] - centroid[i]))
        };

        let xr = along(-reflect);
        let fr = counter.eval(&xr);
        if fr < vals[0] {
            let xe = along(-reflect * expand);
            let fe = counter.eval(&xe);
            if fe < fr {
                pts[N] = xe;
                vals[N] = fe;
            } else {
                pts[N] = xr;
                vals[N] = fr;
            }
            continue;
        }
        if fr < vals[N - 1] {
            pts[N] = xr;
            vals[N] = fr;
            continue;
        }
        let (xc, fc) = if fr < vals[N] {
            let xc = along(-reflect * contract);
            (xc, counter.eval(&xc))
        } else {
            let xc = along(contract);
            (xc, counter.eval(&xc))
        };
        if fc < vals[N].min(fr) {
            pts[N] = xc;
            vals[N] = fc;
            continue;
        }
        for k in 1..=N {
            if counter.exhausted() {
                break;
            }
            let p: [f64; N] = std::array::from_fn(|i| pts[0][i] + shrink * (pts[k][i] - pts[0][i]));
            vals[k] = counter.eval(&p);
            pts[k] = p;
        }
    }
}

fn best_of<const N: usize>(
    pts: &[[f64; N]],
    vals: &[f64],
    converged: bool,
) -> ([f64; N], f64, bool) {
    let i = (0..vals.len())
        .min_by(|&a, &b| vals[a].total_cmp(&vals[b]).then(a.cmp(&b)))
        .unwrap_or(0);
    (pts[i], vals[i], converged)
}
