use nalgebra::{DMatrix, DVector};

use super::{DiscretePath, DldpsSystem, PathPair};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonOptions {
    /// Convergence threshold on the max-norm of the residual.
    pub tol: f64,
    pub max_iter: usize,
    /// Central-difference step for the Jacobian, in chart coordinates.
    pub fd_step: f64,
    pub max_halvings: usize,
    pub cond_limit: f64,
    /// Re-project onto the manifold when drift exceeds this after a solve.
    pub reproject_above: f64,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_iter: 50,
            fd_step: 1e-7,
            max_halvings: 30,
            cond_limit: 1e12,
            reproject_above: 1e-12,
        }
    }
}

impl NewtonOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self { tol, ..Self::default() }
    }
}

fn inf_norm(v: &DVector<f64>) -> f64 {
    v.iter().fold(0.0, |m, x| if x.is_nan() { f64::NAN } else { m.max(x.abs()) })
}

/// Damped Newton iteration for a square system posed in a moving chart.
///
/// The chart is re-centered at every accepted iterate, so `retract(p, x)` only
/// needs to be valid for small `x`. Returns the root and the number of
/// Newton updates taken.
pub fn newton_on_chart<P: Clone>(
    start: P,
    dim: usize,
    retract: impl Fn(&P, &DVector<f64>) -> P,
    residual: impl Fn(&P) -> Result<DVector<f64>>,
    opts: &NewtonOptions,
) -> Result<(P, usize)> {
    let mut cur = start;
    let mut r = residual(&cur)?;
    if r.len() != dim {
        return Err(Error::Dimension { expected: dim, got: r.len() });
    }
    let mut norm = inf_norm(&r);
    let h = opts.fd_step;
    for iter in 0..opts.max_iter {
        if norm <= opts.tol {
            return Ok((cur, iter));
        }
        let mut jac = DMatrix::zeros(dim, dim);
        for j in 0..dim {
            let mut dx = DVector::zeros(dim);
            dx[j] = h;
            let plus = residual(&retract(&cur, &dx))?;
            let minus = residual(&retract(&cur, &(-dx)))?;
            jac.set_column(j, &((plus - minus) / (2.0 * h)));
        }
        let svd = jac.svd(true, true);
        let smax = svd.singular_values.max();
        let smin = svd.singular_values.min();
        let cond = if smin > 0.0 { smax / smin } else { f64::INFINITY };
        if !(cond <= opts.cond_limit) {
            return Err(Error::SingularJacobian { cond });
        }
        let step = svd
            .solve(&(-&r), 0.0)
            .map_err(|_| Error::SingularJacobian { cond })?;

        let mut alpha = 1.0;
        let mut accepted = false;
        for _ in 0..=opts.max_halvings {
            let trial = retract(&cur, &(&step * alpha));
            if let Ok(rt) = residual(&trial) {
                let nt = inf_norm(&rt);
                if nt < norm || nt <= opts.tol {
                    cur = trial;
                    r = rt;
                    norm = nt;
                    accepted = true;
                    break;
                }
            }
            alpha *= 0.5;
        }
        if !accepted {
            return Err(Error::NoConvergence { iter: iter + 1, residual: norm });
        }
    }
    if norm <= opts.tol {
        Ok((cur, opts.max_iter))
    } else {
        Err(Error::NoConvergence { iter: opts.max_iter, residual: norm })
    }
}

/// Result of a single Newton solve for the next pair.
#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub pair: PathPair,
    pub iterations: usize,
}

/// Solves the equations of motion for `(ε_k, m_{k+1})` given `prev =
/// (ε_{k−1}, m_k)`.
///
/// The unknowns are the fiber coordinates of `ε_k` over the fixed base point
/// `m_k` followed by the chart coordinates of `m_{k+1}`.
pub fn newton_step(
    sys: &DldpsSystem,
    prev: &PathPair,
    guess: &PathPair,
    opts: &NewtonOptions,
) -> Result<StepOutcome> {
    let b = sys.bundle();
    let start = PathPair::new(b.join(&prev.m_next, &b.fiber_part(&guess.eps)), guess.m_next.clone());
    let nf = b.fiber_dim();
    let nb = b.base_dim();
    let retract = |p: &PathPair, x: &DVector<f64>| {
        let fiber = b.fiber.retract(&b.fiber_part(&p.eps), &x.rows(0, nf).into_owned());
        PathPair::new(
            b.join(&prev.m_next, &fiber),
            b.base.retract(&p.m_next, &x.rows(nf, nb).into_owned()),
        )
    };
    let (mut pair, iterations) = newton_on_chart(
        start,
        nf + nb,
        retract,
        |p| sys.residual_vector(prev, p),
        opts,
    )?;
    let drift = b.drift_total(&pair.eps).max(b.base.drift(&pair.m_next));
    if drift > opts.reproject_above {
        pair = PathPair::new(b.project_total(&pair.eps), b.base.project(&pair.m_next));
    }
    Ok(StepOutcome { pair, iterations })
}

/// Integrates `steps` pairs past `initial`.
///
/// The guess for each step reuses the previous fiber point and extrapolates
/// the base (repeating the last group increment on SO(3), linear on ℝⁿ).
pub fn integrate(
    sys: &DldpsSystem,
    initial: &PathPair,
    steps: usize,
    opts: &NewtonOptions,
) -> Result<DiscretePath> {
    let b = sys.bundle();
    let kin = sys.model().kin_residual(&initial.eps, &initial.m_next)?;
    let kin_norm = inf_norm(&kin);
    if !(kin_norm <= opts.tol) {
        return Err(Error::NoConvergence { iter: 0, residual: kin_norm }.at_step(0));
    }
    let mut pairs = Vec::with_capacity(steps + 1);
    pairs.push(initial.clone());
    for k in 1..=steps {
        let prev = &pairs[k - 1];
        let guess = PathPair::new(
            b.join(&prev.m_next, &b.fiber_part(&prev.eps)),
            b.base.extrapolate(&b.phi(&prev.eps), &prev.m_next),
        );
        let next = newton_step(sys, prev, &guess, opts).map_err(|e| e.at_step(k))?;
        pairs.push(next.pair);
    }
    Ok(DiscretePath::new(pairs))
}
