//! Maximization over the Schmidt simplex of the Werner-Holevo pair, using the
//! closed-form output spectra.

use crate::error::Result;
use crate::functions::ConvexFunction;
use crate::optimize::nelder_mead::{maximize, Tolerances};
use crate::optimize::{OptResult, OptimizerConfig, PureState};
use crate::werner::{wh3_pair_spectrum, SchmidtVector};

/// Grid points used as seeds for local refinement.
const REFINEMENT_SEEDS: usize = 6;
/// A refined point must beat the grid optimum by this much to replace it.
const REFINEMENT_MARGIN: f64 = 1e-13;
const AGREEMENT_TOL: f64 = 1e-9;

fn objective(f: &ConvexFunction, l1: f64, l2: f64) -> f64 {
    let l3 = 1.0 - l1 - l2;
    if l1 < 0.0 || l2 < 0.0 || l3 < -1e-15 {
        return f64::NEG_INFINITY;
    }
    let Ok(s) = SchmidtVector::normalized(vec![l1, l2, l3.max(0.0)]) else {
        return f64::NEG_INFINITY;
    };
    wh3_pair_spectrum(&s)
        .and_then(|w| f.trace_of_spectrum(&w.spectrum()))
        .unwrap_or(f64::NEG_INFINITY)
}

/// Maximizes `Tr f` of the Werner-Holevo pair output over the Schmidt simplex.
///
/// Scans the grid `{(i, j, k)/n : i + j + k = n}` in lexicographically
/// descending order, keeping only strict improvements, then polishes the best
/// grid points with a two-dimensional simplex search.
pub fn max_trace_schmidt_wh3(f: &ConvexFunction, cfg: &OptimizerConfig) -> Result<OptResult> {
    cfg.validate()?;
    let n = cfg.simplex_grid;
    let nf = n as f64;
    let mut scanned: Vec<(f64, [f64; 2])> = Vec::with_capacity((n + 1) * (n + 2) / 2);
    for i in (0..=n).rev() {
        for j in (0..=n - i).rev() {
            let (l1, l2) = (i as f64 / nf, j as f64 / nf);
            scanned.push((objective(f, l1, l2), [l1, l2]));
        }
    }
    let mut best = 0;
    for (k, (v, _)) in scanned.iter().enumerate() {
        if *v > scanned[best].0 + 1e-15 {
            best = k;
        }
    }
    let (mut value, mut point) = scanned[best];

    // seeds: the best grid points, earlier scan order first on ties
    let mut ranked: Vec<usize> = (0..scanned.len()).collect();
    ranked.sort_by(|&a, &b| scanned[b].0.total_cmp(&scanned[a].0).then(a.cmp(&b)));
    let tol = Tolerances {
        ftol: 1e-15,
        xtol: 1e-10,
        max_iters: cfg.max_iters,
    };
    let mut finals = Vec::with_capacity(REFINEMENT_SEEDS);
    for &k in ranked.iter().take(REFINEMENT_SEEDS) {
        let out = maximize(|x| objective(f, x[0], x[1]), &scanned[k].1, 0.5 / nf, tol);
        finals.push(out.value);
        if out.value > value + REFINEMENT_MARGIN {
            value = out.value;
            point = [out.x[0], out.x[1]];
        }
    }

    let schmidt = SchmidtVector::normalized(vec![point[0], point[1], (1.0 - point[0] - point[1]).max(0.0)])?;
    let exact = f.trace_of_spectrum(&wh3_pair_spectrum(&schmidt)?.spectrum())?;
    Ok(OptResult {
        value: exact,
        argmax: PureState::new(schmidt.canonical_state())?,
        restarts_agreeing: finals.iter().filter(|&&v| (v - value).abs() <= AGREEMENT_TOL).count(),
        schmidt: Some(schmidt),
        converged: true,
    })
}
