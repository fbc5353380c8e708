//! Independent brute-force re-derivations of every metric, written straight
//! from the definitions with no shared code or intermediate structures.
//! These are the oracle the optimized kernels are compared against; the
//! arithmetic follows the same evaluation order (ascending offsets, sum
//! before divide) so the comparison can demand exact equality.

use temporal_metrics::matrix::AccuracyMatrix;
use temporal_metrics::metrics::{MetricConfig, ShMode, TasMode};

/// A transfer-ratio cell computed from first principles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Ttr {
    Absent,
    Undefined,
    Value(f64),
}

pub fn ttr(m: &AccuracyMatrix, train: usize, eval: usize, clip: bool) -> Ttr {
    let Some(acc) = m.get(train, eval) else {
        return Ttr::Absent;
    };
    match m.get(eval, eval) {
        None | Some(0.0) => Ttr::Undefined,
        Some(oracle) => {
            let ratio = acc / oracle;
            Ttr::Value(if clip { ratio.min(1.0) } else { ratio })
        }
    }
}

/// Stability horizon from the definition. `None` when the diagonal ratio of
/// `t` is undefined (so no horizon exists).
pub fn stability(m: &AccuracyMatrix, t: usize, cfg: &MetricConfig) -> Option<(usize, bool)> {
    if t >= m.periods() {
        return None;
    }
    match ttr(m, t, t, cfg.clip_ttr) {
        Ttr::Value(_) => {}
        _ => return None,
    }
    // All defined forward ratios inside the window, by ascending offset.
    let defined: Vec<(usize, f64)> = (1..=cfg.max_horizon)
        .filter_map(|h| {
            let tau = t.checked_add(h).filter(|tau| *tau < m.periods())?;
            match ttr(m, t, tau, cfg.clip_ttr) {
                Ttr::Value(g) => Some((h, g)),
                _ => None,
            }
        })
        .collect();
    let last_defined = defined.last().map_or(0, |(h, _)| *h);
    Some(match cfg.sh_mode {
        ShMode::Contiguous => match defined.iter().find(|(_, g)| *g < cfg.delta) {
            Some((h, _)) => (h - 1, false),
            None => (last_defined, true),
        },
        ShMode::LiteralMax => {
            let best = defined
                .iter()
                .filter(|(_, g)| *g >= cfg.delta)
                .map(|(h, _)| *h)
                .max()
                .unwrap_or(0);
            (best, best == last_defined)
        }
    })
}

/// The full drift statistic from the definition. `None` when the training
/// diagonal is absent.
pub fn drift_statistic(m: &AccuracyMatrix, t: usize, cfg: &MetricConfig) -> Option<Vec<f64>> {
    if t >= m.periods() {
        return None;
    }
    let baseline = m.get(t, t)?;
    let mut stat = Vec::with_capacity(cfg.max_horizon);
    let mut s = 0.0f64;
    for h in 1..=cfg.max_horizon {
        let cell = t
            .checked_add(h)
            .filter(|tau| *tau < m.periods())
            .and_then(|tau| m.get(t, tau));
        if let Some(a) = cell {
            let gain = (a - baseline).abs() - cfg.epsilon;
            s = (s + gain).max(0.0);
        }
        stat.push(s);
    }
    Some(stat)
}

/// Drift horizon from the definition: first strict crossing, else the
/// sentinel one past the window.
pub fn drift(m: &AccuracyMatrix, t: usize, cfg: &MetricConfig) -> Option<(usize, bool)> {
    let stat = drift_statistic(m, t, cfg)?;
    Some(match stat.iter().position(|s| *s > cfg.lambda) {
        Some(i) => (i + 1, false),
        None => (cfg.max_horizon + 1, true),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TasFailure {
    EmptyWindow,
    ZeroBaseline,
}

/// Adaptation score from the definition, as `(ood_avg, id_avg, tas)`.
pub fn tas(
    m: &AccuracyMatrix,
    t: usize,
    cfg: &MetricConfig,
) -> Result<(f64, f64, f64), TasFailure> {
    let mut pairs = Vec::new();
    for k in 1..=cfg.tas_window {
        let Some(tau) = t.checked_add(k).filter(|tau| *tau < m.periods()) else {
            continue;
        };
        if let (Some(ood), Some(id)) = (m.get(t, tau), m.get(tau, tau)) {
            pairs.push((ood, id));
        }
    }
    match cfg.tas_mode {
        TasMode::Ratio => {
            if pairs.is_empty() {
                return Err(TasFailure::EmptyWindow);
            }
            let mut ood_sum = 0.0f64;
            let mut id_sum = 0.0f64;
            for (o, i) in &pairs {
                ood_sum += o;
                id_sum += i;
            }
            let ood_avg = ood_sum / pairs.len() as f64;
            let id_avg = id_sum / pairs.len() as f64;
            if id_avg == 0.0 {
                return Err(TasFailure::ZeroBaseline);
            }
            let raw = ood_avg / id_avg;
            let tas = if cfg.clip_ttr { raw.min(1.0) } else { raw };
            Ok((ood_avg, id_avg, tas))
        }
        TasMode::PerTerm => {
            let usable: Vec<(f64, f64)> =
                pairs.into_iter().filter(|(_, id)| *id != 0.0).collect();
            if usable.is_empty() {
                return Err(TasFailure::EmptyWindow);
            }
            let mut ood_sum = 0.0f64;
            let mut id_sum = 0.0f64;
            let mut term_sum = 0.0f64;
            for (o, i) in &usable {
                let raw = o / i;
                term_sum += if cfg.clip_ttr { raw.min(1.0) } else { raw };
                ood_sum += o;
                id_sum += i;
            }
            let n = usable.len() as f64;
            Ok((ood_sum / n, id_sum / n, term_sum / n))
        }
    }
}
