//! Dyadic Wiener series at infinity: `B_n = B(x0, 2^n)`, `A_n = A ∩ B_n`, and
//! the terms `(cap_p(A_n, B_{n+1}) / cap_p(B_n, B_{n+1}))^{1/(p-1)}` together
//! with the volume-normalized and global forms.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::capacity::solve_plates;
use crate::error::{Error, Result};
use crate::graph::{VertexId, VertexSet, WeightedGraph};
use crate::lattice::GraphWindow;
use crate::plaplace::{PExponent, SolverOptions};

/// One dyadic scale: the closed balls `B_n`, `B_{n+1}` and `A_n = A ∩ B_n`.
#[derive(Debug, Clone)]
pub struct DyadicScale {
    pub n: u32,
    pub r_n: usize,
    pub ball: VertexSet,
    pub outer_ball: VertexSet,
    pub a_n: VertexSet,
}

fn check_scales<W: GraphWindow + ?Sized>(window: &W, x0: VertexId, a: &VertexSet, n_scales: u32) -> Result<usize> {
    let g = window.graph();
    g.check_vertex(x0)?;
    a.check_graph(g)?;
    if n_scales == 0 || n_scales > 30 {
        return Err(Error::Config(format!("number of scales must lie in 1..=30, got {n_scales}")));
    }
    let outer = 1usize << (n_scales + 1);
    if !window.ball_is_interior(x0, outer) {
        return Err(Error::WindowTooSmall { center: x0, radius: outer });
    }
    Ok(outer)
}

/// Scales `n = 1..=N`. The ball `B(x0, 2^{N+1})` together with its vertex
/// boundary must lie in the window.
pub fn dyadic_scales<W: GraphWindow + ?Sized>(
    window: &W,
    x0: VertexId,
    a: &VertexSet,
    n_scales: u32,
) -> Result<Vec<DyadicScale>> {
    let outer = check_scales(window, x0, a, n_scales)?;
    let g = window.graph();
    let dist = g.distances_from(x0, Some(outer));
    let within = |r: usize| VertexSet::from_predicate(g, |x| (dist[x] as usize) <= r);
    Ok((1..=n_scales)
        .map(|n| {
            let r_n = 1usize << n;
            let ball = within(r_n);
            let a_n = a.intersection(&ball);
            DyadicScale {
                n,
                r_n,
                outer_ball: within(2 * r_n),
                ball,
                a_n,
            }
        })
        .collect())
}

/// `(cap_a / cap_b)^{1/(p-1)}`.
pub fn wiener_term(cap_a: f64, cap_b: f64, p: &PExponent) -> Result<f64> {
    if !(cap_b > 0.0) {
        return Err(Error::ZeroDenominator);
    }
    if !(cap_a >= 0.0) {
        return Err(Error::Config(format!("capacity must be nonnegative, got {cap_a}")));
    }
    if cap_a == cap_b {
        return Ok(1.0);
    }
    Ok((cap_a / cap_b).powf(p.inv_pm1()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    DivergingLike,
    ConvergingLike,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WienerRecord {
    pub n: u32,
    pub r_n: usize,
    #[serde(rename = "cap_A")]
    pub cap_a: f64,
    #[serde(rename = "cap_B")]
    pub cap_b: f64,
    #[serde(rename = "vol_B")]
    pub vol_b: f64,
    #[serde(rename = "cap_A_global")]
    pub cap_a_global: Option<f64>,
    pub term_main: f64,
    pub term_vd: f64,
    pub term_global: Option<f64>,
    #[serde(rename = "size_A")]
    pub size_a: usize,
    /// Largest solver uncertainty among the capacities of this scale.
    pub uncertainty: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WienerFit {
    /// `exp` of the least-squares slope of `ln term_main` against `n`.
    pub ratio: f64,
    pub scales: Vec<u32>,
    pub min_tail_term: f64,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WienerReport {
    pub x0: VertexId,
    #[serde(rename = "N")]
    pub n_scales: u32,
    pub p: f64,
    pub scales: Vec<WienerRecord>,
    pub partial_main: Vec<f64>,
    pub partial_vd: Vec<f64>,
    pub partial_global: Option<Vec<f64>>,
    /// Radius of the ball standing in for infinity in the global form.
    pub global_radius: Option<usize>,
    /// Smallest and largest `term_vd / term_main` over scales with `A_n` nonempty.
    pub vd_over_main: Option<(f64, f64)>,
    pub fit: WienerFit,
    pub classification: Classification,
    pub window_radius: Option<i64>,
}

#[derive(Debug, Clone)]
pub struct WienerOptions {
    pub solver: SolverOptions,
    /// Also compute the global form; meaningful when the graph is not
    /// p-parabolic.
    pub global: bool,
    /// Terms at or above this floor over the fitted tail count as bounded
    /// below.
    pub divergence_floor: f64,
}

impl Default for WienerOptions {
    fn default() -> Self {
        WienerOptions {
            solver: SolverOptions::default(),
            global: false,
            divergence_floor: 0.02,
        }
    }
}

/// `cap_p(S ∩ B(x0, r), B(x0, big_r))` with closed balls, the sink being
/// `{d > big_r}`. Returns `(value, uncertainty)`; zero when the source is
/// empty.
fn ball_condenser(
    g: &WeightedGraph,
    dist: &[u32],
    in_source: impl Fn(VertexId) -> bool + Sync,
    r: usize,
    big_r: usize,
    p: &PExponent,
    opts: &SolverOptions,
) -> Result<(f64, f64)> {
    let n = g.vertex_count();
    let is_source: Vec<bool> = (0..n).map(|x| (dist[x] as usize) <= r && in_source(x)).collect();
    let source: Vec<VertexId> = (0..n).filter(|&x| is_source[x]).collect();
    if source.is_empty() {
        return Ok((0.0, 0.0));
    }
    let is_free: Vec<bool> = (0..n)
        .map(|x| (dist[x] as usize) <= big_r && !is_source[x])
        .collect();
    let free: Vec<VertexId> = (0..n).filter(|&x| is_free[x]).collect();
    let plate = |y: VertexId| Some(if is_source[y] { 1.0 } else { 0.0 });
    let solved = solve_plates(g, free, &is_free, plate, &source, p, opts)?;
    solved.solution.ensure_converged()?;
    Ok((solved.value, solved.uncertainty))
}

/// Builds the dyadic series for `A` around `x0` over `n = 1..=N`.
pub fn wiener_report<W: GraphWindow + Sync + ?Sized>(
    window: &W,
    x0: VertexId,
    a: &VertexSet,
    p: &PExponent,
    n_scales: u32,
    opts: &WienerOptions,
) -> Result<WienerReport> {
    let outer = check_scales(window, x0, a, n_scales)?;
    let g = window.graph();
    let global_radius = if opts.global {
        let mut m = 1usize << (n_scales + 2);
        while m > outer && !window.ball_is_interior(x0, m) {
            m -= 1;
        }
        Some(m)
    } else {
        None
    };
    let dist = g.distances_from(x0, Some(global_radius.unwrap_or(outer) + 1));
    let in_a = a.mask(g.vertex_count());
    let pv = p.value();
    let scales: Vec<WienerRecord> = (1..=n_scales)
        .into_par_iter()
        .map(|n| -> Result<WienerRecord> {
            let r_n = 1usize << n;
            let size_a = (0..g.vertex_count())
                .filter(|&x| in_a[x] && (dist[x] as usize) <= r_n)
                .count();
            let vol_b: f64 = (0..g.vertex_count())
                .filter(|&x| (dist[x] as usize) <= r_n)
                .map(|x| g.measure(x))
                .sum();
            let (cap_b, unc_b) = ball_condenser(g, &dist, |_| true, r_n, 2 * r_n, p, &opts.solver)?;
            let (cap_a, unc_a) = if size_a == 0 {
                (0.0, 0.0)
            } else {
                ball_condenser(g, &dist, |x| in_a[x], r_n, 2 * r_n, p, &opts.solver)?
            };
            let mut uncertainty = unc_a.max(unc_b);
            let cap_a_global = match global_radius {
                Some(m) => {
                    let (v, u) = ball_condenser(g, &dist, |x| in_a[x], r_n, m, p, &opts.solver)?;
                    uncertainty = uncertainty.max(u);
                    Some(v)
                }
                None => None,
            };
            let scale = (r_n as f64).powf(pv) / vol_b;
            Ok(WienerRecord {
                n,
                r_n,
                cap_a,
                cap_b,
                vol_b,
                cap_a_global,
                term_main: wiener_term(cap_a, cap_b, p)?,
                term_vd: (scale * cap_a).powf(p.inv_pm1()),
                term_global: cap_a_global.map(|c| (scale * c).powf(p.inv_pm1())),
                size_a,
                uncertainty,
            })
        })
        .collect::<Result<_>>()?;
    let partial = |f: &dyn Fn(&WienerRecord) -> f64| -> Vec<f64> {
        scales
            .iter()
            .scan(0.0, |acc, s| {
                *acc += f(s);
                Some(*acc)
            })
            .collect()
    };
    let partial_main = partial(&|s| s.term_main);
    let partial_vd = partial(&|s| s.term_vd);
    let partial_global = global_radius.map(|_| partial(&|s| s.term_global.unwrap_or(0.0)));
    let ratios: Vec<f64> = scales
        .iter()
        .filter(|s| s.term_main > 0.0)
        .map(|s| s.term_vd / s.term_main)
        .collect();
    let vd_over_main = if ratios.is_empty() {
        None
    } else {
        Some((
            ratios.iter().copied().fold(f64::INFINITY, f64::min),
            ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        ))
    };
    let fit = fit_decay(&scales);
    let classification = classify(&fit, opts.divergence_floor);
    Ok(WienerReport {
        x0,
        n_scales,
        p: pv,
        scales,
        partial_main,
        partial_vd,
        partial_global,
        global_radius,
        vd_over_main,
        fit,
        classification,
        window_radius: window.window_radius(),
    })
}

/// Least squares on `ln term_main` over the last `ceil(N/2)` scales (at least
/// two when available).
pub fn fit_decay(scales: &[WienerRecord]) -> WienerFit {
    let take = scales.len().div_ceil(2).max(2).min(scales.len());
    let tail = &scales[scales.len() - take..];
    let used: Vec<u32> = tail.iter().map(|s| s.n).collect();
    let min_tail_term = tail.iter().map(|s| s.term_main).fold(f64::INFINITY, f64::min);
    let positive: Vec<(f64, f64)> = tail
        .iter()
        .filter(|s| s.term_main > 0.0)
        .map(|s| (s.n as f64, s.term_main.ln()))
        .collect();
    let (ratio, note) = match positive.len() {
        0 => (0.0, "all fitted terms vanish".to_string()),
        1 => (
            f64::NAN,
            "a single nonzero term in the fitted tail; no slope".to_string(),
        ),
        k => {
            let mx = positive.iter().map(|t| t.0).sum::<f64>() / k as f64;
            let my = positive.iter().map(|t| t.1).sum::<f64>() / k as f64;
            let sxy: f64 = positive.iter().map(|t| (t.0 - mx) * (t.1 - my)).sum();
            let sxx: f64 = positive.iter().map(|t| (t.0 - mx).powi(2)).sum();
            let slope = sxy / sxx;
            let rss: f64 = positive
                .iter()
                .map(|t| (t.1 - my - slope * (t.0 - mx)).powi(2))
                .sum();
            let note = if k < tail.len() {
                format!("{k} of {} tail terms nonzero; log-residual {rss:.2e}", tail.len())
            } else {
                format!("{k} scales; log-residual {rss:.2e}")
            };
            (slope.exp(), note)
        }
    };
    WienerFit {
        ratio,
        scales: used,
        min_tail_term,
        note,
    }
}

/// `ratio < 0.8` converging-like; `ratio > 1.25`, or a ratio in the refusal
/// band with every tail term above the floor, diverging-like; otherwise
/// inconclusive.
pub fn classify(fit: &WienerFit, divergence_floor: f64) -> Classification {
    if fit.ratio.is_nan() {
        return Classification::Inconclusive;
    }
    if fit.ratio < 0.8 {
        Classification::ConvergingLike
    } else if fit.ratio > 1.25 || fit.min_tail_term >= divergence_floor {
        Classification::DivergingLike
    } else {
        Classification::Inconclusive
    }
}

impl WienerReport {
    /// CSV `n,r_n,cap_A,cap_B,vol_B,term_main,term_vd,term_global,partial_main`;
    /// `term_global` is empty when not computed.
    pub fn write_csv<Wr: Write>(&self, out: Wr) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::Io(e.to_string());
        w.write_record([
            "n",
            "r_n",
            "cap_A",
            "cap_B",
            "vol_B",
            "term_main",
            "term_vd",
            "term_global",
            "partial_main",
        ])
        .map_err(io)?;
        for (s, partial) in self.scales.iter().zip(&self.partial_main) {
            w.write_record([
                s.n.to_string(),
                s.r_n.to_string(),
                fmt(s.cap_a),
                fmt(s.cap_b),
                fmt(s.vol_b),
                fmt(s.term_main),
                fmt(s.term_vd),
                s.term_global.map(fmt).unwrap_or_default(),
                fmt(*partial),
            ])
            .map_err(io)?;
        }
        w.flush()?;
        Ok(())
    }
}

pub(crate) fn fmt(v: f64) -> String {
    format!("{v:.17e}")
}
