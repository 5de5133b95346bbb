//! Bottom-up hierarchy construction by repeated expander decomposition.
//!
//! Level i decomposes with respect to the terminal set T_i (T_1 = E) and the
//! separator it finds becomes T_{i+1}. Edges of T_i \ T_{i+1} land in X_i
//! when they sit inside an SCC of G \ T_{i+1}, otherwise in D. A cut that
//! removes an edge outside T_i cannot be expressed in this chain; such edges
//! are marked to be removed from the start at every level up to i and the
//! whole construction restarts.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::cut_matching::{cut_or_embed, CmConfig, CutMatchingError, CutOrEmbedOutcome};
use crate::graph::{scc_sub, DiGraph, EdgeId};
use crate::hierarchy::{
    check_component, cut_metrics, respecting_topo_order, validate_hierarchy_with, Hierarchy, Ratio,
    ValidateConfig, ValidationReport,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BuildError {
    #[error("more than {cap} cut events")]
    IterationCapExceeded { cap: usize },
    #[error("height cap {cap} exceeded")]
    HeightCapExceeded { cap: usize },
    #[error("build failed after {attempts} attempts: {reason}")]
    BuildFailed {
        attempts: usize,
        reason: String,
        component: Vec<usize>,
        witness: Option<Vec<usize>>,
    },
    #[error(transparent)]
    CutMatching(#[from] CutMatchingError),
}

#[derive(Debug, Clone)]
pub enum BuildValidation {
    /// Exhaustive on small components, sampled on larger ones.
    Full(ValidateConfig),
    /// Only the structural conditions; expansion is not checked.
    Structural,
}

#[derive(Debug, Clone)]
pub struct BuildConfig {
    pub cm: CmConfig,
    pub validation: BuildValidation,
    pub attempts: usize,
    pub cut_cap_factor: usize,
    /// Restarts caused by non-nested cuts before the attempt gives up.
    pub max_restarts: usize,
    /// The game alone only vouches for φψ̃²/2. When set, every certified
    /// component is searched for a φ-sparse cut (exhaustively when small)
    /// and any cut found is applied like a game cut.
    pub check: Option<ValidateConfig>,
}

impl Default for BuildConfig {
    fn default() -> Self {
        BuildConfig {
            cm: CmConfig::default(),
            validation: BuildValidation::Full(ValidateConfig::default()),
            attempts: 5,
            cut_cap_factor: 50,
            max_restarts: 64,
            check: Some(ValidateConfig::default()),
        }
    }
}

/// φ used when the caller has no preference: 1/16 up to 64 vertices, 1/32
/// beyond.
pub fn default_phi(n: usize) -> Ratio {
    if n <= 64 {
        Ratio { num: 1, den: 16 }
    } else {
        Ratio { num: 1, den: 32 }
    }
}

/// ⌈2 log_{1/φ}(4m)⌉
pub fn height_cap(m: usize, phi: Ratio) -> usize {
    let base = 1.0 / phi.as_f64();
    if base <= 1.0 {
        return usize::MAX;
    }
    ((2.0 * (4.0 * m.max(1) as f64).ln() / base.ln()).ceil() as usize).max(1)
}

#[derive(Debug, Clone, Default)]
pub struct Decomposition {
    /// Edges removed, including any that were removed up front.
    pub removed: Vec<bool>,
    /// Removed edges that were not terminals; non-empty means the run was
    /// cut short at that point.
    pub non_nested: Vec<EdgeId>,
    pub cut_events: usize,
    pub certified: usize,
    /// Cuts found by checking a certified component rather than by the game.
    pub check_cuts: usize,
    pub game_rounds: usize,
}

/// Removes edges until F is φ-expanding in every SCC of G \ removed.
/// `h_below` gives levels for the edges outside F (a hierarchy of G \ F).
#[allow(clippy::too_many_arguments)]
pub fn expander_decompose(
    g: &DiGraph,
    cap: &[i64],
    f_mask: &[bool],
    phi: Ratio,
    h_below: &Hierarchy,
    pre_removed: &[bool],
    rng: &mut ChaCha8Rng,
    cfg: &BuildConfig,
    level: usize,
    log: &mut Vec<String>,
) -> Result<Decomposition, BuildError> {
    let n = g.n();
    let m = g.m();
    let cap_events = cfg.cut_cap_factor * ((m.max(2) as f64).log2().ceil() as usize).max(1);
    let mut out = Decomposition {
        removed: pre_removed.to_vec(),
        ..Decomposition::default()
    };
    if !f_mask.iter().any(|&b| b) {
        return Ok(out);
    }
    let all: Vec<usize> = (0..n).collect();
    let mut work: Vec<Vec<usize>> = {
        let removed = &out.removed;
        scc_sub(g, &all, |e| !removed[e])
    };
    work.sort_by_key(|c| std::cmp::Reverse(c.len()));
    while let Some(comp) = work.pop() {
        if comp.len() < 2 {
            continue;
        }
        let removed = out.removed.clone();
        let (sub, emap, _) = g.induced(&comp, |e| !removed[e]);
        let sub_cap: Vec<i64> = emap.iter().map(|&e| cap[e]).collect();
        let sub_f: Vec<bool> = emap.iter().map(|&e| f_mask[e]).collect();
        let vol: i64 = sub_f.iter().zip(&sub_cap).filter(|(&f, _)| f).map(|(_, &c)| 2 * c).sum();
        if (vol as u128) * (phi.num as u128) < phi.den as u128 {
            out.certified += 1;
            log.push(format!("level={level} event=certify component={} volume={vol}", comp.len()));
            continue;
        }
        // F edges sit one level above everything below so τ stays
        // respecting for G \ F
        let top = sub_f
            .iter()
            .zip(&emap)
            .filter(|(&f, _)| !f)
            .map(|(_, &e)| h_below.level[e])
            .max()
            .unwrap_or(0)
            + 1;
        let sub_levels: Vec<usize> = emap
            .iter()
            .zip(&sub_f)
            .map(|(&e, &f)| if f { top } else { h_below.level[e] })
            .collect();
        let tau = respecting_topo_order(&sub, &sub_levels).map_err(|e| BuildError::BuildFailed {
            attempts: 0,
            reason: format!("lower levels do not form a hierarchy: {e}"),
            component: comp.clone(),
            witness: None,
        })?;
        let h_sub = Hierarchy {
            eta: top,
            level: sub_levels,
            tau,
        };
        let (outcome, stats) = cut_or_embed(&sub, &sub_cap, &sub_f, phi, 0, &h_sub, rng, &cfg.cm)?;
        out.game_rounds += stats.bisections.len();
        let (side, source) = match outcome {
            CutOrEmbedOutcome::Cut(c) => (c.side, "game"),
            CutOrEmbedOutcome::Certificate(c) => {
                let refuted = match &cfg.check {
                    Some(vc) => {
                        let local: Vec<usize> = (0..sub.n()).collect();
                        let mut crng = ChaCha8Rng::seed_from_u64(vc.seed);
                        check_component(&sub, &sub_cap, &local, |_| true, |e| sub_f[e], phi, vc, &mut crng, level)
                            .witness
                    }
                    None => None,
                };
                match refuted {
                    Some(w) => {
                        let mut side = vec![false; sub.n()];
                        for v in w {
                            side[v] = true;
                        }
                        out.check_cuts += 1;
                        (side, "check")
                    }
                    None => {
                        out.certified += 1;
                        log.push(format!(
                            "level={level} event=certify component={} rounds={}",
                            comp.len(),
                            c.rounds
                        ));
                        continue;
                    }
                }
            }
        };
        out.cut_events += 1;
        if out.cut_events > cap_events {
            return Err(BuildError::IterationCapExceeded { cap: cap_events });
        }
        let all_local: Vec<usize> = (0..sub.n()).collect();
        let cm = cut_metrics(&sub, &sub_cap, &all_local, &side, |_| true, |e| sub_f[e]);
        // drop the lighter direction
        let forward = cm.out_cap <= cm.in_cap;
        let mut cut_edges = Vec::new();
        for (le, &e) in emap.iter().enumerate() {
            let (u, v) = sub.ends(le);
            let crosses = if forward {
                side[u] && !side[v]
            } else {
                !side[u] && side[v]
            };
            if crosses {
                cut_edges.push(e);
            }
        }
        let side_size = side.iter().filter(|&&b| b).count();
        log.push(format!(
            "level={level} event=cut component={} side={} removed={} source={source}",
            comp.len(),
            side_size,
            cut_edges.len()
        ));
        for &e in &cut_edges {
            out.removed[e] = true;
            if !f_mask[e] {
                out.non_nested.push(e);
            }
        }
        if !out.non_nested.is_empty() {
            return Ok(out);
        }
        let removed = &out.removed;
        let mut parts = scc_sub(g, &comp, |e| !removed[e]);
        parts.sort_by_key(|p| std::cmp::Reverse(p.len()));
        work.extend(parts);
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct BuildResult {
    pub hierarchy: Hierarchy,
    pub log: Vec<String>,
    pub attempts: usize,
    pub restarts: usize,
    pub cut_events: usize,
    pub check_cuts: usize,
    pub game_rounds: usize,
    pub validation: Option<ValidationReport>,
}

pub fn build_hierarchy(
    g: &DiGraph,
    cap: &[i64],
    phi: Ratio,
    seed: u64,
    cfg: &BuildConfig,
) -> Result<BuildResult, BuildError> {
    let mut last = BuildError::BuildFailed {
        attempts: 0,
        reason: "no attempt made".into(),
        component: Vec::new(),
        witness: None,
    };
    let mut log = Vec::new();
    for attempt in 0..cfg.attempts.max(1) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add((attempt as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)));
        match build_once(g, cap, phi, &mut rng, cfg, &mut log) {
            Ok(mut res) => {
                let report = match &cfg.validation {
                    BuildValidation::Full(vc) => {
                        validate_hierarchy_with(g, cap, &res.hierarchy, phi, vc)
                    }
                    BuildValidation::Structural => validate_hierarchy_with(
                        g,
                        cap,
                        &res.hierarchy,
                        phi,
                        &ValidateConfig {
                            random_cuts: 0,
                            dijkstra_runs: 0,
                            seed: 0,
                        },
                    ),
                };
                let structural = report.partition_ok && report.dag_ok && report.containment_ok && report.order_ok;
                let expansion_checked = matches!(cfg.validation, BuildValidation::Full(_));
                if structural && (!expansion_checked || report.is_valid()) {
                    res.attempts = attempt + 1;
                    res.validation = Some(report);
                    res.log = log;
                    return Ok(res);
                }
                let bad = report.first_witness();
                last = BuildError::BuildFailed {
                    attempts: attempt + 1,
                    reason: report.failures.join("; "),
                    component: bad.map(|c| c.vertices.clone()).unwrap_or_default(),
                    witness: bad.and_then(|c| c.witness.clone()),
                };
                log.push(format!("attempt={} event=invalid", attempt + 1));
            }
            Err(e) => {
                log.push(format!("attempt={} event=error {e}", attempt + 1));
                last = match e {
                    BuildError::BuildFailed {
                        reason,
                        component,
                        witness,
                        ..
                    } => BuildError::BuildFailed {
                        attempts: attempt + 1,
                        reason,
                        component,
                        witness,
                    },
                    other => BuildError::BuildFailed {
                        attempts: attempt + 1,
                        reason: other.to_string(),
                        component: Vec::new(),
                        witness: None,
                    },
                };
            }
        }
    }
    Err(last)
}

fn build_once(
    g: &DiGraph,
    cap: &[i64],
    phi: Ratio,
    rng: &mut ChaCha8Rng,
    cfg: &BuildConfig,
    log: &mut Vec<String>,
) -> Result<BuildResult, BuildError> {
    let n = g.n();
    let m = g.m();
    let eta_cap = height_cap(m, phi);
    // forced[e] = k: e is removed up front at every level below k
    let mut forced = vec![0usize; m];
    let mut restarts = 0;
    let mut cut_events = 0;
    let mut check_cuts = 0;
    let mut game_rounds = 0;
    let all: Vec<usize> = (0..n).collect();
    'restart: loop {
        let mut level = vec![usize::MAX; m];
        let mut terminal = vec![true; m];
        let mut i = 1;
        while terminal.iter().any(|&t| t) {
            if i > eta_cap {
                return Err(BuildError::HeightCapExceeded { cap: eta_cap });
            }
            let pre: Vec<bool> = (0..m).map(|e| terminal[e] && forced[e] > i).collect();
            let below = Hierarchy {
                level: level.iter().map(|&l| if l == usize::MAX { 0 } else { l }).collect(),
                eta: i - 1,
                tau: all.clone(),
            };
            let d = expander_decompose(g, cap, &terminal, phi, &below, &pre, rng, cfg, i, log)?;
            cut_events += d.cut_events;
            check_cuts += d.check_cuts;
            game_rounds += d.game_rounds;
            if !d.non_nested.is_empty() {
                restarts += 1;
                for &e in &d.non_nested {
                    forced[e] = forced[e].max(i + 1);
                }
                log.push(format!(
                    "level={i} event=rebuild component={n} forced={}",
                    d.non_nested.len()
                ));
                if restarts > cfg.max_restarts {
                    return Err(BuildError::IterationCapExceeded { cap: cfg.max_restarts });
                }
                continue 'restart;
            }
            let next = d.removed;
            let comps = scc_sub(g, &all, |e| !next[e]);
            let mut id = vec![0; n];
            for (k, c) in comps.iter().enumerate() {
                for &v in c {
                    id[v] = k;
                }
            }
            for (e, u, v) in g.edges() {
                if terminal[e] && !next[e] {
                    level[e] = if id[u] == id[v] { i } else { 0 };
                }
            }
            terminal = next;
            i += 1;
        }
        let level: Vec<usize> = level.into_iter().map(|l| if l == usize::MAX { 0 } else { l }).collect();
        let hierarchy = Hierarchy::from_levels(g, level).map_err(|e| BuildError::BuildFailed {
            attempts: 0,
            reason: e.to_string(),
            component: Vec::new(),
            witness: None,
        })?;
        return Ok(BuildResult {
            hierarchy,
            log: Vec::new(),
            attempts: 1,
            restarts,
            cut_events,
            check_cuts,
            game_rounds,
            validation: None,
        });
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_graph;

    #[test]
    fn dag_gets_height_zero_without_rounds() {
        let (g, c) = build_graph(4, &[(0, 1, 1), (1, 2, 1), (0, 3, 2)]).unwrap();
        let r = build_hierarchy(&g, &c, Ratio::new(1, 8).unwrap(), 1, &BuildConfig::default()).unwrap();
        assert_eq!(r.hierarchy.eta, 0);
        assert_eq!(r.game_rounds, 0);
    }

    #[test]
    fn cycle_is_one_level() {
        let arcs: Vec<_> = (0..8).map(|i| (i, (i + 1) % 8, 1)).collect();
        let (g, c) = build_graph(8, &arcs).unwrap();
        let r = build_hierarchy(&g, &c, Ratio::new(1, 8).unwrap(), 3, &BuildConfig::default()).unwrap();
        assert_eq!(r.hierarchy.eta, 1);
        assert!(r.hierarchy.level.iter().all(|&l| l == 1));
    }

    #[test]
    fn empty_terminals_remove_nothing() {
        let (g, c) = build_graph(2, &[(0, 1, 1), (1, 0, 1)]).unwrap();
        let h = Hierarchy::from_levels(&g, vec![1, 1]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let d = expander_decompose(
            &g,
            &c,
            &[false, false],
            Ratio::new(1, 8).unwrap(),
            &h,
            &[false, false],
            &mut rng,
            &BuildConfig::default(),
            1,
            &mut Vec::new(),
        )
        .unwrap();
        assert!(d.removed.iter().all(|&r| !r));
    }

    #[test]
    fn height_cap_grows_with_m() {
        let phi = Ratio::new(1, 16).unwrap();
        assert!(height_cap(10, phi) <= height_cap(1000, phi));
        assert_eq!(height_cap(4, phi), 2);
    }
}
