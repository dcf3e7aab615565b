//! Conjugate Dirichlet updating of win/draw/loss counts, linear opinion
//! pooling of the home and away views, and the two multinomial-Dirichlet
//! predictors.
//!
//! The first predictor mixes, with equal weights, the posterior predictive
//! of the home team's home record and that of the away team's away record,
//! both starting from a uniform `D(1, 1, 1)` prior. The second uses a
//! symmetric `D(α, α, α)` prior and weight `w` on the home view, with
//! `(w, α)` picked by grid search on the first-half Brier score.

use serde::Serialize;

use crate::data::{CountVector, MatchRecord, Outcome, Prediction, TeamId};
use crate::error::{Error, Result};
use crate::scoring::brier;

/// Dirichlet concentration, stored as a prior plus the integer counts
/// absorbed into it. Keeping the counts separate makes sequential updating
/// exact.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DirichletParams {
    prior: [f64; 3],
    observed: CountVector,
}

impl DirichletParams {
    pub fn new(a1: f64, a2: f64, a3: f64) -> Result<Self> {
        let prior = [a1, a2, a3];
        if prior.iter().any(|a| !(a.is_finite() && *a > 0.0)) {
            return Err(Error::InvalidParameter(format!(
                "Dirichlet concentrations must be positive, got {prior:?}"
            )));
        }
        Ok(Self {
            prior,
            observed: CountVector::ZERO,
        })
    }

    pub fn symmetric(alpha: f64) -> Result<Self> {
        Self::new(alpha, alpha, alpha)
    }

    pub fn uniform() -> Self {
        Self::symmetric(1.0).expect("1 is positive")
    }

    /// The concentration vector `(α1, α2, α3)`.
    pub fn alphas(&self) -> [f64; 3] {
        let n = self.observed.as_array();
        [
            self.prior[0] + n[0] as f64,
            self.prior[1] + n[1] as f64,
            self.prior[2] + n[2] as f64,
        ]
    }

    pub fn total(&self) -> f64 {
        self.alphas().iter().sum()
    }

    pub fn prior(&self) -> [f64; 3] {
        self.prior
    }

    pub fn observed(&self) -> CountVector {
        self.observed
    }
}

/// Conjugate update: adds the counts component-wise.
pub fn posterior(prior: &DirichletParams, counts: CountVector) -> DirichletParams {
    DirichletParams {
        prior: prior.prior,
        observed: prior.observed + counts,
    }
}

/// Posterior predictive for the next outcome, i.e. the Dirichlet mean.
pub fn predictive(post: &DirichletParams) -> Prediction {
    let a = post.alphas();
    let total: f64 = a.iter().sum();
    Prediction::from_weights([a[0] / total, a[1] / total, a[2] / total])
        .expect("Dirichlet mean lies on the simplex")
}

/// Weight of the home-team observer in a linear opinion pool.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PoolWeights {
    w_home: f64,
}

impl PoolWeights {
    pub const EQUAL: PoolWeights = PoolWeights { w_home: 0.5 };

    pub fn new(w_home: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&w_home) {
            return Err(Error::InvalidParameter(format!(
                "pool weight must lie in [0, 1], got {w_home}"
            )));
        }
        Ok(Self { w_home })
    }

    pub fn home(&self) -> f64 {
        self.w_home
    }

    pub fn away(&self) -> f64 {
        1.0 - self.w_home
    }
}

/// Linear opinion pool of the home team's view and the away team's view.
///
/// `away_view` is expressed from the away team's perspective, so its win and
/// loss slots are swapped before averaging.
pub fn pool(home_view: &Prediction, away_view: &Prediction, weights: PoolWeights) -> Prediction {
    let h = home_view.probs();
    let a = away_view.swapped().probs();
    let (wh, wa) = (weights.home(), weights.away());
    Prediction::from_weights([
        wh * h[0] + wa * a[0],
        wh * h[1] + wa * a[1],
        wh * h[2] + wa * a[2],
    ])
    .expect("convex combination of simplex points")
}

/// Equal-weight pool of the two posterior predictives.
pub fn mn_dir1_predict(h: CountVector, a: CountVector, prior: &DirichletParams) -> Prediction {
    let home_view = predictive(&posterior(prior, h));
    let away_view = predictive(&posterior(prior, a));
    pool(&home_view, &away_view, PoolWeights::EQUAL)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MnDir2Config {
    alpha: f64,
    weights: PoolWeights,
}

impl MnDir2Config {
    pub fn new(alpha: f64, w_home: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "alpha must be positive, got {alpha}"
            )));
        }
        Ok(Self {
            alpha,
            weights: PoolWeights::new(w_home)?,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn weights(&self) -> PoolWeights {
        self.weights
    }
}

impl Default for MnDir2Config {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            weights: PoolWeights::EQUAL,
        }
    }
}

pub fn mn_dir2_predict(h: CountVector, a: CountVector, cfg: &MnDir2Config) -> Prediction {
    let prior = DirichletParams::symmetric(cfg.alpha).expect("validated alpha");
    let home_view = predictive(&posterior(&prior, h));
    let away_view = predictive(&posterior(&prior, a));
    pool(&home_view, &away_view, cfg.weights)
}

/// The `(w, α)` grid searched by [`cv_select`].
#[derive(Clone, Debug, PartialEq)]
pub struct GridSpec {
    w_points: Vec<f64>,
    alpha_points: Vec<f64>,
}

fn strictly_increasing(v: &[f64]) -> bool {
    v.windows(2).all(|p| p[0] < p[1])
}

impl GridSpec {
    pub fn new(w_points: Vec<f64>, alpha_points: Vec<f64>) -> Result<Self> {
        if w_points.is_empty() || alpha_points.is_empty() {
            return Err(Error::InvalidParameter("empty grid".into()));
        }
        if !strictly_increasing(&w_points) || !strictly_increasing(&alpha_points) {
            return Err(Error::InvalidParameter(
                "grid points must be strictly increasing".into(),
            ));
        }
        if w_points.iter().any(|w| !(0.0..=1.0).contains(w)) {
            return Err(Error::InvalidParameter("w grid must lie in [0, 1]".into()));
        }
        if alpha_points.iter().any(|a| !(a.is_finite() && *a > 0.0)) {
            return Err(Error::InvalidParameter("alpha grid must be positive".into()));
        }
        Ok(Self {
            w_points,
            alpha_points,
        })
    }

    /// `n` equally spaced points on `[lo, hi]`, endpoints included.
    pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        match n {
            0 => vec![],
            1 => vec![lo],
            _ => (0..n)
                .map(|k| lo + k as f64 * (hi - lo) / (n - 1) as f64)
                .collect(),
        }
    }

    pub fn w_points(&self) -> &[f64] {
        &self.w_points
    }

    pub fn alpha_points(&self) -> &[f64] {
        &self.alpha_points
    }

    pub fn len(&self) -> usize {
        self.w_points.len() * self.alpha_points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl Default for GridSpec {
    /// 20 points on `[0, 1]` for `w` and 20 points on `(0.001, 20]` for `α`.
    fn default() -> Self {
        Self::new(Self::linspace(0.0, 1.0, 20), Self::linspace(0.001, 20.0, 20))
            .expect("default grid is valid")
    }
}

/// Outcome of a grid search.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CvSelection {
    pub config: MnDir2Config,
    /// Total Brier score of the selected pair over the scored matches.
    pub brier_total: f64,
    pub n_matches: usize,
}

/// Relative slack under which two grid scores count as tied.
pub const CV_TIE_TOL: f64 = 1e-12;

/// Home and away count vectors seen by each match when the matches are
/// replayed in matchday order, using only strictly earlier matchdays.
pub fn prequential_counts(matches: &[(MatchRecord, Outcome)]) -> Vec<(CountVector, CountVector)> {
    use std::collections::HashMap;

    let mut order: Vec<usize> = (0..matches.len()).collect();
    order.sort_by_key(|&i| matches[i].0.matchday());

    let mut home: HashMap<&TeamId, CountVector> = HashMap::new();
    let mut away: HashMap<&TeamId, CountVector> = HashMap::new();
    let mut out = vec![(CountVector::ZERO, CountVector::ZERO); matches.len()];

    let mut start = 0;
    while start < order.len() {
        let day = matches[order[start]].0.matchday();
        let end = start
            + order[start..]
                .iter()
                .take_while(|&&i| matches[i].0.matchday() == day)
                .count();
        for &i in &order[start..end] {
            let m = &matches[i].0;
            out[i] = (
                home.get(m.home()).copied().unwrap_or_default(),
                away.get(m.away()).copied().unwrap_or_default(),
            );
        }
        for &i in &order[start..end] {
            let (m, outcome) = &matches[i];
            home.entry(m.home()).or_default().record(*outcome);
            away.entry(m.away()).or_default().record(outcome.swapped());
        }
        start = end;
    }
    out
}

/// Picks the `(w, α)` grid point with the smallest total first-half Brier
/// score. Each match is predicted from counts of strictly earlier matchdays.
/// Ties (within [`CV_TIE_TOL`] relative) go to the smallest `α`, then the
/// smallest `w`.
pub fn cv_select(first_half: &[(MatchRecord, Outcome)], grid: &GridSpec) -> Result<CvSelection> {
    if first_half.is_empty() {
        return Err(Error::InsufficientData(
            "cross-validation needs at least one first-half match".into(),
        ));
    }
    if grid.is_empty() {
        return Err(Error::InvalidParameter("empty grid".into()));
    }
    let counts = prequential_counts(first_half);

    let mut scored = Vec::with_capacity(grid.len());
    for &alpha in grid.alpha_points() {
        for &w in grid.w_points() {
            let cfg = MnDir2Config::new(alpha, w)?;
            let total: f64 = first_half
                .iter()
                .zip(&counts)
                .map(|((_, outcome), (h, a))| brier(*outcome, &mn_dir2_predict(*h, *a, &cfg)))
                .sum();
            scored.push((cfg, total));
        }
    }

    let best = scored
        .iter()
        .map(|(_, s)| *s)
        .fold(f64::INFINITY, f64::min);
    let slack = CV_TIE_TOL * best.abs().max(1.0);
    let (config, brier_total) = scored
        .into_iter()
        .filter(|(_, s)| *s <= best + slack)
        .min_by(|(a, _), (b, _)| {
            a.alpha
                .total_cmp(&b.alpha)
                .then(a.weights.home().total_cmp(&b.weights.home()))
        })
        .expect("grid is non-empty");

    Ok(CvSelection {
        config,
        brier_total,
        n_matches: first_half.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cv(w: u32, d: u32, l: u32) -> CountVector {
        CountVector::new(w, d, l)
    }

    fn close(a: [f64; 3], b: [f64; 3], tol: f64) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    /// Dirichlet mean by midpoint integration of the unnormalized density
    /// over the simplex.
    fn dirichlet_mean_by_quadrature(alpha: [f64; 3], n: usize) -> [f64; 3] {
        let h = 1.0 / n as f64;
        let mut mass = 0.0;
        let mut first = [0.0; 3];
        for i in 0..n {
            for j in 0..n - i {
                // midpoint of the lower-left triangle cell and the adjoining
                // upper-right one
                let cells: &[(f64, f64, f64)] = if j + 1 < n - i {
                    &[
                        ((i as f64 + 1.0 / 3.0) * h, (j as f64 + 1.0 / 3.0) * h, 1.0),
                        ((i as f64 + 2.0 / 3.0) * h, (j as f64 + 2.0 / 3.0) * h, 1.0),
                    ]
                } else {
                    &[((i as f64 + 1.0 / 3.0) * h, (j as f64 + 1.0 / 3.0) * h, 1.0)]
                };
                for &(t1, t2, wt) in cells {
                    let t3 = 1.0 - t1 - t2;
                    let f = wt
                        * t1.powf(alpha[0] - 1.0)
                        * t2.powf(alpha[1] - 1.0)
                        * t3.powf(alpha[2] - 1.0);
                    mass += f;
                    first[0] += f * t1;
                    first[1] += f * t2;
                    first[2] += f * t3;
                }
            }
        }
        first.map(|v| v / mass)
    }

    #[test]
    fn posterior_worked_example() {
        let prior = DirichletParams::uniform();
        assert_eq!(posterior(&prior, cv(6, 2, 1)).alphas(), [7.0, 3.0, 2.0]);
        assert_eq!(posterior(&prior, cv(2, 3, 4)).alphas(), [3.0, 4.0, 5.0]);
        let p = DirichletParams::new(0.3, 2.0, 1.5).unwrap();
        assert_eq!(posterior(&p, CountVector::ZERO), p);
    }

    #[test]
    fn predictive_matches_quadrature() {
        assert_eq!(predictive(&DirichletParams::uniform()), Prediction::UNIFORM);
        for (alpha, expected) in [
            ([7.0, 3.0, 2.0], [7.0 / 12.0, 3.0 / 12.0, 2.0 / 12.0]),
            ([3.0, 4.0, 5.0], [0.25, 1.0 / 3.0, 5.0 / 12.0]),
            ([2.5, 1.5, 4.0], [2.5 / 8.0, 1.5 / 8.0, 0.5]),
        ] {
            let quad = dirichlet_mean_by_quadrature(alpha, 600);
            assert!(close(quad, expected, 1e-4), "{quad:?} vs {expected:?}");
            let d = DirichletParams::new(alpha[0], alpha[1], alpha[2]).unwrap();
            assert!(close(predictive(&d).probs(), expected, 1e-15));
        }
    }

    #[test]
    fn pool_edge_weights() {
        let h = Prediction::new(0.6, 0.3, 0.1).unwrap();
        let a = Prediction::new(0.2, 0.3, 0.5).unwrap();
        assert!(close(pool(&h, &a, PoolWeights::new(1.0).unwrap()).probs(), h.probs(), 1e-15));
        assert!(close(pool(&h, &a, PoolWeights::new(0.0).unwrap()).probs(), [0.5, 0.3, 0.2], 1e-15));
        assert!(PoolWeights::new(1.5).is_err());
    }

    #[test]
    fn mn_dir1_worked_example() {
        let p = mn_dir1_predict(cv(6, 2, 1), cv(2, 3, 4), &DirichletParams::uniform());
        assert!(close(p.probs(), [0.5, 0.2916667, 0.2083333], 5e-7), "{p:?}");
        let u = mn_dir1_predict(CountVector::ZERO, CountVector::ZERO, &DirichletParams::uniform());
        assert!(close(u.probs(), [1.0 / 3.0; 3], 1e-15));
        let s = mn_dir1_predict(cv(4, 4, 4), cv(4, 4, 4), &DirichletParams::uniform());
        assert!(close(s.probs(), [1.0 / 3.0; 3], 1e-15));
    }

    #[test]
    fn mn_dir2_values() {
        // Exact rational evaluation of the pooled ratios:
        // 0.63 * 9.16/18.48 + 0.37 * 7.16/18.48, etc.
        let cfg = MnDir2Config::new(3.16, 0.63).unwrap();
        let p = mn_dir2_predict(cv(6, 2, 1), cv(2, 3, 4), &cfg);
        assert!(
            close(p.probs(), [0.4556277056, 0.2992424242, 0.2451298701], 1e-9),
            "{p:?}"
        );

        let home_only = MnDir2Config::new(2.0, 1.0).unwrap();
        assert_eq!(
            mn_dir2_predict(cv(3, 1, 0), cv(0, 0, 7), &home_only),
            mn_dir2_predict(cv(3, 1, 0), cv(5, 2, 1), &home_only)
        );
    }

    #[test]
    fn default_grid_shape() {
        let g = GridSpec::default();
        assert_eq!(g.len(), 400);
        assert_eq!(g.w_points()[0], 0.0);
        assert!((g.w_points()[19] - 1.0).abs() < 1e-15);
        assert!((g.w_points()[1] - 1.0 / 19.0).abs() < 1e-15);
        assert_eq!(g.alpha_points()[0], 0.001);
        assert!((g.alpha_points()[19] - 20.0).abs() < 1e-12);
        assert!(GridSpec::new(vec![], vec![1.0]).is_err());
        assert!(GridSpec::new(vec![0.5, 0.2], vec![1.0]).is_err());
    }

    fn played(md: u32, h: &str, a: &str, goals: (u32, u32)) -> (MatchRecord, Outcome) {
        let m = MatchRecord::played(1, md, h, a, goals).unwrap();
        let o = m.outcome().unwrap();
        (m, o)
    }

    #[test]
    fn prequential_counts_use_earlier_matchdays_only() {
        let ms = vec![
            played(2, "A", "B", (1, 0)),
            played(1, "A", "C", (2, 2)),
            played(1, "B", "C", (0, 1)),
            played(3, "C", "A", (0, 0)),
        ];
        let c = prequential_counts(&ms);
        assert_eq!(c[1], (CountVector::ZERO, CountVector::ZERO));
        assert_eq!(c[0], (cv(0, 1, 0), CountVector::ZERO));
        // C at home: nothing yet; A away: nothing yet
        assert_eq!(c[3], (CountVector::ZERO, CountVector::ZERO));
    }

    #[test]
    fn cv_single_point_grid() {
        let ms = vec![played(1, "A", "B", (1, 0)), played(2, "B", "A", (0, 0))];
        let grid = GridSpec::new(vec![0.3], vec![2.5]).unwrap();
        let sel = cv_select(&ms, &grid).unwrap();
        assert_eq!(sel.config, MnDir2Config::new(2.5, 0.3).unwrap());
        assert!(cv_select(&[], &grid).is_err());
    }

    #[test]
    fn cv_tie_break_prefers_smallest_alpha_then_w() {
        // Everything on matchday 1: all predictions come from the prior alone
        // and are uniform, so every grid point scores the same.
        let ms = vec![played(1, "A", "B", (1, 0)), played(1, "C", "D", (0, 0))];
        let grid = GridSpec::new(vec![0.2, 0.4, 0.9], vec![0.5, 1.0, 3.0]).unwrap();
        let sel = cv_select(&ms, &grid).unwrap();
        assert_eq!(sel.config, MnDir2Config::new(0.5, 0.2).unwrap());
        assert!((sel.brier_total - 4.0 / 3.0).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn conjugate_updates_compose(
            a in 0.001f64..50.0, b in 0.001f64..50.0, c in 0.001f64..50.0,
            c1 in (0u32..500, 0u32..500, 0u32..500),
            c2 in (0u32..500, 0u32..500, 0u32..500),
        ) {
            let p = DirichletParams::new(a, b, c).unwrap();
            let c1 = cv(c1.0, c1.1, c1.2);
            let c2 = cv(c2.0, c2.1, c2.2);
            prop_assert_eq!(posterior(&posterior(&p, c1), c2), posterior(&p, c1 + c2));
            prop_assert_eq!(
                posterior(&posterior(&p, c1), c2).alphas(),
                posterior(&p, c1 + c2).alphas()
            );
        }

        #[test]
        fn pool_stays_on_simplex(
            h in (0.0f64..1.0, 0.0f64..1.0, 0.0f64..1.0),
            a in (0.0f64..1.0, 0.0f64..1.0, 0.0f64..1.0),
            w in 0.0f64..=1.0,
        ) {
            prop_assume!(h.0 + h.1 + h.2 > 1e-6 && a.0 + a.1 + a.2 > 1e-6);
            let hp = Prediction::from_weights([h.0, h.1, h.2]).unwrap();
            let ap = Prediction::from_weights([a.0, a.1, a.2]).unwrap();
            let p = pool(&hp, &ap, PoolWeights::new(w).unwrap()).probs();
            prop_assert!(p.iter().all(|v| (0.0..=1.0).contains(v)));
            prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn mn_dir1_role_swap(
            h in (0u32..20, 0u32..20, 0u32..20),
            a in (0u32..20, 0u32..20, 0u32..20),
        ) {
            let prior = DirichletParams::uniform();
            let (h, a) = (cv(h.0, h.1, h.2), cv(a.0, a.1, a.2));
            let p = mn_dir1_predict(h, a, &prior).probs();
            let q = mn_dir1_predict(a, h, &prior).probs();
            prop_assert!((p[0] - q[2]).abs() < 1e-12);
            prop_assert!((p[1] - q[1]).abs() < 1e-12);
            prop_assert!((p[2] - q[0]).abs() < 1e-12);
        }

        #[test]
        fn home_win_increases_home_win_probability(
            h in (0u32..20, 0u32..20, 0u32..20),
            a in (0u32..20, 0u32..20, 0u32..20),
            alpha in 0.01f64..20.0,
            w in 0.01f64..=1.0,
        ) {
            let cfg = MnDir2Config::new(alpha, w).unwrap();
            let (h, a) = (cv(h.0, h.1, h.2), cv(a.0, a.1, a.2));
            let before = mn_dir2_predict(h, a, &cfg).home_win();
            let after = mn_dir2_predict(h + cv(1, 0, 0), a, &cfg).home_win();
            prop_assert!(after > before);
        }

        #[test]
        fn mn_dir2_reduces_to_mn_dir1(
            h in (0u32..30, 0u32..30, 0u32..30),
            a in (0u32..30, 0u32..30, 0u32..30),
        ) {
            let (h, a) = (cv(h.0, h.1, h.2), cv(a.0, a.1, a.2));
            let p = mn_dir2_predict(h, a, &MnDir2Config::default());
            let q = mn_dir1_predict(h, a, &DirichletParams::uniform());
            prop_assert_eq!(p, q);
        }
    }
}
