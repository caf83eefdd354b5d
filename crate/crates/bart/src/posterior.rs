//! Turning retained draws into predictions, posterior mean curves, pointwise
//! credible bands, fit summaries, and the on-disk draw store.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::data::{Dataset, OutcomeScaling};
use crate::error::{BartError, Result};
use crate::float::{cnt, cst, Real};
use crate::math::norm_cdf;
use crate::sampler::{Direction, ModelConfig, ModelVariant, MonotoneSpec, MoveStats, TraceRow};
use crate::tree::Tree;

/// Retained post-burn-in forest snapshots plus the scalars needed to predict.
#[derive(Clone, Debug)]
pub struct PosteriorDraws<F: Real> {
    pub variant: ModelVariant,
    /// Probit offset c (0 for continuous variants).
    pub offset: F,
    /// Outcome scaling (continuous variants only).
    pub scaling: Option<OutcomeScaling<F>>,
    /// `keep` snapshots of the full forest.
    pub snapshots: Vec<Vec<Tree<F>>>,
    /// Retained sigma values (continuous variants only).
    pub sigma_trace: Vec<F>,
    /// Echo of the fitting configuration (includes the seed).
    pub config: ModelConfig<F>,
    pub covariates: Vec<String>,
    pub outcome: String,
    /// Post-burn-in structure-move tallies.
    pub accept: MoveStats,
}

/// Posterior mean and pointwise quantile band over a grid of inputs.
#[derive(Clone, Debug)]
pub struct CurveSummary<F> {
    pub grid: Vec<Vec<F>>,
    pub mean: Vec<F>,
    pub lower: Vec<F>,
    pub upper: Vec<F>,
    pub level: F,
}

/// In-sample fit metric: log-loss for probit variants, RMSE on the original
/// outcome scale for continuous ones.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FitMetric<F> {
    LogLoss(F),
    Rmse(F),
}

#[derive(Clone, Debug)]
pub struct FitReport<F> {
    pub metric: FitMetric<F>,
    pub mean_tree_depth: F,
    pub birth_rate: f64,
    pub death_rate: f64,
    pub draws: usize,
}

impl<F: Real> PosteriorDraws<F> {
    pub fn num_draws(&self) -> usize {
        self.snapshots.len()
    }

    pub fn num_covariates(&self) -> usize {
        self.covariates.len()
    }

    fn working_point(&self, x: &[F]) -> Vec<F> {
        // The forest lives in negated space for nonincreasing coordinates.
        let mut w = x.to_vec();
        if let Some(spec) = self.variant.monotone_spec() {
            for &(coord, dir) in &spec.coords {
                if dir == Direction::Nonincreasing {
                    w[coord] = -w[coord];
                }
            }
        }
        w
    }

    /// Per-draw ensemble sum at `x`: original outcome scale for continuous
    /// variants, latent scale (without offset) for probit variants.
    pub fn predict_g(&self, x: &[F]) -> Vec<F> {
        assert_eq!(x.len(), self.num_covariates(), "x has the wrong length");
        let w = self.working_point(x);
        self.snapshots
            .iter()
            .map(|forest| {
                let g = forest
                    .iter()
                    .fold(F::zero(), |acc, t| acc + t.evaluate(&w));
                match &self.scaling {
                    Some(s) => s.invert(g),
                    None => g,
                }
            })
            .collect()
    }

    /// Per-draw success probability Phi(G(x) + c). Probit variants only.
    pub fn predict_prob(&self, x: &[F]) -> Result<Vec<F>> {
        if !self.variant.is_probit() {
            return Err(BartError::InvalidConfig(
                "probability prediction requires a probit variant".into(),
            ));
        }
        Ok(self
            .predict_g(x)
            .into_iter()
            .map(|g| norm_cdf(g + self.offset))
            .collect())
    }

    /// Per-draw prediction on the reporting scale: probability for probit
    /// variants, original outcome scale otherwise.
    fn predict_reporting(&self, x: &[F]) -> Vec<F> {
        if self.variant.is_probit() {
            self.predict_prob(x).expect("probit checked")
        } else {
            self.predict_g(x)
        }
    }

    /// Posterior mean and central `level` band per grid point. Probit
    /// summaries are computed on the probability scale, draw by draw, before
    /// averaging.
    pub fn curve_summary(&self, grid: &[Vec<F>], level: F) -> Result<CurveSummary<F>> {
        if grid.is_empty() {
            return Err(BartError::InvalidConfig("curve grid is empty".into()));
        }
        if !(level > F::zero() && level < F::one()) {
            return Err(BartError::InvalidConfig(format!(
                "band level must be in (0, 1), got {level}"
            )));
        }
        if self.num_draws() < 2 {
            return Err(BartError::InvalidConfig(
                "need at least two draws for a band".into(),
            ));
        }
        let half = cst::<F>(0.5);
        let lo_p = (F::one() - level) * half;
        let hi_p = (F::one() + level) * half;
        let mut mean = Vec::with_capacity(grid.len());
        let mut lower = Vec::with_capacity(grid.len());
        let mut upper = Vec::with_capacity(grid.len());
        for x in grid {
            let mut draws = self.predict_reporting(x);
            let m = draws.iter().fold(F::zero(), |a, &v| a + v) / cnt::<F>(draws.len());
            draws.sort_by(|a, b| a.partial_cmp(b).expect("finite predictions"));
            mean.push(m);
            lower.push(quantile_type7(&draws, lo_p));
            upper.push(quantile_type7(&draws, hi_p));
        }
        Ok(CurveSummary {
            grid: grid.to_vec(),
            mean,
            lower,
            upper,
            level,
        })
    }

    /// In-sample summary: fit metric, mean tree depth over retained draws,
    /// acceptance rates, and the retained draw count.
    pub fn fit_report(&self, data: &Dataset<F>) -> FitReport<F> {
        let n = data.n();
        let metric = if self.variant.is_probit() {
            let clamp_lo = cst::<F>(1e-12);
            let clamp_hi = F::one() - clamp_lo;
            let mut total = F::zero();
            for i in 0..n {
                let probs = self.predict_prob(data.row(i)).expect("probit variant");
                let p_hat = probs.iter().fold(F::zero(), |a, &v| a + v) / cnt::<F>(probs.len());
                let p_hat = p_hat.max(clamp_lo).min(clamp_hi);
                let y = data.y()[i];
                total -= y * p_hat.ln() + (F::one() - y) * (F::one() - p_hat).ln();
            }
            FitMetric::LogLoss(total / cnt::<F>(n))
        } else {
            let mut ss = F::zero();
            for i in 0..n {
                let preds = self.predict_g(data.row(i));
                let y_hat = preds.iter().fold(F::zero(), |a, &v| a + v) / cnt::<F>(preds.len());
                let r = data.y()[i] - y_hat;
                ss += r * r;
            }
            FitMetric::Rmse((ss / cnt::<F>(n)).sqrt())
        };
        let mut depth_sum = 0usize;
        let mut tree_count = 0usize;
        for forest in &self.snapshots {
            for t in forest {
                depth_sum += t.max_depth() as usize;
                tree_count += 1;
            }
        }
        FitReport {
            metric,
            mean_tree_depth: cnt::<F>(depth_sum) / cnt::<F>(tree_count.max(1)),
            birth_rate: self.accept.birth_rate(),
            death_rate: self.accept.death_rate(),
            draws: self.num_draws(),
        }
    }

    /// Write the draw store: `meta.txt` plus one forest file per draw.
    pub fn save(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir).map_err(|e| BartError::io(dir, e))?;
        let meta_path = dir.join("meta.txt");
        let mut meta = String::new();
        meta.push_str("format 1\n");
        meta.push_str(&format!("variant {}\n", self.variant.name()));
        if let Some(spec) = self.variant.monotone_spec() {
            let parts: Vec<String> = spec
                .coords
                .iter()
                .map(|&(c, d)| {
                    format!("{}:{}", c, if d == Direction::Nonincreasing { "-" } else { "+" })
                })
                .collect();
            meta.push_str(&format!("monotone {}\n", parts.join(",")));
        }
        meta.push_str(&format!("covariates {}\n", self.covariates.join(",")));
        meta.push_str(&format!("outcome {}\n", self.outcome));
        meta.push_str(&format!("trees {}\n", self.config.num_trees));
        meta.push_str(&format!("k {}\n", self.config.k));
        meta.push_str(&format!("alpha {}\n", self.config.alpha));
        meta.push_str(&format!("beta {}\n", self.config.beta));
        meta.push_str(&format!("nu {}\n", self.config.nu));
        meta.push_str(&format!("q {}\n", self.config.q));
        meta.push_str(&format!("num_cut {}\n", self.config.num_cut));
        meta.push_str(&format!("burn_in {}\n", self.config.burn_in));
        meta.push_str(&format!("keep {}\n", self.config.keep));
        meta.push_str(&format!("thin {}\n", self.config.thin));
        meta.push_str(&format!("seed {}\n", self.config.seed));
        meta.push_str(&format!("offset {}\n", self.offset));
        if let Some(s) = &self.scaling {
            meta.push_str(&format!("scale_shift {}\n", s.shift));
            meta.push_str(&format!("scale_factor {}\n", s.scale));
        }
        meta.push_str(&format!(
            "accept {} {} {} {} {}\n",
            self.accept.birth_proposed,
            self.accept.birth_accepted,
            self.accept.death_proposed,
            self.accept.death_accepted,
            self.accept.skipped
        ));
        fs::write(&meta_path, meta).map_err(|e| BartError::io(&meta_path, e))?;

        for (idx, forest) in self.snapshots.iter().enumerate() {
            let path = dir.join(format!("forest_{idx:05}.txt"));
            let mut buf = Vec::new();
            writeln!(buf, "draw {idx}").expect("write to vec");
            if let Some(sigma) = self.sigma_trace.get(idx) {
                writeln!(buf, "sigma {sigma}").expect("write to vec");
            }
            writeln!(buf, "trees {}", forest.len()).expect("write to vec");
            for tree in forest {
                tree.write_text(&mut buf).expect("write to vec");
            }
            fs::write(&path, buf).map_err(|e| BartError::io(&path, e))?;
        }
        Ok(())
    }

    /// Load a draw store written by [`PosteriorDraws::save`].
    pub fn load(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref();
        let meta_path = dir.join("meta.txt");
        let meta_text =
            fs::read_to_string(&meta_path).map_err(|e| BartError::io(&meta_path, e))?;
        let mut fields = std::collections::BTreeMap::new();
        for line in meta_text.lines() {
            if let Some((key, value)) = line.split_once(' ') {
                fields.insert(key.to_string(), value.to_string());
            }
        }
        let get = |key: &str| -> Result<&String> {
            fields
                .get(key)
                .ok_or_else(|| BartError::DrawStore(format!("meta.txt missing '{key}'")))
        };
        let parse_f = |key: &str| -> Result<F> {
            get(key)?
                .parse::<F>()
                .map_err(|_| BartError::DrawStore(format!("meta.txt has invalid '{key}'")))
        };
        let parse_usize = |key: &str| -> Result<usize> {
            get(key)?
                .parse::<usize>()
                .map_err(|_| BartError::DrawStore(format!("meta.txt has invalid '{key}'")))
        };

        let monotone = match fields.get("monotone") {
            None => None,
            Some(text) => {
                let mut coords = Vec::new();
                for part in text.split(',') {
                    let (idx, dir) = match part.split_once(':') {
                        Some((i, "-")) => (i, Direction::Nonincreasing),
                        Some((i, "+")) => (i, Direction::Nondecreasing),
                        _ => {
                            return Err(BartError::DrawStore(format!(
                                "bad monotone entry '{part}'"
                            )))
                        }
                    };
                    let idx: usize = idx
                        .parse()
                        .map_err(|_| BartError::DrawStore(format!("bad monotone entry '{part}'")))?;
                    coords.push((idx, dir));
                }
                Some(MonotoneSpec { coords })
            }
        };
        let variant = match (get("variant")?.as_str(), monotone) {
            ("bart", None) => ModelVariant::Continuous,
            ("pbart", None) => ModelVariant::Probit,
            ("mbart", Some(spec)) => ModelVariant::MonotoneContinuous(spec),
            ("pmbart", Some(spec)) => ModelVariant::ProbitMonotone(spec),
            (name, _) => {
                return Err(BartError::DrawStore(format!(
                    "variant '{name}' inconsistent with monotone spec"
                )))
            }
        };

        let scaling = if fields.contains_key("scale_shift") {
            Some(OutcomeScaling {
                shift: parse_f("scale_shift")?,
                scale: parse_f("scale_factor")?,
            })
        } else {
            None
        };
        let accept = {
            let text = get("accept")?;
            let nums: Vec<u64> = text
                .split_whitespace()
                .map(|t| t.parse::<u64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| BartError::DrawStore("meta.txt has invalid 'accept'".into()))?;
            if nums.len() != 5 {
                return Err(BartError::DrawStore("meta.txt has invalid 'accept'".into()));
            }
            MoveStats {
                birth_proposed: nums[0],
                birth_accepted: nums[1],
                death_proposed: nums[2],
                death_accepted: nums[3],
                skipped: nums[4],
            }
        };
        let config = ModelConfig {
            variant: variant.clone(),
            num_trees: parse_usize("trees")?,
            k: parse_f("k")?,
            alpha: parse_f("alpha")?,
            beta: parse_f("beta")?,
            nu: parse_f("nu")?,
            q: parse_f("q")?,
            num_cut: parse_usize("num_cut")?,
            burn_in: parse_usize("burn_in")?,
            keep: parse_usize("keep")?,
            thin: parse_usize("thin")?,
            seed: get("seed")?
                .parse()
                .map_err(|_| BartError::DrawStore("meta.txt has invalid 'seed'".into()))?,
            max_depth: None,
        };

        let keep = config.keep;
        let mut snapshots = Vec::with_capacity(keep);
        let mut sigma_trace = Vec::new();
        for idx in 0..keep {
            let path = dir.join(format!("forest_{idx:05}.txt"));
            let text = fs::read_to_string(&path).map_err(|e| BartError::io(&path, e))?;
            let lines: Vec<&str> = text.lines().collect();
            let mut cursor = 0usize;
            let expect_line = |cursor: usize, prefix: &str| -> Result<&str> {
                lines
                    .get(cursor)
                    .filter(|l| l.starts_with(prefix))
                    .copied()
                    .ok_or_else(|| {
                        BartError::DrawStore(format!(
                            "{}: expected '{prefix}' at line {}",
                            path.display(),
                            cursor + 1
                        ))
                    })
            };
            expect_line(cursor, "draw ")?;
            cursor += 1;
            if variant.is_probit() {
                // No sigma line.
            } else {
                let line = expect_line(cursor, "sigma ")?;
                let sigma: F = line[6..]
                    .trim()
                    .parse()
                    .map_err(|_| BartError::DrawStore("invalid sigma line".into()))?;
                sigma_trace.push(sigma);
                cursor += 1;
            }
            let line = expect_line(cursor, "trees ")?;
            let m: usize = line[6..]
                .trim()
                .parse()
                .map_err(|_| BartError::DrawStore("invalid trees line".into()))?;
            cursor += 1;
            let mut forest = Vec::with_capacity(m);
            for _ in 0..m {
                let (tree, consumed) = Tree::parse_text(&lines, cursor)?;
                forest.push(tree);
                cursor += consumed;
            }
            snapshots.push(forest);
        }

        Ok(PosteriorDraws {
            variant,
            offset: parse_f("offset")?,
            scaling,
            snapshots,
            sigma_trace,
            config,
            covariates: get("covariates")?.split(',').map(str::to_string).collect(),
            outcome: get("outcome")?.clone(),
            accept,
        })
    }
}

impl<F: Real> CurveSummary<F> {
    /// CSV with columns x, mean, lo, hi; requires a one-dimensional grid.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> Result<()> {
        let io_err = |e: std::io::Error| BartError::DrawStore(format!("curve write: {e}"));
        writeln!(w, "x,mean,lo,hi").map_err(io_err)?;
        for (i, x) in self.grid.iter().enumerate() {
            if x.len() != 1 {
                return Err(BartError::InvalidConfig(
                    "curve CSV needs a single-covariate grid".into(),
                ));
            }
            writeln!(w, "{},{},{},{}", x[0], self.mean[i], self.lower[i], self.upper[i])
                .map_err(io_err)?;
        }
        Ok(())
    }
}

/// Type-7 empirical quantile (linear interpolation between order statistics)
/// of an already sorted slice.
pub fn quantile_type7<F: Real>(sorted: &[F], p: F) -> F {
    assert!(!sorted.is_empty());
    let n = sorted.len();
    let h = p * cnt::<F>(n - 1);
    let lo = h.floor();
    let idx = lo.to_usize().unwrap_or(0).min(n - 1);
    if idx + 1 >= n {
        return sorted[n - 1];
    }
    sorted[idx] + (h - lo) * (sorted[idx + 1] - sorted[idx])
}

/// Write the per-iteration scalar trace CSV.
pub fn write_trace_csv<F: Real>(path: impl AsRef<Path>, trace: &[TraceRow<F>]) -> Result<()> {
    let path = path.as_ref();
    let has_sigma = trace.first().map(|r| r.sigma.is_some()).unwrap_or(false);
    let mut buf = String::new();
    if has_sigma {
        buf.push_str(
            "iteration,sigma,birth_proposed,birth_accepted,death_proposed,death_accepted,skipped,mean_depth\n",
        );
    } else {
        buf.push_str(
            "iteration,birth_proposed,birth_accepted,death_proposed,death_accepted,skipped,mean_depth\n",
        );
    }
    for row in trace {
        if has_sigma {
            buf.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                row.iteration,
                row.sigma.expect("sigma present"),
                row.moves.birth_proposed,
                row.moves.birth_accepted,
                row.moves.death_proposed,
                row.moves.death_accepted,
                row.moves.skipped,
                row.mean_depth
            ));
        } else {
            buf.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                row.iteration,
                row.moves.birth_proposed,
                row.moves.birth_accepted,
                row.moves.death_proposed,
                row.moves.death_accepted,
                row.moves.skipped,
                row.mean_depth
            ));
        }
    }
    fs::write(path, buf).map_err(|e| BartError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::SplitRule;

    fn tiny_draws(values: Vec<Vec<f64>>) -> PosteriorDraws<f64> {
        // Each inner vec is one draw's two-tree forest of constant leaves.
        let snapshots: Vec<Vec<Tree<f64>>> = values
            .into_iter()
            .map(|vs| vs.into_iter().map(Tree::leaf).collect())
            .collect();
        PosteriorDraws {
            variant: ModelVariant::Probit,
            offset: 0.0,
            scaling: None,
            snapshots,
            sigma_trace: vec![],
            config: ModelConfig::for_variant(ModelVariant::Probit),
            covariates: vec!["x".into()],
            outcome: "y".into(),
            accept: MoveStats::default(),
        }
    }

    #[test]
    fn predict_g_sums_trees() {
        let draws = tiny_draws(vec![vec![0.0, 0.0], vec![1.0, 0.5]]);
        assert_eq!(draws.predict_g(&[0.3]), vec![0.0, 1.5]);
    }

    #[test]
    fn predict_prob_is_phi_of_g_plus_offset() {
        let mut draws = tiny_draws(vec![vec![0.0, 0.0]]);
        draws.offset = 1.2816;
        let p = draws.predict_prob(&[0.0]).unwrap();
        assert!((p[0] - 0.9).abs() < 2e-5);
    }

    #[test]
    fn predict_prob_rejects_continuous() {
        let mut draws = tiny_draws(vec![vec![0.0, 0.0]]);
        draws.variant = ModelVariant::Continuous;
        draws.config = ModelConfig::for_variant(ModelVariant::Continuous);
        assert!(draws.predict_prob(&[0.0]).is_err());
    }

    #[test]
    fn type7_quantiles() {
        let v = vec![1.0f64, 2.0, 3.0, 4.0];
        assert_eq!(quantile_type7(&v, 0.0), 1.0);
        assert_eq!(quantile_type7(&v, 1.0), 4.0);
        assert_eq!(quantile_type7(&v, 0.5), 2.5);
        assert!((quantile_type7(&v, 0.05) - 1.15).abs() < 1e-15);
    }

    #[test]
    fn curve_summary_band_shape() {
        let draws = tiny_draws(vec![vec![-0.2, 0.0], vec![0.1, 0.0], vec![0.3, 0.0]]);
        let grid = vec![vec![0.0f64], vec![1.0]];
        let s = draws.curve_summary(&grid, 0.9).unwrap();
        assert_eq!(s.mean.len(), 2);
        for i in 0..2 {
            assert!(s.lower[i] <= s.mean[i] && s.mean[i] <= s.upper[i]);
            assert!(s.lower[i] >= 0.0 && s.upper[i] <= 1.0);
        }
        // Constant draws make a zero-width band.
        let constant = tiny_draws(vec![vec![0.4, 0.0], vec![0.4, 0.0]]);
        let s = constant.curve_summary(&grid, 0.9).unwrap();
        assert_eq!(s.lower[0], s.upper[0]);
    }

    #[test]
    fn fit_report_log_loss_reference_points() {
        // All predictions 0.5 gives log-loss ln 2 regardless of y.
        let draws = tiny_draws(vec![vec![0.0, 0.0], vec![0.0, 0.0]]);
        let d = Dataset::new(
            vec!["x".into()],
            "y",
            vec![0.0f64, 1.0, 2.0],
            vec![1.0, 0.0, 1.0],
        )
        .unwrap();
        let report = draws.fit_report(&d);
        match report.metric {
            FitMetric::LogLoss(ll) => assert!((ll - std::f64::consts::LN_2).abs() < 1e-12),
            _ => panic!("expected log-loss"),
        }
        assert_eq!(report.draws, 2);
    }

    #[test]
    fn perfect_predictions_have_zero_log_loss() {
        // Huge leaf values push Phi to the clamp; log-loss collapses to ~0.
        let snapshots = vec![vec![Tree::leaf(50.0), Tree::leaf(0.0)]];
        let mut draws = tiny_draws(vec![]);
        draws.snapshots = snapshots;
        let d = Dataset::new(vec!["x".into()], "y", vec![0.0f64, 1.0], vec![1.0, 1.0]).unwrap();
        match draws.fit_report(&d).metric {
            FitMetric::LogLoss(ll) => assert!(ll.abs() < 1e-11, "log-loss {ll}"),
            _ => panic!("expected log-loss"),
        }
    }

    #[test]
    fn summary_mean_is_mean_of_per_draw_predictions() {
        let draws = tiny_draws(vec![vec![-0.4, 0.1], vec![0.2, 0.0], vec![0.9, -0.3]]);
        let grid = vec![vec![0.2f64]];
        let s = draws.curve_summary(&grid, 0.5).unwrap();
        let per_draw = draws.predict_prob(&grid[0]).unwrap();
        let manual = per_draw.iter().sum::<f64>() / per_draw.len() as f64;
        assert!((s.mean[0] - manual).abs() < 1e-15);
    }

    #[test]
    fn band_coverage_matches_nominal_level() {
        // Type-7 quantile band from a known distribution covers fresh draws
        // from the same distribution at the nominal rate.
        use rand::SeedableRng;
        use rand_distr::Distribution;
        let mut rng = rand_xoshiro::Xoshiro256PlusPlus::seed_from_u64(2);
        let normal = rand_distr::StandardNormal;
        let mut band_draws: Vec<f64> = (0..5000).map(|_| normal.sample(&mut rng)).collect();
        band_draws.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let lo = quantile_type7(&band_draws, 0.05);
        let hi = quantile_type7(&band_draws, 0.95);
        let fresh = 200_000;
        let mut inside = 0usize;
        for _ in 0..fresh {
            let x: f64 = normal.sample(&mut rng);
            if x >= lo && x <= hi {
                inside += 1;
            }
        }
        let coverage = inside as f64 / fresh as f64;
        assert!((coverage - 0.9).abs() < 0.01, "coverage {coverage}");
    }

    #[test]
    fn save_load_round_trip() {
        let mut tree = Tree::leaf(0.0f64);
        tree = tree
            .birth(0, SplitRule { var: 0, cut_index: 3, cut_value: 0.25 }, -0.11, 0.22)
            .unwrap();
        let spec = MonotoneSpec { coords: vec![(0, Direction::Nonincreasing)] };
        let mut config = ModelConfig::for_variant(ModelVariant::ProbitMonotone(spec.clone()));
        config.keep = 2;
        let draws = PosteriorDraws {
            variant: ModelVariant::ProbitMonotone(spec),
            offset: 0.125,
            scaling: None,
            snapshots: vec![vec![tree.clone(), Tree::leaf(0.5)], vec![Tree::leaf(-0.25), tree]],
            sigma_trace: vec![],
            config,
            covariates: vec!["x".into()],
            outcome: "y".into(),
            accept: MoveStats {
                birth_proposed: 10,
                birth_accepted: 4,
                death_proposed: 6,
                death_accepted: 2,
                skipped: 1,
            },
        };
        let dir = std::env::temp_dir().join(format!("bart_draws_{}", rand::random::<u64>()));
        draws.save(&dir).unwrap();
        let loaded = PosteriorDraws::<f64>::load(&dir).unwrap();
        std::fs::remove_dir_all(&dir).ok();
        assert_eq!(loaded.snapshots, draws.snapshots);
        assert_eq!(loaded.offset, draws.offset);
        assert_eq!(loaded.variant, draws.variant);
        assert_eq!(loaded.accept, draws.accept);
        assert_eq!(loaded.covariates, draws.covariates);
    }
}
