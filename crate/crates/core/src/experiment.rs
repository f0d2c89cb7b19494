//! Monte Carlo harness: network realizations per trial, the outage of a
//! typical reference link, averages and area spectral efficiency across a
//! densification sweep, and per-uplink rate/outage curves.
//!
//! Densification keeps the station layout and the mobile density fixed and
//! rescales the network: at base-station-per-mobile ratio `C/M` the network
//! holds `M = C / (C/M)` mobiles over an area of `M / lambda`.

use std::f64::consts::TAU;

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::outage::{beta_for_rate, code_rate, conditional_outage, OutageInputs};
use crate::par::{map_indexed, Execution};
use crate::propagation::{db_to_linear, PropagationParams, RoundingMode};
use crate::radio::{
    build_profile, BeamParams, FadingModel, HoppingConfig, InterferenceProfile, LinkSettings,
};
use crate::stream::{key, stream, Purpose};
use crate::topology::{
    generate_grid_stations, place_mobiles_around, BaseStation, NetworkRealization, NetworkTopology,
    Point, RealizationSpec, Rect,
};

/// Densification grid used for the average-outage sweeps.
pub const DEFAULT_CM_GRID: [f64; 7] = [0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub trials: usize,
    pub seed: u64,
    /// Mobiles per km^2.
    pub density_per_km2: f64,
    /// SINR thresholds, dB.
    pub beta_db: Vec<f64>,
    /// Typical reference link length at `C/M = 0.01`, km.
    pub d_r0_km: f64,
    pub cm_grid: Vec<f64>,
    /// Fraction of the Shannon bound achieved by the code, `l_s`.
    pub shannon_loss: f64,
    pub pr_over_n_db: f64,
    pub max_interferers: usize,
    pub shadowing: Vec<bool>,
    pub hopping: Vec<bool>,
    pub fading: Vec<FadingModel>,
    pub rounding: RoundingMode,
    /// Keep every trial's outage in the summary rows.
    pub keep_trials: bool,
    pub propagation: PropagationParams,
    pub beam: BeamParams,
    pub hopset: HoppingConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            trials: 1000,
            seed: 1,
            density_per_km2: 20.0,
            beta_db: vec![3.0],
            d_r0_km: 0.1,
            cm_grid: DEFAULT_CM_GRID.to_vec(),
            shannon_loss: 0.794,
            pr_over_n_db: 30.0,
            max_interferers: 30,
            shadowing: vec![true, false],
            hopping: vec![true, false],
            fading: vec![FadingModel::Distance],
            rounding: RoundingMode::Nearest,
            keep_trials: false,
            propagation: PropagationParams::default(),
            beam: BeamParams::default(),
            hopset: HoppingConfig::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(invalid("need at least one trial"));
        }
        if !(self.density_per_km2 > 0.0) || !self.density_per_km2.is_finite() {
            return Err(invalid("mobile density must be positive"));
        }
        if self.beta_db.is_empty()
            || self.cm_grid.is_empty()
            || self.shadowing.is_empty()
            || self.hopping.is_empty()
            || self.fading.is_empty()
        {
            return Err(invalid("threshold, grid and flag lists must be nonempty"));
        }
        if self.beta_db.iter().any(|b| !b.is_finite()) {
            return Err(invalid("thresholds must be finite"));
        }
        for &cm in &self.cm_grid {
            typical_link_length(cm, self.d_r0_km)?;
        }
        if !(self.d_r0_km > 0.0) {
            return Err(invalid("d_r0 must be positive"));
        }
        if !(self.shannon_loss > 0.0) {
            return Err(invalid("shannon_loss must be positive"));
        }
        if self.max_interferers == 0 {
            return Err(invalid("max_interferers must be positive"));
        }
        self.propagation.validate()?;
        self.beam.validate()?;
        self.hopset.validate()
    }

    pub fn link_settings(&self, fading: FadingModel) -> LinkSettings {
        LinkSettings {
            beam: self.beam,
            hopping: self.hopset,
            pr_over_n_db: self.pr_over_n_db,
            max_interferers: self.max_interferers,
            fading,
            rounding: self.rounding,
        }
    }

    fn propagation_for(&self, shadowing: bool) -> PropagationParams {
        if shadowing {
            self.propagation
        } else {
            self.propagation.without_shadowing()
        }
    }
}

/// Typical reference link length `d_r0 / (10 sqrt(C/M))`.
pub fn typical_link_length(cm_ratio: f64, d_r0: f64) -> Result<f64> {
    if !(0.01..=1.0).contains(&cm_ratio) {
        return Err(invalid(format!("C/M = {cm_ratio} outside [0.01, 1]")));
    }
    Ok(d_r0 / (10.0 * cm_ratio.sqrt()))
}

/// Mean, sample standard deviation and area spectral efficiency of a set of trial outages.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub avg_outage: f64,
    pub std_outage: f64,
    pub ase: f64,
}

/// Averages trial outages; `ase = density * rate * (1 - mean)`.
pub fn summarize(outages: &[f64], density: f64, rate: f64) -> Result<Summary> {
    if outages.is_empty() {
        return Err(invalid("cannot summarize zero trials"));
    }
    let n = outages.len() as f64;
    let mean = outages.iter().sum::<f64>() / n;
    let std = if outages.len() > 1 {
        (outages.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    Ok(Summary {
        avg_outage: mean,
        std_outage: std,
        ase: density * rate * (1.0 - mean),
    })
}

/// `stations` on a jittered grid over `region`, reproducible from `seed`.
pub fn synthetic_stations(
    stations: usize,
    region: Rect,
    jitter: f64,
    seed: u64,
) -> Result<Vec<BaseStation>> {
    let mut rng = stream(seed, Purpose::Placement, &[u64::MAX]);
    generate_grid_stations(stations, region, jitter, &mut rng)
}

/// Synthetic deployment: `stations` on a jittered grid over a `side` km
/// square with a centered `window` km measurement square.
pub fn synthetic_topology(
    stations: usize,
    side_km: f64,
    window_km: f64,
    jitter: f64,
    zeta: usize,
    seed: u64,
) -> Result<NetworkTopology> {
    let region = Rect::sized(side_km, side_km)?;
    let window = region.centered_sub(window_km, window_km)?;
    NetworkTopology::new(
        synthetic_stations(stations, region, jitter, seed)?,
        zeta,
        region,
        window,
    )
}

/// One densification point: the rescaled network and its reference link length.
#[derive(Debug, Clone)]
pub struct GridPoint {
    pub index: usize,
    pub cm_ratio: f64,
    pub d_r_km: f64,
    /// Mobiles in the network, the reference included.
    pub mobiles: usize,
    pub topology: NetworkTopology,
}

/// Outage of one trial's reference link for every (fading, hopping, beta)
/// combination of the configuration, in that nesting order.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub outages: Vec<f64>,
}

/// One scenario of a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    pub shadowing: bool,
    pub hopping: bool,
    pub fading: FadingModel,
    pub beta_db: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub cm_ratio: f64,
    pub d_r_km: f64,
    pub beta_db: f64,
    pub shadowing: bool,
    pub hopping: bool,
    pub fading_model: FadingModel,
    pub avg_outage: f64,
    pub std_outage: f64,
    pub rate_bpcu: f64,
    pub ase_bpcu_per_km2: f64,
    pub n_trials: usize,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trial_outages: Option<Vec<f64>>,
}

/// Per-uplink outage as a function of code rate, plus their average.
#[derive(Debug, Clone, PartialEq)]
pub struct RateCurves {
    pub rates: Vec<f64>,
    /// `(mobile, serving sector)` of each uplink.
    pub uplinks: Vec<(usize, usize)>,
    /// `curves[u][k]` is the outage of uplink `u` at `rates[k]`.
    pub curves: Vec<Vec<f64>>,
    pub average: Vec<f64>,
}

impl RateCurves {
    /// Standard error of the average curve at each rate, across uplinks.
    pub fn average_stderr(&self) -> Vec<f64> {
        let n = self.curves.len();
        (0..self.rates.len())
            .map(|k| {
                if n < 2 {
                    return 0.0;
                }
                let mean = self.average[k];
                let var = self
                    .curves
                    .iter()
                    .map(|c| (c[k] - mean).powi(2))
                    .sum::<f64>()
                    / (n as f64 - 1.0);
                (var / n as f64).sqrt()
            })
            .collect()
    }

    /// The curves of the uplinks at positions `picks`, averaged among themselves.
    pub fn subset(&self, picks: &[usize]) -> RateCurves {
        let curves: Vec<Vec<f64>> = picks.iter().map(|&u| self.curves[u].clone()).collect();
        let n = curves.len() as f64;
        let average = (0..self.rates.len())
            .map(|k| curves.iter().map(|c| c[k]).sum::<f64>() / n)
            .collect();
        RateCurves {
            rates: self.rates.clone(),
            uplinks: picks.iter().map(|&u| self.uplinks[u]).collect(),
            curves,
            average,
        }
    }
}

/// Outage of `profile` at every rate in `rates`.
pub fn outage_vs_rate(
    profile: &InterferenceProfile,
    rates: &[f64],
    shannon_loss: f64,
    hopping: bool,
) -> Result<Vec<f64>> {
    rates
        .iter()
        .map(|&r| {
            let beta = beta_for_rate(r, shannon_loss)?;
            let inputs = OutageInputs {
                beta,
                profile,
                hopping,
            };
            conditional_outage(inputs)
        })
        .collect()
}

/// Rate/outage curves for the given uplinks of one realization. Each
/// uplink's interferer subset comes from its own stream keyed by `seed` and
/// the mobile index, so a curve does not depend on which others are asked for.
pub fn rate_outage_curve(
    realization: &NetworkRealization<'_>,
    uplinks: &[usize],
    rates: &[f64],
    settings: &LinkSettings,
    shannon_loss: f64,
    seed: u64,
) -> Result<RateCurves> {
    if uplinks.is_empty() {
        return Err(invalid("need at least one uplink"));
    }
    if rates.iter().any(|r| !(*r > 0.0)) {
        return Err(invalid("rates must be positive"));
    }
    let mut curves = Vec::with_capacity(uplinks.len());
    let mut links = Vec::with_capacity(uplinks.len());
    for &r in uplinks {
        let j = realization
            .serving(r)
            .ok_or_else(|| invalid(format!("uplink mobile {r} is inactive")))?;
        let mut rng = stream(seed, Purpose::Profiles, &[r as u64]);
        let profile = build_profile(realization, r, j, settings, &mut rng)?;
        curves.push(outage_vs_rate(&profile, rates, shannon_loss, true)?);
        links.push((r, j));
    }
    let n = curves.len() as f64;
    let average = (0..rates.len())
        .map(|k| curves.iter().map(|c| c[k]).sum::<f64>() / n)
        .collect();
    Ok(RateCurves {
        rates: rates.to_vec(),
        uplinks: links,
        curves,
        average,
    })
}

/// Chosen uplink curves together with the curves of every active uplink in
/// the measurement window.
#[derive(Debug, Clone, PartialEq)]
pub struct RateStudy {
    pub chosen: RateCurves,
    pub population: RateCurves,
}

/// A configured experiment over a baseline topology.
#[derive(Debug, Clone)]
pub struct Experiment {
    config: ExperimentConfig,
    baseline: NetworkTopology,
}

impl Experiment {
    pub fn new(config: ExperimentConfig, baseline: NetworkTopology) -> Result<Self> {
        config.validate()?;
        if baseline.sectors_per_station() != config.beam.sectors_per_station {
            return Err(invalid(
                "topology sector count disagrees with beam.sectors_per_station",
            ));
        }
        Ok(Self { config, baseline })
    }

    pub fn config(&self) -> &ExperimentConfig {
        &self.config
    }

    pub fn baseline(&self) -> &NetworkTopology {
        &self.baseline
    }

    /// The network rescaled for ratio `cm_ratio`.
    pub fn grid_point(&self, index: usize, cm_ratio: f64) -> Result<GridPoint> {
        let d_r_km = typical_link_length(cm_ratio, self.config.d_r0_km)?;
        let c = self.baseline.stations().len() as f64;
        let mobiles = ((c / cm_ratio).round() as usize).max(1);
        let area = mobiles as f64 / self.config.density_per_km2;
        let scale = (area / self.baseline.region().area()).sqrt();
        let topology = self.baseline.scaled(scale)?;
        Ok(GridPoint {
            index,
            cm_ratio,
            d_r_km,
            mobiles,
            topology,
        })
    }

    pub fn grid(&self) -> Result<Vec<GridPoint>> {
        self.config
            .cm_grid
            .iter()
            .enumerate()
            .map(|(i, &cm)| self.grid_point(i, cm))
            .collect()
    }

    /// Builds trial `trial`'s realization with the reference mobile (index 0)
    /// at distance `d_r` from the station nearest the window center.
    /// Returns the realization and the reference sector.
    pub fn reference_realization<'g>(
        &self,
        grid: &'g GridPoint,
        trial: u64,
        shadowing: bool,
    ) -> Result<(NetworkRealization<'g>, usize)> {
        let cfg = &self.config;
        let path = [grid.index as u64, trial];
        let topo = &grid.topology;
        let station = topo.nearest_station(topo.window().center());
        let mut ref_rng = stream(cfg.seed, Purpose::Reference, &path);
        let theta = ref_rng.random::<f64>() * TAU;
        let x_r =
            topo.stations()[station].position + Point::new(theta.cos(), theta.sin()) * grid.d_r_km;
        let j = topo.covering_sector(station, x_r)?;

        let mut place_rng = stream(cfg.seed, Purpose::Placement, &path);
        let mobiles = place_mobiles_around(
            topo.region(),
            &[x_r],
            grid.mobiles - 1,
            cfg.propagation.d0_km,
            &mut place_rng,
        )?;
        let spec = RealizationSpec {
            prop: cfg.propagation_for(shadowing),
            shadow_seed: key(cfg.seed, Purpose::Shadowing, &path),
            capacity: cfg.hopset.sector_capacity(),
            pinned: vec![(0, j)],
        };
        let mut cap_rng = stream(cfg.seed, Purpose::Capacity, &path);
        let real = NetworkRealization::build(topo, mobiles, spec, &mut cap_rng)?;
        Ok((real, j))
    }

    /// Reference-link outages of one trial for every (fading, hopping, beta)
    /// combination. Interferer subsets are drawn from a per-trial stream, so
    /// all combinations see the same selection.
    pub fn run_trial(&self, grid: &GridPoint, trial: u64, shadowing: bool) -> Result<TrialOutcome> {
        let cfg = &self.config;
        let (real, j) = self.reference_realization(grid, trial, shadowing)?;
        let betas: Vec<f64> = cfg.beta_db.iter().map(|&b| db_to_linear(b)).collect();
        let mut outages = Vec::with_capacity(cfg.fading.len() * cfg.hopping.len() * betas.len());
        for &fading in &cfg.fading {
            let mut sel_rng = stream(cfg.seed, Purpose::Selection, &[grid.index as u64, trial]);
            let profile = build_profile(&real, 0, j, &cfg.link_settings(fading), &mut sel_rng)?;
            for &hopping in &cfg.hopping {
                for &beta in &betas {
                    outages.push(conditional_outage(OutageInputs {
                        beta,
                        profile: &profile,
                        hopping,
                    })?);
                }
            }
        }
        Ok(TrialOutcome { outages })
    }

    /// Outage of one trial under one scenario.
    pub fn trial_outage(&self, grid: &GridPoint, trial: u64, scenario: Scenario) -> Result<f64> {
        let (real, j) = self.reference_realization(grid, trial, scenario.shadowing)?;
        let mut sel_rng = stream(
            self.config.seed,
            Purpose::Selection,
            &[grid.index as u64, trial],
        );
        let profile = build_profile(
            &real,
            0,
            j,
            &self.config.link_settings(scenario.fading),
            &mut sel_rng,
        )?;
        let inputs = OutageInputs {
            beta: db_to_linear(scenario.beta_db),
            profile: &profile,
            hopping: scenario.hopping,
        };
        conditional_outage(inputs)
    }

    /// Trial outcomes for one grid point and shadowing setting, in trial order.
    pub fn run_trials(
        &self,
        grid: &GridPoint,
        shadowing: bool,
        exec: Execution,
    ) -> Result<Vec<TrialOutcome>> {
        map_indexed(exec, self.config.trials, |t| {
            self.run_trial(grid, t as u64, shadowing)
        })
        .into_iter()
        .collect()
    }

    /// Full sweep: one row per (grid point, beta, shadowing, hopping, fading).
    pub fn sweep(&self, exec: Execution) -> Result<Vec<SweepRow>> {
        let cfg = &self.config;
        let mut rows = Vec::new();
        for grid in self.grid()? {
            let per_shadow: Vec<Vec<TrialOutcome>> = cfg
                .shadowing
                .iter()
                .map(|&s| self.run_trials(&grid, s, exec))
                .collect::<Result<_>>()?;
            for (bi, &beta_db) in cfg.beta_db.iter().enumerate() {
                let rate = code_rate(db_to_linear(beta_db), cfg.shannon_loss)?;
                for (si, &shadowing) in cfg.shadowing.iter().enumerate() {
                    for (hi, &hopping) in cfg.hopping.iter().enumerate() {
                        for (fi, &fading) in cfg.fading.iter().enumerate() {
                            let k = (fi * cfg.hopping.len() + hi) * cfg.beta_db.len() + bi;
                            let eps: Vec<f64> =
                                per_shadow[si].iter().map(|o| o.outages[k]).collect();
                            let s = summarize(&eps, cfg.density_per_km2, rate)?;
                            rows.push(SweepRow {
                                cm_ratio: grid.cm_ratio,
                                d_r_km: grid.d_r_km,
                                beta_db,
                                shadowing,
                                hopping,
                                fading_model: fading,
                                avg_outage: s.avg_outage,
                                std_outage: s.std_outage,
                                rate_bpcu: rate,
                                ase_bpcu_per_km2: s.ase,
                                n_trials: eps.len(),
                                seed: cfg.seed,
                                trial_outages: cfg.keep_trials.then_some(eps),
                            });
                        }
                    }
                }
            }
        }
        Ok(rows)
    }

    /// One realization of `grid`'s network holding a typical uplink from
    /// every station inside the measurement window: a mobile at distance
    /// `d_r` and a uniform angle, pinned to the covering sector. Returns the
    /// realization and the uplink mobiles, which come first.
    pub fn uplink_realization<'g>(
        &self,
        grid: &'g GridPoint,
        shadowing: bool,
    ) -> Result<(NetworkRealization<'g>, Vec<usize>)> {
        let cfg = &self.config;
        let topo = &grid.topology;
        let tag = [grid.index as u64, u64::MAX];
        let window = topo.window();
        let mut fixed = Vec::new();
        let mut pinned = Vec::new();
        for (s, st) in topo
            .stations()
            .iter()
            .enumerate()
            .filter(|(_, st)| window.contains(st.position))
        {
            let theta = stream(cfg.seed, Purpose::Reference, &[tag[0], tag[1], s as u64])
                .random::<f64>()
                * TAU;
            let x = st.position + Point::new(theta.cos(), theta.sin()) * grid.d_r_km;
            pinned.push((fixed.len(), topo.covering_sector(s, x)?));
            fixed.push(x);
        }
        if fixed.is_empty() || fixed.len() > grid.mobiles {
            return Err(invalid(format!(
                "{} window stations cannot host uplinks among {} mobiles",
                fixed.len(),
                grid.mobiles
            )));
        }
        let mut place_rng = stream(cfg.seed, Purpose::Placement, &tag);
        let mobiles = place_mobiles_around(
            topo.region(),
            &fixed,
            grid.mobiles - fixed.len(),
            cfg.propagation.d0_km,
            &mut place_rng,
        )?;
        let uplinks = (0..fixed.len()).collect();
        let spec = RealizationSpec {
            prop: cfg.propagation_for(shadowing),
            shadow_seed: key(cfg.seed, Purpose::Shadowing, &tag),
            capacity: cfg.hopset.sector_capacity(),
            pinned,
        };
        let mut cap_rng = stream(cfg.seed, Purpose::Capacity, &tag);
        Ok((
            NetworkRealization::build(topo, mobiles, spec, &mut cap_rng)?,
            uplinks,
        ))
    }

    /// Rate/outage curves of `n_uplinks` typical uplinks chosen uniformly
    /// from a single realization at `cm_ratio` (see
    /// [`Experiment::uplink_realization`]), under the first configured
    /// fading model, plus the curves of all of its uplinks.
    pub fn rate_curves(
        &self,
        cm_ratio: f64,
        n_uplinks: usize,
        rates: &[f64],
        shadowing: bool,
    ) -> Result<RateStudy> {
        let grid = self.grid_point(0, cm_ratio)?;
        let (real, pool) = self.uplink_realization(&grid, shadowing)?;
        if n_uplinks == 0 || n_uplinks > pool.len() {
            return Err(invalid(format!(
                "cannot pick {n_uplinks} uplinks from {} available",
                pool.len()
            )));
        }
        let settings = self.config.link_settings(self.config.fading[0]);
        let population = rate_outage_curve(
            &real,
            &pool,
            rates,
            &settings,
            self.config.shannon_loss,
            self.config.seed,
        )?;
        let mut pick_rng = stream(self.config.seed, Purpose::Uplinks, &[]);
        let picks = index::sample(&mut pick_rng, pool.len(), n_uplinks).into_vec();
        Ok(RateStudy {
            chosen: population.subset(&picks),
            population,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn small_experiment(trials: usize) -> Experiment {
        let cfg = ExperimentConfig {
            trials,
            beam: BeamParams {
                sectors_per_station: 6,
                ..BeamParams::default()
            },
            ..ExperimentConfig::default()
        };
        let topo = synthetic_topology(16, 30.0, 20.0, 0.3, 6, 5).unwrap();
        Experiment::new(cfg, topo).unwrap()
    }

    #[test]
    fn link_length() {
        assert_relative_eq!(
            typical_link_length(0.01, 0.1).unwrap(),
            0.1,
            max_relative = 1e-15
        );
        assert_relative_eq!(
            typical_link_length(1.0, 0.1).unwrap(),
            0.01,
            max_relative = 1e-15
        );
        assert_relative_eq!(
            typical_link_length(0.04, 0.1).unwrap(),
            0.05,
            max_relative = 1e-15
        );
        assert!(typical_link_length(0.005, 0.1).is_err());
        assert!(typical_link_length(1.5, 0.1).is_err());
    }

    #[test]
    fn summaries() {
        let s = summarize(&[0.0; 5], 20.0, 1.5).unwrap();
        assert_eq!(s.ase, 30.0);
        assert_eq!(summarize(&[1.0; 5], 20.0, 1.5).unwrap().ase, 0.0);
        let s = summarize(&[0.2, 0.4], 20.0, 1.36979).unwrap();
        assert_relative_eq!(s.avg_outage, 0.3, epsilon = 1e-15);
        assert!((s.ase - 19.177).abs() < 1e-3);
        assert_relative_eq!(s.std_outage, 0.02f64.sqrt(), max_relative = 1e-12);
        assert!(summarize(&[], 1.0, 1.0).is_err());
    }

    #[test]
    fn grid_point_scaling() {
        let e = small_experiment(1);
        let g = e.grid_point(0, 0.1).unwrap();
        assert_eq!(g.mobiles, 160);
        assert_relative_eq!(
            g.topology.region().area(),
            160.0 / 20.0,
            max_relative = 1e-12
        );
        assert_relative_eq!(g.d_r_km, 0.1 / (10.0 * 0.1f64.sqrt()), max_relative = 1e-15);
    }

    #[test]
    fn lone_reference_matches_noise_only_outage() {
        // one station, C/M = 1: the reference is the only mobile
        let cfg = ExperimentConfig {
            trials: 3,
            beam: BeamParams {
                sectors_per_station: 4,
                ..BeamParams::default()
            },
            ..ExperimentConfig::default()
        };
        let topo = synthetic_topology(1, 1.0, 0.5, 0.0, 4, 1).unwrap();
        let e = Experiment::new(cfg.clone(), topo).unwrap();
        let g = e.grid_point(0, 1.0).unwrap();
        assert_eq!(g.mobiles, 1);
        for trial in 0..3 {
            let (real, j) = e.reference_realization(&g, trial, true).unwrap();
            let xi = real.xi_db(0, j);
            let gamma0 =
                db_to_linear(cfg.pr_over_n_db + xi) * cfg.propagation.path_loss(g.d_r_km).unwrap();
            let m0 = cfg
                .propagation
                .reference_m0(g.d_r_km, cfg.rounding)
                .unwrap();
            let p = InterferenceProfile::noise_only(gamma0, m0);
            let expect = conditional_outage(OutageInputs::new(&p, db_to_linear(3.0))).unwrap();
            let sc = Scenario {
                shadowing: true,
                hopping: true,
                fading: FadingModel::Distance,
                beta_db: 3.0,
            };
            assert_relative_eq!(
                e.trial_outage(&g, trial, sc).unwrap(),
                expect,
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn trials_are_reproducible() {
        let e = small_experiment(4);
        let g = e.grid_point(2, 0.2).unwrap();
        let a = e.run_trials(&g, false, Execution::Parallel).unwrap();
        let b = e.run_trials(&g, false, Execution::Sequential).unwrap();
        assert_eq!(a, b);
        let c = e.run_trial(&g, 2, false).unwrap();
        assert_eq!(c, a[2]);
    }

    #[test]
    fn huge_threshold_means_outage() {
        let e = small_experiment(1);
        let g = e.grid_point(0, 0.5).unwrap();
        let sc = Scenario {
            shadowing: true,
            hopping: true,
            fading: FadingModel::Distance,
            beta_db: 80.0,
        };
        assert!(e.trial_outage(&g, 0, sc).unwrap() > 1.0 - 1e-9);
    }

    #[test]
    fn sweep_shape() {
        let cfg = ExperimentConfig {
            trials: 2,
            cm_grid: vec![0.5, 1.0],
            beam: BeamParams {
                sectors_per_station: 6,
                ..BeamParams::default()
            },
            ..ExperimentConfig::default()
        };
        let e =
            Experiment::new(cfg, synthetic_topology(16, 30.0, 20.0, 0.3, 6, 5).unwrap()).unwrap();
        let rows = e.sweep(Execution::Parallel).unwrap();
        assert_eq!(rows.len(), 2 * 2 * 2);
        for r in &rows {
            assert!((0.0..=1.0).contains(&r.avg_outage));
            assert_eq!(
                r.ase_bpcu_per_km2,
                20.0 * r.rate_bpcu * (1.0 - r.avg_outage)
            );
        }
    }

    #[test]
    fn rate_curves_single_uplink_average_is_itself() {
        let e = small_experiment(1);
        let rates: Vec<f64> = (1..=20).map(|k| 0.25 * k as f64).collect();
        let c = e.rate_curves(1.0, 1, &rates, true).unwrap().chosen;
        assert_eq!(c.curves.len(), 1);
        assert_eq!(c.curves[0], c.average);
        let tiny = e.rate_curves(1.0, 1, &[1e-9], true).unwrap();
        assert!(tiny.chosen.average[0] < 1e-6);
        let s = e.rate_curves(0.5, 4, &rates, true).unwrap();
        assert_eq!(s.chosen.curves.len(), 4);
        for (u, curve) in s.chosen.uplinks.iter().zip(&s.chosen.curves) {
            let k = s.population.uplinks.iter().position(|p| p == u).unwrap();
            assert_eq!(&s.population.curves[k], curve);
        }
        for curve in &s.population.curves {
            assert!(curve.windows(2).all(|w| w[1] >= w[0] - 1e-13));
        }
        assert!(e.rate_curves(1.0, 10_000, &rates, true).is_err());
    }

    #[test]
    fn config_validation() {
        assert!(ExperimentConfig::default().validate().is_ok());
        assert!(ExperimentConfig {
            trials: 0,
            ..ExperimentConfig::default()
        }
        .validate()
        .is_err());
        assert!(ExperimentConfig {
            cm_grid: vec![2.0],
            ..ExperimentConfig::default()
        }
        .validate()
        .is_err());
        assert!(ExperimentConfig {
            hopping: vec![],
            ..ExperimentConfig::default()
        }
        .validate()
        .is_err());
    }
}
