//! Per-link radio mechanics: beam gains, hop timing, collision
//! probabilities and power-controlled interference ratios, composed into
//! the [`InterferenceProfile`] of one reference link.

use std::f64::consts::PI;

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::propagation::{db_to_linear, PropagationParams, RoundingMode};
use crate::topology::{NetworkRealization, Point, Sector};

/// Speed of an electromagnetic wave, km/s.
pub const LIGHT_SPEED_KM_S: f64 = 2.998e5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BeamParams {
    /// Sectors per base station.
    pub sectors_per_station: usize,
    /// Sector sidelobe/backlobe gain `b`, linear.
    pub sector_sidelobe: f64,
    /// Mobile mainlobe beamwidth, radians.
    pub mobile_beamwidth: f64,
    /// Mobile sidelobe/backlobe gain `a`, linear.
    pub mobile_sidelobe: f64,
}

impl Default for BeamParams {
    fn default() -> Self {
        Self {
            sectors_per_station: 24,
            sector_sidelobe: 0.01,
            mobile_beamwidth: 0.1 * PI,
            mobile_sidelobe: 0.1,
        }
    }
}

impl BeamParams {
    pub fn validate(&self) -> Result<()> {
        if self.sectors_per_station == 0 {
            return Err(invalid("sectors_per_station must be at least 1"));
        }
        if !(0.0..=1.0).contains(&self.sector_sidelobe)
            || !(0.0..=1.0).contains(&self.mobile_sidelobe)
        {
            return Err(invalid("sidelobe gains must lie in [0, 1]"));
        }
        if !(self.mobile_beamwidth > 0.0 && self.mobile_beamwidth < 2.0 * PI) {
            return Err(invalid("mobile beamwidth must lie in (0, 2pi)"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HoppingConfig {
    /// Hopset size `L`.
    pub channels: u32,
    /// Contiguous channels per mobile per hop `L_l`, shared by all sectors.
    pub block: u32,
    /// Slot duration `T`, seconds.
    pub slot_s: f64,
    /// Probability a mobile transmits during a subframe.
    pub activity: f64,
    pub light_speed_km_s: f64,
}

impl Default for HoppingConfig {
    fn default() -> Self {
        Self {
            channels: 100,
            block: 10,
            slot_s: 0.5e-3,
            activity: 1.0,
            light_speed_km_s: LIGHT_SPEED_KM_S,
        }
    }
}

impl HoppingConfig {
    pub fn validate(&self) -> Result<()> {
        if self.block == 0 || self.channels == 0 || !self.channels.is_multiple_of(self.block) {
            return Err(invalid(
                "block size must be a positive divisor of the hopset size",
            ));
        }
        if self.channels / self.block < 2 {
            return Err(invalid("need at least two disjoint blocks (L / L_l >= 2)"));
        }
        if !(0.0..=1.0).contains(&self.activity) {
            return Err(invalid("activity probability must lie in [0, 1]"));
        }
        if !(self.slot_s > 0.0) || !(self.light_speed_km_s > 0.0) {
            return Err(invalid(
                "slot duration and propagation speed must be positive",
            ));
        }
        Ok(())
    }

    /// Mobiles a sector can serve with orthogonal blocks, `L / L_l`.
    pub fn sector_capacity(&self) -> usize {
        (self.channels / self.block) as usize
    }
}

/// Fading law applied to every link.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FadingModel {
    /// Nakagami parameter from the distance model.
    #[default]
    Distance,
    /// Rayleigh fading, `m = 1` on every link.
    Rayleigh,
}

impl FadingModel {
    pub fn as_str(&self) -> &'static str {
        match self {
            FadingModel::Distance => "distance",
            FadingModel::Rayleigh => "rayleigh",
        }
    }
}

/// One interferer during one of the four subframe periods.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterfererPeriodTerm {
    /// Interference-to-reference power ratio.
    pub omega: f64,
    /// Collision probability.
    pub q: f64,
    /// Fractional duration of the period within the subframe.
    pub c: f64,
    /// Nakagami parameter of the interfering link.
    pub m: f64,
}

impl InterfererPeriodTerm {
    pub fn is_inert(&self) -> bool {
        self.q == 0.0 || self.c == 0.0 || self.omega == 0.0
    }
}

/// Everything the conditional outage expression needs about one reference link.
#[derive(Debug, Clone, PartialEq)]
pub struct InterferenceProfile {
    /// No-fading SNR of the reference link, linear.
    pub gamma0: f64,
    /// Integer Nakagami parameter of the reference link.
    pub m0: u32,
    pub terms: Vec<InterfererPeriodTerm>,
}

impl InterferenceProfile {
    pub fn noise_only(gamma0: f64, m0: u32) -> Self {
        Self {
            gamma0,
            m0,
            terms: Vec::new(),
        }
    }

    /// `1 / gamma0`.
    pub fn z(&self) -> f64 {
        1.0 / self.gamma0
    }

    /// Distinct interferers, assuming terms come in groups of four.
    pub fn interferer_count(&self) -> usize {
        self.terms.len().div_ceil(4)
    }
}

/// Gain of a sector beam toward arrival angle `theta`: 1 inside the beam, `b` outside.
pub fn sector_beam_gain(sector: &Sector, theta: f64, bp: &BeamParams) -> f64 {
    if sector.covers(theta) {
        1.0
    } else {
        bp.sector_sidelobe
    }
}

/// Gain toward `s_j` of a mobile at `x_i` whose mainlobe points at `s_serving`.
pub fn mobile_beam_gain(x_i: Point, s_j: Point, s_serving: Point, bp: &BeamParams) -> Result<f64> {
    let u = s_j - x_i;
    let v = s_serving - x_i;
    let (nu, nv) = (u.norm(), v.norm());
    if nu == 0.0 || nv == 0.0 {
        return Err(Error::UndefinedAngle("a sector receiver"));
    }
    let cos = u.dot(v) / (nu * nv);
    Ok(if cos > (bp.mobile_beamwidth / 2.0).cos() {
        1.0
    } else {
        bp.mobile_sidelobe
    })
}

/// Fraction of an interferer's power overlapping the reference block,
/// `min(L_j / L_l, 1)`.
pub fn spectral_factor(reference_block: u32, interferer_block: u32) -> Result<f64> {
    if reference_block == 0 || interferer_block == 0 {
        return Err(invalid("block sizes must be positive"));
    }
    Ok((reference_block as f64 / interferer_block as f64).min(1.0))
}

/// Hop transition time of interferer `x_i` relative to reference `x_r` at
/// receiver `s_j`, reduced to `[0, T)`.
pub fn timing_offset(s_j: Point, x_r: Point, x_i: Point, hc: &HoppingConfig) -> f64 {
    let dt = (s_j.dist(x_r) - s_j.dist(x_i)) / hc.light_speed_km_s;
    let t = dt.rem_euclid(hc.slot_s);
    if t >= hc.slot_s {
        0.0
    } else {
        t
    }
}

/// Fractional durations of the four subframe periods for offset `t`.
pub fn fractional_durations(t: f64, slot: f64) -> Result<[f64; 4]> {
    if !(t >= 0.0 && t < slot) {
        return Err(invalid(format!("timing offset {t} outside [0, {slot})")));
    }
    let a = t / (2.0 * slot);
    let b = (slot - t) / (2.0 * slot);
    Ok([a, b, a, b])
}

/// Probability that an interferer in a sector with `load` mobiles collides
/// with the reference block.
pub fn collision_probability(
    load: u32,
    interferer_block: u32,
    reference_block: u32,
    channels: u32,
    activity: f64,
) -> Result<f64> {
    if channels == 0 {
        return Err(invalid("hopset size must be positive"));
    }
    let occupied = (load as u64 * interferer_block as u64).max(reference_block as u64);
    let q = occupied as f64 * activity / channels as f64;
    if q > 1.0 + 1e-12 {
        return Err(Error::NumericalFailure(format!(
            "collision probability {q} exceeds 1; sector load {load} breaks the capacity bound"
        )));
    }
    Ok(q.min(1.0))
}

/// Mobiles of one sector that can overlap the reference block during a
/// period, `max(L_j / L_l, 1)`.
pub fn interference_slots(reference_block: u32, interferer_block: u32) -> usize {
    (reference_block / interferer_block.max(1)).max(1) as usize
}

/// Potential interferers for reference sector `j`: from every other sector,
/// all members when they fit in `max(L_j / L_l, 1)` slots, otherwise a
/// uniformly random subset of that size.
pub fn select_interferers<R: Rng + ?Sized>(
    realization: &NetworkRealization<'_>,
    j: usize,
    hc: &HoppingConfig,
    rng: &mut R,
) -> Vec<usize> {
    let slots = interference_slots(hc.block, hc.block);
    let mut out = Vec::new();
    for l in 0..realization.topology().sectors().len() {
        if l == j {
            continue;
        }
        let members = realization.members(l);
        if members.len() <= slots {
            out.extend_from_slice(members);
        } else {
            let mut picked: Vec<usize> = index::sample(rng, members.len(), slots)
                .into_iter()
                .map(|k| members[k])
                .collect();
            picked.sort_unstable();
            out.extend(picked);
        }
    }
    out
}

/// Power of interferer `i` at sector `j` relative to the reference signal
/// power under power control.
pub fn interference_ratio(
    i: usize,
    realization: &NetworkRealization<'_>,
    j: usize,
    bp: &BeamParams,
    hc: &HoppingConfig,
) -> Result<f64> {
    let g = realization
        .serving(i)
        .ok_or_else(|| invalid(format!("mobile {i} is inactive")))?;
    let topo = realization.topology();
    let x_i = realization.mobiles()[i];
    let s_j = topo.sector_position(j);
    let s_g = topo.sector_position(g);
    let b_ij = mobile_beam_gain(x_i, s_j, s_g, bp)?;
    let f_g = spectral_factor(hc.block, hc.block)?;
    let theta = x_i.bearing_from(s_j)?;
    let beam_j = sector_beam_gain(&topo.sectors()[j], theta, bp);
    let ratio = realization.shadowed_gain(i, j) / realization.shadowed_gain(i, g);
    Ok(b_ij * f_g * beam_j * ratio)
}

/// No-fading SNR of the reference link, linear.
pub fn snr_gamma0(
    pr_over_n_db: f64,
    xi_r_db: f64,
    d_r: f64,
    prop: &PropagationParams,
) -> Result<f64> {
    Ok(db_to_linear(pr_over_n_db) * db_to_linear(xi_r_db) * prop.path_loss(d_r)?)
}

/// Link-level settings shared by every profile in a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkSettings {
    pub beam: BeamParams,
    pub hopping: HoppingConfig,
    /// Received reference power over noise at `d0`, dB.
    pub pr_over_n_db: f64,
    /// Keep only this many of the strongest interferers.
    pub max_interferers: usize,
    pub fading: FadingModel,
    pub rounding: RoundingMode,
}

impl Default for LinkSettings {
    fn default() -> Self {
        Self {
            beam: BeamParams::default(),
            hopping: HoppingConfig::default(),
            pr_over_n_db: 30.0,
            max_interferers: 30,
            fading: FadingModel::Distance,
            rounding: RoundingMode::Nearest,
        }
    }
}

/// Builds the interference profile of the link from mobile `r` to sector `j`.
pub fn build_profile<R: Rng + ?Sized>(
    realization: &NetworkRealization<'_>,
    r: usize,
    j: usize,
    settings: &LinkSettings,
    rng: &mut R,
) -> Result<InterferenceProfile> {
    if realization.serving(r) != Some(j) {
        return Err(Error::InvalidReference {
            mobile: r,
            sector: j,
        });
    }
    let prop = realization.prop();
    let topo = realization.topology();
    let hc = &settings.hopping;
    let s_j = topo.sector_position(j);
    let x_r = realization.mobiles()[r];
    let d_r = s_j.dist(x_r).max(prop.d0_km);
    let gamma0 = snr_gamma0(settings.pr_over_n_db, realization.xi_db(r, j), d_r, prop)?;
    let m0 = match settings.fading {
        FadingModel::Distance => prop.reference_m0(d_r, settings.rounding)?,
        FadingModel::Rayleigh => 1,
    };

    let candidates = select_interferers(realization, j, hc, rng);
    let mut ranked = Vec::with_capacity(candidates.len());
    for i in candidates {
        ranked.push((
            interference_ratio(i, realization, j, &settings.beam, hc)?,
            i,
        ));
    }
    ranked.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    ranked.truncate(settings.max_interferers);

    let mut terms = Vec::with_capacity(4 * ranked.len());
    for (omega, i) in ranked {
        let g = realization
            .serving(i)
            .expect("selected interferers are active");
        let x_i = realization.mobiles()[i];
        let q = collision_probability(
            realization.load(g),
            hc.block,
            hc.block,
            hc.channels,
            hc.activity,
        )?;
        let t = timing_offset(s_j, x_r, x_i, hc);
        let m = match settings.fading {
            FadingModel::Distance => prop.nakagami_m(s_j.dist(x_i))?,
            FadingModel::Rayleigh => 1.0,
        };
        for c in fractional_durations(t, hc.slot_s)? {
            let term = InterfererPeriodTerm { omega, q, c, m };
            if !term.is_inert() {
                terms.push(term);
            }
        }
    }
    Ok(InterferenceProfile { gamma0, m0, terms })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::{build_sectors, BaseStation, NetworkTopology, Rect, ShadowField};
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::TAU;

    fn bp() -> BeamParams {
        BeamParams::default()
    }

    #[test]
    fn sector_gain() {
        let secs = build_sectors(&[BaseStation::new(1, 0.0, 0.0)], 24).unwrap();
        let s = &secs[3];
        assert_eq!(sector_beam_gain(s, s.offset, &bp()), 1.0);
        assert_eq!(
            sector_beam_gain(s, s.offset + TAU / 24.0 + 0.01, &bp()),
            0.01
        );
        let full = build_sectors(&[BaseStation::new(1, 0.0, 0.0)], 1).unwrap();
        for th in [0.0, 1.0, 3.0, 6.2] {
            assert_eq!(sector_beam_gain(&full[0], th, &bp()), 1.0);
        }
    }

    #[test]
    fn mobile_gain() {
        let x = Point::new(0.0, 0.0);
        let s = Point::new(1.0, 0.0);
        assert_eq!(mobile_beam_gain(x, s, s, &bp()).unwrap(), 1.0);
        assert_eq!(
            mobile_beam_gain(x, Point::new(-1.0, 0.0), s, &bp()).unwrap(),
            0.1
        );
        // separation of exactly half the beamwidth is outside the mainlobe
        let half_plane = BeamParams {
            mobile_beamwidth: PI,
            ..bp()
        };
        assert_eq!(
            mobile_beam_gain(x, Point::new(0.0, 1.0), s, &half_plane).unwrap(),
            0.1
        );
        assert_eq!(
            mobile_beam_gain(x, Point::new(1.0, 1.0e-3), s, &bp()).unwrap(),
            1.0
        );
        assert!(mobile_beam_gain(x, x, s, &bp()).is_err());
    }

    #[test]
    fn spectral() {
        assert_eq!(spectral_factor(10, 10).unwrap(), 1.0);
        assert_eq!(spectral_factor(10, 20).unwrap(), 0.5);
        assert_eq!(spectral_factor(20, 10).unwrap(), 1.0);
        assert!(spectral_factor(0, 10).is_err());
    }

    #[test]
    fn timing() {
        let hc = HoppingConfig {
            light_speed_km_s: 3.0e5,
            ..HoppingConfig::default()
        };
        let s = Point::new(0.0, 0.0);
        assert_eq!(
            timing_offset(s, Point::new(1.0, 0.0), Point::new(0.0, 1.0), &hc),
            0.0
        );
        let t = timing_offset(s, Point::new(80.0, 0.0), Point::new(5.0, 0.0), &hc);
        assert_relative_eq!(t, 250e-6, max_relative = 1e-9);
        let t = timing_offset(s, Point::new(10.0, 0.0), Point::new(40.0, 0.0), &hc);
        assert_relative_eq!(t, 400e-6, max_relative = 1e-9);
        assert!((0.0..hc.slot_s).contains(&t));
    }

    #[test]
    fn durations() {
        assert_eq!(
            fractional_durations(0.0, 0.5e-3).unwrap(),
            [0.0, 0.5, 0.0, 0.5]
        );
        assert_eq!(fractional_durations(0.25e-3, 0.5e-3).unwrap(), [0.25; 4]);
        let c = fractional_durations(0.2e-3, 0.5e-3).unwrap();
        for (a, b) in c.iter().zip([0.2, 0.3, 0.2, 0.3]) {
            assert_relative_eq!(*a, b, epsilon = 1e-15);
        }
        assert!(fractional_durations(0.5e-3, 0.5e-3).is_err());
        assert!(fractional_durations(-1e-9, 0.5e-3).is_err());
    }

    #[test]
    fn collisions() {
        assert_eq!(collision_probability(10, 10, 10, 100, 1.0).unwrap(), 1.0);
        assert_relative_eq!(collision_probability(1, 10, 10, 100, 1.0).unwrap(), 0.1);
        assert_relative_eq!(collision_probability(3, 10, 10, 100, 1.0).unwrap(), 0.3);
        assert_relative_eq!(collision_probability(3, 10, 10, 100, 0.5).unwrap(), 0.15);
        assert!(matches!(
            collision_probability(11, 10, 10, 100, 1.0),
            Err(Error::NumericalFailure(_))
        ));
    }

    #[test]
    fn gamma0() {
        let p = PropagationParams::default();
        assert_relative_eq!(
            snr_gamma0(30.0, 0.0, p.d0_km, &p).unwrap(),
            1000.0,
            max_relative = 1e-12
        );
        let g = snr_gamma0(30.0, 0.0, 0.01, &p).unwrap();
        assert!((g - 52.71).abs() < 0.01, "{g}");
        assert_relative_eq!(
            snr_gamma0(30.0, 10.0, 0.01, &p).unwrap(),
            10.0 * g,
            max_relative = 1e-12
        );
    }

    fn two_station_topology(zeta: usize) -> NetworkTopology {
        let r = Rect::new(-5.0, -5.0, 5.0, 5.0).unwrap();
        NetworkTopology::new(
            vec![BaseStation::new(1, 0.0, 0.0), BaseStation::new(2, 1.0, 0.0)],
            zeta,
            r,
            r,
        )
        .unwrap()
    }

    fn realization<'t>(
        t: &'t NetworkTopology,
        mobiles: Vec<Point>,
        serving: Vec<usize>,
        prop: PropagationParams,
    ) -> NetworkRealization<'t> {
        let mut loads = vec![0; t.sectors().len()];
        for &l in &serving {
            loads[l] += 1;
        }
        NetworkRealization::from_parts(
            t,
            mobiles,
            serving.into_iter().map(Some).collect(),
            loads,
            ShadowField::new(9),
            prop,
        )
    }

    #[test]
    fn omega_symmetric_case_is_one() {
        // interferer on the perpendicular bisector, served by station 2, seen
        // through mainlobes at both ends
        let t = two_station_topology(1);
        let prop = PropagationParams::default().without_shadowing();
        let wide = BeamParams {
            mobile_beamwidth: 0.99 * TAU,
            ..bp()
        };
        let real = realization(&t, vec![Point::new(0.5, 0.3)], vec![1], prop);
        let om = interference_ratio(0, &real, 0, &wide, &HoppingConfig::default()).unwrap();
        assert_relative_eq!(om, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn omega_sidelobe_case_is_b() {
        let t = two_station_topology(4);
        let prop = PropagationParams::default().without_shadowing();
        let wide = BeamParams {
            mobile_beamwidth: 0.99 * TAU,
            ..bp()
        };
        // equidistant mobile below the axis: outside sector 0's main lobe
        let x = Point::new(0.5, -0.3);
        let g = t.covering_sector(1, x).unwrap();
        let real = realization(&t, vec![x], vec![g], prop);
        let om = interference_ratio(0, &real, 0, &wide, &HoppingConfig::default()).unwrap();
        assert_relative_eq!(om, 0.01, max_relative = 1e-12);
    }

    #[test]
    fn omega_distance_ratio() {
        let t = two_station_topology(1);
        let prop = PropagationParams::default().without_shadowing();
        let x = Point::new(2.0, 0.0);
        let real = realization(&t, vec![x], vec![1], prop);
        let om = interference_ratio(0, &real, 0, &bp(), &HoppingConfig::default()).unwrap();
        let expect = prop.path_loss(2.0).unwrap() / prop.path_loss(1.0).unwrap();
        assert_relative_eq!(om, expect, max_relative = 1e-12);
    }

    #[test]
    fn omega_with_shadowing_uses_link_draws() {
        let t = two_station_topology(1);
        let prop = PropagationParams::default();
        let x = Point::new(0.7, 0.4);
        let real = realization(&t, vec![x], vec![1], prop);
        let om = interference_ratio(
            0,
            &real,
            0,
            &BeamParams {
                mobile_beamwidth: 0.99 * TAU,
                ..bp()
            },
            &HoppingConfig::default(),
        )
        .unwrap();
        let d0 = x.dist(Point::new(0.0, 0.0));
        let d1 = x.dist(Point::new(1.0, 0.0));
        let expect = db_to_linear(real.xi_db(0, 0) - real.xi_db(0, 1))
            * prop.path_loss(d0).unwrap()
            / prop.path_loss(d1).unwrap();
        assert_relative_eq!(om, expect, max_relative = 1e-10);
    }

    #[test]
    fn selection_rules() {
        let t = two_station_topology(1);
        let prop = PropagationParams::default();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let hc = HoppingConfig::default();
        let one = realization(
            &t,
            vec![Point::new(-0.1, 0.0), Point::new(1.2, 0.0)],
            vec![0, 1],
            prop,
        );
        assert_eq!(select_interferers(&one, 0, &hc, &mut rng), vec![1]);

        let mobiles: Vec<Point> = (0..6)
            .map(|k| Point::new(1.1 + 0.01 * k as f64, 0.0))
            .collect();
        let five = realization(&t, mobiles, vec![0, 1, 1, 1, 1, 1], prop);
        let mut hits = [0usize; 6];
        let n = 100_000;
        for _ in 0..n {
            let sel = select_interferers(&five, 0, &hc, &mut rng);
            assert_eq!(sel.len(), 1);
            assert!(!sel.contains(&0));
            hits[sel[0]] += 1;
        }
        let sd = (n as f64 * 0.2 * 0.8).sqrt();
        for h in &hits[1..] {
            assert!((*h as f64 - 0.2 * n as f64).abs() < 3.0 * sd, "{hits:?}");
        }
    }

    fn line_network(
        t: &NetworkTopology,
        n_interferers: usize,
        prop: PropagationParams,
    ) -> NetworkRealization<'_> {
        let mut mobiles = vec![Point::new(0.0, 0.02)];
        let mut serving = vec![0];
        for k in 0..n_interferers {
            let st = 1 + k;
            mobiles.push(t.stations()[st].position + Point::new(0.0, 0.03));
            serving.push(st);
        }
        realization(t, mobiles, serving, prop)
    }

    fn line_topology(n: usize) -> NetworkTopology {
        let r = Rect::new(-1.0, -1.0, 1.0 + n as f64, 1.0).unwrap();
        let st = (0..=n)
            .map(|k| BaseStation::new(k as u32, 0.3 * k as f64 + 0.1 * (k as f64).sqrt(), 0.0))
            .collect();
        NetworkTopology::new(st, 1, r, r).unwrap()
    }

    #[test]
    fn profile_empty_and_single() {
        let t = line_topology(1);
        let prop = PropagationParams::default();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s = LinkSettings {
            beam: BeamParams {
                mobile_sidelobe: 1.0,
                sector_sidelobe: 1.0,
                ..bp()
            },
            ..LinkSettings::default()
        };
        let alone = line_network(&t, 0, prop);
        let p = build_profile(&alone, 0, 0, &s, &mut rng).unwrap();
        assert!(p.terms.is_empty());
        assert!(p.gamma0 > 0.0);

        let one = line_network(&t, 1, prop);
        let p = build_profile(&one, 0, 0, &s, &mut rng).unwrap();
        assert!(p.terms.len() == 4 || p.terms.len() == 2);
        let csum: f64 = p.terms.iter().map(|t| t.c).sum();
        if p.terms.len() == 4 {
            assert_relative_eq!(csum, 1.0, epsilon = 1e-15);
        }
        assert!(p
            .terms
            .windows(2)
            .all(|w| w[0].omega == w[1].omega && w[0].q == w[1].q && w[0].m == w[1].m));
        assert!(build_profile(&one, 0, 1, &s, &mut rng).is_err());
    }

    #[test]
    fn profile_truncates_to_strongest() {
        let t = line_topology(40);
        let prop = PropagationParams::default().without_shadowing();
        let s = LinkSettings {
            beam: BeamParams {
                mobile_sidelobe: 1.0,
                sector_sidelobe: 1.0,
                ..bp()
            },
            ..LinkSettings::default()
        };
        let real = line_network(&t, 40, prop);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = build_profile(&real, 0, 0, &s, &mut rng).unwrap();
        let mut kept: Vec<f64> = p.terms.iter().map(|t| t.omega).collect();
        kept.dedup();
        assert!(kept.len() <= 30);
        let mut all: Vec<f64> = (1..=40)
            .map(|i| interference_ratio(i, &real, 0, &s.beam, &s.hopping).unwrap())
            .collect();
        all.sort_by(|a, b| b.total_cmp(a));
        let weakest_kept = kept.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(all[30..].iter().all(|&o| o <= weakest_kept));
    }

    #[test]
    fn rayleigh_profile_uses_unit_m() {
        let t = line_topology(3);
        let prop = PropagationParams::default();
        let s = LinkSettings {
            fading: FadingModel::Rayleigh,
            ..LinkSettings::default()
        };
        let real = line_network(&t, 3, prop);
        let p = build_profile(&real, 0, 0, &s, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        assert_eq!(p.m0, 1);
        assert!(p.terms.iter().all(|t| t.m == 1.0));
    }

    #[test]
    fn config_validation() {
        assert!(HoppingConfig::default().validate().is_ok());
        assert_eq!(HoppingConfig::default().sector_capacity(), 10);
        assert!(HoppingConfig {
            block: 7,
            ..HoppingConfig::default()
        }
        .validate()
        .is_err());
        assert!(HoppingConfig {
            block: 100,
            ..HoppingConfig::default()
        }
        .validate()
        .is_err());
        assert!(BeamParams {
            sector_sidelobe: 2.0,
            ..bp()
        }
        .validate()
        .is_err());
        assert!(bp().validate().is_ok());
    }
}
