//! Network geometry: base stations with fixed angular sectors, mobile
//! placement under an exclusion zone, and shadowed serving-sector
//! association with per-sector capacity.

use std::collections::HashSet;
use std::f64::consts::TAU;
use std::io::{Read, Write};
use std::ops::{Add, Mul, Sub};

use rand::seq::index;
use rand::Rng;
use rand_distr::StandardNormal;
use rand_pcg::Pcg64Mcg;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::propagation::PropagationParams;
use crate::stream::{mix, splitmix64};

/// Attempts allowed per mobile before placement is declared infeasible.
pub const REJECTION_BUDGET: usize = 10_000;

/// A position in the plane, km.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    #[inline]
    pub fn dist(self, other: Point) -> f64 {
        (self - other).norm()
    }

    #[inline]
    pub fn dot(self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// Bearing of `self` seen from `origin`, normalized to `[0, 2pi)`.
    pub fn bearing_from(self, origin: Point) -> Result<f64> {
        let d = self - origin;
        if d.x == 0.0 && d.y == 0.0 {
            return Err(Error::UndefinedAngle("the observing station"));
        }
        Ok(normalize_angle(d.y.atan2(d.x)))
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, s: f64) -> Point {
        Point::new(self.x * s, self.y * s)
    }
}

/// Maps any finite angle into `[0, 2pi)`.
#[inline]
pub fn normalize_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if t >= TAU {
        0.0
    } else {
        t
    }
}

/// Axis-aligned rectangle, km.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x_min: f64,
    pub y_min: f64,
    pub x_max: f64,
    pub y_max: f64,
}

impl Rect {
    pub fn new(x_min: f64, y_min: f64, x_max: f64, y_max: f64) -> Result<Self> {
        let r = Self {
            x_min,
            y_min,
            x_max,
            y_max,
        };
        if ![x_min, y_min, x_max, y_max].iter().all(|v| v.is_finite())
            || x_max <= x_min
            || y_max <= y_min
        {
            return Err(invalid(format!("degenerate rectangle {r:?}")));
        }
        Ok(r)
    }

    /// A `w` by `h` rectangle anchored at the origin.
    pub fn sized(w: f64, h: f64) -> Result<Self> {
        Self::new(0.0, 0.0, w, h)
    }

    /// A `w` by `h` rectangle sharing `self`'s center.
    pub fn centered_sub(&self, w: f64, h: f64) -> Result<Self> {
        let c = self.center();
        Self::new(c.x - w / 2.0, c.y - h / 2.0, c.x + w / 2.0, c.y + h / 2.0)
    }

    pub fn width(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn height(&self) -> f64 {
        self.y_max - self.y_min
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn center(&self) -> Point {
        Point::new(
            (self.x_min + self.x_max) / 2.0,
            (self.y_min + self.y_max) / 2.0,
        )
    }

    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.x_min && p.x <= self.x_max && p.y >= self.y_min && p.y <= self.y_max
    }

    pub fn contains_rect(&self, o: &Rect) -> bool {
        o.x_min >= self.x_min
            && o.x_max <= self.x_max
            && o.y_min >= self.y_min
            && o.y_max <= self.y_max
    }

    fn scaled(&self, s: f64) -> Rect {
        Rect {
            x_min: self.x_min * s,
            y_min: self.y_min * s,
            x_max: self.x_max * s,
            y_max: self.y_max * s,
        }
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        Point::new(
            self.x_min + rng.random::<f64>() * self.width(),
            self.y_min + rng.random::<f64>() * self.height(),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BaseStation {
    pub id: u32,
    pub position: Point,
    /// Rotation of the station's sector fan, radians.
    #[serde(default)]
    pub sector_offset: f64,
}

impl BaseStation {
    pub fn new(id: u32, x: f64, y: f64) -> Self {
        Self {
            id,
            position: Point::new(x, y),
            sector_offset: 0.0,
        }
    }
}

/// One fixed angular beam of a station.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sector {
    /// Zero-based index into [`NetworkTopology::sectors`].
    pub id: usize,
    /// Zero-based index into [`NetworkTopology::stations`].
    pub station: usize,
    /// Start of the covered interval, radians in `[0, 2pi)`.
    pub offset: f64,
    pub width: f64,
}

impl Sector {
    /// Whether `theta` (normalized) lies in `[offset, offset + width)`.
    pub fn covers(&self, theta: f64) -> bool {
        if self.width >= TAU {
            return true;
        }
        let rel = normalize_angle(theta - self.offset);
        rel < self.width
    }
}

/// Sectors for every station, `zeta` per station with offsets
/// `psi_s + 2pi k / zeta`; station `s` owns sectors `s*zeta .. (s+1)*zeta`.
pub fn build_sectors(stations: &[BaseStation], zeta: usize) -> Result<Vec<Sector>> {
    if zeta == 0 {
        return Err(invalid("sectors per station must be at least 1"));
    }
    let width = TAU / zeta as f64;
    let mut out = Vec::with_capacity(stations.len() * zeta);
    for (s, st) in stations.iter().enumerate() {
        for k in 0..zeta {
            out.push(Sector {
                id: s * zeta + k,
                station: s,
                offset: normalize_angle(st.sector_offset + k as f64 * width),
                width,
            });
        }
    }
    Ok(out)
}

/// Base stations, their sectors, the simulated region and the measurement window.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkTopology {
    stations: Vec<BaseStation>,
    sectors: Vec<Sector>,
    zeta: usize,
    region: Rect,
    window: Rect,
}

impl NetworkTopology {
    pub fn new(
        stations: Vec<BaseStation>,
        zeta: usize,
        region: Rect,
        window: Rect,
    ) -> Result<Self> {
        if stations.is_empty() {
            return Err(invalid("topology needs at least one station"));
        }
        if !region.contains_rect(&window) {
            return Err(invalid("measurement window must lie inside the region"));
        }
        let mut ids = HashSet::with_capacity(stations.len());
        for st in &stations {
            if !st.position.x.is_finite()
                || !st.position.y.is_finite()
                || !st.sector_offset.is_finite()
            {
                return Err(invalid(format!(
                    "station {} has a non-finite coordinate",
                    st.id
                )));
            }
            if !ids.insert(st.id) {
                return Err(invalid(format!("duplicate station id {}", st.id)));
            }
        }
        let sectors = build_sectors(&stations, zeta)?;
        Ok(Self {
            stations,
            sectors,
            zeta,
            region,
            window,
        })
    }

    pub fn stations(&self) -> &[BaseStation] {
        &self.stations
    }

    pub fn sectors(&self) -> &[Sector] {
        &self.sectors
    }

    pub fn sectors_per_station(&self) -> usize {
        self.zeta
    }

    pub fn region(&self) -> Rect {
        self.region
    }

    pub fn window(&self) -> Rect {
        self.window
    }

    pub fn station_sectors(&self, station: usize) -> &[Sector] {
        &self.sectors[station * self.zeta..(station + 1) * self.zeta]
    }

    /// Location of a sector's receiver (its station).
    #[inline]
    pub fn sector_position(&self, sector: usize) -> Point {
        self.stations[self.sectors[sector].station].position
    }

    /// The sector of `station` whose beam covers `x`.
    pub fn covering_sector(&self, station: usize, x: Point) -> Result<usize> {
        let st = &self.stations[station];
        let theta = x.bearing_from(st.position)?;
        Ok(covering_sector_index(st.sector_offset, self.zeta, theta) + station * self.zeta)
    }

    /// Index of the station nearest to `p`, lowest index on ties.
    pub fn nearest_station(&self, p: Point) -> usize {
        let mut best = (f64::INFINITY, 0);
        for (s, st) in self.stations.iter().enumerate() {
            let d = st.position.dist(p);
            if d < best.0 {
                best = (d, s);
            }
        }
        best.1
    }

    /// Coordinates (stations, region and window) multiplied by `s`.
    pub fn scaled(&self, s: f64) -> Result<Self> {
        if !(s > 0.0) || !s.is_finite() {
            return Err(invalid("scale factor must be positive"));
        }
        let stations = self
            .stations
            .iter()
            .map(|st| BaseStation {
                position: st.position * s,
                ..*st
            })
            .collect();
        Self::new(
            stations,
            self.zeta,
            self.region.scaled(s),
            self.window.scaled(s),
        )
    }

    /// Reads the `id,x_km,y_km[,offset_rad]` station format.
    pub fn read_stations<R: Read>(reader: R) -> Result<Vec<BaseStation>> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut out = Vec::new();
        for row in rdr.deserialize::<StationRow>() {
            let row = row?;
            out.push(BaseStation {
                id: row.id,
                position: Point::new(row.x_km, row.y_km),
                sector_offset: row.offset_rad.unwrap_or(0.0),
            });
        }
        if out.is_empty() {
            return Err(Error::Topology("no stations found".into()));
        }
        Ok(out)
    }

    /// Writes stations in the `id,x_km,y_km` format; an `offset_rad`
    /// column is added only when some station has a nonzero offset.
    pub fn write_stations<W: Write>(stations: &[BaseStation], writer: W) -> Result<()> {
        let with_offset = stations.iter().any(|s| s.sector_offset != 0.0);
        let mut w = csv::Writer::from_writer(writer);
        if with_offset {
            w.write_record(["id", "x_km", "y_km", "offset_rad"])?;
        } else {
            w.write_record(["id", "x_km", "y_km"])?;
        }
        for st in stations {
            let mut rec = vec![
                st.id.to_string(),
                st.position.x.to_string(),
                st.position.y.to_string(),
            ];
            if with_offset {
                rec.push(st.sector_offset.to_string());
            }
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Debug, Deserialize)]
struct StationRow {
    id: u32,
    x_km: f64,
    y_km: f64,
    #[serde(default)]
    offset_rad: Option<f64>,
}

#[inline]
fn covering_sector_index(station_offset: f64, zeta: usize, theta: f64) -> usize {
    let width = TAU / zeta as f64;
    let rel = normalize_angle(theta - station_offset);
    ((rel / width).floor() as usize).min(zeta - 1)
}

/// Returns the sector of `station` covering `x`. `sectors` must be the
/// station's own fan (as produced by [`build_sectors`]).
pub fn covering_sector(station: &BaseStation, sectors: &[Sector], x: Point) -> Result<usize> {
    let theta = x.bearing_from(station.position)?;
    sectors
        .iter()
        .find(|s| s.covers(theta))
        .map(|s| s.id)
        .ok_or_else(|| invalid("station sectors do not cover the full circle"))
}

/// A perturbed square grid of `n` stations over `region`. Each station is
/// displaced uniformly by up to `jitter` grid spacings in each axis and
/// then clamped to the region.
pub fn generate_grid_stations<R: Rng + ?Sized>(
    n: usize,
    region: Rect,
    jitter: f64,
    rng: &mut R,
) -> Result<Vec<BaseStation>> {
    if n == 0 {
        return Err(invalid("need at least one station"));
    }
    if !(jitter >= 0.0) || !jitter.is_finite() {
        return Err(invalid(
            "jitter must be a nonnegative fraction of the grid spacing",
        ));
    }
    let cols = (n as f64).sqrt().ceil() as usize;
    let rows = n.div_ceil(cols);
    let dx = region.width() / cols as f64;
    let dy = region.height() / rows as f64;
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let (r, c) = (k / cols, k % cols);
        let mut x = region.x_min + (c as f64 + 0.5) * dx;
        let mut y = region.y_min + (r as f64 + 0.5) * dy;
        if jitter > 0.0 {
            x += jitter * dx * rng.random_range(-1.0..1.0);
            y += jitter * dy * rng.random_range(-1.0..1.0);
        }
        x = x.clamp(region.x_min, region.x_max);
        y = y.clamp(region.y_min, region.y_max);
        out.push(BaseStation::new(k as u32 + 1, x, y));
    }
    Ok(out)
}

/// Uniform grid of buckets sized so that an exclusion check only touches
/// the 3x3 neighborhood of a cell.
struct ExclusionGrid {
    origin: Point,
    cell: f64,
    nx: usize,
    ny: usize,
    buckets: Vec<Vec<u32>>,
}

impl ExclusionGrid {
    fn new(region: Rect, d0: f64, expected: usize) -> Self {
        let target = (region.area() / expected.max(1) as f64).sqrt();
        let mut cell = target.max(d0);
        // cap the bucket count for tiny d0 over huge regions
        while (region.width() / cell).ceil() * (region.height() / cell).ceil()
            > 4.0 * expected.max(1024) as f64
        {
            cell *= 2.0;
        }
        let nx = ((region.width() / cell).ceil() as usize).max(1);
        let ny = ((region.height() / cell).ceil() as usize).max(1);
        Self {
            origin: Point::new(region.x_min, region.y_min),
            cell,
            nx,
            ny,
            buckets: vec![Vec::new(); nx * ny],
        }
    }

    #[inline]
    fn cell_of(&self, p: Point) -> (usize, usize) {
        let cx = (((p.x - self.origin.x) / self.cell).floor().max(0.0) as usize).min(self.nx - 1);
        let cy = (((p.y - self.origin.y) / self.cell).floor().max(0.0) as usize).min(self.ny - 1);
        (cx, cy)
    }

    fn clear_of(&self, p: Point, pts: &[Point], d0: f64) -> bool {
        let (cx, cy) = self.cell_of(p);
        let reach = (d0 / self.cell).ceil() as usize;
        let d0sq = d0 * d0;
        for gx in cx.saturating_sub(reach)..=(cx + reach).min(self.nx - 1) {
            for gy in cy.saturating_sub(reach)..=(cy + reach).min(self.ny - 1) {
                for &k in &self.buckets[gy * self.nx + gx] {
                    let d = p - pts[k as usize];
                    if d.dot(d) < d0sq {
                        return false;
                    }
                }
            }
        }
        true
    }

    fn insert(&mut self, p: Point, k: usize) {
        let (cx, cy) = self.cell_of(p);
        self.buckets[cy * self.nx + cx].push(k as u32);
    }
}

/// Places `m` mobiles uniformly in `region`, redrawing any candidate closer
/// than `d0` to an already accepted point.
pub fn place_mobiles<R: Rng + ?Sized>(
    region: Rect,
    m: usize,
    d0: f64,
    rng: &mut R,
) -> Result<Vec<Point>> {
    place_mobiles_around(region, &[], m, d0, rng)
}

/// Like [`place_mobiles`], but the points in `fixed` are accepted first
/// and are returned at the front of the output.
pub fn place_mobiles_around<R: Rng + ?Sized>(
    region: Rect,
    fixed: &[Point],
    m: usize,
    d0: f64,
    rng: &mut R,
) -> Result<Vec<Point>> {
    if !(d0 > 0.0) {
        return Err(invalid("exclusion radius must be positive"));
    }
    let total = fixed.len() + m;
    let mut pts = Vec::with_capacity(total);
    let mut grid = ExclusionGrid::new(region, d0, total);
    for &p in fixed {
        grid.insert(p, pts.len());
        pts.push(p);
    }
    for placed in 0..m {
        let mut ok = false;
        for _ in 0..REJECTION_BUDGET {
            let p = region.sample(rng);
            if grid.clear_of(p, &pts, d0) {
                grid.insert(p, pts.len());
                pts.push(p);
                ok = true;
                break;
            }
        }
        if !ok {
            return Err(Error::PlacementInfeasible {
                placed,
                requested: m,
            });
        }
    }
    Ok(pts)
}

/// Lognormal shadowing factors, one independent draw per (mobile, station)
/// link. Draws are a pure function of `(seed, mobile, station)`, so a link
/// always sees the same value without any shared mutable cache.
#[derive(Debug, Clone, Copy)]
pub struct ShadowField {
    seed: u64,
}

impl ShadowField {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    /// Shadowing factor in dB for the link between `mobile` and `station`
    /// whose length is `d` km.
    #[inline]
    pub fn xi_db(&self, prop: &PropagationParams, mobile: usize, station: usize, d: f64) -> f64 {
        let sigma = prop.shadow_sigma_unchecked(d.max(0.0));
        if sigma == 0.0 {
            return 0.0;
        }
        sigma * self.standard_normal(mobile, station)
    }

    #[inline]
    fn standard_normal(&self, mobile: usize, station: usize) -> f64 {
        let k = mix(&[self.seed, mobile as u64, station as u64]);
        let state = ((splitmix64(k) as u128) << 64) | k as u128;
        let mut rng = Pcg64Mcg::new(state | 1);
        rng.sample(StandardNormal)
    }
}

/// Shadowed local-mean gain of a link, in natural-log units:
/// `ln(10^(xi/10) f(d))`.
#[inline]
fn log_shadowed_gain(prop: &PropagationParams, xi_db: f64, d: f64) -> f64 {
    xi_db * std::f64::consts::LN_10 / 10.0 + prop.log_path_gain(d)
}

/// Serving sector of every mobile: the covering sector of the station with
/// the largest shadowed gain, lowest index on ties.
pub fn associate(
    topology: &NetworkTopology,
    mobiles: &[Point],
    prop: &PropagationParams,
    shadow: &ShadowField,
) -> Result<Vec<usize>> {
    mobiles
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let station = best_station(topology, prop, shadow, i, x);
            topology.covering_sector(station, x)
        })
        .collect()
}

fn best_station(
    topology: &NetworkTopology,
    prop: &PropagationParams,
    shadow: &ShadowField,
    i: usize,
    x: Point,
) -> usize {
    let shadowing = prop.shadowing_enabled();
    let mut best = (f64::NEG_INFINITY, 0usize);
    for (s, st) in topology.stations.iter().enumerate() {
        let d = st.position.dist(x);
        let g = if shadowing {
            log_shadowed_gain(prop, shadow.xi_db(prop, i, s, d), d)
        } else {
            prop.log_path_gain(d)
        };
        if g > best.0 {
            best = (g, s);
        }
    }
    best.1
}

/// Candidate stations for mobile `i`, best shadowed gain first.
fn ranked_stations(
    topology: &NetworkTopology,
    prop: &PropagationParams,
    shadow: &ShadowField,
    i: usize,
    x: Point,
) -> Vec<usize> {
    let mut scored: Vec<(f64, usize)> = topology
        .stations
        .iter()
        .enumerate()
        .map(|(s, st)| {
            let d = st.position.dist(x);
            (log_shadowed_gain(prop, shadow.xi_db(prop, i, s, d), d), s)
        })
        .collect();
    scored.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    scored.into_iter().map(|(_, s)| s).collect()
}

/// Caps every sector at `capacity` mobiles. Overflow mobiles, chosen
/// uniformly among the sector's non-pinned members, move to their
/// next-best candidate sector with room; with no room anywhere they become
/// inactive (`None`).
#[allow(clippy::too_many_arguments)]
pub fn enforce_capacity<R: Rng + ?Sized>(
    topology: &NetworkTopology,
    mobiles: &[Point],
    prop: &PropagationParams,
    shadow: &ShadowField,
    serving: &[usize],
    capacity: usize,
    pinned: &[usize],
    rng: &mut R,
) -> Result<(Vec<Option<usize>>, Vec<u32>)> {
    let n_sectors = topology.sectors.len();
    let mut loads = vec![0u32; n_sectors];
    for &l in serving {
        loads[l] += 1;
    }
    let mut out: Vec<Option<usize>> = serving.iter().map(|&l| Some(l)).collect();
    let overfull: Vec<usize> = (0..n_sectors)
        .filter(|&l| loads[l] as usize > capacity)
        .collect();
    if overfull.is_empty() {
        return Ok((out, loads));
    }
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); n_sectors];
    for (i, &l) in serving.iter().enumerate() {
        if loads[l] as usize > capacity && !pinned.contains(&i) {
            members[l].push(i);
        }
    }
    for l in overfull {
        let excess = loads[l] as usize - capacity;
        let pool = &members[l];
        let chosen = index::sample(rng, pool.len(), excess.min(pool.len()));
        for k in chosen.iter() {
            let i = pool[k];
            loads[l] -= 1;
            out[i] = None;
            let x = mobiles[i];
            for s in ranked_stations(topology, prop, shadow, i, x) {
                let c = topology.covering_sector(s, x)?;
                if c != l && (loads[c] as usize) < capacity {
                    loads[c] += 1;
                    out[i] = Some(c);
                    break;
                }
            }
        }
    }
    Ok((out, loads))
}

/// One network realization: mobile positions, their serving sectors after
/// capacity enforcement, and per-sector loads. Immutable once built.
#[derive(Debug, Clone)]
pub struct NetworkRealization<'t> {
    topology: &'t NetworkTopology,
    mobiles: Vec<Point>,
    serving: Vec<Option<usize>>,
    loads: Vec<u32>,
    members: Vec<Vec<usize>>,
    shadow: ShadowField,
    prop: PropagationParams,
}

/// Options for [`NetworkRealization::build`].
#[derive(Debug, Clone)]
pub struct RealizationSpec {
    pub prop: PropagationParams,
    pub shadow_seed: u64,
    /// Maximum mobiles per sector, `L / L_l`.
    pub capacity: usize,
    /// `(mobile, sector)` pairs forced regardless of association and
    /// never evicted by capacity enforcement.
    pub pinned: Vec<(usize, usize)>,
}

impl<'t> NetworkRealization<'t> {
    pub fn build<R: Rng + ?Sized>(
        topology: &'t NetworkTopology,
        mobiles: Vec<Point>,
        spec: RealizationSpec,
        rng: &mut R,
    ) -> Result<Self> {
        if spec.capacity == 0 {
            return Err(invalid("sector capacity must be positive"));
        }
        let shadow = ShadowField::new(spec.shadow_seed);
        let mut serving = associate(topology, &mobiles, &spec.prop, &shadow)?;
        for &(i, l) in &spec.pinned {
            if i >= mobiles.len() || l >= topology.sectors.len() {
                return Err(invalid("pinned mobile or sector out of range"));
            }
            serving[i] = l;
        }
        let pinned: Vec<usize> = spec.pinned.iter().map(|p| p.0).collect();
        for l in spec.pinned.iter().map(|p| p.1) {
            if spec.pinned.iter().filter(|p| p.1 == l).count() > spec.capacity {
                return Err(invalid("more pinned mobiles than a sector can hold"));
            }
        }
        let (serving, loads) = enforce_capacity(
            topology,
            &mobiles,
            &spec.prop,
            &shadow,
            &serving,
            spec.capacity,
            &pinned,
            rng,
        )?;
        Ok(Self::from_parts(
            topology, mobiles, serving, loads, shadow, spec.prop,
        ))
    }

    /// Assembles a realization from an explicit serving map.
    pub fn from_parts(
        topology: &'t NetworkTopology,
        mobiles: Vec<Point>,
        serving: Vec<Option<usize>>,
        loads: Vec<u32>,
        shadow: ShadowField,
        prop: PropagationParams,
    ) -> Self {
        let mut members = vec![Vec::new(); topology.sectors.len()];
        for (i, l) in serving.iter().enumerate() {
            if let Some(l) = *l {
                members[l].push(i);
            }
        }
        Self {
            topology,
            mobiles,
            serving,
            loads,
            members,
            shadow,
            prop,
        }
    }

    pub fn topology(&self) -> &'t NetworkTopology {
        self.topology
    }

    pub fn mobiles(&self) -> &[Point] {
        &self.mobiles
    }

    /// Serving sector of mobile `i`, `None` when capacity left it inactive.
    pub fn serving(&self, i: usize) -> Option<usize> {
        self.serving[i]
    }

    pub fn serving_map(&self) -> &[Option<usize>] {
        &self.serving
    }

    /// `N_l`, the number of mobiles associated with sector `l`.
    pub fn load(&self, l: usize) -> u32 {
        self.loads[l]
    }

    pub fn loads(&self) -> &[u32] {
        &self.loads
    }

    /// Active mobiles served by sector `l`, ascending.
    pub fn members(&self, l: usize) -> &[usize] {
        &self.members[l]
    }

    pub fn prop(&self) -> &PropagationParams {
        &self.prop
    }

    pub fn shadow(&self) -> &ShadowField {
        &self.shadow
    }

    /// Shadowing factor in dB on the link from mobile `i` to sector `l`.
    pub fn xi_db(&self, i: usize, l: usize) -> f64 {
        let st = self.topology.sectors[l].station;
        let d = self.topology.stations[st].position.dist(self.mobiles[i]);
        self.shadow.xi_db(&self.prop, i, st, d)
    }

    /// Shadowed local-mean gain `10^(xi/10) f(d)` from mobile `i` to sector `l`.
    pub fn shadowed_gain(&self, i: usize, l: usize) -> f64 {
        let d = self.topology.sector_position(l).dist(self.mobiles[i]);
        log_shadowed_gain(&self.prop, self.xi_db(i, l), d).exp()
    }
}
