//! Schwarzschild light-cone bookkeeping for two static clocks on a radial line.
//!
//! Clock A and clock B sit at distances `R` and `R + h` from the mass when the
//! mass is near A, and the other way round when it is near B. Clock readings
//! are proper times; light travels radially between them.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Events whose light-cone slack is within this many seconds of zero are
/// flagged as boundary cases.
pub const BOUNDARY_BAND: f64 = 1e-9;
/// Masses below this value are treated as flat spacetime by the thresholds.
pub const MASS_FLOOR: f64 = 1e-30;
pub const CODATA_G: f64 = 6.67430e-11;
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

fn default_g() -> f64 {
    CODATA_G
}

fn default_c() -> f64 {
    SPEED_OF_LIGHT
}

#[derive(Deserialize)]
struct RawConfig {
    #[serde(rename = "G", default = "default_g")]
    g: f64,
    #[serde(default = "default_c")]
    c: f64,
    #[serde(rename = "M")]
    m: f64,
    #[serde(rename = "R")]
    r: f64,
    h: f64,
}

/// Mass, clock geometry and the two physical constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawConfig")]
pub struct SpacetimeConfig {
    #[serde(rename = "G")]
    g: f64,
    c: f64,
    #[serde(rename = "M")]
    m: f64,
    #[serde(rename = "R")]
    r: f64,
    h: f64,
}

impl TryFrom<RawConfig> for SpacetimeConfig {
    type Error = Error;

    fn try_from(raw: RawConfig) -> Result<Self> {
        SpacetimeConfig::new(raw.g, raw.c, raw.m, raw.r, raw.h)
    }
}

impl SpacetimeConfig {
    pub fn new(g: f64, c: f64, m: f64, r: f64, h: f64) -> Result<Self> {
        let finite = [g, c, m, r, h].iter().all(|v| v.is_finite());
        if !finite || g <= 0.0 || c <= 0.0 || h <= 0.0 || m < 0.0 || r <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "need finite G, c, h > 0, M >= 0, R > 0 (got G={g}, c={c}, M={m}, R={r}, h={h})"
            )));
        }
        let cfg = SpacetimeConfig { g, c, m, r, h };
        let rs = cfg.schwarzschild_radius();
        if r <= rs {
            return Err(Error::Horizon { r, rs });
        }
        Ok(cfg)
    }

    /// SI units with CODATA values for G and c.
    pub fn si(m: f64, r: f64, h: f64) -> Result<Self> {
        Self::new(CODATA_G, SPEED_OF_LIGHT, m, r, h)
    }

    /// Geometric units, G = c = 1.
    pub fn geometric(m: f64, r: f64, h: f64) -> Result<Self> {
        Self::new(1.0, 1.0, m, r, h)
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn mass(&self) -> f64 {
        self.m
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn with_mass(&self, m: f64) -> Result<Self> {
        Self::new(self.g, self.c, m, self.r, self.h)
    }

    pub fn schwarzschild_radius(&self) -> f64 {
        2.0 * self.g * self.m / (self.c * self.c)
    }

    /// Radial positions of (A, B) for the given mass placement.
    pub fn radii(&self, mass_near: Clock) -> (f64, f64) {
        match mass_near {
            Clock::A => (self.r, self.r + self.h),
            Clock::B => (self.r + self.h, self.r),
        }
    }

    fn check_radius(&self, r: f64) -> Result<f64> {
        let rs = self.schwarzschild_radius();
        if r.is_nan() || r <= rs {
            return Err(Error::Horizon { r, rs });
        }
        Ok(rs)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Clock {
    A,
    B,
}

impl Clock {
    pub fn other(self) -> Clock {
        match self {
            Clock::A => Clock::B,
            Clock::B => Clock::A,
        }
    }
}

impl fmt::Display for Clock {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Clock::A => "A",
            Clock::B => "B",
        })
    }
}

/// `g_tt = −(1 − R_s/r)`.
pub fn metric_gtt(r: f64, cfg: &SpacetimeConfig) -> Result<f64> {
    let rs = cfg.check_radius(r)?;
    Ok(-(1.0 - rs / r))
}

/// Coordinate time for a radial light signal between two radii.
pub fn light_coordinate_time(r_from: f64, r_to: f64, cfg: &SpacetimeConfig) -> Result<f64> {
    let rs = cfg.check_radius(r_from)?;
    cfg.check_radius(r_to)?;
    let (lo, hi) = if r_from <= r_to { (r_from, r_to) } else { (r_to, r_from) };
    let log_term = if rs == 0.0 { 0.0 } else { rs * ((hi - rs) / (lo - rs)).ln() };
    Ok(((hi - lo) + log_term) / cfg.c)
}

/// Proper time on the receiving clock at which a signal sent at proper time
/// `tau_emit` arrives.
pub fn arrival_proper_time(tau_emit: f64, r_emit: f64, r_receive: f64, cfg: &SpacetimeConfig) -> Result<f64> {
    if tau_emit.is_nan() || tau_emit < 0.0 {
        return Err(Error::Precondition(format!("emission time {tau_emit} is negative")));
    }
    let t_c = light_coordinate_time(r_emit, r_receive, cfg)?;
    let lapse_emit = (-metric_gtt(r_emit, cfg)?).sqrt();
    let lapse_recv = (-metric_gtt(r_receive, cfg)?).sqrt();
    Ok(lapse_recv * (tau_emit / lapse_emit + t_c))
}

/// Smallest common proper time τ at which an event on the far clock can
/// signal an event on the near clock.
pub fn tau_star_threshold(cfg: &SpacetimeConfig) -> Result<f64> {
    if cfg.m < MASS_FLOOR {
        return Err(Error::DivergentThreshold(format!("mass {} is below the floor {MASS_FLOOR}", cfg.m)));
    }
    let rs = cfg.schwarzschild_radius();
    let (near, far) = (cfg.r, cfg.r + cfg.h);
    cfg.check_radius(near)?;
    // 1 − √(g(R)/g(R+h)) written without cancellation
    let ratio = (1.0 - rs / near) / (1.0 - rs / far);
    let one_minus_ratio = rs * cfg.h / (near * far) / (1.0 - rs / far);
    let denom = one_minus_ratio / (1.0 + ratio.sqrt());
    if !denom.is_finite() || denom <= 0.0 {
        return Err(Error::DivergentThreshold(format!("dilation contrast {denom} vanishes")));
    }
    let t_c = light_coordinate_time(near, far, cfg)?;
    let out = (-metric_gtt(near, cfg)?).sqrt() * t_c / denom;
    if !out.is_finite() {
        return Err(Error::DivergentThreshold("threshold overflows".into()));
    }
    Ok(out)
}

/// Earliest reading of clock B that lies in the causal future of an event at
/// `tau_star` on clock A under both mass placements.
pub fn definite_future_threshold(tau_star: f64, cfg: &SpacetimeConfig) -> Result<f64> {
    let threshold = tau_star_threshold(cfg)?;
    if tau_star.is_nan() || tau_star < threshold * (1.0 - 1e-12) {
        return Err(Error::Precondition(format!("tau_star {tau_star} is below the threshold {threshold}")));
    }
    let (a_near, b_near) = cfg.radii(Clock::A);
    let (a_far, b_far) = cfg.radii(Clock::B);
    let near_a = arrival_proper_time(tau_star, a_near, b_near, cfg)?;
    let near_b = arrival_proper_time(tau_star, a_far, b_far, cfg)?;
    Ok(near_a.max(near_b))
}

/// A proper-time reading on one of the clocks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EventSpec {
    pub clock: Clock,
    pub proper_time: f64,
}

impl EventSpec {
    pub fn new(clock: Clock, proper_time: f64) -> Result<Self> {
        if proper_time.is_nan() || proper_time < 0.0 {
            return Err(Error::Precondition(format!("proper time {proper_time} is negative")));
        }
        Ok(EventSpec { clock, proper_time })
    }

    pub fn on_a(proper_time: f64) -> Result<Self> {
        Self::new(Clock::A, proper_time)
    }

    pub fn on_b(proper_time: f64) -> Result<Self> {
        Self::new(Clock::B, proper_time)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    #[serde(rename = "X_before_Y")]
    XBeforeY,
    #[serde(rename = "Y_before_X")]
    YBeforeX,
    Spacelike,
}

impl Relation {
    pub fn swapped(self) -> Relation {
        match self {
            Relation::XBeforeY => Relation::YBeforeX,
            Relation::YBeforeX => Relation::XBeforeY,
            Relation::Spacelike => Relation::Spacelike,
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::XBeforeY => "X_before_Y",
            Relation::YBeforeX => "Y_before_X",
            Relation::Spacelike => "spacelike",
        })
    }
}

/// Relation of the first event (X) to the second (Y).
///
/// `margin` is the light-cone slack in seconds: nonnegative for X→Y,
/// nonpositive for Y→X, and negative (the larger of the two deficits) for
/// spacelike pairs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CausalVerdict {
    pub relation: Relation,
    pub margin: f64,
    pub boundary: bool,
}

pub fn classify_order(ev1: EventSpec, ev2: EventSpec, mass_near: Clock, cfg: &SpacetimeConfig) -> Result<CausalVerdict> {
    let radius = |clock| {
        let (ra, rb) = cfg.radii(mass_near);
        if clock == Clock::A {
            ra
        } else {
            rb
        }
    };
    let reach = |from: EventSpec, to: EventSpec| -> Result<f64> {
        if from.clock == to.clock {
            Ok(from.proper_time)
        } else {
            arrival_proper_time(from.proper_time, radius(from.clock), radius(to.clock), cfg)
        }
    };
    let m12 = ev2.proper_time - reach(ev1, ev2)?;
    let m21 = ev1.proper_time - reach(ev2, ev1)?;
    let ok12 = m12 >= -BOUNDARY_BAND;
    let ok21 = m21 >= -BOUNDARY_BAND;
    let (relation, margin) = match (ok12, ok21) {
        (true, true) if m21 > m12 => (Relation::YBeforeX, -m21),
        (true, _) => (Relation::XBeforeY, m12),
        (false, true) => (Relation::YBeforeX, -m21),
        (false, false) => (Relation::Spacelike, m12.max(m21)),
    };
    Ok(CausalVerdict { relation, margin, boundary: margin.abs() < BOUNDARY_BAND })
}

/// One mass placement in a concrete configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Geometry {
    pub config: SpacetimeConfig,
    pub mass_near: Clock,
}

/// Alice's events X₁..X_{m−1} on clock A, Bob's event Y on clock B, and one
/// geometry per causal order.
///
/// Geometry `i` must place exactly `m − 1 − i` of Alice's events before Y,
/// so geometry 0 realizes X₁..X_{m−1}Y and the last one YX₁..X_{m−1}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MicsScenario {
    pub alice_times: Vec<f64>,
    pub bob_time: f64,
    pub geometries: Vec<Geometry>,
}

impl MicsScenario {
    /// X and Y both at `tau_star`, mass near B then near A.
    pub fn two_ics(cfg: SpacetimeConfig, tau_star: f64) -> Self {
        MicsScenario {
            alice_times: vec![tau_star],
            bob_time: tau_star,
            geometries: vec![
                Geometry { config: cfg, mass_near: Clock::B },
                Geometry { config: cfg, mass_near: Clock::A },
            ],
        }
    }

    /// Geometric-unit configurations (G = c = M = h = 1) realizing all orders
    /// for m = 2, 3 or 4.
    pub fn toy(m: usize) -> Result<Self> {
        let geo = |r: f64, mass_near| -> Result<Geometry> {
            Ok(Geometry { config: SpacetimeConfig::geometric(1.0, r, 1.0)?, mass_near })
        };
        match m {
            2 => {
                let cfg = SpacetimeConfig::geometric(1.0, 3.0, 1.0)?;
                Ok(Self::two_ics(cfg, 8.0))
            }
            3 => Ok(MicsScenario {
                alice_times: vec![12.0, 16.0],
                bob_time: 12.0,
                geometries: vec![geo(2.2, Clock::B)?, geo(3.5, Clock::B)?, geo(3.0, Clock::A)?],
            }),
            4 => Ok(MicsScenario {
                alice_times: vec![12.0, 16.0, 24.0],
                bob_time: 12.0,
                geometries: vec![geo(2.05, Clock::B)?, geo(2.3, Clock::B)?, geo(3.5, Clock::B)?, geo(3.0, Clock::A)?],
            }),
            _ => Err(Error::Unsupported(format!("m = {m}"))),
        }
    }
}

/// Order labels for m causal orders, e.g. `X1X2Y`, `X1YX2`, `YX1X2`.
pub fn order_labels(m: usize) -> Vec<String> {
    if m == 2 {
        return vec!["X->Y".into(), "Y->X".into()];
    }
    (0..m)
        .map(|i| {
            let before = m - 1 - i;
            let mut s = String::new();
            for j in 1..m {
                if j == before + 1 {
                    s.push('Y');
                }
                s.push_str(&format!("X{j}"));
            }
            if before == m - 1 {
                s.push('Y');
            }
            s
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairCheck {
    pub event: String,
    pub expected: Relation,
    pub verdict: CausalVerdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderCheck {
    pub order: String,
    pub mass_near: Clock,
    pub realized: bool,
    pub pairs: Vec<PairCheck>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MicsReport {
    pub m: usize,
    pub valid: bool,
    pub orders: Vec<OrderCheck>,
    pub failure: Option<String>,
}

/// Checks that every geometry of the scenario realizes its causal order.
pub fn validate_mics(scn: &MicsScenario, m: usize) -> Result<MicsReport> {
    if !(2..=4).contains(&m) {
        return Err(Error::Unsupported(format!("m = {m}; expected 2, 3 or 4")));
    }
    if scn.alice_times.len() != m - 1 || scn.geometries.len() != m {
        return Err(Error::InvalidConfig(format!(
            "m = {m} needs {} Alice events and {m} geometries (got {} and {})",
            m - 1,
            scn.alice_times.len(),
            scn.geometries.len()
        )));
    }
    let y = EventSpec::on_b(scn.bob_time)?;
    let labels = order_labels(m);
    let mut orders = Vec::with_capacity(m);
    let mut failure = None;
    for (i, geo) in scn.geometries.iter().enumerate() {
        let before = m - 1 - i;
        let mut pairs = Vec::with_capacity(m - 1);
        for (j, &t) in scn.alice_times.iter().enumerate() {
            let x = EventSpec::on_a(t)?;
            let verdict = classify_order(x, y, geo.mass_near, &geo.config)?;
            let expected = if j < before { Relation::XBeforeY } else { Relation::YBeforeX };
            let name = if m == 2 { "X".to_string() } else { format!("X{}", j + 1) };
            pairs.push(PairCheck { event: name, expected, verdict });
        }
        let realized = pairs.iter().all(|p| p.verdict.relation == p.expected);
        if !realized && failure.is_none() {
            let bad = pairs.iter().find(|p| p.verdict.relation != p.expected).expect("some pair failed");
            failure = Some(format!(
                "order {} (mass near {}): pair ({}, Y) is {} with margin {:e}, expected {}",
                labels[i], geo.mass_near, bad.event, bad.verdict.relation, bad.verdict.margin, bad.expected
            ));
        }
        orders.push(OrderCheck { order: labels[i].clone(), mass_near: geo.mass_near, realized, pairs });
    }
    Ok(MicsReport { m, valid: failure.is_none(), orders, failure })
}
