//! Earth-centred frames, WGS-84 geodetic conversion, local look angles and the
//! navigation geometry matrix.

use std::f64::consts::{FRAC_PI_2, PI};
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// WGS-84 semi-major axis (m).
pub const WGS84_A: f64 = 6_378_137.0;
/// WGS-84 flattening.
pub const WGS84_F: f64 = 1.0 / 298.257_223_563;
/// WGS-84 semi-minor axis (m).
pub const WGS84_B: f64 = WGS84_A * (1.0 - WGS84_F);
/// First eccentricity squared.
pub const WGS84_E2: f64 = WGS84_F * (2.0 - WGS84_F);

const GEODETIC_TOL: f64 = 1e-12;
const GEODETIC_MAX_ITER: usize = 16;

/// Position or displacement in the Earth-centred Earth-fixed frame, in meters.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EcefVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl EcefVector {
    pub const ZERO: EcefVector = EcefVector { x: 0.0, y: 0.0, z: 0.0 };

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn from_array(v: [f64; 3]) -> Self {
        Self::new(v[0], v[1], v[2])
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn dot(self, other: Self) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn cross(self, other: Self) -> Self {
        Self::new(
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        )
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y).hypot(self.z)
    }

    pub fn distance(self, other: Self) -> f64 {
        (other - self).norm()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Unit vector in the same direction; zero or non-finite input is rejected.
    pub fn unit(self) -> Result<Self> {
        let n = self.norm();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::DegenerateInput("cannot normalise a zero vector"));
        }
        Ok(self * (1.0 / n))
    }
}

impl Add for EcefVector {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.x + rhs.x, self.y + rhs.y, self.z + rhs.z)
    }
}

impl Sub for EcefVector {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.x - rhs.x, self.y - rhs.y, self.z - rhs.z)
    }
}

impl Mul<f64> for EcefVector {
    type Output = Self;
    fn mul(self, rhs: f64) -> Self {
        Self::new(self.x * rhs, self.y * rhs, self.z * rhs)
    }
}

impl Neg for EcefVector {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y, -self.z)
    }
}

/// Latitude/longitude in radians and height in meters above the WGS-84 ellipsoid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeodeticPosition {
    latitude: f64,
    longitude: f64,
    height: f64,
}

impl GeodeticPosition {
    /// Latitude must lie in [-π/2, π/2]. Longitude is wrapped into (-π, π].
    pub fn new(latitude: f64, longitude: f64, height: f64) -> Result<Self> {
        if !latitude.is_finite() || latitude.abs() > FRAC_PI_2 {
            return Err(Error::invalid("latitude", format!("{latitude} outside [-pi/2, pi/2]")));
        }
        if !longitude.is_finite() {
            return Err(Error::invalid("longitude", "not finite"));
        }
        if !height.is_finite() {
            return Err(Error::invalid("height", "not finite"));
        }
        Ok(Self {
            latitude,
            longitude: wrap_longitude(longitude),
            height,
        })
    }

    pub fn from_degrees(latitude_deg: f64, longitude_deg: f64, height: f64) -> Result<Self> {
        Self::new(latitude_deg.to_radians(), longitude_deg.to_radians(), height)
    }

    pub fn latitude(&self) -> f64 {
        self.latitude
    }

    pub fn longitude(&self) -> f64 {
        self.longitude
    }

    pub fn height(&self) -> f64 {
        self.height
    }

    pub fn to_ecef(&self) -> EcefVector {
        geodetic_to_ecef(self)
    }

    /// Local East, North and Up unit vectors expressed in ECEF.
    pub fn enu_basis(&self) -> [EcefVector; 3] {
        let (sl, cl) = self.latitude.sin_cos();
        let (so, co) = self.longitude.sin_cos();
        [
            EcefVector::new(-so, co, 0.0),
            EcefVector::new(-sl * co, -sl * so, cl),
            EcefVector::new(cl * co, cl * so, sl),
        ]
    }
}

/// Wrap an angle into (-π, π].
pub fn wrap_longitude(lon: f64) -> f64 {
    let mut l = lon.rem_euclid(2.0 * PI);
    if l > PI {
        l -= 2.0 * PI;
    }
    l
}

fn prime_vertical_radius(sin_lat: f64) -> f64 {
    WGS84_A / (1.0 - WGS84_E2 * sin_lat * sin_lat).sqrt()
}

pub fn geodetic_to_ecef(p: &GeodeticPosition) -> EcefVector {
    let (sl, cl) = p.latitude.sin_cos();
    let (so, co) = p.longitude.sin_cos();
    let n = prime_vertical_radius(sl);
    EcefVector::new(
        (n + p.height) * cl * co,
        (n + p.height) * cl * so,
        (n * (1.0 - WGS84_E2) + p.height) * sl,
    )
}

/// Inverse of [`geodetic_to_ecef`], iterating Bowring's parametric-latitude
/// update until the latitude change drops below 1e-12 rad.
pub fn ecef_to_geodetic(v: EcefVector) -> Result<GeodeticPosition> {
    if !v.is_finite() {
        return Err(Error::DegenerateInput("non-finite ECEF vector"));
    }
    if v.norm() == 0.0 {
        return Err(Error::DegenerateInput("ECEF origin has no geodetic position"));
    }
    let p = v.x.hypot(v.y);
    let longitude = if p == 0.0 { 0.0 } else { wrap_longitude(v.y.atan2(v.x)) };
    if p == 0.0 {
        let latitude = FRAC_PI_2.copysign(v.z);
        return Ok(GeodeticPosition {
            latitude,
            longitude,
            height: v.z.abs() - WGS84_B,
        });
    }

    let ep2 = WGS84_E2 / (1.0 - WGS84_E2);
    let mut beta = (WGS84_A * v.z).atan2(WGS84_B * p);
    let mut lat = 0.0;
    for _ in 0..GEODETIC_MAX_ITER {
        let (sb, cb) = beta.sin_cos();
        let next = (v.z + ep2 * WGS84_B * sb.powi(3)).atan2(p - WGS84_E2 * WGS84_A * cb.powi(3));
        let done = (next - lat).abs() < GEODETIC_TOL;
        lat = next;
        beta = ((1.0 - WGS84_F) * lat.sin()).atan2(lat.cos());
        if done {
            break;
        }
    }
    let (sl, cl) = lat.sin_cos();
    let n = prime_vertical_radius(sl);
    let height = if cl.abs() >= sl.abs() {
        p / cl - n
    } else {
        v.z / sl - n * (1.0 - WGS84_E2)
    };
    Ok(GeodeticPosition {
        latitude: lat,
        longitude,
        height,
    })
}

/// Elevation in [-π/2, π/2] and azimuth in [0, 2π), clockwise from north.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LookAngles {
    pub elevation: f64,
    pub azimuth: f64,
}

pub fn look_angles(receiver: EcefVector, satellite: EcefVector) -> Result<LookAngles> {
    let los = satellite - receiver;
    if los.norm() == 0.0 {
        return Err(Error::DegenerateInput("satellite coincides with receiver"));
    }
    let site = ecef_to_geodetic(receiver)?;
    let [east, north, up] = site.enu_basis();
    let los = los.unit()?;
    let (e, n, u) = (los.dot(east), los.dot(north), los.dot(up));
    let elevation = u.clamp(-1.0, 1.0).asin();
    let mut azimuth = e.atan2(n);
    if azimuth < 0.0 {
        azimuth += 2.0 * PI;
    }
    if azimuth >= 2.0 * PI {
        azimuth = 0.0;
    }
    Ok(LookAngles { elevation, azimuth })
}

const UNIT_NORM_TOL: f64 = 1e-12;

/// The r×4 geometry matrix: one `(u, v, w, 1)` row per satellite, where
/// `(u, v, w)` is the unit receiver→satellite direction.
///
/// Matrices built from a receiver position also remember the receiver's
/// geocentric direction, which is needed to append the altitude-aiding row.
#[derive(Debug, Clone, PartialEq)]
pub struct GeometryMatrix {
    rows: Vec<[f64; 4]>,
    zenith: Option<[f64; 3]>,
}

impl GeometryMatrix {
    /// Builds rows from arbitrary non-zero direction vectors, normalising each.
    pub fn from_directions(directions: &[[f64; 3]]) -> Result<Self> {
        if directions.is_empty() {
            return Err(Error::InsufficientMeasurements { got: 0, need: 1 });
        }
        let rows = directions
            .iter()
            .map(|d| {
                let u = EcefVector::from_array(*d).unit()?;
                Ok([u.x, u.y, u.z, 1.0])
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { rows, zenith: None })
    }

    /// Accepts already-formed rows; each direction must be unit-norm within 1e-12
    /// and the clock column exactly 1.
    pub fn from_rows(rows: Vec<[f64; 4]>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InsufficientMeasurements { got: 0, need: 1 });
        }
        for row in &rows {
            let n = (row[0] * row[0] + row[1] * row[1] + row[2] * row[2]).sqrt();
            if (n - 1.0).abs() > UNIT_NORM_TOL || row[3] != 1.0 {
                return Err(Error::invalid("geometry row", format!("{row:?} is not (unit, 1)")));
            }
        }
        Ok(Self { rows, zenith: None })
    }

    /// Attaches the receiver's outward geocentric unit direction used by
    /// [`GeometryMatrix::with_altitude_row`].
    pub fn with_zenith(mut self, zenith: EcefVector) -> Result<Self> {
        self.zenith = Some(zenith.unit()?.to_array());
        Ok(self)
    }

    pub fn rows(&self) -> &[[f64; 4]] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn zenith(&self) -> Option<[f64; 3]> {
        self.zenith
    }

    /// Rows at `indices`, in the given order.
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::InsufficientMeasurements { got: 0, need: 1 });
        }
        let rows = indices
            .iter()
            .map(|&i| {
                self.rows
                    .get(i)
                    .copied()
                    .ok_or_else(|| Error::invalid("subset index", format!("{i} out of range")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            rows,
            zenith: self.zenith,
        })
    }

    /// Appends the virtual height row `(-zenith, 1)`: a pseudo-satellite at the
    /// Earth's centre standing in for a known-height constraint.
    pub fn with_altitude_row(&self) -> Result<Self> {
        let z = self.zenith.ok_or(Error::DegenerateInput(
            "altitude aiding requires the receiver direction",
        ))?;
        let mut rows = self.rows.clone();
        rows.push([-z[0], -z[1], -z[2], 1.0]);
        Ok(Self {
            rows,
            zenith: self.zenith,
        })
    }
}

/// Geometry matrix of `satellites` seen from `receiver`, rows in input order.
pub fn geometry_matrix(receiver: EcefVector, satellites: &[EcefVector]) -> Result<GeometryMatrix> {
    if satellites.is_empty() {
        return Err(Error::InsufficientMeasurements { got: 0, need: 1 });
    }
    let rows = satellites
        .iter()
        .map(|&s| {
            let d = s - receiver;
            if d.norm() == 0.0 {
                return Err(Error::DegenerateInput("satellite coincides with receiver"));
            }
            let u = d.unit()?;
            Ok([u.x, u.y, u.z, 1.0])
        })
        .collect::<Result<Vec<_>>>()?;
    let zenith = receiver.unit().ok().map(EcefVector::to_array);
    Ok(GeometryMatrix { rows, zenith })
}
