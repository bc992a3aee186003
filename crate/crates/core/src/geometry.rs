//! Planar geometry on longitude/latitude data.
//!
//! Coordinates are stored in degrees (EPSG:4326, `[lon, lat]` order). Metric
//! quantities go through a local equirectangular projection, so areas come
//! out in km² and distances in km. The projection is affine, which means
//! point-set operations (intersection, hulls, centroids) give the same answer
//! in degree space and in the projected plane.

use geo::BooleanOps;

use crate::error::{Error, Result};

/// Mean Earth radius (IUGG), km.
pub const EARTH_RADIUS_KM: f64 = 6371.0088;

/// Kilometres per degree used by the planar projection (fixed constant).
pub const KM_PER_DEGREE: f64 = 111.19493;

/// Absolute tolerance on coordinate comparisons, degrees.
pub const COORD_TOL_DEG: f64 = 1e-9;

/// Areas at or below this are treated as empty, km².
pub const MIN_AREA_KM2: f64 = 1e-12;

// Same threshold expressed in square degrees (conservative at the equator).
const MIN_AREA_DEG2: f64 = MIN_AREA_KM2 / (KM_PER_DEGREE * KM_PER_DEGREE);

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeoPoint {
    pub lon: f64,
    pub lat: f64,
}

impl GeoPoint {
    pub fn new(lon: f64, lat: f64) -> Result<Self> {
        if !lon.is_finite() || !lat.is_finite() {
            return Err(Error::Geometry(format!("non-finite coordinate ({lon}, {lat})")));
        }
        if !(-180.0..=180.0).contains(&lon) || !(-90.0..=90.0).contains(&lat) {
            return Err(Error::Geometry(format!(
                "coordinate out of range: lon={lon}, lat={lat}"
            )));
        }
        Ok(GeoPoint { lon, lat })
    }

    fn approx_eq(&self, other: &GeoPoint) -> bool {
        (self.lon - other.lon).abs() <= COORD_TOL_DEG && (self.lat - other.lat).abs() <= COORD_TOL_DEG
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlanarPoint {
    pub x: f64,
    pub y: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundingBox {
    pub min_lon: f64,
    pub min_lat: f64,
    pub max_lon: f64,
    pub max_lat: f64,
}

impl BoundingBox {
    pub fn of_points<'a>(points: impl IntoIterator<Item = &'a GeoPoint>) -> Option<Self> {
        let mut it = points.into_iter();
        let first = it.next()?;
        let mut bb = BoundingBox {
            min_lon: first.lon,
            min_lat: first.lat,
            max_lon: first.lon,
            max_lat: first.lat,
        };
        for p in it {
            bb.min_lon = bb.min_lon.min(p.lon);
            bb.min_lat = bb.min_lat.min(p.lat);
            bb.max_lon = bb.max_lon.max(p.lon);
            bb.max_lat = bb.max_lat.max(p.lat);
        }
        Some(bb)
    }

    pub fn center(&self) -> GeoPoint {
        GeoPoint {
            lon: 0.5 * (self.min_lon + self.max_lon),
            lat: 0.5 * (self.min_lat + self.max_lat),
        }
    }

    pub fn width_deg(&self) -> f64 {
        self.max_lon - self.min_lon
    }

    pub fn height_deg(&self) -> f64 {
        self.max_lat - self.min_lat
    }

    pub fn contains(&self, p: &GeoPoint) -> bool {
        p.lon >= self.min_lon - COORD_TOL_DEG
            && p.lon <= self.max_lon + COORD_TOL_DEG
            && p.lat >= self.min_lat - COORD_TOL_DEG
            && p.lat <= self.max_lat + COORD_TOL_DEG
    }

    /// Closed-box overlap test, padded by `pad` degrees.
    pub fn intersects(&self, other: &BoundingBox, pad: f64) -> bool {
        self.min_lon <= other.max_lon + pad
            && other.min_lon <= self.max_lon + pad
            && self.min_lat <= other.max_lat + pad
            && other.min_lat <= self.max_lat + pad
    }

    pub fn union(&self, other: &BoundingBox) -> BoundingBox {
        BoundingBox {
            min_lon: self.min_lon.min(other.min_lon),
            min_lat: self.min_lat.min(other.min_lat),
            max_lon: self.max_lon.max(other.max_lon),
            max_lat: self.max_lat.max(other.max_lat),
        }
    }
}

/// Local equirectangular projection centred on `(lon0, lat0)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProjectionContext {
    pub lon0: f64,
    pub lat0: f64,
    pub k: f64,
    cos_lat0: f64,
}

impl ProjectionContext {
    pub fn new(lon0: f64, lat0: f64) -> Self {
        ProjectionContext {
            lon0,
            lat0,
            k: KM_PER_DEGREE,
            cos_lat0: lat0.to_radians().cos(),
        }
    }

    pub fn centered_on(bbox: &BoundingBox) -> Self {
        let c = bbox.center();
        Self::new(c.lon, c.lat)
    }

    pub fn project(&self, p: &GeoPoint) -> PlanarPoint {
        PlanarPoint {
            x: (p.lon - self.lon0) * self.k * self.cos_lat0,
            y: (p.lat - self.lat0) * self.k,
        }
    }

    pub fn unproject(&self, q: &PlanarPoint) -> GeoPoint {
        GeoPoint {
            lon: self.lon0 + q.x / (self.k * self.cos_lat0),
            lat: self.lat0 + q.y / self.k,
        }
    }
}

/// Simple polygon with optional holes. Rings are stored unclosed.
#[derive(Clone, Debug, PartialEq)]
pub struct Polygon {
    outer: Vec<GeoPoint>,
    holes: Vec<Vec<GeoPoint>>,
}

fn normalize_ring(mut ring: Vec<GeoPoint>) -> Result<Vec<GeoPoint>> {
    for p in &ring {
        GeoPoint::new(p.lon, p.lat)?;
    }
    while ring.len() > 1 && ring[0].approx_eq(ring.last().unwrap()) {
        ring.pop();
    }
    ring.dedup_by(|a, b| a.approx_eq(b));
    let mut distinct: Vec<GeoPoint> = Vec::with_capacity(ring.len());
    for p in &ring {
        if !distinct.iter().any(|q| q.approx_eq(p)) {
            distinct.push(*p);
            if distinct.len() >= 3 {
                break;
            }
        }
    }
    if distinct.len() < 3 {
        return Err(Error::Geometry(format!(
            "ring has fewer than 3 distinct vertices ({} given)",
            ring.len()
        )));
    }
    Ok(ring)
}

impl Polygon {
    pub fn new(outer: Vec<GeoPoint>, holes: Vec<Vec<GeoPoint>>) -> Result<Self> {
        let outer = normalize_ring(outer)?;
        let holes = holes.into_iter().map(normalize_ring).collect::<Result<Vec<_>>>()?;
        Ok(Polygon { outer, holes })
    }

    /// Axis-aligned rectangle, counter-clockwise from the south-west corner.
    pub fn rect(min_lon: f64, min_lat: f64, max_lon: f64, max_lat: f64) -> Result<Self> {
        Polygon::new(
            vec![
                GeoPoint { lon: min_lon, lat: min_lat },
                GeoPoint { lon: max_lon, lat: min_lat },
                GeoPoint { lon: max_lon, lat: max_lat },
                GeoPoint { lon: min_lon, lat: max_lat },
            ],
            vec![],
        )
    }

    pub fn outer(&self) -> &[GeoPoint] {
        &self.outer
    }

    pub fn holes(&self) -> &[Vec<GeoPoint>] {
        &self.holes
    }

    pub fn rings(&self) -> impl Iterator<Item = &[GeoPoint]> {
        std::iter::once(self.outer.as_slice()).chain(self.holes.iter().map(|h| h.as_slice()))
    }

    pub fn bbox(&self) -> BoundingBox {
        BoundingBox::of_points(&self.outer).expect("polygon has vertices")
    }

    pub fn area_km2(&self, ctx: &ProjectionContext) -> f64 {
        let outer = ring_signed_area(&self.outer, ctx).abs();
        let holes: f64 = self.holes.iter().map(|h| ring_signed_area(h, ctx).abs()).sum();
        (outer - holes).max(0.0)
    }

    pub fn contains(&self, p: &GeoPoint) -> bool {
        match ring_location(&self.outer, p) {
            Location::Outside => false,
            Location::Boundary => true,
            Location::Inside => self
                .holes
                .iter()
                .all(|h| ring_location(h, p) != Location::Inside),
        }
    }
}

/// Collection of interior-disjoint polygons. May be empty.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct MultiPolygon {
    parts: Vec<Polygon>,
}

impl From<Polygon> for MultiPolygon {
    fn from(p: Polygon) -> Self {
        MultiPolygon { parts: vec![p] }
    }
}

impl MultiPolygon {
    pub fn new(parts: Vec<Polygon>) -> Self {
        MultiPolygon { parts }
    }

    pub fn empty() -> Self {
        MultiPolygon::default()
    }

    pub fn parts(&self) -> &[Polygon] {
        &self.parts
    }

    pub fn into_parts(self) -> Vec<Polygon> {
        self.parts
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn bbox(&self) -> Option<BoundingBox> {
        BoundingBox::of_points(self.parts.iter().flat_map(|p| p.outer.iter()))
    }

    pub fn area_km2(&self, ctx: &ProjectionContext) -> f64 {
        self.parts.iter().map(|p| p.area_km2(ctx)).sum()
    }

    /// Closed point-set membership; boundary points count as inside.
    pub fn contains(&self, p: &GeoPoint) -> bool {
        self.parts.iter().any(|poly| poly.contains(p))
    }

    pub fn rings(&self) -> impl Iterator<Item = &[GeoPoint]> {
        self.parts.iter().flat_map(|p| p.rings())
    }

    pub fn intersect(&self, other: &MultiPolygon) -> MultiPolygon {
        intersect(self, other)
    }
}

fn ring_signed_area(ring: &[GeoPoint], ctx: &ProjectionContext) -> f64 {
    let n = ring.len();
    if n < 3 {
        return 0.0;
    }
    // Shoelace relative to the first vertex keeps the sum well conditioned.
    let o = ctx.project(&ring[0]);
    let mut acc = 0.0;
    for i in 1..n - 1 {
        let a = ctx.project(&ring[i]);
        let b = ctx.project(&ring[i + 1]);
        acc += (a.x - o.x) * (b.y - o.y) - (b.x - o.x) * (a.y - o.y);
    }
    0.5 * acc
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Location {
    Inside,
    Boundary,
    Outside,
}

fn on_segment(p: &GeoPoint, a: &GeoPoint, b: &GeoPoint) -> bool {
    let (dx, dy) = (b.lon - a.lon, b.lat - a.lat);
    let len2 = dx * dx + dy * dy;
    let t = if len2 > 0.0 {
        (((p.lon - a.lon) * dx + (p.lat - a.lat) * dy) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let (cx, cy) = (a.lon + t * dx, a.lat + t * dy);
    let (ex, ey) = (p.lon - cx, p.lat - cy);
    ex * ex + ey * ey <= COORD_TOL_DEG * COORD_TOL_DEG
}

fn ring_location(ring: &[GeoPoint], p: &GeoPoint) -> Location {
    let n = ring.len();
    let mut inside = false;
    for i in 0..n {
        let a = &ring[i];
        let b = &ring[(i + 1) % n];
        if on_segment(p, a, b) {
            return Location::Boundary;
        }
        if (a.lat > p.lat) != (b.lat > p.lat) {
            let x = a.lon + (p.lat - a.lat) / (b.lat - a.lat) * (b.lon - a.lon);
            if p.lon < x {
                inside = !inside;
            }
        }
    }
    if inside {
        Location::Inside
    } else {
        Location::Outside
    }
}

fn to_geo_polygon(p: &Polygon) -> geo::Polygon<f64> {
    let ring = |r: &[GeoPoint]| {
        geo::LineString::from(r.iter().map(|q| (q.lon, q.lat)).collect::<Vec<_>>())
    };
    geo::Polygon::new(ring(&p.outer), p.holes.iter().map(|h| ring(h)).collect())
}

fn to_geo(mp: &MultiPolygon) -> geo::MultiPolygon<f64> {
    geo::MultiPolygon::new(mp.parts.iter().map(to_geo_polygon).collect())
}

fn ring_from_geo(ls: &geo::LineString<f64>) -> Option<Vec<GeoPoint>> {
    let pts: Vec<GeoPoint> = ls.coords().map(|c| GeoPoint { lon: c.x, lat: c.y }).collect();
    normalize_ring(pts).ok()
}

fn from_geo(g: geo::MultiPolygon<f64>) -> MultiPolygon {
    use geo::Area;
    let parts = g
        .0
        .into_iter()
        .filter(|p| p.unsigned_area() > MIN_AREA_DEG2)
        .filter_map(|p| {
            let outer = ring_from_geo(p.exterior())?;
            let holes = p
                .interiors()
                .iter()
                .filter(|h| geo::Polygon::new((*h).clone(), vec![]).unsigned_area() > MIN_AREA_DEG2)
                .filter_map(ring_from_geo)
                .collect();
            Some(Polygon { outer, holes })
        })
        .collect();
    MultiPolygon { parts }
}

/// Point-set intersection of two (possibly non-convex, holed) geometries.
pub fn intersect(a: &MultiPolygon, b: &MultiPolygon) -> MultiPolygon {
    if a.is_empty() || b.is_empty() {
        return MultiPolygon::empty();
    }
    match (a.bbox(), b.bbox()) {
        (Some(ba), Some(bb)) if ba.intersects(&bb, 0.0) => {}
        _ => return MultiPolygon::empty(),
    }
    from_geo(to_geo(a).intersection(&to_geo(b)))
}

/// Point-set union; used to merge the features of a border file.
pub fn union(a: &MultiPolygon, b: &MultiPolygon) -> MultiPolygon {
    from_geo(to_geo(a).union(&to_geo(b)))
}

fn cross(o: &GeoPoint, a: &GeoPoint, b: &GeoPoint) -> f64 {
    (a.lon - o.lon) * (b.lat - o.lat) - (a.lat - o.lat) * (b.lon - o.lon)
}

/// Convex hull (monotone chain). The projection is affine, so the hull in
/// degree space is the hull in the projected plane.
pub fn convex_hull(points: &[GeoPoint]) -> Result<Polygon> {
    let mut pts: Vec<GeoPoint> = points.to_vec();
    pts.sort_by(|a, b| a.lon.total_cmp(&b.lon).then(a.lat.total_cmp(&b.lat)));
    pts.dedup_by(|a, b| a.approx_eq(b));
    if pts.len() < 3 {
        return Err(Error::Geometry(format!(
            "convex hull needs at least 3 distinct points, got {}",
            pts.len()
        )));
    }
    let mut lower: Vec<GeoPoint> = Vec::new();
    for p in &pts {
        while lower.len() >= 2 && cross(&lower[lower.len() - 2], &lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(*p);
    }
    let mut upper: Vec<GeoPoint> = Vec::new();
    for p in pts.iter().rev() {
        while upper.len() >= 2 && cross(&upper[upper.len() - 2], &upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(*p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    if lower.len() < 3 {
        return Err(Error::Geometry("convex hull of collinear points".into()));
    }
    Polygon::new(lower, vec![])
}

fn ring_moments(ring: &[GeoPoint], ctx: &ProjectionContext) -> (f64, f64, f64) {
    let n = ring.len();
    let (mut a, mut cx, mut cy) = (0.0, 0.0, 0.0);
    for i in 0..n {
        let p = ctx.project(&ring[i]);
        let q = ctx.project(&ring[(i + 1) % n]);
        let w = p.x * q.y - q.x * p.y;
        a += w;
        cx += (p.x + q.x) * w;
        cy += (p.y + q.y) * w;
    }
    (0.5 * a, cx / 6.0, cy / 6.0)
}

/// Area-weighted centroid, computed in a projection centred on the geometry.
pub fn centroid(mp: &MultiPolygon) -> Result<GeoPoint> {
    let bbox = mp
        .bbox()
        .ok_or_else(|| Error::Geometry("centroid of empty geometry".into()))?;
    let ctx = ProjectionContext::centered_on(&bbox);
    let (mut area, mut mx, mut my) = (0.0, 0.0, 0.0);
    for poly in mp.parts() {
        let (a, x, y) = ring_moments(&poly.outer, &ctx);
        let s = a.signum();
        area += a * s;
        mx += x * s;
        my += y * s;
        for h in &poly.holes {
            let (a, x, y) = ring_moments(h, &ctx);
            let s = a.signum();
            area -= a * s;
            mx -= x * s;
            my -= y * s;
        }
    }
    if area <= MIN_AREA_KM2 {
        return Err(Error::Geometry("centroid of zero-area geometry".into()));
    }
    Ok(ctx.unproject(&PlanarPoint {
        x: mx / area,
        y: my / area,
    }))
}

/// Great-circle distance on the mean sphere.
pub fn haversine_km(a: &GeoPoint, b: &GeoPoint) -> f64 {
    let (phi1, phi2) = (a.lat.to_radians(), b.lat.to_radians());
    let dphi = phi2 - phi1;
    let dlambda = (b.lon - a.lon).to_radians();
    let h = (dphi / 2.0).sin().powi(2) + phi1.cos() * phi2.cos() * (dlambda / 2.0).sin().powi(2);
    2.0 * EARTH_RADIUS_KM * h.sqrt().min(1.0).asin()
}

/// Total length (km) of boundary shared by two geometries: the sum over
/// pairs of collinear, overlapping ring edges.
pub fn shared_boundary_km(a: &MultiPolygon, b: &MultiPolygon, ctx: &ProjectionContext) -> f64 {
    let edges = |mp: &MultiPolygon| -> Vec<(PlanarPoint, PlanarPoint)> {
        mp.rings()
            .flat_map(|r| {
                let n = r.len();
                (0..n).map(move |i| (r[i], r[(i + 1) % n]))
            })
            .map(|(p, q)| (ctx.project(&p), ctx.project(&q)))
            .collect()
    };
    let ea = edges(a);
    let eb = edges(b);
    // Tolerance on perpendicular offset, km (about 1e-9 degrees).
    let tol = COORD_TOL_DEG * ctx.k;
    let mut total = 0.0;
    for (p0, p1) in &ea {
        let (dx, dy) = (p1.x - p0.x, p1.y - p0.y);
        let len = (dx * dx + dy * dy).sqrt();
        if len <= 0.0 {
            continue;
        }
        let (ux, uy) = (dx / len, dy / len);
        let (ex_min, ex_max) = (p0.x.min(p1.x) - tol, p0.x.max(p1.x) + tol);
        let (ey_min, ey_max) = (p0.y.min(p1.y) - tol, p0.y.max(p1.y) + tol);
        for (q0, q1) in &eb {
            if q0.x.max(q1.x) < ex_min
                || q0.x.min(q1.x) > ex_max
                || q0.y.max(q1.y) < ey_min
                || q0.y.min(q1.y) > ey_max
            {
                continue;
            }
            let off0 = (q0.x - p0.x) * uy - (q0.y - p0.y) * ux;
            let off1 = (q1.x - p0.x) * uy - (q1.y - p0.y) * ux;
            if off0.abs() > tol || off1.abs() > tol {
                continue;
            }
            let s0 = (q0.x - p0.x) * ux + (q0.y - p0.y) * uy;
            let s1 = (q1.x - p0.x) * ux + (q1.y - p0.y) * uy;
            let lo = s0.min(s1).max(0.0);
            let hi = s0.max(s1).min(len);
            if hi > lo {
                total += hi - lo;
            }
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn pt(lon: f64, lat: f64) -> GeoPoint {
        GeoPoint::new(lon, lat).unwrap()
    }

    fn square(x0: f64, y0: f64, side: f64) -> MultiPolygon {
        Polygon::rect(x0, y0, x0 + side, y0 + side).unwrap().into()
    }

    #[test]
    fn projection_examples() {
        let ctx = ProjectionContext::new(0.0, 0.0);
        assert_eq!(ctx.project(&pt(0.0, 0.0)), PlanarPoint { x: 0.0, y: 0.0 });
        let p = ctx.project(&pt(1.0, 0.0));
        assert!((p.x - 111.19493).abs() < 1e-5);
        assert_eq!(p.y, 0.0);

        let ctx60 = ProjectionContext::new(0.0, 60.0);
        let p = ctx60.project(&pt(1.0, 60.0));
        assert!((p.x - 55.59747).abs() < 1e-5);
        assert!(p.y.abs() < 1e-12);

        let back = ctx60.unproject(&p);
        assert_relative_eq!(back.lon, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn km_per_degree_constant() {
        assert!((KM_PER_DEGREE - 111.19493).abs() < 1e-5);
    }

    #[test]
    fn area_examples() {
        let ctx = ProjectionContext::new(0.0, 0.0);
        assert_eq!(MultiPolygon::empty().area_km2(&ctx), 0.0);

        let sq = square(-0.5, -0.5, 1.0);
        // oracle: k² · 1 deg², cos(0) = 1
        let expected = KM_PER_DEGREE * KM_PER_DEGREE;
        assert!((sq.area_km2(&ctx) - expected).abs() < 1e-6);
        assert!((sq.area_km2(&ctx) - 12364.31).abs() < 0.01);

        let holed = Polygon::new(
            Polygon::rect(-0.5, -0.5, 0.5, 0.5).unwrap().outer().to_vec(),
            vec![Polygon::rect(-0.25, -0.25, 0.25, 0.25).unwrap().outer().to_vec()],
        )
        .unwrap();
        assert_relative_eq!(holed.area_km2(&ctx), 0.75 * expected, max_relative = 1e-12);
    }

    #[test]
    fn degenerate_ring_rejected() {
        let r = Polygon::new(vec![pt(0.0, 0.0), pt(1.0, 0.0), pt(0.0, 0.0)], vec![]);
        assert!(r.is_err());
        assert!(GeoPoint::new(200.0, 0.0).is_err());
        assert!(GeoPoint::new(0.0, f64::NAN).is_err());
    }

    #[test]
    fn closing_vertex_is_dropped() {
        let p = Polygon::new(
            vec![pt(0.0, 0.0), pt(1.0, 0.0), pt(1.0, 1.0), pt(0.0, 0.0)],
            vec![],
        )
        .unwrap();
        assert_eq!(p.outer().len(), 3);
    }

    #[test]
    fn intersection_examples() {
        let ctx = ProjectionContext::new(0.5, 0.5);
        let a = square(0.0, 0.0, 1.0);
        let aa = intersect(&a, &a);
        assert_relative_eq!(aa.area_km2(&ctx), a.area_km2(&ctx), max_relative = 1e-9);

        let far = square(5.0, 5.0, 1.0);
        assert!(intersect(&a, &far).is_empty());

        let shifted = square(0.5, 0.0, 1.0);
        let half = intersect(&a, &shifted);
        assert_relative_eq!(half.area_km2(&ctx), 0.5 * a.area_km2(&ctx), max_relative = 1e-9);
    }

    #[test]
    fn intersection_of_non_convex_shapes() {
        // U shape: [0,3]x[0,3] minus [1,2]x[1,3]
        let u = Polygon::new(
            vec![
                pt(0.0, 0.0),
                pt(3.0, 0.0),
                pt(3.0, 3.0),
                pt(2.0, 3.0),
                pt(2.0, 1.0),
                pt(1.0, 1.0),
                pt(1.0, 3.0),
                pt(0.0, 3.0),
            ],
            vec![],
        )
        .unwrap();
        let bar = Polygon::rect(-1.0, 2.0, 4.0, 2.5).unwrap();
        let out = intersect(&u.into(), &bar.into());
        // two disjoint 1 x 0.5 pieces
        assert_eq!(out.parts().len(), 2);
        let ctx = ProjectionContext::new(0.0, 0.0);
        let expected = MultiPolygon::from(Polygon::rect(0.0, 2.0, 1.0, 2.5).unwrap()).area_km2(&ctx) * 2.0;
        assert_relative_eq!(out.area_km2(&ctx), expected, max_relative = 1e-9);
    }

    #[test]
    fn convex_hull_examples() {
        let corners = [pt(0.0, 0.0), pt(1.0, 0.0), pt(1.0, 1.0), pt(0.0, 1.0)];
        let h = convex_hull(&corners).unwrap();
        assert_eq!(h.outer().len(), 4);

        let mut with_inner = corners.to_vec();
        with_inner.push(pt(0.5, 0.5));
        let h2 = convex_hull(&with_inner).unwrap();
        assert_eq!(h2.outer().len(), 4);
        assert!(!h2.outer().contains(&pt(0.5, 0.5)));

        assert!(convex_hull(&[pt(0.0, 0.0), pt(1.0, 1.0)]).is_err());
        assert!(convex_hull(&[pt(0.0, 0.0), pt(1.0, 1.0), pt(2.0, 2.0)]).is_err());
    }

    #[test]
    fn centroid_examples() {
        let c = centroid(&square(0.0, 0.0, 1.0)).unwrap();
        assert_relative_eq!(c.lon, 0.5, epsilon = 1e-12);
        assert_relative_eq!(c.lat, 0.5, epsilon = 1e-12);

        // L shape: unit square minus the top-right quadrant. Decomposition:
        // [0,1]x[0,0.5] (area 1/2, centroid (1/2,1/4)) and [0,0.5]x[0.5,1]
        // (area 1/4, centroid (1/4,3/4)) -> ((1/4+1/16)/(3/4), same) = 5/12.
        let l = Polygon::new(
            vec![
                pt(0.0, 0.0),
                pt(1.0, 0.0),
                pt(1.0, 0.5),
                pt(0.5, 0.5),
                pt(0.5, 1.0),
                pt(0.0, 1.0),
            ],
            vec![],
        )
        .unwrap();
        let c = centroid(&l.into()).unwrap();
        assert!((c.lon - 5.0 / 12.0).abs() < 1e-5);
        assert!((c.lat - 5.0 / 12.0).abs() < 1e-5);

        let two = MultiPolygon::new(vec![
            Polygon::rect(0.0, 0.0, 1.0, 1.0).unwrap(),
            Polygon::rect(3.0, 0.0, 4.0, 1.0).unwrap(),
        ]);
        let c = centroid(&two).unwrap();
        assert_relative_eq!(c.lon, 2.0, epsilon = 1e-9);
        assert_relative_eq!(c.lat, 0.5, epsilon = 1e-9);

        assert!(centroid(&MultiPolygon::empty()).is_err());
    }

    #[test]
    fn contains_examples() {
        let sq = square(0.0, 0.0, 1.0);
        assert!(sq.contains(&pt(0.5, 0.5)));
        assert!(!sq.contains(&pt(2.0, 2.0)));
        assert!(sq.contains(&pt(0.0, 0.5)));
        assert!(sq.contains(&pt(1.0, 1.0)));
    }

    #[test]
    fn contains_respects_holes() {
        let holed: MultiPolygon = Polygon::new(
            Polygon::rect(0.0, 0.0, 4.0, 4.0).unwrap().outer().to_vec(),
            vec![Polygon::rect(1.0, 1.0, 2.0, 2.0).unwrap().outer().to_vec()],
        )
        .unwrap()
        .into();
        assert!(!holed.contains(&pt(1.5, 1.5)));
        assert!(holed.contains(&pt(1.0, 1.5)));
        assert!(holed.contains(&pt(3.0, 3.0)));
    }

    #[test]
    fn haversine_examples() {
        let o = pt(0.0, 0.0);
        assert_eq!(haversine_km(&o, &o), 0.0);
        assert!((haversine_km(&o, &pt(0.0, 1.0)) - 111.195).abs() < 1e-3);
        assert!((haversine_km(&o, &pt(1.0, 0.0)) - 111.195).abs() < 1e-3);
    }

    #[test]
    fn shared_boundary_of_adjacent_squares() {
        let ctx = ProjectionContext::new(0.0, 0.0);
        let a = square(0.0, 0.0, 1.0);
        let b = square(1.0, 0.0, 1.0);
        let c = square(1.0, 1.0, 1.0);
        assert_relative_eq!(shared_boundary_km(&a, &b, &ctx), KM_PER_DEGREE, max_relative = 1e-9);
        // corner contact only
        assert_eq!(shared_boundary_km(&a, &c, &ctx), 0.0);
    }
}
