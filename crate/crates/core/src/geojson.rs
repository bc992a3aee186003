//! Minimal GeoJSON (RFC 7946) reading and writing.
//!
//! Only the geometry types the discretizers consume are supported: `Point`,
//! `MultiPoint`, `Polygon` and `MultiPolygon`, bare or wrapped in a `Feature` /
//! `FeatureCollection`. Coordinates are `[lon, lat]`.

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::geometry::{GeoPoint, MultiPolygon, Polygon};

#[derive(Clone, Debug, PartialEq)]
pub enum Geometry {
    Points(Vec<GeoPoint>),
    Area(MultiPolygon),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Feature {
    pub geometry: Geometry,
    pub properties: Map<String, Value>,
}

impl Feature {
    pub fn area(&self) -> Option<&MultiPolygon> {
        match &self.geometry {
            Geometry::Area(mp) => Some(mp),
            Geometry::Points(_) => None,
        }
    }

    /// Numeric property, accepting JSON numbers and numeric strings.
    pub fn number(&self, key: &str) -> Option<f64> {
        match self.properties.get(key)? {
            Value::Number(n) => n.as_f64(),
            Value::String(s) => s.trim().parse().ok(),
            _ => None,
        }
    }
}

fn bad(msg: impl Into<String>) -> Error {
    Error::InvalidInput(format!("geojson: {}", msg.into()))
}

fn position(v: &Value) -> Result<GeoPoint> {
    let arr = v.as_array().ok_or_else(|| bad("position is not an array"))?;
    if arr.len() < 2 {
        return Err(bad("position needs at least 2 numbers"));
    }
    let lon = arr[0].as_f64().ok_or_else(|| bad("longitude is not a number"))?;
    let lat = arr[1].as_f64().ok_or_else(|| bad("latitude is not a number"))?;
    GeoPoint::new(lon, lat)
}

fn ring(v: &Value) -> Result<Vec<GeoPoint>> {
    v.as_array()
        .ok_or_else(|| bad("ring is not an array"))?
        .iter()
        .map(position)
        .collect()
}

fn polygon(v: &Value) -> Result<Polygon> {
    let rings = v.as_array().ok_or_else(|| bad("polygon is not an array of rings"))?;
    let (outer, holes) = rings
        .split_first()
        .ok_or_else(|| bad("polygon without rings"))?;
    Polygon::new(ring(outer)?, holes.iter().map(ring).collect::<Result<Vec<_>>>()?)
}

fn geometry(v: &Value) -> Result<Geometry> {
    let obj = v.as_object().ok_or_else(|| bad("geometry is not an object"))?;
    let kind = obj
        .get("type")
        .and_then(Value::as_str)
        .ok_or_else(|| bad("geometry without type"))?;
    let coords = obj.get("coordinates").ok_or_else(|| bad("geometry without coordinates"));
    match kind {
        "Point" => Ok(Geometry::Points(vec![position(coords?)?])),
        "MultiPoint" => Ok(Geometry::Points(
            coords?
                .as_array()
                .ok_or_else(|| bad("MultiPoint coordinates"))?
                .iter()
                .map(position)
                .collect::<Result<_>>()?,
        )),
        "Polygon" => Ok(Geometry::Area(polygon(coords?)?.into())),
        "MultiPolygon" => Ok(Geometry::Area(MultiPolygon::new(
            coords?
                .as_array()
                .ok_or_else(|| bad("MultiPolygon coordinates"))?
                .iter()
                .map(polygon)
                .collect::<Result<_>>()?,
        ))),
        other => Err(bad(format!("unsupported geometry type {other}"))),
    }
}

fn feature(v: &Value) -> Result<Feature> {
    let obj = v.as_object().ok_or_else(|| bad("feature is not an object"))?;
    let geom = obj.get("geometry").ok_or_else(|| bad("feature without geometry"))?;
    let properties = match obj.get("properties") {
        Some(Value::Object(m)) => m.clone(),
        Some(Value::Null) | None => Map::new(),
        Some(_) => return Err(bad("feature properties must be an object")),
    };
    Ok(Feature {
        geometry: geometry(geom)?,
        properties,
    })
}

/// Parse a GeoJSON document into a flat list of features. A bare geometry
/// becomes a single feature with no properties.
pub fn parse_features(text: &str) -> Result<Vec<Feature>> {
    let doc: Value = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
    let kind = doc
        .get("type")
        .and_then(Value::as_str)
        .ok_or_else(|| bad("document without type"))?;
    match kind {
        "FeatureCollection" => doc
            .get("features")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("FeatureCollection without features array"))?
            .iter()
            .map(feature)
            .collect(),
        "Feature" => Ok(vec![feature(&doc)?]),
        _ => Ok(vec![Feature {
            geometry: geometry(&doc)?,
            properties: Map::new(),
        }]),
    }
}

pub fn read_features(path: &std::path::Path) -> Result<Vec<Feature>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_features(&text)
}

/// All areal features merged into one geometry (parts concatenated).
pub fn merge_areas(features: &[Feature]) -> MultiPolygon {
    MultiPolygon::new(
        features
            .iter()
            .filter_map(Feature::area)
            .flat_map(|mp| mp.parts().iter().cloned())
            .collect(),
    )
}

/// All point coordinates found in the features, in document order.
pub fn collect_points(features: &[Feature]) -> Vec<GeoPoint> {
    features
        .iter()
        .flat_map(|f| match &f.geometry {
            Geometry::Points(p) => p.clone(),
            Geometry::Area(_) => Vec::new(),
        })
        .collect()
}

fn ring_json(r: &[GeoPoint]) -> Value {
    let mut coords: Vec<Value> = r.iter().map(|p| json!([p.lon, p.lat])).collect();
    if let Some(first) = r.first() {
        coords.push(json!([first.lon, first.lat]));
    }
    Value::Array(coords)
}

/// RFC 7946 geometry object for a multipolygon (closed rings).
pub fn multipolygon_json(mp: &MultiPolygon) -> Value {
    let polys: Vec<Value> = mp
        .parts()
        .iter()
        .map(|p| Value::Array(p.rings().map(ring_json).collect()))
        .collect();
    json!({ "type": "MultiPolygon", "coordinates": polys })
}

pub fn feature_collection(features: Vec<Value>) -> Value {
    json!({ "type": "FeatureCollection", "features": features })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_feature_collection() {
        let text = r#"{"type":"FeatureCollection","features":[
            {"type":"Feature","properties":{"population":"120"},
             "geometry":{"type":"Polygon","coordinates":[[[0,0],[1,0],[1,1],[0,1],[0,0]]]}},
            {"type":"Feature","properties":null,
             "geometry":{"type":"Point","coordinates":[0.5,0.5]}}]}"#;
        let feats = parse_features(text).unwrap();
        assert_eq!(feats.len(), 2);
        assert_eq!(feats[0].number("population"), Some(120.0));
        assert_eq!(merge_areas(&feats).parts().len(), 1);
        assert_eq!(collect_points(&feats), vec![GeoPoint { lon: 0.5, lat: 0.5 }]);
    }

    #[test]
    fn bare_geometry_is_one_feature() {
        let text = r#"{"type":"MultiPolygon","coordinates":[[[[0,0],[1,0],[1,1],[0,0]]]]}"#;
        let feats = parse_features(text).unwrap();
        assert_eq!(feats.len(), 1);
        assert!(feats[0].properties.is_empty());
    }

    #[test]
    fn rejects_malformed() {
        assert!(parse_features("not json").is_err());
        assert!(parse_features(r#"{"type":"LineString","coordinates":[[0,0],[1,1]]}"#).is_err());
        assert!(parse_features(r#"{"type":"Point","coordinates":[500,0]}"#).is_err());
        assert!(parse_features(r#"{"type":"Polygon","coordinates":[]}"#).is_err());
    }

    #[test]
    fn writer_round_trips_through_reader() {
        let mp: MultiPolygon = Polygon::rect(0.0, 0.0, 2.0, 1.0).unwrap().into();
        let doc = feature_collection(vec![json!({
            "type": "Feature",
            "properties": {},
            "geometry": multipolygon_json(&mp),
        })]);
        let feats = parse_features(&doc.to_string()).unwrap();
        assert_eq!(feats[0].area().unwrap(), &mp);
    }
}
