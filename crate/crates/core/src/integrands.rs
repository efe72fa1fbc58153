//! Test integrands on the unit cube.

use petgraph::algo::toposort;
use petgraph::graph::{DiGraph, NodeIndex};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

pub trait Integrand: Send + Sync {
    fn name(&self) -> String;
    fn dim(&self) -> usize;
    fn eval(&self, x: &[f64]) -> f64;
    fn true_mean(&self) -> Option<f64>;
}

/// Σ (e^{x_j} − e + 1), mean 0.
pub fn h0(x: &[f64]) -> f64 {
    let e = std::f64::consts::E;
    x.iter().map(|&v| v.exp() - e + 1.0).sum()
}

/// (Σ x_j)², mean s/3 + s(s−1)/4.
pub fn h1(x: &[f64]) -> f64 {
    let t: f64 = x.iter().sum();
    t * t
}

/// Π (1 + c(x_j − 1/2)), mean 1.
pub fn g2(x: &[f64], c: f64) -> f64 {
    x.iter().map(|&v| 1.0 + c * (v - 0.5)).product()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct H0 {
    pub s: usize,
}

impl Integrand for H0 {
    fn name(&self) -> String {
        "h0".into()
    }
    fn dim(&self) -> usize {
        self.s
    }
    fn eval(&self, x: &[f64]) -> f64 {
        h0(x)
    }
    fn true_mean(&self) -> Option<f64> {
        Some(0.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct H1 {
    pub s: usize,
}

impl Integrand for H1 {
    fn name(&self) -> String {
        "h1".into()
    }
    fn dim(&self) -> usize {
        self.s
    }
    fn eval(&self, x: &[f64]) -> f64 {
        h1(x)
    }
    fn true_mean(&self) -> Option<f64> {
        let s = self.s as f64;
        Some(s / 3.0 + s * (s - 1.0) / 4.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct G2 {
    pub s: usize,
    pub c: f64,
}

impl Integrand for G2 {
    fn name(&self) -> String {
        format!("g2(c={})", self.c)
    }
    fn dim(&self) -> usize {
        self.s
    }
    fn eval(&self, x: &[f64]) -> f64 {
        g2(x, self.c)
    }
    fn true_mean(&self) -> Option<f64> {
        Some(1.0)
    }
}

/// Activity duration law, sampled by inversion.
#[derive(Clone, Debug, PartialEq)]
pub enum Duration {
    Uniform(f64, f64),
    Exponential(f64),
    Normal(f64, f64),
}

impl Duration {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Duration::Uniform(a, b) => a.is_finite() && b.is_finite() && a <= b,
            Duration::Exponential(rate) => rate > 0.0 && rate.is_finite(),
            Duration::Normal(mu, sigma) => mu.is_finite() && sigma > 0.0 && sigma.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("bad duration parameters {self:?}")))
        }
    }

    pub fn inverse_cdf(&self, u: f64) -> f64 {
        match *self {
            Duration::Uniform(a, b) => a + (b - a) * u,
            Duration::Exponential(rate) => -(-u).ln_1p() / rate,
            Duration::Normal(mu, sigma) => Normal::new(mu, sigma).expect("validated").inverse_cdf(u),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawArc", into = "RawArc")]
pub struct Arc {
    pub from: usize,
    pub to: usize,
    pub duration: Duration,
}

/// On-disk arc: `{"from", "to", "dist", "params"}`.
#[derive(Clone, Serialize, Deserialize)]
struct RawArc {
    #[serde(default)]
    from: usize,
    #[serde(default)]
    to: usize,
    dist: String,
    params: Vec<f64>,
}

impl TryFrom<RawArc> for Arc {
    type Error = String;
    fn try_from(r: RawArc) -> std::result::Result<Self, String> {
        let p = &r.params;
        let duration = match (r.dist.as_str(), p.len()) {
            ("uniform", 2) => Duration::Uniform(p[0], p[1]),
            ("exponential", 1) => Duration::Exponential(p[0]),
            ("normal", 2) => Duration::Normal(p[0], p[1]),
            (d, k) => return Err(format!("unknown distribution {d:?} with {k} parameters")),
        };
        duration.validate().map_err(|e| e.to_string())?;
        Ok(Arc { from: r.from, to: r.to, duration })
    }
}

impl From<Arc> for RawArc {
    fn from(a: Arc) -> Self {
        let (dist, params) = match a.duration {
            Duration::Uniform(x, y) => ("uniform", vec![x, y]),
            Duration::Exponential(r) => ("exponential", vec![r]),
            Duration::Normal(m, sd) => ("normal", vec![m, sd]),
        };
        RawArc { from: a.from, to: a.to, dist: dist.into(), params }
    }
}

/// Directed acyclic activity network; arc ℓ consumes coordinate ℓ.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SanNetwork {
    pub nodes: usize,
    pub arcs: Vec<Arc>,
    pub source: usize,
    pub sink: usize,
    pub threshold: f64,
    #[serde(skip)]
    order: Vec<usize>,
}

#[derive(Deserialize)]
struct SanFile {
    nodes: usize,
    arcs: Vec<Arc>,
    source: usize,
    sink: usize,
    threshold: f64,
}

impl<'de> Deserialize<'de> for SanNetwork {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let f = SanFile::deserialize(d)?;
        SanNetwork::new(f.nodes, f.arcs, f.source, f.sink, f.threshold).map_err(serde::de::Error::custom)
    }
}

/// A 12-arc, 9-node example network. It is an illustrative stand-in, not
/// the textbook SAN.
pub const DEFAULT_SAN_JSON: &str = include_str!("../data/san_default.json");

impl SanNetwork {
    pub fn new(nodes: usize, arcs: Vec<Arc>, source: usize, sink: usize, threshold: f64) -> Result<Self> {
        if source >= nodes || sink >= nodes || source == sink {
            return Err(Error::InvalidInput(format!("bad source/sink {source}/{sink} for {nodes} nodes")));
        }
        let mut g: DiGraph<(), ()> = DiGraph::new();
        let idx: Vec<NodeIndex> = (0..nodes).map(|_| g.add_node(())).collect();
        for a in &arcs {
            if a.from >= nodes || a.to >= nodes {
                return Err(Error::InvalidInput(format!("arc {}->{} outside {nodes} nodes", a.from, a.to)));
            }
            a.duration.validate()?;
            g.add_edge(idx[a.from], idx[a.to], ());
        }
        let order: Vec<usize> = toposort(&g, None).map_err(|_| Error::Cycle)?.into_iter().map(|n| n.index()).collect();
        if !petgraph::algo::has_path_connecting(&g, idx[source], idx[sink], None) {
            return Err(Error::InvalidInput("sink is unreachable from source".into()));
        }
        Ok(Self { nodes, arcs, source, sink, threshold, order })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn default_network() -> Self {
        Self::from_json(DEFAULT_SAN_JSON).expect("bundled network is valid")
    }

    /// Longest source-to-sink path under the durations implied by `x`.
    pub fn longest_path(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.arcs.len() {
            return Err(Error::DimensionMismatch { expected: self.arcs.len(), got: x.len() });
        }
        let mut dist = vec![f64::NEG_INFINITY; self.nodes];
        dist[self.source] = 0.0;
        let mut rank = vec![0; self.nodes];
        for (r, &v) in self.order.iter().enumerate() {
            rank[v] = r;
        }
        let mut by_tail: Vec<usize> = (0..self.arcs.len()).collect();
        by_tail.sort_by_key(|&l| rank[self.arcs[l].from]);
        for l in by_tail {
            let a = &self.arcs[l];
            if dist[a.from] > f64::NEG_INFINITY {
                let t = dist[a.from] + a.duration.inverse_cdf(x[l]);
                if t > dist[a.to] {
                    dist[a.to] = t;
                }
            }
        }
        Ok(dist[self.sink])
    }
}

pub fn san_indicator(x: &[f64], net: &SanNetwork) -> Result<f64> {
    Ok(if net.longest_path(x)? > net.threshold { 1.0 } else { 0.0 })
}

#[derive(Clone, Debug, PartialEq)]
pub struct San {
    pub net: SanNetwork,
}

impl Integrand for San {
    fn name(&self) -> String {
        "san".into()
    }
    fn dim(&self) -> usize {
        self.net.arcs.len()
    }
    fn eval(&self, x: &[f64]) -> f64 {
        san_indicator(x, &self.net).expect("dimension checked by caller")
    }
    fn true_mean(&self) -> Option<f64> {
        None
    }
}

/// Serializable integrand selection.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "f", rename_all = "lowercase")]
pub enum IntegrandSpec {
    H0 { s: usize },
    H1 { s: usize },
    G2 { s: usize, c: f64 },
    San { network: SanNetwork },
}

impl IntegrandSpec {
    pub fn build(&self) -> Box<dyn Integrand> {
        match self {
            IntegrandSpec::H0 { s } => Box::new(H0 { s: *s }),
            IntegrandSpec::H1 { s } => Box::new(H1 { s: *s }),
            IntegrandSpec::G2 { s, c } => Box::new(G2 { s: *s, c: *c }),
            IntegrandSpec::San { network } => Box::new(San { net: network.clone() }),
        }
    }

    pub fn dim(&self) -> usize {
        self.build().dim()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn arc(from: usize, to: usize, d: Duration) -> Arc {
        Arc { from, to, duration: d }
    }

    #[test]
    fn closed_forms() {
        let e = std::f64::consts::E;
        assert!((h0(&[0.0; 4]) - (8.0 - 4.0 * e)).abs() < 1e-12);
        assert!((h0(&[0.5, 0.5]) - 2.0 * (0.5f64.exp() - e + 1.0)).abs() < 1e-15);
        assert!((h0(&[0.5, 0.5]) + 0.139_121_0).abs() < 1e-6);
        assert!((h0(&[1.0 - 1e-12; 3]) - 3.0).abs() < 1e-9);
        assert_eq!(h1(&[0.0, 0.0]), 0.0);
        assert_eq!(h1(&[0.5, 0.5]), 1.0);
        assert!((H1 { s: 4 }.true_mean().unwrap() - 13.0 / 3.0).abs() < 1e-15);
        assert_eq!(g2(&[0.5; 7], 0.25), 1.0);
        assert!((g2(&[0.0, 0.0], 0.1) - 0.9025).abs() < 1e-15);
        assert_eq!(g2(&[0.5, 0.3], 0.1), g2(&[0.3], 0.1));
    }

    #[test]
    fn san_small_networks() {
        let par = SanNetwork::new(
            2,
            vec![arc(0, 1, Duration::Uniform(1.0, 1.0)), arc(0, 1, Duration::Uniform(1.0, 1.0))],
            0,
            1,
            2.0,
        )
        .unwrap();
        assert_eq!(san_indicator(&[0.1, 0.9], &par).unwrap(), 0.0);
        let one = SanNetwork::new(2, vec![arc(0, 1, Duration::Uniform(0.0, 1.0))], 0, 1, 0.5).unwrap();
        assert_eq!(san_indicator(&[0.7], &one).unwrap(), 1.0);
        assert_eq!(san_indicator(&[0.3], &one).unwrap(), 0.0);
        assert!(san_indicator(&[0.3, 0.1], &one).is_err());
    }

    #[test]
    fn san_rejects_cycles() {
        let arcs = vec![
            arc(0, 1, Duration::Exponential(1.0)),
            arc(1, 2, Duration::Exponential(1.0)),
            arc(2, 1, Duration::Exponential(1.0)),
        ];
        assert!(matches!(SanNetwork::new(3, arcs, 0, 2, 1.0), Err(Error::Cycle)));
    }

    #[test]
    fn san_json_roundtrip() {
        let net = SanNetwork::default_network();
        assert_eq!(net.arcs.len(), 12);
        let text = serde_json::to_string(&net).unwrap();
        assert_eq!(SanNetwork::from_json(&text).unwrap(), net);
        let bad = r#"{"nodes":2,"source":0,"sink":1,"threshold":1,"arcs":[{"from":0,"to":1,"dist":"exponential","params":[-1]}]}"#;
        assert!(SanNetwork::from_json(bad).is_err());
    }

    #[test]
    fn inverse_cdfs() {
        assert_eq!(Duration::Uniform(2.0, 4.0).inverse_cdf(0.25), 2.5);
        assert!((Duration::Exponential(2.0).inverse_cdf(1.0 - (-1.0f64).exp()) - 0.5).abs() < 1e-12);
        assert!(Duration::Normal(1.0, 2.0).inverse_cdf(0.5).abs() - 1.0 < 1e-12);
    }
}
