use std::cmp::Ordering;
use std::fmt;

use num_complex::Complex64;

use crate::fock::Basis;
use crate::{Error, Result};

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// A phase `exp(i pi num / den)`, kept reduced with `num` in `[0, 2 den)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Phase {
    num: i64,
    den: i64,
}

impl Phase {
    pub const ZERO: Phase = Phase { num: 0, den: 1 };
    pub const PI: Phase = Phase { num: 1, den: 1 };

    pub fn new(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::InvalidGraph("phase denominator is zero".into()));
        }
        let (num, den) = if den < 0 { (-num, -den) } else { (num, den) };
        let g = gcd(num, den).max(1);
        let (num, den) = (num / g, den / g);
        Ok(Self {
            num: num.rem_euclid(2 * den),
            den,
        })
    }

    pub fn num(&self) -> i64 {
        self.num
    }

    pub fn den(&self) -> i64 {
        self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    /// Angle in radians, in `[0, 2 pi)`.
    pub fn radians(&self) -> f64 {
        std::f64::consts::PI * self.num as f64 / self.den as f64
    }

    pub fn value(&self) -> Complex64 {
        // exact for the quarter turns
        match (self.num * 2, self.den) {
            (0, _) => Complex64::new(1.0, 0.0),
            (n, d) if n == d => Complex64::new(0.0, 1.0),
            (n, d) if n == 2 * d => Complex64::new(-1.0, 0.0),
            (n, d) if n == 3 * d => Complex64::new(0.0, -1.0),
            _ => Complex64::from_polar(1.0, self.radians()),
        }
    }
}

impl std::ops::Add for Phase {
    type Output = Phase;

    fn add(self, other: Phase) -> Phase {
        Phase::new(self.num * other.den + other.num * self.den, self.den * other.den)
            .expect("nonzero denominators")
    }
}

impl std::ops::Neg for Phase {
    type Output = Phase;

    fn neg(self) -> Phase {
        Phase::new(-self.num, self.den).expect("nonzero denominator")
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.num, self.den) {
            (0, _) => write!(f, "0"),
            (1, 1) => write!(f, "pi"),
            (n, 1) => write!(f, "{n}pi"),
            (1, d) => write!(f, "pi/{d}"),
            (n, d) => write!(f, "{n}pi/{d}"),
        }
    }
}

/// Internal-state label carried by an edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ColorLabel {
    pub basis: Basis,
    pub index: usize,
}

impl ColorLabel {
    pub fn computational(index: usize) -> Self {
        Self {
            basis: Basis::Computational,
            index,
        }
    }

    pub fn fourier(index: usize) -> Self {
        Self {
            basis: Basis::Fourier,
            index,
        }
    }
}

impl fmt::Display for ColorLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.basis {
            Basis::Computational => write!(f, "{}", self.index),
            Basis::Fourier => write!(f, "{}~", self.index),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub mode: usize,
    pub phase: Phase,
    pub color: ColorLabel,
}

impl Edge {
    pub fn new(mode: usize, phase: Phase, color: ColorLabel) -> Self {
        Self { mode, phase, color }
    }
}

/// One subtraction operator: an equal-weight superposition over its edges,
/// each edge weighted by `1/sqrt(edge count)` times its phase.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Dot {
    edges: Vec<Edge>,
}

impl Dot {
    pub fn new(edges: Vec<Edge>) -> Result<Self> {
        if edges.is_empty() {
            return Err(Error::InvalidGraph("dot without edges".into()));
        }
        for (i, a) in edges.iter().enumerate() {
            if edges[..i].iter().any(|b| b.mode == a.mode) {
                return Err(Error::InvalidGraph(format!(
                    "dot attaches twice to spatial mode {}",
                    a.mode
                )));
            }
        }
        Ok(Self { edges })
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn amplitude(&self) -> f64 {
        1.0 / (self.edges.len() as f64).sqrt()
    }

    /// Edge sorted by mode with the first edge's phase factored out.
    /// Returns the canonical dot and the factored phase.
    fn canonical(&self) -> (Dot, Phase) {
        let mut edges = self.edges.clone();
        edges.sort();
        let lead = edges[0].phase;
        for e in &mut edges {
            e.phase = e.phase + -lead;
        }
        (Dot { edges }, lead)
    }
}

impl PartialOrd for Dot {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dot {
    fn cmp(&self, other: &Self) -> Ordering {
        self.edges.cmp(&other.edges)
    }
}

/// Spatial modes (circles) and subtraction operators (dots).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SculptingBigraph {
    n: usize,
    d: usize,
    dots: Vec<Dot>,
}

impl SculptingBigraph {
    pub fn new(n: usize, d: usize, dots: Vec<Dot>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidGraph("no spatial modes".into()));
        }
        if d < 2 {
            return Err(Error::InvalidGraph(format!("internal dimension {d} < 2")));
        }
        for (i, dot) in dots.iter().enumerate() {
            for e in dot.edges() {
                if e.mode >= n {
                    return Err(Error::InvalidGraph(format!(
                        "dot {i} references spatial mode {} (N = {n})",
                        e.mode
                    )));
                }
                if e.color.index >= d {
                    return Err(Error::InvalidGraph(format!(
                        "dot {i} uses colour {} (d = {d})",
                        e.color
                    )));
                }
            }
        }
        Ok(Self { n, d, dots })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn dots(&self) -> &[Dot] {
        &self.dots
    }

    pub fn edge_count(&self) -> usize {
        self.dots.iter().map(|d| d.edges().len()).sum()
    }

    /// Dot count required so that one boson survives per mode: `(d-1) N`.
    pub fn standard_dot_count(&self) -> usize {
        (self.d - 1) * self.n
    }

    pub fn check_standard(&self) -> Result<()> {
        if self.dots.len() == self.standard_dot_count() {
            Ok(())
        } else {
            Err(Error::InvalidGraph(format!(
                "{} dots, the protocol needs (d-1)N = {}",
                self.dots.len(),
                self.standard_dot_count()
            )))
        }
    }

    /// Same graph with the dots in a different order.
    pub fn with_dot_order(&self, order: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.dots.len()];
        if order.len() != self.dots.len() {
            return Err(Error::InvalidGraph("dot order is not a permutation".into()));
        }
        for &i in order {
            if i >= seen.len() || std::mem::replace(&mut seen[i], true) {
                return Err(Error::InvalidGraph("dot order is not a permutation".into()));
            }
        }
        Ok(Self {
            dots: order.iter().map(|&i| self.dots[i].clone()).collect(),
            ..self.clone()
        })
    }

    /// Renames circle `j` to `perm[j]` on every edge.
    pub fn relabel_circles(&self, perm: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.n];
        if perm.len() != self.n
            || perm
                .iter()
                .any(|&p| p >= self.n || std::mem::replace(&mut seen[p], true))
        {
            return Err(Error::InvalidGraph("circle relabelling is not a permutation".into()));
        }
        let dots = self
            .dots
            .iter()
            .map(|dot| {
                Dot::new(
                    dot.edges()
                        .iter()
                        .map(|e| Edge { mode: perm[e.mode], ..*e })
                        .collect(),
                )
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.n, self.d, dots)
    }

    /// Dots in canonical form (edges sorted, leading phase removed, dots
    /// sorted) and the total phase that was factored out. Two graphs with the
    /// same canonical dots define the same operator up to `exp(i (phase_b - phase_a))`.
    pub fn canonical_form(&self) -> (Vec<Dot>, Phase) {
        let mut total = Phase::ZERO;
        let mut dots: Vec<Dot> = self
            .dots
            .iter()
            .map(|d| {
                let (c, p) = d.canonical();
                total = total + p;
                c
            })
            .collect();
        dots.sort();
        (dots, total)
    }

    /// If `other` is this operator times a global phase, returns that phase.
    pub fn relative_phase(&self, other: &SculptingBigraph) -> Option<Phase> {
        if self.n != other.n || self.d != other.d {
            return None;
        }
        let (a, pa) = self.canonical_form();
        let (b, pb) = other.canonical_form();
        (a == b).then(|| pb + -pa)
    }
}

/// Built-in scheme families. All set `d = N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    Singlet,
    Dicke,
    SymmetricVariant,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::Singlet, Scheme::Dicke, Scheme::SymmetricVariant];

    pub fn name(&self) -> &'static str {
        match self {
            Scheme::Singlet => "singlet",
            Scheme::Dicke => "dicke",
            Scheme::SymmetricVariant => "symvariant",
        }
    }

    pub fn build(&self, n: usize) -> Result<SculptingBigraph> {
        match self {
            Scheme::Singlet => singlet_bigraph(n),
            Scheme::Dicke => dicke_bigraph(n),
            Scheme::SymmetricVariant => symmetric_variant_bigraph(n),
        }
    }

    /// Sign picked up by the sculpted state under a transposition of two modes.
    pub fn exchange_sign(&self) -> f64 {
        match self {
            Scheme::Singlet => -1.0,
            Scheme::Dicke | Scheme::SymmetricVariant => 1.0,
        }
    }
}

impl std::str::FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "singlet" => Ok(Scheme::Singlet),
            "dicke" => Ok(Scheme::Dicke),
            "symvariant" | "symmetric-variant" => Ok(Scheme::SymmetricVariant),
            other => Err(Error::InvalidGraph(format!("unknown scheme `{other}`"))),
        }
    }
}

/// Two dots per pair `j < k`: a `0~` dot and an `(N-1)~` dot, with the
/// given phases on the `k` edge.
fn pair_scheme(n: usize, zero_phase: Phase, last_phase: Phase) -> Result<SculptingBigraph> {
    if n < 2 {
        return Err(Error::InvalidGraph(format!("scheme needs N >= 2, got {n}")));
    }
    let d = n;
    let mut dots = Vec::with_capacity(n * (n - 1));
    for j in 0..n {
        for k in j + 1..n {
            for (color, phase) in [(0, zero_phase), (d - 1, last_phase)] {
                let color = ColorLabel::fourier(color);
                dots.push(Dot::new(vec![
                    Edge::new(j, Phase::ZERO, color),
                    Edge::new(k, phase, color),
                ])?);
            }
        }
    }
    SculptingBigraph::new(n, d, dots)
}

/// `prod_{j<k} (a_{j,0~} + a_{k,0~})(a_{j,(N-1)~} - a_{k,(N-1)~})`.
pub fn singlet_bigraph(n: usize) -> Result<SculptingBigraph> {
    pair_scheme(n, Phase::ZERO, Phase::PI)
}

/// `prod_{j<k} (a_{j,0~} - a_{k,0~})(a_{j,(N-1)~} - a_{k,(N-1)~})`.
pub fn dicke_bigraph(n: usize) -> Result<SculptingBigraph> {
    pair_scheme(n, Phase::PI, Phase::PI)
}

/// `prod_{j<k} (a_{j,0~} + a_{k,0~})(a_{j,(N-1)~} + a_{k,(N-1)~})`.
pub fn symmetric_variant_bigraph(n: usize) -> Result<SculptingBigraph> {
    pair_scheme(n, Phase::ZERO, Phase::ZERO)
}
