use std::fmt;
use std::ops::{Index, IndexMut};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Relation between two time points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PointRelation {
    #[serde(rename = "<")]
    Before,
    #[serde(rename = "=")]
    Equal,
    #[serde(rename = ">")]
    After,
}

impl PointRelation {
    /// Canonical order `<`, `=`, `>`; also the index order of probability triples.
    pub const ALL: [PointRelation; 3] = [PointRelation::Before, PointRelation::Equal, PointRelation::After];

    pub fn invert(self) -> Self {
        match self {
            PointRelation::Before => PointRelation::After,
            PointRelation::Equal => PointRelation::Equal,
            PointRelation::After => PointRelation::Before,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(index: usize) -> Option<Self> {
        Self::ALL.get(index).copied()
    }

    pub fn symbol(self) -> &'static str {
        match self {
            PointRelation::Before => "<",
            PointRelation::Equal => "=",
            PointRelation::After => ">",
        }
    }

    /// Relation that holds between two concrete timestamps.
    pub fn between<T: Ord>(a: T, b: T) -> Self {
        match a.cmp(&b) {
            std::cmp::Ordering::Less => PointRelation::Before,
            std::cmp::Ordering::Equal => PointRelation::Equal,
            std::cmp::Ordering::Greater => PointRelation::After,
        }
    }

    pub fn holds<T: Ord>(self, a: T, b: T) -> bool {
        Self::between(a, b) == self
    }
}

impl fmt::Display for PointRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl FromStr for PointRelation {
    type Err = UnknownLabel;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "<" => Ok(PointRelation::Before),
            "=" => Ok(PointRelation::Equal),
            ">" => Ok(PointRelation::After),
            _ => Err(UnknownLabel(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown relation label `{0}`")]
pub struct UnknownLabel(pub String);

/// Composition of two definite point relations: given `a r1 b` and `b r2 c`,
/// the relation between `a` and `c`, or `None` when it is not determined.
pub fn compose_points(r1: PointRelation, r2: PointRelation) -> Option<PointRelation> {
    use PointRelation::*;
    match (r1, r2) {
        (Equal, r) | (r, Equal) => Some(r),
        (Before, Before) => Some(Before),
        (After, After) => Some(After),
        (Before, After) | (After, Before) => None,
    }
}

/// Which end of an interval a point is.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Side {
    #[serde(rename = "s")]
    Start,
    #[serde(rename = "e")]
    End,
}

impl Side {
    pub fn letter(self) -> char {
        match self {
            Side::Start => 's',
            Side::End => 'e',
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

impl FromStr for Side {
    type Err = UnknownLabel;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "s" | "start" => Ok(Side::Start),
            "e" | "end" => Ok(Side::End),
            _ => Err(UnknownLabel(s.to_string())),
        }
    }
}

/// One of the four endpoint pairs `(x_s,y_s)`, `(x_s,y_e)`, `(x_e,y_s)`, `(x_e,y_e)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum EndpointPairKey {
    #[serde(rename = "SS")]
    SS,
    #[serde(rename = "SE")]
    SE,
    #[serde(rename = "ES")]
    ES,
    #[serde(rename = "EE")]
    EE,
}

impl EndpointPairKey {
    pub const ALL: [EndpointPairKey; 4] =
        [EndpointPairKey::SS, EndpointPairKey::SE, EndpointPairKey::ES, EndpointPairKey::EE];

    pub fn new(x_side: Side, y_side: Side) -> Self {
        match (x_side, y_side) {
            (Side::Start, Side::Start) => EndpointPairKey::SS,
            (Side::Start, Side::End) => EndpointPairKey::SE,
            (Side::End, Side::Start) => EndpointPairKey::ES,
            (Side::End, Side::End) => EndpointPairKey::EE,
        }
    }

    pub fn x_side(self) -> Side {
        match self {
            EndpointPairKey::SS | EndpointPairKey::SE => Side::Start,
            EndpointPairKey::ES | EndpointPairKey::EE => Side::End,
        }
    }

    pub fn y_side(self) -> Side {
        match self {
            EndpointPairKey::SS | EndpointPairKey::ES => Side::Start,
            EndpointPairKey::SE | EndpointPairKey::EE => Side::End,
        }
    }

    /// The key of the same endpoint pair seen from the other entity.
    pub fn swapped(self) -> Self {
        match self {
            EndpointPairKey::SE => EndpointPairKey::ES,
            EndpointPairKey::ES => EndpointPairKey::SE,
            k => k,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_str(self) -> &'static str {
        match self {
            EndpointPairKey::SS => "SS",
            EndpointPairKey::SE => "SE",
            EndpointPairKey::ES => "ES",
            EndpointPairKey::EE => "EE",
        }
    }
}

impl fmt::Display for EndpointPairKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A value per endpoint pair, stored in the fixed order SS, SE, ES, EE.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Quad<T>(pub [T; 4]);

impl<T> Quad<T> {
    pub fn from_fn(mut f: impl FnMut(EndpointPairKey) -> T) -> Self {
        Quad(EndpointPairKey::ALL.map(&mut f))
    }

    pub fn iter(&self) -> impl Iterator<Item = (EndpointPairKey, &T)> {
        EndpointPairKey::ALL.into_iter().zip(self.0.iter())
    }

    pub fn map<U>(&self, mut f: impl FnMut(&T) -> U) -> Quad<U> {
        Quad::from_fn(|k| f(&self[k]))
    }
}

impl<T> Index<EndpointPairKey> for Quad<T> {
    type Output = T;

    fn index(&self, key: EndpointPairKey) -> &T {
        &self.0[key.index()]
    }
}

impl<T> IndexMut<EndpointPairKey> for Quad<T> {
    fn index_mut(&mut self, key: EndpointPairKey) -> &mut T {
        &mut self.0[key.index()]
    }
}

pub type PointQuad = Quad<PointRelation>;

/// Allen's thirteen interval relations, in canonical listing order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AllenRelation {
    Before,
    After,
    Meets,
    MetBy,
    Overlaps,
    OverlappedBy,
    Starts,
    StartedBy,
    Finishes,
    FinishedBy,
    Contains,
    During,
    Equals,
}

impl AllenRelation {
    pub const ALL: [AllenRelation; 13] = [
        AllenRelation::Before,
        AllenRelation::After,
        AllenRelation::Meets,
        AllenRelation::MetBy,
        AllenRelation::Overlaps,
        AllenRelation::OverlappedBy,
        AllenRelation::Starts,
        AllenRelation::StartedBy,
        AllenRelation::Finishes,
        AllenRelation::FinishedBy,
        AllenRelation::Contains,
        AllenRelation::During,
        AllenRelation::Equals,
    ];

    /// The eleven relations expressible with TempEval-3 labels.
    pub const OBSERVED: [AllenRelation; 11] = [
        AllenRelation::Before,
        AllenRelation::After,
        AllenRelation::Meets,
        AllenRelation::MetBy,
        AllenRelation::Starts,
        AllenRelation::StartedBy,
        AllenRelation::Finishes,
        AllenRelation::FinishedBy,
        AllenRelation::Contains,
        AllenRelation::During,
        AllenRelation::Equals,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_str(self) -> &'static str {
        match self {
            AllenRelation::Before => "before",
            AllenRelation::After => "after",
            AllenRelation::Meets => "meets",
            AllenRelation::MetBy => "met-by",
            AllenRelation::Overlaps => "overlaps",
            AllenRelation::OverlappedBy => "overlapped-by",
            AllenRelation::Starts => "starts",
            AllenRelation::StartedBy => "started-by",
            AllenRelation::Finishes => "finishes",
            AllenRelation::FinishedBy => "finished-by",
            AllenRelation::Contains => "contains",
            AllenRelation::During => "during",
            AllenRelation::Equals => "equals",
        }
    }

    /// Endpoint decomposition `(r_ss, r_se, r_es, r_ee)` for intervals with start < end.
    pub fn to_points(self) -> PointQuad {
        use PointRelation::{After as Gt, Before as Lt, Equal as Eq};
        let rels = match self {
            AllenRelation::Before => [Lt, Lt, Lt, Lt],
            AllenRelation::After => [Gt, Gt, Gt, Gt],
            AllenRelation::Meets => [Lt, Lt, Eq, Lt],
            AllenRelation::MetBy => [Gt, Eq, Gt, Gt],
            AllenRelation::Overlaps => [Lt, Lt, Gt, Lt],
            AllenRelation::OverlappedBy => [Gt, Lt, Gt, Gt],
            AllenRelation::Starts => [Eq, Lt, Gt, Lt],
            AllenRelation::StartedBy => [Eq, Lt, Gt, Gt],
            AllenRelation::Finishes => [Gt, Lt, Gt, Eq],
            AllenRelation::FinishedBy => [Lt, Lt, Gt, Eq],
            AllenRelation::Contains => [Lt, Lt, Gt, Gt],
            AllenRelation::During => [Gt, Lt, Gt, Lt],
            AllenRelation::Equals => [Eq, Lt, Gt, Eq],
        };
        Quad(rels)
    }

    /// Inverse lookup of [`AllenRelation::to_points`].
    pub fn from_points(quad: &PointQuad) -> Option<Self> {
        Self::ALL.into_iter().find(|r| r.to_points() == *quad)
    }

    pub fn invert(self) -> Self {
        match self {
            AllenRelation::Before => AllenRelation::After,
            AllenRelation::After => AllenRelation::Before,
            AllenRelation::Meets => AllenRelation::MetBy,
            AllenRelation::MetBy => AllenRelation::Meets,
            AllenRelation::Overlaps => AllenRelation::OverlappedBy,
            AllenRelation::OverlappedBy => AllenRelation::Overlaps,
            AllenRelation::Starts => AllenRelation::StartedBy,
            AllenRelation::StartedBy => AllenRelation::Starts,
            AllenRelation::Finishes => AllenRelation::FinishedBy,
            AllenRelation::FinishedBy => AllenRelation::Finishes,
            AllenRelation::Contains => AllenRelation::During,
            AllenRelation::During => AllenRelation::Contains,
            AllenRelation::Equals => AllenRelation::Equals,
        }
    }
}

/// Decomposition of `r` into its four endpoint relations.
pub fn interval_to_points(r: AllenRelation) -> PointQuad {
    r.to_points()
}

pub fn points_to_interval(quad: &PointQuad) -> Option<AllenRelation> {
    AllenRelation::from_points(quad)
}

pub fn invert_interval(r: AllenRelation) -> AllenRelation {
    r.invert()
}

/// Re-expresses a quad for `x REL y` as the quad for `y REL x`.
pub fn swap_quad(quad: &PointQuad) -> PointQuad {
    Quad::from_fn(|k| quad[k.swapped()].invert())
}

impl fmt::Display for AllenRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AllenRelation {
    type Err = UnknownLabel;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = s.trim().to_ascii_lowercase().replace(['_', ' '], "-");
        Self::ALL
            .into_iter()
            .find(|r| r.as_str() == norm)
            .ok_or_else(|| UnknownLabel(s.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Textbook endpoint definitions of Allen's relations, independent of the table.
    fn holds_by_definition(r: AllenRelation, xs: i32, xe: i32, ys: i32, ye: i32) -> bool {
        match r {
            AllenRelation::Before => xe < ys,
            AllenRelation::After => ye < xs,
            AllenRelation::Meets => xe == ys,
            AllenRelation::MetBy => ye == xs,
            AllenRelation::Overlaps => xs < ys && ys < xe && xe < ye,
            AllenRelation::OverlappedBy => ys < xs && xs < ye && ye < xe,
            AllenRelation::Starts => xs == ys && xe < ye,
            AllenRelation::StartedBy => xs == ys && ye < xe,
            AllenRelation::Finishes => xe == ye && ys < xs,
            AllenRelation::FinishedBy => xe == ye && xs < ys,
            AllenRelation::Contains => xs < ys && ye < xe,
            AllenRelation::During => ys < xs && xe < ye,
            AllenRelation::Equals => xs == ys && xe == ye,
        }
    }

    #[test]
    fn decomposition_matches_endpoint_definitions() {
        for xs in 0..5 {
            for xe in xs + 1..6 {
                for ys in 0..5 {
                    for ye in ys + 1..6 {
                        let quad = Quad([
                            PointRelation::between(xs, ys),
                            PointRelation::between(xs, ye),
                            PointRelation::between(xe, ys),
                            PointRelation::between(xe, ye),
                        ]);
                        let holding: Vec<_> = AllenRelation::ALL
                            .into_iter()
                            .filter(|&r| holds_by_definition(r, xs, xe, ys, ye))
                            .collect();
                        assert_eq!(holding.len(), 1, "{xs} {xe} {ys} {ye}");
                        assert_eq!(points_to_interval(&quad), Some(holding[0]));
                    }
                }
            }
        }
    }

    #[test]
    fn worked_decompositions() {
        use PointRelation::*;
        assert_eq!(interval_to_points(AllenRelation::Starts), Quad([Equal, Before, After, Before]));
        assert_eq!(interval_to_points(AllenRelation::Equals), Quad([Equal, Before, After, Equal]));
        assert_eq!(interval_to_points(AllenRelation::Before), Quad([Before; 4]));
        assert_eq!(points_to_interval(&Quad([Equal, Before, After, Before])), Some(AllenRelation::Starts));
        assert_eq!(points_to_interval(&Quad([Before, After, Before, Before])), None);
    }

    #[test]
    fn unmatched_quads_are_unsatisfiable() {
        // Brute force: a quad with no table row has no realisation with xs<xe, ys<ye.
        let mut realisable = std::collections::HashSet::new();
        for xs in 0..5 {
            for xe in xs + 1..6 {
                for ys in 0..5 {
                    for ye in ys + 1..6 {
                        realisable.insert([
                            PointRelation::between(xs, ys),
                            PointRelation::between(xs, ye),
                            PointRelation::between(xe, ys),
                            PointRelation::between(xe, ye),
                        ]);
                    }
                }
            }
        }
        assert_eq!(realisable.len(), 13);
        for a in PointRelation::ALL {
            for b in PointRelation::ALL {
                for c in PointRelation::ALL {
                    for d in PointRelation::ALL {
                        let q = Quad([a, b, c, d]);
                        assert_eq!(points_to_interval(&q).is_some(), realisable.contains(&q.0));
                    }
                }
            }
        }
    }

    #[test]
    fn inversion() {
        assert_eq!(invert_interval(AllenRelation::Before), AllenRelation::After);
        assert_eq!(invert_interval(AllenRelation::Equals), AllenRelation::Equals);
        assert_eq!(invert_interval(AllenRelation::Starts), AllenRelation::StartedBy);
        for r in AllenRelation::ALL {
            assert_eq!(r.invert().invert(), r);
            assert_eq!(r.invert().to_points(), swap_quad(&r.to_points()));
            assert_eq!(points_to_interval(&interval_to_points(r)), Some(r));
        }
        for p in PointRelation::ALL {
            assert_eq!(p.invert().invert(), p);
        }
    }

    #[test]
    fn composition_is_sound_on_a_small_grid() {
        for r1 in PointRelation::ALL {
            for r2 in PointRelation::ALL {
                let mut seen = std::collections::BTreeSet::new();
                for a in 0..3 {
                    for b in 0..3 {
                        for c in 0..3 {
                            if r1.holds(a, b) && r2.holds(b, c) {
                                seen.insert(PointRelation::between(a, c));
                            }
                        }
                    }
                }
                match compose_points(r1, r2) {
                    Some(r) => assert_eq!(seen.into_iter().collect::<Vec<_>>(), vec![r]),
                    None => assert!(seen.len() > 1, "{r1}{r2}"),
                }
            }
        }
    }

    #[test]
    fn labels_parse() {
        assert_eq!("met_by".parse::<AllenRelation>(), Ok(AllenRelation::MetBy));
        assert_eq!("Overlapped By".parse::<AllenRelation>(), Ok(AllenRelation::OverlappedBy));
        assert!("sideways".parse::<AllenRelation>().is_err());
        assert_eq!(
            serde_json::to_string(&AllenRelation::FinishedBy).unwrap(),
            "\"finished-by\""
        );
        assert_eq!(serde_json::to_string(&PointRelation::After).unwrap(), "\">\"");
    }
}
