//! The discrete phase space Z3 x Z3, its lines, and the affine group acting
//! on it. Everything here is exact integer arithmetic modulo 3.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::Serialize;

use crate::error::{Error, Result};

/// An element of the field with three elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Z3(u8);

impl Z3 {
    pub const ZERO: Z3 = Z3(0);
    pub const ONE: Z3 = Z3(1);
    pub const TWO: Z3 = Z3(2);

    pub fn new(v: i64) -> Z3 {
        Z3(v.rem_euclid(3) as u8)
    }

    pub fn value(self) -> u8 {
        self.0
    }

    pub fn idx(self) -> usize {
        self.0 as usize
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(self) -> Option<Z3> {
        match self.0 {
            0 => None,
            // 1*1 = 1, 2*2 = 4 = 1
            v => Some(Z3(v)),
        }
    }

    pub fn all() -> [Z3; 3] {
        [Z3(0), Z3(1), Z3(2)]
    }
}

impl Add for Z3 {
    type Output = Z3;
    fn add(self, o: Z3) -> Z3 {
        Z3((self.0 + o.0) % 3)
    }
}

impl Sub for Z3 {
    type Output = Z3;
    fn sub(self, o: Z3) -> Z3 {
        Z3((self.0 + 3 - o.0) % 3)
    }
}

impl Mul for Z3 {
    type Output = Z3;
    fn mul(self, o: Z3) -> Z3 {
        Z3((self.0 * o.0) % 3)
    }
}

impl Neg for Z3 {
    type Output = Z3;
    fn neg(self) -> Z3 {
        Z3((3 - self.0) % 3)
    }
}

impl fmt::Display for Z3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A phase-space point `(k, l)`: `k` is the momentum (row) index, `l` the
/// position (column) index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct PhasePoint {
    pub k: Z3,
    pub l: Z3,
}

impl PhasePoint {
    pub fn new(k: i64, l: i64) -> PhasePoint {
        PhasePoint { k: Z3::new(k), l: Z3::new(l) }
    }

    /// Flat index `3k + l` used for coefficient arrays.
    pub fn index(self) -> usize {
        3 * self.k.idx() + self.l.idx()
    }

    pub fn from_index(i: usize) -> PhasePoint {
        PhasePoint::new((i / 3) as i64, (i % 3) as i64)
    }

    pub fn all() -> impl Iterator<Item = PhasePoint> {
        (0..9).map(PhasePoint::from_index)
    }
}

impl Add for PhasePoint {
    type Output = PhasePoint;
    fn add(self, o: PhasePoint) -> PhasePoint {
        PhasePoint { k: self.k + o.k, l: self.l + o.l }
    }
}

impl Sub for PhasePoint {
    type Output = PhasePoint;
    fn sub(self, o: PhasePoint) -> PhasePoint {
        PhasePoint { k: self.k - o.k, l: self.l - o.l }
    }
}

impl fmt::Display for PhasePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.k, self.l)
    }
}

/// A line `{x, x+d, x+2d}` with `d != 0`. Points are kept sorted, so two
/// lines are equal iff they are equal as sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct PhaseLine {
    pub points: [PhasePoint; 3],
}

impl PhaseLine {
    pub fn through(x: PhasePoint, d: PhasePoint) -> Result<PhaseLine> {
        if d == PhasePoint::new(0, 0) {
            return Err(Error::Domain("line direction must be nonzero".into()));
        }
        let mut points = [x, x + d, x + d + d];
        points.sort();
        Ok(PhaseLine { points })
    }

    /// Direction normalised so that its first nonzero entry is 1. Parallel
    /// lines share it.
    pub fn direction(&self) -> PhasePoint {
        normalize_direction(self.points[1] - self.points[0])
    }

    pub fn contains(&self, x: PhasePoint) -> bool {
        self.points.contains(&x)
    }

    pub fn map(&self, g: &AffineSymmetry) -> PhaseLine {
        let mut points = self.points.map(|x| g.apply(x));
        points.sort();
        PhaseLine { points }
    }
}

impl fmt::Display for PhaseLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c] = self.points;
        write!(f, "{{{a},{b},{c}}}")
    }
}

fn normalize_direction(d: PhasePoint) -> PhasePoint {
    let lead = if d.k != Z3::ZERO { d.k } else { d.l };
    let s = lead.inv().expect("nonzero direction");
    PhasePoint { k: d.k * s, l: d.l * s }
}

/// The four line directions, one per parallel bundle.
pub const BUNDLE_DIRECTIONS: [(i64, i64); 4] = [(1, 0), (0, 1), (1, 1), (1, 2)];

/// All 12 lines, grouped by bundle (three parallel lines each) in the order
/// of [`BUNDLE_DIRECTIONS`].
pub fn enumerate_lines() -> Vec<PhaseLine> {
    let mut out = Vec::with_capacity(12);
    for (dk, dl) in BUNDLE_DIRECTIONS {
        let d = PhasePoint::new(dk, dl);
        let mut bundle: BTreeSet<PhaseLine> = BTreeSet::new();
        for x in PhasePoint::all() {
            bundle.insert(PhaseLine::through(x, d).expect("nonzero direction"));
        }
        out.extend(bundle);
    }
    out
}

/// Number of lines entirely contained in `points`.
pub fn lines_contained(points: &[PhasePoint]) -> usize {
    let set: HashSet<PhasePoint> = points.iter().copied().collect();
    enumerate_lines()
        .iter()
        .filter(|l| l.points.iter().all(|x| set.contains(x)))
        .count()
}

/// Whether `a`, `b`, `c` are collinear (any two equal counts as collinear).
pub fn collinear(a: PhasePoint, b: PhasePoint, c: PhasePoint) -> bool {
    let (u, v) = (b - a, c - a);
    u.k * v.l - u.l * v.k == Z3::ZERO
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LiftKind {
    Unitary,
    Antiunitary,
}

/// `x -> M x + t` with `M = [[m, n], [p, q]]` acting on `(k, l)` and
/// `t = (j, r)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct AffineSymmetry {
    pub m: Z3,
    pub n: Z3,
    pub p: Z3,
    pub q: Z3,
    pub j: Z3,
    pub r: Z3,
}

impl AffineSymmetry {
    pub fn new(m: i64, n: i64, p: i64, q: i64, j: i64, r: i64) -> Result<AffineSymmetry> {
        let g = AffineSymmetry {
            m: Z3::new(m),
            n: Z3::new(n),
            p: Z3::new(p),
            q: Z3::new(q),
            j: Z3::new(j),
            r: Z3::new(r),
        };
        if g.det() == Z3::ZERO {
            return Err(Error::SingularAffine);
        }
        Ok(g)
    }

    fn linear(m: i64, n: i64, p: i64, q: i64) -> AffineSymmetry {
        AffineSymmetry::new(m, n, p, q, 0, 0).expect("invertible generator")
    }

    pub fn identity() -> AffineSymmetry {
        AffineSymmetry::linear(1, 0, 0, 1)
    }

    /// Phase-space translation by `(j, r)`.
    pub fn translation(j: i64, r: i64) -> AffineSymmetry {
        AffineSymmetry::new(1, 0, 0, 1, j, r).expect("identity matrix")
    }

    /// Quarter rotation, `(k, l) -> (l, -k)`.
    pub fn rotation() -> AffineSymmetry {
        AffineSymmetry::linear(0, 1, -1, 0)
    }

    /// Vertical shear, `(k, l) -> (k + l, l)`.
    pub fn vertical_shear() -> AffineSymmetry {
        AffineSymmetry::linear(1, 1, 0, 1)
    }

    /// Horizontal shear, `(k, l) -> (k, l + k)`.
    pub fn horizontal_shear() -> AffineSymmetry {
        AffineSymmetry::linear(1, 0, 1, 1)
    }

    /// Vertical reflection, `(k, l) -> (-k, l)`. Lifts antiunitarily.
    pub fn reflection() -> AffineSymmetry {
        AffineSymmetry::linear(-1, 0, 0, 1)
    }

    pub fn det(&self) -> Z3 {
        self.m * self.q - self.p * self.n
    }

    pub fn translation_part(&self) -> PhasePoint {
        PhasePoint { k: self.j, l: self.r }
    }

    pub fn linear_part(&self) -> AffineSymmetry {
        AffineSymmetry { j: Z3::ZERO, r: Z3::ZERO, ..*self }
    }

    pub fn is_linear(&self) -> bool {
        self.j == Z3::ZERO && self.r == Z3::ZERO
    }

    pub fn apply(&self, x: PhasePoint) -> PhasePoint {
        PhasePoint {
            k: self.m * x.k + self.n * x.l + self.j,
            l: self.p * x.k + self.q * x.l + self.r,
        }
    }

    /// `self ∘ h`, i.e. apply `h` first.
    pub fn compose(&self, h: &AffineSymmetry) -> AffineSymmetry {
        let g = self;
        let t = g.apply(h.translation_part());
        AffineSymmetry {
            m: g.m * h.m + g.n * h.p,
            n: g.m * h.n + g.n * h.q,
            p: g.p * h.m + g.q * h.p,
            q: g.p * h.n + g.q * h.q,
            j: t.k,
            r: t.l,
        }
    }

    pub fn inverse(&self) -> AffineSymmetry {
        let di = self.det().inv().expect("invertible by construction");
        let lin = AffineSymmetry {
            m: self.q * di,
            n: -self.n * di,
            p: -self.p * di,
            q: self.m * di,
            j: Z3::ZERO,
            r: Z3::ZERO,
        };
        let t = lin.apply(self.translation_part());
        AffineSymmetry { j: -t.k, r: -t.l, ..lin }
    }

    pub fn lift_kind(&self) -> LiftKind {
        if self.det() == Z3::ONE {
            LiftKind::Unitary
        } else {
            LiftKind::Antiunitary
        }
    }

    /// All 432 invertible affine maps, in lexicographic order.
    pub fn all() -> Vec<AffineSymmetry> {
        let mut out = Vec::with_capacity(432);
        for code in 0..729u32 {
            let d = |i: u32| ((code / 3u32.pow(i)) % 3) as i64;
            if let Ok(g) = AffineSymmetry::new(d(5), d(4), d(3), d(2), d(1), d(0)) {
                out.push(g);
            }
        }
        out
    }

    /// Exact decomposition into generators, see [`Decomposition`].
    pub fn decompose(&self) -> Decomposition {
        let reflect = self.lift_kind() == LiftKind::Antiunitary;
        let lin = if reflect {
            self.linear_part().compose(&AffineSymmetry::reflection())
        } else {
            self.linear_part()
        };
        let word = sl2_words()
            .get(&lin)
            .cloned()
            .expect("every det-1 matrix is a word in R and V");
        Decomposition { translation: self.translation_part(), word, reflect }
    }
}

impl fmt::Display for AffineSymmetry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[[{},{}],[{},{}]]+({},{})",
            self.m, self.n, self.p, self.q, self.j, self.r
        )
    }
}

/// Unitary generators of the linear det-1 part.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Generator {
    Rotation,
    VerticalShear,
}

impl Generator {
    pub fn affine(self) -> AffineSymmetry {
        match self {
            Generator::Rotation => AffineSymmetry::rotation(),
            Generator::VerticalShear => AffineSymmetry::vertical_shear(),
        }
    }
}

/// `g = T(translation) ∘ word[0] ∘ word[1] ∘ ... ∘ (S if reflect)`, so the
/// reflection acts first and the translation last.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    pub translation: PhasePoint,
    pub word: Vec<Generator>,
    pub reflect: bool,
}

impl Decomposition {
    pub fn compose(&self) -> AffineSymmetry {
        let mut g = AffineSymmetry::translation(
            self.translation.k.value() as i64,
            self.translation.l.value() as i64,
        );
        for w in &self.word {
            g = g.compose(&w.affine());
        }
        if self.reflect {
            g = g.compose(&AffineSymmetry::reflection());
        }
        g
    }
}

/// Shortest words in {R, V} for each of the 24 det-1 matrices (BFS).
fn sl2_words() -> HashMap<AffineSymmetry, Vec<Generator>> {
    let mut words = HashMap::new();
    let mut queue = VecDeque::new();
    words.insert(AffineSymmetry::identity(), Vec::new());
    queue.push_back(AffineSymmetry::identity());
    while let Some(g) = queue.pop_front() {
        for gen in [Generator::Rotation, Generator::VerticalShear] {
            let h = g.compose(&gen.affine());
            if !words.contains_key(&h) {
                let mut w: Vec<Generator> = words[&g].clone();
                w.push(gen);
                words.insert(h, w);
                queue.push_back(h);
            }
        }
    }
    words
}

/// Closure of a generating set under composition.
pub fn generated_group(gens: &[AffineSymmetry]) -> BTreeSet<AffineSymmetry> {
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::new();
    seen.insert(AffineSymmetry::identity());
    queue.push_back(AffineSymmetry::identity());
    while let Some(g) = queue.pop_front() {
        for h in gens {
            let gh = g.compose(h);
            if seen.insert(gh) {
                queue.push_back(gh);
            }
        }
    }
    seen
}

/// Affine-equivalence classes of subsets with at most four points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum SubsetKind {
    Single,
    Pair,
    TripleLine,
    TripleGeneric,
    QuadWithLine,
    QuadNoLine,
}

impl SubsetKind {
    pub fn size(self) -> usize {
        match self {
            SubsetKind::Single => 1,
            SubsetKind::Pair => 2,
            SubsetKind::TripleLine | SubsetKind::TripleGeneric => 3,
            SubsetKind::QuadWithLine | SubsetKind::QuadNoLine => 4,
        }
    }

    /// The representative reached by [`canonicalize_subset`].
    pub fn canonical_points(self) -> Vec<PhasePoint> {
        let pts: &[(i64, i64)] = match self {
            SubsetKind::Single => &[(0, 0)],
            SubsetKind::Pair => &[(0, 0), (1, 0)],
            SubsetKind::TripleLine => &[(0, 0), (1, 0), (2, 0)],
            SubsetKind::TripleGeneric => &[(0, 0), (1, 0), (0, 1)],
            SubsetKind::QuadWithLine => &[(0, 0), (1, 0), (2, 0), (0, 1)],
            SubsetKind::QuadNoLine => &[(0, 0), (1, 0), (0, 1), (1, 1)],
        };
        let mut v: Vec<PhasePoint> = pts.iter().map(|&(k, l)| PhasePoint::new(k, l)).collect();
        v.sort();
        v
    }
}

/// Class of a subset of 1..=8 points. Sets of five or more points are named
/// by the class of their complement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum SubsetClass {
    Direct(SubsetKind),
    ComplementOf(SubsetKind),
}

impl fmt::Display for SubsetClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SubsetClass::Direct(k) => write!(f, "{k:?}"),
            SubsetClass::ComplementOf(k) => write!(f, "ComplementOf({k:?})"),
        }
    }
}

fn checked_set(points: &[PhasePoint]) -> Result<BTreeSet<PhasePoint>> {
    let mut set = BTreeSet::new();
    for &x in points {
        if !set.insert(x) {
            return Err(Error::DuplicatePoint(x.k.value(), x.l.value()));
        }
    }
    if set.is_empty() || set.len() == 9 {
        return Err(Error::DegenerateSubset(set.len()));
    }
    Ok(set)
}

pub fn complement(points: &[PhasePoint]) -> Vec<PhasePoint> {
    PhasePoint::all().filter(|x| !points.contains(x)).collect()
}

fn classify_small(points: &[PhasePoint]) -> SubsetKind {
    match points.len() {
        1 => SubsetKind::Single,
        2 => SubsetKind::Pair,
        3 if lines_contained(points) == 1 => SubsetKind::TripleLine,
        3 => SubsetKind::TripleGeneric,
        4 if lines_contained(points) >= 1 => SubsetKind::QuadWithLine,
        4 => SubsetKind::QuadNoLine,
        n => unreachable!("classify_small called with {n} points"),
    }
}

pub fn classify_subset(points: &[PhasePoint]) -> Result<SubsetClass> {
    let set: Vec<PhasePoint> = checked_set(points)?.into_iter().collect();
    if set.len() <= 4 {
        Ok(SubsetClass::Direct(classify_small(&set)))
    } else {
        Ok(SubsetClass::ComplementOf(classify_small(&complement(&set))))
    }
}

/// Inverse of the matrix with columns `u`, `v` (as `(k, l)` vectors).
fn inverse_of_columns(u: PhasePoint, v: PhasePoint) -> Option<AffineSymmetry> {
    AffineSymmetry::new(
        u.k.value() as i64,
        v.k.value() as i64,
        u.l.value() as i64,
        v.l.value() as i64,
        0,
        0,
    )
    .ok()
    .map(|g| g.inverse())
}

fn permutations(items: &[PhasePoint]) -> Vec<Vec<PhasePoint>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, head);
            out.push(tail);
        }
    }
    out
}

/// Map a set of at most four points to its class representative: the first
/// point goes to the origin, the second to (1,0), a third on their line to
/// (2,0), a third off it to (0,1), and a fourth making no line to (1,1).
/// Returns the map and the (sorted) image.
pub fn canonicalize_subset(points: &[PhasePoint]) -> Result<(AffineSymmetry, Vec<PhasePoint>)> {
    let set: Vec<PhasePoint> = checked_set(points)?.into_iter().collect();
    if set.len() > 4 {
        return Err(Error::NotCanonicalizable(set.len()));
    }
    let target = classify_small(&set).canonical_points();
    let origin = PhasePoint::new(0, 0);
    for order in permutations(&set) {
        let p1 = order[0];
        let shift = AffineSymmetry::translation(-(p1.k.value() as i64), -(p1.l.value() as i64));
        let rel: Vec<PhasePoint> = order.iter().map(|&x| x - p1).collect();
        let lin = match rel.len() {
            1 => Some(AffineSymmetry::identity()),
            _ => {
                let u = rel[1];
                let off_line = rel[2..].iter().copied().find(|&v| !collinear(origin, u, v));
                let v = off_line.unwrap_or_else(|| {
                    // Any vector independent of u.
                    if collinear(origin, u, PhasePoint::new(0, 1)) {
                        PhasePoint::new(1, 0)
                    } else {
                        PhasePoint::new(0, 1)
                    }
                });
                inverse_of_columns(u, v)
            }
        };
        let Some(lin) = lin else { continue };
        let g = lin.compose(&shift);
        let mut image: Vec<PhasePoint> = set.iter().map(|&x| g.apply(x)).collect();
        image.sort();
        if image == target {
            return Ok((g, image));
        }
    }
    Err(Error::Internal("no ordering reaches the canonical representative".into()))
}

/// Partition all `n`-point subsets into orbits of the full affine group.
pub fn subset_orbits(n: usize) -> Vec<Vec<Vec<PhasePoint>>> {
    let group = AffineSymmetry::all();
    let mut seen: HashSet<Vec<PhasePoint>> = HashSet::new();
    let mut orbits = Vec::new();
    for subset in k_subsets(n) {
        if seen.contains(&subset) {
            continue;
        }
        let mut orbit: BTreeSet<Vec<PhasePoint>> = BTreeSet::new();
        for g in &group {
            let mut img: Vec<PhasePoint> = subset.iter().map(|&x| g.apply(x)).collect();
            img.sort();
            orbit.insert(img);
        }
        seen.extend(orbit.iter().cloned());
        orbits.push(orbit.into_iter().collect());
    }
    orbits
}

/// All sorted `n`-point subsets of the phase space.
pub fn k_subsets(n: usize) -> Vec<Vec<PhasePoint>> {
    (0u32..512)
        .filter(|mask| mask.count_ones() as usize == n)
        .map(|mask| (0..9).filter(|i| mask & (1 << i) != 0).map(PhasePoint::from_index).collect())
        .collect()
}

/// Parse `"k,l;k,l;..."`.
pub fn parse_points(s: &str) -> Result<Vec<PhasePoint>> {
    s.split(';')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            let parts: Vec<&str> = t.split(',').map(str::trim).collect();
            if parts.len() != 2 {
                return Err(Error::Parse(format!("expected \"k,l\", got {t:?}")));
            }
            let num = |x: &str| -> Result<i64> {
                let v: i64 = x.parse().map_err(|_| Error::Parse(format!("not an integer: {x:?}")))?;
                if !(0..3).contains(&v) {
                    return Err(Error::Parse(format!("coordinate {v} outside 0..=2")));
                }
                Ok(v)
            };
            Ok(PhasePoint::new(num(parts[0])?, num(parts[1])?))
        })
        .collect()
}
