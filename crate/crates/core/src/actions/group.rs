use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};

/// Exact group element. Each group family uses one variant.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Element {
    /// Integer, or residue mod the group's order for cyclic groups.
    Int(i64),
    /// Freely reduced word; letter `+(g+1)` is free generator `g`,
    /// `-(g+1)` its inverse. Letters are in product order.
    Word(Vec<i8>),
    /// Integer matrix `[a, b, c, d]` = `(a b; c d)`.
    Mat2([i64; 4]),
    /// Unit quaternion `q / sqrt(5)^e` with integer `q`, `|q|^2 = 5^e`.
    Quat { q: [i64; 4], e: u32 },
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Element::Int(k) => write!(f, "{k}"),
            Element::Word(w) if w.is_empty() => write!(f, "e"),
            Element::Word(w) => {
                let parts: Vec<String> = w
                    .iter()
                    .map(|&l| {
                        let name = (b'a' + (l.unsigned_abs() - 1)) as char;
                        if l > 0 {
                            name.to_string()
                        } else {
                            name.to_ascii_uppercase().to_string()
                        }
                    })
                    .collect();
                write!(f, "{}", parts.join(""))
            }
            Element::Mat2(m) => write!(f, "[{} {}; {} {}]", m[0], m[1], m[2], m[3]),
            Element::Quat { q, e } => write!(f, "({} {} {} {})/5^({e}/2)", q[0], q[1], q[2], q[3]),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GroupFamily {
    Trivial,
    Integers,
    Cyclic(i64),
    Free(usize),
    Sl2,
    UnitQuaternions,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Generator {
    pub label: String,
    pub element: Element,
    /// Index of the inverse generator (itself for involutions).
    pub inverse: usize,
    /// Stored as the formal inverse of an earlier generator.
    pub is_inverse: bool,
}

/// Group with a finite symmetric generating set.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupPresentation {
    pub name: String,
    family: GroupFamily,
    generators: Vec<Generator>,
}

impl GroupPresentation {
    /// Build a presentation from forward generators; inverses are added
    /// unless a generator is an involution.
    fn with_forward(name: &str, family: GroupFamily, forward: Vec<(String, Element)>) -> Self {
        let mut g = GroupPresentation {
            name: name.to_string(),
            family,
            generators: Vec::new(),
        };
        for (label, element) in forward {
            let inv = g.inverse(&element);
            let i = g.generators.len();
            if inv == element {
                g.generators.push(Generator {
                    label,
                    element,
                    inverse: i,
                    is_inverse: false,
                });
            } else {
                g.generators.push(Generator {
                    label: label.clone(),
                    element,
                    inverse: i + 1,
                    is_inverse: false,
                });
                g.generators.push(Generator {
                    label: format!("{label}^-1"),
                    element: inv,
                    inverse: i,
                    is_inverse: true,
                });
            }
        }
        g
    }

    /// The trivial group, presented with the identity as its one generator.
    pub fn trivial() -> Self {
        Self::with_forward("trivial", GroupFamily::Trivial, vec![("e".into(), Element::Int(0))])
    }

    pub fn integers() -> Self {
        Self::with_forward("Z", GroupFamily::Integers, vec![("s".into(), Element::Int(1))])
    }

    pub fn cyclic(order: i64) -> Result<Self> {
        if order < 2 {
            return Err(Error::param("order", format!("{order} < 2")));
        }
        Ok(Self::with_forward(
            &format!("Z/{order}"),
            GroupFamily::Cyclic(order),
            vec![("s".into(), Element::Int(1))],
        ))
    }

    pub fn free(rank: usize) -> Result<Self> {
        if rank == 0 || rank > 26 {
            return Err(Error::param("rank", format!("{rank} not in 1..=26")));
        }
        let forward = (0..rank)
            .map(|g| {
                let label = ((b'a' + g as u8) as char).to_string();
                (label, Element::Word(vec![g as i8 + 1]))
            })
            .collect();
        Ok(Self::with_forward(&format!("F{rank}"), GroupFamily::Free(rank), forward))
    }

    /// `SL2(Z)` generated by `T = (1 1; 0 1)` and `R = (0 -1; 1 0)`.
    pub fn sl2() -> Self {
        Self::with_forward(
            "SL2(Z)",
            GroupFamily::Sl2,
            vec![
                ("T".into(), Element::Mat2([1, 1, 0, 1])),
                ("R".into(), Element::Mat2([0, -1, 1, 0])),
            ],
        )
    }

    /// Free group of unit quaternions generated by `(2 + i)/sqrt 5` and
    /// `(2 + j)/sqrt 5`: rotations by `arccos(3/5)` about two orthogonal axes.
    pub fn free_rotations() -> Self {
        Self::with_forward(
            "free rotations",
            GroupFamily::UnitQuaternions,
            vec![
                ("a".into(), Element::Quat { q: [2, 1, 0, 0], e: 1 }),
                ("b".into(), Element::Quat { q: [2, 0, 1, 0], e: 1 }),
            ],
        )
    }

    pub fn family(&self) -> GroupFamily {
        self.family
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    /// Indices of generators not stored as formal inverses.
    pub fn forward_generators(&self) -> impl Iterator<Item = usize> + '_ {
        self.generators
            .iter()
            .enumerate()
            .filter(|(_, g)| !g.is_inverse)
            .map(|(i, _)| i)
    }

    pub fn identity(&self) -> Element {
        match self.family {
            GroupFamily::Trivial | GroupFamily::Integers | GroupFamily::Cyclic(_) => Element::Int(0),
            GroupFamily::Free(_) => Element::Word(Vec::new()),
            GroupFamily::Sl2 => Element::Mat2([1, 0, 0, 1]),
            GroupFamily::UnitQuaternions => Element::Quat { q: [1, 0, 0, 0], e: 0 },
        }
    }

    pub fn is_identity(&self, g: &Element) -> bool {
        *g == self.identity()
    }

    /// Product `a * b`.
    pub fn mul(&self, a: &Element, b: &Element) -> Element {
        match (self.family, a, b) {
            (GroupFamily::Trivial, _, _) => Element::Int(0),
            (GroupFamily::Integers, Element::Int(x), Element::Int(y)) => Element::Int(x + y),
            (GroupFamily::Cyclic(m), Element::Int(x), Element::Int(y)) => {
                Element::Int((x + y).rem_euclid(m))
            }
            (GroupFamily::Free(_), Element::Word(x), Element::Word(y)) => {
                let mut out = x.clone();
                for &l in y {
                    if out.last() == Some(&-l) {
                        out.pop();
                    } else {
                        out.push(l);
                    }
                }
                Element::Word(out)
            }
            (GroupFamily::Sl2, Element::Mat2(x), Element::Mat2(y)) => Element::Mat2([
                x[0] * y[0] + x[1] * y[2],
                x[0] * y[1] + x[1] * y[3],
                x[2] * y[0] + x[3] * y[2],
                x[2] * y[1] + x[3] * y[3],
            ]),
            (GroupFamily::UnitQuaternions, Element::Quat { q: x, e: ex }, Element::Quat { q: y, e: ey }) => {
                let q = quat_mul_int(x, y);
                reduce_quat(q, ex + ey)
            }
            _ => panic!("element does not belong to {}", self.name),
        }
    }

    pub fn inverse(&self, a: &Element) -> Element {
        match (self.family, a) {
            (GroupFamily::Trivial, _) => Element::Int(0),
            (GroupFamily::Integers, Element::Int(x)) => Element::Int(-x),
            (GroupFamily::Cyclic(m), Element::Int(x)) => Element::Int((-x).rem_euclid(m)),
            (GroupFamily::Free(_), Element::Word(w)) => Element::Word(w.iter().rev().map(|l| -l).collect()),
            (GroupFamily::Sl2, Element::Mat2(m)) => Element::Mat2([m[3], -m[1], -m[2], m[0]]),
            (GroupFamily::UnitQuaternions, Element::Quat { q, e }) => Element::Quat {
                q: [q[0], -q[1], -q[2], -q[3]],
                e: *e,
            },
            _ => panic!("element does not belong to {}", self.name),
        }
    }

    /// Element represented by a word applied left to right: the word
    /// `(s_1, ..., s_k)` acts first by `s_1`, so it equals `s_k ... s_1`.
    pub fn word_element(&self, word: &[usize]) -> Element {
        word.iter().fold(self.identity(), |acc, &s| {
            self.mul(&self.generators[s].element, &acc)
        })
    }

    /// All elements of word length at most `radius`, by breadth-first
    /// search. Fails once the ball would exceed `cap` elements.
    pub fn word_ball(&self, radius: usize, cap: usize) -> Result<WordBall> {
        let e = self.identity();
        let mut index: HashMap<Element, usize> = HashMap::new();
        let mut entries: Vec<(usize, Element, Vec<usize>)> = vec![(0, e.clone(), Vec::new())];
        index.insert(e, 0);
        let mut frontier = vec![0usize];
        for len in 1..=radius {
            let mut next = Vec::new();
            for &f in &frontier {
                for (s, gen) in self.generators.iter().enumerate() {
                    let g = self.mul(&gen.element, &entries[f].1);
                    if index.contains_key(&g) {
                        continue;
                    }
                    if entries.len() >= cap {
                        return Err(Error::CapExceeded {
                            what: "word ball",
                            needed: entries.len() + 1,
                            cap,
                        });
                    }
                    let mut word = entries[f].2.clone();
                    word.push(s);
                    index.insert(g.clone(), entries.len());
                    next.push(entries.len());
                    entries.push((len, g, word));
                }
            }
            if next.is_empty() {
                break;
            }
            frontier = next;
        }
        entries.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
        let mut ball = WordBall {
            elements: Vec::with_capacity(entries.len()),
            lengths: Vec::with_capacity(entries.len()),
            words: Vec::with_capacity(entries.len()),
            index: HashMap::with_capacity(entries.len()),
            radius,
        };
        for (i, (len, g, w)) in entries.into_iter().enumerate() {
            ball.index.insert(g.clone(), i);
            ball.elements.push(g);
            ball.lengths.push(len);
            ball.words.push(w);
        }
        Ok(ball)
    }
}

fn quat_mul_int(x: &[i64; 4], y: &[i64; 4]) -> [i64; 4] {
    [
        x[0] * y[0] - x[1] * y[1] - x[2] * y[2] - x[3] * y[3],
        x[0] * y[1] + x[1] * y[0] + x[2] * y[3] - x[3] * y[2],
        x[0] * y[2] - x[1] * y[3] + x[2] * y[0] + x[3] * y[1],
        x[0] * y[3] + x[1] * y[2] - x[2] * y[1] + x[3] * y[0],
    ]
}

fn reduce_quat(mut q: [i64; 4], mut e: u32) -> Element {
    while e >= 2 && q.iter().all(|c| c % 5 == 0) {
        for c in &mut q {
            *c /= 5;
        }
        e -= 2;
    }
    Element::Quat { q, e }
}

/// Ball `B(e, radius)` sorted by word length, then canonical form.
#[derive(Clone, Debug)]
pub struct WordBall {
    elements: Vec<Element>,
    lengths: Vec<usize>,
    /// A shortest word (generator indices, applied left to right) per element.
    words: Vec<Vec<usize>>,
    index: HashMap<Element, usize>,
    radius: usize,
}

impl WordBall {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &Element {
        &self.elements[i]
    }

    pub fn length(&self, i: usize) -> usize {
        self.lengths[i]
    }

    pub fn word(&self, i: usize) -> &[usize] {
        &self.words[i]
    }

    pub fn position(&self, g: &Element) -> Option<usize> {
        self.index.get(g).copied()
    }

    /// Number of elements of length at most `r`.
    pub fn count_within(&self, r: usize) -> usize {
        self.lengths.partition_point(|&l| l <= r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_ball_sizes() {
        let f2 = GroupPresentation::free(2).unwrap();
        let sizes: Vec<usize> = (0..=3).map(|r| f2.word_ball(r, 1000).unwrap().len()).collect();
        assert_eq!(sizes, vec![1, 5, 17, 53]);
    }

    #[test]
    fn radius_zero_is_identity() {
        for g in [
            GroupPresentation::sl2(),
            GroupPresentation::integers(),
            GroupPresentation::free_rotations(),
        ] {
            let b = g.word_ball(0, 10).unwrap();
            assert_eq!(b.len(), 1);
            assert!(g.is_identity(b.element(0)));
        }
    }

    #[test]
    fn cap_is_enforced() {
        let f2 = GroupPresentation::free(2).unwrap();
        let err = f2.word_ball(3, 20).unwrap_err();
        assert!(matches!(err, Error::CapExceeded { cap: 20, .. }));
    }

    #[test]
    fn sl2_inverse_and_orders() {
        let g = GroupPresentation::sl2();
        assert_eq!(g.len(), 4);
        let r = Element::Mat2([0, -1, 1, 0]);
        let r2 = g.mul(&r, &r);
        assert_eq!(r2, Element::Mat2([-1, 0, 0, -1]));
        assert!(g.is_identity(&g.mul(&r2, &r2)));
        for gen in g.generators() {
            let inv = &g.generators()[gen.inverse].element;
            assert!(g.is_identity(&g.mul(&gen.element, inv)));
        }
    }

    #[test]
    fn sl2_ball_three() {
        // T, R and their inverses; R^2 = -I is central of order 2.
        let g = GroupPresentation::sl2();
        let b = g.word_ball(3, 10_000).unwrap();
        let sizes: Vec<usize> = (0..=3).map(|r| b.count_within(r)).collect();
        assert_eq!(sizes, vec![1, 5, 16, 36]);
    }

    #[test]
    fn quaternion_generators_are_free_on_small_balls() {
        let q = GroupPresentation::free_rotations();
        let f = GroupPresentation::free(2).unwrap();
        for r in 0..=4 {
            assert_eq!(
                q.word_ball(r, 10_000).unwrap().len(),
                f.word_ball(r, 10_000).unwrap().len()
            );
        }
    }

    #[test]
    fn word_order_is_left_to_right() {
        let g = GroupPresentation::sl2();
        // T then R acts as R * T
        let rt = g.word_element(&[0, 2]);
        assert_eq!(rt, g.mul(&Element::Mat2([0, -1, 1, 0]), &Element::Mat2([1, 1, 0, 1])));
    }

    #[test]
    fn cyclic_two_has_single_involution() {
        let g = GroupPresentation::cyclic(2).unwrap();
        assert_eq!(g.len(), 1);
        assert_eq!(g.generators()[0].inverse, 0);
        assert_eq!(g.word_ball(5, 10).unwrap().len(), 2);
    }
}
