//! The ordered Čech nerve of the maximal-cone cover of a fan.
//!
//! Level `p` holds the strictly increasing `(p+1)`-tuples of maximal-cone
//! indices in lexicographic order, each with the cone on the shared rays.
//! The nerve does not depend on a degree, so one instance serves every graded
//! piece of a scan.

use std::collections::HashMap;

use crate::fan::{Cone, Fan};

#[derive(Clone, Debug)]
pub struct NerveLevel {
    pub tuples: Vec<Vec<usize>>,
    pub cones: Vec<Cone>,
    index: HashMap<Vec<usize>, usize>,
}

impl NerveLevel {
    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn index_of(&self, tuple: &[usize]) -> Option<usize> {
        self.index.get(tuple).copied()
    }
}

#[derive(Clone, Debug)]
pub struct CechNerve {
    num_cones: usize,
    levels: Vec<NerveLevel>,
    /// `cofaces[p][s]`: `(t, sign)` for every `t` at level `p+1` containing `s`.
    cofaces: Vec<Vec<Vec<(usize, i8)>>>,
}

impl CechNerve {
    /// Levels `0..=top`, truncated at the number of maximal cones.
    pub fn new(fan: &Fan, top: usize) -> Self {
        let m = fan.num_max_cones();
        let mut levels: Vec<NerveLevel> = Vec::new();
        let first = NerveLevel {
            tuples: (0..m).map(|k| vec![k]).collect(),
            cones: (0..m).map(|k| fan.max_cone(k)).collect(),
            index: (0..m).map(|k| (vec![k], k)).collect(),
        };
        if m > 0 {
            levels.push(first);
        }
        while levels.len() <= top && levels.len() < m {
            let prev = levels.last().expect("nonempty");
            let mut tuples = Vec::new();
            let mut cones = Vec::new();
            for (t, c) in prev.tuples.iter().zip(&prev.cones) {
                let last = *t.last().expect("nonempty tuple");
                for x in last + 1..m {
                    let mut nt = t.clone();
                    nt.push(x);
                    cones.push(c.intersect(&fan.max_cone(x)));
                    tuples.push(nt);
                }
            }
            let index = tuples
                .iter()
                .enumerate()
                .map(|(i, t)| (t.clone(), i))
                .collect();
            levels.push(NerveLevel {
                tuples,
                cones,
                index,
            });
        }
        let mut cofaces = Vec::new();
        for p in 0..levels.len().saturating_sub(1) {
            let mut inc = vec![Vec::new(); levels[p].len()];
            for (ti, t) in levels[p + 1].tuples.iter().enumerate() {
                for k in 0..t.len() {
                    let face: Vec<usize> = t
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| *i != k)
                        .map(|(_, &x)| x)
                        .collect();
                    let si = levels[p]
                        .index_of(&face)
                        .expect("faces of nerve tuples are tuples");
                    inc[si].push((ti, if k % 2 == 0 { 1 } else { -1 }));
                }
            }
            cofaces.push(inc);
        }
        CechNerve {
            num_cones: m,
            levels,
            cofaces,
        }
    }

    pub fn num_cones(&self) -> usize {
        self.num_cones
    }

    pub fn num_levels(&self) -> usize {
        self.levels.len()
    }

    pub fn level(&self, p: usize) -> &NerveLevel {
        &self.levels[p]
    }

    /// Signed incidences from level `p` to level `p + 1`.
    pub fn cofaces(&self, p: usize, s: usize) -> &[(usize, i8)] {
        &self.cofaces[p][s]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fan::example_fan;

    #[test]
    fn level_sizes_are_binomials() {
        let nerve = CechNerve::new(&example_fan(), 3);
        let sizes: Vec<usize> = (0..nerve.num_levels())
            .map(|p| nerve.level(p).len())
            .collect();
        assert_eq!(sizes, vec![8, 28, 56, 70]);
    }

    #[test]
    fn intersections_shrink_along_levels() {
        let nerve = CechNerve::new(&example_fan(), 2);
        for p in 0..nerve.num_levels() - 1 {
            for s in 0..nerve.level(p).len() {
                for &(t, _) in nerve.cofaces(p, s) {
                    let small = &nerve.level(p + 1).cones[t];
                    let big = &nerve.level(p).cones[s];
                    assert!(small.rays().iter().all(|r| big.contains(*r)));
                }
            }
        }
    }
}
