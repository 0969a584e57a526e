use super::{FactorCode, ShiftSpace, Symbol};
use crate::error::{Error, Result};
use std::collections::{BTreeSet, HashMap, VecDeque};

/// A right-resolving labelled graph presenting the image `π(X)`.
///
/// Built by the subset construction started from the full alphabet, merged
/// by follower set, and restricted to the terminal strongly connected
/// component. For an irreducible `X` this is the minimal right-resolving
/// (Fischer) cover of the image.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SoficPresentation {
    states: Vec<Vec<Symbol>>,
    edges: Vec<Vec<Option<usize>>>,
    label_count: usize,
}

impl SoficPresentation {
    pub fn new(space: &ShiftSpace, code: &FactorCode) -> Result<Self> {
        if !space.is_irreducible() {
            return Err(Error::RequiresIrreducible);
        }
        if code.domain_len() != space.len() {
            return Err(Error::InvalidArgument("code domain does not match the space".into()));
        }
        let (subsets, delta) = subset_construction(space, code);
        let (classes, class_count) = merge_by_follower_set(&delta, code.label_count());

        let mut rep: Vec<Option<usize>> = vec![None; class_count];
        for (s, &c) in classes.iter().enumerate() {
            rep[c].get_or_insert(s);
        }
        let quotient: Vec<Vec<Option<usize>>> = rep
            .iter()
            .map(|r| delta[r.unwrap()].iter().map(|t| t.map(|t| classes[t])).collect())
            .collect();

        let keep = terminal_component(&quotient);
        let index: HashMap<usize, usize> = keep.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        let edges = keep
            .iter()
            .map(|&c| quotient[c].iter().map(|t| t.map(|t| index[&t])).collect())
            .collect();
        let states = keep.iter().map(|&c| subsets[rep[c].unwrap()].clone()).collect();
        Ok(SoficPresentation { states, edges, label_count: code.label_count() })
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    /// A representative set of domain symbols for each state.
    pub fn states(&self) -> &[Vec<Symbol>] {
        &self.states
    }

    pub fn label_count(&self) -> usize {
        self.label_count
    }

    pub fn target(&self, state: usize, label: Symbol) -> Option<usize> {
        self.edges[state][label]
    }

    /// `(from, label, to)` triples in state then label order.
    pub fn edges(&self) -> Vec<(usize, Symbol, usize)> {
        let mut out = Vec::new();
        for (s, row) in self.edges.iter().enumerate() {
            for (l, t) in row.iter().enumerate() {
                if let Some(t) = t {
                    out.push((s, l, *t));
                }
            }
        }
        out
    }

    /// Label words of length `n` read along paths starting anywhere.
    pub fn label_words(&self, n: usize) -> BTreeSet<Vec<Symbol>> {
        let mut out = BTreeSet::new();
        let mut stack = Vec::new();
        for s in 0..self.state_count() {
            self.walk(s, n, &mut stack, &mut out);
        }
        out
    }

    fn walk(&self, s: usize, n: usize, stack: &mut Vec<Symbol>, out: &mut BTreeSet<Vec<Symbol>>) {
        if stack.len() == n {
            out.insert(stack.clone());
            return;
        }
        for (l, t) in self.edges[s].iter().enumerate() {
            if let Some(t) = t {
                stack.push(l);
                self.walk(*t, n, stack, out);
                stack.pop();
            }
        }
    }

    /// The edge shift of the graph together with the label of each edge.
    /// Edge `i` of the returned space is `self.edges()[i]`.
    pub fn edge_shift(&self) -> Result<(ShiftSpace, Vec<Symbol>)> {
        let edges = self.edges();
        let names = edges.iter().map(|(s, l, t)| format!("{s}:{l}:{t}")).collect();
        let mut pairs = Vec::new();
        for (i, e) in edges.iter().enumerate() {
            for (j, f) in edges.iter().enumerate() {
                if e.2 == f.0 {
                    pairs.push((i, j));
                }
            }
        }
        let labels = edges.iter().map(|e| e.1).collect();
        Ok((ShiftSpace::new(names, &pairs)?, labels))
    }
}

type Delta = Vec<Vec<Option<usize>>>;

fn subset_construction(space: &ShiftSpace, code: &FactorCode) -> (Vec<Vec<Symbol>>, Delta) {
    let start: Vec<Symbol> = (0..space.len()).collect();
    let mut index = HashMap::from([(start.clone(), 0usize)]);
    let mut subsets = vec![start];
    let mut delta: Delta = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        let mut row = vec![None; code.label_count()];
        for (label, slot) in row.iter_mut().enumerate() {
            let next: Vec<Symbol> = code
                .preimages(label)
                .iter()
                .copied()
                .filter(|&t| subsets[i].iter().any(|&s| space.allows(s, t)))
                .collect();
            if next.is_empty() {
                continue;
            }
            let j = *index.entry(next.clone()).or_insert_with(|| {
                subsets.push(next);
                queue.push_back(subsets.len() - 1);
                subsets.len() - 1
            });
            *slot = Some(j);
        }
        if delta.len() <= i {
            delta.resize(i + 1, Vec::new());
        }
        delta[i] = row;
    }
    (subsets, delta)
}

/// Moore refinement; every state accepts, missing edges reject.
fn merge_by_follower_set(delta: &Delta, labels: usize) -> (Vec<usize>, usize) {
    let n = delta.len();
    let mut class = vec![0usize; n];
    let mut count = 1;
    loop {
        let mut sigs: HashMap<(usize, Vec<Option<usize>>), usize> = HashMap::new();
        let mut next = vec![0usize; n];
        for s in 0..n {
            let sig: Vec<Option<usize>> = (0..labels).map(|l| delta[s][l].map(|t| class[t])).collect();
            let len = sigs.len();
            next[s] = *sigs.entry((class[s], sig)).or_insert(len);
        }
        let new_count = sigs.len();
        class = next;
        if new_count == count {
            return (class, count);
        }
        count = new_count;
    }
}

/// States of the strongly connected component with no exits, in index order.
fn terminal_component(delta: &Delta) -> Vec<usize> {
    let n = delta.len();
    let reach: Vec<Vec<bool>> = (0..n)
        .map(|s| {
            let mut seen = vec![false; n];
            let mut queue = VecDeque::from([s]);
            seen[s] = true;
            while let Some(u) = queue.pop_front() {
                for t in delta[u].iter().flatten() {
                    if !seen[*t] {
                        seen[*t] = true;
                        queue.push_back(*t);
                    }
                }
            }
            seen
        })
        .collect();
    // A state is in a terminal component iff everything it reaches reaches it back.
    let s = (0..n)
        .find(|&s| (0..n).all(|t| !reach[s][t] || reach[t][s]))
        .expect("finite graph has a terminal component");
    (0..n).filter(|&t| reach[s][t]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_shift_onto_two_shift_is_one_state() {
        let x = ShiftSpace::full(&["a", "b", "c"]).unwrap();
        let pi = FactorCode::from_names(&x, &[("a", "0"), ("b", "0"), ("c", "1")]).unwrap();
        let p = SoficPresentation::new(&x, &pi).unwrap();
        assert_eq!(p.state_count(), 1);
        assert_eq!(p.edges(), vec![(0, 0, 0), (0, 1, 0)]);
    }

    #[test]
    fn identity_on_golden_mean() {
        let x = ShiftSpace::from_names(&["0", "1"], &[("0", "0"), ("0", "1"), ("1", "0")]).unwrap();
        let p = SoficPresentation::new(&x, &FactorCode::identity(&x)).unwrap();
        assert_eq!(p.state_count(), 2);
        assert_eq!(p.edges().len(), 3);
        for n in 1..=6 {
            let want: BTreeSet<_> = x.words(n).into_iter().collect();
            assert_eq!(p.label_words(n), want);
        }
    }

    #[test]
    fn even_shift_edge_presentation() {
        // Edges of the standard even-shift graph: A-1->A, A-0->B, B-0->A.
        let x = ShiftSpace::from_names(
            &["e1", "e2", "e3"],
            &[("e1", "e1"), ("e1", "e2"), ("e2", "e3"), ("e3", "e1"), ("e3", "e2")],
        )
        .unwrap();
        let pi = FactorCode::from_names(&x, &[("e1", "1"), ("e2", "0"), ("e3", "0")]).unwrap();
        let p = SoficPresentation::new(&x, &pi).unwrap();
        assert_eq!(p.state_count(), 2);
        assert_eq!(p.edges().len(), 3);
    }

    #[test]
    fn reducible_input_is_rejected() {
        let x = ShiftSpace::from_names(&["a", "b"], &[("a", "a"), ("b", "b")]).unwrap();
        assert_eq!(
            SoficPresentation::new(&x, &FactorCode::identity(&x)),
            Err(Error::RequiresIrreducible)
        );
    }
}
