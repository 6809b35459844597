/// Disjoint-set forest with path halving and union by size.
#[derive(Debug, Clone, Default)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    /// Adds a new singleton set and returns its element.
    pub fn push(&mut self) -> usize {
        let x = self.parent.len();
        self.parent.push(x);
        self.size.push(1);
        x
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Root lookup without path compression, for shared borrows.
    pub fn find_const(&self, mut x: usize) -> usize {
        while self.parent[x] != x {
            x = self.parent[x];
        }
        x
    }

    /// Returns true if the two elements were in different sets.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        true
    }

    pub fn same(&self, a: usize, b: usize) -> bool {
        self.find_const(a) == self.find_const(b)
    }

    /// Keeps only the first `n` elements. Sets are re-rooted so that any two
    /// kept elements that were connected (possibly through dropped ones) stay
    /// connected.
    pub fn restrict(&self, n: usize) -> UnionFind {
        let mut out = UnionFind::new(n);
        let mut first_in_set: std::collections::HashMap<usize, usize> = Default::default();
        for x in 0..n.min(self.len()) {
            let root = self.find_const(x);
            match first_in_set.get(&root) {
                Some(&rep) => {
                    out.union(rep, x);
                }
                None => {
                    first_in_set.insert(root, x);
                }
            }
        }
        out
    }

    /// Number of elements that share a set with at least one other element.
    pub fn non_singleton_members(&self) -> usize {
        (0..self.len())
            .filter(|&x| self.size[self.find_const(x)] > 1)
            .count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn transitivity() {
        let mut uf = UnionFind::new(4);
        uf.union(0, 1);
        uf.union(1, 2);
        assert!(uf.same(0, 2));
        assert!(!uf.same(0, 3));
    }

    #[test]
    fn restrict_keeps_connections_through_dropped_elements() {
        let mut uf = UnionFind::new(3);
        let bridge = uf.push();
        uf.union(0, bridge);
        uf.union(bridge, 2);
        let r = uf.restrict(3);
        assert!(r.same(0, 2));
        assert!(!r.same(0, 1));
    }

    proptest! {
        // reachability in the undirected pair graph is the reference relation
        #[test]
        fn matches_undirected_reachability(pairs in prop::collection::vec((0usize..10, 0usize..10), 0..15)) {
            let mut uf = UnionFind::new(10);
            for &(a, b) in &pairs {
                uf.union(a, b);
            }
            let mut reach = [[false; 10]; 10];
            for (i, row) in reach.iter_mut().enumerate() {
                row[i] = true;
            }
            for &(a, b) in &pairs {
                reach[a][b] = true;
                reach[b][a] = true;
            }
            for k in 0..10 {
                for i in 0..10 {
                    for j in 0..10 {
                        if reach[i][k] && reach[k][j] {
                            reach[i][j] = true;
                        }
                    }
                }
            }
            for (i, row) in reach.iter().enumerate() {
                for (j, &r) in row.iter().enumerate() {
                    prop_assert_eq!(uf.same(i, j), r);
                }
            }
        }
    }
}
