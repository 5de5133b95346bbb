//! Link-cut forest with edge values stored at the child endpoint.
//!
//! Supports link, cut, find_root, path minimum (ties resolved toward the
//! queried node) and path add, all amortized O(log n).

use thiserror::Error;

const NIL: usize = usize::MAX;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ForestError {
    #[error("node {0} is not a root")]
    NotARoot(usize),
    #[error("nodes {0} and {1} are already in the same tree")]
    SameTree(usize, usize),
    #[error("node {0} has no parent")]
    NoParent(usize),
}

#[derive(Debug, Clone)]
pub struct DynForest {
    left: Vec<usize>,
    right: Vec<usize>,
    // splay parent, or path-parent pointer when this is a splay root
    up: Vec<usize>,
    val: Vec<i64>,
    has_edge: Vec<bool>,
    lazy: Vec<i64>,
    // min over edge-carrying nodes of the splay subtree; node achieving it,
    // deepest one on ties
    agg: Vec<i64>,
    arg: Vec<usize>,
    rotations: u64,
}

impl DynForest {
    pub fn new(n: usize) -> Self {
        DynForest {
            left: vec![NIL; n],
            right: vec![NIL; n],
            up: vec![NIL; n],
            val: vec![0; n],
            has_edge: vec![false; n],
            lazy: vec![0; n],
            agg: vec![i64::MAX; n],
            arg: vec![NIL; n],
            rotations: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.left.len()
    }

    pub fn is_empty(&self) -> bool {
        self.left.is_empty()
    }

    /// Total splay rotations performed so far.
    pub fn rotations(&self) -> u64 {
        self.rotations
    }

    fn is_splay_root(&self, x: usize) -> bool {
        let p = self.up[x];
        p == NIL || (self.left[p] != x && self.right[p] != x)
    }

    fn apply(&mut self, x: usize, d: i64) {
        if x == NIL {
            return;
        }
        self.val[x] += d;
        if self.arg[x] != NIL {
            self.agg[x] += d;
        }
        self.lazy[x] += d;
    }

    fn push(&mut self, x: usize) {
        let d = self.lazy[x];
        if d != 0 {
            let (l, r) = (self.left[x], self.right[x]);
            self.apply(l, d);
            self.apply(r, d);
            self.lazy[x] = 0;
        }
    }

    fn pull(&mut self, x: usize) {
        // in-order: left is shallower, right is deeper
        let mut best = i64::MAX;
        let mut at = NIL;
        let l = self.left[x];
        if l != NIL && self.arg[l] != NIL {
            best = self.agg[l];
            at = self.arg[l];
        }
        if self.has_edge[x] && (at == NIL || self.val[x] <= best) {
            best = self.val[x];
            at = x;
        }
        let r = self.right[x];
        if r != NIL && self.arg[r] != NIL && (at == NIL || self.agg[r] <= best) {
            best = self.agg[r];
            at = self.arg[r];
        }
        self.agg[x] = best;
        self.arg[x] = at;
    }

    fn rotate(&mut self, x: usize) {
        let p = self.up[x];
        let g = self.up[p];
        let p_root = self.is_splay_root(p);
        if self.left[p] == x {
            let b = self.right[x];
            self.left[p] = b;
            if b != NIL {
                self.up[b] = p;
            }
            self.right[x] = p;
        } else {
            let b = self.left[x];
            self.right[p] = b;
            if b != NIL {
                self.up[b] = p;
            }
            self.left[x] = p;
        }
        self.up[p] = x;
        self.up[x] = g;
        if !p_root {
            if self.left[g] == p {
                self.left[g] = x;
            } else {
                self.right[g] = x;
            }
        }
        self.pull(p);
        self.pull(x);
        self.rotations += 1;
    }

    fn splay(&mut self, x: usize) {
        let mut path = vec![x];
        let mut y = x;
        while !self.is_splay_root(y) {
            y = self.up[y];
            path.push(y);
        }
        for &z in path.iter().rev() {
            self.push(z);
        }
        while !self.is_splay_root(x) {
            let p = self.up[x];
            if !self.is_splay_root(p) {
                let g = self.up[p];
                let zigzig = (self.left[g] == p) == (self.left[p] == x);
                if zigzig {
                    self.rotate(p);
                } else {
                    self.rotate(x);
                }
            }
            self.rotate(x);
        }
    }

    /// Makes the root-to-x path preferred; x ends up splay root with no
    /// deeper nodes in its splay tree.
    fn access(&mut self, x: usize) {
        let mut last = NIL;
        let mut y = x;
        while y != NIL {
            self.splay(y);
            self.right[y] = last;
            self.pull(y);
            last = y;
            y = self.up[y];
        }
        self.splay(x);
    }

    pub fn find_root(&mut self, u: usize) -> usize {
        self.access(u);
        let mut r = u;
        loop {
            self.push(r);
            if self.left[r] == NIL {
                break;
            }
            r = self.left[r];
        }
        self.splay(r);
        r
    }

    /// True if `u` has a parent in the represented forest.
    pub fn has_parent(&mut self, u: usize) -> bool {
        self.access(u);
        self.left[u] != NIL
    }

    pub fn parent(&mut self, u: usize) -> Option<usize> {
        self.access(u);
        let mut p = self.left[u];
        if p == NIL {
            return None;
        }
        loop {
            self.push(p);
            if self.right[p] == NIL {
                break;
            }
            p = self.right[p];
        }
        self.splay(p);
        Some(p)
    }

    /// Makes `v` the parent of root `u`; the new edge gets `value`.
    pub fn link(&mut self, u: usize, v: usize, value: i64) -> Result<(), ForestError> {
        if self.has_parent(u) {
            return Err(ForestError::NotARoot(u));
        }
        if self.find_root(v) == u {
            return Err(ForestError::SameTree(u, v));
        }
        self.access(u);
        self.val[u] = value;
        self.has_edge[u] = true;
        self.pull(u);
        self.up[u] = v;
        Ok(())
    }

    /// Detaches `u` from its parent; returns the value the edge carried.
    pub fn cut(&mut self, u: usize) -> Result<i64, ForestError> {
        self.access(u);
        let l = self.left[u];
        if l == NIL {
            return Err(ForestError::NoParent(u));
        }
        self.up[l] = NIL;
        self.left[u] = NIL;
        let value = self.val[u];
        self.has_edge[u] = false;
        self.pull(u);
        Ok(value)
    }

    /// Value of the edge from `u` to its parent.
    pub fn value(&mut self, u: usize) -> Result<i64, ForestError> {
        self.access(u);
        if self.left[u] == NIL {
            return Err(ForestError::NoParent(u));
        }
        Ok(self.val[u])
    }

    /// Minimum edge on the path from `u` to its root, named by its child
    /// endpoint. Among equal minima the edge closest to `u` wins.
    pub fn find_min(&mut self, u: usize) -> Result<(usize, i64), ForestError> {
        self.access(u);
        if self.left[u] == NIL {
            return Err(ForestError::NoParent(u));
        }
        let at = self.arg[u];
        let value = self.agg[u];
        self.splay(at);
        Ok((at, value))
    }

    /// Adds `x` to every edge on the path from `u` to its root.
    pub fn add_path(&mut self, u: usize, x: i64) {
        self.access(u);
        // the root node carries no edge, so applying to the whole splay tree
        // only touches path edges
        self.apply(u, x);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn link_twice_is_not_a_root() {
        let mut f = DynForest::new(3);
        f.link(0, 1, 5).unwrap();
        assert_eq!(f.find_root(0), 1);
        assert_eq!(f.link(0, 2, 1), Err(ForestError::NotARoot(0)));
        assert_eq!(f.link(1, 0, 1), Err(ForestError::SameTree(1, 0)));
    }

    #[test]
    fn cut_restores_singletons() {
        let mut f = DynForest::new(2);
        f.link(0, 1, 5).unwrap();
        assert_eq!(f.cut(0), Ok(5));
        assert_eq!(f.find_root(0), 0);
        assert_eq!(f.find_root(1), 1);
        assert_eq!(f.cut(1), Err(ForestError::NoParent(1)));
    }

    #[test]
    fn chain_queries() {
        let mut f = DynForest::new(3);
        assert_eq!(f.find_root(2), 2);
        f.link(1, 2, 1).unwrap();
        f.link(0, 1, 3).unwrap();
        assert_eq!(f.find_root(0), 2);
        assert_eq!(f.find_min(0), Ok((1, 1)));
        f.add_path(0, -1);
        assert_eq!(f.value(0), Ok(2));
        assert_eq!(f.value(1), Ok(0));
        f.add_path(2, 5);
        assert_eq!(f.value(1), Ok(0));
    }

    #[test]
    fn ties_go_to_the_edge_closest_to_u() {
        let mut f = DynForest::new(3);
        f.link(1, 2, 2).unwrap();
        f.link(0, 1, 2).unwrap();
        assert_eq!(f.find_min(0), Ok((0, 2)));
        assert_eq!(f.find_min(1), Ok((1, 2)));
    }
}
