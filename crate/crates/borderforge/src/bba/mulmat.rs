use std::collections::HashMap;

use crate::algebra::{FieldElement, Polynomial, PrimeField, Ring, Term};

/// Multiplication matrices of an O-border prebasis, stored by column:
/// `cols[j][i]` is the coordinate vector of x_j * o_i over O.
pub(crate) struct MulMatrices {
    field: PrimeField,
    index: HashMap<Term, usize>,
    cols: Vec<Vec<Vec<FieldElement>>>,
    memo: HashMap<Term, Vec<FieldElement>>,
    pub ops: u64,
}

impl MulMatrices {
    /// `rewrite(b)` gives the terms of b - (b's prebasis polynomial), i.e.
    /// the expression of border term b over O.
    pub fn build(
        ring: &Ring,
        o: &[Term],
        mut rewrite: impl FnMut(&Term) -> Option<Vec<(Term, FieldElement)>>,
    ) -> Option<MulMatrices> {
        let index: HashMap<Term, usize> = o.iter().enumerate().map(|(i, t)| (*t, i)).collect();
        let n = ring.nvars();
        let mut cols = vec![Vec::with_capacity(o.len()); n];
        for (j, col) in cols.iter_mut().enumerate() {
            for s in o {
                let mut v = vec![0; o.len()];
                let b = s.mul_var(j)?;
                if let Some(&k) = index.get(&b) {
                    v[k] = 1;
                } else {
                    for (t, c) in rewrite(&b)? {
                        v[*index.get(&t)?] = c;
                    }
                }
                col.push(v);
            }
        }
        Some(MulMatrices { field: *ring.field(), index, cols, memo: HashMap::new(), ops: 0 })
    }

    pub fn dim(&self) -> usize {
        self.index.len()
    }

    fn mat_vec(&mut self, j: usize, v: &[FieldElement]) -> Vec<FieldElement> {
        let f = self.field;
        let mut out = vec![0; v.len()];
        for (k, &x) in v.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (o, &m) in out.iter_mut().zip(&self.cols[j][k]) {
                if m != 0 {
                    *o = f.mul_add(*o, x, m);
                    self.ops += 1;
                }
            }
        }
        out
    }

    /// Whether M_i M_j = M_j M_i for all pairs of variables.
    pub fn commute(&mut self) -> bool {
        let n = self.cols.len();
        for i in 0..n {
            for j in (i + 1)..n {
                for k in 0..self.dim() {
                    let cj = self.cols[j][k].clone();
                    let ci = self.cols[i][k].clone();
                    if self.mat_vec(i, &cj) != self.mat_vec(j, &ci) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Coordinates of t over O, computed as a product of matrices applied
    /// to the unit term.
    fn term_nf(&mut self, t: Term) -> Vec<FieldElement> {
        if let Some(v) = self.memo.get(&t) {
            return v.clone();
        }
        let v = if let Some(&k) = self.index.get(&t) {
            let mut e = vec![0; self.dim()];
            e[k] = 1;
            e
        } else {
            let j = (0..t.nvars()).find(|&j| t.exp(j) > 0).expect("the unit term lies in O");
            let w = self.term_nf(t.div_var(j).unwrap());
            self.mat_vec(j, &w)
        };
        self.memo.insert(t, v.clone());
        v
    }

    pub fn normal_form(&mut self, f: &Polynomial) -> Vec<FieldElement> {
        let field = self.field;
        let mut acc = vec![0; self.dim()];
        if self.dim() == 0 {
            return acc;
        }
        for &(t, c) in f.terms() {
            let v = self.term_nf(t);
            for (a, x) in acc.iter_mut().zip(v) {
                if x != 0 {
                    *a = field.mul_add(*a, c, x);
                    self.ops += 1;
                }
            }
        }
        acc
    }
}
