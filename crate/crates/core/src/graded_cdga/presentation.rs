//! Presentations of finite CDGAs and their compilation to normal-form bases.
//!
//! A presentation lists odd-degree generators, optional degree-0 polynomial
//! variables with a global truncation order (monomials whose polynomial
//! degree exceeds it are discarded), monomial relations, and differential
//! rules for generators and poly0 variables. Compilation enumerates the
//! normal-form monomial basis, derives the full multiplication table with
//! Koszul signs, extends the differential by the Leibniz rule, and validates
//! the result.
//!
//! Only odd generator degrees are accepted: an even-degree generator has
//! unbounded powers, so no finite monomial basis exists unless relations cut
//! it down, and relations here are monomial (products declared zero) — they
//! cannot identify a power with another class. Models that genuinely need a
//! primitive even class (the genus-g surface ring) are built from explicit
//! tables instead.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::error::Error;
use crate::exact_linalg::{Matrix, Scalar};
use crate::expr::{parse_expression, RawTerm};

use super::{BasisElem, FiniteCdga};

#[derive(Clone, Debug)]
pub struct ModelPresentation {
    pub name: String,
    /// `(name, degree)`; degrees must be odd and at least 1.
    pub generators: Vec<(String, usize)>,
    /// Differential rules, keyed by generator or poly0-variable name.
    /// Missing keys mean the differential vanishes there.
    pub differential: BTreeMap<String, String>,
    /// Monomials declared zero (each generates a monomial ideal).
    pub relations: Vec<String>,
    pub poly0_vars: Vec<String>,
    /// Global truncation order for poly0 monomials.
    pub truncation: usize,
}

/// Default truncation order used when a presentation carries poly0
/// variables but no explicit order.
pub const DEFAULT_TRUNCATION: usize = 4;

/// A normalized monomial: poly0 exponents plus a strictly increasing
/// generator word.
type Monomial = (Vec<usize>, Vec<usize>);

struct Compiler<'a> {
    p: &'a ModelPresentation,
    gen_index: BTreeMap<String, usize>,
    poly0_index: BTreeMap<String, usize>,
    relations: Vec<Monomial>,
}

impl ModelPresentation {
    pub fn new(name: impl Into<String>) -> Self {
        ModelPresentation {
            name: name.into(),
            generators: Vec::new(),
            differential: BTreeMap::new(),
            relations: Vec::new(),
            poly0_vars: Vec::new(),
            truncation: DEFAULT_TRUNCATION,
        }
    }

    pub fn add_generator(&mut self, name: impl Into<String>, degree: usize) -> &mut Self {
        self.generators.push((name.into(), degree));
        self
    }

    pub fn add_poly0_var(&mut self, name: impl Into<String>) -> &mut Self {
        self.poly0_vars.push(name.into());
        self
    }

    pub fn add_relation(&mut self, monomial: impl Into<String>) -> &mut Self {
        self.relations.push(monomial.into());
        self
    }

    pub fn set_differential(
        &mut self,
        name: impl Into<String>,
        rule: impl Into<String>,
    ) -> &mut Self {
        self.differential.insert(name.into(), rule.into());
        self
    }

    pub fn compile(&self) -> Result<Arc<FiniteCdga>, Error> {
        let mut c = Compiler {
            p: self,
            gen_index: BTreeMap::new(),
            poly0_index: BTreeMap::new(),
            relations: Vec::new(),
        };
        c.check_names()?;
        c.parse_relations()?;
        c.build()
    }
}

impl<'a> Compiler<'a> {
    fn bad(&self, msg: impl Into<String>) -> Error {
        Error::InconsistentPresentation(format!("{}: {}", self.p.name, msg.into()))
    }

    fn check_names(&mut self) -> Result<(), Error> {
        let mut seen = BTreeSet::new();
        for (i, (name, degree)) in self.p.generators.iter().enumerate() {
            if name.is_empty() || name == "1" {
                return Err(self.bad("generator names must be nonempty identifiers"));
            }
            if !seen.insert(name.clone()) {
                return Err(self.bad(format!("duplicate name {name:?}")));
            }
            if *degree == 0 || *degree % 2 == 0 {
                return Err(self.bad(format!(
                    "generator {name:?} has even degree {degree}; only odd-degree \
                     generators are supported (use a table-built algebra for primitive \
                     even classes)"
                )));
            }
            self.gen_index.insert(name.clone(), i);
        }
        for (i, name) in self.p.poly0_vars.iter().enumerate() {
            if name.is_empty() {
                return Err(self.bad("poly0 variable names must be nonempty"));
            }
            if !seen.insert(name.clone()) {
                return Err(self.bad(format!("duplicate name {name:?}")));
            }
            self.poly0_index.insert(name.clone(), i);
        }
        for key in self.p.differential.keys() {
            if !self.gen_index.contains_key(key) && !self.poly0_index.contains_key(key) {
                return Err(self.bad(format!("differential rule for unknown name {key:?}")));
            }
        }
        Ok(())
    }

    /// Splits a raw factor list into poly0 exponents and an (unsorted)
    /// generator word.
    fn split_factors(&self, t: &RawTerm) -> Result<(Vec<usize>, Vec<usize>), Error> {
        let mut e = vec![0usize; self.p.poly0_vars.len()];
        let mut word = Vec::new();
        for f in &t.factors {
            if let Some(&vi) = self.poly0_index.get(f) {
                e[vi] += 1;
            } else if let Some(&gi) = self.gen_index.get(f) {
                word.push(gi);
            } else {
                return Err(self.bad(format!("unknown name {f:?} in expression")));
            }
        }
        Ok((e, word))
    }

    fn parse_relations(&mut self) -> Result<(), Error> {
        for r in &self.p.relations {
            let terms = parse_expression(r)?;
            if terms.len() != 1 || terms[0].coeff.is_zero() {
                return Err(self.bad(format!(
                    "relation {r:?} must be a single monomial with nonzero coefficient"
                )));
            }
            let (e, word) = self.split_factors(&terms[0])?;
            let Some((_, sorted)) = normalize_word(word) else {
                return Err(self.bad(format!(
                    "relation {r:?} is identically zero (repeated odd generator)"
                )));
            };
            if e.iter().sum::<usize>() == 0 && sorted.is_empty() {
                return Err(self.bad(format!("relation {r:?} would kill the unit")));
            }
            self.relations.push((e, sorted));
        }
        Ok(())
    }

    fn killed_by_relations(&self, e: &[usize], word: &[usize]) -> bool {
        self.relations.iter().any(|(re, rw)| {
            re.iter().zip(e).all(|(a, b)| a <= b)
                && rw.iter().all(|g| word.binary_search(g).is_ok())
        })
    }

    /// Truncation plus sign normalization plus relation filtering.
    fn normalize(&self, e: Vec<usize>, word: Vec<usize>) -> Option<(Scalar, Monomial)> {
        if e.iter().sum::<usize>() > self.p.truncation {
            return None;
        }
        let (negative, sorted) = normalize_word(word)?;
        if self.killed_by_relations(&e, &sorted) {
            return None;
        }
        let sign = if negative {
            -Scalar::one()
        } else {
            Scalar::one()
        };
        Some((sign, (e, sorted)))
    }

    fn word_degree(&self, word: &[usize]) -> usize {
        word.iter().map(|&g| self.p.generators[g].1).sum()
    }

    fn monomial_name(&self, e: &[usize], word: &[usize]) -> String {
        let mut parts = Vec::new();
        for (vi, &exp) in e.iter().enumerate() {
            for _ in 0..exp {
                parts.push(self.p.poly0_vars[vi].clone());
            }
        }
        for &g in word {
            parts.push(self.p.generators[g].0.clone());
        }
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join("*")
        }
    }

    /// Parses a differential rule into normalized `(coeff, monomial)` terms
    /// of the expected homogeneous degree.
    fn parse_rule(
        &self,
        name: &str,
        src: &str,
        want: usize,
    ) -> Result<Vec<(Scalar, Monomial)>, Error> {
        let mut out: BTreeMap<Monomial, Scalar> = BTreeMap::new();
        for t in parse_expression(src)? {
            if t.coeff.is_zero() {
                continue;
            }
            let (e, word) = self.split_factors(&t)?;
            let degree = self.word_degree(&word);
            let Some((sign, m)) = self.normalize(e, word) else {
                continue;
            };
            if degree != want {
                return Err(self.bad(format!(
                    "differential rule for {name:?} has a term of degree {degree}, expected {want}"
                )));
            }
            let c = out.entry(m).or_insert_with(Scalar::zero);
            *c += t.coeff.clone() * sign;
        }
        out.retain(|_, c| !c.is_zero());
        Ok(out.into_iter().map(|(m, c)| (c, m)).collect())
    }

    fn build(&self) -> Result<Arc<FiniteCdga>, Error> {
        let n = self.p.generators.len();
        let trunc = if self.p.poly0_vars.is_empty() {
            0
        } else {
            self.p.truncation
        };

        // all strictly increasing words, lexicographically
        let mut words: Vec<Vec<usize>> = Vec::new();
        fn rec(start: usize, n: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            out.push(cur.clone());
            for i in start..n {
                cur.push(i);
                rec(i + 1, n, cur, out);
                cur.pop();
            }
        }
        rec(0, n, &mut Vec::new(), &mut words);

        // all poly0 exponent vectors with total degree <= truncation
        let mut expos: Vec<Vec<usize>> = Vec::new();
        fn rec_e(
            pos: usize,
            left: usize,
            nvars: usize,
            cur: &mut Vec<usize>,
            out: &mut Vec<Vec<usize>>,
        ) {
            if pos == nvars {
                out.push(cur.clone());
                return;
            }
            for e in 0..=left {
                cur.push(e);
                rec_e(pos + 1, left - e, nvars, cur, out);
                cur.pop();
            }
        }
        rec_e(
            0,
            trunc,
            self.p.poly0_vars.len(),
            &mut Vec::new(),
            &mut expos,
        );

        let top = self.p.generators.iter().map(|(_, d)| d).sum::<usize>();
        let mut basis: Vec<Vec<BasisElem>> = vec![Vec::new(); top + 1];
        let mut index: BTreeMap<Monomial, (usize, usize)> = BTreeMap::new();
        for word in &words {
            let degree = self.word_degree(word);
            for e in &expos {
                if self.killed_by_relations(e, word) {
                    continue;
                }
                let name = self.monomial_name(e, word);
                let idx = basis[degree].len();
                basis[degree].push(BasisElem::monomial(name, e.clone(), word.clone()));
                index.insert((e.clone(), word.clone()), (degree, idx));
            }
        }
        if basis[0].is_empty() {
            return Err(self.bad("no unit monomial survives"));
        }
        let actual_top = (0..=top).rev().find(|&d| !basis[d].is_empty()).unwrap_or(0);
        basis.truncate(actual_top + 1);
        let dims: Vec<usize> = basis.iter().map(|b| b.len()).collect();

        // multiplication table
        let mut products: BTreeMap<(usize, usize, usize, usize), Vec<(usize, Scalar)>> =
            BTreeMap::new();
        for (d1, elems1) in basis.iter().enumerate() {
            for (d2, elems2) in basis.iter().enumerate() {
                if d1 + d2 > actual_top {
                    continue;
                }
                for (i1, b1) in elems1.iter().enumerate() {
                    for (i2, b2) in elems2.iter().enumerate() {
                        let e: Vec<usize> =
                            b1.poly0.iter().zip(&b2.poly0).map(|(a, b)| a + b).collect();
                        let mut word = b1.word.clone().expect("compiled basis");
                        word.extend(b2.word.clone().expect("compiled basis"));
                        if let Some((sign, m)) = self.normalize(e, word) {
                            let &(dt, it) = index.get(&m).expect("normalized monomial indexed");
                            debug_assert_eq!(dt, d1 + d2);
                            products.insert((d1, i1, d2, i2), vec![(it, sign)]);
                        }
                    }
                }
            }
        }

        // differential rules
        let mut gen_rules: Vec<Vec<(Scalar, Monomial)>> = Vec::new();
        for (gname, gdeg) in &self.p.generators {
            match self.p.differential.get(gname) {
                Some(src) => gen_rules.push(self.parse_rule(gname, src, gdeg + 1)?),
                None => gen_rules.push(Vec::new()),
            }
        }
        let mut var_rules: Vec<Vec<(Scalar, Monomial)>> = Vec::new();
        for vname in &self.p.poly0_vars {
            match self.p.differential.get(vname) {
                Some(src) => var_rules.push(self.parse_rule(vname, src, 1)?),
                None => var_rules.push(Vec::new()),
            }
        }

        // extend d by the Leibniz rule monomial by monomial
        let mut differentials: Vec<Matrix> = Vec::new();
        for d in 0..=actual_top {
            let rows = if d == actual_top { 0 } else { dims[d + 1] };
            let mut m = Matrix::new(rows, dims[d]);
            if rows > 0 {
                for (col, be) in basis[d].iter().enumerate() {
                    let word = be.word.as_ref().expect("compiled basis");
                    let mut acc: BTreeMap<Monomial, Scalar> = BTreeMap::new();
                    // poly0 factors (degree 0, no Koszul sign)
                    for (vi, &exp) in be.poly0.iter().enumerate() {
                        if exp == 0 || var_rules[vi].is_empty() {
                            continue;
                        }
                        let mut e_rest = be.poly0.clone();
                        e_rest[vi] -= 1;
                        for (c, (te, tw)) in &var_rules[vi] {
                            let e: Vec<usize> = e_rest.iter().zip(te).map(|(a, b)| a + b).collect();
                            let mut w = tw.clone();
                            w.extend(word.iter().copied());
                            if let Some((sign, m)) = self.normalize(e, w) {
                                let coeff = c * &Scalar::from_int(exp as i64) * sign;
                                *acc.entry(m).or_insert_with(Scalar::zero) += coeff;
                            }
                        }
                    }
                    // generator factors, alternating Koszul prefix signs
                    for (pos, &g) in word.iter().enumerate() {
                        if gen_rules[g].is_empty() {
                            continue;
                        }
                        let prefix_sign = if pos % 2 == 1 {
                            -Scalar::one()
                        } else {
                            Scalar::one()
                        };
                        for (c, (te, tw)) in &gen_rules[g] {
                            let e: Vec<usize> =
                                be.poly0.iter().zip(te).map(|(a, b)| a + b).collect();
                            let mut w: Vec<usize> = word[..pos].to_vec();
                            w.extend(tw.iter().copied());
                            w.extend(word[pos + 1..].iter().copied());
                            if let Some((sign, m)) = self.normalize(e, w) {
                                let coeff = c * &prefix_sign * sign;
                                *acc.entry(m).or_insert_with(Scalar::zero) += coeff;
                            }
                        }
                    }
                    for (mono, coeff) in acc {
                        if coeff.is_zero() {
                            continue;
                        }
                        let &(dt, it) = index.get(&mono).expect("normalized monomial indexed");
                        debug_assert_eq!(dt, d + 1);
                        m.set(it, col, coeff);
                    }
                }
            }
            differentials.push(m);
        }

        let alg = FiniteCdga {
            name: self.p.name.clone(),
            id: 0,
            top_degree: actual_top,
            basis,
            generators: self.p.generators.clone(),
            poly0_vars: self.p.poly0_vars.clone(),
            truncation: trunc,
            unit_index: 0,
            products,
            differentials,
            index_of: BTreeMap::new(),
            name_index: BTreeMap::new(),
            leibniz_skipped: 0,
        };
        alg.finish_construction()
    }
}

/// Sorts an odd-generator word, tracking the Koszul sign; `None` when a
/// generator repeats (its square is zero).
fn normalize_word(mut word: Vec<usize>) -> Option<(bool, Vec<usize>)> {
    let mut negative = false;
    for i in 1..word.len() {
        let mut j = i;
        while j > 0 && word[j - 1] > word[j] {
            word.swap(j - 1, j);
            negative = !negative;
            j -= 1;
        }
    }
    for i in 1..word.len() {
        if word[i] == word[i - 1] {
            return None;
        }
    }
    Some((negative, word))
}
