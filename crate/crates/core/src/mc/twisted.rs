//! Twisted complexes: finite modules `⊕_{r=0}^{k} Ω ⊗ t_r` over a base
//! model Ω, with a differential and product determined by degree-1
//! structure forms.
//!
//! The two producers — Maurer–Cartan data
//! ([`crate::mc::MaurerCartanData::build_twisted`]) and base change along
//! a morphism out of the universal algebra
//! ([`crate::universal::base_change`]) — both funnel into
//! [`TwistedComplex::assemble`], which only does bookkeeping: it turns
//! `d(t_r)` and `t_s ∗ t_r` tables into degree-wise matrices via the
//! Koszul rule
//! `d(φ ⊗ t_r) = dφ ⊗ t_r + (-1)^{|φ|} φ ∧ d(t_r)`
//! and verifies `d² = 0`. An element of base degree p sits in total
//! degree p + 1.

use std::collections::BTreeMap;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::error::Error;
use crate::exact_linalg::{subquotient, Matrix, Scalar, Subquotient};
use crate::expr::parse_expression;
use crate::graded_cdga::{render_linear_combination, Element, FiniteCdga};

#[derive(Clone)]
pub struct TwistedComplex {
    model: Arc<FiniteCdga>,
    k: usize,
    name: String,
    id: u64,
    /// `diff[n] : total degree n -> n + 1`, for `n` in `0..=top+1`.
    diff: Vec<Matrix>,
    /// `d(t_r) = Σ (coeff ⊗ t_{r'})`, coeffs homogeneous of degree 1.
    dt: Vec<Vec<(usize, Element)>>,
    /// `t_s ∗ t_r = Σ (coeff ⊗ t_{idx})` for `s < r`.
    tprod: BTreeMap<(usize, usize), Vec<(usize, Element)>>,
}

/// An element of a twisted complex: dense coordinates per total degree,
/// flat within a degree as `k+1` blocks of model coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwElement {
    complex: u64,
    comps: BTreeMap<usize, Vec<Scalar>>,
}

impl TwistedComplex {
    /// Shared assembly of both construction routes. `dt[r]` and
    /// `tprod[(s,r)]` list `(target index, degree-1 coefficient)` pairs.
    pub(crate) fn assemble(
        model: Arc<FiniteCdga>,
        k: usize,
        name: String,
        dt: Vec<Vec<(usize, Element)>>,
        tprod: BTreeMap<(usize, usize), Vec<(usize, Element)>>,
    ) -> Result<TwistedComplex, Error> {
        if dt.len() != k + 1 {
            return Err(Error::usage(format!(
                "expected d(t_r) for r = 0..={k}, got {} entries",
                dt.len()
            )));
        }
        let check_terms = |terms: &[(usize, Element)], what: &str| -> Result<(), Error> {
            for (idx, g) in terms {
                if *idx > k {
                    return Err(Error::usage(format!("{what} hits t_{idx} beyond t_{k}")));
                }
                if g.algebra_id() != model.id() {
                    return Err(Error::usage(format!(
                        "{what} has a coefficient from a different algebra"
                    )));
                }
                if !g.is_zero() && g.degree() != Some(1) {
                    return Err(Error::usage(format!(
                        "{what} has a coefficient that is not homogeneous of degree 1"
                    )));
                }
            }
            Ok(())
        };
        for (r, terms) in dt.iter().enumerate() {
            check_terms(terms, &format!("d(t_{r})"))?;
        }
        for (&(s, r), terms) in &tprod {
            if s >= r || r > k {
                return Err(Error::usage(format!(
                    "product table key t_{s} ∗ t_{r} is not ordered below t_{k}"
                )));
            }
            check_terms(terms, &format!("t_{s} ∗ t_{r}"))?;
        }

        let top = model.top_degree();
        let bdim = |n: usize| -> usize {
            if n == 0 {
                0
            } else {
                model.dim(n - 1)
            }
        };
        let mut diff = Vec::with_capacity(top + 2);
        for n in 0..=top + 1 {
            let rows = if n == top + 1 {
                0
            } else {
                (k + 1) * bdim(n + 1)
            };
            let cols = (k + 1) * bdim(n);
            let mut m = Matrix::new(rows, cols);
            if n == top + 1 || cols == 0 {
                diff.push(m);
                continue;
            }
            let p = n - 1; // base degree of sources
            let tdim = bdim(n + 1);
            for r in 0..=k {
                for i in 0..bdim(n) {
                    let col = r * bdim(n) + i;
                    let phi = model.basis_element(p, i);
                    // dφ ⊗ t_r
                    let dphi = model.differential(&phi)?;
                    for (j, c) in dphi.coords(p + 1, tdim).into_iter().enumerate() {
                        if !c.is_zero() {
                            m.add_to(r * tdim + j, col, c);
                        }
                    }
                    // (-1)^p φ ∧ d(t_r)
                    for (r2, g) in &dt[r] {
                        let prod = model.multiply(&phi, g)?;
                        for (j, c) in prod.coords(p + 1, tdim).into_iter().enumerate() {
                            if c.is_zero() {
                                continue;
                            }
                            let signed = if p % 2 == 1 { -c } else { c };
                            m.add_to(r2 * tdim + j, col, signed);
                        }
                    }
                }
            }
            diff.push(m);
        }
        for n in 0..=top {
            if !diff[n + 1].mul(&diff[n])?.is_zero() {
                return Err(Error::internal(format!(
                    "twisted differential fails d² = 0 out of degree {n}"
                )));
            }
        }

        let mut h = std::collections::hash_map::DefaultHasher::new();
        model.id().hash(&mut h);
        k.hash(&mut h);
        name.hash(&mut h);
        let mut hash_terms = |terms: &[(usize, Element)]| {
            for (idx, g) in terms {
                idx.hash(&mut h);
                format!("{g:?}").hash(&mut h);
            }
        };
        for terms in &dt {
            hash_terms(terms);
        }
        for terms in tprod.values() {
            hash_terms(terms);
        }
        let id = h.finish();

        Ok(TwistedComplex {
            model,
            k,
            name,
            id,
            diff,
            dt,
            tprod,
        })
    }

    pub fn model(&self) -> &Arc<FiniteCdga> {
        &self.model
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    /// Largest total degree, `model.top_degree() + 1`.
    pub fn top_degree(&self) -> usize {
        self.model.top_degree() + 1
    }

    pub fn dim(&self, n: usize) -> usize {
        if n == 0 || n > self.top_degree() {
            0
        } else {
            (self.k + 1) * self.model.dim(n - 1)
        }
    }

    pub fn dims(&self) -> Vec<usize> {
        (0..=self.top_degree()).map(|n| self.dim(n)).collect()
    }

    pub fn differential_matrix(&self, n: usize) -> Matrix {
        self.diff
            .get(n)
            .cloned()
            .unwrap_or_else(|| Matrix::new(0, self.dim(n)))
    }

    pub fn dt_terms(&self, r: usize) -> &[(usize, Element)] {
        &self.dt[r]
    }

    pub fn tprod_terms(&self, s: usize, r: usize) -> &[(usize, Element)] {
        self.tprod.get(&(s, r)).map_or(&[], |v| v.as_slice())
    }

    fn check_owned(&self, x: &TwElement) -> Result<(), Error> {
        if x.complex != self.id {
            return Err(Error::usage(
                "element does not belong to this twisted complex".to_string(),
            ));
        }
        Ok(())
    }

    pub fn zero(&self) -> TwElement {
        TwElement {
            complex: self.id,
            comps: BTreeMap::new(),
        }
    }

    /// Embeds a model element into block `t_r`; each base degree p lands
    /// in total degree p + 1.
    pub fn t_element(&self, r: usize, x: &Element) -> Result<TwElement, Error> {
        if x.algebra_id() != self.model.id() {
            return Err(Error::usage(
                "coefficient from a different algebra".to_string(),
            ));
        }
        if r > self.k {
            return Err(Error::usage(format!("t_{r} is beyond t_{}", self.k)));
        }
        let mut out = self.zero();
        for p in x.degrees() {
            let bdim = self.model.dim(p);
            let n = p + 1;
            let v = out
                .comps
                .entry(n)
                .or_insert_with(|| vec![Scalar::zero(); self.dim(n)]);
            for (i, c) in x.coords(p, bdim).into_iter().enumerate() {
                v[r * bdim + i] += c;
            }
        }
        out.prune();
        Ok(out)
    }

    /// The block-`r` coefficient of `x`, as a model element (total degree
    /// n contributes base degree n - 1).
    pub fn block_component(&self, x: &TwElement, r: usize) -> Result<Element, Error> {
        self.check_owned(x)?;
        if r > self.k {
            return Err(Error::usage(format!("t_{r} is beyond t_{}", self.k)));
        }
        let mut out = self.model.zero();
        for (&n, v) in &x.comps {
            let bdim = self.model.dim(n - 1);
            let coords = v[r * bdim..(r + 1) * bdim].to_vec();
            out = out.add(&self.model.element_from_coords(n - 1, coords))?;
        }
        Ok(out)
    }

    pub fn basis_element(&self, n: usize, flat: usize) -> TwElement {
        assert!(flat < self.dim(n), "basis index out of range");
        let mut v = vec![Scalar::zero(); self.dim(n)];
        v[flat] = Scalar::one();
        TwElement {
            complex: self.id,
            comps: BTreeMap::from([(n, v)]),
        }
    }

    pub fn element_from_coords(&self, n: usize, coords: Vec<Scalar>) -> TwElement {
        assert_eq!(coords.len(), self.dim(n), "coordinate length mismatch");
        let mut out = TwElement {
            complex: self.id,
            comps: BTreeMap::from([(n, coords)]),
        };
        out.prune();
        out
    }

    pub fn differential(&self, x: &TwElement) -> Result<TwElement, Error> {
        self.check_owned(x)?;
        let mut out = self.zero();
        for (&n, v) in &x.comps {
            let img = self.diff[n].mul_vec(v)?;
            if img.iter().any(|c| !c.is_zero()) {
                let w = out
                    .comps
                    .entry(n + 1)
                    .or_insert_with(|| vec![Scalar::zero(); self.dim(n + 1)]);
                for (j, c) in img.into_iter().enumerate() {
                    w[j] += c;
                }
            }
        }
        out.prune();
        Ok(out)
    }

    /// Graded product. For source blocks `s < r` the rule is
    /// `(φ⊗t_s)(ψ⊗t_r) = (-1)^{|ψ|} Σ (φ∧ψ∧coeff) ⊗ t_idx`; the `s > r`
    /// case follows by the sign rule `t_s ∗ t_r = -t_r ∗ t_s`, and
    /// `t_r ∗ t_r = 0`.
    pub fn multiply(&self, x: &TwElement, y: &TwElement) -> Result<TwElement, Error> {
        self.check_owned(x)?;
        self.check_owned(y)?;
        let mut out = self.zero();
        for (&n1, v1) in &x.comps {
            let b1 = self.model.dim(n1 - 1);
            for (&n2, v2) in &y.comps {
                let b2 = self.model.dim(n2 - 1);
                let nt = n1 + n2;
                if nt > self.top_degree() {
                    continue;
                }
                let bt = self.model.dim(nt - 1);
                let p2 = n2 - 1;
                for s in 0..=self.k {
                    let phi = self
                        .model
                        .element_from_coords(n1 - 1, v1[s * b1..(s + 1) * b1].to_vec());
                    if phi.is_zero() {
                        continue;
                    }
                    for r in 0..=self.k {
                        if s == r {
                            continue;
                        }
                        let psi = self
                            .model
                            .element_from_coords(n2 - 1, v2[r * b2..(r + 1) * b2].to_vec());
                        if psi.is_zero() {
                            continue;
                        }
                        let (key, extra_neg) = if s < r {
                            ((s, r), false)
                        } else {
                            ((r, s), true)
                        };
                        let Some(terms) = self.tprod.get(&key) else {
                            continue;
                        };
                        let phipsi = self.model.multiply(&phi, &psi)?;
                        if phipsi.is_zero() {
                            continue;
                        }
                        for (idx, g) in terms {
                            let mut term = self.model.multiply(&phipsi, g)?;
                            if (p2 % 2 == 1) ^ extra_neg {
                                term = term.neg();
                            }
                            let coords = term.coords(nt - 1, bt);
                            if coords.iter().all(|c| c.is_zero()) {
                                continue;
                            }
                            let w = out
                                .comps
                                .entry(nt)
                                .or_insert_with(|| vec![Scalar::zero(); self.dim(nt)]);
                            for (j, c) in coords.into_iter().enumerate() {
                                w[idx * bt + j] += c;
                            }
                        }
                    }
                }
            }
        }
        out.prune();
        Ok(out)
    }

    /// Module action of the base: `x ∧ (φ⊗t_r) = (x∧φ)⊗t_r`.
    pub fn base_action(&self, x: &Element, y: &TwElement) -> Result<TwElement, Error> {
        self.check_owned(y)?;
        if x.algebra_id() != self.model.id() {
            return Err(Error::usage(
                "coefficient from a different algebra".to_string(),
            ));
        }
        let mut out = self.zero();
        for r in 0..=self.k {
            let block = self.block_component(y, r)?;
            let prod = self.model.multiply(x, &block)?;
            out = out.add(&self.t_element(r, &prod)?)?;
        }
        Ok(out)
    }

    pub fn subquotient_at(&self, n: usize) -> Result<Subquotient, Error> {
        let z = self.differential_matrix(n);
        let b = if n == 0 {
            Matrix::new(self.dim(0), 0)
        } else {
            self.differential_matrix(n - 1)
        };
        subquotient(&z, &b)
    }

    /// Betti numbers per total degree `0..=top_degree()`.
    pub fn betti(&self) -> Result<Vec<usize>, Error> {
        (0..=self.top_degree())
            .map(|n| Ok(self.subquotient_at(n)?.dim()))
            .collect()
    }

    fn basis_name(&self, n: usize, flat: usize) -> String {
        let bdim = self.model.dim(n - 1);
        let r = flat / bdim;
        let i = flat % bdim;
        let base = self.model.basis_elems(n - 1)[i].name();
        if base == "1" {
            format!("t{r}")
        } else {
            format!("{base}*t{r}")
        }
    }

    pub fn display(&self, x: &TwElement) -> String {
        if x.complex != self.id {
            return "<foreign element>".to_string();
        }
        let mut parts = Vec::new();
        for (&n, v) in &x.comps {
            for (flat, c) in v.iter().enumerate() {
                if !c.is_zero() {
                    parts.push((c.clone(), self.basis_name(n, flat)));
                }
            }
        }
        render_linear_combination(parts)
    }

    /// Parses expressions like `a*t1 + 1/2*b*c*t3`: per term, model factors
    /// followed by exactly one trailing `t<r>` factor.
    pub fn parse_element(&self, src: &str) -> Result<TwElement, Error> {
        let mut out = self.zero();
        for term in parse_expression(src)? {
            let Some((last, model_factors)) = term.factors.split_last() else {
                return Err(Error::usage(format!(
                    "term without a t-factor in {src:?}: every term must end in t0..t{}",
                    self.k
                )));
            };
            let r = parse_t_name(last, self.k).ok_or_else(|| {
                Error::usage(format!(
                    "term must end with a single t0..t{} factor, found {last:?}",
                    self.k
                ))
            })?;
            if let Some(bad) = model_factors
                .iter()
                .find(|f| parse_t_name(f, self.k).is_some())
            {
                return Err(Error::usage(format!(
                    "t-factor {bad:?} must come last in its term"
                )));
            }
            let mut acc = self.model.unit();
            for f in model_factors {
                let fe = self.model.parse_element(f)?;
                acc = self.model.multiply(&acc, &fe)?;
            }
            out = out.add(&self.t_element(r, &acc.scale(&term.coeff))?)?;
        }
        Ok(out)
    }
}

fn parse_t_name(name: &str, k: usize) -> Option<usize> {
    let digits = name.strip_prefix('t')?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse::<usize>().ok().filter(|&r| r <= k)
}

impl TwElement {
    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        if self.comps.len() == 1 {
            self.comps.keys().next().copied()
        } else {
            None
        }
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.comps.keys().copied().collect()
    }

    pub fn complex_id(&self) -> u64 {
        self.complex
    }

    pub fn coords(&self, n: usize, dim: usize) -> Vec<Scalar> {
        match self.comps.get(&n) {
            Some(v) => {
                debug_assert_eq!(v.len(), dim);
                v.clone()
            }
            None => vec![Scalar::zero(); dim],
        }
    }

    fn prune(&mut self) {
        self.comps.retain(|_, v| v.iter().any(|c| !c.is_zero()));
    }

    pub fn add(&self, other: &TwElement) -> Result<TwElement, Error> {
        if self.complex != other.complex {
            return Err(Error::usage(
                "elements of different twisted complexes".to_string(),
            ));
        }
        let mut out = self.clone();
        for (&n, v) in &other.comps {
            let w = out
                .comps
                .entry(n)
                .or_insert_with(|| vec![Scalar::zero(); v.len()]);
            for (i, c) in v.iter().enumerate() {
                w[i] += c.clone();
            }
        }
        out.prune();
        Ok(out)
    }

    pub fn sub(&self, other: &TwElement) -> Result<TwElement, Error> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> TwElement {
        self.scale(&-Scalar::one())
    }

    pub fn scale(&self, s: &Scalar) -> TwElement {
        let mut out = TwElement {
            complex: self.complex,
            comps: BTreeMap::new(),
        };
        if s.is_zero() {
            return out;
        }
        for (&n, v) in &self.comps {
            out.comps.insert(n, v.iter().map(|c| c * s).collect());
        }
        out
    }
}
