//! Finite commutative differential graded algebras over the rationals.
//!
//! A [`FiniteCdga`] is a finite-dimensional non-negatively graded algebra
//! given by an explicit basis in each degree, a full multiplication table
//! and one differential matrix per degree. Algebras are built either from a
//! [`presentation::ModelPresentation`] (odd generators, optional truncated
//! degree-0 polynomial variables, monomial relations) or directly from
//! tables ([`FiniteCdga::from_table`], used for the genus-g surface ring
//! whose even two-class is not a monomial).
//!
//! Construction always runs the validator: unit, graded commutativity,
//! associativity, `d² = 0`, and the Leibniz rule. When a degree-0 truncation
//! is present, Leibniz is only checked on pairs of monomials whose product
//! survives the truncation ideal (the differential lowers polynomial degree,
//! so on the discarded pairs the rule is genuinely meaningless); the report
//! records how many pairs were skipped.

pub mod models;
pub mod presentation;

use std::collections::BTreeMap;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::error::Error;
use crate::exact_linalg::{subquotient, Matrix, Scalar, Subquotient};
use crate::expr::parse_expression;

/// One basis monomial (or table-supplied basis vector) of the algebra.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BasisElem {
    name: String,
    /// Exponents over the algebra's poly0 variables (empty when none).
    poly0: Vec<usize>,
    /// Strictly increasing generator-index word; `None` for table bases.
    word: Option<Vec<usize>>,
}

impl BasisElem {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn poly0_degree(&self) -> usize {
        self.poly0.iter().sum()
    }

    pub(crate) fn table(name: impl Into<String>) -> Self {
        BasisElem {
            name: name.into(),
            poly0: Vec::new(),
            word: None,
        }
    }

    pub(crate) fn monomial(name: String, poly0: Vec<usize>, word: Vec<usize>) -> Self {
        BasisElem {
            name,
            poly0,
            word: Some(word),
        }
    }
}

impl std::fmt::Debug for FiniteCdga {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FiniteCdga")
            .field("name", &self.name)
            .field("id", &self.id)
            .field("dims", &self.dims())
            .finish_non_exhaustive()
    }
}

#[derive(Clone)]
pub struct FiniteCdga {
    name: String,
    id: u64,
    top_degree: usize,
    basis: Vec<Vec<BasisElem>>,
    generators: Vec<(String, usize)>,
    poly0_vars: Vec<String>,
    truncation: usize,
    unit_index: usize,
    /// `(d1, i1, d2, i2) -> [(index in degree d1+d2, coeff)]`; zero products
    /// are simply absent.
    products: BTreeMap<(usize, usize, usize, usize), Vec<(usize, Scalar)>>,
    /// `differentials[d] : degree d -> degree d+1`; the last entry has zero
    /// rows. Length `top_degree + 1`.
    differentials: Vec<Matrix>,
    /// `(poly0 exponents, word) -> (degree, index)`; only for monomial bases.
    index_of: BTreeMap<(Vec<usize>, Vec<usize>), (usize, usize)>,
    /// Any basis-element name -> (degree, index).
    name_index: BTreeMap<String, (usize, usize)>,
    leibniz_skipped: usize,
}

/// A (not necessarily homogeneous) algebra element, stored as dense
/// coefficient vectors per degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Element {
    algebra: u64,
    comps: BTreeMap<usize, Vec<Scalar>>,
}

/// Result of running the structural validator.
#[derive(Clone, Debug)]
pub struct ValidationReport {
    pub failures: Vec<String>,
    pub leibniz_checked: usize,
    pub leibniz_skipped: usize,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

impl FiniteCdga {
    /// Builds an algebra from explicit tables and validates it. `products`
    /// maps basis pairs to their expansion in degree `d1 + d2`; omitted pairs
    /// multiply to zero, except that the unit (degree 0, index `unit_index`)
    /// acts as identity automatically if omitted.
    pub fn from_table(
        name: impl Into<String>,
        basis_names: Vec<Vec<String>>,
        unit_index: usize,
        mut products: BTreeMap<(usize, usize, usize, usize), Vec<(usize, Scalar)>>,
        differentials: Vec<Matrix>,
    ) -> Result<Arc<FiniteCdga>, Error> {
        let name = name.into();
        if basis_names.is_empty() || basis_names[0].is_empty() {
            return Err(Error::usage("algebra needs a degree-0 space with a unit"));
        }
        let top = basis_names.len() - 1;
        if unit_index >= basis_names[0].len() {
            return Err(Error::usage("unit index out of range"));
        }
        let dims: Vec<usize> = basis_names.iter().map(|b| b.len()).collect();
        if differentials.len() != top + 1 {
            return Err(Error::usage(format!(
                "expected {} differential matrices, got {}",
                top + 1,
                differentials.len()
            )));
        }
        for d in 0..=top {
            let want_rows = if d == top { 0 } else { dims[d + 1] };
            if differentials[d].rows() != want_rows || differentials[d].cols() != dims[d] {
                return Err(Error::usage(format!(
                    "differential at degree {d} has shape {}x{}, expected {}x{}",
                    differentials[d].rows(),
                    differentials[d].cols(),
                    want_rows,
                    dims[d]
                )));
            }
        }
        // fill in unit products if the caller left them out
        for d in 0..=top {
            for i in 0..dims[d] {
                products
                    .entry((0, unit_index, d, i))
                    .or_insert_with(|| vec![(i, Scalar::one())]);
                products
                    .entry((d, i, 0, unit_index))
                    .or_insert_with(|| vec![(i, Scalar::one())]);
            }
        }
        for (&(d1, i1, d2, i2), entries) in &products {
            let dt = d1 + d2;
            if d1 > top || d2 > top || i1 >= dims[d1] || i2 >= dims[d2] {
                return Err(Error::usage("product table key out of range"));
            }
            if dt > top && !entries.is_empty() {
                return Err(Error::usage(
                    "product table entry above the top degree must be empty",
                ));
            }
            for (j, _) in entries {
                if dt > top || *j >= dims[dt] {
                    return Err(Error::usage("product table value out of range"));
                }
            }
        }
        products.retain(|_, v| !v.is_empty());

        let basis: Vec<Vec<BasisElem>> = basis_names
            .into_iter()
            .map(|names| names.into_iter().map(BasisElem::table).collect())
            .collect();
        let alg = FiniteCdga {
            name,
            id: 0,
            top_degree: top,
            basis,
            generators: Vec::new(),
            poly0_vars: Vec::new(),
            truncation: 0,
            unit_index,
            products,
            differentials,
            index_of: BTreeMap::new(),
            name_index: BTreeMap::new(),
            leibniz_skipped: 0,
        };
        alg.finish_construction()
    }

    /// Shared tail of both construction paths: index maps, structural id,
    /// full validation.
    pub(crate) fn finish_construction(mut self) -> Result<Arc<FiniteCdga>, Error> {
        self.name_index.clear();
        self.index_of.clear();
        for (d, elems) in self.basis.iter().enumerate() {
            for (i, e) in elems.iter().enumerate() {
                self.name_index.insert(e.name.clone(), (d, i));
                if let Some(w) = &e.word {
                    self.index_of.insert((e.poly0.clone(), w.clone()), (d, i));
                }
            }
        }
        self.id = self.structural_id();
        let report = self.validate();
        self.leibniz_skipped = report.leibniz_skipped;
        if !report.ok() {
            return Err(Error::Validation(format!(
                "algebra {:?} failed validation: {}",
                self.name,
                report.failures.join("; ")
            )));
        }
        Ok(Arc::new(self))
    }

    fn structural_id(&self) -> u64 {
        let mut h = std::collections::hash_map::DefaultHasher::new();
        self.name.hash(&mut h);
        self.top_degree.hash(&mut h);
        self.poly0_vars.hash(&mut h);
        self.truncation.hash(&mut h);
        for elems in &self.basis {
            for e in elems {
                e.hash(&mut h);
            }
        }
        for (k, v) in &self.products {
            k.hash(&mut h);
            for (j, c) in v {
                j.hash(&mut h);
                c.hash(&mut h);
            }
        }
        for m in &self.differentials {
            for r in 0..m.rows() {
                for c in 0..m.cols() {
                    let v = m.get(r, c);
                    if !v.is_zero() {
                        (r, c).hash(&mut h);
                        v.hash(&mut h);
                    }
                }
            }
        }
        h.finish()
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn top_degree(&self) -> usize {
        self.top_degree
    }

    pub fn dim(&self, degree: usize) -> usize {
        self.basis.get(degree).map_or(0, |b| b.len())
    }

    pub fn dims(&self) -> Vec<usize> {
        self.basis.iter().map(|b| b.len()).collect()
    }

    pub fn basis_elems(&self, degree: usize) -> &[BasisElem] {
        self.basis.get(degree).map_or(&[], |b| b.as_slice())
    }

    pub fn generators(&self) -> &[(String, usize)] {
        &self.generators
    }

    pub fn poly0_vars(&self) -> &[String] {
        &self.poly0_vars
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn leibniz_skipped(&self) -> usize {
        self.leibniz_skipped
    }

    pub fn differential_matrix(&self, degree: usize) -> Matrix {
        self.differentials
            .get(degree)
            .cloned()
            .unwrap_or_else(|| Matrix::new(0, self.dim(degree)))
    }

    pub fn zero(&self) -> Element {
        Element {
            algebra: self.id,
            comps: BTreeMap::new(),
        }
    }

    pub fn unit(&self) -> Element {
        self.basis_element(0, self.unit_index)
    }

    pub fn basis_element(&self, degree: usize, index: usize) -> Element {
        assert!(index < self.dim(degree), "basis index out of range");
        let mut v = vec![Scalar::zero(); self.dim(degree)];
        v[index] = Scalar::one();
        self.element_from_coords(degree, v)
    }

    pub fn element_from_coords(&self, degree: usize, coords: Vec<Scalar>) -> Element {
        assert_eq!(coords.len(), self.dim(degree), "coordinate length mismatch");
        let mut comps = BTreeMap::new();
        if coords.iter().any(|c| !c.is_zero()) {
            comps.insert(degree, coords);
        }
        Element {
            algebra: self.id,
            comps,
        }
    }

    fn check_owned(&self, x: &Element) -> Result<(), Error> {
        if x.algebra != self.id {
            return Err(Error::usage(
                "element does not belong to this algebra".to_string(),
            ));
        }
        Ok(())
    }

    pub fn multiply(&self, x: &Element, y: &Element) -> Result<Element, Error> {
        self.check_owned(x)?;
        self.check_owned(y)?;
        let mut out = self.zero();
        for (&d1, v1) in &x.comps {
            for (&d2, v2) in &y.comps {
                if d1 + d2 > self.top_degree {
                    continue;
                }
                let dt = d1 + d2;
                for (i1, c1) in v1.iter().enumerate() {
                    if c1.is_zero() {
                        continue;
                    }
                    for (i2, c2) in v2.iter().enumerate() {
                        if c2.is_zero() {
                            continue;
                        }
                        if let Some(entries) = self.products.get(&(d1, i1, d2, i2)) {
                            let f = c1 * c2;
                            for (j, coef) in entries {
                                out.add_in(dt, *j, coef * &f, self.dim(dt));
                            }
                        }
                    }
                }
            }
        }
        out.prune();
        Ok(out)
    }

    pub fn differential(&self, x: &Element) -> Result<Element, Error> {
        self.check_owned(x)?;
        let mut out = self.zero();
        for (&d, v) in &x.comps {
            if d >= self.top_degree {
                continue;
            }
            let img = self.differentials[d].mul_vec(v)?;
            for (j, c) in img.into_iter().enumerate() {
                if !c.is_zero() {
                    out.add_in(d + 1, j, c, self.dim(d + 1));
                }
            }
        }
        out.prune();
        Ok(out)
    }

    /// Matrix of `x -> g ∧ x` from `degree` to `degree + |g|` for a
    /// homogeneous `g`.
    pub fn left_wedge_matrix(&self, g: &Element, degree: usize) -> Result<Matrix, Error> {
        self.check_owned(g)?;
        let gd = g
            .degree()
            .ok_or_else(|| Error::usage("left factor must be homogeneous and nonzero"))?;
        let target = degree + gd;
        let rows = self.dim(target);
        let mut m = Matrix::new(rows, self.dim(degree));
        for i in 0..self.dim(degree) {
            let prod = self.multiply(g, &self.basis_element(degree, i))?;
            for (j, c) in prod.coords(target, rows).into_iter().enumerate() {
                if !c.is_zero() {
                    m.set(j, i, c);
                }
            }
        }
        Ok(m)
    }

    /// Betti numbers of `(C, d)`, one per degree `0..=top_degree`.
    pub fn betti(&self) -> Result<Vec<usize>, Error> {
        (0..=self.top_degree)
            .map(|d| Ok(self.subquotient_at(d)?.dim()))
            .collect()
    }

    /// `ker(d_d) / im(d_{d-1})` with deterministic representatives.
    pub fn subquotient_at(&self, degree: usize) -> Result<Subquotient, Error> {
        let z = self.differential_matrix(degree);
        let b = if degree == 0 {
            Matrix::new(self.dim(0), 0)
        } else {
            self.differential_matrix(degree - 1)
        };
        subquotient(&z, &b)
    }

    /// Differential matrices of the weight-`w` twisted complex
    /// `(C, d + w·γ∧)`. Requires `γ` homogeneous of degree 1 and closed.
    pub fn twisted_differentials(
        &self,
        gamma: &Element,
        weight: i64,
    ) -> Result<Vec<Matrix>, Error> {
        self.check_owned(gamma)?;
        if !gamma.is_zero() && gamma.degree() != Some(1) {
            return Err(Error::usage("twist form must be homogeneous of degree 1"));
        }
        if !self.differential(gamma)?.is_zero() {
            return Err(Error::validation("twist form is not closed"));
        }
        let w = int_scalar(weight);
        let mut out = Vec::with_capacity(self.top_degree + 1);
        for d in 0..=self.top_degree {
            let mut m = self.differential_matrix(d);
            if !gamma.is_zero() && !w.is_zero() && d + 1 <= self.top_degree {
                m = m.add(&self.left_wedge_matrix(gamma, d)?.scale(&w))?;
            }
            out.push(m);
        }
        for d in 0..self.top_degree {
            if !out[d + 1].mul(&out[d])?.is_zero() {
                return Err(Error::internal(
                    "twisted differential does not square to zero".to_string(),
                ));
            }
        }
        Ok(out)
    }

    /// Betti numbers of the weight-`w` twisted complex.
    pub fn twisted_betti_weight(&self, gamma: &Element, weight: i64) -> Result<Vec<usize>, Error> {
        let mats = self.twisted_differentials(gamma, weight)?;
        let mut out = Vec::with_capacity(self.top_degree + 1);
        for d in 0..=self.top_degree {
            let b = if d == 0 {
                Matrix::new(self.dim(0), 0)
            } else {
                mats[d - 1].clone()
            };
            out.push(subquotient(&mats[d], &b)?.dim());
        }
        Ok(out)
    }

    /// Evaluates some poly0 variables at rational values. Unassigned
    /// variables survive; assigning a name that is not a poly0 variable is a
    /// usage error.
    pub fn evaluate_vars(
        &self,
        x: &Element,
        assign: &BTreeMap<String, Scalar>,
    ) -> Result<Element, Error> {
        self.check_owned(x)?;
        if assign.is_empty() {
            return Ok(x.clone());
        }
        let mut var_idx = Vec::new();
        for name in assign.keys() {
            match self.poly0_vars.iter().position(|v| v == name) {
                Some(i) => var_idx.push((i, assign[name].clone())),
                None => {
                    return Err(Error::usage(format!(
                        "{name:?} is not a poly0 variable of algebra {:?}",
                        self.name
                    )))
                }
            }
        }
        let mut out = self.zero();
        for (&d, v) in &x.comps {
            for (i, c) in v.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let be = &self.basis[d][i];
                let word = be.word.clone().ok_or_else(|| {
                    Error::usage("algebra basis has no monomial structure to evaluate".to_string())
                })?;
                let mut coeff = c.clone();
                let mut poly0 = be.poly0.clone();
                for (vi, value) in &var_idx {
                    let e = poly0[*vi];
                    if e > 0 {
                        coeff = coeff * value.pow(e as u32);
                        poly0[*vi] = 0;
                    }
                }
                if coeff.is_zero() {
                    continue;
                }
                let &(dt, it) = self.index_of.get(&(poly0, word)).ok_or_else(|| {
                    Error::internal("evaluation target monomial missing from basis".to_string())
                })?;
                debug_assert_eq!(dt, d);
                out.add_in(dt, it, coeff, self.dim(dt));
            }
        }
        out.prune();
        Ok(out)
    }

    /// Parses an element expression; identifiers are basis-element names
    /// (which for compiled algebras include generators and poly0 variables).
    pub fn parse_element(&self, src: &str) -> Result<Element, Error> {
        let terms = parse_expression(src)?;
        let mut out = self.zero();
        for t in terms {
            let mut acc = self.unit();
            for f in &t.factors {
                let &(d, i) = self.name_index.get(f).ok_or_else(|| {
                    Error::usage(format!(
                        "unknown name {f:?} in algebra {:?} (known: generators, poly0 \
                         variables and basis monomials)",
                        self.name
                    ))
                })?;
                acc = self.multiply(&acc, &self.basis_element(d, i))?;
            }
            out = out.add(&acc.scale(&t.coeff))?;
        }
        Ok(out)
    }

    /// Renders an element using basis-element names.
    pub fn display(&self, x: &Element) -> String {
        if x.algebra != self.id {
            return "<foreign element>".to_string();
        }
        let mut parts: Vec<(Scalar, String)> = Vec::new();
        for (&d, v) in &x.comps {
            for (i, c) in v.iter().enumerate() {
                if !c.is_zero() {
                    parts.push((c.clone(), self.basis[d][i].name.clone()));
                }
            }
        }
        render_linear_combination(parts)
    }

    /// Structural validator; construction fails unless this passes.
    pub fn validate(&self) -> ValidationReport {
        let mut failures = Vec::new();
        let mut leibniz_checked = 0usize;
        let mut leibniz_skipped = 0usize;
        let top = self.top_degree;

        // unit
        let unit = self.unit();
        'unit: for d in 0..=top {
            for i in 0..self.dim(d) {
                let e = self.basis_element(d, i);
                let left = self.multiply(&unit, &e).unwrap_or_else(|_| self.zero());
                let right = self.multiply(&e, &unit).unwrap_or_else(|_| self.zero());
                if left != e || right != e {
                    failures.push(format!("unit fails on basis element {d}:{i}"));
                    break 'unit;
                }
            }
        }

        // graded commutativity
        for d1 in 0..=top {
            for d2 in d1..=top {
                if d1 + d2 > top {
                    continue;
                }
                for i1 in 0..self.dim(d1) {
                    for i2 in 0..self.dim(d2) {
                        let x = self.basis_element(d1, i1);
                        let y = self.basis_element(d2, i2);
                        let xy = self.multiply(&x, &y).unwrap();
                        let mut yx = self.multiply(&y, &x).unwrap();
                        if d1 * d2 % 2 == 1 {
                            yx = yx.neg();
                        }
                        if xy != yx {
                            failures.push(format!(
                                "graded commutativity fails on ({d1}:{i1}, {d2}:{i2})"
                            ));
                        }
                    }
                }
            }
        }

        // associativity
        'assoc: for d1 in 0..=top {
            for d2 in 0..=top {
                for d3 in 0..=top {
                    if d1 + d2 + d3 > top {
                        continue;
                    }
                    for i1 in 0..self.dim(d1) {
                        for i2 in 0..self.dim(d2) {
                            for i3 in 0..self.dim(d3) {
                                let x = self.basis_element(d1, i1);
                                let y = self.basis_element(d2, i2);
                                let z = self.basis_element(d3, i3);
                                let a = self.multiply(&self.multiply(&x, &y).unwrap(), &z).unwrap();
                                let b = self.multiply(&x, &self.multiply(&y, &z).unwrap()).unwrap();
                                if a != b {
                                    failures.push(format!(
                                        "associativity fails on ({d1}:{i1}, {d2}:{i2}, {d3}:{i3})"
                                    ));
                                    break 'assoc;
                                }
                            }
                        }
                    }
                }
            }
        }

        // d^2 = 0
        for d in 0..top {
            match self.differentials[d + 1].mul(&self.differentials[d]) {
                Ok(m) if m.is_zero() => {}
                _ => failures.push(format!("d^2 != 0 out of degree {d}")),
            }
        }

        // Leibniz, with the truncation-aware skip rule
        for d1 in 0..=top {
            for d2 in 0..=top {
                if d1 + d2 > top {
                    continue;
                }
                for i1 in 0..self.dim(d1) {
                    for i2 in 0..self.dim(d2) {
                        let b1 = &self.basis[d1][i1];
                        let b2 = &self.basis[d2][i2];
                        if self.truncation > 0
                            && b1.poly0_degree() + b2.poly0_degree() > self.truncation
                        {
                            leibniz_skipped += 1;
                            continue;
                        }
                        leibniz_checked += 1;
                        let x = self.basis_element(d1, i1);
                        let y = self.basis_element(d2, i2);
                        let lhs = self.differential(&self.multiply(&x, &y).unwrap()).unwrap();
                        let mut rhs = self
                            .multiply(&self.differential(&x).unwrap(), &y)
                            .unwrap()
                            .add(&{
                                let t = self.multiply(&x, &self.differential(&y).unwrap()).unwrap();
                                if d1 % 2 == 1 {
                                    t.neg()
                                } else {
                                    t
                                }
                            })
                            .unwrap();
                        rhs.prune();
                        if lhs != rhs {
                            failures.push(format!("Leibniz fails on ({d1}:{i1}, {d2}:{i2})"));
                        }
                    }
                }
            }
        }

        ValidationReport {
            failures,
            leibniz_checked,
            leibniz_skipped,
        }
    }
}

pub(crate) fn int_scalar(n: i64) -> Scalar {
    Scalar::from_int(n)
}

/// Renders `coeff * name` terms joined with signs; empty name means the
/// coefficient stands alone.
pub(crate) fn render_linear_combination(parts: Vec<(Scalar, String)>) -> String {
    if parts.is_empty() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (idx, (c, name)) in parts.iter().enumerate() {
        let neg = c.is_negative();
        let mag = if neg { -c } else { c.clone() };
        let body = if name == "1" || name.is_empty() {
            mag.to_string()
        } else if mag.is_one() {
            name.clone()
        } else {
            format!("{mag}*{name}")
        };
        if idx == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        out.push_str(&body);
    }
    out
}

impl Element {
    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    /// The degree when homogeneous and nonzero; `None` otherwise.
    pub fn degree(&self) -> Option<usize> {
        if self.comps.len() == 1 {
            self.comps.keys().next().copied()
        } else {
            None
        }
    }

    pub fn algebra_id(&self) -> u64 {
        self.algebra
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.comps.keys().copied().collect()
    }

    /// Dense coordinates in the given degree, padded to `dim`.
    pub fn coords(&self, degree: usize, dim: usize) -> Vec<Scalar> {
        match self.comps.get(&degree) {
            Some(v) => {
                debug_assert_eq!(v.len(), dim);
                v.clone()
            }
            None => vec![Scalar::zero(); dim],
        }
    }

    fn add_in(&mut self, degree: usize, index: usize, value: Scalar, dim: usize) {
        let v = self
            .comps
            .entry(degree)
            .or_insert_with(|| vec![Scalar::zero(); dim]);
        v[index] += value;
    }

    pub(crate) fn prune(&mut self) {
        self.comps.retain(|_, v| v.iter().any(|c| !c.is_zero()));
    }

    pub fn add(&self, other: &Element) -> Result<Element, Error> {
        if self.algebra != other.algebra {
            return Err(Error::usage("elements of different algebras".to_string()));
        }
        let mut out = self.clone();
        for (&d, v) in &other.comps {
            let dim = v.len();
            for (i, c) in v.iter().enumerate() {
                if !c.is_zero() {
                    out.add_in(d, i, c.clone(), dim);
                }
            }
        }
        out.prune();
        Ok(out)
    }

    pub fn sub(&self, other: &Element) -> Result<Element, Error> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Element {
        self.scale(&-Scalar::one())
    }

    pub fn scale(&self, s: &Scalar) -> Element {
        let mut out = Element {
            algebra: self.algebra,
            comps: BTreeMap::new(),
        };
        if s.is_zero() {
            return out;
        }
        for (&d, v) in &self.comps {
            out.comps.insert(d, v.iter().map(|c| c * s).collect());
        }
        out
    }
}
