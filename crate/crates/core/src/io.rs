//! JSON file formats for models, Maurer–Cartan data, 2-forms, and group
//! representations, plus the built-in datasets addressable as
//! `builtin:<name>`.
//!
//! Paths inside a data file (its `model` field) resolve relative to the
//! directory of that file; paths passed directly resolve relative to the
//! caller-supplied base directory.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use serde::de::DeserializeOwned;
use serde::Deserialize;

use crate::error::Error;
use crate::exact_linalg::Scalar;
use crate::graded_cdga::models;
use crate::graded_cdga::presentation::ModelPresentation;
use crate::graded_cdga::{Element, FiniteCdga};
use crate::jet_group::{GroupPresentation, JetMap, JetRepresentation};
use crate::mc::MaurerCartanData;
use crate::symplectic::AlgebroidTwoForm;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GeneratorSpec {
    name: String,
    degree: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Poly0Spec {
    vars: Vec<String>,
    truncation: Option<usize>,
}

/// `{"name": …, "generators": [{"name","degree"}…], "differential": {gen:
/// expr}, "relations": [expr…], "poly0": {"vars": […], "truncation": n}}`
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    name: Option<String>,
    generators: Vec<GeneratorSpec>,
    #[serde(default)]
    differential: BTreeMap<String, String>,
    #[serde(default)]
    relations: Vec<String>,
    poly0: Option<Poly0Spec>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ModelRef {
    Spec(String),
    Inline(ModelFile),
}

/// `{"k": n, "model": "builtin:…"|"path"|{inline}, "gamma": expr?,
/// "etas": {"1": expr, …}}`
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct McFile {
    k: usize,
    model: ModelRef,
    gamma: Option<String>,
    #[serde(default)]
    etas: BTreeMap<String, String>,
}

/// `{"beta": expr?, "alphas": {"0": expr, …}, "fibre_vars": […]}`
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FormFile {
    beta: Option<String>,
    #[serde(default)]
    alphas: BTreeMap<String, String>,
    #[serde(default)]
    fibre_vars: Vec<String>,
}

/// `{"l": n, "k": n, "generators": ["f"…], "relations": [["f","g","f^-1",
/// "g^-1"]…], "images": {"f": [component…]}}`
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RepFile {
    l: usize,
    k: usize,
    generators: Vec<String>,
    #[serde(default)]
    relations: Vec<Vec<String>>,
    images: BTreeMap<String, Vec<String>>,
}

fn read(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::usage(format!("cannot read {}: {e}", path.display())))
}

fn parse_json<T: DeserializeOwned>(text: &str, path: &Path) -> Result<T, Error> {
    serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        col: e.column(),
        message: format!("{}: {e}", path.display()),
    })
}

fn compile_model_file(file: ModelFile, fallback_name: &str) -> Result<Arc<FiniteCdga>, Error> {
    let mut p = ModelPresentation::new(file.name.as_deref().unwrap_or(fallback_name));
    for g in file.generators {
        p.add_generator(&g.name, g.degree);
    }
    for (gen, rule) in file.differential {
        p.set_differential(&gen, &rule);
    }
    for r in file.relations {
        p.add_relation(&r);
    }
    if let Some(poly0) = file.poly0 {
        for v in poly0.vars {
            p.add_poly0_var(&v);
        }
        if let Some(t) = poly0.truncation {
            p.truncation = t;
        }
    }
    p.compile()
}

fn builtin_model(name: &str) -> Result<Arc<FiniteCdga>, Error> {
    let parts: Vec<&str> = name.split(':').collect();
    match parts.as_slice() {
        ["heisenberg"] => Ok(models::heisenberg_ce()),
        ["torus", n] => {
            let n: usize = n
                .parse()
                .map_err(|_| Error::usage(format!("bad torus rank {n:?}")))?;
            if n == 0 || n > 8 {
                return Err(Error::usage("torus rank must be 1..=8".to_string()));
            }
            Ok(models::torus_ce(n))
        }
        ["genus-ring", g] => {
            let g: usize = g
                .parse()
                .map_err(|_| Error::usage(format!("bad genus {g:?}")))?;
            if g == 0 || g > 8 {
                return Err(Error::usage("genus must be 1..=8".to_string()));
            }
            Ok(models::genus_surface_ring(g))
        }
        ["ce", k] => {
            let k: usize = k
                .parse()
                .map_err(|_| Error::usage(format!("bad order {k:?}")))?;
            crate::universal::ce_algebra(k)
        }
        ["genus1-symplectic"] => Ok(models::torus_with_fibre(2)),
        _ => Err(Error::usage(format!("unknown builtin model {name:?}"))),
    }
}

/// Loads a model from `builtin:<name>` or a JSON file path.
pub fn resolve_model(spec: &str, base: &Path) -> Result<Arc<FiniteCdga>, Error> {
    if let Some(name) = spec.strip_prefix("builtin:") {
        return builtin_model(name);
    }
    let path = base.join(spec);
    let file: ModelFile = parse_json(&read(&path)?, &path)?;
    let fallback = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("model")
        .to_string();
    compile_model_file(file, &fallback)
}

fn parse_optional(model: &Arc<FiniteCdga>, expr: Option<&str>) -> Result<Element, Error> {
    match expr {
        None => Ok(model.zero()),
        Some(s) => model.parse_element(s),
    }
}

/// Genus-`g` order-3 data from per-handle quadruples `(x, y, w, z)`:
/// `η_1 = Σ xᵢaᵢ + yᵢbᵢ`, `η_2 = Σ wᵢaᵢ + zᵢbᵢ`.
pub fn genus_data(g: usize, params: &[Scalar]) -> Result<MaurerCartanData, Error> {
    if g == 0 || g > 8 {
        return Err(Error::usage("genus must be 1..=8".to_string()));
    }
    if params.len() != 4 * g {
        return Err(Error::usage(format!(
            "genus-{g} data needs {} parameters (x,y,w,z per handle), got {}",
            4 * g,
            params.len()
        )));
    }
    let m = models::genus_surface_ring(g);
    let mut eta1 = m.zero();
    let mut eta2 = m.zero();
    for i in 0..g {
        let a = m.basis_element(1, i);
        let b = m.basis_element(1, g + i);
        eta1 = eta1.add(&a.scale(&params[4 * i]))?;
        eta1 = eta1.add(&b.scale(&params[4 * i + 1]))?;
        eta2 = eta2.add(&a.scale(&params[4 * i + 2]))?;
        eta2 = eta2.add(&b.scale(&params[4 * i + 3]))?;
    }
    let gamma = m.zero();
    MaurerCartanData::new(m, 3, gamma, vec![eta1, eta2])
}

fn builtin_mc(name: &str) -> Result<MaurerCartanData, Error> {
    if name == "heisenberg-b5" {
        let h = models::heisenberg_ce();
        let etas = vec![
            h.parse_element("a")?,
            h.parse_element("b")?,
            h.parse_element("-c")?,
        ];
        let gamma = h.zero();
        return MaurerCartanData::new(h, 4, gamma, etas);
    }
    if name == "torus-k3" {
        let t = models::torus_ce(2);
        let etas = vec![t.parse_element("a1")?, t.parse_element("a2")?];
        let gamma = t.zero();
        return MaurerCartanData::new(t, 3, gamma, etas);
    }
    if name == "genus1-symp" {
        let m = models::torus_with_fibre(2);
        let etas = vec![m.parse_element("a")?, m.parse_element("b")?];
        let gamma = m.zero();
        return MaurerCartanData::new(m, 3, gamma, etas);
    }
    if let Some(rest) = name.strip_prefix("genus:") {
        let (g, params) = rest
            .split_once(':')
            .ok_or_else(|| Error::usage("expected builtin:genus:<g>:<x,y,w,z,…>".to_string()))?;
        let g: usize = g
            .parse()
            .map_err(|_| Error::usage(format!("bad genus {g:?}")))?;
        let params = params
            .split(',')
            .map(|s| Scalar::parse(s.trim()))
            .collect::<Result<Vec<_>, _>>()?;
        return genus_data(g, &params);
    }
    Err(Error::usage(format!("unknown builtin dataset {name:?}")))
}

/// Loads Maurer–Cartan data from `builtin:<name>` or a JSON file path.
pub fn load_mc(spec: &str, base: &Path) -> Result<MaurerCartanData, Error> {
    if let Some(name) = spec.strip_prefix("builtin:") {
        return builtin_mc(name);
    }
    let path = base.join(spec);
    let file: McFile = parse_json(&read(&path)?, &path)?;
    let dir = path.parent().unwrap_or(Path::new(".")).to_path_buf();
    let model = match file.model {
        ModelRef::Spec(s) => resolve_model(&s, &dir)?,
        ModelRef::Inline(m) => compile_model_file(m, "model")?,
    };
    let gamma = parse_optional(&model, file.gamma.as_deref())?;
    let mut etas = vec![model.zero(); file.k.saturating_sub(1)];
    for (key, expr) in &file.etas {
        let i: usize = key
            .parse()
            .map_err(|_| Error::usage(format!("bad structure-form index {key:?}")))?;
        if i == 0 || i >= file.k {
            return Err(Error::usage(format!(
                "structure-form index {i} out of range 1..={}",
                file.k.saturating_sub(1)
            )));
        }
        etas[i - 1] = model.parse_element(expr)?;
    }
    MaurerCartanData::new(model, file.k, gamma, etas)
}

fn builtin_form(name: &str, data: &MaurerCartanData) -> Result<AlgebroidTwoForm, Error> {
    if name == "genus1-symp" {
        let m = data.model();
        return AlgebroidTwoForm::new(
            m,
            m.parse_element("a*b")?,
            vec![
                m.zero(),
                m.parse_element("-u*b")?,
                m.parse_element("-2*u*a")?,
                m.parse_element("du")?,
            ],
            vec![],
        );
    }
    Err(Error::usage(format!("unknown builtin 2-form {name:?}")))
}

/// Loads a 2-form from `builtin:<name>` or a JSON file path; expressions
/// are parsed against the model of `data`.
pub fn load_form(
    spec: &str,
    base: &Path,
    data: &MaurerCartanData,
) -> Result<AlgebroidTwoForm, Error> {
    if let Some(name) = spec.strip_prefix("builtin:") {
        return builtin_form(name, data);
    }
    let path = base.join(spec);
    let file: FormFile = parse_json(&read(&path)?, &path)?;
    let model = data.model();
    let beta = parse_optional(model, file.beta.as_deref())?;
    let mut alphas = vec![model.zero(); data.k() + 1];
    for (key, expr) in &file.alphas {
        let r: usize = key
            .parse()
            .map_err(|_| Error::usage(format!("bad alpha index {key:?}")))?;
        if r > data.k() {
            return Err(Error::usage(format!(
                "alpha index {r} exceeds the data order {}",
                data.k()
            )));
        }
        alphas[r] = model.parse_element(expr)?;
    }
    AlgebroidTwoForm::new(model, beta, alphas, file.fibre_vars)
}

/// Loads a finitely-presented-group representation from a JSON file.
pub fn load_rep(spec: &str, base: &Path) -> Result<JetRepresentation, Error> {
    let path = base.join(spec);
    let file: RepFile = parse_json(&read(&path)?, &path)?;
    let pres = GroupPresentation::parse(file.generators.clone(), file.relations)?;
    let mut images = Vec::with_capacity(file.generators.len());
    for g in &file.generators {
        let comps = file
            .images
            .get(g)
            .ok_or_else(|| Error::usage(format!("no image given for generator {g:?}")))?;
        images.push(JetMap::parse(file.l, file.k, comps)?);
    }
    JetRepresentation::new(pres, file.l, file.k, images)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_datasets_load_and_validate() {
        let base = Path::new(".");
        let h = load_mc("builtin:heisenberg-b5", base).unwrap();
        assert_eq!(h.k(), 4);
        assert!(h.mc_check().unwrap().passed());

        let t = load_mc("builtin:torus-k3", base).unwrap();
        assert_eq!(t.k(), 3);
        assert!(t.mc_check().unwrap().passed());

        let g = load_mc("builtin:genus:2:1,2,3,4,5,6,7,8", base).unwrap();
        assert_eq!(g.k(), 3);
        assert!(g.mc_check().unwrap().passed());

        let s = load_mc("builtin:genus1-symp", base).unwrap();
        let form = load_form("builtin:genus1-symp", base, &s).unwrap();
        assert!(crate::symplectic::symp_check_closed(&form, &s)
            .unwrap()
            .passed());

        assert!(load_mc("builtin:nope", base).is_err());
        assert!(resolve_model("builtin:torus:0", base).is_err());
    }

    #[test]
    fn files_round_trip() {
        let dir = std::env::temp_dir().join("jetfol-io-test");
        std::fs::create_dir_all(&dir).unwrap();

        std::fs::write(
            dir.join("model.json"),
            r#"{
                "name": "heis",
                "generators": [
                    {"name": "a", "degree": 1},
                    {"name": "b", "degree": 1},
                    {"name": "c", "degree": 1}
                ],
                "differential": {"c": "a*b"}
            }"#,
        )
        .unwrap();
        std::fs::write(
            dir.join("data.json"),
            r#"{
                "k": 4,
                "model": "model.json",
                "etas": {"1": "a", "2": "b", "3": "-c"}
            }"#,
        )
        .unwrap();
        std::fs::write(
            dir.join("rep.json"),
            r#"{
                "l": 1, "k": 1,
                "generators": ["f", "g"],
                "relations": [["f", "g", "f^-1", "g^-1"]],
                "images": {"f": ["2*z1"], "g": ["3*z1"]}
            }"#,
        )
        .unwrap();

        let data = load_mc("data.json", &dir).unwrap();
        assert_eq!(data.model().name(), "heis");
        assert_eq!(data.twisted_betti().unwrap(), vec![0, 2, 5, 5, 2]);

        let rep = load_rep("rep.json", &dir).unwrap();
        assert!(rep.validate().unwrap().ok());

        // parse errors carry a position, missing files are usage errors
        std::fs::write(dir.join("broken.json"), "{ not json").unwrap();
        match load_mc("broken.json", &dir) {
            Err(Error::Parse { line, .. }) => assert!(line >= 1),
            other => panic!("expected parse error, got {other:?}"),
        }
        assert!(matches!(
            load_mc("missing.json", &dir),
            Err(Error::Usage(_))
        ));
    }
}
