//! `jetfol` — batch front end for the engine.
//!
//! Exit codes: 0 success, 1 mathematical negative (failed check, obstructed
//! lift, nontrivial class under `--expect-trivial`), 2 usage or parse error,
//! 3 validation failure.
//!
//! All JSON output is compact, key-sorted, and newline-terminated so golden
//! files can compare byte-for-byte. `--format table` renders the same data
//! as an indented listing; setting `JETFOL_COLOR=1` adds ANSI bold to keys
//! (any other value, or unset, keeps tables plain).

use std::collections::BTreeMap;
use std::path::Path;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use jetfol_core::error::Error;
use jetfol_core::exact_linalg::Scalar;
use jetfol_core::extension::{self, SearchMode, DEFAULT_SEARCH_BUDGET};
use jetfol_core::io;
use jetfol_core::jet_group::{self, JetMap, LiftOutcome};
use jetfol_core::mc::CohomologyRing;
use jetfol_core::symplectic;
use jetfol_core::universal;

#[derive(Parser)]
#[command(
    name = "jetfol",
    version,
    about = "Exact cohomology of truncated jet algebras and twisted de Rham complexes"
)]
struct Cli {
    /// Output format: stable JSON or a human-readable table.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Subcommand)]
enum Command {
    /// Inspect a model: grading, differential, cohomology.
    #[command(subcommand)]
    Model(ModelCmd),
    /// Structure equations and the twisted complex they generate.
    #[command(subcommand)]
    Mc(McCmd),
    /// Obstruction classes and order-by-order extension.
    #[command(subcommand)]
    Ext(ExtCmd),
    /// Cohomology dimensions of the restricted algebroid.
    Gysin {
        /// Data file or builtin:<name>.
        #[arg(long)]
        data: String,
    },
    /// Closedness, restriction, nondegeneracy, and variation of 2-forms.
    #[command(subcommand)]
    Symp(SympCmd),
    /// Arithmetic in the truncated jet group.
    #[command(subcommand)]
    Jet(JetCmd),
    /// Finitely presented groups mapping into the jet group.
    #[command(subcommand)]
    Rep(RepCmd),
    /// The universal order-k algebra and its module.
    Universal {
        /// Truncation order (number of generators).
        #[arg(long)]
        k: usize,
        /// Shorthand for --format table.
        #[arg(long)]
        print: bool,
    },
}

#[derive(Subcommand)]
enum ModelCmd {
    /// Check grading, signs, d² = 0, and the Leibniz rule.
    Validate { model: String },
    /// Dimensions and Betti numbers.
    Betti { model: String },
}

#[derive(Subcommand)]
enum McCmd {
    /// Verify the structure equations; lists every violated order.
    Check {
        #[arg(long)]
        data: String,
    },
    /// Betti numbers of the twisted complex.
    TwistedBetti {
        #[arg(long)]
        data: String,
    },
    /// Betti numbers of the full algebroid complex.
    AlgebroidBetti {
        #[arg(long)]
        data: String,
    },
    /// Cohomology classes of the twisted complex and their nonzero products.
    Ring {
        #[arg(long)]
        data: String,
    },
    /// First page of the weight spectral sequence.
    E1 {
        #[arg(long)]
        data: String,
    },
}

#[derive(Subcommand)]
enum ExtCmd {
    /// The obstruction cocycle and whether it is a coboundary.
    Class {
        #[arg(long)]
        data: String,
        /// Exit 1 when the class is nontrivial.
        #[arg(long)]
        expect_trivial: bool,
    },
    /// Solve for the next structure form; exits 1 when obstructed.
    Extend {
        #[arg(long)]
        data: String,
    },
    /// Extend repeatedly as far as possible.
    Max {
        #[arg(long)]
        data: String,
        /// Stop once this order is reached.
        #[arg(long, default_value_t = 8)]
        k_max: usize,
        /// Comma-separated coefficients to search over in place of the
        /// greedy particular solution (e.g. "1,-1,1/2").
        #[arg(long)]
        grid: Option<String>,
        /// Node budget for the grid search.
        #[arg(long, default_value_t = DEFAULT_SEARCH_BUDGET)]
        budget: usize,
    },
}

#[derive(Subcommand)]
enum SympCmd {
    /// Verify the closedness system weight by weight.
    Check {
        #[arg(long)]
        data: String,
        #[arg(long)]
        form: String,
    },
    /// Restrict to the transverse family: the induced 2-form and top form.
    Restrict {
        #[arg(long)]
        data: String,
        #[arg(long)]
        form: String,
    },
    /// Determinant test on the kernel of the top form at sample points.
    Nondeg {
        #[arg(long)]
        data: String,
        #[arg(long)]
        form: String,
        /// Sample point, e.g. "u=0" or "u=1,v=1/2"; repeatable.
        /// Defaults to the all-zero point.
        #[arg(long = "at")]
        at: Vec<String>,
        /// Expected coframe dimension (defaults to the model's own).
        #[arg(long)]
        frame_dim: Option<usize>,
    },
    /// The variation class of the restricted family.
    Variation {
        #[arg(long)]
        data: String,
        #[arg(long)]
        form: String,
    },
}

#[derive(Subcommand)]
enum JetCmd {
    /// f ∘ g, truncated above order k. Components are comma-separated
    /// polynomials in z1..zl.
    Compose {
        #[arg(long)]
        l: usize,
        #[arg(long)]
        k: usize,
        f: String,
        g: String,
    },
    /// Group inverse.
    Invert {
        #[arg(long)]
        l: usize,
        #[arg(long)]
        k: usize,
        f: String,
    },
    /// Truncate to a lower order.
    Project {
        #[arg(long)]
        l: usize,
        #[arg(long)]
        k: usize,
        /// Target order.
        #[arg(long)]
        to: usize,
        f: String,
    },
    /// Obstruction cocycle of two candidate sections at order k.
    Cocycle {
        #[arg(long)]
        l: usize,
        #[arg(long)]
        k: usize,
        c1: String,
        c2: String,
    },
}

#[derive(Subcommand)]
enum RepCmd {
    /// Check that the images satisfy every relation.
    Validate {
        #[arg(long)]
        data: String,
    },
    /// Lift one order up; exits 1 when obstructed.
    Lift {
        #[arg(long)]
        data: String,
    },
}

struct Outcome {
    json: Value,
    exit: i32,
}

fn ok(json: Value) -> Result<Outcome, Error> {
    Ok(Outcome { json, exit: 0 })
}

fn with_exit(json: Value, exit: i32) -> Result<Outcome, Error> {
    Ok(Outcome { json, exit })
}

fn main() {
    std::process::exit(run());
}

fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let help = matches!(
                e.kind(),
                ErrorKind::DisplayHelp
                    | ErrorKind::DisplayVersion
                    | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand
            );
            let _ = e.print();
            return if help { 0 } else { 2 };
        }
    };
    let format = if matches!(cli.command, Command::Universal { print: true, .. }) {
        Format::Table
    } else {
        cli.format
    };
    match dispatch(cli.command) {
        Ok(out) => {
            match format {
                Format::Json => println!("{}", out.json),
                Format::Table => print!("{}", render_table(&out.json)),
            }
            out.exit
        }
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Usage(_) | Error::Parse { .. } => 2,
                _ => 3,
            }
        }
    }
}

fn dispatch(command: Command) -> Result<Outcome, Error> {
    let base = Path::new(".");
    match command {
        Command::Model(cmd) => run_model(cmd, base),
        Command::Mc(cmd) => run_mc(cmd, base),
        Command::Ext(cmd) => run_ext(cmd, base),
        Command::Gysin { data } => {
            let data = io::load_mc(&data, base)?;
            let g = data.gysin_betti()?;
            ok(json!({
                "dims": g.dims,
                "base_betti": g.base_betti,
                "line_betti": g.line_betti,
                "connecting_ranks": g.connecting_ranks,
            }))
        }
        Command::Symp(cmd) => run_symp(cmd, base),
        Command::Jet(cmd) => run_jet(cmd),
        Command::Rep(cmd) => run_rep(cmd, base),
        Command::Universal { k, .. } => run_universal(k),
    }
}

fn run_model(cmd: ModelCmd, base: &Path) -> Result<Outcome, Error> {
    match cmd {
        ModelCmd::Validate { model } => {
            let m = io::resolve_model(&model, base)?;
            let report = m.validate();
            let exit = if report.ok() { 0 } else { 3 };
            with_exit(
                json!({
                    "name": m.name(),
                    "ok": report.ok(),
                    "failures": report.failures,
                    "leibniz_checked": report.leibniz_checked,
                    "leibniz_skipped": report.leibniz_skipped,
                }),
                exit,
            )
        }
        ModelCmd::Betti { model } => {
            let m = io::resolve_model(&model, base)?;
            ok(json!({
                "name": m.name(),
                "dims": m.dims(),
                "betti": m.betti()?,
            }))
        }
    }
}

fn run_mc(cmd: McCmd, base: &Path) -> Result<Outcome, Error> {
    match cmd {
        McCmd::Check { data } => {
            let data = io::load_mc(&data, base)?;
            let report = data.mc_check()?;
            let model = data.model();
            let violations: Vec<Value> = report
                .violations
                .iter()
                .map(|v| json!({"order": v.order, "residual": model.display(&v.residual)}))
                .collect();
            let exit = if report.passed() { 0 } else { 1 };
            with_exit(
                json!({
                    "ok": report.passed(),
                    "gamma_closed": report.gamma_closed,
                    "violations": violations,
                }),
                exit,
            )
        }
        McCmd::TwistedBetti { data } => {
            let data = io::load_mc(&data, base)?;
            ok(json!({"betti": data.twisted_betti()?}))
        }
        McCmd::AlgebroidBetti { data } => {
            let data = io::load_mc(&data, base)?;
            ok(json!({"betti": data.algebroid_betti()?}))
        }
        McCmd::Ring { data } => {
            let data = io::load_mc(&data, base)?;
            let tc = data.build_twisted()?;
            let ring = CohomologyRing::new(&tc)?;
            let betti = ring.betti();
            let mut classes = Vec::new();
            for (n, &count) in betti.iter().enumerate() {
                for i in 0..count {
                    let rep = ring.representative(n, i)?;
                    classes.push(json!({
                        "degree": n,
                        "index": i,
                        "representative": tc.display(&rep),
                    }));
                }
            }
            let mut products = Vec::new();
            for p in ring.nonzero_products()? {
                let n = p.left.0 + p.right.0;
                let mut value = tc.zero();
                for (j, c) in p.coords.iter().enumerate() {
                    value = value.add(&ring.representative(n, j)?.scale(c))?;
                }
                products.push(json!({
                    "left": [p.left.0, p.left.1],
                    "right": [p.right.0, p.right.1],
                    "product": tc.display(&value),
                }));
            }
            ok(json!({"betti": betti, "classes": classes, "nonzero_products": products}))
        }
        McCmd::E1 { data } => {
            let data = io::load_mc(&data, base)?;
            let page = data.spectral_e1()?;
            ok(json!({
                "columns": page.columns,
                "mass": page.mass,
                "twisted_betti": page.twisted,
                "mass_dominates": page.mass_dominates,
                "euler_matches": page.euler_matches,
            }))
        }
    }
}

fn run_ext(cmd: ExtCmd, base: &Path) -> Result<Outcome, Error> {
    match cmd {
        ExtCmd::Class {
            data,
            expect_trivial,
        } => {
            let data = io::load_mc(&data, base)?;
            let class = extension::extension_class(&data)?;
            let model = data.model();
            let exit = if expect_trivial && !class.trivial {
                1
            } else {
                0
            };
            with_exit(
                json!({
                    "cocycle": model.display(&class.cocycle.element),
                    "weight": class.cocycle.weight,
                    "trivial": class.trivial,
                    "primitive": class.primitive.as_ref().map(|p| model.display(&p.element)),
                }),
                exit,
            )
        }
        ExtCmd::Extend { data } => {
            let data = io::load_mc(&data, base)?;
            let model = data.model().clone();
            match extension::extend_order(&data)? {
                Some(step) => ok(json!({
                    "feasible": true,
                    "eta_k": model.display(&step.eta_k.element),
                    "weight": step.eta_k.weight,
                    "solution_dim": step.solution_dim,
                })),
                None => with_exit(json!({"feasible": false}), 1),
            }
        }
        ExtCmd::Max {
            data,
            k_max,
            grid,
            budget,
        } => {
            let data = io::load_mc(&data, base)?;
            let mode = match grid {
                None => SearchMode::Greedy,
                Some(g) => {
                    let grid = g
                        .split(',')
                        .map(|s| Scalar::parse(s.trim()))
                        .collect::<Result<Vec<_>, _>>()?;
                    SearchMode::Exhaustive { grid, budget }
                }
            };
            let report = extension::max_extension(&data, k_max, &mode)?;
            let model = data.model();
            let trace: Vec<Value> = report
                .trace
                .iter()
                .map(|s| {
                    json!({
                        "order": s.order,
                        "eta": model.display(&s.eta),
                        "solution_dim": s.solution_dim,
                    })
                })
                .collect();
            ok(json!({
                "achieved": report.achieved,
                "trace": trace,
                "exhausted_budget": report.exhausted_budget,
            }))
        }
    }
}

fn run_symp(cmd: SympCmd, base: &Path) -> Result<Outcome, Error> {
    match cmd {
        SympCmd::Check { data, form } => {
            let data = io::load_mc(&data, base)?;
            let w = io::load_form(&form, base, &data)?;
            let report = symplectic::symp_check_closed(&w, &data)?;
            let model = data.model();
            let violations: Vec<Value> = report
                .violations
                .iter()
                .map(|(p, res)| json!({"weight": p, "residual": model.display(res)}))
                .collect();
            let exit = if report.passed() { 0 } else { 1 };
            with_exit(
                json!({
                    "ok": report.passed(),
                    "beta_closed": report.beta_closed,
                    "violations": violations,
                }),
                exit,
            )
        }
        SympCmd::Restrict { data, form } => {
            let data = io::load_mc(&data, base)?;
            let w = io::load_form(&form, base, &data)?;
            let (gamma2, top) = symplectic::symp_restrict(&w, &data)?;
            let model = data.model();
            ok(json!({
                "gamma2": model.display(&gamma2),
                "alpha_k": model.display(&top.element),
                "weight": top.weight,
            }))
        }
        SympCmd::Nondeg {
            data,
            form,
            at,
            frame_dim,
        } => {
            let data = io::load_mc(&data, base)?;
            let w = io::load_form(&form, base, &data)?;
            let model = data.model();
            let points: Vec<BTreeMap<String, Scalar>> = if at.is_empty() {
                vec![BTreeMap::new()]
            } else {
                at.iter()
                    .map(|s| parse_point(s))
                    .collect::<Result<_, _>>()?
            };
            let dim = match frame_dim {
                Some(d) => d,
                None => model
                    .basis_elems(1)
                    .iter()
                    .filter(|b| b.poly0_degree() == 0)
                    .count(),
            };
            let report = symplectic::nondeg_check(&w, &data, &points, dim)?;
            let points: Vec<Value> = report
                .points
                .iter()
                .map(|p| {
                    let at: BTreeMap<String, String> = p
                        .assignment
                        .iter()
                        .map(|(k, v)| (k.clone(), v.to_string()))
                        .collect();
                    json!({
                        "at": at,
                        "alpha_nonzero": p.alpha_nonzero,
                        "determinant": p.determinant.as_ref().map(|d| d.to_string()),
                        "ok": p.passed,
                    })
                })
                .collect();
            let exit = if report.passed() { 0 } else { 1 };
            with_exit(
                json!({"ok": report.passed(), "frame": report.frame, "points": points}),
                exit,
            )
        }
        SympCmd::Variation { data, form } => {
            let data = io::load_mc(&data, base)?;
            let w = io::load_form(&form, base, &data)?;
            let v = symplectic::variation(&w, &data)?;
            let model = data.model();
            ok(json!({
                "xi": model.display(&v.xi.element),
                "weight": v.xi.weight,
                "trivial": v.trivial,
                "ambiguity_dim": v.ambiguity_dim,
            }))
        }
    }
}

fn parse_point(s: &str) -> Result<BTreeMap<String, Scalar>, Error> {
    let mut point = BTreeMap::new();
    for part in s.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let (var, val) = part
            .split_once('=')
            .ok_or_else(|| Error::usage(format!("bad assignment {part:?}: expected var=value")))?;
        point.insert(var.trim().to_string(), Scalar::parse(val.trim())?);
    }
    Ok(point)
}

fn parse_components(l: usize, k: usize, src: &str) -> Result<JetMap, Error> {
    let comps: Vec<String> = src.split(',').map(|s| s.trim().to_string()).collect();
    JetMap::parse(l, k, &comps)
}

fn run_jet(cmd: JetCmd) -> Result<Outcome, Error> {
    match cmd {
        JetCmd::Compose { l, k, f, g } => {
            let f = parse_components(l, k, &f)?;
            let g = parse_components(l, k, &g)?;
            let h = f.compose(&g)?;
            ok(json!({"l": l, "k": k, "components": h.display()}))
        }
        JetCmd::Invert { l, k, f } => {
            let f = parse_components(l, k, &f)?;
            let inv = f.inverse()?;
            ok(json!({"l": l, "k": k, "components": inv.display()}))
        }
        JetCmd::Project { l, k, to, f } => {
            let f = parse_components(l, k, &f)?;
            let p = f.project(to)?;
            ok(json!({"l": l, "k": to, "components": p.display()}))
        }
        JetCmd::Cocycle { l, k, c1, c2 } => {
            let c1 = parse_components(l, k, &c1)?;
            let c2 = parse_components(l, k, &c2)?;
            let cocycle = jet_group::section_cocycle(&c1, &c2)?;
            ok(json!({
                "l": cocycle.l(),
                "base_k": cocycle.base_k(),
                "components": cocycle.display(),
                "zero": cocycle.is_zero(),
            }))
        }
    }
}

fn run_rep(cmd: RepCmd, base: &Path) -> Result<Outcome, Error> {
    match cmd {
        RepCmd::Validate { data } => {
            let rep = io::load_rep(&data, base)?;
            let report = rep.validate()?;
            let violations: Vec<Value> = report
                .violations
                .iter()
                .map(|(i, residual)| {
                    json!({
                        "relation": rep.presentation().relation_display(&rep.presentation().relations()[*i]),
                        "residual": residual,
                    })
                })
                .collect();
            let exit = if report.ok() { 0 } else { 3 };
            with_exit(json!({"ok": report.ok(), "violations": violations}), exit)
        }
        RepCmd::Lift { data } => {
            let rep = io::load_rep(&data, base)?;
            match rep.lift()? {
                LiftOutcome::Lifted {
                    images,
                    corrections,
                    solution_dim,
                } => {
                    let images: Vec<Vec<String>> = images.iter().map(|m| m.display()).collect();
                    let corrections: Vec<Vec<String>> =
                        corrections.iter().map(|c| c.display()).collect();
                    ok(json!({
                        "lifted": true,
                        "to_order": rep.k() + 1,
                        "images": images,
                        "corrections": corrections,
                        "solution_dim": solution_dim,
                    }))
                }
                LiftOutcome::Obstructed => with_exit(json!({"lifted": false}), 1),
            }
        }
    }
}

fn run_universal(k: usize) -> Result<Outcome, Error> {
    let ce = universal::ce_algebra(k)?;
    let module = universal::universal_module(k)?;
    let mut ce_diff = BTreeMap::new();
    for (i, (name, _)) in ce.generators().iter().enumerate() {
        let x = ce.basis_element(1, i);
        ce_diff.insert(name.clone(), ce.display(&ce.differential(&x)?));
    }
    let unit = ce.unit();
    let mut mod_diff = BTreeMap::new();
    let mut mod_prod = BTreeMap::new();
    let mut ts = Vec::with_capacity(k + 1);
    for r in 0..=k {
        ts.push(module.t_element(r, &unit)?);
    }
    for (r, t) in ts.iter().enumerate() {
        mod_diff.insert(format!("t{r}"), module.display(&module.differential(t)?));
    }
    for s in 0..=k {
        for r in (s + 1)..=k {
            mod_prod.insert(
                format!("t{s}*t{r}"),
                module.display(&module.multiply(&ts[s], &ts[r])?),
            );
        }
    }
    ok(json!({
        "k": k,
        "ce": {
            "generators": ce.generators().iter().map(|(n, _)| n.clone()).collect::<Vec<_>>(),
            "dims": ce.dims(),
            "betti": ce.betti()?,
            "differential": ce_diff,
        },
        "module": {
            "differential": mod_diff,
            "products": mod_prod,
        },
    }))
}

// ---------------------------------------------------------------------------
// table rendering

fn color_enabled() -> bool {
    matches!(std::env::var("JETFOL_COLOR").as_deref(), Ok("1"))
}

fn bold(s: &str, color: bool) -> String {
    if color {
        format!("\x1b[1m{s}\x1b[0m")
    } else {
        s.to_string()
    }
}

fn scalar_to_text(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("-".to_string()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        Value::Array(items) => {
            let parts: Vec<String> = items
                .iter()
                .map(|i| scalar_to_text(i))
                .collect::<Option<_>>()?;
            Some(format!("[{}]", parts.join(", ")))
        }
        Value::Object(_) => None,
    }
}

/// Indented key/value listing of the same data the JSON mode prints.
fn render_table(v: &Value) -> String {
    let mut out = String::new();
    render_value(v, 0, color_enabled(), &mut out);
    out
}

fn render_value(v: &Value, indent: usize, color: bool, out: &mut String) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(map) => {
            for (key, val) in map {
                if let Some(text) = scalar_to_text(val) {
                    out.push_str(&format!("{pad}{}: {text}\n", bold(key, color)));
                } else {
                    out.push_str(&format!("{pad}{}:\n", bold(key, color)));
                    render_value(val, indent + 1, color, out);
                }
            }
        }
        Value::Array(items) => {
            for item in items {
                if let Some(text) = scalar_to_text(item) {
                    out.push_str(&format!("{pad}- {text}\n"));
                } else {
                    out.push_str(&format!("{pad}-\n"));
                    render_value(item, indent + 1, color, out);
                }
            }
        }
        other => {
            let text = scalar_to_text(other).unwrap_or_default();
            out.push_str(&format!("{pad}{text}\n"));
        }
    }
}
