//! Command-line front-end: factorization tables, irreducible-class listings,
//! the census pipeline, the existence predicate, map construction/export,
//! and map isomorphism testing.
//!
//! Exit codes: 0 success, 1 verification or other failure, 2 parameter
//! domain, 3 budget exceeded.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use rotapx::census::{
    classify, classify_augmented, existence, write_census, CensusOptions,
};
use rotapx::dihedral::{aut_orbit, enumerate_irr, parse_signature, IrrClass};
use rotapx::ffpoly::{factor_x_r_minus_1, is_self_reciprocal};
use rotapx::rotamap::{
    build_graph_form, build_map, construct_rotary_default, graph_form, maps_isomorphic,
    read_map_file, write_map_file, GraphForm,
};
use rotapx::{Error, Result};

#[derive(Parser)]
#[command(
    name = "rotapx",
    version,
    about = "Rotary maps on Praeger-Xu graphs: construction, census, verification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    budgets: Budgets,
}

#[derive(Args)]
struct Budgets {
    /// Cap on group orders for brute-force enumeration and map isomorphism.
    #[arg(long, global = true, default_value_t = 200_000)]
    max_group_order: u64,
    /// Cap on graph vertex counts for construction and isomorphism.
    #[arg(long, global = true, default_value_t = 2_000)]
    max_graph_vertices: u64,
    /// Worker threads for per-entry census verification.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// Seed for randomized search order. Reserved: every search in the
    /// current pipeline is deterministic, so this has no effect yet.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Factor x^r - 1 over F_p into its cyclotomic-coset factors
    Factor {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        r: u64,
    },
    /// List the irreducible F_p-classes of the dihedral group D_2r
    Irreps {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        r: u64,
        /// Also group the classes into holomorph orbits
        #[arg(long)]
        orbits: bool,
    },
    /// Classify the rotary maps over the cell (p, r, s); s = 0 covers the
    /// augmented cycle forms
    Census {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        r: u64,
        #[arg(long)]
        s: u64,
        /// Build each map and verify its underlying graph and decomposition
        #[arg(long)]
        verify_graphs: bool,
        /// Cross-check entry counts against exhaustive pair enumeration
        #[arg(long)]
        brute: bool,
        /// Permit s + 1 > r (beyond the arc-transitivity bound)
        #[arg(long)]
        allow_large_s: bool,
        /// Write the census as JSON
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decide map existence over (p, r, s) for prime r
    Exists {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        r: u64,
        #[arg(long)]
        s: u64,
    },
    /// Build the canonical map with the given content and export it
    Construct {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        r: u64,
        /// Comma-separated class signatures, e.g. "L(+,+),R{1,3}"
        #[arg(long)]
        classes: String,
        /// Write the map as JSON
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the underlying graph as an edge list
        #[arg(long)]
        emit_graph: Option<PathBuf>,
    },
    /// Test two exported maps for isomorphism
    Iso { a: PathBuf, b: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let budgets = &cli.budgets;
    match cli.command {
        Command::Factor { p, r } => cmd_factor(p, r),
        Command::Irreps { p, r, orbits } => cmd_irreps(p, r, orbits),
        Command::Census { p, r, s, verify_graphs, brute, allow_large_s, out } => {
            let options = CensusOptions {
                verify_graphs,
                brute,
                max_group_order: budgets.max_group_order,
                max_graph_vertices: budgets.max_graph_vertices,
                allow_large_s,
                jobs: budgets.jobs.max(1),
            };
            cmd_census(p, r, s, &options, out.as_deref())
        }
        Command::Exists { p, r, s } => {
            let report = existence(p, r, s)?;
            let verdict = if report.exists { "yes" } else { "no" };
            println!("{verdict} (zeta={})", report.zeta);
            Ok(())
        }
        Command::Construct { p, r, classes, out, emit_graph } => {
            cmd_construct(p, r, &classes, budgets, out.as_deref(), emit_graph.as_deref())
        }
        Command::Iso { a, b } => {
            let map_a = read_map_file(&a)?;
            let map_b = read_map_file(&b)?;
            if maps_isomorphic(&map_a, &map_b, budgets.max_group_order)? {
                println!("isomorphic");
            } else {
                println!("not isomorphic");
            }
            Ok(())
        }
    }
}

fn cmd_factor(p: u64, r: u64) -> Result<()> {
    let factors = factor_x_r_minus_1(p, r)?;
    println!("x^{r} - 1 over F_{p}: {} irreducible factors", factors.len());
    for (poly, coset) in &factors {
        let kind = if is_self_reciprocal(coset, r) { "self-reciprocal" } else { "paired" };
        let exps: Vec<String> = coset.elements.iter().map(|e| e.to_string()).collect();
        println!("  {poly}  coset {{{}}}  {kind}", exps.join(","));
    }
    Ok(())
}

fn cmd_irreps(p: u64, r: u64, orbits: bool) -> Result<()> {
    let classes = enumerate_irr(p, r)?;
    println!("irreducible F_{p}-classes of D_{}:", 2 * r);
    for class in &classes {
        println!(
            "  {:10} degree {:2}  end degree {}  {}",
            class.signature(),
            class.degree(),
            class.end_degree(),
            if class.is_faithful(r) { "faithful" } else { "not faithful" },
        );
    }
    if orbits {
        println!("holomorph orbits:");
        let mut seen: Vec<IrrClass> = Vec::new();
        for class in &classes {
            if seen.contains(class) {
                continue;
            }
            let orbit = aut_orbit(class, r);
            let names: Vec<String> = orbit.iter().map(|c| c.signature()).collect();
            println!("  {{{}}}", names.join(", "));
            seen.extend(orbit);
        }
    }
    Ok(())
}

fn cmd_census(
    p: u64,
    r: u64,
    s: u64,
    options: &CensusOptions,
    out: Option<&std::path::Path>,
) -> Result<()> {
    let census = if s == 0 {
        classify_augmented(p, r, options)
    } else {
        classify(p, r, s, options)
    }?;
    for entry in &census.entries {
        println!(
            "  {{{}}}  |G| = {}  V/E/F = {}/{}/{}  chi = {}  graph {}",
            entry.classes.join(", "),
            entry.group_order,
            entry.counts.v,
            entry.counts.e,
            entry.counts.f,
            entry.counts.chi,
            entry.graph,
        );
    }
    println!("{}", census.summary());
    if let Some(path) = out {
        write_census(&census, path)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

/// Split a signature list on commas that sit outside `(...)` or `{...}`.
fn split_signatures(text: &str) -> Vec<String> {
    let mut parts = Vec::new();
    let mut depth = 0u32;
    let mut current = String::new();
    for ch in text.chars() {
        match ch {
            '(' | '{' => {
                depth += 1;
                current.push(ch);
            }
            ')' | '}' => {
                depth = depth.saturating_sub(1);
                current.push(ch);
            }
            ',' if depth == 0 => {
                parts.push(std::mem::take(&mut current));
            }
            _ => current.push(ch),
        }
    }
    parts.push(current);
    parts.into_iter().map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect()
}

fn cmd_construct(
    p: u64,
    r: u64,
    classes_text: &str,
    budgets: &Budgets,
    out: Option<&std::path::Path>,
    emit_graph: Option<&std::path::Path>,
) -> Result<()> {
    let names = split_signatures(classes_text);
    if names.is_empty() {
        return Err(Error::ParamDomain("no class signatures given".into()));
    }
    let classes: Vec<IrrClass> = names
        .iter()
        .map(|name| parse_signature(p, r, name))
        .collect::<Result<_>>()?;
    let map = construct_rotary_default(p, r, &classes)?;
    let counts = map.counts();
    let form = graph_form(p, r, &classes);
    println!(
        "map on {} vertices, {} edges, {} faces (chi = {}), graph {}",
        counts.vertices,
        counts.edges,
        counts.faces,
        counts.chi,
        form.label(p, r),
    );
    if let Some(path) = emit_graph {
        let built = build_map(&map, budgets.max_graph_vertices)?;
        let reference = build_graph_form(p, r, form, budgets.max_graph_vertices)?;
        if !rotapx::pxgraph::isomorphic(&built.graph, &reference, budgets.max_graph_vertices)? {
            return Err(Error::Verification(format!(
                "constructed graph is not isomorphic to {}",
                form.label(p, r)
            )));
        }
        let (len, s_param, delta) = match form {
            GraphForm::Px { length, s } => (length, s, 0),
            GraphForm::ThickCycle { length } => (length, 0, 1),
            GraphForm::Cycle => (r, 0, -1),
        };
        std::fs::write(path, built.graph.edge_list_text(p, len, s_param, delta))?;
        println!("wrote {}", path.display());
    }
    if let Some(path) = out {
        let graph_ref = emit_graph.map(|g| g.display().to_string());
        write_map_file(&map, path, graph_ref)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::split_signatures;

    #[test]
    fn signature_splitting_respects_brackets() {
        assert_eq!(
            split_signatures("L(+,+),R{1,3}"),
            ["L(+,+)", "R{1,3}"]
        );
        assert_eq!(
            split_signatures(" P{1,5} , P{2} "),
            ["P{1,5}", "P{2}"]
        );
        assert_eq!(split_signatures("L(-,-)"), ["L(-,-)"]);
        assert_eq!(split_signatures(""), Vec::<String>::new());
    }
}
