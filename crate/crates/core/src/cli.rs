//! The `glat` command line.

use std::io::{self, Read};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::cohomology::h1_profile;
use crate::error::{Error, Result};
use crate::gallery;
use crate::groups::{identify_by_generators, DEFAULT_ELEMENT_CAP};
use crate::lattice_file::{parse_lattice_with_cap, write_lattice};
use crate::lattices::{dual, is_permutation_in_basis, GLattice, SearchLimits, DEFAULT_COEFF_BOUND};
use crate::report::{self, Format};
use crate::resolutions::{
    flasque_resolution, is_coflasque, is_flasque, similarity_verdict, stably_permutation_verdict, transport_lattice,
    StableSearchBounds, DEFAULT_MAX_PAIRS, DEFAULT_RANK_SLACK,
};

#[derive(Parser, Debug)]
#[command(name = "glat", version, about = "Integral representations of finite groups: H1 obstructions, flasque resolutions, similarity")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalOpts {
    /// Largest rank of `N + P` tried by the stable search [default: rank + 8]
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub rank_bound: Option<u64>,
    /// Largest absolute coefficient in isomorphism candidates
    #[arg(long, global = true, default_value_t = DEFAULT_COEFF_BOUND, value_parser = clap::value_parser!(u32).range(1..))]
    pub coeff_bound: u32,
    /// Largest number of padding pairs handed to the isomorphism search
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_PAIRS as u64, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_pairs: u64,
    /// Group enumeration stops with an error beyond this many elements
    #[arg(long, global = true, default_value_t = DEFAULT_ELEMENT_CAP as u64, value_parser = clap::value_parser!(u64).range(1..))]
    pub element_cap: u64,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Human)]
    pub format: OutputFormat,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Human,
    Kv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Print a lattice: group, generator matrices, images of the basis
    Show(Input),
    /// H1 of the lattice over subgroups
    Cohomology {
        #[command(flatten)]
        input: Input,
        /// Only the subgroup with this index in the canonical order
        #[arg(long, conflicts_with = "all_subgroups")]
        subgroup: Option<usize>,
        /// Every subgroup (default: the whole group only)
        #[arg(long)]
        all_subgroups: bool,
        /// Also compute H1 of the dual lattice
        #[arg(long)]
        dual: bool,
    },
    /// Flasque resolution 0 -> M -> S -> F -> 0
    FlasqueResolution {
        #[command(flatten)]
        input: Input,
        /// Print F as a lattice file instead of the report
        #[arg(long)]
        emit_f: bool,
    },
    /// Test a property of a lattice
    Check {
        property: Property,
        #[command(flatten)]
        input: Input,
    },
    /// Decide similarity N + P = N' + Q where possible
    Similar {
        a: PathBuf,
        b: PathBuf,
        /// Identify B's group with A's by matching generators in order
        #[arg(long)]
        identify_generators: bool,
    },
    /// Emit a built-in lattice as a lattice file
    Gallery {
        #[command(subcommand)]
        which: GalleryLattice,
    },
    /// Obstruction reports
    Report {
        #[command(subcommand)]
        which: ReportKind,
    },
}

#[derive(Args, Debug, Clone)]
pub struct Input {
    /// Lattice file; `-` or absent reads standard input
    pub file: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Property {
    Permutation,
    Coflasque,
    Flasque,
    StablyPermutation,
}

#[derive(Subcommand, Debug, Clone)]
pub enum GalleryLattice {
    /// Klein four group on the character lattice of the norm-one quotient torus
    TorusPi,
    /// The same lattice with inversion adjoined (order 8)
    TorusW,
    /// Picard lattice of the n-th conic bundle with 4n+2 degenerate fibres
    Trepalin {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
    },
}

#[derive(Subcommand, Debug, Clone)]
pub enum ReportKind {
    /// Stable-permutation obstruction report
    TheoremB {
        #[command(flatten)]
        input: Input,
        /// Analyse the flasque part F of the lattice instead of the lattice itself
        #[arg(long)]
        flasque_part: bool,
    },
}

fn read_source(path: Option<&PathBuf>) -> Result<(String, String)> {
    let mut text = String::new();
    match path {
        None => {
            io::stdin()
                .read_to_string(&mut text)
                .map_err(|e| Error::parse("<stdin>", e.to_string()))?;
            Ok(("<stdin>".into(), text))
        }
        Some(p) if p.as_os_str() == "-" => read_source(None),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| Error::parse(p.display().to_string(), e.to_string()))?;
            Ok((p.display().to_string(), text))
        }
    }
}

fn load(path: Option<&PathBuf>, cap: usize) -> Result<GLattice> {
    let (origin, text) = read_source(path)?;
    parse_lattice_with_cap(&text, cap).map_err(|e| match e {
        Error::Parse { location, message } => Error::Parse {
            location: format!("{origin}: {location}"),
            message,
        },
        other => other,
    })
}

impl GlobalOpts {
    fn bounds(&self, rank: usize) -> StableSearchBounds {
        StableSearchBounds {
            rank_bound: self.rank_bound.map_or(rank + DEFAULT_RANK_SLACK, |r| r as usize),
            limits: SearchLimits::with_coeff_bound(self.coeff_bound),
            max_pairs: self.max_pairs as usize,
        }
    }

    fn format(&self) -> Format {
        match self.format {
            OutputFormat::Human => Format::Human,
            OutputFormat::Kv => Format::Kv,
        }
    }

    fn cap(&self) -> usize {
        self.element_cap as usize
    }
}

/// Runs one invocation and returns what goes to standard output.
pub fn run(cli: &Cli) -> Result<String> {
    let g = &cli.global;
    let fmt = g.format();
    match &cli.command {
        Command::Show(input) => Ok(report::show(&load(input.file.as_ref(), g.cap())?).render(fmt)),
        Command::Cohomology {
            input,
            subgroup,
            all_subgroups,
            dual: with_dual,
        } => {
            let n = load(input.file.as_ref(), g.cap())?;
            let profile = h1_profile(&n)?;
            let dual_profile = if *with_dual { Some(h1_profile(&dual(&n))?) } else { None };
            let count = profile.entries.len();
            let indices: Vec<usize> = match (subgroup, all_subgroups) {
                (Some(i), _) if *i >= count => {
                    return Err(Error::InvalidParameter(format!(
                        "subgroup index {i} out of range: the group has {count} subgroups"
                    )))
                }
                (Some(i), _) => vec![*i],
                (None, true) => (0..count).collect(),
                (None, false) => vec![count - 1],
            };
            Ok(report::cohomology(&n, &profile, dual_profile.as_ref(), &indices).render(fmt))
        }
        Command::FlasqueResolution { input, emit_f } => {
            let n = load(input.file.as_ref(), g.cap())?;
            let res = flasque_resolution(&n)?;
            Ok(if *emit_f {
                write_lattice(&res.f)
            } else {
                report::resolution(&res).render(fmt)
            })
        }
        Command::Check { property, input } => {
            let n = load(input.file.as_ref(), g.cap())?;
            let rep = match property {
                Property::Permutation => report::check(&n, "permutation", is_permutation_in_basis(&n), None),
                Property::Coflasque => report::h_trivial_check(&n, "coflasque", &is_coflasque(&n)?),
                Property::Flasque => report::h_trivial_check(&n, "flasque", &is_flasque(&n)?),
                Property::StablyPermutation => {
                    report::obstruction(&n, &stably_permutation_verdict(&n, &g.bounds(n.rank()))?)
                }
            };
            Ok(rep.render(fmt))
        }
        Command::Similar {
            a,
            b,
            identify_generators,
        } => {
            let la = load(Some(a), g.cap())?;
            let mut lb = load(Some(b), g.cap())?;
            if *identify_generators {
                let map = identify_by_generators(la.group(), lb.group())?;
                lb = transport_lattice(&lb, la.group(), &map)?;
            }
            let bounds = g.bounds(la.rank().max(lb.rank()));
            let v = similarity_verdict(&la, &lb, &bounds)?;
            Ok(report::similarity(&la, &lb, &v, &bounds).render(fmt))
        }
        Command::Gallery { which } => {
            let lat = match which {
                GalleryLattice::TorusPi => gallery::torus_pi_lattice(),
                GalleryLattice::TorusW => gallery::torus_w_lattice(),
                GalleryLattice::Trepalin { n } => gallery::trepalin_lattice(*n as usize)?,
            };
            Ok(write_lattice(&lat))
        }
        Command::Report {
            which: ReportKind::TheoremB { input, flasque_part },
        } => {
            let m = load(input.file.as_ref(), g.cap())?;
            let n = if *flasque_part { flasque_resolution(&m)?.f } else { m };
            let rep = stably_permutation_verdict(&n, &g.bounds(n.rank()))?;
            Ok(report::obstruction(&n, &rep).render(fmt))
        }
    }
}

/// Exit status for an error: 2 for bad input, 3 for a failed self-check.
pub fn exit_code(e: &Error) -> i32 {
    if e.is_input_error() {
        2
    } else {
        3
    }
}

pub fn main() -> i32 {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            print!("{out}");
            0
        }
        Err(e) => {
            eprintln!("glat: {e}");
            exit_code(&e)
        }
    }
}
