//! Thin CLI over the library: `catalog`, `density`, `resonances`, `verify`.
//! Exit codes: 0 success, 2 verification failure, 3 usage, 4 excluded space.
//! RES_ATLAS_TOL=<f64> replaces every verification tolerance.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use res_atlas::plancherel::{density_direct, density_factored, rel_err};
use res_atlas::resonances::{enumerate_resonances, resonance_rows, table_csv, table_json, ResonanceBound};
use res_atlas::rootdata::{catalog_lookup, catalog_row, default_catalog, isomorphism_crosscheck, rat_parse};
use res_atlas::verify::{run_suite, Tolerances, SUITES};
use res_atlas::{C64, Error, Family, Result, SpaceDescriptor, SpectralPoint};

#[derive(Parser)]
#[command(
    name = "res-atlas",
    version,
    about = "Resonances of rank-two symmetric spaces with restricted root system BC2/C2"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print the space catalog: multiplicities, 2*rho, L, source annotations
    Catalog(CatalogArgs),
    /// Evaluate the Plancherel density at one spectral point, direct and factored
    Density(DensityArgs),
    /// Enumerate resonances with exact radii, members, and residue weights
    Resonances(ResonancesArgs),
    /// Run a named verification suite and report per-check errors
    Verify(VerifyArgs),
}

#[derive(Args)]
struct CatalogArgs {
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DensityArgs {
    /// Space as F[:p], e.g. DIII, AIII:3, cii:2
    #[arg(long)]
    space: String,
    /// Spectral point as re,im,re,im
    #[arg(long)]
    lambda: String,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ResonancesArgs {
    /// Space as F[:p], e.g. DIII, AIII:3, cii:2
    #[arg(long)]
    space: String,
    /// Keep resonances with |z/b|^2 <= Q; rational, e.g. 121/4 or 33
    #[arg(long = "max-radius-sq")]
    max_radius_sq: String,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// One of: plancherel, symmetry, deformation, residues, cancellation, enumeration
    #[arg(long)]
    suite: String,
    /// Restrict to one space (default: the suite's built-in space set)
    #[arg(long)]
    space: Option<String>,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_space(s: &str) -> Result<SpaceDescriptor> {
    let (fam, p) = match s.split_once(':') {
        Some((f, p)) => {
            let p: u32 = p.trim().parse().map_err(|_| {
                Error::Usage(format!(
                    "bad parameter in space {s:?} (expected F[:p], e.g. AIII:3)"
                ))
            })?;
            (f.trim(), Some(p))
        }
        None => (s.trim(), None),
    };
    let family = Family::from_str(fam)?;
    catalog_lookup(family, p)
}

fn parse_lambda(s: &str) -> Result<SpectralPoint> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::Usage(format!("bad lambda {s:?} (expected re,im,re,im)")))?;
    if parts.len() != 4 {
        return Err(Error::Usage(format!(
            "lambda needs four components re,im,re,im, got {}",
            parts.len()
        )));
    }
    Ok(SpectralPoint::new(
        C64::new(parts[0], parts[1]),
        C64::new(parts[2], parts[3]),
    ))
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn json_pretty<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

#[derive(Serialize)]
struct CatalogOut {
    spaces: Vec<res_atlas::rootdata::CatalogRow>,
    crosscheck: res_atlas::rootdata::CrosscheckReport,
}

fn cmd_catalog(args: &CatalogArgs) -> Result<u8> {
    let rows: Vec<_> = default_catalog().iter().map(catalog_row).collect();
    let text = match args.format {
        Format::Json => json_pretty(&CatalogOut {
            spaces: rows,
            crosscheck: isomorphism_crosscheck(),
        })?,
        Format::Csv => {
            let mut out = String::from(
                "family,p,m_l,m_m,m_s,hermitian,reduced,continuation_excluded,\
                 rho_b1,rho_b2,L_over_b,annotations\n",
            );
            for r in &rows {
                out.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{},{},{},\"{}\"\n",
                    r.family,
                    r.p.map_or(String::new(), |p| p.to_string()),
                    r.m_l,
                    r.m_m,
                    r.m_s,
                    r.hermitian,
                    r.reduced,
                    r.continuation_excluded,
                    r.rho_b1,
                    r.rho_b2,
                    r.l_over_b,
                    r.annotations.join("; "),
                ));
            }
            out
        }
    };
    emit(&text, args.out.as_ref())?;
    Ok(0)
}

#[derive(Serialize)]
struct DensityOut {
    space: String,
    lambda: [[f64; 2]; 2],
    direct: [f64; 2],
    factored: [f64; 2],
    pi: [f64; 2],
    p: [f64; 2],
    q: [f64; 2],
    c_cal: [f64; 2],
    rel_err: f64,
}

fn pair(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

fn cmd_density(args: &DensityArgs) -> Result<u8> {
    let space = parse_space(&args.space)?;
    let lambda = parse_lambda(&args.lambda)?;
    let direct = density_direct(&space, &lambda)?;
    let parts = density_factored(&space, &lambda)?;
    let out = DensityOut {
        space: space.name(),
        lambda: [pair(lambda.x1), pair(lambda.x2)],
        direct: pair(direct),
        factored: pair(parts.product),
        pi: pair(parts.pi),
        p: pair(parts.p),
        q: pair(parts.q),
        c_cal: pair(parts.c_cal),
        rel_err: rel_err(parts.product, direct),
    };
    let text = match args.format {
        Format::Json => json_pretty(&out)?,
        Format::Csv => format!(
            "space,direct_re,direct_im,factored_re,factored_im,rel_err\n\
             {},{:.17e},{:.17e},{:.17e},{:.17e},{:.3e}\n",
            out.space, out.direct[0], out.direct[1], out.factored[0], out.factored[1], out.rel_err
        ),
    };
    emit(&text, args.out.as_ref())?;
    Ok(0)
}

fn cmd_resonances(args: &ResonancesArgs) -> Result<u8> {
    let space = parse_space(&args.space)?;
    let bound = rat_parse(&args.max_radius_sq)?;
    let list = enumerate_resonances(&space, &ResonanceBound::RadiusSq(bound))?;
    let rows = resonance_rows(&space, &list);
    let text = match args.format {
        Format::Json => table_json(&rows),
        Format::Csv => table_csv(&rows),
    };
    emit(&text, args.out.as_ref())?;
    Ok(0)
}

fn cmd_verify(args: &VerifyArgs) -> Result<u8> {
    let tol = match std::env::var("RES_ATLAS_TOL") {
        Ok(s) => Tolerances {
            override_all: Some(s.parse::<f64>().map_err(|_| {
                Error::Usage(format!("RES_ATLAS_TOL must be a float, got {s:?}"))
            })?),
        },
        Err(_) => Tolerances::default(),
    };
    let space = args.space.as_deref().map(parse_space).transpose()?;
    let report = run_suite(&args.suite, args.seed, space.as_ref(), tol)?;
    emit(&json_pretty(&report)?, args.out.as_ref())?;
    if report.pass {
        Ok(0)
    } else {
        let failed: Vec<&str> = report
            .checks
            .iter()
            .filter(|c| !c.pass)
            .map(|c| c.name.as_str())
            .collect();
        eprintln!(
            "verification failed [{}]: {}",
            report.suite,
            failed.join("; ")
        );
        Ok(2)
    }
}

fn run(cli: &Cli) -> Result<u8> {
    match &cli.cmd {
        Cmd::Catalog(a) => cmd_catalog(a),
        Cmd::Density(a) => cmd_density(a),
        Cmd::Resonances(a) => cmd_resonances(a),
        Cmd::Verify(a) => cmd_verify(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 3,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

const _: () = {
    // The suite list is part of the CLI contract; keep the help text honest.
    assert!(SUITES.len() == 6);
};
