//! Command-line front end for `deltaloop`.
//!
//! Exit codes: 0 on success, 2 when input or a requested verification is
//! rejected, 1 on internal failures. Diagnostics go to standard error.

// `!(x > 0.0)` also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod table;

use std::ffi::OsString;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use deltaloop::dynamics::{enantiomer_contrast_series, simulate, time_grid};
use deltaloop::fields::DriveField;
use deltaloop::loops::{
    build_single_loop, enumerate_pure_polarizations, loop_matrix_elements, loop_product, loop_rabi_frequencies,
    sample_linear_orthogonality, LoopSpec, Triad, CLOSURE_TOL_MHZ, TRIAD_TAUS,
};
use deltaloop::molecule::{bundled_molecule, parse_molecule_config, MoleculeConfig};
use deltaloop::rotor::rotor_levels;

use crate::table::{fixed, sci, Table};

#[derive(Debug, Parser)]
#[command(
    name = "deltaloop",
    version,
    about = "Rotational levels, closed three-level loops and their dynamics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Asymmetric-top energies and eigenvector coefficients.
    Levels {
        /// Bundled molecule name or path to a molecule file.
        mol: String,
        #[arg(long, default_value_t = 2)]
        jmax: i32,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Transition frequencies and reduced dipole elements of a triad.
    Transitions {
        mol: String,
        #[arg(long, value_enum, default_value_t = TriadChoice::A)]
        triad: TriadChoice,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Loop enumeration and verification.
    Loops {
        #[command(subcommand)]
        command: LoopsCommand,
    },
    /// Populations after starting in the ground state.
    Simulate {
        mol: String,
        #[command(flatten)]
        drive: DriveArgs,
        /// Final time, microseconds.
        #[arg(long = "t", default_value_t = 2.0)]
        t_max: f64,
        /// Time step, microseconds.
        #[arg(long, default_value_t = 0.01)]
        dt: f64,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Loop populations of both enantiomers under identical fields.
    Contrast {
        mol: String,
        #[command(flatten)]
        drive: DriveArgs,
        /// Common Rabi frequency |Omega_i| in MHz; overrides --amp.
        #[arg(long)]
        rabi: Option<f64>,
        /// Final time, microseconds; one Rabi period by default.
        #[arg(long = "t")]
        t_max: Option<f64>,
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
enum LoopsCommand {
    /// All 27 single-component polarization triples.
    Enumerate {
        mol: String,
        #[arg(long, value_enum, default_value_t = TriadChoice::A)]
        triad: TriadChoice,
        /// Also list the rejected triples.
        #[arg(long)]
        all: bool,
        /// Field amplitudes in V/cm.
        #[arg(long, default_value = "1,1,1", allow_hyphen_values = true)]
        amp: String,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Closure residuals and Rabi frequencies of one configuration.
    Verify {
        mol: String,
        #[command(flatten)]
        drive: DriveArgs,
        /// Closure tolerance, MHz.
        #[arg(long, default_value_t = CLOSURE_TOL_MHZ)]
        tol: f64,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Sampled check that linear fields close exactly when mutually orthogonal.
    Orthogonality {
        mol: String,
        #[arg(long, value_enum, default_value_t = TriadChoice::A)]
        triad: TriadChoice,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TriadChoice {
    A,
    B,
    C,
    All,
}

impl TriadChoice {
    fn taus(self) -> Vec<(char, (i32, i32))> {
        let named = [('a', TRIAD_TAUS[0]), ('b', TRIAD_TAUS[1]), ('c', TRIAD_TAUS[2])];
        match self {
            Self::A => vec![named[0]],
            Self::B => vec![named[1]],
            Self::C => vec![named[2]],
            Self::All => named.to_vec(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Preset {
    /// sigma = (+1, -1, 0)
    Circular,
    /// linear Z, X, Y
    Linear,
}

#[derive(Debug, Args)]
struct DriveArgs {
    #[arg(long, value_enum, default_value_t = TriadChoice::A)]
    triad: TriadChoice,
    /// Named configuration.
    #[arg(long, value_enum)]
    config: Option<Preset>,
    /// Linear polarization axes of the three fields, e.g. ZXY.
    #[arg(long)]
    pol: Option<String>,
    /// Spherical component of each field, e.g. 1,-1,0.
    #[arg(long, allow_hyphen_values = true)]
    sigma: Option<String>,
    /// One field as sigma:amp:phase[,sigma:amp:phase...]; give three times.
    #[arg(long = "field", allow_hyphen_values = true)]
    field: Vec<String>,
    /// Field amplitudes in V/cm (multiplies --field amplitudes).
    #[arg(long, allow_hyphen_values = true)]
    amp: Option<String>,
}

enum Failure {
    /// Input rejected or verification failed.
    Invalid(String),
    Internal(String),
}

impl From<deltaloop::Error> for Failure {
    fn from(e: deltaloop::Error) -> Self {
        Failure::Invalid(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Internal(format!("output error: {e}"))
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Internal(format!("csv error: {e}"))
    }
}

type Outcome = std::result::Result<(), Failure>;

/// Runs the command line with `argv` (including the program name).
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = io::stdout();
    let stderr = io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

/// Same as [`run`] with explicit output streams.
pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(()) => 0,
        Err(Failure::Invalid(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
        Err(Failure::Internal(msg)) => {
            let _ = writeln!(err, "internal error: {msg}");
            1
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write) -> Outcome {
    match command {
        Command::Levels { mol, jmax, csv } => levels(&load(&mol)?, jmax, csv.as_deref(), out),
        Command::Transitions { mol, triad, csv } => transitions(&load(&mol)?, triad, csv.as_deref(), out),
        Command::Loops { command } => match command {
            LoopsCommand::Enumerate {
                mol,
                triad,
                all,
                amp,
                csv,
            } => enumerate(&load(&mol)?, triad, all, &amp, csv.as_deref(), out),
            LoopsCommand::Verify { mol, drive, tol, csv } => verify(&load(&mol)?, &drive, tol, csv.as_deref(), out),
            LoopsCommand::Orthogonality {
                mol,
                triad,
                samples,
                seed,
                csv,
            } => orthogonality(&load(&mol)?, triad, samples, seed, csv.as_deref(), out),
        },
        Command::Simulate {
            mol,
            drive,
            t_max,
            dt,
            csv,
        } => simulate_cmd(&load(&mol)?, &drive, t_max, dt, csv.as_deref(), out),
        Command::Contrast {
            mol,
            drive,
            rabi,
            t_max,
            dt,
            csv,
        } => contrast(&load(&mol)?, &drive, rabi, t_max, dt, csv.as_deref(), out),
    }
}

fn load(mol: &str) -> std::result::Result<MoleculeConfig, Failure> {
    if let Some(m) = bundled_molecule(mol) {
        return Ok(m);
    }
    let text = std::fs::read_to_string(mol).map_err(|e| {
        Failure::Invalid(format!(
            "`{mol}` is neither a bundled molecule nor a readable file: {e}"
        ))
    })?;
    parse_molecule_config(&text).map_err(|e| Failure::Invalid(format!("{mol}: {e}")))
}

fn header(m: &MoleculeConfig, out: &mut dyn Write) -> io::Result<()> {
    let k = &m.constants;
    let d = &m.dipole;
    writeln!(
        out,
        "# {}: A = {} MHz, B = {} MHz, C = {} MHz, mu = ({}, {}, {}) D",
        m.name,
        fixed(k.a(), 2),
        fixed(k.b(), 2),
        fixed(k.c(), 2),
        fixed(d.mu_x, 3),
        fixed(d.mu_y, 3),
        fixed(d.mu_z, 3)
    )
}

fn finish(table: &Table, csv: Option<&Path>, out: &mut dyn Write) -> Outcome {
    table.render(out)?;
    if let Some(path) = csv {
        table_csv(table, path)?;
    }
    Ok(())
}

fn table_csv(table: &Table, path: &Path) -> Outcome {
    table.write_csv(path).map_err(|e| match e.kind() {
        csv::ErrorKind::Io(_) => Failure::Invalid(format!("cannot write {}: {e}", path.display())),
        _ => Failure::from(e),
    })
}

fn levels(m: &MoleculeConfig, jmax: i32, csv: Option<&Path>, out: &mut dyn Write) -> Outcome {
    if !(0..=40).contains(&jmax) {
        return Err(Failure::Invalid(format!("--jmax must be in 0..=40, got {jmax}")));
    }
    header(m, out)?;
    let mut headers = vec!["J".to_string(), "tau".into(), "freq_MHz".into()];
    headers.extend((-jmax..=jmax).map(|k| format!("K={k}")));
    let mut view = Table::new(headers);
    let mut long = Table::new(["J", "tau", "freq_MHz", "K", "coeff"]);
    for j in 0..=jmax {
        for level in rotor_levels(&m.constants, j) {
            let freq = fixed(level.freq, 2);
            let mut row = vec![j.to_string(), level.tau.to_string(), freq.clone()];
            for k in -jmax..=jmax {
                if k.abs() > j {
                    row.push(String::new());
                    continue;
                }
                let c = fixed(level.coeff(k), 6);
                row.push(c.clone());
                long.push(vec![
                    j.to_string(),
                    level.tau.to_string(),
                    freq.clone(),
                    k.to_string(),
                    c,
                ]);
            }
            view.push(row);
        }
    }
    view.render(out)?;
    if let Some(path) = csv {
        table_csv(&long, path)?;
    }
    Ok(())
}

fn triad_of(m: &MoleculeConfig, taus: (i32, i32)) -> std::result::Result<Triad, Failure> {
    Ok(Triad::from_taus(&m.constants, taus.0, taus.1)?)
}

fn transitions(m: &MoleculeConfig, choice: TriadChoice, csv: Option<&Path>, out: &mut dyn Write) -> Outcome {
    header(m, out)?;
    let mut t = Table::new(["triad", "field", "upper", "lower", "freq_MHz", "|Gamma|_D", "|d|_D"]);
    for (name, taus) in choice.taus() {
        let triad = triad_of(m, taus)?;
        let f = triad.frequencies();
        let g = triad.reduced_elements(&m.dipole);
        let levels = [(&triad.b, &triad.a), (&triad.c, &triad.b), (&triad.c, &triad.a)];
        // |Gamma| / sqrt(3) for transitions from J = 0, |Gamma| / sqrt(6) between J = 1 levels
        let norms = [3f64.sqrt(), 6f64.sqrt(), 3f64.sqrt()];
        for i in 0..3 {
            let (u, l) = levels[i];
            t.push(vec![
                name.to_string(),
                (i + 1).to_string(),
                format!("({},{})", u.j, u.tau),
                format!("({},{})", l.j, l.tau),
                fixed(f[i], 2),
                fixed(g[i].norm(), 3),
                fixed(g[i].norm() / norms[i], 3),
            ]);
        }
    }
    finish(&t, csv, out)
}

fn parse_list(text: &str, what: &str) -> std::result::Result<Vec<f64>, Failure> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| Failure::Invalid(format!("{what}: cannot read `{s}` as a number")))
        })
        .collect()
}

fn parse_amps(text: &str) -> std::result::Result<[f64; 3], Failure> {
    let v = parse_list(text, "--amp")?;
    if v.len() != 3 || v.iter().any(|x| *x < 0.0) {
        return Err(Failure::Invalid(format!(
            "--amp needs three non-negative amplitudes, got `{text}`"
        )));
    }
    Ok([v[0], v[1], v[2]])
}

fn loops_table() -> Table {
    Table::new([
        "sigma1",
        "sigma2",
        "sigma3",
        "Mb",
        "Mc",
        "closed",
        "|O1|",
        "|O2|",
        "|O3|",
        "residual_max",
    ])
}

fn enumerate(
    m: &MoleculeConfig,
    choice: TriadChoice,
    all: bool,
    amp: &str,
    csv: Option<&Path>,
    out: &mut dyn Write,
) -> Outcome {
    let amps = parse_amps(amp)?;
    header(m, out)?;
    let mut t = loops_table();
    let several = choice == TriadChoice::All;
    for (name, taus) in choice.taus() {
        let triad = triad_of(m, taus)?;
        if several {
            writeln!(out, "triad {name}: (J,tau) = (0,0), (1,{}), (1,{})", taus.0, taus.1)?;
        }
        let rows = enumerate_pure_polarizations(&triad, &m.dipole, amps)?;
        let mut view = Table::new([
            "Ma",
            "Mb",
            "Mc",
            "sigma1",
            "sigma2",
            "sigma3",
            "closed",
            "|O1|_MHz",
            "|O2|_MHz",
            "|O3|_MHz",
            "residual_MHz",
        ]);
        for r in rows.iter().filter(|r| all || r.closed) {
            let closed = if r.closed { "yes" } else { "no" };
            let o = r.omega_abs.map(|x| fixed(x, 4));
            let res = sci(r.residual_max);
            view.push(vec![
                "0".into(),
                r.m_b.to_string(),
                r.m_c.to_string(),
                r.sigmas[0].to_string(),
                r.sigmas[1].to_string(),
                r.sigmas[2].to_string(),
                closed.into(),
                o[0].clone(),
                o[1].clone(),
                o[2].clone(),
                res.clone(),
            ]);
            t.push(vec![
                r.sigmas[0].to_string(),
                r.sigmas[1].to_string(),
                r.sigmas[2].to_string(),
                r.m_b.to_string(),
                r.m_c.to_string(),
                closed.into(),
                o[0].clone(),
                o[1].clone(),
                o[2].clone(),
                res,
            ]);
        }
        view.render(out)?;
        writeln!(out, "{} of 27 triples closed", rows.iter().filter(|r| r.closed).count())?;
    }
    if let Some(path) = csv {
        table_csv(&t, path)?;
    }
    Ok(())
}

/// Fields and a short description of how they were specified.
struct Drive {
    fields: [DriveField; 3],
    sigmas: Option<[i32; 3]>,
    label: String,
}

fn axis(c: char) -> std::result::Result<[f64; 3], Failure> {
    match c.to_ascii_uppercase() {
        'X' => Ok([1.0, 0.0, 0.0]),
        'Y' => Ok([0.0, 1.0, 0.0]),
        'Z' => Ok([0.0, 0.0, 1.0]),
        _ => Err(Failure::Invalid(format!("--pol axis must be X, Y or Z, got `{c}`"))),
    }
}

fn parse_field(text: &str, scale: f64) -> std::result::Result<DriveField, Failure> {
    let mut comps = [(0.0, 0.0); 3];
    let mut seen = [false; 3];
    for part in text.split(',') {
        let bits: Vec<&str> = part.split(':').collect();
        let bad = || Failure::Invalid(format!("--field expects sigma:amp:phase, got `{part}`"));
        if bits.len() != 3 {
            return Err(bad());
        }
        let sigma: i32 = bits[0].trim().parse().map_err(|_| bad())?;
        let amp: f64 = bits[1].trim().parse().map_err(|_| bad())?;
        let phase: f64 = bits[2].trim().parse().map_err(|_| bad())?;
        if !(-1..=1).contains(&sigma) {
            return Err(Failure::Invalid(format!(
                "--field sigma must be -1, 0 or 1, got {sigma}"
            )));
        }
        let slot = (1 - sigma) as usize;
        if seen[slot] {
            return Err(Failure::Invalid(format!("--field `{text}` repeats sigma = {sigma}")));
        }
        seen[slot] = true;
        comps[slot] = (amp * scale, phase);
    }
    Ok(DriveField::new(0.0, comps)?)
}

impl DriveArgs {
    fn resolve(&self, default: Option<Preset>) -> std::result::Result<Drive, Failure> {
        let given = [
            self.config.is_some(),
            self.pol.is_some(),
            self.sigma.is_some(),
            !self.field.is_empty(),
        ]
        .iter()
        .filter(|x| **x)
        .count();
        if given > 1 {
            return Err(Failure::Invalid(
                "give only one of --config, --pol, --sigma or --field".into(),
            ));
        }
        let amps = match &self.amp {
            Some(a) => parse_amps(a)?,
            None if !self.field.is_empty() => [1.0; 3],
            None => [1.0, 0.75, 2.75],
        };
        let preset = if given == 0 { default } else { self.config };
        if let Some(p) = preset {
            let (pol, sigma) = match p {
                Preset::Circular => (None, Some("1,-1,0")),
                Preset::Linear => (Some("ZXY"), None),
            };
            return Self::from_parts(pol, sigma, amps);
        }
        if !self.field.is_empty() {
            if self.field.len() != 3 {
                return Err(Failure::Invalid(format!(
                    "--field must be given three times, got {}",
                    self.field.len()
                )));
            }
            let fields = [
                parse_field(&self.field[0], amps[0])?,
                parse_field(&self.field[1], amps[1])?,
                parse_field(&self.field[2], amps[2])?,
            ];
            return Ok(Drive {
                fields,
                sigmas: None,
                label: format!("fields {}", self.field.join(" | ")),
            });
        }
        if self.pol.is_none() && self.sigma.is_none() {
            return Err(Failure::Invalid(
                "choose fields with --config, --pol, --sigma or --field".into(),
            ));
        }
        Self::from_parts(self.pol.as_deref(), self.sigma.as_deref(), amps)
    }

    fn from_parts(pol: Option<&str>, sigma: Option<&str>, amps: [f64; 3]) -> std::result::Result<Drive, Failure> {
        if let Some(p) = pol {
            let chars: Vec<char> = p.chars().collect();
            if chars.len() != 3 {
                return Err(Failure::Invalid(format!(
                    "--pol needs three axes such as ZXY, got `{p}`"
                )));
            }
            let mut fields = Vec::with_capacity(3);
            for (c, a) in chars.iter().zip(amps) {
                fields.push(DriveField::linear_polarization(axis(*c)?, a, 0.0, 0.0)?);
            }
            return Ok(Drive {
                fields: [fields[0], fields[1], fields[2]],
                sigmas: None,
                label: format!("linear {}", p.to_ascii_uppercase()),
            });
        }
        let text = sigma.unwrap_or_default();
        let v: Vec<i32> = text
            .split(',')
            .map(|s| s.trim().parse::<i32>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Failure::Invalid(format!("--sigma needs three integers, got `{text}`")))?;
        if v.len() != 3 || v.iter().any(|s| !(-1..=1).contains(s)) {
            return Err(Failure::Invalid(format!(
                "--sigma needs three values in -1, 0, 1, got `{text}`"
            )));
        }
        let s = [v[0], v[1], v[2]];
        Ok(Drive {
            fields: [
                DriveField::pure(s[0], amps[0], 0.0, 0.0)?,
                DriveField::pure(s[1], amps[1], 0.0, 0.0)?,
                DriveField::pure(s[2], amps[2], 0.0, 0.0)?,
            ],
            sigmas: Some(s),
            label: format!("sigma ({},{},{})", s[0], s[1], s[2]),
        })
    }
}

fn single_triad(choice: TriadChoice) -> std::result::Result<(char, (i32, i32)), Failure> {
    match choice {
        TriadChoice::All => Err(Failure::Invalid("this command needs a single --triad a, b or c".into())),
        c => Ok(c.taus()[0]),
    }
}

fn loop_spec(
    m: &MoleculeConfig,
    drive: &DriveArgs,
    default: Option<Preset>,
) -> std::result::Result<(LoopSpec, Drive, char), Failure> {
    let (name, taus) = single_triad(drive.triad)?;
    let d = drive.resolve(default)?;
    let spec = LoopSpec::resonant(triad_of(m, taus)?, d.fields, m.dipole);
    Ok((spec, d, name))
}

fn describe(spec: &LoopSpec, drive: &Drive, name: char, out: &mut dyn Write) -> io::Result<()> {
    let t = &spec.triad;
    writeln!(
        out,
        "triad {name}: (J,tau) = (0,0), (1,{}), (1,{}); {}",
        t.b.tau, t.c.tau, drive.label
    )?;
    let mut ft = Table::new(["field", "nu_MHz", "E_V/cm", "E+", "E0", "E-"]);
    for (i, f) in spec.fields.iter().enumerate() {
        ft.push(vec![
            (i + 1).to_string(),
            fixed(f.freq, 2),
            fixed(f.total_amplitude(), 4),
            fixed(f.component(1).amplitude, 4),
            fixed(f.component(0).amplitude, 4),
            fixed(f.component(-1).amplitude, 4),
        ]);
    }
    ft.render(out)
}

fn verify(m: &MoleculeConfig, drive: &DriveArgs, tol: f64, csv: Option<&Path>, out: &mut dyn Write) -> Outcome {
    if !(tol > 0.0) {
        return Err(Failure::Invalid(format!("--tol must be positive, got {tol}")));
    }
    let (spec, d, name) = loop_spec(m, drive, None)?;
    header(m, out)?;
    describe(&spec, &d, name, out)?;

    let elements = loop_matrix_elements(&spec)?;
    let mut rt = Table::new(["residual", "re_MHz", "im_MHz", "abs_MHz"]);
    for (label, z) in ["<c'|H|b>", "<c''|H|b>", "<c|H|b'>", "<c|H|b''>"]
        .iter()
        .zip(elements.residuals())
    {
        rt.push(vec![label.to_string(), sci(z.re), sci(z.im), sci(z.norm())]);
    }
    rt.render(out)?;

    let h = loop_rabi_frequencies(&spec)?;
    let omegas = h.omegas();
    let mut ot = Table::new(["rabi", "abs_MHz", "arg_rad", "ratio"]);
    for (i, z) in omegas.iter().enumerate() {
        let ratio = if omegas[0].norm() > 0.0 {
            fixed(z.norm() / omegas[0].norm(), 2)
        } else {
            "-".into()
        };
        ot.push(vec![
            format!("Omega{}", i + 1),
            fixed(z.norm(), 4),
            fixed(z.arg(), 4),
            ratio,
        ]);
    }
    ot.render(out)?;
    let m0 = omegas[0].norm();
    if m0 > 0.0 {
        writeln!(
            out,
            "ratio |O1|:|O2|:|O3| = 1:{}:{}",
            fixed(omegas[1].norm() / m0, 2),
            fixed(omegas[2].norm() / m0, 2)
        )?;
    }

    let verdict = build_single_loop(&spec, tol);
    let closed = verdict.is_ok();
    match &verdict {
        Ok(h) => writeln!(out, "closed: yes, loop phase {} rad", fixed(loop_product(h).arg(), 4))?,
        Err(_) => writeln!(out, "closed: no")?,
    }
    if let Some(path) = csv {
        let mut t = loops_table();
        let (s, mb, mc) = match d.sigmas {
            Some(s) => (s.map(|x| x.to_string()), s[0].to_string(), s[2].to_string()),
            None => (Default::default(), String::new(), String::new()),
        };
        let o = omegas.map(|z| fixed(z.norm(), 4));
        t.push(vec![
            s[0].clone(),
            s[1].clone(),
            s[2].clone(),
            mb,
            mc,
            if closed { "yes" } else { "no" }.into(),
            o[0].clone(),
            o[1].clone(),
            o[2].clone(),
            sci(elements.max_residual()),
        ]);
        table_csv(&t, path)?;
    }
    verdict.map(|_| ()).map_err(Failure::from)
}

fn orthogonality(
    m: &MoleculeConfig,
    choice: TriadChoice,
    samples: usize,
    seed: u64,
    csv: Option<&Path>,
    out: &mut dyn Write,
) -> Outcome {
    let (name, taus) = single_triad(choice)?;
    if samples == 0 {
        return Err(Failure::Invalid("--samples must be positive".into()));
    }
    header(m, out)?;
    let r = sample_linear_orthogonality(&triad_of(m, taus)?, &m.dipole, samples, seed)?;
    writeln!(out, "triad {name}, seed {seed}")?;
    let mut t = Table::new(["quantity", "value"]);
    for (k, v) in [
        ("samples", r.samples.to_string()),
        ("orthogonal", r.orthogonal.to_string()),
        ("closed", r.closed.to_string()),
        ("closed_not_orthogonal", r.closed_not_orthogonal.to_string()),
        ("orthogonal_not_closed", r.orthogonal_not_closed.to_string()),
        ("max_dot_closed", sci(r.max_dot_closed)),
    ] {
        t.push(vec![k.into(), v]);
    }
    finish(&t, csv, out)?;
    if r.holds() {
        writeln!(out, "closure iff orthogonality: holds")?;
        Ok(())
    } else {
        writeln!(out, "closure iff orthogonality: violated")?;
        Err(Failure::Invalid(
            "sampled configurations contradict closure iff orthogonality".into(),
        ))
    }
}

fn grid(t_max: f64, dt: f64) -> std::result::Result<Vec<f64>, Failure> {
    if t_max / dt > 1e6 {
        return Err(Failure::Invalid(format!("grid of {t_max}/{dt} points is too large")));
    }
    Ok(time_grid(t_max, dt)?)
}

fn simulate_cmd(
    m: &MoleculeConfig,
    drive: &DriveArgs,
    t_max: f64,
    dt: f64,
    csv: Option<&Path>,
    out: &mut dyn Write,
) -> Outcome {
    let (spec, d, name) = loop_spec(m, drive, Some(Preset::Circular))?;
    let grid = grid(t_max, dt)?;
    header(m, out)?;
    describe(&spec, &d, name, out)?;
    let samples = simulate(&spec, &grid)?;
    let mut t = Table::new(["t_us", "P_a", "P_b", "P_c", "leakage"]);
    let mut worst: f64 = 0.0;
    for s in &samples {
        worst = worst.max(s.leakage.abs());
        t.push(vec![
            fixed(s.t_us, 4),
            fixed(s.p_a, 6),
            fixed(s.p_b, 6),
            fixed(s.p_c, 6),
            sci(s.leakage.abs()),
        ]);
    }
    finish(&t, csv, out)?;
    writeln!(out, "max leakage {}", sci(worst))?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn contrast(
    m: &MoleculeConfig,
    drive: &DriveArgs,
    rabi: Option<f64>,
    t_max: Option<f64>,
    dt: Option<f64>,
    csv: Option<&Path>,
    out: &mut dyn Write,
) -> Outcome {
    let (mut spec, mut d, name) = loop_spec(m, drive, Some(Preset::Circular))?;
    let rabi = match (rabi, &drive.amp) {
        (Some(r), _) => Some(r),
        (None, Some(_)) => None,
        (None, None) => Some(1.0),
    };
    if let Some(r) = rabi {
        if !(r > 0.0) {
            return Err(Failure::Invalid(format!("--rabi must be positive, got {r}")));
        }
        // Rabi magnitudes are linear in each amplitude
        let h = loop_rabi_frequencies(&spec)?;
        let mut fields = spec.fields;
        for (f, omega) in fields.iter_mut().zip(h.omegas()) {
            if omega.norm() == 0.0 {
                return Err(Failure::Invalid("a loop coupling vanishes for these fields".into()));
            }
            *f = f.scaled(r / omega.norm());
        }
        spec = spec.with_fields(fields);
        d.label = format!("{}, |Omega_i| = {} MHz", d.label, fixed(r, 4));
    }
    let h = build_single_loop(&spec, CLOSURE_TOL_MHZ)?;
    let period = 1.0 / h.omegas().iter().map(|z| z.norm()).fold(0.0, f64::max);
    let t_max = t_max.unwrap_or(period);
    let dt = dt.unwrap_or(t_max / 200.0);
    let grid = grid(t_max, dt)?;
    header(m, out)?;
    describe(&spec, &d, name, out)?;
    let lr = loop_product(&h);
    let hl = build_single_loop(&spec.with_dipole(m.dipole.enantiomer()), CLOSURE_TOL_MHZ)?;
    writeln!(
        out,
        "loop phase: given {} rad, mirror image {} rad",
        fixed(lr.arg(), 4),
        fixed(loop_product(&hl).arg(), 4)
    )?;
    let series = enantiomer_contrast_series(&spec, &grid)?;
    let mut t = Table::new(["t_us", "P_a_R", "P_b_R", "P_c_R", "P_a_L", "P_b_L", "P_c_L", "delta_c"]);
    let mut best: f64 = 0.0;
    for s in &series {
        best = best.max(s.delta_c().abs());
        let mut row = vec![fixed(s.t_us, 4)];
        row.extend(s.right.iter().chain(&s.left).map(|p| fixed(*p, 6)));
        row.push(fixed(s.delta_c(), 6));
        t.push(row);
    }
    finish(&t, csv, out)?;
    writeln!(out, "max |P_c^R - P_c^L| = {}", fixed(best, 4))?;
    Ok(())
}
