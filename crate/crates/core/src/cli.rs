//! Command-line front end. Exit codes: 0 success, 1 bad input, 2 a
//! verification invariant failed.

use std::io::Write;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::classify::{self, ClassifyError, ClassifyOptions, SearchOptions};
use crate::families::{self, FamilyParams, MapParams};
use crate::fields;
use crate::maps::{AlgebraicMap, MapInvariants};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_INVARIANT: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "regmaps", version, about = "Regular maps with Euler characteristic -pq")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Args, Debug, Clone)]
pub struct SearchFlags {
    /// Worker threads for exhaustive searches.
    #[arg(long)]
    pub workers: Option<usize>,
    /// Search every ordered edge pair instead of one per conjugacy orbit.
    #[arg(long)]
    pub no_reduction: bool,
    /// Always close generating sets fully.
    #[arg(long)]
    pub no_dickson: bool,
    /// Largest group order to enumerate.
    #[arg(long, default_value_t = classify::DEFAULT_SEARCH_LIMIT, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_order: u64,
}

impl SearchFlags {
    fn options(&self) -> ClassifyOptions {
        ClassifyOptions {
            search: SearchOptions {
                workers: self.workers.unwrap_or_else(classify::default_workers),
                conjugacy_reduction: !self.no_reduction,
                dickson_cap: !self.no_dickson,
                ..SearchOptions::default()
            },
            search_limit: self.max_order,
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Print the type tables, optionally specialised to a prime pair.
    Tables {
        #[arg(long)]
        p: Option<u64>,
        #[arg(long)]
        q: Option<u64>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Also search for maps on the sporadic rows (equations are always checked).
        #[arg(long)]
        verify: bool,
        #[command(flatten)]
        search: SearchFlags,
    },
    /// List every map with Euler characteristic -pq, p < q odd primes.
    Classify {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        q: u64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[command(flatten)]
        search: SearchFlags,
    },
    /// Build one map: `m1 J K`, `m2 X N P`, `m3 U`, `lift D F M N`, or a
    /// spec such as `m2:x=1,n=6,p=5`.
    Construct {
        kind: String,
        values: Vec<u64>,
        /// Recompute the invariants independently and compare.
        #[arg(long)]
        verify: bool,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[command(flatten)]
        search: SearchFlags,
    },
    /// The set S(n, p) of x with M(x) of order n modulo scalars.
    Snp {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        p: u64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Whether orders m, n are jointly realisable in SL(2, p).
    Admissible {
        #[arg(long)]
        m: u64,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        p: u64,
    },
    /// Exhaustive search for maps on a group such as `psl:f=7`.
    Search {
        #[arg(long)]
        group: String,
        #[arg(long, allow_hyphen_values = true)]
        chi: Option<i64>,
        /// Unordered type `x,y`.
        #[arg(long = "type")]
        map_type: Option<String>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[command(flatten)]
        search: SearchFlags,
    },
}

#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }

    fn invariant(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_INVARIANT,
            message: message.into(),
        }
    }
}

impl From<ClassifyError> for Failure {
    fn from(e: ClassifyError) -> Self {
        match e {
            ClassifyError::Internal(m) => Self::invariant(m),
            other => Self::input(other.to_string()),
        }
    }
}

impl From<families::FamilyError> for Failure {
    fn from(e: families::FamilyError) -> Self {
        match &e {
            families::FamilyError::Parse { message, span } => Self::input(format!(
                "parse error at {}..{}: {message}",
                span.start, span.end
            )),
            _ => Self::input(e.to_string()),
        }
    }
}

impl From<fields::FieldError> for Failure {
    fn from(e: fields::FieldError) -> Self {
        Self::input(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            return Self {
                code: EXIT_OK,
                message: String::new(),
            };
        }
        Self::input(format!("write failed: {e}"))
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            if !f.message.is_empty() {
                let _ = writeln!(err, "error: {}", f.message);
            }
            f.code
        }
    }
}

fn json<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Failure::invariant(e.to_string()))?;
    writeln!(out, "{text}")?;
    Ok(())
}

fn execute(command: Command, out: &mut dyn Write) -> Result<(), Failure> {
    match command {
        Command::Tables {
            p,
            q,
            format,
            verify,
            search,
        } => tables(p, q, format, verify.then(|| search.options()), out),
        Command::Classify { p, q, format, search } => classify_cmd(p, q, format, &search.options(), out),
        Command::Construct {
            kind,
            values,
            verify,
            format,
            search,
        } => construct(&kind, &values, verify, format, &search.options(), out),
        Command::Snp { n, p, format } => {
            let s = fields::s_set(n, p)?;
            match format {
                Format::Json => json(out, &serde_json::json!({ "n": s.n, "p": s.p, "members": s.members })),
                Format::Text => {
                    let members: Vec<String> = s.members.iter().map(u64::to_string).collect();
                    writeln!(out, "{}", members.join(" "))?;
                    Ok(())
                }
            }
        }
        Command::Admissible { m, n, p } => {
            let a = fields::is_admissible(m, n, p)?;
            writeln!(out, "({m},{n}) mod {p}: {}", if a { "admissible" } else { "not admissible" })?;
            Ok(())
        }
        Command::Search {
            group,
            chi,
            map_type,
            format,
            search,
        } => search_cmd(&group, chi, map_type.as_deref(), format, &search.options(), out),
    }
}

#[derive(Serialize)]
struct TablesDoc {
    schema_version: u32,
    table1: Vec<classify::Table1Row>,
    #[serde(skip_serializing_if = "Option::is_none")]
    table2: Option<Vec<classify::Table2Row>>,
    table3: Vec<classify::SporadicRow>,
    table4: Vec<classify::SporadicRow>,
    eliminated: Vec<classify::SporadicRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    checks: Option<Vec<classify::SporadicCheck>>,
}

fn check_pair(p: u64, q: u64) -> Result<(), Failure> {
    for v in [p, q] {
        if v < 5 || !fields::is_prime(v) {
            return Err(Failure::input(format!("{v} is not a prime >= 5")));
        }
    }
    if q <= p {
        return Err(Failure::input(format!("need q > p, got p = {p}, q = {q}")));
    }
    Ok(())
}

fn tables(
    p: Option<u64>,
    q: Option<u64>,
    format: Format,
    verify: Option<ClassifyOptions>,
    out: &mut dyn Write,
) -> Result<(), Failure> {
    let table2 = match (p, q) {
        (Some(p), Some(q)) => {
            check_pair(p, q)?;
            Some(classify::table2(p, q))
        }
        (None, None) => None,
        _ => return Err(Failure::input("give both p and q, or neither")),
    };
    // Without --verify the equations are still checked; existence searches are skipped.
    let options = verify.unwrap_or(ClassifyOptions {
        search_limit: 0,
        ..ClassifyOptions::default()
    });
    let checks = Some(classify::verify_sporadic_tables(&options)?);
    let doc = TablesDoc {
        schema_version: classify::SCHEMA_VERSION,
        table1: classify::table1(),
        table2,
        table3: classify::TABLE3.to_vec(),
        table4: classify::TABLE4.to_vec(),
        eliminated: classify::ELIMINATED.to_vec(),
        checks,
    };
    if format == Format::Json {
        return json(out, &doc);
    }
    writeln!(out, "Table 1: {{x,y}} with k(x,y) integral")?;
    for r in &doc.table1 {
        writeln!(out, "  {{{},{}}}  k = {}", r.x, r.y, r.k)?;
    }
    if let Some(t2) = &doc.table2 {
        writeln!(out, "Table 2: p = {}, q = {}", p.unwrap(), q.unwrap())?;
        for r in t2 {
            writeln!(out, "  {{{},{}}}  |G| = {} = {}", r.x, r.y, r.order, r.label)?;
        }
    }
    for (name, rows) in [("Table 3 (PSL)", &doc.table3), ("Table 4 (PGL)", &doc.table4), ("Eliminated", &doc.eliminated)] {
        writeln!(out, "{name}:")?;
        for r in rows.iter() {
            writeln!(out, "  {{{},{}}}  p = {}  q = {}", r.x, r.y, r.p, r.q)?;
        }
    }
    if let Some(checks) = &doc.checks {
        writeln!(out, "Checks:")?;
        for c in checks {
            writeln!(
                out,
                "  table {} {{{},{}}} p={} q={}: equation {}, maps {:?} ({})",
                c.table,
                c.row.x,
                c.row.y,
                c.row.p,
                c.row.q,
                if c.equation_holds { "ok" } else { "FAILS" },
                c.existence,
                c.maps_found
            )?;
        }
    }
    Ok(())
}

fn classify_cmd(p: u64, q: u64, format: Format, options: &ClassifyOptions, out: &mut dyn Write) -> Result<(), Failure> {
    check_pair(p, q)?;
    let start = Instant::now();
    let report = classify::enumerate_cases(p, q, options)?;
    match format {
        Format::Json => json(out, &report)?,
        Format::Text => {
            writeln!(out, "chi = -{}  (p = {p}, q = {q})", p * q)?;
            for d in &report.descriptors {
                let orient = match d.orientable {
                    Some(true) => "orientable",
                    Some(false) => "non-orientable",
                    None => "-",
                };
                write!(
                    out,
                    "{:<5} {:<40} type {:<10} |G| = {:<6} {:<15} {}",
                    d.case,
                    d.id,
                    format!("({},{})", d.map_type[0], d.map_type[1]),
                    d.group.order,
                    orient,
                    d.status.as_str()
                )?;
                if !d.also.is_empty() {
                    write!(out, " also {}", d.also.join(","))?;
                }
                if let Some(n) = &d.note {
                    write!(out, " ({n})")?;
                }
                writeln!(out)?;
            }
            let v = &report.verification;
            writeln!(
                out,
                "verification: {} in {:.2?}",
                if v.all_ok() { "ok" } else { "FAILED" },
                start.elapsed()
            )?;
            for n in &v.notes {
                writeln!(out, "  {n}")?;
            }
        }
    }
    if !report.verification.all_ok() {
        return Err(Failure::invariant(format!(
            "verification failed: {}",
            report.verification.notes.join("; ")
        )));
    }
    Ok(())
}

#[derive(Serialize)]
struct MapDoc {
    params: String,
    group: String,
    order: u64,
    invariants: MapInvariants,
    triple: [String; 3],
    warnings: Vec<String>,
}

fn map_doc(params: String, m: &AlgebraicMap) -> MapDoc {
    MapDoc {
        params,
        group: m.group().name().to_string(),
        order: m.group().order(),
        invariants: m.invariants().clone(),
        triple: m.triple().map(|e| e.to_hex()),
        warnings: m.warnings().iter().map(ToString::to_string).collect(),
    }
}

fn print_map(out: &mut dyn Write, format: Format, doc: &MapDoc) -> Result<(), Failure> {
    if format == Format::Json {
        return json(out, doc);
    }
    let i = &doc.invariants;
    writeln!(out, "{}  on {} (order {})", doc.params, doc.group, doc.order)?;
    writeln!(
        out,
        "  type ({},{})  V = {}  E = {}  F = {}  chi = {}  {}  genus {}",
        i.x,
        i.y,
        i.vertices,
        i.edges,
        i.faces,
        i.chi,
        if i.orientable { "orientable" } else { "non-orientable" },
        i.genus
    )?;
    for w in &doc.warnings {
        writeln!(out, "  warning: {w}")?;
    }
    Ok(())
}

fn map_params(kind: &str, values: &[u64]) -> Result<MapParams, Failure> {
    if kind.contains(':') {
        if !values.is_empty() {
            return Err(Failure::input("a full spec takes no further values"));
        }
        return Ok(kind.parse()?);
    }
    let arity = |n: usize| {
        if values.len() == n {
            Ok(())
        } else {
            Err(Failure::input(format!("{kind} takes {n} values, got {}", values.len())))
        }
    };
    Ok(match kind {
        "m1" => {
            arity(2)?;
            MapParams::M1 { j: values[0], k: values[1] }
        }
        "m2" => {
            arity(3)?;
            MapParams::M2 {
                x: values[0],
                n: values[1],
                p: values[2],
            }
        }
        "m3" => {
            arity(1)?;
            MapParams::M3 { u: values[0] }
        }
        "lift" => {
            arity(4)?;
            MapParams::Lift {
                d: values[0],
                f: values[1],
                m: values[2],
                n: values[3],
            }
        }
        other => return Err(Failure::input(format!("unknown map family `{other}`; expected m1, m2, m3 or lift"))),
    })
}

fn construct(
    kind: &str,
    values: &[u64],
    verify: bool,
    format: Format,
    options: &ClassifyOptions,
    out: &mut dyn Write,
) -> Result<(), Failure> {
    let params = map_params(kind, values)?;
    let map = match params {
        MapParams::M1 { j, k } => {
            let j = u32::try_from(j).map_err(|_| Failure::input("j too large"))?;
            let k = u32::try_from(k).map_err(|_| Failure::input("k too large"))?;
            families::build_m1(j, k)?
        }
        MapParams::M2 { x, n, p } => families::build_m2(x, n, p)?,
        MapParams::M3 { u } => families::build_m3(u)?,
        MapParams::Lift { d, f, m, n } => {
            let base = classify::find_lift_base(f, m, n, &options.search)?.ok_or_else(|| {
                Failure::input(format!(
                    "no PGL(2,{f}) map of type ({m},{n}) with r, t outside PSL(2,{f}) and l inside"
                ))
            })?;
            families::lift_map(d, &base, 1)?
        }
    };
    print_map(out, format, &map_doc(params.to_string(), &map))?;
    if verify {
        let by_formula = map.euler_characteristic().map_err(|e| Failure::invariant(e.to_string()))?;
        let by_orbits = map.euler_characteristic_by_orbits();
        if by_formula != by_orbits {
            return Err(Failure::invariant(format!("chi by formula {by_formula} != by orbits {by_orbits}")));
        }
        if format == Format::Text {
            writeln!(out, "  verified: chi by formula and by orbits agree")?;
        }
    }
    Ok(())
}

fn parse_type(s: &str) -> Result<(u64, u64), Failure> {
    let bad = || Failure::input(format!("type must look like `x,y`, got `{s}`"));
    let (a, b) = s.split_once(',').ok_or_else(bad)?;
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

fn search_cmd(
    group: &str,
    chi: Option<i64>,
    map_type: Option<&str>,
    format: Format,
    options: &ClassifyOptions,
    out: &mut dyn Write,
) -> Result<(), Failure> {
    let family: FamilyParams = group.parse()?;
    if family.order() > options.search_limit {
        return Err(Failure::input(format!(
            "group order {} exceeds the search limit {}",
            family.order(),
            options.search_limit
        )));
    }
    let target_type = map_type.map(parse_type).transpose()?;
    let g = family.build()?;
    let opts = SearchOptions {
        target_chi: chi,
        target_type,
        ..options.search.clone()
    };
    let hits = classify::search_maps(&g, &opts)?;
    let docs: Vec<MapDoc> = hits
        .iter()
        .enumerate()
        .map(|(i, m)| map_doc(format!("{family}#{}", i + 1), m))
        .collect();
    if format == Format::Json {
        return json(out, &docs);
    }
    writeln!(out, "{} map(s) on {family} up to isomorphism and duality", docs.len())?;
    for d in &docs {
        print_map(out, format, d)?;
    }
    Ok(())
}
