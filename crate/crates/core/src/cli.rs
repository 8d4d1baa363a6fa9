//! The `jqt` command line.
//!
//! Exit codes: 0 success, 1 usage error, 2 parse error, 3 precision
//! exhausted, 4 domain error, 5 a `check` property failed.

use std::fmt::Write as _;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::cf::{cf_expand, RealHandle};
use crate::check::{default_prec, run_suite, SuiteParams};
use crate::corpus::DEFAULT_SEED;
use crate::equidist::{telescoping_check, weyl_sum, WeylSum};
use crate::error::{Error, Result};
use crate::field::{split_prime_power, FieldSpec};
use crate::invariant::{j_eps, jqt_limit_set, JResult, JValue};
use crate::laurent::LaurentSeries;
use crate::lattice::{eps_schedule, lambda_basis, EpsIndex};
use crate::text;
use crate::zeta::{zeta_a, zeta_eps, ZetaValue};

pub const EXIT_USAGE: i32 = 1;
pub const EXIT_CHECK_FAILED: i32 = 5;

#[derive(Parser, Debug)]
#[command(
    name = "jqt",
    version,
    about = "Continued fractions, approximation lattices, zeta values and j-invariant approximants over F_q(T)"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Field order q = p^r.
    #[arg(long, global = true, default_value_t = 2)]
    pub q: u32,
    /// Modulus over F_p in the variable x, for r > 1.
    #[arg(long, global = true)]
    pub modulus: Option<String>,
    /// Precision P (default 20, 24, 18 for q = 2, 3, 4).
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub prec: Option<i64>,
    /// Largest schedule index N.
    #[arg(long, global = true)]
    pub nmax: Option<usize>,
    /// Breakpoint `N,l`.
    #[arg(long, global = true)]
    pub eps: Option<String>,
    /// Rational input `a/b`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub rational: Option<String>,
    /// Continued fraction input `[a0; a1, ... | p1, ...]`.
    #[arg(long, global = true)]
    pub cfrac: Option<String>,
    /// Laurent series input, e.g. `T^-1 + T^-3 + O(T^-9)`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub laurent: Option<String>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Degree bound for lattice listings.
    #[arg(long, global = true)]
    pub degbound: Option<i64>,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Continued fraction expansion.
    Cf {
        /// Partial quotients shown for rational and series input.
        #[arg(long, default_value_t = 30)]
        terms: usize,
    },
    /// Convergent table up to --nmax.
    Conv,
    /// Basis of the lattice at --eps.
    Basis,
    /// zeta_{f,eps}(n) with a handle and --eps, zeta_A(n) without.
    Zeta {
        #[arg(long)]
        n: u64,
    },
    /// j_eps at --eps, or over the schedule up to --nmax.
    Jinv,
    /// Limit-set explorer.
    Limits,
    /// Weyl sums and the telescoping check.
    Weyl {
        /// Shift b with e(x_b) != 1 (searched when omitted).
        #[arg(long)]
        shift: Option<String>,
        /// Plain sums of e_0(c a f) for this multiplier c, no telescoping.
        #[arg(long)]
        mult: Option<String>,
        #[arg(long, default_value_t = 8)]
        dmax: usize,
    },
    /// Invariant suite over the field.
    Check,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Cf { .. } => "cf",
            Command::Conv => "conv",
            Command::Basis => "basis",
            Command::Zeta { .. } => "zeta",
            Command::Jinv => "jinv",
            Command::Limits => "limits",
            Command::Weyl { .. } => "weyl",
            Command::Check => "check",
        }
    }
}

/// What a run printed and how it exits.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

struct Ctx {
    g: Global,
    f: FieldSpec,
}

impl Ctx {
    fn prec(&self) -> i64 {
        self.g.prec.unwrap_or_else(|| default_prec(self.f.q()))
    }

    fn nmax(&self) -> usize {
        self.g.nmax.unwrap_or(8)
    }

    fn handle(&self) -> Result<Option<RealHandle>> {
        let f = &self.f;
        let given = [&self.g.rational, &self.g.cfrac, &self.g.laurent]
            .iter()
            .filter(|x| x.is_some())
            .count();
        if given > 1 {
            return Err(Error::domain("give at most one of --rational, --cfrac, --laurent"));
        }
        if let Some(s) = &self.g.rational {
            let (a, b) = text::parse_rational(s, f)?;
            return RealHandle::rational(&a, &b, f).map(Some);
        }
        if let Some(s) = &self.g.cfrac {
            return RealHandle::from_cf_text(text::parse_cf(s, f)?, f).map(Some);
        }
        if let Some(s) = &self.g.laurent {
            return RealHandle::truncated(LaurentSeries::parse(s, f)?, f).map(Some);
        }
        Ok(None)
    }

    fn require_handle(&self) -> std::result::Result<RealHandle, Failure> {
        self.handle()?
            .ok_or_else(|| Failure::Usage("this command needs --rational, --cfrac or --laurent".into()))
    }

    fn eps(&self) -> Result<Option<EpsIndex>> {
        self.g.eps.as_deref().map(parse_eps).transpose()
    }

    fn require_eps(&self) -> std::result::Result<EpsIndex, Failure> {
        self.eps()?.ok_or_else(|| Failure::Usage("this command needs --eps N,l".into()))
    }

    fn config_json(&self) -> Value {
        let input = if let Some(s) = &self.g.rational {
            json!({"kind": "rational", "text": s})
        } else if let Some(s) = &self.g.cfrac {
            json!({"kind": "cfrac", "text": s})
        } else if let Some(s) = &self.g.laurent {
            json!({"kind": "laurent", "text": s})
        } else {
            Value::Null
        };
        json!({
            "q": self.f.q(),
            "p": self.f.p(),
            "r": self.f.r(),
            "modulus": self.f.modulus_text(),
            "prec": self.prec(),
            "nmax": self.nmax(),
            "eps": self.g.eps,
            "degbound": self.g.degbound,
            "seed": self.g.seed,
            "input": input,
        })
    }
}

enum Failure {
    Usage(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

/// Parses `N,l`.
pub fn parse_eps(s: &str) -> Result<EpsIndex> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| Error::Parse { pos: s.len(), msg: "expected N,l".into() })?;
    let n = a
        .trim()
        .parse::<usize>()
        .map_err(|_| Error::Parse { pos: 0, msg: format!("bad N '{a}'") })?;
    let l = b
        .trim()
        .parse::<i64>()
        .map_err(|_| Error::Parse { pos: a.len() + 1, msg: format!("bad l '{b}'") })?;
    Ok(EpsIndex::new(n, l))
}

fn field_from(g: &Global) -> Result<FieldSpec> {
    let (p, r) = split_prime_power(g.q)?;
    match &g.modulus {
        Some(m) => {
            let coeffs = text::parse_modulus(m, p)?;
            FieldSpec::new(p, r, Some(&coeffs))
        }
        None => FieldSpec::new(p, r, None),
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, S>(args: I) -> Output
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Output { code: 0, stdout: text, stderr: String::new() },
                _ => Output { code: EXIT_USAGE, stdout: String::new(), stderr: text },
            };
        }
    };
    let json_mode = cli.global.format == Format::Json;
    let name = cli.command.name();
    let f = match field_from(&cli.global) {
        Ok(f) => f,
        Err(e) => return failure(name, Value::Null, json_mode, Failure::Lib(e)),
    };
    let ctx = Ctx { g: cli.global, f };
    match dispatch(&ctx, &cli.command) {
        Ok((text, result, code)) => {
            let stdout = if json_mode {
                let v = json!({"command": name, "config": ctx.config_json(), "result": result});
                format!("{}\n", serde_json::to_string_pretty(&v).expect("JSON values serialize"))
            } else {
                text
            };
            Output { code, stdout, stderr: String::new() }
        }
        Err(fail) => failure(name, ctx.config_json(), json_mode, fail),
    }
}

fn failure(name: &str, config: Value, json_mode: bool, fail: Failure) -> Output {
    let (code, kind, msg) = match fail {
        Failure::Usage(m) => (EXIT_USAGE, "usage", m),
        Failure::Lib(e) => {
            let kind = match e.exit_code() {
                2 => "parse",
                3 => "precision",
                _ => "domain",
            };
            (e.exit_code(), kind, e.to_string())
        }
    };
    let stdout = if json_mode {
        let v = json!({
            "command": name,
            "config": config,
            "error": {"kind": kind, "message": msg, "exit_code": code},
        });
        format!("{}\n", serde_json::to_string_pretty(&v).expect("JSON values serialize"))
    } else {
        String::new()
    };
    Output { code, stdout, stderr: format!("error: {msg}\n") }
}

type Done = std::result::Result<(String, Value, i32), Failure>;

fn dispatch(ctx: &Ctx, cmd: &Command) -> Done {
    match cmd {
        Command::Cf { terms } => cmd_cf(ctx, *terms),
        Command::Conv => cmd_conv(ctx),
        Command::Basis => cmd_basis(ctx),
        Command::Zeta { n } => cmd_zeta(ctx, *n),
        Command::Jinv => cmd_jinv(ctx),
        Command::Limits => cmd_limits(ctx),
        Command::Weyl { shift, mult, dmax } => cmd_weyl(ctx, shift.as_deref(), mult.as_deref(), *dmax),
        Command::Check => cmd_check(ctx),
    }
}

fn cmd_cf(ctx: &Ctx, terms: usize) -> Done {
    let h = ctx.require_handle()?;
    let cf = cf_expand(&h, terms)?;
    let text = format!("{}\n", cf.render(&ctx.f));
    Ok((text, json!({"handle": h.to_json(), "cf": cf.to_json(&ctx.f)}), 0))
}

fn cmd_conv(ctx: &Ctx) -> Done {
    let h = ctx.require_handle()?;
    let f = &ctx.f;
    let mut top = ctx.nmax();
    if let Some(m) = h.cf().available() {
        top = top.min(m);
    }
    let rows = h.rows(top)?;
    let mut out = String::new();
    writeln!(out, "{:>3}  {:<16} {:>4} {:>7}  {:<24} q_bar_perp", "n", "a_n", "deg", "errlog", "q_bar").unwrap();
    for r in &rows {
        let a = if r.n == 0 { h.cf().a0().clone() } else { h.partial(r.n)?.clone() };
        let err = r.errlog().map_or_else(
            || if r.err.is_some_and(|e| e.is_zero()) { "-inf".to_string() } else { "?".to_string() },
            |e| e.to_string(),
        );
        writeln!(
            out,
            "{:>3}  {:<16} {:>4} {:>7}  {:<24} {}",
            r.n,
            text::format_poly(&a, f),
            r.deg,
            err,
            text::format_poly(&r.q_bar, f),
            text::format_poly(&r.q_bar_perp, f)
        )
        .unwrap();
    }
    let json_rows: Vec<Value> = rows.iter().map(|r| r.to_json(f)).collect();
    Ok((out, json!({"rows": json_rows}), 0))
}

fn eps_line(h: &RealHandle, e: EpsIndex) -> Result<String> {
    let log = e.log_eps(h)?;
    Ok(format!("(N, l) = ({}, {})  eps = {}^({log})", e.n, e.l, h.field().q()))
}

fn cmd_basis(ctx: &Ctx) -> Done {
    let h = ctx.require_handle()?;
    let e = ctx.require_eps()?;
    let f = &ctx.f;
    e.log_eps(&h)?;
    let bound = match ctx.g.degbound {
        Some(b) => b,
        None => h.deg_sum(e.n)? + 4,
    };
    let basis = lambda_basis(&h, e, bound)?;
    let mut out = format!("{}  deg <= {bound}\n", eps_line(&h, e)?);
    for b in &basis.entries {
        let err = match b.err.log() {
            Some(k) => format!("{}^({k})", f.q()),
            None => "0".to_string(),
        };
        writeln!(
            out,
            "  T^{}*q_bar_{}  deg {:>3}  ||.f|| = {:<8} {}",
            b.r,
            b.n,
            b.degree(),
            err,
            text::format_poly(&b.poly, f)
        )
        .unwrap();
    }
    let v = json!({"eps": e.to_json(&h), "deg_bound": bound, "entries": basis.to_json(f)});
    Ok((out, v, 0))
}

fn zeta_text(z: &ZetaValue, f: &FieldSpec) -> String {
    format!("{}\ntail bound: q^({})\n", z.value.render(f), z.tail_bound_log)
}

fn cmd_zeta(ctx: &Ctx, n: u64) -> Done {
    if n == 0 {
        return Err(Failure::Lib(Error::domain("zeta needs n >= 1")));
    }
    let f = &ctx.f;
    match ctx.handle()? {
        Some(h) => {
            let e = ctx.require_eps()?;
            let z = zeta_eps(&h, e, n, ctx.prec())?;
            let text = format!("zeta_(f,eps)({n})  {}\n{}", eps_line(&h, e)?, zeta_text(&z, f));
            let mut v = z.to_json(f);
            v["eps"] = e.to_json(&h);
            Ok((text, v, 0))
        }
        None => {
            let z = zeta_a(n, ctx.prec(), f);
            Ok((format!("zeta_A({n})\n{}", zeta_text(&z, f)), z.to_json(f), 0))
        }
    }
}

fn j_text(r: &JResult, f: &FieldSpec) -> String {
    match &r.value {
        JValue::Finite(x) => x.render(f),
        JValue::Infinity { certified: true } => "infinity (certified)".to_string(),
        JValue::Infinity { certified: false } => {
            format!("infinity (uncertified, Delta = O(T^{}))", r.delta_floor - 1)
        }
    }
}

fn cmd_jinv(ctx: &Ctx) -> Done {
    let h = ctx.require_handle()?;
    let f = &ctx.f;
    let prec = ctx.prec();
    if let Some(e) = ctx.eps()? {
        let r = j_eps(&h, e, prec)?;
        let mut out = format!("{}\nj = {}\n", eps_line(&h, e)?, j_text(&r, f));
        if let Some(a) = r.abs_log() {
            writeln!(out, "abs_log = {a}").unwrap();
        }
        return Ok((out, r.to_json(&h), 0));
    }
    let mut out = format!("{:>3} {:>3} {:>8} {:>8}  j\n", "N", "l", "log_eps", "abs_log");
    let mut all = Vec::new();
    for e in eps_schedule(&h, ctx.nmax())? {
        let r = j_eps(&h, e, prec)?;
        let abs = r.abs_log().map_or("-".to_string(), |a| a.to_string());
        writeln!(out, "{:>3} {:>3} {:>8} {:>8}  {}", e.n, e.l, r.log_eps, abs, j_text(&r, f)).unwrap();
        all.push(r.to_json(&h));
    }
    Ok((out, Value::Array(all), 0))
}

fn cmd_limits(ctx: &Ctx) -> Done {
    let h = ctx.require_handle()?;
    let f = &ctx.f;
    let ls = jqt_limit_set(&h, ctx.nmax(), ctx.prec())?;
    let mut out = format!(
        "{}\nperiod {}  N_max {}  P {}  stabilized: {}\n",
        h.describe(),
        ls.period,
        ls.n_max,
        ls.prec,
        ls.stabilized
    );
    let idx = |v: &[EpsIndex]| v.iter().map(|e| format!("({},{})", e.n, e.l)).collect::<Vec<_>>().join(" ");
    writeln!(out, "classes: {}", ls.classes.len()).unwrap();
    for (i, c) in ls.classes.iter().enumerate() {
        writeln!(out, "  [{i}] {}\n      at {}", c.value.render(f), idx(&c.indices)).unwrap();
    }
    if !ls.transient.is_empty() {
        writeln!(out, "transient: {}", ls.transient.len()).unwrap();
        for c in &ls.transient {
            writeln!(out, "  {}\n      at {}", c.value.render(f), idx(&c.indices)).unwrap();
        }
    }
    Ok((out, ls.to_json(&h), 0))
}

fn weyl_row(s: &WeylSum) -> String {
    let counts: Vec<String> = s.histogram.iter().map(|c| c.to_string()).collect();
    let reduced: Vec<String> = s.reduced().iter().map(|c| c.to_string()).collect();
    format!(
        "{:>3}  [{}]  [{}]  {:.6e}\n",
        s.d,
        counts.join(","),
        reduced.join(","),
        s.normalized_magnitude
    )
}

fn cmd_weyl(ctx: &Ctx, shift: Option<&str>, mult: Option<&str>, dmax: usize) -> Done {
    let h = ctx.require_handle()?;
    let f = &ctx.f;
    let header = format!("{:>3}  {}  {}  {}\n", "d", "counts", "reduced", "magnitude");
    if let Some(c) = mult {
        let c = text::parse_poly(c, f)?;
        let mut out = header;
        let mut sums = Vec::new();
        for d in 0..=dmax {
            let s = weyl_sum(&h, &c, d)?;
            out += &weyl_row(&s);
            sums.push(s.to_json(f));
        }
        return Ok((out, json!({"sums": sums}), 0));
    }
    let b = shift.map(|s| text::parse_poly(s, f)).transpose()?;
    let r = telescoping_check(&h, b.as_ref(), dmax)?;
    let mut out = format!(
        "b = {}{}  delta = {}  e(x_b) exponent {}\n",
        text::format_poly(&r.b, f),
        if r.searched { " (searched)" } else { "" },
        r.delta,
        r.shift_exponent
    );
    out += &header;
    for s in &r.sums {
        out += &weyl_row(s);
    }
    match r.mismatch {
        None => writeln!(out, "constant for {} <= d <= {}", r.delta, dmax.max(r.delta)).unwrap(),
        Some(d) => writeln!(out, "NOT constant: d = {d} differs from d = {}", r.delta).unwrap(),
    }
    Ok((out, r.to_json(f), 0))
}

fn cmd_check(ctx: &Ctx) -> Done {
    let mut p = SuiteParams::new(vec![ctx.f.clone()], ctx.g.seed);
    p.prec = ctx.g.prec;
    let verdicts = run_suite(&p)?;
    let mut out = String::new();
    for v in &verdicts {
        writeln!(out, "{}", v.line()).unwrap();
        for c in &v.counterexamples {
            writeln!(out, "    counterexample: {c}").unwrap();
        }
    }
    let code = if verdicts.iter().all(|v| v.pass) { 0 } else { EXIT_CHECK_FAILED };
    let v: Vec<Value> = verdicts.iter().map(|v| v.to_json()).collect();
    Ok((out, Value::Array(v), code))
}
