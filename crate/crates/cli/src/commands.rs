//! One function per subcommand, each building a [`Table`].

use std::sync::Arc;

use cue_lab_core::contingency::{count_matrices, count_via_kostka, count_via_sn_average};
use cue_lab_core::cue::{mc_moment_estimate, range_verdict, MomentKind, MomentSpec};
use cue_lab_core::ffield::{polynomiality_check, FPoly, FieldSpec};
use cue_lab_core::lfunc::{
    char_moment_in, integer_mk as count_mk, katz_trend_report, odd_primitive_characters, solution_count,
    theta_checks, Constraint, Twist, UnitGroup,
};
use cue_lab_core::partitions::enumerate_partitions;
use cue_lab_core::{par, Error, Limits, Partition};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::ToPrimitive;

use crate::output::{float, Table};

/// Largest |estimate − exact| in standard errors accepted by `mc`.
pub const MC_Z_LIMIT: f64 = 4.0;

/// Parses "c0,c1,...@q=Q" (constant term first) into a monic polynomial.
pub fn parse_modulus(spec: &str) -> Result<FPoly, Error> {
    let bad = || Error::InvalidInput(format!("expected \"c0,c1,...@q=Q\", got {spec:?}"));
    let (coeffs, q) = spec.split_once('@').ok_or_else(bad)?;
    let q: u64 = q.trim().strip_prefix("q=").ok_or_else(bad)?.trim().parse().map_err(|_| bad())?;
    let field = FieldSpec::from_order(q)?;
    let coeffs = coeffs
        .split(',')
        .map(|c| c.trim().parse::<u32>().map_err(|_| bad()))
        .collect::<Result<Vec<_>, _>>()?;
    let f = FPoly::from_coeffs(&field, coeffs)?;
    if f.is_zero() || !f.is_monic() {
        return Err(Error::NonMonic);
    }
    Ok(f)
}

fn pairs_up_to(n_max: usize, from: usize) -> Result<Vec<(Partition, Partition)>, Error> {
    let mut out = Vec::new();
    for n in from..=n_max {
        let parts = enumerate_partitions(n)?;
        for mu in &parts {
            for nu in &parts {
                out.push((mu.clone(), nu.clone()));
            }
        }
    }
    Ok(out)
}

/// Exact moments against `N_{μ,μ̃}` for every `μ, μ̃ ⊢ n ≤ n_max` and every
/// `N` in the inclusive range. Only in-range rows are asserted.
pub fn verify_moments(kind: MomentKind, n_max: usize, range: (usize, usize), limits: &Limits) -> Result<Table, Error> {
    let mut table = Table::new(vec![
        "kind", "mu", "mu_tilde", "N", "exact", "target", "range", "agreement", "check",
    ]);
    let mut tasks = Vec::new();
    for (mu, nu) in pairs_up_to(n_max, 1)? {
        for n in range.0..=range.1 {
            tasks.push(MomentSpec::from_partitions(&mu, &nu, n, kind)?);
        }
    }
    let results = par::try_map(&tasks, |spec| -> Result<_, Error> {
        let exact = spec.exact()?;
        let target = BigInt::from(count_matrices(&spec.mu(), &spec.mu_tilde(), limits)?);
        Ok((exact, target))
    })?;
    for (spec, (exact, target)) in tasks.iter().zip(results) {
        let verdict = range_verdict(spec);
        let equal = exact == target;
        let check = if verdict.in_range() {
            table.check(equal)
        } else {
            "n/a".to_string()
        };
        table.push(vec![
            kind.to_string(),
            spec.mu().to_string(),
            spec.mu_tilde().to_string(),
            spec.n.to_string(),
            exact.to_string(),
            target.to_string(),
            verdict.to_string(),
            if equal { "equal" } else { "differ" }.to_string(),
            check,
        ]);
    }
    Ok(table)
}

/// Direct, Kostka and `S_n`-average counts for all `μ, μ̃ ⊢ n ≤ n_max`.
pub fn verify_kostka(n_max: usize, limits: &Limits) -> Result<Table, Error> {
    let mut table = Table::new(vec!["mu", "mu_tilde", "direct", "kostka", "sn_average", "transposed", "check"]);
    let tasks = pairs_up_to(n_max, 0)?;
    let results = par::try_map(&tasks, |(mu, nu)| -> Result<_, Error> {
        Ok((
            count_matrices(mu, nu, limits)?,
            count_via_kostka(mu, nu)?,
            count_via_sn_average(mu, nu)?,
            count_matrices(nu, mu, limits)?,
        ))
    })?;
    for ((mu, nu), (direct, kostka, average, transposed)) in tasks.iter().zip(results) {
        let ok = direct == kostka
            && average == BigRational::from_integer(BigInt::from(direct.clone()))
            && direct == transposed;
        let check = table.check(ok);
        table.push(vec![
            mu.to_string(),
            nu.to_string(),
            direct.to_string(),
            kostka.to_string(),
            average.to_string(),
            transposed.to_string(),
            check,
        ]);
    }
    Ok(table)
}

/// Polynomial fit of the divisor correlation sum in `q`.
pub fn ff_scan(
    mu: &Partition,
    mu_tilde: &Partition,
    n: usize,
    qs: &[u64],
    holdout: u64,
    limits: &Limits,
) -> Result<Table, Error> {
    let report = polynomiality_check(mu, mu_tilde, n, qs, holdout, limits)?;
    let mut table = Table::new(vec!["record", "key", "value"]);
    let row = |r: &str, k: String, v: String| vec![r.to_string(), k, v];
    for (q, s) in &report.samples {
        table.push(row("sample", q.to_string(), s.to_string()));
    }
    let (hq, hv, hp) = &report.holdout;
    table.push(row("holdout", hq.to_string(), hv.to_string()));
    table.push(row("holdout_fit", hq.to_string(), hp.to_string()));
    for (power, c) in report.coeffs.iter().enumerate() {
        table.push(row("coeff", power.to_string(), c.to_string()));
    }
    table.push(row("leading_target", n.to_string(), report.leading_target.to_string()));
    for (name, ok) in [
        ("integral", report.integral),
        ("degree", report.degree_ok),
        ("leading", report.leading_ok),
        ("holdout", report.holdout_ok),
    ] {
        let c = table.check(ok);
        table.push(row("check", name.to_string(), c));
    }
    Ok(table)
}

fn target_count(n: usize, k: u32, limits: &Limits) -> Result<BigUint, Error> {
    let block = Partition::new(vec![n; k as usize])?;
    count_matrices(&block, &block, limits)
}

/// Character moment against the solution count; asserted when `nk ≤ deg Q`.
pub fn char_moments(modulus: &FPoly, n: usize, k: u32, twist: Twist, limits: &Limits) -> Result<Table, Error> {
    let mut table = Table::new(vec![
        "q", "Q", "n", "k", "twist", "phi", "moment", "solution_count", "in_range", "check", "ratio",
    ]);
    let group = Arc::new(UnitGroup::build(modulus, limits)?);
    let moment = char_moment_in(&group, n, k, twist, limits)?;
    let count = solution_count(n, k, modulus, Constraint::from(twist), limits)?;
    let in_range = n * k as usize <= modulus.deg();
    let check = if in_range {
        table.check(moment == BigRational::from_integer(BigInt::from(count.clone())))
    } else {
        "n/a".to_string()
    };
    let q = modulus.field().q();
    let norm = BigInt::from(q).pow(n as u32 * k) * BigInt::from(target_count(n, k, limits)?);
    let ratio = (&moment / BigRational::from_integer(norm)).to_f64().unwrap_or(f64::NAN);
    table.push(vec![
        q.to_string(),
        modulus.to_string(),
        n.to_string(),
        k.to_string(),
        twist.to_string(),
        group.phi().to_string(),
        moment.to_string(),
        count.to_string(),
        in_range.to_string(),
        check,
        float(ratio),
    ]);
    Ok(table)
}

/// Root and coefficient checks for each odd primitive character mod `Q`.
pub fn theta(modulus: &FPoly, limits: &Limits) -> Result<Table, Error> {
    let mut table = Table::new(vec![
        "q",
        "Q",
        "character",
        "roots",
        "max_modulus_error",
        "max_sc_error",
        "max_trsym_error",
        "max_weil_excess",
        "check",
    ]);
    let group = Arc::new(UnitGroup::build(modulus, limits)?);
    let chars = odd_primitive_characters(&group)?;
    let reports = par::try_map(&chars, |chi| theta_checks(chi, limits))?;
    for (chi, rep) in chars.iter().zip(reports) {
        let check = table.check(rep.passes());
        let exps: Vec<String> = chi.exponents().iter().map(u64::to_string).collect();
        table.push(vec![
            rep.q.to_string(),
            modulus.to_string(),
            format!("({})", exps.join(",")),
            rep.roots.len().to_string(),
            float(rep.max_modulus_error),
            float(rep.max_sc_error),
            float(rep.max_trsym_error),
            float(rep.max_weil_excess),
            check,
        ]);
    }
    Ok(table)
}

pub fn katz_trend(d: usize, n: usize, k: u32, qs: &[u64], limits: &Limits) -> Result<Table, Error> {
    let mut table = Table::new(vec![
        "q", "Q", "phi", "moment", "moebius_moment", "ratio", "moebius_ratio", "target",
    ]);
    for row in katz_trend_report(d, n, k, qs, limits)? {
        table.push(vec![
            row.q.to_string(),
            row.modulus.to_string(),
            row.phi.to_string(),
            row.moment.to_string(),
            row.moebius_moment.to_string(),
            float(row.ratio),
            float(row.moebius_ratio),
            row.target.to_string(),
        ]);
    }
    Ok(table)
}

pub fn integer_mk(x: u64, k: u32, constraint: Constraint, limits: &Limits) -> Result<Table, Error> {
    let mut table = Table::new(vec!["x", "k", "constraint", "count"]);
    let count = count_mk(x, k, constraint, limits)?;
    let name = match constraint {
        Constraint::None => "none",
        Constraint::Squarefree => "squarefree",
    };
    table.push(vec![x.to_string(), k.to_string(), name.to_string(), count.to_string()]);
    Ok(table)
}

/// Seeded Monte Carlo estimate; asserts `|estimate − exact| ≤ 4·stderr`.
pub fn mc(kind: MomentKind, a: &[usize], b: &[usize], n: usize, samples: usize, seed: u64) -> Result<Table, Error> {
    let mut table = Table::new(vec![
        "kind", "a", "b", "N", "samples", "seed", "estimate_re", "estimate_im", "stderr", "exact", "z", "check",
    ]);
    let spec = MomentSpec::new(a.to_vec(), b.to_vec(), n, kind)?;
    let est = mc_moment_estimate(&spec, samples, seed)?;
    let exact = spec.exact()?;
    let exact_f = exact.to_f64().unwrap_or(f64::NAN);
    let dev = (est.estimate.re - exact_f).hypot(est.estimate.im);
    // A constant integrand has zero spread; compare directly then.
    let (z, ok) = if est.stderr > 0.0 {
        let z = dev / est.stderr;
        (z, z <= MC_Z_LIMIT)
    } else {
        (0.0, dev <= 1e-9)
    };
    let check = table.check(ok);
    let list = |v: &[usize]| v.iter().map(usize::to_string).collect::<Vec<_>>().join(",");
    table.push(vec![
        kind.to_string(),
        list(a),
        list(b),
        n.to_string(),
        samples.to_string(),
        seed.to_string(),
        float(est.estimate.re),
        float(est.estimate.im),
        float(est.stderr),
        exact.to_string(),
        float(z),
        check,
    ]);
    Ok(table)
}
