use std::path::Path;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::output::{num, sig17, OutputDir, RunManifest};
use super::*;
use crate::error::Result;
use crate::interval::IntervalBox;
use crate::lattice::{
    escape_mass_integral, limit_process_distribution, siegel_moment_check, zeroth_fourier_coefficient, CuspFunction,
};
use crate::numeric::gcd;
use crate::numth::{
    envelope_is_stable, gauss_sum_closed_signed, gauss_sum_direct, lemma_bound_report, ratio_envelope, GaussSumParams,
};
use crate::seq::{generate, generate_alpha_power, FracSequence};
use crate::stats::{
    empirical_count_distribution, histogram, ks_distance_exponential, mixed_moment, pair_correlation,
    restricted_moment, scaled_gaps, AlphaSampler, TestFunction,
};

const GAUSS_TOL: f64 = 1e-9;

pub(super) fn dispatch(cmd: &Command, out: &Path, threads: usize, start: Instant) -> Result<Outcome> {
    let mut dir = OutputDir::create(out)?;
    let (mut manifest, outcome) = match cmd {
        Command::Gen(a) => gen(a, &mut dir)?,
        Command::Gaps(a) => gaps(a, &mut dir)?,
        Command::Paircorr(a) => paircorr(a, &mut dir)?,
        Command::Countdist(a) => countdist(a, &mut dir)?,
        Command::Moments(a) => moments(a, &mut dir)?,
        Command::LatticeSim(a) => lattice_sim(a, &mut dir)?,
        Command::SiegelCheck(a) => siegel_check(a, &mut dir)?,
        Command::EscapeMass(a) => escape_mass(a, &mut dir)?,
        Command::GaussCheck(a) => gauss_check(a, &mut dir)?,
        Command::LemmaCheck(a) => lemma_check(a, &mut dir)?,
        Command::Figures(a) => figures(a, &mut dir)?,
    };
    manifest.threads = Some(threads);
    manifest.wall_time_s = Some(start.elapsed().as_secs_f64());
    dir.finish(manifest)?;
    Ok(outcome)
}

fn manifest_for<T: Serialize>(command: &str, seed: Option<u64>, args: &T) -> Result<RunManifest> {
    Ok(RunManifest::new(command, seed, serde_json::to_value(args)?))
}

fn sequence(a: &SeqArgs) -> Result<FracSequence> {
    match a.alpha {
        Some(_) if a.c != 0.0 => Err(Error::domain("--c applies to sqrt(n) only; drop it or --alpha")),
        Some(alpha) => generate_alpha_power(a.t, alpha),
        None => generate(a.t, a.c),
    }
}

fn gen(a: &GenArgs, dir: &mut OutputDir) -> Result<(RunManifest, Outcome)> {
    let seq = sequence(&a.seq)?;
    let mut manifest = manifest_for("gen", None, a)?;
    let mut text = format!("# T={} c={} N={}", a.seq.t, a.seq.c, seq.len());
    if let Some(alpha) = a.seq.alpha {
        text.push_str(&format!(" alpha={alpha}"));
    }
    text.push('\n');
    for &x in seq.values() {
        text.push_str(&sig17(x));
        text.push('\n');
    }
    dir.write_raw("sequence.txt", text.as_bytes())?;
    manifest.set_result("n", seq.len());
    Ok((manifest, Outcome::Ok))
}

fn gaps(a: &GapsArgs, dir: &mut OutputDir) -> Result<(RunManifest, Outcome)> {
    let seq = sequence(&a.seq)?;
    let mut manifest = manifest_for("gaps", None, a)?;
    let gaps = scaled_gaps(&seq)?;
    manifest.set_result("n", seq.len());
    manifest.set_result("ks_exponential", ks_distance_exponential(&gaps)?);
    let rows = gap_rows(&gaps, a.bins, a.max)?;
    dir.write_csv("gaps.csv", &manifest, &["left", "right", "density", "exponential"], &rows)?;
    Ok((manifest, Outcome::Ok))
}

fn gap_rows(gaps: &[f64], bins: usize, max: f64) -> Result<Vec<Vec<String>>> {
    Ok(histogram(gaps, bins, 0.0, max)?
        .iter()
        .map(|b| {
            let exp = ((-b.left).exp() - (-b.right).exp()) / (b.right - b.left);
            vec![num(b.left), num(b.right), num(b.density), num(exp)]
        })
        .collect())
}

fn paircorr(a: &PaircorrArgs, dir: &mut OutputDir) -> Result<(RunManifest, Outcome)> {
    let seq = sequence(&a.seq)?;
    let mut manifest = manifest_for("paircorr", None, a)?;
    manifest.set_result("n", seq.len());
    let mut rows = Vec::new();
    for w in &a.windows {
        let f = TestFunction::indicator(w.with_closure());
        let r2 = pair_correlation(&seq, &f)?;
        let poisson = w.length();
        rows.push(vec![num(w.left), num(w.right), num(r2), num(poisson), num((r2 - poisson) / poisson)]);
    }
    dir.write_csv("paircorr.csv", &manifest, &["a", "b", "r2", "poisson", "rel_error"], &rows)?;
    Ok((manifest, Outcome::Ok))
}

fn sampler(samples: usize, seed: Option<u64>) -> AlphaSampler {
    match seed {
        Some(s) => AlphaSampler::random(samples, s),
        None => AlphaSampler::grid(samples),
    }
}

fn countdist(a: &CountdistArgs, dir: &mut OutputDir) -> Result<(RunManifest, Outcome)> {
    let seq = sequence(&a.seq)?;
    let mut manifest = manifest_for("countdist", a.seed, a)?;
    let b = IntervalBox::single(a.window);
    let emp = empirical_count_distribution(&seq, &b, &sampler(a.samples, a.seed))?;
    manifest.set_result("mean", emp.mean(0));
    let p = emp.marginal(0, a.kmax);
    let limit = if a.limit_samples > 0 {
        let lim = limit_process_distribution(&b, a.limit_samples, a.limit_seed)?;
        manifest.set_result("total_variation", emp.total_variation(&lim, a.kmax));
        Some(lim.marginal(0, a.kmax))
    } else {
        None
    };
    let rows: Vec<Vec<String>> = (0..p.len())
        .map(|k| {
            let label = if k as u32 > a.kmax { format!(">{}", a.kmax) } else { k.to_string() };
            let lim = limit.as_ref().map(|l| num(l[k])).unwrap_or_default();
            vec![label, num(p[k]), lim]
        })
        .collect();
    dir.write_csv("countdist.csv", &manifest, &["k", "empirical", "limit"], &rows)?;
    Ok((manifest, Outcome::Ok))
}

fn moments(a: &MomentsArgs, dir: &mut OutputDir) -> Result<(RunManifest, Outcome)> {
    let seq = sequence(&a.seq)?;
    let mut manifest = manifest_for("moments", a.seed, a)?;
    let b = IntervalBox::new(a.windows.clone());
    let smp = sampler(a.samples, a.seed);
    let full = mixed_moment(&seq, &b, &a.s, &smp)?;
    let mut rows = vec![vec!["moment".to_string(), num(full)]];
    manifest.set_result("moment", full);
    if let Some(k) = a.kmax {
        let r = restricted_moment(&seq, &b, &a.s, k, &smp)?;
        rows.push(vec![format!("restricted_k{k}"), num(r)]);
        manifest.set_result("restricted", r);
    }
    dir.write_csv("moments.csv", &manifest, &["quantity", "value"], &rows)?;
    Ok((manifest, Outcome::Ok))
}

fn lattice_sim(a: &LatticeSimArgs, dir: &mut OutputDir) -> Result<(RunManifest, Outcome)> {
    let mut manifest = manifest_for("lattice-sim", Some(a.seed), a)?;
    let b = IntervalBox::new(a.windows.clone());
    let dist = limit_process_distribution(&b, a.samples, a.seed)?;
    let mut rows = Vec::new();
    for coord in 0..b.dim() {
        for (k, p) in dist.marginal(coord, a.kmax).iter().enumerate() {
            let label = if k as u32 > a.kmax { format!(">{}", a.kmax) } else { k.to_string() };
            rows.push(vec![coord.to_string(), label, num(*p)]);
        }
    }
    let means: Vec<f64> = (0..b.dim()).map(|c| dist.mean(c)).collect();
    manifest.set_result("means", means);
    dir.write_csv("lattice_sim.csv", &manifest, &["interval", "k", "probability"], &rows)?;
    Ok((manifest, Outcome::Ok))
}

fn siegel_check(a: &SiegelArgs, dir: &mut OutputDir) -> Result<(RunManifest, Outcome)> {
    let mut manifest = manifest_for("siegel-check", Some(a.seed), a)?;
    let report = siegel_moment_check(&IntervalBox::new(a.windows.clone()), a.samples, a.seed)?;
    let rows: Vec<Vec<String>> = report
        .lines
        .iter()
        .map(|l| vec![l.name.clone(), num(l.estimate), num(l.std_error), num(l.target), num(l.z)])
        .collect();
    manifest.set_result("max_abs_z", report.max_abs_z());
    dir.write_csv("siegel.csv", &manifest, &["moment", "estimate", "std_error", "target", "z"], &rows)?;
    let outcome = if report.passes(a.sigmas) {
        Outcome::Ok
    } else {
        Outcome::VerificationFailed(format!("moment off by {:.2} standard errors", report.max_abs_z()))
    };
    Ok((manifest, outcome))
}

fn escape_mass(a: &EscapeArgs, dir: &mut OutputDir) -> Result<(RunManifest, Outcome)> {
    let mut manifest = manifest_for("escape-mass", None, a)?;
    let f = TestFunction::Triangle { center: 0.0, half_width: a.width, height: 1.0 };
    let mut rows = Vec::new();
    for &r in &a.r {
        let cusp = CuspFunction::new(f.clone(), r, a.beta)?;
        let integral = escape_mass_integral(a.v, &cusp, a.eta, a.theta, a.points)?;
        let mean = if a.beta < 1.0 {
            num(zeroth_fourier_coefficient(a.v, r, a.beta, u64::MAX)?.value)
        } else {
            String::new()
        };
        rows.push(vec![num(r), mean, num(integral)]);
    }
    dir.write_csv("escape.csv", &manifest, &["r", "fbar_mean", "integral"], &rows)?;
    manifest.set_result("rows", rows.len());
    Ok((manifest, Outcome::Ok))
}

fn gauss_check(a: &GaussArgs, dir: &mut OutputDir) -> Result<(RunManifest, Outcome)> {
    let mut manifest = manifest_for("gauss-check", Some(a.seed), a)?;
    let mut cases = Vec::new();
    for c in 1..=a.c_max {
        for n in (1..=a.n_max).step_by(2) {
            if gcd(n as u64, c) == 1 {
                cases.push((n, c));
                cases.push((-n, c));
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let mut drawn = 0;
    while drawn < a.random {
        let c = rng.gen_range(1..=a.random_c_max.max(1));
        let n = 2 * rng.gen_range(0..500_000i64) + 1;
        if gcd(n as u64, c) == 1 {
            cases.push((if rng.gen::<bool>() { n } else { -n }, c));
            drawn += 1;
        }
    }
    let mut worst: f64 = 0.0;
    let mut rows = Vec::with_capacity(cases.len());
    for (n, c) in cases {
        let p = GaussSumParams::new(n, c)?;
        let direct = gauss_sum_direct(&p);
        let closed = gauss_sum_closed_signed(&p)?;
        let err = (direct - closed).norm().max((direct.norm() - (8.0 * c as f64).sqrt()).abs());
        worst = worst.max(err);
        rows.push(vec![
            n.to_string(),
            c.to_string(),
            num(direct.re),
            num(direct.im),
            num(closed.re),
            num(closed.im),
            num(err),
        ]);
    }
    manifest.set_result("cases", rows.len());
    manifest.set_result("max_error", worst);
    let cols = ["n", "c", "direct_re", "direct_im", "closed_re", "closed_im", "error"];
    dir.write_csv("gauss.csv", &manifest, &cols, &rows)?;
    let outcome = if worst <= GAUSS_TOL {
        Outcome::Ok
    } else {
        Outcome::VerificationFailed(format!("Gauss sum mismatch {worst:e}"))
    };
    Ok((manifest, outcome))
}

fn lemma_check(a: &LemmaArgs, dir: &mut OutputDir) -> Result<(RunManifest, Outcome)> {
    let mut manifest = manifest_for("lemma-check", None, a)?;
    let report = lemma_bound_report(&a.d_grid, &a.t_grid, &TestFunction::unit_triangle(), a.eps)?;
    let env = ratio_envelope(&report);
    let rows: Vec<Vec<String>> = report
        .iter()
        .zip(&env)
        .map(|(r, e)| vec![num(r.d), num(r.t), num(r.s), num(r.bound1), num(r.bound2), num(r.ratio), num(*e)])
        .collect();
    let stable = envelope_is_stable(&report);
    manifest.set_result("max_ratio", env.iter().cloned().fold(0.0, f64::max));
    manifest.set_result("envelope_stable", stable);
    let cols = ["d", "t", "s", "bound1", "bound2", "ratio", "envelope"];
    dir.write_csv("lemma.csv", &manifest, &cols, &rows)?;
    let outcome =
        if stable { Outcome::Ok } else { Outcome::VerificationFailed("ratio envelope grows on the largest cells".into()) };
    Ok((manifest, outcome))
}

fn figures(a: &FiguresArgs, dir: &mut OutputDir) -> Result<(RunManifest, Outcome)> {
    let mut manifest = manifest_for("figures", None, a)?;
    let cube = generate_alpha_power(a.t_gaps, 1.0 / 3.0)?;
    let root = generate(a.t_gaps, 0.0)?;
    let cols = ["left", "right", "density", "exponential"];
    let mut hists = Vec::new();
    for (name, seq) in [("fig1_gaps_cuberoot.csv", &cube), ("fig2_gaps_sqrt.csv", &root)] {
        let gaps = scaled_gaps(seq)?;
        manifest.set_result(name, ks_distance_exponential(&gaps)?);
        hists.push((name, gap_rows(&gaps, a.bins, a.max)?));
    }
    for (name, rows) in hists {
        dir.write_csv(name, &manifest, &cols, &rows)?;
    }
    if a.pair_bins == 0 || !(a.pair_max > 0.0) {
        return Err(Error::domain("pair histogram needs bins > 0 and a positive range"));
    }
    let pair = generate(a.t_pair, 0.0)?;
    let h = a.pair_max / a.pair_bins as f64;
    let mut rows = Vec::new();
    for k in 0..a.pair_bins {
        let (lo, hi) = (k as f64 * h, (k + 1) as f64 * h);
        let f = TestFunction::indicator(Interval::half_open(lo, hi)?);
        let density = pair_correlation(&pair, &f)? / h;
        rows.push(vec![num(lo), num(hi), num(density), num(1.0)]);
    }
    dir.write_csv("fig3_paircorr.csv", &manifest, &["left", "right", "density", "poisson"], &rows)?;
    Ok((manifest, Outcome::Ok))
}
