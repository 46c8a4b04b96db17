//! Acceptance criteria 1 to 8. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.

mod common;

use std::f64::consts::FRAC_PI_4;
use std::panic::{catch_unwind, AssertUnwindSafe};

use common::*;
use qse::cli::spec::{Job, Source};
use qse::exclusion::certificate::{evaluate_min_error, evaluate_unambiguous};
use qse::exclusion::oracle::{oracle_phase_search, oracle_povm_sampler};
use qse::exclusion::povm::build;
use qse::exclusion::probabilities::min_error_probability;
use qse::exclusion::{analyze_ensemble, analyze_gram, solve, Analysis, Mode};
use qse::gram::{
    associated_ensemble, gram_from_coefficients, gram_from_states, index_probabilities, joint_probabilities,
    transfer_between, transfer_povm, Ensemble, TransferDirection,
};
use qse::group::{build_cyclic, build_dihedral, build_klein_four, validate_group_table, GroupTable};
use qse::multiplier::{normalize_multiplier, Multiplier};
use qse::numerics::{c64, hermitian_eig, identity, max_abs_diff, sqrtm_psd, CMat, CVec, C64};
use qse::rep::{builtin_irreps, great_orthogonality_check, left_regular, right_regular, IrrepCatalog};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rustfft::FftPlanner;

#[derive(Default)]
struct Outcome {
    failures: Vec<String>,
    details: Vec<String>,
}

impl Outcome {
    fn check(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.failures.push(what.into());
        }
    }

    fn note(&mut self, what: impl Into<String>) {
        self.details.push(what.into());
    }
}

fn random_unit(rng: &mut ChaCha8Rng, n: usize, bias: f64) -> CVec {
    let v = CVec::from_fn(n, |_, _| {
        c64(bias + rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal))
    });
    let norm = v.norm();
    v / c64(norm, 0.0)
}

fn random_povm(rng: &mut ChaCha8Rng, dim: usize, count: usize) -> Vec<CMat> {
    let raw: Vec<CMat> = (0..count)
        .map(|_| {
            let b = CMat::from_fn(dim, dim, |_, _| {
                c64(rng.sample(StandardNormal), rng.sample(StandardNormal))
            });
            &b * b.adjoint()
        })
        .collect();
    let s = raw.iter().fold(CMat::zeros(dim, dim), |a, m| a + m);
    let t = hermitian_eig(&s).unwrap().apply(|x| 1.0 / x.sqrt());
    raw.iter().map(|m| &t * m * &t).collect()
}

// 1

fn criterion_1() -> Outcome {
    let mut o = Outcome::default();
    let job = Job::load(&fixture("tetrahedron")).unwrap();
    let Some(Source::Ensemble(e)) = &job.source else {
        panic!("tetrahedron fixture is not an explicit ensemble")
    };
    // the fixture carries the literal seed a₋|0⟩ + e^{iπ/4}a₊|1⟩
    let s3 = 3f64.sqrt();
    let (am, ap) = (((3.0 - s3) / 6.0).sqrt(), ((3.0 + s3) / 6.0).sqrt());
    let literal = CVec::from_vec(vec![c64(am, 0.0), C64::from_polar(ap, FRAC_PI_4)]);
    o.check((e.seed() - &literal).norm() < 1e-15, "fixture seed differs from a₋|0⟩ + e^{iπ/4}a₊|1⟩");

    let g = gram_from_states(e);
    let want = 1.0 / s3;
    for (name, idx) in [("c_x", 1), ("c_y", 2), ("c_z", 3)] {
        let c = g.entries()[(0, idx)];
        o.note(format!("{name} = {:+.15} {:+.1e}i", c.re, c.im));
        o.check(
            (c - c64(want, 0.0)).norm() <= 1e-10,
            format!("{name} = {:.12} but 1/√3 = {want:.12} was required", c.re),
        );
    }
    let mut spec = g.eigenvalues().to_vec();
    spec.sort_by(|a, b| b.total_cmp(a));
    let dev = spec.iter().zip([2.0, 2.0, 0.0, 0.0]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    o.note(format!("spectrum {:?}, deviation from {{2,2,0,0}} {dev:.1e}", spec));
    o.check(dev <= 1e-9, "spectrum is not {2,2,0,0}");

    let a = analyze_ensemble(e, job.catalog.as_ref()).unwrap();
    o.check(a.probabilities.p_min == 0.0, format!("p_min = {}", a.probabilities.p_min));
    o.check(a.probabilities.q_min == 0.0, format!("q_min = {}", a.probabilities.q_min));
    let sol = solve(&a, Mode::MinError).unwrap();
    o.note(format!("constructed POVM error {:.1e}", sol.diagnostics.achieved_error));
    o.check(sol.diagnostics.achieved_error <= 1e-10, "constructed POVM errs");

    // the same ensemble with a₊ and a₋ exchanged, reported for comparison
    let swapped = CVec::from_vec(vec![c64(ap, 0.0), C64::from_polar(am, FRAC_PI_4)]);
    let gs = gram_from_states(&Ensemble::new(e.rep().clone(), swapped).unwrap());
    let cs: Vec<f64> = (1..4).map(|k| gs.entries()[(0, k)].re).collect();
    o.note(format!("with a₊, a₋ exchanged: c = {cs:.15?}"));
    o
}

// 2

fn criterion_2() -> Outcome {
    let mut o = Outcome::default();
    let k = build_klein_four();
    let m = Multiplier::pauli(&k).unwrap();
    let r = right_regular(&m).unwrap();
    let (z, one, i) = (c64(0.0, 0.0), c64(1.0, 0.0), c64(0.0, 1.0));
    let printed = [
        ("R_x", [[z, one, z, z], [one, z, z, z], [z, z, z, -i], [z, z, i, z]]),
        ("R_y", [[z, z, one, z], [z, z, z, i], [one, z, z, z], [z, -i, z, z]]),
        ("R_z", [[z, z, z, one], [z, z, -i, z], [z, i, z, z], [one, z, z, z]]),
    ];
    o.check(r.matrix(0) == &identity(4), "R_e is not the identity");
    for (g, (name, rows)) in printed.iter().enumerate().map(|(j, p)| (j + 1, p)) {
        let want = CMat::from_fn(4, 4, |a, b| rows[a][b]);
        o.check(r.matrix(g) == &want, format!("{name} differs entrywise"));
    }
    let h = c64(0.0, -0.5);
    let u = CMat::from_row_slice(
        4,
        4,
        &[one, -one, i, one, -one, one, i, one, -one, -one, i, -one, -one, -one, -i, one],
    ) * h;
    o.check(max_abs_diff(&(&u * u.adjoint()), &identity(4)) < 1e-12, "printed 𝒰 is not unitary");
    let sigma = [
        CMat::from_row_slice(2, 2, &[z, one, one, z]),
        CMat::from_row_slice(2, 2, &[z, -i, i, z]),
        CMat::from_row_slice(2, 2, &[one, z, z, -one]),
    ];
    let mut worst: f64 = 0.0;
    for (j, s) in sigma.iter().enumerate() {
        let mut direct = CMat::zeros(4, 4);
        direct.view_mut((0, 0), (2, 2)).copy_from(s);
        direct.view_mut((2, 2), (2, 2)).copy_from(s);
        worst = worst.max(max_abs_diff(&(&u * r.matrix(j + 1) * u.adjoint()), &direct));
    }
    o.note(format!("max |𝒰R_j𝒰† - σ_j⊕σ_j| = {worst:.1e}"));
    o.check(worst <= 1e-10, "𝒰 does not block-diagonalize R_j");
    o
}

// 3

fn criterion_3() -> Outcome {
    let mut o = Outcome::default();
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let (mut worst, mut perfect, mut total) = (0.0f64, 0, 0);
    for t in 0..160 {
        let n = 1 + t % 8;
        let mut l: Vec<f64> = (0..n).map(|_| -rng.random::<f64>().ln()).collect();
        // half the draws get a dominant eigenvalue to leave the perfect region
        if t % 2 == 0 {
            l[0] += rng.random::<f64>() * 4.0 * n as f64;
        }
        let s: f64 = l.iter().sum();
        l.iter_mut().for_each(|x| *x *= n as f64 / s);
        l.sort_by(|a, b| b.total_cmp(a));
        let closed = min_error_probability(&l, n).unwrap();
        let found = oracle_phase_search(&l, n, 16, t as u64).unwrap().best_value;
        worst = worst.max((closed - found).abs());
        perfect += usize::from(closed == 0.0);
        total += 1;
    }
    o.note(format!("{total} spectra ({perfect} in the perfect region), max |oracle - P| = {worst:.1e}"));
    o.check(worst <= 1e-7, format!("phase search disagrees by {worst:.3e}"));

    for f in FIXTURES {
        let job = Job::load(&fixture(f)).unwrap();
        let a = analysis_of(&job);
        let data = a.schmidt().unwrap();
        let sol = build(data, Mode::MinError).unwrap();
        let rep = oracle_povm_sampler(&data.ensemble, a.probabilities.p_min, Some(&sol.povm), 10_000, 42).unwrap();
        o.note(format!(
            "{f}: {} POVMs, best {:.9} vs p_min {:.9}, {} violations",
            rep.samples, rep.best_found, rep.p_min, rep.violations
        ));
        o.check(rep.violations == 0, format!("{f}: a sampled POVM beats p_min by {:.3e}", rep.worst_violation));
    }
    o
}

fn analysis_of(job: &Job) -> Analysis {
    match job.source.as_ref().unwrap() {
        Source::Ensemble(e) => analyze_ensemble(e, job.catalog.as_ref()).unwrap(),
        Source::Gram(g) => analyze_gram(g, job.catalog.as_ref()).unwrap(),
    }
}

// 4

fn criterion_4() -> Outcome {
    let mut o = Outcome::default();
    let groups: Vec<(&str, GroupTable)> = vec![
        ("Z2", build_cyclic(2).unwrap()),
        ("Z3", build_cyclic(3).unwrap()),
        ("Z4", build_cyclic(4).unwrap()),
        ("K4", build_klein_four()),
        ("D3", build_dihedral(3).unwrap()),
    ];
    let eps = 1e-6;
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let (mut count, mut worst_gap, mut worst_feas, mut worst_dual, mut worst_ufeas) = (0, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for (name, g) in &groups {
        let m = Multiplier::trivial(g);
        let cat = builtin_irreps(&m).unwrap();
        let rep = left_regular(&m).unwrap();
        let mut done = 0;
        while done < 24 {
            let bias = 0.5 + 3.0 * rng.random::<f64>();
            let e = Ensemble::new(rep.clone(), random_unit(&mut rng, g.order(), bias)).unwrap();
            let a = analyze_ensemble(&e, Some(&cat)).unwrap();
            if a.probabilities.perfect {
                continue;
            }
            done += 1;
            count += 1;
            let data = a.schmidt().unwrap();
            let me = evaluate_min_error(&build(data, Mode::MinError).unwrap(), data);
            let gap = (me.trace_y - a.probabilities.p_min).abs();
            worst_gap = worst_gap.max(gap);
            worst_feas = worst_feas.min(me.feasibility_min_eigenvalue);
            o.check(me.passed && gap <= 1e-8 && me.feasibility_min_eigenvalue >= -1e-8,
                format!("{name}: min-error certificate fails: {:?}", me.failures));
            let un = evaluate_unambiguous(&build(data, Mode::Unambiguous).unwrap(), data, eps).unwrap();
            let d = (un.dual_value - (a.probabilities.q_min - eps)).abs();
            worst_dual = worst_dual.max(d);
            worst_ufeas = worst_ufeas.min(un.feasibility_min_eigenvalue);
            o.check(un.passed && d <= 1e-8, format!("{name}: unambiguous certificate fails: {:?}", un.failures));
        }
    }
    o.note(format!("{count} non-perfect ensembles over Z2, Z3, Z4, K4, D3"));
    o.note(format!("min-error: max |Tr Y - P| {worst_gap:.1e}, min feasibility eigenvalue {worst_feas:.1e}"));
    o.note(format!("unambiguous (ε = {eps:e}): max |dual - (Q - ε)| {worst_dual:.1e}, min feasibility eigenvalue {worst_ufeas:.1e}"));

    // the dual value tracks Q - ε across ε
    let m = Multiplier::trivial(&build_cyclic(2).unwrap());
    let g = gram_from_coefficients(&[c64(1.0, 0.0), c64(0.5, 0.0)], &m).unwrap();
    let a = analyze_gram(&g, Some(&builtin_irreps(&m).unwrap())).unwrap();
    let data = a.schmidt().unwrap();
    let sol = build(data, Mode::Unambiguous).unwrap();
    let mut sweep = vec![];
    for eps in [1e-2, 1e-3, 1e-4, 1e-5, 1e-6] {
        let c = evaluate_unambiguous(&sol, data, eps).unwrap();
        o.check(c.passed && (c.dual_value - (0.5 - eps)).abs() <= 1e-8, format!("Z2 c=0.5 fails at ε = {eps:e}"));
        sweep.push(format!("{eps:e}: {:.9}", c.dual_value));
    }
    o.note(format!("Z2 c=0.5 dual values {}", sweep.join(", ")));
    o
}

// 5

fn z2_analysis(c: f64) -> Analysis {
    let m = Multiplier::trivial(&build_cyclic(2).unwrap());
    let g = gram_from_coefficients(&[c64(1.0, 0.0), c64(c, 0.0)], &m).unwrap();
    analyze_gram(&g, Some(&builtin_irreps(&m).unwrap())).unwrap()
}

fn bisect(lo: f64, hi: f64, above: impl Fn(f64) -> bool) -> f64 {
    let (mut lo, mut hi) = (lo, hi);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if above(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

fn criterion_5() -> Outcome {
    let mut o = Outcome::default();
    let (mut wp, mut wq, mut mismatched) = (0.0f64, 0.0f64, 0);
    for k in 0..=100 {
        let c = k as f64 / 100.0;
        let a = z2_analysis(c);
        let p = (((1.0 + c).sqrt() - (1.0 - c).sqrt()).max(0.0) / 2.0).powi(2);
        wp = wp.max((a.probabilities.p_min - p).abs());
        wq = wq.max((a.probabilities.q_min - c).abs());
        let oracle = oracle_phase_search(a.lambdas(), 2, 4, k).unwrap().best_value;
        if a.probabilities.perfect != (c == 0.0) || (oracle == 0.0) != (c == 0.0) {
            mismatched += 1;
        }
    }
    o.note(format!("101 grid points: max |P - formula| {wp:.1e}, max |Q - c| {wq:.1e}"));
    o.check(wp <= 1e-10 && wq <= 1e-10, "closed forms miss the analytic family");
    o.check(mismatched == 0, format!("{mismatched} grid points with the wrong verdict"));
    // where does each route stop calling the ensemble perfect
    let t_formula = bisect(0.0, 1.0, |c| !z2_analysis(c).probabilities.perfect);
    let t_oracle = bisect(0.0, 1.0, |c| {
        let a = z2_analysis(c);
        oracle_phase_search(a.lambdas(), 2, 4, 0).unwrap().best_value > 0.0
    });
    o.note(format!("threshold by formula {t_formula:.2e}, by oracle bisection {t_oracle:.2e}"));
    o.check(t_formula <= 1e-9 && t_oracle <= 1e-9, "threshold is not c = 0");
    o
}

// 6

fn criterion_6() -> Outcome {
    let mut o = Outcome::default();
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let mut planner = FftPlanner::<f64>::new();
    let (mut total, mut perfect, mut disagree) = (0, 0, 0);
    for n in 2..=12 {
        let m = Multiplier::trivial(&build_cyclic(n).unwrap());
        let fft = planner.plan_fft_forward(n);
        for _ in 0..30 {
            // real seed, so c_k = Σ_i ψ_i ψ_{i+k} is real and symmetric
            let bias = 2.0 * rng.random::<f64>();
            let psi: Vec<f64> = (0..n).map(|_| bias + rng.sample::<f64, _>(StandardNormal)).collect();
            let norm: f64 = psi.iter().map(|x| x * x).sum::<f64>().sqrt();
            let psi: Vec<f64> = psi.iter().map(|x| x / norm).collect();
            let c: Vec<f64> = (0..n).map(|k| (0..n).map(|i| psi[i] * psi[(i + k) % n]).sum()).collect();
            let coeffs: Vec<C64> = c.iter().map(|&x| c64(x, 0.0)).collect();
            let verdict = analyze_gram(&gram_from_coefficients(&coeffs, &m).unwrap(), None)
                .unwrap()
                .probabilities
                .perfect;
            let mut buf = coeffs.clone();
            fft.process(&mut buf);
            let mut lam: Vec<f64> = buf.iter().map(|z| z.re.max(0.0)).collect();
            lam.sort_by(|a, b| b.total_cmp(a));
            let rest: f64 = lam[1..].iter().map(|x| x.sqrt()).sum();
            let dft_verdict = lam[0].sqrt() <= rest + 1e-10;
            total += 1;
            perfect += usize::from(dft_verdict);
            disagree += usize::from(verdict != dft_verdict);
        }
    }
    o.note(format!("{total} circulant Grams (n = 2..12), {perfect} perfect, {disagree} disagreements"));
    o.check(disagree == 0, "verdicts disagree");
    o.check(perfect > 0 && perfect < total, "sample does not cover both verdicts");
    o
}

// 7

fn criterion_7() -> Outcome {
    let mut o = Outcome::default();
    let k4 = build_klein_four();
    let mut tables: Vec<(String, GroupTable)> = vec![("K4".into(), k4.clone())];
    tables.extend((1..=12).map(|n| (format!("Z{n}"), build_cyclic(n).unwrap())));
    tables.extend((1..=8).filter_map(|n| build_dihedral(n).ok().map(|g| (format!("D{n}"), g))));
    for (name, t) in &tables {
        let v = validate_group_table(t);
        o.check(v.passed(), format!("{name}: {}", v.summary()));
        let inv_ok = t.elements().all(|g| t.mul(g, t.inv(g)) == 0 && t.mul(t.inv(g), g) == 0);
        o.check(inv_ok && t.identity() == 0, format!("{name}: identity or inverse table wrong"));
    }
    o.note(format!("{} built-in tables pass every group axiom", tables.len()));

    let mut multipliers: Vec<(String, Multiplier)> =
        tables.iter().map(|(n, t)| (format!("{n} trivial"), Multiplier::trivial(t))).collect();
    let rot = Multiplier::pauli_rotations(&k4).unwrap();
    multipliers.push(("K4 Pauli".into(), Multiplier::pauli(&k4).unwrap()));
    multipliers.push(("K4 spin rotations".into(), rot.clone()));
    multipliers.push(("K4 spin rotations, normalized".into(), normalize_multiplier(&rot)));
    for (name, m) in &multipliers {
        let c = m.check();
        o.check(c.passed(), format!("{name}: {:?}", c.first_problem()));
    }
    o.note(format!("{} multipliers pass the cocycle identity on all triples", multipliers.len()));

    let mut catalogs: Vec<(String, IrrepCatalog)> = multipliers
        .iter()
        .filter_map(|(n, m)| builtin_irreps(m).ok().map(|c| (n.clone(), c)))
        .collect();
    let d3 = Job::load(&repo().join("fixtures/d3_table.json")).unwrap();
    catalogs.push(("D3 catalog file".into(), d3.catalog.clone().unwrap()));
    let mut worst: f64 = 0.0;
    for (name, c) in &catalogs {
        let dev = great_orthogonality_check(c);
        worst = worst.max(dev);
        o.check(dev <= 1e-10 && c.is_complete(), format!("{name}: orthogonality deviation {dev:.1e}"));
    }
    o.note(format!("{} catalogs, max orthogonality deviation {worst:.1e}", catalogs.len()));

    // POVM transfer between the state space and ℂ^N
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let n = rng.random_range(2..=6);
        let d = rng.random_range(1..=4);
        let cols: Vec<CVec> = (0..n).map(|_| random_unit(&mut rng, d, 0.0)).collect();
        let x = CMat::from_columns(&cols) / c64((n as f64).sqrt(), 0.0);
        let count = rng.random_range(2..=5);
        let povm = random_povm(&mut rng, d, count);
        let direct = joint_probabilities(&x, &povm);
        let xi = transfer_povm(&x, &povm, TransferDirection::Forward).unwrap();
        let back = transfer_povm(&x, &xi, TransferDirection::Converse).unwrap();
        // another ensemble with the same Gram matrix: the columns of √(X†X)
        let y = sqrtm_psd(&(x.adjoint() * &x)).unwrap();
        let moved = transfer_between(&x, &y, &povm).unwrap();
        for other in [index_probabilities(&xi), joint_probabilities(&x, &back), joint_probabilities(&y, &moved)] {
            for (r, s) in direct.iter().zip(&other) {
                for (a, b) in r.iter().zip(s) {
                    worst = worst.max((a - b).abs());
                }
            }
        }
    }
    o.note(format!("50 transfer instances, max joint-probability change {worst:.1e}"));
    o.check(worst <= 1e-9, "POVM transfer changes joint probabilities");

    let mut worst: f64 = 0.0;
    let mut count = 0;
    for (_, m) in multipliers.iter().filter(|(n, _)| !n.contains("rotations")) {
        let Ok(cat) = builtin_irreps(m) else { continue };
        if m.group().order() > 8 {
            continue;
        }
        let irrep = cat.irreps().iter().max_by_key(|i| i.dim()).unwrap();
        let reg = left_regular(m).unwrap();
        for _ in 0..3 {
            let e = Ensemble::new(irrep.rep.clone(), random_unit(&mut rng, irrep.dim(), 0.3)).unwrap();
            let phi = associated_ensemble(&gram_from_states(&e)).unwrap();
            for g in m.group().elements() {
                for h in m.group().elements() {
                    let lhs = reg.matrix(g) * phi.state(h);
                    let rhs = phi.state(m.group().mul(g, h)) * m.omega(g, h);
                    worst = worst.max((lhs - rhs).norm());
                }
            }
            count += 1;
        }
    }
    o.note(format!("{count} associated ensembles, max covariance deviation {worst:.1e}"));
    o.check(worst <= 1e-9, "associated ensemble is not covariant");
    o
}

// 8

fn criterion_8() -> Outcome {
    let mut o = Outcome::default();
    let validator = report_validator();
    let mut runs = 0;
    for f in FIXTURES {
        for c in COMMANDS {
            let a = qse_on(c, &fixture(f), &["--samples", "500"]);
            let b = qse_on(c, &fixture(f), &["--samples", "500"]);
            runs += 1;
            o.check(a.code == 0, format!("{c} {f} exits {}: {}", a.code, a.stderr.trim()));
            o.check(a.stdout == b.stdout, format!("{c} {f} is not reproducible"));
            match serde_json::from_str(&a.stdout) {
                Ok(doc) => {
                    let errs = schema_errors(&validator, &doc);
                    o.check(errs.is_empty(), format!("{c} {f} report violates the schema: {errs:?}"));
                }
                Err(e) => o.check(false, format!("{c} {f} report is not JSON: {e}")),
            }
        }
    }
    o.note(format!("{runs} command/fixture pairs, each run twice"));

    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, text: &str| {
        let p = dir.path().join(name);
        std::fs::write(&p, text).unwrap();
        p
    };
    let malformed = write("malformed.json", "{\"group\": [");
    let not_psd = write("not_psd.json", r#"{"group": {"builtin": "cyclic", "n": 2}, "gram_coefficients": [[1, 0], [2, 0]]}"#);
    let no_catalog = write("no_catalog.json", r#"{"group": {"table": [[0, 1], [1, 0]]}, "gram_coefficients": [[1, 0], [0.5, 0]]}"#);
    let z3 = fixture("z3_c09");
    let cases: [(&str, Vec<&str>, i32); 5] = [
        ("schema", vec!["analyze", malformed.to_str().unwrap()], 2),
        ("invalid Gram", vec!["analyze", not_psd.to_str().unwrap()], 3),
        ("unsupported", vec!["povm", no_catalog.to_str().unwrap()], 4),
        ("certificate", vec!["certify", z3.to_str().unwrap(), "--corrupt-seed", "0.05"], 5),
        ("oracle", vec!["oracle", z3.to_str().unwrap(), "--samples", "10", "--tol", "1e-300"], 6),
    ];
    let mut codes = vec![];
    for (what, args, want) in cases {
        let got = qse(&args).code;
        codes.push(format!("{what} {got}"));
        o.check(got == want, format!("{what} failure exits {got}, expected {want}"));
    }
    o.note(format!("exit codes: {}", codes.join(", ")));
    o
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 8] = [
        ("SIC tetrahedron golden case", criterion_1),
        ("Pauli regular representation golden matrices", criterion_2),
        ("closed forms against oracles", criterion_3),
        ("dual certification", criterion_4),
        ("Z2 analytic family", criterion_5),
        ("circulant verdicts against the DFT", criterion_6),
        ("structural suites", criterion_7),
        ("CLI contract", criterion_8),
    ];
    let mut failed = 0;
    for (k, (title, f)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Outcome {
                failures: vec![format!("panicked: {msg}")],
                details: vec![],
            }
        });
        let pass = outcome.failures.is_empty();
        println!("criterion {} ({title}): {}", k + 1, if pass { "PASS" } else { "FAIL" });
        for d in &outcome.details {
            println!("    {d}");
        }
        for f in &outcome.failures {
            println!("    failed: {f}");
        }
        failed += usize::from(!pass);
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
