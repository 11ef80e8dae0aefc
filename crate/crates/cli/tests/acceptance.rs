//! One line per acceptance criterion. Runs without the libtest harness so the lines are
//! always printed; exits nonzero if any required check fails.

use std::process::Command as Process;
use std::sync::Arc;
use std::time::Instant;

use gkm::cartan::{int, int_matrix, rat, symmetrize, CartanDatum, Rational, Weight};
use gkm::classical::{
    classical_irreducible_full, classical_module, flatness, int_weight, weyl_kac_multiplicities, ClassicalSide,
};
use gkm::freealg::Multidegree;
use gkm::kz::{drinfeld_kohno_compare, loop_defect, permutation_defect, DkSetup};
use gkm::linalg::Matrix;
use gkm::qmodules::{check_relations, compare_characters, irreducible, irreducible_full, verma, ModuleKind, QuantumFlavor};
use gkm::qpairing::PairingEngine;
use gkm::rmatrix::{check_ybe, highest_pair_eigenvalue, ModuleAction};
use gkm::scalars::QScalar;
use gkm::Error;
use gkm_cli::Command;

const SL2: &[&[i64]] = &[&[2]];
const SL2_SQUARED: &[&[i64]] = &[&[2, 0], &[0, 2]];
const SL3: &[&[i64]] = &[&[2, -1], &[-1, 2]];
const AFFINE_SL2: &[&[i64]] = &[&[2, -2], &[-2, 2]];

enum Outcome {
    Pass(String),
    Fail(String),
    /// The literal statement cannot hold; the substitute check passed or failed.
    Unattainable { why: String, substitute: Result<String, String> },
}

type Check = Result<String, String>;

type Criterion = Box<dyn Fn() -> Outcome>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: Error) -> String {
    e.to_string()
}

fn datum(rows: &[&[i64]]) -> Arc<CartanDatum> {
    Arc::new(CartanDatum::from_matrix(&int_matrix(rows)).unwrap())
}

fn engine_for(cd: &Arc<CartanDatum>, weights: &[Weight]) -> Result<PairingEngine, String> {
    let den = cd.session_denominator(weights).map_err(err)?;
    PairingEngine::with_denominator(cd.clone(), den).map_err(err)
}

fn symmetrizability() -> Check {
    let start = Instant::now();
    let d = symmetrize(&int_matrix(&[&[2, -2], &[-1, 2]])).map_err(err)?;
    let rejected = symmetrize(&int_matrix(&[&[2, -1], &[0, 2]]));
    let elapsed = start.elapsed();
    ensure(d == vec![int(1), int(2)], || format!("d = {:?}", d))?;
    ensure(matches!(rejected, Err(Error::NotSymmetrizable { .. })), || {
        format!("[[2,-1],[0,2]] gave {:?}", rejected)
    })?;
    Ok(format!("d = (1, 2); [[2,-1],[0,2]] rejected; {:.3} ms", elapsed.as_secs_f64() * 1e3))
}

fn pairing_normalization() -> Check {
    let mut blocks = 0;
    for rows in [SL3, AFFINE_SL2] {
        let cd = datum(rows);
        let engine = PairingEngine::new(cd.clone()).map_err(err)?;
        let q = engine.denominator().q_power(&int(1)).map_err(err)?;
        let expected = QScalar::one().div(&q.sub(&q.inv().map_err(err)?)).map_err(err)?;
        for i in 0..cd.rank() {
            let b = engine.gram_block(&Multidegree::unit(cd.rank(), i)).map_err(err)?.matrix();
            ensure(b.rows() == 1 && *b.get(0, 0) == expected, || format!("B(E_{0}, E_{0}) = {1}", i + 1, b.get(0, 0)))?;
        }
        for m in Multidegree::up_to(cd.rank(), 6) {
            let block = engine.gram_block(&m).map_err(err)?;
            ensure(block.is_symmetric(), || format!("block {} not symmetric", m))?;
            blocks += 1;
        }
        if let Some((x, z)) = gkm_oracle::first_disagreement(&engine, 4) {
            return Err(format!("oracle disagrees on ({}, {})", x, z));
        }
    }
    Ok(format!(
        "1x1 blocks = 1/(q - q^-1); {} blocks symmetric to degree 6; oracle agrees to degree 4",
        blocks
    ))
}

fn quantum_serre() -> Check {
    let mut checked = 0;
    for rows in [SL2_SQUARED, SL3, AFFINE_SL2] {
        let engine = PairingEngine::new(datum(rows)).map_err(err)?;
        for r in engine.verify_all_serre().map_err(err)? {
            ensure(r.in_kernel, || format!("Serre ({}, {}) pairs nontrivially with {:?}", r.i + 1, r.j + 1, r.failures))?;
            checked += 1;
        }
    }
    let engine = PairingEngine::new(datum(SL3)).map_err(err)?;
    let k = engine.kernel_block(&Multidegree::new(vec![2, 1])).map_err(err)?.kernel_rank();
    ensure(k == 1, || format!("sl3 kernel at (2,1) has rank {}", k))?;
    Ok(format!("{} Serre elements in the kernel; sl3 kernel at (2,1) has rank 1", checked))
}

fn flatness_check() -> Outcome {
    let cases: Vec<(&str, Matrix<Rational>, usize)> = vec![
        ("sl3", int_matrix(SL3), 6),
        ("affine sl2", int_matrix(AFFINE_SL2), 6),
        (
            "[[2,-1/2],[-1/2,2]]",
            Matrix::from_rows(vec![vec![int(2), rat(-1, 2)], vec![rat(-1, 2), int(2)]]),
            5,
        ),
    ];
    let mut degrees = 0;
    let mut literal_mismatch = 0;
    let mut substitute = Ok(());
    for (name, a, cap) in cases {
        let rows = CartanDatum::from_matrix(&a).and_then(|cd| {
            let cd = Arc::new(cd);
            let engine = PairingEngine::new(cd.clone())?;
            flatness(&engine, &ClassicalSide::new(cd), cap)
        });
        let rows = match rows {
            Ok(r) => r,
            Err(e) => return Outcome::Fail(format!("{}: {}", name, e)),
        };
        for r in rows {
            degrees += 1;
            if r.quantum_kernel != r.specialized_kernel {
                literal_mismatch += 1;
            }
            if substitute.is_ok() && !r.flat() {
                substitute = Err(format!(
                    "{} at {}: quantum kernel {}, classical relations {}",
                    name, r.degree, r.quantum_kernel, r.classical_relations
                ));
            }
        }
    }
    if literal_mismatch == 0 {
        return match substitute {
            Ok(()) => Outcome::Pass(format!("{} degrees", degrees)),
            Err(e) => Outcome::Fail(e),
        };
    }
    Outcome::Unattainable {
        why: format!(
            "kernel of the v = 1 normalized block differs from the generic kernel at {} of {} degrees; \
             at v = 1 every normalized entry is prod m_i!, so that block has rank 1",
            literal_mismatch, degrees
        ),
        substitute: substitute.map(|()| {
            format!("generic kernel rank = classical relation dimension at all {} degrees", degrees)
        }),
    }
}

fn root_multiplicities() -> Check {
    let cd = datum(AFFINE_SL2);
    let side = ClassicalSide::new(cd.clone());
    let mults = side.lie_multiplicities(6).map_err(err)?;
    let wk = weyl_kac_multiplicities(&cd, 6).map_err(err)?;
    let roots: Vec<_> = mults.iter().filter(|(_, k)| **k > 0).collect();
    ensure(roots.iter().all(|(_, k)| **k == 1), || format!("multiplicities {:?}", roots))?;
    for (m, k) in &mults {
        let w = wk.get(m).copied().unwrap_or(0);
        ensure(w == *k, || format!("at {}: Lie block {}, Weyl-Kac {}", m, k, w))?;
    }
    Ok(format!("{} roots through degree 6, all multiplicity 1, matching Weyl-Kac", roots.len()))
}

struct ModuleCase {
    name: String,
    rows: &'static [&'static [i64]],
    weight: Vec<i64>,
    /// `None` builds the full finite module.
    depth: Option<usize>,
}

fn character_cases() -> Vec<ModuleCase> {
    let mut cases = Vec::new();
    for top in [0, 1, 3] {
        cases.push(ModuleCase {
            name: format!("sl2 L({})", top),
            rows: SL2,
            weight: vec![top],
            depth: None,
        });
    }
    for w in [vec![1, 0], vec![1, 1]] {
        cases.push(ModuleCase {
            name: format!("sl3 L({},{})", w[0], w[1]),
            rows: SL3,
            weight: w,
            depth: None,
        });
    }
    cases.push(ModuleCase {
        name: "affine sl2 L(1,0)".into(),
        rows: AFFINE_SL2,
        weight: vec![1, 0],
        depth: Some(5),
    });
    cases
}

fn characters() -> Check {
    let mut summary = Vec::new();
    for case in character_cases() {
        let cd = datum(case.rows);
        let highest = int_weight(&cd, &case.weight).map_err(err)?;
        let engine = engine_for(&cd, std::slice::from_ref(&highest))?;
        let side = ClassicalSide::new(cd.clone());
        let (quantum, classical) = match case.depth {
            None => (
                irreducible_full(&engine, highest.clone(), 8).map_err(err)?,
                classical_irreducible_full(&side, highest, 8).map_err(err)?,
            ),
            Some(d) => (
                irreducible(&engine, highest.clone(), d).map_err(err)?,
                classical_module(&side, highest, ModuleKind::Irreducible, d).map_err(err)?,
            ),
        };
        let cmp = compare_characters(&quantum.character(), &classical.character());
        ensure(cmp.agree(), || format!("{}: {:?}", case.name, cmp.mismatches()))?;
        summary.push(format!("{} (dim {})", case.name, quantum.character().values().sum::<usize>()));
    }
    Ok(summary.join(", "))
}

fn module_relations() -> Check {
    let mut modules = 0;
    let mut identities = 0;
    for case in character_cases() {
        let cd = datum(case.rows);
        let highest = int_weight(&cd, &case.weight).map_err(err)?;
        let engine = engine_for(&cd, std::slice::from_ref(&highest))?;
        let flavor = QuantumFlavor::new(cd.clone(), engine.denominator());
        let depth = case.depth.unwrap_or(4);
        let built = [
            verma(&engine, highest.clone(), depth).map_err(err)?,
            irreducible(&engine, highest, depth).map_err(err)?,
        ];
        for module in &built {
            let report = check_relations(&flavor, module).map_err(err)?;
            ensure(report.holds(), || format!("{} {}: {:?}", case.name, module.kind().name(), report.failures))?;
            modules += 1;
            identities += report.checked;
        }
    }
    Ok(format!("{} identities on {} Verma and irreducible modules", identities, modules))
}

fn yang_baxter() -> Check {
    let cd = datum(SL2);
    let highest = int_weight(&cd, &[1]).map_err(err)?;
    let engine = engine_for(&cd, std::slice::from_ref(&highest))?;
    let module = irreducible_full(&engine, highest, 4).map_err(err)?;
    let action = ModuleAction::new(&module, engine.denominator()).map_err(err)?;
    let report = check_ybe(&engine, &action).map_err(err)?;
    ensure(report.holds() && report.skipped == 0, || format!("{:?}", report.blocks))?;
    let (eigen, ok) = highest_pair_eigenvalue(&engine, &action, &action).map_err(err)?;
    ensure(ok, || format!("highest pair is not an eigenvector with eigenvalue {}", eigen))?;
    Ok(format!(
        "braid relation on all {} weight blocks of V^(x)3; highest pair eigenvalue {}",
        report.blocks.len(),
        eigen
    ))
}

fn drinfeld_kohno() -> Check {
    let start = Instant::now();
    let cd = datum(SL2);
    let highest = int_weight(&cd, &[1]).map_err(err)?;
    let engine = engine_for(&cd, std::slice::from_ref(&highest))?;
    let side = ClassicalSide::new(cd);
    let setup = DkSetup::default();
    let report = drinfeld_kohno_compare(&engine, &side, &highest, &setup).map_err(err)?;
    let loop_dev = loop_defect(&side, &highest, &setup).map_err(err)?;
    let perm = permutation_defect(&side, &highest, &setup).map_err(err)?;
    ensure(report.max_trace_deviation() < 1e-6, || format!("trace deviation {:.3e}", report.max_trace_deviation()))?;
    ensure(report.max_eigen_deviation() < 1e-6, || format!("eigenvalue deviation {:.3e}", report.max_eigen_deviation()))?;
    ensure(loop_dev < 1e-7, || format!("loop deviation {:.3e}", loop_dev))?;
    ensure(perm < 1e-12, || format!("hbar = 0 deviation {:.3e}", perm))?;
    let elapsed = start.elapsed().as_secs_f64();
    ensure(elapsed < 300.0, || format!("took {:.1} s", elapsed))?;
    Ok(format!(
        "{} traces within {:.2e}, eigenvalues within {:.2e}, loop {:.2e}, hbar = 0 permutation {:.1e}; {:.2} s",
        report.traces.len(),
        report.max_trace_deviation(),
        report.max_eigen_deviation(),
        loop_dev,
        perm,
        elapsed
    ))
}

fn determinism() -> Check {
    let dir = std::env::temp_dir().join(format!("gkm-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let configs = [
        ("sl3", "matrix = 2 -1; -1 2\ndegree_cap = 5\ndepth = 4\nhighest_weights = 1 0; 1 1\n"),
        ("affine", "matrix = 2 -2; -2 2\ndegree_cap = 5\ndepth = 4\nhighest_weights = 1 0\n"),
        ("sl2", "matrix = 2\ndepth = 3\nhighest_weights = 1\n"),
    ];
    let mut runs = 0;
    for (name, text) in configs {
        let path = dir.join(format!("{}.cfg", name));
        std::fs::write(&path, text).map_err(|e| e.to_string())?;
        for cmd in Command::ALL.into_iter().filter(|c| !c.is_numeric()) {
            let run = || {
                Process::new(env!("CARGO_BIN_EXE_gkm"))
                    .args([cmd.name(), "--config", path.to_str().unwrap()])
                    .output()
                    .map_err(|e| e.to_string())
            };
            let (a, b) = (run()?, run()?);
            ensure(a.status.code() == Some(0), || {
                format!("{} {}: {}", cmd.name(), name, String::from_utf8_lossy(&a.stderr))
            })?;
            ensure(a.stdout == b.stdout, || format!("{} on {} differs between runs", cmd.name(), name))?;
            runs += 1;
        }
    }
    let _ = std::fs::remove_dir_all(&dir);
    Ok(format!("{} command/config pairs byte-identical across two runs", runs))
}

fn main() {
    let criteria: Vec<(usize, &str, Criterion)> = vec![
        (1, "symmetrizability", Box::new(|| symmetrizability().into())),
        (2, "pairing normalization", Box::new(|| pairing_normalization().into())),
        (3, "quantum Serre", Box::new(|| quantum_serre().into())),
        (4, "flatness", Box::new(flatness_check)),
        (5, "root multiplicities", Box::new(|| root_multiplicities().into())),
        (6, "characters", Box::new(|| characters().into())),
        (7, "module relations", Box::new(|| module_relations().into())),
        (8, "Yang-Baxter", Box::new(|| yang_baxter().into())),
        (9, "Drinfeld-Kohno", Box::new(|| drinfeld_kohno().into())),
        (10, "determinism", Box::new(|| determinism().into())),
    ];
    let mut failed = 0;
    for (n, name, check) in criteria {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Outcome::Pass(detail) => println!("criterion {:>2} PASS  {} ({:.2} s): {}", n, name, secs, detail),
            Outcome::Fail(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {} ({:.2} s): {}", n, name, secs, detail)
            }
            Outcome::Unattainable { why, substitute } => {
                let sub = match substitute {
                    Ok(s) => format!("substitute check passed: {}", s),
                    Err(s) => {
                        failed += 1;
                        format!("substitute check FAILED: {}", s)
                    }
                };
                println!("criterion {:>2} UNATTAINABLE  {} ({:.2} s): {}; {}", n, name, secs, why, sub)
            }
        }
    }
    if failed > 0 {
        eprintln!("{} criteria failed", failed);
        std::process::exit(1);
    }
}

impl From<Check> for Outcome {
    fn from(c: Check) -> Self {
        match c {
            Ok(s) => Outcome::Pass(s),
            Err(s) => Outcome::Fail(s),
        }
    }
}
