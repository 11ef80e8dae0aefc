//! Command dispatch: each command delegates to the library and collects a `Report`.

use std::collections::BTreeMap;
use std::sync::Arc;

use gkm::cartan::{CartanDatum, Weight};
use gkm::classical::{
    classical_irreducible_full, classical_module, flatness, weyl_kac_multiplicities, ClassicalSide,
};
use gkm::freealg::Multidegree;
use gkm::kz::{drinfeld_kohno_compare, loop_defect, permutation_defect, DkSetup, Tolerance};
use gkm::qmodules::{
    check_relations, compare_characters, irreducible, irreducible_full, verma, ModuleKind, QuantumFlavor, WeightModule,
};
use gkm::qpairing::PairingEngine;
use gkm::rmatrix::{check_intertwiner, check_ybe, highest_pair_eigenvalue, ModuleAction, SlotOrder};
use gkm::scalars::QScalar;
use gkm::{Error, Result};

use crate::config::SessionConfig;
use crate::report::{input_digest, Report, Table};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Symmetrize,
    Relations,
    Dims,
    Character,
    CompareCharacters,
    Ybe,
    Dk,
}

impl Command {
    pub const ALL: [Command; 7] = [
        Command::Symmetrize,
        Command::Relations,
        Command::Dims,
        Command::Character,
        Command::CompareCharacters,
        Command::Ybe,
        Command::Dk,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Command::Symmetrize => "symmetrize",
            Command::Relations => "relations",
            Command::Dims => "dims",
            Command::Character => "character",
            Command::CompareCharacters => "compare-characters",
            Command::Ybe => "ybe",
            Command::Dk => "dk",
        }
    }

    pub fn parse(name: &str) -> Option<Command> {
        Command::ALL.into_iter().find(|c| c.name() == name)
    }

    /// Commands whose output involves floating point.
    pub fn is_numeric(&self) -> bool {
        matches!(self, Command::Dk)
    }
}

/// Datum, session denominator and highest weights built from a configuration.
pub struct Session {
    pub cd: Arc<CartanDatum>,
    pub engine: PairingEngine,
    pub side: ClassicalSide,
    pub weights: Vec<Weight>,
}

impl Session {
    pub fn new(config: &SessionConfig) -> Result<Self> {
        let cd = Arc::new(config.datum()?);
        let weights = config
            .highest_weights
            .iter()
            .map(|w| Weight::from_coroot_values(w, &cd))
            .collect::<Result<Vec<_>>>()?;
        let den = cd.session_denominator(&weights)?;
        let engine = PairingEngine::with_denominator(cd.clone(), den)?.with_cap(config.degree_cap);
        let side = ClassicalSide::new(cd.clone()).with_cap(config.degree_cap);
        Ok(Session {
            cd,
            engine,
            side,
            weights,
        })
    }

    fn first_weight(&self) -> Result<&Weight> {
        self.weights
            .first()
            .ok_or_else(|| Error::Dimension("this command needs a highest weight (--hw)".into()))
    }
}

pub fn run(command: Command, config: &SessionConfig) -> Result<Report> {
    let mut report = Report::new(command.name(), input_digest(command.name(), &config.emit()));
    let session = Session::new(config)?;
    report.meta("rank", session.cd.rank());
    report.meta("h_dim", session.cd.h_dim());
    report.meta("denominator", session.engine.denominator().value());
    match command {
        Command::Symmetrize => symmetrize(&session, &mut report),
        Command::Relations => relations(&session, config, &mut report)?,
        Command::Dims => dims(&session, config, &mut report)?,
        Command::Character => character(&session, config, &mut report)?,
        Command::CompareCharacters => compare(&session, config, &mut report)?,
        Command::Ybe => ybe(&session, config, &mut report)?,
        Command::Dk => dk(&session, config, &mut report)?,
    }
    Ok(report)
}

fn symmetrize(session: &Session, report: &mut Report) {
    let cd = &session.cd;
    let mut t = Table::new("symmetrizers", &["i", "d_i"]);
    for i in 0..cd.rank() {
        t.push(vec![(i + 1).to_string(), cd.d(i).to_string()]);
    }
    report.meta("generalized_cartan", cd.is_generalized_cartan());
    let symmetric = (0..cd.rank()).all(|i| (0..cd.rank()).all(|j| cd.root_pairing(i, j) == cd.root_pairing(j, i)));
    report.verdict("d_i a_ij symmetric", symmetric, "");
    report.verdict("invariants", cd.check_invariants().is_ok(), "");
    report.tables.push(t);
}

fn relations(session: &Session, config: &SessionConfig, report: &mut Report) -> Result<()> {
    let n = session.cd.rank();
    let mut t = Table::new(
        "relations",
        &["degree", "words", "gram_rank", "kernel_rank", "quotient_dim", "symmetric"],
    );
    let mut all_symmetric = true;
    let mut ideal_ok = true;
    for m in Multidegree::up_to(n, config.degree_cap) {
        let block = session.engine.gram_block(&m)?;
        let kernel = block.kernel();
        all_symmetric &= block.is_symmetric();
        if kernel.kernel_rank() > 0 && m.total() < config.degree_cap {
            ideal_ok &= session.engine.check_ideal_property(&kernel)?;
        }
        t.push(vec![
            m.to_string(),
            block.size().to_string(),
            kernel.gram_rank.to_string(),
            kernel.kernel_rank().to_string(),
            kernel.quotient_dim.to_string(),
            block.is_symmetric().to_string(),
        ]);
    }
    report.verdict("gram blocks symmetric", all_symmetric, "");
    report.verdict("kernel is an ideal", ideal_ok, "");
    if session.cd.is_generalized_cartan() {
        let mut s = Table::new("serre", &["i", "j", "degree", "in_kernel"]);
        let mut ok = true;
        for r in session.engine.verify_all_serre()? {
            if r.degree.total() > config.degree_cap {
                continue;
            }
            ok &= r.in_kernel;
            s.push(vec![
                (r.i + 1).to_string(),
                (r.j + 1).to_string(),
                r.degree.to_string(),
                r.in_kernel.to_string(),
            ]);
        }
        report.verdict("quantum Serre elements in kernel", ok, "");
        report.tables.push(t);
        report.tables.push(s);
    } else {
        report.meta("serre", "not applicable: matrix is not a generalized Cartan matrix");
        report.tables.push(t);
    }
    Ok(())
}

fn dims(session: &Session, config: &SessionConfig, report: &mut Report) -> Result<()> {
    let cap = config.degree_cap;
    let rows = flatness(&session.engine, &session.side, cap)?;
    let mults = session.side.lie_multiplicities(cap)?;
    let pbw = session.side.root_multiplicities(cap)?;
    let wk: Option<BTreeMap<Multidegree, usize>> = if session.cd.is_generalized_cartan() {
        Some(weyl_kac_multiplicities(&session.cd, cap)?)
    } else {
        None
    };
    let mut t = Table::new(
        "dims",
        &[
            "degree",
            "words",
            "quantum_kernel",
            "classical_relations",
            "quantum_quotient",
            "multiplicity",
            "weyl_kac",
        ],
    );
    for r in &rows {
        t.push(vec![
            r.degree.to_string(),
            r.words.to_string(),
            r.quantum_kernel.to_string(),
            r.classical_relations.to_string(),
            (r.words - r.quantum_kernel).to_string(),
            mults[&r.degree].to_string(),
            wk.as_ref().map_or("-".to_string(), |w| w.get(&r.degree).copied().unwrap_or(0).to_string()),
        ]);
    }
    let flat = rows.iter().filter(|r| !r.flat()).count();
    report.verdict("quantum kernel = classical relations", flat == 0, format!("{} mismatches", flat));
    report.verdict("PBW inversion = Lie multiplicities", pbw == mults, "");
    if let Some(w) = &wk {
        let agree = mults.iter().all(|(m, k)| w.get(m).copied().unwrap_or(0) == *k);
        report.verdict("Weyl-Kac multiplicities", agree, "");
    } else {
        report.meta("weyl_kac", "not applicable: matrix is not a generalized Cartan matrix");
    }
    report.tables.push(t);
    Ok(())
}

fn quantum_module(session: &Session, config: &SessionConfig, highest: &Weight) -> Result<WeightModule<QScalar>> {
    match config.module {
        ModuleKind::Verma => verma(&session.engine, highest.clone(), config.depth),
        ModuleKind::Irreducible => irreducible(&session.engine, highest.clone(), config.depth),
    }
}

fn weight_label(cd: &CartanDatum, m: &WeightModule<QScalar>, offset: &Multidegree) -> String {
    (0..cd.rank())
        .map(|i| cd.coroot_value(i, &m.weight(offset)).map(|x| x.to_string()).unwrap_or_default())
        .collect::<Vec<_>>()
        .join(" ")
}

fn character(session: &Session, config: &SessionConfig, report: &mut Report) -> Result<()> {
    let flavor = QuantumFlavor::new(session.cd.clone(), session.engine.denominator());
    if session.weights.is_empty() {
        session.first_weight()?;
    }
    for (k, lam) in session.weights.iter().enumerate() {
        let module = quantum_module(session, config, lam)?;
        let rel = check_relations(&flavor, &module)?;
        report.verdict(
            &format!("relations hold on module {}", k + 1),
            rel.holds(),
            format!("{} identities checked", rel.checked),
        );
        let mut t = Table::new(&format!("character {}", k + 1), &["offset", "weight", "dim"]);
        for (m, d) in module.character() {
            t.push(vec![m.to_string(), weight_label(&session.cd, &module, &m), d.to_string()]);
        }
        report.meta(&format!("module {}", k + 1), format!("{} complete={}", module.kind().name(), module.is_complete()));
        report.tables.push(t);
    }
    Ok(())
}

fn compare(session: &Session, config: &SessionConfig, report: &mut Report) -> Result<()> {
    if session.weights.is_empty() {
        session.first_weight()?;
    }
    for (k, lam) in session.weights.iter().enumerate() {
        let quantum = quantum_module(session, config, lam)?;
        let classical = classical_module(&session.side, lam.clone(), config.module, config.depth)?;
        let cmp = compare_characters(&quantum.character(), &classical.character());
        let mut t = Table::new(&format!("characters {}", k + 1), &["offset", "quantum", "classical"]);
        for (m, a, b) in &cmp.entries {
            t.push(vec![m.to_string(), a.to_string(), b.to_string()]);
        }
        report.verdict(
            &format!("characters agree for weight {}", k + 1),
            cmp.agree(),
            format!("{} mismatches", cmp.mismatches().len()),
        );
        report.tables.push(t);
    }
    Ok(())
}

fn ybe(session: &Session, config: &SessionConfig, report: &mut Report) -> Result<()> {
    let lam = session.first_weight()?;
    let module = quantum_module(session, config, lam)?;
    let action = ModuleAction::new(&module, session.engine.denominator())?;
    let rep = check_ybe(&session.engine, &action)?;
    let mut t = Table::new("ybe", &["offset", "dim", "braid_relation"]);
    for b in &rep.blocks {
        t.push(vec![b.offset.to_string(), b.dim.to_string(), if b.holds { "pass" } else { "fail" }.into()]);
    }
    report.meta("convention", rep.convention.name());
    report.meta("module_dim", action.dim());
    report.meta("blocks_beyond_depth", rep.skipped);
    report.verdict("braid relation on every block", rep.holds(), format!("{} blocks", rep.blocks.len()));
    let (eig, ok) = highest_pair_eigenvalue(&session.engine, &action, &action)?;
    report.verdict("highest pair eigenvalue", ok, eig);
    let inter = check_intertwiner(&session.engine, &action, &action, SlotOrder::default())?;
    report.verdict(
        "sigma R commutes with the coproduct",
        inter.holds(),
        format!("{} checks", inter.checked),
    );
    report.tables.push(t);
    Ok(())
}

fn dk(session: &Session, config: &SessionConfig, report: &mut Report) -> Result<()> {
    let lam = session.first_weight()?;
    let setup = DkSetup {
        strands: config.strands,
        hbar: config.hbar,
        tolerance: Tolerance::with_relative(config.tolerance),
        word_len: config.word_length,
        max_depth: config.depth.max(1),
    };
    // make sure both modules are finite before integrating
    irreducible_full(&session.engine, lam.clone(), setup.max_depth)?;
    classical_irreducible_full(&session.side, lam.clone(), setup.max_depth)?;
    let rep = drinfeld_kohno_compare(&session.engine, &session.side, lam, &setup)?;
    let loop_dev = loop_defect(&session.side, lam, &setup)?;
    let threshold = config.deviation_threshold;
    report.meta("hbar", format!("{} {}", config.hbar.re, config.hbar.im));
    report.meta("strands", config.strands);
    report.meta("module_dim", rep.monodromy[0].nrows());
    report.verdict(
        "traces agree",
        rep.max_trace_deviation() < threshold,
        format!("max deviation {:.3e}", rep.max_trace_deviation()),
    );
    report.verdict(
        "generator eigenvalues agree",
        rep.max_eigen_deviation() < threshold,
        format!("max deviation {:.3e}", rep.max_eigen_deviation()),
    );
    let loop_limit = 100.0 * config.tolerance;
    report.verdict(
        "contractible loop is trivial",
        loop_dev < loop_limit,
        format!("deviation {:.3e}", loop_dev),
    );
    let perm = permutation_defect(&session.side, lam, &setup)?;
    report.verdict(
        "zero hbar gives the permutation action",
        perm < loop_limit,
        format!("deviation {:.3e}", perm),
    );
    let mut t = Table::new("traces", &["word", "monodromy", "braiding", "deviation"]);
    for r in &rep.traces {
        t.push(vec![
            r.word.clone(),
            format_complex(r.monodromy),
            format_complex(r.braiding),
            format!("{:.3e}", r.deviation()),
        ]);
    }
    let mut e = Table::new("eigenvalues", &["generator", "monodromy", "braiding", "deviation"]);
    for r in &rep.eigenvalues {
        let mut a = r.monodromy.clone();
        let mut b = r.braiding.clone();
        let key = |z: &num_complex::Complex64| (z.re, z.im);
        a.sort_by(|x, y| key(x).partial_cmp(&key(y)).unwrap_or(std::cmp::Ordering::Equal));
        b.sort_by(|x, y| key(x).partial_cmp(&key(y)).unwrap_or(std::cmp::Ordering::Equal));
        e.push(vec![
            format!("b{}", r.generator + 1),
            a.iter().map(|z| format_complex(*z)).collect::<Vec<_>>().join(" "),
            b.iter().map(|z| format_complex(*z)).collect::<Vec<_>>().join(" "),
            format!("{:.3e}", r.deviation),
        ]);
    }
    report.tables.push(e);
    report.tables.push(t);
    Ok(())
}

/// Fixed precision so that round-off below the integrator tolerance does not leak into reports.
pub fn format_complex(z: num_complex::Complex64) -> String {
    let clean = |x: f64| if x.abs() < 5e-10 { 0.0 } else { x };
    format!("{:.8}{:+.8}i", clean(z.re), clean(z.im))
}
