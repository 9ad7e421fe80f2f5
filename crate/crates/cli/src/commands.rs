use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use mukai_core::classes::{self, ChernData};
use mukai_core::constants::{ConstantValue, ConstantsRegistry};
use mukai_core::flags::{self, FlagDescriptor, GluingDescriptor};
use mukai_core::io::{
    self, fmt_qvec, matrix_json, parse_rational_list, q_json, qvec_json, Format, Manifold,
    Report,
};
use mukai_core::moduli;
use mukai_core::pairing::{self, HDeclaration, ReflectionMode};
use mukai_core::registry::{self, CdEntry, CdRegistry, EulerInput, LatticeVector};
use mukai_core::ring::ThreefoldRing;
use mukai_core::schubert::{self, SchubertElement};
use mukai_core::{Error, Q};
use num_bigint::BigInt;
use serde_json::Value;

use crate::{CdOp, Cli, Command, SchubertOp, SeedKind};

pub enum Failure {
    Core(Error),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

type Outcome = Result<(Report, bool), Failure>;

pub fn run(cli: &Cli) -> ExitCode {
    let format = if cli.json { Format::Json } else { Format::Text };
    match dispatch(cli) {
        Ok((report, ok)) => {
            // a closed pipe is not an error for a report writer
            let _ = writeln!(std::io::stdout(), "{}", report.render(format));
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(64)
        }
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_parse() { 2 } else { 1 })
        }
    }
}

fn ok(r: Report) -> Outcome {
    Ok((r, true))
}

fn need<'a>(p: &'a Option<PathBuf>, flag: &str) -> Result<&'a Path, Failure> {
    p.as_deref()
        .ok_or_else(|| Failure::Usage(format!("this command needs --{flag} <PATH>")))
}

fn manifold(cli: &Cli) -> Result<Manifold, Failure> {
    let path = match (&cli.manifold, &cli.flag) {
        (Some(_), Some(_)) => return Err(Failure::Usage("give either --manifold or --flag, not both".into())),
        (Some(p), None) | (None, Some(p)) => p,
        (None, None) => return Err(Failure::Usage("this command needs --manifold or --flag".into())),
    };
    Ok(io::load_manifold(path)?)
}

fn flag(cli: &Cli) -> Result<FlagDescriptor, Failure> {
    match manifold(cli)? {
        Manifold::Flag(f) => Ok(f),
        Manifold::Ring(r) => Err(Error::InvalidFlag(vec![format!("{} has no s_coords", r.name())]).into()),
    }
}

fn bundles(cli: &Cli, ring: &ThreefoldRing, count: usize) -> Result<Vec<ChernData>, Failure> {
    if cli.bundle.len() != count {
        return Err(Failure::Usage(format!(
            "this command needs exactly {count} --bundle argument(s), got {}",
            cli.bundle.len()
        )));
    }
    cli.bundle
        .iter()
        .map(|p| {
            let doc = io::load_bundle(p)?;
            if let Some(m) = &doc.manifold {
                if m != ring.name() {
                    return Err(Error::InvalidChernData(format!(
                        "{} is declared on `{m}`, not `{}`",
                        p.display(),
                        ring.name()
                    ))
                    .into());
                }
            }
            let e = doc.to_chern()?;
            e.check_ring(ring)?;
            Ok(e)
        })
        .collect()
}

fn chern_report(r: Report, prefix: &str, e: &ChernData) -> Report {
    r.value(&format!("{prefix}rank"), Value::from(e.rank))
        .field(&format!("{prefix}c1"), qvec_json(&e.c1), fmt_qvec(&e.c1))
        .field(&format!("{prefix}c2"), qvec_json(&e.c2), fmt_qvec(&e.c2))
        .rational(&format!("{prefix}c3"), &e.c3)
}

fn dispatch(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Mukai => {
            let m = manifold(cli)?;
            let ring = m.ring();
            let e = &bundles(cli, ring, 1)?[0];
            let mv = classes::mukai_vector(ring, e)?;
            ok(Report::new()
                .value("manifold", Value::from(ring.name()))
                .value("normalization", Value::from(mv.normalization.as_str()))
                .graded("ch", &classes::chern_character(ring, e)?)
                .graded("mukai", &mv.class))
        }
        Command::Chi => {
            let m = manifold(cli)?;
            let ring = m.ring();
            let b = bundles(cli, ring, 2)?;
            let res = pairing::euler_chi(ring, &b[0], &b[1])?;
            let split = pairing::chi_split(ring, &b[0], &b[1])?;
            let m1 = classes::mukai_vector(ring, &b[0])?.class;
            let m2 = classes::mukai_vector(ring, &b[1])?.class;
            let mut r = Report::new()
                .rational("chi", &res.value)
                .rational("chi_plus", &split.chi_plus)
                .rational("chi_minus", &split.chi_minus)
                .rational("chi_from_mukai", &pairing::chi_of_mukai_vectors(ring, &m1, &m2)?);
            if ring.is_calabi_yau() {
                r = r.rational("mukai_pairing", &pairing::mukai_pairing_3fold(ring, &m1, &m2)?);
            }
            if let Some(note) = res.integrality_note {
                r = r.value("note", Value::from(note));
            }
            ok(r)
        }
        Command::Pair => {
            if cli.flag.is_some() {
                let f = flag(cli)?;
                let b = bundles(cli, f.ring(), 2)?;
                let u = classes::k3_mukai_vector(&f, &b[0])?;
                let v = classes::k3_mukai_vector(&f, &b[1])?;
                let p = pairing::mukai_pairing_k3(f.k3(), &u, &v)?;
                ok(Report::new()
                    .value("lattice", Value::from("k3"))
                    .k3("u", &u)
                    .k3("v", &v)
                    .rational("pairing", &p)
                    .rational("half_pairing", &(p / mukai_core::q(2))))
            } else {
                let m = manifold(cli)?;
                let ring = m.ring();
                let b = bundles(cli, ring, 2)?;
                let u = classes::mukai_vector(ring, &b[0])?.class;
                let v = classes::mukai_vector(ring, &b[1])?.class;
                ok(Report::new()
                    .value("lattice", Value::from("threefold"))
                    .graded("u", &u)
                    .graded("v", &v)
                    .rational("pairing", &pairing::mukai_pairing_3fold(ring, &u, &v)?))
            }
        }
        Command::Restrict => {
            let f = flag(cli)?;
            let e = &bundles(cli, f.ring(), 1)?[0];
            let rep = pairing::mukai_restrict(&f, e)?;
            ok(Report::new()
                .k3("restricted", &rep.vector)
                .graded("lattice_expression", &rep.lattice_expression)
                .graded("pushforward", &rep.pushforward)
                .value("degree2_match", Value::from(rep.degree2_match))
                .value("degree4_match", Value::from(rep.degree4_match))
                .value("degree6_match", Value::from(rep.degree6_match)))
        }
        Command::Vdim => vdim(cli),
        Command::Twist { by } => {
            let m = manifold(cli)?;
            let ring = m.ring();
            let e = &bundles(cli, ring, 1)?[0];
            let l = parse_rational_list(by)?;
            let k = cli.k.unwrap_or(1);
            let kl: Vec<Q> = l.iter().map(|x| x * mukai_core::q(k)).collect();
            let mv = classes::mukai_vector(ring, e)?.class;
            let twisted = pairing::twist_t(ring, &mv, &l, k)?;
            let te = classes::twist_chern(ring, e, &kl)?;
            let r = Report::new()
                .value("k", Value::from(k))
                .graded("mukai", &mv)
                .graded("twisted", &twisted);
            ok(chern_report(r, "twisted_", &te))
        }
        Command::Reflect { h } => {
            let m = manifold(cli)?;
            let ring = m.ring();
            let b = bundles(cli, ring, 2)?;
            let mv = classes::mukai_vector(ring, &b[0])?.class;
            let mp = classes::mukai_vector(ring, &b[1])?.class;
            let (value, result) = match h {
                Some(h) => {
                    let decl = HDeclaration {
                        left: mv.clone(),
                        right: mp.clone(),
                        value: BigInt::from(*h),
                    };
                    let res = pairing::reflect_alpha(ring, &mv, &mp, ReflectionMode::Declared(&decl))?;
                    (mukai_core::q(*h), res)
                }
                None => (
                    pairing::chi_of_mukai_vectors(ring, &mv, &mp)?,
                    pairing::reflect_alpha(ring, &mv, &mp, ReflectionMode::Chi)?,
                ),
            };
            ok(Report::new()
                .value("source", Value::from(if h.is_some() { "declared" } else { "chi" }))
                .rational("value", &value)
                .graded("reflected", &result))
        }
        Command::ValidateFlag { path } => validate_flag(path),
        Command::Double => {
            let f = flag(cli)?;
            gluing_report(&flags::build_double(&f))
        }
        Command::GlueCheck { path } => gluing_report(&io::load_gluing(path)?),
        Command::DeformDims { path, h0 } => {
            let gd = io::load_gluing(path)?;
            let dims = flags::deformation_dims(
                &gd,
                gd.flag_plus.ring().h12(),
                gd.flag_minus.ring().h12(),
                *h0,
            )?;
            ok(Report::new()
                .rational("dim", &dims.dim)
                .value("tag", Value::from(dims.tag.as_str()))
                .value("h0", dims.h0.as_ref().map_or(Value::Null, q_json))
                .value("h0_source", serde_json::to_value(dims.h0_source).expect("enum")))
        }
        Command::Cd { op } => cd(cli, op),
        Command::Schubert { op } => schubert_cmd(cli, op),
        Command::Constants => {
            let reg = ConstantsRegistry::builtin();
            let mut r = Report::new();
            for c in reg.constants() {
                let shown = match &c.value {
                    ConstantValue::Known { value } => value.to_string(),
                    ConstantValue::Open => "open".into(),
                };
                r = r.field(
                    c.key,
                    serde_json::to_value(c).expect("constants serialize"),
                    format!("{shown}  {}  [{}]", c.description, c.citation),
                );
            }
            for n in reg.notes() {
                r = r.field(n.key, Value::from(n.text), format!("note: {}", n.text));
            }
            ok(r)
        }
    }
}

fn vdim(cli: &Cli) -> Outcome {
    match manifold(cli)? {
        Manifold::Flag(f) => {
            let e = &bundles(cli, f.ring(), 1)?[0];
            let v = classes::k3_mukai_vector(&f, e)?;
            let square = pairing::mukai_pairing_k3(f.k3(), &v, &v)?;
            let flag_dim = moduli::vdim_flag(&f, e)?;
            let k3_dim = moduli::vdim_k3(f.k3(), &v)?;
            let ne = moduli::mukai_nonempty(f.k3(), &v)?;
            ok(Report::new()
                .rational("vdim", &flag_dim)
                .rational("vdim_k3", &k3_dim)
                .value("doubling", Value::from(k3_dim == &flag_dim * mukai_core::q(2)))
                .k3("restricted", &v)
                .rational("square", &square)
                .value("nonempty", Value::from(ne.nonempty))
                .value("primitive", ne.primitive.map_or(Value::Null, Value::from)))
        }
        Manifold::Ring(ring) => {
            let e = &bundles(cli, &ring, 1)?[0];
            let rep = moduli::vdim_cy3(&ring, e)?;
            let mut r = Report::new()
                .value("vdim", Value::from(rep.vdim))
                .rational("chi_self", &rep.chi_self);
            if let Some(n) = rep.note {
                r = r.value("note", Value::from(n));
            }
            ok(r)
        }
    }
}

fn validate_flag(path: &Path) -> Outcome {
    let doc = io::read_manifold_document(path)?;
    let ring = doc.to_ring()?;
    let s = doc.s_coords.clone().unwrap_or_else(|| ring.c1_coords().to_vec());
    let rep = flags::validate_flag(&ring, &s)?;
    let gram: Vec<Vec<Q>> = rep.gram.iter().map(|r| mukai_core::qvec(r)).collect();
    let mut r = Report::new()
        .value("manifold", Value::from(ring.name()))
        .value("valid", Value::from(rep.is_valid()))
        .rational("c1c2", &rep.c1c2)
        .rational("chi_structure_sheaf", &rep.chi_structure_sheaf)
        .rational("c2_dot_s", &rep.c2_dot_s)
        .value("anticanonical", Value::from(rep.anticanonical))
        .field("gram", matrix_json(&gram), matrix_text(&gram));
    let valid = rep.is_valid();
    if valid {
        let f = FlagDescriptor::new(ring, s)?;
        let k = flags::obstruction_kernel(&f);
        r = r
            .value("obstruction_kernel_dim", Value::from(k.dim))
            .field("obstruction_kernel_basis", matrix_json(&k.basis), matrix_text(&k.basis));
    }
    r = r.value("failures", Value::from(rep.failures.clone()));
    Ok((r, valid))
}

fn matrix_text(a: &[Vec<Q>]) -> String {
    let rows: Vec<String> = a.iter().map(|r| fmt_qvec(r)).collect();
    format!("[{}]", rows.join(", "))
}

fn gluing_report(gd: &GluingDescriptor) -> Outcome {
    let smooth = flags::smooth_total_space(gd);
    let kernel = flags::joint_obstruction_kernel(gd)?;
    let dims = flags::deformation_dims(gd, gd.flag_plus.ring().h12(), gd.flag_minus.ring().h12(), None)?;
    let involution = match flags::check_involution_fixes_anticanonical(&gd.flag_plus, &gd.a) {
        Ok(b) => Value::from(b),
        Err(Error::NotInvolution(_)) => Value::from("not an involution"),
        Err(e) => return Err(e.into()),
    };
    let mut r = Report::new()
        .field("A", matrix_json(&gd.a), matrix_text(&gd.a))
        .field("D", qvec_json(&smooth.section_class_d), fmt_qvec(&smooth.section_class_d))
        .rational("D_squared", &smooth.d_squared)
        .value("smooth_total_space", Value::from(smooth.smooth))
        .value("joint_kernel_dim", Value::from(kernel.dim))
        .field("joint_kernel_basis", matrix_json(&kernel.basis), matrix_text(&kernel.basis))
        .rational("deformation_dim", &dims.dim)
        .value("deformation_tag", Value::from(dims.tag.as_str()))
        .value("involution_fixes_s", involution);
    if let Some(a) = gd.one_extension_asserted {
        r = r.value("one_extension_asserted", Value::from(a));
    }
    ok(r)
}

fn registry_path(cli: &Cli) -> Result<&Path, Failure> {
    need(&cli.registry, "registry")
}

fn load_registry(path: &Path) -> Result<CdRegistry, Failure> {
    if !path.exists() {
        return Ok(CdRegistry::new());
    }
    Ok(CdRegistry::load(path)?)
}

fn entry_json(e: &CdEntry) -> Value {
    serde_json::to_value(e).expect("entries serialize")
}

fn vector_text(v: &LatticeVector) -> String {
    match v {
        LatticeVector::Threefold(c) => c.to_string(),
        LatticeVector::Flag { threefold, restricted } => format!("{threefold} ↦ {restricted}"),
        LatticeVector::Family(f) => format!(
            "α_{}(T^k_{} {}), k > {}",
            f.reflect_by,
            fmt_qvec(&f.twist_class),
            f.twist_of,
            f.k_threshold
        ),
    }
}

fn provenance_text(p: &registry::Provenance) -> String {
    use registry::Provenance::*;
    match p {
        LineBundleRule => "line-bundle-rule".into(),
        SkyscraperRule => "skyscraper-rule".into(),
        Degeneration { euler_characteristic, sign } => {
            format!("degeneration (χ = {euler_characteristic}, sign {sign})")
        }
        Closure { parents: (a, b) } => format!("closure of {a}, {b}"),
        RegistryConstant { citation } => format!("constant [{citation}]"),
    }
}

fn entry_text(e: &CdEntry) -> String {
    format!(
        "{}  {}  CD = {}  {}{}",
        e.manifold,
        vector_text(&e.vector),
        e.value,
        provenance_text(&e.provenance),
        if e.exceptional { "  exceptional" } else { "" }
    )
}

fn entry_report(reg: &CdRegistry, id: usize) -> Outcome {
    let e = reg.get(id)?;
    ok(Report::new()
        .value("id", Value::from(id))
        .field("value", serde_json::to_value(&e.value).expect("value"), e.value.to_string())
        .field("entry", entry_json(e), entry_text(e)))
}

fn cd(cli: &Cli, op: &CdOp) -> Outcome {
    let path = registry_path(cli)?;
    if let CdOp::Init = op {
        if path.exists() {
            return Err(Error::Io(format!("{} already exists", path.display())).into());
        }
        let reg = CdRegistry::new();
        reg.save(path)?;
        return ok(Report::new().value("entries", Value::from(0)));
    }
    let mut reg = load_registry(path)?;
    let id = match op {
        CdOp::Init => unreachable!(),
        CdOp::Show | CdOp::Verify => {
            reg.verify()?;
            let mut r = Report::new().value("entries", Value::from(reg.entries().len()));
            for e in reg.entries() {
                r = r.field(&format!("{}", e.id), entry_json(e), entry_text(e));
            }
            return ok(r);
        }
        CdOp::Member { id } => {
            let ring = manifold(cli)?.ring().clone();
            let k = cli.k.ok_or_else(|| Failure::Usage("member needs --k".into()))?;
            let v = reg.family_member(&ring, *id, k)?;
            return ok(Report::new().value("k", Value::from(k)).graded("vector", &v));
        }
        CdOp::Seed { kind, c1 } => {
            let m = manifold(cli)?;
            let ring = m.ring();
            match kind {
                SeedKind::LineBundle => {
                    let c1 = match c1 {
                        Some(s) => parse_rational_list(s)?,
                        None => vec![mukai_core::q(0); ring.rho()],
                    };
                    reg.seed(ring, registry::SeedKind::LineBundle(&c1))?
                }
                SeedKind::Skyscraper => reg.seed(ring, registry::SeedKind::Skyscraper)?,
            }
        }
        CdOp::Closure { m, mp, by } => reg.closure(*m, *mp, &parse_rational_list(by)?)?,
        CdOp::Degeneration { euler, euler_named } => {
            let f = flag(cli)?;
            let e = &bundles(cli, f.ring(), 1)?[0];
            let input = match (euler, euler_named) {
                (Some(x), _) => EulerInput::Known(*x),
                (None, Some(n)) => EulerInput::Named(n.clone()),
                (None, None) => {
                    return Err(Failure::Usage("degeneration needs --euler or --euler-named".into()))
                }
            };
            reg.degeneration(&f, e, input)?
        }
        CdOp::MarkExceptional { id } => {
            reg.mark_exceptional(*id)?;
            *id
        }
    };
    reg.save(path)?;
    entry_report(&reg, id)
}

fn schubert_cmd(cli: &Cli, op: &SchubertOp) -> Outcome {
    let count = |key: &str, v: BigInt| ok(Report::new().value(key, big_json(&v)));
    match op {
        SchubertOp::Pieri { expr, n } => {
            let k = cli.k.ok_or_else(|| Failure::Usage("pieri needs --k".into()))?;
            let k = u32::try_from(k).map_err(|_| Error::Schubert(format!("σ_{k} is not defined")))?;
            let x = schubert::parse_expression(*n, expr)?;
            let y = x.pieri_mult(k)?;
            ok(Report::new().field("product", element_json(&y), y.to_string()))
        }
        SchubertOp::Integrate { expr, n } => {
            let x = schubert::parse_expression(*n, expr)?;
            count("degree", x.integrate())
        }
        SchubertOp::Ctop { n } => {
            let k = cli.k.ok_or_else(|| Failure::Usage("ctop needs --k".into()))?;
            let k = u32::try_from(k).map_err(|_| Error::Schubert(format!("Sym^{k} is not defined")))?;
            count("ctop", schubert::ctop_sym_k_dual_tautological(*n, k)?)
        }
        SchubertOp::LinesQuintic => count("lines", schubert::lines_on_quintic()),
        SchubertOp::LinesCubic => count("lines", schubert::lines_on_cubic_surface()),
        SchubertOp::LinesOcticDouble => count("lines", schubert::lines_on_octic_double()),
        SchubertOp::Euler { n } => count("euler", schubert::euler_char_g2n(*n)?),
        SchubertOp::FourLines { n } => {
            let note = schubert::four_lines_degeneration_note(*n)?;
            let parts: Vec<String> = note
                .parts
                .iter()
                .map(|p| format!("{} ({})", p.count, p.description))
                .collect();
            ok(Report::new()
                .value("question", Value::from(note.question))
                .field(
                    "parts",
                    serde_json::to_value(&note.parts).expect("parts"),
                    parts.join(" + "),
                )
                .value("total", Value::from(note.total))
                .value("check", Value::from(note.schubert_check)))
        }
    }
}

fn big_json(v: &BigInt) -> Value {
    q_json(&Q::from_integer(v.clone()))
}

fn element_json(x: &SchubertElement) -> Value {
    let map = x
        .terms()
        .iter()
        .map(|(&(a, b), c)| (format!("{a},{b}"), big_json(c)))
        .collect();
    Value::Object(map)
}
