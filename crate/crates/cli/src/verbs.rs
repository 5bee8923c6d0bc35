use std::collections::BTreeMap;
use std::fmt::Write;

use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{json, Value};

use padic_hodge::filtered::{FilteredDieudonneModule, FilteredIsocrystal, FilteredSpec, Verdict};
use padic_hodge::formal_group::{FormalGroupSpec, Height, RationalLaw};
use padic_hodge::isocrystal::{fmt_q, Isocrystal, IsocrystalSpec};
use padic_hodge::linalg::Matrix;
use padic_hodge::motive::{MotiveShape, MotiveSpec};
use padic_hodge::padic::{context_from_spec, make_context, parse_scalar, ContextSpec, PadicScalar};
use padic_hodge::periods::{PeriodSpec, USpec};
use padic_hodge::witt::{witt_to_padic, WittSpec, WittVector};
use padic_hodge::Error;

use crate::{Failure, Overrides, Report};

type Out = Result<Report, Failure>;

/// Deserializes with a path to the first offending value.
fn parse<T: DeserializeOwned>(src: &str) -> Result<T, Failure> {
    let de = &mut serde_json::Deserializer::from_str(src);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let field = if path == "." { "(document)".to_string() } else { path };
        Failure::Input { field, message: e.into_inner().to_string() }
    })
}

fn done(text: String, json: Value) -> Out {
    Ok(Report { text, json, undecided: false })
}

fn strings<T: padic_hodge::linalg::Field + ToString>(m: &Matrix<T>) -> Vec<Vec<String>> {
    m.to_rows().iter().map(|r| r.iter().map(ToString::to_string).collect()).collect()
}

fn scalar_json(x: &PadicScalar) -> Value {
    json!({ "value": x.to_string(), "valuation": x.valuation(), "precision": x.precision() })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct WittInput {
    p: u64,
    n: usize,
    length: usize,
    coords: Vec<Vec<u64>>,
    /// Optional second operand for +, -, *.
    #[serde(default)]
    other: Option<Vec<Vec<u64>>>,
}

pub fn witt(src: &str, _: Overrides) -> Out {
    let input: WittInput = parse(src)?;
    let spec =
        |coords: &Vec<Vec<u64>>| WittSpec { p: input.p, n: input.n, length: input.length, coords: coords.clone() };
    let x = WittVector::from_spec(&spec(&input.coords))?;
    let z = witt_to_padic(&x, x.context())?;
    let (f, v) = (x.frobenius(), x.verschiebung());
    let mut text = format!("x = {x}\nimage in Z_q/p^{}: {z}\nF(x) = {f}\nV(x) = {v}\n", x.len());
    let mut out = json!({
        "x": x.to_spec(),
        "image": z.to_string(),
        "frobenius": f.to_spec(),
        "verschiebung": v.to_spec(),
    });
    if let Some(other) = &input.other {
        let y = WittVector::from_spec(&spec(other)).map_err(|e| match e {
            Error::Validation { field, message } => Failure::Input { field: format!("other.{field}"), message },
            e => e.into(),
        })?;
        let (s, d, m) = (x.add(&y)?, x.sub(&y)?, x.mul(&y)?);
        write!(text, "y = {y}\nx + y = {s}\nx - y = {d}\nx * y = {m}\n").unwrap();
        out["y"] = json!(y.to_spec());
        out["sum"] = json!(s.to_spec());
        out["difference"] = json!(d.to_spec());
        out["product"] = json!(m.to_spec());
    }
    done(text, out)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PadicInput {
    p: u64,
    n: usize,
    precision: u32,
    #[serde(default)]
    modulus: Option<Vec<u64>>,
    values: Vec<String>,
}

pub fn padic(src: &str, o: Overrides) -> Out {
    let input: PadicInput = parse(src)?;
    let spec = ContextSpec {
        p: input.p,
        n: input.n,
        precision: o.precision.unwrap_or(input.precision),
        modulus: input.modulus.clone(),
    };
    let ctx = context_from_spec(&spec)?;
    let mut text =
        format!("Q_{}^{} modulo p^{}, modulus {:?}\n", ctx.p(), ctx.degree(), ctx.precision(), ctx.modulus());
    let mut values = Vec::new();
    for (i, s) in input.values.iter().enumerate() {
        let x = parse_scalar(&ctx, s)
            .map_err(|e| Failure::Input { field: format!("values[{i}]"), message: e.to_string() })?;
        let sigma = x.frobenius();
        let inv = x.inv().ok();
        let val = x.valuation().map_or_else(|| format!(">= {}", x.precision()), |v| v.to_string());
        write!(text, "[{i}] {x}\n    valuation {val}, precision {}\n    frobenius {sigma}\n", x.precision()).unwrap();
        match &inv {
            Some(y) => writeln!(text, "    inverse {y}").unwrap(),
            None => writeln!(text, "    inverse: not invertible at this precision").unwrap(),
        }
        let mut v = scalar_json(&x);
        v["frobenius"] = json!(sigma.to_string());
        v["inverse"] = json!(inv.map(|y| y.to_string()));
        values.push(v);
    }
    done(text, json!({ "context": ctx.spec(), "values": values }))
}

fn isocrystal(src: &str, o: Overrides) -> Result<Isocrystal, Failure> {
    let mut spec: IsocrystalSpec = parse(src)?;
    if let Some(n) = o.precision {
        spec.precision = n;
    }
    Ok(Isocrystal::from_spec(&spec)?)
}

pub fn slopes(src: &str, o: Overrides) -> Out {
    let iso = isocrystal(src, o)?;
    let s = iso.slopes()?;
    let rendered = if s.dim() == 0 { "none".to_string() } else { s.render() };
    let text = format!("slopes: {rendered}\nnewton number: {}\n", fmt_q(s.newton_number()));
    done(text, json!({ "dim": iso.dim(), "slopes": s.to_triples(), "newton_number": fmt_q(s.newton_number()) }))
}

pub fn newton(src: &str, o: Overrides) -> Out {
    let iso = isocrystal(src, o)?;
    let np = iso.newton_polygon()?;
    let vertices: Vec<[String; 2]> = np.vertices().iter().map(|(x, y)| [fmt_q(*x), fmt_q(*y)]).collect();
    done(format!("newton polygon: {}\n", np.render()), json!({ "vertices": vertices }))
}

fn filtered_spec(src: &str, o: Overrides) -> Result<FilteredSpec, Failure> {
    let mut spec: FilteredSpec = parse(src)?;
    if let Some(n) = o.precision {
        spec.precision = n;
    }
    Ok(spec)
}

pub fn hodge(src: &str, o: Overrides) -> Out {
    let m = FilteredIsocrystal::from_spec(&filtered_spec(src, o)?)?;
    let fil = m.filtration();
    let weights = fil.weights();
    let graded: Vec<String> = fil.graded_dims().iter().map(|(i, d)| format!("gr^{i} = {d}")).collect();
    let polygon = m.hodge_polygon();
    let joined: Vec<String> = weights.iter().map(ToString::to_string).collect();
    let text = format!(
        "hodge weights: {}\ngraded dims: {}\nhodge number: {}\nhodge polygon: {}\n",
        if joined.is_empty() { "none".to_string() } else { joined.join(", ") },
        if graded.is_empty() { "none".to_string() } else { graded.join(", ") },
        m.hodge_number(),
        polygon.render()
    );
    let graded_json: BTreeMap<String, usize> = fil.graded_dims().iter().map(|(i, d)| (i.to_string(), *d)).collect();
    done(
        text,
        json!({ "weights": weights, "graded_dims": graded_json, "hodge_number": m.hodge_number(), "hodge_polygon": polygon.render() }),
    )
}

pub fn admissible(src: &str, o: Overrides) -> Out {
    let m = FilteredIsocrystal::from_spec(&filtered_spec(src, o)?)?;
    let verdict = m.weak_admissibility()?;
    let mut text = format!("verdict: {}\n", verdict.label());
    let mut out = json!({ "verdict": verdict.label() });
    match &verdict {
        Verdict::Admissible => {}
        Verdict::NotAdmissible(w) => {
            let kind = serde_json::to_value(w.kind).expect("enum serializes");
            let cols: Vec<Vec<String>> =
                w.basis.columns().iter().map(|c| c.iter().map(ToString::to_string).collect()).collect();
            write!(
                text,
                "witness: {}\n  newton number {}, hodge number {}\n  basis:\n",
                kind.as_str().unwrap_or_default(),
                fmt_q(w.newton_number),
                w.hodge_number
            )
            .unwrap();
            for c in &cols {
                writeln!(text, "    [{}]", c.join(", ")).unwrap();
            }
            out["witness"] = json!({
                "kind": kind,
                "basis": cols,
                "newton_number": fmt_q(w.newton_number),
                "hodge_number": w.hodge_number,
            });
        }
        Verdict::Undecided { reason } => {
            writeln!(text, "reason: {reason}").unwrap();
            out["reason"] = json!(reason);
        }
    }
    // only meaningful for jumps in {0, 1}
    if let Ok(span) = m.frobenius_span_check() {
        writeln!(text, "frobenius orbit of Fil^1 spans: {span}").unwrap();
        out["frobenius_span"] = json!(span);
    }
    let undecided = matches!(verdict, Verdict::Undecided { .. });
    Ok(Report { text, json: out, undecided })
}

pub fn expd(src: &str, o: Overrides) -> Out {
    let d = FilteredDieudonneModule::from_spec(&filtered_spec(src, o)?)?;
    let e = d.exp_d()?;
    let (h0, h1) = (d.h0()?, d.h1()?);
    let strongly = d.strongly_divisible()?;
    let star = d.condition_star();
    let fixed = d.fixed_dim()?;
    let mut text = format!(
        "exp_D: Q_p^{} -> Q_p^{}, rank {}, kernel dim {}, surjective {}\n",
        e.source_dim, e.target_dim, e.rank, e.kernel_dim, e.surjective
    );
    for row in strings(&e.matrix) {
        writeln!(text, "  [{}]", row.join(", ")).unwrap();
    }
    write!(
        text,
        "H^0 = {h0}\nH^1 = {h1}\ndim (D[1/p])^(F=1) = {fixed}\nstrongly divisible: {strongly}\njumps within p: {star}\n"
    )
    .unwrap();
    let out = json!({
        "exp_d": {
            "source_dim": e.source_dim,
            "target_dim": e.target_dim,
            "matrix": strings(&e.matrix),
            "rank": e.rank,
            "kernel_dim": e.kernel_dim,
            "surjective": e.surjective,
        },
        "h0": h0,
        "h1": h1,
        "h0_text": h0.to_string(),
        "h1_text": h1.to_string(),
        "fixed_dim": fixed,
        "strongly_divisible": strongly,
        "condition_star": star,
    });
    done(text, out)
}

/// "t - 1/2*t^2 + 1/3*t^3" from a degree -> coefficient map.
fn render_series(coeffs: &BTreeMap<String, String>) -> String {
    let mut terms: Vec<(usize, &String)> =
        coeffs.iter().map(|(k, c)| (k.parse().expect("numeric degree"), c)).collect();
    terms.sort();
    let mut s = String::new();
    for (k, c) in terms {
        let (neg, mag) = match c.strip_prefix('-') {
            Some(m) => (true, m),
            None => (false, c.as_str()),
        };
        let mono = match k {
            0 => String::new(),
            1 => "t".into(),
            _ => format!("t^{k}"),
        };
        let body = match (mag, k) {
            (_, 0) => mag.to_string(),
            ("1", _) => mono,
            _ => format!("{mag}*{mono}"),
        };
        if s.is_empty() {
            s = if neg { format!("-{body}") } else { body };
        } else {
            write!(s, " {} {body}", if neg { '-' } else { '+' }).unwrap();
        }
    }
    if s.is_empty() {
        "0".into()
    } else {
        s
    }
}

fn formal_group(src: &str, o: Overrides) -> Result<(FormalGroupSpec, RationalLaw), Failure> {
    let spec: FormalGroupSpec = parse(src)?;
    let law = spec.build(o.order)?;
    let axioms = law.check_axioms();
    if !axioms.holds() {
        let what = match (axioms.unit, axioms.commutative, axioms.associative) {
            (false, _, _) => "F(x, 0) = x fails".to_string(),
            (_, Some(k), _) => format!("commutativity fails in degree {k}"),
            (_, _, Some(k)) => format!("associativity fails in degree {k}"),
            _ => "axioms fail".to_string(),
        };
        return Err(Failure::Input { field: "phi".into(), message: format!("not a formal group law: {what}") });
    }
    Ok((spec, law))
}

pub fn fglog(src: &str, o: Overrides) -> Out {
    let (_, law) = formal_group(src, o)?;
    let log = law.log_series()?.to_map();
    let exp = law.exp_series()?.to_map();
    let text = format!("order: {}\nlog(t) = {}\nexp(t) = {}\n", law.order(), render_series(&log), render_series(&exp));
    done(text, json!({ "order": law.order(), "log": log, "exp": exp }))
}

pub fn height(src: &str, o: Overrides) -> Out {
    let (spec, law) = formal_group(src, o)?;
    let p = spec.p.ok_or_else(|| Failure::Input { field: "p".into(), message: "height needs a prime p".into() })?;
    let ctx = make_context(p, 1, o.precision.unwrap_or(8))
        .map_err(|e| Failure::Input { field: "p".into(), message: e.to_string() })?;
    let h = law.to_padic(&ctx)?.height()?;
    let (text, out, undecided) = match h {
        Height::Finite(h) => {
            (format!("height: {h} (p = {p}, order {})\n", law.order()), json!({ "p": p, "height": h }), false)
        }
        Height::AtLeast(h) => (
            format!(
                "height: at least {h} (p = {p}); [p](t) vanishes mod p through order {}, raise --order\n",
                law.order()
            ),
            json!({ "p": p, "height_at_least": h }),
            true,
        ),
    };
    Ok(Report { text, json: out, undecided })
}

pub fn motive(src: &str, _: Overrides) -> Out {
    let spec: MotiveSpec = parse(src)?;
    let m = MotiveShape::from_spec(&spec)?;
    let ht = m.hodge_tate_weights();
    let dr = m.de_rham_dims();
    let dual = m.cartier_dual();
    let mut text = format!(
        "rank L = {}, dim T = {}, dim A = {}\nTate module rank: {}\nHodge-Tate weights: 0 (x{}), 1 (x{})\nde Rham: dim {}, dim Fil^0 = {}\n",
        m.rank_l,
        m.dim_t,
        m.dim_a,
        m.tate_rank(),
        ht.weight0,
        ht.weight1,
        dr.t_dr,
        dr.fil0
    );
    let mut out = json!({
        "tate_rank": m.tate_rank(),
        "hodge_tate": { "weight0": ht.weight0, "weight1": ht.weight1 },
        "de_rham": { "dim": dr.t_dr, "fil0": dr.fil0 },
        "dual": dual.to_spec(),
    });
    match m.crystalline_slopes() {
        Ok(s) => {
            let r = if s.dim() == 0 { "none".to_string() } else { s.render() };
            writeln!(text, "crystalline slopes: {r}").unwrap();
            out["slopes"] = json!(s.to_triples());
        }
        Err(_) => writeln!(text, "crystalline slopes: unknown (no abelian_newton given)").unwrap(),
    }
    writeln!(text, "Cartier dual: rank L = {}, dim T = {}, dim A = {}", dual.rank_l, dual.dim_t, dual.dim_a).unwrap();
    done(text, out)
}

pub fn periods(src: &str, o: Overrides) -> Out {
    let mut spec: PeriodSpec = parse(src)?;
    if let (Some(n), USpec::Padic { precision, .. }) = (o.precision, &mut spec.u) {
        *precision = n;
    }
    let report = spec.load()?.report(o.depth)?;
    done(report.to_string(), serde_json::to_value(&report).expect("report serializes"))
}
