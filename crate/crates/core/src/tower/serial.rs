//! Line-oriented text form of a tower. Rationals and polynomials are written
//! exactly, floats with round-trip precision; the ideal and the archimedean
//! witness are recomputed on load.

use std::fmt::Write as _;

use super::qmodule::{Generator, Provenance, QuadraticModuleDesc};
use super::state::{SamplingConfig, TowerState};
use super::symbol::{BaseCoord, FunctionSymbol, Mode, Symbol};
use super::witness::compute_witness;
use crate::algebra::rational::{self, Rational};
use crate::algebra::{buchberger, Polynomial, TermOrder};
use crate::error::{Error, Result};
use crate::explore::domain::DomainDescription;
use crate::expr::ScalarExpr;

const HEADER: &str = "hidpos-tower 1";

fn intervals(b: &[(Rational, Rational)]) -> String {
    b.iter().map(|(a, c)| format!("{}:{}", rational::format(a), rational::format(c))).collect::<Vec<_>>().join(" ")
}

impl TowerState {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let d = &self.domain;
        let _ = writeln!(out, "{HEADER}");
        let _ = writeln!(out, "domain {}", d.names.join(" "));
        if let Some(b) = &d.bbox {
            let _ = writeln!(out, "box {}", intervals(b));
        }
        if let Some(w) = &d.window {
            let _ = writeln!(out, "window {}", intervals(w));
        }
        for c in &d.constraints {
            let _ = writeln!(out, "constraint {}", c.display(&d.names));
        }
        for e in &d.exclusions {
            let _ = writeln!(out, "exclusion {}", e.display(&d.names));
        }
        let c = &self.config;
        let _ = writeln!(
            out,
            "config samples={} zero_tol={:?} sign_tol={:?} delta={:?} tau_rel={:?} tau_pos={:?} seed={}",
            c.samples, c.zero_tol, c.sign_tol, c.delta, c.tau_rel, c.tau_pos, c.seed
        );
        let names = self.names();
        for (i, s) in self.symbols.iter().enumerate() {
            let prev = &names[..i];
            let cont = if s.continuous { "continuous" } else { "discontinuous" };
            let body = match &s.kind {
                FunctionSymbol::Base(BaseCoord::Poly(p)) => format!("base {}", p.display(&d.names)),
                FunctionSymbol::Base(BaseCoord::Map(e)) => format!("map {}", e.display(&d.names)),
                FunctionSymbol::OddRoot { g, r } => format!("oddroot {r} {}", g.display(prev)),
                FunctionSymbol::EvenRoot { g, s } => format!("evenroot {s} {}", g.display(prev)),
                FunctionSymbol::Reciprocal { g } => format!("recip {}", g.display(prev)),
                FunctionSymbol::Piecewise { g, h, q } => {
                    format!("piecewise {} ; {} ; {}", g.display(prev), h.display(prev), q.display(prev))
                }
                FunctionSymbol::Characteristic { q } => format!("chi {}", q.display(prev)),
            };
            let _ = writeln!(out, "symbol {} {cont} {body}", s.name);
        }
        for r in &self.extra_relations {
            let _ = writeln!(out, "relation {}", r.display(&names));
        }
        for g in &self.qmodule.generators {
            let _ = writeln!(out, "generator {} {}", g.provenance, g.poly.display(&names));
        }
        let _ = writeln!(out, "mode {}", self.mode);
        for n in &self.notes {
            let _ = writeln!(out, "note {n}");
        }
        out
    }

    pub fn from_text(text: &str) -> Result<TowerState> {
        let err = |line: usize, msg: &str| Error::Parse(format!("tower line {line}: {msg}"));
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty());
        match lines.next() {
            Some((_, l)) if l == HEADER => {}
            _ => return Err(err(1, "missing header")),
        }
        let mut domain: Option<DomainDescription> = None;
        let mut config = SamplingConfig::default();
        let mut symbols: Vec<Symbol> = Vec::new();
        let mut relations = Vec::new();
        let mut generators = Vec::new();
        let mut mode = Mode::Unverified;
        let mut notes = Vec::new();
        for (no, line) in lines {
            let (key, rest) = line.split_once(' ').unwrap_or((line, ""));
            if key != "domain" && domain.is_none() {
                return Err(err(no, "domain must come first"));
            }
            match key {
                "domain" => {
                    domain = Some(DomainDescription::new(rest.split_whitespace().map(String::from).collect()));
                }
                "box" | "window" => {
                    let d = domain.as_mut().expect("checked above");
                    let b = parse_intervals(rest).map_err(|m| err(no, &m))?;
                    if b.len() != d.dim() {
                        return Err(err(no, "interval count does not match the domain"));
                    }
                    if key == "box" {
                        d.bbox = Some(b);
                    } else {
                        d.window = Some(b);
                    }
                }
                "constraint" | "exclusion" => {
                    let d = domain.as_mut().expect("checked above");
                    let p = Polynomial::parse(rest, &d.names)?;
                    if key == "constraint" {
                        d.constraints.push(p);
                    } else {
                        d.exclusions.push(p);
                    }
                }
                "config" => config = parse_config(rest).map_err(|m| err(no, &m))?,
                "symbol" => {
                    let d = domain.as_ref().expect("checked above");
                    let prev: Vec<String> = symbols.iter().map(|s| s.name.clone()).collect();
                    symbols.push(parse_symbol(rest, &d.names, &prev).map_err(|m| err(no, &m))?);
                }
                "relation" | "generator" => {
                    let names: Vec<String> = symbols.iter().map(|s| s.name.clone()).collect();
                    if key == "relation" {
                        relations.push(Polynomial::parse(rest, &names)?);
                    } else {
                        let (prov, poly) = rest.split_once(' ').ok_or_else(|| err(no, "generator needs a provenance"))?;
                        let provenance = Provenance::parse(prov).ok_or_else(|| err(no, "unknown provenance"))?;
                        generators.push(Generator { poly: Polynomial::parse(poly, &names)?, provenance });
                    }
                }
                "mode" => mode = Mode::from_name(rest).ok_or_else(|| err(no, "unknown mode"))?,
                "note" => notes.push(rest.to_string()),
                _ => return Err(err(no, &format!("unknown key `{key}`"))),
            }
        }
        let domain = domain.ok_or_else(|| err(1, "no domain"))?;
        if symbols.is_empty() {
            return Err(err(1, "no symbols"));
        }
        let n = symbols.len();
        let mut tw = TowerState {
            domain,
            symbols,
            extra_relations: relations,
            ideal: crate::algebra::GroebnerBasis::zero_ideal(TermOrder::tower(n)),
            qmodule: QuadraticModuleDesc { generators },
            witness: compute_witness(&[], &[], &QuadraticModuleDesc::default(), &[]),
            mode,
            notes,
            config,
            parent: None,
        };
        tw.ideal = buchberger(&tw.relations(), &TermOrder::tower(n));
        let names = tw.names();
        tw.witness = compute_witness(&tw.symbols, &tw.extra_relations, &tw.qmodule, &names);
        Ok(tw)
    }
}

fn parse_intervals(s: &str) -> std::result::Result<Vec<(Rational, Rational)>, String> {
    s.split_whitespace()
        .map(|iv| {
            let (a, b) = iv.split_once(':').ok_or_else(|| format!("bad interval `{iv}`"))?;
            Ok((rational::parse(a).map_err(|e| e.to_string())?, rational::parse(b).map_err(|e| e.to_string())?))
        })
        .collect()
}

fn parse_config(s: &str) -> std::result::Result<SamplingConfig, String> {
    let mut c = SamplingConfig::default();
    for kv in s.split_whitespace() {
        let (k, v) = kv.split_once('=').ok_or_else(|| format!("bad config entry `{kv}`"))?;
        let bad = |_| format!("bad value for {k}");
        match k {
            "samples" => c.samples = v.parse().map_err(|_| format!("bad value for {k}"))?,
            "seed" => c.seed = v.parse().map_err(|_| format!("bad value for {k}"))?,
            "zero_tol" => c.zero_tol = v.parse().map_err(bad)?,
            "sign_tol" => c.sign_tol = v.parse().map_err(bad)?,
            "delta" => c.delta = v.parse().map_err(bad)?,
            "tau_rel" => c.tau_rel = v.parse().map_err(bad)?,
            "tau_pos" => c.tau_pos = v.parse().map_err(bad)?,
            _ => return Err(format!("unknown config key `{k}`")),
        }
    }
    Ok(c)
}

fn parse_symbol(s: &str, dom: &[String], prev: &[String]) -> std::result::Result<Symbol, String> {
    let mut it = s.splitn(4, ' ');
    let name = it.next().ok_or("symbol needs a name")?.to_string();
    let continuous = match it.next() {
        Some("continuous") => true,
        Some("discontinuous") => false,
        _ => return Err("symbol needs a continuity flag".into()),
    };
    let tag = it.next().ok_or("symbol needs a kind")?;
    let body = it.next().unwrap_or("");
    let poly = |t: &str| Polynomial::parse(t.trim(), prev).map_err(|e| e.to_string());
    let index = |t: &str| -> std::result::Result<(u32, String), String> {
        let (k, rest) = t.split_once(' ').ok_or("missing root index")?;
        Ok((k.parse().map_err(|_| "bad root index")?, rest.to_string()))
    };
    let kind = match tag {
        "base" => FunctionSymbol::Base(BaseCoord::Poly(Polynomial::parse(body, dom).map_err(|e| e.to_string())?)),
        "map" => FunctionSymbol::Base(BaseCoord::Map(ScalarExpr::parse(body, dom).map_err(|e| e.to_string())?)),
        "oddroot" => {
            let (r, g) = index(body)?;
            FunctionSymbol::OddRoot { g: poly(&g)?, r }
        }
        "evenroot" => {
            let (s, g) = index(body)?;
            FunctionSymbol::EvenRoot { g: poly(&g)?, s }
        }
        "recip" => FunctionSymbol::Reciprocal { g: poly(body)? },
        "piecewise" => {
            let parts: Vec<&str> = body.split(';').collect();
            if parts.len() != 3 {
                return Err("piecewise needs three polynomials".into());
            }
            FunctionSymbol::Piecewise { g: poly(parts[0])?, h: poly(parts[1])?, q: poly(parts[2])? }
        }
        "chi" => FunctionSymbol::Characteristic { q: poly(body)? },
        other => return Err(format!("unknown symbol kind `{other}`")),
    };
    Ok(Symbol { name, kind, continuous })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tower::state::{init_tower, CharVariant};

    #[test]
    fn text_round_trip_is_exact() {
        let dom = DomainDescription::interval("t", rational::int(-1), rational::int(1));
        let t = Polynomial::parse("1 - t^2", &["t".to_string()]).unwrap();
        let tw = init_tower(dom, vec![t], None).unwrap();
        let tw = tw.adjoin_even_root("u", &tw.parse_poly("t^2").unwrap(), 2).unwrap();
        let tw = tw.adjoin_characteristic("c", &tw.parse_poly("t").unwrap(), CharVariant::CompactContinuous, false).unwrap();
        let text = tw.to_text();
        let back = TowerState::from_text(&text).unwrap();
        assert_eq!(back.to_text(), text);
        assert_eq!(back.ideal(), tw.ideal());
        assert_eq!(back.archimedean_status(), tw.archimedean_status());
        assert_eq!(back.mode(), tw.mode());
    }

    #[test]
    fn rejects_unknown_keys() {
        assert!(TowerState::from_text("hidpos-tower 1\ndomain t\nfoo bar\n").is_err());
        assert!(TowerState::from_text("nope\n").is_err());
    }
}
