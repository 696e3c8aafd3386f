//! Reader and writer for the subset of the MATPOWER case format used here.
//!
//! Only `mpc.baseMVA`, `mpc.bus`, `mpc.gen` and `mpc.branch` are consumed.
//! Matrices are delimited by `[ ... ];`, rows end at `;` or a newline and
//! `%` starts a comment. Everything else in the file is skipped.
//!
//! DC simplification: a branch contributes susceptance `1/x`; resistance,
//! charging, tap ratio and phase shift are ignored.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::network::{Bus, Capacity, Injections, Line, PowerNetwork};

const BUS_COLS: usize = 3;
const GEN_COLS: usize = 8;
const BRANCH_COLS: usize = 11;

#[derive(Debug)]
struct Table {
    start_line: usize,
    rows: Vec<(usize, Vec<f64>)>,
}

/// Parses MATPOWER case text into a merged simple network and its injections.
pub fn parse_matpower(text: &str) -> Result<(PowerNetwork, Injections)> {
    let (base_mva, tables) = scan(text)?;
    let table = |name: &str| -> Result<&Table> {
        tables.get(name).ok_or_else(|| Error::Parse {
            line: text.lines().count().max(1),
            message: format!("missing mpc.{name} table"),
        })
    };
    if base_mva.is_none() {
        return Err(Error::Parse { line: text.lines().count().max(1), message: "missing mpc.baseMVA".into() });
    }
    let bus_t = table("bus")?;
    let gen_t = table("gen")?;
    let branch_t = table("branch")?;
    check_width(bus_t, BUS_COLS, "bus")?;
    check_width(gen_t, GEN_COLS, "gen")?;
    check_width(branch_t, BRANCH_COLS, "branch")?;
    if bus_t.rows.is_empty() {
        return Err(Error::Parse { line: bus_t.start_line, message: "bus table is empty".into() });
    }

    let mut index_of: HashMap<u64, usize> = HashMap::new();
    let mut buses = Vec::with_capacity(bus_t.rows.len());
    for (line_no, row) in &bus_t.rows {
        let number = as_bus_number(row[0], *line_no)?;
        if index_of.insert(number, buses.len()).is_some() {
            return Err(Error::Data(format!("duplicate bus number {number} (line {line_no})")));
        }
        buses.push(Bus {
            id: buses.len(),
            original_id: number,
            injection_mw: 0.0,
            generation_mw: 0.0,
            is_generator: false,
        });
    }
    let loads: Vec<f64> = bus_t.rows.iter().map(|(_, r)| r[2]).collect();

    for (line_no, row) in &gen_t.rows {
        if row[7] <= 0.0 {
            continue;
        }
        let number = as_bus_number(row[0], *line_no)?;
        let &k = index_of
            .get(&number)
            .ok_or_else(|| Error::Data(format!("generator at line {line_no} references missing bus {number}")))?;
        buses[k].generation_mw += row[1];
        buses[k].is_generator = true;
    }
    for (bus, load) in buses.iter_mut().zip(&loads) {
        bus.injection_mw = bus.generation_mw - load;
    }

    let mut lines: Vec<Line> = Vec::new();
    let mut by_pair: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for (row_idx, (line_no, row)) in branch_t.rows.iter().enumerate() {
        if row[10] == 0.0 {
            continue;
        }
        let lookup = |v: f64| -> Result<usize> {
            let number = as_bus_number(v, *line_no)?;
            index_of
                .get(&number)
                .copied()
                .ok_or_else(|| Error::Data(format!("branch at line {line_no} references missing bus {number}")))
        };
        let (from, to) = (lookup(row[0])?, lookup(row[1])?);
        if from == to {
            return Err(Error::Data(format!("branch at line {line_no} is a self-loop")));
        }
        let x = row[3];
        if !(x > 0.0) {
            return Err(Error::Data(format!("in-service branch at line {line_no} has reactance {x} <= 0")));
        }
        let susceptance = 1.0 / x;
        let capacity = if row[5] == 0.0 { Capacity::Infinite } else { Capacity::Finite(row[5]) };
        match by_pair.get(&(from.min(to), from.max(to))) {
            Some(&k) => {
                let line = &mut lines[k];
                line.susceptance += susceptance;
                line.capacity = line.capacity.merge(capacity);
                line.merged_from.push(row_idx);
            }
            None => {
                by_pair.insert((from.min(to), from.max(to)), lines.len());
                lines.push(Line { id: lines.len(), from, to, susceptance, capacity, merged_from: vec![row_idx] });
            }
        }
    }

    let net = PowerNetwork::new(buses, lines)?;
    let p = net.injections();
    Ok((net, p))
}

fn as_bus_number(v: f64, line: usize) -> Result<u64> {
    if v >= 1.0 && v.fract() == 0.0 && v < u64::MAX as f64 {
        Ok(v as u64)
    } else {
        Err(Error::Parse { line, message: format!("invalid bus number {v}") })
    }
}

fn check_width(t: &Table, min: usize, name: &str) -> Result<()> {
    for (line, row) in &t.rows {
        if row.len() < min {
            return Err(Error::Parse {
                line: *line,
                message: format!("{name} row has {} columns, need at least {min}", row.len()),
            });
        }
    }
    Ok(())
}

fn scan(text: &str) -> Result<(Option<f64>, HashMap<String, Table>)> {
    let mut base = None;
    let mut tables = HashMap::new();
    let mut current: Option<(String, Table)> = None;
    let mut width: Option<usize> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let code = raw.split('%').next().unwrap_or("");
        let mut rest = code.trim();

        if current.is_none() {
            let Some(after) = rest.strip_prefix("mpc.") else { continue };
            let Some((name, value)) = after.split_once('=') else { continue };
            let name = name.trim();
            let value = value.trim();
            if name == "baseMVA" {
                let v = value.trim_end_matches(';').trim();
                base = Some(v.parse::<f64>().map_err(|_| Error::Parse {
                    line: line_no,
                    message: format!("invalid baseMVA `{v}`"),
                })?);
                continue;
            }
            if !matches!(name, "bus" | "gen" | "branch") {
                continue;
            }
            let Some(body) = value.strip_prefix('[') else {
                return Err(Error::Parse { line: line_no, message: format!("mpc.{name} must be a matrix") });
            };
            current = Some((name.to_string(), Table { start_line: line_no, rows: Vec::new() }));
            width = None;
            rest = body;
        }

        let (name, table) = current.as_mut().expect("inside a matrix");
        let (body, closed) = match rest.find(']') {
            Some(pos) => (&rest[..pos], true),
            None => (rest, false),
        };
        for chunk in body.split(';') {
            let tokens: Vec<&str> = chunk.split(|c: char| c.is_whitespace() || c == ',').filter(|t| !t.is_empty()).collect();
            if tokens.is_empty() {
                continue;
            }
            let mut row = Vec::with_capacity(tokens.len());
            for tok in tokens {
                row.push(parse_number(tok).ok_or_else(|| Error::Parse {
                    line: line_no,
                    message: format!("invalid number `{tok}` in mpc.{name}"),
                })?);
            }
            match width {
                None => width = Some(row.len()),
                Some(w) if w != row.len() => {
                    return Err(Error::Parse {
                        line: line_no,
                        message: format!("mpc.{name} row has {} columns, expected {w}", row.len()),
                    })
                }
                _ => {}
            }
            table.rows.push((line_no, row));
        }
        if closed {
            let (name, table) = current.take().unwrap();
            tables.insert(name, table);
        }
    }
    if let Some((name, table)) = current {
        return Err(Error::Parse { line: table.start_line, message: format!("unterminated mpc.{name} matrix") });
    }
    Ok((base, tables))
}

fn parse_number(tok: &str) -> Option<f64> {
    match tok {
        "Inf" | "inf" => Some(f64::INFINITY),
        "-Inf" | "-inf" => Some(f64::NEG_INFINITY),
        _ => tok.parse().ok(),
    }
}

/// Writes a network as a MATPOWER case that [`parse_matpower`] reads back to
/// the same buses and lines. Merge provenance is not representable and comes
/// back as one branch per line.
pub fn to_matpower(net: &PowerNetwork, name: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "function mpc = {name}");
    let _ = writeln!(out, "mpc.version = '2';");
    let _ = writeln!(out, "mpc.baseMVA = 100;\n");
    let _ = writeln!(out, "%\tbus_i\ttype\tPd\tQd\tGs\tBs\tarea\tVm\tVa\tbaseKV\tzone\tVmax\tVmin");
    let _ = writeln!(out, "mpc.bus = [");
    for bus in net.buses() {
        let kind = if bus.is_generator { 2 } else { 1 };
        let load = if bus.is_generator {
            exact_operand(bus.injection_mw, bus.generation_mw - bus.injection_mw, |pd| bus.generation_mw - pd)
        } else {
            -bus.injection_mw
        };
        let _ = writeln!(out, "\t{}\t{kind}\t{}\t0\t0\t0\t1\t1\t0\t0\t1\t1.1\t0.9;", bus.original_id, fmt(load));
    }
    let _ = writeln!(out, "];\n");
    let _ = writeln!(out, "%\tbus\tPg\tQg\tQmax\tQmin\tVg\tmBase\tstatus\tPmax\tPmin");
    let _ = writeln!(out, "mpc.gen = [");
    for bus in net.buses().iter().filter(|b| b.is_generator) {
        let pg = fmt(bus.generation_mw);
        let _ = writeln!(out, "\t{}\t{pg}\t0\t0\t0\t1\t100\t1\t{pg}\t0;", bus.original_id);
    }
    let _ = writeln!(out, "];\n");
    let _ = writeln!(out, "%\tfbus\ttbus\tr\tx\tb\trateA\trateB\trateC\tratio\tangle\tstatus\tangmin\tangmax");
    let _ = writeln!(out, "mpc.branch = [");
    for line in net.lines() {
        let x = exact_operand(line.susceptance, 1.0 / line.susceptance, |x| 1.0 / x);
        let rate = line.capacity.mw().map_or_else(|| "0".to_string(), fmt);
        let (f, t) = (net.buses()[line.from].original_id, net.buses()[line.to].original_id);
        let _ = writeln!(out, "\t{f}\t{t}\t0\t{}\t0\t{rate}\t{rate}\t{rate}\t0\t0\t1\t-360\t360;", fmt(x));
    }
    let _ = writeln!(out, "];");
    out
}

fn fmt(v: f64) -> String {
    format!("{v}")
}

/// Finds an operand near `guess` for which `apply` reproduces `target`
/// bit for bit, so the written file reparses to identical values.
fn exact_operand(target: f64, guess: f64, apply: impl Fn(f64) -> f64) -> f64 {
    let mut candidate = guess;
    if apply(candidate) == target {
        return candidate;
    }
    for step in 1..=16u64 {
        for dir in [1i64, -1] {
            let bits = guess.to_bits() as i64 + dir * step as i64;
            candidate = f64::from_bits(bits as u64);
            if apply(candidate) == target {
                return candidate;
            }
        }
    }
    guess
}
