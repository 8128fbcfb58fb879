//! Parser and pretty-printer for the `.sir` function-summary dialect.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A parsed `.sir` file: functions in source order.
#[derive(Debug, Clone, PartialEq)]
pub struct Program {
    pub functions: Vec<Function>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Function {
    pub name: String,
    pub body: Vec<Item>,
    /// Line of the `func` header, for diagnostics.
    pub line: usize,
}

/// One body element: an instruction or a nested loop.
#[derive(Debug, Clone, PartialEq)]
pub enum Item {
    Instr(Opcode),
    Loop(Vec<Item>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Opcode {
    Load,
    Store,
    AddI,
    MulI,
    AddF,
    MulF,
    Lock,
    Nop,
    /// `call <target>`; the target string decides the category.
    Call(String),
}

impl Opcode {
    fn text(&self) -> String {
        match self {
            Opcode::Load => "load".into(),
            Opcode::Store => "store".into(),
            Opcode::AddI => "addi".into(),
            Opcode::MulI => "muli".into(),
            Opcode::AddF => "addf".into(),
            Opcode::MulF => "mulf".into(),
            Opcode::Lock => "lock".into(),
            Opcode::Nop => "nop".into(),
            Opcode::Call(target) => format!("call {target}"),
        }
    }
}

/// A blocking call site (barrier / net / sleep), in source order within its
/// function. These become the around-call instrumentation points.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockingCall {
    pub target: String,
}

/// Aggregate counts mined from one function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionSummary {
    pub name: String,
    /// Total instruction count; always positive for a parsed function.
    pub total_instr: u64,
    /// Loop-nesting depth of each I/O call, in source order.
    pub io_calls: Vec<u32>,
    pub mem_ops: u64,
    pub int_alu: u64,
    pub fp_alu: u64,
    pub lock_ops: u64,
    pub calls_barrier: bool,
    pub calls_net: bool,
    pub calls_sleep: bool,
    pub max_loop_nest: u32,
    pub blocking_calls: Vec<BlockingCall>,
}

/// Parses a `.sir` source text and returns one summary per function, in
/// source order.
pub fn parse_ir(text: &str) -> Result<Vec<FunctionSummary>> {
    Ok(parse_program(text)?.summaries())
}

/// Parses a `.sir` source text into its syntax tree.
pub fn parse_program(text: &str) -> Result<Program> {
    let mut functions = Vec::new();
    // stack of open loop bodies inside the current function
    let mut loops: Vec<Vec<Item>> = Vec::new();
    let mut current: Option<Function> = None;
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let stripped = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let tokens: Vec<&str> = stripped.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }

        match tokens.as_slice() {
            ["func", name, "{"] => {
                if current.is_some() {
                    return Err(err(line, "nested function definition"));
                }
                if !valid_name(name) {
                    return Err(err(line, format!("invalid function name `{name}`")));
                }
                current = Some(Function {
                    name: (*name).to_string(),
                    body: Vec::new(),
                    line,
                });
            }
            ["loop", "{"] => {
                if current.is_none() {
                    return Err(err(line, "`loop` outside of a function"));
                }
                loops.push(Vec::new());
            }
            ["}"] => {
                if let Some(body) = loops.pop() {
                    push_item(&mut current, &mut loops, Item::Loop(body));
                } else if let Some(func) = current.take() {
                    if count_instrs(&func.body) == 0 {
                        return Err(err(func.line, format!("empty function `{}`", func.name)));
                    }
                    functions.push(func);
                } else {
                    return Err(err(line, "unbalanced `}`"));
                }
            }
            ["call", target] => {
                if current.is_none() {
                    return Err(err(line, "instruction outside of a function"));
                }
                if !valid_target(target) {
                    return Err(err(line, format!("invalid call target `{target}`")));
                }
                push_item(&mut current, &mut loops, Item::Instr(Opcode::Call((*target).to_string())));
            }
            [word] => {
                let op = match *word {
                    "load" => Opcode::Load,
                    "store" => Opcode::Store,
                    "addi" => Opcode::AddI,
                    "muli" => Opcode::MulI,
                    "addf" => Opcode::AddF,
                    "mulf" => Opcode::MulF,
                    "lock" => Opcode::Lock,
                    "nop" => Opcode::Nop,
                    other => return Err(err(line, format!("unknown opcode `{other}`"))),
                };
                if current.is_none() {
                    return Err(err(line, "instruction outside of a function"));
                }
                push_item(&mut current, &mut loops, Item::Instr(op));
            }
            _ => {
                return Err(err(line, format!("malformed line `{}`", stripped.trim())));
            }
        }
    }

    if current.is_some() || !loops.is_empty() {
        return Err(err(last_line, "unbalanced braces at end of input"));
    }
    Ok(Program { functions })
}

fn err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn valid_target(target: &str) -> bool {
    let mut chars = target.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '.')
}

fn push_item(current: &mut Option<Function>, loops: &mut [Vec<Item>], item: Item) {
    if let Some(body) = loops.last_mut() {
        body.push(item);
    } else {
        current
            .as_mut()
            .expect("checked by caller")
            .body
            .push(item);
    }
}

fn count_instrs(items: &[Item]) -> u64 {
    items
        .iter()
        .map(|item| match item {
            Item::Instr(_) => 1,
            Item::Loop(body) => count_instrs(body),
        })
        .sum()
}

impl Program {
    /// Canonical text form; parsing it back yields the same summaries.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for func in &self.functions {
            out.push_str(&format!("func {} {{\n", func.name));
            write_items(&mut out, &func.body, 1);
            out.push_str("}\n");
        }
        out
    }

    pub fn summaries(&self) -> Vec<FunctionSummary> {
        self.functions.iter().map(Function::summarize).collect()
    }
}

fn write_items(out: &mut String, items: &[Item], depth: usize) {
    let indent = "  ".repeat(depth);
    for item in items {
        match item {
            Item::Instr(op) => out.push_str(&format!("{indent}{}\n", op.text())),
            Item::Loop(body) => {
                out.push_str(&format!("{indent}loop {{\n"));
                write_items(out, body, depth + 1);
                out.push_str(&format!("{indent}}}\n"));
            }
        }
    }
}

impl Function {
    pub fn summarize(&self) -> FunctionSummary {
        let mut summary = FunctionSummary {
            name: self.name.clone(),
            total_instr: 0,
            io_calls: Vec::new(),
            mem_ops: 0,
            int_alu: 0,
            fp_alu: 0,
            lock_ops: 0,
            calls_barrier: false,
            calls_net: false,
            calls_sleep: false,
            max_loop_nest: 0,
            blocking_calls: Vec::new(),
        };
        tally(&self.body, 0, &mut summary);
        summary
    }
}

fn tally(items: &[Item], depth: u32, summary: &mut FunctionSummary) {
    for item in items {
        match item {
            Item::Instr(op) => {
                summary.total_instr += 1;
                match op {
                    Opcode::Load | Opcode::Store => summary.mem_ops += 1,
                    Opcode::AddI | Opcode::MulI => summary.int_alu += 1,
                    Opcode::AddF | Opcode::MulF => summary.fp_alu += 1,
                    Opcode::Lock => summary.lock_ops += 1,
                    Opcode::Nop => {}
                    Opcode::Call(target) => {
                        if target == "barrier" {
                            summary.calls_barrier = true;
                            summary.blocking_calls.push(BlockingCall {
                                target: target.clone(),
                            });
                        } else if target == "sleep" {
                            summary.calls_sleep = true;
                            summary.blocking_calls.push(BlockingCall {
                                target: target.clone(),
                            });
                        } else if target == "net" || target.starts_with("net.") {
                            summary.calls_net = true;
                            summary.blocking_calls.push(BlockingCall {
                                target: target.clone(),
                            });
                        } else if target == "io" || target.starts_with("io.") {
                            summary.io_calls.push(depth);
                        }
                    }
                }
            }
            Item::Loop(body) => {
                summary.max_loop_nest = summary.max_loop_nest.max(depth + 1);
                tally(body, depth + 1, summary);
            }
        }
    }
}
