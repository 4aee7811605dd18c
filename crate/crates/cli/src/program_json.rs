//! Machine-readable form of a guarded-command program (`.prog.json`).
//! Values of `st` are written by name.

use locksynth_core::codegen::{Command, GuardedProgram, Initial, LockValue, ProcessProgram, Valuation};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ProgramJsonError {
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("process {process}: unknown state `{state}`")]
    UnknownState { process: String, state: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Lock {
    Mine,
    Free,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assignment {
    pub st: String,
    pub vars: Vec<(String, bool)>,
    pub locks: Vec<(String, Lock)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommandFile {
    pub action: String,
    pub guard: Assignment,
    pub update: Assignment,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProcessFile {
    pub name: String,
    pub shared: Vec<String>,
    pub locals: Vec<String>,
    pub locks: Vec<String>,
    pub states: Vec<String>,
    pub initial: Vec<Assignment>,
    pub commands: Vec<CommandFile>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProgramFile {
    pub name: String,
    pub shared: Vec<String>,
    pub locks: Vec<String>,
    pub processes: Vec<ProcessFile>,
}

fn lock_out(v: LockValue) -> Lock {
    match v {
        LockValue::Mine => Lock::Mine,
        LockValue::Free => Lock::Free,
    }
}

fn lock_in(v: Lock) -> LockValue {
    match v {
        Lock::Mine => LockValue::Mine,
        Lock::Free => LockValue::Free,
    }
}

fn assignment(states: &[String], st: usize, vars: &[(String, bool)], locks: &[(String, LockValue)]) -> Assignment {
    Assignment {
        st: states[st].clone(),
        vars: vars.to_vec(),
        locks: locks.iter().map(|(l, v)| (l.clone(), lock_out(*v))).collect(),
    }
}

impl From<&GuardedProgram> for ProgramFile {
    fn from(p: &GuardedProgram) -> Self {
        let processes = p
            .processes
            .iter()
            .map(|pr| {
                let val = |v: &Valuation| assignment(&pr.states, v.st, &v.vars, &v.locks);
                ProcessFile {
                    name: pr.name.clone(),
                    shared: pr.shared.clone(),
                    locals: pr.locals.clone(),
                    locks: pr.locks.clone(),
                    states: pr.states.clone(),
                    initial: pr.initial.iter().map(|i| assignment(&pr.states, i.st, &i.vars, &i.locks)).collect(),
                    commands: pr
                        .commands
                        .iter()
                        .map(|c| CommandFile { action: c.action.clone(), guard: val(&c.guard), update: val(&c.update) })
                        .collect(),
                }
            })
            .collect();
        ProgramFile { name: p.name.clone(), shared: p.shared.clone(), locks: p.locks.clone(), processes }
    }
}

impl ProgramFile {
    pub fn to_program(&self) -> Result<GuardedProgram, ProgramJsonError> {
        let mut processes = Vec::new();
        for pr in &self.processes {
            let st = |name: &str| {
                pr.states.iter().position(|s| s == name).ok_or_else(|| ProgramJsonError::UnknownState {
                    process: pr.name.clone(),
                    state: name.to_string(),
                })
            };
            let locks = |a: &Assignment| a.locks.iter().map(|(l, v)| (l.clone(), lock_in(*v))).collect::<Vec<_>>();
            let val = |a: &Assignment| -> Result<Valuation, ProgramJsonError> {
                Ok(Valuation { st: st(&a.st)?, vars: a.vars.clone(), locks: locks(a) })
            };
            let mut initial = Vec::new();
            for a in &pr.initial {
                initial.push(Initial { st: st(&a.st)?, vars: a.vars.clone(), locks: locks(a) });
            }
            let mut commands = Vec::new();
            for c in &pr.commands {
                commands.push(Command { action: c.action.clone(), guard: val(&c.guard)?, update: val(&c.update)? });
            }
            processes.push(ProcessProgram {
                name: pr.name.clone(),
                shared: pr.shared.clone(),
                locals: pr.locals.clone(),
                locks: pr.locks.clone(),
                states: pr.states.clone(),
                initial,
                commands,
            });
        }
        Ok(GuardedProgram { name: self.name.clone(), shared: self.shared.clone(), locks: self.locks.clone(), processes })
    }
}

pub fn to_string(p: &GuardedProgram) -> String {
    serde_json::to_string_pretty(&ProgramFile::from(p)).expect("plain data serializes")
}

pub fn from_str(s: &str) -> Result<GuardedProgram, ProgramJsonError> {
    serde_json::from_str::<ProgramFile>(s)?.to_program()
}
