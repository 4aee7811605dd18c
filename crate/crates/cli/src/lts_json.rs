//! JSON form of an LTS.
//!
//! ```json
//! {"states":2,"props":["p"],"actions":[{"name":"a","kind":"internal"}],
//!  "initials":[0],"labeling":{"0":["p"],"1":[]},"transitions":[[0,"a",1]]}
//! ```
//!
//! Keys are written in this order; labeling has one entry per state.

use std::collections::BTreeMap;
use std::path::Path;

use locksynth_core::lts::{Action, ActionKind, Lts, LtsError};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LtsJsonError {
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Lts(#[from] LtsError),
    #[error("labeling mentions state {0}, which does not exist")]
    UnknownState(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Internal,
    Env,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionEntry {
    pub name: String,
    pub kind: Kind,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LtsFile {
    pub states: usize,
    pub props: Vec<String>,
    pub actions: Vec<ActionEntry>,
    pub initials: Vec<usize>,
    pub labeling: BTreeMap<usize, Vec<String>>,
    pub transitions: Vec<(usize, String, usize)>,
}

impl From<&Lts> for LtsFile {
    fn from(t: &Lts) -> Self {
        let actions = t
            .actions()
            .iter()
            .map(|a| ActionEntry {
                name: a.name.clone(),
                kind: match a.kind {
                    ActionKind::Internal => Kind::Internal,
                    ActionKind::Env => Kind::Env,
                },
            })
            .collect();
        LtsFile {
            states: t.num_states(),
            props: t.props().to_vec(),
            actions,
            initials: t.initials().to_vec(),
            labeling: t.states().map(|s| (s, t.label_names(s).into_iter().map(String::from).collect())).collect(),
            transitions: t.transitions().iter().map(|&(s, a, u)| (s, t.actions()[a].name.clone(), u)).collect(),
        }
    }
}

impl LtsFile {
    pub fn to_lts(&self) -> Result<Lts, LtsJsonError> {
        let actions = self
            .actions
            .iter()
            .map(|a| match a.kind {
                Kind::Internal => Action::internal(&a.name),
                Kind::Env => Action::env(&a.name),
            })
            .collect();
        let mut b = Lts::builder(self.states, self.props.clone(), actions);
        for &s in &self.initials {
            b.initial(s);
        }
        for (&s, props) in &self.labeling {
            if s >= self.states {
                return Err(LtsJsonError::UnknownState(s));
            }
            for p in props {
                b.label(s, p);
            }
        }
        for (s, a, u) in &self.transitions {
            b.transition(*s, a, *u);
        }
        Ok(b.build()?)
    }
}

pub fn to_string(t: &Lts) -> String {
    serde_json::to_string_pretty(&LtsFile::from(t)).expect("plain data serializes")
}

pub fn from_str(s: &str) -> Result<Lts, LtsJsonError> {
    serde_json::from_str::<LtsFile>(s)?.to_lts()
}

pub fn read(path: &Path) -> Result<Lts, LtsJsonError> {
    from_str(&std::fs::read_to_string(path)?)
}

pub fn write(path: &Path, t: &Lts) -> Result<(), LtsJsonError> {
    Ok(std::fs::write(path, to_string(t) + "\n")?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Lts {
        let mut b = Lts::builder(3, vec!["p".into(), "q".into()], vec![Action::internal("a"), Action::env("ch_q")]);
        b.initial(0).label(0, "p").label(2, "q").label(2, "p");
        b.transition(0, "a", 1).transition(1, "ch_q", 2).transition(2, "a", 0);
        b.build().unwrap()
    }

    #[test]
    fn round_trip() {
        let t = sample();
        assert_eq!(from_str(&to_string(&t)).unwrap(), t);
    }

    #[test]
    fn key_order_is_fixed() {
        let s = serde_json::to_string(&LtsFile::from(&sample())).unwrap();
        assert_eq!(
            s,
            r#"{"states":3,"props":["p","q"],"actions":[{"name":"a","kind":"internal"},{"name":"ch_q","kind":"env"}],"initials":[0],"labeling":{"0":["p"],"1":[],"2":["p","q"]},"transitions":[[0,"a",1],[1,"ch_q",2],[2,"a",0]]}"#
        );
    }

    #[test]
    fn rejects_unknown_names() {
        let bad = r#"{"states":1,"props":[],"actions":[],"initials":[0],"labeling":{"0":["x"]},"transitions":[]}"#;
        assert!(matches!(from_str(bad), Err(LtsJsonError::Lts(LtsError::UnknownProp(_)))));
        let bad = r#"{"states":1,"props":[],"actions":[],"initials":[0],"labeling":{"3":[]},"transitions":[]}"#;
        assert!(matches!(from_str(bad), Err(LtsJsonError::UnknownState(3))));
        let bad = r#"{"states":1,"props":[],"actions":[],"initials":[0],"labeling":{},"transitions":[[0,"go",0]]}"#;
        assert!(matches!(from_str(bad), Err(LtsJsonError::Lts(LtsError::UnknownAction(_)))));
    }
}
